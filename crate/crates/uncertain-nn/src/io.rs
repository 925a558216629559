//! Versioned JSON formats for instances, query results, qualification sets,
//! and diagram features.
//!
//! Every float is written as `{:.16e}` (17 significant digits), which
//! round-trips any finite f64 exactly, so serialize-parse-serialize is the
//! identity on bytes.

use crate::instances::InstanceStats;
use crate::model::{ModelError, UncertainPoint, UncertainSet, Variant};
use crate::nonzero::{DiagramVertex, VertexKind};
use crate::quantify::QuantificationVector;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0}, expected {FORMAT_VERSION}")]
    Version(u32),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("malformed file: {0}")]
    BadFile(String),
}

/// serde_json formatter that writes every f64 with full precision.
struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: Write + ?Sized>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

/// Compact JSON with lossless floats and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, IoError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes utf-8"))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    Ok(std::fs::write(path, to_json(value)?)?)
}

fn check_version(version: u32) -> Result<(), IoError> {
    if version == FORMAT_VERSION {
        Ok(())
    } else {
        Err(IoError::Version(version))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum PointRecord {
    Disk { center: [f64; 2], radius: f64 },
    Discrete { locations: Vec<[f64; 2]>, weights: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InstanceFile {
    pub version: u32,
    pub variant: String,
    pub points: Vec<PointRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<InstanceStats>,
}

impl InstanceFile {
    pub fn from_set(set: &UncertainSet, stats: Option<InstanceStats>) -> Self {
        let variant = match set.variant() {
            Variant::Disk => "disk",
            Variant::Discrete => "discrete",
        };
        let points = set
            .points()
            .iter()
            .map(|p| match p {
                UncertainPoint::Disk(d) => PointRecord::Disk {
                    center: [d.region.center.x, d.region.center.y],
                    radius: d.region.radius,
                },
                UncertainPoint::Discrete(d) => PointRecord::Discrete {
                    locations: d.locations().iter().map(|l| [l.x, l.y]).collect(),
                    weights: d.weights().to_vec(),
                },
            })
            .collect();
        InstanceFile {
            version: FORMAT_VERSION,
            variant: variant.to_string(),
            points,
            stats,
        }
    }

    pub fn to_set(&self) -> Result<UncertainSet, IoError> {
        check_version(self.version)?;
        let expect_disk = match self.variant.as_str() {
            "disk" => true,
            "discrete" => false,
            other => return Err(IoError::BadFile(format!("unknown variant {other:?}"))),
        };
        let points = self
            .points
            .iter()
            .map(|rec| match (rec, expect_disk) {
                (PointRecord::Disk { center, radius }, true) => {
                    if !(center[0].is_finite() && center[1].is_finite() && radius.is_finite()) {
                        return Err(IoError::BadFile("non-finite disk parameters".into()));
                    }
                    if *radius <= 0.0 {
                        return Err(IoError::BadFile(format!("disk radius {radius} not positive")));
                    }
                    Ok(UncertainPoint::disk(
                        crate::geom::Point2::new(center[0], center[1]),
                        *radius,
                    )?)
                }
                (PointRecord::Discrete { locations, weights }, false) => {
                    Ok(UncertainPoint::discrete(
                        locations
                            .iter()
                            .map(|l| crate::geom::Point2::new(l[0], l[1]))
                            .collect(),
                        weights.clone(),
                    )?)
                }
                _ => Err(IoError::BadFile(
                    "point record does not match the declared variant".into(),
                )),
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(UncertainSet::new(points)?)
    }
}

pub fn read_instance(path: &Path) -> Result<(UncertainSet, InstanceFile), IoError> {
    let text = std::fs::read_to_string(path)?;
    let file: InstanceFile = serde_json::from_str(&text)?;
    let set = file.to_set()?;
    Ok((set, file))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EntryRecord {
    pub index: usize,
    pub probability: f64,
}

/// Output of one quantification query, including enough parameters to rerun
/// it. `timing_us` is the only field allowed to differ between identical
/// runs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ResultFile {
    pub version: u32,
    pub query: [f64; 2],
    pub method: String,
    pub entries: Vec<EntryRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Monte Carlo rounds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    /// Truncated-sweep prefix length.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefix: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_us: Option<f64>,
}

impl ResultFile {
    pub fn new(query: crate::geom::Point2, v: &QuantificationVector) -> Self {
        ResultFile {
            version: FORMAT_VERSION,
            query: [query.x, query.y],
            method: v.method.name().to_string(),
            entries: v
                .entries()
                .iter()
                .map(|&(index, probability)| EntryRecord { index, probability })
                .collect(),
            error_bound: v.error_bound,
            epsilon: None,
            delta: None,
            tolerance: None,
            seed: None,
            rounds: None,
            prefix: None,
            timing_us: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct NnFile {
    pub version: u32,
    pub query: [f64; 2],
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VertexRecord {
    pub location: [f64; 2],
    pub value: f64,
    pub kind: VertexKind,
    pub triple: [usize; 3],
    pub residual: f64,
}

/// Crossing count of one lower-boundary pair, empirical input to the
/// pairwise-crossing bound.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PairCrossings {
    pub i: usize,
    pub j: usize,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FeaturesFile {
    pub version: u32,
    /// Total accepted features: the diagram complexity count.
    pub mu: usize,
    pub vertices: Vec<VertexRecord>,
    pub pair_crossings: Vec<PairCrossings>,
}

impl FeaturesFile {
    pub fn from_vertices(vertices: &[DiagramVertex]) -> Self {
        let mut counts: std::collections::BTreeMap<(usize, usize), usize> =
            std::collections::BTreeMap::new();
        for v in vertices {
            if v.kind == VertexKind::Crossing {
                *counts.entry((v.triple.0, v.triple.1)).or_default() += 1;
            }
        }
        FeaturesFile {
            version: FORMAT_VERSION,
            mu: vertices.len(),
            vertices: vertices
                .iter()
                .map(|v| VertexRecord {
                    location: [v.location.x, v.location.y],
                    value: v.value,
                    kind: v.kind,
                    triple: [v.triple.0, v.triple.1, v.triple.2],
                    residual: v.residual,
                })
                .collect(),
            pair_crossings: counts
                .into_iter()
                .map(|((i, j), count)| PairCrossings { i, j, count })
                .collect(),
        }
    }
}
