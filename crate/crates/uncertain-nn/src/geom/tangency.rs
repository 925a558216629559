//! Solver for equal-clearance tangency systems.
//!
//! A constraint ties one disk to an unknown common value `t`: either the
//! minimum distance `max(|vc| - r, 0) = t` or the maximum distance
//! `|vc| + r = t`. Three constraints pin down isolated points `(v, t)`;
//! geometrically `v` is the center of a disk of radius `t` tangent to each
//! constrained disk from outside (MinDist) or enclosing it (MaxDist).
//!
//! Each constraint is `|v - c_i| = t + s_i` with a signed offset
//! `s_i = +r_i` (MinDist) or `-r_i` (MaxDist). Squaring and subtracting one
//! chosen pivot equation cancels both `|v|^2` and `t^2`, leaving two linear
//! equations in `(x, y, t)`. The solution line of that system, substituted
//! into the pivot's circle equation, yields a quadratic with at most two
//! roots. Squaring admits ghost branches (the wrong hyperbola branch or the
//! ellipse of the summed distances), so every root is validated against the
//! original unsquared constraints before it is returned.

use super::{dist, Disk, Point2};
use thiserror::Error;

/// Relative tolerance shared by the root validation here and the feature
/// acceptance filter downstream. Residuals are measured against `1 + |t|`.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    /// `max(|vc| - r, 0) = t`: the witness disk touches this disk from outside.
    MinDist,
    /// `|vc| + r = t`: the witness disk encloses this disk, touching it.
    MaxDist,
}

#[derive(Debug, Clone, Copy)]
pub struct TangencyConstraint {
    pub disk_index: usize,
    pub kind: ConstraintKind,
}

impl TangencyConstraint {
    pub fn min_dist(disk_index: usize) -> Self {
        TangencyConstraint { disk_index, kind: ConstraintKind::MinDist }
    }

    pub fn max_dist(disk_index: usize) -> Self {
        TangencyConstraint { disk_index, kind: ConstraintKind::MaxDist }
    }
}

/// A validated root of the constraint system.
#[derive(Debug, Clone, Copy)]
pub struct TangencySolution {
    pub point: Point2,
    /// The common clearance value `t >= 0`.
    pub value: f64,
    /// Largest absolute violation among the three constraints.
    pub residual: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum TangencyError {
    /// The constraints describe an infinite solution locus, e.g. two
    /// identical constraints or two constraints on coincident disks.
    #[error("constraints describe an infinite solution locus")]
    DegenerateConstraint,
    #[error("constraint references disk {0} but only {1} disks were given")]
    BadIndex(usize, usize),
}

/// Solver configuration; `tolerance` is the one knob shared by root
/// validation and downstream feature filtering.
#[derive(Debug, Clone, Copy)]
pub struct TangencySolver {
    pub tolerance: f64,
}

impl Default for TangencySolver {
    fn default() -> Self {
        TangencySolver { tolerance: DEFAULT_TOLERANCE }
    }
}

/// Solves the three-constraint system with the default tolerance.
pub fn solve_tangency(
    c1: TangencyConstraint,
    c2: TangencyConstraint,
    c3: TangencyConstraint,
    disks: &[Disk],
) -> Result<Vec<TangencySolution>, TangencyError> {
    TangencySolver::default().solve(c1, c2, c3, disks)
}

/// One constraint resolved against its disk, with the signed offset.
#[derive(Clone, Copy)]
struct Resolved {
    center: Point2,
    radius: f64,
    offset: f64,
    kind: ConstraintKind,
}

impl TangencySolver {
    pub fn solve(
        &self,
        c1: TangencyConstraint,
        c2: TangencyConstraint,
        c3: TangencyConstraint,
        disks: &[Disk],
    ) -> Result<Vec<TangencySolution>, TangencyError> {
        let cs = [c1, c2, c3];
        let mut resolved = [Resolved {
            center: Point2::new(0.0, 0.0),
            radius: 0.0,
            offset: 0.0,
            kind: ConstraintKind::MinDist,
        }; 3];
        for (slot, c) in resolved.iter_mut().zip(cs.iter()) {
            let d = disks
                .get(c.disk_index)
                .ok_or(TangencyError::BadIndex(c.disk_index, disks.len()))?;
            let offset = match c.kind {
                ConstraintKind::MinDist => d.radius,
                ConstraintKind::MaxDist => -d.radius,
            };
            *slot = Resolved { center: d.center, radius: d.radius, offset, kind: c.kind };
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                let (a, b) = (&resolved[i], &resolved[j]);
                if a.center == b.center && a.radius == b.radius && a.kind == b.kind {
                    return Err(TangencyError::DegenerateConstraint);
                }
            }
        }

        // Pivot on the smallest disk: its circle equation has the best
        // conditioned coefficients once coordinates are recentered on it.
        let pivot = (0..3)
            .min_by(|&a, &b| resolved[a].radius.total_cmp(&resolved[b].radius))
            .unwrap();
        let others: Vec<usize> = (0..3).filter(|&i| i != pivot).collect();
        let p = resolved[pivot];
        let rows: Vec<[f64; 4]> = others
            .iter()
            .map(|&i| {
                let c = resolved[i].center - p.center;
                let s = resolved[i].offset;
                // -2 c.v + |c|^2 = 2 (s - s_p) t + s^2 - s_p^2
                [
                    -2.0 * c.x,
                    -2.0 * c.y,
                    -2.0 * (s - p.offset),
                    s * s - p.offset * p.offset - c.norm_sq(),
                ]
            })
            .collect();
        let (r1, r2) = (rows[0], rows[1]);

        let m_xy = r1[0] * r2[1] - r2[0] * r1[1];
        let m_xt = r1[0] * r2[2] - r2[0] * r1[2];
        let m_yt = r1[1] * r2[2] - r2[1] * r1[2];
        let scale1 = r1[0].abs().max(r1[1].abs()).max(r1[2].abs());
        let scale2 = r2[0].abs().max(r2[1].abs()).max(r2[2].abs());
        let minor_floor = 1e-14 * (scale1 * scale2).max(f64::MIN_POSITIVE);
        let best = m_xy.abs().max(m_xt.abs()).max(m_yt.abs());

        let mut candidates: Vec<(Point2, f64)> = Vec::new();
        if best <= minor_floor {
            return rank_deficient(&r1, &r2, scale1, scale2);
        }

        // Parameterize the solution line of the 2x3 system by the variable
        // left out of the largest 2x2 minor, as affine forms in s.
        let (ax, bx, ay, by, at, bt) = if m_xy.abs() == best {
            let ax = (r1[3] * r2[1] - r2[3] * r1[1]) / m_xy;
            let bx = (r2[2] * r1[1] - r1[2] * r2[1]) / m_xy;
            let ay = (r1[0] * r2[3] - r2[0] * r1[3]) / m_xy;
            let by = (r2[0] * r1[2] - r1[0] * r2[2]) / m_xy;
            (ax, bx, ay, by, 0.0, 1.0)
        } else if m_xt.abs() == best {
            let ax = (r1[3] * r2[2] - r2[3] * r1[2]) / m_xt;
            let bx = (r2[1] * r1[2] - r1[1] * r2[2]) / m_xt;
            let at = (r1[0] * r2[3] - r2[0] * r1[3]) / m_xt;
            let bt = (r2[0] * r1[1] - r1[0] * r2[1]) / m_xt;
            (ax, bx, 0.0, 1.0, at, bt)
        } else {
            let ay = (r1[3] * r2[2] - r2[3] * r1[2]) / m_yt;
            let by = (r2[0] * r1[2] - r1[0] * r2[2]) / m_yt;
            let at = (r1[1] * r2[3] - r2[1] * r1[3]) / m_yt;
            let bt = (r2[1] * r1[0] - r1[1] * r2[0]) / m_yt;
            (0.0, 1.0, ay, by, at, bt)
        };

        // Pivot circle equation x^2 + y^2 = (t + s_p)^2 in recentered coords.
        let qa = bx * bx + by * by - bt * bt;
        let qb = 2.0 * (ax * bx + ay * by - (at + p.offset) * bt);
        let qc = ax * ax + ay * ay - (at + p.offset) * (at + p.offset);
        let roots = solve_quadratic(qa, qb, qc)?;
        for s in roots {
            let v = Point2::new(ax + bx * s + p.center.x, ay + by * s + p.center.y);
            let t = at + bt * s;
            candidates.push((v, t));
        }

        let mut out: Vec<TangencySolution> = Vec::new();
        for (v, t) in candidates {
            let (v, t) = newton_polish(v, t, &resolved);
            if !t.is_finite() || !v.x.is_finite() || !v.y.is_finite() {
                continue;
            }
            if t < -self.tolerance {
                continue;
            }
            let t = t.max(0.0);
            let residual = resolved
                .iter()
                .map(|r| (clearance(v, r) - t).abs())
                .fold(0.0f64, f64::max);
            if residual <= self.tolerance * (1.0 + t.abs()) {
                let dup = out.iter().any(|s| {
                    dist(s.point, v) <= self.tolerance * (1.0 + v.x.abs() + v.y.abs())
                        && (s.value - t).abs() <= self.tolerance * (1.0 + t)
                });
                if !dup {
                    out.push(TangencySolution { point: v, value: t, residual });
                }
            }
        }
        out.sort_by(|a, b| {
            a.point
                .x
                .total_cmp(&b.point.x)
                .then(a.point.y.total_cmp(&b.point.y))
        });
        out.truncate(4);
        Ok(out)
    }
}

fn clearance(v: Point2, r: &Resolved) -> f64 {
    let d = dist(v, r.center);
    match r.kind {
        ConstraintKind::MinDist => (d - r.radius).max(0.0),
        ConstraintKind::MaxDist => d + r.radius,
    }
}

/// Both rows are parallel: either the same plane (a whole conic of
/// solutions) or two disjoint planes (nothing).
fn rank_deficient(
    r1: &[f64; 4],
    r2: &[f64; 4],
    scale1: f64,
    scale2: f64,
) -> Result<Vec<TangencySolution>, TangencyError> {
    let rhs_floor1 = 1e-12 * (1.0 + scale1);
    let rhs_floor2 = 1e-12 * (1.0 + scale2);
    let row1_zero = scale1 <= f64::MIN_POSITIVE;
    let row2_zero = scale2 <= f64::MIN_POSITIVE;
    if row1_zero && r1[3].abs() > rhs_floor1 {
        return Ok(Vec::new());
    }
    if row2_zero && r2[3].abs() > rhs_floor2 {
        return Ok(Vec::new());
    }
    if row1_zero || row2_zero {
        // one vacuous row leaves a plane meeting the cone in a curve
        return Err(TangencyError::DegenerateConstraint);
    }
    // proportional coefficient rows: consistent iff rhs follows the ratio
    let (num, den) = if r1[0].abs() >= r1[1].abs() && r1[0].abs() >= r1[2].abs() {
        (r2[0], r1[0])
    } else if r1[1].abs() >= r1[2].abs() {
        (r2[1], r1[1])
    } else {
        (r2[2], r1[2])
    };
    let lambda = num / den;
    if (r2[3] - lambda * r1[3]).abs() <= 1e-9 * (1.0 + r2[3].abs() + (lambda * r1[3]).abs()) {
        Err(TangencyError::DegenerateConstraint)
    } else {
        Ok(Vec::new())
    }
}

/// At most two real roots; a slightly negative discriminant is clamped so
/// that true tangencies survive roundoff.
fn solve_quadratic(a: f64, b: f64, c: f64) -> Result<Vec<f64>, TangencyError> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale <= f64::MIN_POSITIVE {
        // the whole parameter line satisfies the circle equation
        return Err(TangencyError::DegenerateConstraint);
    }
    if a.abs() <= 1e-14 * scale {
        if b.abs() <= 1e-14 * scale {
            return Ok(Vec::new());
        }
        return Ok(vec![-c / b]);
    }
    let mut disc = b * b - 4.0 * a * c;
    let disc_scale = (b * b).abs() + (4.0 * a * c).abs();
    if disc < 0.0 {
        if disc >= -1e-12 * disc_scale {
            disc = 0.0;
        } else {
            return Ok(Vec::new());
        }
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    if q.abs() <= f64::MIN_POSITIVE {
        return Ok(vec![0.0]);
    }
    let s1 = q / a;
    let s2 = c / q;
    if (s1 - s2).abs() <= 1e-12 * (1.0 + s1.abs() + s2.abs()) {
        Ok(vec![s1])
    } else {
        Ok(vec![s1, s2])
    }
}

/// A couple of Newton steps on the unsquared system sharpen roots that the
/// squared algebra leaves a few ulps off. Falls back to the input whenever
/// the step does not reduce the residual.
fn newton_polish(v0: Point2, t0: f64, rs: &[Resolved; 3]) -> (Point2, f64) {
    let unclamped = |v: Point2, t: f64| -> [f64; 3] {
        let mut f = [0.0; 3];
        for (fi, r) in f.iter_mut().zip(rs.iter()) {
            *fi = dist(v, r.center) - t - r.offset;
        }
        f
    };
    let norm = |f: &[f64; 3]| f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let (mut v, mut t) = (v0, t0);
    let mut best = norm(&unclamped(v, t));
    for _ in 0..3 {
        if best < 1e-14 * (1.0 + t.abs()) {
            break;
        }
        let mut jac = [[0.0f64; 3]; 3];
        let f = unclamped(v, t);
        let mut ok = true;
        for (row, r) in jac.iter_mut().zip(rs.iter()) {
            let d = dist(v, r.center);
            if d <= 1e-300 {
                ok = false;
                break;
            }
            row[0] = (v.x - r.center.x) / d;
            row[1] = (v.y - r.center.y) / d;
            row[2] = -1.0;
        }
        if !ok {
            break;
        }
        let Some(step) = solve3(&jac, &f) else { break };
        let cand_v = Point2::new(v.x - step[0], v.y - step[1]);
        let cand_t = t - step[2];
        let cand_norm = norm(&unclamped(cand_v, cand_t));
        if cand_norm < best {
            v = cand_v;
            t = cand_t;
            best = cand_norm;
        } else {
            break;
        }
    }
    (v, t)
}

/// Gaussian elimination with partial pivoting on a 3x3 system.
fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let mut m = [[0.0f64; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() <= 1e-300 {
            return None;
        }
        m.swap(col, piv);
        let pivot_row = m[col];
        for row in &mut m[(col + 1)..] {
            let k = row[col] / pivot_row[col];
            for (dst, src) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= k * src;
            }
        }
    }
    let mut x = [0.0f64; 3];
    for i in (0..3).rev() {
        let mut acc = m[i][3];
        for j in (i + 1)..3 {
            acc -= m[i][j] * x[j];
        }
        x[i] = acc / m[i][i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_disks(centers: &[(f64, f64)]) -> Vec<Disk> {
        centers
            .iter()
            .map(|&(x, y)| Disk::new(Point2::new(x, y), 1.0))
            .collect()
    }

    fn contains_point(sols: &[TangencySolution], x: f64, y: f64, t: f64) -> bool {
        sols.iter().any(|s| {
            (s.point.x - x).abs() < 1e-7 && (s.point.y - y).abs() < 1e-7 && (s.value - t).abs() < 1e-7
        })
    }

    #[test]
    fn two_min_one_max_symmetric_pair() {
        let disks = unit_disks(&[(-6.0, 0.0), (2.0, 0.0), (-2.0, 0.0)]);
        let sols = solve_tangency(
            TangencyConstraint::min_dist(0),
            TangencyConstraint::min_dist(1),
            TangencyConstraint::max_dist(2),
            &disks,
        )
        .unwrap();
        assert!(contains_point(&sols, -2.0, 3.0, 4.0), "{sols:?}");
        assert!(contains_point(&sols, -2.0, -3.0, 4.0), "{sols:?}");
    }

    #[test]
    fn two_min_one_max_wide_pair() {
        let disks = unit_disks(&[(-6.0, 0.0), (6.0, 0.0), (-2.0, 0.0)]);
        let sols = solve_tangency(
            TangencyConstraint::min_dist(0),
            TangencyConstraint::min_dist(1),
            TangencyConstraint::max_dist(2),
            &disks,
        )
        .unwrap();
        let y = 3.0 * 5.0f64.sqrt();
        assert!(contains_point(&sols, 0.0, y, 8.0), "{sols:?}");
        assert!(contains_point(&sols, 0.0, -y, 8.0), "{sols:?}");
    }

    #[test]
    fn coincident_disks_are_degenerate() {
        let disks = unit_disks(&[(0.0, 0.0), (0.0, 0.0), (3.0, 0.0)]);
        let err = solve_tangency(
            TangencyConstraint::min_dist(0),
            TangencyConstraint::min_dist(1),
            TangencyConstraint::max_dist(2),
            &disks,
        )
        .unwrap_err();
        assert_eq!(err, TangencyError::DegenerateConstraint);
    }

    #[test]
    fn identical_constraints_are_degenerate() {
        let disks = unit_disks(&[(0.0, 0.0), (3.0, 0.0), (6.0, 0.0)]);
        let err = solve_tangency(
            TangencyConstraint::min_dist(0),
            TangencyConstraint::min_dist(0),
            TangencyConstraint::max_dist(2),
            &disks,
        )
        .unwrap_err();
        assert_eq!(err, TangencyError::DegenerateConstraint);
    }

    #[test]
    fn bad_index_is_reported() {
        let disks = unit_disks(&[(0.0, 0.0)]);
        let err = solve_tangency(
            TangencyConstraint::min_dist(0),
            TangencyConstraint::min_dist(1),
            TangencyConstraint::max_dist(0),
            &disks,
        )
        .unwrap_err();
        assert_eq!(err, TangencyError::BadIndex(1, 1));
    }

    #[test]
    fn infeasible_offsets_return_empty() {
        // min-distance clearances of nested-scale disks can never agree:
        // the difference of distances would have to exceed the center gap
        let disks = vec![
            Disk::new(Point2::new(0.0, 0.0), 5.0),
            Disk::new(Point2::new(1.0, 0.0), 1.0),
            Disk::new(Point2::new(0.0, 3.0), 1.0),
        ];
        let sols = solve_tangency(
            TangencyConstraint::min_dist(0),
            TangencyConstraint::min_dist(1),
            TangencyConstraint::max_dist(2),
            &disks,
        )
        .unwrap();
        assert!(sols.is_empty(), "{sols:?}");
    }

    #[test]
    fn zero_radius_max_dist_target() {
        let disks = vec![
            Disk::new(Point2::new(0.0, 0.0), 1.0),
            Disk::new(Point2::new(4.0, 0.0), 1.0),
            Disk::new(Point2::new(2.0, 5.0), 0.0),
        ];
        let sols = solve_tangency(
            TangencyConstraint::min_dist(0),
            TangencyConstraint::min_dist(1),
            TangencyConstraint::max_dist(2),
            &disks,
        )
        .unwrap();
        assert_eq!(sols.len(), 1);
        assert!(contains_point(&sols, 2.0, 8.0 / 3.0, 7.0 / 3.0), "{sols:?}");
    }

    #[test]
    fn residuals_meet_the_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut seen = 0;
        for _ in 0..500 {
            let disks: Vec<Disk> = (0..3)
                .map(|_| {
                    Disk::new(
                        Point2::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)),
                        rng.gen_range(0.1..3.0),
                    )
                })
                .collect();
            let kinds = [
                TangencyConstraint {
                    disk_index: 0,
                    kind: if rng.gen() { ConstraintKind::MinDist } else { ConstraintKind::MaxDist },
                },
                TangencyConstraint {
                    disk_index: 1,
                    kind: if rng.gen() { ConstraintKind::MinDist } else { ConstraintKind::MaxDist },
                },
                TangencyConstraint {
                    disk_index: 2,
                    kind: if rng.gen() { ConstraintKind::MinDist } else { ConstraintKind::MaxDist },
                },
            ];
            let Ok(sols) = solve_tangency(kinds[0], kinds[1], kinds[2], &disks) else {
                continue;
            };
            for s in &sols {
                seen += 1;
                assert!(s.value >= 0.0);
                assert!(
                    s.residual <= DEFAULT_TOLERANCE * (1.0 + s.value),
                    "residual {} at value {}",
                    s.residual,
                    s.value
                );
            }
        }
        assert!(seen > 100, "solver produced too few solutions to be meaningful: {seen}");
    }

    #[test]
    fn tiny_perturbations_move_roots_gently() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut compared = 0;
        for _ in 0..200 {
            let disks: Vec<Disk> = (0..3)
                .map(|_| {
                    Disk::new(
                        Point2::new(rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0)),
                        rng.gen_range(0.3..2.0),
                    )
                })
                .collect();
            let c = [
                TangencyConstraint::min_dist(0),
                TangencyConstraint::min_dist(1),
                TangencyConstraint::max_dist(2),
            ];
            let Ok(base) = solve_tangency(c[0], c[1], c[2], &disks) else { continue };
            let moved: Vec<Disk> = disks
                .iter()
                .map(|d| {
                    Disk::new(
                        Point2::new(d.center.x + 1e-12, d.center.y - 1e-12),
                        d.radius,
                    )
                })
                .collect();
            let Ok(pert) = solve_tangency(c[0], c[1], c[2], &moved) else { continue };
            if base.len() != pert.len() {
                continue; // a root at a near-tangency may appear or vanish
            }
            for s in &base {
                // far roots sit near asymptotic crossings of the two curves
                // where the intersection angle vanishes; their position is
                // ill-conditioned no matter how the system is solved
                if s.point.x.hypot(s.point.y) > 1e3 {
                    continue;
                }
                let nearest = pert
                    .iter()
                    .map(|p| dist(p.point, s.point))
                    .fold(f64::INFINITY, f64::min);
                assert!(nearest < 1e-4, "root moved by {nearest}");
                compared += 1;
            }
        }
        assert!(compared > 50, "too few stable comparisons: {compared}");
    }
}
