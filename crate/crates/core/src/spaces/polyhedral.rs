use minilp::{ComparisonOp, OptimizationDirection, Problem};

use super::VectorN;
use crate::error::{Error, Result};

const POINT_TOL: f64 = 1e-12;

/// Symmetric convex polytope given by its extreme points; the unit ball of a
/// polyhedral norm.
///
/// In R² the gauge is the maximum over facet functionals ⟨nₖ, v⟩, with the
/// facets found by sorting the vertices by angle. In higher dimension the
/// gauge is the optimum of min Σμᵢ subject to Σμᵢpᵢ = v, μ ≥ 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope {
    dim: usize,
    points: Vec<VectorN>,
    /// Outward facet normals scaled so that ⟨n, v⟩ = 1 on the facet (R² only).
    facets: Vec<[f64; 2]>,
}

impl Polytope {
    pub fn new(points: Vec<VectorN>) -> Result<Self> {
        let dim = points
            .first()
            .map(VectorN::dim)
            .ok_or_else(|| Error::InvalidSpace("polyhedral norm needs extreme points".into()))?;
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::InvalidSpace(format!(
                "extreme point {:?} has dimension {}, expected {dim}",
                p.coords(),
                p.dim()
            )));
        }
        if points.iter().any(VectorN::is_zero) {
            return Err(Error::InvalidSpace("the origin cannot be an extreme point".into()));
        }
        check_symmetric(&points)?;
        if rank(&points, dim) < dim {
            return Err(Error::InvalidSpace(format!("extreme points do not span R^{dim}")));
        }

        let facets = if dim == 2 {
            planar_facets(&points)?
        } else {
            for j in 0..points.len() {
                if in_hull_of_others(&points, j) {
                    return Err(Error::InvalidSpace(format!(
                        "point {:?} lies in the convex hull of the others",
                        points[j].coords()
                    )));
                }
            }
            Vec::new()
        };
        Ok(Self { dim, points, facets })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[VectorN] {
        &self.points
    }

    pub fn gauge(&self, v: &[f64]) -> f64 {
        self.gauge_with(v.len(), |i| v[i])
    }

    #[inline]
    pub(crate) fn gauge_with<F: Fn(usize) -> f64>(&self, n: usize, coord: F) -> f64 {
        if self.dim == 2 {
            let (a, b) = (coord(0), coord(1));
            self.facets.iter().map(|f| f[0] * a + f[1] * b).fold(0.0, f64::max)
        } else {
            let v: Vec<f64> = (0..n).map(coord).collect();
            self.gauge_lp(&v)
        }
    }

    fn gauge_lp(&self, v: &[f64]) -> f64 {
        if v.iter().all(|&c| c == 0.0) {
            return 0.0;
        }
        let mut problem = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<_> = self.points.iter().map(|_| problem.add_var(1.0, (0.0, f64::INFINITY))).collect();
        for (k, &target) in v.iter().enumerate() {
            let row: Vec<_> = vars.iter().zip(&self.points).map(|(&var, p)| (var, p[k])).collect();
            problem.add_constraint(&row[..], ComparisonOp::Eq, target);
        }
        match problem.solve() {
            Ok(solution) => solution.objective(),
            // the points span R^dim, so the program is always feasible and bounded
            Err(_) => f64::NAN,
        }
    }
}

fn check_symmetric(points: &[VectorN]) -> Result<()> {
    for p in points {
        let scale = 1.0 + p.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let mirrored = points.iter().any(|q| p.iter().zip(q.iter()).all(|(a, b)| (a + b).abs() <= POINT_TOL * scale));
        if !mirrored {
            return Err(Error::InvalidSpace(format!(
                "extreme point set is not symmetric: -{:?} is missing",
                p.coords()
            )));
        }
    }
    Ok(())
}

/// Numerical rank by Gaussian elimination with partial pivoting.
fn rank(points: &[VectorN], dim: usize) -> usize {
    let mut rows: Vec<Vec<f64>> = points.iter().map(|p| p.coords().to_vec()).collect();
    let scale = rows.iter().flatten().fold(0.0f64, |m, c| m.max(c.abs())).max(1.0);
    let mut r = 0;
    for col in 0..dim {
        let Some(pivot) = (r..rows.len()).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs())) else {
            break;
        };
        if rows[pivot][col].abs() <= 1e-10 * scale {
            continue;
        }
        rows.swap(r, pivot);
        for i in r + 1..rows.len() {
            let factor = rows[i][col] / rows[r][col];
            for c in col..dim {
                rows[i][c] -= factor * rows[r][c];
            }
        }
        r += 1;
    }
    r
}

fn planar_facets(points: &[VectorN]) -> Result<Vec<[f64; 2]>> {
    let mut sorted: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
    sorted.sort_by(|a, b| a[1].atan2(a[0]).total_cmp(&b[1].atan2(b[0])));
    let n = sorted.len();
    let scale = sorted.iter().fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    let mut facets = Vec::with_capacity(n);
    for k in 0..n {
        let a = sorted[k];
        let b = sorted[(k + 1) % n];
        let c = sorted[(k + 2) % n];
        let turn = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        if turn <= POINT_TOL * scale * scale {
            return Err(Error::InvalidSpace(format!(
                "point {b:?} is not an extreme point of the hull (duplicate or lies on/inside an edge)"
            )));
        }
        let det = a[0] * b[1] - a[1] * b[0];
        facets.push([(b[1] - a[1]) / det, (a[0] - b[0]) / det]);
    }
    Ok(facets)
}

/// Whether `points[j]` is a convex combination of the remaining points.
fn in_hull_of_others(points: &[VectorN], j: usize) -> bool {
    let dim = points[j].dim();
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = (0..points.len())
        .filter(|&i| i != j)
        .map(|i| (i, problem.add_var(0.0, (0.0, f64::INFINITY))))
        .collect();
    let weights: Vec<_> = vars.iter().map(|&(_, v)| (v, 1.0)).collect();
    problem.add_constraint(&weights[..], ComparisonOp::Eq, 1.0);
    for k in 0..dim {
        let row: Vec<_> = vars.iter().map(|&(i, v)| (v, points[i][k])).collect();
        problem.add_constraint(&row[..], ComparisonOp::Eq, points[j][k]);
    }
    problem.solve().is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pts(raw: &[&[f64]]) -> Vec<VectorN> {
        raw.iter().map(|c| VectorN::new(c.to_vec()).unwrap()).collect()
    }

    /// Gauge by bisection on the scaling t ↦ v/t against the facet inequalities.
    fn gauge_by_bisection(poly: &Polytope, v: [f64; 2]) -> f64 {
        let inside = |t: f64| poly.facets.iter().all(|f| f[0] * v[0] / t + f[1] * v[1] / t <= 1.0);
        let (mut lo, mut hi) = (1e-9f64, 1e9f64);
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if inside(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    #[test]
    fn square_is_linf() {
        let p = Polytope::new(pts(&[&[1.0, 1.0], &[-1.0, 1.0], &[1.0, -1.0], &[-1.0, -1.0]])).unwrap();
        assert_relative_eq!(p.gauge(&[0.5, -0.25]), 0.5, epsilon = 1e-15);
        assert_relative_eq!(p.gauge(&[-3.0, 2.0]), 3.0, epsilon = 1e-15);
    }

    #[test]
    fn hexagon_matches_bisection() {
        let p = Polytope::new(pts(&[
            &[1.0, 0.0],
            &[-1.0, 0.0],
            &[0.0, 1.0],
            &[0.0, -1.0],
            &[1.0, 1.0],
            &[-1.0, -1.0],
        ]))
        .unwrap();
        for v in [[1.0, 1.0], [1.0, -1.0], [0.3, 0.7], [-2.0, 0.5], [0.1, -0.9]] {
            assert_relative_eq!(p.gauge(&v), gauge_by_bisection(&p, v), epsilon = 1e-9);
        }
    }

    #[test]
    fn octahedron_gauge_is_l1() {
        let p = Polytope::new(pts(&[
            &[1.0, 0.0, 0.0],
            &[-1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.0, -1.0, 0.0],
            &[0.0, 0.0, 1.0],
            &[0.0, 0.0, -1.0],
        ]))
        .unwrap();
        assert_relative_eq!(p.gauge(&[1.0, -2.0, 0.5]), 3.5, epsilon = 1e-9);
        assert_eq!(p.gauge(&[0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn rejects_invalid_point_sets() {
        assert!(Polytope::new(pts(&[&[1.0, 0.0], &[0.0, 1.0], &[-1.0, 0.0]])).is_err());
        assert!(Polytope::new(pts(&[&[1.0, 0.0], &[-1.0, 0.0]])).is_err());
        // (0.5, 0) is inside the square
        assert!(Polytope::new(pts(&[
            &[1.0, 1.0],
            &[-1.0, 1.0],
            &[1.0, -1.0],
            &[-1.0, -1.0],
            &[0.5, 0.0],
            &[-0.5, 0.0]
        ]))
        .is_err());
        // (0, 0, 0.2) inside the octahedron
        assert!(Polytope::new(pts(&[
            &[1.0, 0.0, 0.0],
            &[-1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.0, -1.0, 0.0],
            &[0.0, 0.0, 1.0],
            &[0.0, 0.0, -1.0],
            &[0.0, 0.0, 0.2],
            &[0.0, 0.0, -0.2],
        ]))
        .is_err());
        // planar set inside R^3 does not span
        assert!(Polytope::new(pts(&[&[1.0, 0.0, 0.0], &[-1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, -1.0, 0.0]])).is_err());
    }
}
