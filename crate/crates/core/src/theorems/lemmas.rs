//! Pointwise helpers for the auxiliary lemmas, used by property tests.

use crate::error::{Error, Result};
use crate::spaces::NormedSpace;

/// f(t) = ‖x + ty‖‖x − ty‖ and g(t) = ‖tx + y‖‖tx − y‖ for each t.
pub fn fixed_pair_profiles(space: &NormedSpace, x: &[f64], y: &[f64], ts: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let f = ts.iter().map(|&t| space.norm_combo(1.0, x, t, y) * space.norm_combo(1.0, x, -t, y)).collect();
    let g = ts.iter().map(|&t| space.norm_combo(t, x, 1.0, y) * space.norm_combo(t, x, -1.0, y)).collect();
    (f, g)
}

/// Index of the first step where `values` drops by more than `slack`.
pub fn first_decrease(values: &[f64], slack: f64) -> Option<usize> {
    values.windows(2).position(|w| w[1] < w[0] - slack).map(|i| i + 1)
}

/// φₓ(r) = sup over unit y of ‖x + ry‖‖x − ry‖, with y scanned over
/// `samples` directions of the unit circle (dim = 2 only).
pub fn sup_profile(space: &NormedSpace, x: &[f64], rs: &[f64], samples: usize) -> Result<Vec<f64>> {
    if space.dim() != 2 {
        return Err(Error::UnsupportedSpace(format!("{} is not planar", space.id())));
    }
    let ys: Vec<[f64; 2]> = (0..samples)
        .map(|j| space.circle_point(j as f64 * std::f64::consts::TAU / samples as f64))
        .collect();
    Ok(rs
        .iter()
        .map(|&r| {
            ys.iter()
                .map(|y| space.norm_combo(1.0, x, r, y) * space.norm_combo(1.0, x, -r, y))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect())
}

/// (‖x+y‖^p + ‖x−y‖^p) − [(‖x‖+‖y‖)^p + |‖x‖−‖y‖|^p]. Non-positive in ℓp
/// for p ≥ 2 (Hanner's inequality).
pub fn clarkson_excess(space: &NormedSpace, p: f64, x: &[f64], y: &[f64]) -> f64 {
    let (a, b) = (space.norm_combo(1.0, x, 1.0, y), space.norm_combo(1.0, x, -1.0, y));
    let (nx, ny) = (space.norm_unchecked(x), space.norm_unchecked(y));
    a.powf(p) + b.powf(p) - (nx + ny).powf(p) - (nx - ny).abs().powf(p)
}

/// κ² + τ² − 2^{1−2/p}(κ^p + τ^p)^{2/p}. Non-positive for p ≥ 2 by the
/// power-mean inequality.
pub fn power_mean_excess(kappa: f64, tau: f64, p: f64) -> f64 {
    kappa * kappa + tau * tau - 2f64.powf(1.0 - 2.0 / p) * (kappa.powf(p) + tau.powf(p)).powf(2.0 / p)
}
