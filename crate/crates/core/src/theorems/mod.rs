//! Numerical checks of the inequalities relating T, T₁, T₂ and the
//! classical constants.
//!
//! Every check runs the relevant estimators, builds each side of the
//! inequality, and compares them with a tolerance derived from the
//! estimates' own error bounds plus [`SLACK`]. Strict inequalities (the
//! normal-structure conditions) are certified only with a full error bound
//! of margin. All checks need a planar space, where the error bounds are
//! finite.

pub mod lemmas;
mod report;

use std::f64::consts::{SQRT_2, TAU};

pub use report::{ClassificationReport, InequalityCheck, TheoremId, TheoremReport, Verdict, Verification};

use crate::constants::{
    cnj_prime_constant, convexity_modulus, exact_value, t1_constant, t2_constant, t_constant, ConstantId, Params,
};
use crate::error::{Error, Result};
use crate::search::grid::map_rows;
use crate::search::{Estimate, SearchConfig};
use crate::spaces::{NormedSpace, ParamPair};

/// Absolute slack added to every derived tolerance.
pub const SLACK: f64 = 1e-9;
/// T − error_bound must reach 2 − this for a NOT_UNS verdict.
pub const NON_SQUARE_SLACK: f64 = 1e-6;
/// Radii of the ball-versus-sphere grid.
pub const BALL_RADII: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

const DIM_CAVEAT: &str = "the lower bound sqrt(kappa^2 + tau^2) is proved for infinite-dimensional spaces only; \
                          in dimension 2 it is an expected check and never fails the report";

fn planar(space: &NormedSpace) -> Result<()> {
    if space.dim() != 2 {
        return Err(Error::UnsupportedSpace(format!(
            "theorem checks need dim = 2 for finite error bounds, {} has dim {}",
            space.id(),
            space.dim()
        )));
    }
    Ok(())
}

/// Value and error bound of T₂² given an estimate of T₂.
fn squared(e: &Estimate) -> (f64, f64) {
    (e.value * e.value, e.error_bound * (2.0 * e.value + e.error_bound))
}

fn sandwich(lhs: f64, mid: f64, rhs: f64) -> (Option<f64>, Option<f64>, Option<f64>) {
    (Some(lhs), Some(mid), Some(rhs))
}

/// √(κ²+τ²) ≤ T₁(κ,τ,X) ≤ κ+τ.
pub fn check_t1_bounds(space: &NormedSpace, pp: ParamPair, cfg: &SearchConfig) -> Result<TheoremReport> {
    planar(space)?;
    let t1 = t1_constant(space, pp, cfg)?;
    let (lhs, rhs) = (pp.kappa().hypot(pp.tau()), pp.kappa() + pp.tau());
    let checks = vec![InequalityCheck::le("lower", lhs, t1.value), InequalityCheck::le("upper", t1.value, rhs)];
    Ok(TheoremReport::build(
        TheoremId::T1Bounds,
        space.id(),
        Params::pair(pp),
        sandwich(lhs, t1.value, rhs),
        checks,
        t1.error_bound + SLACK,
    ))
}

/// (κ∧τ)T(X) ≤ T₁(κ,τ,X) ≤ (κ∨τ)T(X).
pub fn check_t1_t_relation(space: &NormedSpace, pp: ParamPair, cfg: &SearchConfig) -> Result<TheoremReport> {
    planar(space)?;
    let t = t_constant(space, cfg)?;
    let t1 = t1_constant(space, pp, cfg)?;
    let (lhs, rhs) = (pp.min() * t.value, pp.max() * t.value);
    let checks = vec![InequalityCheck::le("lower", lhs, t1.value), InequalityCheck::le("upper", t1.value, rhs)];
    Ok(TheoremReport::build(
        TheoremId::T1VsT,
        space.id(),
        Params::pair(pp),
        sandwich(lhs, t1.value, rhs),
        checks,
        t1.error_bound + pp.max() * t.error_bound + SLACK,
    ))
}

/// √(κ²+τ²) ≤ T₂(κ,τ,X) ≤ κ+τ, with the lower bound as an expected check.
pub fn check_t2_bounds(space: &NormedSpace, pp: ParamPair, cfg: &SearchConfig) -> Result<TheoremReport> {
    planar(space)?;
    let t2 = t2_constant(space, pp, cfg)?;
    let (lhs, rhs) = (pp.kappa().hypot(pp.tau()), pp.kappa() + pp.tau());
    let tol = t2.error_bound + SLACK;
    let lower = InequalityCheck::expected("lower (expected)", lhs, t2.value);
    let lower_holds = lower.holds(tol);
    let checks = vec![lower, InequalityCheck::le("upper", t2.value, rhs)];
    let mut report = TheoremReport::build(
        TheoremId::T2Bounds,
        space.id(),
        Params::pair(pp),
        sandwich(lhs, t2.value, rhs),
        checks,
        tol,
    )
    .with_caveat(DIM_CAVEAT);
    if !lower_holds {
        report = report.note(format!("expected lower bound not met: T2 = {} < {lhs}", t2.value));
    }
    if let Some(exact) = exact_value(space, ConstantId::T2, &Params::pair(pp)) {
        if exact.disputed {
            let supports = if t2.value <= rhs + tol { "supports" } else { "contradicts" };
            report = report.note(format!(
                "published closed form gives {} but the measured T2 is {} (error bound {:e}); \
                 the measurement {supports} the upper bound kappa + tau = {rhs}",
                exact.value, t2.value, t2.error_bound
            ));
        }
    }
    Ok(report)
}

/// The two bounds on T₂² in terms of δ_X(ε). The upper bound is not valid
/// in general (ℓ₁² at κ = τ = 1, ε = 1 violates it); it is reported as
/// stated.
pub fn check_t2_delta_bounds(space: &NormedSpace, pp: ParamPair, eps: f64, cfg: &SearchConfig) -> Result<TheoremReport> {
    planar(space)?;
    let delta = convexity_modulus(space, eps, cfg)?;
    let t2 = t2_constant(space, pp, cfg)?;
    let (mid, mid_err) = squared(&t2);
    let (m, big, d) = (pp.min(), pp.max(), pp.gap());
    let u = 1.0 - delta.value;
    let lhs = 2.0 * big * big * eps * u - big * d * (2.0 * u + eps) + d * d;
    let rhs = 2.0 * m * m * eps * u + m * d * (2.0 * u + eps) + d * d;
    // sensitivity of either bound to δ
    let du = (2.0 * big * big * eps - 2.0 * big * d).abs().max(2.0 * m * m * eps + 2.0 * m * d);
    let tol = mid_err + du * delta.error_bound + SLACK;
    let checks = vec![InequalityCheck::le("lower", lhs, mid), InequalityCheck::le("upper", mid, rhs)];
    Ok(TheoremReport::build(
        TheoremId::T2Delta,
        space.id(),
        Params { pair: Some(pp), eps: Some(eps) },
        sandwich(lhs, mid, rhs),
        checks,
        tol,
    )
    .note(format!("delta({eps}) = {} (error bound {:e}); mid is T2^2", delta.value, delta.error_bound))
    .with_caveat(
        "the upper bound assumes the maximizing pair satisfies ||x - y|| <= eps, which the definition does not \
         guarantee; violations are reported, not treated as defects",
    ))
}

/// T₂(κ,τ,X)² ≤ 2κ²C'_NJ + 2√2κ|κ−τ|√C'_NJ + (κ−τ)².
pub fn check_t2_cnj_bound(space: &NormedSpace, pp: ParamPair, cfg: &SearchConfig) -> Result<TheoremReport> {
    planar(space)?;
    let t2 = t2_constant(space, pp, cfg)?;
    let c = cnj_prime_constant(space, cfg)?;
    let (mid, mid_err) = squared(&t2);
    let (k, d) = (pp.kappa(), pp.gap());
    let rhs = 2.0 * k * k * c.value + 2.0 * SQRT_2 * k * d * c.value.sqrt() + d * d;
    let dc = 2.0 * k * k + SQRT_2 * k * d / c.value.sqrt();
    let tol = mid_err + dc * c.error_bound + SLACK;
    Ok(TheoremReport::build(
        TheoremId::T2Cnj,
        space.id(),
        Params::pair(pp),
        (None, Some(mid), Some(rhs)),
        vec![InequalityCheck::le("upper", mid, rhs)],
        tol,
    )
    .note(format!("C'_NJ = {} (error bound {:e}); mid is T2^2", c.value, c.error_bound)))
}

/// [(κ∨τ)T]² − 4(κ∨τ)|κ−τ| + (κ−τ)² ≤ T₂² ≤ [(κ∧τ)T]² + 4(κ∧τ)|κ−τ| + (κ−τ)².
pub fn check_t2_t_relation(space: &NormedSpace, pp: ParamPair, cfg: &SearchConfig) -> Result<TheoremReport> {
    planar(space)?;
    let t = t_constant(space, cfg)?;
    let t2 = t2_constant(space, pp, cfg)?;
    let (mid, mid_err) = squared(&t2);
    let (m, big, d) = (pp.min(), pp.max(), pp.gap());
    let lhs = (big * t.value).powi(2) - 4.0 * big * d + d * d;
    let rhs = (m * t.value).powi(2) + 4.0 * m * d + d * d;
    let tol = mid_err + big * big * t.error_bound * (2.0 * t.value + t.error_bound) + SLACK;
    let checks = vec![InequalityCheck::le("lower", lhs, mid), InequalityCheck::le("upper", mid, rhs)];
    Ok(TheoremReport::build(
        TheoremId::T2VsT,
        space.id(),
        Params::pair(pp),
        sandwich(lhs, mid, rhs),
        checks,
        tol,
    )
    .note(format!("T = {} (error bound {:e}); mid is T2^2", t.value, t.error_bound)))
}

/// Verdict of "sup = bound" versus "sup < bound" for an estimate.
fn attains(e: &Estimate, bound: f64) -> Verdict {
    if e.value + e.error_bound < bound {
        Verdict::Uns
    } else if e.value - e.error_bound >= bound - NON_SQUARE_SLACK {
        Verdict::NotUns
    } else {
        Verdict::Undecided
    }
}

/// Uniform non-squareness from T(X) < 2, cross-checked against
/// T₂(1,2,X) < 3.
pub fn classify_uniform_nonsquareness(space: &NormedSpace, cfg: &SearchConfig) -> Result<ClassificationReport> {
    planar(space)?;
    let t = t_constant(space, cfg)?;
    let pp = ParamPair::new(1.0, 2.0)?;
    let t2 = t2_constant(space, pp, cfg)?;
    let t_verdict = attains(&t, 2.0);
    let t2_verdict = attains(&t2, pp.kappa() + pp.tau());
    let (verdict, agree) = match (t_verdict, t2_verdict) {
        (a, b) if a == b => (a, true),
        (Verdict::Undecided, b) => (b, true),
        (a, Verdict::Undecided) => (a, true),
        _ => (Verdict::Undecided, false),
    };
    Ok(ClassificationReport {
        theorem_id: TheoremId::Uns,
        space_id: space.id().to_string(),
        t_value: t.value,
        t_error_bound: t.error_bound,
        t_verdict,
        t2_params: Params::pair(pp),
        t2_value: t2.value,
        t2_error_bound: t2.error_bound,
        t2_verdict,
        verdict,
        agree,
    })
}

/// Which of the three parameter cases applies, and the radicand of its
/// threshold.
pub fn normal_structure_case(pp: ParamPair) -> (u8, f64) {
    let (k, t) = (pp.kappa(), pp.tau());
    if t < k {
        (1, t * (k + t))
    } else if t < 2.0 * k {
        (2, t * (3.0 * k - t))
    } else {
        (3, (4.0 * k - t) * (3.0 * k - t))
    }
}

/// Sufficient condition for normal structure: T₂ below a threshold that
/// depends on the (κ, τ) case. CERTIFIED needs T₂ + error_bound < threshold;
/// NOT_CERTIFIED says nothing about the absence of normal structure.
pub fn certify_normal_structure(space: &NormedSpace, pp: ParamPair, cfg: &SearchConfig) -> Result<TheoremReport> {
    planar(space)?;
    let t2 = t2_constant(space, pp, cfg)?;
    Ok(certify_with_estimate(space.id(), pp, &t2))
}

/// [`certify_normal_structure`] for a given T₂ estimate.
pub fn certify_with_estimate(space_id: &str, pp: ParamPair, t2: &Estimate) -> TheoremReport {
    let (case, radicand) = normal_structure_case(pp);
    let vacuous = case == 3 && radicand <= 0.0;
    let threshold = radicand.max(0.0).sqrt();
    let upper = t2.value + t2.error_bound;
    let mut report = TheoremReport::build(
        TheoremId::NormalStructure,
        space_id,
        Params::pair(pp),
        (None, Some(t2.value), Some(threshold)),
        vec![InequalityCheck::lt("T2 + error_bound < threshold", upper, threshold)],
        0.0,
    )
    .note(format!("case ({})", ["i", "ii", "iii"][case as usize - 1]))
    .note("NOT_CERTIFIED does not imply the absence of normal structure");
    if vacuous {
        report = report.note(format!("vacuous condition: radicand {radicand} <= 0"));
    }
    report
}

/// sup of the T₁ functional over B(X)×B(X), sampled on [`BALL_RADII`] times
/// `max(coarse_grid / 8, 16)` directions, against the sphere estimate.
pub fn check_ball_sphere_equivalence(space: &NormedSpace, pp: ParamPair, cfg: &SearchConfig) -> Result<TheoremReport> {
    planar(space)?;
    let sphere = t1_constant(space, pp, cfg)?;
    let directions = (cfg.coarse_grid / 8).max(16);
    let points: Vec<[f64; 2]> = BALL_RADII
        .iter()
        .flat_map(|&r| {
            (0..directions).map(move |j| {
                let u = space.circle_point(j as f64 * TAU / directions as f64);
                [r * u[0], r * u[1]]
            })
        })
        .collect();
    let (k, t) = (pp.kappa(), pp.tau());
    let rows = map_rows(points.len(), cfg.parallel, |i| {
        let x = &points[i];
        points
            .iter()
            .map(|y| space.norm_combo(k, x, t, y) * space.norm_combo(k, x, -t, y))
            .fold(f64::NEG_INFINITY, f64::max)
    });
    let ball = rows.into_iter().fold(f64::NEG_INFINITY, f64::max).max(0.0).sqrt();
    Ok(TheoremReport::build(
        TheoremId::BallSphere,
        space.id(),
        Params::pair(pp),
        (Some(ball), None, Some(sphere.value)),
        vec![InequalityCheck::le("ball <= sphere", ball, sphere.value)],
        sphere.error_bound + SLACK,
    )
    .note(format!("{} ball points per argument", points.len())))
}

/// Runs the check named by `id`.
pub fn verify(space: &NormedSpace, id: TheoremId, params: &Params, cfg: &SearchConfig) -> Result<Verification> {
    let pair = || params.pair.ok_or_else(|| Error::InvalidParams(format!("{id} needs kappa and tau")));
    let report = match id {
        TheoremId::Uns => return Ok(Verification::Classification(classify_uniform_nonsquareness(space, cfg)?)),
        TheoremId::T1Bounds => check_t1_bounds(space, pair()?, cfg)?,
        TheoremId::T1VsT => check_t1_t_relation(space, pair()?, cfg)?,
        TheoremId::T2Bounds => check_t2_bounds(space, pair()?, cfg)?,
        TheoremId::T2Delta => {
            let eps = params.eps.ok_or_else(|| Error::InvalidParams(format!("{id} needs eps")))?;
            check_t2_delta_bounds(space, pair()?, eps, cfg)?
        }
        TheoremId::T2Cnj => check_t2_cnj_bound(space, pair()?, cfg)?,
        TheoremId::T2VsT => check_t2_t_relation(space, pair()?, cfg)?,
        TheoremId::NormalStructure => certify_normal_structure(space, pair()?, cfg)?,
        TheoremId::BallSphere => check_ball_sphere_equivalence(space, pair()?, cfg)?,
    };
    Ok(Verification::Report(report))
}
