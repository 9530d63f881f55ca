//! One estimator per geometric constant, and a catalog of known closed forms.
//!
//! Product-form constants (T, T₁, T₂) are searched as the product and
//! square-rooted afterwards; the square root is increasing, so the argmax
//! is unchanged and the hot loop stays free of `sqrt`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::{maximize_pairwise, maximize_pairwise_scaled, minimize_constrained_pair, Estimate, SearchConfig};
use crate::spaces::{Exponent, Family, NormedSpace, ParamPair};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstantId {
    T,
    T1,
    T2,
    J,
    #[serde(rename = "CNJ")]
    Cnj,
    #[serde(rename = "CNJp")]
    CnjPrime,
    A2,
    Akt,
    #[serde(rename = "delta")]
    Delta,
}

impl ConstantId {
    pub const ALL: [ConstantId; 9] = [
        ConstantId::T,
        ConstantId::T1,
        ConstantId::T2,
        ConstantId::J,
        ConstantId::Cnj,
        ConstantId::CnjPrime,
        ConstantId::A2,
        ConstantId::Akt,
        ConstantId::Delta,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConstantId::T => "T",
            ConstantId::T1 => "T1",
            ConstantId::T2 => "T2",
            ConstantId::J => "J",
            ConstantId::Cnj => "CNJ",
            ConstantId::CnjPrime => "CNJp",
            ConstantId::A2 => "A2",
            ConstantId::Akt => "Akt",
            ConstantId::Delta => "delta",
        }
    }

    /// Whether the constant takes a (κ, τ) pair.
    pub fn takes_pair(self) -> bool {
        matches!(self, ConstantId::T1 | ConstantId::T2 | ConstantId::Akt)
    }

    pub fn takes_eps(self) -> bool {
        self == ConstantId::Delta
    }
}

impl fmt::Display for ConstantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConstantId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::UnknownConstant(s.to_string()))
    }
}

/// Parameters of an estimator call. Which fields are required depends on
/// the constant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<ParamPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

impl Params {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn pair(pp: ParamPair) -> Self {
        Self { pair: Some(pp), eps: None }
    }

    pub fn eps(eps: f64) -> Self {
        Self { pair: None, eps: Some(eps) }
    }

    fn need_pair(&self, id: ConstantId) -> Result<ParamPair> {
        self.pair.ok_or_else(|| Error::InvalidParams(format!("{id} needs kappa and tau")))
    }

    fn need_eps(&self, id: ConstantId) -> Result<f64> {
        self.eps.ok_or_else(|| Error::InvalidParams(format!("{id} needs eps")))
    }
}

/// The functional behind each constant, evaluated at (x, t·y).
#[derive(Clone, Copy, Debug)]
struct Functional {
    id: ConstantId,
    k: f64,
    t: f64,
}

impl Functional {
    fn new(id: ConstantId, params: &Params) -> Result<Self> {
        let (k, t) = if id.takes_pair() {
            let pp = params.need_pair(id)?;
            (pp.kappa(), pp.tau())
        } else {
            (1.0, 1.0)
        };
        Ok(Self { id, k, t })
    }

    /// Value of the searched quantity (before any square root).
    #[inline]
    fn raw(&self, s: &NormedSpace, x: &[f64], y: &[f64], r: f64) -> f64 {
        let (k, t) = (self.k, self.t);
        match self.id {
            ConstantId::T | ConstantId::T1 => s.norm_combo(k, x, t, y) * s.norm_combo(k, x, -t, y),
            ConstantId::T2 => s.norm_combo(k, x, t, y) * s.norm_combo(t, x, -k, y),
            ConstantId::J => s.norm_combo(1.0, x, 1.0, y).min(s.norm_combo(1.0, x, -1.0, y)),
            ConstantId::CnjPrime => {
                let (a, b) = (s.norm_combo(1.0, x, 1.0, y), s.norm_combo(1.0, x, -1.0, y));
                (a * a + b * b) / 4.0
            }
            ConstantId::Cnj => {
                let (a, b) = (s.norm_combo(1.0, x, r, y), s.norm_combo(1.0, x, -r, y));
                (a * a + b * b) / (2.0 + 2.0 * r * r)
            }
            ConstantId::A2 | ConstantId::Akt => (s.norm_combo(k, x, t, y) + s.norm_combo(t, x, -k, y)) / 2.0,
            ConstantId::Delta => 1.0 - s.norm_combo(1.0, x, 1.0, y) / 2.0,
        }
    }

    fn is_product(&self) -> bool {
        matches!(self.id, ConstantId::T | ConstantId::T1 | ConstantId::T2)
    }

    fn finish(&self, raw: f64) -> f64 {
        if self.is_product() {
            raw.max(0.0).sqrt()
        } else {
            raw
        }
    }
}

fn search_max(space: &NormedSpace, fun: Functional, cfg: &SearchConfig) -> Result<Estimate> {
    let est = maximize_pairwise(space, |x, y| fun.raw(space, x, y, 1.0), cfg)?;
    Ok(if fun.is_product() { est.sqrt() } else { est })
}

/// T(X) = sup (‖x+y‖‖x−y‖)^{1/2}.
pub fn t_constant(space: &NormedSpace, cfg: &SearchConfig) -> Result<Estimate> {
    search_max(space, Functional::new(ConstantId::T, &Params::none())?, cfg)
}

/// T₁(κ,τ,X) = sup (‖κx+τy‖‖κx−τy‖)^{1/2}.
pub fn t1_constant(space: &NormedSpace, pp: ParamPair, cfg: &SearchConfig) -> Result<Estimate> {
    search_max(space, Functional::new(ConstantId::T1, &Params::pair(pp))?, cfg)
}

/// T₂(κ,τ,X) = sup (‖κx+τy‖‖τx−κy‖)^{1/2}.
pub fn t2_constant(space: &NormedSpace, pp: ParamPair, cfg: &SearchConfig) -> Result<Estimate> {
    search_max(space, Functional::new(ConstantId::T2, &Params::pair(pp))?, cfg)
}

/// J(X) = sup min(‖x+y‖, ‖x−y‖).
pub fn james_constant(space: &NormedSpace, cfg: &SearchConfig) -> Result<Estimate> {
    search_max(space, Functional::new(ConstantId::J, &Params::none())?, cfg)
}

/// C'_NJ(X) = sup (‖x+y‖² + ‖x−y‖²)/4 over unit pairs.
pub fn cnj_prime_constant(space: &NormedSpace, cfg: &SearchConfig) -> Result<Estimate> {
    search_max(space, Functional::new(ConstantId::CnjPrime, &Params::none())?, cfg)
}

/// C_NJ(X), reduced by homogeneity to x ∈ S(X), y ∈ t·S(X), t ∈ [0, 1].
/// t = 0 is kept; the quotient is 1 there.
pub fn cnj_constant(space: &NormedSpace, cfg: &SearchConfig) -> Result<Estimate> {
    let fun = Functional::new(ConstantId::Cnj, &Params::none())?;
    maximize_pairwise_scaled(space, |x, y, t| fun.raw(space, x, y, t), cfg)
}

/// A₂(X) = sup (‖x+y‖ + ‖x−y‖)/2.
pub fn a2_constant(space: &NormedSpace, cfg: &SearchConfig) -> Result<Estimate> {
    search_max(space, Functional::new(ConstantId::A2, &Params::none())?, cfg)
}

/// A_{κ-τ}(X) = sup (‖κx+τy‖ + ‖τx−κy‖)/2.
pub fn a_kt_constant(space: &NormedSpace, pp: ParamPair, cfg: &SearchConfig) -> Result<Estimate> {
    search_max(space, Functional::new(ConstantId::Akt, &Params::pair(pp))?, cfg)
}

/// δ_X(ε) = inf {1 − ‖x+y‖/2 : x, y ∈ S(X), ‖x−y‖ ≥ ε}, for dim = 2.
pub fn convexity_modulus(space: &NormedSpace, eps: f64, cfg: &SearchConfig) -> Result<Estimate> {
    if !(0.0..=2.0).contains(&eps) {
        return Err(Error::Domain(format!("eps must lie in [0, 2], got {eps}")));
    }
    let fun = Functional::new(ConstantId::Delta, &Params::none())?;
    let est = minimize_constrained_pair(space, |x, y| fun.raw(space, x, y, 1.0), eps, cfg)?;
    Ok(est.map_monotone(|v| v.clamp(0.0, 1.0), |_, e| e))
}

/// Runs the estimator for `id`, pulling κ, τ or ε out of `params`.
pub fn estimate(space: &NormedSpace, id: ConstantId, params: &Params, cfg: &SearchConfig) -> Result<Estimate> {
    match id {
        ConstantId::T => t_constant(space, cfg),
        ConstantId::T1 => t1_constant(space, params.need_pair(id)?, cfg),
        ConstantId::T2 => t2_constant(space, params.need_pair(id)?, cfg),
        ConstantId::J => james_constant(space, cfg),
        ConstantId::Cnj => cnj_constant(space, cfg),
        ConstantId::CnjPrime => cnj_prime_constant(space, cfg),
        ConstantId::A2 => a2_constant(space, cfg),
        ConstantId::Akt => a_kt_constant(space, params.need_pair(id)?, cfg),
        ConstantId::Delta => convexity_modulus(space, params.need_eps(id)?, cfg),
    }
}

/// Re-evaluates the constant's functional at a witness pair (x, t·y),
/// applying the same final transform as the estimator.
pub fn evaluate_at(space: &NormedSpace, id: ConstantId, params: &Params, x: &[f64], y: &[f64], t: f64) -> Result<f64> {
    space.norm(x)?;
    space.norm(y)?;
    let fun = Functional::new(id, params)?;
    Ok(fun.finish(fun.raw(space, x, y, if id == ConstantId::Cnj { t } else { 1.0 })))
}

/// A closed-form value from the literature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactValue {
    pub value: f64,
    pub source: String,
    /// Set when brute force contradicts the published value. Disputed
    /// entries are reported but excluded from agreement checks.
    pub disputed: bool,
}

impl ExactValue {
    fn new(value: f64, source: &str) -> Option<Self> {
        Some(Self { value, source: source.to_string(), disputed: false })
    }
}

/// Catalog lookup for (space, constant, params). `None` when no entry applies.
pub fn exact_value(space: &NormedSpace, id: ConstantId, params: &Params) -> Option<ExactValue> {
    let pp = params.pair;
    match (space.family(), id) {
        (_, ConstantId::T) if space.is_hilbert() => ExactValue::new(2f64.sqrt(), "Hilbert space: T = sqrt(2)"),
        (_, ConstantId::T2) if space.is_hilbert() => {
            let pp = pp?;
            ExactValue::new(pp.kappa().hypot(pp.tau()), "Hilbert space: T2 = sqrt(kappa^2 + tau^2)")
        }
        (Family::Lp(Exponent::Finite(p)), ConstantId::T1) if *p > 2.0 => {
            let pp = pp?;
            ExactValue::new(lp_t1(*p, pp.kappa(), pp.tau()), "lp, p > 2: T1 = 2^(-1/p) [(k+t)^p + |k-t|^p]^(1/p)")
        }
        (Family::Lp(Exponent::Finite(p)), ConstantId::T) if *p > 2.0 => {
            ExactValue::new(lp_t1(*p, 1.0, 1.0), "lp, p > 2: T = T1(1,1) = 2^(1-1/p)")
        }
        (Family::Lp(Exponent::Finite(p)), ConstantId::T2) if *p == 1.0 => {
            let pp = pp?;
            ExactValue::new(pp.kappa() + pp.tau(), "l1: T2 = kappa + tau")
        }
        (Family::Lp(Exponent::Finite(p)), ConstantId::T) if *p == 1.0 => {
            ExactValue::new(2.0, "l1 is not uniformly non-square: T = 2")
        }
        (Family::DayJames, ConstantId::T2) => {
            let pp = pp?;
            Some(ExactValue {
                value: pp.max() * (pp.kappa() + pp.tau()),
                source: "Day-James: published T2 = max(kappa, tau) (kappa + tau); \
                         brute force disagrees"
                    .into(),
                disputed: true,
            })
        }
        _ => None,
    }
}

/// 2^{−1/p} [(κ+τ)^p + |κ−τ|^p]^{1/p}.
pub fn lp_t1(p: f64, kappa: f64, tau: f64) -> f64 {
    2f64.powf(-1.0 / p) * ((kappa + tau).powf(p) + (kappa - tau).abs().powf(p)).powf(1.0 / p)
}
