use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constants::Params;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    T1Bounds,
    T1VsT,
    T2Bounds,
    T2Delta,
    T2Cnj,
    T2VsT,
    Uns,
    NormalStructure,
    BallSphere,
}

impl TheoremId {
    pub const ALL: [TheoremId; 9] = [
        TheoremId::T1Bounds,
        TheoremId::T1VsT,
        TheoremId::T2Bounds,
        TheoremId::T2Delta,
        TheoremId::T2Cnj,
        TheoremId::T2VsT,
        TheoremId::Uns,
        TheoremId::NormalStructure,
        TheoremId::BallSphere,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::T1Bounds => "t1-bounds",
            TheoremId::T1VsT => "t1-vs-t",
            TheoremId::T2Bounds => "t2-bounds",
            TheoremId::T2Delta => "t2-delta",
            TheoremId::T2Cnj => "t2-cnj",
            TheoremId::T2VsT => "t2-vs-t",
            TheoremId::Uns => "uns",
            TheoremId::NormalStructure => "normal-structure",
            TheoremId::BallSphere => "ball-sphere",
        }
    }

    pub fn takes_pair(self) -> bool {
        !matches!(self, TheoremId::Uns)
    }

    pub fn takes_eps(self) -> bool {
        self == TheoremId::T2Delta
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::UnknownTheorem(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Satisfied,
    Violated,
    Certified,
    NotCertified,
    Uns,
    NotUns,
    Undecided,
}

impl Verdict {
    /// Process exit code: 0 for positive outcomes, 1 for negative, 5 for
    /// undecided.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Satisfied | Verdict::Certified | Verdict::Uns => 0,
            Verdict::Violated | Verdict::NotCertified | Verdict::NotUns => 1,
            Verdict::Undecided => 5,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Satisfied => "SATISFIED",
            Verdict::Violated => "VIOLATED",
            Verdict::Certified => "CERTIFIED",
            Verdict::NotCertified => "NOT_CERTIFIED",
            Verdict::Uns => "UNS",
            Verdict::NotUns => "NOT_UNS",
            Verdict::Undecided => "UNDECIDED",
        })
    }
}

/// One inequality `lhs ≤ rhs` (or `lhs < rhs` when `strict`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// rhs − lhs
    pub slack: f64,
    /// Soft checks are reported but do not affect `satisfied`.
    pub hard: bool,
    /// Strict checks already carry the estimate's error bound inside `lhs`
    /// and pass only with positive slack.
    pub strict: bool,
}

impl InequalityCheck {
    pub fn le(name: &str, lhs: f64, rhs: f64) -> Self {
        Self { name: name.into(), lhs, rhs, slack: rhs - lhs, hard: true, strict: false }
    }

    pub fn lt(name: &str, lhs: f64, rhs: f64) -> Self {
        Self { strict: true, ..Self::le(name, lhs, rhs) }
    }

    pub fn expected(name: &str, lhs: f64, rhs: f64) -> Self {
        Self { hard: false, ..Self::le(name, lhs, rhs) }
    }

    pub fn holds(&self, tol: f64) -> bool {
        if self.strict {
            self.slack > 0.0
        } else {
            self.slack >= -tol
        }
    }
}

/// Outcome of one theorem check.
///
/// `lhs ≤ mid ≤ rhs` summarizes a sandwich when one applies; the full set
/// of inequalities lives in `checks`. `margin` is the smallest slack over
/// the hard checks and `satisfied` recomputes from the checks and `tol`
/// (see [`TheoremReport::audit`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem_id: TheoremId,
    pub space_id: String,
    pub params: Params,
    pub lhs: Option<f64>,
    pub mid: Option<f64>,
    pub rhs: Option<f64>,
    pub satisfied: bool,
    pub margin: f64,
    pub tol: f64,
    pub verdict: Verdict,
    pub checks: Vec<InequalityCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl TheoremReport {
    pub(crate) fn build(
        theorem_id: TheoremId,
        space_id: &str,
        params: Params,
        (lhs, mid, rhs): (Option<f64>, Option<f64>, Option<f64>),
        checks: Vec<InequalityCheck>,
        tol: f64,
    ) -> Self {
        let (satisfied, margin) = Self::evaluate(&checks, tol);
        let certifying = checks.iter().any(|c| c.strict);
        let verdict = match (certifying, satisfied) {
            (true, true) => Verdict::Certified,
            (true, false) => Verdict::NotCertified,
            (false, true) => Verdict::Satisfied,
            (false, false) => Verdict::Violated,
        };
        Self {
            theorem_id,
            space_id: space_id.to_string(),
            params,
            lhs,
            mid,
            rhs,
            satisfied,
            margin,
            tol,
            verdict,
            checks,
            caveat: None,
            notes: Vec::new(),
        }
    }

    fn evaluate(checks: &[InequalityCheck], tol: f64) -> (bool, f64) {
        let hard = checks.iter().filter(|c| c.hard);
        let margin = hard.clone().map(|c| c.slack).fold(f64::INFINITY, f64::min);
        (hard.clone().all(|c| c.holds(tol)), margin)
    }

    /// Recomputes `satisfied` and `margin` from the stored checks and
    /// returns whether they match the stored fields.
    pub fn audit(&self) -> bool {
        let (satisfied, margin) = Self::evaluate(&self.checks, self.tol);
        let consistent_slacks = self.checks.iter().all(|c| c.slack == c.rhs - c.lhs);
        satisfied == self.satisfied && margin == self.margin && consistent_slacks
    }

    pub(crate) fn with_caveat(mut self, caveat: impl Into<String>) -> Self {
        self.caveat = Some(caveat.into());
        self
    }

    pub(crate) fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Result of the uniform non-squareness classification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub theorem_id: TheoremId,
    pub space_id: String,
    pub t_value: f64,
    pub t_error_bound: f64,
    /// From T < 2.
    pub t_verdict: Verdict,
    pub t2_params: Params,
    pub t2_value: f64,
    pub t2_error_bound: f64,
    /// From T₂(κ,τ) < κ + τ.
    pub t2_verdict: Verdict,
    pub verdict: Verdict,
    /// Both criteria agree or at least one is undecided.
    pub agree: bool,
}

/// Either kind of verification result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Verification {
    Report(TheoremReport),
    Classification(ClassificationReport),
}

impl Verification {
    pub fn verdict(&self) -> Verdict {
        match self {
            Verification::Report(r) => r.verdict,
            Verification::Classification(c) => c.verdict,
        }
    }
}
