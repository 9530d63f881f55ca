//! Run records: one self-describing line per computation.

use banach_core::{ConstantId, Estimate, Params, SearchConfig, TheoremId, Verification};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::emit::to_json;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Estimate(Estimate),
    Verification(Verification),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub timestamp: String,
    pub space_id: String,
    /// SHA-256 of the point file for `poly:` spaces.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space_digest: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<ConstantId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem_id: Option<TheoremId>,
    pub params: Params,
    pub config: SearchConfig,
    pub config_digest: String,
    pub outcome: Outcome,
}

/// What a record was computed from. Two runs with equal keys produce equal
/// outcomes, so the cache may hand back the stored one.
#[derive(Clone, Debug, PartialEq)]
pub struct RunKey {
    pub space_id: String,
    pub space_digest: Option<String>,
    pub operation: Operation,
    pub params: Params,
    pub config_digest: String,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Operation {
    Compute(ConstantId),
    Verify(TheoremId),
}

impl RunRecord {
    pub fn key(&self) -> RunKey {
        let operation = match (self.constant, self.theorem_id) {
            (Some(c), _) => Operation::Compute(c),
            (None, Some(t)) => Operation::Verify(t),
            (None, None) => unreachable!("records carry a constant or a theorem"),
        };
        RunKey {
            space_id: self.space_id.clone(),
            space_digest: self.space_digest.clone(),
            operation,
            params: self.params,
            config_digest: self.config_digest.clone(),
        }
    }

    pub fn estimate(&self) -> Option<&Estimate> {
        match &self.outcome {
            Outcome::Estimate(e) => Some(e),
            Outcome::Verification(_) => None,
        }
    }

    pub fn verification(&self) -> Option<&Verification> {
        match &self.outcome {
            Outcome::Verification(v) => Some(v),
            Outcome::Estimate(_) => None,
        }
    }
}

impl RunKey {
    pub fn into_record(self, config: SearchConfig, outcome: Outcome) -> RunRecord {
        let (constant, theorem_id) = match self.operation {
            Operation::Compute(c) => (Some(c), None),
            Operation::Verify(t) => (None, Some(t)),
        };
        RunRecord {
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            space_id: self.space_id,
            space_digest: self.space_digest,
            constant,
            theorem_id,
            params: self.params,
            config,
            config_digest: self.config_digest,
            outcome,
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Hash of the canonical JSON encoding of every serialized config field.
pub fn config_digest(cfg: &SearchConfig) -> String {
    sha256_hex(to_json(cfg).expect("config serializes").as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_tracks_every_field() {
        let base = SearchConfig::default();
        let d = config_digest(&base);
        assert_eq!(d, config_digest(&SearchConfig::default()));
        assert_eq!(d.len(), 64);
        let variants = [
            base.clone().with_grid(1024),
            SearchConfig { refine_rounds: 41, ..base.clone() },
            SearchConfig { shrink: 0.4, ..base.clone() },
            SearchConfig { multistart: 3, ..base.clone() },
            SearchConfig { seed: 1, ..base.clone() },
            SearchConfig { target_tol: 1e-5, ..base.clone() },
            SearchConfig { use_symmetry: false, ..base.clone() },
        ];
        for v in variants {
            assert_ne!(config_digest(&v), d, "{v:?}");
        }
        // the backend choice does not change results, so it is not hashed
        assert_eq!(config_digest(&SearchConfig { parallel: false, ..base }), d);
    }
}
