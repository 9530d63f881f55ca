//! Numerical estimation of geometric constants of finite-dimensional
//! normed spaces, with witnesses and error bounds.
//!
//! The crate is organized bottom-up: [`spaces`] provides norms, [`search`]
//! turns functionals of unit-vector pairs into global optimization problems,
//! [`constants`] defines one estimator per constant, and [`theorems`] checks
//! inequalities between them and produces self-auditing reports.

pub mod constants;
pub mod error;
pub mod search;
pub mod spaces;
pub mod theorems;

pub use constants::{ConstantId, ExactValue, Params};
pub use error::{Error, Result};
pub use search::{Estimate, Method, SearchConfig};
pub use spaces::{NormedSpace, ParamPair, VectorN};
pub use theorems::{TheoremId, TheoremReport, Verdict, Verification};
