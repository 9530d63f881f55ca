use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::AXIOM_TOLERANCE;

/// Anything that claims to be a norm on R^dim.
pub trait Norm {
    fn dim(&self) -> usize;
    fn norm(&self, v: &[f64]) -> f64;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub samples: usize,
    pub seed: u64,
    /// max |‖αv‖ − |α|‖v‖| / (1 + |α|‖v‖)
    pub worst_homogeneity: f64,
    /// min (‖u‖ + ‖v‖ − ‖u+v‖) / (1 + ‖u‖ + ‖v‖); negative means a violation
    pub worst_triangle_slack: f64,
    pub worst_positivity: f64,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Statistical check of the norm axioms.
///
/// Draws `samples` vector pairs and scalars α ∈ [−10, 10] from a ChaCha8
/// stream seeded with `seed` (coordinates uniform in [−5, 5]). Positivity is
/// additionally probed at ±eᵢ and at 0, so seminorms that vanish along a
/// coordinate axis are caught deterministically.
pub fn validate_norm_axioms<N: Norm + ?Sized>(space: &N, samples: usize, seed: u64) -> ValidationReport {
    let dim = space.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_homogeneity = 0.0f64;
    let mut worst_triangle_slack = f64::INFINITY;
    let mut worst_positivity = 0.0f64;
    let mut failures = Vec::new();

    let mut positivity = |v: &[f64], failures: &mut Vec<String>| {
        let n = space.norm(v);
        let sup = v.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let violation = if n.is_nan() {
            f64::INFINITY
        } else if sup == 0.0 {
            n.abs()
        } else if n <= AXIOM_TOLERANCE * sup {
            sup
        } else {
            0.0
        };
        if violation > AXIOM_TOLERANCE && failures.len() < 8 {
            failures.push(format!("positivity violated at {v:?}: norm = {n}"));
        }
        worst_positivity = worst_positivity.max(violation);
    };

    positivity(&vec![0.0; dim], &mut failures);
    for i in 0..dim {
        for sign in [1.0, -1.0] {
            let mut e = vec![0.0; dim];
            e[i] = sign;
            positivity(&e, &mut failures);
        }
    }

    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..dim).map(|_| rng.random_range(-5.0..=5.0)).collect() };
    for _ in 0..samples {
        let u = draw(&mut rng);
        let v = draw(&mut rng);
        let alpha: f64 = rng.random_range(-10.0..=10.0);

        positivity(&u, &mut failures);

        let nu = space.norm(&u);
        let nv = space.norm(&v);
        let scaled: Vec<f64> = u.iter().map(|c| alpha * c).collect();
        let h = (space.norm(&scaled) - alpha.abs() * nu).abs() / (1.0 + alpha.abs() * nu);
        if h > AXIOM_TOLERANCE && failures.len() < 8 {
            failures.push(format!("homogeneity violated at alpha = {alpha}, v = {u:?}"));
        }
        worst_homogeneity = worst_homogeneity.max(h);

        let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let slack = (nu + nv - space.norm(&sum)) / (1.0 + nu + nv);
        if slack < -AXIOM_TOLERANCE && failures.len() < 8 {
            failures.push(format!("triangle inequality violated at u = {u:?}, v = {v:?}"));
        }
        worst_triangle_slack = worst_triangle_slack.min(slack);
    }

    let passed = worst_homogeneity <= AXIOM_TOLERANCE
        && worst_positivity <= AXIOM_TOLERANCE
        && (samples == 0 || worst_triangle_slack >= -AXIOM_TOLERANCE);
    ValidationReport {
        samples,
        seed,
        worst_homogeneity,
        worst_triangle_slack,
        worst_positivity,
        passed,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{NormedSpace, VectorN};

    struct FirstCoordinate;

    impl Norm for FirstCoordinate {
        fn dim(&self) -> usize {
            2
        }
        fn norm(&self, v: &[f64]) -> f64 {
            v[0].abs()
        }
    }

    #[test]
    fn euclidean_passes_tightly() {
        let r = validate_norm_axioms(&NormedSpace::lp(2.0, 2).unwrap(), 1000, 7);
        assert!(r.passed, "{r:?}");
        assert!(r.worst_homogeneity <= 1e-12);
    }

    #[test]
    fn square_polytope_passes() {
        let pts = [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)]
            .iter()
            .map(|&(a, b)| VectorN::from_pair(a, b).unwrap())
            .collect();
        let s = NormedSpace::polyhedral("square", pts).unwrap();
        assert!(validate_norm_axioms(&s, 1000, 1).passed);
    }

    #[test]
    fn seminorm_fails_positivity() {
        let r = validate_norm_axioms(&FirstCoordinate, 1000, 3);
        assert!(!r.passed);
        assert!(r.failures.iter().any(|f| f.contains("positivity") && f.contains("[0.0, 1.0]")), "{:?}", r.failures);
    }

    #[test]
    fn reports_are_deterministic() {
        let s = NormedSpace::day_james();
        assert_eq!(validate_norm_axioms(&s, 200, 9), validate_norm_axioms(&s, 200, 9));
    }
}
