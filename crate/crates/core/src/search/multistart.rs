//! Seeded multi-start hill climbing for dim > 2. Lower bounds only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::grid::map_rows;
use super::{objective_error, Estimate, Method, SearchConfig};
use crate::error::Result;
use crate::spaces::{NormedSpace, VectorN};

const TRIALS_PER_ROUND: usize = 16;
const INITIAL_STEP: f64 = 0.5;
const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

struct Climb {
    value: f64,
    x: Vec<f64>,
    y: Vec<f64>,
    t: f64,
    evaluations: u64,
    trace: Vec<f64>,
}

fn unit(space: &NormedSpace, v: Vec<f64>) -> Option<Vec<f64>> {
    let n = space.norm_unchecked(&v);
    (n.is_finite() && n > 0.0).then(|| v.into_iter().map(|c| c / n).collect())
}

fn random_unit(space: &NormedSpace, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v = (0..space.dim()).map(|_| rng.sample(StandardNormal)).collect();
        if let Some(u) = unit(space, v) {
            return u;
        }
    }
}

fn perturb(space: &NormedSpace, v: &[f64], step: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let w = v.iter().map(|c| c + step * rng.sample::<f64, _>(StandardNormal)).collect();
        if let Some(u) = unit(space, w) {
            return u;
        }
    }
}

fn climb<F>(space: &NormedSpace, f: &F, scaled: bool, start: usize, cfg: &SearchConfig) -> Result<Climb>
where
    F: Fn(&[f64], &[f64], f64) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add((start as u64 + 1).wrapping_mul(GOLDEN)));
    let eval = |x: &[f64], y: &[f64], t: f64| -> Result<f64> {
        let v = f(x, y, t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(objective_error(v, x, &y.iter().map(|c| t * c).collect::<Vec<_>>()))
        }
    };
    let mut x = random_unit(space, &mut rng);
    let mut y = random_unit(space, &mut rng);
    let mut t = if scaled { rng.random_range(0.0..=1.0) } else { 1.0 };
    let mut value = eval(&x, &y, t)?;
    let mut evaluations = 1;
    let mut trace = vec![value];
    let coords = if scaled { 3 } else { 2 };
    let mut step = INITIAL_STEP;

    for _ in 0..cfg.refine_rounds {
        for trial in 0..TRIALS_PER_ROUND {
            let (cx, cy, ct) = match trial % coords {
                0 => (perturb(space, &x, step, &mut rng), y.clone(), t),
                1 => (x.clone(), perturb(space, &y, step, &mut rng), t),
                _ => {
                    let d: f64 = rng.sample(StandardNormal);
                    (x.clone(), y.clone(), (t + step * d).clamp(0.0, 1.0))
                }
            };
            let v = eval(&cx, &cy, ct)?;
            evaluations += 1;
            if v > value {
                (value, x, y, t) = (v, cx, cy, ct);
            }
        }
        trace.push(value);
        step *= cfg.shrink;
    }
    Ok(Climb { value, x, y, t, evaluations, trace })
}

fn run<F>(space: &NormedSpace, f: &F, scaled: bool, cfg: &SearchConfig) -> Result<Estimate>
where
    F: Fn(&[f64], &[f64], f64) -> f64 + Sync,
{
    let climbs = map_rows(cfg.multistart, cfg.parallel, |s| climb(space, f, scaled, s, cfg));
    let mut evaluations = 0;
    let mut best: Option<Climb> = None;
    for c in climbs {
        let c = c?;
        evaluations += c.evaluations;
        // first start wins ties
        if best.as_ref().is_none_or(|b| c.value > b.value) {
            best = Some(c);
        }
    }
    let best = best.expect("multistart >= 1");
    Ok(Estimate {
        value: best.value,
        witness: (VectorN::new(best.x)?, VectorN::new(best.y)?),
        angles: None,
        scale: scaled.then_some(best.t),
        evaluations,
        error_bound: f64::INFINITY,
        lipschitz: None,
        method: Method::Multistart,
        trace: best.trace,
    })
}

pub(super) fn maximize<F>(space: &NormedSpace, f: &F, cfg: &SearchConfig) -> Result<Estimate>
where
    F: Fn(&[f64], &[f64]) -> f64 + Sync,
{
    run(space, &|x: &[f64], y: &[f64], _: f64| f(x, y), false, cfg)
}

pub(super) fn maximize_scaled<F>(space: &NormedSpace, f: &F, cfg: &SearchConfig) -> Result<Estimate>
where
    F: Fn(&[f64], &[f64], f64) -> f64 + Sync,
{
    run(space, f, true, cfg)
}
