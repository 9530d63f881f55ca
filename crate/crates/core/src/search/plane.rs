//! Grid-and-refine engine for two-dimensional spaces.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::grid::{map_rows, top_cells, Cell};
use super::{
    objective_error, rounding_allowance, Estimate, Method, SearchConfig, LIPSCHITZ_SAFETY, RADIUS_GRID,
    REFINE_STARTS,
};
use crate::error::Result;
use crate::spaces::{NormedSpace, VectorN};

const STENCIL: i32 = 2;
const SLOPE_SAMPLES: usize = 64;
const SYMMETRY_PROBES: usize = 8;
const BISECTION_STEPS: usize = 64;
/// √(8·EPS), the widest angular band a rounded ‖x − y‖ ≥ ε test can admit.
const CONSTRAINT_BAND: f64 = 4.214_684_851_089_403_5e-8;

/// Precomputed unit vectors at θ = j·2π/n.
struct Lattice {
    n: usize,
    h: f64,
    rows: usize,
    circle: Vec<[f64; 2]>,
}

impl Lattice {
    fn new(space: &NormedSpace, n: usize, symmetric: bool) -> Self {
        let h = TAU / n as f64;
        // θ₁ = i·h < π
        let rows = if symmetric { n.div_ceil(2) } else { n };
        let circle = (0..n).map(|j| space.circle_point(j as f64 * h)).collect();
        Self { n, h, rows, circle }
    }

    fn angle(&self, i: usize) -> f64 {
        i as f64 * self.h
    }
}

struct Refined {
    cell: Cell,
    evaluations: u64,
    trace: Vec<f64>,
    slopes: [f64; 3],
}

fn neg(v: &[f64; 2]) -> [f64; 2] {
    [-v[0], -v[1]]
}

/// Spot-checks f(−x, −y, t) = f(x, y, t) at seeded random points.
fn even_symmetric<F>(space: &NormedSpace, f: F, seed: u64) -> bool
where
    F: Fn(&[f64], &[f64], f64) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x005E_ED0F_5A11);
    (0..SYMMETRY_PROBES).all(|_| {
        let x = space.circle_point(rng.random_range(0.0..TAU));
        let y = space.circle_point(rng.random_range(0.0..TAU));
        let t = rng.random_range(0.0..=1.0);
        let a = f(&x, &y, t);
        let b = f(&neg(&x), &neg(&y), t);
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
    })
}

/// Largest |∂f/∂axis| seen over seeded random finite differences with the
/// given steps. Axis 2 (the radius) is sampled in [0, 1 − step].
fn sample_slopes<E>(eval: E, steps: [f64; 3], axes: usize, seed: u64) -> [f64; 3]
where
    E: Fn([f64; 3]) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x51_0FE5);
    let mut slopes = [0.0f64; 3];
    for _ in 0..SLOPE_SAMPLES {
        let base = [
            rng.random_range(0.0..TAU),
            rng.random_range(0.0..TAU),
            if axes > 2 { rng.random_range(0.0..=(1.0 - steps[2]).max(0.0)) } else { 1.0 },
        ];
        let v0 = eval(base);
        for axis in 0..axes {
            let mut p = base;
            p[axis] += steps[axis];
            let d = (eval(p) - v0).abs() / steps[axis];
            if d.is_finite() {
                slopes[axis] = slopes[axis].max(d);
            }
        }
    }
    slopes
}

fn error_bound(value: f64, global: [f64; 3], local: [f64; 3], final_steps: [f64; 3]) -> (f64, f64) {
    let mut lipschitz = 0.0;
    let mut bound = 0.0;
    for axis in 0..3 {
        let l = LIPSCHITZ_SAFETY * global[axis].max(local[axis]);
        lipschitz += l;
        bound += l * final_steps[axis];
    }
    (bound + rounding_allowance(value), lipschitz)
}

/// Pattern search over a (2·STENCIL+1)^axes stencil shrinking by
/// `cfg.shrink` every round. Axis 2, when active, is clamped to [0, 1].
fn refine<E>(eval: &E, start: Cell, steps: [f64; 3], axes: usize, maximize: bool, cfg: &SearchConfig) -> Result<Refined>
where
    E: Fn([f64; 3]) -> Result<f64>,
{
    let width = (2 * STENCIL + 1) as usize;
    let points = width.pow(axes as u32);
    let mut best = start;
    let mut trace = Vec::with_capacity(cfg.refine_rounds + 1);
    trace.push(start.value);
    let mut evaluations = 0u64;
    let mut spacing = steps;
    let mut slopes = [0.0f64; 3];
    let mut values = vec![0.0f64; points];
    let mut positions = vec![[0.0f64; 3]; points];

    for round in 0..cfg.refine_rounds {
        for s in spacing.iter_mut() {
            *s *= cfg.shrink;
        }
        let center = best;
        for (idx, (value, pos)) in values.iter_mut().zip(positions.iter_mut()).enumerate() {
            let mut p = center.pos;
            let mut rest = idx;
            let mut at_center = true;
            for axis in 0..axes {
                let offset = (rest % width) as i32 - STENCIL;
                rest /= width;
                at_center &= offset == 0;
                p[axis] += offset as f64 * spacing[axis];
            }
            if axes > 2 {
                p[2] = p[2].clamp(0.0, 1.0);
            }
            let v = if at_center {
                center.value
            } else {
                evaluations += 1;
                eval(p)?
            };
            *value = v;
            *pos = p;
            let cand = Cell { value: v, pos: p };
            if cand.beats(&best, maximize) {
                best = cand;
            }
        }
        trace.push(best.value);

        if round + 1 == cfg.refine_rounds {
            // local slopes between axis-adjacent stencil points
            let mut stride = 1;
            for (axis, slope) in slopes.iter_mut().enumerate().take(axes) {
                for idx in 0..points {
                    if (idx / stride) % width + 1 < width {
                        let other = idx + stride;
                        let dist = (positions[other][axis] - positions[idx][axis]).abs();
                        if dist > 0.0 {
                            *slope = slope.max((values[other] - values[idx]).abs() / dist);
                        }
                    }
                }
                stride *= width;
            }
        }
    }
    Ok(Refined { cell: best, evaluations, trace, slopes })
}

pub(super) fn maximize<F>(space: &NormedSpace, f: &F, cfg: &SearchConfig) -> Result<Estimate>
where
    F: Fn(&[f64], &[f64]) -> f64 + Sync,
{
    let symmetric = cfg.use_symmetry && even_symmetric(space, |x, y, _| f(x, y), cfg.seed);
    if cfg.use_symmetry && !symmetric {
        log::warn!("objective is not even on {}; scanning the full grid", space.id());
    }
    let lat = Lattice::new(space, cfg.coarse_grid, symmetric);

    let rows = map_rows(lat.rows, cfg.parallel, |i| -> Result<Cell> {
        let x = lat.circle[i];
        let mut best = Cell::new(f64::NEG_INFINITY, lat.angle(i), 0.0);
        for (j, y) in lat.circle.iter().enumerate() {
            let v = f(&x, y);
            if !v.is_finite() {
                return Err(objective_error(v, &x, y));
            }
            if v > best.value {
                best = Cell::new(v, lat.angle(i), lat.angle(j));
            }
        }
        Ok(best)
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut evaluations = (lat.rows * lat.n) as u64 + 2 * SYMMETRY_PROBES as u64;

    let eval = |p: [f64; 3]| -> Result<f64> {
        let x = space.circle_point(p[0]);
        let y = space.circle_point(p[1]);
        let v = f(&x, &y);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(objective_error(v, &x, &y))
        }
    };
    let steps = [lat.h, lat.h, 0.0];
    let best = refine_starts(&eval, rows, steps, 2, true, cfg, &mut evaluations)?;

    let global = sample_slopes(|p| eval(p).unwrap_or(f64::NAN), steps, 2, cfg.seed);
    evaluations += (SLOPE_SAMPLES * 3) as u64;
    let shrink = cfg.shrink.powi(cfg.refine_rounds as i32);
    let (bound, lipschitz) = error_bound(best.cell.value, global, best.slopes, [lat.h * shrink, lat.h * shrink, 0.0]);

    let [t1, t2, _] = best.cell.pos;
    Ok(Estimate {
        value: best.cell.value,
        witness: witness(space, t1, t2)?,
        angles: Some([t1, t2]),
        scale: None,
        evaluations,
        error_bound: bound,
        lipschitz: Some(lipschitz),
        method: Method::Grid2d,
        trace: best.trace,
    })
}

fn refine_starts<E>(
    eval: &E,
    rows: Vec<Cell>,
    steps: [f64; 3],
    axes: usize,
    maximize: bool,
    cfg: &SearchConfig,
    evaluations: &mut u64,
) -> Result<Refined>
where
    E: Fn([f64; 3]) -> Result<f64>,
{
    let mut best: Option<Refined> = None;
    for start in top_cells(rows, REFINE_STARTS, maximize) {
        let r = refine(eval, start, steps, axes, maximize, cfg)?;
        *evaluations += r.evaluations;
        if best.as_ref().is_none_or(|b| r.cell.beats(&b.cell, maximize)) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one grid row"))
}

fn witness(space: &NormedSpace, t1: f64, t2: f64) -> Result<(VectorN, VectorN)> {
    Ok((space.sphere_point_2d(t1)?, space.sphere_point_2d(t2)?))
}

pub(super) fn maximize_scaled<F>(space: &NormedSpace, f: &F, cfg: &SearchConfig) -> Result<Estimate>
where
    F: Fn(&[f64], &[f64], f64) -> f64 + Sync,
{
    let symmetric = cfg.use_symmetry && even_symmetric(space, f, cfg.seed);
    let lat = Lattice::new(space, (cfg.coarse_grid / 4).max(8), symmetric);
    let ht = 1.0 / (RADIUS_GRID - 1) as f64;

    let rows = map_rows(lat.rows, cfg.parallel, |i| -> Result<Cell> {
        let x = lat.circle[i];
        let mut best = Cell { value: f64::NEG_INFINITY, pos: [lat.angle(i), 0.0, 0.0] };
        for (j, y) in lat.circle.iter().enumerate() {
            for k in 0..RADIUS_GRID {
                let t = k as f64 * ht;
                let v = f(&x, y, t);
                if !v.is_finite() {
                    return Err(objective_error(v, &x, &[t * y[0], t * y[1]]));
                }
                if v > best.value {
                    best = Cell { value: v, pos: [lat.angle(i), lat.angle(j), t] };
                }
            }
        }
        Ok(best)
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut evaluations = (lat.rows * lat.n * RADIUS_GRID) as u64 + 2 * SYMMETRY_PROBES as u64;

    let eval = |p: [f64; 3]| -> Result<f64> {
        let x = space.circle_point(p[0]);
        let y = space.circle_point(p[1]);
        let v = f(&x, &y, p[2]);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(objective_error(v, &x, &[p[2] * y[0], p[2] * y[1]]))
        }
    };
    let steps = [lat.h, lat.h, ht];
    let best = refine_starts(&eval, rows, steps, 3, true, cfg, &mut evaluations)?;
    let global = sample_slopes(|p| eval(p).unwrap_or(f64::NAN), steps, 3, cfg.seed);
    evaluations += (SLOPE_SAMPLES * 4) as u64;
    let shrink = cfg.shrink.powi(cfg.refine_rounds as i32);
    let (bound, lipschitz) =
        error_bound(best.cell.value, global, best.slopes, [lat.h * shrink, lat.h * shrink, ht * shrink]);

    let [t1, t2, t] = best.cell.pos;
    Ok(Estimate {
        value: best.cell.value,
        witness: witness(space, t1, t2)?,
        angles: Some([t1, t2]),
        scale: Some(t),
        evaluations,
        error_bound: bound,
        lipschitz: Some(lipschitz),
        method: Method::Grid2d,
        trace: best.trace,
    })
}

/// Angle in [a, b] on the feasible side of ‖x − y(θ)‖ = ε, given that the
/// gap changes sign between the endpoints.
fn boundary(space: &NormedSpace, x: &[f64; 2], eps: f64, mut a: f64, mut b: f64, gap_a: f64) -> f64 {
    let a_feasible = gap_a >= 0.0;
    for _ in 0..BISECTION_STEPS {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let y = space.circle_point(m);
        let gap = space.norm_combo(1.0, x, -1.0, &y) - eps;
        if (gap >= 0.0) == a_feasible {
            a = m;
        } else {
            b = m;
        }
    }
    if a_feasible {
        a
    } else {
        b
    }
}

pub(super) fn minimize_constrained<F>(space: &NormedSpace, f: &F, eps: f64, cfg: &SearchConfig) -> Result<Estimate>
where
    F: Fn(&[f64], &[f64]) -> f64 + Sync,
{
    // ‖x − y‖ is even, so only the objective needs checking
    let symmetric = cfg.use_symmetry && even_symmetric(space, |x, y, _| f(x, y), cfg.seed);
    let lat = Lattice::new(space, cfg.coarse_grid, symmetric);
    let checked = |x: &[f64; 2], y: &[f64; 2]| -> Result<f64> {
        let v = f(x, y);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(objective_error(v, x, y))
        }
    };

    let rows = map_rows(lat.rows, cfg.parallel, |i| -> Result<(Cell, u64)> {
        let x = lat.circle[i];
        let t1 = lat.angle(i);
        let mut evals = 0u64;
        let gaps: Vec<f64> = lat.circle.iter().map(|y| space.norm_combo(1.0, &x, -1.0, y) - eps).collect();
        evals += lat.n as u64;
        let mut best = Cell::new(f64::INFINITY, t1, f64::INFINITY);
        let mut consider = |v: f64, t2: f64| {
            let cand = Cell::new(v, t1, t2);
            if cand.beats_min(&best) {
                best = cand;
            }
        };
        for (j, y) in lat.circle.iter().enumerate() {
            if gaps[j] >= 0.0 {
                evals += 1;
                consider(checked(&x, y)?, lat.angle(j));
            }
        }
        for j in 0..lat.n {
            let next = (j + 1) % lat.n;
            if (gaps[j] >= 0.0) != (gaps[next] >= 0.0) {
                let t2 = boundary(space, &x, eps, lat.angle(j), lat.angle(j + 1), gaps[j]);
                evals += BISECTION_STEPS as u64 + 1;
                consider(checked(&x, &space.circle_point(t2))?, t2);
            }
        }
        // y = −x exactly: ‖x − y‖ = 2 ≥ ε without rounding in the angle
        evals += 1;
        consider(checked(&x, &neg(&x))?, t1 + PI);
        Ok((best, evals))
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut evaluations = 2 * SYMMETRY_PROBES as u64 + rows.iter().map(|r| r.1).sum::<u64>();
    let rows: Vec<Cell> = rows.into_iter().map(|r| r.0).filter(|c| c.value.is_finite()).collect();
    if rows.is_empty() {
        return Err(crate::error::Error::Infeasible { eps });
    }

    let mut best: Option<Refined> = None;
    for start in top_cells(rows, REFINE_STARTS, false) {
        let r = refine_constrained(space, &checked, eps, start, lat.h, cfg)?;
        evaluations += r.evaluations;
        if best.as_ref().is_none_or(|b| r.cell.beats_min(&b.cell)) {
            best = Some(r);
        }
    }
    let best = best.expect("nonempty start set");

    let steps = [lat.h, lat.h, 0.0];
    let global = sample_slopes(
        |p| f(&space.circle_point(p[0]), &space.circle_point(p[1])),
        steps,
        2,
        cfg.seed,
    );
    evaluations += (SLOPE_SAMPLES * 3) as u64;
    let shrink = cfg.shrink.powi(cfg.refine_rounds as i32);
    let (bound, lipschitz) = error_bound(best.cell.value, global, best.slopes, [lat.h * shrink, lat.h * shrink, 0.0]);
    // Where the constraint is tangent to the sphere (ε near 2) a rounded
    // feasibility test admits an angular band of width O(√EPS).
    let bound = bound + lipschitz * CONSTRAINT_BAND;

    let [t1, t2, _] = best.cell.pos;
    Ok(Estimate {
        value: best.cell.value,
        witness: witness(space, t1, t2)?,
        angles: Some([t1, t2]),
        scale: None,
        evaluations,
        error_bound: bound,
        lipschitz: Some(lipschitz),
        method: Method::Grid2d,
        trace: best.trace,
    })
}

fn refine_constrained<C>(
    space: &NormedSpace,
    checked: &C,
    eps: f64,
    start: Cell,
    h: f64,
    cfg: &SearchConfig,
) -> Result<Refined>
where
    C: Fn(&[f64; 2], &[f64; 2]) -> Result<f64>,
{
    let width = (2 * STENCIL + 1) as usize;
    let mut best = start;
    let mut trace = vec![start.value];
    let mut evaluations = 0u64;
    let mut s = h;
    let mut slopes = [0.0f64; 3];

    for round in 0..cfg.refine_rounds {
        s *= cfg.shrink;
        let center = best;
        let last = round + 1 == cfg.refine_rounds;
        let mut grid = vec![[0.0f64; 5]; width];
        for (ai, a) in (-STENCIL..=STENCIL).enumerate() {
            let t1 = center.pos[0] + a as f64 * s;
            let x = space.circle_point(t1);
            let mut prev: Option<(f64, f64)> = None;
            for (bi, b) in (-STENCIL..=STENCIL).enumerate() {
                let t2 = center.pos[1] + b as f64 * s;
                let y = space.circle_point(t2);
                let gap = space.norm_combo(1.0, &x, -1.0, &y) - eps;
                evaluations += 1;
                let feasible = gap >= 0.0;
                if feasible || last {
                    let v = if a == 0 && b == 0 { center.value } else { checked(&x, &y)? };
                    evaluations += 1;
                    grid[ai][bi] = v;
                    let cand = Cell::new(v, t1, t2);
                    if feasible && cand.beats_min(&best) {
                        best = cand;
                    }
                }
                if let Some((pt, pg)) = prev {
                    if (pg >= 0.0) != (gap >= 0.0) {
                        let tb = boundary(space, &x, eps, pt, t2, pg);
                        evaluations += BISECTION_STEPS as u64 + 1;
                        let cand = Cell::new(checked(&x, &space.circle_point(tb))?, t1, tb);
                        if cand.beats_min(&best) {
                            best = cand;
                        }
                    }
                }
                prev = Some((t2, gap));
            }
        }
        trace.push(best.value);
        if last {
            for a in 0..width {
                for b in 0..width {
                    if a + 1 < width {
                        slopes[0] = slopes[0].max((grid[a + 1][b] - grid[a][b]).abs() / s);
                    }
                    if b + 1 < width {
                        slopes[1] = slopes[1].max((grid[a][b + 1] - grid[a][b]).abs() / s);
                    }
                }
            }
        }
    }
    Ok(Refined { cell: best, evaluations, trace, slopes })
}
