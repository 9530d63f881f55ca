//! Command implementations. Each returns the process exit code.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use banach_core::constants::{estimate, evaluate_at};
use banach_core::search::Method;
use banach_core::theorems::verify;
use banach_core::{
    ConstantId, Error, Estimate, NormedSpace, ParamPair, Params, SearchConfig, TheoremId, TheoremReport, Verification,
};
use serde::Serialize;

use crate::args::{Cli, Command, Common, Format, ParamArgs};
use crate::cache::Cache;
use crate::emit::{fmt_f64, to_json, write_csv, CsvRow};
use crate::record::{config_digest, sha256_hex, Operation, Outcome, RunKey, RunRecord};

pub mod exit {
    pub const OK: i32 = 0;
    /// Violated, not certified or not uniformly non-square.
    pub const NEGATIVE: i32 = 1;
    pub const USAGE: i32 = 2;
    /// The search failed or missed its target tolerance.
    pub const SEARCH: i32 = 3;
    pub const OUTPUT: i32 = 4;
    pub const UNDECIDED: i32 = 5;
}

/// Relative disagreement allowed between a witness recheck and the value.
pub const RECHECK_TOL: f64 = 1e-9;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: exit::USAGE, message: message.into() }
    }

    fn output(path: &Path, e: impl std::fmt::Display) -> Self {
        Self { code: exit::OUTPUT, message: format!("cannot write {}: {e}", path.display()) }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Objective { .. } | Error::DegenerateInput(_) => exit::SEARCH,
            _ => exit::USAGE,
        };
        Self { code, message: e.to_string() }
    }
}

type Res<T> = std::result::Result<T, Failure>;

pub fn run(cli: Cli) -> Res<i32> {
    match cli.command {
        Command::Compute { common, constant, params } => compute(&common, &constant, &params),
        Command::Sweep { common, constant, kappa, tau, eps, step } => {
            sweep(&common, &constant, [kappa.as_deref(), tau.as_deref(), eps.as_deref()], step)
        }
        Command::Verify { common, theorem, params } => verify_cmd(&common, &theorem, &params),
        Command::Witness { common, constant, params } => witness(&common, &constant, &params),
    }
}

enum Sink {
    Stdout,
    File(PathBuf, File),
}

impl Sink {
    fn open(path: Option<&Path>) -> Res<Self> {
        match path {
            None => Ok(Sink::Stdout),
            Some(p) => File::create(p).map(|f| Sink::File(p.to_path_buf(), f)).map_err(|e| Failure::output(p, e)),
        }
    }

    fn write(&mut self, text: &str) -> Res<()> {
        match self {
            Sink::Stdout => {
                let mut out = io::stdout().lock();
                out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::output(Path::new("<stdout>"), e))
            }
            Sink::File(p, f) => f.write_all(text.as_bytes()).and_then(|_| f.sync_data()).map_err(|e| Failure::output(p, e)),
        }
    }
}

struct Session {
    space: NormedSpace,
    space_digest: Option<String>,
    cfg: SearchConfig,
    digest: String,
    cache: Option<Cache>,
    sink: Sink,
    format: Format,
}

impl Session {
    fn open(common: &Common, default_format: Format) -> Res<Self> {
        let space = NormedSpace::from_id(&common.space)?;
        let space_digest = match space.id().strip_prefix("poly:") {
            Some(path) => Some(sha256_hex(&fs::read(path).map_err(|e| Failure::usage(format!("{path}: {e}")))?)),
            None => None,
        };
        let cfg = load_config(common)?;
        let cache = if common.no_cache {
            None
        } else {
            Cache::from_env().map_err(|e| log::warn!("cache disabled: {e}")).ok()
        };
        let sink = Sink::open(common.out.as_deref())?;
        Ok(Self {
            space,
            space_digest,
            digest: config_digest(&cfg),
            cfg,
            cache,
            sink,
            format: common.format.unwrap_or(default_format),
        })
    }

    fn key(&self, operation: Operation, params: Params) -> RunKey {
        RunKey {
            space_id: self.space.id().to_string(),
            space_digest: self.space_digest.clone(),
            operation,
            params,
            config_digest: self.digest.clone(),
        }
    }

    /// Cached record for the key, or a fresh one from `work`.
    fn obtain(&self, key: RunKey, work: impl FnOnce() -> banach_core::Result<Outcome>) -> Res<RunRecord> {
        if let Some(cache) = &self.cache {
            match cache.lookup(&key) {
                Ok(Some(hit)) => {
                    log::info!("cache hit in {}", cache.path().display());
                    return Ok(hit);
                }
                Ok(None) => {}
                Err(e) => log::warn!("cannot read {}: {e}", cache.path().display()),
            }
        }
        let record = key.into_record(self.cfg.clone(), work()?);
        if let Some(cache) = &self.cache {
            if let Err(e) = cache.append(&record) {
                log::warn!("cannot append to {}: {e}", cache.path().display());
            }
        }
        Ok(record)
    }

    fn compute(&self, id: ConstantId, params: Params) -> Res<RunRecord> {
        self.obtain(self.key(Operation::Compute(id), params), || {
            estimate(&self.space, id, &params, &self.cfg).map(Outcome::Estimate)
        })
    }

    /// 3 if a certified search missed the target tolerance.
    fn status(&self, e: &Estimate) -> i32 {
        if e.method == Method::Grid2d && !(e.error_bound <= self.cfg.target_tol) {
            log::warn!("error bound {:e} exceeds target {:e}", e.error_bound, self.cfg.target_tol);
            exit::SEARCH
        } else {
            exit::OK
        }
    }
}

fn load_config(common: &Common) -> Res<SearchConfig> {
    let mut cfg = match &common.config {
        None => SearchConfig::default(),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            let parsed = if path.extension().is_some_and(|x| x == "json") {
                serde_json::from_str(&text).map_err(|e| e.to_string())
            } else {
                toml::from_str(&text).map_err(|e| e.to_string())
            };
            parsed.map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?
        }
    };
    if let Some(g) = common.grid {
        cfg.coarse_grid = g;
    }
    if let Some(t) = common.tol {
        cfg.target_tol = t;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    cfg.parallel = !common.sequential;
    cfg.validate()?;
    Ok(cfg)
}

fn build_params(name: &str, takes_pair: bool, takes_eps: bool, p: &ParamArgs) -> Res<Params> {
    let mut params = Params::none();
    if takes_pair {
        match (p.kappa, p.tau) {
            (Some(k), Some(t)) => params.pair = Some(ParamPair::new(k, t)?),
            _ => return Err(Failure::usage(format!("{name} needs --kappa and --tau"))),
        }
    } else if p.kappa.is_some() || p.tau.is_some() {
        log::warn!("{name} takes no kappa/tau; ignoring them");
    }
    if takes_eps {
        params.eps = Some(p.eps.ok_or_else(|| Failure::usage(format!("{name} needs --eps")))?);
    } else if p.eps.is_some() {
        log::warn!("{name} takes no eps; ignoring it");
    }
    Ok(params)
}

fn describe(params: &Params) -> String {
    let mut parts = Vec::new();
    if let Some(pp) = params.pair {
        parts.push(format!("kappa = {}, tau = {}", pp.kappa(), pp.tau()));
    }
    if let Some(e) = params.eps {
        parts.push(format!("eps = {e}"));
    }
    if parts.is_empty() {
        String::new()
    } else {
        format!(" ({})", parts.join(", "))
    }
}

fn plus_minus(e: &Estimate) -> String {
    if e.error_bound.is_finite() {
        format!("{:.5} ± {:.1e}", e.value, e.error_bound)
    } else {
        format!("{:.5} (lower bound)", e.value)
    }
}

fn vector(v: &[f64]) -> String {
    let cells: Vec<_> = v.iter().map(|c| format!("{c:.10}")).collect();
    format!("({})", cells.join(", "))
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = to_json(value).expect("records serialize");
    s.push('\n');
    s
}

fn csv_text(rows: &[CsvRow]) -> Res<String> {
    write_csv(rows).map_err(|e| Failure { code: exit::OUTPUT, message: e.to_string() })
}

fn row(params: &Params, e: &Estimate) -> CsvRow {
    CsvRow::new(params.pair.map(|p| p.kappa()), params.pair.map(|p| p.tau()), params.eps, e)
}

fn estimate_table(rec: &RunRecord, e: &Estimate) -> String {
    let mut s = String::new();
    let (x, y) = &e.witness;
    let _ = writeln!(s, "space        {}", rec.space_id);
    let _ = writeln!(s, "constant     {}{}", rec.constant.expect("compute record"), describe(&rec.params));
    let _ = writeln!(s, "value        {}", plus_minus(e));
    let _ = writeln!(s, "witness x    {}", vector(x.coords()));
    let _ = writeln!(s, "witness y    {}", vector(y.coords()));
    if let Some(t) = e.scale {
        let _ = writeln!(s, "scale t      {t:.10}");
    }
    let _ = writeln!(s, "evaluations  {}", e.evaluations);
    let _ = writeln!(s, "method       {}", serde_json::to_value(e.method).expect("method serializes").as_str().unwrap_or(""));
    s
}

fn compute(common: &Common, constant: &str, p: &ParamArgs) -> Res<i32> {
    let id: ConstantId = constant.parse()?;
    let params = build_params(id.as_str(), id.takes_pair(), id.takes_eps(), p)?;
    let mut session = Session::open(common, Format::Table)?;
    let rec = session.compute(id, params)?;
    let e = rec.estimate().expect("compute record");
    let text = match session.format {
        Format::Table => estimate_table(&rec, e),
        Format::Csv => csv_text(&[row(&params, e)])?,
        Format::Json => json_line(&rec),
    };
    session.sink.write(&text)?;
    Ok(session.status(e))
}

/// Points of `a` or the inclusive range `a:b` spaced by `step`.
pub fn parse_range(name: &str, raw: &str, step: f64) -> Res<Vec<f64>> {
    let num = |s: &str| -> Res<f64> {
        s.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| Failure::usage(format!("--{name}: `{s}` is not a number")))
    };
    let (a, b) = match raw.split_once(':') {
        Some((a, b)) => (num(a)?, num(b)?),
        None => {
            let a = num(raw)?;
            (a, a)
        }
    };
    if a > b {
        return Err(Failure::usage(format!("--{name}: empty range {raw}")));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Failure::usage(format!("--step must be > 0, got {step}")));
    }
    // tolerate b − a landing a hair under a multiple of step
    let n = ((b - a) / step * (1.0 + 1e-12) + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| a + i as f64 * step).collect())
}

fn axis(name: &str, raw: Option<&str>, step: f64, needed: bool, constant: ConstantId) -> Res<Vec<Option<f64>>> {
    match (needed, raw) {
        (true, Some(r)) => Ok(parse_range(name, r, step)?.into_iter().map(Some).collect()),
        (true, None) => Err(Failure::usage(format!("{constant} needs --{name}"))),
        (false, r) => {
            if r.is_some() {
                log::warn!("{constant} takes no {name}; ignoring it");
            }
            Ok(vec![None])
        }
    }
}

fn sweep(common: &Common, constant: &str, ranges: [Option<&str>; 3], step: f64) -> Res<i32> {
    let id: ConstantId = constant.parse()?;
    let kappas = axis("kappa", ranges[0], step, id.takes_pair(), id)?;
    let taus = axis("tau", ranges[1], step, id.takes_pair(), id)?;
    let epss = axis("eps", ranges[2], step, id.takes_eps(), id)?;
    let mut grid = Vec::new();
    for &k in &kappas {
        for &t in &taus {
            for &eps in &epss {
                let pair = match (k, t) {
                    (Some(k), Some(t)) => Some(ParamPair::new(k, t)?),
                    _ => None,
                };
                grid.push(Params { pair, eps });
            }
        }
    }
    let mut session = Session::open(common, Format::Csv)?;
    let mut records = Vec::with_capacity(grid.len());
    let mut code = exit::OK;
    for params in grid {
        let rec = session.compute(id, params)?;
        code = code.max(session.status(rec.estimate().expect("compute record")));
        records.push(rec);
    }
    let text = match session.format {
        Format::Csv => csv_text(&records.iter().map(|r| row(&r.params, r.estimate().expect("compute"))).collect::<Vec<_>>())?,
        Format::Json => records.iter().map(json_line).collect(),
        Format::Table => {
            let mut s = format!("{:>8} {:>8} {:>8}  {}\n", "kappa", "tau", "eps", "value");
            for r in &records {
                let cell = |v: Option<f64>| v.map(|v| format!("{v:>8.4}")).unwrap_or_else(|| format!("{:>8}", "-"));
                let _ = writeln!(
                    s,
                    "{} {} {}  {}",
                    cell(r.params.pair.map(|p| p.kappa())),
                    cell(r.params.pair.map(|p| p.tau())),
                    cell(r.params.eps),
                    plus_minus(r.estimate().expect("compute"))
                );
            }
            s
        }
    };
    session.sink.write(&text)?;
    Ok(code)
}

fn report_table(r: &TheoremReport) -> String {
    let mut s = String::new();
    let opt = |v: Option<f64>| v.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into());
    let _ = writeln!(s, "theorem   {}{}", r.theorem_id, describe(&r.params));
    let _ = writeln!(s, "space     {}", r.space_id);
    let _ = writeln!(s, "verdict   {}", r.verdict);
    let _ = writeln!(s, "lhs <= mid <= rhs   {} <= {} <= {}", opt(r.lhs), opt(r.mid), opt(r.rhs));
    let _ = writeln!(s, "margin    {:.3e} (tol {:.1e})", r.margin, r.tol);
    for c in &r.checks {
        let kind = if c.hard { "" } else { "  [expected]" };
        let _ = writeln!(s, "  {:<28} {:.6} {} {:.6}  slack {:+.3e}{kind}", c.name, c.lhs, if c.strict { "<" } else { "<=" }, c.rhs, c.slack);
    }
    if let Some(c) = &r.caveat {
        let _ = writeln!(s, "caveat    {c}");
    }
    for n in &r.notes {
        let _ = writeln!(s, "note      {n}");
    }
    s
}

fn verification_table(v: &Verification) -> String {
    match v {
        Verification::Report(r) => report_table(r),
        Verification::Classification(c) => {
            let mut s = String::new();
            let _ = writeln!(s, "theorem   {}", c.theorem_id);
            let _ = writeln!(s, "space     {}", c.space_id);
            let _ = writeln!(s, "verdict   {}", c.verdict);
            let _ = writeln!(s, "T  = {:.6} ± {:.1e} vs 2  → {}", c.t_value, c.t_error_bound, c.t_verdict);
            let _ = writeln!(s, "T2{} = {:.6} ± {:.1e} vs kappa + tau  → {}", describe(&c.t2_params), c.t2_value, c.t2_error_bound, c.t2_verdict);
            let _ = writeln!(s, "criteria agree: {}", c.agree);
            s
        }
    }
}

fn verify_cmd(common: &Common, theorem: &str, p: &ParamArgs) -> Res<i32> {
    let id: TheoremId = theorem.parse()?;
    let params = build_params(id.as_str(), id.takes_pair(), id.takes_eps(), p)?;
    if common.format == Some(Format::Csv) {
        return Err(Failure::usage("verify reports are emitted as json or table"));
    }
    let mut session = Session::open(common, Format::Json)?;
    let rec = session.obtain(session.key(Operation::Verify(id), params), || {
        verify(&session.space, id, &params, &session.cfg).map(Outcome::Verification)
    })?;
    let v = rec.verification().expect("verify record");
    let text = match session.format {
        Format::Table => verification_table(v),
        _ => json_line(&rec),
    };
    session.sink.write(&text)?;
    Ok(v.verdict().exit_code())
}

#[derive(Serialize)]
struct WitnessDump<'a> {
    record: &'a RunRecord,
    norm_x: f64,
    norm_y: f64,
    recheck: f64,
}

fn witness(common: &Common, constant: &str, p: &ParamArgs) -> Res<i32> {
    let id: ConstantId = constant.parse()?;
    let params = build_params(id.as_str(), id.takes_pair(), id.takes_eps(), p)?;
    let mut session = Session::open(common, Format::Table)?;
    let rec = session.compute(id, params)?;
    let e = rec.estimate().expect("compute record");
    let (x, y) = (e.witness.0.coords(), e.witness.1.coords());
    let recheck = evaluate_at(&session.space, id, &params, x, y, e.scale.unwrap_or(1.0))?;
    let (norm_x, norm_y) = (session.space.norm(x)?, session.space.norm(y)?);
    let text = match session.format {
        Format::Table => {
            let mut s = estimate_table(&rec, e);
            let _ = writeln!(s, "norms        |x| = {norm_x:.12}, |y| = {norm_y:.12}");
            let _ = writeln!(s, "recheck      {}", fmt_f64(recheck));
            s
        }
        Format::Csv => csv_text(&[row(&params, e)])?,
        Format::Json => json_line(&WitnessDump { record: &rec, norm_x, norm_y, recheck }),
    };
    session.sink.write(&text)?;
    if (recheck - e.value).abs() > RECHECK_TOL * e.value.abs().max(1.0) {
        log::warn!("recheck {recheck} disagrees with value {}", e.value);
        return Ok(exit::SEARCH);
    }
    Ok(session.status(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("k", "1:3", 0.5).unwrap(), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        assert_eq!(parse_range("k", "0:2", 0.25).unwrap().len(), 9);
        assert_eq!(parse_range("k", "0.5:2", 0.25).unwrap().last(), Some(&2.0));
        assert_eq!(parse_range("k", "2", 0.25).unwrap(), vec![2.0]);
        assert_eq!(parse_range("k", "0:0.3", 0.1).unwrap().len(), 4);
        assert_eq!(parse_range("k", "3:1", 0.5).unwrap_err().code, exit::USAGE);
        assert_eq!(parse_range("k", "1:3", 0.0).unwrap_err().code, exit::USAGE);
        assert_eq!(parse_range("k", "x", 0.5).unwrap_err().code, exit::USAGE);
    }
}
