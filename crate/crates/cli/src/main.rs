use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lorentz_gm::fourier::{self, DEFAULT_GRID, L1_TOL};
use lorentz_gm::gm::{gm_constant_step, gms1_constant, gms2_constant, gms_constant, GmReport, GmVariant, Witness};
use lorentz_gm::interpolate::{
    gilbert_bracket, gilbert_functional, gms_decomposition, interpolation_norm, k_functional, log_grid,
    DECOMPOSITION_BOUND,
};
use lorentz_gm::json::{read_fn, read_seq, FnJson};
use lorentz_gm::norms::{
    equivalence_report, lorentz_norm_seq, lorentz_norm_step, weighted_norm_seq, weighted_norm_step,
};
use lorentz_gm::rearrange::{rearrange_seq, rearrange_step};
use lorentz_gm::report::{fmt_num, VerificationReport};
use lorentz_gm::suite::{self, CRITERIA, HARDY_ENVELOPE_SEED};
use lorentz_gm::{hardy, ComplexSeq, Exponent, Sector, PQ};
use serde_json::json;

const EXIT_MALFORMED: u8 = 1;
const EXIT_FAILED: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;

/// Numerical checks for rearrangements, Lorentz norms, general monotonicity,
/// K-functionals, trigonometric partial sums and the Hardy operator.
///
/// Quadrature depth is capped by the LORENTZ_GM_MAX_DEPTH environment variable.
#[derive(Parser)]
#[command(name = "lorentz-gm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Decreasing rearrangement of a sequence or step function.
    Rearrange,
    /// Weighted and Lorentz norms; for a step function also the dyadic forms
    /// and the constant-explicit equivalence checks.
    Norm,
    /// General-monotonicity constants with witnesses.
    Gm,
    /// K-functional of the couple (l¹_{1/k}, l¹) at --t or over --t-grid.
    Kfun,
    /// Interpolation norm and the Gilbert functional at --theta, --q.
    Interp,
    /// Sector decomposition c = b + d over --t or --t-grid.
    Decompose,
    /// Partial-sum, L¹ and weak-L¹ bounds for the series Σ c_k e^{ikx}.
    Fourier,
    /// Hardy operator bound for a headed step function at --alpha, --q.
    Hardy,
    /// Runs the acceptance suite and prints one line per criterion.
    Verify {
        /// `all` or a criterion number.
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Args)]
struct Opts {
    /// Sequence JSON: {"re": [..], "im": [..]}.
    #[arg(long, global = true)]
    seq: Option<PathBuf>,
    /// Step function JSON: {"breakpoints": [..], "re": [..], "im": [..], "head": {"c": .., "gamma": ..}}.
    #[arg(long = "fn", global = true)]
    function: Option<PathBuf>,
    #[arg(long, global = true, default_value = "2")]
    p: String,
    #[arg(long, global = true, default_value = "2")]
    q: String,
    /// Hardy exponent, or the sector direction for `decompose`.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Sector half-opening for `decompose`.
    #[arg(long, global = true, default_value_t = 0.0)]
    phi: f64,
    #[arg(long, global = true)]
    t: Option<f64>,
    /// Logarithmic grid `lo:hi:count`.
    #[arg(long = "t-grid", global = true)]
    t_grid: Option<String>,
    #[arg(long, global = true, default_value_t = 0.5)]
    theta: f64,
    /// Quadrature tolerance.
    #[arg(long, global = true, default_value_t = L1_TOL)]
    tol: f64,
    /// Sampling grid for the weak-L¹ estimate.
    #[arg(long, global = true, default_value_t = DEFAULT_GRID)]
    grid: usize,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; `.json` writes JSON, anything else CSV.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

/// Rows plus an optional richer JSON form.
struct Table {
    command: &'static str,
    seed: Option<u64>,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    json: Option<serde_json::Value>,
    failed: bool,
}

impl Table {
    fn new(command: &'static str, header: &[&'static str]) -> Self {
        Table { command, seed: None, header: header.to_vec(), rows: Vec::new(), json: None, failed: false }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn report(&mut self, r: &VerificationReport) {
        self.failed |= !r.pass;
        self.push(r.csv_record().to_vec());
    }

    fn csv(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        match self.seed {
            Some(s) => writeln!(buf, "# command={} seed={s}", self.command)?,
            None => writeln!(buf, "# command={}", self.command)?,
        }
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        drop(w);
        Ok(buf)
    }

    fn to_json(&self) -> serde_json::Value {
        if let Some(j) = &self.json {
            return j.clone();
        }
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let m: serde_json::Map<String, serde_json::Value> =
                    self.header.iter().zip(r).map(|(h, v)| (h.to_string(), json!(v))).collect();
                serde_json::Value::Object(m)
            })
            .collect();
        json!({ "command": self.command, "seed": self.seed, "rows": rows })
    }

    /// Writes to `out`, or CSV to stdout when there is no `out`.
    fn emit(&self, out: Option<&Path>) -> Result<()> {
        match out {
            Some(path) if path.extension().is_some_and(|e| e == "json") => {
                let text = serde_json::to_string_pretty(&self.to_json())?;
                std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
            }
            Some(path) => std::fs::write(path, self.csv()?).with_context(|| format!("writing {}", path.display())),
            None => Ok(std::io::stdout().write_all(&self.csv()?)?),
        }
    }
}

impl Opts {
    fn seq(&self) -> Result<ComplexSeq> {
        let path = self.seq.as_deref().ok_or_else(|| anyhow!("--seq is required"))?;
        Ok(read_seq(path)?)
    }

    fn function(&self) -> Result<FnJson> {
        let path = self.function.as_deref().ok_or_else(|| anyhow!("--fn is required"))?;
        Ok(read_fn(path)?)
    }

    fn pq(&self) -> Result<PQ> {
        Ok(PQ::new(Exponent::parse(&self.p)?, Exponent::parse(&self.q)?))
    }

    fn ts(&self) -> Result<Vec<f64>> {
        match (&self.t_grid, self.t) {
            (Some(g), _) => parse_grid(g),
            (None, Some(t)) => Ok(vec![t]),
            (None, None) => bail!("--t or --t-grid is required"),
        }
    }
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        bail!("--t-grid must be lo:hi:count, got '{s}'");
    };
    let lo: f64 = lo.parse().with_context(|| format!("bad grid start '{lo}'"))?;
    let hi: f64 = hi.parse().with_context(|| format!("bad grid end '{hi}'"))?;
    let count: usize = count.parse().with_context(|| format!("bad grid count '{count}'"))?;
    if !(lo > 0.0 && hi >= lo && hi.is_finite() && count > 0) {
        bail!("--t-grid needs 0 < lo <= hi and count > 0");
    }
    Ok(log_grid(lo, hi, count))
}

fn witness_text(w: Option<Witness>) -> String {
    match w {
        None => String::new(),
        Some(Witness::Index(n)) => format!("n={n}"),
        Some(Witness::Pair(n, k)) => format!("n={n} k={k}"),
        Some(Witness::Point { x, right_limit }) => format!("x={}{}", fmt_num(x), if right_limit { "+" } else { "" }),
        Some(Witness::Interval { x, x_right, m, m_right }) => format!(
            "[{}{}, {}{}]",
            fmt_num(x),
            if x_right { "+" } else { "" },
            fmt_num(m),
            if m_right { "+" } else { "" }
        ),
    }
}

fn gm_rows(t: &mut Table, reports: &[GmReport]) {
    for r in reports {
        t.push(vec![format!("{:?}", r.class), fmt_num(r.constant), witness_text(r.witness)]);
    }
    t.json = Some(json!({ "command": t.command, "constants": reports }));
}

fn rearrange(o: &Opts) -> Result<Table> {
    if o.seq.is_some() {
        let mut t = Table::new("rearrange", &["n", "value"]);
        for (i, v) in rearrange_seq(&o.seq()?).into_iter().enumerate() {
            t.push(vec![(i + 1).to_string(), fmt_num(v)]);
        }
        return Ok(t);
    }
    let f = o.function()?.to_step()?;
    let fs = rearrange_step(&f);
    let mut t = Table::new("rearrange", &["start", "end", "value"]);
    let mut start = 0.0;
    for (&end, &v) in fs.breakpoints().iter().zip(fs.values()) {
        t.push(vec![fmt_num(start), fmt_num(end), fmt_num(v)]);
        start = end;
    }
    Ok(t)
}

fn norm(o: &Opts) -> Result<Table> {
    let pq = o.pq()?;
    let mut t = Table::new("norm", &["quantity", "value"]);
    if o.seq.is_some() {
        let c = o.seq()?;
        t.push(vec!["weighted".into(), fmt_num(weighted_norm_seq(&c, pq))]);
        if pq.is_lorentz_admissible() {
            t.push(vec!["lorentz".into(), fmt_num(lorentz_norm_seq(&c, pq)?)]);
        }
        return Ok(t);
    }
    let fj = o.function()?;
    let f = fj.to_headed()?;
    t.push(vec!["weighted".into(), fmt_num(weighted_norm_step(&f, pq)?)]);
    if fj.head.is_some() || !pq.is_lorentz_admissible() {
        return Ok(t);
    }
    let plain = fj.to_step()?;
    t.push(vec!["lorentz".into(), fmt_num(lorentz_norm_step(&plain, pq)?)]);
    let b = gm_constant_step(&f, GmVariant::Gm1).constant;
    if b.is_finite() {
        let eq = equivalence_report(&plain, pq, b)?;
        t.push(vec!["dyadic".into(), fmt_num(eq.dyadic)]);
        t.push(vec!["dyadic_rearranged".into(), fmt_num(eq.dyadic_rearranged)]);
        t.push(vec!["gm1_constant".into(), fmt_num(b)]);
        for r in &eq.checks {
            t.failed |= !r.pass;
            t.push(vec![
                format!("{} (ratio {} <= {})", r.name, fmt_num(r.ratio), fmt_num(r.constant)),
                r.pass.to_string(),
            ]);
        }
    }
    Ok(t)
}

fn gm(o: &Opts) -> Result<Table> {
    let mut t = Table::new("gm", &["class", "constant", "witness"]);
    if o.seq.is_some() {
        let c = o.seq()?;
        gm_rows(&mut t, &[gms_constant(&c), gms1_constant(&c), gms2_constant(&c)]);
    } else {
        let f = o.function()?.to_headed()?;
        let reports: Vec<GmReport> =
            [GmVariant::Gm, GmVariant::Gm1, GmVariant::Gm2].into_iter().map(|v| gm_constant_step(&f, v)).collect();
        gm_rows(&mut t, &reports);
    }
    Ok(t)
}

fn kfun(o: &Opts) -> Result<Table> {
    let c = o.seq()?;
    let mut t = Table::new("kfun", &["t", "k"]);
    for x in o.ts()? {
        if !(x > 0.0 && x.is_finite()) {
            bail!("t must be positive, got {x}");
        }
        t.push(vec![fmt_num(x), fmt_num(k_functional(&c, x))]);
    }
    Ok(t)
}

fn interp(o: &Opts) -> Result<Table> {
    let c = o.seq()?;
    let q = Exponent::parse(&o.q)?;
    let theta = o.theta;
    let mut t = Table::new("interp", &["quantity", "value"]);
    t.push(vec!["interpolation_norm".into(), fmt_num(interpolation_norm(&c, theta, q)?)]);
    if let Exponent::Finite(qv) = q {
        let g = gilbert_functional(&c, theta, q)?;
        let w = weighted_norm_seq(&c, PQ::new(Exponent::finite(1.0 / theta)?, q));
        let b = gms1_constant(&c).constant;
        t.push(vec!["gilbert_functional".into(), fmt_num(g)]);
        t.push(vec!["weighted_norm".into(), fmt_num(w)]);
        t.push(vec!["gms1_constant".into(), fmt_num(b)]);
        if b.is_finite() && w > 0.0 {
            let (lo, hi) = gilbert_bracket(theta, qv, b);
            let r = g / w;
            t.failed |= !(lo <= r * (1.0 + 1e-12) && r <= hi * (1.0 + 1e-12));
            t.push(vec!["ratio".into(), fmt_num(r)]);
            t.push(vec!["bracket_lo".into(), fmt_num(lo)]);
            t.push(vec!["bracket_hi".into(), fmt_num(hi)]);
        }
    }
    Ok(t)
}

fn decompose(o: &Opts) -> Result<Table> {
    let c = o.seq()?;
    let sector = Sector::with_default_tol(o.alpha.unwrap_or(0.0), o.phi)?;
    let mut t = Table::new("decompose", &["t", "cost", "K", "ratio"]);
    let mut all = Vec::new();
    for x in o.ts()? {
        let d = gms_decomposition(&c, x, &sector)?;
        t.failed |= d.ratio.is_nan() || d.ratio > DECOMPOSITION_BOUND;
        t.push(vec![fmt_num(d.t), fmt_num(d.cost), fmt_num(d.k_value), fmt_num(d.ratio)]);
        all.push(d);
    }
    t.json = Some(json!({ "command": "decompose", "decompositions": all }));
    Ok(t)
}

fn fourier_cmd(o: &Opts) -> Result<Table> {
    let c = o.seq()?;
    let n = c.len();
    let mut t = Table::new("fourier", &VerificationReport::CSV_HEADER);
    if n == 0 {
        return Ok(t);
    }
    let xs = fourier::x_grid(2000);
    t.report(&fourier::dirichlet_bound_report(&c, 1, n, &xs));
    t.report(&fourier::gm2_partial_report(&c, 1, n, &xs));
    t.report(&fourier::l1_bound_report(&c, o.tol)?);
    t.report(&fourier::weak_l1_report(&c, o.grid)?);
    Ok(t)
}

fn hardy_cmd(o: &Opts) -> Result<Table> {
    let f = o.function()?.to_headed()?;
    let alpha = o.alpha.ok_or_else(|| anyhow!("--alpha is required"))?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        bail!("--alpha must be positive, got {alpha}");
    }
    let q = Exponent::parse(&o.q)?;
    let seed = o.seed.unwrap_or(HARDY_ENVELOPE_SEED);
    let envelope = hardy::hardy_envelope(&suite::hardy_family(seed), alpha, q, 2.0)?;
    let mut t = Table::new("hardy", &VerificationReport::CSV_HEADER);
    t.seed = Some(seed);
    t.report(&hardy::hardy_report(&f, alpha, q, envelope)?);
    Ok(t)
}

fn verify(o: &Opts, which: &str) -> Result<Table> {
    let seed = o.seed.unwrap_or(42);
    let results = if which == "all" {
        suite::run_all(seed)
    } else {
        let id: u32 = which.parse().with_context(|| format!("--suite must be 'all' or 1..={CRITERIA}"))?;
        vec![suite::run_one(id, seed).ok_or_else(|| anyhow!("no criterion {id}; expected 1..={CRITERIA}"))?]
    };
    let mut t = Table::new("verify", &["id", "title", "pass", "checks", "violations", "worst", "seconds", "budget"]);
    t.seed = Some(seed);
    for r in &results {
        println!("{}", r.line());
        t.failed |= !(r.pass() && r.within_budget());
        t.push(vec![
            r.id.to_string(),
            r.title.to_string(),
            (r.pass() && r.within_budget()).to_string(),
            r.checks.to_string(),
            r.violations.to_string(),
            fmt_num(r.worst),
            format!("{:.3}", r.elapsed.as_secs_f64()),
            r.budget.as_secs().to_string(),
        ]);
    }
    let passed = results.iter().filter(|r| r.pass() && r.within_budget()).count();
    println!("{passed}/{} criteria passed (seed {seed})", results.len());
    Ok(t)
}

fn run(cli: &Cli) -> Result<bool> {
    let o = &cli.opts;
    let table = match &cli.command {
        Command::Rearrange => rearrange(o)?,
        Command::Norm => norm(o)?,
        Command::Gm => gm(o)?,
        Command::Kfun => {
            let t = kfun(o)?;
            if o.t_grid.is_none() && o.out.is_none() {
                println!("{}", t.rows[0][1]);
                return Ok(true);
            }
            t
        }
        Command::Interp => interp(o)?,
        Command::Decompose => decompose(o)?,
        Command::Fourier => fourier_cmd(o)?,
        Command::Hardy => hardy_cmd(o)?,
        Command::Verify { suite } => {
            let t = verify(o, suite)?;
            if let Some(path) = &o.out {
                t.emit(Some(path))?;
            }
            return Ok(!t.failed);
        }
    };
    table.emit(o.out.as_deref())?;
    Ok(!table.failed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(EXIT_FAILED)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<lorentz_gm::Error>() {
                Some(lorentz_gm::Error::NonConvergence { .. }) => ExitCode::from(EXIT_NONCONVERGENCE),
                _ => ExitCode::from(EXIT_MALFORMED),
            }
        }
    }
}
