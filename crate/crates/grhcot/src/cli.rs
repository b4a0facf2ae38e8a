//! Argument definitions and command dispatch.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use grhcot_core::cotsum::{c_exact, c_from_ratio, c_selection_rule, c_value, CValueCache, CotTables};
use grhcot_core::gram::{fit_log, gram_matrix, SweepRecord};
use grhcot_core::maass::{
    cauchy_riemann_residual, eval_u, psi_from_c_check, psi_mellin, psi_series, UpperHalfPoint,
};
use grhcot_core::qmf::{
    asymp_fit, continuity_probe, default_offsets, eval_c, eval_cs, eval_h_rational, eval_hs, h_regularized, t_reg,
    FitTarget, GroupElement, Lattice, Point, ProbeFunction,
};
use grhcot_core::{Discriminant, StepTable};
use num_complex::Complex64;
use num_rational::Ratio;
use serde_json::{json, Value};

use crate::cache_io;
use crate::config::{Format, Overrides, RunConfig};
use crate::error::{CliError, CliResult};
use crate::report;
use crate::sweep::{write_csv, SweepDriver, CSV_HEADER};

#[derive(Debug, Parser)]
#[command(name = "grhcot", version, about = "Cotangent sums, Gram sweeps and quantum modular functions for odd characters")]
pub struct Cli {
    /// Negative fundamental discriminant D (default -4)
    #[arg(short = 'D', long = "discriminant", global = true, allow_hyphen_values = true)]
    pub discriminant: Option<i64>,
    /// Relative tolerance (default 1e-12)
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Value cache file (default: $GRHCOT_CACHE)
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Output format, csv or json
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// Write the primary output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// INI file of key = value defaults
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print cache hit and miss counts to stderr
    #[arg(long, global = true)]
    pub stats: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate c_{m,n}
    Cmn {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        /// Also print the exact cotangent expression
        #[arg(long)]
        exact: bool,
    },
    /// Print the matrix (c_{m,n}) for 1 <= m, n <= N
    Matrix {
        #[arg(short = 'N', long = "size")]
        size: usize,
    },
    /// Gram sweep up to N, CSV rows plus a JSON summary
    Sweep {
        #[arg(long = "max-N")]
        max_n: usize,
        /// Fit window for R(N) ~ a log N + b
        #[arg(long = "fit-from")]
        fit_from: Option<usize>,
        #[arg(long = "fit-to")]
        fit_to: Option<usize>,
    },
    /// Fit R(N) ~ a log N + b on a sweep CSV
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
    },
    /// Evaluate H, C, H_s, C_s or the regularization T(x, eps)
    Eval {
        #[arg(long, value_enum)]
        function: Function,
        /// A rational like 3/4 or a decimal
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Continuity, asymptotic, cocycle and Maass reports
    Probe(ProbeArgs),
    /// Inspect or verify the value cache
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Function {
    #[value(name = "H")]
    H,
    #[value(name = "C")]
    C,
    #[value(name = "Hs")]
    Hs,
    #[value(name = "Cs")]
    Cs,
    #[value(name = "T")]
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProbeKind {
    Continuity,
    Asymp,
    Cocycle,
    Maass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    #[value(name = "H_at_1")]
    HAt1,
    #[value(name = "C_at_1")]
    CAt1,
    #[value(name = "C_at_inverse_integers")]
    CAtInverseIntegers,
    #[value(name = "H_at_alpha")]
    HAtAlpha,
    #[value(name = "C_at_alpha")]
    CAtAlpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MaassCheck {
    Invariance,
    Psi,
    Contour,
    PsiFromC,
    Holomorphy,
    All,
}

#[derive(Debug, clap::Args)]
pub struct ProbeArgs {
    #[arg(long, value_enum)]
    pub kind: ProbeKind,
    /// Function for continuity probes
    #[arg(long, value_enum, default_value = "C")]
    pub function: Function,
    /// Base points, comma separated rationals
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub x0: Vec<String>,
    /// Group element a,b,c,d
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub gamma: Vec<i64>,
    /// Smallest and largest offset denominator
    #[arg(long, default_value_t = 9)]
    pub offset_min: u64,
    #[arg(long, default_value_t = 4001)]
    pub offset_max: u64,
    #[arg(long, default_value_t = 12)]
    pub offsets: usize,
    /// Oscillation must shrink by this factor to count as decaying
    #[arg(long, default_value_t = 0.05)]
    pub decay_ratio: f64,
    #[arg(long, value_enum, default_value = "H_at_1")]
    pub target: Target,
    /// +1 or -1
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub side: i8,
    #[arg(long)]
    pub half_integer: bool,
    /// Base point a/c for H_at_alpha and C_at_alpha
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub residue: u64,
    #[arg(long, default_value_t = 40)]
    pub n_lo: u64,
    #[arg(long, default_value_t = 4000)]
    pub n_hi: u64,
    #[arg(long, default_value_t = 6)]
    pub terms: usize,
    #[arg(long, value_enum, default_value = "all")]
    pub check: MaassCheck,
}

#[derive(Debug, Subcommand)]
pub enum CacheAction {
    /// Entry counts per discriminant
    Stats,
    /// Recompute entries and report the largest deviation
    Verify {
        /// Check at most this many entries
        #[arg(long)]
        limit: Option<usize>,
    },
}

/// Where command output goes: `--out` if given, stdout otherwise.
struct Sink<'a> {
    out: Option<PathBuf>,
    stdout: &'a mut (dyn Write + Send),
    stderr: &'a mut (dyn Write + Send),
}

impl Sink<'_> {
    fn primary(&mut self, bytes: &[u8]) -> CliResult<()> {
        match &self.out {
            Some(path) => fs::write(path, bytes).map_err(|e| CliError::io(path, e)),
            None => self.stdout.write_all(bytes).map_err(|e| CliError::io("<stdout>", e)),
        }
    }

    fn json(&mut self, v: &Value) -> CliResult<()> {
        let mut s = serde_json::to_string_pretty(v).expect("serializable");
        s.push('\n');
        self.primary(s.as_bytes())
    }

    /// Secondary output: stdout when the primary went to a file, else stderr.
    fn secondary(&mut self, v: &Value) -> CliResult<()> {
        let mut s = serde_json::to_string_pretty(v).expect("serializable");
        s.push('\n');
        let w: &mut (dyn Write + Send) = if self.out.is_some() { self.stdout } else { self.stderr };
        w.write_all(s.as_bytes()).map_err(|e| CliError::io("<output>", e))
    }
}

fn parse_point(s: &str) -> CliResult<Point> {
    if let Ok(r) = Ratio::<i64>::from_str(s.trim()) {
        return Ok(Point::Rational(r));
    }
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(Point::Real)
        .ok_or_else(|| CliError::Usage(format!("cannot parse {s:?} as a rational or real number")))
}

fn parse_rational(s: &str) -> CliResult<Ratio<i64>> {
    match parse_point(s)? {
        Point::Rational(r) => Ok(r),
        Point::Real(_) => Err(CliError::Usage(format!("{s:?} must be an exact rational like 3/4"))),
    }
}

/// Runs a parsed command line, writing to the given streams.
pub fn run(cli: Cli, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> CliResult<()> {
    let env_cache = std::env::var_os("GRHCOT_CACHE").map(PathBuf::from);
    let cfg = RunConfig::resolve(
        cli.config.as_deref(),
        env_cache,
        Overrides {
            discriminant: cli.discriminant,
            rel_tol: cli.rel_tol,
            threads: cli.threads,
            cache: cli.cache.clone(),
            format: cli.format,
        },
    )?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut cache = match &cfg.cache {
        Some(p) => cache_io::load(p)?,
        None => CValueCache::new(),
    };
    let before = cache.len();
    let mut sink = Sink {
        out: cli.out.clone(),
        stdout,
        stderr,
    };
    pool.install(|| dispatch(&cli.command, &cfg, &mut cache, &mut sink))?;
    if let Some(p) = &cfg.cache {
        if cache.len() != before {
            cache_io::save(&cache, p)?;
        }
    }
    if cli.stats {
        let s = json!({"cache_hits": cache.hits(), "cache_misses": cache.misses(), "cache_entries": cache.len()});
        writeln!(sink.stderr, "{s}").map_err(|e| CliError::io("<stderr>", e))?;
    }
    Ok(())
}

fn dispatch(cmd: &Command, cfg: &RunConfig, cache: &mut CValueCache, sink: &mut Sink) -> CliResult<()> {
    match cmd {
        Command::Cmn { m, n, exact } => cmd_cmn(cfg, cache, sink, *m, *n, *exact),
        Command::Matrix { size } => cmd_matrix(cfg, sink, *size),
        Command::Sweep {
            max_n,
            fit_from,
            fit_to,
        } => cmd_sweep(cfg, cache, sink, *max_n, *fit_from, *fit_to),
        Command::Fit { input, from, to } => cmd_fit(cfg, sink, input, *from, *to),
        Command::Eval { function, x, s, eps } => cmd_eval(cfg, sink, *function, x, *s, *eps),
        Command::Probe(args) => cmd_probe(cfg, sink, args),
        Command::Cache { action } => cmd_cache(cfg, cache, sink, action),
    }
}

fn cmd_cmn(cfg: &RunConfig, cache: &mut CValueCache, sink: &mut Sink, m: u64, n: u64, exact: bool) -> CliResult<()> {
    let d = cfg.disc()?;
    let ctx = cfg.context()?;
    let step = StepTable::new(d);
    let mut tables = CotTables::new(step.period());
    let value = cache.c_value(&step, &mut tables, m, n, &ctx)?;
    let expression = if exact {
        let e = if d == Discriminant::MINUS_4 {
            c_selection_rule(m, n)?
        } else {
            c_exact(&StepTable::new(d), m, n)?
        };
        Some(e.to_string())
    } else {
        None
    };
    match cfg.format {
        Format::Csv => {
            let mut s = format!("m,n,D,value\n{m},{n},{},{value}\n", d.value());
            if let Some(e) = expression {
                s.push_str(&format!("# {e}\n"));
            }
            sink.primary(s.as_bytes())
        }
        Format::Json => sink.json(&report::with_config(
            cfg,
            "cmn",
            json!({"m": m, "n": n, "D": d.value(), "value": value, "expression": expression}),
        )),
    }
}

fn cmd_matrix(cfg: &RunConfig, sink: &mut Sink, size: usize) -> CliResult<()> {
    if size == 0 {
        return Err(CliError::Usage("matrix size must be at least 1".into()));
    }
    let d = cfg.disc()?;
    let g = gram_matrix(d, size, &cfg.context()?)?;
    match cfg.format {
        Format::Csv => {
            let mut s = String::new();
            for row in &g {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            sink.primary(s.as_bytes())
        }
        Format::Json => sink.json(&report::with_config(
            cfg,
            "matrix",
            json!({"D": d.value(), "N": size, "entries": g}),
        )),
    }
}

fn cmd_sweep(
    cfg: &RunConfig,
    cache: &mut CValueCache,
    sink: &mut Sink,
    max_n: usize,
    fit_from: Option<usize>,
    fit_to: Option<usize>,
) -> CliResult<()> {
    if max_n == 0 {
        return Err(CliError::Usage("--max-N must be at least 1".into()));
    }
    let d = cfg.disc()?;
    let ctx = cfg.context()?;
    let mut driver = SweepDriver::new(d);
    let result = driver.extend(max_n, cache, &ctx);
    let records = driver.records().to_vec();
    let mut csv = Vec::new();
    write_csv(&records, &mut csv).map_err(|e| CliError::io("<buffer>", e))?;
    sink.primary(&csv)?;
    // rows computed before a failure are still emitted
    result?;
    let (from, to) = match (fit_from, fit_to) {
        (Some(a), Some(b)) => (a, b),
        (a, b) => (a.unwrap_or((max_n / 8).max(2)), b.unwrap_or(max_n)),
    };
    let explicit = fit_from.is_some() || fit_to.is_some();
    let fit = if explicit || (from >= 2 && to >= from + 2 && to <= max_n) {
        Some(report::log_fit(&fit_log(&records, from, to)?, from, to))
    } else {
        None
    };
    let summary = json!({
        "D": d.value(),
        "max_N": max_n,
        "columns": CSV_HEADER.split(',').collect::<Vec<_>>(),
        "last": records.last().map(report::record),
        "fit": fit,
        "cache": {"hits": cache.hits(), "misses": cache.misses(), "entries": cache.len()},
    });
    sink.secondary(&report::with_config(cfg, "sweep", summary))
}

fn read_sweep_csv(path: &Path) -> CliResult<Vec<SweepRecord>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: e.to_string(),
    })?;
    let headers = rdr.headers().map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: 1,
        message: e.to_string(),
    })?;
    if headers.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: format!("expected header {CSV_HEADER}"),
        });
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let bad = |message: String| CliError::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let row = row.map_err(|e| bad(e.to_string()))?;
        let f = |k: usize| -> CliResult<f64> {
            row.get(k)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad(format!("bad value in column {}", k + 1)))
        };
        out.push(SweepRecord {
            n: row.get(0).and_then(|s| s.parse().ok()).ok_or_else(|| bad("bad N".into()))?,
            r: f(1)?,
            dist2: f(2)?,
            log_det_c: f(3)?,
        });
    }
    Ok(out)
}

fn cmd_fit(cfg: &RunConfig, sink: &mut Sink, input: &Path, from: usize, to: usize) -> CliResult<()> {
    let records = read_sweep_csv(input)?;
    let fit = fit_log(&records, from, to)?;
    sink.json(&report::with_config(cfg, "fit", report::log_fit(&fit, from, to)))
}

fn cmd_eval(cfg: &RunConfig, sink: &mut Sink, f: Function, x: &str, s: Option<f64>, eps: Option<f64>) -> CliResult<()> {
    let d = cfg.disc()?;
    let ctx = cfg.context()?;
    let step = StepTable::new(d);
    let pt = parse_point(x)?;
    let need_s = || s.ok_or_else(|| CliError::Usage("--s is required".into()));
    let (value, route) = match f {
        Function::H => match pt {
            Point::Rational(r) => (eval_h_rational(&step, r), "cotangent"),
            Point::Real(_) => return Err(CliError::Usage("H is evaluated at exact rationals only".into())),
        },
        Function::C => {
            let route = if matches!(pt, Point::Rational(_)) { "cotangent" } else { "quadrature" };
            (eval_c(&step, pt, &ctx)?, route)
        }
        Function::Hs => (eval_hs(&step, pt, need_s()?, &ctx)?, route_for(pt)),
        Function::Cs => (eval_cs(&step, pt, need_s()?, &ctx)?, route_for(pt)),
        Function::T => {
            let e = eps.ok_or_else(|| CliError::Usage("--eps is required".into()))?;
            (t_reg(&step, pt_f64(pt), e, &ctx)?, "arctan series")
        }
    };
    let regularized = match (f, eps) {
        (Function::T, Some(e)) => Some(h_regularized(&step, pt_f64(pt), e, &ctx)?),
        _ => None,
    };
    match cfg.format {
        Format::Csv => {
            let s = format!("function,x,value\n{f:?},{x},{value}\n");
            sink.primary(s.as_bytes())
        }
        Format::Json => sink.json(&report::with_config(
            cfg,
            "eval",
            json!({
                "function": format!("{f:?}"),
                "D": d.value(),
                "x": x,
                "s": s,
                "eps": eps,
                "value": value,
                "route": route,
                "h_regularized": regularized,
            }),
        )),
    }
}

fn route_for(p: Point) -> &'static str {
    match p {
        Point::Rational(_) => "periodic Hurwitz",
        Point::Real(_) => "truncated sum",
    }
}

fn pt_f64(p: Point) -> f64 {
    p.to_f64()
}

fn default_cocycle_points() -> Vec<Ratio<i64>> {
    [(1, 1), (1, 2), (2, 5), (3, 7), (5, 4)].iter().map(|&(a, b)| Ratio::new(a, b)).collect()
}

fn cmd_probe(cfg: &RunConfig, sink: &mut Sink, a: &ProbeArgs) -> CliResult<()> {
    let d = cfg.disc()?;
    let ctx = cfg.context()?;
    let step = StepTable::new(d);
    let points = a.x0.iter().map(|s| parse_rational(s)).collect::<CliResult<Vec<_>>>()?;
    let body = match a.kind {
        ProbeKind::Continuity | ProbeKind::Cocycle => {
            let (f, extra) = if a.kind == ProbeKind::Cocycle {
                let [ga, gb, gc, gd] = a.gamma[..] else {
                    return Err(CliError::Usage("--gamma a,b,c,d is required".into()));
                };
                let g = GroupElement::from_matrix(d, ga, gb, gc, gd)?;
                (
                    ProbeFunction::CGamma(g),
                    json!({"gamma": [ga, gb, gc, gd], "epsilon": g.epsilon}),
                )
            } else {
                let f = match a.function {
                    Function::H => ProbeFunction::H,
                    Function::C => ProbeFunction::C,
                    _ => return Err(CliError::Usage("continuity probes take --function H or C".into())),
                };
                (f, json!({"function": format!("{:?}", a.function)}))
            };
            let points = if points.is_empty() {
                if a.kind == ProbeKind::Cocycle {
                    default_cocycle_points()
                } else {
                    vec![Ratio::from_integer(1)]
                }
            } else {
                points
            };
            let reports = points
                .iter()
                .map(|x0| {
                    let offs = default_offsets(*x0.denom() as u64, a.offset_min, a.offset_max, a.offsets);
                    continuity_probe(&step, f, *x0, &offs).map(|r| report::probe(&r, a.decay_ratio))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut body = json!({"kind": format!("{:?}", a.kind).to_lowercase(), "D": d.value(), "reports": reports});
            if let (Value::Object(m), Value::Object(e)) = (&mut body, extra) {
                m.extend(e);
            }
            body
        }
        ProbeKind::Asymp => {
            let alpha = || -> CliResult<(i64, i64)> {
                let r = parse_rational(a.alpha.as_deref().unwrap_or("1"))?;
                Ok((*r.numer(), *r.denom()))
            };
            let target = match a.target {
                Target::HAt1 => FitTarget::HNearOne(if a.half_integer {
                    Lattice::HalfInteger
                } else {
                    Lattice::Integer
                }),
                Target::CAt1 => FitTarget::CNearOne,
                Target::CAtInverseIntegers => FitTarget::CInverse { residue: a.residue },
                Target::HAtAlpha => {
                    let (p, c) = alpha()?;
                    FitTarget::HNear { a: p, c }
                }
                Target::CAtAlpha => {
                    let (p, c) = alpha()?;
                    FitTarget::CNear { a: p, c }
                }
            };
            let fit = asymp_fit(&step, target, a.side, a.n_lo, a.n_hi, a.terms)?;
            let mut body = report::asymptotic_fit(&fit, a.n_lo, a.n_hi);
            body["kind"] = json!("asymp");
            body["D"] = json!(d.value());
            body
        }
        ProbeKind::Maass => maass_report(d, a.check, &ctx)?,
    };
    sink.json(&report::with_config(cfg, "probe", body))
}

fn maass_report(d: Discriminant, check: MaassCheck, ctx: &grhcot_core::PrecisionContext) -> CliResult<Value> {
    let want = |c: MaassCheck| check == c || check == MaassCheck::All;
    let mut out = serde_json::Map::new();
    out.insert("kind".into(), json!("maass"));
    out.insert("D".into(), json!(d.value()));
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let cj = |z: Complex64| json!([z.re, z.im]);
    if want(MaassCheck::Invariance) {
        // T^2 for D = -4, T^|D| for odd D, T^{|D|/2} otherwise
        let shift = if d.is_even() {
            d.modulus() as f64 / 2.0
        } else {
            d.modulus() as f64
        };
        let t_sign = if d.is_even() { -1.0 } else { 1.0 };
        let mut rows = Vec::new();
        let (mut worst_t, mut worst_s) = (0.0f64, 0.0f64);
        for x in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            for y in [0.4, 0.8, 1.2, 1.6, 2.0] {
                let z = UpperHalfPoint::new(x, y)?;
                let u = eval_u(d, z, ctx)?.value;
                let ut = eval_u(d, UpperHalfPoint::new(x + shift, y)?, ctx)?.value;
                let us = eval_u(d, UpperHalfPoint::from_complex(-1.0 / z.to_complex())?, ctx)?.value;
                let scale = u.abs().max(1.0);
                let rt = (ut - t_sign * u).abs() / scale;
                let rs = (us + u).abs() / scale;
                worst_t = worst_t.max(rt);
                worst_s = worst_s.max(rs);
                rows.push(json!({"x": x, "y": y, "u": u, "residual_T": rt, "residual_S": rs}));
            }
        }
        out.insert(
            "invariance".into(),
            json!({"shift": shift, "max_residual_T": worst_t, "max_residual_S": worst_s, "grid": rows}),
        );
    }
    if d == Discriminant::MINUS_4 {
        if want(MaassCheck::Psi) {
            let mut rows = Vec::new();
            let mut worst = 0.0f64;
            for y in [0.5, 1.0, 2.0] {
                for sgn in [1.0, -1.0] {
                    let z = c(0.0, sgn * y);
                    let a = psi_series(d, z, ctx)?.value;
                    let b = psi_mellin(d, z, 0.5, ctx)?.value;
                    worst = worst.max((a - b).norm());
                    rows.push(json!({"z": cj(z), "series": cj(a), "mellin": cj(b), "difference": (a - b).norm()}));
                }
            }
            out.insert("psi".into(), json!({"max_difference": worst, "points": rows}));
        }
        if want(MaassCheck::Contour) {
            let vals = [0.3, 0.5, 0.7]
                .iter()
                .map(|&cc| psi_mellin(d, c(1.0, 0.0), cc, ctx).map(|e| e.value))
                .collect::<Result<Vec<_>, _>>()?;
            let spread = vals.iter().map(|v| (v - vals[1]).norm()).fold(0.0, f64::max);
            out.insert(
                "contour".into(),
                json!({"z": [1.0, 0.0], "abscissae": [0.3, 0.5, 0.7], "values": vals.iter().map(|v| cj(*v)).collect::<Vec<_>>(), "spread": spread}),
            );
        }
        if want(MaassCheck::PsiFromC) {
            let a = psi_from_c_check(d, c(0.0, 1.0), 2048, ctx)?;
            let b = psi_from_c_check(d, c(1.0, 1.0), 2048, ctx)?;
            let rel = (a.ratio - b.ratio).norm() / a.ratio.norm();
            out.insert(
                "psi_from_c".into(),
                json!({"points": [{"z": [0.0, 1.0], "lhs": cj(a.lhs), "rhs": cj(a.rhs), "ratio": cj(a.ratio)},
                                  {"z": [1.0, 1.0], "lhs": cj(b.lhs), "rhs": cj(b.rhs), "ratio": cj(b.ratio)}],
                       "relative_spread": rel}),
            );
        }
        if want(MaassCheck::Holomorphy) {
            let r = cauchy_riemann_residual(d, c(1.0, 0.0), 1e-3, ctx)?;
            out.insert("holomorphy".into(), json!({"z": [1.0, 0.0], "step": 1e-3, "residual": r}));
        }
    } else if check != MaassCheck::Invariance && check != MaassCheck::All {
        return Err(grhcot_core::Error::Domain("this check is implemented for D = -4 only".into()).into());
    }
    Ok(Value::Object(out))
}

fn cmd_cache(cfg: &RunConfig, cache: &CValueCache, sink: &mut Sink, action: &CacheAction) -> CliResult<()> {
    let path = cfg.cache.as_ref().map(|p| p.display().to_string());
    let body = match action {
        CacheAction::Stats => {
            let mut per: std::collections::BTreeMap<i64, usize> = Default::default();
            for (k, _) in cache.iter() {
                *per.entry(k.d).or_default() += 1;
            }
            let per: Vec<Value> = per.into_iter().map(|(d, n)| json!({"D": d, "entries": n})).collect();
            json!({"path": path, "entries": cache.len(), "by_discriminant": per})
        }
        CacheAction::Verify { limit } => {
            let ctx = cfg.context()?;
            let mut worst = 0.0f64;
            let mut checked = 0usize;
            for (k, v) in cache.iter().take(limit.unwrap_or(usize::MAX)) {
                let d = Discriminant::new(k.d)?;
                let fresh = c_value(d, k.p, k.q, &ctx)?;
                let stored = c_from_ratio(*k, 1, *v);
                worst = worst.max(((fresh - stored) / fresh.abs().max(1.0)).abs());
                checked += 1;
            }
            json!({"path": path, "checked": checked, "max_relative_deviation": worst, "ok": worst <= cfg.rel_tol})
        }
    };
    sink.json(&report::with_config(cfg, "cache", body))
}
