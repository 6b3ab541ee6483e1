//! `ratsplit`: exceptional classes, parameterizations and splitting types of
//! rational plane curves through general points.
//!
//! Exit status is 0 on success, 1 when the computation reports an error (or
//! a check fails) and 2 on usage errors.

mod config;

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ratsplit::binform::ParamTriple;
use ratsplit::conjscan::{
    scan_record, search_conjecture_r, theorem35_spotcheck, type_seed, ScanRecord, ScanSummary, SEVEN_POINT_FAMILIES,
};
use ratsplit::fatpoints::FatScheme;
use ratsplit::lattice::{ascenzi_classify, enum_exceptional, DivClass, NumType};
use ratsplit::param::{parameterize, ParamOptions, Parameterization, PointSet, DEFAULT_RETRIES};
use ratsplit::splitting::{min_syzygy, split_all, splitting_moving_lines, splitting_saturation, Syzygy};
use ratsplit::{Error, DEFAULT_PRIME};

use config::{Config, Format};

#[derive(Parser, Debug)]
#[command(
    name = "ratsplit",
    version,
    about = "Splitting types of rational plane curves through general points"
)]
struct Cli {
    /// Prime modulus of the coefficient field.
    #[arg(long, global = true, env = "RATSPLIT_PRIME", default_value_t = DEFAULT_PRIME)]
    prime: u64,

    /// Seed for random points and random choices.
    #[arg(long, global = true, env = "RATSPLIT_SEED", default_value_t = 1)]
    seed: u64,

    /// Fresh point sets tried before giving up on a degenerate configuration.
    #[arg(long, global = true, default_value_t = DEFAULT_RETRIES)]
    max_retries: u32,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List exceptional types on r points, one per line.
    #[command(name = "exc-enum")]
    ExcEnum {
        #[arg(long = "r")]
        r: usize,
        /// Degree cap; required for r = 9.
        #[arg(long)]
        dmax: Option<i64>,
    },
    /// Numerical invariants of a class.
    Classify {
        /// "d,m1,...,mr"
        #[arg(long = "type", value_parser = parse_class)]
        class: DivClass,
    },
    /// Parameterize the curve of a class through random points.
    Param {
        #[arg(long = "type", value_parser = parse_class)]
        class: DivClass,
        /// Include every Cremona step.
        #[arg(long)]
        trace: bool,
    },
    /// Splitting type of the curve of a class.
    Split {
        #[arg(long = "type", value_parser = parse_class)]
        class: DivClass,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
    },
    /// Ideal dimensions and multiplication ranks of a fat point scheme.
    Fatpoints {
        #[arg(long, value_delimiter = ',', required = true)]
        mults: Vec<usize>,
        /// Inclusive degree range "a..b".
        #[arg(long, value_parser = parse_range)]
        k: RangeInclusive<usize>,
    },
    /// Split every exceptional type on nine points up to a degree.
    #[command(name = "scan-conj9")]
    ScanConj9 {
        #[arg(long, default_value_t = 61)]
        dmax: i64,
        /// Write records here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Keep records already in the output file.
        #[arg(long, requires = "output")]
        resume: bool,
    },
    /// Least A.E over classes A with -K.A = 2, h^1(A) = 0 and le(A) = 1.
    #[command(name = "search-conjR")]
    SearchConjR {
        #[arg(long = "type", value_parser = parse_class)]
        class: DivClass,
        /// Largest degree of A; defaults to the degree of E.
        #[arg(long)]
        da_max: Option<i64>,
    },
    /// Spot-check the seven-point table.
    #[command(name = "list7-check")]
    List7Check {
        #[arg(long = "d", value_delimiter = ',', default_value = "0,1,2")]
        ds: Vec<i64>,
        /// Only this family (index into the table).
        #[arg(long)]
        family: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    All,
    MovingLines,
    Saturation,
    Syzygy,
}

fn parse_class(s: &str) -> Result<DivClass, String> {
    DivClass::parse(s).map_err(|e| e.to_string())
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let lo: usize = a.trim().parse().map_err(|_| format!("bad lower bound {a:?}"))?;
    let hi: usize = b.trim().parse().map_err(|_| format!("bad upper bound {b:?}"))?;
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok(lo..=hi)
}

#[derive(Debug)]
enum Failure {
    Compute(Error),
    Io(io::Error),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match Config::new(cli.prime, cli.seed, cli.max_retries, cli.format) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let res = run(&cli.command, &cfg, &mut out).and_then(|()| out.flush().map_err(Failure::from));
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(f) => {
            let _ = out.flush();
            match f {
                Failure::Compute(e) => eprintln!("error: {e}"),
                Failure::Io(e) => eprintln!("error: {e}"),
                Failure::Check(msg) => eprintln!("check failed: {msg}"),
            }
            ExitCode::from(1)
        }
    }
}

fn run(cmd: &Command, cfg: &Config, out: &mut impl Write) -> Outcome {
    match cmd {
        Command::ExcEnum { r, dmax } => exc_enum(cfg, out, *r, *dmax),
        Command::Classify { class } => classify(cfg, out, class),
        Command::Param { class, trace } => param(cfg, out, class, *trace),
        Command::Split { class, method } => split(cfg, out, class, *method),
        Command::Fatpoints { mults, k } => fatpoints(cfg, out, mults, k.clone()),
        Command::ScanConj9 { dmax, output, resume } => scan(cfg, out, *dmax, output.as_deref(), *resume),
        Command::SearchConjR { class, da_max } => search(cfg, out, class, *da_max),
        Command::List7Check { ds, family } => list7(cfg, out, ds, *family),
    }
}

fn line(out: &mut impl Write, v: &Value) -> io::Result<()> {
    serde_json::to_writer(&mut *out, v)?;
    writeln!(out)
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>, sep: &str) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn type_text(t: &NumType) -> String {
    join(std::iter::once(t.degree()).chain(t.mults().iter().copied()), ",")
}

/// Key-value table for a single JSON object.
fn table(out: &mut impl Write, v: &Value) -> io::Result<()> {
    let Value::Object(map) = v else {
        return writeln!(out, "{v}");
    };
    let width = map.keys().map(|k| k.len()).max().unwrap_or(0);
    for (k, x) in map {
        let text = match x {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        writeln!(out, "{k:<width$}  {text}")?;
    }
    Ok(())
}

fn single(cfg: &Config, out: &mut impl Write, v: &Value) -> Outcome {
    match cfg.format {
        Format::Json => line(out, v)?,
        Format::Table => table(out, v)?,
    }
    Ok(())
}

fn exc_enum(cfg: &Config, out: &mut impl Write, r: usize, dmax: Option<i64>) -> Outcome {
    if let Some(d) = dmax {
        cfg.check_degree("dmax", d)?;
    }
    for t in enum_exceptional(r, dmax)? {
        match cfg.format {
            Format::Json => line(out, &serde_json::to_value(&t)?)?,
            Format::Table => writeln!(
                out,
                "{:>3} | {}",
                t.degree(),
                join(t.mults().iter().map(|m| format!("{m:>2}")), " ")
            )?,
        }
    }
    Ok(())
}

fn classify(cfg: &Config, out: &mut impl Write, class: &DivClass) -> Outcome {
    let (word, base) = class.reduce_to_base();
    let companion = class
        .unbalanced_companion()
        .ok()
        .map(|(a, c)| json!({ "a": a, "c_a": c }));
    let v = json!({
        "type": class,
        "r": class.r(),
        "self_intersection": class.self_intersection(),
        "k_dot": class.canonical_degree(),
        "exceptional": class.is_exceptional_class(),
        "smooth_rational": class.smooth_rational_numerics_ok(),
        "ascenzi": ascenzi_classify(&class.num_type()),
        "semi_adjoint": class.semi_adjoint(),
        "companion": companion,
        "word": word,
        "base": base,
    });
    single(cfg, out, &v)
}

fn parameterization(cfg: &Config, class: &DivClass, trace: bool) -> Result<Parameterization, Failure> {
    cfg.check_degree("degree", class.degree())?;
    let pts = PointSet::random(class.r(), cfg.seed, cfg.field)?;
    let opts = ParamOptions {
        max_retries: cfg.max_retries,
        trace,
    };
    Ok(parameterize(class, &pts, cfg.seed, &opts)?)
}

fn forms_text(phi: &ParamTriple) -> Vec<String> {
    phi.components().iter().map(|c| c.to_text()).collect()
}

fn param(cfg: &Config, out: &mut impl Write, class: &DivClass, trace: bool) -> Outcome {
    let p = parameterization(cfg, class, trace)?;
    let mut v = json!({
        "type": class,
        "seed": cfg.seed,
        "attempts": p.attempts,
        "points": p.points.points(),
        "word": p.word,
        "base": p.base,
        "degree": p.phi.degree(),
        "phi": p.phi.to_json(),
        "phi_text": forms_text(&p.phi),
    });
    if trace {
        v["steps"] = serde_json::to_value(&p.steps)?;
    }
    single(cfg, out, &v)
}

fn syzygy_json(s: &Syzygy) -> Value {
    json!({
        "degree": s.degree,
        "alpha": s.alpha.iter().map(|a| a.to_json()).collect::<Vec<_>>(),
        "alpha_text": s.alpha.iter().map(|a| a.to_text()).collect::<Vec<_>>(),
    })
}

fn split(cfg: &Config, out: &mut impl Write, class: &DivClass, method: Method) -> Outcome {
    let p = parameterization(cfg, class, false)?;
    let (st, sigma, syz) = match method {
        Method::All => {
            let (rep, syz) = split_all(&p.phi)?;
            ((rep.a, rep.b), Some(rep.sigma), Some(syz))
        }
        Method::MovingLines => {
            let st = splitting_moving_lines(&p.phi)?;
            ((st.a, st.b), None, None)
        }
        Method::Saturation => {
            let (st, sigma) = splitting_saturation(&p.phi)?;
            ((st.a, st.b), Some(sigma), None)
        }
        Method::Syzygy => {
            let syz = min_syzygy(&p.phi)?;
            let a = syz.degree;
            let d = p.phi.degree();
            ((a.min(d - a), a.max(d - a)), None, Some(syz))
        }
    };
    let method_name = method
        .to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string();
    let v = json!({
        "type": class,
        "seed": cfg.seed,
        "attempts": p.attempts,
        "method": method_name,
        "a": st.0,
        "b": st.1,
        "gap": st.1 - st.0,
        "sigma": sigma,
        "syzygy": syz.as_ref().map(syzygy_json),
    });
    single(cfg, out, &v)
}

fn fatpoints(cfg: &Config, out: &mut impl Write, mults: &[usize], ks: RangeInclusive<usize>) -> Outcome {
    cfg.check_degree("k", *ks.end() as i64 + 1)?;
    cfg.check_degree("sum of multiplicities", mults.iter().sum::<usize>() as i64 + 1)?;
    let pts = PointSet::random(mults.len(), cfg.seed, cfg.field)?;
    let z = FatScheme::new(&pts, mults.to_vec())?;
    let betti = z.betti_report(ks.clone())?;
    let mut rows = Vec::new();
    for (k, mu) in ks.zip(&betti.rows) {
        rows.push(json!({
            "k": k,
            "dim": z.ideal_dim(k)?,
            "mu": mu,
            "generators_next": mu.generators_next(),
        }));
    }
    let v = json!({
        "mults": mults,
        "seed": cfg.seed,
        "length": z.length(),
        "alpha": betti.alpha,
        "nu_alpha": betti.nu_alpha,
        "rows": rows,
    });
    match cfg.format {
        Format::Json => line(out, &v)?,
        Format::Table => {
            writeln!(
                out,
                "mults {}  seed {}  length {}  alpha {}  nu_alpha {}",
                join(mults, ","),
                cfg.seed,
                z.length(),
                betti.alpha,
                betti.nu_alpha
            )?;
            writeln!(
                out,
                "{:>4} {:>6} {:>6} {:>6} {:>6} {:>6}",
                "k", "dim", "dim+1", "rank", "ker", "coker"
            )?;
            for mu in &betti.rows {
                writeln!(
                    out,
                    "{:>4} {:>6} {:>6} {:>6} {:>6} {:>6}",
                    mu.k, mu.dim_k, mu.dim_k1, mu.rank, mu.kernel, mu.coker
                )?;
            }
        }
    }
    Ok(())
}

/// Records already present in a partial output file, keyed by type. Lines
/// that are not records (a summary, a torn final line) are dropped.
fn read_partial(path: &Path) -> io::Result<BTreeMap<NumType, ScanRecord>> {
    let mut done = BTreeMap::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(done),
        Err(e) => return Err(e),
    };
    for l in BufReader::new(file).lines() {
        if let Ok(rec) = serde_json::from_str::<ScanRecord>(&l?) {
            done.insert(rec.num_type.clone(), rec);
        }
    }
    Ok(done)
}

fn record_row(r: &ScanRecord) -> String {
    let opt = |x: Option<usize>| x.map_or("-".to_string(), |v| v.to_string());
    format!(
        "{:<34} {:>4} {:>4} {:>4} {:>4} {:>4}  {}",
        type_text(&r.num_type),
        if r.ascenzi { "A" } else { "" },
        if r.semi_adjoint.is_some() { "S" } else { "" },
        opt(r.a),
        opt(r.b),
        opt(r.gap),
        r.flag.as_deref().unwrap_or("")
    )
}

fn scan(cfg: &Config, out: &mut impl Write, dmax: i64, output: Option<&Path>, resume: bool) -> Outcome {
    cfg.check_degree("dmax", dmax)?;
    let types = enum_exceptional(9, Some(dmax))?;
    let mut done = match (resume, output) {
        (true, Some(path)) => read_partial(path)?,
        _ => BTreeMap::new(),
    };
    // stale records (another seed or field) are recomputed
    done.retain(|t, r| r.seed == type_seed(cfg.seed, t) && r.prime == cfg.field.modulus());

    let mut file = match output {
        Some(path) => Some(BufWriter::new(
            OpenOptions::new().create(true).write(true).truncate(true).open(path)?,
        )),
        None => None,
    };
    let mut summary = ScanSummary::default();
    for t in &types {
        let rec = match done.remove(t) {
            Some(r) => r,
            None => scan_record(t, cfg.seed, cfg.field),
        };
        summary.add(&rec);
        match (&mut file, cfg.format) {
            (Some(f), _) => {
                line(f, &serde_json::to_value(&rec)?)?;
                f.flush()?;
            }
            (None, Format::Json) => line(out, &serde_json::to_value(&rec)?)?,
            (None, Format::Table) => writeln!(out, "{}", record_row(&rec))?,
        }
    }
    let v = json!({ "summary": summary, "seed": cfg.seed, "dmax": dmax, "prime": cfg.field.modulus() });
    if let Some(f) = &mut file {
        line(f, &v)?;
        f.flush()?;
    }
    single(cfg, out, &v)
}

fn search(cfg: &Config, out: &mut impl Write, class: &DivClass, da_max: Option<i64>) -> Outcome {
    let da_max = da_max.unwrap_or(class.degree());
    cfg.check_degree("da_max", da_max + 1)?;
    let pts = PointSet::random(class.r(), cfg.seed, cfg.field)?;
    let outcome = search_conjecture_r(class, &pts, da_max)?;
    let opts = ParamOptions {
        max_retries: cfg.max_retries,
        trace: false,
    };
    // the split uses the same points as the search, so no retry is allowed
    // to swap them
    let a_e = parameterize(class, &pts, cfg.seed, &opts)
        .ok()
        .filter(|p| p.attempts == 1)
        .and_then(|p| split_all(&p.phi).ok())
        .map(|(rep, _)| rep.a);
    let holds = match (&outcome, a_e) {
        (Some(o), Some(a)) => Some(a as i64 <= o.min_a_dot_e),
        _ => None,
    };
    let v = json!({
        "type": class,
        "seed": cfg.seed,
        "da_max": da_max,
        "outcome": outcome,
        "a_e": a_e,
        "bound_holds": holds,
    });
    single(cfg, out, &v)
}

fn list7(cfg: &Config, out: &mut impl Write, ds: &[i64], family: Option<usize>) -> Outcome {
    let idxs: Vec<usize> = match family {
        Some(i) => vec![i],
        None => (0..SEVEN_POINT_FAMILIES.len()).collect(),
    };
    let mut rows = 0;
    let mut failed = Vec::new();
    for idx in idxs {
        for row in theorem35_spotcheck(idx, ds, cfg.seed, cfg.field)? {
            rows += 1;
            if !row.ok {
                failed.push(format!("family {} at d = {}", row.family, row.d));
            }
            match cfg.format {
                Format::Json => line(out, &serde_json::to_value(&row)?)?,
                Format::Table => {
                    let gap = row.split.map_or("-".into(), |s| s.gap().to_string());
                    let want = row.expected_gap.map_or("-".into(), |g| g.to_string());
                    writeln!(
                        out,
                        "{:>3} {:<14} d={:<3} {:<28} gap {:>3} want {:>3} {}",
                        row.family,
                        format!("{:?}", row.orbit),
                        row.d,
                        type_text(&row.class.num_type()),
                        gap,
                        want,
                        if row.ok { "ok" } else { "FAIL" }
                    )?;
                }
            }
        }
    }
    let v = json!({ "summary": { "rows": rows, "failed": failed.len() }, "seed": cfg.seed });
    single(cfg, out, &v)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failed.join("; ")))
    }
}
