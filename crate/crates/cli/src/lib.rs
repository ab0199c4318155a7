//! Command-line front end for `sigphi`.
//!
//! Every subcommand writes a table to stdout (CSV by default, JSON with
//! `--json`) and a one-line JSON run manifest to stderr. Exit codes: 0 on
//! success, 1 for usage errors, 2 for capacity or domain errors, 3 for
//! integrity errors.

pub mod output;

use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use sigphi::audit::{self, AuditParams};
use sigphi::smoothness::{self, Counter};
use sigphi::{parametric, EquationSpec, Error, Verdict};

use output::{Cell, Table};

#[derive(Debug, Parser)]
#[command(
    name = "sigphi",
    version,
    about = "Search and classify solutions of sigma/phi equations on linear forms"
)]
pub struct Cli {
    /// Emit a JSON array instead of CSV.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads (defaults to one per core). Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

/// f(a1*n + b1) = f(a2*n + b2)
#[derive(Debug, Clone, Args)]
pub struct EquationArgs {
    /// sigma or phi
    #[arg(long = "fn", value_name = "sigma|phi")]
    pub func: String,
    #[arg(long, allow_negative_numbers = true)]
    pub a1: i64,
    #[arg(long, allow_negative_numbers = true)]
    pub b1: i64,
    #[arg(long, allow_negative_numbers = true)]
    pub a2: i64,
    #[arg(long, allow_negative_numbers = true)]
    pub b2: i64,
}

impl EquationArgs {
    fn spec(&self) -> sigphi::Result<EquationSpec> {
        EquationSpec::new(self.func.parse()?, self.a1, self.b1, self.a2, self.b2)
    }

    fn params(&self) -> serde_json::Map<String, Value> {
        let v =
            json!({"fn": self.func, "a1": self.a1, "b1": self.b1, "a2": self.a2, "b2": self.b2});
        match v {
            Value::Object(m) => m,
            _ => unreachable!(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All solutions n <= max.
    Search {
        #[command(flatten)]
        eq: EquationArgs,
        #[arg(long)]
        max: u64,
        /// Label each solution parametric or sporadic.
        #[arg(long)]
        classify: bool,
    },
    /// Parametric families with max(k1, k2) <= kmax.
    Families {
        #[command(flatten)]
        eq: EquationArgs,
        #[arg(long)]
        kmax: u64,
    },
    /// Solutions generated by the family (k1, k2) for l = 1..=lmax.
    Generate {
        #[command(flatten)]
        eq: EquationArgs,
        #[arg(long)]
        k1: u64,
        #[arg(long)]
        k2: u64,
        #[arg(long)]
        lmax: u64,
    },
    /// Parametric or sporadic verdict for one solution.
    Classify {
        #[command(flatten)]
        eq: EquationArgs,
        #[arg(long)]
        n: u64,
    },
    /// Smooth-number counters.
    Smooth {
        #[arg(long, value_name = "psi|s|phi|sigma")]
        which: String,
        #[arg(long)]
        x: u64,
        #[arg(long)]
        y: u64,
        /// Add the leading-order bound and count/bound ratio.
        #[arg(long)]
        bounds: bool,
    },
    /// Bucket assignment for every sporadic solution n <= max.
    Audit {
        #[command(flatten)]
        eq: EquationArgs,
        #[arg(long)]
        max: u64,
        /// Override the smoothness threshold y.
        #[arg(long)]
        y: Option<f64>,
        /// Override z (defaults to sqrt(y) when only y is given).
        #[arg(long)]
        z: Option<f64>,
    },
    /// m <= max with m | sigma(m) and (m+1) | sigma(m+1).
    Multiperfect {
        #[arg(long)]
        max: u64,
    },
    /// Audit parameters and the leading-order main bound at x.
    Bounds {
        #[arg(long)]
        x: u64,
    },
    /// n = j((j+k)r/g + 1) with phi(n) = phi(n+k), if the construction applies.
    Ghp {
        #[arg(long)]
        j: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        r: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Search { .. } => "search",
            Command::Families { .. } => "families",
            Command::Generate { .. } => "generate",
            Command::Classify { .. } => "classify",
            Command::Smooth { .. } => "smooth",
            Command::Audit { .. } => "audit",
            Command::Multiperfect { .. } => "multiperfect",
            Command::Bounds { .. } => "bounds",
            Command::Ghp { .. } => "ghp",
        }
    }

    fn params(&self) -> Value {
        let mut m = serde_json::Map::new();
        let mut put = |k: &str, v: Value| {
            m.insert(k.to_owned(), v);
        };
        match self {
            Command::Search { eq, max, classify } => {
                eq.params().into_iter().for_each(|(k, v)| put(&k, v));
                put("max", json!(max));
                put("classify", json!(classify));
            }
            Command::Families { eq, kmax } => {
                eq.params().into_iter().for_each(|(k, v)| put(&k, v));
                put("kmax", json!(kmax));
            }
            Command::Generate { eq, k1, k2, lmax } => {
                eq.params().into_iter().for_each(|(k, v)| put(&k, v));
                put("k1", json!(k1));
                put("k2", json!(k2));
                put("lmax", json!(lmax));
            }
            Command::Classify { eq, n } => {
                eq.params().into_iter().for_each(|(k, v)| put(&k, v));
                put("n", json!(n));
            }
            Command::Smooth {
                which,
                x,
                y,
                bounds,
            } => {
                put("which", json!(which));
                put("x", json!(x));
                put("y", json!(y));
                put("bounds", json!(bounds));
            }
            Command::Audit { eq, max, y, z } => {
                eq.params().into_iter().for_each(|(k, v)| put(&k, v));
                put("max", json!(max));
                put("y", json!(y));
                put("z", json!(z));
            }
            Command::Multiperfect { max } => put("max", json!(max)),
            Command::Bounds { x } => put("x", json!(x)),
            Command::Ghp { j, k, r } => {
                put("j", json!(j));
                put("k", json!(k));
                put("r", json!(r));
            }
        }
        Value::Object(m)
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Usage(_) => 1,
        Error::Capacity(_) | Error::Domain(_) => 2,
        Error::Integrity(_) => 3,
    }
}

fn execute(command: &Command) -> sigphi::Result<Table> {
    match command {
        Command::Search { eq, max, classify } => {
            let spec = eq.spec()?;
            if *max == 0 {
                return Err(Error::Usage("--max must be positive".into()));
            }
            let records = if *classify {
                sigphi::search_classified(&spec, *max)?
            } else {
                sigphi::search(&spec, *max)?
            };
            let mut t = Table::new(&["n", "A1", "A2", "value", "class"]);
            for r in records {
                t.push(vec![
                    r.n.into(),
                    r.arg1.into(),
                    r.arg2.into(),
                    r.value.into(),
                    r.classification.name().into(),
                ]);
            }
            Ok(t)
        }
        Command::Families { eq, kmax } => {
            let spec = eq.spec()?;
            if *kmax < 2 {
                return Err(Error::Usage("--kmax must be at least 2".into()));
            }
            let mut t = Table::new(&["k1", "k2", "m1", "m2"]);
            for f in sigphi::enumerate_families(&spec, *kmax) {
                t.push(vec![f.k1.into(), f.k2.into(), f.m1.into(), f.m2.into()]);
            }
            Ok(t)
        }
        Command::Generate { eq, k1, k2, lmax } => {
            let spec = eq.spec()?;
            if k1 == k2 || *k1 == 0 || *k2 == 0 {
                return Err(Error::Usage(
                    "--k1 and --k2 must be distinct and positive".into(),
                ));
            }
            if sigphi::arith::gcd(*k1, *k2) != 1 {
                return Err(Error::Usage("--k1 and --k2 must be coprime".into()));
            }
            let family = sigphi::derive_family(&spec, *k1, *k2).ok_or_else(|| {
                Error::Usage(format!("no family for (k1, k2) = ({k1}, {k2}) on {spec}"))
            })?;
            let mut t = Table::new(&["l", "q1", "q2", "n", "verified"]);
            for w in sigphi::generate(&family, *lmax)? {
                t.push(vec![
                    w.l.into(),
                    w.q1.into(),
                    w.q2.into(),
                    w.n.into(),
                    sigphi::verify_witness(&w).into(),
                ]);
            }
            Ok(t)
        }
        Command::Classify { eq, n } => {
            let spec = eq.spec()?;
            let mut t = Table::new(&["n", "verdict", "l", "q1", "q2", "m1", "m2", "k1", "k2"]);
            let row = match sigphi::classify(&spec, *n)? {
                Verdict::Parametric(w) => vec![
                    (*n).into(),
                    "parametric".into(),
                    w.l.into(),
                    w.q1.into(),
                    w.q2.into(),
                    w.family.m1.into(),
                    w.family.m2.into(),
                    w.family.k1.into(),
                    w.family.k2.into(),
                ],
                Verdict::Sporadic => {
                    let mut row = vec![(*n).into(), "sporadic".into()];
                    row.resize(9, Cell::Empty);
                    row
                }
            };
            t.push(row);
            Ok(t)
        }
        Command::Smooth {
            which,
            x,
            y,
            bounds,
        } => {
            let counter: Counter = which.parse()?;
            let r = smoothness::report(counter, *x, *y, *bounds)?;
            let mut t = Table::new(&["x", "y", "count", "bound", "ratio"]);
            t.push(vec![
                r.x.into(),
                r.y.into(),
                r.count.into(),
                r.bound_value.into(),
                r.ratio().into(),
            ]);
            Ok(t)
        }
        Command::Audit { eq, max, y, z } => {
            let spec = eq.spec()?;
            let params = match (y, z) {
                (None, None) => audit::default_params(*max)?,
                (Some(y), None) => AuditParams::with_overrides(*max, *y, y.sqrt())?,
                (None, Some(z)) => AuditParams::with_overrides(*max, z * z, *z)?,
                (Some(y), Some(z)) => AuditParams::with_overrides(*max, *y, *z)?,
            };
            let mut t = Table::new(&["n", "bucket", "p", "m1", "k1", "m2", "k2", "overridden"]);
            for row in audit::audit(&spec, &params)? {
                let d = row.verdict.decomposition;
                t.push(vec![
                    row.n.into(),
                    row.verdict.bucket.to_string().into(),
                    d.map(|d| d.p).into(),
                    d.map(|d| d.m1).into(),
                    d.map(|d| d.k1).into(),
                    d.map(|d| d.m2).into(),
                    d.map(|d| d.k2).into(),
                    params.overridden.into(),
                ]);
            }
            Ok(t)
        }
        Command::Multiperfect { max } => {
            let mut t = Table::new(&["m"]);
            for m in parametric::consecutive_multiperfect_search(*max)? {
                t.push(vec![m.into()]);
            }
            Ok(t)
        }
        Command::Bounds { x } => {
            let params = audit::default_params(*x)?;
            let main = smoothness::bound_main(*x as f64)?;
            let mut t = Table::new(&["y", "z", "u", "bound_main"]);
            t.push(vec![
                params.y.into(),
                params.z.into(),
                params.u.into(),
                main.into(),
            ]);
            Ok(t)
        }
        Command::Ghp { j, k, r } => {
            let n = parametric::ghp_generate(*j, *k, *r)?;
            let mut t = Table::new(&["j", "k", "r", "n"]);
            t.push(vec![(*j).into(), (*k).into(), (*r).into(), n.into()]);
            Ok(t)
        }
    }
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let start = Instant::now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            let _ = writeln!(err, "error: --threads must be positive");
            return 1;
        }
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker threads: {e}");
            return 2;
        }
    };
    let table = match pool.install(|| execute(&cli.command)) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let written = if cli.json {
        table.write_json(out)
    } else {
        table.write_csv(out)
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: writing output: {e}");
        return 2;
    }
    let manifest = json!({
        "command": cli.command.name(),
        "params": cli.command.params(),
        "version": env!("CARGO_PKG_VERSION"),
        "elapsed_ms": start.elapsed().as_millis() as u64,
        "rows": table.rows.len(),
    });
    let _ = writeln!(err, "{manifest}");
    0
}
