//! Command-line front end. Exit codes: 0 success, 1 not conjugate or not in
//! the simple case, 2 malformed input or configuration, 3 internal failure.

use super::{gen_instance, run_experiment, ExperimentConfig};
use crate::error::{Error, Result};
use crate::liealg::ChevalleyBasis;
use crate::rational::parse_q;
use crate::reduce::{conjugate, Status};
use crate::rootsys::{builtin_order, search_order, verify_order, ReductionOrder, RootSystem, RootSystemKind};
use crate::unipotent::UnipotentCoords;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "conjforge", version, about = "Conjugators between unipotent elements of split Lie groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the positive roots of a root system as JSON.
    Roots { kind: RootSystemKind },
    /// Inspect reduction orders.
    Order {
        #[command(subcommand)]
        action: OrderAction,
    },
    /// Print c0², c1², S_Λ and root-vector norms as JSON.
    Constants { kind: RootSystemKind },
    /// Find a conjugator taking u to v.
    Conjugate {
        u: PathBuf,
        v: PathBuf,
        /// Use the searched order instead of the built-in one.
        #[arg(long)]
        search: bool,
    },
    /// Generate one instance as JSON.
    Instance(InstanceArgs),
    /// Run a batch of random conjugacy trials.
    Experiment(ExperimentArgs),
}

#[derive(Subcommand, Debug)]
pub enum OrderAction {
    Verify {
        kind: RootSystemKind,
        #[arg(long)]
        search: bool,
    },
    Show {
        kind: RootSystemKind,
        #[arg(long)]
        search: bool,
    },
}

#[derive(Args, Debug, Default)]
pub struct ConfigFlags {
    /// Either a full name such as `F4` or a family letter combined with --rank.
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub delta_min: Option<String>,
    #[arg(long)]
    pub coeff_bound: Option<String>,
    #[arg(long)]
    pub scramble_len: Option<usize>,
    #[arg(long)]
    pub diagonal_scramble: bool,
}

#[derive(Args, Debug)]
pub struct InstanceArgs {
    #[command(flatten)]
    pub flags: ConfigFlags,
    #[arg(long, default_value_t = 0)]
    pub trial: u64,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    /// JSON config; flags override its fields.
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub flags: ConfigFlags,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// Byte offset of a 1-based `(line, column)` position.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

/// Parses JSON, reporting syntax errors with their byte offset.
pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Malformed { offset: byte_offset(text, e.line(), e.column()), message: e.to_string() })
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    parse_json(&text).map_err(|e| match e {
        Error::Malformed { offset, message } => Error::Malformed { offset, message: format!("{}: {message}", path.display()) },
        other => other,
    })
}

fn parse_kind(kind: &str, rank: Option<usize>) -> Result<RootSystemKind> {
    match rank {
        Some(r) if kind.len() == 1 => format!("{kind}{r}").parse(),
        Some(r) => {
            let k: RootSystemKind = kind.parse()?;
            if k.rank != r {
                return Err(Error::Config(format!("--kind {kind} disagrees with --rank {r}")));
            }
            Ok(k)
        }
        None => kind.parse(),
    }
}

fn parse_rational(name: &str, s: &str) -> Result<crate::rational::Q> {
    parse_q(s).ok_or_else(|| Error::Config(format!("--{name}: not a rational: {s:?}")))
}

/// Applies flags on top of `base` (or defaults when there is no base).
pub fn build_config(base: Option<ExperimentConfig>, f: &ConfigFlags) -> Result<ExperimentConfig> {
    let mut cfg = match (base, &f.kind) {
        (Some(mut c), Some(k)) => {
            c.kind = parse_kind(k, f.rank)?;
            c
        }
        (Some(mut c), None) => {
            if let Some(r) = f.rank {
                c.kind = parse_kind(&c.kind.family.letter().to_string(), Some(r))?;
            }
            c
        }
        (None, Some(k)) => ExperimentConfig::new(parse_kind(k, f.rank)?),
        (None, None) => return Err(Error::Config("no config file and no --kind".into())),
    };
    if let Some(t) = f.trials {
        cfg.trials = t;
    }
    if let Some(s) = f.seed {
        cfg.seed = s;
    }
    if let Some(s) = &f.delta_min {
        cfg.delta_min = parse_rational("delta-min", s)?;
    }
    if let Some(s) = &f.coeff_bound {
        cfg.coeff_bound = parse_rational("coeff-bound", s)?;
    }
    if let Some(s) = f.scramble_len {
        cfg.scramble_len = s;
    }
    if f.diagonal_scramble {
        cfg.diagonal_scramble = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let v = read_json(path)?;
    serde_json::from_value(v).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn order_for(rs: &RootSystem, search: bool) -> Result<ReductionOrder> {
    if search {
        search_order(rs)
    } else {
        Ok(builtin_order(rs))
    }
}

fn print_json(out: &mut dyn Write, v: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).map_err(|e| Error::Internal(e.to_string()))?)?;
    Ok(())
}

/// Runs a parsed command, writing results to `out`; returns the exit code.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Roots { kind } => {
            let rs = RootSystem::new(kind);
            print_json(out, &rs.to_json())?;
        }
        Command::Order { action: OrderAction::Verify { kind, search } } => {
            let rs = RootSystem::new(kind);
            let order = order_for(&rs, search)?;
            let violations = verify_order(&rs, &order);
            for v in &violations {
                writeln!(out, "{v}")?;
            }
            writeln!(out, "{} positive roots, {} witnesses, {} violations", rs.len(), order.witnesses.len(), violations.len())?;
            if !violations.is_empty() {
                return Ok(1);
            }
        }
        Command::Order { action: OrderAction::Show { kind, search } } => {
            let rs = RootSystem::new(kind);
            print_json(out, &order_for(&rs, search)?.to_json())?;
        }
        Command::Constants { kind } => {
            let cb = ChevalleyBasis::shared(kind)?;
            let v = serde_json::to_value(cb.constants_report()).map_err(|e| Error::Internal(e.to_string()))?;
            print_json(out, &v)?;
        }
        Command::Conjugate { u, v, search } => {
            let uj = read_json(&u)?;
            let vj = read_json(&v)?;
            let kind = UnipotentCoords::kind_from_json(&uj)?;
            let cb = ChevalleyBasis::shared(kind)?;
            let uu = UnipotentCoords::from_json(&cb, &uj)?;
            let vv = UnipotentCoords::from_json(&cb, &vj)?;
            let order = order_for(cb.root_system(), search)?;
            let res = conjugate(&cb, &order, &uu, &vv)?;
            print_json(out, &res.to_json(&cb))?;
            return Ok(match res.status {
                Status::Conjugate if res.verified => 0,
                Status::Conjugate => 3,
                _ => 1,
            });
        }
        Command::Instance(args) => {
            let cfg = build_config(None, &args.flags)?;
            let cb = ChevalleyBasis::shared(cfg.kind)?;
            print_json(out, &gen_instance(&cfg, &cb, args.trial)?.to_json(&cb))?;
        }
        Command::Experiment(args) => {
            let base = args.config.as_deref().map(load_config).transpose()?;
            let cfg = build_config(base, &args.flags)?;
            let report = run_experiment(&cfg)?;
            let mut sink: Box<dyn Write> = match &args.out {
                Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
                None => Box::new(&mut *out),
            };
            match args.format {
                Format::Json => print_json(&mut *sink, &report.to_json())?,
                Format::Csv => report.write_csv(&mut *sink)?,
            }
            sink.flush()?;
        }
    }
    Ok(0)
}

/// Exit code for an error that escaped `execute`.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotConjugate(_) | Error::NotSimpleCase => 1,
        Error::Internal(_) | Error::JacobiFailure { .. } | Error::OrderSearchExhausted { .. } => 3,
        _ => 2,
    }
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli, &mut lock) {
        Ok(code) => code,
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            match &e {
                Error::Malformed { offset, message } => eprintln!("error: malformed JSON at byte {offset}: {message}"),
                other => eprintln!("error: {other}"),
            }
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_count_bytes() {
        let text = "{\n  \"a\": 1,\n  \"b\" 2\n}";
        match parse_json(text) {
            Err(Error::Malformed { offset, .. }) => assert_eq!(&text[offset..offset + 1], "2"),
            other => panic!("{other:?}"),
        }
        assert_eq!(byte_offset("ab\ncd", 2, 2), 4);
    }

    #[test]
    fn flags_override_config() {
        let base = ExperimentConfig::new("B3".parse().unwrap());
        let f = ConfigFlags { rank: Some(4), trials: Some(7), delta_min: Some("1/2".into()), ..Default::default() };
        let c = build_config(Some(base), &f).unwrap();
        assert_eq!(c.kind.to_string(), "B4");
        assert_eq!(c.trials, 7);
        assert_eq!(c.delta_min, crate::rational::qf(1, 2));
        let f = ConfigFlags { kind: Some("F".into()), rank: Some(4), ..Default::default() };
        assert_eq!(build_config(None, &f).unwrap().kind.to_string(), "F4");
        let f = ConfigFlags { kind: Some("A3".into()), rank: Some(4), ..Default::default() };
        assert!(build_config(None, &f).is_err());
        assert!(build_config(None, &ConfigFlags::default()).is_err());
    }
}
