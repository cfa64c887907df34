//! The `qss` command-line interface.
//!
//! Exit statuses: 0 on pass / feasible, 1 on audit failure / infeasible
//! structure, 2 on usage, parameter or parse errors.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::access::{canonical_catalog, enumerate_all_structures, parse_structure, AccessError, AccessStructure};
use crate::schemes::{
    build_general, build_otp, build_t3, build_t4, build_twin, default_twin_field, in_region, parse_tuple, region_of,
    RegionFamily, Scheme, SchemeError,
};
use crate::verify::audit;

#[derive(Debug, Parser)]
#[command(name = "qss", version, about = "Hybrid classical/quantum secret sharing toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check whether an access-structure file is realisable.
    Feasible {
        /// Access-structure file.
        #[arg(value_name = "FILE", required_unless_present = "file")]
        path: Option<PathBuf>,
        #[arg(long, conflicts_with = "path")]
        file: Option<PathBuf>,
    },
    /// List access structures on N1 classical and N2 quantum shares.
    Enumerate {
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        /// Every labelled structure instead of one per relabelling orbit.
        #[arg(long)]
        all: bool,
        /// Only feasible structures.
        #[arg(long)]
        feasible: bool,
        /// Only feasible structures that are not twin threshold.
        #[arg(long)]
        hybrid: bool,
    },
    /// Construct a scheme and describe its layout.
    Build(FamilyArgs),
    /// Run the entropic audit over every nonempty share subset.
    Verify(FamilyArgs),
    /// Print achieved share rates and their position in the optimal region.
    Rates(FamilyArgs),
    /// Print the optimal rate region, or test a rate tuple against it.
    Region {
        #[command(flatten)]
        family: FamilyArgs,
        /// Comma-separated rates, decimals or fractions (e.g. 2,1.5,3/2).
        #[arg(long)]
        tuple: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Otp,
    Twin,
    General,
    T3,
    T4,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyName,
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long)]
    pub k1: Option<usize>,
    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long)]
    pub k2: Option<usize>,
    #[arg(long)]
    pub n2: Option<usize>,
    /// Structure index 1..5 for the t4 family.
    #[arg(long)]
    pub structure: Option<u8>,
    /// Extreme point 1 or 2 for the t3 and t4 families.
    #[arg(long)]
    pub extreme: Option<u8>,
    /// Access-structure file for the general family.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

/// Captured result of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<SchemeError> for Failure {
    fn from(e: SchemeError) -> Self {
        match e {
            SchemeError::Infeasible(..) => Self { code: 1, message: e.to_string() },
            SchemeError::InvalidParameters(m) => Self::usage(format!("parameter error: {m}")),
            other => Self::usage(other.to_string()),
        }
    }
}

impl From<AccessError> for Failure {
    fn from(e: AccessError) -> Self {
        Self::usage(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let mut out = Outcome::default();
    match execute(&cli.command, &mut out) {
        Ok(code) => out.code = code,
        Err(f) => {
            out.code = f.code;
            let _ = writeln!(out.stderr, "error: {}", f.message);
        }
    }
    out
}

fn read_structure(path: &PathBuf) -> Result<AccessStructure, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    parse_structure(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn execute(command: &Command, out: &mut Outcome) -> Result<i32, Failure> {
    match command {
        Command::Feasible { path, file } => {
            let path = path.as_ref().or(file.as_ref()).ok_or_else(|| Failure::usage("missing structure file"))?;
            let s = read_structure(path)?;
            match s.infeasibility_witness() {
                None => {
                    let _ = writeln!(out.stdout, "feasible");
                    Ok(0)
                }
                Some((a, b)) => {
                    let _ = writeln!(out.stdout, "infeasible witness {a} {b}");
                    Ok(1)
                }
            }
        }
        Command::Enumerate { n1, n2, all, feasible, hybrid } => {
            if n1 + n2 == 0 || n1 + n2 > 6 {
                return Err(Failure::usage("enumerate supports 1 <= N1 + N2 <= 6"));
            }
            let entries: Vec<_> = if *all {
                enumerate_all_structures(*n1, *n2)
                    .into_iter()
                    .map(|structure| crate::access::CatalogEntry {
                        feasible: structure.check_feasible(),
                        twin: structure.twin_parameters(),
                        structure,
                    })
                    .collect()
            } else {
                canonical_catalog(*n1, *n2)
            };
            for e in entries.iter().filter(|e| (!feasible || e.feasible) && (!hybrid || e.is_hybrid())) {
                let twin = e.twin.map_or("none".to_string(), |(a, b)| format!("({a},{b})"));
                let _ = writeln!(out.stdout, "{} feasible={} twin={twin} hybrid={}", e.structure, e.feasible, e.is_hybrid());
            }
            Ok(0)
        }
        Command::Build(args) => {
            let scheme = build(args, out)?;
            describe(&scheme, out);
            Ok(0)
        }
        Command::Verify(args) => {
            let scheme = build(args, out)?;
            let report = audit(&scheme)?;
            out.stdout.push_str(&report.render());
            let _ = writeln!(out.stderr, "{}", report.summary());
            Ok(if report.overall { 0 } else { 1 })
        }
        Command::Rates(args) => {
            let scheme = build(args, out)?;
            let rates = scheme.rates();
            let _ = writeln!(out.stdout, "{}", rate_line(&scheme));
            if let Some(fam) = scheme.family().region() {
                let m = rates.membership(&region_of(fam))?;
                let _ = writeln!(out.stdout, "region {m}");
            }
            Ok(0)
        }
        Command::Region { family, tuple } => {
            let region = region_of(region_family(family)?);
            match tuple {
                None => out.stdout.push_str(&region.to_string()),
                Some(t) => {
                    let point = parse_tuple(t)?;
                    let _ = writeln!(out.stdout, "{}", in_region(&region, &point)?);
                }
            }
            Ok(0)
        }
    }
}

fn rate_line(scheme: &Scheme) -> String {
    let rates = scheme.rates();
    let names = scheme.structure().shares().map(|l| format!("R{l}"));
    let items: Vec<String> = names.zip(rates.coordinates()).map(|(n, r)| format!("{n}={r}")).collect();
    format!("rates {}", items.join(" "))
}

fn describe(scheme: &Scheme, out: &mut Outcome) {
    let s = &mut out.stdout;
    let _ = writeln!(s, "family {}", scheme.family());
    let _ = writeln!(s, "structure {}", scheme.structure());
    let _ = writeln!(s, "q {}", scheme.q());
    let _ = writeln!(s, "randomness {}", scheme.randomness().join(" "));
    let _ = writeln!(s, "branches {}", scheme.branch_count());
    let sizes: Vec<String> = scheme
        .structure()
        .shares()
        .zip(scheme.classical_sizes().iter().chain(scheme.quantum_sizes()))
        .map(|(l, n)| format!("{l}={n}"))
        .collect();
    let _ = writeln!(s, "sizes {}", sizes.join(" "));
    let _ = writeln!(s, "environment {}", scheme.environment());
    let _ = writeln!(s, "{}", rate_line(scheme));
}

fn reject(present: &[(&str, bool)], family: &str) -> Result<(), Failure> {
    match present.iter().find(|(_, p)| *p) {
        Some((flag, _)) => Err(Failure::usage(format!("--{flag} does not apply to family {family}"))),
        None => Ok(()),
    }
}

fn need<T: Copy>(value: Option<T>, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::usage(format!("missing --{flag}")))
}

fn build(a: &FamilyArgs, out: &mut Outcome) -> Result<Scheme, Failure> {
    let twin_flags = a.k1.is_some() || a.n1.is_some() || a.k2.is_some() || a.n2.is_some();
    match a.family {
        FamilyName::Otp => {
            reject(&[("k1/n1/k2/n2", twin_flags), ("structure", a.structure.is_some()), ("extreme", a.extreme.is_some()), ("file", a.file.is_some())], "otp")?;
            Ok(build_otp(a.q.unwrap_or(2))?)
        }
        FamilyName::Twin => {
            reject(&[("structure", a.structure.is_some()), ("extreme", a.extreme.is_some()), ("file", a.file.is_some())], "twin")?;
            let (k1, n1, k2, n2) = (need(a.k1, "k1")?, need(a.n1, "n1")?, need(a.k2, "k2")?, need(a.n2, "n2")?);
            let scheme = build_twin(k1, n1, k2, n2, a.q.unwrap_or_else(|| default_twin_field(n1, k2)))?;
            if a.q.is_none() {
                let _ = writeln!(out.stderr, "note: --q not given, using q={}", scheme.q());
            }
            Ok(scheme)
        }
        FamilyName::T3 => {
            reject(&[("k1/n1/k2/n2", twin_flags), ("structure", a.structure.is_some()), ("file", a.file.is_some())], "t3")?;
            Ok(build_t3(need(a.extreme, "extreme")?, a.q.unwrap_or(3))?)
        }
        FamilyName::T4 => {
            reject(&[("k1/n1/k2/n2", twin_flags), ("file", a.file.is_some())], "t4")?;
            if a.q.is_some_and(|q| q != 3) {
                return Err(Failure::usage("parameter error: the t4 family is defined over q=3"));
            }
            Ok(build_t4(need(a.structure, "structure")?, need(a.extreme, "extreme")?)?)
        }
        FamilyName::General => {
            reject(&[("k1/n1/k2/n2", twin_flags), ("structure", a.structure.is_some()), ("extreme", a.extreme.is_some())], "general")?;
            let path = a.file.as_ref().ok_or_else(|| Failure::usage("missing --file"))?;
            let s = read_structure(path)?;
            Ok(build_general(&s, a.q.unwrap_or(3))?)
        }
    }
}

fn region_family(a: &FamilyArgs) -> Result<RegionFamily, Failure> {
    match a.family {
        FamilyName::Otp => Ok(RegionFamily::Twin { n1: 1, n2: 1 }),
        FamilyName::T3 => Ok(RegionFamily::T3),
        FamilyName::T4 => Ok(RegionFamily::T4),
        FamilyName::Twin => {
            let (n1, n2) = (need(a.n1, "n1")?, need(a.n2, "n2")?);
            if n1 == 0 || n2 == 0 {
                return Err(Failure::usage("parameter error: twin structures need N1 >= 1 and N2 >= 1"));
            }
            if let Some(k1) = a.k1 {
                if k1 == 0 || k1 > n1 {
                    return Err(Failure::usage(format!("parameter error: need 1 <= K1 <= N1, got K1={k1}, N1={n1}")));
                }
            }
            if let Some(k2) = a.k2 {
                if k2 > n2 || 2 * k2 <= n2 {
                    return Err(Failure::usage(format!("parameter error: need N2/2 < K2 <= N2, got K2={k2}, N2={n2}")));
                }
            }
            Ok(RegionFamily::Twin { n1, n2 })
        }
        FamilyName::General => Err(Failure::usage("no rate region is known for the general family")),
    }
}
