use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;
use tournament_eh::bounds::{certify_upper, general_recursion_holds, iterate_substitution_capped, tr_estimate};
use tournament_eh::orderings::{find_galaxy_ordering_capped, find_star_ordering};
use tournament_eh::structure::analyze_homogeneous_capped;
use tournament_eh::{
    bound_report, build_galaxy, color_tournament, gen_c5, gen_random, gen_transitive, lower_bound_formula,
    substitute, BoundsError, CertifyConfig, CoreError, FindConfig, GalaxySpec, LowerFamily, OrderingError,
    PipelineError, ReportConfig, StructureError, Tournament, UpperCertificate,
};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Cap(String),
    #[error("pattern found: {0}")]
    FoundH(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::FoundH(_) => 3,
            CliError::Cap(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<StructureError> for CliError {
    fn from(e: StructureError) -> Self {
        match e {
            StructureError::TooLarge { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<OrderingError> for CliError {
    fn from(e: OrderingError) -> Self {
        match e {
            OrderingError::TooLarge { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::TooLarge { .. } => CliError::Cap(e.to_string()),
            BoundsError::Structure(s) => s.into(),
            BoundsError::Ordering(o) => o.into(),
            BoundsError::Core(c) => c.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::FoundH(emb) => CliError::FoundH(join(&emb.map)),
            PipelineError::NotAGalaxy | PipelineError::NotPrime => CliError::Usage(e.to_string()),
            PipelineError::Structure(s) => s.into(),
            PipelineError::Ordering(o) => o.into(),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

/// Tournament experiments: generation, structure, transitive subtournaments,
/// colorings and Erdős–Hajnal bounds.
#[derive(Debug, Parser)]
#[command(name = "eh", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a tournament in .trn format
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Structure, galaxy recognition and transitive number of a tournament
    Analyze {
        file: PathBuf,
        /// Largest tournament analyzed for homogeneous sets
        #[arg(long, default_value_t = 16)]
        structure_cap: usize,
        /// Largest tournament searched for galaxy orderings
        #[arg(long, default_value_t = 10)]
        ordering_cap: usize,
        /// Largest tournament whose transitive number is computed exactly
        #[arg(long, default_value_t = 64)]
        exact_cap: usize,
    },
    /// Partition an H-free tournament into transitive classes
    Color {
        file: PathBuf,
        #[arg(long)]
        forbidden: PathBuf,
        /// Write the classes here instead of standard output
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Solve directly at or below this size
        #[arg(long)]
        threshold: Option<usize>,
        #[arg(long, default_value_t = 24)]
        exact_cap: usize,
        #[arg(long)]
        trace: bool,
    },
    /// Lower and upper bounds on the Erdős–Hajnal coefficient
    Bounds(BoundsArgs),
    /// Search for an H-far random base tournament
    Certify {
        file: PathBuf,
        #[arg(short)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// Deletions allowed per trial (default 2|H|)
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value_t = 64)]
        cap: usize,
        /// Write the base tournament here
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct OutArg {
    /// Output file (standard output if absent)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum GenKind {
    Random {
        #[arg(short)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    Transitive {
        #[arg(short)]
        n: usize,
        #[command(flatten)]
        out: OutArg,
    },
    C5 {
        #[command(flatten)]
        out: OutArg,
    },
    /// Build a galaxy from a spec file (one `C<id>`, `L<id>` or `S` per line)
    Galaxy {
        spec: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Replace vertex i of H by the i-th part
    Substitute {
        h: PathBuf,
        #[arg(required = true)]
        parts: Vec<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// k-fold substitution of a base into itself
    Iterate {
        #[arg(long)]
        base: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(long, default_value_t = tournament_eh::bounds::DEFAULT_ITERATE_CAP)]
        cap: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    Galaxy,
    Star,
    General,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Kv,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// Pattern tournament
    file: Option<PathBuf>,
    #[arg(long, conflicts_with = "file", requires = "family")]
    h: Option<usize>,
    #[arg(long, value_enum, requires = "h")]
    family: Option<Family>,
    /// Constant of the asymptotic formulas
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Also search for a certificate on this many vertices
    #[arg(long, requires = "seed")]
    certify_n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Tournament, CliError> {
    Tournament::from_trn(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Failed(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn join(vs: &[usize]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn gen(kind: GenKind) -> Result<(), CliError> {
    let (t, out) = match kind {
        GenKind::Random { n, seed, out } => (gen_random(n, seed), out),
        GenKind::Transitive { n, out } => (gen_transitive(n), out),
        GenKind::C5 { out } => (gen_c5(), out),
        GenKind::Galaxy { spec, out } => (build_galaxy(&GalaxySpec::parse(&read(&spec)?)?)?, out),
        GenKind::Substitute { h, parts, out } => {
            let parts = parts.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>()?;
            (substitute(&load(&h)?, &parts)?.0, out)
        }
        GenKind::Iterate { base, k, cap, out } => (iterate_substitution_capped(&load(&base)?, k, cap)?, out),
    };
    emit(&out.output, &t.to_trn())
}

fn analyze(path: &Path, structure_cap: usize, ordering_cap: usize, exact_cap: usize) -> Result<(), CliError> {
    let t = load(path)?;
    let mut s = String::new();
    writeln!(s, "n={}", t.n()).unwrap();
    if t.n() < 2 {
        writeln!(s, "prime=no\np=1\nhomogeneous_sets=0").unwrap();
    } else {
        match analyze_homogeneous_capped(&t, structure_cap) {
            Ok(st) => {
                writeln!(s, "prime={}", yes(st.is_prime)).unwrap();
                writeln!(s, "p={}", st.p).unwrap();
                writeln!(s, "homogeneous_sets={}", st.homo_sets.len()).unwrap();
            }
            Err(StructureError::TooLarge { cap, .. }) => {
                writeln!(s, "structure=skipped_over_cap_{cap}").unwrap();
            }
            Err(e) => return Err(e.into()),
        }
    }
    match find_galaxy_ordering_capped(&t, ordering_cap) {
        Ok(Some(d)) => {
            let star = d.is_star() || matches!(find_star_ordering(&t), Ok(Some(o)) if o.is_star());
            writeln!(s, "galaxy=yes").unwrap();
            writeln!(s, "star={}", yes(star)).unwrap();
            writeln!(s, "regular={}", yes(d.regular)).unwrap();
            writeln!(s, "ordering={}", join(d.ordering.perm())).unwrap();
            writeln!(s, "k={}", join(&d.k)).unwrap();
            writeln!(s, "w={}", join(&d.w)).unwrap();
            writeln!(s, "g={}", d.g).unwrap();
            writeln!(s, "t={}", d.t).unwrap();
            for (i, st) in d.stars.iter().enumerate() {
                writeln!(s, "star_{i}=center:{} leaves:{} side:{:?}", st.center, join(&st.leaves), st.side).unwrap();
            }
            if !d.singletons.is_empty() {
                writeln!(s, "singletons={}", join(&d.singletons)).unwrap();
            }
        }
        Ok(None) => writeln!(s, "galaxy=no\nstar=no").unwrap(),
        Err(OrderingError::TooLarge { cap, .. }) => writeln!(s, "galaxy=skipped_over_cap_{cap}").unwrap(),
        Err(e) => return Err(e.into()),
    }
    let (tr, exact) = tr_estimate(&t, exact_cap);
    writeln!(s, "tr={tr}").unwrap();
    writeln!(s, "tr_method={}", if exact { "exact" } else { "greedy_lower_bound" }).unwrap();
    print!("{s}");
    Ok(())
}

fn color(
    file: &Path,
    forbidden: &Path,
    output: &Option<PathBuf>,
    threshold: Option<usize>,
    exact_cap: usize,
    trace: bool,
) -> Result<(), CliError> {
    let t = load(file)?;
    let h = load(forbidden)?;
    let cfg = FindConfig::<f64> {
        threshold,
        exact_cap,
        ..FindConfig::default()
    };
    let c = color_tournament(&t, &h, &cfg)?;
    if !c.verify(&t) {
        return Err(CliError::Failed("coloring failed verification".into()));
    }
    let mut classes = String::new();
    for w in &c.classes {
        let mut vs = w.order.clone();
        vs.sort_unstable();
        writeln!(classes, "{}", join(&vs)).unwrap();
    }
    let mut stats = String::new();
    writeln!(stats, "n={}", t.n()).unwrap();
    writeln!(stats, "classes={}", c.len()).unwrap();
    writeln!(stats, "epsilon={:.12e}", c.epsilon).unwrap();
    writeln!(stats, "guard={}", c.guard).unwrap();
    writeln!(stats, "bound={:.6}", c.bound).unwrap();
    writeln!(stats, "within_bound={}", yes(c.within_bound())).unwrap();
    if trace {
        stats.push_str(&c.trace.to_string());
    }
    match output {
        Some(_) => {
            emit(output, &classes)?;
            print!("{stats}");
        }
        None => print!("{classes}{stats}"),
    }
    Ok(())
}

fn bounds(a: BoundsArgs) -> Result<(), CliError> {
    if let (Some(h), Some(fam)) = (a.h, a.family) {
        let family = match fam {
            Family::Galaxy => LowerFamily::Galaxy,
            Family::Star => LowerFamily::Star,
            Family::General => LowerFamily::General,
        };
        let v: f64 = lower_bound_formula(h, family, a.c)?;
        let name = format!("{fam:?}").to_lowercase();
        let rows = [
            ("h", h.to_string()),
            ("family", name),
            ("c", a.c.to_string()),
            ("eps_lower", format!("{v:.12e}")),
            ("log_ratio_lower", format!("{:.12e}", v.ln() / (h as f64).ln())),
        ];
        let mut s = String::new();
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in rows {
            match a.format {
                Format::Table => writeln!(s, "{k:<width$}  {v}").unwrap(),
                Format::Kv => writeln!(s, "{k}={v}").unwrap(),
            }
        }
        if matches!(family, LowerFamily::General) && h >= 3 {
            let ok = (2..=h).all(|k| (2..=h).all(|l| general_recursion_holds(k, l)));
            match a.format {
                Format::Table => writeln!(s, "{:<width$}  {}", "recursion", yes(ok)).unwrap(),
                Format::Kv => writeln!(s, "recursion={}", yes(ok)).unwrap(),
            }
        }
        print!("{s}");
        return Ok(());
    }
    let Some(file) = &a.file else {
        return Err(CliError::Usage("give a pattern file or --h with --family".into()));
    };
    let h = load(file)?;
    let certify = match (a.certify_n, a.seed) {
        (Some(n), Some(seed)) => Some(CertifyConfig::new(n, a.trials, seed)),
        _ => None,
    };
    let rec = bound_report::<f64>(&h, &ReportConfig { c: a.c, certify })?;
    match a.format {
        Format::Table => print!("{}", rec.to_table()),
        Format::Kv => print!("{rec}"),
    }
    Ok(())
}

fn certificate_lines(cert: &UpperCertificate) -> String {
    let mut s = String::new();
    writeln!(s, "certificate=yes").unwrap();
    writeln!(s, "trial={}", cert.trial).unwrap();
    writeln!(s, "seed={}", cert.seed).unwrap();
    writeln!(s, "base_n={}", cert.base.n()).unwrap();
    writeln!(s, "deleted={}", join(&cert.deleted)).unwrap();
    writeln!(s, "tr={}", cert.tr).unwrap();
    writeln!(s, "eps_upper={:.12e}", cert.eps_upper).unwrap();
    writeln!(s, "verified_h_far={}", yes(cert.verified_h_far)).unwrap();
    writeln!(s, "degenerate={}", yes(cert.is_degenerate())).unwrap();
    s
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Command::Gen { kind } => gen(kind),
        Command::Analyze {
            file,
            structure_cap,
            ordering_cap,
            exact_cap,
        } => analyze(&file, structure_cap, ordering_cap, exact_cap),
        Command::Color {
            file,
            forbidden,
            output,
            threshold,
            exact_cap,
            trace,
        } => color(&file, &forbidden, &output, threshold, exact_cap, trace),
        Command::Bounds(a) => bounds(a),
        Command::Certify {
            file,
            n,
            trials,
            seed,
            budget,
            cap,
            output,
        } => {
            let h = load(&file)?;
            let cfg = CertifyConfig {
                delete_budget: budget,
                cap,
                ..CertifyConfig::new(n, trials, seed)
            };
            match certify_upper::<f64>(&h, &cfg)? {
                Some(cert) => {
                    if let Some(p) = &output {
                        emit(&Some(p.clone()), &cert.base.to_trn())?;
                    }
                    print!("{}", certificate_lines(&cert));
                }
                None => println!("certificate=none"),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let CliError::FoundH(map) = &e {
                println!("embedding={map}");
            }
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
