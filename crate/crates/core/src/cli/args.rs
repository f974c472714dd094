use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cylinder::Piece;
use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "latcrit", version, about = "Critical determinants, cylinder critical loci and Dirichlet constants")]
pub struct Cli {
    /// File of `key=value` lines supplying defaults; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (falls back to LATCRIT_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the artifact here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PieceArg {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    LocusStructure,
    DeltaEquality,
    DirichletBound,
    BaOrbit,
    DaniConsistency,
    All,
}

#[derive(Debug, Clone, Default, Args)]
pub struct NormArg {
    /// `euclidean`, `sup`, `p:<p>`, `poly:[x,y;...]` or `lin:[a,b;c,d]:<inner>`.
    #[arg(long)]
    pub norm: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical determinant of a planar domain and a critical basis.
    Critdet {
        #[command(flatten)]
        norm: NormArg,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// A critical lattice of the cylinder over the domain.
    Locus {
        #[command(flatten)]
        norm: NormArg,
        #[arg(long, value_enum)]
        piece: Option<PieceArg>,
        /// `a,b`
        #[arg(long, allow_hyphen_values = true)]
        shear: Option<String>,
        #[arg(long)]
        normalize: bool,
    },
    /// Dirichlet constant estimates at random points (or at `--x`).
    Spectrum {
        #[command(flatten)]
        norm: NormArg,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        qmax: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// Shortest cylinder-gauge vector along the flow orbit of `x`.
    Orbit {
        #[command(flatten)]
        norm: NormArg,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long)]
        smax: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Run a named check battery; exits 1 if any check fails.
    Verify {
        #[command(flatten)]
        norm: NormArg,
        #[arg(long, value_enum)]
        theorem: Option<Theorem>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        qmax: Option<u64>,
        #[arg(long)]
        smax: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Critdet,
    Locus,
    Spectrum,
    Orbit,
    Verify,
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub norm_spec: String,
    pub grid_n: usize,
    pub piece: Piece,
    pub shear: [f64; 2],
    pub normalize: bool,
    pub samples: usize,
    /// Per-command default when absent.
    pub q_max: Option<u64>,
    pub s_max: Option<f64>,
    pub s_step: f64,
    pub seed: u64,
    pub n: Option<usize>,
    pub x: Option<String>,
    pub theorem: Theorem,
    pub format: Option<Format>,
    pub output_path: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: CommandKind::Critdet,
            norm_spec: "euclidean".into(),
            grid_n: 512,
            piece: Piece::LowerShear,
            shear: [0.0, 0.0],
            normalize: false,
            samples: 100,
            q_max: None,
            s_max: None,
            s_step: 0.05,
            seed: 0,
            n: None,
            x: None,
            theorem: Theorem::All,
            format: None,
            output_path: None,
            threads: None,
        }
    }
}

/// `key=value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<HashMap<String, String>> {
    let mut out = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(line, 0, format!("line {}: expected `key=value`", i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

struct Layer {
    file: HashMap<String, String>,
}

impl Layer {
    fn pick<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::parse(v, 0, format!("config key `{key}` has an invalid value"))),
        }
    }

    fn pick_enum<T: ValueEnum>(&self, key: &str, flag: Option<T>) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(v) => T::from_str(v, true)
                .map(Some)
                .map_err(|_| Error::parse(v, 0, format!("config key `{key}` has an invalid value"))),
        }
    }
}

fn parse_pair(s: &str) -> Result<[f64; 2]> {
    let (a, b) = s.split_once(',').ok_or_else(|| Error::parse(s, 0, "expected `a,b`"))?;
    let first = crate::parse::parse_real(a.trim(), s, 0)?;
    let second = crate::parse::parse_real(b.trim(), s, a.len() + 1)?;
    Ok([first, second])
}

fn positive<T: PartialOrd + Default + Copy + std::fmt::Display>(name: &str, v: Option<T>) -> Result<Option<T>> {
    match v {
        Some(x) if x <= T::default() => Err(Error::InvalidArgument(format!("{name} must be positive, got {x}"))),
        _ => Ok(v),
    }
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(path) => read_config(path)?,
            None => HashMap::new(),
        };
        let l = Layer { file };
        let d = RunConfig::default();
        let mut c = RunConfig {
            format: l.pick_enum("format", cli.format)?,
            output_path: l.pick("output", cli.output)?,
            threads: positive("threads", l.pick("threads", cli.threads)?)?,
            seed: l.pick("seed", None::<u64>)?.unwrap_or(d.seed),
            ..d
        };
        let norm = |n: NormArg, l: &Layer| -> Result<String> { Ok(l.pick("norm", n.norm)?.unwrap_or_else(|| "euclidean".into())) };
        match cli.command {
            Command::Critdet { norm: n, grid } => {
                c.command = CommandKind::Critdet;
                c.norm_spec = norm(n, &l)?;
                c.grid_n = positive("grid", l.pick("grid", grid)?)?.unwrap_or(c.grid_n);
            }
            Command::Locus { norm: n, piece, shear, normalize } => {
                c.command = CommandKind::Locus;
                c.norm_spec = norm(n, &l)?;
                c.piece = match l.pick_enum("piece", piece)? {
                    Some(PieceArg::Upper) => Piece::UpperShear,
                    _ => Piece::LowerShear,
                };
                if let Some(s) = l.pick::<String>("shear", shear)? {
                    c.shear = parse_pair(&s)?;
                }
                c.normalize = normalize || l.pick::<bool>("normalize", None)?.unwrap_or(false);
            }
            Command::Spectrum { norm: n, samples, qmax, seed, x } => {
                c.command = CommandKind::Spectrum;
                c.norm_spec = norm(n, &l)?;
                c.samples = positive("samples", l.pick("samples", samples)?)?.unwrap_or(c.samples);
                c.q_max = positive("qmax", l.pick("qmax", qmax)?)?;
                c.seed = l.pick("seed", seed)?.unwrap_or(c.seed);
                c.x = l.pick("x", x)?;
            }
            Command::Orbit { norm: n, x, smax, step } => {
                c.command = CommandKind::Orbit;
                c.norm_spec = norm(n, &l)?;
                c.x = l.pick("x", x)?;
                c.s_max = positive("smax", l.pick("smax", smax)?)?;
                c.s_step = positive("step", l.pick("step", step)?)?.unwrap_or(c.s_step);
            }
            Command::Verify { norm: n, theorem, n: count, seed, qmax, smax, step } => {
                c.command = CommandKind::Verify;
                c.norm_spec = norm(n, &l)?;
                c.theorem = l.pick_enum("theorem", theorem)?.unwrap_or(Theorem::All);
                c.n = positive("n", l.pick("n", count)?)?;
                c.seed = l.pick("seed", seed)?.unwrap_or(c.seed);
                c.q_max = positive("qmax", l.pick("qmax", qmax)?)?;
                c.s_max = positive("smax", l.pick("smax", smax)?)?;
                c.s_step = positive("step", l.pick("step", step)?)?.unwrap_or(c.s_step);
            }
        }
        Ok(c)
    }

    pub fn parse_from<I, T>(args: I) -> std::result::Result<Result<Self>, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        Cli::try_parse_from(args).map(RunConfig::from_cli)
    }

    /// `--threads`, else `LATCRIT_THREADS`, else the rayon default.
    pub fn thread_count(&self) -> Result<Option<usize>> {
        if self.threads.is_some() {
            return Ok(self.threads);
        }
        match std::env::var("LATCRIT_THREADS") {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(Some(n)),
                _ => Err(Error::parse(&v, 0, "LATCRIT_THREADS must be a positive integer")),
            },
            Err(_) => Ok(None),
        }
    }
}

fn read_config(path: &Path) -> Result<HashMap<String, String>> {
    parse_config_file(&std::fs::read_to_string(path)?)
}
