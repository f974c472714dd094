//! The `latcrit` command line.
//!
//! ```text
//! latcrit critdet  --norm euclidean --grid 512
//! latcrit locus    --norm p:4 --piece upper --shear 0.3,-0.7 --normalize
//! latcrit spectrum --norm sup --samples 100 --qmax 1000000 --seed 7
//! latcrit orbit    --x cbrt:2,cbrt:4 --smax 40 --step 0.05
//! latcrit verify   --theorem locus-structure --n 50 --norm euclidean
//! ```
//!
//! Every run is deterministic: the same configuration and seed produce the
//! same bytes regardless of the thread count.

mod args;
pub mod battery;
mod output;

use std::io::Write;

use serde::Serialize;

pub use args::{parse_config_file, Cli, CommandKind, Format, RunConfig, Theorem};
use battery::Check;
use output::{csv_table, json, real};

use crate::critical2d::{critical_determinant_2d, HexagonConfig};
use crate::cylinder::{classify_z, CriticalLatticeDesc, Cylinder, Piece, ZClass};
use crate::dirichlet::{orbit_min_gauge, s_grid, sample_spectrum, spectrum_sample, SpectrumSample, Target};
use crate::error::{Error, Result};
use crate::linalg::{Mat2, Matrix};
use crate::norm2::ConvexDomain2;

/// Exit status of a `verify` run with a failing check.
pub const EXIT_CHECK_FAILED: i32 = 1;

/// The rendered artifact of a run and its exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub artifact: String,
    pub exit_code: i32,
}

/// Parses `args` (including the program name), runs, and writes the
/// artifact. Errors go to stderr; the return value is the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::parse_from(args) {
        Ok(Ok(c)) => c,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs and writes the artifact to the configured path or stdout.
pub fn run(config: &RunConfig) -> Result<i32> {
    let outcome = execute(config)?;
    match &config.output_path {
        Some(path) => std::fs::write(path, &outcome.artifact)?,
        None => std::io::stdout().lock().write_all(outcome.artifact.as_bytes())?,
    }
    Ok(outcome.exit_code)
}

/// Runs on a pool of the configured size and renders the artifact.
pub fn execute(config: &RunConfig) -> Result<Outcome> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.thread_count()? {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(config))
}

fn dispatch(c: &RunConfig) -> Result<Outcome> {
    let domain: ConvexDomain2 = c.norm_spec.parse()?;
    let artifact = match c.command {
        CommandKind::Critdet => critdet(c, &domain)?,
        CommandKind::Locus => locus(c, &domain)?,
        CommandKind::Spectrum => spectrum(c, &domain)?,
        CommandKind::Orbit => orbit(c, &domain)?,
        CommandKind::Verify => return verify(c, &domain),
    };
    Ok(Outcome { artifact, exit_code: 0 })
}

fn rows<const D: usize>(m: &Matrix<D>) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.to_vec()).collect()
}

#[derive(Serialize)]
struct CritdetReport {
    norm: String,
    grid: usize,
    delta: f64,
    /// Rows of a critical basis; its columns generate the lattice.
    basis: Vec<Vec<f64>>,
    argmin: Option<HexagonConfig>,
}

fn critdet(c: &RunConfig, domain: &ConvexDomain2) -> Result<String> {
    let (delta, basis, argmin) = if domain.is_parallelogram() {
        let cyl = Cylinder::new(domain.clone())?;
        let m = cyl.critical_m().ok_or(Error::Parallelogram)?;
        (cyl.delta(), m, None)
    } else {
        let crit = critical_determinant_2d(domain, c.grid_n)?;
        let m: Mat2 = crate::linalg::from_columns(&[crit.argmin.q, crit.argmin.r]);
        (crit.delta, m, Some(crit.argmin))
    };
    match c.format.unwrap_or(Format::Json) {
        Format::Json => json(&CritdetReport { norm: domain.to_string(), grid: c.grid_n, delta, basis: rows(&basis), argmin }),
        Format::Csv => csv_table(
            &["delta", "m11", "m12", "m21", "m22"],
            [vec![real(delta), real(basis[0][0]), real(basis[0][1]), real(basis[1][0]), real(basis[1][1])]],
        ),
    }
}

#[derive(Serialize)]
struct LocusReport {
    norm: String,
    piece: Piece,
    shear: [f64; 2],
    normalize: bool,
    delta: f64,
    covolume: f64,
    basis: Vec<Vec<f64>>,
    z_class: ZClass,
}

fn locus(c: &RunConfig, domain: &ConvexDomain2) -> Result<String> {
    let cyl = Cylinder::new(domain.clone())?;
    let m = cyl.critical_m().ok_or_else(|| Error::Degenerate("no critical basis for the base domain".into()))?;
    let desc = CriticalLatticeDesc { piece: c.piece, m, shear: c.shear, normalize: c.normalize };
    let l = cyl.realize(&desc)?;
    let report = LocusReport {
        norm: domain.to_string(),
        piece: c.piece,
        shear: c.shear,
        normalize: c.normalize,
        delta: cyl.delta(),
        covolume: l.covolume(),
        basis: rows(l.basis()),
        z_class: classify_z(&l, 1e-9)?,
    };
    match c.format.unwrap_or(Format::Json) {
        Format::Json => json(&report),
        Format::Csv => csv_table(&["c1", "c2", "c3"], l.basis().iter().map(|r| r.iter().map(|&v| real(v)).collect())),
    }
}

fn spectrum(c: &RunConfig, domain: &ConvexDomain2) -> Result<String> {
    let q_max = c.q_max.unwrap_or(1_000_000);
    let found: Vec<SpectrumSample> = match &c.x {
        Some(x) => vec![spectrum_sample(&x.parse::<Target>()?, domain, q_max)?],
        None => sample_spectrum(domain, c.samples, q_max, c.seed)?,
    };
    match c.format.unwrap_or(Format::Csv) {
        Format::Json => json(&found),
        Format::Csv => csv_table(
            &["x1", "x2", "c_estimate"],
            found.iter().map(|s| vec![real(s.x[0]), real(s.x[1]), real(s.c_estimate)]),
        ),
    }
}

#[derive(Serialize)]
struct OrbitRow {
    s: f64,
    lambda1: f64,
}

fn orbit(c: &RunConfig, domain: &ConvexDomain2) -> Result<String> {
    let x: Target = c.x.as_deref().ok_or_else(|| Error::InvalidArgument("orbit needs --x".into()))?.parse()?;
    let cyl = Cylinder::with_delta(domain.clone(), f64::NAN);
    let grid = s_grid(c.s_max.unwrap_or(40.0), c.s_step)?;
    let found: Vec<OrbitRow> =
        orbit_min_gauge(&x, cyl.gauge(), &grid)?.into_iter().map(|s| OrbitRow { s: s.s, lambda1: s.lambda1 }).collect();
    match c.format.unwrap_or(Format::Csv) {
        Format::Json => json(&found),
        Format::Csv => csv_table(&["s", "lambda1"], found.iter().map(|r| vec![real(r.s), real(r.lambda1)])),
    }
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    norm: String,
    passed: bool,
    checks: &'a [(String, Check)],
}

fn verify(c: &RunConfig, domain: &ConvexDomain2) -> Result<Outcome> {
    let all = [Theorem::LocusStructure, Theorem::DeltaEquality, Theorem::DirichletBound, Theorem::BaOrbit, Theorem::DaniConsistency];
    let theorems: Vec<Theorem> = if c.theorem == Theorem::All { all.to_vec() } else { vec![c.theorem] };
    let mut checks: Vec<(String, Check)> = Vec::new();
    for t in theorems {
        let name = theorem_name(t);
        let found = match t {
            Theorem::LocusStructure => battery::locus_structure(domain, c.n.unwrap_or(50), c.seed)?,
            Theorem::DeltaEquality => battery::delta_equality(domain, c.n.unwrap_or(200), c.seed)?,
            Theorem::DirichletBound => battery::dirichlet_bound(domain, c.n.unwrap_or(100), c.q_max.unwrap_or(1_000_000), c.seed)?,
            Theorem::BaOrbit => battery::ba_orbit(domain, c.q_max.unwrap_or(10_000_000), c.s_max.unwrap_or(40.0), c.s_step)?,
            Theorem::DaniConsistency => battery::dani_consistency(domain, c.n.unwrap_or(10), c.s_max.unwrap_or(14.0), c.s_step, c.seed)?,
            Theorem::All => unreachable!(),
        };
        checks.extend(found.into_iter().map(|ch| (name.to_string(), ch)));
    }
    let passed = checks.iter().all(|(_, ch)| ch.passed);
    let artifact = match c.format {
        Some(Format::Json) => json(&VerifyReport { norm: domain.to_string(), passed, checks: &checks })?,
        Some(Format::Csv) => csv_table(
            &["theorem", "check", "passed", "detail"],
            checks.iter().map(|(t, ch)| vec![t.clone(), ch.name.clone(), ch.passed.to_string(), ch.detail.clone()]),
        )?,
        None => {
            let mut s = String::new();
            for (t, ch) in &checks {
                s.push_str(&format!("{} {t}/{}: {}\n", if ch.passed { "PASS" } else { "FAIL" }, ch.name, ch.detail));
            }
            s.push_str(if passed { "all checks passed\n" } else { "some checks FAILED\n" });
            s
        }
    };
    Ok(Outcome { artifact, exit_code: if passed { 0 } else { EXIT_CHECK_FAILED } })
}

fn theorem_name(t: Theorem) -> &'static str {
    match t {
        Theorem::LocusStructure => "locus-structure",
        Theorem::DeltaEquality => "delta-equality",
        Theorem::DirichletBound => "dirichlet-bound",
        Theorem::BaOrbit => "ba-orbit",
        Theorem::DaniConsistency => "dani-consistency",
        Theorem::All => "all",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> RunConfig {
        RunConfig::parse_from(std::iter::once("latcrit").chain(args.iter().copied())).unwrap().unwrap()
    }

    #[test]
    fn critdet_json() {
        let out = execute(&cfg(&["critdet", "--norm", "euclidean"])).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.artifact).unwrap();
        assert!((v["delta"].as_f64().unwrap() - 0.75f64.sqrt()).abs() < 1e-9);
        assert_eq!(v["basis"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn critdet_parallelogram() {
        let out = execute(&cfg(&["critdet", "--norm", "sup", "--format", "csv"])).unwrap();
        let mut lines = out.artifact.lines();
        assert_eq!(lines.next(), Some("delta,m11,m12,m21,m22"));
        assert!(lines.next().unwrap().starts_with("1.0000000000000000e0,"));
    }

    #[test]
    fn rational_spectrum_row() {
        let out = execute(&cfg(&["spectrum", "--norm", "euclidean", "--samples", "1", "--qmax", "10", "--x", "0.5,0.5"])).unwrap();
        let lines: Vec<&str> = out.artifact.lines().collect();
        assert_eq!(lines, ["x1,x2,c_estimate", "5.0000000000000000e-1,5.0000000000000000e-1,0.0000000000000000e0"]);
    }

    #[test]
    fn locus_reports_class() {
        let out = execute(&cfg(&["locus", "--piece", "upper", "--shear", "-0.3,0.2", "--normalize"])).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.artifact).unwrap();
        assert_eq!(v["z_class"], "ZMinus");
        assert!((v["covolume"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn verify_locus_structure_passes() {
        let out = execute(&cfg(&["verify", "--theorem", "locus-structure", "--n", "5", "--norm", "euclidean"])).unwrap();
        assert_eq!(out.exit_code, 0, "{}", out.artifact);
        assert!(out.artifact.lines().all(|l| !l.starts_with("FAIL")));
    }

    #[test]
    fn config_file_is_overridden_by_flags() {
        let dir = std::env::temp_dir().join(format!("latcrit-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "# recipe\nnorm = sup\nqmax = 50\nsamples = 3\nseed = 4\n").unwrap();
        let c = cfg(&["spectrum", "--config", path.to_str().unwrap(), "--samples", "2"]);
        assert_eq!((c.norm_spec.as_str(), c.q_max, c.samples, c.seed), ("sup", Some(50), 2, 4));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn bad_inputs_have_distinct_codes() {
        let e = execute(&cfg(&["critdet", "--norm", "q:3"])).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = execute(&cfg(&["orbit", "--x", "0.1,0.2", "--smax", "400"])).unwrap_err();
        assert_eq!(e.exit_code(), 5);
        assert!(RunConfig::parse_from(["latcrit", "spectrum", "--samples", "0"]).unwrap().is_err());
        assert!(parse_config_file("novalue").is_err());
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let a = execute(&cfg(&["spectrum", "--samples", "8", "--qmax", "2000", "--threads", "1"])).unwrap();
        let b = execute(&cfg(&["spectrum", "--samples", "8", "--qmax", "2000", "--threads", "4"])).unwrap();
        assert_eq!(a, b);
    }
}
