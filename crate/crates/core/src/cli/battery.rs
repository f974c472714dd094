//! Check batteries behind `latcrit verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::critical2d::critical_locus_2d;
use crate::cylinder::{classify_z, CriticalLatticeDesc, Cylinder, Piece, ZClass};
use crate::dirichlet::{
    ba_pair_cubic, dirichlet_constant, dynamical_constant, matched_q_max, orbit_min_gauge, random_point, s_grid,
    sample_spectrum, Target,
};
use crate::error::Result;
use crate::lattice::EnumOptions;
use crate::norm2::ConvexDomain2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: String) -> Self {
        Check { name: name.into(), passed, detail }
    }
}

/// Critical bases of the domain: `n` samples of the planar critical locus, or
/// the single parallelogram basis.
fn base_bases(cyl: &Cylinder, n: usize) -> Result<Vec<crate::linalg::Mat2>> {
    if cyl.base().is_parallelogram() {
        return Ok(cyl.critical_m().into_iter().collect());
    }
    Ok(critical_locus_2d(cyl.base(), n)?.into_iter().map(|l| *l.basis()).collect())
}

/// Realized lattices of both pieces with random shears: admissible,
/// covolume `Δ`, and in the class their piece predicts.
pub fn locus_structure(domain: &ConvexDomain2, n: usize, seed: u64) -> Result<Vec<Check>> {
    let cyl = Cylinder::new(domain.clone())?;
    let bases = base_bases(&cyl, n)?;
    let mut checks = Vec::new();
    for piece in [Piece::LowerShear, Piece::UpperShear] {
        let results: Vec<Result<(bool, f64, ZClass)>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let shear = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
                let desc = CriticalLatticeDesc { piece, m: bases[i % bases.len()], shear, normalize: false };
                let l = cyl.realize(&desc)?;
                let adm = l.is_admissible(cyl.gauge(), 1.0, &EnumOptions::default())?;
                Ok((adm, (l.covolume() - cyl.delta()).abs(), classify_z(&l, 1e-9)?))
            })
            .collect();
        let results = results.into_iter().collect::<Result<Vec<_>>>()?;
        let label = match piece {
            Piece::LowerShear => "lower",
            Piece::UpperShear => "upper",
        };
        let admissible = results.iter().filter(|r| r.0).count();
        checks.push(Check::new(format!("{label}/admissible"), admissible == n, format!("{admissible}/{n} admissible at r = 1")));
        let worst = results.iter().map(|r| r.1).fold(0.0, f64::max);
        checks.push(Check::new(
            format!("{label}/covolume"),
            worst <= 1e-9,
            format!("max |covolume - delta| = {worst:.3e}, delta = {}", cyl.delta()),
        ));
        let expected = match piece {
            Piece::LowerShear => [ZClass::ZPlus, ZClass::Both],
            Piece::UpperShear => [ZClass::ZMinus, ZClass::Both],
        };
        let in_class = results.iter().filter(|r| expected.contains(&r.2)).count();
        checks.push(Check::new(format!("{label}/z-class"), in_class == n, format!("{in_class}/{n} in {expected:?}")));
    }
    Ok(checks)
}

/// Random-restart searches never beat `Δ(B)` by more than `1e-6`.
pub fn delta_equality(domain: &ConvexDomain2, n: usize, seed: u64) -> Result<Vec<Check>> {
    let cyl = Cylinder::new(domain.clone())?;
    let best = cyl.corroborate_delta_equality(n, seed)?;
    Ok(vec![Check::new(
        "min-covolume",
        best >= cyl.delta() - 1e-6,
        format!("best of {n} starts = {best}, delta = {}, margin = {:.3e}", cyl.delta(), best - cyl.delta()),
    )])
}

/// No sampled estimate exceeds `1/Δ`.
pub fn dirichlet_bound(domain: &ConvexDomain2, samples: usize, q_max: u64, seed: u64) -> Result<Vec<Check>> {
    let cyl = Cylinder::new(domain.clone())?;
    let bound = 1.0 / cyl.delta();
    let found = sample_spectrum(domain, samples, q_max, seed)?;
    let worst = found.iter().map(|s| s.c_estimate).fold(0.0, f64::max);
    Ok(vec![Check::new(
        "upper-bound",
        worst <= bound + 1e-6,
        format!("max c over {samples} samples = {worst}, bound = {bound}, margin = {:.4}", bound - worst),
    )])
}

/// The cubic pair: transitions stay `0.02` below `1/Δ` and the orbit stays
/// away from the cusp.
pub fn ba_orbit(domain: &ConvexDomain2, q_max: u64, s_max: f64, s_step: f64) -> Result<Vec<Check>> {
    let cyl = Cylinder::new(domain.clone())?;
    let bound = 1.0 / cyl.delta();
    let x = ba_pair_cubic();
    let est = dirichlet_constant(&x, domain, q_max)?;
    let samples = orbit_min_gauge(&x, cyl.gauge(), &s_grid(s_max, s_step)?)?;
    let inf = samples.iter().map(|s| s.lambda1).fold(f64::INFINITY, f64::min);
    Ok(vec![
        Check::new(
            "transition-gap",
            bound - est.tail_sup >= 0.02,
            format!("tail sup = {}, bound = {bound}, margin = {:.4}", est.tail_sup, bound - est.tail_sup),
        ),
        Check::new("orbit-bounded", inf > 0.05, format!("inf lambda1 over s in [0, {s_max}] = {inf:.6}")),
    ])
}

/// Flow and record estimates agree within 5% at matched horizons.
pub fn dani_consistency(domain: &ConvexDomain2, n: usize, s_max: f64, s_step: f64, seed: u64) -> Result<Vec<Check>> {
    let cyl = Cylinder::new(domain.clone())?;
    let q_max = matched_q_max(s_max);
    (0..n)
        .into_par_iter()
        .map(|i| {
            let x = random_point(seed, i as u64);
            let t = Target::from_f64(x);
            let flow = dynamical_constant(&t, cyl.gauge(), s_max, s_step)?.c;
            let records = dirichlet_constant(&t, domain, q_max)?.c_estimate;
            let rel = (flow - records).abs() / records;
            Ok(Check::new(
                format!("x{i}"),
                rel <= 0.05,
                format!("x = ({:.6}, {:.6}): flow c = {flow:.6}, record c = {records:.6}, rel = {rel:.2e}", x[0], x[1]),
            ))
        })
        .collect()
}
