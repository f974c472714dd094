//! Critical lattices of the cylinder `C_B = B × (−1, 1)` over a planar domain.
//!
//! The critical locus of `C_B` consists of two families built from a critical
//! lattice `M·Z²` of `B`: a lower shear that fixes `e₃`, and an upper shear
//! that fixes the plane `x₃ = 0`. This module realizes both families,
//! classifies lattices by whether they have a vector on the `x₃`-axis or in the
//! `(x₁, x₂)`-plane, runs the shear deformation that moves an arbitrary
//! critical lattice until three independent lattice points sit on the top of
//! the cylinder, and provides a random-restart search that tries (and should
//! fail) to find cylinder-admissible lattices of covolume below `Δ(B)`.

use std::ops::ControlFlow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::critical2d::{critical_determinant_2d, HexagonConfig};
use crate::error::{Error, Result};
use crate::lattice::{EnumOptions, Lattice, Lattice2, Lattice3, LatticePoint};
use crate::linalg::{self, Mat2, Mat3, Matrix};
use crate::norm2::{ConvexDomain2, CylinderGauge, DomainKind, Gauge, Point3};

/// Points with gauge within this distance of 1 count as boundary points.
pub const BOUNDARY_SHELL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Piece {
    /// `[[1,0,0],[0,1,0],[a,b,1]] · (M ⊕ 1)`
    LowerShear,
    /// `[[1,0,a],[0,1,b],[0,0,1]] · (M ⊕ 1)`
    UpperShear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalLatticeDesc {
    pub piece: Piece,
    /// Columns generate a critical lattice of the base domain.
    pub m: Mat2,
    pub shear: [f64; 2],
    /// Scale by `Δ^{-1/3}` to covolume one.
    pub normalize: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ZClass {
    /// Has a nonzero vector on the `x₃`-axis.
    ZPlus,
    /// Has a nonzero vector in the `(x₁, x₂)`-plane.
    ZMinus,
    Both,
    Neither,
}

/// A cylinder gauge together with its critical determinant.
#[derive(Debug, Clone)]
pub struct Cylinder {
    gauge: CylinderGauge,
    delta: f64,
    argmin: Option<HexagonConfig>,
}

impl Cylinder {
    /// Computes `Δ(C_B) = Δ(B)`: by the hexagon sweep, or as a quarter of
    /// the area when `B` is a parallelogram.
    pub fn new(base: ConvexDomain2) -> Result<Self> {
        if base.is_parallelogram() {
            let area = base
                .parallelogram_area()
                .ok_or_else(|| Error::InvalidArgument("parallelogram flag without a known area".into()))?;
            return Ok(Cylinder { gauge: CylinderGauge::new(base), delta: area / 4.0, argmin: None });
        }
        let crit = critical_determinant_2d(&base, 512)?;
        Ok(Cylinder { gauge: CylinderGauge::new(base), delta: crit.delta, argmin: Some(crit.argmin) })
    }

    pub fn with_delta(base: ConvexDomain2, delta: f64) -> Self {
        Cylinder { gauge: CylinderGauge::new(base), delta, argmin: None }
    }

    pub fn gauge(&self) -> &CylinderGauge {
        &self.gauge
    }

    pub fn base(&self) -> &ConvexDomain2 {
        &self.gauge.base
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// A critical basis `M` of the base domain: the hexagon minimizer, or
    /// for a parallelogram the half-diagonals spanning it.
    pub fn critical_m(&self) -> Option<Mat2> {
        match self.argmin {
            Some(c) => Some(linalg::from_columns(&[c.q, c.r])),
            None => parallelogram_basis(self.base()),
        }
    }

    /// Checks that `M·Z²` is critical for the base domain.
    pub fn check_base_critical(&self, m: &Mat2) -> Result<Lattice2> {
        let l = Lattice2::new(*m)?;
        let cov = l.covolume();
        if (cov - self.delta).abs() > 1e-9 {
            return Err(Error::NotCritical { covolume: cov, expected: self.delta, violating: None });
        }
        if let Some(v) = l.first_violation(self.base(), 1.0, &EnumOptions::default())? {
            return Err(Error::NotCritical {
                covolume: cov,
                expected: self.delta,
                violating: Some([v.vector[0], v.vector[1], 0.0]),
            });
        }
        Ok(l)
    }

    /// The lattice of one of the two critical families.
    pub fn realize(&self, desc: &CriticalLatticeDesc) -> Result<Lattice3> {
        self.check_base_critical(&desc.m)?;
        let [a, b] = desc.shear;
        let shear = match desc.piece {
            Piece::LowerShear => [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [a, b, 1.0]],
            Piece::UpperShear => [[1.0, 0.0, a], [0.0, 1.0, b], [0.0, 0.0, 1.0]],
        };
        let m = &desc.m;
        let block = [[m[0][0], m[0][1], 0.0], [m[1][0], m[1][1], 0.0], [0.0, 0.0, 1.0]];
        let mut basis = linalg::mat_mul(&shear, &block);
        if desc.normalize {
            basis = linalg::scale(&basis, self.delta.powf(-1.0 / 3.0));
        }
        Lattice::new(basis)
    }

    /// Radius at which a realized lattice is critical: 1, or `Δ^{-1/3}` after
    /// normalization.
    pub fn critical_radius(&self, normalized: bool) -> f64 {
        if normalized {
            self.delta.powf(-1.0 / 3.0)
        } else {
            1.0
        }
    }

    /// Deforms a critical lattice by lower-triangular unipotent shears until
    /// three independent lattice points lie on the top `|x₃| = 1`.
    pub fn shear_to_top(&self, lattice: &Lattice3) -> Result<ShearOutcome> {
        shear_to_top(self, lattice, &ShearOptions::default())
    }

    pub fn shear_to_top_with(&self, lattice: &Lattice3, opts: &ShearOptions) -> Result<ShearOutcome> {
        shear_to_top(self, lattice, opts)
    }

    /// Best covolume over `n_starts` random-restart local searches for
    /// cylinder-admissible lattices. Each start is scaled so its shortest
    /// vector has gauge one; a search step is accepted only if the scaled
    /// covolume drops.
    pub fn corroborate_delta_equality(&self, n_starts: usize, seed: u64) -> Result<f64> {
        let results: Vec<Result<f64>> = (0..n_starts)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let start = random_basis::<3>(&mut rng);
                local_covolume_search(&start, &self.gauge, 200, &mut rng)
            })
            .collect();
        results.into_iter().try_fold(f64::INFINITY, |acc, r| r.map(|v| acc.min(v)))
    }
}

/// `[u w]` for the parallelogram `{a·u + b·w : |a|, |b| < 1}`.
fn parallelogram_basis(d: &ConvexDomain2) -> Option<Mat2> {
    match d.kind() {
        DomainKind::Sup => Some(linalg::identity()),
        DomainKind::Polygon(v) if v.len() == 4 => {
            let u = [(v[0][0] + v[1][0]) / 2.0, (v[0][1] + v[1][1]) / 2.0];
            let w = [(v[0][0] - v[1][0]) / 2.0, (v[0][1] - v[1][1]) / 2.0];
            Some(linalg::from_columns(&[u, w]))
        }
        DomainKind::LinearImage { g, inner } => parallelogram_basis(inner).map(|m| linalg::mat_mul(g, &m)),
        _ => None,
    }
}

fn random_basis<const D: usize>(rng: &mut impl Rng) -> Matrix<D> {
    loop {
        let m: Matrix<D> = std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)));
        if linalg::det(&m).abs() > 0.05 {
            return m;
        }
    }
}

/// Covolume of the lattice `basis·Z^D` rescaled so that its shortest nonzero
/// vector has gauge exactly one.
pub fn normalized_covolume<const D: usize, G: Gauge<D>>(basis: &Matrix<D>, gauge: &G) -> Result<f64> {
    let l = Lattice::new(*basis)?;
    let (_, lambda1) = l.shortest_gauge_vector(gauge)?;
    Ok(l.covolume() / lambda1.powi(D as i32))
}

/// Multiplicative random-perturbation descent on the normalized covolume.
///
/// Steps `B ← (I + s·E)·B` with `E` uniform in `[-1, 1]`, start size 1e-2,
/// halving after each rejected step. Returns the smallest normalized
/// covolume seen.
pub fn local_covolume_search<const D: usize, G: Gauge<D>>(
    start: &Matrix<D>,
    gauge: &G,
    iters: usize,
    rng: &mut impl Rng,
) -> Result<f64> {
    let mut basis = *start;
    let mut best = normalized_covolume(&basis, gauge)?;
    let mut step = 1e-2;
    for _ in 0..iters {
        let mut g = linalg::identity::<D>();
        for row in g.iter_mut() {
            for x in row.iter_mut() {
                *x += step * rng.random_range(-1.0..1.0);
            }
        }
        let candidate = linalg::mat_mul(&g, &basis);
        match normalized_covolume(&candidate, gauge) {
            Ok(v) if v < best * (1.0 - 1e-12) => {
                best = v;
                basis = candidate;
            }
            Ok(_) | Err(Error::Singular { .. }) => {
                step *= 0.5;
                if step < 1e-9 {
                    step = 1e-2;
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(best)
}

/// Searches a box of lattice vectors for one on the `x₃`-axis or in the plane.
pub fn classify_z(lattice: &Lattice3, tol: f64) -> Result<ZClass> {
    let reduced = lattice.lll().lattice;
    let reach = 4.0 * (0..3).map(|j| linalg::norm2(&reduced.column(j))).fold(0.0, f64::max) + 1.0;
    let hit = |half: [f64; 3]| -> Result<bool> {
        let mut found = false;
        lattice.visit_box(&half, 1 << 20, |_, _| {
            found = true;
            ControlFlow::Break(())
        })?;
        Ok(found)
    };
    let plus = hit([tol, tol, reach])?;
    let minus = hit([reach, reach, tol])?;
    Ok(match (plus, minus) {
        (true, true) => ZClass::Both,
        (true, false) => ZClass::ZPlus,
        (false, true) => ZClass::ZMinus,
        (false, false) => ZClass::Neither,
    })
}

/// A permutation `π` of the three axes; its matrix sends `e_j` to `e_{π(j)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Permutation([usize; 3]);

impl Permutation {
    pub fn new(images: [usize; 3]) -> Result<Self> {
        let mut seen = [false; 3];
        for &i in &images {
            if i >= 3 || seen[i] {
                return Err(Error::InvalidArgument(format!("{images:?} is not a permutation of 0..3")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    pub fn all() -> [Permutation; 6] {
        [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]].map(Permutation)
    }

    pub fn matrix(&self) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for (j, &i) in self.0.iter().enumerate() {
            m[i][j] = 1.0;
        }
        m
    }
}

/// `P · [[1,u₁,u₂],[0,1,u₃],[0,0,1]] · Z³`, a critical lattice of the cube.
pub fn hajos_sample(perm: Permutation, uppers: [f64; 3]) -> Lattice3 {
    let [u1, u2, u3] = uppers;
    let upper = [[1.0, u1, u2], [0.0, 1.0, u3], [0.0, 0.0, 1.0]];
    Lattice::new(linalg::mat_mul(&perm.matrix(), &upper)).expect("unipotent times permutation is invertible")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearOptions {
    /// Shear parameters beyond this are treated as an unbounded admissible ray.
    pub t_cap: f64,
    /// Relative size below which `(P⁻¹)₃₃` counts as zero.
    pub gamma_tol: f64,
}

impl Default for ShearOptions {
    fn default() -> Self {
        ShearOptions { t_cap: 1e3, gamma_tol: 1e-9 }
    }
}

/// One linear stage `I + t·e₃·wᵀ`, `t ∈ [0, length]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShearStage {
    pub row: [f64; 3],
    pub length: f64,
    /// True when the stage ended because the admissible ray was unbounded.
    pub unbounded: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ShearPath {
    pub stages: Vec<ShearStage>,
}

impl ShearPath {
    pub fn total(&self) -> f64 {
        self.stages.iter().map(|s| s.length).sum()
    }

    /// The accumulated deformation after parameter `t` (clamped to the path).
    pub fn matrix_at(&self, t: f64) -> Mat3 {
        let mut acc = linalg::identity::<3>();
        let mut left = t.max(0.0);
        for s in &self.stages {
            let dt = left.min(s.length);
            acc = linalg::mat_mul(&stage_matrix(&s.row, dt), &acc);
            left -= dt;
            if left <= 0.0 {
                break;
            }
        }
        acc
    }
}

fn stage_matrix(row: &[f64; 3], t: f64) -> Mat3 {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [t * row[0], t * row[1], 1.0 + t * row[2]]]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShearOutcome {
    pub tau: f64,
    pub path: ShearPath,
    pub final_lattice: Lattice3,
    /// Three independent lattice points with `|x₃| = 1` in the final lattice.
    pub top_points: [Point3; 3],
}

fn boundary_points(cyl: &Cylinder, l: &Lattice3) -> Result<Vec<LatticePoint<3>>> {
    let mut pts = l.enumerate_shell(cyl.gauge(), 1.0 - BOUNDARY_SHELL, 1.0 + BOUNDARY_SHELL, &EnumOptions::default())?;
    // one representative of each ±v, deterministic order
    pts.retain(|p| p.coeffs.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0));
    pts.sort_by_key(|p| p.coeffs);
    Ok(pts)
}

fn is_top(p: &LatticePoint<3>) -> bool {
    (p.vector[2].abs() - 1.0).abs() <= BOUNDARY_SHELL
}

/// Greedily picks points raising the rank of `chosen`.
fn extend_independent(chosen: &mut Vec<Point3>, from: impl Iterator<Item = Point3>, target: usize) {
    for v in from {
        if chosen.len() >= target {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(v);
        if linalg::rank(&trial, 1e-9) == trial.len() {
            *chosen = trial;
        }
    }
}

/// Lattice points in the slab `|x₃| ≤ height` whose base coordinates lie in
/// the closed base domain (up to the boundary shell).
fn tube_points(cyl: &Cylinder, l: &Lattice3, height: f64) -> Result<Vec<(Point3, f64)>> {
    let ext = cyl.base().extent();
    let half = [ext[0] * (1.0 + BOUNDARY_SHELL), ext[1] * (1.0 + BOUNDARY_SHELL), height];
    let mut out = Vec::new();
    l.visit_box(&half, 1 << 22, |_, v| {
        let nu = cyl.base().gauge(&[v[0], v[1]]);
        if nu <= 1.0 + BOUNDARY_SHELL {
            out.push((*v, nu));
        }
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// First `t > 0` at which a tube point with `ν < 1` enters the open cylinder
/// under `x₃ ↦ x₃ + t·(w·v)`, searching up to `t_cap`.
fn exit_time(cyl: &Cylinder, l: &Lattice3, w: &[f64; 3], t_cap: f64) -> Result<Option<f64>> {
    let rate_bound = w[0].hypot(w[1]) * cyl.base().max_radius();
    let mut horizon = 1.0f64;
    loop {
        let horizon_now = horizon.min(t_cap);
        let height = 1.0 + rate_bound * horizon_now + 1e-6;
        let mut first: Option<f64> = None;
        for (v, nu) in tube_points(cyl, l, height)? {
            if nu >= 1.0 - 1e-12 {
                continue;
            }
            let rate = linalg::dot(w, &v);
            if rate == 0.0 {
                continue;
            }
            let z = v[2];
            let (t_in, t_out) = if rate > 0.0 { ((-1.0 - z) / rate, (1.0 - z) / rate) } else { ((1.0 - z) / rate, (-1.0 - z) / rate) };
            if t_out <= 0.0 {
                continue;
            }
            let t = t_in.max(0.0);
            if first.is_none_or(|f| t < f) {
                first = Some(t);
            }
        }
        match first {
            Some(t) if t <= horizon_now => return Ok(Some(t)),
            _ if horizon_now >= t_cap => return Ok(None),
            _ => horizon *= 4.0,
        }
    }
}

/// First `t > 0` at which a boundary point independent of `tops` reaches
/// `|x₃| = 1`.
fn hit_time(cyl: &Cylinder, l: &Lattice3, w: &[f64; 3], tops: &[Point3], t_cap: f64) -> Result<Option<f64>> {
    let rate_bound = w[0].hypot(w[1]) * cyl.base().max_radius();
    let mut horizon = 1.0f64;
    loop {
        let horizon_now = horizon.min(t_cap);
        let height = 1.0 + rate_bound * horizon_now + 1e-6;
        let mut first: Option<f64> = None;
        for (v, _) in tube_points(cyl, l, height)? {
            let rate = linalg::dot(w, &v);
            if rate.abs() < 1e-14 {
                continue;
            }
            let mut trial = tops.to_vec();
            trial.push(v);
            if linalg::rank(&trial, 1e-9) < trial.len() {
                continue;
            }
            for target in [1.0, -1.0] {
                let t = (target - v[2]) / rate;
                if t > 1e-12 && first.is_none_or(|f| t < f) {
                    first = Some(t);
                }
            }
        }
        match first {
            Some(t) if t <= horizon_now => return Ok(Some(t)),
            _ if horizon_now >= t_cap => return Ok(None),
            _ => horizon *= 4.0,
        }
    }
}

fn shear_to_top(cyl: &Cylinder, start: &Lattice3, opts: &ShearOptions) -> Result<ShearOutcome> {
    let enum_opts = EnumOptions::default();
    if let Some(v) = start.first_violation(cyl.gauge(), 1.0, &enum_opts)? {
        return Err(Error::NotCritical { covolume: start.covolume(), expected: cyl.delta, violating: Some(v.vector) });
    }
    if (start.covolume() - cyl.delta).abs() > 1e-8 {
        return Err(Error::NotCritical { covolume: start.covolume(), expected: cyl.delta, violating: None });
    }

    let mut current = *start;
    let mut path = ShearPath::default();
    for _ in 0..6 {
        let boundary = boundary_points(cyl, &current)?;
        let mut tops: Vec<Point3> = Vec::new();
        extend_independent(&mut tops, boundary.iter().filter(|p| is_top(p)).map(|p| p.vector), 3);
        let n = tops.len();
        if n == 3 {
            let top_points = [tops[0], tops[1], tops[2]];
            return Ok(ShearOutcome { tau: path.total(), path, final_lattice: current, top_points });
        }
        if n == 0 {
            return Err(Error::Degenerate("no lattice point on the top of the cylinder".into()));
        }
        let mut frame = tops.clone();
        extend_independent(&mut frame, boundary.iter().filter(|p| !is_top(p)).map(|p| p.vector), 3);
        if frame.len() < 3 {
            return Err(Error::Degenerate(format!(
                "only {} independent boundary points; a critical lattice has three",
                frame.len()
            )));
        }
        let p = linalg::from_columns(&[frame[0], frame[1], frame[2]]);
        let p_inv = linalg::inverse(&p).ok_or(Error::Singular { det: linalg::det(&p) })?;
        let mut row = p_inv[2];
        let scale = linalg::norm2(&row);
        if row[2].abs() <= opts.gamma_tol * scale {
            row[2] = 0.0;
        } else if row[2] > 0.0 {
            row = row.map(|x| -x);
        }

        let (length, unbounded) = match exit_time(cyl, &current, &row, opts.t_cap)? {
            Some(tau) => (tau, false),
            None => match hit_time(cyl, &current, &row, &tops, opts.t_cap)? {
                Some(t0) => (t0, true),
                None => {
                    return Err(Error::Degenerate(format!(
                        "admissible ray with no new top point before t = {}",
                        opts.t_cap
                    )))
                }
            },
        };
        if length <= 0.0 {
            return Err(Error::Degenerate("shear direction leaves the admissible set immediately".into()));
        }
        current = current.transformed(&stage_matrix(&row, length))?;
        path.stages.push(ShearStage { row, length, unbounded });
    }
    Err(Error::Degenerate("shear deformation did not terminate".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const SQRT3_2: f64 = 0.866_025_403_784_438_6;

    fn hex_m() -> Mat2 {
        [[1.0, 0.5], [0.0, SQRT3_2]]
    }

    fn disk() -> Cylinder {
        Cylinder::with_delta(ConvexDomain2::euclidean(), SQRT3_2)
    }

    fn desc(piece: Piece, shear: [f64; 2], normalize: bool) -> CriticalLatticeDesc {
        CriticalLatticeDesc { piece, m: hex_m(), shear, normalize }
    }

    #[test]
    fn upper_shear_matches_rotation_family_at_zero() {
        let l = disk().realize(&desc(Piece::UpperShear, [0.3, -0.2], false)).unwrap();
        let expected = [[1.0, 0.5, 0.3], [0.0, SQRT3_2, -0.2], [0.0, 0.0, 1.0]];
        assert!(linalg::max_abs_diff(l.basis(), &expected) < 1e-15);
    }

    #[test]
    fn zero_shear_pieces_agree() {
        let lower = disk().realize(&desc(Piece::LowerShear, [0.0, 0.0], false)).unwrap();
        let upper = disk().realize(&desc(Piece::UpperShear, [0.0, 0.0], false)).unwrap();
        assert_eq!(lower, upper);
        assert_eq!(lower.basis(), &[[1.0, 0.5, 0.0], [0.0, SQRT3_2, 0.0], [0.0, 0.0, 1.0]]);
    }

    #[test]
    fn normalized_has_unit_covolume() {
        let l = disk().realize(&desc(Piece::LowerShear, [0.3, -0.7], true)).unwrap();
        let expected = linalg::det(&hex_m()) * SQRT3_2.powf(-1.0);
        assert!((l.covolume() - 1.0).abs() < 1e-12);
        assert!((l.covolume() - expected).abs() < 1e-12);
        let r = disk().critical_radius(true);
        assert!(l.is_admissible(disk().gauge(), r, &EnumOptions::default()).unwrap());
    }

    #[test]
    fn non_critical_m_is_rejected() {
        let mut d = desc(Piece::LowerShear, [0.0, 0.0], false);
        d.m = [[0.9, 0.45], [0.0, 0.9 * SQRT3_2]];
        assert!(matches!(disk().realize(&d), Err(Error::NotCritical { .. })));
        d.m = [[1.0, 0.0], [0.0, SQRT3_2]];
        match disk().realize(&d) {
            Err(Error::NotCritical { violating: Some(v), .. }) => assert!(v[0].hypot(v[1]) < 1.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn classification_examples() {
        let cyl = disk();
        let block = cyl.realize(&desc(Piece::LowerShear, [0.0, 0.0], false)).unwrap();
        assert_eq!(classify_z(&block, 1e-9).unwrap(), ZClass::Both);
        let lower = cyl.realize(&desc(Piece::LowerShear, [std::f64::consts::FRAC_1_PI, -std::f64::consts::FRAC_1_SQRT_2], false)).unwrap();
        assert_eq!(classify_z(&lower, 1e-9).unwrap(), ZClass::ZPlus);
        let upper = cyl.realize(&desc(Piece::UpperShear, [std::f64::consts::FRAC_1_PI, -std::f64::consts::FRAC_1_SQRT_2], false)).unwrap();
        assert_eq!(classify_z(&upper, 1e-9).unwrap(), ZClass::ZMinus);
        let (r2, r3, r5) = (2f64.sqrt(), 3f64.sqrt(), 5f64.sqrt());
        let generic = Lattice::new([[1.0, r2 - 1.0, PI - 3.0], [r3 - 1.0, 1.0, r5 - 2.0], [r5 - 2.0, PI / 7.0, 1.0]]).unwrap();
        assert_eq!(classify_z(&generic, 1e-9).unwrap(), ZClass::Neither);
    }

    #[test]
    fn hajos_examples() {
        let id = Permutation::new([0, 1, 2]).unwrap();
        assert_eq!(hajos_sample(id, [0.0; 3]), Lattice3::standard());
        let l = hajos_sample(id, [0.5, 0.25, 0.75]);
        let cube = CylinderGauge::new(ConvexDomain2::sup());
        assert!(l.is_admissible(&cube, 1.0, &EnumOptions::default()).unwrap());
        assert!((l.covolume() - 1.0).abs() < 1e-12);
        assert!(Permutation::new([0, 0, 2]).is_err());
    }

    #[test]
    fn upper_shear_is_already_on_top() {
        let cyl = disk();
        let l = cyl.realize(&desc(Piece::UpperShear, [0.21, 0.13], false)).unwrap();
        let out = cyl.shear_to_top(&l).unwrap();
        assert_eq!(out.tau, 0.0);
        assert_eq!(out.path.matrix_at(0.0), linalg::identity());
        assert_eq!(out.final_lattice, l);
    }

    #[test]
    fn lower_shear_reaches_the_top() {
        let cyl = disk();
        let l = cyl.realize(&desc(Piece::LowerShear, [0.3, -0.7], false)).unwrap();
        let out = cyl.shear_to_top(&l).unwrap();
        let fin = &out.final_lattice;
        assert!(fin.contains(&[0.0, 0.0, 1.0], 1e-9));
        for p in &out.top_points {
            assert!((p[2].abs() - 1.0).abs() <= 1e-8);
            assert!(cyl.base().gauge(&[p[0], p[1]]) <= 1.0 + 1e-8);
            assert!(fin.contains(p, 1e-9));
        }
        assert_eq!(linalg::rank(&out.top_points, 1e-9), 3);
        assert!(fin.is_admissible(cyl.gauge(), 1.0, &EnumOptions::default()).unwrap());
        assert!((fin.covolume() - SQRT3_2).abs() < 1e-8);
        let m = out.path.matrix_at(out.tau);
        let moved = l.transformed(&m).unwrap();
        assert!(moved.same_lattice(fin, 1e-8));
    }

    #[test]
    fn path_is_lower_unipotent_and_covolume_preserving() {
        let cyl = disk();
        for (k, shear) in [[0.3, -0.7], [0.9, 0.1], [-0.45, 0.55]].into_iter().enumerate() {
            let t = 0.4 * k as f64;
            let mut d = desc(Piece::LowerShear, shear, false);
            let rot = [[t.cos(), -t.sin()], [t.sin(), t.cos()]];
            d.m = linalg::mat_mul(&rot, &hex_m());
            let l = cyl.realize(&d).unwrap();
            let out = cyl.shear_to_top(&l).unwrap();
            let mut last = l.covolume();
            for i in 0..=20 {
                let m = out.path.matrix_at(out.tau * i as f64 / 20.0);
                assert_eq!([m[0], m[1]], [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
                assert!((m[2][2] - 1.0).abs() < 1e-9);
                let cov = l.transformed(&m).unwrap().covolume();
                assert!(cov <= last + 1e-12);
                last = cov;
            }
        }
    }

    #[test]
    fn shear_rejects_non_critical_input() {
        let cyl = disk();
        let l = Lattice3::standard().scaled(2.0).unwrap();
        assert!(matches!(cyl.shear_to_top(&l), Err(Error::NotCritical { .. })));
    }

    #[test]
    fn search_from_a_critical_lattice_stays_put() {
        let cyl = disk();
        let l = cyl.realize(&desc(Piece::UpperShear, [0.2, 0.4], false)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let best = local_covolume_search(l.basis(), cyl.gauge(), 200, &mut rng).unwrap();
        assert!((best - l.covolume()).abs() < 1e-12);
    }

    #[test]
    fn planar_search_never_beats_delta() {
        let d = ConvexDomain2::p_norm(4.0).unwrap();
        let delta = critical_determinant_2d(&d, 512).unwrap().delta;
        let e = ConvexDomain2::euclidean();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let start = random_basis::<2>(&mut rng);
            let best = local_covolume_search(&start, &d, 30, &mut rng).unwrap();
            assert!(best >= delta - 1e-6);
            let best = local_covolume_search(&start, &e, 10, &mut rng).unwrap();
            assert!(best >= SQRT3_2 - 1e-6);
        }
    }

    #[test]
    fn cylinder_delta_for_parallelograms() {
        let c = Cylinder::new(ConvexDomain2::sup()).unwrap();
        assert_eq!(c.delta(), 1.0);
        let t = PI / 7.0;
        let g = [[2.0 * t.cos(), -t.sin()], [t.sin(), t.cos()]];
        let c = Cylinder::new(ConvexDomain2::linear_image(g, ConvexDomain2::sup()).unwrap()).unwrap();
        assert!((c.delta() - linalg::det(&g).abs()).abs() < 1e-12);
        let m = c.critical_m().unwrap();
        c.check_base_critical(&m).unwrap();
        let square = ConvexDomain2::polygon(vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]).unwrap();
        let c = Cylinder::new(square).unwrap();
        assert!((c.delta() - 0.5).abs() < 1e-12);
        c.check_base_critical(&c.critical_m().unwrap()).unwrap();
    }
}
