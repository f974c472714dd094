//! Full-rank lattices in R² and R³.
//!
//! A lattice is stored as a row-major matrix whose columns are the basis
//! vectors, so `Λ = basis · Z^D`. Point enumeration first reduces the basis
//! (Gauss in the plane, LLL in space), maps the gauge ball's bounding box
//! through the inverse reduced basis to get a box of integer coefficients, and
//! filters that box by the gauge. The box is a superset of the ball, so the
//! enumeration is complete.

use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::norm2::Gauge;

/// Boxes larger than this many coefficient vectors are refused outright.
const MAX_BOX: u128 = 1 << 34;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumOptions {
    /// A point counts as inside the open ball of radius `r` when
    /// `gauge < r · (1 − eps_rel)`.
    pub eps_rel: f64,
    /// Maximum number of points an enumeration may return.
    pub cap: usize,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { eps_rel: 1e-12, cap: 10_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticePoint<const D: usize> {
    /// Integer coordinates with respect to the lattice's own basis.
    pub coeffs: [i64; D],
    pub vector: [f64; D],
    pub gauge: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice<const D: usize> {
    basis: Matrix<D>,
}

pub type Lattice2 = Lattice<2>;
pub type Lattice3 = Lattice<3>;

/// A reduced basis together with the unimodular change of basis:
/// `reduced.basis() = original.basis() · change`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reduced<const D: usize> {
    pub lattice: Lattice<D>,
    pub change: [[i64; D]; D],
}

impl<const D: usize> Lattice<D> {
    /// `basis` is row-major; its columns are the basis vectors.
    pub fn new(basis: Matrix<D>) -> Result<Self> {
        let det = linalg::det(&basis);
        if !(det.abs() > 0.0) || !det.is_finite() || basis.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Singular { det });
        }
        Ok(Lattice { basis })
    }

    pub fn from_columns(columns: [[f64; D]; D]) -> Result<Self> {
        Self::new(linalg::from_columns(&columns))
    }

    /// The integer lattice Z^D.
    pub fn standard() -> Self {
        Lattice { basis: linalg::identity() }
    }

    pub fn basis(&self) -> &Matrix<D> {
        &self.basis
    }

    pub fn column(&self, j: usize) -> [f64; D] {
        linalg::column(&self.basis, j)
    }

    pub fn columns(&self) -> [[f64; D]; D] {
        std::array::from_fn(|j| self.column(j))
    }

    pub fn covolume(&self) -> f64 {
        linalg::det(&self.basis).abs()
    }

    pub fn point(&self, coeffs: &[i64; D]) -> [f64; D] {
        linalg::mat_vec(&self.basis, &coeffs.map(|c| c as f64))
    }

    /// `g · Λ`.
    pub fn transformed(&self, g: &Matrix<D>) -> Result<Self> {
        Self::new(linalg::mat_mul(g, &self.basis))
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(linalg::scale(&self.basis, s))
    }

    /// Whether `v` is a lattice vector, up to `tol` in each coefficient.
    pub fn contains(&self, v: &[f64; D], tol: f64) -> bool {
        let Some(inv) = linalg::inverse(&self.basis) else {
            return false;
        };
        linalg::mat_vec(&inv, v).iter().all(|c| (c - c.round()).abs() <= tol)
    }

    /// Whether both bases generate the same lattice (coefficient tolerance `tol`).
    pub fn same_lattice(&self, other: &Self, tol: f64) -> bool {
        (0..D).all(|j| self.contains(&other.column(j), tol))
            && (0..D).all(|j| other.contains(&self.column(j), tol))
    }

    /// LLL-reduced basis (δ = 0.99) with respect to the Euclidean norm.
    pub fn lll(&self) -> Reduced<D> {
        let mut coeffs: [[i128; D]; D] = std::array::from_fn(|k| std::array::from_fn(|i| (i == k) as i128));
        let basis = self.basis;
        lll_coefficients(&mut coeffs, |c| linalg::mat_vec(&basis, &c.map(|x| x as f64)), 0.99);
        let columns: [[f64; D]; D] = std::array::from_fn(|k| self.point(&coeffs[k].map(|x| x as i64)));
        let change = std::array::from_fn(|i| std::array::from_fn(|k| coeffs[k][i] as i64));
        Reduced { lattice: Lattice { basis: linalg::from_columns(&columns) }, change }
    }

    /// Calls `visit` for every nonzero lattice point inside the box
    /// `|x_i| ≤ half_widths[i]`, with coefficients in this lattice's basis.
    pub fn visit_box(
        &self,
        half_widths: &[f64; D],
        cap_hint: usize,
        mut visit: impl FnMut(&[i64; D], &[f64; D]) -> ControlFlow<()>,
    ) -> Result<()> {
        let reduced = if D == 2 { self.reduce_2d_generic() } else { self.lll() };
        let rb = reduced.lattice.basis;
        let inv = linalg::inverse(&rb).ok_or(Error::Singular { det: linalg::det(&rb) })?;
        let mut bounds = [0i64; D];
        let mut count: u128 = 1;
        for j in 0..D {
            let reach: f64 = (0..D).map(|i| inv[j][i].abs() * half_widths[i]).sum();
            let n = (reach * (1.0 + 1e-9) + 1e-9).floor();
            if !n.is_finite() || n > 1e12 {
                return Err(Error::Capacity { requested: u128::MAX, cap: cap_hint });
            }
            bounds[j] = n as i64;
            count = count.saturating_mul(2 * n as u128 + 1);
        }
        if count > MAX_BOX.max(64 * cap_hint as u128) {
            return Err(Error::Capacity { requested: count, cap: cap_hint });
        }
        let mut c = bounds.map(|b| -b);
        loop {
            if c.iter().any(|&x| x != 0) {
                let cf = c.map(|x| x as f64);
                let v = linalg::mat_vec(&rb, &cf);
                if (0..D).all(|i| v[i].abs() <= half_widths[i] * (1.0 + 1e-12)) {
                    let orig: [i64; D] =
                        std::array::from_fn(|i| (0..D).map(|k| reduced.change[i][k] * c[k]).sum());
                    if visit(&orig, &v).is_break() {
                        return Ok(());
                    }
                }
            }
            // odometer
            let mut j = 0;
            loop {
                if j == D {
                    return Ok(());
                }
                if c[j] < bounds[j] {
                    c[j] += 1;
                    break;
                }
                c[j] = -bounds[j];
                j += 1;
            }
        }
    }

    fn reduce_2d_generic(&self) -> Reduced<D> {
        // Gauss reduction is LLL with δ = 1 in the plane.
        let mut coeffs: [[i128; D]; D] = std::array::from_fn(|k| std::array::from_fn(|i| (i == k) as i128));
        let basis = self.basis;
        lll_coefficients(&mut coeffs, |c| linalg::mat_vec(&basis, &c.map(|x| x as f64)), 0.999_999);
        let columns: [[f64; D]; D] = std::array::from_fn(|k| self.point(&coeffs[k].map(|x| x as i64)));
        let change = std::array::from_fn(|i| std::array::from_fn(|k| coeffs[k][i] as i64));
        Reduced { lattice: Lattice { basis: linalg::from_columns(&columns) }, change }
    }

    /// All nonzero lattice points with `gauge < r·(1 − eps_rel)`.
    pub fn enumerate_in_ball<G: Gauge<D> + ?Sized>(
        &self,
        gauge: &G,
        r: f64,
        opts: &EnumOptions,
    ) -> Result<Vec<LatticePoint<D>>> {
        if !(r > 0.0) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
        }
        let limit = r * (1.0 - opts.eps_rel);
        self.collect_where(gauge, r, opts, |g| g < limit)
    }

    /// All nonzero lattice points with `lo ≤ gauge ≤ hi`.
    pub fn enumerate_shell<G: Gauge<D> + ?Sized>(
        &self,
        gauge: &G,
        lo: f64,
        hi: f64,
        opts: &EnumOptions,
    ) -> Result<Vec<LatticePoint<D>>> {
        self.collect_where(gauge, hi, opts, |g| g >= lo && g <= hi)
    }

    fn collect_where<G: Gauge<D> + ?Sized>(
        &self,
        gauge: &G,
        r: f64,
        opts: &EnumOptions,
        keep: impl Fn(f64) -> bool,
    ) -> Result<Vec<LatticePoint<D>>> {
        let ext = gauge.extent();
        let half: [f64; D] = std::array::from_fn(|i| ext[i] * r);
        let mut out = Vec::new();
        let mut overflow = false;
        self.visit_box(&half, opts.cap, |c, v| {
            let g = gauge.value(v);
            if keep(g) {
                if out.len() >= opts.cap {
                    overflow = true;
                    return ControlFlow::Break(());
                }
                out.push(LatticePoint { coeffs: *c, vector: *v, gauge: g });
            }
            ControlFlow::Continue(())
        })?;
        if overflow {
            return Err(Error::Capacity { requested: opts.cap as u128 + 1, cap: opts.cap });
        }
        Ok(out)
    }

    /// True iff no nonzero lattice point has `gauge < r·(1 − eps_rel)`.
    pub fn is_admissible<G: Gauge<D> + ?Sized>(&self, gauge: &G, r: f64, opts: &EnumOptions) -> Result<bool> {
        if !(r > 0.0) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
        }
        Ok(self.first_violation(gauge, r, opts)?.is_none())
    }

    /// Some nonzero lattice point strictly inside the ball of radius `r`, if any.
    pub fn first_violation<G: Gauge<D> + ?Sized>(
        &self,
        gauge: &G,
        r: f64,
        opts: &EnumOptions,
    ) -> Result<Option<LatticePoint<D>>> {
        let ext = gauge.extent();
        let half: [f64; D] = std::array::from_fn(|i| ext[i] * r);
        let limit = r * (1.0 - opts.eps_rel);
        let mut found = None;
        self.visit_box(&half, opts.cap, |c, v| {
            let g = gauge.value(v);
            if g < limit {
                found = Some(LatticePoint { coeffs: *c, vector: *v, gauge: g });
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })?;
        Ok(found)
    }

    /// A nonzero vector of minimal gauge. Among vectors whose gauge agrees
    /// with the minimum to 1e-12 relative, the one with lexicographically
    /// smallest coefficients is returned, after choosing the sign of `±v`
    /// that makes its first nonzero coefficient positive.
    pub fn shortest_gauge_vector<G: Gauge<D> + ?Sized>(&self, gauge: &G) -> Result<(LatticePoint<D>, f64)> {
        let reduced = self.lll();
        let upper = (0..D)
            .map(|j| gauge.value(&reduced.lattice.column(j)))
            .fold(f64::INFINITY, f64::min);
        let opts = EnumOptions::default();
        let radius = upper * (1.0 + 1e-9);
        let points = self.collect_where(gauge, radius, &opts, |g| g <= radius)?;
        let best = points.iter().map(|p| p.gauge).fold(f64::INFINITY, f64::min);
        let tie = best * (1.0 + 1e-12);
        let chosen = points
            .into_iter()
            .filter(|p| p.gauge <= tie)
            .map(canonical_sign)
            .min_by(|a, b| a.coeffs.cmp(&b.coeffs))
            .ok_or_else(|| Error::Degenerate("no nonzero vector found below a basis vector".into()))?;
        Ok((chosen, best))
    }
}

fn canonical_sign<const D: usize>(p: LatticePoint<D>) -> LatticePoint<D> {
    match p.coeffs.iter().find(|&&c| c != 0) {
        Some(&c) if c < 0 => LatticePoint {
            coeffs: p.coeffs.map(|x| -x),
            vector: p.vector.map(|x| -x),
            gauge: p.gauge,
        },
        _ => p,
    }
}

impl Lattice<2> {
    /// Lagrange–Gauss reduction: `‖b₁‖ ≤ ‖b₂‖` and `|⟨b₁, b₂⟩| ≤ ‖b₁‖²/2`.
    pub fn gauss_reduce(&self) -> Reduced<2> {
        let mut c = [[1i64, 0], [0, 1]];
        let vec = |c: &[i64; 2]| self.point(c);
        let mut b = [vec(&c[0]), vec(&c[1])];
        for _ in 0..10_000 {
            if linalg::dot(&b[0], &b[0]) > linalg::dot(&b[1], &b[1]) {
                b.swap(0, 1);
                c.swap(0, 1);
            }
            let mu = (linalg::dot(&b[0], &b[1]) / linalg::dot(&b[0], &b[0])).round();
            if mu == 0.0 {
                break;
            }
            let m = mu as i64;
            c[1] = [c[1][0] - m * c[0][0], c[1][1] - m * c[0][1]];
            b[1] = vec(&c[1]);
        }
        let change = [[c[0][0], c[1][0]], [c[0][1], c[1][1]]];
        Reduced { lattice: Lattice { basis: linalg::from_columns(&b) }, change }
    }
}

/// LLL reduction acting on integer coefficient vectors.
///
/// `coeffs[k]` holds the integer coordinates of the k-th basis vector with
/// respect to some fixed reference basis, and `embed` maps coordinates to the
/// actual vector. Real vectors are recomputed through `embed` after every
/// integer update, so the precision of the result is that of `embed` rather
/// than of accumulated floating point row operations.
pub(crate) fn lll_coefficients<const D: usize, F>(coeffs: &mut [[i128; D]; D], embed: F, delta: f64)
where
    F: Fn(&[i128; D]) -> [f64; D],
{
    let mut vecs: [[f64; D]; D] = std::array::from_fn(|k| embed(&coeffs[k]));
    let mut k = 1;
    let mut steps = 0;
    while k < D && steps < 100_000 {
        steps += 1;
        for _ in 0..64 {
            let mut changed = false;
            for j in (0..k).rev() {
                let (mu, _) = gram_schmidt(&vecs);
                let m = mu[k][j];
                if m.abs() > 0.5 + 1e-9 && m.is_finite() {
                    let r = m.round() as i128;
                    for i in 0..D {
                        coeffs[k][i] -= r * coeffs[j][i];
                    }
                    vecs[k] = embed(&coeffs[k]);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let (mu, norms) = gram_schmidt(&vecs);
        if norms[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1] {
            k += 1;
        } else {
            coeffs.swap(k, k - 1);
            vecs.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
}

/// Gram–Schmidt coefficients `μ[i][j]` and squared norms `‖b*_i‖²`.
fn gram_schmidt<const D: usize>(vecs: &[[f64; D]; D]) -> ([[f64; D]; D], [f64; D]) {
    let mut star = *vecs;
    let mut mu = [[0.0; D]; D];
    let mut norms = [0.0; D];
    for i in 0..D {
        for j in 0..i {
            mu[i][j] = linalg::dot(&vecs[i], &star[j]) / norms[j];
            for k in 0..D {
                star[i][k] -= mu[i][j] * star[j][k];
            }
        }
        norms[i] = linalg::dot(&star[i], &star[i]);
    }
    (mu, norms)
}

/// Parses the command line lattice literal: rows of the basis matrix
/// separated by `;`, e.g. `[1,0.5,0;0,0.866,0;0,0,1]` (columns are the basis
/// vectors).
pub fn parse_lattice<const D: usize>(s: &str) -> Result<Lattice<D>> {
    let rows = crate::parse::parse_rows(s, s, 0)?;
    if rows.len() != D || rows.iter().any(|r| r.len() != D) {
        return Err(Error::parse(s, 0, format!("expected a {D}x{D} matrix")));
    }
    let m: Matrix<D> = std::array::from_fn(|i| std::array::from_fn(|j| rows[i][j]));
    Lattice::new(m)
}
