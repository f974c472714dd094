//! Critical determinant and critical lattices of a planar convex symmetric
//! domain via inscribed hexagons.
//!
//! For a boundary point `q` there is a boundary point `r`, a bit further
//! counter-clockwise, with `q − r` also on the boundary. The lattice `Zq + Zr`
//! is then admissible and touches the boundary in the six points `±q, ±r,
//! ±(q − r)`. Every critical lattice arises this way, so `Δ(B)` is the minimum
//! of `|det[q r]|` over the position of `q`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{EnumOptions, Lattice2};
use crate::norm2::{ConvexDomain2, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HexagonConfig {
    /// Angle of `q` on the boundary.
    pub theta: f64,
    pub q: Point2,
    pub r: Point2,
    /// `q − r`.
    pub p: Point2,
    pub det_value: f64,
}

impl HexagonConfig {
    /// The lattice `Zq + Zr`.
    pub fn lattice(&self) -> Result<Lattice2> {
        Lattice2::from_columns([self.q, self.r])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalDeterminant {
    pub delta: f64,
    pub argmin: HexagonConfig,
}

/// Solves `ν(q − r) = 1` for `r` on the boundary, with `q` at angle `theta`.
pub fn hexagon_partner(domain: &ConvexDomain2, theta: f64) -> Result<HexagonConfig> {
    if domain.is_parallelogram() {
        return Err(Error::Parallelogram);
    }
    let q = domain.boundary_point(theta);
    let f = |phi: f64| {
        let r = domain.boundary_point(phi);
        domain.gauge(&[q[0] - r[0], q[1] - r[1]]) - 1.0
    };

    let (mut lo, mut hi) = (theta + PI / 6.0, theta + 5.0 * PI / 6.0);
    let (mut f_lo, mut f_hi) = (f(lo), f(hi));
    let mut widen = 1;
    while !(f_lo < 0.0 && f_hi >= 0.0) && widen <= 40 {
        let gap = PI / 6.0 * 0.5f64.powi(widen);
        lo = theta + gap;
        hi = theta + PI - gap;
        f_lo = f(lo);
        f_hi = f(hi);
        widen += 1;
    }
    if !(f_lo < 0.0 && f_hi >= 0.0) {
        return Err(Error::NoSolution { theta, lo, hi, f_lo, f_hi });
    }

    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm < 0.0 {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }
    let phi = if f_lo.abs() <= f_hi.abs() { lo } else { hi };
    let r = domain.boundary_point(phi);
    let p = [q[0] - r[0], q[1] - r[1]];
    Ok(HexagonConfig { theta, q, r, p, det_value: (q[0] * r[1] - q[1] * r[0]).abs() })
}

fn det_at(domain: &ConvexDomain2, theta: f64) -> f64 {
    hexagon_partner(domain, theta).map(|c| c.det_value).unwrap_or(f64::INFINITY)
}

/// Golden-section minimization of the hexagon determinant on `[a, b]`.
fn golden_min(domain: &ConvexDomain2, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (det_at(domain, c), det_at(domain, d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = det_at(domain, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = det_at(domain, d);
        }
    }
    0.5 * (a + b)
}

/// The hexagon determinant sampled on `θ_i = iπ/n`.
fn sweep(domain: &ConvexDomain2, n: usize) -> Result<Vec<HexagonConfig>> {
    (0..n)
        .into_par_iter()
        .map(|i| hexagon_partner(domain, PI * i as f64 / n as f64))
        .collect()
}

/// Indices of cyclic local minima of the sweep, best first.
fn local_minima(sweep: &[HexagonConfig]) -> Vec<usize> {
    let n = sweep.len();
    let mut idx: Vec<usize> = (0..n)
        .filter(|&i| {
            let v = sweep[i].det_value;
            v <= sweep[(i + n - 1) % n].det_value && v <= sweep[(i + 1) % n].det_value
        })
        .collect();
    idx.sort_by(|&a, &b| sweep[a].det_value.total_cmp(&sweep[b].det_value));
    idx
}

fn refine(domain: &ConvexDomain2, sweep: &[HexagonConfig], i: usize) -> Result<HexagonConfig> {
    let h = PI / sweep.len() as f64;
    let theta = golden_min(domain, sweep[i].theta - h, sweep[i].theta + h, 1e-12);
    let refined = hexagon_partner(domain, theta)?;
    Ok(if refined.det_value <= sweep[i].det_value { refined } else { sweep[i] })
}

/// `Δ(B)` and a hexagon configuration realizing it.
///
/// Samples `grid_n` positions of `q` on `[0, π)`, then refines the four
/// best local minima by golden-section search to 1e-12 in angle.
pub fn critical_determinant_2d(domain: &ConvexDomain2, grid_n: usize) -> Result<CriticalDeterminant> {
    if domain.is_parallelogram() {
        return Err(Error::Parallelogram);
    }
    if grid_n < 64 {
        return Err(Error::InvalidArgument(format!("grid_n must be >= 64, got {grid_n}")));
    }
    let sweep = sweep(domain, grid_n)?;
    let mut best: Option<HexagonConfig> = None;
    for &i in local_minima(&sweep).iter().take(4) {
        let c = refine(domain, &sweep, i)?;
        if best.is_none_or(|b| c.det_value < b.det_value) {
            best = Some(c);
        }
    }
    let argmin = best.ok_or_else(|| Error::Degenerate("empty hexagon sweep".into()))?;
    let lattice = argmin.lattice()?;
    if let Some(v) = lattice.first_violation(domain, 1.0, &EnumOptions::default())? {
        return Err(Error::NotCritical {
            covolume: argmin.det_value,
            expected: argmin.det_value,
            violating: Some([v.vector[0], v.vector[1], 0.0]),
        });
    }
    Ok(CriticalDeterminant { delta: argmin.det_value, argmin })
}

/// `n_samples` critical lattices of `domain`.
///
/// Sweeps `q` around the boundary and keeps configurations whose determinant
/// is within a relative 1e-9 of `Δ`. When the minimum is a plateau (the disk)
/// the samples are spread evenly along it; otherwise the isolated minimizers
/// are cycled through.
pub fn critical_locus_2d(domain: &ConvexDomain2, n_samples: usize) -> Result<Vec<Lattice2>> {
    let grid_n = (4 * n_samples).max(512);
    let crit = critical_determinant_2d(domain, grid_n)?;
    let delta = crit.delta;
    let keep = delta * (1.0 + 1e-9);
    let sweep = sweep(domain, grid_n)?;

    let plateau: Vec<HexagonConfig> = sweep.iter().copied().filter(|c| c.det_value <= keep).collect();
    let chosen: Vec<HexagonConfig> = if plateau.len() >= n_samples {
        (0..n_samples).map(|k| plateau[k * plateau.len() / n_samples]).collect()
    } else {
        let mut minima = plateau;
        for i in local_minima(&sweep) {
            let c = refine(domain, &sweep, i)?;
            if c.det_value <= keep && !minima.iter().any(|m| (m.theta - c.theta).abs() < 1e-7) {
                minima.push(c);
            }
        }
        if minima.is_empty() {
            minima.push(crit.argmin);
        }
        minima.sort_by(|a, b| a.theta.total_cmp(&b.theta));
        (0..n_samples).map(|k| minima[k % minima.len()]).collect()
    };

    let opts = EnumOptions::default();
    let mut out = Vec::with_capacity(n_samples);
    for c in chosen {
        let l = c.lattice()?;
        if (l.covolume() - delta).abs() <= 1e-9 && l.is_admissible(domain, 1.0, &opts)? {
            out.push(l);
        }
    }
    if out.is_empty() && n_samples > 0 {
        return Err(Error::Degenerate("no admissible configuration at the minimum".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    const SQRT3_2: f64 = 0.866_025_403_784_438_6;

    fn close(a: Point2, b: Point2, tol: f64) -> bool {
        (a[0] - b[0]).abs() <= tol && (a[1] - b[1]).abs() <= tol
    }

    #[test]
    fn disk_partner_at_zero() {
        let c = hexagon_partner(&ConvexDomain2::euclidean(), 0.0).unwrap();
        assert!(close(c.q, [1.0, 0.0], 1e-15));
        assert!(close(c.r, [0.5, SQRT3_2], 1e-12));
        assert!(close(c.p, [0.5, -SQRT3_2], 1e-12));
    }

    #[test]
    fn disk_partner_is_rotation_covariant() {
        let base = hexagon_partner(&ConvexDomain2::euclidean(), 0.0).unwrap();
        let t = PI / 3.0;
        let rot = |v: Point2| [t.cos() * v[0] - t.sin() * v[1], t.sin() * v[0] + t.cos() * v[1]];
        let c = hexagon_partner(&ConvexDomain2::euclidean(), t).unwrap();
        assert!(close(c.q, rot(base.q), 1e-12));
        assert!(close(c.r, rot(base.r), 1e-12));
        assert!(close(c.p, rot(base.p), 1e-12));
    }

    #[test]
    fn p4_partner_residuals() {
        let d = ConvexDomain2::p_norm(4.0).unwrap();
        let c = hexagon_partner(&d, 0.0).unwrap();
        for v in [c.q, c.r, c.p] {
            assert!((d.gauge(&v) - 1.0).abs() < 1e-9);
        }
        assert_eq!(c.p, [c.q[0] - c.r[0], c.q[1] - c.r[1]]);
    }

    #[test]
    fn parallelograms_are_rejected() {
        assert!(matches!(hexagon_partner(&ConvexDomain2::sup(), 0.3), Err(Error::Parallelogram)));
        assert!(matches!(critical_determinant_2d(&ConvexDomain2::sup(), 64), Err(Error::Parallelogram)));
    }

    #[test]
    fn disk_critical_determinant() {
        let c = critical_determinant_2d(&ConvexDomain2::euclidean(), 512).unwrap();
        assert!((c.delta - SQRT3_2).abs() < 1e-9);
        let p2 = critical_determinant_2d(&ConvexDomain2::p_norm(2.0).unwrap(), 512).unwrap();
        assert!((p2.delta - c.delta).abs() < 1e-9);
    }

    #[test]
    fn ellipse_scales_with_det() {
        let g = [[1.7, 0.4], [-0.3, 0.8]];
        let d = ConvexDomain2::linear_image(g, ConvexDomain2::euclidean()).unwrap();
        let c = critical_determinant_2d(&d, 256).unwrap();
        assert!((c.delta - linalg::det(&g).abs() * SQRT3_2).abs() < 1e-9);
    }

    #[test]
    fn disk_locus_is_rotated_hexagonal() {
        let e = ConvexDomain2::euclidean();
        let locus = critical_locus_2d(&e, 6).unwrap();
        assert_eq!(locus.len(), 6);
        let opts = EnumOptions::default();
        for l in &locus {
            assert!((l.covolume() - SQRT3_2).abs() < 1e-9);
            // x ↦ −x and rotation by π/3 keep each lattice in the locus
            let neg = l.transformed(&[[-1.0, 0.0], [0.0, -1.0]]).unwrap();
            assert!(neg.same_lattice(l, 1e-9));
            let t = PI / 3.0;
            let rot = l.transformed(&[[t.cos(), -t.sin()], [t.sin(), t.cos()]]).unwrap();
            assert!(rot.same_lattice(l, 1e-9));
            assert!(rot.is_admissible(&e, 1.0, &opts).unwrap());
            // shortest vectors all have length one
            let [a, b] = l.columns();
            assert!((linalg::norm2(&a) - 1.0).abs() < 1e-12 && (linalg::norm2(&b) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn p4_locus_is_admissible_at_delta() {
        let d = ConvexDomain2::p_norm(4.0).unwrap();
        let delta = critical_determinant_2d(&d, 512).unwrap().delta;
        let locus = critical_locus_2d(&d, 8).unwrap();
        assert_eq!(locus.len(), 8);
        for l in locus {
            assert!((l.covolume() - delta).abs() < 1e-9);
            assert!(l.enumerate_in_ball(&d, 1.0, &EnumOptions::default()).unwrap().is_empty());
        }
    }

    #[test]
    fn exactly_six_boundary_points() {
        let domains = [
            ConvexDomain2::euclidean(),
            ConvexDomain2::p_norm(4.0).unwrap(),
            ConvexDomain2::p_norm(1.5).unwrap(),
            "lin:[1.2,0.5;0,0.9]:p:3".parse().unwrap(),
        ];
        for d in &domains {
            for k in 0..12 {
                let c = hexagon_partner(d, k as f64 * 0.26).unwrap();
                let pts = c.lattice().unwrap().enumerate_in_ball(d, 1.5, &EnumOptions::default()).unwrap();
                let near: Vec<_> = pts.iter().filter(|p| p.gauge <= 1.0 + 1e-9).collect();
                assert_eq!(near.len(), 6, "{d} at k = {k}");
                for v in [c.p, c.q, c.r] {
                    assert!(near.iter().any(|p| close(p.vector, v, 1e-9)));
                }
            }
        }
    }

    #[test]
    fn minkowski_bounds() {
        let domains = [
            ConvexDomain2::euclidean(),
            ConvexDomain2::p_norm(4.0).unwrap(),
            ConvexDomain2::p_norm(1.5).unwrap(),
            "poly:[1,0;0.7,0.7;0,1;-0.7,0.7;-1,0;-0.7,-0.7;0,-1;0.7,-0.7]".parse().unwrap(),
            "lin:[1.2,0.5;0,0.9]:p:3".parse().unwrap(),
        ];
        for d in &domains {
            let delta = critical_determinant_2d(d, 512).unwrap().delta;
            let area = d.area(1 << 16);
            assert!(area / 4.0 <= delta + 1e-9, "{d}: {delta} vs area {area}");
            assert!(delta <= area / 3.46, "{d}: {delta} vs area {area}");
        }
    }
}
