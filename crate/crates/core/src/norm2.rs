//! Planar convex symmetric domains described by their gauge (Minkowski
//! functional), and the cylinder gauge `max(ν(x₁, x₂), |x₃|)` on R³.
//!
//! All unit balls are open: a point `x` lies in the domain iff `gauge(x) < 1`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat2};
use crate::parse;

pub type Point2 = [f64; 2];
pub type Point3 = [f64; 3];

/// A symmetric gauge on R^D together with the half-widths of the axis-aligned
/// box enclosing its closed unit ball.
pub trait Gauge<const D: usize>: Sync {
    fn value(&self, x: &[f64; D]) -> f64;

    /// `extent()[i]` is the maximum of `|x_i|` over the closed unit ball.
    fn extent(&self) -> [f64; D];
}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    Euclidean,
    Sup,
    PNorm(f64),
    Polygon(Vec<Point2>),
    LinearImage { g: Mat2, inner: Box<ConvexDomain2> },
}

/// A planar convex, centrally symmetric, bounded open domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexDomain2 {
    kind: DomainKind,
    is_parallelogram: bool,
    // Polygon: outward edge normals scaled so that n·x = 1 on the edge.
    normals: Vec<Point2>,
    // LinearImage: g⁻¹.
    g_inv: Option<Mat2>,
    // Upper bound on the Euclidean length of points in the closed unit ball.
    max_radius: f64,
}

impl ConvexDomain2 {
    pub fn euclidean() -> Self {
        Self::plain(DomainKind::Euclidean, false, 1.0)
    }

    /// The open unit square `max(|x|, |y|) < 1`.
    pub fn sup() -> Self {
        Self::plain(DomainKind::Sup, true, 2f64.sqrt())
    }

    /// The unit ball of the ℓ^p norm, `p > 1`.
    pub fn p_norm(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidArgument(format!("p-norm needs finite p > 1, got {p}")));
        }
        // max |x|₂ on the ℓ^p sphere is attained on an axis (p ≤ 2) or a diagonal (p ≥ 2)
        let max_radius = if p >= 2.0 { 2f64.sqrt() * 2f64.powf(-1.0 / p) } else { 1.0 };
        Ok(Self::plain(DomainKind::PNorm(p), false, max_radius))
    }

    /// The open convex hull of `vertices`, which must be centrally symmetric.
    /// Exactly four vertices make a parallelogram.
    pub fn polygon(vertices: Vec<Point2>) -> Result<Self> {
        let n = vertices.len();
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "a symmetric polygon needs an even number >= 4 of vertices, got {n}"
            )));
        }
        let scale = vertices.iter().map(linalg::norm2).fold(0.0, f64::max);
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::InvalidArgument("degenerate polygon".into()));
        }
        for v in &vertices {
            let has_opposite = vertices
                .iter()
                .any(|w| (v[0] + w[0]).abs() + (v[1] + w[1]).abs() <= 1e-9 * scale);
            if !has_opposite {
                return Err(Error::InvalidArgument(format!(
                    "polygon is not centrally symmetric: no vertex opposite {v:?}"
                )));
            }
        }
        let mut sorted = vertices;
        sorted.sort_by(|a, b| a[1].atan2(a[0]).total_cmp(&b[1].atan2(b[0])));
        let mut normals = Vec::with_capacity(n);
        for i in 0..n {
            let a = sorted[i];
            let b = sorted[(i + 1) % n];
            let m = [a, b];
            let inv = linalg::inverse(&m).ok_or_else(|| {
                Error::InvalidArgument(format!("polygon edge {a:?} -> {b:?} passes through the origin"))
            })?;
            // n solves a·n = 1, b·n = 1
            let normal = linalg::mat_vec(&inv, &[1.0, 1.0]);
            normals.push(normal);
        }
        for nrm in &normals {
            for v in &sorted {
                if linalg::dot(nrm, v) > 1.0 + 1e-9 {
                    return Err(Error::InvalidArgument(format!(
                        "vertices are not in convex position (vertex {v:?})"
                    )));
                }
            }
        }
        Ok(ConvexDomain2 {
            kind: DomainKind::Polygon(sorted),
            is_parallelogram: n == 4,
            normals,
            g_inv: None,
            max_radius: scale,
        })
    }

    /// The image `g·inner` under a nonsingular linear map.
    pub fn linear_image(g: Mat2, inner: ConvexDomain2) -> Result<Self> {
        let det = linalg::det(&g);
        let g_inv = linalg::inverse(&g)
            .filter(|_| det.abs() > 1e-300 && det.is_finite())
            .ok_or(Error::Singular { det })?;
        let op_norm = frobenius(&g);
        Ok(ConvexDomain2 {
            is_parallelogram: inner.is_parallelogram,
            max_radius: op_norm * inner.max_radius,
            kind: DomainKind::LinearImage { g, inner: Box::new(inner) },
            normals: Vec::new(),
            g_inv: Some(g_inv),
        })
    }

    fn plain(kind: DomainKind, is_parallelogram: bool, max_radius: f64) -> Self {
        ConvexDomain2 { kind, is_parallelogram, normals: Vec::new(), g_inv: None, max_radius }
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn is_parallelogram(&self) -> bool {
        self.is_parallelogram
    }

    /// An upper bound on `‖x‖₂` over the closed unit ball, so that
    /// `gauge(x) ≥ ‖x‖₂ / max_radius()`.
    pub fn max_radius(&self) -> f64 {
        self.max_radius
    }

    pub fn gauge(&self, x: &Point2) -> f64 {
        match &self.kind {
            DomainKind::Euclidean => x[0].hypot(x[1]),
            DomainKind::Sup => x[0].abs().max(x[1].abs()),
            DomainKind::PNorm(p) => p_norm(x, *p),
            DomainKind::Polygon(_) => self
                .normals
                .iter()
                .map(|n| linalg::dot(n, x))
                .fold(0.0, f64::max),
            DomainKind::LinearImage { inner, .. } => {
                let y = linalg::mat_vec(self.g_inv.as_ref().unwrap(), x);
                inner.gauge(&y)
            }
        }
    }

    /// Support function `h(u) = max { ⟨u, x⟩ : gauge(x) ≤ 1 }`, i.e. the
    /// gauge of the polar body.
    pub fn support(&self, u: &Point2) -> f64 {
        match &self.kind {
            DomainKind::Euclidean => u[0].hypot(u[1]),
            DomainKind::Sup => u[0].abs() + u[1].abs(),
            DomainKind::PNorm(p) => p_norm(u, *p / (*p - 1.0)),
            DomainKind::Polygon(vertices) => vertices
                .iter()
                .map(|v| linalg::dot(u, v))
                .fold(f64::NEG_INFINITY, f64::max),
            DomainKind::LinearImage { g, inner } => {
                let gt_u = linalg::mat_vec(&linalg::transpose(g), u);
                inner.support(&gt_u)
            }
        }
    }

    /// The boundary point in direction `theta`.
    pub fn boundary_point(&self, theta: f64) -> Point2 {
        let u = [theta.cos(), theta.sin()];
        let g = self.gauge(&u);
        [u[0] / g, u[1] / g]
    }

    /// Area of the domain, by composite Simpson quadrature of `½∫ρ(θ)² dθ`
    /// where `ρ` is the radial function of the boundary parametrization.
    pub fn area(&self, intervals: usize) -> f64 {
        let n = intervals.max(2).next_multiple_of(2);
        let h = 2.0 * PI / n as f64;
        let rho2 = |i: usize| {
            let p = self.boundary_point(i as f64 * h);
            p[0] * p[0] + p[1] * p[1]
        };
        let mut sum = rho2(0) + rho2(n);
        for i in 1..n {
            sum += if i % 2 == 1 { 4.0 } else { 2.0 } * rho2(i);
        }
        0.5 * sum * h / 3.0
    }

    /// Exact area for parallelogram domains (used as `4Δ`).
    pub(crate) fn parallelogram_area(&self) -> Option<f64> {
        match &self.kind {
            DomainKind::Sup => Some(4.0),
            DomainKind::Polygon(v) if v.len() == 4 => {
                let twice: f64 = (0..4)
                    .map(|i| {
                        let (a, b) = (v[i], v[(i + 1) % 4]);
                        a[0] * b[1] - a[1] * b[0]
                    })
                    .sum();
                Some(0.5 * twice.abs())
            }
            DomainKind::LinearImage { g, inner } => {
                inner.parallelogram_area().map(|a| a * linalg::det(g).abs())
            }
            _ => None,
        }
    }
}

fn p_norm(x: &Point2, p: f64) -> f64 {
    let (a, b) = (x[0].abs(), x[1].abs());
    let m = a.max(b);
    if m == 0.0 {
        return 0.0;
    }
    m * ((a / m).powf(p) + (b / m).powf(p)).powf(1.0 / p)
}

fn frobenius(g: &Mat2) -> f64 {
    g.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

impl Gauge<2> for ConvexDomain2 {
    fn value(&self, x: &[f64; 2]) -> f64 {
        self.gauge(x)
    }

    fn extent(&self) -> [f64; 2] {
        [self.support(&[1.0, 0.0]), self.support(&[0.0, 1.0])]
    }
}

/// `η(x₁, x₂, x₃) = max(ν(x₁, x₂), |x₃|)`, the gauge of the cylinder `B × (−1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderGauge {
    pub base: ConvexDomain2,
}

impl CylinderGauge {
    pub fn new(base: ConvexDomain2) -> Self {
        CylinderGauge { base }
    }

    pub fn eval(&self, x: &Point3) -> f64 {
        self.base.gauge(&[x[0], x[1]]).max(x[2].abs())
    }
}

impl Gauge<3> for CylinderGauge {
    fn value(&self, x: &[f64; 3]) -> f64 {
        self.eval(x)
    }

    fn extent(&self) -> [f64; 3] {
        let [a, b] = self.base.extent();
        [a, b, 1.0]
    }
}

impl FromStr for ConvexDomain2 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_domain(s, s, 0)
    }
}

fn parse_domain(s: &str, full: &str, offset: usize) -> Result<ConvexDomain2> {
    let t = s.trim();
    let lead = offset + (s.len() - s.trim_start().len());
    if t == "euclidean" {
        return Ok(ConvexDomain2::euclidean());
    }
    if t == "sup" {
        return Ok(ConvexDomain2::sup());
    }
    if let Some(rest) = t.strip_prefix("p:") {
        let p = parse::parse_real(rest.trim(), full, lead + 2)?;
        return ConvexDomain2::p_norm(p).map_err(|e| Error::parse(full, lead + 2, e.to_string()));
    }
    if let Some(rest) = t.strip_prefix("poly:") {
        let rows = parse::parse_rows(rest, full, lead + 5)?;
        let mut vertices = Vec::with_capacity(rows.len());
        for row in rows {
            match row[..] {
                [x, y] => vertices.push([x, y]),
                _ => return Err(Error::parse(full, lead + 5, "polygon vertices need two coordinates")),
            }
        }
        return ConvexDomain2::polygon(vertices).map_err(|e| Error::parse(full, lead + 5, e.to_string()));
    }
    if let Some(rest) = t.strip_prefix("lin:") {
        let close = parse::closing_bracket(rest)
            .ok_or_else(|| Error::parse(full, lead + 4, "unterminated matrix literal"))?;
        let rows = parse::parse_rows(&rest[..=close], full, lead + 4)?;
        let g = match rows[..] {
            [ref r0, ref r1] if r0.len() == 2 && r1.len() == 2 => [[r0[0], r0[1]], [r1[0], r1[1]]],
            _ => return Err(Error::parse(full, lead + 4, "expected a 2x2 matrix")),
        };
        let tail = &rest[close + 1..];
        let inner_src = tail
            .strip_prefix(':')
            .ok_or_else(|| Error::parse(full, lead + 5 + close, "expected `:<inner-spec>`"))?;
        let inner = parse_domain(inner_src, full, lead + 6 + close)?;
        return ConvexDomain2::linear_image(g, inner)
            .map_err(|e| Error::parse(full, lead + 4, e.to_string()));
    }
    Err(Error::parse(full, lead, format!("unknown norm spec `{t}`")))
}

impl fmt::Display for ConvexDomain2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DomainKind::Euclidean => write!(f, "euclidean"),
            DomainKind::Sup => write!(f, "sup"),
            DomainKind::PNorm(p) => write!(f, "p:{p}"),
            DomainKind::Polygon(v) => {
                let body: Vec<String> = v.iter().map(|p| format!("{},{}", p[0], p[1])).collect();
                write!(f, "poly:[{}]", body.join(";"))
            }
            DomainKind::LinearImage { g, inner } => {
                write!(f, "lin:[{},{};{},{}]:{}", g[0][0], g[0][1], g[1][0], g[1][1], inner)
            }
        }
    }
}
