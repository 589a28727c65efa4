//! The measure dμ = dx dy / y² on the rank-2 fundamental domain
//! F = {0 ≤ x ≤ 1/2, x² + y² ≥ 1}.

use crate::error::{Error, Result};
use crate::shape::{UHPoint, BOUNDARY_TOL};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// μ(F) = π/6.
pub const MU_TOTAL: f64 = PI / 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x1: f64,
    pub x2: f64,
    pub y1: f64,
    /// May be +∞.
    pub y2: f64,
}

impl Rect {
    pub fn new(x1: f64, x2: f64, y1: f64, y2: f64) -> Self {
        Rect { x1, x2, y1, y2 }
    }

    pub fn contains(&self, p: &UHPoint) -> bool {
        p.x >= self.x1 && p.x <= self.x2 && p.y >= self.y1 && p.y <= self.y2
    }
}

/// Finite union of rectangles, each implicitly intersected with F.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rank2Region {
    pub rects: Vec<Rect>,
}

impl Rank2Region {
    pub fn rect(x1: f64, x2: f64, y1: f64, y2: f64) -> Self {
        Rank2Region { rects: vec![Rect::new(x1, x2, y1, y2)] }
    }

    pub fn full() -> Self {
        Self::rect(0.0, 0.5, 0.0, f64::INFINITY)
    }

    pub fn contains(&self, p: &UHPoint) -> bool {
        self.rects.iter().any(|r| r.contains(p))
    }
}

fn inv(y: f64) -> f64 {
    if y.is_infinite() {
        0.0
    } else {
        1.0 / y
    }
}

/// ∫ (1/√(1−x²) − 1/y2) dx over [u, v].
fn arc_part(u: f64, v: f64, y2: f64) -> f64 {
    if v <= u {
        return 0.0;
    }
    (v.asin() - u.asin()) - (v - u) * inv(y2)
}

/// μ of one rectangle intersected with F, in closed form.
pub fn rect_measure(r: &Rect) -> f64 {
    let x1 = r.x1.max(0.0);
    let x2 = r.x2.min(0.5);
    let y1 = r.y1.max(0.0);
    let y2 = r.y2;
    if x2 <= x1 || y2 <= y1 {
        return 0.0;
    }
    // lower boundary on [x1,x2] is max(y1, √(1−x²)), decreasing in x
    let xb = if y2 < 1.0 { (1.0 - y2 * y2).sqrt() } else { 0.0 };
    let xa = if y1 < 1.0 { (1.0 - y1 * y1).sqrt() } else { 0.0 };
    let mut total = 0.0;
    // [max(x1,xb), min(x2,xa)]: lower boundary is the circle
    let u = x1.max(xb);
    let v = x2.min(xa);
    if v > u {
        total += arc_part(u, v, y2);
    }
    // [max(x1,xa), x2]: lower boundary is y1
    let u2 = x1.max(xa).max(xb);
    if x2 > u2 {
        total += (x2 - u2) * (inv(y1) - inv(y2));
    }
    total.max(0.0)
}

/// μ(W); rectangles are assumed disjoint up to measure zero.
pub fn mu_measure(w: &Rank2Region) -> f64 {
    w.rects.iter().map(rect_measure).sum()
}

/// Adaptive Simpson integration of the μ-density over a rectangle ∩ F,
/// used as an independent check of the closed form. The y-integral is done
/// analytically; the outer x-integral numerically.
pub fn mu_measure_numeric(r: &Rect, tol: f64) -> f64 {
    let x1 = r.x1.max(0.0);
    let x2 = r.x2.min(0.5);
    if x2 <= x1 {
        return 0.0;
    }
    let g = |x: f64| {
        let lo = r.y1.max((1.0 - x * x).sqrt());
        if lo >= r.y2 {
            0.0
        } else {
            1.0 / lo - inv(r.y2)
        }
    };
    adaptive_simpson(&g, x1, x2, tol, 50)
}

pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64, whole: f64, m: f64, fm: f64, tol: f64, depth: u32) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1) + rec(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, whole, m, fm, tol, depth)
}

/// Closed-form marginals of the normalized measure.
pub fn cdf_x(t: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&t) {
        return Err(Error::OutsideDomain { x: t, y: f64::NAN });
    }
    if t == 0.5 {
        return Ok(1.0);
    }
    Ok(6.0 * t.asin() / PI)
}

/// P(Y > t) = 3/(πt) for t ≥ 1.
pub fn tail_y(t: f64) -> Result<f64> {
    if !(t >= 1.0) {
        return Err(Error::OutsideDomain { x: f64::NAN, y: t });
    }
    Ok(3.0 / (PI * t))
}

pub type Marginal = fn(f64) -> Result<f64>;

/// Both marginals as plain functions.
pub fn marginal_cdfs() -> (Marginal, Marginal) {
    (cdf_x, tail_y)
}

/// kx column strips of equal mass, each split into ky cells of equal mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub kx: usize,
    pub ky: usize,
    /// kx + 1 breakpoints from 0 to 1/2.
    pub x_breaks: Vec<f64>,
    /// For each strip, ky + 1 breakpoints from the strip floor to +∞.
    pub y_breaks: Vec<Vec<f64>>,
    /// Cell masses indexed by column·ky + row.
    pub masses: Vec<f64>,
}

impl PartitionSpec {
    pub fn cells(&self) -> usize {
        self.kx * self.ky
    }

    pub fn cell_rect(&self, idx: usize) -> Rect {
        let (j, k) = (idx / self.ky, idx % self.ky);
        Rect::new(self.x_breaks[j], self.x_breaks[j + 1], self.y_breaks[j][k], self.y_breaks[j][k + 1])
    }
}

pub fn equal_measure_partition(kx: usize, ky: usize) -> Result<PartitionSpec> {
    if kx == 0 || ky == 0 {
        return Err(Error::InvalidTask("partition sizes must be positive".into()));
    }
    let mut x_breaks: Vec<f64> = (0..=kx).map(|j| (j as f64 * PI / (6.0 * kx as f64)).sin()).collect();
    x_breaks[kx] = 0.5;
    let mut y_breaks = Vec::with_capacity(kx);
    let mut masses = Vec::with_capacity(kx * ky);
    for j in 0..kx {
        let (xa, xb) = (x_breaks[j], x_breaks[j + 1]);
        let floor = (1.0 - xb * xb).sqrt();
        let strip = rect_measure(&Rect::new(xa, xb, 0.0, f64::INFINITY));
        let upper = |t: f64| rect_measure(&Rect::new(xa, xb, t, f64::INFINITY));
        let mut ys = vec![floor];
        for k in 1..ky {
            let target = strip * (ky - k) as f64 / ky as f64;
            // upper(t) is decreasing in t
            let mut lo = floor;
            let mut hi = (xb - xa) / target + 1.0;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if upper(mid) > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-15 * hi {
                    break;
                }
            }
            ys.push(0.5 * (lo + hi));
        }
        ys.push(f64::INFINITY);
        for k in 0..ky {
            masses.push(rect_measure(&Rect::new(xa, xb, ys[k], ys[k + 1])));
        }
        y_breaks.push(ys);
    }
    Ok(PartitionSpec { kx, ky, x_breaks, y_breaks, masses })
}

/// Index column·ky + row of the cell holding `p`; points on a shared edge go
/// to the lower index.
pub fn locate_cell(p: &UHPoint, spec: &PartitionSpec) -> Result<usize> {
    if !(p.y > 0.0) || p.x < -BOUNDARY_TOL || p.x > 0.5 + BOUNDARY_TOL || p.x * p.x + p.y * p.y < 1.0 - BOUNDARY_TOL {
        return Err(Error::OutsideDomain { x: p.x, y: p.y });
    }
    let j = (0..spec.kx).find(|&j| p.x <= spec.x_breaks[j + 1]).unwrap_or(spec.kx - 1);
    let ys = &spec.y_breaks[j];
    let k = (0..spec.ky).find(|&k| p.y <= ys[k + 1]).unwrap_or(spec.ky - 1);
    Ok(j * spec.ky + k)
}

/// Rejection sampler for the normalized measure: x uniform on [0, 1/2],
/// y = (√3/2)/(1 − u), accepted when x² + y² ≥ 1.
pub fn sample_mu<R: Rng + ?Sized>(rng: &mut R) -> UHPoint {
    loop {
        if let Some(p) = propose(rng) {
            return p;
        }
    }
}

/// One proposal; returns the point when accepted.
pub fn propose<R: Rng + ?Sized>(rng: &mut R) -> Option<UHPoint> {
    let x: f64 = 0.5 * rng.gen::<f64>();
    let u: f64 = rng.gen::<f64>();
    let y = (3f64.sqrt() / 2.0) / (1.0 - u);
    if x * x + y * y >= 1.0 {
        Some(UHPoint { x, y })
    } else {
        None
    }
}
