//! Monte Carlo checks of the volume computation for binary cubic forms:
//! base points of unit discriminant with square shape, their stabilizers,
//! the Jacobian constant relating Haar measure to |disc|⁻¹ dv, and the
//! volume ratio of shape-restricted fundamental regions.

use crate::error::{Error, Result};
use crate::form::{act_real, discriminant_real, UnimodularMatrix2};
use crate::shape::{closed_form_gram, gauss_reduce, ShapeGram, UHPoint};
use crate::space::{mu_measure, Rank2Region, Rect};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Number of batches behind every standard error.
pub const BATCHES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasePoint {
    pub i: u8,
    pub form: [f64; 4],
    pub disc: f64,
    /// Shape Gram entries [A, B, C] of the form.
    pub gram: [f64; 3],
    pub shape: UHPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

fn check_signature(i: u8) -> Result<()> {
    if i > 1 {
        return Err(Error::InvalidTask(format!("signature must be 0 or 1, got {i}")));
    }
    Ok(())
}

fn signature_of(disc: f64) -> u8 {
    (disc < 0.0) as u8
}

/// Shape Gram of a real form; `None` on the degenerate locus.
fn gram_of(f: [f64; 4]) -> Option<[f64; 3]> {
    let d = discriminant_real(f);
    if !d.is_finite() || d == 0.0 {
        return None;
    }
    if d > 0.0 || f[0] == 0.0 {
        return closed_form_gram(f, d);
    }
    // |D|/f'(ρ)² = 4a²(Im z)², free of the cancellation in D itself
    let [rho, z, _] = crate::roots::cubic_roots(f[0], f[1], f[2], f[3]);
    let k = 4.0 * f[0] * f[0] * z.im * z.im;
    let fp = (3.0 * f[0] * rho.re + 2.0 * f[1]) * rho.re + f[2];
    Some(crate::shape::closed_form_gram_at(f, k * fp * fp, rho.re))
}

/// Symmetric inverse square root of a positive definite [A, B, C].
fn inv_sqrt(g: [f64; 3]) -> [f64; 4] {
    let [a, b, c] = g;
    let s = (a * c - b * b).sqrt();
    let t = (a + c + 2.0 * s).sqrt();
    // √G = (G + s·I)/t
    let (p, q, r) = ((a + s) / t, b / t, (c + s) / t);
    let det = p * r - q * q;
    [r / det, -q / det, -q / det, p / det]
}

pub fn make_basepoint(i: u8) -> Result<BasePoint> {
    check_signature(i)?;
    let seed = if i == 0 { [0.0, 1.0, 1.0, 0.0] } else { [1.0, 0.0, 1.0, 0.0] };
    let g = gram_of(seed).ok_or_else(|| Error::Invariant("seed form is degenerate".into()))?;
    let w = act_real(inv_sqrt(g), seed);
    let lambda = discriminant_real(w).abs().powf(-0.25);
    let form = w.map(|c| c * lambda);
    let disc = discriminant_real(form);
    let gram = gram_of(form).ok_or_else(|| Error::Invariant("base point is degenerate".into()))?;
    let scale = 0.5 * (gram[0] + gram[2]);
    let off = (gram[0] / scale - 1.0).abs().max((gram[2] / scale - 1.0).abs()).max((gram[1] / scale).abs());
    if (disc.abs() - 1.0).abs() > 1e-12 || off > 1e-10 || signature_of(disc) != i {
        return Err(Error::Invariant(format!("base point {form:?} has disc {disc} and gram {gram:?}")));
    }
    let shape = UHPoint::from_reduced(gram[0], gram[1].abs(), gram[2])?;
    Ok(BasePoint { i, form, disc, gram, shape })
}

/// Roots of the form as points [x : y] of the projective line.
fn projective_roots(f: [f64; 4]) -> [[Complex64; 2]; 3] {
    let [a, b, c, d] = f;
    let one = Complex64::new(1.0, 0.0);
    if a.abs() > d.abs() {
        crate::roots::cubic_roots(a, b, c, d).map(|z| [z, one])
    } else {
        // roots of d t³ + c t² + b t + a in t = y/x
        crate::roots::cubic_roots(d, c, b, a).map(|t| [one, t])
    }
}

/// Solves u = α e₁ + β e₂ for 2-vectors.
fn coords(e1: [Complex64; 2], e2: [Complex64; 2], u: [Complex64; 2]) -> (Complex64, Complex64) {
    let det = e1[0] * e2[1] - e1[1] * e2[0];
    ((u[0] * e2[1] - u[1] * e2[0]) / det, (e1[0] * u[1] - e1[1] * u[0]) / det)
}

/// Real matrices γ with γ·v = v, built from the root permutations that a real
/// projective map realizes. Each returned element is verified to 1e-10.
pub fn stabilizer(v: [f64; 4]) -> Result<Vec<[f64; 4]>> {
    let r = projective_roots(v);
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let scale = v.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut out = Vec::new();
    for p in perms {
        let (u1, u2, u3) = (r[p[0]], r[p[1]], r[p[2]]);
        // N r_j ∝ r_{p(j)}: N = [u1 u2]·diag(d1, d2)·[r0 r1]⁻¹
        let (al, be) = coords(r[0], r[1], r[2]);
        let (al2, be2) = coords(u1, u2, u3);
        let (d1, d2) = (al2 / al, be2 / be);
        let m = [[u1[0] * d1, u2[0] * d2], [u1[1] * d1, u2[1] * d2]];
        let det = r[0][0] * r[1][1] - r[1][0] * r[0][1];
        let inv = [[r[1][1] / det, -r[1][0] / det], [-r[0][1] / det, r[0][0] / det]];
        let n = [
            m[0][0] * inv[0][0] + m[0][1] * inv[1][0],
            m[0][0] * inv[0][1] + m[0][1] * inv[1][1],
            m[1][0] * inv[0][0] + m[1][1] * inv[1][0],
            m[1][0] * inv[0][1] + m[1][1] * inv[1][1],
        ];
        let big = n.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or_default();
        let phase = big / big.norm();
        let n = n.map(|z| z / phase);
        let nmax = n.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if n.iter().any(|z| z.im.abs() > 1e-9 * nmax) {
            continue;
        }
        // the roots of γ·f are the images of the roots of f under [[s,−r],[−q,p]]
        let nr = n.map(|z| z.re);
        let g = [nr[3], -nr[1], -nr[2], nr[0]];
        let w = act_real(g, v);
        let k = w.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>() / v.iter().map(|y| y * y).sum::<f64>();
        let t = (1.0 / k).cbrt();
        let g = g.map(|e| e * t);
        let w = act_real(g, v);
        let err = w.iter().zip(&v).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        if err > 1e-10 * scale.max(1.0) {
            return Err(Error::Invariant(format!("stabilizer candidate {g:?} moves the form by {err:e}")));
        }
        out.push(g);
    }
    Ok(out)
}

/// Order of the stabilizer of the base point in GL₂(ℝ).
pub fn stabilizer_order(i: u8) -> Result<usize> {
    Ok(stabilizer(make_basepoint(i)?.form)?.len())
}

/// GL₂(ℝ) element n(x)·a(y)·k(θ)·diag(1, ±1), determinant ±1.
pub fn iwasawa(x: f64, y: f64, theta: f64, flip: bool) -> [f64; 4] {
    let sy = y.sqrt();
    let (s, c) = theta.sin_cos();
    let f = if flip { -1.0 } else { 1.0 };
    // [[√y, x/√y], [0, 1/√y]] · [[c, −s], [s, c]]
    let m = [sy * c + x / sy * s, -sy * s + x / sy * c, s / sy, c / sy];
    [m[0], m[1] * f, m[2], m[3] * f]
}

/// Representative of x + iy in {0 ≤ x ≤ 1/2, |z| ≥ 1} under GL₂(ℤ).
pub fn canonical_point(x: f64, y: f64) -> Result<UHPoint> {
    let mut z = Complex64::new(x, y);
    for _ in 0..10_000 {
        z.re -= z.re.round();
        if z.norm_sqr() < 1.0 - 1e-15 {
            z = -z.inv();
        } else {
            return UHPoint::new(z.re.abs(), z.im);
        }
    }
    Err(Error::Invariant(format!("point {x} + {y}i did not reduce")))
}

/// Bump functions on coefficient space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TestFn {
    A,
    B,
}

impl std::str::FromStr for TestFn {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(TestFn::A),
            "B" | "b" => Ok(TestFn::B),
            _ => Err(Error::InvalidTask(format!("unknown test function `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Bump {
    center: [f64; 4],
    radius: [f64; 4],
    smoother: bool,
}

impl Bump {
    fn new(t: TestFn, base: &BasePoint) -> Bump {
        let v = base.form;
        let m = v.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        match t {
            TestFn::A => Bump { center: v, radius: [0.15 * m; 4], smoother: false },
            TestFn::B => {
                let c = act_real([1.1, 0.3, -0.2, 0.9], v).map(|x| 1.2 * x);
                let cm = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                Bump { center: c, radius: [0.10 * cm, 0.14 * cm, 0.12 * cm, 0.08 * cm], smoother: true }
            }
        }
    }

    fn eval(&self, v: &[f64; 4]) -> f64 {
        let mut prod = 1.0;
        for j in 0..4 {
            let t = 1.0 - (v[j] - self.center[j]).abs() / self.radius[j];
            if t <= 0.0 {
                return 0.0;
            }
            prod *= if self.smoother { t * t * t * (t * (6.0 * t - 15.0) + 10.0) } else { t * t * (3.0 - 2.0 * t) };
        }
        prod
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> [f64; 4] {
        std::array::from_fn(|j| self.center[j] + self.radius[j] * (2.0 * rng.gen::<f64>() - 1.0))
    }

    fn volume(&self) -> f64 {
        self.radius.iter().map(|r| 2.0 * r).product()
    }
}

fn batch_sizes(n: u64) -> Vec<u64> {
    let b = BATCHES as u64;
    (0..b).map(|k| n / b + u64::from(k < n % b)).collect()
}

fn batch_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mean of per-sample values over batches, with the batch-means error.
fn batch_mean(sums: &[(f64, u64)]) -> (f64, f64) {
    let total: u64 = sums.iter().map(|s| s.1).sum();
    let mean = sums.iter().map(|s| s.0).sum::<f64>() / total as f64;
    let b = sums.len() as f64;
    let means: Vec<f64> = sums.iter().map(|s| s.0 / s.1 as f64).collect();
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (b - 1.0);
    (mean, (var / b).sqrt())
}

/// Ratio Σnum/Σden over batches with the delta-method batch error.
fn batch_ratio(parts: &[(f64, f64)]) -> (f64, f64) {
    let num: f64 = parts.iter().map(|p| p.0).sum();
    let den: f64 = parts.iter().map(|p| p.1).sum();
    let r = num / den;
    let b = parts.len() as f64;
    let dbar = den / b;
    let s2 = parts.iter().map(|p| (p.0 - r * p.1).powi(2)).sum::<f64>() / (b - 1.0);
    (r, (s2 / b).sqrt() / dbar)
}

/// Box in the group coordinates (log λ, x, log y); θ, the determinant sign
/// and the ±1 factor are always sampled in full.
#[derive(Debug, Clone, Copy)]
struct GroupBox {
    lo: [f64; 3],
    hi: [f64; 3],
}

/// Coordinates (log λ, x, log y) of any g with g·v⁽ⁱ⁾ = v.
fn group_coords(v: &[f64; 4]) -> Option<[f64; 3]> {
    let g = gram_of(*v)?;
    let lam = discriminant_real(*v).abs().powf(0.25);
    // g gᵀ = √3·G/λ² = [[y + x²/y, x/y], [x/y, 1/y]]
    let m12 = 3f64.sqrt() * g[1] / (lam * lam);
    let m22 = 3f64.sqrt() * g[2] / (lam * lam);
    Some([lam.ln(), m12 / m22, (1.0 / m22).ln()])
}

fn act_group(base: &[f64; 4], c: [f64; 3], theta: f64, flip: bool, sign: f64) -> [f64; 4] {
    let lam = c[0].exp() * sign;
    act_real(iwasawa(c[1], c[2].exp(), theta, flip), *base).map(|e| e * lam)
}

/// Estimate of c_i = ∫ φ(g·v⁽ⁱ⁾) dg / ∫ |disc v|⁻¹ φ(v) dv for one bump φ, with
/// dg = d×λ · dx dy/y² dθ on λ > 0, both determinant signs and the ±1 factor.
pub fn mc_jacobian_constant(i: u8, testfn: TestFn, n: u64, seed: u64) -> Result<McEstimate> {
    check_signature(i)?;
    if n < 1_000_000 {
        return Err(Error::InvalidTask("at least 10^6 samples are required".into()));
    }
    let base = make_basepoint(i)?;
    let bump = Bump::new(testfn, &base);
    // pilot: support must lie in one orbit, and fixes the group box
    let mut rng = batch_rng(seed, u64::MAX);
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    let mut hits = 0;
    for _ in 0..50_000 {
        let v = bump.sample(&mut rng);
        if bump.eval(&v) <= 0.0 {
            continue;
        }
        if signature_of(discriminant_real(v)) != i {
            return Err(Error::DegenerateSupport(format!("test function {testfn:?} meets the other orbit")));
        }
        let c = group_coords(&v).ok_or_else(|| Error::DegenerateSupport("degenerate form in support".into()))?;
        for k in 0..3 {
            lo[k] = lo[k].min(c[k]);
            hi[k] = hi[k].max(c[k]);
        }
        hits += 1;
    }
    if hits < 100 {
        return Err(Error::DegenerateSupport(format!("test function {testfn:?} has negligible support")));
    }
    let gb = GroupBox {
        lo: std::array::from_fn(|k| lo[k] - 0.25 * (hi[k] - lo[k]) - 1e-3),
        hi: std::array::from_fn(|k| hi[k] + 0.25 * (hi[k] - lo[k]) + 1e-3),
    };
    let gvol = (0..3).map(|k| gb.hi[k] - gb.lo[k]).product::<f64>() * 2.0 * PI * 4.0;
    let sizes = batch_sizes(n);
    let lhs: Vec<Result<(f64, u64)>> = sizes
        .par_iter()
        .enumerate()
        .map(|(b, &m)| {
            let mut rng = batch_rng(seed, 2 * b as u64);
            let mut s = 0.0;
            for _ in 0..m {
                let c: [f64; 3] = std::array::from_fn(|k| rng.gen_range(gb.lo[k]..gb.hi[k]));
                let theta = rng.gen_range(0.0..2.0 * PI);
                let flip = rng.gen::<bool>();
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                let v = act_group(&base.form, c, theta, flip, sign);
                let phi = bump.eval(&v);
                if phi > 0.0 {
                    let near = (0..3).any(|k| {
                        let w = gb.hi[k] - gb.lo[k];
                        c[k] - gb.lo[k] < 1e-6 * w || gb.hi[k] - c[k] < 1e-6 * w
                    });
                    if near {
                        return Err(Error::BoxTooSmall("group coordinate box clips the support".into()));
                    }
                    // dy/y² = dlog y / y
                    s += phi / c[2].exp();
                }
            }
            Ok((s * gvol, m))
        })
        .collect();
    let lhs: Vec<(f64, u64)> = lhs.into_iter().collect::<Result<_>>()?;
    let rhs: Vec<(f64, u64)> = sizes
        .par_iter()
        .enumerate()
        .map(|(b, &m)| {
            let mut rng = batch_rng(seed, 2 * b as u64 + 1);
            let mut s = 0.0;
            for _ in 0..m {
                let v = bump.sample(&mut rng);
                let phi = bump.eval(&v);
                if phi > 0.0 {
                    s += phi / discriminant_real(v).abs();
                }
            }
            (s * bump.volume(), m)
        })
        .collect();
    let (l, sl) = batch_mean(&lhs);
    let (r, sr) = batch_mean(&rhs);
    if !(r > 0.0) {
        return Err(Error::DegenerateSupport("right-hand integral vanished".into()));
    }
    let value = l / r;
    let stderr = value * ((sl / l).powi(2) + (sr / r).powi(2)).sqrt();
    Ok(McEstimate { value, stderr, samples: n, seed })
}

/// μ(W ∩ {y ≤ ymax}) / μ({y ≤ ymax}).
pub fn truncated_mu_ratio(w: &Rank2Region, ymax: f64) -> f64 {
    let clip = |r: &Rect| Rect::new(r.x1, r.x2, r.y1, r.y2.min(ymax));
    let num = mu_measure(&Rank2Region { rects: w.rects.iter().map(clip).collect() });
    num / mu_measure(&Rank2Region::rect(0.0, 0.5, 0.0, ymax))
}

/// Half-widths of a coefficient box containing every λ·g·v⁽ⁱ⁾ with λ ≤ 1 whose
/// shape lies in F ∩ {y ≤ ymax}.
fn coefficient_box(base: &BasePoint, ymax: f64) -> [f64; 4] {
    let mut m = [0.0f64; 4];
    let (nx, ny, nt) = (24, 96, 96);
    for ix in 0..=nx {
        for iy in 0..=ny {
            let zx = 0.5 * ix as f64 / nx as f64;
            let zy = (1.0 - zx * zx).sqrt() + (ymax - (1.0 - zx * zx).sqrt()) * iy as f64 / ny as f64;
            // shape of g·v is 1/z̄ for g = n(x)a(y)k
            let r2 = zx * zx + zy * zy;
            let (gx, gy) = (zx / r2, zy / r2);
            for it in 0..nt {
                let theta = 2.0 * PI * it as f64 / nt as f64;
                for flip in [false, true] {
                    let v = act_real(iwasawa(gx, gy, theta, flip), base.form);
                    for k in 0..4 {
                        m[k] = m[k].max(v[k].abs());
                    }
                }
            }
        }
    }
    m.map(|x| 1.3 * x)
}

/// Estimate of vol(R_{W, y≤ymax}) / vol(R_{y≤ymax}) where R is the set of real
/// forms of signature i with |disc| < 1 whose shape Gram is already reduced.
pub fn mc_shape_volume_ratio(w: &Rank2Region, i: u8, ymax: f64, n: u64, seed: u64) -> Result<McEstimate> {
    check_signature(i)?;
    if !(1.0..=8.0).contains(&ymax) {
        return Err(Error::InvalidTask("ymax must lie in [1, 8]".into()));
    }
    if n < BATCHES as u64 {
        return Err(Error::InvalidTask(format!("at least {BATCHES} samples are required")));
    }
    let base = make_basepoint(i)?;
    let half = coefficient_box(&base, ymax);
    let parts: Vec<Result<(f64, f64)>> = batch_sizes(n)
        .par_iter()
        .enumerate()
        .map(|(b, &m)| {
            let mut rng = batch_rng(seed, b as u64);
            let (mut num, mut den) = (0.0, 0.0);
            for _ in 0..m {
                let v: [f64; 4] = std::array::from_fn(|k| half[k] * (2.0 * rng.gen::<f64>() - 1.0));
                let d = discriminant_real(v);
                if !(d.abs() < 1.0) || d == 0.0 || signature_of(d) != i {
                    continue;
                }
                let Some(g) = gram_of(v) else { continue };
                let Ok(sg) = ShapeGram::rank2(g[0], g[1], g[2]) else { continue };
                let Ok((p, t)) = gauss_reduce(&sg) else { continue };
                if t != UnimodularMatrix2::IDENTITY || p.y > ymax {
                    continue;
                }
                if (0..4).any(|k| half[k] - v[k].abs() < 1e-6 * half[k]) {
                    return Err(Error::BoxTooSmall(format!("accepted form {v:?} touches the sampling box")));
                }
                den += 1.0;
                if w.contains(&p) {
                    num += 1.0;
                }
            }
            Ok((num, den))
        })
        .collect();
    let parts: Vec<(f64, f64)> = parts.into_iter().collect::<Result<_>>()?;
    if parts.iter().any(|p| p.1 == 0.0) {
        return Err(Error::DegenerateSupport("a batch accepted no samples; increase N".into()));
    }
    let (value, stderr) = batch_ratio(&parts);
    Ok(McEstimate { value, stderr, samples: n, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_points() {
        for i in [0, 1] {
            let b = make_basepoint(i).unwrap();
            assert!((b.disc.abs() - 1.0).abs() <= 1e-12);
            assert!((b.shape.x).abs() < 1e-9 && (b.shape.y - 1.0).abs() < 1e-9);
        }
        assert_eq!(discriminant_real([0.0, 1.0, 1.0, 0.0]), 1.0);
        assert_eq!(discriminant_real([1.0, 0.0, 1.0, 0.0]), -4.0);
        let s = 2f64.powf(-0.5);
        assert!((discriminant_real([s, 0.0, s, 0.0]) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn stabilizer_orders() {
        assert_eq!(stabilizer_order(0).unwrap(), 6);
        assert_eq!(stabilizer_order(1).unwrap(), 2);
        assert!(make_basepoint(2).is_err());
    }

    #[test]
    fn shape_of_group_image_is_iwasawa_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in [0, 1] {
            let v = make_basepoint(i).unwrap().form;
            for _ in 0..10_000 {
                let x = rng.gen_range(-3.0..3.0);
                let y = rng.gen_range(-2.0f64..2.0).exp();
                let g = iwasawa(x, y, rng.gen_range(0.0..2.0 * PI), rng.gen());
                let w = act_real(g, v);
                let gr = gram_of(w).unwrap();
                let (p, _) = gauss_reduce(&ShapeGram::rank2(gr[0], gr[1], gr[2]).unwrap()).unwrap();
                let q = canonical_point(x, y).unwrap();
                assert!((p.x - q.x).abs() < 1e-9 && (p.y - q.y).abs() < 1e-9 * q.y, "{p:?} {q:?}");
            }
        }
    }

    #[test]
    fn disc_homogeneity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
            let l: f64 = rng.gen_range(0.1..3.0);
            let d = discriminant_real(v);
            let dl = discriminant_real(v.map(|c| c * l));
            let scale = v.iter().map(|c| c.abs()).sum::<f64>().powi(4) * l.powi(4);
            assert!((dl - l.powi(4) * d).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn full_window_ratio_is_one() {
        let w = Rank2Region::rect(0.0, 0.5, 0.0, 4.0);
        let r = mc_shape_volume_ratio(&w, 1, 4.0, 1_000_000, 1).unwrap();
        assert_eq!(r.value, 1.0);
        assert!((truncated_mu_ratio(&w, 4.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn jacobian_rejects_small_n() {
        assert!(mc_jacobian_constant(0, TestFn::A, 10, 1).is_err());
    }
}
