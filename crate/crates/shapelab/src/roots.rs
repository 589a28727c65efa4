//! Floating point roots of real polynomials with a posteriori error radii.

use num_complex::Complex64;

const U: f64 = f64::EPSILON * 0.5;

/// Horner evaluation of an ascending-coefficient polynomial.
pub fn horner(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

pub fn horner_c(p: &[f64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn deriv(p: &[f64]) -> Vec<f64> {
    p.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect()
}

/// Compensated Horner evaluation (error-free transformations), accurate to
/// roughly twice working precision.
pub fn horner_comp(p: &[f64], x: f64) -> f64 {
    let mut s = 0.0f64;
    let mut err = 0.0f64;
    for &c in p.iter().rev() {
        let prod = s * x;
        let pe = s.mul_add(x, -prod);
        let sum = prod + c;
        let bb = sum - prod;
        let se = (prod - (sum - bb)) + (c - bb);
        err = err * x + (pe + se);
        s = sum;
    }
    s + err
}

/// Newton polishing of a real root using the compensated residual.
pub fn polish_real(p: &[f64], mut x: f64) -> f64 {
    let dp = deriv(p);
    for _ in 0..8 {
        let fx = horner_comp(p, x);
        let dfx = horner(&dp, x);
        if dfx == 0.0 || !dfx.is_finite() {
            break;
        }
        let step = fx / dfx;
        let nx = x - step;
        if !nx.is_finite() {
            break;
        }
        if nx == x || step.abs() <= 2.0 * U * x.abs() {
            x = nx;
            break;
        }
        x = nx;
    }
    x
}

/// Real roots of a x³ + b x² + c x + d (a ≠ 0) in increasing order: three when
/// the discriminant is positive, otherwise one.
pub fn cubic_real_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    let p = [d, c, b, a];
    // depressed cubic t³ + pt + q with x = t − b/(3a)
    let bb = b / a;
    let cc = c / a;
    let dd = d / a;
    let shift = bb / 3.0;
    let pp = cc - bb * bb / 3.0;
    let qq = 2.0 * bb * bb * bb / 27.0 - bb * cc / 3.0 + dd;
    let disc = -(4.0 * pp * pp * pp + 27.0 * qq * qq);
    let mut roots = Vec::with_capacity(3);
    if disc > 0.0 && pp < 0.0 {
        let m = 2.0 * (-pp / 3.0).sqrt();
        let arg = (3.0 * qq / (pp * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        for k in 0..3 {
            let t = m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
            roots.push(t - shift);
        }
    } else {
        let s = (qq * qq / 4.0 + pp * pp * pp / 27.0).max(0.0).sqrt();
        let u = (-qq / 2.0 + if qq <= 0.0 { s } else { -s }).cbrt();
        let t = if u != 0.0 { u - pp / (3.0 * u) } else { 0.0 };
        roots.push(t - shift);
    }
    let mut out: Vec<f64> = roots.into_iter().map(|r| polish_real(&p, r)).collect();
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out
}

/// All three complex roots of a cubic with real coefficients, a ≠ 0.
/// Real roots come first (imaginary part exactly zero); a complex pair is
/// returned as (z, conj z) with Im z > 0.
pub fn cubic_roots(a: f64, b: f64, c: f64, d: f64) -> [Complex64; 3] {
    let p = [d, c, b, a];
    let disc = discriminant(a, b, c, d);
    let real = cubic_real_roots(a, b, c, d);
    if real.len() == 3 && disc >= 0.0 {
        return [Complex64::new(real[0], 0.0), Complex64::new(real[1], 0.0), Complex64::new(real[2], 0.0)];
    }
    let r = real[0];
    // remaining quadratic a x² + (b + a r) x + (c + (b + a r) r), or via the product of roots
    let b1 = b + a * r;
    let c1 = if r.abs() > 1.0 { -d / r } else { c + b1 * r };
    let disc2 = b1 * b1 - 4.0 * a * c1;
    let re = -b1 / (2.0 * a);
    let im = (-disc2).max(0.0).sqrt() / (2.0 * a.abs());
    let mut z = Complex64::new(re, im);
    let dp = deriv(&p);
    for _ in 0..4 {
        let fz = horner_c(&p, z);
        let dz = horner_c(&dp, z);
        if dz.norm() == 0.0 {
            break;
        }
        let nz = z - fz / dz;
        if !nz.re.is_finite() || !nz.im.is_finite() {
            break;
        }
        z = nz;
    }
    if z.im < 0.0 {
        z = z.conj();
    }
    [Complex64::new(r, 0.0), z, z.conj()]
}

pub fn discriminant(a: f64, b: f64, c: f64, d: f64) -> f64 {
    18.0 * a * b * c * d + b * b * c * c - 4.0 * a * c * c * c - 4.0 * b * b * b * d - 27.0 * a * a * d * d
}

#[derive(Clone, Copy)]
struct Dd(f64, f64);

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd(s, (a - (s - bb)) + (b - bb))
}

impl Dd {
    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.0, o.0);
        let t = s.1 + self.1 + o.1;
        two_sum(s.0, t)
    }
    fn mul_f(self, x: f64) -> Dd {
        let p = self.0 * x;
        let e = self.0.mul_add(x, -p);
        two_sum(p, e + self.1 * x)
    }
    fn neg(self) -> Dd {
        Dd(-self.0, -self.1)
    }
}

/// p(z) in double-double complex arithmetic; the rounding error is of order
/// ε² times Σ|c_k||z|^k.
fn horner_dd(p: &[f64], z: Complex64) -> Complex64 {
    let mut re = Dd(0.0, 0.0);
    let mut im = Dd(0.0, 0.0);
    for &c in p.iter().rev() {
        let nre = re.mul_f(z.re).add(im.mul_f(z.im).neg()).add(Dd(c, 0.0));
        let nim = re.mul_f(z.im).add(im.mul_f(z.re));
        re = nre;
        im = nim;
    }
    Complex64::new(re.0 + re.1, im.0 + im.1)
}

/// Radius of a disc around `z` containing a root of the degree-n polynomial:
/// n·|p(z)|/|p'(z)|, with |p(z)| evaluated in double-double and inflated by a
/// rounding bound.
pub fn error_radius(p: &[f64], z: Complex64) -> f64 {
    let n = (p.len() - 1) as f64;
    let dp = deriv(p);
    let fz = horner_dd(p, z).norm();
    let dz = horner_c(&dp, z).norm();
    let mag: f64 = p.iter().enumerate().map(|(k, c)| c.abs() * z.norm().powi(k as i32)).sum();
    let bound = fz * (1.0 + 4.0 * U) + 16.0 * n * U * U * mag;
    let dz_low = dz - 4.0 * n * U * mag;
    if dz_low <= 0.0 {
        f64::INFINITY
    } else {
        n * bound / dz_low
    }
}

/// All complex roots of a real polynomial of small degree by Aberth iteration
/// followed by Newton polishing. Real roots (|Im| below tolerance) are listed
/// first in increasing order with zero imaginary part, followed by one
/// representative with positive imaginary part of each conjugate pair and then
/// its conjugate, pairs ordered by real part.
pub fn poly_roots(p: &[f64]) -> Vec<Complex64> {
    let n = p.len() - 1;
    let lead = p[n];
    let monic: Vec<f64> = p.iter().map(|c| c / lead).collect();
    let bound = 1.0 + monic[..n].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(bound * 0.7, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    let dp = deriv(&monic);
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let fz = horner_c(&monic, z[k]);
            let dz = horner_c(&dp, z[k]);
            if fz.norm() == 0.0 {
                continue;
            }
            let ratio = fz / dz;
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            z[k] -= w;
            moved = moved.max(w.norm() / (1.0 + z[k].norm()));
        }
        if moved < 1e-17 {
            break;
        }
    }
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let fz = horner_c(&monic, *zk);
            let dz = horner_c(&dp, *zk);
            if dz.norm() == 0.0 {
                break;
            }
            let nz = *zk - fz / dz;
            if nz.re.is_finite() && nz.im.is_finite() {
                *zk = nz;
            }
        }
    }
    let tol = 1e-9;
    let mut real: Vec<f64> = Vec::new();
    let mut upper: Vec<Complex64> = Vec::new();
    for zk in &z {
        let r = error_radius(&monic, *zk).max(tol * (1.0 + zk.norm()));
        if zk.im.abs() <= r {
            real.push(polish_real(&monic, zk.re));
        } else if zk.im > 0.0 {
            upper.push(*zk);
        }
    }
    real.sort_by(|a, b| a.partial_cmp(b).unwrap());
    upper.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
    let mut out: Vec<Complex64> = real.into_iter().map(|r| Complex64::new(r, 0.0)).collect();
    for u in upper {
        out.push(u);
        out.push(u.conj());
    }
    out
}
