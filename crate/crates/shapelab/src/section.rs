//! Orbit section: one canonical form per GL₂(ℤ)-class of irreducible forms.
//!
//! A form is reduced when its shape Gram [[A,B],[B,C]] satisfies |2B| ≤ A ≤ C.
//! For positive discriminant the Gram is proportional to the Hessian, so the
//! test is |Q| ≤ P ≤ R on integers. For negative discriminant each inequality is
//! the sign of an integer polynomial at the real root ρ of f(x,1), decided in
//! floating point with a margin and exactly otherwise.

use crate::error::{Error, Result};
use crate::exact;
use crate::form::{act, discriminant, hessian, BinaryCubicForm, UnimodularMatrix2};
use crate::roots;
use crate::shape::{closed_form_gram, gauss_reduce, ShapeGram};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// Relative margin of the floating point filter.
const MARGIN: f64 = 1e-9;

/// Coefficients beyond this size skip the machine-integer path.
const FAST_LIMIT: i64 = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    NotReduced,
    /// Strict inequalities.
    Interior,
    /// Some inequality holds with equality.
    Boundary,
}

pub fn disc_i128(f: [i64; 4]) -> i128 {
    let [a, b, c, d] = f.map(|x| x as i128);
    18 * a * b * c * d + b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d
}

pub fn hessian_i128(f: [i64; 4]) -> [i128; 3] {
    let [a, b, c, d] = f.map(|x| x as i128);
    [b * b - 3 * a * c, b * c - 9 * a * d, c * c - 3 * b * d]
}

/// γ·f on machine integers; `None` on overflow.
pub fn act_i64(g: &UnimodularMatrix2, f: [i64; 4]) -> Option<[i64; 4]> {
    let [p, q, r, s] = g.entries().map(|x| x as i128);
    let [a, b, c, d] = f.map(|x| x as i128);
    let ev = |x: i128, y: i128| ((a * x + b * y) * x + c * y * y) * x + d * y * y * y;
    let na = ev(p, q);
    let nb = 3 * a * p * p * r + b * (p * p * s + 2 * p * q * r) + c * (q * q * r + 2 * p * q * s) + 3 * d * q * q * s;
    let nc = 3 * a * p * r * r + b * (2 * p * r * s + q * r * r) + c * (p * s * s + 2 * q * r * s) + 3 * d * q * s * s;
    let nd = ev(r, s);
    Some([na.try_into().ok()?, nb.try_into().ok()?, nc.try_into().ok()?, nd.try_into().ok()?])
}

/// f(x + ky, y).
pub fn translate(f: [i64; 4], k: i64) -> Option<[i64; 4]> {
    let [a, b, c, d] = f.map(|x| x as i128);
    let k = k as i128;
    let nb = b + 3 * a * k;
    let nc = c + 2 * b * k + 3 * a * k * k;
    let nd = d + c * k + b * k * k + a * k * k * k;
    Some([f[0], nb.try_into().ok()?, nc.try_into().ok()?, nd.try_into().ok()?])
}

fn classify_signs(signs: [Ordering; 3]) -> Reduction {
    if signs.contains(&Ordering::Less) {
        Reduction::NotReduced
    } else if signs.contains(&Ordering::Equal) {
        Reduction::Boundary
    } else {
        Reduction::Interior
    }
}

fn hessian_status(p: Ordering, q: Ordering, r: Ordering) -> Reduction {
    classify_signs([p, q, r])
}

/// Status of a form with positive discriminant from its Hessian.
fn status_from_hessian(h: [i128; 3]) -> Reduction {
    let [p, q, r] = h;
    hessian_status((p - q).cmp(&0), (p + q).cmp(&0), (r - p).cmp(&0))
}

/// Polynomials h₁, h₂, h₃ in x whose signs at ρ are those of A − 2B, A + 2B
/// and C − A for the Gram scaled by 3·f′(ρ)².
fn reduction_polys(f: &BinaryCubicForm, disc_abs: &BigInt) -> [Vec<BigInt>; 3] {
    let (a, b, c) = (&f.a, &f.b, &f.c);
    let h = hessian(f);
    let w: Vec<BigInt> = vec![
        c * c,
        BigInt::from(4) * b * c,
        BigInt::from(4) * b * b + BigInt::from(6) * a * c,
        BigInt::from(12) * a * b,
        BigInt::from(9) * a * a,
    ];
    let scale = |k: &BigInt| -> Vec<BigInt> { w.iter().map(|x| x * k).collect() };
    let two = BigInt::from(2);
    let d3 = disc_abs * BigInt::from(3);
    let d6 = disc_abs * BigInt::from(6);
    let mut h1 = scale(&(&two * (&h.p - &h.q)));
    h1[0] += &d3;
    h1[1] += &d6;
    let mut h2 = scale(&(&two * (&h.p + &h.q)));
    h2[0] += &d3;
    h2[1] -= &d6;
    let mut h3 = scale(&(&two * (&h.r - &h.p)));
    h3[0] -= &d3;
    h3[2] += &d3;
    [h1, h2, h3]
}

/// Exact status over the integers; `f` irreducible with a ≠ 0.
pub fn reduction_status_exact(f: &BinaryCubicForm) -> Reduction {
    let disc = discriminant(f);
    if disc.is_positive() {
        let h = hessian(f);
        let cmp0 = |x: BigInt| x.cmp(&BigInt::zero());
        return hessian_status(cmp0(&h.p - &h.q), cmp0(&h.p + &h.q), cmp0(&h.r - &h.p));
    }
    let polys = reduction_polys(f, &disc.abs());
    let fx = f.dehomogenized();
    let roots = exact::isolate_real_roots(&fx);
    let iv = &roots[0];
    classify_signs([0, 1, 2].map(|k| exact::sign_at_root(&polys[k], &fx, iv)))
}

/// Floating point signs of (A − 2B, A + 2B, C − A) with a validity margin;
/// `None` for an inequality too close to call.
fn float_signs(f: [i64; 4], disc: i128) -> [Option<Ordering>; 3] {
    let [a, b, c, d] = f.map(|x| x as f64);
    let dabs = (disc as f64).abs();
    let [p, q, r] = hessian_i128(f).map(|x| x as f64);
    let rho = roots::cubic_real_roots(a, b, c, d)[0];
    let fp = (3.0 * a * rho + 2.0 * b) * rho + c;
    let fpp = 6.0 * a * rho + 2.0 * b;
    let w = fp * fp;
    let dw = 2.0 * fp * fpp;
    let drho = roots::error_radius(&[d, c, b, a], num_complex::Complex64::new(rho, 0.0));
    let terms = [
        ((2.0 * p - 2.0 * q) * w, 3.0 * dabs + 6.0 * dabs * rho, (2.0 * p - 2.0 * q) * dw + 6.0 * dabs, 3.0 * dabs + 6.0 * dabs * rho.abs()),
        ((2.0 * p + 2.0 * q) * w, 3.0 * dabs - 6.0 * dabs * rho, (2.0 * p + 2.0 * q) * dw - 6.0 * dabs, 3.0 * dabs + 6.0 * dabs * rho.abs()),
        (2.0 * (r - p) * w, 3.0 * dabs * rho * rho - 3.0 * dabs, 2.0 * (r - p) * dw + 6.0 * dabs * rho, 3.0 * dabs * (rho * rho + 1.0)),
    ];
    terms.map(|(t1, t2, deriv, mag2)| {
        let v = t1 + t2;
        let tol = MARGIN * (t1.abs() + mag2) + 8.0 * deriv.abs() * drho;
        if !tol.is_finite() || !v.is_finite() {
            None
        } else if v > tol {
            Some(Ordering::Greater)
        } else if v < -tol {
            Some(Ordering::Less)
        } else {
            None
        }
    })
}

fn fits(f: &[i64; 4]) -> bool {
    f.iter().all(|c| c.abs() < FAST_LIMIT)
}

/// Status of an irreducible form with machine-integer coefficients.
pub fn reduction_status_i64(f: [i64; 4]) -> Reduction {
    if !fits(&f) {
        return reduction_status_exact(&BinaryCubicForm::from_array(f));
    }
    let disc = disc_i128(f);
    if disc > 0 {
        return status_from_hessian(hessian_i128(f));
    }
    let signs = float_signs(f, disc);
    if signs.contains(&Some(Ordering::Less)) {
        return Reduction::NotReduced;
    }
    if signs.iter().all(|s| s.is_some()) {
        return Reduction::Interior;
    }
    reduction_status_exact(&BinaryCubicForm::from_array(f))
}

pub fn reduction_status(f: &BinaryCubicForm) -> Reduction {
    match f.to_i64() {
        Some(v) => reduction_status_i64(v),
        None => reduction_status_exact(f),
    }
}

/// Canonical test for an irreducible form with machine-integer coefficients,
/// given its reduction status.
pub fn is_canonical_with(f: [i64; 4], status: Reduction) -> bool {
    if f[0] <= 0 {
        return false;
    }
    match status {
        Reduction::NotReduced => false,
        // the other reduced member with a > 0 is (a, −b, c, −d)
        Reduction::Interior => f[1] < 0 || (f[1] == 0 && f[3] <= 0),
        Reduction::Boundary => UnimodularMatrix2::small().iter().all(|g| match act_i64(g, f) {
            Some(h) => h >= f || h[0] <= 0 || reduction_status_i64(h) == Reduction::NotReduced,
            None => true,
        }),
    }
}

pub fn is_canonical_i64(f: [i64; 4]) -> bool {
    f[0] > 0 && is_canonical_with(f, reduction_status_i64(f))
}

/// Whether `f` is the chosen representative of its GL₂(ℤ)-orbit.
/// Precondition: f irreducible.
pub fn is_canonical(f: &BinaryCubicForm) -> bool {
    if let Some(v) = f.to_i64() {
        if fits(&v) {
            return is_canonical_i64(v);
        }
    }
    if !f.a.is_positive() {
        return false;
    }
    match reduction_status_exact(f) {
        Reduction::NotReduced => false,
        Reduction::Interior => f.b.is_negative() || (f.b.is_zero() && !f.d.is_positive()),
        Reduction::Boundary => UnimodularMatrix2::small().iter().all(|g| {
            let h = act(g, f);
            h >= *f || !h.a.is_positive() || reduction_status_exact(&h) == Reduction::NotReduced
        }),
    }
}

/// The canonical representative of the orbit of an irreducible form.
pub fn canonicalize(f: &BinaryCubicForm) -> Result<BinaryCubicForm> {
    let disc = discriminant(f);
    if disc.is_zero() {
        return Err(Error::ZeroDiscriminant);
    }
    if crate::form::is_reducible(f) {
        return Err(Error::Reducible);
    }
    let mut g = f.clone();
    // float reduction, repeated in case the first pass was limited by precision
    for _ in 0..4 {
        let gram = closed_form_gram(g.to_f64(), disc.to_f64().unwrap_or(f64::NAN)).ok_or(Error::ZeroDiscriminant)?;
        let sg = ShapeGram::rank2(gram[0], gram[1], gram[2])?;
        let (_, m) = gauss_reduce(&sg)?;
        if m == UnimodularMatrix2::IDENTITY {
            break;
        }
        g = act(&m.transpose(), &g);
    }
    let mut best: Option<BinaryCubicForm> = None;
    for s in UnimodularMatrix2::small() {
        let h = act(&s, &g);
        if h.a.is_positive() && reduction_status(&h) != Reduction::NotReduced && best.as_ref().is_none_or(|b| h < *b) {
            best = Some(h);
        }
    }
    let best = best.ok_or_else(|| Error::Invariant(format!("no reduced form near {g}")))?;
    debug_assert!(is_canonical(&best));
    Ok(best)
}

/// Machine-integer variant of [`canonicalize`] for irreducible forms.
pub fn canonicalize_i64(f: [i64; 4]) -> Result<[i64; 4]> {
    if !fits(&f) {
        let c = canonicalize(&BinaryCubicForm::from_array(f))?;
        return c.to_i64().ok_or_else(|| Error::Invariant("canonical form overflows i64".into()));
    }
    let disc = disc_i128(f);
    if disc == 0 {
        return Err(Error::ZeroDiscriminant);
    }
    let mut g = f;
    for _ in 0..4 {
        let gram = closed_form_gram(g.map(|x| x as f64), disc as f64).ok_or(Error::ZeroDiscriminant)?;
        let (_, m) = gauss_reduce(&ShapeGram::rank2(gram[0], gram[1], gram[2])?)?;
        if m == UnimodularMatrix2::IDENTITY {
            break;
        }
        g = act_i64(&m.transpose(), g).ok_or_else(|| Error::Invariant("overflow during reduction".into()))?;
    }
    let mut best: Option<[i64; 4]> = None;
    for s in UnimodularMatrix2::small() {
        if let Some(h) = act_i64(&s, g) {
            if h[0] > 0 && best.is_none_or(|b| h < b) && reduction_status_i64(h) != Reduction::NotReduced {
                best = Some(h);
            }
        }
    }
    best.ok_or_else(|| Error::Invariant(format!("no reduced form near {g:?}")))
}
