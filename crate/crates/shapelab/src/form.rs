//! Binary cubic forms f(x,y) = ax³ + bx²y + cxy² + dy³ and their invariants.

use crate::error::{Error, Result};
use crate::exact;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryCubicForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl BinaryCubicForm {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        BinaryCubicForm { a: a.into(), b: b.into(), c: c.into(), d: d.into() }
    }

    pub fn from_array(v: [i64; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn coeffs(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    /// Coefficients as machine integers when they fit.
    pub fn to_i64(&self) -> Option<[i64; 4]> {
        Some([self.a.to_i64()?, self.b.to_i64()?, self.c.to_i64()?, self.d.to_i64()?])
    }

    pub fn to_f64(&self) -> [f64; 4] {
        self.coeffs().map(|c| c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.a, -&self.b, -&self.c, -&self.d)
    }

    pub fn content(&self) -> BigInt {
        self.coeffs().iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Value at an integer point.
    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        let x2 = x * x;
        let y2 = y * y;
        &self.a * &x2 * x + &self.b * &x2 * y + &self.c * x * &y2 + &self.d * &y2 * y
    }

    /// f(x,1) with ascending coefficients.
    pub fn dehomogenized(&self) -> Vec<BigInt> {
        vec![self.d.clone(), self.c.clone(), self.b.clone(), self.a.clone()]
    }
}

impl fmt::Display for BinaryCubicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.a, self.b, self.c, self.d)
    }
}

/// 2×2 integer matrix [[p,q],[r,s]] with determinant ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UnimodularMatrix2 {
    p: i64,
    q: i64,
    r: i64,
    s: i64,
}

impl UnimodularMatrix2 {
    pub fn new(p: i64, q: i64, r: i64, s: i64) -> Result<Self> {
        let det = p as i128 * s as i128 - q as i128 * r as i128;
        if det.abs() != 1 {
            return Err(Error::NotUnimodular(det));
        }
        Ok(UnimodularMatrix2 { p, q, r, s })
    }

    pub const IDENTITY: UnimodularMatrix2 = UnimodularMatrix2 { p: 1, q: 0, r: 0, s: 1 };

    pub fn entries(&self) -> [i64; 4] {
        [self.p, self.q, self.r, self.s]
    }

    pub fn det(&self) -> i64 {
        self.p * self.s - self.q * self.r
    }

    pub fn transpose(&self) -> Self {
        UnimodularMatrix2 { p: self.p, q: self.r, r: self.q, s: self.s }
    }

    pub fn mul(&self, o: &Self) -> Self {
        UnimodularMatrix2 {
            p: self.p * o.p + self.q * o.r,
            q: self.p * o.q + self.q * o.s,
            r: self.r * o.p + self.s * o.r,
            s: self.r * o.q + self.s * o.s,
        }
    }

    pub fn inverse(&self) -> Self {
        let d = self.det();
        UnimodularMatrix2 { p: self.s * d, q: -self.q * d, r: -self.r * d, s: self.p * d }
    }

    /// All matrices with entries in {-1,0,1} and determinant ±1.
    pub fn small() -> Vec<UnimodularMatrix2> {
        let mut out = Vec::new();
        for p in -1..=1 {
            for q in -1..=1 {
                for r in -1..=1 {
                    for s in -1..=1 {
                        if let Ok(m) = UnimodularMatrix2::new(p, q, r, s) {
                            out.push(m);
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HessianForm {
    pub p: BigInt,
    pub q: BigInt,
    pub r: BigInt,
}

pub fn discriminant(f: &BinaryCubicForm) -> BigInt {
    let (a, b, c, d) = (&f.a, &f.b, &f.c, &f.d);
    BigInt::from(18) * a * b * c * d + b * b * c * c
        - BigInt::from(4) * a * c * c * c
        - BigInt::from(4) * b * b * b * d
        - BigInt::from(27) * a * a * d * d
}

pub fn hessian(f: &BinaryCubicForm) -> HessianForm {
    let (a, b, c, d) = (&f.a, &f.b, &f.c, &f.d);
    HessianForm {
        p: b * b - BigInt::from(3) * a * c,
        q: b * c - BigInt::from(9) * a * d,
        r: c * c - BigInt::from(3) * b * d,
    }
}

/// (γ·f)(x,y) = f((x,y)γ).
pub fn act(g: &UnimodularMatrix2, f: &BinaryCubicForm) -> BinaryCubicForm {
    let [p, q, r, s] = g.entries().map(BigInt::from);
    let (a, b, c, d) = (&f.a, &f.b, &f.c, &f.d);
    let three = BigInt::from(3);
    let two = BigInt::from(2);
    let na = f.eval(&p, &q);
    let nd = f.eval(&r, &s);
    let nb = &three * a * &p * &p * &r
        + b * (&p * &p * &s + &two * &p * &q * &r)
        + c * (&q * &q * &r + &two * &p * &q * &s)
        + &three * d * &q * &q * &s;
    let nc = &three * a * &p * &r * &r
        + b * (&two * &p * &r * &s + &q * &r * &r)
        + c * (&p * &s * &s + &two * &q * &r * &s)
        + &three * d * &q * &s * &s;
    BinaryCubicForm { a: na, b: nb, c: nc, d: nd }
}

/// The same substitution for real coefficients and a real matrix [[p,q],[r,s]].
pub fn act_real(g: [f64; 4], f: [f64; 4]) -> [f64; 4] {
    let [p, q, r, s] = g;
    let [a, b, c, d] = f;
    let ev = |x: f64, y: f64| ((a * x + b * y) * x + c * y * y) * x + d * y * y * y;
    [
        ev(p, q),
        3.0 * a * p * p * r + b * (p * p * s + 2.0 * p * q * r) + c * (q * q * r + 2.0 * p * q * s) + 3.0 * d * q * q * s,
        3.0 * a * p * r * r + b * (2.0 * p * r * s + q * r * r) + c * (p * s * s + 2.0 * q * r * s) + 3.0 * d * q * s * s,
        ev(r, s),
    ]
}

pub fn discriminant_real(f: [f64; 4]) -> f64 {
    let [a, b, c, d] = f;
    18.0 * a * b * c * d + b * b * c * c - 4.0 * a * c * c * c - 4.0 * b * b * b * d - 27.0 * a * a * d * d
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormKind {
    ZeroDisc,
    Reducible,
    IrreducibleC3,
    IrreducibleS3,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub kind: FormKind,
    /// 0 for positive discriminant, 1 for negative, absent when the discriminant vanishes.
    pub signature: Option<u8>,
    pub content: BigInt,
}

pub fn is_reducible(f: &BinaryCubicForm) -> bool {
    if f.a.is_zero() || f.d.is_zero() {
        return true;
    }
    let g = f.content();
    if g.is_zero() {
        return true;
    }
    let prim: Vec<BigInt> = f.dehomogenized().iter().map(|c| c / &g).collect();
    exact::has_rational_root(&prim)
}

pub fn classify(f: &BinaryCubicForm) -> Classification {
    let disc = discriminant(f);
    let content = f.content();
    if disc.is_zero() {
        return Classification { kind: FormKind::ZeroDisc, signature: None, content };
    }
    let signature = Some(if disc.is_positive() { 0 } else { 1 });
    let kind = if is_reducible(f) {
        FormKind::Reducible
    } else if exact::is_square(&disc) {
        FormKind::IrreducibleC3
    } else {
        FormKind::IrreducibleS3
    };
    Classification { kind, signature, content }
}

/// Multiplication table of R(f) on the basis ⟨1, ω, θ⟩.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicRingTable {
    /// ωθ = −ad
    pub omega_theta: [BigInt; 3],
    /// ω² = −ac − bω + aθ
    pub omega_sq: [BigInt; 3],
    /// θ² = −bd − dω + cθ
    pub theta_sq: [BigInt; 3],
    pub trace: [BigInt; 3],
}

pub fn ring_table(f: &BinaryCubicForm) -> CubicRingTable {
    let (a, b, c, d) = (&f.a, &f.b, &f.c, &f.d);
    CubicRingTable {
        omega_theta: [-(a * d), BigInt::zero(), BigInt::zero()],
        omega_sq: [-(a * c), -b.clone(), a.clone()],
        theta_sq: [-(b * d), -d.clone(), c.clone()],
        trace: [BigInt::from(3), -b.clone(), c.clone()],
    }
}

impl CubicRingTable {
    /// Product of two elements given in coordinates on ⟨1, ω, θ⟩.
    pub fn mul(&self, x: &[BigInt; 3], y: &[BigInt; 3]) -> [BigInt; 3] {
        let mut out = [&x[0] * &y[0], &x[0] * &y[1] + &x[1] * &y[0], &x[0] * &y[2] + &x[2] * &y[0]];
        let oo = &x[1] * &y[1];
        let ot = &x[1] * &y[2] + &x[2] * &y[1];
        let tt = &x[2] * &y[2];
        for k in 0..3 {
            out[k] += &oo * &self.omega_sq[k] + &ot * &self.omega_theta[k] + &tt * &self.theta_sq[k];
        }
        out
    }

    pub fn trace_of(&self, x: &[BigInt; 3]) -> BigInt {
        x.iter().zip(&self.trace).map(|(u, t)| u * t).sum()
    }

    /// Checks commutativity and associativity on all basis triples.
    pub fn is_associative(&self) -> bool {
        let basis: Vec<[BigInt; 3]> = (0..3)
            .map(|k| {
                let mut e = [BigInt::zero(), BigInt::zero(), BigInt::zero()];
                e[k] = BigInt::from(1);
                e
            })
            .collect();
        for x in &basis {
            for y in &basis {
                if self.mul(x, y) != self.mul(y, x) {
                    return false;
                }
                for z in &basis {
                    if self.mul(&self.mul(x, y), z) != self.mul(x, &self.mul(y, z)) {
                        return false;
                    }
                }
            }
        }
        true
    }
}
