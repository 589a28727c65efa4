//! Exact univariate polynomial helpers over the integers and rationals.
//!
//! Polynomials are stored with ascending coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

pub type Q = BigRational;

fn q(n: &BigInt) -> Q {
    Q::from_integer(n.clone())
}

fn trim(p: &mut Vec<Q>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn to_q(p: &[BigInt]) -> Vec<Q> {
    let mut v: Vec<Q> = p.iter().map(q).collect();
    if v.is_empty() {
        v.push(Q::zero());
    }
    trim(&mut v);
    v
}

fn is_zero_poly(p: &[Q]) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn degree(p: &[Q]) -> usize {
    p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

pub fn eval_int(p: &[BigInt], x: &BigInt) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

pub fn eval_q(p: &[Q], x: &Q) -> Q {
    p.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
}

fn sign_q(x: &Q) -> Ordering {
    x.numer().sign_ordering()
}

trait SignOrdering {
    fn sign_ordering(&self) -> Ordering;
}

impl SignOrdering for BigInt {
    fn sign_ordering(&self) -> Ordering {
        self.cmp(&BigInt::zero())
    }
}

/// Remainder of `a` modulo `b` over the rationals.
fn rem(a: &[Q], b: &[Q]) -> Vec<Q> {
    let db = degree(b);
    let lead = b[db].clone();
    let mut r: Vec<Q> = a.to_vec();
    trim(&mut r);
    while !is_zero_poly(&r) && degree(&r) >= db {
        let dr = degree(&r);
        let f = r[dr].clone() / &lead;
        for (k, bk) in b.iter().enumerate().take(db + 1) {
            let idx = dr - db + k;
            r[idx] = &r[idx] - &f * bk;
        }
        r[dr] = Q::zero();
        trim(&mut r);
    }
    r
}

fn derivative(p: &[Q]) -> Vec<Q> {
    if p.len() <= 1 {
        return vec![Q::zero()];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * Q::from_integer(BigInt::from(k)))
        .collect()
}

/// Sturm sequence of a squarefree polynomial.
#[derive(Debug, Clone)]
pub struct Sturm {
    seq: Vec<Vec<Q>>,
}

impl Sturm {
    pub fn new(p: &[BigInt]) -> Self {
        let p0 = to_q(p);
        let p1 = derivative(&p0);
        let mut seq = vec![p0, p1];
        loop {
            let n = seq.len();
            if is_zero_poly(&seq[n - 1]) || degree(&seq[n - 1]) == 0 {
                break;
            }
            let r = rem(&seq[n - 2], &seq[n - 1]);
            if is_zero_poly(&r) {
                break;
            }
            seq.push(r.into_iter().map(|c| -c).collect());
        }
        seq.retain(|s| !is_zero_poly(s));
        Sturm { seq }
    }

    fn variations(&self, x: &Q) -> usize {
        let mut count = 0;
        let mut last = Ordering::Equal;
        for s in &self.seq {
            let v = sign_q(&eval_q(s, x));
            if v == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && v != last {
                count += 1;
            }
            last = v;
        }
        count
    }

    /// Number of distinct real roots in the half-open interval (lo, hi].
    pub fn count(&self, lo: &Q, hi: &Q) -> usize {
        self.variations(lo).saturating_sub(self.variations(hi))
    }
}

/// Cauchy bound: every complex root has absolute value below the result.
pub fn root_bound(p: &[BigInt]) -> Q {
    let n = p.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
    let lead = q(&p[n]).abs();
    let m = p[..n].iter().map(|c| q(c).abs() / &lead).fold(Q::zero(), |a, b| if b > a { b } else { a });
    m + Q::one()
}

/// Disjoint half-open intervals (lo, hi], each containing exactly one real root
/// of the squarefree polynomial `p`, in increasing order.
pub fn isolate_real_roots(p: &[BigInt]) -> Vec<(Q, Q)> {
    let sturm = Sturm::new(p);
    let b = root_bound(p);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        match sturm.count(&lo, &hi) {
            0 => {}
            1 => out.push((lo, hi)),
            _ => {
                let mid = (&lo + &hi) / Q::from_integer(BigInt::from(2));
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// Halve an isolating interval, keeping the half that holds the root.
pub fn bisect(sturm: &Sturm, lo: &Q, hi: &Q) -> (Q, Q) {
    let mid = (lo + hi) / Q::from_integer(BigInt::from(2));
    if sturm.count(lo, &mid) == 1 {
        (lo.clone(), mid)
    } else {
        (mid, hi.clone())
    }
}

/// Rational with the smallest denominator in the closed interval [lo, hi].
pub fn simplest_rational(lo: &Q, hi: &Q) -> Q {
    debug_assert!(lo <= hi);
    if lo.is_positive() {
        simplest_positive(lo, hi)
    } else if hi.is_negative() {
        -simplest_positive(&-hi, &-lo)
    } else {
        Q::zero()
    }
}

fn simplest_positive(lo: &Q, hi: &Q) -> Q {
    let c = lo.ceil();
    if &c <= hi {
        return c;
    }
    let n = lo.floor();
    let a = (hi - &n).recip();
    let b = (lo - &n).recip();
    n + simplest_positive(&a, &b).recip()
}

/// Whether the squarefree integer polynomial `p` (nonzero constant and leading
/// terms) has a rational root.
pub fn has_rational_root(p: &[BigInt]) -> bool {
    let n = p.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
    if n == 0 {
        return false;
    }
    if p[0].is_zero() {
        return true;
    }
    let lead = p[n].abs();
    let width = Q::new(BigInt::one(), &lead * &lead * BigInt::from(2));
    let pq = to_q(p);
    let sturm = Sturm::new(p);
    for (mut lo, mut hi) in isolate_real_roots(p) {
        if eval_q(&pq, &hi).is_zero() {
            return true;
        }
        while &hi - &lo > width {
            let (l, h) = bisect(&sturm, &lo, &hi);
            lo = l;
            hi = h;
            if eval_q(&pq, &hi).is_zero() {
                return true;
            }
        }
        let s = simplest_rational(&lo, &hi);
        if s.denom() <= &lead && eval_q(&pq, &s).is_zero() {
            return true;
        }
    }
    false
}

/// Sign of `h(ρ)` where ρ is the unique root of the irreducible polynomial `f`
/// in the isolating interval (lo, hi].
pub fn sign_at_root(h: &[BigInt], f: &[BigInt], interval: &(Q, Q)) -> Ordering {
    let fq = to_q(f);
    let r = rem(&to_q(h), &fq);
    if is_zero_poly(&r) {
        return Ordering::Equal;
    }
    let sturm = Sturm::new(f);
    let (mut lo, mut hi) = interval.clone();
    loop {
        if let Some(s) = constant_sign(&r, &lo, &hi) {
            return s;
        }
        let (l, h2) = bisect(&sturm, &lo, &hi);
        lo = l;
        hi = h2;
    }
}

/// Sign of `r` on [lo, hi] when it is constant and nonzero there, for degree at most two.
fn constant_sign(r: &[Q], lo: &Q, hi: &Q) -> Option<Ordering> {
    let d = degree(r);
    let slo = sign_q(&eval_q(r, lo));
    let shi = sign_q(&eval_q(r, hi));
    if d == 0 {
        return Some(sign_q(&r[0]));
    }
    if slo == Ordering::Equal || slo != shi {
        return None;
    }
    if d == 1 {
        return Some(slo);
    }
    if d == 2 {
        let two = Q::from_integer(BigInt::from(2));
        let v = -&r[1] / (&two * &r[2]);
        if &v <= lo || &v >= hi {
            return Some(slo);
        }
        if sign_q(&eval_q(r, &v)) == slo {
            return Some(slo);
        }
        return None;
    }
    // Higher degree: require no roots of the squarefree part in the interval.
    let num: Vec<BigInt> = {
        let l = r.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        r.iter().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect()
    };
    let sq = squarefree(&num);
    let st = Sturm::new(&sq);
    if st.count(lo, hi) == 0 {
        Some(slo)
    } else {
        None
    }
}

fn squarefree(p: &[BigInt]) -> Vec<BigInt> {
    let pq = to_q(p);
    let mut a = pq.clone();
    let mut b = derivative(&pq);
    while !is_zero_poly(&b) {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    if degree(&a) == 0 {
        return p.to_vec();
    }
    // exact division p / gcd
    let mut quot = vec![Q::zero(); degree(&pq) - degree(&a) + 1];
    let mut r = pq;
    let da = degree(&a);
    while !is_zero_poly(&r) && degree(&r) >= da {
        let dr = degree(&r);
        let f = r[dr].clone() / &a[da];
        quot[dr - da] = f.clone();
        for k in 0..=da {
            r[dr - da + k] = &r[dr - da + k] - &f * &a[k];
        }
        trim(&mut r);
    }
    let l = quot.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    quot.iter().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect()
}

/// Integer square root test.
pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &(&r * &r) == n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn qq(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn isolates_three_roots() {
        // (x-1)(x-2)(x+3) = x^3 - 7x + 6
        let p = ints(&[6, -7, 0, 1]);
        let iv = isolate_real_roots(&p);
        assert_eq!(iv.len(), 3);
        assert!(iv[0].0 < qq(-3, 1) && qq(-3, 1) <= iv[0].1);
    }

    #[test]
    fn simplest_rational_examples() {
        assert_eq!(simplest_rational(&qq(1, 3), &qq(1, 2)), qq(1, 2));
        assert_eq!(simplest_rational(&qq(3, 10), &qq(4, 10)), qq(1, 3));
        assert_eq!(simplest_rational(&qq(-7, 5), &qq(-13, 10)), qq(-4, 3));
        assert_eq!(simplest_rational(&qq(-1, 2), &qq(1, 2)), qq(0, 1));
    }

    #[test]
    fn rational_roots() {
        assert!(has_rational_root(&ints(&[1, 0, 0, 1])));
        assert!(!has_rational_root(&ints(&[-1, -1, 0, 1])));
        // 6x^3 - 5x^2 - 2x + 1 = (x-1)(2x-1)(3x+1)
        assert!(has_rational_root(&ints(&[1, -2, -5, 6])));
        // 4x^3 - 3 has no rational root
        assert!(!has_rational_root(&ints(&[-3, 0, 0, 4])));
        // 9x^3 - 3x^2 + 3x - 1 = (3x - 1)(3x^2 + 1)
        assert!(has_rational_root(&ints(&[-1, 3, -3, 9])));
    }

    #[test]
    fn sign_at_cube_root_of_two() {
        let f = ints(&[-2, 0, 0, 1]);
        let iv = isolate_real_roots(&f)[0].clone();
        // rho^2 - 1.5 > 0 since 2^(2/3) ≈ 1.587
        assert_eq!(sign_at_root(&ints(&[-3, 0, 2]), &f, &iv), Ordering::Greater);
        // 5 rho - 6.3: 5*1.2599 = 6.2996 < 6.3
        assert_eq!(sign_at_root(&ints(&[-63, 50]), &f, &iv), Ordering::Less);
        // rho^3 - 2 vanishes
        assert_eq!(sign_at_root(&ints(&[-2, 0, 0, 1]), &f, &iv), Ordering::Equal);
        // degree-four input reduced first: rho^4 = 2 rho
        assert_eq!(sign_at_root(&ints(&[0, -2, 0, 0, 1]), &f, &iv), Ordering::Equal);
    }
}
