//! p-adic conditions on binary cubic forms: maximality at p, the Dedekind
//! criterion, congruence predicates and exact local densities.

use crate::arith::{self, is_prime};
use crate::error::{Error, ParseErrorKind, Result};
use crate::form::{discriminant, BinaryCubicForm, UnimodularMatrix2};
use crate::section::act_i64;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn residue(x: &BigInt, m: u64) -> u64 {
    x.mod_floor(&BigInt::from(m)).to_u64().unwrap_or(0)
}

fn mulm(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        a * b % m
    } else {
        let r = BigUint::from(a) * BigUint::from(b) % BigUint::from(m);
        r.to_u128().unwrap_or(0)
    }
}

fn powm(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, b, m);
        }
        b = mulm(b, b, m);
        e >>= 1;
    }
    r
}

fn inv_p(a: u128, p: u128) -> u128 {
    powm(a, p - 2, p)
}

/// f(x,1) mod m with ascending coefficients (d, c, b, a), evaluated at r.
fn eval_mod(f: &[u128; 4], r: u128, m: u128) -> u128 {
    f.iter().rev().fold(0u128, |acc, &c| (mulm(acc, r, m) + c) % m)
}

fn trim(p: &mut Vec<u128>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

/// Remainder of u by v over F_p (v nonzero, trimmed).
fn poly_rem(u: &[u128], v: &[u128], p: u128) -> Vec<u128> {
    let mut r = u.to_vec();
    trim(&mut r);
    let dv = v.len() - 1;
    let lead_inv = inv_p(v[dv], p);
    while r.len() > dv {
        let dr = r.len() - 1;
        let f = mulm(r[dr], lead_inv, p);
        for k in 0..=dv {
            let t = mulm(f, v[k], p);
            r[dr - dv + k] = (r[dr - dv + k] + p - t) % p;
        }
        trim(&mut r);
    }
    r
}

fn poly_gcd(u: &[u128], v: &[u128], p: u128) -> Vec<u128> {
    let mut a = u.to_vec();
    let mut b = v.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Roots mod p of f(x,1) that are multiple roots of f mod p.
fn multiple_finite_roots(f: &[u128; 4], p: u128) -> Vec<u128> {
    let fp: Vec<u128> = f.iter().map(|c| c % p).collect();
    let dp: Vec<u128> = (1..4).map(|k| mulm(fp[k], k as u128, p)).collect();
    if p < 5000 {
        return (0..p)
            .filter(|&r| eval_mod(&[fp[0], fp[1], fp[2], fp[3]], r, p) == 0 && {
                let d = dp.iter().rev().fold(0u128, |acc, &c| (mulm(acc, r, p) + c) % p);
                d == 0
            })
            .collect();
    }
    let mut d = dp.clone();
    trim(&mut d);
    if d.is_empty() {
        // F' vanishes identically mod p (p > 3): F is a constant
        return Vec::new();
    }
    let g = poly_gcd(&fp, &d, p);
    match g.len() {
        2 => vec![mulm(p - g[0], inv_p(g[1], p), p)],
        3 => {
            // (x − r)² up to a unit
            let r = mulm(p - g[1], inv_p(mulm(2, g[2], p), p), p);
            vec![r]
        }
        _ => Vec::new(),
    }
}

/// Maximality test on residues mod p² (coefficients given as (a,b,c,d)).
fn maximal_at_residues(f: [u128; 4], p: u128) -> bool {
    let m2 = p * p;
    let [a, b, c, d] = f;
    if a % p == 0 && b % p == 0 && c % p == 0 && d % p == 0 {
        return false;
    }
    if a % p == 0 && b % p == 0 && a % m2 == 0 {
        return false;
    }
    let asc = [d, c, b, a];
    for r in multiple_finite_roots(&asc, p) {
        if eval_mod(&asc, r, m2) == 0 {
            return false;
        }
    }
    true
}

/// Maximality at p of the ring of a form given by machine-integer coefficients.
pub fn is_maximal_at_i64(f: [i64; 4], p: u64) -> bool {
    let m2 = p as i128 * p as i128;
    let r = f.map(|c| (c as i128).rem_euclid(m2) as u128);
    maximal_at_residues(r, p as u128)
}

/// Whether R(f) ⊗ ℤ_p is maximal. Non-maximal at p requires p² | disc(f).
pub fn is_maximal_at(f: &BinaryCubicForm, p: u64) -> bool {
    let m2 = BigInt::from(p) * BigInt::from(p);
    let r = f.coeffs().map(|c| c.mod_floor(&m2).to_u128().unwrap_or(0));
    let out = maximal_at_residues(r, p as u128);
    if !out {
        let disc = discriminant(f);
        assert!(disc.is_zero() || (disc % &m2).is_zero(), "non-maximal at {p} without p² | disc");
    }
    out
}

/// Maximality at every prime.
pub fn is_maximal(f: &BinaryCubicForm) -> Result<bool> {
    let disc = discriminant(f);
    if disc.is_zero() {
        return Err(Error::ZeroDiscriminant);
    }
    let n = disc.abs();
    let primes: Vec<u64> = match n.to_u64() {
        Some(n) => arith::factor(n)?.into_iter().filter(|&(_, e)| e >= 2).map(|(p, _)| p).collect(),
        None => return Err(Error::Factorization(n.to_u128().unwrap_or(u128::MAX))),
    };
    Ok(primes.into_iter().all(|p| is_maximal_at(f, p)))
}

/// Dedekind's criterion for ℤ[x]/(g) at p, g monic cubic given with ascending
/// coefficients (d, c, b, 1).
pub fn dedekind_oracle(g: &[BigInt], p: u64) -> Result<bool> {
    if g.len() != 4 || !g[3].is_one() {
        return Err(Error::InvalidTask("dedekind_oracle needs a monic cubic".into()));
    }
    if !is_prime(p) || p > 10_000_000 {
        return Err(Error::PrimeTooLarge(p));
    }
    let pp = p as i128;
    let m2 = p * p;
    let gp: Vec<i128> = g.iter().map(|c| residue(c, p) as i128).collect();
    let g2: Vec<i128> = g.iter().map(|c| residue(c, m2) as i128).collect();
    // factor g mod p: linear factors with multiplicity, then the rest
    let mut rest = gp.clone();
    let mut roots: Vec<(i128, u32)> = Vec::new();
    for r in 0..pp {
        let mut e = 0;
        while rest.len() > 1 && eval_i(&rest, r, pp) == 0 {
            rest = div_linear(&rest, r, pp);
            e += 1;
        }
        if e > 0 {
            roots.push((r, e));
        }
        if rest.len() == 1 {
            break;
        }
    }
    // product of lifts
    let mut prod: Vec<i128> = rest.clone();
    for &(r, e) in &roots {
        for _ in 0..e {
            prod = mul_linear(&prod, r);
        }
    }
    let f: Vec<i128> = (0..4)
        .map(|k| {
            let diff = g2[k] - prod.get(k).copied().unwrap_or(0);
            debug_assert_eq!(diff % pp, 0);
            diff / pp
        })
        .collect();
    Ok(roots.iter().filter(|&&(_, e)| e >= 2).all(|&(r, _)| eval_i(&f, r, pp) != 0))
}

fn eval_i(p: &[i128], x: i128, m: i128) -> i128 {
    p.iter().rev().fold(0i128, |acc, &c| (acc * x + c).rem_euclid(m))
}

/// Quotient of p by (x − r) mod m, assuming exact division.
fn div_linear(p: &[i128], r: i128, m: i128) -> Vec<i128> {
    let n = p.len() - 1;
    let mut q = vec![0i128; n];
    let mut carry = 0i128;
    for k in (1..=n).rev() {
        carry = (carry * r + p[k]).rem_euclid(m);
        q[k - 1] = carry;
    }
    q
}

fn mul_linear(p: &[i128], r: i128) -> Vec<i128> {
    let mut out = vec![0i128; p.len() + 1];
    for (k, &c) in p.iter().enumerate() {
        out[k + 1] += c;
        out[k] -= r * c;
    }
    out
}

/// A set of coefficient vectors mod m, given as patterns with wildcards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruencePredicate {
    pub modulus: u64,
    pub patterns: Vec<[Option<u64>; 4]>,
}

impl CongruencePredicate {
    pub fn new(modulus: u64, patterns: Vec<[Option<u64>; 4]>) -> Result<Self> {
        if modulus == 0 || modulus > 1_000_000 {
            return Err(Error::InvalidTask(format!("modulus {modulus} outside 1..=10^6")));
        }
        if patterns.iter().flatten().flatten().any(|&r| r >= modulus) {
            return Err(Error::InvalidTask("residue not reduced modulo m".into()));
        }
        Ok(CongruencePredicate { modulus, patterns })
    }

    /// Parses `mod m` followed by one line of four residues (or `*`) per pattern.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut modulus = None;
        let mut patterns = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |column| Error::Parse { line: ln + 1, column, kind: ParseErrorKind::BadResidue(line.to_string()) };
            if modulus.is_none() {
                let m = line.strip_prefix("mod").ok_or(bad(1))?.trim().parse::<u64>().map_err(|_| bad(5))?;
                modulus = Some(m);
                continue;
            }
            let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            if fields.len() != 4 {
                return Err(Error::Parse { line: ln + 1, column: 1, kind: ParseErrorKind::MissingField });
            }
            let mut pat = [None; 4];
            for (k, s) in fields.iter().enumerate() {
                if *s != "*" {
                    pat[k] = Some(s.parse::<u64>().map_err(|_| bad(k + 1))?);
                }
            }
            patterns.push(pat);
        }
        let m = modulus.ok_or(Error::Parse { line: 1, column: 1, kind: ParseErrorKind::BadResidue("missing `mod m` line".into()) })?;
        Self::new(m, patterns)
    }

    pub fn everything(modulus: u64) -> Self {
        CongruencePredicate { modulus, patterns: vec![[None; 4]] }
    }

    pub fn matches(&self, f: &[i64; 4]) -> bool {
        let m = self.modulus as i64;
        let r = f.map(|c| c.rem_euclid(m) as u64);
        self.patterns.iter().any(|pat| pat.iter().zip(&r).all(|(p, v)| p.is_none_or(|p| p == *v)))
    }

    /// Number of residue vectors mod m matched by at least one pattern.
    pub fn count(&self) -> BigUint {
        let all: Vec<&[Option<u64>; 4]> = self.patterns.iter().collect();
        union_count(&all, 0, self.modulus)
    }

    /// Whether the predicate is a union of GL₂(ℤ)-orbits mod m, checked on the
    /// generators [[0,1],[1,0]], [[1,1],[0,1]] and diag(−1,1). Needs m ≤ 64.
    pub fn is_gl2_invariant(&self) -> Result<bool> {
        let m = self.modulus as i64;
        if m > 64 {
            return Err(Error::InvalidTask(format!("invariance check needs modulus ≤ 64, got {m}")));
        }
        let gens = [(0, 1, 1, 0), (1, 1, 0, 1), (-1, 0, 0, 1)].map(|(p, q, r, s)| UnimodularMatrix2::new(p, q, r, s).expect("generator"));
        for idx in 0..m.pow(4) {
            let f = [idx % m, idx / m % m, idx / (m * m) % m, idx / (m * m * m)];
            let here = self.matches(&f);
            for g in &gens {
                let h = act_i64(g, f).ok_or_else(|| Error::Invariant("overflow on residues".into()))?;
                if self.matches(&h) != here {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// count / m⁴.
    pub fn density(&self) -> BigRational {
        let total = BigInt::from(self.modulus).pow(4);
        BigRational::new(BigInt::from(self.count()), total)
    }
}

fn union_count(pats: &[&[Option<u64>; 4]], dim: usize, m: u64) -> BigUint {
    if pats.is_empty() {
        return BigUint::zero();
    }
    if dim == 4 {
        return BigUint::one();
    }
    let wild: Vec<&[Option<u64>; 4]> = pats.iter().copied().filter(|p| p[dim].is_none()).collect();
    let mut values: Vec<u64> = pats.iter().filter_map(|p| p[dim]).collect();
    values.sort_unstable();
    values.dedup();
    let mut total = BigUint::zero();
    for &v in &values {
        let sub: Vec<&[Option<u64>; 4]> = pats.iter().copied().filter(|p| p[dim].is_none_or(|x| x == v)).collect();
        total += union_count(&sub, dim + 1, m);
    }
    let others = m - values.len() as u64;
    if others > 0 && !wild.is_empty() {
        total += union_count(&wild, dim + 1, m) * BigUint::from(others);
    }
    total
}

/// Local condition whose p-adic density is computed.
#[derive(Debug, Clone)]
pub enum DensityPredicate {
    Maximal,
    Congruence(CongruencePredicate),
}

/// Exact p-adic density. Maximality is decided by residues mod p², so the
/// density is an exhaustive count over (ℤ/p²)⁴; congruence predicates need a
/// modulus that is a power of p.
pub fn local_density(p: u64, what: &DensityPredicate) -> Result<BigRational> {
    if !is_prime(p) {
        return Err(Error::InvalidTask(format!("{p} is not prime")));
    }
    match what {
        DensityPredicate::Maximal => {
            if p > 7 {
                return Err(Error::PrimeTooLarge(p));
            }
            let m2 = p * p;
            let mut count = 0u64;
            for a in 0..m2 {
                for b in 0..m2 {
                    for c in 0..m2 {
                        for d in 0..m2 {
                            if maximal_at_residues([a as u128, b as u128, c as u128, d as u128], p as u128) {
                                count += 1;
                            }
                        }
                    }
                }
            }
            Ok(BigRational::new(BigInt::from(count), BigInt::from(m2).pow(4)))
        }
        DensityPredicate::Congruence(pred) => {
            let mut m = pred.modulus;
            while m > 1 && m % p == 0 {
                m /= p;
            }
            if m != 1 {
                return Err(Error::InvalidTask(format!("modulus {} is not a power of {p}", pred.modulus)));
            }
            Ok(pred.density())
        }
    }
}

/// (1 − p⁻²)(1 − p⁻³).
pub fn maximal_density_closed_form(p: u64) -> BigRational {
    let p = BigInt::from(p);
    let one = BigRational::one();
    (&one - BigRational::new(BigInt::one(), &p * &p)) * (&one - BigRational::new(BigInt::one(), &p * &p * &p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(a: i64, b: i64, c: i64, d: i64) -> BinaryCubicForm {
        BinaryCubicForm::new(a, b, c, d)
    }

    fn g(b: i64, c: i64, d: i64) -> Vec<BigInt> {
        vec![d.into(), c.into(), b.into(), 1.into()]
    }

    #[test]
    fn maximal_at_examples() {
        assert!(!is_maximal_at(&f(1, 0, 0, -4), 2));
        assert!(is_maximal_at(&f(1, 0, 0, -2), 2));
        assert!(is_maximal_at(&f(1, 0, 0, -2), 3));
        assert!(!is_maximal_at(&f(2, 2, 2, 2), 2));
    }

    #[test]
    fn maximal_examples() {
        assert!(is_maximal(&f(1, 0, -1, -1)).unwrap());
        assert!(!is_maximal(&f(1, 0, 0, -4)).unwrap());
        assert!(is_maximal(&f(1, 1, -2, -1)).unwrap());
    }

    #[test]
    fn dedekind_examples() {
        assert!(dedekind_oracle(&g(0, -1, -1), 23).unwrap());
        assert!(!dedekind_oracle(&g(0, 0, -4), 2).unwrap());
        assert!(dedekind_oracle(&g(0, 0, -2), 3).unwrap());
    }

    #[test]
    fn large_prime_path_agrees_with_brute_force() {
        // p = 5003 exceeds the brute-force threshold
        let p = 5003i64;
        for (r, s) in [(7i64, 11i64), (1, 2), (4000, 17)] {
            // (x − r)²(x − s) + p·(x + 1) and + p²
            let b = -(2 * r + s);
            let c = r * r + 2 * r * s;
            let d = -r * r * s;
            assert!(is_maximal_at_i64([1, b, c + p, d + p], p as u64));
            assert!(!is_maximal_at_i64([1, b, c + p, d - r * p], p as u64));
            assert!(!is_maximal_at_i64([1, b, c, d + p * p], p as u64));
            let gg = g(b, c + p, d + p);
            assert!(dedekind_oracle(&gg, p as u64).unwrap());
        }
    }

    #[test]
    fn densities() {
        let d2 = local_density(2, &DensityPredicate::Maximal).unwrap();
        assert_eq!(d2, BigRational::new(21.into(), 32.into()));
        let d3 = local_density(3, &DensityPredicate::Maximal).unwrap();
        assert_eq!(d3, BigRational::new(208.into(), 243.into()));
        assert_eq!(d2, maximal_density_closed_form(2));
        assert!(local_density(11, &DensityPredicate::Maximal).is_err());
    }

    #[test]
    fn congruence_predicates() {
        let pred = CongruencePredicate::parse("mod 2\n0 * * *\n").unwrap();
        assert_eq!(local_density(2, &DensityPredicate::Congruence(pred.clone())).unwrap(), BigRational::new(1.into(), 2.into()));
        assert!(pred.matches(&[4, 1, 1, 1]));
        assert!(!pred.matches(&[-3, 1, 1, 1]));
        let overlap = CongruencePredicate::parse("mod 4\n0 * * *\n0 1 * *\n* 1 * *\n").unwrap();
        // a≡0 or b≡1: 1/4 + 1/4 − 1/16
        assert_eq!(overlap.density(), BigRational::new(7.into(), 16.into()));
        assert!(local_density(3, &DensityPredicate::Congruence(overlap)).is_err());
        assert!(CongruencePredicate::parse("mod 3\n0 1 2\n").is_err());
        assert!(CongruencePredicate::parse("mod 3\n0 1 2 5\n").is_err());
    }

    #[test]
    fn invariance() {
        assert!(!CongruencePredicate::parse("mod 2\n0 * * *\n").unwrap().is_gl2_invariant().unwrap());
        assert!(CongruencePredicate::everything(6).is_gl2_invariant().unwrap());
        // f ≡ 0 mod 2 is preserved by every substitution
        assert!(CongruencePredicate::parse("mod 2\n0 0 0 0\n").unwrap().is_gl2_invariant().unwrap());
        assert!(CongruencePredicate::everything(65).is_gl2_invariant().is_err());
    }
}
