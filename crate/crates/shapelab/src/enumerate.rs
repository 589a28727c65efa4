//! Enumeration of canonical irreducible binary cubic forms by discriminant.
//!
//! Work is split into units (a, b₀, c-range) with b₀ running over residues mod
//! 3a. Every reduced form is a translate f(x + ky, y) of exactly one base form
//! (a, b₀, c, d); translation preserves the Hessian leading entry P, the
//! discriminant and the spread of the roots, which bound c and d.

use crate::arith::SquareDivisors;
use crate::error::{Error, Result};
use crate::form::BinaryCubicForm;
use crate::local::{is_maximal_at_i64, CongruencePredicate};
use crate::roots;
use crate::section::{disc_i128, hessian_i128, is_canonical_with, reduction_status_i64, translate, Reduction};
use crate::shape::{closed_form_gram_at, UHPoint};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Largest supported discriminant bound; keeps every intermediate in i128.
pub const MAX_X: u64 = 1 << 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignatureFilter {
    Zero,
    One,
    Both,
}

impl SignatureFilter {
    pub fn accepts(&self, i: u8) -> bool {
        matches!((self, i), (SignatureFilter::Both, _) | (SignatureFilter::Zero, 0) | (SignatureFilter::One, 1))
    }
}

impl FromStr for SignatureFilter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" => Ok(SignatureFilter::Zero),
            "1" => Ok(SignatureFilter::One),
            "both" => Ok(SignatureFilter::Both),
            _ => Err(Error::InvalidTask(format!("signature must be 0, 1 or both, not `{s}`"))),
        }
    }
}

impl fmt::Display for SignatureFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignatureFilter::Zero => "0",
            SignatureFilter::One => "1",
            SignatureFilter::Both => "both",
        })
    }
}

#[derive(Debug, Clone)]
pub struct EnumerationTask {
    /// Strict bound on |disc|.
    pub xmax: u64,
    pub signature: SignatureFilter,
    pub maximal_only: bool,
    pub include_c3: bool,
    pub congruence: Option<CongruencePredicate>,
}

impl EnumerationTask {
    pub fn new(xmax: u64, signature: SignatureFilter) -> Self {
        EnumerationTask { xmax, signature, maximal_only: false, include_c3: false, congruence: None }
    }

    pub fn maximal_only(mut self, yes: bool) -> Self {
        self.maximal_only = yes;
        self
    }

    pub fn include_c3(mut self, yes: bool) -> Self {
        self.include_c3 = yes;
        self
    }

    pub fn congruence(mut self, pred: Option<CongruencePredicate>) -> Self {
        self.congruence = pred;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.xmax < 1 || self.xmax > MAX_X {
            return Err(Error::InvalidTask(format!("X = {} outside 1..=2^50", self.xmax)));
        }
        if let Some(p) = &self.congruence {
            if p.modulus == 0 || p.modulus > 1_000_000 {
                return Err(Error::InvalidTask("congruence modulus must be at most 10^6".into()));
            }
        }
        Ok(())
    }

    fn keeps(&self, s3: bool, maximal: bool, form: &[i64; 4]) -> bool {
        (s3 || self.include_c3) && (maximal || !self.maximal_only) && self.congruence.as_ref().is_none_or(|p| p.matches(form))
    }
}

/// One GL₂(ℤ)-orbit of irreducible forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldClassRecord {
    /// Canonical representative (a, b, c, d).
    pub form: [i64; 4],
    pub disc: i64,
    pub signature: u8,
    /// False for cyclic cubic fields (square discriminant).
    pub s3: bool,
    pub maximal: bool,
    pub shape: UHPoint,
}

impl FieldClassRecord {
    pub fn form(&self) -> BinaryCubicForm {
        BinaryCubicForm::from_array(self.form)
    }

    /// Stream order (|disc|, a, b, c, d).
    pub fn sort_key(&self) -> (u64, [i64; 4]) {
        (self.disc.unsigned_abs(), self.form)
    }
}

/// Tallies of the counting path.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    /// Indexed by signature.
    pub total: [u64; 2],
    pub s3: [u64; 2],
    pub s3_maximal: [u64; 2],
    pub c3: [u64; 2],
    /// Classes kept by the task filters.
    pub kept: [u64; 2],
}

impl ClassCounts {
    fn merge(mut self, o: ClassCounts) -> ClassCounts {
        for i in 0..2 {
            self.total[i] += o.total[i];
            self.s3[i] += o.s3[i];
            self.s3_maximal[i] += o.s3_maximal[i];
            self.c3[i] += o.c3[i];
            self.kept[i] += o.kept[i];
        }
        self
    }
}

/// Coefficient bounds, all scaled by `slack` (1 in production, larger for audits).
#[derive(Debug, Clone, Copy)]
struct Bounds {
    x: u64,
    slack: f64,
    a_max: i64,
    p_max: i64,
    /// Upper bound on the Gram entry A = a²·Σ|ξ − mean|².
    big_a: f64,
}

impl Bounds {
    fn new(x: u64, slack: f64) -> Self {
        let xf = (x - 1) as f64;
        let a_max = ((64.0 * xf / 729.0).powf(0.25) * slack).floor() as i64 + 1;
        let p_max = (xf.sqrt() * slack).floor() as i64 + 1;
        let big_a = 2.0 / 3.0 * xf.sqrt() * slack;
        Bounds { x, slack, a_max, p_max, big_a }
    }
}

/// An integer range [lo, hi] of d for which |disc| may lie in the target window.
fn d_ranges(a: i64, b: i64, c: i64, p: i64, sig: u8, bd: &Bounds) -> Vec<(i64, i64)> {
    let (af, bf, cf, pf) = (a as f64, b as f64, c as f64, p as f64);
    let k = 27.0 * af * af;
    let d0 = (9.0 * af * bf * cf - 2.0 * bf * bf * bf) / k;
    let dmax = 4.0 * pf * pf * pf / k;
    let xf = (bd.x - 1) as f64;
    let p2 = pf * pf / (bd.slack * bd.slack);
    // |d − d0| ∈ [r_lo, r_hi]
    let (lo2, hi2) = if sig == 0 { ((dmax - xf) / k, (dmax - p2) / k) } else { ((dmax + p2.max(1.0)) / k, (dmax + xf) / k) };
    if hi2 < 0.0 {
        return Vec::new();
    }
    let r_hi = hi2.sqrt() * bd.slack + 2.0;
    let r_lo = if lo2 > 0.0 { (lo2.sqrt() / bd.slack - 2.0).max(0.0) } else { 0.0 };
    let mut out = Vec::with_capacity(2);
    let (mut w_lo, mut w_hi) = (f64::NEG_INFINITY, f64::INFINITY);
    if sig == 1 {
        // d = −a(m³ + m·e₂ + e₃) with |e₃| ≤ (S/3)^{3/2}, S ≤ A/a²
        let m = -bf / (3.0 * af);
        let e2 = -pf / k * 9.0;
        let centre = -af * (m * m * m + m * e2);
        let e3 = (bd.big_a / (af * af) / 3.0).powf(1.5);
        w_lo = centre - af * e3 - 2.0;
        w_hi = centre + af * e3 + 2.0;
    }
    let mut push = |lo: f64, hi: f64| {
        let lo = lo.max(w_lo).ceil();
        let hi = hi.min(w_hi).floor();
        if lo <= hi {
            out.push((lo as i64, hi as i64));
        }
    };
    if r_lo <= 0.0 {
        push(d0 - r_hi, d0 + r_hi);
    } else {
        push(d0 - r_hi, d0 - r_lo);
        push(d0 + r_lo, d0 + r_hi);
    }
    if out.len() == 2 && out[0].1 >= out[1].0 {
        out = vec![(out[0].0, out[1].1)];
    }
    out
}

/// Divisors of a positive integer.
fn divisors(n: i64) -> Vec<i64> {
    let mut v: Vec<i64> = (1..).take_while(|k| k * k <= n).filter(|k| n % k == 0).flat_map(|k| [k, n / k]).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Rational root test from floating point real roots; falls back to exact
/// isolation when the float roots are inconclusive.
pub fn is_irreducible_i64(f: [i64; 4], real_roots: &[f64], expected_real: usize) -> bool {
    let [a, _, _, d] = f;
    if a == 0 || d == 0 {
        return false;
    }
    if real_roots.len() != expected_real {
        return !crate::form::is_reducible(&BinaryCubicForm::from_array(f));
    }
    let [a1, b1, c1, d1] = f.map(|x| x as i128);
    for q in divisors(a.abs()) {
        for &r in real_roots {
            let p = (r * q as f64).round();
            if !p.is_finite() || p.abs() > 1e15 {
                return !crate::form::is_reducible(&BinaryCubicForm::from_array(f));
            }
            let p = p as i128;
            let q = q as i128;
            if a1 * p * p * p + b1 * p * p * q + c1 * p * q * q + d1 * q * q * q == 0 {
                return false;
            }
        }
    }
    true
}

fn isqrt_i128(n: i128) -> i128 {
    if n <= 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Everything learned about an accepted canonical form.
struct Accepted {
    form: [i64; 4],
    disc: i128,
    sig: u8,
    /// ρ for negative discriminants.
    rho: f64,
}

/// Runs the candidate pipeline on one unit and hands each canonical form to `sink`.
fn run_unit(a: i64, b0: i64, c_lo: i64, c_hi: i64, sig_filter: SignatureFilter, bd: &Bounds, sink: &mut dyn FnMut(Accepted)) {
    let x = bd.x as i128;
    for c in c_lo..=c_hi {
        let p = b0 as i128 * b0 as i128 - 3 * a as i128 * c as i128;
        for sig in [0u8, 1] {
            if !sig_filter.accepts(sig) || (sig == 0 && p <= 0) {
                continue;
            }
            for (dlo, dhi) in d_ranges(a, b0, c, p as i64, sig, bd) {
                for d in dlo..=dhi {
                    let base = [a, b0, c, d];
                    let disc = disc_i128(base);
                    if disc == 0 || disc.abs() >= x || (disc > 0) != (sig == 0) {
                        continue;
                    }
                    if sig == 0 {
                        candidate_real(base, disc, bd, sink);
                    } else {
                        candidate_complex(base, disc, bd, sink);
                    }
                }
            }
        }
    }
}

fn candidate_real(base: [i64; 4], disc: i128, bd: &Bounds, sink: &mut dyn FnMut(Accepted)) {
    let [p, q, r] = hessian_i128(base);
    if p * p > disc * ((bd.slack * bd.slack).ceil() as i128) {
        return;
    }
    // Q + 2Pk ∈ [−P, P]
    let k_lo = (-p - q).div_euclid(2 * p) + i128::from((-p - q).rem_euclid(2 * p) != 0);
    let k_hi = (p - q).div_euclid(2 * p);
    let mut roots_cache: Option<Vec<f64>> = None;
    for k in k_lo..=k_hi {
        let q2 = q + 2 * p * k;
        let r2 = r + q * k + p * k * k;
        if r2 < p {
            continue;
        }
        let Some(f) = translate(base, k as i64) else { continue };
        let status = if q2.abs() == p || r2 == p { Reduction::Boundary } else { Reduction::Interior };
        if status == Reduction::Interior && !(f[1] < 0 || (f[1] == 0 && f[3] <= 0)) {
            continue;
        }
        let rs = roots_cache.get_or_insert_with(|| roots::cubic_real_roots(base[0] as f64, base[1] as f64, base[2] as f64, base[3] as f64));
        if !is_irreducible_i64(base, rs, 3) {
            return;
        }
        if status == Reduction::Boundary && !is_canonical_with(f, status) {
            continue;
        }
        sink(Accepted { form: f, disc, sig: 0, rho: 0.0 });
    }
}

fn candidate_complex(base: [i64; 4], disc: i128, bd: &Bounds, sink: &mut dyn FnMut(Accepted)) {
    let [p, _, _] = hessian_i128(base);
    let dabs = -disc;
    if p * p > dabs * ((bd.slack * bd.slack).ceil() as i128) {
        return;
    }
    let [a, b, c, d] = base.map(|v| v as f64);
    let rho = roots::cubic_real_roots(a, b, c, d)[0];
    let g = closed_form_gram_at([a, b, c, d], disc as f64, rho);
    let (ga, gb, gc) = (g[0], g[1], g[2]);
    let tol = 1e-9;
    if ga > bd.slack * 2.0 / 3.0 * (dabs as f64).sqrt() * (1.0 + tol) {
        return;
    }
    let k0 = (-gb / ga).round() as i64;
    let mut irreducible: Option<bool> = None;
    for k in k0 - 1..=k0 + 1 {
        let kf = k as f64;
        let b2 = gb + kf * ga;
        let c2 = gc + 2.0 * kf * gb + kf * kf * ga;
        if (2.0 * b2).abs() > ga * (1.0 + tol) || c2 < ga * (1.0 - tol) {
            continue;
        }
        let Some(f) = translate(base, k) else { continue };
        let irr = *irreducible.get_or_insert_with(|| is_irreducible_i64(base, &[rho], 1));
        if !irr {
            return;
        }
        let status = reduction_status_i64(f);
        if status == Reduction::NotReduced || !is_canonical_with(f, status) {
            continue;
        }
        sink(Accepted { form: f, disc, sig: 1, rho: rho - kf });
    }
}

/// Work units (a, b₀, c-range) covering the search region.
fn units(bd: &Bounds, sig: SignatureFilter) -> Vec<(i64, i64, i64, i64)> {
    const CHUNK: i64 = 48;
    let mut out = Vec::new();
    for a in 1..=bd.a_max {
        for b0 in 0..3 * a {
            let b2 = b0 * b0;
            // P = b₀² − 3ac with −P_max ≤ P ≤ P_max (P > 0 when only i = 0)
            let p_lo = if sig == SignatureFilter::Zero { 1 } else { -bd.p_max };
            let c_lo = (b2 - bd.p_max).div_euclid(3 * a) - 1;
            let c_hi = (b2 - p_lo).div_euclid(3 * a) + 1;
            let mut c = c_lo;
            while c <= c_hi {
                let hi = (c + CHUNK - 1).min(c_hi);
                out.push((a, b0, c, hi));
                c = hi + 1;
            }
        }
    }
    out
}

fn shape_of(acc: &Accepted) -> Result<UHPoint> {
    let dabs = (acc.disc.abs()) as f64;
    if acc.sig == 0 {
        let [p, q, _] = hessian_i128(acc.form);
        let pf = p as f64;
        return UHPoint::new(q.abs() as f64 / (2.0 * pf), (3.0 * dabs).sqrt() / (2.0 * pf));
    }
    let [a, b, c, d] = acc.form.map(|v| v as f64);
    let rho = roots::polish_real(&[d, c, b, a], acc.rho);
    let g = closed_form_gram_at([a, b, c, d], acc.disc as f64, rho);
    UHPoint::new(g[1].abs() / g[0], (dabs / 3.0).sqrt() / g[0])
}

fn classify_accepted(acc: &Accepted, sq: &SquareDivisors) -> Result<(bool, bool)> {
    let n = acc.disc.unsigned_abs();
    let n64 = u64::try_from(n).map_err(|_| Error::Factorization(n))?;
    let s3 = acc.disc < 0 || {
        let r = isqrt_i128(acc.disc);
        r * r != acc.disc
    };
    let primes = sq.primes(n64)?;
    let maximal = primes.iter().all(|&p| is_maximal_at_i64(acc.form, p));
    Ok((s3, maximal))
}

fn enumerate_inner(task: &EnumerationTask, slack: f64) -> Result<Vec<FieldClassRecord>> {
    task.validate()?;
    let bd = Bounds::new(task.xmax, slack);
    let sq = SquareDivisors::new(task.xmax);
    let units = units(&bd, task.signature);
    let chunks: Vec<Result<Vec<FieldClassRecord>>> = units
        .par_iter()
        .map(|&(a, b0, c_lo, c_hi)| {
            let mut out = Vec::new();
            let mut err = None;
            run_unit(a, b0, c_lo, c_hi, task.signature, &bd, &mut |acc| {
                if err.is_some() {
                    return;
                }
                let res = classify_accepted(&acc, &sq).and_then(|(s3, maximal)| {
                    if !task.keeps(s3, maximal, &acc.form) {
                        return Ok(None);
                    }
                    let shape = shape_of(&acc)?;
                    Ok(Some(FieldClassRecord { form: acc.form, disc: acc.disc as i64, signature: acc.sig, s3, maximal, shape }))
                });
                match res {
                    Ok(Some(r)) => out.push(r),
                    Ok(None) => {}
                    Err(e) => err = Some(e),
                }
            });
            match err {
                Some(e) => Err(e),
                None => Ok(out),
            }
        })
        .collect();
    let mut all = Vec::new();
    for c in chunks {
        all.extend(c?);
    }
    all.par_sort_unstable_by_key(|r| r.sort_key());
    Ok(all)
}

/// Canonical irreducible forms with |disc| < X meeting the task filters, in
/// stream order (|disc|, a, b, c, d).
pub fn enumerate_classes(task: &EnumerationTask) -> Result<Vec<FieldClassRecord>> {
    enumerate_inner(task, 1.0)
}

/// The same enumeration with every coefficient bound scaled by `slack` ≥ 1.
/// Used to audit completeness: the result must not change.
pub fn enumerate_with_slack(task: &EnumerationTask, slack: f64) -> Result<Vec<FieldClassRecord>> {
    if !(slack >= 1.0) {
        return Err(Error::InvalidTask("slack must be at least 1".into()));
    }
    enumerate_inner(task, slack)
}

/// Counting path: tallies without materializing records or shapes.
pub fn count_classes(task: &EnumerationTask) -> Result<ClassCounts> {
    task.validate()?;
    let bd = Bounds::new(task.xmax, 1.0);
    let sq = SquareDivisors::new(task.xmax);
    let units = units(&bd, task.signature);
    units
        .par_iter()
        .map(|&(a, b0, c_lo, c_hi)| {
            let mut cnt = ClassCounts::default();
            let mut err = None;
            run_unit(a, b0, c_lo, c_hi, task.signature, &bd, &mut |acc| match classify_accepted(&acc, &sq) {
                Ok((s3, maximal)) => {
                    let i = acc.sig as usize;
                    cnt.total[i] += 1;
                    if s3 {
                        cnt.s3[i] += 1;
                        if maximal {
                            cnt.s3_maximal[i] += 1;
                        }
                    } else {
                        cnt.c3[i] += 1;
                    }
                    if task.keeps(s3, maximal, &acc.form) {
                        cnt.kept[i] += 1;
                    }
                }
                Err(e) => err = Some(e),
            });
            match err {
                Some(e) => Err(e),
                None => Ok(cnt),
            }
        })
        .try_reduce(ClassCounts::default, |x, y| Ok(x.merge(y)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn discs(task: &EnumerationTask) -> Vec<i64> {
        enumerate_classes(task).unwrap().iter().map(|r| r.disc).collect()
    }

    #[test]
    fn small_negative() {
        let t = EnumerationTask::new(50, SignatureFilter::One).maximal_only(true);
        assert_eq!(discs(&t), vec![-23, -31, -44]);
    }

    #[test]
    fn small_positive() {
        let t = EnumerationTask::new(150, SignatureFilter::Zero).maximal_only(true);
        assert_eq!(discs(&t), vec![148]);
        let t = EnumerationTask::new(150, SignatureFilter::Zero).maximal_only(true).include_c3(true);
        assert_eq!(discs(&t), vec![49, 81, 148]);
    }

    #[test]
    fn every_record_is_canonical() {
        let t = EnumerationTask::new(3000, SignatureFilter::Both).include_c3(true);
        for r in enumerate_classes(&t).unwrap() {
            assert!(crate::section::is_canonical(&r.form()), "{:?}", r.form);
        }
    }

    #[test]
    fn counts_match_records() {
        let t = EnumerationTask::new(5000, SignatureFilter::Both).include_c3(true);
        let recs = enumerate_classes(&t).unwrap();
        let cnt = count_classes(&t).unwrap();
        for i in 0..2u8 {
            let n = recs.iter().filter(|r| r.signature == i).count() as u64;
            assert_eq!(cnt.total[i as usize], n);
            let m = recs.iter().filter(|r| r.signature == i && r.s3 && r.maximal).count() as u64;
            assert_eq!(cnt.s3_maximal[i as usize], m);
        }
    }
}
