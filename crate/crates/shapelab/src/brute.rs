//! Completeness oracle for small discriminant bounds.
//!
//! Every form in a generous coefficient region is classified exactly, grouped
//! into GL₂(ℤ)-classes by a word search in the generators of GL₂(ℤ) that
//! descends the coefficient norm, and each class is then canonicalized. The
//! grouping and the canonical forms must induce the same partition.

use crate::enumerate::FieldClassRecord;
use crate::error::{Error, Result};
use crate::form::{classify, BinaryCubicForm, FormKind, UnimodularMatrix2};
use crate::local::is_maximal;
use crate::section::{act_i64, canonicalize_i64, disc_i128};
use crate::shape::shape_point;
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

pub const BRUTE_MAX_X: u64 = 10_000;

fn norm(f: &[i64; 4]) -> i128 {
    f.iter().map(|&c| c as i128 * c as i128).sum()
}

fn generators() -> Vec<UnimodularMatrix2> {
    [(0, 1, 1, 0), (1, 0, 1, 1), (1, 0, -1, 1), (1, 1, 0, 1), (1, -1, 0, 1), (1, 0, 0, -1), (-1, 0, 0, -1)]
        .iter()
        .map(|&(p, q, r, s)| UnimodularMatrix2::new(p, q, r, s).expect("unimodular generator"))
        .collect()
}

/// Orbit invariant found by search: the lexicographically least form of
/// minimal norm reachable from a local norm minimum through forms of bounded
/// norm.
fn orbit_key(f: [i64; 4], gens: &[UnimodularMatrix2]) -> Result<[i64; 4]> {
    let step = |g: &[i64; 4]| gens.iter().filter_map(|m| act_i64(m, *g)).collect::<Vec<_>>();
    let mut cur = f;
    loop {
        let best = step(&cur).into_iter().min_by_key(|g| (norm(g), *g));
        match best {
            Some(g) if norm(&g) < norm(&cur) => cur = g,
            _ => break,
        }
    }
    let cap = norm(&cur) * 4;
    let mut seen: HashSet<[i64; 4]> = HashSet::new();
    let mut queue = VecDeque::from([cur]);
    seen.insert(cur);
    let mut best = cur;
    while let Some(g) = queue.pop_front() {
        if (norm(&g), g) < (norm(&best), best) {
            best = g;
        }
        for h in step(&g) {
            if norm(&h) <= cap && seen.insert(h) {
                queue.push_back(h);
            }
        }
        if seen.len() > 200_000 {
            return Err(Error::Invariant(format!("orbit search around {f:?} did not terminate")));
        }
    }
    Ok(best)
}

/// One record per GL₂(ℤ)-class of irreducible forms with |disc| < X (all
/// signatures, cyclic fields included), in stream order.
pub fn brute_force_classes(x: u64) -> Result<Vec<FieldClassRecord>> {
    if !(1..=BRUTE_MAX_X).contains(&x) {
        return Err(Error::InvalidTask(format!("brute force needs 1 ≤ X ≤ {BRUTE_MAX_X}")));
    }
    let xf = x as f64;
    // twice the bounds met by a shape-reduced member after translating |b| ≤ 3a/2
    let a_max = 2 * ((64.0 * xf / 729.0).powf(0.25).floor() as i64 + 1);
    let p_max = 2 * (xf.sqrt() as i64 + 1);
    let gens = generators();
    let mut classes: HashMap<[i64; 4], Vec<[i64; 4]>> = HashMap::new();
    for a in 1..=a_max {
        for b in -3 * a..=3 * a {
            let b2 = b * b;
            let c_lo = (b2 - p_max).div_euclid(3 * a);
            let c_hi = (b2 + p_max).div_euclid(3 * a) + 1;
            for c in c_lo..=c_hi {
                let (af, bf, cf) = (a as f64, b as f64, c as f64);
                let p = bf * bf - 3.0 * af * cf;
                let k = 27.0 * af * af;
                let d0 = (9.0 * af * bf * cf - 2.0 * bf * bf * bf) / k;
                let dmax = 4.0 * p * p * p / k;
                if dmax + xf < 0.0 {
                    continue;
                }
                let r = ((dmax + xf) / k).sqrt() + 2.0;
                for d in (d0 - r).floor() as i64..=(d0 + r).ceil() as i64 {
                    let f = [a, b, c, d];
                    let disc = disc_i128(f);
                    if disc == 0 || disc.unsigned_abs() >= x as u128 {
                        continue;
                    }
                    let kind = classify(&BinaryCubicForm::from_array(f)).kind;
                    if matches!(kind, FormKind::Reducible | FormKind::ZeroDisc) {
                        continue;
                    }
                    classes.entry(orbit_key(f, &gens)?).or_default().push(f);
                }
            }
        }
    }
    let mut records = BTreeMap::new();
    for (key, members) in classes {
        let canon = canonicalize_i64(members[0])?;
        for m in &members[1..] {
            if canonicalize_i64(*m)? != canon {
                return Err(Error::Invariant(format!("{m:?} and {:?} share a class but not a canonical form", members[0])));
            }
        }
        let form = BinaryCubicForm::from_array(canon);
        let cls = classify(&form);
        let disc = disc_i128(canon) as i64;
        let rec = FieldClassRecord {
            form: canon,
            disc,
            signature: cls.signature.unwrap_or(0),
            s3: cls.kind == FormKind::IrreducibleS3,
            maximal: is_maximal(&form)?,
            shape: shape_point(&form)?,
        };
        if records.insert(rec.sort_key(), rec).is_some() {
            return Err(Error::Invariant(format!("two classes canonicalize to {canon:?} (search key {key:?})")));
        }
    }
    Ok(records.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_bounds() {
        let r = brute_force_classes(50).unwrap();
        let neg: Vec<i64> = r.iter().filter(|r| r.signature == 1).map(|r| r.disc).collect();
        assert_eq!(neg, vec![-23, -31, -44]);
        assert!(r.iter().filter(|r| r.signature == 0).all(|r| !r.s3));
        assert!(brute_force_classes(20_000).is_err());
    }

    #[test]
    fn equivalent_forms_share_a_key() {
        let gens = generators();
        let f = [1, 0, -1, -1];
        let g = act_i64(&UnimodularMatrix2::new(2, 3, 1, 2).unwrap(), f).unwrap();
        assert_eq!(orbit_key(f, &gens).unwrap(), orbit_key(g, &gens).unwrap());
    }
}
