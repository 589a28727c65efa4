//! Small-integer arithmetic: primes, primality and factorization of u64.

use crate::error::{Error, Result};
use num_integer::Integer;

pub fn primes_below(n: u64) -> Vec<u64> {
    if n < 3 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i < n {
        if sieve[i] {
            let mut j = i * i;
            while j < n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve.iter().enumerate().filter(|(_, &p)| p).map(|(i, _)| i as u64).collect()
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho(n: u64) -> Option<u64> {
    if n.is_multiple_of(2) {
        return Some(2);
    }
    for c in 1..200u64 {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = (x.abs_diff(y)).gcd(&n);
        }
        if d != n {
            return Some(d);
        }
    }
    None
}

/// Prime factorization with multiplicities, in increasing order.
pub fn factor(n: u64) -> Result<Vec<(u64, u32)>> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    let mut m = n;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let mut e = 0;
        while m.is_multiple_of(p) && m > 0 {
            m /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    let mut stack = vec![m];
    let mut big = Vec::new();
    while let Some(k) = stack.pop() {
        if k == 1 {
            continue;
        }
        if is_prime(k) {
            big.push(k);
            continue;
        }
        let d = rho(k).ok_or(Error::Factorization(n as u128))?;
        stack.push(d);
        stack.push(k / d);
    }
    big.sort_unstable();
    for p in big {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out.sort_unstable();
    Ok(out)
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Trial-division helper for repeated use on integers below a fixed bound.
#[derive(Debug, Clone)]
pub struct SquareDivisors {
    primes: Vec<u64>,
    limit: u64,
}

impl SquareDivisors {
    /// Prepared for inputs below `max_n`.
    pub fn new(max_n: u64) -> Self {
        let cube = (max_n as f64).cbrt() as u64 + 2;
        SquareDivisors { primes: primes_below(cube + 1), limit: max_n }
    }

    /// Primes p with p² | n.
    pub fn primes(&self, n: u64) -> Result<Vec<u64>> {
        if n >= self.limit {
            return Ok(factor(n)?.into_iter().filter(|&(_, e)| e >= 2).map(|(p, _)| p).collect());
        }
        let mut out = Vec::new();
        let mut m = n;
        for &p in &self.primes {
            if p * p * p > m {
                break;
            }
            if m.is_multiple_of(p) {
                let mut e = 0;
                while m.is_multiple_of(p) {
                    m /= p;
                    e += 1;
                }
                if e >= 2 {
                    out.push(p);
                }
            }
        }
        // the cofactor has at most two prime factors, both above the cube root
        if m > 1 {
            let r = isqrt(m);
            if r * r == m {
                out.push(r);
            }
        }
        out.sort_unstable();
        Ok(out)
    }
}
