//! Shape quadratic forms, their reduction and canonical coordinates.

use crate::embed::{embeddings, EmbeddingData, DEFAULT_PRECISION};
use crate::error::{Error, Result};
use crate::form::{hessian, BinaryCubicForm, UnimodularMatrix2};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

/// Tolerance used to snap points to the boundary of the fundamental domain.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Symmetric positive definite Gram matrix of rank 2, 3 or 4, row-major.
/// Matrices that differ by a positive scalar represent the same shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeGram {
    rank: usize,
    entries: Vec<f64>,
}

impl ShapeGram {
    pub fn new(rank: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != rank * rank || !(1..=4).contains(&rank) {
            return Err(Error::Singular);
        }
        let norm = entries.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..rank {
            for j in 0..i {
                if (entries[i * rank + j] - entries[j * rank + i]).abs() > 1e-12 * norm {
                    return Err(Error::NotPositiveDefinite);
                }
            }
        }
        for k in 1..=rank {
            let minor: Vec<f64> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).map(|(i, j)| entries[i * rank + j]).collect();
            if det(&minor, k) <= 1e-12 * norm.powi(k as i32) {
                return Err(Error::NotPositiveDefinite);
            }
        }
        Ok(ShapeGram { rank, entries })
    }

    pub fn rank2(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(2, vec![a, b, b, c])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.rank + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn det(&self) -> f64 {
        det(&self.entries, self.rank)
    }

    /// Rescaled copy with determinant one.
    pub fn normalized(&self) -> ShapeGram {
        let s = self.det().powf(1.0 / self.rank as f64);
        ShapeGram { rank: self.rank, entries: self.entries.iter().map(|v| v / s).collect() }
    }

    /// Largest entrywise difference after normalizing both to determinant one.
    pub fn shape_distance(&self, other: &ShapeGram) -> f64 {
        let a = self.normalized();
        let b = other.normalized();
        a.entries.iter().zip(&b.entries).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(m: &[f64], n: usize) -> f64 {
    let mut a = m.to_vec();
    let mut d = 1.0;
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().partial_cmp(&a[j * n + col].abs()).unwrap()).unwrap();
        if a[piv * n + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            d = -d;
        }
        let p = a[col * n + col];
        d *= p;
        for i in col + 1..n {
            let f = a[i * n + col] / p;
            for k in col..n {
                a[i * n + k] -= f * a[col * n + k];
            }
        }
    }
    d
}

/// Point of the upper half-plane in the fundamental domain
/// {0 ≤ x ≤ 1/2, x² + y² ≥ 1}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UHPoint {
    pub x: f64,
    pub y: f64,
}

impl UHPoint {
    /// Validates the domain invariants and snaps points within the boundary
    /// tolerance onto the boundary.
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !(x >= -BOUNDARY_TOL) || !(x <= 0.5 + BOUNDARY_TOL) || x * x + y * y < 1.0 - BOUNDARY_TOL {
            return Err(Error::OutsideDomain { x, y });
        }
        Ok(Self::snap(x, y))
    }

    fn snap(mut x: f64, mut y: f64) -> Self {
        if x.abs() <= BOUNDARY_TOL {
            x = 0.0;
        } else if (x - 0.5).abs() <= BOUNDARY_TOL {
            x = 0.5;
        }
        if (x * x + y * y - 1.0).abs() <= BOUNDARY_TOL {
            y = (1.0 - x * x).sqrt();
        }
        UHPoint { x, y }
    }

    /// Coordinates of a weakly reduced Gram [[A,B],[B,C]] (|2B| ≤ A ≤ C).
    pub fn from_reduced(a: f64, b: f64, c: f64) -> Result<Self> {
        let y = (a * c - b * b).sqrt() / a;
        UHPoint::new(b.abs() / a, y)
    }
}

/// Gauss reduction of a rank-2 Gram matrix. Returns the point and γ with
/// γᵀGγ = [[A,B],[B,C]], 0 ≤ 2B ≤ A ≤ C.
pub fn gauss_reduce(g: &ShapeGram) -> Result<(UHPoint, UnimodularMatrix2)> {
    if g.rank() != 2 {
        return Err(Error::Singular);
    }
    let (mut a, mut b, mut c) = (g.get(0, 0), g.get(0, 1), g.get(1, 1));
    let eps = 1e-13;
    let mut m = UnimodularMatrix2::IDENTITY;
    for _ in 0..10_000 {
        if (2.0 * b).abs() > a * (1.0 + eps) {
            let k = (b / a).round();
            let t = UnimodularMatrix2::new(1, -(k as i64), 0, 1)?;
            c = c - 2.0 * k * b + k * k * a;
            b -= k * a;
            m = m.mul(&t);
        }
        if a > c * (1.0 + eps) {
            std::mem::swap(&mut a, &mut c);
            m = m.mul(&UnimodularMatrix2::new(0, 1, 1, 0)?);
            continue;
        }
        if (2.0 * b).abs() <= a * (1.0 + eps) {
            break;
        }
    }
    if b < 0.0 {
        b = -b;
        m = m.mul(&UnimodularMatrix2::new(1, 0, 0, -1)?);
    }
    let p = UHPoint::from_reduced(a, b, c)?;
    Ok((p, m))
}

/// Gram of the trace-zero projection of ⟨ω, θ⟩ under the Minkowski form.
pub fn shape_gram(e: &EmbeddingData) -> Result<ShapeGram> {
    let [a, b, c, d] = e.form;
    let tr = [-b, c];
    let v = [e.omega, e.theta];
    let mut g = [[0.0; 2]; 2];
    for j in 0..2 {
        for k in 0..2 {
            let s: f64 = (0..3).map(|t| (v[j][t] * v[k][t].conj()).re).sum();
            g[j][k] = s - tr[j] * tr[k] / 3.0;
        }
    }
    let off = 0.5 * (g[0][1] + g[1][0]);
    let gram = ShapeGram::rank2(g[0][0], off, g[1][1])?;
    let want = e.disc.abs() / 3.0;
    let rel = (gram.det() - want).abs() / want;
    if rel > 1e-9 {
        return Err(Error::Invariant(format!("shape determinant off by {rel:e}")));
    }
    if e.signature == 0 {
        let p = b * b - 3.0 * a * c;
        let q = b * c - 9.0 * a * d;
        let r = c * c - 3.0 * b * d;
        let scale = p.abs().max(q.abs()).max(r.abs());
        let err = (3.0 * g[0][0] - 2.0 * p).abs().max((3.0 * off - q).abs()).max((3.0 * g[1][1] - 2.0 * r).abs());
        if err > 1e-9 * scale {
            return Err(Error::Invariant(format!("hessian identity off by {:e}", err / scale)));
        }
    }
    Ok(gram)
}

/// Closed form of the shape Gram of a real form with nonzero discriminant:
/// (2/3)·Hessian when the discriminant is positive, and
/// (2/3)·Hessian + |D|/f'(ρ)²·(x − ρy)² otherwise, ρ the real root of f(x,1).
pub fn closed_form_gram(form: [f64; 4], disc: f64) -> Option<[f64; 3]> {
    let [a, b, c, d] = form;
    let p = b * b - 3.0 * a * c;
    let q = b * c - 9.0 * a * d;
    let r = c * c - 3.0 * b * d;
    if disc > 0.0 {
        return Some([2.0 * p / 3.0, q / 3.0, 2.0 * r / 3.0]);
    }
    if a == 0.0 || disc == 0.0 {
        return None;
    }
    let rho = crate::roots::cubic_real_roots(a, b, c, d)[0];
    Some(closed_form_gram_at(form, disc, rho))
}

/// Closed form for negative discriminant given the real root ρ.
pub fn closed_form_gram_at(form: [f64; 4], disc: f64, rho: f64) -> [f64; 3] {
    let [a, b, c, d] = form;
    let p = b * b - 3.0 * a * c;
    let q = b * c - 9.0 * a * d;
    let r = c * c - 3.0 * b * d;
    let fp = (3.0 * a * rho + 2.0 * b) * rho + c;
    let k = disc.abs() / (fp * fp);
    [2.0 * p / 3.0 + k, q / 3.0 - k * rho, 2.0 * r / 3.0 + k * rho * rho]
}

/// Canonical point of the shape of R(f).
pub fn shape_point(f: &BinaryCubicForm) -> Result<UHPoint> {
    let e = embeddings(f, DEFAULT_PRECISION)?;
    let g = shape_gram(&e)?;
    Ok(gauss_reduce(&g)?.0)
}

/// Exact integer Hessian entries as floats, for comparisons.
pub fn hessian_f64(f: &BinaryCubicForm) -> [f64; 3] {
    let h = hessian(f);
    [h.p.to_f64().unwrap_or(f64::NAN), h.q.to_f64().unwrap_or(f64::NAN), h.r.to_f64().unwrap_or(f64::NAN)]
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Gram of the trace-zero sublattice {n·u_j − Tr(u_j)} of ℤ + n·R, given the
/// real Minkowski coordinates of a basis (1, u₂, …, u_n).
pub fn shape_via_sublattice(basis: &[Vec<f64>], n: usize) -> Result<ShapeGram> {
    if basis.len() != n || basis.iter().any(|v| v.len() != n) || n < 2 {
        return Err(Error::Singular);
    }
    let one = &basis[0];
    let w: Vec<Vec<f64>> = basis[1..]
        .iter()
        .map(|u| {
            let tr = dot(u, one);
            u.iter().zip(one).map(|(x, o)| n as f64 * x - tr * o).collect()
        })
        .collect();
    let m = n - 1;
    let mut g = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            g[i * m + j] = dot(&w[i], &w[j]);
        }
    }
    ShapeGram::new(m, g).map_err(|_| Error::Singular)
}

/// Gram of the projection of (u₂, …, u_n) orthogonally to 1.
pub fn shape_via_projection(basis: &[Vec<f64>], n: usize) -> Result<ShapeGram> {
    let one = &basis[0];
    let m = n - 1;
    let tr: Vec<f64> = basis.iter().map(|u| dot(u, one)).collect();
    let mut g = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            g[i * m + j] = dot(&basis[i + 1], &basis[j + 1]) - tr[i + 1] * tr[j + 1] / n as f64;
        }
    }
    ShapeGram::new(m, g)
}

/// Relative deviation of det(full Gram) from |disc|.
pub fn gram_det_check(full_gram: &[f64], n: usize, disc: f64) -> f64 {
    (det(full_gram, n).abs() - disc.abs()).abs() / disc.abs()
}

/// Reduced Gram (determinant one) and the integer transform T with TᵀGT reduced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedGram {
    pub gram: ShapeGram,
    /// Column-major: column k holds the coordinates of the k-th reduced vector.
    pub transform: Vec<i64>,
}

fn transform_gram(g: &ShapeGram, cols: &[Vec<i64>]) -> Vec<f64> {
    let m = g.rank();
    let mut out = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            let mut s = 0.0;
            for k in 0..m {
                for l in 0..m {
                    s += cols[i][k] as f64 * g.get(k, l) * cols[j][l] as f64;
                }
            }
            out[i * m + j] = s;
        }
    }
    out
}

/// LLL reduction with δ = 0.99 on a Gram matrix; returns the basis as integer
/// coefficient columns.
fn lll(g: &ShapeGram) -> Vec<Vec<i64>> {
    let m = g.rank();
    let mut basis: Vec<Vec<i64>> = (0..m).map(|i| (0..m).map(|j| (i == j) as i64).collect()).collect();
    let inner = |u: &[i64], v: &[i64]| -> f64 {
        let mut s = 0.0;
        for k in 0..m {
            for l in 0..m {
                s += u[k] as f64 * g.get(k, l) * v[l] as f64;
            }
        }
        s
    };
    let delta = 0.99;
    let gso = |basis: &Vec<Vec<i64>>| -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut mu = vec![vec![0.0; m]; m];
        let mut bstar = vec![0.0; m];
        for i in 0..m {
            let mut norm = inner(&basis[i], &basis[i]);
            for j in 0..i {
                let mut r = inner(&basis[i], &basis[j]);
                for k in 0..j {
                    r -= mu[j][k] * mu[i][k] * bstar[k];
                }
                mu[i][j] = r / bstar[j];
                norm -= mu[i][j] * mu[i][j] * bstar[j];
            }
            bstar[i] = norm;
        }
        (mu, bstar)
    };
    let mut k = 1;
    let mut guard = 0;
    while k < m && guard < 100_000 {
        guard += 1;
        for j in (0..k).rev() {
            let (mu, _) = gso(&basis);
            let r = mu[k][j].round() as i64;
            if r != 0 {
                let bj = basis[j].clone();
                for (x, y) in basis[k].iter_mut().zip(&bj) {
                    *x -= r * y;
                }
            }
        }
        let (mu, bstar) = gso(&basis);
        if bstar[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1] {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            k = k.max(2) - 1;
        }
    }
    basis
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// gcd of all k×k minors of the columns; 1 iff they extend to a basis.
fn minors_gcd(cols: &[Vec<i64>], m: usize) -> i64 {
    let k = cols.len();
    let mut g = 0;
    let rows: Vec<Vec<usize>> = combinations(m, k);
    for r in rows {
        let sub: Vec<f64> = (0..k).flat_map(|i| r.iter().map(move |&row| (i, row))).map(|(i, row)| cols[i][row] as f64).collect();
        let d = det(&sub, k).round() as i64;
        g = gcd(g, d);
        if g == 1 {
            return 1;
        }
    }
    g
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut cur, &mut out);
    out
}

/// LLL (δ = 0.99) followed by greedy Minkowski reduction over short vectors,
/// normalized to determinant one. Ties in length are broken by the
/// lexicographic order of the coefficient vectors.
pub fn lll_minkowski_reduce(g: &ShapeGram) -> Result<ReducedGram> {
    let m = g.rank();
    if !(2..=4).contains(&m) {
        return Err(Error::Singular);
    }
    if g.det() <= 0.0 {
        return Err(Error::Singular);
    }
    let base = lll(g);
    let k = 3i64;
    let mut cands: Vec<(f64, Vec<i64>)> = Vec::new();
    let total = (2 * k + 1).pow(m as u32);
    for idx in 0..total {
        let mut t = idx;
        let mut coef = vec![0i64; m];
        for c in coef.iter_mut() {
            *c = t % (2 * k + 1) - k;
            t /= 2 * k + 1;
        }
        if coef.iter().all(|&c| c == 0) {
            continue;
        }
        let mut v = vec![0i64; m];
        for (c, b) in coef.iter().zip(&base) {
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi += c * bi;
            }
        }
        if let Some(first) = v.iter().find(|&&x| x != 0) {
            if *first < 0 {
                continue;
            }
        }
        let norm: f64 = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| v[i] as f64 * g.get(i, j) * v[j] as f64).sum();
        cands.push((norm, v));
    }
    cands.sort_by(|a, b| {
        let scale = a.0.max(b.0);
        if (a.0 - b.0).abs() <= 1e-12 * scale {
            b.1.cmp(&a.1)
        } else {
            a.0.partial_cmp(&b.0).unwrap()
        }
    });
    cands.dedup_by(|a, b| a.1 == b.1);
    let mut chosen: Vec<Vec<i64>> = Vec::new();
    for (_, v) in &cands {
        let mut trial = chosen.clone();
        trial.push(v.clone());
        if minors_gcd(&trial, m) == 1 {
            chosen = trial;
            if chosen.len() == m {
                break;
            }
        }
    }
    if chosen.len() != m {
        return Err(Error::Singular);
    }
    let red = transform_gram(g, &chosen);
    let gram = ShapeGram::new(m, red)?.normalized();
    let transform = chosen.into_iter().flatten().collect();
    Ok(ReducedGram { gram, transform })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn gauss_examples() {
        let (p, m) = gauss_reduce(&ShapeGram::rank2(2.0, 1.0, 2.0).unwrap()).unwrap();
        assert_eq!((p.x, m), (0.5, UnimodularMatrix2::IDENTITY));
        assert!(close(p.y, 3f64.sqrt() / 2.0, 1e-15));
        let (p, _) = gauss_reduce(&ShapeGram::rank2(1.0, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!((p.x, p.y), (0.0, 1.0));
        let (p, _) = gauss_reduce(&ShapeGram::rank2(20.0, -6.0, 24.0).unwrap()).unwrap();
        assert!(close(p.x, 0.3, 1e-15) && close(p.y, 444f64.sqrt() / 20.0, 1e-15));
        let (p, _) = gauss_reduce(&ShapeGram::rank2(4.0, 2.0, 2.0).unwrap()).unwrap();
        assert_eq!((p.x, p.y), (0.0, 1.0));
    }

    #[test]
    fn gauss_transform_reduces() {
        let g = ShapeGram::rank2(7.0, 11.3, 19.0).unwrap();
        let (p, m) = gauss_reduce(&g).unwrap();
        let [a, b, c, d] = m.entries().map(|v| v as f64);
        let ra = a * a * 7.0 + 2.0 * a * c * 11.3 + c * c * 19.0;
        let rb = a * b * 7.0 + (a * d + b * c) * 11.3 + c * d * 19.0;
        let rc = b * b * 7.0 + 2.0 * b * d * 11.3 + d * d * 19.0;
        assert!(0.0 <= 2.0 * rb && 2.0 * rb <= ra && ra <= rc);
        assert!(close(p.x, rb / ra, 1e-12));
    }

    #[test]
    fn rejects_indefinite() {
        assert!(ShapeGram::rank2(1.0, 2.0, 1.0).is_err());
        assert!(ShapeGram::rank2(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn shape_points() {
        let p = shape_point(&BinaryCubicForm::new(1, 1, -2, -1)).unwrap();
        assert!(close(p.x, 0.5, 1e-9) && close(p.y, 0.866_025_403_8, 1e-9));
        let p = shape_point(&BinaryCubicForm::new(1, -1, -3, 1)).unwrap();
        assert!(close(p.x, 0.3, 1e-9) && close(p.y, 1.053_565_375_2, 1e-9));
        let p1 = shape_point(&BinaryCubicForm::new(1, 3, 2, -1)).unwrap();
        let p2 = shape_point(&BinaryCubicForm::new(1, 0, -1, -1)).unwrap();
        assert!(close(p1.x, p2.x, 1e-9) && close(p1.y, p2.y, 1e-9));
    }

    #[test]
    fn cubic_grams() {
        let e = embeddings(&BinaryCubicForm::new(1, 1, -2, -1), DEFAULT_PRECISION).unwrap();
        let g = shape_gram(&e).unwrap();
        assert!(close(3.0 * g.get(0, 0), 14.0, 1e-12) && close(3.0 * g.get(0, 1), 7.0, 1e-12));
        let e = embeddings(&BinaryCubicForm::new(1, -1, -3, 1), DEFAULT_PRECISION).unwrap();
        let g = shape_gram(&e).unwrap();
        assert!(close(3.0 * g.get(0, 0), 20.0, 1e-12) && close(3.0 * g.get(0, 1), -6.0, 1e-12));
        assert!(close(3.0 * g.get(1, 1), 24.0, 1e-12));
        let e = embeddings(&BinaryCubicForm::new(1, 0, -1, -1), DEFAULT_PRECISION).unwrap();
        let g = shape_gram(&e).unwrap();
        assert!(close(g.det(), 23.0 / 3.0, 1e-9 * 23.0 / 3.0));
    }

    #[test]
    fn closed_form_matches_embeddings() {
        for f in [[1, 0, -1, -1], [1, 3, 2, -1], [2, -1, 3, 5], [1, 0, 0, -2], [3, 1, -4, 7]] {
            let form = BinaryCubicForm::from_array(f);
            let e = embeddings(&form, DEFAULT_PRECISION).unwrap();
            let g = shape_gram(&e).unwrap();
            let cf = closed_form_gram(e.form, e.disc).unwrap();
            for (x, y) in [g.get(0, 0), g.get(0, 1), g.get(1, 1)].iter().zip(cf) {
                assert!((x - y).abs() < 1e-10 * (1.0 + x.abs()), "{f:?}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn cubic_lattice_projection_is_hexagonal() {
        let basis = vec![vec![1.0, 1.0, 1.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let g = shape_via_sublattice(&basis, 3).unwrap();
        let (p, _) = gauss_reduce(&g).unwrap();
        assert!(close(p.x, 0.5, 1e-12) && close(p.y, 3f64.sqrt() / 2.0, 1e-12));
    }

    #[test]
    fn minkowski_examples() {
        let id = ShapeGram::new(3, vec![1., 0., 0., 0., 1., 0., 0., 0., 1.]).unwrap();
        let r = lll_minkowski_reduce(&id).unwrap();
        assert_eq!(r.gram.entries(), id.entries());
        assert_eq!(r.transform, vec![1, 0, 0, 0, 1, 0, 0, 0, 1]);
        let g = ShapeGram::new(3, vec![4., 0., 0., 0., 1., 0., 0., 0., 1.]).unwrap();
        let r = lll_minkowski_reduce(&g).unwrap();
        let s = 4f64.powf(1.0 / 3.0);
        let want = [1.0 / s, 0.0, 0.0, 0.0, 1.0 / s, 0.0, 0.0, 0.0, 4.0 / s];
        for (x, y) in r.gram.entries().iter().zip(want) {
            assert!(close(*x, y, 1e-12));
        }
        assert_eq!(r.transform, vec![0, 1, 0, 0, 0, 1, 1, 0, 0]);
    }
}
