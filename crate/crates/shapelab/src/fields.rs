//! Field tables of degree 3 to 5: parsing, the covolume gate and reduced shapes.

use crate::error::{Error, ParseErrorKind, Result};
use crate::exact::{root_bound, Sturm};
use crate::roots::{error_radius, poly_roots};
use crate::shape::{gauss_reduce, gram_det_check, lll_minkowski_reduce, shape_via_projection, shape_via_sublattice, ShapeGram, UHPoint};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

/// Relative root accuracy required before embedding a basis.
const ROOT_PRECISION: f64 = 1e-12;
const COVOLUME_TOL: f64 = 1e-8;
const ROUTE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldTableRecord {
    pub label: String,
    pub degree: usize,
    pub i: usize,
    pub disc: BigInt,
    /// Monic defining polynomial, ascending coefficients.
    pub poly: Vec<BigInt>,
    /// Rows are basis elements in the power basis 1, θ, …, θⁿ⁻¹.
    pub basis: Vec<Vec<BigRational>>,
}

const COLUMNS: [&str; 6] = ["label", "degree", "i", "disc", "poly", "basis"];

fn perr(line: usize, column: usize, kind: ParseErrorKind) -> Error {
    Error::Parse { line, column, kind }
}

fn parse_int(s: &str) -> Option<BigInt> {
    s.trim().parse().ok()
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (parse_int(n)?, parse_int(d)?),
        None => (parse_int(s)?, BigInt::one()),
    };
    (!d.is_zero()).then(|| BigRational::new(n, d))
}

fn rational_det(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            let f = &a[r][col] / &p;
            for k in col..n {
                let t = &f * &a[col][k];
                a[r][k] -= t;
            }
        }
    }
    det
}

fn real_root_count(poly: &[BigInt]) -> usize {
    let b = root_bound(poly);
    Sturm::new(poly).count(&-b.clone(), &b)
}

fn parse_row(line: usize, fields: &csv::StringRecord) -> Result<FieldTableRecord> {
    let get = |k: usize| fields.get(k).map(str::trim).ok_or_else(|| perr(line, k + 1, ParseErrorKind::MissingField));
    let label = get(0)?.to_string();
    let degree: usize = get(1)?.parse().map_err(|_| perr(line, 2, ParseErrorKind::BadInteger(get(1).unwrap_or("").into())))?;
    if !(3..=5).contains(&degree) {
        return Err(perr(line, 2, ParseErrorKind::DegreeMismatch(format!("degree {degree} not in 3..=5"))));
    }
    let i: usize = get(2)?.parse().map_err(|_| perr(line, 3, ParseErrorKind::BadInteger(get(2).unwrap_or("").into())))?;
    let disc = parse_int(get(3)?).ok_or_else(|| perr(line, 4, ParseErrorKind::BadInteger(get(3).unwrap_or("").into())))?;
    let poly: Vec<BigInt> = get(4)?
        .split_whitespace()
        .map(|t| parse_int(t).ok_or_else(|| perr(line, 5, ParseErrorKind::BadInteger(t.into()))))
        .collect::<Result<_>>()?;
    if poly.len() != degree + 1 {
        return Err(perr(line, 5, ParseErrorKind::DegreeMismatch(format!("{} coefficients for degree {degree}", poly.len()))));
    }
    if !poly[degree].is_one() {
        return Err(perr(line, 5, ParseErrorKind::NotMonic));
    }
    let entries: Vec<BigRational> = get(5)?
        .split(';')
        .map(|t| parse_rational(t).ok_or_else(|| perr(line, 6, ParseErrorKind::BadRational(t.trim().into()))))
        .collect::<Result<_>>()?;
    if entries.len() != degree * degree {
        return Err(perr(line, 6, ParseErrorKind::DegreeMismatch(format!("{} basis entries for degree {degree}", entries.len()))));
    }
    let basis: Vec<Vec<BigRational>> = entries.chunks(degree).map(<[_]>::to_vec).collect();
    if basis[0].iter().enumerate().any(|(k, c)| *c != if k == 0 { BigRational::one() } else { BigRational::zero() }) {
        return Err(perr(line, 6, ParseErrorKind::FirstRowNotOne));
    }
    if rational_det(&basis).is_zero() {
        return Err(perr(line, 6, ParseErrorKind::SingularBasis));
    }
    let found = real_root_count(&poly);
    if 2 * i > degree || found != degree - 2 * i {
        return Err(perr(line, 3, ParseErrorKind::Signature { declared: i, found: (degree - found) / 2 }));
    }
    Ok(FieldTableRecord { label, degree, i, disc, poly, basis })
}

/// Parses `label,degree,i,disc,poly,basis` rows (header required). Errors
/// carry the 1-based line and column.
pub fn parse_field_table(text: &str) -> Result<Vec<FieldTableRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).comment(Some(b'#')).from_reader(text.as_bytes());
    let header = rdr.headers()?.clone();
    for (k, name) in COLUMNS.iter().enumerate() {
        if header.get(k).map(str::trim) != Some(name) {
            return Err(perr(1, k + 1, ParseErrorKind::MissingField));
        }
    }
    let rows: Vec<(usize, csv::StringRecord)> = rdr
        .records()
        .map(|r| {
            let r = r?;
            let line = r.position().map_or(0, |p| p.line() as usize);
            Ok((line, r))
        })
        .collect::<Result<_>>()?;
    rows.par_iter().map(|(line, r)| parse_row(*line, r)).collect()
}

fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn serialize_field_table(records: &[FieldTableRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COLUMNS)?;
    for r in records {
        let poly = r.poly.iter().map(BigInt::to_string).collect::<Vec<_>>().join(" ");
        let basis = r.basis.iter().flatten().map(fmt_rational).collect::<Vec<_>>().join(";");
        w.write_record([r.label.clone(), r.degree.to_string(), r.i.to_string(), r.disc.to_string(), poly, basis])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Invariant(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeRecord45 {
    pub label: String,
    pub degree: usize,
    pub i: usize,
    pub disc: String,
    /// Determinant of the full Minkowski Gram, which must equal |disc|.
    pub covolume: f64,
    /// Reduced Gram of rank n−1, determinant one, row-major.
    pub gram: Vec<f64>,
    pub sorted_diag: Vec<f64>,
    /// g_jk / √(g_jj g_kk) for j < k.
    pub cosines: Vec<f64>,
    /// Point of the fundamental domain, degree 3 only.
    pub point: Option<UHPoint>,
    pub d4_symmetric: Option<bool>,
}

/// Real Minkowski coordinates of the basis rows: real embeddings first, then
/// (√2 Re, √2 Im) for each complex pair.
fn minkowski_rows(rec: &FieldTableRecord) -> Result<Vec<Vec<f64>>> {
    let p: Vec<f64> = rec.poly.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
    let roots = poly_roots(&p);
    for z in &roots {
        let r = error_radius(&p, *z) / z.norm().max(1.0);
        if !(r <= ROOT_PRECISION) {
            return Err(Error::NotCertified { radius: r, target: ROOT_PRECISION });
        }
    }
    let real = rec.degree - 2 * rec.i;
    let nreal = roots.iter().filter(|z| z.im == 0.0).count();
    if nreal != real {
        return Err(Error::Invariant(format!("{}: {nreal} real roots, expected {real}", rec.label)));
    }
    let pts: Vec<Complex64> = roots[..real].iter().chain(roots[real..].iter().filter(|z| z.im > 0.0)).copied().collect();
    let s2 = std::f64::consts::SQRT_2;
    Ok(rec
        .basis
        .iter()
        .map(|row| {
            let coef: Vec<f64> = row.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect();
            let mut out = Vec::with_capacity(rec.degree);
            for (k, z) in pts.iter().enumerate() {
                let v = coef.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
                if k < real {
                    out.push(v.re);
                } else {
                    out.push(s2 * v.re);
                    out.push(s2 * v.im);
                }
            }
            out
        })
        .collect())
}

fn cosines(g: &ShapeGram) -> Vec<f64> {
    let m = g.rank();
    let mut out = Vec::new();
    for j in 0..m {
        for k in j + 1..m {
            out.push(g.get(j, k) / (g.get(j, j) * g.get(k, k)).sqrt());
        }
    }
    out
}

/// Reduced shape of a record, gated on det(full Gram) = |disc| and on the
/// agreement of the projection and trace-zero sublattice constructions.
pub fn shape_of_record(rec: &FieldTableRecord, d4_test: bool) -> Result<ShapeRecord45> {
    let n = rec.degree;
    let rows = minkowski_rows(rec)?;
    let full: Vec<f64> = (0..n * n).map(|e| rows[e / n].iter().zip(&rows[e % n]).map(|(a, b)| a * b).sum()).collect();
    let disc = rec.disc.to_f64().unwrap_or(f64::NAN);
    let rel = gram_det_check(&full, n, disc);
    if !(rel <= COVOLUME_TOL) {
        return Err(Error::Covolume { label: rec.label.clone(), rel });
    }
    let proj = shape_via_projection(&rows, n)?;
    let sub = shape_via_sublattice(&rows, n)?;
    let dist = proj.shape_distance(&sub);
    if dist > ROUTE_TOL {
        return Err(Error::Invariant(format!("{}: shape routes disagree by {dist:e}", rec.label)));
    }
    let (gram, point) = if n == 3 {
        let (p, t) = gauss_reduce(&proj)?;
        let [a, b, c, d] = t.entries().map(|e| e as f64);
        let (g00, g01, g11) = (proj.get(0, 0), proj.get(0, 1), proj.get(1, 1));
        // TᵀGT with T = [[a,b],[c,d]]
        let ra = a * a * g00 + 2.0 * a * c * g01 + c * c * g11;
        let rb = a * b * g00 + (a * d + b * c) * g01 + c * d * g11;
        let rc = b * b * g00 + 2.0 * b * d * g01 + d * d * g11;
        (ShapeGram::rank2(ra, rb, rc)?.normalized(), Some(p))
    } else {
        (lll_minkowski_reduce(&proj)?.gram, None)
    };
    let mut sorted_diag: Vec<f64> = (0..n - 1).map(|k| gram.get(k, k)).collect();
    sorted_diag.sort_by(f64::total_cmp);
    let d4_symmetric = (d4_test && n == 4).then(|| d4_symmetry_test(&gram));
    Ok(ShapeRecord45 {
        label: rec.label.clone(),
        degree: n,
        i: rec.i,
        disc: rec.disc.to_string(),
        covolume: crate::shape::det(&full, n),
        cosines: cosines(&gram),
        gram: gram.entries().to_vec(),
        sorted_diag,
        point,
        d4_symmetric,
    })
}

fn quad(g: &ShapeGram, u: &[i64], v: &[i64]) -> f64 {
    let m = g.rank();
    (0..m).flat_map(|j| (0..m).map(move |k| (j, k))).map(|(j, k)| u[j] as f64 * g.get(j, k) * v[k] as f64).sum()
}

/// True when a reduced Gram has an integral isometry U ≠ ±I with U² = I.
/// Columns are searched in the box |u_jk| ≤ ⌈max diag / min diag⌉ + 1.
pub fn d4_symmetry_test(g: &ShapeGram) -> bool {
    let m = g.rank();
    let diag: Vec<f64> = (0..m).map(|k| g.get(k, k)).collect();
    let bound = (diag.iter().fold(0.0f64, |a, &b| a.max(b)) / diag.iter().fold(f64::INFINITY, |a, &b| a.min(b))).ceil() as i64 + 1;
    let width = (2 * bound + 1) as usize;
    let mut vectors: Vec<Vec<i64>> = Vec::new();
    for idx in 0..width.pow(m as u32) {
        let mut t = idx;
        let v: Vec<i64> = (0..m)
            .map(|_| {
                let c = (t % width) as i64 - bound;
                t /= width;
                c
            })
            .collect();
        vectors.push(v);
    }
    let close = |x: f64, y: f64, scale: f64| (x - y).abs() <= 1e-6 * scale;
    let cols: Vec<Vec<&Vec<i64>>> = (0..m).map(|k| vectors.iter().filter(|v| close(quad(g, v, v), diag[k], diag[k])).collect()).collect();
    fn search(g: &ShapeGram, cols: &[Vec<&Vec<i64>>], chosen: &mut Vec<Vec<i64>>, close: &dyn Fn(f64, f64, f64) -> bool) -> bool {
        let m = g.rank();
        let k = chosen.len();
        if k == m {
            // U has the chosen vectors as columns
            let u = |r: usize, c: usize| chosen[c][r];
            let square_is_one = (0..m).all(|r| (0..m).all(|c| (0..m).map(|t| u(r, t) * u(t, c)).sum::<i64>() == (r == c) as i64));
            let pm_one = [1, -1].iter().any(|&s| (0..m).all(|r| (0..m).all(|c| u(r, c) == if r == c { s } else { 0 })));
            return square_is_one && !pm_one;
        }
        for v in &cols[k] {
            let ok = (0..k).all(|j| close(quad(g, &chosen[j], v), g.get(j, k), (g.get(j, j) * g.get(k, k)).sqrt()));
            if ok {
                chosen.push((*v).clone());
                if search(g, cols, chosen, close) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    search(g, &cols, &mut Vec::new(), &close)
}

/// Shapes of all records in input order; the first failing record aborts.
pub fn ingest(records: &[FieldTableRecord], d4_test: bool) -> Result<Vec<ShapeRecord45>> {
    records.par_iter().map(|r| shape_of_record(r, d4_test)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ident(n: usize) -> String {
        (0..n * n).map(|e| if e / n == e % n { "1" } else { "0" }).collect::<Vec<_>>().join(";")
    }

    fn table(rows: &[(&str, usize, usize, i64, &str)]) -> String {
        let mut s = String::from("label,degree,i,disc,poly,basis\n");
        for (l, n, i, d, p) in rows {
            s += &format!("{l},{n},{i},{d},{p},{}\n", ident(*n));
        }
        s
    }

    #[test]
    fn parses_and_round_trips() {
        let t = table(&[("a", 3, 1, -23, "-1 -1 0 1"), ("b", 4, 1, -2048, "-2 0 0 0 1")]);
        let r = parse_field_table(&t).unwrap();
        assert_eq!((r[0].i, r[1].i), (1, 1));
        let again = parse_field_table(&serialize_field_table(&r).unwrap()).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn rejects_bad_rows() {
        let kind = |t: &str| match parse_field_table(t) {
            Err(Error::Parse { kind, line, column }) => (kind, line, column),
            other => panic!("{other:?}"),
        };
        let bad_first = "label,degree,i,disc,poly,basis\nx,4,1,-283,-1 -1 0 0 1,0;1;0;0;1;0;0;0;0;0;1;0;0;0;0;1\n";
        assert_eq!(kind(bad_first), (ParseErrorKind::FirstRowNotOne, 2, 6));
        let t = table(&[("x", 3, 0, -23, "-1 -1 0 1")]);
        assert_eq!(kind(&t).0, ParseErrorKind::Signature { declared: 0, found: 1 });
        let t = table(&[("x", 3, 1, -23, "-1 -1 0 2")]);
        assert_eq!(kind(&t).0, ParseErrorKind::NotMonic);
        let t = table(&[("x", 4, 1, -23, "-1 -1 0 1")]);
        assert!(matches!(kind(&t).0, ParseErrorKind::DegreeMismatch(_)));
        let t = "label,degree,i,disc,poly,basis\nx,3,1,-23,-1 -1 0 1,1;0;0;0;1;0;0;2/0;1\n";
        assert!(matches!(kind(t).0, ParseErrorKind::BadRational(_)));
        let t = "label,degree,i,disc,poly,basis\nx,3,1,-23,-1 -1 0 1,1;0;0;0;1;0;0;2;0\n";
        assert_eq!(kind(t).0, ParseErrorKind::SingularBasis);
    }

    #[test]
    fn covolume_gate_rejects_wrong_disc() {
        let r = parse_field_table(&table(&[("x", 3, 1, -24, "-1 -1 0 1")])).unwrap();
        assert!(matches!(shape_of_record(&r[0], false), Err(Error::Covolume { .. })));
    }

    #[test]
    fn identity_gram_is_symmetric() {
        assert!(d4_symmetry_test(&ShapeGram::new(3, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap()));
    }
}
