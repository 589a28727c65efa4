//! Equidistribution reports for shape streams.

use crate::enumerate::{count_classes, EnumerationTask, FieldClassRecord, SignatureFilter};
use crate::error::{Error, Result};
use crate::local::{is_maximal_at_i64, local_density, maximal_density_closed_form, CongruencePredicate, DensityPredicate};
use crate::arith::primes_below;
use crate::brute::{brute_force_classes, BRUTE_MAX_X};
use crate::shape::UHPoint;
use crate::space::{locate_cell, mu_measure, rect_measure, PartitionSpec, Rank2Region, Rect, MU_TOTAL};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// Per-cell counts plus the points that fell outside the domain.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CellCounts {
    pub counts: Vec<u64>,
    pub overflow: u64,
}

impl CellCounts {
    pub fn zeros(cells: usize) -> Self {
        CellCounts { counts: vec![0; cells], overflow: 0 }
    }

    pub fn add(&mut self, p: &UHPoint, spec: &PartitionSpec) {
        match locate_cell(p, spec) {
            Ok(j) => self.counts[j] += 1,
            Err(_) => self.overflow += 1,
        }
    }

    pub fn merge(mut self, other: CellCounts) -> CellCounts {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self.overflow += other.overflow;
        self
    }

    /// Points inside the domain.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

pub fn accumulate<I: IntoIterator<Item = UHPoint>>(points: I, spec: &PartitionSpec) -> CellCounts {
    let mut acc = CellCounts::zeros(spec.cells());
    for p in points {
        acc.add(&p, spec);
    }
    acc
}

/// Parallel version of [`accumulate`]; integer merges make the result
/// independent of how the slice is split.
pub fn accumulate_par(points: &[UHPoint], spec: &PartitionSpec) -> CellCounts {
    points
        .par_iter()
        .fold(|| CellCounts::zeros(spec.cells()), |mut acc, p| {
            acc.add(p, spec);
            acc
        })
        .reduce(|| CellCounts::zeros(spec.cells()), CellCounts::merge)
}

/// Wilson score interval for k successes in n trials; `None` when n = 0.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> Option<[f64; 2]> {
    if n == 0 {
        return None;
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    Some([(center - half).max(0.0), (center + half).min(1.0)])
}

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
pub fn ks_statistic(mut sample: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    if sample.is_empty() {
        return 0.0;
    }
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample.iter().enumerate().fold(0.0, |d, (k, &v)| {
        let f = cdf(v);
        d.max(f - k as f64 / n).max((k + 1) as f64 / n - f)
    })
}

/// Asymptotic KS critical value: the distance exceeded with probability
/// `alpha` under the null hypothesis.
pub fn ks_critical(n: u64, alpha: f64) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt() / (n as f64).sqrt()
}

/// CDF of x under the normalized measure, clamped to [0, 1/2].
pub fn x_cdf(x: f64) -> f64 {
    let t = x.clamp(0.0, 0.5);
    if t == 0.5 {
        1.0
    } else {
        6.0 * t.asin() / std::f64::consts::PI
    }
}

/// CDF of y under the normalized measure; equals 1 − 3/(πy) for y ≥ 1.
pub fn y_cdf(y: f64) -> f64 {
    1.0 - rect_measure(&Rect::new(0.0, 0.5, y, f64::INFINITY)) / MU_TOTAL
}

/// A region with the label it is reported under.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedRegion {
    pub label: String,
    pub region: Rank2Region,
}

impl NamedRegion {
    /// Parses `x1,x2,y1,y2`; `inf` is accepted for y2.
    pub fn parse(s: &str) -> Result<Self> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| Error::InvalidTask(format!("bad region `{s}`"))))
            .collect::<Result<_>>()?;
        match v[..] {
            [x1, x2, y1, y2] if x1 <= x2 && y1 <= y2 => {
                Ok(NamedRegion { label: s.trim().to_string(), region: Rank2Region::rect(x1, x2, y1, y2) })
            }
            _ => Err(Error::InvalidTask(format!("region `{s}` must be x1,x2,y1,y2 with x1≤x2, y1≤y2"))),
        }
    }
}

/// Which kinds of records the stream holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Filters {
    pub maximal_only: bool,
    pub s3_only: bool,
}

impl Filters {
    pub fn of(records: &[FieldClassRecord]) -> Self {
        Filters { maximal_only: records.iter().all(|r| r.maximal), s3_only: records.iter().all(|r| r.s3) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub x1: f64,
    pub x2: f64,
    pub y1: f64,
    /// `None` stands for +∞.
    pub y2: Option<f64>,
    pub mu: f64,
    pub count: u64,
    pub expected: f64,
    pub rel_dev: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub region: String,
    #[serde(rename = "N_W")]
    pub n_w: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub ratio: Option<f64>,
    pub mu_ratio: f64,
    pub wilson95: Option<[f64; 2]>,
}

impl RatioReport {
    pub fn contains_mu_ratio(&self) -> bool {
        self.wilson95.is_some_and(|[lo, hi]| lo <= self.mu_ratio && self.mu_ratio <= hi)
    }
}

fn serialize_signature<S: Serializer>(s: &SignatureFilter, ser: S) -> std::result::Result<S::Ok, S::Error> {
    match s {
        SignatureFilter::Zero => ser.serialize_u8(0),
        SignatureFilter::One => ser.serialize_u8(1),
        SignatureFilter::Both => ser.serialize_str("both"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    #[serde(rename = "X")]
    pub x: u64,
    #[serde(serialize_with = "serialize_signature")]
    pub i: SignatureFilter,
    pub filters: Filters,
    pub cells: Vec<CellReport>,
    pub chisq: f64,
    pub dof: u64,
    pub ks_x: f64,
    pub ks_ytail: f64,
    pub ratios: Vec<RatioReport>,
}

impl StatsReport {
    pub fn total(&self) -> u64 {
        self.cells.iter().map(|c| c.count).sum()
    }

    pub fn max_rel_dev(&self) -> f64 {
        self.cells.iter().filter_map(|c| c.rel_dev).fold(0.0, |m, d| m.max(d.abs()))
    }

    /// Upper tail probability of the chi-square statistic.
    pub fn chisq_pvalue(&self) -> Option<f64> {
        if self.dof == 0 || self.total() == 0 {
            return None;
        }
        ChiSquared::new(self.dof as f64).ok().map(|d| d.sf(self.chisq))
    }
}

fn signature_of(records: &[FieldClassRecord]) -> SignatureFilter {
    let has = |s: u8| records.iter().any(|r| r.signature == s);
    match (has(0), has(1)) {
        (true, false) => SignatureFilter::Zero,
        (false, true) => SignatureFilter::One,
        _ => SignatureFilter::Both,
    }
}

/// Histogram, chi-square, KS and region ratios for a record stream with
/// discriminant bound `x`. Fails if any shape lies outside the domain.
pub fn equidist_report(x: u64, records: &[FieldClassRecord], spec: &PartitionSpec, regions: &[NamedRegion]) -> Result<StatsReport> {
    let points: Vec<UHPoint> = records.iter().map(|r| r.shape).collect();
    let counts = accumulate_par(&points, spec);
    if counts.overflow > 0 {
        return Err(Error::Invariant(format!("{} shapes outside the fundamental domain", counts.overflow)));
    }
    let n = counts.total();
    let mut chisq = 0.0;
    let cells = (0..spec.cells())
        .map(|j| {
            let r = spec.cell_rect(j);
            let mu = spec.masses[j];
            let expected = n as f64 * mu / MU_TOTAL;
            let count = counts.counts[j];
            let rel_dev = (n > 0).then(|| (count as f64 - expected) / expected);
            if n > 0 {
                chisq += (count as f64 - expected).powi(2) / expected;
            }
            CellReport { x1: r.x1, x2: r.x2, y1: r.y1, y2: r.y2.is_finite().then_some(r.y2), mu, count, expected, rel_dev }
        })
        .collect();
    let ks_x = ks_statistic(points.iter().map(|p| p.x).collect(), x_cdf);
    let ks_ytail = ks_statistic(points.iter().map(|p| p.y).collect(), y_cdf);
    let ratios = regions
        .iter()
        .map(|w| {
            let n_w = points.iter().filter(|p| w.region.contains(p)).count() as u64;
            RatioReport {
                region: w.label.clone(),
                n_w,
                n,
                ratio: (n > 0).then(|| n_w as f64 / n as f64),
                mu_ratio: mu_measure(&w.region) / MU_TOTAL,
                wilson95: wilson_interval(n_w, n, Z95),
            }
        })
        .collect();
    Ok(StatsReport {
        x,
        i: signature_of(records),
        filters: Filters::of(records),
        cells,
        chisq,
        dof: spec.cells().saturating_sub(1) as u64,
        ks_x,
        ks_ytail,
        ratios,
    })
}

/// Numerator condition of a congruence ratio; the denominator is always all
/// irreducible non-cyclic classes of the task.
#[derive(Debug, Clone)]
pub enum RatioPredicate {
    Everything,
    /// Maximal orders, compared with the Euler product over primes below the bound.
    Maximal { primes_below: u64 },
    /// Forms matching the predicate on the canonical representative.
    Congruence(CongruencePredicate),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CongruenceRatio {
    pub predicate: String,
    #[serde(rename = "N_S")]
    pub n_s: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub ratio: Option<f64>,
    pub expected: f64,
    /// How `expected` was obtained.
    pub expected_source: String,
    /// Π μ_p of a congruence predicate, reported even when it is not the expectation.
    pub local_density: Option<f64>,
    pub wilson95: Option<[f64; 2]>,
}

impl CongruenceRatio {
    pub fn rel_error(&self) -> Option<f64> {
        self.ratio.map(|r| (r - self.expected).abs() / self.expected)
    }
}

/// Π_{p < bound} (1 − p⁻²)(1 − p⁻³); exhaustive counts for p ≤ 7.
pub fn maximal_euler_product(bound: u64) -> Result<f64> {
    primes_below(bound).into_iter().try_fold(1.0, |acc, p| {
        let d = if p <= 7 { local_density(p, &DensityPredicate::Maximal)? } else { maximal_density_closed_form(p) };
        Ok(acc * d.to_f64().unwrap_or(f64::NAN))
    })
}

/// Empirical N(S; X)/N(X) for the base task's bound and signature.
pub fn congruence_ratio_report(base: &EnumerationTask, pred: &RatioPredicate) -> Result<CongruenceRatio> {
    let sum = |v: [u64; 2]| -> u64 {
        [0usize, 1].iter().filter(|&&i| base.signature.accepts(i as u8)).map(|&i| v[i]).sum()
    };
    let plain = EnumerationTask::new(base.xmax, base.signature);
    let all = count_classes(&plain)?;
    let n = sum(all.s3);
    let (label, n_s, expected, source, local) = match pred {
        RatioPredicate::Everything => ("everything".to_string(), n, 1.0, "exact".to_string(), None),
        RatioPredicate::Maximal { primes_below } => (
            format!("maximal (p < {primes_below})"),
            sum(all.s3_maximal),
            maximal_euler_product(*primes_below)?,
            format!("Euler product over p < {primes_below}"),
            None,
        ),
        RatioPredicate::Congruence(c) => {
            let t = plain.clone().maximal_only(false).congruence(Some(c.clone()));
            let d = c.density().to_f64().unwrap_or(f64::NAN);
            let (expected, source) = if c.is_gl2_invariant()? {
                (d, "local density".to_string())
            } else {
                // not a union of orbits: its density on the canonical section is measured
                let oracle: Vec<_> =
                    brute_force_classes(BRUTE_MAX_X)?.into_iter().filter(|r| r.s3 && base.signature.accepts(r.signature)).collect();
                let k = oracle.iter().filter(|r| c.matches(&r.form)).count();
                (k as f64 / oracle.len().max(1) as f64, format!("section density of the brute-force oracle at X = {BRUTE_MAX_X}"))
            };
            (format!("congruence mod {}", c.modulus), sum(count_classes(&t)?.kept), expected, source, Some(d))
        }
    };
    Ok(CongruenceRatio {
        predicate: label,
        n_s,
        n,
        ratio: (n > 0).then(|| n_s as f64 / n as f64),
        expected,
        expected_source: source,
        local_density: local,
        wilson95: wilson_interval(n_s, n, Z95),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub p: u64,
    pub count: u64,
    /// count · p² / X
    pub scaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailBoundReport {
    #[serde(rename = "X")]
    pub x: u64,
    pub rows: Vec<TailRow>,
    /// Largest scaled count, the constant bounding N(W_p; X)·p²/X.
    pub constant: f64,
}

/// Counts of classes whose ring is not maximal at p, scaled by p²/X.
pub fn tail_bound_report(x: u64, records: &[FieldClassRecord], primes: &[u64]) -> TailBoundReport {
    let rows: Vec<TailRow> = primes
        .iter()
        .map(|&p| {
            let count = records.par_iter().filter(|r| !is_maximal_at_i64(r.form, p)).count() as u64;
            TailRow { p, count, scaled: count as f64 * (p * p) as f64 / x as f64 }
        })
        .collect();
    let constant = rows.iter().map(|r| r.scaled).fold(0.0, f64::max);
    TailBoundReport { x, rows, constant }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{equal_measure_partition, sample_mu};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn accumulate_trivial() {
        let spec = equal_measure_partition(1, 1).unwrap();
        assert_eq!(accumulate(Vec::new(), &spec), CellCounts::zeros(1));
        let c = accumulate([UHPoint { x: 0.5, y: 3f64.sqrt() / 2.0 }], &spec);
        assert_eq!(c.counts, vec![1]);
        let c = accumulate([UHPoint { x: 0.7, y: 2.0 }], &spec);
        assert_eq!((c.total(), c.overflow), (0, 1));
    }

    #[test]
    fn sampler_histogram_within_five_sigma() {
        let spec = equal_measure_partition(4, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000u64;
        let pts: Vec<UHPoint> = (0..n).map(|_| sample_mu(&mut rng)).collect();
        let c = accumulate_par(&pts, &spec);
        assert_eq!(c, accumulate(pts.iter().copied(), &spec));
        for (j, &k) in c.counts.iter().enumerate() {
            let p = spec.masses[j] / MU_TOTAL;
            let sigma = (n as f64 * p * (1.0 - p)).sqrt();
            assert!((k as f64 - n as f64 * p).abs() <= 5.0 * sigma, "cell {j}");
        }
    }

    #[test]
    fn wilson_and_ks_basics() {
        assert_eq!(wilson_interval(0, 0, Z95), None);
        let [lo, hi] = wilson_interval(50, 100, Z95).unwrap();
        assert!((lo - 0.4038).abs() < 1e-4 && (hi - 0.5962).abs() < 1e-4);
        assert!((ks_critical(10_000, 0.01) - 0.016276).abs() < 1e-5);
        assert!((y_cdf(2.0) - (1.0 - 3.0 / (2.0 * std::f64::consts::PI))).abs() < 1e-12);
        assert_eq!(ks_statistic(vec![0.25, 0.75], |t| t), 0.25);
    }

    #[test]
    fn empty_report_has_no_ratios() {
        let spec = equal_measure_partition(2, 2).unwrap();
        let r = equidist_report(100, &[], &spec, &[NamedRegion::parse("0,0.5,0,1").unwrap()]).unwrap();
        assert_eq!(r.total(), 0);
        assert_eq!(r.ratios[0].ratio, None);
        assert!(r.cells.iter().all(|c| c.rel_dev.is_none()));
        let json = serde_json::to_string(&r).unwrap();
        let keys = ["\"X\"", "\"i\"", "\"filters\"", "\"cells\"", "\"chisq\"", "\"dof\"", "\"ks_x\"", "\"ks_ytail\"", "\"ratios\""];
        let pos: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{json}");
        assert!(json.contains("\"i\":\"both\""));
    }

    #[test]
    fn euler_product() {
        let z2z3 = std::f64::consts::PI.powi(2) / 6.0 * 1.2020569031595942;
        let p = maximal_euler_product(100).unwrap();
        assert!((p * z2z3 - 1.0).abs() < 2e-3);
    }
}
