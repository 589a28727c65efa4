use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shapelab::enumerate::{enumerate_classes, EnumerationTask, FieldClassRecord, SignatureFilter};
use shapelab::shape::UHPoint;
use shapelab::space::{equal_measure_partition, sample_mu, PartitionSpec};
use shapelab::stats::*;

fn fake(points: &[UHPoint]) -> Vec<FieldClassRecord> {
    points
        .iter()
        .map(|&shape| FieldClassRecord { form: [1, 0, 0, 0], disc: -1, signature: 1, s3: true, maximal: true, shape })
        .collect()
}

fn sample(n: usize, seed: u64) -> Vec<UHPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| sample_mu(&mut rng)).collect()
}

fn spec() -> PartitionSpec {
    equal_measure_partition(4, 6).unwrap()
}

#[test]
fn chisq_pvalues_are_roughly_uniform() {
    let spec = spec();
    let mut p: Vec<f64> = (0..100)
        .map(|s| equidist_report(1, &fake(&sample(2400, s)), &spec, &[]).unwrap().chisq_pvalue().unwrap())
        .collect();
    let small = p.iter().filter(|&&v| v < 0.05).count();
    assert!(small <= 12, "{small} of 100 p-values below 0.05");
    p.sort_by(f64::total_cmp);
    let d = ks_statistic(p, |t| t.clamp(0.0, 1.0));
    assert!(d < ks_critical(100, 0.01), "KS of p-values {d}");
}

#[test]
fn sampled_points_pass_marginal_tests() {
    let pts = sample(200_000, 7);
    let rep = equidist_report(1, &fake(&pts), &spec(), &[NamedRegion::parse("0,0.5,1,2").unwrap()]).unwrap();
    let n = rep.total();
    assert_eq!(n, 200_000);
    assert!(rep.ks_x < ks_critical(n, 0.01));
    assert!(rep.ks_ytail < ks_critical(n, 0.01));
    assert!(rep.max_rel_dev() < 0.03);
    assert!(rep.ratios[0].contains_mu_ratio());
}

#[test]
fn report_rejects_points_outside_domain() {
    let bad = fake(&[UHPoint { x: 0.7, y: 2.0 }]);
    assert!(equidist_report(1, &bad, &spec(), &[]).is_err());
}

#[test]
fn report_on_real_stream() {
    let recs = enumerate_classes(&EnumerationTask::new(100_000, SignatureFilter::One).maximal_only(true)).unwrap();
    let rep = equidist_report(100_000, &recs, &spec(), &[]).unwrap();
    assert_eq!(rep.total(), recs.len() as u64);
    assert_eq!(rep.i, SignatureFilter::One);
    assert_eq!(rep.filters, Filters { maximal_only: true, s3_only: true });
    assert_eq!(rep.dof, 23);
    let json = serde_json::to_value(&rep).unwrap();
    assert_eq!(json["i"], 1);
    assert_eq!(json["cells"].as_array().unwrap().len(), 24);
}

#[test]
fn wilson_examples() {
    assert_eq!(wilson_interval(0, 0, Z95), None);
    let [lo, hi] = wilson_interval(50, 100, Z95).unwrap();
    assert!((lo - 0.4038).abs() < 1e-4 && (hi - 0.5962).abs() < 1e-4);
    let [lo, _] = wilson_interval(0, 10, Z95).unwrap();
    assert_eq!(lo, 0.0);
}

#[test]
fn tail_counts_are_scaled() {
    let recs = enumerate_classes(&EnumerationTask::new(20_000, SignatureFilter::Both)).unwrap();
    let rep = tail_bound_report(20_000, &recs, &[2, 3]);
    for row in &rep.rows {
        assert_eq!(row.scaled, row.count as f64 * (row.p * row.p) as f64 / 20_000.0);
    }
    assert_eq!(rep.constant, rep.rows.iter().map(|r| r.scaled).fold(0.0, f64::max));
}

#[test]
fn everything_ratio_is_exactly_one() {
    let r = congruence_ratio_report(&EnumerationTask::new(50_000, SignatureFilter::Both), &RatioPredicate::Everything).unwrap();
    assert_eq!(r.ratio, Some(1.0));
    assert_eq!(r.n_s, r.n);
}

fn point() -> impl Strategy<Value = UHPoint> {
    (0.0f64..=0.5, 0.0f64..1.0).prop_map(|(x, u)| {
        let y0 = (1.0 - x * x).sqrt();
        UHPoint { x, y: y0 + 6.0 * u * u }
    })
}

proptest! {
    #[test]
    fn accumulate_counts_every_point(pts in prop::collection::vec(point(), 0..300)) {
        let spec = spec();
        let c = accumulate(pts.iter().copied(), &spec);
        prop_assert_eq!(c.total() + c.overflow, pts.len() as u64);
        prop_assert_eq!(c.overflow, 0);
        prop_assert_eq!(accumulate_par(&pts, &spec), c);
    }

    #[test]
    fn merge_is_additive(a in prop::collection::vec(point(), 0..200), b in prop::collection::vec(point(), 0..200)) {
        let spec = spec();
        let whole = accumulate(a.iter().chain(&b).copied(), &spec);
        let parts = accumulate(a.iter().copied(), &spec).merge(accumulate(b.iter().copied(), &spec));
        prop_assert_eq!(parts, whole);
    }

    #[test]
    fn wilson_contains_estimate(n in 1u64..10_000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).floor() as u64;
        let [lo, hi] = wilson_interval(k, n, Z95).unwrap();
        let p = k as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-12 && p <= hi + 1e-12 && hi <= 1.0);
    }
}

#[test]
fn congruence_expectations() {
    use shapelab::local::CongruencePredicate;
    let task = EnumerationTask::new(20_000, SignatureFilter::One);
    let even = CongruencePredicate::parse("mod 2\n0 * * *\n").unwrap();
    let r = congruence_ratio_report(&task, &RatioPredicate::Congruence(even)).unwrap();
    assert_eq!(r.local_density, Some(0.5));
    assert!(r.expected_source.starts_with("section density"));
    assert!((r.expected - 764.0 / 2300.0).abs() < 1e-12);
    let odd_content = CongruencePredicate::parse("mod 3\n1 * * *\n2 * * *\n* 1 * *\n* 2 * *\n* * 1 *\n* * 2 *\n* * * 1\n* * * 2\n").unwrap();
    let r = congruence_ratio_report(&task, &RatioPredicate::Congruence(odd_content)).unwrap();
    assert_eq!(r.expected_source, "local density");
    assert_eq!(r.local_density, Some(80.0 / 81.0));
    // forms 3·g with 3⁴·|disc g| < X are the only ones excluded
    let content3 = enumerate_classes(&task).unwrap().iter().filter(|r| r.form.iter().all(|c| c % 3 == 0)).count() as u64;
    assert!(content3 > 0);
    assert_eq!(r.n_s, r.n - content3);
}
