use proptest::prelude::*;
use shapelab::enumerate::{count_classes, enumerate_classes, enumerate_with_slack, EnumerationTask, SignatureFilter, MAX_X};
use shapelab::form::{act, discriminant, BinaryCubicForm, UnimodularMatrix2};
use shapelab::local::{is_maximal, CongruencePredicate};
use shapelab::section::{canonicalize, canonicalize_i64, is_canonical_i64};
use shapelab::shape::shape_point;
use shapelab::Error;

fn all(x: u64) -> Vec<shapelab::enumerate::FieldClassRecord> {
    enumerate_classes(&EnumerationTask::new(x, SignatureFilter::Both)).unwrap()
}

#[test]
fn first_maximal_discriminants() {
    let recs = enumerate_classes(&EnumerationTask::new(400, SignatureFilter::Both).maximal_only(true)).unwrap();
    let neg: Vec<i64> = recs.iter().filter(|r| r.signature == 1).map(|r| r.disc).take(10).collect();
    let pos: Vec<i64> = recs.iter().filter(|r| r.signature == 0).map(|r| r.disc).take(5).collect();
    assert_eq!(neg, [-23, -31, -44, -59, -76, -83, -87, -104, -107, -108]);
    assert_eq!(pos, [148, 229, 257, 316, 321]);
}

#[test]
fn stream_is_sorted_canonical_and_consistent() {
    let recs = all(20_000);
    assert!(recs.windows(2).all(|w| w[0].sort_key() < w[1].sort_key()));
    for r in &recs {
        assert!(is_canonical_i64(r.form), "{:?}", r.form);
        let f = r.form();
        assert_eq!(discriminant(&f), r.disc.into());
        assert!(r.disc.unsigned_abs() < 20_000);
        assert_eq!(r.signature, u8::from(r.disc < 0));
        assert_eq!(is_maximal(&f).unwrap(), r.maximal);
        let p = shape_point(&f).unwrap();
        assert!((p.x - r.shape.x).abs() < 1e-9 && (p.y - r.shape.y).abs() < 1e-9);
    }
}

#[test]
fn counts_match_streams() {
    let x = 50_000;
    let c = count_classes(&EnumerationTask::new(x, SignatureFilter::Both)).unwrap();
    let recs = all(x);
    for i in 0..2u8 {
        assert_eq!(c.s3[i as usize], recs.iter().filter(|r| r.signature == i).count() as u64);
        assert_eq!(c.s3_maximal[i as usize], recs.iter().filter(|r| r.signature == i && r.maximal).count() as u64);
    }
    assert!(recs.iter().all(|r| r.s3));
}

#[test]
fn cyclic_cubics_are_hexagonal_and_filtered() {
    let with = enumerate_classes(&EnumerationTask::new(100, SignatureFilter::Zero).include_c3(true)).unwrap();
    let c3: Vec<_> = with.iter().filter(|r| !r.s3).collect();
    assert_eq!(c3.iter().map(|r| r.disc).collect::<Vec<_>>(), [49, 81]);
    for r in c3 {
        assert!((r.shape.x - 0.5).abs() < 1e-9 && (r.shape.y - 0.8660254038).abs() < 1e-9);
    }
    let without = enumerate_classes(&EnumerationTask::new(100, SignatureFilter::Zero)).unwrap();
    assert!(without.iter().all(|r| r.disc != 49 && r.disc != 81));
}

#[test]
fn widened_bounds_find_nothing_new() {
    let task = EnumerationTask::new(30_000, SignatureFilter::Both);
    assert_eq!(enumerate_with_slack(&task, 1.5).unwrap(), enumerate_classes(&task).unwrap());
}

#[test]
fn congruence_filter_selects_matching_forms() {
    let pred = CongruencePredicate::parse("mod 2\n0 * * *\n").unwrap();
    let task = EnumerationTask::new(20_000, SignatureFilter::Both).congruence(Some(pred.clone()));
    let kept = enumerate_classes(&task).unwrap();
    let expect: Vec<_> = all(20_000).into_iter().filter(|r| pred.matches(&r.form)).collect();
    assert_eq!(kept, expect);
}

#[test]
fn rejects_bad_bounds() {
    for x in [0, MAX_X + 1] {
        let e = enumerate_classes(&EnumerationTask::new(x, SignatureFilter::Both)).unwrap_err();
        assert!(matches!(e, Error::InvalidTask(_)), "{e}");
    }
}

fn unimodular() -> impl Strategy<Value = UnimodularMatrix2> {
    prop::collection::vec((0usize..4, -3i64..=3), 1..6).prop_map(|steps| {
        let mut g = UnimodularMatrix2::IDENTITY;
        for (kind, k) in steps {
            let e = match kind {
                0 => UnimodularMatrix2::new(1, k, 0, 1),
                1 => UnimodularMatrix2::new(1, 0, k, 1),
                2 => UnimodularMatrix2::new(0, 1, 1, 0),
                _ => UnimodularMatrix2::new(-1, 0, 0, 1),
            };
            g = g.mul(&e.unwrap());
        }
        g
    })
}

fn irreducible() -> impl Strategy<Value = [i64; 4]> {
    (1i64..6, -6i64..7, -6i64..7, -6i64..7)
        .prop_map(|(a, b, c, d)| [a, b, c, d])
        .prop_filter("irreducible", |f| !shapelab::form::is_reducible(&BinaryCubicForm::from_array(*f)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn canonicalize_is_idempotent(f in irreducible()) {
        let c = canonicalize_i64(f).unwrap();
        prop_assert!(is_canonical_i64(c));
        prop_assert_eq!(canonicalize_i64(c).unwrap(), c);
        let big = canonicalize(&BinaryCubicForm::from_array(f)).unwrap();
        prop_assert_eq!(big.to_i64().unwrap(), c);
    }

    #[test]
    fn canonicalize_is_orbit_invariant(f in irreducible(), g in unimodular()) {
        let h = act(&g, &BinaryCubicForm::from_array(f));
        prop_assert_eq!(discriminant(&h), discriminant(&BinaryCubicForm::from_array(f)));
        prop_assert_eq!(canonicalize(&h).unwrap().to_i64().unwrap(), canonicalize_i64(f).unwrap());
    }
}
