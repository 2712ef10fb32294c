mod common;

use common::*;
use coordcap_core::prob::*;
use coordcap_core::{Error, LogBase};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn rejects_bad_tables() {
    let a = vec![Alphabet::range(2)];
    assert!(matches!(
        Pmf::new(a.clone(), vec![0.6, 0.6]),
        Err(Error::NotNormalized { .. })
    ));
    assert!(matches!(
        Pmf::new(a.clone(), vec![1.1, -0.1]),
        Err(Error::NegativeMass { index: 1, .. })
    ));
    assert!(matches!(
        Pmf::new(a.clone(), vec![1.0]),
        Err(Error::AxisMismatch(_))
    ));
    assert!(matches!(Pmf::new(a, vec![]), Err(Error::EmptyTable)));
    assert!(matches!(
        Alphabet::new(["a", "a"]),
        Err(Error::DuplicateLabel(_))
    ));
    assert!(matches!(
        Alphabet::new(Vec::<String>::new()),
        Err(Error::EmptyAlphabet)
    ));
    let big = vec![Alphabet::range(10); 7];
    assert!(matches!(
        Pmf::new(big, vec![1.0]),
        Err(Error::TooLarge { .. })
    ));
}

#[test]
fn clamps_noise_within_tolerances() {
    let p = Pmf::new(vec![Alphabet::range(3)], vec![0.5, 0.5 + 5e-10, -1e-13]).unwrap();
    assert_eq!(p.mass()[2], 0.0);
    assert!((p.mass().iter().sum::<f64>() - 1.0).abs() < 1e-15);
}

#[test]
fn channel_rows_must_normalize() {
    let b = Alphabet::range(2);
    assert!(Channel::new(vec![b.clone()], vec![b.clone()], vec![0.5, 0.5, 0.2, 0.2]).is_err());
    let c = Channel::new(vec![b.clone()], vec![b], vec![0.5, 0.5, 0.2, 0.8]).unwrap();
    assert_eq!(c.row(1), &[0.2, 0.8]);
}

#[test]
fn known_values() {
    let u4 = validate_pmf(&[0.25; 4]).unwrap();
    assert!((entropy(&u4, LogBase::Bits) - 2.0).abs() < 1e-12);
    assert!((entropy(&u4, LogBase::Nats) - 4f64.ln()).abs() < 1e-12);
    let b = validate_pmf(&[0.1, 0.9]).unwrap();
    assert!((entropy(&b, LogBase::Bits) - h2(0.1)).abs() < 1e-12);
    // X uniform bit through BSC(0.1): I = 1 − h(0.1).
    let j = Pmf::new(axes(&[2, 2]), vec![0.45, 0.05, 0.05, 0.45]).unwrap();
    let i = mutual_information(&j, &[0], &[1], LogBase::Bits).unwrap();
    assert!((i - (1.0 - h2(0.1))).abs() < 1e-12);
}

#[test]
fn condition_then_extend_round_trips() {
    let mut r = rng(3);
    let p = random_pmf(&mut r, &[2, 3, 2]);
    let ch = p.condition(&[0, 2]).unwrap();
    let back = p
        .marginalize(&[0, 2])
        .unwrap()
        .extend(&ch, &[0, 1])
        .unwrap();
    let back = back.marginalize(&[0, 2, 1]).unwrap();
    assert!(total_variation(&back, &p).unwrap() < 1e-12);
}

#[test]
fn joint_type_counts_cells() {
    let x = Sequence::new(Alphabet::range(2), vec![0, 1, 1, 0]).unwrap();
    let y = Sequence::new(Alphabet::range(3), vec![2, 2, 0, 2]).unwrap();
    let t = joint_type(&[&x, &y]).unwrap();
    assert_eq!(t.counts(), &[0, 0, 2, 1, 0, 1]);
    let p = t.to_pmf();
    assert_eq!(p.mass()[2], 0.5);
    assert!(is_typical(&[&x, &y], &p, 1e-9).unwrap());
    let short = Sequence::new(Alphabet::range(3), vec![0]).unwrap();
    assert!(matches!(
        joint_type(&[&x, &short]),
        Err(Error::LengthMismatch { .. })
    ));
    assert!(Sequence::new(Alphabet::range(2), vec![2]).is_err());
}

fn random_seq(r: &mut impl Rng, k: usize, n: usize) -> Sequence {
    Sequence::new(
        Alphabet::range(k),
        (0..n).map(|_| r.gen_range(0..k)).collect(),
    )
    .unwrap()
}

#[test]
fn joint_type_of_concatenation_is_weighted_average() {
    let mut r = rng(11);
    for _ in 0..200 {
        let (n1, n2) = (r.gen_range(1..40), r.gen_range(1..40));
        let (a1, b1) = (random_seq(&mut r, 3, n1), random_seq(&mut r, 2, n1));
        let (a2, b2) = (random_seq(&mut r, 3, n2), random_seq(&mut r, 2, n2));
        let t1 = joint_type(&[&a1, &b1]).unwrap();
        let t2 = joint_type(&[&a2, &b2]).unwrap();
        let whole = joint_type(&[&a1.concat(&a2).unwrap(), &b1.concat(&b2).unwrap()]).unwrap();
        // Integer identity: n·T = n1·T1 + n2·T2 cell by cell.
        assert_eq!(whole, t1.merge(&t2).unwrap());
        assert_eq!(whole.n(), (n1 + n2) as u64);
    }
}

proptest! {
    #![proptest_config(fixed(256))]

    #[test]
    fn entropy_bounds(k in 1usize..=6, p in proptest::collection::vec(0.0..1.0f64, 6)) {
        let p = validate_pmf(&weights(&p[..k])).unwrap();
        let hb = entropy(&p, LogBase::Bits);
        prop_assert!(hb >= 0.0);
        prop_assert!(hb <= (k as f64).log2() + 1e-12);
        prop_assert!((hb - h(p.mass())).abs() < 1e-12);
    }

    #[test]
    fn chain_rule(p in pmf_strategy(vec![3, 2, 2])) {
        let hab = entropy_of(&p, &[0, 1], LogBase::Bits).unwrap();
        let ha = entropy_of(&p, &[0], LogBase::Bits).unwrap();
        let hba = conditional_entropy(&p, &[1], &[0], LogBase::Bits).unwrap();
        prop_assert!((hab - ha - hba).abs() < 1e-10);
        prop_assert!((hab - h(&marginal(p.mass(), &p.dims(), &[0, 1]))).abs() < 1e-10);
    }

    #[test]
    fn information_matches_oracle_and_is_nonnegative(p in pmf_strategy(vec![2, 3, 2])) {
        let d = p.dims();
        let i = mutual_information(&p, &[0], &[1], LogBase::Bits).unwrap();
        let c = conditional_mutual_information(&p, &[0], &[1], &[2], LogBase::Bits).unwrap();
        prop_assert!(i >= -1e-12 && c >= -1e-12);
        prop_assert!((i - mi(p.mass(), &d, &[0], &[1]).max(0.0)).abs() < 1e-10);
        prop_assert!((c - cmi(p.mass(), &d, &[0], &[1], &[2]).max(0.0)).abs() < 1e-10);
        let nats = mutual_information(&p, &[0], &[1], LogBase::Nats).unwrap();
        prop_assert!((nats - i * std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn data_processing(
        px in pmf_strategy(vec![3]),
        xy in channel_strategy(vec![3], vec![3]),
        yz in channel_strategy(vec![3], vec![2]),
    ) {
        let j = px.extend(&xy, &[0]).unwrap().extend(&yz, &[1]).unwrap();
        let ixy = mutual_information(&j, &[0], &[1], LogBase::Bits).unwrap();
        let ixz = mutual_information(&j, &[0], &[2], LogBase::Bits).unwrap();
        prop_assert!(ixz <= ixy + 1e-10);
    }

    #[test]
    fn tv_is_a_metric(p in pmf_strategy(vec![2, 3]), q in pmf_strategy(vec![2, 3]), r in pmf_strategy(vec![2, 3])) {
        let pq = total_variation(&p, &q).unwrap();
        prop_assert_eq!(pq, total_variation(&q, &p).unwrap());
        prop_assert!((0.0..=1.0).contains(&pq));
        prop_assert_eq!(total_variation(&p, &p).unwrap(), 0.0);
        prop_assert!(total_variation(&p, &r).unwrap() <= pq + total_variation(&q, &r).unwrap() + 1e-12);
    }

    #[test]
    fn mi_is_convex_in_the_channel(
        px in pmf_strategy(vec![3]),
        q1 in channel_strategy(vec![3], vec![3]),
        q2 in channel_strategy(vec![3], vec![3]),
    ) {
        let i = |q: &Channel| {
            let j = compose_channel(&px, q).unwrap();
            mutual_information(&j, &[0], &[1], LogBase::Bits).unwrap()
        };
        let mid = q1.mix(&q2, 0.5).unwrap();
        prop_assert!(i(&mid) <= 0.5 * (i(&q1) + i(&q2)) + 1e-10);
    }

    #[test]
    fn product_of_marginals_is_independent(p in pmf_strategy(vec![2, 3])) {
        let q = p.product_of_marginals(&[0], &[1]).unwrap();
        prop_assert!(mutual_information(&q, &[0], &[1], LogBase::Bits).unwrap() < 1e-12);
        prop_assert!(total_variation(&q.marginalize(&[0]).unwrap(), &p.marginalize(&[0]).unwrap()).unwrap() < 1e-12);
    }
}
