mod common;

use common::*;
use coordcap_core::codesim::*;
use coordcap_core::fixtures::*;
use coordcap_core::prob::*;
use coordcap_core::{Error, LogBase};

const LOG2_3: f64 = 1.584_962_500_721_156_3;

fn i_bsc(q: f64) -> f64 {
    1.0 - h2(q)
}

#[test]
fn two_node_rate_contrast() {
    let f = bsc(0.1).unwrap();
    let i = i_bsc(0.1);
    for seed in [7, MASTER_SEED] {
        let cfg = SimConfig::new(500, 50, 0.03, seed);
        let above = two_node_simulate(&f.source, &f.target, i + 0.17, &cfg).unwrap();
        let below = two_node_simulate(&f.source, &f.target, i - 0.17, &cfg).unwrap();
        assert!(above.mean_tv() <= 0.05, "seed {seed}: {}", above.mean_tv());
        assert!(below.mean_tv() >= 0.15, "seed {seed}: {}", below.mean_tv());
        let (a, b) = (
            two_node_simulate(&f.source, &f.target, i + 0.15, &cfg).unwrap(),
            two_node_simulate(&f.source, &f.target, i - 0.15, &cfg).unwrap(),
        );
        assert!(a.success_fraction() - b.success_fraction() >= 0.5);
    }
}

#[test]
fn cascade_rate_contrast() {
    let f = ta3();
    for (seed, margin) in [(7, 0.17), (MASTER_SEED, 0.15)] {
        let cfg = SimConfig::new(500, 50, 0.05, seed);
        let above = cascade_simulate(
            &f.source,
            &f.target,
            LOG2_3 + margin,
            LOG2_3 - 1.0 + margin,
            &cfg,
        )
        .unwrap();
        let below = cascade_simulate(
            &f.source,
            &f.target,
            LOG2_3 - margin,
            LOG2_3 - 1.0 - margin,
            &cfg,
        )
        .unwrap();
        assert!(
            above.success_fraction() - below.success_fraction() >= 0.5,
            "{} vs {}",
            above.success_fraction(),
            below.success_fraction()
        );
    }
}

#[test]
fn cascade_layer_split_rejects_inverted_rates() {
    let f = ta3();
    let cfg = SimConfig::new(50, 2, 0.05, 1);
    assert!(matches!(
        cascade_simulate(&f.source, &f.target, 0.5, 1.0, &cfg),
        Err(Error::RateSplitInvalid { .. })
    ));
}

#[test]
fn simulation_config_is_checked() {
    let f = bsc(0.1).unwrap();
    for cfg in [
        SimConfig::new(0, 1, 0.1, 1),
        SimConfig::new(10, 0, 0.1, 1),
        SimConfig::new(10, 1, 0.0, 1),
    ] {
        assert!(two_node_simulate(&f.source, &f.target, 0.7, &cfg).is_err());
    }
    assert!(two_node_simulate(&f.source, &f.target, 0.0, &SimConfig::new(10, 1, 0.1, 1)).is_err());
}

#[test]
fn reports_replay_bit_for_bit() {
    let f = bsc(0.1).unwrap();
    let cfg = SimConfig::new(300, 20, 0.03, 99);
    let a = two_node_simulate(&f.source, &f.target, 0.7, &cfg).unwrap();
    let b = two_node_simulate(&f.source, &f.target, 0.7, &cfg).unwrap();
    assert_eq!(a, b);
    // Each aggregate row is the single trial replayed on its own.
    for i in [0, 7, 19] {
        assert_eq!(
            two_node_trial(&f.source, &f.target, 0.7, &cfg, i)
                .unwrap()
                .outcome,
            a.outcomes[i]
        );
    }
    let t = ta3();
    let c1 = cascade_simulate(&t.source, &t.target, 1.8, 0.8, &cfg).unwrap();
    let c2 = cascade_simulate(&t.source, &t.target, 1.8, 0.8, &cfg).unwrap();
    assert_eq!(c1, c2);
    let other = two_node_simulate(
        &f.source,
        &f.target,
        0.7,
        &SimConfig {
            seed: 100,
            ..cfg.clone()
        },
    )
    .unwrap();
    assert_ne!(a, other);
}

fn seq(k: usize, s: &[usize]) -> Sequence {
    Sequence::new(Alphabet::range(k), s.to_vec()).unwrap()
}

#[test]
fn reported_tv_matches_recomputed_joint_type() {
    let f = bsc(0.1).unwrap();
    let cfg = SimConfig::new(400, 5, 0.03, 3);
    for i in 0..5 {
        let d = two_node_trial(&f.source, &f.target, 0.7, &cfg, i).unwrap();
        let t = joint_type(&[&seq(2, &d.sequences[0]), &seq(2, &d.sequences[1])]).unwrap();
        assert!((total_variation(&t.to_pmf(), &f.joint()).unwrap() - d.outcome.tv).abs() <= 1e-12);
    }
    let f = ta3();
    let cfg = SimConfig::new(300, 4, 0.05, 3);
    for i in 0..4 {
        let d = cascade_trial(&f.source, &f.target, 1.8, 0.8, &cfg, i).unwrap();
        let s: Vec<Sequence> = d.sequences.iter().map(|v| seq(3, v)).collect();
        let t = joint_type(&s.iter().collect::<Vec<_>>()).unwrap();
        // Sequences carry indices, so compare against the joint on plain labels.
        let target = Pmf::new(axes(&[3, 3, 3]), f.joint().mass().to_vec()).unwrap();
        assert!((total_variation(&t.to_pmf(), &target).unwrap() - d.outcome.tv).abs() <= 1e-12);
    }
}

/// X uniform, Y = X through BSC(q), Z = Y through BSC(q), as one joint.
fn chain_joint(q: f64) -> Pmf {
    bsc_chain(q).unwrap().joint()
}

#[test]
fn side_information_coding_succeeds_above_the_rate() {
    let j = chain_joint(0.2);
    let u = Channel::deterministic(axes(&[2, 2]), axes(&[2]), |xy| vec![xy[0]]).unwrap();
    let r = conditional_entropy(&j, &[0], &[1, 2], LogBase::Bits).unwrap() + 0.2;
    for seed in [1, MASTER_SEED] {
        let rep = side_info_simulate(&j, &u, r, &SimConfig::new(400, 200, 0.0125, seed)).unwrap();
        assert!(
            rep.success_fraction() >= 0.95,
            "seed {seed}: {}",
            rep.success_fraction()
        );
        assert_eq!(rep.threshold, 0.1);
    }
    let d = side_info_trial(&j, &u, r, &SimConfig::new(400, 1, 0.0125, 5), 0).unwrap();
    assert_eq!(d.sequences.len(), 4);
    assert_eq!(
        d.sequences[3], d.sequences[0],
        "U = X is recovered when decoding succeeds"
    );
    let low = conditional_entropy(&j, &[0], &[1, 2], LogBase::Bits).unwrap() - 0.05;
    assert!(matches!(
        side_info_simulate(&j, &u, low, &SimConfig::new(100, 1, 0.0125, 1)),
        Err(Error::NonPositiveGamma { .. })
    ));
}

#[test]
fn wyner_ziv_style_auxiliary() {
    // No Z information; U is a noisy copy of X and Y is side information.
    let x = Alphabet::range(2);
    let xy = bsc(0.1).unwrap().joint();
    let j = xy
        .extend(
            &Channel::constant(vec![x.clone()], &validate_pmf(&[1.0]).unwrap()),
            &[0],
        )
        .unwrap();
    let u = Channel::from_fn(axes(&[2, 2]), axes(&[2]), |c, o| {
        if c[0] == o[0] {
            0.9
        } else {
            0.1
        }
    })
    .unwrap();
    let q = j.extend(&u, &[0, 1]).unwrap();
    let r = conditional_mutual_information(&q, &[0], &[3], &[1], LogBase::Bits).unwrap() + 0.2;
    let rep = side_info_simulate(&j, &u, r, &SimConfig::new(400, 100, 0.02, 2)).unwrap();
    assert!(rep.success_fraction() >= 0.95, "{}", rep.success_fraction());
}

#[test]
fn strong_markov_lemma_empirical() {
    let j = chain_joint(0.2);
    let mut fractions = Vec::new();
    for n in [100, 300, 600] {
        let rep = strong_markov_trial(&j, &SimConfig::new(n, 200, 0.05, MASTER_SEED)).unwrap();
        assert_eq!(rep.outcomes.len(), 200);
        fractions.push(rep.success_fraction());
        let corner = strong_markov_corner(&j, &SimConfig::new(n, 200, 0.05, MASTER_SEED)).unwrap();
        assert!(
            corner.success_fraction() >= 0.9,
            "corner n={n}: {}",
            corner.success_fraction()
        );
    }
    assert!(fractions[1] >= 0.95, "{fractions:?}");
    assert!(
        fractions.windows(2).all(|w| w[1] >= w[0] - 0.02),
        "{fractions:?}"
    );
}

#[test]
fn strong_markov_needs_a_chain() {
    let p = parity().joint();
    assert!(matches!(
        strong_markov_trial(&p, &SimConfig::new(50, 2, 0.05, 1)),
        Err(Error::NotMarkov { .. })
    ));
}

#[test]
fn corner_types_stay_within_epsilon() {
    let p = [0.4, 0.1, 0.1, 0.4];
    for n in [50, 100, 300] {
        for t in corner_types(&p, n, 0.05) {
            assert_eq!(t.iter().sum::<u64>(), n as u64);
            assert!(tv_of_counts(&t, n as u64, &p) < 0.05);
        }
    }
}

/// U uniform on `k`, copied to X, Y and Z.
fn copies(k: usize) -> (Pmf, Channel) {
    let u = Pmf::uniform(axes(&[k])).unwrap();
    (u, Channel::identity(Alphabet::range(k)))
}

#[test]
fn exact_single_codeword() {
    let (u, id) = copies(2);
    for n in 1..=8 {
        let tv = no_comm_strong_exact_tv(&u, &id, &id, &id, 0.0, n, 3).unwrap();
        assert!(
            (tv - (1.0 - 0.5f64.powi(n as i32))).abs() < 1e-12,
            "n={n}: {tv}"
        );
    }
}

#[test]
fn exact_trivial_u_is_exact() {
    let mut g = rng(8);
    let u = validate_pmf(&[1.0]).unwrap();
    let one = vec![Alphabet::range(1)];
    let xs = Channel::constant(one.clone(), &random_pmf(&mut g, &[2]));
    let ys = Channel::constant(one.clone(), &random_pmf(&mut g, &[3]));
    let zs = Channel::constant(one, &random_pmf(&mut g, &[2]));
    for r0 in [0.0, 0.5, 2.0] {
        assert!(no_comm_strong_exact_tv(&u, &xs, &ys, &zs, r0, 4, 1).unwrap() <= 1e-12);
    }
}

#[test]
fn exact_full_randomness_reference() {
    let mut g = rng(10);
    let u = random_pmf(&mut g, &[2]);
    let x = random_channel(&mut g, &[2], &[2]);
    let y = random_channel(&mut g, &[2], &[2]);
    let z = random_channel(&mut g, &[2], &[2]);
    let cfg = ExactConfig {
        mode: ExactMode::FullRandomness,
        ..ExactConfig::default()
    };
    for n in 1..=4 {
        let tv = no_comm_strong_exact_tv_with(&u, &x, &y, &z, 0.0, n, 1, &cfg).unwrap();
        assert!(tv <= 1e-12, "n={n}: {tv}");
        let coded = no_comm_strong_exact_tv(&u, &x, &y, &z, 1.0, n, 1).unwrap();
        assert!((0.0..=1.0).contains(&coded));
    }
}

#[test]
fn exact_improves_with_common_randomness() {
    let (u, id) = copies(2);
    let mut last = f64::INFINITY;
    for step in 0..=6 {
        let r0 = step as f64 / 3.0;
        let mean: f64 = (0..20u64)
            .map(|s| no_comm_strong_exact_tv(&u, &id, &id, &id, r0, 6, s).unwrap())
            .sum::<f64>()
            / 20.0;
        assert!(mean <= last + 1e-12, "R0={r0}: {mean} after {last}");
        last = mean;
    }
}

#[test]
fn exact_respects_budget() {
    let (u, id) = copies(3);
    // Deterministic copies cost one unit per codeword.
    let tight = ExactConfig {
        budget: 100,
        ..ExactConfig::default()
    };
    assert!(matches!(
        no_comm_strong_exact_tv_with(&u, &id, &id, &id, 1.0, 8, 1, &tight),
        Err(Error::BudgetExceeded { .. })
    ));
    assert!(matches!(
        no_comm_strong_exact_tv(&u, &id, &id, &id, 4.0, 8, 1),
        Err(Error::CodebookTooLarge { .. }) | Err(Error::BudgetExceeded { .. })
    ));
}
