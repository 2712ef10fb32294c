mod common;

use common::*;
use coordcap_core::fixtures::uniform_binary;
use coordcap_core::prob::*;
use coordcap_core::rdproj::*;
use coordcap_core::regions::RateVector;
use coordcap_core::LogBase;
use proptest::prelude::*;
use rand::Rng;

fn hamming2() -> Vec<f64> {
    vec![0.0, 1.0, 1.0, 0.0]
}

/// D(R) of a uniform bit under Hamming distortion: h(D) = 1 − R, by bisection.
fn d_oracle(r: f64) -> f64 {
    if r >= 1.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h2(mid) < 1.0 - r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn uniform_bit_at_one_tenth_bit() {
    let d =
        min_distortion_at_rate(&uniform_binary(), &hamming2(), Alphabet::range(2), 0.1).unwrap();
    assert!((d.distortion - 0.31602).abs() <= 1e-3, "{}", d.distortion);
    assert!((d.distortion - d_oracle(0.1)).abs() <= 1e-6);
    assert!(d.rate <= 0.1 + 1e-6);
    assert!((channel_rate(&uniform_binary(), &d.channel).unwrap() - d.rate).abs() < 1e-9);
}

#[test]
fn distortion_rate_tracks_the_oracle() {
    for r in [0.0, 0.05, 0.2, 0.5, 0.8, 0.95, 1.0, 1.5] {
        let d =
            min_distortion_at_rate(&uniform_binary(), &hamming2(), Alphabet::range(2), r).unwrap();
        assert!(
            (d.distortion - d_oracle(r)).abs() <= 1e-5,
            "R={r}: {} vs {}",
            d.distortion,
            d_oracle(r)
        );
    }
}

#[test]
fn distortion_rate_is_monotone_and_convex() {
    let mut g = rng(21);
    for _ in 0..5 {
        let p = random_pmf(&mut g, &[3]);
        let d: Vec<f64> = (0..9)
            .map(|c| {
                if c / 3 == c % 3 {
                    0.0
                } else {
                    g.gen_range(0.2..1.0)
                }
            })
            .collect();
        let rs: Vec<f64> = (0..=16).map(|i| i as f64 * 0.1).collect();
        let ds: Vec<f64> = rs
            .iter()
            .map(|&r| {
                min_distortion_at_rate(&p, &d, Alphabet::range(3), r)
                    .unwrap()
                    .distortion
            })
            .collect();
        for w in ds.windows(2) {
            assert!(w[1] <= w[0] + 1e-7, "{ds:?}");
        }
        for w in ds.windows(3) {
            assert!(w[1] <= 0.5 * (w[0] + w[2]) + 1e-6, "{ds:?}");
        }
    }
}

#[test]
fn grid_reproduction() {
    let rows = hamming_grid(&uniform_binary(), 201, 0.1).unwrap();
    assert_eq!(rows.len(), 201 * 201);
    let min = grid_min_distortion(&rows).unwrap();
    // The 0.005 grid step cannot land on the boundary; the closest feasible
    // point is one step inside.
    assert!((min - 0.3175).abs() < 1e-9, "{min}");
    assert!(min >= d_oracle(0.1));
    assert!(min - d_oracle(0.1) <= 0.005);
    for r in rows.iter().step_by(997) {
        let ch = Channel::new(
            vec![Alphabet::range(2)],
            vec![Alphabet::range(2)],
            vec![1.0 - r.p0, r.p0, 1.0 - r.p1, r.p1],
        )
        .unwrap();
        assert!((channel_rate(&uniform_binary(), &ch).unwrap() - r.i_bits).abs() < 1e-12);
        assert_eq!(r.in_region, r.i_bits <= 0.1);
    }
}

#[test]
fn projection_matches_induced_joint() {
    let mut g = rng(5);
    for _ in 0..50 {
        let p0 = random_pmf(&mut g, &[3]);
        let ch = random_channel(&mut g, &[3], &[2, 2]);
        let tables: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..12).map(|_| g.gen_range(0.0..2.0)).collect())
            .collect();
        let spec = DistortionSpec::new(
            axes(&[3, 2, 2]),
            vec!["a".into(), "b".into()],
            tables.clone(),
        )
        .unwrap();
        let rates = RateVector::new(&[("R1", 0.4), ("R2", 1.1)], LogBase::Bits);
        let pt = project_point(&rates, &ch, &p0, &spec).unwrap();
        let joint = compose_channel(&p0, &ch).unwrap();
        for (d, t) in pt.distortions.iter().zip(&tables) {
            let direct: f64 = joint.mass().iter().zip(t).map(|(p, c)| p * c).sum();
            assert!((d - direct).abs() < 1e-12);
        }
        let m = ProjectionMatrix::new(2, &p0, &spec).unwrap();
        let img = m.apply(&[0.4, 1.1], &ch).unwrap();
        assert_eq!(&img[..2], &[0.4, 1.1]);
        for (a, b) in img[2..].iter().zip(&pt.distortions) {
            assert!((a - b).abs() < 1e-12);
        }
        let dense = m.dense();
        assert_eq!(dense.len(), 4);
        assert_eq!(dense[0][0], 1.0);
        assert_eq!(dense[2][..2], [0.0, 0.0]);
    }
}

#[test]
fn spec_rejects_bad_tables() {
    assert!(DistortionSpec::new(axes(&[2, 2]), vec!["d".into()], vec![vec![0.0; 3]]).is_err());
    assert!(DistortionSpec::new(
        axes(&[2, 2]),
        vec!["d".into()],
        vec![vec![-1.0, 0.0, 0.0, 0.0]]
    )
    .is_err());
    assert!(DistortionSpec::new(axes(&[2, 2]), vec![], vec![vec![0.0; 4]]).is_err());
    let h = DistortionSpec::hamming(Alphabet::range(3));
    assert_eq!(h.tables()[0].iter().filter(|&&v| v == 0.0).count(), 3);
}

proptest! {
    #![proptest_config(fixed(256))]

    #[test]
    fn distortion_of_type_identity(seed in any::<u64>(), n in 1usize..200) {
        let mut g = rng(seed);
        let (kx, ky) = (g.gen_range(1..4), g.gen_range(1..4));
        let xs: Vec<usize> = (0..n).map(|_| g.gen_range(0..kx)).collect();
        let ys: Vec<usize> = (0..n).map(|_| g.gen_range(0..ky)).collect();
        let d: Vec<f64> = (0..kx * ky).map(|_| g.gen_range(0.0..3.0)).collect();
        let sx = Sequence::new(Alphabet::range(kx), xs.clone()).unwrap();
        let sy = Sequence::new(Alphabet::range(ky), ys.clone()).unwrap();
        let t = joint_type(&[&sx, &sy]).unwrap();
        let empirical: f64 = xs.iter().zip(&ys).map(|(&x, &y)| d[x * ky + y]).sum::<f64>() / n as f64;
        prop_assert!((distortion_of_type(&t.to_pmf(), &d).unwrap() - empirical).abs() <= 1e-12);
        prop_assert!((distortion_of_joint_type(&t, &d).unwrap() - empirical).abs() <= 1e-12);
    }
}
