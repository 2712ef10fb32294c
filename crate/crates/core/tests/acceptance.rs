//! One PASS/FAIL line per acceptance criterion. Exits nonzero on any failure.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use coordcap_core::auxopt::*;
use coordcap_core::codesim::*;
use coordcap_core::fixtures::*;
use coordcap_core::prob::*;
use coordcap_core::rdproj::*;
use coordcap_core::regions::*;
use coordcap_core::LogBase;
use rand::Rng;

const LOG2_3: f64 = 1.584_962_500_721_156_3;
const INSTANCES: usize = 200;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn near(what: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure(
        (got - want).abs() <= tol,
        format!("{what}: got {got}, want {want} ± {tol}"),
    )
}

fn e<T>(r: coordcap_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn closed_form_regions() -> Outcome {
    for k in [2usize, 3, 5, 10] {
        let f = e(ta2(k))?;
        let want = (k as f64 / (k as f64 - 1.0)).log2();
        near(
            &format!("TA2({k}) two-node"),
            e(two_node_min_rate(&f.source, &f.target))?,
            want,
            1e-9,
        )?;
    }
    let f = ta3();
    let c = e(cascade_min_rates(&f.source, &f.target))?;
    near("TA3 cascade R1", c.values()[0], LOG2_3, 1e-9)?;
    near("TA3 cascade R2", c.values()[1], LOG2_3 - 1.0, 1e-9)?;
    let f = parity();
    let o = e(broadcast_outer_rates(&f.source, &f.target))?;
    near("PARITY sum", o.get("sum").unwrap(), 1.0, 1e-9)?;
    let f = tamt();
    let j = f.joint();
    let r1 = e(conditional_mutual_information(
        &j,
        &[0],
        &[2],
        &[1],
        LogBase::Bits,
    ))?;
    let r2 = e(mutual_information(&j, &[0, 1], &[2], LogBase::Bits))?;
    near("TAMT R1", r1, 1.0, 1e-9)?;
    near("TAMT R2", r2, LOG2_3, 1e-9)?;
    Ok(format!("TAMT ({r1:.9}, {r2:.9})"))
}

fn golden_ratio() -> Outcome {
    let f = ta3();
    let u = golden_ratio_witness();
    let r = e(broadcast_inner_rates(&f.source, &f.target, &u))?;
    let (r1, r2) = (r.get("R1").unwrap(), r.get("R2").unwrap());
    near("log2 3 − log2 φ", LOG2_3 - PHI.log2(), 0.89072, 1e-5)?;
    near("R1", r1, LOG2_3 - PHI.log2(), 1e-6)?;
    near("R2", r2, LOG2_3 - PHI.log2(), 1e-6)?;
    let j = e(broadcast_joint(&f.source, &f.target, &u))?;
    let ixu = e(mutual_information(&j, &[0], &[3], LogBase::Bits))?;
    ensure((0.035..=0.045).contains(&ixu), format!("I(X;U) = {ixu}"))?;
    Ok(format!("R1 = R2 = {r1:.6}, I(X;U) = {ixu:.6}"))
}

fn optimizers() -> Outcome {
    let cfg = AuxSearchConfig::default();
    let mut notes = Vec::new();
    for k in [2usize, 3, 4] {
        let even = k.div_ceil(2) * 2;
        let want = 2.0 - (even as f64 / (even as f64 - 1.0)).log2();
        let (c, w) = e(wyner_common_information(&e(ta2_joint(k))?, &cfg))?;
        near(&format!("C(TA2({k}))"), c, want, 1e-3)?;
        let (again, _) = e(latent_witness_value(&w, &e(ta2_joint(k))?))?;
        near("witness re-evaluation", again, c, 1e-8)?;
        notes.push(format!("C({k})={c:.4}"));
    }
    for k in [2usize, 3, 5, 10] {
        let h = e(necessary_conditional_entropy(&e(ta2_joint(k))?))?;
        near(
            &format!("necessary entropy TA2({k})"),
            h,
            ((k - 1) as f64).log2(),
            1e-12,
        )?;
    }
    let f = e(ta2(3))?;
    let at0 = e(strong_two_node_min_rate(&f.source, &f.target, 0.0, &cfg))?;
    let (cxy, _) = e(wyner_common_information(&f.joint(), &cfg))?;
    near("strong R(0)", at0, cxy, 1e-3)?;
    let h = e(necessary_conditional_entropy(&f.joint()))?;
    let at_h = e(strong_two_node_min_rate(&f.source, &f.target, h, &cfg))?;
    let i = e(two_node_min_rate(&f.source, &f.target))?;
    near("strong R(H)", at_h, i, 1e-3)?;
    notes.push(format!("R(0)={at0:.4} R(H)={at_h:.4}"));
    Ok(notes.join(" "))
}

fn no_communication() -> Outcome {
    let cfg = AuxSearchConfig::default();
    let (r, _) = e(no_comm_common_randomness_rate(&e(ta_triple(3))?, &cfg))?;
    near("permutations", r, 2.58496, 1e-2)?;
    let mut g = rng(MASTER_SEED);
    let indep = e(
        e(random_pmf(&mut g, &[2]).product(&random_pmf(&mut g, &[3])))?
            .product(&random_pmf(&mut g, &[2])),
    )?;
    let (ri, _) = e(no_comm_common_randomness_rate(&indep, &cfg))?;
    ensure(ri <= 1e-6, format!("independent triple gives {ri}"))?;
    Ok(format!("permutations {r:.5}, independent {ri:.2e}"))
}

fn gaussian() -> Outcome {
    let mut checked = 0;
    for r in [0.25, 0.5, 1.0, 2.0] {
        for j in 0..50 {
            let rho_yz = -0.98 + 1.96 * j as f64 / 49.0;
            let edge = ((1.0 - rho_yz * rho_yz) * (1.0 - 2f64.powf(-2.0 * r))).sqrt();
            ensure(
                e(gaussian_isolated_tradeoff(r, edge * (1.0 - 1e-6), rho_yz))?,
                format!("inside at R={r}, ρyz={rho_yz}"),
            )?;
            ensure(
                !e(gaussian_isolated_tradeoff(r, edge * (1.0 + 1e-6), rho_yz))?,
                format!("outside at R={r}, ρyz={rho_yz}"),
            )?;
            checked += 2;
        }
    }
    Ok(format!("{checked} boundary points"))
}

fn monte_carlo_contrast() -> Outcome {
    let f = e(bsc(0.1))?;
    let i = 1.0 - h2(0.1);
    let cfg = SimConfig::new(500, 50, 0.03, MASTER_SEED);
    let above = e(two_node_simulate(&f.source, &f.target, i + 0.17, &cfg))?.mean_tv();
    let below = e(two_node_simulate(&f.source, &f.target, i - 0.17, &cfg))?.mean_tv();
    ensure(above <= 0.05, format!("mean TV above {above}"))?;
    ensure(below >= 0.15, format!("mean TV below {below}"))?;
    let t = ta3();
    let cfg = SimConfig::new(500, 50, 0.05, MASTER_SEED);
    let ca = e(cascade_simulate(
        &t.source,
        &t.target,
        LOG2_3 + 0.17,
        LOG2_3 - 1.0 + 0.17,
        &cfg,
    ))?
    .success_fraction();
    let cb = e(cascade_simulate(
        &t.source,
        &t.target,
        LOG2_3 - 0.17,
        LOG2_3 - 1.0 - 0.17,
        &cfg,
    ))?
    .success_fraction();
    ensure(ca - cb >= 0.5, format!("cascade success {ca} vs {cb}"))?;
    Ok(format!(
        "two-node TV {above:.4} vs {below:.4}; cascade success {ca:.2} vs {cb:.2}"
    ))
}

fn strong_markov() -> Outcome {
    let j = e(bsc_chain(0.2))?.joint();
    let mut s = Vec::new();
    for n in [100, 300, 600] {
        s.push(
            e(strong_markov_trial(
                &j,
                &SimConfig::new(n, 200, 0.05, MASTER_SEED),
            ))?
            .success_fraction(),
        );
    }
    ensure(s[1] >= 0.95, format!("n=300 success {}", s[1]))?;
    ensure(
        s.windows(2).all(|w| w[1] >= w[0] - 0.02),
        format!("not monotone: {s:?}"),
    )?;
    Ok(format!("success {s:?}"))
}

fn exact_evaluator() -> Outcome {
    let u = e(Pmf::uniform(axes(&[2])))?;
    let id = Channel::identity(Alphabet::range(2));
    for n in 1..=8 {
        let tv = e(no_comm_strong_exact_tv(
            &u,
            &id,
            &id,
            &id,
            0.0,
            n,
            MASTER_SEED,
        ))?;
        near(
            &format!("single codeword n={n}"),
            tv,
            1.0 - 0.5f64.powi(n as i32),
            1e-12,
        )?;
    }
    let mut g = rng(MASTER_SEED);
    let one = vec![Alphabet::range(1)];
    let trivial = e(validate_pmf(&[1.0]))?;
    for _ in 0..10 {
        let xs = Channel::constant(one.clone(), &random_pmf(&mut g, &[2]));
        let ys = Channel::constant(one.clone(), &random_pmf(&mut g, &[3]));
        let zs = Channel::constant(one.clone(), &random_pmf(&mut g, &[2]));
        let tv = e(no_comm_strong_exact_tv(&trivial, &xs, &ys, &zs, 0.5, 4, 1))?;
        ensure(tv <= 1e-12, format!("product target TV {tv}"))?;
    }
    let mut means = Vec::new();
    for step in 0..=6 {
        let r0 = step as f64 / 3.0;
        let mut sum = 0.0;
        for s in 0..20u64 {
            sum += e(no_comm_strong_exact_tv(&u, &id, &id, &id, r0, 6, s))?;
        }
        means.push(sum / 20.0);
    }
    ensure(
        means.windows(2).all(|w| w[1] <= w[0] + 1e-12),
        format!("not monotone in R0: {means:?}"),
    )?;
    Ok(format!(
        "mean TV at n=6 from {:.4} to {:.4}",
        means[0], means[6]
    ))
}

fn rate_distortion() -> Outcome {
    let d = e(min_distortion_at_rate(
        &uniform_binary(),
        &[0.0, 1.0, 1.0, 0.0],
        Alphabet::range(2),
        0.1,
    ))?;
    let (mut lo, mut hi) = (0.0, 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h2(mid) < 0.9 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    near("D(0.1)", d.distortion, 0.31602, 1e-3)?;
    near("D(0.1) vs bisection", d.distortion, lo, 1e-6)?;
    let mut g = rng(MASTER_SEED);
    for _ in 0..INSTANCES {
        let n = g.gen_range(1..300);
        let xs: Vec<usize> = (0..n).map(|_| g.gen_range(0..2)).collect();
        let ys: Vec<usize> = (0..n).map(|_| g.gen_range(0..3)).collect();
        let table: Vec<f64> = (0..6).map(|_| g.gen_range(0.0..2.0)).collect();
        let t = e(joint_type(&[
            &e(Sequence::new(Alphabet::range(2), xs.clone()))?,
            &e(Sequence::new(Alphabet::range(3), ys.clone()))?,
        ]))?;
        let direct = xs
            .iter()
            .zip(&ys)
            .map(|(&x, &y)| table[x * 3 + y])
            .sum::<f64>()
            / n as f64;
        near(
            "distortion of type",
            e(distortion_of_type(&t.to_pmf(), &table))?,
            direct,
            1e-12,
        )?;
    }
    Ok(format!("D(0.1) = {:.6}", d.distortion))
}

fn scaling() -> Outcome {
    let c = e(scaling_sum_rates(100, Topology::ExtendedCascade))?;
    let direct: f64 = (1..100).map(|i| (100.0 / i as f64).ln()).sum();
    near("cascade direct sum", c.sum_nats, direct, 1e-9)?;
    ensure(
        (c.sum_nats - 100.0).abs() <= 5.0,
        format!("cascade sum {}", c.sum_nats),
    )?;
    let b = e(scaling_sum_rates(100, Topology::ExtendedBroadcast))?;
    let reference = 100f64.ln() + 1.0;
    ensure(
        (b.sum_nats - reference).abs() <= 0.05 * reference,
        format!("broadcast sum {}", b.sum_nats),
    )?;
    Ok(format!(
        "cascade {:.3} nats, broadcast {:.3} nats",
        c.sum_nats, b.sum_nats
    ))
}

/// Runs `f` on `INSTANCES` seeded instances, reporting the first failure.
fn each(
    name: &str,
    tag: u64,
    mut f: impl FnMut(&mut rand_chacha::ChaCha8Rng) -> Result<(), String>,
) -> Result<(), String> {
    let mut g = rng(MASTER_SEED ^ tag);
    for i in 0..INSTANCES {
        f(&mut g).map_err(|m| format!("{name} instance {i}: {m}"))?;
    }
    Ok(())
}

fn property_suites() -> Outcome {
    let bits = LogBase::Bits;
    each("entropy bounds", 1, |g| {
        let p = random_pmf(g, &[3, 4]);
        let hx = e(entropy_of(&p, &[0], bits))?;
        ensure(
            (-1e-12..=3f64.log2() + 1e-12).contains(&hx),
            format!("H(X) = {hx}"),
        )?;
        ensure(
            e(conditional_entropy(&p, &[0], &[1], bits))? <= hx + 1e-12,
            "conditioning increased entropy",
        )?;
        near("H vs oracle", entropy(&p, bits), h(p.mass()), 1e-10)
    })?;
    each("chain rule", 2, |g| {
        let p = random_pmf(g, &[2, 3, 2]);
        let lhs = entropy(&p, bits);
        let rhs = e(entropy_of(&p, &[0], bits))? + e(conditional_entropy(&p, &[1, 2], &[0], bits))?;
        near("H(XYZ)", lhs, rhs, 1e-10)
    })?;
    each("mutual information", 3, |g| {
        let p = random_pmf(g, &[3, 2, 2]);
        let i = e(conditional_mutual_information(&p, &[0], &[1], &[2], bits))?;
        ensure(i >= 0.0, "negative")?;
        near(
            "I(X;Y|Z) vs oracle",
            i,
            cmi(p.mass(), &p.dims(), &[0], &[1], &[2]),
            1e-10,
        )
    })?;
    each("data processing", 4, |g| {
        let p = random_pmf(g, &[3]);
        let j = e(e(p.extend(&random_channel(g, &[3], &[3]), &[0]))?
            .extend(&random_channel(g, &[3], &[2]), &[1]))?;
        ensure(
            e(mutual_information(&j, &[0], &[2], bits))?
                <= e(mutual_information(&j, &[0], &[1], bits))? + 1e-12,
            "I(X;Z) > I(X;Y)",
        )
    })?;
    each("total variation metric", 5, |g| {
        let (p, q, r) = (
            random_pmf(g, &[2, 3]),
            random_pmf(g, &[2, 3]),
            random_pmf(g, &[2, 3]),
        );
        let (pq, qp) = (e(total_variation(&p, &q))?, e(total_variation(&q, &p))?);
        ensure((0.0..=1.0).contains(&pq) && pq == qp, "range or symmetry")?;
        ensure(e(total_variation(&p, &p))? == 0.0, "identity")?;
        ensure(
            pq <= e(total_variation(&p, &r))? + e(total_variation(&r, &q))? + 1e-12,
            "triangle",
        )
    })?;
    each("broadcast inner within outer", 6, |g| {
        let (p0, t, u) = (
            random_pmf(g, &[3]),
            random_channel(g, &[3], &[2, 3]),
            random_channel(g, &[3, 2, 3], &[3]),
        );
        let (i, o) = (
            e(broadcast_inner_rates(&p0, &t, &u))?,
            e(broadcast_outer_rates(&p0, &t))?,
        );
        ensure(
            i.values()
                .iter()
                .zip(o.values())
                .all(|(a, b)| *a >= b - 1e-9),
            "inner point outside the outer bound",
        )
    })?;
    each("cascade-multiterminal inner within outer", 7, |g| {
        let p0 = random_pmf(g, &[2, 3]);
        let j = e(cascade_mt_joint(
            &p0,
            &random_channel(g, &[2], &[2, 2]),
            &random_channel(g, &[3, 2, 2], &[3]),
        ))?;
        let target = e(e(j.marginalize(&[0, 1, 4]))?.condition(&[0, 1]))?;
        let uv = e(j.marginalize(&[0, 2, 3]))?;
        let uv = e(uv.condition(&[0]))?;
        let zc = e(e(j.marginalize(&[1, 2, 3, 4]))?.condition(&[0, 1, 2]))?;
        let inner = e(cascade_mt_inner_rates(&p0, &uv, &zc, &target))?;
        let xyz = e(compose_channel(&p0, &target))?;
        ensure(
            inner.get("R2").unwrap() >= e(mutual_information(&xyz, &[0, 1], &[2], bits))? - 1e-9,
            "R2",
        )?;
        ensure(
            inner.get("R1").unwrap()
                >= e(conditional_mutual_information(&xyz, &[0], &[2], &[1], bits))? - 1e-9,
            "R1",
        )
    })?;
    each("time-sharing midpoints", 8, |g| {
        let p0 = random_pmf(g, &[3]);
        let (a, b) = (
            random_channel(g, &[3], &[2, 2]),
            random_channel(g, &[3], &[2, 2]),
        );
        let mix = e(a.mix(&b, 0.5))?;
        let two = |t: &Channel| e(two_node_min_rate(&p0, t));
        ensure(
            two(&mix)? <= 0.5 * (two(&a)? + two(&b)?) + 1e-10,
            "two-node",
        )?;
        let (ca, cb) = (
            e(cascade_min_rates(&p0, &a))?,
            e(cascade_min_rates(&p0, &b))?,
        );
        let r1 = 0.5 * (ca.values()[0] + cb.values()[0]) + 1e-10;
        let r2 = 0.5 * (ca.values()[1] + cb.values()[1]) + 1e-10;
        ensure(
            e(cascade_membership(&p0, &mix, r1, r2))?.verdict == Verdict::Member,
            "cascade",
        )
    })?;
    each("broadcast equality when Y − X − Z", 9, |g| {
        let p0 = random_pmf(g, &[3]);
        let (c1, c2) = (random_channel(g, &[3], &[3]), random_channel(g, &[3], &[3]));
        let t = e(Channel::from_fn(axes(&[3]), axes(&[3, 3]), |x, yz| {
            c1.row(x[0])[yz[0]] * c2.row(x[0])[yz[1]]
        }))?;
        let empty = Channel::constant(axes(&[3, 3, 3]), &e(validate_pmf(&[1.0]))?);
        let (i, o) = (
            e(broadcast_inner_rates(&p0, &t, &empty))?,
            e(broadcast_outer_rates(&p0, &t))?,
        );
        let canon = |r: &RateVector| {
            [
                r.values()[0],
                r.values()[1],
                r.values()[2].max(r.values()[0] + r.values()[1]),
            ]
        };
        ensure(
            canon(&i)
                .iter()
                .zip(canon(&o))
                .all(|(a, b)| (a - b).abs() <= 1e-9),
            "regions differ",
        )
    })?;
    each(
        "cascade-multiterminal equality when X − Y − Z",
        10,
        |g| {
            let p0 = random_pmf(g, &[2, 3]);
            let zy = random_channel(g, &[3], &[2]);
            let one = Alphabet::range(1);
            let t = e(Channel::from_fn(axes(&[2, 3]), axes(&[2]), |xy, z| {
                zy.row(xy[1])[z[0]]
            }))?;
            let uv = e(Channel::deterministic(
                axes(&[2]),
                vec![one.clone(), one.clone()],
                |_| vec![0, 0],
            ))?;
            let zc = e(Channel::from_fn(
                vec![Alphabet::range(3), one.clone(), one],
                axes(&[2]),
                |c, z| zy.row(c[0])[z[0]],
            ))?;
            let i = e(cascade_mt_inner_rates(&p0, &uv, &zc, &t))?;
            let j = e(compose_channel(&p0, &t))?;
            near(
                "R1",
                i.get("R1").unwrap(),
                e(conditional_mutual_information(&j, &[0], &[2], &[1], bits))?,
                1e-9,
            )?;
            near(
                "R2",
                i.get("R2").unwrap(),
                e(mutual_information(&j, &[0, 1], &[2], bits))?,
                1e-9,
            )
        },
    )?;
    let mut seed = 0u64;
    each("Wyner sandwich", 11, |g| {
        seed += 1;
        let p = random_pmf(g, &[2, 3]);
        let cfg = AuxSearchConfig {
            restarts: 2,
            max_iterations: 800,
            seed,
            ..AuxSearchConfig::default()
        };
        let (c, w) = e(wyner_common_information(&p, &cfg))?;
        let i = e(mutual_information(&p, &[0], &[1], bits))?;
        let cap = e(entropy_of(&p, &[0], bits))?.min(e(entropy_of(&p, &[1], bits))?);
        ensure(
            i <= c + 1e-9 && c <= cap + 1e-9,
            format!("{i} ≤ {c} ≤ {cap} fails"),
        )?;
        ensure(w.feasibility_gap <= WITNESS_TOLERANCE, "infeasible witness")
    })?;
    let f = e(bsc(0.1))?;
    each("determinism and replay", 12, |g| {
        let cfg = SimConfig::new(g.gen_range(20..120), 3, 0.1, g.gen());
        let r = g.gen_range(0.3..1.2);
        let a = e(two_node_simulate(&f.source, &f.target, r, &cfg))?;
        ensure(
            a == e(two_node_simulate(&f.source, &f.target, r, &cfg))?,
            "reports differ",
        )?;
        let i = g.gen_range(0..3);
        ensure(
            e(two_node_trial(&f.source, &f.target, r, &cfg, i))?.outcome == a.outcomes[i],
            "trial replay differs",
        )
    })?;
    Ok(format!("12 properties × {INSTANCES} instances"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("closed-form region values", closed_form_regions),
        ("golden-ratio witness", golden_ratio),
        ("optimizers against closed forms", optimizers),
        ("strong no-communication", no_communication),
        ("Gaussian tradeoff boundary", gaussian),
        ("Monte Carlo achievability contrast", monte_carlo_contrast),
        ("strong Markov lemma", strong_markov),
        ("exact strong-coordination evaluator", exact_evaluator),
        ("rate-distortion projection", rate_distortion),
        ("scaling laws", scaling),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "{tag} {:>2} {name}: {detail} ({:.1}s)",
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
