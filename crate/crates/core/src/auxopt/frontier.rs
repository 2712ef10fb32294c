// Weighted inner-bound searches for the broadcast, cascade-multiterminal and
// degraded-source networks.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::engine::{Problem, Tables};
use super::{run_search, select, AuxSearchConfig, AuxWitness, Candidate, Polish, WitnessChannel};
use crate::prob::{compose_channel, Alphabet, Channel, LogBase, Pmf};
use crate::regions::{self, RateVector, OPTIMIZER_TV_TOLERANCE};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub enum FrontierProblem<'a> {
    /// Source p0(x), target p(y,z|x).
    Broadcast { p0: &'a Pmf, target: &'a Channel },
    /// Source p0(x,y), target p(z|x,y).
    CascadeMt { p0_xy: &'a Pmf, target: &'a Channel },
    /// Source p0(x), Y = f0(X), target p(z|x,y).
    DegradedSource {
        p0: &'a Pmf,
        f0: &'a [usize],
        target: &'a Channel,
    },
}

/// Minimizes the weighted sum of the network's inner-bound rates over the
/// auxiliary channel(s). The returned rates come from re-evaluating the
/// witness through [`crate::regions`], and `witness.objective` is their
/// weighted sum.
///
/// Broadcast weights (w1, w2) return the vertex of the witness's inner region
/// minimizing w1·R1 + w2·R2. Cascade-multiterminal weights act on (R1, R2),
/// degraded-source weights on (R1, R2, R3).
pub fn optimize_inner_frontier(
    problem: &FrontierProblem,
    weights: &[f64],
    cfg: &AuxSearchConfig,
) -> Result<(RateVector, AuxWitness)> {
    cfg.validate()?;
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "weights must be nonnegative: {weights:?}"
        )));
    }
    match *problem {
        FrontierProblem::Broadcast { p0, target } => broadcast(p0, target, weights, cfg),
        FrontierProblem::CascadeMt { p0_xy, target } => cascade_mt(p0_xy, target, weights, cfg),
        FrontierProblem::DegradedSource { p0, f0, target } => {
            degraded(p0, f0, target, weights, cfg)
        }
    }
}

fn weights_of<const N: usize>(weights: &[f64]) -> Result<[f64; N]> {
    weights
        .try_into()
        .map_err(|_| Error::InvalidArgument(format!("expected {N} weights, got {}", weights.len())))
}

/// Starts for a free channel p(u | x,y,z) over a fixed joint: u is a function
/// of the conditioning cell, truncated to `k` symbols when it does not fit.
fn deterministic_start(
    problem: &Problem,
    k: usize,
    in_dims: &[usize],
    g: impl Fn(&[usize]) -> usize,
) -> Option<Tables> {
    let rows: usize = in_dims.iter().product();
    let mut table = vec![0.0; rows * k];
    let mut idx = vec![0; in_dims.len()];
    for r in 0..rows {
        let u = g(&idx);
        if u >= k {
            return None;
        }
        table[r * k + u] = 1.0;
        crate::prob::advance(&mut idx, in_dims);
    }
    Some(problem.assemble(&[table]))
}

/// Channel p(u | inputs) with unused u symbols dropped.
fn compress_channel(
    input_axes: Vec<Alphabet>,
    table: &[f64],
    k: usize,
    weight: &[f64],
) -> Result<Channel> {
    let rows = table.len() / k;
    let used: Vec<usize> = (0..k)
        .filter(|&u| (0..rows).any(|r| weight[r] > 0.0 && table[r * k + u] > 0.0))
        .collect();
    let used = if used.is_empty() { vec![0] } else { used };
    let mut t = Vec::with_capacity(rows * used.len());
    for r in 0..rows {
        let row: Vec<f64> = used.iter().map(|&u| table[r * k + u]).collect();
        let s: f64 = row.iter().sum();
        if s > 0.0 {
            t.extend(row.iter().map(|v| v / s));
        } else {
            t.extend(core::iter::repeat(1.0 / used.len() as f64).take(used.len()));
        }
    }
    Channel::new(input_axes, vec![Alphabet::range(used.len())], t)
}

fn pick(cands: &[Candidate], tolerance: f64) -> Result<&Candidate> {
    select(cands, tolerance).ok_or_else(|| Error::InfeasibleTarget {
        gap: cands.iter().map(|c| c.gap).fold(f64::INFINITY, f64::min),
    })
}

fn broadcast(
    p0: &Pmf,
    target: &Channel,
    weights: &[f64],
    cfg: &AuxSearchConfig,
) -> Result<(RateVector, AuxWitness)> {
    let [w1, w2] = weights_of::<2>(weights)?;
    let joint = compose_channel(p0, target)?;
    if joint.ndim() != 3 {
        return Err(Error::AxisMismatch(
            "broadcast needs single-axis X, Y and Z".into(),
        ));
    }
    let d = joint.dims();
    let k = cfg.cardinality_cap.unwrap_or(joint.len());
    let mut pr = Problem::new(vec![d[0], d[1], d[2], k]);
    pr.factor(&[], &[0, 1, 2], Some(joint.mass().to_vec()));
    pr.factor(&[0, 1, 2], &[3], None);
    pr.cmi_term(&[0], &[3, 1], &[], w1);
    pr.cmi_term(&[0], &[3, 2], &[], w2);
    pr.cmi_term(&[1], &[2], &[0, 3], w1.min(w2));
    let starts: Vec<Tables> = [
        deterministic_start(&pr, k, &d, |_| 0),
        deterministic_start(&pr, k, &d, |c| c[0]),
        deterministic_start(&pr, k, &d, |c| c[1]),
        deterministic_start(&pr, k, &d, |c| c[2]),
        deterministic_start(&pr, k, &d, |c| c[1] * d[2] + c[2]),
    ]
    .into_iter()
    .flatten()
    .collect();
    let cands = run_search(&pr, &starts, cfg, &[3], Polish::Snap);
    let best = pick(&cands, 0.0)?;
    let u = compress_channel(joint.axes().to_vec(), &best.tables[1], k, joint.mass())?;
    let inner = regions::broadcast_inner_rates(p0, target, &u)?;
    let (a, b, s) = (inner.values()[0], inner.values()[1], inner.values()[2]);
    let (r1, r2) = if w1 <= w2 { (s - b, b) } else { (a, s - a) };
    let rates = RateVector::new(&[("R1", r1), ("R2", r2)], LogBase::Bits);
    let witness = AuxWitness {
        channels: vec![WitnessChannel {
            role: String::from("p(u|x,y,z)"),
            channel: u,
        }],
        objective: w1 * r1 + w2 * r2,
        feasibility_gap: 0.0,
    };
    Ok((rates, witness))
}

fn cascade_mt(
    p0_xy: &Pmf,
    target: &Channel,
    weights: &[f64],
    cfg: &AuxSearchConfig,
) -> Result<(RateVector, AuxWitness)> {
    let [w1, w2] = weights_of::<2>(weights)?;
    let joint = compose_channel(p0_xy, target)?;
    if joint.ndim() != 3 {
        return Err(Error::AxisMismatch(
            "cascade-multiterminal needs single-axis X, Y and Z".into(),
        ));
    }
    let d = joint.dims();
    let (nx, ny, nz) = (d[0], d[1], d[2]);
    let k = cfg.cardinality_cap.unwrap_or(nx.max(nz) + 1);
    // Axes: X, Y, U, V, Z.
    let mut pr = Problem::new(vec![nx, ny, k, k, nz]);
    pr.factor(&[], &[0, 1], Some(p0_xy.mass().to_vec()));
    pr.factor(&[0], &[2, 3], None);
    pr.factor(&[1, 2, 3], &[4], None);
    pr.cmi_term(&[0], &[2, 3], &[1], w1);
    pr.cmi_term(&[0], &[2], &[], w2);
    pr.cmi_term(&[1, 3], &[4], &[2], w2);
    pr.constrain(&[0, 1, 4], joint.mass().to_vec());

    let z_given_xy = target;
    let z_given_y = joint.condition(&[1])?.clone();
    let z_given_x = joint.marginalize(&[0, 2])?.condition(&[0])?;
    let uv = |f: &dyn Fn(usize, usize, usize) -> f64| -> Vec<f64> {
        let mut t = Vec::with_capacity(nx * k * k);
        for x in 0..nx {
            for u in 0..k {
                for v in 0..k {
                    t.push(f(x, u, v));
                }
            }
        }
        t
    };
    let zc = |f: &dyn Fn(usize, usize, usize, usize) -> f64| -> Vec<f64> {
        let mut t = Vec::with_capacity(ny * k * k * nz);
        for y in 0..ny {
            for u in 0..k {
                for v in 0..k {
                    for z in 0..nz {
                        t.push(f(y, u, v, z));
                    }
                }
            }
        }
        t
    };
    let uniform_z = 1.0 / nz as f64;
    let mut starts = Vec::new();
    if k >= nx {
        // U empty, V = X, Z drawn from the target given (V, Y).
        starts.push(pr.assemble(&[
            uv(&|x, u, v| if u == 0 && v == x { 1.0 } else { 0.0 }),
            zc(&|y, _u, v, z| {
                if v < nx {
                    z_given_xy.row(v * ny + y)[z]
                } else {
                    uniform_z
                }
            }),
        ]));
    }
    // U and V empty, Z drawn from p(z|y).
    starts.push(pr.assemble(&[
        uv(&|_x, u, v| if u == 0 && v == 0 { 1.0 } else { 0.0 }),
        zc(&|y, _u, _v, z| z_given_y.row(y)[z]),
    ]));
    if k >= nz {
        // U carries Z drawn from p(z|x), V empty, Z = U.
        starts.push(pr.assemble(&[
            uv(&|x, u, v| {
                if v == 0 && u < nz {
                    z_given_x.row(x)[u]
                } else {
                    0.0
                }
            }),
            zc(&|_y, u, _v, z| {
                if u < nz {
                    if z == u {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    uniform_z
                }
            }),
        ]));
    }
    let cands = run_search(&pr, &starts, cfg, &[2, 3], Polish::Snap);
    let best = pick(&cands, OPTIMIZER_TV_TOLERANCE)?;
    let ka = Alphabet::range(k);
    let uv_ch = Channel::new(
        vec![p0_xy.axes()[0].clone()],
        vec![ka.clone(), ka.clone()],
        best.tables[1].clone(),
    )?;
    let z_ch = Channel::new(
        vec![p0_xy.axes()[1].clone(), ka.clone(), ka],
        target.output_axes().to_vec(),
        best.tables[2].clone(),
    )?;
    let rates = regions::cascade_mt_inner_rates(p0_xy, &uv_ch, &z_ch, target)?;
    let objective = w1 * rates.values()[0] + w2 * rates.values()[1];
    let j = regions::cascade_mt_joint(p0_xy, &uv_ch, &z_ch)?;
    let gap = crate::prob::total_variation(&j.marginalize(&[0, 1, 4])?, &joint)?;
    Ok((
        rates,
        AuxWitness {
            channels: vec![
                WitnessChannel {
                    role: String::from("p(u,v|x)"),
                    channel: uv_ch,
                },
                WitnessChannel {
                    role: String::from("p(z|y,u,v)"),
                    channel: z_ch,
                },
            ],
            objective,
            feasibility_gap: gap,
        },
    ))
}

fn degraded(
    p0: &Pmf,
    f0: &[usize],
    target: &Channel,
    weights: &[f64],
    cfg: &AuxSearchConfig,
) -> Result<(RateVector, AuxWitness)> {
    let [w1, w2, w3] = weights_of::<3>(weights)?;
    let cap = regions::degraded_source_cap(p0, target);
    let k = cfg.cardinality_cap.unwrap_or(cap);
    if k > cap {
        return Err(Error::CardinalityExceeded { found: k, cap });
    }
    let trivial = Channel::constant(
        {
            let mut a = p0.axes().to_vec();
            a.extend(target.input_axes()[1..].iter().cloned());
            a.extend(target.output_axes().iter().cloned());
            a
        },
        &Pmf::point(vec![Alphabet::range(1)], &[0])?,
    );
    let joint =
        regions::degraded_source_joint(p0, f0, target, &trivial)?.marginalize(&[0, 1, 2])?;
    let d = joint.dims();
    let mut pr = Problem::new(vec![d[0], d[1], d[2], k]);
    pr.factor(&[], &[0, 1, 2], Some(joint.mass().to_vec()));
    pr.factor(&[0, 1, 2], &[3], None);
    pr.cmi_term(&[0], &[3], &[1], w1);
    pr.cmi_term(&[0], &[2], &[3], w2);
    pr.cmi_term(&[0], &[3], &[], w3);
    let starts: Vec<Tables> = [
        deterministic_start(&pr, k, &d, |_| 0),
        deterministic_start(&pr, k, &d, |c| c[0]),
        deterministic_start(&pr, k, &d, |c| c[2]),
        deterministic_start(&pr, k, &d, |c| c[0] * d[2] + c[2]),
    ]
    .into_iter()
    .flatten()
    .collect();
    let cands = run_search(&pr, &starts, cfg, &[3], Polish::Snap);
    let best = pick(&cands, 0.0)?;
    let u = compress_channel(joint.axes().to_vec(), &best.tables[1], k, joint.mass())?;
    let rates = regions::degraded_source_rates(p0, f0, target, &u)?;
    let v = rates.values();
    Ok((
        rates.clone(),
        AuxWitness {
            objective: w1 * v[0] + w2 * v[1] + w3 * v[2],
            channels: vec![WitnessChannel {
                role: String::from("p(u|x,y,z)"),
                channel: u,
            }],
            feasibility_gap: 0.0,
        },
    ))
}
