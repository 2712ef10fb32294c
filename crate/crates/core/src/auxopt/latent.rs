// Latent-class problems: X1, …, Xm conditionally independent given U, so the
// model p(u)·Π p(x_j|u) is Markov by construction and only the marginal
// constraint needs a penalty (followed by EM).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::engine::{Problem, Tables};
use super::{
    least_infeasible, run_search, select, AuxSearchConfig, AuxWitness, Candidate, Polish,
    WitnessChannel, TIE, WITNESS_TOLERANCE,
};
use crate::prob::{
    compose_channel, conditional_entropy, info_tv, mutual_information, total_variation, Alphabet,
    Channel, LogBase, Pmf,
};
use crate::{Error, Result};

const ROLES: [&str; 3] = ["p(x|u)", "p(y|u)", "p(z|u)"];

struct Latent<'a> {
    p: &'a Pmf,
    k: usize,
    m: usize,
}

impl<'a> Latent<'a> {
    fn new(p: &'a Pmf, cap: Option<usize>, default_cap: usize) -> Result<Self> {
        if p.ndim() < 2 || p.ndim() > 3 {
            return Err(Error::AxisMismatch(format!(
                "expected a joint over 2 or 3 axes, found {}",
                p.ndim()
            )));
        }
        Ok(Self {
            p,
            k: cap.unwrap_or(default_cap),
            m: p.ndim(),
        })
    }

    fn obs(&self) -> Vec<usize> {
        (1..=self.m).collect()
    }

    /// Model over (U, X1..Xm) with objective `Σ coeff · I(group; U)`.
    fn problem(&self, groups: &[(&[usize], f64)]) -> Problem {
        let mut dims = vec![self.k];
        dims.extend(self.p.dims());
        let mut pr = Problem::new(dims);
        pr.factor(&[], &[0], None);
        for j in 1..=self.m {
            pr.factor(&[0], &[j], None);
        }
        for (g, c) in groups {
            pr.cmi_term(g, &[0], &[], *c);
        }
        pr.constrain(&self.obs(), self.p.mass().to_vec());
        pr
    }

    /// Latent tables of the joint P(x)·1(u = g(x)); `None` if g leaves 0..k.
    fn assignment(&self, g: impl Fn(&[usize]) -> usize) -> Option<Tables> {
        let dims = self.p.dims();
        let mut w = vec![0.0; self.k];
        let mut a: Vec<Vec<f64>> = dims.iter().map(|&d| vec![0.0; self.k * d]).collect();
        for (i, &p) in self.p.mass().iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let x = self.p.unravel(i);
            let u = g(&x);
            if u >= self.k {
                return None;
            }
            w[u] += p;
            for (j, &xj) in x.iter().enumerate() {
                a[j][u * dims[j] + xj] += p;
            }
        }
        for (j, &d) in dims.iter().enumerate() {
            for u in 0..self.k {
                let row = &mut a[j][u * d..(u + 1) * d];
                if w[u] > 0.0 {
                    row.iter_mut().for_each(|v| *v /= w[u]);
                } else {
                    row.fill(1.0 / d as f64);
                }
            }
        }
        let mut t = vec![w];
        t.extend(a);
        Some(t)
    }

    /// U constant, U = each single coordinate, U = the support cell.
    fn standard_starts(&self) -> Vec<Tables> {
        let mut starts = Vec::new();
        starts.extend(self.assignment(|_| 0));
        for j in 0..self.m {
            starts.extend(self.assignment(move |x| x[j]));
        }
        let support: Vec<usize> = (0..self.p.len())
            .filter(|&i| self.p.mass()[i] > 0.0)
            .collect();
        let dims = self.p.dims();
        starts.extend(self.assignment(|x| {
            let flat = x.iter().zip(&dims).fold(0, |acc, (&v, &d)| acc * d + v);
            support.binary_search(&flat).expect("support cell")
        }));
        starts
    }

    fn witness(&self, c: &Candidate) -> Result<AuxWitness> {
        let t = &c.tables;
        let used: Vec<usize> = (0..self.k).filter(|&u| t[0][u] > 0.0).collect();
        let ua = Alphabet::range(used.len());
        let mut channels = vec![WitnessChannel {
            role: String::from("p(u)"),
            channel: Channel::new(
                vec![],
                vec![ua.clone()],
                used.iter().map(|&u| t[0][u]).collect(),
            )?,
        }];
        for j in 0..self.m {
            let d = self.p.axes()[j].len();
            let table: Vec<f64> = used
                .iter()
                .flat_map(|&u| t[j + 1][u * d..(u + 1) * d].iter().copied())
                .collect();
            channels.push(WitnessChannel {
                role: String::from(ROLES[j]),
                channel: Channel::new(vec![ua.clone()], vec![self.p.axes()[j].clone()], table)?,
            });
        }
        let mut w = AuxWitness {
            channels,
            objective: 0.0,
            feasibility_gap: 0.0,
        };
        let j = latent_joint(&w)?;
        w.feasibility_gap = total_variation(&j.marginalize(&self.obs())?, self.p)?;
        Ok(w)
    }
}

/// Joint (U, X1, …, Xm) of a latent-class witness.
pub(crate) fn latent_joint(w: &AuxWitness) -> Result<Pmf> {
    let pu = w
        .channel("p(u)")
        .ok_or_else(|| Error::InvalidArgument("witness lacks p(u)".into()))?
        .row_pmf(0);
    let mut j = pu;
    for role in ROLES {
        if let Some(ch) = w.channel(role) {
            j = j.extend(ch, &[0])?;
        }
    }
    Ok(j)
}

fn best_witness(l: &Latent, cands: &[Candidate]) -> Result<AuxWitness> {
    let c = select(cands, WITNESS_TOLERANCE)
        .or_else(|| least_infeasible(cands))
        .ok_or(Error::InfeasibleTarget { gap: 1.0 })?;
    l.witness(c)
}

fn mi_with_u(j: &Pmf, m: usize) -> Result<f64> {
    let obs: Vec<usize> = (1..=m).collect();
    mutual_information(j, &obs, &[0], LogBase::Bits)
}

/// Wyner's common information C(X;Y) = min I(X,Y;U) over X − U − Y.
/// Returns the best value found (an upper bound) and its witness.
pub fn wyner_common_information(p_xy: &Pmf, cfg: &AuxSearchConfig) -> Result<(f64, AuxWitness)> {
    cfg.validate()?;
    if p_xy.ndim() != 2 {
        return Err(Error::AxisMismatch(format!(
            "expected a joint over (X, Y), found {} axes",
            p_xy.ndim()
        )));
    }
    let l = Latent::new(p_xy, cfg.cardinality_cap, p_xy.len() + 1)?;
    let pr = l.problem(&[(&[1, 2], 1.0)]);
    let cands = run_search(&pr, &l.standard_starts(), cfg, &[0], Polish::Em);
    let mut w = best_witness(&l, &cands)?;
    w.objective = mi_with_u(&latent_joint(&w)?, 2)?;
    Ok((w.objective, w))
}

/// Clump map for H(Y†X): `Some(c)` gives the clump of each y with positive
/// mass, where y values share a clump iff their rows p(x|y) agree (TV ≤ 1e-9).
pub fn clumping(p_xy: &Pmf) -> Result<Vec<Option<usize>>> {
    if p_xy.ndim() != 2 {
        return Err(Error::AxisMismatch(format!(
            "expected a joint over (X, Y), found {} axes",
            p_xy.ndim()
        )));
    }
    let x_given_y = p_xy.condition(&[1])?;
    let py = p_xy.marginalize(&[1])?;
    let mut reps: Vec<usize> = Vec::new();
    Ok((0..py.len())
        .map(|y| {
            if py.mass()[y] <= 0.0 {
                return None;
            }
            let row = x_given_y.row(y);
            Some(
                match reps
                    .iter()
                    .position(|&r| info_tv(x_given_y.row(r), row) <= 1e-9)
                {
                    Some(c) => c,
                    None => {
                        reps.push(y);
                        reps.len() - 1
                    }
                },
            )
        })
        .collect())
}

/// Necessary conditional entropy H(Y†X) = H(f(Y)|X) with f the clumping of
/// y values whose conditional rows p(x|y) coincide.
pub fn necessary_conditional_entropy(p_xy: &Pmf) -> Result<f64> {
    let f = clumping(p_xy)?;
    let clumps = f.iter().flatten().max().map_or(1, |m| m + 1);
    let ch = Channel::from_fn(
        vec![p_xy.axes()[1].clone()],
        vec![Alphabet::range(clumps)],
        |y, u| {
            if f[y[0]].unwrap_or(0) == u[0] {
                1.0
            } else {
                0.0
            }
        },
    )?;
    let j = p_xy.extend(&ch, &[1])?;
    conditional_entropy(&j, &[2], &[0], LogBase::Bits)
}

/// One candidate for the two-node strong-coordination region:
/// the pair (I(X;U), I(X,Y;U)) and its witness.
#[derive(Clone, Debug, PartialEq)]
pub struct StrongTwoNodePoint {
    pub i_xu: f64,
    pub i_xyu: f64,
    pub witness: AuxWitness,
}

impl StrongTwoNodePoint {
    /// Smallest R this witness supports at common-randomness rate `r0`.
    pub fn rate_at(&self, r0: f64) -> f64 {
        self.i_xu.max(self.i_xyu - r0).max(0.0)
    }
}

/// Candidate witnesses tracing the lower-left frontier of
/// (I(X;U), I(X,Y;U)). The set does not depend on R0, so the derived rate is
/// non-increasing in R0.
pub fn strong_two_node_frontier(
    p0: &Pmf,
    target: &Channel,
    cfg: &AuxSearchConfig,
) -> Result<Vec<StrongTwoNodePoint>> {
    cfg.validate()?;
    let p_xy = compose_channel(p0, target)?;
    if p_xy.ndim() != 2 {
        return Err(Error::AxisMismatch("expected single-axis X and Y".into()));
    }
    let l = Latent::new(&p_xy, cfg.cardinality_cap, p_xy.len() + 1)?;
    let mut starts = l.standard_starts();
    let f = clumping(&p_xy)?;
    starts.extend(l.assignment(|x| f[x[1]].unwrap_or(0)));
    let mut points: Vec<StrongTwoNodePoint> = Vec::new();
    for &w in &[0.0, 0.25, 0.5, 0.75, 1.0] {
        let pr = l.problem(&[(&[1, 2], 1.0 - w), (&[1], w)]);
        let mut cands = run_search(&pr, &starts, cfg, &[0], Polish::Em);
        cands.retain(|c| c.gap <= WITNESS_TOLERANCE);
        for c in &cands {
            let witness = l.witness(c)?;
            if witness.feasibility_gap > WITNESS_TOLERANCE {
                continue;
            }
            let j = latent_joint(&witness)?;
            let i_xu = mutual_information(&j, &[1], &[0], LogBase::Bits)?;
            let i_xyu = mi_with_u(&j, 2)?;
            let dominated = points
                .iter()
                .any(|p| p.i_xu <= i_xu + TIE && p.i_xyu <= i_xyu + TIE);
            if !dominated {
                points.retain(|p| !(i_xu <= p.i_xu + TIE && i_xyu <= p.i_xyu + TIE));
                points.push(StrongTwoNodePoint {
                    i_xu,
                    i_xyu,
                    witness: AuxWitness {
                        objective: i_xyu,
                        ..witness
                    },
                });
            }
        }
    }
    points.sort_by(|a, b| a.i_xu.total_cmp(&b.i_xu).then(a.i_xyu.total_cmp(&b.i_xyu)));
    Ok(points)
}

/// Best frontier point at common-randomness rate `r0`, with the rate it supports.
pub fn strong_two_node_search(
    p0: &Pmf,
    target: &Channel,
    r0: f64,
    cfg: &AuxSearchConfig,
) -> Result<(f64, StrongTwoNodePoint)> {
    if !(r0 >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "R0 must be nonnegative, got {r0}"
        )));
    }
    let points = strong_two_node_frontier(p0, target, cfg)?;
    let mut best: Option<(f64, StrongTwoNodePoint)> = None;
    for p in points {
        let r = p.rate_at(r0);
        if best.as_ref().map_or(true, |(b, _)| r < b - TIE) {
            best = Some((r, p));
        }
    }
    let (r, mut p) = best.ok_or(Error::InfeasibleTarget { gap: 1.0 })?;
    p.witness.objective = r;
    Ok((r, p))
}

/// Smallest R with (R0, R) in the two-node strong-coordination region, as found
/// by [`strong_two_node_frontier`] (an upper bound).
pub fn strong_two_node_min_rate(
    p0: &Pmf,
    target: &Channel,
    r0: f64,
    cfg: &AuxSearchConfig,
) -> Result<f64> {
    Ok(strong_two_node_search(p0, target, r0, cfg)?.0)
}

/// Common-randomness rate for strong coordination without communication:
/// min I(X,Y,Z;U) over X, Y, Z conditionally independent given U.
pub fn no_comm_common_randomness_rate(
    p_xyz: &Pmf,
    cfg: &AuxSearchConfig,
) -> Result<(f64, AuxWitness)> {
    cfg.validate()?;
    if p_xyz.ndim() != 3 {
        return Err(Error::AxisMismatch(format!(
            "expected a joint over (X, Y, Z), found {} axes",
            p_xyz.ndim()
        )));
    }
    let l = Latent::new(p_xyz, cfg.cardinality_cap, p_xyz.len())?;
    let pr = l.problem(&[(&[1, 2, 3], 1.0)]);
    let cands = run_search(&pr, &l.standard_starts(), cfg, &[0], Polish::Em);
    let mut w = best_witness(&l, &cands)?;
    w.objective = mi_with_u(&latent_joint(&w)?, 3)?;
    Ok((w.objective, w))
}

/// Re-evaluates I(X1..Xm;U) and the feasibility gap of a latent witness
/// against `p`.
pub fn latent_witness_value(w: &AuxWitness, p: &Pmf) -> Result<(f64, f64)> {
    let j = latent_joint(w)?;
    let obs: Vec<usize> = (1..j.ndim()).collect();
    Ok((
        mi_with_u(&j, obs.len())?,
        total_variation(&j.marginalize(&obs)?, p)?,
    ))
}
