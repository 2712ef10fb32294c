//! Closed-form rate regions, membership tests and bound evaluators for the
//! two- and three-node networks, plus the large-network scaling sums.
//!
//! Every rate is in bits unless a [`RateVector`] says otherwise. Inputs follow
//! one convention: the source pmf has the nature-given axes (X, or (X, Y) for
//! the cascade-multiterminal network) and the target channel reads exactly
//! those axes.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::math::ln;
use crate::prob::{
    compose_channel, conditional_mutual_information as cmi, mutual_information as mi,
    total_variation, Channel, LogBase, Pmf,
};
use crate::{Error, Result};

const BITS: LogBase = LogBase::Bits;
/// Slack below which a rate still counts as meeting its bound.
const BOUNDARY_TOLERANCE: f64 = 1e-12;
/// TV tolerance for independence tests on exact inputs.
pub const EXACT_TV_TOLERANCE: f64 = 1e-9;
/// TV tolerance for target consistency of optimizer-produced channels.
pub const OPTIMIZER_TV_TOLERANCE: f64 = 1e-6;

/// Named nonnegative rates.
#[derive(Clone, Debug, PartialEq)]
pub struct RateVector {
    names: Vec<&'static str>,
    values: Vec<f64>,
    base: LogBase,
}

impl RateVector {
    /// Negative rounding noise is clamped to zero.
    pub fn new(pairs: &[(&'static str, f64)], base: LogBase) -> Self {
        Self {
            names: pairs.iter().map(|p| p.0).collect(),
            values: pairs.iter().map(|p| p.1.max(0.0)).collect(),
            base,
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| *n == name)
            .map(|i| self.values[i])
    }

    pub fn names(&self) -> &[&'static str] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn base(&self) -> LogBase {
        self.base
    }

    pub fn to_base(&self, base: LogBase) -> RateVector {
        let f = base.from_nats() / self.base.from_nats();
        RateVector {
            names: self.names.clone(),
            values: self.values.iter().map(|v| v * f).collect(),
            base,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        self.names.iter().copied().zip(self.values.iter().copied())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Member,
    NotMember,
    AchievableCertified,
    Undetermined,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Member => "member",
            Verdict::NotMember => "not-member",
            Verdict::AchievableCertified => "achievable-certified",
            Verdict::Undetermined => "undetermined",
        }
    }
}

/// Verdict, witness channels if any, and the smallest inequality margin.
#[derive(Clone, Debug, PartialEq)]
pub struct MembershipVerdict {
    pub verdict: Verdict,
    pub certificate: Vec<Channel>,
    pub slack: f64,
}

impl MembershipVerdict {
    fn bare(verdict: Verdict, slack: f64) -> Self {
        Self {
            verdict,
            certificate: Vec::new(),
            slack,
        }
    }
}

fn joint(p0: &Pmf, target: &Channel) -> Result<Pmf> {
    compose_channel(p0, target)
}

fn expect_axes(what: &str, found: usize, expected: usize) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(Error::AxisMismatch(format!(
            "{what}: expected {expected} axes, found {found}"
        )))
    }
}

/// Minimum rate for the two-node network: I(X;Y).
pub fn two_node_min_rate(p0: &Pmf, ch: &Channel) -> Result<f64> {
    let j = joint(p0, ch)?;
    let nx = p0.ndim();
    let xs: Vec<usize> = (0..nx).collect();
    let ys: Vec<usize> = (nx..j.ndim()).collect();
    mi(&j, &xs, &ys, BITS)
}

/// Isolated node: member iff X ⊥ Z and R ≥ I(X;Y|Z). Target outputs are (Y, Z).
pub fn isolated_node_membership(p0: &Pmf, target: &Channel, r: f64) -> Result<MembershipVerdict> {
    expect_axes("isolated-node source", p0.ndim(), 1)?;
    expect_axes(
        "isolated-node target outputs",
        target.output_axes().len(),
        2,
    )?;
    let j = joint(p0, target)?;
    let xz = j.marginalize(&[0, 2])?;
    let indep = xz.product_of_marginals(&[0], &[1])?;
    let tv = total_variation(&xz, &indep)?;
    if tv > EXACT_TV_TOLERANCE {
        return Ok(MembershipVerdict::bare(Verdict::NotMember, -tv));
    }
    let slack = r - cmi(&j, &[0], &[1], &[2], BITS)?;
    let verdict = if slack >= -BOUNDARY_TOLERANCE {
        Verdict::Member
    } else {
        Verdict::NotMember
    };
    Ok(MembershipVerdict::bare(verdict, slack))
}

/// Jointly Gaussian isolated-node tradeoff:
/// ρ²_xy / (1 − 2^{−2R}) + ρ²_yz ≤ 1, with R in bits (`f64::INFINITY` allowed).
pub fn gaussian_isolated_tradeoff(r: f64, rho_xy: f64, rho_yz: f64) -> Result<bool> {
    if !(rho_xy.abs() <= 1.0 && rho_yz.abs() <= 1.0) || !(r >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need |rho| <= 1 and R >= 0, got R={r}, rho_xy={rho_xy}, rho_yz={rho_yz}"
        )));
    }
    let a = rho_xy * rho_xy;
    let b = rho_yz * rho_yz;
    if r == 0.0 {
        return Ok(a <= BOUNDARY_TOLERANCE && b <= 1.0 + BOUNDARY_TOLERANCE);
    }
    let gain = if r.is_infinite() {
        1.0
    } else {
        1.0 - crate::math::pow(2.0, -2.0 * r)
    };
    Ok(a / gain + b <= 1.0 + BOUNDARY_TOLERANCE)
}

/// Cascade X → Y → Z: (R1, R2) ≥ (I(X;Y,Z), I(X;Z)). Target outputs are (Y, Z).
pub fn cascade_min_rates(p0: &Pmf, target: &Channel) -> Result<RateVector> {
    expect_axes("cascade source", p0.ndim(), 1)?;
    expect_axes("cascade target outputs", target.output_axes().len(), 2)?;
    let j = joint(p0, target)?;
    Ok(RateVector::new(
        &[
            ("R1", mi(&j, &[0], &[1, 2], BITS)?),
            ("R2", mi(&j, &[0], &[2], BITS)?),
        ],
        BITS,
    ))
}

/// Exact cascade membership.
pub fn cascade_membership(
    p0: &Pmf,
    target: &Channel,
    r1: f64,
    r2: f64,
) -> Result<MembershipVerdict> {
    let m = cascade_min_rates(p0, target)?;
    let slack = (r1 - m.values[0]).min(r2 - m.values[1]);
    let verdict = if slack >= -BOUNDARY_TOLERANCE {
        Verdict::Member
    } else {
        Verdict::NotMember
    };
    Ok(MembershipVerdict::bare(verdict, slack))
}

/// Cardinality cap on U for the degraded-source network: |X||Z| + 2.
pub fn degraded_source_cap(p0: &Pmf, target: &Channel) -> usize {
    p0.len() * target.output_len() + 2
}

/// Joint (X, Y, Z, U) of the degraded-source network with Y = f0(X).
pub fn degraded_source_joint(
    p0: &Pmf,
    f0: &[usize],
    target: &Channel,
    u_ch: &Channel,
) -> Result<Pmf> {
    expect_axes("degraded-source source", p0.ndim(), 1)?;
    expect_axes(
        "degraded-source target inputs",
        target.input_axes().len(),
        2,
    )?;
    if f0.len() != p0.len() {
        return Err(Error::AxisMismatch(format!(
            "f0 has {} entries for an alphabet of {}",
            f0.len(),
            p0.len()
        )));
    }
    let ya = target.input_axes()[1].clone();
    for &y in f0 {
        ya.check_index(y)?;
    }
    let cap = degraded_source_cap(p0, target);
    if u_ch.output_len() > cap {
        return Err(Error::CardinalityExceeded {
            found: u_ch.output_len(),
            cap,
        });
    }
    let f = Channel::deterministic(p0.axes().to_vec(), vec![ya], |x| vec![f0[x[0]]])?;
    p0.extend(&f, &[0])?
        .extend(target, &[0, 1])?
        .extend(u_ch, &[0, 1, 2])
}

/// Degraded source: (R1, R2, R3) = (I(X;U|Y), I(X;Z|U), I(X;U)).
pub fn degraded_source_rates(
    p0: &Pmf,
    f0: &[usize],
    target: &Channel,
    u_ch: &Channel,
) -> Result<RateVector> {
    let j = degraded_source_joint(p0, f0, target, u_ch)?;
    Ok(RateVector::new(
        &[
            ("R1", cmi(&j, &[0], &[3], &[1], BITS)?),
            ("R2", cmi(&j, &[0], &[2], &[3], BITS)?),
            ("R3", mi(&j, &[0], &[3], BITS)?),
        ],
        BITS,
    ))
}

/// Outer-bound rates (I(X;Y), I(X;Z), I(X;Y,Z)) of the broadcast network.
pub fn broadcast_outer_rates(p0: &Pmf, target: &Channel) -> Result<RateVector> {
    expect_axes("broadcast source", p0.ndim(), 1)?;
    expect_axes("broadcast target outputs", target.output_axes().len(), 2)?;
    let j = joint(p0, target)?;
    Ok(RateVector::new(
        &[
            ("R1", mi(&j, &[0], &[1], BITS)?),
            ("R2", mi(&j, &[0], &[2], BITS)?),
            ("sum", mi(&j, &[0], &[1, 2], BITS)?),
        ],
        BITS,
    ))
}

/// Necessary conditions of the broadcast outer bound. Never returns `Member`.
pub fn broadcast_outer_check(
    p0: &Pmf,
    target: &Channel,
    r1: f64,
    r2: f64,
) -> Result<MembershipVerdict> {
    let o = broadcast_outer_rates(p0, target)?;
    let slack = region_slack(&o, r1, r2);
    let verdict = if slack >= -BOUNDARY_TOLERANCE {
        Verdict::Undetermined
    } else {
        Verdict::NotMember
    };
    Ok(MembershipVerdict::bare(verdict, slack))
}

fn region_slack(rates: &RateVector, r1: f64, r2: f64) -> f64 {
    let v = &rates.values;
    (r1 - v[0]).min(r2 - v[1]).min(r1 + r2 - v[2])
}

/// Joint (X, Y, Z, U) for a broadcast auxiliary p(u|x,y,z).
pub fn broadcast_joint(p0: &Pmf, target: &Channel, u_ch: &Channel) -> Result<Pmf> {
    expect_axes("broadcast source", p0.ndim(), 1)?;
    expect_axes("broadcast target outputs", target.output_axes().len(), 2)?;
    joint(p0, target)?.extend(u_ch, &[0, 1, 2])
}

/// Inner-bound rates for a given U: (I(X;U,Y), I(X;U,Z), I(X;U,Y)+I(X;U,Z)+I(Y;Z|X,U)).
pub fn broadcast_inner_rates(p0: &Pmf, target: &Channel, u_ch: &Channel) -> Result<RateVector> {
    let j = broadcast_joint(p0, target, u_ch)?;
    broadcast_inner_from_joint(&j)
}

pub(crate) fn broadcast_inner_from_joint(j: &Pmf) -> Result<RateVector> {
    let a = mi(j, &[0], &[3, 1], BITS)?;
    let b = mi(j, &[0], &[3, 2], BITS)?;
    let c = cmi(j, &[1], &[2], &[0, 3], BITS)?;
    Ok(RateVector::new(
        &[("R1", a), ("R2", b), ("sum", a + b + c)],
        BITS,
    ))
}

/// Combined broadcast test: outer bound first, then the witness (if any)
/// against the inner bound.
pub fn broadcast_membership(
    p0: &Pmf,
    target: &Channel,
    r1: f64,
    r2: f64,
    witness: Option<&Channel>,
) -> Result<MembershipVerdict> {
    let outer = broadcast_outer_check(p0, target, r1, r2)?;
    if outer.verdict == Verdict::NotMember {
        return Ok(outer);
    }
    if let Some(u) = witness {
        let inner = broadcast_inner_rates(p0, target, u)?;
        let slack = region_slack(&inner, r1, r2);
        if slack >= -BOUNDARY_TOLERANCE {
            return Ok(MembershipVerdict {
                verdict: Verdict::AchievableCertified,
                certificate: vec![u.clone()],
                slack,
            });
        }
    }
    Ok(outer)
}

/// Joint (X, Y, U, V, Z) of the cascade-multiterminal inner bound.
pub fn cascade_mt_joint(p0_xy: &Pmf, uv_ch: &Channel, z_ch: &Channel) -> Result<Pmf> {
    expect_axes("cascade-multiterminal source", p0_xy.ndim(), 2)?;
    expect_axes("p(u,v|x) inputs", uv_ch.input_axes().len(), 1)?;
    expect_axes("p(u,v|x) outputs", uv_ch.output_axes().len(), 2)?;
    expect_axes("p(z|y,u,v) inputs", z_ch.input_axes().len(), 3)?;
    p0_xy.extend(uv_ch, &[0])?.extend(z_ch, &[1, 2, 3])
}

/// Inner-bound rates (I(X;U,V|Y), I(X;U) + I(Y,V;Z|U)) after checking that the
/// synthesized Z reproduces the target.
pub fn cascade_mt_inner_rates(
    p0_xy: &Pmf,
    uv_ch: &Channel,
    z_ch: &Channel,
    target: &Channel,
) -> Result<RateVector> {
    let j = cascade_mt_joint(p0_xy, uv_ch, z_ch)?;
    let tv = total_variation(&j.marginalize(&[0, 1, 4])?, &joint(p0_xy, target)?)?;
    if tv > OPTIMIZER_TV_TOLERANCE {
        return Err(Error::TargetMismatch { tv });
    }
    cascade_mt_inner_from_joint(&j)
}

pub(crate) fn cascade_mt_inner_from_joint(j: &Pmf) -> Result<RateVector> {
    let r1 = cmi(j, &[0], &[2, 3], &[1], BITS)?;
    let r2 = mi(j, &[0], &[2], BITS)? + cmi(j, &[1, 3], &[4], &[2], BITS)?;
    Ok(RateVector::new(&[("R1", r1), ("R2", r2)], BITS))
}

/// Necessary conditions of the cascade-multiterminal outer bound:
/// R2 ≥ I(X,Y;Z) and R1 ≥ I(X;Z|Y). The second holds for every outer-bound U
/// because X − (Y,U) − Z is built into its factorization.
pub fn cascade_mt_outer_check(
    p0_xy: &Pmf,
    target: &Channel,
    r1: f64,
    r2: f64,
    u_cardinality_cap: usize,
) -> Result<MembershipVerdict> {
    expect_axes("cascade-multiterminal source", p0_xy.ndim(), 2)?;
    let full = p0_xy.len() * target.output_len();
    if u_cardinality_cap == 0 || u_cardinality_cap > full {
        return Err(Error::InvalidArgument(format!(
            "cardinality cap {u_cardinality_cap} outside 1..={full}"
        )));
    }
    let j = joint(p0_xy, target)?;
    let slack = (r2 - mi(&j, &[0, 1], &[2], BITS)?).min(r1 - cmi(&j, &[0], &[2], &[1], BITS)?);
    let verdict = if slack >= -BOUNDARY_TOLERANCE {
        Verdict::Undetermined
    } else {
        Verdict::NotMember
    };
    Ok(MembershipVerdict::bare(verdict, slack))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Topology {
    ExtendedCascade,
    ExtendedBroadcast,
}

/// Sum rate of the k-node task-assignment schemes, in nats.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingReport {
    pub k: usize,
    pub sum_nats: f64,
    /// Large-k approximation: k for the cascade, ln k + 1 for the broadcast.
    pub reference_nats: f64,
    /// Cut-set lower bound on the broadcast sum rate, ln k.
    pub cut_set_nats: Option<f64>,
}

pub fn scaling_sum_rates(k: usize, topology: Topology) -> Result<ScalingReport> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "k must be at least 2, got {k}"
        )));
    }
    let kf = k as f64;
    Ok(match topology {
        Topology::ExtendedCascade => ScalingReport {
            k,
            sum_nats: (1..k).map(|i| ln(kf / i as f64)).sum(),
            reference_nats: kf,
            cut_set_nats: None,
        },
        Topology::ExtendedBroadcast => {
            let p = 1.0 / kf;
            let h = -p * ln(p) - (1.0 - p) * ln(1.0 - p);
            ScalingReport {
                k,
                sum_nats: (kf - 1.0) * h,
                reference_nats: ln(kf) + 1.0,
                cut_set_nats: Some(ln(kf)),
            }
        }
    })
}
