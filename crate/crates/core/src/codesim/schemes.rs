// Two-node, cascade and side-information coding schemes.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::code::{cells, CondTable, Generators};
use super::ensemble::{ln_add, ln_none, select, CellSpec, Selector};
use super::{trial_seed, SimConfig, TrialOutcome, TrialReport};
use crate::math::{ceil, exp, LN_2};
use crate::prob::types::count_cells;
use crate::prob::{
    compose_channel, conditional_mutual_information as cmi, mutual_information as mi, tv_of_counts,
    Channel, LogBase, Pmf,
};
use crate::seed;
use crate::{Error, Result};

const TAG_SOURCE: u64 = 1;
const TAG_CODE: u64 = 2;
const TAG_LAYER2: u64 = 4;

/// One trial with its action sequences, in the target joint's axis order.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialDetail {
    pub outcome: TrialOutcome,
    pub sequences: Vec<Vec<usize>>,
}

fn sample_iid(p: &Pmf, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let g = Generators::single(p.mass());
    let dims = p.dims();
    let mut cols = vec![Vec::with_capacity(n); dims.len()];
    for _ in 0..n {
        let mut c = g.sample(0, rng);
        for k in (0..dims.len()).rev() {
            cols[k].push(c % dims[k]);
            c /= dims[k];
        }
    }
    cols
}

fn joint_tv(seqs: &[&[usize]], p: &Pmf) -> f64 {
    let counts = count_cells(seqs, &p.dims());
    tv_of_counts(&counts, seqs[0].len() as u64, p.mass())
}

fn run<F>(cfg: &SimConfig, threshold: f64, trial: F) -> Result<TrialReport>
where
    F: Fn(usize) -> Result<TrialDetail> + Sync + Send,
{
    cfg.validate()?;
    let outcomes = crate::par::map_range(cfg.trials, |i| trial(i).map(|d| d.outcome));
    Ok(TrialReport {
        threshold,
        outcomes: outcomes.into_iter().collect::<Result<Vec<_>>>()?,
    })
}

/// ⌈n·r⌉ message bits.
fn message_bits(n: usize, r: f64) -> f64 {
    ceil(n as f64 * r - 1e-9).max(0.0)
}

/// Cell specs for positions conditioned on `cols`, against `table`, with
/// generator row `gen_row(cell)`.
fn cell_specs(
    table: &CondTable,
    cell_of: &[usize],
    gen_row: impl Fn(usize) -> Vec<f64>,
) -> Vec<CellSpec> {
    let mut counts = vec![0usize; table.rows.len()];
    for &c in cell_of {
        counts[c] += 1;
    }
    table
        .rows
        .iter()
        .enumerate()
        .map(|(c, r)| CellSpec {
            count: counts[c],
            target: r.clone(),
            gen: gen_row(c),
        })
        .collect()
}

/// Two-node scheme: a codebook of 2^⌈nR⌉ Y sequences drawn from p(y); the
/// encoder takes the first codeword conditionally ε-typical with Xⁿ.
pub fn two_node_trial(
    p0: &Pmf,
    target: &Channel,
    r: f64,
    cfg: &SimConfig,
    index: usize,
) -> Result<TrialDetail> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "rate must be positive, got {r}"
        )));
    }
    let joint = compose_channel(p0, target)?;
    if joint.ndim() != 2 {
        return Err(Error::AxisMismatch(
            "two-node simulation needs single-axis X and Y".into(),
        ));
    }
    let n = cfg.n;
    let ts = trial_seed(cfg.seed, index);
    let x = sample_iid(p0, n, &mut seed::rng(ts, TAG_SOURCE, 0)).remove(0);
    let table = CondTable::from_joint(&joint);
    let p_y = joint.marginal_mass(&[1]);
    let sel = Selector::new(&cell_specs(&table, &x, |_| p_y.clone()), cfg.epsilon)?;
    let gens = Generators::single(&p_y);
    let (y, fail) = select(
        &sel,
        message_bits(n, r),
        &x,
        &gens,
        &vec![0; n],
        &mut seed::rng(ts, TAG_CODE, 0),
    )?;
    let tv = joint_tv(&[&x, &y], &joint);
    Ok(TrialDetail {
        outcome: TrialOutcome {
            index,
            tv,
            encoder_fail: fail,
            decoder_ambiguous: false,
            success: tv < cfg.epsilon,
        },
        sequences: vec![x, y],
    })
}

pub fn two_node_simulate(
    p0: &Pmf,
    target: &Channel,
    r: f64,
    cfg: &SimConfig,
) -> Result<TrialReport> {
    run(cfg, cfg.epsilon, |i| two_node_trial(p0, target, r, cfg, i))
}

/// Rates actually given to the Z layer and the conditional Y layer. The link
/// to Y carries both indices, so only R1 is binding for their sum; the Z
/// layer takes its required rate plus half of the spare rate on that link,
/// capped at R2.
pub(crate) fn cascade_layer_rates(i_xz: f64, i_xyz: f64, r1: f64, r2: f64) -> (f64, f64) {
    let rz = r2.min(i_xz + 0.5 * (r1 - i_xyz)).max(0.0);
    (rz, r1 - rz)
}

/// Cascade scheme: a codebook of Z sequences from p(z) specifies Zⁿ
/// conditionally typical with Xⁿ; for each Z codeword, a conditional
/// codebook from p(y|z) specifies Yⁿ conditionally typical with (Xⁿ, Zⁿ).
/// The target's output axes are (Y, Z).
pub fn cascade_trial(
    p0: &Pmf,
    target: &Channel,
    r1: f64,
    r2: f64,
    cfg: &SimConfig,
    index: usize,
) -> Result<TrialDetail> {
    if r1 < r2 {
        return Err(Error::RateSplitInvalid { r1, r2 });
    }
    let joint = compose_channel(p0, target)?;
    if joint.ndim() != 3 {
        return Err(Error::AxisMismatch(
            "cascade simulation needs single-axis X, Y and Z".into(),
        ));
    }
    let d = joint.dims();
    let (rz, ry) = cascade_layer_rates(
        mi(&joint, &[0], &[2], LogBase::Bits)?,
        mi(&joint, &[0], &[1, 2], LogBase::Bits)?,
        r1,
        r2,
    );
    let n = cfg.n;
    let ts = trial_seed(cfg.seed, index);
    let x = sample_iid(p0, n, &mut seed::rng(ts, TAG_SOURCE, 0)).remove(0);

    let z_table = CondTable::from_joint(&joint.marginalize(&[0, 2])?);
    let p_z = joint.marginal_mass(&[2]);
    let sel = Selector::new(&cell_specs(&z_table, &x, |_| p_z.clone()), cfg.epsilon)?;
    let z_gens = Generators::single(&p_z);
    let (z, fail_z) = select(
        &sel,
        message_bits(n, rz),
        &x,
        &z_gens,
        &vec![0; n],
        &mut seed::rng(ts, TAG_CODE, 0),
    )?;

    let y_table = CondTable::from_joint(&joint.marginalize(&[0, 2, 1])?);
    let y_given_z = CondTable::from_joint(&joint.marginalize(&[2, 1])?);
    let y_gens = y_given_z.generators();
    let xz_cells = cells(&[&x, &z], &[d[0], d[2]], 0, n);
    let uniform = vec![1.0 / d[1] as f64; d[1]];
    let specs = cell_specs(&y_table, &xz_cells, |c| {
        y_given_z.rows[c % d[2]]
            .clone()
            .unwrap_or_else(|| uniform.clone())
    });
    let sel = Selector::new(&specs, cfg.epsilon)?;
    let (y, fail_y) = select(
        &sel,
        message_bits(n, ry),
        &xz_cells,
        &y_gens,
        &z,
        &mut seed::rng(ts, TAG_LAYER2, 0),
    )?;

    let tv = joint_tv(&[&x, &y, &z], &joint);
    Ok(TrialDetail {
        outcome: TrialOutcome {
            index,
            tv,
            encoder_fail: fail_z || fail_y,
            decoder_ambiguous: false,
            success: tv < cfg.epsilon,
        },
        sequences: vec![x, y, z],
    })
}

pub fn cascade_simulate(
    p0: &Pmf,
    target: &Channel,
    r1: f64,
    r2: f64,
    cfg: &SimConfig,
) -> Result<TrialReport> {
    if r1 < r2 {
        return Err(Error::RateSplitInvalid { r1, r2 });
    }
    run(cfg, cfg.epsilon, |i| {
        cascade_trial(p0, target, r1, r2, cfg, i)
    })
}

/// Generic coordination with side information. A codebook of 2^⌈nRc⌉ U
/// sequences from p(u), with Rc = I(X,Y;U) + γ/2 and γ = R − I(X;U|Y,Z), is
/// binned uniformly into 2^⌈nR⌉ bins. The encoder (seeing X, Y) takes the
/// first codeword 2ε-typical under p(u|x,y) and sends its bin; the decoder
/// (seeing Y, Z) takes the first codeword in that bin 8ε-typical under
/// p(u|y,z). A trial succeeds when the decoder recovers the encoder's
/// codeword and the joint type of (X, Y, Z, U) is within 8ε of the target.
///
/// Scanning the codebook in index order, a codeword matters when it passes
/// the encoder test or when it lands in the announced bin and passes the
/// decoder test; decoding is correct exactly when the first such codeword is
/// the encoder's and that codeword also passes the decoder test. Codewords
/// passing both tests are counted on both sides, which can only overstate
/// decoding errors, by a relative amount below P(encoder test)/P(decoder test).
pub fn side_info_trial(
    p_xyz: &Pmf,
    u_ch: &Channel,
    r: f64,
    cfg: &SimConfig,
    index: usize,
) -> Result<TrialDetail> {
    if p_xyz.ndim() != 3 {
        return Err(Error::AxisMismatch(
            "side-information simulation needs a joint over (X, Y, Z)".into(),
        ));
    }
    let q = p_xyz.extend(u_ch, &[0, 1])?;
    let d = q.dims();
    let gamma = r - cmi(&q, &[0], &[3], &[1, 2], LogBase::Bits)?;
    if !(gamma > 0.0) {
        return Err(Error::NonPositiveGamma { gamma });
    }
    let rc = mi(&q, &[0, 1], &[3], LogBase::Bits)? + 0.5 * gamma;
    let n = cfg.n;
    let (code_bits, bin_bits) = (message_bits(n, rc), message_bits(n, r));
    let ts = trial_seed(cfg.seed, index);
    let src = sample_iid(p_xyz, n, &mut seed::rng(ts, TAG_SOURCE, 0));
    let (x, y, z) = (&src[0], &src[1], &src[2]);
    let p_u = q.marginal_mass(&[3]);
    let gens = Generators::single(&p_u);
    let gen_of = vec![0; n];
    let enc_cells = cells(&[x, y], &[d[0], d[1]], 0, n);
    let dec_cells = cells(&[y, z], &[d[1], d[2]], 0, n);
    let enc = Selector::new(
        &cell_specs(
            &CondTable::from_joint(&q.marginalize(&[0, 1, 3])?),
            &enc_cells,
            |_| p_u.clone(),
        ),
        2.0 * cfg.epsilon,
    )?;
    let dec = Selector::new(
        &cell_specs(
            &CondTable::from_joint(&q.marginalize(&[1, 2, 3])?),
            &dec_cells,
            |_| p_u.clone(),
        ),
        8.0 * cfg.epsilon,
    )?;
    let ln_bin = -bin_bits * LN_2;
    let ln_impostor = dec.ln_pass() + ln_bin;
    let ln_first = ln_add(enc.ln_pass(), ln_impostor);
    let mut rng = seed::rng(ts, TAG_CODE, 0);
    // Later in-bin codeword the decoder falls through to, if any.
    let fall_through = |rng: &mut ChaCha8Rng, fallback: &Vec<usize>| -> Vec<usize> {
        if rng.gen::<f64>() < exp(ln_none(ln_impostor, code_bits)) {
            fallback.clone()
        } else {
            dec.draw_pass(&dec_cells, rng)
        }
    };
    let (u, enc_fail, mismatch) = if rng.gen::<f64>() < exp(ln_none(ln_first, code_bits)) {
        // No codeword passes the encoder test: it falls back to codeword 0,
        // which is first in its own bin.
        let u0 = enc.draw_fail(&enc_cells, &gens, &gen_of, &mut rng)?;
        if dec.passes(&dec_cells, &u0) {
            (u0, true, false)
        } else {
            let u = fall_through(&mut rng, &u0);
            let same = u == u0;
            (u, true, !same)
        }
    } else if rng.gen::<f64>() < exp(enc.ln_pass() - ln_first) {
        let ue = enc.draw_pass(&enc_cells, &mut rng);
        if dec.passes(&dec_cells, &ue) {
            (ue, false, false)
        } else {
            let u0 = enc.draw_fail(&enc_cells, &gens, &gen_of, &mut rng)?;
            (fall_through(&mut rng, &u0), false, true)
        }
    } else {
        // An earlier codeword in the bin passes the decoder test.
        let mut u = dec.draw_pass(&dec_cells, &mut rng);
        for _ in 0..1000 {
            if !enc.passes(&enc_cells, &u) {
                break;
            }
            u = dec.draw_pass(&dec_cells, &mut rng);
        }
        let enc_fail = rng.gen::<f64>() < exp(enc.ln_fail(code_bits));
        (u, enc_fail, true)
    };
    let tv = joint_tv(&[x, y, z, &u], &q);
    let threshold = 8.0 * cfg.epsilon;
    let mut sequences = src.clone();
    sequences.push(u);
    Ok(TrialDetail {
        outcome: TrialOutcome {
            index,
            tv,
            encoder_fail: enc_fail,
            decoder_ambiguous: mismatch,
            success: !mismatch && tv < threshold,
        },
        sequences,
    })
}

pub fn side_info_simulate(
    p_xyz: &Pmf,
    u_ch: &Channel,
    r: f64,
    cfg: &SimConfig,
) -> Result<TrialReport> {
    run(cfg, 8.0 * cfg.epsilon, |i| {
        side_info_trial(p_xyz, u_ch, r, cfg, i)
    })
}
