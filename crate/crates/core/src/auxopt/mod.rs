//! Searches over auxiliary random variables.
//!
//! Every minimization here is nonconvex and solved by multi-start descent, so
//! returned values are upper bounds on the true minima. Witnesses are always
//! re-evaluated through [`crate::prob`] / [`crate::regions`] before being
//! returned, and the reported objective is that re-evaluation.

mod engine;
mod frontier;
mod latent;

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::prob::Channel;
use engine::{Problem, Tables};

pub use frontier::{optimize_inner_frontier, FrontierProblem};
pub use latent::{
    clumping, latent_witness_value, necessary_conditional_entropy, no_comm_common_randomness_rate,
    strong_two_node_frontier, strong_two_node_min_rate, strong_two_node_search,
    wyner_common_information, StrongTwoNodePoint,
};

/// Largest TV between a latent-class witness's induced marginal and the
/// required one.
pub const WITNESS_TOLERANCE: f64 = 1e-8;

/// Objectives closer than this are treated as ties.
const TIE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct AuxSearchConfig {
    /// Cap on |U| (and |V|); `None` uses each problem's default.
    pub cardinality_cap: Option<usize>,
    pub restarts: usize,
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub seed: u64,
}

impl Default for AuxSearchConfig {
    fn default() -> Self {
        Self {
            cardinality_cap: None,
            restarts: 8,
            max_iterations: 4000,
            step_tolerance: 1e-12,
            seed: 0x5EED,
        }
    }
}

impl AuxSearchConfig {
    fn validate(&self) -> crate::Result<()> {
        if self.restarts == 0 || self.cardinality_cap == Some(0) {
            return Err(crate::Error::InvalidArgument(alloc::format!(
                "restarts and cardinality cap must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessChannel {
    /// Which factor this is, e.g. `p(u)`, `p(x|u)`, `p(u|x,y,z)`.
    pub role: String,
    pub channel: Channel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuxWitness {
    pub channels: Vec<WitnessChannel>,
    pub objective: f64,
    pub feasibility_gap: f64,
}

impl AuxWitness {
    pub fn channel(&self, role: &str) -> Option<&Channel> {
        self.channels
            .iter()
            .find(|c| c.role == role)
            .map(|c| &c.channel)
    }
}

#[derive(Clone, Debug)]
struct Candidate {
    tables: Tables,
    objective: f64,
    gap: f64,
    cardinality: usize,
}

const TAG_RESTART: u64 = 0xA0;

impl Problem {
    fn candidate(&self, tables: Tables, aux_axes: &[usize]) -> Candidate {
        let j = self.joint(&tables);
        let dims: Vec<usize> = aux_axes.iter().map(|&a| self.dims[a]).collect();
        let cs = crate::prob::strides(&self.dims);
        let size: usize = dims.iter().product();
        let mut used = alloc::vec![false; size];
        for (i, &p) in j.iter().enumerate() {
            if p > 0.0 {
                let k = aux_axes
                    .iter()
                    .fold(0, |acc, &a| acc * self.dims[a] + (i / cs[a]) % self.dims[a]);
                used[k] = true;
            }
        }
        Candidate {
            objective: self.objective(&tables),
            gap: self.gap(&tables),
            cardinality: used.iter().filter(|u| **u).count(),
            tables,
        }
    }
}

/// Lower objective wins; ties go to fewer auxiliary symbols in use, then to
/// the lexicographically smaller table list.
fn better(a: &Candidate, b: &Candidate) -> bool {
    if a.objective < b.objective - TIE {
        return true;
    }
    if a.objective > b.objective + TIE {
        return false;
    }
    match a.cardinality.cmp(&b.cardinality) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => {
            for (ta, tb) in a.tables.iter().zip(&b.tables) {
                for (x, y) in ta.iter().zip(tb) {
                    match x.total_cmp(y) {
                        Ordering::Less => return true,
                        Ordering::Greater => return false,
                        Ordering::Equal => {}
                    }
                }
            }
            false
        }
    }
}

/// How optimizer output is cleaned up before evaluation.
#[derive(Clone, Copy)]
enum Polish {
    /// EM toward exact feasibility (latent-class models).
    Em,
    /// Zero out tiny entries.
    Snap,
}

/// Runs structured starts (each evaluated as given and used as a descent
/// seed) and seeded random restarts; returns every polished candidate.
fn run_search(
    problem: &Problem,
    starts: &[Tables],
    cfg: &AuxSearchConfig,
    aux_axes: &[usize],
    polish: Polish,
) -> Vec<Candidate> {
    let jobs = starts.len() + cfg.restarts;
    let per_job = crate::par::map_range(jobs, |job| {
        let start = if job < starts.len() {
            starts[job].clone()
        } else {
            let mut rng = crate::seed::rng(cfg.seed, TAG_RESTART, (job - starts.len()) as u64);
            problem.assemble(&problem.random_free(&mut rng, 3.0))
        };
        let mut out = Vec::new();
        if job < starts.len() {
            out.push(problem.candidate(start.clone(), aux_axes));
        }
        let descended = problem.descend(&start, cfg.max_iterations, cfg.step_tolerance);
        match polish {
            Polish::Em => {
                out.push(problem.candidate(problem.em(&descended, 4000), aux_axes));
                let snapped = problem.snap(&descended, 1e-6);
                out.push(problem.candidate(problem.em(&snapped, 4000), aux_axes));
            }
            Polish::Snap => {
                out.push(problem.candidate(descended.clone(), aux_axes));
                out.push(problem.candidate(problem.snap(&descended, 1e-6), aux_axes));
                out.push(problem.candidate(problem.snap(&descended, 1e-3), aux_axes));
            }
        }
        out
    });
    per_job.into_iter().flatten().collect()
}

/// Best candidate within `tolerance` of feasibility, else the least infeasible.
fn select(cands: &[Candidate], tolerance: f64) -> Option<&Candidate> {
    let mut best: Option<&Candidate> = None;
    for c in cands
        .iter()
        .filter(|c| c.gap <= tolerance && c.objective.is_finite())
    {
        if best.map_or(true, |b| better(c, b)) {
            best = Some(c);
        }
    }
    best
}

fn least_infeasible(cands: &[Candidate]) -> Option<&Candidate> {
    cands
        .iter()
        .filter(|c| c.objective.is_finite())
        .min_by(|a, b| {
            a.gap
                .total_cmp(&b.gap)
                .then(a.objective.total_cmp(&b.objective))
        })
}
