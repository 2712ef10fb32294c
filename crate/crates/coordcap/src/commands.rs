//! Command dispatch. Each command writes `name value [units]` lines to the
//! given writer and, with `--out`, CSV artifacts.

use std::io::Write;
use std::path::Path;

use coordcap_core::auxopt::{self, AuxSearchConfig, AuxWitness, FrontierProblem};
use coordcap_core::codesim::{self, ExactConfig, ExactMode, SimConfig, TrialOutcome, TrialReport};
use coordcap_core::fixtures::{self, Fixture, FixtureSpec};
use coordcap_core::prob::{compose_channel, conditional_mutual_information, mutual_information};
use coordcap_core::regions::{self, MembershipVerdict, RateVector, Topology};
use coordcap_core::{rdproj, seed, Alphabet, Channel, LogBase, Pmf};
use serde_json::json;

use crate::config::{Base, Command, Mode, Settings};
use crate::error::{CliError, Context, Result};
use crate::formats::{self, num, Table};

/// Default typicality slack per simulation scheme.
pub fn default_epsilon(scheme: &str) -> f64 {
    match scheme {
        "two-node" => 0.03,
        "side-info" => 0.0125,
        _ => 0.05,
    }
}

const TAG_EXACT_TRIAL: u64 = 0xE8AC;

pub fn run(s: &Settings, out: &mut dyn Write) -> Result<()> {
    let cmd = s.validate()?;
    let mut p = Printer {
        out,
        base: LogBase::Bits,
    };
    match cmd {
        Command::Region => region(s, &mut p),
        Command::Optimize => optimize(s, &mut p),
        Command::Simulate => simulate(s, &mut p),
        Command::Rd => rd(s, &mut p),
        Command::Scaling => scaling(s, &mut p),
        Command::Fixtures => fixtures_cmd(s, &mut p),
    }
}

struct Printer<'a> {
    out: &'a mut dyn Write,
    base: LogBase,
}

impl Printer<'_> {
    fn line(&mut self, text: String) -> Result<()> {
        writeln!(self.out, "{text}").map_err(|e| CliError::io("stdout", e))
    }

    fn plain(&mut self, name: &str, v: impl std::fmt::Display) -> Result<()> {
        self.line(format!("{name} {v}"))
    }

    fn value(&mut self, name: &str, v: f64, units: &str) -> Result<()> {
        self.line(format!("{name} {v:.6} {units}"))
    }

    /// A rate computed in bits, shown in the selected base.
    fn rate(&mut self, name: &str, bits: f64) -> Result<()> {
        let b = self.base;
        self.value(name, bits * b.from_bits(), b.unit())
    }

    fn verdict(&mut self, v: &MembershipVerdict) -> Result<()> {
        self.plain("verdict", v.verdict.as_str())?;
        self.rate("slack", v.slack)
    }
}

fn log_base(s: &Settings, default: LogBase) -> LogBase {
    match s.base {
        Some(Base::Bits) => LogBase::Bits,
        Some(Base::Nats) => LogBase::Nats,
        None => default,
    }
}

fn need<T: Clone>(v: &Option<T>, key: &str) -> Result<T> {
    v.clone()
        .ok_or_else(|| CliError::MissingRequired(key.to_string()))
}

/// A rate flag given in the selected base, converted to bits.
fn rate_bits(s: &Settings, r: f64, key: &str) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(CliError::invalid(
            key,
            format!("rate must be nonnegative, got {r}"),
        ));
    }
    Ok(r / log_base(s, LogBase::Bits).from_bits())
}

fn rate_pair(s: &Settings) -> Result<(f64, f64)> {
    let v = need(&s.rates, "rates")?;
    if v.len() != 2 {
        return Err(CliError::invalid(
            "rates",
            format!("expected two rates, got {}", v.len()),
        ));
    }
    Ok((rate_bits(s, v[0], "rates")?, rate_bits(s, v[1], "rates")?))
}

/// Source and target from `--fixture` or from `--source`/`--target` files.
struct Inputs {
    name: String,
    source: Pmf,
    target: Option<Channel>,
}

fn inputs(s: &Settings) -> Result<Inputs> {
    match (&s.fixture, &s.source) {
        (Some(_), Some(_)) => Err(CliError::invalid(
            "fixture",
            "give either --fixture or --source, not both",
        )),
        (Some(f), None) => {
            if s.target.is_some() {
                return Err(CliError::invalid(
                    "target",
                    "a fixture already carries its target",
                ));
            }
            let Fixture {
                name,
                source,
                target,
            } = load_fixture(f)?;
            Ok(Inputs {
                name,
                source,
                target: Some(target),
            })
        }
        (None, Some(path)) => Ok(Inputs {
            name: path.display().to_string(),
            source: formats::read_pmf("source", path)?,
            target: match &s.target {
                Some(t) => Some(formats::read_channel("target", t)?),
                None => None,
            },
        }),
        (None, None) => Err(CliError::MissingRequired("fixture".into())),
    }
}

fn load_fixture(f: &str) -> Result<Fixture> {
    let spec: FixtureSpec = f.parse().map_err(|e| CliError::invalid("fixture", e))?;
    spec.build().map_err(|e| CliError::invalid("fixture", e))
}

impl Inputs {
    fn pair(&self) -> Result<(&Pmf, &Channel)> {
        match &self.target {
            Some(t) => Ok((&self.source, t)),
            None => Err(CliError::MissingRequired("target".into())),
        }
    }

    /// The full joint; with no target the source file is taken as the joint.
    fn joint(&self) -> Result<Pmf> {
        match &self.target {
            Some(t) => compose_channel(&self.source, t).context("inputs"),
            None => Ok(self.source.clone()),
        }
    }

    fn joint_axes(&self, k: usize, what: &str) -> Result<Pmf> {
        let j = self.joint()?;
        if j.ndim() != k {
            return Err(CliError::invalid(
                "fixture",
                format!(
                    "{what} needs a joint over {k} variables, {} has {}",
                    self.name,
                    j.ndim()
                ),
            ));
        }
        Ok(j)
    }
}

fn rates_table(rows: &mut Table, scope: &str, rv: &RateVector, base: LogBase) {
    for (name, v) in rv.to_base(base).iter() {
        rows.push(vec![
            scope.to_string(),
            name.to_string(),
            num(v),
            base.unit().to_string(),
        ]);
    }
}

fn write_table(s: &Settings, t: &Table, cmd: Command) -> Result<()> {
    match &s.out {
        Some(path) => t.write(path, cmd.name()),
        None => Ok(()),
    }
}

fn region(s: &Settings, p: &mut Printer) -> Result<()> {
    p.base = log_base(s, LogBase::Bits);
    let network = need(&s.network, "network")?;
    let mut t = Table::new(&["network", "quantity", "value", "units"]);
    let unit = p.base.unit();
    let scale = p.base.from_bits();
    let scalar = |t: &mut Table, q: &str, bits: f64| {
        t.push(vec![
            network.clone(),
            q.to_string(),
            num(bits * scale),
            unit.to_string(),
        ]);
    };
    match network.as_str() {
        "gaussian" => {
            let r = rate_bits(s, need(&s.rate, "rate")?, "rate")?;
            let member = regions::gaussian_isolated_tradeoff(
                r,
                need(&s.rho_xy, "rho-xy")?,
                need(&s.rho_yz, "rho-yz")?,
            )
            .context("region")?;
            p.plain("member", member)?;
            scalar(&mut t, "member", if member { 1.0 } else { 0.0 });
        }
        "two-node" => {
            let inp = inputs(s)?;
            let (p0, ch) = inp.pair()?;
            let m = regions::two_node_min_rate(p0, ch).context("region")?;
            p.rate("min_rate", m)?;
            scalar(&mut t, "min_rate", m);
            if let Some(r) = s.rate {
                let r = rate_bits(s, r, "rate")?;
                p.plain(
                    "verdict",
                    if r >= m - 1e-12 {
                        "member"
                    } else {
                        "not-member"
                    },
                )?;
                p.rate("slack", r - m)?;
                scalar(&mut t, "slack", r - m);
            }
        }
        "isolated-node" => {
            let inp = inputs(s)?;
            let (p0, ch) = inp.pair()?;
            let r = rate_bits(s, need(&s.rate, "rate")?, "rate")?;
            let v = regions::isolated_node_membership(p0, ch, r).context("region")?;
            p.verdict(&v)?;
            scalar(&mut t, "slack", v.slack);
        }
        "cascade" => {
            let inp = inputs(s)?;
            let (p0, ch) = inp.pair()?;
            let m = regions::cascade_min_rates(p0, ch).context("region")?;
            for (n, v) in m.iter() {
                p.rate(n, v)?;
            }
            rates_table(&mut t, &network, &m, p.base);
            if s.rates.is_some() {
                let (r1, r2) = rate_pair(s)?;
                let v = regions::cascade_membership(p0, ch, r1, r2).context("region")?;
                p.verdict(&v)?;
                scalar(&mut t, "slack", v.slack);
            }
        }
        "broadcast" => {
            let inp = inputs(s)?;
            let (p0, ch) = inp.pair()?;
            let outer = regions::broadcast_outer_rates(p0, ch).context("region")?;
            for (n, v) in outer.iter() {
                p.rate(&format!("outer_{n}"), v)?;
            }
            rates_table(&mut t, "broadcast-outer", &outer, p.base);
            let witness = match s.witness.as_deref() {
                None => None,
                Some("golden-ratio") => Some(fixtures::golden_ratio_witness()),
                Some(path) => Some(formats::read_channel("witness", Path::new(path))?),
            };
            if let Some(u) = &witness {
                let inner = regions::broadcast_inner_rates(p0, ch, u).context("region")?;
                for (n, v) in inner.iter() {
                    p.rate(&format!("inner_{n}"), v)?;
                }
                rates_table(&mut t, "broadcast-inner", &inner, p.base);
                let j = regions::broadcast_joint(p0, ch, u).context("region")?;
                let ixu = mutual_information(&j, &[0], &[3], LogBase::Bits).context("region")?;
                p.rate("i_xu", ixu)?;
                scalar(&mut t, "i_xu", ixu);
            }
            if s.rates.is_some() {
                let (r1, r2) = rate_pair(s)?;
                let v = regions::broadcast_membership(p0, ch, r1, r2, witness.as_ref())
                    .context("region")?;
                p.verdict(&v)?;
                scalar(&mut t, "slack", v.slack);
            }
        }
        "cascade-mt" => {
            let inp = inputs(s)?;
            let (p0, ch) = inp.pair()?;
            let j = inp.joint_axes(3, "cascade-mt")?;
            let r2 = mutual_information(&j, &[0, 1], &[2], LogBase::Bits).context("region")?;
            let r1 = conditional_mutual_information(&j, &[0], &[2], &[1], LogBase::Bits)
                .context("region")?;
            p.rate("outer_R1", r1)?;
            p.rate("outer_R2", r2)?;
            scalar(&mut t, "outer_R1", r1);
            scalar(&mut t, "outer_R2", r2);
            if s.rates.is_some() {
                let (a, b) = rate_pair(s)?;
                let cap = s.cap.unwrap_or(p0.len() * ch.output_len());
                let v = regions::cascade_mt_outer_check(p0, ch, a, b, cap).context("region")?;
                p.verdict(&v)?;
                scalar(&mut t, "slack", v.slack);
            }
        }
        "degraded-source" => {
            let inp = inputs(s)?;
            let (p0, ch) = inp.pair()?;
            let f0 = need(&s.f0, "f0")?;
            let u = formats::read_channel("aux", &need(&s.aux, "aux")?)?;
            let rv = regions::degraded_source_rates(p0, &f0, ch, &u).context("region")?;
            for (n, v) in rv.iter() {
                p.rate(n, v)?;
            }
            rates_table(&mut t, &network, &rv, p.base);
        }
        other => {
            return Err(CliError::invalid(
                "network",
                format!("unknown network {other:?}"),
            ))
        }
    }
    write_table(s, &t, Command::Region)
}

fn search_config(s: &Settings) -> AuxSearchConfig {
    let d = AuxSearchConfig::default();
    AuxSearchConfig {
        cardinality_cap: s.cap,
        restarts: s.restarts.unwrap_or(d.restarts),
        max_iterations: s.iterations.unwrap_or(d.max_iterations),
        step_tolerance: d.step_tolerance,
        seed: s.seed_or_default(),
    }
}

fn weights<const N: usize>(s: &Settings) -> Result<Vec<f64>> {
    let w = need(&s.weights, "weights")?;
    if w.len() != N {
        return Err(CliError::invalid(
            "weights",
            format!("expected {N} weights, got {}", w.len()),
        ));
    }
    Ok(w)
}

fn optimize(s: &Settings, p: &mut Printer) -> Result<()> {
    p.base = log_base(s, LogBase::Bits);
    let problem = need(&s.problem, "problem")?;
    let cfg = search_config(s);
    let inp = inputs(s)?;
    p.plain("seed", cfg.seed)?;
    let mut t = Table::new(&["problem", "quantity", "value", "units"]);
    let (unit, scale) = (p.base.unit(), p.base.from_bits());
    let scalar = |t: &mut Table, q: &str, bits: f64| {
        t.push(vec![
            problem.clone(),
            q.to_string(),
            num(bits * scale),
            unit.to_string(),
        ]);
    };
    let witness: Option<AuxWitness> = match problem.as_str() {
        "wyner" => {
            let j = inp.joint_axes(2, "wyner")?;
            let (c, w) = auxopt::wyner_common_information(&j, &cfg).context("optimize")?;
            p.rate("wyner_common_information", c)?;
            scalar(&mut t, "wyner_common_information", c);
            Some(w)
        }
        "necessary-entropy" => {
            let j = inp.joint_axes(2, "necessary-entropy")?;
            let h = auxopt::necessary_conditional_entropy(&j).context("optimize")?;
            p.rate("necessary_conditional_entropy", h)?;
            scalar(&mut t, "necessary_conditional_entropy", h);
            None
        }
        "strong-two-node" => {
            let (p0, ch) = inp.pair()?;
            let r0 = rate_bits(s, need(&s.r0, "r0")?, "r0")?;
            let (r, pt) = auxopt::strong_two_node_search(p0, ch, r0, &cfg).context("optimize")?;
            p.rate("min_rate", r)?;
            p.rate("i_xu", pt.i_xu)?;
            p.rate("i_xyu", pt.i_xyu)?;
            scalar(&mut t, "min_rate", r);
            scalar(&mut t, "i_xu", pt.i_xu);
            scalar(&mut t, "i_xyu", pt.i_xyu);
            Some(pt.witness)
        }
        "no-comm" => {
            let j = inp.joint_axes(3, "no-comm")?;
            let (r, w) = auxopt::no_comm_common_randomness_rate(&j, &cfg).context("optimize")?;
            p.rate("common_randomness_rate", r)?;
            scalar(&mut t, "common_randomness_rate", r);
            Some(w)
        }
        "broadcast" | "cascade-mt" | "degraded-source" => {
            let (p0, ch) = inp.pair()?;
            let f0 = if problem == "degraded-source" {
                Some(need(&s.f0, "f0")?)
            } else {
                None
            };
            let (fp, w) = match (problem.as_str(), &f0) {
                ("broadcast", _) => (
                    FrontierProblem::Broadcast { p0, target: ch },
                    weights::<2>(s)?,
                ),
                ("cascade-mt", _) => (
                    FrontierProblem::CascadeMt {
                        p0_xy: p0,
                        target: ch,
                    },
                    weights::<2>(s)?,
                ),
                (_, Some(f0)) => (
                    FrontierProblem::DegradedSource { p0, f0, target: ch },
                    weights::<3>(s)?,
                ),
                _ => unreachable!(),
            };
            let (rv, wit) = auxopt::optimize_inner_frontier(&fp, &w, &cfg).context("optimize")?;
            for (n, v) in rv.iter() {
                p.rate(n, v)?;
            }
            p.rate("objective", wit.objective)?;
            rates_table(&mut t, &problem, &rv, p.base);
            scalar(&mut t, "objective", wit.objective);
            Some(wit)
        }
        other => {
            return Err(CliError::invalid(
                "problem",
                format!("unknown problem {other:?}"),
            ))
        }
    };
    if let (Some(w), Some(out)) = (&witness, &s.out) {
        let doc = json!({
            "objective": w.objective,
            "feasibility_gap": w.feasibility_gap,
            "channels": w.channels.iter().map(|c| json!({"role": c.role, "channel": formats::channel_to_json(&c.channel)})).collect::<Vec<_>>(),
        });
        let path = formats::sibling(out, "witness.json");
        let text = serde_json::to_string_pretty(&doc).expect("witness serializes");
        std::fs::write(&path, text + "\n").map_err(|e| CliError::io(path.display(), e))?;
    }
    if let Some(w) = &witness {
        p.value("feasibility_gap", w.feasibility_gap, "tv")?;
    }
    write_table(s, &t, Command::Optimize)
}

/// U = X as a channel p(u|x,y).
fn copy_x(j: &Pmf) -> Result<Channel> {
    let ax = j.axes();
    Channel::deterministic(
        vec![ax[0].clone(), ax[1].clone()],
        vec![ax[0].clone()],
        |xy| vec![xy[0]],
    )
    .context("simulate")
}

fn simulate(s: &Settings, p: &mut Printer) -> Result<()> {
    let scheme = need(&s.scheme, "scheme")?;
    let seed = s.seed_or_default();
    let epsilon = s.epsilon.unwrap_or_else(|| default_epsilon(&scheme));
    let cfg = SimConfig::new(need(&s.n, "n")?, need(&s.trials, "trials")?, epsilon, seed);
    if cfg.n == 0 || cfg.trials == 0 || !(epsilon > 0.0) {
        return Err(CliError::invalid(
            "n",
            "n, trials and epsilon must be positive",
        ));
    }
    let inp = inputs(s)?;
    p.plain("scheme", &scheme)?;
    p.plain("seed", seed)?;
    let mut rates: Vec<f64> = Vec::new();
    let report: TrialReport = match scheme.as_str() {
        "two-node" => {
            let (p0, ch) = inp.pair()?;
            let r = rate_bits(s, need(&s.rate, "rate")?, "rate")?;
            rates.push(r);
            codesim::two_node_simulate(p0, ch, r, &cfg).context("simulate")?
        }
        "cascade" => {
            let (p0, ch) = inp.pair()?;
            let (r1, r2) = rate_pair(s)?;
            rates.extend([r1, r2]);
            codesim::cascade_simulate(p0, ch, r1, r2, &cfg).context("simulate")?
        }
        "side-info" => {
            let j = inp.joint_axes(3, "side-info")?;
            let r = rate_bits(s, need(&s.rate, "rate")?, "rate")?;
            rates.push(r);
            let u = match &s.aux {
                Some(path) => formats::read_channel("aux", path)?,
                None => copy_x(&j)?,
            };
            codesim::side_info_simulate(&j, &u, r, &cfg).context("simulate")?
        }
        "strong-markov" => codesim::strong_markov_trial(&inp.joint_axes(3, "strong-markov")?, &cfg)
            .context("simulate")?,
        "strong-markov-corner" => {
            codesim::strong_markov_corner(&inp.joint_axes(3, "strong-markov-corner")?, &cfg)
                .context("simulate")?
        }
        "exact-no-comm" => {
            let (u, ch) = inp.pair()?;
            if u.ndim() != 1 || ch.output_axes().len() != 3 {
                return Err(CliError::invalid(
                    "fixture",
                    "exact-no-comm needs a source U and a target p(x,y,z|u)",
                ));
            }
            let r0 = rate_bits(s, need(&s.r0, "r0")?, "r0")?;
            rates.push(r0);
            let j = compose_channel(u, ch).context("simulate")?;
            let cond = |k: usize| {
                j.marginalize(&[0, k])
                    .and_then(|m| m.condition(&[0]))
                    .context("simulate")
            };
            let (xu, yu, zu) = (cond(1)?, cond(2)?, cond(3)?);
            let ecfg = ExactConfig {
                budget: s.budget.unwrap_or(ExactConfig::default().budget),
                mode: match s.mode {
                    Some(Mode::FullRandomness) => ExactMode::FullRandomness,
                    _ => ExactMode::Codebook,
                },
            };
            let outcomes = (0..cfg.trials)
                .map(|i| {
                    let tv = codesim::no_comm_strong_exact_tv_with(
                        u,
                        &xu,
                        &yu,
                        &zu,
                        r0,
                        cfg.n,
                        seed::derive(seed, TAG_EXACT_TRIAL, i as u64),
                        &ecfg,
                    )
                    .context("simulate")?;
                    Ok(TrialOutcome {
                        index: i,
                        tv,
                        encoder_fail: false,
                        decoder_ambiguous: false,
                        success: tv < epsilon,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            TrialReport {
                threshold: epsilon,
                outcomes,
            }
        }
        other => {
            return Err(CliError::invalid(
                "scheme",
                format!("unknown scheme {other:?}"),
            ))
        }
    };
    p.value("mean_tv", report.mean_tv(), "tv")?;
    p.value("median_tv", report.median_tv(), "tv")?;
    p.value("success_fraction", report.success_fraction(), "fraction")?;
    p.plain("encoder_failures", report.encoder_failures())?;
    p.value("threshold", report.threshold, "tv")?;

    if let Some(out) = &s.out {
        let joined = rates.iter().map(|r| num(*r)).collect::<Vec<_>>().join(";");
        let mut t = Table::new(&[
            "trial_index",
            "tv",
            "encoder_fail",
            "decoder_ambiguous",
            "success",
            "rates",
            "units",
        ]);
        for o in &report.outcomes {
            t.push(vec![
                o.index.to_string(),
                num(o.tv),
                o.encoder_fail.to_string(),
                o.decoder_ambiguous.to_string(),
                o.success.to_string(),
                joined.clone(),
                "bits".into(),
            ]);
        }
        t.write(out, "simulate")?;
        summary_table(&scheme, &cfg, &rates, &report)
            .write(&formats::sibling(out, "summary.csv"), "simulate")?;
    }
    Ok(())
}

fn summary_table(scheme: &str, cfg: &SimConfig, rates: &[f64], report: &TrialReport) -> Table {
    let mut t = Table::new(&["scheme", "quantity", "value", "units"]);
    let mut row = |q: &str, v: String, u: &str| {
        t.push(vec![scheme.to_string(), q.to_string(), v, u.to_string()])
    };
    for (i, r) in rates.iter().enumerate() {
        row(&format!("rate{}", i + 1), num(*r), "bits");
    }
    row("n", cfg.n.to_string(), "symbols");
    row("trials", cfg.trials.to_string(), "count");
    row("epsilon", num(cfg.epsilon), "tv");
    row("seed", cfg.seed.to_string(), "none");
    row("threshold", num(report.threshold), "tv");
    row("mean_tv", num(report.mean_tv()), "tv");
    row("median_tv", num(report.median_tv()), "tv");
    row(
        "success_fraction",
        num(report.success_fraction()),
        "fraction",
    );
    row(
        "encoder_failures",
        report.encoder_failures().to_string(),
        "count",
    );
    t
}

fn rd(s: &Settings, p: &mut Printer) -> Result<()> {
    let source = match (&s.fixture, &s.source) {
        (None, None) => fixtures::uniform_binary(),
        _ => inputs(s)?.source,
    };
    if source.ndim() != 1 {
        return Err(CliError::invalid("source", "rd needs a single-axis source"));
    }
    let rate = need(&s.rate, "rate")?;
    if !(rate >= 0.0) {
        return Err(CliError::invalid(
            "rate",
            format!("rate must be nonnegative, got {rate}"),
        ));
    }
    let grid = s.grid.unwrap_or(201);
    let a: Alphabet = source.axes()[0].clone();
    let k = a.len();
    let hamming: Vec<f64> = (0..k * k)
        .map(|c| if c / k == c % k { 0.0 } else { 1.0 })
        .collect();
    let dr = rdproj::min_distortion_at_rate(&source, &hamming, a, rate).context("rd")?;
    p.value("distortion", dr.distortion, "hamming")?;
    p.value("rate", dr.rate, "bits")?;
    if k == 2 {
        let rows = rdproj::hamming_grid(&source, grid, rate).context("rd")?;
        match rdproj::grid_min_distortion(&rows) {
            Some(d) => p.value("grid_min_distortion", d, "hamming")?,
            None => p.plain("grid_min_distortion", "none")?,
        }
        if let Some(out) = &s.out {
            let mut t = Table::new(&[
                "p0",
                "p1",
                "I_bits",
                "hamming_distortion",
                "in_region_at_R",
                "units",
            ]);
            for r in &rows {
                t.push(vec![
                    num(r.p0),
                    num(r.p1),
                    num(r.i_bits),
                    num(r.distortion),
                    r.in_region.to_string(),
                    "bits".into(),
                ]);
            }
            t.write(out, "rd")?;
        }
    } else if s.out.is_some() {
        return Err(CliError::invalid(
            "out",
            "the channel grid is only defined for binary sources",
        ));
    }
    Ok(())
}

fn scaling(s: &Settings, p: &mut Printer) -> Result<()> {
    let base = log_base(s, LogBase::Nats);
    let topology = match need(&s.topology, "topology")?.as_str() {
        "extended-cascade" => Topology::ExtendedCascade,
        "extended-broadcast" => Topology::ExtendedBroadcast,
        other => {
            return Err(CliError::invalid(
                "topology",
                format!("unknown topology {other:?}"),
            ))
        }
    };
    let k = need(&s.k, "k")?;
    let f = base.from_nats();
    let rep = regions::scaling_sum_rates(k, topology).map_err(|e| CliError::invalid("k", e))?;
    p.value("sum", rep.sum_nats * f, base.unit())?;
    p.value("reference", rep.reference_nats * f, base.unit())?;
    if let Some(c) = rep.cut_set_nats {
        p.value("cut_set", c * f, base.unit())?;
    }
    if s.out.is_some() {
        let mut t = Table::new(&["k", "sum", "reference", "cut_set", "units"]);
        for j in 2..=k {
            let r = regions::scaling_sum_rates(j, topology).context("scaling")?;
            let cut = r.cut_set_nats.map(|c| num(c * f)).unwrap_or_default();
            t.push(vec![
                j.to_string(),
                num(r.sum_nats * f),
                num(r.reference_nats * f),
                cut,
                base.unit().into(),
            ]);
        }
        write_table(s, &t, Command::Scaling)?;
    }
    Ok(())
}

/// Fixtures listed when none is named.
pub const CATALOGUE: [&str; 9] = [
    "TA2:3",
    "TA3",
    "TAMT",
    "PARITY",
    "BSC:0.1",
    "UNIFORM-BINARY",
    "TA-TRIPLE:4",
    "CHAIN:0.2",
    "COPY:2",
];

fn fixture_json(f: &Fixture) -> serde_json::Value {
    json!({
        "name": f.name,
        "source": formats::pmf_to_json(&f.source),
        "target": formats::channel_to_json(&f.target),
    })
}

fn fixtures_cmd(s: &Settings, p: &mut Printer) -> Result<()> {
    let doc = match &s.fixture {
        Some(f) => fixture_json(&load_fixture(f)?),
        None => serde_json::Value::Array(
            CATALOGUE
                .iter()
                .map(|f| load_fixture(f).map(|x| fixture_json(&x)))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    let text = serde_json::to_string_pretty(&doc).expect("fixtures serialize");
    match &s.out {
        Some(path) => {
            std::fs::write(path, text + "\n").map_err(|e| CliError::io(path.display(), e))
        }
        None => p.line(text),
    }
}
