use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use evendeg::degeneracy::{
    exact_even_degenerate, greedy_even_degenerate, verify_ordering, GreedyPolicy, DEFAULT_DP_LIMIT,
};
use evendeg::experiments::{
    emit_csv, emit_recurrence_csv, emit_report, emit_svg, run_experiment, solve_recurrence, ExperimentSpec,
    RecurrenceParams, RecurrenceStatus,
};
use evendeg::graph::families;
use evendeg::removal::{
    double_removal, make_double_plan, make_uw_config, recursive_even_degenerate, uw_removal, verify_outcome,
    CertifierParams, PlanParams, DEFAULT_S_FACTOR,
};
use evendeg::sampling::sample_gnp;
use evendeg::stats::{
    bipartite_fix_parity_probe, check_conditional_affectedness, check_layered_uniformity, epsilon_uniform_estimate,
    exact_parity_distribution, sample_parity_distribution, sampled_uniformity, single_parity_bias, AffectednessSetup,
    BitMatrix, IndexSetFamily, ProbeMode,
};
use evendeg::{Graph, RandomSource, Revelation};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::{
    CheckArgs, Cli, Command, ExperimentArgs, Failure, Family, GenArgs, Lemma, Outcome, RecurrenceArgs, RemoveArgs,
    RemoveMode, StatsArgs, StatsMode,
};

type CmdResult = Result<Outcome, Failure>;

pub fn run(cli: &Cli) -> CmdResult {
    let seed = cli.global.seed;
    match &cli.command {
        Command::Gen(a) => gen(a, seed),
        Command::Check(a) => check(a),
        Command::Remove(a) => remove(a, seed),
        Command::Stats(a) => stats(a, seed),
        Command::Experiment(a) => experiment(a, seed),
        Command::Recurrence(a) => recurrence(a),
    }
}

fn require_seed(seed: Option<u64>, what: &str) -> Result<u64, Failure> {
    seed.ok_or_else(|| Failure::Usage(format!("{what} is randomized and needs --seed")))
}

/// Writes to `path`, or to stdout when it is `None`.
fn with_output(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<(), Failure>) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    with_output(None, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), Failure> {
    with_output(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

fn gen(a: &GenArgs, seed: Option<u64>) -> CmdResult {
    let need_n = || a.n.ok_or_else(|| Failure::Usage("--n is required".into()));
    let g = match a.family {
        Some(Family::Petersen) => families::petersen(),
        Some(Family::Empty) => Graph::empty(need_n()?),
        Some(Family::Complete) => families::complete(need_n()?),
        Some(Family::Path) => families::path(need_n()?),
        Some(Family::Star) => families::star(need_n()?),
        Some(Family::Cycle) => {
            let n = need_n()?;
            if n < 3 {
                return Err(Failure::Usage("a cycle needs at least 3 vertices".into()));
            }
            families::cycle(n)
        }
        None => {
            let n = need_n()?;
            let p = a.p.ok_or_else(|| Failure::Usage("--p is required unless --family is given".into()))?;
            let seed = require_seed(seed, "gen")?;
            sample_gnp(n, p, &mut RandomSource::new(seed, 0))?
        }
    };
    with_output(a.out.as_deref(), |w| {
        w.write_all(g.to_text().as_bytes())?;
        Ok(())
    })?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct CheckVerdict {
    /// `None` when the greedy fallback found no order, which proves nothing.
    even_degenerate: Option<bool>,
    order: Option<Vec<usize>>,
    method: &'static str,
    conclusive: bool,
}

fn check(a: &CheckArgs) -> CmdResult {
    let g = Graph::read_file(&a.graph)?;
    let verdict = if g.n() <= DEFAULT_DP_LIMIT {
        let order = exact_even_degenerate(&g)?;
        CheckVerdict { even_degenerate: Some(order.is_some()), order, method: "dp", conclusive: true }
    } else {
        // Deterministic policies only, so no seed is needed.
        let mut rng = RandomSource::new(0, 0);
        let order = [GreedyPolicy::FirstIndex, GreedyPolicy::MinDegree, GreedyPolicy::MaxDegree]
            .into_iter()
            .find_map(|policy| greedy_even_degenerate(&g, policy, &mut rng));
        CheckVerdict {
            even_degenerate: order.as_ref().map(|_| true),
            conclusive: order.is_some(),
            order,
            method: "greedy",
        }
    };
    if let Some(order) = &verdict.order {
        debug_assert!(verify_ordering(&g, order)?);
    }
    print_json(&verdict)?;
    if a.expect_degenerate && verdict.even_degenerate != Some(true) {
        return Ok(Outcome::DomainFailure("graph is not shown to be even-degenerate".into()));
    }
    Ok(Outcome::Ok)
}

fn remove(a: &RemoveArgs, seed: Option<u64>) -> CmdResult {
    let seed = require_seed(seed, "remove")?;
    let g = Graph::read_file(&a.graph)?;
    let rev = match &a.revelation {
        Some(path) => Revelation::read_file(path)?,
        None => Revelation::empty((g.edge_count() % 2) as u8, a.alpha),
    };
    rev.validate(g.n())?;
    let s_factor = a.s_factor.unwrap_or(DEFAULT_S_FACTOR);
    let mut rng = RandomSource::new(seed, 0);
    let transcript = a.transcript.as_deref();

    let (success, summary) = match a.mode {
        RemoveMode::Uw => {
            let cfg = make_uw_config(g.n(), &rev, a.alpha, s_factor, &mut rng)?;
            let out = uw_removal(&g, &cfg);
            let verified = verify_outcome(&g, &cfg, &out);
            if transcript.is_some() {
                write_json(transcript, &json!({ "config": cfg, "outcome": out }))?;
            }
            let summary = json!({
                "mode": "uw",
                "n": g.n(),
                "s": cfg.s(),
                "status": out.status,
                "removed": out.removed.len(),
                "remaining": out.remaining.as_ref().map(Vec::len),
                "verified": verified,
            });
            (out.succeeded() && verified, summary)
        }
        RemoveMode::Double => {
            let params = PlanParams { alpha: a.alpha, s_factor, s: None, eta: a.eta };
            let plan = make_double_plan(g.n(), &rev, params, &mut rng)?;
            let out = double_removal(&g, &plan)?;
            if transcript.is_some() {
                write_json(transcript, &out)?;
            }
            let summary = json!({
                "mode": "double",
                "n": g.n(),
                "s": out.plan.s,
                "eta": out.plan.eta,
                "bc": out.bc.status,
                "cb": out.cb.status,
                "derived": out.plan.derived.is_some(),
            });
            (out.plan.derived.is_some(), summary)
        }
        RemoveMode::Recursive => {
            let params = CertifierParams { alpha: a.alpha, s_factor, eta: a.eta, ..CertifierParams::default() };
            let res = recursive_even_degenerate(&g, &rev, &params, &mut rng)?;
            if transcript.is_some() {
                write_json(transcript, &res.trail)?;
            }
            let verified = match &res.order {
                Some(order) => verify_ordering(&g, order)?,
                None => false,
            };
            let summary = json!({
                "mode": "recursive",
                "n": g.n(),
                "levels": res.trail.len(),
                "verified": verified,
                "order": res.order,
            });
            (verified, summary)
        }
    };
    print_json(&summary)?;
    if a.expect_success && !success {
        return Ok(Outcome::DomainFailure("removal did not succeed".into()));
    }
    Ok(Outcome::Ok)
}

/// `--params` is inline JSON when it starts with `{`, else a file path.
fn parse_params<T: DeserializeOwned>(raw: &str) -> Result<T, Failure> {
    let text = if raw.trim_start().starts_with('{') { raw.to_string() } else { std::fs::read_to_string(raw)? };
    Ok(serde_json::from_str(&text)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SingleParityParams {
    p: f64,
    eta: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyParams {
    family: IndexSetFamily,
    p: f64,
    /// Rows of an invertible matrix over F2, entries 0 or 1.
    #[serde(default)]
    transform: Option<Vec<Vec<u8>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BipartiteParams {
    a: usize,
    b: usize,
    p: f64,
}

fn stats(a: &StatsArgs, seed: Option<u64>) -> CmdResult {
    let mc = a.mode == StatsMode::Mc;
    let mut rng = if mc {
        RandomSource::new(require_seed(seed, "stats --mode mc")?, 0)
    } else {
        RandomSource::new(seed.unwrap_or(0), 0)
    };
    if mc && a.trials == 0 {
        return Err(Failure::Usage("--trials must be positive".into()));
    }
    let (holds, report) = match a.lemma {
        Lemma::SingleParity => {
            if mc {
                return Err(Failure::Usage("single-parity has a closed form; use --mode exact".into()));
            }
            let q: SingleParityParams = parse_params(&a.params)?;
            let r = single_parity_bias(q.p, q.eta)?;
            (r.holds(), json!({ "lemma": "single-parity", "result": r, "holds": r.holds() }))
        }
        Lemma::Layered | Lemma::Transformed => {
            let q: FamilyParams = parse_params(&a.params)?;
            let transform = match (&q.transform, a.lemma) {
                (Some(rows), Lemma::Transformed) => Some(BitMatrix::from_rows(rows)?),
                (None, Lemma::Transformed) => {
                    return Err(Failure::Usage("transformed needs a \"transform\" matrix".into()));
                }
                (Some(_), _) => {
                    return Err(Failure::Usage("layered takes no transform; use --lemma transformed".into()))
                }
                (None, _) => None,
            };
            let name = if transform.is_some() { "transformed" } else { "layered" };
            if mc {
                // The bound and eta come from the exact check's hypothesis test;
                // only the law itself is sampled.
                let target = match &transform {
                    Some(t) => q.family.apply_f2_transform(t)?,
                    None => q.family.clone(),
                };
                let exact = check_layered_uniformity(&q.family, q.p, None)?;
                let sample = sample_parity_distribution(&target, q.p, a.trials, &mut rng)?;
                let rep = sampled_uniformity(&sample);
                let ok = rep.consistent_with(exact.bound);
                (ok, json!({ "lemma": name, "eta": exact.eta, "bound": exact.bound, "report": rep, "holds": ok }))
            } else {
                let c = check_layered_uniformity(&q.family, q.p, transform.as_ref())?;
                (c.holds, json!({ "lemma": name, "result": c, "holds": c.holds }))
            }
        }
        Lemma::Affected => {
            if mc {
                return Err(Failure::Usage("affected is checked by enumeration only; use --mode exact".into()));
            }
            let setup: AffectednessSetup = parse_params(&a.params)?;
            let r = check_conditional_affectedness(&setup)?;
            let ok = !r.violated();
            (ok, json!({ "lemma": "affected", "result": r, "holds": ok }))
        }
        Lemma::Bipartite => {
            let q: BipartiteParams = parse_params(&a.params)?;
            let mode = if mc { ProbeMode::MonteCarlo { trials: a.trials } } else { ProbeMode::Exact };
            let probe = bipartite_fix_parity_probe(q.a, q.b, q.p, mode, &mut rng)?;
            let one_class = probe.report.fix_parity.is_some();
            let law = if mc {
                None
            } else {
                let fam = evendeg::stats::bipartite_family(q.a, q.b)?;
                Some(epsilon_uniform_estimate(&exact_parity_distribution(&fam, q.p)?).epsilon)
            };
            (one_class, json!({ "lemma": "bipartite", "result": probe, "epsUniform": law, "holds": one_class }))
        }
    };
    write_json(a.out.as_deref(), &report)?;
    if !holds {
        return Ok(Outcome::DomainFailure("the checked inequality does not hold".into()));
    }
    Ok(Outcome::Ok)
}

fn experiment(a: &ExperimentArgs, seed: Option<u64>) -> CmdResult {
    let mut spec = ExperimentSpec::read_file(&a.spec)?;
    if let Some(seed) = seed {
        spec.master_seed = seed;
    }
    let cells = run_experiment(&spec)?;
    with_output(a.out.as_deref(), |w| Ok(emit_csv(&cells, spec.record_timing, w)?))?;
    if let Some(path) = &a.report {
        let mut w = BufWriter::new(File::create(path)?);
        emit_report(&cells, &spec, &mut w)?;
        writeln!(w)?;
        w.flush()?;
    }
    if let Some(path) = &a.svg {
        let mut w = BufWriter::new(File::create(path)?);
        emit_svg(&cells, &mut w)?;
        w.flush()?;
    }
    Ok(Outcome::Ok)
}

fn recurrence(a: &RecurrenceArgs) -> CmdResult {
    let params: RecurrenceParams = serde_json::from_str(&std::fs::read_to_string(&a.params)?)?;
    let outcome = solve_recurrence(&params, a.horizon)?;
    if let Some(path) = &a.out {
        let mut w = BufWriter::new(File::create(path)?);
        emit_recurrence_csv(&outcome, &mut w)?;
        w.flush()?;
    }
    print_json(&json!({
        "zeta": outcome.zeta,
        "margin": outcome.margin,
        "K0": outcome.k0,
        "M": outcome.m,
        "horizon": outcome.horizon,
        "status": outcome.status,
        "worstLogGap": outcome.worst_log_gap,
    }))?;
    match &outcome.status {
        RecurrenceStatus::Verified => Ok(Outcome::Ok),
        RecurrenceStatus::Violated { first_n } => {
            Ok(Outcome::DomainFailure(format!("bound violated first at n = {first_n}")))
        }
        RecurrenceStatus::Inapplicable { reason } => Ok(Outcome::DomainFailure(format!("inapplicable: {reason}"))),
    }
}
