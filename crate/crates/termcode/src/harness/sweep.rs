//! Sweep execution: every (budget, adversary, input pair) cell of a
//! config's grid, run deterministically and in parallel.
//!
//! Runs are independent, so each derives its own RNG seed from the base
//! seed and the cell key; worker count and scheduling order can never
//! change a result. The cell list is sorted by key before execution and
//! `collect` preserves that order, so reports come out byte-identical for
//! the same config and seeds.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{parse_ratio_u64, ratio_string, AdversaryKind, AdversarySection};
use super::{ExperimentConfig, HarnessError};
use crate::adversaries::{
    harvest_view, AlternatingInputs, AttackReport, ForceTerminate, GreedyDecodeFlip, HalfSplit,
    MajorityBit, Paced, RandomBudgeted,
};
use crate::ecc::Message;
use crate::engine::{
    noise_rate, transcript_hash, Adversary, NoiseModel, Party, PassthroughChannel, SymbolUniverse,
};
use crate::protocols::ProtocolInstance;

/// Mixes the cell key into the base seed so every run draws independent
/// randomness no matter how the grid is traversed.
pub fn derive_seed(base: u64, budget_idx: usize, x: u64, y: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(b"sweep-run-seed");
    h.update(base.to_le_bytes());
    h.update((budget_idx as u64).to_le_bytes());
    h.update(x.to_le_bytes());
    h.update(y.to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is wider than u64"))
}

/// One executed run of the sweep grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub adversary: String,
    pub seed: u64,
    /// Budget or pacing cap as configured ("0/1" none, "1/1" unpaced).
    pub budget: String,
    pub x: u64,
    pub y: u64,
    pub corruptions: u64,
    pub denominator: u64,
    /// Reduced corruption rate under the report's accounting model.
    pub rate: String,
    pub correct: bool,
    pub alice_term: Option<u64>,
    pub bob_term: Option<u64>,
    pub truncated: bool,
    pub transcript_hash: String,
}

/// Failure accounting over a whole sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Aggregate {
    pub runs: u64,
    pub failures: u64,
    /// Largest rate of a failing run strictly below the claimed threshold.
    /// The resilience guarantee says this must stay `None`.
    pub max_failing_rate_below_threshold: Option<String>,
    /// Smallest rate at which any run failed, if one did.
    pub min_succeeding_attack_rate: Option<String>,
}

/// The full outcome of a sweep: sorted rows plus aggregates, with the
/// generating config embedded so the report replays on its own.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub protocol: String,
    pub model: String,
    pub n_a: u32,
    pub n_b: u32,
    pub block_len: u64,
    pub epsilon: String,
    pub claimed_threshold: Option<f64>,
    pub aggregate: Aggregate,
    pub rows: Vec<SweepRow>,
    pub config_text: String,
}

impl SweepReport {
    /// True while no failing run sits strictly below the claimed
    /// threshold — the invariant a nonzero exit code reports.
    pub fn guarantee_holds(&self) -> bool {
        self.aggregate.max_failing_rate_below_threshold.is_none()
    }
}

/// One grid cell, fully keyed.
struct RunSpec {
    name: &'static str,
    budget: String,
    cap: Ratio<u64>,
    seed: u64,
    x: u64,
    y: u64,
}

fn spec_key(s: &RunSpec) -> (&'static str, Ratio<u64>, u64, u64, u64) {
    (s.name, s.cap, s.seed, s.x, s.y)
}

/// Scripted attacks that apply to this instance.
fn suite_names(inst: &ProtocolInstance) -> Vec<&'static str> {
    let mut names = Vec::new();
    if inst.alice_block_code().is_some() {
        names.push("half_split");
        names.push("greedy_decode_flip");
    }
    names.push("force_terminate");
    names.push("alternating_inputs");
    if inst.universe() == SymbolUniverse::FeedbackBinary
        && inst.params().n_a >= 2
        && inst.params().n_b >= 2
    {
        names.push("majority_bit");
    }
    names
}

fn enumerate_runs(
    cfg: &ExperimentConfig,
    inst: &ProtocolInstance,
) -> Result<Vec<RunSpec>, HarnessError> {
    let params = inst.params();
    let pairs = cfg.input_pairs(params)?;
    let kind = cfg.adversary_kind()?;
    let grid = cfg.budget_grid()?;
    let mut specs = Vec::new();
    match kind {
        AdversaryKind::Null => {
            for &(x, y) in &pairs {
                specs.push(RunSpec {
                    name: "null",
                    budget: "0/1".into(),
                    cap: Ratio::new(0, 1),
                    seed: 0,
                    x,
                    y,
                });
            }
        }
        AdversaryKind::RandomBudgeted => {
            for (bi, &cap) in grid.iter().enumerate() {
                for &base in &cfg.adversary.seeds {
                    for &(x, y) in &pairs {
                        specs.push(RunSpec {
                            name: "random_budgeted",
                            budget: cfg.adversary.budgets[bi].clone(),
                            cap,
                            seed: derive_seed(base, bi, x, y),
                            x,
                            y,
                        });
                    }
                }
            }
        }
        _ => {
            // Scripted attacks: each budget entry is a pacing cap; an
            // empty grid means one unpaced run.
            let caps: Vec<(String, Ratio<u64>)> = if grid.is_empty() {
                vec![("1/1".into(), Ratio::new(1, 1))]
            } else {
                grid.iter()
                    .enumerate()
                    .map(|(i, &c)| (cfg.adversary.budgets[i].clone(), c))
                    .collect()
            };
            let names: Vec<&'static str> = if kind == AdversaryKind::Suite {
                suite_names(inst)
            } else {
                vec![kind.as_str()]
            };
            for (budget, cap) in &caps {
                for &(x, y) in &pairs {
                    for &name in &names {
                        specs.push(RunSpec {
                            name,
                            budget: budget.clone(),
                            cap: *cap,
                            seed: 0,
                            x,
                            y,
                        });
                    }
                }
            }
        }
    }
    Ok(specs)
}

/// `(v + 1) mod (cap + 1)`: the default counterfactual partner of `v`.
fn alt_value(v: u64, cap: u64) -> u64 {
    if v >= cap {
        0
    } else {
        v + 1
    }
}

fn paced<A: Adversary + 'static>(
    attack: A,
    cap: Ratio<u64>,
    max: Option<u64>,
) -> Box<dyn Adversary> {
    let mut wrapped = Paced::new(attack, cap);
    if let Some(m) = max {
        wrapped = wrapped.with_max_corruptions(m);
    }
    Box::new(wrapped)
}

/// Builds the adversary for one run. Replay calls this with the exact
/// same arguments, so construction must stay a pure function of them.
fn build_adversary(
    inst: &ProtocolInstance,
    adv: &AdversarySection,
    name: &str,
    cap: Ratio<u64>,
    seed: u64,
    x: Message,
    y: Message,
) -> Result<Box<dyn Adversary>, HarnessError> {
    let params = inst.params();
    let x_cap = (1u64 << params.n_a) - 1;
    let y_cap = params.y_max.unwrap_or(u64::MAX).min((1u64 << params.n_b) - 1);
    let x_alt = adv.x_alt.unwrap_or_else(|| alt_value(x.value(), x_cap));
    let y_alt = adv.y_alt.unwrap_or_else(|| alt_value(y.value(), y_cap));
    let party = match adv.party.as_deref() {
        Some("alice") => Party::Alice,
        _ => Party::Bob,
    };
    let max = adv.max_corruptions;
    match name {
        "null" => Ok(Box::new(PassthroughChannel)),
        "random_budgeted" => Ok(Box::new(RandomBudgeted::new(inst.universe(), cap, seed)?)),
        "half_split" => {
            let attack = HalfSplit::new(inst, x, Message::new(x_alt, params.n_a)?)?;
            Ok(paced(attack, cap, max))
        }
        "greedy_decode_flip" => {
            let target = adv.target.unwrap_or(x_alt);
            let mut attack = GreedyDecodeFlip::new(inst, x, Message::new(target, params.n_a)?)?;
            if let Some(m) = max {
                attack = attack.with_budget(m);
            }
            Ok(paced(attack, cap, None))
        }
        "force_terminate" => {
            // Script the victim's listening rounds from an honest run in
            // which the other party held the counterfactual input.
            let reference = match party {
                Party::Bob => inst.run(Message::new(x_alt, params.n_a)?, y, &mut PassthroughChannel)?,
                Party::Alice => {
                    inst.run(x, Message::new(y_alt, params.n_b)?, &mut PassthroughChannel)?
                }
            };
            let attack = ForceTerminate::new(party, harvest_view(&reference, party));
            Ok(paced(attack, cap, max))
        }
        "alternating_inputs" => {
            let (first, second) = match party {
                Party::Bob => (y, Message::new(y_alt, params.n_b)?),
                Party::Alice => (x, Message::new(x_alt, params.n_a)?),
            };
            let attack = AlternatingInputs::new(inst, party, first, second)?;
            Ok(paced(attack, cap, max))
        }
        "majority_bit" => {
            let a1 = x_alt;
            let a2 = alt_value(a1, x_cap);
            let b1 = y_alt;
            let b2 = alt_value(b1, y_cap);
            let attack = MajorityBit::new(
                inst,
                [x, Message::new(a1, params.n_a)?, Message::new(a2, params.n_a)?],
                [y, Message::new(b1, params.n_b)?, Message::new(b2, params.n_b)?],
            )?;
            Ok(paced(attack, cap, max))
        }
        other => Err(HarnessError::Config(format!("adversary `{other}` unknown"))),
    }
}

fn run_one(
    inst: &ProtocolInstance,
    model: NoiseModel,
    cfg: &ExperimentConfig,
    spec: &RunSpec,
) -> Result<SweepRow, HarnessError> {
    let params = inst.params();
    let x = Message::new(spec.x, params.n_a)?;
    let y = Message::new(spec.y, params.n_b)?;
    let mut adversary =
        build_adversary(inst, &cfg.adversary, spec.name, spec.cap, spec.seed, x, y)?;
    let result = inst.run(x, y, adversary.as_mut())?;
    let acct = noise_rate(&result, model)?;
    let outcome = inst.judge(x, y, &result);
    Ok(SweepRow {
        adversary: spec.name.into(),
        seed: spec.seed,
        budget: spec.budget.clone(),
        x: spec.x,
        y: spec.y,
        corruptions: acct.corruptions,
        denominator: acct.denominator,
        rate: ratio_string(acct.rate()),
        correct: outcome.correct,
        alice_term: result.alice_term,
        bob_term: result.bob_term,
        truncated: result.truncated,
        transcript_hash: transcript_hash(&result),
    })
}

fn build_aggregate(rows: &[SweepRow], threshold: Option<f64>) -> Aggregate {
    let mut failures = 0u64;
    let mut worst_below: Option<Ratio<u64>> = None;
    let mut min_success: Option<Ratio<u64>> = None;
    for row in rows.iter().filter(|r| !r.correct) {
        failures += 1;
        let rate = Ratio::new(row.corruptions, row.denominator.max(1));
        min_success = Some(min_success.map_or(rate, |m| m.min(rate)));
        if let Some(th) = threshold {
            let as_f64 = *rate.numer() as f64 / *rate.denom() as f64;
            if as_f64 < th {
                worst_below = Some(worst_below.map_or(rate, |w| w.max(rate)));
            }
        }
    }
    Aggregate {
        runs: rows.len() as u64,
        failures,
        max_failing_rate_below_threshold: worst_below.map(ratio_string),
        min_succeeding_attack_rate: min_success.map(ratio_string),
    }
}

/// Executes every cell of the config's grid and assembles the report.
/// `jobs` bounds the worker pool; `None` uses the global default.
pub fn run_sweep(
    cfg: &ExperimentConfig,
    jobs: Option<usize>,
) -> Result<SweepReport, HarnessError> {
    cfg.check()?;
    let inst = cfg.instance()?;
    let model = cfg.resolved_model()?;
    let mut specs = enumerate_runs(cfg, &inst)?;
    specs.sort_by(|a, b| spec_key(a).cmp(&spec_key(b)));
    let work = || -> Result<Vec<SweepRow>, HarnessError> {
        specs.par_iter().map(|s| run_one(&inst, model, cfg, s)).collect()
    };
    let rows = match jobs {
        Some(0) => return Err(HarnessError::Pool("jobs must be positive".into())),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| HarnessError::Pool(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let params = inst.params();
    let eps = params.epsilon;
    Ok(SweepReport {
        protocol: params.id.as_str().into(),
        model: model.to_string(),
        n_a: params.n_a,
        n_b: params.n_b,
        block_len: params.block_len,
        epsilon: ratio_string(Ratio::new(*eps.numer() as u64, *eps.denom() as u64)),
        claimed_threshold: inst.claimed_threshold(),
        aggregate: build_aggregate(&rows, inst.claimed_threshold()),
        rows,
        config_text: cfg.to_toml_string()?,
    })
}

/// One scripted attack run reported in full, transcript included.
#[derive(Debug, Clone, Serialize)]
pub struct NamedAttack {
    pub name: String,
    pub budget: String,
    pub x: u64,
    pub y: u64,
    pub claimed_threshold: Option<f64>,
    pub report: AttackReport,
}

/// Runs the configured attack (or the whole applicable suite) against
/// every input pair and reports each run with its per-model rates.
pub fn run_attacks(cfg: &ExperimentConfig) -> Result<Vec<NamedAttack>, HarnessError> {
    cfg.check()?;
    let inst = cfg.instance()?;
    if cfg.adversary_kind()? == AdversaryKind::Null {
        return Err(HarnessError::Config("attack mode needs a non-null adversary.kind".into()));
    }
    let mut specs = enumerate_runs(cfg, &inst)?;
    specs.sort_by(|a, b| spec_key(a).cmp(&spec_key(b)));
    let params = inst.params();
    let threshold = inst.claimed_threshold();
    specs
        .iter()
        .map(|spec| {
            let x = Message::new(spec.x, params.n_a)?;
            let y = Message::new(spec.y, params.n_b)?;
            let mut adversary =
                build_adversary(&inst, &cfg.adversary, spec.name, spec.cap, spec.seed, x, y)?;
            let result = inst.run(x, y, adversary.as_mut())?;
            Ok(NamedAttack {
                name: spec.name.into(),
                budget: spec.budget.clone(),
                x: spec.x,
                y: spec.y,
                claimed_threshold: threshold,
                report: AttackReport::from_run(&inst, x, y, result),
            })
        })
        .collect()
}

/// Outcome of replaying one stored row.
#[derive(Debug, Clone, Serialize)]
pub struct ReplayOutcome {
    pub row: SweepRow,
    /// The rerun produced the exact transcript the row recorded.
    pub matches: bool,
    pub actual_hash: String,
    /// Rate recomputed from the rerun transcript, for audit.
    pub corruptions: u64,
    pub denominator: u64,
}

/// Reruns the first row whose transcript hash starts with `hash_prefix`,
/// rebuilding protocol and adversary from the report's embedded config.
pub fn replay_report(
    report: &SweepReport,
    hash_prefix: &str,
) -> Result<ReplayOutcome, HarnessError> {
    if hash_prefix.is_empty() {
        return Err(HarnessError::RowNotFound(String::new()));
    }
    let row = report
        .rows
        .iter()
        .find(|r| r.transcript_hash.starts_with(hash_prefix))
        .ok_or_else(|| HarnessError::RowNotFound(hash_prefix.into()))?
        .clone();
    let cfg = ExperimentConfig::from_toml_str(&report.config_text)?;
    let inst = cfg.instance()?;
    let model = cfg.resolved_model()?;
    let params = inst.params();
    let x = Message::new(row.x, params.n_a)?;
    let y = Message::new(row.y, params.n_b)?;
    let cap = parse_ratio_u64(&row.budget)?;
    let mut adversary =
        build_adversary(&inst, &cfg.adversary, &row.adversary, cap, row.seed, x, y)?;
    let result = inst.run(x, y, adversary.as_mut())?;
    let actual_hash = transcript_hash(&result);
    let acct = noise_rate(&result, model)?;
    Ok(ReplayOutcome {
        matches: actual_hash == row.transcript_hash,
        row,
        actual_hash,
        corruptions: acct.corruptions,
        denominator: acct.denominator,
    })
}
