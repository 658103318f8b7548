//! Experiment configuration: one structured TOML file per experiment.
//!
//! All rational quantities are written as `"p/q"` strings so configs stay
//! exact; nothing in the pipeline ever parses a float. Unknown keys are
//! rejected, and syntax errors surface with the line and column of the
//! offending text.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::engine::NoiseModel;
use crate::protocols::{ProtocolId, ProtocolInstance, ProtocolParams};

/// Most input pairs an exhaustive sweep may enumerate.
const EXHAUSTIVE_PAIR_CAP: u64 = 1 << 16;
/// Most input pairs a sampled sweep may draw.
const SAMPLED_PAIR_CAP: u64 = 1 << 20;

/// Parses `"p/q"` into an exact non-negative rational.
pub fn parse_ratio_u64(s: &str) -> Result<Ratio<u64>, HarnessError> {
    let (p, q) = s
        .split_once('/')
        .ok_or_else(|| HarnessError::Config(format!("rational `{s}` must be written as p/q")))?;
    let p: u64 = p
        .trim()
        .parse()
        .map_err(|_| HarnessError::Config(format!("rational `{s}` has a bad numerator")))?;
    let q: u64 = q
        .trim()
        .parse()
        .map_err(|_| HarnessError::Config(format!("rational `{s}` has a bad denominator")))?;
    if q == 0 {
        return Err(HarnessError::Config(format!("rational `{s}` has a zero denominator")));
    }
    Ok(Ratio::new(p, q))
}

/// Parses `"p/q"` into a signed rational (used where the protocol layer
/// wants `Ratio<i64>`).
pub fn parse_ratio_i64(s: &str) -> Result<Ratio<i64>, HarnessError> {
    let r = parse_ratio_u64(s)?;
    let (p, q) = (*r.numer(), *r.denom());
    if p > i64::MAX as u64 || q > i64::MAX as u64 {
        return Err(HarnessError::Config(format!("rational `{s}` is out of range")));
    }
    Ok(Ratio::new(p as i64, q as i64))
}

/// Renders a rational back to its canonical reduced `"p/q"` form.
pub fn ratio_string(r: Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_model(s: &str) -> Result<NoiseModel, HarnessError> {
    match s {
        "first_termination" => Ok(NoiseModel::FirstTermination),
        "full_termination" => Ok(NoiseModel::FullTermination),
        "speaker_termination" => Ok(NoiseModel::SpeakerTermination),
        "feedback" => Ok(NoiseModel::Feedback),
        other => Err(HarnessError::Config(format!(
            "model.kind `{other}` unknown: expected first_termination, full_termination, \
             speaker_termination, or feedback"
        ))),
    }
}

/// The adversary a sweep runs, or `Suite` for every applicable scripted
/// attack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryKind {
    Null,
    RandomBudgeted,
    HalfSplit,
    AlternatingInputs,
    ForceTerminate,
    GreedyDecodeFlip,
    MajorityBit,
    Suite,
}

impl AdversaryKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AdversaryKind::Null => "null",
            AdversaryKind::RandomBudgeted => "random_budgeted",
            AdversaryKind::HalfSplit => "half_split",
            AdversaryKind::AlternatingInputs => "alternating_inputs",
            AdversaryKind::ForceTerminate => "force_terminate",
            AdversaryKind::GreedyDecodeFlip => "greedy_decode_flip",
            AdversaryKind::MajorityBit => "majority_bit",
            AdversaryKind::Suite => "suite",
        }
    }

    pub fn parse(s: &str) -> Result<AdversaryKind, HarnessError> {
        const ALL: [AdversaryKind; 8] = [
            AdversaryKind::Null,
            AdversaryKind::RandomBudgeted,
            AdversaryKind::HalfSplit,
            AdversaryKind::AlternatingInputs,
            AdversaryKind::ForceTerminate,
            AdversaryKind::GreedyDecodeFlip,
            AdversaryKind::MajorityBit,
            AdversaryKind::Suite,
        ];
        ALL.into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| HarnessError::Config(format!("adversary.kind `{s}` unknown")))
    }

    /// Deterministic scripted attack (no RNG, budgets act as pacing caps).
    pub fn is_scripted(&self) -> bool {
        matches!(
            self,
            AdversaryKind::HalfSplit
                | AdversaryKind::AlternatingInputs
                | AdversaryKind::ForceTerminate
                | AdversaryKind::GreedyDecodeFlip
                | AdversaryKind::MajorityBit
                | AdversaryKind::Suite
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    /// One of: full_sqrt2, second_2_7, speaker_7_20, speaker_gt1_3,
    /// first_half, feedback_ternary, naive_exchange, naive_feedback_binary.
    pub id: String,
    /// Symmetric input width; mutually exclusive with n_a/n_b.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_a: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_b: Option<u32>,
    /// Initial coded block length N; feedback schemes must omit it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_len: Option<u64>,
    pub epsilon: String,
    /// first_half only: largest y the schedule is provisioned for.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_max: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    /// first_termination | full_termination | speaker_termination | feedback
    pub kind: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputsSection {
    /// "exhaustive" (every pair) or "sampled" (count pairs from seed).
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for InputsSection {
    fn default() -> InputsSection {
        InputsSection { mode: "exhaustive".into(), count: None, seed: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversarySection {
    pub kind: String,
    /// random_budgeted only: one base seed per repetition.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<u64>,
    /// Budget grid, strictly ascending. For random_budgeted each entry is
    /// the corruption fraction; for scripted attacks each is a pacing cap
    /// (omit for a single unpaced run).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub budgets: Vec<String>,
    /// Hard cap on total corruptions, applied on top of pacing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_corruptions: Option<u64>,
    /// force_terminate: the victim; alternating_inputs: the party whose
    /// two inputs alternate. Defaults to "bob".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub party: Option<String>,
    /// Override for the counterfactual x (defaults to x+1 mod the space).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_alt: Option<u64>,
    /// Override for the counterfactual y (defaults to y+1 mod the space).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_alt: Option<u64>,
    /// greedy_decode_flip: decode target (defaults to x_alt's default).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<u64>,
}

impl Default for AdversarySection {
    fn default() -> AdversarySection {
        AdversarySection {
            kind: "null".into(),
            seeds: Vec::new(),
            budgets: Vec::new(),
            max_corruptions: None,
            party: None,
            x_alt: None,
            y_alt: None,
            target: None,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Directory reports are written into (default "out").
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<String>,
}

impl OutputSection {
    pub fn dir(&self) -> &str {
        self.dir.as_deref().unwrap_or("out")
    }

    pub fn csv_name(&self) -> &str {
        self.csv.as_deref().unwrap_or("sweep.csv")
    }

    pub fn json_name(&self) -> &str {
        self.json.as_deref().unwrap_or("sweep.json")
    }
}

/// Parameters for the standalone code-family audit.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodesSection {
    pub message_bits: u32,
    pub max_len: usize,
    pub min_prefix_len: usize,
    pub epsilon: String,
    /// Stride of the prefix-length grid (default 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix_step: Option<usize>,
    /// Extra position windows to audit, each `[a, b]` with 1-based ends.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub slices: Vec<[usize; 2]>,
    /// Force a specific alphabet size instead of the designed one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<u32>,
}

/// One experiment: protocol, accounting model, input space, adversary,
/// budget grid, and output locations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSection>,
    #[serde(default)]
    pub inputs: InputsSection,
    #[serde(default)]
    pub adversary: AdversarySection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codes: Option<CodesSection>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<ExperimentConfig, HarnessError> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<ExperimentConfig, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        ExperimentConfig::from_toml_str(&text)
    }

    /// Canonical TOML rendering, embedded in reports so they replay alone.
    pub fn to_toml_string(&self) -> Result<String, HarnessError> {
        Ok(toml::to_string(self)?)
    }

    fn protocol_section(&self) -> Result<&ProtocolSection, HarnessError> {
        self.protocol
            .as_ref()
            .ok_or_else(|| HarnessError::Config("config has no [protocol] section".into()))
    }

    /// Resolved protocol parameters (widths, block length, epsilon).
    pub fn params(&self) -> Result<ProtocolParams, HarnessError> {
        let p = self.protocol_section()?;
        let id: ProtocolId = p.id.parse()?;
        let (n_a, n_b) = match (p.n, p.n_a, p.n_b) {
            (Some(n), None, None) => (n, n),
            (None, Some(a), Some(b)) => (a, b),
            (Some(_), _, _) => {
                return Err(HarnessError::Config(
                    "protocol.n is mutually exclusive with n_a/n_b".into(),
                ))
            }
            _ => {
                return Err(HarnessError::Config(
                    "protocol needs either n or both n_a and n_b".into(),
                ))
            }
        };
        let block_len = match (id.is_feedback(), p.block_len) {
            (false, Some(n)) => n,
            (false, None) => {
                return Err(HarnessError::Config(format!(
                    "protocol.block_len is required for {id}"
                )))
            }
            (true, None) => 0,
            (true, Some(_)) => {
                return Err(HarnessError::Config(format!(
                    "protocol.block_len does not apply to {id}: lengths derive from the widths"
                )))
            }
        };
        let epsilon = parse_ratio_i64(&p.epsilon)?;
        Ok(ProtocolParams { id, n_a, n_b, block_len, epsilon, y_max: p.y_max })
    }

    /// Builds the fully-dimensioned protocol instance.
    pub fn instance(&self) -> Result<ProtocolInstance, HarnessError> {
        Ok(ProtocolInstance::build(self.params()?)?)
    }

    /// The accounting model: explicit `[model]` or the protocol's own.
    /// Feedback schemes take feedback accounting and nothing else, and
    /// fixed-order schemes can never be accounted as feedback.
    pub fn resolved_model(&self) -> Result<NoiseModel, HarnessError> {
        let id: ProtocolId = self.protocol_section()?.id.parse()?;
        let model = match &self.model {
            Some(m) => parse_model(&m.kind)?,
            None => id.default_model(),
        };
        if id.is_feedback() != (model == NoiseModel::Feedback) {
            return Err(HarnessError::Config(format!(
                "model.kind {model} is incompatible with protocol {id}"
            )));
        }
        Ok(model)
    }

    pub fn adversary_kind(&self) -> Result<AdversaryKind, HarnessError> {
        AdversaryKind::parse(&self.adversary.kind)
    }

    /// The parsed budget grid, validated strictly ascending.
    pub fn budget_grid(&self) -> Result<Vec<Ratio<u64>>, HarnessError> {
        let mut grid = Vec::with_capacity(self.adversary.budgets.len());
        for s in &self.adversary.budgets {
            grid.push(parse_ratio_u64(s)?);
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HarnessError::Config(
                "adversary.budgets must be strictly ascending".into(),
            ));
        }
        Ok(grid)
    }

    /// Enumerates the input pairs the sweep runs over.
    pub fn input_pairs(&self, params: &ProtocolParams) -> Result<Vec<(u64, u64)>, HarnessError> {
        let x_cap = (1u64 << params.n_a) - 1;
        let mut y_cap = (1u64 << params.n_b) - 1;
        if let Some(m) = params.y_max {
            y_cap = y_cap.min(m);
        }
        match self.inputs.mode.as_str() {
            "exhaustive" => {
                let count = (x_cap + 1) * (y_cap + 1);
                if count > EXHAUSTIVE_PAIR_CAP {
                    return Err(HarnessError::Config(format!(
                        "exhaustive input space has {count} pairs (cap {EXHAUSTIVE_PAIR_CAP}); \
                         use inputs.mode = \"sampled\""
                    )));
                }
                let mut pairs = Vec::with_capacity(count as usize);
                for x in 0..=x_cap {
                    for y in 0..=y_cap {
                        pairs.push((x, y));
                    }
                }
                Ok(pairs)
            }
            "sampled" => {
                let count = self.inputs.count.ok_or_else(|| {
                    HarnessError::Config("inputs.count is required when mode = \"sampled\"".into())
                })?;
                if count == 0 || count > SAMPLED_PAIR_CAP {
                    return Err(HarnessError::Config(format!(
                        "inputs.count must be in [1, {SAMPLED_PAIR_CAP}]"
                    )));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(self.inputs.seed.unwrap_or(0));
                Ok((0..count)
                    .map(|_| (rng.gen_range(0..=x_cap), rng.gen_range(0..=y_cap)))
                    .collect())
            }
            other => Err(HarnessError::Config(format!(
                "inputs.mode `{other}` unknown: expected exhaustive or sampled"
            ))),
        }
    }

    /// Cross-field validation; every load path runs this.
    pub fn check(&self) -> Result<(), HarnessError> {
        if let Some(codes) = &self.codes {
            let eps = parse_ratio_i64(&codes.epsilon)?;
            if *eps.numer() <= 0 || eps >= Ratio::new(1, 1) {
                return Err(HarnessError::Config("codes.epsilon must be in (0, 1)".into()));
            }
            if codes.prefix_step == Some(0) {
                return Err(HarnessError::Config("codes.prefix_step must be positive".into()));
            }
        }
        if self.protocol.is_none() {
            // A codes-only config audits a family and runs nothing.
            return if self.codes.is_some() {
                Ok(())
            } else {
                Err(HarnessError::Config("config has neither [protocol] nor [codes]".into()))
            };
        }
        let params = self.params()?;
        self.resolved_model()?;
        let kind = self.adversary_kind()?;
        let grid = self.budget_grid()?;
        let adv = &self.adversary;

        match kind {
            AdversaryKind::Null => {
                if !adv.seeds.is_empty() || !grid.is_empty() {
                    return Err(HarnessError::Config(
                        "adversary.seeds and budgets do not apply to kind = \"null\"".into(),
                    ));
                }
            }
            AdversaryKind::RandomBudgeted => {
                if adv.seeds.is_empty() {
                    return Err(HarnessError::Config(
                        "random_budgeted needs a non-empty adversary.seeds list".into(),
                    ));
                }
                if grid.is_empty() {
                    return Err(HarnessError::Config(
                        "random_budgeted needs a non-empty adversary.budgets grid".into(),
                    ));
                }
                if grid.iter().any(|b| *b >= Ratio::from_integer(1)) {
                    return Err(HarnessError::Config(
                        "random_budgeted budgets must be below 1/1".into(),
                    ));
                }
            }
            _ => {
                if !adv.seeds.is_empty() {
                    return Err(HarnessError::Config(format!(
                        "adversary.seeds do not apply to the deterministic {} attack",
                        kind.as_str()
                    )));
                }
            }
        }
        let id = params.id;
        match kind {
            AdversaryKind::HalfSplit | AdversaryKind::GreedyDecodeFlip if id.is_feedback() => {
                return Err(HarnessError::Config(format!(
                    "{} needs a coded block and {id} has none",
                    kind.as_str()
                )));
            }
            AdversaryKind::MajorityBit if id != ProtocolId::NaiveFeedbackBinary => {
                return Err(HarnessError::Config(format!(
                    "majority_bit applies only to naive_feedback_binary, not {id}"
                )));
            }
            _ => {}
        }
        if let Some(party) = &adv.party {
            if party != "alice" && party != "bob" {
                return Err(HarnessError::Config(format!(
                    "adversary.party `{party}` unknown: expected alice or bob"
                )));
            }
        }
        let x_cap = (1u64 << params.n_a) - 1;
        let y_cap = params.y_max.unwrap_or(u64::MAX).min((1u64 << params.n_b) - 1);
        if adv.x_alt.is_some_and(|v| v > x_cap) || adv.target.is_some_and(|v| v > x_cap) {
            return Err(HarnessError::Config(format!(
                "adversary.x_alt/target exceed the {}-bit x space",
                params.n_a
            )));
        }
        if adv.y_alt.is_some_and(|v| v > y_cap) {
            return Err(HarnessError::Config("adversary.y_alt exceeds the y space".into()));
        }
        if self.inputs.mode != "exhaustive" && self.inputs.mode != "sampled" {
            return Err(HarnessError::Config(format!(
                "inputs.mode `{}` unknown: expected exhaustive or sampled",
                self.inputs.mode
            )));
        }
        if self.inputs.mode == "sampled" && self.inputs.count.is_none() {
            return Err(HarnessError::Config(
                "inputs.count is required when mode = \"sampled\"".into(),
            ));
        }
        Ok(())
    }
}
