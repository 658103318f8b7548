//! The protocol suite: endpoint pairs with adaptive termination.
//!
//! A [`ProtocolInstance`] owns everything a session needs — code families,
//! speaker schedule, symbol universe, round cap — and builds fresh
//! deterministic endpoints per run. Six schemes trade round complexity
//! against the noise fraction they survive, plus two deliberately naive
//! baselines that attacks in this crate are calibrated against.

pub mod lengths;

mod feedback;
mod first_term;
mod full_term;
mod naive;
mod second_term;
mod speaker;

pub use feedback::FeedbackSchedule;
pub use speaker::SpeakerVariant;

use std::cell::RefCell;
use std::rc::Rc;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ecc::{EccError, Message, PrefixCodeFamily};
use crate::engine::{
    run_session, Endpoint, EndpointFactory, NoiseModel, Party, PartyOutput, Session,
    SessionError, SessionResult, SpeakerSchedule, SymbolUniverse,
};

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("protocol parameters invalid: {0}")]
    BadParams(String),
    #[error("input for {party} must be {expect} bits wide, got {got}")]
    InputWidth { party: Party, expect: u32, got: u32 },
    #[error("input value {value} exceeds the protocol's range cap {cap}")]
    InputRange { value: u64, cap: u64 },
    #[error(transparent)]
    Ecc(#[from] EccError),
    #[error(transparent)]
    Session(#[from] SessionError),
}

/// The schemes this crate implements, keyed by their config-file ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProtocolId {
    /// Coded exchange resilient to 1/(2+√2) − O(ε) under full accounting.
    FullSqrt2,
    /// Coded exchange resilient to 2/7 − O(ε) under full accounting.
    Second27,
    /// Speaker-model scheme resilient to 7/20 − O(ε).
    Speaker720,
    /// Speaker-model scheme resilient to (9−√57)/4 − O(ε) > 1/3.
    SpeakerGt13,
    /// Geometric-batch scheme resilient to 1/2 − ε under first-termination
    /// accounting.
    FirstHalf,
    /// Ternary feedback scheme resilient to 1/2 − ε.
    FeedbackTernary,
    /// Baseline: one coded block each way, fixed lengths.
    NaiveExchange,
    /// Baseline: plain bits over binary feedback, fixed lengths.
    NaiveFeedbackBinary,
}

impl ProtocolId {
    pub const ALL: [ProtocolId; 8] = [
        ProtocolId::FullSqrt2,
        ProtocolId::Second27,
        ProtocolId::Speaker720,
        ProtocolId::SpeakerGt13,
        ProtocolId::FirstHalf,
        ProtocolId::FeedbackTernary,
        ProtocolId::NaiveExchange,
        ProtocolId::NaiveFeedbackBinary,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ProtocolId::FullSqrt2 => "full_sqrt2",
            ProtocolId::Second27 => "second_2_7",
            ProtocolId::Speaker720 => "speaker_7_20",
            ProtocolId::SpeakerGt13 => "speaker_gt1_3",
            ProtocolId::FirstHalf => "first_half",
            ProtocolId::FeedbackTernary => "feedback_ternary",
            ProtocolId::NaiveExchange => "naive_exchange",
            ProtocolId::NaiveFeedbackBinary => "naive_feedback_binary",
        }
    }

    /// The accounting model the scheme is analyzed under.
    pub fn default_model(&self) -> NoiseModel {
        match self {
            ProtocolId::FullSqrt2 | ProtocolId::Second27 | ProtocolId::NaiveExchange => {
                NoiseModel::FullTermination
            }
            ProtocolId::Speaker720 | ProtocolId::SpeakerGt13 => NoiseModel::SpeakerTermination,
            ProtocolId::FirstHalf => NoiseModel::FirstTermination,
            ProtocolId::FeedbackTernary | ProtocolId::NaiveFeedbackBinary => NoiseModel::Feedback,
        }
    }

    pub fn is_feedback(&self) -> bool {
        matches!(self, ProtocolId::FeedbackTernary | ProtocolId::NaiveFeedbackBinary)
    }
}

impl std::fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ProtocolId {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<ProtocolId, ProtocolError> {
        ProtocolId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| ProtocolError::BadParams(format!("unknown protocol id `{s}`")))
    }
}

/// Parameters shared by every scheme. `block_len` is the length N of the
/// sender's initial coded block; feedback schemes derive all lengths from
/// the bit widths instead and ignore it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub id: ProtocolId,
    /// Bits of Alice's input x.
    pub n_a: u32,
    /// Bits of Bob's input y.
    pub n_b: u32,
    /// Length N of the initial coded block.
    pub block_len: u64,
    pub epsilon: Ratio<i64>,
    /// `first_half` only: largest y value the schedule is provisioned for
    /// (defaults to the full n_b-bit range).
    pub y_max: Option<u64>,
}

impl ProtocolParams {
    /// Same input width on both sides, no range cap.
    pub fn symmetric(id: ProtocolId, bits: u32, block_len: u64, epsilon: Ratio<i64>) -> Self {
        ProtocolParams { id, n_a: bits, n_b: bits, block_len, epsilon, y_max: None }
    }
}

/// Per-run internals exposed for tests and attack calibration. Endpoints
/// fill these in as the session runs; every field is `None` until the
/// state it reflects was actually computed.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Instruments {
    /// Bob's residual distance t after decoding the initial block.
    pub responder_residual_t: Option<u64>,
    /// The reply length L Bob committed to (0 = gave up at the block end).
    pub responder_reply_len: Option<u64>,
    /// Alice's residual distance s after decoding Bob's reply.
    pub sender_residual_s: Option<u64>,
    /// The extension length K Alice committed to (0 = stopped at N+L).
    pub sender_extension_k: Option<u64>,
    /// Reply letters Alice had heard when her stop rule fired.
    pub sender_stop_r: Option<u64>,
    /// Feedback schemes: Alice's final view of the two shared stacks.
    pub alice_stack_view: Option<(Vec<u8>, Vec<u8>)>,
    /// Feedback schemes: Bob's final view of the two shared stacks.
    pub bob_stack_view: Option<(Vec<u8>, Vec<u8>)>,
}

/// Shared handle the endpoints write instruments through.
pub type InstrumentHandle = Rc<RefCell<Instruments>>;

/// Verdict on one finished session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolOutcome {
    pub alice_correct: bool,
    pub bob_correct: bool,
    /// Both parties output exactly (x, y) and the round cap never fired.
    pub correct: bool,
}

enum InstanceKind {
    FullSqrt2 {
        a_code: Arc<PrefixCodeFamily>,
        b_code: Arc<PrefixCodeFamily>,
        reply_cap: u64,
    },
    Second27 {
        a_code: Arc<PrefixCodeFamily>,
        b_code: Arc<PrefixCodeFamily>,
        reply_cap: u64,
    },
    Speaker {
        variant: SpeakerVariant,
        x_code: Arc<PrefixCodeFamily>,
        pair_code: Arc<PrefixCodeFamily>,
        reply_len: u64,
        window_len: u64,
    },
    FirstHalf {
        code: Arc<PrefixCodeFamily>,
        y_max: u64,
        batch_lens: Arc<Vec<u64>>,
    },
    Feedback {
        target: u64,
        cap: u64,
    },
    NaiveExchange {
        a_code: Arc<PrefixCodeFamily>,
        b_code: Arc<PrefixCodeFamily>,
    },
    NaiveFeedback,
}

/// A fully-dimensioned scheme, ready to mint endpoints and run sessions.
pub struct ProtocolInstance {
    params: ProtocolParams,
    universe: SymbolUniverse,
    model: NoiseModel,
    feedback_echo: bool,
    schedule: Box<dyn SpeakerSchedule + Send + Sync>,
    round_cap: u64,
    kind: InstanceKind,
}

impl ProtocolInstance {
    pub fn build(params: ProtocolParams) -> Result<ProtocolInstance, ProtocolError> {
        use crate::engine::FixedSchedule;

        let eps = params.epsilon;
        if *eps.numer() <= 0 || eps >= Ratio::new(1, 1) {
            return Err(ProtocolError::BadParams(format!("epsilon {eps} outside (0, 1)")));
        }
        if params.n_a == 0 || params.n_b == 0 {
            return Err(ProtocolError::BadParams("input widths must be positive".into()));
        }
        let n = params.block_len;
        let bits_a = params.n_a;
        let bits_b = params.n_b;
        let need_block = !params.id.is_feedback();
        if need_block && n == 0 {
            return Err(ProtocolError::BadParams("block length must be positive".into()));
        }
        if params.y_max.is_some() && params.id != ProtocolId::FirstHalf {
            return Err(ProtocolError::BadParams(
                "y_max only applies to the first_half scheme".into(),
            ));
        }

        let (kind, universe, schedule, round_cap): (
            InstanceKind,
            SymbolUniverse,
            Box<dyn SpeakerSchedule + Send + Sync>,
            u64,
        ) = match params.id {
            ProtocolId::FullSqrt2 => {
                // Codes carry relative distance 1 − eps/2, not 1 − eps: the
                // reply-length schedule spends the other half of the slack.
                let code_eps = eps / 2;
                let s = lengths::sqrt2_reply_cap(n);
                let q = PrefixCodeFamily::design_alphabet(bits_a, n as usize, n as usize, code_eps)?
                    .max(PrefixCodeFamily::design_alphabet(
                        bits_b, s as usize, s as usize, code_eps,
                    )?);
                let a_code = Arc::new(PrefixCodeFamily::design_with_alphabet(
                    q, bits_a, n as usize, n as usize, code_eps,
                )?);
                let b_code = Arc::new(PrefixCodeFamily::design_with_alphabet(
                    q, bits_b, s as usize, s as usize, code_eps,
                )?);
                (
                    InstanceKind::FullSqrt2 { a_code, b_code, reply_cap: s },
                    SymbolUniverse::Coded { q },
                    Box::new(FixedSchedule::alice_then_bob(n, s, None)),
                    n + s,
                )
            }
            ProtocolId::Second27 => {
                if eps > Ratio::new(1, 12) {
                    return Err(ProtocolError::BadParams(format!(
                        "epsilon {eps} too large: this scheme needs epsilon <= 1/12"
                    )));
                }
                let m = lengths::two7_reply_cap(n);
                let q = PrefixCodeFamily::design_alphabet(bits_a, n as usize, n as usize, eps)?
                    .max(PrefixCodeFamily::design_alphabet(bits_b, m as usize, m as usize, eps)?);
                let a_code = Arc::new(PrefixCodeFamily::design_with_alphabet(
                    q, bits_a, n as usize, n as usize, eps,
                )?);
                let b_code = Arc::new(PrefixCodeFamily::design_with_alphabet(
                    q, bits_b, m as usize, m as usize, eps,
                )?);
                (
                    InstanceKind::Second27 { a_code, b_code, reply_cap: m },
                    SymbolUniverse::Coded { q },
                    Box::new(FixedSchedule::alice_then_bob(n, m, None)),
                    n + m,
                )
            }
            ProtocolId::Speaker720 | ProtocolId::SpeakerGt13 => {
                let variant = if params.id == ProtocolId::Speaker720 {
                    SpeakerVariant::Rate720
                } else {
                    SpeakerVariant::RateSqrt57
                };
                let l = variant.reply_len(n);
                let m = variant.window_len(n);
                let pair_bits = bits_a + bits_b;
                let x_max = (n + m) as usize;
                let q = PrefixCodeFamily::design_alphabet(bits_a, x_max, n as usize, eps)?
                    .max(PrefixCodeFamily::design_alphabet(
                        pair_bits, l as usize, l as usize, eps,
                    )?);
                let x_code = Arc::new(PrefixCodeFamily::design_with_alphabet(
                    q, bits_a, x_max, n as usize, eps,
                )?);
                let pair_code = Arc::new(PrefixCodeFamily::design_with_alphabet(
                    q, pair_bits, l as usize, l as usize, eps,
                )?);
                (
                    InstanceKind::Speaker {
                        variant,
                        x_code,
                        pair_code,
                        reply_len: l,
                        window_len: m,
                    },
                    SymbolUniverse::Coded { q },
                    Box::new(FixedSchedule::new(
                        vec![(Party::Alice, n), (Party::Bob, l), (Party::Alice, m)],
                        None,
                    )),
                    n + l + m,
                )
            }
            ProtocolId::FirstHalf => {
                let growth = lengths::batch_growth_factor(eps).ok_or_else(|| {
                    ProtocolError::BadParams(format!(
                        "epsilon {eps} must equal 1/(C+1) for an integer C >= 2"
                    ))
                })?;
                let y_cap = (1u64 << bits_b) - 1;
                let y_max = params.y_max.unwrap_or(y_cap);
                if y_max > y_cap {
                    return Err(ProtocolError::BadParams(format!(
                        "y_max {y_max} does not fit in {bits_b} bits"
                    )));
                }
                let last_batch = 2 * y_max + 1;
                let batch_lens: Vec<u64> = (0..=last_batch)
                    .map(|j| lengths::batch_len(n, growth, j as u32))
                    .collect::<Option<_>>()
                    .ok_or_else(|| {
                        ProtocolError::BadParams(
                            "batch schedule overflows the simulator bound".into(),
                        )
                    })?;
                let total = lengths::batch_total(n, growth, y_max).ok_or_else(|| {
                    ProtocolError::BadParams("batch schedule overflows the simulator bound".into())
                })?;
                // Largest block Bob ever decodes is Alice's final batch.
                let max_len = batch_lens[last_batch as usize - 1] as usize;
                let code = Arc::new(PrefixCodeFamily::design(bits_a, max_len, n as usize, eps)?);
                let q = code.alphabet().size();
                let phases: Vec<(Party, u64)> = batch_lens
                    .iter()
                    .enumerate()
                    .map(|(j, &len)| {
                        (if j % 2 == 0 { Party::Alice } else { Party::Bob }, len)
                    })
                    .collect();
                (
                    InstanceKind::FirstHalf { code, y_max, batch_lens: Arc::new(batch_lens) },
                    SymbolUniverse::Coded { q },
                    Box::new(FixedSchedule::new(phases, None)),
                    total,
                )
            }
            ProtocolId::FeedbackTernary => {
                if bits_a != bits_b {
                    return Err(ProtocolError::BadParams(format!(
                        "feedback schemes need equal input widths, got {bits_a} and {bits_b} \
                         (pad the shorter input)"
                    )));
                }
                let target = lengths::feedback_target_len(bits_a as u64, eps);
                let cap = lengths::feedback_round_cap(bits_a as u64, eps);
                (
                    InstanceKind::Feedback { target, cap },
                    SymbolUniverse::FeedbackTernary,
                    Box::new(FeedbackSchedule::new(target)),
                    cap,
                )
            }
            ProtocolId::NaiveExchange => {
                let q = PrefixCodeFamily::design_alphabet(bits_a, n as usize, n as usize, eps)?
                    .max(PrefixCodeFamily::design_alphabet(bits_b, n as usize, n as usize, eps)?);
                let a_code = Arc::new(PrefixCodeFamily::design_with_alphabet(
                    q, bits_a, n as usize, n as usize, eps,
                )?);
                let b_code = Arc::new(PrefixCodeFamily::design_with_alphabet(
                    q, bits_b, n as usize, n as usize, eps,
                )?);
                (
                    InstanceKind::NaiveExchange { a_code, b_code },
                    SymbolUniverse::Coded { q },
                    Box::new(FixedSchedule::alice_then_bob(n, n, None)),
                    2 * n,
                )
            }
            ProtocolId::NaiveFeedbackBinary => {
                if bits_a != bits_b {
                    return Err(ProtocolError::BadParams(format!(
                        "feedback schemes need equal input widths, got {bits_a} and {bits_b}"
                    )));
                }
                let rounds = bits_a as u64;
                (
                    InstanceKind::NaiveFeedback,
                    SymbolUniverse::FeedbackBinary,
                    Box::new(FixedSchedule::alice_then_bob(rounds, rounds, None)),
                    2 * rounds,
                )
            }
        };

        Ok(ProtocolInstance {
            params,
            universe,
            model: params.id.default_model(),
            feedback_echo: params.id.is_feedback(),
            schedule,
            round_cap,
            kind,
        })
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    pub fn universe(&self) -> SymbolUniverse {
        self.universe
    }

    /// The accounting model the scheme is analyzed under.
    pub fn model(&self) -> NoiseModel {
        self.model
    }

    pub fn round_cap(&self) -> u64 {
        self.round_cap
    }

    pub fn schedule(&self) -> &dyn SpeakerSchedule {
        &*self.schedule
    }

    pub fn feedback_echo(&self) -> bool {
        self.feedback_echo
    }

    /// The code family protecting Alice's initial block, if the scheme is
    /// coded. Block-targeted attacks calibrate against this.
    pub fn alice_block_code(&self) -> Option<&PrefixCodeFamily> {
        match &self.kind {
            InstanceKind::FullSqrt2 { a_code, .. }
            | InstanceKind::Second27 { a_code, .. }
            | InstanceKind::NaiveExchange { a_code, .. } => Some(a_code),
            InstanceKind::Speaker { x_code, .. } => Some(x_code),
            InstanceKind::FirstHalf { code, .. } => Some(code),
            InstanceKind::Feedback { .. } | InstanceKind::NaiveFeedback => None,
        }
    }

    /// Owned handle to the block family, for adversaries that decode on
    /// their own account.
    pub fn alice_block_code_arc(&self) -> Option<Arc<PrefixCodeFamily>> {
        match &self.kind {
            InstanceKind::FullSqrt2 { a_code, .. }
            | InstanceKind::Second27 { a_code, .. }
            | InstanceKind::NaiveExchange { a_code, .. } => Some(a_code.clone()),
            InstanceKind::Speaker { x_code, .. } => Some(x_code.clone()),
            InstanceKind::FirstHalf { code, .. } => Some(code.clone()),
            InstanceKind::Feedback { .. } | InstanceKind::NaiveFeedback => None,
        }
    }

    /// Length of Alice's initial coded block (N), if the scheme is coded.
    pub fn alice_block_len(&self) -> Option<u64> {
        if self.params.id.is_feedback() {
            None
        } else {
            Some(self.params.block_len)
        }
    }

    /// The code family protecting Bob's reply, if the scheme has one.
    pub fn bob_reply_code(&self) -> Option<&PrefixCodeFamily> {
        match &self.kind {
            InstanceKind::FullSqrt2 { b_code, .. }
            | InstanceKind::Second27 { b_code, .. }
            | InstanceKind::NaiveExchange { b_code, .. } => Some(b_code),
            InstanceKind::Speaker { pair_code, .. } => Some(pair_code),
            _ => None,
        }
    }

    /// The noise fraction the scheme is designed to survive under its
    /// default accounting model; `None` for the naive baselines.
    pub fn claimed_threshold(&self) -> Option<f64> {
        let e = *self.params.epsilon.numer() as f64 / *self.params.epsilon.denom() as f64;
        match self.params.id {
            ProtocolId::FullSqrt2 => Some(1.0 / (2.0 + std::f64::consts::SQRT_2) - 4.0 * e),
            ProtocolId::Second27 => Some(2.0 / 7.0 - e),
            ProtocolId::Speaker720 => Some(7.0 / 20.0 - e),
            ProtocolId::SpeakerGt13 => Some((9.0 - lengths::sqrt57()) / 4.0 - e),
            ProtocolId::FirstHalf | ProtocolId::FeedbackTernary => Some(0.5 - e),
            ProtocolId::NaiveExchange | ProtocolId::NaiveFeedbackBinary => None,
        }
    }

    fn validate_inputs(&self, x: Message, y: Message) -> Result<(), ProtocolError> {
        if x.bits() != self.params.n_a {
            return Err(ProtocolError::InputWidth {
                party: Party::Alice,
                expect: self.params.n_a,
                got: x.bits(),
            });
        }
        if y.bits() != self.params.n_b {
            return Err(ProtocolError::InputWidth {
                party: Party::Bob,
                expect: self.params.n_b,
                got: y.bits(),
            });
        }
        if let InstanceKind::FirstHalf { y_max, .. } = &self.kind {
            if y.value() > *y_max {
                return Err(ProtocolError::InputRange { value: y.value(), cap: *y_max });
            }
        }
        Ok(())
    }

    /// Builds Alice's endpoint; `instr` receives per-run internals.
    pub fn make_alice(
        &self,
        x: Message,
        instr: Option<InstrumentHandle>,
    ) -> Result<Box<dyn Endpoint>, ProtocolError> {
        if x.bits() != self.params.n_a {
            return Err(ProtocolError::InputWidth {
                party: Party::Alice,
                expect: self.params.n_a,
                got: x.bits(),
            });
        }
        let n = self.params.block_len;
        Ok(match &self.kind {
            InstanceKind::FullSqrt2 { a_code, b_code, reply_cap } => {
                Box::new(full_term::SqrtAlice::new(
                    x,
                    a_code.clone(),
                    b_code.clone(),
                    n,
                    *reply_cap,
                    instr,
                ))
            }
            InstanceKind::Second27 { a_code, b_code, reply_cap } => {
                Box::new(second_term::TwoSeventhsAlice::new(
                    x,
                    a_code.clone(),
                    b_code.clone(),
                    n,
                    *reply_cap,
                    instr,
                ))
            }
            InstanceKind::Speaker { variant, x_code, pair_code, reply_len, .. } => {
                Box::new(speaker::SpeakerAlice::new(
                    x,
                    *variant,
                    x_code.clone(),
                    pair_code.clone(),
                    n,
                    *reply_len,
                    self.params.n_a,
                    self.params.n_b,
                    instr,
                ))
            }
            InstanceKind::FirstHalf { code, batch_lens, .. } => {
                Box::new(first_term::BatchAlice::new(
                    x,
                    code.clone(),
                    batch_lens.clone(),
                    self.params.n_b,
                ))
            }
            InstanceKind::Feedback { target, cap } => Box::new(feedback::FeedbackParty::new(
                Party::Alice,
                x,
                self.params.n_a,
                *target,
                *cap,
                instr,
            )),
            InstanceKind::NaiveExchange { a_code, b_code } => {
                Box::new(naive::NaiveAlice::new(x, a_code.clone(), b_code.clone(), n))
            }
            InstanceKind::NaiveFeedback => {
                Box::new(naive::NaiveFeedbackParty::new(Party::Alice, x, self.params.n_a))
            }
        })
    }

    /// Builds Bob's endpoint; `instr` receives per-run internals.
    pub fn make_bob(
        &self,
        y: Message,
        instr: Option<InstrumentHandle>,
    ) -> Result<Box<dyn Endpoint>, ProtocolError> {
        if y.bits() != self.params.n_b {
            return Err(ProtocolError::InputWidth {
                party: Party::Bob,
                expect: self.params.n_b,
                got: y.bits(),
            });
        }
        let n = self.params.block_len;
        Ok(match &self.kind {
            InstanceKind::FullSqrt2 { a_code, b_code, .. } => Box::new(full_term::SqrtBob::new(
                y,
                a_code.clone(),
                b_code.clone(),
                n,
                self.params.epsilon,
                instr,
            )),
            InstanceKind::Second27 { a_code, b_code, .. } => {
                Box::new(second_term::TwoSeventhsBob::new(
                    y,
                    a_code.clone(),
                    b_code.clone(),
                    n,
                    self.params.epsilon,
                    instr,
                ))
            }
            InstanceKind::Speaker { variant, x_code, pair_code, reply_len, window_len } => {
                Box::new(speaker::SpeakerBob::new(
                    y,
                    *variant,
                    x_code.clone(),
                    pair_code.clone(),
                    n,
                    *reply_len,
                    *window_len,
                    instr,
                ))
            }
            InstanceKind::FirstHalf { code, batch_lens, y_max, .. } => {
                if y.value() > *y_max {
                    return Err(ProtocolError::InputRange { value: y.value(), cap: *y_max });
                }
                Box::new(first_term::BatchBob::new(y, code.clone(), batch_lens.clone()))
            }
            InstanceKind::Feedback { target, cap } => Box::new(feedback::FeedbackParty::new(
                Party::Bob,
                y,
                self.params.n_b,
                *target,
                *cap,
                instr,
            )),
            InstanceKind::NaiveExchange { a_code, b_code } => {
                Box::new(naive::NaiveBob::new(y, a_code.clone(), b_code.clone(), n))
            }
            InstanceKind::NaiveFeedback => {
                Box::new(naive::NaiveFeedbackParty::new(Party::Bob, y, self.params.n_b))
            }
        })
    }

    pub fn session(&self) -> Session<'_> {
        Session {
            universe: self.universe,
            schedule: &*self.schedule,
            feedback_echo: self.feedback_echo,
            round_cap: self.round_cap,
        }
    }

    /// Runs one session against the given channel.
    pub fn run(
        &self,
        x: Message,
        y: Message,
        adversary: &mut dyn crate::engine::Adversary,
    ) -> Result<SessionResult, ProtocolError> {
        self.validate_inputs(x, y)?;
        let alice = self.make_alice(x, None)?;
        let bob = self.make_bob(y, None)?;
        Ok(run_session(&self.session(), alice, bob, adversary)?)
    }

    /// Runs one session and returns the endpoints' recorded internals.
    pub fn run_instrumented(
        &self,
        x: Message,
        y: Message,
        adversary: &mut dyn crate::engine::Adversary,
    ) -> Result<(SessionResult, Instruments), ProtocolError> {
        self.validate_inputs(x, y)?;
        let handle: InstrumentHandle = Rc::new(RefCell::new(Instruments::default()));
        let alice = self.make_alice(x, Some(handle.clone()))?;
        let bob = self.make_bob(y, Some(handle.clone()))?;
        let result = run_session(&self.session(), alice, bob, adversary)?;
        let instruments = handle.borrow().clone();
        Ok((result, instruments))
    }

    /// Grades a finished session against the true inputs.
    pub fn judge(&self, x: Message, y: Message, result: &SessionResult) -> ProtocolOutcome {
        let expect = PartyOutput::Pair(x, y);
        let alice_correct = result.alice_output == Some(expect);
        let bob_correct = result.bob_output == Some(expect);
        ProtocolOutcome {
            alice_correct,
            bob_correct,
            correct: alice_correct && bob_correct && !result.truncated,
        }
    }
}

impl EndpointFactory for ProtocolInstance {
    fn alice(&self, x: Message) -> Box<dyn Endpoint> {
        self.make_alice(x, None).expect("factory inputs must be pre-validated")
    }

    fn bob(&self, y: Message) -> Box<dyn Endpoint> {
        self.make_bob(y, None).expect("factory inputs must be pre-validated")
    }
}

/// Maps a delivered symbol to the letter slot a coded listener records:
/// letters as themselves, anything else as an erasure.
pub(crate) fn delivered_letter(sym: crate::engine::ChannelSymbol) -> Option<crate::ecc::Letter> {
    match sym {
        crate::engine::ChannelSymbol::Letter(l) => Some(l),
        _ => None,
    }
}
