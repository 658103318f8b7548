//! Round-by-round session loop and noise accounting.
//!
//! One round has exactly one speaker. The engine asks the scheduled
//! speaker for a symbol, lets the adversary replace it, hands the result
//! to the listener, and (on feedback channels) echoes the delivered symbol
//! back to the speaker. Parties that have terminated emit [`ChannelSymbol::Silence`]
//! and ignore what they hear; the session ends when both have terminated
//! or the round cap truncates it.
//!
//! Noise is measured after the fact from the transcript, under one of four
//! accounting models that differ only in the denominator: rounds until the
//! first termination, until the last, until the last round a live party
//! spoke, or (feedback) until the common termination round.

use crate::ecc::Message;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(&self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

impl std::fmt::Display for Party {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Party::Alice => write!(f, "alice"),
            Party::Bob => write!(f, "bob"),
        }
    }
}

/// One symbol on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChannelSymbol {
    /// A coded-alphabet letter.
    Letter(u16),
    /// What a terminated party "sends"; also the erasure a listener sees.
    Silence,
    /// A feedback-channel bit.
    Bit(u8),
    /// The feedback-channel backspace.
    Rewind,
}

impl std::fmt::Display for ChannelSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChannelSymbol::Letter(l) => write!(f, "L{l}"),
            ChannelSymbol::Silence => write!(f, "~"),
            ChannelSymbol::Bit(b) => write!(f, "B{b}"),
            ChannelSymbol::Rewind => write!(f, "R"),
        }
    }
}

/// The symbols a channel admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymbolUniverse {
    /// Letters `0..q`; deliveries may also be Silence (erasure).
    Coded { q: u32 },
    /// Bits plus Rewind; no silence, termination is common.
    FeedbackTernary,
    /// Bits only; no silence, termination is common.
    FeedbackBinary,
}

impl SymbolUniverse {
    /// Symbols a live speaker may put on the wire.
    pub fn valid_sent(&self, sym: ChannelSymbol) -> bool {
        match (self, sym) {
            (SymbolUniverse::Coded { q }, ChannelSymbol::Letter(l)) => (l as u32) < *q,
            (SymbolUniverse::FeedbackTernary, ChannelSymbol::Bit(b)) => b < 2,
            (SymbolUniverse::FeedbackTernary, ChannelSymbol::Rewind) => true,
            (SymbolUniverse::FeedbackBinary, ChannelSymbol::Bit(b)) => b < 2,
            _ => false,
        }
    }

    /// Symbols the adversary may deliver. Coded channels admit erasure;
    /// feedback channels never carry silence.
    pub fn valid_delivered(&self, sym: ChannelSymbol) -> bool {
        match (self, sym) {
            (SymbolUniverse::Coded { .. }, ChannelSymbol::Silence) => true,
            _ => self.valid_sent(sym),
        }
    }

    /// Every substitution symbol available to the adversary, silence last.
    pub fn deliverable_symbols(&self) -> Vec<ChannelSymbol> {
        match self {
            SymbolUniverse::Coded { q } => {
                let mut v: Vec<ChannelSymbol> =
                    (0..*q as u16).map(ChannelSymbol::Letter).collect();
                v.push(ChannelSymbol::Silence);
                v
            }
            SymbolUniverse::FeedbackTernary => vec![
                ChannelSymbol::Bit(0),
                ChannelSymbol::Bit(1),
                ChannelSymbol::Rewind,
            ],
            SymbolUniverse::FeedbackBinary => {
                vec![ChannelSymbol::Bit(0), ChannelSymbol::Bit(1)]
            }
        }
    }
}

/// What a party commits to when it stops participating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartyOutput {
    /// The party's claim of `(x, y)`.
    Pair(Message, Message),
    /// Deliberate give-up: the party detected noise beyond any guarantee.
    Arbitrary,
}

/// Returned by [`Endpoint::speak`].
pub enum SpeakOutcome {
    Speak(ChannelSymbol),
    /// Send one last symbol and terminate at the end of this round.
    SpeakThenTerminate(ChannelSymbol, PartyOutput),
}

/// Returned by [`Endpoint::listen`] and [`Endpoint::echo`].
pub enum ListenOutcome {
    Continue,
    Terminate(PartyOutput),
}

/// One side of the conversation. Implementations are deterministic state
/// machines driven entirely by what the engine delivers to them.
pub trait Endpoint {
    /// Called when this party is the scheduled speaker and still live.
    fn speak(&mut self, round: u64) -> SpeakOutcome;

    /// Called when the other party spoke; `delivered` is post-adversary.
    fn listen(&mut self, round: u64, delivered: ChannelSymbol) -> ListenOutcome;

    /// Feedback channels only: the speaker observes what was delivered.
    fn echo(&mut self, _round: u64, _delivered: ChannelSymbol) -> ListenOutcome {
        ListenOutcome::Continue
    }
}

/// Builds fresh endpoints for given inputs. Counterfactual adversaries use
/// this to run a victim's protocol against hypothetical inputs.
pub trait EndpointFactory {
    fn alice(&self, x: Message) -> Box<dyn Endpoint>;
    fn bob(&self, y: Message) -> Box<dyn Endpoint>;
}

/// Wraps an endpoint with termination bookkeeping: silence after
/// termination, delivered symbols ignored after termination.
pub struct EndpointRunner {
    endpoint: Box<dyn Endpoint>,
    term_round: Option<u64>,
    output: Option<PartyOutput>,
}

impl EndpointRunner {
    pub fn new(endpoint: Box<dyn Endpoint>) -> EndpointRunner {
        EndpointRunner { endpoint, term_round: None, output: None }
    }

    pub fn terminated(&self) -> bool {
        self.term_round.is_some()
    }

    /// Round at whose end the party terminated; it was live during it.
    pub fn term_round(&self) -> Option<u64> {
        self.term_round
    }

    pub fn output(&self) -> Option<PartyOutput> {
        self.output
    }

    fn record_termination(&mut self, round: u64, output: PartyOutput) {
        self.term_round = Some(round);
        self.output = Some(output);
    }

    pub fn speak(&mut self, round: u64) -> ChannelSymbol {
        if self.terminated() {
            return ChannelSymbol::Silence;
        }
        match self.endpoint.speak(round) {
            SpeakOutcome::Speak(sym) => sym,
            SpeakOutcome::SpeakThenTerminate(sym, out) => {
                self.record_termination(round, out);
                sym
            }
        }
    }

    pub fn listen(&mut self, round: u64, delivered: ChannelSymbol) {
        if self.terminated() {
            return;
        }
        if let ListenOutcome::Terminate(out) = self.endpoint.listen(round, delivered) {
            self.record_termination(round, out);
        }
    }

    pub fn echo(&mut self, round: u64, delivered: ChannelSymbol) {
        if self.terminated() {
            return;
        }
        if let ListenOutcome::Terminate(out) = self.endpoint.echo(round, delivered) {
            self.record_termination(round, out);
        }
    }
}

/// Who speaks in a given round. `history` is the completed transcript
/// prefix, so adaptive schedules may depend on delivered symbols only.
pub trait SpeakerSchedule {
    fn speaker(&self, round: u64, history: &[RoundRecord]) -> Option<Party>;
}

/// Consecutive phases of fixed length, then an optional perpetual tail.
pub struct FixedSchedule {
    phases: Vec<(Party, u64)>,
    tail: Option<Party>,
}

impl FixedSchedule {
    pub fn new(phases: Vec<(Party, u64)>, tail: Option<Party>) -> FixedSchedule {
        FixedSchedule { phases, tail }
    }

    /// Alice for `n` rounds, then Bob for `m`, then the tail.
    pub fn alice_then_bob(n: u64, m: u64, tail: Option<Party>) -> FixedSchedule {
        FixedSchedule::new(vec![(Party::Alice, n), (Party::Bob, m)], tail)
    }

    pub fn total_declared(&self) -> u64 {
        self.phases.iter().map(|(_, len)| len).sum()
    }
}

impl SpeakerSchedule for FixedSchedule {
    fn speaker(&self, round: u64, _history: &[RoundRecord]) -> Option<Party> {
        let mut upto = 0u64;
        for &(party, len) in &self.phases {
            upto += len;
            if round <= upto {
                return Some(party);
            }
        }
        self.tail
    }
}

/// One executed round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    /// 1-based round index.
    pub round: u64,
    pub speaker: Party,
    pub sent: ChannelSymbol,
    pub delivered: ChannelSymbol,
    /// `sent != delivered`.
    pub corrupted: bool,
}

/// The channel: sees the sent symbol and full history, returns what the
/// listener hears. `deliver` is called exactly once per round in order.
pub trait Adversary {
    fn deliver(
        &mut self,
        round: u64,
        speaker: Party,
        sent: ChannelSymbol,
        history: &[RoundRecord],
    ) -> ChannelSymbol;
}

/// Delivers every symbol unchanged.
pub struct PassthroughChannel;

impl Adversary for PassthroughChannel {
    fn deliver(
        &mut self,
        _round: u64,
        _speaker: Party,
        sent: ChannelSymbol,
        _history: &[RoundRecord],
    ) -> ChannelSymbol {
        sent
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SessionError {
    #[error("round {round}: {speaker} sent {symbol} which the universe does not admit")]
    InvalidSent { round: u64, speaker: Party, symbol: String },
    #[error("round {round}: adversary delivered {symbol} which the universe does not admit")]
    InvalidDelivered { round: u64, symbol: String },
    #[error(
        "feedback session lost common termination at round {round} \
         (alice: {alice_term:?}, bob: {bob_term:?})"
    )]
    SplitTermination { round: u64, alice_term: Option<u64>, bob_term: Option<u64> },
    #[error("no speaker scheduled for round {round}")]
    ScheduleExhausted { round: u64 },
}

/// Static description of how a session runs.
pub struct Session<'a> {
    pub universe: SymbolUniverse,
    pub schedule: &'a dyn SpeakerSchedule,
    /// Echo delivered symbols back to the speaker (feedback channels).
    pub feedback_echo: bool,
    /// Hard stop; a session cut off here is marked truncated.
    pub round_cap: u64,
}

/// Everything a finished session produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionResult {
    pub rounds: Vec<RoundRecord>,
    pub alice_term: Option<u64>,
    pub bob_term: Option<u64>,
    pub alice_output: Option<PartyOutput>,
    pub bob_output: Option<PartyOutput>,
    /// The round cap fired before both parties terminated.
    pub truncated: bool,
}

pub fn run_session(
    session: &Session,
    alice: Box<dyn Endpoint>,
    bob: Box<dyn Endpoint>,
    adversary: &mut dyn Adversary,
) -> Result<SessionResult, SessionError> {
    let mut alice = EndpointRunner::new(alice);
    let mut bob = EndpointRunner::new(bob);
    let mut rounds: Vec<RoundRecord> = Vec::new();
    let mut truncated = false;
    let mut round: u64 = 0;
    loop {
        if alice.terminated() && bob.terminated() {
            break;
        }
        if round == session.round_cap {
            truncated = true;
            break;
        }
        round += 1;
        let speaker_party = session
            .schedule
            .speaker(round, &rounds)
            .ok_or(SessionError::ScheduleExhausted { round })?;
        let (speaker, listener) = match speaker_party {
            Party::Alice => (&mut alice, &mut bob),
            Party::Bob => (&mut bob, &mut alice),
        };
        let live_before = !speaker.terminated();
        let sent = speaker.speak(round);
        if live_before && !session.universe.valid_sent(sent) {
            return Err(SessionError::InvalidSent {
                round,
                speaker: speaker_party,
                symbol: sent.to_string(),
            });
        }
        let delivered = adversary.deliver(round, speaker_party, sent, &rounds);
        if !session.universe.valid_delivered(delivered) {
            return Err(SessionError::InvalidDelivered { round, symbol: delivered.to_string() });
        }
        listener.listen(round, delivered);
        if session.feedback_echo {
            speaker.echo(round, delivered);
        }
        rounds.push(RoundRecord {
            round,
            speaker: speaker_party,
            sent,
            delivered,
            corrupted: sent != delivered,
        });
        if session.feedback_echo && alice.terminated() != bob.terminated() {
            return Err(SessionError::SplitTermination {
                round,
                alice_term: alice.term_round(),
                bob_term: bob.term_round(),
            });
        }
    }
    Ok(SessionResult {
        rounds,
        alice_term: alice.term_round(),
        bob_term: bob.term_round(),
        alice_output: alice.output(),
        bob_output: bob.output(),
        truncated,
    })
}

/// How the denominator of the noise rate is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseModel {
    /// Rounds until the first party terminates.
    FirstTermination,
    /// Rounds until the last party terminates.
    FullTermination,
    /// Rounds until the last round in which a live party spoke.
    SpeakerTermination,
    /// Rounds until the common termination round; requires both parties to
    /// terminate together.
    Feedback,
}

impl std::fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            NoiseModel::FirstTermination => "first_termination",
            NoiseModel::FullTermination => "full_termination",
            NoiseModel::SpeakerTermination => "speaker_termination",
            NoiseModel::Feedback => "feedback",
        };
        write!(f, "{name}")
    }
}

/// Corruption count over the model's denominator window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseAccounting {
    pub corruptions: u64,
    pub denominator: u64,
    pub model: NoiseModel,
}

impl NoiseAccounting {
    pub fn rate(&self) -> Ratio<u64> {
        Ratio::new(self.corruptions, self.denominator.max(1))
    }
}

/// Measures the transcript's noise rate under `model`. Parties that never
/// terminated (truncated sessions) are accounted as if they terminated at
/// the last executed round.
pub fn noise_rate(result: &SessionResult, model: NoiseModel) -> Result<NoiseAccounting, SessionError> {
    let executed = result.rounds.len() as u64;
    let a = result.alice_term.unwrap_or(executed);
    let b = result.bob_term.unwrap_or(executed);
    let denominator = match model {
        NoiseModel::FirstTermination => a.min(b),
        NoiseModel::FullTermination => a.max(b),
        NoiseModel::SpeakerTermination => result
            .rounds
            .iter()
            .rev()
            .find(|r| r.sent != ChannelSymbol::Silence)
            .map_or(0, |r| r.round),
        NoiseModel::Feedback => {
            if result.alice_term != result.bob_term {
                return Err(SessionError::SplitTermination {
                    round: executed,
                    alice_term: result.alice_term,
                    bob_term: result.bob_term,
                });
            }
            a
        }
    };
    let corruptions = result
        .rounds
        .iter()
        .filter(|r| r.corrupted && r.round <= denominator)
        .count() as u64;
    Ok(NoiseAccounting { corruptions, denominator, model })
}

fn output_line(label: &str, output: &Option<PartyOutput>) -> String {
    match output {
        None => format!("{label}=?"),
        Some(PartyOutput::Arbitrary) => format!("{label}=arbitrary"),
        Some(PartyOutput::Pair(x, y)) => format!("{label}=({x},{y})"),
    }
}

/// Canonical one-line-per-round rendering; the replay hash is over this.
pub fn transcript_lines(result: &SessionResult) -> String {
    let mut out = String::new();
    for r in &result.rounds {
        let mark = if r.corrupted { " *" } else { "" };
        out.push_str(&format!(
            "r={:04} s={} sent={} recv={}{}\n",
            r.round, r.speaker, r.sent, r.delivered, mark
        ));
    }
    out.push_str(&format!(
        "alice_term={:?} bob_term={:?} truncated={} {} {}\n",
        result.alice_term,
        result.bob_term,
        result.truncated,
        output_line("alice_out", &result.alice_output),
        output_line("bob_out", &result.bob_output),
    ));
    out
}

/// Hex SHA-256 of [`transcript_lines`].
pub fn transcript_hash(result: &SessionResult) -> String {
    let mut hasher = Sha256::new();
    hasher.update(transcript_lines(result).as_bytes());
    hex::encode(hasher.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecc::Message;

    /// Speaks `count` letters then terminates with an output; listens
    /// passively. Exercises the runner and accounting paths.
    struct Chatter {
        letters_left: u64,
        output: PartyOutput,
    }

    impl Endpoint for Chatter {
        fn speak(&mut self, _round: u64) -> SpeakOutcome {
            self.letters_left -= 1;
            if self.letters_left == 0 {
                SpeakOutcome::SpeakThenTerminate(ChannelSymbol::Letter(1), self.output)
            } else {
                SpeakOutcome::Speak(ChannelSymbol::Letter(1))
            }
        }

        fn listen(&mut self, _round: u64, _delivered: ChannelSymbol) -> ListenOutcome {
            ListenOutcome::Continue
        }
    }

    /// Terminates as soon as it hears `stop_at` delivered symbols.
    struct CountingListener {
        heard: u64,
        stop_at: u64,
    }

    impl Endpoint for CountingListener {
        fn speak(&mut self, _round: u64) -> SpeakOutcome {
            SpeakOutcome::Speak(ChannelSymbol::Letter(0))
        }

        fn listen(&mut self, _round: u64, _delivered: ChannelSymbol) -> ListenOutcome {
            self.heard += 1;
            if self.heard >= self.stop_at {
                ListenOutcome::Terminate(PartyOutput::Arbitrary)
            } else {
                ListenOutcome::Continue
            }
        }
    }

    fn pair_output() -> PartyOutput {
        PartyOutput::Pair(Message::new(3, 4).unwrap(), Message::new(5, 4).unwrap())
    }

    #[test]
    fn session_runs_until_both_terminate() {
        // Alice speaks 4 rounds then terminates; Bob terminates after
        // hearing 4 symbols in the same rounds.
        let schedule = FixedSchedule::new(vec![(Party::Alice, 10)], Some(Party::Bob));
        let session = Session {
            universe: SymbolUniverse::Coded { q: 8 },
            schedule: &schedule,
            feedback_echo: false,
            round_cap: 100,
        };
        let alice = Box::new(Chatter { letters_left: 4, output: pair_output() });
        let bob = Box::new(CountingListener { heard: 0, stop_at: 4 });
        let result =
            run_session(&session, alice, bob, &mut PassthroughChannel).unwrap();
        assert_eq!(result.rounds.len(), 4);
        assert_eq!(result.alice_term, Some(4));
        assert_eq!(result.bob_term, Some(4));
        assert!(!result.truncated);
        assert_eq!(result.alice_output, Some(pair_output()));
        assert_eq!(result.bob_output, Some(PartyOutput::Arbitrary));
        assert!(result.rounds.iter().all(|r| !r.corrupted));
    }

    #[test]
    fn terminated_speaker_goes_silent_and_cap_truncates() {
        // Alice terminates at round 2; Bob never does. Alice's later
        // scheduled rounds carry silence until the cap fires.
        let schedule = FixedSchedule::new(vec![(Party::Alice, 6)], None);
        let session = Session {
            universe: SymbolUniverse::Coded { q: 8 },
            schedule: &schedule,
            feedback_echo: false,
            round_cap: 6,
        };
        let alice = Box::new(Chatter { letters_left: 2, output: pair_output() });
        let bob = Box::new(CountingListener { heard: 0, stop_at: 99 });
        let result =
            run_session(&session, alice, bob, &mut PassthroughChannel).unwrap();
        assert!(result.truncated);
        assert_eq!(result.rounds.len(), 6);
        assert_eq!(result.alice_term, Some(2));
        assert_eq!(result.bob_term, None);
        for r in &result.rounds[2..] {
            assert_eq!(r.sent, ChannelSymbol::Silence);
        }
    }

    /// Corrupts a fixed set of rounds by substituting letter 7.
    struct FixedCorruptor(Vec<u64>);

    impl Adversary for FixedCorruptor {
        fn deliver(
            &mut self,
            round: u64,
            _speaker: Party,
            sent: ChannelSymbol,
            _history: &[RoundRecord],
        ) -> ChannelSymbol {
            if self.0.contains(&round) {
                ChannelSymbol::Letter(7)
            } else {
                sent
            }
        }
    }

    #[test]
    fn accounting_windows_differ_by_model() {
        // Alice terminates at 10, Bob at 20; corruptions at rounds
        // {2, 5, 9, 12, 15}. First-termination counts 3 over 10; full
        // counts 5 over 20.
        let schedule = FixedSchedule::new(vec![(Party::Alice, 10)], Some(Party::Bob));
        let session = Session {
            universe: SymbolUniverse::Coded { q: 8 },
            schedule: &schedule,
            feedback_echo: false,
            round_cap: 100,
        };
        let alice = Box::new(Chatter { letters_left: 10, output: pair_output() });
        let bob = Box::new(Chatter { letters_left: 10, output: pair_output() });
        let mut adversary = FixedCorruptor(vec![2, 5, 9, 12, 15]);
        let result = run_session(&session, alice, bob, &mut adversary).unwrap();
        assert_eq!((result.alice_term, result.bob_term), (Some(10), Some(20)));

        let first = noise_rate(&result, NoiseModel::FirstTermination).unwrap();
        assert_eq!((first.corruptions, first.denominator), (3, 10));
        assert_eq!(first.rate(), Ratio::new(3, 10));

        let full = noise_rate(&result, NoiseModel::FullTermination).unwrap();
        assert_eq!((full.corruptions, full.denominator), (5, 20));

        // A live party spoke in every round here, so the speaker window
        // matches the full window.
        let speaker = noise_rate(&result, NoiseModel::SpeakerTermination).unwrap();
        assert_eq!((speaker.corruptions, speaker.denominator), (5, 20));

        // Unequal termination rounds are not a feedback execution.
        assert!(matches!(
            noise_rate(&result, NoiseModel::Feedback),
            Err(SessionError::SplitTermination { .. })
        ));
    }

    #[test]
    fn speaker_window_stops_at_last_live_symbol() {
        // Alice speaks 3 rounds and terminates; Bob (listener only in this
        // schedule) stops at round 5; rounds 4-5 carry silence. The
        // speaker-termination denominator stays at 3 even though round 5
        // silence was corrupted into a letter.
        let schedule = FixedSchedule::new(vec![(Party::Alice, 6)], None);
        let session = Session {
            universe: SymbolUniverse::Coded { q: 8 },
            schedule: &schedule,
            feedback_echo: false,
            round_cap: 6,
        };
        let alice = Box::new(Chatter { letters_left: 3, output: pair_output() });
        let bob = Box::new(CountingListener { heard: 0, stop_at: 5 });
        let mut adversary = FixedCorruptor(vec![5]);
        let result = run_session(&session, alice, bob, &mut adversary).unwrap();
        assert_eq!(result.bob_term, Some(5));
        let acc = noise_rate(&result, NoiseModel::SpeakerTermination).unwrap();
        assert_eq!((acc.corruptions, acc.denominator), (0, 3));
        // Full-termination still sees the round-5 corruption.
        let full = noise_rate(&result, NoiseModel::FullTermination).unwrap();
        assert_eq!((full.corruptions, full.denominator), (1, 5));
    }

    #[test]
    fn invalid_symbols_are_rejected() {
        struct BadSpeaker;
        impl Endpoint for BadSpeaker {
            fn speak(&mut self, _round: u64) -> SpeakOutcome {
                SpeakOutcome::Speak(ChannelSymbol::Letter(9))
            }
            fn listen(&mut self, _round: u64, _d: ChannelSymbol) -> ListenOutcome {
                ListenOutcome::Continue
            }
        }
        let schedule = FixedSchedule::new(vec![(Party::Alice, 4)], None);
        let session = Session {
            universe: SymbolUniverse::Coded { q: 8 },
            schedule: &schedule,
            feedback_echo: false,
            round_cap: 4,
        };
        let bob = Box::new(CountingListener { heard: 0, stop_at: 9 });
        let err = run_session(&session, Box::new(BadSpeaker), bob, &mut PassthroughChannel)
            .unwrap_err();
        assert!(matches!(err, SessionError::InvalidSent { round: 1, .. }));

        // An adversary may erase on coded channels but not on feedback ones.
        assert!(SymbolUniverse::Coded { q: 8 }.valid_delivered(ChannelSymbol::Silence));
        assert!(!SymbolUniverse::FeedbackTernary.valid_delivered(ChannelSymbol::Silence));
        assert!(!SymbolUniverse::FeedbackBinary.valid_delivered(ChannelSymbol::Rewind));
    }

    #[test]
    fn transcript_hash_is_stable_and_sensitive() {
        let schedule = FixedSchedule::new(vec![(Party::Alice, 10)], Some(Party::Bob));
        let session = Session {
            universe: SymbolUniverse::Coded { q: 8 },
            schedule: &schedule,
            feedback_echo: false,
            round_cap: 100,
        };
        let mk = || {
            run_session(
                &session,
                Box::new(Chatter { letters_left: 4, output: pair_output() }),
                Box::new(CountingListener { heard: 0, stop_at: 4 }),
                &mut PassthroughChannel,
            )
            .unwrap()
        };
        let a = mk();
        let b = mk();
        assert_eq!(transcript_hash(&a), transcript_hash(&b));

        let mut adversary = FixedCorruptor(vec![1]);
        let c = run_session(
            &session,
            Box::new(Chatter { letters_left: 4, output: pair_output() }),
            Box::new(CountingListener { heard: 0, stop_at: 4 }),
            &mut adversary,
        )
        .unwrap();
        assert_ne!(transcript_hash(&a), transcript_hash(&c));
        assert!(transcript_lines(&c).contains(" *"));
    }

    #[test]
    fn schedule_phases_and_tail() {
        let s = FixedSchedule::new(vec![(Party::Alice, 3), (Party::Bob, 2)], Some(Party::Alice));
        assert_eq!(s.speaker(1, &[]), Some(Party::Alice));
        assert_eq!(s.speaker(3, &[]), Some(Party::Alice));
        assert_eq!(s.speaker(4, &[]), Some(Party::Bob));
        assert_eq!(s.speaker(5, &[]), Some(Party::Bob));
        assert_eq!(s.speaker(6, &[]), Some(Party::Alice));
        assert_eq!(s.total_declared(), 5);
        let no_tail = FixedSchedule::new(vec![(Party::Bob, 1)], None);
        assert_eq!(no_tail.speaker(2, &[]), None);
    }
}
