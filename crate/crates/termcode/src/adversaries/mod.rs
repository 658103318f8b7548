//! Channel attacks: scripted strategies aimed at a protocol's decision
//! rules, plus seeded random and rate-capped budgeted channels.
//!
//! Everything here implements the engine's [`Adversary`] contract, and a
//! corruption is only counted when the delivered symbol actually differs
//! from the sent one — steering a round that already carries the desired
//! symbol is free. The counterfactual attacks ([`AlternatingInputs`],
//! [`MajorityBit`]) run private copies of a party's endpoint against
//! hypothetical inputs; the copies are fed from the session's *recorded*
//! delivered history, so they stay faithful even when an outer wrapper
//! such as [`Paced`] overrides the attack's choices.

use std::sync::Arc;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::ecc::{EccError, Letter, Message, PrefixCodeFamily, ReceivedWord};
use crate::engine::{
    noise_rate, Adversary, ChannelSymbol, EndpointRunner, NoiseAccounting, NoiseModel, Party,
    PartyOutput, RoundRecord, SessionResult, SymbolUniverse,
};
use crate::protocols::{ProtocolError, ProtocolInstance};

pub use crate::engine::PassthroughChannel;

#[derive(Debug, Error)]
pub enum AdversaryError {
    #[error("budget fraction {0} must lie in [0, 1)")]
    BadFraction(Ratio<u64>),
    #[error("the target scheme has no initial coded block")]
    NotCoded,
    #[error("attack requires a binary feedback channel")]
    NotBinaryFeedback,
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Ecc(#[from] EccError),
}

/// Corrupts Bernoulli-chosen rounds to uniformly chosen wrong symbols,
/// hard-paced so the corruption count through round `r` never exceeds
/// `fraction * r`. The current round index lower-bounds every accounting
/// model's denominator, so a paced run can never exceed the budget under
/// any of them.
pub struct RandomBudgeted {
    fraction: Ratio<u64>,
    rng: ChaCha8Rng,
    symbols: Vec<ChannelSymbol>,
    corruptions: u64,
}

impl RandomBudgeted {
    pub fn new(
        universe: SymbolUniverse,
        fraction: Ratio<u64>,
        seed: u64,
    ) -> Result<RandomBudgeted, AdversaryError> {
        if fraction >= Ratio::from_integer(1) {
            return Err(AdversaryError::BadFraction(fraction));
        }
        Ok(RandomBudgeted {
            fraction,
            rng: ChaCha8Rng::seed_from_u64(seed),
            symbols: universe.deliverable_symbols(),
            corruptions: 0,
        })
    }

    pub fn corruptions(&self) -> u64 {
        self.corruptions
    }
}

impl Adversary for RandomBudgeted {
    fn deliver(
        &mut self,
        round: u64,
        _speaker: Party,
        sent: ChannelSymbol,
        _history: &[RoundRecord],
    ) -> ChannelSymbol {
        let (p, q) = (*self.fraction.numer(), *self.fraction.denom());
        if p == 0 || self.rng.gen_range(0..q) >= p {
            return sent;
        }
        // Corrupting now must keep (c + 1) / round <= p / q.
        if (self.corruptions + 1) * q > p * round {
            return sent;
        }
        let n = self.symbols.len();
        let choice = match self.symbols.iter().position(|s| *s == sent) {
            // Uniform over the other n-1 symbols: draw from 0..n-1 and remap
            // a hit on the sent symbol's slot to the excluded last slot.
            Some(i) => {
                let j = self.rng.gen_range(0..n - 1);
                self.symbols[if j == i { n - 1 } else { j }]
            }
            None => self.symbols[self.rng.gen_range(0..n)],
        };
        self.corruptions += 1;
        choice
    }
}

/// Rate- and count-caps any inner channel: a corruption the caps do not
/// allow is suppressed by delivering the sent symbol unchanged. Pacing is
/// against the current round index, as in [`RandomBudgeted`].
pub struct Paced<A> {
    inner: A,
    cap: Ratio<u64>,
    max_corruptions: Option<u64>,
    corruptions: u64,
}

impl<A: Adversary> Paced<A> {
    pub fn new(inner: A, cap: Ratio<u64>) -> Paced<A> {
        Paced { inner, cap, max_corruptions: None, corruptions: 0 }
    }

    pub fn with_max_corruptions(mut self, max: u64) -> Paced<A> {
        self.max_corruptions = Some(max);
        self
    }

    pub fn corruptions(&self) -> u64 {
        self.corruptions
    }

    pub fn inner(&self) -> &A {
        &self.inner
    }
}

impl<A: Adversary> Adversary for Paced<A> {
    fn deliver(
        &mut self,
        round: u64,
        speaker: Party,
        sent: ChannelSymbol,
        history: &[RoundRecord],
    ) -> ChannelSymbol {
        let want = self.inner.deliver(round, speaker, sent, history);
        if want == sent {
            return sent;
        }
        if self.max_corruptions.is_some_and(|m| self.corruptions >= m) {
            return sent;
        }
        let (p, q) = (*self.cap.numer(), *self.cap.denom());
        if (self.corruptions + 1) * q > p * round {
            return sent;
        }
        self.corruptions += 1;
        want
    }
}

/// Rewrites Alice's initial block so the listener hears two codewords
/// interleaved: even positions from `x0`, odd positions from `x1`. The
/// mixture sits near half the code distance from *both* inputs, wrecking
/// the residual of any decode of the block — and when Alice really holds
/// `x0`, only the odd positions cost anything, at most `⌈N/2⌉` changes.
pub struct HalfSplit {
    script: Vec<Letter>,
    corruptions: u64,
}

impl HalfSplit {
    pub fn new(
        instance: &ProtocolInstance,
        x0: Message,
        x1: Message,
    ) -> Result<HalfSplit, AdversaryError> {
        let code = instance.alice_block_code().ok_or(AdversaryError::NotCoded)?;
        let n = instance.alice_block_len().ok_or(AdversaryError::NotCoded)? as usize;
        let mut script = Vec::with_capacity(n);
        for pos in 1..=n {
            let from = if pos % 2 == 0 { &x0 } else { &x1 };
            script.push(code.letter_at(from, pos)?);
        }
        Ok(HalfSplit { script, corruptions: 0 })
    }

    pub fn corruptions(&self) -> u64 {
        self.corruptions
    }
}

impl Adversary for HalfSplit {
    fn deliver(
        &mut self,
        round: u64,
        speaker: Party,
        sent: ChannelSymbol,
        _history: &[RoundRecord],
    ) -> ChannelSymbol {
        if speaker != Party::Alice {
            return sent;
        }
        let Some(&letter) = self.script.get(round as usize - 1) else {
            return sent;
        };
        let delivered = ChannelSymbol::Letter(letter);
        if delivered != sent {
            self.corruptions += 1;
        }
        delivered
    }
}

/// Replaces the attacked party's outgoing symbols with those of two
/// counterfactual copies of it holding `first` and `second`: its odd
/// speaking rounds carry the `first` copy's symbol, even rounds the
/// `second` copy's. When the party really holds `first`, only even rounds
/// can differ from what it sent — at most half its speaking rounds — yet
/// the listener's view is identical whichever of the two inputs the party
/// holds, so its decision cannot be right in both worlds.
pub struct AlternatingInputs {
    party: Party,
    copies: [EndpointRunner; 2],
    feedback: bool,
    seen: usize,
    spoken: u64,
    corruptions: u64,
}

impl AlternatingInputs {
    pub fn new(
        instance: &ProtocolInstance,
        party: Party,
        first: Message,
        second: Message,
    ) -> Result<AlternatingInputs, AdversaryError> {
        let build = |input: Message| -> Result<EndpointRunner, ProtocolError> {
            let endpoint = match party {
                Party::Alice => instance.make_alice(input, None)?,
                Party::Bob => instance.make_bob(input, None)?,
            };
            Ok(EndpointRunner::new(endpoint))
        };
        Ok(AlternatingInputs {
            party,
            copies: [build(first)?, build(second)?],
            feedback: instance.feedback_echo(),
            seen: 0,
            spoken: 0,
            corruptions: 0,
        })
    }

    pub fn corruptions(&self) -> u64 {
        self.corruptions
    }

    /// Feed the copies every completed round they have not processed yet,
    /// from the recorded delivered history.
    fn sync(&mut self, history: &[RoundRecord]) {
        while self.seen < history.len() {
            let rec = history[self.seen];
            self.seen += 1;
            for copy in &mut self.copies {
                if rec.speaker == self.party {
                    if self.feedback {
                        copy.echo(rec.round, rec.delivered);
                    }
                } else {
                    copy.listen(rec.round, rec.delivered);
                }
            }
        }
    }
}

impl Adversary for AlternatingInputs {
    fn deliver(
        &mut self,
        round: u64,
        speaker: Party,
        sent: ChannelSymbol,
        history: &[RoundRecord],
    ) -> ChannelSymbol {
        self.sync(history);
        if speaker != self.party {
            return sent;
        }
        self.spoken += 1;
        let symbols = [self.copies[0].speak(round), self.copies[1].speak(round)];
        let want = if self.spoken % 2 == 1 { symbols[0] } else { symbols[1] };
        // A terminated copy falls silent, and feedback channels cannot
        // carry silence: the honest symbol stands in.
        let delivered =
            if want == ChannelSymbol::Silence && self.feedback { sent } else { want };
        if delivered != sent {
            self.corruptions += 1;
        }
        delivered
    }
}

/// Feeds the victim a fixed delivered-symbol script on every round it
/// listens to the other party, regardless of what was actually sent. A
/// script harvested from a reference run walks the victim to that run's
/// termination point; only positions where the live symbols differ from
/// the script cost corruptions.
pub struct ForceTerminate {
    victim: Party,
    script: Vec<ChannelSymbol>,
    next: usize,
    corruptions: u64,
    exhausted: bool,
}

impl ForceTerminate {
    pub fn new(victim: Party, script: Vec<ChannelSymbol>) -> ForceTerminate {
        ForceTerminate { victim, script, next: 0, corruptions: 0, exhausted: false }
    }

    pub fn corruptions(&self) -> u64 {
        self.corruptions
    }

    /// True once a listening round ran past the end of the script: from
    /// there the attack could no longer steer and fell back to honesty.
    pub fn incomplete(&self) -> bool {
        self.exhausted
    }
}

impl Adversary for ForceTerminate {
    fn deliver(
        &mut self,
        _round: u64,
        speaker: Party,
        sent: ChannelSymbol,
        _history: &[RoundRecord],
    ) -> ChannelSymbol {
        if speaker == self.victim {
            return sent;
        }
        let Some(&sym) = self.script.get(self.next) else {
            self.exhausted = true;
            return sent;
        };
        self.next += 1;
        if sym != sent {
            self.corruptions += 1;
        }
        sym
    }
}

/// The delivered symbols `victim` heard from the other party in a finished
/// run, in order — the script that walks the same victim to the same end.
pub fn harvest_view(result: &SessionResult, victim: Party) -> Vec<ChannelSymbol> {
    result
        .rounds
        .iter()
        .filter(|r| r.speaker != victim)
        .map(|r| r.delivered)
        .collect()
}

/// Binary-feedback attack: runs three counterfactual copies of each side
/// and always delivers the majority bit among the scheduled side's three
/// candidate symbols. At most one candidate per round disagrees with the
/// majority, so the per-candidate disagreement counters — `X_i` for the
/// Alice candidates, `Y_i` for the Bob candidates — sum to at most the
/// round count, which leaves some input pair's combined counters under a
/// third of it at every prefix.
pub struct MajorityBit {
    alices: [EndpointRunner; 3],
    bobs: [EndpointRunner; 3],
    x_counts: [u64; 3],
    y_counts: [u64; 3],
    per_round: Vec<([u64; 3], [u64; 3])>,
    seen: usize,
    corruptions: u64,
}

impl MajorityBit {
    pub fn new(
        instance: &ProtocolInstance,
        alice_inputs: [Message; 3],
        bob_inputs: [Message; 3],
    ) -> Result<MajorityBit, AdversaryError> {
        if instance.universe() != SymbolUniverse::FeedbackBinary {
            return Err(AdversaryError::NotBinaryFeedback);
        }
        let alice = |m: Message| instance.make_alice(m, None).map(EndpointRunner::new);
        let bob = |m: Message| instance.make_bob(m, None).map(EndpointRunner::new);
        Ok(MajorityBit {
            alices: [alice(alice_inputs[0])?, alice(alice_inputs[1])?, alice(alice_inputs[2])?],
            bobs: [bob(bob_inputs[0])?, bob(bob_inputs[1])?, bob(bob_inputs[2])?],
            x_counts: [0; 3],
            y_counts: [0; 3],
            per_round: Vec::new(),
            seen: 0,
            corruptions: 0,
        })
    }

    /// Final (alice-side, bob-side) disagreement counters.
    pub fn counters(&self) -> ([u64; 3], [u64; 3]) {
        (self.x_counts, self.y_counts)
    }

    /// Counter snapshots after each round, for prefix-bound checks.
    pub fn counter_history(&self) -> &[([u64; 3], [u64; 3])] {
        &self.per_round
    }

    pub fn corruptions(&self) -> u64 {
        self.corruptions
    }

    fn sync(&mut self, history: &[RoundRecord]) {
        while self.seen < history.len() {
            let rec = history[self.seen];
            self.seen += 1;
            let (speaking, listening) = match rec.speaker {
                Party::Alice => (&mut self.alices, &mut self.bobs),
                Party::Bob => (&mut self.bobs, &mut self.alices),
            };
            for copy in speaking {
                copy.echo(rec.round, rec.delivered);
            }
            for copy in listening {
                copy.listen(rec.round, rec.delivered);
            }
        }
    }
}

impl Adversary for MajorityBit {
    fn deliver(
        &mut self,
        round: u64,
        speaker: Party,
        sent: ChannelSymbol,
        history: &[RoundRecord],
    ) -> ChannelSymbol {
        self.sync(history);
        let candidates = match speaker {
            Party::Alice => &mut self.alices,
            Party::Bob => &mut self.bobs,
        };
        let mut bits = [0u8; 3];
        for (i, copy) in candidates.iter_mut().enumerate() {
            match copy.speak(round) {
                ChannelSymbol::Bit(b) => bits[i] = b & 1,
                // A terminated copy cannot vote; leave the round honest.
                _ => return sent,
            }
        }
        let ones = bits.iter().filter(|b| **b == 1).count();
        let majority = u8::from(ones >= 2);
        let counts = match speaker {
            Party::Alice => &mut self.x_counts,
            Party::Bob => &mut self.y_counts,
        };
        for i in 0..3 {
            if bits[i] != majority {
                counts[i] += 1;
            }
        }
        self.per_round.push((self.x_counts, self.y_counts));
        let delivered = ChannelSymbol::Bit(majority);
        if delivered != sent {
            self.corruptions += 1;
        }
        delivered
    }
}

/// Minimal-cost push of the listener's block decode toward `target`:
/// round by round it rewrites Alice's block letter to `target`'s codeword
/// until leaving the rest honest would already decode to `target`, then
/// goes quiet. An optional budget stops it early, reported as incomplete.
pub struct GreedyDecodeFlip {
    code: Arc<PrefixCodeFamily>,
    block_len: usize,
    honest: Vec<Letter>,
    lure: Vec<Letter>,
    target: Message,
    budget: Option<u64>,
    corruptions: u64,
    done: bool,
    incomplete: bool,
}

impl GreedyDecodeFlip {
    pub fn new(
        instance: &ProtocolInstance,
        x: Message,
        target: Message,
    ) -> Result<GreedyDecodeFlip, AdversaryError> {
        let code = instance.alice_block_code_arc().ok_or(AdversaryError::NotCoded)?;
        let block_len = instance.alice_block_len().ok_or(AdversaryError::NotCoded)? as usize;
        let row = |m: &Message| -> Result<Vec<Letter>, EccError> {
            (1..=block_len).map(|pos| code.letter_at(m, pos)).collect()
        };
        let honest = row(&x)?;
        let lure = row(&target)?;
        Ok(GreedyDecodeFlip {
            code,
            block_len,
            honest,
            lure,
            target,
            budget: None,
            corruptions: 0,
            done: false,
            incomplete: false,
        })
    }

    pub fn with_budget(mut self, max: u64) -> GreedyDecodeFlip {
        self.budget = Some(max);
        self
    }

    pub fn corruptions(&self) -> u64 {
        self.corruptions
    }

    /// The flip landed: the block as delivered decodes to the target.
    pub fn flipped(&self) -> bool {
        self.done
    }

    /// The budget ran out before the decode flipped.
    pub fn incomplete(&self) -> bool {
        self.incomplete
    }
}

impl Adversary for GreedyDecodeFlip {
    fn deliver(
        &mut self,
        round: u64,
        speaker: Party,
        sent: ChannelSymbol,
        history: &[RoundRecord],
    ) -> ChannelSymbol {
        let r = round as usize;
        if speaker != Party::Alice || r > self.block_len || self.done || self.incomplete {
            return sent;
        }
        // Project the final block: recorded deliveries so far, honest
        // letters for everything from this round on.
        let mut projected: Vec<Option<Letter>> = history
            .iter()
            .filter(|rec| (rec.round as usize) < r)
            .map(|rec| match rec.delivered {
                ChannelSymbol::Letter(l) => Some(l),
                _ => None,
            })
            .collect();
        projected.extend(self.honest[r - 1..].iter().map(|&l| Some(l)));
        let word = ReceivedWord::from_letters(projected);
        let (hat, _) = self.code.nearest_decode(&word).expect("word spans the block");
        if hat == self.target {
            self.done = true;
            return sent;
        }
        let lure = ChannelSymbol::Letter(self.lure[r - 1]);
        if lure == sent {
            return sent;
        }
        if self.budget.is_some_and(|m| self.corruptions >= m) {
            self.incomplete = true;
            return sent;
        }
        self.corruptions += 1;
        lure
    }
}

/// Post-hoc audit of one attacked run. Every rate is recomputed from the
/// transcript, never taken from the adversary's own counters.
#[derive(Debug, Clone, Serialize)]
pub struct AttackReport {
    pub transcript: SessionResult,
    /// Corrupted rounds in the whole transcript.
    pub corruptions: u64,
    /// Rate under each applicable accounting model.
    pub rates: Vec<NoiseAccounting>,
    /// Some party's output differs from the true `(x, y)`.
    pub success: bool,
}

impl AttackReport {
    pub fn from_run(
        instance: &ProtocolInstance,
        x: Message,
        y: Message,
        transcript: SessionResult,
    ) -> AttackReport {
        let corruptions = transcript.rounds.iter().filter(|r| r.corrupted).count() as u64;
        let mut rates = Vec::new();
        for model in [
            NoiseModel::FirstTermination,
            NoiseModel::FullTermination,
            NoiseModel::SpeakerTermination,
        ] {
            rates.push(noise_rate(&transcript, model).expect("model needs no common termination"));
        }
        if instance.model() == NoiseModel::Feedback {
            if let Ok(acc) = noise_rate(&transcript, NoiseModel::Feedback) {
                rates.push(acc);
            }
        }
        let expect = PartyOutput::Pair(x, y);
        let success =
            transcript.alice_output != Some(expect) || transcript.bob_output != Some(expect);
        AttackReport { transcript, corruptions, rates, success }
    }

    /// The recomputed accounting under one model, if it applied.
    pub fn rate(&self, model: NoiseModel) -> Option<NoiseAccounting> {
        self.rates.iter().copied().find(|r| r.model == model)
    }
}

#[cfg(test)]
mod tests;
