//! The ternary feedback exchange. Both parties mirror two shared stacks —
//! first x̂, then ŷ — built from whatever the channel delivered: a bit
//! pushes, a rewind pops (popping an empty stack is a no-op). Because the
//! speaker observes its own delivered symbol (feedback), both parties see
//! the identical stream and the stacks never diverge.
//!
//! While x̂ is shorter than the target P = ⌈n/ε⌉ Alice speaks: the next
//! bit of her padded input if the stack is a prefix of it, otherwise a
//! rewind to erase the deepest corrupted entry. Once x̂ reaches P the same
//! game runs on ŷ with Bob speaking. Both parties stop together when ŷ
//! is full or at the hard cap ⌈n/ε²⌉ rounds; each corruption costs the
//! adversary one round and the honest speaker at most two.

use super::InstrumentHandle;
use crate::ecc::Message;
use crate::engine::{
    ChannelSymbol, Endpoint, ListenOutcome, Party, PartyOutput, RoundRecord, SpeakOutcome,
    SpeakerSchedule,
};

/// Replays the delivered transcript to decide whose phase a round belongs
/// to. Pure function of the history, so both endpoints and the engine
/// always agree on the speaker, whatever the adversary delivered.
pub struct FeedbackSchedule {
    target: u64,
}

impl FeedbackSchedule {
    pub fn new(target: u64) -> FeedbackSchedule {
        FeedbackSchedule { target }
    }
}

impl SpeakerSchedule for FeedbackSchedule {
    fn speaker(&self, _round: u64, history: &[RoundRecord]) -> Option<Party> {
        let mut x_len: u64 = 0;
        for record in history {
            if x_len >= self.target {
                return Some(Party::Bob);
            }
            match record.delivered {
                ChannelSymbol::Bit(_) => x_len += 1,
                ChannelSymbol::Rewind => x_len = x_len.saturating_sub(1),
                _ => {}
            }
        }
        Some(if x_len < self.target { Party::Alice } else { Party::Bob })
    }
}

/// The two mirrored stacks plus the phase rule.
#[derive(Debug, Clone, Default)]
struct SharedStacks {
    x_hat: Vec<u8>,
    y_hat: Vec<u8>,
}

impl SharedStacks {
    fn in_first_phase(&self, target: u64) -> bool {
        (self.x_hat.len() as u64) < target
    }

    fn apply(&mut self, target: u64, delivered: ChannelSymbol) {
        let stack = if self.in_first_phase(target) { &mut self.x_hat } else { &mut self.y_hat };
        match delivered {
            ChannelSymbol::Bit(b) => stack.push(b & 1),
            ChannelSymbol::Rewind => {
                stack.pop();
            }
            _ => {}
        }
    }

    fn complete(&self, target: u64) -> bool {
        (self.y_hat.len() as u64) >= target
    }
}

pub struct FeedbackParty {
    me: Party,
    input: Message,
    bits: u32,
    target: u64,
    cap: u64,
    stacks: SharedStacks,
    rounds_seen: u64,
    instr: Option<InstrumentHandle>,
}

impl FeedbackParty {
    pub fn new(
        me: Party,
        input: Message,
        bits: u32,
        target: u64,
        cap: u64,
        instr: Option<InstrumentHandle>,
    ) -> FeedbackParty {
        FeedbackParty {
            me,
            input,
            bits,
            target,
            cap,
            stacks: SharedStacks::default(),
            rounds_seen: 0,
            instr,
        }
    }

    /// Bit `i` (0-based) of the input padded with zeros up to the target.
    fn padded_bit(&self, i: u64) -> u8 {
        if i < self.bits as u64 {
            self.input.bit(i as u32)
        } else {
            0
        }
    }

    /// First `bits` entries of a stack, read back as a message value.
    fn stack_message(&self, stack: &[u8]) -> Message {
        let mut value = 0u64;
        for i in 0..self.bits {
            if stack.get(i as usize).copied().unwrap_or(0) == 1 {
                value |= 1 << i;
            }
        }
        Message::new(value, self.bits).expect("width preserved")
    }

    fn my_stack(&self) -> &[u8] {
        match self.me {
            Party::Alice => &self.stacks.x_hat,
            Party::Bob => &self.stacks.y_hat,
        }
    }

    /// Advance shared state by one delivered symbol; both parties run this
    /// exactly once per round (the listener via listen, the speaker via
    /// the feedback echo), so the mirrored stacks stay identical.
    fn absorb(&mut self, delivered: ChannelSymbol) -> ListenOutcome {
        self.rounds_seen += 1;
        self.stacks.apply(self.target, delivered);
        if self.stacks.complete(self.target) || self.rounds_seen >= self.cap {
            if let Some(instr) = &self.instr {
                let view = (self.stacks.x_hat.clone(), self.stacks.y_hat.clone());
                match self.me {
                    Party::Alice => instr.borrow_mut().alice_stack_view = Some(view),
                    Party::Bob => instr.borrow_mut().bob_stack_view = Some(view),
                }
            }
            let output = match self.me {
                Party::Alice => {
                    PartyOutput::Pair(self.input, self.stack_message(&self.stacks.y_hat))
                }
                Party::Bob => {
                    PartyOutput::Pair(self.stack_message(&self.stacks.x_hat), self.input)
                }
            };
            ListenOutcome::Terminate(output)
        } else {
            ListenOutcome::Continue
        }
    }
}

impl Endpoint for FeedbackParty {
    fn speak(&mut self, _round: u64) -> SpeakOutcome {
        let stack = self.my_stack();
        let depth = stack.len() as u64;
        let intact = stack.iter().enumerate().all(|(i, &b)| b == self.padded_bit(i as u64));
        let sym = if intact {
            ChannelSymbol::Bit(self.padded_bit(depth))
        } else {
            ChannelSymbol::Rewind
        };
        SpeakOutcome::Speak(sym)
    }

    fn listen(&mut self, _round: u64, delivered: ChannelSymbol) -> ListenOutcome {
        self.absorb(delivered)
    }

    fn echo(&mut self, _round: u64, delivered: ChannelSymbol) -> ListenOutcome {
        self.absorb(delivered)
    }
}
