//! Fixed-length baselines with no adaptivity at all. Their termination
//! rounds are known in advance, which is exactly the weakness the
//! calibrated attacks in this crate exploit.

use std::sync::Arc;

use super::delivered_letter;
use crate::ecc::{Message, PrefixCodeFamily, ReceivedWord};
use crate::engine::{ChannelSymbol, Endpoint, ListenOutcome, Party, PartyOutput, SpeakOutcome};

/// Alice sends her codeword for N rounds, then listens for N rounds and
/// decodes whatever arrived.
pub struct NaiveAlice {
    x: Message,
    a_code: Arc<PrefixCodeFamily>,
    b_code: Arc<PrefixCodeFamily>,
    block_len: u64,
    spoken: u64,
    heard: ReceivedWord,
}

impl NaiveAlice {
    pub fn new(
        x: Message,
        a_code: Arc<PrefixCodeFamily>,
        b_code: Arc<PrefixCodeFamily>,
        block_len: u64,
    ) -> NaiveAlice {
        NaiveAlice { x, a_code, b_code, block_len, spoken: 0, heard: ReceivedWord::new() }
    }
}

impl Endpoint for NaiveAlice {
    fn speak(&mut self, _round: u64) -> SpeakOutcome {
        self.spoken += 1;
        let letter = self
            .a_code
            .letter_at(&self.x, self.spoken as usize)
            .expect("block position within code length");
        SpeakOutcome::Speak(ChannelSymbol::Letter(letter))
    }

    fn listen(&mut self, _round: u64, delivered: ChannelSymbol) -> ListenOutcome {
        self.heard.push(delivered_letter(delivered));
        if (self.heard.len() as u64) < self.block_len {
            return ListenOutcome::Continue;
        }
        let (y_hat, _) = self.b_code.nearest_decode(&self.heard).expect("full block heard");
        ListenOutcome::Terminate(PartyOutput::Pair(self.x, y_hat))
    }
}

/// Bob listens for N rounds, then replies with his codeword for N rounds.
pub struct NaiveBob {
    y: Message,
    a_code: Arc<PrefixCodeFamily>,
    b_code: Arc<PrefixCodeFamily>,
    block_len: u64,
    heard: ReceivedWord,
    decoded_x: Option<Message>,
    spoken: u64,
}

impl NaiveBob {
    pub fn new(
        y: Message,
        a_code: Arc<PrefixCodeFamily>,
        b_code: Arc<PrefixCodeFamily>,
        block_len: u64,
    ) -> NaiveBob {
        NaiveBob {
            y,
            a_code,
            b_code,
            block_len,
            heard: ReceivedWord::new(),
            decoded_x: None,
            spoken: 0,
        }
    }
}

impl Endpoint for NaiveBob {
    fn speak(&mut self, _round: u64) -> SpeakOutcome {
        self.spoken += 1;
        let letter = self
            .b_code
            .letter_at(&self.y, self.spoken as usize)
            .expect("block position within code length");
        let sym = ChannelSymbol::Letter(letter);
        if self.spoken == self.block_len {
            let x_hat = self.decoded_x.expect("decoded before replying");
            SpeakOutcome::SpeakThenTerminate(sym, PartyOutput::Pair(x_hat, self.y))
        } else {
            SpeakOutcome::Speak(sym)
        }
    }

    fn listen(&mut self, _round: u64, delivered: ChannelSymbol) -> ListenOutcome {
        self.heard.push(delivered_letter(delivered));
        if (self.heard.len() as u64) == self.block_len {
            let (x_hat, _) = self.a_code.nearest_decode(&self.heard).expect("full block heard");
            self.decoded_x = Some(x_hat);
        }
        ListenOutcome::Continue
    }
}

/// Plain bits over the binary feedback channel: Alice's n bits, then
/// Bob's n bits, termination hardwired to round 2n for both.
pub struct NaiveFeedbackParty {
    me: Party,
    input: Message,
    bits: u32,
    spoken: u64,
    heard: Vec<u8>,
    rounds_seen: u64,
}

impl NaiveFeedbackParty {
    pub fn new(me: Party, input: Message, bits: u32) -> NaiveFeedbackParty {
        NaiveFeedbackParty { me, input, bits, spoken: 0, heard: Vec::new(), rounds_seen: 0 }
    }

    fn heard_message(&self) -> Message {
        let mut value = 0u64;
        for i in 0..self.bits {
            if self.heard.get(i as usize).copied().unwrap_or(0) == 1 {
                value |= 1 << i;
            }
        }
        Message::new(value, self.bits).expect("width preserved")
    }

    fn output(&self) -> PartyOutput {
        match self.me {
            Party::Alice => PartyOutput::Pair(self.input, self.heard_message()),
            Party::Bob => PartyOutput::Pair(self.heard_message(), self.input),
        }
    }

    fn tick(&mut self) -> ListenOutcome {
        self.rounds_seen += 1;
        if self.rounds_seen >= 2 * self.bits as u64 {
            ListenOutcome::Terminate(self.output())
        } else {
            ListenOutcome::Continue
        }
    }
}

impl Endpoint for NaiveFeedbackParty {
    fn speak(&mut self, _round: u64) -> SpeakOutcome {
        let bit = self.input.bit(self.spoken as u32);
        self.spoken += 1;
        SpeakOutcome::Speak(ChannelSymbol::Bit(bit))
    }

    fn listen(&mut self, _round: u64, delivered: ChannelSymbol) -> ListenOutcome {
        if let ChannelSymbol::Bit(b) = delivered {
            self.heard.push(b & 1);
        }
        self.tick()
    }

    fn echo(&mut self, _round: u64, _delivered: ChannelSymbol) -> ListenOutcome {
        self.tick()
    }
}
