//! The √2 exchange: Alice sends a fixed coded block, Bob replies with a
//! block whose length shrinks with the damage he observed, and Alice stops
//! listening as soon as the reply looks too corrupted to be worth more.
//!
//! Bob's reply length is `⌈√2(N − 2t)⌉` where `t` is his residual decode
//! distance, so an adversary must either spend heavily on the first block
//! (raising `t`, shortening the window it can attack next) or leave Bob's
//! decode clean. Alice walks the reply one letter at a time and terminates
//! once the prefix she heard sits further than `N/√2` from every codeword
//! prefix of the same length, or once the full reply cap arrives.

use std::sync::Arc;

use num_rational::Ratio;

use super::{delivered_letter, lengths, InstrumentHandle};
use crate::ecc::{truncate_pad, Message, PrefixCodeFamily, ReceivedWord};
use crate::engine::{ChannelSymbol, Endpoint, ListenOutcome, PartyOutput, SpeakOutcome};

pub struct SqrtAlice {
    x: Message,
    a_code: Arc<PrefixCodeFamily>,
    b_code: Arc<PrefixCodeFamily>,
    block_len: u64,
    reply_cap: u64,
    spoken: u64,
    heard: ReceivedWord,
    instr: Option<InstrumentHandle>,
}

impl SqrtAlice {
    pub fn new(
        x: Message,
        a_code: Arc<PrefixCodeFamily>,
        b_code: Arc<PrefixCodeFamily>,
        block_len: u64,
        reply_cap: u64,
        instr: Option<InstrumentHandle>,
    ) -> SqrtAlice {
        SqrtAlice {
            x,
            a_code,
            b_code,
            block_len,
            reply_cap,
            spoken: 0,
            heard: ReceivedWord::new(),
            instr,
        }
    }
}

impl Endpoint for SqrtAlice {
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
        let r = self.heard.len() as u64;
        // Running error estimate: distance from the heard prefix to the
        // closest codeword prefix of the same length. This never exceeds
        // the number of corrupted reply rounds so far, and every silent
        // round after Bob stops raises it by one.
        let (_, e_r) =
            self.b_code.nearest_decode_prefix(&self.heard).expect("prefix within reply length");
        if lengths::sqrt2_stop_trigger(self.block_len, e_r) || r == self.reply_cap {
            let padded = truncate_pad(&self.heard, self.reply_cap as usize);
            let (y_hat, _) =
                self.b_code.nearest_decode(&padded).expect("padded reply has full length");
            if let Some(instr) = &self.instr {
                instr.borrow_mut().sender_stop_r = Some(r);
            }
            ListenOutcome::Terminate(PartyOutput::Pair(self.x, y_hat))
        } else {
            ListenOutcome::Continue
        }
    }
}

pub struct SqrtBob {
    y: Message,
    a_code: Arc<PrefixCodeFamily>,
    b_code: Arc<PrefixCodeFamily>,
    block_len: u64,
    epsilon: Ratio<i64>,
    heard: ReceivedWord,
    decoded_x: Option<Message>,
    reply_len: u64,
    spoken: u64,
    instr: Option<InstrumentHandle>,
}

impl SqrtBob {
    pub fn new(
        y: Message,
        a_code: Arc<PrefixCodeFamily>,
        b_code: Arc<PrefixCodeFamily>,
        block_len: u64,
        epsilon: Ratio<i64>,
        instr: Option<InstrumentHandle>,
    ) -> SqrtBob {
        SqrtBob {
            y,
            a_code,
            b_code,
            block_len,
            epsilon,
            heard: ReceivedWord::new(),
            decoded_x: None,
            reply_len: 0,
            spoken: 0,
            instr,
        }
    }
}

impl Endpoint for SqrtBob {
    fn speak(&mut self, _round: u64) -> SpeakOutcome {
        self.spoken += 1;
        let letter = self
            .b_code
            .letter_at(&self.y, self.spoken as usize)
            .expect("reply position within code length");
        let sym = ChannelSymbol::Letter(letter);
        if self.spoken == self.reply_len {
            let x_hat = self.decoded_x.expect("decoded before speaking");
            SpeakOutcome::SpeakThenTerminate(sym, PartyOutput::Pair(x_hat, self.y))
        } else {
            SpeakOutcome::Speak(sym)
        }
    }

    fn listen(&mut self, _round: u64, delivered: ChannelSymbol) -> ListenOutcome {
        self.heard.push(delivered_letter(delivered));
        if (self.heard.len() as u64) < self.block_len {
            return ListenOutcome::Continue;
        }
        let (x_hat, t) = self.a_code.nearest_decode(&self.heard).expect("full block heard");
        if let Some(instr) = &self.instr {
            instr.borrow_mut().responder_residual_t = Some(t);
        }
        if lengths::half_distance_trigger(self.block_len, t, self.epsilon) {
            // The block is damaged beyond the code's guarantee: answering
            // would waste rounds the accounting charges to us.
            if let Some(instr) = &self.instr {
                instr.borrow_mut().responder_reply_len = Some(0);
            }
            return ListenOutcome::Terminate(PartyOutput::Arbitrary);
        }
        self.reply_len = lengths::sqrt2_reply_len(self.block_len, t);
        self.decoded_x = Some(x_hat);
        if let Some(instr) = &self.instr {
            instr.borrow_mut().responder_reply_len = Some(self.reply_len);
        }
        ListenOutcome::Continue
    }
}
