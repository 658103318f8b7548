//! The 2/7 exchange: like the √2 scheme but Bob's reply shrinks on a
//! steeper, piecewise schedule, and Alice's stop rule counts silence
//! instead of decoding as she goes — she quits once ⌈2N/3⌉ of the reply
//! rounds arrived as ∅, or once the full reply window has passed.

use std::sync::Arc;

use num_rational::Ratio;

use super::{delivered_letter, lengths, InstrumentHandle};
use crate::ecc::{truncate_pad, Message, PrefixCodeFamily, ReceivedWord};
use crate::engine::{ChannelSymbol, Endpoint, ListenOutcome, PartyOutput, SpeakOutcome};

pub struct TwoSeventhsAlice {
    x: Message,
    a_code: Arc<PrefixCodeFamily>,
    b_code: Arc<PrefixCodeFamily>,
    block_len: u64,
    reply_cap: u64,
    spoken: u64,
    heard: ReceivedWord,
    silences: u64,
    instr: Option<InstrumentHandle>,
}

impl TwoSeventhsAlice {
    pub fn new(
        x: Message,
        a_code: Arc<PrefixCodeFamily>,
        b_code: Arc<PrefixCodeFamily>,
        block_len: u64,
        reply_cap: u64,
        instr: Option<InstrumentHandle>,
    ) -> TwoSeventhsAlice {
        TwoSeventhsAlice {
            x,
            a_code,
            b_code,
            block_len,
            reply_cap,
            spoken: 0,
            heard: ReceivedWord::new(),
            silences: 0,
            instr,
        }
    }
}

impl Endpoint for TwoSeventhsAlice {
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
        if delivered == ChannelSymbol::Silence {
            self.silences += 1;
        }
        let r = self.heard.len() as u64;
        let quota_hit = 3 * self.silences >= 2 * self.block_len;
        if quota_hit || r == self.reply_cap {
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

pub struct TwoSeventhsBob {
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

impl TwoSeventhsBob {
    pub fn new(
        y: Message,
        a_code: Arc<PrefixCodeFamily>,
        b_code: Arc<PrefixCodeFamily>,
        block_len: u64,
        epsilon: Ratio<i64>,
        instr: Option<InstrumentHandle>,
    ) -> TwoSeventhsBob {
        TwoSeventhsBob {
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

impl Endpoint for TwoSeventhsBob {
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
            if let Some(instr) = &self.instr {
                instr.borrow_mut().responder_reply_len = Some(0);
            }
            return ListenOutcome::Terminate(PartyOutput::Arbitrary);
        }
        let reply_len = lengths::two7_reply_len(self.block_len, t);
        if let Some(instr) = &self.instr {
            instr.borrow_mut().responder_reply_len = Some(reply_len);
        }
        if reply_len == 0 {
            // Residual too large to owe Alice any reply rounds, but still
            // below the give-up line: commit to the decode and leave.
            return ListenOutcome::Terminate(PartyOutput::Pair(x_hat, self.y));
        }
        self.reply_len = reply_len;
        self.decoded_x = Some(x_hat);
        ListenOutcome::Continue
    }
}
