//! The speaker-model exchanges. Three fixed phases: Alice's coded block
//! (N rounds), Bob's coded reply carrying his decode of x paired with y
//! (L rounds), then an extension window (M rounds) in which Alice either
//! stays silent — conceding her message may not have landed — or streams
//! further positions of x's codeword to overpower the noise.
//!
//! Under speaker accounting silence after the last live symbol is free, so
//! Alice's choice of extension length K trades rounds the adversary gets
//! charged against for redundancy Bob can decode across. Bob never stops
//! early in the 7/20 variant; the √57 variant lets him give up when the
//! first block is hopeless. At the window's end Bob keeps his first decode
//! when the window stayed quiet enough, else he re-decodes the
//! concatenated block + window with his first guess excluded.

use std::sync::Arc;

use super::{delivered_letter, lengths, InstrumentHandle};
use crate::ecc::{Message, PrefixCodeFamily, ReceivedWord};
use crate::engine::{ChannelSymbol, Endpoint, ListenOutcome, PartyOutput, SpeakOutcome};

/// The two published parameterizations of the scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeakerVariant {
    /// L = ⌈7N/3⌉, M = ⌈10N/3⌉, resilience 7/20 − O(ε).
    Rate720,
    /// L = ⌈(3+√57)/4·N⌉, M = ⌈(7+√57)/4·N⌉, resilience (9−√57)/4 − O(ε).
    RateSqrt57,
}

impl SpeakerVariant {
    pub fn reply_len(&self, n: u64) -> u64 {
        match self {
            SpeakerVariant::Rate720 => lengths::s720_reply_len(n),
            SpeakerVariant::RateSqrt57 => lengths::s957_reply_len(n),
        }
    }

    pub fn window_len(&self, n: u64) -> u64 {
        match self {
            SpeakerVariant::Rate720 => lengths::s720_window_len(n),
            SpeakerVariant::RateSqrt57 => lengths::s957_window_len(n),
        }
    }

    /// Does the responder abandon the session on residual `t`?
    pub fn responder_gives_up(&self, n: u64, t: u64) -> bool {
        match self {
            SpeakerVariant::Rate720 => false,
            SpeakerVariant::RateSqrt57 => lengths::s957_responder_giveup(n, t),
        }
    }

    /// Does the sender stop at the reply's end on residual `s`?
    pub fn sender_stops(&self, n: u64, s: u64) -> bool {
        match self {
            SpeakerVariant::Rate720 => lengths::s720_sender_stop(n, s),
            SpeakerVariant::RateSqrt57 => lengths::s957_sender_stop(n, s),
        }
    }

    /// Extension length K for residual `s` (only queried below the stop
    /// threshold).
    pub fn extension_len(&self, n: u64, s: u64) -> u64 {
        match self {
            SpeakerVariant::Rate720 => lengths::s720_extension_len(n, s),
            SpeakerVariant::RateSqrt57 => lengths::s957_extension_len(n, s),
        }
    }

    /// Does the responder keep his first decode given residual `t` and
    /// `delta` non-silent window rounds?
    pub fn keep_first_decode(&self, n: u64, t: u64, delta: u64) -> bool {
        match self {
            SpeakerVariant::Rate720 => lengths::s720_keep_first(n, t, delta),
            SpeakerVariant::RateSqrt57 => lengths::s957_keep_first(n, t, delta),
        }
    }
}

pub struct SpeakerAlice {
    x: Message,
    variant: SpeakerVariant,
    x_code: Arc<PrefixCodeFamily>,
    pair_code: Arc<PrefixCodeFamily>,
    block_len: u64,
    reply_len: u64,
    bits_a: u32,
    bits_b: u32,
    spoken_block: u64,
    heard: ReceivedWord,
    decoded_y: Option<Message>,
    extension_len: u64,
    spoken_extension: u64,
    instr: Option<InstrumentHandle>,
}

impl SpeakerAlice {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        x: Message,
        variant: SpeakerVariant,
        x_code: Arc<PrefixCodeFamily>,
        pair_code: Arc<PrefixCodeFamily>,
        block_len: u64,
        reply_len: u64,
        bits_a: u32,
        bits_b: u32,
        instr: Option<InstrumentHandle>,
    ) -> SpeakerAlice {
        SpeakerAlice {
            x,
            variant,
            x_code,
            pair_code,
            block_len,
            reply_len,
            bits_a,
            bits_b,
            spoken_block: 0,
            heard: ReceivedWord::new(),
            decoded_y: None,
            extension_len: 0,
            spoken_extension: 0,
            instr,
        }
    }
}

impl Endpoint for SpeakerAlice {
    fn speak(&mut self, _round: u64) -> SpeakOutcome {
        if self.spoken_block < self.block_len {
            self.spoken_block += 1;
            let letter = self
                .x_code
                .letter_at(&self.x, self.spoken_block as usize)
                .expect("block position within code length");
            return SpeakOutcome::Speak(ChannelSymbol::Letter(letter));
        }
        // Extension: continue x's codeword past the block prefix.
        self.spoken_extension += 1;
        let pos = (self.block_len + self.spoken_extension) as usize;
        let letter =
            self.x_code.letter_at(&self.x, pos).expect("extension position within code length");
        let sym = ChannelSymbol::Letter(letter);
        if self.spoken_extension == self.extension_len {
            let y_hat = self.decoded_y.expect("decoded before extending");
            SpeakOutcome::SpeakThenTerminate(sym, PartyOutput::Pair(self.x, y_hat))
        } else {
            SpeakOutcome::Speak(sym)
        }
    }

    fn listen(&mut self, _round: u64, delivered: ChannelSymbol) -> ListenOutcome {
        self.heard.push(delivered_letter(delivered));
        if (self.heard.len() as u64) < self.reply_len {
            return ListenOutcome::Continue;
        }
        let (pair, s) = self.pair_code.nearest_decode(&self.heard).expect("full reply heard");
        let (x_seen, y_hat) =
            pair.split(self.bits_a, self.bits_b).expect("pair code carries both widths");
        if let Some(instr) = &self.instr {
            instr.borrow_mut().sender_residual_s = Some(s);
        }
        if x_seen == self.x || self.variant.sender_stops(self.block_len, s) {
            // Either Bob echoed x back intact (he got it) or the reply is
            // so damaged the adversary already overspent its window.
            if let Some(instr) = &self.instr {
                instr.borrow_mut().sender_extension_k = Some(0);
            }
            return ListenOutcome::Terminate(PartyOutput::Pair(self.x, y_hat));
        }
        self.extension_len = self.variant.extension_len(self.block_len, s);
        self.decoded_y = Some(y_hat);
        if let Some(instr) = &self.instr {
            instr.borrow_mut().sender_extension_k = Some(self.extension_len);
        }
        ListenOutcome::Continue
    }
}

pub struct SpeakerBob {
    y: Message,
    variant: SpeakerVariant,
    x_code: Arc<PrefixCodeFamily>,
    pair_code: Arc<PrefixCodeFamily>,
    block_len: u64,
    reply_len: u64,
    window_len: u64,
    heard_block: ReceivedWord,
    first_decode: Option<(Message, u64)>,
    reply_pair: Option<Message>,
    spoken: u64,
    heard_window: ReceivedWord,
    window_live: u64,
    instr: Option<InstrumentHandle>,
}

impl SpeakerBob {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        y: Message,
        variant: SpeakerVariant,
        x_code: Arc<PrefixCodeFamily>,
        pair_code: Arc<PrefixCodeFamily>,
        block_len: u64,
        reply_len: u64,
        window_len: u64,
        instr: Option<InstrumentHandle>,
    ) -> SpeakerBob {
        SpeakerBob {
            y,
            variant,
            x_code,
            pair_code,
            block_len,
            reply_len,
            window_len,
            heard_block: ReceivedWord::new(),
            first_decode: None,
            reply_pair: None,
            spoken: 0,
            heard_window: ReceivedWord::new(),
            window_live: 0,
            instr,
        }
    }
}

impl Endpoint for SpeakerBob {
    fn speak(&mut self, _round: u64) -> SpeakOutcome {
        self.spoken += 1;
        let pair = self.reply_pair.expect("reply pair fixed before speaking");
        let letter = self
            .pair_code
            .letter_at(&pair, self.spoken as usize)
            .expect("reply position within code length");
        // The last reply round does not terminate: the extension window
        // where Bob only listens is still ahead.
        SpeakOutcome::Speak(ChannelSymbol::Letter(letter))
    }

    fn listen(&mut self, _round: u64, delivered: ChannelSymbol) -> ListenOutcome {
        if (self.heard_block.len() as u64) < self.block_len {
            self.heard_block.push(delivered_letter(delivered));
            if (self.heard_block.len() as u64) < self.block_len {
                return ListenOutcome::Continue;
            }
            let (x_hat, t) =
                self.x_code.nearest_decode(&self.heard_block).expect("full block heard");
            if let Some(instr) = &self.instr {
                instr.borrow_mut().responder_residual_t = Some(t);
            }
            if self.variant.responder_gives_up(self.block_len, t) {
                if let Some(instr) = &self.instr {
                    instr.borrow_mut().responder_reply_len = Some(0);
                }
                return ListenOutcome::Terminate(PartyOutput::Arbitrary);
            }
            self.first_decode = Some((x_hat, t));
            self.reply_pair =
                Some(Message::pair(x_hat, self.y).expect("pair code carries both widths"));
            if let Some(instr) = &self.instr {
                instr.borrow_mut().responder_reply_len = Some(self.reply_len);
            }
            return ListenOutcome::Continue;
        }

        // Extension window.
        self.heard_window.push(delivered_letter(delivered));
        if delivered != ChannelSymbol::Silence {
            self.window_live += 1;
        }
        if (self.heard_window.len() as u64) < self.window_len {
            return ListenOutcome::Continue;
        }
        let (x_first, t) = self.first_decode.expect("first decode fixed before the window");
        let x_out = if self.variant.keep_first_decode(self.block_len, t, self.window_live) {
            x_first
        } else {
            // Enough live symbols arrived that an honest Alice must have
            // extended: re-decode block + window, excluding the first guess.
            let mut combined = self.heard_block.clone();
            for i in 0..self.heard_window.len() {
                combined.push(self.heard_window.letters[i]);
            }
            let (x_second, _) = self
                .x_code
                .second_nearest_decode(&combined, &x_first)
                .expect("combined word spans block and window");
            x_second
        };
        ListenOutcome::Terminate(PartyOutput::Pair(x_out, self.y))
    }
}
