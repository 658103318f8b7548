//! The geometric-batch exchange for first-termination accounting. Batches
//! grow by the factor C = 1/eps − 1: Alice restarts her codeword from the
//! top in every even batch 2k (length C^{2k}·N), Bob answers in odd
//! batches with all-zero letters while k < y and terminates silently once
//! k = y, decoding Alice's latest batch on his way out.
//!
//! Alice reads Bob's k-th zero batch as "not yet": if at least half its
//! letters arrive as something other than the zero letter, she takes it as
//! Bob's already gone, concluding y = k. Because the accounting denominator
//! stops at the first termination, flipping Bob's cheap early batches is
//! expensive relative to the rounds that still count, and flipping his
//! silence later is hopeless — each batch doubles down on the budget.

use std::sync::Arc;

use super::delivered_letter;
use crate::ecc::{Message, PrefixCodeFamily, ReceivedWord};
use crate::engine::{ChannelSymbol, Endpoint, ListenOutcome, PartyOutput, SpeakOutcome};

pub struct BatchAlice {
    x: Message,
    code: Arc<PrefixCodeFamily>,
    batch_lens: Arc<Vec<u64>>,
    bits_b: u32,
    /// Index of the batch currently in progress.
    batch: usize,
    progress: u64,
    nonzero: u64,
}

impl BatchAlice {
    pub fn new(
        x: Message,
        code: Arc<PrefixCodeFamily>,
        batch_lens: Arc<Vec<u64>>,
        bits_b: u32,
    ) -> BatchAlice {
        BatchAlice { x, code, batch_lens, bits_b, batch: 0, progress: 0, nonzero: 0 }
    }
}

impl Endpoint for BatchAlice {
    fn speak(&mut self, _round: u64) -> SpeakOutcome {
        self.progress += 1;
        let letter = self
            .code
            .letter_at(&self.x, self.progress as usize)
            .expect("batch position within code length");
        if self.progress == self.batch_lens[self.batch] {
            self.batch += 1;
            self.progress = 0;
            self.nonzero = 0;
        }
        SpeakOutcome::Speak(ChannelSymbol::Letter(letter))
    }

    fn listen(&mut self, _round: u64, delivered: ChannelSymbol) -> ListenOutcome {
        self.progress += 1;
        if delivered != ChannelSymbol::Letter(0) {
            self.nonzero += 1;
        }
        let len = self.batch_lens[self.batch];
        if self.progress < len {
            return ListenOutcome::Continue;
        }
        // End of Bob's batch 2k+1, his k-th answer slot.
        let k = (self.batch as u64 - 1) / 2;
        if 2 * self.nonzero >= len {
            let y_hat = Message::new(k, self.bits_b).expect("k within Bob's range");
            return ListenOutcome::Terminate(PartyOutput::Pair(self.x, y_hat));
        }
        self.batch += 1;
        self.progress = 0;
        self.nonzero = 0;
        ListenOutcome::Continue
    }
}

pub struct BatchBob {
    y: Message,
    code: Arc<PrefixCodeFamily>,
    batch_lens: Arc<Vec<u64>>,
    batch: usize,
    progress: u64,
    heard: ReceivedWord,
}

impl BatchBob {
    pub fn new(y: Message, code: Arc<PrefixCodeFamily>, batch_lens: Arc<Vec<u64>>) -> BatchBob {
        BatchBob { y, code, batch_lens, batch: 0, progress: 0, heard: ReceivedWord::new() }
    }
}

impl Endpoint for BatchBob {
    fn speak(&mut self, _round: u64) -> SpeakOutcome {
        self.progress += 1;
        if self.progress == self.batch_lens[self.batch] {
            self.batch += 1;
            self.progress = 0;
            self.heard = ReceivedWord::new();
        }
        SpeakOutcome::Speak(ChannelSymbol::Letter(0))
    }

    fn listen(&mut self, _round: u64, delivered: ChannelSymbol) -> ListenOutcome {
        self.progress += 1;
        self.heard.push(delivered_letter(delivered));
        let len = self.batch_lens[self.batch];
        if self.progress < len {
            return ListenOutcome::Continue;
        }
        // End of Alice's batch 2k.
        let k = self.batch as u64 / 2;
        if k == self.y.value() {
            let (x_hat, _) = self.code.nearest_decode(&self.heard).expect("full batch heard");
            return ListenOutcome::Terminate(PartyOutput::Pair(x_hat, self.y));
        }
        self.batch += 1;
        self.progress = 0;
        self.heard = ReceivedWord::new();
        ListenOutcome::Continue
    }
}
