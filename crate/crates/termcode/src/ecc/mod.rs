//! Prefix-coherent evaluation codes over a finite field.
//!
//! A [`PrefixCodeFamily`] packs an n-bit message into `k` field elements,
//! treats them as polynomial coefficients, and emits letter `j` as the
//! polynomial's value at the j-th field point. Encoding to any two lengths
//! therefore agrees on the shared prefix, and any window of `len` positions
//! carries pairwise distance at least `len - (k - 1)`, which is at least
//! `ceil((1 - eps) * len)` whenever `len >= min_prefix_len`.
//!
//! Decoding is exhaustive nearest-codeword search with erased positions
//! (`None`) counting as a mismatch against every letter; ties break toward
//! the smallest message integer so decoding is deterministic.

mod field;

pub use field::{is_prime, next_prime, Field};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A channel letter. Alphabets are capped at 2^16 symbols.
pub type Letter = u16;

/// Largest message space an exhaustive decoder will be built for.
pub const MAX_MESSAGE_BITS: u32 = 14;

/// Message-space cap for exhaustive family verification.
pub const VERIFY_MESSAGE_CAP: u64 = 1 << 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EccError {
    #[error("alphabet order {0} unsupported: need a prime or power of two in [2, 65536]")]
    BadAlphabet(u32),
    #[error("message value {value} does not fit in {bits} bits")]
    MessageWidth { value: u64, bits: u32 },
    #[error("message width {bits} outside supported range [1, {max}]")]
    MessageBits { bits: u32, max: u32 },
    #[error("family parameters invalid: {0}")]
    BadFamily(String),
    #[error("word length {len} outside decodable range [{min}, {max}]")]
    LengthOutOfRange { len: usize, min: usize, max: usize },
    #[error("position range [{a}, {b}] invalid for code of length {max}")]
    BadSlice { a: usize, b: usize, max: usize },
    #[error("hamming distance needs equal lengths, got {a} and {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("message space of {count} codewords exceeds exhaustive verification cap {cap}")]
    VerifyTooLarge { count: u64, cap: u64 },
}

/// Channel alphabet of `size_q` letters; letter 0 is the distinguished
/// zero symbol used for padding and idle batches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    size_q: u32,
}

impl Alphabet {
    pub fn new(size_q: u32) -> Result<Alphabet, EccError> {
        if size_q < 2 || size_q > 65536 {
            return Err(EccError::BadAlphabet(size_q));
        }
        Ok(Alphabet { size_q })
    }

    pub fn size(&self) -> u32 {
        self.size_q
    }

    pub fn zero_symbol(&self) -> Letter {
        0
    }

    pub fn contains(&self, letter: Letter) -> bool {
        (letter as u32) < self.size_q
    }
}

/// A private input: `bits` significant bits stored LSB-first in `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Message {
    value: u64,
    bits: u32,
}

impl Message {
    pub fn new(value: u64, bits: u32) -> Result<Message, EccError> {
        if bits == 0 || bits > 63 {
            return Err(EccError::MessageBits { bits, max: 63 });
        }
        if value >> bits != 0 {
            return Err(EccError::MessageWidth { value, bits });
        }
        Ok(Message { value, bits })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Bit `i`, LSB-first; 0 beyond the declared width.
    pub fn bit(&self, i: u32) -> u8 {
        if i >= 64 {
            0
        } else {
            ((self.value >> i) & 1) as u8
        }
    }

    /// Concatenates two messages into one; `x` occupies the high bits.
    pub fn pair(x: Message, y: Message) -> Result<Message, EccError> {
        Message::new((x.value << y.bits) | y.value, x.bits + y.bits)
    }

    /// Inverse of [`Message::pair`].
    pub fn split(&self, x_bits: u32, y_bits: u32) -> Option<(Message, Message)> {
        if x_bits + y_bits != self.bits {
            return None;
        }
        let y = Message::new(self.value & ((1u64 << y_bits) - 1), y_bits).ok()?;
        let x = Message::new(self.value >> y_bits, x_bits).ok()?;
        Some((x, y))
    }
}

impl std::fmt::Display for Message {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}#{}", self.value, self.bits)
    }
}

/// A sequence of received channel positions; `None` is the erasure ∅.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReceivedWord {
    pub letters: Vec<Option<Letter>>,
}

impl ReceivedWord {
    pub fn new() -> ReceivedWord {
        ReceivedWord { letters: Vec::new() }
    }

    pub fn from_letters(letters: Vec<Option<Letter>>) -> ReceivedWord {
        ReceivedWord { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn push(&mut self, letter: Option<Letter>) {
        self.letters.push(letter);
    }

    /// Number of erased (∅) positions.
    pub fn erasures(&self) -> usize {
        self.letters.iter().filter(|l| l.is_none()).count()
    }
}

/// Positionwise mismatch count; ∅ equals ∅ and differs from every letter.
pub fn hamming(a: &ReceivedWord, b: &ReceivedWord) -> Result<u64, EccError> {
    if a.len() != b.len() {
        return Err(EccError::LengthMismatch { a: a.len(), b: b.len() });
    }
    Ok(a.letters
        .iter()
        .zip(&b.letters)
        .filter(|(x, y)| x != y)
        .count() as u64)
}

/// First `n` positions of `w`, padded with the zero symbol when `w` is
/// shorter than `n`. Padding is a real letter, not ∅.
pub fn truncate_pad(w: &ReceivedWord, n: usize) -> ReceivedWord {
    let mut letters: Vec<Option<Letter>> = w.letters.iter().take(n).copied().collect();
    while letters.len() < n {
        letters.push(Some(0));
    }
    ReceivedWord { letters }
}

/// Per-length distance probe result inside a [`FamilyReport`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistanceProbe {
    /// Positions probed: `[1, len]` for prefixes, `[a, b]` for slices.
    pub start: usize,
    pub end: usize,
    pub min_distance: u64,
    pub required: u64,
    pub ok: bool,
}

/// Exhaustive distance audit of a family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyReport {
    pub alphabet_q: u32,
    pub dimension_k: u32,
    pub message_bits: u32,
    pub max_len: usize,
    pub min_prefix_len: usize,
    pub epsilon: String,
    pub prefixes: Vec<DistanceProbe>,
    pub slices: Vec<DistanceProbe>,
    pub all_ok: bool,
}

/// Evaluation-code family with coherent prefixes and slices.
#[derive(Debug, Clone)]
pub struct PrefixCodeFamily {
    alphabet: Alphabet,
    dimension_k: u32,
    chunk_bits: u32,
    message_bits: u32,
    max_len: usize,
    min_prefix_len: usize,
    epsilon: Ratio<i64>,
    /// Row per message value, `max_len` letters each.
    codewords: Vec<Vec<Letter>>,
}

impl PrefixCodeFamily {
    /// Builds a family with explicit alphabet order and dimension.
    pub fn new(
        q: u32,
        dimension_k: u32,
        message_bits: u32,
        max_len: usize,
        min_prefix_len: usize,
        epsilon: Ratio<i64>,
    ) -> Result<PrefixCodeFamily, EccError> {
        let alphabet = Alphabet::new(q)?;
        let field = Field::new(q).ok_or(EccError::BadAlphabet(q))?;
        if message_bits == 0 || message_bits > MAX_MESSAGE_BITS {
            return Err(EccError::MessageBits { bits: message_bits, max: MAX_MESSAGE_BITS });
        }
        if dimension_k == 0 {
            return Err(EccError::BadFamily("dimension must be positive".into()));
        }
        if max_len == 0 || (max_len as u64) > q as u64 {
            return Err(EccError::BadFamily(format!(
                "max_len {max_len} needs {max_len} distinct field points but q = {q}"
            )));
        }
        if min_prefix_len == 0 || min_prefix_len > max_len {
            return Err(EccError::BadFamily(format!(
                "min_prefix_len {min_prefix_len} outside [1, {max_len}]"
            )));
        }
        if *epsilon.numer() <= 0 || epsilon >= Ratio::new(1, 1) {
            return Err(EccError::BadFamily(format!("epsilon {epsilon} outside (0, 1)")));
        }
        // Distance floor: len - (k - 1) >= ceil((1 - eps) * len) for all
        // len >= min_prefix_len reduces to (k - 1) <= eps * min_prefix_len.
        let (p, d) = (*epsilon.numer() as u64, *epsilon.denom() as u64);
        if (dimension_k as u64 - 1) * d > p * min_prefix_len as u64 {
            return Err(EccError::BadFamily(format!(
                "dimension {dimension_k} too large: need (k - 1) <= eps * min_prefix_len = \
                 {p}/{d} * {min_prefix_len}"
            )));
        }
        let chunk_bits = message_bits.div_ceil(dimension_k);
        if chunk_bits > 16 || (1u64 << chunk_bits) > q as u64 {
            return Err(EccError::BadFamily(format!(
                "bit chunks of {chunk_bits} bits do not fit field elements below {q}"
            )));
        }
        let count = 1u64 << message_bits;
        let mut codewords = Vec::with_capacity(count as usize);
        let mask = (1u64 << chunk_bits) - 1;
        let mut coeffs = vec![0u32; dimension_k as usize];
        for v in 0..count {
            for (i, c) in coeffs.iter_mut().enumerate() {
                let shift = i as u32 * chunk_bits;
                *c = if shift < 64 { ((v >> shift) & mask) as u32 } else { 0 };
            }
            let row: Vec<Letter> = (0..max_len)
                .map(|p| field.eval(&coeffs, p as u32) as Letter)
                .collect();
            codewords.push(row);
        }
        Ok(PrefixCodeFamily {
            alphabet,
            dimension_k,
            chunk_bits,
            message_bits,
            max_len,
            min_prefix_len,
            epsilon,
            codewords,
        })
    }

    /// Picks the largest dimension the distance floor allows and the
    /// smallest prime alphabet that fits both the code length and the bit
    /// chunks, then builds the family.
    pub fn design(
        message_bits: u32,
        max_len: usize,
        min_prefix_len: usize,
        epsilon: Ratio<i64>,
    ) -> Result<PrefixCodeFamily, EccError> {
        if message_bits == 0 || message_bits > MAX_MESSAGE_BITS {
            return Err(EccError::MessageBits { bits: message_bits, max: MAX_MESSAGE_BITS });
        }
        if *epsilon.numer() <= 0 || epsilon >= Ratio::new(1, 1) {
            return Err(EccError::BadFamily(format!("epsilon {epsilon} outside (0, 1)")));
        }
        let q = PrefixCodeFamily::design_alphabet(message_bits, max_len, min_prefix_len, epsilon)?;
        PrefixCodeFamily::design_with_alphabet(q, message_bits, max_len, min_prefix_len, epsilon)
    }

    /// The smallest prime alphabet [`design`](Self::design) would pick.
    /// Useful when several families must share one alphabet: take the max.
    pub fn design_alphabet(
        message_bits: u32,
        max_len: usize,
        min_prefix_len: usize,
        epsilon: Ratio<i64>,
    ) -> Result<u32, EccError> {
        if message_bits == 0 || message_bits > MAX_MESSAGE_BITS {
            return Err(EccError::MessageBits { bits: message_bits, max: MAX_MESSAGE_BITS });
        }
        if *epsilon.numer() <= 0 || epsilon >= Ratio::new(1, 1) {
            return Err(EccError::BadFamily(format!("epsilon {epsilon} outside (0, 1)")));
        }
        let k = PrefixCodeFamily::pick_dimension(message_bits, min_prefix_len, epsilon);
        let chunk_bits = message_bits.div_ceil(k);
        let floor = (max_len as u32).max(1u32 << chunk_bits).max(2);
        next_prime(floor).ok_or(EccError::BadAlphabet(floor))
    }

    /// Like [`design`](Self::design) but over a caller-chosen alphabet,
    /// e.g. one shared by both directions of a session.
    pub fn design_with_alphabet(
        q: u32,
        message_bits: u32,
        max_len: usize,
        min_prefix_len: usize,
        epsilon: Ratio<i64>,
    ) -> Result<PrefixCodeFamily, EccError> {
        if message_bits == 0 || message_bits > MAX_MESSAGE_BITS {
            return Err(EccError::MessageBits { bits: message_bits, max: MAX_MESSAGE_BITS });
        }
        if *epsilon.numer() <= 0 || epsilon >= Ratio::new(1, 1) {
            return Err(EccError::BadFamily(format!("epsilon {epsilon} outside (0, 1)")));
        }
        let k = PrefixCodeFamily::pick_dimension(message_bits, min_prefix_len, epsilon);
        PrefixCodeFamily::new(q, k, message_bits, max_len, min_prefix_len, epsilon)
    }

    /// Largest dimension the distance floor `(k - 1) <= eps * min_prefix_len`
    /// admits, clamped to the message width.
    fn pick_dimension(message_bits: u32, min_prefix_len: usize, epsilon: Ratio<i64>) -> u32 {
        let (p, d) = (*epsilon.numer() as u64, *epsilon.denom() as u64);
        let k_allowed = (p * min_prefix_len as u64 / d + 1).min(64) as u32;
        k_allowed.min(message_bits).max(1)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn dimension_k(&self) -> u32 {
        self.dimension_k
    }

    /// Bits packed into each polynomial coefficient.
    pub fn chunk_bits(&self) -> u32 {
        self.chunk_bits
    }

    pub fn message_bits(&self) -> u32 {
        self.message_bits
    }

    pub fn message_count(&self) -> u64 {
        1u64 << self.message_bits
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn min_prefix_len(&self) -> usize {
        self.min_prefix_len
    }

    pub fn epsilon(&self) -> Ratio<i64> {
        self.epsilon
    }

    /// Distance the family must meet over any window of `len >= min_prefix_len`
    /// positions: `ceil((1 - eps) * len)`, evaluated exactly.
    pub fn required_distance(&self, len: usize) -> u64 {
        let (p, d) = (*self.epsilon.numer() as u64, *self.epsilon.denom() as u64);
        ((d - p) * len as u64).div_ceil(d)
    }

    fn check_message(&self, x: &Message) -> Result<(), EccError> {
        if x.bits != self.message_bits {
            return Err(EccError::MessageBits { bits: x.bits, max: self.message_bits });
        }
        Ok(())
    }

    fn row(&self, x: &Message) -> &[Letter] {
        &self.codewords[x.value as usize]
    }

    /// The letter this family emits at 1-based position `pos`.
    pub fn letter_at(&self, x: &Message, pos: usize) -> Result<Letter, EccError> {
        self.check_message(x)?;
        if pos == 0 || pos > self.max_len {
            return Err(EccError::BadSlice { a: pos, b: pos, max: self.max_len });
        }
        Ok(self.row(x)[pos - 1])
    }

    /// First `j` letters of the codeword; `encode(x, i)` is a prefix of
    /// `encode(x, j)` for `i <= j`.
    pub fn encode(&self, x: &Message, j: usize) -> Result<ReceivedWord, EccError> {
        self.check_message(x)?;
        if j > self.max_len {
            return Err(EccError::BadSlice { a: 1, b: j, max: self.max_len });
        }
        Ok(ReceivedWord {
            letters: self.row(x)[..j].iter().map(|&l| Some(l)).collect(),
        })
    }

    /// Letters at 1-based positions `a..=b` of the codeword.
    pub fn encode_slice(&self, x: &Message, a: usize, b: usize) -> Result<ReceivedWord, EccError> {
        self.check_message(x)?;
        if a == 0 || a > b || b > self.max_len {
            return Err(EccError::BadSlice { a, b, max: self.max_len });
        }
        Ok(ReceivedWord {
            letters: self.row(x)[a - 1..b].iter().map(|&l| Some(l)).collect(),
        })
    }

    fn distance_to_row(&self, w: &ReceivedWord, row: &[Letter]) -> u64 {
        w.letters
            .iter()
            .zip(row)
            .filter(|(got, want)| **got != Some(**want))
            .count() as u64
    }

    /// Nearest codeword over the prefix of length `|w|`; ties break toward
    /// the smallest message integer. Returns the message and its distance.
    pub fn nearest_decode(&self, w: &ReceivedWord) -> Result<(Message, u64), EccError> {
        self.decode_excluding(w, None)
    }

    /// Nearest codeword with one message excluded from the search.
    pub fn second_nearest_decode(
        &self,
        w: &ReceivedWord,
        exclude: &Message,
    ) -> Result<(Message, u64), EccError> {
        self.check_message(exclude)?;
        self.decode_excluding(w, Some(exclude.value))
    }

    /// Nearest codeword over a prefix of any length in `[1, max_len]`,
    /// including lengths below `min_prefix_len` where the distance floor
    /// gives no uniqueness guarantee. The residual is still the true
    /// minimum over all codeword prefixes, which is what running noise
    /// estimates need: it never exceeds the corruption count of the
    /// prefix, whatever the decode lands on.
    pub fn nearest_decode_prefix(&self, w: &ReceivedWord) -> Result<(Message, u64), EccError> {
        let len = w.len();
        if len == 0 || len > self.max_len {
            return Err(EccError::LengthOutOfRange { len, min: 1, max: self.max_len });
        }
        Ok(self.scan_nearest(w, None))
    }

    fn decode_excluding(
        &self,
        w: &ReceivedWord,
        exclude: Option<u64>,
    ) -> Result<(Message, u64), EccError> {
        let len = w.len();
        if len < self.min_prefix_len || len > self.max_len {
            return Err(EccError::LengthOutOfRange {
                len,
                min: self.min_prefix_len,
                max: self.max_len,
            });
        }
        Ok(self.scan_nearest(w, exclude))
    }

    fn scan_nearest(&self, w: &ReceivedWord, exclude: Option<u64>) -> (Message, u64) {
        let mut best: Option<(u64, u64)> = None;
        for (v, row) in self.codewords.iter().enumerate() {
            if exclude == Some(v as u64) {
                continue;
            }
            let d = self.distance_to_row(w, row);
            // Ascending v plus strict `<` yields the smallest-integer tie-break.
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((v as u64, d));
            }
        }
        let (v, d) = best.expect("at least one candidate codeword");
        (Message::new(v, self.message_bits).expect("value fits width"), d)
    }

    /// Exhaustive pairwise distance audit over the given prefix lengths and
    /// slices. Each probe is checked against `ceil((1 - eps) * len)`.
    pub fn verify(
        &self,
        prefixes: &[usize],
        slices: &[(usize, usize)],
    ) -> Result<FamilyReport, EccError> {
        let count = self.message_count();
        if count > VERIFY_MESSAGE_CAP {
            return Err(EccError::VerifyTooLarge { count, cap: VERIFY_MESSAGE_CAP });
        }
        for &j in prefixes {
            if j == 0 || j > self.max_len {
                return Err(EccError::BadSlice { a: 1, b: j, max: self.max_len });
            }
        }
        for &(a, b) in slices {
            if a == 0 || a > b || b > self.max_len {
                return Err(EccError::BadSlice { a, b, max: self.max_len });
            }
        }
        let mut prefix_min = vec![u64::MAX; prefixes.len()];
        let mut slice_min = vec![u64::MAX; slices.len()];
        // One cumulative mismatch pass per pair answers every probe.
        let mut cum = vec![0u64; self.max_len + 1];
        for i in 0..self.codewords.len() {
            for j in i + 1..self.codewords.len() {
                let (a, b) = (&self.codewords[i], &self.codewords[j]);
                for p in 0..self.max_len {
                    cum[p + 1] = cum[p] + u64::from(a[p] != b[p]);
                }
                for (idx, &len) in prefixes.iter().enumerate() {
                    prefix_min[idx] = prefix_min[idx].min(cum[len]);
                }
                for (idx, &(s, e)) in slices.iter().enumerate() {
                    slice_min[idx] = slice_min[idx].min(cum[e] - cum[s - 1]);
                }
            }
        }
        let probe = |start: usize, end: usize, min: u64| {
            let required = self.required_distance(end - start + 1);
            DistanceProbe { start, end, min_distance: min, required, ok: min >= required }
        };
        let prefixes: Vec<DistanceProbe> = prefixes
            .iter()
            .zip(&prefix_min)
            .map(|(&len, &min)| probe(1, len, min))
            .collect();
        let slices: Vec<DistanceProbe> = slices
            .iter()
            .zip(&slice_min)
            .map(|(&(a, b), &min)| probe(a, b, min))
            .collect();
        let all_ok = prefixes.iter().chain(&slices).all(|p| p.ok);
        Ok(FamilyReport {
            alphabet_q: self.alphabet.size(),
            dimension_k: self.dimension_k,
            message_bits: self.message_bits,
            max_len: self.max_len,
            min_prefix_len: self.min_prefix_len,
            epsilon: format!("{}/{}", self.epsilon.numer(), self.epsilon.denom()),
            prefixes,
            slices,
            all_ok,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// q=16, k=2, 8-bit messages: the standing exhaustive test family.
    fn gf16_family() -> PrefixCodeFamily {
        PrefixCodeFamily::new(16, 2, 8, 16, 8, Ratio::new(1, 8)).unwrap()
    }

    fn msg(v: u64, bits: u32) -> Message {
        Message::new(v, bits).unwrap()
    }

    /// Brute-force nearest search used as the oracle for decode tests.
    fn oracle_decode(fam: &PrefixCodeFamily, w: &ReceivedWord, exclude: Option<u64>) -> (u64, u64) {
        let mut best: Option<(u64, u64)> = None;
        for v in 0..fam.message_count() {
            if exclude == Some(v) {
                continue;
            }
            let cw = fam.encode(&msg(v, fam.message_bits()), w.len()).unwrap();
            let d = hamming(w, &cw).unwrap();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((v, d));
            }
        }
        best.unwrap()
    }

    #[test]
    fn hamming_basics() {
        let all_erased = ReceivedWord::from_letters(vec![None, None, None]);
        let letters = ReceivedWord::from_letters(vec![Some(1), Some(2), Some(3)]);
        assert_eq!(hamming(&all_erased, &letters).unwrap(), 3);
        assert_eq!(hamming(&letters, &letters).unwrap(), 0);
        assert_eq!(hamming(&all_erased, &all_erased).unwrap(), 0);
        assert!(matches!(
            hamming(&letters, &ReceivedWord::new()),
            Err(EccError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn gf16_minimum_distance_is_seven_at_len_8() {
        // k = 2 over 8 points leaves at most one agreement between distinct
        // codewords, and some pair realizes it: minimum distance exactly 7.
        let fam = gf16_family();
        let mut min = u64::MAX;
        for a in 0..fam.message_count() {
            for b in a + 1..fam.message_count() {
                let ca = fam.encode(&msg(a, 8), 8).unwrap();
                let cb = fam.encode(&msg(b, 8), 8).unwrap();
                min = min.min(hamming(&ca, &cb).unwrap());
            }
        }
        assert_eq!(min, 7);
        assert_eq!(fam.required_distance(8), 7);
    }

    #[test]
    fn prefix_property_exhaustive() {
        let fam = gf16_family();
        for v in 0..fam.message_count() {
            let full = fam.encode(&msg(v, 8), 16).unwrap();
            for j in 0..=16usize {
                let pre = fam.encode(&msg(v, 8), j).unwrap();
                assert_eq!(pre.letters[..], full.letters[..j]);
            }
        }
    }

    #[test]
    fn encode_zero_length_is_empty() {
        let fam = gf16_family();
        assert!(fam.encode(&msg(5, 8), 0).unwrap().is_empty());
    }

    #[test]
    fn slice_agrees_with_prefix_and_concatenation() {
        let fam = gf16_family();
        let x = msg(0xa7, 8);
        assert_eq!(fam.encode_slice(&x, 1, 10).unwrap(), fam.encode(&x, 10).unwrap());
        let mut glued = fam.encode(&x, 6).unwrap();
        glued.letters.extend(fam.encode_slice(&x, 7, 16).unwrap().letters);
        assert_eq!(glued, fam.encode(&x, 16).unwrap());
    }

    #[test]
    fn tail_slice_meets_distance_floor() {
        // Window positions 9..=16 have length 8 >= min_prefix_len, so the
        // pairwise floor ceil((1 - 1/8) * 8) = 7 applies to it as well.
        let fam = gf16_family();
        let mut min = u64::MAX;
        for a in 0..fam.message_count() {
            for b in a + 1..fam.message_count() {
                let ca = fam.encode_slice(&msg(a, 8), 9, 16).unwrap();
                let cb = fam.encode_slice(&msg(b, 8), 9, 16).unwrap();
                min = min.min(hamming(&ca, &cb).unwrap());
            }
        }
        assert!(min >= 7, "tail slice min distance {min} below floor 7");
    }

    #[test]
    fn decode_roundtrip_and_error_correction() {
        let fam = gf16_family();
        for v in 0..fam.message_count() {
            let x = msg(v, 8);
            let clean = fam.encode(&x, 12).unwrap();
            assert_eq!(fam.nearest_decode(&clean).unwrap(), (x, 0));

            // Corrupt strictly fewer than half of the guaranteed distance:
            // floor is 12 - 1 = 11, so 5 corruptions always decode back.
            let mut noisy = clean.clone();
            for p in 0..5 {
                let flipped = noisy.letters[p].map(|l| (l + 1) % 16);
                noisy.letters[p] = if p % 2 == 0 { None } else { flipped };
            }
            let (got, dist) = fam.nearest_decode(&noisy).unwrap();
            assert_eq!(got, x);
            assert_eq!(dist, 5);
        }
    }

    #[test]
    fn all_erased_word_breaks_ties_to_smallest_message() {
        let fam = gf16_family();
        let w = ReceivedWord::from_letters(vec![None; 9]);
        let (got, dist) = fam.nearest_decode(&w).unwrap();
        assert_eq!((got.value(), dist), (0, 9));
    }

    #[test]
    fn decode_rejects_lengths_outside_window() {
        let fam = gf16_family();
        let short = ReceivedWord::from_letters(vec![Some(0); 7]);
        assert!(matches!(
            fam.nearest_decode(&short),
            Err(EccError::LengthOutOfRange { len: 7, min: 8, max: 16 })
        ));
        let long = ReceivedWord::from_letters(vec![Some(0); 17]);
        assert!(fam.nearest_decode(&long).is_err());
    }

    #[test]
    fn prefix_decode_residual_never_exceeds_damage() {
        // Below min_prefix_len the decode can land anywhere, but the
        // residual is the minimum over all codeword prefixes, so it is
        // bounded by the damage done to any single codeword: corrupt c
        // letters of x's prefix and the residual is at most c.
        let fam = gf16_family();
        let x = msg(0xc4, 8);
        for len in 1..=16usize {
            let mut w = fam.encode(&x, len).unwrap();
            let c = len / 3;
            for p in 0..c {
                w.letters[p] = w.letters[p].map(|l| (l + 1) % 16);
            }
            let (_, e) = fam.nearest_decode_prefix(&w).unwrap();
            assert!(e <= c as u64, "len {len}: residual {e} > damage {c}");
        }
        // Clean prefixes have residual zero at every length.
        for len in 1..=16usize {
            let w = fam.encode(&x, len).unwrap();
            assert_eq!(fam.nearest_decode_prefix(&w).unwrap().1, 0);
        }
        assert!(fam.nearest_decode_prefix(&ReceivedWord::new()).is_err());
        let long = ReceivedWord::from_letters(vec![Some(0); 17]);
        assert!(fam.nearest_decode_prefix(&long).is_err());
    }

    #[test]
    fn second_nearest_matches_oracle_everywhere() {
        let fam = gf16_family();
        let w = ReceivedWord::from_letters(
            (0..10u16).map(|i| if i % 3 == 0 { None } else { Some(i) }).collect(),
        );
        for ex in [0u64, 7, 255] {
            let (got, d) = fam.second_nearest_decode(&w, &msg(ex, 8)).unwrap();
            let (ov, od) = oracle_decode(&fam, &w, Some(ex));
            assert_eq!((got.value(), d), (ov, od));
        }
        // Excluding a non-nearest message returns the plain nearest.
        let clean = fam.encode(&msg(9, 8), 10).unwrap();
        let (got, d) = fam.second_nearest_decode(&clean, &msg(200, 8)).unwrap();
        assert_eq!((got.value(), d), (9, 0));
    }

    #[test]
    fn half_split_word_decodes_to_other_half_when_nearest_excluded() {
        // First half from x0, second from x1: every third codeword is >= 3
        // mismatches away on each half, while x1 is only the first half
        // away, so excluding x0 must return x1. Holds for every pair.
        let fam = gf16_family();
        for (x0, x1) in [(3u64, 12u64), (0, 255), (17, 201)] {
            let mut w = fam.encode(&msg(x0, 8), 4).unwrap();
            w.letters.extend(fam.encode_slice(&msg(x1, 8), 5, 8).unwrap().letters);
            let (got, _) = fam.second_nearest_decode(&w, &msg(x0, 8)).unwrap();
            assert_eq!(got.value(), x1, "exclude {x0} with halves ({x0},{x1})");
        }
    }

    #[test]
    fn truncate_pad_behaviour() {
        let w = ReceivedWord::from_letters(vec![Some(5), None, Some(7)]);
        assert_eq!(truncate_pad(&w, 2).letters, vec![Some(5), None]);
        assert_eq!(
            truncate_pad(&w, 5).letters,
            vec![Some(5), None, Some(7), Some(0), Some(0)]
        );
        assert_eq!(truncate_pad(&w, 3), w);
    }

    #[test]
    fn verify_flags_and_k1_repetition() {
        let fam = gf16_family();
        let report = fam.verify(&[8, 12, 16], &[(9, 16)]).unwrap();
        assert!(report.all_ok);
        assert_eq!(report.prefixes[0].min_distance, 7);
        assert_eq!(report.prefixes[0].required, 7);

        // Probing below min_prefix_len is answered honestly and fails there.
        let short = fam.verify(&[2], &[]).unwrap();
        assert!(!short.all_ok);

        // k = 1 is a repetition-style family: distinct constants differ
        // everywhere, so relative distance is 1 at every length.
        let rep = PrefixCodeFamily::new(17, 1, 4, 17, 1, Ratio::new(1, 8)).unwrap();
        let report = rep.verify(&[1, 5, 17], &[(3, 9)]).unwrap();
        assert!(report.all_ok);
        for p in &report.prefixes {
            assert_eq!(p.min_distance as usize, p.end - p.start + 1);
        }
    }

    #[test]
    fn design_picks_minimal_prime_and_valid_dimension() {
        let fam = PrefixCodeFamily::design(8, 928, 200, Ratio::new(1, 16)).unwrap();
        assert_eq!(fam.alphabet().size(), 929);
        assert_eq!(fam.dimension_k(), 8);
        let fam = PrefixCodeFamily::design(4, 91, 64, Ratio::new(1, 64)).unwrap();
        assert_eq!(fam.alphabet().size(), 97);
        assert_eq!(fam.dimension_k(), 2);
    }

    #[test]
    fn family_rejects_bad_parameters() {
        // Dimension above the distance floor.
        assert!(PrefixCodeFamily::new(16, 3, 8, 16, 8, Ratio::new(1, 8)).is_err());
        // Alphabet smaller than the code length.
        assert!(PrefixCodeFamily::new(13, 2, 8, 16, 8, Ratio::new(1, 8)).is_err());
        // Chunks that cannot fit a field element.
        assert!(PrefixCodeFamily::new(17, 1, 8, 16, 8, Ratio::new(1, 8)).is_err());
        // Unsupported alphabet order (neither prime nor power of two).
        assert!(PrefixCodeFamily::new(15, 2, 8, 15, 8, Ratio::new(1, 8)).is_err());
        // Epsilon outside (0, 1).
        assert!(PrefixCodeFamily::new(16, 2, 8, 16, 8, Ratio::new(3, 2)).is_err());
    }

    #[test]
    fn message_pair_roundtrip() {
        let x = msg(0b1011, 4);
        let y = msg(0b0110, 4);
        let p = Message::pair(x, y).unwrap();
        assert_eq!(p.value(), 0b1011_0110);
        assert_eq!(p.split(4, 4).unwrap(), (x, y));
        assert_eq!(p.bit(1), 1);
        assert_eq!(p.bit(0), 0);
    }
}
