//! Length and threshold formulas for the protocol suite.
//!
//! Everything integer-valued is computed in exact integer arithmetic;
//! quantities built from irrational constants (√2, √57) are evaluated in
//! double precision and ceiled, which is exact for every block size this
//! crate accepts. Rational thresholds are compared exactly via
//! cross-multiplication so no boundary case depends on float rounding.

use num_rational::Ratio;

/// √57, the constant behind the stronger speaker-model scheme.
pub fn sqrt57() -> f64 {
    57f64.sqrt()
}

/// ⌈√2 · n⌉ — the responder's full reply length in the √2 scheme.
pub fn sqrt2_reply_cap(n: u64) -> u64 {
    (std::f64::consts::SQRT_2 * n as f64).ceil() as u64
}

/// ⌈√2·n − 2√2·t⌉, clamped to at least 1: the responder's reply length
/// after observing residual distance `t`.
pub fn sqrt2_reply_len(n: u64, t: u64) -> u64 {
    let raw = std::f64::consts::SQRT_2 * (n as f64 - 2.0 * t as f64);
    (raw.ceil() as i64).max(1) as u64
}

/// Exact test of `t >= (1 - eps)/2 · n`, the responder's give-up trigger
/// in the √2 and 2/7 schemes.
pub fn half_distance_trigger(n: u64, t: u64, eps: Ratio<i64>) -> bool {
    let (p, d) = (*eps.numer() as u64, *eps.denom() as u64);
    2 * t * d >= (d - p) * n
}

/// Exact test of `e > n/√2`: the sender's stop rule in the √2 scheme.
/// Both sides squared keeps the comparison integral.
pub fn sqrt2_stop_trigger(n: u64, e: u64) -> bool {
    2 * (e as u128) * (e as u128) > (n as u128) * (n as u128)
}

/// ⌈4n/3⌉ — reply cap in the 2/7 scheme.
pub fn two7_reply_cap(n: u64) -> u64 {
    (4 * n).div_ceil(3)
}

/// Piecewise reply length of the 2/7 scheme: `⌈4n/3⌉ − 2t` while
/// `t < n/3`, then `2n − 4t` (clamped at 0 for out-of-range residuals).
pub fn two7_reply_len(n: u64, t: u64) -> u64 {
    if 3 * t < n {
        two7_reply_cap(n) - 2 * t
    } else {
        (2 * n).saturating_sub(4 * t)
    }
}

/// ⌈2n/3⌉ — how many ∅ symbols end the sender's listening in the 2/7
/// scheme; exact integer test is `3 · count >= 2n`.
pub fn two7_silence_quota(n: u64) -> u64 {
    (2 * n).div_ceil(3)
}

/// ⌈7n/3⌉ — responder block in the 7/20 speaker scheme.
pub fn s720_reply_len(n: u64) -> u64 {
    (7 * n).div_ceil(3)
}

/// ⌈10n/3⌉ — sender extension window in the 7/20 speaker scheme.
pub fn s720_window_len(n: u64) -> u64 {
    (10 * n).div_ceil(3)
}

/// ⌈10n/3 − 20s/7⌉ — the sender's extension length given residual `s`.
pub fn s720_extension_len(n: u64, s: u64) -> u64 {
    (70 * n - 60 * s).div_ceil(21)
}

/// Exact `s >= 2n/3` — sender stop trigger in the 7/20 scheme.
pub fn s720_sender_stop(n: u64, s: u64) -> bool {
    3 * s >= 2 * n
}

/// Exact `delta < 7n/6 − t` — responder keeps the first decode iff the
/// extension window stayed quiet enough.
pub fn s720_keep_first(n: u64, t: u64, delta: u64) -> bool {
    6 * (delta + t) < 7 * n
}

/// ⌈(3+√57)/4 · n⌉ — responder block in the stronger speaker scheme.
pub fn s957_reply_len(n: u64) -> u64 {
    ((3.0 + sqrt57()) / 4.0 * n as f64).ceil() as u64
}

/// ⌈(7+√57)/4 · n⌉ — extension window in the stronger speaker scheme.
pub fn s957_window_len(n: u64) -> u64 {
    ((7.0 + sqrt57()) / 4.0 * n as f64).ceil() as u64
}

/// `t >= (9−√57)/4 · n` — responder's give-up trigger (irrational
/// threshold, never integral).
pub fn s957_responder_giveup(n: u64, t: u64) -> bool {
    t as f64 >= (9.0 - sqrt57()) / 4.0 * n as f64
}

/// `s >= (√57−1)/8 · n` — sender stop trigger.
pub fn s957_sender_stop(n: u64, s: u64) -> bool {
    s as f64 >= (sqrt57() - 1.0) / 8.0 * n as f64
}

/// ⌈M − (9+√57)/6·s⌉ — extension length given residual `s`, counted
/// down from the integer window length M.
pub fn s957_extension_len(n: u64, s: u64) -> u64 {
    let raw = s957_window_len(n) as f64 - (9.0 + sqrt57()) / 6.0 * s as f64;
    (raw.ceil() as i64).max(1) as u64
}

/// `delta < (3+√57)/8 · n − t` — responder keeps the first decode.
pub fn s957_keep_first(n: u64, t: u64, delta: u64) -> bool {
    (delta as f64) < (3.0 + sqrt57()) / 8.0 * n as f64 - t as f64
}

/// The geometric growth factor of the first-termination batch scheme:
/// `C = 1/eps − 1`, defined only when that is an integer at least 2
/// (i.e. eps = 1/(C+1) with eps <= 1/3).
pub fn batch_growth_factor(eps: Ratio<i64>) -> Option<u64> {
    let (p, d) = (*eps.numer(), *eps.denom());
    if p <= 0 || (d - p) % p != 0 {
        return None;
    }
    let c = ((d - p) / p) as u64;
    (c >= 2).then_some(c)
}

/// Length of batch `j` in the first-termination scheme: `C^j · n`.
/// `None` when the schedule would not fit in the simulator.
pub fn batch_len(n: u64, c: u64, j: u32) -> Option<u64> {
    let len = (n as u128).checked_mul((c as u128).checked_pow(j)?)?;
    u64::try_from(len).ok().filter(|&l| l <= 1 << 40)
}

/// Total rounds through batch `2·y_max + 1` inclusive.
pub fn batch_total(n: u64, c: u64, y_max: u64) -> Option<u64> {
    let last = u32::try_from(2 * y_max + 1).ok()?;
    let mut total: u64 = 0;
    for j in 0..=last {
        total = total.checked_add(batch_len(n, c, j)?)?;
    }
    (total <= 1 << 40).then_some(total)
}

/// ⌈bits/eps⌉ — the shared-guess target length in the feedback scheme.
pub fn feedback_target_len(bits: u64, eps: Ratio<i64>) -> u64 {
    let (p, d) = (*eps.numer() as u64, *eps.denom() as u64);
    (bits * d).div_ceil(p)
}

/// ⌈bits/eps²⌉ — the feedback scheme's hard round cap.
pub fn feedback_round_cap(bits: u64, eps: Ratio<i64>) -> u64 {
    let (p, d) = (*eps.numer() as u64, *eps.denom() as u64);
    (bits * d * d).div_ceil(p * p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt2_lengths_frozen() {
        // N=200, t=30: √2·200 − 2√2·30 = 197.989… → 198.
        assert_eq!(sqrt2_reply_len(200, 30), 198);
        assert_eq!(sqrt2_reply_cap(200), 283);
        assert_eq!(sqrt2_reply_cap(256), 363);
        assert_eq!(sqrt2_reply_cap(64), 91);
        // t = 0 reply spans the whole cap.
        assert_eq!(sqrt2_reply_len(256, 0), sqrt2_reply_cap(256));
        // The stop rule is strict: e² must exceed n²/2.
        assert!(!sqrt2_stop_trigger(200, 141)); // 141² · 2 = 39762 < 40000
        assert!(sqrt2_stop_trigger(200, 142)); // 142² · 2 = 40328 > 40000
    }

    #[test]
    fn two7_lengths_frozen() {
        // N=300, t=120 sits in the second branch: 2·300 − 4·120 = 120.
        assert_eq!(two7_reply_len(300, 120), 120);
        assert_eq!(two7_reply_len(300, 0), 400);
        // Branch boundary t = N/3 = 100: both branches meet at 200.
        assert_eq!(two7_reply_len(300, 99), 400 - 198);
        assert_eq!(two7_reply_len(300, 100), 200);
        assert_eq!(two7_silence_quota(300), 200);
        assert_eq!(two7_silence_quota(240), 160);
        // Give-up trigger at (1 − 1/16)/2 · 240 = 112.5: first integer 113.
        let eps = Ratio::new(1, 16);
        assert!(!half_distance_trigger(240, 112, eps));
        assert!(half_distance_trigger(240, 113, eps));
    }

    #[test]
    fn s720_lengths_frozen() {
        // N=210, s=70: 10·210/3 − 20·70/7 = 700 − 200 = 500.
        assert_eq!(s720_extension_len(210, 70), 500);
        assert_eq!(s720_reply_len(210), 490);
        assert_eq!(s720_window_len(210), 700);
        // s = 0 extension fills the whole window.
        assert_eq!(s720_extension_len(210, 0), s720_window_len(210));
        assert_eq!(s720_reply_len(224), 523);
        assert_eq!(s720_window_len(224), 747);
        // Keep-first boundary: delta + t < 7N/6.
        assert!(s720_keep_first(224, 100, 161)); // 6·261 = 1566 < 1568
        assert!(!s720_keep_first(224, 100, 162));
        assert!(s720_sender_stop(210, 140));
        assert!(!s720_sender_stop(210, 139));
    }

    #[test]
    fn s957_lengths_frozen() {
        // N=160: (3+√57)/4·160 = 421.99… → 422; (7+√57)/4·160 = 581.99… → 582.
        assert_eq!(s957_reply_len(160), 422);
        assert_eq!(s957_window_len(160), 582);
        assert_eq!(s957_reply_len(224), 591);
        assert_eq!(s957_window_len(224), 815);
        assert_eq!(s957_extension_len(224, 0), s957_window_len(224));
        // Responder give-up threshold (9−√57)/4·224 = 81.209…
        assert!(!s957_responder_giveup(224, 81));
        assert!(s957_responder_giveup(224, 82));
        // Sender stop threshold (√57−1)/8·224 = 183.39…
        assert!(!s957_sender_stop(224, 183));
        assert!(s957_sender_stop(224, 184));
    }

    #[test]
    fn s957_extension_matches_alternate_form() {
        // (9+√57)/6 equals 4/(9−√57) exactly (multiply through by the
        // conjugate: (9+√57)(9−√57) = 24); the two published forms of the
        // extension length must agree for every residual.
        let n = 224;
        let m = s957_window_len(n) as f64;
        for s in 0..=183u64 {
            let alt = (m - 4.0 / (9.0 - sqrt57()) * s as f64).ceil() as u64;
            assert_eq!(s957_extension_len(n, s), alt, "s = {s}");
        }
    }

    #[test]
    fn extension_lengths_shrink_as_residual_grows() {
        for s in 1..=140u64 {
            assert!(s720_extension_len(210, s) <= s720_extension_len(210, s - 1));
            assert!(s957_extension_len(224, s) <= s957_extension_len(224, s - 1));
            assert!(sqrt2_reply_len(256, s) <= sqrt2_reply_len(256, s - 1));
            assert!(two7_reply_len(300, s) <= two7_reply_len(300, s - 1));
        }
    }

    #[test]
    fn batch_scheme_parameters() {
        assert_eq!(batch_growth_factor(Ratio::new(1, 4)), Some(3));
        assert_eq!(batch_growth_factor(Ratio::new(1, 3)), Some(2));
        assert_eq!(batch_growth_factor(Ratio::new(1, 16)), Some(15));
        // 2/7 is not of the form 1/(C+1); 1/2 gives C = 1 < 2.
        assert_eq!(batch_growth_factor(Ratio::new(2, 7)), None);
        assert_eq!(batch_growth_factor(Ratio::new(1, 2)), None);

        let lens: Vec<u64> = (0..6).map(|j| batch_len(27, 3, j).unwrap()).collect();
        assert_eq!(lens, vec![27, 81, 243, 729, 2187, 6561]);
        assert_eq!(batch_total(27, 3, 2), Some(27 * (3u64.pow(6) - 1) / 2));
        assert_eq!(batch_total(8, 2, 3), Some(8 * 255));
        // Doubly-exponential schedules overflow the simulator bound.
        assert_eq!(batch_total(8, 15, 15), None);
    }

    #[test]
    fn feedback_lengths() {
        let eps = Ratio::new(1, 8);
        assert_eq!(feedback_target_len(8, eps), 64);
        assert_eq!(feedback_round_cap(8, eps), 512);
        // Non-divisible widths round up.
        let rough = Ratio::new(2, 7);
        assert_eq!(feedback_target_len(5, rough), 18); // ⌈35/2⌉
        assert_eq!(feedback_round_cap(5, rough), 62); // ⌈245/4⌉
    }
}
