//! Code-family audit: designs the configured family and measures the
//! true minimum distance of every requested prefix and slice.

use super::config::{parse_ratio_i64, CodesSection};
use super::HarnessError;
use crate::ecc::{FamilyReport, PrefixCodeFamily};

/// Designs the family described by `[codes]` and exhaustively verifies
/// the prefix grid (min_prefix_len up to max_len in prefix_step strides,
/// max_len always included) plus any extra slices.
pub fn verify_codes(codes: &CodesSection) -> Result<FamilyReport, HarnessError> {
    let epsilon = parse_ratio_i64(&codes.epsilon)?;
    let family = match codes.alphabet {
        Some(q) => PrefixCodeFamily::design_with_alphabet(
            q,
            codes.message_bits,
            codes.max_len,
            codes.min_prefix_len,
            epsilon,
        )?,
        None => PrefixCodeFamily::design(
            codes.message_bits,
            codes.max_len,
            codes.min_prefix_len,
            epsilon,
        )?,
    };
    let step = codes.prefix_step.unwrap_or(1);
    let mut prefixes: Vec<usize> =
        (codes.min_prefix_len..=codes.max_len).step_by(step).collect();
    if prefixes.last() != Some(&codes.max_len) {
        prefixes.push(codes.max_len);
    }
    let slices: Vec<(usize, usize)> = codes.slices.iter().map(|s| (s[0], s[1])).collect();
    Ok(family.verify(&prefixes, &slices)?)
}

/// One line per probe plus a family summary line, for terminal output.
pub fn verify_summary(report: &FamilyReport) -> String {
    let mut out = String::new();
    for p in &report.prefixes {
        out.push_str(&format!(
            "prefix [{:>4}, {:>4}] min_distance={:>4} required={:>4} {}\n",
            p.start,
            p.end,
            p.min_distance,
            p.required,
            if p.ok { "ok" } else { "SHORT" },
        ));
    }
    for s in &report.slices {
        out.push_str(&format!(
            "slice  [{:>4}, {:>4}] min_distance={:>4} required={:>4} {}\n",
            s.start,
            s.end,
            s.min_distance,
            s.required,
            if s.ok { "ok" } else { "SHORT" },
        ));
    }
    out.push_str(&format!(
        "family q={} k={} bits={} max_len={} epsilon={} all_ok={}\n",
        report.alphabet_q,
        report.dimension_k,
        report.message_bits,
        report.max_len,
        report.epsilon,
        report.all_ok,
    ));
    out
}
