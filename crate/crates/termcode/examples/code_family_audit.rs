//! Designs a prefix-coherent code family, shows what coherence buys, and
//! audits the minimum distance of every prefix the protocols rely on.
//!
//! One codeword per message, evaluated out to `max_len` letters; cutting
//! it at any length J >= min_prefix_len leaves a code of relative
//! distance at least 1 - epsilon. Protocols exploit exactly that: the
//! reply can stop early, or run long, and stay decodable either way.

use num_rational::Ratio;
use termcode::ecc::{Message, PrefixCodeFamily, ReceivedWord};
use termcode::harness::{verify_codes, verify_summary, CodesSection};

fn main() {
    let family = PrefixCodeFamily::design(8, 256, 64, Ratio::new(1, 16)).unwrap();
    let x = Message::new(0xb7, 8).unwrap();

    // Prefix coherence: the 64-letter encoding is literally the first 64
    // letters of the 256-letter one.
    let short = family.encode(&x, 64).unwrap();
    let long = family.encode(&x, 256).unwrap();
    assert_eq!(short.letters[..], long.letters[..64]);
    println!("encode(x, 64) is a prefix of encode(x, 256): coherent");

    // Decode under damage: corrupt 20 letters, erase 10 more.
    let mut word = long.clone();
    for i in 0..20 {
        let pos = 11 * i % 256;
        let honest = long.letters[pos].expect("encoded letters are present");
        word.letters[pos] = Some(if honest == 0 { 1 } else { 0 });
    }
    for i in 0..10 {
        word.letters[(7 * i + 3) % 256] = None;
    }
    let (decoded, distance) = family.nearest_decode(&word).unwrap();
    println!("after 20 corruptions + 10 erasures: decoded {decoded} at distance {distance}");
    assert_eq!(decoded, x);

    // Coherence again, now while decoding: any prefix of the damaged word
    // is itself a word of the length-90 prefix code.
    let prefix = ReceivedWord::from_letters(word.letters[..90].to_vec());
    let (from_prefix, residual) = family.nearest_decode_prefix(&prefix).unwrap();
    println!("decoding only the first 90 letters: {from_prefix} at distance {residual}");
    assert_eq!(from_prefix, x);

    // Exhaustive distance audit over a prefix grid plus one slice.
    let report = verify_codes(&CodesSection {
        message_bits: 8,
        max_len: 256,
        min_prefix_len: 64,
        epsilon: "1/16".into(),
        prefix_step: Some(32),
        slices: vec![[65, 256]],
        alphabet: None,
    })
    .unwrap();
    println!();
    print!("{}", verify_summary(&report));
    assert!(report.all_ok);
}
