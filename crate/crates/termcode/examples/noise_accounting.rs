//! One damaged transcript, four ways to bill it.
//!
//! The corruption *rate* of a run is corruptions over a denominator, and
//! the denominator is where the models disagree: rounds until the first
//! party stopped, until the last one stopped, until the last live symbol
//! was sent, or — on feedback channels only — until the common stop.
//! An adversary who looks weak under one clock can be over budget under
//! another, which is why every report names its model.

use num_rational::Ratio;
use termcode::ecc::Message;
use termcode::engine::{
    noise_rate, transcript_hash, transcript_lines, Adversary, ChannelSymbol, NoiseModel, Party,
    RoundRecord,
};
use termcode::protocols::{ProtocolId, ProtocolInstance, ProtocolParams};

/// Replaces the letters of a fixed set of early rounds.
struct Smudge(&'static [u64]);

impl Adversary for Smudge {
    fn deliver(
        &mut self,
        round: u64,
        _speaker: Party,
        sent: ChannelSymbol,
        _history: &[RoundRecord],
    ) -> ChannelSymbol {
        match sent {
            ChannelSymbol::Letter(l) if self.0.contains(&round) => {
                ChannelSymbol::Letter(if l == 0 { 1 } else { 0 })
            }
            other => other,
        }
    }
}

fn main() {
    let params =
        ProtocolParams::symmetric(ProtocolId::FullSqrt2, 4, 64, Ratio::new(1, 8));
    let instance = ProtocolInstance::build(params).unwrap();
    let (x, y) = (Message::new(11, 4).unwrap(), Message::new(6, 4).unwrap());
    let mut channel = Smudge(&[3, 9, 70, 71]);
    let result = instance.run(x, y, &mut channel).unwrap();

    println!("first rounds of the transcript (* marks a corruption):");
    for line in transcript_lines(&result).lines().take(5) {
        println!("  {line}");
    }
    println!("  ...");
    println!("transcript hash: {}", &transcript_hash(&result)[..16]);
    println!();
    println!(
        "alice stopped at {:?}, bob at {:?}, {} rounds ran in total",
        result.alice_term,
        result.bob_term,
        result.rounds.len()
    );
    println!();

    for model in [
        NoiseModel::FirstTermination,
        NoiseModel::FullTermination,
        NoiseModel::SpeakerTermination,
    ] {
        let acct = noise_rate(&result, model).unwrap();
        println!(
            "{:<20} {:>2} corruptions / {:>3} rounds = {}",
            model.to_string(),
            acct.corruptions,
            acct.denominator,
            acct.rate()
        );
    }
    // This scheme's parties stop at different rounds, so the feedback
    // clock — which requires a common stop — refuses to bill it at all.
    let err = noise_rate(&result, NoiseModel::Feedback).unwrap_err();
    println!("{:<20} {err}", NoiseModel::Feedback.to_string());
}
