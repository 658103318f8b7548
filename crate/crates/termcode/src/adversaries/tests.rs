use num_rational::Ratio;
use proptest::prelude::*;

use super::*;
use crate::ecc::hamming;
use crate::engine::transcript_hash;
use crate::protocols::{ProtocolId, ProtocolParams};

fn msg(value: u64, bits: u32) -> Message {
    Message::new(value, bits).unwrap()
}

fn build(id: ProtocolId, bits: u32, block_len: u64, eps: (i64, i64)) -> ProtocolInstance {
    ProtocolInstance::build(ProtocolParams::symmetric(id, bits, block_len, Ratio::new(eps.0, eps.1)))
        .unwrap()
}

/// Tries to wreck every round; what gets through is up to the wrapper.
struct Wrecker;

impl Adversary for Wrecker {
    fn deliver(
        &mut self,
        _round: u64,
        _speaker: Party,
        _sent: ChannelSymbol,
        _history: &[RoundRecord],
    ) -> ChannelSymbol {
        ChannelSymbol::Silence
    }
}

fn flagged(result: &SessionResult) -> u64 {
    result.rounds.iter().filter(|r| r.corrupted).count() as u64
}

#[test]
fn random_channel_stays_inside_its_budget_under_every_model() {
    let inst = build(ProtocolId::FullSqrt2, 4, 64, (1, 8));
    let budget = Ratio::new(1u64, 5);
    for seed in 0..20 {
        let mut adv = RandomBudgeted::new(inst.universe(), budget, seed).unwrap();
        let result = inst.run(msg(9, 4), msg(4, 4), &mut adv).unwrap();
        assert_eq!(adv.corruptions(), flagged(&result), "seed {seed}");
        for model in [
            NoiseModel::FirstTermination,
            NoiseModel::FullTermination,
            NoiseModel::SpeakerTermination,
        ] {
            let acc = noise_rate(&result, model).unwrap();
            assert!(acc.rate() <= budget, "seed {seed} {model}: {acc:?}");
        }
    }
    // Same seed, same transcript.
    let run = |seed| {
        let mut adv = RandomBudgeted::new(inst.universe(), budget, seed).unwrap();
        transcript_hash(&inst.run(msg(9, 4), msg(4, 4), &mut adv).unwrap())
    };
    assert_eq!(run(7), run(7));
    assert_ne!(run(7), run(8));
    // Fraction zero never touches a symbol.
    let mut silent = RandomBudgeted::new(inst.universe(), Ratio::new(0, 1), 3).unwrap();
    let result = inst.run(msg(9, 4), msg(4, 4), &mut silent).unwrap();
    assert_eq!(flagged(&result), 0);
    assert!(RandomBudgeted::new(inst.universe(), Ratio::new(5, 5), 0).is_err());
}

#[test]
fn pacing_wrapper_holds_any_channel_to_its_cap() {
    let inst = build(ProtocolId::Second27, 4, 60, (1, 16));
    let mut adv = Paced::new(Wrecker, Ratio::new(1u64, 4));
    let result = inst.run(msg(3, 4), msg(12, 4), &mut adv).unwrap();
    assert_eq!(adv.corruptions(), flagged(&result));
    assert!(adv.corruptions() > 0);
    let mut seen = 0u64;
    for rec in &result.rounds {
        seen += u64::from(rec.corrupted);
        assert!(seen * 4 <= rec.round, "rate exceeded cap at round {}", rec.round);
    }
    let mut capped = Paced::new(Wrecker, Ratio::new(1u64, 4)).with_max_corruptions(3);
    let result = inst.run(msg(3, 4), msg(12, 4), &mut capped).unwrap();
    assert_eq!(capped.corruptions(), 3);
    assert_eq!(flagged(&result), 3);
}

#[test]
fn half_split_drives_the_responder_past_his_residual_bound() {
    let inst = build(ProtocolId::FullSqrt2, 4, 200, (1, 64));
    let (x0, x1) = (msg(3, 4), msg(12, 4));
    let mut adv = HalfSplit::new(&inst, x0, x1).unwrap();
    let (result, instr) = inst.run_instrumented(x0, msg(5, 4), &mut adv).unwrap();
    // Alice holds x0, so even block positions are already right.
    assert!(adv.corruptions() <= 100);
    assert!(result
        .rounds
        .iter()
        .take(200)
        .filter(|r| r.round % 2 == 0)
        .all(|r| !r.corrupted));
    // The mixture keeps every codeword at distance >= 99, past the
    // give-up bound 2t/(1 - eps) >= N, so Bob declines to answer.
    assert!(instr.responder_residual_t.unwrap() >= 99);
    assert_eq!(result.bob_output, Some(PartyOutput::Arbitrary));
    // Splitting between identical inputs is free.
    let mut free = HalfSplit::new(&inst, x0, x0).unwrap();
    let result = inst.run(x0, msg(5, 4), &mut free).unwrap();
    assert_eq!(free.corruptions(), 0);
    assert_eq!(flagged(&result), 0);
}

#[test]
fn alternating_copies_speak_for_the_true_holder_on_odd_rounds() {
    let inst = build(ProtocolId::NaiveExchange, 4, 40, (1, 8));
    let x = msg(2, 4);
    let (y1, y2) = (msg(6, 4), msg(11, 4));

    let mut adv = AlternatingInputs::new(&inst, Party::Bob, y1, y2).unwrap();
    let r_first = inst.run(x, y1, &mut adv).unwrap();
    let bob_rounds: Vec<&RoundRecord> =
        r_first.rounds.iter().filter(|r| r.speaker == Party::Bob).collect();
    // Odd speaking rounds replay the y1 copy, which tracks the real Bob
    // exactly, so they can never cost anything.
    for (i, rec) in bob_rounds.iter().enumerate() {
        if i % 2 == 0 {
            assert!(!rec.corrupted, "odd speaking round {} was corrupted", rec.round);
        }
    }
    assert!(adv.corruptions() <= bob_rounds.len() as u64 / 2);
    assert_eq!(adv.corruptions(), flagged(&r_first));

    // Whichever of the two inputs Bob really holds, the listener's view
    // is the same — so Alice's decision fails in one of the worlds.
    let mut adv = AlternatingInputs::new(&inst, Party::Bob, y1, y2).unwrap();
    let r_second = inst.run(x, y2, &mut adv).unwrap();
    let delivered =
        |r: &SessionResult| r.rounds.iter().map(|rec| rec.delivered).collect::<Vec<_>>();
    assert_eq!(delivered(&r_first), delivered(&r_second));
    assert_eq!(r_first.alice_output, r_second.alice_output);
    let s1 = AttackReport::from_run(&inst, x, y1, r_first).success;
    let s2 = AttackReport::from_run(&inst, x, y2, r_second).success;
    assert!(s1 || s2);

    // Identical candidates: the copies always agree with the victim.
    let mut same = AlternatingInputs::new(&inst, Party::Bob, y1, y1).unwrap();
    let result = inst.run(x, y1, &mut same).unwrap();
    assert_eq!(same.corruptions(), 0);
    assert_eq!(flagged(&result), 0);
}

#[test]
fn alternating_attack_confuses_the_feedback_listener() {
    let inst = build(ProtocolId::FeedbackTernary, 4, 0, (1, 4));
    let x = msg(2, 4);
    let (y1, y2) = (msg(6, 4), msg(11, 4));
    let run = |y: Message| {
        let mut adv = AlternatingInputs::new(&inst, Party::Bob, y1, y2).unwrap();
        let result = inst.run(x, y, &mut adv).unwrap();
        let corruptions = adv.corruptions();
        (result, corruptions)
    };
    let (r_first, c_first) = run(y1);
    let (r_second, _) = run(y2);
    assert_eq!(c_first, flagged(&r_first));
    // Common termination survives the attack: both stacks are functions
    // of the delivered stream both parties share.
    assert_eq!(r_first.alice_term, r_first.bob_term);
    let delivered =
        |r: &SessionResult| r.rounds.iter().map(|rec| rec.delivered).collect::<Vec<_>>();
    assert_eq!(delivered(&r_first), delivered(&r_second));
    assert_eq!(r_first.alice_output, r_second.alice_output);
    let s1 = AttackReport::from_run(&inst, x, y1, r_first).success;
    let s2 = AttackReport::from_run(&inst, x, y2, r_second).success;
    assert!(s1 || s2);
}

#[test]
fn forced_view_walks_the_victim_to_a_foreign_ending() {
    let inst = build(ProtocolId::NaiveExchange, 4, 40, (1, 8));
    let (x_real, x_fake, y) = (msg(2, 4), msg(13, 4), msg(6, 4));
    let reference = inst.run(x_fake, y, &mut PassthroughChannel).unwrap();
    let script = harvest_view(&reference, Party::Bob);
    assert_eq!(script.len(), 40);

    let mut adv = ForceTerminate::new(Party::Bob, script.clone());
    let result = inst.run(x_real, y, &mut adv).unwrap();
    assert!(!adv.incomplete());
    // Bob's whole view came from the x_fake world, so that is where he ends.
    assert_eq!(result.bob_output, Some(PartyOutput::Pair(x_fake, y)));
    let code = inst.alice_block_code().unwrap();
    let d = hamming(&code.encode(&x_real, 40).unwrap(), &code.encode(&x_fake, 40).unwrap())
        .unwrap();
    assert_eq!(adv.corruptions(), d);

    // A script harvested from the victim's own run is free.
    let own = harvest_view(&inst.run(x_real, y, &mut PassthroughChannel).unwrap(), Party::Bob);
    let mut free = ForceTerminate::new(Party::Bob, own);
    let result = inst.run(x_real, y, &mut free).unwrap();
    assert_eq!(free.corruptions(), 0);
    assert_eq!(flagged(&result), 0);

    // A short script runs out and says so.
    let mut short = ForceTerminate::new(Party::Bob, script[..3].to_vec());
    inst.run(x_real, y, &mut short).unwrap();
    assert!(short.incomplete());
}

#[test]
fn majority_bit_counters_stay_inside_the_proof_bounds() {
    let inst = build(ProtocolId::NaiveFeedbackBinary, 4, 0, (1, 4));
    let a = [msg(1, 4), msg(2, 4), msg(4, 4)];
    let b = [msg(9, 4), msg(10, 4), msg(12, 4)];
    let mut adv = MajorityBit::new(&inst, a, b).unwrap();
    let result = inst.run(a[0], b[0], &mut adv).unwrap();
    assert_eq!(adv.corruptions(), flagged(&result));

    for (i, (xs, ys)) in adv.counter_history().iter().enumerate() {
        let r = i as u64 + 1;
        let total: u64 = xs.iter().sum::<u64>() + ys.iter().sum::<u64>();
        assert!(total <= r, "round {r}: counters {xs:?} {ys:?} exceed the round count");
        let pair_ok = xs.iter().any(|x| ys.iter().any(|y| x + y <= r.div_ceil(3)));
        assert!(pair_ok, "round {r}: no candidate pair within r/3");
    }
    // The true holders' counters are exactly the corruptions on their side:
    // their copies always vote what was really sent.
    let (xc, yc) = adv.counters();
    let side = |party: Party| {
        result.rounds.iter().filter(|r| r.speaker == party && r.corrupted).count() as u64
    };
    assert_eq!(xc[0], side(Party::Alice));
    assert_eq!(yc[0], side(Party::Bob));
    // The majority view replaces both inputs wholesale here, so neither
    // side can be right.
    assert!(AttackReport::from_run(&inst, a[0], b[0], result).success);

    let ternary = build(ProtocolId::FeedbackTernary, 4, 0, (1, 4));
    assert!(matches!(
        MajorityBit::new(&ternary, a, b),
        Err(AdversaryError::NotBinaryFeedback)
    ));
}

#[test]
fn greedy_flip_price_matches_the_exhaustive_oracle() {
    let inst = build(ProtocolId::NaiveExchange, 4, 64, (1, 8));
    let (x, y, target) = (msg(9, 4), msg(5, 4), msg(4, 4));
    let code = inst.alice_block_code().unwrap();
    let wx = code.encode(&x, 64).unwrap();
    let wt = code.encode(&target, 64).unwrap();
    let d = hamming(&wx, &wt).unwrap();

    // Oracle: rewrite disagreeing positions left to right and re-decode
    // after each step until the block flips.
    let mut oracle = None;
    let mut w = wx.clone();
    let mut cost = 0u64;
    for pos in 0..64 {
        if wx.letters[pos] == wt.letters[pos] {
            continue;
        }
        w.letters[pos] = wt.letters[pos];
        cost += 1;
        if code.nearest_decode(&w).unwrap().0 == target {
            oracle = Some(cost);
            break;
        }
    }
    let oracle = oracle.unwrap();
    // The target outranks the input on decode ties, so the flip lands at
    // exactly half the pair distance, rounded up.
    assert_eq!(oracle, d.div_ceil(2));

    let mut adv = GreedyDecodeFlip::new(&inst, x, target).unwrap();
    let result = inst.run(x, y, &mut adv).unwrap();
    assert!(adv.flipped());
    assert!(!adv.incomplete());
    assert_eq!(adv.corruptions(), oracle);
    assert_eq!(adv.corruptions(), flagged(&result));
    assert_eq!(result.bob_output, Some(PartyOutput::Pair(target, y)));

    // One corruption short of the flip leaves the decode untouched.
    let mut starved = GreedyDecodeFlip::new(&inst, x, target).unwrap().with_budget(oracle - 1);
    let result = inst.run(x, y, &mut starved).unwrap();
    assert!(starved.incomplete());
    assert!(!starved.flipped());
    assert_eq!(starved.corruptions(), oracle - 1);
    assert_eq!(result.bob_output, Some(PartyOutput::Pair(x, y)));

    // Flipping to the truth costs nothing.
    let mut trivial = GreedyDecodeFlip::new(&inst, x, x).unwrap();
    let result = inst.run(x, y, &mut trivial).unwrap();
    assert!(trivial.flipped());
    assert_eq!(trivial.corruptions(), 0);
    assert_eq!(flagged(&result), 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The paced random channel reports exactly the transcript's damage
    /// and never exceeds its budget at any prefix or under any model.
    #[test]
    fn paced_random_channels_report_exactly_the_transcript_damage(
        seed in 0u64..1 << 48,
        num in 0u64..30,
        den in 30u64..60,
    ) {
        let fraction = Ratio::new(num, den);
        let inst = build(ProtocolId::NaiveExchange, 4, 16, (1, 4));
        let mut adv = RandomBudgeted::new(inst.universe(), fraction, seed).unwrap();
        let result = inst.run(msg(11, 4), msg(6, 4), &mut adv).unwrap();
        prop_assert_eq!(adv.corruptions(), flagged(&result));
        let mut seen = 0u64;
        for rec in &result.rounds {
            seen += u64::from(rec.corrupted);
            prop_assert!(seen * den <= num * rec.round);
        }
        for model in [
            NoiseModel::FirstTermination,
            NoiseModel::FullTermination,
            NoiseModel::SpeakerTermination,
        ] {
            prop_assert!(noise_rate(&result, model).unwrap().rate() <= fraction);
        }
    }
}
