//! Walks a budget grid toward a scheme's claimed noise threshold: random
//! noise below the claim never flips an output, and the scripted attack
//! that finally does flip one has to pay a rate above it.

use num_rational::Ratio;
use termcode::adversaries::{AlternatingInputs, AttackReport};
use termcode::ecc::Message;
use termcode::engine::{NoiseModel, Party};
use termcode::harness::{run_sweep, ExperimentConfig};
use termcode::protocols::{ProtocolId, ProtocolInstance, ProtocolParams};

fn main() {
    // 2/7 - eps = 0.2225 claimed for this scheme at eps = 1/16.
    let config = ExperimentConfig::from_toml_str(
        r#"
        [protocol]
        id = "second_2_7"
        n = 4
        block_len = 120
        epsilon = "1/16"

        [inputs]
        mode = "sampled"
        count = 4
        seed = 11

        [adversary]
        kind = "random_budgeted"
        seeds = [0, 1, 2]
        budgets = ["1/10", "1/7", "1/5"]
        "#,
    )
    .unwrap();
    let report = run_sweep(&config, None).unwrap();
    let threshold = report.claimed_threshold.unwrap();

    println!("random noise against second_2_7 (claimed threshold {threshold:.4}):");
    for budget in ["1/10", "1/7", "1/5"] {
        let rows: Vec<_> = report.rows.iter().filter(|r| r.budget == budget).collect();
        let failures = rows.iter().filter(|r| !r.correct).count();
        let worst = rows
            .iter()
            .map(|r| r.corruptions as f64 / r.denominator.max(1) as f64)
            .fold(0.0, f64::max);
        println!(
            "  budget {budget:<5} {:>2} runs, {failures} failures, worst rate {worst:.3}",
            rows.len()
        );
    }
    assert!(report.guarantee_holds());
    println!("  no failure at any budgeted rate below the claim");
    println!();

    // Now the scripted attack that defines the price of failure.
    let instance = ProtocolInstance::build(ProtocolParams::symmetric(
        ProtocolId::Second27,
        4,
        120,
        Ratio::new(1, 16),
    ))
    .unwrap();
    let x = Message::new(9, 4).unwrap();
    let y = Message::new(12, 4).unwrap();
    let decoy = Message::new(3, 4).unwrap();
    let mut attack = AlternatingInputs::new(&instance, Party::Bob, decoy, y).unwrap();
    let result = instance.run(x, y, &mut attack).unwrap();
    let report = AttackReport::from_run(&instance, x, y, result);
    let acct = report.rate(NoiseModel::FullTermination).unwrap();
    let rate = acct.corruptions as f64 / acct.denominator.max(1) as f64;
    println!("unbounded confusion attack on the same instance:");
    println!(
        "  {} at {}/{} = {rate:.4}, against the {threshold:.4} claim",
        if report.success { "flips the output" } else { "held" },
        acct.corruptions,
        acct.denominator
    );
    assert!(report.success && rate > threshold);
}
