use proptest::prelude::*;

use super::*;
use crate::engine::NoiseModel;
use crate::protocols::ProtocolId;

fn toml_of(parts: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml_str(parts).expect("config parses")
}

#[test]
fn configs_round_trip_and_bad_fields_are_named() {
    let cfg = toml_of(
        r#"
        [protocol]
        id = "full_sqrt2"
        n = 4
        block_len = 64
        epsilon = "1/8"

        [inputs]
        mode = "sampled"
        count = 3
        seed = 5

        [adversary]
        kind = "random_budgeted"
        seeds = [1, 2]
        budgets = ["1/10", "1/5"]
        "#,
    );
    let params = cfg.params().unwrap();
    assert_eq!(params.id, ProtocolId::FullSqrt2);
    assert_eq!((params.n_a, params.n_b, params.block_len), (4, 4, 64));
    assert_eq!(cfg.resolved_model().unwrap(), NoiseModel::FullTermination);
    assert_eq!(cfg.budget_grid().unwrap().len(), 2);
    assert_eq!(cfg.input_pairs(&params).unwrap().len(), 3);

    // Round trip through the canonical rendering.
    let again = ExperimentConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
    assert_eq!(again.params().unwrap(), params);

    let reject = |text: &str, needle: &str| {
        let err = ExperimentConfig::from_toml_str(text).unwrap_err().to_string();
        assert!(err.contains(needle), "error `{err}` should mention `{needle}`");
    };
    reject(
        "[protocol]\nid = \"full_sqrt2\"\nn = 4\nblock_len = 64\nepsilon = \"1/8\"\nbogus = 1\n",
        "bogus",
    );
    reject("[protocol]\nid = \"full_sqrt2\"\nn = 4\nblock_len = 64\nepsilon = \"0.125\"\n", "p/q");
    reject(
        "[protocol]\nid = \"feedback_ternary\"\nn = 4\nblock_len = 9\nepsilon = \"1/8\"\n",
        "block_len",
    );
    reject(
        "[protocol]\nid = \"full_sqrt2\"\nn = 4\nblock_len = 64\nepsilon = \"1/8\"\n\
         [model]\nkind = \"feedback\"\n",
        "incompatible",
    );
    reject(
        "[protocol]\nid = \"full_sqrt2\"\nn = 4\nblock_len = 64\nepsilon = \"1/8\"\n\
         [adversary]\nkind = \"random_budgeted\"\nseeds = [1]\nbudgets = [\"1/5\", \"1/10\"]\n",
        "ascending",
    );
    reject(
        "[protocol]\nid = \"full_sqrt2\"\nn = 4\nblock_len = 64\nepsilon = \"1/8\"\n\
         [adversary]\nkind = \"null\"\nseeds = [1]\n",
        "null",
    );
    reject(
        "[protocol]\nid = \"feedback_ternary\"\nn = 4\nepsilon = \"1/8\"\n\
         [adversary]\nkind = \"half_split\"\n",
        "coded block",
    );
    reject(
        "[protocol]\nid = \"feedback_ternary\"\nn = 4\nepsilon = \"1/8\"\n\
         [adversary]\nkind = \"majority_bit\"\n",
        "naive_feedback_binary",
    );
}

fn random_sweep_config() -> ExperimentConfig {
    toml_of(
        r#"
        [protocol]
        id = "naive_exchange"
        n = 4
        block_len = 16
        epsilon = "1/4"

        [inputs]
        mode = "sampled"
        count = 5
        seed = 9

        [adversary]
        kind = "random_budgeted"
        seeds = [1, 2]
        budgets = ["1/8", "1/5"]
        "#,
    )
}

#[test]
fn sweeps_are_reproducible_and_worker_count_never_matters() {
    let cfg = random_sweep_config();
    let first = run_sweep(&cfg, None).unwrap();
    let second = run_sweep(&cfg, None).unwrap();
    let threaded = run_sweep(&cfg, Some(3)).unwrap();

    assert_eq!(first.rows.len(), 2 * 2 * 5);
    let render = |r: &SweepReport| {
        (csv_string(r), serde_json::to_string_pretty(r).unwrap())
    };
    assert_eq!(render(&first), render(&second));
    assert_eq!(render(&first), render(&threaded));
    assert!(csv_string(&first).starts_with(CSV_HEADER));

    // Every budgeted run honors its budget under the report's model.
    for row in &first.rows {
        let budget = parse_ratio_u64(&row.budget).unwrap();
        let rate = num_rational::Ratio::new(row.corruptions, row.denominator.max(1));
        assert!(rate <= budget, "rate {rate} above budget {budget}");
    }
    // Different base seeds change at least one transcript.
    let seeds: std::collections::HashSet<_> =
        first.rows.iter().map(|r| r.transcript_hash.clone()).collect();
    assert!(seeds.len() > 1);
}

#[test]
fn every_row_replays_to_its_recorded_transcript() {
    let cfg = toml_of(
        r#"
        [protocol]
        id = "naive_exchange"
        n = 4
        block_len = 16
        epsilon = "1/4"

        [inputs]
        mode = "sampled"
        count = 3
        seed = 2

        [adversary]
        kind = "suite"
        budgets = ["1/6"]
        "#,
    );
    let report = run_sweep(&cfg, None).unwrap();
    // Four scripted attacks apply to a coded fixed-order scheme.
    assert_eq!(report.rows.len(), 4 * 3);
    let names: std::collections::BTreeSet<_> =
        report.rows.iter().map(|r| r.adversary.as_str()).collect();
    assert_eq!(
        names.into_iter().collect::<Vec<_>>(),
        vec!["alternating_inputs", "force_terminate", "greedy_decode_flip", "half_split"]
    );

    for row in &report.rows {
        let outcome = replay_report(&report, &row.transcript_hash).unwrap();
        assert!(outcome.matches, "row {} replayed to a different transcript", row.adversary);
        assert_eq!(outcome.corruptions, row.corruptions);
        assert_eq!(outcome.denominator, row.denominator);
        // No false alarms: a failing row's stored transcript really does
        // carry at least its claimed rate.
        if !row.correct {
            let claimed = num_rational::Ratio::new(row.corruptions, row.denominator.max(1));
            let actual =
                num_rational::Ratio::new(outcome.corruptions, outcome.denominator.max(1));
            assert!(actual >= claimed);
        }
    }
    assert!(matches!(
        replay_report(&report, "ffffffffffffffff"),
        Err(HarnessError::RowNotFound(_))
    ));
}

#[test]
fn csv_rows_carry_the_fixed_column_set() {
    let cfg = toml_of(
        "[protocol]\nid = \"naive_feedback_binary\"\nn = 2\nepsilon = \"1/8\"\n",
    );
    let report = run_sweep(&cfg, None).unwrap();
    assert_eq!(report.rows.len(), 16);
    assert!(report.rows.iter().all(|r| r.correct));
    assert!(report.guarantee_holds());
    assert_eq!(report.aggregate.failures, 0);

    let text = csv_string(&report);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "protocol,model,n,N,epsilon,adversary,seed,budget,corruptions,denominator,rate,\
         correct,alice_term,bob_term"
    );
    for line in lines {
        let fields: Vec<_> = line.split(',').collect();
        assert_eq!(fields.len(), 14);
        assert_eq!(fields[0], "naive_feedback_binary");
        assert_eq!(fields[1], "feedback");
        assert_eq!((fields[2], fields[3]), ("2", "0"));
        assert_eq!(fields[5], "null");
        assert_eq!(fields[11], "true");
        assert!(!fields[12].is_empty() && !fields[13].is_empty());
    }
}

#[test]
fn attack_mode_reports_rates_under_every_fixed_order_model() {
    let cfg = toml_of(
        r#"
        [protocol]
        id = "naive_exchange"
        n = 4
        block_len = 16
        epsilon = "1/4"

        [inputs]
        mode = "sampled"
        count = 2
        seed = 1

        [adversary]
        kind = "half_split"
        "#,
    );
    let attacks = run_attacks(&cfg).unwrap();
    assert_eq!(attacks.len(), 2);
    for attack in &attacks {
        assert_eq!(attack.name, "half_split");
        assert_eq!(attack.budget, "1/1");
        assert!(attack.claimed_threshold.is_none());
        // The split only ever touches Alice's 16 block rounds, half each.
        assert!(attack.report.corruptions <= 8);
        for model in [
            NoiseModel::FirstTermination,
            NoiseModel::FullTermination,
            NoiseModel::SpeakerTermination,
        ] {
            assert!(attack.report.rate(model).is_some());
        }
    }

    let null_cfg = toml_of(
        "[protocol]\nid = \"naive_exchange\"\nn = 4\nblock_len = 16\nepsilon = \"1/4\"\n",
    );
    assert!(matches!(run_attacks(&null_cfg), Err(HarnessError::Config(_))));
}

#[test]
fn code_audit_measures_every_requested_window() {
    let codes = CodesSection {
        message_bits: 4,
        max_len: 64,
        min_prefix_len: 16,
        epsilon: "1/4".into(),
        prefix_step: Some(8),
        slices: vec![[17, 64]],
        alphabet: None,
    };
    let report = verify_codes(&codes).unwrap();
    assert!(report.all_ok);
    assert_eq!(report.prefixes.last().unwrap().end, 64);
    assert_eq!(report.slices.len(), 1);
    assert!(report.prefixes.iter().all(|p| p.min_distance >= p.required));
    let summary = verify_summary(&report);
    assert!(summary.contains("all_ok=true"));
    assert_eq!(summary.lines().count(), report.prefixes.len() + report.slices.len() + 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // "p/q" strings round-trip through parse and render in reduced form.
    #[test]
    fn ratio_strings_round_trip(p in 0u64..1000, q in 1u64..1000) {
        let parsed = parse_ratio_u64(&format!("{p}/{q}")).unwrap();
        let rendered = ratio_string(parsed);
        prop_assert_eq!(parse_ratio_u64(&rendered).unwrap(), parsed);
        let expect = if p == 0 {
            "0/1".to_string()
        } else {
            let g = gcd(p, q);
            format!("{}/{}", p / g, q / g)
        };
        prop_assert_eq!(rendered, expect);
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
