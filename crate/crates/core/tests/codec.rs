use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wompolar::codec::{decode, encode, validate_write, EncodeOptions, FrozenRule};
use wompolar::construct::{construct, Method, SelectionMode};
use wompolar::sim::run_write_experiment;
use wompolar::{sample_state, BitSequence, SourceModel};

#[test]
fn every_success_is_valid_and_decodes() {
    let m = SourceModel::new(0.5, 0.5).unwrap();
    let set = construct(
        &m,
        256,
        Method::MonteCarlo,
        20_000,
        1,
        SelectionMode::TargetRate(0.8),
    )
    .unwrap();
    let r = run_write_experiment(&m, &set, 10_000, 2, EncodeOptions::default()).unwrap();
    assert_eq!(r.violations, 0);
    assert_eq!(r.decode_mismatches, 0);
    assert_eq!(r.successes + r.failures(), r.trials);
    assert!(r.successes > 8_000, "{} successes", r.successes);
}

#[test]
fn skewed_model_round_trips() {
    let m = SourceModel::new(0.3, 0.2).unwrap();
    let set = construct(
        &m,
        512,
        Method::MonteCarlo,
        10_000,
        4,
        SelectionMode::TargetRate(0.7),
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut ok = 0;
    for k in 0..500u64 {
        let y = sample_state(&m, 512, k);
        let v = BitSequence::new(
            (0..set.message_len())
                .map(|_| rng.random_range(0..2u8))
                .collect(),
        )
        .unwrap();
        let out = encode(&m, &set, &y, &v, k, EncodeOptions::default()).unwrap();
        if let Ok(x) = &out.result {
            assert!(validate_write(&y, x).unwrap().is_empty());
            assert_eq!(decode(x, &set).unwrap(), v);
            ok += 1;
        }
    }
    assert!(ok > 400, "{ok} successes");
}

#[test]
fn greedy_rule_round_trips() {
    let m = SourceModel::new(0.5, 0.5).unwrap();
    let set = construct(
        &m,
        256,
        Method::MonteCarlo,
        10_000,
        1,
        SelectionMode::TargetRate(0.5),
    )
    .unwrap();
    let options = EncodeOptions {
        max_attempts: 8,
        rule: FrozenRule::Greedy,
    };
    let r = run_write_experiment(&m, &set, 500, 3, options).unwrap();
    assert_eq!(r.violations, 0);
    assert_eq!(r.decode_mismatches, 0);
    assert!(r.successes > 0);
}

#[test]
fn encoding_is_reproducible_from_seed() {
    let m = SourceModel::new(0.5, 0.5).unwrap();
    let set = construct(
        &m,
        128,
        Method::MonteCarlo,
        5_000,
        1,
        SelectionMode::TargetRate(0.8),
    )
    .unwrap();
    let y = sample_state(&m, 128, 77);
    let v = BitSequence::zeros(set.message_len());
    let a = encode(&m, &set, &y, &v, 5, EncodeOptions::default()).unwrap();
    let b = encode(&m, &set, &y, &v, 5, EncodeOptions::default()).unwrap();
    assert_eq!(a.result, b.result);
    assert_eq!(a.attempts, b.attempts);
}

#[test]
fn wrong_dimensions_are_errors() {
    let m = SourceModel::new(0.5, 0.5).unwrap();
    let set = construct(&m, 8, Method::Exact, 0, 0, SelectionMode::TargetRate(1.0)).unwrap();
    let y = BitSequence::ones(8);
    assert!(encode(
        &m,
        &set,
        &y,
        &BitSequence::zeros(3),
        0,
        EncodeOptions::default()
    )
    .is_err());
    assert!(encode(
        &m,
        &set,
        &BitSequence::ones(4),
        &BitSequence::zeros(4),
        0,
        EncodeOptions::default()
    )
    .is_err());
    assert!(decode(&BitSequence::ones(16), &set).is_err());
}
