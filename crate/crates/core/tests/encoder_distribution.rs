//! The encoder's single-attempt output distribution against the exact
//! encoder distribution, by a chi-square goodness-of-fit test.

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use wompolar::codec::{encode_attempt, FrozenRule};
use wompolar::construct::{construct, Method, SelectionMode};
use wompolar::{BitSequence, SourceModel};

const DRAWS: usize = 1_000_000;

fn chi_square_for_state(s: f64, t: f64, y_bits: &[u8], seed: u64) {
    let n = y_bits.len();
    let m = SourceModel::new(s, t).unwrap();
    let set = construct(&m, n, Method::Exact, 0, 0, SelectionMode::TargetRate(1.0)).unwrap();
    assert!(!set.indices.is_empty());
    let mut mask = vec![false; n];
    for &i in &set.indices {
        mask[i] = true;
    }
    let q = common::encoder_q(&common::prefix_levels(t, y_bits), &mask);

    let y = BitSequence::new(y_bits.to_vec()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; 1 << n];
    for _ in 0..DRAWS {
        let v = BitSequence::new(
            (0..set.message_len())
                .map(|_| rng.random_range(0..2u8))
                .collect(),
        )
        .unwrap();
        let a = encode_attempt(&m, &set, &y, &v, FrozenRule::Sample, &mut rng).unwrap();
        counts[common::key(a.u.as_slice())] += 1;
    }

    // Cells with expected count below 5 are pooled; impossible cells must stay empty.
    let mut stat = 0.0;
    let mut cells = 0usize;
    let (mut pool_obs, mut pool_exp) = (0.0, 0.0);
    for (u, &c) in counts.iter().enumerate() {
        let e = q[u] * DRAWS as f64;
        if q[u] == 0.0 {
            assert_eq!(c, 0, "u={u} has zero encoder probability but was drawn");
        } else if e < 5.0 {
            pool_obs += c as f64;
            pool_exp += e;
        } else {
            stat += (c as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    if pool_exp > 0.0 {
        stat += (pool_obs - pool_exp).powi(2) / pool_exp;
        cells += 1;
    }
    assert!(cells >= 2, "degenerate test");
    let critical = ChiSquared::new((cells - 1) as f64)
        .unwrap()
        .inverse_cdf(0.99);
    assert!(
        stat <= critical,
        "chi-square {stat:.2} > {critical:.2} with {} dof (y={y_bits:?})",
        cells - 1
    );
}

#[test]
fn erased_state_matches_encoder_distribution() {
    chi_square_for_state(0.5, 0.5, &[1, 1, 1, 1], 1);
}

#[test]
fn partly_programmed_state_matches_encoder_distribution() {
    chi_square_for_state(0.5, 0.5, &[1, 0, 1, 1], 2);
}

#[test]
fn skewed_model_matches_encoder_distribution() {
    chi_square_for_state(0.3, 0.3, &[1, 1, 0, 1], 3);
}
