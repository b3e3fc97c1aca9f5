//! Self-checks against the enumeration oracles, run by `wompolar validate`.

use crate::bits::BitSequence;
use crate::construct::{
    exact_statistics, select_high_entropy_set, PrefixTable, SelectionMode, MAX_EXACT_LEN,
};
use crate::error::{Result, WomError};
use crate::model::{model_stats, SourceModel};
use crate::polar::{gn_matrix, polar_transform};
use crate::sc::{chain_probability, ScEngine};
use crate::sim::tv_distance_exact;

pub const GRID: [f64; 3] = [0.3, 0.5, 0.7];
pub const THRESHOLDS: [f64; 3] = [0.01, 0.05, 0.1];
pub const PROB_TOLERANCE: f64 = 1e-10;
pub const ENTROPY_TOLERANCE: f64 = 1e-9;
/// Rounding slack for the total-variation bound, which is tight for some sets.
pub const TV_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: String, passed: bool, detail: String) -> Self {
        Check {
            name,
            passed,
            detail,
        }
    }
}

fn grid_models() -> impl Iterator<Item = SourceModel> {
    GRID.iter().flat_map(|&s| {
        GRID.iter()
            .map(move |&t| SourceModel::new(s, t).expect("grid is interior"))
    })
}

fn check_transform(log: u32) -> Result<Check> {
    let len = 1usize << log;
    let g = gn_matrix(log)?;
    let mut mismatches = 0usize;
    for v in 0..1usize << len {
        let x = BitSequence::from_index(v, len);
        let u = polar_transform(&x)?;
        if u.as_slice() != g.left_multiply(x.as_slice())?.as_slice() || polar_transform(&u)? != x {
            mismatches += 1;
        }
    }
    Ok(Check::new(
        format!("transform N={len}"),
        mismatches == 0,
        format!(
            "{} inputs vs matrix and involution, {mismatches} mismatches",
            1usize << len
        ),
    ))
}

fn check_chain_rule(log: u32) -> Result<Check> {
    let len = 1usize << log;
    let mut worst = 0.0f64;
    let mut zero_mismatch = 0usize;
    for m in grid_models() {
        for yv in 0..1usize << len {
            let y = BitSequence::from_index(yv, len);
            for uv in 0..1usize << len {
                let u = BitSequence::from_index(uv, len);
                let x = polar_transform(&u)?;
                let direct: f64 = x
                    .iter()
                    .zip(y.iter())
                    .map(|(xi, yi)| m.conditional(xi, yi))
                    .product();
                let chained = chain_probability(&m, &y, &u)?;
                worst = worst.max((direct - chained).abs());
                if (direct == 0.0) != (chained == 0.0) {
                    zero_mismatch += 1;
                }
            }
        }
    }
    Ok(Check::new(
        format!("chain rule N={len}"),
        worst <= PROB_TOLERANCE && zero_mismatch == 0,
        format!("max abs error {worst:.3e}, zero-pattern mismatches {zero_mismatch}"),
    ))
}

fn check_sc_oracle(log: u32) -> Result<Check> {
    let len = 1usize << log;
    let mut worst = 0.0f64;
    for m in grid_models() {
        for yv in 0..1usize << len {
            let y = BitSequence::from_index(yv, len);
            let table = PrefixTable::new(&m, &y)?;
            for uv in 0..1usize << len {
                let u = BitSequence::from_index(uv, len);
                let mut engine = ScEngine::new(&m, &y)?;
                for i in 0..len {
                    let fast = engine.dist()?;
                    let slow = table.joint(i, uv & ((1 << i) - 1)).normalized();
                    worst = worst
                        .max((fast.q0 - slow.q0).abs())
                        .max((fast.q1 - slow.q1).abs());
                    engine.advance(u[i])?;
                }
            }
        }
    }
    Ok(Check::new(
        format!("sc vs enumeration N={len}"),
        worst <= PROB_TOLERANCE,
        format!("max abs error {worst:.3e}"),
    ))
}

fn check_conservation(log: u32) -> Result<Check> {
    let len = 1usize << log;
    let mut worst = 0.0f64;
    for m in grid_models() {
        let st = exact_statistics(&m, len)?;
        let total: f64 = st.entropy.iter().sum();
        worst = worst.max((total - len as f64 * model_stats(&m).capacity).abs());
    }
    Ok(Check::new(
        format!("entropy conservation N={len}"),
        worst <= ENTROPY_TOLERANCE,
        format!("max abs error {worst:.3e}"),
    ))
}

fn check_tv(log: u32) -> Result<Check> {
    let len = 1usize << log;
    let mut violations = 0usize;
    let mut empty_nonzero = 0usize;
    let mut cases = 0usize;
    let mut worst_ratio = 0.0f64;
    for m in grid_models() {
        let st = exact_statistics(&m, len)?;
        for delta in THRESHOLDS {
            let set = select_high_entropy_set(&st, SelectionMode::Threshold(delta))?;
            let r = tv_distance_exact(&m, &set)?;
            cases += 1;
            if r.tv > r.bound + TV_SLACK {
                violations += 1;
            }
            if r.bound > 0.0 {
                worst_ratio = worst_ratio.max(r.tv / r.bound);
            }
            let mut empty = set.clone();
            empty.indices.clear();
            if tv_distance_exact(&m, &empty)?.tv != 0.0 {
                empty_nonzero += 1;
            }
        }
    }
    Ok(Check::new(
        format!("tv bound N={len}"),
        violations == 0 && empty_nonzero == 0,
        format!(
            "{cases} cases, {violations} over bound, max tv/bound {worst_ratio:.3}, {empty_nonzero} nonzero for empty set"
        ),
    ))
}

/// Runs every check for `N = 2^0 .. 2^max_log`. `max_log` is at most 3.
pub fn run_checks(max_log: u32) -> Result<Vec<Check>> {
    let limit = MAX_EXACT_LEN.trailing_zeros();
    if max_log > limit {
        return Err(WomError::TooLarge {
            what: "validation log-size",
            limit: limit as usize,
            got: max_log as usize,
        });
    }
    let mut checks = Vec::new();
    for log in 0..=max_log {
        checks.push(check_transform(log)?);
        checks.push(check_chain_rule(log)?);
        checks.push(check_sc_oracle(log)?);
        checks.push(check_conservation(log)?);
        checks.push(check_tv(log)?);
    }
    Ok(checks)
}
