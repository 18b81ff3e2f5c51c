//! Timing of `phase_transform` over a grid of register sizes.

use std::time::Instant;

use phasekit::gadget::{phase_transform, GadgetPlan, GadgetVariant};
use phasekit::oracle::random_table;
use phasekit::random::{derive_seed, random_state_on};
use phasekit::state::RegisterLayout;
use phasekit::{ANCILLA, CONTROL};
use serde::Serialize;

use crate::error::CliError;

/// Default amplitude budget, 2^24 complex amplitudes.
pub const DEFAULT_BUDGET: u64 = 1 << 24;
pub const BUDGET_ENV: &str = "PHASEKIT_MEM_BUDGET";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub operation: String,
    /// Control bits and ancilla bits; `N = 2^n`, `M = 2^m`.
    pub n: u32,
    pub m: u32,
    #[serde(rename = "N")]
    pub big_n: usize,
    #[serde(rename = "M")]
    pub big_m: usize,
    /// Reference register dimension (1: pure ancilla).
    pub r: usize,
    pub variant: String,
    pub reps: usize,
    /// Minimum over repetitions, in seconds.
    pub wall_time: f64,
    pub oracle_calls: usize,
}

/// Budget from the flag, then the environment, then the default.
pub fn resolve_budget(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{BUDGET_ENV}={v} is not an amplitude count"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

/// Refuses before allocating anything if the largest size exceeds `budget`.
pub fn check_budget(max_n: u32, max_m: u32, budget: u64) -> Result<(), CliError> {
    let bits = max_n + max_m;
    let fits = bits < 64 && (1u64 << bits) <= budget;
    if !fits {
        return Err(CliError::Usage(format!(
            "refusing bench: 2^{bits} amplitudes at n = {max_n}, m = {max_m} exceeds the budget of {budget} \
             (raise with --mem-budget or {BUDGET_ENV})"
        )));
    }
    Ok(())
}

pub fn run(
    max_n: u32,
    max_m: u32,
    reps: usize,
    variant: GadgetVariant,
    seed: u64,
    budget: u64,
) -> Result<Vec<BenchRecord>, CliError> {
    if max_n == 0 || max_m == 0 || reps == 0 {
        return Err(CliError::Usage(
            "--max-n, --max-m and --reps must be at least 1".into(),
        ));
    }
    check_budget(max_n, max_m, budget)?;
    let mut records = Vec::new();
    for n in 1..=max_n {
        for m in 1..=max_m {
            let (big_n, big_m) = (1usize << n, 1usize << m);
            let size_seed = derive_seed(seed, ((n as u64) << 32) | m as u64);
            let layout = RegisterLayout::new([(CONTROL, big_n), (ANCILLA, big_m)])?;
            let state = random_state_on(&layout, size_seed);
            let f = random_table(big_n, big_m, derive_seed(size_seed, 1))?;
            let plan = GadgetPlan::new(variant, 1, big_m)?;
            let mut best = f64::INFINITY;
            let mut calls = 0;
            for _ in 0..reps {
                let start = Instant::now();
                let out = phase_transform(&state, CONTROL, ANCILLA, &f, &plan)?;
                best = best.min(start.elapsed().as_secs_f64());
                calls = out.oracle_calls;
            }
            records.push(BenchRecord {
                operation: "phase_transform".into(),
                n,
                m,
                big_n,
                big_m,
                r: 1,
                variant: variant.name().into(),
                reps,
                wall_time: best,
                oracle_calls: calls,
            });
        }
    }
    Ok(records)
}
