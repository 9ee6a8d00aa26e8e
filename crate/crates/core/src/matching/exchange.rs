use std::collections::HashSet;

use super::RateModel;
use crate::error::Result;
use crate::rates::Matching;
use crate::scalar::Real;

/// A swap must raise both IRSs' rates by more than this (bits/s/Hz).
pub const EXCHANGE_TOLERANCE: f64 = 1e-9;

/// Iteration cap per IRS for the exchange loop.
pub const ITERATIONS_PER_IRS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilizeOptions {
    /// Defaults to `ITERATIONS_PER_IRS * L`.
    pub max_iterations: Option<usize>,
    pub tolerance: f64,
}

impl Default for StabilizeOptions {
    fn default() -> Self {
        Self {
            max_iterations: None,
            tolerance: EXCHANGE_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// No exchange-blocking pair remains.
    Natural,
    /// A previously visited matching came back.
    Cycle,
    IterationCap,
}

#[derive(Debug, Clone)]
pub struct StabilizeOutcome {
    pub matching: Matching,
    /// Number of swaps applied.
    pub iterations: usize,
    pub termination: Termination,
}

impl StabilizeOutcome {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Natural
    }
}

/// Does swapping the users of IRSs `i` and `j` strictly help both IRSs?
fn swap_blocks<M: RateModel>(
    matching: &Matching,
    current: &[M::Real],
    i: usize,
    j: usize,
    model: &M,
    tol: M::Real,
) -> Result<bool> {
    let (ui, uj) = (matching.user_of(i), matching.user_of(j));
    let swapped = matching.swap_irs(i, j);
    let after = model.user_rates(&swapped)?;
    // IRS i now serves uj, IRS j now serves ui
    Ok(after[uj] > current[ui] + tol && after[ui] > current[uj] + tol)
}

/// First blocking IRS pair in lexicographic order, if any.
pub fn first_exchange_blocking_pair<M: RateModel>(
    matching: &Matching,
    model: &M,
    tolerance: f64,
) -> Result<Option<(usize, usize)>> {
    let tol = M::Real::lit(tolerance);
    let current = model.user_rates(matching)?;
    let n = matching.len();
    for i in 0..n {
        for j in i + 1..n {
            if swap_blocks(matching, &current, i, j, model, tol)? {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

/// All unordered IRS pairs `(i, j)`, `i < j`, that would both strictly gain by
/// trading users, with rates re-evaluated under the full swapped matching.
pub fn find_exchange_blocking_pairs<M: RateModel>(
    matching: &Matching,
    model: &M,
    tolerance: f64,
) -> Result<Vec<(usize, usize)>> {
    let tol = M::Real::lit(tolerance);
    let current = model.user_rates(matching)?;
    let n = matching.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if swap_blocks(matching, &current, i, j, model, tol)? {
                out.push((i, j));
            }
        }
    }
    Ok(out)
}

/// Applies the first beneficial exchange, rescans, and repeats until no
/// exchange-blocking pair is left.
///
/// Exchanges with externalities can cycle, so the loop also stops on a
/// revisited matching or after the iteration cap; those outcomes are flagged
/// through [`Termination`] rather than treated as errors.
pub fn stabilize<M: RateModel>(initial: &Matching, model: &M, options: &StabilizeOptions) -> Result<StabilizeOutcome> {
    let cap = options.max_iterations.unwrap_or(ITERATIONS_PER_IRS * initial.len());
    let mut matching = initial.clone();
    let mut visited: HashSet<Vec<usize>> = HashSet::new();
    visited.insert(matching.irs_of_user().to_vec());
    let mut iterations = 0;
    loop {
        let Some((i, j)) = first_exchange_blocking_pair(&matching, model, options.tolerance)? else {
            return Ok(StabilizeOutcome {
                matching,
                iterations,
                termination: Termination::Natural,
            });
        };
        if iterations >= cap {
            return Ok(StabilizeOutcome {
                matching,
                iterations,
                termination: Termination::IterationCap,
            });
        }
        matching = matching.swap_irs(i, j);
        iterations += 1;
        if !visited.insert(matching.irs_of_user().to_vec()) {
            return Ok(StabilizeOutcome {
                matching,
                iterations,
                termination: Termination::Cycle,
            });
        }
    }
}
