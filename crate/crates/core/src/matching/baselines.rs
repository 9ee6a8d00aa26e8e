use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

use super::RateModel;
use crate::channel::Geometry;
use crate::error::{Error, Result};
use crate::rates::{Algorithm, Matching};
use crate::scalar::Real;

/// Largest `K` for which exhaustive search over `K!` matchings is allowed.
pub const EXHAUSTIVE_CAP: usize = 8;

/// Greedy nearest-pair assignment: repeatedly matches the closest unmatched
/// (user, IRS) pair. Ties go to the lower user, then the lower IRS index.
pub fn distance_matching<T: Real>(geometry: &Geometry<T>) -> Result<Matching> {
    let n = geometry.users.len();
    if n == 0 || geometry.irs.len() != n {
        return Err(Error::invalid("distance matching needs as many users as IRSs"));
    }
    let mut pairs: Vec<(T, usize, usize)> = (0..n)
        .flat_map(|k| (0..n).map(move |l| (k, l)))
        .map(|(k, l)| (geometry.d_irs_user(l, k), k, l))
        .collect();
    pairs.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    let mut irs_of_user = vec![usize::MAX; n];
    let mut irs_taken = vec![false; n];
    for (_, k, l) in pairs {
        if irs_of_user[k] == usize::MAX && !irs_taken[l] {
            irs_of_user[k] = l;
            irs_taken[l] = true;
        }
    }
    Matching::from_irs_of_user(irs_of_user, Algorithm::Distance)
}

/// Uniformly random permutation.
pub fn random_matching<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Matching> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    Matching::from_irs_of_user(perm, Algorithm::Random)
}

/// Sum-rate maximizer over all `K!` matchings; first in lexicographic order on ties.
pub fn exhaustive_best_matching<M: RateModel>(model: &M) -> Result<(Matching, M::Real)> {
    let n = model.agents();
    if n == 0 || n > EXHAUSTIVE_CAP {
        return Err(Error::invalid(format!(
            "exhaustive search limited to 1..={EXHAUSTIVE_CAP} agents, got {n}"
        )));
    }
    let mut best: Option<(Matching, M::Real)> = None;
    for perm in (0..n).permutations(n) {
        let m = Matching::from_irs_of_user(perm, Algorithm::Exhaustive)?;
        let total = model.sum_rate(&m)?;
        if best.as_ref().is_none_or(|(_, b)| total > *b) {
            best = Some((m, total));
        }
    }
    Ok(best.expect("at least one permutation"))
}
