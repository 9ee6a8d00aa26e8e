use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::Rng;

use super::RateModel;
use crate::error::{Error, Result};
use crate::rates::{Algorithm, Matching};
use crate::scalar::Real;

/// Complete ranking of the opposite side, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceList<T> {
    pub owner: usize,
    pub ranking: Vec<usize>,
    /// `scores[i]` belongs to `ranking[i]`; non-increasing.
    pub scores: Vec<T>,
    rank: Vec<usize>,
}

impl<T: Real> PreferenceList<T> {
    /// Ranks candidates `0..scores.len()` by descending score, lower index first on ties.
    pub fn from_scores(owner: usize, scores: &[T]) -> Self {
        let mut ranking: Vec<usize> = (0..scores.len()).collect();
        ranking.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(Ordering::Equal));
        let sorted = ranking.iter().map(|&c| scores[c]).collect();
        Self::with_ranking(owner, ranking, sorted)
    }

    fn with_ranking(owner: usize, ranking: Vec<usize>, scores: Vec<T>) -> Self {
        let mut rank = vec![0; ranking.len()];
        for (pos, &c) in ranking.iter().enumerate() {
            rank[c] = pos;
        }
        Self {
            owner,
            ranking,
            scores,
            rank,
        }
    }

    /// List from an explicit order; scores descend with position.
    pub fn from_ranking(owner: usize, ranking: Vec<usize>) -> Result<Self> {
        let n = ranking.len();
        let mut seen = vec![false; n];
        for &c in &ranking {
            if c >= n || std::mem::replace(&mut seen[c], true) {
                return Err(Error::invalid(format!("{ranking:?} is not a permutation")));
            }
        }
        let scores = (0..n).map(|i| T::lit((n - i) as f64)).collect();
        Ok(Self::with_ranking(owner, ranking, scores))
    }

    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    /// Position of `candidate` in the list, 0 = most preferred.
    pub fn rank_of(&self, candidate: usize) -> usize {
        self.rank[candidate]
    }

    /// Strictly prefers `a` over `b`.
    pub fn prefers(&self, a: usize, b: usize) -> bool {
        self.rank[a] < self.rank[b]
    }
}

/// User `k` ranks every IRS by its interference-free local rate.
pub fn build_user_prefs<M: RateModel>(model: &M) -> Vec<PreferenceList<M::Real>> {
    let n = model.agents();
    (0..n)
        .map(|k| {
            let scores: Vec<_> = (0..n).map(|l| model.local_rate(k, l)).collect();
            PreferenceList::from_scores(k, &scores)
        })
        .collect()
}

/// `L` association rounds in which every user meets every IRS exactly once.
///
/// Round `t` pairs user `u` with IRS `relabel[(u - t) mod L]`; with the
/// identity relabeling and `L = 3` this is
/// `[(u1,r1) (u2,r2) (u3,r3); (u1,r3) (u2,r1) (u3,r2); (u1,r2) (u2,r3) (u3,r1)]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociationMatrix {
    /// `rows[t][u]` is the IRS paired with user `u` in round `t`.
    rows: Vec<Vec<usize>>,
}

impl AssociationMatrix {
    pub fn cyclic(relabel: &[usize]) -> Result<Self> {
        let n = relabel.len();
        Matching::from_irs_of_user(relabel.to_vec(), Algorithm::Random)?;
        let rows = (0..n)
            .map(|t| (0..n).map(|u| relabel[(u + n - t) % n]).collect())
            .collect();
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row_matching(&self, t: usize) -> Matching {
        Matching::from_irs_of_user(self.rows[t].clone(), Algorithm::Random).expect("rows are bijections")
    }

    /// Round in which `user` is paired with `irs`.
    pub fn round_of(&self, user: usize, irs: usize) -> Option<usize> {
        self.rows.iter().position(|row| row[user] == irs)
    }

    /// Every row is a bijection and every (user, IRS) pair occurs exactly once.
    pub fn is_latin(&self) -> bool {
        let n = self.rows.len();
        let mut seen = vec![vec![false; n]; n];
        for row in &self.rows {
            if row.len() != n || Matching::from_irs_of_user(row.clone(), Algorithm::Random).is_err() {
                return false;
            }
            for (u, &r) in row.iter().enumerate() {
                if std::mem::replace(&mut seen[u][r], true) {
                    return false;
                }
            }
        }
        true
    }
}

/// Cyclic association rounds under a uniformly random IRS relabeling.
pub fn build_association_matrix<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Result<AssociationMatrix> {
    if k == 0 {
        return Err(Error::invalid("association matrix needs at least one user"));
    }
    let mut relabel: Vec<usize> = (0..k).collect();
    relabel.shuffle(rng);
    AssociationMatrix::cyclic(&relabel)
}

/// IRS `l` ranks users by the rate each achieved on `l` in its association round.
///
/// Costs one full rate evaluation (precoder plus `K` SINRs) per round.
pub fn build_irs_prefs<M: RateModel>(assoc: &AssociationMatrix, model: &M) -> Result<Vec<PreferenceList<M::Real>>> {
    let n = model.agents();
    if assoc.len() != n {
        return Err(Error::invalid("association matrix size does not match the drop"));
    }
    // scores[l][k]
    let mut scores = vec![vec![<M::Real as num_traits::Zero>::zero(); n]; n];
    for t in 0..n {
        let row = assoc.row_matching(t);
        let rates = model.user_rates(&row)?;
        for (k, r) in rates.into_iter().enumerate() {
            scores[row.irs_of(k)][k] = r;
        }
    }
    Ok(scores
        .iter()
        .enumerate()
        .map(|(l, s)| PreferenceList::from_scores(l, s))
        .collect())
}
