//! User-IRS assignment: preference lists, two-stage stable matching, baselines
//! and brute-force references.
//!
//! The proposed assignment runs IRS-proposing deferred acceptance on
//! preference lists built from rates, then repairs the result by letting IRS
//! pairs trade users while both strictly gain. Rates come from a
//! [`RateModel`], so the algorithms are independent of the channel model.

mod baselines;
mod exchange;
mod gale_shapley;
mod prefs;

pub use baselines::{distance_matching, exhaustive_best_matching, random_matching, EXHAUSTIVE_CAP};
pub use exchange::{
    find_exchange_blocking_pairs, first_exchange_blocking_pair, stabilize, StabilizeOptions, StabilizeOutcome,
    Termination, EXCHANGE_TOLERANCE,
};
pub use gale_shapley::{gale_shapley, is_list_stable, list_blocking_pairs};
pub use prefs::{build_association_matrix, build_irs_prefs, build_user_prefs, AssociationMatrix, PreferenceList};

use rand::Rng;

use crate::error::Result;
use crate::rates::{Algorithm, LinkEvaluator, Matching};
use crate::scalar::Real;

/// Source of rates for matching decisions over one drop.
pub trait RateModel {
    type Real: Real;

    /// `K = L`.
    fn agents(&self) -> usize;

    /// Rate of every user under `matching`, interference included.
    fn user_rates(&self, matching: &Matching) -> Result<Vec<Self::Real>>;

    /// Interference-free rate of `user` served by `irs`.
    fn local_rate(&self, user: usize, irs: usize) -> Self::Real;

    fn sum_rate(&self, matching: &Matching) -> Result<Self::Real> {
        Ok(self.user_rates(matching)?.into_iter().sum())
    }
}

impl<T: Real> RateModel for LinkEvaluator<T> {
    type Real = T;

    fn agents(&self) -> usize {
        self.users()
    }

    fn user_rates(&self, matching: &Matching) -> Result<Vec<T>> {
        Ok(self.evaluate(matching)?.per_user)
    }

    fn local_rate(&self, user: usize, irs: usize) -> T {
        LinkEvaluator::local_rate(self, user, irs)
    }
}

/// Stage outputs of the proposed assignment.
#[derive(Debug, Clone)]
pub struct ProposedOutcome {
    pub association: AssociationMatrix,
    /// Gale-Shapley result, tagged [`Algorithm::GsOnly`].
    pub stage1: Matching,
    /// Exchange-repaired result, tagged [`Algorithm::Proposed`].
    pub stage2: StabilizeOutcome,
}

/// Full two-stage assignment: preference lists, Gale-Shapley, exchange repair.
pub fn proposed_matching<M: RateModel, R: Rng + ?Sized>(
    model: &M,
    rng: &mut R,
    options: &StabilizeOptions,
) -> Result<ProposedOutcome> {
    let association = build_association_matrix(rng, model.agents())?;
    let user_prefs = build_user_prefs(model);
    let irs_prefs = build_irs_prefs(&association, model)?;
    let stage1 = gale_shapley(&irs_prefs, &user_prefs)?;
    let mut stage2 = stabilize(&stage1, model, options)?;
    stage2.matching = stage2.matching.with_provenance(Algorithm::Proposed);
    Ok(ProposedOutcome {
        association,
        stage1,
        stage2,
    })
}


#[cfg(test)]
mod tests {
    use super::testing::random_table;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn proposed_pipeline_produces_exchange_stable_bijection() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=5 {
            let model = random_table(&mut rng, n, 1.0);
            let out = proposed_matching(&model, &mut rng, &StabilizeOptions::default()).unwrap();
            assert!(out.stage1.is_consistent());
            assert_eq!(out.stage1.provenance(), Algorithm::GsOnly);
            assert_eq!(out.stage2.matching.provenance(), Algorithm::Proposed);
            if out.stage2.converged() {
                assert!(
                    find_exchange_blocking_pairs(&out.stage2.matching, &model, EXCHANGE_TOLERANCE)
                        .unwrap()
                        .is_empty()
                );
            }
        }
    }
}
