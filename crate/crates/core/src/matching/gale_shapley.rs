use std::collections::VecDeque;

use super::prefs::PreferenceList;
use crate::error::{Error, Result};
use crate::rates::{Algorithm, Matching};
use crate::scalar::Real;

fn check_profile<T: Real>(irs_prefs: &[PreferenceList<T>], user_prefs: &[PreferenceList<T>]) -> Result<usize> {
    let n = irs_prefs.len();
    if n == 0 || user_prefs.len() != n {
        return Err(Error::invalid(format!(
            "need equal, non-empty sides; got {n} IRS and {} user lists",
            user_prefs.len()
        )));
    }
    if irs_prefs.iter().chain(user_prefs).any(|p| p.len() != n) {
        return Err(Error::invalid(
            "every preference list must rank the whole opposite side",
        ));
    }
    Ok(n)
}

/// IRS-proposing deferred acceptance.
///
/// Free IRSs propose down their lists; a user holds the best proposal seen so
/// far and releases its previous IRS when a preferred one arrives. With
/// complete lists the result is a perfect matching, stable with respect to the
/// lists and IRS-optimal among all such stable matchings.
pub fn gale_shapley<T: Real>(irs_prefs: &[PreferenceList<T>], user_prefs: &[PreferenceList<T>]) -> Result<Matching> {
    let n = check_profile(irs_prefs, user_prefs)?;
    let mut next = vec![0usize; n];
    let mut irs_of_user: Vec<Option<usize>> = vec![None; n];
    let mut free: VecDeque<usize> = (0..n).collect();

    while let Some(irs) = free.pop_front() {
        let Some(&user) = irs_prefs[irs].ranking.get(next[irs]) else {
            continue;
        };
        next[irs] += 1;
        match irs_of_user[user] {
            None => irs_of_user[user] = Some(irs),
            Some(current) if user_prefs[user].prefers(irs, current) => {
                irs_of_user[user] = Some(irs);
                free.push_back(current);
            }
            Some(_) => free.push_front(irs),
        }
    }

    let assignment = irs_of_user
        .into_iter()
        .map(|l| l.ok_or_else(|| Error::invalid("deferred acceptance left a user unmatched")))
        .collect::<Result<Vec<_>>>()?;
    Matching::from_irs_of_user(assignment, Algorithm::GsOnly)
}

/// Every `(user, irs)` pair that prefers each other to their partners in `matching`.
pub fn list_blocking_pairs<T: Real>(
    matching: &Matching,
    irs_prefs: &[PreferenceList<T>],
    user_prefs: &[PreferenceList<T>],
) -> Vec<(usize, usize)> {
    let n = matching.len();
    let mut out = Vec::new();
    for user in 0..n {
        for irs in 0..n {
            if user_prefs[user].prefers(irs, matching.irs_of(user))
                && irs_prefs[irs].prefers(user, matching.user_of(irs))
            {
                out.push((user, irs));
            }
        }
    }
    out
}

pub fn is_list_stable<T: Real>(
    matching: &Matching,
    irs_prefs: &[PreferenceList<T>],
    user_prefs: &[PreferenceList<T>],
) -> bool {
    list_blocking_pairs(matching, irs_prefs, user_prefs).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lists(orders: &[&[usize]]) -> Vec<PreferenceList<f64>> {
        orders
            .iter()
            .enumerate()
            .map(|(o, r)| PreferenceList::from_ranking(o, r.to_vec()).unwrap())
            .collect()
    }

    fn random_lists(rng: &mut ChaCha8Rng, n: usize) -> Vec<PreferenceList<f64>> {
        (0..n)
            .map(|o| {
                let mut r: Vec<usize> = (0..n).collect();
                r.shuffle(rng);
                PreferenceList::from_ranking(o, r).unwrap()
            })
            .collect()
    }

    #[test]
    fn identical_preferences_are_assortative() {
        let irs = lists(&[&[2, 0, 1], &[2, 0, 1], &[2, 0, 1]]);
        let users = lists(&[&[1, 0, 2], &[1, 0, 2], &[1, 0, 2]]);
        let m = gale_shapley(&irs, &users).unwrap();
        // best user 2 <-> best IRS 1, then user 0 <-> IRS 0, user 1 <-> IRS 2
        assert_eq!(m.irs_of(2), 1);
        assert_eq!(m.irs_of(0), 0);
        assert_eq!(m.irs_of(1), 2);
    }

    #[test]
    fn two_by_two_trace() {
        let irs = lists(&[&[0, 1], &[0, 1]]);
        let users = lists(&[&[1, 0], &[0, 1]]);
        let m = gale_shapley(&irs, &users).unwrap();
        assert_eq!(m.user_of(1), 0);
        assert_eq!(m.user_of(0), 1);
        assert!(is_list_stable(&m, &irs, &users));
        // the other perfect matching is blocked by (user 0, IRS 1)
        let other = Matching::identity(2, Algorithm::Random);
        assert_eq!(list_blocking_pairs(&other, &irs, &users), vec![(0, 1)]);
    }

    #[test]
    fn random_profiles_are_stable_and_irs_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=5 {
            for _ in 0..20 {
                let irs = random_lists(&mut rng, n);
                let users = random_lists(&mut rng, n);
                let gs = gale_shapley(&irs, &users).unwrap();
                assert!(gs.is_consistent());
                assert!(is_list_stable(&gs, &irs, &users));
                for perm in (0..n).permutations(n) {
                    let m = Matching::from_irs_of_user(perm, Algorithm::Random).unwrap();
                    if is_list_stable(&m, &irs, &users) {
                        for l in 0..n {
                            assert!(irs[l].rank_of(gs.user_of(l)) <= irs[l].rank_of(m.user_of(l)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_profiles() {
        let irs = lists(&[&[0, 1], &[1, 0]]);
        let users = lists(&[&[0]]);
        assert!(gale_shapley(&irs, &users).is_err());
        assert!(gale_shapley::<f64>(&[], &[]).is_err());
    }
}
