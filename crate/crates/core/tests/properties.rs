use irs_match::beamforming::{greedy_phase_search, reflected_row, zf_precoder, PhaseAlphabet, PhaseBook, PhaseConfig};
use irs_match::channel::{make_drop, steering_vector, Dims, FadingParams, Geometry};
use irs_match::linalg::{right_pseudo_inverse, Matrix, Vector};
use irs_match::matching::{
    build_association_matrix, build_irs_prefs, build_user_prefs, gale_shapley, is_list_stable, stabilize,
    AssociationMatrix, PreferenceList, RateModel, StabilizeOptions,
};
use irs_match::rates::{LinkBudget, LinkEvaluator};
use irs_match::{Algorithm, Matching};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn complex() -> impl Strategy<Value = Complex64> {
    (-4.0..4.0f64, -4.0..4.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix<f64>> {
    prop::collection::vec(complex(), rows * cols).prop_map(move |d| Matrix::new(rows, cols, d).unwrap())
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn evaluator(seed: u64, n: usize, m: usize, elements: usize) -> (Geometry<f64>, LinkEvaluator<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let geometry = Geometry::deploy(&mut rng, n, n, 50.0).unwrap();
    let dims = Dims {
        users: n,
        irs: n,
        antennas: m,
        elements,
    };
    let channels = make_drop(&mut rng, &geometry, &FadingParams::default(), dims).unwrap();
    let book = PhaseBook::build(&channels, &PhaseAlphabet::new(2).unwrap()).unwrap();
    let eval = LinkEvaluator::new(&channels, &book, LinkBudget::equal_split(10.0, n, 1e-11)).unwrap();
    (geometry, eval)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pseudo_inverse_is_a_right_inverse((k, extra) in (1usize..6, 0usize..6), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = Matrix::from_fn(k, k + extra, |_, _| irs_match::channel::cn01::<f64, _>(&mut rng));
        if let Ok(w) = right_pseudo_inverse(&h) {
            let resid = h.matmul(&w).unwrap().sub(&Matrix::identity(k)).unwrap().frobenius_norm();
            prop_assert!(resid / (k as f64).sqrt() < 1e-9, "residual {resid}");
        }
    }

    #[test]
    fn hermitian_is_an_involution_and_reverses_products(a in matrix(3, 4), b in matrix(4, 2)) {
        prop_assert_eq!(a.hermitian().hermitian(), a.clone());
        let lhs = a.matmul(&b).unwrap().hermitian();
        let rhs = b.hermitian().matmul(&a.hermitian()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn steering_vectors_are_unit_modulus(n in 1usize..128, theta in -10.0..10.0f64, d in 0.1..2.0f64) {
        let a = steering_vector::<f64>(n, theta, d).unwrap();
        for x in a.iter() {
            prop_assert!((x.norm() - 1.0).abs() <= 1e-12);
        }
        prop_assert_eq!(a[0], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn phase_configs_stay_in_the_alphabet(bits in 1u32..5, n in 1usize..24, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Matrix::from_fn(n, 3, |_, _| irs_match::channel::cn01::<f64, _>(&mut rng));
        let f = Vector::from_fn(n, |_| irs_match::channel::cn01::<f64, _>(&mut rng));
        let alphabet = PhaseAlphabet::<f64>::new(bits).unwrap();
        let trace = greedy_phase_search(&g, &f, &alphabet).unwrap();
        prop_assert!(trace.config.indices().iter().all(|&i| (i as usize) < alphabet.len()));
        let phases = trace.config.phases::<f64>();
        for (p, &i) in phases.iter().zip(trace.config.indices()) {
            prop_assert_eq!(p.to_bits(), alphabet.phases()[i as usize].to_bits());
        }
        // the column-aligned partial sum is what f^H Phi g_m evaluates to
        let row = reflected_row(&g, &f, &trace.config).unwrap();
        prop_assert!((row[trace.column] - *trace.partial_sums.last().unwrap()).norm() < 1e-9);
    }

    #[test]
    fn greedy_beats_all_off(n in 1usize..20, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Matrix::from_fn(n, 2, |_, _| irs_match::channel::cn01::<f64, _>(&mut rng));
        let f = Vector::from_fn(n, |_| irs_match::channel::cn01::<f64, _>(&mut rng));
        let trace = greedy_phase_search(&g, &f, &PhaseAlphabet::new(2).unwrap()).unwrap();
        let off = PhaseConfig::all_off(2, n).unwrap();
        prop_assert!(reflected_row(&g, &f, &trace.config).unwrap().norm_sqr()
            >= reflected_row(&g, &f, &off).unwrap().norm_sqr());
    }

    #[test]
    fn zf_beams_are_unit_norm(k in 1usize..5, extra in 0usize..4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = Matrix::from_fn(k, k + extra, |_, _| irs_match::channel::cn01::<f64, _>(&mut rng));
        if let Ok(p) = zf_precoder(&h) {
            for col in p.columns() {
                prop_assert!((col.norm_sqr() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn association_matrix_is_latin(n in 1usize..9, seed in any::<u64>()) {
        let a = build_association_matrix(&mut ChaCha8Rng::seed_from_u64(seed), n).unwrap();
        prop_assert!(a.is_latin());
        for t in 0..n {
            prop_assert!(a.row_matching(t).is_consistent());
        }
    }

    #[test]
    fn cyclic_rows_are_the_shifted_relabeling(relabel in (1usize..8).prop_flat_map(permutation)) {
        let n = relabel.len();
        let a = AssociationMatrix::cyclic(&relabel).unwrap();
        for (t, row) in a.rows().iter().enumerate() {
            for (u, &irs) in row.iter().enumerate() {
                prop_assert_eq!(irs, relabel[(u + n - t) % n]);
            }
        }
    }

    #[test]
    fn gale_shapley_is_list_stable(
        (irs, users) in (1usize..7).prop_flat_map(|n| (
            prop::collection::vec(permutation(n), n),
            prop::collection::vec(permutation(n), n),
        ))
    ) {
        let irs: Vec<PreferenceList<f64>> = irs.into_iter().enumerate()
            .map(|(o, r)| PreferenceList::from_ranking(o, r).unwrap()).collect();
        let users: Vec<PreferenceList<f64>> = users.into_iter().enumerate()
            .map(|(o, r)| PreferenceList::from_ranking(o, r).unwrap()).collect();
        let m = gale_shapley(&irs, &users).unwrap();
        prop_assert!(m.is_consistent());
        prop_assert!(is_list_stable(&m, &irs, &users));
    }

    #[test]
    fn matching_inverse_is_consistent(perm in (1usize..10).prop_flat_map(permutation), a in 0usize..10, b in 0usize..10) {
        let m = Matching::from_irs_of_user(perm.clone(), Algorithm::Random).unwrap();
        prop_assert!(m.is_consistent());
        let n = perm.len();
        let s = m.swap_irs(a % n, b % n);
        prop_assert!(s.is_consistent());
        prop_assert_eq!(s.user_of(a % n), m.user_of(b % n));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sum_rate_is_the_sum_of_user_rates(seed in any::<u64>(), perm in permutation(4)) {
        let (_, eval) = evaluator(seed, 4, 4, 8);
        let m = Matching::from_irs_of_user(perm, Algorithm::Random).unwrap();
        let report = eval.evaluate(&m).unwrap();
        let total: f64 = report.per_user.iter().sum();
        prop_assert!((total - report.sum).abs() <= 1e-9);
        prop_assert!(report.per_user.iter().all(|r| *r >= 0.0 && r.is_finite()));
    }

    #[test]
    fn user_preferences_follow_local_rates(seed in any::<u64>()) {
        let (_, eval) = evaluator(seed, 3, 3, 8);
        for list in build_user_prefs(&eval) {
            let k = list.owner;
            for w in list.ranking.windows(2) {
                prop_assert!(eval.local_rate(k, w[0]) >= eval.local_rate(k, w[1]));
            }
        }
    }

    #[test]
    fn stabilize_never_lowers_swapped_pairs(seed in any::<u64>(), perm in permutation(4)) {
        let (_, eval) = evaluator(seed, 4, 4, 8);
        let m = Matching::from_irs_of_user(perm, Algorithm::GsOnly).unwrap();
        let out = stabilize(&m, &eval, &StabilizeOptions::default()).unwrap();
        prop_assert!(out.matching.is_consistent());
        if out.converged() {
            prop_assert!(irs_match::matching::find_exchange_blocking_pairs(&out.matching, &eval, 1e-9).unwrap().is_empty());
        }
    }

    #[test]
    fn irs_preferences_rank_every_user(seed in any::<u64>()) {
        let (_, eval) = evaluator(seed, 4, 4, 8);
        let assoc = build_association_matrix(&mut ChaCha8Rng::seed_from_u64(seed ^ 1), 4).unwrap();
        let prefs = build_irs_prefs(&assoc, &eval).unwrap();
        for (l, p) in prefs.iter().enumerate() {
            prop_assert_eq!(p.owner, l);
            let mut r = p.ranking.clone();
            r.sort_unstable();
            prop_assert_eq!(r, vec![0, 1, 2, 3]);
        }
        prop_assert_eq!(eval.agents(), 4);
    }
}

#[test]
fn single_precision_pipeline_tracks_double_precision() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let geometry = Geometry::<f64>::deploy(&mut rng, 3, 3, 50.0).unwrap();
    let dims = Dims {
        users: 3,
        irs: 3,
        antennas: 4,
        elements: 8,
    };
    let channels = make_drop(&mut rng, &geometry, &FadingParams::default(), dims).unwrap();
    let book = PhaseBook::build(&channels, &PhaseAlphabet::new(2).unwrap()).unwrap();
    let eval = LinkEvaluator::new(&channels, &book, LinkBudget::equal_split(10.0, 3, 1e-11)).unwrap();

    // every channel scaled by 1e4 in amplitude (G carries none, f all of it) so
    // single precision stays well inside its range; noise scales to match
    let scale = 1e4;
    let narrow = |v: &Vector<f64>| {
        irs_match::f32::ComplexVector::from_fn(v.len(), |i| {
            num_complex::Complex32::new((v[i].re * scale) as f32, (v[i].im * scale) as f32)
        })
    };
    let channels32 = irs_match::channel::ChannelSet {
        direct: channels.direct.iter().map(narrow).collect(),
        bs_irs: channels
            .bs_irs
            .iter()
            .map(|g| {
                irs_match::f32::ComplexMatrix::from_fn(g.rows(), g.cols(), |r, c| {
                    num_complex::Complex32::new(g[(r, c)].re as f32, g[(r, c)].im as f32)
                })
            })
            .collect(),
        irs_user: channels
            .irs_user
            .iter()
            .map(|row| row.iter().map(narrow).collect())
            .collect(),
    };
    let book32 = PhaseBook::build(&channels32, &PhaseAlphabet::<f32>::new(2).unwrap()).unwrap();
    assert_eq!(book32, book);
    let eval32 = LinkEvaluator::new(
        &channels32,
        &book32,
        LinkBudget::equal_split(10.0f32, 3, (1e-11 * scale * scale) as f32),
    )
    .unwrap();
    let m = Matching::identity(3, Algorithm::Random);
    let r64 = eval.evaluate(&m).unwrap().sum;
    let r32 = eval32.evaluate(&m).unwrap().sum as f64;
    assert!((r64 - r32).abs() < 1e-3 * r64.max(1.0), "{r64} vs {r32}");
}
