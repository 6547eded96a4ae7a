//! Property tests on seeded random instances. Oracles are dense truncations
//! built directly from Fourier coefficients in this file.

use btop_core::classify::{
    classify, is_hyponormal, k_hyponormality, verify_commutator_factorization, verify_finite_rank_bound,
    AnalyticMultiplier, ClassifyOptions, NormalityMethod, Verdict,
};
use btop_core::generator::Generator;
use btop_core::linalg::{hermitian_eigenvalues, identity, max_abs, orthonormality_defect};
use btop_core::operator::{identity_suite, operator_word, self_commutator, Letter};
use btop_core::potapov::model_space;
use btop_core::symbol::circle_grid;
use btop_core::{CMatrix, LaurentSymbol, TruncatedOperator, C64};
use proptest::prelude::*;

/// Block Toeplitz matrix with block `(i, j) = Phi^(i - j)`, rows x cols blocks.
fn dense_toeplitz(phi: &LaurentSymbol, rows: usize, cols: usize) -> CMatrix {
    let n = phi.n();
    let mut m = CMatrix::zeros(n * rows, n * cols);
    for i in 0..rows {
        for j in 0..cols {
            let a = phi.coeff(i as i64 - j as i64);
            m.view_mut((i * n, j * n), (n, n)).copy_from(&a);
        }
    }
    m
}

/// Top-left `w` blocks of `T^* T - T T^*` from a truncation large enough
/// for every entry of the corner to be exact.
fn dense_commutator(phi: &LaurentSymbol, w: usize) -> CMatrix {
    let big = w + phi.bandwidth() + 1;
    let t = dense_toeplitz(phi, big, big);
    let full = t.adjoint() * &t - &t * t.adjoint();
    let size = phi.n() * w;
    full.view((0, 0), (size, size)).into_owned()
}

/// `V diag(a_i + b_i psi_i) V^*` with `psi_i` real trigonometric
/// polynomials: a normal operator by construction.
fn normal_operator_symbol(g: &mut Generator) -> LaurentSymbol {
    let n = g.gen_range(1..=3);
    let v = g.unitary(n);
    let mut sum = LaurentSymbol::zero(n);
    for i in 0..n {
        let d = g.gen_range(1..=3);
        let p = g.laurent(1, 0, d);
        let psi = p.add(&p.adjoint()).unwrap();
        let ab = g.matrix(1);
        let b = g.matrix(1)[(0, 0)];
        let entry = psi.scale(b).add(&LaurentSymbol::constant(ab)).unwrap();
        let mut e = CMatrix::zeros(n, n);
        e[(i, i)] = C64::new(1.0, 0.0);
        let lifted = LaurentSymbol::new(n, entry.terms().map(|(k, a)| (k, &e * a[(0, 0)])), entry.flag()).unwrap();
        sum = sum.add(&lifted).unwrap();
    }
    let vc = LaurentSymbol::constant(v.clone());
    vc.mul(&sum).unwrap().mul(&LaurentSymbol::constant(v.adjoint())).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn products_are_unitary_on_the_circle(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let (n, m) = (g.gen_range(1..=3), g.gen_range(0..=4));
        let q = g.potapov(n, m, 0.8);
        for z in circle_grid(64) {
            let u = q.evaluate(z).unwrap();
            prop_assert!(max_abs(&(u.adjoint() * &u - identity(n))) < 1e-10);
        }
    }

    #[test]
    fn fourier_partial_sums_converge_geometrically(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let (n, m) = (g.gen_range(1..=3), g.gen_range(1..=4));
        let q = g.potapov(n, m, 0.8);
        let rho = q.zero_radius();
        let grid_error = |blocks: usize| {
            let s = q.fourier(blocks).symbol;
            circle_grid(64)
                .into_iter()
                .map(|z| max_abs(&(q.evaluate(z).unwrap() - s.evaluate_unchecked(z))))
                .fold(0.0, f64::max)
        };
        let big_n = 16;
        let (e1, e2) = (grid_error(big_n), grid_error(2 * big_n));
        prop_assert!(e2 <= e1 * 2f64.powi(m as i32) * rho.powi(big_n as i32) + 1e-12, "{e1} {e2} {rho}");
    }

    #[test]
    fn model_space_dimension_and_membership(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let (n, m) = (g.gen_range(1..=3), g.gen_range(0..=4));
        let q = g.potapov(n, m, 0.8);
        let basis = model_space(&q, 8).unwrap();
        let ranks: usize = q.factors().iter().map(|f| f.rank()).sum();
        prop_assert_eq!(basis.dim(), ranks);
        prop_assert!(orthonormality_defect(&basis.vectors) < 1e-10);
        prop_assert!(basis.membership_residual(&q) <= basis.tail_bound + 1e-8);
    }

    #[test]
    fn model_space_dimension_is_additive(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let n = g.gen_range(1..=3);
        let (m1, m2) = (g.gen_range(0..=3), g.gen_range(0..=3));
        let (q1, q2) = (g.potapov(n, m1, 0.8), g.potapov(n, m2, 0.8));
        let product = q1.mul(&q2).unwrap();
        let dim = |q| model_space(q, 8).unwrap().dim();
        prop_assert_eq!(dim(&product), dim(&q1) + dim(&q2));
    }

    #[test]
    fn toeplitz_and_hankel_adjoints(seed in any::<u64>()) {
        let phi = Generator::new(seed).small_laurent(3, 4);
        let blocks = 12;
        let t = TruncatedOperator::toeplitz(&phi, blocks);
        let ta = TruncatedOperator::toeplitz(&phi.adjoint(), blocks);
        prop_assert_eq!(max_abs(&(t.matrix().adjoint() - ta.matrix())), 0.0);
        let h = TruncatedOperator::hankel(&phi, blocks).unwrap();
        let ht = TruncatedOperator::hankel(&phi.tilde(), blocks).unwrap();
        prop_assert_eq!(max_abs(&(h.matrix().adjoint() - ht.matrix())), 0.0);
        prop_assert!(max_abs(&(t.matrix() - dense_toeplitz(&phi, blocks, blocks))) == 0.0);
    }

    #[test]
    fn normal_commutator_vanishes_outside_support(seed in any::<u64>()) {
        let inst = Generator::new(seed).small_functional(3, 3);
        let comm = self_commutator(&inst.phi, 1e-10);
        let s = comm.support_blocks();
        let dense = dense_commutator(&inst.phi, 2 * s.max(1));
        let embedded = comm.embedded(2 * s.max(1));
        prop_assert!(max_abs(&(dense - embedded)) < 1e-12 * inst.phi.norm_bound().powi(2).max(1.0));
    }

    #[test]
    fn identity_suite_on_random_symbols(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let phi = g.small_laurent(3, 4);
        let n = phi.n();
        let d = g.gen_range(0..=4);
        let psi = g.laurent(n, 0, d);
        let m = g.gen_range(0..=2);
        let theta = g.potapov(n, m, 0.0).as_laurent().unwrap();
        let report = identity_suite(&phi, &psi, &theta, 24).unwrap();
        prop_assert!(report.max_deviation() < 1e-10);
    }

    #[test]
    fn operator_words_are_truncation_stable(seed in any::<u64>(), word in prop::collection::vec(any::<bool>(), 1..4)) {
        let phi = Generator::new(seed).small_laurent(2, 3);
        let letters: Vec<Letter> = word.iter().map(|&b| if b { Letter::T } else { Letter::TStar }).collect();
        let a = operator_word(&phi, &letters, 10);
        let b = operator_word(&phi, &letters, 20);
        let w = a.exact_blocks();
        prop_assert!(max_abs(&(a.corner(w) - b.corner(w))) <= 1e-12);
    }

    #[test]
    fn hyponormality_agrees_with_dense_truncation(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        // Half the cases are normal symbols, so both verdicts occur.
        let phi = if seed % 2 == 0 { g.small_laurent(3, 4) } else { g.small_functional(3, 3).phi };
        let report = is_hyponormal(&phi, 1e-10, 1e-9);
        let support = phi.bandwidth().max(1);
        let dense_min = hermitian_eigenvalues(&dense_commutator(&phi, 4 * support))[0];
        prop_assert_eq!(report.hyponormal, dense_min >= -report.threshold, "dense min {}", dense_min);
    }

    #[test]
    fn k_hyponormality_is_monotone(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let phi = if seed % 2 == 0 { g.small_laurent(2, 3) } else { g.small_functional(2, 2).phi };
        let report = k_hyponormality(&phi, 3, 12, 1e-9).unwrap();
        let first_fail = report.verdicts.iter().position(|v| !v.passes);
        if let Some(i) = first_fail {
            prop_assert!(report.verdicts[i..].iter().all(|v| !v.passes));
        }
    }

    #[test]
    fn commutator_factorization_on_generator_instances(seed in any::<u64>()) {
        let inst = Generator::new(seed).small_functional(3, 3);
        let r = verify_commutator_factorization(&inst.phi, &AnalyticMultiplier::Potapov(inst.q.clone()), 512).unwrap();
        prop_assert!(r.certificate.member);
        if r.certificate.analytic_residual < 1e-12 {
            prop_assert!(r.max_deviation < 1e-10, "deviation {}", r.max_deviation);
        }
    }

    #[test]
    fn finite_rank_bound_on_generator_instances(seed in 0u64..50) {
        let inst = Generator::new(seed).small_functional(3, 3);
        let r = verify_finite_rank_bound(&inst.phi, &inst.q, 512, 1e-10).unwrap();
        prop_assert!(r.holds);
        prop_assert!(r.commutator_rank <= inst.q.model_dimension());
    }

    #[test]
    fn normal_verdicts_are_consistent(seed in any::<u64>()) {
        let phi = normal_operator_symbol(&mut Generator::new(seed));
        let opts = ClassifyOptions { k_max: 2, blocks: 12, ..ClassifyOptions::default() };
        let r = classify(&phi, None, &opts).unwrap();
        prop_assert_eq!(r.verdict, Verdict::Normal);
        prop_assert_eq!(r.commutator_rank, 0);
        if r.normal_operator.method == NormalityMethod::UnitaryCriterion {
            prop_assert!(r.normal_operator.residual < 1e-8);
        }
    }
}
