mod common;

use common::*;
use mdf_core::dirichlet::{dirichlet_operator, DirichletSpec, Engine};
use mdf_core::kernel::KernelFunction;
use mdf_core::lindblad::{lindblad_apply, LindbladSpec};
use mdf_core::modular::sigma;
use mdf_core::scenario::{generate_scenario, CoefficientKind, Scenario};
use mdf_core::semigroup::Semigroup;
use mdf_core::standard_form::{jordan_decompose, project_order_interval, DensityMatrix, HsVector, StandardForm};
use proptest::prelude::*;

fn setup(seed: u64, n: usize) -> (rand_chacha::ChaCha8Rng, M, StandardForm) {
    let mut r = rng(seed);
    let rho = random_state(&mut r, n);
    let sf = StandardForm::new(DensityMatrix::new(rho.clone()).unwrap()).unwrap();
    (r, rho, sf)
}

fn min_eig(m: &M) -> f64 {
    ((m + m.adjoint()) * c(0.5, 0.0)).symmetric_eigen().eigenvalues.min()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn modular_flow_is_a_group(seed in any::<u64>(), n in 2usize..=4, s in -3.0f64..3.0, t in -3.0f64..3.0) {
        let (mut r, rho, sf) = setup(seed, n);
        let a = ginibre(&mut r, n);
        let st = sigma(&sf, &sigma(&sf, &a, c(t, 0.0)).unwrap(), c(s, 0.0)).unwrap();
        let direct = sigma(&sf, &a, c(s + t, 0.0)).unwrap();
        prop_assert!(frob(&(&st - &direct)) < 1e-10 * frob(&a));
        let oracle = common::sigma(&rho, &a, s + t, 0.0);
        prop_assert!(frob(&(direct - oracle)) < 1e-9 * frob(&a));
    }

    #[test]
    fn dirichlet_operator_kills_xi0_and_is_positive(seed in any::<u64>(), n in 2usize..=4, hermitian_x in any::<bool>()) {
        let (mut r, rho, sf) = setup(seed, n);
        let x = if hermitian_x { hermitian(&mut r, n) } else { ginibre(&mut r, n) };
        let spec = DirichletSpec::new(x, KernelFunction::F0, Engine::ExactSpectral).unwrap();
        let h = dirichlet_operator(&spec, &sf).unwrap();
        let scale = frob(h.matrix()).max(1.0);
        let xi0 = rho_pow(&rho, 0.5);
        prop_assert!(frob(&apply_eigen_super(h.matrix(), sf.eigenvectors(), &xi0)) < 1e-10 * scale);
        prop_assert!(frob(&(h.matrix() - h.matrix().adjoint())) < 1e-10 * scale);
        prop_assert!(min_eig(h.matrix()) > -1e-10 * scale);
    }

    #[test]
    fn jordan_parts_are_orthogonal_and_positive(seed in any::<u64>(), n in 2usize..=5) {
        let (mut r, _, sf) = setup(seed, n);
        let xi = hermitian(&mut r, n);
        let (pos, neg) = jordan_decompose(&sf, &HsVector::new(xi.clone())).unwrap();
        let (p, m) = (pos.matrix(), neg.matrix());
        prop_assert!(frob(&(p - m - &xi)) < 1e-12 * frob(&xi).max(1.0));
        prop_assert!((p.adjoint() * m).trace().norm() < 1e-12);
        prop_assert!(min_eig(p) > -1e-12 && min_eig(m) > -1e-12);
    }

    #[test]
    fn interval_projection_lands_inside_and_is_idempotent(seed in any::<u64>(), n in 2usize..=4) {
        let (mut r, rho, sf) = setup(seed, n);
        let eta = HsVector::new(hermitian(&mut r, n));
        let p = project_order_interval(&sf, &eta).unwrap();
        let top = rho_pow(&rho, 0.5);
        prop_assert!(min_eig(p.matrix()) > -1e-8);
        prop_assert!(min_eig(&(&top - p.matrix())) > -1e-8);
        let again = project_order_interval(&sf, &p).unwrap();
        prop_assert!(frob(&(again.matrix() - p.matrix())) < 1e-8);
    }

    #[test]
    fn generator_is_conservative_and_preserves_adjoints(seed in any::<u64>(), n in 2usize..=4) {
        let (mut r, _, sf) = setup(seed, n);
        let spec = LindbladSpec::new(&sf, vec![ginibre(&mut r, n), ginibre(&mut r, n)], hermitian(&mut r, n)).unwrap();
        let id = M::identity(n, n);
        prop_assert!(frob(&lindblad_apply(&spec, &sf, &id).unwrap()) < 1e-10);
        let a = ginibre(&mut r, n);
        let la = lindblad_apply(&spec, &sf, &a).unwrap();
        let la_adj = lindblad_apply(&spec, &sf, &a.adjoint()).unwrap();
        prop_assert!(frob(&(la_adj - la.adjoint())) < 1e-10 * frob(&la).max(1.0));
    }

    #[test]
    fn semigroup_fixes_xi0_and_contracts(seed in any::<u64>(), n in 2usize..=3, t in 0.0f64..5.0) {
        let (mut r, rho, sf) = setup(seed, n);
        let spec = DirichletSpec::new(ginibre(&mut r, n), KernelFunction::F0, Engine::ExactSpectral).unwrap();
        let h = dirichlet_operator(&spec, &sf).unwrap();
        let semigroup = Semigroup::new(&h).unwrap();
        let xi0 = HsVector::new(rho_pow(&rho, 0.5));
        let moved = semigroup.evolve(&sf, &xi0, t).unwrap();
        prop_assert!(frob(&(moved.matrix() - xi0.matrix())) < 1e-10);
        let v = HsVector::new(ginibre(&mut r, n));
        prop_assert!(semigroup.evolve(&sf, &v, t).unwrap().norm() <= v.norm() * (1.0 + 1e-12));
    }

    #[test]
    fn generated_scenarios_round_trip(seed in 0u64..1000, n in 2usize..=4, kind in 0usize..3) {
        let kind = [CoefficientKind::Hermitian, CoefficientKind::Ginibre, CoefficientKind::BalancedPair][kind];
        let s = generate_scenario(seed, n, kind).unwrap();
        let back = Scenario::from_json(&s.to_json()).unwrap();
        prop_assert_eq!(back, s);
    }
}
