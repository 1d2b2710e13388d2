use proptest::prelude::*;

use enfix_core::comparison::{
    analytic_k, numeric_k, ComparisonFunction, Family, Variant, K_AGREEMENT_TOL,
};
use enfix_core::contraction::{specialize, verify, CertificateVerdict, Classic, MappingSpec};
use enfix_core::solver::{solve, StopRule, Termination};
use enfix_core::space::{NormKind, SpaceDescriptor, Vector};

fn affine_banach(a: f64, c: f64, b: f64, theta: f64, dim: usize) -> enfix_core::ContractionSpec {
    let space = SpaceDescriptor::euclidean(dim, NormKind::L2).unwrap();
    specialize(Classic::Banach, &[theta], b)
        .unwrap()
        .into_spec(space, MappingSpec::affine(a, c))
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // For Tu = a u + c the enriched Banach inequality reads |a + b| <= theta.
    #[test]
    fn verify_matches_closed_form(
        a in -3.0f64..3.0,
        c in -10.0f64..10.0,
        b in 0.0f64..3.0,
        theta in 0.05f64..0.95,
        dim in 1usize..4,
        seed in any::<u64>(),
    ) {
        let spec = affine_banach(a, c, b, theta, dim);
        let margin = theta - (a + b).abs();
        prop_assume!(margin.abs() > 1e-6);
        let rep = verify(&spec, seed, 200).unwrap();
        let want = if margin > 0.0 { CertificateVerdict::VerifiedOnSamples } else { CertificateVerdict::Falsified };
        prop_assert_eq!(rep.verdict, want);
    }

    #[test]
    fn verified_affine_maps_solve_to_their_fixed_point(
        b in 0.0f64..3.0,
        d in -0.9f64..0.9,
        c in -10.0f64..10.0,
        start in -100.0f64..100.0,
    ) {
        // a = d - b keeps |a + b| = |d| < 1 and a != 1
        let a = d - b;
        let theta = d.abs().max(0.01);
        let spec = affine_banach(a, c, b, theta, 1);
        let res = solve(&spec, &Vector::scalar(start), &StopRule::default()).unwrap();
        prop_assert_eq!(res.termination, Termination::Residual);
        let p = c / (1.0 - a);
        prop_assert!((res.fixed_point.coords()[0] - p).abs() <= 1e-11 / (1.0 - theta) * (1.0 + p.abs()));
    }

    #[test]
    fn verify_is_deterministic(seed in any::<u64>(), theta in 0.1f64..0.9) {
        let spec = affine_banach(-0.5, 1.0, 0.2, theta, 3);
        prop_assert_eq!(verify(&spec, seed, 50).unwrap(), verify(&spec, seed, 50).unwrap());
    }

    #[test]
    fn analytic_and_numeric_constants_agree(
        fam in prop::sample::select(Family::ALL.to_vec()),
        alpha in 0.01f64..0.95,
        w in (0.0f64..0.5, 0.0f64..0.5, 0.0f64..0.5),
        aprime in any::<bool>(),
        seed in 0u64..1000,
    ) {
        let variant = if aprime { Variant::APrime } else { Variant::A };
        let params = if fam == Family::WeightedSum { vec![w.0, w.1, w.2] } else { vec![alpha] };
        let f = ComparisonFunction::new(fam, params, variant).unwrap();
        let a = analytic_k(&f, variant);
        let n = numeric_k(&f, variant, seed, 400).unwrap();
        for ((la, ca), (ln, cn)) in a.branch_constants.iter().zip(&n.branch_constants) {
            prop_assert_eq!(la, ln);
            prop_assert!(ca.agrees_with(*cn, K_AGREEMENT_TOL), "{:?}: {:?} vs {:?}", la, ca, cn);
        }
        prop_assert_eq!(a.valid, n.valid);
    }
}
