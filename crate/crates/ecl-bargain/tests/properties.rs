mod common;

use proptest::prelude::*;

fn run(check: common::Check) -> Result<(), TestCaseError> {
    check.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn nbs_axioms(seed in any::<u64>()) {
        run(common::nbs_axioms(seed, 1e-6))?;
    }

    #[test]
    fn common_weights_are_pareto_optimal(seed in any::<u64>()) {
        run(common::equal_weights_pareto(seed))?;
    }

    #[test]
    fn different_weights_are_dominated(seed in any::<u64>()) {
        run(common::unequal_weights_dominated(seed))?;
    }

    #[test]
    fn split_type_keeps_payoffs(seed in any::<u64>()) {
        run(common::split_invariance(seed, 1e-6))?;
    }

    #[test]
    fn balanced_combination_covers_claims(seed in any::<u64>()) {
        run(common::balanced_inequality(seed))?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn uncorrelated_play_matches_mixed_utility(seed in any::<u64>()) {
        run(common::uncorrelated_equivalence(seed))?;
    }

    #[test]
    fn worst_case_core_is_nonempty(seed in any::<u64>()) {
        run(common::worst_case_core_nonempty(seed))?;
    }

    #[test]
    fn worst_case_core_inside_alpha_core(seed in any::<u64>()) {
        run(common::core_nesting(seed))?;
    }
}

#[test]
fn symmetric_split_keeps_payoffs() {
    common::symmetric_split(1e-6).unwrap();
}
