use gnp_core::counting::{brute_force_oracle, component_counts};
use gnp_core::probability::{
    component_pmf, connected_probability, factorial_moments_from_pmf, isolated_vertex_probability,
    moment_identity_check, ComponentTable,
};
use gnp_core::rug::ops::Pow;
use gnp_core::rug::Rational;
use gnp_core::{make_params, GraphParams};
use proptest::prelude::*;

const P_GRID: [(i64, i64); 5] = [(1, 10), (1, 3), (1, 2), (2, 3), (9, 10)];

fn pairs(n: u32) -> u32 {
    n * (n - 1) / 2
}

#[test]
fn pmf_sums_to_one_up_to_sixty() {
    for (a, b) in P_GRID {
        let table = ComponentTable::build(&make_params(60, a, b).unwrap());
        for n in 1..=60 {
            assert_eq!(table.pmf(n).unwrap().total(), 1, "n={n} p={a}/{b}");
        }
    }
}

#[test]
fn sparsest_outcomes_have_closed_forms() {
    for (a, b) in P_GRID {
        let params = make_params(30, a, b).unwrap();
        let table = ComponentTable::build(&params);
        let (p, q) = (params.p(), params.q());
        for n in 2..=30 {
            let c = pairs(n);
            assert_eq!(table.probability(n, n), Rational::from(q.pow(c)));
            let expect = Rational::from(q.pow(c - 1)) * p * c;
            assert_eq!(table.probability(n, n - 1), expect);
        }
    }
}

// Σ_k B_{n,k} p^k q^{C(n,2)-k} is p_n, linking the counting and probability routes
#[test]
fn connected_counts_reproduce_connectivity() {
    for n in 1..=10 {
        let counts = component_counts(n).unwrap();
        for (a, b) in P_GRID {
            let params = make_params(n, a, b).unwrap();
            let slots = pairs(n);
            let total: Rational = counts
                .connected_counts
                .iter()
                .enumerate()
                .map(|(k, c)| Rational::from(params.p().pow(k as u32)) * Rational::from(params.q().pow(slots - k as u32)) * c)
                .sum();
            assert_eq!(connected_probability(&params), total);
        }
    }
}

fn params_strategy(max_n: u32) -> impl Strategy<Value = GraphParams> {
    (1..=max_n, 1i64..=12).prop_flat_map(move |(n, d)| (Just(n), 0..=d, Just(d))).prop_map(|(n, a, d)| make_params(n, a, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn recursions_match_enumeration(params in params_strategy(5)) {
        let oracle = brute_force_oracle(&params, 5).unwrap();
        let pmf = component_pmf(&params).unwrap();
        prop_assert_eq!(pmf.probs(), oracle.pmf.probs());
        prop_assert_eq!(connected_probability(&params), oracle.connected);
        prop_assert_eq!(isolated_vertex_probability(&params).unwrap(), oracle.isolated);
    }

    #[test]
    fn moment_conversions_hold(params in params_strategy(15)) {
        let s_max = params.n().min(6);
        let table = factorial_moments_from_pmf(&component_pmf(&params).unwrap(), s_max).unwrap();
        prop_assert!(moment_identity_check(&table).passed());
    }

    #[test]
    fn probabilities_stay_in_unit_interval(params in params_strategy(25)) {
        let pi = isolated_vertex_probability(&params).unwrap();
        prop_assert!(*pi.value() >= 0 && *pi.value() <= 1);
        for p in component_pmf(&params).unwrap().probs() {
            prop_assert!(*p.value() >= 0 && *p.value() <= 1);
        }
    }
}
