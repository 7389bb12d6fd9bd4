mod common;

use common::*;
use loja_core::exponent;
use proptest::prelude::*;

const GERMS: &[&str] = &[
    "x",
    "y",
    "y - x",
    "y + 2*x",
    "x - 3*y",
    "y - x^2",
    "y + x^2 - x^3",
    "y^2 - x^3",
    "y^2 - 2*x^3",
    "x^2 - y^3",
    "y^2 - x^5",
    "y^3 - x^4",
    "(y^2 - x^3)^2 - 4*x^5*y - x^7",
];

fn component(picks: &[(usize, u32)]) -> (String, Vec<usize>) {
    let factors: Vec<String> = picks.iter().map(|&(g, k)| format!("({})^{k}", GERMS[g])).collect();
    (factors.join("*"), picks.iter().map(|p| p.0).collect())
}

fn arb_case() -> impl Strategy<Value = Case> {
    let factor = (0..GERMS.len(), 1u32..=2);
    proptest::collection::vec(proptest::collection::vec(factor, 1..=2), 1..=3).prop_map(|comps| {
        let mut germs: Vec<usize> = Vec::new();
        let mut components = Vec::new();
        for picks in comps {
            let (text, used) = component(&picks);
            components.push(text);
            germs.extend(used);
        }
        germs.sort_unstable();
        germs.dedup();
        Case {
            name: components.join(", "),
            components,
            germs: germs.into_iter().map(|g| GERMS[g].to_string()).collect(),
            stated: None,
        }
    })
}

#[test]
fn stated_values_match_the_oracle() {
    for case in corpus() {
        let got = render(&exponent(&mapping(&case)).unwrap().exponent);
        let oracle = render(&oracle_exponent(&case));
        assert_eq!(got, oracle, "{}", case.name);
        if let Some(stated) = &case.stated {
            assert_eq!(&got, stated, "{}", case.name);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn engine_agrees_with_resultant_oracle(case in arb_case()) {
        let got = exponent(&mapping(&case)).unwrap().exponent;
        prop_assert_eq!(render(&got), render(&oracle_exponent(&case)), "{}", case.name);
    }
}
