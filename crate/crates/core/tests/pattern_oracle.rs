mod oracle;

use std::collections::BTreeMap;

use gdl_core::pattern::MatchError;
use gdl_core::{
    enumerate_matchings, evaluate_bracket, parse_gauss_code, parse_pattern, random_diagram, ArrowPattern,
    AssignmentMode, GaussDiagram, Sign, Slot,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sorted_matchings(p: &ArrowPattern, d: &GaussDiagram) -> Option<Vec<oracle::Embedding>> {
    let mut m: Vec<oracle::Embedding> = enumerate_matchings(p, d)
        .ok()?
        .into_iter()
        .map(|m| (m.circle_map, m.arrow_map, m.weight))
        .collect();
    m.sort();
    Some(m)
}

fn agree(p: &ArrowPattern, d: &GaussDiagram) -> Result<(), String> {
    let mut want = oracle::embeddings(p, d);
    if let Some(w) = want.as_mut() {
        w.sort();
    }
    let got = sorted_matchings(p, d);
    if got != want {
        return Err(format!("pattern {p}, diagram {d}: matcher {got:?}, oracle {want:?}"));
    }
    let value = evaluate_bracket(p, d).ok();
    if value != oracle::bracket(p, d) {
        return Err(format!("pattern {p}, diagram {d}: bracket {value:?}"));
    }
    Ok(())
}

#[test]
fn two_hundred_seeded_instances_match_the_oracle() {
    let mut nonzero = 0;
    for i in 0..200 {
        let (p, d) = oracle::instance(8, i);
        agree(&p, &d).unwrap();
        nonzero += usize::from(oracle::bracket(&p, &d).is_some_and(|v| v != 0));
    }
    // the sample exercises real matches, not just empty sums
    assert!(nonzero > 20, "only {nonzero} nonzero instances");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn matcher_equals_oracle(seed in any::<u64>(), k in 1usize..=3, n in 0usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = oracle::random_pattern(&mut rng, 3);
        let d = random_diagram(k, n, rng.gen());
        prop_assert!(agree(&p, &d).is_ok(), "{}", agree(&p, &d).unwrap_err());
    }

    #[test]
    fn weight_is_the_product_of_matched_signs(seed in any::<u64>()) {
        let (p, d) = oracle::instance(seed, 0);
        if let Ok(ms) = enumerate_matchings(&p, &d) {
            for m in ms {
                let w: i64 = m.arrow_map.iter().map(|&(_, l)| d.sign(l).value()).product();
                prop_assert_eq!(m.weight, w);
                for &(pl, dl) in &m.arrow_map {
                    prop_assert!(p.constraint(pl).admits(d.sign(dl)));
                }
            }
        }
    }

    #[test]
    fn removing_an_arrow_creates_no_matchings(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let (p, d) = oracle::instance(seed, 1);
        prop_assume!(d.num_arrows() > 0);
        let labels: Vec<u32> = d.labels().collect();
        let gone = labels[pick.index(labels.len())];
        let comps = d.components().iter().map(|c| c.iter().copied().filter(|s| s.label != gone).collect()).collect();
        let signs = labels.iter().filter(|&&l| l != gone).map(|&l| (l, d.sign(l))).collect();
        let smaller = GaussDiagram::new(comps, signs).unwrap();
        if let (Some(big), Some(small)) = (sorted_matchings(&p, &d), sorted_matchings(&p, &smaller)) {
            for m in &small {
                prop_assert!(big.contains(m));
            }
        }
    }

    #[test]
    fn empty_pattern_counts_circle_assignments(k in 1usize..=4, c in 1usize..=4, n in 0usize..=4, seed in any::<u64>()) {
        let d = random_diagram(k, n, seed);
        let empty = ArrowPattern::new(vec![Vec::new(); c], BTreeMap::new(), AssignmentMode::AllInjective).unwrap();
        let falling: i64 = (0..c).map(|i| k as i64 - i as i64).product::<i64>().max(0);
        let ms = enumerate_matchings(&empty, &d).unwrap();
        prop_assert_eq!(ms.len() as i64, falling);
        prop_assert!(ms.iter().all(|m| m.weight == 1));
        let ordered = empty.with_mode(AssignmentMode::Ordered);
        if c <= k {
            prop_assert_eq!(evaluate_bracket(&ordered, &d), Ok(1));
        } else {
            prop_assert_eq!(
                evaluate_bracket(&ordered, &d),
                Err(MatchError::TooManyCircles { pattern: c, diagram: k })
            );
        }
    }
}

#[test]
fn single_arrow_examples() {
    let p = parse_pattern("O1 U1 ; 1:+ ; all-injective").unwrap();
    let d = parse_gauss_code("O1+ U1+ / ()").unwrap();
    let ms = enumerate_matchings(&p, &d).unwrap();
    assert_eq!(ms.len(), 1);
    assert_eq!(ms[0].weight, 1);

    let t = parse_gauss_code("O1+ U2+ O3+ U1+ O2+ U3+ / ()").unwrap();
    let ms = enumerate_matchings(&p, &t).unwrap();
    assert_eq!(ms.len(), 3);
    assert!(ms.iter().all(|m| m.weight == 1));
    assert_eq!(oracle::bracket(&p, &t), Some(3));
}

#[test]
fn crossed_and_parallel_chords_are_told_apart() {
    let crossed = parse_pattern("O1 O2 U1 U2").unwrap();
    let nested = parse_pattern("O1 O2 U2 U1").unwrap();
    let d = parse_gauss_code("O1- O2+ U1- U2+ / O3+ U3+").unwrap();
    assert_eq!(evaluate_bracket(&crossed, &d), Ok(-1));
    assert_eq!(evaluate_bracket(&nested, &d), Ok(0));
    assert_eq!(oracle::bracket(&crossed, &d), Some(-1));
}

#[test]
fn constraints_filter_rather_than_weigh() {
    let d = parse_gauss_code("O1- U1- / ()").unwrap();
    let neg = parse_pattern("O1 U1 ; 1:-").unwrap();
    let pos = parse_pattern("O1 U1 ; 1:+").unwrap();
    assert_eq!(evaluate_bracket(&neg, &d), Ok(-1));
    assert_eq!(evaluate_bracket(&pos, &d), Ok(0));
    let built = ArrowPattern::new(vec![vec![Slot::over(1), Slot::under(1)]], BTreeMap::from([(1, Sign::Neg.into())]), AssignmentMode::Ordered).unwrap();
    assert_eq!(built, neg);
}
