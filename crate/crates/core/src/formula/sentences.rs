//! Builders for the named sentences, instantiated at finite sizes.

use itertools::Itertools;

use super::ast::{Formula, Sort};
use crate::error::{Error, Result};

/// Default cap on the number of `Z` disjuncts in the covering sentences.
pub const DEFAULT_SENTENCE_BUDGET: u128 = 100_000;

fn state_vars(l: usize) -> Vec<String> {
    (0..l).map(|i| format!("a{i}")).collect()
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Subsets of `0..l` with fewer than `k` elements, by size then lexicographically.
fn small_subsets(k: usize, l: usize, budget: u128) -> Result<Vec<Vec<usize>>> {
    let requested: u128 = (0..k.min(l + 1)).map(|j| binomial(l, j)).sum();
    if requested > budget {
        return Err(Error::BudgetExceeded { requested, budget });
    }
    Ok((0..k.min(l + 1)).flat_map(|j| (0..l).combinations(j)).collect())
}

fn check_params(k: usize, l: usize) -> Result<()> {
    if k == 0 || k > l {
        return Err(Error::PreconditionFailed(format!("need 1 <= k <= l, got k = {k}, l = {l}")));
    }
    Ok(())
}

// E x . !R(x, a0) & ... & !R(x, a{l-1})
fn avoiding_point(vars: &[String]) -> Formula {
    Formula::Exists(
        Sort::Point,
        vec!["x".into()],
        Box::new(Formula::And(vars.iter().map(|a| Formula::not(Formula::rel("x", a))).collect())),
    )
}

fn some_related(point: &str, vars: &[String], z: &[usize]) -> Formula {
    Formula::Or(z.iter().map(|&i| Formula::rel(point, &vars[i])).collect())
}

/// `A a0..a{l-1} . (E x . &!R(x,ai)) | OR_Z (A x . OR_{i in Z} R(x,ai))` over `|Z| < k`.
pub fn build_compactness_sentence(k: usize, l: usize) -> Result<Formula> {
    build_compactness_sentence_with_budget(k, l, DEFAULT_SENTENCE_BUDGET)
}

pub fn build_compactness_sentence_with_budget(k: usize, l: usize, budget: u128) -> Result<Formula> {
    check_params(k, l)?;
    let vars = state_vars(l);
    let mut disjuncts = vec![avoiding_point(&vars)];
    for z in small_subsets(k, l, budget)? {
        disjuncts.push(Formula::Forall(
            Sort::Point,
            vec!["x".into()],
            Box::new(some_related("x", &vars, &z)),
        ));
    }
    Ok(Formula::Forall(Sort::State, vars, Box::new(Formula::Or(disjuncts))))
}

/// As the compactness sentence, but each `Z` only has to meet every consistent state:
/// `A c . !Con(c) | E x . (R(x,c) & OR_{i in Z} R(x,ai))`.
pub fn build_absolute_closure_sentence(k: usize, l: usize) -> Result<Formula> {
    build_absolute_closure_sentence_with_budget(k, l, DEFAULT_SENTENCE_BUDGET)
}

pub fn build_absolute_closure_sentence_with_budget(k: usize, l: usize, budget: u128) -> Result<Formula> {
    check_params(k, l)?;
    let vars = state_vars(l);
    let mut disjuncts = vec![avoiding_point(&vars)];
    for z in small_subsets(k, l, budget)? {
        let meets = Formula::Exists(
            Sort::Point,
            vec!["x".into()],
            Box::new(Formula::And(vec![Formula::rel("x", "c"), some_related("x", &vars, &z)])),
        );
        disjuncts.push(Formula::Forall(
            Sort::State,
            vec!["c".into()],
            Box::new(Formula::Or(vec![Formula::incon("c"), meets])),
        ));
    }
    Ok(Formula::Forall(Sort::State, vars, Box::new(Formula::Or(disjuncts))))
}

/// `E x0..x{k-1} . A c . !Con(c) | R(x0,c) | ... | R(x{k-1},c)`.
pub fn build_density_sentence(k: usize) -> Result<Formula> {
    if k == 0 {
        return Err(Error::PreconditionFailed("density needs k >= 1".into()));
    }
    let xs: Vec<String> = (0..k).map(|i| format!("x{i}")).collect();
    let mut body = vec![Formula::incon("c")];
    body.extend(xs.iter().map(|x| Formula::rel(x, "c")));
    Ok(Formula::Exists(
        Sort::Point,
        xs,
        Box::new(Formula::Forall(Sort::State, vec!["c".into()], Box::new(Formula::Or(body)))),
    ))
}

/// Any two consistent states either share a point or are jointly avoided by one.
pub fn connectedness_sentence() -> Formula {
    let both = |negate: bool| {
        let lit = |a: &str| {
            let r = Formula::rel("x", a);
            if negate {
                Formula::not(r)
            } else {
                r
            }
        };
        Formula::exists(Sort::Point, &["x"], Formula::And(vec![lit("a0"), lit("a1")]))
    };
    Formula::forall(
        Sort::State,
        &["a0", "a1"],
        Formula::Or(vec![
            Formula::incon("a0"),
            Formula::incon("a1"),
            both(false),
            both(true),
        ]),
    )
}

/// Two distinct points that no state tells apart.
pub fn not_separated_sentence() -> Formula {
    let agree = Formula::Or(vec![
        Formula::And(vec![Formula::rel("x", "a"), Formula::rel("y", "a")]),
        Formula::And(vec![
            Formula::not(Formula::rel("x", "a")),
            Formula::not(Formula::rel("y", "a")),
        ]),
    ]);
    Formula::exists(
        Sort::Point,
        &["x", "y"],
        Formula::And(vec![
            Formula::not(Formula::point_eq("x", "y")),
            Formula::forall(Sort::State, &["a"], agree),
        ]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{classify, is_normalized, parse_formula, FormulaClass};

    #[test]
    fn smallest_compactness_instance() {
        let f = build_compactness_sentence(1, 1).unwrap();
        assert_eq!(f.to_string(), "A a0 . (E x . (!R(x, a0))) | (A x . false)");
    }

    #[test]
    fn budget_and_params() {
        assert!(matches!(
            build_compactness_sentence_with_budget(3, 10, 20),
            Err(Error::BudgetExceeded { requested: 56, budget: 20 })
        ));
        assert!(build_compactness_sentence(3, 2).is_err());
        assert!(build_absolute_closure_sentence(0, 2).is_err());
    }

    #[test]
    fn builders_are_normalized_and_classified() {
        for (k, l) in [(1, 1), (2, 2), (2, 3), (3, 3)] {
            let c = build_compactness_sentence(k, l).unwrap();
            assert!(is_normalized(&c));
            let classes = classify(&c).unwrap();
            assert!(classes.contains(&FormulaClass::UniversalFlow));
            assert!(!classes.contains(&FormulaClass::InconsistencyFlow));
            let a = build_absolute_closure_sentence(k, l).unwrap();
            assert!(classify(&a).unwrap().contains(&FormulaClass::InconsistencyFlow));
        }
        assert!(classify(&connectedness_sentence()).unwrap().contains(&FormulaClass::InconsistencyFlow));
        assert!(classify(&build_density_sentence(2).unwrap())
            .unwrap()
            .contains(&FormulaClass::InconsistencyFlow));
        let ns = classify(&not_separated_sentence()).unwrap();
        assert!(ns.contains(&FormulaClass::RegressiveFlow));
        assert!(!ns.contains(&FormulaClass::UniversalFlow));
    }

    #[test]
    fn not_separated_matches_text() {
        let parsed = parse_formula("E x y . (!(x = y) & A a . ((R(x,a) & R(y,a)) | (!R(x,a) & !R(y,a))))").unwrap();
        assert_eq!(parsed, not_separated_sentence());
    }
}
