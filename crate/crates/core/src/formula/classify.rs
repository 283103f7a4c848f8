use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ast::{Formula, Sort};
use super::normal::is_normalized;
use crate::error::{Error, Result};

/// Syntactic formula classes. The derived order is the display order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FormulaClass {
    Flow,
    UniversalFlow,
    RegressiveFlow,
    InconsistencyFlow,
    General,
}

impl FormulaClass {
    pub const ALL: [FormulaClass; 5] = [
        FormulaClass::Flow,
        FormulaClass::UniversalFlow,
        FormulaClass::RegressiveFlow,
        FormulaClass::InconsistencyFlow,
        FormulaClass::General,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FormulaClass::Flow => "FLOW",
            FormulaClass::UniversalFlow => "UNIVERSAL_FLOW",
            FormulaClass::RegressiveFlow => "REGRESSIVE_FLOW",
            FormulaClass::InconsistencyFlow => "INCONSISTENCY_FLOW",
            FormulaClass::General => "GENERAL",
        }
    }

    fn bit(self) -> u8 {
        1 << self as u8
    }
}

impl fmt::Display for FormulaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FormulaClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        FormulaClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s) || c.name().replace('_', "-").eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown formula class `{s}`"))
    }
}

const F: u8 = 1 << 0;
const UF: u8 = 1 << 1;
const RF: u8 = 1 << 2;
const IF: u8 = 1 << 3;
const ANY: u8 = F | UF | RF | IF;

fn node_bits(f: &Formula) -> u8 {
    use Formula::*;
    match f {
        True | False => ANY,
        Rel(..) => ANY,
        PointEq(..) => ANY,
        StateEq(..) => RF,
        Incon(_) => IF,
        Not(g) => match **g {
            Rel(..) => ANY,
            StateEq(..) => ANY,
            PointEq(..) => RF,
            _ => 0,
        },
        And(gs) | Or(gs) => gs.iter().fold(ANY, |acc, g| acc & node_bits(g)),
        Exists(Sort::Point, _, body) => node_bits(body),
        Forall(Sort::State, _, body) => node_bits(body),
        Forall(Sort::Point, _, body) => (UF | RF) & node_bits(body),
        Exists(Sort::State, _, _) => 0,
    }
}

/// Every class the normalized formula belongs to. `GENERAL` is always present.
pub fn classify(f: &Formula) -> Result<BTreeSet<FormulaClass>> {
    if !is_normalized(f) {
        return Err(Error::NotNormalized);
    }
    let bits = node_bits(f);
    Ok(FormulaClass::ALL
        .into_iter()
        .filter(|c| *c == FormulaClass::General || bits & c.bit() != 0)
        .collect())
}

pub fn is_member(f: &Formula, class: FormulaClass) -> Result<bool> {
    Ok(classify(f)?.contains(&class))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{normalize, parse_formula};
    use FormulaClass::*;

    fn classes(s: &str) -> Vec<FormulaClass> {
        classify(&normalize(&parse_formula(s).unwrap())).unwrap().into_iter().collect()
    }

    #[test]
    fn literals() {
        assert_eq!(classes("R(x,a)"), vec![Flow, UniversalFlow, RegressiveFlow, InconsistencyFlow, General]);
        assert_eq!(classes("!(a = b)"), vec![Flow, UniversalFlow, RegressiveFlow, InconsistencyFlow, General]);
        assert_eq!(classes("a = b"), vec![RegressiveFlow, General]);
        assert_eq!(classes("!(x = y)"), vec![RegressiveFlow, General]);
        assert_eq!(classes("!Con(a)"), vec![InconsistencyFlow, General]);
        assert_eq!(classes("!!Con(a)"), vec![General]);
    }

    #[test]
    fn quantifiers() {
        assert_eq!(classes("A x . R(x,a)"), vec![UniversalFlow, RegressiveFlow, General]);
        assert_eq!(classes("E a . R(x,a)"), vec![General]);
        assert_eq!(classes("A a . E x . R(x,a)").len(), 5);
        assert_eq!(classes("A a . !E x . (R(x,a) & R(x,b))"), vec![General]);
    }

    #[test]
    fn unnormalized_input_rejected() {
        let f = parse_formula("!!R(x,a)").unwrap();
        assert_eq!(classify(&f), Err(Error::NotNormalized));
    }

    #[test]
    fn names_parse_back() {
        for c in FormulaClass::ALL {
            assert_eq!(c.name().parse::<FormulaClass>().unwrap(), c);
        }
        assert_eq!("universal-flow".parse::<FormulaClass>().unwrap(), UniversalFlow);
    }
}
