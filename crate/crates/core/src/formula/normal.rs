use std::collections::BTreeSet;

use super::ast::{Formula, Sort};

/// Rewrites `!E p . R(p, s)` into the inconsistency atom, strips double
/// negations, negated constants, and flattens nested `&`/`|`.
pub fn normalize(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        Rel(..) | PointEq(..) | StateEq(..) | Incon(_) | True | False => f.clone(),
        Not(g) => match normalize(g) {
            Not(h) => *h,
            True => False,
            False => True,
            Exists(Sort::Point, vars, body) if is_witness_pattern(&vars, &body) => match *body {
                Rel(_, s) => Incon(s),
                _ => unreachable!(),
            },
            g => Not(Box::new(g)),
        },
        And(gs) => And(flatten(gs, |g| matches!(g, And(_)))),
        Or(gs) => Or(flatten(gs, |g| matches!(g, Or(_)))),
        Exists(sort, vars, body) => Exists(*sort, vars.clone(), Box::new(normalize(body))),
        Forall(sort, vars, body) => Forall(*sort, vars.clone(), Box::new(normalize(body))),
    }
}

fn is_witness_pattern(vars: &[String], body: &Formula) -> bool {
    matches!((vars, body), ([v], Formula::Rel(p, _)) if v == p)
}

fn flatten(gs: &[Formula], same: impl Fn(&Formula) -> bool) -> Vec<Formula> {
    let mut out = Vec::with_capacity(gs.len());
    for g in gs {
        let g = normalize(g);
        if same(&g) {
            match g {
                Formula::And(hs) | Formula::Or(hs) => out.extend(hs),
                _ => unreachable!(),
            }
        } else {
            out.push(g);
        }
    }
    out
}

pub fn is_normalized(f: &Formula) -> bool {
    normalize(f) == *f
}

/// Replaces every inconsistency atom by `A p . !R(p, s)` with a fresh `p`.
pub fn expand_incon(f: &Formula) -> Formula {
    let mut used = BTreeSet::new();
    collect_names(f, &mut used);
    let mut counter = 0;
    expand(f, &used, &mut counter)
}

fn expand(f: &Formula, used: &BTreeSet<String>, counter: &mut usize) -> Formula {
    use Formula::*;
    match f {
        Incon(s) => {
            let p = loop {
                let name = format!("p#{counter}");
                *counter += 1;
                if !used.contains(&name) {
                    break name;
                }
            };
            Forall(Sort::Point, vec![p.clone()], Box::new(Formula::not(Rel(p, s.clone()))))
        }
        Rel(..) | PointEq(..) | StateEq(..) | True | False => f.clone(),
        Not(g) => Formula::not(expand(g, used, counter)),
        And(gs) => And(gs.iter().map(|g| expand(g, used, counter)).collect()),
        Or(gs) => Or(gs.iter().map(|g| expand(g, used, counter)).collect()),
        Exists(s, v, b) => Exists(*s, v.clone(), Box::new(expand(b, used, counter))),
        Forall(s, v, b) => Forall(*s, v.clone(), Box::new(expand(b, used, counter))),
    }
}

fn collect_names(f: &Formula, out: &mut BTreeSet<String>) {
    use Formula::*;
    match f {
        Rel(a, b) | PointEq(a, b) | StateEq(a, b) => {
            out.insert(a.clone());
            out.insert(b.clone());
        }
        Incon(a) => {
            out.insert(a.clone());
        }
        True | False => {}
        Not(g) => collect_names(g, out),
        And(gs) | Or(gs) => gs.iter().for_each(|g| collect_names(g, out)),
        Exists(_, vars, body) | Forall(_, vars, body) => {
            out.extend(vars.iter().cloned());
            collect_names(body, out);
        }
    }
}
