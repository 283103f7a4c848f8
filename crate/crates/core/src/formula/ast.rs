use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// The two sorts of the language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sort {
    Point,
    State,
}

impl Sort {
    pub fn name(self) -> &'static str {
        match self {
            Sort::Point => "point",
            Sort::State => "state",
        }
    }

    /// Sort implied by a variable's leading letter, if any.
    pub fn infer(name: &str) -> Option<Sort> {
        match name.chars().next()? {
            'x' | 'y' | 'z' | 'p' => Some(Sort::Point),
            'a' | 'b' | 'c' | 's' => Some(Sort::State),
            _ => None,
        }
    }
}

/// Two-sorted formula. Variable names live in separate namespaces per sort;
/// the sort of an occurrence is fixed by its position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    /// `R(point, state)`
    Rel(String, String),
    PointEq(String, String),
    StateEq(String, String),
    /// The state has no related point.
    Incon(String),
    True,
    False,
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(Sort, Vec<String>, Box<Formula>),
    Forall(Sort, Vec<String>, Box<Formula>),
}

impl Formula {
    pub fn rel(p: impl Into<String>, s: impl Into<String>) -> Formula {
        Formula::Rel(p.into(), s.into())
    }

    pub fn point_eq(p: impl Into<String>, q: impl Into<String>) -> Formula {
        Formula::PointEq(p.into(), q.into())
    }

    pub fn state_eq(a: impl Into<String>, b: impl Into<String>) -> Formula {
        Formula::StateEq(a.into(), b.into())
    }

    pub fn incon(s: impl Into<String>) -> Formula {
        Formula::Incon(s.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn exists(sort: Sort, vars: &[&str], body: Formula) -> Formula {
        Formula::Exists(sort, vars.iter().map(|v| v.to_string()).collect(), Box::new(body))
    }

    pub fn forall(sort: Sort, vars: &[&str], body: Formula) -> Formula {
        Formula::Forall(sort, vars.iter().map(|v| v.to_string()).collect(), Box::new(body))
    }

    /// `Con(s)` spelled out as `E p . R(p, s)`.
    pub fn con(point_var: impl Into<String>, s: impl Into<String>) -> Formula {
        let p = point_var.into();
        Formula::Exists(Sort::Point, vec![p.clone()], Box::new(Formula::Rel(p, s.into())))
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Not(f) | Formula::Exists(_, _, f) | Formula::Forall(_, _, f) => 1 + f.size(),
            Formula::And(fs) | Formula::Or(fs) => 1 + fs.iter().map(Formula::size).sum::<usize>(),
            _ => 1,
        }
    }
}

/// Free point and state variables, each sorted by name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeVars {
    pub points: BTreeSet<String>,
    pub states: BTreeSet<String>,
}

impl FreeVars {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.states.is_empty()
    }
}

pub fn free_variables(f: &Formula) -> FreeVars {
    let mut out = FreeVars::default();
    let mut bound_p = Vec::new();
    let mut bound_s = Vec::new();
    collect_free(f, &mut bound_p, &mut bound_s, &mut out);
    out
}

fn collect_free<'a>(
    f: &'a Formula,
    bound_p: &mut Vec<&'a str>,
    bound_s: &mut Vec<&'a str>,
    out: &mut FreeVars,
) {
    let point = |v: &str, bound_p: &Vec<&str>, out: &mut FreeVars| {
        if !bound_p.contains(&v) {
            out.points.insert(v.to_string());
        }
    };
    let state = |v: &str, bound_s: &Vec<&str>, out: &mut FreeVars| {
        if !bound_s.contains(&v) {
            out.states.insert(v.to_string());
        }
    };
    match f {
        Formula::Rel(p, s) => {
            point(p, bound_p, out);
            state(s, bound_s, out);
        }
        Formula::PointEq(p, q) => {
            point(p, bound_p, out);
            point(q, bound_p, out);
        }
        Formula::StateEq(a, b) => {
            state(a, bound_s, out);
            state(b, bound_s, out);
        }
        Formula::Incon(s) => state(s, bound_s, out),
        Formula::True | Formula::False => {}
        Formula::Not(g) => collect_free(g, bound_p, bound_s, out),
        Formula::And(gs) | Formula::Or(gs) => {
            for g in gs {
                collect_free(g, bound_p, bound_s, out);
            }
        }
        Formula::Exists(sort, vars, body) | Formula::Forall(sort, vars, body) => {
            let stack = match sort {
                Sort::Point => &mut *bound_p,
                Sort::State => &mut *bound_s,
            };
            let depth = stack.len();
            stack.extend(vars.iter().map(String::as_str));
            collect_free(body, bound_p, bound_s, out);
            match sort {
                Sort::Point => bound_p.truncate(depth),
                Sort::State => bound_s.truncate(depth),
            }
        }
    }
}

/// Structural equality up to renaming of bound variables.
pub fn alpha_eq(f: &Formula, g: &Formula) -> bool {
    AlphaCtx::default().eq(f, g)
}

#[derive(Default)]
struct AlphaCtx {
    // (sort, left name, right name) from innermost binder outwards
    binders: Vec<(Sort, String, String)>,
}

impl AlphaCtx {
    fn var_eq(&self, sort: Sort, a: &str, b: &str) -> bool {
        for (s, l, r) in self.binders.iter().rev() {
            if *s != sort {
                continue;
            }
            match (l == a, r == b) {
                (true, true) => return true,
                (false, false) => continue,
                _ => return false,
            }
        }
        a == b
    }

    fn eq(&mut self, f: &Formula, g: &Formula) -> bool {
        use Formula::*;
        match (f, g) {
            (Rel(p, s), Rel(q, t)) => self.var_eq(Sort::Point, p, q) && self.var_eq(Sort::State, s, t),
            (PointEq(a, b), PointEq(c, d)) => {
                self.var_eq(Sort::Point, a, c) && self.var_eq(Sort::Point, b, d)
            }
            (StateEq(a, b), StateEq(c, d)) => {
                self.var_eq(Sort::State, a, c) && self.var_eq(Sort::State, b, d)
            }
            (Incon(a), Incon(b)) => self.var_eq(Sort::State, a, b),
            (True, True) | (False, False) => true,
            (Not(a), Not(b)) => self.eq(a, b),
            (And(a), And(b)) | (Or(a), Or(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| self.eq(x, y))
            }
            (Exists(s1, v1, b1), Exists(s2, v2, b2)) | (Forall(s1, v1, b1), Forall(s2, v2, b2)) => {
                if s1 != s2 || v1.len() != v2.len() {
                    return false;
                }
                let depth = self.binders.len();
                for (l, r) in v1.iter().zip(v2) {
                    self.binders.push((*s1, l.clone(), r.clone()));
                }
                let out = self.eq(b1, b2);
                self.binders.truncate(depth);
                out
            }
            _ => false,
        }
    }
}

/// Renames free variables; bound occurrences are untouched.
pub fn rename_free(f: &Formula, points: &BTreeMap<String, String>, states: &BTreeMap<String, String>) -> Formula {
    use Formula::*;
    let p = |v: &String| points.get(v).cloned().unwrap_or_else(|| v.clone());
    let s = |v: &String| states.get(v).cloned().unwrap_or_else(|| v.clone());
    match f {
        Rel(a, b) => Rel(p(a), s(b)),
        PointEq(a, b) => PointEq(p(a), p(b)),
        StateEq(a, b) => StateEq(s(a), s(b)),
        Incon(a) => Incon(s(a)),
        True => True,
        False => False,
        Not(g) => Not(Box::new(rename_free(g, points, states))),
        And(gs) => And(gs.iter().map(|g| rename_free(g, points, states)).collect()),
        Or(gs) => Or(gs.iter().map(|g| rename_free(g, points, states)).collect()),
        Exists(sort, vars, body) | Forall(sort, vars, body) => {
            let (mut pm, mut sm) = (points.clone(), states.clone());
            for v in vars {
                match sort {
                    Sort::Point => pm.remove(v),
                    Sort::State => sm.remove(v),
                };
            }
            let body = Box::new(rename_free(body, &pm, &sm));
            match f {
                Exists(..) => Exists(*sort, vars.clone(), body),
                _ => Forall(*sort, vars.clone(), body),
            }
        }
    }
}

// Printing. Binding strength: quantifiers extend to the end of their group, so
// a quantifier that is not in tail position gets parenthesised.

const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_UNARY: u8 = 3;

fn write_var(out: &mut fmt::Formatter<'_>, sort: Sort, name: &str) -> fmt::Result {
    if Sort::infer(name) == Some(sort) && is_plain_ident(name) {
        write!(out, "{name}")
    } else {
        let prefix = match sort {
            Sort::Point => "p:",
            Sort::State => "s:",
        };
        write!(out, "{prefix}{name}")
    }
}

fn is_plain_ident(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '#' || c == '\'')
        && !matches!(name, "E" | "A" | "R" | "Con" | "true" | "false")
}

fn write_formula(out: &mut fmt::Formatter<'_>, f: &Formula, prec: u8) -> fmt::Result {
    use Formula::*;
    match f {
        Rel(p, s) => {
            write!(out, "R(")?;
            write_var(out, Sort::Point, p)?;
            write!(out, ", ")?;
            write_var(out, Sort::State, s)?;
            write!(out, ")")
        }
        PointEq(a, b) | StateEq(a, b) => {
            let sort = if matches!(f, PointEq(..)) { Sort::Point } else { Sort::State };
            if prec > PREC_AND {
                // `=` binds tighter than `&` but `!x = y` would read as `(!x) = y`
                write!(out, "(")?;
            }
            write_var(out, sort, a)?;
            write!(out, " = ")?;
            write_var(out, sort, b)?;
            if prec > PREC_AND {
                write!(out, ")")?;
            }
            Ok(())
        }
        Incon(s) => {
            write!(out, "!Con(")?;
            write_var(out, Sort::State, s)?;
            write!(out, ")")
        }
        True => write!(out, "true"),
        And(gs) if gs.is_empty() => write!(out, "true"),
        False => write!(out, "false"),
        Or(gs) if gs.is_empty() => write!(out, "false"),
        Not(g) => {
            write!(out, "!")?;
            write_formula(out, g, PREC_UNARY)
        }
        And(gs) | Or(gs) => {
            let (own, sep) = if matches!(f, And(_)) {
                (PREC_AND, " & ")
            } else {
                (PREC_OR, " | ")
            };
            let wrap = prec >= own;
            if wrap || gs.len() == 1 {
                write!(out, "(")?;
            }
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    write!(out, "{sep}")?;
                }
                // children of the same connective are parenthesised to keep nesting
                write_formula(out, g, own)?;
            }
            if wrap || gs.len() == 1 {
                write!(out, ")")?;
            }
            Ok(())
        }
        Exists(sort, vars, body) | Forall(sort, vars, body) => {
            let wrap = prec > 0;
            if wrap {
                write!(out, "(")?;
            }
            write!(out, "{}", if matches!(f, Exists(..)) { "E" } else { "A" })?;
            for v in vars {
                write!(out, " ")?;
                write_var(out, *sort, v)?;
            }
            write!(out, " . ")?;
            write_formula(out, body, 0)?;
            if wrap {
                write!(out, ")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0)
    }
}

/// Renders a formula in the concrete syntax accepted by [`parse_formula`](super::parse_formula).
pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}
