use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ast::{free_variables, Formula, Sort};
use crate::error::{Error, Result};
use crate::space::ChuSpace;

/// Default cap on the number of free-variable tuples tabulated at once.
pub const DEFAULT_ARITY_BUDGET: u128 = 1_000_000;

/// Values for free variables, given as labels of a particular space.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    #[serde(default)]
    pub points: BTreeMap<String, String>,
    #[serde(default)]
    pub states: BTreeMap<String, String>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn point(mut self, var: impl Into<String>, label: impl Into<String>) -> Self {
        self.points.insert(var.into(), label.into());
        self
    }

    pub fn state(mut self, var: impl Into<String>, label: impl Into<String>) -> Self {
        self.states.insert(var.into(), label.into());
        self
    }
}

#[derive(Clone, Debug)]
enum Node {
    Rel(usize, usize),
    PointEq(usize, usize),
    StateEq(usize, usize),
    Incon(usize),
    Const(bool),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Quant {
        exists: bool,
        sort: Sort,
        slots: Vec<usize>,
        body: Box<Node>,
    },
}

/// A formula with variables resolved to slots. Free variables come first,
/// each sort in name order.
#[derive(Clone, Debug)]
pub struct Compiled {
    root: Node,
    point_vars: Vec<String>,
    state_vars: Vec<String>,
    point_slots: usize,
    state_slots: usize,
}

struct Scope {
    points: Vec<(String, usize)>,
    states: Vec<(String, usize)>,
    next_point: usize,
    next_state: usize,
}

impl Scope {
    fn lookup(&self, sort: Sort, name: &str) -> usize {
        let stack = match sort {
            Sort::Point => &self.points,
            Sort::State => &self.states,
        };
        stack
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, slot)| *slot)
            .expect("free variables are pre-bound")
    }

    fn compile(&mut self, f: &Formula) -> Node {
        use Formula::*;
        match f {
            Rel(p, s) => Node::Rel(self.lookup(Sort::Point, p), self.lookup(Sort::State, s)),
            PointEq(p, q) => Node::PointEq(self.lookup(Sort::Point, p), self.lookup(Sort::Point, q)),
            StateEq(a, b) => Node::StateEq(self.lookup(Sort::State, a), self.lookup(Sort::State, b)),
            Incon(s) => Node::Incon(self.lookup(Sort::State, s)),
            True => Node::Const(true),
            False => Node::Const(false),
            Not(g) => Node::Not(Box::new(self.compile(g))),
            And(gs) => Node::And(gs.iter().map(|g| self.compile(g)).collect()),
            Or(gs) => Node::Or(gs.iter().map(|g| self.compile(g)).collect()),
            Exists(sort, vars, body) | Forall(sort, vars, body) => {
                let depth = match sort {
                    Sort::Point => self.points.len(),
                    Sort::State => self.states.len(),
                };
                let mut slots = Vec::with_capacity(vars.len());
                for v in vars {
                    let slot = match sort {
                        Sort::Point => {
                            self.next_point += 1;
                            self.points.push((v.clone(), self.next_point - 1));
                            self.next_point - 1
                        }
                        Sort::State => {
                            self.next_state += 1;
                            self.states.push((v.clone(), self.next_state - 1));
                            self.next_state - 1
                        }
                    };
                    slots.push(slot);
                }
                let body = Box::new(self.compile(body));
                match sort {
                    Sort::Point => self.points.truncate(depth),
                    Sort::State => self.states.truncate(depth),
                }
                Node::Quant {
                    exists: matches!(f, Exists(..)),
                    sort: *sort,
                    slots,
                    body,
                }
            }
        }
    }
}

struct Env<'a> {
    space: &'a ChuSpace,
    points: Vec<usize>,
    states: Vec<usize>,
}

impl Env<'_> {
    fn eval(&mut self, node: &Node) -> bool {
        match node {
            Node::Rel(p, s) => self.space.related(self.points[*p], self.states[*s]),
            Node::PointEq(p, q) => self.points[*p] == self.points[*q],
            Node::StateEq(a, b) => self.states[*a] == self.states[*b],
            Node::Incon(s) => !self.space.is_consistent(self.states[*s]),
            Node::Const(b) => *b,
            Node::Not(g) => !self.eval(g),
            Node::And(gs) => gs.iter().all(|g| self.eval(g)),
            Node::Or(gs) => gs.iter().any(|g| self.eval(g)),
            Node::Quant {
                exists,
                sort,
                slots,
                body,
            } => {
                let domain = match sort {
                    Sort::Point => self.space.num_points(),
                    Sort::State => self.space.num_states(),
                };
                self.quantify(*exists, *sort, slots, 0, domain, body)
            }
        }
    }

    fn quantify(&mut self, exists: bool, sort: Sort, slots: &[usize], i: usize, domain: usize, body: &Node) -> bool {
        if i == slots.len() {
            return self.eval(body);
        }
        for v in 0..domain {
            match sort {
                Sort::Point => self.points[slots[i]] = v,
                Sort::State => self.states[slots[i]] = v,
            }
            if self.quantify(exists, sort, slots, i + 1, domain, body) == exists {
                return exists;
            }
        }
        !exists
    }
}

impl Compiled {
    pub fn new(f: &Formula) -> Compiled {
        let free = free_variables(f);
        let point_vars: Vec<String> = free.points.into_iter().collect();
        let state_vars: Vec<String> = free.states.into_iter().collect();
        let mut scope = Scope {
            points: point_vars.iter().cloned().zip(0..).collect(),
            states: state_vars.iter().cloned().zip(0..).collect(),
            next_point: point_vars.len(),
            next_state: state_vars.len(),
        };
        let root = scope.compile(f);
        Compiled {
            root,
            point_slots: scope.next_point,
            state_slots: scope.next_state,
            point_vars,
            state_vars,
        }
    }

    /// Free point variables in slot order.
    pub fn point_vars(&self) -> &[String] {
        &self.point_vars
    }

    pub fn state_vars(&self) -> &[String] {
        &self.state_vars
    }

    /// Evaluates with free variables given as indices, in slot order.
    pub fn eval(&self, space: &ChuSpace, points: &[usize], states: &[usize]) -> bool {
        debug_assert_eq!(points.len(), self.point_vars.len());
        debug_assert_eq!(states.len(), self.state_vars.len());
        let mut env = Env {
            space,
            points: vec![0; self.point_slots],
            states: vec![0; self.state_slots],
        };
        env.points[..points.len()].copy_from_slice(points);
        env.states[..states.len()].copy_from_slice(states);
        env.eval(&self.root)
    }

    /// Truth values for every tuple of free variables.
    pub fn truth_table(&self, space: &ChuSpace, budget: u128) -> Result<TruthTable> {
        let (np, ns) = (space.num_points(), space.num_states());
        let requested = tuple_count(np, self.point_vars.len())
            .saturating_mul(tuple_count(ns, self.state_vars.len()));
        if requested > budget {
            return Err(Error::ArityBudgetExceeded { requested, budget });
        }
        let mut env = Env {
            space,
            points: vec![0; self.point_slots],
            states: vec![0; self.state_slots],
        };
        let (kp, ks) = (self.point_vars.len(), self.state_vars.len());
        let mut bits = Vec::with_capacity(requested as usize);
        for pt in Tuples::new(np, kp) {
            env.points[..kp].copy_from_slice(&pt);
            for st in Tuples::new(ns, ks) {
                env.states[..ks].copy_from_slice(&st);
                bits.push(env.eval(&self.root));
            }
        }
        Ok(TruthTable {
            num_points: np,
            num_states: ns,
            point_arity: kp,
            state_arity: ks,
            bits,
        })
    }
}

pub(crate) fn tuple_count(domain: usize, arity: usize) -> u128 {
    (domain as u128).saturating_pow(arity as u32)
}

/// Satisfaction for all free-variable tuples of one formula on one space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTable {
    num_points: usize,
    num_states: usize,
    point_arity: usize,
    state_arity: usize,
    bits: Vec<bool>,
}

impl TruthTable {
    pub fn get(&self, points: &[usize], states: &[usize]) -> bool {
        let mut i = 0;
        for &p in points {
            i = i * self.num_points + p;
        }
        for &s in states {
            i = i * self.num_states + s;
        }
        self.bits[i]
    }

    pub fn point_arity(&self) -> usize {
        self.point_arity
    }

    pub fn state_arity(&self) -> usize {
        self.state_arity
    }

    /// Truth value of a sentence.
    pub fn value(&self) -> Option<bool> {
        (self.point_arity == 0 && self.state_arity == 0).then(|| self.bits[0])
    }
}

/// All tuples of the given arity over `0..domain`, in lexicographic order.
#[derive(Clone, Debug)]
pub struct Tuples {
    domain: usize,
    current: Option<Vec<usize>>,
}

impl Tuples {
    pub fn new(domain: usize, arity: usize) -> Tuples {
        let current = (arity == 0 || domain > 0).then(|| vec![0; arity]);
        Tuples { domain, current }
    }
}

impl Iterator for Tuples {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().unwrap();
        let mut i = cur.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < self.domain {
                break;
            }
            cur[i] = 0;
        }
        Some(out)
    }
}

/// Tarskian satisfaction of `f` in `space` under `asg`.
pub fn evaluate(space: &ChuSpace, f: &Formula, asg: &Assignment) -> Result<bool> {
    for (sort, map, find) in [
        ("point", &asg.points, &(|l: &str| space.point_index(l)) as &dyn Fn(&str) -> Option<usize>),
        ("state", &asg.states, &|l: &str| space.state_index(l)),
    ] {
        for label in map.values() {
            if find(label).is_none() {
                return Err(Error::UnknownLabel {
                    sort,
                    label: label.clone(),
                });
            }
        }
    }
    let compiled = Compiled::new(f);
    let resolve = |sort: &'static str, vars: &[String], map: &BTreeMap<String, String>, find: &dyn Fn(&str) -> Option<usize>| {
        vars.iter()
            .map(|v| {
                map.get(v)
                    .and_then(|l| find(l))
                    .ok_or_else(|| Error::UnboundVariable { sort, name: v.clone() })
            })
            .collect::<Result<Vec<usize>>>()
    };
    let points = resolve("point", compiled.point_vars(), &asg.points, &|l| space.point_index(l))?;
    let states = resolve("state", compiled.state_vars(), &asg.states, &|l| space.state_index(l))?;
    Ok(compiled.eval(space, &points, &states))
}
