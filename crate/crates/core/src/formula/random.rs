use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ast::{Formula, Sort};
use super::classify::FormulaClass;
use super::normal::normalize;

const POINT_VARS: [&str; 2] = ["x", "y"];
const STATE_VARS: [&str; 2] = ["a", "b"];

#[derive(Clone, Copy)]
enum Lit {
    Rel,
    NotRel,
    PointEq,
    NotPointEq,
    StateEq,
    NotStateEq,
    Incon,
}

#[derive(Clone, Copy)]
enum Quant {
    ExistsPoint,
    ForallPoint,
    ForallState,
}

fn literals(cls: FormulaClass) -> &'static [Lit] {
    use Lit::*;
    match cls {
        FormulaClass::Flow | FormulaClass::UniversalFlow => &[PointEq, NotStateEq, Rel, NotRel],
        FormulaClass::InconsistencyFlow => &[PointEq, NotStateEq, Rel, NotRel, Incon],
        FormulaClass::RegressiveFlow | FormulaClass::General => {
            &[PointEq, NotPointEq, StateEq, NotStateEq, Rel, NotRel]
        }
    }
}

fn quantifiers(cls: FormulaClass) -> &'static [Quant] {
    use Quant::*;
    match cls {
        FormulaClass::Flow | FormulaClass::InconsistencyFlow => &[ExistsPoint, ForallState],
        _ => &[ExistsPoint, ForallPoint, ForallState],
    }
}

struct Gen {
    rng: ChaCha8Rng,
    cls: FormulaClass,
}

impl Gen {
    fn var(&mut self, sort: Sort) -> String {
        let pool = match sort {
            Sort::Point => &POINT_VARS,
            Sort::State => &STATE_VARS,
        };
        pool.choose(&mut self.rng).unwrap().to_string()
    }

    fn literal(&mut self) -> Formula {
        let lit = *literals(self.cls).choose(&mut self.rng).unwrap();
        let (p, q) = (self.var(Sort::Point), self.var(Sort::Point));
        let (a, b) = (self.var(Sort::State), self.var(Sort::State));
        match lit {
            Lit::Rel => Formula::rel(p, a),
            Lit::NotRel => Formula::not(Formula::rel(p, a)),
            Lit::PointEq => Formula::point_eq(p, q),
            Lit::NotPointEq => Formula::not(Formula::point_eq(p, q)),
            Lit::StateEq => Formula::state_eq(a, b),
            Lit::NotStateEq => Formula::not(Formula::state_eq(a, b)),
            Lit::Incon => Formula::incon(a),
        }
    }

    fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 {
            return self.literal();
        }
        let sub = |g: &mut Gen| {
            let d = g.rng.gen_range(0..depth);
            g.formula(d)
        };
        match self.rng.gen_range(0..8) {
            0 => self.literal(),
            1 => {
                if self.rng.gen_bool(0.5) {
                    Formula::True
                } else {
                    Formula::False
                }
            }
            2 | 3 => {
                let n = self.rng.gen_range(2..=3);
                Formula::And((0..n).map(|_| sub(self)).collect())
            }
            4 | 5 => {
                let n = self.rng.gen_range(2..=3);
                Formula::Or((0..n).map(|_| sub(self)).collect())
            }
            _ => {
                let q = *quantifiers(self.cls).choose(&mut self.rng).unwrap();
                let sort = match q {
                    Quant::ExistsPoint | Quant::ForallPoint => Sort::Point,
                    Quant::ForallState => Sort::State,
                };
                let pool: &[&str] = match sort {
                    Sort::Point => &POINT_VARS,
                    Sort::State => &STATE_VARS,
                };
                let vars = if self.rng.gen_bool(0.25) {
                    pool.iter().map(|v| v.to_string()).collect()
                } else {
                    vec![self.var(sort)]
                };
                let body = Box::new(self.formula(depth - 1));
                match q {
                    Quant::ExistsPoint => Formula::Exists(sort, vars, body),
                    _ => Formula::Forall(sort, vars, body),
                }
            }
        }
    }
}

/// A seeded random normalized formula of nesting depth at most `depth`
/// that belongs to `cls`. Variables come from `{x, y}` and `{a, b}`.
pub fn random_formula(cls: FormulaClass, depth: usize, seed: u64) -> Formula {
    let mut gen = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        cls,
    };
    normalize(&gen.formula(depth))
}
