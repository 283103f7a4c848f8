//! Independent reimplementations checked against the library.

use std::collections::HashMap;

use chuflow::formula::{evaluate, free_variables, random_formula, Assignment, Formula, FormulaClass, Sort, Tuples};
use chuflow::space::enumerate_spaces;
use chuflow::transform::{enumerate_transforms, TransformKind};
use chuflow::ChuSpace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Env {
    points: HashMap<String, usize>,
    states: HashMap<String, usize>,
}

fn naive_eval(s: &ChuSpace, f: &Formula, env: &mut Env) -> bool {
    match f {
        Formula::Rel(p, a) => s.related(env.points[p], env.states[a]),
        Formula::PointEq(p, q) => env.points[p] == env.points[q],
        Formula::StateEq(a, b) => env.states[a] == env.states[b],
        Formula::Incon(a) => (0..s.num_points()).all(|x| !s.related(x, env.states[a])),
        Formula::True => true,
        Formula::False => false,
        Formula::Not(g) => !naive_eval(s, g, env),
        Formula::And(gs) => gs.iter().all(|g| naive_eval(s, g, env)),
        Formula::Or(gs) => gs.iter().any(|g| naive_eval(s, g, env)),
        Formula::Exists(sort, vars, body) => quantify(s, *sort, vars, body, env, true),
        Formula::Forall(sort, vars, body) => quantify(s, *sort, vars, body, env, false),
    }
}

fn slot(env: &mut Env, sort: Sort) -> &mut HashMap<String, usize> {
    match sort {
        Sort::Point => &mut env.points,
        Sort::State => &mut env.states,
    }
}

fn quantify(s: &ChuSpace, sort: Sort, vars: &[String], body: &Formula, env: &mut Env, exists: bool) -> bool {
    let Some((v, rest)) = vars.split_first() else {
        return naive_eval(s, body, env);
    };
    let n = match sort {
        Sort::Point => s.num_points(),
        Sort::State => s.num_states(),
    };
    let saved = slot(env, sort).get(v).copied();
    let mut result = !exists;
    for i in 0..n {
        slot(env, sort).insert(v.clone(), i);
        if quantify(s, sort, rest, body, env, exists) == exists {
            result = exists;
            break;
        }
    }
    match saved {
        Some(old) => slot(env, sort).insert(v.clone(), old),
        None => slot(env, sort).remove(v),
    };
    result
}

fn random_space(rng: &mut ChaCha8Rng) -> ChuSpace {
    let (p, s) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
    let bits: Vec<bool> = (0..p * s).map(|_| rng.gen_bool(0.5)).collect();
    ChuSpace::canonical(p, s, |i, j| bits[i * s + j])
}

#[test]
fn evaluator_matches_naive_semantics() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let classes = FormulaClass::ALL;
    let mut checked = 0;
    for seed in 0..500u64 {
        let f = random_formula(classes[seed as usize % classes.len()], 3, seed);
        let space = random_space(&mut rng);
        let fv = free_variables(&f);
        let pv: Vec<&String> = fv.points.iter().collect();
        let sv: Vec<&String> = fv.states.iter().collect();
        for pt in Tuples::new(space.num_points(), pv.len()) {
            for st in Tuples::new(space.num_states(), sv.len()) {
                let mut asg = Assignment::new();
                let mut env = Env {
                    points: HashMap::new(),
                    states: HashMap::new(),
                };
                for (v, &i) in pv.iter().zip(&pt) {
                    asg = asg.point(v.as_str(), space.points()[i].as_str());
                    env.points.insert(v.to_string(), i);
                }
                for (v, &j) in sv.iter().zip(&st) {
                    asg = asg.state(v.as_str(), space.states()[j].as_str());
                    env.states.insert(v.to_string(), j);
                }
                assert_eq!(evaluate(&space, &f, &asg).unwrap(), naive_eval(&space, &f, &mut env), "{f}");
                checked += 1;
            }
        }
    }
    assert!(checked > 500);
}

fn naive_kind(src: &ChuSpace, tgt: &ChuSpace, f: &[usize], g: &[usize], kind: TransformKind) -> bool {
    let image_meets = |b: usize| (0..src.num_points()).any(|x| tgt.related(f[x], b));
    match kind {
        TransformKind::Any => true,
        TransformKind::Dense => (0..tgt.num_states()).all(|b| (0..tgt.num_points()).all(|y| !tgt.related(y, b)) || image_meets(b)),
        TransformKind::Surjective => (0..tgt.num_points()).all(|y| f.contains(&y)),
        TransformKind::Restriction => {
            src.points() == tgt.points()
                && f.iter().enumerate().all(|(x, &y)| x == y)
                && g.iter().enumerate().all(|(b, &a)| src.states()[a] == tgt.states()[b])
        }
    }
}

fn naive_count(src: &ChuSpace, tgt: &ChuSpace, kind: TransformKind) -> usize {
    let mut count = 0;
    for f in Tuples::new(tgt.num_points(), src.num_points()) {
        for g in Tuples::new(src.num_states(), tgt.num_states()) {
            let adjoint = (0..src.num_points())
                .all(|x| (0..tgt.num_states()).all(|b| src.related(x, g[b]) == tgt.related(f[x], b)));
            if adjoint && naive_kind(src, tgt, &f, &g, kind) {
                count += 1;
            }
        }
    }
    count
}

#[test]
fn transform_counts_match_brute_force() {
    let spaces: Vec<ChuSpace> = enumerate_spaces(2, 2).unwrap().collect();
    assert_eq!(spaces.len(), 31);
    for src in &spaces {
        for tgt in &spaces {
            for kind in TransformKind::ALL {
                let got = enumerate_transforms(src, tgt, kind).unwrap();
                assert_eq!(got.len(), naive_count(src, tgt, kind), "{kind} {src:?} -> {tgt:?}");
            }
        }
    }
}

#[test]
fn restriction_counts_on_own_restrictions() {
    for src in enumerate_spaces(2, 3).unwrap() {
        let n = src.num_states();
        for bits in 0u32..1 << n {
            let keep: Vec<usize> = (0..n).filter(|j| bits >> j & 1 == 1).collect();
            let tgt = src.restrict_states(&keep);
            let got = enumerate_transforms(&src, &tgt, TransformKind::Restriction).unwrap();
            assert_eq!(got.len(), naive_count(&src, &tgt, TransformKind::Restriction));
            assert_eq!(got.len(), 1);
        }
    }
}

#[test]
fn enumeration_is_lexicographic() {
    let src = ChuSpace::canonical(2, 2, |i, j| i == j);
    let tgt = ChuSpace::canonical(2, 2, |i, j| i <= j);
    let ts = enumerate_transforms(&src, &tgt, TransformKind::Any).unwrap();
    let keys: Vec<(Vec<usize>, Vec<usize>)> = ts.iter().map(|t| (t.f().to_vec(), t.g().to_vec())).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}
