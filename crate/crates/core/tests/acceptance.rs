//! Acceptance criteria, one PASS/FAIL line each.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use chuflow::formula::{
    build_absolute_closure_sentence, build_compactness_sentence, not_separated_sentence, parse_formula,
    random_formula, Compiled, FormulaClass, Tuples,
};
use chuflow::graph::{
    all_graphs, all_orthosets, graph_to_chu, graph_transform_equiv, is_adjoint_pair, is_irredundant,
    margolis_rhodes_sweep, orthoset_to_chu, strictly_continuous,
};
use chuflow::order::{
    all_posets, all_ultrafilters, poset_to_chu, rk_reductions, schmidt_conditions, transform_from_rk,
    ultrafilter_to_chu,
};
use chuflow::preservation::{
    check_absolute_closure, check_compactness, check_preservation, finite_satisfiability_oracle,
    search_counterexample, search_property_counterexample, Bounds, SearchOptions, SearchReport,
};
use chuflow::space::{admits_complements, admits_intersections, enumerate_spaces, is_extensional, is_separated};
use chuflow::topology::{
    all_topologies, continuity_to_transform, cover_compactness_oracle, dense_union_oracle, is_continuous,
    topology_to_chu, Topology,
};
use chuflow::transform::{
    check_adjoint, enumerate_transforms, enumerate_transforms_with_budget, is_dense, is_surjective_transform,
    ChuTransform, TransformKind,
};
use chuflow::ChuSpace;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type Converse = (&'static str, &'static str, fn(&ChuTransform) -> bool, &'static str);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: chuflow::Error) -> String {
    e.to_string()
}

fn adjoint(src: &ChuSpace, tgt: &ChuSpace, f: &[usize], g: &[usize]) -> bool {
    (0..src.num_points()).all(|x| (0..tgt.num_states()).all(|b| src.related(x, g[b]) == tgt.related(f[x], b)))
}

fn sweep_class(cls: FormulaClass, kind: TransformKind) -> Result<(u64, u64), String> {
    let mut transforms = 0;
    let mut assignments = 0;
    for seed in 0..1000u64 {
        let f = random_formula(cls, 3, seed);
        match search_counterexample(&f, &SearchOptions::new(kind, 2, 2)).map_err(err)? {
            SearchReport::Preserved(c) => {
                transforms += c.transforms;
                assignments += c.assignments;
            }
            SearchReport::Violated(v) => {
                return Err(format!("seed {seed}: `{f}` violated at x={:?} b={:?}", v.x, v.b));
            }
        }
    }
    Ok((transforms, assignments))
}

fn flow_preservation() -> Outcome {
    let start = Instant::now();
    let (t, a) = sweep_class(FormulaClass::Flow, TransformKind::Any)?;
    let took = start.elapsed();
    ensure(took <= Duration::from_secs(60), || format!("took {took:.1?}"))?;
    Ok(format!("1000 formulas, {t} transform checks, {a} assignments, 0 violations in {took:.1?}"))
}

fn kind_preservation() -> Outcome {
    let mut parts = Vec::new();
    for (cls, kind) in [
        (FormulaClass::UniversalFlow, TransformKind::Surjective),
        (FormulaClass::RegressiveFlow, TransformKind::Restriction),
        (FormulaClass::InconsistencyFlow, TransformKind::Dense),
    ] {
        let (t, _) = sweep_class(cls, kind)?;
        parts.push(format!("{cls}/{kind}: {t}"));
    }
    Ok(format!("0 violations ({})", parts.join(", ")))
}

fn converse_witnesses() -> Outcome {
    let cases: [Converse; 3] = [
        ("!(x = y)", "GENERAL", |_| true, "any"),
        ("A x . R(x, a)", "UNIVERSAL_FLOW", |t| !is_surjective_transform(t), "non-surjective"),
        ("!Con(a)", "INCONSISTENCY_FLOW", |t| !is_dense(t), "non-dense"),
    ];
    let mut parts = Vec::new();
    for (text, cls, want, what) in cases {
        let start = Instant::now();
        let f = parse_formula(text).map_err(err)?;
        let report = search_counterexample(&f, &SearchOptions::new(TransformKind::Any, 2, 2)).map_err(err)?;
        let took = start.elapsed();
        let v = report.violation().ok_or_else(|| format!("`{text}` not violated"))?;
        ensure(report.recheck(&f).map_err(err)?, || format!("`{text}` witness does not recheck"))?;
        ensure(want(&v.transform), || format!("`{text}` witness is not {what}"))?;
        ensure(took <= Duration::from_secs(10), || format!("`{text}` took {took:.1?}"))?;
        let classes = chuflow::formula::classify(&f).map_err(err)?;
        ensure(classes.iter().any(|c| c.name() == cls), || format!("`{text}` is not {cls}"))?;
        if cls == "GENERAL" {
            ensure(!classes.contains(&FormulaClass::Flow), || format!("`{text}` is flow"))?;
        }
        parts.push(format!("`{text}` by {what} in {took:.0?}"));
    }
    Ok(parts.join("; "))
}

fn compactness_corollaries() -> Outcome {
    let bounds = Bounds::new(3, 3);
    let mut pairs = 0;
    for (k, l) in [(1, 1), (2, 2), (2, 3)] {
        let r = search_property_counterexample(|s| check_compactness(s, k, l).unwrap(), TransformKind::Surjective, bounds, 0)
            .map_err(err)?;
        ensure(r.counterexample.is_none(), || format!("surjective transform breaks compactness({k},{l})"))?;
        pairs += r.pairs_examined;
        let r = search_property_counterexample(|s| check_absolute_closure(s, k, l).unwrap(), TransformKind::Dense, bounds, 0)
            .map_err(err)?;
        ensure(r.counterexample.is_none(), || format!("dense transform breaks closure({k},{l})"))?;
        pairs += r.pairs_examined;
    }
    let r = search_property_counterexample(|s| check_compactness(s, 2, 3).unwrap(), TransformKind::Dense, bounds, 0)
        .map_err(err)?;
    let t = r.counterexample.ok_or("no dense transform breaks compactness(2,3)")?;
    ensure(is_dense(&t), || "witness is not dense".into())?;
    ensure(
        check_compactness(t.source(), 2, 3).unwrap() && !check_compactness(t.target(), 2, 3).unwrap(),
        || "witness does not break compactness".into(),
    )?;
    let sentence = Compiled::new(&build_compactness_sentence(2, 3).map_err(err)?);
    ensure(
        sentence.eval(t.source(), &[], &[]) && !sentence.eval(t.target(), &[], &[]),
        || "witness disagrees with the sentence".into(),
    )?;
    Ok(format!(
        "{pairs} space pairs, 0 violations; dense witness {}x{} -> {}x{}",
        t.source().num_points(),
        t.source().num_states(),
        t.target().num_points(),
        t.target().num_states()
    ))
}

fn kl_pairs(max: usize) -> Vec<(usize, usize)> {
    (1..=max).flat_map(|l| (1..=l).map(move |k| (k, l))).collect()
}

fn bridge() -> Outcome {
    let mut checked = 0;
    let mut premises = 0;
    for s in enumerate_spaces(2, 3).map_err(err)? {
        for (k, l) in kl_pairs(3) {
            let compact = check_compactness(&s, k, l).unwrap();
            let closed = check_absolute_closure(&s, k, l).unwrap();
            ensure(!compact || closed, || format!("compact but not closed at ({k},{l}): {s:?}"))?;
            if closed && admits_complements(&s) && admits_intersections(&s, k) {
                premises += 1;
                ensure(compact, || format!("closed, complemented, intersections, not compact at ({k},{l}): {s:?}"))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} (space, k, l) cases, {premises} meeting the second premise, 0 violations"))
}

fn oracle_equivalences() -> Outcome {
    let mut sentence_cases = 0;
    for (k, l) in kl_pairs(3) {
        let comp = Compiled::new(&build_compactness_sentence(k, l).map_err(err)?);
        let clos = Compiled::new(&build_absolute_closure_sentence(k, l).map_err(err)?);
        for s in enumerate_spaces(2, 3).map_err(err)? {
            ensure(comp.eval(&s, &[], &[]) == check_compactness(&s, k, l).unwrap(), || {
                format!("compactness sentence ({k},{l}) disagrees on {s:?}")
            })?;
            ensure(clos.eval(&s, &[], &[]) == check_absolute_closure(&s, k, l).unwrap(), || {
                format!("closure sentence ({k},{l}) disagrees on {s:?}")
            })?;
            sentence_cases += 1;
        }
    }
    let mut topo_cases = 0;
    for t in (0..=3).flat_map(all_topologies) {
        let c = topology_to_chu(&t);
        for (k, l) in kl_pairs(3) {
            ensure(cover_compactness_oracle(&t, k, l) == check_compactness(&c, k, l).unwrap(), || {
                format!("cover oracle ({k},{l}) disagrees on {t:?}")
            })?;
            ensure(dense_union_oracle(&t, k, l) == check_absolute_closure(&c, k, l).unwrap(), || {
                format!("dense-union oracle ({k},{l}) disagrees on {t:?}")
            })?;
            topo_cases += 1;
        }
    }
    let mut fs_cases = 0;
    for s in enumerate_spaces(3, 3).map_err(err)?.filter(admits_complements) {
        for (k, l) in kl_pairs(3) {
            ensure(finite_satisfiability_oracle(&s, k, l).unwrap() == check_compactness(&s, k, l).unwrap(), || {
                format!("finite-satisfiability oracle ({k},{l}) disagrees on {s:?}")
            })?;
            fs_cases += 1;
        }
    }
    Ok(format!(
        "0 disagreements: {sentence_cases} sentence cases, {topo_cases} topology cases, {fs_cases} complemented cases"
    ))
}

fn preimage(f: &[usize], set: &BTreeSet<usize>) -> BTreeSet<usize> {
    (0..f.len()).filter(|&x| set.contains(&f[x])).collect()
}

fn vickers_and_schmidt() -> Outcome {
    let tops: Vec<Topology> = (0..=3).flat_map(all_topologies).collect();
    let mut topo_pairs = 0;
    for s in &tops {
        for t in &tops {
            let (cs, ct) = (topology_to_chu(s), topology_to_chu(t));
            let found: BTreeSet<(Vec<usize>, Vec<usize>)> =
                enumerate_transforms_with_budget(&cs, &ct, TransformKind::Any, u128::MAX)
                    .map_err(err)?
                    .into_iter()
                    .map(|tr| (tr.f().to_vec(), tr.g().to_vec()))
                    .collect();
            let mut expected = BTreeSet::new();
            for f in Tuples::new(t.carrier().len(), s.carrier().len()) {
                let cont = is_continuous(s, t, &f);
                ensure(cont == continuity_to_transform(s, t, &f).is_ok(), || format!("{s:?} -> {t:?} via {f:?}"))?;
                if cont {
                    let g: Vec<usize> = t.opens().iter().map(|b| s.open_index(&preimage(&f, b)).unwrap()).collect();
                    expected.insert((f, g));
                }
            }
            ensure(found == expected, || format!("transforms differ from continuous maps: {s:?} -> {t:?}"))?;
            topo_pairs += 1;
        }
    }
    let posets: Vec<_> = (0..=3).flat_map(all_posets).collect();
    let mut adjoint_pairs = 0;
    for p in &posets {
        for q in &posets {
            let (cp, cq) = (poset_to_chu(p), poset_to_chu(q));
            for f in Tuples::new(q.len(), p.len()) {
                for g in Tuples::new(p.len(), q.len()) {
                    let chu = adjoint(&cp, &cq, &f, &g);
                    ensure(schmidt_conditions(p, q, &f, &g).all() == chu, || format!("{p:?} {q:?} {f:?} {g:?}"))?;
                    if chu {
                        adjoint_pairs += 1;
                        let t = check_adjoint(cp.clone(), cq.clone(), f.clone(), g.clone()).map_err(err)?;
                        ensure(is_dense(&t), || format!("adjoint pair not dense: {f:?} {g:?}"))?;
                    }
                }
            }
        }
    }
    Ok(format!(
        "{topo_pairs} topology pairs, {} poset pairs, {adjoint_pairs} adjoint pairs all dense, 0 disagreements",
        posets.len() * posets.len()
    ))
}

fn rudin_keisler() -> Outcome {
    let ufs: Vec<_> = (1..=3).flat_map(all_ultrafilters).collect();
    let mut built = 0;
    for u in &ufs {
        for v in &ufs {
            let reductions = rk_reductions(u, v);
            let transforms =
                enumerate_transforms(&ultrafilter_to_chu(u), &ultrafilter_to_chu(v), TransformKind::Any).map_err(err)?;
            ensure(reductions.is_empty() == transforms.is_empty(), || format!("{u:?} vs {v:?}"))?;
            for h in &reductions {
                let t = transform_from_rk(u, v, h).map_err(err)?;
                check_adjoint(t.source().clone(), t.target().clone(), t.f().to_vec(), t.g().to_vec()).map_err(err)?;
                built += 1;
            }
        }
    }
    Ok(format!("{} ultrafilter pairs agree, {built} transforms from reductions all adjoint", ufs.len() * ufs.len()))
}

fn graphs_and_orthosets() -> Outcome {
    let graphs: Vec<_> = (0..=3).flat_map(all_graphs).collect();
    let mut maps = 0;
    for g in &graphs {
        for g2 in &graphs {
            let (a, b) = (graph_to_chu(g), graph_to_chu(g2));
            for f in Tuples::new(g2.num_vertices(), g.num_vertices()) {
                let fm: BTreeMap<usize, usize> = f.iter().copied().enumerate().collect();
                let mut found = None;
                for gm in Tuples::new(a.num_states(), b.num_states()) {
                    if adjoint(&a, &b, &f, &gm) {
                        ensure(found.is_none(), || "two state maps for one point map".into())?;
                        found = Some(gm);
                    }
                }
                let expected = strictly_continuous(g, g2, &fm).then(|| {
                    g2.edges()
                        .iter()
                        .map(|&(u, v)| BTreeSet::from([u, v]))
                        .chain([BTreeSet::new()])
                        .map(|e| preimage(&f, &e))
                        .collect::<Vec<_>>()
                });
                let got = found.as_ref().map(|gm| {
                    gm.iter()
                        .map(|&s| (0..a.num_points()).filter(|&x| a.related(x, s)).collect::<BTreeSet<_>>())
                        .collect::<Vec<_>>()
                });
                ensure(got == expected, || format!("{g:?} -> {g2:?} via {f:?}"))?;
                let t = graph_transform_equiv(g, g2, &f);
                ensure(t.as_ref().map(|t| t.g().to_vec()) == found, || format!("equiv {f:?}"))?;
                if let Some(t) = t {
                    let hit = g2.edges().iter().all(|&(u, v)| f.contains(&u) || f.contains(&v));
                    ensure(is_dense(&t) == hit, || format!("density remark fails for {f:?}"))?;
                }
                maps += 1;
            }
        }
    }
    let sweep = margolis_rhodes_sweep(5);
    ensure(sweep.refuted.is_empty(), || format!("lemma refuted: {:?}", sweep.refuted[0]))?;

    let orthosets: Vec<_> = (1..=4).flat_map(all_orthosets).collect();
    let mut pairs = 0;
    for o in &orthosets {
        let c = orthoset_to_chu(o);
        ensure(is_irredundant(o) == is_separated(&c) && is_separated(&c) == is_extensional(&c), || {
            format!("irredundance disagrees on {o:?}")
        })?;
        for o2 in &orthosets {
            let c2 = orthoset_to_chu(o2);
            for f in Tuples::new(o2.len(), o.len()) {
                for g in Tuples::new(o.len(), o2.len()) {
                    let fwd = is_adjoint_pair(o, o2, &f, &g);
                    ensure(fwd == adjoint(&c, &c2, &f, &g), || format!("orthoset adjoint vs Chu: {f:?} {g:?}"))?;
                    ensure(fwd == adjoint(&c2, &c, &g, &f), || format!("orthoset symmetry: {f:?} {g:?}"))?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!(
        "{maps} graph maps; lemma: {} connected graphs, {} maps, {} confirmed, 0 refuted; {pairs} orthoset map pairs",
        sweep.graphs, sweep.maps, sweep.confirmed
    ))
}

fn gemignani() -> Outcome {
    let f = not_separated_sentence();
    let r = search_counterexample(&f, &SearchOptions::new(TransformKind::Restriction, 2, 2)).map_err(err)?;
    ensure(r.is_preserved(), || "a restriction breaks the sentence".into())?;
    let spaces: Vec<ChuSpace> = enumerate_spaces(2, 2).map_err(err)?.collect();
    let mut bijective = 0;
    for s in &spaces {
        for t in spaces.iter().filter(|t| t.num_points() == s.num_points()) {
            for tr in enumerate_transforms(s, t, TransformKind::Any).map_err(err)? {
                let image: BTreeSet<usize> = tr.f().iter().copied().collect();
                if image.len() == s.num_points() {
                    ensure(check_preservation(&f, &tr).map_err(err)?.is_preserved(), || format!("{tr:?}"))?;
                    bijective += 1;
                }
            }
        }
    }
    let point = Topology::on_indices(1, vec![BTreeSet::new(), BTreeSet::from([0])]).map_err(err)?;
    let tr = continuity_to_transform(&Topology::indiscrete(2), &point, &[0, 0]).map_err(err)?;
    ensure(is_surjective_transform(&tr), || "collapse map is not surjective".into())?;
    let report = check_preservation(&f, &tr).map_err(err)?;
    ensure(!report.is_preserved(), || "indiscrete -> point preserves the sentence".into())?;
    Ok(format!("restrictions preserve, {bijective} bijective transforms preserve, indiscrete{{0,1}} -> point violates"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("flow preservation", flow_preservation),
        ("kind-specific preservation", kind_preservation),
        ("converse witnesses", converse_witnesses),
        ("compactness corollaries", compactness_corollaries),
        ("compactness/closure bridge", bridge),
        ("oracle equivalences", oracle_equivalences),
        ("continuity and adjoint-pair equivalences", vickers_and_schmidt),
        ("Rudin-Keisler", rudin_keisler),
        ("graphs and orthosets", graphs_and_orthosets),
        ("not-separated refutation", gemignani),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} [{took:.1?}]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{took:.1?}]: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
