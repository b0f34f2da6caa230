//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line.

mod common;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::time::{Duration, Instant};

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use raag::amalgam::extend;
use raag::centralizers::{
    centralizer, check_class_c_axioms, clique_classes, representatives, zo_split, RepresentativeSet,
};
use raag::discrimination::{bp_scan, retract, separate, RetractionIndex};
use raag::graph::ChordalityWitness;
use raag::towers::{check_tree_edges, Tower, TreeVertex};
use raag::words::{self, parse_letters};
use raag::zt_ice::{axiom_check, build_ice};
use raag::{Elem, Error, Graph, Group, Word};

const C1_TIME: Duration = Duration::from_secs(1);
const C2_TIME: Duration = Duration::from_secs(60);
const C2_WORDS_PER_GRAPH: usize = 500;
const C2_MAX_LEN: usize = 8;
const C3_TIME: Duration = Duration::from_secs(10);
const C4_G_LEN: usize = 4;
const C4_H_LEN: usize = 6;
const C4_F1_EXHAUSTIVE_G_LEN: usize = 2;
const C4_F1_RANDOM_G: usize = 40;
const C4_F1_EXHAUSTIVE_H_LEN: usize = 4;
const C4_F1_RANDOM_H: usize = 20_000;
const C5_TIME: Duration = Duration::from_secs(120);
const C5_SAMPLES: usize = 100;
const C5_MAX_LEN: usize = 6;
const C5_BUDGET: i64 = 64;
const C6_PAIRS: usize = 1000;
const C6_SAMPLES: usize = 200;
const C6_M: [i64; 4] = [1, 2, 3, 5];
const C7_BOUND: i64 = 10;
const C8_SAMPLES: usize = 20;
const C8_BUDGET: i64 = 64;
const C9_LENGTH: usize = 4;
const C9_SAMPLES: usize = 500;

fn report(n: u32, failures: &[String], detail: String) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {n}: {status} ({detail})");
    assert!(failures.is_empty(), "criterion {n}: {failures:?}");
}

fn names(g: &Graph, ws: &[Word]) -> BTreeSet<String> {
    ws.iter().map(|w| w.format(g)).collect()
}

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

#[test]
fn criterion_1_paper_examples() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let p4 = Graph::p4();
    let reps = representatives(&p4, 2).unwrap();
    let wk: Vec<String> = reps.w_k.iter().map(|w| w.format(&p4)).collect();
    if wk != ["a", "b", "c", "d", "b c"] {
        fails.push(format!("W_K = {wk:?}"));
    }
    let classes = clique_classes(&p4);
    for (single, pair) in [(&["a"][..], &["a", "b"][..]), (&["d"][..], &["c", "d"][..])] {
        let s = p4.vertex_set(single).unwrap();
        let t = p4.vertex_set(pair).unwrap();
        if !classes.iter().any(|c| c.members.contains(&s) && c.members.contains(&t)) {
            fails.push(format!("st({single:?}) ~ st({pair:?}) not detected"));
        }
    }
    let f1 = Graph::figure1();
    let gens = |s: &str| names(&f1, &centralizer(&f1, &words::word(&f1, s).unwrap()).unwrap().generators(&f1));
    let expected = [
        ("d1 d2", set(&["a", "c1", "c2", "d1", "d2"])),
        ("a d2", set(&["a", "b2", "c1", "c2", "d1", "d2"])),
        ("a c1", set(&["a", "b1", "c1", "d1", "d2"])),
        ("d1 c1", set(&["a", "b1", "c1", "d1", "d2"])),
    ];
    for (w, want) in expected {
        let got = gens(w);
        if got != want {
            fails.push(format!("C({w}) = {got:?}"));
        }
    }
    for (w, want) in [("d1 d2", set(&["a", "c1", "c2"])), ("a d2", set(&["b2", "c1", "c2", "d1"]))] {
        let o: BTreeSet<String> = f1.set_names(&zo_split(&f1, &words::word(&f1, w).unwrap()).unwrap().o).into_iter().collect();
        if o != want {
            fails.push(format!("O({w}) = {o:?}"));
        }
    }
    let t = start.elapsed();
    if t >= C1_TIME {
        fails.push(format!("took {t:?}"));
    }
    report(1, &fails, format!("representatives, stars and six Figure-1 centralisers in {t:?}"));
}

#[test]
fn criterion_2_normal_form_oracle() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let corpus = small_corpus();
    let mut checked = 0;
    for g in &corpus {
        for _ in 0..C2_WORDS_PER_GRAPH {
            let len = rng.gen_range(0..=C2_MAX_LEN);
            let u = random_letters(g, len, &mut rng);
            let n = words::normalize(g, &to_word(&u));
            if !shuffle_class(g, &oracle_reduce(g, &u)).contains(&expand(&n)) {
                fails.push(format!("normalize {} on {:?}", to_word(&u).format(g), g.names()));
            }
            let v = if rng.gen_bool(0.5) {
                random_letters(g, rng.gen_range(0..=C2_MAX_LEN), &mut rng)
            } else {
                let mut v = u.clone();
                let i = rng.gen_range(0..=v.len());
                let x = rng.gen_range(0..g.len());
                v.splice(i..i, [(x, 1), (x, -1)]);
                let classes: Vec<Letters> = shuffle_class(g, &v).into_iter().collect();
                classes[rng.gen_range(0..classes.len())].clone()
            };
            if words::equals(g, &to_word(&u), &to_word(&v)) != oracle_equal(g, &u, &v) {
                fails.push(format!("equals {} vs {}", to_word(&u).format(g), to_word(&v).format(g)));
            }
            checked += 1;
        }
    }
    let t = start.elapsed();
    if t >= C2_TIME {
        fails.push(format!("took {t:?}"));
    }
    report(2, &fails, format!("{} graphs, {checked} words, {} mismatches, {t:?}", corpus.len(), fails.len()));
}

#[test]
fn criterion_3_chordality() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let mut graphs = chordality_corpus();
    let cycle_names = ["a", "b", "c", "d", "e", "f", "g", "h", "i"];
    for k in 3..=9 {
        graphs.push(Graph::cycle(&cycle_names[..k]));
    }
    for g in &graphs {
        let (chordal, witness) = g.is_chordal();
        let brute = brute_force_induced_cycle(g).is_none();
        if chordal != brute {
            fails.push(format!("disagreement on {:?}", g.to_spec()));
        }
        let ok = match &witness {
            ChordalityWitness::Peo(p) => {
                p.iter().copied().collect::<BTreeSet<_>>().len() == g.len() && g.check_peo(p).is_ok()
            }
            ChordalityWitness::Cycle(c) => g.is_induced_cycle(c),
        };
        if !ok {
            fails.push(format!("bad witness on {:?}", g.to_spec()));
        }
    }
    for k in 3..=9 {
        let chordal = Graph::cycle(&cycle_names[..k]).is_chordal().0;
        if chordal != (k == 3) {
            fails.push(format!("C{k} chordal = {chordal}"));
        }
    }
    let t = start.elapsed();
    if t >= C3_TIME {
        fails.push(format!("took {t:?}"));
    }
    report(3, &fails, format!("{} graphs and C3..C9 in {t:?}", graphs.len()));
}

fn distinct(g: &Graph, ws: impl IntoIterator<Item = Letters>) -> Vec<Word> {
    let mut seen = HashSet::new();
    ws.into_iter().map(|l| words::normalize(g, &to_word(&l))).filter(|w| seen.insert(w.clone())).collect()
}

fn centraliser_completeness(g: &Graph, gs: &[Word], hs: &[Word], fails: &mut Vec<String>) -> usize {
    let hl: Vec<Letters> = hs.iter().map(expand).collect();
    let mut commuting = 0;
    for w in gs {
        let c = centralizer(g, w).unwrap();
        let wl = expand(w);
        for gen in c.generators(g) {
            if !oracle_commute(g, &wl, &expand(&gen)) {
                fails.push(format!("generator {} of C({}) does not commute", gen.format(g), w.format(g)));
            }
        }
        for (h, l) in hs.iter().zip(&hl) {
            if oracle_commute(g, &wl, l) {
                commuting += 1;
                if !c.contains(g, h) {
                    fails.push(format!("{} commutes with {} but is missing", h.format(g), w.format(g)));
                }
            }
        }
    }
    commuting
}

fn cyclically_reduced(g: &Graph, ws: Vec<Word>) -> Vec<Word> {
    ws.into_iter().filter(|w| !w.is_identity() && words::is_cyclically_reduced(g, w)).collect()
}

#[test]
fn criterion_4_centraliser_completeness() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let p4 = Graph::p4();
    let gs = cyclically_reduced(&p4, distinct(&p4, all_words(&p4, C4_G_LEN)));
    let hs = distinct(&p4, all_words(&p4, C4_H_LEN));
    let n_p4 = centraliser_completeness(&p4, &gs, &hs, &mut fails);

    let f1 = Graph::figure1();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut g_words = all_words(&f1, C4_F1_EXHAUSTIVE_G_LEN);
    g_words.extend((0..C4_F1_RANDOM_G).map(|_| {
        let len = rng.gen_range(C4_F1_EXHAUSTIVE_G_LEN + 1..=C4_G_LEN);
        random_letters(&f1, len, &mut rng)
    }));
    let gs1 = cyclically_reduced(&f1, distinct(&f1, g_words));
    let mut h_words = all_words(&f1, C4_F1_EXHAUSTIVE_H_LEN);
    h_words.extend((0..C4_F1_RANDOM_H).map(|_| {
        let len = rng.gen_range(C4_F1_EXHAUSTIVE_H_LEN + 1..=C4_H_LEN);
        random_letters(&f1, len, &mut rng)
    }));
    let hs1 = distinct(&f1, h_words);
    let n_f1 = centraliser_completeness(&f1, &gs1, &hs1, &mut fails);
    report(
        4,
        &fails,
        format!(
            "P4: {} elements x {} words, {n_p4} commuting; Figure-1: {} x {}, {n_f1} commuting; {:?}",
            gs.len(),
            hs.len(),
            gs1.len(),
            hs1.len(),
            start.elapsed()
        ),
    );
}

/// The image of `x` under the retraction, computed letter by letter in the
/// base RAAG and decided by the deletion oracle.
fn independent_image_trivial(grp: &Group, idx: &RetractionIndex, x: &Elem) -> bool {
    let ext = grp.ext().unwrap();
    let base = ext.base.graph();
    let u = expand(ext.u.word().unwrap());
    let mut letters: Letters = Vec::new();
    for (name, e) in parse_letters(&grp.format(x)).unwrap() {
        if let Some(i) = ext.a_names.iter().position(|n| *n == name) {
            let k = idx.m * idx.psi[i] * e;
            let piece = if k >= 0 { u.clone() } else { inverse(&u) };
            for _ in 0..k.abs() {
                letters.extend(piece.iter().copied());
            }
        } else {
            let v = base.vertex(&name).unwrap();
            letters.extend(std::iter::repeat_n((v, e.signum()), e.unsigned_abs() as usize));
        }
    }
    oracle_trivial(base, &letters)
}

fn test_extensions() -> Vec<(&'static str, Group)> {
    let f2 = Group::raag(Graph::edgeless(&["x", "y"]));
    let e1 = extend(&f2, &f2.parse("x").unwrap(), 1, Some(vec!["s".into()])).unwrap();
    let p4 = Group::raag(Graph::p4());
    let e2 = extend(&p4, &p4.parse("a c").unwrap(), 2, None).unwrap();
    vec![("F2 over x", e1), ("P4 over ac, rank 2", e2)]
}

#[test]
fn criterion_5_discrimination() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut max_m = 0;
    for (name, grp) in test_extensions() {
        let mut done = 0;
        while done < C5_SAMPLES {
            let len = rng.gen_range(1..=C5_MAX_LEN);
            let x = grp.random_elem(&mut rng, len);
            if grp.is_identity(&x) {
                continue;
            }
            done += 1;
            match separate(&grp, &x, C5_BUDGET) {
                Ok(c) => {
                    max_m = max_m.max(c.index.m);
                    if c.index.m > C5_BUDGET || independent_image_trivial(&grp, &c.index, &x) {
                        fails.push(format!("{name}: bad certificate for {}", grp.format(&x)));
                    }
                }
                Err(e) => fails.push(format!("{name}: {} not separated: {e}", grp.format(&x))),
            }
        }
    }
    let t = start.elapsed();
    if t >= C5_TIME {
        fails.push(format!("took {t:?}"));
    }
    report(5, &fails, format!("2 x {C5_SAMPLES} elements, largest m = {max_m}, {t:?}"));
}

#[test]
fn criterion_6_homomorphisms_and_axioms() {
    let mut fails = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (name, grp) in test_extensions() {
        let base = &grp.ext().unwrap().base;
        let k = grp.ext().unwrap().a_rank();
        for _ in 0..C6_PAIRS {
            let idx = RetractionIndex { psi: (0..k).map(|_| rng.gen_range(-3..=3)).collect(), m: rng.gen_range(1..=4) };
            let (lx, ly) = (rng.gen_range(0..=6), rng.gen_range(0..=6));
            let x = grp.random_elem(&mut rng, lx);
            let y = grp.random_elem(&mut rng, ly);
            let lhs = retract(&grp, &idx, &grp.mul(&x, &y)).unwrap();
            let rhs = base.mul(&retract(&grp, &idx, &x).unwrap(), &retract(&grp, &idx, &y).unwrap());
            if lhs != rhs {
                fails.push(format!("{name}: retract not multiplicative on {}, {}", grp.format(&x), grp.format(&y)));
            }
        }
    }
    let mut skipped = 0;
    for (g, u) in [(Graph::edgeless(&["x", "y"]), "x"), (Graph::p4(), "a c")] {
        let chain = build_ice(&g, &[(u.to_string(), 2)]).unwrap();
        let r = axiom_check(&chain, C6_SAMPLES, &C6_M, 6);
        skipped += r.axioms.iter().map(|a| a.skipped).sum::<usize>();
        if !r.passed() {
            fails.push(format!("axiom_check over {u}: {r:?}"));
        }
    }
    report(6, &fails, format!("2 x {C6_PAIRS} retraction pairs, zt axioms on F2 and P4, {skipped} skipped"));
}

#[test]
fn criterion_7_big_powers() {
    let mut fails = Vec::new();
    let f2 = Group::raag(Graph::edgeless(&["x", "y"]));
    let p4 = Group::raag(Graph::p4());
    let tuple = |g: &Group, s: &[&str]| -> Vec<Elem> { s.iter().map(|x| g.parse(x).unwrap()).collect() };
    let cases = [(&f2, vec!["x", "y"]), (&p4, vec!["a", "d"]), (&p4, vec!["b", "d"]), (&p4, vec!["a", "c"])];
    for (g, t) in &cases {
        match bp_scan(g, &tuple(g, t), C7_BOUND) {
            Ok(None) => {}
            other => fails.push(format!("{t:?}: {other:?}")),
        }
    }
    if !matches!(bp_scan(&p4, &tuple(&p4, &["a", "b"]), C7_BOUND), Err(Error::NonGeneric(_, _))) {
        fails.push("(a, b) accepted".into());
    }
    report(7, &fails, format!("4 generic tuples to exponent {C7_BOUND}, (a, b) rejected"));
}

fn new_vertex_rank(v: &TreeVertex) -> usize {
    match v {
        TreeVertex::FreeAbelian { rank, .. } | TreeVertex::AbelianTimesSurface { rank, .. } => *rank,
        TreeVertex::SubTower { .. } => usize::MAX,
    }
}

#[test]
fn criterion_8_towers() {
    let mut fails = Vec::new();
    let corpus = tower_corpus();
    let mut separated = 0;
    for ct in &corpus {
        let t = match Tower::from_spec(&ct.spec) {
            Ok(t) => t,
            Err(e) => {
                fails.push(format!("{}: {e}", ct.name));
                continue;
            }
        };
        for level in 1..=t.height() {
            let r = t.retraction_check(level).unwrap();
            if !r.passed() {
                fails.push(format!("{} level {level}: {:?}", ct.name, r.failed));
            }
            let d = t.floor_decomposition(level).unwrap();
            if d["tag"] != t.floors[level - 1].spec.kind.tag() {
                fails.push(format!("{} level {level}: tag {}", ct.name, d["tag"]));
            }
        }
        let tree = t.tree_decomposition().unwrap();
        if !tree.is_tree() || !check_tree_edges(&t).unwrap() {
            fails.push(format!("{}: not a tree with embedded edge groups", ct.name));
        }
        let mut got = Vec::new();
        let mut cur = &tree;
        while let Some(TreeVertex::SubTower { tree: lower, .. }) = cur.vertices.first() {
            got.push((new_vertex_rank(&cur.vertices[1]), cur.edges[0].rank));
            cur = lower;
        }
        got.reverse();
        if got != ct.floor_ranks {
            fails.push(format!("{}: ranks {got:?}, expected {:?}", ct.name, ct.floor_ranks));
        }
        let base = &t.base;
        for e in &cur.edges {
            let sep = base.vertex_set(&e.generators).unwrap();
            if !base.is_clique(&sep) || e.rank != e.generators.len() {
                fails.push(format!("{}: base edge group {:?} is not free abelian", ct.name, e.generators));
            }
        }
        for level in 1..=t.height() {
            if t.floors[level - 1].group.is_some() {
                continue;
            }
            let emb = t.embed_quadratic(level).unwrap();
            let certs = emb.spot_check(C8_SAMPLES, 6, C8_BUDGET, level as u64).unwrap();
            if certs.len() != C8_SAMPLES || certs.iter().any(|(_, c)| c.index.m > C8_BUDGET) {
                fails.push(format!("{} level {level}: {} separated", ct.name, certs.len()));
            }
            separated += certs.len();
        }
    }
    report(8, &fails, format!("{} towers, {separated} quadratic images separated", corpus.len()));
}

#[test]
fn criterion_9_class_c_falsifier() {
    let mut fails = Vec::new();
    let mut summary = HashMap::new();
    for (name, g) in [
        ("P4", Graph::p4()),
        ("Figure-1", Graph::figure1()),
        ("Z^3", Graph::complete(&["a", "b", "c"])),
    ] {
        let reps = representatives(&g, C9_LENGTH).unwrap();
        let r = check_class_c_axioms(&g, &reps, C9_LENGTH, C9_SAMPLES, 9).unwrap();
        if !r.passed() {
            fails.push(format!("{name}: {r:?}"));
        }
        summary.insert(name, r.axioms.len());
    }
    let f2 = Graph::edgeless(&["x", "y"]);
    let r = check_class_c_axioms(&f2, &RepresentativeSet::empty(C9_LENGTH), C9_LENGTH, C9_SAMPLES, 9).unwrap();
    let witnessed = r.axioms.iter().any(|a| a.witness.is_some());
    if r.passed() || !witnessed {
        fails.push("broken configuration (F2, W empty) not caught".into());
    }
    report(9, &fails, format!("passes on {} graphs; F2 with empty W fails with a witness", summary.len()));
}
