//! Brute-force oracles and fixed corpora shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use raag::graph::GraphSpec;
use raag::towers::{FloorKind, FloorSpec, QuadraticData, TowerSpec};
use raag::{Graph, Word};

pub type Letters = Vec<(usize, i64)>;

/// Letters of a syllable word, exponents ±1.
pub fn expand(w: &Word) -> Letters {
    w.0.iter()
        .flat_map(|&(x, e)| std::iter::repeat_n((x, e.signum()), e.unsigned_abs() as usize))
        .collect()
}

pub fn inverse(l: &[(usize, i64)]) -> Letters {
    l.iter().rev().map(|&(x, e)| (x, -e)).collect()
}

/// Deletes pairs `x^e … x^-e` whose in-between letters all commute with x,
/// until none is left.
pub fn oracle_reduce(g: &Graph, letters: &[(usize, i64)]) -> Letters {
    let mut w = letters.to_vec();
    'outer: loop {
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                let (x, e) = w[i];
                if w[j] == (x, -e) {
                    w.remove(j);
                    w.remove(i);
                    continue 'outer;
                }
                if !g.adjacent(x, w[j].0) {
                    break;
                }
            }
        }
        return w;
    }
}

pub fn oracle_trivial(g: &Graph, letters: &[(usize, i64)]) -> bool {
    oracle_reduce(g, letters).is_empty()
}

pub fn oracle_equal(g: &Graph, u: &[(usize, i64)], v: &[(usize, i64)]) -> bool {
    let mut w = u.to_vec();
    w.extend(inverse(v));
    oracle_trivial(g, &w)
}

/// Every word reachable by swapping adjacent letters on joined vertices.
pub fn shuffle_class(g: &Graph, letters: &[(usize, i64)]) -> HashSet<Letters> {
    let mut seen = HashSet::from([letters.to_vec()]);
    let mut queue = VecDeque::from([letters.to_vec()]);
    while let Some(w) = queue.pop_front() {
        for i in 0..w.len().saturating_sub(1) {
            if w[i].0 != w[i + 1].0 && g.adjacent(w[i].0, w[i + 1].0) {
                let mut v = w.clone();
                v.swap(i, i + 1);
                if seen.insert(v.clone()) {
                    queue.push_back(v);
                }
            }
        }
    }
    seen
}

/// Projection onto a pair of non-adjacent vertices, freely reduced.
fn pair_projection(l: &[(usize, i64)], a: usize, b: usize) -> Letters {
    let mut out: Letters = Vec::new();
    for &(x, e) in l {
        if x != a && x != b {
            continue;
        }
        if out.last() == Some(&(x, -e)) {
            out.pop();
        } else {
            out.push((x, e));
        }
    }
    out
}

/// Commutation by the deletion oracle, with a cheap reject through free
/// projections onto non-adjacent pairs.
pub fn oracle_commute(g: &Graph, u: &[(usize, i64)], v: &[(usize, i64)]) -> bool {
    let mut c = inverse(u);
    c.extend(inverse(v));
    c.extend(u.iter().copied());
    c.extend(v.iter().copied());
    for a in 0..g.len() {
        for b in a + 1..g.len() {
            if !g.adjacent(a, b) && !pair_projection(&c, a, b).is_empty() {
                return false;
            }
        }
    }
    oracle_trivial(g, &c)
}

/// Induced cycles of length ≥ 4 by exhaustive subset search.
pub fn brute_force_induced_cycle(g: &Graph) -> Option<BTreeSet<usize>> {
    let n = g.len();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() < 4 {
            continue;
        }
        let set: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let degree_two = set.iter().all(|&v| set.iter().filter(|&&w| g.adjacent(v, w)).count() == 2);
        if !degree_two {
            continue;
        }
        let mut seen = BTreeSet::from([set[0]]);
        let mut stack = vec![set[0]];
        while let Some(v) = stack.pop() {
            for &w in &set {
                if g.adjacent(v, w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        if seen.len() == set.len() {
            return Some(seen);
        }
    }
    None
}

pub fn random_graph(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((names[i].clone(), names[j].clone()));
            }
        }
    }
    Graph::new(&names, &edges).unwrap()
}

/// Twenty graphs on at most five vertices.
pub fn small_corpus() -> Vec<Graph> {
    let mut out = vec![
        Graph::p4(),
        Graph::cycle(&["a", "b", "c", "d"]),
        Graph::cycle(&["a", "b", "c", "d", "e"]),
        Graph::complete(&["a", "b", "c"]),
        Graph::complete(&["a", "b", "c", "d", "e"]),
        Graph::edgeless(&["a", "b"]),
        Graph::edgeless(&["a", "b", "c", "d"]),
        Graph::new(&["a", "b", "c", "d"], &[("a", "b"), ("a", "c"), ("a", "d")]).unwrap(),
        Graph::new(&["a", "b", "c", "d", "e"], &[("a", "b"), ("b", "c"), ("a", "c"), ("c", "d"), ("d", "e")]).unwrap(),
        Graph::new(&["a"], &[]).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    while out.len() < 20 {
        let n = rng.gen_range(3..=5);
        out.push(random_graph(n, 0.5, &mut rng));
    }
    out
}

/// Graphs on at most eight vertices, for the chordality check.
pub fn chordality_corpus() -> Vec<Graph> {
    let mut out = small_corpus();
    out.push(Graph::figure1());
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..60 {
        let n = 4 + i % 5;
        let p = [0.3, 0.5, 0.7][i % 3];
        out.push(random_graph(n, p, &mut rng));
    }
    out
}

pub fn random_letters(g: &Graph, len: usize, rng: &mut impl Rng) -> Letters {
    (0..len).map(|_| (rng.gen_range(0..g.len()), if rng.gen_bool(0.5) { 1 } else { -1 })).collect()
}

pub fn to_word(l: &[(usize, i64)]) -> Word {
    Word::from_letters(l.iter().copied())
}

/// All freely reduced letter sequences of length ≤ `max`.
pub fn all_words(g: &Graph, max: usize) -> Vec<Letters> {
    let letters: Vec<(usize, i64)> = (0..g.len()).flat_map(|x| [(x, 1), (x, -1)]).collect();
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.last() == Some(&(l.0, -l.1)) {
                    continue;
                }
                let mut v: Letters = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn floor(kind: FloorKind, k: &[&str], u: Option<&str>, m: usize) -> FloorSpec {
    FloorSpec {
        kind,
        k: k.iter().map(|s| s.to_string()).collect(),
        u: u.map(str::to_string),
        m,
        names: None,
        quadratic: None,
    }
}

fn surface(k: &[&str], v1: &str, v2: &str) -> FloorSpec {
    let mut f = floor(FloorKind::C, k, None, 2);
    f.quadratic = Some(QuadraticData {
        orientable: true,
        genus: 1,
        boundary: vec![],
        solution: vec![v1.into(), v2.into()],
        conjugators: vec![],
        closing: None,
    });
    f
}

/// A tower spec and the ranks its tree decomposition must show: the
/// new-vertex rank and edge rank per floor.
pub struct CorpusTower {
    pub name: &'static str,
    pub spec: TowerSpec,
    pub floor_ranks: Vec<(usize, usize)>,
}

/// Ten towers of height at most three over P4 and the Figure-1 graph.
pub fn tower_corpus() -> Vec<CorpusTower> {
    let p4 = || Graph::p4().to_spec();
    let f1 = || Graph::figure1().to_spec();
    let y1 = ["a", "c1", "d1"];
    let t = |name, base: GraphSpec, floors, floor_ranks| CorpusTower { name, spec: TowerSpec { base, floors }, floor_ranks };
    vec![
        t("p4-b1", p4(), vec![floor(FloorKind::B1, &["b"], Some("a c"), 2)], vec![(4, 2)]),
        t(
            "p4-b1-a2",
            p4(),
            vec![
                floor(FloorKind::B1, &["b"], Some("a c"), 2),
                floor(FloorKind::A2Abelian, &["b", "x1_2"], None, 1),
            ],
            vec![(4, 2), (5, 4)],
        ),
        t("p4-c", p4(), vec![surface(&["b"], "a", "c")], vec![(1, 2)]),
        t(
            "p4-b1-c",
            p4(),
            vec![floor(FloorKind::B1, &["b"], Some("a c"), 2), surface(&["b"], "a", "x1_1")],
            vec![(4, 2), (1, 2)],
        ),
        t(
            "p4-b1-a2-c",
            p4(),
            vec![
                floor(FloorKind::B1, &["b"], Some("a c"), 2),
                floor(FloorKind::A2Abelian, &["b", "x1_2"], None, 1),
                surface(&["b"], "a", "c"),
            ],
            vec![(4, 2), (5, 4), (1, 2)],
        ),
        t("f1-b1", f1(), vec![floor(FloorKind::B1, &y1, Some("b1 d2"), 1)], vec![(5, 4)]),
        t("f1-c", f1(), vec![surface(&y1, "b1", "d2")], vec![(3, 4)]),
        t(
            "f1-b1-c",
            f1(),
            vec![floor(FloorKind::B1, &y1, Some("b1 d2"), 1), surface(&y1, "b1", "d2")],
            vec![(5, 4), (3, 4)],
        ),
        t(
            "f1-b1-a2",
            f1(),
            vec![
                floor(FloorKind::B1, &y1, Some("b1 d2"), 2),
                floor(FloorKind::A2Abelian, &["a", "c1", "d1", "x1_2"], None, 1),
            ],
            vec![(6, 4), (7, 6)],
        ),
        t(
            "f1-b1-a2-c",
            f1(),
            vec![
                floor(FloorKind::B1, &y1, Some("b1 d2"), 2),
                floor(FloorKind::A2Abelian, &["a", "c1", "d1", "x1_2"], None, 1),
                surface(&y1, "b1", "d2"),
            ],
            vec![(6, 4), (7, 6), (3, 4)],
        ),
    ]
}
