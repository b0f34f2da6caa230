//! Commutation graphs: links, stars, cliques, complements and chordality.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A set of vertex indices. Indices follow the graph's vertex order.
pub type VertexSet = BTreeSet<usize>;

/// Graph as read from or written to JSON.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<String>>,
}

/// Finite simple graph whose vertices are generator names.
///
/// Vertex `i` is the `i`-th vertex in the total order used for shortlex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<Vec<bool>>,
}

/// Certificate returned by [`Graph::is_chordal`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChordalityWitness {
    Peo(Vec<usize>),
    Cycle(Vec<usize>),
}

impl Graph {
    /// Builds a graph, ordering vertices lexicographically.
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Graph> {
        let spec = GraphSpec {
            vertices: vertices.iter().map(|v| v.as_ref().to_string()).collect(),
            edges: edges
                .iter()
                .map(|(a, b)| (a.as_ref().to_string(), b.as_ref().to_string()))
                .collect(),
            order: None,
        };
        Graph::from_spec(&spec)
    }

    pub fn from_spec(spec: &GraphSpec) -> Result<Graph> {
        let mut seen = BTreeSet::new();
        for v in &spec.vertices {
            if v.is_empty() || !crate::words::is_identifier(v) {
                return Err(Error::InvalidGraph(format!("bad vertex name {v:?}")));
            }
            if !seen.insert(v.clone()) {
                return Err(Error::InvalidGraph(format!("duplicate vertex {v}")));
            }
        }
        let names: Vec<String> = match &spec.order {
            Some(order) => {
                let as_set: BTreeSet<String> = order.iter().cloned().collect();
                if as_set.len() != order.len() || as_set != seen {
                    return Err(Error::InvalidGraph(
                        "order must list every vertex exactly once".into(),
                    ));
                }
                order.clone()
            }
            None => seen.into_iter().collect(),
        };
        let index: HashMap<String, usize> =
            names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let n = names.len();
        let mut adj = vec![vec![false; n]; n];
        for (a, b) in &spec.edges {
            let ia = *index
                .get(a)
                .ok_or_else(|| Error::InvalidGraph(format!("edge endpoint {a} is not a vertex")))?;
            let ib = *index
                .get(b)
                .ok_or_else(|| Error::InvalidGraph(format!("edge endpoint {b} is not a vertex")))?;
            if ia == ib {
                return Err(Error::InvalidGraph(format!("loop at {a}")));
            }
            if adj[ia][ib] {
                return Err(Error::InvalidGraph(format!("duplicate edge {a}-{b}")));
            }
            adj[ia][ib] = true;
            adj[ib][ia] = true;
        }
        Ok(Graph { names, index, adj })
    }

    pub fn from_json(text: &str) -> Result<Graph> {
        let spec: GraphSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidGraph(e.to_string()))?;
        Graph::from_spec(&spec)
    }

    pub fn to_spec(&self) -> GraphSpec {
        let sorted: Vec<String> = {
            let mut v = self.names.clone();
            v.sort();
            v
        };
        GraphSpec {
            vertices: self.names.clone(),
            edges: self
                .edges()
                .into_iter()
                .map(|(a, b)| (self.names[a].clone(), self.names[b].clone()))
                .collect(),
            order: if sorted == self.names { None } else { Some(self.names.clone()) },
        }
    }

    /// Cycle graph on the given names, in the given cyclic order.
    pub fn cycle<S: AsRef<str>>(names: &[S]) -> Graph {
        let n = names.len();
        let edges: Vec<(&str, &str)> = (0..n)
            .map(|i| (names[i].as_ref(), names[(i + 1) % n].as_ref()))
            .collect();
        let vs: Vec<&str> = names.iter().map(|s| s.as_ref()).collect();
        Graph::new(&vs, &edges).expect("cycle graph")
    }

    /// Path a-b-c-d.
    pub fn p4() -> Graph {
        Graph::new(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d")]).unwrap()
    }

    /// Edgeless graph on the given names.
    pub fn edgeless<S: AsRef<str>>(names: &[S]) -> Graph {
        let vs: Vec<&str> = names.iter().map(|s| s.as_ref()).collect();
        Graph::new::<&str>(&vs, &[]).unwrap()
    }

    /// Complete graph on the given names.
    pub fn complete<S: AsRef<str>>(names: &[S]) -> Graph {
        let vs: Vec<&str> = names.iter().map(|s| s.as_ref()).collect();
        let mut edges = Vec::new();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                edges.push((vs[i], vs[j]));
            }
        }
        Graph::new(&vs, &edges).unwrap()
    }

    /// The seven-vertex graph of the worked example with two non-conjugate
    /// non-abelian centralisers.
    pub fn figure1() -> Graph {
        let vs = ["a", "b1", "b2", "c1", "c2", "d1", "d2"];
        let es = [
            ("a", "b2"),
            ("b2", "c2"),
            ("c2", "d2"),
            ("d2", "d1"),
            ("d1", "c1"),
            ("c1", "b1"),
            ("b1", "a"),
            ("b2", "d2"),
            ("d2", "a"),
            ("a", "d1"),
            ("d1", "b1"),
            ("d2", "c1"),
            ("c1", "a"),
            ("a", "c2"),
            ("c2", "d1"),
        ];
        Graph::new(&vs, &es).unwrap()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn vertex_set<S: AsRef<str>>(&self, names: &[S]) -> Result<VertexSet> {
        names
            .iter()
            .map(|n| {
                self.vertex(n.as_ref())
                    .ok_or_else(|| Error::UnknownGenerator(n.as_ref().to_string()))
            })
            .collect()
    }

    pub fn set_names(&self, set: &VertexSet) -> Vec<String> {
        set.iter().map(|&v| self.names[v].clone()).collect()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a][b]
    }

    /// Distinct generators commute iff they are adjacent.
    pub fn commute(&self, a: usize, b: usize) -> bool {
        a != b && self.adj[a][b]
    }

    pub fn neighbours(&self, v: usize) -> VertexSet {
        (0..self.len()).filter(|&u| self.adj[v][u]).collect()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if self.adj[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn all(&self) -> VertexSet {
        (0..self.len()).collect()
    }

    /// lk(Y): vertices outside Y adjacent to every vertex of Y.
    pub fn link(&self, y: &VertexSet) -> VertexSet {
        (0..self.len())
            .filter(|v| !y.contains(v) && y.iter().all(|&w| self.adj[*v][w]))
            .collect()
    }

    /// st(Y): intersection of the stars of the vertices of Y.
    pub fn star(&self, y: &VertexSet) -> VertexSet {
        let mut it = y.iter();
        let Some(&first) = it.next() else {
            return self.all();
        };
        let mut acc = self.vertex_star(first);
        for &v in it {
            let s = self.vertex_star(v);
            acc = acc.intersection(&s).copied().collect();
        }
        acc
    }

    fn vertex_star(&self, v: usize) -> VertexSet {
        let mut s = self.neighbours(v);
        s.insert(v);
        s
    }

    /// Link and star of a nonempty vertex set.
    pub fn link_star(&self, y: &VertexSet) -> Result<(VertexSet, VertexSet)> {
        if y.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        if let Some(&bad) = y.iter().find(|&&v| v >= self.len()) {
            return Err(Error::UnknownGenerator(format!("#{bad}")));
        }
        Ok((self.link(y), self.star(y)))
    }

    pub fn is_clique(&self, y: &VertexSet) -> bool {
        let v: Vec<usize> = y.iter().copied().collect();
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if !self.adj[v[i]][v[j]] {
                    return false;
                }
            }
        }
        true
    }

    /// Connected components of the complement graph restricted to `y`,
    /// ordered by least vertex.
    pub fn complement_components(&self, y: &VertexSet) -> Vec<VertexSet> {
        self.components_by(y, |a, b| !self.adj[a][b])
    }

    /// Components of the graph on `y` whose edges are the pairs accepted by `joined`.
    pub fn components_by(&self, y: &VertexSet, joined: impl Fn(usize, usize) -> bool) -> Vec<VertexSet> {
        let mut seen = VertexSet::new();
        let mut out = Vec::new();
        for &start in y {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = VertexSet::new();
            let mut queue = VecDeque::from([start]);
            seen.insert(start);
            while let Some(v) = queue.pop_front() {
                comp.insert(v);
                for &w in y {
                    if !seen.contains(&w) && v != w && joined(v, w) {
                        seen.insert(w);
                        queue.push_back(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Lexicographic breadth-first search order.
    pub fn lex_bfs(&self) -> Vec<usize> {
        let n = self.len();
        let mut labels: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut done = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for step in 0..n {
            let mut best: Option<usize> = None;
            for v in 0..n {
                if done[v] {
                    continue;
                }
                best = match best {
                    None => Some(v),
                    Some(b) if labels[v] > labels[b] => Some(v),
                    keep => keep,
                };
            }
            let v = best.expect("vertex left");
            done[v] = true;
            order.push(v);
            for w in 0..n {
                if !done[w] && self.adj[v][w] {
                    labels[w].push(n - step);
                }
            }
        }
        order
    }

    /// Later neighbours of each vertex in `peo` form a clique iff `peo` is a
    /// perfect elimination ordering. Returns the first failing position.
    pub fn check_peo(&self, peo: &[usize]) -> std::result::Result<(), (usize, usize, usize)> {
        let n = self.len();
        let mut pos = vec![usize::MAX; n];
        for (i, &v) in peo.iter().enumerate() {
            pos[v] = i;
        }
        for (i, &v) in peo.iter().enumerate() {
            let later: Vec<usize> = (0..n).filter(|&w| self.adj[v][w] && pos[w] > i).collect();
            for a in 0..later.len() {
                for b in a + 1..later.len() {
                    if !self.adj[later[a]][later[b]] {
                        return Err((v, later[a], later[b]));
                    }
                }
            }
        }
        Ok(())
    }

    /// Chordality with a certificate: a perfect elimination ordering, or an
    /// induced cycle of length at least four.
    pub fn is_chordal(&self) -> (bool, ChordalityWitness) {
        let mut peo = self.lex_bfs();
        peo.reverse();
        match self.check_peo(&peo) {
            Ok(()) => (true, ChordalityWitness::Peo(peo)),
            Err((v, x, y)) => {
                let cycle = self
                    .cycle_through(v, x, y)
                    .or_else(|| self.any_induced_cycle())
                    .expect("a failed elimination step implies an induced cycle");
                (false, ChordalityWitness::Cycle(canonical_cycle(cycle)))
            }
        }
    }

    /// Shortest x-y path avoiding v and the other neighbours of v, closed up
    /// through v. Such a path plus v is a chordless cycle.
    fn cycle_through(&self, v: usize, x: usize, y: usize) -> Option<Vec<usize>> {
        let n = self.len();
        let blocked: Vec<bool> =
            (0..n).map(|w| w == v || (self.adj[v][w] && w != x && w != y)).collect();
        let mut prev = vec![usize::MAX; n];
        let mut queue = VecDeque::from([x]);
        prev[x] = x;
        while let Some(a) = queue.pop_front() {
            if a == y {
                break;
            }
            for b in 0..n {
                if self.adj[a][b] && !blocked[b] && prev[b] == usize::MAX {
                    prev[b] = a;
                    queue.push_back(b);
                }
            }
        }
        if prev[y] == usize::MAX {
            return None;
        }
        let mut path = vec![y];
        let mut cur = y;
        while cur != x {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        let mut cycle = vec![v];
        cycle.extend(path);
        Some(cycle)
    }

    fn any_induced_cycle(&self) -> Option<Vec<usize>> {
        let n = self.len();
        for v in 0..n {
            let nb: Vec<usize> = self.neighbours(v).into_iter().collect();
            for i in 0..nb.len() {
                for j in i + 1..nb.len() {
                    if !self.adj[nb[i]][nb[j]] {
                        if let Some(c) = self.cycle_through(v, nb[i], nb[j]) {
                            return Some(c);
                        }
                    }
                }
            }
        }
        None
    }

    /// True if `cycle` is an induced cycle of length at least four.
    pub fn is_induced_cycle(&self, cycle: &[usize]) -> bool {
        let k = cycle.len();
        if k < 4 || cycle.iter().collect::<BTreeSet<_>>().len() != k {
            return false;
        }
        for i in 0..k {
            for j in i + 1..k {
                let consecutive = j == i + 1 || (i == 0 && j == k - 1);
                if self.adj[cycle[i]][cycle[j]] != consecutive {
                    return false;
                }
            }
        }
        true
    }

    /// Maximal cliques of a chordal graph, read off a perfect elimination ordering.
    pub fn maximal_cliques(&self) -> Result<Vec<VertexSet>> {
        let (chordal, witness) = self.is_chordal();
        let ChordalityWitness::Peo(peo) = witness else {
            debug_assert!(!chordal);
            return Err(Error::NotChordal);
        };
        let n = self.len();
        let mut pos = vec![0; n];
        for (i, &v) in peo.iter().enumerate() {
            pos[v] = i;
        }
        let mut candidates: Vec<VertexSet> = peo
            .iter()
            .map(|&v| {
                let mut c: VertexSet =
                    (0..n).filter(|&w| self.adj[v][w] && pos[w] > pos[v]).collect();
                c.insert(v);
                c
            })
            .collect();
        candidates.sort_by_key(|c| std::cmp::Reverse(c.len()));
        let mut out: Vec<VertexSet> = Vec::new();
        for c in candidates {
            if !out.iter().any(|m| c.is_subset(m)) {
                out.push(c);
            }
        }
        out.sort();
        Ok(out)
    }

    /// All cliques (including the empty one), in increasing size.
    pub fn cliques(&self) -> Vec<VertexSet> {
        let mut out = vec![VertexSet::new()];
        let mut frontier = vec![VertexSet::new()];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for c in &frontier {
                let start = c.iter().next_back().map_or(0, |&m| m + 1);
                for v in start..self.len() {
                    if c.iter().all(|&w| self.adj[v][w]) {
                        let mut d = c.clone();
                        d.insert(v);
                        next.push(d);
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }
}

/// Rotates a cycle to start at its least vertex, heading towards the smaller neighbour.
fn canonical_cycle(cycle: Vec<usize>) -> Vec<usize> {
    let k = cycle.len();
    let start = (0..k).min_by_key(|&i| cycle[i]).unwrap();
    let fwd: Vec<usize> = (0..k).map(|i| cycle[(start + i) % k]).collect();
    let bwd: Vec<usize> = (0..k).map(|i| cycle[(start + k - i) % k]).collect();
    if fwd[1] <= bwd[1] {
        fwd
    } else {
        bwd
    }
}
