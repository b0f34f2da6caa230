//! Graph towers over a coherent RAAG built from abelian-centraliser floors
//! (a2), abelian floors over a root element (b1) and quadratic floors (c).

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::amalgam::extend;
use crate::discrimination::{separate, SeparationCertificate};
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphSpec, VertexSet};
use crate::group::{Elem, Group, Sub};
use crate::words;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    D,
    C,
}

/// Γ_l with its edges split into d-edges and c-edges.
#[derive(Clone, Debug)]
pub struct LayeredGraph {
    pub graph: Graph,
    c_edges: BTreeSet<(usize, usize)>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl LayeredGraph {
    /// Level 0: every edge is a d-edge.
    pub fn base(g: &Graph) -> LayeredGraph {
        LayeredGraph { graph: g.clone(), c_edges: BTreeSet::new() }
    }

    pub fn kind(&self, a: usize, b: usize) -> Option<EdgeKind> {
        if !self.graph.adjacent(a, b) {
            None
        } else if self.c_edges.contains(&key(a, b)) {
            Some(EdgeKind::C)
        } else {
            Some(EdgeKind::D)
        }
    }

    pub fn is_d(&self, a: usize, b: usize) -> bool {
        self.kind(a, b) == Some(EdgeKind::D)
    }

    fn with_floor(&self, new: &[String], d: &[(String, String)], c: &[(String, String)]) -> Result<LayeredGraph> {
        let mut order: Vec<String> = self.graph.names().to_vec();
        order.extend(new.iter().cloned());
        let mut edges: Vec<(String, String)> = self
            .graph
            .edges()
            .into_iter()
            .map(|(a, b)| (self.graph.name(a).to_string(), self.graph.name(b).to_string()))
            .collect();
        edges.extend(d.iter().cloned());
        edges.extend(c.iter().cloned());
        let graph = Graph::from_spec(&GraphSpec { vertices: order.clone(), edges, order: Some(order) })?;
        let idx = |n: &str| graph.vertex(n).expect("just added");
        let mut c_edges: BTreeSet<(usize, usize)> =
            self.c_edges.iter().map(|&(a, b)| key(idx(self.graph.name(a)), idx(self.graph.name(b)))).collect();
        c_edges.extend(c.iter().map(|(a, b)| key(idx(a), idx(b))));
        Ok(LayeredGraph { graph, c_edges })
    }

    pub fn to_json(&self) -> Value {
        let edges: Vec<Value> = self
            .graph
            .edges()
            .into_iter()
            .map(|(a, b)| {
                json!([self.graph.name(a), self.graph.name(b), self.kind(a, b).expect("edge")])
            })
            .collect();
        json!({ "vertices": self.graph.names(), "edges": edges })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Orth {
    pub perp: VertexSet,
    pub closure: VertexSet,
    pub co_irreducible: bool,
}

/// `K^⊥`, `K^⊥⊥` and co-irreducibility of `K = ⟨y⟩`.
pub fn orth(lg: &LayeredGraph, y: &VertexSet) -> Orth {
    let g = &lg.graph;
    let perp = g.link(y);
    let closure = g.link(&perp);
    let indecomposable =
        !perp.is_empty() && g.components_by(&perp, |a, b| !lg.is_d(a, b)).len() == 1;
    Orth { co_irreducible: closure == *y && indecomposable, perp, closure }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FloorKind {
    #[serde(rename = "a2")]
    A2Abelian,
    #[serde(rename = "b1")]
    B1,
    #[serde(rename = "c")]
    C,
}

impl FloorKind {
    pub fn tag(self) -> &'static str {
        match self {
            FloorKind::A2Abelian => "a2",
            FloorKind::B1 => "b1",
            FloorKind::C => "c",
        }
    }
}

/// Surface data of a quadratic floor. Words are over the previous level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticData {
    pub orientable: bool,
    pub genus: usize,
    /// u_i for the extra boundary components.
    #[serde(default)]
    pub boundary: Vec<String>,
    /// v_j, images of the handle (or cross-cap) generators.
    pub solution: Vec<String>,
    /// w_k, one conjugator per extra boundary word.
    #[serde(default)]
    pub conjugators: Vec<String>,
    /// u_(m+1); derived from the other data when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closing: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloorSpec {
    pub kind: FloorKind,
    /// Y_l, the canonical generators of K_l.
    pub k: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadratic: Option<QuadraticData>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TowerSpec {
    pub base: GraphSpec,
    #[serde(default)]
    pub floors: Vec<FloorSpec>,
}

/// A word over the generators of Γ_l.
pub type Relator = Vec<(String, i64)>;

pub fn format_relator(r: &Relator) -> String {
    if r.is_empty() {
        return "1".to_string();
    }
    r.iter()
        .map(|(n, e)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
        .collect::<Vec<_>>()
        .join(" ")
}

fn inverse_letters(r: &[(String, i64)]) -> Relator {
    r.iter().rev().map(|(n, e)| (n.clone(), -e)).collect()
}

fn commutator_letters(a: &[(String, i64)], b: &[(String, i64)]) -> Relator {
    let mut out = inverse_letters(a);
    out.extend(inverse_letters(b));
    out.extend(a.iter().cloned());
    out.extend(b.iter().cloned());
    out
}

fn letters_of(grp: &Group, x: &Elem) -> Result<Relator> {
    if grp.is_identity(x) {
        return Ok(Vec::new());
    }
    words::parse_letters(&grp.format(x))
}

fn eval_letters(grp: &Group, letters: &[(String, i64)], subst: &HashMap<String, Elem>) -> Result<Elem> {
    let mut parts = Vec::with_capacity(letters.len());
    for (n, e) in letters {
        let x = match subst.get(n) {
            Some(x) => x.clone(),
            None => grp.gen(n).ok_or_else(|| Error::UnknownGenerator(n.clone()))?,
        };
        parts.push(grp.pow(&x, *e));
    }
    Ok(grp.product(parts.iter()))
}

#[derive(Clone, Debug)]
pub struct Floor {
    pub spec: FloorSpec,
    pub layered: LayeredGraph,
    pub x_names: Vec<String>,
    /// Generators of the amalgamated centraliser, in the previous level.
    pub c_gens: Vec<Elem>,
    pub relators: Vec<Relator>,
    /// Images of the new generators under the retraction to the previous level.
    pub rho: Vec<Elem>,
    /// The extension group for a2/b1 floors.
    pub group: Option<Group>,
    /// u_(m+1) for quadratic floors.
    pub closing: Option<Elem>,
}

#[derive(Clone, Debug)]
pub struct Tower {
    pub base: Graph,
    pub base_layer: LayeredGraph,
    pub floors: Vec<Floor>,
}

impl Tower {
    pub fn new(base: &Graph) -> Result<Tower> {
        if !base.is_chordal().0 {
            return Err(Error::NotChordal);
        }
        Ok(Tower { base: base.clone(), base_layer: LayeredGraph::base(base), floors: Vec::new() })
    }

    pub fn from_spec(spec: &TowerSpec) -> Result<Tower> {
        let mut t = Tower::new(&Graph::from_spec(&spec.base)?)?;
        for f in &spec.floors {
            t.add_floor(f.clone())?;
        }
        Ok(t)
    }

    pub fn height(&self) -> usize {
        self.floors.len()
    }

    pub fn layer(&self, level: usize) -> &LayeredGraph {
        if level == 0 {
            &self.base_layer
        } else {
            &self.floors[level - 1].layered
        }
    }

    /// G_level when it has a native word problem (no quadratic floor).
    pub fn group(&self, level: usize) -> Option<Group> {
        if level == 0 {
            Some(Group::raag(self.base.clone()))
        } else {
            self.floors[level - 1].group.clone()
        }
    }

    fn vertex_set(lg: &LayeredGraph, names: &[String]) -> Result<VertexSet> {
        names
            .iter()
            .map(|n| lg.graph.vertex(n).ok_or_else(|| Error::UnknownGenerator(n.clone())))
            .collect()
    }

    pub fn add_floor(&mut self, spec: FloorSpec) -> Result<&Floor> {
        let level = self.height() + 1;
        let prev_layer = self.layer(level - 1).clone();
        let grp = self.group(level - 1).ok_or_else(|| {
            Error::Unsupported("floors above a quadratic floor have no word problem here".into())
        })?;
        if spec.m == 0 {
            return Err(Error::Precondition("a floor needs at least one new generator".into()));
        }
        let y = Self::vertex_set(&prev_layer, &spec.k)?;
        if y.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        let o = orth(&prev_layer, &y);
        if !o.co_irreducible {
            return Err(Error::Precondition(format!(
                "K = <{}> is not co-irreducible: perp {:?}, closure {:?}",
                spec.k.join(", "),
                prev_layer.graph.set_names(&o.perp),
                prev_layer.graph.set_names(&o.closure)
            )));
        }
        let perp_names = prev_layer.graph.set_names(&o.perp);
        let perp_gens: Vec<Elem> = perp_names
            .iter()
            .map(|n| grp.gen(n).ok_or_else(|| Error::UnknownGenerator(n.clone())))
            .collect::<Result<_>>()?;
        let perp_abelian = perp_gens.iter().all(|a| perp_gens.iter().all(|b| grp.commute(a, b)));
        let decomposable = prev_layer.graph.complement_components(&o.perp).len() > 1;

        let x_names = match &spec.names {
            Some(ns) => {
                if ns.len() != spec.m {
                    return Err(Error::Precondition(format!("{} names for {} new generators", ns.len(), spec.m)));
                }
                ns.clone()
            }
            None => (1..=spec.m).map(|i| format!("x{level}_{i}")).collect(),
        };
        for n in &x_names {
            if !words::is_identifier(n) {
                return Err(Error::Parse(format!("bad generator name {n:?}")));
            }
            if prev_layer.graph.vertex(n).is_some() {
                return Err(Error::NameClash(n.clone()));
            }
        }

        let in_perp = |letters: &Relator| letters.iter().all(|(n, _)| perp_names.contains(n));
        let mut d_edges = Vec::new();
        for x in &x_names {
            for yv in &spec.k {
                d_edges.push((x.clone(), yv.clone()));
            }
        }
        let mut c_edges = Vec::new();
        let pairwise = match spec.kind {
            FloorKind::B1 => true,
            FloorKind::A2Abelian | FloorKind::C => decomposable,
        };
        if pairwise {
            for i in 0..x_names.len() {
                for j in i + 1..x_names.len() {
                    c_edges.push((x_names[i].clone(), x_names[j].clone()));
                }
            }
        }
        if decomposable {
            for x in &x_names {
                for p in &perp_names {
                    c_edges.push((x.clone(), p.clone()));
                }
            }
        }
        let layered = prev_layer.with_floor(&x_names, &d_edges, &c_edges)?;

        let (c_gens, group, rho, closing, extra) = match spec.kind {
            FloorKind::A2Abelian => {
                if !perp_abelian {
                    return Err(Error::Precondition(format!("K^perp = <{}> is not abelian", perp_names.join(", "))));
                }
                let u = grp.product(perp_gens.iter());
                let c = grp.abelian_centralizer(&u)?;
                let c_gens = grp.basis(&c);
                let g = extend(&grp, &u, spec.m, Some(x_names.clone()))?;
                (c_gens, Some(g), vec![grp.identity(); spec.m], None, Vec::new())
            }
            FloorKind::B1 => {
                let text = spec.u.as_deref().ok_or_else(|| Error::Precondition("b1 floor needs u".into()))?;
                let u = grp.parse(text)?;
                if grp.is_identity(&u) {
                    return Err(Error::Identity("b1 floor"));
                }
                if !in_perp(&letters_of(&grp, &u)?) {
                    return Err(Error::Precondition(format!("u = {text} is not in K^perp")));
                }
                let (_, t) = grp.cyclic_reduce(&u);
                if !grp.is_identity(&t) {
                    return Err(Error::NotCyclicallyReduced);
                }
                let (_, mult) = grp.root(&u)?;
                if mult != 1 {
                    return Err(Error::Precondition(format!("u = {text} is a proper power")));
                }
                if let (Group::Raag(g), Elem::W(w)) = (&grp, &u) {
                    if words::block_decompose(g, w)?.len() != 1 {
                        return Err(Error::Precondition(format!("u = {text} is not a block")));
                    }
                }
                let c = grp.abelian_centralizer(&u)?;
                let c_gens = grp.basis(&c);
                let g = extend(&grp, &u, spec.m, Some(x_names.clone()))?;
                (c_gens, Some(g), vec![grp.identity(); spec.m], None, Vec::new())
            }
            FloorKind::C => {
                let q = spec
                    .quadratic
                    .clone()
                    .ok_or_else(|| Error::Precondition("quadratic floor needs surface data".into()))?;
                let handles = if q.orientable { 2 * q.genus } else { q.genus };
                if q.solution.len() != handles {
                    return Err(Error::Precondition(format!(
                        "{} solution words for {handles} surface generators",
                        q.solution.len()
                    )));
                }
                if q.conjugators.len() != q.boundary.len() {
                    return Err(Error::Precondition("one conjugator per boundary word is required".into()));
                }
                if spec.m != handles + q.boundary.len() {
                    return Err(Error::Precondition(format!(
                        "m = {} but the surface data needs {}",
                        spec.m,
                        handles + q.boundary.len()
                    )));
                }
                let parse_all = |ws: &[String]| -> Result<Vec<Elem>> {
                    ws.iter()
                        .map(|w| {
                            let e = grp.parse(w)?;
                            if !in_perp(&words::parse_letters(w)?) {
                                return Err(Error::Precondition(format!("{w} is not in K^perp")));
                            }
                            Ok(e)
                        })
                        .collect()
                };
                let us = parse_all(&q.boundary)?;
                let vs = parse_all(&q.solution)?;
                let ws = parse_all(&q.conjugators)?;
                let mut prod = Vec::new();
                if q.orientable {
                    for i in 0..q.genus {
                        prod.push(grp.commutator(&vs[2 * i], &vs[2 * i + 1]));
                    }
                } else {
                    prod.extend(vs.iter().map(|v| grp.pow(v, 2)));
                }
                prod.extend(us.iter().zip(&ws).map(|(u, w)| grp.conj(u, w)));
                let closing = grp.inv(&grp.product(prod.iter()));
                if let Some(given) = &q.closing {
                    let given = grp.parse(given)?;
                    if given != closing {
                        return Err(Error::Precondition(format!(
                            "closing word {} does not satisfy the quadratic identity (expected {})",
                            grp.format(&given),
                            grp.format(&closing)
                        )));
                    }
                }
                let boundaries = q.boundary.len() + 1;
                let euler = if q.orientable {
                    2 - 2 * q.genus as i64 - boundaries as i64
                } else {
                    2 - q.genus as i64 - boundaries as i64
                };
                let small = q.orientable && q.genus == 1 && q.boundary.is_empty();
                if euler > -2 && !small {
                    return Err(Error::Precondition(format!("surface has Euler characteristic {euler} > -2")));
                }
                let mut data: Vec<Elem> = us.clone();
                data.extend(vs.iter().cloned());
                data.extend(ws.iter().cloned());
                let non_abelian = data.iter().any(|a| data.iter().any(|b| !grp.commute(a, b)));
                if !non_abelian {
                    return Err(Error::Precondition("the words u, v, w generate an abelian subgroup".into()));
                }
                let c_gens: Vec<Elem> = spec
                    .k
                    .iter()
                    .map(|n| grp.gen(n).ok_or_else(|| Error::UnknownGenerator(n.clone())))
                    .collect::<Result<_>>()?;
                for c in &c_gens {
                    if let Some(p) = perp_gens.iter().find(|p| !grp.commute(c, p)) {
                        return Err(Error::Precondition(format!(
                            "{} does not centralise K^perp (fails on {})",
                            grp.format(c),
                            grp.format(p)
                        )));
                    }
                }
                let mut rho = vs.clone();
                rho.extend(ws.iter().cloned());
                let mut w_rel: Relator = Vec::new();
                let xs: Vec<Relator> = x_names.iter().map(|n| vec![(n.clone(), 1)]).collect();
                if q.orientable {
                    for i in 0..q.genus {
                        w_rel.extend(commutator_letters(&xs[2 * i], &xs[2 * i + 1]));
                    }
                } else {
                    for x in xs.iter().take(q.genus) {
                        w_rel.push((x[0].0.clone(), 2));
                    }
                }
                for (i, u) in us.iter().enumerate() {
                    let x = &xs[handles + i];
                    w_rel.extend(inverse_letters(x));
                    w_rel.extend(letters_of(&grp, u)?);
                    w_rel.extend(x.iter().cloned());
                }
                w_rel.extend(letters_of(&grp, &closing)?);
                (c_gens, None, rho, Some(closing), vec![w_rel])
            }
        };

        let mut relators = Vec::new();
        for c in &c_gens {
            let cl = letters_of(&grp, c)?;
            for x in &x_names {
                relators.push(commutator_letters(&cl, &[(x.clone(), 1)]));
            }
        }
        relators.extend(extra);
        self.floors.push(Floor { spec, layered, x_names, c_gens, relators, rho, group, closing });
        Ok(self.floors.last().expect("just pushed"))
    }

    fn rho_map(&self, level: usize) -> HashMap<String, Elem> {
        let f = &self.floors[level - 1];
        f.x_names.iter().cloned().zip(f.rho.iter().cloned()).collect()
    }

    /// Checks that the retraction onto level `level - 1` kills every relator
    /// of the floor, and for a2/b1 floors that the relators hold in G_level.
    pub fn retraction_check(&self, level: usize) -> Result<RetractionReport> {
        if level == 0 || level > self.height() {
            return Err(Error::Precondition(format!("level must be in 1..={}", self.height())));
        }
        let f = &self.floors[level - 1];
        let prev = self.group(level - 1).expect("floors sit on computable levels");
        let subst = self.rho_map(level);
        let mut report = RetractionReport { level, checked: 0, failed: None };
        for r in &f.relators {
            report.checked += 1;
            let img = eval_letters(&prev, r, &subst)?;
            if !prev.is_identity(&img) {
                report.failed = Some(json!({"relator": format_relator(r), "image": prev.format(&img)}));
                return Ok(report);
            }
            if let Some(g) = &f.group {
                let v = eval_letters(g, r, &HashMap::new())?;
                if !g.is_identity(&v) {
                    report.failed = Some(json!({"relator": format_relator(r), "value": g.format(&v)}));
                    return Ok(report);
                }
            }
        }
        Ok(report)
    }

    /// The amalgam G_(l-1) ∗_E V of the floor at `level`.
    pub fn floor_decomposition(&self, level: usize) -> Result<Value> {
        if level == 0 || level > self.height() {
            return Err(Error::Precondition(format!("level must be in 1..={}", self.height())));
        }
        let f = &self.floors[level - 1];
        let prev = self.group(level - 1).expect("computable");
        let c: Vec<String> = f.c_gens.iter().map(|x| prev.format(x)).collect();
        Ok(match f.spec.kind {
            FloorKind::A2Abelian | FloorKind::B1 => json!({
                "level": level,
                "tag": f.spec.kind.tag(),
                "lower": format!("G{}", level - 1),
                "vertex": { "centralizer": c, "free_abelian": f.x_names },
                "edge": { "generators": c, "rank": c.len() },
            }),
            FloorKind::C => {
                let q = f.spec.quadratic.as_ref().expect("quadratic data");
                json!({
                    "level": level,
                    "tag": "c",
                    "lower": format!("G{}", level - 1),
                    "vertex": {
                        "surface_generators": f.x_names,
                        "relator": format_relator(f.relators.last().expect("quadratic relator")),
                        "centralizer": c,
                        "boundary": q.boundary,
                    },
                    "edge": { "centralizer": c, "boundary": q.boundary },
                })
            }
        })
    }

    /// The tree of groups: the base clique tree, then one vertex and one
    /// abelian edge per floor, with the lower tower as a nested vertex.
    pub fn tree_decomposition(&self) -> Result<TreeOfGroups> {
        self.tree_at(self.height())
    }

    fn tree_at(&self, level: usize) -> Result<TreeOfGroups> {
        if level == 0 {
            return clique_tree(&self.base);
        }
        let f = &self.floors[level - 1];
        let prev = self.group(level - 1).expect("computable");
        let lower = TreeVertex::SubTower { height: level - 1, tree: Box::new(self.tree_at(level - 1)?) };
        let (vertex, edge_gens) = match f.spec.kind {
            FloorKind::A2Abelian | FloorKind::B1 => {
                let mut gens: Vec<String> = f.c_gens.iter().map(|x| prev.format(x)).collect();
                let edge = gens.clone();
                gens.extend(f.x_names.iter().cloned());
                (TreeVertex::FreeAbelian { rank: gens.len(), generators: gens }, edge)
            }
            FloorKind::C => {
                let q = f.spec.quadratic.as_ref().expect("quadratic data");
                let t = if q.boundary.is_empty() {
                    f.closing.clone().expect("closing word")
                } else {
                    let us = q.boundary.iter().map(|w| prev.parse(w)).collect::<Result<Vec<_>>>()?;
                    prev.product(us.iter())
                };
                let c = prev.abelian_centralizer(&t)?;
                let basis = prev.basis(&c);
                let edge: Vec<String> = basis.iter().map(|x| prev.format(x)).collect();
                let genus = q.genus + q.boundary.len().max(1) - 1;
                let o_rank = basis.len().saturating_sub(1);
                let mut gens = f.x_names.clone();
                gens.extend(edge.iter().skip(1).cloned());
                (
                    TreeVertex::AbelianTimesSurface { rank: o_rank, genus, orientable: q.orientable, generators: gens },
                    edge,
                )
            }
        };
        Ok(TreeOfGroups {
            vertices: vec![lower, vertex],
            edges: vec![TreeEdge { from: 0, to: 1, rank: edge_gens.len(), generators: edge_gens }],
        })
    }

    /// T* = G_(l-1) ∗_C (C × ⟨y⟩) with C = C(u_(m+1)), and ψ on the new
    /// generators, for the quadratic floor at `level`.
    pub fn embed_quadratic(&self, level: usize) -> Result<QuadraticEmbedding> {
        if level == 0 || level > self.height() {
            return Err(Error::Precondition(format!("level must be in 1..={}", self.height())));
        }
        let f = &self.floors[level - 1];
        if f.spec.kind != FloorKind::C {
            return Err(Error::Precondition(format!("floor {level} is not quadratic")));
        }
        let q = f.spec.quadratic.as_ref().expect("quadratic data");
        if !q.boundary.is_empty() {
            return Err(Error::Unsupported("embedding of surfaces with several boundary components".into()));
        }
        let prev = self.group(level - 1).expect("computable");
        let closing = f.closing.clone().expect("closing word");
        let mut taken = prev.names();
        taken.extend(f.x_names.iter().cloned());
        let mut y_name = "y".to_string();
        while taken.contains(&y_name) {
            y_name.push('\'');
        }
        let tstar = extend(&prev, &closing, 1, Some(vec![y_name.clone()]))?;
        let y = tstar.gen(&y_name).expect("new generator");
        let images: HashMap<String, Elem> = f
            .x_names
            .iter()
            .zip(&f.rho)
            .map(|(n, r)| (n.clone(), tstar.conj(&tstar.lift(r), &y)))
            .collect();
        Ok(QuadraticEmbedding { level, tstar, y_name, images, names: self.layer(level).graph.names().to_vec() })
    }

    pub fn describe(&self) -> Value {
        let floors: Vec<Value> = self
            .floors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                json!({
                    "level": i + 1,
                    "kind": f.spec.kind.tag(),
                    "k": f.spec.k,
                    "new_generators": f.x_names,
                    "relators": f.relators.iter().map(format_relator).collect::<Vec<_>>(),
                    "graph": f.layered.to_json(),
                })
            })
            .collect();
        json!({ "base": self.base.to_spec(), "height": self.height(), "floors": floors })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RetractionReport {
    pub level: usize,
    pub checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed: Option<Value>,
}

impl RetractionReport {
    pub fn passed(&self) -> bool {
        self.failed.is_none()
    }
}

/// ψ: G_l → T*, identity on G_(l-1) and `x ↦ ρ(x)^y` on the surface generators.
#[derive(Clone, Debug)]
pub struct QuadraticEmbedding {
    pub level: usize,
    pub tstar: Group,
    pub y_name: String,
    pub images: HashMap<String, Elem>,
    names: Vec<String>,
}

impl QuadraticEmbedding {
    /// ψ of a word over the generators of Γ_l.
    pub fn map(&self, letters: &[(String, i64)]) -> Result<Elem> {
        eval_letters(&self.tstar, letters, &self.images)
    }

    pub fn map_str(&self, s: &str) -> Result<Elem> {
        self.map(&words::parse_letters(s)?)
    }

    /// Random words over Γ_l whose images are nontrivial, each separated
    /// from 1 by a retraction of T*.
    pub fn spot_check(&self, samples: usize, len: usize, budget: i64, seed: u64) -> Result<Vec<(String, SeparationCertificate)>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        let mut attempts = 0;
        while out.len() < samples && attempts < 50 * samples.max(1) {
            attempts += 1;
            let letters: Relator = (0..len)
                .map(|_| {
                    let n = self.names[rng.gen_range(0..self.names.len())].clone();
                    (n, if rng.gen_bool(0.5) { 1 } else { -1 })
                })
                .collect();
            let img = self.map(&letters)?;
            if self.tstar.is_identity(&img) {
                continue;
            }
            out.push((format_relator(&letters), separate(&self.tstar, &img, budget)?));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeVertex {
    SubTower { height: usize, tree: Box<TreeOfGroups> },
    FreeAbelian { rank: usize, generators: Vec<String> },
    AbelianTimesSurface { rank: usize, genus: usize, orientable: bool, generators: Vec<String> },
}

impl TreeVertex {
    pub fn label(&self) -> String {
        match self {
            TreeVertex::SubTower { height, .. } => format!("G{height}"),
            TreeVertex::FreeAbelian { generators, .. } => format!("<{}>", generators.join(", ")),
            TreeVertex::AbelianTimesSurface { rank, genus, orientable, .. } => {
                let s = if *orientable { "orientable" } else { "non-orientable" };
                format!("Z^{rank} x surface({s}, genus {genus})")
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TreeEdge {
    pub from: usize,
    pub to: usize,
    pub rank: usize,
    pub generators: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TreeOfGroups {
    pub vertices: Vec<TreeVertex>,
    pub edges: Vec<TreeEdge>,
}

impl TreeOfGroups {
    /// Connected with one edge fewer than vertices, at every nesting depth.
    pub fn is_tree(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 || self.edges.len() + 1 != n {
            return false;
        }
        let mut uf = UnionFind::new(n);
        for e in &self.edges {
            if e.from >= n || e.to >= n || !uf.union(e.from, e.to) {
                return false;
            }
        }
        self.vertices.iter().all(|v| match v {
            TreeVertex::SubTower { tree, .. } => tree.is_tree(),
            _ => true,
        })
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serialisable")
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph tree {\n");
        let mut counter = 0;
        self.dot_into(&mut out, &mut counter, "");
        out.push_str("}\n");
        out
    }

    fn dot_into(&self, out: &mut String, counter: &mut usize, prefix: &str) -> Vec<String> {
        let mut ids = Vec::new();
        for v in &self.vertices {
            let id = format!("v{}", *counter);
            *counter += 1;
            match v {
                TreeVertex::SubTower { tree, .. } => {
                    out.push_str(&format!("  subgraph cluster_{id} {{\n  label=\"{}\";\n", v.label()));
                    tree.dot_into(out, counter, &format!("{prefix}{id}_"));
                    out.push_str(&format!("  {id} [shape=point];\n  }}\n"));
                }
                _ => out.push_str(&format!("  {id} [label=\"{}\"];\n", v.label())),
            }
            ids.push(id);
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  {} -- {} [label=\"<{}>\"];\n",
                ids[e.from],
                ids[e.to],
                e.generators.join(", ")
            ));
        }
        ids
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

/// Maximal cliques joined along a maximum-weight spanning tree of their
/// intersection graph; separators are the edge groups.
pub fn clique_tree(g: &Graph) -> Result<TreeOfGroups> {
    let cliques = g.maximal_cliques()?;
    let n = cliques.len();
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((cliques[i].intersection(&cliques[j]).count(), i, j));
        }
    }
    pairs.sort_by(|a, b| b.0.cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut uf = UnionFind::new(n);
    let mut edges = Vec::new();
    for (_, i, j) in pairs {
        if uf.union(i, j) {
            let sep: VertexSet = cliques[i].intersection(&cliques[j]).copied().collect();
            edges.push(TreeEdge { from: i, to: j, rank: sep.len(), generators: g.set_names(&sep) });
        }
    }
    let vertices = cliques
        .iter()
        .map(|c| TreeVertex::FreeAbelian { rank: c.len(), generators: g.set_names(c) })
        .collect();
    Ok(TreeOfGroups { vertices, edges })
}

/// Membership of every edge generator in both endpoint groups.
pub fn check_tree_edges(t: &Tower) -> Result<bool> {
    check_edges_at(t, t.height())
}

fn check_edges_at(t: &Tower, level: usize) -> Result<bool> {
    if level == 0 {
        let tree = clique_tree(&t.base)?;
        return Ok(tree.edges.iter().all(|e| {
            let gens_of = |v: &TreeVertex| match v {
                TreeVertex::FreeAbelian { generators, .. } => generators.clone(),
                _ => Vec::new(),
            };
            let a = gens_of(&tree.vertices[e.from]);
            let b = gens_of(&tree.vertices[e.to]);
            e.generators.iter().all(|x| a.contains(x) && b.contains(x))
        }));
    }
    if !check_edges_at(t, level - 1)? {
        return Ok(false);
    }
    let f = &t.floors[level - 1];
    match &f.group {
        Some(g) => Ok(f.c_gens.iter().all(|c| g.contains(&Sub::Factor, &g.lift(c)))),
        None => {
            let prev = t.group(level - 1).expect("computable");
            let closing = f.closing.clone().expect("closing word");
            Ok(prev.commute(&closing, &closing) && f.c_gens.iter().all(|c| prev.commute(c, &closing)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b1_spec() -> FloorSpec {
        FloorSpec { kind: FloorKind::B1, k: vec!["b".into()], u: Some("a c".into()), m: 2, names: None, quadratic: None }
    }

    #[test]
    fn orth_examples() {
        let lg = LayeredGraph::base(&Graph::p4());
        let g = &lg.graph;
        let b = g.vertex_set(&["b"]).unwrap();
        let o = orth(&lg, &b);
        assert_eq!(g.set_names(&o.perp), vec!["a", "c"]);
        assert_eq!(g.set_names(&o.closure), vec!["b"]);
        assert!(o.co_irreducible);
        let a = g.vertex_set(&["a"]).unwrap();
        let o = orth(&lg, &a);
        assert_eq!(g.set_names(&o.closure), vec!["a", "c"]);
        assert!(!o.co_irreducible);
        let k2 = LayeredGraph::base(&Graph::complete(&["a", "b"]));
        let o = orth(&k2, &k2.graph.vertex_set(&["a"]).unwrap());
        assert!(o.co_irreducible);
    }

    #[test]
    fn b1_floor_on_p4() {
        let mut t = Tower::new(&Graph::p4()).unwrap();
        t.add_floor(b1_spec()).unwrap();
        assert!(t.retraction_check(1).unwrap().passed());
        let d = t.floor_decomposition(1).unwrap();
        assert_eq!(d["tag"], "b1");
        assert_eq!(d["edge"]["rank"], 2);
        let tree = t.tree_decomposition().unwrap();
        assert!(tree.is_tree());
        assert!(matches!(tree.vertices[1], TreeVertex::FreeAbelian { rank: 4, .. }));
        assert_eq!(tree.edges[0].rank, 2);
        assert!(check_tree_edges(&t).unwrap());
    }

    #[test]
    fn p4_clique_tree() {
        let tree = clique_tree(&Graph::p4()).unwrap();
        assert!(tree.is_tree());
        assert_eq!(tree.vertices.len(), 3);
        let mut seps: Vec<Vec<String>> = tree.edges.iter().map(|e| e.generators.clone()).collect();
        seps.sort();
        assert_eq!(seps, vec![vec!["b".to_string()], vec!["c".to_string()]]);
    }

    #[test]
    fn quadratic_floor_on_p4() {
        let mut t = Tower::new(&Graph::p4()).unwrap();
        let q = QuadraticData {
            orientable: true,
            genus: 1,
            boundary: vec![],
            solution: vec!["a".into(), "c".into()],
            conjugators: vec![],
            closing: None,
        };
        t.add_floor(FloorSpec { kind: FloorKind::C, k: vec!["b".into()], u: None, m: 2, names: None, quadratic: Some(q) })
            .unwrap();
        assert!(t.retraction_check(1).unwrap().passed());
        let emb = t.embed_quadratic(1).unwrap();
        let x1 = emb.map_str("x1_1").unwrap();
        let expect = emb.tstar.parse("y^-1 a y").unwrap();
        assert_eq!(x1, expect);
        let w = emb.map(t.floors[0].relators.last().unwrap()).unwrap();
        assert!(emb.tstar.is_identity(&w));
        assert_eq!(emb.map_str("b").unwrap(), emb.tstar.parse("b").unwrap());
        let checks = emb.spot_check(5, 6, 64, 0).unwrap();
        assert_eq!(checks.len(), 5);

        let mut broken = t.clone();
        broken.floors[0].rho[0] = Group::raag(Graph::p4()).parse("d").unwrap();
        assert!(!broken.retraction_check(1).unwrap().passed());
    }
}
