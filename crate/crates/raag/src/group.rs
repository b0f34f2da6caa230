//! A uniform handle over a RAAG and towers of centraliser extensions built
//! on it, with elements, abelian subgroup descriptors and centralisers.

use std::cmp::Ordering;
use std::sync::Arc;

use rand::Rng;
use serde_json::{json, Value};

use crate::amalgam::{AmElem, Extension};
use crate::centralizers::{self, CentralizerKind};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::words::{self, Word};

/// A RAAG or a centraliser extension of another group.
#[derive(Clone, Debug)]
pub enum Group {
    Raag(Arc<Graph>),
    Ext(Arc<Extension>),
}

/// An element: a normal-form word in a RAAG or a reduced sequence in an
/// extension. Equal elements of one group have equal values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Elem {
    W(Word),
    X(Box<AmElem>),
}

impl Elem {
    pub fn word(&self) -> Option<&Word> {
        match self {
            Elem::W(w) => Some(w),
            Elem::X(_) => None,
        }
    }

    pub fn am(&self) -> Option<&AmElem> {
        match self {
            Elem::X(x) => Some(x),
            Elem::W(_) => None,
        }
    }

    /// Number of A-syllables, zero for words.
    pub fn syllable_length(&self) -> usize {
        match self {
            Elem::W(_) => 0,
            Elem::X(x) => x.a.len(),
        }
    }
}

impl Ord for Elem {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Elem::W(a), Elem::W(b)) => a.cmp(b),
            (Elem::X(a), Elem::X(b)) => a.cmp(b),
            (Elem::W(_), Elem::X(_)) => Ordering::Less,
            (Elem::X(_), Elem::W(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for Elem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Free abelian subgroups with an explicit basis and canonical coset
/// representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sub {
    /// ⟨z⟩ × ⟨o⟩ in a RAAG, `z` a root block commuting with the clique `o`.
    Para { z: Option<Word>, o: VertexSet },
    /// t · inner · t^-1.
    Conj { t: Elem, inner: Box<Sub> },
    /// A subgroup of the base of an extension.
    Lower(Box<Sub>),
    /// The vertex group B = C × A of an extension.
    Factor,
    /// ⟨z⟩ × o in an extension.
    Cyclic { z: Elem, o: Box<Sub> },
    /// The span of some basis elements of `parent`.
    Span { parent: Box<Sub>, idx: Vec<usize> },
}

/// Which case of the centraliser description applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum CentralizerCase {
    Raag(CentralizerKind),
    /// Conjugate of B = C × A.
    WholeB,
    /// ⟨C_H(u0), A⟩ for u0 ∈ C with non-abelian base centraliser.
    ZTimesOA,
    /// C_H(u0) for u0 in the base, not conjugate into C.
    BaseCentralizer,
    /// ⟨z⟩ × O′(z) for a cyclically reduced element of syllable length ≥ 1.
    CyclicTimesOPrime,
}

/// C(x) in a group: generators, and an exact descriptor when abelian.
#[derive(Clone, Debug)]
pub struct GroupCentralizer {
    pub case: CentralizerCase,
    pub conjugator: Elem,
    pub generators: Vec<Elem>,
    pub sub: Option<Sub>,
    pub z: Option<Elem>,
    pub o_prime: Vec<Elem>,
    pub inner: Option<Box<GroupCentralizer>>,
}

impl GroupCentralizer {
    pub fn is_abelian(&self) -> bool {
        self.sub.is_some()
    }
}

impl Group {
    pub fn raag(g: Graph) -> Group {
        Group::Raag(Arc::new(g))
    }

    /// The graph of the RAAG at the bottom of the tower.
    pub fn graph(&self) -> &Graph {
        match self {
            Group::Raag(g) => g,
            Group::Ext(e) => e.base.graph(),
        }
    }

    pub fn ext(&self) -> Option<&Extension> {
        match self {
            Group::Ext(e) => Some(e),
            Group::Raag(_) => None,
        }
    }

    /// Number of extensions above the RAAG.
    pub fn depth(&self) -> usize {
        match self {
            Group::Raag(_) => 0,
            Group::Ext(e) => 1 + e.base.depth(),
        }
    }

    pub fn identity(&self) -> Elem {
        match self {
            Group::Raag(_) => Elem::W(Word::identity()),
            Group::Ext(e) => Elem::X(Box::new(AmElem::identity(&e.base))),
        }
    }

    pub fn is_identity(&self, x: &Elem) -> bool {
        match x {
            Elem::W(w) => w.is_identity(),
            Elem::X(a) => a.a.is_empty() && self.ext().expect("extension element").base.is_identity(&a.g[0]),
        }
    }

    pub fn mul(&self, x: &Elem, y: &Elem) -> Elem {
        match self {
            Group::Raag(g) => Elem::W(words::mul(g, w_of(x), w_of(y))),
            Group::Ext(e) => Elem::X(Box::new(e.mul(x_of(x), x_of(y)))),
        }
    }

    pub fn product<'a>(&self, xs: impl IntoIterator<Item = &'a Elem>) -> Elem {
        match self {
            Group::Raag(g) => {
                let mut acc = Word::identity();
                for x in xs {
                    acc = acc.concat(w_of(x));
                }
                Elem::W(words::normalize(g, &acc))
            }
            Group::Ext(e) => {
                let items = xs.into_iter().flat_map(|x| x_of(x).items()).collect::<Vec<_>>();
                Elem::X(Box::new(e.reduce(items)))
            }
        }
    }

    pub fn inv(&self, x: &Elem) -> Elem {
        match self {
            Group::Raag(g) => Elem::W(words::inv(g, w_of(x))),
            Group::Ext(e) => Elem::X(Box::new(e.inv(x_of(x)))),
        }
    }

    pub fn pow(&self, x: &Elem, k: i64) -> Elem {
        match self {
            Group::Raag(g) => Elem::W(words::pow(g, w_of(x), k)),
            Group::Ext(_) => {
                let base = if k < 0 { self.inv(x) } else { x.clone() };
                let mut acc = self.identity();
                let mut sq = base;
                let mut n = k.unsigned_abs();
                while n > 0 {
                    if n & 1 == 1 {
                        acc = self.mul(&acc, &sq);
                    }
                    n >>= 1;
                    if n > 0 {
                        sq = self.mul(&sq, &sq);
                    }
                }
                acc
            }
        }
    }

    /// `h^-1 x h`.
    pub fn conj(&self, x: &Elem, h: &Elem) -> Elem {
        self.product([&self.inv(h), x, h])
    }

    /// `[x, y] = x^-1 y^-1 x y`.
    pub fn commutator(&self, x: &Elem, y: &Elem) -> Elem {
        self.product([&self.inv(x), &self.inv(y), x, y])
    }

    pub fn commute(&self, x: &Elem, y: &Elem) -> bool {
        self.mul(x, y) == self.mul(y, x)
    }

    /// All generator names: the RAAG's vertices, then each level's A names.
    pub fn names(&self) -> Vec<String> {
        match self {
            Group::Raag(g) => g.names().to_vec(),
            Group::Ext(e) => e.names().to_vec(),
        }
    }

    pub fn gen(&self, name: &str) -> Option<Elem> {
        match self {
            Group::Raag(g) => g.vertex(name).map(|x| Elem::W(Word::gen(x))),
            Group::Ext(e) => e.gen(name),
        }
    }

    pub fn generators(&self) -> Vec<Elem> {
        self.names().iter().map(|n| self.gen(n).expect("own generator")).collect()
    }

    /// Parses the word syntax over the group's generator names.
    pub fn parse(&self, s: &str) -> Result<Elem> {
        match self {
            Group::Raag(g) => Ok(Elem::W(words::word(g, s)?)),
            Group::Ext(_) => {
                let letters = words::parse_letters(s)?;
                let mut parts = Vec::with_capacity(letters.len());
                for (name, e) in letters {
                    let x = self.gen(&name).ok_or(Error::UnknownGenerator(name))?;
                    parts.push(self.pow(&x, e));
                }
                Ok(self.product(parts.iter()))
            }
        }
    }

    pub fn format(&self, x: &Elem) -> String {
        match self {
            Group::Raag(g) => w_of(x).format(g),
            Group::Ext(e) => e.format(x_of(x)),
        }
    }

    /// Words as `[["a", 1], ...]`; extension elements as the alternating list
    /// `["w1", [a1], "w2", ...]`.
    pub fn to_json(&self, x: &Elem) -> Value {
        match self {
            Group::Raag(g) => w_of(x).to_json(g),
            Group::Ext(e) => {
                let x = x_of(x);
                let mut out = Vec::new();
                for i in 0..x.a.len() {
                    out.push(json!(e.base.format(&x.g[i])));
                    out.push(json!(x.a[i]));
                }
                out.push(json!(e.base.format(&x.g[x.a.len()])));
                Value::Array(out)
            }
        }
    }

    pub fn from_json(&self, v: &Value) -> Result<Elem> {
        match self {
            Group::Raag(g) => Ok(Elem::W(words::normalize(g, &Word::from_json(g, v)?))),
            Group::Ext(e) => {
                let Value::Array(items) = v else {
                    return Err(Error::Parse("element must be a JSON array".into()));
                };
                let mut parts = Vec::new();
                for (i, item) in items.iter().enumerate() {
                    if i % 2 == 0 {
                        let s = item.as_str().ok_or_else(|| Error::Parse("expected a word string".into()))?;
                        parts.push(crate::amalgam::Item::G(e.base.parse(s)?));
                    } else {
                        let vec: Vec<i64> = serde_json::from_value(item.clone())
                            .map_err(|err| Error::Parse(format!("A-vector: {err}")))?;
                        if vec.len() != e.a_rank() {
                            return Err(Error::Parse(format!(
                                "A-vector of length {} in an extension of rank {}",
                                vec.len(),
                                e.a_rank()
                            )));
                        }
                        parts.push(crate::amalgam::Item::A(vec));
                    }
                }
                Ok(Elem::X(Box::new(e.reduce(parts))))
            }
        }
    }

    /// The element as one of the base group, when it lies there.
    pub fn lower(&self, x: &Elem) -> Option<Elem> {
        match (self, x) {
            (Group::Ext(_), Elem::X(a)) if a.a.is_empty() => Some(a.g[0].clone()),
            _ => None,
        }
    }

    pub fn base(&self) -> Option<&Group> {
        self.ext().map(|e| &e.base)
    }

    /// Embeds an element of the base group (identity on a RAAG).
    pub fn lift(&self, x: &Elem) -> Elem {
        match self {
            Group::Raag(_) => x.clone(),
            Group::Ext(e) => Elem::X(Box::new(e.reduce(vec![crate::amalgam::Item::G(x.clone())]))),
        }
    }

    /// Embeds an element of the group `levels` extensions below.
    pub fn lift_from(&self, levels: usize, x: &Elem) -> Elem {
        if levels == 0 {
            return x.clone();
        }
        match self {
            Group::Raag(_) => x.clone(),
            Group::Ext(e) => self.lift(&e.base.lift_from(levels - 1, x)),
        }
    }

    /// `(rep, part)` with `x = rep · part`, `part ∈ s` and `rep` depending only
    /// on the coset `x·s`; `rep = 1` iff `x ∈ s`.
    pub fn split(&self, x: &Elem, s: &Sub) -> (Elem, Elem) {
        let rep = self.coset_rep(x, s);
        let part = self.mul(&self.inv(&rep), x);
        (rep, part)
    }

    pub(crate) fn coset_rep(&self, x: &Elem, s: &Sub) -> Elem {
        match s {
            Sub::Conj { t, inner } => {
                let a = self.coset_rep(&self.mul(x, t), inner);
                let b = self.coset_rep(t, inner);
                self.mul(&a, &self.inv(&b))
            }
            Sub::Span { parent, idx } => {
                let (r, c) = self.split(x, parent);
                let coords = self.coords(parent, &c).expect("part lies in the parent");
                let basis = self.basis(parent);
                let outside: Vec<Elem> = (0..basis.len())
                    .filter(|i| !idx.contains(i))
                    .map(|i| self.pow(&basis[i], coords[i]))
                    .collect();
                let mut all = vec![r];
                all.extend(outside);
                self.product(all.iter())
            }
            Sub::Para { z, o } => {
                let Group::Raag(g) = self else { panic!("parabolic descriptor outside a RAAG") };
                Elem::W(para_rep(g, w_of(x), z.as_ref(), o))
            }
            Sub::Lower(_) | Sub::Factor | Sub::Cyclic { .. } => {
                let Group::Ext(e) = self else { panic!("extension descriptor in a RAAG") };
                e.coset_rep(self, x_of(x), s)
            }
        }
    }

    pub fn contains(&self, s: &Sub, x: &Elem) -> bool {
        self.is_identity(&self.coset_rep(x, s))
    }

    /// Coordinates of `x ∈ s` in [`Group::basis`].
    pub fn coords(&self, s: &Sub, x: &Elem) -> Option<Vec<i64>> {
        match s {
            Sub::Para { z, o } => {
                let Group::Raag(g) = self else { return None };
                let w = w_of(x);
                if !self.contains(s, x) {
                    return None;
                }
                let mut out = Vec::new();
                if let Some(z) = z {
                    let zp = words::normalize(g, &w.project(&z.support()));
                    let k = (zp.len() / z.len()) as i64;
                    out.push(if zp.is_identity() || words::pow(g, z, k) == zp { k } else { -k });
                }
                for &v in o {
                    out.push(w.0.iter().filter(|(y, _)| *y == v).map(|(_, e)| e).sum());
                }
                Some(out)
            }
            Sub::Conj { t, inner } => self.coords(inner, &self.conj(x, t)),
            Sub::Span { parent, idx } => {
                let c = self.coords(parent, x)?;
                if (0..c.len()).any(|i| !idx.contains(&i) && c[i] != 0) {
                    return None;
                }
                Some(idx.iter().map(|&i| c[i]).collect())
            }
            Sub::Lower(_) | Sub::Factor | Sub::Cyclic { .. } => {
                let Group::Ext(e) = self else { return None };
                e.coords(self, s, x_of(x))
            }
        }
    }

    pub fn basis(&self, s: &Sub) -> Vec<Elem> {
        match s {
            Sub::Para { z, o } => {
                let mut out: Vec<Elem> = z.iter().map(|z| Elem::W(z.clone())).collect();
                out.extend(o.iter().map(|&v| Elem::W(Word::gen(v))));
                out
            }
            Sub::Conj { t, inner } => {
                let t_inv = self.inv(t);
                self.basis(inner).iter().map(|b| self.conj(b, &t_inv)).collect()
            }
            Sub::Span { parent, idx } => {
                let b = self.basis(parent);
                idx.iter().map(|&i| b[i].clone()).collect()
            }
            Sub::Lower(inner) => {
                let e = self.ext().expect("extension");
                e.base.basis(inner).iter().map(|b| self.lift(b)).collect()
            }
            Sub::Factor => {
                let e = self.ext().expect("extension");
                let mut out: Vec<Elem> = e.c_basis.iter().map(|b| self.lift(b)).collect();
                out.extend((0..e.a_rank()).map(|i| e.a_unit(i)));
                out
            }
            Sub::Cyclic { z, o } => {
                let mut out = vec![z.clone()];
                out.extend(self.basis(o));
                out
            }
        }
    }

    /// Element of `s` with the given coordinates.
    pub fn from_coords(&self, s: &Sub, coords: &[i64]) -> Elem {
        let basis = self.basis(s);
        let parts: Vec<Elem> = basis.iter().zip(coords).map(|(b, &k)| self.pow(b, k)).collect();
        self.product(parts.iter())
    }

    pub fn describe(&self, s: &Sub) -> String {
        let basis: Vec<String> = self.basis(s).iter().map(|b| self.format(b)).collect();
        format!("⟨{}⟩", basis.join(", "))
    }

    /// `(core, t)` with `x = t · core · t^-1` and `core` cyclically reduced.
    pub fn cyclic_reduce(&self, x: &Elem) -> (Elem, Elem) {
        match self {
            Group::Raag(g) => {
                let (c, t) = words::cyclic_reduce(g, w_of(x));
                (Elem::W(c), Elem::W(t))
            }
            Group::Ext(e) => e.cyclic_reduce(self, x_of(x)),
        }
    }

    /// Unique root and multiplicity.
    pub fn root(&self, x: &Elem) -> Result<(Elem, u64)> {
        match self {
            Group::Raag(g) => {
                let (r, m) = words::root(g, w_of(x))?;
                Ok((Elem::W(r), m))
            }
            Group::Ext(e) => e.root(self, x_of(x)),
        }
    }

    /// The `k`-th root of `x` if it exists.
    pub fn kth_root(&self, x: &Elem, k: u64) -> Result<Option<Elem>> {
        if self.is_identity(x) {
            return Ok(Some(x.clone()));
        }
        let (r, m) = self.root(x)?;
        if m % k == 0 {
            Ok(Some(self.pow(&r, (m / k) as i64)))
        } else {
            Ok(None)
        }
    }

    /// Some `t` with `t^-1 x t ∈ s`, searched over cyclic conjugates.
    pub fn conj_into(&self, x: &Elem, s: &Sub) -> Result<Option<Elem>> {
        if let Sub::Conj { t: t0, inner } = s {
            let t0_inv = self.inv(t0);
            return Ok(self.conj_into(x, inner)?.map(|t| self.mul(&t, &t0_inv)));
        }
        match self {
            Group::Raag(g) => {
                let (core, c) = words::cyclic_reduce(g, w_of(x));
                for (v, ps) in words::cyclic_conjugates(g, &core, centralizers::CONJUGATE_LIMIT)? {
                    if self.contains(s, &Elem::W(v)) {
                        return Ok(Some(Elem::W(words::mul(g, &c, &ps[0]))));
                    }
                }
                Ok(None)
            }
            Group::Ext(e) => e.conj_into(self, x_of(x), s),
        }
    }

    pub fn centralizer(&self, x: &Elem) -> Result<GroupCentralizer> {
        if self.is_identity(x) {
            return Err(Error::Identity("centraliser description"));
        }
        match self {
            Group::Raag(g) => {
                let c = centralizers::centralizer(g, w_of(x))?;
                let sub = if c.is_abelian() { Some(raag_sub(&c)) } else { None };
                Ok(GroupCentralizer {
                    case: CentralizerCase::Raag(c.kind),
                    conjugator: Elem::W(c.conjugator.clone()),
                    generators: c.generators(g).into_iter().map(Elem::W).collect(),
                    sub,
                    z: c.root.clone().map(Elem::W),
                    o_prime: Vec::new(),
                    inner: None,
                })
            }
            Group::Ext(e) => e.centralizer(self, x_of(x)),
        }
    }

    /// C(x) as a subgroup descriptor; fails when C(x) is non-abelian.
    pub fn abelian_centralizer(&self, x: &Elem) -> Result<Sub> {
        self.centralizer(x)?
            .sub
            .ok_or_else(|| Error::NonAbelianCentralizer(self.format(x)))
    }

    /// Product of `len` random generators and inverses.
    pub fn random_elem(&self, rng: &mut impl Rng, len: usize) -> Elem {
        let gens = self.generators();
        let parts: Vec<Elem> = (0..len)
            .map(|_| {
                let x = &gens[rng.gen_range(0..gens.len())];
                if rng.gen_bool(0.5) {
                    x.clone()
                } else {
                    self.inv(x)
                }
            })
            .collect();
        self.product(parts.iter())
    }
}

pub(crate) fn w_of(x: &Elem) -> &Word {
    x.word().expect("RAAG element")
}

pub(crate) fn x_of(x: &Elem) -> &AmElem {
    x.am().expect("extension element")
}

/// Descriptor of an abelian RAAG centraliser.
pub fn raag_sub(c: &centralizers::Centralizer) -> Sub {
    let inner = match c.kind {
        CentralizerKind::AbelianNonCanonical => Sub::Para { z: c.root.clone(), o: c.o_part.clone() },
        _ => Sub::Para { z: None, o: c.z_set.union(&c.o_part).copied().collect() },
    };
    if c.conjugator.is_identity() {
        inner
    } else {
        Sub::Conj { t: Elem::W(c.conjugator.clone()), inner: Box::new(inner) }
    }
}

/// Removes trailing syllables in `o` until none is left.
pub fn strip_tail(g: &Graph, w: &Word, o: &VertexSet) -> Word {
    let mut w = w.clone();
    loop {
        let lasts = words::last_syllables(g, &w);
        let Some(&i) = lasts.iter().find(|&&i| o.contains(&w.0[i].0)) else {
            return w;
        };
        w.0.remove(i);
        w = words::normalize(g, &w);
    }
}

fn para_rep(g: &Graph, w: &Word, z: Option<&Word>, o: &VertexSet) -> Word {
    let Some(z) = z else {
        return strip_tail(g, w, o);
    };
    let bound = (2 * w.len() / z.len().max(1) + 1) as i64;
    (-bound..=bound)
        .map(|k| strip_tail(g, &words::mul(g, w, &words::pow(g, z, -k)), o))
        .min()
        .expect("nonempty range")
}
