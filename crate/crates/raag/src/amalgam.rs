//! Centraliser extensions G(u, B) = G ∗_C B with C = C_G(u) abelian and
//! B = C × A, A free abelian. Elements are kept in a canonical reduced form
//! `w1 a1 w2 … an w(n+1)` so equality is equality of values.

use std::cmp::Ordering;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphSpec};
use crate::group::{x_of, CentralizerCase, Elem, Group, GroupCentralizer, Sub};
use crate::words;

/// Reduced form: `g.len() == a.len() + 1`, every `a[i]` nonzero, every
/// interior `g[i]` outside C, and `g[i]` (`i < n`) a canonical C-coset representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AmElem {
    pub g: Vec<Elem>,
    pub a: Vec<Vec<i64>>,
}

impl AmElem {
    pub fn identity(base: &Group) -> AmElem {
        AmElem { g: vec![base.identity()], a: Vec::new() }
    }

    pub fn items(&self) -> Vec<Item> {
        let mut out = Vec::with_capacity(2 * self.a.len() + 1);
        for i in 0..self.a.len() {
            out.push(Item::G(self.g[i].clone()));
            out.push(Item::A(self.a[i].clone()));
        }
        out.push(Item::G(self.g[self.a.len()].clone()));
        out
    }

    pub fn last(&self) -> &Elem {
        &self.g[self.a.len()]
    }
}

impl Ord for AmElem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.a
            .len()
            .cmp(&other.a.len())
            .then_with(|| self.g.cmp(&other.g))
            .then_with(|| self.a.cmp(&other.a))
    }
}

impl PartialOrd for AmElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A raw syllable: a base element or an A-vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    G(Elem),
    A(Vec<i64>),
}

#[derive(Debug)]
pub struct Extension {
    pub base: Group,
    pub u: Elem,
    pub c: Sub,
    pub c_basis: Vec<Elem>,
    pub a_names: Vec<String>,
    names: Vec<String>,
}

/// Extends the abelian centraliser C_base(u) by a free abelian group of rank
/// `a_rank`. Default A names are `s` (rank 1) or `s1, s2, …`.
pub fn extend(base: &Group, u: &Elem, a_rank: usize, a_names: Option<Vec<String>>) -> Result<Group> {
    if a_rank == 0 {
        return Err(Error::Precondition("a_rank must be positive".into()));
    }
    if base.is_identity(u) {
        return Err(Error::Identity("centraliser extension"));
    }
    let c = base.abelian_centralizer(u)?;
    let c_basis = base.basis(&c);
    let a_names = a_names.unwrap_or_else(|| {
        if a_rank == 1 {
            vec!["s".to_string()]
        } else {
            (1..=a_rank).map(|i| format!("s{i}")).collect()
        }
    });
    if a_names.len() != a_rank {
        return Err(Error::Precondition(format!(
            "{} A names given for rank {a_rank}",
            a_names.len()
        )));
    }
    let mut names = base.names();
    for n in &a_names {
        if !words::is_identifier(n) {
            return Err(Error::Parse(format!("bad generator name {n:?}")));
        }
        if names.contains(n) {
            return Err(Error::NameClash(n.clone()));
        }
        names.push(n.clone());
    }
    Ok(Group::Ext(Arc::new(Extension { base: base.clone(), u: u.clone(), c, c_basis, a_names, names })))
}

/// A base group: a graph, or another extension.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Graph(GraphSpec),
    Extension(Box<ExtensionSpec>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtensionSpec {
    pub base: GroupRef,
    pub u: String,
    #[serde(default = "one")]
    pub a_rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_names: Option<Vec<String>>,
}

fn one() -> usize {
    1
}

impl GroupRef {
    pub fn build(&self) -> Result<Group> {
        match self {
            GroupRef::Graph(g) => {
                let g = Graph::from_spec(g)?;
                if !g.is_chordal().0 {
                    return Err(Error::NotChordal);
                }
                Ok(Group::raag(g))
            }
            GroupRef::Extension(e) => e.build(),
        }
    }
}

impl ExtensionSpec {
    pub fn build(&self) -> Result<Group> {
        let base = self.base.build()?;
        let u = base.parse(&self.u)?;
        extend(&base, &u, self.a_rank, self.a_names.clone())
    }
}

fn is_zero(v: &[i64]) -> bool {
    v.iter().all(|&c| c == 0)
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl Extension {
    pub fn a_rank(&self) -> usize {
        self.a_names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn a_unit(&self, i: usize) -> Elem {
        let mut v = vec![0; self.a_rank()];
        v[i] = 1;
        self.a_elem(v)
    }

    pub fn a_elem(&self, v: Vec<i64>) -> Elem {
        Elem::X(Box::new(self.reduce(vec![Item::A(v)])))
    }

    pub fn gen(&self, name: &str) -> Option<Elem> {
        if let Some(i) = self.a_names.iter().position(|n| n == name) {
            return Some(self.a_unit(i));
        }
        let b = self.base.gen(name)?;
        Some(Elem::X(Box::new(self.reduce(vec![Item::G(b)]))))
    }

    /// Is the base element in C?
    pub fn in_c(&self, x: &Elem) -> bool {
        self.base.contains(&self.c, x)
    }

    /// Reduced canonical form of a raw product.
    pub fn reduce(&self, items: Vec<Item>) -> AmElem {
        let base = &self.base;
        let mut gs = vec![base.identity()];
        let mut av: Vec<Vec<i64>> = Vec::new();
        for item in items {
            match item {
                Item::G(x) => {
                    let last = gs.last_mut().expect("nonempty");
                    *last = base.mul(last, &x);
                }
                Item::A(v) => {
                    if is_zero(&v) {
                        continue;
                    }
                    if !av.is_empty() && self.in_c(gs.last().expect("nonempty")) {
                        let c = gs.pop().expect("nonempty");
                        let prev = av.pop().expect("nonempty");
                        let sum = add(&prev, &v);
                        let last = gs.last_mut().expect("nonempty");
                        *last = base.mul(last, &c);
                        if !is_zero(&sum) {
                            av.push(sum);
                            gs.push(base.identity());
                        }
                    } else {
                        av.push(v);
                        gs.push(base.identity());
                    }
                }
            }
        }
        for i in 0..av.len() {
            let (r, c) = base.split(&gs[i], &self.c);
            gs[i] = r;
            gs[i + 1] = base.mul(&c, &gs[i + 1]);
        }
        AmElem { g: gs, a: av }
    }

    pub fn mul(&self, x: &AmElem, y: &AmElem) -> AmElem {
        let mut items = x.items();
        items.extend(y.items());
        self.reduce(items)
    }

    pub fn inv(&self, x: &AmElem) -> AmElem {
        let n = x.a.len();
        let mut items = Vec::with_capacity(2 * n + 1);
        for i in (0..n).rev() {
            items.push(Item::G(self.base.inv(&x.g[i + 1])));
            items.push(Item::A(x.a[i].iter().map(|c| -c).collect()));
        }
        items.push(Item::G(self.base.inv(&x.g[0])));
        self.reduce(items)
    }

    pub fn format_vector(&self, v: &[i64]) -> String {
        v.iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| if c == 1 { self.a_names[i].clone() } else { format!("{}^{}", self.a_names[i], c) })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn format(&self, x: &AmElem) -> String {
        let mut parts = Vec::new();
        for (i, g) in x.g.iter().enumerate() {
            if !self.base.is_identity(g) {
                let s = self.base.format(g);
                parts.push(if x.g.len() > 1 && s.contains(' ') { format!("({s})") } else { s });
            }
            if i < x.a.len() {
                parts.push(self.format_vector(&x.a[i]));
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" ")
        }
    }

    pub fn describe(&self) -> Value {
        json!({
            "u": self.base.format(&self.u),
            "c_basis": self.c_basis.iter().map(|b| self.base.format(b)).collect::<Vec<_>>(),
            "a_names": self.a_names,
            "a_rank": self.a_rank(),
        })
    }

    pub(crate) fn coset_rep(&self, me: &Group, x: &AmElem, s: &Sub) -> Elem {
        let n = x.a.len();
        match s {
            Sub::Lower(d) => {
                let (r, _) = self.base.split(x.last(), d);
                let mut y = x.clone();
                y.g[n] = r;
                Elem::X(Box::new(y))
            }
            Sub::Factor => {
                let (r, _) = self.base.split(x.last(), &self.c);
                let mut y = x.clone();
                if self.base.is_identity(&r) && n >= 1 {
                    y.g.pop();
                    y.a.pop();
                } else {
                    y.g[n] = r;
                }
                Elem::X(Box::new(y))
            }
            Sub::Cyclic { z, o } => {
                let xe = Elem::X(Box::new(x.clone()));
                let bound = (2 * n + 2) as i64;
                let z_inv = me.inv(z);
                let mut best: Option<Elem> = None;
                let mut cur = me.pow(&z_inv, bound + 1);
                let z_step = z.clone();
                for _ in -bound..=bound {
                    cur = me.mul(&cur, &z_step);
                    let cand = me.coset_rep(&me.mul(&xe, &cur), o);
                    if best.as_ref().is_none_or(|b| cand < *b) {
                        best = Some(cand);
                    }
                }
                best.expect("nonempty range")
            }
            _ => unreachable!("handled generically"),
        }
    }

    pub(crate) fn coords(&self, me: &Group, s: &Sub, x: &AmElem) -> Option<Vec<i64>> {
        match s {
            Sub::Lower(d) => {
                if !x.a.is_empty() {
                    return None;
                }
                self.base.coords(d, &x.g[0])
            }
            Sub::Factor => {
                let (c, a) = match x.a.len() {
                    0 => (x.g[0].clone(), vec![0; self.a_rank()]),
                    1 if self.base.is_identity(&x.g[0]) => (x.g[1].clone(), x.a[0].clone()),
                    _ => return None,
                };
                let mut out = self.base.coords(&self.c, &c)?;
                out.extend(a);
                Some(out)
            }
            Sub::Cyclic { z, o } => {
                let xe = Elem::X(Box::new(x.clone()));
                if !me.contains(s, &xe) {
                    return None;
                }
                let bound = (2 * x.a.len() + 2) as i64;
                for k in 0..=bound {
                    for k in [k, -k] {
                        let rest = me.mul(&xe, &me.pow(z, -k));
                        if me.contains(o, &rest) {
                            let mut out = vec![k];
                            out.extend(me.coords(o, &rest)?);
                            return Some(out);
                        }
                    }
                }
                None
            }
            _ => unreachable!("handled generically"),
        }
    }

    /// `(y, t)` with `x = t y t^-1` and `y` of one of the shapes: a base
    /// element, an element `a c` of B, or `a1 g1 … an gn` with every
    /// `gi ∉ C`.
    pub(crate) fn cyclic_reduce(&self, me: &Group, x: &AmElem) -> (Elem, Elem) {
        let mut y = Elem::X(Box::new(x.clone()));
        let mut t = me.identity();
        loop {
            let ya = x_of(&y).clone();
            let n = ya.a.len();
            if n == 0 {
                let (core, c) = self.base.cyclic_reduce(&ya.g[0]);
                return (me.lift(&core), me.mul(&t, &me.lift(&c)));
            }
            let g0 = ya.g[0].clone();
            let wrap = self.base.mul(ya.last(), &g0);
            let h = if self.in_c(&wrap) && n >= 2 {
                Elem::X(Box::new(self.reduce(vec![Item::G(g0), Item::A(ya.a[0].clone())])))
            } else if self.base.is_identity(&g0) {
                return (y, t);
            } else {
                me.lift(&g0)
            };
            y = me.conj(&y, &h);
            t = me.mul(&t, &h);
        }
    }

    fn is_b_shape(&self, y: &AmElem) -> bool {
        y.a.len() == 1 && self.base.is_identity(&y.g[0]) && self.in_c(y.last())
    }

    /// Retraction to the base killing A.
    pub fn kill_a(&self, x: &AmElem) -> Elem {
        self.base.product(x.g.iter())
    }

    pub(crate) fn root(&self, me: &Group, x: &AmElem) -> Result<(Elem, u64)> {
        let xe = Elem::X(Box::new(x.clone()));
        if me.is_identity(&xe) {
            return Err(Error::Identity("root"));
        }
        let (y, t) = self.cyclic_reduce(me, x);
        let t_inv = me.inv(&t);
        let ya = x_of(&y);
        let n = ya.a.len();
        if n == 0 {
            let (r, m) = self.base.root(&ya.g[0])?;
            return Ok((me.conj(&me.lift(&r), &t_inv), m));
        }
        if self.is_b_shape(ya) {
            let coords = me.coords(&Sub::Factor, &y).expect("element of B");
            let m = coords.iter().fold(0u64, |acc, c| gcd(acc, c.unsigned_abs()));
            let reduced: Vec<i64> = coords.iter().map(|c| c / m as i64).collect();
            let r = me.from_coords(&Sub::Factor, &reduced);
            return Ok((me.conj(&r, &t_inv), m));
        }
        let whole = self.kill_a(ya);
        for k in (2..=n).rev().filter(|k| n.is_multiple_of(*k)) {
            let p = n / k;
            if (p..n).any(|i| ya.a[i] != ya.a[i - p]) {
                continue;
            }
            let Some(lam_root) = self.base.kth_root(&whole, k as u64)? else {
                continue;
            };
            let mut items = Vec::new();
            for i in 0..p {
                items.push(Item::A(ya.a[i].clone()));
                items.push(Item::G(ya.g[i + 1].clone()));
            }
            let q = self.reduce(items);
            let tail = self.base.mul(&self.base.inv(&self.kill_a(&q)), &lam_root);
            let cand = me.mul(&Elem::X(Box::new(q)), &me.lift(&tail));
            if me.pow(&cand, k as i64) == y {
                return Ok((me.conj(&cand, &t_inv), k as u64));
            }
        }
        Ok((xe, 1))
    }

    pub(crate) fn conj_into(&self, me: &Group, x: &AmElem, s: &Sub) -> Result<Option<Elem>> {
        let (y, t) = self.cyclic_reduce(me, x);
        let ya = x_of(&y).clone();
        let n = ya.a.len();
        if n == 0 {
            let inner = match s {
                Sub::Lower(d) => Some(d.as_ref()),
                Sub::Factor => Some(&self.c),
                _ => None,
            };
            if let Some(d) = inner {
                if let Some(sb) = self.base.conj_into(&ya.g[0], d)? {
                    return Ok(Some(me.mul(&t, &me.lift(&sb))));
                }
                return Ok(None);
            }
        }
        let mut p = me.identity();
        let mut cand = y.clone();
        for i in 0..=n {
            if me.contains(s, &cand) {
                return Ok(Some(me.mul(&t, &p)));
            }
            if i == n {
                break;
            }
            let step = Elem::X(Box::new(self.reduce(vec![Item::A(ya.a[i].clone()), Item::G(ya.g[i + 1].clone())])));
            p = me.mul(&p, &step);
            cand = me.conj(&y, &p);
        }
        Ok(None)
    }

    pub(crate) fn centralizer(&self, me: &Group, x: &AmElem) -> Result<GroupCentralizer> {
        let (y, t) = self.cyclic_reduce(me, x);
        let ya = x_of(&y).clone();
        let n = ya.a.len();
        let t_inv = me.inv(&t);
        let conj_all = |gens: Vec<Elem>, t: &Elem| -> Vec<Elem> {
            let t_inv = me.inv(t);
            gens.iter().map(|q| me.conj(q, &t_inv)).collect()
        };
        let whole_b = |t: Elem| GroupCentralizer {
            case: CentralizerCase::WholeB,
            generators: conj_all(me.basis(&Sub::Factor), &t),
            sub: Some(wrap_conj(me, &t, Sub::Factor)),
            conjugator: t,
            z: None,
            o_prime: Vec::new(),
            inner: None,
        };
        if n == 0 {
            let u0 = &ya.g[0];
            if let Some(s) = self.base.conj_into(u0, &self.c)? {
                let u1 = self.base.conj(u0, &s);
                let t2 = me.mul(&t, &me.lift(&s));
                let cb = self.base.centralizer(&u1)?;
                if cb.is_abelian() {
                    return Ok(whole_b(t2));
                }
                let mut gens: Vec<Elem> = cb.generators.iter().map(|q| me.lift(q)).collect();
                gens.extend((0..self.a_rank()).map(|i| self.a_unit(i)));
                return Ok(GroupCentralizer {
                    case: CentralizerCase::ZTimesOA,
                    generators: conj_all(gens, &t2),
                    sub: None,
                    conjugator: t2,
                    z: None,
                    o_prime: Vec::new(),
                    inner: Some(Box::new(cb)),
                });
            }
            let cb = self.base.centralizer(u0)?;
            let gens: Vec<Elem> = cb.generators.iter().map(|q| me.lift(q)).collect();
            return Ok(GroupCentralizer {
                case: CentralizerCase::BaseCentralizer,
                generators: conj_all(gens, &t),
                sub: cb.sub.clone().map(|s| wrap_conj(me, &t, Sub::Lower(Box::new(s)))),
                conjugator: t,
                z: None,
                o_prime: Vec::new(),
                inner: Some(Box::new(cb)),
            });
        }
        if self.is_b_shape(&ya) {
            return Ok(whole_b(t));
        }
        let (z, _) = self.root(me, &ya)?;
        let idx: Vec<usize> = (0..self.c_basis.len())
            .filter(|&i| ya.g.iter().all(|g| self.base.commute(&self.c_basis[i], g)))
            .collect();
        let o = Sub::Lower(Box::new(Sub::Span { parent: Box::new(self.c.clone()), idx }));
        let o_prime: Vec<Elem> = me.basis(&o);
        let sub = Sub::Cyclic { z: z.clone(), o: Box::new(o) };
        let mut gens = vec![z.clone()];
        gens.extend(o_prime.iter().cloned());
        Ok(GroupCentralizer {
            case: CentralizerCase::CyclicTimesOPrime,
            generators: gens.iter().map(|q| me.conj(q, &t_inv)).collect(),
            sub: Some(wrap_conj(me, &t, sub)),
            conjugator: t,
            z: Some(z),
            o_prime,
            inner: None,
        })
    }
}

fn wrap_conj(me: &Group, t: &Elem, s: Sub) -> Sub {
    if me.is_identity(t) {
        s
    } else {
        Sub::Conj { t: t.clone(), inner: Box::new(s) }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn f2_ext() -> Group {
        let f2 = Group::raag(Graph::edgeless(&["x", "y"]));
        let x = f2.parse("x").unwrap();
        extend(&f2, &x, 1, Some(vec!["s".into()])).unwrap()
    }

    #[test]
    fn reduction_examples() {
        let g = f2_ext();
        assert_eq!(g.format(&g.parse("s x s^-1").unwrap()), "x");
        let e = g.parse("y s y^-1 s^-1").unwrap();
        assert_eq!(e.syllable_length(), 2);
        assert!(!g.is_identity(&e));
        let xs = g.parse("x s").unwrap();
        assert_eq!(x_of(&xs).g[0], x_of(&g.parse("1").unwrap()).g[0]);
        assert_eq!(g.parse("x s").unwrap(), g.parse("s x").unwrap());
        assert_ne!(g.parse("y s").unwrap(), g.parse("s y").unwrap());
    }

    #[test]
    fn non_abelian_centralizer_rejected() {
        let p4 = Group::raag(Graph::p4());
        let b = p4.parse("b").unwrap();
        assert!(matches!(extend(&p4, &b, 1, None), Err(Error::NonAbelianCentralizer(_))));
    }

    #[test]
    fn p4_extension() {
        let p4 = Group::raag(Graph::p4());
        let u = p4.parse("a c").unwrap();
        let g = extend(&p4, &u, 2, Some(vec!["x1".into(), "x2".into()])).unwrap();
        assert_eq!(g.parse("b x1").unwrap(), g.parse("x1 b").unwrap());
        assert_ne!(g.parse("a x1").unwrap(), g.parse("x1 a").unwrap());
        assert_eq!(g.parse("a c x1 c^-1 a^-1").unwrap(), g.parse("x1").unwrap());
    }

    #[test]
    fn extension_centralizers() {
        let g = f2_ext();
        let c = g.centralizer(&g.parse("x").unwrap()).unwrap();
        assert_eq!(c.case, CentralizerCase::WholeB);
        let c = g.centralizer(&g.parse("y").unwrap()).unwrap();
        assert_eq!(c.case, CentralizerCase::BaseCentralizer);
        let c = g.centralizer(&g.parse("y s").unwrap()).unwrap();
        assert_eq!(c.case, CentralizerCase::CyclicTimesOPrime);
        assert!(c.o_prime.is_empty());
        assert_eq!(c.generators, vec![g.parse("y s").unwrap()]);
    }

    #[test]
    fn roots_in_extension() {
        let g = f2_ext();
        let v = g.parse("(y s)^3").unwrap();
        let (r, m) = g.root(&v).unwrap();
        assert_eq!(m, 3);
        assert_eq!(r, g.parse("y s").unwrap());
        let v = g.parse("y (x s^2 y)^2 y^-1").unwrap();
        let (r, m) = g.root(&v).unwrap();
        assert_eq!(g.pow(&r, m as i64), v);
    }
}
