//! Retractions of a centraliser extension onto its base, separation search
//! and the big-powers scanner.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::amalgam::Extension;
use crate::error::{Error, Result};
use crate::group::{x_of, Elem, Group};

/// The retraction killing nothing in the base and sending an A-vector `a`
/// to `u^(m · psi·a)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetractionIndex {
    pub psi: Vec<i64>,
    pub m: i64,
}

#[derive(Clone, Debug)]
pub struct SeparationCertificate {
    pub index: RetractionIndex,
    pub images: Vec<Elem>,
}

impl SeparationCertificate {
    /// The image of the single separated element.
    pub fn image(&self) -> &Elem {
        &self.images[0]
    }

    pub fn to_json(&self, base: &Group) -> Value {
        let mut v = json!({ "psi": self.index.psi, "m": self.index.m });
        if self.images.len() == 1 {
            v["image"] = json!(base.format(&self.images[0]));
        } else {
            v["images"] = json!(self.images.iter().map(|x| base.format(x)).collect::<Vec<_>>());
        }
        v
    }
}

fn ext_of(grp: &Group) -> Result<&Extension> {
    grp.ext().ok_or_else(|| Error::Precondition("a centraliser extension is required".into()))
}

/// The homomorphism to the base that fixes the base and sends the i-th
/// A-generator to `images[i]`. The images must commute with C.
pub fn retract_with(ext: &Extension, images: &[Elem], x: &Elem) -> Elem {
    let base = &ext.base;
    let xa = x_of(x);
    let mut parts = Vec::with_capacity(2 * xa.a.len() + 1);
    for (i, g) in xa.g.iter().enumerate() {
        parts.push(g.clone());
        if let Some(v) = xa.a.get(i) {
            for (img, &k) in images.iter().zip(v) {
                if k != 0 {
                    parts.push(base.pow(img, k));
                }
            }
        }
    }
    base.product(parts.iter())
}

/// Images `u^(m·psi_i)` of the A-generators.
pub fn images(ext: &Extension, idx: &RetractionIndex) -> Vec<Elem> {
    idx.psi.iter().map(|&p| ext.base.pow(&ext.u, idx.m * p)).collect()
}

pub fn retract(grp: &Group, idx: &RetractionIndex, x: &Elem) -> Result<Elem> {
    let ext = ext_of(grp)?;
    if idx.psi.len() != ext.a_rank() {
        return Err(Error::Precondition(format!("psi has length {}, A has rank {}", idx.psi.len(), ext.a_rank())));
    }
    if idx.m < 1 {
        return Err(Error::Precondition("m must be positive".into()));
    }
    Ok(retract_with(ext, &images(ext, idx), x))
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `(1, N, N², …)` with the smallest `N` such that `psi·v` is nonzero and
/// the absolute values `|psi·v|` are pairwise distinct on the input, up to
/// the sign of `v`.
pub fn make_psi(k: usize, vectors: &[Vec<i64>]) -> Vec<i64> {
    let powers = |n: i64| -> Vec<i64> {
        let mut out = Vec::with_capacity(k);
        let mut p = 1i64;
        for _ in 0..k {
            out.push(p);
            p = p.saturating_mul(n);
        }
        out
    };
    let good = |psi: &[i64]| -> bool {
        let mut vals: Vec<i64> = vectors.iter().map(|v| dot(psi, v).abs()).collect();
        if vals.contains(&0) {
            return false;
        }
        vals.sort_unstable();
        vals.dedup();
        let mut distinct: Vec<Vec<i64>> = vectors
            .iter()
            .map(|v| std::cmp::max(v.clone(), v.iter().map(|c| -c).collect()))
            .collect();
        distinct.sort();
        distinct.dedup();
        vals.len() == distinct.len()
    };
    if k <= 1 {
        return vec![1; k];
    }
    let max = vectors.iter().flatten().map(|c| c.abs()).max().unwrap_or(0);
    let mut n = 1 + 2 * max;
    while n > 1 && good(&powers(n - 1)) {
        n -= 1;
    }
    powers(n.max(1))
}

fn a_vectors(x: &Elem) -> Vec<Vec<i64>> {
    match x {
        Elem::X(a) => a.a.clone(),
        Elem::W(_) => Vec::new(),
    }
}

/// Least `m ≤ budget` whose retraction sends `x` to a nontrivial element.
pub fn separate(grp: &Group, x: &Elem, budget: i64) -> Result<SeparationCertificate> {
    separate_all(grp, std::slice::from_ref(x), budget)
}

/// One retraction sending every element of `xs` away from 1 and the
/// elements to pairwise distinct images.
pub fn separate_all(grp: &Group, xs: &[Elem], budget: i64) -> Result<SeparationCertificate> {
    let ext = ext_of(grp)?;
    if xs.iter().any(|x| grp.is_identity(x)) {
        return Err(Error::Identity("separation"));
    }
    let mut vectors: Vec<Vec<i64>> = xs.iter().flat_map(a_vectors).collect();
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            vectors.extend(a_vectors(&grp.mul(&grp.inv(&xs[i]), &xs[j])));
        }
    }
    let psi = make_psi(ext.a_rank(), &vectors);
    for m in 1..=budget {
        let idx = RetractionIndex { psi: psi.clone(), m };
        let imgs = images(ext, &idx);
        let out: Vec<Elem> = xs.iter().map(|x| retract_with(ext, &imgs, x)).collect();
        if out.iter().any(|y| ext.base.is_identity(y)) {
            continue;
        }
        let mut sorted = out.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != out.len() {
            continue;
        }
        return Ok(SeparationCertificate { index: idx, images: out });
    }
    Err(Error::BudgetExceeded(format!("psi = {psi:?}, m tried up to {budget}")))
}

/// Exponent vectors with entries `±lo..=±hi`, in increasing max-norm, until
/// `is_one` accepts one.
pub fn collapse_search(k: usize, lo: i64, hi: i64, mut is_one: impl FnMut(&[i64]) -> bool) -> Option<Vec<i64>> {
    let lo = lo.max(1);
    for n in lo..=hi {
        let vals: Vec<i64> = (lo..=n).flat_map(|v| [v, -v]).collect();
        let mut idx = vec![0usize; k];
        loop {
            let alpha: Vec<i64> = idx.iter().map(|&i| vals[i]).collect();
            if alpha.iter().any(|a| a.abs() == n) && is_one(&alpha) {
                return Some(alpha);
            }
            let mut pos = 0;
            while pos < k {
                idx[pos] += 1;
                if idx[pos] < vals.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == k {
                break;
            }
        }
    }
    None
}

/// Searches for `u1^α1 ⋯ uk^αk = 1` with `1 ≤ |αi| ≤ n_bound`.
pub fn bp_scan(grp: &Group, tuple: &[Elem], n_bound: i64) -> Result<Option<Vec<i64>>> {
    for p in tuple.windows(2) {
        if grp.commute(&p[0], &p[1]) {
            return Err(Error::NonGeneric(grp.format(&p[0]), grp.format(&p[1])));
        }
    }
    if tuple.iter().any(|x| grp.is_identity(x)) {
        return Err(Error::Identity("big-powers scan"));
    }
    Ok(collapse_search(tuple.len(), 1, n_bound, |alpha| {
        let parts: Vec<Elem> = tuple.iter().zip(alpha).map(|(u, &a)| grp.pow(u, a)).collect();
        grp.is_identity(&grp.product(parts.iter()))
    }))
}

/// Separates `x` level by level down to the bottom RAAG. Returns one
/// certificate per level, top first, and the final image.
pub fn separate_down(grp: &Group, x: &Elem, budget: i64) -> Result<(Vec<SeparationCertificate>, Elem)> {
    let mut certs = Vec::new();
    let mut g = grp.clone();
    let mut y = x.clone();
    while let Group::Ext(e) = &g {
        let c = separate(&g, &y, budget)?;
        y = c.image().clone();
        certs.push(c);
        g = e.base.clone();
    }
    Ok((certs, y))
}

/// Retracts the whole tower onto its bottom RAAG, sending every A-generator
/// of every level to the `m`-th power of its u.
pub fn retract_to_bottom(grp: &Group, m: i64, x: &Elem) -> Elem {
    match grp {
        Group::Raag(_) => x.clone(),
        Group::Ext(e) => {
            let psi = vec![1; e.a_rank()];
            let y = retract_with(e, &images(e, &RetractionIndex { psi, m }), x);
            retract_to_bottom(&e.base, m, &y)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::extend;
    use crate::graph::Graph;

    fn f2_ext() -> Group {
        let f2 = Group::raag(Graph::edgeless(&["x", "y"]));
        let x = f2.parse("x").unwrap();
        extend(&f2, &x, 1, None).unwrap()
    }

    #[test]
    fn psi_examples() {
        assert_eq!(make_psi(2, &[vec![1, 0], vec![0, 1], vec![1, -1]]), vec![1, 3]);
        assert_eq!(make_psi(1, &[vec![5]]), vec![1]);
        assert_eq!(make_psi(2, &[vec![1, 1], vec![1, -1]]), vec![1, 2]);
    }

    #[test]
    fn retraction_examples() {
        let g = f2_ext();
        let base = &g.ext().unwrap().base;
        let idx = RetractionIndex { psi: vec![1], m: 3 };
        assert_eq!(base.format(&retract(&g, &idx, &g.parse("s").unwrap()).unwrap()), "x^3");
        let idx = RetractionIndex { psi: vec![1], m: 1 };
        let img = retract(&g, &idx, &g.parse("[y,s]").unwrap()).unwrap();
        assert_eq!(img, base.parse("[y,x]").unwrap());
    }

    #[test]
    fn separation_examples() {
        let g = f2_ext();
        let c = separate(&g, &g.parse("s").unwrap(), 16).unwrap();
        assert_eq!(c.index, RetractionIndex { psi: vec![1], m: 1 });
        let e = g.parse("y s y^-1 s^-1 y s^2").unwrap();
        let c = separate(&g, &e, 8).unwrap();
        assert!(c.index.m <= 8);
    }

    #[test]
    fn big_powers() {
        let p4 = Group::raag(Graph::p4());
        let a = p4.parse("a").unwrap();
        let b = p4.parse("b").unwrap();
        let d = p4.parse("d").unwrap();
        assert_eq!(bp_scan(&p4, &[a.clone(), d], 5).unwrap(), None);
        assert!(matches!(bp_scan(&p4, &[a, b], 5), Err(Error::NonGeneric(_, _))));
    }
}
