//! Centralisers in coherent RAAGs, the representative set W = W_K ∪ W_B,
//! the Z/O splitting and a seeded falsifier for the class-𝒞 axioms.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::words::{self, Word};

/// Cap on the number of cyclic conjugates explored per element.
pub const CONJUGATE_LIMIT: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CentralizerKind {
    NonAbelianCanonical,
    AbelianCanonical,
    AbelianNonCanonical,
}

/// C(g) = conjugator · (⟨z⟩ × ⟨o_part⟩) · conjugator^-1.
///
/// For the canonical kinds `z_set` is α(core) and there is no root. For the
/// non-canonical kind `root` is the root of the unique long block of the core
/// and `z_set` its support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Centralizer {
    pub kind: CentralizerKind,
    pub element: Word,
    pub core: Word,
    pub conjugator: Word,
    pub z_set: VertexSet,
    pub root: Option<Word>,
    pub o_part: VertexSet,
}

impl Centralizer {
    pub fn is_abelian(&self) -> bool {
        self.kind != CentralizerKind::NonAbelianCanonical
    }

    pub fn is_canonical(&self) -> bool {
        self.kind != CentralizerKind::AbelianNonCanonical
    }

    /// Generators of C(core) as vertex set (canonical kinds) plus the root.
    pub fn core_generators(&self) -> Vec<Word> {
        let mut out = Vec::new();
        match &self.root {
            Some(r) => out.push(r.clone()),
            None => out.extend(self.z_set.iter().map(|&x| Word::gen(x))),
        }
        out.extend(self.o_part.iter().map(|&x| Word::gen(x)));
        out
    }

    /// Generators of C(g) itself.
    pub fn generators(&self, g: &Graph) -> Vec<Word> {
        let c_inv = words::inv(g, &self.conjugator);
        self.core_generators()
            .iter()
            .map(|q| words::conjugate(g, q, &c_inv))
            .collect()
    }

    /// Vertex set generating C(core) in the canonical cases.
    pub fn generator_set(&self) -> Option<VertexSet> {
        if self.is_canonical() {
            Some(self.z_set.union(&self.o_part).copied().collect())
        } else {
            None
        }
    }

    /// Splits `h` (already conjugated to the core) as `root^k · o`.
    fn split_core(&self, g: &Graph, h: &Word) -> Option<(i64, Word)> {
        let allowed: VertexSet = self.z_set.union(&self.o_part).copied().collect();
        if !h.support().is_subset(&allowed) {
            return None;
        }
        let o = h.project(&self.o_part);
        match &self.root {
            None => Some((0, h.clone())),
            Some(r) => {
                let z = words::normalize(g, &h.project(&self.z_set));
                if z.is_identity() {
                    return Some((0, o));
                }
                if !z.len().is_multiple_of(r.len()) {
                    return None;
                }
                let k = (z.len() / r.len()) as i64;
                if words::pow(g, r, k) == z {
                    Some((k, o))
                } else if words::pow(g, r, -k) == z {
                    Some((-k, o))
                } else {
                    None
                }
            }
        }
    }

    /// Membership by splitting along the direct product.
    pub fn contains(&self, g: &Graph, h: &Word) -> bool {
        let h = words::conjugate(g, h, &self.conjugator);
        self.split_core(g, &h).is_some()
    }

    /// For `h ∈ C(g)`: `(k, o)` with `c^-1 h c = root^k · o`, `k = 0` in the
    /// canonical cases.
    pub fn coordinates(&self, g: &Graph, h: &Word) -> Option<(i64, Word)> {
        let h = words::conjugate(g, h, &self.conjugator);
        self.split_core(g, &h)
    }

    pub fn to_json(&self, g: &Graph) -> Value {
        let gens: Vec<String> = self.generators(g).iter().map(|w| w.format(g)).collect();
        json!({
            "kind": self.kind,
            "element": self.element.format(g),
            "core": self.core.format(g),
            "conjugator": self.conjugator.format(g),
            "z_part": match &self.root {
                Some(r) => json!(r.format(g)),
                None => json!(g.set_names(&self.z_set)),
            },
            "o_part": g.set_names(&self.o_part),
            "generators": gens,
        })
    }
}

fn require_chordal(g: &Graph) -> Result<()> {
    if g.is_chordal().0 {
        Ok(())
    } else {
        Err(Error::NotChordal)
    }
}

/// C(g), with the conjugator when `g` is not cyclically reduced.
pub fn centralizer(g: &Graph, w: &Word) -> Result<Centralizer> {
    require_chordal(g)?;
    centralizer_unchecked(g, w)
}

/// As [`centralizer`] but skips the chordality check.
pub fn centralizer_unchecked(g: &Graph, w: &Word) -> Result<Centralizer> {
    let element = words::normalize(g, w);
    if element.is_identity() {
        return Err(Error::Identity("centraliser description"));
    }
    let (core, conjugator) = words::cyclic_reduce(g, &element);
    let alpha = core.support();
    let lk = g.link(&alpha);
    let blocks = words::block_decompose(g, &core)?;
    let long: Vec<&Word> = blocks.iter().filter(|b| b.0.len() > 1).collect();
    if long.is_empty() {
        let kind = if g.is_clique(&lk) {
            CentralizerKind::AbelianCanonical
        } else {
            CentralizerKind::NonAbelianCanonical
        };
        return Ok(Centralizer { kind, element, core, conjugator, z_set: alpha, root: None, o_part: lk });
    }
    if long.len() > 1 || !g.is_clique(&lk) {
        return Err(Error::NotChordal);
    }
    let block = long[0];
    let (root, _) = words::root_with_budget(g, block, usize::MAX)?;
    let z_set = block.support();
    let mut o_part: VertexSet = alpha.difference(&z_set).copied().collect();
    o_part.extend(lk);
    Ok(Centralizer {
        kind: CentralizerKind::AbelianNonCanonical,
        element,
        core,
        conjugator,
        z_set,
        root: Some(root),
        o_part,
    })
}

/// For a clique `y`: the product `g` of its generators, with C(Y) = C(g).
pub fn centralizer_of_set(g: &Graph, y: &VertexSet) -> Result<(Word, Centralizer)> {
    if y.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    if !g.is_clique(y) {
        return Err(Error::NotClique);
    }
    let w = Word(y.iter().map(|&x| (x, 1)).collect());
    let c = centralizer(g, &w)?;
    Ok((w, c))
}

/// The Z part of a Z/O split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZPart {
    Trivial,
    Canonical(VertexSet),
    Cyclic(Word),
}

/// C(w) = conjugator · (Z × O) · conjugator^-1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZoSplit {
    pub z: ZPart,
    pub o: VertexSet,
    pub conjugator: Word,
}

impl ZoSplit {
    pub fn to_json(&self, g: &Graph) -> Value {
        let z = match &self.z {
            ZPart::Trivial => json!({"kind": "trivial"}),
            ZPart::Canonical(s) => json!({"kind": "canonical", "generators": g.set_names(s)}),
            ZPart::Cyclic(r) => json!({"kind": "cyclic", "generator": r.format(g)}),
        };
        json!({"z": z, "o": g.set_names(&self.o), "conjugator": self.conjugator.format(g)})
    }
}

/// Z(w)/O(w). The identity gets Z = 1 and O = the whole group.
pub fn zo_split(g: &Graph, w: &Word) -> Result<ZoSplit> {
    let w = words::normalize(g, w);
    if w.is_identity() {
        return Ok(ZoSplit { z: ZPart::Trivial, o: g.all(), conjugator: Word::identity() });
    }
    let c = centralizer(g, &w)?;
    Ok(zo_of(&c))
}

fn zo_of(c: &Centralizer) -> ZoSplit {
    let (z, o) = match c.kind {
        CentralizerKind::AbelianCanonical => {
            (ZPart::Trivial, c.z_set.union(&c.o_part).copied().collect())
        }
        CentralizerKind::AbelianNonCanonical => {
            (ZPart::Cyclic(c.root.clone().expect("root")), c.o_part.clone())
        }
        CentralizerKind::NonAbelianCanonical => (ZPart::Canonical(c.z_set.clone()), c.o_part.clone()),
    };
    ZoSplit { z, o, conjugator: c.conjugator.clone() }
}

/// An equivalence class of cliques under equal stars.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueClass {
    pub star: VertexSet,
    pub members: Vec<VertexSet>,
    pub minimal: Vec<VertexSet>,
}

/// Nonempty cliques grouped by star, classes ordered by their least member.
pub fn clique_classes(g: &Graph) -> Vec<CliqueClass> {
    let mut by_star: BTreeMap<VertexSet, Vec<VertexSet>> = BTreeMap::new();
    for c in g.cliques().into_iter().filter(|c| !c.is_empty()) {
        by_star.entry(g.star(&c)).or_default().push(c);
    }
    let mut out: Vec<CliqueClass> = by_star
        .into_iter()
        .map(|(star, members)| {
            let min = members.iter().map(|c| c.len()).min().unwrap_or(0);
            let mut minimal: Vec<VertexSet> = members.iter().filter(|c| c.len() == min).cloned().collect();
            minimal.sort_by_key(clique_word);
            CliqueClass { star, members, minimal }
        })
        .collect();
    out.sort_by_key(|c| clique_word(&c.minimal[0]));
    out
}

/// g_C = product of the clique's generators in vertex order.
pub fn clique_word(c: &VertexSet) -> Word {
    Word(c.iter().map(|&x| (x, 1)).collect())
}

/// W_K ∪ W_B, with W_B enumerated up to a length bound.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RepresentativeSet {
    pub w_k: Vec<Word>,
    pub w_b: Vec<Word>,
    pub bound: usize,
}

impl RepresentativeSet {
    pub fn empty(bound: usize) -> RepresentativeSet {
        RepresentativeSet { w_k: Vec::new(), w_b: Vec::new(), bound }
    }

    pub fn all(&self) -> Vec<Word> {
        self.w_k.iter().chain(self.w_b.iter()).cloned().collect()
    }

    pub fn to_json(&self, g: &Graph) -> Value {
        json!({
            "w_k": self.w_k.iter().map(|w| w.format(g)).collect::<Vec<_>>(),
            "w_b": self.w_b.iter().map(|w| w.format(g)).collect::<Vec<_>>(),
            "bound": self.bound,
        })
    }
}

pub fn representatives(g: &Graph, bound: usize) -> Result<RepresentativeSet> {
    require_chordal(g)?;
    let mut w_k = Vec::new();
    for class in clique_classes(g) {
        if g.is_clique(&class.star) {
            w_k.push(clique_word(&class.minimal[0]));
        } else {
            w_k.extend(class.minimal.iter().map(clique_word));
        }
    }
    w_k.sort();
    let w_b = block_representatives(g, bound)?;
    Ok(RepresentativeSet { w_k, w_b, bound })
}

/// Cyclically reduced root blocks of length 2..=bound that are shortlex-least
/// among the conjugates of themselves and their inverses.
pub fn block_representatives(g: &Graph, bound: usize) -> Result<Vec<Word>> {
    let letters: Vec<(usize, i64)> = (0..g.len()).flat_map(|x| [(x, 1), (x, -1)]).collect();
    let mut out = Vec::new();
    let mut stack: Vec<Word> = vec![Word::identity()];
    while let Some(w) = stack.pop() {
        if w.len() >= 2 && is_block_representative(g, &w)? {
            out.push(w.clone());
        }
        if w.len() == bound {
            continue;
        }
        for &(x, e) in letters.iter().rev() {
            let ext = w.concat(&Word::power_of(x, e));
            let ext = Word::from_letters(ext.0);
            if ext.len() != w.len() + 1 {
                continue;
            }
            if words::normalize(g, &ext) == ext {
                stack.push(ext);
            }
        }
    }
    out.sort();
    Ok(out)
}

fn is_block_representative(g: &Graph, w: &Word) -> Result<bool> {
    let support = w.support();
    if support.len() < 2 || g.complement_components(&support).len() != 1 {
        return Ok(false);
    }
    if !words::is_cyclically_reduced(g, w) {
        return Ok(false);
    }
    if words::root_with_budget(g, w, usize::MAX)?.1 != 1 {
        return Ok(false);
    }
    Ok(class_minimum(g, w)? == *w)
}

/// Least element of the conjugacy class of `w` and `w^-1` among cyclically
/// reduced words reachable by cyclic moves.
pub fn class_minimum(g: &Graph, w: &Word) -> Result<Word> {
    let a = words::cyclic_conjugates(g, w, CONJUGATE_LIMIT)?;
    let b = words::cyclic_conjugates(g, &words::inv(g, w), CONJUGATE_LIMIT)?;
    Ok(a.into_iter().chain(b).map(|(v, _)| v).min().expect("nonempty class"))
}

/// Key that two centralisers share iff they are conjugate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CentralizerKey {
    Canonical(VertexSet),
    Cyclic(Word),
}

pub fn centralizer_key(g: &Graph, c: &Centralizer) -> Result<CentralizerKey> {
    match &c.root {
        None => Ok(CentralizerKey::Canonical(c.generator_set().expect("canonical"))),
        Some(r) => Ok(CentralizerKey::Cyclic(class_minimum(g, r)?)),
    }
}

/// Representatives `w ∈ W` with C(w) conjugate to C(g), and for each a
/// conjugator `h` with C(g) = h^-1 C(w) h.
pub fn matching_representatives(
    g: &Graph,
    w: &Word,
    reps: &RepresentativeSet,
) -> Result<Vec<(Word, Word)>> {
    let c = centralizer(g, w)?;
    let c_inv = words::inv(g, &c.conjugator);
    match &c.root {
        None => {
            let gens = c.generator_set().expect("canonical");
            let mut out: Vec<(bool, Word)> = Vec::new();
            for r in &reps.w_k {
                let d = r.support();
                if r.0.iter().all(|&(_, e)| e == 1) && g.is_clique(&d) && g.star(&d) == gens {
                    out.push((!d.is_subset(&c.z_set), r.clone()));
                }
            }
            out.sort();
            Ok(out.into_iter().map(|(_, r)| (r, c_inv.clone())).collect())
        }
        Some(root) => {
            if root.len() > reps.bound {
                return Err(Error::BoundExceeded { length: root.len(), bound: reps.bound });
            }
            let wanted: BTreeSet<&Word> = reps.w_b.iter().collect();
            let mut best: BTreeMap<Word, Word> = BTreeMap::new();
            for start in [root.clone(), words::inv(g, root)] {
                for (v, ps) in words::cyclic_conjugates(g, &start, CONJUGATE_LIMIT)? {
                    if !wanted.contains(&v) {
                        continue;
                    }
                    for p in ps {
                        let h = words::inv(g, &words::mul(g, &c.conjugator, &p));
                        let slot = best.entry(v.clone()).or_insert_with(|| h.clone());
                        if h < *slot {
                            *slot = h;
                        }
                    }
                }
            }
            Ok(best.into_iter().collect())
        }
    }
}

/// `(w, h)` with `w ∈ W` and C(g) = h^-1 C(w) h; the first match is taken.
pub fn conjugacy_representative(g: &Graph, w: &Word, reps: &RepresentativeSet) -> Result<(Word, Word)> {
    let w = words::normalize(g, w);
    if w.is_identity() {
        return Err(Error::Identity("centraliser representative"));
    }
    matching_representatives(g, &w, reps)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::NoRepresentative(w.format(g)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomResult {
    pub axiom: String,
    pub status: Status,
    pub checked: usize,
    pub skipped: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassCReport {
    pub axioms: Vec<AxiomResult>,
}

impl ClassCReport {
    pub fn passed(&self) -> bool {
        self.axioms.iter().all(|a| a.status == Status::Pass)
    }

    pub fn get(&self, axiom: &str) -> Option<&AxiomResult> {
        self.axioms.iter().find(|a| a.axiom == axiom)
    }
}

struct Tally {
    axiom: &'static str,
    checked: usize,
    skipped: usize,
    witness: Option<Value>,
}

impl Tally {
    fn new(axiom: &'static str) -> Tally {
        Tally { axiom, checked: 0, skipped: 0, witness: None }
    }

    fn fail(&mut self, w: Value) {
        if self.witness.is_none() {
            self.witness = Some(w);
        }
    }

    fn failed(&self) -> bool {
        self.witness.is_some()
    }

    fn done(self) -> AxiomResult {
        AxiomResult {
            axiom: self.axiom.to_string(),
            status: if self.witness.is_some() { Status::Fail } else { Status::Pass },
            checked: self.checked,
            skipped: self.skipped,
            witness: self.witness,
        }
    }
}

/// Random normal form over the given generators with at most `len` letters.
pub fn random_word(g: &Graph, gens: &[usize], len: usize, rng: &mut impl Rng) -> Word {
    if gens.is_empty() {
        return Word::identity();
    }
    let letters = (0..len).map(|_| {
        let x = gens[rng.gen_range(0..gens.len())];
        (x, if rng.gen_bool(0.5) { 1 } else { -1 })
    });
    words::normalize(g, &Word::from_letters(letters))
}

fn random_nontrivial(g: &Graph, gens: &[usize], len: usize, rng: &mut impl Rng) -> Option<Word> {
    if gens.is_empty() || len == 0 {
        return None;
    }
    (0..64).map(|_| random_word(g, gens, len, rng)).find(|w| !w.is_identity())
}

fn random_subset(n: usize, rng: &mut impl Rng) -> VertexSet {
    (0..n).filter(|_| rng.gen_bool(0.5)).collect()
}

/// Seeded falsifier for the class-𝒞 axioms over the RAAG with the given W.
pub fn check_class_c_axioms(
    g: &Graph,
    reps: &RepresentativeSet,
    sample_length: usize,
    sample_count: usize,
    seed: u64,
) -> Result<ClassCReport> {
    require_chordal(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<usize> = (0..g.len()).collect();
    let samples: Vec<Word> = (0..sample_count)
        .filter_map(|_| random_nontrivial(g, &all, sample_length, &mut rng))
        .collect();
    let w_all = reps.all();
    let per_rep = sample_count.clamp(1, 20);
    let axioms = vec![
        check_c1(g, &samples),
        check_c2(g, &samples, &mut rng),
        check_c3(g, &samples),
        check_c4a(g, sample_length, sample_count, &mut rng),
        check_c4b(g, sample_length, sample_count, &mut rng),
        check_c6a(g, reps, &samples),
        check_c6b(g, &w_all),
        check_c6c(g, reps, sample_length, per_rep, &mut rng),
        check_c7(g, &w_all, sample_length, per_rep, &mut rng),
        check_c8(g, &w_all, sample_length, per_rep, &mut rng),
    ];
    Ok(ClassCReport { axioms })
}

fn check_c1(g: &Graph, samples: &[Word]) -> AxiomResult {
    let mut t = Tally::new("C1");
    for s in samples {
        t.checked += 1;
        if let Some(k) = (1..=4).find(|&k| words::pow(g, s, k).is_identity()) {
            t.fail(json!({"element": s.format(g), "order": k}));
        }
    }
    t.done()
}

fn check_c2(g: &Graph, samples: &[Word], rng: &mut impl Rng) -> AxiomResult {
    let mut t = Tally::new("C2");
    let short: Vec<&Word> = samples.iter().filter(|w| w.len() <= 3).collect();
    if short.len() < 2 {
        return t.done();
    }
    for _ in 0..samples.len().min(40) {
        let k = if rng.gen_bool(0.5) { 2 } else { 3 };
        let tuple: Vec<Word> = (0..k).map(|_| short[rng.gen_range(0..short.len())].clone()).collect();
        if tuple.windows(2).any(|p| words::commute(g, &p[0], &p[1])) {
            t.skipped += 1;
            continue;
        }
        t.checked += 1;
        let lo = if k == 2 { 1 } else { 4 };
        let found = crate::discrimination::collapse_search(tuple.len(), lo, lo + 1, |alpha| {
            let mut acc = Word::identity();
            for (u, &a) in tuple.iter().zip(alpha) {
                acc = acc.concat(&words::pow(g, u, a));
            }
            words::normalize(g, &acc).is_identity()
        });
        if let Some(alpha) = found {
            t.fail(json!({
                "tuple": tuple.iter().map(|w| w.format(g)).collect::<Vec<_>>(),
                "exponents": alpha,
            }));
        }
    }
    t.done()
}

fn check_c3(g: &Graph, samples: &[Word]) -> AxiomResult {
    let mut t = Tally::new("C3");
    for s in samples {
        let Ok((r, m)) = words::root(g, s) else {
            t.skipped += 1;
            continue;
        };
        for k in 2..=3u64 {
            match words::root(g, &words::pow(g, s, k as i64)) {
                Ok((r2, m2)) => {
                    t.checked += 1;
                    if r2 != r || m2 != k * m {
                        t.fail(json!({"element": s.format(g), "power": k, "root": r2.format(g)}));
                    }
                }
                Err(_) => t.skipped += 1,
            }
        }
    }
    t.done()
}

fn check_c4a(g: &Graph, len: usize, count: usize, rng: &mut impl Rng) -> AxiomResult {
    let mut t = Tally::new("C4a");
    for _ in 0..count {
        let y = random_subset(g.len(), rng);
        if y.is_empty() {
            continue;
        }
        let lk = g.link(&y);
        let y2: VertexSet = lk.into_iter().filter(|_| rng.gen_bool(0.5)).collect();
        let yv: Vec<usize> = y.iter().copied().collect();
        let y2v: Vec<usize> = y2.iter().copied().collect();
        let u = random_word(g, &yv, len, rng);
        let v = random_word(g, &y2v, len, rng);
        let uv = words::mul(g, &u, &v);
        t.checked += 1;
        let ok = words::commute(g, &u, &v)
            && words::normalize(g, &uv.project(&y)) == u
            && words::normalize(g, &uv.project(&y2)) == v
            && (uv.is_identity() == (u.is_identity() && v.is_identity()));
        if !ok {
            t.fail(json!({"y": g.set_names(&y), "y_prime": g.set_names(&y2), "u": u.format(g), "v": v.format(g)}));
        }
    }
    t.done()
}

fn check_c4b(g: &Graph, len: usize, count: usize, rng: &mut impl Rng) -> AxiomResult {
    let mut t = Tally::new("C4b");
    for x in 0..g.len() {
        t.checked += 1;
        if Word::gen(x).is_identity() {
            t.fail(json!({"generator": g.name(x)}));
        }
    }
    for _ in 0..count {
        let y = random_subset(g.len(), rng);
        let yv: Vec<usize> = y.iter().copied().collect();
        let u = random_word(g, &yv, len, rng);
        t.checked += 1;
        if u.len() == 1 && !y.contains(&u.0[0].0) {
            t.fail(json!({"y": g.set_names(&y), "element": u.format(g)}));
        }
    }
    t.done()
}

/// C(g) = h^-1 C(w) h, checked on generators both ways.
fn conjugate_centralizers_agree(g: &Graph, cg: &Centralizer, cw: &Centralizer, h: &Word) -> bool {
    let h_inv = words::inv(g, h);
    cw.generators(g).iter().all(|q| cg.contains(g, &words::conjugate(g, q, h)))
        && cg.generators(g).iter().all(|q| cw.contains(g, &words::conjugate(g, q, &h_inv)))
}

fn check_c6a(g: &Graph, reps: &RepresentativeSet, samples: &[Word]) -> AxiomResult {
    let mut t = Tally::new("C6a");
    for s in samples {
        if t.failed() {
            break;
        }
        let matches = match matching_representatives(g, s, reps) {
            Ok(m) => m,
            Err(e) if e.is_budget() => {
                t.skipped += 1;
                continue;
            }
            Err(e) => {
                t.checked += 1;
                t.fail(json!({"element": s.format(g), "reason": e.to_string()}));
                continue;
            }
        };
        t.checked += 1;
        let cg = centralizer_unchecked(g, s).expect("nontrivial sample");
        if matches.is_empty() {
            t.fail(json!({"element": s.format(g), "reason": "no representative in W"}));
            continue;
        }
        if cg.is_abelian() && matches.len() != 1 {
            t.fail(json!({
                "element": s.format(g),
                "reason": "abelian centraliser matched by several representatives",
                "representatives": matches.iter().map(|(w, _)| w.format(g)).collect::<Vec<_>>(),
            }));
            continue;
        }
        for (w, h) in &matches {
            let cw = centralizer_unchecked(g, w).expect("representative");
            if !conjugate_centralizers_agree(g, &cg, &cw, h) {
                t.fail(json!({"element": s.format(g), "representative": w.format(g), "conjugator": h.format(g)}));
            }
        }
    }
    t.done()
}

fn check_c6b(g: &Graph, reps: &[Word]) -> AxiomResult {
    let mut t = Tally::new("C6b");
    for w in reps {
        t.checked += 1;
        let Ok(c) = centralizer_unchecked(g, w) else {
            t.fail(json!({"representative": w.format(g), "reason": "trivial representative"}));
            continue;
        };
        let zo = zo_of(&c);
        let (z_gens, y): (Vec<Word>, VertexSet) = match &zo.z {
            ZPart::Trivial => (Vec::new(), VertexSet::new()),
            ZPart::Canonical(s) => (s.iter().map(|&x| Word::gen(x)).collect(), s.clone()),
            ZPart::Cyclic(r) => (vec![r.clone()], r.support()),
        };
        let o_gens: Vec<Word> = zo.o.iter().map(|&x| Word::gen(x)).collect();
        let disjoint = y.is_disjoint(&zo.o);
        let commuting = z_gens.iter().all(|z| o_gens.iter().all(|o| words::commute(g, z, o)));
        let inside = z_gens.iter().chain(&o_gens).all(|q| c.contains(g, q));
        let covers = c.core_generators().iter().all(|q| {
            let zp = words::normalize(g, &q.project(&y));
            let in_z = match &zo.z {
                ZPart::Trivial => zp.is_identity(),
                ZPart::Canonical(_) => true,
                ZPart::Cyclic(r) => {
                    zp.is_identity()
                        || words::root(g, &zp).map(|(s, _)| s == *r || s == words::inv(g, r)).unwrap_or(false)
                }
            };
            let rest: VertexSet = q.support().difference(&y).copied().collect();
            in_z && rest.is_subset(&zo.o)
        });
        let shape = match (&zo.z, c.kind) {
            (ZPart::Trivial, CentralizerKind::AbelianCanonical) => true,
            (ZPart::Cyclic(_), CentralizerKind::AbelianNonCanonical) => zo.o == g.link(&y),
            (ZPart::Canonical(_), CentralizerKind::NonAbelianCanonical) => zo.o == g.link(&y),
            _ => false,
        };
        if !(disjoint && commuting && inside && covers && shape) {
            t.fail(json!({"representative": w.format(g), "split": zo.to_json(g)}));
        }
    }
    t.done()
}

fn check_c6c(g: &Graph, reps: &RepresentativeSet, len: usize, per_rep: usize, rng: &mut impl Rng) -> AxiomResult {
    let mut t = Tally::new("C6c");
    for w in reps.all() {
        let Ok(cw) = centralizer_unchecked(g, &w) else { continue };
        let zo = zo_of(&cw);
        let o: Vec<usize> = zo.o.iter().copied().collect();
        let Ok(key_w) = centralizer_key(g, &cw) else {
            t.skipped += 1;
            continue;
        };
        for _ in 0..per_rep {
            let Some(s) = random_nontrivial(g, &o, len, rng) else { break };
            let cs = centralizer_unchecked(g, &s).expect("nontrivial");
            let Ok(key_s) = centralizer_key(g, &cs) else {
                t.skipped += 1;
                continue;
            };
            if key_s == key_w {
                continue;
            }
            match matching_representatives(g, &s, reps) {
                Ok(ms) => {
                    t.checked += 1;
                    let ok = ms.iter().any(|(w0, h)| {
                        w0.support().is_subset(&zo.o) && h.support().is_subset(&zo.o)
                    });
                    if !ok {
                        t.fail(json!({
                            "representative": w.format(g),
                            "element": s.format(g),
                            "candidates": ms.iter().map(|(a, b)| [a.format(g), b.format(g)]).collect::<Vec<_>>(),
                        }));
                    }
                }
                Err(e) if e.is_budget() => t.skipped += 1,
                Err(e) => {
                    t.checked += 1;
                    t.fail(json!({"representative": w.format(g), "element": s.format(g), "reason": e.to_string()}));
                }
            }
        }
    }
    t.done()
}

/// Random element of C(w) from its generators.
fn random_in(g: &Graph, c: &Centralizer, len: usize, rng: &mut impl Rng) -> Word {
    let gens = c.generators(g);
    let mut acc = Word::identity();
    for _ in 0..len.max(1) {
        let q = &gens[rng.gen_range(0..gens.len())];
        acc = acc.concat(&words::pow(g, q, rng.gen_range(-2..=2)));
    }
    words::normalize(g, &acc)
}

fn check_c7(g: &Graph, reps: &[Word], len: usize, per_rep: usize, rng: &mut impl Rng) -> AxiomResult {
    let mut t = Tally::new("C7");
    let all: Vec<usize> = (0..g.len()).collect();
    for w in reps {
        let Ok(cw) = centralizer_unchecked(g, w) else { continue };
        if !cw.is_abelian() {
            continue;
        }
        let zo = zo_of(&cw);
        for _ in 0..per_rep {
            let a = random_in(g, &cw, len, rng);
            if a.is_identity() {
                continue;
            }
            let ca = centralizer_unchecked(g, &a).expect("nontrivial");
            let mut hs = vec![random_word(g, &all, len, rng), random_in(g, &ca, len, rng)];
            hs.push(words::mul(g, &hs[0], &hs[1]));
            for h in hs {
                let ah = words::conjugate(g, &a, &h);
                if !cw.contains(g, &ah) || cw.contains(g, &h) {
                    continue;
                }
                t.checked += 1;
                let in_o = a.support().is_subset(&zo.o) && zo.conjugator.is_identity();
                if !(in_o && words::commute(g, &h, &a)) {
                    t.fail(json!({"representative": w.format(g), "a": a.format(g), "h": h.format(g)}));
                }
            }
        }
    }
    t.done()
}

fn check_c8(g: &Graph, reps: &[Word], len: usize, per_rep: usize, rng: &mut impl Rng) -> AxiomResult {
    let mut t = Tally::new("C8");
    for w in reps {
        let Ok(cw) = centralizer_unchecked(g, w) else { continue };
        if cw.is_abelian() {
            continue;
        }
        t.checked += 1;
        let alpha = cw.core.support();
        let gens = cw.generator_set().expect("canonical");
        let canonical = cw.conjugator.is_identity()
            && cw.z_set == alpha
            && cw.o_part == g.link(&alpha);
        let centre: VertexSet = gens.iter().copied().filter(|&v| gens.iter().all(|&u| u == v || g.adjacent(u, v))).collect();
        let gen_words: Vec<Word> = gens.iter().map(|&x| Word::gen(x)).collect();
        let mut centre_ok = true;
        for _ in 0..per_rep {
            let s = random_in(g, &cw, len, rng);
            let central = gen_words.iter().all(|q| words::commute(g, q, &s));
            if central && !s.support().is_subset(&centre) {
                centre_ok = false;
            }
            if !central && s.support().is_subset(&centre) {
                centre_ok = false;
            }
        }
        if !(canonical && centre_ok) {
            t.fail(json!({"representative": w.format(g), "generators": g.set_names(&gens), "centre": g.set_names(&centre)}));
        }
    }
    t.done()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(g: &Graph, s: &str) -> Word {
        words::word(g, s).unwrap()
    }

    fn gen_names(g: &Graph, c: &Centralizer) -> BTreeSet<String> {
        c.generators(g).iter().map(|x| x.format(g)).collect()
    }

    fn names(list: &[&str]) -> BTreeSet<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn p4_centralizers() {
        let g = Graph::p4();
        let c = centralizer(&g, &w(&g, "b")).unwrap();
        assert_eq!(c.kind, CentralizerKind::NonAbelianCanonical);
        assert_eq!(gen_names(&g, &c), names(&["a", "b", "c"]));
        let c = centralizer(&g, &w(&g, "a c")).unwrap();
        assert_eq!(c.kind, CentralizerKind::AbelianNonCanonical);
        assert_eq!(c.root, Some(w(&g, "a c")));
        assert_eq!(g.set_names(&c.o_part), vec!["b"]);
        let c = centralizer(&g, &w(&g, "a b")).unwrap();
        assert_eq!(c.kind, CentralizerKind::AbelianCanonical);
    }

    #[test]
    fn membership() {
        let g = Graph::p4();
        let c = centralizer(&g, &w(&g, "d a c d^-1")).unwrap();
        assert!(c.contains(&g, &w(&g, "d (a c)^-2 b d^-1")));
        assert!(!c.contains(&g, &w(&g, "a")));
        assert_eq!(c.coordinates(&g, &w(&g, "d (a c)^-2 b d^-1")), Some((-2, w(&g, "b"))));
    }

    #[test]
    fn p4_representatives() {
        let g = Graph::p4();
        let reps = representatives(&g, 2).unwrap();
        let wk: Vec<String> = reps.w_k.iter().map(|x| x.format(&g)).collect();
        assert_eq!(wk, vec!["a", "b", "c", "d", "b c"]);
        let wb: Vec<String> = reps.w_b.iter().map(|x| x.format(&g)).collect();
        assert!(wb.contains(&"a c".to_string()));
        assert!(wb.contains(&"b d".to_string()));
    }

    #[test]
    fn conjugacy_representatives() {
        let g = Graph::p4();
        let reps = representatives(&g, 3).unwrap();
        let (r, h) = conjugacy_representative(&g, &w(&g, "c a"), &reps).unwrap();
        assert_eq!((r, h), (w(&g, "a c"), w(&g, "a")));
        let (r, h) = conjugacy_representative(&g, &w(&g, "d a c d^-1"), &reps).unwrap();
        assert_eq!((r, h), (w(&g, "a c"), w(&g, "d^-1")));
        let (r, h) = conjugacy_representative(&g, &w(&g, "b c"), &reps).unwrap();
        assert_eq!((r, h), (w(&g, "b c"), Word::identity()));
        assert!(matches!(
            conjugacy_representative(&g, &w(&g, "a c a d"), &reps),
            Err(Error::BoundExceeded { .. })
        ));
    }

    #[test]
    fn zo_examples() {
        let g = Graph::figure1();
        let zo = zo_split(&g, &w(&g, "d1 d2")).unwrap();
        assert_eq!(g.set_names(&zo.o), vec!["a", "c1", "c2"]);
        let k2 = Graph::complete(&["a", "b"]);
        let zo = zo_split(&k2, &Word::identity()).unwrap();
        assert_eq!(zo.z, ZPart::Trivial);
        assert_eq!(zo.o, k2.all());
    }

    #[test]
    fn class_c_passes_on_p4() {
        let g = Graph::p4();
        let reps = representatives(&g, 4).unwrap();
        let report = check_class_c_axioms(&g, &reps, 4, 100, 1).unwrap();
        assert!(report.passed(), "{report:?}");
    }
}
