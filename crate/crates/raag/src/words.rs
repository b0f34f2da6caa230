//! Words in a right-angled Artin group: parsing, normal forms, cyclic
//! reduction, blocks and roots.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

/// Default cap on block length for root extraction.
pub const ROOT_BUDGET: usize = 16;

/// A word as a list of syllables `(generator, nonzero exponent)`.
///
/// Words returned by [`normalize`] are in shortlex normal form, so two of them
/// are equal as elements iff they are equal as values.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<(usize, i64)>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn gen(x: usize) -> Word {
        Word(vec![(x, 1)])
    }

    pub fn power_of(x: usize, e: i64) -> Word {
        if e == 0 {
            Word::identity()
        } else {
            Word(vec![(x, e)])
        }
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of absolute exponents; the geodesic length for normal forms.
    pub fn len(&self) -> usize {
        self.0.iter().map(|(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// α(w): generators occurring in the word.
    pub fn support(&self) -> VertexSet {
        self.0.iter().map(|&(x, _)| x).collect()
    }

    /// Letters as `(generator, ±1)`.
    pub fn letters(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.0
            .iter()
            .flat_map(|&(x, e)| std::iter::repeat_n((x, e.signum()), e.unsigned_abs() as usize))
    }

    pub fn from_letters(letters: impl IntoIterator<Item = (usize, i64)>) -> Word {
        let mut out: Vec<(usize, i64)> = Vec::new();
        for (x, e) in letters {
            if e == 0 {
                continue;
            }
            match out.last_mut() {
                Some((y, f)) if *y == x => {
                    *f += e;
                    if *f == 0 {
                        out.pop();
                    }
                }
                _ => out.push((x, e)),
            }
        }
        Word(out)
    }

    /// Concatenation, without normalising.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&(x, e)| (x, -e)).collect())
    }

    /// Keeps only the syllables whose generator lies in `set`.
    ///
    /// Deleting generators is a retraction onto a parabolic subgroup, so this
    /// is a homomorphism.
    pub fn project(&self, set: &VertexSet) -> Word {
        Word::from_letters(self.0.iter().copied().filter(|(x, _)| set.contains(x)))
    }

    pub fn format(&self, g: &Graph) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        self.0
            .iter()
            .map(|&(x, e)| {
                if e == 1 {
                    g.name(x).to_string()
                } else {
                    format!("{}^{}", g.name(x), e)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// JSON form: list of `["gen", exp]`.
    pub fn to_json(&self, g: &Graph) -> serde_json::Value {
        serde_json::Value::Array(
            self.0
                .iter()
                .map(|&(x, e)| serde_json::json!([g.name(x), e]))
                .collect(),
        )
    }

    pub fn from_json(g: &Graph, v: &serde_json::Value) -> Result<Word> {
        let items: Vec<(String, i64)> = serde_json::from_value(v.clone())
            .map_err(|e| Error::Parse(format!("word JSON: {e}")))?;
        let mut out = Vec::new();
        for (name, e) in items {
            let x = g.vertex(&name).ok_or(Error::UnknownGenerator(name))?;
            out.push((x, e));
        }
        Ok(Word::from_letters(out))
    }
}

fn letter_key((x, e): (usize, i64)) -> (usize, u8) {
    (x, u8::from(e < 0))
}

/// Shortlex: shorter first, then lexicographic on letters with `x < x^-1 < y`.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            self.letters()
                .map(letter_key)
                .cmp(other.letters().map(letter_key))
        })
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const SPECIAL: &[char] = &['^', '(', ')', '[', ']', ',', '{', '}', '*'];

/// Generator names: a letter, `_` or non-ASCII symbol first, then letters,
/// digits, `_`, `'`, `.` or non-ASCII symbols.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    let ok_start = |c: char| {
        (c.is_alphabetic() || c == '_' || !c.is_ascii()) && !c.is_whitespace() && !SPECIAL.contains(&c)
    };
    let ok_rest = |c: char| ok_start(c) || c.is_ascii_digit() || c == '\'' || c == '.';
    ok_start(first) && chars.all(ok_rest)
}

/// Turns a display string into something [`is_identifier`] accepts.
pub fn sanitize_identifier(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        if c.is_whitespace() {
            continue;
        }
        if c == '^' {
            continue;
        }
        if c == '-' {
            out.push('_');
            continue;
        }
        if c.is_alphanumeric() || c == '_' || c == '\'' || c == '.' || !c.is_ascii() {
            out.push(c);
        }
    }
    if out.is_empty() || !is_identifier(&out) {
        out.insert(0, '_');
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || c == '*' || c == '·' {
            i += 1;
            continue;
        }
        match c {
            '^' => out.push(Tok::Caret),
            '(' => out.push(Tok::LParen),
            ')' => out.push(Tok::RParen),
            '[' => out.push(Tok::LBracket),
            ']' => out.push(Tok::RBracket),
            ',' => out.push(Tok::Comma),
            _ if c.is_ascii_digit() || c == '-' || c == '+' => {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let v = text
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad integer {text:?}")))?;
                out.push(Tok::Int(v));
                continue;
            }
            _ => {
                let start = i;
                while i < chars.len()
                    && !chars[i].is_whitespace()
                    && !SPECIAL.contains(&chars[i])
                    && chars[i] != '·'
                {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                if !is_identifier(&text) {
                    return Err(Error::Parse(format!("bad generator name {text:?}")));
                }
                out.push(Tok::Ident(text));
                continue;
            }
        }
        i += 1;
    }
    Ok(out)
}

struct LetterParser {
    toks: Vec<Tok>,
    pos: usize,
}

type Letters = Vec<(String, i64)>;

fn invert_letters(w: &Letters) -> Letters {
    w.iter().rev().map(|(x, e)| (x.clone(), -e)).collect()
}

fn power_letters(w: &Letters, k: i64) -> Letters {
    let base = if k < 0 { invert_letters(w) } else { w.clone() };
    let mut out = Vec::new();
    for _ in 0..k.unsigned_abs() {
        out.extend(base.iter().cloned());
    }
    out
}

impl LetterParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn expr(&mut self) -> Result<Letters> {
        let mut out = Vec::new();
        while let Some(t) = self.peek() {
            if matches!(t, Tok::RParen | Tok::RBracket | Tok::Comma) {
                break;
            }
            out.extend(self.item()?);
        }
        Ok(out)
    }

    fn item(&mut self) -> Result<Letters> {
        let mut base = self.primary()?;
        while self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Int(k)) => {
                    self.pos += 1;
                    base = power_letters(&base, k);
                }
                Some(Tok::Ident(h)) => {
                    // conjugation x^h = h^-1 x h
                    self.pos += 1;
                    let mut out = vec![(h.clone(), -1)];
                    out.extend(base);
                    out.push((h, 1));
                    base = out;
                }
                Some(Tok::LParen) => {
                    self.pos += 1;
                    let h = self.expr()?;
                    self.expect(Tok::RParen)?;
                    let mut out = invert_letters(&h);
                    out.extend(base);
                    out.extend(h);
                    base = out;
                }
                other => return Err(Error::Parse(format!("expected exponent, found {other:?}"))),
            }
        }
        Ok(base)
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!("expected {t:?}, found {:?}", self.peek())))
        }
    }

    fn primary(&mut self) -> Result<Letters> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Ident(x)) => {
                self.pos += 1;
                Ok(vec![(x, 1)])
            }
            Some(Tok::Int(1)) => {
                self.pos += 1;
                Ok(Vec::new())
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::LBracket) => {
                // [x, y] = x^-1 y^-1 x y
                self.pos += 1;
                let x = self.expr()?;
                self.expect(Tok::Comma)?;
                let y = self.expr()?;
                self.expect(Tok::RBracket)?;
                let mut out = invert_letters(&x);
                out.extend(invert_letters(&y));
                out.extend(x);
                out.extend(y);
                Ok(out)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses `"a b^-2 c"`, also accepting `1`, parentheses with exponents,
/// commutators `[x, y] = x^-1 y^-1 x y` and conjugates `x^y = y^-1 x y`.
pub fn parse_letters(s: &str) -> Result<Vec<(String, i64)>> {
    let toks = tokenize(s)?;
    let mut p = LetterParser { toks, pos: 0 };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {:?}", p.toks[p.pos])));
    }
    Ok(out)
}

/// Parses a word over the graph's generators (not normalised).
pub fn parse_word(g: &Graph, s: &str) -> Result<Word> {
    let letters = parse_letters(s)?;
    let mut out = Vec::with_capacity(letters.len());
    for (name, e) in letters {
        let x = g.vertex(&name).ok_or(Error::UnknownGenerator(name))?;
        out.push((x, e));
    }
    Ok(Word::from_letters(out))
}

/// Parses and normalises.
pub fn word(g: &Graph, s: &str) -> Result<Word> {
    Ok(normalize(g, &parse_word(g, s)?))
}

/// Shortlex normal form: piling reduction, then the least linearisation.
pub fn normalize(g: &Graph, w: &Word) -> Word {
    let mut syl: Vec<(usize, i64)> = Vec::with_capacity(w.0.len());
    for &(x, e) in &w.0 {
        if e == 0 {
            continue;
        }
        let mut hit = None;
        for i in (0..syl.len()).rev() {
            let y = syl[i].0;
            if y == x {
                hit = Some(i);
                break;
            }
            if !g.commute(x, y) {
                break;
            }
        }
        match hit {
            Some(i) => {
                syl[i].1 += e;
                if syl[i].1 == 0 {
                    syl.remove(i);
                }
            }
            None => syl.push((x, e)),
        }
    }
    linearize(g, syl)
}

/// Emits syllables in the lexicographically least order compatible with
/// the non-commutation dependencies.
fn linearize(g: &Graph, syl: Vec<(usize, i64)>) -> Word {
    let n = syl.len();
    let mut blockers = vec![0usize; n];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if !g.commute(syl[i].0, syl[j].0) {
                blockers[j] += 1;
                succ[i].push(j);
            }
        }
    }
    let mut ready: std::collections::BTreeSet<(usize, usize)> = (0..n)
        .filter(|&i| blockers[i] == 0)
        .map(|i| (syl[i].0, i))
        .collect();
    let mut out = Vec::with_capacity(n);
    while let Some(&first) = ready.iter().next() {
        ready.remove(&first);
        let i = first.1;
        out.push(syl[i]);
        for &j in &succ[i] {
            blockers[j] -= 1;
            if blockers[j] == 0 {
                ready.insert((syl[j].0, j));
            }
        }
    }
    Word(out)
}

pub fn mul(g: &Graph, a: &Word, b: &Word) -> Word {
    normalize(g, &a.concat(b))
}

pub fn inv(g: &Graph, a: &Word) -> Word {
    normalize(g, &a.inverse())
}

pub fn pow(g: &Graph, a: &Word, k: i64) -> Word {
    let base = if k < 0 { a.inverse() } else { a.clone() };
    let mut v = Vec::with_capacity(base.0.len() * k.unsigned_abs() as usize);
    for _ in 0..k.unsigned_abs() {
        v.extend_from_slice(&base.0);
    }
    normalize(g, &Word(v))
}

/// `h^-1 w h`.
pub fn conjugate(g: &Graph, w: &Word, h: &Word) -> Word {
    normalize(g, &h.inverse().concat(w).concat(h))
}

/// `[a, b] = a^-1 b^-1 a b`.
pub fn commutator(g: &Graph, a: &Word, b: &Word) -> Word {
    normalize(g, &a.inverse().concat(&b.inverse()).concat(a).concat(b))
}

pub fn equals(g: &Graph, u: &Word, v: &Word) -> bool {
    normalize(g, &u.concat(&v.inverse())).is_identity()
}

pub fn commute(g: &Graph, a: &Word, b: &Word) -> bool {
    commutator(g, a, b).is_identity()
}

/// Syllables of a normal form that can be shuffled to the front.
pub fn first_syllables(g: &Graph, w: &Word) -> Vec<usize> {
    (0..w.0.len())
        .filter(|&i| (0..i).all(|j| g.commute(w.0[i].0, w.0[j].0)))
        .collect()
}

/// Syllables of a normal form that can be shuffled to the end.
pub fn last_syllables(g: &Graph, w: &Word) -> Vec<usize> {
    (0..w.0.len())
        .filter(|&i| (i + 1..w.0.len()).all(|j| g.commute(w.0[i].0, w.0[j].0)))
        .collect()
}

pub fn is_cyclically_reduced(g: &Graph, w: &Word) -> bool {
    let w = normalize(g, w);
    pow(g, &w, 2).len() == 2 * w.len()
}

/// Returns `(core, conjugator)` with `w = conjugator · core · conjugator^-1`
/// and `core` cyclically reduced.
pub fn cyclic_reduce(g: &Graph, w: &Word) -> (Word, Word) {
    let mut cur = normalize(g, w);
    let mut conj = Word::identity();
    loop {
        let firsts = first_syllables(g, &cur);
        let lasts = last_syllables(g, &cur);
        let mut step = None;
        'search: for &i in &firsts {
            for &j in &lasts {
                let (x, e) = cur.0[i];
                let (y, f) = cur.0[j];
                if i != j && x == y && e.signum() != f.signum() {
                    step = Some((x, e.signum() * e.abs().min(f.abs())));
                    break 'search;
                }
            }
        }
        let Some((x, k)) = step else {
            return (cur, conj);
        };
        let xk = Word::power_of(x, k);
        cur = conjugate(g, &cur, &xk);
        conj = mul(g, &conj, &xk);
    }
}

/// Blocks of a cyclically reduced word, one per complement component of its
/// support, ordered by least vertex.
pub fn block_decompose(g: &Graph, w: &Word) -> Result<Vec<Word>> {
    let w = normalize(g, w);
    if !is_cyclically_reduced(g, &w) {
        return Err(Error::NotCyclicallyReduced);
    }
    Ok(g.complement_components(&w.support())
        .into_iter()
        .map(|comp| w.project(&comp))
        .collect())
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Unique root and multiplicity: `w = root^multiplicity`, root not a proper power.
pub fn root(g: &Graph, w: &Word) -> Result<(Word, u64)> {
    root_with_budget(g, w, ROOT_BUDGET)
}

pub fn root_with_budget(g: &Graph, w: &Word, budget: usize) -> Result<(Word, u64)> {
    let w = normalize(g, w);
    if w.is_identity() {
        return Err(Error::Identity("root"));
    }
    let (core, conj) = cyclic_reduce(g, &w);
    let blocks = block_decompose(g, &core)?;
    let mut parts = Vec::with_capacity(blocks.len());
    for b in &blocks {
        parts.push(block_root(g, b, budget)?);
    }
    let m = parts.iter().fold(0, |acc, (_, k)| gcd(acc, *k));
    let mut r = Word::identity();
    for (p, k) in &parts {
        r = r.concat(&pow(g, p, (*k / m) as i64));
    }
    let r = conjugate(g, &normalize(g, &r), &inv(g, &conj));
    Ok((r, m))
}

/// Root of a single block.
fn block_root(g: &Graph, b: &Word, budget: usize) -> Result<(Word, u64)> {
    if b.0.len() == 1 {
        let (x, e) = b.0[0];
        return Ok((Word::power_of(x, e.signum()), e.unsigned_abs()));
    }
    let n = b.len();
    if n > budget {
        return Err(Error::BudgetExceeded(format!(
            "root search on a block of length {n} exceeds the budget {budget}"
        )));
    }
    let letters: Vec<(usize, i64)> = b.letters().collect();
    let mut divisors: Vec<usize> = (2..=n).filter(|k| n.is_multiple_of(*k)).collect();
    divisors.reverse();
    for k in divisors {
        let feasible = exponent_sums(&letters).iter().all(|(_, s)| s % k as i64 == 0);
        if !feasible {
            continue;
        }
        for ideal in order_ideals(g, &letters, n / k) {
            let p = Word::from_letters(ideal.iter().map(|&i| letters[i]));
            if pow(g, &p, k as i64) == *b {
                return Ok((normalize(g, &p), k as u64));
            }
        }
    }
    Ok((b.clone(), 1))
}

fn exponent_sums(letters: &[(usize, i64)]) -> Vec<(usize, i64)> {
    let mut sums: Vec<(usize, i64)> = Vec::new();
    for &(x, e) in letters {
        match sums.iter_mut().find(|(y, _)| *y == x) {
            Some((_, s)) => *s += e,
            None => sums.push((x, e)),
        }
    }
    sums
}

/// Downward-closed sets of letter positions of the given size, in the
/// dependency order of the word. Each is returned as sorted positions.
fn order_ideals(g: &Graph, letters: &[(usize, i64)], size: usize) -> Vec<Vec<usize>> {
    let n = letters.len();
    let preds: Vec<u64> = (0..n)
        .map(|j| {
            (0..j)
                .filter(|&i| !g.commute(letters[i].0, letters[j].0))
                .fold(0u64, |m, i| m | (1 << i))
        })
        .collect();
    let mut level: HashSet<u64> = HashSet::from([0u64]);
    for _ in 0..size {
        let mut next = HashSet::new();
        for &s in &level {
            for j in 0..n {
                if s & (1 << j) == 0 && preds[j] & !s == 0 {
                    next.insert(s | (1 << j));
                }
            }
        }
        level = next;
    }
    let mut out: Vec<Vec<usize>> = level
        .into_iter()
        .map(|s| (0..n).filter(|&i| s & (1 << i) != 0).collect())
        .collect();
    out.sort();
    out
}

/// Cyclically reduced conjugates reachable by moving a first letter to the
/// end or a last letter to the front. Each conjugate `v` comes with the
/// conjugators `p` (at the least number of moves) such that `v = p^-1 w p`.
/// The search fails after `limit` states.
pub fn cyclic_conjugates(g: &Graph, w: &Word, limit: usize) -> Result<Vec<(Word, Vec<Word>)>> {
    const KEEP: usize = 32;
    let start = normalize(g, w);
    let mut found: BTreeMap<Word, Vec<Word>> = BTreeMap::new();
    found.insert(start.clone(), vec![Word::identity()]);
    let mut frontier = vec![start];
    while !frontier.is_empty() {
        let mut next: BTreeMap<Word, Vec<Word>> = BTreeMap::new();
        for cur in &frontier {
            let mut moves: Vec<Word> = Vec::new();
            for i in first_syllables(g, cur) {
                let (x, e) = cur.0[i];
                moves.push(Word::power_of(x, e.signum()));
            }
            for j in last_syllables(g, cur) {
                let (x, e) = cur.0[j];
                moves.push(Word::power_of(x, -e.signum()));
            }
            for h in moves {
                let nxt = conjugate(g, cur, &h);
                if nxt.len() != cur.len() || found.contains_key(&nxt) {
                    continue;
                }
                let ps = next.entry(nxt).or_default();
                for p in &found[cur] {
                    let q = mul(g, p, &h);
                    if !ps.contains(&q) {
                        ps.push(q);
                    }
                }
            }
        }
        let mut fresh = Vec::with_capacity(next.len());
        for (k, mut ps) in next {
            ps.sort();
            ps.truncate(KEEP);
            found.insert(k.clone(), ps);
            fresh.push(k);
            if found.len() > limit {
                return Err(Error::BudgetExceeded(format!("more than {limit} cyclic conjugates")));
            }
        }
        frontier = fresh;
    }
    Ok(found.into_iter().collect())
}
