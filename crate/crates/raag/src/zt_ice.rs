//! Finite chains of centraliser extensions by C ⊗ tℤ[t]/(t^(d+1)), truncated
//! ℤ[t]-exponentiation and the specialisation t ↦ m.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::amalgam::extend;
use crate::centralizers::{AxiomResult, Status};
use crate::discrimination::retract_with;
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphSpec};
use crate::group::{Elem, Group, Sub};
use crate::words;

/// An integer polynomial in t, constant term first, without trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyExp(Vec<i64>);

impl PolyExp {
    pub fn new(mut coeffs: Vec<i64>) -> PolyExp {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PolyExp(coeffs)
    }

    pub fn constant(c: i64) -> PolyExp {
        PolyExp::new(vec![c])
    }

    pub fn t() -> PolyExp {
        PolyExp::new(vec![0, 1])
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn coeff(&self, j: usize) -> i64 {
        self.0.get(j).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn as_constant(&self) -> Option<i64> {
        (self.0.len() <= 1).then(|| self.coeff(0))
    }

    pub fn add(&self, other: &PolyExp) -> PolyExp {
        let n = self.0.len().max(other.0.len());
        PolyExp::new((0..n).map(|j| self.coeff(j) + other.coeff(j)).collect())
    }

    pub fn mul(&self, other: &PolyExp) -> PolyExp {
        if self.is_zero() || other.is_zero() {
            return PolyExp::default();
        }
        let mut out = vec![0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyExp::new(out)
    }

    pub fn eval(&self, m: i64) -> i64 {
        self.0.iter().rev().fold(0, |acc, &c| acc * m + c)
    }

    /// Parses sums of terms like `2`, `-3t`, `t^2`, `5*t^3`.
    pub fn parse(s: &str) -> Result<PolyExp> {
        let bad = || Error::Parse(format!("bad polynomial {s:?}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        let mut terms = Vec::new();
        let mut cur = String::new();
        for (i, c) in compact.char_indices() {
            if (c == '+' || c == '-') && i > 0 && !cur.ends_with('^') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(c);
        }
        terms.push(cur);
        let mut coeffs: Vec<i64> = Vec::new();
        for term in terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(rest) => (-1, rest),
                None => (1, term.strip_prefix('+').unwrap_or(&term)),
            };
            if body.is_empty() {
                return Err(bad());
            }
            let (c, j) = match body.find('t') {
                None => (body.parse::<i64>().map_err(|_| bad())?, 0usize),
                Some(pos) => {
                    let head = body[..pos].trim_end_matches('*');
                    let c = if head.is_empty() { 1 } else { head.parse::<i64>().map_err(|_| bad())? };
                    let tail = &body[pos + 1..];
                    let j = if tail.is_empty() {
                        1
                    } else {
                        tail.strip_prefix('^').ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?
                    };
                    (c, j)
                }
            };
            if coeffs.len() <= j {
                coeffs.resize(j + 1, 0);
            }
            coeffs[j] += sign * c;
        }
        Ok(PolyExp::new(coeffs))
    }
}

impl fmt::Display for PolyExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            let body = match (j, mag) {
                (0, _) => mag.to_string(),
                (1, 1) => "t".to_string(),
                (1, _) => format!("{mag}t"),
                (_, 1) => format!("t^{j}"),
                _ => format!("{mag}t^{j}"),
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        Ok(())
    }
}

/// One extension step: level `i+1` extends C(u) of level `i`.
#[derive(Clone, Debug)]
pub struct IceStep {
    pub u: Elem,
    pub degree: usize,
    /// Basis of C(u) in level `i`.
    pub basis: Vec<Elem>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepSpec {
    pub u: String,
    pub degree: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IceSpec {
    pub base: GraphSpec,
    #[serde(default)]
    pub steps: Vec<StepSpec>,
}

#[derive(Clone, Debug)]
pub struct IceChain {
    pub levels: Vec<Group>,
    pub steps: Vec<IceStep>,
}

fn a_names(grp: &Group, basis: &[Elem], degree: usize) -> Vec<String> {
    let mut taken = grp.names();
    let mut out = Vec::new();
    for j in 1..=degree {
        for c in basis {
            let stem = words::sanitize_identifier(&grp.format(c));
            let mut name = if j == 1 { format!("{stem}⊗t") } else { format!("{stem}⊗t{j}") };
            while taken.contains(&name) {
                name.push('\'');
            }
            taken.push(name.clone());
            out.push(name);
        }
    }
    out
}

/// Builds the chain; each step is parsed in the level it extends.
pub fn build_ice(base: &Graph, steps: &[(String, usize)]) -> Result<IceChain> {
    if !base.is_chordal().0 {
        return Err(Error::NotChordal);
    }
    let mut levels = vec![Group::raag(base.clone())];
    let mut out_steps = Vec::new();
    for (u, degree) in steps {
        if *degree == 0 {
            return Err(Error::Precondition("step degree must be at least 1".into()));
        }
        let grp = levels.last().expect("nonempty").clone();
        let u = grp.parse(u)?;
        let c = grp.abelian_centralizer(&u)?;
        let basis = grp.basis(&c);
        let names = a_names(&grp, &basis, *degree);
        let next = extend(&grp, &u, basis.len() * degree, Some(names))?;
        out_steps.push(IceStep { u, degree: *degree, basis });
        levels.push(next);
    }
    Ok(IceChain { levels, steps: out_steps })
}

pub fn build_from_spec(spec: &IceSpec) -> Result<IceChain> {
    let g = Graph::from_spec(&spec.base)?;
    let steps: Vec<(String, usize)> = spec.steps.iter().map(|s| (s.u.clone(), s.degree)).collect();
    build_ice(&g, &steps)
}

impl IceChain {
    pub fn top(&self) -> &Group {
        self.levels.last().expect("nonempty")
    }

    pub fn height(&self) -> usize {
        self.steps.len()
    }

    /// Index of the A-generator c_k ⊗ t^j of a level with `r` basis elements.
    fn a_index(r: usize, k: usize, j: usize) -> usize {
        (j - 1) * r + k
    }

    /// `x` from level `from`, embedded in the top.
    pub fn lift(&self, from: usize, x: &Elem) -> Elem {
        self.top().lift_from(self.height() - from, x)
    }

    /// `x` (a top element) as an element of level `i`, if it lies there.
    pub fn lower_to(&self, i: usize, x: &Elem) -> Option<Elem> {
        let mut y = x.clone();
        for lvl in (i + 1..=self.height()).rev() {
            y = self.levels[lvl].lower(&y)?;
        }
        Some(y)
    }

    /// Conjugates the top element `x` as far down the chain as cyclic
    /// reduction allows: `(level, y, t)` with `x = t · y · t^-1`.
    pub fn conj_down(&self, x: &Elem) -> (usize, Elem, Elem) {
        let top = self.top();
        let mut lvl = self.native_level(x);
        let mut y = self.lower_to(lvl, x).expect("native level");
        let mut t = top.identity();
        while lvl > 0 {
            let grp = &self.levels[lvl];
            let (core, c) = grp.cyclic_reduce(&y);
            let Some(z) = grp.lower(&core) else { break };
            t = top.mul(&t, &self.lift(lvl, &c));
            y = z;
            lvl -= 1;
        }
        (lvl, y, t)
    }

    /// The lowest level containing the top element `x`.
    pub fn native_level(&self, x: &Elem) -> usize {
        let mut y = x.clone();
        let mut lvl = self.height();
        while lvl > 0 {
            match self.levels[lvl].lower(&y) {
                Some(z) => {
                    y = z;
                    lvl -= 1;
                }
                None => break,
            }
        }
        lvl
    }

    /// The specialisation t ↦ m, down to level 0.
    pub fn specialize(&self, x: &Elem, m: i64) -> Elem {
        let mut y = x.clone();
        for lvl in (1..=self.height()).rev() {
            let ext = self.levels[lvl].ext().expect("extension level");
            let step = &self.steps[lvl - 1];
            let r = step.basis.len();
            let mut images = vec![ext.base.identity(); ext.a_rank()];
            for (k, c) in step.basis.iter().enumerate() {
                for j in 1..=step.degree {
                    images[Self::a_index(r, k, j)] = ext.base.pow(c, m.pow(j as u32));
                }
            }
            y = retract_with(ext, &images, &y);
        }
        y
    }

    /// `x^α` for a top element `x`.
    pub fn pow(&self, x: &Elem, alpha: &PolyExp) -> Result<Elem> {
        let top = self.top();
        if let Some(c) = alpha.as_constant() {
            return Ok(top.pow(x, c));
        }
        if top.is_identity(x) {
            return Ok(x.clone());
        }
        let (low, x0, t0) = self.conj_down(x);
        let mut short: Option<usize> = None;
        for i in low.max(1)..=self.height() {
            let grp = &self.levels[i];
            let xi = grp.lift_from(i - low, &x0);
            let Some(t) = grp.conj_into(&xi, &Sub::Factor)? else { continue };
            let y = grp.conj(&xi, &t);
            if grp.centralizer(&y)?.sub.is_none() {
                continue;
            }
            let coords = grp.coords(&Sub::Factor, &y).expect("conjugated into B");
            let step = &self.steps[i - 1];
            let (r, d) = (step.basis.len(), step.degree);
            let mut out = vec![0; coords.len()];
            let mut fits = true;
            for k in 0..r {
                let mut p = vec![coords[k]];
                p.extend((1..=d).map(|j| coords[r + Self::a_index(r, k, j)]));
                let q = PolyExp::new(p).mul(alpha);
                if q.degree() > d {
                    short = Some(short.map_or(q.degree(), |s: usize| s.max(q.degree())));
                    fits = false;
                    break;
                }
                out[k] = q.coeff(0);
                for j in 1..=d {
                    out[r + Self::a_index(r, k, j)] = q.coeff(j);
                }
            }
            if !fits {
                continue;
            }
            let z = grp.from_coords(&Sub::Factor, &out);
            let back = self.lift(i, &grp.conj(&z, &grp.inv(&t)));
            return Ok(top.conj(&back, &top.inv(&t0)));
        }
        match short {
            Some(degree) => Err(Error::TruncationExceeded {
                degree,
                available: self.steps.iter().map(|s| s.degree).max().unwrap_or(0),
            }),
            None => Err(Error::Precondition(format!(
                "{} is not conjugate into an extended centraliser",
                top.format(x)
            ))),
        }
    }

    pub fn eval(&self, e: &ZtExpression) -> Result<Elem> {
        let top = self.top();
        match e {
            ZtExpression::Gen(name) => top.gen(name).ok_or_else(|| Error::UnknownGenerator(name.clone())),
            ZtExpression::Identity => Ok(top.identity()),
            ZtExpression::Product(fs) => {
                let parts = fs.iter().map(|f| self.eval(f)).collect::<Result<Vec<_>>>()?;
                Ok(top.product(parts.iter()))
            }
            ZtExpression::Pow(b, alpha) => self.pow(&self.eval(b)?, alpha),
        }
    }

    /// Evaluates `e` and specialises at `m`.
    pub fn eval_at(&self, e: &ZtExpression, m: i64) -> Result<Elem> {
        Ok(self.specialize(&self.eval(e)?, m))
    }

    pub fn describe(&self) -> Value {
        let levels: Vec<Value> = self
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let g = &self.levels[i];
                let ext = self.levels[i + 1].ext().expect("extension level");
                json!({
                    "level": i + 1,
                    "u": g.format(&s.u),
                    "degree": s.degree,
                    "centralizer_basis": s.basis.iter().map(|b| g.format(b)).collect::<Vec<_>>(),
                    "a_rank": ext.a_rank(),
                    "a_generators": ext.a_names,
                })
            })
            .collect();
        json!({ "base": self.levels[0].graph().to_spec(), "levels": levels })
    }
}

/// Products of generators and parenthesised subexpressions raised to
/// polynomial exponents, as in `x^{2+t} (y x)^{t^2} y^-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZtExpression {
    Identity,
    Gen(String),
    Product(Vec<ZtExpression>),
    Pow(Box<ZtExpression>, PolyExp),
}

impl ZtExpression {
    pub fn parse(s: &str) -> Result<ZtExpression> {
        let chars: Vec<char> = s.chars().collect();
        let mut p = ExprParser { chars, pos: 0 };
        let e = p.product()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(Error::Parse(format!("unexpected {:?} in {s:?}", p.chars[p.pos])));
        }
        Ok(e)
    }
}

impl fmt::Display for ZtExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZtExpression::Identity => write!(f, "1"),
            ZtExpression::Gen(n) => write!(f, "{n}"),
            ZtExpression::Product(fs) => {
                let parts: Vec<String> = fs.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", parts.join(" "))
            }
            ZtExpression::Pow(b, a) => {
                let base = match b.as_ref() {
                    ZtExpression::Product(_) | ZtExpression::Pow(..) => format!("({b})"),
                    _ => b.to_string(),
                };
                match a.as_constant() {
                    Some(c) => write!(f, "{base}^{c}"),
                    None => write!(f, "{base}^{{{a}}}"),
                }
            }
        }
    }
}

struct ExprParser {
    chars: Vec<char>,
    pos: usize,
}

impl ExprParser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {}", self.pos))
    }

    fn product(&mut self) -> Result<ZtExpression> {
        let mut fs = Vec::new();
        while let Some(c) = self.peek() {
            if c == ')' {
                break;
            }
            fs.push(self.factor()?);
        }
        Ok(match fs.len() {
            0 => ZtExpression::Identity,
            1 => fs.pop().expect("one factor"),
            _ => ZtExpression::Product(fs),
        })
    }

    fn factor(&mut self) -> Result<ZtExpression> {
        let mut base = self.atom()?;
        while self.peek() == Some('^') {
            self.pos += 1;
            let exp = if self.peek() == Some('{') {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos] != '}' {
                    self.pos += 1;
                }
                if self.pos == self.chars.len() {
                    return Err(self.err("unclosed '{'"));
                }
                let text: String = self.chars[start..self.pos].iter().collect();
                self.pos += 1;
                PolyExp::parse(&text)?
            } else {
                let start = self.pos;
                if self.chars.get(self.pos) == Some(&'-') {
                    self.pos += 1;
                }
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text: String = self.chars[start..self.pos].iter().collect();
                PolyExp::constant(text.parse().map_err(|_| self.err("expected an exponent"))?)
            };
            base = ZtExpression::Pow(Box::new(base), exp);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ZtExpression> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.product()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(_) => {
                let start = self.pos;
                while self.pos < self.chars.len() {
                    let c = self.chars[self.pos];
                    if c.is_whitespace() || "(){}^".contains(c) {
                        break;
                    }
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                if name == "1" {
                    Ok(ZtExpression::Identity)
                } else if words::is_identifier(&name) {
                    Ok(ZtExpression::Gen(name))
                } else {
                    Err(self.err(&format!("bad generator {name:?}")))
                }
            }
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZtReport {
    pub axioms: Vec<AxiomResult>,
}

impl ZtReport {
    pub fn passed(&self) -> bool {
        self.axioms.iter().all(|a| a.status == Status::Pass)
    }

    pub fn get(&self, axiom: &str) -> Option<&AxiomResult> {
        self.axioms.iter().find(|a| a.axiom == axiom)
    }
}

struct Count {
    name: &'static str,
    checked: usize,
    skipped: usize,
    witness: Option<Value>,
}

impl Count {
    fn new(name: &'static str) -> Count {
        Count { name, checked: 0, skipped: 0, witness: None }
    }

    fn record(&mut self, ok: bool, w: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(w());
        }
    }

    fn done(self) -> AxiomResult {
        AxiomResult {
            axiom: self.name.to_string(),
            status: if self.witness.is_some() { Status::Fail } else { Status::Pass },
            checked: self.checked,
            skipped: self.skipped,
            witness: self.witness,
        }
    }
}

fn random_poly(rng: &mut impl Rng, degree: usize) -> PolyExp {
    let d = rng.gen_range(0..=degree);
    let mut c: Vec<i64> = (0..=d).map(|_| rng.gen_range(-2..=2)).collect();
    if d > 0 && c[d] == 0 {
        c[d] = 1;
    }
    PolyExp::new(c)
}

/// A random element of B at a random level, conjugated at the top, plus the
/// conjugator and level, so that commuting partners can be drawn.
fn random_exponentiable(chain: &IceChain, rng: &mut impl Rng) -> (Elem, Elem, usize) {
    let top = chain.top();
    let i = rng.gen_range(1..=chain.height());
    let grp = &chain.levels[i];
    let basis = grp.basis(&Sub::Factor);
    let r = chain.steps[i - 1].basis.len();
    let constant_only = rng.gen_bool(0.5);
    let mut b = grp.identity();
    for _ in 0..32 {
        let coords: Vec<i64> = (0..basis.len())
            .map(|k| if k < r || !constant_only { rng.gen_range(-2..=2) } else { 0 })
            .collect();
        let cand = grp.from_coords(&Sub::Factor, &coords);
        if grp.centralizer(&cand).is_ok_and(|c| c.sub.is_some()) {
            b = cand;
            break;
        }
    }
    let b = chain.lift(i, &b);
    let len = rng.gen_range(0..=3);
    let h = top.random_elem(rng, len);
    (top.conj(&b, &h), h, i)
}

/// Another element of the same conjugate of B, also with abelian centraliser.
fn same_b(chain: &IceChain, h: &Elem, i: usize, rng: &mut impl Rng) -> Option<Elem> {
    let grp = &chain.levels[i];
    let basis = grp.basis(&Sub::Factor);
    for _ in 0..32 {
        let coords: Vec<i64> = (0..basis.len()).map(|_| rng.gen_range(-1..=1)).collect();
        let cand = grp.from_coords(&Sub::Factor, &coords);
        if grp.centralizer(&cand).is_ok_and(|c| c.sub.is_some()) {
            return Some(chain.top().conj(&chain.lift(i, &cand), h));
        }
    }
    None
}

/// Seeded checks of the exponentiation axioms, exactly in the top group and
/// after specialisation at each `m`.
pub fn axiom_check(chain: &IceChain, samples: usize, m_values: &[i64], seed: u64) -> ZtReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = chain.top().clone();
    let degree = chain.steps.iter().map(|s| s.degree).max().unwrap_or(0);
    let mut sum = Count::new("sum");
    let mut prod = Count::new("product");
    let mut conj = Count::new("conjugation");
    let mut comm = Count::new("commuting");
    let mut unit = Count::new("identities");
    let mut hom = Count::new("homomorphism");
    if chain.height() == 0 {
        return ZtReport { axioms: vec![sum.done(), prod.done(), conj.done(), comm.done(), unit.done(), hom.done()] };
    }
    let fmt = |x: &Elem| top.format(x);
    for _ in 0..samples {
        let (g, h, lvl) = random_exponentiable(chain, &mut rng);
        let alpha = random_poly(&mut rng, degree);
        let beta = random_poly(&mut rng, degree);
        let wit = |what: &str| json!({"g": fmt(&g), "alpha": alpha.to_string(), "beta": beta.to_string(), "case": what});

        match (chain.pow(&g, &alpha.add(&beta)), chain.pow(&g, &alpha), chain.pow(&g, &beta)) {
            (Ok(ab), Ok(ga), Ok(gb)) => {
                sum.record(ab == top.mul(&ga, &gb), || wit("exact"));
                for &m in m_values {
                    let lhs = chain.specialize(&ab, m);
                    let base = chain.levels[0].clone();
                    let rhs = base.mul(&chain.specialize(&ga, m), &chain.specialize(&gb, m));
                    sum.record(lhs == rhs, || wit(&format!("m = {m}")));
                }
            }
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) if e.is_budget() => sum.skipped += 1,
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => sum.record(false, || json!({"g": fmt(&g), "error": e.to_string()})),
        }

        let ab = alpha.mul(&beta);
        match (chain.pow(&g, &ab), chain.pow(&g, &alpha)) {
            (Ok(gab), Ok(ga)) => {
                let base = chain.levels[0].clone();
                for &m in m_values {
                    let lhs = chain.specialize(&gab, m);
                    let rhs = base.pow(&chain.specialize(&g, m), ab.eval(m));
                    prod.record(lhs == rhs, || wit(&format!("m = {m}")));
                }
                match chain.pow(&ga, &beta) {
                    Ok(gab2) => prod.record(gab == gab2, || wit("exact")),
                    Err(e) if e.is_budget() => prod.skipped += 1,
                    Err(e) => prod.record(false, || json!({"g": fmt(&g), "error": e.to_string()})),
                }
            }
            (Err(e), _) | (_, Err(e)) if e.is_budget() => prod.skipped += 1,
            (Err(e), _) | (_, Err(e)) => prod.record(false, || json!({"g": fmt(&g), "error": e.to_string()})),
        }

        let len = rng.gen_range(1..=3);
        let k = top.random_elem(&mut rng, len);
        match (chain.pow(&top.conj(&g, &k), &alpha), chain.pow(&g, &alpha)) {
            (Ok(lhs), Ok(ga)) => {
                let rhs = top.conj(&ga, &k);
                conj.record(lhs == rhs, || wit("exact"));
                for &m in m_values {
                    conj.record(chain.specialize(&lhs, m) == chain.specialize(&rhs, m), || wit(&format!("m = {m}")));
                }
            }
            (Err(e), _) | (_, Err(e)) if e.is_budget() => conj.skipped += 1,
            (Err(e), _) | (_, Err(e)) => conj.record(false, || json!({"g": fmt(&g), "error": e.to_string()})),
        }

        let g2 = same_b(chain, &h, lvl, &mut rng);
        let gg = g2.as_ref().map(|g2| top.mul(&g, g2));
        match (g2, gg) {
            (Some(g2), Some(gg)) if top.centralizer(&gg).is_ok_and(|c| c.sub.is_some()) => {
                match (chain.pow(&gg, &alpha), chain.pow(&g, &alpha), chain.pow(&g2, &alpha)) {
                    (Ok(lhs), Ok(a), Ok(b)) => {
                        let rhs = top.mul(&a, &b);
                        comm.record(lhs == rhs, || wit("exact"));
                        for &m in m_values {
                            comm.record(chain.specialize(&lhs, m) == chain.specialize(&rhs, m), || {
                                wit(&format!("m = {m}"))
                            });
                        }
                    }
                    (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) if e.is_budget() => comm.skipped += 1,
                    (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => {
                        comm.record(false, || json!({"g": fmt(&g), "error": e.to_string()}))
                    }
                }
            }
            // The product left the exponentiable part of B.
            _ => comm.skipped += 1,
        }

        let zero = chain.pow(&g, &PolyExp::default());
        unit.record(zero.as_ref().is_ok_and(|z| top.is_identity(z)), || wit("g^0"));
        let one = chain.pow(&g, &PolyExp::constant(1));
        unit.record(one.as_ref().is_ok_and(|z| *z == g), || wit("g^1"));
        let trivial = chain.pow(&top.identity(), &alpha);
        unit.record(trivial.as_ref().is_ok_and(|z| top.is_identity(z)), || wit("1^alpha"));

        let x = top.random_elem(&mut rng, 4);
        let y = top.random_elem(&mut rng, 4);
        for &m in m_values {
            let base = &chain.levels[0];
            let lhs = chain.specialize(&top.mul(&x, &y), m);
            let rhs = base.mul(&chain.specialize(&x, m), &chain.specialize(&y, m));
            hom.record(lhs == rhs, || json!({"x": fmt(&x), "y": fmt(&y), "m": m}));
        }
    }
    ZtReport { axioms: vec![sum.done(), prod.done(), conj.done(), comm.done(), unit.done(), hom.done()] }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2_chain(d: usize) -> IceChain {
        build_ice(&Graph::edgeless(&["x", "y"]), &[("x".into(), d)]).unwrap()
    }

    #[test]
    fn polynomials() {
        let p = PolyExp::parse("2+3t+t^2").unwrap();
        assert_eq!(p.coeffs(), &[2, 3, 1]);
        assert_eq!(p.to_string(), "2+3t+t^2");
        assert_eq!(PolyExp::parse("-t + 1").unwrap().coeffs(), &[1, -1]);
        assert_eq!(p.eval(2), 12);
        assert!(PolyExp::parse("t-t").unwrap().is_zero());
        assert!(PolyExp::parse("2x").is_err());
    }

    #[test]
    fn chain_shapes() {
        let c = f2_chain(1);
        assert_eq!(c.top().ext().unwrap().a_names, vec!["x⊗t".to_string()]);
        let p4 = build_ice(&Graph::p4(), &[("a c".into(), 1)]).unwrap();
        let names = &p4.top().ext().unwrap().a_names;
        assert_eq!(names.len(), 2);
        assert!(names.contains(&"ac⊗t".to_string()) && names.contains(&"b⊗t".to_string()));
        assert_eq!(build_ice(&Graph::p4(), &[]).unwrap().levels.len(), 1);
    }

    #[test]
    fn evaluation_examples() {
        let c = f2_chain(1);
        let base = &c.levels[0];
        let e = ZtExpression::parse("x^{t}").unwrap();
        assert_eq!(c.eval_at(&e, 2).unwrap(), base.parse("x^2").unwrap());
        let c2 = f2_chain(2);
        let e = ZtExpression::parse("x^{2+t^2}").unwrap();
        assert_eq!(c2.eval_at(&e, 3).unwrap(), c2.levels[0].parse("x^11").unwrap());
        let e = ZtExpression::parse("y^{0}").unwrap();
        assert!(base.is_identity(&c.eval_at(&e, 5).unwrap()));
        let e = ZtExpression::parse("x^{t^2}").unwrap();
        assert!(matches!(c.eval(&e), Err(Error::TruncationExceeded { .. })));
    }

    #[test]
    fn axioms_hold_on_f2() {
        let c = f2_chain(2);
        let r = axiom_check(&c, 30, &[1, 2, 3], 0);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn axioms_hold_on_two_levels() {
        let f2 = Graph::edgeless(&["x", "y"]);
        let c = build_ice(&f2, &[("x".into(), 1), ("y".into(), 1)]).unwrap();
        let r = axiom_check(&c, 30, &[1, 2], 3);
        assert!(r.passed(), "{r:?}");
    }
}
