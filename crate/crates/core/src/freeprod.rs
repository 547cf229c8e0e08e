//! Reduced words in free products of factor groups.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::group::{ElementOrder, GElem, Group, GroupError, GroupSpec};

/// Largest factor that `enumerate_ball` will expand letter by letter.
pub const BALL_FACTOR_CAP: u128 = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FreeProdError {
    #[error("a free product needs at least one factor")]
    NoFactors,
    #[error("factor index {0} out of range")]
    FactorOutOfRange(usize),
    #[error("word is not reduced at position {0}")]
    NotReduced(usize),
    #[error("word is not cyclically reduced")]
    NotCyclicallyReduced,
    #[error("factor {0} is infinite or too large to enumerate letter by letter")]
    InfiniteFactor(usize),
    #[error("cyclically reduced core has length {0}, need at least 2")]
    ShortCore(usize),
    #[error("element has odd parity and lies outside the subgroup")]
    NotInSubgroup,
    #[error("element cannot be written in the available generators: {0}")]
    NotDecomposable(String),
    #[error("homomorphism does not respect a relation: {0}")]
    RelationViolated(String),
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("cannot parse word expression: {0}")]
    Parse(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

type Result<T> = std::result::Result<T, FreeProdError>;

/// A list of factor groups.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FreeProductSpec {
    pub factors: Vec<GroupSpec>,
}

impl FreeProductSpec {
    pub fn new(factors: Vec<GroupSpec>) -> Self {
        Self { factors }
    }

    /// Compact notation such as `C2*C3`, `S3*C3`, `F2*C2`, `SL2_3_1`, `GL2_2_1`.
    pub fn parse_compact(text: &str) -> Result<Self> {
        let mut factors = Vec::new();
        for raw in text.split('*') {
            let t = raw.trim();
            let bad = || FreeProdError::Parse(format!("unknown factor {t:?}"));
            let num = |s: &str| s.parse::<u64>().map_err(|_| bad());
            let spec = if let Some(rest) = t.strip_prefix("SL2_") {
                let parts: Vec<&str> = rest.split('_').collect();
                if parts.len() != 2 {
                    return Err(bad());
                }
                GroupSpec::Sl2 { p: num(parts[0])? as u32, m: num(parts[1])? as u32 }
            } else if let Some(rest) = t.strip_prefix("GL") {
                let parts: Vec<&str> = rest.split('_').collect();
                if parts.len() != 3 {
                    return Err(bad());
                }
                GroupSpec::MatrixGroup {
                    degree: num(parts[0])? as u32,
                    p: num(parts[1])? as u32,
                    m: num(parts[2])? as u32,
                }
            } else if let Some(n) = t.strip_prefix('C').or_else(|| t.strip_prefix('Z')) {
                GroupSpec::Cyclic { n: num(n)? }
            } else if let Some(n) = t.strip_prefix('S') {
                GroupSpec::Symmetric { n: num(n)? as u32 }
            } else if let Some(n) = t.strip_prefix('A') {
                GroupSpec::Alternating { n: num(n)? as u32 }
            } else if let Some(n) = t.strip_prefix('F') {
                GroupSpec::Free { rank: num(n)? as u32 }
            } else {
                return Err(bad());
            };
            factors.push(spec);
        }
        Ok(Self { factors })
    }
}

/// One syllable of a reduced word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub factor: usize,
    pub elem: GElem,
}

impl Letter {
    pub fn new(factor: usize, elem: GElem) -> Self {
        Self { factor, elem }
    }
}

/// A reduced alternating word. Ordered by length, then letter by letter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// Number of letters (syllables).
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<&Letter> {
        self.0.first()
    }

    pub fn last(&self) -> Option<&Letter> {
        self.0.last()
    }

    /// Wraps letters already known to be reduced.
    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn uses_only(&self, factors: impl Fn(usize) -> bool) -> bool {
        self.0.iter().all(|l| factors(l.factor))
    }
}

/// A free product with runtime factor groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeProduct {
    spec: FreeProductSpec,
    groups: Vec<Group>,
}

impl FreeProduct {
    pub fn new(spec: FreeProductSpec) -> Result<Self> {
        if spec.factors.is_empty() {
            return Err(FreeProdError::NoFactors);
        }
        let groups =
            spec.factors.iter().cloned().map(Group::new).collect::<std::result::Result<_, _>>()?;
        Ok(Self { spec, groups })
    }

    pub fn from_factors(factors: Vec<GroupSpec>) -> Result<Self> {
        Self::new(FreeProductSpec::new(factors))
    }

    pub fn spec(&self) -> &FreeProductSpec {
        &self.spec
    }

    pub fn factor_count(&self) -> usize {
        self.groups.len()
    }

    pub fn group(&self, factor: usize) -> Result<&Group> {
        self.groups.get(factor).ok_or(FreeProdError::FactorOutOfRange(factor))
    }

    /// The same product with extra factors appended.
    /// The free product of the first `count` factors.
    pub fn truncated(&self, count: usize) -> Result<Self> {
        Self::from_factors(self.spec.factors[..count.min(self.groups.len())].to_vec())
    }

    pub fn extended(&self, extra: &[GroupSpec]) -> Result<Self> {
        let mut factors = self.spec.factors.clone();
        factors.extend_from_slice(extra);
        Self::from_factors(factors)
    }

    /// Single-letter word (empty for the identity).
    pub fn letter(&self, factor: usize, elem: GElem) -> Result<Word> {
        let g = self.group(factor)?;
        g.validate(&elem)?;
        if g.is_identity(&elem) {
            Ok(Word::identity())
        } else {
            Ok(Word(vec![Letter::new(factor, elem)]))
        }
    }

    pub fn validate(&self, x: &Word) -> Result<()> {
        for (i, l) in x.0.iter().enumerate() {
            let g = self.group(l.factor)?;
            g.validate(&l.elem)?;
            if g.is_identity(&l.elem) || (i > 0 && x.0[i - 1].factor == l.factor) {
                return Err(FreeProdError::NotReduced(i));
            }
        }
        Ok(())
    }

    fn push_letter(&self, out: &mut Vec<Letter>, l: Letter) {
        let g = &self.groups[l.factor];
        match out.last_mut() {
            Some(top) if top.factor == l.factor => {
                let m = g.mul(&top.elem, &l.elem);
                if g.is_identity(&m) {
                    out.pop();
                } else {
                    top.elem = m;
                }
            }
            _ => {
                if !g.is_identity(&l.elem) {
                    out.push(l);
                }
            }
        }
    }

    /// Normal form of an arbitrary letter sequence.
    pub fn reduce(&self, raw: impl IntoIterator<Item = Letter>) -> Word {
        let mut out = Vec::new();
        for l in raw {
            self.push_letter(&mut out, l);
        }
        Word(out)
    }

    pub fn multiply(&self, x: &Word, y: &Word) -> Word {
        let mut out = Vec::with_capacity(x.len() + y.len());
        out.extend_from_slice(&x.0);
        for l in &y.0 {
            self.push_letter(&mut out, l.clone());
        }
        Word(out)
    }

    pub fn product<'a>(&self, factors: impl IntoIterator<Item = &'a Word>) -> Word {
        factors.into_iter().fold(Word::identity(), |acc, w| self.multiply(&acc, w))
    }

    pub fn invert(&self, x: &Word) -> Word {
        Word(
            x.0.iter()
                .rev()
                .map(|l| Letter::new(l.factor, self.groups[l.factor].inv(&l.elem)))
                .collect(),
        )
    }

    /// `z x z⁻¹`.
    pub fn conjugate(&self, z: &Word, x: &Word) -> Word {
        self.multiply(&self.multiply(z, x), &self.invert(z))
    }

    pub fn power(&self, x: &Word, n: i64) -> Word {
        let base = if n < 0 { self.invert(x) } else { x.clone() };
        (0..n.unsigned_abs()).fold(Word::identity(), |acc, _| self.multiply(&acc, &base))
    }

    pub fn is_cyclically_reduced(&self, x: &Word) -> bool {
        x.len() <= 1 || x.0[0].factor != x.0[x.len() - 1].factor
    }

    /// `(w, core)` with `x = w·core·w⁻¹` and `core` cyclically reduced.
    pub fn cyclic_reduce(&self, x: &Word) -> (Word, Word) {
        let mut conj: Vec<Letter> = Vec::new();
        let mut core: VecDeque<Letter> = x.0.iter().cloned().collect();
        while core.len() >= 2 && core.front().map(|l| l.factor) == core.back().map(|l| l.factor) {
            let first = core.pop_front().expect("length checked");
            let last = core.pop_back().expect("length checked");
            let g = &self.groups[first.factor];
            let merged = g.mul(&last.elem, &first.elem);
            // x = f·m·l = f·(m·(l f))·f⁻¹
            if !g.is_identity(&merged) {
                core.push_back(Letter::new(first.factor, merged));
            }
            conj.push(first);
        }
        let w = Word(conj);
        let core = Word(core.into_iter().collect());
        debug_assert_eq!(self.conjugate(&w, &core), *x);
        (w, core)
    }

    /// Whether `y` is a rotation of `x`, both cyclically reduced.
    pub fn conjugate_as_cyclic_words(&self, x: &Word, y: &Word) -> Result<bool> {
        if !self.is_cyclically_reduced(x) || !self.is_cyclically_reduced(y) {
            return Err(FreeProdError::NotCyclicallyReduced);
        }
        if x.len() != y.len() {
            return Ok(false);
        }
        if x.is_empty() {
            return Ok(true);
        }
        let n = x.len();
        Ok((0..n).any(|r| (0..n).all(|i| x.0[(i + r) % n] == y.0[i])))
    }

    /// Order of a word: finite only when its core is a single letter.
    pub fn order_of(&self, x: &Word, bound: u64) -> ElementOrder {
        let (_, core) = self.cyclic_reduce(x);
        match core.len() {
            0 => ElementOrder::Finite(1),
            1 => self.groups[core.0[0].factor].order_of(&core.0[0].elem, bound),
            _ => ElementOrder::Infinite { bound: 0 },
        }
    }

    fn ball_letters(&self) -> Result<Vec<Letter>> {
        let mut letters = Vec::new();
        for (i, g) in self.groups.iter().enumerate() {
            match g.size() {
                Some(s) if s <= BALL_FACTOR_CAP => {
                    letters.extend(g.non_identity_elements()?.into_iter().map(|e| Letter::new(i, e)))
                }
                _ => return Err(FreeProdError::InfiniteFactor(i)),
            }
        }
        Ok(letters)
    }

    /// Every reduced word with at most `radius` letters, in length-lex order.
    pub fn enumerate_ball(&self, radius: usize) -> Result<Vec<Word>> {
        let letters = self.ball_letters()?;
        let mut out = vec![Word::identity()];
        let mut layer = vec![Word::identity()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for w in &layer {
                let last = w.last().map(|l| l.factor);
                for l in &letters {
                    if Some(l.factor) != last {
                        let mut v = w.0.clone();
                        v.push(l.clone());
                        next.push(Word(v));
                    }
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        Ok(out)
    }

    /// Length of `x` in the generating set used by `enumerate_generator_ball`.
    pub fn generator_length(&self, x: &Word) -> usize {
        x.0.iter()
            .map(|l| match &l.elem {
                GElem::Free(w) => w.iter().map(|(_, e)| e.unsigned_abs() as usize).sum(),
                _ => 1,
            })
            .sum()
    }

    /// Ball in the word metric where each non-identity element of a finite
    /// factor and each free generator (with its inverse) has length one.
    /// Sorted by that length, then length-lex.
    pub fn enumerate_generator_ball(&self, radius: usize) -> Result<Vec<Word>> {
        let mut steps: Vec<Word> = Vec::new();
        for (i, g) in self.groups.iter().enumerate() {
            match g.spec() {
                GroupSpec::Free { rank } => {
                    for j in 0..*rank {
                        steps.push(Word(vec![Letter::new(i, GElem::Free(vec![(j, 1)]))]));
                        steps.push(Word(vec![Letter::new(i, GElem::Free(vec![(j, -1)]))]));
                    }
                }
                _ => match g.size() {
                    Some(s) if s <= BALL_FACTOR_CAP => steps.extend(
                        g.non_identity_elements()?.into_iter().map(|e| Word(vec![Letter::new(i, e)])),
                    ),
                    _ => return Err(FreeProdError::InfiniteFactor(i)),
                },
            }
        }
        let mut seen: HashSet<Word> = HashSet::from([Word::identity()]);
        let mut layer = vec![Word::identity()];
        let mut out = vec![(0usize, Word::identity())];
        for d in 1..=radius {
            let mut next = Vec::new();
            for w in &layer {
                for s in &steps {
                    let y = self.multiply(w, s);
                    if seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            out.extend(next.iter().cloned().map(|w| (d, w)));
            layer = next;
        }
        out.sort();
        Ok(out.into_iter().map(|(_, w)| w).collect())
    }

    pub fn word_to_json(&self, x: &Word) -> Value {
        Value::Array(
            x.0.iter().map(|l| json!([l.factor, self.groups[l.factor].elem_to_json(&l.elem)])).collect(),
        )
    }

    /// Parses `[[factor, element], ...]` and reduces it.
    pub fn word_from_json(&self, v: &Value) -> Result<Word> {
        let items = v.as_array().ok_or_else(|| FreeProdError::Parse("expected a list".into()))?;
        let mut raw = Vec::new();
        for item in items {
            let pair = item
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| FreeProdError::Parse(format!("expected [factor, element], got {item}")))?;
            let factor = pair[0]
                .as_u64()
                .ok_or_else(|| FreeProdError::Parse(format!("bad factor index {}", pair[0])))?
                as usize;
            let elem = self.group(factor)?.elem_from_json(&pair[1])?;
            raw.push(Letter::new(factor, elem));
        }
        Ok(self.reduce(raw))
    }

    /// Letters as `factor:element`, space separated; `e` for the identity.
    pub fn fmt_word(&self, x: &Word) -> String {
        if x.is_empty() {
            return "e".into();
        }
        x.0.iter()
            .map(|l| format!("{}:{}", l.factor, self.groups[l.factor].fmt_elem(&l.elem)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Named generators for reading and printing words.
#[derive(Debug, Clone)]
pub struct Notation {
    /// `(name, factor, generator index)`; cyclic factors have one generator.
    names: Vec<(String, usize, u32)>,
}

impl Notation {
    /// Names cyclic generators and free generators with `s, t, u, ...`
    /// (or `g0, g1, ...` when there are more than eight).
    pub fn standard(fp: &FreeProduct) -> Self {
        let mut slots = Vec::new();
        for (i, g) in fp.groups.iter().enumerate() {
            match g.spec() {
                GroupSpec::Cyclic { n } if *n > 1 => slots.push((i, 0)),
                GroupSpec::Free { rank } => slots.extend((0..*rank).map(|j| (i, j))),
                _ => {}
            }
        }
        const POOL: [&str; 8] = ["s", "t", "u", "v", "w", "x", "y", "z"];
        let names = slots
            .iter()
            .enumerate()
            .map(|(k, &(i, j))| {
                let name = if slots.len() <= POOL.len() { POOL[k].to_string() } else { format!("g{k}") };
                (name, i, j)
            })
            .collect();
        Self { names }
    }

    pub fn with_names(fp: &FreeProduct, names: &[&str]) -> Self {
        let std = Self::standard(fp);
        Self {
            names: std
                .names
                .into_iter()
                .zip(names.iter())
                .map(|((_, i, j), n)| (n.to_string(), i, j))
                .collect(),
        }
    }

    /// Parses whitespace-separated tokens `name`, `name^k`, `e`, or `i:json`.
    pub fn parse(&self, fp: &FreeProduct, text: &str) -> Result<Word> {
        let mut raw = Vec::new();
        for tok in tokenize(text) {
            if tok == "e" {
                continue;
            }
            if let Some((idx, json_text)) = tok.split_once(':') {
                if let Ok(factor) = idx.parse::<usize>() {
                    let v: Value = serde_json::from_str(json_text)
                        .map_err(|e| FreeProdError::Parse(format!("{tok}: {e}")))?;
                    raw.push(Letter::new(factor, fp.group(factor)?.elem_from_json(&v)?));
                    continue;
                }
            }
            let (name, exp) = match tok.split_once('^') {
                Some((n, k)) => (
                    n,
                    k.parse::<i64>().map_err(|_| FreeProdError::Parse(format!("bad exponent in {tok}")))?,
                ),
                None => (tok.as_str(), 1),
            };
            let &(_, factor, gen) = self
                .names
                .iter()
                .find(|(n, _, _)| n == name)
                .ok_or_else(|| FreeProdError::Parse(format!("unknown generator {name:?}")))?;
            let elem = match fp.groups[factor].spec() {
                GroupSpec::Cyclic { n } => GElem::Residue(exp.rem_euclid(*n as i64) as u64),
                _ => GElem::Free(vec![(gen, exp)]),
            };
            raw.push(Letter::new(factor, elem));
        }
        Ok(fp.reduce(raw))
    }

    pub fn format(&self, fp: &FreeProduct, x: &Word) -> String {
        if x.is_empty() {
            return "e".into();
        }
        let mut parts = Vec::new();
        for l in x.letters() {
            let name_of = |gen: u32| {
                self.names.iter().find(|(_, f, g)| *f == l.factor && *g == gen).map(|(n, _, _)| n.clone())
            };
            match &l.elem {
                GElem::Residue(r) if name_of(0).is_some() => {
                    let n = name_of(0).expect("checked");
                    parts.push(if *r == 1 { n } else { format!("{n}^{r}") });
                }
                GElem::Free(w) if w.iter().all(|(g, _)| name_of(*g).is_some()) => {
                    for &(g, e) in w {
                        let n = name_of(g).expect("checked");
                        parts.push(if e == 1 { n } else { format!("{n}^{e}") });
                    }
                }
                other => parts.push(format!(
                    "{}:{}",
                    l.factor,
                    fp.groups[l.factor].elem_to_json(other)
                )),
            }
        }
        parts.join(" ")
    }
}

fn tokenize(text: &str) -> Vec<String> {
    // Brackets may contain spaces inside explicit JSON letters.
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    for ch in text.chars() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ => {}
        }
        if ch.is_whitespace() && depth == 0 {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
        } else {
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// A subgroup described by its shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubgroupPattern {
    FreeFactor(usize),
    /// `⟨a⟩ ∗ ⟨b⟩` for finite-order words `a`, `b`.
    CyclicPair { a: Word, b: Word },
    /// Subgroup generated by `gens`, explored up to words of length `budget`.
    Generated { gens: Vec<Word>, budget: usize },
}

/// One syllable `generator^power` of a cyclic-pair factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Syllable {
    /// 0 for `a`, 1 for `b`; generator index for generated patterns.
    pub generator: usize,
    pub power: i64,
    pub word: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Member(Vec<Syllable>),
    NotMember,
    Inconclusive,
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }
}

/// Syllables of a cyclic pair, longest first within each generator.
fn pair_syllables(fp: &FreeProduct, a: &Word, b: &Word) -> Result<Vec<Syllable>> {
    let mut out = Vec::new();
    for (gen, w) in [(0usize, a), (1, b)] {
        let n = fp
            .order_of(w, 1 << 16)
            .finite()
            .ok_or_else(|| FreeProdError::InvalidPattern("generator of infinite order".into()))?;
        if n < 2 {
            return Err(FreeProdError::InvalidPattern("trivial generator".into()));
        }
        for k in 1..n as i64 {
            out.push(Syllable { generator: gen, power: k, word: fp.power(w, k) });
        }
    }
    Ok(out)
}

impl SubgroupPattern {
    /// `⟨a⟩ ∗ ⟨b⟩`, checking that no alternating product of at most
    /// `check_syllables` syllables collapses to the identity.
    pub fn cyclic_pair(fp: &FreeProduct, a: Word, b: Word, check_syllables: usize) -> Result<Self> {
        fp.validate(&a)?;
        fp.validate(&b)?;
        let syl = pair_syllables(fp, &a, &b)?;
        let mut frontier: Vec<(Word, usize)> =
            syl.iter().map(|s| (s.word.clone(), s.generator)).collect();
        for _ in 1..check_syllables {
            let mut next = Vec::new();
            for (w, last) in &frontier {
                for s in syl.iter().filter(|s| s.generator != *last) {
                    let y = fp.multiply(w, &s.word);
                    if y.is_empty() {
                        return Err(FreeProdError::InvalidPattern(
                            "generators do not form a free product".into(),
                        ));
                    }
                    next.push((y, s.generator));
                }
            }
            frontier = next;
        }
        Ok(SubgroupPattern::CyclicPair { a, b })
    }

    /// `⟨a⟩ ∗ ⟨b⟩` for letters `a ∈ G`, `b ∈ K`.
    pub fn lambda_pair(a: Letter, b: Letter) -> Self {
        SubgroupPattern::CyclicPair { a: Word(vec![a]), b: Word(vec![b]) }
    }

    /// `⟨a⟩ ∗ k⟨b⟩k⁻¹`.
    pub fn lambda_conjugated(fp: &FreeProduct, a: Letter, b: Letter, k: Letter) -> Self {
        let kw = Word(vec![k]);
        let b = fp.conjugate(&kw, &Word(vec![b]));
        SubgroupPattern::CyclicPair { a: Word(vec![a]), b }
    }
}

/// Membership test in a subgroup pattern.
pub fn pattern_member(fp: &FreeProduct, p: &SubgroupPattern, x: &Word) -> Result<Membership> {
    match p {
        SubgroupPattern::FreeFactor(i) => {
            fp.group(*i)?;
            Ok(match x.len() {
                0 => Membership::Member(Vec::new()),
                1 if x.0[0].factor == *i => Membership::Member(vec![Syllable {
                    generator: 0,
                    power: 1,
                    word: x.clone(),
                }]),
                _ => Membership::NotMember,
            })
        }
        SubgroupPattern::CyclicPair { a, b } => {
            let syl = pair_syllables(fp, a, b)?;
            let max_syl = syl.iter().map(|s| s.word.len()).max().unwrap_or(0);
            let mut search = PairSearch {
                fp,
                syl: &syl,
                len_cap: x.len() + 2 * max_syl,
                failed: HashSet::new(),
            };
            let depth = 2 * x.len() + 3;
            Ok(match search.run(x, usize::MAX, depth) {
                Some(mut rev) => {
                    rev.reverse();
                    Membership::Member(rev)
                }
                None => Membership::NotMember,
            })
        }
        SubgroupPattern::Generated { gens, budget } => {
            let closure = GeneratedClosure::build(fp, gens, *budget);
            Ok(closure.membership(x))
        }
    }
}

struct PairSearch<'a> {
    fp: &'a FreeProduct,
    syl: &'a [Syllable],
    len_cap: usize,
    failed: HashSet<(Word, usize, usize)>,
}

impl PairSearch<'_> {
    /// Syllables (in reverse order) whose product is `rem`; `last` is the
    /// generator of the syllable to the left, which the next one must differ from.
    fn run(&mut self, rem: &Word, last: usize, depth: usize) -> Option<Vec<Syllable>> {
        if rem.is_empty() {
            return Some(Vec::new());
        }
        if depth == 0 || self.failed.contains(&(rem.clone(), last, depth)) {
            return None;
        }
        // Greedy: syllables sharing the longest prefix with `rem` first.
        let mut cands: Vec<(usize, &Syllable)> = self
            .syl
            .iter()
            .filter(|s| s.generator != last)
            .map(|s| {
                let common =
                    s.word.0.iter().zip(rem.0.iter()).take_while(|(p, q)| p == q).count();
                (common, s)
            })
            .collect();
        cands.sort_by(|x, y| y.0.cmp(&x.0).then(y.1.word.len().cmp(&x.1.word.len())));
        for (_, s) in cands {
            let next = self.fp.multiply(&self.fp.invert(&s.word), rem);
            if next.len() > self.len_cap {
                continue;
            }
            if let Some(mut tail) = self.run(&next, s.generator, depth - 1) {
                tail.push(s.clone());
                return Some(tail);
            }
        }
        self.failed.insert((rem.clone(), last, depth));
        None
    }
}

/// Breadth-first closure of a generated subgroup, truncated at a word length.
#[derive(Debug, Clone)]
pub struct GeneratedClosure {
    /// Element to (parent, generator index, exponent sign).
    parent: HashMap<Word, Option<(Word, usize, i64)>>,
    truncated: bool,
    gens: Vec<Word>,
}

impl GeneratedClosure {
    pub fn build(fp: &FreeProduct, gens: &[Word], budget: usize) -> Self {
        let mut steps: Vec<(usize, i64, Word)> = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            steps.push((i, 1, g.clone()));
            let gi = fp.invert(g);
            if gi != *g {
                steps.push((i, -1, gi));
            }
        }
        let mut parent: HashMap<Word, Option<(Word, usize, i64)>> =
            HashMap::from([(Word::identity(), None)]);
        let mut queue = VecDeque::from([Word::identity()]);
        let mut truncated = false;
        while let Some(x) = queue.pop_front() {
            for (i, sign, s) in &steps {
                let y = fp.multiply(&x, s);
                if y.len() > budget {
                    truncated = true;
                    continue;
                }
                if !parent.contains_key(&y) {
                    parent.insert(y.clone(), Some((x.clone(), *i, *sign)));
                    queue.push_back(y);
                }
            }
        }
        Self { parent, truncated, gens: gens.to_vec() }
    }

    pub fn elements(&self) -> impl Iterator<Item = &Word> {
        self.parent.keys()
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn contains(&self, x: &Word) -> bool {
        self.parent.contains_key(x)
    }

    pub fn membership(&self, x: &Word) -> Membership {
        if !self.parent.contains_key(x) {
            return if self.truncated { Membership::Inconclusive } else { Membership::NotMember };
        }
        let mut path = Vec::new();
        let mut cur = x.clone();
        while let Some(Some((prev, i, sign))) = self.parent.get(&cur) {
            path.push(Syllable { generator: *i, power: *sign, word: self.gens[*i].clone() });
            cur = prev.clone();
        }
        path.reverse();
        Membership::Member(path)
    }
}

/// Elements of a pattern with at most `radius` letters, in length-lex order.
pub fn pattern_ball(fp: &FreeProduct, p: &SubgroupPattern, radius: usize) -> Result<Vec<Word>> {
    let mut out: BTreeSet<Word> = BTreeSet::new();
    match p {
        SubgroupPattern::FreeFactor(i) => {
            out.insert(Word::identity());
            if radius >= 1 {
                for e in fp.group(*i)?.non_identity_elements()? {
                    out.insert(Word(vec![Letter::new(*i, e)]));
                }
            }
        }
        SubgroupPattern::CyclicPair { a, b } => {
            let syl = pair_syllables(fp, a, b)?;
            let max_syl = syl.iter().map(|s| s.word.len()).max().unwrap_or(0);
            let cap = radius + 2 * max_syl;
            let mut seen: HashSet<(Word, usize)> = HashSet::new();
            let mut queue = VecDeque::from([(Word::identity(), usize::MAX)]);
            while let Some((x, last)) = queue.pop_front() {
                if x.len() <= radius {
                    out.insert(x.clone());
                }
                for s in syl.iter().filter(|s| s.generator != last) {
                    let y = fp.multiply(&x, &s.word);
                    if y.len() <= cap && seen.insert((y.clone(), s.generator)) {
                        queue.push_back((y, s.generator));
                    }
                }
            }
        }
        SubgroupPattern::Generated { gens, budget } => {
            let c = GeneratedClosure::build(fp, gens, *budget);
            out.extend(c.elements().filter(|w| w.len() <= radius).cloned());
        }
    }
    Ok(out.into_iter().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntersectionVerdict {
    TrivialAtBudget,
    Nontrivial,
    BudgetInconclusive,
}

/// Finite proxy for `zΛz⁻¹ ∩ Λ′`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedIntersectionReport {
    pub conjugator: Word,
    pub budget: usize,
    pub elements: Vec<Word>,
    pub verdict: IntersectionVerdict,
    /// Some listed element has infinite order, so the intersection is infinite.
    pub infinite_order_found: bool,
}

/// All `x ∈ P1` with `|x| ≤ budget` and `z x z⁻¹ ∈ P2`.
pub fn bounded_conjugate_intersection(
    fp: &FreeProduct,
    p1: &SubgroupPattern,
    p2: &SubgroupPattern,
    z: &Word,
    budget: usize,
) -> Result<BoundedIntersectionReport> {
    let ball = pattern_ball(fp, p1, budget)?;
    intersection_from_ball(fp, &ball, p2, z, budget)
}

/// As `bounded_conjugate_intersection`, with a precomputed ball of `P1`.
pub fn intersection_from_ball(
    fp: &FreeProduct,
    p1_ball: &[Word],
    p2: &SubgroupPattern,
    z: &Word,
    budget: usize,
) -> Result<BoundedIntersectionReport> {
    let mut elements = Vec::new();
    let mut inconclusive = false;
    for x in p1_ball {
        match pattern_member(fp, p2, &fp.conjugate(z, x))? {
            Membership::Member(_) => elements.push(x.clone()),
            Membership::Inconclusive => inconclusive = true,
            Membership::NotMember => {}
        }
    }
    let infinite_order_found = elements.iter().any(|x| fp.cyclic_reduce(x).1.len() >= 2);
    let verdict = if inconclusive {
        IntersectionVerdict::BudgetInconclusive
    } else if elements.iter().all(|x| x.is_empty()) {
        IntersectionVerdict::TrivialAtBudget
    } else {
        IntersectionVerdict::Nontrivial
    };
    Ok(BoundedIntersectionReport {
        conjugator: z.clone(),
        budget,
        elements,
        verdict,
        infinite_order_found,
    })
}

/// Result of comparing `|xⁿ|` with `n|core| + 2|conjugator|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerGrowth {
    pub core_len: usize,
    pub conjugator_len: usize,
    /// Exponents where the formula failed.
    pub failures: Vec<usize>,
}

impl PowerGrowth {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn check_power_growth(fp: &FreeProduct, x: &Word, nmax: usize) -> Result<PowerGrowth> {
    let (w, core) = fp.cyclic_reduce(x);
    if core.len() < 2 {
        return Err(FreeProdError::ShortCore(core.len()));
    }
    let mut failures = Vec::new();
    let mut acc = Word::identity();
    for n in 1..=nmax {
        acc = fp.multiply(&acc, x);
        if acc.len() != n * core.len() + 2 * w.len() {
            failures.push(n);
        }
    }
    Ok(PowerGrowth { core_len: core.len(), conjugator_len: w.len(), failures })
}

/// Which family the target subgroup belongs to. Factor 0 is `G`, factor 1 is `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetShape {
    /// `⟨a⟩ ∗ ⟨b⟩` with `a ∈ G` of order 2 and `b ∈ K` of order 3.
    Pair { a: GElem, b: GElem },
    /// `⟨a⟩ ∗ k⟨b⟩k⁻¹` with `a, b ∈ G` and `k ∈ K`.
    Conjugated { a: GElem, b: GElem, k: GElem },
}

/// `w = u⁻¹·middle·(k)·v` with the letter constraints satisfied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WDecomposition {
    pub u: Word,
    pub middle: Word,
    pub v: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WDecompositionReport {
    /// A conjugator and an infinite-order element found in the intersection.
    pub infinite_witness: Option<(Word, Word)>,
    pub conjugators_scanned: usize,
    pub decomposition: Option<WDecomposition>,
}

impl WDecompositionReport {
    /// The implication holds: either no infinite intersection was seen or a
    /// decomposition was found.
    pub fn consistent(&self) -> bool {
        self.infinite_witness.is_none() || self.decomposition.is_some()
    }
}

/// Searches conjugators in the ball of radius `z_radius` for an infinite
/// intersection `zΛ₁z⁻¹ ∩ Λ` (with `Λ₁ = ⟨a1⟩ ∗ w⟨b1⟩w⁻¹`, elements of at
/// most `budget` letters), and if one exists looks for the decomposition of `w`.
pub fn check_w_decomposition(
    fp: &FreeProduct,
    target: &TargetShape,
    a1: &Letter,
    b1: &Letter,
    w: &Word,
    budget: usize,
    z_radius: usize,
) -> Result<WDecompositionReport> {
    let order = |l: &Letter| fp.group(l.factor).map(|g| g.order_of(&l.elem, 64).finite());
    if order(a1)? != Some(2) || order(b1)? != Some(3) {
        return Err(FreeProdError::InvalidPattern("a1 must have order 2 and b1 order 3".into()));
    }
    let (g_grp, k_grp) = (fp.group(0)?.clone(), fp.group(1)?.clone());
    let lam1 = SubgroupPattern::cyclic_pair(
        fp,
        Word(vec![a1.clone()]),
        fp.conjugate(w, &Word(vec![b1.clone()])),
        budget,
    )?;
    let (lam, a, b_word, k_word) = match target {
        TargetShape::Pair { a, b } => {
            let p = SubgroupPattern::lambda_pair(Letter::new(0, a.clone()), Letter::new(1, b.clone()));
            (p, a.clone(), Word(vec![Letter::new(1, b.clone())]), None)
        }
        TargetShape::Conjugated { a, b, k } => {
            let p = SubgroupPattern::lambda_conjugated(
                fp,
                Letter::new(0, a.clone()),
                Letter::new(0, b.clone()),
                Letter::new(1, k.clone()),
            );
            (p, a.clone(), Word(vec![Letter::new(0, b.clone())]), Some(Word(vec![Letter::new(1, k.clone())])))
        }
    };
    let lam1_ball = pattern_ball(fp, &lam1, budget)?;
    let zs = fp.enumerate_ball(z_radius)?;
    let mut infinite_witness = None;
    let mut scanned = 0;
    for z in &zs {
        scanned += 1;
        let rep = intersection_from_ball(fp, &lam1_ball, &lam, z, budget)?;
        if let Some(x) = rep.elements.iter().find(|x| fp.cyclic_reduce(x).1.len() >= 2) {
            infinite_witness = Some((z.clone(), x.clone()));
            break;
        }
    }
    let mut decomposition = None;
    if infinite_witness.is_some() {
        let a_word = Word(vec![Letter::new(0, a)]);
        let b_inv = fp.invert(&b_word);
        let u_range: Vec<Word> = std::iter::once(Word::identity())
            .chain(g_grp.non_identity_elements()?.into_iter().map(|e| Word(vec![Letter::new(0, e)])))
            .collect();
        let v_factor = if k_word.is_some() { 0 } else { 1 };
        let v_group = if k_word.is_some() { &g_grp } else { &k_grp };
        let v_range: Vec<Word> = std::iter::once(Word::identity())
            .chain(
                v_group.non_identity_elements()?.into_iter().map(|e| Word(vec![Letter::new(v_factor, e)])),
            )
            .collect();
        let conj_b = |x: &Word| match &k_word {
            Some(k) => fp.conjugate(k, x),
            None => x.clone(),
        };
        let first_syllable_ok = |s: &Syllable| s.word == conj_b(&b_word) || s.word == conj_b(&b_inv);
        'search: for u in &u_range {
            if fp.conjugate(u, &Word(vec![a1.clone()])) != a_word {
                continue;
            }
            for v in &v_range {
                let vb = fp.conjugate(v, &Word(vec![b1.clone()]));
                if vb != b_word && vb != b_inv {
                    continue;
                }
                let mut middle = fp.multiply(&fp.multiply(u, w), &fp.invert(v));
                if let Some(k) = &k_word {
                    middle = fp.multiply(&middle, &fp.invert(k));
                }
                let ok = match pattern_member(fp, &lam, &middle)? {
                    Membership::Member(syl) => {
                        syl.is_empty()
                            || (first_syllable_ok(&syl[0])
                                && syl.last().map(|s| s.word == a_word).unwrap_or(false))
                    }
                    _ => false,
                };
                if ok {
                    decomposition = Some(WDecomposition { u: u.clone(), middle, v: v.clone() });
                    break 'search;
                }
            }
        }
    }
    Ok(WDecompositionReport { infinite_witness, conjugators_scanned: scanned, decomposition })
}

/// Parity of a generator letter under a homomorphism onto `ℤ/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityMap {
    /// Per factor, per generator: 0 or 1. Cyclic factors have one generator.
    pub weights: Vec<Vec<u8>>,
}

/// A generator step: factor, generator index, sign.
type Step = (usize, u32, i64);

/// Rewriting of the kernel of a parity map in Schreier generators, with
/// transversal `{e, c}`.
#[derive(Debug, Clone)]
pub struct SchreierRewriter {
    fp: FreeProduct,
    parity: ParityMap,
    c: Word,
    /// Schreier generators as ambient words.
    gens: Vec<Word>,
    /// `(coset, factor, generator) -> Schreier generator index` for nontrivial ones.
    table: HashMap<(u8, usize, u32), usize>,
}

impl SchreierRewriter {
    pub fn new(fp: &FreeProduct, parity: ParityMap, c: Letter) -> Result<Self> {
        if parity.weights.len() != fp.factor_count() {
            return Err(FreeProdError::InvalidPattern("parity map has wrong number of factors".into()));
        }
        for (i, g) in fp.groups.iter().enumerate() {
            match g.spec() {
                GroupSpec::Cyclic { .. } | GroupSpec::Free { .. } => {}
                _ => return Err(FreeProdError::NotDecomposable(format!("factor {i} is not cyclic or free"))),
            }
        }
        let c_word = fp.letter(c.factor, c.elem)?;
        let mut rw = Self { fp: fp.clone(), parity, c: c_word.clone(), gens: Vec::new(), table: HashMap::new() };
        if rw.word_parity(&c_word) != 1 {
            return Err(FreeProdError::InvalidPattern("transversal letter must have odd parity".into()));
        }
        for coset in [0u8, 1] {
            for (i, g) in fp.groups.iter().enumerate() {
                let ngen = match g.spec() {
                    GroupSpec::Free { rank } => *rank,
                    GroupSpec::Cyclic { n } => u32::from(*n > 1),
                    _ => 0,
                };
                for j in 0..ngen {
                    let s = rw.step_word((i, j, 1));
                    let rep = |t: u8| if t == 0 { Word::identity() } else { c_word.clone() };
                    let target = coset ^ rw.parity.weights[i][j as usize];
                    let gamma = fp.product([&rep(coset), &s, &fp.invert(&rep(target))]);
                    if !gamma.is_empty() {
                        rw.table.insert((coset, i, j), rw.gens.len());
                        rw.gens.push(gamma);
                    }
                }
            }
        }
        Ok(rw)
    }

    pub fn generators(&self) -> &[Word] {
        &self.gens
    }

    fn step_word(&self, (i, j, sign): Step) -> Word {
        let elem = match self.fp.groups[i].spec() {
            GroupSpec::Cyclic { n } => GElem::Residue(if sign > 0 { 1 } else { n - 1 }),
            _ => GElem::Free(vec![(j, sign)]),
        };
        Word(vec![Letter::new(i, elem)])
    }

    fn steps(&self, x: &Word) -> Vec<Step> {
        let mut out = Vec::new();
        for l in x.letters() {
            match &l.elem {
                GElem::Residue(r) => out.extend((0..*r).map(|_| (l.factor, 0u32, 1i64))),
                GElem::Free(w) => {
                    for &(g, e) in w {
                        out.extend((0..e.unsigned_abs()).map(|_| (l.factor, g, e.signum())));
                    }
                }
                _ => unreachable!("checked at construction"),
            }
        }
        out
    }

    pub fn word_parity(&self, x: &Word) -> u8 {
        self.steps(x).iter().fold(0, |acc, &(i, j, _)| acc ^ self.parity.weights[i][j as usize])
    }

    /// Expression of `x` as a freely reduced word in the Schreier generators.
    pub fn rewrite(&self, x: &Word) -> Result<Vec<(u32, i64)>> {
        let mut coset = 0u8;
        let mut raw = Vec::new();
        for (i, j, sign) in self.steps(x) {
            let w = self.parity.weights[i][j as usize];
            if sign > 0 {
                if let Some(&g) = self.table.get(&(coset, i, j)) {
                    raw.push((g as u32, 1));
                }
                coset ^= w;
            } else {
                let from = coset ^ w;
                if let Some(&g) = self.table.get(&(from, i, j)) {
                    raw.push((g as u32, -1));
                }
                coset = from;
            }
        }
        if coset != 0 {
            return Err(FreeProdError::NotInSubgroup);
        }
        Ok(crate::group::free_reduce(raw))
    }

    /// Product of the ambient words of a Schreier expression.
    pub fn evaluate(&self, expr: &[(u32, i64)]) -> Word {
        expr.iter().fold(Word::identity(), |acc, &(g, e)| {
            self.fp.multiply(&acc, &self.fp.power(&self.gens[g as usize], e))
        })
    }

    pub fn transversal_letter(&self) -> &Word {
        &self.c
    }
}

/// A homomorphism from a factor group into a free product, given on the
/// standard generators of the source.
#[derive(Debug, Clone)]
pub struct GroupHom {
    source: Group,
    target: FreeProduct,
    images: Vec<Word>,
    decomposition: Option<HashMap<GElem, Vec<usize>>>,
}

impl GroupHom {
    pub fn new(source: GroupSpec, target: FreeProduct, images: Vec<Word>) -> Result<Self> {
        let source = Group::new(source)?;
        let gens = source.generators();
        if gens.len() != images.len() {
            return Err(FreeProdError::InvalidPattern(format!(
                "expected {} generator images, got {}",
                gens.len(),
                images.len()
            )));
        }
        for w in &images {
            target.validate(w)?;
        }
        let mut hom = Self { source, target, images, decomposition: None };
        match hom.source.spec().clone() {
            GroupSpec::Free { .. } => {}
            GroupSpec::Cyclic { n } => {
                if let Some(img) = hom.images.first() {
                    if !hom.target.power(img, n as i64).is_empty() {
                        return Err(FreeProdError::RelationViolated(format!("g^{n} must map to e")));
                    }
                }
            }
            GroupSpec::Symmetric { .. } | GroupSpec::Alternating { .. } => {
                let table = hom.source.decomposition_table(&gens, 1 << 20)?;
                hom.decomposition = Some(table);
                // Cayley-graph consistency is equivalent to respecting all relations.
                for g in hom.source.elements()? {
                    let base = hom.apply(&g)?;
                    for (i, s) in gens.iter().enumerate() {
                        let lhs = hom.target.multiply(&base, &hom.images[i]);
                        let rhs = hom.apply(&hom.source.mul(&g, s))?;
                        if lhs != rhs {
                            return Err(FreeProdError::RelationViolated(format!(
                                "image of {} times generator {i}",
                                hom.source.fmt_elem(&g)
                            )));
                        }
                    }
                }
            }
            other => {
                return Err(FreeProdError::NotDecomposable(format!(
                    "{} sources are not supported",
                    other.name()
                )))
            }
        }
        Ok(hom)
    }

    /// The inclusion of a group as the only factor of a free product.
    pub fn identity(spec: GroupSpec) -> Result<Self> {
        let target = FreeProduct::from_factors(vec![spec.clone()])?;
        let images = Group::new(spec.clone())?
            .generators()
            .into_iter()
            .map(|g| target.letter(0, g))
            .collect::<Result<Vec<_>>>()?;
        Self::new(spec, target, images)
    }

    pub fn source(&self) -> &Group {
        &self.source
    }

    pub fn target(&self) -> &FreeProduct {
        &self.target
    }

    pub fn apply(&self, g: &GElem) -> Result<Word> {
        self.source.validate(g)?;
        let t = &self.target;
        match g {
            GElem::Free(w) => Ok(w.iter().fold(Word::identity(), |acc, &(gen, e)| {
                t.multiply(&acc, &t.power(&self.images[gen as usize], e))
            })),
            GElem::Residue(r) => Ok(match self.images.first() {
                Some(img) => t.power(img, *r as i64),
                None => Word::identity(),
            }),
            _ => {
                let table = self
                    .decomposition
                    .as_ref()
                    .ok_or_else(|| FreeProdError::NotDecomposable(self.source.fmt_elem(g)))?;
                let path = table.get(g).ok_or_else(|| FreeProdError::NotDecomposable(self.source.fmt_elem(g)))?;
                Ok(path.iter().fold(Word::identity(), |acc, &i| t.multiply(&acc, &self.images[i])))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::perm_from_cycles;

    fn c2c3() -> FreeProduct {
        FreeProduct::from_factors(vec![GroupSpec::cyclic(2), GroupSpec::cyclic(3)]).unwrap()
    }

    fn s() -> Letter {
        Letter::new(0, GElem::Residue(1))
    }

    fn t(k: u64) -> Letter {
        Letter::new(1, GElem::Residue(k))
    }

    #[test]
    fn reduction_examples() {
        let fp = c2c3();
        assert!(fp.reduce([s(), s()]).is_empty());
        assert!(fp.reduce([s(), t(1), t(1), t(1), s()]).is_empty());
        assert_eq!(fp.reduce([s(), t(1), t(1)]).letters(), &[s(), t(2)]);
    }

    #[test]
    fn cyclic_reduction_examples() {
        let fp = c2c3();
        let sts = fp.reduce([s(), t(1), s()]);
        let (w, core) = fp.cyclic_reduce(&sts);
        assert_eq!(w.letters(), &[s()]);
        assert_eq!(core.letters(), &[t(1)]);
        let st = fp.reduce([s(), t(1)]);
        assert_eq!(fp.cyclic_reduce(&st), (Word::identity(), st.clone()));
        assert_eq!(fp.cyclic_reduce(&Word::identity()), (Word::identity(), Word::identity()));
    }

    #[test]
    fn rotations() {
        let fp = c2c3();
        let st = fp.reduce([s(), t(1)]);
        let ts = fp.reduce([t(1), s()]);
        assert!(fp.conjugate_as_cyclic_words(&st, &ts).unwrap());
        assert!(fp.conjugate_as_cyclic_words(&st, &st).unwrap());
        let x = fp.reduce([s(), t(1), s(), t(2)]);
        let y = fp.reduce([s(), t(2), s(), t(1)]);
        assert!(fp.conjugate_as_cyclic_words(&x, &y).unwrap());
        let sts = fp.reduce([s(), t(1), s()]);
        assert_eq!(fp.conjugate_as_cyclic_words(&sts, &st), Err(FreeProdError::NotCyclicallyReduced));
    }

    #[test]
    fn ball_counts() {
        let fp = c2c3();
        assert_eq!(fp.enumerate_ball(0).unwrap(), vec![Word::identity()]);
        assert_eq!(fp.enumerate_ball(2).unwrap().len(), 8);
        let c2c2 = FreeProduct::from_factors(vec![GroupSpec::cyclic(2), GroupSpec::cyclic(2)]).unwrap();
        assert_eq!(c2c2.enumerate_ball(3).unwrap().len(), 7);
        let ball = fp.enumerate_ball(4).unwrap();
        assert!(ball.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(fp.enumerate_generator_ball(4).unwrap(), ball);
        let f = FreeProduct::from_factors(vec![GroupSpec::Free { rank: 1 }]).unwrap();
        assert_eq!(f.enumerate_ball(1), Err(FreeProdError::InfiniteFactor(0)));
        assert_eq!(f.enumerate_generator_ball(3).unwrap().len(), 7);
    }

    #[test]
    fn conjugate_in_s3_c3() {
        let fp = FreeProduct::from_factors(vec![GroupSpec::Symmetric { n: 3 }, GroupSpec::cyclic(3)]).unwrap();
        let a = Letter::new(0, perm_from_cycles(3, &[&[1, 2]]));
        let b = Word(vec![t(1)]);
        let ab = fp.reduce([a.clone(), t(1)]);
        assert_eq!(fp.conjugate(&b, &ab), fp.reduce([t(1), a]));
    }

    #[test]
    fn power_growth_examples() {
        let fp = c2c3();
        let st = fp.reduce([s(), t(1)]);
        let r = check_power_growth(&fp, &st, 10).unwrap();
        assert!(r.holds());
        assert_eq!(fp.power(&st, 5).len(), 10);
        assert_eq!(check_power_growth(&fp, &Word(vec![s()]), 3), Err(FreeProdError::ShortCore(1)));
        let sw = Word(vec![s()]);
        let x = fp.conjugate(&sw, &st);
        assert_eq!(x, fp.reduce([t(1), s()]));
        assert_eq!(check_power_growth(&fp, &x, 5).unwrap().conjugator_len, 0);
        let fp3 = fp.extended(&[GroupSpec::cyclic(2)]).unwrap();
        let r2 = Letter::new(2, GElem::Residue(1));
        let x = fp3.reduce([r2.clone(), s(), t(1), r2]);
        let r = check_power_growth(&fp3, &x, 5).unwrap();
        assert!(r.holds());
        assert_eq!(r.conjugator_len, 1);
        // Ends t, t merge into the core: |x^n| = 2n + 1.
        let tst = fp.reduce([t(1), s(), t(1)]);
        let r = check_power_growth(&fp, &tst, 4).unwrap();
        assert_eq!((r.core_len, r.conjugator_len), (2, 1));
        assert_eq!(r.failures, vec![1, 2, 3, 4]);
    }

    #[test]
    fn conjugated_pair_membership() {
        let fp = FreeProduct::from_factors(vec![GroupSpec::Symmetric { n: 3 }, GroupSpec::cyclic(3)]).unwrap();
        let a = Letter::new(0, perm_from_cycles(3, &[&[1, 2]]));
        let b = Letter::new(0, perm_from_cycles(3, &[&[1, 2, 3]]));
        let k = t(1);
        let lam = SubgroupPattern::lambda_conjugated(&fp, a.clone(), b.clone(), k.clone());
        let kbk = fp.reduce([k.clone(), b.clone(), t(2)]);
        let x = fp.product([&Word(vec![a.clone()]), &kbk, &Word(vec![a.clone()])]);
        match pattern_member(&fp, &lam, &x).unwrap() {
            Membership::Member(syl) => {
                let words: Vec<Word> = syl.into_iter().map(|s| s.word).collect();
                assert_eq!(words, vec![Word(vec![a.clone()]), kbk.clone(), Word(vec![a])]);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(pattern_member(&fp, &lam, &Word(vec![k])).unwrap(), Membership::NotMember);
        assert_eq!(pattern_member(&fp, &lam, &Word::identity()).unwrap(), Membership::Member(vec![]));
    }

    #[test]
    fn schreier_examples() {
        let fp = FreeProduct::from_factors(vec![GroupSpec::Free { rank: 2 }, GroupSpec::cyclic(2)]).unwrap();
        let rw = SchreierRewriter::new(
            &fp,
            ParityMap { weights: vec![vec![0, 0], vec![1]] },
            Letter::new(1, GElem::Residue(1)),
        )
        .unwrap();
        assert_eq!(rw.generators().len(), 4);
        let n = Notation::with_names(&fp, &["a", "b", "c"]);
        let cac = n.parse(&fp, "c a c").unwrap();
        assert_eq!(rw.rewrite(&cac).unwrap(), vec![(2, 1)]);
        assert_eq!(rw.rewrite(&Word::identity()).unwrap(), vec![]);
        let x = n.parse(&fp, "a b c a c").unwrap();
        assert_eq!(rw.rewrite(&x).unwrap(), vec![(0, 1), (1, 1), (2, 1)]);
        assert_eq!(rw.rewrite(&n.parse(&fp, "c").unwrap()), Err(FreeProdError::NotInSubgroup));
        assert_eq!(rw.evaluate(&rw.rewrite(&x).unwrap()), x);
    }

    #[test]
    fn notation_round_trip() {
        let fp = c2c3();
        let n = Notation::standard(&fp);
        assert!(n.parse(&fp, "s t t t s").unwrap().is_empty());
        let x = n.parse(&fp, "s t^2").unwrap();
        assert_eq!(n.format(&fp, &x), "s t^2");
        assert_eq!(fp.word_from_json(&fp.word_to_json(&x)).unwrap(), x);
        let s3 = FreeProduct::from_factors(vec![GroupSpec::Symmetric { n: 3 }]).unwrap();
        let w = Notation::standard(&s3).parse(&s3, "0:[1, 0, 2]").unwrap();
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn homs() {
        let id = GroupHom::identity(GroupSpec::Symmetric { n: 4 }).unwrap();
        let g = perm_from_cycles(4, &[&[1, 3, 2]]);
        assert_eq!(id.apply(&g).unwrap(), id.target().letter(0, g).unwrap());
        let target = FreeProduct::from_factors(vec![GroupSpec::cyclic(2)]).unwrap();
        let bad = GroupHom::new(GroupSpec::cyclic(3), target.clone(), vec![target.letter(0, GElem::Residue(1)).unwrap()]);
        assert!(matches!(bad, Err(FreeProdError::RelationViolated(_))));
        let sign = GroupHom::new(
            GroupSpec::Symmetric { n: 3 },
            target.clone(),
            vec![target.letter(0, GElem::Residue(1)).unwrap(), Word::identity()],
        )
        .unwrap();
        assert_eq!(sign.apply(&perm_from_cycles(3, &[&[1, 3]])).unwrap().len(), 1);
    }
}
