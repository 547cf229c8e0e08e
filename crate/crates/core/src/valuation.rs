//! Valuations of free products into finite join semilattices, their layered
//! extensions, and realization of ideal lattices as intermediate subgroups.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::RwLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freeprod::{FreeProdError, FreeProduct, GeneratedClosure, Letter, Word};
use crate::group::{GElem, Group, GroupError, GroupSpec};
use crate::order::{DownSet, JoinSemilattice, OrderError};

/// Entries kept in a valuation's evaluation cache.
const MEMO_CAP: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValuationError {
    #[error("the coefficient group must be nontrivial")]
    TrivialGroup,
    #[error("word uses factor {0}, outside the valuation's domain")]
    OutsideDomain(usize),
    #[error("element and round budgets must be positive")]
    ZeroBudget,
    #[error("value of h is not below the value of g")]
    NotBelow,
    #[error("layer {0} does not exist or is not a step-1 layer")]
    NoSuchLayer(usize),
    #[error("level check needs every earlier layer to be a zero extension")]
    UnsupportedLevelCheck,
    #[error(transparent)]
    FreeProd(#[from] FreeProdError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Order(#[from] OrderError),
}

type Result<T> = std::result::Result<T, ValuationError>;

/// Data of one step-1 layer over a group `G` with new factors `K₁`, `K₂`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step1Data {
    pub g0: Word,
    pub a: usize,
    pub k1_factor: usize,
    pub k2_factor: usize,
    pub k1: Word,
    pub k2: Word,
    /// `g₀ k₁ g₀⁻¹`.
    pub h1: Word,
    h1_inv: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LayerKind {
    /// New factors valued 0.
    FreeZero,
    Step1(Step1Data),
}

/// Factors `start..end` added on top of the previous level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layer {
    pub start: usize,
    pub end: usize,
    pub kind: LayerKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LetterClass {
    L1,
    L2,
    L3,
}

/// A letter of an alternating factorization. `core` is the `S`-element for
/// `L1`, the `G₁`-element `y` of `k₂ y k₂⁻¹` for `L2`, and the `K₂`-element
/// `z` of `h₁ z h₁⁻¹` for `L3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TaggedLetter {
    pub class: LetterClass,
    pub core: Word,
}

impl TaggedLetter {
    /// The letter as an element of the ambient group.
    pub fn expand(&self, fp: &FreeProduct, d: &Step1Data) -> Word {
        match self.class {
            LetterClass::L1 => self.core.clone(),
            LetterClass::L2 => fp.conjugate(&d.k2, &self.core),
            LetterClass::L3 => fp.conjugate(&d.h1, &self.core),
        }
    }
}

/// A valuation built from a base valuation and a stack of layers.
#[derive(Debug)]
pub struct Valuation {
    sl: JoinSemilattice,
    /// Base factor index to semilattice element.
    positions: Vec<usize>,
    fp: FreeProduct,
    layers: Vec<Layer>,
    memo: RwLock<HashMap<(usize, Word), usize>>,
}

impl Clone for Valuation {
    fn clone(&self) -> Self {
        Self {
            sl: self.sl.clone(),
            positions: self.positions.clone(),
            fp: self.fp.clone(),
            layers: self.layers.clone(),
            memo: RwLock::new(HashMap::new()),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Role {
    Open,
    Close,
    Third,
}

impl Valuation {
    /// One copy of `lambda` per semilattice element; a word maps to the join
    /// of the positions of its letters.
    pub fn base(sl: &JoinSemilattice, lambda: GroupSpec) -> Result<Self> {
        if Group::new(lambda.clone())?.is_trivial() {
            return Err(ValuationError::TrivialGroup);
        }
        let fp = FreeProduct::from_factors(vec![lambda; sl.len()])?;
        Ok(Self {
            sl: sl.clone(),
            positions: (0..sl.len()).collect(),
            fp,
            layers: Vec::new(),
            memo: RwLock::new(HashMap::new()),
        })
    }

    pub fn semilattice(&self) -> &JoinSemilattice {
        &self.sl
    }

    pub fn free_product(&self) -> &FreeProduct {
        &self.fp
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn base_factor_count(&self) -> usize {
        self.positions.len()
    }

    /// Number of factors visible at `level` (0 is the base).
    pub fn domain_end(&self, level: usize) -> usize {
        if level == 0 {
            self.positions.len()
        } else {
            self.layers[level - 1].end
        }
    }

    pub fn top_level(&self) -> usize {
        self.layers.len()
    }

    /// Base letter with value `c`, using the first nontrivial element of the factor.
    pub fn position_letter(&self, c: usize) -> Result<Word> {
        let factor = self.positions.iter().position(|&p| p == c).ok_or(ValuationError::OutsideDomain(c))?;
        let g = self.fp.group(factor)?;
        Ok(self.fp.letter(factor, g.first_nontrivial().ok_or(ValuationError::TrivialGroup)?)?)
    }

    fn extend_with(&self, extra: &[GroupSpec], kind: LayerKind) -> Result<Self> {
        let start = self.fp.factor_count();
        let mut out = self.clone();
        out.fp = self.fp.extended(extra)?;
        out.layers.push(Layer { start, end: start + extra.len(), kind });
        Ok(out)
    }

    /// `δ ∗ 0` on `G ∗ K`.
    pub fn free_zero_extension(&self, k: GroupSpec) -> Result<Self> {
        self.extend_with(&[k], LayerKind::FreeZero)
    }

    /// Step-1 extension on `G ∗ K₁ ∗ K₂` for the element `g₀`. When `g₀ = e` or
    /// its value is 0 the result is `δ ∗ 0 ∗ 0`.
    pub fn step1_extension(&self, g0: &Word, k1: GroupSpec, k2: GroupSpec) -> Result<Self> {
        let (grp1, grp2) = (Group::new(k1.clone())?, Group::new(k2.clone())?);
        if grp1.is_trivial() || grp2.is_trivial() {
            return Err(ValuationError::TrivialGroup);
        }
        let a = self.eval(g0)?;
        if g0.is_empty() || a == self.sl.zero() {
            return self.extend_with(&[k1, k2], LayerKind::FreeZero);
        }
        let start = self.fp.factor_count();
        let mut out = self.extend_with(&[k1, k2], LayerKind::FreeZero)?;
        let fp = &out.fp;
        let k1w = fp.letter(start, grp1.first_nontrivial().expect("nontrivial"))?;
        let k2w = fp.letter(start + 1, grp2.first_nontrivial().expect("nontrivial"))?;
        let h1 = fp.conjugate(g0, &k1w);
        let h1_inv = fp.invert(&h1);
        let data = Step1Data {
            g0: g0.clone(),
            a,
            k1_factor: start,
            k2_factor: start + 1,
            k1: k1w,
            k2: k2w,
            h1,
            h1_inv,
        };
        out.layers.last_mut().expect("just pushed").kind = LayerKind::Step1(data);
        Ok(out)
    }

    fn check_domain(&self, x: &Word, level: usize) -> Result<()> {
        let end = self.domain_end(level);
        match x.letters().iter().find(|l| l.factor >= end) {
            Some(l) => Err(ValuationError::OutsideDomain(l.factor)),
            None => Ok(()),
        }
    }

    /// Value of `x` in the top-level valuation.
    pub fn eval(&self, x: &Word) -> Result<usize> {
        self.check_domain(x, self.top_level())?;
        Ok(self.eval_level(self.top_level(), x))
    }

    /// Value of `x` in the valuation of `level`; `x` must lie in its domain.
    pub fn eval_at(&self, level: usize, x: &Word) -> Result<usize> {
        self.check_domain(x, level)?;
        Ok(self.eval_level(level, x))
    }

    fn eval_level(&self, level: usize, x: &Word) -> usize {
        if x.is_empty() {
            return self.sl.zero();
        }
        if level == 0 {
            return self.sl.join_all(x.letters().iter().map(|l| self.positions[l.factor]));
        }
        let layer = &self.layers[level - 1];
        let key = (level, x.clone());
        if let Some(&v) = self.memo.read().expect("memo lock").get(&key) {
            return v;
        }
        let v = match &layer.kind {
            LayerKind::FreeZero => self.runs_value(x, |f| f < layer.start, |w| self.eval_level(level - 1, w)),
            LayerKind::Step1(d) => match self.factorizations(level, d, x, 1).into_iter().next() {
                Some(letters) => self.sl.join_all(
                    letters
                        .iter()
                        .filter(|t| t.class == LetterClass::L1)
                        .map(|t| self.s_value(level, d, &t.core)),
                ),
                None => {
                    let s = self.runs_value(x, |f| f != d.k2_factor, |w| self.s_value(level, d, w));
                    self.sl.join_idx(d.a, s)
                }
            },
        };
        let mut memo = self.memo.write().expect("memo lock");
        if memo.len() < MEMO_CAP {
            memo.insert(key, v);
        }
        v
    }

    /// Join of `value(run)` over maximal runs of letters whose factor satisfies `keep`.
    fn runs_value(&self, x: &Word, keep: impl Fn(usize) -> bool, value: impl Fn(&Word) -> usize) -> usize {
        let mut acc = self.sl.zero();
        let mut run: Vec<Letter> = Vec::new();
        for l in x.letters() {
            if keep(l.factor) {
                run.push(l.clone());
            } else if !run.is_empty() {
                acc = self.sl.join_idx(acc, value(&Word::from_reduced(std::mem::take(&mut run))));
            }
        }
        if !run.is_empty() {
            acc = self.sl.join_idx(acc, value(&Word::from_reduced(run)));
        }
        acc
    }

    /// `δ' = δ ∗ 0` on `S = G ∗ K₁` for the step-1 layer at `level`.
    fn s_value(&self, level: usize, d: &Step1Data, s: &Word) -> usize {
        self.runs_value(s, |f| f != d.k1_factor, |w| self.eval_level(level - 1, w))
    }

    fn in_g1(&self, level: usize, d: &Step1Data, y: &Word) -> bool {
        if y.is_empty() {
            return false;
        }
        let fp = &self.fp;
        let u = fp.product([&fp.invert(&d.k1), y, &d.k1]);
        let start = self.layers[level - 1].start;
        u.letters().iter().all(|l| l.factor < start) && self.sl.le(self.eval_level(level - 1, &u), d.a)
    }

    /// Up to `limit` alternating `L1/L2/L3` factorizations of `x`.
    fn factorizations(&self, level: usize, d: &Step1Data, x: &Word, limit: usize) -> Vec<Vec<TaggedLetter>> {
        let mut syllables = Vec::new();
        let mut zs = Vec::new();
        let mut cur = Vec::new();
        for l in x.letters() {
            if l.factor == d.k2_factor {
                syllables.push(Word::from_reduced(std::mem::take(&mut cur)));
                zs.push(l.clone());
            } else {
                cur.push(l.clone());
            }
        }
        syllables.push(Word::from_reduced(cur));
        let k2_elem = d.k2.letters()[0].elem.clone();
        let k2_inv = self.fp.group(d.k2_factor).expect("layer factor").inv(&k2_elem);
        let mut parser = Parser {
            v: self,
            level,
            d,
            syllables: &syllables,
            zs: &zs,
            k2_elem,
            k2_inv,
            limit,
            roles: Vec::new(),
            acc: Vec::new(),
            out: Vec::new(),
        };
        parser.dfs();
        parser.out
    }

    /// The unique alternating factorization of `x` for the step-1 layer with
    /// index `layer` (0-based), if one exists.
    pub fn l123_factorize(&self, layer: usize, x: &Word) -> Result<Option<Vec<TaggedLetter>>> {
        let d = self.step1_data(layer)?;
        self.check_domain(x, layer + 1)?;
        Ok(self.factorizations(layer + 1, d, x, 1).into_iter().next())
    }

    /// All factorizations found by the parser, at most `limit`.
    pub fn l123_factorizations(&self, layer: usize, x: &Word, limit: usize) -> Result<Vec<Vec<TaggedLetter>>> {
        let d = self.step1_data(layer)?;
        self.check_domain(x, layer + 1)?;
        Ok(self.factorizations(layer + 1, d, x, limit))
    }

    pub fn step1_data(&self, layer: usize) -> Result<&Step1Data> {
        match self.layers.get(layer).map(|l| &l.kind) {
            Some(LayerKind::Step1(d)) => Ok(d),
            _ => Err(ValuationError::NoSuchLayer(layer)),
        }
    }

    /// `δ'` of an `S`-word for the given step-1 layer.
    pub fn s_value_of(&self, layer: usize, s: &Word) -> Result<usize> {
        let d = self.step1_data(layer)?;
        Ok(self.s_value(layer + 1, d, s))
    }

    /// Whether `y` lies in `G₁∖{e}` for the given step-1 layer.
    pub fn in_g1_of(&self, layer: usize, y: &Word) -> Result<bool> {
        let d = self.step1_data(layer)?;
        Ok(self.in_g1(layer + 1, d, y))
    }
}

struct Parser<'a> {
    v: &'a Valuation,
    level: usize,
    d: &'a Step1Data,
    syllables: &'a [Word],
    zs: &'a [Letter],
    k2_elem: GElem,
    k2_inv: GElem,
    limit: usize,
    roles: Vec<Role>,
    acc: Vec<TaggedLetter>,
    out: Vec<Vec<TaggedLetter>>,
}

impl Parser<'_> {
    /// Letter contributed by syllable `j` given the roles around it.
    /// `None` rejects the assignment; `Some(None)` means no letter.
    fn syllable(&self, j: usize, left: Option<Role>, right: Option<Role>) -> Option<Option<TaggedLetter>> {
        let s = &self.syllables[j];
        if left == Some(Role::Open) {
            if right != Some(Role::Close) || !self.v.in_g1(self.level, self.d, s) {
                return None;
            }
            return Some(Some(TaggedLetter { class: LetterClass::L2, core: s.clone() }));
        }
        let fp = &self.v.fp;
        let mut r = s.clone();
        if left == Some(Role::Third) {
            r = fp.multiply(&self.d.h1, &r);
        }
        if right == Some(Role::Third) {
            r = fp.multiply(&r, &self.d.h1_inv);
        }
        if r.is_empty() {
            // Two L3 letters would be adjacent.
            return if left == Some(Role::Third) && right == Some(Role::Third) { None } else { Some(None) };
        }
        if self.v.s_value(self.level, self.d, &r) == self.d.a {
            return None;
        }
        Some(Some(TaggedLetter { class: LetterClass::L1, core: r }))
    }

    fn dfs(&mut self) {
        if self.out.len() >= self.limit {
            return;
        }
        let i = self.roles.len();
        let left = i.checked_sub(1).map(|k| self.roles[k]);
        if i == self.zs.len() {
            if let Some(letter) = self.syllable(i, left, None) {
                let mut done = self.acc.clone();
                done.extend(letter);
                self.out.push(done);
            }
            return;
        }
        let z = &self.zs[i].elem;
        let options: &[Role] = if left == Some(Role::Open) {
            &[Role::Close]
        } else {
            &[Role::Open, Role::Third]
        };
        for &role in options {
            let fits = match role {
                Role::Open => *z == self.k2_elem,
                Role::Close => *z == self.k2_inv,
                Role::Third => true,
            };
            if !fits {
                continue;
            }
            let Some(letter) = self.syllable(i, left, Some(role)) else { continue };
            let mark = self.acc.len();
            self.acc.extend(letter);
            if role == Role::Third {
                self.acc.push(TaggedLetter {
                    class: LetterClass::L3,
                    core: Word::from_reduced(vec![self.zs[i].clone()]),
                });
            }
            self.roles.push(role);
            self.dfs();
            self.roles.pop();
            self.acc.truncate(mark);
        }
    }
}

/// Truncation of the element enumeration and layering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// Elements processed per round.
    pub elements: usize,
    pub rounds: usize,
    /// Skip elements of value 0, whose layers would be zero extensions.
    #[serde(default)]
    pub skip_null_layers: bool,
}

impl Default for Budgets {
    fn default() -> Self {
        Self { elements: 3, rounds: 1, skip_null_layers: false }
    }
}

/// One element fed to a step-1 extension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessedElement {
    pub round: usize,
    pub g: Word,
    pub value: usize,
    /// Index into `Valuation::layers`.
    pub layer: usize,
}

/// Words over the given product in length-lex order, lazily by length.
struct LengthLex {
    fp: FreeProduct,
    letters: Vec<Letter>,
    layer: Vec<Word>,
    pos: usize,
}

impl LengthLex {
    fn new(fp: FreeProduct) -> Result<Self> {
        let mut letters = Vec::new();
        for i in 0..fp.factor_count() {
            let g = fp.group(i)?;
            letters.extend(g.non_identity_elements()?.into_iter().map(|e| Letter::new(i, e)));
        }
        Ok(Self { fp, letters, layer: vec![Word::identity()], pos: 0 })
    }
}

impl Iterator for LengthLex {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.pos == self.layer.len() {
            let mut next = Vec::new();
            for w in &self.layer {
                let last = w.last().map(|l| l.factor);
                for l in self.letters.iter().filter(|l| Some(l.factor) != last) {
                    next.push(self.fp.multiply(w, &Word::from_reduced(vec![l.clone()])));
                }
            }
            if next.is_empty() {
                return None;
            }
            self.layer = next;
            self.pos = 0;
        }
        self.pos += 1;
        Some(self.layer[self.pos - 1].clone())
    }
}

/// Iterated step-1 layers with `K₁ = K₂ = Λ`. Each round walks the group
/// present at its start in length-lex order, skipping elements handled in
/// earlier rounds.
pub fn step2_extension(
    v: &Valuation,
    lambda: GroupSpec,
    budgets: Budgets,
) -> Result<(Valuation, Vec<ProcessedElement>)> {
    if budgets.elements == 0 || budgets.rounds == 0 {
        return Err(ValuationError::ZeroBudget);
    }
    let mut cur = v.clone();
    let mut trace = Vec::new();
    let mut seen: HashSet<Word> = HashSet::new();
    for round in 1..=budgets.rounds {
        let domain = cur.fp.truncated(cur.fp.factor_count())?;
        let mut picked = Vec::new();
        for g in LengthLex::new(domain)? {
            if picked.len() == budgets.elements {
                break;
            }
            if seen.contains(&g) {
                continue;
            }
            let value = cur.eval(&g)?;
            if budgets.skip_null_layers && value == cur.sl.zero() {
                continue;
            }
            seen.insert(g.clone());
            picked.push((g, value));
        }
        for (g, value) in picked {
            cur = cur.step1_extension(&g, lambda.clone(), lambda.clone())?;
            trace.push(ProcessedElement { round, g, value, layer: cur.layers.len() - 1 });
        }
    }
    Ok((cur, trace))
}

/// Which side of `L ∨ gLg⁻¹` a witness factor comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    #[serde(rename = "L")]
    L,
    #[serde(rename = "gLg^-1")]
    Conjugate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessFactor {
    pub side: Side,
    pub word: Word,
}

/// `h` as a product of factors from `L` and `gLg⁻¹`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub h: Word,
    pub g: Word,
    pub factors: Vec<WitnessFactor>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessOutcome {
    Found(Witness),
    NotCoveredByBudget,
}

/// A base valuation extended by step-2 layers.
#[derive(Debug, Clone)]
pub struct RealizedLattice {
    pub valuation: Valuation,
    pub lambda: GroupSpec,
    pub budgets: Budgets,
    pub trace: Vec<ProcessedElement>,
}

impl RealizedLattice {
    pub fn realize(sl: &JoinSemilattice, lambda: GroupSpec, budgets: Budgets) -> Result<Self> {
        let base = Valuation::base(sl, lambda.clone())?;
        let (valuation, trace) = step2_extension(&base, lambda.clone(), budgets)?;
        Ok(Self { valuation, lambda, budgets, trace })
    }

    pub fn fp(&self) -> &FreeProduct {
        self.valuation.free_product()
    }

    pub fn semilattice(&self) -> &JoinSemilattice {
        self.valuation.semilattice()
    }

    pub fn eval(&self, x: &Word) -> Result<usize> {
        self.valuation.eval(x)
    }

    /// Membership in `L`, the elements of value 0.
    pub fn in_l(&self, x: &Word) -> Result<bool> {
        Ok(self.eval(x)? == self.semilattice().zero())
    }

    /// Membership in `K(J)`.
    pub fn in_k(&self, ideal: &DownSet, x: &Word) -> Result<bool> {
        Ok(ideal.contains(self.eval(x)?))
    }

    pub fn ideals(&self) -> Result<Vec<DownSet>> {
        Ok(self.semilattice().ideals()?)
    }

    /// Expresses `h` in `L ∨ gLg⁻¹` when `δ(h) ≤ δ(g)`.
    pub fn witness_join_membership(&self, h: &Word, g: &Word) -> Result<WitnessOutcome> {
        let sl = self.semilattice();
        let (vh, vg) = (self.eval(h)?, self.eval(g)?);
        if !sl.le(vh, vg) {
            return Err(ValuationError::NotBelow);
        }
        let found = |factors| Ok(WitnessOutcome::Found(Witness { h: h.clone(), g: g.clone(), factors }));
        if h.is_empty() {
            return found(Vec::new());
        }
        if vh == sl.zero() {
            return found(vec![WitnessFactor { side: Side::L, word: h.clone() }]);
        }
        let layer = self.trace.iter().find_map(|p| {
            let layer = &self.valuation.layers[p.layer];
            match &layer.kind {
                LayerKind::Step1(d) if p.g == *g && h.uses_only(|f| f < layer.start) => Some(d),
                _ => None,
            }
        });
        let Some(d) = layer else { return Ok(WitnessOutcome::NotCoveredByBudget) };
        let fp = self.fp();
        let m = fp.conjugate(&d.k2, &fp.conjugate(&d.k1, h));
        let n = fp.conjugate(&d.h1, &d.k2);
        let l = |w: Word| WitnessFactor { side: Side::L, word: w };
        let c = |w: Word| WitnessFactor { side: Side::Conjugate, word: w };
        found(vec![
            l(fp.invert(&d.k1)),
            c(d.h1_inv.clone()),
            l(fp.invert(&n)),
            c(d.h1.clone()),
            l(m),
            c(d.h1_inv.clone()),
            l(n),
            c(d.h1.clone()),
            l(d.k1.clone()),
        ])
    }

    /// Multiplies the witness out and checks each factor's side.
    pub fn verify_witness(&self, w: &Witness) -> Result<std::result::Result<(), String>> {
        let fp = self.fp();
        let product = fp.product(w.factors.iter().map(|f| &f.word));
        if product != w.h {
            return Ok(Err(format!("product {} differs from h {}", fp.fmt_word(&product), fp.fmt_word(&w.h))));
        }
        let g_inv = fp.invert(&w.g);
        for (i, f) in w.factors.iter().enumerate() {
            let inner = match f.side {
                Side::L => f.word.clone(),
                Side::Conjugate => fp.product([&g_inv, &f.word, &w.g]),
            };
            if !self.in_l(&inner)? {
                return Ok(Err(format!("factor {i} is not in its claimed subgroup")));
            }
        }
        Ok(Ok(()))
    }

    /// Elements `g, h` of the base with values `a`, `b` and `δ(gh) = a ∨ b`.
    pub fn gadget_pair(&self, a: usize, b: usize) -> Result<(Word, Word)> {
        let sl = self.semilattice();
        let v = &self.valuation;
        if a == b {
            if a == sl.zero() {
                return Ok((Word::identity(), Word::identity()));
            }
            let g = v.position_letter(a)?;
            let k = v.position_letter(sl.zero())?;
            return Ok((g.clone(), self.fp().multiply(&k, &g)));
        }
        Ok((v.position_letter(a)?, v.position_letter(b)?))
    }
}

/// Outcome of the valuation axioms on a ball.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub max_total_length: usize,
    pub ball_size: usize,
    pub pairs_checked: u64,
    pub subadditivity_failures: u64,
    pub symmetry_failures: u64,
    pub identity_ok: bool,
    /// A few failing pairs, formatted.
    pub examples: Vec<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.identity_ok && self.subadditivity_failures == 0 && self.symmetry_failures == 0
    }
}

/// Checks `δ(e) = 0`, `δ(x⁻¹) = δ(x)` and `δ(xy) ≤ δ(x) ∨ δ(y)` for all
/// `x, y` with `|x| + |y| ≤ max_total`.
pub fn check_valuation_axioms(v: &Valuation, max_total: usize) -> Result<AxiomReport> {
    let fp = v.free_product();
    let sl = v.semilattice();
    let ball = fp.enumerate_ball(max_total)?;
    let values: Vec<usize> = ball.par_iter().map(|x| v.eval_level(v.top_level(), x)).collect();
    // prefix[l] = number of ball words of length ≤ l
    let mut prefix = vec![0usize; max_total + 1];
    for x in &ball {
        prefix[x.len()] += 1;
    }
    for l in 1..=max_total {
        prefix[l] += prefix[l - 1];
    }
    let symmetry_failures = ball
        .par_iter()
        .zip(values.par_iter())
        .filter(|(x, &vx)| v.eval_level(v.top_level(), &fp.invert(x)) != vx)
        .count() as u64;
    let (pairs, failures, examples) = ball
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let mut local = (0u64, 0u64, Vec::new());
            for j in 0..prefix[max_total - x.len()] {
                let y = &ball[j];
                let bound = sl.join_idx(values[i], values[j]);
                let vxy = v.eval_level(v.top_level(), &fp.multiply(x, y));
                local.0 += 1;
                if !sl.le(vxy, bound) {
                    local.1 += 1;
                    if local.2.len() < 3 {
                        local.2.push(format!("x = {}, y = {}", fp.fmt_word(x), fp.fmt_word(y)));
                    }
                }
            }
            local
        })
        .reduce(
            || (0, 0, Vec::new()),
            |mut a, b| {
                a.0 += b.0;
                a.1 += b.1;
                a.2.extend(b.2);
                a.2.truncate(5);
                a
            },
        );
    Ok(AxiomReport {
        max_total_length: max_total,
        ball_size: ball.len(),
        pairs_checked: pairs,
        subadditivity_failures: failures,
        symmetry_failures,
        identity_ok: v.eval_level(v.top_level(), &Word::identity()) == sl.zero(),
        examples,
    })
}

/// Outcome of comparing intermediate subgroups with ideals on a ball.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorrespondenceReport {
    pub radius: usize,
    pub ball_size: usize,
    pub ideals: Vec<Vec<usize>>,
    /// Ball words in each `K(J)`.
    pub census: Vec<usize>,
    pub inclusion_matrix: Vec<Vec<bool>>,
    pub containment_matrix: Vec<Vec<bool>>,
    /// Pairs `(h, g)` from the ball with `δ(h) ≤ δ(g)`.
    pub pairs: u64,
    /// Pairs with `h ∈ L`.
    pub trivially_in_l: u64,
    /// Pairs with a verified multi-factor witness.
    pub witnessed: u64,
    pub not_covered: u64,
    /// Processed elements `g` for which `g ∈ L ∨ gLg⁻¹` was verified.
    pub self_witnessed: usize,
    pub processed: usize,
    pub failures: Vec<String>,
}

impl CorrespondenceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.inclusion_matrix == self.containment_matrix
    }
}

pub fn verify_intermediate_correspondence(rl: &RealizedLattice, radius: usize) -> Result<CorrespondenceReport> {
    let fp = rl.fp();
    let sl = rl.semilattice();
    let ball = fp.enumerate_ball(radius)?;
    let values: Vec<usize> = ball.par_iter().map(|x| rl.eval(x)).collect::<Result<_>>()?;
    let mut hist = vec![0u64; sl.len()];
    for &v in &values {
        hist[v] += 1;
    }
    let ideals = rl.ideals()?;
    let census: Vec<usize> = ideals.iter().map(|j| values.iter().filter(|&&v| j.contains(v)).count()).collect();
    let present: BTreeSet<usize> = values.iter().copied().collect();
    let inclusion_matrix: Vec<Vec<bool>> =
        ideals.iter().map(|a| ideals.iter().map(|b| a.is_subset(b)).collect()).collect();
    let containment_matrix: Vec<Vec<bool>> = ideals
        .iter()
        .map(|a| ideals.iter().map(|b| present.iter().all(|&v| !a.contains(v) || b.contains(v))).collect())
        .collect();

    let mut failures = Vec::new();
    let zero = sl.zero();
    let processed: HashMap<&Word, usize> = rl
        .trace
        .iter()
        .filter(|p| matches!(rl.valuation.layers[p.layer].kind, LayerKind::Step1(_)))
        .map(|p| (&p.g, p.layer))
        .collect();
    let (mut pairs, mut trivially_in_l, mut witnessed, mut not_covered) = (0u64, 0u64, 0u64, 0u64);
    for (g, &vg) in ball.iter().zip(&values) {
        let below: u64 = (0..sl.len()).filter(|&c| sl.le(c, vg)).map(|c| hist[c]).sum();
        pairs += below;
        trivially_in_l += hist[zero];
        let nonzero_below = below - hist[zero];
        if !processed.contains_key(g) {
            not_covered += nonzero_below;
            continue;
        }
        let outcomes: Vec<(usize, WitnessOutcome)> = ball
            .par_iter()
            .enumerate()
            .filter(|(i, _)| values[*i] != zero && sl.le(values[*i], vg))
            .map(|(i, h)| rl.witness_join_membership(h, g).map(|o| (i, o)))
            .collect::<Result<_>>()?;
        for (i, o) in outcomes {
            match o {
                WitnessOutcome::Found(w) => match rl.verify_witness(&w)? {
                    Ok(()) => witnessed += 1,
                    Err(e) => failures.push(format!("h = {}, g = {}: {e}", fp.fmt_word(&ball[i]), fp.fmt_word(g))),
                },
                WitnessOutcome::NotCoveredByBudget => not_covered += 1,
            }
        }
    }

    let mut self_witnessed = 0;
    for p in rl.trace.iter().filter(|p| processed.contains_key(&p.g)) {
        match rl.witness_join_membership(&p.g, &p.g)? {
            WitnessOutcome::Found(w) if rl.verify_witness(&w)?.is_ok() => self_witnessed += 1,
            _ => failures.push(format!("g = {} not witnessed in L ∨ gLg⁻¹", fp.fmt_word(&p.g))),
        }
    }

    for a in 0..sl.len() {
        for b in 0..sl.len() {
            let (g, h) = rl.gadget_pair(a, b)?;
            let ok = rl.eval(&g)? == a && rl.eval(&h)? == b && rl.eval(&fp.multiply(&g, &h))? == sl.join_idx(a, b);
            if !ok {
                failures.push(format!("join gadget fails for ({}, {})", sl.poset().label(a), sl.poset().label(b)));
            }
        }
    }

    Ok(CorrespondenceReport {
        radius,
        ball_size: ball.len(),
        ideals: ideals.iter().map(|j| j.members.iter().copied().collect()).collect(),
        census,
        inclusion_matrix,
        containment_matrix,
        pairs,
        trivially_in_l,
        witnessed,
        not_covered,
        self_witnessed,
        processed: processed.len(),
        failures,
    })
}

/// Comparison of a level subgroup with its generated description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub radius: usize,
    pub closure_cap: usize,
    /// Ball words of value ≤ level missing from the generated closure.
    pub missing: usize,
    /// Generated words in the ball whose value exceeds the level.
    pub extra: usize,
    pub members: usize,
}

impl LevelReport {
    pub fn passed(&self) -> bool {
        self.missing == 0 && self.extra == 0
    }
}

/// Compares `{x : δ₁(x) ≤ b}` with the subgroup generated by
/// `S_{δ'}(b)`, `k₂G₁k₂⁻¹`, `h₁K₂h₁⁻¹` (when `a ≰ b`) or `S_{δ'}(b) ∗ K₂`
/// (when `a ≤ b`) on the ball of the given radius. The closure of the first
/// family is explored up to `radius + slack` letters. Layers below the
/// step-1 layer must be zero extensions.
pub fn check_level_structure(v: &Valuation, layer: usize, b: usize, radius: usize, slack: usize) -> Result<LevelReport> {
    let d = v.step1_data(layer)?;
    if v.layers[..layer].iter().any(|l| !matches!(l.kind, LayerKind::FreeZero)) {
        return Err(ValuationError::UnsupportedLevelCheck);
    }
    let sl = v.semilattice();
    let level = layer + 1;
    let fp = v.free_product().truncated(v.domain_end(level))?;
    let start = v.layers[layer].start;
    let letters_of = |factor: usize| -> Result<Vec<Word>> {
        let g = fp.group(factor)?;
        Ok(g.non_identity_elements()?.into_iter().map(|e| Word::from_reduced(vec![Letter::new(factor, e)])).collect())
    };
    // Generators of G_δ(c): base letters of position ≤ c and all zero-extension letters.
    let g_level = |c: usize| -> Result<Vec<Word>> {
        let mut out = Vec::new();
        for f in 0..start {
            if f >= v.positions.len() || sl.le(v.positions[f], c) {
                out.extend(letters_of(f)?);
            }
        }
        Ok(out)
    };
    let mut gens = g_level(b)?;
    gens.extend(letters_of(d.k1_factor)?);
    if sl.le(d.a, b) {
        gens.extend(letters_of(d.k2_factor)?);
    } else {
        for u in g_level(d.a)? {
            gens.push(fp.conjugate(&d.k2, &fp.conjugate(&d.k1, &u)));
        }
        for z in letters_of(d.k2_factor)? {
            gens.push(fp.conjugate(&d.h1, &z));
        }
    }
    // Letter generators reach every element through shorter prefixes.
    let cap = if sl.le(d.a, b) { radius } else { radius + slack };
    let closure = GeneratedClosure::build(&fp, &gens, cap);
    let ball = fp.enumerate_ball(radius)?;
    let (mut missing, mut extra, mut members) = (0, 0, 0);
    for x in &ball {
        let inside = sl.le(v.eval_level(level, x), b);
        let generated = closure.contains(x);
        members += usize::from(inside);
        missing += usize::from(inside && !generated);
        extra += usize::from(generated && !inside);
    }
    Ok(LevelReport { level: b, radius, closure_cap: cap, missing, extra, members })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::Poset;

    fn diamond() -> JoinSemilattice {
        JoinSemilattice::new(Poset::diamond()).unwrap()
    }

    fn letter(fp: &FreeProduct, factor: usize) -> Word {
        fp.letter(factor, GElem::Residue(1)).unwrap()
    }

    #[test]
    fn base_values() {
        let sl = diamond();
        let v = Valuation::base(&sl, GroupSpec::cyclic(2)).unwrap();
        let fp = v.free_product().clone();
        assert_eq!(v.eval(&Word::identity()).unwrap(), 0);
        assert_eq!(v.eval(&letter(&fp, 0)).unwrap(), 0);
        let ab = fp.multiply(&letter(&fp, 1), &letter(&fp, 2));
        assert_eq!(v.eval(&ab).unwrap(), 3);
        for c in 0..4 {
            assert_eq!(v.eval(&v.position_letter(c).unwrap()).unwrap(), c);
        }
        assert_eq!(Valuation::base(&sl, GroupSpec::cyclic(1)).unwrap_err(), ValuationError::TrivialGroup);
    }

    #[test]
    fn free_zero_values() {
        let sl = diamond();
        let v = Valuation::base(&sl, GroupSpec::cyclic(2)).unwrap().free_zero_extension(GroupSpec::cyclic(3)).unwrap();
        let fp = v.free_product().clone();
        let k = letter(&fp, 4);
        assert_eq!(v.eval(&k).unwrap(), 0);
        let x = fp.product([&letter(&fp, 1), &k, &letter(&fp, 2)]);
        assert_eq!(v.eval(&x).unwrap(), 3);
    }

    #[test]
    fn step1_examples() {
        let sl = diamond();
        let base = Valuation::base(&sl, GroupSpec::cyclic(2)).unwrap();
        let g0 = base.position_letter(1).unwrap();
        let v = base.step1_extension(&g0, GroupSpec::cyclic(2), GroupSpec::cyclic(2)).unwrap();
        let d = v.step1_data(0).unwrap().clone();
        let fp = v.free_product().clone();
        assert_eq!(v.eval(&d.k1).unwrap(), 0);
        let l3 = fp.conjugate(&d.h1, &d.k2);
        assert_eq!(v.eval(&l3).unwrap(), 0);
        assert_eq!(v.eval(&g0).unwrap(), 1);
        assert_eq!(v.l123_factorize(0, &g0).unwrap(), None);
        let y = fp.conjugate(&d.k1, &g0);
        let l2 = fp.conjugate(&d.k2, &y);
        assert_eq!(
            v.l123_factorize(0, &l2).unwrap(),
            Some(vec![TaggedLetter { class: LetterClass::L2, core: y }])
        );
        assert_eq!(v.l123_factorize(0, &Word::identity()).unwrap(), Some(vec![]));
        let e = base.step1_extension(&Word::identity(), GroupSpec::cyclic(2), GroupSpec::cyclic(2)).unwrap();
        assert!(matches!(e.layers()[0].kind, LayerKind::FreeZero));
    }

    #[test]
    fn step2_budgets() {
        let sl = diamond();
        let base = Valuation::base(&sl, GroupSpec::cyclic(2)).unwrap();
        let one = Budgets { elements: 1, rounds: 1, skip_null_layers: false };
        let (v, trace) = step2_extension(&base, GroupSpec::cyclic(2), one).unwrap();
        assert!(trace[0].g.is_empty());
        assert!(matches!(v.layers()[0].kind, LayerKind::FreeZero));
        let two = Budgets { elements: 2, ..one };
        let (v, _) = step2_extension(&base, GroupSpec::cyclic(2), two).unwrap();
        assert_eq!(v.free_product().factor_count(), 8);
        let zero = Budgets { elements: 0, ..one };
        assert_eq!(step2_extension(&base, GroupSpec::cyclic(2), zero).unwrap_err(), ValuationError::ZeroBudget);
    }

    #[test]
    fn witness_for_diamond_letter() {
        let sl = diamond();
        let budgets = Budgets { elements: 1, rounds: 1, skip_null_layers: true };
        let rl = RealizedLattice::realize(&sl, GroupSpec::cyclic(2), budgets).unwrap();
        let g = rl.valuation.position_letter(1).unwrap();
        assert_eq!(rl.trace[0].g, g);
        match rl.witness_join_membership(&g, &g).unwrap() {
            WitnessOutcome::Found(w) => {
                assert_eq!(w.factors.len(), 9);
                assert_eq!(rl.verify_witness(&w).unwrap(), Ok(()));
            }
            other => panic!("{other:?}"),
        }
        let e = Word::identity();
        assert_eq!(
            rl.witness_join_membership(&e, &e).unwrap(),
            WitnessOutcome::Found(Witness { h: e.clone(), g: e.clone(), factors: vec![] })
        );
        let b = rl.valuation.position_letter(2).unwrap();
        assert_eq!(rl.witness_join_membership(&b, &g), Err(ValuationError::NotBelow));
    }

    #[test]
    fn singleton_lattice_is_all_l() {
        let sl = JoinSemilattice::new(Poset::chain(1)).unwrap();
        let rl = RealizedLattice::realize(&sl, GroupSpec::cyclic(2), Budgets::default()).unwrap();
        let ball = rl.fp().enumerate_ball(3).unwrap();
        assert!(ball.iter().all(|x| rl.in_l(x).unwrap()));
        assert_eq!(rl.ideals().unwrap().len(), 1);
    }
}
