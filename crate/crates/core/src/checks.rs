//! Bounded verification runs with machine-readable reports.
//!
//! Every check is deterministic: enumeration orders are fixed and random
//! inputs come from a seeded ChaCha stream, so equal parameters give
//! byte-identical reports.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::constructions::{sl2_difference_span, ConstructionError, RemarkEmbedding, Sl2Construction, UlmGroup};
use crate::freeprod::{
    check_power_growth, check_w_decomposition, pattern_ball, pattern_member,
    FreeProdError, FreeProduct, IntersectionVerdict, Letter, Notation, SubgroupPattern, TargetShape, Word,
};
use crate::group::{perm_from_cycles, three_cycles_fixing_one, GElem, Group, GroupError, GroupSpec};
use crate::order::{completion, phi_embedding, JoinSemilattice, OrderError, Poset, RelationKind};
use crate::valuation::{
    check_valuation_axioms, verify_intermediate_correspondence, Budgets, LayerKind, LetterClass,
    RealizedLattice, TaggedLetter, Valuation, ValuationError, WitnessOutcome,
};

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    FreeProd(#[from] FreeProdError),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

pub type Result<T> = std::result::Result<T, CheckError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "inconclusive-at-budget")]
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub parameters: Value,
    pub status: Status,
    pub counterexamples: Vec<Value>,
    pub statistics: Map<String, Value>,
    pub version: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

/// Counterexamples kept per report; the statistics carry the full count.
pub const MAX_COUNTEREXAMPLES: usize = 50;

impl VerificationReport {
    fn new(check: &str, parameters: Value) -> Self {
        Self {
            check: check.to_string(),
            parameters,
            status: Status::Pass,
            counterexamples: Vec::new(),
            statistics: Map::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: 0,
            wall_time_ms: None,
        }
    }

    fn stat(&mut self, key: &str, value: impl Into<Value>) {
        self.statistics.insert(key.to_string(), value.into());
    }

    fn fail(&mut self, example: impl Into<Value>) {
        if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
            self.counterexamples.push(example.into());
        }
        self.status = Status::Fail;
    }

    fn inconclusive(&mut self) {
        if self.status == Status::Pass {
            self.status = Status::Inconclusive;
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

fn fmt(fp: &FreeProduct, x: &Word) -> String {
    Notation::standard(fp).format(fp, x)
}

/// Reduction, inverse and associativity laws on balls of a free product.
pub fn word_calculus(fp: &FreeProduct, radius: usize, triple_radius: usize) -> Result<VerificationReport> {
    let mut r = VerificationReport::new(
        "word-calculus",
        json!({ "spec": fp.spec(), "radius": radius, "triple_radius": triple_radius }),
    );
    let ball = fp.enumerate_ball(radius)?;
    for x in &ball {
        let xi = fp.invert(x);
        let laws = [
            ("reduce-idempotent", fp.reduce(x.letters().to_vec()) == *x),
            ("double-inverse", fp.invert(&xi) == *x),
            ("right-inverse", fp.multiply(x, &xi).is_empty()),
            ("left-inverse", fp.multiply(&xi, x).is_empty()),
            ("identity", fp.multiply(&Word::identity(), x) == *x && fp.multiply(x, &Word::identity()) == *x),
        ];
        for (law, ok) in laws {
            if !ok {
                r.fail(json!({ "law": law, "x": fmt(fp, x) }));
            }
        }
    }
    let small = fp.enumerate_ball(triple_radius)?;
    let bad: Vec<Value> = small
        .par_iter()
        .flat_map_iter(|x| {
            let mut out = Vec::new();
            for y in &small {
                let xy = fp.multiply(x, y);
                for z in &small {
                    if fp.multiply(&xy, z) != fp.multiply(x, &fp.multiply(y, z)) {
                        out.push(json!({ "law": "associativity", "x": fmt(fp, x), "y": fmt(fp, y), "z": fmt(fp, z) }));
                    }
                }
            }
            out
        })
        .collect();
    for b in bad {
        r.fail(b);
    }
    r.stat("ball_size", ball.len());
    r.stat("triples", small.len().pow(3));
    Ok(r)
}

/// `|xⁿ| = n|core| + 2|conjugator|` for every ball word whose cyclic core has
/// at least two letters, and `|xⁿ| = n|x|` for cyclically reduced words.
pub fn power_growth(fp: &FreeProduct, ball: usize, nmax: usize) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("power-growth", json!({ "spec": fp.spec(), "ball": ball, "nmax": nmax }));
    let (mut checked, mut short, mut exceptions) = (0usize, 0usize, 0usize);
    let (mut cyclic_checked, mut cyclic_failures) = (0usize, 0usize);
    for x in fp.enumerate_ball(ball)? {
        match check_power_growth(fp, &x, nmax) {
            Ok(g) => {
                checked += 1;
                if !g.holds() {
                    exceptions += 1;
                    r.fail(json!({
                        "x": fmt(fp, &x),
                        "core_len": g.core_len,
                        "conjugator_len": g.conjugator_len,
                        "failing_n": g.failures,
                    }));
                }
                if fp.is_cyclically_reduced(&x) {
                    cyclic_checked += 1;
                    if (1..=nmax).any(|n| fp.power(&x, n as i64).len() != n * x.len()) {
                        cyclic_failures += 1;
                    }
                }
            }
            Err(FreeProdError::ShortCore(_)) => short += 1,
            Err(e) => return Err(e.into()),
        }
    }
    r.stat("words_checked", checked);
    r.stat("short_core_skipped", short);
    r.stat("exceptions", exceptions);
    r.stat("cyclically_reduced_checked", cyclic_checked);
    r.stat("cyclically_reduced_failures", cyclic_failures);
    if cyclic_failures > 0 {
        r.status = Status::Fail;
    }
    Ok(r)
}

/// `S₃ ∗ ℤ/3` with `Λ = ⟨(12)⟩ ∗ ⟨t⟩`.
pub fn playing_with_words_setting() -> Result<(FreeProduct, SubgroupPattern)> {
    let fp = FreeProduct::from_factors(vec![GroupSpec::Symmetric { n: 3 }, GroupSpec::cyclic(3)])?;
    let lam = SubgroupPattern::lambda_pair(Letter::new(0, perm_from_cycles(3, &[&[1, 2]])), Letter::new(1, GElem::Residue(1)));
    Ok((fp, lam))
}

/// For every conjugator `z` in the ball: `zΛz⁻¹ ∩ Λ` is trivial at the budget
/// when `z ∉ Λ`, and is the whole bounded ball of `Λ` when `z ∈ Λ`.
pub fn playing_with_words(ball: usize, budget: usize) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("playing-with-words", json!({ "ball": ball, "budget": budget }));
    let (fp, lam) = playing_with_words_setting()?;
    let lam_ball = pattern_ball(&fp, &lam, budget)?;
    let zs = fp.enumerate_ball(ball)?;
    let results: Vec<(bool, IntersectionVerdict, bool)> = zs
        .par_iter()
        .map(|z| {
            let inside = pattern_member(&fp, &lam, z)?.is_member();
            let rep = crate::freeprod::intersection_from_ball(&fp, &lam_ball, &lam, z, budget)?;
            let expected = if inside { rep.elements == lam_ball } else { rep.verdict == IntersectionVerdict::TrivialAtBudget };
            Ok((inside, rep.verdict, expected))
        })
        .collect::<std::result::Result<_, FreeProdError>>()?;
    let mut inside_count = 0;
    for (z, (inside, verdict, ok)) in zs.iter().zip(results) {
        inside_count += usize::from(inside);
        if verdict == IntersectionVerdict::BudgetInconclusive {
            r.inconclusive();
        } else if !ok {
            r.fail(json!({ "z": fmt(&fp, z), "z_in_lambda": inside }));
        }
    }
    r.stat("conjugators", zs.len());
    r.stat("conjugators_in_lambda", inside_count);
    r.stat("lambda_ball_size", lam_ball.len());
    Ok(r)
}

/// Consistency of the `w`-decomposition search for every `w` in a ball, in
/// both the pair setting (`a₁ ∈ S₃` of order 2, `b₁ ∈ ℤ/3`) and the
/// conjugated setting `Λ_{a,b,k}`.
pub fn w_decomposition(ball: usize, budget: usize, z_radius: usize) -> Result<VerificationReport> {
    let mut r = VerificationReport::new(
        "w-decomposition",
        json!({ "ball": ball, "budget": budget, "z_radius": z_radius }),
    );
    let (fp, _) = playing_with_words_setting()?;
    let a = perm_from_cycles(3, &[&[1, 2]]);
    let b3 = perm_from_cycles(3, &[&[1, 2, 3]]);
    let settings = [
        (TargetShape::Pair { a: a.clone(), b: GElem::Residue(1) }, Letter::new(1, GElem::Residue(1))),
        (TargetShape::Conjugated { a: a.clone(), b: b3.clone(), k: GElem::Residue(1) }, Letter::new(0, b3)),
    ];
    let transpositions = [&[1u32, 2][..], &[1, 3], &[2, 3]].map(|c| Letter::new(0, perm_from_cycles(3, &[c])));
    let ws = fp.enumerate_ball(ball)?;
    let (mut calls, mut skipped, mut infinite, mut decomposed) = (0usize, 0usize, 0usize, 0usize);
    for (target, b1) in &settings {
        for a1 in &transpositions {
            for w in &ws {
                match check_w_decomposition(&fp, target, a1, b1, w, budget, z_radius) {
                    Ok(rep) => {
                        calls += 1;
                        infinite += usize::from(rep.infinite_witness.is_some());
                        decomposed += usize::from(rep.decomposition.is_some());
                        if !rep.consistent() {
                            r.fail(json!({ "w": fmt(&fp, w), "a1": fmt(&fp, &fp.reduce([a1.clone()])) }));
                        }
                    }
                    // Λ₁ is not a free product of the two cyclic groups.
                    Err(FreeProdError::InvalidPattern(_)) => skipped += 1,
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }
    r.stat("searches", calls);
    r.stat("not_free_skipped", skipped);
    r.stat("infinite_intersections", infinite);
    r.stat("decompositions", decomposed);
    Ok(r)
}

/// The two explicit conjugations of 3-cycles and the size of the subgroup of
/// `A_n` generated by the 3-cycles fixing the first point.
pub fn elem_permutation(n: u32) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("elem-permutation", json!({ "n": n }));
    if n < 3 {
        return Err(CheckError::Parameter("n must be at least 3".into()));
    }
    let big = Group::new(GroupSpec::Alternating { n: n.max(6) })?;
    let m = n.max(6);
    let b1 = perm_from_cycles(m, &[&[2, 3, 4]]);
    let b2 = perm_from_cycles(m, &[&[4, 5, 6]]);
    let left = big.mul(&big.mul(&b1, &b2), &big.inv(&b1));
    let right = big.mul(&big.mul(&big.inv(&b1), &b2), &b1);
    let expected_left = perm_from_cycles(m, &[&[2, 5, 6]]);
    let expected_right = perm_from_cycles(m, &[&[3, 5, 6]]);
    r.stat("b1_b2_b1inv", big.fmt_elem(&left));
    r.stat("b1inv_b2_b1", big.fmt_elem(&right));
    if left != expected_left {
        r.fail(json!({ "computation": "(234)(456)(234)^-1", "got": big.fmt_elem(&left) }));
    }
    if right != expected_right {
        r.fail(json!({ "computation": "(234)^-1(456)(234)", "got": big.fmt_elem(&right) }));
    }
    let g = Group::new(GroupSpec::Alternating { n })?;
    let gens = three_cycles_fixing_one(n);
    let closure = g.closure(&gens, 1 << 22)?;
    let expected: u64 = (1..n as u64).product::<u64>() / 2;
    let fixes_first = closure.iter().all(|p| matches!(p, GElem::Perm(img) if img[0] == 0));
    r.stat("generators", gens.len());
    r.stat("closure_size", closure.len());
    r.stat("expected_size", expected);
    if closure.len() as u64 != expected || !fixes_first {
        r.fail(json!({ "closure_size": closure.len(), "fixes_first_point": fixes_first }));
    }
    Ok(r)
}

/// Finite proxies for the intersection assumptions on `Γ = A_n ∗ A_n` with
/// `Λ₁ = ⟨(23)(45)⟩ ∗ ⟨(123)⟩` and `Λ₂ = ⟨(24)(35)⟩ ∗ ⟨(345)⟩`: no bounded
/// intersection `zΛᵢz⁻¹ ∩ Λⱼ` (`i ≠ j`, or `i = j` with `z ∉ Λᵢ`) contains an
/// element of infinite order.
pub fn intersection_assumptions(n: u32, z_radius: usize, budget: usize) -> Result<VerificationReport> {
    let mut r = VerificationReport::new(
        "intersection-assumptions",
        json!({ "n": n, "z_radius": z_radius, "budget": budget }),
    );
    if n < 5 {
        return Err(CheckError::Parameter("n must be at least 5".into()));
    }
    let spec = GroupSpec::Alternating { n };
    let fp = FreeProduct::from_factors(vec![spec.clone(), spec])?;
    let pats = [
        SubgroupPattern::lambda_pair(
            Letter::new(0, perm_from_cycles(n, &[&[2, 3], &[4, 5]])),
            Letter::new(1, perm_from_cycles(n, &[&[1, 2, 3]])),
        ),
        SubgroupPattern::lambda_pair(
            Letter::new(0, perm_from_cycles(n, &[&[2, 4], &[3, 5]])),
            Letter::new(1, perm_from_cycles(n, &[&[3, 4, 5]])),
        ),
    ];
    let balls: Vec<Vec<Word>> = pats.iter().map(|p| pattern_ball(&fp, p, budget)).collect::<std::result::Result<_, _>>()?;
    let zs = fp.enumerate_ball(z_radius)?;
    let found: Vec<(usize, usize, usize, bool)> = zs
        .par_iter()
        .enumerate()
        .map(|(zi, z)| {
            let mut out = Vec::new();
            for i in 0..2 {
                for j in 0..2 {
                    if i == j && pattern_member(&fp, &pats[i], z)?.is_member() {
                        continue;
                    }
                    let rep = crate::freeprod::intersection_from_ball(&fp, &balls[i], &pats[j], z, budget)?;
                    out.push((zi, i, j, rep.infinite_order_found));
                }
            }
            Ok(out)
        })
        .collect::<std::result::Result<Vec<_>, FreeProdError>>()?
        .into_iter()
        .flatten()
        .collect();
    for &(zi, i, j, inf) in &found {
        if inf {
            r.fail(json!({ "z": fmt(&fp, &zs[zi]), "from": i, "into": j }));
        }
    }
    r.stat("conjugators", zs.len());
    r.stat("intersections", found.len());
    Ok(r)
}

fn realize(poset: &Poset, lambda: &GroupSpec, budgets: Budgets) -> Result<RealizedLattice> {
    let sl = JoinSemilattice::new(poset.clone())?;
    Ok(RealizedLattice::realize(&sl, lambda.clone(), budgets)?)
}

fn realization_params(poset: &Poset, lambda: &GroupSpec, budgets: Budgets) -> Value {
    json!({ "poset": poset.to_file(), "lambda": lambda, "budgets": budgets })
}

/// Valuation axioms on all pairs with `|x| + |y| ≤ total`.
pub fn valuation_axioms(poset: &Poset, lambda: &GroupSpec, budgets: Budgets, total: usize) -> Result<VerificationReport> {
    let mut params = realization_params(poset, lambda, budgets);
    params["total"] = json!(total);
    let mut r = VerificationReport::new("valuation-axioms", params);
    let rl = realize(poset, lambda, budgets)?;
    let rep = check_valuation_axioms(&rl.valuation, total)?;
    for e in &rep.examples {
        r.fail(e.as_str());
    }
    if !rep.passed() {
        r.status = Status::Fail;
    }
    r.stat("ball_size", rep.ball_size);
    r.stat("pairs_checked", rep.pairs_checked);
    r.stat("subadditivity_failures", rep.subadditivity_failures);
    r.stat("symmetry_failures", rep.symmetry_failures);
    r.stat("identity_ok", rep.identity_ok);
    r.stat("layers", rl.valuation.layers().len());
    Ok(r)
}

/// Realization report: trace, ideal censuses, containment matrices, and a
/// witness for `g ∈ L ∨ gLg⁻¹` per processed element.
pub fn realization(poset: &Poset, lambda: &GroupSpec, budgets: Budgets, ball: usize) -> Result<VerificationReport> {
    let mut params = realization_params(poset, lambda, budgets);
    params["ball"] = json!(ball);
    let mut r = VerificationReport::new("realize", params);
    let rl = realize(poset, lambda, budgets)?;
    let fp = rl.fp();
    let labels = poset.labels();
    let mut trace = Vec::new();
    for p in &rl.trace {
        let witness = match rl.witness_join_membership(&p.g, &p.g)? {
            WitnessOutcome::Found(w) => {
                if let Err(msg) = rl.verify_witness(&w)? {
                    r.fail(json!({ "g": fp.fmt_word(&p.g), "witness": msg }));
                }
                json!(w
                    .factors
                    .iter()
                    .map(|f| json!({ "side": f.side, "word": fp.fmt_word(&f.word) }))
                    .collect::<Vec<_>>())
            }
            WitnessOutcome::NotCoveredByBudget => {
                r.inconclusive();
                Value::Null
            }
        };
        trace.push(json!({
            "round": p.round,
            "g": fp.fmt_word(&p.g),
            "value": labels[p.value],
            "layer": p.layer,
            "witness": witness,
        }));
    }
    let rep = verify_intermediate_correspondence(&rl, ball)?;
    for f in &rep.failures {
        r.fail(f.as_str());
    }
    if rep.inclusion_matrix != rep.containment_matrix {
        r.fail("ideal inclusion and K(J) containment differ");
    }
    let ideals: Vec<Vec<&str>> =
        rep.ideals.iter().map(|j| j.iter().map(|&i| labels[i].as_str()).collect()).collect();
    r.stat("factors", fp.spec().factors.len());
    r.stat("layers", rl.valuation.layers().len());
    r.stat("trace", trace);
    r.stat("ideals", json!(ideals));
    r.stat("census", json!(rep.census));
    r.stat("ball_size", rep.ball_size);
    r.stat("inclusion_matrix", json!(rep.inclusion_matrix));
    r.stat("containment_matrix", json!(rep.containment_matrix));
    r.stat("witnessed_pairs", rep.witnessed);
    r.stat("pairs_not_covered", rep.not_covered);
    Ok(r)
}

/// The first processed layer that is a genuine step-1 extension.
pub fn first_step1_layer(rl: &RealizedLattice) -> Option<usize> {
    rl.trace
        .iter()
        .map(|p| p.layer)
        .find(|&l| matches!(rl.valuation.layers()[l].kind, LayerKind::Step1(_)))
}

/// Join of level values over the maximal runs of `x` avoiding `skip`.
fn runs_join(v: &Valuation, level: usize, x: &Word, skip: usize) -> Result<usize> {
    let sl = v.semilattice();
    let fp = v.free_product();
    let mut acc = sl.zero();
    let mut run = Vec::new();
    for l in x.letters() {
        if l.factor == skip {
            let w = fp.reduce(std::mem::take(&mut run));
            acc = sl.join_idx(acc, v.eval_at(level, &w)?);
        } else {
            run.push(l.clone());
        }
    }
    let w = fp.reduce(run);
    Ok(sl.join_idx(acc, v.eval_at(level, &w)?))
}

/// Every assignment of open/close/third roles to the `K₂` letters of `x`
/// that yields a valid alternating product equal to `x`.
pub fn brute_force_factorizations(v: &Valuation, layer: usize, x: &Word) -> Result<Vec<Vec<TaggedLetter>>> {
    const MAX_K2_LETTERS: usize = 12;
    let d = v.step1_data(layer)?.clone();
    let fp = v.free_product();
    let sl = v.semilattice();
    let start = v.layers()[layer].start;
    let mut syl = vec![Vec::new()];
    let mut zs = Vec::new();
    for l in x.letters() {
        if l.factor == d.k2_factor {
            zs.push(l.clone());
            syl.push(Vec::new());
        } else {
            syl.last_mut().expect("nonempty").push(l.clone());
        }
    }
    if zs.len() > MAX_K2_LETTERS {
        return Err(CheckError::Parameter(format!("more than {MAX_K2_LETTERS} K2 letters")));
    }
    let syl: Vec<Word> = syl.into_iter().map(|s| fp.reduce(s)).collect();
    let n = zs.len();
    let h1_inv = fp.invert(&d.h1);
    let k1_inv = fp.invert(&d.k1);
    let mut found = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        // 0: opening k₂, 1: closing k₂⁻¹, 2: a third-class letter.
        let roles: Vec<usize> = (0..n).map(|i| code / 3usize.pow(i as u32) % 3).collect();
        let mut letters = Vec::new();
        let mut ok = true;
        for j in 0..=n {
            let left = j.checked_sub(1).map(|k| roles[k]);
            let right = (j < n).then(|| roles[j]);
            if left == Some(0) {
                let y = syl[j].clone();
                let u = fp.product([&k1_inv, &y, &d.k1]);
                ok &= !y.is_empty()
                    && u.uses_only(|f| f < start)
                    && sl.le(v.eval_at(layer, &u)?, d.a)
                    && right == Some(1);
                letters.push(TaggedLetter { class: LetterClass::L2, core: y });
            } else {
                let mut s = syl[j].clone();
                if left == Some(2) {
                    s = fp.multiply(&d.h1, &s);
                }
                if right == Some(2) {
                    s = fp.multiply(&s, &h1_inv);
                }
                if !s.is_empty() {
                    ok &= runs_join(v, layer, &s, d.k1_factor)? != d.a;
                    letters.push(TaggedLetter { class: LetterClass::L1, core: s });
                }
            }
            if right == Some(2) {
                letters.push(TaggedLetter { class: LetterClass::L3, core: fp.reduce([zs[j].clone()]) });
            }
        }
        ok &= letters.windows(2).all(|w| w[0].class != w[1].class);
        if ok {
            let parts: Vec<Word> = letters.iter().map(|t| t.expand(fp, &d)).collect();
            if fp.product(parts.iter()) == *x {
                found.push(letters);
            }
        }
    }
    Ok(found)
}

/// Step-1 parser against exhaustive role assignment on a ball.
pub fn step1_uniqueness(poset: &Poset, lambda: &GroupSpec, budgets: Budgets, ball: usize) -> Result<VerificationReport> {
    let mut params = realization_params(poset, lambda, budgets);
    params["ball"] = json!(ball);
    let mut r = VerificationReport::new("step1-uniqueness", params);
    let rl = realize(poset, lambda, budgets)?;
    let Some(layer) = first_step1_layer(&rl) else {
        return Err(CheckError::Parameter("realization has no step-1 layer".into()));
    };
    let v = &rl.valuation;
    let fp = v.free_product().truncated(v.domain_end(layer + 1))?;
    let words = fp.enumerate_ball(ball)?;
    let outcomes: Vec<(usize, usize, bool)> = words
        .par_iter()
        .map(|x| {
            let oracle = brute_force_factorizations(v, layer, x)?;
            let parsed = v.l123_factorizations(layer, x, 2)?;
            Ok((oracle.len(), parsed.len(), oracle == parsed))
        })
        .collect::<Result<_>>()?;
    let mut factorable = 0;
    for (x, (n_oracle, n_parsed, agree)) in words.iter().zip(outcomes) {
        factorable += usize::from(n_oracle > 0);
        if n_oracle > 1 || !agree {
            r.fail(json!({ "x": fmt(&fp, x), "oracle": n_oracle, "parser": n_parsed }));
        }
    }
    r.stat("layer", layer);
    r.stat("words", words.len());
    r.stat("factorable", factorable);
    Ok(r)
}

/// Ideal inclusion against `K(J)` containment, witnesses, and self-witnesses.
pub fn correspondence(poset: &Poset, lambda: &GroupSpec, budgets: Budgets, ball: usize) -> Result<VerificationReport> {
    let mut params = realization_params(poset, lambda, budgets);
    params["ball"] = json!(ball);
    let mut r = VerificationReport::new("correspondence", params);
    let rl = realize(poset, lambda, budgets)?;
    let rep = verify_intermediate_correspondence(&rl, ball)?;
    for f in &rep.failures {
        r.fail(f.as_str());
    }
    if rep.inclusion_matrix != rep.containment_matrix {
        r.fail("ideal inclusion and K(J) containment differ");
    }
    if rep.self_witnessed != rep.processed {
        r.fail(json!({ "self_witnessed": rep.self_witnessed, "processed": rep.processed }));
    }
    if let Value::Object(m) = serde_json::to_value(&rep).expect("plain data") {
        for (k, v) in m {
            if k != "failures" {
                r.statistics.insert(k, v);
            }
        }
    }
    Ok(r)
}

/// Difference spans over `SL₂(𝔽_q)` and the invariant subgroups of `V`
/// against `{V(J) : J down-closed}`.
pub fn sl2(p: u32, m: u32, poset: &Poset, cap: usize) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("sl2", json!({ "p": p, "m": m, "poset": poset.to_file(), "cap": cap }));
    let c = Sl2Construction::new(p, m, poset.clone())?;
    let q = c.field().order();
    for x in 0..q {
        for y in 0..q {
            if (x, y) != (0, 0) && sl2_difference_span(p, m, [x, y])?.len() != (q * q) as usize {
                r.fail(json!({ "difference_span_not_full": [x, y] }));
            }
        }
    }
    let subs = c.invariant_subgroups(cap)?;
    let found: BTreeSet<Vec<usize>> = subs.iter().map(|s| s.members().collect()).collect();
    let downs = poset.down_sets()?;
    let expected: BTreeSet<Vec<usize>> = downs.iter().map(|j| c.v_of(j).members().collect()).collect();
    if found != expected {
        r.fail(json!({ "invariant_subgroups": found.len(), "down_sets": downs.len() }));
    }
    r.stat("module_size", c.module_size());
    r.stat("k0_generators", c.generators().len());
    r.stat("full_t", c.full_t);
    r.stat("invariant_subgroups", subs.len());
    r.stat("subgroup_orders", subs.iter().map(|s| s.order()).collect::<Vec<_>>());
    r.stat("down_sets", downs.len());
    Ok(r)
}

pub fn remark_identity(ball: usize, injectivity_ball: usize) -> Result<VerificationReport> {
    let mut r = VerificationReport::new(
        "remark-identity",
        json!({ "ball": ball, "injectivity_ball": injectivity_ball }),
    );
    let rep = RemarkEmbedding::new()?.check(ball, injectivity_ball)?;
    for f in rep.identity_failures.iter().chain(&rep.homomorphism_failures) {
        r.fail(f.as_str());
    }
    if rep.distinct_images != rep.ball_size {
        r.fail(json!({ "injectivity": { "ball_size": rep.ball_size, "distinct_images": rep.distinct_images } }));
    }
    if !rep.generator_images_match {
        r.fail(json!({ "generator_images": rep.generator_images }));
    }
    r.stat("triples_checked", rep.triples_checked);
    r.stat("homomorphism_pairs_checked", rep.homomorphism_pairs_checked);
    r.stat("ball_size", rep.ball_size);
    r.stat("distinct_images", rep.distinct_images);
    r.stat("generator_images", rep.generator_images);
    Ok(r)
}

/// JSON number when it fits in 64 bits, decimal string otherwise.
fn big(n: u128) -> Value {
    u64::try_from(n).map_or_else(|_| Value::String(n.to_string()), Value::from)
}

/// Exponents `p^λ` and the natural inclusions `B_λ → B_μ` for `λ ≤ μ ≤ max_lambda`.
pub fn ulm(p: u32, max_lambda: u32) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("ulm", json!({ "p": p, "max_lambda": max_lambda }));
    let groups: Vec<UlmGroup> = (0..=max_lambda).map(|l| UlmGroup::new(p, l, l)).collect::<std::result::Result<_, _>>()?;
    let mut table = Vec::new();
    for g in &groups {
        let expected = u128::from(p).pow(g.lambda);
        if g.exponent() != expected {
            r.fail(json!({ "lambda": g.lambda, "exponent": big(g.exponent()) }));
        }
        table.push(json!({
            "lambda": g.lambda,
            "generators": g.sequences.len(),
            "invariant_factors": g.group.invariant_factors.iter().map(|&d| big(d)).collect::<Vec<_>>(),
            "exponent": big(g.exponent()),
        }));
    }
    let mut inclusions = 0;
    for a in &groups {
        for b in groups.iter().filter(|b| b.lambda >= a.lambda) {
            let rep = a.inclusion_into(b)?;
            inclusions += 1;
            if !rep.relations_respected || !rep.injective {
                r.fail(serde_json::to_value(rep).expect("plain data"));
            }
        }
    }
    let top = groups.last().expect("lambda range is nonempty");
    r.stat("invariant_factors", top.group.invariant_factors.iter().map(|&d| big(d)).collect::<Vec<_>>());
    r.stat("exponent", big(top.exponent()));
    r.stat("groups", table);
    r.stat("inclusions_checked", inclusions);
    Ok(r)
}

/// A random poset on `n` points: each pair `i < j` is a generating relation
/// with probability `density`.
pub fn random_poset(rng: &mut impl Rng, n: usize, density: f64) -> Result<Poset> {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                pairs.push((i, j));
            }
        }
    }
    Ok(Poset::new((0..n).map(|i| format!("p{i}")).collect(), &pairs, RelationKind::Cover)?)
}

/// `φ(i) ⊆ φ(j) ⟺ i ≤ j` and the lattice axioms of the completion on random posets.
pub fn phi_embedding_check(count: usize, max_size: usize, seed: u64) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("phi-embedding", json!({ "posets": count, "max_size": max_size }));
    r.seed = seed;
    if max_size == 0 {
        return Err(CheckError::Parameter("max_size must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut pairs, mut lattice_sizes) = (0usize, 0usize);
    for k in 0..count {
        let n = rng.gen_range(1..=max_size);
        let p = random_poset(&mut rng, n, 0.3)?;
        let all: BTreeSet<usize> = (0..n).collect();
        let phi = phi_embedding(&p, &all)?;
        for i in 0..n {
            for j in 0..n {
                pairs += 1;
                if phi[i].is_subset(&phi[j]) != p.le(i, j) {
                    r.fail(json!({ "poset": k, "poset_file": p.to_file(), "i": i, "j": j }));
                }
            }
        }
        let lat = completion(&p)?;
        lattice_sizes += lat.len();
        if !lat.satisfies_lattice_axioms() {
            r.fail(json!({ "poset": k, "completion_axioms": false }));
        }
    }
    r.stat("pairs_checked", pairs);
    r.stat("total_completion_size", lattice_sizes);
    Ok(r)
}

/// Check names in the order the command line lists them.
pub const CHECK_NAMES: [&str; 13] = [
    "word-calculus",
    "power-growth",
    "playing-with-words",
    "w-decomposition",
    "elem-permutation",
    "intersection-assumptions",
    "valuation-axioms",
    "step1-uniqueness",
    "correspondence",
    "sl2",
    "remark-identity",
    "ulm",
    "phi-embedding",
];

#[cfg(test)]
mod tests {
    use super::*;

    fn consistent(r: &VerificationReport) -> bool {
        (r.status == Status::Fail) == !r.counterexamples.is_empty()
    }

    #[test]
    fn status_serialization() {
        let names: Vec<String> = [Status::Pass, Status::Fail, Status::Inconclusive]
            .iter()
            .map(|s| serde_json::to_string(s).unwrap())
            .collect();
        assert_eq!(names, ["\"pass\"", "\"fail\"", "\"inconclusive-at-budget\""]);
    }

    #[test]
    fn small_checks_pass_and_are_consistent() {
        let fp = FreeProduct::from_factors(vec![GroupSpec::cyclic(2), GroupSpec::cyclic(3)]).unwrap();
        let reports = [
            word_calculus(&fp, 4, 2).unwrap(),
            elem_permutation(5).unwrap(),
            ulm(2, 2).unwrap(),
            sl2(2, 1, &Poset::antichain(2), 100).unwrap(),
            phi_embedding_check(10, 5, 3).unwrap(),
        ];
        for r in &reports {
            assert!(r.passed(), "{}", r.check);
            assert!(consistent(r));
        }
    }

    #[test]
    fn power_growth_failure_carries_counterexamples() {
        let fp = FreeProduct::from_factors(vec![GroupSpec::cyclic(2), GroupSpec::cyclic(3)]).unwrap();
        let r = power_growth(&fp, 3, 4).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(consistent(&r));
        assert_eq!(r.statistics["cyclically_reduced_failures"], 0);
    }

    #[test]
    fn reports_are_reproducible() {
        let a = serde_json::to_string(&phi_embedding_check(15, 6, 11).unwrap()).unwrap();
        let b = serde_json::to_string(&phi_embedding_check(15, 6, 11).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bad_parameters() {
        assert!(matches!(elem_permutation(2), Err(CheckError::Parameter(_))));
        assert!(matches!(phi_embedding_check(1, 0, 0), Err(CheckError::Parameter(_))));
        assert!(ulm(4, 1).is_err());
    }
}
