//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use latticeforge::constructions::{RemarkEmbedding, Sl2Construction, UlmGroup};
use latticeforge::freeprod::{Letter, Word};
use latticeforge::group::GElem;
use latticeforge::valuation::{LetterClass, TaggedLetter, Valuation};

/// Join of lower-level values over maximal runs avoiding `skip`.
pub fn runs_join(v: &Valuation, level: usize, x: &Word, skip: usize) -> usize {
    let sl = v.semilattice();
    let mut acc = sl.zero();
    let mut run = Vec::new();
    let fp = v.free_product();
    for l in x.letters().iter().chain(std::iter::once(&Letter::new(skip, latticeforge::group::GElem::Residue(0)))) {
        if l.factor == skip {
            if !run.is_empty() {
                let w = fp.reduce(std::mem::take(&mut run));
                acc = sl.join_idx(acc, v.eval_at(level, &w).unwrap());
            }
        } else {
            run.push(l.clone());
        }
    }
    acc
}

/// Every assignment of roles (open, close, third) to the K₂ letters of `x`,
/// kept when it yields an alternating word of valid letters multiplying to `x`.
pub fn oracle_factorizations(v: &Valuation, layer: usize, x: &Word) -> Vec<Vec<TaggedLetter>> {
    let d = v.step1_data(layer).unwrap().clone();
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
            syl.last_mut().unwrap().push(l.clone());
        }
    }
    let syl: Vec<Word> = syl.into_iter().map(|s| fp.reduce(s)).collect();
    let n = zs.len();
    let h1_inv = fp.invert(&d.h1);
    let k1_inv = fp.invert(&d.k1);
    let mut found = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let roles: Vec<usize> = (0..n).map(|i| code / 3usize.pow(i as u32) % 3).collect();
        let mut letters: Vec<TaggedLetter> = Vec::new();
        let mut ok = true;
        for j in 0..=n {
            let left = j.checked_sub(1).map(|k| roles[k]);
            let right = (j < n).then(|| roles[j]);
            if left == Some(0) {
                // k₂ y k₂⁻¹ with y ∈ k₁ G_δ(a) k₁⁻¹ ∖ {e}
                let y = syl[j].clone();
                let u = fp.product([&k1_inv, &y, &d.k1]);
                let in_g1 = !y.is_empty()
                    && u.uses_only(|f| f < start)
                    && sl.le(v.eval_at(layer, &u).unwrap(), d.a)
                    && right == Some(1);
                ok &= in_g1;
                letters.push(TaggedLetter { class: LetterClass::L2, core: y });
            } else {
                let mut r = syl[j].clone();
                if left == Some(2) {
                    r = fp.multiply(&d.h1, &r);
                }
                if right == Some(2) {
                    r = fp.multiply(&r, &h1_inv);
                }
                if !r.is_empty() {
                    ok &= runs_join(v, layer, &r, d.k1_factor) != d.a;
                    letters.push(TaggedLetter { class: LetterClass::L1, core: r });
                }
            }
            if right == Some(2) {
                letters.push(TaggedLetter { class: LetterClass::L3, core: fp.reduce([zs[j].clone()]) });
            }
        }
        ok &= letters.windows(2).all(|w| w[0].class != w[1].class);
        if !ok {
            continue;
        }
        let product = fp.product(letters.iter().map(|t| t.expand(fp, &d)).collect::<Vec<_>>().iter());
        if product == *x {
            found.push(letters);
        }
    }
    found
}

/// Every additive subgroup of `V`, grown one generator at a time.
pub fn all_subgroups(c: &Sl2Construction) -> Vec<BTreeSet<usize>> {
    let n = c.module_size();
    let add = |x: usize, y: usize| {
        let (a, b) = (c.decode(x), c.decode(y));
        c.encode(&a.iter().zip(&b).map(|(s, t)| c.field().add(*s, *t)).collect::<Vec<_>>())
    };
    let close = |mut s: BTreeSet<usize>| loop {
        let extra: Vec<usize> = s.iter().flat_map(|&x| s.iter().map(move |&y| (x, y))).map(|(x, y)| add(x, y)).collect();
        let before = s.len();
        s.extend(extra);
        if s.len() == before {
            return s;
        }
    };
    let mut seen: HashSet<BTreeSet<usize>> = HashSet::from([BTreeSet::from([0])]);
    let mut frontier = vec![BTreeSet::from([0])];
    while let Some(s) = frontier.pop() {
        for v in 0..n {
            if !s.contains(&v) {
                let mut t = s.clone();
                t.insert(v);
                let t = close(t);
                if seen.insert(t.clone()) {
                    frontier.push(t);
                }
            }
        }
    }
    seen.into_iter().collect()
}

/// `ℤ^N / (L + p^λ ℤ^N)` by breadth-first search over `(ℤ/p^λ)^N`: returns
/// its order and the smallest `p^k` killing every generator.
pub fn brute_quotient(g: &UlmGroup) -> (u128, u128) {
    let n = g.sequences.len();
    let modulus = (g.p as usize).pow(g.lambda);
    let size = modulus.pow(n as u32);
    let encode = |v: &[usize]| v.iter().rev().fold(0, |acc, &c| acc * modulus + c);
    let decode = |mut c: usize| {
        (0..n)
            .map(|_| {
                let x = c % modulus;
                c /= modulus;
                x
            })
            .collect::<Vec<_>>()
    };
    let gens: Vec<Vec<usize>> = g
        .relations
        .iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(modulus as i128) as usize).collect())
        .collect();
    let mut inside = vec![false; size];
    inside[0] = true;
    let mut queue = vec![0usize];
    while let Some(c) = queue.pop() {
        let v = decode(c);
        for r in &gens {
            let w: Vec<usize> = v.iter().zip(r).map(|(a, b)| (a + b) % modulus).collect();
            let code = encode(&w);
            if !inside[code] {
                inside[code] = true;
                queue.push(code);
            }
        }
    }
    let sub = inside.iter().filter(|&&b| b).count();
    let order = (size / sub) as u128;
    let mut exponent = 1usize;
    while !(0..n).all(|j| {
        let mut v = vec![0; n];
        v[j] = exponent % modulus;
        inside[encode(&v)]
    }) {
        exponent *= g.p as usize;
    }
    (order, exponent as u128)
}

/// `δ` computed letter by letter: `a`, `b` at even depth map to `u`, `vuv⁻¹`
/// and at odd depth to their `v²`-conjugates.
pub fn delta_walk(r: &RemarkEmbedding, x: &Word) -> Option<Word> {
    let f2 = r.f2();
    let u = f2.letter(0, GElem::Free(vec![(0, 1)])).unwrap();
    let v = f2.letter(0, GElem::Free(vec![(1, 1)])).unwrap();
    let mut odd = false;
    let mut acc = Word::identity();
    for l in x.letters() {
        match &l.elem {
            GElem::Residue(_) => odd = !odd,
            GElem::Free(syl) => {
                for &(gen, e) in syl {
                    let shift = i64::from(gen) + if odd { 2 } else { 0 };
                    let img = f2.conjugate(&f2.power(&v, shift), &u);
                    acc = f2.multiply(&acc, &f2.power(&img, e));
                }
            }
            _ => unreachable!(),
        }
    }
    (!odd).then_some(acc)
}

pub fn invariant(c: &Sl2Construction, s: &BTreeSet<usize>) -> bool {
    c.generators().iter().all(|g| s.iter().all(|&x| s.contains(&c.encode(&c.apply_generator(g, &c.decode(x))))))
}

pub fn brute_force_invariant(c: &Sl2Construction) -> BTreeSet<BTreeSet<usize>> {
    all_subgroups(c).into_iter().filter(|s| invariant(c, s)).collect()
}
