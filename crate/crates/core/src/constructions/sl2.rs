//! The module `V = (F_q²)^(I)` with block-triangular `SL₂` actions, and its
//! invariant additive subgroups.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::Serialize;

use super::ConstructionError;
use crate::field::Gf;
use crate::group::{GElem, Group, GroupSpec};
use crate::order::Poset;

/// Above this many elements of `T` only a generating subset is used.
pub const T_ENUMERATION_LIMIT: usize = 10_000;

/// Largest module handled, as a number of vectors.
pub const MODULE_CAP: u64 = 1 << 16;

/// Row-major 2×2 matrix over the field.
pub type Mat2 = [u32; 4];

/// `[[A, X], [0, B]]` with `A, B ∈ SL₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TElement {
    pub a: Mat2,
    pub b: Mat2,
    pub x: Mat2,
}

/// A generator of `K₀`: `π_{a,b}(t)` for `a < b`, or `π_a(A)` when `upper` is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct K0Generator {
    pub lower: usize,
    pub upper: Option<usize>,
    pub t: TElement,
}

#[derive(Debug, Clone)]
pub struct Sl2Construction {
    field: Gf,
    poset: Poset,
    sl2: Vec<Mat2>,
    generators: Vec<K0Generator>,
    /// Whether all of `T` was used rather than a generating subset.
    pub full_t: bool,
}

/// An additive subgroup of `V` as a membership bitmap over encoded vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    bits: Vec<u64>,
}

impl Subgroup {
    fn empty(size: usize) -> Self {
        Self { bits: vec![0; size.div_ceil(64)] }
    }

    pub fn contains(&self, code: usize) -> bool {
        self.bits[code / 64] >> (code % 64) & 1 == 1
    }

    fn insert(&mut self, code: usize) -> bool {
        let fresh = !self.contains(code);
        self.bits[code / 64] |= 1 << (code % 64);
        fresh
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.bits.len() * 64).filter(|&c| self.contains(c))
    }

    pub fn order(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &Subgroup) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        Subgroup { bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect() }
    }
}

fn mat_vec(f: &Gf, m: &Mat2, v: [u32; 2]) -> [u32; 2] {
    [
        f.add(f.mul(m[0], v[0]), f.mul(m[1], v[1])),
        f.add(f.mul(m[2], v[0]), f.mul(m[3], v[1])),
    ]
}

fn to_mat2(g: &GElem) -> Mat2 {
    match g {
        GElem::Matrix(m) if m.len() == 4 => [m[0], m[1], m[2], m[3]],
        _ => unreachable!("SL2 elements are 2x2 matrices"),
    }
}

const IDENTITY: Mat2 = [1, 0, 0, 1];
const ZERO: Mat2 = [0, 0, 0, 0];

/// All elements of `SL₂(F_q)`.
pub fn sl2_elements(p: u32, m: u32) -> Result<Vec<Mat2>, ConstructionError> {
    let g = Group::new(GroupSpec::Sl2 { p, m })?;
    Ok(g.elements()?.iter().map(to_mat2).collect())
}

/// Additive subgroup of `F_q²` generated by `{A v − v : A ∈ SL₂(F_q)}`,
/// as a sorted list of vectors.
pub fn sl2_difference_span(p: u32, m: u32, v: [u32; 2]) -> Result<Vec<[u32; 2]>, ConstructionError> {
    let f = Gf::new(p, m)?;
    if v.iter().any(|&c| c >= f.order()) {
        return Err(ConstructionError::InvalidVector);
    }
    let diffs: Vec<[u32; 2]> = sl2_elements(p, m)?
        .iter()
        .map(|a| {
            let w = mat_vec(&f, a, v);
            [f.sub(w[0], v[0]), f.sub(w[1], v[1])]
        })
        .collect();
    let mut span: BTreeSet<[u32; 2]> = BTreeSet::from([[0, 0]]);
    let mut queue: VecDeque<[u32; 2]> = VecDeque::from([[0, 0]]);
    while let Some(x) = queue.pop_front() {
        for d in &diffs {
            let y = [f.add(x[0], d[0]), f.add(x[1], d[1])];
            if span.insert(y) {
                queue.push_back(y);
            }
        }
    }
    Ok(span.into_iter().collect())
}

impl Sl2Construction {
    pub fn new(p: u32, m: u32, poset: Poset) -> Result<Self, ConstructionError> {
        let field = Gf::new(p, m)?;
        let q = field.order() as u64;
        let size = q.checked_pow(2 * poset.len() as u32).filter(|&s| s <= MODULE_CAP);
        if size.is_none() {
            return Err(ConstructionError::TooLarge);
        }
        let sl2 = sl2_elements(p, m)?;
        let q4 = q.pow(4) as usize;
        let full_t = sl2.len() * sl2.len() * q4 <= T_ENUMERATION_LIMIT;
        let t_set: Vec<TElement> = if full_t {
            let mut out = Vec::new();
            for a in &sl2 {
                for b in &sl2 {
                    for code in 0..q4 {
                        let mut x = [0; 4];
                        let mut c = code as u32;
                        for slot in x.iter_mut() {
                            *slot = c % q as u32;
                            c /= q as u32;
                        }
                        out.push(TElement { a: *a, b: *b, x });
                    }
                }
            }
            out
        } else {
            let sl2_gens: Vec<Mat2> =
                Group::new(GroupSpec::Sl2 { p, m })?.generators().iter().map(to_mat2).collect();
            let mut out = Vec::new();
            for g in &sl2_gens {
                out.push(TElement { a: *g, b: IDENTITY, x: ZERO });
                out.push(TElement { a: IDENTITY, b: *g, x: ZERO });
            }
            for e in field.prime_basis() {
                for slot in 0..4 {
                    let mut x = ZERO;
                    x[slot] = e;
                    out.push(TElement { a: IDENTITY, b: IDENTITY, x });
                }
            }
            out
        };
        let mut generators = Vec::new();
        for a in 0..poset.len() {
            for g in &sl2 {
                generators.push(K0Generator { lower: a, upper: None, t: TElement { a: *g, b: IDENTITY, x: ZERO } });
            }
        }
        for a in 0..poset.len() {
            for b in 0..poset.len() {
                if poset.lt(a, b) {
                    generators.extend(t_set.iter().map(|t| K0Generator { lower: a, upper: Some(b), t: *t }));
                }
            }
        }
        Ok(Self { field, poset, sl2, generators, full_t })
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn generators(&self) -> &[K0Generator] {
        &self.generators
    }

    pub fn sl2(&self) -> &[Mat2] {
        &self.sl2
    }

    /// Number of vectors in `V`.
    pub fn module_size(&self) -> usize {
        (self.field.order() as usize).pow(2 * self.poset.len() as u32)
    }

    pub fn encode(&self, v: &[u32]) -> usize {
        let q = self.field.order() as usize;
        v.iter().rev().fold(0, |acc, &c| acc * q + c as usize)
    }

    pub fn decode(&self, mut code: usize) -> Vec<u32> {
        let q = self.field.order() as usize;
        (0..2 * self.poset.len())
            .map(|_| {
                let c = (code % q) as u32;
                code /= q;
                c
            })
            .collect()
    }

    /// `π_{a,b}(t)(v)`: coordinates outside `a`, `b` are fixed.
    pub fn pi_ab_apply(&self, a: usize, b: usize, t: &TElement, v: &[u32]) -> Result<Vec<u32>, ConstructionError> {
        if !self.poset.lt(a, b) {
            return Err(ConstructionError::NotBelow(a, b));
        }
        self.check_vector(v)?;
        Ok(self.apply_block(a, Some(b), t, v))
    }

    fn check_vector(&self, v: &[u32]) -> Result<(), ConstructionError> {
        if v.len() != 2 * self.poset.len() || v.iter().any(|&c| c >= self.field.order()) {
            return Err(ConstructionError::InvalidVector);
        }
        Ok(())
    }

    fn apply_block(&self, a: usize, b: Option<usize>, t: &TElement, v: &[u32]) -> Vec<u32> {
        let f = &self.field;
        let mut out = v.to_vec();
        let va = [v[2 * a], v[2 * a + 1]];
        let mut new_a = mat_vec(f, &t.a, va);
        if let Some(b) = b {
            let wb = [v[2 * b], v[2 * b + 1]];
            let xw = mat_vec(f, &t.x, wb);
            new_a = [f.add(new_a[0], xw[0]), f.add(new_a[1], xw[1])];
            let new_b = mat_vec(f, &t.b, wb);
            out[2 * b] = new_b[0];
            out[2 * b + 1] = new_b[1];
        }
        out[2 * a] = new_a[0];
        out[2 * a + 1] = new_a[1];
        out
    }

    pub fn apply_generator(&self, g: &K0Generator, v: &[u32]) -> Vec<u32> {
        self.apply_block(g.lower, g.upper, &g.t, v)
    }

    fn add_codes(&self, x: usize, y: usize) -> usize {
        let (vx, vy) = (self.decode(x), self.decode(y));
        let sum: Vec<u32> = vx.iter().zip(&vy).map(|(a, b)| self.field.add(*a, *b)).collect();
        self.encode(&sum)
    }

    /// Images of every vector under every generator, as code tables.
    fn action_tables(&self) -> Vec<Vec<usize>> {
        let n = self.module_size();
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut out = Vec::new();
        for g in &self.generators {
            let table: Vec<usize> = (0..n).map(|c| self.encode(&self.apply_generator(g, &self.decode(c)))).collect();
            if seen.insert(table.clone()) {
                out.push(table);
            }
        }
        out
    }

    /// Smallest invariant subgroup containing `seeds`.
    fn invariant_closure(&self, seeds: impl IntoIterator<Item = usize>, tables: &[Vec<usize>], adds: &[Vec<usize>]) -> Subgroup {
        let mut s = Subgroup::empty(self.module_size());
        s.insert(0);
        let mut queue: VecDeque<usize> = VecDeque::new();
        let mut members = vec![0usize];
        for c in seeds {
            if s.insert(c) {
                queue.push_back(c);
                members.push(c);
            }
        }
        while let Some(x) = queue.pop_front() {
            let mut fresh = Vec::new();
            for t in tables {
                fresh.push(t[x]);
            }
            for &m in &members {
                fresh.push(adds[x][m]);
            }
            for y in fresh {
                if s.insert(y) {
                    queue.push_back(y);
                    members.push(y);
                }
            }
        }
        s
    }

    /// All invariant additive subgroups, sorted by order then membership.
    pub fn invariant_subgroups(&self, cap: usize) -> Result<Vec<Subgroup>, ConstructionError> {
        let n = self.module_size();
        let tables = self.action_tables();
        let adds: Vec<Vec<usize>> = (0..n).map(|x| (0..n).map(|y| self.add_codes(x, y)).collect()).collect();
        // Every invariant subgroup is a sum of cyclic ones.
        let cyclic: BTreeSet<Subgroup> = (0..n).map(|v| self.invariant_closure([v], &tables, &adds)).collect();
        let mut all: BTreeSet<Subgroup> = cyclic.clone();
        let mut frontier: Vec<Subgroup> = cyclic.iter().cloned().collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for s in &frontier {
                for c in &cyclic {
                    if c.is_subset(s) {
                        continue;
                    }
                    let sum = self.invariant_closure(s.members().chain(c.members()), &tables, &adds);
                    if !all.contains(&sum) {
                        if all.len() >= cap {
                            return Err(ConstructionError::CapExceeded(cap));
                        }
                        all.insert(sum.clone());
                        next.push(sum);
                    }
                }
            }
            frontier = next;
        }
        let mut out: Vec<Subgroup> = all.into_iter().collect();
        out.sort_by_key(|s| (s.order(), s.clone()));
        Ok(out)
    }

    /// `V(J) = ⊕_{a ∈ J} V_a`.
    pub fn v_of(&self, j: &BTreeSet<usize>) -> Subgroup {
        let mut s = Subgroup::empty(self.module_size());
        for c in 0..self.module_size() {
            let v = self.decode(c);
            if (0..self.poset.len()).all(|a| j.contains(&a) || (v[2 * a] == 0 && v[2 * a + 1] == 0)) {
                s.insert(c);
            }
        }
        s
    }

    /// Checks that every generator is invertible and fixes the coordinates
    /// outside its block.
    pub fn generators_well_formed(&self) -> bool {
        let n = self.module_size();
        self.generators.iter().all(|g| {
            let mut hit = vec![false; n];
            for c in 0..n {
                let v = self.decode(c);
                let w = self.apply_generator(g, &v);
                let outside_fixed = (0..self.poset.len())
                    .filter(|&k| k != g.lower && Some(k) != g.upper)
                    .all(|k| v[2 * k] == w[2 * k] && v[2 * k + 1] == w[2 * k + 1]);
                if !outside_fixed {
                    return false;
                }
                hit[self.encode(&w)] = true;
            }
            hit.into_iter().all(|h| h)
        })
    }
}

/// `A·B` for 2×2 matrices.
pub fn mat2_mul(f: &Gf, a: &Mat2, b: &Mat2) -> Mat2 {
    [
        f.add(f.mul(a[0], b[0]), f.mul(a[1], b[2])),
        f.add(f.mul(a[0], b[1]), f.mul(a[1], b[3])),
        f.add(f.mul(a[2], b[0]), f.mul(a[3], b[2])),
        f.add(f.mul(a[2], b[1]), f.mul(a[3], b[3])),
    ]
}

/// Product in `T`: `[[A, X], [0, B]]·[[A', X'], [0, B']] = [[AA', AX' + XB'], [0, BB']]`.
pub fn t_mul(f: &Gf, s: &TElement, t: &TElement) -> TElement {
    let ax = mat2_mul(f, &s.a, &t.x);
    let xb = mat2_mul(f, &s.x, &t.b);
    TElement {
        a: mat2_mul(f, &s.a, &t.a),
        b: mat2_mul(f, &s.b, &t.b),
        x: [f.add(ax[0], xb[0]), f.add(ax[1], xb[1]), f.add(ax[2], xb[2]), f.add(ax[3], xb[3])],
    }
}
