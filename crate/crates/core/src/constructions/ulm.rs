//! Finite truncations of Ulm's abelian p-groups `B_λ`, analysed through the
//! Smith normal form of their relation matrix.

use serde::Serialize;

use super::ConstructionError;
use crate::field::is_prime;

type Matrix = Vec<Vec<i128>>;

/// `U·A·V = D` with `U`, `V` unimodular and `D` diagonal with each entry
/// dividing the next. `v_inv` is `V⁻¹`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Smith {
    pub u: Matrix,
    pub d: Matrix,
    pub v: Matrix,
    pub v_inv: Matrix,
}

fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

fn checked(x: Option<i128>) -> Result<i128, ConstructionError> {
    x.ok_or(ConstructionError::Overflow)
}

struct Reducer {
    a: Matrix,
    u: Matrix,
    v: Matrix,
    v_inv: Matrix,
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            row.swap(i, j);
        }
        self.v_inv.swap(i, j);
    }

    /// `row_i -= q·row_t`.
    fn row_op(&mut self, i: usize, t: usize, q: i128) -> Result<(), ConstructionError> {
        for m in [&mut self.a, &mut self.u] {
            for k in 0..m[i].len() {
                m[i][k] = checked(m[t][k].checked_mul(q).and_then(|x| m[i][k].checked_sub(x)))?;
            }
        }
        Ok(())
    }

    /// `col_j -= q·col_t`, with the inverse row operation on `V⁻¹`.
    fn col_op(&mut self, j: usize, t: usize, q: i128) -> Result<(), ConstructionError> {
        for m in [&mut self.a, &mut self.v] {
            for row in m.iter_mut() {
                row[j] = checked(row[t].checked_mul(q).and_then(|x| row[j].checked_sub(x)))?;
            }
        }
        for k in 0..self.v_inv[t].len() {
            let add = checked(self.v_inv[j][k].checked_mul(q))?;
            self.v_inv[t][k] = checked(self.v_inv[t][k].checked_add(add))?;
        }
        Ok(())
    }
}

/// Smith normal form of an integer matrix.
pub fn smith_normal_form(a: &[Vec<i128>]) -> Result<Smith, ConstructionError> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = Reducer { a: a.to_vec(), u: identity(rows), v: identity(cols), v_inv: identity(cols) };
    for t in 0..rows.min(cols) {
        loop {
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| r.a[i][j] != 0)
                .min_by_key(|&(i, j)| r.a[i][j].unsigned_abs());
            let Some((pi, pj)) = pivot else { break };
            r.swap_rows(t, pi);
            r.swap_cols(t, pj);
            let p = r.a[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let q = r.a[i][t].div_euclid(p);
                r.row_op(i, t, q)?;
                clean &= r.a[i][t] == 0;
            }
            for j in t + 1..cols {
                let q = r.a[t][j].div_euclid(p);
                r.col_op(j, t, q)?;
                clean &= r.a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| r.a[i][j] % p != 0));
            match bad {
                Some(i) => r.row_op(t, i, -1)?,
                None => break,
            }
        }
        if t < rows && r.a[t][t] < 0 {
            for k in 0..r.u[t].len() {
                r.u[t][k] = -r.u[t][k];
            }
            r.a[t][t] = -r.a[t][t];
        }
    }
    Ok(Smith { u: r.u, d: r.a, v: r.v, v_inv: r.v_inv })
}

/// A finite abelian group `ℤ^n / ⟨relation rows⟩` in invariant-factor form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteAbelian {
    /// Nontrivial invariant factors, each dividing the next.
    pub invariant_factors: Vec<u128>,
    /// Coordinates of each generator in `⊕ ℤ/dᵢ`.
    pub generator_coords: Vec<Vec<u128>>,
    /// Each invariant-factor basis element as an integer combination of generators.
    pub basis_in_generators: Vec<Vec<i128>>,
}

impl FiniteAbelian {
    pub fn from_relations(generators: usize, relations: &[Vec<i128>]) -> Result<Self, ConstructionError> {
        if relations.iter().any(|r| r.len() != generators) {
            return Err(ConstructionError::InvalidVector);
        }
        let mut padded = relations.to_vec();
        if padded.is_empty() {
            padded.push(vec![0; generators]);
        }
        let s = smith_normal_form(&padded)?;
        let diag: Vec<i128> = (0..generators).map(|i| s.d.get(i).map_or(0, |row| row[i])).collect();
        if diag.contains(&0) {
            return Err(ConstructionError::Infinite);
        }
        let keep: Vec<usize> = (0..generators).filter(|&i| diag[i] != 1).collect();
        let invariant_factors: Vec<u128> = keep.iter().map(|&i| diag[i] as u128).collect();
        let generator_coords = (0..generators)
            .map(|j| keep.iter().map(|&i| s.v[j][i].rem_euclid(diag[i]) as u128).collect())
            .collect();
        let basis_in_generators = keep.iter().map(|&i| s.v_inv[i].clone()).collect();
        Ok(Self { invariant_factors, generator_coords, basis_in_generators })
    }

    pub fn order(&self) -> u128 {
        self.invariant_factors.iter().product()
    }

    pub fn exponent(&self) -> u128 {
        self.invariant_factors.last().copied().unwrap_or(1)
    }

    /// Coordinates of `Σ cⱼ·genⱼ`.
    pub fn combine(&self, coeffs: &[i128]) -> Vec<u128> {
        let mut out = vec![0u128; self.invariant_factors.len()];
        for (c, coords) in coeffs.iter().zip(&self.generator_coords) {
            for (k, (o, x)) in out.iter_mut().zip(coords).enumerate() {
                let d = self.invariant_factors[k] as i128;
                *o = (*o as i128 + c.rem_euclid(d) * (*x as i128)).rem_euclid(d) as u128;
            }
        }
        out
    }

    pub fn is_zero(&self, coords: &[u128]) -> bool {
        coords.iter().all(|&c| c == 0)
    }

    /// Order of the subgroup generated by the given elements.
    pub fn subgroup_order(&self, elems: &[Vec<u128>]) -> Result<u128, ConstructionError> {
        let r = self.invariant_factors.len();
        let mut rels: Vec<Vec<i128>> = elems.iter().map(|e| e.iter().map(|&c| c as i128).collect()).collect();
        for (k, &d) in self.invariant_factors.iter().enumerate() {
            let mut row = vec![0; r];
            row[k] = d as i128;
            rels.push(row);
        }
        let quotient = if r == 0 { 1 } else { FiniteAbelian::from_relations(r, &rels)?.order() };
        Ok(self.order() / quotient)
    }
}

/// p-adic valuation of a nonzero integer.
fn vp(mut x: u128, p: u128) -> u32 {
    let mut k = 0;
    while x.is_multiple_of(p) {
        x /= p;
        k += 1;
    }
    k
}

/// `B_λ` for a finite λ: generators `a(i₁,…,iₙ)` for strictly increasing
/// sequences below λ, `p·a(i) = 0` and `p·a(i₁,…,iₙ) = a(i₂,…,iₙ)`.
#[derive(Debug, Clone, Serialize)]
pub struct UlmGroup {
    pub p: u32,
    pub lambda: u32,
    pub sequences: Vec<Vec<u32>>,
    pub relations: Vec<Vec<i128>>,
    pub group: FiniteAbelian,
}

/// Outcome of mapping `B_λ` into `B_μ` by sending each generator to the
/// generator with the same index sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InclusionReport {
    pub lambda: u32,
    pub mu: u32,
    pub relations_respected: bool,
    pub injective: bool,
}

/// Largest λ accepted; the generator count is `2^λ − 1`.
pub const MAX_LAMBDA: u32 = 10;

impl UlmGroup {
    /// `index_bound` caps the length of the index sequences and must be at least λ,
    /// so that the presentation is complete.
    pub fn new(p: u32, lambda: u32, index_bound: u32) -> Result<Self, ConstructionError> {
        if !is_prime(p) {
            return Err(ConstructionError::NotPrime(p));
        }
        if index_bound < lambda {
            return Err(ConstructionError::IndexBound { lambda, index_bound });
        }
        if lambda > MAX_LAMBDA {
            return Err(ConstructionError::TooLarge);
        }
        let mut sequences: Vec<Vec<u32>> = (1u32..1 << lambda)
            .map(|mask| (0..lambda).filter(|i| mask >> i & 1 == 1).collect())
            .collect();
        sequences.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let index = |s: &[u32]| sequences.iter().position(|t| t == s).expect("suffix of a sequence");
        let relations: Vec<Vec<i128>> = sequences
            .iter()
            .map(|s| {
                let mut row = vec![0i128; sequences.len()];
                row[index(s)] = i128::from(p);
                if s.len() > 1 {
                    row[index(&s[1..])] -= 1;
                }
                row
            })
            .collect();
        let group = FiniteAbelian::from_relations(sequences.len(), &relations)?;
        Ok(Self { p, lambda, sequences, relations, group })
    }

    pub fn exponent(&self) -> u128 {
        self.group.exponent()
    }

    pub fn generator(&self, seq: &[u32]) -> Option<usize> {
        self.sequences.iter().position(|s| s == seq)
    }

    /// Largest `k` with `x ∈ p^k·B`; `None` for zero.
    pub fn height(&self, coords: &[u128]) -> Option<u32> {
        let p = u128::from(self.p);
        coords
            .iter()
            .zip(&self.group.invariant_factors)
            .filter(|(c, _)| **c != 0)
            .map(|(&c, _)| vp(c, p))
            .min()
    }

    pub fn generator_height(&self, gen: usize) -> Option<u32> {
        self.height(&self.group.generator_coords[gen])
    }

    /// Checks the natural map into `target`.
    pub fn inclusion_into(&self, target: &UlmGroup) -> Result<InclusionReport, ConstructionError> {
        if target.p != self.p || target.lambda < self.lambda {
            return Err(ConstructionError::NotBelow(self.lambda as usize, target.lambda as usize));
        }
        let images: Vec<usize> = self
            .sequences
            .iter()
            .map(|s| target.generator(s).expect("index sequences below λ are below μ"))
            .collect();
        let relations_respected = self.relations.iter().all(|row| {
            let mut coeffs = vec![0i128; target.sequences.len()];
            for (j, &c) in row.iter().enumerate() {
                coeffs[images[j]] += c;
            }
            target.group.is_zero(&target.group.combine(&coeffs))
        });
        let image_coords: Vec<Vec<u128>> = images.iter().map(|&j| target.group.generator_coords[j].clone()).collect();
        let injective = target.group.subgroup_order(&image_coords)? == self.group.order();
        Ok(InclusionReport { lambda: self.lambda, mu: target.lambda, relations_respected, injective })
    }
}
