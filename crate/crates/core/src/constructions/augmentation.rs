//! The free group `G_Γ` on `a₀` and `(a_g)_{g ∈ Γ}`, its map `π_Γ` onto
//! `ℤ ∗ Γ`, and the subgroup `N_Γ ⩽ G_Γ × G_Γ` of diagonal pairs `(g, g)` with
//! `π_Γ(g) ∈ Γ`.

use std::collections::BTreeMap;

use super::ConstructionError;
use crate::freeprod::{FreeProduct, GroupHom, Word};
use crate::group::{GElem, Group, GroupSpec};

/// Largest `Γ` accepted, so that `G_Γ` has a manageable rank.
pub const MAX_BASE_ORDER: usize = 1 << 12;

/// Pair-coset key mapped to its representative pair.
pub type PairCosets = BTreeMap<(GElem, Word), (GElem, GElem)>;

#[derive(Debug, Clone)]
pub struct AugmentationData {
    base: Group,
    /// Elements of `Γ`; `a_g` is free generator `1 + index`.
    elements: Vec<GElem>,
    free: Group,
    pi: GroupHom,
}

impl AugmentationData {
    pub fn new(gamma: GroupSpec) -> Result<Self, ConstructionError> {
        let base = Group::new(gamma.clone())?;
        if !base.is_finite() || base.size().is_none_or(|s| s > MAX_BASE_ORDER as u128) {
            return Err(ConstructionError::UnsupportedBase(gamma.name()));
        }
        let elements = base.elements()?;
        let rank = 1 + elements.len() as u32;
        let target = FreeProduct::from_factors(vec![GroupSpec::Free { rank: 1 }, gamma])?;
        let mut images = vec![target.letter(0, GElem::Free(vec![(0, 1)]))?];
        for g in &elements {
            images.push(if base.is_identity(g) { Word::identity() } else { target.letter(1, g.clone())? });
        }
        let pi = GroupHom::new(GroupSpec::Free { rank }, target, images)?;
        Ok(Self { base, elements, free: Group::new(GroupSpec::Free { rank })?, pi })
    }

    pub fn base(&self) -> &Group {
        &self.base
    }

    /// The free group `G_Γ`.
    pub fn free_group(&self) -> &Group {
        &self.free
    }

    /// `ℤ ∗ Γ`, with `ℤ` as factor 0.
    pub fn target(&self) -> &FreeProduct {
        self.pi.target()
    }

    /// `a₀` as an element of `G_Γ`.
    pub fn a0(&self) -> GElem {
        GElem::Free(vec![(0, 1)])
    }

    /// `a_g` as an element of `G_Γ`.
    pub fn a(&self, g: &GElem) -> Result<GElem, ConstructionError> {
        let i = self
            .elements
            .iter()
            .position(|x| x == g)
            .ok_or_else(|| ConstructionError::UnsupportedBase(self.base.fmt_elem(g)))?;
        Ok(GElem::Free(vec![(1 + i as u32, 1)]))
    }

    /// `π_Γ(x)` as a reduced word in `ℤ ∗ Γ`.
    pub fn eval(&self, x: &GElem) -> Result<Word, ConstructionError> {
        Ok(self.pi.apply(x)?)
    }

    /// Whether `π_Γ(x) ∈ Γ`, i.e. the image is empty or a single `Γ` letter.
    pub fn n_gamma_member(&self, x: &GElem) -> Result<bool, ConstructionError> {
        let w = self.eval(x)?;
        Ok(w.is_empty() || (w.len() == 1 && w.letters()[0].factor == 1))
    }

    /// Whether `(x, y) ∈ N_Γ`.
    pub fn n_gamma_contains(&self, x: &GElem, y: &GElem) -> Result<bool, ConstructionError> {
        Ok(x == y && self.n_gamma_member(x)?)
    }

    /// Key of the coset `π_Γ(x)·Γ` in `(ℤ ∗ Γ)/Γ`: the image with a trailing
    /// `Γ` letter removed.
    pub fn coset_key(&self, x: &GElem) -> Result<Word, ConstructionError> {
        let w = self.eval(x)?;
        let keep = match w.last() {
            Some(l) if l.factor == 1 => w.len() - 1,
            _ => w.len(),
        };
        Ok(self.target().reduce(w.letters()[..keep].iter().cloned()))
    }

    /// Complete invariant of the coset `(x, y)·N_Γ`: `(x y⁻¹, π_Γ(x)·Γ)`.
    pub fn pair_coset_key(&self, x: &GElem, y: &GElem) -> Result<(GElem, Word), ConstructionError> {
        let diff = self.free.try_mul(x, &self.free.inv(y))?;
        Ok((diff, self.coset_key(x)?))
    }

    /// Free-group words of length at most `radius`, in length-lex order.
    pub fn ball(&self, radius: usize) -> Result<Vec<GElem>, ConstructionError> {
        let fp = FreeProduct::from_factors(vec![self.free.spec().clone()])?;
        Ok(fp
            .enumerate_generator_ball(radius)?
            .into_iter()
            .map(|w| w.letters().first().map_or_else(|| self.free.identity(), |l| l.elem.clone()))
            .collect())
    }

    /// One representative per coset of `(G_Γ × G_Γ)/N_Γ` among pairs from the
    /// radius ball, keyed by [`Self::pair_coset_key`].
    pub fn pair_coset_representatives(
        &self,
        radius: usize,
    ) -> Result<PairCosets, ConstructionError> {
        let ball = self.ball(radius)?;
        let mut out = BTreeMap::new();
        for x in &ball {
            for y in &ball {
                out.entry(self.pair_coset_key(x, y)?).or_insert_with(|| (x.clone(), y.clone()));
            }
        }
        Ok(out)
    }
}
