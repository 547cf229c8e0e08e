//! An injective map `η : F₂ ∗ ℤ/2 → F₂` that restricts to a homomorphism `δ`
//! on the index-two subgroup `Λ₂ = ⟨a, b, cac, cbc⟩`.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use super::ConstructionError;
use crate::freeprod::{FreeProduct, GroupHom, Letter, Notation, ParityMap, SchreierRewriter, Word};
use crate::group::{GElem, GroupSpec};

#[derive(Debug, Clone)]
pub struct RemarkEmbedding {
    /// `Λ = ⟨a, b⟩ ∗ ⟨c⟩`.
    lambda: FreeProduct,
    /// `F₂ = ⟨u, v⟩`.
    f2: FreeProduct,
    rewriter: SchreierRewriter,
    delta: GroupHom,
    c: Word,
    v_minus_two: Word,
}

#[derive(Debug, Clone, Serialize)]
pub struct RemarkReport {
    pub triple_radius: usize,
    pub triples_checked: u64,
    pub identity_failures: Vec<String>,
    pub homomorphism_pairs_checked: u64,
    pub homomorphism_failures: Vec<String>,
    pub injectivity_radius: usize,
    pub ball_size: usize,
    pub distinct_images: usize,
    /// `δ(a), δ(b), δ(cac), δ(cbc)` rendered in `u`, `v`.
    pub generator_images: Vec<String>,
    pub generator_images_match: bool,
}

impl RemarkReport {
    pub fn passed(&self) -> bool {
        self.identity_failures.is_empty()
            && self.homomorphism_failures.is_empty()
            && self.distinct_images == self.ball_size
            && self.generator_images_match
    }
}

const EXPECTED_IMAGES: [&str; 4] = ["u", "v u v^-1", "v^2 u v^-2", "v^3 u v^-3"];

impl RemarkEmbedding {
    pub fn new() -> Result<Self, ConstructionError> {
        let lambda = FreeProduct::from_factors(vec![GroupSpec::Free { rank: 2 }, GroupSpec::cyclic(2)])?;
        let f2 = FreeProduct::from_factors(vec![GroupSpec::Free { rank: 2 }])?;
        let c_letter = Letter::new(1, GElem::Residue(1));
        let rewriter =
            SchreierRewriter::new(&lambda, ParityMap { weights: vec![vec![0, 0], vec![1]] }, c_letter.clone())?;
        let u = f2.letter(0, GElem::Free(vec![(0, 1)]))?;
        let v = f2.letter(0, GElem::Free(vec![(1, 1)]))?;
        let images = (0..4).map(|k| f2.conjugate(&f2.power(&v, k), &u)).collect();
        let delta = GroupHom::new(GroupSpec::Free { rank: 4 }, f2.clone(), images)?;
        let c = lambda.letter(1, GElem::Residue(1))?;
        let v_minus_two = f2.power(&v, -2);
        Ok(Self { lambda, f2, rewriter, delta, c, v_minus_two })
    }

    pub fn lambda(&self) -> &FreeProduct {
        &self.lambda
    }

    pub fn f2(&self) -> &FreeProduct {
        &self.f2
    }

    pub fn lambda_notation(&self) -> Notation {
        Notation::with_names(&self.lambda, &["a", "b", "c"])
    }

    pub fn f2_notation(&self) -> Notation {
        Notation::with_names(&self.f2, &["u", "v"])
    }

    pub fn is_even(&self, x: &Word) -> bool {
        self.rewriter.word_parity(x) == 0
    }

    /// `δ` on `Λ₂`.
    pub fn delta(&self, x: &Word) -> Result<Word, ConstructionError> {
        let expr = self.rewriter.rewrite(x)?;
        Ok(self.delta.apply(&GElem::Free(expr))?)
    }

    /// `η(g) = δ(g)` and `η(cg) = v⁻²·δ(g)` for `g ∈ Λ₂`.
    pub fn eta(&self, x: &Word) -> Result<Word, ConstructionError> {
        if self.is_even(x) {
            return self.delta(x);
        }
        let g = self.lambda.multiply(&self.c, x);
        Ok(self.f2.multiply(&self.v_minus_two, &self.delta(&g)?))
    }

    /// Checks `η(gkh) = δ(g)·η(k)·δ(h)` for `g ∈ Λ₀`, `k ∈ Λ`, `h ∈ Λ₂` in the
    /// generator-length ball of `triple_radius`, the homomorphism property of
    /// `δ` on pairs from the even part of that ball, and injectivity of `η` on
    /// the ball of `injectivity_radius`.
    pub fn check(&self, triple_radius: usize, injectivity_radius: usize) -> Result<RemarkReport, ConstructionError> {
        const MAX_REPORTED: usize = 20;
        let ball = self.lambda.enumerate_generator_ball(triple_radius)?;
        let lambda0: Vec<&Word> = ball.iter().filter(|w| w.uses_only(|f| f == 0)).collect();
        let lambda2: Vec<&Word> = ball.iter().filter(|w| self.is_even(w)).collect();
        let eta_k: Vec<Word> = ball.iter().map(|k| self.eta(k)).collect::<Result<_, _>>()?;
        let delta_g: Vec<Word> = lambda0.iter().map(|g| self.delta(g)).collect::<Result<_, _>>()?;
        let delta_h: Vec<Word> = lambda2.iter().map(|h| self.delta(h)).collect::<Result<_, _>>()?;
        let ln = self.lambda_notation();
        let identity_failures: Vec<String> = lambda0
            .par_iter()
            .enumerate()
            .flat_map_iter(|(gi, g)| {
                let mut bad = Vec::new();
                for (ki, k) in ball.iter().enumerate() {
                    for (hi, h) in lambda2.iter().enumerate() {
                        let lhs = self.eta(&self.lambda.product([*g, k, *h])).expect("η is total");
                        let rhs = self.f2.product([&delta_g[gi], &eta_k[ki], &delta_h[hi]]);
                        if lhs != rhs {
                            bad.push(format!(
                                "g={} k={} h={}",
                                ln.format(&self.lambda, g),
                                ln.format(&self.lambda, k),
                                ln.format(&self.lambda, h)
                            ));
                        }
                    }
                }
                bad
            })
            .collect();
        let homomorphism_failures: Vec<String> = lambda2
            .par_iter()
            .enumerate()
            .flat_map_iter(|(xi, x)| {
                let mut bad = Vec::new();
                for (yi, y) in lambda2.iter().enumerate() {
                    let xy = self.lambda.multiply(x, y);
                    let lhs = self.delta(&xy).expect("even words rewrite");
                    if lhs != self.f2.multiply(&delta_h[xi], &delta_h[yi]) {
                        bad.push(format!("x={} y={}", ln.format(&self.lambda, x), ln.format(&self.lambda, y)));
                    }
                }
                bad
            })
            .collect();
        let inj_ball = self.lambda.enumerate_generator_ball(injectivity_radius)?;
        let images: HashSet<Word> = inj_ball.iter().map(|x| self.eta(x)).collect::<Result<_, _>>()?;
        let fnot = self.f2_notation();
        let gens = self.rewriter.generators().to_vec();
        let generator_images: Vec<String> =
            gens.iter().map(|g| self.delta(g).map(|w| fnot.format(&self.f2, &w))).collect::<Result<_, _>>()?;
        let generator_images_match = generator_images.iter().map(String::as_str).eq(EXPECTED_IMAGES);
        Ok(RemarkReport {
            triple_radius,
            triples_checked: (lambda0.len() * ball.len() * lambda2.len()) as u64,
            identity_failures: identity_failures.into_iter().take(MAX_REPORTED).collect(),
            homomorphism_pairs_checked: (lambda2.len() * lambda2.len()) as u64,
            homomorphism_failures: homomorphism_failures.into_iter().take(MAX_REPORTED).collect(),
            injectivity_radius,
            ball_size: inj_ball.len(),
            distinct_images: images.len(),
            generator_images,
            generator_images_match,
        })
    }
}
