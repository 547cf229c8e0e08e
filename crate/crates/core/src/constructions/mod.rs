//! Explicit group constructions: block-triangular `SL₂` modules, Ulm
//! p-groups, the augmentation data `π_Γ : G_Γ → ℤ ∗ Γ`, and an injective
//! map `F₂ ∗ ℤ/2 → F₂`.

use thiserror::Error;

use crate::field::FieldError;
use crate::freeprod::FreeProdError;
use crate::group::GroupError;

pub mod augmentation;
pub mod remark;
pub mod sl2;
pub mod ulm;

pub use augmentation::AugmentationData;
pub use remark::{RemarkEmbedding, RemarkReport};
pub use sl2::{sl2_difference_span, Sl2Construction, Subgroup, TElement};
pub use ulm::{FiniteAbelian, InclusionReport, UlmGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("construction too large to enumerate")]
    TooLarge,
    #[error("vector has the wrong length or entries outside the field")]
    InvalidVector,
    #[error("{0} is not strictly below {1}")]
    NotBelow(usize, usize),
    #[error("more than {0} subgroups")]
    CapExceeded(usize),
    #[error("integer overflow in normal-form reduction")]
    Overflow,
    #[error("group is infinite")]
    Infinite,
    #[error("index bound {index_bound} is below lambda = {lambda}")]
    IndexBound { lambda: u32, index_bound: u32 },
    #[error("unsupported base group {0}")]
    UnsupportedBase(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    FreeProd(#[from] FreeProdError),
}
