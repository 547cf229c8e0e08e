//! Free products of groups, valuations into finite join semilattices, and
//! bounded verification of the intermediate subgroup lattices they produce.

pub mod checks;
pub mod constructions;
pub mod field;
pub mod freeprod;
pub mod group;
pub mod order;
pub mod valuation;
