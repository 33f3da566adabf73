//! Exact computation of geometric fibrations of flat orbifolds.
//!
//! The crate works with crystallographic groups in lattice coordinates and
//! exact rational arithmetic. Starting from a catalog of generators it builds
//! the group, enumerates its complete normal subgroups of dimension one and
//! codimension one, pairs each with its orthogonal dual, classifies fiber and
//! base, and decides whether the associated extensions split.

#![allow(clippy::needless_range_loop)]

pub mod atlas;
pub mod fiberclass;
pub mod groupcore;
pub mod normsub;
pub mod oracle;
pub mod ratlin;
pub mod splitter;
pub mod symparse;
pub mod verify;

pub use atlas::{Atlas, AtlasError};
pub use fiberclass::{
    classify_1d, classify_2d, fibration_rows, index_kn, quotient_group, FibrationRecord,
    OrbifoldClass, QuotientGroup, Wallpaper,
};
pub use groupcore::{
    betti1, build_group, center, transfer, transfer_kernel, AffineElement, SpaceGroup,
};
pub use normsub::{
    complete_normal_from_subspace, enumerate_complete_normal, is_reducible, orthogonal_dual,
    CompleteNormalSubgroup, NormalSubgroup,
};
pub use ratlin::{GramForm, Int, IntLattice, IntMat, Rat, RatMat, Subspace};
pub use splitter::{find_complement, is_direct_product, SplitWitness};
pub use symparse::{parse_catalog, parse_symop, CatalogEntry, GroupId, ParseError};
