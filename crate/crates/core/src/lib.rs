//! Exact symbolic computation on affine Laumon spaces.

pub mod ring;
pub mod partitions;
pub mod geometry;
pub mod action;
pub mod verma;
pub mod stab;
