//! Analysis of closed arc-splines whose curvature is bounded by `kappa`.
//!
//! A loop is a clockwise, simple, C¹ chain of circular arcs and segments.
//! The crate classifies its sub-curves against disks of radius `r = 1 / kappa`,
//! finds essential terminal pairs and ends, decides whether such disks roll
//! freely inside and outside the loop, decomposes each side into maximal
//! rolling regions, and checks all of it against a raster oracle.

pub mod classify;
pub mod cli;
pub mod curve;
pub mod decompose;
pub mod geometry;
pub mod io;
pub mod oracle;
pub mod rolling;
pub mod shapes;
