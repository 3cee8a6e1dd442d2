//! Workbench for tile self-assembly of discrete self-similar tree fractals.
//!
//! Lattice geometry lives in [`grid`], generators and their stages in
//! [`dssf`], the abstract tile assembly model in [`atam`], window geometry
//! in [`windows`], window movies and splicing in [`movies`], and the
//! end-to-end search for splice counterexamples in [`refuter`].
//! [`formats`] reads and writes the text formats; [`fixtures`] builds the
//! small systems used by tests and examples.

pub mod atam;
pub mod dssf;
pub mod fixtures;
pub mod formats;
pub mod grid;
pub mod movies;
pub mod refuter;
pub mod windows;
