//! Standard-library companion to `z2lab-core`: file formats, threaded
//! drivers and the `z2lab` command line.

pub mod batch;
pub mod cli;
pub mod io;
pub mod parallel;
pub mod report;
