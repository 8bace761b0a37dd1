//! Command-line companion to `fampe-core`: file formats (PGM/PPM images,
//! FAMW weights, FAMA attribution maps), the synthetic shapes dataset,
//! configuration handling, and the five `fampe` subcommands.

#![forbid(unsafe_code)]

pub mod commands;
pub mod config;
pub mod dataset;
pub mod error;
pub mod fsutil;
pub mod image;
pub mod mapfile;
pub mod modelspec;
pub mod report;
pub mod weights;
