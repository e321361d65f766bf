//! Radii-based anomaly detection.
//!
//! Points are scored by their distance from a chosen center; a supervised
//! radial deformation reweights axes to sharpen that score, and centric
//! autoencoders transform the space before the radius is taken. The crate
//! provides:
//!
//! - dataset handling and a seeded synthetic benchmark generator ([`data`]),
//! - rank-based AUROC, ROC curves and the fraud-rank-sum objective
//!   ([`metrics`]),
//! - greedy digit search and hyperspherical gradient ascent over deformation
//!   factors plus a basin-hopping comparison baseline ([`deform`]),
//! - a from-scratch dense autoencoder trained with a radial loss ([`net`]),
//! - the centric-autoencoder variants cAE, cpAE, EIcAE and DOcAE ([`cae`]),
//! - CSV/JSON interchange formats ([`io`]).
//!
//! Every stochastic component runs on a pinned portable generator (ChaCha8,
//! Box-Muller Gaussians), so equal seeds reproduce results bitwise.

pub mod cae;
pub mod data;
pub mod deform;
pub mod error;
pub mod io;
pub mod metrics;
pub mod net;
pub mod rng;

pub use error::{Error, Result};
