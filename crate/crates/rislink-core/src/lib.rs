//! Performance analysis of a noise-modulation link assisted by an
//! energy-harvesting reconfigurable intelligent surface (RIS).
//!
//! The transmitter encodes bits in the variance of a thermal-noise source;
//! the receiver decides by comparing the energy of `M` samples against a
//! threshold and majority-votes over an odd number of repetitions. The RIS
//! splits its elements between harvesting RF power from ambient interferers
//! and reflecting the desired signal with quantized phase alignment.
//!
//! The crate provides two independent routes to every metric:
//! closed-form expressions (ECSR, BER, detection threshold, mutual
//! information, energy efficiency) built on moment-matched channel
//! statistics, and a physical Monte Carlo simulator that draws every channel
//! and phase explicitly. Each side validates the other.

pub mod allocator;
pub mod config;
pub mod detection;
pub mod energy;
pub mod error;
pub mod figures;
pub mod infometrics;
pub mod linkstats;
pub mod montecarlo;
pub mod report;
pub mod specfun;
pub mod sysmodel;

pub use error::{Error, Result};
pub use sysmodel::SystemConfig;
