//! Discrete-event simulation of broadcast-authenticated key establishment.
//!
//! [`netsim`] runs replicas of a deployment with lossy links, fragmentation
//! and per-node energy accounting; [`adversary`] injects forged, tampered and
//! replayed traffic; [`recipes`] turns both into CSV artifacts. The `wsnkm`
//! binary wraps the recipes behind a scenario file.

// `!(x > 0.0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversary;
pub mod credentials;
pub mod netsim;
pub mod recipes;
pub mod scenario;
pub mod trace;

use wsnkm_core::analytics::AnalyticsError;
use wsnkm_core::energy::EnergyError;
use wsnkm_core::trust_center::TrustCenterError;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("trust center: {0}")]
    TrustCenter(#[from] TrustCenterError),
    #[error("analytics: {0}")]
    Analytics(#[from] AnalyticsError),
    #[error("energy accounting: {0}")]
    Energy(#[from] EnergyError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl SimError {
    /// Process exit code: 2 for unreadable input, 3 for invalid input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Parse(_) => 2,
            SimError::Validation(_) => 3,
            _ => 1,
        }
    }
}
