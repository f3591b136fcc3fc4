//! Causal Wiener filtering of the homodyne record and the resulting
//! conditional second moments.

mod factor;
mod moments;
pub mod quadrature;

use serde::{Deserialize, Serialize};

pub use factor::{anticausal_part, causal_part, spectral_factorize, split_causal, SpectralFactor};
pub use moments::{
    conditional_moments_closed, conditional_moments_numeric, conditional_moments_quadrature,
    orthogonality_residual, uncertainty_product, wiener_gain, ConditionalMoments,
};

use crate::error::Result;
use crate::params::ModeParams;

/// Which route computes the conditional moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Detection-band closed forms.
    #[default]
    Closed,
    /// Spectral factorization and residue integrals.
    Numeric,
    /// Steady-state Kalman–Bucy filter.
    Riccati,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Numeric => "numeric",
            Method::Riccati => "riccati",
        }
    }
}

pub fn conditional_moments(mode: &ModeParams, method: Method) -> Result<ConditionalMoments> {
    match method {
        Method::Closed => conditional_moments_closed(mode),
        Method::Numeric => conditional_moments_numeric(&crate::spectra::build_spectra(mode)?),
        Method::Riccati => crate::riccati::care_steady_state(&crate::riccati::to_state_space(mode)?),
    }
}
