//! Width and volume-radius estimation for the k-entangled bodies, classical
//! inequalities on closed-form bodies, and probability experiments on the
//! Hilbert-Schmidt ensemble.
//!
//! Direct volume integration is hopeless in the `d⁴ - 1` dimensional state
//! space, so volume statements are recast as hit-or-miss probabilities and
//! widths are computed from Gaussian averages of support functions.

mod bounds;
mod estimate;
mod prob;
mod santalo;
mod width;

pub use bounds::{bound_envelopes, BoundEnvelope, EnvelopeConstants, EnvelopeKind};
pub use estimate::MonteCarloEstimate;
pub use prob::{bracket_is_complete, prob_schmidt_k, vrad_ratio_mc, ProbEstimate, VradRatio};
pub use santalo::{santalo_check, Body, SantaloReport, MAX_SANTALO_DIM};
pub use width::{
    entk_width_grid, gamma_n, inv_urysohn_lower, mean_width_mc, traceless_hermitian, urysohn_upper, BallSupport,
    EntkSupport, PointSupport, SegmentSupport, SupportOracle, VradBound, WidthEstimate,
};
