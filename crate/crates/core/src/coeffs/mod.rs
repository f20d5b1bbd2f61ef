//! Distributional coefficients, mollifiers, scale nets and their regularisations.

mod decay;
mod distribution;
pub mod jet;
mod mollifier;
mod scale;

pub use decay::{fourier_decay_fit, DecayFit, DecaySample};
pub use distribution::{
    regularise, RegularisedCoefficient, SmoothFn, Term, TimeDistribution, MAX_POINT_ORDER,
};
pub use mollifier::{
    gevrey_cutoff, Mollifier, MollifierKind, FRIEDRICHS_MASS, GEVREY_CUT, SINC_BAND, SINC_RADIUS,
    SINC_SPREAD,
};
pub use scale::{PosNet, ScaleNet};
