//! Dependence structure of ARMA and FARIMA processes driven by stable and
//! infinitely divisible noise, measured through the dependence function
//! I_n(z₁, z₂) = log E e^{iz₁X₀} + log E e^{iz₂Xₙ} - log E e^{i(z₁X₀+z₂Xₙ)}.

pub mod asymptotics;
pub mod coeffs;
pub mod dependence;
pub mod error;
pub mod findist;
pub mod innovations;
pub mod levy;
pub mod poly;
pub mod quad;
pub mod simulate;
pub mod special;

pub use dependence::{DependenceOptions, DependenceValue};
pub use simulate::{PathBatch, SimMode, SimOptions};
pub use coeffs::{AsymDescriptor, CoeffStream, ModelSpec};
pub use error::{Diagnostic, Error, Result};
pub use innovations::{IdSpec, InnovationSpec, RacSpec, StableSpec};
pub use quad::Estimate;

/// Maps `f` over a range, in parallel when the `parallel` feature is on.
/// Output order always follows the range.
pub(crate) fn par_map<T, F>(range: std::ops::Range<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        range.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        range.map(f).collect()
    }
}
