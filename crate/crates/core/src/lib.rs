//! Parametric resonance of a damped quantum oscillator.
//!
//! The crate follows one pipeline:
//!
//! * [`model`]: periodic piecewise-constant drives and the scalars `β`, `ω̃`, `ω`;
//! * [`classical`]: the auxiliary functions `α` and `ρ`, classical energies,
//!   the Lewis–Riesenfeld invariant, and Floquet band analysis;
//! * [`spectra`]: energy-number distributions `P_m(n)` and their moments in
//!   the displaced (`ρ` bounded) and squeezed (`ρ` unbounded, `α = 0`)
//!   regimes, with a quadrature oracle for the overlap integrals;
//! * [`reference`]: independent integrators used to check the closed forms.

pub mod classical;
pub mod error;
pub mod model;
pub mod reference;
pub mod spectra;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/drive.md")]
    mod drive {}
    #[doc = include_str!("../../../book/src/bands.md")]
    mod bands {}
    #[doc = include_str!("../../../book/src/ermakov.md")]
    mod ermakov {}
    #[doc = include_str!("../../../book/src/distributions.md")]
    mod distributions {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
