//! Exact computation of representation numbers of integers by positive
//! definite binary quadratic forms of odd class number.
//!
//! The crate is organized bottom-up:
//!
//! * [`ntheory`]: Kronecker symbol, Möbius function, divisors.
//! * [`qforms`]: forms, discriminants, reduction, reduced-form enumeration.
//! * [`qseries`]: truncated integer q-series, eta quotients, product exponents.
//! * [`theta`]: theta series by lattice enumeration and the expansion at the cusp 1/1.
//! * [`repnum`]: closed representation-number formulas and their cross checks.
//! * [`classify`]: eta-quotient searches, Schoeneberg pairs, growth probes.
//! * [`fixtures`] and [`verify`]: the published tables as data, and the
//!   verification suites built on them.

pub mod classify;
pub mod error;
pub mod fixtures;
pub mod ntheory;
pub mod qforms;
pub mod qseries;
pub mod repnum;
pub mod theta;
pub mod verify;

pub use error::{Error, Result};
pub use qforms::{Discriminant, FormClassList, QuadForm};
pub use qseries::{EtaQuotientSpec, IntSeries, ProductExponents};
pub use theta::{RepCountTable, RootOfUnitySeries};
