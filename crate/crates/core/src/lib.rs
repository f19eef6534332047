//! Exact denominator analytics for Taylor coefficients of holonomic series over Q.
//!
//! The crate builds the chain of objects that controls the denominators of
//! `sum a_n z^n` when it is annihilated by a Fuchsian operator `L`: the
//! recurrence attached to `L`, the local system `z Y' = A(z) Y` at 0, a
//! shearing gauge making the residue nilpotent, the Frobenius matrix
//! `U(z) z^N`, per-prime valuation bounds on `U_n`, and finally a
//! range-stamped certificate that `D_{bn+b0}^s C^(n+1) a_n` is an integer.
//! A p-curvature nilpotence test is provided as a separate oracle.
//!
//! Everything is exact: rationals, polynomials over Q and F_p, no floats.

pub mod cli;
pub mod denomlab;
pub mod diffop;
pub mod io;
pub mod localsystem;
pub mod matrix;
pub mod numkernel;
pub mod pcurvature;
pub mod pipeline;
pub mod recurrence;

pub use diffop::{DiffOp, ExponentReport, Point, ThetaForm};
pub use numkernel::{Poly, PrimeWindow, Rational};
pub use recurrence::{InitialData, Recurrence};
