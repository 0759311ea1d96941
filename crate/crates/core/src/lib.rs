//! Simulation toolkit for the shifted Legendre symbol problem and its
//! Jacobi, unknown-modulus and general finite field variants.
//!
//! The crate is layered bottom-up:
//!
//! * [`field`]: GF(p^r) as polynomials modulo an irreducible modulus, with
//!   trace, quadratic character and trace coordinates.
//! * [`number`]: Legendre/Jacobi symbols, CRT, factoring, continued
//!   fractions and quadratic Gauss sums.
//! * [`qsim`]: dense statevectors of arbitrary dimension with Fourier
//!   transforms over Z_N and the trace-Fourier transform over F_q.
//! * [`oracle`]: query-counting black boxes hiding the shift.
//! * [`algorithms`]: the end-to-end solvers and exact identity checks.

pub mod algorithms;
pub mod error;
pub mod field;
pub mod number;
pub mod oracle;
pub mod qsim;

pub use error::{Error, Result};
pub use field::{FieldElement, FieldSpec};
pub use number::{ExactGauss, FactoredOddSquarefree, Fraction, GaussSumSpec, Unit4};
pub use oracle::{OracleParams, Shift, ShiftOracle, ZeroPolicy};
pub use qsim::{Direction, RegisterLayout, StateVector};
