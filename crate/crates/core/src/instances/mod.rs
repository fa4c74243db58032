//! Concrete valuations: the interval measure `μ_S`, the step-function
//! integral `φ_S`, counting measure, Euler's totient on the divisibility
//! lattice and dimension on `GF(2)` subspaces.

pub mod counting;
pub mod gf2;
pub mod interval;
pub mod number;
pub mod step;

pub use counting::{Counting, FiniteSubsets};
pub use gf2::{gf2_op, Dimension, Gf2Error, Gf2Lattice, Gf2OpKind, Gf2OpResult, Gf2Subspace};
pub use interval::{mu_s, Interval, IntervalMeasure, IntervalSampler, IntervalSet, IntervalSetLattice, SetOp};
pub use number::{totient, totient_div, totient_identity_exhaustive, DivLattice, TotientValuation};
pub use step::{phi_s, StepFn, StepFnLattice, StepIntegral, StepOp, StepSampler};
