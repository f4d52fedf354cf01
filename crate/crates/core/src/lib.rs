//! Exact construction and verification of Siegel objects for lattices twisted
//! by a nilpotent operator.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: the exact coefficient fields (rationals, `F_q`, rational
//!   functions) and the theta-shift of rational functions,
//! * [`partition`]: Jordan partitions, their duals and the invariants `k_i`,
//! * [`linalg`]: matrices, polynomial-in-`N` matrices and skew block shapes,
//! * [`siegel`]: Siegel objects, `P`-polynomials, the dual Siegel object and
//!   the `B`/`Bbar` identities,
//! * [`lattice`]: concrete lattices `(V, N, L)`, the segment arrangement,
//!   extraction of Siegel objects and the dual lattice,
//! * [`io`]: the JSON documents exchanged by the command-line tool.

pub mod arith;
pub mod io;
pub mod linalg;
pub mod partition;
pub mod lattice;
pub mod siegel;
