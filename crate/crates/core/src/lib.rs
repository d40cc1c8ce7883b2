//! Balancedness analysis of pure multi-qubit states.
//!
//! A state written in the computational basis is reduced to its *A-matrix*:
//! one ±1 column per basis term, with every `0` bit written as `-1`. Integer
//! weights in the kernel of that matrix decide whether the state is
//! convexly balanced (positive weights), affinely balanced (nonzero weights of
//! either sign), partly balanced, or unbalanced. From the primitive kernel
//! generator (the *z-vector*) of an irreducible state the crate predicts the
//! bidegrees of the detecting local invariants and the discrete set of
//! topological phases.
//!
//! ```
//! use balancelab::{balance, statekit};
//!
//! let w_prime = statekit::parse_state("|000> + |100> + |010> + |001>").unwrap();
//! let report = balance::balance_report(&w_prime).unwrap();
//! assert_eq!(report.class, balance::BalanceClass::ABalancedOnly);
//! assert_eq!(report.z.unwrap().weights(), &[-1, 1, 1, 1]);
//! ```
//!
//! Module map:
//!
//! * [`statekit`]: states, the ket-expression parser, local operators.
//! * [`exactlin`]: exact integer kernels and kernel witnesses.
//! * [`balance`]: A-matrices, balance reports, irreducibility, canonical forms.
//! * [`spinflip`]: the partial spin flip and bidegree bookkeeping.
//! * [`invariants`]: τ₃, τ₃,₁, the norm, detecting monomials, induced values.
//! * [`topo`]: phase-set predictions and diagonal rotation loops.
//! * [`enumerate`]: census of irreducible A-classes for small qubit counts.
//! * [`verify`]: seeded random local operators and invariance harnesses.
//! * [`classify`]: detection tuples and structural classification.

pub mod balance;
pub mod classify;
pub mod enumerate;
mod error;
pub mod exactlin;
pub mod invariants;
pub mod spinflip;
pub mod statekit;
pub mod topo;
pub mod verify;

pub use error::{Error, Result};
