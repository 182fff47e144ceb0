//! Exact zero statistics of Artin-Schreier L-functions over finite fields.
//!
//! The crate is organised bottom-up:
//!
//! - [`algebra`]: prime fields, the tower `F_p ⊂ F_q ⊂ F_{q^r}`, polynomials over `F_q`,
//!   irreducible enumeration and the cyclotomic ring `Z[ζ_p]` holding every character sum.
//! - [`families`]: the polynomial families `F_d`, `O_d`, `G_d` with deterministic enumeration.
//! - [`lfunction`]: character sums, L-polynomials and their normalised zeros.
//! - [`ensemble`]: family averages of traces and pair traces with their closed-form oracles,
//!   one-level window statistics and the two-level density.
//! - [`dirichlet`]: the Dirichlet-character reformulation modulo `x^{d+1}` and the odd family.
//! - [`rmt`]: Haar-random unitary and unitary-symplectic baselines.
//! - [`pointcount`]: the distribution of `#{α : Tr f(α) = 0}` over monic polynomials.

pub mod algebra;
pub mod dirichlet;
pub mod ensemble;
mod error;
pub mod exact;
pub mod families;
pub mod lfunction;
pub mod pointcount;
pub mod rmt;

pub use algebra::{CycloElem, FieldTower, Fq, FqElem, Level, PolyFq};
pub use error::{Error, Result};
pub use exact::ExactValue;
pub use families::{FamilyKind, FamilySpec};
pub use lfunction::{LPoly, ZeroSet};

/// Default cap on the number of field elements or family members a single
/// enumeration may touch.
pub const DEFAULT_CAP: u64 = 1 << 24;
