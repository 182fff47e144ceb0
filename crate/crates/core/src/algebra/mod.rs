//! Exact arithmetic: prime fields, the field tower, polynomials over `F_q`, irreducible
//! polynomials and the cyclotomic ring in which character sums live.

pub mod arith;
mod cyclo;
mod fq;
mod irreducible;
mod poly;
mod tower;

pub use cyclo::{additive_character, CycloElem};
pub use fq::Fq;
pub use irreducible::{
    count_irreducibles, enumerate_irreducibles, factor, is_irreducible, minimal_poly, mobius, IrreducibleCache,
};
pub use poly::PolyFq;
pub use tower::{build_tower, FieldTower, FqElem, Level, TopTables};
