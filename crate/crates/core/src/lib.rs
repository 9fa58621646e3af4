pub mod classify1d;
pub mod classify2d;
pub mod fan;
pub mod fixtures;
pub mod io;
pub mod lattice;
pub mod polytope;
pub mod scalar;
pub mod trop;

pub use num_bigint::BigInt as Int;

pub type Vector = lattice::LatticeVector<Int>;
pub type Functional = lattice::LinearFunctional<Int>;
pub type Matrix = lattice::IntMatrix<Int>;
pub type Fan = fan::WeightedFan<Int>;
pub type TrFn = trop::TrFunction<Int>;
pub type Pair = classify2d::ConventionPair<Int>;
