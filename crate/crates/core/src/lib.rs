pub mod calculus;
pub mod combinatorics;
pub mod error;
pub mod gamma;
pub mod iab;
pub mod identities;
pub mod ml;
pub mod prob;
pub mod quadrature;
