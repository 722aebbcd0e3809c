//! Combinatorial models of bifoliated planes: ideal boundaries, shadows,
//! the cylinder at infinity, extremal sections and periodic dynamics.

pub mod checks;
pub mod cli;
pub mod corder;
pub mod corpus;
pub mod dynamics;
pub mod einf;
pub mod fiber;
pub mod plane;
pub mod render;
pub mod scene;
pub mod sections;
pub mod shadows;
pub mod skew;
