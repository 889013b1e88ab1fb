//! Model-problem analysis kernels: strip extensions and their Dirichlet to
//! Neumann multipliers, weighted Hardy transforms, and the cusp time
//! change of variables.

pub mod cusp;
pub mod hardy;
pub mod multiplier;
pub mod strip;
