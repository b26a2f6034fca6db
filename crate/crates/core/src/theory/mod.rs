//! Closed-form theory: phase classification, chain integrals and their
//! bounds, quadrature, and the supermartingale machinery.

pub mod quad;
pub mod phase;
pub mod integrals;
pub mod martingale;
