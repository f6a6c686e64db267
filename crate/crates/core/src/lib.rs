//! Numerical laboratory for the radial equivariant wave-map equation
//! `u_tt = u_rr + (n-1)/r u_r - (n-1)/2 sin(2u)/r² - f(u) f'(u)/r^alpha`:
//! a staggered-grid method-of-lines solver, light-cone diagnostics, a manufactured-solution
//! oracle and a command-line driver.

pub mod cli;
pub mod diagnostics;
pub mod mms;
pub mod nonlinearity;
pub mod quadrature;
pub mod solver;
