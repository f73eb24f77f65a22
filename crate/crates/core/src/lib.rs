//! Structure equations of pseudospherical surfaces, checked symbolically, and
//! the Camassa–Holm equation solved numerically with the induced metric
//! analysed on the computed solution.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod chsim;
pub mod forms;
pub mod geolab;
pub mod pss;
pub mod symcore;
