//! Exact arithmetic and counting kernels for conic bundle surfaces over Q.
//!
//! The crate is `no_std` with `alloc`. Everything here is a pure function of
//! its inputs; parallel drivers and file formats live in the `cbundle` crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod arith;
pub mod bundle;
pub mod conic;
pub mod count;
pub mod dp;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
