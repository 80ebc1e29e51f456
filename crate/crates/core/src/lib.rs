pub mod arith;
pub mod atkin_lehner;
pub mod characters;
pub mod class_numbers;
pub mod cyclotomic;
pub mod error;
pub mod gamma0;
pub mod gamma1;
pub mod level4;
pub mod oracles;
pub mod qexp;

/// Tag stored with cached results. Bump the suffix whenever a change can alter
/// any computed value.
pub const ENGINE_VERSION: &str = concat!("hecke-core/", env!("CARGO_PKG_VERSION"), "/1");
