pub mod experiment;
pub mod gf;
pub mod huncc;
pub mod iscode;
pub mod mceliece;
pub mod metrics;
pub mod reliability;
pub mod simnet;
