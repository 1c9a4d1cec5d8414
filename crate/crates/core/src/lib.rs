pub mod arith;
pub mod cylinder;
pub mod model;
pub mod poles;
pub mod quad;
pub mod verify;
pub mod xsec;
