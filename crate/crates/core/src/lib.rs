pub mod em;
pub mod error;
pub mod specfun;
pub mod quadrature;
pub mod fields;
pub mod asymptotics;
pub mod sweep;
