pub mod asymptotics;
pub mod exact;
pub mod harness;
pub mod fock;
pub mod kernel;
pub mod matrix;
pub mod oracle;
pub mod orbifold;
pub mod parse;
pub mod poly;
pub mod sphere;
