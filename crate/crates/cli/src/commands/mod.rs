pub mod certify;
pub mod gen;
pub mod solve;
pub mod sweep;
