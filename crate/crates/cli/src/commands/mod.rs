pub mod check;
pub mod compute;
pub mod fuzz;
pub mod range;
