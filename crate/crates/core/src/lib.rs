pub mod closed_forms;
pub mod error;
pub mod geometry;
pub mod io;
pub mod laurent;
pub mod linalg;
pub mod quadrature;
pub mod ronkin;
pub mod simulator;
pub mod verify;
pub mod walk;
pub mod zeta;
