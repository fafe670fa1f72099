//! Newton polytopes, tropical hypersurfaces and amoebas.

pub mod amoeba;
pub mod polytope;
pub mod tropical;
