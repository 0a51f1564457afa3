//! Non-relativistic comparison functionals: the Thomas-Fermi atom and the
//! Thomas-Fermi-Weizsäcker minimizer.

mod ode;
pub mod tf;
pub mod tfw;

pub use tf::{
    solve_tf_universal, solve_tf_universal_to, tf_atom, tf_atom_with, tf_functional, tf_kinetic_constant,
    tf_length_constant, tf_potential_at, universal, TFSolution, TfGridSpec, TfUniversal,
};
pub use tfw::{solve_tfw, solve_tfw_with, tfw_functional, TFWSolution, TfwOptions};
