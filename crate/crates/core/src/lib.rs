//! Bound-state spectrum of the mixed potential
//! `V(r) = a r + b r² + c/r + l(l+1)/r²`.
//!
//! [`susy`] holds the closed-form hierarchy built from the superpotential
//! `W = A r − B/r + D`, [`radial`] an independent shooting eigensolver, and
//! [`harness`] the comparison tables and curve export that tie them together.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod radial;
pub mod susy;

pub use error::{Error, Result};
pub use harness::{
    emit_curves, render_curves, render_levels, render_members, render_report, run_comparison,
    ComparisonRow, CurveSeries, Format, LevelRecord, ParameterSet, TableReport,
};
pub use radial::{
    build_grid, find_eigenvalue, integrate_shoot, integrate_shoot_with, normalize, residual_check,
    solve_levels, solve_spectrum, solve_spectrum_partial, EigenResult, GridOverrides, Integrator,
    RadialGrid, RadialPotential, ShootResult, SolverOptions,
};
pub use susy::{
    build_hierarchy, closed_form_energy, eval_potential, eval_superpotential, ground_energy_bare,
    ground_wavefunction, match_superpotential, remainder, shape_invariance_report,
    solve_constraint, validate_params, ConstraintRoots, HierarchyMember, LaurentCoefficients,
    MemberRecord, PotentialParams, ShapeInvarianceReport, SuperpotentialMatch,
    SuperpotentialParams, Usage, ValidatedParams,
};
