//! Complex zeros by linear homotopy from random standard pairs.

mod newton;
mod pair;
mod quadratic;
mod track;

pub use newton::{certify, projective_newton, Certificate, CERTIFICATE_STEPS, NEWTON_SIGMA_MIN, RESIDUAL_TOLERANCE};
pub use pair::{bp_sample, bp_sample_with, StandardPair};
pub use quadratic::{quadratic_inf_norm, QuadraticNorm, QuadraticSystem};
pub use track::{
    alh, alh_quadratic, alh_with, solve, solve_quadratic, solve_with, sup_upper_bound, AlhOptions, FastPath,
    HomotopyTrace, PathNorm, Solution, StepRecord, CERTIFIED_NET_BUDGET, DEFAULT_MAX_STEPS, LOWER_BOUND_SAMPLES,
    MIN_STEP, STEP_CONSTANT,
};
