//! Closed-form constants, distances, gradient forms and Girsanov paths.

mod constants;
mod forms;
mod girsanov;

pub use constants::{
    integrated_harnack_bound_general, integrated_harnack_bound_kolmogorov, log_overflow,
    rn_bound, sharp_factor, wang_constant_general, wang_constant_kolmogorov, BoundResult,
    BoundStatus, RnStyle,
};
pub use forms::{
    control_distance, gamma2_eval, gamma_eval, generator, gradient, DriftFn, GammaForm,
    ScalarFn, HALF_LAPLACIAN,
};
pub use girsanov::{girsanov_density, girsanov_density_ito, girsanov_path, GirsanovPath};
