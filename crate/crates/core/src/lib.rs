//! Exact computational tools for rational-coefficient polynomial analysis on
//! finite reflection groups: difference-differential operators, the degree-by-
//! degree intertwining transform, bilinear pairings, truncated kernels, and a
//! verification harness that re-checks the library's defining identities.

pub mod dunkl;
pub mod error;
pub mod harness;
pub mod intertwine;
pub mod kernel;
pub mod linalg;
pub mod pairing;
pub mod poly;
pub mod quad;
pub mod reflection;
pub mod scalar;
pub mod special;

pub use dunkl::{
    classical_laplacian, delta_1d, delta_alpha_apply, dunkl_apply, dunkl_matrix_homogeneous,
    euler_approx, exp_apply, exp_conjugate_identity_check, l_k_apply, lambda_ode_residual,
    lambda_s_apply, laplacian_apply, laplacian_apply_as_squares, linear_form,
    minimum_principle_check, ode_poly_solve, resolvent_apply, trotter_approx, DunklContext,
    MinimumPrincipleVerdict, PolyOperator,
};
pub use error::{DunklError, Result};
pub use harness::{
    nonnegative_family, positivity_scan, run_all, run_suite, suite_identities, suite_numeric,
    suite_positivity_vk, suite_semigroup_positivity, zero_touching_family_1d, CheckRecord, Config,
    FamilySpec, GroupConfig, Mode, MultiplicityConfig, QuadConfig, Report, ScalarLiteral,
};
pub use intertwine::{
    build_vk, load_table, moment_function, pochhammer, save_table, vk_1d_closed, vk_1d_coeff,
    vk_1d_coeff_beta_sum, vk_z2n_coeff, z2n_axis_multiplicities, IntertwinerTable,
};
pub use kernel::{
    bessel_eval, eval_complex, exp_tail, gram_psd_check, kernel_bound_check, kernel_eval,
    kernel_recursion_residual, lambda_s_closed_form, measure_moments, measure_product_moment,
    measure_transform_check, support_hull_check, GramVerdict, KernelBoundVerdict, KernelTruncation,
    KernelValue, Measure1D, MeasureTransformVerdict, SupportVerdict,
};
pub use linalg::{solve_columns, symmetric_eigen_min, symmetric_eigenvalues, Matrix, SolveOutcome};
pub use pairing::{
    gaussian_pairing_quadrature, pairing, pairing_identity_residual, pairing_positivity_check,
    pairing_zero, PairingContext, PairingPositivity, QuadSpec, WeightData,
};
pub use poly::{
    dim_homogeneous, dim_up_to, monomials_of_degree, monomials_up_to, parse_polynomial,
    power_table, Monomial, Polynomial, Vector,
};
pub use quad::{
    adaptive_quadrature, beta_density_moment, gauss_legendre, gauss_legendre_on,
    gaussian_axis_moment, tensor_product,
};
pub use reflection::{
    reflection_matrix, GroupPreset, MultiplicityFunction, ReflectionGroup, RootSystem,
};
pub use scalar::{factorial, Cplx, Rat, Scalar, FLOAT_NEGLIGIBLE};
pub use special::hyp1f1;
