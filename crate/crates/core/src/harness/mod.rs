//! Verification harness: run configuration, constructed nonnegative
//! polynomial families, structured pass/fail reports, and the check
//! suites behind the `verify` command.

pub mod config;
pub mod family;
pub mod report;
pub mod suites;

pub use config::{Config, GroupConfig, Mode, MultiplicityConfig, QuadConfig, ScalarLiteral};
pub use family::{nonnegative_family, zero_touching_family_1d, FamilySpec};
pub use report::{CheckRecord, Report};
pub use suites::{
    positivity_scan, rational_ball_grid, run_all, run_suite, suite_identities, suite_numeric,
    suite_positivity_vk, suite_semigroup_positivity,
};
