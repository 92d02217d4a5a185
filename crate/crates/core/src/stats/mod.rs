//! Test statistics: the AZ whiteness statistic in static, dynamic and
//! lambda-weighted form, Gaussian p-values, the median sign test,
//! multiple-testing corrections and a Kolmogorov-Smirnov helper.

mod az;
mod ks;
mod multiple;
pub mod normal;
mod sign_test;

pub use az::{
    az_statistic_dynamic, az_statistic_static, c_tilde, sign_product, SpatioTemporalParts,
    TestResult, SMALL_SAMPLE_EDGES,
};
pub use ks::{ks_test, KsResult};
pub use multiple::{correct_pvalues, per_feature, Correction, PerFeatureResult};
pub use normal::{gaussian_two_sided_p, normal_cdf, normal_quantile, two_sided_threshold};
pub use sign_test::{center_median, median_sign_test, sign_test_counts};
