//! Zeros of Λ: scanning, disk certification, counts, the twist-family
//! density experiment and the explicit formula linking zeros to F, A, B.

mod argument;
mod density;
mod explicit;
mod scan;

pub use argument::{argument_count, ArgumentCount, Rect};
pub use density::{
    density_experiment, density_primes, density_report, density_scans, reference_exponents, DensityReport, DensityRow,
};
pub use explicit::{
    explicit_formula_residual, explicit_formula_terms, f_series, truncated_mellin_i, zero_sum_s, ExplicitFormulaTerms,
};
pub use scan::{
    certify_zero, count_nfs, count_ng, hardy_z, read_zero_cache, residue_at_zero, rotated_z, scan_cached, scan_zeros,
    theta_observed, write_zero_cache, zero_cache_path, Detection, HardyValue, ScanReport, ThetaObserved, ZeroCount,
    ZeroRecord, CERT_RADIUS, DEFAULT_SCAN_STEP,
};
