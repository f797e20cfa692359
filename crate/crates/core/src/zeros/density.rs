use super::scan::{count_ng, scan_cached, ScanReport, ZeroRecord};
use crate::arithmetic::{primes_up_to, psi_p};
use crate::forms::{twist_form, FormDescriptor};
use crate::{Error, Result};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityRow {
    pub p: u64,
    /// Exponent label of ψ_p: the generator goes to e(index/(p−1)).
    pub psi_index: u64,
    pub count: u64,
    /// The zeros behind a nonzero count, each with its disk certificate.
    pub certificates: Vec<ZeroRecord>,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub form_key: String,
    pub height: f64,
    pub beta: f64,
    pub prime_cap: u64,
    pub rows: Vec<DensityRow>,
    pub aggregate: u64,
    /// (4(1−β), 6(1−β)/(3β−1)), for comparison only.
    pub reference: (f64, f64),
    pub complete: bool,
}

impl DensityReport {
    /// `p,psi_index,count` rows and a trailing summary comment.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,psi_index,count\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{}", r.p, r.psi_index, r.count);
        }
        let _ = writeln!(
            out,
            "# form={} T={} beta={} X={} aggregate={} ref_a={:.6} ref_b={:.6} complete={}",
            self.form_key, self.height, self.beta, self.prime_cap, self.aggregate, self.reference.0, self.reference.1, self.complete
        );
        out
    }
}

/// Primes p ≤ X with p ≡ 1 mod N that carry a nontrivial character.
pub fn density_primes(level: u64, x: u64) -> Vec<u64> {
    primes_up_to(x as usize).into_iter().filter(|&p| p > 2 && p % level == 1 % level).collect()
}

pub fn reference_exponents(beta: f64) -> (f64, f64) {
    (4.0 * (1.0 - beta), 6.0 * (1.0 - beta) / (3.0 * beta - 1.0))
}

/// Scans of f⊗ψ_p to height T for every prime in the family.
pub fn density_scans(form: &FormDescriptor, x: u64, t: f64) -> Result<Vec<(u64, u64, ScanReport)>> {
    if x > 500 || t > 20.0 || t <= 0.0 {
        return Err(Error::InvalidInput(format!("density envelope is X ≤ 500, 0 < T ≤ 20; got X = {x}, T = {t}")));
    }
    density_primes(form.level(), x)
        .into_iter()
        .map(|p| {
            let chi = psi_p(p)?;
            let idx = chi.label().first().copied().unwrap_or(1);
            Ok((p, idx, scan_cached(&twist_form(form, &chi)?, t)?))
        })
        .collect()
}

pub fn density_report(form: &FormDescriptor, x: u64, t: f64, beta: f64, scans: &[(u64, u64, ScanReport)]) -> DensityReport {
    let rows: Vec<DensityRow> = scans
        .iter()
        .map(|(p, idx, rep)| {
            let n = count_ng(rep, beta, t);
            DensityRow {
                p: *p,
                psi_index: *idx,
                count: n.value,
                certificates: rep.zeros.iter().filter(|z| z.rho.re >= beta && z.rho.im.abs() <= t).cloned().collect(),
                complete: n.complete,
            }
        })
        .collect();
    DensityReport {
        form_key: form.key().to_string(),
        height: t,
        beta,
        prime_cap: x,
        aggregate: rows.iter().map(|r| r.count).sum(),
        complete: rows.iter().all(|r| r.complete),
        rows,
        reference: reference_exponents(beta),
    }
}

/// N_{f⊗ψ_p}(β, T) over the primes p ≤ X, p ≡ 1 mod N.
pub fn density_experiment(form: &FormDescriptor, x: u64, t: f64, beta: f64) -> Result<DensityReport> {
    let scans = density_scans(form, x, t)?;
    Ok(density_report(form, x, t, beta, &scans))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_eleven_family() {
        assert_eq!(density_primes(11, 100), vec![23, 67, 89]);
        assert_eq!(density_primes(1, 20), vec![3, 5, 7, 11, 13, 17, 19]);
    }

    #[test]
    fn reference_values() {
        let (a, b) = reference_exponents(7.0 / 9.0);
        assert!((a - 8.0 / 9.0).abs() < 1e-15 && (b - 1.0).abs() < 1e-15);
    }
}
