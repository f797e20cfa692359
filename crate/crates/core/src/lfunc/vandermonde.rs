use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact c_1..c_M with Σ_j c_j q_j^{-m} = δ_{m,m0} for 0 ≤ m < M.
pub fn vandermonde_weights(qs: &[u64], m0: usize) -> Result<Vec<BigRational>> {
    let m = qs.len();
    if m == 0 || m0 >= m {
        return Err(Error::InvalidInput(format!("need 0 ≤ m0 < M, got m0 = {m0}, M = {m}")));
    }
    for (i, a) in qs.iter().enumerate() {
        if *a == 0 || qs[..i].contains(a) {
            return Err(Error::InvalidInput(format!("nodes must be distinct and nonzero: {qs:?}")));
        }
    }
    // rows m, columns j: q_j^{-m}
    let mut a: Vec<Vec<BigRational>> = (0..m)
        .map(|row| {
            let mut r: Vec<BigRational> = qs
                .iter()
                .map(|&q| BigRational::new(BigInt::one(), BigInt::from(q).pow(row as u32)))
                .collect();
            r.push(if row == m0 { BigRational::one() } else { BigRational::zero() });
            r
        })
        .collect();
    for col in 0..m {
        let piv = (col..m).find(|&r| !a[r][col].is_zero()).expect("Vandermonde with distinct nodes is invertible");
        a.swap(col, piv);
        let inv = BigRational::one() / a[col][col].clone();
        for v in a[col].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for r in 0..m {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=m {
                    let sub = f.clone() * a[col][c].clone();
                    a[r][c] = a[r][c].clone() - sub;
                }
            }
        }
    }
    Ok(a.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn small_cases() {
        assert_eq!(vandermonde_weights(&[7], 0).unwrap(), vec![r(1, 1)]);
        assert_eq!(vandermonde_weights(&[3, 5], 0).unwrap(), vec![r(-3, 2), r(5, 2)]);
        assert!(vandermonde_weights(&[3, 3], 0).is_err());
        assert!(vandermonde_weights(&[3, 5], 2).is_err());
    }

    #[test]
    fn delta_property_exact() {
        let qs = [3u64, 5, 7, 11];
        for m0 in 0..4 {
            let c = vandermonde_weights(&qs, m0).unwrap();
            for m in 0..4 {
                let s: BigRational = c
                    .iter()
                    .zip(qs)
                    .map(|(cj, q)| cj.clone() / BigRational::from_integer(BigInt::from(q).pow(m as u32)))
                    .sum();
                let want = if m == m0 { BigRational::one() } else { BigRational::zero() };
                assert_eq!(s, want);
            }
        }
    }
}
