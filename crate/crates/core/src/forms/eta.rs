//! Ramanujan τ from x·∏(1 − x^m)^24.

/// Nonzero coefficients of ∏(1 − x^m) up to x^limit (pentagonal numbers).
pub fn pentagonal_series(limit: usize) -> Vec<(usize, i128)> {
    let mut out = vec![(0usize, 1i128)];
    let mut k = 1i64;
    loop {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let a = (k * (3 * k - 1) / 2) as usize;
        let b = (k * (3 * k + 1) / 2) as usize;
        if a > limit {
            break;
        }
        out.push((a, sign));
        if b <= limit {
            out.push((b, sign));
        }
        k += 1;
    }
    out.sort_unstable();
    out
}

/// τ(1..=limit) by 24 sparse products with the pentagonal series.
/// Quadratic-ish; kept as an oracle for small limits.
pub fn tau_by_products(limit: usize) -> Vec<i128> {
    let e = pentagonal_series(limit);
    let mut f = vec![0i128; limit];
    if limit == 0 {
        return vec![0];
    }
    f[0] = 1;
    for _ in 0..24 {
        let mut g = vec![0i128; limit];
        for (i, &fi) in f.iter().enumerate() {
            if fi == 0 {
                continue;
            }
            for &(j, ej) in &e {
                if i + j >= limit {
                    break;
                }
                g[i + j] += fi * ej;
            }
        }
        f = g;
    }
    let mut tau = vec![0i128; limit + 1];
    tau[1..].copy_from_slice(&f);
    tau
}

/// τ(1..=limit) via the power recurrence n·F_n = Σ_j (25j − n)e_j F_{n−j}
/// for F = E^24, E the pentagonal series. Intermediate sums may exceed i128,
/// so they are formed modulo 2^128; n·F_n itself fits for limit ≤ 2.5·10^5.
pub fn tau_by_power(limit: usize) -> Vec<i128> {
    assert!(limit <= 250_000, "i128 headroom");
    let e = pentagonal_series(limit);
    let mut f = vec![0i128; limit];
    if limit == 0 {
        return vec![0];
    }
    f[0] = 1;
    for n in 1..limit {
        let mut acc: i128 = 0;
        for &(j, ej) in e.iter().skip(1) {
            if j > n {
                break;
            }
            let w = (25 * j as i128 - n as i128) * ej;
            acc = acc.wrapping_add(w.wrapping_mul(f[n - j]));
        }
        debug_assert_eq!(acc % n as i128, 0);
        f[n] = acc / n as i128;
    }
    let mut tau = vec![0i128; limit + 1];
    tau[1..].copy_from_slice(&f);
    tau
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_values() {
        let t = tau_by_power(12);
        assert_eq!(&t[1..=12], &[1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920, 534612, -370944]);
    }

    #[test]
    fn power_matches_products() {
        assert_eq!(tau_by_power(1500), tau_by_products(1500));
    }

    #[test]
    fn multiplicative_spot_checks() {
        let t = tau_by_power(5000);
        assert_eq!(t[6], t[2] * t[3]);
        assert_eq!(t[4], t[2] * t[2] - (1i128 << 11));
        for (m, n) in [(7usize, 11usize), (9, 25), (16, 125), (13, 101)] {
            assert_eq!(t[m * n], t[m] * t[n]);
        }
    }
}
