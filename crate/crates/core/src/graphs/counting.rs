//! Closed forms and bounds for graph counts, in exact integer arithmetic.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::{Error, Result};

pub fn binom(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc = acc * BigUint::from(n - j) / BigUint::from(j + 1);
    }
    acc
}

/// Raney number `A_n(x, t) = x/(x + n t) binom(x + n t, n)`, with `A_0 = 1`.
///
/// Evaluated as `binom(x + nt, n) - t binom(x + nt - 1, n - 1)`, which is exact.
pub fn raney(x: i64, t: i64, n: u64) -> Result<BigInt> {
    if n == 0 {
        return Ok(BigInt::one());
    }
    let top = x + n as i64 * t;
    if top <= 0 {
        return Err(Error::invalid(format!("raney needs x + n t > 0, got x={x} t={t} n={n}")));
    }
    let top = top as u64;
    Ok(BigInt::from(binom(top, n)) - BigInt::from(t) * BigInt::from(binom(top - 1, n - 1)))
}

/// Number of ordered `m`-ary trees with `n` vertices, `binom(n m, n) / (n (m-1) + 1)`.
pub fn catalan(m: u64, n: u64) -> Result<BigUint> {
    if m == 0 {
        return Err(Error::invalid("catalan needs m >= 1"));
    }
    let v = raney(1, m as i64, n)?;
    Ok(v.to_biguint().expect("nonnegative"))
}

/// `prod_i C^m_{n_i}` summed over compositions `n_1 + ... + n_r = n`, by convolution.
pub fn forest_count(r: u64, m: u64, n: u64) -> Result<BigUint> {
    let c: Vec<BigUint> = (0..=n).map(|j| catalan(m, j)).collect::<Result<_>>()?;
    let mut acc: Vec<BigUint> = (0..=n).map(|j| if j == 0 { BigUint::one() } else { BigUint::zero() }).collect();
    for _ in 0..r {
        let mut next = vec![BigUint::zero(); n as usize + 1];
        for (i, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, cj) in c.iter().enumerate().take(n as usize + 1 - i) {
                next[i + j] += a * cj;
            }
        }
        acc = next;
    }
    Ok(acc.swap_remove(n as usize))
}

/// `|Q(p, k, 0)| = 2^k (2p / (2p + 3k)) binom(2p + 3k, k)`.
pub fn tree_structure_count(p: u64, k: u64) -> Result<BigUint> {
    if p == 0 {
        return Err(Error::invalid("p must be at least 1"));
    }
    let r = raney(2 * p as i64, 3, k)?.to_biguint().expect("nonnegative");
    Ok(r << k)
}

/// Upper bound `2^k binom(k, l) binom(2p + 3k, k) (p + k - l)^l` on `|Q(p, k, l)|`.
pub fn loop_structure_bound(p: u64, k: u64, l: u64) -> BigUint {
    if l > k {
        return BigUint::zero();
    }
    (binom(k, l) * binom(2 * p + 3 * k, k) * BigUint::from(p + k - l).pow(l as u32)) << k
}

/// Bound `2^k binom(k, m) binom(k, l) binom(2p + 3k, k) (p + k - l - m)^l` with `m` potential vertices.
pub fn potential_structure_bound(p: u64, k: u64, l: u64, m: u64) -> BigUint {
    if l + m > k {
        return BigUint::zero();
    }
    (binom(k, m) * binom(k, l) * binom(2 * p + 3 * k, k) * BigUint::from(p + k - l - m).pow(l as u32)) << k
}

/// Bound `2^k binom(k, l) (p + k - l)^l p (p + 1) ... (p + k - 1)` on the number of
/// elementary terms in the `(k, l)` expansion coefficient.
pub fn elementary_term_bound(p: u64, k: u64, l: u64) -> BigUint {
    if l > k {
        return BigUint::zero();
    }
    let rising: BigUint = (0..k).map(|j| BigUint::from(p + j)).product();
    (binom(k, l) * BigUint::from(p + k - l).pow(l as u32) * rising) << k
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn examples() {
        assert_eq!(catalan(3, 2).unwrap(), u(3));
        assert_eq!(catalan(2, 4).unwrap(), u(14));
        assert_eq!(raney(1, 2, 3).unwrap(), BigInt::from(5));
        assert_eq!(tree_structure_count(1, 1).unwrap(), u(4));
        assert_eq!(tree_structure_count(1, 2).unwrap(), u(28));
        assert_eq!(loop_structure_bound(1, 2, 1), u(448));
        assert_eq!(potential_structure_bound(1, 1, 0, 1), u(10));
        assert_eq!(elementary_term_bound(1, 1, 0), u(2));
    }

    #[test]
    fn catalan_closed_form() {
        for m in 1..=4u64 {
            for n in 0..=8u64 {
                let direct = binom(n * m, n) / u(n * (m - 1) + 1);
                assert_eq!(catalan(m, n).unwrap(), direct);
            }
        }
        assert_eq!(catalan(2, 10).unwrap(), u(16796));
    }

    #[test]
    fn raney_rejects_nonpositive_top() {
        assert!(raney(-3, 1, 2).is_err());
        assert_eq!(raney(-3, 1, 0).unwrap(), BigInt::one());
    }
}
