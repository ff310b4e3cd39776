//! Arithmetic and elimination over the prime field of size 2^31 - 1.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;

pub const PRIME: u64 = (1 << 31) - 1;

#[inline]
pub fn add(a: u64, b: u64) -> u64 {
    (a + b) % PRIME
}

#[inline]
pub fn sub(a: u64, b: u64) -> u64 {
    (a + PRIME - b) % PRIME
}

#[inline]
pub fn mul(a: u64, b: u64) -> u64 {
    (a * b) % PRIME
}

pub fn pow(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1;
    base %= PRIME;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(acc, base);
        }
        base = mul(base, base);
        exp >>= 1;
    }
    acc
}

/// Multiplicative inverse; `a` must be nonzero mod p.
pub fn inv(a: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(PRIME));
    pow(a, PRIME - 2)
}

pub fn from_i64(x: i64) -> u64 {
    x.rem_euclid(PRIME as i64) as u64
}

pub fn from_bigint(x: &BigInt) -> u64 {
    let r = x.mod_floor(&BigInt::from(PRIME));
    r.to_u64().expect("residue fits in u64")
}

/// Reduce a rational; `None` if the denominator vanishes mod p.
pub fn from_rational(x: &BigRational) -> Option<u64> {
    let d = from_bigint(x.denom());
    if d == 0 {
        return None;
    }
    Some(mul(from_bigint(x.numer()), inv(d)))
}

/// Rank of a dense row-major matrix by Gaussian elimination.
pub fn rank(mut rows: Vec<Vec<u64>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows.len() {
            break;
        }
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(p, rank);
        let pinv = inv(rows[rank][c]);
        for x in &mut rows[rank][c..cols] {
            *x = mul(*x, pinv);
        }
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot = &head[rank];
        for row in tail.iter_mut() {
            let f = row[c];
            if f == 0 {
                continue;
            }
            for j in c..cols {
                row[j] = sub(row[j], mul(f, pivot[j]));
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        for a in [1u64, 2, 3, 12345, PRIME - 1] {
            assert_eq!(mul(a, inv(a)), 1);
        }
    }

    #[test]
    fn negative_reduction() {
        assert_eq!(from_i64(-1), PRIME - 1);
        assert_eq!(from_bigint(&BigInt::from(-1)), PRIME - 1);
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(mul(from_rational(&half).unwrap(), 2), 1);
    }

    #[test]
    fn rank_small() {
        assert_eq!(rank(vec![vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank(vec![vec![1, 0], vec![0, 1]]), 2);
        assert_eq!(rank(vec![vec![0, 0, 0]]), 0);
        assert_eq!(rank(vec![]), 0);
    }
}
