//! Certified floor of `F * 2^q` for the built-in functions.
//!
//! Logarithm digits come from the repeated-squaring digit recurrence run
//! on a fixed-point interval. Every digit decision must be unambiguous
//! for the interval; if one is not, the working precision is doubled and
//! the recurrence restarted.

use num_bigint::BigUint;
use num_traits::One;

/// Exact `floor(value)` of a non-negative quantity plus whether `value`
/// itself is an integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CertifiedFloor {
    pub floor: i64,
    pub exact: bool,
}

/// `floor(2^(m+q) / (2^m + z))`, i.e. the scaled reciprocal of `1.z`.
pub fn reciprocal(z: u64, m: u32, q: u32) -> CertifiedFloor {
    let num = 1u128 << (m + q);
    let den = (1u128 << m) + z as u128;
    CertifiedFloor {
        floor: (num / den) as i64,
        exact: num.is_multiple_of(den),
    }
}

/// `floor(2^q * log2(1 + z / 2^m))`.
pub fn log2(z: u64, m: u32, q: u32) -> CertifiedFloor {
    let num = (1u128 << m) + z as u128;
    CertifiedFloor {
        floor: log2_fixed_floor(num, m, q) as i64,
        exact: z == 0,
    }
}

/// `floor(2^q * 2^(z / 2^m))`.
///
/// A candidate from `f64` is corrected by comparing `log2(y / 2^q)` with
/// `z / 2^m` using certified logarithm digits. For `z > 0` the value is
/// irrational so the comparison is never an equality.
pub fn exp2(z: u64, m: u32, q: u32) -> CertifiedFloor {
    let one = 1u128 << q;
    if z == 0 {
        return CertifiedFloor {
            floor: one as i64,
            exact: true,
        };
    }
    // y / 2^q <= 2^(z / 2^m)
    let le = |y: u128| -> bool {
        if y >= 2 * one {
            return false;
        }
        (log2_fixed_floor(y, q, m) as u128) < z as u128
    };
    let guess = (one as f64) * (z as f64 / (1u64 << m) as f64).exp2();
    let mut y = (guess.floor() as u128).clamp(one, 2 * one - 1);
    while y > one && !le(y) {
        y -= 1;
    }
    while le(y + 1) {
        y += 1;
    }
    CertifiedFloor {
        floor: y as i64,
        exact: false,
    }
}

/// `floor(2^digits * log2(v))` for `v = num / 2^frac_bits` in `[1, 2)`.
pub fn log2_fixed_floor(num: u128, frac_bits: u32, digits: u32) -> u64 {
    assert!(digits < 64, "too many digits");
    assert!(num >> frac_bits == 1, "argument must lie in [1, 2)");
    if let Some(bits) = digits_u128(num, frac_bits, digits) {
        return bits;
    }
    let mut prec = 128;
    loop {
        if let Some(bits) = digits_big(num, frac_bits, digits, prec) {
            return bits;
        }
        prec *= 2;
    }
}

const FAST_PREC: u32 = 61;

fn digits_u128(num: u128, frac_bits: u32, digits: u32) -> Option<u64> {
    if frac_bits > FAST_PREC {
        return None;
    }
    let prec = FAST_PREC;
    let mut lo = num << (prec - frac_bits);
    let mut hi = lo;
    let two = 1u128 << (prec + 1);
    let mut bits = 0u64;
    for _ in 0..digits {
        lo = (lo * lo) >> prec;
        hi = ceil_shr_u128(hi * hi, prec);
        bits <<= 1;
        if lo >= two {
            bits |= 1;
            lo >>= 1;
            hi = ceil_shr_u128(hi, 1);
        } else if hi >= two {
            return None;
        }
    }
    Some(bits)
}

fn ceil_shr_u128(v: u128, s: u32) -> u128 {
    let q = v >> s;
    if q << s == v {
        q
    } else {
        q + 1
    }
}

fn digits_big(num: u128, frac_bits: u32, digits: u32, prec: u32) -> Option<u64> {
    let v = BigUint::from(num);
    let (mut lo, mut hi) = if prec >= frac_bits {
        let s = &v << (prec - frac_bits);
        (s.clone(), s)
    } else {
        let s = frac_bits - prec;
        (&v >> s, ceil_shr(&v, s))
    };
    let two = BigUint::one() << (prec + 1);
    let mut bits = 0u64;
    for _ in 0..digits {
        lo = (&lo * &lo) >> prec;
        hi = ceil_shr(&(&hi * &hi), prec);
        bits <<= 1;
        if lo >= two {
            bits |= 1;
            lo >>= 1;
            hi = ceil_shr(&hi, 1);
        } else if hi >= two {
            return None;
        }
    }
    Some(bits)
}

fn ceil_shr(v: &BigUint, s: u32) -> BigUint {
    let q = v >> s;
    if (&q << s) == *v {
        q
    } else {
        q + BigUint::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent check: y = floor(2^d log2 v) iff 2^y <= v^(2^d) < 2^(y+1),
    // evaluated with exact big-integer powers.
    fn log2_oracle(num: u128, frac_bits: u32, digits: u32) -> u64 {
        let v = BigUint::from(num);
        let e = 1u64 << digits;
        let p = v.pow(e as u32);
        // v^(2^d) = p / 2^(frac_bits * 2^d)
        let shift = frac_bits as u64 * e;
        let int_part = p >> shift;
        int_part.bits() - 1
    }

    #[test]
    fn log2_matches_exact_powers() {
        for m in [3u32, 5, 6] {
            for z in 0..(1u128 << m) {
                for d in [1u32, 4, 7, 9] {
                    let num = (1u128 << m) + z;
                    assert_eq!(
                        log2_fixed_floor(num, m, d),
                        log2_oracle(num, m, d),
                        "z={z} m={m} d={d}"
                    );
                }
            }
        }
    }

    #[test]
    fn fast_and_big_paths_agree() {
        for z in [1u128, 17, 300, 777, 1023] {
            let num = 1024 + z;
            let fast = digits_u128(num, 10, 30).unwrap();
            let big = digits_big(num, 10, 30, 200).unwrap();
            assert_eq!(fast, big);
        }
    }

    #[test]
    fn reciprocal_exact_at_one() {
        assert_eq!(
            reciprocal(0, 10, 11),
            CertifiedFloor {
                floor: 2048,
                exact: true
            }
        );
        // 2^21 / 1025
        assert_eq!(reciprocal(1, 10, 11).floor, 2046);
        assert!(!reciprocal(1, 10, 11).exact);
    }

    #[test]
    fn exp2_brackets_by_exact_powers() {
        // y = floor(2^q * 2^(z/2^m)) iff y^(2^m) <= 2^(q 2^m + z) < (y+1)^(2^m)
        let (m, q) = (4u32, 6u32);
        for z in 0..(1u64 << m) {
            let y = exp2(z, m, q).floor as u64;
            let e = 1u32 << m;
            let rhs = BigUint::one() << (q as u64 * e as u64 + z);
            assert!(BigUint::from(y).pow(e) <= rhs, "z={z}");
            assert!(BigUint::from(y + 1).pow(e) > rhs, "z={z}");
        }
    }
}
