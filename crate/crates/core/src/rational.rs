//! Exact rationals for the chord quotients.
//!
//! Values are kept as `i128` pairs. Comparisons fall back to big integers
//! when the cross products overflow, so ordering is always exact; the
//! arithmetic constructors are checked and panic on overflow, which the
//! format limits in [`crate::bounds::FixedFormat`] rule out.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;

/// An exact rational number with positive denominator.
///
/// [`Rational::new`] stores the canonical (lowest-terms) form. Internal
/// search loops build unreduced values with [`Rational::raw`]; equality and
/// ordering compare values, not representations.
#[derive(Clone, Copy)]
pub struct Rational {
    num: i128,
    den: i128,
}

impl Rational {
    pub fn new(num: i128, den: i128) -> Self {
        Self::raw(num, den).reduced()
    }

    pub fn from_int(v: i128) -> Self {
        Rational { num: v, den: 1 }
    }

    /// Builds a possibly unreduced value; the sign is moved to the numerator.
    #[inline]
    pub fn raw(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        if den < 0 {
            Rational {
                num: num.checked_neg().expect("rational overflow"),
                den: den.checked_neg().expect("rational overflow"),
            }
        } else {
            Rational { num, den }
        }
    }

    pub fn reduced(self) -> Self {
        let g = self.num.gcd(&self.den);
        if g <= 1 {
            self
        } else {
            Rational {
                num: self.num / g,
                den: self.den / g,
            }
        }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    /// `self - other`, unreduced.
    #[inline]
    pub fn sub_raw(self, other: Rational) -> Rational {
        if self.den == other.den {
            return Rational {
                num: self.num.checked_sub(other.num).expect("rational overflow"),
                den: self.den,
            };
        }
        let a = self.num.checked_mul(other.den);
        let b = other.num.checked_mul(self.den);
        let den = self.den.checked_mul(other.den);
        match (a, b, den) {
            (Some(a), Some(b), Some(den)) => Rational {
                num: a.checked_sub(b).expect("rational overflow"),
                den,
            },
            _ => panic!("rational overflow"),
        }
    }

    /// `self / d` for a positive integer `d`, unreduced.
    #[inline]
    pub fn div_int_raw(self, d: i128) -> Rational {
        debug_assert!(d > 0);
        Rational {
            num: self.num,
            den: self.den.checked_mul(d).expect("rational overflow"),
        }
    }

    /// `floor(self * 2^k)`.
    pub fn floor_scaled(&self, k: u32) -> i128 {
        match scale_num(self.num, k) {
            Some(n) => n.div_euclid(self.den),
            None => {
                let n = BigInt::from(self.num) << k;
                let q = n.div_floor(&BigInt::from(self.den));
                i128::try_from(q).expect("scaled value exceeds i128")
            }
        }
    }

    /// `ceil(self * 2^k)`.
    pub fn ceil_scaled(&self, k: u32) -> i128 {
        -Rational {
            num: -self.num,
            den: self.den,
        }
        .floor_scaled(k)
    }

    pub fn floor(&self) -> i128 {
        self.floor_scaled(0)
    }

    pub fn ceil(&self) -> i128 {
        self.ceil_scaled(0)
    }

    /// Smallest integer strictly greater than `self * 2^k`.
    pub fn int_above_scaled(&self, k: u32) -> i128 {
        self.floor_scaled(k) + 1
    }

    /// Largest integer strictly less than `self * 2^k`.
    pub fn int_below_scaled(&self, k: u32) -> i128 {
        self.ceil_scaled(k) - 1
    }

    pub fn is_integer(&self) -> bool {
        self.num.rem_euclid(self.den) == 0
    }
}

fn scale_num(num: i128, k: u32) -> Option<i128> {
    if k >= 127 {
        return if num == 0 { Some(0) } else { None };
    }
    let s = num.checked_shl(k)?;
    (s >> k == num).then_some(s)
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Rational {}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    #[inline]
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        match (
            self.num.checked_mul(other.den),
            other.num.checked_mul(self.den),
        ) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => {
                let a = BigInt::from(self.num) * BigInt::from(other.den);
                let b = BigInt::from(other.num) * BigInt::from(self.den);
                a.cmp(&b)
            }
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.reduced();
        if r.den == 1 {
            write!(f, "{}", r.num)
        } else {
            write!(f, "{}/{}", r.num, r.den)
        }
    }
}
