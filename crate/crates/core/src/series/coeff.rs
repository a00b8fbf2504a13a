//! Coefficient rings for truncated power series.

use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arithmetic needed by the series solver.
pub trait Coeff: Clone + Debug + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_positive(&self) -> bool;
    /// Nearest f64 (may overflow to infinity).
    fn to_f64(&self) -> f64;
    /// `self / other` as f64, finite whenever the true ratio is.
    fn ratio(&self, other: &Self) -> f64;

    /// `sum_{j=0..=t} a[j] * b[t-j]`.
    fn convolve(a: &[Self], b: &[Self], t: usize) -> Self {
        let mut acc = Self::zero();
        for j in 0..=t {
            if !a[j].is_zero() && !b[t - j].is_zero() {
                acc = acc.add(&a[j].mul(&b[t - j]));
            }
        }
        acc
    }
}

impl Coeff for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn ratio(&self, other: &Self) -> f64 {
        ToPrimitive::to_f64(&(self / other)).unwrap_or(f64::NAN)
    }
}

/// Double with a separate 64-bit binary exponent: value `m * 2^e` with
/// `0.5 <= |m| < 1`, or exactly zero. Never overflows in practice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtFloat {
    m: f64,
    e: i64,
}

/// `2^k` for `k` in the normal range, 0 below it.
fn pow2(k: i64) -> f64 {
    if k < -1022 {
        if k < -1074 {
            0.0
        } else {
            f64::from_bits(1u64 << (k + 1074))
        }
    } else if k > 1023 {
        f64::INFINITY
    } else {
        f64::from_bits(((k + 1023) as u64) << 52)
    }
}

/// `(m, e)` with `x = m * 2^e` and `0.5 <= |m| < 1`.
fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    if exp == 0 {
        let (m, e) = frexp(x * pow2(64));
        return (m, e - 64);
    }
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    (m, exp - 1022)
}

impl ExtFloat {
    pub const ZERO: ExtFloat = ExtFloat { m: 0.0, e: 0 };

    pub fn new(x: f64) -> Self {
        Self::scaled(x, 0)
    }

    /// `x * 2^e`.
    pub fn scaled(x: f64, e: i64) -> Self {
        let (m, k) = frexp(x);
        if m == 0.0 {
            Self::ZERO
        } else {
            ExtFloat { m, e: e + k }
        }
    }

    pub fn mantissa(&self) -> f64 {
        self.m
    }

    pub fn exponent(&self) -> i64 {
        self.e
    }

    /// Scientific notation with 17 significant digits, valid past the f64
    /// range (the decimal mantissa then carries ~1e-13 relative error).
    pub fn to_decimal(&self) -> String {
        let x = self.to_f64();
        if self.m == 0.0 || (x.is_finite() && x != 0.0 && x.abs() >= f64::MIN_POSITIVE) {
            return format!("{x:.16e}");
        }
        let log10 = self.ln_abs() / std::f64::consts::LN_10;
        let k = log10.floor();
        let mut mant = 10f64.powf(log10 - k);
        let mut k = k as i64;
        if mant >= 10.0 {
            mant /= 10.0;
            k += 1;
        }
        let sign = if self.m < 0.0 { "-" } else { "" };
        format!("{sign}{mant:.16}e{k}")
    }

    /// Natural logarithm of the absolute value.
    pub fn ln_abs(&self) -> f64 {
        self.m.abs().ln() + self.e as f64 * std::f64::consts::LN_2
    }
}

impl Coeff for ExtFloat {
    fn zero() -> Self {
        Self::ZERO
    }
    fn one() -> Self {
        ExtFloat::new(1.0)
    }
    fn from_rational(r: &BigRational) -> Self {
        // Split so that huge numerators and denominators stay finite.
        let n = r.numer();
        let d = r.denom();
        let (nb, db) = (n.bits() as i64, d.bits() as i64);
        let shift_n = (nb - 60).max(0);
        let shift_d = (db - 60).max(0);
        let nf = (n >> shift_n as usize).to_f64().unwrap_or(f64::NAN);
        let df = (d >> shift_d as usize).to_f64().unwrap_or(f64::NAN);
        ExtFloat::scaled(nf / df, shift_n - shift_d)
    }
    fn add(&self, other: &Self) -> Self {
        if self.m == 0.0 {
            return *other;
        }
        if other.m == 0.0 {
            return *self;
        }
        let e = self.e.max(other.e);
        ExtFloat::scaled(self.m * pow2(self.e - e) + other.m * pow2(other.e - e), e)
    }
    fn mul(&self, other: &Self) -> Self {
        if self.m == 0.0 || other.m == 0.0 {
            return Self::ZERO;
        }
        ExtFloat::scaled(self.m * other.m, self.e + other.e)
    }
    fn is_zero(&self) -> bool {
        self.m == 0.0
    }
    fn is_positive(&self) -> bool {
        self.m > 0.0
    }
    fn to_f64(&self) -> f64 {
        if self.e > 1100 {
            return self.m * f64::INFINITY;
        }
        if self.e < -1100 {
            return 0.0;
        }
        self.m * pow2(self.e / 2) * pow2(self.e - self.e / 2)
    }
    fn ratio(&self, other: &Self) -> f64 {
        ExtFloat::scaled(self.m / other.m, self.e - other.e).to_f64()
    }

    fn convolve(a: &[Self], b: &[Self], t: usize) -> Self {
        let mut top = i64::MIN;
        for j in 0..=t {
            if a[j].m != 0.0 && b[t - j].m != 0.0 {
                top = top.max(a[j].e + b[t - j].e);
            }
        }
        if top == i64::MIN {
            return Self::ZERO;
        }
        let mut sum = 0.0;
        for j in 0..=t {
            let (x, y) = (a[j], b[t - j]);
            let k = x.e + y.e - top;
            if x.m != 0.0 && y.m != 0.0 && k > -1074 {
                sum += x.m * y.m * pow2(k);
            }
        }
        ExtFloat::scaled(sum, top)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn frexp_and_pow2() {
        assert_eq!(frexp(8.0), (0.5, 4));
        assert_eq!(frexp(-0.75), (-0.75, 0));
        let tiny = f64::from_bits(1);
        assert_eq!(frexp(tiny), (0.5, -1073));
        assert_eq!(pow2(-1074), tiny);
        assert_eq!(pow2(10), 1024.0);
    }

    #[test]
    fn arithmetic_round_trips() {
        let a = ExtFloat::new(3.0);
        let b = ExtFloat::new(-1.25);
        assert_eq!(a.add(&b).to_f64(), 1.75);
        assert_eq!(a.mul(&b).to_f64(), -3.75);
        assert_eq!(a.add(&ExtFloat::ZERO), a);
        assert_eq!(a.ratio(&b), -2.4);
    }

    #[test]
    fn survives_huge_exponents() {
        let mut x = ExtFloat::one();
        let ten = ExtFloat::new(10.0);
        for _ in 0..1000 {
            x = x.mul(&ten);
        }
        assert!(x.to_f64().is_infinite());
        assert!((x.ln_abs() - 1000.0 * 10f64.ln()).abs() < 1e-9);
        assert!((x.ratio(&x.mul(&ExtFloat::new(2.0))) - 0.5).abs() < 1e-15);
        let dec = x.to_decimal();
        let (mant, exp) = dec.split_once('e').unwrap();
        let log10 = mant.parse::<f64>().unwrap().log10() + exp.parse::<f64>().unwrap();
        assert!((log10 - 1000.0).abs() < 1e-11, "{dec}");
        assert_eq!(ExtFloat::new(0.1).to_decimal(), "1.0000000000000001e-1");
        assert_eq!(ExtFloat::ZERO.to_decimal(), "0.0000000000000000e0");
    }

    #[test]
    fn from_big_rational() {
        let big = BigRational::new(BigInt::from(10).pow(400) * 3, BigInt::from(10).pow(399));
        assert!((ExtFloat::from_rational(&big).to_f64() - 30.0).abs() < 1e-13);
        let third = BigRational::new(1.into(), 3.into());
        assert_eq!(ExtFloat::from_rational(&third).to_f64(), 1.0 / 3.0);
    }

    #[test]
    fn convolution_matches_naive() {
        let a: Vec<ExtFloat> = (1..=6).map(|i| ExtFloat::new(i as f64)).collect();
        let b: Vec<ExtFloat> = (1..=6).map(|i| ExtFloat::new(1.0 / i as f64)).collect();
        let want: f64 = (0..=5).map(|j| (j + 1) as f64 / (6 - j) as f64).sum();
        assert!((ExtFloat::convolve(&a, &b, 5).to_f64() - want).abs() < 1e-13);
    }
}
