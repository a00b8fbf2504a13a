//! Univariate polynomials in ascending-power form, with exact real-root
//! isolation by Sturm sequences over the rationals.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Polynomial with f64 coefficients, `coeffs[i]` multiplies `x^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    /// Trailing zero coefficients are trimmed.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        RealPolynomial { coeffs }
    }

    /// Coefficients given from the highest power down.
    pub fn from_descending(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().rev().copied().collect())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    /// Exact rational image of the coefficients. Non-finite coefficients are
    /// rejected.
    pub fn to_exact(&self) -> Result<QPoly> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| {
                BigRational::from_float(c)
                    .ok_or_else(|| Error::InvalidParams(format!("non-finite coefficient {c}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(QPoly::new(coeffs))
    }

    /// All distinct real roots in `[lo, hi]`, ascending.
    pub fn real_roots(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        self.to_exact()?.real_roots(lo, hi)
    }
}

impl fmt::Display for RealPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.coeffs.iter().map(|c| format!("{c}")))
    }
}

/// Smallest real root of `poly` in `[lo, hi]`, to within one ulp.
pub fn smallest_real_root(poly: &RealPolynomial, lo: f64, hi: f64) -> Result<f64> {
    if !(lo < hi) {
        return Err(Error::InvalidParams(format!("empty root interval [{lo}, {hi}]")));
    }
    poly.real_roots(lo, hi)?
        .first()
        .copied()
        .ok_or(Error::NoRoot { lo, hi })
}

/// Polynomial with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| q(c)).collect())
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^k`.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn to_real(&self) -> RealPolynomial {
        RealPolynomial::new(
            self.coeffs
                .iter()
                .map(|c| c.to_f64().unwrap_or(f64::NAN))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = BigRational::zero();
        Self::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&q(-1)))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(BigRational::one()), |acc, _| acc.mul(self))
    }

    /// Composition `self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| acc.mul(other).add(&Self::constant(c.clone())))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * q(i as i64))
                .collect(),
        )
    }

    /// Quotient and remainder. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, b) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * b;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => Self::zero(),
        }
    }

    /// Product of the distinct irreducible factors: same roots, all simple.
    pub fn square_free(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0
    }

    /// Removes the factor `x^k` of highest possible `k`; returns (rest, k).
    pub fn strip_x_power(&self) -> (Self, usize) {
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if self.is_zero() {
            return (Self::zero(), 0);
        }
        (Self::new(self.coeffs[k..].to_vec()), k)
    }

    /// Sturm sequence `p, p', -rem(p, p'), ...`.
    pub fn sturm_sequence(&self) -> Vec<QPoly> {
        let mut seq = vec![self.clone()];
        if self.is_zero() {
            return seq;
        }
        let d = self.derivative();
        if d.is_zero() {
            return seq;
        }
        seq.push(d);
        loop {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&q(-1)));
        }
        seq
    }

    /// All distinct real roots in `[lo, hi]`, ascending, each to within one
    /// ulp of f64.
    pub fn real_roots(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::InvalidParams(format!("bad root interval [{lo}, {hi}]")));
        }
        if self.is_zero() {
            return Err(Error::InvalidParams("zero polynomial has no isolated roots".into()));
        }
        let p = self.square_free();
        let sturm = p.sturm_sequence();
        let mut roots = Vec::new();
        let lo_q = exact(lo);
        if p.eval(&lo_q).is_zero() {
            roots.push(lo);
        }
        if lo < hi {
            isolate(&p, &sturm, lo, hi, &mut roots);
        }
        Ok(roots)
    }

    /// Distinct real roots over the whole line, using a Cauchy bound.
    pub fn all_real_roots(&self) -> Result<Vec<f64>> {
        let bound = self.cauchy_bound();
        self.real_roots(-bound, bound)
    }

    /// Every real root lies strictly inside `(-b, b)`.
    pub fn cauchy_bound(&self) -> f64 {
        let Some(lead) = self.leading() else { return 1.0 };
        let m = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| (c / lead).abs().to_f64().unwrap_or(f64::MAX))
            .fold(0.0f64, f64::max);
        (1.0 + m) * (1.0 + 1e-12) + 1.0
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.coeffs.iter().map(|c| c.to_string()))
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, coeffs: impl DoubleEndedIterator<Item = String> + ExactSizeIterator) -> fmt::Result {
    let mut first = true;
    for (i, c) in coeffs.enumerate().rev() {
        if c == "0" {
            continue;
        }
        if !first {
            write!(f, " + ")?;
        }
        first = false;
        match i {
            0 => write!(f, "{c}")?,
            1 => write!(f, "({c})*x")?,
            _ => write!(f, "({c})*x^{i}")?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite endpoint")
}

fn sign_changes(seq: &[QPoly], x: &BigRational) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for p in seq {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Number of distinct roots in `(a, b]`.
fn roots_between(sturm: &[QPoly], a: f64, b: f64) -> usize {
    sign_changes(sturm, &exact(a)) - sign_changes(sturm, &exact(b))
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    if m.is_finite() {
        m
    } else {
        a / 2.0 + b / 2.0
    }
}

/// Pushes the roots in `(a, b]` in ascending order.
fn isolate(p: &QPoly, sturm: &[QPoly], a: f64, b: f64, roots: &mut Vec<f64>) {
    match roots_between(sturm, a, b) {
        0 => {}
        1 => roots.push(refine(p, a, b)),
        _ => {
            let m = midpoint(a, b);
            if m <= a || m >= b {
                // Two roots closer than one ulp: report one representative.
                roots.push(b);
                return;
            }
            isolate(p, sturm, a, m, roots);
            isolate(p, sturm, m, b, roots);
        }
    }
}

/// The single simple root of the square-free `p` in `(a, b]`.
fn refine(p: &QPoly, mut a: f64, mut b: f64) -> f64 {
    let sign = |x: f64| {
        let v = p.eval(&exact(x));
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    };
    let sb = sign(b);
    if sb == 0 {
        return b;
    }
    // `p` changes sign across a simple root, so `sign(a) == -sb` (it cannot
    // be 0: the root at `a` is excluded by the half-open interval).
    loop {
        let m = midpoint(a, b);
        if m <= a || m >= b {
            return b;
        }
        match sign(m) {
            0 => return m,
            s if s == sb => b = m,
            _ => a = m,
        }
    }
}
