//! Large-n predictions: spectral density of RSRB graphs, closed forms for the
//! algebraic connectivity, and the polynomial root problems behind them.
//!
//! Throughout, the walk generating functions are regularized by adding
//! `d2 - d1` loops to every degree-`d1` vertex, so the graph becomes
//! `d2`-regular (with loops) and `mu = d2 - 1/x` where `x` is the dominant
//! singularity.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::poly::{smallest_real_root, QPoly, RealPolynomial};
use crate::quadrature::integrate;

/// Absolute tolerance handed to the quadrature.
pub const QUAD_TOL: f64 = 1e-11;

/// Support edges `r- <= |x| <= r+` of the continuous spectral density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeRadii {
    pub r_minus: f64,
    pub r_plus: f64,
}

pub fn edge_radii(d1: u32, d2: u32) -> Result<EdgeRadii> {
    if d1 == 0 || d2 == 0 || d1 + d2 < 3 {
        return invalid(format!("edge radii need d1, d2 >= 1 and d1 + d2 >= 3, got ({d1}, {d2})"));
    }
    let s = (d1 + d2) as f64 - 2.0;
    // s^2 - b^2 = (s - b)(s + b) is exact in integers
    let inner = ((2 * d1 as i64 - 2) * (2 * d2 as i64 - 2)) as f64;
    let root = inner.sqrt();
    Ok(EdgeRadii {
        r_minus: (s - root).max(0.0).sqrt(),
        r_plus: (s + root).sqrt(),
    })
}

/// Limiting adjacency spectral measure of RSRB(d1, d2): a continuous even
/// density on `r- < |x| < r+` plus an atom of weight `delta_weight` at 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityModel {
    pub d1: u32,
    pub d2: u32,
    pub radii: EdgeRadii,
    pub delta_weight: f64,
}

impl DensityModel {
    pub fn new(d1: u32, d2: u32) -> Result<Self> {
        let radii = edge_radii(d1, d2)?;
        let delta_weight = d1.abs_diff(d2) as f64 / (d1 + d2) as f64;
        Ok(DensityModel { d1, d2, radii, delta_weight })
    }

    fn k(&self) -> f64 {
        (self.d1 * self.d2) as f64 / (self.d1 + self.d2) as f64
    }

    fn spread(&self) -> f64 {
        let EdgeRadii { r_minus, r_plus } = self.radii;
        r_plus * r_plus - r_minus * r_minus
    }

    /// Integrand in the angle variable defined by
    /// `x^2 = r-^2 + (r+^2 - r-^2) sin^2(theta)`; smooth on `[0, pi/2]`.
    fn angular(&self, theta: f64) -> f64 {
        let spread = self.spread();
        let (s, c) = theta.sin_cos();
        let x2 = self.radii.r_minus.powi(2) + spread * s * s;
        let dd = (self.d1 * self.d2) as f64;
        self.k() / PI * spread * spread * s * s * c * c / ((dd - x2) * x2)
    }

    fn theta_of(&self, t: f64) -> f64 {
        let EdgeRadii { r_minus, r_plus } = self.radii;
        if t <= r_minus {
            return 0.0;
        }
        if t >= r_plus {
            return PI / 2.0;
        }
        let s2 = ((t * t - r_minus * r_minus) / self.spread()).clamp(0.0, 1.0);
        s2.sqrt().asin()
    }

    /// Continuous mass on `r- < x < min(t, r+)`.
    pub fn positive_mass_below(&self, t: f64) -> f64 {
        let theta = self.theta_of(t);
        if theta == 0.0 {
            return 0.0;
        }
        integrate(|th| self.angular(th), 0.0, theta, QUAD_TOL)
    }

    /// Continuous mass on the positive half-line.
    pub fn positive_mass(&self) -> f64 {
        self.positive_mass_below(f64::INFINITY)
    }

    /// `2 * positive_mass + delta_weight`; equals 1 for a consistent model.
    pub fn total_mass(&self) -> f64 {
        2.0 * self.positive_mass() + self.delta_weight
    }
}

/// Continuous part of the limiting density at `x`; 0 off the support and at
/// its edges. The atom at 0 is never folded in.
pub fn rsrb_density(x: f64, model: &DensityModel) -> f64 {
    let EdgeRadii { r_minus, r_plus } = model.radii;
    let ax = x.abs();
    if !(ax > r_minus && ax < r_plus) {
        return 0.0;
    }
    let x2 = x * x;
    let prod = (x2 - r_minus * r_minus) * (r_plus * r_plus - x2);
    let dd = (model.d1 * model.d2) as f64;
    model.k() / PI * prod.max(0.0).sqrt() / ((dd - x2) * ax)
}

/// Cumulative distribution of the limiting measure, atom included
/// (right-continuous: the atom is counted at `x = 0`).
pub fn rsrb_cdf(x: f64, model: &DensityModel) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let half = model.positive_mass();
    let v = if x < 0.0 {
        half - model.positive_mass_below(-x)
    } else {
        half + model.delta_weight + model.positive_mass_below(x)
    };
    v.clamp(0.0, 1.0)
}

/// Asymptotic algebraic connectivity of RSRB(d1, d2).
pub fn mu_rsrb(d1: u32, d2: u32) -> Result<f64> {
    if d1 < 2 || d2 < 2 || (d1 == 2 && d2 == 2) {
        return invalid(format!("mu_rsrb needs d1, d2 >= 2 and not (2, 2), got ({d1}, {d2})"));
    }
    let r = edge_radii(d1, d2)?;
    let half_sum = (d1 + d2) as f64 / 2.0;
    let half_gap = (d2 as f64 - d1 as f64) / 2.0;
    Ok(half_sum - (half_gap * half_gap + r.r_plus * r.r_plus).sqrt())
}

/// `d - 2 sqrt(d - 1)`.
pub fn mu_regular(d: u32) -> Result<f64> {
    if d < 2 {
        return invalid(format!("mu_regular needs d >= 2, got {d}"));
    }
    Ok(d as f64 - 2.0 * (d as f64 - 1.0).sqrt())
}

fn qi(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// The quartic in `x` whose root `x = 1/(d2 - mu)` locates the singularity
/// of the looped RSRB system: the vanishing discriminant of the quadratic
/// satisfied by `A`.
pub fn rsrb_x_quartic(d1: u32, d2: u32) -> RealPolynomial {
    let (a, b) = (d1 as f64, d2 as f64);
    let s = a + b - 2.0;
    let g = b - a;
    RealPolynomial::new(vec![1.0, -2.0 * g, g * g - 2.0 * s, 2.0 * s * g, g * g])
}

/// The same quartic as commonly printed, with constant term `-1`. It is off
/// by exactly `-2` everywhere and kept only for comparison.
pub fn printed_x_quartic(d1: u32, d2: u32) -> RealPolynomial {
    let mut c = rsrb_x_quartic(d1, d2).coeffs().to_vec();
    c[0] = -1.0;
    RealPolynomial::new(c)
}

/// Quartic in `mu` obtained from [`rsrb_x_quartic`] by `x = 1/(d2 - mu)`.
pub fn rsrb_mu_quartic(d1: u32, d2: u32) -> RealPolynomial {
    let (a, b) = (d1 as f64, d2 as f64);
    let s = a + b;
    let p = a * b;
    RealPolynomial::new(vec![
        (p - a - b).powi(2),
        2.0 * s * (s - 2.0 - p),
        s * s + 2.0 * p - 2.0 * a - 2.0 * b + 4.0,
        -2.0 * s,
        1.0,
    ])
}

/// [`rsrb_mu_quartic`] after the shift `mu = y + (d1 + d2)/2`, which leaves
/// a quadratic in `y^2`.
pub fn rsrb_y_quartic(d1: u32, d2: u32) -> RealPolynomial {
    let (a, b) = (d1 as f64, d2 as f64);
    let g = b - a;
    RealPolynomial::new(vec![
        g * g * (a + b) / 2.0 + g.powi(4) / 16.0,
        0.0,
        4.0 - 2.0 * (a + b) - g * g / 2.0,
        0.0,
        1.0,
    ])
}

/// Residuals of the RSRB derivation chain at the closed-form `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticResiduals {
    /// x-quartic at `x = 1/(d2 - mu)`.
    pub x_quartic: f64,
    /// Printed x-quartic at the same point (expected: -2).
    pub x_quartic_printed: f64,
    /// mu-quartic at `mu`, divided by its largest coefficient magnitude.
    pub mu_quartic_rel: f64,
    /// y-quartic at `mu - (d1 + d2)/2`, divided by its largest coefficient.
    pub y_quartic_rel: f64,
}

fn relative(p: &RealPolynomial, x: f64) -> f64 {
    let scale = p.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs()));
    p.eval(x) / scale
}

pub fn quartic_residuals(d1: u32, d2: u32) -> Result<QuarticResiduals> {
    if d1 >= d2 {
        return invalid(format!("quartic residual needs d1 < d2, got ({d1}, {d2})"));
    }
    let mu = mu_rsrb(d1, d2)?;
    let x = 1.0 / (d2 as f64 - mu);
    Ok(QuarticResiduals {
        x_quartic: rsrb_x_quartic(d1, d2).eval(x),
        x_quartic_printed: printed_x_quartic(d1, d2).eval(x),
        mu_quartic_rel: relative(&rsrb_mu_quartic(d1, d2), mu),
        y_quartic_rel: relative(&rsrb_y_quartic(d1, d2), mu - (d1 + d2) as f64 / 2.0),
    })
}

/// |x-quartic| at `x = 1/(d2 - mu_rsrb)`.
pub fn quartic_residual(d1: u32, d2: u32) -> Result<f64> {
    Ok(quartic_residuals(d1, d2)?.x_quartic.abs())
}

/// Coefficients (in `x`) of the cubic `F(R; x) = alpha R^3 + beta R^2 +
/// gamma R + delta` whose double root locates the RSR singularity.
///
/// `F = R D_A D_B - (1-p) D_B - p D_A` with `D_A = 1 - (d2-d1) x - (d1-1)
/// x^2 R` and `D_B = 1 - (d2-1) x^2 R`, i.e. `R = (1-p)/D_A + p/D_B`.
pub fn rsr_cubic(p: &BigRational, d1: u32, d2: u32) -> [QPoly; 4] {
    let a = qi(d1 as i64 - 1);
    let b = qi(d2 as i64 - d1 as i64);
    let c = qi(d2 as i64 - 1);
    let z = BigRational::zero;
    let alpha = QPoly::monomial(&a * &c, 4);
    let beta = QPoly::new(vec![z(), z(), -(&c + &a), &c * &b]);
    let gamma = QPoly::new(vec![BigRational::one(), -b.clone(), &c - p * &b]);
    let delta = QPoly::new(vec![-BigRational::one(), p * &b]);
    [alpha, beta, gamma, delta]
}

/// Discriminant in `R` of [`rsr_cubic`] with the factor `x^4` removed: a
/// polynomial in `x` of degree at most 6.
pub fn rsr_discriminant_poly(p: &BigRational, d1: u32, d2: u32) -> QPoly {
    let [a, b, c, d] = rsr_cubic(p, d1, d2);
    let k = |n: i64| qi(n);
    let t1 = a.mul(&b).mul(&c).mul(&d).scale(&k(18));
    let t2 = b.pow(3).mul(&d).scale(&k(-4));
    let t3 = b.pow(2).mul(&c.pow(2));
    let t4 = a.mul(&c.pow(3)).scale(&k(-4));
    let t5 = a.pow(2).mul(&d.pow(2)).scale(&k(-27));
    let disc = t1.add(&t2).add(&t3).add(&t4).add(&t5);
    let (rest, power) = disc.strip_x_power();
    // Every term carries x^4 at least (alpha ~ x^4, beta ~ x^2).
    debug_assert!(disc.is_zero() || power >= 4);
    let mut coeffs = vec![BigRational::zero(); power.saturating_sub(4)];
    coeffs.extend(rest.coeffs().iter().cloned());
    QPoly::new(coeffs)
}

/// One candidate singularity of the RSR system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RsrCandidate {
    pub x: f64,
    /// Double root of the cubic at `x`.
    pub r: f64,
    /// Fixed-point slope `G'(R)`; 1 at a genuine tangency.
    pub slope: f64,
    pub admissible: bool,
}

const TANGENCY_TOL: f64 = 1e-6;

fn examine(x: f64, p: f64, d1: u32, d2: u32) -> RsrCandidate {
    let (a, b, c) = ((d1 - 1) as f64, (d2 - d1) as f64, (d2 - 1) as f64);
    let (x2, x3, x4) = (x * x, x * x * x, x * x * x * x);
    let alpha = a * c * x4;
    let beta = c * b * x3 - (c + a) * x2;
    let gamma = (c - p * b) * x2 - b * x + 1.0;
    let delta = p * b * x - 1.0;
    let denom = beta * beta - 3.0 * alpha * gamma;
    let r = if denom.abs() > 1e-14 * (beta * beta).max(1e-300) {
        (9.0 * alpha * delta - beta * gamma) / (2.0 * denom)
    } else {
        -beta / (3.0 * alpha)
    };
    let da = 1.0 - b * x - a * x2 * r;
    let db = 1.0 - c * x2 * r;
    let slope = (1.0 - p) * a * x2 / (da * da) + p * c * x2 / (db * db);
    let admissible = r.is_finite()
        && r >= 1.0 - 1e-9
        && (slope - 1.0).abs() < TANGENCY_TOL
        && (p >= 1.0 || da > 0.0)
        && (p <= 0.0 || db > 0.0);
    RsrCandidate { x, r, slope, admissible }
}

/// Positive discriminant roots, each classified.
pub fn rsr_candidates(p: &BigRational, d1: u32, d2: u32) -> Result<Vec<RsrCandidate>> {
    check_rsr(p, d1, d2)?;
    let disc = rsr_discriminant_poly(p, d1, d2);
    if disc.is_zero() {
        return Err(Error::NoAdmissibleRoot("discriminant vanishes identically".into()));
    }
    let pf = p.to_f64().unwrap_or(f64::NAN);
    let roots = disc.real_roots(0.0, disc.cauchy_bound())?;
    Ok(roots
        .into_iter()
        .filter(|&x| x > 0.0)
        .map(|x| examine(x, pf, d1, d2))
        .collect())
}

fn check_rsr(p: &BigRational, d1: u32, d2: u32) -> Result<()> {
    if p.is_negative() || *p > BigRational::one() {
        return invalid(format!("p must lie in [0, 1], got {p}"));
    }
    if d1 < 2 || d2 < d1 {
        return invalid(format!("mu_rsr needs 2 <= d1 <= d2, got ({d1}, {d2})"));
    }
    Ok(())
}

/// Asymptotic algebraic connectivity of RSR(p, d1, d2), with `p` exact.
///
/// The singularity is the smallest `x > 0` at which `F(.; x)` has a real
/// double root `R >= 1` that is a genuine tangency of `R = G(R)` on the
/// branch through `R(0) = 1` (both denominators positive). Other
/// discriminant roots are poles of `G` passing through the cubic and are
/// rejected.
pub fn mu_rsr_exact(p: &BigRational, d1: u32, d2: u32) -> Result<f64> {
    let cands = rsr_candidates(p, d1, d2)?;
    match cands.iter().find(|c| c.admissible) {
        Some(c) => Ok(d2 as f64 - 1.0 / c.x),
        None => Err(Error::NoAdmissibleRoot(format!(
            "p={p}, d1={d1}, d2={d2}; discriminant roots: {cands:?}"
        ))),
    }
}

/// [`mu_rsr_exact`] with `p` taken at its exact binary value.
pub fn mu_rsr(p: f64, d1: u32, d2: u32) -> Result<f64> {
    let pq = BigRational::from_float(p).ok_or_else(|| Error::InvalidParams(format!("p = {p}")))?;
    mu_rsr_exact(&pq, d1, d2)
}

/// Leading-order small-`p` law for RSR(p, 2, 3): `p^2/4`.
pub fn mu_rsr_small_p(p: f64) -> f64 {
    p * p / 4.0
}

/// `mu(mu-4)(mu^2-4mu-1) + 2mu(3mu^3-33mu^2+89mu-19)p + (-15mu^2-30mu+1)p^2
/// + 8p^3` exactly as commonly printed for RSR(p, 2, 3). It fails the `p = 1`
/// regular limit; see [`mu23_regenerated`].
pub fn mu23_printed(p: &BigRational) -> QPoly {
    let base = QPoly::from_ints(&[0, 1]) // mu
        .mul(&QPoly::from_ints(&[-4, 1]))
        .mul(&QPoly::from_ints(&[-1, -4, 1]));
    let lin = QPoly::from_ints(&[0, -19, 89, -33, 3]).scale(&qi(2)).scale(p);
    let quad = QPoly::from_ints(&[1, -30, -15]).scale(&(p * p));
    let cubic = QPoly::constant(qi(8) * p * p * p);
    base.add(&lin).add(&quad).add(&cubic)
}

/// f64 image of [`mu23_printed`].
pub fn mu23_polynomial(p: f64) -> Result<RealPolynomial> {
    let pq = BigRational::from_float(p).ok_or_else(|| Error::InvalidParams(format!("p = {p}")))?;
    Ok(mu23_printed(&pq).to_real())
}

/// The RSR(p, 2, 3) singularity condition written in `mu`, obtained from
/// the discriminant by `x = 1/(3 - mu)` and made monic. Degree 6.
pub fn mu23_from_discriminant(p: &BigRational) -> QPoly {
    let disc = rsr_discriminant_poly(p, 2, 3);
    let deg = disc.degree().unwrap_or(0);
    let three_minus_mu = QPoly::from_ints(&[3, -1]);
    let mut out = QPoly::zero();
    for (k, c) in disc.coeffs().iter().enumerate() {
        out = out.add(&three_minus_mu.pow((deg - k) as u32).scale(c));
    }
    out.monic()
}

/// Closed form of [`mu23_from_discriminant`]:
/// `mu^6 - 12mu^5 + (6p+46)mu^4 - (66p+48)mu^3 + (-15p^2+178p-31)mu^2
/// + (-30p^2-38p-4)mu + 8p^3 + p^2`. Its `p`-dependent part coincides with
/// the printed form; the `p^0` part is `mu(mu-4)(mu^2-4mu-1)^2`.
pub fn mu23_regenerated(p: &BigRational) -> QPoly {
    let p2 = p * p;
    let p3 = &p2 * p;
    QPoly::new(vec![
        qi(8) * &p3 + &p2,
        qi(-30) * &p2 - qi(38) * p - qi(4),
        qi(-15) * &p2 + qi(178) * p - qi(31),
        qi(-66) * p - qi(48),
        qi(6) * p + qi(46),
        qi(-12),
        qi(1),
    ])
}

/// `mu23_regenerated - mu23_printed`, independent of `p`:
/// `mu(mu-4)(mu^2-4mu-1)(mu^2-4mu-2)`.
pub fn mu23_difference(p: &BigRational) -> QPoly {
    mu23_regenerated(p).sub(&mu23_printed(p))
}

/// Number `a + b sqrt(2)` with rational parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSqrt2 {
    pub a: BigRational,
    pub b: BigRational,
}

impl QSqrt2 {
    pub fn new(a: i64, b: i64) -> Self {
        QSqrt2 { a: qi(a), b: qi(b) }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        QSqrt2 { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn mul(&self, o: &Self) -> Self {
        QSqrt2 {
            a: &self.a * &o.a + qi(2) * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }

    /// Exact value of `poly` at `z`.
    pub fn eval(poly: &QPoly, z: &QSqrt2) -> QSqrt2 {
        poly.coeffs().iter().rev().fold(QSqrt2::new(0, 0), |acc, c| {
            acc.mul(z).add(&QSqrt2 { a: c.clone(), b: BigRational::zero() })
        })
    }
}

/// The small-world singularity polynomial in `mu` (degree 9).
pub fn small_world_polynomial() -> RealPolynomial {
    RealPolynomial::from_descending(&[
        1.0, -24.0, 249.0, -1454.0, 5184.0, -11400.0, 14848.0, -10368.0, 3108.0, -136.0,
    ])
}

/// Asymptotic algebraic connectivity of the ring-plus-matching graph.
pub fn mu_small_world() -> Result<f64> {
    smallest_real_root(&small_world_polynomial(), 0.0, 1.0)
}
