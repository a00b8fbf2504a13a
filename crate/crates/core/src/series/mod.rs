//! Truncated power series and the order-by-order solver for polynomial
//! fixed-point systems `u = P(x, u_1, ..., u_k)`.
//!
//! A system is admissible when every monomial that contains unknowns either
//! carries a positive power of `x` or only involves unknowns defined on
//! earlier lines. Then the order-`s` coefficient of each unknown is a
//! function of already-known coefficients and one forward sweep per order
//! solves the system exactly.

mod coeff;
mod parse;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use coeff::{Coeff, ExtFloat};
pub use parse::{parse_rational, MAX_POWER};

use crate::error::{Error, Result};

/// Coefficients `c_0..=c_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<C> {
    coeffs: Vec<C>,
}

impl<C: Coeff> TruncatedSeries<C> {
    /// Panics on an empty coefficient vector.
    pub fn new(coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series has at least c_0");
        TruncatedSeries { coeffs }
    }

    pub fn zeros(order: usize) -> Self {
        TruncatedSeries { coeffs: vec![C::zero(); order + 1] }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, s: usize) -> &C {
        &self.coeffs[s]
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(Coeff::to_f64).collect()
    }

    /// Sum truncated at the smaller order.
    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeffs[i].add(&other.coeffs[i])).collect())
    }

    /// Product truncated at the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        Self::new((0..n).map(|t| C::convolve(&self.coeffs, &other.coeffs, t)).collect())
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }
}

/// `coef * x^x_power * prod(unknowns[factors])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    #[serde(with = "rational_string")]
    pub coef: BigRational,
    pub x_power: usize,
    /// Indices into the unknown list, sorted.
    pub factors: Vec<usize>,
}

mod rational_string {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Validated system of fixed-point equations plus an output expression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GfSystem {
    names: Vec<String>,
    equations: Vec<Vec<Term>>,
    output_name: String,
    output: Vec<Term>,
    default_step: usize,
}

/// Collects equations by name; [`GfSystemBuilder::build`] validates.
#[derive(Debug, Clone, Default)]
pub struct GfSystemBuilder {
    defs: Vec<(String, Vec<(BigRational, usize, Vec<String>)>)>,
    output: Option<(String, Vec<(BigRational, usize, Vec<String>)>)>,
    step: usize,
}

impl GfSystemBuilder {
    /// Adds `name = sum coef * x^k * prod(factors)`.
    pub fn equation(mut self, name: &str, terms: Vec<(BigRational, usize, Vec<&str>)>) -> Self {
        self.defs.push((name.to_string(), own(terms)));
        self
    }

    pub fn output(mut self, name: &str, terms: Vec<(BigRational, usize, Vec<&str>)>) -> Self {
        self.output = Some((name.to_string(), own(terms)));
        self
    }

    /// Natural ratio step for growth estimates (2 for bipartite walks).
    pub fn step(mut self, step: usize) -> Self {
        self.step = step;
        self
    }

    pub fn build(self) -> Result<GfSystem> {
        let inadmissible = |m: String| Err(Error::Inadmissible(m));
        if self.defs.is_empty() {
            return inadmissible("no equations".into());
        }
        let Some((output_name, output_terms)) = self.output else {
            return inadmissible("no output series".into());
        };
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, (name, _)) in self.defs.iter().enumerate() {
            if index.insert(name.as_str(), i).is_some() {
                return inadmissible(format!("{name} defined twice"));
            }
        }
        if index.contains_key(output_name.as_str()) {
            return inadmissible(format!("output {output_name} is also an unknown"));
        }
        let resolve = |terms: &[(BigRational, usize, Vec<String>)]| -> Result<Vec<Term>> {
            terms
                .iter()
                .map(|(coef, k, names)| {
                    let mut factors = names
                        .iter()
                        .map(|n| {
                            index
                                .get(n.as_str())
                                .copied()
                                .ok_or_else(|| Error::Inadmissible(format!("{n} is never defined")))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    factors.sort_unstable();
                    Ok(Term { coef: coef.clone(), x_power: *k, factors })
                })
                .collect()
        };
        let mut equations = Vec::with_capacity(self.defs.len());
        for (i, (name, terms)) in self.defs.iter().enumerate() {
            let terms = resolve(terms)?;
            for t in &terms {
                if t.x_power == 0 && t.factors.iter().any(|&f| f >= i) {
                    return inadmissible(format!(
                        "{name}: a term without a factor of x uses an unknown that is not defined earlier"
                    ));
                }
            }
            equations.push(terms);
        }
        let output = resolve(&output_terms)?;
        Ok(GfSystem {
            names: self.defs.into_iter().map(|(n, _)| n).collect(),
            equations,
            output_name,
            output,
            default_step: self.step.max(1),
        })
    }
}

fn own(terms: Vec<(BigRational, usize, Vec<&str>)>) -> Vec<(BigRational, usize, Vec<String>)> {
    terms
        .into_iter()
        .map(|(c, k, f)| (c, k, f.into_iter().map(String::from).collect()))
        .collect()
}

impl GfSystem {
    pub fn builder() -> GfSystemBuilder {
        GfSystemBuilder::default()
    }

    /// Parses the line-oriented text form (see the parser docs).
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_step(text, 1)
    }

    pub fn parse_with_step(text: &str, step: usize) -> Result<Self> {
        let defs = parse::parse_definitions(text)?;
        let mut b = GfSystem::builder().step(step);
        let mut outputs = 0;
        for d in defs {
            let terms: Vec<(BigRational, usize, Vec<String>)> =
                d.terms.into_iter().map(|t| (t.coef, t.x_power, t.factors)).collect();
            if d.is_output {
                outputs += 1;
                if outputs > 1 {
                    return Err(Error::Parse { line: d.line, msg: "second output definition".into() });
                }
                b.output = Some((d.name, terms));
            } else {
                b.defs.push((d.name, terms));
            }
        }
        b.build()
    }

    pub fn unknowns(&self) -> &[String] {
        &self.names
    }

    pub fn output_name(&self) -> &str {
        &self.output_name
    }

    pub fn default_step(&self) -> usize {
        self.default_step
    }

    /// Number of displayed equations, the output definition included.
    pub fn equation_count(&self) -> usize {
        self.equations.len() + 1
    }

    /// Terms of the equation defining `name`.
    pub fn terms(&self, name: &str) -> Option<&[Term]> {
        if name == self.output_name {
            return Some(&self.output);
        }
        let i = self.names.iter().position(|n| n == name)?;
        Some(&self.equations[i])
    }

    /// Canonical text form; parses back to an equal system.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let fmt_terms = |terms: &[Term]| -> String {
            if terms.is_empty() {
                return "0".into();
            }
            terms
                .iter()
                .map(|t| {
                    let mut parts = vec![t.coef.to_string()];
                    if t.x_power > 0 {
                        parts.push(format!("x^{}", t.x_power));
                    }
                    parts.extend(t.factors.iter().map(|&f| self.names[f].clone()));
                    parts.join("*")
                })
                .collect::<Vec<_>>()
                .join(" + ")
        };
        for (name, terms) in self.names.iter().zip(&self.equations) {
            let _ = writeln!(out, "{name} = {}", fmt_terms(terms));
        }
        let _ = writeln!(out, "{} := {}", self.output_name, fmt_terms(&self.output));
        out.replace("+ -", "- ")
    }
}

/// Every unknown and the output, solved to `order`.
pub type Solution<C> = BTreeMap<String, TruncatedSeries<C>>;

struct Solver<'a, C> {
    sys: &'a GfSystem,
    unknowns: Vec<Vec<C>>,
    // product series keyed by sorted factor list; single factors are not
    // stored (they alias the unknown)
    products: Vec<(Vec<usize>, Option<usize>, usize, Vec<C>)>,
    lookup: HashMap<Vec<usize>, usize>,
    eq_terms: Vec<Vec<(C, usize, Source)>>,
    out_terms: Vec<(C, usize, Source)>,
}

#[derive(Clone, Copy)]
enum Source {
    One,
    Unknown(usize),
    Product(usize),
}

impl<'a, C: Coeff> Solver<'a, C> {
    fn new(sys: &'a GfSystem) -> Self {
        let mut s = Solver {
            sys,
            unknowns: vec![Vec::new(); sys.names.len()],
            products: Vec::new(),
            lookup: HashMap::new(),
            eq_terms: Vec::new(),
            out_terms: Vec::new(),
        };
        s.eq_terms = sys
            .equations
            .iter()
            .map(|terms| terms.iter().map(|t| s.compile(t)).collect())
            .collect();
        s.out_terms = sys.output.iter().map(|t| s.compile(t)).collect();
        s
    }

    fn compile(&mut self, t: &Term) -> (C, usize, Source) {
        let src = match t.factors.len() {
            0 => Source::One,
            1 => Source::Unknown(t.factors[0]),
            _ => Source::Product(self.product_id(&t.factors)),
        };
        (C::from_rational(&t.coef), t.x_power, src)
    }

    fn product_id(&mut self, factors: &[usize]) -> usize {
        if let Some(&id) = self.lookup.get(factors) {
            return id;
        }
        let (head, last) = factors.split_at(factors.len() - 1);
        let parent = if head.len() >= 2 { Some(self.product_id(head)) } else { None };
        let id = self.products.len();
        self.products.push((factors.to_vec(), parent, last[0], Vec::new()));
        self.lookup.insert(factors.to_vec(), id);
        id
    }

    /// Makes product `id` available through order `t`.
    fn ensure(&mut self, id: usize, t: usize) {
        if self.products[id].3.len() > t {
            return;
        }
        let parent = self.products[id].1;
        if let Some(p) = parent {
            self.ensure(p, t);
        }
        let last = self.products[id].2;
        let first = self.products[id].0[0];
        for tt in self.products[id].3.len()..=t {
            let left: &[C] = match parent {
                Some(p) => &self.products[p].3,
                None => &self.unknowns[first],
            };
            let v = C::convolve(left, &self.unknowns[last], tt);
            self.products[id].3.push(v);
        }
    }

    fn eval(&mut self, terms_of: impl Fn(&Self) -> &[(C, usize, Source)], s: usize) -> C {
        let n = terms_of(self).len();
        let mut acc = C::zero();
        for k in 0..n {
            let (coef, q, src) = {
                let t = &terms_of(self)[k];
                (t.0.clone(), t.1, t.2)
            };
            if s < q || coef.is_zero() {
                continue;
            }
            let t = s - q;
            let v = match src {
                Source::One => {
                    if t == 0 {
                        C::one()
                    } else {
                        continue;
                    }
                }
                Source::Unknown(u) => self.unknowns[u][t].clone(),
                Source::Product(id) => {
                    self.ensure(id, t);
                    self.products[id].3[t].clone()
                }
            };
            acc = acc.add(&coef.mul(&v));
        }
        acc
    }

    fn run(mut self, order: usize) -> Solution<C> {
        for s in 0..=order {
            for i in 0..self.sys.equations.len() {
                let v = self.eval(|me| &me.eq_terms[i], s);
                self.unknowns[i].push(v);
            }
        }
        let output: Vec<C> = (0..=order).map(|s| self.eval(|me| &me.out_terms, s)).collect();
        let mut sol: Solution<C> = self
            .sys
            .names
            .iter()
            .cloned()
            .zip(self.unknowns.into_iter().map(TruncatedSeries::new))
            .collect();
        sol.insert(self.sys.output_name.clone(), TruncatedSeries::new(output));
        sol
    }
}

/// Solves every unknown and the output through `order`.
pub fn solve_gf_system<C: Coeff>(sys: &GfSystem, order: usize) -> Solution<C> {
    Solver::<C>::new(sys).run(order)
}

/// Output series only.
pub fn solve_output<C: Coeff>(sys: &GfSystem, order: usize) -> TruncatedSeries<C> {
    let mut sol = solve_gf_system::<C>(sys, order);
    sol.remove(sys.output_name()).expect("output is always present")
}

/// The built-in systems.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemKind {
    /// `c = 1 + x c^2`.
    Catalan,
    /// Closed walks on the bipartite tree with degrees `d1`, `d2`.
    Rsrb { d1: u32, d2: u32 },
    /// As `Rsrb` with `d2 - d1` loops on each degree-`d1` vertex.
    RsrbLooped { d1: u32, d2: u32 },
    /// Single-bag model, looped to degree `d2`.
    Rsr { p: BigRational, d1: u32, d2: u32 },
    /// Ring plus random matching on alternate vertices, looped to degree 3.
    SmallWorld,
}

impl SystemKind {
    /// `name` is one of catalan, rsrb, rsrb_looped, rsr, small_world.
    pub fn from_name(name: &str, d1: u32, d2: u32, p: Option<BigRational>) -> Result<Self> {
        let canonical = name.replace('-', "_");
        Ok(match canonical.as_str() {
            "catalan" => SystemKind::Catalan,
            "rsrb" => SystemKind::Rsrb { d1, d2 },
            "rsrb_looped" => SystemKind::RsrbLooped { d1, d2 },
            "rsr" => SystemKind::Rsr {
                p: p.ok_or_else(|| Error::InvalidParams("rsr system needs p".into()))?,
                d1,
                d2,
            },
            "small_world" => SystemKind::SmallWorld,
            _ => return Err(Error::UnknownSystem(name.to_string())),
        })
    }
}

fn frac(n: u32, d: u32) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// The text of a built-in system.
pub fn builtin_text(kind: &SystemKind) -> Result<String> {
    let degrees = |d1: u32, d2: u32| -> Result<()> {
        if d1 == 0 || d2 == 0 {
            return Err(Error::InvalidParams(format!("degrees must be positive, got ({d1}, {d2})")));
        }
        Ok(())
    };
    Ok(match kind {
        SystemKind::Catalan => "c = 1 + x*c^2\ncatalan := c\n".to_string(),
        SystemKind::Rsrb { d1, d2 } => {
            degrees(*d1, *d2)?;
            let (w1, w2) = (frac(*d1, d1 + d2), frac(*d2, d1 + d2));
            format!(
                "A = 1 + {a}*x^2*A*B\n\
                 B = 1 + {b}*x^2*B*A\n\
                 phiA = 1 + {d2}*x^2*phiA*A\n\
                 phiB = 1 + {d1}*x^2*phiB*B\n\
                 phi := {w1}*phiA + {w2}*phiB\n",
                a = d1 - 1,
                b = d2 - 1,
            )
        }
        SystemKind::RsrbLooped { d1, d2 } => {
            degrees(*d1, *d2)?;
            if d1 > d2 {
                return Err(Error::InvalidParams("looped systems need d1 <= d2".into()));
            }
            let (w1, w2) = (frac(*d1, d1 + d2), frac(*d2, d1 + d2));
            format!(
                "A = 1 + {g}*x*A + {a}*x^2*A*B\n\
                 B = 1 + {b}*x^2*B*A\n\
                 phiA = 1 + {d2}*x^2*phiA*A\n\
                 phiB = 1 + {g}*x*phiB + {d1}*x^2*phiB*B\n\
                 phi := {w1}*phiA + {w2}*phiB\n",
                g = d2 - d1,
                a = d1 - 1,
                b = d2 - 1,
            )
        }
        SystemKind::Rsr { p, d1, d2 } => {
            degrees(*d1, *d2)?;
            if d1 > d2 {
                return Err(Error::InvalidParams("looped systems need d1 <= d2".into()));
            }
            if *p < <BigRational as Zero>::zero() || *p > <BigRational as One>::one() {
                return Err(Error::InvalidParams(format!("p must lie in [0, 1], got {p}")));
            }
            let q = <BigRational as One>::one() - p;
            // The B line carries x^2 like every other tree step.
            format!(
                "A = 1 + {g}*x*A + {a}*x^2*A*R\n\
                 B = 1 + {b}*x^2*B*R\n\
                 R = {q}*A + {p}*B\n\
                 phiA = 1 + {g}*x*phiA + {d1}*x^2*phiA*R\n\
                 phiB = 1 + {d2}*x^2*phiB*R\n\
                 phi := {q}*phiA + {p}*phiB\n",
                g = d2 - d1,
                a = d1 - 1,
                b = d2 - 1,
            )
        }
        SystemKind::SmallWorld => "A = 1 + x^2*A*Ahat + x^2*A*B\n\
             Ahat = 1 + 2*x^2*Ahat*B\n\
             B = 1 + x*B + x^2*A*B\n\
             phio = 1 + x^2*phio*Ahat + 2*x^2*phio*B\n\
             phie = 1 + x*phie + 2*x^2*phie*A\n\
             phi := 1/2*phio + 1/2*phie\n"
            .to_string(),
    })
}

pub fn builtin_system(kind: &SystemKind) -> Result<GfSystem> {
    let step = if matches!(kind, SystemKind::Rsrb { .. }) { 2 } else { 1 };
    GfSystem::parse_with_step(&builtin_text(kind)?, step)
}

/// `c_{top}/c_{top-step}` corrected by `((s+step)/s)^{3/2}` with `s =
/// top - step`, which removes the leading `s^{-3/2}` factor of a square-root
/// singularity; returns the step-th root, the per-order growth rate.
///
/// `top` is the order `N`, or `N - 1` when `step = 2` and `c_N` is zero
/// (odd order of an even series).
pub fn growth_rate<C: Coeff>(series: &TruncatedSeries<C>, step: usize) -> Result<f64> {
    let (top, s) = tail_indices(series, step)?;
    let ratio = series.coeff(top).ratio(series.coeff(s));
    let corr = ((s + step) as f64 / s as f64).powf(1.5);
    Ok((ratio * corr).powf(1.0 / step as f64))
}

/// Richardson extrapolation of the uncorrected ratio sequence, assuming
/// `r_s = lambda (1 + a/s + O(1/s^2))`. Used when the square-root
/// assumption is in doubt.
pub fn growth_rate_richardson<C: Coeff>(series: &TruncatedSeries<C>, step: usize) -> Result<f64> {
    let (top, s) = tail_indices(series, step)?;
    if s < step + 1 {
        return Err(Error::NonPositiveTail(s));
    }
    let prev = s - step;
    if !series.coeff(prev).is_positive() {
        return Err(Error::NonPositiveTail(prev));
    }
    let inv = 1.0 / step as f64;
    let r_top = series.coeff(top).ratio(series.coeff(s)).powf(inv);
    let r_prev = series.coeff(s).ratio(series.coeff(prev)).powf(inv);
    let (a, b) = (top as f64, s as f64);
    Ok((a * r_top - b * r_prev) / (a - b))
}

fn tail_indices<C: Coeff>(series: &TruncatedSeries<C>, step: usize) -> Result<(usize, usize)> {
    if step == 0 {
        return Err(Error::InvalidParams("step must be positive".into()));
    }
    let mut top = series.order();
    if step == 2 && series.coeff(top).is_zero() && top > 0 {
        top -= 1;
    }
    if top <= step {
        return Err(Error::InvalidParams(format!("order {} too small for step {step}", series.order())));
    }
    let s = top - step;
    for i in [top, s] {
        if !series.coeff(i).is_positive() {
            return Err(Error::NonPositiveTail(i));
        }
    }
    Ok((top, s))
}
