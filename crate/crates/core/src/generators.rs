//! Seeded random graph constructors.
//!
//! All random models are stub matchings: each vertex contributes one stub
//! per unit of target degree, a bag of stubs is shuffled, and stubs are
//! paired positionally.

use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::asymptotics;
use crate::error::{invalid, Result};
use crate::graph::Multigraph;

/// Bipartite model: `n1` vertices of degree `d1` (labels `0..n1`) and
/// `n2 = n1 d1 / d2` vertices of degree `d2` (labels `n1..n1+n2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RsrbParams {
    pub d1: u32,
    pub d2: u32,
    pub n1: usize,
}

impl RsrbParams {
    pub fn new(d1: u32, d2: u32, n1: usize) -> Result<Self> {
        if d1 == 0 || d2 == 0 {
            return invalid(format!("RSRB degrees must be positive, got ({d1}, {d2})"));
        }
        if n1 == 0 {
            return invalid("RSRB needs n1 >= 1");
        }
        if (n1 * d1 as usize) % d2 as usize != 0 {
            return invalid(format!("RSRB: n1*d1 = {} is not divisible by d2 = {d2}", n1 * d1 as usize));
        }
        Ok(RsrbParams { d1, d2, n1 })
    }

    /// Exactly `n` vertices; `n d2 / (d1 + d2)` must be a valid `n1`.
    pub fn with_vertices(d1: u32, d2: u32, n: usize) -> Result<Self> {
        let total = (d1 + d2) as usize;
        if d1 == 0 || d2 == 0 || (n * d2 as usize) % total != 0 {
            return invalid(format!(
                "RSRB({d1},{d2}) cannot have exactly {n} vertices: n*d2/(d1+d2) is not an integer"
            ));
        }
        Self::new(d1, d2, n * d2 as usize / total)
    }

    /// Valid parameters whose `n1` is nearest to `n d2 / (d1 + d2)` (ties
    /// go down), so the vertex count is as close to `n` as divisibility
    /// allows.
    pub fn nearest(d1: u32, d2: u32, n: usize) -> Result<Self> {
        if d1 == 0 || d2 == 0 {
            return invalid(format!("RSRB degrees must be positive, got ({d1}, {d2})"));
        }
        let unit = (d2 / d1.gcd(&d2)) as usize;
        let target = n as f64 * d2 as f64 / (d1 + d2) as f64;
        let below = ((target / unit as f64).floor() as usize).max(1);
        let pick = if (target - (below * unit) as f64) <= ((below + 1) * unit) as f64 - target {
            below
        } else {
            below + 1
        };
        Self::new(d1, d2, pick * unit)
    }

    pub fn n2(&self) -> usize {
        self.n1 * self.d1 as usize / self.d2 as usize
    }

    pub fn n(&self) -> usize {
        self.n1 + self.n2()
    }

    pub fn m(&self) -> usize {
        self.n1 * self.d1 as usize
    }

    pub fn average_degree(&self) -> f64 {
        2.0 * (self.d1 * self.d2) as f64 / (self.d1 + self.d2) as f64
    }
}

/// Single-bag model: `n1 = floor((1-p) n)` vertices of degree `d1`, the rest
/// of degree `d2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RsrParams {
    pub p: f64,
    pub d1: u32,
    pub d2: u32,
    pub n: usize,
}

impl RsrParams {
    pub fn new(p: f64, d1: u32, d2: u32, n: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return invalid(format!("RSR: p must lie in [0, 1], got {p}"));
        }
        if d1 == 0 || d2 == 0 {
            return invalid(format!("RSR degrees must be positive, got ({d1}, {d2})"));
        }
        if n < 2 {
            return invalid("RSR needs n >= 2");
        }
        Ok(RsrParams { p, d1, d2, n })
    }

    /// `floor((1-p) n)`, with a 1e-9 allowance so that products such as
    /// `0.6 * 50` land on the intended integer.
    pub fn n1(&self) -> usize {
        (((1.0 - self.p) * self.n as f64) + 1e-9).floor() as usize
    }

    pub fn n2(&self) -> usize {
        self.n - self.n1()
    }

    pub fn stubs(&self) -> usize {
        self.n1() * self.d1 as usize + self.n2() * self.d2 as usize
    }

    pub fn average_degree(&self) -> f64 {
        self.stubs() as f64 / self.n as f64
    }
}

/// Ring on `n` vertices plus a random perfect matching of the even labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmallWorldParams {
    pub n: usize,
}

impl SmallWorldParams {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n % 4 != 0 {
            return invalid(format!("small-world ring size must be a positive multiple of 4, got {n}"));
        }
        Ok(SmallWorldParams { n })
    }
}

/// Any of the random families, for ensemble runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ModelParams {
    Rsrb(RsrbParams),
    Rsr(RsrParams),
    Regular { d: u32, n: usize },
    SmallWorld(SmallWorldParams),
}

impl ModelParams {
    pub fn name(&self) -> &'static str {
        match self {
            ModelParams::Rsrb(_) => "rsrb",
            ModelParams::Rsr(_) => "rsr",
            ModelParams::Regular { .. } => "regular",
            ModelParams::SmallWorld(_) => "small-world",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            ModelParams::Rsrb(p) => p.n(),
            ModelParams::Rsr(p) => p.n,
            ModelParams::Regular { n, .. } => *n,
            ModelParams::SmallWorld(p) => p.n,
        }
    }

    pub fn average_degree(&self) -> f64 {
        match self {
            ModelParams::Rsrb(p) => p.average_degree(),
            ModelParams::Rsr(p) => p.average_degree(),
            ModelParams::Regular { d, .. } => *d as f64,
            ModelParams::SmallWorld(_) => 2.5,
        }
    }

    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Multigraph> {
        match self {
            ModelParams::Rsrb(p) => Ok(generate_rsrb(p, rng)),
            ModelParams::Rsr(p) => Ok(generate_rsr(p, rng).graph),
            ModelParams::Regular { d, n } => generate_regular(*d, *n, rng),
            ModelParams::SmallWorld(p) => Ok(generate_small_world(p, rng)),
        }
    }

    /// Large-n algebraic connectivity predicted for the family.
    pub fn mu_asymptotic(&self) -> Result<f64> {
        match self {
            ModelParams::Rsrb(p) => asymptotics::mu_rsrb(p.d1, p.d2),
            ModelParams::Rsr(p) => asymptotics::mu_rsr(p.p, p.d1, p.d2),
            ModelParams::Regular { d, .. } => asymptotics::mu_regular(*d),
            ModelParams::SmallWorld(_) => asymptotics::mu_small_world(),
        }
    }
}

/// Base seed for a family of per-trial streams.
///
/// Trial `i` uses a ChaCha8 generator seeded with `mix(base, i) =
/// splitmix64(base ^ splitmix64(i + 0x9e3779b97f4a7c15))`, where
/// `splitmix64` is the standard 64-bit finalizer. Streams depend only on
/// `(base, i)`, never on scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub base: u64,
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngSeed {
    pub fn new(base: u64) -> Self {
        RngSeed { base }
    }

    pub fn mix(&self, i: u64) -> u64 {
        splitmix64(self.base ^ splitmix64(i.wrapping_add(0x9e37_79b9_7f4a_7c15)))
    }

    pub fn stream(&self, i: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.mix(i))
    }
}

fn stub_bag(first: usize, count: usize, degree: u32) -> impl Iterator<Item = usize> {
    (0..degree as usize).flat_map(move |_| first..first + count)
}

pub fn generate_rsrb<R: Rng + ?Sized>(params: &RsrbParams, rng: &mut R) -> Multigraph {
    let n1 = params.n1;
    let n2 = params.n2();
    let bag1: Vec<usize> = stub_bag(0, n1, params.d1).collect();
    let mut bag2: Vec<usize> = stub_bag(n1, n2, params.d2).collect();
    bag2.shuffle(rng);
    let edges = bag1.into_iter().zip(bag2).collect();
    Multigraph::from_trusted(n1 + n2, edges)
}

/// Output of [`generate_rsr`].
#[derive(Debug, Clone, PartialEq)]
pub struct RsrGraph {
    pub graph: Multigraph,
    /// Vertex left one short of its degree when the stub count is odd.
    pub short_vertex: Option<usize>,
}

pub fn generate_rsr<R: Rng + ?Sized>(params: &RsrParams, rng: &mut R) -> RsrGraph {
    let n1 = params.n1();
    let n2 = params.n2();
    let mut bag: Vec<usize> = stub_bag(0, n1, params.d1).chain(stub_bag(n1, n2, params.d2)).collect();
    bag.shuffle(rng);
    let short_vertex = if bag.len() % 2 == 1 { bag.pop() } else { None };
    let half = bag.len() / 2;
    let edges = (0..half).map(|k| (bag[k], bag[half + k])).collect();
    RsrGraph { graph: Multigraph::from_trusted(params.n, edges), short_vertex }
}

/// Configuration-model `d`-regular multigraph.
pub fn generate_regular<R: Rng + ?Sized>(d: u32, n: usize, rng: &mut R) -> Result<Multigraph> {
    if d == 0 || n == 0 {
        return invalid(format!("regular graph needs d, n >= 1, got d={d}, n={n}"));
    }
    if (n * d as usize) % 2 == 1 {
        return invalid(format!("regular graph needs n*d even, got n={n}, d={d}"));
    }
    let mut bag: Vec<usize> = stub_bag(0, n, d).collect();
    bag.shuffle(rng);
    let half = bag.len() / 2;
    let edges = (0..half).map(|k| (bag[k], bag[half + k])).collect();
    Ok(Multigraph::from_trusted(n, edges))
}

pub fn generate_small_world<R: Rng + ?Sized>(params: &SmallWorldParams, rng: &mut R) -> Multigraph {
    let n = params.n;
    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let mut bag: Vec<usize> = (0..n).step_by(2).collect();
    bag.shuffle(rng);
    let half = bag.len() / 2;
    edges.extend((0..half).map(|k| (bag[k], bag[half + k])));
    Multigraph::from_trusted(n, edges)
}

/// `K(b, n-b)`: parts `0..b` and `b..n`.
pub fn complete_bipartite(b: usize, n: usize) -> Result<Multigraph> {
    if b == 0 || b >= n {
        return invalid(format!("complete bipartite needs 1 <= b < n, got b={b}, n={n}"));
    }
    let edges = (0..b).flat_map(|i| (b..n).map(move |j| (i, j))).collect();
    Ok(Multigraph::from_trusted(n, edges))
}

/// Pairs `2 <= d1 <= d2` with `2 d1 d2 / (d1 + d2) = d`, by decreasing `d1`.
pub fn integer_pairs(d: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for d1 in (2..=d).rev() {
        let den = 2 * d1 as i64 - d as i64;
        if den <= 0 {
            continue;
        }
        let num = d as i64 * d1 as i64;
        if num % den == 0 {
            let d2 = (num / den) as u32;
            if d2 >= d1 {
                out.push((d1, d2));
            }
        }
    }
    out
}
