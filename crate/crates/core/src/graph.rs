//! Multigraphs with loops, and the deterministic algorithms run on them.
//!
//! Degree convention: a non-loop edge adds 1 to the degree of each endpoint
//! and a self-loop adds 1 to the degree of its vertex. The adjacency matrix
//! follows the same convention (a loop puts 1 on the diagonal), so row sums
//! equal degrees. The Laplacian ignores loops entirely.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rand::Rng;

use crate::dsu::DisjointSet;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Vertex count plus an edge multiset. Edge order is preserved as given so
/// that generators and CSV export are reproducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

/// Degree value -> number of vertices with that degree.
pub type DegreeHistogram = BTreeMap<usize, usize>;

/// Edges per vertex as `(neighbor, edge index)`; a loop appears once.
pub type AdjacencyList = Vec<Vec<(usize, usize)>>;

impl Multigraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= n || v >= n) {
            return Err(Error::InvalidParams(format!(
                "edge ({u},{v}) has an endpoint outside 0..{n}"
            )));
        }
        Ok(Multigraph { n, edges })
    }

    /// For callers that construct edges by index arithmetic.
    pub(crate) fn from_trusted(n: usize, edges: Vec<(usize, usize)>) -> Self {
        debug_assert!(edges.iter().all(|&(u, v)| u < n && v < n));
        Multigraph { n, edges }
    }

    pub fn empty(n: usize) -> Self {
        Multigraph {
            n,
            edges: Vec::new(),
        }
    }

    pub fn cycle(n: usize) -> Self {
        let edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Multigraph { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|(u, v)| u == v).count()
    }

    /// Same graph with `count` extra loops at vertex `v`.
    pub fn with_loops(&self, v: usize, count: usize) -> Result<Self> {
        if v >= self.n {
            return Err(Error::InvalidParams(format!("vertex {v} out of range")));
        }
        let mut g = self.clone();
        g.edges.extend(std::iter::repeat_n((v, v), count));
        Ok(g)
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            if u != v {
                deg[v] += 1;
            }
        }
        deg
    }

    /// Edge endpoints at each vertex with a loop counted twice. This is the
    /// stub count a configuration pairing starts from, and the quantity a
    /// double-edge swap preserves.
    pub fn stub_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn degree_histogram(&self) -> DegreeHistogram {
        let mut h = DegreeHistogram::new();
        for d in self.degree_sequence() {
            *h.entry(d).or_insert(0) += 1;
        }
        h
    }

    pub fn adjacency_list(&self) -> AdjacencyList {
        let mut adj = vec![Vec::new(); self.n];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            adj[u].push((v, e));
            if u != v {
                adj[v].push((u, e));
            }
        }
        adj
    }

    /// A(u,v) = multiplicity of (u,v) for u != v; A(v,v) = number of loops at v.
    pub fn adjacency(&self) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(self.n);
        for &(u, v) in &self.edges {
            a[(u, v)] += 1.0;
            if u != v {
                a[(v, u)] += 1.0;
            }
        }
        a
    }

    /// L = D - A over non-loop edges, multi-edges counted with multiplicity.
    pub fn laplacian(&self) -> DenseMatrix {
        let mut l = DenseMatrix::zeros(self.n);
        for &(u, v) in &self.edges {
            if u == v {
                continue;
            }
            l[(u, u)] += 1.0;
            l[(v, v)] += 1.0;
            l[(u, v)] -= 1.0;
            l[(v, u)] -= 1.0;
        }
        l
    }

    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut dsu = DisjointSet::new(self.n);
        for &(u, v) in &self.edges {
            dsu.union(u, v);
            if dsu.components() == 1 {
                return true;
            }
        }
        dsu.components() == 1
    }

    /// Length of the shortest cycle; `None` for forests. A loop is a cycle of
    /// length 1 and a repeated edge a cycle of length 2.
    pub fn girth(&self) -> Option<usize> {
        if self.loop_count() > 0 {
            return Some(1);
        }
        if self.has_multi_edge() {
            return Some(2);
        }
        let adj = self.adjacency_list();
        let mut best = usize::MAX;
        let mut dist = vec![usize::MAX; self.n];
        let mut via = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        for root in 0..self.n {
            let mut touched = vec![root];
            dist[root] = 0;
            queue.clear();
            queue.push_back(root);
            'bfs: while let Some(u) = queue.pop_front() {
                if 2 * dist[u] + 1 >= best {
                    break;
                }
                for &(w, e) in &adj[u] {
                    if e == via[u] {
                        continue;
                    }
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        via[w] = e;
                        touched.push(w);
                        queue.push_back(w);
                    } else {
                        best = best.min(dist[u] + dist[w] + 1);
                        if best == 3 {
                            break 'bfs;
                        }
                    }
                }
            }
            for v in touched {
                dist[v] = usize::MAX;
                via[v] = usize::MAX;
            }
            if best == 3 {
                break;
            }
        }
        (best != usize::MAX).then_some(best)
    }

    fn has_multi_edge(&self) -> bool {
        let mut seen = HashMap::with_capacity(self.edges.len());
        self.edges
            .iter()
            .filter(|(u, v)| u != v)
            .any(|&(u, v)| seen.insert((u.min(v), u.max(v)), ()).is_some())
    }

    pub fn is_simple(&self) -> bool {
        self.loop_count() == 0 && !self.has_multi_edge()
    }

    /// Inserts a new vertex in the middle of every edge. Edge `e = (u,v)`
    /// becomes `(u, n+e), (n+e, v)`.
    pub fn subdivide(&self) -> Result<Self> {
        if self.loop_count() > 0 {
            return Err(Error::LoopsPresent("subdivision"));
        }
        let mut edges = Vec::with_capacity(2 * self.m());
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            let mid = self.n + e;
            edges.push((u, mid));
            edges.push((mid, v));
        }
        Ok(Multigraph::from_trusted(self.n + self.m(), edges))
    }

    /// Removes every degree-2 vertex, joining the two ends of each maximal
    /// chain of degree-2 vertices by one edge. Surviving vertices keep their
    /// relative order.
    pub fn contract_degree2(&self) -> Result<Self> {
        if self.loop_count() > 0 {
            return Err(Error::LoopsPresent("degree-2 contraction"));
        }
        let deg = self.degree_sequence();
        let adj = self.adjacency_list();
        let mut new_id = vec![usize::MAX; self.n];
        let mut next = 0;
        for v in 0..self.n {
            if deg[v] != 2 {
                new_id[v] = next;
                next += 1;
            }
        }
        let mut used = vec![false; self.m()];
        let mut visited = vec![false; self.n];
        let mut edges = Vec::new();
        for (start_edge, &(u, v)) in self.edges.iter().enumerate() {
            if used[start_edge] {
                continue;
            }
            // Walk the chain in both directions from this edge.
            let (a, a_edge) = self.walk_chain(&adj, &deg, u, start_edge, &mut used, &mut visited);
            let (b, _) = self.walk_chain(&adj, &deg, v, start_edge, &mut used, &mut visited);
            used[start_edge] = true;
            match (a, b) {
                (Some(a), Some(b)) if a != b => edges.push((new_id[a], new_id[b])),
                (Some(a), Some(_)) => {
                    return Err(Error::Contraction(format!(
                        "chain through edge {a_edge} returns to vertex {a}, contraction would create a loop"
                    )))
                }
                _ => {
                    return Err(Error::Contraction(
                        "a cycle consists only of degree-2 vertices".into(),
                    ))
                }
            }
        }
        Ok(Multigraph::from_trusted(next, edges))
    }

    /// Follows degree-2 vertices starting at `from`, having arrived via
    /// `edge`. Returns the first non-degree-2 vertex reached (or `None` if
    /// the walk closes a cycle of degree-2 vertices).
    fn walk_chain(
        &self,
        adj: &AdjacencyList,
        deg: &[usize],
        mut from: usize,
        mut edge: usize,
        used: &mut [bool],
        visited: &mut [bool],
    ) -> (Option<usize>, usize) {
        while deg[from] == 2 {
            if visited[from] {
                return (None, edge);
            }
            visited[from] = true;
            let Some(&(next, e)) = adj[from].iter().find(|&&(_, e)| e != edge) else {
                return (None, edge);
            };
            used[e] = true;
            edge = e;
            from = next;
        }
        (Some(from), edge)
    }

    /// Double-edge swaps until no loops or repeated edges remain. Each swap
    /// takes an offending edge `(a,b)` and a uniformly random other edge
    /// `(c,d)` and replaces them by `(a,d)` and `(c,b)`. Stub degrees and the
    /// edge count are preserved (so [`Self::degree_sequence`] is too on
    /// loopless input), and so is bipartiteness when every edge is stored
    /// with its part-1 endpoint first.
    ///
    /// Swaps are accepted unconditionally until the offence count has failed
    /// to decrease for 50 consecutive attempts; from then on only decreasing
    /// swaps are accepted. Gives up after `100 * m` attempts.
    pub fn rewire_to_simple<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Self> {
        const STALL_LIMIT: usize = 50;
        let m = self.m();
        let mut edges = self.edges.clone();
        let mut counts: HashMap<(usize, usize), u32> = HashMap::with_capacity(m);
        for &e in &edges {
            *counts.entry(key(e)).or_insert(0) += 1;
        }
        let mut offences = offence_total(&counts);
        if offences == 0 {
            return Ok(self.clone());
        }
        let max_attempts = 100 * m;
        let mut stall = 0;
        let mut bad = Vec::new();
        for _ in 0..max_attempts {
            bad.clear();
            bad.extend((0..m).filter(|&i| is_offending(edges[i], &counts)));
            if bad.is_empty() {
                return Ok(Multigraph::from_trusted(self.n, edges));
            }
            if m < 2 {
                break;
            }
            let i = bad[rng.random_range(0..bad.len())];
            let mut j = rng.random_range(0..m - 1);
            if j >= i {
                j += 1;
            }
            let ((a, b), (c, d)) = (edges[i], edges[j]);
            let (new_i, new_j) = ((a, d), (c, b));

            let before = local_offences(&counts, &[edges[i], edges[j], new_i, new_j]);
            apply(&mut counts, edges[i], -1);
            apply(&mut counts, edges[j], -1);
            apply(&mut counts, new_i, 1);
            apply(&mut counts, new_j, 1);
            let after = local_offences(&counts, &[edges[i], edges[j], new_i, new_j]);
            let decreased = after < before;

            if stall >= STALL_LIMIT && !decreased {
                apply(&mut counts, new_i, -1);
                apply(&mut counts, new_j, -1);
                apply(&mut counts, edges[i], 1);
                apply(&mut counts, edges[j], 1);
                stall += 1;
                continue;
            }
            offences = offences + after - before;
            edges[i] = new_i;
            edges[j] = new_j;
            stall = if decreased { 0 } else { stall + 1 };
        }
        if (0..m).all(|i| !is_offending(edges[i], &counts)) {
            return Ok(Multigraph::from_trusted(self.n, edges));
        }
        Err(Error::RewireFailed {
            attempts: max_attempts,
            remaining: offences,
        })
    }

    /// phi_s = trace(A^s)/n for s = 0..=s_max, by repeated sparse
    /// matrix-vector products from every unit vector.
    pub fn closed_walk_counts(&self, s_max: usize) -> Vec<f64> {
        let mut phi = vec![0.0; s_max + 1];
        if self.n == 0 {
            return phi;
        }
        phi[0] = 1.0;
        let weighted = self.weighted_adjacency();
        let mut x = vec![0.0; self.n];
        let mut y = vec![0.0; self.n];
        for start in 0..self.n {
            x.iter_mut().for_each(|v| *v = 0.0);
            x[start] = 1.0;
            for s in 1..=s_max {
                for (u, row) in weighted.iter().enumerate() {
                    y[u] = row.iter().map(|&(w, mult)| mult * x[w]).sum();
                }
                std::mem::swap(&mut x, &mut y);
                phi[s] += x[start];
            }
        }
        let n = self.n as f64;
        for p in phi.iter_mut().skip(1) {
            *p /= n;
        }
        phi
    }

    /// Rows of A as (column, entry) pairs with repeated edges merged.
    fn weighted_adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); self.n];
        for &(u, v) in &self.edges {
            *rows[u].entry(v).or_insert(0.0) += 1.0;
            if u != v {
                *rows[v].entry(u).or_insert(0.0) += 1.0;
            }
        }
        rows.into_iter().map(|r| r.into_iter().collect()).collect()
    }
}

fn key((u, v): (usize, usize)) -> (usize, usize) {
    (u.min(v), u.max(v))
}

fn is_offending(e: (usize, usize), counts: &HashMap<(usize, usize), u32>) -> bool {
    e.0 == e.1 || counts.get(&key(e)).copied().unwrap_or(0) > 1
}

fn offence_of(k: (usize, usize), c: u32) -> usize {
    if k.0 == k.1 {
        c as usize
    } else {
        c.saturating_sub(1) as usize
    }
}

fn offence_total(counts: &HashMap<(usize, usize), u32>) -> usize {
    counts.iter().map(|(&k, &c)| offence_of(k, c)).sum()
}

fn local_offences(counts: &HashMap<(usize, usize), u32>, touched: &[(usize, usize)]) -> usize {
    let mut keys: Vec<_> = touched.iter().map(|&e| key(e)).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.iter()
        .map(|k| offence_of(*k, counts.get(k).copied().unwrap_or(0)))
        .sum()
}

fn apply(counts: &mut HashMap<(usize, usize), u32>, e: (usize, usize), delta: i32) {
    let c = counts.entry(key(e)).or_insert(0);
    *c = (*c as i32 + delta) as u32;
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(n: usize, e: &[(usize, usize)]) -> Multigraph {
        Multigraph::new(n, e.to_vec()).unwrap()
    }

    fn complete(n: usize) -> Multigraph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        g(n, &e)
    }

    #[test]
    fn rejects_out_of_range_endpoints() {
        assert!(Multigraph::new(2, vec![(0, 2)]).is_err());
    }

    #[test]
    fn degrees_follow_loop_convention() {
        assert_eq!(Multigraph::cycle(4).degree_sequence(), vec![2, 2, 2, 2]);
        assert_eq!(g(1, &[(0, 0)]).degree_sequence(), vec![1]);
        let h = g(3, &[(0, 1), (0, 1), (2, 2)]).degree_histogram();
        assert_eq!(h.get(&2), Some(&2));
        assert_eq!(h.get(&1), Some(&1));
        assert_eq!(h.values().sum::<usize>(), 3);
    }

    #[test]
    fn adjacency_counts_multiplicity_and_loops() {
        let a = g(2, &[(0, 1)]).adjacency();
        assert_eq!(a, DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]));
        let a = g(2, &[(0, 1), (1, 0)]).adjacency();
        assert_eq!(a, DenseMatrix::from_rows(&[vec![0.0, 2.0], vec![2.0, 0.0]]));
        let a = g(1, &[(0, 0)]).adjacency();
        assert_eq!(a, DenseMatrix::from_rows(&[vec![1.0]]));
    }

    #[test]
    fn laplacian_ignores_loops() {
        let l = g(2, &[(0, 1)]).laplacian();
        assert_eq!(l, DenseMatrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]));
        let c4 = Multigraph::cycle(4);
        let l = c4.laplacian();
        for i in 0..4 {
            assert_eq!(l[(i, i)], 2.0);
            assert_eq!(l[(i, (i + 1) % 4)], -1.0);
            assert_eq!(l[(i, (i + 2) % 4)], 0.0);
        }
        let looped = c4.with_loops(2, 3).unwrap().with_loops(0, 1).unwrap();
        assert_eq!(looped.laplacian(), l);
    }

    #[test]
    fn connectivity() {
        assert!(Multigraph::cycle(5).is_connected());
        assert!(!g(4, &[(0, 1), (2, 3)]).is_connected());
        let k25 = g(7, &[(0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (1, 2), (1, 3), (1, 4), (1, 5), (1, 6)]);
        assert!(k25.is_connected());
        assert!(Multigraph::empty(1).is_connected());
    }

    #[test]
    fn girth_cases() {
        assert_eq!(Multigraph::cycle(5).girth(), Some(5));
        let mut k33 = Vec::new();
        for i in 0..3 {
            for j in 3..6 {
                k33.push((i, j));
            }
        }
        assert_eq!(g(6, &k33).girth(), Some(4));
        let tree = g(7, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]);
        assert_eq!(tree.girth(), None);
        assert_eq!(g(2, &[(0, 1), (0, 1)]).girth(), Some(2));
        assert_eq!(g(2, &[(0, 1), (1, 1)]).girth(), Some(1));
        assert_eq!(complete(4).girth(), Some(3));
    }

    #[test]
    fn subdivision_doubles_girth() {
        let c3 = Multigraph::cycle(3);
        let s = c3.subdivide().unwrap();
        assert_eq!(s.n(), 6);
        assert_eq!(s.m(), 6);
        assert_eq!(s.girth(), Some(6));
        assert!(g(1, &[(0, 0)]).subdivide().is_err());
        let k4 = complete(4).subdivide().unwrap();
        assert_eq!(k4.n(), 4 + 6);
        assert!(k4.degree_sequence()[4..].iter().all(|&d| d == 2));
    }

    #[test]
    fn contraction_inverts_subdivision() {
        let k4 = complete(4);
        let back = k4.subdivide().unwrap().contract_degree2().unwrap();
        assert_eq!(back, k4);
    }

    #[test]
    fn contraction_rejects_degenerate_inputs() {
        assert!(matches!(Multigraph::cycle(6).contract_degree2(), Err(Error::Contraction(_))));
        // vertex 2 sits on a 2-cycle with vertex 0
        let two_cycle = g(4, &[(0, 2), (2, 0), (0, 1), (0, 3), (1, 3), (1, 3)]);
        assert!(two_cycle.contract_degree2().is_err());
    }

    #[test]
    fn contraction_follows_chains() {
        // star center 0 with a path of two degree-2 vertices to vertex 3
        let h = g(6, &[(0, 1), (1, 2), (2, 3), (0, 4), (0, 5), (3, 4), (3, 5)]);
        let c = h.contract_degree2().unwrap();
        assert_eq!(c.n(), 2);
        assert_eq!(c.m(), 3);
        assert_eq!(c.degree_sequence(), vec![3, 3]);
    }

    #[test]
    fn rewire_keeps_simple_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k4 = complete(4);
        assert_eq!(k4.rewire_to_simple(&mut rng).unwrap(), k4);
    }

    #[test]
    fn rewire_removes_offences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // two triangles plus a doubled edge and a loop
        let h = g(
            8,
            &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (6, 7), (6, 7), (0, 0), (3, 6), (4, 7), (1, 5)],
        );
        let s = h.rewire_to_simple(&mut rng).unwrap();
        assert!(s.is_simple());
        assert_eq!(s.stub_degrees(), h.stub_degrees());
        assert_eq!(s.m(), h.m());
    }

    #[test]
    fn rewire_reports_impossible_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        // three degree-2 vertices all attached twice to one degree-6 vertex
        let h = g(4, &[(0, 3), (1, 3), (2, 3), (0, 3), (1, 3), (2, 3)]);
        assert!(matches!(h.rewire_to_simple(&mut rng), Err(Error::RewireFailed { .. })));
    }

    #[test]
    fn closed_walks_basic() {
        let c5 = Multigraph::cycle(5);
        let phi = c5.closed_walk_counts(4);
        assert_eq!(phi[0], 1.0);
        assert_eq!(phi[1], 0.0);
        assert_eq!(phi[2], 2.0);
        assert_eq!(phi[4], 6.0);
        let lone = g(1, &[(0, 0)]).closed_walk_counts(6);
        assert!(lone.iter().all(|&p| p == 1.0));
    }
}
