//! Weighted undirected graphs viewed as electric networks.
//!
//! Edge weights are conductances. Boundary edges hang off a single vertex and
//! are not part of the edge set: they never contribute to the total weight,
//! the Laplacian, or the classical random walk. They only matter to the
//! quantum walk's edge space.

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// An undirected graph with positive edge weights and optional boundary
/// weights `w_{u,∅}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphWire", into = "GraphWire")]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    boundary: BTreeMap<usize, f64>,
}

#[derive(Serialize, Deserialize)]
struct GraphWire {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    #[serde(default)]
    boundary: BTreeMap<usize, f64>,
}

impl TryFrom<GraphWire> for WeightedGraph {
    type Error = Error;

    fn try_from(w: GraphWire) -> Result<Self> {
        let edges = w
            .edges
            .into_iter()
            .map(|(u, v, weight)| Edge { u, v, weight })
            .collect();
        WeightedGraph::new(w.n, edges, w.boundary)
    }
}

impl From<WeightedGraph> for GraphWire {
    fn from(g: WeightedGraph) -> Self {
        GraphWire {
            n: g.n,
            edges: g.edges.iter().map(|e| (e.u, e.v, e.weight)).collect(),
            boundary: g.boundary,
        }
    }
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<Edge>, boundary: BTreeMap<usize, f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGraph(format!(
                "need at least 2 vertices, got {n}"
            )));
        }
        if edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        for e in &edges {
            if e.u >= n || e.v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) has an endpoint outside 0..{n}",
                    e.u, e.v
                )));
            }
            if e.u == e.v {
                return Err(Error::InvalidGraph(format!("self-loop at {}", e.u)));
            }
            if !(e.weight.is_finite() && e.weight > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) has non-positive weight {}",
                    e.u, e.v, e.weight
                )));
            }
        }
        let mut kept = BTreeMap::new();
        for (v, w) in boundary {
            if v >= n {
                return Err(Error::InvalidGraph(format!(
                    "boundary vertex {v} outside 0..{n}"
                )));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidGraph(format!("boundary weight {w} at {v}")));
            }
            if w > 0.0 {
                kept.insert(v, w);
            }
        }
        Ok(Self {
            n,
            edges,
            boundary: kept,
        })
    }

    /// Builds a graph from `(u, v, w)` triples with no boundary edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let edges = edges
            .iter()
            .map(|&(u, v, weight)| Edge { u, v, weight })
            .collect();
        Self::new(n, edges, BTreeMap::new())
    }

    /// The path `0 – 1 – … – (len)` with the given edge weights.
    pub fn path(weights: &[f64], boundary: BTreeMap<usize, f64>) -> Result<Self> {
        let edges = weights
            .iter()
            .enumerate()
            .map(|(i, &weight)| Edge {
                u: i,
                v: i + 1,
                weight,
            })
            .collect();
        Self::new(weights.len() + 1, edges, boundary)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("infallible")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn boundary(&self) -> &BTreeMap<usize, f64> {
        &self.boundary
    }

    pub fn boundary_weight(&self, v: usize) -> f64 {
        self.boundary.get(&v).copied().unwrap_or(0.0)
    }

    pub fn has_boundary(&self) -> bool {
        !self.boundary.is_empty()
    }

    /// `W(G)`: sum of internal edge weights.
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Weighted degree over internal edges.
    pub fn degree(&self, v: usize) -> f64 {
        self.edges
            .iter()
            .filter(|e| e.u == v || e.v == v)
            .map(|e| e.weight)
            .sum()
    }

    /// Adjacency lists of `(neighbor, edge index)`.
    pub(crate) fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.u].push((e.v, i));
            adj[e.v].push((e.u, i));
        }
        adj
    }

    /// Vertices reachable from `start`, in BFS order.
    pub fn component_of(&self, start: usize) -> Vec<usize> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut order = vec![start];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    order.push(v);
                    queue.push_back(v);
                }
            }
        }
        order
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            return Err(Error::IndexOutOfRange {
                index: v,
                dim: self.n,
            });
        }
        Ok(())
    }

    /// Component of `t`, checked to contain `s`.
    fn shared_component(&self, s: usize, t: usize) -> Result<Vec<usize>> {
        self.check_vertex(s)?;
        self.check_vertex(t)?;
        let comp = self.component_of(t);
        if !comp.contains(&s) {
            return Err(Error::Disconnected { s, t });
        }
        Ok(comp)
    }

    /// Solves `L_red x = rhs` where `L_red` is the Laplacian of `comp` with
    /// the row and column of `ground` removed. Returns `x` indexed by vertex
    /// (zero at `ground` and outside `comp`).
    ///
    /// Elimination keeps the Schur complements in Laplacian form (pairwise
    /// conductances plus a conductance to ground) and recomputes each pivot
    /// as a sum of those, so no step subtracts. For `rhs ≥ 0` every
    /// intermediate is nonnegative and the solution has small componentwise
    /// relative error even when weights span hundreds of orders of magnitude.
    fn grounded_solve(
        &self,
        comp: &[usize],
        ground: usize,
        rhs: impl Fn(usize) -> f64,
    ) -> Result<Vec<f64>> {
        let free: Vec<usize> = comp.iter().copied().filter(|&v| v != ground).collect();
        let mut slot = vec![usize::MAX; self.n];
        for (i, &v) in free.iter().enumerate() {
            slot[v] = i;
        }
        let k = free.len();
        let mut cond = vec![vec![0.0; k]; k];
        let mut to_ground = vec![0.0; k];
        for e in &self.edges {
            match (slot[e.u], slot[e.v]) {
                (usize::MAX, usize::MAX) => {}
                (a, usize::MAX) if e.v == ground => to_ground[a] += e.weight,
                (usize::MAX, b) if e.u == ground => to_ground[b] += e.weight,
                (a, b) if a != usize::MAX && b != usize::MAX => {
                    cond[a][b] += e.weight;
                    cond[b][a] += e.weight;
                }
                _ => {}
            }
        }
        let mut b: Vec<f64> = free.iter().map(|&v| rhs(v)).collect();
        let mut pivot = vec![0.0; k];
        for p in 0..k {
            pivot[p] = to_ground[p] + cond[p][p + 1..].iter().sum::<f64>();
            if !(pivot[p] > 0.0 && pivot[p].is_finite()) {
                return Err(Error::Numerical(format!(
                    "grounded Laplacian pivot {} at vertex {}",
                    pivot[p], free[p]
                )));
            }
            for i in p + 1..k {
                let c_ip = cond[i][p];
                if c_ip == 0.0 {
                    continue;
                }
                let f = c_ip / pivot[p];
                to_ground[i] += f * to_ground[p];
                b[i] += f * b[p];
                for j in p + 1..k {
                    if j != i && cond[p][j] != 0.0 {
                        cond[i][j] += f * cond[p][j];
                    }
                }
            }
        }
        let mut x = vec![0.0; k];
        for p in (0..k).rev() {
            let coupled: f64 = (p + 1..k).map(|j| cond[p][j] * x[j]).sum();
            x[p] = (b[p] + coupled) / pivot[p];
        }
        let mut out = vec![0.0; self.n];
        for (i, &v) in free.iter().enumerate() {
            out[v] = x[i];
        }
        Ok(out)
    }

    /// Vertex potentials `φ` with `φ(t) = 0` for a unit current injected
    /// at `s` and extracted at `t`.
    pub fn potentials(&self, s: usize, t: usize) -> Result<Vec<f64>> {
        if s == t {
            return Err(Error::SameVertex(s));
        }
        let comp = self.shared_component(s, t)?;
        self.grounded_solve(&comp, t, |v| if v == s { 1.0 } else { 0.0 })
    }

    /// The energy-minimizing unit `st`-flow, `θ(u,v) = w_{uv}(φ(u) − φ(v))`.
    pub fn min_energy_flow(&self, s: usize, t: usize) -> Result<Flow> {
        let phi = self.potentials(s, t)?;
        let edge_flow: Vec<f64> = self
            .edges
            .iter()
            .map(|e| e.weight * (phi[e.u] - phi[e.v]))
            .collect();
        let mut flow = Flow::new(self, s, t, edge_flow);
        // for a unit current the dissipated energy is the potential drop,
        // which avoids differencing nearly equal potentials
        flow.energy = phi[s];
        Ok(flow)
    }

    /// `R_{s,t}(G)`, the minimum flow energy.
    pub fn effective_resistance(&self, s: usize, t: usize) -> Result<f64> {
        Ok(self.min_energy_flow(s, t)?.energy())
    }

    /// Expected steps of the weighted random walk to first reach `target`,
    /// for every vertex in `target`'s component.
    pub fn hitting_times(&self, target: usize) -> Result<HittingTimes> {
        self.check_vertex(target)?;
        let comp = self.component_of(target);
        // (D − A) h = d on the free vertices, h(target) = 0
        let values = self.grounded_solve(&comp, target, |v| self.degree(v))?;
        let mut reachable = vec![false; self.n];
        comp.iter().for_each(|&v| reachable[v] = true);
        Ok(HittingTimes {
            target,
            values,
            reachable,
        })
    }

    /// `H_{u,t}(G)`, solved exactly.
    pub fn hitting_time_exact(&self, u: usize, t: usize) -> Result<f64> {
        self.check_vertex(u)?;
        self.hitting_times(t)?.get(u)
    }

    /// Monte-Carlo estimate of `H_{u,t}(G)` from `trials` seeded walks.
    pub fn hitting_time_mc(
        &self,
        u: usize,
        t: usize,
        seed: u64,
        trials: usize,
    ) -> Result<McEstimate> {
        if trials == 0 {
            return Err(Error::BadParameter("trials must be >= 1".into()));
        }
        self.shared_component(u, t)?;
        let sampler = WalkSampler::new(self);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<f64> = (0..trials)
            .map(|_| sampler.first_arrival(u, t, &mut rng) as f64)
            .collect();
        Ok(McEstimate::from_samples(&samples))
    }

    /// `|H_{s,t} + H_{t,s} − 2WR| / max(1, 2WR)`.
    pub fn commute_identity_residual(&self, s: usize, t: usize) -> Result<f64> {
        let c = self.commute_report(s, t)?;
        Ok(c.residual)
    }

    /// Both sides of the commute-time identity for `(s, t)`. `W` is taken
    /// over the component containing `s` and `t`.
    pub fn commute_report(&self, s: usize, t: usize) -> Result<CommuteReport> {
        if self.has_boundary() {
            return Err(Error::BoundaryPresent);
        }
        let r = self.effective_resistance(s, t)?;
        let comp = self.component_of(t);
        let mut inside = vec![false; self.n];
        comp.iter().for_each(|&v| inside[v] = true);
        let w: f64 = self
            .edges
            .iter()
            .filter(|e| inside[e.u])
            .map(|e| e.weight)
            .sum();
        let h_st = self.hitting_time_exact(s, t)?;
        let h_ts = self.hitting_time_exact(t, s)?;
        let rhs = 2.0 * w * r;
        Ok(CommuteReport {
            h_st,
            h_ts,
            total_weight: w,
            resistance: r,
            residual: (h_st + h_ts - rhs).abs() / rhs.max(1.0),
        })
    }
}

/// A unit `st`-flow, stored per edge in the edge's `u → v` orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct Flow {
    s: usize,
    t: usize,
    edges: Vec<Edge>,
    edge_flow: Vec<f64>,
    energy: f64,
}

impl Flow {
    /// Wraps per-edge flow values; `energy` is computed as `Σ θ(e)²/w_e`.
    pub fn new(g: &WeightedGraph, s: usize, t: usize, edge_flow: Vec<f64>) -> Self {
        let energy = g
            .edges
            .iter()
            .zip(&edge_flow)
            .map(|(e, f)| f * f / e.weight)
            .sum();
        Self {
            s,
            t,
            edges: g.edges.clone(),
            edge_flow,
            energy,
        }
    }

    pub fn source(&self) -> usize {
        self.s
    }

    pub fn sink(&self) -> usize {
        self.t
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn edge_flows(&self) -> &[f64] {
        &self.edge_flow
    }

    /// `θ(u, v)`, summed over parallel edges; antisymmetric by construction.
    pub fn theta(&self, u: usize, v: usize) -> f64 {
        self.edges
            .iter()
            .zip(&self.edge_flow)
            .map(|(e, &f)| {
                if e.u == u && e.v == v {
                    f
                } else if e.u == v && e.v == u {
                    -f
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// `Σ_v θ(u, v)`.
    pub fn net_out(&self, u: usize) -> f64 {
        self.edges
            .iter()
            .zip(&self.edge_flow)
            .map(|(e, &f)| {
                if e.u == u {
                    f
                } else if e.v == u {
                    -f
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// Worst violation of conservation and the unit source/sink conditions.
    pub fn conservation_residual(&self, n: usize) -> f64 {
        (0..n)
            .map(|u| {
                let target = if u == self.s {
                    1.0
                } else if u == self.t {
                    -1.0
                } else {
                    0.0
                };
                (self.net_out(u) - target).abs()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HittingTimes {
    target: usize,
    values: Vec<f64>,
    reachable: Vec<bool>,
}

impl HittingTimes {
    pub fn target(&self) -> usize {
        self.target
    }

    pub fn get(&self, u: usize) -> Result<f64> {
        if !self.reachable[u] {
            return Err(Error::Disconnected {
                s: u,
                t: self.target,
            });
        }
        Ok(self.values[u])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√trials`.
    pub stderr: f64,
}

impl McEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let stderr = if samples.len() < 2 {
            0.0
        } else {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        };
        Self { mean, stderr }
    }

    /// Whether `value` lies within `k` standard errors of the mean. A zero
    /// standard error demands equality up to rounding.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr + 1e-9 * value.abs().max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommuteReport {
    pub h_st: f64,
    pub h_ts: f64,
    pub total_weight: f64,
    pub resistance: f64,
    pub residual: f64,
}

/// Per-vertex cumulative weight tables for sampling walk steps.
struct WalkSampler {
    neighbors: Vec<Vec<usize>>,
    cumulative: Vec<Vec<f64>>,
}

impl WalkSampler {
    fn new(g: &WeightedGraph) -> Self {
        let adj = g.adjacency();
        let neighbors = adj
            .iter()
            .map(|list| list.iter().map(|&(v, _)| v).collect())
            .collect();
        let cumulative = adj
            .iter()
            .map(|list| {
                list.iter()
                    .scan(0.0, |acc, &(_, i)| {
                        *acc += g.edges[i].weight;
                        Some(*acc)
                    })
                    .collect()
            })
            .collect();
        Self {
            neighbors,
            cumulative,
        }
    }

    fn first_arrival<R: Rng + ?Sized>(&self, start: usize, target: usize, rng: &mut R) -> u64 {
        let mut at = start;
        let mut steps = 0;
        while at != target {
            let cum = &self.cumulative[at];
            let x = rng.random::<f64>() * cum[cum.len() - 1];
            let k = cum.partition_point(|&c| c <= x).min(cum.len() - 1);
            at = self.neighbors[at][k];
            steps += 1;
        }
        steps
    }
}

/// A random connected graph on `n` vertices: a random spanning tree plus
/// each remaining pair with probability `extra_prob`, weights uniform in
/// `[lo, hi]`.
pub fn random_connected<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    extra_prob: f64,
    lo: f64,
    hi: f64,
) -> Result<WeightedGraph> {
    let mut edges = Vec::new();
    let mut has = vec![vec![false; n]; n];
    for v in 1..n {
        let u = rng.random_range(0..v);
        edges.push((u, v, rng.random_range(lo..=hi)));
        has[u][v] = true;
    }
    for u in 0..n {
        for v in u + 1..n {
            if !has[u][v] && rng.random::<f64>() < extra_prob {
                edges.push((u, v, rng.random_range(lo..=hi)));
            }
        }
    }
    WeightedGraph::from_edges(n, &edges)
}
