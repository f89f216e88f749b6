//! Electric-network quantum walks on graphs with boundary edges, and the
//! weighted line used as a purifier for a biased quantum coin.
//!
//! The edge space has one basis vector per internal edge followed by one per
//! boundary edge. Each vertex `u` has a star state with amplitude
//! `√w_{u,v}` on its incident edges. The walk operator is the product of
//! the reflections about the spans of the star states on each side of the
//! bipartition.

use std::collections::{BTreeMap, VecDeque};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::state::{StateVector, UnitaryMatrix};

/// Singular values of `U − I` at or below this count as eigenvalue 1.
pub const EIGEN_ONE_TOL: f64 = 1e-8;

/// Basis of internal edges (in graph order) then boundary edges (by vertex).
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSpace {
    graph: WeightedGraph,
    boundary_vertices: Vec<usize>,
}

impl EdgeSpace {
    pub fn new(graph: WeightedGraph) -> Self {
        let boundary_vertices = graph.boundary().keys().copied().collect();
        Self {
            graph,
            boundary_vertices,
        }
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.graph.edges().len() + self.boundary_vertices.len()
    }

    /// Basis index of the internal edge with position `edge` in the graph.
    pub fn edge_index(&self, edge: usize) -> usize {
        edge
    }

    /// Basis index of the boundary edge at `v`, if it has one.
    pub fn boundary_index(&self, v: usize) -> Option<usize> {
        self.boundary_vertices
            .binary_search(&v)
            .ok()
            .map(|k| self.graph.edges().len() + k)
    }

    /// Unnormalized real star vector of `u`.
    fn star_raw(&self, u: usize) -> Vec<f64> {
        let mut raw = vec![0.0; self.dim()];
        for (i, e) in self.graph.edges().iter().enumerate() {
            if e.u == u || e.v == u {
                raw[self.edge_index(i)] = e.weight.sqrt();
            }
        }
        if let Some(b) = self.boundary_index(u) {
            raw[b] = self.graph.boundary_weight(u).sqrt();
        }
        raw
    }

    /// Normalized star state of `u`.
    pub fn star_state(&self, u: usize) -> Result<StateVector> {
        if u >= self.graph.n() {
            return Err(Error::IndexOutOfRange {
                index: u,
                dim: self.graph.n(),
            });
        }
        StateVector::from_real(&self.star_raw(u)).map_err(|_| Error::IsolatedVertex(u))
    }

    /// Basis vector on the boundary edge at `v`.
    pub fn boundary_state(&self, v: usize) -> Result<StateVector> {
        let idx = self
            .boundary_index(v)
            .ok_or_else(|| Error::BadParameter(format!("vertex {v} has no boundary edge")))?;
        StateVector::basis(self.dim(), idx)
    }

    /// Two-coloring of the vertices; the lowest vertex of each component gets
    /// side 0.
    pub fn bipartition(&self) -> Result<Vec<u8>> {
        let adj = self.graph.adjacency();
        let mut side = vec![u8::MAX; self.graph.n()];
        for root in 0..self.graph.n() {
            if side[root] != u8::MAX {
                continue;
            }
            side[root] = 0;
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                for &(v, _) in &adj[u] {
                    if side[v] == u8::MAX {
                        side[v] = 1 - side[u];
                        queue.push_back(v);
                    } else if side[v] == side[u] {
                        return Err(Error::NotBipartite);
                    }
                }
            }
        }
        Ok(side)
    }
}

/// One step of the quantum walk, `R_odd · R_even`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkOperator {
    unitary: UnitaryMatrix,
    reflections: [UnitaryMatrix; 2],
}

impl WalkOperator {
    pub fn build(space: &EdgeSpace) -> Result<Self> {
        let sides = space.bipartition()?;
        let dim = space.dim();
        let mut projectors = [
            DMatrix::<f64>::zeros(dim, dim),
            DMatrix::<f64>::zeros(dim, dim),
        ];
        for (u, &s) in sides.iter().enumerate() {
            let raw = space.star_raw(u);
            let norm2: f64 = raw.iter().map(|x| x * x).sum();
            if norm2 == 0.0 {
                continue;
            }
            let psi = nalgebra::DVector::from_vec(raw) / norm2.sqrt();
            projectors[s as usize] += &psi * psi.transpose();
        }
        let id = DMatrix::<f64>::identity(dim, dim);
        let [even, odd] = projectors.map(|p| p * 2.0 - &id);
        let product = &odd * &even;
        Ok(Self {
            unitary: UnitaryMatrix::from_real(&product)?,
            reflections: [
                UnitaryMatrix::from_real(&even)?,
                UnitaryMatrix::from_real(&odd)?,
            ],
        })
    }

    pub fn unitary(&self) -> &UnitaryMatrix {
        &self.unitary
    }

    /// `(R_even, R_odd)`.
    pub fn reflections(&self) -> (&UnitaryMatrix, &UnitaryMatrix) {
        (&self.reflections[0], &self.reflections[1])
    }

    pub fn dim(&self) -> usize {
        self.unitary.dim()
    }

    /// Orthonormal basis of the eigenvalue-1 eigenspace.
    ///
    /// `U` is normal, so the singular values of `U − I` are exactly the
    /// distances `|λ − 1|`; the right singular vectors for the (near-)zero
    /// ones span the 1-eigenspace.
    pub fn fixed_space(&self) -> Result<Vec<Vec<Complex64>>> {
        let dim = self.dim();
        let shifted = self.unitary.matrix() - DMatrix::<Complex64>::identity(dim, dim);
        let svd = shifted
            .try_svd(false, true, 1e-15, 10_000)
            .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
        let v_t = svd.v_t.expect("requested");
        Ok(svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| s <= EIGEN_ONE_TOL)
            .map(|(k, _)| v_t.row(k).iter().map(|z| z.conj()).collect())
            .collect())
    }

    /// Eigenvalues of the walk, from the complex Schur form.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let schur = self
            .unitary
            .matrix()
            .clone()
            .try_schur(1e-15, 10_000)
            .ok_or_else(|| Error::Numerical("Schur decomposition did not converge".into()))?;
        let (_, t) = schur.unpack();
        Ok(t.diagonal().iter().copied().collect())
    }

    /// Squared norm of the projection of `initial` onto the 1-eigenspace.
    pub fn stationary_overlap(&self, initial: &StateVector) -> Result<f64> {
        if initial.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: initial.dim(),
            });
        }
        let overlap: f64 = self
            .fixed_space()?
            .iter()
            .map(|v| {
                v.iter()
                    .zip(initial.amplitudes())
                    .map(|(a, b)| a.conj() * b)
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .sum();
        Ok(overlap.min(1.0))
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::BadParameter(format!(
            "epsilon {epsilon} outside (0, 1/2)"
        )));
    }
    Ok(())
}

fn check_length(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::BadParameter(format!("line length D = {d} < 2")));
    }
    Ok(())
}

/// The weighted line `v_1 … v_D` (vertices `0..D`) with edge `ℓ` of weight
/// `((1−p0)/p0)^ℓ`, a unit entrance boundary edge at `v_1` and a terminal
/// boundary edge of weight `((1−p0)/p0)^D` at `v_D`.
#[derive(Debug, Clone, PartialEq)]
pub struct PurifierLine {
    p0: f64,
    epsilon: f64,
    d: usize,
    graph: WeightedGraph,
}

impl PurifierLine {
    pub fn new(p0: f64, epsilon: f64, d: usize) -> Result<Self> {
        if !(p0 > 0.0 && p0 < 1.0) {
            return Err(Error::BadParameter(format!("p0 {p0} outside (0, 1)")));
        }
        check_epsilon(epsilon)?;
        check_length(d)?;
        let ratio = 1.0 / p0 - 1.0;
        let weights: Vec<f64> = (1..d as i32).map(|l| ratio.powi(l)).collect();
        let terminal = ratio.powi(d as i32);
        if weights.iter().chain([&terminal]).any(|w| !w.is_normal()) {
            return Err(Error::BadParameter(format!(
                "line weights for p0 = {p0}, D = {d} leave the floating-point range"
            )));
        }
        let boundary = BTreeMap::from([(0, 1.0), (d - 1, terminal)]);
        let graph = WeightedGraph::path(&weights, boundary)?;
        Ok(Self {
            p0,
            epsilon,
            d,
            graph,
        })
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn length(&self) -> usize {
        self.d
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn entrance(&self) -> usize {
        0
    }

    pub fn terminal(&self) -> usize {
        self.d - 1
    }

    pub fn terminal_weight(&self) -> f64 {
        self.graph.boundary_weight(self.terminal())
    }

    pub fn total_weight(&self) -> f64 {
        self.graph.total_weight()
    }

    /// `R_{s,t}` over internal edges.
    pub fn resistance(&self) -> Result<f64> {
        self.graph
            .effective_resistance(self.entrance(), self.terminal())
    }

    /// Resistance from `s` out through the terminal boundary edge.
    pub fn resistance_through_terminal(&self) -> Result<f64> {
        Ok(self.resistance()? + 1.0 / self.terminal_weight())
    }

    pub fn edge_space(&self) -> EdgeSpace {
        EdgeSpace::new(self.graph.clone())
    }

    /// Overlap of the entrance boundary edge with the walk's 1-eigenspace.
    pub fn entrance_overlap(&self) -> Result<f64> {
        let space = self.edge_space();
        let op = WalkOperator::build(&space)?;
        op.stationary_overlap(&space.boundary_state(self.entrance())?)
    }
}

/// `q/(1−q)`, evaluated as `1/(1/q − 1)`: within a few ulps either way, but
/// this form lands exactly on `1/2` at `q = fl(1/3)`.
pub(crate) fn odds(q: f64) -> f64 {
    1.0 / (1.0 / q - 1.0)
}

/// `Σ_{ℓ=1}^{D−1} (ε/(1−ε))^ℓ`, the worst-case rejecting total weight and
/// worst-case accepting resistance of the purifier line.
pub fn worst_case_geometric_sum(epsilon: f64, d: usize) -> Result<f64> {
    check_epsilon(epsilon)?;
    check_length(d)?;
    let r = odds(epsilon);
    Ok(r * (1.0 - r.powi(d as i32 - 1)) / (1.0 - r))
}

/// `√(W_max · R_max)` for the purifier line.
pub fn purifier_complexity(epsilon: f64, d: usize) -> Result<f64> {
    let w_max = worst_case_geometric_sum(epsilon, d)?;
    let r_max = worst_case_geometric_sum(epsilon, d)?;
    Ok((w_max * r_max).sqrt())
}

/// The `D`-independent ceiling `1/(1 − ε/(1−ε))` on the complexity.
pub fn purifier_complexity_limit(epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    Ok(1.0 / (1.0 - odds(epsilon)))
}

/// `(ε/(1−ε))^D`, the bound on the rejecting-case terminal weight.
pub fn perturbation_bound(epsilon: f64, d: usize) -> Result<f64> {
    check_epsilon(epsilon)?;
    if d == 0 {
        return Err(Error::BadParameter("D must be positive".into()));
    }
    Ok(odds(epsilon).powi(d as i32))
}

/// Slack on the promise boundaries, so that e.g. `p0 = 2/3` counts as
/// rejecting at `ε = 1/3` despite `1 − fl(1/3) > fl(2/3)`.
const PROMISE_SLACK: f64 = 1e-12;

fn check_promise(p0: f64, epsilon: f64) -> Result<()> {
    check_epsilon(epsilon)?;
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::BadParameter(format!("p0 {p0} outside [0, 1]")));
    }
    if p0 > epsilon + PROMISE_SLACK && p0 < 1.0 - epsilon - PROMISE_SLACK {
        return Err(Error::PromiseViolation(format!(
            "p0 = {p0} lies strictly between {epsilon} and {}",
            1.0 - epsilon
        )));
    }
    Ok(())
}

/// Midpoint of the entrance overlaps at the two promise boundaries.
pub fn default_threshold(epsilon: f64, d: usize) -> Result<f64> {
    let accept = PurifierLine::new(epsilon, epsilon, d)?.entrance_overlap()?;
    let reject = PurifierLine::new(1.0 - epsilon, epsilon, d)?.entrance_overlap()?;
    Ok(0.5 * (accept + reject))
}

/// Decides whether a coin with `P(0) = p0` is in the accepting case
/// (`p0 ≤ ε`). Accepts iff the entrance overlap exceeds `threshold`
/// (default: [`default_threshold`]).
pub fn decide_purifier(p0: f64, epsilon: f64, d: usize, threshold: Option<f64>) -> Result<bool> {
    check_promise(p0, epsilon)?;
    check_length(d)?;
    // a deterministic coin makes the line degenerate
    if p0 == 0.0 || p0 == 1.0 {
        return Ok(p0 == 0.0);
    }
    let threshold = match threshold {
        Some(t) => t,
        None => default_threshold(epsilon, d)?,
    };
    Ok(PurifierLine::new(p0, epsilon, d)?.entrance_overlap()? > threshold)
}

/// One row of a purifier sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct PurifierRecord {
    pub p0: f64,
    pub epsilon: f64,
    pub d: usize,
    pub total_weight: f64,
    pub resistance: f64,
    pub complexity: f64,
    pub perturbation_bound: f64,
    pub overlap: f64,
    pub threshold: f64,
    pub accept: bool,
}

pub fn purifier_record(p0: f64, epsilon: f64, d: usize) -> Result<PurifierRecord> {
    check_promise(p0, epsilon)?;
    let line = PurifierLine::new(p0, epsilon, d)?;
    let overlap = line.entrance_overlap()?;
    let threshold = default_threshold(epsilon, d)?;
    Ok(PurifierRecord {
        p0,
        epsilon,
        d,
        total_weight: line.total_weight(),
        resistance: line.resistance()?,
        complexity: purifier_complexity(epsilon, d)?,
        perturbation_bound: perturbation_bound(epsilon, d)?,
        overlap,
        threshold,
        accept: overlap > threshold,
    })
}
