//! Qudit graph states `|G⟩` stabilized by `g_j = X_j Π_l Z_l^{Γ_{jl}}`, their
//! pairwise entanglement protocol, and an exhaustive scan for two-site
//! anticommutation patterns in general qudit stabilizer groups.

use crate::error::{Error, Result};
use crate::pauli::{PauliOperator, SiteLabel};
use crate::sim::dense::apply_pauli;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};

/// Largest `d^N` for the dense graph-state protocol check.
pub const MAX_GRAPH_DIMENSION: usize = 4096;
/// Largest number of group elements `d^k` for the pattern scan.
pub const MAX_SCAN_ELEMENTS: u64 = 1 << 20;
/// Largest number of element pairs `d^{2k}` for the pattern scan.
pub const MAX_SCAN_PAIRS: u64 = 1 << 26;
pub const GRAPH_REPORT_SCHEMA: &str = "stabcert/graph/v1";

/// Undirected multigraph given by a symmetric multiplicity matrix with zero
/// diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multigraph {
    n: usize,
    gamma: Vec<Vec<u32>>,
}

impl Multigraph {
    pub fn new(gamma: Vec<Vec<u32>>) -> Result<Self> {
        let n = gamma.len();
        for (i, row) in gamma.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!("row {} has {} entries, expected {n}", i + 1, row.len())));
            }
            if row[i] != 0 {
                return Err(Error::Domain(format!("vertex {} has a self-loop", i + 1)));
            }
            for j in 0..i {
                if gamma[i][j] != gamma[j][i] {
                    return Err(Error::Domain(format!("multiplicity matrix is not symmetric at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        Ok(Multigraph { n, gamma })
    }

    /// Builds a graph from 1-based `(u, v, multiplicity)` triples; repeated
    /// edges add up.
    pub fn from_edges(n: usize, edges: &[(usize, usize, u32)]) -> Result<Self> {
        let mut gamma = vec![vec![0u32; n]; n];
        for &(u, v, m) in edges {
            let (a, b) = (SiteLabel::new(u, n)?.index() - 1, SiteLabel::new(v, n)?.index() - 1);
            if a == b {
                return Err(Error::Domain(format!("self-loop at vertex {u}")));
            }
            gamma[a][b] += m;
            gamma[b][a] += m;
        }
        Multigraph::new(gamma)
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i, i + 1, 1)).collect();
        Multigraph::from_edges(n, &edges).expect("path edges are valid")
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b, 1))).collect();
        Multigraph::from_edges(n, &edges).expect("complete-graph edges are valid")
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> &[Vec<u32>] {
        &self.gamma
    }

    pub fn multiplicity(&self, i: SiteLabel, j: SiteLabel) -> u32 {
        self.gamma[i.offset()][j.offset()]
    }
}

/// Qudit stabilizer group with pairwise commuting generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuditStabilizerGroup {
    d: u32,
    n: usize,
    generators: Vec<PauliOperator>,
}

impl QuditStabilizerGroup {
    pub fn new(generators: Vec<PauliOperator>) -> Result<Self> {
        let first = generators.first().ok_or_else(|| Error::Domain("a group needs at least one generator".into()))?;
        let (d, n) = (first.d(), first.n_sites());
        for g in &generators {
            if g.d() != d || g.n_sites() != n {
                return Err(Error::Dimension("generators differ in local dimension or site count".into()));
            }
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if generators[i].commutation_phase(&generators[j])? != 0 {
                    return Err(Error::NotAbelian(i + 1, j + 1));
                }
            }
        }
        Ok(QuditStabilizerGroup { d, n, generators })
    }

    pub fn from_strs<S: AsRef<str>>(d: u32, generators: &[S]) -> Result<Self> {
        let ops = generators.iter().map(|g| PauliOperator::parse(g.as_ref(), d)).collect::<Result<Vec<_>>>()?;
        QuditStabilizerGroup::new(ops)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    fn element_count(&self) -> Result<u64> {
        let count = (self.d as u64).checked_pow(self.k() as u32).unwrap_or(u64::MAX);
        if count > MAX_SCAN_ELEMENTS {
            return Err(Error::capacity("group elements d^k", MAX_SCAN_ELEMENTS, count));
        }
        Ok(count)
    }

    /// Exponent vector of element `index` in base `d`, first generator most
    /// significant.
    pub fn exponents(&self, mut index: u64) -> Vec<u32> {
        let mut e = vec![0u32; self.k()];
        for slot in e.iter_mut().rev() {
            *slot = (index % self.d as u64) as u32;
            index /= self.d as u64;
        }
        e
    }

    pub fn element(&self, exponents: &[u32]) -> PauliOperator {
        let mut acc = PauliOperator::identity(self.n, self.d);
        for (g, &e) in self.generators.iter().zip(exponents) {
            acc.mul_assign(&g.pow(e));
        }
        acc
    }

    /// All `d^k` products `Π g_m^{t_m}` in exponent order.
    pub fn enumerate(&self) -> Result<Vec<PauliOperator>> {
        let count = self.element_count()?;
        Ok((0..count).map(|i| self.element(&self.exponents(i))).collect())
    }
}

pub fn graph_generators(g: &Multigraph, d: u32) -> Result<QuditStabilizerGroup> {
    if d < 2 {
        return Err(Error::Domain(format!("local dimension must be at least 2, got {d}")));
    }
    let n = g.n_vertices();
    let generators = (0..n)
        .map(|j| {
            let mut x = vec![0; n];
            x[j] = 1;
            let z = (0..n).map(|l| g.gamma[j][l] % d).collect();
            PauliOperator::new(d, x, z, 0)
        })
        .collect::<Result<Vec<_>>>()?;
    QuditStabilizerGroup::new(generators)
}

/// Connectivity of the graph keeping only edges with `Γ mod d ≠ 0`.
pub fn is_connected_effective(g: &Multigraph, d: u32) -> bool {
    let n = g.n_vertices();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for w in 0..n {
            if !seen[w] && !g.gamma[v][w].is_multiple_of(d) {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// `q = d / gcd(d, Γ mod d)`.
pub fn entanglement_dimension(d: u32, gamma: u32) -> Result<u32> {
    if d < 2 {
        return Err(Error::Domain(format!("local dimension must be at least 2, got {d}")));
    }
    let r = gamma % d;
    if r == 0 {
        return Err(Error::Domain(format!("Γ = {gamma} vanishes mod {d}; no direct edge protocol")));
    }
    Ok(d / d.gcd(&r))
}

/// Dense `|G⟩` as the normalized image of `|0…0⟩` under the projectors
/// `(1/d) Σ_t g_j^t`.
pub fn graph_state_vector(g: &Multigraph, d: u32) -> Result<DVector<Complex64>> {
    let dim = dense_dimension(d, g.n_vertices())?;
    let group = graph_generators(g, d)?;
    let mut v = DVector::zeros(dim);
    v[0] = Complex64::new(1.0, 0.0);
    for gen in group.generators() {
        let mut acc = v.clone();
        let mut term = v.clone();
        for _ in 1..d {
            term = apply_pauli(gen, &term);
            acc += &term;
        }
        v = acc;
    }
    let norm = v.norm();
    Ok(v / Complex64::new(norm, 0.0))
}

fn dense_dimension(d: u32, n: usize) -> Result<usize> {
    let dim = (d as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
    if dim > MAX_GRAPH_DIMENSION as u64 {
        return Err(Error::capacity("graph-state dimension d^N", MAX_GRAPH_DIMENSION as u64, dim));
    }
    Ok(dim as usize)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphBranch {
    /// Computational-basis outcomes of the other vertices, keyed by vertex.
    pub outcomes: Vec<(usize, u32)>,
    pub probability: f64,
    /// `(a_i, a_j)` with the correction `Z_i^{a_i} ⊗ Z_j^{a_j}`.
    pub correction: (u32, u32),
    /// Overlap with the two-vertex graph state after correction.
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphReport {
    pub schema: String,
    pub d: u32,
    pub n_vertices: usize,
    pub pair: (usize, usize),
    pub gamma: u32,
    pub q: u32,
    /// Singular values of the corrected pair state.
    pub schmidt_coefficients: Vec<f64>,
    /// `(Σ_{k<q} s_k)² / q`, the best overlap with `|φ+⟩_q` under local unitaries.
    pub schmidt_fidelity: f64,
    pub min_fidelity: f64,
    pub branches: Vec<GraphBranch>,
    pub passed: bool,
}

/// Measures every vertex except `i, j` in the computational basis, undoes
/// the outcome-dependent phases with `Z` powers on the pair, and checks that
/// each branch equals the two-vertex graph state, which is maximally
/// entangled with Schmidt rank `q`.
pub fn graph_protocol_verify(g: &Multigraph, d: u32, i: SiteLabel, j: SiteLabel, tolerance: f64) -> Result<GraphReport> {
    let n = g.n_vertices();
    let (i, j) = (SiteLabel::new(i.index(), n)?, SiteLabel::new(j.index(), n)?);
    if i == j {
        return Err(Error::Domain("the pair needs two distinct vertices".into()));
    }
    let gamma = g.multiplicity(i, j) % d;
    let q = entanglement_dimension(d, gamma)?;
    let psi = graph_state_vector(g, d)?;
    let du = d as usize;
    let others: Vec<usize> = (0..n).filter(|&s| s != i.offset() && s != j.offset()).collect();
    let reference = pair_graph_state(d, gamma);

    let branch_count = du.pow(others.len() as u32);
    let branches: Vec<GraphBranch> = (0..branch_count)
        .into_par_iter()
        .map(|b| {
            let mut m = vec![0usize; n];
            let mut rest = b;
            for &s in others.iter().rev() {
                m[s] = rest % du;
                rest /= du;
            }
            let amp = |a: usize, c: usize| {
                let mut digits = m.clone();
                digits[i.offset()] = a;
                digits[j.offset()] = c;
                psi[digits.iter().fold(0usize, |acc, &x| acc * du + x)]
            };
            let block = DMatrix::from_fn(du, du, amp);
            let probability = block.norm_squared();
            let phase = |v: usize| others.iter().map(|&l| g.gamma[v][l] as usize * m[l]).sum::<usize>() % du;
            let (ai, aj) = ((du - phase(i.offset())) % du, (du - phase(j.offset())) % du);
            let fidelity = if probability > 1e-12 {
                let corrected = DMatrix::from_fn(du, du, |a, c| {
                    block[(a, c)] * root_of_unity(d, a * ai + c * aj) / Complex64::new(probability.sqrt(), 0.0)
                });
                let overlap: Complex64 = reference.iter().zip(corrected.iter()).map(|(r, c)| r.conj() * c).sum();
                overlap.norm_sqr()
            } else {
                0.0
            };
            GraphBranch {
                outcomes: others.iter().map(|&l| (l + 1, m[l] as u32)).collect(),
                probability,
                correction: (ai as u32, aj as u32),
                fidelity,
            }
        })
        .collect();

    let schmidt = schmidt_coefficients(&reference);
    let qf = q as f64;
    let schmidt_fidelity = schmidt.iter().take(q as usize).sum::<f64>().powi(2) / qf;
    let uniform = schmidt.iter().enumerate().all(|(k, &s)| {
        let target = if k < q as usize { 1.0 / qf.sqrt() } else { 0.0 };
        (s - target).abs() <= 1e-9
    });
    let min_fidelity = branches.iter().map(|b| b.fidelity).fold(f64::INFINITY, f64::min);
    let passed = uniform && schmidt_fidelity >= 1.0 - tolerance && min_fidelity >= 1.0 - tolerance;
    Ok(GraphReport {
        schema: GRAPH_REPORT_SCHEMA.into(),
        d,
        n_vertices: n,
        pair: (i.index(), j.index()),
        gamma,
        q,
        schmidt_coefficients: schmidt,
        schmidt_fidelity,
        min_fidelity,
        branches,
        passed,
    })
}

fn root_of_unity(d: u32, power: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (power % d as usize) as f64 / d as f64)
}

/// `(1/d) Σ_{a,b} ω^{2Γab} |ab⟩` as a `d × d` amplitude matrix.
fn pair_graph_state(d: u32, gamma: u32) -> DMatrix<Complex64> {
    let du = d as usize;
    DMatrix::from_fn(du, du, |a, b| root_of_unity(d, gamma as usize * a * b) / Complex64::new(d as f64, 0.0))
}

/// Singular values of a pair amplitude matrix in decreasing order.
pub fn schmidt_coefficients(block: &DMatrix<Complex64>) -> Vec<f64> {
    let mut s: Vec<f64> = block.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// First element pair (in exponent order) whose site commutation phases
/// are nonzero exactly at `α1` and `α2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternMatch {
    pub t_i: Vec<u32>,
    pub t_j: Vec<u32>,
    pub s_i: PauliOperator,
    pub s_j: PauliOperator,
}

pub fn lemma3_pattern_scan(g: &QuditStabilizerGroup, a1: SiteLabel, a2: SiteLabel) -> Result<Option<PatternMatch>> {
    let (a1, a2) = (SiteLabel::new(a1.index(), g.n_sites())?, SiteLabel::new(a2.index(), g.n_sites())?);
    if a1 == a2 {
        return Err(Error::Domain("the pair needs two distinct sites".into()));
    }
    let elements = scan_elements(g)?;
    let n = g.n_sites();
    let hit = (0..elements.len()).into_par_iter().find_first(|&x| {
        elements.iter().any(|t| {
            (0..n).all(|s| (elements[x].site_commutation(t, s) != 0) == (s == a1.offset() || s == a2.offset()))
        })
    });
    Ok(hit.map(|x| {
        let y = (0..elements.len())
            .find(|&y| {
                (0..n).all(|s| {
                    (elements[x].site_commutation(&elements[y], s) != 0) == (s == a1.offset() || s == a2.offset())
                })
            })
            .expect("match found above");
        PatternMatch {
            t_i: g.exponents(x as u64),
            t_j: g.exponents(y as u64),
            s_i: elements[x].clone(),
            s_j: elements[y].clone(),
        }
    }))
}

fn scan_elements(g: &QuditStabilizerGroup) -> Result<Vec<PauliOperator>> {
    let count = g.element_count()?;
    let pairs = count.saturating_mul(count);
    if pairs > MAX_SCAN_PAIRS {
        return Err(Error::capacity("element pairs d^{2k}", MAX_SCAN_PAIRS, pairs));
    }
    g.enumerate()
}

/// Every pattern of sites with nonzero commutation phase realized by some
/// element pair.
pub fn commutation_profiles(g: &QuditStabilizerGroup) -> Result<BTreeSet<Vec<bool>>> {
    let elements = scan_elements(g)?;
    let n = g.n_sites();
    Ok(elements
        .par_iter()
        .flat_map_iter(|s| elements.iter().map(move |t| (0..n).map(|a| s.site_commutation(t, a) != 0).collect::<Vec<_>>()))
        .collect::<Vec<_>>()
        .into_iter()
        .collect())
}
