//! Qubit stabilizer groups, per-party commutation matrices and the GME test.

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, EchelonBasis};
use crate::pauli::{PauliOperator, SiteLabel};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest generator count for which [`StabilizerGroup::enumerate`] runs.
pub const MAX_ENUMERATION_GENERATORS: usize = 20;
/// Largest party count for the exhaustive bipartition scan.
pub const MAX_GME_PARTIES: usize = 32;

/// An abelian group of Hermitian qubit Paulis not containing −𝟙, held as an
/// independent generating list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerGroup {
    n_qubits: usize,
    generators: Vec<PauliOperator>,
    canonical: bool,
    /// 1-based input positions of generators dropped as dependent.
    removed: Vec<usize>,
}

impl StabilizerGroup {
    /// Validates a generating list and drops dependent entries.
    ///
    /// Independent generators are kept in input order; positions of the
    /// dropped ones are available from [`StabilizerGroup::removed`].
    pub fn validate_and_canonicalize(generators: Vec<PauliOperator>) -> Result<Self> {
        let first = generators.first().ok_or_else(|| Error::Domain("empty generator list".into()))?;
        let n = first.n_sites();
        for g in &generators {
            if g.d() != 2 {
                return Err(Error::Domain(format!("stabilizer groups are qubit-only, got d={}", g.d())));
            }
            if g.n_sites() != n {
                return Err(Error::Dimension(format!("generators act on {n} and {} qubits", g.n_sites())));
            }
        }
        if let Some(i) = generators.iter().position(|g| !g.is_hermitian()) {
            return Err(Error::InvalidPhase(i + 1));
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if generators[i].commutation_unchecked(&generators[j]) != 0 {
                    return Err(Error::NotAbelian(i + 1, j + 1));
                }
            }
        }

        let mut basis = EchelonBasis::new(2 * n);
        let mut kept = Vec::new();
        let mut removed = Vec::new();
        for (i, g) in generators.iter().enumerate() {
            let bits = g.symplectic_bits();
            if let Some(combo) = basis.express(&bits) {
                let mut product = PauliOperator::identity(n, 2);
                for idx in combo {
                    product.mul_assign(&generators[idx]);
                }
                if product == *g {
                    removed.push(i + 1);
                } else {
                    debug_assert_eq!(product, g.negated());
                    return Err(Error::MinusIdentity);
                }
            } else {
                kept.push(g.clone());
            }
            basis.insert(&bits);
        }
        Ok(StabilizerGroup { n_qubits: n, generators: kept, canonical: false, removed })
    }

    /// Parses one operator per string and validates the result.
    pub fn from_strs<S: AsRef<str>>(generators: &[S]) -> Result<Self> {
        let ops = generators.iter().map(|s| PauliOperator::parse(s.as_ref(), 2)).collect::<Result<Vec<_>>>()?;
        Self::validate_and_canonicalize(ops)
    }

    pub(crate) fn from_trusted(n_qubits: usize, generators: Vec<PauliOperator>) -> Self {
        StabilizerGroup { n_qubits, generators, canonical: false, removed: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn k(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub fn removed(&self) -> &[usize] {
        &self.removed
    }

    /// Reduced row-echelon generating set of the same group (pivots on the
    /// X block first, then Z), with phases carried through every row
    /// operation.
    pub fn to_canonical(&self) -> StabilizerGroup {
        let n = self.n_qubits;
        let mut rows = self.generators.clone();
        let mut next = 0;
        for col in 0..2 * n {
            let bit = |g: &PauliOperator| if col < n { g.x()[col] == 1 } else { g.z()[col - n] == 1 };
            let Some(p) = (next..rows.len()).find(|&r| bit(&rows[r])) else { continue };
            rows.swap(next, p);
            let pivot = rows[next].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != next && bit(row) {
                    row.mul_assign(&pivot);
                }
            }
            next += 1;
        }
        StabilizerGroup { n_qubits: n, generators: rows, canonical: true, removed: self.removed.clone() }
    }

    /// `log2 dim V_𝕊 = N − k`.
    pub fn log2_dimension(&self) -> usize {
        self.n_qubits - self.k()
    }

    pub fn subspace_dimension(&self) -> Result<u128> {
        let e = self.log2_dimension();
        if e >= 128 {
            return Err(Error::capacity("log2 subspace dimension", 127, e as u64));
        }
        Ok(1u128 << e)
    }

    /// Element for exponent vector `mask` (bit `m` selects generator `m+1`).
    pub fn element(&self, mask: u64) -> PauliOperator {
        let mut acc = PauliOperator::identity(self.n_qubits, 2);
        for (m, g) in self.generators.iter().enumerate() {
            if (mask >> m) & 1 == 1 {
                acc.mul_assign(g);
            }
        }
        acc
    }

    /// All 2^k group elements, indexed by their GF(2) exponent vector.
    pub fn enumerate(&self) -> Result<Vec<PauliOperator>> {
        let k = self.k();
        if k > MAX_ENUMERATION_GENERATORS {
            return Err(Error::capacity("generator count", MAX_ENUMERATION_GENERATORS as u64, k as u64));
        }
        let mut out = Vec::with_capacity(1 << k);
        out.push(PauliOperator::identity(self.n_qubits, 2));
        for mask in 1usize..(1 << k) {
            let low = mask.trailing_zeros() as usize;
            out.push(self.generators[low].mul_unchecked(&out[mask & (mask - 1)]));
        }
        Ok(out)
    }

    pub fn commutation_matrices(&self) -> CommutationMatrixSet {
        let k = self.k();
        let matrices = (0..self.n_qubits)
            .map(|site| {
                let mut m = BitMatrix::zeros(k, k);
                for i in 0..k {
                    for j in i + 1..k {
                        if self.generators[i].site_commutation(&self.generators[j], site) == 1 {
                            m.set(i, j, true);
                            m.set(j, i, true);
                        }
                    }
                }
                m
            })
            .collect();
        CommutationMatrixSet { n_qubits: self.n_qubits, k, matrices }
    }

    /// Decides GME by scanning every bipartition for a pair of generators with
    /// anticommuting restrictions.
    pub fn is_gme(&self) -> Result<GmeVerdict> {
        self.commutation_matrices().gme_scan(1)
    }

    /// Same verdict as [`StabilizerGroup::is_gme`], splitting the scan over
    /// `workers` threads.
    pub fn is_gme_parallel(&self, workers: usize) -> Result<GmeVerdict> {
        self.commutation_matrices().gme_scan(workers.max(1))
    }

    /// `g̃_j = Π_m g_m^{A_{mj}}`: column `j` of `A` selects the generators
    /// multiplied into the new generator `j`.
    pub fn apply_basis_change(&self, a: &BasisChange) -> Result<StabilizerGroup> {
        let m = a.matrix();
        if m.nrows() != self.k() {
            return Err(Error::Dimension(format!("basis change is {}x{}, group has k={}", m.nrows(), m.ncols(), self.k())));
        }
        let generators = (0..self.k())
            .map(|j| {
                let mut acc = PauliOperator::identity(self.n_qubits, 2);
                for (mi, g) in self.generators.iter().enumerate() {
                    if m.get(mi, j) {
                        acc.mul_assign(g);
                    }
                }
                acc
            })
            .collect();
        Ok(StabilizerGroup { n_qubits: self.n_qubits, generators, canonical: false, removed: Vec::new() })
    }

    /// Commutation matrix of the restrictions to `q`, computed directly from
    /// restricted operators rather than by summing per-party matrices.
    pub fn restricted_commutation_matrix(&self, q: &[SiteLabel]) -> Result<BitMatrix> {
        let restricted = self.generators.iter().map(|g| g.restrict(q)).collect::<Result<Vec<_>>>()?;
        let k = self.k();
        let mut m = BitMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                m.set(i, j, restricted[i].commutation_unchecked(&restricted[j]) == 1);
            }
        }
        Ok(m)
    }
}

/// Result of the bipartition scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GmeVerdict {
    pub gme: bool,
    /// First bipartition side `Q` (containing party 1) in Gray-code order whose
    /// restrictions all commute.
    pub violating: Option<Vec<usize>>,
}

/// Invertible k×k matrix over GF(2) relating two generating sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisChange(BitMatrix);

impl BasisChange {
    pub fn new(matrix: BitMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Dimension("basis change must be square".into()));
        }
        if !matrix.is_invertible() {
            return Err(Error::SingularMatrix);
        }
        Ok(BasisChange(matrix))
    }

    pub fn from_nested(rows: &[Vec<u8>]) -> Result<Self> {
        Self::new(BitMatrix::from_nested(rows))
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.0
    }
}

/// One symmetric, zero-diagonal k×k binary matrix per party.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutationMatrixSet {
    n_qubits: usize,
    k: usize,
    matrices: Vec<BitMatrix>,
}

impl CommutationMatrixSet {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn matrix(&self, site: SiteLabel) -> &BitMatrix {
        &self.matrices[site.offset()]
    }

    pub(crate) fn by_offset(&self, site: usize) -> &BitMatrix {
        &self.matrices[site]
    }

    pub fn matrices(&self) -> &[BitMatrix] {
        &self.matrices
    }

    /// `Σ_{α∈Q} C^α` over GF(2).
    pub fn sum_over(&self, q: &[SiteLabel]) -> BitMatrix {
        let mut acc = BitMatrix::zeros(self.k, self.k);
        for s in q {
            acc.xor_assign(&self.matrices[s.offset()]);
        }
        acc
    }

    /// Σ over all parties vanishes.
    pub fn sums_to_zero(&self) -> bool {
        self.sum_over(&(1..=self.n_qubits).map(SiteLabel::unchecked).collect::<Vec<_>>()).is_zero()
    }

    pub fn transformed(&self, a: &BasisChange) -> CommutationMatrixSet {
        CommutationMatrixSet {
            n_qubits: self.n_qubits,
            k: self.k,
            matrices: self.matrices.iter().map(|m| m.congruence(a.matrix())).collect(),
        }
    }

    fn gme_scan(&self, workers: usize) -> Result<GmeVerdict> {
        let n = self.n_qubits;
        if n < 2 {
            return Err(Error::Domain("GME needs at least two parties".into()));
        }
        if n > MAX_GME_PARTIES {
            return Err(Error::capacity("party count for bipartition scan", MAX_GME_PARTIES as u64, n as u64));
        }
        let free = n - 1;
        let total: u64 = 1u64 << free;
        let full: u64 = total - 1;
        // Gray-code position t ↦ subset of parties {2..N} joined to party 1.
        let scan = |start: u64, end: u64| -> Option<u64> {
            let mut acc = self.matrices[0].clone();
            let g0 = start ^ (start >> 1);
            for b in 0..free {
                if (g0 >> b) & 1 == 1 {
                    acc.xor_assign(&self.matrices[b + 1]);
                }
            }
            for t in start..end {
                if t > start {
                    let b = t.trailing_zeros() as usize;
                    acc.xor_assign(&self.matrices[b + 1]);
                }
                let gray = t ^ (t >> 1);
                if gray != full && acc.is_zero() {
                    return Some(gray);
                }
            }
            None
        };
        let hit = if workers <= 1 || total < 1024 {
            scan(0, total)
        } else {
            let chunks = (workers as u64 * 4).min(total);
            let step = total.div_ceil(chunks);
            let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool");
            pool.install(|| {
                (0..chunks)
                    .into_par_iter()
                    .map(|c| {
                        let start = c * step;
                        let end = ((c + 1) * step).min(total);
                        if start >= end {
                            None
                        } else {
                            scan(start, end).map(|g| (start, g))
                        }
                    })
                    .collect::<Vec<_>>()
                    .into_iter()
                    .flatten()
                    .min_by_key(|&(start, _)| start)
                    .map(|(_, g)| g)
            })
        };
        Ok(match hit {
            None => GmeVerdict { gme: true, violating: None },
            Some(gray) => {
                let mut q = vec![1];
                q.extend((0..free).filter(|b| (gray >> b) & 1 == 1).map(|b| b + 2));
                GmeVerdict { gme: false, violating: Some(q) }
            }
        })
    }
}

/// `k(N) = ⌈(1 + √(8N − 7)) / 2⌉`, evaluated in exact integer arithmetic.
pub fn gme_min_generators(n: u64) -> u64 {
    let disc = 8 * n - 7;
    let s = disc.isqrt();
    if s * s == disc {
        s.div_ceil(2)
    } else {
        s.div_ceil(2) + 1
    }
}

/// Largest dimension of a GME qubit stabilizer subspace on `n` qubits,
/// `2^(N − k(N))`.
pub fn max_gme_dimension(n: u64) -> Result<u64> {
    if n < 4 {
        return Err(Error::Domain(format!("N = {n}: GME stabilizer subspaces of dimension >= 2 need N >= 4")));
    }
    let e = n - gme_min_generators(n);
    if e >= 64 {
        return Err(Error::capacity("log2 of the maximal GME dimension", 63, e));
    }
    Ok(1u64 << e)
}

pub mod random {
    //! Random valid stabilizer groups: `±Z` on the first k qubits pushed
    //! through a random Clifford circuit, which preserves commutation,
    //! Hermiticity and independence.

    use super::*;
    use rand::Rng;

    pub(crate) fn hadamard(op: &mut PauliOperator, q: usize) {
        let (x, z) = (op.x()[q], op.z()[q]);
        set_site(op, q, z, x, 2 * (x & z));
    }

    pub(crate) fn phase_gate(op: &mut PauliOperator, q: usize) {
        let (x, z) = (op.x()[q], op.z()[q]);
        set_site(op, q, x, x ^ z, x);
    }

    pub(crate) fn cnot(op: &mut PauliOperator, c: usize, t: usize) {
        let (xc, zc, xt, zt) = (op.x()[c], op.z()[c], op.x()[t], op.z()[t]);
        set_site(op, c, xc, zc ^ zt, 0);
        set_site(op, t, xt ^ xc, zt, 0);
    }

    fn set_site(op: &mut PauliOperator, q: usize, x: u32, z: u32, dphase: u32) {
        let mut xs = op.x().to_vec();
        let mut zs = op.z().to_vec();
        xs[q] = x;
        zs[q] = z;
        *op = PauliOperator::new(2, xs, zs, op.phase() + dphase).expect("valid shape");
    }

    /// A random valid group with `k` generators on `n` qubits.
    pub fn random_group<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> StabilizerGroup {
        assert!(n >= 1 && (1..=n).contains(&k));
        let mut gens: Vec<PauliOperator> = (0..k)
            .map(|i| {
                let mut z = vec![0; n];
                z[i] = 1;
                let g = PauliOperator::new(2, vec![0; n], z, 0).unwrap();
                if rng.random_bool(0.5) { g.negated() } else { g }
            })
            .collect();
        let depth = 4 * n * n + 8;
        for _ in 0..depth {
            match rng.random_range(0..3) {
                0 => {
                    let q = rng.random_range(0..n);
                    gens.iter_mut().for_each(|g| hadamard(g, q));
                }
                1 => {
                    let q = rng.random_range(0..n);
                    gens.iter_mut().for_each(|g| phase_gate(g, q));
                }
                _ if n > 1 => {
                    let c = rng.random_range(0..n);
                    let mut t = rng.random_range(0..n - 1);
                    if t >= c {
                        t += 1;
                    }
                    gens.iter_mut().for_each(|g| cnot(g, c, t));
                }
                _ => {}
            }
        }
        StabilizerGroup::from_trusted(n, gens)
    }

    /// Draws random groups until one is GME; `None` after `attempts` misses.
    pub fn random_gme_group<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R, attempts: usize) -> Option<StabilizerGroup> {
        (0..attempts).map(|_| random_group(n, k, rng)).find(|g| g.is_gme().map(|v| v.gme).unwrap_or(false))
    }

    /// Random invertible k×k matrix.
    pub fn random_basis_change<R: Rng + ?Sized>(k: usize, rng: &mut R) -> BasisChange {
        loop {
            let rows: Vec<Vec<u8>> = (0..k).map(|_| (0..k).map(|_| rng.random_range(0..2u8)).collect()).collect();
            if let Ok(a) = BasisChange::from_nested(&rows) {
                return a;
            }
        }
    }
}
