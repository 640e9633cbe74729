//! Dense state-vector and density-matrix engine.
//!
//! Basis index `b` encodes the computational-basis digits with site 1 as
//! the most significant digit. Paulis act as monomials,
//! `X^x Z^z |b⟩ = ω^{2 z·b} |b + x⟩`, so no Kronecker products are formed.

use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliOperator, SiteLabel};
use crate::stabilizer::StabilizerGroup;
use crate::witness::{CliffordDescriptor, MeasurementProtocol, Outcomes, SignedLetter};
use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::OnceLock;

pub const MAX_MATRIX_QUBITS: usize = 10;
pub const MAX_VECTOR_QUBITS: usize = 16;
pub const STATE_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub enum DenseState {
    Pure { n_sites: usize, d: u32, amplitudes: DVector<Complex64> },
    Mixed { n_sites: usize, d: u32, rho: DMatrix<Complex64> },
}

fn dimension(d: u32, n: usize) -> Result<usize> {
    (d as usize)
        .checked_pow(n as u32)
        .ok_or_else(|| Error::capacity("Hilbert-space dimension", usize::MAX as u64, u64::MAX))
}

impl DenseState {
    /// A normalized pure state; fails if the norm is off by more than the
    /// state tolerance.
    pub fn pure(n_sites: usize, d: u32, amplitudes: DVector<Complex64>) -> Result<Self> {
        let dim = dimension(d, n_sites)?;
        if amplitudes.len() != dim {
            return Err(Error::Dimension(format!("expected {dim} amplitudes, got {}", amplitudes.len())));
        }
        let s = DenseState::Pure { n_sites, d, amplitudes };
        s.validate()?;
        Ok(s)
    }

    pub fn mixed(n_sites: usize, d: u32, rho: DMatrix<Complex64>) -> Result<Self> {
        let dim = dimension(d, n_sites)?;
        if rho.shape() != (dim, dim) {
            return Err(Error::Dimension(format!("expected a {dim}×{dim} matrix, got {:?}", rho.shape())));
        }
        let s = DenseState::Mixed { n_sites, d, rho };
        s.validate()?;
        Ok(s)
    }

    pub fn n_sites(&self) -> usize {
        match self {
            DenseState::Pure { n_sites, .. } | DenseState::Mixed { n_sites, .. } => *n_sites,
        }
    }

    pub fn d(&self) -> u32 {
        match self {
            DenseState::Pure { d, .. } | DenseState::Mixed { d, .. } => *d,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DenseState::Pure { amplitudes, .. } => amplitudes.len(),
            DenseState::Mixed { rho, .. } => rho.nrows(),
        }
    }

    /// Checks normalization, Hermiticity and positivity.
    pub fn validate(&self) -> Result<()> {
        match self {
            DenseState::Pure { amplitudes, .. } => {
                let norm = amplitudes.norm_squared();
                if (norm - 1.0).abs() > STATE_TOLERANCE {
                    return Err(Error::Domain(format!("state norm is {norm}, expected 1")));
                }
            }
            DenseState::Mixed { rho, .. } => {
                let tr = rho.trace();
                if (tr - ONE).norm() > STATE_TOLERANCE {
                    return Err(Error::Domain(format!("trace is {tr}, expected 1")));
                }
                let dev = (rho - rho.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
                if dev > STATE_TOLERANCE {
                    return Err(Error::Domain(format!("matrix deviates from Hermitian by {dev:e}")));
                }
                let min = rho.clone().symmetric_eigenvalues().min();
                if min < -1e-10 {
                    return Err(Error::Domain(format!("matrix has negative eigenvalue {min:e}")));
                }
            }
        }
        Ok(())
    }

    pub fn to_density_matrix(&self) -> DMatrix<Complex64> {
        match self {
            DenseState::Pure { amplitudes, .. } => amplitudes * amplitudes.adjoint(),
            DenseState::Mixed { rho, .. } => rho.clone(),
        }
    }

    /// `Tr(ρ P)`.
    pub fn expectation(&self, p: &PauliOperator) -> Result<Complex64> {
        if p.n_sites() != self.n_sites() || p.d() != self.d() {
            return Err(Error::Dimension("operator and state shapes differ".into()));
        }
        Ok(match self {
            DenseState::Pure { amplitudes, .. } => amplitudes.dotc(&apply_pauli(p, amplitudes)),
            DenseState::Mixed { rho, .. } => apply_pauli_left(p, rho).trace(),
        })
    }

    /// `⟨φ|ρ|φ⟩` for a normalized target vector.
    pub fn fidelity_with(&self, target: &DVector<Complex64>) -> f64 {
        match self {
            DenseState::Pure { amplitudes, .. } => target.dotc(amplitudes).norm_sqr(),
            DenseState::Mixed { rho, .. } => target.dotc(&(rho * target)).re,
        }
    }

    /// Rank of the density matrix (eigenvalues above `tol`).
    pub fn rank(&self, tol: f64) -> usize {
        match self {
            DenseState::Pure { .. } => 1,
            DenseState::Mixed { rho, .. } => rho.clone().symmetric_eigenvalues().iter().filter(|&&e| e > tol).count(),
        }
    }
}

/// Per-site phase table `ω^{2j}` for the clock operator.
fn clock_phases(d: u32) -> Vec<Complex64> {
    (0..d).map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / d as f64)).collect()
}

/// Digits of basis index `b`, site 1 first.
fn digits(mut b: usize, d: usize, n: usize) -> impl Iterator<Item = usize> {
    let mut out = vec![0; n];
    for s in (0..n).rev() {
        out[s] = b % d;
        b /= d;
    }
    out.into_iter()
}

/// Image of basis index `b` under `p`: `(target index, coefficient)`.
fn monomial(p: &PauliOperator, clock: &[Complex64], global: Complex64, b: usize) -> (usize, Complex64) {
    let d = p.d() as usize;
    let n = p.n_sites();
    let mut target = 0usize;
    let mut coef = global;
    for (s, digit) in digits(b, d, n).enumerate() {
        coef *= clock[(p.z()[s] as usize * digit) % d];
        target = target * d + (digit + p.x()[s] as usize) % d;
    }
    (target, coef)
}

fn global_phase(p: &PauliOperator) -> Complex64 {
    Complex64::from_polar(1.0, PI * p.phase() as f64 / p.d() as f64)
}

pub fn apply_pauli(p: &PauliOperator, v: &DVector<Complex64>) -> DVector<Complex64> {
    let clock = clock_phases(p.d());
    let g = global_phase(p);
    let mut out = DVector::zeros(v.len());
    for b in 0..v.len() {
        let (t, c) = monomial(p, &clock, g, b);
        out[t] += c * v[b];
    }
    out
}

/// `P M`.
pub fn apply_pauli_left(p: &PauliOperator, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let clock = clock_phases(p.d());
    let g = global_phase(p);
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for b in 0..m.nrows() {
        let (t, c) = monomial(p, &clock, g, b);
        for col in 0..m.ncols() {
            out[(t, col)] += c * m[(b, col)];
        }
    }
    out
}

/// Dense matrix of a Pauli operator.
pub fn pauli_matrix(p: &PauliOperator) -> Result<DMatrix<Complex64>> {
    let dim = dimension(p.d(), p.n_sites())?;
    Ok(apply_pauli_left(p, &DMatrix::identity(dim, dim)))
}

fn check_qubits(g: &StabilizerGroup, cap: usize, what: &str) -> Result<()> {
    if g.n_qubits() > cap {
        return Err(Error::capacity(what, cap as u64, g.n_qubits() as u64));
    }
    Ok(())
}

/// Maximally mixed state on the stabilized subspace, `Π_m (𝟙+g_m)/2`
/// normalized by its trace.
pub fn dense_projector(g: &StabilizerGroup) -> Result<DenseState> {
    check_qubits(g, MAX_MATRIX_QUBITS, "qubits for a dense density matrix")?;
    let dim = 1usize << g.n_qubits();
    let mut p = DMatrix::<Complex64>::identity(dim, dim);
    for gen in g.generators() {
        p = (&p + apply_pauli_left(gen, &p)) * Complex64::new(0.5, 0.0);
    }
    let tr = p.trace();
    p /= tr;
    DenseState::mixed(g.n_qubits(), 2, p)
}

/// Projects `v` onto the stabilized subspace.
pub fn project_vector(g: &StabilizerGroup, v: &DVector<Complex64>) -> DVector<Complex64> {
    let mut out = v.clone();
    for gen in g.generators() {
        out = (&out + apply_pauli(gen, &out)) * Complex64::new(0.5, 0.0);
    }
    out
}

/// A random pure state of the stabilized subspace: a complex Gaussian
/// vector projected and normalized.
pub fn random_pure_state<R: Rng + ?Sized>(g: &StabilizerGroup, rng: &mut R) -> Result<DenseState> {
    check_qubits(g, MAX_VECTOR_QUBITS, "qubits for a dense state vector")?;
    let dim = 1usize << g.n_qubits();
    loop {
        let v = DVector::from_fn(dim, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let p = project_vector(g, &v);
        let norm = p.norm();
        if norm > 1e-6 {
            return DenseState::pure(g.n_qubits(), 2, p / Complex64::new(norm, 0.0));
        }
    }
}

/// Row matrix `Σ_a |a⟩⟨e_a|` whose rows are the conjugated eigenvectors of
/// `letter`, ordered by outcome (0 ↔ +1 eigenvalue).
pub fn measurement_basis(letter: Letter) -> Matrix2<Complex64> {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let ih = Complex64::new(0.0, FRAC_1_SQRT_2);
    match letter {
        Letter::Z | Letter::I => Matrix2::identity(),
        Letter::X => Matrix2::new(h, h, h, -h),
        Letter::Y => Matrix2::new(h, -ih, h, ih),
    }
}

fn qubit_mask(n: usize, site: usize) -> usize {
    1 << (n - 1 - site)
}

/// `U` on one qubit applied to the rows of `m` (left multiplication).
fn apply_local_left(m: &mut DMatrix<Complex64>, n: usize, site: usize, u: &Matrix2<Complex64>) {
    let mask = qubit_mask(n, site);
    for col in 0..m.ncols() {
        for b in (0..m.nrows()).filter(|b| b & mask == 0) {
            let (lo, hi) = (m[(b, col)], m[(b | mask, col)]);
            m[(b, col)] = u[(0, 0)] * lo + u[(0, 1)] * hi;
            m[(b | mask, col)] = u[(1, 0)] * lo + u[(1, 1)] * hi;
        }
    }
}

fn apply_local_vec(v: &mut DVector<Complex64>, n: usize, site: usize, u: &Matrix2<Complex64>) {
    let mask = qubit_mask(n, site);
    for b in (0..v.len()).filter(|b| b & mask == 0) {
        let (lo, hi) = (v[b], v[b | mask]);
        v[b] = u[(0, 0)] * lo + u[(0, 1)] * hi;
        v[b | mask] = u[(1, 0)] * lo + u[(1, 1)] * hi;
    }
}

/// A state rotated so that every measured site's eigenbasis is the
/// computational basis; each branch is then a 4×4 block.
#[derive(Clone, Debug)]
pub struct RotatedState {
    n: usize,
    pair: [usize; 2],
    measured: Vec<usize>,
    state: DenseState,
}

impl RotatedState {
    pub fn new(state: &DenseState, p: &MeasurementProtocol) -> Result<Self> {
        let n = state.n_sites();
        if state.d() != 2 || n != p.witness.s_i.n_sites() {
            return Err(Error::Dimension(format!(
                "protocol acts on {} qubits, state has {n} sites of dimension {}",
                p.witness.s_i.n_sites(),
                state.d()
            )));
        }
        let mut state = state.clone();
        match &mut state {
            DenseState::Pure { amplitudes, .. } => {
                for m in &p.measured {
                    apply_local_vec(amplitudes, n, m.site.offset(), &measurement_basis(m.basis));
                }
            }
            DenseState::Mixed { rho, .. } => {
                for m in &p.measured {
                    apply_local_left(rho, n, m.site.offset(), &measurement_basis(m.basis));
                }
                let mut adj = rho.adjoint();
                for m in &p.measured {
                    apply_local_left(&mut adj, n, m.site.offset(), &measurement_basis(m.basis));
                }
                *rho = adj.adjoint();
            }
        }
        let pair = p.ordered_pair().map(SiteLabel::offset);
        Ok(RotatedState { n, pair, measured: p.measured.iter().map(|m| m.site.offset()).collect(), state })
    }

    /// Unnormalized two-qubit block for the outcomes, with its trace.
    pub fn branch(&self, outcomes: &Outcomes) -> Result<(DMatrix<Complex64>, f64)> {
        let mut base = 0usize;
        for &s in &self.measured {
            let bit = *outcomes
                .get(&(s + 1))
                .ok_or_else(|| Error::Domain(format!("missing outcome for site {}", s + 1)))?;
            if bit > 1 {
                return Err(Error::Domain(format!("outcome {bit} at site {} is not a bit", s + 1)));
            }
            if bit == 1 {
                base |= qubit_mask(self.n, s);
            }
        }
        let idx = |r: usize| {
            let mut b = base;
            if r & 2 != 0 {
                b |= qubit_mask(self.n, self.pair[0]);
            }
            if r & 1 != 0 {
                b |= qubit_mask(self.n, self.pair[1]);
            }
            b
        };
        let block = match &self.state {
            DenseState::Pure { amplitudes, .. } => {
                let c = DVector::from_fn(4, |r, _| amplitudes[idx(r)]);
                &c * c.adjoint()
            }
            DenseState::Mixed { rho, .. } => DMatrix::from_fn(4, 4, |r, s| rho[(idx(r), idx(s))]),
        };
        let prob = block.trace().re;
        Ok((block, prob))
    }
}

/// Measures every non-pair site in its protocol basis with the given
/// outcomes and returns the normalized two-qubit state with its probability.
pub fn dense_run_protocol(state: &DenseState, p: &MeasurementProtocol, outcomes: &Outcomes) -> Result<(DenseState, f64)> {
    let rotated = RotatedState::new(state, p)?;
    let (block, prob) = rotated.branch(outcomes)?;
    if prob <= super::ZERO_PROBABILITY {
        return Err(Error::ZeroProbability);
    }
    let sigma = block / Complex64::new(prob, 0.0);
    Ok((DenseState::Mixed { n_sites: 2, d: 2, rho: sigma }, prob))
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn phi_plus() -> DVector<Complex64> {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    DVector::from_vec(vec![h, ZERO, ZERO, h])
}

fn single_qubit_gates() -> [Matrix2<Complex64>; 2] {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [Matrix2::new(h, h, h, -h), Matrix2::new(ONE, ZERO, ZERO, i)]
}

fn letter_matrix(l: Letter) -> Matrix2<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    match l {
        Letter::I => Matrix2::identity(),
        Letter::X => Matrix2::new(ZERO, ONE, ONE, ZERO),
        Letter::Y => Matrix2::new(ZERO, -i, i, ZERO),
        Letter::Z => Matrix2::new(ONE, ZERO, ZERO, -ONE),
    }
}

fn identify(m: &Matrix2<Complex64>) -> SignedLetter {
    for l in [Letter::X, Letter::Y, Letter::Z] {
        let lm = letter_matrix(l);
        for negative in [false, true] {
            let target = if negative { -lm } else { lm };
            if (m - target).norm() < 1e-9 {
                return SignedLetter { negative, letter: l };
            }
        }
    }
    unreachable!("Clifford conjugation maps Paulis to signed Paulis")
}

fn clifford_table() -> &'static HashMap<CliffordDescriptor, Matrix2<Complex64>> {
    static TABLE: OnceLock<HashMap<CliffordDescriptor, Matrix2<Complex64>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let (x, z) = (letter_matrix(Letter::X), letter_matrix(Letter::Z));
        let mut table = HashMap::new();
        let mut frontier = vec![Matrix2::<Complex64>::identity()];
        while let Some(u) = frontier.pop() {
            let desc = CliffordDescriptor {
                image_x: identify(&(u * x * u.adjoint())),
                image_z: identify(&(u * z * u.adjoint())),
            };
            if table.contains_key(&desc) {
                continue;
            }
            table.insert(desc, u);
            for gate in single_qubit_gates() {
                frontier.push(gate * u);
            }
        }
        table
    })
}

/// A unitary realizing the descriptor, generated from `H` and `S`.
pub fn clifford_matrix(c: &CliffordDescriptor) -> DMatrix<Complex64> {
    let u = clifford_table()[c];
    DMatrix::from_fn(2, 2, |r, s| u[(r, s)])
}

/// `(U_1 ⊗ U_2) σ (U_1 ⊗ U_2)†` on a two-qubit density matrix.
pub fn apply_two_qubit_correction(sigma: &DMatrix<Complex64>, first: &CliffordDescriptor, second: &CliffordDescriptor) -> DMatrix<Complex64> {
    let u = clifford_matrix(first).kronecker(&clifford_matrix(second));
    &u * sigma * u.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{c, dense_pauli_kron, mat_approx_eq};
    use crate::witness::{find_witness, synthesize_protocol, post_measurement_stabilizers, corrective_unitaries};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn group(g: &[&str]) -> StabilizerGroup {
        StabilizerGroup::from_strs(g).unwrap()
    }

    #[test]
    fn monomial_action_matches_kronecker_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in [2u32, 3, 4] {
            for _ in 0..20 {
                let n = rng.random_range(1..=3);
                let x = (0..n).map(|_| rng.random_range(0..d)).collect();
                let z = (0..n).map(|_| rng.random_range(0..d)).collect();
                let p = PauliOperator::new(d, x, z, rng.random_range(0..2 * d)).unwrap();
                assert!(mat_approx_eq(&pauli_matrix(&p).unwrap(), &dense_pauli_kron(&p), 1e-12), "{p}");
            }
        }
    }

    #[test]
    fn projector_examples() {
        let z = dense_projector(&group(&["Z"])).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
        assert!(mat_approx_eq(&z.to_density_matrix(), &expected, 1e-12));

        let bell = dense_projector(&group(&["XX", "ZZ"])).unwrap();
        let phi = phi_plus();
        assert!(mat_approx_eq(&bell.to_density_matrix(), &(&phi * phi.adjoint()), 1e-12));

        let five = dense_projector(&group(&["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"])).unwrap();
        assert_eq!(five.rank(1e-9), 2);
        let eig = five.to_density_matrix().symmetric_eigenvalues();
        assert_eq!(eig.iter().filter(|e| (*e - 0.5).abs() < 1e-9).count(), 2);
    }

    #[test]
    fn projector_capacity() {
        let gens: Vec<String> = (0..11).map(|i| (0..11).map(|j| if i == j { 'Z' } else { 'I' }).collect()).collect();
        let g = StabilizerGroup::from_strs(&gens).unwrap();
        assert!(matches!(dense_projector(&g), Err(Error::Capacity { .. })));
    }

    #[test]
    fn five_qubit_worked_example() {
        let g = group(&["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]);
        let w = crate::witness::WitnessPair::from_vectors(
            &g,
            (SiteLabel::unchecked(1), SiteLabel::unchecked(4)),
            vec![0, 0, 1, 0],
            vec![0, 0, 0, 1],
        )
        .unwrap();
        let p = synthesize_protocol(&w).unwrap();
        let rho = dense_projector(&g).unwrap();
        let outcomes: Outcomes = [(2, 0), (3, 0), (5, 0)].into_iter().collect();
        let (sigma, prob) = dense_run_protocol(&rho, &p, &outcomes).unwrap();
        assert!((prob - 0.125).abs() < 1e-12);
        let (si, sj) = post_measurement_stabilizers(&p, &outcomes).unwrap();
        assert!((sigma.expectation(&si).unwrap() - ONE).norm() < 1e-10);
        assert!((sigma.expectation(&sj).unwrap() - ONE).norm() < 1e-10);
        let total: f64 = (0..8).map(|b| dense_run_protocol(&rho, &p, &p.outcomes_for_branch(b)).unwrap().1).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bell_empty_protocol_returns_state() {
        let g = group(&["XX", "ZZ"]);
        let p = synthesize_protocol(&find_witness(&g, SiteLabel::unchecked(1), SiteLabel::unchecked(2)).unwrap()).unwrap();
        let rho = dense_projector(&g).unwrap();
        let (sigma, prob) = dense_run_protocol(&rho, &p, &Outcomes::new()).unwrap();
        assert!((prob - 1.0).abs() < 1e-12);
        assert!(mat_approx_eq(&sigma.to_density_matrix(), &rho.to_density_matrix(), 1e-12));
    }

    #[test]
    fn random_pure_codeword_gives_same_certificate() {
        let g = group(&["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let psi = random_pure_state(&g, &mut rng).unwrap();
        for gen in g.generators() {
            assert!((psi.expectation(gen).unwrap() - ONE).norm() < 1e-10);
        }
        let w = find_witness(&g, SiteLabel::unchecked(2), SiteLabel::unchecked(5)).unwrap();
        let p = synthesize_protocol(&w).unwrap();
        for b in 0..8 {
            let o = p.outcomes_for_branch(b);
            let (sigma, _) = dense_run_protocol(&psi, &p, &o).unwrap();
            let (si, sj) = post_measurement_stabilizers(&p, &o).unwrap();
            let r = corrective_unitaries(&si, &sj).unwrap();
            let fixed = apply_two_qubit_correction(&sigma.to_density_matrix(), &r.first, &r.second);
            let f = DenseState::Mixed { n_sites: 2, d: 2, rho: fixed }.fidelity_with(&phi_plus());
            assert!(f > 1.0 - 1e-9, "branch {b}: fidelity {f}");
        }
    }

    #[test]
    fn clifford_table_is_complete() {
        assert_eq!(clifford_table().len(), 24);
        for d in CliffordDescriptor::all() {
            let u = clifford_matrix(&d);
            assert!(mat_approx_eq(&(&u * u.adjoint()), &DMatrix::identity(2, 2), 1e-12));
        }
    }

    #[test]
    fn measurement_basis_rows_are_eigenvectors() {
        for l in [Letter::X, Letter::Y, Letter::Z] {
            let v = measurement_basis(l);
            let m = letter_matrix(l);
            for (a, sign) in [(0usize, 1.0), (1, -1.0)] {
                let e = v.row(a).adjoint();
                assert!((m * e - e * c(sign, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn state_validation() {
        let bad = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.1), c(0.0, 0.1), c(0.5, 0.0)]);
        assert!(DenseState::mixed(1, 2, bad).is_err());
        let neg = DMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), ZERO, ZERO, c(-0.5, 0.0)]);
        assert!(DenseState::mixed(1, 2, neg).is_err());
        assert!(DenseState::pure(1, 2, DVector::from_vec(vec![ONE, ONE])).is_err());
    }
}
