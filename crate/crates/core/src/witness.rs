//! Two-site anticommutation witnesses and the local measurement protocols
//! they induce.
//!
//! For parties `α1 ≠ α2` a witness is a pair of group elements whose
//! single-site factors anticommute exactly at `α1` and `α2`. Measuring every
//! other party in a common eigenbasis of the two factors leaves `α1, α2` in a
//! state stabilized by two signed two-qubit Paulis, which local Cliffords
//! rotate onto `(+XX, +ZZ)`.

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec, EchelonBasis};
use crate::pauli::{Letter, PauliOperator, SiteLabel};
use crate::stabilizer::{CommutationMatrixSet, StabilizerGroup};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Largest generator count for the `v` search (the search space is `2^k − 1`).
pub const MAX_WITNESS_GENERATORS: usize = 62;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessPair {
    pub pair: (SiteLabel, SiteLabel),
    /// Exponent vectors over the generating set, `s_i = Π g_m^{u_m}`.
    pub u: Vec<u8>,
    pub v: Vec<u8>,
    pub s_i: PauliOperator,
    pub s_j: PauliOperator,
}

impl WitnessPair {
    /// Builds a witness from exponent vectors and checks the two-site pattern.
    pub fn from_vectors(g: &StabilizerGroup, pair: (SiteLabel, SiteLabel), u: Vec<u8>, v: Vec<u8>) -> Result<Self> {
        check_pair(g.n_qubits(), pair)?;
        if u.len() != g.k() || v.len() != g.k() {
            return Err(Error::Dimension(format!("exponent vectors must have length k = {}", g.k())));
        }
        let s_i = g.element(mask_of(&u));
        let s_j = g.element(mask_of(&v));
        let w = WitnessPair { pair, u, v, s_i, s_j };
        w.check_pattern()?;
        Ok(w)
    }

    /// Sites (1-based) where the factors of `s_i` and `s_j` anticommute.
    pub fn anticommuting_sites(&self) -> Vec<usize> {
        (0..self.s_i.n_sites()).filter(|&s| self.s_i.site_commutation(&self.s_j, s) == 1).map(|s| s + 1).collect()
    }

    pub fn check_pattern(&self) -> Result<()> {
        let (a, b) = (self.pair.0.index().min(self.pair.1.index()), self.pair.0.index().max(self.pair.1.index()));
        let sites = self.anticommuting_sites();
        if sites != [a, b] {
            return Err(Error::InvalidWitness(format!(
                "factors anticommute at sites {sites:?}, expected exactly [{a}, {b}]"
            )));
        }
        if self.u.iter().all(|&b| b == 0) || self.v.iter().all(|&b| b == 0) || self.u == self.v {
            return Err(Error::InvalidWitness("u and v must be distinct and nonzero".into()));
        }
        Ok(())
    }
}

fn mask_of(bits: &[u8]) -> u64 {
    bits.iter().enumerate().filter(|(_, &b)| b & 1 == 1).map(|(m, _)| 1u64 << m).sum()
}

fn check_pair(n: usize, (a, b): (SiteLabel, SiteLabel)) -> Result<()> {
    SiteLabel::new(a.index(), n)?;
    SiteLabel::new(b.index(), n)?;
    if a == b {
        return Err(Error::Domain(format!("witness pair needs two distinct parties, got ({a}, {b})")));
    }
    Ok(())
}

/// Searches the lexicographically first `v` whose image under `C^{α1}` is not
/// in the span of the images under the other parties (party `α2` is implied
/// by the all-party sum vanishing), then solves for `u` with
/// `u^T C^α v = δ_{α,α1}` on the remaining parties.
///
/// The search is exhaustive, so `NoWitness` means no pair of group elements
/// has the two-site pattern even though the group is GME.
pub fn find_witness(g: &StabilizerGroup, a1: SiteLabel, a2: SiteLabel) -> Result<WitnessPair> {
    check_pair(g.n_qubits(), (a1, a2))?;
    let c = g.commutation_matrices();
    match search(g, &c, a1, a2)? {
        Some(w) => Ok(w),
        None => Err(missing(g, (a1.index(), a2.index()))),
    }
}

fn missing(g: &StabilizerGroup, (a, b): (usize, usize)) -> Error {
    match g.is_gme() {
        Ok(verdict) => match verdict.violating {
            Some(bipartition) => Error::NotGme { bipartition, pair: Some((a.min(b), a.max(b))) },
            None => Error::NoWitness { a: a.min(b), b: a.max(b) },
        },
        Err(e) => e,
    }
}

fn search(g: &StabilizerGroup, c: &CommutationMatrixSet, a1: SiteLabel, a2: SiteLabel) -> Result<Option<WitnessPair>> {
    let k = g.k();
    if k > MAX_WITNESS_GENERATORS {
        return Err(Error::capacity("generator count for witness search", MAX_WITNESS_GENERATORS as u64, k as u64));
    }
    let others: Vec<usize> = (0..g.n_qubits()).filter(|&s| s != a1.offset() && s != a2.offset()).collect();
    let c1 = c.by_offset(a1.offset());
    for t in 1u64..(1u64 << k) {
        // v_1 is the most significant bit, so t walks v in lexicographic order
        let v = BitVec::from_bits((0..k).map(|m| (t >> (k - 1 - m)) & 1 == 1));
        let target = c1.mul_vec(&v);
        if target.is_zero() {
            continue;
        }
        let mut basis = EchelonBasis::new(k);
        let mut span = Vec::new();
        for &alpha in &others {
            let w = c.by_offset(alpha).mul_vec(&v);
            if basis.insert(&w) {
                span.push(w);
            }
        }
        if basis.contains(&target) {
            continue;
        }
        let mut rows = vec![target];
        rows.extend(span);
        let w = BitMatrix::from_rows(k, rows);
        let rhs = BitVec::unit(w.nrows(), 0);
        let u = w.solve(&rhs).expect("independent rows always admit a solution");
        let witness = WitnessPair {
            pair: (a1, a2),
            u: u.to_bits(),
            v: v.to_bits(),
            s_i: g.element(mask_of(&u.to_bits())),
            s_j: g.element(mask_of(&v.to_bits())),
        };
        witness.check_pattern()?;
        return Ok(Some(witness));
    }
    Ok(None)
}

/// All unordered pairs `(a, b)` with `a < b`.
pub fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect()
}

/// Witness search for every pair of a GME group; pairs without a witness
/// map to `None`.
pub fn witness_map(g: &StabilizerGroup) -> Result<BTreeMap<(usize, usize), Option<WitnessPair>>> {
    let n = g.n_qubits();
    if n < 2 {
        return Err(Error::Domain("witnesses need at least two parties".into()));
    }
    if let Some(bipartition) = g.is_gme()?.violating {
        return Err(Error::NotGme { bipartition, pair: None });
    }
    let c = g.commutation_matrices();
    let pairs = all_pairs(n);
    let found: Vec<Result<Option<WitnessPair>>> = pairs
        .par_iter()
        .map(|&(a, b)| search(g, &c, SiteLabel::unchecked(a), SiteLabel::unchecked(b)))
        .collect();
    pairs.into_iter().zip(found).map(|(pair, r)| Ok((pair, r?))).collect()
}

/// Witnesses for all `N(N−1)/2` unordered pairs, keyed by `(α1, α2)` with
/// `α1 < α2`. Fails with `NotGme` or with `NoWitness` for the first pair
/// lacking one.
pub fn find_all_witnesses(g: &StabilizerGroup) -> Result<BTreeMap<(usize, usize), WitnessPair>> {
    witness_map(g)?
        .into_iter()
        .map(|(pair, w)| w.map(|w| (pair, w)).ok_or(Error::NoWitness { a: pair.0, b: pair.1 }))
        .collect()
}

/// A side `Q ∋ 1` of a bipartition that no listed pair crosses: the
/// connected component of party 1 in the graph of pairs, unless it spans
/// every party.
pub fn uncrossed_bipartition(n: usize, pairs: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut parent: Vec<usize> = (0..=n).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in pairs {
        let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
        parent[ra] = rb;
    }
    let r1 = root(&mut parent, 1);
    let q: Vec<usize> = (1..=n).filter(|&s| root(&mut parent, s) == r1).collect();
    (q.len() < n).then_some(q)
}

/// Exhaustive oracle: does any pair of group elements show the two-site
/// pattern at `(α1, α2)`? Scans all `2^k × 2^k` element pairs.
pub fn pattern_exists_by_enumeration(g: &StabilizerGroup, a1: SiteLabel, a2: SiteLabel) -> Result<bool> {
    let elems = g.enumerate()?;
    let (a, b) = (a1.offset(), a2.offset());
    let n = g.n_qubits();
    Ok(elems.iter().any(|s| {
        elems.iter().any(|t| {
            (0..n).all(|site| {
                let anti = s.site_commutation(t, site) == 1;
                anti == (site == a || site == b)
            })
        })
    }))
}

/// Measurement of one party outside the witness pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasuredParty {
    pub site: SiteLabel,
    /// Pauli whose eigenbasis is measured; outcome 0 is the +1 eigenvector.
    pub basis: Letter,
    /// Sign exponent picked up by `s_i` (resp. `s_j`) for outcomes 0 and 1.
    pub tau_i: [u8; 2],
    pub tau_j: [u8; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementProtocol {
    pub pair: (SiteLabel, SiteLabel),
    /// Measured parties in ascending site order.
    pub measured: Vec<MeasuredParty>,
    pub witness: WitnessPair,
}

/// Outcome bits keyed by 1-based site.
pub type Outcomes = BTreeMap<usize, u8>;

pub fn synthesize_protocol(w: &WitnessPair) -> Result<MeasurementProtocol> {
    w.check_pattern()?;
    let n = w.s_i.n_sites();
    let (a1, a2) = w.pair;
    let mut measured = Vec::with_capacity(n.saturating_sub(2));
    for s in 0..n {
        if s == a1.offset() || s == a2.offset() {
            continue;
        }
        let (li, lj) = (w.s_i.letter(s), w.s_j.letter(s));
        let basis = match (li, lj) {
            (Letter::I, Letter::I) => Letter::Z,
            (Letter::I, l) | (l, Letter::I) => l,
            (l, m) if l == m => l,
            (l, m) => {
                return Err(Error::InvalidWitness(format!("letters {l} and {m} at site {} anticommute", s + 1)));
            }
        };
        let tau = |l: Letter| if l == Letter::I { [0, 0] } else { [0, 1] };
        measured.push(MeasuredParty { site: SiteLabel::unchecked(s + 1), basis, tau_i: tau(li), tau_j: tau(lj) });
    }
    Ok(MeasurementProtocol { pair: (a1, a2), measured, witness: w.clone() })
}

impl MeasurementProtocol {
    pub fn branch_count_log2(&self) -> usize {
        self.measured.len()
    }

    /// Outcome assignment for branch `index`; the first measured party holds
    /// the most significant bit.
    pub fn outcomes_for_branch(&self, index: u64) -> Outcomes {
        let m = self.measured.len();
        self.measured
            .iter()
            .enumerate()
            .map(|(pos, p)| (p.site.index(), ((index >> (m - 1 - pos)) & 1) as u8))
            .collect()
    }

    fn check_outcomes(&self, outcomes: &Outcomes) -> Result<()> {
        if outcomes.len() != self.measured.len() || self.measured.iter().any(|p| !outcomes.contains_key(&p.site.index())) {
            let expected: Vec<usize> = self.measured.iter().map(|p| p.site.index()).collect();
            let got: Vec<usize> = outcomes.keys().copied().collect();
            return Err(Error::Domain(format!("outcomes must cover exactly sites {expected:?}, got {got:?}")));
        }
        if let Some((site, bit)) = outcomes.iter().find(|(_, &b)| b > 1) {
            return Err(Error::Domain(format!("outcome {bit} at site {site} is not a bit")));
        }
        Ok(())
    }

    /// The sites of the pair in ascending order.
    pub fn ordered_pair(&self) -> [SiteLabel; 2] {
        let (a, b) = self.pair;
        if a < b { [a, b] } else { [b, a] }
    }
}

/// Signed two-qubit stabilizers `(s̃_i, s̃_j)` of the post-measurement state on
/// the pair (sites in ascending order).
pub fn post_measurement_stabilizers(p: &MeasurementProtocol, outcomes: &Outcomes) -> Result<(PauliOperator, PauliOperator)> {
    p.check_outcomes(outcomes)?;
    let mut flip_i = 0u8;
    let mut flip_j = 0u8;
    for party in &p.measured {
        let a = outcomes[&party.site.index()] as usize;
        flip_i ^= party.tau_i[a];
        flip_j ^= party.tau_j[a];
    }
    let pair = p.ordered_pair();
    Ok((pair_operator(&p.witness.s_i, pair, flip_i), pair_operator(&p.witness.s_j, pair, flip_j)))
}

/// Letter form of `s` on the two sites with its overall sign, times `(−1)^flip`.
fn pair_operator(s: &PauliOperator, pair: [SiteLabel; 2], flip: u8) -> PauliOperator {
    let negative = s.sign().expect("group elements are Hermitian") ^ (flip == 1);
    PauliOperator::from_letters(&[s.letter(pair[0].offset()), s.letter(pair[1].offset())], negative)
}

/// A signed single-qubit Pauli.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedLetter {
    pub negative: bool,
    pub letter: Letter,
}

impl SignedLetter {
    pub const fn plus(letter: Letter) -> Self {
        SignedLetter { negative: false, letter }
    }

    fn to_operator(self) -> PauliOperator {
        PauliOperator::from_letters(&[self.letter], self.negative)
    }
}

impl std::fmt::Display for SignedLetter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", if self.negative { '-' } else { '+' }, self.letter)
    }
}

/// Single-qubit Clifford `U`, given by `U X U†` and `U Z U†`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CliffordDescriptor {
    pub image_x: SignedLetter,
    pub image_z: SignedLetter,
}

impl CliffordDescriptor {
    pub const IDENTITY: CliffordDescriptor =
        CliffordDescriptor { image_x: SignedLetter::plus(Letter::X), image_z: SignedLetter::plus(Letter::Z) };

    /// All 24 single-qubit Cliffords modulo phase.
    pub fn all() -> Vec<CliffordDescriptor> {
        let letters = [Letter::X, Letter::Y, Letter::Z];
        let mut out = Vec::with_capacity(24);
        for &lx in &letters {
            for &lz in &letters {
                if lx == lz {
                    continue;
                }
                for (nx, nz) in [(false, false), (false, true), (true, false), (true, true)] {
                    out.push(CliffordDescriptor {
                        image_x: SignedLetter { negative: nx, letter: lx },
                        image_z: SignedLetter { negative: nz, letter: lz },
                    });
                }
            }
        }
        out
    }

    /// `U P U†` for a single-qubit operator `P`.
    pub fn conjugate(&self, p: &PauliOperator) -> PauliOperator {
        debug_assert_eq!((p.n_sites(), p.d()), (1, 2));
        let ix = self.image_x.to_operator();
        let iz = self.image_z.to_operator();
        // P = i^phase X^x Z^z
        let mut out = PauliOperator::new(2, vec![0], vec![0], p.phase()).unwrap();
        if p.x()[0] == 1 {
            out.mul_assign(&ix);
        }
        if p.z()[0] == 1 {
            out.mul_assign(&iz);
        }
        out
    }

    /// `P U`: conjugation by `U` followed by conjugation by the Pauli `P`.
    fn then_pauli(&self, p: Letter) -> CliffordDescriptor {
        let flip = |s: SignedLetter| SignedLetter { negative: s.negative ^ p.anticommutes(s.letter), letter: s.letter };
        CliffordDescriptor { image_x: flip(self.image_x), image_z: flip(self.image_z) }
    }

    /// The Clifford sending `a ↦ +X` and `b ↦ +Z` for anticommuting letters.
    fn mapping_to_x_z(a: Letter, b: Letter) -> CliffordDescriptor {
        let x = PauliOperator::from_letters(&[Letter::X], false);
        let z = PauliOperator::from_letters(&[Letter::Z], false);
        let pa = PauliOperator::from_letters(&[a], false);
        let pb = PauliOperator::from_letters(&[b], false);
        CliffordDescriptor::all()
            .into_iter()
            .find(|u| u.conjugate(&pa) == x && u.conjugate(&pb) == z)
            .expect("anticommuting letters map onto (X, Z)")
    }
}

/// Local corrections for one outcome branch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionRule {
    pub first: CliffordDescriptor,
    pub second: CliffordDescriptor,
    /// The stabilizers before correction, identifying the Bell state reached.
    pub pre_correction: (String, String),
}

impl CorrectionRule {
    /// `(U_1 ⊗ U_2) P (U_1 ⊗ U_2)†` for a two-qubit operator.
    pub fn apply(&self, p: &PauliOperator) -> PauliOperator {
        let site = |s: usize| PauliOperator::new(2, vec![p.x()[s]], vec![p.z()[s]], 0).unwrap();
        let c0 = self.first.conjugate(&site(0));
        let c1 = self.second.conjugate(&site(1));
        PauliOperator::new(2, vec![c0.x()[0], c1.x()[0]], vec![c0.z()[0], c1.z()[0]], p.phase() + c0.phase() + c1.phase())
            .unwrap()
    }
}

/// Local Cliffords taking `(s̃_i, s̃_j)` to exactly `(+XX, +ZZ)`.
pub fn corrective_unitaries(si: &PauliOperator, sj: &PauliOperator) -> Result<CorrectionRule> {
    if si.n_sites() != 2 || sj.n_sites() != 2 || si.d() != 2 || sj.d() != 2 {
        return Err(Error::InvalidWitness("corrections act on two-qubit operators".into()));
    }
    let (Some(neg_i), Some(neg_j)) = (si.sign(), sj.sign()) else {
        return Err(Error::InvalidWitness("post-measurement stabilizers must be Hermitian".into()));
    };
    let mut units = [CliffordDescriptor::IDENTITY; 2];
    for (s, unit) in units.iter_mut().enumerate() {
        let (a, b) = (si.letter(s), sj.letter(s));
        if !a.anticommutes(b) {
            return Err(Error::InvalidWitness(format!("letters {a} and {b} at position {} commute", s + 1)));
        }
        *unit = CliffordDescriptor::mapping_to_x_z(a, b);
    }
    let fix = match (neg_i, neg_j) {
        (false, false) => None,
        (true, false) => Some(Letter::Z),
        (false, true) => Some(Letter::X),
        (true, true) => Some(Letter::Y),
    };
    if let Some(p) = fix {
        units[0] = units[0].then_pauli(p);
    }
    let rule = CorrectionRule { first: units[0], second: units[1], pre_correction: (si.to_string(), sj.to_string()) };
    debug_assert_eq!(rule.apply(si).to_string(), "+XX");
    debug_assert_eq!(rule.apply(sj).to_string(), "+ZZ");
    Ok(rule)
}

/// JSON witness certificate for a whole group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub schema: String,
    pub generators: Vec<String>,
    pub pairs: Vec<PairCertificate>,
    /// Pairs for which the exhaustive search found no witness.
    pub missing_pairs: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCertificate {
    pub pair: (usize, usize),
    pub u: Vec<u8>,
    pub v: Vec<u8>,
    pub s_i: String,
    pub s_j: String,
    pub bases: BTreeMap<usize, Letter>,
    pub tau_i: BTreeMap<usize, [u8; 2]>,
    pub tau_j: BTreeMap<usize, [u8; 2]>,
    /// Per-branch corrections, present when the branch count is at most
    /// [`MAX_LISTED_BRANCHES`].
    pub corrections: Option<Vec<BranchCorrection>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchCorrection {
    pub outcomes: BTreeMap<usize, u8>,
    pub stabilizers: (String, String),
    pub first: CliffordDescriptor,
    pub second: CliffordDescriptor,
}

pub const WITNESS_SCHEMA: &str = "stabcert/witness/v1";
pub const MAX_LISTED_BRANCHES: u64 = 1 << 10;

impl WitnessCertificate {
    pub fn build(g: &StabilizerGroup, witnesses: &BTreeMap<(usize, usize), Option<WitnessPair>>) -> Result<Self> {
        let mut pairs = Vec::with_capacity(witnesses.len());
        let mut missing_pairs = Vec::new();
        for (&pair, w) in witnesses {
            let Some(w) = w else {
                missing_pairs.push(pair);
                continue;
            };
            let p = synthesize_protocol(w)?;
            let branches = 1u64 << p.measured.len();
            let corrections = if branches <= MAX_LISTED_BRANCHES {
                let mut list = Vec::with_capacity(branches as usize);
                for b in 0..branches {
                    let outcomes = p.outcomes_for_branch(b);
                    let (si, sj) = post_measurement_stabilizers(&p, &outcomes)?;
                    let rule = corrective_unitaries(&si, &sj)?;
                    list.push(BranchCorrection {
                        outcomes,
                        stabilizers: rule.pre_correction.clone(),
                        first: rule.first,
                        second: rule.second,
                    });
                }
                Some(list)
            } else {
                None
            };
            pairs.push(PairCertificate {
                pair,
                u: w.u.clone(),
                v: w.v.clone(),
                s_i: w.s_i.to_string(),
                s_j: w.s_j.to_string(),
                bases: p.measured.iter().map(|m| (m.site.index(), m.basis)).collect(),
                tau_i: p.measured.iter().map(|m| (m.site.index(), m.tau_i)).collect(),
                tau_j: p.measured.iter().map(|m| (m.site.index(), m.tau_j)).collect(),
                corrections,
            });
        }
        Ok(WitnessCertificate {
            schema: WITNESS_SCHEMA.into(),
            generators: g.generators().iter().map(ToString::to_string).collect(),
            pairs,
            missing_pairs,
        })
    }

    pub fn all_pairs_certified(&self) -> bool {
        self.missing_pairs.is_empty()
    }

    /// Re-derives every entry from the echoed generators and compares.
    pub fn recheck(&self) -> Result<StabilizerGroup> {
        if self.schema != WITNESS_SCHEMA {
            return Err(Error::Domain(format!("unknown schema {}", self.schema)));
        }
        let g = StabilizerGroup::from_strs(&self.generators)?;
        let fail = |pair: (usize, usize), detail: String| Error::CertificateFailure { a: pair.0, b: pair.1, detail };
        let c = g.commutation_matrices();
        for &(a, b) in &self.missing_pairs {
            let (sa, sb) = (SiteLabel::new(a, g.n_qubits())?, SiteLabel::new(b, g.n_qubits())?);
            if search(&g, &c, sa, sb)?.is_some() {
                return Err(fail((a, b), "listed as missing but a witness exists".into()));
            }
        }
        for pc in &self.pairs {
            let pair = (SiteLabel::new(pc.pair.0, g.n_qubits())?, SiteLabel::new(pc.pair.1, g.n_qubits())?);
            let w = WitnessPair::from_vectors(&g, pair, pc.u.clone(), pc.v.clone())?;
            if w.s_i.to_string() != pc.s_i || w.s_j.to_string() != pc.s_j {
                return Err(fail(pc.pair, "s_i/s_j do not match u/v".into()));
            }
            let p = synthesize_protocol(&w)?;
            for m in &p.measured {
                let site = m.site.index();
                if pc.bases.get(&site) != Some(&m.basis)
                    || pc.tau_i.get(&site) != Some(&m.tau_i)
                    || pc.tau_j.get(&site) != Some(&m.tau_j)
                {
                    return Err(fail(pc.pair, format!("protocol mismatch at site {site}")));
                }
            }
            if let Some(list) = &pc.corrections {
                for bc in list {
                    let (si, sj) = post_measurement_stabilizers(&p, &bc.outcomes)?;
                    if (si.to_string(), sj.to_string()) != bc.stabilizers {
                        return Err(fail(pc.pair, format!("stabilizer signs differ for outcomes {:?}", bc.outcomes)));
                    }
                    let rule = CorrectionRule {
                        first: bc.first,
                        second: bc.second,
                        pre_correction: bc.stabilizers.clone(),
                    };
                    if rule.apply(&si).to_string() != "+XX" || rule.apply(&sj).to_string() != "+ZZ" {
                        return Err(fail(pc.pair, format!("correction fails for outcomes {:?}", bc.outcomes)));
                    }
                }
            }
        }
        Ok(g)
    }
}
