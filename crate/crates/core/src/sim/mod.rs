//! Protocol execution engines and the full pairwise certificate check.

pub mod dense;
pub mod tableau;

use crate::error::{Error, Result};
use crate::pauli::PauliOperator;
use crate::stabilizer::StabilizerGroup;
use crate::witness::{
    corrective_unitaries, post_measurement_stabilizers, synthesize_protocol, uncrossed_bipartition, witness_map,
    MeasurementProtocol, Outcomes,
};
use dense::{apply_two_qubit_correction, phi_plus, DenseState, RotatedState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::str::FromStr;

pub use dense::{dense_projector, dense_run_protocol};
pub use tableau::{tableau_measure, tableau_run_protocol, StabilizerTableau};

pub const DEFAULT_FIDELITY_TOLERANCE: f64 = 1e-9;
/// Tableau mode enumerates every branch up to this count and samples above.
pub const MAX_ENUMERATED_BRANCHES: u64 = 1 << 12;
/// Branch probabilities at or below this are treated as impossible outcomes.
pub const ZERO_PROBABILITY: f64 = 1e-12;
pub const REPORT_SCHEMA: &str = "stabcert/certificate/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    Dense,
    Tableau,
    Both,
}

impl VerifyMode {
    fn dense(self) -> bool {
        matches!(self, VerifyMode::Dense | VerifyMode::Both)
    }

    fn tableau(self) -> bool {
        matches!(self, VerifyMode::Tableau | VerifyMode::Both)
    }
}

impl FromStr for VerifyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(VerifyMode::Dense),
            "tableau" => Ok(VerifyMode::Tableau),
            "both" => Ok(VerifyMode::Both),
            other => Err(Error::Domain(format!("unknown mode {other:?}; expected dense, tableau or both"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub mode: VerifyMode,
    pub fidelity_tolerance: f64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Seed for branch sampling in tableau mode.
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { mode: VerifyMode::Both, fidelity_tolerance: DEFAULT_FIDELITY_TOLERANCE, workers: None, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub pair: (usize, usize),
    pub witness_found: bool,
    pub s_i: Option<String>,
    pub s_j: Option<String>,
    pub bases: BTreeMap<usize, char>,
    pub branch_count: u64,
    pub branches_checked: u64,
    pub sampled: bool,
    /// Branches that are impossible outcomes; skipped.
    pub zero_probability_branches: u64,
    /// Branches where the two engines disagree on possibility.
    pub zero_probability_mismatch: u64,
    pub min_fidelity: Option<f64>,
    pub max_sign_mismatch: u64,
    /// Pre-correction stabilizers of branch 0, naming the Bell state reached.
    pub bell_class: Option<(String, String)>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub schema: String,
    pub mode: VerifyMode,
    pub n_qubits: usize,
    pub k: usize,
    pub generators: Vec<String>,
    pub fidelity_tolerance: f64,
    pub seed: u64,
    pub pairs: Vec<PairReport>,
    pub all_pairs_certified: bool,
    /// A side of a bipartition crossed by no certified pair, if any.
    pub uncrossed_bipartition: Option<Vec<usize>>,
    pub passed: bool,
}

/// Checks that each pair with a witness is steered into `|φ+⟩` on every
/// outcome branch and that the certified pairs cross every bipartition.
///
/// Returns the report on success and `CertificateFailure` for the first
/// failing pair otherwise.
pub fn verify_mfnl_certificate(g: &StabilizerGroup, options: &VerifyOptions) -> Result<CertificateReport> {
    match options.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Domain(format!("cannot build worker pool: {e}")))?
            .install(|| verify_inner(g, options)),
        None => verify_inner(g, options),
    }
}

fn verify_inner(g: &StabilizerGroup, options: &VerifyOptions) -> Result<CertificateReport> {
    let report = build_report(g, options)?;
    if let Some(bad) = report.pairs.iter().find(|p| p.witness_found && !p.passed) {
        return Err(Error::CertificateFailure { a: bad.pair.0, b: bad.pair.1, detail: failure_detail(bad, options) });
    }
    if let Some(q) = &report.uncrossed_bipartition {
        let pair = report.pairs.iter().find(|p| !p.witness_found).map_or((0, 0), |p| p.pair);
        return Err(Error::CertificateFailure {
            a: pair.0,
            b: pair.1,
            detail: format!("no certified pair crosses the bipartition {q:?}"),
        });
    }
    Ok(report)
}

fn failure_detail(p: &PairReport, options: &VerifyOptions) -> String {
    format!(
        "min fidelity {:?} (tolerance {:e}), sign mismatches {}, engine disagreements on zero-probability branches {}",
        p.min_fidelity, options.fidelity_tolerance, p.max_sign_mismatch, p.zero_probability_mismatch
    )
}

/// Like [`verify_mfnl_certificate`] but returns failing reports instead of
/// an error.
pub fn build_report(g: &StabilizerGroup, options: &VerifyOptions) -> Result<CertificateReport> {
    if options.mode.dense() && g.n_qubits() > dense::MAX_MATRIX_QUBITS {
        return Err(Error::capacity("qubits for dense verification", dense::MAX_MATRIX_QUBITS as u64, g.n_qubits() as u64));
    }
    let witnesses = witness_map(g)?;
    let rho = if options.mode.dense() { Some(dense_projector(g)?) } else { None };
    let pairs: Vec<PairReport> = witnesses
        .par_iter()
        .map(|(&pair, w)| match w {
            Some(w) => verify_pair(g, pair, &synthesize_protocol(w)?, rho.as_ref(), options),
            None => Ok(PairReport::missing(pair)),
        })
        .collect::<Result<_>>()?;
    let certified: Vec<(usize, usize)> = pairs.iter().filter(|p| p.witness_found && p.passed).map(|p| p.pair).collect();
    let uncrossed = uncrossed_bipartition(g.n_qubits(), &certified);
    let passed = uncrossed.is_none() && pairs.iter().all(|p| !p.witness_found || p.passed);
    Ok(CertificateReport {
        schema: REPORT_SCHEMA.into(),
        mode: options.mode,
        n_qubits: g.n_qubits(),
        k: g.k(),
        generators: g.generators().iter().map(ToString::to_string).collect(),
        fidelity_tolerance: options.fidelity_tolerance,
        seed: options.seed,
        all_pairs_certified: pairs.iter().all(|p| p.witness_found),
        pairs,
        uncrossed_bipartition: uncrossed,
        passed,
    })
}

impl CertificateReport {
    /// Rebuilds the report from its echoed generators and settings and
    /// checks that it reproduces this one.
    pub fn recheck(&self) -> Result<StabilizerGroup> {
        let g = StabilizerGroup::from_strs(&self.generators)?;
        let options = VerifyOptions { mode: self.mode, fidelity_tolerance: self.fidelity_tolerance, workers: None, seed: self.seed };
        let fresh = build_report(&g, &options)?;
        if fresh != *self {
            return Err(Error::Domain("report does not match a fresh verification of its generators".into()));
        }
        Ok(g)
    }
}

impl PairReport {
    fn missing(pair: (usize, usize)) -> Self {
        PairReport {
            pair,
            witness_found: false,
            s_i: None,
            s_j: None,
            bases: BTreeMap::new(),
            branch_count: 0,
            branches_checked: 0,
            sampled: false,
            zero_probability_branches: 0,
            zero_probability_mismatch: 0,
            min_fidelity: None,
            max_sign_mismatch: 0,
            bell_class: None,
            passed: false,
        }
    }
}

#[derive(Default)]
struct BranchResult {
    fidelity: Option<f64>,
    dense_zero: Option<bool>,
    tableau_zero: Option<bool>,
    sign_mismatch: bool,
}

impl BranchResult {
    fn zero_probability(&self) -> bool {
        self.dense_zero.or(self.tableau_zero).unwrap_or(false)
    }

    fn engines_disagree(&self) -> bool {
        matches!((self.dense_zero, self.tableau_zero), (Some(a), Some(b)) if a != b)
    }
}

fn verify_pair(
    g: &StabilizerGroup,
    pair: (usize, usize),
    p: &MeasurementProtocol,
    rho: Option<&DenseState>,
    options: &VerifyOptions,
) -> Result<PairReport> {
    let m = p.measured.len();
    let branch_count = 1u64 << m;
    let enumerate_all = options.mode.dense() || branch_count <= MAX_ENUMERATED_BRANCHES;
    let branches: Vec<u64> = if enumerate_all {
        (0..branch_count).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ ((pair.0 as u64) << 32 | pair.1 as u64));
        let mut picked: Vec<u64> = (0..MAX_ENUMERATED_BRANCHES)
            .map(|_| rng.random::<u64>() & (branch_count - 1))
            .collect();
        picked.sort_unstable();
        picked.dedup();
        picked
    };
    let rotated = rho.map(|r| RotatedState::new(r, p)).transpose()?;
    let results: Vec<BranchResult> = branches
        .par_iter()
        .map(|&b| check_branch(g, p, &p.outcomes_for_branch(b), rotated.as_ref(), options.mode))
        .collect::<Result<_>>()?;

    let zero = results.iter().filter(|r| r.zero_probability()).count() as u64;
    let disagree = results.iter().filter(|r| r.engines_disagree()).count() as u64;
    let mismatch = results.iter().filter(|r| r.sign_mismatch).count() as u64;
    let min_fidelity = results.iter().filter_map(|r| r.fidelity).reduce(f64::min);
    let fid_ok = min_fidelity.is_none_or(|f| f >= 1.0 - options.fidelity_tolerance);
    let (si, sj) = post_measurement_stabilizers(p, &p.outcomes_for_branch(0))?;
    let bell_class = Some((si.to_string(), sj.to_string()));
    Ok(PairReport {
        pair,
        witness_found: true,
        s_i: Some(p.witness.s_i.to_string()),
        s_j: Some(p.witness.s_j.to_string()),
        bases: p.measured.iter().map(|m| (m.site.index(), m.basis.as_char())).collect(),
        branch_count,
        branches_checked: branches.len() as u64,
        sampled: !enumerate_all,
        zero_probability_branches: zero,
        zero_probability_mismatch: disagree,
        min_fidelity,
        max_sign_mismatch: mismatch,
        bell_class,
        passed: fid_ok && disagree == 0 && mismatch == 0 && zero < branches.len() as u64,
    })
}

fn check_branch(
    g: &StabilizerGroup,
    p: &MeasurementProtocol,
    outcomes: &Outcomes,
    rotated: Option<&RotatedState>,
    mode: VerifyMode,
) -> Result<BranchResult> {
    let (si, sj) = post_measurement_stabilizers(p, outcomes)?;
    let rule = corrective_unitaries(&si, &sj)?;
    let mut out = BranchResult::default();
    if let Some(rot) = rotated {
        let (block, prob) = rot.branch(outcomes)?;
        out.dense_zero = Some(prob <= ZERO_PROBABILITY);
        if prob > ZERO_PROBABILITY {
            let sigma = block / num_complex::Complex64::new(prob, 0.0);
            let corrected = apply_two_qubit_correction(&sigma, &rule.first, &rule.second);
            let state = DenseState::Mixed { n_sites: 2, d: 2, rho: corrected };
            out.fidelity = Some(state.fidelity_with(&phi_plus()));
        }
    }
    if mode.tableau() {
        match tableau_run_protocol(g, p, outcomes) {
            Ok((ti, tj)) => {
                out.tableau_zero = Some(false);
                let xx = PauliOperator::from_letters(&[crate::Letter::X; 2], false);
                let zz = PauliOperator::from_letters(&[crate::Letter::Z; 2], false);
                out.sign_mismatch = ti != si || tj != sj || rule.apply(&ti) != xx || rule.apply(&tj) != zz;
            }
            Err(Error::Contradiction { .. }) => out.tableau_zero = Some(true),
            Err(Error::CertificateFailure { .. }) => out.sign_mismatch = true,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabilizer::random::random_gme_group;

    fn five() -> StabilizerGroup {
        StabilizerGroup::from_strs(&["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]).unwrap()
    }

    #[test]
    fn five_qubit_both_modes() {
        let report = verify_mfnl_certificate(&five(), &VerifyOptions::default()).unwrap();
        assert!(report.passed);
        assert_eq!(report.pairs.len(), 10);
        for p in &report.pairs {
            assert_eq!((p.branch_count, p.branches_checked, p.zero_probability_branches), (8, 8, 0));
            assert!(p.min_fidelity.unwrap() >= 1.0 - 1e-9);
            assert_eq!(p.max_sign_mismatch, 0);
        }
    }

    #[test]
    fn product_group_rejected_before_simulation() {
        let g = StabilizerGroup::from_strs(&["ZII", "IZI", "IIZ"]).unwrap();
        assert!(matches!(verify_mfnl_certificate(&g, &VerifyOptions::default()), Err(Error::NotGme { .. })));
    }

    #[test]
    fn random_six_qubit_group_passes() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let g = random_gme_group(6, 4, &mut rng, 200).unwrap();
        let report = verify_mfnl_certificate(&g, &VerifyOptions::default()).unwrap();
        assert_eq!(report.pairs.len(), 15);
    }

    #[test]
    fn report_is_worker_count_independent() {
        let g = five();
        let one = VerifyOptions { workers: Some(1), ..VerifyOptions::default() };
        let four = VerifyOptions { workers: Some(4), ..VerifyOptions::default() };
        let a = serde_json::to_string(&verify_mfnl_certificate(&g, &one).unwrap()).unwrap();
        let b = serde_json::to_string(&verify_mfnl_certificate(&g, &four).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tableau_mode_samples_large_groups() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let g = random_gme_group(16, 10, &mut rng, 50).unwrap();
        let opts = VerifyOptions { mode: VerifyMode::Tableau, ..VerifyOptions::default() };
        assert!(matches!(build_report(&g, &VerifyOptions::default()), Err(Error::Capacity { .. })));
        let w = crate::witness::find_witness(&g, crate::SiteLabel::unchecked(1), crate::SiteLabel::unchecked(16)).unwrap();
        let p = verify_pair(&g, (1, 16), &synthesize_protocol(&w).unwrap(), None, &opts).unwrap();
        assert!(p.passed);
        assert!(p.sampled && p.branches_checked <= MAX_ENUMERATED_BRANCHES && p.min_fidelity.is_none());
    }

    #[test]
    fn missing_pair_still_certified_through_crossing_pairs() {
        let g = StabilizerGroup::from_strs(&["YIYYXI", "XXZIXZ", "XIZXZY", "ZYYIYZ"]).unwrap();
        let report = verify_mfnl_certificate(&g, &VerifyOptions::default()).unwrap();
        assert!(report.passed && !report.all_pairs_certified);
        assert_eq!(report.uncrossed_bipartition, None);
        let missing: Vec<_> = report.pairs.iter().filter(|p| !p.witness_found).map(|p| p.pair).collect();
        assert_eq!(missing, [(1, 6)]);
    }

    #[test]
    fn zero_probability_branches_are_skipped_consistently() {
        let g = StabilizerGroup::from_strs(&["-XZXZY", "ZXZZZ", "-YXZYI", "-YIXXY", "XIZXI"]).unwrap();
        let report = verify_mfnl_certificate(&g, &VerifyOptions::default()).unwrap();
        assert!(report.pairs.iter().any(|p| p.zero_probability_branches > 0));
        assert!(report.pairs.iter().all(|p| p.zero_probability_mismatch == 0));
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("both".parse::<VerifyMode>().unwrap(), VerifyMode::Both);
        assert!("fast".parse::<VerifyMode>().is_err());
    }
}
