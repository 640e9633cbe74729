//! Bipartite behaviors, the chained Bell functional `I_{n,d}`, and lower
//! bounds on the genuine nonlocality content built from it.

use crate::error::{Error, Result};
use crate::pauli::SiteLabel;
use nalgebra::Vector4;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::{Mutex, OnceLock};

pub const BEHAVIOR_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_SETTINGS_CAP: usize = 200;
const ANGLE_TOLERANCE: f64 = 1e-10;

/// Two-party behavior `P(a, b | x, y)` with `m` inputs and `d` outputs per
/// party, all indices 0-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Behavior {
    m: usize,
    d: usize,
    table: Vec<f64>,
}

impl Behavior {
    pub fn new(m: usize, d: usize, table: Vec<f64>) -> Result<Self> {
        if m == 0 || d < 2 {
            return Err(Error::Domain(format!("need m ≥ 1 inputs and d ≥ 2 outputs, got m={m}, d={d}")));
        }
        if table.len() != m * m * d * d {
            return Err(Error::Dimension(format!("table has {} entries, expected m²d² = {}", table.len(), m * m * d * d)));
        }
        if let Some(p) = table.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::Domain(format!("probability {p} is not a non-negative real")));
        }
        Ok(Behavior { m, d, table })
    }

    pub fn from_fn(m: usize, d: usize, f: impl Fn(usize, usize, usize, usize) -> f64) -> Result<Self> {
        let mut table = Vec::with_capacity(m * m * d * d);
        for x in 0..m {
            for y in 0..m {
                for a in 0..d {
                    for b in 0..d {
                        table.push(f(x, y, a, b));
                    }
                }
            }
        }
        Behavior::new(m, d, table)
    }

    pub fn inputs(&self) -> usize {
        self.m
    }

    pub fn outputs(&self) -> usize {
        self.d
    }

    pub fn p(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.table[((x * self.m + y) * self.d + a) * self.d + b]
    }

    /// Deterministic local behavior `[a = f(x)]·[b = g(y)]`.
    pub fn deterministic(d: usize, f: &[usize], g: &[usize]) -> Result<Self> {
        if f.len() != g.len() {
            return Err(Error::Dimension("response functions differ in input count".into()));
        }
        Behavior::from_fn(f.len(), d, |x, y, a, b| if a == f[x] && b == g[y] { 1.0 } else { 0.0 })
    }

    /// Born-rule behavior of a two-qubit state for projective measurements
    /// on the Bloch-sphere equator at the given angles.
    pub fn equatorial(state: &Vector4<Complex64>, alice: &[f64], bob: &[f64]) -> Result<Self> {
        if alice.len() != bob.len() {
            return Err(Error::Dimension("both parties need the same number of settings".into()));
        }
        let joint: Vec<Vec<[[f64; 2]; 2]>> =
            alice.iter().map(|&t| bob.iter().map(|&f| equatorial_joint(state, t, f)).collect()).collect();
        Behavior::from_fn(alice.len(), 2, |x, y, a, b| joint[x][y][a][b])
    }
}

/// `(|0⟩ + (−1)^a e^{iθ}|1⟩)/√2`, the eigenvector of `cos θ X + sin θ Y`
/// with eigenvalue `(−1)^a`.
fn equator_eigenvector(theta: f64, a: usize) -> [Complex64; 2] {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let sign = if a == 0 { 1.0 } else { -1.0 };
    [h, Complex64::from_polar(sign * FRAC_1_SQRT_2, theta)]
}

fn equatorial_joint(state: &Vector4<Complex64>, theta: f64, phi: f64) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for (a, row) in out.iter_mut().enumerate() {
        let ea = equator_eigenvector(theta, a);
        for (b, cell) in row.iter_mut().enumerate() {
            let eb = equator_eigenvector(phi, b);
            let amp: Complex64 = (0..4).map(|r| (ea[r >> 1] * eb[r & 1]).conj() * state[r]).sum();
            *cell = amp.norm_sqr();
        }
    }
    out
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn phi_plus() -> Vector4<Complex64> {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    Vector4::new(h, z, z, h)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalingViolation {
    /// `"alice"` if Alice's marginal depends on `y`, `"bob"` otherwise.
    pub party: String,
    pub x: usize,
    pub y: usize,
    pub outcome: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub normalization_residual: f64,
    pub signaling_residual: f64,
    pub worst_normalization: Option<(usize, usize)>,
    pub worst_signaling: Option<SignalingViolation>,
    pub passed: bool,
}

pub fn validate_behavior(b: &Behavior) -> ValidationReport {
    let (m, d) = (b.m, b.d);
    let mut norm = (0.0f64, None);
    for x in 0..m {
        for y in 0..m {
            let total: f64 = (0..d).flat_map(|a| (0..d).map(move |bb| (a, bb))).map(|(a, bb)| b.p(x, y, a, bb)).sum();
            let r = (total - 1.0).abs();
            if r > norm.0 {
                norm = (r, Some((x, y)));
            }
        }
    }
    let mut worst: Option<SignalingViolation> = None;
    let mut consider = |party: &str, x, y, outcome, residual: f64| {
        if residual > worst.as_ref().map_or(0.0, |w| w.residual) {
            worst = Some(SignalingViolation { party: party.into(), x, y, outcome, residual });
        }
    };
    for x in 0..m {
        for a in 0..d {
            let alice = |y| (0..d).map(|bb| b.p(x, y, a, bb)).sum::<f64>();
            let reference = alice(0);
            for y in 1..m {
                consider("alice", x, y, a, (alice(y) - reference).abs());
            }
        }
    }
    for y in 0..m {
        for bb in 0..d {
            let bob = |x| (0..d).map(|a| b.p(x, y, a, bb)).sum::<f64>();
            let reference = bob(0);
            for x in 1..m {
                consider("bob", x, y, bb, (bob(x) - reference).abs());
            }
        }
    }
    let signaling = worst.as_ref().map_or(0.0, |w| w.residual);
    ValidationReport {
        normalization_residual: norm.0,
        signaling_residual: signaling,
        worst_normalization: if norm.0 > BEHAVIOR_TOLERANCE { norm.1 } else { None },
        worst_signaling: worst.filter(|w| w.residual > BEHAVIOR_TOLERANCE),
        passed: norm.0 <= BEHAVIOR_TOLERANCE && signaling <= BEHAVIOR_TOLERANCE,
    }
}

/// `⟨[A_x − B_y + shift]⟩ = Σ_{a,b} ((a − b + shift) mod d) P(a, b | x, y)`.
fn mean_mod(b: &Behavior, x: usize, y: usize, sign_a: i64, shift: i64) -> f64 {
    let d = b.d as i64;
    let mut acc = 0.0;
    for a in 0..b.d {
        for bb in 0..b.d {
            let v = (sign_a * (a as i64 - bb as i64) + shift).rem_euclid(d);
            acc += v as f64 * b.p(x, y, a, bb);
        }
    }
    acc
}

/// `I_{n,d} = Σ_{j<n} (⟨[A_j − B_j]⟩ + ⟨[B_j − A_{j+1}]⟩) + ⟨[A_n − B_n]⟩ + ⟨[B_n − A_1 − 1]⟩`.
pub fn chained_value(b: &Behavior, n: usize, d: usize) -> Result<f64> {
    if b.m != n || b.d != d {
        return Err(Error::Dimension(format!("behavior has m={}, d={}; expected n={n}, d={d}", b.m, b.d)));
    }
    if n < 2 {
        return Err(Error::Domain("the chained functional needs n ≥ 2".into()));
    }
    let mut total = 0.0;
    for j in 0..n - 1 {
        total += mean_mod(b, j, j, 1, 0);
        total += mean_mod(b, j + 1, j, -1, 0);
    }
    total += mean_mod(b, n - 1, n - 1, 1, 0);
    total += mean_mod(b, 0, n - 1, -1, -1);
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainedResult {
    pub n: usize,
    pub d: usize,
    pub value: f64,
    /// `θ_1..θ_n` for Alice followed by `φ_1..φ_n` for Bob.
    pub angles: Vec<f64>,
    pub classical_bound: f64,
}

/// Contribution of the term pairing Alice's input `x` with Bob's input `y`.
fn equatorial_term(theta: f64, phi: f64, agree: bool) -> f64 {
    let j = equatorial_joint(&phi_plus(), theta, phi);
    if agree {
        j[0][0] + j[1][1]
    } else {
        j[0][1] + j[1][0]
    }
}

/// Terms `(x, y, agree)` of `I_{n,2}`; the last term rewards agreement
/// because `[B_n − A_1 − 1]` is 1 exactly when the outputs coincide.
fn chained_terms(n: usize) -> Vec<(usize, usize, bool)> {
    let mut terms = Vec::with_capacity(2 * n);
    for j in 0..n - 1 {
        terms.push((j, j, false));
        terms.push((j + 1, j, false));
    }
    terms.push((n - 1, n - 1, false));
    terms.push((0, n - 1, true));
    terms
}

/// `I_{n,2}` on `|φ+⟩` for equatorial settings, evaluating only the
/// input pairs the functional uses.
pub fn chained_value_equatorial(angles: &[f64]) -> f64 {
    let n = angles.len() / 2;
    chained_terms(n).into_iter().map(|(x, y, agree)| equatorial_term(angles[x], angles[n + y], agree)).sum()
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    (lo + hi) / 2.0
}

/// Evenly spaced equatorial settings `θ_j = 2(j−1)δ`, `φ_j = −(2j−1)δ`
/// with `δ = π/(2n)`.
pub fn evenly_spaced_angles(n: usize) -> Vec<f64> {
    let delta = PI / (2.0 * n as f64);
    let theta = (0..n).map(|j| 2.0 * j as f64 * delta);
    let phi = (0..n).map(|j| -(2.0 * j as f64 + 1.0) * delta);
    theta.chain(phi).collect()
}

/// Coordinate-wise golden-section descent from `start`.
pub fn minimize_equatorial(start: Vec<f64>, tol: f64) -> (f64, Vec<f64>) {
    let n = start.len() / 2;
    let terms = chained_terms(n);
    let touching: Vec<Vec<(usize, usize, bool)>> = (0..2 * n)
        .map(|c| terms.iter().copied().filter(|&(x, y, _)| x == c || n + y == c).collect())
        .collect();
    let mut x = start;
    let width = PI / n as f64;
    for _ in 0..10_000 {
        let mut improvement = 0.0;
        for c in 0..x.len() {
            let local = |t: f64| {
                touching[c]
                    .iter()
                    .map(|&(a, b, agree)| {
                        let theta = if a == c { t } else { x[a] };
                        let phi = if n + b == c { t } else { x[n + b] };
                        equatorial_term(theta, phi, agree)
                    })
                    .sum::<f64>()
            };
            let t = golden_section(local, x[c] - width, x[c] + width, tol);
            let gain = local(x[c]) - local(t);
            if gain > 0.0 {
                improvement += gain;
                x[c] = t;
            }
        }
        if improvement < 1e-15 {
            break;
        }
    }
    (chained_value_equatorial(&x), x)
}

fn minimum_cache() -> &'static Mutex<BTreeMap<usize, ChainedResult>> {
    static CACHE: OnceLock<Mutex<BTreeMap<usize, ChainedResult>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(BTreeMap::new()))
}

/// Minimal `I_{n,2}` over equatorial projective measurements on `|φ+⟩`.
pub fn quantum_chained_minimum(n: usize, d: usize) -> Result<ChainedResult> {
    if n < 2 {
        return Err(Error::Domain(format!("the chained functional needs n ≥ 2, got {n}")));
    }
    if d != 2 {
        return Err(Error::Domain(format!("quantum minimization is implemented for d = 2 only, got {d}")));
    }
    if let Some(hit) = minimum_cache().lock().expect("cache lock").get(&n) {
        return Ok(hit.clone());
    }
    let (value, angles) = minimize_equatorial(evenly_spaced_angles(n), ANGLE_TOLERANCE);
    let result = ChainedResult { n, d, value, angles, classical_bound: (d - 1) as f64 };
    minimum_cache().lock().expect("cache lock").insert(n, result.clone());
    Ok(result)
}

/// `max(0, 1 − I/(d−1))`.
pub fn pair_bound_from_chained(value: f64, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::Domain(format!("d must be at least 2, got {d}")));
    }
    if value.is_nan() || value < 0.0 {
        return Err(Error::Domain(format!("chained value must be non-negative, got {value}")));
    }
    Ok((1.0 - value / (d - 1) as f64).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairBound {
    pub alpha: SiteLabel,
    pub alpha_bar: SiteLabel,
    pub p_lower: f64,
}

impl PairBound {
    pub fn new(alpha: SiteLabel, alpha_bar: SiteLabel, p_lower: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_lower) {
            return Err(Error::Domain(format!("pair bound {p_lower} is outside [0, 1]")));
        }
        if alpha == alpha_bar {
            return Err(Error::Domain(format!("pair ({alpha}, {alpha_bar}) repeats a party")));
        }
        Ok(PairBound { alpha, alpha_bar, p_lower })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateBound {
    pub raw: f64,
    pub clamped: f64,
}

/// `1 − (1/(N−1)) Σ_{α<ᾱ} (1 − p̃^{α|ᾱ})`, raw and clamped at zero.
pub fn theorem2_bound(pair_bounds: &[f64], n: usize) -> Result<AggregateBound> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least two parties, got {n}")));
    }
    let expected = n * (n - 1) / 2;
    if pair_bounds.len() != expected {
        return Err(Error::Domain(format!("expected {expected} pair bounds for N = {n}, got {}", pair_bounds.len())));
    }
    if let Some(p) = pair_bounds.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Domain(format!("pair bound {p} is outside [0, 1]")));
    }
    let deficit: f64 = pair_bounds.iter().map(|p| 1.0 - p).sum();
    let raw = 1.0 - deficit / (n - 1) as f64;
    Ok(AggregateBound { raw, clamped: raw.max(0.0) })
}

/// Aggregate bound from labelled pairs; every unordered pair must appear
/// exactly once.
pub fn theorem2_bound_from_pairs(pairs: &[PairBound], n: usize) -> Result<AggregateBound> {
    let mut seen = BTreeSet::new();
    for p in pairs {
        let (a, b) = (SiteLabel::new(p.alpha.index(), n)?, SiteLabel::new(p.alpha_bar.index(), n)?);
        if !seen.insert((a.min(b), a.max(b))) {
            return Err(Error::Domain(format!("pair ({a}, {b}) listed twice")));
        }
    }
    theorem2_bound(&pairs.iter().map(|p| p.p_lower).collect::<Vec<_>>(), n)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub n_parties: usize,
    pub d: usize,
    /// Per-pair bound needed for a positive aggregate when all pairs agree.
    pub pair_requirement: f64,
    pub n_min: usize,
    pub m: usize,
}

/// Fewest chained settings `n` with quantum minimum below `2(d−1)/N`, and
/// `m = 2n + 3`.
pub fn gmnl_threshold(n_parties: usize, d: usize, cap: usize) -> Result<Threshold> {
    if n_parties < 2 {
        return Err(Error::Domain(format!("need at least two parties, got {n_parties}")));
    }
    let target = 2.0 * (d as f64 - 1.0) / n_parties as f64;
    for n in 2..=cap {
        if quantum_chained_minimum(n, d)?.value < target {
            return Ok(Threshold {
                n_parties,
                d,
                pair_requirement: (n_parties - 2) as f64 / n_parties as f64,
                n_min: n,
                m: 2 * n + 3,
            });
        }
    }
    Err(Error::capacity("chained settings n", cap as u64, cap as u64 + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig1Row {
    pub n_parties: usize,
    pub n_min: usize,
    pub m: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig2Row {
    pub m: usize,
    pub p_nl_lower: f64,
}

pub fn fig1(parties: std::ops::RangeInclusive<usize>) -> Result<Vec<Fig1Row>> {
    let last = *parties.end();
    // warm the cache in parallel up to the largest n needed
    let needed = gmnl_threshold_estimate(last);
    (2..=needed).into_par_iter().map(|n| quantum_chained_minimum(n, 2).map(drop)).collect::<Result<()>>()?;
    parties
        .map(|np| {
            let t = gmnl_threshold(np, 2, DEFAULT_SETTINGS_CAP)?;
            Ok(Fig1Row { n_parties: np, n_min: t.n_min, m: t.m })
        })
        .collect()
}

/// Upper estimate of `n_min` from the closed form plus a margin.
fn gmnl_threshold_estimate(n_parties: usize) -> usize {
    let target = 2.0 / n_parties.max(2) as f64;
    (2..DEFAULT_SETTINGS_CAP)
        .find(|&n| 2.0 * n as f64 * (PI / (4.0 * n as f64)).sin().powi(2) < target)
        .map_or(DEFAULT_SETTINGS_CAP, |n| (n + 2).min(DEFAULT_SETTINGS_CAP))
}

pub fn fig2(n_parties: usize, settings: std::ops::RangeInclusive<usize>) -> Result<Vec<Fig2Row>> {
    let pairs = n_parties * n_parties.saturating_sub(1) / 2;
    settings
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|n| {
            let chained = quantum_chained_minimum(n, 2)?;
            let p = pair_bound_from_chained(chained.value, 2)?;
            let bound = theorem2_bound(&vec![p; pairs], n_parties)?;
            Ok(Fig2Row { m: 2 * n + 3, p_nl_lower: bound.clamped })
        })
        .collect()
}
