//! Stabilizer tableau without destabilizers.
//!
//! A tableau with `k ≤ N` rows represents the maximally mixed state on the
//! stabilized subspace, which is all that single-site Pauli measurements with
//! forced outcomes need.

use crate::error::{Error, Result};
use crate::gf2::EchelonBasis;
use crate::pauli::{Letter, PauliOperator, SiteLabel};
use crate::stabilizer::StabilizerGroup;
use crate::witness::{MeasurementProtocol, Outcomes};
use rand::Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerTableau {
    n_qubits: usize,
    rows: Vec<PauliOperator>,
}

impl StabilizerTableau {
    pub fn from_group(g: &StabilizerGroup) -> Self {
        StabilizerTableau { n_qubits: g.n_qubits(), rows: g.generators().to_vec() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn rows(&self) -> &[PauliOperator] {
        &self.rows
    }

    /// The tableau rows as a validated group.
    pub fn to_group(&self) -> Result<StabilizerGroup> {
        StabilizerGroup::validate_and_canonicalize(self.rows.clone())
    }

    /// If `m` lies in the row span, the signed group element equal to `±m`.
    pub fn span_element(&self, m: &PauliOperator) -> Option<PauliOperator> {
        let mut basis = EchelonBasis::new(2 * self.n_qubits);
        for r in &self.rows {
            basis.insert(&r.symplectic_bits());
        }
        let combo = basis.express(&m.symplectic_bits())?;
        let mut acc = PauliOperator::identity(self.n_qubits, 2);
        for i in combo {
            acc.mul_assign(&self.rows[i]);
        }
        Some(acc)
    }

    /// Measures `basis` at `site` in place and returns the outcome bit.
    pub fn measure<R: Rng + ?Sized>(&mut self, site: SiteLabel, basis: Letter, forced: Option<u8>, rng: &mut R) -> Result<u8> {
        SiteLabel::new(site.index(), self.n_qubits)?;
        if basis == Letter::I {
            return Err(Error::Domain("measurement basis must be X, Y or Z".into()));
        }
        if let Some(f) = forced.filter(|&f| f > 1) {
            return Err(Error::Domain(format!("forced outcome {f} is not a bit")));
        }
        let mut letters = vec![Letter::I; self.n_qubits];
        letters[site.offset()] = basis;
        let m = PauliOperator::from_letters(&letters, false);

        let anti: Vec<usize> = (0..self.rows.len()).filter(|&i| self.rows[i].site_commutation(&m, site.offset()) == 1).collect();
        if let Some((&pivot, rest)) = anti.split_first() {
            let p = self.rows[pivot].clone();
            for &i in rest {
                self.rows[i].mul_assign(&p);
            }
            let outcome = forced.unwrap_or_else(|| rng.random_range(0..2));
            self.rows[pivot] = if outcome == 1 { m.negated() } else { m };
            return Ok(outcome);
        }
        match self.span_element(&m) {
            Some(elem) => {
                let actual = elem.sign().expect("rows are Hermitian") as u8;
                match forced {
                    Some(f) if f != actual => Err(Error::Contradiction { forced: f, actual }),
                    _ => Ok(actual),
                }
            }
            None => {
                let outcome = forced.unwrap_or_else(|| rng.random_range(0..2));
                self.rows.push(if outcome == 1 { m.negated() } else { m });
                Ok(outcome)
            }
        }
    }

    /// Generators of the subgroup supported on `sites`, restricted to those
    /// sites with signs kept.
    pub fn supported_subgroup(&self, sites: &[SiteLabel]) -> Vec<PauliOperator> {
        let keep: Vec<usize> = sites.iter().map(|s| s.offset()).collect();
        let mut rows = self.rows.clone();
        let mut used = vec![false; rows.len()];
        for s in (0..self.n_qubits).filter(|s| !keep.contains(s)) {
            for bit in [true, false] {
                let has = |r: &PauliOperator| if bit { r.x()[s] == 1 } else { r.z()[s] == 1 };
                let Some(pivot) = (0..rows.len()).find(|&i| !used[i] && has(&rows[i])) else {
                    continue;
                };
                used[pivot] = true;
                let p = rows[pivot].clone();
                for (i, r) in rows.iter_mut().enumerate() {
                    if i != pivot && has(r) {
                        r.mul_assign(&p);
                    }
                }
            }
        }
        rows.into_iter()
            .zip(used)
            .filter(|(r, u)| !u && !r.is_identity())
            .map(|(r, _)| {
                let letters: Vec<Letter> = keep.iter().map(|&s| r.letter(s)).collect();
                PauliOperator::from_letters(&letters, r.sign().expect("rows are Hermitian"))
            })
            .collect()
    }
}

/// Value-semantics wrapper around [`StabilizerTableau::measure`].
pub fn tableau_measure<R: Rng + ?Sized>(
    t: &StabilizerTableau,
    site: SiteLabel,
    basis: Letter,
    forced: Option<u8>,
    rng: &mut R,
) -> Result<(u8, StabilizerTableau)> {
    let mut next = t.clone();
    let outcome = next.measure(site, basis, forced, rng)?;
    Ok((outcome, next))
}

/// Runs the protocol with forced outcomes and reads the signed pair
/// stabilizers with the letter patterns of `s_i` and `s_j` on the pair.
pub fn tableau_run_protocol(g: &StabilizerGroup, p: &MeasurementProtocol, outcomes: &Outcomes) -> Result<(PauliOperator, PauliOperator)> {
    if g.n_qubits() != p.witness.s_i.n_sites() {
        return Err(Error::Dimension("protocol and group act on different qubit counts".into()));
    }
    let mut t = StabilizerTableau::from_group(g);
    let mut rng = rand::rng();
    for m in &p.measured {
        let forced = *outcomes
            .get(&m.site.index())
            .ok_or_else(|| Error::Domain(format!("missing outcome for site {}", m.site)))?;
        t.measure(m.site, m.basis, Some(forced), &mut rng)?;
    }
    let pair = p.ordered_pair();
    let sub = StabilizerTableau { n_qubits: 2, rows: t.supported_subgroup(&pair) };
    let read = |s: &PauliOperator| -> Result<PauliOperator> {
        let target = PauliOperator::from_letters(&[s.letter(pair[0].offset()), s.letter(pair[1].offset())], false);
        sub.span_element(&target).ok_or_else(|| Error::CertificateFailure {
            a: pair[0].index(),
            b: pair[1].index(),
            detail: format!("{target} is not stabilized after outcomes {outcomes:?}"),
        })
    };
    Ok((read(&p.witness.s_i)?, read(&p.witness.s_j)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::dense::{dense_projector, dense_run_protocol};
    use crate::stabilizer::random::{random_gme_group, random_group};
    use crate::witness::{find_all_witnesses, post_measurement_stabilizers, synthesize_protocol, WitnessPair};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(i: usize) -> SiteLabel {
        SiteLabel::unchecked(i)
    }

    fn tab(g: &[&str]) -> StabilizerTableau {
        StabilizerTableau::from_group(&StabilizerGroup::from_strs(g).unwrap())
    }

    #[test]
    fn single_qubit_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = tab(&["Z"]);
        let (o, after) = tableau_measure(&t, s(1), Letter::Z, None, &mut rng).unwrap();
        assert_eq!((o, &after), (0, &t));
        assert_eq!(
            tableau_measure(&t, s(1), Letter::Z, Some(1), &mut rng),
            Err(Error::Contradiction { forced: 1, actual: 0 })
        );
        for forced in [0u8, 1] {
            let (o, after) = tableau_measure(&t, s(1), Letter::X, Some(forced), &mut rng).unwrap();
            assert_eq!(o, forced);
            assert_eq!(after.rows()[0].to_string(), if forced == 0 { "+X" } else { "-X" });
        }
        let (o, after) = tableau_measure(&tab(&["-Z"]), s(1), Letter::Z, None, &mut rng).unwrap();
        assert_eq!((o, after.rows().len()), (1, 1));
    }

    #[test]
    fn bell_z_measurement() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for r in [0u8, 1] {
            let (o, after) = tableau_measure(&tab(&["XX", "ZZ"]), s(1), Letter::Z, Some(r), &mut rng).unwrap();
            assert_eq!(o, r);
            let g = after.to_group().unwrap();
            let sign = if r == 0 { "+" } else { "-" };
            let elems: Vec<String> = g.enumerate().unwrap().iter().map(ToString::to_string).collect();
            assert!(elems.contains(&format!("{sign}ZI")));
            assert!(elems.contains(&format!("{sign}IZ")));
        }
    }

    #[test]
    fn outside_span_appends_row() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (o, after) = tableau_measure(&tab(&["ZI"]), s(2), Letter::X, Some(1), &mut rng).unwrap();
        assert_eq!(o, 1);
        assert_eq!(after.rows().len(), 2);
        assert_eq!(after.rows()[1].to_string(), "-IX");
    }

    #[test]
    fn five_qubit_worked_example() {
        let g = StabilizerGroup::from_strs(&["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]).unwrap();
        let w = WitnessPair::from_vectors(&g, (s(1), s(4)), vec![0, 0, 1, 0], vec![0, 0, 0, 1]).unwrap();
        let p = synthesize_protocol(&w).unwrap();
        let o: Outcomes = [(2, 0), (3, 0), (5, 0)].into_iter().collect();
        let (si, sj) = tableau_run_protocol(&g, &p, &o).unwrap();
        assert_eq!((si.to_string(), sj.to_string()), ("+XZ".into(), "+ZX".into()));
        for b in 0..8 {
            let o = p.outcomes_for_branch(b);
            assert_eq!(tableau_run_protocol(&g, &p, &o).unwrap(), post_measurement_stabilizers(&p, &o).unwrap());
        }
    }

    #[test]
    fn engines_agree_on_random_groups() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut checked = 0;
        while checked < 60 {
            let n = rng.random_range(3..=6);
            let g = random_group(n, rng.random_range(1..=n), &mut rng);
            let Ok(all) = find_all_witnesses(&g) else { continue };
            let rho = dense_projector(&g).unwrap();
            for w in all.values() {
                let p = synthesize_protocol(w).unwrap();
                let b = rng.random_range(0..1u64 << p.measured.len());
                let o = p.outcomes_for_branch(b);
                let (si, sj) = match tableau_run_protocol(&g, &p, &o) {
                    Err(Error::Contradiction { .. }) => {
                        assert_eq!(dense_run_protocol(&rho, &p, &o).unwrap_err(), Error::ZeroProbability);
                        continue;
                    }
                    r => r.unwrap(),
                };
                let (sigma, _) = dense_run_protocol(&rho, &p, &o).unwrap();
                assert!((sigma.expectation(&si).unwrap().re - 1.0).abs() < 1e-10);
                assert!((sigma.expectation(&sj).unwrap().re - 1.0).abs() < 1e-10);
                checked += 1;
            }
        }
    }

    #[test]
    fn twenty_qubit_group_runs() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let g = random_gme_group(20, 16, &mut rng, 20).unwrap();
        let w = crate::witness::find_witness(&g, s(3), s(17)).unwrap();
        let p = synthesize_protocol(&w).unwrap();
        for _ in 0..16 {
            let o = p.outcomes_for_branch(rng.random_range(0..1u64 << 18));
            assert_eq!(tableau_run_protocol(&g, &p, &o).unwrap(), post_measurement_stabilizers(&p, &o).unwrap());
        }
    }
}
