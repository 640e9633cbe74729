//! N-site Pauli operators in symplectic form with exact phases.
//!
//! An operator is stored as `ω^phase · X^x Z^z` (tensor product over sites),
//! where `ω = exp(iπ/d)` is a primitive 2d-th root of unity. For qubits this
//! makes `phase` the exponent of `i`, so `Y = i·XZ` is `x = z = 1, phase = 1`.
//! The generalized Pauli matrices act as `X|j⟩ = |j+1 mod d⟩` and
//! `Z|j⟩ = exp(2πij/d)|j⟩`, which gives `ZX = exp(2πi/d)·XZ`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// A 1-based party index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SiteLabel(usize);

impl SiteLabel {
    pub fn new(index: usize, n_sites: usize) -> Result<Self> {
        if index == 0 || index > n_sites {
            return Err(Error::Domain(format!("site {index} outside 1..={n_sites}")));
        }
        Ok(SiteLabel(index))
    }

    /// Builds a label without a range check; callers validate against an
    /// operator when the label is used.
    pub const fn unchecked(index: usize) -> Self {
        SiteLabel(index)
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub(crate) fn offset(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for SiteLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn bits(self) -> (u32, u32) {
        match self {
            Letter::I => (0, 0),
            Letter::X => (1, 0),
            Letter::Y => (1, 1),
            Letter::Z => (0, 1),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    /// Whether two letters anticommute.
    pub fn anticommutes(self, other: Letter) -> bool {
        self != Letter::I && other != Letter::I && self != other
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// The local content of an operator at one site, ignoring global phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SitePauli {
    Qubit(Letter),
    Qudit { x: u32, z: u32 },
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliOperator {
    d: u32,
    x: Vec<u32>,
    z: Vec<u32>,
    phase: u32,
}

impl PauliOperator {
    pub fn new(d: u32, x: Vec<u32>, z: Vec<u32>, phase: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("local dimension {d} < 2")));
        }
        if x.len() != z.len() {
            return Err(Error::Dimension(format!("x has {} sites, z has {}", x.len(), z.len())));
        }
        if x.is_empty() {
            return Err(Error::Domain("operator must act on at least one site".into()));
        }
        let x = x.into_iter().map(|e| e % d).collect();
        let z = z.into_iter().map(|e| e % d).collect();
        Ok(PauliOperator { d, x, z, phase: phase % (2 * d) })
    }

    pub fn identity(n_sites: usize, d: u32) -> Self {
        assert!(n_sites > 0 && d >= 2);
        PauliOperator { d, x: vec![0; n_sites], z: vec![0; n_sites], phase: 0 }
    }

    /// Qubit operator from letters and a sign (`negative` multiplies by −1).
    pub fn from_letters(letters: &[Letter], negative: bool) -> Self {
        let mut op = PauliOperator::identity(letters.len(), 2);
        let mut ys = 0;
        for (s, l) in letters.iter().enumerate() {
            let (x, z) = l.bits();
            op.x[s] = x;
            op.z[s] = z;
            ys += x & z;
        }
        op.phase = (ys + if negative { 2 } else { 0 }) % 4;
        op
    }

    pub fn single_site(n_sites: usize, d: u32, site: SiteLabel, x: u32, z: u32) -> Result<Self> {
        let site = SiteLabel::new(site.index(), n_sites)?;
        let mut op = PauliOperator::identity(n_sites, d);
        op.x[site.offset()] = x % d;
        op.z[site.offset()] = z % d;
        Ok(op)
    }

    pub fn parse(text: &str, d: u32) -> Result<Self> {
        crate::pauli::parse::parse_pauli(text, d)
    }

    pub fn n_sites(&self) -> usize {
        self.x.len()
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn x(&self) -> &[u32] {
        &self.x
    }

    pub fn z(&self) -> &[u32] {
        &self.z
    }

    pub fn phase(&self) -> u32 {
        self.phase
    }

    pub fn is_identity(&self) -> bool {
        self.is_trivial() && self.phase == 0
    }

    /// True when every exponent vanishes (the operator is a multiple of 𝟙).
    pub fn is_trivial(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&e| e == 0)
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).filter(|(&x, &z)| x != 0 || z != 0).count()
    }

    fn check_shape(&self, other: &PauliOperator) -> Result<()> {
        if self.d != other.d {
            return Err(Error::Dimension(format!("local dimensions {} and {}", self.d, other.d)));
        }
        if self.n_sites() != other.n_sites() {
            return Err(Error::Dimension(format!(
                "{} sites vs {} sites",
                self.n_sites(),
                other.n_sites()
            )));
        }
        Ok(())
    }

    /// Group product `self · other` with exact phase.
    pub fn multiply(&self, other: &PauliOperator) -> Result<PauliOperator> {
        self.check_shape(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &PauliOperator) -> PauliOperator {
        let d = self.d;
        let mut out = self.clone();
        self.mul_into(other, &mut out);
        debug_assert_eq!(out.d, d);
        out
    }

    fn mul_into(&self, other: &PauliOperator, out: &mut PauliOperator) {
        let d = self.d;
        // X^a Z^b X^c Z^e = ω_d^{b·c} X^{a+c} Z^{b+e}
        let mut swap: u64 = 0;
        for s in 0..self.n_sites() {
            swap += u64::from(self.z[s]) * u64::from(other.x[s]);
            out.x[s] = (self.x[s] + other.x[s]) % d;
            out.z[s] = (self.z[s] + other.z[s]) % d;
        }
        let two_d = u64::from(2 * d);
        out.phase = ((u64::from(self.phase) + u64::from(other.phase) + 2 * (swap % u64::from(d))) % two_d) as u32;
    }

    /// In-place `self ← self · other`.
    pub(crate) fn mul_assign(&mut self, other: &PauliOperator) {
        let lhs = self.clone();
        lhs.mul_into(other, self);
    }

    /// `self^power`, phase-exact.
    pub fn pow(&self, power: u32) -> PauliOperator {
        let mut acc = PauliOperator::identity(self.n_sites(), self.d);
        for _ in 0..power % (2 * self.d) {
            acc.mul_assign(self);
        }
        acc
    }

    /// Symplectic form `Σ_s (x_a z_b − z_a x_b) mod d`; zero iff the operators
    /// commute.
    pub fn commutation_phase(&self, other: &PauliOperator) -> Result<u32> {
        self.check_shape(other)?;
        Ok(self.commutation_unchecked(other))
    }

    pub(crate) fn commutation_unchecked(&self, other: &PauliOperator) -> u32 {
        let d = u64::from(self.d);
        let mut acc: u64 = 0;
        for s in 0..self.n_sites() {
            acc += u64::from(self.x[s]) * u64::from(other.z[s]);
            acc += (d - u64::from(self.z[s])) * u64::from(other.x[s]);
        }
        (acc % d) as u32
    }

    /// Commutation phase of the single-site factors at `site` (0-based).
    pub(crate) fn site_commutation(&self, other: &PauliOperator, site: usize) -> u32 {
        let d = self.d;
        let a = self.x[site] * other.z[site] % d;
        let b = self.z[site] * other.x[site] % d;
        (a + d - b) % d
    }

    pub fn commutes_with(&self, other: &PauliOperator) -> Result<bool> {
        Ok(self.commutation_phase(other)? == 0)
    }

    /// Sub-operator on `sites`, in ascending site order, with phase dropped.
    pub fn restrict(&self, sites: &[SiteLabel]) -> Result<PauliOperator> {
        if sites.is_empty() {
            return Err(Error::Domain("restriction to an empty site set".into()));
        }
        let mut idx: Vec<usize> = sites.iter().map(|s| s.index()).collect();
        idx.sort_unstable();
        idx.dedup();
        if let Some(&bad) = idx.iter().find(|&&i| i == 0 || i > self.n_sites()) {
            return Err(Error::Domain(format!("site {bad} outside 1..={}", self.n_sites())));
        }
        Ok(PauliOperator {
            d: self.d,
            x: idx.iter().map(|&i| self.x[i - 1]).collect(),
            z: idx.iter().map(|&i| self.z[i - 1]).collect(),
            phase: 0,
        })
    }

    pub fn site_pauli(&self, site: SiteLabel) -> Result<SitePauli> {
        let site = SiteLabel::new(site.index(), self.n_sites())?;
        let (x, z) = (self.x[site.offset()], self.z[site.offset()]);
        Ok(if self.d == 2 {
            SitePauli::Qubit(Letter::from_bits(x == 1, z == 1))
        } else {
            SitePauli::Qudit { x, z }
        })
    }

    /// Qubit letter at a 0-based site.
    pub(crate) fn letter(&self, site: usize) -> Letter {
        debug_assert_eq!(self.d, 2);
        Letter::from_bits(self.x[site] == 1, self.z[site] == 1)
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.n_sites()).map(|s| self.letter(s)).collect()
    }

    fn y_count(&self) -> u32 {
        self.x.iter().zip(&self.z).filter(|(&x, &z)| x == 1 && z == 1).count() as u32
    }

    /// Exponent of `i` in front of the letter form (`Y` counted as a letter).
    fn letter_phase(&self) -> u32 {
        debug_assert_eq!(self.d, 2);
        (self.phase + 4 - self.y_count() % 4) % 4
    }

    /// For qubit operators: Hermitian iff the letter-form prefactor is ±1.
    pub fn is_hermitian(&self) -> bool {
        if self.d == 2 {
            self.letter_phase().is_multiple_of(2)
        } else {
            let neg_closed = self.x.iter().chain(&self.z).all(|&e| (2 * e) % self.d == 0);
            neg_closed && {
                // (ω^p X^x Z^z)† = ω^{-p} ω_d^{x·z} X^x Z^z once -x ≡ x, -z ≡ z
                let xz: u64 = self.x.iter().zip(&self.z).map(|(&a, &b)| u64::from(a * b)).sum();
                let lhs = (2 * u64::from(self.phase)) % u64::from(2 * self.d);
                lhs == (2 * (xz % u64::from(self.d))) % u64::from(2 * self.d)
            }
        }
    }

    /// Sign of a Hermitian qubit operator in letter form: `Some(false)` for
    /// `+`, `Some(true)` for `−`, `None` if not Hermitian.
    pub fn sign(&self) -> Option<bool> {
        match self.letter_phase() {
            0 => Some(false),
            2 => Some(true),
            _ => None,
        }
    }

    /// Multiplies by −1.
    pub fn negated(&self) -> PauliOperator {
        let mut out = self.clone();
        out.phase = (out.phase + self.d) % (2 * self.d);
        out
    }

    /// Symplectic vector `(x_1..x_n, z_1..z_n)` of a qubit operator.
    pub(crate) fn symplectic_bits(&self) -> crate::gf2::BitVec {
        let n = self.n_sites();
        let mut v = crate::gf2::BitVec::zeros(2 * n);
        for s in 0..n {
            v.set(s, self.x[s] == 1);
            v.set(n + s, self.z[s] == 1);
        }
        v
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d == 2 {
            let prefix = ["+", "+i", "-", "-i"][self.letter_phase() as usize];
            write!(f, "{prefix}")?;
            for s in 0..self.n_sites() {
                write!(f, "{}", self.letter(s))?;
            }
            Ok(())
        } else {
            if self.phase != 0 {
                write!(f, "w^{} ", self.phase)?;
            }
            for s in 0..self.n_sites() {
                if s > 0 {
                    write!(f, ".")?;
                }
                let (x, z) = (self.x[s], self.z[s]);
                if x == 0 && z == 0 {
                    write!(f, "I")?;
                }
                match x {
                    0 => {}
                    1 => write!(f, "X")?,
                    _ => write!(f, "X^{x}")?,
                }
                match z {
                    0 => {}
                    1 => write!(f, "Z")?,
                    _ => write!(f, "Z^{z}")?,
                }
            }
            Ok(())
        }
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self}; d={})", self.d)
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    /// Parses a qubit operator; use [`PauliOperator::parse`] for qudits.
    fn from_str(s: &str) -> Result<Self> {
        parse::parse_pauli(s, 2)
    }
}

pub mod parse {
    //! Text grammar.
    //!
    //! Qubits: `[+|-][i] site*` where a site is one of `I X Y Z` or a
    //! parenthesised product such as `(XZ)`. Whitespace, `.` and `⊗` between
    //! sites are ignored.
    //!
    //! Qudits: `[+|-][w^p] site ('.' site)*` where a site is `I` or a product of
    //! factors `X`, `X^a`, `Z`, `Z^b`. `w` is the primitive 2d-th root of unity
    //! and `-` stands for `w^d`.

    use super::*;

    struct Cursor<'a> {
        chars: Vec<(usize, char)>,
        pos: usize,
        _src: &'a str,
    }

    impl<'a> Cursor<'a> {
        fn new(src: &'a str) -> Self {
            Cursor { chars: src.chars().enumerate().map(|(i, c)| (i + 1, c)).collect(), pos: 0, _src: src }
        }

        fn peek(&self) -> Option<char> {
            self.chars.get(self.pos).map(|&(_, c)| c)
        }

        fn column(&self) -> usize {
            self.chars.get(self.pos).map_or(self.chars.len() + 1, |&(col, _)| col)
        }

        fn bump(&mut self) -> Option<char> {
            let c = self.peek();
            self.pos += 1;
            c
        }

        fn skip_ws(&mut self) {
            while matches!(self.peek(), Some(c) if c.is_whitespace()) {
                self.pos += 1;
            }
        }

        fn error(&self, message: impl Into<String>) -> Error {
            Error::Parse { column: self.column(), message: message.into() }
        }

        fn number(&mut self) -> Result<u32> {
            let start = self.pos;
            let mut value: u64 = 0;
            while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                value = value * 10 + u64::from(c.to_digit(10).unwrap());
                if value > u64::from(u32::MAX) {
                    return Err(self.error("exponent too large"));
                }
                self.pos += 1;
            }
            if self.pos == start {
                return Err(self.error("expected a non-negative integer"));
            }
            Ok(value as u32)
        }
    }

    /// Single-site factor as (x, z, phase) in the `ω^phase X^x Z^z` convention.
    fn factor_product(d: u32, factors: &[(u32, u32, u32)]) -> (u32, u32, u32) {
        let mut acc = PauliOperator::identity(1, d);
        for &(x, z, p) in factors {
            let f = PauliOperator { d, x: vec![x % d], z: vec![z % d], phase: p % (2 * d) };
            acc.mul_assign(&f);
        }
        (acc.x[0], acc.z[0], acc.phase)
    }

    pub fn parse_pauli(text: &str, d: u32) -> Result<PauliOperator> {
        if d < 2 {
            return Err(Error::Domain(format!("local dimension {d} < 2")));
        }
        let qudit_syntax = d > 2 || text.contains('^');
        let mut cur = Cursor::new(text);
        cur.skip_ws();
        let mut phase = 0u32;
        match cur.peek() {
            Some('+') => {
                cur.bump();
            }
            Some('-') => {
                cur.bump();
                phase += d;
            }
            _ => {}
        }
        cur.skip_ws();
        if qudit_syntax {
            if cur.peek() == Some('w') {
                cur.bump();
                if cur.bump() != Some('^') {
                    cur.pos -= 1;
                    return Err(cur.error("expected '^' after 'w'"));
                }
                phase += cur.number()?;
                cur.skip_ws();
            }
        } else if cur.peek() == Some('i') {
            cur.bump();
            phase += 1;
            cur.skip_ws();
        }

        let mut x = Vec::new();
        let mut z = Vec::new();
        if qudit_syntax {
            loop {
                cur.skip_ws();
                let mut factors = Vec::new();
                let mut saw_token = false;
                loop {
                    match cur.peek() {
                        Some('I') => {
                            cur.bump();
                            saw_token = true;
                        }
                        Some(c @ ('X' | 'Z')) => {
                            cur.bump();
                            let e = if cur.peek() == Some('^') {
                                cur.bump();
                                cur.number()?
                            } else {
                                1
                            };
                            factors.push(if c == 'X' { (e, 0, 0) } else { (0, e, 0) });
                            saw_token = true;
                        }
                        _ => break,
                    }
                }
                if !saw_token {
                    return Err(cur.error(match cur.peek() {
                        Some(c) => format!("unexpected character '{c}'"),
                        None => "expected a site token".into(),
                    }));
                }
                let (sx, sz, sp) = factor_product(d, &factors);
                x.push(sx);
                z.push(sz);
                phase += sp;
                cur.skip_ws();
                match cur.peek() {
                    Some('.') => {
                        cur.bump();
                    }
                    None => break,
                    Some(c) => return Err(cur.error(format!("unexpected character '{c}'"))),
                }
            }
        } else {
            loop {
                cur.skip_ws();
                match cur.peek() {
                    None => break,
                    Some('.' | '⊗') => {
                        cur.bump();
                    }
                    Some('(') => {
                        cur.bump();
                        let mut factors = Vec::new();
                        loop {
                            match cur.peek() {
                                Some(')') => {
                                    cur.bump();
                                    break;
                                }
                                Some(c) => match letter(c) {
                                    Some(l) => {
                                        cur.bump();
                                        let (lx, lz) = l.bits();
                                        factors.push((lx, lz, lx & lz));
                                    }
                                    None => return Err(cur.error(format!("invalid letter '{c}'"))),
                                },
                                None => return Err(cur.error("unclosed '('")),
                            }
                        }
                        if factors.is_empty() {
                            return Err(cur.error("empty site product"));
                        }
                        let (sx, sz, sp) = factor_product(d, &factors);
                        x.push(sx);
                        z.push(sz);
                        phase += sp;
                    }
                    Some(c) => match letter(c) {
                        Some(l) => {
                            cur.bump();
                            let (lx, lz) = l.bits();
                            x.push(lx);
                            z.push(lz);
                            phase += lx & lz;
                        }
                        None => return Err(cur.error(format!("invalid letter '{c}'"))),
                    },
                }
            }
        }
        if x.is_empty() {
            return Err(cur.error("operator has no sites"));
        }
        PauliOperator::new(d, x, z, phase)
    }

    fn letter(c: char) -> Option<Letter> {
        match c {
            'I' | '1' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }
}
