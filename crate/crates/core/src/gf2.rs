//! Word-packed vectors and matrices over GF(2).

use crate::error::{Error, Result};
use std::fmt;

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length bit vector packed into `u64` words.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; words_for(len)] }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = BitVec::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Bit `i` of the result is bit `i` of `value` (least significant first).
    pub fn from_u64(len: usize, value: u64) -> Self {
        let mut v = BitVec::zeros(len);
        for i in 0..len.min(WORD) {
            v.set(i, (value >> i) & 1 == 1);
        }
        v
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = BitVec::zeros(len);
        v.set(i, true);
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let ones: u32 = self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum();
        ones % 2 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * WORD + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        Ok(())
    }
}

/// A dense binary matrix stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    ncols: usize,
    rows: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        BitMatrix { ncols, rows: vec![BitVec::zeros(ncols); nrows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(ncols: usize, rows: Vec<BitVec>) -> Self {
        assert!(rows.iter().all(|r| r.len() == ncols), "row length mismatch");
        BitMatrix { ncols, rows }
    }

    pub fn from_nested(rows: &[Vec<u8>]) -> Self {
        let ncols = rows.first().map_or(0, Vec::len);
        let rows = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), ncols, "ragged matrix");
                BitVec::from_bits(r.iter().map(|&b| b & 1 == 1))
            })
            .collect();
        BitMatrix { ncols, rows }
    }

    pub fn to_nested(&self) -> Vec<Vec<u8>> {
        self.rows.iter().map(BitVec::to_bits).collect()
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value)
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.rows[r]
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn column(&self, c: usize) -> BitVec {
        BitVec::from_bits(self.rows.iter().map(|r| r.get(c)))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVec::is_zero)
    }

    pub fn xor_assign(&mut self, other: &BitMatrix) {
        assert_eq!(self.nrows(), other.nrows());
        assert_eq!(self.ncols, other.ncols);
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            a.xor_assign(b);
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows() == self.ncols
            && (0..self.ncols).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.ncols, self.nrows());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.ncols, other.nrows(), "inner dimensions differ");
        let mut out = BitMatrix::zeros(self.nrows(), other.ncols);
        for (r, row) in self.rows.iter().enumerate() {
            for k in row.ones() {
                out.rows[r].xor_assign(&other.rows[k]);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(self.ncols, v.len());
        BitVec::from_bits(self.rows.iter().map(|r| r.dot(v)))
    }

    /// `A^T M A`, the congruence that transforms commutation matrices under a
    /// change of generating set.
    pub fn congruence(&self, a: &BitMatrix) -> BitMatrix {
        a.transpose().mul(self).mul(a)
    }

    pub fn rank(&self) -> usize {
        let mut basis = EchelonBasis::new(self.ncols);
        self.rows.iter().filter(|r| basis.insert(r)).count()
    }

    pub fn inverse(&self) -> Result<BitMatrix> {
        let n = self.nrows();
        if n != self.ncols {
            return Err(Error::Dimension(format!("cannot invert a {n}x{} matrix", self.ncols)));
        }
        let mut left = self.clone();
        let mut right = BitMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| left.get(r, col)).ok_or(Error::SingularMatrix)?;
            left.rows.swap(col, pivot);
            right.rows.swap(col, pivot);
            for r in 0..n {
                if r != col && left.get(r, col) {
                    let (lrow, rrow) = (left.rows[col].clone(), right.rows[col].clone());
                    left.rows[r].xor_assign(&lrow);
                    right.rows[r].xor_assign(&rrow);
                }
            }
        }
        Ok(right)
    }

    pub fn is_invertible(&self) -> bool {
        self.nrows() == self.ncols && self.rank() == self.ncols
    }

    /// Some `x` with `self * x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &BitVec) -> Option<BitVec> {
        assert_eq!(b.len(), self.nrows());
        let m = self.nrows();
        let mut rows: Vec<(BitVec, bool)> =
            self.rows.iter().cloned().zip((0..m).map(|i| b.get(i))).collect();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.ncols {
            let Some(p) = (next..m).find(|&r| rows[r].0.get(col)) else { continue };
            rows.swap(next, p);
            let (prow, pb) = rows[next].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != next && row.0.get(col) {
                    row.0.xor_assign(&prow);
                    row.1 ^= pb;
                }
            }
            pivots.push(col);
            next += 1;
        }
        if rows[next..].iter().any(|(_, rhs)| *rhs) {
            return None;
        }
        let mut x = BitVec::zeros(self.ncols);
        for (r, &col) in pivots.iter().enumerate() {
            x.set(col, rows[r].1);
        }
        Some(x)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.nrows(), self.ncols)?;
        for r in &self.rows {
            writeln!(f, "  {r:?}")?;
        }
        write!(f, "]")
    }
}

/// Incrementally built row-echelon basis that remembers, for every stored
/// row, which inserted vectors were combined to produce it.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    len: usize,
    rows: Vec<(usize, BitVec, Combo)>,
    inserted: usize,
}

/// Growable set of inserted-vector indices, as packed bits.
#[derive(Clone, Debug, Default)]
struct Combo(Vec<u64>);

impl Combo {
    fn flip(&mut self, i: usize) {
        if self.0.len() <= i / WORD {
            self.0.resize(i / WORD + 1, 0);
        }
        self.0[i / WORD] ^= 1u64 << (i % WORD);
    }

    fn xor_assign(&mut self, other: &Combo) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), 0);
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= *b;
        }
    }

    fn indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &w) in self.0.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(wi * WORD + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }
}

impl EchelonBasis {
    pub fn new(len: usize) -> Self {
        EchelonBasis { len, rows: Vec::new(), inserted: 0 }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce_tracked(&self, v: &BitVec) -> (BitVec, Combo) {
        let mut residual = v.clone();
        let mut combo = Combo::default();
        for (pivot, row, row_combo) in &self.rows {
            if residual.get(*pivot) {
                residual.xor_assign(row);
                combo.xor_assign(row_combo);
            }
        }
        (residual, combo)
    }

    /// Residual of `v` after elimination against the basis.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        self.reduce_tracked(v).0
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts `v`; returns whether it was independent of the current basis.
    /// Every call counts as an inserted vector for [`EchelonBasis::express`].
    pub fn insert(&mut self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.len);
        let index = self.inserted;
        self.inserted += 1;
        let (residual, mut combo) = self.reduce_tracked(v);
        match residual.first_one() {
            None => false,
            Some(pivot) => {
                combo.flip(index);
                self.rows.push((pivot, residual, combo));
                true
            }
        }
    }

    /// Indices of inserted vectors whose sum equals `v`, if `v` is in the span.
    pub fn express(&self, v: &BitVec) -> Option<Vec<usize>> {
        let (residual, combo) = self.reduce_tracked(v);
        residual.is_zero().then(|| combo.indices())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_rank(rows: &[Vec<u8>], ncols: usize) -> usize {
        // size of the span, by enumeration, is 2^rank
        let vals: Vec<u64> =
            rows.iter().map(|r| r.iter().enumerate().map(|(i, &b)| (b as u64) << i).sum()).collect();
        let mut span = std::collections::HashSet::new();
        for mask in 0u64..(1 << vals.len()) {
            let mut acc = 0u64;
            for (i, v) in vals.iter().enumerate() {
                if (mask >> i) & 1 == 1 {
                    acc ^= v;
                }
            }
            span.insert(acc);
        }
        let _ = ncols;
        span.len().trailing_zeros() as usize
    }

    #[test]
    fn identity_inverse() {
        let i = BitMatrix::identity(70);
        assert_eq!(i.inverse().unwrap(), i);
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = BitMatrix::from_nested(&[vec![1, 1], vec![1, 1]]);
        assert_eq!(m.inverse(), Err(Error::SingularMatrix));
    }

    #[test]
    fn solve_inconsistent() {
        let m = BitMatrix::from_nested(&[vec![1, 0], vec![1, 0]]);
        assert!(m.solve(&BitVec::from_bits([true, false])).is_none());
        assert!(m.solve(&BitVec::from_bits([true, true])).is_some());
    }

    #[test]
    fn echelon_expresses_combination() {
        let mut b = EchelonBasis::new(3);
        assert!(b.insert(&BitVec::from_bits([true, true, false])));
        assert!(b.insert(&BitVec::from_bits([false, true, true])));
        assert!(!b.insert(&BitVec::from_bits([true, false, true])));
        assert_eq!(b.express(&BitVec::from_bits([true, false, true])), Some(vec![0, 1]));
        assert_eq!(b.express(&BitVec::from_bits([true, false, false])), None);
    }

    proptest! {
        #[test]
        fn rank_matches_span_enumeration(rows in proptest::collection::vec(proptest::collection::vec(0u8..2, 6), 1..7)) {
            let m = BitMatrix::from_nested(&rows);
            prop_assert_eq!(m.rank(), brute_rank(&rows, 6));
        }

        #[test]
        fn inverse_is_two_sided(rows in proptest::collection::vec(proptest::collection::vec(0u8..2, 5), 5)) {
            let m = BitMatrix::from_nested(&rows);
            match m.inverse() {
                Ok(inv) => {
                    prop_assert_eq!(m.mul(&inv), BitMatrix::identity(5));
                    prop_assert_eq!(inv.mul(&m), BitMatrix::identity(5));
                }
                Err(_) => prop_assert!(m.rank() < 5),
            }
        }

        #[test]
        fn solve_returns_solution(rows in proptest::collection::vec(proptest::collection::vec(0u8..2, 4), 4), b in proptest::collection::vec(0u8..2, 4)) {
            let m = BitMatrix::from_nested(&rows);
            let b = BitVec::from_bits(b.into_iter().map(|x| x == 1));
            if let Some(x) = m.solve(&b) {
                prop_assert_eq!(m.mul_vec(&x), b);
            }
        }
    }
}
