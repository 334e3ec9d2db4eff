//! Symbolic squaring.
//!
//! Entry `(i, j)` of a symbolic square is the *canonical string* of the
//! inner product of row `i` and column `j`: the terms that involve diagonal
//! symbols first, in a fixed order, then every other term sorted. The
//! symmetric result keeps the lesser of the `(i, j)` and `(j, i)` strings.
//! Strings are interned, so a [`StringArray`] stores each distinct string
//! once.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SquareArray;
use crate::symbols::{is_diag_distinct, SymbolId, SymbolMatrix};

/// One product `first · second`; the first factor comes from the row.
///
/// Packed so that integer order equals lexicographic order on the pair.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term(u64);

impl Term {
    #[inline]
    pub fn new(first: SymbolId, second: SymbolId) -> Self {
        Term(((first.get() as u64) << 32) | second.get() as u64)
    }

    pub fn first(self) -> SymbolId {
        SymbolId::new((self.0 >> 32) as u32).expect("packed from a SymbolId")
    }

    pub fn second(self) -> SymbolId {
        SymbolId::new(self.0 as u32).expect("packed from a SymbolId")
    }

    /// The same term with its factors exchanged.
    #[inline]
    pub fn swapped(self) -> Self {
        Term(self.0.rotate_left(32))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.first(), self.second())
    }
}

impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.first(), self.second()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (a, b) = <(SymbolId, SymbolId)>::deserialize(d)?;
        Ok(Term::new(a, b))
    }
}

/// The ordered term sequence of one symbolic inner product.
///
/// Ordering is lexicographic over the whole term sequence, diagonal part
/// first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalString {
    terms: Box<[Term]>,
    diag_len: u8,
}

impl CanonicalString {
    fn from_parts(terms: Box<[Term]>, diagonal: bool) -> Self {
        CanonicalString { terms, diag_len: if diagonal { 1 } else { 2 } }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn diag_part(&self) -> &[Term] {
        &self.terms[..(self.diag_len as usize).min(self.terms.len())]
    }

    pub fn offdiag_part(&self) -> &[Term] {
        &self.terms[(self.diag_len as usize).min(self.terms.len())..]
    }

    pub fn is_diagonal(&self) -> bool {
        self.diag_len == 1
    }
}

impl fmt::Debug for CanonicalString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}|{:?}", self.diag_part(), self.offdiag_part())
    }
}

/// Canonical string of `row · col` at location `(i, j)`.
///
/// `row[i]` and `col[j]` are taken to be the diagonal symbols. For `i == j`
/// the diagonal part is the single term `(row[i], col[i])`; otherwise it is
/// `(row[i], col[i]), (row[j], col[j])`.
pub fn canonical_string(row: &[SymbolId], col: &[SymbolId], i: usize, j: usize) -> Result<CanonicalString> {
    let n = row.len();
    if col.len() != n {
        return Err(Error::DimensionMismatch { left: n, right: col.len() });
    }
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, dim: n });
        }
    }
    let mut terms = Vec::with_capacity(n);
    terms.push(Term::new(row[i], col[i]));
    if i != j {
        terms.push(Term::new(row[j], col[j]));
    }
    let head = terms.len();
    terms.extend((0..n).filter(|&k| k != i && k != j).map(|k| Term::new(row[k], col[k])));
    terms[head..].sort_unstable();
    Ok(CanonicalString::from_parts(terms.into_boxed_slice(), i == j))
}

/// A square array of interned canonical strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringArray {
    index: SquareArray<u32>,
    table: Vec<CanonicalString>,
}

impl StringArray {
    pub fn from_strings(strings: &SquareArray<CanonicalString>) -> Self {
        let mut interner = Interner::default();
        let index = strings.map(|s| interner.intern(s.terms(), s.is_diagonal()));
        StringArray { index, table: interner.table }
    }

    pub fn dim(&self) -> usize {
        self.index.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> &CanonicalString {
        &self.table[*self.index.get(i, j) as usize]
    }

    pub fn num_distinct(&self) -> usize {
        self.table.len()
    }

    pub fn to_strings(&self) -> SquareArray<CanonicalString> {
        self.index.map(|&e| self.table[e as usize].clone())
    }

    pub(crate) fn index(&self) -> &SquareArray<u32> {
        &self.index
    }

    pub(crate) fn table(&self) -> &[CanonicalString] {
        &self.table
    }
}

#[derive(Default)]
struct Interner {
    ids: HashMap<Box<[Term]>, u32>,
    table: Vec<CanonicalString>,
}

impl Interner {
    fn intern(&mut self, terms: &[Term], diagonal: bool) -> u32 {
        if let Some(&id) = self.ids.get(terms) {
            return id;
        }
        let id = self.table.len() as u32;
        let boxed: Box<[Term]> = terms.into();
        self.table.push(CanonicalString::from_parts(boxed.clone(), diagonal));
        self.ids.insert(boxed, id);
        id
    }
}

/// Rows per parallel work unit; interning proceeds chunk by chunk in row
/// order, so table numbering does not depend on scheduling.
const ROW_CHUNK: usize = 8;

/// Symbolic square of a symmetric matrix whose diagonal symbols do not occur
/// off the diagonal.
pub fn sym_sqr(m: &SymbolMatrix) -> Result<StringArray> {
    m.require_symmetric()?;
    if !is_diag_distinct(m) {
        return Err(Error::NotDiagDistinct);
    }
    Ok(sym_sqr_unchecked(m))
}

pub(crate) fn sym_sqr_unchecked(m: &SymbolMatrix) -> StringArray {
    let n = m.dim();
    let mut interner = Interner::default();
    let mut index = vec![0u32; n * n];
    let rows: Vec<usize> = (0..n).collect();
    for chunk in rows.chunks(ROW_CHUNK) {
        let computed: Vec<Vec<Vec<Term>>> =
            chunk.par_iter().map(|&i| (i..n).map(|j| lesser_string(m, i, j)).collect()).collect();
        for (&i, row) in chunk.iter().zip(computed) {
            for (off, terms) in row.into_iter().enumerate() {
                let j = i + off;
                let id = interner.intern(&terms, i == j);
                index[i * n + j] = id;
                index[j * n + i] = id;
            }
        }
    }
    let index = SquareArray::from_vec(n, index).expect("n² entries");
    StringArray { index, table: interner.table }
}

/// Lesser of the `(i, j)` and `(j, i)` strings of a symmetric matrix.
///
/// With `M` symmetric, the `(j, i)` string is the `(i, j)` string with every
/// term's factors exchanged.
fn lesser_string(m: &SymbolMatrix, i: usize, j: usize) -> Vec<Term> {
    let n = m.dim();
    let ri = m.row(i);
    let rj = m.row(j);
    if i == j {
        let mut t: Vec<Term> = Vec::with_capacity(n);
        t.push(Term::new(ri[i], ri[i]));
        t.extend((0..n).filter(|&k| k != i).map(|k| Term::new(ri[k], ri[k])));
        t[1..].sort_unstable();
        return t;
    }
    let mij = ri[j];
    let fwd_head = [Term::new(ri[i], mij), Term::new(mij, rj[j])];
    let rev_head = [Term::new(rj[j], mij), Term::new(mij, ri[i])];
    let mut fwd: Vec<Term> = Vec::with_capacity(n);
    fwd.extend_from_slice(&fwd_head);
    fwd.extend((0..n).filter(|&k| k != i && k != j).map(|k| Term::new(ri[k], rj[k])));
    fwd[2..].sort_unstable();
    match fwd_head.cmp(&rev_head) {
        Ordering::Less => fwd,
        Ordering::Greater => swapped_sorted(&fwd, rev_head),
        Ordering::Equal => {
            let rev = swapped_sorted(&fwd, rev_head);
            if rev < fwd {
                rev
            } else {
                fwd
            }
        }
    }
}

fn swapped_sorted(fwd: &[Term], head: [Term; 2]) -> Vec<Term> {
    let mut rev = Vec::with_capacity(fwd.len());
    rev.extend_from_slice(&head);
    rev.extend(fwd[2..].iter().map(|t| t.swapped()));
    rev[2..].sort_unstable();
    rev
}

/// Three-factor product `D1(i) · M(i, j) · D2(j)` at every location.
pub type Triple = [SymbolId; 3];

/// Diagonal sandwich `D1 · M · D2`, kept symbolic and unsymmetrized.
pub fn sym_mult(d1: &[SymbolId], m: &SymbolMatrix, d2: &[SymbolId]) -> Result<SquareArray<Triple>> {
    let n = m.dim();
    for len in [d1.len(), d2.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { left: len, right: n });
        }
    }
    Ok(SquareArray::from_fn(n, |i, j| [d1[i], *m.get(i, j), d2[j]]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcm::{build_pcm, color_matrix};
    use crate::symbols::{distinct_count, substitute, sym_sub, symbol_matrix, SubstitutionMode};

    fn ids(v: &[u32]) -> Vec<SymbolId> {
        v.iter().map(|&x| SymbolId::new(x).unwrap()).collect()
    }

    #[test]
    fn term_order_swaps_and_packs() {
        let a = SymbolId::new(2).unwrap();
        let b = SymbolId::new(7).unwrap();
        let t = Term::new(a, b);
        assert_eq!((t.first(), t.second()), (a, b));
        assert_eq!(t.swapped(), Term::new(b, a));
        assert!(Term::new(a, b) < Term::new(b, a));
    }

    #[test]
    fn factor_order_distinguishes_strings() {
        // alpha = 1, beta = 2; the first two positions play the diagonal role
        let s1 = canonical_string(&ids(&[9, 9, 1, 2]), &ids(&[9, 9, 2, 1]), 0, 1).unwrap();
        let s2 = canonical_string(&ids(&[9, 9, 1, 1]), &ids(&[9, 9, 2, 2]), 0, 1).unwrap();
        assert_ne!(s1, s2);
        assert_eq!(s1.offdiag_part().len(), 2);
    }

    #[test]
    fn one_by_one_string() {
        let s = canonical_string(&ids(&[4]), &ids(&[4]), 0, 0).unwrap();
        assert_eq!(s.diag_part(), &[Term::new(SymbolId::new(4).unwrap(), SymbolId::new(4).unwrap())]);
        assert!(s.offdiag_part().is_empty());
    }

    #[test]
    fn canonical_string_rejects_bad_input() {
        assert!(canonical_string(&ids(&[1, 2]), &ids(&[1]), 0, 0).is_err());
        assert!(canonical_string(&ids(&[1, 2]), &ids(&[1, 2]), 0, 2).is_err());
    }

    #[test]
    fn sym_sqr_requires_preconditions() {
        let nonsym = symbol_matrix(vec![vec![3, 1], vec![2, 3]]).unwrap();
        assert!(matches!(sym_sqr(&nonsym), Err(Error::NotSymmetric { .. })));
        let mixed = symbol_matrix(vec![vec![3, 3], vec![3, 4]]).unwrap();
        assert!(matches!(sym_sqr(&mixed), Err(Error::NotDiagDistinct)));
    }

    #[test]
    fn lesser_string_matches_direct_definition() {
        let m = symbol_matrix(vec![
            vec![9, 1, 2, 3],
            vec![1, 8, 3, 1],
            vec![2, 3, 9, 2],
            vec![3, 1, 2, 7],
        ])
        .unwrap();
        let s = sym_sqr(&m).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let col_j: Vec<SymbolId> = m.column(j).copied().collect();
                let col_i: Vec<SymbolId> = m.column(i).copied().collect();
                let a = canonical_string(m.row(i), &col_j, i, j).unwrap();
                let b = canonical_string(m.row(j), &col_i, j, i).unwrap();
                assert_eq!(s.get(i, j), &a.min(b), "({i},{j})");
            }
        }
    }

    /// Cells of the lifted-automorphism orbit partition of a PCM after
    /// merging each location with its transpose.
    fn symmetric_orbit_count(base: &SquareArray<u32>) -> usize {
        let o = crate::oracle::pcm_orbits(base).unwrap();
        let n = o.dim();
        let mut root: Vec<usize> = (0..o.num_cells()).collect();
        fn find(r: &mut [usize], mut x: usize) -> usize {
            while r[x] != x {
                x = r[x];
            }
            x
        }
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (find(&mut root, o.cell(i, j)), find(&mut root, o.cell(j, i)));
                root[a.max(b)] = a.min(b);
            }
        }
        (0..root.len()).filter(|&x| find(&mut root, x) == x).count()
    }

    #[test]
    fn ones_pcm_symbol_counts() {
        let ones = symbol_matrix(vec![vec![1; 3]; 3]).unwrap();
        let pcm = build_pcm(&color_matrix(&ones).unwrap());
        let mut m = substitute(&pcm.values).unwrap();
        let mut counts = vec![distinct_count(&m)];
        for _ in 0..3 {
            m = sym_sub(&sym_sqr(&m).unwrap(), SubstitutionMode::Plain).unwrap();
            counts.push(distinct_count(&m));
        }
        // the stable pattern is a symmetric union of orbits, so 10 cells is the most it can reach
        assert_eq!(symmetric_orbit_count(&SquareArray::filled(3, 1)), 10);
        assert_eq!(counts, vec![5, 9, 10, 10]);
    }

    #[test]
    fn sandwich_triples() {
        let m = symbol_matrix(vec![vec![5, 1], vec![2, 6]]).unwrap();
        let d1 = ids(&[7, 8]);
        let d2 = ids(&[9, 10]);
        let t = sym_mult(&d1, &m, &d2).unwrap();
        assert_eq!(*t.get(0, 1), [d1[0], SymbolId::new(1).unwrap(), d2[1]]);
        assert_eq!(*t.get(1, 0), [d1[1], SymbolId::new(2).unwrap(), d2[0]]);
        assert!(sym_mult(&d1[..1], &m, &d2).is_err());
    }
}
