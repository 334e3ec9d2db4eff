use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::{SymbolId, SymbolMatrix};
use crate::error::{Error, Result};
use crate::grid::SquareArray;

/// A partition of the `n²` locations of a square array.
///
/// Cells are numbered in row-major order of their first location, which is
/// also the cell's representative. Two patterns are equal iff they describe
/// the same partition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pattern {
    n: usize,
    cell_of: Vec<u32>,
    representatives: Vec<u32>,
}

impl Pattern {
    /// Pattern of `n²` labels given in row-major order.
    pub fn from_labels<T: Eq + Hash>(n: usize, labels: &[T]) -> Self {
        assert_eq!(labels.len(), n * n, "label count must be n²");
        let mut seen: HashMap<&T, u32> = HashMap::new();
        let mut cell_of = Vec::with_capacity(labels.len());
        let mut representatives = Vec::new();
        for (loc, l) in labels.iter().enumerate() {
            let next = seen.len() as u32;
            let c = *seen.entry(l).or_insert_with(|| {
                representatives.push(loc as u32);
                next
            });
            cell_of.push(c);
        }
        Pattern { n, cell_of, representatives }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn num_cells(&self) -> usize {
        self.representatives.len()
    }

    pub fn cell(&self, i: usize, j: usize) -> usize {
        self.cell_of[i * self.n + j] as usize
    }

    pub fn cell_of(&self) -> &[u32] {
        &self.cell_of
    }

    /// Representative (first) location of the cell holding `(i, j)`.
    pub fn representative(&self, i: usize, j: usize) -> (usize, usize) {
        let r = self.representatives[self.cell(i, j)] as usize;
        (r / self.n, r % self.n)
    }

    /// Representative locations, one per cell, in cell order.
    pub fn representatives(&self) -> Vec<(usize, usize)> {
        self.representatives
            .iter()
            .map(|&r| (r as usize / self.n, r as usize % self.n))
            .collect()
    }

    /// Locations of every cell, each list in row-major order.
    pub fn cells(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.num_cells()];
        for (loc, &c) in self.cell_of.iter().enumerate() {
            out[c as usize].push((loc / self.n, loc % self.n));
        }
        out
    }

    /// Symbol matrix with cell `c` holding id `c + 1`.
    pub fn to_symbols(&self) -> SymbolMatrix {
        let ids = self
            .cell_of
            .iter()
            .map(|&c| SymbolId::from_rank(c as usize).expect("cell count fits u32"))
            .collect();
        SquareArray::from_vec(self.n, ids).expect("cell_of has n² entries")
    }

    /// Canonical labels of the diagonal locations (first occurrence order).
    pub fn diagonal_classes(&self) -> Vec<u32> {
        let diag: Vec<u32> = (0..self.n).map(|i| self.cell_of[i * self.n + i]).collect();
        let mut seen: HashMap<u32, u32> = HashMap::new();
        diag.iter()
            .map(|c| {
                let next = seen.len() as u32;
                *seen.entry(*c).or_insert(next)
            })
            .collect()
    }

    fn check_same_dim(&self, other: &Pattern) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }
}

/// Pattern of any square array: locations share a cell iff entries are equal.
pub fn pattern_of<T: Eq + Hash>(m: &SquareArray<T>) -> Pattern {
    Pattern::from_labels(m.dim(), m.as_slice())
}

/// 0 where both patterns assign the same representative location to `(i, j)`,
/// 1 elsewhere.
pub fn pattern_difference(p1: &Pattern, p2: &Pattern) -> Result<SquareArray<u8>> {
    p1.check_same_dim(p2)?;
    Ok(SquareArray::from_fn(p1.n, |i, j| {
        u8::from(p1.representative(i, j) != p2.representative(i, j))
    }))
}

/// True iff every cell of `p1` lies inside a cell of `p2`.
pub fn refines(p1: &Pattern, p2: &Pattern) -> Result<bool> {
    p1.check_same_dim(p2)?;
    let mut target: Vec<Option<u32>> = vec![None; p1.num_cells()];
    for (c1, c2) in p1.cell_of.iter().zip(&p2.cell_of) {
        match target[*c1 as usize] {
            None => target[*c1 as usize] = Some(*c2),
            Some(t) if t != *c2 => return Ok(false),
            Some(_) => {}
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(rows: Vec<Vec<u32>>) -> Pattern {
        pattern_of(&SquareArray::from_rows(rows).unwrap())
    }

    #[test]
    fn constant_matrix_is_one_cell() {
        let p = pat(vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(p.num_cells(), 1);
        assert_eq!(p.representatives(), vec![(0, 0)]);
    }

    #[test]
    fn two_cell_pattern() {
        let p = pat(vec![vec![2, 1], vec![1, 2]]);
        assert_eq!(p.cells(), vec![vec![(0, 0), (1, 1)], vec![(0, 1), (1, 0)]]);
        assert_eq!(p.representatives(), vec![(0, 0), (0, 1)]);
    }

    #[test]
    fn all_distinct_gives_singletons() {
        let p = pat((0..3).map(|i| (0..3).map(|j| 9 - 3 * i - j).collect()).collect());
        assert_eq!(p.num_cells(), 9);
        let reps = p.representatives();
        let mut sorted = reps.clone();
        sorted.sort();
        assert_eq!(reps, sorted);
    }

    #[test]
    fn difference_against_itself_is_zero() {
        let p = pat(vec![vec![3, 1, 2], vec![1, 3, 1], vec![2, 1, 4]]);
        assert!(pattern_difference(&p, &p).unwrap().as_slice().iter().all(|&x| x == 0));
    }

    #[test]
    fn difference_singletons_vs_one_cell() {
        let fine = pat(vec![vec![1, 2], vec![3, 4]]);
        let coarse = pat(vec![vec![1, 1], vec![1, 1]]);
        let d = pattern_difference(&fine, &coarse).unwrap();
        assert_eq!(d.to_rows(), vec![vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn crossing_patterns_are_incomparable() {
        let a = pat(vec![vec![1, 1, 2], vec![3, 3, 2], vec![4, 4, 4]]);
        let b = pat(vec![vec![1, 2, 2], vec![1, 3, 3], vec![4, 4, 4]]);
        assert!(!refines(&a, &b).unwrap());
        assert!(!refines(&b, &a).unwrap());
        assert!(refines(&a, &a).unwrap());
    }

    #[test]
    fn dimension_mismatch() {
        let a = pat(vec![vec![1]]);
        let b = pat(vec![vec![1, 1], vec![1, 1]]);
        assert!(refines(&a, &b).is_err());
        assert!(pattern_difference(&a, &b).is_err());
    }

    #[test]
    fn diagonal_classes_are_canonical() {
        let p = pat(vec![vec![7, 1, 1], vec![1, 5, 1], vec![1, 1, 7]]);
        assert_eq!(p.diagonal_classes(), vec![0, 1, 0]);
    }
}
