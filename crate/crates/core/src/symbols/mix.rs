use serde::{Deserialize, Serialize};

use crate::grid::SquareArray;

/// A multiset in canonical (sorted) form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mix<T>(Vec<T>);

impl<T: Ord> Mix<T> {
    pub fn new(mut items: Vec<T>) -> Self {
        items.sort_unstable();
        Mix(items)
    }
}

impl<T> Mix<T> {
    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A multiset of per-row or per-column mixes.
pub type NestedMix<T> = Mix<Mix<T>>;

pub fn diag_mix<T: Ord + Clone>(m: &SquareArray<T>) -> Mix<T> {
    Mix::new(m.diagonal().cloned().collect())
}

pub fn full_mix<T: Ord + Clone>(m: &SquareArray<T>) -> Mix<T> {
    Mix::new(m.as_slice().to_vec())
}

pub fn row_mix<T: Ord + Clone>(m: &SquareArray<T>) -> NestedMix<T> {
    Mix::new(m.rows().map(|r| Mix::new(r.to_vec())).collect())
}

pub fn col_mix<T: Ord + Clone>(m: &SquareArray<T>) -> NestedMix<T> {
    Mix::new((0..m.dim()).map(|j| Mix::new(m.column(j).cloned().collect())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diag_mix_is_sorted() {
        let m = SquareArray::from_rows(vec![vec![12, 1], vec![1, 3]]).unwrap();
        assert_eq!(diag_mix(&m).as_slice(), &[3, 12]);
    }

    #[test]
    fn col_and_row_mixes_differ_for_nonsymmetric() {
        let m = SquareArray::from_rows(vec![vec![1, 2], vec![1, 3]]).unwrap();
        assert_ne!(row_mix(&m), col_mix(&m));
        assert_eq!(row_mix(&m), col_mix(&m.transpose()));
        assert_eq!(full_mix(&m).as_slice(), &[1, 1, 2, 3]);
    }
}
