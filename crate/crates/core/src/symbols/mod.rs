//! Symbols, patterns and mixes.
//!
//! Every matrix the engine works on is a [`SymbolMatrix`]: a square array of
//! positive ids obtained by substituting the distinct values of some input.
//! Two matrices are only ever compared through their [`Pattern`]s (which
//! locations hold equal symbols) and their [`Mix`]es (multisets of symbols).

mod mix;
mod pattern;
mod substitute;
mod token;

pub use mix::{col_mix, diag_mix, full_mix, row_mix, Mix, NestedMix};
pub use pattern::{pattern_difference, pattern_of, refines, Pattern};
pub use substitute::{
    consistent_substitute, substitute, substitute_all, sym_sub, sym_sub_pair, SubstitutionMode,
};
pub(crate) use substitute::assign_split;
pub use token::{SymbolId, ValueToken};

use std::collections::HashSet;

use crate::grid::SquareArray;

pub type SymbolMatrix = SquareArray<SymbolId>;

/// Builds a symbol matrix from raw positive ids.
pub fn symbol_matrix(rows: Vec<Vec<u32>>) -> crate::Result<SymbolMatrix> {
    let a = SquareArray::from_rows(rows)?;
    let mut out = Vec::with_capacity(a.dim() * a.dim());
    for &v in a.as_slice() {
        out.push(SymbolId::new(v).ok_or(crate::Error::SymbolOutOfRange {
            symbol: 0,
            max: u32::MAX as u64,
        })?);
    }
    SquareArray::from_vec(a.dim(), out)
}

/// Raw ids of a symbol matrix, row by row.
pub fn raw_rows(m: &SymbolMatrix) -> Vec<Vec<u32>> {
    m.rows().map(|r| r.iter().map(|s| s.get()).collect()).collect()
}

/// True when no diagonal symbol also appears off the diagonal.
pub fn is_diag_distinct<T: Eq + std::hash::Hash>(m: &SquareArray<T>) -> bool {
    let diag: HashSet<&T> = m.diagonal().collect();
    let n = m.dim();
    for i in 0..n {
        for j in 0..n {
            if i != j && diag.contains(m.get(i, j)) {
                return false;
            }
        }
    }
    true
}

/// Number of distinct values in an array.
pub fn distinct_count<T: Eq + std::hash::Hash>(m: &SquareArray<T>) -> usize {
    m.as_slice().iter().collect::<HashSet<_>>().len()
}
