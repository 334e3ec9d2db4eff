use serde::{Deserialize, Serialize};

use super::{SymbolId, SymbolMatrix};
use crate::error::{Error, Result};
use crate::grid::SquareArray;
use crate::symsqr::StringArray;

/// Where diagonal ids start in [`sym_sub`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubstitutionMode {
    /// Diagonal ids follow the off-diagonal ones: `n1 + 1 ..`.
    #[default]
    Plain,
    /// Diagonal ids start at `n² · n1 + 1`, which makes the result strictly
    /// diagonally dominant.
    Spd,
}

/// Replaces values by ids `1..=k`, where `k` is the number of distinct values
/// across all arrays and ids follow the sorted order of the values.
pub fn substitute_all<T: Ord>(arrays: &[&SquareArray<T>]) -> Result<Vec<SymbolMatrix>> {
    if let Some(first) = arrays.first() {
        for a in &arrays[1..] {
            first.check_same_dim(a)?;
        }
    }
    let mut distinct: Vec<&T> = arrays.iter().flat_map(|a| a.as_slice()).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if u32::try_from(distinct.len()).is_err() {
        return Err(Error::SymbolOverflow);
    }
    arrays
        .iter()
        .map(|a| {
            let ids = a
                .as_slice()
                .iter()
                .map(|v| {
                    let rank = distinct.binary_search(&v).expect("value was collected");
                    SymbolId::from_rank(rank).expect("count checked above")
                })
                .collect();
            SquareArray::from_vec(a.dim(), ids)
        })
        .collect()
}

pub fn substitute<T: Ord>(a: &SquareArray<T>) -> Result<SymbolMatrix> {
    Ok(substitute_all(&[a])?.pop().expect("one array in, one out"))
}

/// Substitutes a pair with one shared value-to-id map.
pub fn consistent_substitute<T: Ord>(
    a: &SquareArray<T>,
    b: &SquareArray<T>,
) -> Result<(SymbolMatrix, SymbolMatrix)> {
    let mut v = substitute_all(&[a, b])?;
    let sb = v.pop().expect("two arrays");
    let sa = v.pop().expect("two arrays");
    Ok((sa, sb))
}

/// Substitutes a string array: off-diagonal strings get `1..=n1` in sorted
/// order, diagonal strings get the next block starting after `base`.
pub fn sym_sub(s: &StringArray, mode: SubstitutionMode) -> Result<SymbolMatrix> {
    let mut v = assign_split(&[(s.index(), s.table())], mode)?;
    Ok(v.pop().expect("one array"))
}

/// [`sym_sub`] over two arrays with a shared assignment.
pub fn sym_sub_pair(
    s: &StringArray,
    t: &StringArray,
    mode: SubstitutionMode,
) -> Result<(SymbolMatrix, SymbolMatrix)> {
    let mut v = assign_split(&[(s.index(), s.table()), (t.index(), t.table())], mode)?;
    let b = v.pop().expect("two arrays");
    let a = v.pop().expect("two arrays");
    Ok((a, b))
}

const OFF: u8 = 1;
const DIAG: u8 = 2;

/// Id assignment over interned arrays: each part is an index array into a
/// table of keys. Keys are ranked separately on and off the diagonal.
pub(crate) fn assign_split<K: Ord>(
    parts: &[(&SquareArray<u32>, &[K])],
    mode: SubstitutionMode,
) -> Result<Vec<SymbolMatrix>> {
    let Some(&(first, _)) = parts.first() else {
        return Ok(Vec::new());
    };
    for (idx, _) in &parts[1..] {
        first.check_same_dim(idx)?;
    }
    let n = first.dim();

    let mut usage: Vec<Vec<u8>> = Vec::with_capacity(parts.len());
    for (idx, table) in parts {
        let mut u = vec![0u8; table.len()];
        for i in 0..n {
            for j in 0..n {
                let e = *idx.get(i, j) as usize;
                u[e] |= if i == j { DIAG } else { OFF };
            }
        }
        if u.contains(&(OFF | DIAG)) {
            return Err(Error::StringOnAndOffDiagonal);
        }
        usage.push(u);
    }

    // (part, entry) -> rank within its own class
    let mut rank: Vec<Vec<usize>> = usage.iter().map(|u| vec![0; u.len()]).collect();
    let mut counts = [0usize; 2];
    for (class, flag) in [(0, OFF), (1, DIAG)] {
        let mut keys: Vec<(&K, usize, usize)> = Vec::new();
        for (p, u) in usage.iter().enumerate() {
            for (e, &f) in u.iter().enumerate() {
                if f == flag {
                    keys.push((&parts[p].1[e], p, e));
                }
            }
        }
        keys.sort_unstable_by(|a, b| a.0.cmp(b.0));
        let mut r = 0;
        for w in 0..keys.len() {
            if w > 0 && keys[w].0 != keys[w - 1].0 {
                r += 1;
            }
            rank[keys[w].1][keys[w].2] = r;
        }
        counts[class] = if keys.is_empty() { 0 } else { r + 1 };
    }

    let n1 = counts[0];
    let base = match mode {
        SubstitutionMode::Plain => Some(n1),
        SubstitutionMode::Spd => n.checked_mul(n).and_then(|nn| nn.checked_mul(n1)),
    }
    .ok_or(Error::SymbolOverflow)?;
    if base
        .checked_add(counts[1])
        .and_then(|top| u32::try_from(top).ok())
        .is_none()
    {
        return Err(Error::SymbolOverflow);
    }

    let mut out = Vec::with_capacity(parts.len());
    for (p, (idx, _)) in parts.iter().enumerate() {
        let ids: Vec<Option<SymbolId>> = usage[p]
            .iter()
            .zip(&rank[p])
            .map(|(&f, &r)| match f {
                OFF => SymbolId::from_rank(r),
                DIAG => SymbolId::from_rank(base + r),
                _ => None,
            })
            .collect();
        let m = idx.map(|&e| ids[e as usize].expect("every used entry has an id"));
        out.push(m);
    }
    Ok(out)
}
