use std::collections::HashMap;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::grid::SquareArray;
use crate::symbols::{Pattern, SymbolMatrix};
use crate::wspm::mat_mul;

/// Largest dimension accepted by [`espp_pattern`].
pub const ESPP_CAP: usize = 30;

/// Pattern of the per-location sequences `(I, M, M², …, M^(m-1))(i, j)`,
/// with symbol ids read as integers.
///
/// Every higher power is a fixed linear combination of these (Cayley-Hamilton),
/// so stacking more layers cannot split a cell further.
pub fn espp_pattern(m: &SymbolMatrix) -> Result<Pattern> {
    m.require_symmetric()?;
    let n = m.dim();
    if n > ESPP_CAP {
        return Err(Error::CapExceeded { what: "ESPP dimension", size: n, cap: ESPP_CAP });
    }
    let base: SquareArray<BigUint> = m.map(|s| BigUint::from(s.get()));
    let mut power: SquareArray<BigUint> =
        SquareArray::from_fn(n, |i, j| BigUint::from(u8::from(i == j)));
    let mut labels = vec![0u32; n * n];
    for layer in 0..n.max(1) {
        if layer > 0 {
            power = mat_mul(&power, &base)?;
        }
        let mut ids: HashMap<(u32, &BigUint), u32> = HashMap::new();
        for (loc, v) in power.as_slice().iter().enumerate() {
            let next = ids.len() as u32;
            labels[loc] = *ids.entry((labels[loc], v)).or_insert(next);
        }
    }
    Ok(Pattern::from_labels(n, &labels))
}
