//! Dense square arrays, stored row-major.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SquareArray<T> {
    n: usize,
    data: Vec<T>,
}

impl<T> SquareArray<T> {
    pub fn from_vec(n: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::NotSquare {
                row: 0,
                found: data.len(),
                expected: n * n,
            });
        }
        Ok(SquareArray { n, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { row, found: r.len(), expected: n });
            }
            data.extend(r);
        }
        Ok(SquareArray { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        SquareArray { n, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        // chunks_exact(0) panics, so an empty array yields no rows explicitly
        self.data.chunks_exact(self.n.max(1)).take(self.n)
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = &T> + '_ {
        (0..self.n).map(move |i| self.get(i, j))
    }

    pub fn diagonal(&self) -> impl Iterator<Item = &T> + '_ {
        (0..self.n).map(move |i| self.get(i, i))
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> SquareArray<U> {
        SquareArray { n: self.n, data: self.data.iter().map(f).collect() }
    }

    pub fn check_same_dim<U>(&self, other: &SquareArray<U>) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }
}

impl<T: Clone> SquareArray<T> {
    pub fn filled(n: usize, value: T) -> Self {
        SquareArray { n, data: vec![value; n * n] }
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        SquareArray::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    /// `M(p, p)`: entry `(i, j)` of the result is `M[p[i]][p[j]]`.
    pub fn permuted(&self, p: &[usize]) -> Self {
        debug_assert_eq!(p.len(), self.n);
        SquareArray::from_fn(self.n, |i, j| self.get(p[i], p[j]).clone())
    }

    /// Trailing principal submatrix starting at `start` (0-based).
    pub fn trailing(&self, start: usize) -> Self {
        let m = self.n.saturating_sub(start);
        SquareArray::from_fn(m, |i, j| self.get(i + start, j + start).clone())
    }
}

impl<T: PartialEq> SquareArray<T> {
    pub fn symmetry_violation(&self) -> Option<(usize, usize)> {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.get(i, j) != self.get(j, i) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetry_violation().is_none()
    }

    pub fn require_symmetric(&self) -> Result<()> {
        match self.symmetry_violation() {
            Some((i, j)) => Err(Error::NotSymmetric { i, j }),
            None => Ok(()),
        }
    }
}

impl<T: Serialize + Clone> Serialize for SquareArray<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for SquareArray<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<T>>::deserialize(d)?;
        SquareArray::from_rows(rows).map_err(serde::de::Error::custom)
    }
}
