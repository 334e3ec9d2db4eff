//! Graph and matrix generators for test corpora.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::grid::SquareArray;
use crate::symbols::{SymbolId, SymbolMatrix};

pub type Adjacency = SquareArray<u8>;

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(p: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if p.len() == used.len() {
            out.push(p.clone());
            return;
        }
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                p.push(c);
                rec(p, used, out);
                p.pop();
                used[c] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// One representative of every isomorphism class of simple graphs on `n`
/// vertices. Each representative has the smallest edge code in its class.
/// Intended for `n ≤ 7`.
pub fn all_graphs(n: usize) -> Vec<Adjacency> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut bit = vec![vec![0usize; n]; n];
    for (b, &(i, j)) in pairs.iter().enumerate() {
        bit[i][j] = b;
        bit[j][i] = b;
    }
    let perms = all_permutations(n);
    let total: u64 = 1 << pairs.len();
    let mut reps = Vec::new();
    'codes: for code in 0..total {
        for p in &perms {
            let mut image = 0u64;
            for (b, &(i, j)) in pairs.iter().enumerate() {
                if code >> b & 1 == 1 {
                    image |= 1 << bit[p[i]][p[j]];
                }
            }
            if image < code {
                continue 'codes;
            }
        }
        reps.push(SquareArray::from_fn(n, |i, j| {
            u8::from(i != j && code >> bit[i][j] & 1 == 1)
        }));
    }
    reps
}

pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p_edge: f64) -> Adjacency {
    let mut g = SquareArray::filled(n, 0u8);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p_edge) {
                *g.get_mut(i, j) = 1;
                *g.get_mut(j, i) = 1;
            }
        }
    }
    g
}

pub fn random_graph_with_edges<R: Rng>(rng: &mut R, n: usize, edges: usize) -> Adjacency {
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    pairs.shuffle(rng);
    let mut g = SquareArray::filled(n, 0u8);
    for &(i, j) in pairs.iter().take(edges) {
        *g.get_mut(i, j) = 1;
        *g.get_mut(j, i) = 1;
    }
    g
}

pub fn edge_count(g: &Adjacency) -> usize {
    g.as_slice().iter().filter(|&&x| x != 0).count() / 2
}

/// Degree-preserving random double edge swaps.
pub fn rewire<R: Rng>(rng: &mut R, g: &Adjacency, swaps: usize) -> Adjacency {
    let n = g.dim();
    let mut g = g.clone();
    for _ in 0..swaps * 10 {
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| *g.get(i, j) == 1).collect();
        if edges.len() < 2 {
            break;
        }
        let (a, b) = edges[rng.random_range(0..edges.len())];
        let (c, d) = edges[rng.random_range(0..edges.len())];
        let (c, d) = if rng.random_bool(0.5) { (c, d) } else { (d, c) };
        // a-b, c-d  becomes  a-d, c-b
        if a == c || a == d || b == c || b == d || *g.get(a, d) == 1 || *g.get(c, b) == 1 {
            continue;
        }
        for (x, y, v) in [(a, b, 0), (c, d, 0), (a, d, 1), (c, b, 1)] {
            *g.get_mut(x, y) = v;
            *g.get_mut(y, x) = v;
        }
    }
    g
}

/// Random matrix over symbols `1..=k`.
pub fn random_symbol_matrix<R: Rng>(rng: &mut R, n: usize, k: u32, symmetric: bool) -> SymbolMatrix {
    let mut m = SquareArray::from_fn(n, |_, _| SymbolId::new(rng.random_range(1..=k)).expect("k ≥ 1"));
    if symmetric {
        for i in 0..n {
            for j in 0..i {
                *m.get_mut(i, j) = *m.get(j, i);
            }
        }
    }
    m
}

/// Random symmetric matrix whose diagonal symbols never occur off the
/// diagonal, with at most `max_symbols` distinct symbols.
pub fn random_diag_distinct<R: Rng>(rng: &mut R, n: usize, max_symbols: u32) -> SymbolMatrix {
    assert!(max_symbols >= 2 || n <= 1);
    let off_k = if n > 1 { rng.random_range(1..max_symbols) } else { 0 };
    let diag_k = rng.random_range(1..=(max_symbols - off_k).max(1));
    let mut m = SquareArray::from_fn(n, |i, j| {
        let v = if i == j { off_k + rng.random_range(1..=diag_k) } else { rng.random_range(1..=off_k.max(1)) };
        SymbolId::new(v).expect("positive")
    });
    for i in 0..n {
        for j in 0..i {
            *m.get_mut(i, j) = *m.get(j, i);
        }
    }
    m
}

pub fn petersen() -> Adjacency {
    let mut g = SquareArray::filled(10, 0u8);
    let mut edge = |a: usize, b: usize| {
        *g.get_mut(a, b) = 1;
        *g.get_mut(b, a) = 1;
    };
    for i in 0..5 {
        edge(i, (i + 1) % 5);
        edge(5 + i, 5 + (i + 2) % 5);
        edge(i, 5 + i);
    }
    g
}
