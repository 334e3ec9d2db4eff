//! Primality testing and widely spaced prime ladders.
//!
//! A ladder for dimension bound `d` starting above `s` is
//! `p1 = nextprime(s)`, `p(i+1) = nextprime(d · p(i)²)`. The ladders used by
//! the default theorem checks are expensive to find (the largest has about
//! 8900 bits), so they ship precomputed in `data/prime_ladders.txt` and are
//! loaded into a process-wide cache after a consistency check.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigUint;

const SMALL_PRIME_LIMIT: u32 = 60_000;

fn small_primes() -> &'static [u32] {
    static P: OnceLock<Vec<u32>> = OnceLock::new();
    P.get_or_init(|| {
        let n = SMALL_PRIME_LIMIT as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                for k in (i * i..=n).step_by(i) {
                    sieve[k] = false;
                }
            }
            i += 1;
        }
        (0..=n).filter(|&k| sieve[k]).map(|k| k as u32).collect()
    })
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic for every `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Rounds used above `2⁶⁴`; bases are the first `MR_ROUNDS` primes.
pub const MR_ROUNDS: usize = 40;

fn strong_probable_prime(n: &BigUint, bases: &[u32]) -> bool {
    let one = BigUint::from(1u32);
    let n1 = n - &one;
    let s = n1.trailing_zeros().expect("n > 1");
    let d = &n1 >> s;
    'bases: for &a in bases {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Exact below `2⁶⁴`, Miller-Rabin with [`MR_ROUNDS`] fixed bases above.
pub fn is_prime(n: &BigUint) -> bool {
    if let Ok(small) = u64::try_from(n) {
        return is_prime_u64(small);
    }
    for &p in small_primes().iter().take(200) {
        if (n % p) == BigUint::ZERO {
            return false;
        }
    }
    strong_probable_prime(n, &small_primes()[..MR_ROUNDS])
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: &BigUint) -> BigUint {
    if let Some(small) = u64::try_from(n).ok().filter(|&v| v < u64::MAX / 2) {
        let mut c = small + 1;
        while !is_prime_u64(c) {
            c += 1;
        }
        return BigUint::from(c);
    }
    // Sieve a window of odd candidates by the small primes, then test the
    // survivors in order.
    let mut base: BigUint = n + 1u32;
    if !base.bit(0) {
        base += 1u32;
    }
    const WINDOW: usize = 1 << 14;
    loop {
        let mut alive = vec![true; WINDOW];
        for &p in &small_primes()[1..] {
            let p64 = p as u64;
            let r = (&base % p).iter_u64_digits().next().unwrap_or(0);
            // first k with base + 2k ≡ 0 (mod p)
            let inv2 = p64.div_ceil(2);
            let mut k = (((p64 - r) % p64) * inv2 % p64) as usize;
            while k < WINDOW {
                alive[k] = false;
                k += p as usize;
            }
        }
        for (k, ok) in alive.iter().enumerate() {
            if *ok {
                let c = &base + BigUint::from(2 * k as u64);
                if strong_probable_prime(&c, &[2]) && is_prime(&c) {
                    return c;
                }
            }
        }
        base += BigUint::from(2 * WINDOW as u64);
    }
}

/// A prime ladder: `p1 > start`, `p(i+1) > dim · p(i)²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ladder {
    pub dim: usize,
    pub start: BigUint,
    pub primes: Vec<BigUint>,
}

impl Ladder {
    fn new(dim: usize, start: BigUint) -> Self {
        Ladder { dim, start, primes: Vec::new() }
    }

    fn extend_to(&mut self, count: usize) {
        while self.primes.len() < count {
            let bound = match self.primes.last() {
                None => self.start.clone(),
                Some(p) => p * p * self.dim,
            };
            self.primes.push(next_prime(&bound));
        }
    }

    /// Checks the spacing inequalities and runs a cheap primality screen.
    pub fn check(&self) -> bool {
        let mut bound = self.start.clone();
        for p in &self.primes {
            if *p <= bound || !strong_probable_prime(p, &[2]) {
                return false;
            }
            bound = p * p * self.dim;
        }
        true
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("ladder {} {:x}\n", self.dim, self.start);
        for p in &self.primes {
            s.push_str(&format!("{p:x}\n"));
        }
        s
    }
}

/// Parses ladders written by [`Ladder::to_text`]. Lines starting with `#`
/// are ignored.
pub fn parse_ladders(text: &str) -> Option<Vec<Ladder>> {
    let mut out: Vec<Ladder> = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        if let Some(rest) = line.strip_prefix("ladder ") {
            let mut it = rest.split_whitespace();
            let dim = it.next()?.parse().ok()?;
            let start = BigUint::parse_bytes(it.next()?.as_bytes(), 16)?;
            out.push(Ladder::new(dim, start));
        } else {
            out.last_mut()?.primes.push(BigUint::parse_bytes(line.as_bytes(), 16)?);
        }
    }
    Some(out)
}

const EMBEDDED: &str = include_str!("../../data/prime_ladders.txt");

type Cache = Mutex<HashMap<(usize, BigUint), Ladder>>;

fn cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(|| {
        let mut map = HashMap::new();
        for l in parse_ladders(EMBEDDED).unwrap_or_default() {
            // a damaged table is ignored and recomputed on demand
            if l.check() {
                map.insert((l.dim, l.start.clone()), l);
            }
        }
        Mutex::new(map)
    })
}

/// First `count` primes of the ladder `(dim, start)`, cached per process.
pub fn ladder(dim: usize, start: &BigUint, count: usize) -> Vec<BigUint> {
    let key = (dim, start.clone());
    let mut l = {
        let guard = cache().lock().expect("ladder cache poisoned");
        guard.get(&key).cloned().unwrap_or_else(|| Ladder::new(dim, start.clone()))
    };
    if l.primes.len() < count {
        l.extend_to(count);
        cache().lock().expect("ladder cache poisoned").insert(key, l.clone());
    }
    l.primes[..count].to_vec()
}

/// Ladder whose first prime exceeds `dim · k²` with `k = 1`.
pub fn base_ladder(dim: usize, count: usize) -> Vec<BigUint> {
    ladder(dim, &BigUint::from(dim), count)
}

/// Ladder starting above `dim · top²`, for the second matrix of a pair.
pub fn upper_ladder(dim: usize, top: &BigUint, count: usize) -> Vec<BigUint> {
    ladder(dim, &(top * top * dim), count)
}

/// Text of the ladders shipped with the crate, computed from scratch.
pub fn regenerate_embedded() -> String {
    let mut base = Ladder::new(4, BigUint::from(4u32));
    base.extend_to(10);
    let mut upper = Ladder::new(4, &base.primes[5] * &base.primes[5] * 4u32);
    upper.extend_to(6);
    format!(
        "# dimension bound 4: base ladder (10 primes) and the upper ladder above 4*p6^2 (6 primes)\n{}{}",
        base.to_text(),
        upper.to_text()
    )
}
