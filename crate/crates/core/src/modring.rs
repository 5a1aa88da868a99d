use std::cell::Cell;
use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};

thread_local! {
    static MULTS: Cell<u64> = const { Cell::new(0) };
    static ADDS: Cell<u64> = const { Cell::new(0) };
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub mults: u64,
    pub adds: u64,
}

pub fn op_counts() -> OpCounts {
    OpCounts {
        mults: MULTS.with(Cell::get),
        adds: ADDS.with(Cell::get),
    }
}

pub fn reset_op_counts() {
    MULTS.with(|c| c.set(0));
    ADDS.with(|c| c.set(0));
}

/// Runs `f` and returns its result together with the field operations it performed.
pub fn count_ops<T>(f: impl FnOnce() -> T) -> (T, OpCounts) {
    let before = op_counts();
    let out = f();
    let after = op_counts();
    (
        out,
        OpCounts {
            mults: after.mults - before.mults,
            adds: after.adds - before.adds,
        },
    )
}

#[inline(always)]
fn tick_mult() {
    MULTS.with(|c| c.set(c.get() + 1));
}

#[inline(always)]
fn tick_add() {
    ADDS.with(|c| c.set(c.get() + 1));
}

/// Records operations performed through the unchecked arithmetic of a field.
#[inline(always)]
pub(crate) fn record_ops(mults: u64, adds: u64) {
    MULTS.with(|c| c.set(c.get() + mults));
    ADDS.with(|c| c.set(c.get() + adds));
}

/// -p^{-1} modulo 2^64 for odd `p`, zero otherwise.
fn neg_inverse(p: u64) -> u64 {
    if p.is_multiple_of(2) {
        return 0;
    }
    let mut x: u64 = 1;
    for _ in 0..6 {
        x = x.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(x)));
    }
    x.wrapping_neg()
}

/// Arithmetic modulo a prime below 2^63, with cached roots of unity.
///
/// Reduction of 128-bit products uses a Barrett constant, so a multiplication
/// costs two wide multiplies instead of a 128-bit division.
#[derive(Clone, Debug)]
pub struct PrimeField {
    p: u64,
    bits: u32,
    mu: u128,
    neg_inv: u64,
    roots: BTreeMap<u64, u64>,
    inverse_roots: BTreeMap<u64, u64>,
    inv_r: BTreeMap<u64, u64>,
}

impl PartialEq for PrimeField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl Eq for PrimeField {}

impl PrimeField {
    /// Builds the field Z_p and caches primitive roots for every divisor of every
    /// requested order.
    pub fn new(p: u64, orders: &[u64]) -> Result<Self> {
        if p >= 1 << 63 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let bits = 64 - p.leading_zeros();
        let mu = (1u128 << (2 * bits)) / p as u128;
        let mut field = PrimeField {
            p,
            bits,
            mu,
            neg_inv: neg_inverse(p),
            roots: BTreeMap::new(),
            inverse_roots: BTreeMap::new(),
            inv_r: BTreeMap::new(),
        };
        for &r in orders {
            if r == 0 {
                return Err(Error::NoRoot { p, r });
            }
            for d in divisors(r) {
                if field.roots.contains_key(&d) {
                    continue;
                }
                let w = field.find_root(d)?;
                field.roots.insert(d, w);
                field.inverse_roots.insert(d, field.inv_unchecked(w));
                field.inv_r.insert(d, field.inv_unchecked(d % p));
            }
        }
        Ok(field)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Cached primitive `r`-th root of unity.
    pub fn root(&self, r: u64) -> Result<u64> {
        self.roots
            .get(&r)
            .copied()
            .ok_or(Error::NoRoot { p: self.p, r })
    }

    pub fn inverse_root(&self, r: u64) -> Result<u64> {
        self.inverse_roots
            .get(&r)
            .copied()
            .ok_or(Error::NoRoot { p: self.p, r })
    }

    /// Cached inverse of `r` for an order `r` known to the field.
    pub fn inv_order(&self, r: u64) -> Result<u64> {
        self.inv_r
            .get(&r)
            .copied()
            .ok_or(Error::NoRoot { p: self.p, r })
    }

    pub fn orders(&self) -> impl Iterator<Item = u64> + '_ {
        self.roots.keys().copied()
    }

    /// Searches for an element of multiplicative order exactly `r`.
    pub fn find_root(&self, r: u64) -> Result<u64> {
        let p = self.p;
        if r == 0 || !(p - 1).is_multiple_of(r) {
            return Err(Error::NoRoot { p, r });
        }
        if r == 1 {
            return Ok(1 % p);
        }
        let factors = prime_factors(r);
        let e = (p - 1) / r;
        for x in 2..p {
            let w = pow_raw(x, e, p);
            if factors.iter().all(|&q| pow_raw(w, r / q, p) != 1) {
                return Ok(w);
            }
        }
        Err(Error::NoRoot { p, r })
    }

    #[inline(always)]
    pub fn reduce(&self, a: u64) -> u64 {
        a % self.p
    }

    #[inline(always)]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        tick_add();
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        tick_add();
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline(always)]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        tick_mult();
        self.mul_raw(a, b)
    }

    #[inline(always)]
    pub(crate) fn add_raw(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        s.min(s.wrapping_sub(self.p))
    }

    #[inline(always)]
    pub(crate) fn sub_raw(&self, a: u64, b: u64) -> u64 {
        let d = a.wrapping_sub(b);
        d.min(d.wrapping_add(self.p))
    }

    /// Whether [`PrimeField::mul_mont`] is available (it needs an odd modulus).
    pub(crate) fn has_mont(&self) -> bool {
        self.p % 2 == 1
    }

    /// `a * b / 2^64` modulo an odd `p`.
    #[inline(always)]
    pub(crate) fn mul_mont(&self, a: u64, b: u64) -> u64 {
        let t = a as u128 * b as u128;
        let m = (t as u64).wrapping_mul(self.neg_inv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        u.min(u.wrapping_sub(self.p))
    }

    /// 2^64 modulo `p`.
    pub(crate) fn mont_factor(&self) -> u64 {
        ((1u128 << 64) % self.p as u128) as u64
    }

    /// Precomputed quotient floor(w * 2^64 / p) for repeated multiplication by `w`.
    pub(crate) fn shoup(&self, w: u64) -> u64 {
        (((w as u128) << 64) / self.p as u128) as u64
    }

    /// Product `x * w` given the precomputed quotient of `w`; `x` may be any 64-bit value.
    #[inline(always)]
    pub(crate) fn mul_shoup(&self, x: u64, w: u64, ws: u64) -> u64 {
        let q = ((x as u128 * ws as u128) >> 64) as u64;
        let r = x.wrapping_mul(w).wrapping_sub(q.wrapping_mul(self.p));
        r.min(r.wrapping_sub(self.p))
    }

    #[inline(always)]
    pub(crate) fn mul_raw(&self, a: u64, b: u64) -> u64 {
        let t = a as u128 * b as u128;
        let q = ((t >> (self.bits - 1)) * self.mu) >> (self.bits + 1);
        let mut r = t - q * self.p as u128;
        while r >= self.p as u128 {
            r -= self.p as u128;
        }
        r as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if a.is_multiple_of(self.p) {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, self.p - 2))
    }

    fn inv_unchecked(&self, a: u64) -> u64 {
        pow_raw(a, self.p - 2, self.p)
    }
}

/// Values of the same quantity modulo several primes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueValue {
    pub primes: Vec<u64>,
    pub residues: Vec<u64>,
}

fn pow_raw(base: u64, mut exp: u64, p: u64) -> u64 {
    let m = p as u128;
    let mut acc = 1 % m;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_raw(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = (x as u128 * x as u128 % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Smallest prime `p > min_value` with every order dividing `p - 1`.
pub fn choose_prime(orders: &[u64], min_value: u64) -> Result<u64> {
    let mut r: u64 = 1;
    for &o in orders {
        if o == 0 {
            return Err(Error::NoAdmissiblePrime);
        }
        r = (r / gcd(r, o))
            .checked_mul(o)
            .ok_or(Error::NoAdmissiblePrime)?;
    }
    let mut j = min_value.saturating_sub(1) / r + 1;
    loop {
        let p = j
            .checked_mul(r)
            .and_then(|x| x.checked_add(1))
            .filter(|&p| p < 1 << 63)
            .ok_or(Error::NoAdmissiblePrime)?;
        if p > min_value && is_prime(p) {
            return Ok(p);
        }
        j += 1;
    }
}

/// `count` consecutive admissible primes, each larger than the previous one.
pub fn choose_primes(orders: &[u64], min_value: u64, count: usize) -> Result<Vec<u64>> {
    let mut out = Vec::with_capacity(count);
    let mut floor = min_value;
    for _ in 0..count {
        let p = choose_prime(orders, floor)?;
        out.push(p);
        floor = p;
    }
    Ok(out)
}

/// Reconstructs the unique integer in `[0, prod p_i)` with the given residues.
pub fn crt_reconstruct(value: &ResidueValue) -> Result<BigUint> {
    if value.primes.len() != value.residues.len() {
        return Err(Error::ResidueMismatch);
    }
    for (i, &p) in value.primes.iter().enumerate() {
        if value.primes[..i].iter().any(|&q| gcd(p, q) != 1) {
            return Err(Error::NotCoprime);
        }
    }
    let mut acc = BigUint::zero();
    let mut modulus = BigUint::from(1u32);
    for (&p, &r) in value.primes.iter().zip(&value.residues) {
        let pb = BigUint::from(p);
        let acc_mod = (&acc % &pb).to_u64_digits().first().copied().unwrap_or(0);
        let m_mod = (&modulus % &pb).to_u64_digits().first().copied().unwrap_or(0);
        let diff = (r % p + p - acc_mod) % p;
        let t = (diff as u128 * pow_raw(m_mod, p - 2, p) as u128 % p as u128) as u64;
        acc += &modulus * BigUint::from(t);
        modulus *= pb;
    }
    Ok(acc)
}
