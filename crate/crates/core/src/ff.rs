//! Exact arithmetic in finite fields `GF(p^d)`.
//!
//! A field is described by a [`FieldDesc`]: the characteristic, the degree and a monic
//! irreducible modulus over `Z/p`. The modulus is always the lexicographically smallest
//! irreducible polynomial of the requested degree, where coefficient lists are compared
//! starting from the constant term, so identical `(p, d)` always produce the identical field.
//!
//! Two element representations are available:
//!
//! * [`FieldElement`], an owned coefficient vector tied to its field, used by the public API;
//! * packed `u32` codes (`sum c_i p^i`) with log/exp tables, used by the dense linear algebra in
//!   the oracle. Code `0` is zero and code `1` is one.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

/// Default upper bound on `p^d` for constructed fields.
pub const DEFAULT_MAX_FIELD_SIZE: u64 = 1 << 20;

/// Packed codes are `u32`; nothing larger than this can be built.
pub const HARD_FIELD_LIMIT: u64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("field of size {p}^{d} exceeds the bound {bound}")]
    BoundExceeded { p: u64, d: u32, bound: u64 },
    #[error("no embedding of GF({p1}^{d1}) into GF({p2}^{d2})")]
    NoEmbedding { p1: u32, d1: u32, p2: u32, d2: u32 },
    #[error("{p} and {m} are not coprime")]
    NotCoprime { p: u64, m: u64 },
    #[error("no element of order {order} in a field of size {size}")]
    NoRootOfUnity { order: u64, size: u64 },
    #[error("operands live in different fields")]
    MismatchedField,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut k = 3;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 2;
    }
    true
}

/// Distinct prime divisors of `n`, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            out.push(k);
            while n.is_multiple_of(k) {
                n /= k;
            }
        }
        k += if k == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m = m as u128;
    let mut b = base as u128 % m;
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Smallest `e >= 1` with `p^e = 1 (mod m)`.
pub fn mult_order(p: u64, m: u64) -> Result<u64, FieldError> {
    if m == 0 || gcd(p, m) != 1 {
        return Err(FieldError::NotCoprime { p, m });
    }
    if m == 1 {
        return Ok(1);
    }
    let mut acc = p % m;
    let mut e = 1;
    while acc != 1 {
        acc = ((acc as u128 * p as u128) % m as u128) as u64;
        e += 1;
    }
    Ok(e)
}

/// Largest `v` with `l^v | n`. Returns 0 for `n == 0` rather than looping.
pub fn l_valuation(mut n: u64, l: u64) -> u32 {
    if n == 0 || l < 2 {
        return 0;
    }
    let mut v = 0;
    while n.is_multiple_of(l) {
        n /= l;
        v += 1;
    }
    v
}

/// Arbitrary-precision variant of [`l_valuation`].
pub fn l_valuation_big(n: &BigUint, l: u64) -> u32 {
    if n.is_zero() || l < 2 {
        return 0;
    }
    let l = BigUint::from(l);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&l);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Largest divisor of `n` coprime to `l`.
pub fn prime_to_part(mut n: u64, l: u64) -> u64 {
    if l < 2 || n == 0 {
        return n;
    }
    while n.is_multiple_of(l) {
        n /= l;
    }
    n
}

// ---------------------------------------------------------------------------
// Polynomials over Z/p, ascending coefficient vectors, trimmed.

fn trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let n = a.len().max(b.len());
    let mut out = vec![0u32; n];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x + p - y) % p;
    }
    trim(&mut out);
    out
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let p = p as u64;
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p;
        }
    }
    let mut out: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
    trim(&mut out);
    out
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem_monic(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let dm = m.len() - 1;
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let p64 = p as u64;
    while r.len() > dm {
        let lead = r[r.len() - 1] % p64;
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (k, &mc) in m.iter().enumerate() {
                r[shift + k] = (r[shift + k] + (p64 - lead) * mc as u64) % p64;
            }
        }
        r.pop();
    }
    let mut out: Vec<u32> = r.into_iter().map(|c| (c % p64) as u32).collect();
    trim(&mut out);
    out
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    pow_mod(a as u64, p as u64 - 2, p as u64) as u32
}

/// Remainder for a general (non-monic) divisor.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let lead_inv = inv_mod_p(*b.last().expect("nonzero divisor"), p) as u64;
    let monic: Vec<u32> = b
        .iter()
        .map(|&c| (c as u64 * lead_inv % p as u64) as u32)
        .collect();
    poly_rem_monic(a, &monic, p)
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    poly_rem_monic(&poly_mul(a, b, p), m, p)
}

fn poly_powmod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
    let mut acc = vec![1u32];
    let mut b = poly_rem_monic(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, m, p);
        }
        b = poly_mulmod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

/// `x^(p^k) mod m`.
fn x_pow_p_pow(k: u32, m: &[u32], p: u32) -> Vec<u32> {
    let mut cur = poly_rem_monic(&[0, 1], m, p);
    for _ in 0..k {
        cur = poly_powmod(&cur, p as u64, m, p);
    }
    cur
}

/// Rabin's test for a monic polynomial of degree >= 1.
pub fn is_irreducible(m: &[u32], p: u32) -> bool {
    let d = m.len() as u32 - 1;
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    if m[0] == 0 {
        return false;
    }
    let x = vec![0u32, 1];
    if poly_sub(&x_pow_p_pow(d, m, p), &x, p) != Vec::<u32>::new() {
        return false;
    }
    for r in prime_factors(d as u64) {
        let h = poly_sub(&x_pow_p_pow(d / r as u32, m, p), &x, p);
        let g = poly_gcd(m, &h, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn first_irreducible(p: u32, d: u32) -> Vec<u32> {
    // Coefficient lists (c_0, ..., c_{d-1}) enumerated lexicographically with c_0 most
    // significant; the leading 1 is appended.
    let mut digits = vec![0u32; d as usize];
    if d > 1 {
        // everything with c_0 = 0 is divisible by x
        digits[0] = 1;
    }
    loop {
        let mut cand = digits.clone();
        cand.push(1);
        if is_irreducible(&cand, p) {
            return cand;
        }
        // increment, last digit least significant
        let mut i = d as usize;
        loop {
            i -= 1;
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
            assert!(i > 0, "an irreducible polynomial of every degree exists");
        }
    }
}

// ---------------------------------------------------------------------------

/// A finite field `GF(p^d)` presented as `Z/p[x]/(modulus)`.
pub struct FieldDesc {
    p: u32,
    d: u32,
    modulus: Vec<u32>,
    tables: OnceLock<Arc<FieldTables>>,
}

impl fmt::Debug for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldDesc")
            .field("p", &self.p)
            .field("d", &self.d)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldDesc {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.d == other.d && self.modulus == other.modulus
    }
}
impl Eq for FieldDesc {}

fn registry() -> &'static Mutex<HashMap<(u32, u32), Arc<FieldDesc>>> {
    static REG: OnceLock<Mutex<HashMap<(u32, u32), Arc<FieldDesc>>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `GF(p^d)` with the default size bound.
pub fn build_field(p: u64, d: u32) -> Result<Arc<FieldDesc>, FieldError> {
    build_field_bounded(p, d, DEFAULT_MAX_FIELD_SIZE)
}

/// `GF(p^d)` provided `p^d <= bound`. Fields are interned, so repeated calls share one value.
pub fn build_field_bounded(p: u64, d: u32, bound: u64) -> Result<Arc<FieldDesc>, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NonPrime(p));
    }
    if d == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let bound_eff = bound.min(HARD_FIELD_LIMIT);
    let size = (p as u128).checked_pow(d);
    match size {
        Some(s) if s <= bound_eff as u128 => {}
        _ => return Err(FieldError::BoundExceeded { p, d, bound }),
    }
    let p = p as u32;
    let mut reg = registry().lock().expect("field registry poisoned");
    if let Some(f) = reg.get(&(p, d)) {
        return Ok(f.clone());
    }
    let modulus = first_irreducible(p, d);
    let desc = Arc::new(FieldDesc {
        p,
        d,
        modulus,
        tables: OnceLock::new(),
    });
    reg.insert((p, d), desc.clone());
    Ok(desc)
}

impl FieldDesc {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    /// Monic modulus, ascending coefficients, length `d + 1`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn size(&self) -> u64 {
        (self.p as u64).pow(self.d)
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        FieldElement {
            coeffs: vec![0; self.d as usize],
            field: self.clone(),
        }
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        self.from_int(1)
    }

    pub fn from_int(self: &Arc<Self>, c: u64) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[0] = (c % self.p as u64) as u32;
        e
    }

    /// The class of `x`, which generates the field over `Z/p`.
    pub fn generator(self: &Arc<Self>) -> FieldElement {
        self.element(&[0, 1])
    }

    /// Element from a coefficient list of any length, reduced modulo the field polynomial.
    pub fn element(self: &Arc<Self>, coeffs: &[u32]) -> FieldElement {
        let reduced: Vec<u32> = coeffs.iter().map(|&c| c % self.p).collect();
        let r = poly_rem_monic(&reduced, &self.modulus, self.p);
        let mut out = vec![0u32; self.d as usize];
        out[..r.len()].copy_from_slice(&r);
        FieldElement {
            coeffs: out,
            field: self.clone(),
        }
    }

    /// Packed code `sum c_i p^i`.
    pub fn pack(&self, x: &FieldElement) -> u32 {
        let mut acc: u64 = 0;
        for &c in x.coeffs.iter().rev() {
            acc = acc * self.p as u64 + c as u64;
        }
        acc as u32
    }

    pub fn unpack(self: &Arc<Self>, mut code: u32) -> FieldElement {
        let mut coeffs = vec![0u32; self.d as usize];
        for c in coeffs.iter_mut() {
            *c = code % self.p;
            code /= self.p;
        }
        FieldElement {
            coeffs,
            field: self.clone(),
        }
    }

    /// All elements, in lexicographic order of coefficient lists (constant term first).
    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = FieldElement> + '_ {
        let d = self.d as usize;
        let p = self.p;
        (0..self.size()).map(move |mut k| {
            let mut coeffs = vec![0u32; d];
            for i in (0..d).rev() {
                coeffs[i] = (k % p as u64) as u32;
                k /= p as u64;
            }
            FieldElement {
                coeffs,
                field: self.clone(),
            }
        })
    }

    /// The first element, in lexicographic order, generating the multiplicative group.
    pub fn primitive_element(self: &Arc<Self>) -> FieldElement {
        let order = self.size() - 1;
        let primes = prime_factors(order);
        self.elements()
            .find(|x| !x.is_zero() && primes.iter().all(|&r| !x.pow(order / r).is_one()))
            .expect("multiplicative group of a finite field is cyclic")
    }

    /// A primitive `m`-th root of unity, `g^((q-1)/m)` for the primitive element `g`.
    pub fn root_of_unity(self: &Arc<Self>, m: u64) -> Result<FieldElement, FieldError> {
        let order = self.size() - 1;
        if m == 0 || !order.is_multiple_of(m) {
            return Err(FieldError::NoRootOfUnity {
                order: m,
                size: self.size(),
            });
        }
        Ok(self.primitive_element().pow(order / m))
    }

    /// Log/exp/Zech tables over packed codes, built on first use.
    pub fn tables(self: &Arc<Self>) -> Arc<FieldTables> {
        self.tables
            .get_or_init(|| Arc::new(FieldTables::build(self)))
            .clone()
    }
}

/// Arithmetic on packed codes of one field.
pub trait FieldOps: Send + Sync {
    fn characteristic(&self) -> u32;
    fn add(&self, a: u32, b: u32) -> u32;
    fn neg(&self, a: u32) -> u32;
    fn mul(&self, a: u32, b: u32) -> u32;
    /// Panics on zero.
    fn inv(&self, a: u32) -> u32;
    fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }
}

/// `Z/p` on residues `0..p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Self {
        PrimeField { p }
    }
}

impl FieldOps for PrimeField {
    fn characteristic(&self) -> u32 {
        self.p
    }
    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (s % self.p as u64) as u32
    }
    #[inline]
    fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }
    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        (a as u64 * b as u64 % self.p as u64) as u32
    }
    fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        inv_mod_p(a, self.p)
    }
}

/// Discrete-log tables for `GF(q)` on packed codes.
pub struct FieldTables {
    p: u32,
    order: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    /// `zech[k]` is the code of `1 + g^k`.
    zech: Vec<u32>,
    minus_one: u32,
}

impl FieldTables {
    fn build(field: &Arc<FieldDesc>) -> Self {
        let q = field.size() as usize;
        let order = (q - 1) as u32;
        let g = field.primitive_element();
        let mut exp = Vec::with_capacity(q - 1);
        let mut log = vec![0u32; q];
        let mut cur = field.one();
        for k in 0..order {
            let code = field.pack(&cur);
            exp.push(code);
            log[code as usize] = k;
            cur = &cur * &g;
        }
        let one = field.one();
        let zech = exp
            .iter()
            .map(|&c| field.pack(&(&field.unpack(c) + &one)))
            .collect();
        let minus_one = field.pack(&-&one);
        FieldTables {
            p: field.p,
            order,
            exp,
            log,
            zech,
            minus_one,
        }
    }

    pub fn size(&self) -> u64 {
        self.order as u64 + 1
    }

    /// `g^k` for the table's primitive element.
    pub fn exp(&self, k: u64) -> u32 {
        self.exp[(k % self.order as u64) as usize]
    }

    pub fn log(&self, a: u32) -> u32 {
        assert!(a != 0, "log of zero");
        self.log[a as usize]
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        self.exp(self.log[a as usize] as u64 * (e % self.order as u64))
    }
}

impl FieldOps for FieldTables {
    fn characteristic(&self) -> u32 {
        self.p
    }
    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        let la = self.log[a as usize];
        let lb = self.log[b as usize];
        let k = if lb >= la { lb - la } else { lb + self.order - la };
        let z = self.zech[k as usize];
        if z == 0 {
            return 0;
        }
        let s = la as u64 + self.log[z as usize] as u64;
        self.exp[(s % self.order as u64) as usize]
    }
    #[inline]
    fn neg(&self, a: u32) -> u32 {
        self.mul(a, self.minus_one)
    }
    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] as u64 + self.log[b as usize] as u64;
        self.exp[(s % self.order as u64) as usize]
    }
    fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        let l = self.log[a as usize];
        self.exp[((self.order - l) % self.order) as usize]
    }
}

/// Table-free arithmetic on packed codes, for fields too large to tabulate.
pub struct PolyArith {
    field: Arc<FieldDesc>,
    p: u32,
    d: usize,
    /// `reduce[j]` holds the coordinates of `x^(d + j) mod m`.
    reduce: Vec<Vec<u32>>,
}

/// `p^d <= 2^31` keeps every degree below this.
const MAX_POLY_DEGREE: usize = 32;

impl PolyArith {
    pub fn new(field: &Arc<FieldDesc>) -> Self {
        let d = field.d as usize;
        let x = field.generator();
        let xd = x.pow(d as u64);
        let mut reduce = Vec::with_capacity(d);
        let mut cur = xd;
        for _ in 0..d {
            reduce.push(cur.coeffs().to_vec());
            cur = &cur * &x;
        }
        PolyArith {
            field: field.clone(),
            p: field.p,
            d,
            reduce,
        }
    }

    fn digits(&self, mut code: u32) -> [u32; MAX_POLY_DEGREE] {
        let mut out = [0u32; MAX_POLY_DEGREE];
        for x in out.iter_mut().take(self.d) {
            *x = code % self.p;
            code /= self.p;
        }
        out
    }

    fn code(&self, digits: &[u32]) -> u32 {
        digits[..self.d]
            .iter()
            .rev()
            .fold(0u32, |acc, &x| acc * self.p + x)
    }
}

impl FieldOps for PolyArith {
    fn characteristic(&self) -> u32 {
        self.p
    }
    fn add(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.digits(a), self.digits(b));
        let mut out = [0u32; MAX_POLY_DEGREE];
        for i in 0..self.d {
            out[i] = (x[i] + y[i]) % self.p;
        }
        self.code(&out)
    }
    fn neg(&self, a: u32) -> u32 {
        let x = self.digits(a);
        let mut out = [0u32; MAX_POLY_DEGREE];
        for i in 0..self.d {
            out[i] = (self.p - x[i]) % self.p;
        }
        self.code(&out)
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let (x, y) = (self.digits(a), self.digits(b));
        let d = self.d;
        let p = self.p as u64;
        let mut prod = [0u64; 2 * MAX_POLY_DEGREE];
        for i in 0..d {
            if x[i] == 0 {
                continue;
            }
            for j in 0..d {
                prod[i + j] += x[i] as u64 * y[j] as u64;
            }
        }
        let mut acc = [0u64; MAX_POLY_DEGREE];
        for i in 0..d {
            acc[i] = prod[i];
        }
        for j in 0..d.saturating_sub(1) {
            let c = prod[d + j] % p;
            if c == 0 {
                continue;
            }
            for (a, &r) in acc.iter_mut().zip(&self.reduce[j]) {
                *a += c * r as u64;
            }
        }
        let mut out = [0u32; MAX_POLY_DEGREE];
        for i in 0..d {
            out[i] = (acc[i] % p) as u32;
        }
        self.code(&out)
    }
    fn inv(&self, a: u32) -> u32 {
        let f = &self.field;
        f.pack(&f.unpack(a).inv().expect("inverse of zero"))
    }
}

impl FieldDesc {
    /// Code arithmetic: discrete-log tables up to `table_bound` elements, polynomial
    /// arithmetic beyond.
    pub fn ops(self: &Arc<Self>, table_bound: u64) -> Arc<dyn FieldOps> {
        if self.d == 1 {
            Arc::new(PrimeField::new(self.p))
        } else if self.size() <= table_bound {
            self.tables()
        } else {
            Arc::new(PolyArith::new(self))
        }
    }
}

/// An element of a [`FieldDesc`]: `d` residues mod `p`, coefficients of `1, x, ..., x^(d-1)`.
#[derive(Clone)]
pub struct FieldElement {
    coeffs: Vec<u32>,
    field: Arc<FieldDesc>,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && *self.field == *other.field
    }
}
impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}@GF({}^{})", self.coeffs, self.field.p, self.field.d)
    }
}

impl FieldElement {
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn field(&self) -> &Arc<FieldDesc> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    fn trimmed(&self) -> Vec<u32> {
        let mut v = self.coeffs.clone();
        trim(&mut v);
        v
    }

    fn same_field(&self, other: &Self) {
        assert!(
            *self.field == *other.field,
            "arithmetic across different fields"
        );
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        let r = poly_powmod(&self.trimmed(), e, &self.field.modulus, self.field.p);
        self.field.element(&r)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<FieldElement> {
        if self.is_zero() {
            return None;
        }
        Some(self.pow(self.field.size() - 2))
    }

    /// Multiplicative order; panics on zero.
    pub fn order(&self) -> u64 {
        assert!(!self.is_zero(), "zero has no multiplicative order");
        let group = self.field.size() - 1;
        let mut ord = group;
        for r in prime_factors(group) {
            while ord.is_multiple_of(r) && self.pow(ord / r).is_one() {
                ord /= r;
            }
        }
        ord
    }

    /// Lexicographic comparison key (constant term most significant).
    pub fn lex_key(&self) -> &[u32] {
        &self.coeffs
    }
}

/// `x^(p^e)`.
pub fn frobenius_pow(x: &FieldElement, e: u64) -> FieldElement {
    let d = x.field.d as u64;
    let mut cur = x.clone();
    for _ in 0..(e % d) {
        cur = cur.pow(x.field.p as u64);
    }
    cur
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.same_field(rhs);
        let p = self.field.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(&a, &b)| (a + b) % p)
            .collect();
        FieldElement {
            coeffs,
            field: self.field.clone(),
        }
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self + &(-rhs)
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let p = self.field.p;
        let coeffs = self.coeffs.iter().map(|&a| (p - a) % p).collect();
        FieldElement {
            coeffs,
            field: self.field.clone(),
        }
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.same_field(rhs);
        let r = poly_mulmod(
            &self.trimmed(),
            &rhs.trimmed(),
            &self.field.modulus,
            self.field.p,
        );
        self.field.element(&r)
    }
}

/// Injective field homomorphism `small -> big`, determined by the image of `x`.
#[derive(Debug, Clone)]
pub struct Embedding {
    small: Arc<FieldDesc>,
    big: Arc<FieldDesc>,
    /// Images of `1, x, ..., x^(d-1)`.
    powers: Vec<FieldElement>,
}

impl Embedding {
    pub fn source(&self) -> &Arc<FieldDesc> {
        &self.small
    }

    pub fn target(&self) -> &Arc<FieldDesc> {
        &self.big
    }

    /// Image of the generator `x` of the source field.
    pub fn generator_image(&self) -> FieldElement {
        if self.small.d == 1 {
            // GF(p) has no x; its generator as a field is 1.
            return self.big.one();
        }
        self.powers[1].clone()
    }

    pub fn apply(&self, a: &FieldElement) -> FieldElement {
        assert!(*a.field == *self.small, "element is not in the source field");
        let mut acc = self.big.zero();
        for (c, img) in a.coeffs.iter().zip(&self.powers) {
            if *c != 0 {
                acc = &acc + &(&self.big.from_int(*c as u64) * img);
            }
        }
        acc
    }

    /// Same map on packed codes.
    pub fn apply_packed(&self, code: u32) -> u32 {
        self.big.pack(&self.apply(&self.small.unpack(code)))
    }
}

/// Sends the generator of `small` to the lexicographically first root of its modulus in `big`.
pub fn embed(small: &Arc<FieldDesc>, big: &Arc<FieldDesc>) -> Result<Embedding, FieldError> {
    if small.p != big.p || !big.d.is_multiple_of(small.d) {
        return Err(FieldError::NoEmbedding {
            p1: small.p,
            d1: small.d,
            p2: big.p,
            d2: big.d,
        });
    }
    let d = small.d as usize;
    if Arc::ptr_eq(small, big) || small.modulus == big.modulus {
        return Ok(Embedding {
            small: small.clone(),
            big: big.clone(),
            powers: (0..d).map(|k| big.generator().pow(k as u64)).collect(),
        });
    }
    if small.d == 1 {
        return Ok(Embedding {
            small: small.clone(),
            big: big.clone(),
            powers: vec![big.one()],
        });
    }
    // Roots lie in the unique subfield of size p^d = {0} u <g^k (q-1)/(p^d-1)>.
    let q = big.size();
    let sub = small.size();
    let g = big.primitive_element();
    let step = g.pow((q - 1) / (sub - 1));
    let eval = |y: &FieldElement| {
        let mut acc = big.zero();
        for &c in small.modulus.iter().rev() {
            acc = &(&acc * y) + &big.from_int(c as u64);
        }
        acc.is_zero()
    };
    let mut cur = big.one();
    let mut best: Option<FieldElement> = None;
    for _ in 0..(sub - 1) {
        if eval(&cur) && best.as_ref().is_none_or(|b| cur.lex_key() < b.lex_key()) {
            best = Some(cur.clone());
        }
        cur = &cur * &step;
    }
    let root = best.expect("modulus splits in the subfield of matching degree");
    let mut powers = Vec::with_capacity(d);
    let mut acc = big.one();
    for _ in 0..d {
        powers.push(acc.clone());
        acc = &acc * &root;
    }
    Ok(Embedding {
        small: small.clone(),
        big: big.clone(),
        powers,
    })
}

/// `p^e - 1` as a big integer.
pub fn prime_power_minus_one(p: u64, e: u32) -> BigUint {
    let v = BigUint::from(p).pow(e);
    v - BigUint::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_modulus_is_x() {
        let f = build_field(2, 1).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
        let f = build_field(7, 1).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
    }

    #[test]
    fn gf4_modulus() {
        let f = build_field(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
    }

    #[test]
    fn gf9_modulus_matches_exhaustive_search() {
        // Oracle: a monic quadratic is irreducible iff it has no root in Z/3.
        let mut first = None;
        'outer: for c0 in 0..3u32 {
            for c1 in 0..3u32 {
                let has_root = (0..3u32).any(|t| (t * t + c1 * t + c0) % 3 == 0);
                if !has_root {
                    first = Some(vec![c0, c1, 1]);
                    break 'outer;
                }
            }
        }
        let f = build_field(3, 2).unwrap();
        assert_eq!(f.modulus(), first.unwrap().as_slice());
        assert_eq!(f.modulus(), &[1, 0, 1]);
    }

    #[test]
    fn build_field_errors() {
        assert_eq!(build_field(4, 1).unwrap_err(), FieldError::NonPrime(4));
        assert!(matches!(
            build_field(2, 21),
            Err(FieldError::BoundExceeded { .. })
        ));
        assert!(build_field_bounded(2, 21, 1 << 21).is_ok());
        assert_eq!(build_field(3, 0).unwrap_err(), FieldError::ZeroDegree);
    }

    #[test]
    fn frobenius_examples() {
        let f = build_field(2, 2).unwrap();
        let x = f.generator();
        assert_eq!(frobenius_pow(&x, 0), x);
        assert_eq!(frobenius_pow(&x, 1), f.element(&[1, 1]));
        assert_eq!(frobenius_pow(&x, 2), x);
        let g = build_field(5, 1).unwrap();
        for e in 0..4 {
            assert_eq!(frobenius_pow(&g.from_int(3), e), g.from_int(3));
        }
    }

    #[test]
    fn embedding_examples() {
        let f2 = build_field(2, 1).unwrap();
        let f4 = build_field(2, 2).unwrap();
        let f16 = build_field(2, 4).unwrap();
        let e = embed(&f2, &f4).unwrap();
        assert!(e.apply(&f2.zero()).is_zero());
        assert!(e.apply(&f2.one()).is_one());
        let e = embed(&f4, &f16).unwrap();
        assert_eq!(e.generator_image().order(), 3);
        let id = embed(&f16, &f16).unwrap();
        for y in f16.elements() {
            assert_eq!(id.apply(&y), y);
        }
        let f8 = build_field(2, 3).unwrap();
        assert!(matches!(
            embed(&f4, &f8),
            Err(FieldError::NoEmbedding { .. })
        ));
        let f9 = build_field(3, 2).unwrap();
        assert!(embed(&f4, &f9).is_err());
    }

    #[test]
    fn embedding_is_homomorphic() {
        let f9 = build_field(3, 2).unwrap();
        let f81 = build_field(3, 4).unwrap();
        let e = embed(&f9, &f81).unwrap();
        let elems: Vec<_> = f9.elements().collect();
        for a in &elems {
            for b in &elems {
                assert_eq!(e.apply(&(a * b)), &e.apply(a) * &e.apply(b));
                assert_eq!(e.apply(&(a + b)), &e.apply(a) + &e.apply(b));
            }
        }
    }

    #[test]
    fn embeddings_compose_along_chains() {
        let f2 = build_field(2, 2).unwrap();
        let f4 = build_field(2, 4).unwrap();
        let f8 = build_field(2, 8).unwrap();
        let a = embed(&f2, &f4).unwrap();
        let b = embed(&f4, &f8).unwrap();
        let direct = embed(&f2, &f8).unwrap();
        for y in f2.elements() {
            let composite = b.apply(&a.apply(&y));
            // The composite is an embedding; it agrees with the direct one up to Frobenius.
            let conj: Vec<_> = (0..2).map(|k| frobenius_pow(&direct.apply(&y), k)).collect();
            assert!(conj.contains(&composite));
        }
    }

    #[test]
    fn mult_order_examples() {
        assert_eq!(mult_order(2, 7).unwrap(), 3);
        assert_eq!(mult_order(5, 1).unwrap(), 1);
        assert_eq!(mult_order(7, 9).unwrap(), 3);
        assert_eq!(
            mult_order(3, 9).unwrap_err(),
            FieldError::NotCoprime { p: 3, m: 9 }
        );
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(l_valuation(48, 3), 1);
        assert_eq!(l_valuation(1, 5), 0);
        assert_eq!(l_valuation(342, 3), 2);
        assert_eq!(l_valuation_big(&BigUint::from(342u32), 3), 2);
        assert_eq!(prime_to_part(6, 3), 2);
    }

    #[test]
    fn tables_agree_with_polynomial_arithmetic() {
        for (p, d) in [(2u64, 3u32), (3, 2), (5, 2), (7, 1)] {
            let f = build_field(p, d).unwrap();
            let t = f.tables();
            let elems: Vec<_> = f.elements().collect();
            for a in &elems {
                for b in &elems {
                    let (ca, cb) = (f.pack(a), f.pack(b));
                    assert_eq!(t.mul(ca, cb), f.pack(&(a * b)));
                    assert_eq!(t.add(ca, cb), f.pack(&(a + b)));
                    assert_eq!(t.sub(ca, cb), f.pack(&(a - b)));
                }
                if !a.is_zero() {
                    assert_eq!(t.inv(f.pack(a)), f.pack(&a.inv().unwrap()));
                }
            }
        }
    }

    #[test]
    fn root_of_unity_has_exact_order() {
        let f = build_field(2, 4).unwrap();
        assert_eq!(f.root_of_unity(5).unwrap().order(), 5);
        assert!(f.root_of_unity(7).is_err());
    }

    #[test]
    fn poly_arith_agrees_with_tables() {
        let f = build_field(3, 3).unwrap();
        let t = f.tables();
        let slow = PolyArith::new(&f);
        for a in 0..27 {
            for b in 0..27 {
                assert_eq!(slow.add(a, b), t.add(a, b));
                assert_eq!(slow.mul(a, b), t.mul(a, b));
            }
            assert_eq!(slow.neg(a), t.neg(a));
            if a != 0 {
                assert_eq!(slow.inv(a), t.inv(a));
            }
        }
        let f = build_field(3, 8).unwrap();
        let t = f.tables();
        let slow = PolyArith::new(&f);
        for a in (0..6561).step_by(37) {
            for b in (0..6561).step_by(41) {
                assert_eq!(slow.mul(a, b), t.mul(a, b));
                assert_eq!(slow.add(a, b), t.add(a, b));
            }
        }
    }
}
