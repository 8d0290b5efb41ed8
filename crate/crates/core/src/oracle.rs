//! Brute-force structure of `E<G>` from explicit structure constants.
//!
//! Nothing here consults the orbit formulas: the algebra is built from the multiplication rule
//! `(a g)(b h) = a g(b) gh`, its center is solved for, the center is split into primitive
//! idempotents, and a simple module of every factor is cut out and character-counted. All
//! linear algebra is over the prime field; `F`-dimensions are `GF(p)`-dimensions divided by `f`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abgroup::{AbGroup, AbGroupError, Character, GroupElem, GroupRingElem};
use crate::ff::{
    build_field_bounded, frobenius_pow, mult_order, prime_factors, FieldDesc, FieldError,
    FieldOps, PrimeField, DEFAULT_MAX_FIELD_SIZE, HARD_FIELD_LIMIT,
};
use crate::linalg::{combine, kernel_of_columns, rank, Subspace};
use crate::skewring::SkewRingDesc;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("algebra of F-dimension {dim} exceeds the oracle bound {bound}")]
    BoundExceeded { dim: u64, bound: u64 },
    #[error("malformed structure constants: {0}")]
    Malformed(String),
    #[error("unit law fails at basis element {0}")]
    NoUnit(usize),
    #[error("not associative on basis triple ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("subalgebra is not commutative")]
    NotCommutative,
    #[error("subspace is not closed under multiplication")]
    NotClosed,
    #[error("found {found} primitive idempotents, expected {expected}")]
    SplittingFailure { found: usize, expected: usize },
    #[error("factor of dimension {dim} over a center of dimension {center} is not a full matrix ring")]
    NonSquareDimension { dim: usize, center: usize },
    #[error("center check against E[N] failed: {0}")]
    CenterCheck(String),
    #[error("no minimal left ideal found in {0} attempts")]
    IdealSearchExhausted(usize),
    #[error("splitting field has degree {0} over E, beyond the supported range")]
    SplittingFieldTooLarge(u64),
    #[error("factors do not fill the algebra: {0}")]
    DimensionMismatch(String),
    #[error("character count inconsistent: {0}")]
    CharacterCount(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Group(#[from] AbGroupError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Largest `[E:F] |G|` the oracle will build.
    pub max_dim: u64,
    /// Fields up to this size get discrete-log tables; larger ones use polynomial arithmetic.
    pub max_field_size: u64,
    pub seed: u64,
    /// Associativity is checked on every basis triple up to this dimension, sampled above it.
    pub full_associativity_dim: usize,
    pub associativity_samples: usize,
    pub tensors: bool,
    pub max_ideal_attempts: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_dim: 256,
            max_field_size: DEFAULT_MAX_FIELD_SIZE,
            seed: 0x5eed,
            full_associativity_dim: 32,
            associativity_samples: 2000,
            tensors: true,
            max_ideal_attempts: 64,
        }
    }
}

/// Skew group ring bookkeeping: basis index `(k |N| + a) D + s` is `x^s (a, phi^k)`.
///
/// Besides the structure constants, the layout carries the multiplication rule blockwise over
/// `E`, which multiplies dense elements far faster than the tables do.
#[derive(Clone)]
struct SkewLayout {
    f: u32,
    group: AbGroup,
    field: Arc<FieldDesc>,
    ops: Arc<dyn FieldOps>,
    /// Block of `g h` for blocks `g`, `h`.
    block_target: Vec<u32>,
    sigma: Vec<Vec<u32>>,
}

impl std::fmt::Debug for SkewLayout {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("SkewLayout")
            .field("f", &self.f)
            .field("group", &self.group)
            .field("field", &self.field)
            .finish()
    }
}

impl SkewLayout {
    fn e_degree(&self) -> usize {
        self.field.degree() as usize
    }

    fn n_order(&self) -> usize {
        self.group.order() as usize
    }

    fn basis_index(&self, a: usize, k: usize, s: usize) -> usize {
        (k * self.n_order() + a) * self.e_degree() + s
    }

    fn pack(&self, coords: &[u32]) -> u32 {
        let p = self.field.p();
        coords.iter().rev().fold(0u32, |acc, &x| acc * p + x)
    }

    fn unpack_into(&self, mut code: u32, out: &mut [u32]) {
        let p = self.field.p();
        for x in out.iter_mut() {
            *x = code % p;
            code /= p;
        }
    }

    /// `sigma^k` applied to coordinates; `sigma[k][t]` holds `sigma^k(x^t)`.
    fn sigma_coords(&self, k: usize, c: &[u32]) -> u32 {
        let p = self.field.p() as u64;
        let dd = c.len();
        let mut acc = [0u64; 32];
        for (t, &ct) in c.iter().enumerate() {
            if ct == 0 {
                continue;
            }
            for (a, &m) in acc.iter_mut().zip(&self.sigma[k][t * dd..(t + 1) * dd]) {
                *a += ct as u64 * m as u64;
            }
        }
        let reduced: Vec<u32> = acc[..dd].iter().map(|&x| (x % p) as u32).collect();
        self.pack(&reduced)
    }

    fn mul(&self, u: &[u32], v: &[u32]) -> Vec<u32> {
        let dd = self.e_degree();
        let nn = self.n_order();
        let ng = u.len() / dd;
        let ops = self.ops.as_ref();
        let ub: Vec<(usize, u32)> = u
            .chunks(dd)
            .enumerate()
            .filter(|(_, c)| c.iter().any(|&x| x != 0))
            .map(|(g, c)| (g, self.pack(c)))
            .collect();
        let vb: Vec<(usize, &[u32])> = v
            .chunks(dd)
            .enumerate()
            .filter(|(_, c)| c.iter().any(|&x| x != 0))
            .collect();
        let mut twisted: Vec<Option<Vec<u32>>> = vec![None; ng / nn];
        let mut acc = vec![0u32; ng];
        for &(g, a) in &ub {
            let k = g / nn;
            let vk = twisted[k].get_or_insert_with(|| {
                vb.iter().map(|&(_, c)| self.sigma_coords(k, c)).collect()
            });
            let row = &self.block_target[g * ng..(g + 1) * ng];
            for (&(h, _), &b) in vb.iter().zip(vk.iter()) {
                let t = row[h] as usize;
                acc[t] = ops.add(acc[t], ops.mul(a, b));
            }
        }
        let mut out = vec![0u32; u.len()];
        for (t, &c) in acc.iter().enumerate() {
            if c != 0 {
                self.unpack_into(c, &mut out[t * dd..(t + 1) * dd]);
            }
        }
        out
    }
}

/// A finite-dimensional `GF(p)`-algebra whose basis products each land in one block of
/// `block` consecutive basis vectors.
#[derive(Debug, Clone)]
pub struct StructAlgebra {
    p: u32,
    dim: usize,
    block: usize,
    targets: Vec<u32>,
    coeffs: Vec<u32>,
    unit: Vec<u32>,
    generators: Vec<Vec<u32>>,
    skew: Option<SkewLayout>,
}

fn unit_vector(dim: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0u32; dim];
    v[i] = 1;
    v
}

impl StructAlgebra {
    /// `targets[i dim + j]` is the block of `b_i b_j` and
    /// `coeffs[(i dim + j) block ..][.. block]` its coordinates there. An empty generator list
    /// means the whole basis.
    pub fn new(
        p: u32,
        block: usize,
        targets: Vec<u32>,
        coeffs: Vec<u32>,
        unit: Vec<u32>,
        generators: Vec<Vec<u32>>,
    ) -> Result<Self, OracleError> {
        let dim = unit.len();
        if dim == 0 || block == 0 || !dim.is_multiple_of(block) {
            return Err(OracleError::Malformed(format!(
                "dimension {dim} with block size {block}"
            )));
        }
        if targets.len() != dim * dim || coeffs.len() != dim * dim * block {
            return Err(OracleError::Malformed("table sizes".into()));
        }
        if targets.iter().any(|&t| t as usize >= dim / block) || coeffs.iter().any(|&c| c >= p) {
            return Err(OracleError::Malformed("table entries out of range".into()));
        }
        let generators = if generators.is_empty() {
            (0..dim).map(|i| unit_vector(dim, i)).collect()
        } else {
            generators
        };
        let alg = StructAlgebra {
            p,
            dim,
            block,
            targets,
            coeffs,
            unit,
            generators,
            skew: None,
        };
        alg.check_unit()?;
        Ok(alg)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> &[u32] {
        &self.unit
    }

    pub fn generators(&self) -> &[Vec<u32>] {
        &self.generators
    }

    pub fn basis_vector(&self, i: usize) -> Vec<u32> {
        unit_vector(self.dim, i)
    }

    fn field(&self) -> PrimeField {
        PrimeField::new(self.p)
    }

    pub fn mul(&self, u: &[u32], v: &[u32]) -> Vec<u32> {
        match &self.skew {
            Some(lay) => lay.mul(u, v),
            None => self.mul_by_tables(u, v),
        }
    }

    /// Product computed from the structure constants alone.
    pub fn mul_by_tables(&self, u: &[u32], v: &[u32]) -> Vec<u32> {
        let (d, b, p) = (self.dim, self.block, self.p as u64);
        let nzv: Vec<(usize, u64)> = v
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(j, &x)| (j, x as u64))
            .collect();
        let mut acc = vec![0u64; d];
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0 {
                continue;
            }
            let row = i * d;
            for &(j, vj) in &nzv {
                let c = ui as u64 * vj % p;
                let t = self.targets[row + j] as usize * b;
                let co = &self.coeffs[(row + j) * b..(row + j + 1) * b];
                for (a, &x) in acc[t..t + b].iter_mut().zip(co) {
                    *a += c * x as u64;
                }
            }
        }
        acc.into_iter().map(|x| (x % p) as u32).collect()
    }

    pub fn add(&self, u: &[u32], v: &[u32]) -> Vec<u32> {
        u.iter().zip(v).map(|(&a, &b)| (a + b) % self.p).collect()
    }

    pub fn sub(&self, u: &[u32], v: &[u32]) -> Vec<u32> {
        u.iter()
            .zip(v)
            .map(|(&a, &b)| (a + self.p - b) % self.p)
            .collect()
    }

    pub fn scale(&self, c: u32, u: &[u32]) -> Vec<u32> {
        let p = self.p as u64;
        u.iter().map(|&a| (a as u64 * c as u64 % p) as u32).collect()
    }

    pub fn pow(&self, u: &[u32], mut e: u64) -> Vec<u32> {
        let mut acc = self.unit.clone();
        let mut base = u.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn check_unit(&self) -> Result<(), OracleError> {
        for i in 0..self.dim {
            let b = self.basis_vector(i);
            if self.mul(&self.unit, &b) != b || self.mul(&b, &self.unit) != b {
                return Err(OracleError::NoUnit(i));
            }
        }
        Ok(())
    }

    /// Random dense products must agree with the structure constants; a wrong table entry
    /// survives each trial with probability at most `1/p`.
    fn check_fast_product(&self, seed: u64) -> Result<(), OracleError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfa57);
        let trials = if self.dim > 256 { 6 } else { 12 };
        for _ in 0..trials {
            let u = random_vector(&mut rng, self.dim, self.p);
            let v = random_vector(&mut rng, self.dim, self.p);
            if self.mul(&u, &v) != self.mul_by_tables(&u, &v) {
                return Err(OracleError::Malformed(
                    "blockwise product disagrees with the structure constants".into(),
                ));
            }
        }
        Ok(())
    }

    fn check_triple(&self, i: usize, j: usize, k: usize) -> Result<(), OracleError> {
        let (bi, bj, bk) = (
            self.basis_vector(i),
            self.basis_vector(j),
            self.basis_vector(k),
        );
        if self.mul(&self.mul(&bi, &bj), &bk) != self.mul(&bi, &self.mul(&bj, &bk)) {
            return Err(OracleError::NotAssociative(i, j, k));
        }
        Ok(())
    }

    /// Every basis triple when `dim <= full_dim`; otherwise all triples of generator-basis
    /// elements plus `samples` seeded random triples.
    pub fn check_associativity(
        &self,
        full_dim: usize,
        samples: usize,
        seed: u64,
    ) -> Result<(), OracleError> {
        let d = self.dim;
        if d <= full_dim {
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        self.check_triple(i, j, k)?;
                    }
                }
            }
            return Ok(());
        }
        let gens: Vec<usize> = self
            .generators
            .iter()
            .filter_map(|g| {
                let mut nz = g.iter().enumerate().filter(|(_, &x)| x != 0);
                match (nz.next(), nz.next()) {
                    (Some((i, _)), None) => Some(i),
                    _ => None,
                }
            })
            .chain(std::iter::once(0))
            .collect();
        for &i in &gens {
            for &j in &gens {
                for &k in &gens {
                    self.check_triple(i, j, k)?;
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let (i, j, k) = (rng.gen_range(0..d), rng.gen_range(0..d), rng.gen_range(0..d));
            self.check_triple(i, j, k)?;
        }
        Ok(())
    }

    /// `F`-dimension of a `GF(p)`-subspace.
    fn f_degree(&self) -> usize {
        self.skew.as_ref().map_or(1, |s| s.f as usize)
    }

    /// Smallest subspace containing `seeds` and closed under left multiplication by the
    /// generators, i.e. the left ideal they generate. `None` once the dimension passes `cap`.
    pub fn left_ideal(&self, seeds: &[Vec<u32>], cap: Option<usize>) -> Option<Vec<Vec<u32>>> {
        let field = self.field();
        let mut span = Subspace::new(&field, self.dim);
        let mut accepted: Vec<Vec<u32>> = Vec::new();
        for s in seeds {
            if span.insert(s) {
                accepted.push(s.clone());
            }
        }
        let mut next = 0;
        while next < accepted.len() {
            let w = accepted[next].clone();
            next += 1;
            for g in &self.generators {
                let v = self.mul(g, &w);
                if span.insert(&v) {
                    accepted.push(v);
                    if cap.is_some_and(|c| accepted.len() > c) {
                        return None;
                    }
                }
            }
        }
        Some(accepted)
    }
}

/// The skew group ring `E<N x| Delta>` as a `GF(p)`-algebra with basis `x^s g`.
pub fn regular_algebra(
    desc: &SkewRingDesc,
    cfg: &OracleConfig,
) -> Result<StructAlgebra, OracleError> {
    let fdim = desc.dim_over_f();
    if fdim > cfg.max_dim {
        return Err(OracleError::BoundExceeded {
            dim: fdim,
            bound: cfg.max_dim,
        });
    }
    let p = desc.p() as u32;
    let f = desc.f();
    let n = desc.n() as usize;
    let dd = desc.e_degree() as usize;
    let field = build_field_bounded(p as u64, dd as u32, HARD_FIELD_LIMIT)?;
    let group = desc.group().clone();
    let nn = group.order() as usize;
    let ng = nn * n;
    let dim = dd * ng;

    // twisted[k][s][t] = x^s * sigma^k(x^t), sigma the p^f-power map
    let x = field.generator();
    let xp: Vec<_> = (0..dd).map(|s| x.pow(s as u64)).collect();
    let mut twisted = vec![0u32; n * dd * dd * dd];
    for k in 0..n {
        for t in 0..dd {
            let st = frobenius_pow(&xp[t], f as u64 * k as u64);
            for s in 0..dd {
                let prod = &xp[s] * &st;
                let off = ((k * dd + s) * dd + t) * dd;
                twisted[off..off + dd].copy_from_slice(prod.coeffs());
            }
        }
    }

    // (a, k)(b, l) = (a + theta^k b, k + l)
    let tuples: Vec<Vec<u32>> = group.tuples().collect();
    let add: Vec<usize> = tuples
        .iter()
        .flat_map(|a| {
            tuples.iter().map(|b| {
                let s = group.add(&GroupElem(a.clone()), &GroupElem(b.clone()));
                group.index_of(&s.0)
            })
        })
        .collect();
    let perms: Vec<Vec<usize>> = (0..n)
        .map(|k| desc.theta().pow(k as u64).permutation())
        .collect();
    let mut block_target = vec![0u32; ng * ng];
    for k in 0..n {
        for a in 0..nn {
            for l in 0..n {
                for b in 0..nn {
                    let sum = add[a * nn + perms[k][b]];
                    block_target[(k * nn + a) * ng + l * nn + b] =
                        (((k + l) % n) * nn + sum) as u32;
                }
            }
        }
    }

    let mut targets = vec![0u32; dim * dim];
    let mut coeffs = vec![0u32; dim * dim * dd];
    for i in 0..dim {
        let (g, s) = (i / dd, i % dd);
        let k = g / nn;
        for j in 0..dim {
            let (h, t) = (j / dd, j % dd);
            let ij = i * dim + j;
            targets[ij] = block_target[g * ng + h];
            let off = ((k * dd + s) * dd + t) * dd;
            coeffs[ij * dd..(ij + 1) * dd].copy_from_slice(&twisted[off..off + dd]);
        }
    }

    let layout = SkewLayout {
        f,
        group: group.clone(),
        ops: field.ops(cfg.max_field_size),
        field,
        block_target,
        sigma: (0..n)
            .map(|k| {
                (0..dd)
                    .flat_map(|t| {
                        let off = (k * dd * dd + t) * dd;
                        twisted[off..off + dd].to_vec()
                    })
                    .collect()
            })
            .collect(),
    };
    let mut generators = Vec::new();
    if dd > 1 {
        generators.push(unit_vector(dim, layout.basis_index(0, 0, 1)));
    }
    if n > 1 {
        generators.push(unit_vector(dim, layout.basis_index(0, 1, 0)));
    }
    for j in 0..group.rank() {
        let a = group.index_of(&group.generator(j).0);
        generators.push(unit_vector(dim, layout.basis_index(a, 0, 0)));
    }
    let mut alg = StructAlgebra::new(p, dd, targets, coeffs, unit_vector(dim, 0), generators)?;
    alg.skew = Some(layout);
    alg.check_fast_product(cfg.seed)?;
    alg.check_associativity(
        cfg.full_associativity_dim,
        cfg.associativity_samples,
        cfg.seed,
    )?;
    Ok(alg)
}

/// A `GF(p)`-subspace of an algebra given by a basis in reduced echelon form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subalgebra {
    pub basis: Vec<Vec<u32>>,
}

impl Subalgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Elements commuting with every generator. For skew group rings this also checks that
/// `E (x)_F Z -> E[N]` is an isomorphism.
pub fn center(alg: &StructAlgebra) -> Result<Subalgebra, OracleError> {
    let field = alg.field();
    let mut basis: Vec<Vec<u32>> = (0..alg.dim).map(|i| alg.basis_vector(i)).collect();
    for y in &alg.generators {
        let images: Vec<Vec<u32>> = basis
            .iter()
            .map(|z| alg.sub(&alg.mul(z, y), &alg.mul(y, z)))
            .collect();
        let ker = kernel_of_columns(&field, &images, alg.dim);
        basis = ker.iter().map(|c| combine(&field, c, &basis)).collect();
    }
    crate::linalg::rref(&field, &mut basis);
    let z = Subalgebra { basis };
    if alg.skew.is_some() {
        mu_check(alg, &z)?;
    }
    Ok(z)
}

fn mu_check(alg: &StructAlgebra, z: &Subalgebra) -> Result<(), OracleError> {
    let lay = alg.skew.as_ref().expect("skew layout");
    let dd = lay.e_degree();
    let nn = lay.n_order();
    if z.dim() != lay.f as usize * nn {
        return Err(OracleError::CenterCheck(format!(
            "dim_p Z = {}, expected f |N| = {}",
            z.dim(),
            lay.f as usize * nn
        )));
    }
    let n_span = dd * nn;
    if z
        .basis
        .iter()
        .any(|v| v[n_span..].iter().any(|&c| c != 0))
    {
        return Err(OracleError::CenterCheck("center leaves E[N]".into()));
    }
    let field = alg.field();
    let mut span = Subspace::new(&field, alg.dim);
    for s in 0..dd {
        let xs = alg.basis_vector(lay.basis_index(0, 0, s));
        for v in &z.basis {
            span.insert(&alg.mul(&xs, v));
        }
    }
    if span.dim() != n_span {
        return Err(OracleError::CenterCheck(format!(
            "E Z has dimension {} inside E[N] of dimension {n_span}",
            span.dim()
        )));
    }
    Ok(())
}

/// `sum_k c_k x^k` evaluated at the field element `lambda`.
fn eval_poly(c: &[u32], lambda: u32, p: u32) -> u32 {
    c.iter()
        .rev()
        .fold(0u64, |acc, &a| (acc * lambda as u64 + a as u64) % p as u64) as u32
}

/// Splits the idempotent `e` along an element `c` of `e B` (so `c^p = c`), by Lagrange
/// interpolation at the roots of its minimal polynomial.
fn split_by(alg: &StructAlgebra, e: &[u32], c: &[u32]) -> Result<Vec<Vec<u32>>, OracleError> {
    let field = alg.field();
    let p = alg.p;
    let mut span = Subspace::with_coordinates(&field, alg.dim);
    let mut powers = vec![e.to_vec()];
    span.insert(e);
    let minpoly = loop {
        let next = alg.mul(powers.last().expect("nonempty"), c);
        if let Some(coords) = span.coordinates(&next) {
            // next = sum coords[i] c^i
            let mut m: Vec<u32> = coords.iter().map(|&a| (p - a) % p).collect();
            m.push(1);
            break m;
        }
        span.insert(&next);
        powers.push(next);
    };
    let roots: Vec<u32> = (0..p).filter(|&l| eval_poly(&minpoly, l, p) == 0).collect();
    if roots.len() != minpoly.len() - 1 {
        return Err(OracleError::SplittingFailure {
            found: roots.len(),
            expected: minpoly.len() - 1,
        });
    }
    if roots.len() == 1 {
        return Ok(vec![e.to_vec()]);
    }
    let mut out = Vec::with_capacity(roots.len());
    for &l in &roots {
        let mut acc = e.to_vec();
        for &m in roots.iter().filter(|&&m| m != l) {
            let shifted = alg.sub(c, &alg.scale(m, e));
            let inv = field.inv((l + p - m) % p);
            acc = alg.scale(inv, &alg.mul(&acc, &shifted));
        }
        out.push(acc);
    }
    Ok(out)
}

/// Primitive idempotents of a commutative subalgebra with unit `unit`, given a basis and the
/// `p`-th powers of the basis vectors.
fn split_commutative(
    alg: &StructAlgebra,
    basis: &[Vec<u32>],
    frob: &[Vec<u32>],
    unit: &[u32],
) -> Result<Vec<Vec<u32>>, OracleError> {
    let field = alg.field();
    let m = basis.len();
    let mut span = Subspace::with_coordinates(&field, alg.dim);
    for b in basis {
        if !span.insert(b) {
            return Err(OracleError::Malformed("dependent subalgebra basis".into()));
        }
    }
    let mut cols = Vec::with_capacity(m);
    for (j, fb) in frob.iter().enumerate() {
        let mut c = span.coordinates(fb).ok_or(OracleError::NotClosed)?;
        c[j] = field.sub(c[j], 1);
        cols.push(c);
    }
    let fixed: Vec<Vec<u32>> = kernel_of_columns(&field, &cols, m)
        .iter()
        .map(|c| combine(&field, c, basis))
        .collect();
    let expected = fixed.len();
    let mut idems = vec![unit.to_vec()];
    for b in &fixed {
        if idems.len() == expected {
            break;
        }
        let mut next = Vec::new();
        for e in &idems {
            next.extend(split_by(alg, e, &alg.mul(e, b))?);
        }
        idems = next;
    }
    if idems.len() != expected {
        return Err(OracleError::SplittingFailure {
            found: idems.len(),
            expected,
        });
    }
    Ok(idems)
}

/// Complete set of primitive orthogonal idempotents of `z`, via the subalgebra fixed by
/// `b -> b^p`.
pub fn primitive_idempotents(
    alg: &StructAlgebra,
    z: &Subalgebra,
) -> Result<Vec<Vec<u32>>, OracleError> {
    for (i, a) in z.basis.iter().enumerate() {
        for b in &z.basis[i + 1..] {
            if alg.mul(a, b) != alg.mul(b, a) {
                return Err(OracleError::NotCommutative);
            }
        }
    }
    let frob: Vec<Vec<u32>> = z.basis.iter().map(|b| alg.pow(b, alg.p as u64)).collect();
    let idems = split_commutative(alg, &z.basis, &frob, &alg.unit)?;
    let zero = vec![0u32; alg.dim];
    let mut total = zero.clone();
    for (i, e) in idems.iter().enumerate() {
        if alg.mul(e, e) != *e {
            return Err(OracleError::SplittingFailure {
                found: i,
                expected: idems.len(),
            });
        }
        for f in &idems[i + 1..] {
            if alg.mul(e, f) != zero {
                return Err(OracleError::SplittingFailure {
                    found: i,
                    expected: idems.len(),
                });
            }
        }
        total = alg.add(&total, e);
    }
    if total != alg.unit {
        return Err(OracleError::SplittingFailure {
            found: idems.len(),
            expected: idems.len(),
        });
    }
    Ok(idems)
}

/// Shape of the factor `e A` cut out by a central primitive idempotent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorShape {
    pub d: u32,
    /// `[Z_i : F]`.
    pub center_degree: u32,
    /// `dim_p e A`.
    pub dim: usize,
    /// Basis of `e Z` over `GF(p)`.
    pub center_basis: Vec<Vec<u32>>,
}

pub fn factor_structure(
    alg: &StructAlgebra,
    z: &Subalgebra,
    e: &[u32],
) -> Result<FactorShape, OracleError> {
    let field = alg.field();
    let mut zs = Subspace::new(&field, alg.dim);
    let mut center_basis = Vec::new();
    for v in &z.basis {
        let w = alg.mul(v, e);
        if zs.insert(&w) {
            center_basis.push(w);
        }
    }
    let zdim = center_basis.len();
    let mut span = Subspace::new(&field, alg.dim);
    for i in 0..alg.dim {
        span.insert(&alg.mul(&alg.basis_vector(i), e));
    }
    let adim = span.dim();
    let f = alg.f_degree();
    if zdim == 0 || zdim % f != 0 || !adim.is_multiple_of(zdim) {
        return Err(OracleError::NonSquareDimension {
            dim: adim,
            center: zdim,
        });
    }
    let ratio = adim / zdim;
    let d = (ratio as f64).sqrt().round() as usize;
    if d * d != ratio {
        return Err(OracleError::NonSquareDimension {
            dim: adim,
            center: zdim,
        });
    }
    Ok(FactorShape {
        d: d as u32,
        center_degree: (zdim / f) as u32,
        dim: adim,
        center_basis,
    })
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize, p: u32) -> Vec<u32> {
    (0..dim).map(|_| rng.gen_range(0..p)).collect()
}

/// A minimal left ideal of the factor `e A`, found by descending through idempotents of
/// commutative subalgebras `K[x]` with `K = e Z` and `x` a seeded random element of `eps A eps`.
pub fn minimal_left_ideal(
    alg: &StructAlgebra,
    e: &[u32],
    shape: &FactorShape,
    seed: u64,
    max_attempts: usize,
) -> Result<Vec<Vec<u32>>, OracleError> {
    let field = alg.field();
    let p = alg.p;
    let kdim = shape.center_basis.len();
    let target = shape.dim / shape.d as usize;
    let zp: Vec<Vec<u32>> = shape
        .center_basis
        .iter()
        .map(|z| alg.pow(z, p as u64))
        .collect();
    let mut eps = e.to_vec();
    let mut r = shape.d as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_attempts {
        if r == 1 {
            break;
        }
        let w = alg.mul(e, &random_vector(&mut rng, alg.dim, p));
        let x = alg.mul(&alg.mul(&eps, &w), &eps);
        // K[x] = span{z x^k}, x^0 = eps
        let mut span = Subspace::new(&field, alg.dim);
        let mut basis = Vec::new();
        let mut tags = Vec::new();
        let mut xk = eps.clone();
        let mut k = 0usize;
        loop {
            let mut grew = false;
            for (j, z) in shape.center_basis.iter().enumerate() {
                let v = alg.mul(z, &xk);
                if span.insert(&v) {
                    basis.push(v);
                    tags.push((j, k));
                    grew = true;
                }
            }
            if !grew {
                break;
            }
            xk = alg.mul(&xk, &x);
            k += 1;
        }
        if basis.len() != r * kdim {
            continue;
        }
        // (z x^k)^p = z^p (x^p)^k
        let xp = alg.pow(&x, p as u64);
        let mut xpk = vec![eps.clone()];
        for _ in 1..k {
            let next = alg.mul(xpk.last().expect("nonempty"), &xp);
            xpk.push(next);
        }
        let frob: Vec<Vec<u32>> = tags
            .iter()
            .map(|&(j, k)| alg.mul(&zp[j], &xpk[k]))
            .collect();
        let idems = split_commutative(alg, &basis, &frob, &eps)?;
        if idems.len() < 2 {
            continue;
        }
        // x is cyclic over K, so the rank of an idempotent is dim_K of its share of K[x]
        let mut best: Option<(usize, Vec<u32>)> = None;
        for id in idems {
            let mut s = Subspace::new(&field, alg.dim);
            let mut y = id.clone();
            for _ in 0..r {
                for z in &shape.center_basis {
                    s.insert(&alg.mul(z, &y));
                }
                y = alg.mul(&x, &y);
            }
            let rank = s.dim() / kdim;
            if best.as_ref().is_none_or(|(b, _)| rank < *b) {
                best = Some((rank, id));
            }
        }
        let (rank, id) = best.expect("at least two idempotents");
        if rank < r {
            r = rank;
            eps = id;
        }
    }
    if r != 1 {
        return Err(OracleError::IdealSearchExhausted(max_attempts));
    }
    let ideal = alg
        .left_ideal(&[eps], Some(target))
        .ok_or(OracleError::IdealSearchExhausted(max_attempts))?;
    if ideal.len() != target {
        return Err(OracleError::IdealSearchExhausted(max_attempts));
    }
    Ok(ideal)
}

// ---------------------------------------------------------------------------
// Small dense matrices over E (packed codes).

type Matrix = Vec<Vec<u32>>;

fn identity(c: usize) -> Matrix {
    (0..c).map(|i| unit_vector(c, i)).collect()
}

fn mat_mul(f: &dyn FieldOps, a: &Matrix, b: &Matrix) -> Matrix {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            let mut out = vec![0u32; n];
            for (k, &x) in row.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (o, &y) in out.iter_mut().zip(&b[k]) {
                    if y != 0 {
                        *o = f.add(*o, f.mul(x, y));
                    }
                }
            }
            out
        })
        .collect()
}

fn kron(f: &dyn FieldOps, a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let (ca, cb) = (a[0].len(), b[0].len());
    let mut out = vec![vec![0u32; ca * cb]; ra * rb];
    for i in 0..ra {
        for j in 0..ca {
            let x = a[i][j];
            if x == 0 {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[i * rb + k][j * cb + l] = f.mul(x, b[k][l]);
                }
            }
        }
    }
    out
}

/// An `E`-linear representation of `N`: one matrix per element, in lexicographic order.
#[derive(Debug, Clone)]
pub struct NRepresentation {
    pub dim: usize,
    pub matrices: Vec<Matrix>,
}

impl NRepresentation {
    fn from_generators(f: &dyn FieldOps, group: &AbGroup, gens: &[Matrix], dim: usize) -> Self {
        let powers: Vec<Vec<Matrix>> = gens
            .iter()
            .zip(group.factors())
            .map(|(g, &m)| {
                let mut out = vec![identity(dim)];
                for _ in 1..m {
                    let next = mat_mul(f, out.last().expect("nonempty"), g);
                    out.push(next);
                }
                out
            })
            .collect();
        let matrices = group
            .tuples()
            .map(|t| {
                t.iter()
                    .enumerate()
                    .fold(identity(dim), |acc, (j, &a)| {
                        mat_mul(f, &acc, &powers[j][a as usize])
                    })
            })
            .collect();
        NRepresentation { dim, matrices }
    }

    fn tensor(&self, other: &Self, f: &dyn FieldOps) -> Self {
        NRepresentation {
            dim: self.dim * other.dim,
            matrices: self
                .matrices
                .iter()
                .zip(&other.matrices)
                .map(|(a, b)| kron(f, a, b))
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// E' = E[y]/(h): polynomials over packed codes.

fn ptrim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn pmul(f: &dyn FieldOps, a: &[u32], b: &[u32]) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
    }
    ptrim(&mut out);
    out
}

fn prem(f: &dyn FieldOps, a: &[u32], m: &[u32]) -> Vec<u32> {
    let dm = m.len() - 1;
    let lead_inv = f.inv(m[dm]);
    let mut r = a.to_vec();
    ptrim(&mut r);
    while r.len() > dm {
        let c = f.mul(*r.last().expect("nonempty"), lead_inv);
        let shift = r.len() - 1 - dm;
        for (k, &mc) in m.iter().enumerate() {
            r[shift + k] = f.sub(r[shift + k], f.mul(c, mc));
        }
        ptrim(&mut r);
    }
    r
}

fn pgcd(f: &dyn FieldOps, a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    ptrim(&mut a);
    ptrim(&mut b);
    while !b.is_empty() {
        let r = prem(f, &a, &b);
        a = b;
        b = r;
    }
    a
}

fn ppow_mod(f: &dyn FieldOps, base: &[u32], e: &BigUint, m: &[u32]) -> Vec<u32> {
    let mut acc = prem(f, &[1], m);
    let b = prem(f, base, m);
    for i in (0..e.bits()).rev() {
        acc = prem(f, &pmul(f, &acc, &acc), m);
        if e.bit(i) {
            acc = prem(f, &pmul(f, &acc, &b), m);
        }
    }
    acc
}

fn psub(f: &dyn FieldOps, a: &[u32], b: &[u32]) -> Vec<u32> {
    let n = a.len().max(b.len());
    let mut out: Vec<u32> = (0..n)
        .map(|i| {
            f.sub(
                a.get(i).copied().unwrap_or(0),
                b.get(i).copied().unwrap_or(0),
            )
        })
        .collect();
    ptrim(&mut out);
    out
}

/// Rabin's test over `E` (of size `q`) for a monic `h` of degree `k >= 2`.
fn irreducible_over(f: &dyn FieldOps, q: u64, h: &[u32]) -> bool {
    let k = h.len() as u64 - 1;
    let y = vec![0u32, 1];
    let qb = BigUint::from(q);
    let frob_iter = |times: u64| {
        let mut cur = y.clone();
        for _ in 0..times {
            cur = ppow_mod(f, &cur, &qb, h);
        }
        cur
    };
    if !psub(f, &frob_iter(k), &y).is_empty() {
        return false;
    }
    prime_factors(k).into_iter().all(|r| {
        let g = pgcd(f, h, &psub(f, &frob_iter(k / r), &y));
        g.len() == 1
    })
}

/// Splitting field data for counting characters of `N` over `E`.
struct CharacterTable {
    group: AbGroup,
    /// Orbits of `chi -> chi^|E|`.
    orbits: Vec<Vec<Character>>,
    /// `coeffs[o][n]`: the coefficient of `n` in the `E`-rational idempotent of orbit `o`.
    coeffs: Vec<Vec<u32>>,
}

impl CharacterTable {
    fn new(
        group: &AbGroup,
        field: &Arc<FieldDesc>,
        ops: &dyn FieldOps,
    ) -> Result<Self, OracleError> {
        let q = field.size();
        let e = group.exponent();
        let nn = group.order();
        let p = field.p() as u64;
        // orbits of the |E|-power map on characters
        let mut seen = vec![false; nn as usize];
        let mut orbits = Vec::new();
        for chi in group.characters() {
            if seen[group.index_of(&chi.0)] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut cur = chi;
            while !seen[group.index_of(&cur.0)] {
                seen[group.index_of(&cur.0)] = true;
                orbit.push(cur.clone());
                cur = group.character_pow(&cur, q);
            }
            orbit.sort();
            orbits.push(orbit);
        }
        let k = mult_order(q % e.max(1), e.max(1))?;
        if k > 64 {
            return Err(OracleError::SplittingFieldTooLarge(k));
        }
        let h = if k == 1 {
            vec![0, 1]
        } else {
            first_irreducible_over(ops, q, k as usize)
        };
        let big_order = BigUint::from(q).pow(k as u32) - BigUint::one();
        let exp = &big_order / BigUint::from(e);
        // first element, counting in base |E|, whose power has exact order e; when k > 1 no
        // constant qualifies, so start at y
        let zeta = (if k == 1 { 1 } else { q }..)
            .map(|t| {
                let mut digits = Vec::new();
                let mut t = t;
                while t > 0 {
                    digits.push((t % q) as u32);
                    t /= q;
                }
                ppow_mod(ops, &digits, &exp, &h)
            })
            .find(|z| {
                !z.is_empty()
                    && prime_factors(e).into_iter().all(|r| {
                        ppow_mod(ops, z, &BigUint::from(e / r), &h) != vec![1]
                    })
            })
            .expect("cyclic unit group has elements of every dividing order");
        let mut zpow = vec![vec![1u32]];
        for _ in 1..e {
            let next = prem(ops, &pmul(ops, zpow.last().expect("nonempty"), &zeta), &h);
            zpow.push(next);
        }
        let n_inv = ops.inv((nn % p) as u32);
        let elems: Vec<GroupElem> = group.elements().collect();
        let mut coeffs = Vec::with_capacity(orbits.len());
        for orbit in &orbits {
            let mut row = Vec::with_capacity(elems.len());
            for n in &elems {
                let mut acc: Vec<u32> = Vec::new();
                for chi in orbit {
                    let a = group.pairing(chi, n);
                    let idx = ((e - a) % e) as usize;
                    acc = padd(ops, &acc, &zpow[idx]);
                }
                if acc.len() > 1 {
                    return Err(OracleError::CharacterCount(
                        "orbit idempotent is not defined over E".into(),
                    ));
                }
                row.push(ops.mul(acc.first().copied().unwrap_or(0), n_inv));
            }
            coeffs.push(row);
        }
        Ok(CharacterTable {
            group: group.clone(),
            orbits,
            coeffs,
        })
    }

    /// `sum_chi m_chi chi` for a representation of `N` over `E`.
    fn count(&self, ops: &dyn FieldOps, rep: &NRepresentation) -> Result<GroupRingElem, OracleError> {
        let c = rep.dim;
        let mut terms = Vec::new();
        let mut total = 0usize;
        for (orbit, row) in self.orbits.iter().zip(&self.coeffs) {
            let mut proj = vec![vec![0u32; c]; c];
            for (&a, m) in row.iter().zip(&rep.matrices) {
                if a == 0 {
                    continue;
                }
                for (pr, mr) in proj.iter_mut().zip(m) {
                    for (x, &y) in pr.iter_mut().zip(mr) {
                        if y != 0 {
                            *x = ops.add(*x, ops.mul(a, y));
                        }
                    }
                }
            }
            let rk = rank(ops, proj);
            total += rk;
            if !rk.is_multiple_of(orbit.len()) {
                return Err(OracleError::CharacterCount(format!(
                    "isotypic part of rank {rk} over an orbit of size {}",
                    orbit.len()
                )));
            }
            let m = (rk / orbit.len()) as i64;
            if m > 0 {
                terms.extend(orbit.iter().map(|chi| (chi.clone(), m)));
            }
        }
        if total != c {
            return Err(OracleError::CharacterCount(format!(
                "isotypic parts add up to {total}, module has dimension {c}"
            )));
        }
        Ok(GroupRingElem::from_terms(&self.group, terms))
    }
}

fn padd(f: &dyn FieldOps, a: &[u32], b: &[u32]) -> Vec<u32> {
    let n = a.len().max(b.len());
    let mut out: Vec<u32> = (0..n)
        .map(|i| {
            f.add(
                a.get(i).copied().unwrap_or(0),
                b.get(i).copied().unwrap_or(0),
            )
        })
        .collect();
    ptrim(&mut out);
    out
}

fn first_irreducible_over(f: &dyn FieldOps, q: u64, k: usize) -> Vec<u32> {
    let mut digits = vec![0u64; k];
    digits[0] = 1;
    loop {
        let mut h: Vec<u32> = digits.iter().map(|&d| d as u32).collect();
        h.push(1);
        if irreducible_over(f, q, &h) {
            return h;
        }
        let mut i = k;
        loop {
            i -= 1;
            digits[i] += 1;
            if digits[i] < q {
                break;
            }
            digits[i] = 0;
            assert!(i > 0, "irreducible polynomials exist in every degree");
        }
    }
}

/// A simple module as an `E`-vector space with its `N`-action.
fn module_representation(
    alg: &StructAlgebra,
    ops: &dyn FieldOps,
    ideal: &[Vec<u32>],
) -> Result<NRepresentation, OracleError> {
    let lay = alg.skew.as_ref().expect("skew layout");
    let dd = lay.e_degree();
    let field = alg.field();
    let xs: Vec<Vec<u32>> = (0..dd)
        .map(|s| alg.basis_vector(lay.basis_index(0, 0, s)))
        .collect();
    let mut span = Subspace::with_coordinates(&field, alg.dim);
    let mut ebasis = Vec::new();
    for v in ideal {
        if span.contains(v) {
            continue;
        }
        for x in &xs {
            span.insert(&alg.mul(x, v));
        }
        ebasis.push(v.clone());
    }
    if span.dim() != ideal.len() {
        return Err(OracleError::CharacterCount(
            "left ideal is not an E-subspace".into(),
        ));
    }
    let c = ebasis.len();
    let p = alg.p as u64;
    let mut gens = Vec::new();
    for j in 0..lay.group.rank() {
        let a = lay.group.index_of(&lay.group.generator(j).0);
        let g = alg.basis_vector(lay.basis_index(a, 0, 0));
        let mut m = vec![vec![0u32; c]; c];
        for (col, u) in ebasis.iter().enumerate() {
            let coords = span
                .coordinates(&alg.mul(&g, u))
                .ok_or(OracleError::NotClosed)?;
            for (row, chunk) in coords.chunks(dd).enumerate() {
                // packed code sum c_s p^s of sum c_s x^s
                let code = chunk.iter().rev().fold(0u64, |acc, &x| acc * p + x as u64);
                m[row][col] = code as u32;
            }
        }
        gens.push(m);
    }
    Ok(NRepresentation::from_generators(ops, &lay.group, &gens, c))
}

/// Oracle view of one simple factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleFactor {
    pub d: u32,
    pub center_degree: u32,
    /// Common coefficient of `rho`, or 0 if the coefficients differ.
    pub multiplicity: u32,
    pub rho: GroupRingElem,
    /// `dim_E` of the simple module.
    pub module_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    /// `dim_F E<G>`.
    pub algebra_dim: usize,
    /// `dim_F Z`.
    pub center_dim: usize,
    /// Sorted by the least character in the support of `rho`.
    pub factors: Vec<OracleFactor>,
    /// `tensor[a][b]` decomposes `V_a (x)_E V_b` in oracle labels.
    pub tensor: Option<Vec<Vec<BTreeMap<usize, u64>>>>,
}

fn uniform_coefficient(rho: &GroupRingElem) -> u32 {
    let mut coeffs = rho.terms().map(|(_, c)| c);
    match coeffs.next() {
        Some(c) if c > 0 && coeffs.all(|d| d == c) => c as u32,
        _ => 0,
    }
}

/// Expresses `a` as a non-negative combination of `images`, greedily along least characters.
fn solve_against(
    a: &GroupRingElem,
    images: &[GroupRingElem],
) -> Result<BTreeMap<usize, u64>, OracleError> {
    let mut residual = a.clone();
    let mut out = BTreeMap::new();
    for (i, img) in images.iter().enumerate() {
        let Some(key) = img.support().into_iter().next() else {
            continue;
        };
        let c = residual.coeff(&key);
        let unit = img.coeff(&key);
        if c == 0 {
            continue;
        }
        if c < 0 || c % unit != 0 {
            return Err(OracleError::CharacterCount(format!(
                "coefficient {c} at {key} is not a multiple of {unit}"
            )));
        }
        residual = residual.sub(&img.scale(c / unit))?;
        out.insert(i, (c / unit) as u64);
    }
    if !residual.is_zero() {
        return Err(OracleError::CharacterCount(format!(
            "residual supported on {:?}",
            residual.support()
        )));
    }
    Ok(out)
}

/// The full oracle pipeline for one skew group ring.
pub fn analyze(desc: &SkewRingDesc, cfg: &OracleConfig) -> Result<OracleReport, OracleError> {
    let alg = regular_algebra(desc, cfg)?;
    let z = center(&alg)?;
    let idems = primitive_idempotents(&alg, &z)?;
    let lay = alg.skew.as_ref().expect("skew layout");
    let ops = lay.field.ops(cfg.max_field_size);
    let table = CharacterTable::new(&lay.group, &lay.field, ops.as_ref())?;
    let mut factors = Vec::with_capacity(idems.len());
    let mut reps = Vec::with_capacity(idems.len());
    let (mut total_dim, mut total_center) = (0, 0);
    for (i, e) in idems.iter().enumerate() {
        let shape = factor_structure(&alg, &z, e)?;
        total_dim += shape.dim;
        total_center += shape.center_basis.len();
        let ideal = minimal_left_ideal(
            &alg,
            e,
            &shape,
            cfg.seed.wrapping_add(i as u64),
            cfg.max_ideal_attempts,
        )?;
        let rep = module_representation(&alg, ops.as_ref(), &ideal)?;
        let rho = table.count(ops.as_ref(), &rep)?;
        factors.push(OracleFactor {
            d: shape.d,
            center_degree: shape.center_degree,
            multiplicity: uniform_coefficient(&rho),
            rho,
            module_dim: rep.dim,
        });
        reps.push(rep);
    }
    if total_dim != alg.dim || total_center != z.dim() {
        return Err(OracleError::DimensionMismatch(format!(
            "factor dimensions sum to {total_dim} of {}, centers to {total_center} of {}",
            alg.dim,
            z.dim()
        )));
    }
    let mut order: Vec<usize> = (0..factors.len()).collect();
    order.sort_by(|&a, &b| factors[a].rho.support().cmp(&factors[b].rho.support()));
    let factors: Vec<OracleFactor> = order.iter().map(|&i| factors[i].clone()).collect();
    let reps: Vec<NRepresentation> = order.iter().map(|&i| reps[i].clone()).collect();
    let tensor = if cfg.tensors {
        let images: Vec<GroupRingElem> = factors.iter().map(|w| w.rho.clone()).collect();
        let mut rows = vec![vec![BTreeMap::new(); reps.len()]; reps.len()];
        for a in 0..reps.len() {
            for b in a..reps.len() {
                let t = reps[a].tensor(&reps[b], ops.as_ref());
                let rho = table.count(ops.as_ref(), &t)?;
                let dec = solve_against(&rho, &images)?;
                rows[a][b] = dec.clone();
                rows[b][a] = dec;
            }
        }
        Some(rows)
    } else {
        None
    };
    Ok(OracleReport {
        algebra_dim: alg.dim / lay.f as usize,
        center_dim: z.dim() / lay.f as usize,
        factors,
        tensor,
    })
}

/// Outcome of comparing the oracle with the orbit formulas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agreement {
    pub factor_count: bool,
    pub shapes: bool,
    pub rho: bool,
    /// `None` when tensors were not computed.
    pub tensor: Option<bool>,
    /// Formula-label pairs `(a, b)`, `a <= b`, whose tensor products differ.
    pub tensor_mismatches: Vec<(usize, usize)>,
    pub notes: Vec<String>,
}

impl Agreement {
    pub fn all(&self) -> bool {
        self.factor_count && self.shapes && self.rho && self.tensor != Some(false)
    }
}

/// Matches oracle factors to formula factors by `rho` and compares everything.
pub fn compare(
    dec: &crate::skewring::Decomposition,
    k0: Option<&crate::skewring::K0Ring>,
    report: &OracleReport,
) -> Agreement {
    let group = dec.desc.group();
    let mut notes = Vec::new();
    let factor_count = dec.factors.len() == report.factors.len();
    if !factor_count {
        notes.push(format!(
            "{} formula factors, {} oracle factors",
            dec.factors.len(),
            report.factors.len()
        ));
    }
    let mut a: Vec<(u32, u32, u32)> = dec
        .factors
        .iter()
        .map(|w| (w.matrix_size, w.center_degree, w.multiplicity))
        .collect();
    let mut b: Vec<(u32, u32, u32)> = report
        .factors
        .iter()
        .map(|w| (w.d, w.center_degree, w.multiplicity))
        .collect();
    a.sort();
    b.sort();
    let shapes = a == b;
    if !shapes {
        notes.push(format!("shapes {a:?} vs {b:?}"));
    }
    // oracle label -> formula label
    let mapping: Vec<Option<usize>> = report
        .factors
        .iter()
        .map(|o| {
            dec.factors
                .iter()
                .position(|w| crate::skewring::rho_simple(w, group) == o.rho)
        })
        .collect();
    let mut hit = vec![false; dec.factors.len()];
    let mut rho = factor_count;
    for (i, m) in mapping.iter().enumerate() {
        match m {
            Some(j) if !hit[*j] => hit[*j] = true,
            _ => {
                rho = false;
                notes.push(format!(
                    "oracle rho {:?} matches no unused orbit sum",
                    report.factors[i].rho.support()
                ));
            }
        }
    }
    let mut tensor_mismatches = Vec::new();
    let tensor = match (&report.tensor, k0) {
        (Some(t), Some(k0)) if rho => {
            let mut ok = true;
            for (i, row) in t.iter().enumerate() {
                for (j, ms) in row.iter().enumerate() {
                    let (x, y) = (mapping[i].expect("matched"), mapping[j].expect("matched"));
                    let mapped: BTreeMap<usize, u64> = ms
                        .iter()
                        .map(|(&l, &r)| (mapping[l].expect("matched"), r))
                        .collect();
                    if mapped != k0.structure[x][y] {
                        ok = false;
                        if x <= y {
                            tensor_mismatches.push((x, y));
                            notes.push(format!("tensor ({x},{y}) differs"));
                        }
                    }
                }
            }
            Some(ok)
        }
        (Some(_), Some(_)) => Some(false),
        _ => None,
    };
    Agreement {
        factor_count,
        shapes,
        rho,
        tensor,
        tensor_mismatches,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abgroup::Automorphism;
    use crate::skewring::{decompose, k0_ring};

    fn desc(p: u64, f: u32, n: u32, factors: Vec<u32>, theta: u64) -> SkewRingDesc {
        let g = AbGroup::new(factors).unwrap();
        let t = Automorphism::scalar(&g, theta).unwrap();
        SkewRingDesc::new(p, f, n, g, t).unwrap()
    }

    fn chi(a: u32) -> Character {
        Character(vec![a])
    }

    #[test]
    fn group_algebra_of_z3_over_f2() {
        let d = desc(2, 1, 1, vec![3], 1);
        let alg = regular_algebra(&d, &OracleConfig::default()).unwrap();
        assert_eq!(alg.dim(), 3);
        let z = center(&alg).unwrap();
        assert_eq!(z.dim(), 3);
        let idems = primitive_idempotents(&alg, &z).unwrap();
        let mut got = idems.clone();
        got.sort();
        assert_eq!(got, vec![vec![0, 1, 1], vec![1, 1, 1]]);
        let shapes: Vec<_> = idems
            .iter()
            .map(|e| {
                let s = factor_structure(&alg, &z, e).unwrap();
                (s.d, s.center_degree)
            })
            .collect();
        let mut shapes = shapes;
        shapes.sort();
        assert_eq!(shapes, vec![(1, 1), (1, 2)]);
    }

    #[test]
    fn skew_relation_and_dimension() {
        let d = desc(2, 1, 2, vec![3], 2);
        let alg = regular_algebra(&d, &OracleConfig::default()).unwrap();
        assert_eq!(alg.dim(), 12);
        // phi x = x^2 phi = (x + 1) phi in GF(4)
        let phi = alg.basis_vector(6);
        let x = alg.basis_vector(1);
        let mut expect = vec![0u32; 12];
        expect[6] = 1;
        expect[7] = 1;
        assert_eq!(alg.mul(&phi, &x), expect);
        let z = center(&alg).unwrap();
        assert_eq!(z.dim(), 3);
        let idems = primitive_idempotents(&alg, &z).unwrap();
        assert_eq!(idems.len(), 3);
        for e in &idems {
            let s = factor_structure(&alg, &z, e).unwrap();
            assert_eq!((s.d, s.center_degree, s.dim), (2, 1, 4));
        }
    }

    #[test]
    fn commutative_algebra_is_its_own_center() {
        // GF(2)[t]/(t^2): basis 1, t
        let targets = vec![0; 4];
        let coeffs = vec![1, 0, 0, 1, 0, 1, 0, 0];
        let alg = StructAlgebra::new(2, 2, targets, coeffs, vec![1, 0], vec![]).unwrap();
        assert_eq!(center(&alg).unwrap().dim(), 2);
        alg.check_associativity(8, 0, 0).unwrap();
    }

    #[test]
    fn broken_tables_are_rejected() {
        // "unit" that is not a unit
        let targets = vec![0; 4];
        let coeffs = vec![0, 0, 0, 0, 0, 0, 0, 0];
        assert!(matches!(
            StructAlgebra::new(2, 2, targets, coeffs, vec![1, 0], vec![]),
            Err(OracleError::NoUnit(0))
        ));
    }

    #[test]
    fn trivial_n_is_a_matrix_ring() {
        let d = SkewRingDesc::new(
            2,
            1,
            3,
            AbGroup::trivial(),
            Automorphism::identity(&AbGroup::trivial()),
        )
        .unwrap();
        let r = analyze(&d, &OracleConfig::default()).unwrap();
        assert_eq!(r.factors.len(), 1);
        assert_eq!((r.factors[0].d, r.factors[0].center_degree), (3, 1));
    }

    #[test]
    fn rho_and_tensor_for_f2_z3() {
        let d = desc(2, 1, 1, vec![3], 1);
        let r = analyze(&d, &OracleConfig::default()).unwrap();
        let g = d.group();
        assert_eq!(r.factors[0].rho, GroupRingElem::one(g));
        assert_eq!(
            r.factors[1].rho,
            GroupRingElem::from_terms(g, [(chi(1), 1), (chi(2), 1)])
        );
        let t = r.tensor.unwrap();
        assert_eq!(t[1][1], BTreeMap::from([(0, 2), (1, 1)]));
        assert_eq!(t[1][0], BTreeMap::from([(1, 1)]));
        let dec = decompose(&d);
        let k0 = k0_ring(&d).unwrap();
        assert!(compare(&dec, Some(&k0), &analyze(&d, &OracleConfig::default()).unwrap()).all());
    }

    #[test]
    fn skew_example_agrees() {
        let d = desc(2, 1, 2, vec![3], 2);
        let r = analyze(&d, &OracleConfig::default()).unwrap();
        assert_eq!(r.factors.len(), 3);
        assert!(r.factors.iter().all(|w| w.multiplicity == 1 && w.d == 2));
        let agreement = compare(&decompose(&d), Some(&k0_ring(&d).unwrap()), &r);
        assert!(agreement.all(), "{:?}", agreement.notes);
    }

    #[test]
    fn oracle_bound() {
        let d = desc(3, 2, 4, vec![2, 8], 1);
        let cfg = OracleConfig {
            max_dim: 100,
            ..OracleConfig::default()
        };
        assert!(matches!(
            regular_algebra(&d, &cfg),
            Err(OracleError::BoundExceeded { dim: 256, bound: 100 })
        ));
    }
}
