//! Finite abelian groups given by cyclic factors, their automorphisms and characters, and the
//! integral group ring of the character group.
//!
//! A character is stored as an exponent tuple `c` and evaluates as
//! `chi(n) = sum_j c_j a_j (e / m_j) mod e`, read as an element of `Q/Z` with denominator
//! `e = exponent(N)`. Nothing here depends on a concrete field; realising characters as roots
//! of unity is left to the oracle.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ff::{gcd, lcm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbGroupError {
    #[error("cyclic factor orders must be positive")]
    ZeroFactor,
    #[error("tuple has {got} entries, group has {expected} factors")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("matrix entry ({row}, {col}) does not define a map Z/{from} -> Z/{to}")]
    IncompatibleEntry {
        row: usize,
        col: usize,
        from: u32,
        to: u32,
    },
    #[error("map is not bijective")]
    NotBijective,
    #[error("operands live over different groups")]
    MismatchedGroup,
    #[error("{0} is not a unit modulo the exponent")]
    NotAUnit(u64),
}

/// `Z/m_1 x ... x Z/m_r`. The factor list is kept as given; it is not normalised.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AbGroup {
    factors: Vec<u32>,
}

/// An element `(a_1, ..., a_r)` with `a_j` reduced mod `m_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElem(pub Vec<u32>);

/// A character, as its exponent tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Character(pub Vec<u32>);

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl AbGroup {
    pub fn new(factors: Vec<u32>) -> Result<Self, AbGroupError> {
        if factors.contains(&0) {
            return Err(AbGroupError::ZeroFactor);
        }
        Ok(AbGroup { factors })
    }

    pub fn cyclic(m: u32) -> Self {
        AbGroup::new(vec![m]).expect("positive order")
    }

    pub fn trivial() -> Self {
        AbGroup { factors: vec![] }
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().map(|&m| m as u64).product()
    }

    pub fn exponent(&self) -> u64 {
        self.factors.iter().fold(1, |acc, &m| lcm(acc, m as u64))
    }

    fn check_shape(&self, t: &[u32]) -> Result<(), AbGroupError> {
        if t.len() != self.rank() {
            return Err(AbGroupError::ShapeMismatch {
                expected: self.rank(),
                got: t.len(),
            });
        }
        Ok(())
    }

    fn reduce(&self, t: &[u64]) -> Vec<u32> {
        t.iter()
            .zip(&self.factors)
            .map(|(&a, &m)| (a % m as u64) as u32)
            .collect()
    }

    pub fn element(&self, t: &[u64]) -> Result<GroupElem, AbGroupError> {
        if t.len() != self.rank() {
            return Err(AbGroupError::ShapeMismatch {
                expected: self.rank(),
                got: t.len(),
            });
        }
        Ok(GroupElem(self.reduce(t)))
    }

    pub fn character(&self, t: &[u64]) -> Result<Character, AbGroupError> {
        Ok(Character(self.element(t)?.0))
    }

    pub fn identity(&self) -> GroupElem {
        GroupElem(vec![0; self.rank()])
    }

    pub fn trivial_character(&self) -> Character {
        Character(vec![0; self.rank()])
    }

    /// The `j`-th standard generator.
    pub fn generator(&self, j: usize) -> GroupElem {
        let mut t = vec![0u64; self.rank()];
        t[j] = 1;
        GroupElem(self.reduce(&t))
    }

    /// Position of a tuple in lexicographic order (first coordinate most significant).
    pub fn index_of(&self, t: &[u32]) -> usize {
        t.iter()
            .zip(&self.factors)
            .fold(0usize, |acc, (&a, &m)| acc * m as usize + a as usize)
    }

    pub fn tuple_at(&self, mut idx: usize) -> Vec<u32> {
        let mut t = vec![0u32; self.rank()];
        for j in (0..self.rank()).rev() {
            let m = self.factors[j] as usize;
            t[j] = (idx % m) as u32;
            idx /= m;
        }
        t
    }

    /// All tuples in lexicographic order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        (0..self.order() as usize).map(move |i| self.tuple_at(i))
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElem> + '_ {
        self.tuples().map(GroupElem)
    }

    pub fn characters(&self) -> impl Iterator<Item = Character> + '_ {
        self.tuples().map(Character)
    }

    pub fn add(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        GroupElem(self.add_tuples(&a.0, &b.0))
    }

    pub fn neg(&self, a: &GroupElem) -> GroupElem {
        GroupElem(
            a.0.iter()
                .zip(&self.factors)
                .map(|(&x, &m)| (m - x) % m)
                .collect(),
        )
    }

    pub fn scale(&self, a: &GroupElem, k: u64) -> GroupElem {
        let t: Vec<u64> = a.0.iter().map(|&x| x as u64 * k).collect();
        GroupElem(self.reduce(&t))
    }

    fn add_tuples(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter()
            .zip(b)
            .zip(&self.factors)
            .map(|((&x, &y), &m)| ((x as u64 + y as u64) % m as u64) as u32)
            .collect()
    }

    /// Product of characters (exponent addition).
    pub fn character_mul(&self, a: &Character, b: &Character) -> Character {
        Character(self.add_tuples(&a.0, &b.0))
    }

    /// `chi^k`.
    pub fn character_pow(&self, a: &Character, k: u64) -> Character {
        Character(self.scale(&GroupElem(a.0.clone()), k).0)
    }

    /// `chi(n)` as the numerator of an element of `Q/Z` with denominator `exponent()`.
    pub fn pairing(&self, chi: &Character, n: &GroupElem) -> u64 {
        let e = self.exponent();
        chi.0
            .iter()
            .zip(&n.0)
            .zip(&self.factors)
            .fold(0u64, |acc, ((&c, &a), &m)| {
                (acc + (c as u64 * a as u64 % e) * (e / m as u64)) % e
            })
    }

    pub fn is_valid_character(&self, chi: &Character) -> bool {
        self.check_shape(&chi.0).is_ok() && chi.0.iter().zip(&self.factors).all(|(&c, &m)| c < m)
    }

    /// All groups of order at most `max_order` in invariant-factor form
    /// (`m_1 | m_2 | ... | m_r`, `m_1 >= 2`), trivial group first, then by order.
    pub fn all_up_to_order(max_order: u64) -> Vec<AbGroup> {
        fn extend(prefix: &mut Vec<u32>, prod: u64, max: u64, out: &mut Vec<AbGroup>) {
            // the next factor is a multiple of the previous one
            let last = prefix.last().copied().unwrap_or(1) as u64;
            let mut m = last.max(2);
            while prod * m <= max {
                prefix.push(m as u32);
                out.push(AbGroup {
                    factors: prefix.clone(),
                });
                extend(prefix, prod * m, max, out);
                prefix.pop();
                m += last;
            }
        }
        let mut out = vec![AbGroup::trivial()];
        extend(&mut Vec::new(), 1, max_order, &mut out);
        out.sort_by(|a, b| {
            a.order()
                .cmp(&b.order())
                .then(a.rank().cmp(&b.rank()))
                .then(a.factors.cmp(&b.factors))
        });
        out
    }
}

impl fmt::Display for AbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, m) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(f, "Z/{m}")?;
        }
        Ok(())
    }
}

/// An automorphism of an [`AbGroup`], as an integer matrix acting on column tuples:
/// `theta(a)_j = sum_k matrix[j][k] a_k mod m_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Automorphism {
    group: AbGroup,
    matrix: Vec<Vec<u32>>,
}

impl Automorphism {
    /// Validates that every entry is a well-defined map `Z/m_k -> Z/m_j` and that the induced
    /// map is bijective. Entries are reduced mod `m_j`.
    pub fn new(group: AbGroup, matrix: Vec<Vec<u64>>) -> Result<Self, AbGroupError> {
        let a = Self::homomorphism(group, matrix)?;
        if !a.is_bijective() {
            return Err(AbGroupError::NotBijective);
        }
        Ok(a)
    }

    fn homomorphism(group: AbGroup, matrix: Vec<Vec<u64>>) -> Result<Self, AbGroupError> {
        let r = group.rank();
        if matrix.len() != r {
            return Err(AbGroupError::ShapeMismatch {
                expected: r,
                got: matrix.len(),
            });
        }
        let mut reduced = Vec::with_capacity(r);
        for (j, row) in matrix.iter().enumerate() {
            if row.len() != r {
                return Err(AbGroupError::ShapeMismatch {
                    expected: r,
                    got: row.len(),
                });
            }
            let mj = group.factors[j] as u64;
            let mut out = Vec::with_capacity(r);
            for (k, &x) in row.iter().enumerate() {
                let mk = group.factors[k] as u64;
                let x = x % mj;
                if !(x * mk).is_multiple_of(mj) {
                    return Err(AbGroupError::IncompatibleEntry {
                        row: j,
                        col: k,
                        from: mk as u32,
                        to: mj as u32,
                    });
                }
                out.push(x as u32);
            }
            reduced.push(out);
        }
        Ok(Automorphism {
            group,
            matrix: reduced,
        })
    }

    pub fn identity(group: &AbGroup) -> Self {
        let r = group.rank();
        let matrix = (0..r)
            .map(|j| (0..r).map(|k| u64::from(j == k)).collect())
            .collect();
        Self::homomorphism(group.clone(), matrix).expect("identity is well defined")
    }

    /// `a -> u a`, an automorphism exactly when `u` is a unit mod the exponent.
    pub fn scalar(group: &AbGroup, u: u64) -> Result<Self, AbGroupError> {
        if gcd(u % group.exponent().max(1), group.exponent()) != 1 && group.exponent() != 1 {
            return Err(AbGroupError::NotAUnit(u));
        }
        let r = group.rank();
        let matrix = (0..r)
            .map(|j| (0..r).map(|k| if j == k { u } else { 0 }).collect())
            .collect();
        Self::new(group.clone(), matrix)
    }

    pub fn group(&self) -> &AbGroup {
        &self.group
    }

    pub fn matrix(&self) -> &[Vec<u32>] {
        &self.matrix
    }

    pub fn apply(&self, a: &GroupElem) -> GroupElem {
        GroupElem(self.apply_tuple(&a.0))
    }

    fn apply_tuple(&self, a: &[u32]) -> Vec<u32> {
        self.matrix
            .iter()
            .zip(&self.group.factors)
            .map(|(row, &m)| {
                let m = m as u64;
                row.iter()
                    .zip(a)
                    .fold(0u64, |acc, (&x, &y)| (acc + x as u64 * y as u64) % m) as u32
            })
            .collect()
    }

    fn is_bijective(&self) -> bool {
        // finite group: injective iff the kernel is trivial
        self.group
            .tuples()
            .skip(1)
            .all(|t| self.apply_tuple(&t).iter().any(|&x| x != 0))
    }

    /// `self o other`.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism, AbGroupError> {
        if self.group != other.group {
            return Err(AbGroupError::MismatchedGroup);
        }
        let r = self.group.rank();
        let matrix = (0..r)
            .map(|j| {
                (0..r)
                    .map(|k| {
                        (0..r)
                            .map(|l| self.matrix[j][l] as u64 * other.matrix[l][k] as u64)
                            .sum::<u64>()
                    })
                    .collect()
            })
            .collect();
        Self::homomorphism(self.group.clone(), matrix)
    }

    pub fn pow(&self, k: u64) -> Automorphism {
        let mut acc = Self::identity(&self.group);
        for _ in 0..k {
            acc = acc.compose(self).expect("same group");
        }
        acc
    }

    pub fn inverse(&self) -> Automorphism {
        let r = self.group.rank();
        let mut cols = vec![vec![0u64; r]; r];
        for t in self.group.tuples() {
            let img = self.apply_tuple(&t);
            for k in 0..r {
                let gk = self.group.generator(k).0;
                if img == gk {
                    for (j, &x) in t.iter().enumerate() {
                        cols[j][k] = x as u64;
                    }
                }
            }
        }
        Self::homomorphism(self.group.clone(), cols).expect("inverse of an automorphism")
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.group)
    }

    /// Images of the elements in lexicographic order, as indices.
    pub fn permutation(&self) -> Vec<usize> {
        self.group
            .tuples()
            .map(|t| self.group.index_of(&self.apply_tuple(&t)))
            .collect()
    }

    /// Applies this map to a character tuple (for maps produced by [`dual_automorphism`]).
    pub fn apply_character(&self, chi: &Character) -> Character {
        Character(self.apply_tuple(&chi.0))
    }

    /// Every automorphism of `group`, in lexicographic order of matrices.
    pub fn enumerate_all(group: &AbGroup) -> Vec<Automorphism> {
        let r = group.rank();
        // entry (j, k) ranges over multiples of m_j / gcd(m_j, m_k) below m_j
        let mut choices: Vec<Vec<u64>> = Vec::with_capacity(r * r);
        for j in 0..r {
            for k in 0..r {
                let mj = group.factors[j] as u64;
                let mk = group.factors[k] as u64;
                let step = mj / gcd(mj, mk);
                choices.push((0..mj).step_by(step as usize).collect());
            }
        }
        let mut out = Vec::new();
        let mut idx = vec![0usize; r * r];
        loop {
            let matrix = (0..r)
                .map(|j| (0..r).map(|k| choices[j * r + k][idx[j * r + k]]).collect())
                .collect();
            let a = Self::homomorphism(group.clone(), matrix).expect("entries chosen compatible");
            if a.is_bijective() {
                out.push(a);
            }
            let mut pos = r * r;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < choices[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
}

/// `theta^dual` on characters: `(theta^dual chi)(n) = chi(theta n)`.
pub fn dual_automorphism(theta: &Automorphism) -> Automorphism {
    let g = &theta.group;
    let r = g.rank();
    // D[k][j] = T[j][k] * m_k / m_j  (exact by compatibility of T)
    let matrix = (0..r)
        .map(|k| {
            (0..r)
                .map(|j| {
                    let mj = g.factors[j] as u64;
                    let mk = g.factors[k] as u64;
                    theta.matrix[j][k] as u64 * mk / mj
                })
                .collect()
        })
        .collect();
    Automorphism::new(g.clone(), matrix).expect("dual of an automorphism is an automorphism")
}

/// A finitely supported integer combination of characters of a fixed group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRingElem {
    group: AbGroup,
    coeffs: BTreeMap<Character, i64>,
}

impl GroupRingElem {
    pub fn zero(group: &AbGroup) -> Self {
        GroupRingElem {
            group: group.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn basis(group: &AbGroup, chi: Character) -> Self {
        Self::from_terms(group, [(chi, 1)])
    }

    pub fn one(group: &AbGroup) -> Self {
        Self::basis(group, group.trivial_character())
    }

    pub fn from_terms(group: &AbGroup, terms: impl IntoIterator<Item = (Character, i64)>) -> Self {
        let mut out = Self::zero(group);
        for (chi, c) in terms {
            debug_assert!(group.is_valid_character(&chi));
            out.add_term(chi, c);
        }
        out
    }

    fn add_term(&mut self, chi: Character, c: i64) {
        if c == 0 {
            return;
        }
        let entry = self.coeffs.entry(chi);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn group(&self) -> &AbGroup {
        &self.group
    }

    pub fn coeff(&self, chi: &Character) -> i64 {
        self.coeffs.get(chi).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Character, i64)> {
        self.coeffs.iter().map(|(k, &v)| (k, v))
    }

    pub fn support(&self) -> Vec<Character> {
        self.coeffs.keys().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Sum of coefficients.
    pub fn mass(&self) -> i64 {
        self.coeffs.values().sum()
    }

    pub fn add(&self, other: &Self) -> Result<Self, AbGroupError> {
        if self.group != other.group {
            return Err(AbGroupError::MismatchedGroup);
        }
        let mut out = self.clone();
        for (chi, &c) in &other.coeffs {
            out.add_term(chi.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::from_terms(
            &self.group,
            self.coeffs.iter().map(|(chi, &c)| (chi.clone(), c * k)),
        )
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AbGroupError> {
        self.add(&other.scale(-1))
    }

    /// Convolution product.
    pub fn mul(&self, other: &Self) -> Result<Self, AbGroupError> {
        if self.group != other.group {
            return Err(AbGroupError::MismatchedGroup);
        }
        let mut out = Self::zero(&self.group);
        for (a, &x) in &self.coeffs {
            for (b, &y) in &other.coeffs {
                out.add_term(self.group.character_mul(a, b), x * y);
            }
        }
        Ok(out)
    }

    /// Applies a map on characters coefficientwise.
    pub fn map_characters(&self, f: impl Fn(&Character) -> Character) -> Self {
        Self::from_terms(&self.group, self.coeffs.iter().map(|(chi, &c)| (f(chi), c)))
    }
}

/// Augmentation modulo `l`: the coefficient sum reduced into `0..l`.
pub fn augment(a: &GroupRingElem, l: u64) -> u64 {
    a.mass().rem_euclid(l as i64) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z3() -> AbGroup {
        AbGroup::cyclic(3)
    }

    fn chi(t: &[u32]) -> Character {
        Character(t.to_vec())
    }

    #[test]
    fn dual_of_identity_is_identity() {
        let g = AbGroup::new(vec![2, 4]).unwrap();
        assert!(dual_automorphism(&Automorphism::identity(&g)).is_identity());
    }

    #[test]
    fn dual_of_doubling_on_z3() {
        let g = z3();
        let theta = Automorphism::scalar(&g, 2).unwrap();
        let dual = dual_automorphism(&theta);
        // Oracle: the pairing table, (dual chi)(n) = chi(theta n) for all 9 pairs.
        for c in g.characters() {
            let img = dual.apply_character(&c);
            for n in g.elements() {
                assert_eq!(g.pairing(&img, &n), g.pairing(&c, &theta.apply(&n)));
            }
            assert_eq!(img, g.character_pow(&c, 2));
        }
    }

    #[test]
    fn dual_of_swap_swaps() {
        let g = AbGroup::new(vec![2, 2]).unwrap();
        let swap = Automorphism::new(g.clone(), vec![vec![0, 1], vec![1, 0]]).unwrap();
        let dual = dual_automorphism(&swap);
        assert_eq!(dual.apply_character(&chi(&[1, 0])), chi(&[0, 1]));
        assert_eq!(dual.apply_character(&chi(&[1, 1])), chi(&[1, 1]));
    }

    #[test]
    fn dual_respects_mixed_factor_orders() {
        let g = AbGroup::new(vec![2, 4]).unwrap();
        for theta in Automorphism::enumerate_all(&g) {
            let dual = dual_automorphism(&theta);
            for c in g.characters() {
                let img = dual.apply_character(&c);
                for n in g.elements() {
                    assert_eq!(g.pairing(&img, &n), g.pairing(&c, &theta.apply(&n)));
                }
            }
        }
    }

    #[test]
    fn automorphism_validation() {
        let g = AbGroup::new(vec![2, 4]).unwrap();
        // Z/2 -> Z/4 must land in 2Z/4
        assert!(matches!(
            Automorphism::new(g.clone(), vec![vec![1, 0], vec![1, 1]]),
            Err(AbGroupError::IncompatibleEntry { row: 1, col: 0, .. })
        ));
        assert_eq!(
            Automorphism::new(g.clone(), vec![vec![0, 0], vec![0, 1]]).unwrap_err(),
            AbGroupError::NotBijective
        );
        assert_eq!(
            Automorphism::scalar(&z3(), 3).unwrap_err(),
            AbGroupError::NotAUnit(3)
        );
        // |Aut(Z/2 x Z/4)| = 8
        assert_eq!(Automorphism::enumerate_all(&g).len(), 8);
        // |GL_2(F_2)| = 6, |GL_3(F_2)| = 168
        assert_eq!(Automorphism::enumerate_all(&AbGroup::new(vec![2, 2]).unwrap()).len(), 6);
        assert_eq!(
            Automorphism::enumerate_all(&AbGroup::new(vec![2, 2, 2]).unwrap()).len(),
            168
        );
    }

    #[test]
    fn inverse_and_pow() {
        let g = AbGroup::new(vec![3, 3]).unwrap();
        for theta in Automorphism::enumerate_all(&g).iter().step_by(5) {
            assert!(theta.compose(&theta.inverse()).unwrap().is_identity());
            assert!(theta.pow(24).is_identity() || !theta.pow(48).is_identity());
        }
    }

    #[test]
    fn ring_examples() {
        let g = z3();
        let c0 = GroupRingElem::one(&g);
        let c1 = GroupRingElem::basis(&g, chi(&[1]));
        let c2 = GroupRingElem::basis(&g, chi(&[2]));
        let a = c1.add(&c2).unwrap();
        assert_eq!(a.add(&GroupRingElem::zero(&g)).unwrap(), a);
        let b = c2.sub(&c1).unwrap();
        assert_eq!(a.add(&b).unwrap(), c2.scale(2));
        assert_eq!(a.mul(&c0).unwrap(), a);
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq, c0.scale(2).add(&a).unwrap());
        assert_eq!(augment(&a, 3), 2);
        assert_eq!(augment(&sq, 3), 1);
        assert_eq!(augment(&GroupRingElem::zero(&g), 3), 0);
        let other = GroupRingElem::one(&AbGroup::cyclic(5));
        assert_eq!(a.mul(&other).unwrap_err(), AbGroupError::MismatchedGroup);
    }

    #[test]
    fn zero_coefficients_are_pruned() {
        let g = z3();
        let c1 = GroupRingElem::basis(&g, chi(&[1]));
        let z = c1.sub(&c1).unwrap();
        assert!(z.is_zero());
        assert_eq!(z, GroupRingElem::zero(&g));
    }

    #[test]
    fn groups_up_to_order() {
        let gs = AbGroup::all_up_to_order(16);
        let names: Vec<_> = gs.iter().map(|g| g.factors().to_vec()).collect();
        assert_eq!(names[0], Vec::<u32>::new());
        assert!(names.contains(&vec![2, 2, 2, 2]));
        assert!(names.contains(&vec![2, 6]));
        assert!(names.contains(&vec![4, 4]));
        assert!(!names.contains(&vec![2, 3]));
        // abelian groups of order 1..=16: 1,1,1,2,1,1,1,3,2,1,1,2,1,1,1,5
        assert_eq!(gs.len(), 25);
    }

    #[test]
    fn pairing_is_nondegenerate() {
        for g in AbGroup::all_up_to_order(16) {
            for c in g.characters().skip(1) {
                assert!(g.elements().any(|n| g.pairing(&c, &n) != 0), "{g} {c}");
            }
        }
    }
}
