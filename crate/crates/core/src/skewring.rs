//! Formula-level structure of `E<G>` for `G = N x| Delta` over finite fields.
//!
//! `F = GF(p^f)`, `E = GF(p^(f n))`, `Delta` is cyclic of order `n` with generator `phi` acting on
//! `E` as the `p^f`-power Frobenius, and `phi n phi^-1 = theta(n)` on the abelian group `N`.
//! Simple modules correspond to orbits of the twisted Galois action on characters
//!
//! ```text
//! (Frob_F * chi)(n) = chi(theta^-1 n)^(p^f)
//! ```
//!
//! and, because finite fields have trivial Brauer group, every factor is `M([E:F], Z_i)` with
//! `[Z_i : F]` the orbit length and multiplicity one.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abgroup::{
    dual_automorphism, AbGroup, AbGroupError, Automorphism, Character, GroupRingElem,
};
use crate::ff::{is_prime, l_valuation, mult_order, prime_to_part, FieldError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkewError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("{0} must be positive")]
    ZeroParameter(&'static str),
    /// `p` divides `|N|`, so `E<G>` is not semisimple.
    #[error("p = {p} divides |N| = {order}")]
    MaschkeViolated { p: u64, order: u64 },
    #[error("theta^{n} is not the identity")]
    IncompatibleAction { n: u32 },
    #[error("character or automorphism lives over a different group")]
    MismatchedGroup,
    #[error("unknown simple-module label {0}")]
    UnknownLabel(usize),
    #[error("product is not a non-negative combination of orbit sums: {0}")]
    DecompositionFailure(String),
    #[error("tower level i = {i} requires i > i' = {i_prime}")]
    TowerHypothesisViolated { i: u32, i_prime: u32 },
    #[error("level {l}^{i} is beyond the supported tower range")]
    LevelTooLarge { l: u64, i: u32 },
    #[error("l must differ from p (both {0})")]
    EqualPrimes(u64),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Group(#[from] AbGroupError),
}

/// `(p, f, n, N, theta)` describing `E<N x| Z/n>` with `F = GF(p^f)` and `E = GF(p^(f n))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkewRingDesc {
    p: u64,
    f: u32,
    n: u32,
    group: AbGroup,
    theta: Automorphism,
}

impl SkewRingDesc {
    pub fn new(
        p: u64,
        f: u32,
        n: u32,
        group: AbGroup,
        theta: Automorphism,
    ) -> Result<Self, SkewError> {
        if !is_prime(p) {
            return Err(SkewError::NonPrime(p));
        }
        if f == 0 {
            return Err(SkewError::ZeroParameter("f"));
        }
        if n == 0 {
            return Err(SkewError::ZeroParameter("n"));
        }
        if *theta.group() != group {
            return Err(SkewError::MismatchedGroup);
        }
        // Delta acts faithfully on E, so E<Delta> = End_F(E) and only |N| has to be a unit.
        let order = group.order();
        if order.is_multiple_of(p) {
            return Err(SkewError::MaschkeViolated { p, order });
        }
        if !theta.pow(n as u64).is_identity() {
            return Err(SkewError::IncompatibleAction { n });
        }
        Ok(SkewRingDesc {
            p,
            f,
            n,
            group,
            theta,
        })
    }

    /// Ordinary group ring `GF(p^f)[N]`.
    pub fn group_ring(p: u64, f: u32, group: AbGroup) -> Result<Self, SkewError> {
        let theta = Automorphism::identity(&group);
        Self::new(p, f, 1, group, theta)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `[F : GF(p)]`.
    pub fn f(&self) -> u32 {
        self.f
    }

    /// `|Delta| = [E : F]`.
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn group(&self) -> &AbGroup {
        &self.group
    }

    pub fn theta(&self) -> &Automorphism {
        &self.theta
    }

    /// `|F|`.
    pub fn base_field_size(&self) -> u64 {
        self.p.pow(self.f)
    }

    /// `[E : GF(p)]`.
    pub fn e_degree(&self) -> u32 {
        self.f * self.n
    }

    pub fn group_order(&self) -> u64 {
        self.group.order() * self.n as u64
    }

    /// Whether `p` is prime to all of `|G|`, the classical Maschke hypothesis.
    pub fn classical_maschke(&self) -> bool {
        !self.group_order().is_multiple_of(self.p)
    }

    /// `dim_F E<G> = [E:F] |G|`.
    pub fn dim_over_f(&self) -> u64 {
        self.n as u64 * self.group_order()
    }
}

impl fmt::Display for SkewRingDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p={} f={} n={} N={} theta={:?}",
            self.p,
            self.f,
            self.n,
            self.group,
            self.theta.matrix()
        )
    }
}

/// `chi -> frob * (theta^-1)^dual chi`, the exponent form of the twisted Galois action.
#[derive(Debug, Clone)]
pub struct CharacterAction {
    group: AbGroup,
    dual_inverse: Automorphism,
    frob: u64,
}

impl CharacterAction {
    pub fn new(theta: &Automorphism, frob: u64) -> Self {
        CharacterAction {
            group: theta.group().clone(),
            dual_inverse: dual_automorphism(&theta.inverse()),
            frob,
        }
    }

    pub fn for_desc(desc: &SkewRingDesc) -> Self {
        Self::new(&desc.theta, desc.base_field_size())
    }

    pub fn group(&self) -> &AbGroup {
        &self.group
    }

    pub fn apply(&self, chi: &Character) -> Character {
        let twisted = self.dual_inverse.apply_character(chi);
        self.group.character_pow(&twisted, self.frob)
    }

    /// Coefficientwise action on `Z[N^dual]`.
    pub fn apply_ring(&self, a: &GroupRingElem) -> GroupRingElem {
        a.map_characters(|c| self.apply(c))
    }

    /// Orbits in order of their lexicographically least member.
    pub fn orbits(&self) -> Vec<Orbit> {
        let order = self.group.order() as usize;
        let mut seen = vec![false; order];
        let mut out = Vec::new();
        for start in self.group.characters() {
            let idx = self.group.index_of(&start.0);
            if seen[idx] {
                continue;
            }
            let mut members = Vec::new();
            let mut cur = start.clone();
            loop {
                let k = self.group.index_of(&cur.0);
                if seen[k] {
                    break;
                }
                seen[k] = true;
                members.push(cur.clone());
                cur = self.apply(&cur);
            }
            members.sort();
            out.push(Orbit {
                representative: members[0].clone(),
                characters: members,
            });
        }
        out
    }
}

/// `Frob_F * chi` for the Galois action attached to `desc`.
pub fn gf_action(chi: &Character, desc: &SkewRingDesc) -> Result<Character, SkewError> {
    if !desc.group.is_valid_character(chi) {
        return Err(SkewError::MismatchedGroup);
    }
    Ok(CharacterAction::for_desc(desc).apply(chi))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    pub characters: Vec<Character>,
    pub representative: Character,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }

    pub fn contains(&self, chi: &Character) -> bool {
        self.characters.binary_search(chi).is_ok()
    }
}

pub fn orbits(desc: &SkewRingDesc) -> Vec<Orbit> {
    CharacterAction::for_desc(desc).orbits()
}

/// One factor `M(d, Z)` of the Wedderburn decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WedderburnFactor {
    pub label: usize,
    pub orbit: Orbit,
    pub matrix_size: u32,
    pub center_degree: u32,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub desc: SkewRingDesc,
    pub factors: Vec<WedderburnFactor>,
}

impl Decomposition {
    /// `sum d_i^2 [Z_i : F] == [E:F] |G|`.
    pub fn dimension_check(&self) -> bool {
        let total: u64 = self
            .factors
            .iter()
            .map(|w| (w.matrix_size as u64).pow(2) * w.center_degree as u64)
            .sum();
        total == self.desc.dim_over_f()
    }

    /// Orbits partition the character group.
    pub fn orbit_count_check(&self) -> bool {
        let total: usize = self.factors.iter().map(|w| w.orbit.len()).sum();
        total as u64 == self.desc.group.order()
    }

    pub fn factor(&self, label: usize) -> Result<&WedderburnFactor, SkewError> {
        self.factors.get(label).ok_or(SkewError::UnknownLabel(label))
    }

    /// Label of the simple module containing `chi` in its character support.
    pub fn label_of(&self, chi: &Character) -> Option<usize> {
        self.factors
            .iter()
            .position(|w| w.orbit.contains(chi))
    }
}

/// Wedderburn decomposition of `E<G>` when `Br(F) = 1`.
pub fn decompose(desc: &SkewRingDesc) -> Decomposition {
    let factors = orbits(desc)
        .into_iter()
        .enumerate()
        .map(|(label, orbit)| WedderburnFactor {
            label,
            center_degree: orbit.len() as u32,
            orbit,
            matrix_size: desc.n,
            multiplicity: 1,
        })
        .collect();
    Decomposition {
        desc: desc.clone(),
        factors,
    }
}

/// `rho(V) = m * sum_{chi in orbit} chi`.
pub fn rho_simple(factor: &WedderburnFactor, group: &AbGroup) -> GroupRingElem {
    GroupRingElem::from_terms(
        group,
        factor
            .orbit
            .characters
            .iter()
            .map(|c| (c.clone(), factor.multiplicity as i64)),
    )
}

/// A module up to isomorphism: simple-module label -> multiplicity.
pub type Multiset = BTreeMap<usize, u64>;

pub fn singleton(label: usize) -> Multiset {
    Multiset::from([(label, 1)])
}

/// `rho` of a direct sum of simple modules.
pub fn rho(module: &Multiset, dec: &Decomposition) -> Result<GroupRingElem, SkewError> {
    let group = &dec.desc.group;
    let mut acc = GroupRingElem::zero(group);
    for (&label, &mult) in module {
        let w = dec.factor(label)?;
        acc = acc.add(&rho_simple(w, group).scale(mult as i64))?;
    }
    Ok(acc)
}

/// Expresses an element of `Z[N^dual]` as a non-negative combination of the `rho(V_i)`.
fn express_in_orbit_sums(
    a: &GroupRingElem,
    group: &AbGroup,
    factors: &[WedderburnFactor],
) -> Result<Multiset, SkewError> {
    let mut residual = a.clone();
    let mut out = Multiset::new();
    for w in factors {
        let c = residual.coeff(&w.orbit.representative);
        if c == 0 {
            continue;
        }
        let m = w.multiplicity as i64;
        if c < 0 || c % m != 0 {
            return Err(SkewError::DecompositionFailure(format!(
                "coefficient {c} at {} is not a non-negative multiple of {m}",
                w.orbit.representative
            )));
        }
        let r = c / m;
        residual = residual.sub(&rho_simple(w, group).scale(r))?;
        out.insert(w.label, r as u64);
    }
    if !residual.is_zero() {
        return Err(SkewError::DecompositionFailure(format!(
            "residual with support {:?}",
            residual.support()
        )));
    }
    Ok(out)
}

/// `{V_i : r_i}` with `a (x)_E b = sum r_i V_i`, computed as `rho(a) rho(b) = sum r_i rho(V_i)`.
pub fn tensor_decompose(
    a: &Multiset,
    b: &Multiset,
    dec: &Decomposition,
) -> Result<Multiset, SkewError> {
    let prod = rho(a, dec)?.mul(&rho(b, dec)?)?;
    express_in_orbit_sums(&prod, &dec.desc.group, &dec.factors)
}

/// `K_0` as a based ring: one basis element per simple module.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct K0Ring {
    pub group: AbGroup,
    pub factors: Vec<WedderburnFactor>,
    pub rho_images: Vec<GroupRingElem>,
    /// `structure[a][b]` is the decomposition of `V_a (x) V_b`.
    pub structure: Vec<Vec<Multiset>>,
}

impl K0Ring {
    fn from_factors(group: &AbGroup, factors: Vec<WedderburnFactor>) -> Result<Self, SkewError> {
        let rho_images: Vec<GroupRingElem> =
            factors.iter().map(|w| rho_simple(w, group)).collect();
        let mut structure = Vec::with_capacity(factors.len());
        for a in &rho_images {
            let mut row = Vec::with_capacity(factors.len());
            for b in &rho_images {
                row.push(express_in_orbit_sums(&a.mul(b)?, group, &factors)?);
            }
            structure.push(row);
        }
        Ok(K0Ring {
            group: group.clone(),
            factors,
            rho_images,
            structure,
        })
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Label of the unit (the trivial-character module).
    pub fn unit_label(&self) -> usize {
        let triv = self.group.trivial_character();
        self.factors
            .iter()
            .position(|w| w.orbit.contains(&triv))
            .expect("trivial character lies in some orbit")
    }

    /// Product of two elements given as multisets.
    pub fn mul(&self, a: &Multiset, b: &Multiset) -> Result<Multiset, SkewError> {
        let mut out = Multiset::new();
        for (&x, &mx) in a {
            for (&y, &my) in b {
                let row = self
                    .structure
                    .get(x)
                    .and_then(|r| r.get(y))
                    .ok_or(SkewError::UnknownLabel(x.max(y)))?;
                for (&z, &r) in row {
                    *out.entry(z).or_insert(0) += r * mx * my;
                }
            }
        }
        Ok(out)
    }

    /// `alpha_l` on a basis element: `E`-dimension of `rho` mod `l`.
    pub fn augmentation(&self, label: usize, l: u64) -> u64 {
        crate::abgroup::augment(&self.rho_images[label], l)
    }

    /// True when every orbit is a singleton and the basis multiplies like `N^dual`, i.e. the
    /// ring is `Z[N^dual]` via `rho`.
    pub fn is_group_ring_of_characters(&self) -> bool {
        if self.factors.iter().any(|w| w.orbit.len() != 1) {
            return false;
        }
        self.factors.iter().enumerate().all(|(a, wa)| {
            self.factors.iter().enumerate().all(|(b, wb)| {
                let prod = self
                    .group
                    .character_mul(&wa.orbit.representative, &wb.orbit.representative);
                let expect = self
                    .factors
                    .iter()
                    .position(|w| w.orbit.representative == prod)
                    .map(singleton);
                expect.as_ref() == Some(&self.structure[a][b])
            })
        })
    }
}

pub fn k0_ring(desc: &SkewRingDesc) -> Result<K0Ring, SkewError> {
    let dec = decompose(desc);
    K0Ring::from_factors(&desc.group, dec.factors)
}

/// Level `i` of the tower `Z/l^i x| Z/l^i'`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TowerLevel {
    pub p: u64,
    pub l: u64,
    pub i: u32,
    /// `v_l(ord_{l^i}(p))`.
    pub i_prime: u32,
    /// `ord_{l^i}(p)`.
    pub galois_degree: u64,
    /// `phi eta phi^-1 = eta^twist`.
    pub twist: u64,
    pub delta_order: u64,
    pub group: AbGroup,
    pub orbits: Vec<Orbit>,
    pub k0: K0Ring,
}

impl TowerLevel {
    pub fn all_singletons(&self) -> bool {
        self.orbits.iter().all(|o| o.len() == 1)
    }
}

fn check_primes(p: u64, l: u64) -> Result<(), SkewError> {
    if !is_prime(p) {
        return Err(SkewError::NonPrime(p));
    }
    if !is_prime(l) {
        return Err(SkewError::NonPrime(l));
    }
    if p == l {
        return Err(SkewError::EqualPrimes(p));
    }
    Ok(())
}

/// `i' = v_l(ord_{l^i}(p))`.
pub fn tower_i_prime(p: u64, l: u64, i: u32) -> Result<u32, SkewError> {
    check_primes(p, l)?;
    let modulus = l.checked_pow(i).ok_or(SkewError::LevelTooLarge { l, i })?;
    let ord = mult_order(p, modulus)?;
    Ok(l_valuation(ord, l))
}

/// Largest `l^i` a tower level is built for; characters are enumerated one by one.
pub const MAX_TOWER_ORDER: u64 = 1 << 20;

/// Tower level with the Frobenius twist `phi eta phi^-1 = eta^p`.
pub fn tower_level(p: u64, l: u64, i: u32) -> Result<TowerLevel, SkewError> {
    tower_level_with_twist(p, l, i, p)
}

/// Tower level with conjugation twist `eta -> eta^twist`; the Galois action still raises
/// character values to the `p`-th power, so only `twist = p` cancels exactly.
pub fn tower_level_with_twist(p: u64, l: u64, i: u32, twist: u64) -> Result<TowerLevel, SkewError> {
    check_primes(p, l)?;
    if i == 0 {
        return Err(SkewError::ZeroParameter("i"));
    }
    let modulus = l
        .checked_pow(i)
        .filter(|&m| m <= MAX_TOWER_ORDER)
        .ok_or(SkewError::LevelTooLarge { l, i })?;
    let galois_degree = mult_order(p, modulus)?;
    let i_prime = l_valuation(galois_degree, l);
    if i <= i_prime {
        return Err(SkewError::TowerHypothesisViolated { i, i_prime });
    }
    let group = AbGroup::cyclic(modulus as u32);
    let theta = Automorphism::scalar(&group, twist)?;
    let action = CharacterAction::new(&theta, p);
    let orbits = action.orbits();
    let factors = orbits
        .iter()
        .cloned()
        .enumerate()
        .map(|(label, orbit)| WedderburnFactor {
            label,
            center_degree: orbit.len() as u32,
            orbit,
            matrix_size: l.pow(i_prime) as u32,
            multiplicity: 1,
        })
        .collect();
    let k0 = K0Ring::from_factors(&group, factors)?;
    Ok(TowerLevel {
        p,
        l,
        i,
        i_prime,
        galois_degree,
        twist,
        delta_order: l.pow(i_prime),
        group,
        orbits,
        k0,
    })
}

/// A finite skew ring standing in for level `i`: `F = GF(p^m)` with `m` the prime-to-`l` part
/// of `ord_{l^i}(p)`, `[E:F] = l^i'`, `N = Z/l^i`, `theta = multiplication by p^m`.
pub fn tower_finite_approximation(p: u64, l: u64, i: u32) -> Result<SkewRingDesc, SkewError> {
    check_primes(p, l)?;
    let modulus = l
        .checked_pow(i)
        .filter(|&m| m <= MAX_TOWER_ORDER)
        .ok_or(SkewError::LevelTooLarge { l, i })?;
    let ord = mult_order(p, modulus)?;
    let m = prime_to_part(ord, l);
    let i_prime = l_valuation(ord, l);
    let group = AbGroup::cyclic(modulus as u32);
    let twist = crate::ff::pow_mod(p, m, modulus);
    let theta = Automorphism::scalar(&group, twist)?;
    SkewRingDesc::new(p, m as u32, l.pow(i_prime) as u32, group, theta)
}

/// An element `num / den` of `Q_l / Z_l`, in lowest terms (`0/1` for zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QmodZ {
    pub num: u64,
    pub den: u64,
}

impl QmodZ {
    pub fn new(num: u64, den: u64) -> Self {
        let num = num % den;
        let g = crate::ff::gcd(num, den);
        if num == 0 {
            QmodZ { num: 0, den: 1 }
        } else {
            QmodZ {
                num: num / g,
                den: den / g,
            }
        }
    }

    pub fn add(self, other: QmodZ) -> QmodZ {
        let den = crate::ff::lcm(self.den, other.den);
        QmodZ::new(self.num * (den / self.den) + other.num * (den / other.den), den)
    }
}

impl fmt::Display for QmodZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Basis map of the transition `K_0(level i) -> K_0(level j)` for `i <= j`, dual to reduction
/// `Z/l^j -> Z/l^i`: the character with exponent `a` goes to exponent `l^(j-i) a`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub from: u32,
    pub to: u32,
    /// Indexed by source label, value is the target label.
    pub map: Vec<usize>,
}

impl Transition {
    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.map.iter().all(|x| seen.insert(*x))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColimitK0 {
    pub p: u64,
    pub l: u64,
    pub levels: Vec<TowerLevel>,
    /// `transitions[k]` goes from level `k + 1` to level `k + 2`.
    pub transitions: Vec<Transition>,
    /// Basis of the truncated colimit, `a / l^i_max` in lowest terms, sorted.
    pub basis: Vec<QmodZ>,
}

fn level_transition(src: &TowerLevel, dst: &TowerLevel) -> Transition {
    let shift = src.l.pow(dst.i - src.i);
    let map = src
        .k0
        .factors
        .iter()
        .map(|w| {
            let a = w.orbit.representative.0[0] as u64;
            let image = dst.group.character(&[a * shift]).expect("cyclic");
            dst.k0
                .factors
                .iter()
                .position(|v| v.orbit.contains(&image))
                .expect("image character lies in an orbit")
        })
        .collect();
    Transition {
        from: src.i,
        to: dst.i,
        map,
    }
}

impl ColimitK0 {
    /// Transition from level `i` to level `j` computed directly.
    pub fn transition(&self, i: u32, j: u32) -> Option<Transition> {
        if i == 0 || i > j || j as usize > self.levels.len() {
            return None;
        }
        Some(level_transition(
            &self.levels[i as usize - 1],
            &self.levels[j as usize - 1],
        ))
    }

    /// Whether a transition commutes with the ring structures of its endpoints.
    pub fn is_ring_map(&self, t: &Transition) -> bool {
        let src = &self.levels[t.from as usize - 1].k0;
        let dst = &self.levels[t.to as usize - 1].k0;
        if t.map[src.unit_label()] != dst.unit_label() {
            return false;
        }
        (0..src.rank()).all(|a| {
            (0..src.rank()).all(|b| {
                let mapped: Multiset = src.structure[a][b]
                    .iter()
                    .map(|(&z, &r)| (t.map[z], r))
                    .collect();
                dst.structure[t.map[a]][t.map[b]] == mapped
            })
        })
    }

    /// Basis element of `Q_l/Z_l` represented by `label` at level `i`.
    pub fn basis_element(&self, i: u32, label: usize) -> QmodZ {
        let lvl = &self.levels[i as usize - 1];
        let a = lvl.k0.factors[label].orbit.representative.0[0] as u64;
        QmodZ::new(a, lvl.group.exponent())
    }
}

/// Levels `1..=i_max` with their transition maps and the truncated colimit basis.
pub fn colimit_k0(p: u64, l: u64, i_max: u32) -> Result<ColimitK0, SkewError> {
    if i_max == 0 {
        return Err(SkewError::ZeroParameter("i_max"));
    }
    let levels = (1..=i_max)
        .map(|i| tower_level(p, l, i))
        .collect::<Result<Vec<_>, _>>()?;
    let transitions = levels
        .windows(2)
        .map(|w| level_transition(&w[0], &w[1]))
        .collect();
    let top = l.pow(i_max);
    let mut basis: Vec<QmodZ> = (0..top).map(|a| QmodZ::new(a, top)).collect();
    basis.sort();
    Ok(ColimitK0 {
        p,
        l,
        levels,
        transitions,
        basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z3_desc(p: u64, f: u32, n: u32, u: u64) -> SkewRingDesc {
        let g = AbGroup::cyclic(3);
        let theta = Automorphism::scalar(&g, u).unwrap();
        SkewRingDesc::new(p, f, n, g, theta).unwrap()
    }

    fn chi(a: u32) -> Character {
        Character(vec![a])
    }

    #[test]
    fn gf_action_examples() {
        let d = z3_desc(2, 1, 2, 2);
        assert_eq!(gf_action(&chi(0), &d).unwrap(), chi(0));
        assert_eq!(gf_action(&chi(1), &d).unwrap(), chi(1));
        let d = z3_desc(2, 1, 1, 1);
        assert_eq!(gf_action(&chi(1), &d).unwrap(), chi(2));
        assert_eq!(
            gf_action(&Character(vec![1, 0]), &d).unwrap_err(),
            SkewError::MismatchedGroup
        );
    }

    #[test]
    fn orbit_examples() {
        let triv = SkewRingDesc::group_ring(5, 1, AbGroup::trivial()).unwrap();
        assert_eq!(orbits(&triv).len(), 1);
        let d = z3_desc(2, 1, 1, 1);
        let os = orbits(&d);
        assert_eq!(os.len(), 2);
        assert_eq!(os[0].characters, vec![chi(0)]);
        assert_eq!(os[1].characters, vec![chi(1), chi(2)]);
        let d = z3_desc(2, 1, 2, 2);
        assert!(orbits(&d).iter().all(|o| o.len() == 1));
        assert_eq!(orbits(&d).len(), 3);
    }

    #[test]
    fn desc_validation() {
        let g = AbGroup::cyclic(3);
        let id = Automorphism::identity(&g);
        assert_eq!(
            SkewRingDesc::new(3, 1, 1, g.clone(), id.clone()).unwrap_err(),
            SkewError::MaschkeViolated { p: 3, order: 3 }
        );
        let dbl = Automorphism::scalar(&g, 2).unwrap();
        assert_eq!(
            SkewRingDesc::new(2, 1, 3, g.clone(), dbl.clone()).unwrap_err(),
            SkewError::IncompatibleAction { n: 3 }
        );
        // p | n is fine: E<Delta> is a matrix algebra
        let d = SkewRingDesc::new(2, 1, 2, g.clone(), dbl).unwrap();
        assert!(!d.classical_maschke());
        let g7 = AbGroup::cyclic(7);
        let t = Automorphism::scalar(&g7, 2).unwrap();
        assert_eq!(
            SkewRingDesc::new(5, 1, 2, g7, t).unwrap_err(),
            SkewError::IncompatibleAction { n: 2 }
        );
        assert_eq!(
            SkewRingDesc::new(4, 1, 1, g, id).unwrap_err(),
            SkewError::NonPrime(4)
        );
    }

    #[test]
    fn decompose_examples() {
        let d = decompose(&z3_desc(2, 1, 1, 1));
        let shape: Vec<_> = d
            .factors
            .iter()
            .map(|w| (w.matrix_size, w.center_degree, w.multiplicity))
            .collect();
        assert_eq!(shape, vec![(1, 1, 1), (1, 2, 1)]);
        assert!(d.dimension_check());

        let d = decompose(&z3_desc(2, 1, 2, 2));
        assert_eq!(d.factors.len(), 3);
        assert!(d.factors.iter().all(|w| w.matrix_size == 2 && w.center_degree == 1));
        assert!(d.dimension_check());

        let g = AbGroup::trivial();
        let t = Automorphism::identity(&g);
        let d = decompose(&SkewRingDesc::new(3, 2, 4, g, t).unwrap());
        assert_eq!(d.factors.len(), 1);
        assert_eq!(d.factors[0].matrix_size, 4);
        assert!(d.dimension_check());
    }

    #[test]
    fn rho_examples() {
        let dec = decompose(&z3_desc(2, 1, 1, 1));
        let g = &dec.desc.group;
        assert_eq!(rho_simple(&dec.factors[0], g), GroupRingElem::one(g));
        let v = rho_simple(&dec.factors[1], g);
        assert_eq!(v.support(), vec![chi(1), chi(2)]);
        assert!(rho(&Multiset::new(), &dec).unwrap().is_zero());
        assert_eq!(rho(&Multiset::from([(1, 2)]), &dec).unwrap(), v.scale(2));
        assert_eq!(
            rho(&singleton(7), &dec).unwrap_err(),
            SkewError::UnknownLabel(7)
        );
        // regular module: each V_i with multiplicity d_i, mass [E:F] |N|
        let regular: Multiset = dec
            .factors
            .iter()
            .map(|w| (w.label, w.matrix_size as u64))
            .collect();
        assert_eq!(rho(&regular, &dec).unwrap().mass(), 3);
    }

    #[test]
    fn tensor_examples() {
        let dec = decompose(&z3_desc(2, 1, 1, 1));
        assert_eq!(
            tensor_decompose(&singleton(1), &singleton(0), &dec).unwrap(),
            singleton(1)
        );
        assert_eq!(
            tensor_decompose(&singleton(1), &singleton(1), &dec).unwrap(),
            Multiset::from([(0, 2), (1, 1)])
        );
    }

    #[test]
    fn k0_examples() {
        let k = k0_ring(&z3_desc(2, 1, 2, 2)).unwrap();
        assert!(k.is_group_ring_of_characters());
        let g = AbGroup::trivial();
        let t = Automorphism::identity(&g);
        let k = k0_ring(&SkewRingDesc::new(2, 1, 1, g, t).unwrap()).unwrap();
        assert_eq!(k.rank(), 1);
        assert_eq!(k.structure[0][0], singleton(0));
        let k = k0_ring(&z3_desc(2, 1, 1, 1)).unwrap();
        assert_eq!(k.rank(), 2);
        assert!(!k.is_group_ring_of_characters());
        assert_eq!(k.structure[1][1], Multiset::from([(0, 2), (1, 1)]));
        assert_eq!(k.unit_label(), 0);
    }

    #[test]
    fn tower_examples() {
        let t = tower_level(7, 3, 2).unwrap();
        assert_eq!(t.i_prime, 1);
        assert_eq!(t.galois_degree, 3);
        assert_eq!(t.k0.rank(), 9);
        assert!(t.all_singletons());
        assert!(t.k0.is_group_ring_of_characters());
        let t = tower_level(2, 3, 2).unwrap();
        assert_eq!(t.galois_degree, 6);
        assert_eq!(t.i_prime, 1);
        assert!(t.all_singletons());
        assert_eq!(
            tower_level(3, 3, 1).unwrap_err(),
            SkewError::EqualPrimes(3)
        );
        // ord_3(7) = 1, so i' = 0 at level 1; ord_2(3) = 1 likewise
        assert_eq!(tower_level(3, 2, 1).unwrap().i_prime, 0);
    }

    #[test]
    fn tower_hypothesis_violation() {
        // ord_7(2) = 3 is prime to 7, so i' = 0 < i always; use l = 2, p = 7:
        // ord_2(7) = 1, ord_4(7) = 2, ord_8(7) = 2 -> i' stays below i.
        // A violation needs v_l(ord) >= i, impossible for i >= 1 since v_l(ord_{l^i}) <= i - 1.
        for (p, l) in [(7u64, 3u64), (2, 3), (3, 2), (5, 2), (2, 7)] {
            for i in 1..5 {
                let ip = tower_i_prime(p, l, i).unwrap();
                assert!(ip < i, "({p},{l},{i})");
            }
        }
    }

    #[test]
    fn non_frobenius_twist_breaks_singletons() {
        // eta -> eta^(-1) with p = 7, l = 3 at level 2: chi -> 7 * (-1) chi = 2 chi on Z/9.
        let t = tower_level_with_twist(7, 3, 2, 8).unwrap();
        assert!(!t.all_singletons());
        // l itself is not a unit mod l^i
        assert!(matches!(
            tower_level_with_twist(7, 3, 2, 3),
            Err(SkewError::Group(AbGroupError::NotAUnit(3)))
        ));
    }

    #[test]
    fn colimit_examples() {
        let c = colimit_k0(7, 3, 1).unwrap();
        assert_eq!(c.basis.len(), 3);
        assert!(c.transitions.is_empty());
        let c = colimit_k0(7, 3, 2).unwrap();
        let t = &c.transitions[0];
        assert_eq!(t.map[1], 3);
        assert!(t.is_injective());
        assert!(c.is_ring_map(t));
        let c = colimit_k0(7, 3, 3).unwrap();
        assert_eq!(c.basis.len(), 27);
        assert!(c.transitions.iter().all(Transition::is_injective));
        let composite: Vec<usize> = c.transitions[0]
            .map
            .iter()
            .map(|&x| c.transitions[1].map[x])
            .collect();
        assert_eq!(composite, c.transition(1, 3).unwrap().map);
        assert_eq!(c.basis_element(2, 3), QmodZ::new(1, 3));
    }

    #[test]
    fn finite_approximation_has_singleton_orbits() {
        for (p, l, i) in [(7u64, 3u64, 2u32), (2, 3, 2), (3, 2, 3)] {
            let d = tower_finite_approximation(p, l, i).unwrap();
            assert!(orbits(&d).iter().all(|o| o.len() == 1));
        }
    }

    #[test]
    fn qmodz_arithmetic() {
        assert_eq!(QmodZ::new(2, 3).add(QmodZ::new(2, 3)), QmodZ::new(1, 3));
        assert_eq!(QmodZ::new(3, 9), QmodZ::new(1, 3));
        assert_eq!(QmodZ::new(1, 3).add(QmodZ::new(2, 3)), QmodZ::new(0, 1));
    }
}
