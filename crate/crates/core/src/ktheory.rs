//! K-groups of finite fields, their l-adic completions, and the prime-to-l stability check.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ff::{is_prime, l_valuation_big, mult_order, prime_factors, prime_to_part};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("l = p = {0}: the completion prime must differ from the characteristic")]
    EqualPrimes(u64),
    #[error("l-primary torsion of order {l}^{exp} does not fit in 64 bits")]
    TorsionOverflow { l: u64, exp: u32 },
}

/// A finitely generated abelian group `Z^rank + Z/t_1 + ... + Z/t_k` with `t_1 | ... | t_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FgAbGroup {
    rank: u32,
    torsion: Vec<BigUint>,
}

impl FgAbGroup {
    pub fn zero() -> Self {
        FgAbGroup {
            rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: u32) -> Self {
        FgAbGroup {
            rank,
            torsion: Vec::new(),
        }
    }

    pub fn cyclic(order: BigUint) -> Self {
        Self::new(0, vec![order])
    }

    /// Normalizes arbitrary cyclic orders into invariant factors; orders 1 are dropped and
    /// order 0 counts as a free summand.
    pub fn new(rank: u32, orders: Vec<BigUint>) -> Self {
        let mut rank = rank;
        let mut t: Vec<BigUint> = Vec::new();
        for o in orders {
            if o.is_zero() {
                rank += 1;
            } else if !o.is_one() {
                t.push(o);
            }
        }
        // diag(a, b) ~ diag(gcd, lcm) until the chain divides
        for i in 0..t.len() {
            for j in i + 1..t.len() {
                let g = t[i].gcd(&t[j]);
                let l = t[i].lcm(&t[j]);
                t[i] = g;
                t[j] = l;
            }
        }
        t.retain(|o| !o.is_one());
        FgAbGroup { rank, torsion: t }
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn torsion(&self) -> &[BigUint] {
        &self.torsion
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut orders = self.torsion.clone();
        orders.extend(other.torsion.iter().cloned());
        Self::new(self.rank + other.rank, orders)
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("ℤ".to_string()),
            r => parts.push(format!("ℤ^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("ℤ/{t}")));
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

#[derive(Serialize, Deserialize)]
struct FgAbGroupRepr {
    rank: u32,
    torsion: Vec<String>,
}

impl Serialize for FgAbGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FgAbGroupRepr {
            rank: self.rank,
            torsion: self.torsion.iter().map(|t| t.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FgAbGroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = FgAbGroupRepr::deserialize(d)?;
        let orders = r
            .torsion
            .iter()
            .map(|t| t.parse::<BigUint>().map_err(serde::de::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FgAbGroup::new(r.rank, orders))
    }
}

/// `Z_l^zl_rank + Z/l^a_1 + ...`, torsion orders ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LComplGroup {
    pub l: u64,
    pub zl_rank: u32,
    pub torsion: Vec<u64>,
}

impl LComplGroup {
    pub fn zero(l: u64) -> Self {
        LComplGroup {
            l,
            zl_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn zl(l: u64) -> Self {
        LComplGroup {
            l,
            zl_rank: 1,
            torsion: Vec::new(),
        }
    }

    /// `Z/l^exp`, or zero for `exp = 0`.
    pub fn cyclic_power(l: u64, exp: u32) -> Result<Self, KError> {
        if exp == 0 {
            return Ok(Self::zero(l));
        }
        let order = l
            .checked_pow(exp)
            .ok_or(KError::TorsionOverflow { l, exp })?;
        Ok(LComplGroup {
            l,
            zl_rank: 0,
            torsion: vec![order],
        })
    }

    pub fn is_zero(&self) -> bool {
        self.zl_rank == 0 && self.torsion.is_empty()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        debug_assert_eq!(self.l, other.l);
        let mut torsion = self.torsion.clone();
        torsion.extend(&other.torsion);
        torsion.sort_unstable();
        LComplGroup {
            l: self.l,
            zl_rank: self.zl_rank + other.zl_rank,
            torsion,
        }
    }
}

impl fmt::Display for LComplGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.zl_rank {
            0 => {}
            1 => parts.push(format!("ℤ_{}", self.l)),
            r => parts.push(format!("ℤ_{}^{r}", self.l)),
        }
        parts.extend(self.torsion.iter().map(|t| format!("ℤ/{t}")));
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

fn check_prime(p: u64) -> Result<(), KError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(KError::NonPrime(p))
    }
}

fn check_pair(p: u64, l: u64) -> Result<(), KError> {
    check_prime(p)?;
    check_prime(l)?;
    if p == l {
        return Err(KError::EqualPrimes(p));
    }
    Ok(())
}

/// `K_n(GF(q))`: `Z` in degree 0, `Z/(q^j - 1)` in degree `2j - 1`, zero in positive even
/// degrees.
pub fn k_finite_field(q: u64, n: u32) -> Result<FgAbGroup, KError> {
    match prime_factors(q).as_slice() {
        [_] => {}
        _ => return Err(KError::NotPrimePower(q)),
    }
    Ok(if n == 0 {
        FgAbGroup::free(1)
    } else if n % 2 == 1 {
        let j = n.div_ceil(2);
        FgAbGroup::cyclic(BigUint::from(q).pow(j) - BigUint::one())
    } else {
        FgAbGroup::zero()
    })
}

/// `Z_l (x) g`.
pub fn l_complete(g: &FgAbGroup, l: u64) -> Result<LComplGroup, KError> {
    check_prime(l)?;
    let mut out = LComplGroup {
        l,
        zl_rank: g.rank(),
        torsion: Vec::new(),
    };
    for t in g.torsion() {
        out = out.direct_sum(&LComplGroup::cyclic_power(l, l_valuation_big(t, l))?);
    }
    Ok(out)
}

/// A pair where `v_l(p^(mj) - 1) != v_l(p^j - 1)` for `m` prime to `l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityFlag {
    pub j: u32,
    pub m: u32,
    pub v_extended: u32,
    pub v_base: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub p: u64,
    pub l: u64,
    pub j_max: u32,
    pub m_max: u32,
    pub flagged: Vec<StabilityFlag>,
}

impl StabilityReport {
    pub fn is_clean(&self) -> bool {
        self.flagged.is_empty()
    }
}

/// Compares the l-parts of `K_{2j-1}` of `GF(p^m)` and `GF(p)` over `1 <= j <= j_max` and
/// `1 <= m <= m_max` prime to `l`.
pub fn stability_check(p: u64, l: u64, j_max: u32, m_max: u32) -> Result<StabilityReport, KError> {
    check_pair(p, l)?;
    let pb = BigUint::from(p);
    let mut flagged = Vec::new();
    for j in 1..=j_max {
        let base = pb.pow(j);
        let v_base = l_valuation_big(&(&base - 1u32), l);
        for m in 1..=m_max {
            if (m as u64).is_multiple_of(l) {
                continue;
            }
            let v_extended = l_valuation_big(&(base.pow(m) - 1u32), l);
            if v_extended != v_base {
                flagged.push(StabilityFlag {
                    j,
                    m,
                    v_extended,
                    v_base,
                });
            }
        }
    }
    Ok(StabilityReport {
        p,
        l,
        j_max,
        m_max,
        flagged,
    })
}

/// `K_n` of representations of the level-`i_max` tame quotient: `K_0` truncated to rank
/// `l^i_max`, tensored with `K_n` of the approximating field `GF(p^m)`, `m` the prime-to-`l`
/// part of `ord_{l^i_max}(p)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KRepGroups {
    pub p: u64,
    pub l: u64,
    pub n: u32,
    pub i_max: u32,
    pub k0_rank: u64,
    pub approximant_degree: u64,
    /// `K_n(GF(p^m))`; `K_n = K_0 (x) coefficient`.
    pub coefficient: FgAbGroup,
    pub stability: StabilityReport,
    pub warnings: Vec<String>,
}

pub fn k_rep_groups(p: u64, l: u64, n: u32, i_max: u32) -> Result<KRepGroups, KError> {
    check_pair(p, l)?;
    let modulus = l
        .checked_pow(i_max)
        .ok_or(KError::TorsionOverflow { l, exp: i_max })?;
    let m = prime_to_part(mult_order(p, modulus).expect("p and l are distinct primes"), l);
    let q = p
        .checked_pow(m as u32)
        .ok_or(KError::NotPrimePower(p))?;
    let coefficient = k_finite_field(q, n)?;
    let stability = stability_check(p, l, n.div_ceil(2).max(1), m as u32)?;
    let warnings = stability
        .flagged
        .iter()
        .map(|s| {
            format!(
                "v_{l}({p}^{} - 1) = {} but v_{l}({p}^{} - 1) = {}",
                s.m * s.j,
                s.v_extended,
                s.j,
                s.v_base
            )
        })
        .collect();
    Ok(KRepGroups {
        p,
        l,
        n,
        i_max,
        k0_rank: modulus,
        approximant_degree: m,
        coefficient,
        stability,
        warnings,
    })
}

/// `pi_n (K GF(p))^_l + pi_{n-1} (K GF(p))^_l`, with `pi_{-1} = 0`.
pub fn k_f_completed(p: u64, l: u64, n: u32) -> Result<LComplGroup, KError> {
    check_pair(p, l)?;
    let top = l_complete(&k_finite_field(p, n)?, l)?;
    if n == 0 {
        return Ok(top);
    }
    Ok(top.direct_sum(&l_complete(&k_finite_field(p, n - 1)?, l)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn finite_field_k_groups() {
        assert_eq!(k_finite_field(7, 0).unwrap(), FgAbGroup::free(1));
        assert_eq!(k_finite_field(7, 1).unwrap(), FgAbGroup::cyclic(big(6)));
        assert_eq!(k_finite_field(7, 3).unwrap(), FgAbGroup::cyclic(big(48)));
        assert!(k_finite_field(7, 4).unwrap().is_zero());
        assert_eq!(k_finite_field(6, 1), Err(KError::NotPrimePower(6)));
        assert_eq!(k_finite_field(2, 1).unwrap(), FgAbGroup::zero());
    }

    #[test]
    fn completion_examples() {
        assert_eq!(l_complete(&FgAbGroup::free(1), 5).unwrap(), LComplGroup::zl(5));
        let z3 = LComplGroup::cyclic_power(3, 1).unwrap();
        assert_eq!(l_complete(&FgAbGroup::cyclic(big(6)), 3).unwrap(), z3);
        assert_eq!(l_complete(&FgAbGroup::cyclic(big(48)), 3).unwrap(), z3);
        assert_eq!(
            l_complete(&FgAbGroup::cyclic(big(342)), 3).unwrap(),
            LComplGroup::cyclic_power(3, 2).unwrap()
        );
    }

    #[test]
    fn invariant_factors() {
        let g = FgAbGroup::new(0, vec![big(4), big(6)]);
        assert_eq!(g.torsion(), &[big(2), big(12)]);
        let h = FgAbGroup::new(1, vec![big(3), big(1), big(0), big(5)]);
        assert_eq!((h.rank(), h.torsion()), (2, &[big(15)][..]));
        assert_eq!(g.to_string(), "ℤ/2 ⊕ ℤ/12");
    }

    #[test]
    fn json_round_trip() {
        let g = FgAbGroup::new(1, vec![big(48)]);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"rank":1,"torsion":["48"]}"#);
        assert_eq!(serde_json::from_str::<FgAbGroup>(&s).unwrap(), g);
    }

    #[test]
    fn stability_examples() {
        assert!(stability_check(7, 3, 6, 8).unwrap().is_clean());
        let r = stability_check(2, 7, 1, 3).unwrap();
        assert_eq!(
            r.flagged,
            vec![StabilityFlag {
                j: 1,
                m: 3,
                v_extended: 1,
                v_base: 0
            }]
        );
        assert!(stability_check(2, 7, 12, 1).unwrap().is_clean());
        assert_eq!(stability_check(3, 3, 1, 1), Err(KError::EqualPrimes(3)));
    }

    #[test]
    fn rep_groups() {
        let r = k_rep_groups(7, 3, 0, 2).unwrap();
        assert_eq!((r.k0_rank, r.coefficient.clone()), (9, FgAbGroup::free(1)));
        let r = k_rep_groups(7, 3, 1, 2).unwrap();
        assert_eq!(r.approximant_degree, 1);
        assert_eq!(r.coefficient, FgAbGroup::cyclic(big(6)));
        assert!(k_rep_groups(7, 3, 4, 2).unwrap().coefficient.is_zero());
        let r = k_rep_groups(2, 7, 1, 1).unwrap();
        assert_eq!(r.approximant_degree, 3);
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn completed_k_groups_of_the_closure() {
        assert_eq!(k_f_completed(7, 3, 0).unwrap(), LComplGroup::zl(3));
        let one = k_f_completed(7, 3, 1).unwrap();
        assert_eq!((one.zl_rank, one.torsion.clone()), (1, vec![3]));
        assert_eq!(k_f_completed(7, 3, 2).unwrap().torsion, vec![3]);
        assert_eq!(k_f_completed(7, 3, 2).unwrap().zl_rank, 0);
    }
}
