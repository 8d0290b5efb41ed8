//! The algebraic-to-geometric spectral sequence for the K-theory of tame Galois
//! representations: its `E_1` page, the homotopy it converges to, and the comparison with the
//! completed K-groups of the algebraic closure.
//!
//! Page entries are computed from valuations of `q^j - 1` for the approximating field
//! `GF(q)` of the first tower level; the comparison side comes from [`crate::ktheory`].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ff::l_valuation_big;
use crate::ktheory::{k_f_completed, stability_check, KError, LComplGroup, StabilityReport};
use crate::skewring::{tower_finite_approximation, SkewError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SsError {
    #[error("empty window: t from {t_min} to {t_max}")]
    EmptyWindow { t_min: i64, t_max: i64 },
    #[error(transparent)]
    K(#[from] KError),
    #[error(transparent)]
    Skew(#[from] SkewError),
}

/// `pi_k (K GF(q))^_l`.
fn completed_homotopy(q: &BigUint, l: u64, k: i64) -> Result<LComplGroup, KError> {
    if k < 0 || (k > 0 && k % 2 == 0) {
        return Ok(LComplGroup::zero(l));
    }
    if k == 0 {
        return Ok(LComplGroup::zl(l));
    }
    let j = ((k + 1) / 2) as u32;
    LComplGroup::cyclic_power(l, l_valuation_big(&(q.pow(j) - 1u32), l))
}

/// Degree of the approximating field over `GF(p)`.
fn approximant_degree(p: u64, l: u64) -> Result<u32, SkewError> {
    Ok(tower_finite_approximation(p, l, 1)?.f())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct E1Page {
    pub p: u64,
    pub l: u64,
    /// Size of the approximating field.
    pub q: String,
    pub t_min: i64,
    pub t_max: i64,
    pub s_min: i64,
    pub s_max: i64,
    /// Every position of the window, zero entries included.
    #[serde(with = "entry_list")]
    pub entries: BTreeMap<(i64, i64), LComplGroup>,
    /// All differentials are recorded as zero; the page is not derived from a filtration, so
    /// this is an input rather than a computed fact.
    pub differentials_zero: bool,
}

/// Page entries as a list of `{s, t, group}` records, since JSON keys must be strings.
mod entry_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        s: i64,
        t: i64,
        group: LComplGroup,
    }

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<(i64, i64), LComplGroup>,
        ser: S,
    ) -> Result<S::Ok, S::Error> {
        let list: Vec<Entry> = map
            .iter()
            .map(|(&(s, t), g)| Entry {
                s,
                t,
                group: g.clone(),
            })
            .collect();
        list.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> Result<BTreeMap<(i64, i64), LComplGroup>, D::Error> {
        let list = Vec::<Entry>::deserialize(de)?;
        Ok(list.into_iter().map(|e| ((e.s, e.t), e.group)).collect())
    }
}

impl E1Page {
    pub fn entry(&self, s: i64, t: i64) -> Option<&LComplGroup> {
        self.entries.get(&(s, t))
    }

    /// Positions of the nonzero entries.
    pub fn support(&self) -> Vec<(i64, i64)> {
        self.entries
            .iter()
            .filter(|(_, g)| !g.is_zero())
            .map(|(&k, _)| k)
            .collect()
    }

    /// Aligned text, `t` decreasing downwards and `s` increasing to the right.
    pub fn render(&self) -> String {
        let cells: Vec<Vec<String>> = (self.t_min..=self.t_max)
            .rev()
            .map(|t| {
                (self.s_min..=self.s_max)
                    .map(|s| self.entries[&(s, t)].to_string())
                    .collect()
            })
            .collect();
        let width = cells
            .iter()
            .flatten()
            .map(|c| c.chars().count())
            .chain(std::iter::once(3))
            .max()
            .unwrap_or(1);
        let label_w = format!("{}", self.t_min).len().max(format!("{}", self.t_max).len()) + 2;
        let mut out = String::new();
        for (row, t) in cells.iter().zip((self.t_min..=self.t_max).rev()) {
            out.push_str(&format!("{:>label_w$} |", format!("t={t}")));
            for c in row {
                out.push_str(&format!(" {c:>width$}"));
            }
            out.push('\n');
        }
        out.push_str(&format!("{:>label_w$} +", ""));
        out.push_str(&"-".repeat((width + 1) * cells.first().map_or(0, Vec::len)));
        out.push('\n');
        out.push_str(&format!("{:>label_w$}  ", "s"));
        for s in self.s_min..=self.s_max {
            out.push_str(&format!(" {s:>width$}"));
        }
        out.push('\n');
        out
    }
}

/// Entries `pi_{-t}` of the completed K-theory of the approximating field on the diagonals
/// `s + 2t = 0, 1`, zero elsewhere, over `t_min <= t <= t_max` and the `s` range that meets
/// both diagonals.
pub fn e1_page(p: u64, l: u64, t_min: i64, t_max: i64) -> Result<E1Page, SsError> {
    if t_min > t_max {
        return Err(SsError::EmptyWindow { t_min, t_max });
    }
    let m = approximant_degree(p, l)?;
    let q = BigUint::from(p).pow(m);
    let s_min = -2 * t_max;
    let s_max = 1 - 2 * t_min;
    let mut entries = BTreeMap::new();
    for t in t_min..=t_max {
        for s in s_min..=s_max {
            let g = if s + 2 * t == 0 || s + 2 * t == 1 {
                completed_homotopy(&q, l, -t)?
            } else {
                LComplGroup::zero(l)
            };
            entries.insert((s, t), g);
        }
    }
    Ok(E1Page {
        p,
        l,
        q: q.to_string(),
        t_min,
        t_max,
        s_min,
        s_max,
        entries,
        differentials_zero: true,
    })
}

/// `pi_n` of the derived completion for `0 <= n <= n_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DcHomotopy {
    pub p: u64,
    pub l: u64,
    pub groups: Vec<LComplGroup>,
}

/// Sums the collapsed page along total degree `s + t`. Each diagonal meets a total degree at
/// most once, so the sum has at most two terms and no extension question arises.
pub fn dc_homotopy(p: u64, l: u64, n_max: u32) -> Result<DcHomotopy, SsError> {
    let page = e1_page(p, l, -(n_max as i64), 0)?;
    let mut groups = vec![LComplGroup::zero(l); n_max as usize + 1];
    for (&(s, t), g) in &page.entries {
        let n = s + t;
        if (0..=n_max as i64).contains(&n) && !g.is_zero() {
            groups[n as usize] = groups[n as usize].direct_sum(g);
        }
    }
    Ok(DcHomotopy { p, l, groups })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    /// The prime-to-l stability hypothesis fails somewhere in the tested range.
    Conditional,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Conditional => "CONDITIONAL",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeRow {
    pub n: u32,
    pub derived_completion: LComplGroup,
    pub closure: LComplGroup,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MainReport {
    pub p: u64,
    pub l: u64,
    pub n_max: u32,
    pub rows: Vec<DegreeRow>,
    pub stability: StabilityReport,
    pub verdict: Verdict,
}

/// Stability is tested on `m` up to this bound (or the approximant degree, if larger).
pub const STABILITY_M_MAX: u32 = 10;

/// Degreewise comparison of the derived completion with `pi_* (K GF(p))^_l` summed with its
/// shift.
pub fn verify_main(p: u64, l: u64, n_max: u32) -> Result<MainReport, SsError> {
    let dc = dc_homotopy(p, l, n_max)?;
    let mut rows = Vec::with_capacity(n_max as usize + 1);
    for (n, g) in dc.groups.into_iter().enumerate() {
        let closure = k_f_completed(p, l, n as u32)?;
        rows.push(DegreeRow {
            n: n as u32,
            agree: g == closure,
            derived_completion: g,
            closure,
        });
    }
    let m = approximant_degree(p, l)?;
    let stability = stability_check(p, l, n_max.div_ceil(2).max(1), m.max(STABILITY_M_MAX))?;
    let verdict = if !stability.is_clean() {
        Verdict::Conditional
    } else if rows.iter().all(|r| r.agree) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(MainReport {
        p,
        l,
        n_max,
        rows,
        stability,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn page_entries() {
        let page = e1_page(7, 3, -6, 0).unwrap();
        assert_eq!(page.entry(0, 0), Some(&LComplGroup::zl(3)));
        assert_eq!(page.entry(1, 0), Some(&LComplGroup::zl(3)));
        let z3 = LComplGroup::cyclic_power(3, 1).unwrap();
        assert_eq!(page.entry(2, -1), Some(&z3));
        assert_eq!(page.entry(3, -1), Some(&z3));
        assert!(page.entry(2, 0).unwrap().is_zero());
        assert!(page.entry(4, -2).unwrap().is_zero());
        assert_eq!(
            page.entry(10, -5),
            Some(&LComplGroup::cyclic_power(3, 2).unwrap())
        );
        for (s, t) in page.support() {
            assert!(s + 2 * t == 0 || s + 2 * t == 1);
        }
    }

    #[test]
    fn homotopy_sums_both_diagonals() {
        let dc = dc_homotopy(7, 3, 4).unwrap();
        assert_eq!(dc.groups[0], LComplGroup::zl(3));
        assert_eq!(dc.groups[1].zl_rank, 1);
        assert_eq!(dc.groups[1].torsion, vec![3]);
        assert_eq!(dc.groups[2], LComplGroup::cyclic_power(3, 1).unwrap());
    }

    #[test]
    fn main_identity() {
        let r = verify_main(7, 3, 20).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.rows.iter().all(|row| row.agree));
        let r = verify_main(2, 7, 10).unwrap();
        assert_eq!(r.verdict, Verdict::Conditional);
        assert!(r.stability.flagged.iter().any(|f| (f.j, f.m) == (1, 3)));
        assert!(verify_main(3, 3, 4).is_err());
    }

    #[test]
    fn page_json_round_trip() {
        let page = e1_page(2, 3, -3, 0).unwrap();
        let text = serde_json::to_string(&page).unwrap();
        assert_eq!(serde_json::from_str::<E1Page>(&text).unwrap(), page);
    }

    #[test]
    fn rendering_has_one_line_per_row() {
        let page = e1_page(7, 3, -2, 0).unwrap();
        let text = page.render();
        assert_eq!(text.lines().count(), 3 + 2);
        assert!(text.contains("ℤ_3"));
    }
}
