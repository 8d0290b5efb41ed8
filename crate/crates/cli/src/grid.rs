//! The desk grid: every `(p, f, n, N, theta)` within bounds, `theta` up to conjugacy in
//! `Aut(N)`, run through both the orbit formulas and the oracle.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use skewk_core::abgroup::{AbGroup, Automorphism};
use skewk_core::oracle::{analyze, compare, OracleConfig};
use skewk_core::skewring::{decompose, k0_ring, SkewError, SkewRingDesc};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridBounds {
    pub primes: Vec<u64>,
    pub f_max: u32,
    pub n_max: u32,
    pub order_max: u64,
}

impl Default for GridBounds {
    fn default() -> Self {
        GridBounds {
            primes: vec![2, 3, 5, 7],
            f_max: 2,
            n_max: 4,
            order_max: 16,
        }
    }
}

/// One grid point before validation.
#[derive(Debug, Clone)]
pub struct GridCase {
    pub p: u64,
    pub f: u32,
    pub n: u32,
    pub theta: Automorphism,
}

/// Representatives of the conjugacy classes of `Aut(N)` with `theta^n = 1`, each the
/// lexicographically first matrix of its class.
pub fn theta_classes(group: &AbGroup, n: u32) -> Vec<Automorphism> {
    let auts = Automorphism::enumerate_all(group);
    let perms: Vec<Vec<usize>> = auts.iter().map(Automorphism::permutation).collect();
    let index: HashMap<&[usize], usize> = perms
        .iter()
        .enumerate()
        .map(|(i, p)| (p.as_slice(), i))
        .collect();
    let inverses: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| {
            let mut inv = vec![0; p.len()];
            for (x, &y) in p.iter().enumerate() {
                inv[y] = x;
            }
            inv
        })
        .collect();
    let order_divides = |p: &[usize]| {
        let mut cur: Vec<usize> = (0..p.len()).collect();
        for _ in 0..n {
            cur = cur.iter().map(|&x| p[x]).collect();
        }
        cur.iter().enumerate().all(|(i, &x)| i == x)
    };
    let mut seen = vec![false; auts.len()];
    let mut reps = Vec::new();
    for (i, t) in perms.iter().enumerate() {
        if seen[i] || !order_divides(t) {
            continue;
        }
        reps.push(auts[i].clone());
        for (a, a_inv) in perms.iter().zip(&inverses) {
            let conj: Vec<usize> = (0..t.len()).map(|x| a[t[a_inv[x]]]).collect();
            seen[index[conj.as_slice()]] = true;
        }
    }
    reps
}

/// All grid points in canonical order: `p`, `f`, `n`, then `N` by order, then `theta`.
pub fn grid_cases(bounds: &GridBounds) -> Vec<GridCase> {
    let groups = if bounds.order_max == 0 {
        Vec::new()
    } else {
        AbGroup::all_up_to_order(bounds.order_max)
    };
    let mut classes: HashMap<(usize, u32), Vec<Automorphism>> = HashMap::new();
    let mut out = Vec::new();
    for &p in &bounds.primes {
        for f in 1..=bounds.f_max {
            for n in 1..=bounds.n_max {
                for (gi, g) in groups.iter().enumerate() {
                    let reps = classes
                        .entry((gi, n))
                        .or_insert_with(|| theta_classes(g, n));
                    out.extend(reps.iter().map(|t| GridCase {
                        p,
                        f,
                        n,
                        theta: t.clone(),
                    }));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseStatus {
    /// Formulas and oracle agree on everything compared.
    Agree,
    Mismatch,
    /// The oracle or the formulas failed outright.
    Error,
    /// `p` divides `|N|`: not semisimple.
    SkipMaschke,
    /// Beyond the oracle's dimension bound.
    SkipBound,
}

impl CaseStatus {
    pub fn tag(self) -> &'static str {
        match self {
            CaseStatus::Agree => "AGREE",
            CaseStatus::Mismatch => "MISMATCH",
            CaseStatus::Error => "ERROR",
            CaseStatus::SkipMaschke => "SKIP_MASCHKE",
            CaseStatus::SkipBound => "SKIP_BOUND",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseResult {
    pub p: u64,
    pub f: u32,
    pub n: u32,
    pub group: Vec<u32>,
    pub theta: Vec<Vec<u32>>,
    pub status: CaseStatus,
    /// `p` divides `n` but not `|N|`: semisimple although `p` divides `|G|`.
    pub p_divides_n: bool,
    pub factors: usize,
    /// Sorted `(d, [Z:F], m)` from the formulas.
    pub shapes: Vec<(u32, u32, u32)>,
    pub dim_check: bool,
    pub oracle_multiplicity_one: bool,
    pub oracle_single_orbit: bool,
    /// Unordered factor pairs whose tensor products were compared, and those that differed.
    pub tensor_pairs: usize,
    pub tensor_mismatches: Vec<(usize, usize)>,
    pub notes: Vec<String>,
}

impl CaseResult {
    fn new(case: &GridCase, status: CaseStatus) -> Self {
        CaseResult {
            p: case.p,
            f: case.f,
            n: case.n,
            group: case.theta.group().factors().to_vec(),
            theta: case.theta.matrix().to_vec(),
            status,
            p_divides_n: (case.n as u64).is_multiple_of(case.p),
            factors: 0,
            shapes: Vec::new(),
            dim_check: false,
            oracle_multiplicity_one: false,
            oracle_single_orbit: false,
            tensor_pairs: 0,
            tensor_mismatches: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// One line, stable across runs.
    pub fn line(&self) -> String {
        let shapes: Vec<String> = self
            .shapes
            .iter()
            .map(|(d, c, m)| format!("{d}/{c}/{m}"))
            .collect();
        let mut s = format!(
            "{:<12} p={} f={} n={} N={:?} theta={:?}",
            self.status.tag(),
            self.p,
            self.f,
            self.n,
            self.group,
            self.theta,
        );
        if matches!(self.status, CaseStatus::SkipMaschke | CaseStatus::SkipBound) {
            return s;
        }
        s += &format!(
            " factors={} shapes=[{}] dim_check={}",
            self.factors,
            shapes.join(","),
            self.dim_check
        );
        if self.p_divides_n && self.status != CaseStatus::SkipMaschke {
            s.push_str(" p|n");
        }
        for note in &self.notes {
            s.push_str(" | ");
            s.push_str(note);
        }
        s
    }
}

pub fn run_case(case: &GridCase, cfg: &OracleConfig) -> CaseResult {
    let desc = match SkewRingDesc::new(case.p, case.f, case.n, case.theta.group().clone(), case.theta.clone()) {
        Ok(d) => d,
        Err(SkewError::MaschkeViolated { .. }) => {
            return CaseResult::new(case, CaseStatus::SkipMaschke)
        }
        Err(e) => {
            let mut r = CaseResult::new(case, CaseStatus::Error);
            r.notes.push(e.to_string());
            return r;
        }
    };
    let mut r = CaseResult::new(case, CaseStatus::Agree);
    if desc.dim_over_f() > cfg.max_dim {
        r.status = CaseStatus::SkipBound;
        return r;
    }
    let dec = decompose(&desc);
    r.factors = dec.factors.len();
    r.dim_check = dec.dimension_check();
    let mut shapes: Vec<(u32, u32, u32)> = dec
        .factors
        .iter()
        .map(|w| (w.matrix_size, w.center_degree, w.multiplicity))
        .collect();
    shapes.sort_unstable();
    r.shapes = shapes;
    let k0 = match k0_ring(&desc) {
        Ok(k) => k,
        Err(e) => {
            r.status = CaseStatus::Error;
            r.notes.push(e.to_string());
            return r;
        }
    };
    let report = match analyze(&desc, cfg) {
        Ok(rep) => rep,
        Err(e) => {
            r.status = CaseStatus::Error;
            r.notes.push(format!("oracle: {e}"));
            return r;
        }
    };
    r.oracle_multiplicity_one = report.factors.iter().all(|w| w.multiplicity == 1);
    r.oracle_single_orbit = report.factors.iter().all(|w| {
        w.rho
            .support()
            .iter()
            .all(|chi| dec.label_of(chi) == dec.label_of(&w.rho.support()[0]))
    });
    let agreement = compare(&dec, Some(&k0), &report);
    if let Some(t) = &report.tensor {
        let k = t.len();
        r.tensor_pairs = k * (k + 1) / 2;
        r.tensor_mismatches = agreement.tensor_mismatches.clone();
    }
    if !agreement.all() || !r.dim_check {
        r.status = CaseStatus::Mismatch;
        r.notes.extend(agreement.notes);
        if !r.dim_check {
            r.notes.push("dimension identity fails".into());
        }
    }
    r
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSummary {
    pub cases: usize,
    /// Cases with `p` prime to `|G|`, the classical hypothesis.
    pub classical: usize,
    pub classical_agree: usize,
    /// Cases with `p | n`, `p` prime to `|N|`.
    pub p_divides_n: usize,
    pub p_divides_n_agree: usize,
    pub skipped_maschke: usize,
    pub skipped_bound: usize,
    pub mismatches: usize,
    pub errors: usize,
    pub tensor_pairs: usize,
    pub tensor_mismatches: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridReport {
    pub bounds: GridBounds,
    pub results: Vec<CaseResult>,
    pub summary: GridSummary,
}

impl GridReport {
    pub fn all_agree(&self) -> bool {
        self.summary.mismatches == 0 && self.summary.errors == 0
    }

    /// `AGREE k/k` over the classical cases, with the other tallies after it.
    pub fn summary_line(&self) -> String {
        let s = &self.summary;
        format!(
            "{} {}/{} (p prime to |G|); p|n with p prime to |N|: {}/{}; skipped: {} SKIP_MASCHKE, {} SKIP_BOUND; tensor pairs: {} compared, {} mismatched",
            if self.all_agree() { "AGREE" } else { "DISAGREE" },
            s.classical_agree,
            s.classical,
            s.p_divides_n_agree,
            s.p_divides_n,
            s.skipped_maschke,
            s.skipped_bound,
            s.tensor_pairs,
            s.tensor_mismatches
        )
    }
}

/// Runs every case; results keep the canonical order of [`grid_cases`] whatever the schedule.
pub fn run_grid(bounds: &GridBounds, cfg: &OracleConfig, parallel: bool) -> GridReport {
    let cases = grid_cases(bounds);
    let results: Vec<CaseResult> = if parallel {
        cases.par_iter().map(|c| run_case(c, cfg)).collect()
    } else {
        cases.iter().map(|c| run_case(c, cfg)).collect()
    };
    let mut s = GridSummary {
        cases: results.len(),
        classical: 0,
        classical_agree: 0,
        p_divides_n: 0,
        p_divides_n_agree: 0,
        skipped_maschke: 0,
        skipped_bound: 0,
        mismatches: 0,
        errors: 0,
        tensor_pairs: 0,
        tensor_mismatches: 0,
    };
    for r in &results {
        let agree = r.status == CaseStatus::Agree;
        match r.status {
            CaseStatus::SkipMaschke => s.skipped_maschke += 1,
            CaseStatus::SkipBound => s.skipped_bound += 1,
            CaseStatus::Mismatch => s.mismatches += 1,
            CaseStatus::Error => s.errors += 1,
            CaseStatus::Agree => {}
        }
        if matches!(r.status, CaseStatus::SkipMaschke | CaseStatus::SkipBound) {
            continue;
        }
        if r.p_divides_n {
            s.p_divides_n += 1;
            s.p_divides_n_agree += agree as usize;
        } else {
            s.classical += 1;
            s.classical_agree += agree as usize;
        }
        s.tensor_pairs += r.tensor_pairs;
        s.tensor_mismatches += r.tensor_mismatches.len();
    }
    GridReport {
        bounds: bounds.clone(),
        results,
        summary: s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_classes_of_small_groups() {
        // Aut(Z/2 x Z/2) = S3: classes of order 1, 2, 3
        let v4 = AbGroup::new(vec![2, 2]).unwrap();
        assert_eq!(theta_classes(&v4, 1).len(), 1);
        assert_eq!(theta_classes(&v4, 2).len(), 2);
        assert_eq!(theta_classes(&v4, 3).len(), 2);
        assert_eq!(theta_classes(&v4, 4).len(), 2);
        // Aut(Z/5) = Z/4 is abelian, so classes are elements
        let c5 = AbGroup::cyclic(5);
        assert_eq!(theta_classes(&c5, 4).len(), 4);
        assert_eq!(theta_classes(&AbGroup::trivial(), 3).len(), 1);
    }

    #[test]
    fn empty_bounds_give_empty_grid() {
        let b = GridBounds {
            order_max: 0,
            ..GridBounds::default()
        };
        let r = run_grid(&b, &OracleConfig::default(), false);
        assert_eq!(r.summary.cases, 0);
        assert!(r.all_agree());
        assert!(r.summary_line().starts_with("AGREE 0/0"));
    }

    #[test]
    fn small_grid_agrees() {
        let b = GridBounds {
            primes: vec![2, 3],
            f_max: 1,
            n_max: 2,
            order_max: 4,
        };
        let r = run_grid(&b, &OracleConfig::default(), false);
        assert!(r.all_agree(), "{}", r.summary_line());
        assert!(r.summary.skipped_maschke > 0);
        assert!(r.summary.p_divides_n > 0);
    }
}
