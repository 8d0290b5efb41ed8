//! One line per acceptance criterion; exits nonzero if any fails.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use skewk_cli::grid::{run_grid, CaseResult, CaseStatus, GridBounds, GridReport};
use skewk_core::abgroup::{AbGroup, Automorphism, Character, GroupRingElem};
use skewk_core::ff::{l_valuation, l_valuation_big, mult_order};
use skewk_core::ktheory::{k_finite_field, l_complete, stability_check, LComplGroup};
use skewk_core::oracle::{analyze, OracleConfig};
use skewk_core::skewring::{
    colimit_k0, decompose, k0_ring, rho, singleton, tensor_decompose, tower_level, Multiset,
    SkewRingDesc,
};
use skewk_core::ss::{e1_page, verify_main, Verdict};

type Outcome = Result<String, String>;

fn check(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn desc_of(r: &CaseResult) -> SkewRingDesc {
    let g = AbGroup::new(r.group.clone()).expect("grid group");
    let m = r
        .theta
        .iter()
        .map(|row| row.iter().map(|&x| x as u64).collect())
        .collect();
    let theta = Automorphism::new(g.clone(), m).expect("grid theta");
    SkewRingDesc::new(r.p, r.f, r.n, g, theta).expect("grid descriptor")
}

fn compared(r: &CaseResult) -> bool {
    !matches!(r.status, CaseStatus::SkipMaschke | CaseStatus::SkipBound)
}

fn criterion_1(report: &GridReport, elapsed: Duration) -> Outcome {
    let s = &report.summary;
    check(s.skipped_bound == 0, format!("{} cases beyond the oracle bound", s.skipped_bound))?;
    check(
        s.mismatches == 0 && s.errors == 0,
        format!("{} mismatches, {} errors", s.mismatches, s.errors),
    )?;
    check(s.classical > 0 && s.classical_agree == s.classical, report.summary_line())?;
    check(
        elapsed < Duration::from_secs(300),
        format!("grid took {:.0}s", elapsed.as_secs_f64()),
    )?;
    Ok(format!(
        "AGREE {}/{} with p prime to |G|, {}/{} more with p | n; {} SKIP_MASCHKE; {:.0}s",
        s.classical_agree,
        s.classical,
        s.p_divides_n_agree,
        s.p_divides_n,
        s.skipped_maschke,
        elapsed.as_secs_f64()
    ))
}

fn criterion_2(report: &GridReport) -> Outcome {
    let mut n = 0;
    for r in report.results.iter().filter(|r| compared(r)) {
        let d = desc_of(r);
        let dec = decompose(&d);
        let total: u64 = dec
            .factors
            .iter()
            .map(|w| (w.matrix_size as u64).pow(2) * w.center_degree as u64)
            .sum();
        check(
            r.dim_check && total == d.dim_over_f(),
            format!("dimension identity fails for {d}"),
        )?;
        n += 1;
    }
    Ok(format!("sum d^2 [Z:F] = [E:F] |G| on all {n} grid cases"))
}

/// Oracle labels matched to formula labels through rho.
fn label_map(
    dec: &skewk_core::skewring::Decomposition,
    oracle_rho: &[GroupRingElem],
) -> Result<Vec<usize>, String> {
    oracle_rho
        .iter()
        .map(|r| {
            let chi: Character = r.support().first().cloned().ok_or("empty rho")?;
            dec.label_of(&chi).ok_or_else(|| "unmatched rho".to_string())
        })
        .collect()
}

fn criterion_3(report: &GridReport) -> Outcome {
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    for (ci, r) in report.results.iter().enumerate() {
        if compared(r) {
            for a in 0..r.factors {
                for b in a..r.factors {
                    pairs.push((ci, a, b));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    let sample: Vec<_> = pairs.choose_multiple(&mut rng, 200).cloned().collect();
    check(sample.len() == 200, format!("only {} pairs available", pairs.len()))?;
    let mut by_case: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (ci, a, b) in sample {
        by_case.entry(ci).or_default().push((a, b));
    }
    let cfg = OracleConfig::default();
    for (ci, ps) in &by_case {
        let d = desc_of(&report.results[*ci]);
        let dec = decompose(&d);
        let oracle = analyze(&d, &cfg).map_err(|e| format!("{d}: {e}"))?;
        let rhos: Vec<GroupRingElem> = oracle.factors.iter().map(|w| w.rho.clone()).collect();
        let to_formula = label_map(&dec, &rhos)?;
        let mut to_oracle = vec![0; to_formula.len()];
        for (o, &f) in to_formula.iter().enumerate() {
            to_oracle[f] = o;
        }
        let table = oracle.tensor.as_ref().ok_or("oracle computed no tensors")?;
        for &(a, b) in ps {
            let formula = tensor_decompose(&singleton(a), &singleton(b), &dec)
                .map_err(|e| e.to_string())?;
            let from_oracle: Multiset = table[to_oracle[a]][to_oracle[b]]
                .iter()
                .map(|(&z, &m)| (to_formula[z], m))
                .collect();
            check(formula == from_oracle, format!("{d}: V{a} (x) V{b} differs"))?;
            let residual = rho(&singleton(a), &dec)
                .and_then(|x| Ok(x.mul(&rho(&singleton(b), &dec)?)?))
                .and_then(|x| Ok(x.sub(&rho(&formula, &dec)?)?))
                .map_err(|e| e.to_string())?;
            check(residual.is_zero(), format!("{d}: nonzero residual for V{a} (x) V{b}"))?;
        }
    }
    Ok(format!(
        "200 seeded pairs over {} grid cases agree, residuals zero ({} pairs compared in the grid run)",
        by_case.len(),
        report.summary.tensor_pairs
    ))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let g = AbGroup::cyclic(3);
    let d = SkewRingDesc::group_ring(2, 1, g.clone()).map_err(|e| e.to_string())?;
    let dec = decompose(&d);
    let shapes: Vec<(u32, u32, u32)> = dec
        .factors
        .iter()
        .map(|w| (w.matrix_size, w.center_degree, w.multiplicity))
        .collect();
    check(shapes == [(1, 1, 1), (1, 2, 1)], format!("shapes {shapes:?}"))?;
    let chi = |a: u64| g.character(&[a]).expect("character");
    let rho0 = rho(&singleton(0), &dec).map_err(|e| e.to_string())?;
    let rho1 = rho(&singleton(1), &dec).map_err(|e| e.to_string())?;
    check(rho0 == GroupRingElem::basis(&g, chi(0)), "rho(1) is not chi_0")?;
    check(
        rho1 == GroupRingElem::from_terms(&g, [(chi(1), 1), (chi(2), 1)]),
        "rho(V) is not chi_1 + chi_2",
    )?;
    let k0 = k0_ring(&d).map_err(|e| e.to_string())?;
    check(
        k0.structure[1][1] == Multiset::from([(0, 2), (1, 1)]),
        "V (x) V is not 2 + V",
    )?;
    let oracle = analyze(&d, &OracleConfig::default()).map_err(|e| e.to_string())?;
    check(
        oracle.factors.len() == 2 && oracle.factors[1].rho == rho1,
        "oracle disagrees",
    )?;
    let t = start.elapsed();
    check(t < Duration::from_secs(1), format!("took {t:?}"))?;
    Ok(format!("F2[Z/3] = F2 x F4, V (x) V = 2 + V, {:.1} ms", t.as_secs_f64() * 1e3))
}

fn criterion_5() -> Outcome {
    let mut levels = 0;
    for (p, l) in [(7u64, 3u64), (2, 3), (3, 2)] {
        let mut top = 0;
        for i in 1..=5u32 {
            let lvl = tower_level(p, l, i).map_err(|e| format!("({p},{l},{i}): {e}"))?;
            let ord = mult_order(p, l.pow(i)).map_err(|e| e.to_string())?;
            check(lvl.i_prime == l_valuation(ord, l), format!("i' at ({p},{l},{i})"))?;
            check(i > lvl.i_prime, format!("i <= i' at ({p},{l},{i})"))?;
            check(lvl.all_singletons(), format!("non-singleton orbit at ({p},{l},{i})"))?;
            check(
                lvl.k0.rank() as u64 == l.pow(i) && lvl.k0.is_group_ring_of_characters(),
                format!("K0 is not Z[Z/{l}^{i}] at p={p}"),
            )?;
            levels += 1;
            top = i;
        }
        let c = colimit_k0(p, l, top).map_err(|e| e.to_string())?;
        for t in &c.transitions {
            check(t.is_injective(), format!("transition {}->{} not injective", t.from, t.to))?;
            check(c.is_ring_map(t), format!("transition {}->{} not a ring map", t.from, t.to))?;
        }
        for w in c.levels.windows(2) {
            check(
                w[1].k0.rank() == w[0].k0.rank() * l as usize,
                format!("basis does not grow by {l} at level {}", w[1].i),
            )?;
        }
        check(c.basis.len() as u64 == l.pow(top), "colimit basis size")?;
    }
    Ok(format!("{levels} tower levels, all transitions injective ring maps"))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let expected = |n: u32| -> LComplGroup {
        match n {
            0 => LComplGroup::zl(3),
            1 | 3 => LComplGroup::cyclic_power(3, 1).expect("small"),
            5 => LComplGroup::cyclic_power(3, 2).expect("small"),
            _ => LComplGroup::zero(3),
        }
    };
    for n in 0..=6 {
        let g = l_complete(&k_finite_field(7, n).map_err(|e| e.to_string())?, 3)
            .map_err(|e| e.to_string())?;
        check(g == expected(n), format!("pi_{n} = {g}"))?;
    }
    check(l_valuation_big(&BigUint::from(48u32), 3) == 1, "v_3(48)")?;
    check(l_valuation_big(&BigUint::from(342u32), 3) == 2, "v_3(342)")?;
    let t = start.elapsed();
    check(t < Duration::from_secs(1), format!("took {t:?}"))?;
    Ok("pi_1 = Z/3, pi_3 = Z/3, pi_5 = Z/9, even positive degrees 0".into())
}

fn criterion_7() -> Outcome {
    let r = verify_main(7, 3, 40).map_err(|e| e.to_string())?;
    check(r.verdict == Verdict::Pass, format!("verdict {}", r.verdict))?;
    check(r.rows.len() == 41 && r.rows.iter().all(|x| x.agree), "a degree disagrees")?;
    Ok("verify_main(7, 3, 40) PASS in all 41 degrees".into())
}

fn criterion_8() -> Outcome {
    let r = stability_check(2, 7, 6, 10).map_err(|e| e.to_string())?;
    let got: Vec<(u32, u32)> = r.flagged.iter().map(|f| (f.j, f.m)).collect();
    let mut want = Vec::new();
    for j in 1..=6u32 {
        let base = l_valuation_big(&(BigUint::from(2u32).pow(j) - 1u32), 7);
        for m in (1..=10u32).filter(|m| m % 7 != 0) {
            if l_valuation_big(&(BigUint::from(2u32).pow(m * j) - 1u32), 7) != base {
                want.push((j, m));
            }
        }
    }
    check(got == want, format!("flagged {got:?}, expected {want:?}"))?;
    check(got.contains(&(1, 3)), "(1, 3) not flagged")?;
    for n in [2, 10, 20] {
        let v = verify_main(2, 7, n).map_err(|e| e.to_string())?.verdict;
        check(v == Verdict::Conditional, format!("verify_main(2, 7, {n}) is {v}"))?;
    }
    Ok(format!("{} pairs flagged, exactly the valuation jumps; CONDITIONAL", got.len()))
}

fn criterion_9() -> Outcome {
    let mut windows = 0;
    for (p, l) in [(7u64, 3u64), (2, 3), (3, 2), (2, 7), (5, 3)] {
        for (t_min, t_max) in [(-8i64, 0i64), (-5, -2), (-1, 0), (0, 0)] {
            let page = e1_page(p, l, t_min, t_max).map_err(|e| e.to_string())?;
            for (&(s, t), g) in &page.entries {
                let on = s + 2 * t == 0 || s + 2 * t == 1;
                check(on || g.is_zero(), format!("entry off the diagonals at ({s},{t})"))?;
                if on {
                    // both diagonals carry pi_{-t} in row t
                    let same = page.entry(if s + 2 * t == 0 { s + 1 } else { s - 1 }, t);
                    check(same == Some(g), format!("diagonals differ in row {t}"))?;
                }
            }
            if t_max == 0 {
                check(
                    page.entry(0, 0) == Some(&LComplGroup::zl(l)),
                    "corner entry is not Z_l",
                )?;
            }
            windows += 1;
        }
    }
    Ok(format!("support on s + 2t in {{0, 1}} in {windows} windows; corner Z_l"))
}

fn run_bin(args: &[&str]) -> Result<(Vec<u8>, i32), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_skewk"))
        .args(args)
        .env_remove("SKEWK_FORMAT")
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.stdout, out.status.code().unwrap_or(-1)))
}

fn criterion_10() -> Outcome {
    let grid = [
        "oracle-grid", "--primes", "2,3,5", "--fmax", "1", "--nmax", "3", "--order-max", "9",
    ];
    let runs: &[&[&str]] = &[
        &["decompose", "-p", "5", "-n", "4", "-N", "3,3", "--theta", "0,1;2,0", "--oracle"],
        &["k0", "-p", "7", "-N", "2,4", "--json"],
        &["colimit", "-p", "2", "-l", "3", "--imax", "3"],
        &["verify-main", "-p", "7", "-l", "3", "--nmax", "12", "--e1", "4"],
        &grid,
    ];
    let mut bytes = 0;
    for args in runs {
        let a = run_bin(args)?;
        let b = run_bin(args)?;
        check(a == b, format!("`skewk {}` differs between runs", args.join(" ")))?;
        check(a.1 == 0, format!("`skewk {}` exited {}", args.join(" "), a.1))?;
        bytes += a.0.len();
    }
    // parallel grid output matches the sequential one
    let mut par = grid.to_vec();
    par.extend(["--threads", "4"]);
    let mut seq = grid.to_vec();
    seq.extend(["--threads", "1"]);
    check(run_bin(&par)? == run_bin(&seq)?, "grid output depends on thread count")?;
    Ok(format!("{} commands byte-identical across runs ({bytes} bytes), grid independent of threads", runs.len()))
}

fn main() {
    let start = Instant::now();
    let grid_start = Instant::now();
    let report = run_grid(&GridBounds::default(), &OracleConfig::default(), true);
    let grid_time = grid_start.elapsed();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("oracle equivalence on the grid", Box::new(|| criterion_1(&report, grid_time))),
        ("dimension identity", Box::new(|| criterion_2(&report))),
        ("rho multiplicativity", Box::new(|| criterion_3(&report))),
        ("classical group ring F2[Z/3]", Box::new(criterion_4)),
        ("tower reproduction", Box::new(criterion_5)),
        ("completed K-group table", Box::new(criterion_6)),
        ("main identity p=7 l=3", Box::new(criterion_7)),
        ("stability detector", Box::new(criterion_8)),
        ("E1 page shape", Box::new(criterion_9)),
        ("determinism", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria pass ({:.0}s)",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
