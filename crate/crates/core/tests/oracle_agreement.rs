use skewk_core::abgroup::{AbGroup, Automorphism};
use skewk_core::oracle::{analyze, compare, OracleConfig};
use skewk_core::skewring::{decompose, k0_ring, SkewRingDesc};

fn desc(p: u64, f: u32, n: u32, factors: &[u32], theta: Vec<Vec<u64>>) -> SkewRingDesc {
    let g = AbGroup::new(factors.to_vec()).unwrap();
    let theta = if theta.is_empty() {
        Automorphism::identity(&g)
    } else {
        Automorphism::new(g.clone(), theta).unwrap()
    };
    SkewRingDesc::new(p, f, n, g, theta).unwrap()
}

fn assert_agree(d: &SkewRingDesc) {
    let dec = decompose(d);
    let k0 = k0_ring(d).unwrap();
    let report = analyze(d, &OracleConfig::default()).unwrap();
    let a = compare(&dec, Some(&k0), &report);
    assert!(a.all(), "{d}: {:?}", a.notes);
    assert_eq!(report.algebra_dim as u64, d.dim_over_f());
    let center: u32 = dec.factors.iter().map(|w| w.center_degree).sum();
    assert_eq!(report.center_dim, center as usize);
}

#[test]
fn group_rings() {
    assert_agree(&desc(2, 1, 1, &[3], vec![]));
    assert_agree(&desc(3, 1, 1, &[2, 4], vec![]));
    assert_agree(&desc(2, 2, 1, &[15], vec![]));
}

#[test]
fn twisted_actions() {
    assert_agree(&desc(2, 1, 2, &[3], vec![vec![2]]));
    assert_agree(&desc(5, 1, 2, &[3, 3], vec![vec![0, 1], vec![1, 0]]));
    assert_agree(&desc(7, 1, 4, &[5], vec![vec![2]]));
    assert_agree(&desc(3, 2, 3, &[7], vec![vec![2]]));
}

#[test]
fn p_dividing_n() {
    // only |N| has to be prime to p
    assert_agree(&desc(2, 1, 2, &[5], vec![vec![4]]));
    assert_agree(&desc(3, 1, 3, &[2, 2], vec![vec![0, 1], vec![1, 1]]));
}

#[test]
fn polynomial_arithmetic_above_table_bound() {
    // E = GF(7^8) is beyond the default table size
    assert_agree(&desc(7, 2, 4, &[5], vec![vec![2]]));
}

#[test]
fn dimension_bound_is_enforced() {
    let cfg = OracleConfig {
        max_dim: 8,
        ..OracleConfig::default()
    };
    assert!(analyze(&desc(2, 1, 1, &[3, 3], vec![]), &cfg).is_err());
}
