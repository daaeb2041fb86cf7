//! Property suites: the fast reduction classification against the full
//! algorithm, point counts against the naive oracle, conductor invariance
//! under changes of variables, and coefficient-table invariants.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;
use rayon::prelude::*;

use ltaylor::arith::primes_up_to;
use ltaylor::coeffs::{ap_good, count_points_naive, curve_coefficients};
use ltaylor::curve::{
    conductor, conductor_with_local_data, minimal_model, tate_local, tate_local_full,
    WeierstrassCurve,
};
use ltaylor::fixtures::CATALOG;

fn lcg(state: &mut u64) -> u64 {
    *state = state
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    *state
}

fn random_curve(state: &mut u64, span: i64) -> Option<WeierstrassCurve> {
    let mut draw = |s: i64| (lcg(state) % (2 * s as u64 + 1)) as i64 - s;
    WeierstrassCurve::new([draw(2), draw(3), draw(3), draw(span), draw(span)]).ok()
}

#[test]
fn fast_path_agrees_with_full_tate_on_random_curves() {
    let primes = [5u64, 7, 11, 13, 17, 19, 23];
    let mut state = 0x7a7e_0001u64;
    let mut cases = Vec::new();
    while cases.len() < 1000 {
        let Some(e) = random_curve(&mut state, 40) else { continue };
        let p = primes[(lcg(&mut state) % primes.len() as u64) as usize];
        cases.push((e, p));
    }
    cases.par_iter().for_each(|(e, p)| {
        match (tate_local(e, *p), tate_local_full(e, *p)) {
            (Ok(fast), Ok(full)) => assert_eq!(fast, full, "{e} at p = {p}"),
            (Err(_), Err(_)) => {} // both detected non-minimality
            (a, b) => panic!("{e} at p = {p}: fast {a:?} vs full {b:?}"),
        }
    });
}

#[test]
fn fast_path_agrees_with_full_tate_on_additive_families() {
    // Constructed models with prescribed p-divisibility hit the whole range
    // of additive fibre types at p >= 5.
    let mut seen = BTreeSet::new();
    for p in [5u64, 7, 13] {
        let pi = p as i64;
        for e2 in 0..3u32 {
            for e4 in 1..5u32 {
                for e6 in 2..7u32 {
                    for (u2, u4, u6) in [(1i64, 1i64, 1i64), (0, 1, 1), (1, 0, 1), (2, 1, 3)] {
                        let a = [
                            0,
                            u2 * pi.pow(e2),
                            0,
                            u4 * pi.pow(e4),
                            u6 * pi.pow(e6),
                        ];
                        let Ok(e) = WeierstrassCurve::new(a) else { continue };
                        match (tate_local(&e, p), tate_local_full(&e, p)) {
                            (Ok(fast), Ok(full)) => {
                                assert_eq!(fast, full, "{a:?} at p = {p}");
                                seen.insert(format!("{}", fast.kodaira));
                            }
                            (Err(_), Err(_)) => {}
                            (x, y) => panic!("{a:?} at p = {p}: fast {x:?} vs full {y:?}"),
                        }
                    }
                }
            }
        }
    }
    // The sweep must exercise a representative spread of fibre types.
    assert!(
        seen.len() >= 6,
        "only saw Kodaira types {seen:?}; families too narrow"
    );
}

#[test]
fn point_counts_match_naive_oracle_on_100_curves() {
    let primes: Vec<u64> = primes_up_to(500).into_iter().filter(|&p| p >= 5).collect();
    let mut state = 0xbead_5eedu64;
    let mut curves = Vec::new();
    while curves.len() < 100 {
        if let Some(e) = random_curve(&mut state, 30) {
            curves.push(e);
        }
    }
    curves.par_iter().for_each(|e| {
        for &p in &primes {
            let Ok(via_sum) = ap_good(e, p) else { continue };
            let via_count = p as i64 + 1 - count_points_naive(e, p) as i64;
            assert_eq!(via_sum, via_count, "{e} at p = {p}");
            assert!(via_sum * via_sum <= 4 * p as i64, "Hasse at {p} for {e}");
        }
    });
}

#[test]
fn conductor_is_invariant_under_changes_of_variables() {
    let mut state = 0xc0d0c70f00du64;
    for fx in CATALOG.iter().filter(|f| f.conductor <= 100) {
        let e = fx.curve();
        let base = conductor(&e).unwrap();
        for _ in 0..4 {
            let k = 1 + (lcg(&mut state) % 3) as i64;
            let r = (lcg(&mut state) % 11) as i64 - 5;
            let s = (lcg(&mut state) % 11) as i64 - 5;
            let t = (lcg(&mut state) % 11) as i64 - 5;
            let moved = e
                .scale_up(&BigInt::from(k))
                .translate(&BigInt::from(r), &BigInt::from(s), &BigInt::from(t));
            let n = conductor(&moved).unwrap();
            assert_eq!(
                n, base,
                "{}: transform (1/{k}, {r}, {s}, {t}) changed the conductor",
                fx.label
            );
        }
    }
}

#[test]
fn minimal_disc_divides_original_with_twelfth_power_quotient() {
    let mut state = 0xdeadbeefu64;
    let mut checked = 0;
    while checked < 50 {
        let Some(e) = random_curve(&mut state, 20) else { continue };
        let k = 1 + (lcg(&mut state) % 3);
        let blown = e.scale_up(&BigInt::from(k));
        let m = minimal_model(&blown).unwrap();
        let quotient = &blown.disc / &m.curve.disc;
        assert_eq!(quotient, m.transform.u.pow(12));
        assert!(m.curve.disc.abs() <= blown.disc.abs());
        let again = minimal_model(&m.curve).unwrap();
        assert!(again.transform.is_identity());
        checked += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Multiplicativity and the Hecke recursion hold on tables generated
    /// from random nonsingular curves.
    #[test]
    fn coefficient_table_invariants(
        a1 in -2i64..3,
        a2 in -3i64..4,
        a3 in -3i64..4,
        a4 in -20i64..21,
        a6 in -20i64..21,
        m_pick in 0usize..2,
    ) {
        let m = [120usize, 210][m_pick];
        let Ok(e) = WeierstrassCurve::new([a1, a2, a3, a4, a6]) else {
            return Ok(());
        };
        let Ok((cond, locals)) = conductor_with_local_data(&e) else {
            return Ok(());
        };
        let minimal = minimal_model(&e).unwrap().curve;
        let table = curve_coefficients(&minimal, &locals, m).unwrap();
        prop_assert_eq!(table.get(1), 1);
        let bad: Vec<u64> = cond.factorization.iter().map(|&(p, _)| p).collect();
        for &p in primes_up_to(m).iter() {
            let ap = table.get(p as usize);
            prop_assert!(ap * ap <= 4 * p as i64, "Hasse at {}", p);
            // Hecke recursion at good primes: a_{p^2} = a_p^2 - p.
            if !bad.contains(&p) && (p * p) as usize <= m {
                prop_assert_eq!(table.get((p * p) as usize), ap * ap - p as i64);
            }
        }
        // Multiplicativity across random-ish coprime pairs.
        for u in 2..=m {
            let v = m / u;
            if v >= 2 && ltaylor::arith::gcd_u64(u as u64, v as u64) == 1 {
                prop_assert_eq!(table.get(u * v), table.get(u) * table.get(v));
            }
        }
    }
}
