mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{brute_force_width, random_table, triple_holds};
use polyspace_core::bounds::{parse_bound_table, region_bounds, write_bound_table};
use polyspace_core::designspace::{
    check_feasibility, extremal_chord_search, generate_space, Extremum, IntRange,
};
use polyspace_core::emit::{pack_lut, parse_design_file, write_design_file};
use polyspace_core::explore::{
    max_linear_truncation, max_square_truncation, minimize_width, CandidateSet, SignClass,
    TruncationChoice, WidthPlan, WidthPlans,
};
use polyspace_core::verify::{check_hdl, naive_chord_search, oracle_space};
use polyspace_core::*;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn wide_k() -> GenerateOptions {
    GenerateOptions {
        k_max: Some(24),
        ..GenerateOptions::default()
    }
}

fn table_from_seed(seed: u64, bits: u32, out_bits: u32, slack: i64) -> BoundTable {
    random_table(&mut ChaCha8Rng::seed_from_u64(seed), bits, out_bits, slack)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn bound_table_text_roundtrip(seed in any::<u64>(), bits in 1u32..7, out in 2u32..9) {
        let t = table_from_seed(seed, bits, out, 2);
        prop_assert_eq!(parse_bound_table(&write_bound_table(&t)).unwrap(), t);
    }

    #[test]
    fn feasibility_is_monotone_in_r(seed in any::<u64>(), bits in 2u32..8, out in 3u32..9) {
        let t = table_from_seed(seed, bits, out, 1);
        let feasible: Vec<bool> = (0..=bits)
            .map(|r| check_feasibility(&t, r, SearchStrategy::SkipRule, false).unwrap().feasible())
            .collect();
        for r in 1..feasible.len() {
            prop_assert!(!feasible[r - 1] || feasible[r], "R={} feasible but R={} not", r - 1, r);
        }
    }

    #[test]
    fn catalog_is_monotone_in_k(seed in any::<u64>(), bits in 2u32..6, out in 3u32..7) {
        let t = table_from_seed(seed, bits, out, 1);
        let r = bits / 2;
        let opts = GenerateOptions::default();
        let Ok(k) = min_global_k(&t, r, &opts) else { return Ok(()) };
        let lo = generate_space(&t, r, k, &opts).unwrap();
        let hi = generate_space(&t, r, k + 1, &opts).unwrap();
        for (rl, rh) in lo.regions().iter().zip(hi.regions()) {
            for &(a, br) in rl.entries() {
                for b in br.iter().take(64) {
                    let c = rl.c_range(a, b);
                    prop_assert!(!c.is_empty());
                    prop_assert!(rh.c_range(2 * a, 2 * b).contains(2 * c.lo));
                }
            }
        }
    }

    #[test]
    fn catalog_matches_oracle(seed in any::<u64>(), bits in 4u32..7, out in 2u32..5, extra in 0u32..2) {
        let t = table_from_seed(seed, bits, out, 1);
        let r = bits / 2;
        let opts = GenerateOptions::default();
        let Ok(k0) = min_global_k(&t, r, &opts) else {
            return Ok(());
        };
        let k = (k0 + extra).min(4);
        let window = IntRange::new(-20, 20);
        let oracle = oracle_space(&t, r, k, window).unwrap();
        match generate_space(&t, r, k, &opts) {
            Ok(cat) => {
                for (rc, want) in cat.regions().iter().zip(&oracle) {
                    let got: std::collections::BTreeSet<_> = rc.triples_within(window).into_iter().collect();
                    prop_assert_eq!(&got, want);
                }
            }
            Err(Error::NoPolynomialAtShift { region, .. }) => {
                prop_assert!(oracle[region as usize].is_empty());
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn skip_rule_matches_full_scan(
        g in prop::collection::vec((-50i128..50, 1i128..9), 0..30),
        h in prop::collection::vec((-50i128..50, 1i128..9), 0..30),
        maximize in any::<bool>(),
    ) {
        let n = g.len().min(h.len());
        let g: Vec<Rational> = g[..n].iter().map(|&(a, b)| Rational::new(a, b)).collect();
        let h: Vec<Rational> = h[..n].iter().map(|&(a, b)| Rational::new(a, b)).collect();
        let mode = if maximize { Extremum::Max } else { Extremum::Min };
        let fast = extremal_chord_search(&g, &h, mode).map(|e| (e.value, e.x, e.y));
        prop_assert_eq!(fast, naive_chord_search(&g, &h, maximize));
    }

    #[test]
    fn width_matches_brute_force(
        sets in prop::collection::vec(prop::collection::vec(0u128..2000, 1..6), 1..6)
    ) {
        let r = minimize_width(&sets, 20);
        prop_assert_eq!((r.width, r.shift), brute_force_width(&sets, 20));
    }

    #[test]
    fn selected_designs_verify(seed in any::<u64>(), bits in 3u32..8, out in 3u32..9) {
        let t = table_from_seed(seed, bits, out, 1);
        let Some(r) = min_feasible_r(&t, bits - 1, SearchStrategy::SkipRule).unwrap() else {
            return Ok(());
        };
        let opts = BuildOptions { generate: wide_k(), ..BuildOptions::default() };
        let b = match build_design(&t, r, &opts) {
            Err(Error::ShiftLimit { .. }) => return Ok(()),
            other => other.unwrap(),
        };
        prop_assert!(b.report.passed(), "{}", b.report.to_text());
        prop_assert_eq!(b.hardware.unpack(), b.design.coefficients.clone());
        prop_assert_eq!(check_hdl(&b.hardware), Ok(()));
        let text = write_design_file(&b.hardware);
        prop_assert_eq!(parse_design_file(&text).unwrap(), b.hardware.clone());
        // selected triples belong to the untruncated catalog
        for (rc, &(a, bb, c)) in b.catalog.regions().iter().zip(&b.design.coefficients) {
            if b.design.truncation == TruncationChoice::default() {
                prop_assert!(rc.c_range(a, bb).contains(c));
            }
        }
    }

    #[test]
    fn truncations_are_maximal(seed in any::<u64>(), bits in 3u32..7, out in 3u32..8) {
        let t = table_from_seed(seed, bits, out, 1);
        let Some(r) = min_feasible_r(&t, bits - 1, SearchStrategy::SkipRule).unwrap() else {
            return Ok(());
        };
        let cat = match build_space(&t, r, &wide_k()) {
            Err(Error::ShiftLimit { .. }) => return Ok(()),
            other => other.unwrap(),
        };
        let set = CandidateSet::new(&cat, 1 << 12);
        let (i, after_i) = max_square_truncation(&set);
        let (j, after_j) = max_linear_truncation(&after_i);
        let mx = cat.offset_bits();
        if i < mx {
            let probe = TruncationChoice { square: i + 1, linear: 0 };
            prop_assert!(!set.truncation_valid(probe));
        }
        if j < mx {
            let probe = TruncationChoice { square: i, linear: j + 1 };
            prop_assert!(!after_i.truncation_valid(probe));
        }
        // brute force over every catalog triple and every (i', j')
        let k = cat.k();
        let best = |ti: u32, tj: u32| {
            cat.regions().iter().all(|rc| {
                let rb = region_bounds(&t, r, rc.region()).unwrap();
                rc.entries().iter().any(|&(a, br)| {
                    br.iter().any(|b| {
                        let cr = rc.c_range(a, b);
                        (cr.lo..cr.hi).any(|c| triple_holds(rb.lower, rb.upper, (a, b, c), k, ti, tj))
                    })
                })
            })
        };
        let brute_i = (0..=mx).rev().find(|&ti| best(ti, 0)).unwrap();
        prop_assert_eq!(i, brute_i);
        let brute_j = (0..=mx).rev().find(|&tj| {
            // the linear step only keeps triples surviving the square step
            cat.regions().iter().zip(after_i.regions()).all(|(rc, cand)| {
                let rb = region_bounds(&t, r, rc.region()).unwrap();
                cand.rows.iter().any(|row| {
                    (row.c.lo..row.c.hi).any(|c| triple_holds(rb.lower, rb.upper, (row.a, row.b, c), k, i, tj))
                })
            })
        }).unwrap();
        prop_assert_eq!(j, brute_j);
        prop_assert!(after_j.all_nonempty());
    }

    #[test]
    fn pack_unpack_identity(
        classes in prop::collection::vec(0u8..3, 3),
        shifts in prop::collection::vec(0u32..4, 3),
        widths in prop::collection::vec(0u32..6, 3),
        picks in prop::collection::vec(prop::collection::vec(any::<u32>(), 3), 4),
    ) {
        let plans: Vec<WidthPlan> = (0..3).map(|i| WidthPlan {
            class: [SignClass::NonNegative, SignClass::NonPositive, SignClass::Mixed][classes[i] as usize],
            shift: shifts[i],
            width: widths[i],
        }).collect();
        let plans = WidthPlans { a: plans[0], b: plans[1], c: plans[2] };
        let value = |p: WidthPlan, pick: u32| -> i128 {
            let top = (1i128 << p.width) - 1;
            let j = pick as i128 % (top + 1);
            let j = match p.class {
                SignClass::NonNegative => j,
                SignClass::NonPositive => -j,
                SignClass::Mixed => if pick.is_multiple_of(2) { j } else { -j },
            };
            j << p.shift
        };
        let coefficients: Vec<(i128, i128, i128)> = picks.iter().map(|p| (
            value(plans.a, p[0]), value(plans.b, p[1]), value(plans.c, p[2])
        )).collect();
        let design = SelectedDesign {
            input: FixedFormat::new(0, 4).unwrap(),
            output: FixedFormat::new(0, 6).unwrap(),
            lookup_bits: 2,
            k: 1,
            truncation: TruncationChoice::default(),
            plans,
            coefficients: coefficients.clone(),
            constant_msbs: (0, 0),
            catalog_truncated: false,
        };
        let hw = pack_lut(&design).unwrap();
        prop_assert_eq!(hw.unpack(), coefficients);
        prop_assert_eq!(parse_design_file(&write_design_file(&hw)).unwrap(), hw.clone());
        let mut in_range = true;
        for z in 0..16u64 {
            let (a, b, c) = hw.coefficients((z >> 2) as usize);
            let x = (z & 3) as i128;
            let v = a * x * x + b * x + c;
            let y = evaluate(&hw, z);
            prop_assert!(2 * y <= v && v < 2 * (y + 1));
            in_range &= (0..64).contains(&y);
        }
        if in_range {
            prop_assert_eq!(check_hdl(&hw), Ok(()));
        }
    }
}

#[test]
fn strict_bounds_integerize_outward() {
    // a strictly above 3/2 * 2^k: smallest integer is floor + 1
    let q = Rational::new(3, 2);
    assert_eq!(q.int_above_scaled(1), 4);
    assert_eq!(q.int_below_scaled(1), 2);
    assert_eq!(q.int_above_scaled(0), 2);
    assert_eq!(q.int_below_scaled(0), 1);
    let w = Rational::new(-7, 3);
    assert_eq!(w.int_above_scaled(0), -2);
    assert_eq!(w.int_below_scaled(0), -3);
}
