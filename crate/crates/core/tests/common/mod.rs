#![allow(dead_code)]

use rand::Rng;

use polyspace_core::{BoundTable, FixedFormat};

/// Bounds around a random quadratic plus a sine wiggle on `bits` input bits and `out_bits`
/// output bits, widened by up to `slack` on each side.
pub fn random_table<R: Rng>(rng: &mut R, bits: u32, out_bits: u32, slack: i64) -> BoundTable {
    let n = 1i64 << bits;
    let max = (1i64 << out_bits) - 1;
    let lo = rng.gen_range(0.0..max as f64 / 2.0);
    let hi = rng.gen_range(lo..max as f64);
    let bend = rng.gen_range(-0.5..0.5) * (hi - lo);
    let wiggle = rng.gen_range(0.0..2.5);
    let freq = rng.gen_range(1.0..4.0) * std::f64::consts::PI;
    let mut lower = Vec::with_capacity(n as usize);
    let mut upper = Vec::with_capacity(n as usize);
    for z in 0..n {
        let t = z as f64 / n as f64;
        let y = lo + (hi - lo) * t + bend * t * (1.0 - t) + wiggle * (freq * t).sin();
        let y = (y.round() as i64).clamp(0, max);
        lower.push((y - rng.gen_range(0..=slack)).max(0));
        upper.push((y + rng.gen_range(0..=slack)).min(max));
    }
    BoundTable::new(
        FixedFormat::new(0, bits).unwrap(),
        FixedFormat::new(0, out_bits).unwrap(),
        lower,
        upper,
    )
    .unwrap()
}

/// `floor((a x_t^2 + b x_j + c) / 2^k)` stays within the region bounds for
/// every offset.
pub fn triple_holds(
    lower: &[i64],
    upper: &[i64],
    (a, b, c): (i128, i128, i128),
    k: u32,
    square_trunc: u32,
    linear_trunc: u32,
) -> bool {
    lower.iter().zip(upper).enumerate().all(|(x, (&l, &u))| {
        let xt = (x >> square_trunc << square_trunc) as i128;
        let xj = (x >> linear_trunc << linear_trunc) as i128;
        let y = (a * xt * xt + b * xj + c).div_euclid(1 << k);
        l as i128 <= y && y <= u as i128
    })
}

fn tz(s: u128, cap: u32) -> u32 {
    if s == 0 {
        cap
    } else {
        s.trailing_zeros().min(cap)
    }
}

/// Smallest `P` over shifts `t <= T` such that every set holds some `s`
/// divisible by `2^t` with `s >> t < 2^P`; returns `(P, smallest t)`.
pub fn brute_force_width(sets: &[Vec<u128>], cap: u32) -> (u32, u32) {
    let big_t = sets
        .iter()
        .map(|s| s.iter().map(|&v| tz(v, cap)).max().unwrap())
        .min()
        .unwrap();
    let mut best: Option<(u32, u32)> = None;
    for t in 0..=big_t {
        let p = (0..=128u32)
            .find(|&p| {
                sets.iter().all(|s| {
                    s.iter()
                        .any(|&v| tz(v, cap) >= t && (p >= 128 || (v >> t) < (1u128 << p)))
                })
            })
            .unwrap();
        if best.is_none_or(|(bp, _)| p < bp) {
            best = Some((p, t));
        }
    }
    best.unwrap()
}
