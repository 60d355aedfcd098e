//! Independent oracles shared by the property and acceptance suites. None of
//! them call the code they check.

#![allow(dead_code)]

pub mod golden;

use std::collections::HashMap;

use fuplab::interval::rat;
use fuplab::weights::WeightFunction;
use fuplab::{Interval, IntervalSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Longest gap of the complement of `pairs` inside `[lo, hi]` (pairs sorted and disjoint).
pub fn largest_gap(pairs: &[(f64, f64)], lo: f64, hi: f64) -> f64 {
    let mut best: f64 = 0.0;
    let mut cursor = lo;
    for &(a, b) in pairs {
        if b < lo {
            continue;
        }
        if a > hi {
            break;
        }
        best = best.max(a.min(hi) - cursor);
        cursor = cursor.max(b);
    }
    best.max(hi - cursor)
}

/// Scans windows on a mesh of lengths and positions (plus every endpoint-aligned
/// position) and returns one whose largest gap is below `nu·L − slack`.
pub fn scan_deficient(pairs: &[(f64, f64)], nu: f64, a0: f64, a1: f64, slack: f64) -> Option<(f64, f64)> {
    if pairs.is_empty() {
        return None;
    }
    let lo = pairs[0].0;
    let hi = pairs[pairs.len() - 1].1;
    let mut lengths: Vec<f64> = (0..=48).map(|i| a0 * (a1 / a0).powf(i as f64 / 48.0)).collect();
    lengths.push(a1);
    for &l in &lengths {
        let mut xs: Vec<f64> = (0..=400).map(|i| lo - l + (hi - lo + l) * i as f64 / 400.0).collect();
        for &(a, b) in pairs {
            xs.extend([a - l, a, b - l, b]);
        }
        for x in xs {
            if largest_gap(pairs, x, x + l) < nu * l - slack {
                return Some((x, l));
            }
        }
    }
    None
}

/// Exhaustive minimal covering of sorted closed pieces by closed intervals of
/// length `len`. Some optimal cover has every left edge at `a_i + j·len`, so the
/// search branches over all such candidates that cover the first uncovered point.
pub fn min_cover_exhaustive(pieces: &[(f64, f64)], len: f64) -> usize {
    let mut cands: Vec<f64> = Vec::new();
    let lo = pieces.first().map_or(0.0, |p| p.0);
    let hi = pieces.last().map_or(0.0, |p| p.1);
    for &(a, _) in pieces {
        let mut s = a;
        while s <= hi {
            cands.push(s);
            s += len;
        }
    }
    for &(_, b) in pieces {
        cands.push(b - len);
    }
    cands.retain(|&s| s + len >= lo);
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    assert!(cands.len() <= 1 << 10, "too many candidates for the oracle");
    let mut memo = HashMap::new();
    solve(pieces, len, f64::NEG_INFINITY, &cands, &mut memo)
}

fn first_uncovered(pieces: &[(f64, f64)], reach: f64) -> Option<f64> {
    pieces.iter().find_map(|&(a, b)| {
        if b <= reach {
            None
        } else if a > reach {
            Some(a)
        } else {
            // (reach, b] is uncovered; any window covering it must start at or before reach
            Some(reach)
        }
    })
}

fn solve(pieces: &[(f64, f64)], len: f64, reach: f64, cands: &[f64], memo: &mut HashMap<u64, usize>) -> usize {
    let Some(u) = first_uncovered(pieces, reach) else {
        return 0;
    };
    if let Some(&v) = memo.get(&reach.to_bits()) {
        return v;
    }
    let strict = u == reach;
    let mut best = usize::MAX;
    for &s in cands {
        let covers = if strict {
            s <= u && s + len > u
        } else {
            s <= u && s + len >= u
        };
        if covers {
            let next = s + len;
            if next > reach {
                best = best.min(1 + solve(pieces, len, next, cands, memo));
            }
        }
    }
    memo.insert(reach.to_bits(), best);
    best
}

/// Adaptive Simpson quadrature.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `∫ w/(1+ξ²)` by quadrature over each segment, with the evaluation done
/// independently of the library's `eval`.
pub fn poisson_quadrature(w: &WeightFunction) -> f64 {
    let mut total = 0.0;
    for i in 1..w.xs.len() {
        let (a, b) = (w.xs[i - 1], w.xs[i]);
        if b <= a {
            continue;
        }
        let (ya, yb) = (w.ys[i - 1], w.ys[i]);
        let f = |x: f64| (ya + (yb - ya) * (x - a) / (b - a)) / (1.0 + x * x);
        total += simpson(&f, a, b, 1e-14 * (b - a).max(1.0));
    }
    total
}

/// Random union of at most `max` closed intervals with dyadic endpoints in `[0,1]`.
pub fn random_set(rng: &mut ChaCha8Rng, max: usize) -> IntervalSet {
    let count = rng.gen_range(1..=max);
    let den = 1i64 << 12;
    let mut ivs = Vec::with_capacity(count);
    for _ in 0..count {
        let a = rng.gen_range(0..den);
        let w = rng.gen_range(0..=den / (4 * count as i64).max(1));
        let b = (a + w).min(den);
        ivs.push(Interval {
            lo: rat(a, den),
            hi: rat(b, den),
        });
    }
    IntervalSet::from_intervals(ivs)
}

/// One to three clusters, each a short interval of length `2^{-12}`, spaced at
/// least 1/2 apart: the only shape a set can have if it is `0.4`-porous on
/// scales `2^{-8}` to 1.
pub fn cluster_set(seed: u64) -> IntervalSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let den = 1i64 << 12;
    let k = rng.gen_range(1..=3);
    let starts: Vec<i64> = match k {
        1 => vec![rng.gen_range(0..den)],
        2 => {
            let a = rng.gen_range(0..den / 4);
            vec![a, rng.gen_range(a + den / 2..den)]
        }
        _ => vec![
            rng.gen_range(0..den / 64),
            rng.gen_range(den / 2 - den / 64..den / 2),
            rng.gen_range(den - den / 32..den),
        ],
    };
    IntervalSet::from_intervals(
        starts
            .into_iter()
            .map(|a| Interval {
                lo: rat(a, den),
                hi: rat(a + 1, den),
            })
            .collect(),
    )
}
