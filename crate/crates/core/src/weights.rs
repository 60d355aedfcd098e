//! Dyadic band coverings of `Ỹ = h^{-1}Y`, the piecewise-linear weight `w`
//! built from them and its Poisson integral `∫ w/(1+ξ²)`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::interval::{rat, rat_int, to_f64, Interval, IntervalSet};
use crate::theta::ThetaWeight;

/// One dyadic frequency band `J_k` and its greedy covering.
#[derive(Clone, Debug, PartialEq)]
pub struct Band {
    pub k: u32,
    /// `2^k θ(2^k)`
    pub length: f64,
    /// Components of `Ỹ ∩ J_k`, in order.
    pub pieces: Vec<(f64, f64)>,
    /// Left edges of the covering intervals `J_{kℓ} = [s, s + length]`.
    pub starts: Vec<f64>,
}

impl Band {
    pub fn count(&self) -> usize {
        self.starts.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoveringReport {
    pub k_max: u32,
    pub theta: ThetaWeight,
    pub bands: Vec<Band>,
    /// Least-squares slope of `log N_k` against `−log θ(2^k)` over bands with `N_k > 0`.
    pub slope: f64,
    /// Smallest `C` with `N_k ≤ C θ(2^k)^{−(1−ε)}` for every band.
    pub c_fit: f64,
}

/// `J_0 = [−1,1]`, `J_k = [−2^k, −2^{k−1}] ∪ [2^{k−1}, 2^k]`.
pub fn band_components(k: u32) -> Vec<Interval> {
    if k == 0 {
        return vec![Interval {
            lo: rat_int(-1),
            hi: rat_int(1),
        }];
    }
    let a = rat(1i64 << (k - 1), 1);
    let b = rat(1i64 << k, 1);
    vec![
        Interval {
            lo: -b.clone(),
            hi: -a.clone(),
        },
        Interval { lo: a, hi: b },
    ]
}

/// Greedy left-to-right covering of sorted closed pieces by closed intervals of
/// a fixed length; each new interval starts at the leftmost uncovered point.
pub fn greedy_cover(pieces: &[(f64, f64)], length: f64) -> Vec<f64> {
    let mut starts = Vec::new();
    let mut reach = f64::NEG_INFINITY;
    for &(a, b) in pieces {
        if a > reach {
            starts.push(a);
            reach = a + length;
        }
        while reach < b {
            starts.push(reach);
            reach += length;
        }
    }
    starts
}

/// Minimal coverings of `Ỹ ∩ J_k` for `k = 0..=K` by intervals of length
/// `2^k θ(2^k)`, with the covering-number fit against `θ(2^k)^{−(1−ε)}`.
pub fn cover_bands(ytilde: &IntervalSet, k_max: u32, theta: &ThetaWeight) -> Result<CoveringReport> {
    if k_max > 60 {
        return Err(Error::InvalidParameter("K above 60 is not supported".into()));
    }
    let mut bands = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        let scale = (k as f64).exp2();
        let length = scale * theta.eval(scale);
        let window = IntervalSet::from_intervals(band_components(k));
        let pieces: Vec<(f64, f64)> = ytilde
            .intersect(&window)
            .intervals()
            .iter()
            .map(|iv| (to_f64(&iv.lo), to_f64(&iv.hi)))
            .collect();
        let starts = greedy_cover(&pieces, length);
        bands.push(Band {
            k,
            length,
            pieces,
            starts,
        });
    }
    let exponent = 1.0 - theta.epsilon;
    let pts: Vec<(f64, f64)> = bands
        .iter()
        .filter(|b| b.count() > 0)
        .map(|b| (-theta.eval((b.k as f64).exp2()).ln(), (b.count() as f64).ln()))
        .collect();
    let slope = if pts.len() >= 2 {
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        crate::operator::least_squares(&xs, &ys).0
    } else {
        0.0
    };
    let c_fit = bands
        .iter()
        .map(|b| b.count() as f64 * theta.eval((b.k as f64).exp2()).powf(exponent))
        .fold(0.0, f64::max);
    Ok(CoveringReport {
        k_max,
        theta: *theta,
        bands,
        slope,
        c_fit,
    })
}

impl CoveringReport {
    pub fn counts(&self) -> Vec<usize> {
        self.bands.iter().map(Band::count).collect()
    }

    /// `Σ_k N_k θ(2^k)²`
    pub fn surrogate_sum(&self) -> f64 {
        self.bands
            .iter()
            .map(|b| b.count() as f64 * self.theta.eval((b.k as f64).exp2()).powi(2))
            .sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,theta,Nk,bound\n");
        let exponent = 1.0 - self.theta.epsilon;
        for b in &self.bands {
            let th = self.theta.eval((b.k as f64).exp2());
            let _ = writeln!(
                out,
                "{},{:.12e},{},{:.12e}",
                b.k,
                th,
                b.count(),
                self.c_fit * th.powf(-exponent)
            );
        }
        let _ = writeln!(
            out,
            "# slope={:.6},one_minus_eps={:.6},C={:.6}",
            self.slope, exponent, self.c_fit
        );
        out
    }
}

/// Continuous piecewise-linear function, zero outside `[xs[0], xs[last]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightFunction {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl WeightFunction {
    pub fn zero() -> Self {
        WeightFunction {
            xs: Vec::new(),
            ys: Vec::new(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if n == 0 || x < self.xs[0] || x > self.xs[n - 1] {
            return 0.0;
        }
        let i = self.xs.partition_point(|&p| p <= x);
        if i == 0 {
            return self.ys[0];
        }
        if i == n {
            return self.ys[n - 1];
        }
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (y0, y1) = (self.ys[i - 1], self.ys[i]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Largest `|w′|` over the segments.
    pub fn slope_bound(&self) -> f64 {
        self.segments()
            .map(|(x0, y0, x1, y1)| ((y1 - y0) / (x1 - x0)).abs())
            .fold(0.0, f64::max)
    }

    fn segments(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .filter(|(x, _)| x[1] > x[0])
            .map(|(x, y)| (x[0], y[0], x[1], y[1]))
    }

    /// Pointwise maximum; crossings inside a segment become breakpoints.
    pub fn max(&self, other: &WeightFunction) -> WeightFunction {
        combine(self, other, f64::max)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("weight v1\n");
        for (x, y) in self.xs.iter().zip(&self.ys) {
            let _ = writeln!(out, "{x:?} {y:?}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("weight v1") {
            return Err(Error::Parse {
                line: 1,
                message: "expected header 'weight v1'".into(),
            });
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|v| v.parse().ok()).ok_or_else(|| Error::Parse {
                    line: i + 2,
                    message: format!("expected two numbers, got '{line}'"),
                })
            };
            let mut it = line.split_whitespace();
            let x = parse(it.next())?;
            let y = parse(it.next())?;
            if xs.last().is_some_and(|&p| x < p) {
                return Err(Error::Parse {
                    line: i + 2,
                    message: "breakpoints must be nondecreasing".into(),
                });
            }
            xs.push(x);
            ys.push(y);
        }
        Ok(WeightFunction { xs, ys })
    }
}

fn combine(a: &WeightFunction, b: &WeightFunction, op: fn(f64, f64) -> f64) -> WeightFunction {
    let mut xs: Vec<f64> = a.xs.iter().chain(&b.xs).copied().collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.is_empty() {
        return WeightFunction::zero();
    }
    // also break at the support edges of each operand, where it jumps to zero only if nonzero there
    let mut out_x = Vec::with_capacity(xs.len() * 2);
    let mut out_y = Vec::with_capacity(xs.len() * 2);
    for (i, &x) in xs.iter().enumerate() {
        if i > 0 {
            let x0 = xs[i - 1];
            let (da0, da1) = (a.eval(x0) - b.eval(x0), a.eval(x) - b.eval(x));
            if da0 * da1 < 0.0 {
                let c = x0 + (x - x0) * da0 / (da0 - da1);
                if c > x0 && c < x {
                    out_x.push(c);
                    out_y.push(op(a.eval(c), b.eval(c)));
                }
            }
        }
        out_x.push(x);
        out_y.push(op(a.eval(x), b.eval(x)));
    }
    WeightFunction { xs: out_x, ys: out_y }
}

/// Sum of trapezoids given as `(plateau_lo, plateau_hi, height, ramp)`.
fn trapezoid_sum(bumps: &[(f64, f64, f64, f64)], factor: f64) -> WeightFunction {
    let mut xs: Vec<f64> = bumps
        .iter()
        .flat_map(|&(lo, hi, _, ramp)| [lo - ramp, lo, hi, hi + ramp])
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let eval = |x: f64| -> f64 {
        bumps
            .iter()
            .map(|&(lo, hi, h, ramp)| {
                if x < lo - ramp || x > hi + ramp {
                    0.0
                } else if x < lo {
                    h * (x - (lo - ramp)) / ramp
                } else if x > hi {
                    h * ((hi + ramp) - x) / ramp
                } else {
                    h
                }
            })
            .sum::<f64>()
            * factor
    };
    let ys = xs.iter().map(|&x| eval(x)).collect();
    WeightFunction { xs, ys }
}

/// Parameters of [`build_weight`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightConfig {
    /// Ramp width as a fraction of the plateau value, in `[1/100, 1]`.
    pub ramp_fraction: f64,
    /// Half-width `C₀` of the low-frequency patch.
    pub patch_radius: f64,
    /// Mesh of the patch envelope.
    pub patch_mesh: f64,
}

impl Default for WeightConfig {
    fn default() -> Self {
        WeightConfig {
            ramp_fraction: 1.0,
            patch_radius: 32.0,
            patch_mesh: 1.0 / 64.0,
        }
    }
}

/// Even piecewise-linear upper envelope of `|ξ|θ(ξ)` on `[−C₀, C₀]`: on each
/// mesh cell it takes the target's value one cell further out, which dominates
/// since `ξθ(ξ)` increases; beyond `C₀` it ramps down with slope 1.
pub fn low_frequency_patch(theta: &ThetaWeight, radius: f64, mesh: f64) -> WeightFunction {
    let steps = (radius / mesh).ceil() as usize;
    let f = |x: f64| x * theta.eval(x);
    let mut right_x = Vec::with_capacity(steps + 2);
    let mut right_y = Vec::with_capacity(steps + 2);
    for i in 0..=steps {
        let x = i as f64 * mesh;
        right_x.push(x);
        right_y.push(f(x + mesh));
    }
    let top = *right_y.last().unwrap();
    right_x.push(steps as f64 * mesh + top);
    right_y.push(0.0);
    let mut xs: Vec<f64> = right_x.iter().rev().map(|x| -x).collect();
    let mut ys: Vec<f64> = right_y.iter().rev().copied().collect();
    xs.pop();
    ys.pop();
    xs.extend(right_x);
    ys.extend(right_y);
    WeightFunction { xs, ys }
}

/// `w = max(10 Σ_{k,ℓ} w_{kℓ}, patch)` with trapezoids of plateau height
/// `2^kθ(2^k)` on `±J_{kℓ}`.
pub fn build_weight(report: &CoveringReport, cfg: &WeightConfig) -> Result<WeightFunction> {
    if !(0.01..=1.0).contains(&cfg.ramp_fraction) {
        return Err(Error::InvalidParameter("ramp fraction must lie in [1/100, 1]".into()));
    }
    let mut bumps = Vec::new();
    for b in &report.bands {
        let ramp = b.length * cfg.ramp_fraction;
        for &s in &b.starts {
            bumps.push((s, s + b.length, b.length, ramp));
            bumps.push((-s - b.length, -s, b.length, ramp));
        }
    }
    bumps.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    bumps.dedup();
    let sum = trapezoid_sum(&bumps, 10.0);
    let patch = low_frequency_patch(&report.theta, cfg.patch_radius, cfg.patch_mesh);
    Ok(sum.max(&patch))
}

/// Points checked per segment on top of the breakpoints.
pub const CHECK_DENSITY: usize = 64;

/// `w(ξ) ≥ |ξ|θ(ξ)` on `Ỹ`, checked at breakpoints, interval ends and a dense
/// grid; returns the first failing `ξ`.
pub fn check_weight(w: &WeightFunction, ytilde: &IntervalSet, theta: &ThetaWeight) -> std::result::Result<(), f64> {
    let target = |x: f64| x.abs() * theta.eval(x);
    for iv in ytilde.intervals() {
        let (a, b) = (to_f64(&iv.lo), to_f64(&iv.hi));
        let mut pts = vec![a, b];
        let lo = w.xs.partition_point(|&x| x < a);
        let hi = w.xs.partition_point(|&x| x <= b);
        pts.extend_from_slice(&w.xs[lo..hi]);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let mut all = Vec::with_capacity(pts.len() * CHECK_DENSITY);
        for win in pts.windows(2) {
            for s in 0..CHECK_DENSITY {
                all.push(win[0] + (win[1] - win[0]) * s as f64 / CHECK_DENSITY as f64);
            }
        }
        all.extend(pts);
        if let Some(&x) = all.iter().find(|&&x| w.eval(x) < target(x)) {
            return Err(x);
        }
    }
    Ok(())
}

/// `∫_ℝ w(ξ)/(1+ξ²) dξ`, exactly per linear segment:
/// `∫ (w_a + β(ξ−a))/(1+ξ²) = (w_a − βa)Δarctan + (β/2) Δlog(1+ξ²)`.
pub fn poisson_integral(w: &WeightFunction) -> f64 {
    w.segments()
        .map(|(a, ya, b, yb)| {
            let beta = (yb - ya) / (b - a);
            let datan = (b - a).atan2(1.0 + a * b);
            let dlog = ((b - a) * (b + a) / (1.0 + a * a)).ln_1p();
            (ya - beta * a) * datan + 0.5 * beta * dlog
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::choose_delta;

    fn theta() -> ThetaWeight {
        choose_delta(&rat(1, 2)).unwrap()
    }

    #[test]
    fn greedy_basic() {
        assert_eq!(greedy_cover(&[(3.0, 3.0)], 1.5), vec![3.0]);
        assert_eq!(
            greedy_cover(&[(0.0, 1.0), (1.2, 2.0), (5.0, 5.5)], 1.5),
            vec![0.0, 1.5, 5.0]
        );
        assert!(greedy_cover(&[], 1.0).is_empty());
    }

    #[test]
    fn full_band_counts() {
        let t = theta();
        let y = IntervalSet::single(rat(-64, 1), rat(64, 1)).unwrap();
        let rep = cover_bands(&y, 6, &t).unwrap();
        for b in &rep.bands[1..] {
            let per = ((b.k as f64 - 1.0).exp2() / b.length).ceil() as usize;
            assert_eq!(b.count(), 2 * per, "k={}", b.k);
        }
        let point = IntervalSet::single(rat(5, 1), rat(5, 1)).unwrap();
        assert_eq!(cover_bands(&point, 4, &t).unwrap().counts(), vec![0, 0, 0, 1, 0]);
    }

    #[test]
    fn weight_of_empty_covering_is_patch() {
        let t = theta();
        let rep = cover_bands(&IntervalSet::empty(), 3, &t).unwrap();
        let w = build_weight(&rep, &WeightConfig::default()).unwrap();
        assert_eq!(w.eval(0.0), (1.0 / 64.0) * t.eval(1.0 / 64.0));
        assert!(w.eval(10.0) >= 10.0 * t.eval(10.0));
        assert_eq!(w.eval(1000.0), 0.0);
        assert!(w.slope_bound() <= 1.0 + 1e-12);
        assert_eq!(w.eval(-7.3), w.eval(7.3));
    }

    #[test]
    fn single_band_zero_weight() {
        let t = theta();
        let y = IntervalSet::single(rat(0, 1), rat(2, 5)).unwrap();
        let rep = cover_bands(&y, 0, &t).unwrap();
        assert_eq!(rep.counts(), vec![1]);
        let w = build_weight(&rep, &WeightConfig::default()).unwrap();
        // plateau [0, θ(1)] and its mirror, both covering ξ = 0
        assert!((w.eval(0.0) - 20.0 * t.eval(1.0)).abs() < 1e-12);
        assert!(check_weight(&w, &y, &t).is_ok());
    }

    #[test]
    fn check_weight_witness() {
        let t = theta();
        let y = IntervalSet::single(rat(1, 1), rat(2, 1)).unwrap();
        assert_eq!(check_weight(&WeightFunction::zero(), &y, &t), Err(1.0));
        assert!(check_weight(&WeightFunction::zero(), &IntervalSet::empty(), &t).is_ok());
    }

    #[test]
    fn poisson_closed_forms() {
        assert_eq!(poisson_integral(&WeightFunction::zero()), 0.0);
        let w = WeightFunction {
            xs: vec![0.0, 1.0],
            ys: vec![1.0, 1.0],
        };
        assert!((poisson_integral(&w) - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        let w = WeightFunction {
            xs: vec![0.0, 1.0],
            ys: vec![0.0, 1.0],
        };
        assert!((poisson_integral(&w) - 0.5 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn text_round_trip() {
        let w = WeightFunction {
            xs: vec![-1.0, 0.1, 2.5],
            ys: vec![0.0, 1.0 / 3.0, 0.0],
        };
        assert_eq!(WeightFunction::from_text(&w.to_text()).unwrap(), w);
        assert!(WeightFunction::from_text("nope\n").is_err());
    }

    #[test]
    fn max_inserts_crossings() {
        let a = WeightFunction {
            xs: vec![0.0, 2.0],
            ys: vec![0.0, 2.0],
        };
        let b = WeightFunction {
            xs: vec![0.0, 2.0],
            ys: vec![1.0, 1.0],
        };
        let m = a.max(&b);
        assert_eq!(m.xs, vec![0.0, 1.0, 2.0]);
        assert_eq!(m.ys, vec![1.0, 1.0, 2.0]);
    }
}
