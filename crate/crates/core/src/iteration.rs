//! Dyadic holes, band-limited mollifiers and the contraction chain
//! `f_k = χ_k χ_{k−k0} ⋯ χ_0 f`.
//!
//! Everything lives on the periodic unit interval sampled at `j/N`; frequencies
//! are integers mod `N`, matching [`crate::operator`].

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::interval::{rat, rat_int, Interval, IntervalSet, Rational};
use crate::operator::{discretize, estimate_c_grid, Grid, GridSet};
use crate::theta::Theta;

#[derive(Clone, Debug, PartialEq)]
pub struct HoleChoice {
    pub dyadic: Interval,
    pub hole: Interval,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HoleDecomposition {
    pub level: u32,
    pub nu: Rational,
    pub choices: Vec<HoleChoice>,
    /// `U′_k`
    pub holes: IntervalSet,
    /// `U″`: each hole shrunk to its concentric half.
    pub shrunk: IntervalSet,
    /// Concentric halves of the shrunk holes; the mollifier is checked to be `≤ ½` here.
    pub core: IntervalSet,
    /// `X_k = [0,1] ∖ U″`, which keeps the `2^{-k-2}ν`-neighbourhood of `X`.
    pub complement: IntervalSet,
}

/// One hole of length `ν 2^{-k}` per dyadic interval of `[0,1]`, placed in the
/// leftmost gap of `X` that fits it: flush left when the gap's left end is not
/// a point of `X`, centred in the gap otherwise.
pub fn build_holes(x: &IntervalSet, k: u32, nu: &Rational) -> Result<HoleDecomposition> {
    if nu <= &Rational::zero() || nu >= &Rational::one() {
        return Err(Error::InvalidParameter("hole fraction must be in (0,1)".into()));
    }
    if k > 30 {
        return Err(Error::InvalidParameter("hole level above 30".into()));
    }
    let cell = rat(1, 1i64 << k);
    let len = nu * &cell;
    let mut choices = Vec::with_capacity(1 << k);
    for j in 0..(1i64 << k) {
        let dyadic = Interval {
            lo: &cell * rat_int(j),
            hi: &cell * rat_int(j + 1),
        };
        let local = x.intersect(&IntervalSet::from_intervals(vec![dyadic.clone()]));
        let gaps = local.complement_within(&dyadic);
        let start = gaps.intervals().iter().find_map(|g| {
            let room = g.length();
            let left_blocked = local.contains(&g.lo);
            let right_blocked = local.contains(&g.hi);
            if !left_blocked {
                let fits = if right_blocked { room > len } else { room >= len };
                fits.then(|| g.lo.clone())
            } else if room > len {
                Some((&g.lo + &g.hi - &len) / rat_int(2))
            } else {
                None
            }
        });
        let Some(a) = start else {
            return Err(Error::PorosityViolation(Box::new(dyadic)));
        };
        let hole = Interval { hi: &a + &len, lo: a };
        choices.push(HoleChoice { dyadic, hole });
    }
    let holes = IntervalSet::from_intervals(choices.iter().map(|c| c.hole.clone()).collect());
    let half = rat(1, 2);
    let shrunk_list: Vec<Interval> = choices.iter().map(|c| c.hole.concentric(&half)).collect();
    let core = IntervalSet::from_intervals(shrunk_list.iter().map(|h| h.concentric(&half)).collect());
    let shrunk = IntervalSet::from_intervals(shrunk_list);
    let complement = shrunk.complement_within(&Interval {
        lo: Rational::zero(),
        hi: Rational::one(),
    });
    Ok(HoleDecomposition {
        level: k,
        nu: nu.clone(),
        choices,
        holes,
        shrunk,
        core,
        complement,
    })
}

/// Window whose autocorrelation gives the kernel spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum KernelShape {
    /// Flat window: `ψ` is the squared Dirichlet (Fejér) kernel.
    Fejer,
    /// Smooth compactly supported window `exp(−1/(1−t²))`; `ψ` decays faster
    /// than any power.
    #[default]
    Bump,
}

impl KernelShape {
    pub fn as_str(&self) -> &'static str {
        match self {
            KernelShape::Fejer => "fejer",
            KernelShape::Bump => "bump",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MollifierSpec {
    pub k0: u32,
    pub shape: KernelShape,
}

/// `ψ̂(m)` for `m = −band..=band`, with `ψ̂(0) = 1`. The kernel is
/// `ψ = |ǧ|²` for a real even window `g` on `|m| ≤ band/2`, so `ψ ≥ 0`.
pub fn kernel_spectrum(band: usize, shape: KernelShape) -> Vec<f64> {
    let half = band / 2;
    let g: Vec<f64> = (0..=2 * half)
        .map(|i| {
            let m = i as f64 - half as f64;
            match shape {
                KernelShape::Fejer => 1.0,
                KernelShape::Bump => {
                    let t = m / (half as f64 + 1.0);
                    (-1.0 / (1.0 - t * t)).exp()
                }
            }
        })
        .collect();
    let energy: f64 = g.iter().map(|v| v * v).sum();
    let mut out = vec![0.0; 2 * band + 1];
    for lag in 0..=2 * half {
        let s: f64 = (0..g.len() - lag).map(|i| g[i] * g[i + lag]).sum::<f64>() / energy;
        out[band + lag] = s;
        out[band - lag] = s;
    }
    out
}

/// `χ_k = 1_{X_k} * ψ_k` on the grid, with its spectrum kept exactly band-limited.
#[derive(Clone, Debug, PartialEq)]
pub struct Mollifier {
    pub k: u32,
    pub k0: u32,
    /// `2^{k+k0−1}`
    pub band: usize,
    /// Unnormalised Fourier coefficients indexed mod `N`: `χ(j/N) = Σ_m s[m] e^{2πimj/N}`.
    pub spectrum: Vec<Complex64>,
    pub samples: Vec<f64>,
}

impl Mollifier {
    pub fn n(&self) -> usize {
        self.samples.len()
    }

    /// Spectral mass `Σ |s[m]|²` outside `[−band, band]`; zero by construction.
    pub fn out_of_band_mass(&self) -> f64 {
        let n = self.n();
        (0..n)
            .filter(|&i| signed(i, n).unsigned_abs() as usize > self.band)
            .map(|i| self.spectrum[i].norm_sqr())
            .sum()
    }

    pub fn max_on(&self, points: &GridSet) -> f64 {
        points
            .indices()
            .iter()
            .map(|&j| self.samples[j])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_on(&self, points: &GridSet) -> f64 {
        points
            .indices()
            .iter()
            .map(|&j| self.samples[j])
            .fold(f64::INFINITY, f64::min)
    }
}

fn signed(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

pub fn build_mollifier(decomp: &HoleDecomposition, spec: &MollifierSpec, n: usize) -> Result<Mollifier> {
    let k = decomp.level;
    let log2 = k + spec.k0;
    if spec.k0 == 0 || log2 >= 62 || (1usize << log2) > n / 4 {
        return Err(Error::BandTooLarge { band_log2: log2, n });
    }
    let band = 1usize << (log2 - 1);
    let psi = kernel_spectrum(band, spec.shape);
    // Fourier coefficients of 1_{X_k} = 1 − Σ 1_{I″}
    let holes: Vec<(f64, f64)> = decomp.shrunk.to_f64_pairs();
    let mut spectrum = vec![Complex64::zero(); n];
    for m in -(band as i64)..=(band as i64) {
        let mut coef = Complex64::zero();
        if m == 0 {
            coef.re = 1.0 - holes.iter().map(|(a, b)| b - a).sum::<f64>();
        } else {
            let w = 2.0 * PI * m as f64;
            for &(a, b) in &holes {
                // ∫_a^b e^{−2πimx} dx
                let ea = Complex64::from_polar(1.0, -w * a);
                let eb = Complex64::from_polar(1.0, -w * b);
                coef -= (ea - eb) / Complex64::new(0.0, w);
            }
        }
        let idx = m.rem_euclid(n as i64) as usize;
        spectrum[idx] = coef * psi[(m + band as i64) as usize];
    }
    let mut buf = spectrum.clone();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let samples = buf.iter().map(|z| z.re).collect();
    Ok(Mollifier {
        k,
        k0: spec.k0,
        band,
        spectrum,
        samples,
    })
}

/// Grid indices `j` whose sample point `j/N` lies in the set.
pub fn sample_points(set: &IntervalSet, n: usize) -> Result<GridSet> {
    let grid = Grid::new(n)?;
    let scale = rat_int(n as i64);
    let mut idx = Vec::new();
    for iv in set.intervals() {
        let lo = (&iv.lo * &scale).ceil().to_integer();
        let hi = (&iv.hi * &scale).floor().to_integer();
        let lo = i64::try_from(lo).unwrap_or(i64::MAX).max(0);
        let hi = i64::try_from(hi).unwrap_or(i64::MIN).min(n as i64 - 1);
        if lo <= hi {
            idx.extend(lo as usize..=hi as usize);
        }
    }
    GridSet::new(grid, idx)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MollifierCheck {
    pub k: u32,
    pub max_core: f64,
    pub max_shrunk: f64,
    pub max_holes: f64,
    pub min_x: f64,
    pub out_of_band: f64,
}

impl MollifierCheck {
    pub fn passes(&self, k0: u32) -> bool {
        self.max_core <= 0.5 && self.min_x >= 1.0 - 0.5f64.powi(k0 as i32) && self.out_of_band == 0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainStep {
    pub decomp: HoleDecomposition,
    pub mollifier: Mollifier,
    pub check: MollifierCheck,
    /// Sample points of the core, where `χ_k ≤ ½`.
    pub core_points: GridSet,
    /// Admissible Fourier support of `f_{k−k0}`: the `Y` band fattened by `2^k`.
    pub support: GridSet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainPlan {
    pub n: usize,
    pub k0: u32,
    /// Requested `K` rounded up to a multiple of `k0`.
    pub k_total: u32,
    pub shape: KernelShape,
    /// Cells of `discretize(Y, N)`: the admissible Fourier support of `f`.
    pub y_band: GridSet,
    pub x_points: GridSet,
    pub steps: Vec<ChainStep>,
}

/// Holes and mollifiers for `k = 0, k0, …, K` (with `K` padded to a multiple of `k0`).
pub fn plan_chain(
    x: &IntervalSet,
    y: &IntervalSet,
    nu: &Rational,
    n: usize,
    k0: u32,
    k_max: u32,
    shape: KernelShape,
) -> Result<ChainPlan> {
    if k0 == 0 {
        return Err(Error::InvalidParameter("k0 must be >= 1".into()));
    }
    let k_total = k_max.div_ceil(k0) * k0;
    let spec = MollifierSpec { k0, shape };
    let y_band = discretize(y, n)?;
    let x_points = discretize(x, n)?;
    let mut steps = Vec::new();
    for k in (0..=k_total).step_by(k0 as usize) {
        let decomp = build_holes(x, k, nu)?;
        let mollifier = build_mollifier(&decomp, &spec, n)?;
        let core_points = sample_points(&decomp.core, n)?;
        let check = MollifierCheck {
            k,
            max_core: mollifier.max_on(&core_points),
            max_shrunk: mollifier.max_on(&sample_points(&decomp.shrunk, n)?),
            max_holes: mollifier.max_on(&sample_points(&decomp.holes, n)?),
            min_x: mollifier.min_on(&x_points),
            out_of_band: mollifier.out_of_band_mass(),
        };
        let support = y_band.fatten(1usize << k);
        steps.push(ChainStep {
            decomp,
            mollifier,
            check,
            core_points,
            support,
        });
    }
    Ok(ChainPlan {
        n,
        k0,
        k_total,
        shape,
        y_band,
        x_points,
        steps,
    })
}

impl ChainPlan {
    pub fn passes(&self) -> bool {
        self.steps.iter().all(|s| s.check.passes(self.k0))
    }

    /// `c = min_k c_k` where `c_k` is the lower bound of `‖1_core f‖/‖f‖` over the
    /// admissible support of step `k`.
    pub fn contraction_constant(&self, tol: f64) -> Result<f64> {
        let mut c = f64::INFINITY;
        for s in &self.steps {
            c = c.min(estimate_c_grid(&s.core_points, &s.support, tol)?);
        }
        Ok(c)
    }
}

/// Smallest `k0 ≤ max_k0` whose plan meets `χ_k ≤ ½` on the cores and
/// `χ_k ≥ 1 − 2^{-k0}` on `X` at every step. Values whose band does not fit
/// the grid are skipped.
pub fn find_k0(
    x: &IntervalSet,
    y: &IntervalSet,
    nu: &Rational,
    n: usize,
    k_max: u32,
    shape: KernelShape,
    max_k0: u32,
) -> Result<ChainPlan> {
    for k0 in 1..=max_k0 {
        match plan_chain(x, y, nu, n, k0, k_max, shape) {
            Ok(plan) if plan.passes() => return Ok(plan),
            Ok(_) | Err(Error::BandTooLarge { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NoK0Found { max: max_k0 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainState {
    pub ks: Vec<u32>,
    pub initial_norm: f64,
    /// `‖f_k‖` for each `k` in `ks`.
    pub norms: Vec<f64>,
    /// `‖f_k‖ / ‖f_{k−k0}‖`, the first entry relative to `‖f‖`.
    pub ratios: Vec<f64>,
    pub flags: Vec<bool>,
    pub c_used: f64,
    /// `√(1 − c²/10)`
    pub contraction: f64,
    /// `2 (√(1−c²/10) / (1−2^{-k0}))^{K/k0} ‖f‖`
    pub final_bound: f64,
    /// `‖f‖_{ℓ²(X)}` on the sample points of `X`.
    pub x_norm: f64,
    /// `(1−2^{-k0})^{−K/k0−1} ‖f_K‖`
    pub x_bound: f64,
    pub k0: u32,
}

/// Slack added to the contraction factor before a step is flagged.
pub const FLAG_SLACK: f64 = 1e-9;

/// Largest admissible relative spectral mass outside the `Y` band.
pub const LEAKAGE_LIMIT: f64 = 1e-12;

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn run_chain(plan: &ChainPlan, f0: &[Complex64], c: f64) -> Result<ChainState> {
    let n = plan.n;
    if f0.len() != n {
        return Err(Error::GridMismatch(f0.len(), n));
    }
    let initial_norm = l2(f0);
    if initial_norm > 0.0 {
        let mut spec = f0.to_vec();
        FftPlanner::new().plan_fft_forward(n).process(&mut spec);
        let total: f64 = spec.iter().map(|z| z.norm_sqr()).sum();
        let mut inside = vec![false; n];
        for &i in plan.y_band.indices() {
            inside[i] = true;
        }
        let leak: f64 = spec
            .iter()
            .zip(&inside)
            .filter(|(_, &ok)| !ok)
            .map(|(z, _)| z.norm_sqr())
            .sum::<f64>()
            / total;
        if leak > LEAKAGE_LIMIT {
            return Err(Error::SupportLeakage {
                leak,
                allowed: LEAKAGE_LIMIT,
            });
        }
    }
    let q = (1.0 - c * c / 10.0).max(0.0).sqrt();
    let mut f = f0.to_vec();
    let mut prev = initial_norm;
    let mut state = ChainState {
        ks: Vec::new(),
        initial_norm,
        norms: Vec::new(),
        ratios: Vec::new(),
        flags: Vec::new(),
        c_used: c,
        contraction: q,
        final_bound: 0.0,
        x_norm: 0.0,
        x_bound: 0.0,
        k0: plan.k0,
    };
    for step in &plan.steps {
        for (fi, &chi) in f.iter_mut().zip(&step.mollifier.samples) {
            *fi *= chi;
        }
        let norm = l2(&f);
        let ratio = if prev > 0.0 { norm / prev } else { 0.0 };
        state.ks.push(step.check.k);
        state.norms.push(norm);
        state.ratios.push(ratio);
        state.flags.push(ratio > q + FLAG_SLACK);
        prev = norm;
    }
    let lower = 1.0 - 0.5f64.powi(plan.k0 as i32);
    let steps = (plan.k_total / plan.k0) as i32;
    state.final_bound = 2.0 * (q / lower).powi(steps) * initial_norm;
    state.x_norm = plan
        .x_points
        .indices()
        .iter()
        .map(|&j| f0[j].norm_sqr())
        .sum::<f64>()
        .sqrt();
    state.x_bound = lower.powi(-(steps + 1)) * prev;
    Ok(state)
}

impl ChainState {
    pub fn flag_count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,norm,ratio,bound,flag\n");
        let mut prev = self.initial_norm;
        for i in 0..self.ks.len() {
            let _ = writeln!(
                out,
                "{},{:.12e},{:.12e},{:.12e},{}",
                self.ks[i],
                self.norms[i],
                self.ratios[i],
                self.contraction * prev,
                u8::from(self.flags[i])
            );
            prev = self.norms[i];
        }
        let _ = writeln!(
            out,
            "# c={:.12e},k0={},final_bound={:.12e},x_norm={:.12e},x_bound={:.12e}",
            self.c_used, self.k0, self.final_bound, self.x_norm, self.x_bound
        );
        out
    }
}

/// Unit-norm grid function with i.i.d. Gaussian Fourier coefficients on `support`.
pub fn random_band_limited(support: &GridSet, seed: u64) -> Vec<Complex64> {
    let n = support.grid().size;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = vec![Complex64::zero(); n];
    for &i in support.indices() {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        spec[i] = Complex64::new(re, im);
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut spec);
    let s = l2(&spec);
    if s > 0.0 {
        spec.iter_mut().for_each(|z| *z /= s);
    }
    spec
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrequencySplit {
    pub low: Vec<Complex64>,
    pub high: Vec<Complex64>,
    pub high_norm: f64,
    /// `log R`, `R = ‖e^{|ξ|θ(ξ)} ĝ(ξ)‖`; `−∞` for `g = 0`.
    pub log_r: f64,
    /// `log(e^{−Kθ(K)} R)`
    pub log_rhs: f64,
    /// `e^{−Kθ(K)} R − ‖g_high‖` (may be `+∞` when `R` overflows).
    pub slack: f64,
}

/// Sharp cutoff at `|ξ| ≤ kfreq` with the weighted norm `R` accumulated in log space.
pub fn split_frequencies(g: &[Complex64], kfreq: usize, theta: &Theta) -> Result<FrequencySplit> {
    let n = g.len();
    if n == 0 || 2 * kfreq >= n {
        return Err(Error::InvalidParameter(format!(
            "frequency cutoff {kfreq} does not fit a grid of size {n}"
        )));
    }
    let mut spec = g.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut spec);
    let s = 1.0 / (n as f64).sqrt();
    spec.iter_mut().for_each(|z| *z *= s);
    let mut low_spec = vec![Complex64::zero(); n];
    let mut high_spec = vec![Complex64::zero(); n];
    let mut terms = Vec::new();
    for (i, z) in spec.iter().enumerate() {
        let m = signed(i, n);
        if m.unsigned_abs() as usize <= kfreq {
            low_spec[i] = *z;
        } else {
            high_spec[i] = *z;
        }
        if z.norm_sqr() > 0.0 {
            terms.push(2.0 * (theta.growth(m as f64) + z.norm().ln()));
        }
    }
    let log_r = if terms.is_empty() {
        f64::NEG_INFINITY
    } else {
        let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln())
    };
    let high_norm = l2(&high_spec);
    let log_rhs = log_r - theta.growth(kfreq as f64);
    let slack = log_rhs.exp() - high_norm;
    if slack < -1e-10 {
        return Err(Error::BoundViolated(format!(
            "high-frequency bound fails by {}",
            -slack
        )));
    }
    let back = |mut v: Vec<Complex64>| {
        FftPlanner::new().plan_fft_inverse(n).process(&mut v);
        v.iter_mut().for_each(|z| *z *= s);
        v
    };
    Ok(FrequencySplit {
        low: back(low_spec),
        high: back(high_spec),
        high_norm,
        log_r,
        log_rhs,
        slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holes_in_empty_set_are_leftmost() {
        let d = build_holes(&IntervalSet::empty(), 0, &rat(1, 4)).unwrap();
        assert_eq!(d.choices[0].hole, Interval::new(rat(0, 1), rat(1, 4)).unwrap());
        assert_eq!(d.shrunk.intervals()[0], Interval::new(rat(1, 16), rat(3, 16)).unwrap());
    }

    #[test]
    fn full_set_has_no_hole() {
        let err = build_holes(&IntervalSet::unit(), 2, &rat(1, 10)).unwrap_err();
        assert!(matches!(err, Error::PorosityViolation(_)));
    }

    #[test]
    fn hole_centred_when_gap_starts_at_set() {
        // X = [0, 1/4] ∪ [3/4, 1]; gap (1/4, 3/4) is open on both sides
        let x = IntervalSet::from_intervals(vec![
            Interval::new(rat(0, 1), rat(1, 4)).unwrap(),
            Interval::new(rat(3, 4), rat(1, 1)).unwrap(),
        ]);
        let d = build_holes(&x, 0, &rat(1, 4)).unwrap();
        assert_eq!(d.choices[0].hole, Interval::new(rat(3, 8), rat(5, 8)).unwrap());
        assert!(build_holes(&x, 0, &rat(1, 2)).is_err());
    }

    #[test]
    fn kernel_is_normalised_and_positive() {
        for shape in [KernelShape::Fejer, KernelShape::Bump] {
            let k = kernel_spectrum(16, shape);
            assert_eq!(k.len(), 33);
            assert!((k[16] - 1.0).abs() < 1e-15);
            assert_eq!(k[0], k[32]);
            // ψ(x) = Σ ψ̂(m) e^{2πimx} ≥ 0
            for i in 0..200 {
                let x = i as f64 / 200.0;
                let v: f64 = k
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c * (2.0 * PI * (j as f64 - 16.0) * x).cos())
                    .sum();
                assert!(v > -1e-12);
            }
        }
    }

    #[test]
    fn mollifier_of_full_and_empty_box() {
        let n = 256;
        let spec = MollifierSpec {
            k0: 3,
            shape: KernelShape::Bump,
        };
        let empty = build_holes(&IntervalSet::empty(), 0, &rat(1, 4)).unwrap();
        let mut full = empty.clone();
        full.shrunk = IntervalSet::empty();
        let chi = build_mollifier(&full, &spec, n).unwrap();
        assert!(chi.samples.iter().all(|v| (v - 1.0).abs() < 1e-13));
        let mut none = empty;
        none.shrunk = IntervalSet::unit();
        let chi = build_mollifier(&none, &spec, n).unwrap();
        assert!(chi.samples.iter().all(|v| v.abs() < 1e-13));
        assert_eq!(chi.out_of_band_mass(), 0.0);
    }

    #[test]
    fn band_must_fit() {
        let d = build_holes(&IntervalSet::empty(), 4, &rat(1, 4)).unwrap();
        let spec = MollifierSpec {
            k0: 3,
            shape: KernelShape::Bump,
        };
        assert!(matches!(
            build_mollifier(&d, &spec, 256),
            Err(Error::BandTooLarge { band_log2: 7, n: 256 })
        ));
        assert!(build_mollifier(&d, &spec, 512).is_ok());
    }

    #[test]
    fn sample_points_are_closed() {
        let s = IntervalSet::from_intervals(vec![Interval::new(rat(1, 4), rat(1, 2)).unwrap()]);
        assert_eq!(sample_points(&s, 8).unwrap().indices(), &[2, 3, 4]);
    }

    #[test]
    fn split_single_spike() {
        let n = 64;
        let theta = Theta::Log { delta: 0.9 };
        let mut spec = vec![Complex64::zero(); n];
        spec[20] = Complex64::new(0.5, 0.0);
        FftPlanner::new().plan_fft_inverse(n).process(&mut spec);
        let g: Vec<_> = spec.iter().map(|z| z / (n as f64).sqrt()).collect();
        let s = split_frequencies(&g, 8, &theta).unwrap();
        assert!((s.high_norm - 0.5).abs() < 1e-12);
        assert!((s.log_r - (theta.growth(20.0) + 0.5f64.ln())).abs() < 1e-12);
        let ratio = s.high_norm / s.log_r.exp();
        assert!((ratio - (-theta.growth(20.0)).exp()).abs() < 1e-12);
        assert!(s.slack > 0.0);
    }

    #[test]
    fn split_band_limited_has_no_high_part() {
        let grid = Grid::new(64).unwrap();
        let support = GridSet::new(grid, vec![0, 1, 2, 62, 63]).unwrap();
        let g = random_band_limited(&support, 3);
        let s = split_frequencies(&g, 4, &Theta::One).unwrap();
        assert!(s.high_norm < 1e-14);
        let zero = vec![Complex64::zero(); 64];
        let s = split_frequencies(&zero, 4, &Theta::One).unwrap();
        assert_eq!((s.high_norm, s.slack), (0.0, 0.0));
    }

    #[test]
    fn zero_function_chain() {
        let x = crate::generate::make_random_porous(&rat(1, 10), 4, 1).unwrap();
        let plan = plan_chain(&x, &x, &rat(1, 10), 1 << 10, 2, 2, KernelShape::Bump).unwrap();
        let st = run_chain(&plan, &vec![Complex64::zero(); 1 << 10], 0.1).unwrap();
        assert!(st.norms.iter().all(|&v| v == 0.0));
        assert_eq!(st.flag_count(), 0);
    }
}
