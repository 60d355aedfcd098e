//! Harmonic measure of the slit strip `{|Im z| < r} ∖ I′` by walk-on-spheres,
//! a finite-difference cross-check, and the interpolation bounds it feeds.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::operator::{least_squares, GridSet};
use crate::theta::Theta;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlitStrip {
    /// Half-height of the strip.
    pub r: f64,
    /// The slit `I′ = [a, b]` on the real axis.
    pub hole: (f64, f64),
    /// The unit interval `I ⊃ I′`.
    pub context: (f64, f64),
}

impl SlitStrip {
    pub fn new(r: f64, hole: (f64, f64), context: (f64, f64)) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter("strip half-height must be positive".into()));
        }
        if !(hole.0 < hole.1) {
            return Err(Error::InvalidParameter("slit must have positive length".into()));
        }
        if !(context.0 <= hole.0 && hole.1 <= context.1) {
            return Err(Error::InvalidParameter(
                "slit must lie inside the context interval".into(),
            ));
        }
        if ((context.1 - context.0) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("context interval must have unit length".into()));
        }
        Ok(SlitStrip { r, hole, context })
    }

    /// The validation geometry: `I = [0,1]`, `I′ = [0.45, 0.55]`.
    pub fn centered(r: f64) -> Result<Self> {
        SlitStrip::new(r, (0.45, 0.55), (0.0, 1.0))
    }

    fn slit_distance(&self, x: f64, y: f64) -> f64 {
        let (a, b) = self.hole;
        if x < a {
            (x - a).hypot(y)
        } else if x > b {
            (x - b).hypot(y)
        } else {
            y.abs()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkConfig {
    pub walks: u64,
    /// Absorption distance.
    pub shell: f64,
    pub max_steps: u64,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            walks: 100_000,
            shell: 1e-4,
            max_steps: 100_000,
            seed: 0,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self, domain: &SlitStrip) -> Result<()> {
        if self.walks == 0 {
            return Err(Error::InvalidParameter("need at least one walk".into()));
        }
        let limit = domain.r.min(domain.hole.1 - domain.hole.0) / 10.0;
        if !(self.shell > 0.0 && self.shell < limit) {
            return Err(Error::InvalidParameter(format!(
                "shell {} must be in (0, {limit})",
                self.shell
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureEstimate {
    pub p_hat: f64,
    pub ci95: f64,
    /// Walks that were absorbed; timeouts are excluded.
    pub walks_used: u64,
    pub timeouts: u64,
    pub slit: u64,
    pub top: u64,
    pub bottom: u64,
}

impl MeasureEstimate {
    /// `(p_top − p_bottom, 95% half-width of that difference)`.
    pub fn reflection_gap(&self) -> (f64, f64) {
        let n = self.walks_used as f64;
        let pt = self.top as f64 / n;
        let pb = self.bottom as f64 / n;
        let var = (pt + pb - (pt - pb).powi(2)) / n;
        (pt - pb, 1.96 * var.max(0.0).sqrt())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Exit {
    Slit,
    Top,
    Bottom,
    Timeout,
}

fn walk(domain: &SlitStrip, t: f64, cfg: &WalkConfig, index: u64) -> Exit {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let (mut x, mut y) = (t, 0.0f64);
    let r = domain.r;
    for _ in 0..cfg.max_steps {
        let ds = domain.slit_distance(x, y);
        let dt = r - y;
        let db = r + y;
        let d = ds.min(dt).min(db);
        if d < cfg.shell {
            return if ds <= dt.min(db) {
                Exit::Slit
            } else if dt <= db {
                Exit::Top
            } else {
                Exit::Bottom
            };
        }
        let phi: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
        x += d * phi.cos();
        y += d * phi.sin();
    }
    Exit::Timeout
}

/// Timeouts above this fraction of all walks reject the estimate.
pub const TIMEOUT_LIMIT: f64 = 1e-3;

/// `μ_t(I′)` as the fraction of walks from `t` absorbed at the slit. Each walk
/// draws from its own stream of the seeded generator, so the result does not
/// depend on scheduling.
pub fn estimate_harmonic_measure(domain: &SlitStrip, t: f64, cfg: &WalkConfig) -> Result<MeasureEstimate> {
    cfg.validate(domain)?;
    if !(domain.context.0..=domain.context.1).contains(&t) || (domain.hole.0..=domain.hole.1).contains(&t) {
        return Err(Error::InvalidParameter(format!("start {t} must lie in I minus I'")));
    }
    let counts = (0..cfg.walks)
        .into_par_iter()
        .fold(
            || [0u64; 4],
            |mut acc, i| {
                let slot = match walk(domain, t, cfg, i) {
                    Exit::Slit => 0,
                    Exit::Top => 1,
                    Exit::Bottom => 2,
                    Exit::Timeout => 3,
                };
                acc[slot] += 1;
                acc
            },
        )
        .reduce(
            || [0u64; 4],
            |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]],
        );
    let [slit, top, bottom, timeouts] = counts;
    if timeouts as f64 > TIMEOUT_LIMIT * cfg.walks as f64 {
        return Err(Error::TooManyTimeouts {
            timeouts,
            walks: cfg.walks,
        });
    }
    let used = slit + top + bottom;
    let p_hat = slit as f64 / used as f64;
    Ok(MeasureEstimate {
        p_hat,
        ci95: 1.96 * (p_hat * (1.0 - p_hat) / used as f64).sqrt(),
        walks_used: used,
        timeouts,
        slit,
        top,
        bottom,
    })
}

/// One row of a measure report.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureRow {
    pub r: f64,
    pub t: f64,
    pub estimate: MeasureEstimate,
}

pub fn measure_csv(rows: &[MeasureRow]) -> String {
    let mut out = String::from("r,t,p_hat,ci95,walks,timeouts\n");
    for row in rows {
        let e = &row.estimate;
        let _ = writeln!(
            out,
            "{},{},{:.8e},{:.8e},{},{}",
            row.r, row.t, e.p_hat, e.ci95, e.walks_used, e.timeouts
        );
    }
    out
}

/// Grid for [`fd_harmonic_measure`]: `nx` points across `x`, `ny` across `[−r, r]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdGrid {
    pub nx: usize,
    pub ny: usize,
}

impl Default for FdGrid {
    fn default() -> Self {
        FdGrid { nx: 2001, ny: 401 }
    }
}

/// Finite-difference value at `(t, 0)` of the harmonic function equal to 1 on
/// the slit and 0 on `Im z = ±r`. The box is centred on the slit with square
/// cells and zero data on its far sides; the `y ↦ −y` symmetry halves the
/// problem, which is then solved by conjugate gradients.
pub fn fd_harmonic_measure(domain: &SlitStrip, t: f64, grid: FdGrid) -> Result<f64> {
    if grid.ny < 5 || grid.ny.is_multiple_of(2) || grid.nx < 5 {
        return Err(Error::InvalidParameter(
            "finite-difference grid needs odd ny >= 5 and nx >= 5".into(),
        ));
    }
    let h = 2.0 * domain.r / (grid.ny - 1) as f64;
    let centre = 0.5 * (domain.hole.0 + domain.hole.1);
    let x0 = centre - h * (grid.nx - 1) as f64 / 2.0;
    let xs = |i: usize| x0 + h * i as f64;
    let it = ((t - x0) / h).round();
    if it < 1.0 || it >= (grid.nx - 1) as f64 {
        return Err(Error::InvalidParameter(
            "start point outside the finite-difference box".into(),
        ));
    }
    let it = it as usize;
    // unknowns: i in 1..nx-1, j in 0..rows (j = rows is the line Im z = r)
    let rows = (grid.ny - 1) / 2;
    let cols = grid.nx - 2;
    let idx = |i: usize, j: usize| j * cols + (i - 1);
    let on_slit = |i: usize| {
        let x = xs(i);
        x >= domain.hole.0 - 1e-12 && x <= domain.hole.1 + 1e-12
    };
    let fixed: Vec<bool> = (0..rows * cols)
        .map(|p| p / cols == 0 && on_slit(p % cols + 1))
        .collect();
    // edge weights; the symmetry row carries half a cell
    let wx = |j: usize| if j == 0 { 0.5 } else { 1.0 };
    let apply = |u: &[f64], out: &mut [f64]| {
        for j in 0..rows {
            for i in 1..=cols {
                let p = idx(i, j);
                if fixed[p] {
                    out[p] = 0.0;
                    continue;
                }
                let mut acc = 0.0;
                let w = wx(j);
                for q in [(i > 1).then(|| idx(i - 1, j)), (i < cols).then(|| idx(i + 1, j))] {
                    acc += w * u[p];
                    if let Some(q) = q {
                        if !fixed[q] {
                            acc -= w * u[q];
                        }
                    }
                }
                // vertical neighbours: j+1 (or the zero boundary), and j-1 above the symmetry row
                acc += u[p];
                if j + 1 < rows && !fixed[idx(i, j + 1)] {
                    acc -= u[idx(i, j + 1)];
                }
                if j > 0 {
                    acc += u[p];
                    if !fixed[idx(i, j - 1)] {
                        acc -= u[idx(i, j - 1)];
                    }
                }
                out[p] = acc;
            }
        }
    };
    // right-hand side from the slit data
    let mut b = vec![0.0; rows * cols];
    for j in 0..rows {
        for i in 1..=cols {
            let p = idx(i, j);
            if fixed[p] {
                continue;
            }
            let w = wx(j);
            if i > 1 && fixed[idx(i - 1, j)] {
                b[p] += w;
            }
            if i < cols && fixed[idx(i + 1, j)] {
                b[p] += w;
            }
            if j == 1 && fixed[idx(i, 0)] {
                b[p] += 1.0;
            }
        }
    }
    let mut u = vec![0.0; rows * cols];
    let mut r = b.clone();
    let mut p = r.clone();
    let mut ap = vec![0.0; rows * cols];
    let dot = |a: &[f64], c: &[f64]| a.iter().zip(c).map(|(x, y)| x * y).sum::<f64>();
    let mut rr = dot(&r, &r);
    let target = 1e-24 * rr.max(f64::MIN_POSITIVE);
    let max_iter = 50 * (rows + cols);
    let mut iterations = 0;
    while rr > target && iterations < max_iter {
        apply(&p, &mut ap);
        let alpha = rr / dot(&p, &ap);
        for k in 0..u.len() {
            u[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for k in 0..p.len() {
            p[k] = r[k] + beta * p[k];
        }
        rr = rr_new;
        iterations += 1;
    }
    if rr > target {
        return Err(Error::NotConverged {
            iterations,
            best_estimate: u[idx(it, 0)],
            residual: (rr / dot(&b, &b)).sqrt(),
        });
    }
    let p0 = idx(it, 0);
    Ok(if fixed[p0] { 1.0 } else { u[p0] })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KappaFit {
    /// Slope of `log(1/p)` against `1/r`.
    pub c_fit: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Whether `p(r) ≥ e^{−1.1 C_fit / r}` at every sample.
    pub lower_bound_holds: bool,
}

/// Least-squares fit of `log(1/p)` against `1/r` over `(r, p)` samples.
pub fn fit_kappa(samples: &[(f64, f64)]) -> Result<KappaFit> {
    if samples.len() < 4 {
        return Err(Error::TooFewPoints {
            needed: 4,
            got: samples.len(),
        });
    }
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &(r, _)| (lo.min(r), hi.max(r)));
    if !(hi >= 10.0 * lo * (1.0 - 1e-12)) {
        return Err(Error::InvalidParameter("r values must span a decade".into()));
    }
    if let Some(&(r, _)) = samples.iter().find(|s| !(s.1 > 0.0)) {
        return Err(Error::ZeroEstimate(r));
    }
    let xs: Vec<f64> = samples.iter().map(|s| 1.0 / s.0).collect();
    let ys: Vec<f64> = samples.iter().map(|s| -s.1.ln()).collect();
    let (c_fit, intercept, r_squared) = least_squares(&xs, &ys);
    let lower_bound_holds = samples.iter().all(|&(r, p)| p >= (-c_fit * 1.1 / r).exp());
    Ok(KappaFit {
        c_fit,
        intercept,
        r_squared,
        lower_bound_holds,
    })
}

/// Conservative `κ`: the smallest `p_hat − ci95` over start points in `I ∖ I′`,
/// floored at zero, with the minimising start point.
pub fn conservative_kappa(domain: &SlitStrip, ts: &[f64], cfg: &WalkConfig) -> Result<(f64, f64, Vec<MeasureRow>)> {
    let mut best = (f64::INFINITY, f64::NAN);
    let mut rows = Vec::new();
    for &t in ts {
        let e = estimate_harmonic_measure(domain, t, cfg)?;
        let k = (e.p_hat - e.ci95).max(0.0);
        if k < best.0 {
            best = (k, t);
        }
        rows.push(MeasureRow {
            r: domain.r,
            t,
            estimate: e,
        });
    }
    Ok((best.0, best.1, rows))
}

/// Trigonometric polynomial `g(z) = Σ_{|ξ|≤K} ĝ(ξ) e^{izξ}`, entire in `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    /// `ĝ(ξ)` for `ξ = −K..=K`.
    pub coeffs: Vec<Complex64>,
}

impl TrigPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn random(degree: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..=2 * degree)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        TrigPoly { coeffs }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let k = self.degree() as i64;
        let i = Complex64::i();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * (i * z * (n as i64 - k) as f64).exp())
            .sum()
    }

    fn sup_on_segment(&self, a: f64, b: f64, samples: usize) -> f64 {
        (0..samples)
            .map(|s| {
                let x = a + (b - a) * s as f64 / (samples - 1) as f64;
                self.eval(Complex64::new(x, 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `sup |g|` on `Im z = y`: the function is `2π`-periodic in `x`, so one
    /// period sampled by an inverse FFT covers the whole line.
    fn sup_on_line(&self, y: f64, samples: usize) -> f64 {
        let k = self.degree() as i64;
        let mut buf = vec![Complex64::new(0.0, 0.0); samples];
        for (n, c) in self.coeffs.iter().enumerate() {
            let xi = n as i64 - k;
            buf[xi.rem_euclid(samples as i64) as usize] += c * (-y * xi as f64).exp();
        }
        FftPlanner::new().plan_fft_inverse(samples).process(&mut buf);
        buf.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Sample count per line or segment in [`check_subharmonic_bound`].
pub const SUP_SAMPLES: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubharmonicReport {
    pub sup_i: f64,
    pub sup_hole: f64,
    pub sup_lines: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// `sup_I |g| ≤ (sup_{I′}|g|)^κ (sup_{Im z = ±r}|g|)^{1−κ}`.
pub fn check_subharmonic_bound(g: &TrigPoly, domain: &SlitStrip, kappa: f64) -> Result<SubharmonicReport> {
    if g.coeffs.iter().all(|c| c.norm_sqr() == 0.0) {
        return Err(Error::InvalidParameter("g must not vanish identically".into()));
    }
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::InvalidParameter("kappa must lie in [0,1]".into()));
    }
    if g.degree() * 2 + 1 > SUP_SAMPLES {
        return Err(Error::InvalidParameter("degree too large for the sampling grid".into()));
    }
    let sup_i = g.sup_on_segment(domain.context.0, domain.context.1, SUP_SAMPLES);
    let sup_hole = g.sup_on_segment(domain.hole.0, domain.hole.1, SUP_SAMPLES);
    let sup_lines = g
        .sup_on_line(domain.r, SUP_SAMPLES)
        .max(g.sup_on_line(-domain.r, SUP_SAMPLES));
    let rhs = sup_hole.powf(kappa) * sup_lines.powf(1.0 - kappa);
    Ok(SubharmonicReport {
        sup_i,
        sup_hole,
        sup_lines,
        lhs: sup_i,
        rhs,
        slack: rhs - sup_i,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LemmaReport {
    pub kappa: f64,
    pub log_lhs: f64,
    /// `log` of `C/θ(K) ‖g‖_{U′}^κ R^{1−κ}`.
    pub log_first: f64,
    /// `log` of `C e^{−κKθ(K)}/θ(K) R`.
    pub log_second: f64,
    pub log_rhs: f64,
    pub holds: bool,
}

fn log_add(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        m
    } else {
        m + ((a - m).exp() + (b - m).exp()).ln()
    }
}

/// Both sides of `‖g‖ ≤ C/θ(K)‖g‖_{U′}^κ R^{1−κ} + C e^{−κKθ(K)}/θ(K) R` with
/// `κ = e^{−C/θ(K)}` and `R = ‖e^{|ξ|θ(ξ)}ĝ‖`, for a periodic grid function
/// (unitary DFT, frequencies in cycles per unit), evaluated in log space.
pub fn check_harmonic_lemma(
    g: &[Complex64],
    u_points: &GridSet,
    kfreq: usize,
    theta: &Theta,
    c: f64,
) -> Result<LemmaReport> {
    let n = g.len();
    if u_points.grid().size != n {
        return Err(Error::GridMismatch(u_points.grid().size, n));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidParameter("lemma constant must be positive".into()));
    }
    let mut spec = g.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut spec);
    let s = 1.0 / (n as f64).sqrt();
    let mut terms = Vec::new();
    for (i, z) in spec.iter().enumerate() {
        let m = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
        let a = z.norm() * s;
        if a > 0.0 {
            terms.push(2.0 * (theta.growth(m) + a.ln()));
        }
    }
    let log_r = if terms.is_empty() {
        f64::NEG_INFINITY
    } else {
        let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln())
    };
    let norm = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let norm_u = u_points.indices().iter().map(|&j| g[j].norm_sqr()).sum::<f64>().sqrt();
    let th = theta.eval(kfreq as f64);
    let kappa = (-c / th).exp();
    let log_lhs = norm.ln();
    let log_pre = c.ln() - th.ln();
    let log_first = if norm_u > 0.0 {
        log_pre + kappa * norm_u.ln() + (1.0 - kappa) * log_r
    } else {
        f64::NEG_INFINITY
    };
    let log_second = log_pre - kappa * kfreq as f64 * th + log_r;
    let log_rhs = log_add(log_first, log_second);
    Ok(LemmaReport {
        kappa,
        log_lhs,
        log_first,
        log_second,
        log_rhs,
        holds: norm == 0.0 || log_lhs <= log_rhs + 1e-12,
    })
}

/// Smallest `C ∈ {1, 2, 4, …, 2¹⁰}` for which the lemma holds on every function
/// of the corpus; both terms grow with `C`, so the scan is monotone.
pub fn minimal_lemma_constant(
    corpus: &[Vec<Complex64>],
    u_points: &GridSet,
    kfreq: usize,
    theta: &Theta,
) -> Result<Option<f64>> {
    for p in 0..=10 {
        let c = f64::from(1u32 << p);
        let mut ok = true;
        for g in corpus {
            if !check_harmonic_lemma(g, u_points, kfreq, theta, c)?.holds {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// Corpus function for the harmonic lemma: Gaussian Fourier coefficients damped
/// by `e^{−|ξ|θ(ξ)}/(1+|ξ|)`, so that `R` stays moderate.
pub fn random_decaying(n: usize, theta: &Theta, seed: u64) -> Vec<Complex64> {
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec: Vec<Complex64> = (0..n)
        .map(|i| {
            let m = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im) * ((-theta.growth(m)).exp() / (1.0 + m.abs()))
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut spec);
    let s = 1.0 / (n as f64).sqrt();
    spec.iter_mut().for_each(|z| *z *= s);
    spec
}

/// Which reading of the growth condition to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionForm {
    /// `e^{−C/θ(K)} K θ(K) − log θ(K)`, as displayed.
    AsDisplayed,
    /// `e^{−C/θ(K)} K θ(K) + log θ(K)`, the quantity whose growth makes the
    /// second term of the harmonic lemma vanish.
    Vanishing,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub values: Vec<f64>,
    pub strictly_increasing: bool,
    /// First index `i` with `values[i+1] < values[i]`.
    pub first_decrease: Option<usize>,
}

pub fn check_condition_theta(theta: &Theta, c: f64, ks: &[f64], form: ConditionForm) -> Result<ConditionReport> {
    if ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("K values must be increasing".into()));
    }
    let values: Vec<f64> = ks
        .iter()
        .map(|&k| {
            let th = theta.eval(k);
            let main = (-c / th).exp() * k * th;
            match form {
                ConditionForm::AsDisplayed => main - th.ln(),
                ConditionForm::Vanishing => main + th.ln(),
            }
        })
        .collect();
    let first_decrease = values.windows(2).position(|w| w[1] < w[0]);
    let strictly_increasing = values.windows(2).all(|w| w[1] > w[0]);
    Ok(ConditionReport {
        values,
        strictly_increasing,
        first_decrease,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strip_validation() {
        assert!(SlitStrip::new(0.0, (0.4, 0.5), (0.0, 1.0)).is_err());
        assert!(SlitStrip::new(0.2, (0.5, 0.4), (0.0, 1.0)).is_err());
        assert!(SlitStrip::new(0.2, (0.4, 1.5), (0.0, 1.0)).is_err());
        let d = SlitStrip::centered(0.2).unwrap();
        let cfg = WalkConfig {
            shell: 0.05,
            ..Default::default()
        };
        assert!(cfg.validate(&d).is_err());
        assert!(estimate_harmonic_measure(&d, 0.5, &WalkConfig::default()).is_err());
    }

    #[test]
    fn walks_are_deterministic_and_exhaustive() {
        let d = SlitStrip::centered(0.2).unwrap();
        let cfg = WalkConfig {
            walks: 2000,
            seed: 5,
            ..Default::default()
        };
        let a = estimate_harmonic_measure(&d, 0.3, &cfg).unwrap();
        let b = estimate_harmonic_measure(&d, 0.3, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.slit + a.top + a.bottom + a.timeouts, 2000);
    }

    #[test]
    fn fit_kappa_exact_models() {
        let s: Vec<_> = [0.1f64, 0.2, 0.4, 1.0].iter().map(|&r| (r, (-2.0 / r).exp())).collect();
        let f = fit_kappa(&s).unwrap();
        assert!((f.c_fit - 2.0).abs() < 1e-12 && f.intercept.abs() < 1e-12);
        assert!(f.lower_bound_holds);
        let s: Vec<_> = [0.1f64, 0.2, 0.4, 1.0].iter().map(|&r| (r, 0.25)).collect();
        let f = fit_kappa(&s).unwrap();
        assert!(f.c_fit.abs() < 1e-12);
        assert!((f.intercept - 4f64.ln()).abs() < 1e-12);
        assert!(fit_kappa(&s[..3]).is_err());
        assert!(fit_kappa(&[(0.1, 0.5), (0.2, 0.5), (0.3, 0.5), (0.4, 0.5)]).is_err());
    }

    #[test]
    fn subharmonic_trivial_cases() {
        let d = SlitStrip::centered(0.2).unwrap();
        let mut c = vec![Complex64::new(0.0, 0.0); 5];
        c[2] = Complex64::new(0.7, 0.0);
        let rep = check_subharmonic_bound(&TrigPoly { coeffs: c.clone() }, &d, 0.3).unwrap();
        assert!((rep.lhs - 0.7).abs() < 1e-12 && (rep.rhs - 0.7).abs() < 1e-12);
        c[2] = Complex64::new(0.0, 0.0);
        c[4] = Complex64::new(1.0, 0.0);
        let rep = check_subharmonic_bound(&TrigPoly { coeffs: c.clone() }, &d, 0.3).unwrap();
        assert!((rep.sup_lines - (2.0 * 0.2f64).exp()).abs() < 1e-9);
        assert!(rep.slack > 0.0);
        c[4] = Complex64::new(0.0, 0.0);
        assert!(check_subharmonic_bound(&TrigPoly { coeffs: c }, &d, 0.3).is_err());
    }

    #[test]
    fn condition_forms() {
        let ks: Vec<f64> = (1..=6).map(|e| 10f64.powi(e)).collect();
        let one = check_condition_theta(&Theta::One, 1.0, &ks, ConditionForm::AsDisplayed).unwrap();
        for (v, k) in one.values.iter().zip(&ks) {
            assert!((v - (-1f64).exp() * k).abs() < 1e-9 * k);
        }
        let log = Theta::Log { delta: 0.9 };
        assert!(
            check_condition_theta(&log, 4.0, &ks, ConditionForm::AsDisplayed)
                .unwrap()
                .strictly_increasing
        );
        let dense: Vec<f64> = (1..=2000).map(|k| k as f64 * 5.0).collect();
        let gevrey = Theta::Power { exponent: 0.5 };
        let rep = check_condition_theta(&gevrey, 1.0, &dense, ConditionForm::Vanishing).unwrap();
        assert!(rep.first_decrease.is_some());
        assert!(rep.values.last().unwrap() < &rep.values[0]);
    }
}
