//! Discrete Fourier restriction operators `B = 1_X ∘ F_N ∘ 1_Y` and their norms.
//!
//! `F_N` is the unitary DFT, `(F v)(j) = N^{-1/2} Σ_k e^{-2πi jk/N} v(k)`, and the
//! grid `{0, …, N-1}` models `[0,1)` with `h = 1/N`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::interval::{IntervalSet, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    pub size: usize,
}

impl Grid {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter("grid size must be >= 1".into()));
        }
        Ok(Grid { size })
    }
}

/// Sorted, unique indices in `[0, N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSet {
    grid: Grid,
    indices: Vec<usize>,
}

impl GridSet {
    pub fn new(grid: Grid, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if let Some(&last) = indices.last() {
            if last >= grid.size {
                return Err(Error::InvalidParameter(format!(
                    "index {last} outside grid of size {}",
                    grid.size
                )));
            }
        }
        Ok(GridSet { grid, indices })
    }

    pub fn full(grid: Grid) -> Self {
        GridSet {
            grid,
            indices: (0..grid.size).collect(),
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn complement(&self) -> GridSet {
        let mut mask = vec![true; self.grid.size];
        for &i in &self.indices {
            mask[i] = false;
        }
        GridSet {
            grid: self.grid,
            indices: (0..self.grid.size).filter(|&i| mask[i]).collect(),
        }
    }

    /// Every index within `radius` of the set, wrapping around the grid.
    pub fn fatten(&self, radius: usize) -> GridSet {
        let n = self.grid.size;
        if self.is_empty() || 2 * radius + 1 >= n {
            return if self.is_empty() {
                self.clone()
            } else {
                GridSet::full(self.grid)
            };
        }
        let mut mask = vec![false; n];
        for &i in &self.indices {
            for d in 0..=2 * radius {
                mask[(i + n + d - radius) % n] = true;
            }
        }
        GridSet {
            grid: self.grid,
            indices: (0..n).filter(|&i| mask[i]).collect(),
        }
    }

    fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.grid.size];
        for &i in &self.indices {
            m[i] = true;
        }
        m
    }
}

/// Grid cells `[j/N, (j+1)/N)` that share a subinterval of positive length with
/// the set; a degenerate point interval selects the cell containing it.
pub fn discretize(set: &IntervalSet, n: usize) -> Result<GridSet> {
    let grid = Grid::new(n)?;
    let scale = Rational::from_integer(BigInt::from(n));
    let top = n as i64 - 1;
    let mut indices = Vec::new();
    for iv in set.intervals() {
        let a = &iv.lo * &scale;
        let b = &iv.hi * &scale;
        let (lo, hi) = if a == b {
            let j = a.floor().to_integer();
            (j.clone(), j)
        } else {
            // (j+1)/N > a and j/N < b
            (a.floor().to_integer(), b.ceil().to_integer() - 1)
        };
        let clamp = |v: BigInt| v.to_i64().unwrap_or(if v.is_negative() { i64::MIN } else { i64::MAX });
        let (lo, hi) = (clamp(lo), clamp(hi));
        let (lo, hi) = (lo.max(0), hi.min(top));
        if lo <= hi {
            indices.extend(lo as usize..=hi as usize);
        }
    }
    GridSet::new(grid, indices)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMethod {
    Power,
    /// Restarted Krylov fallback for spectra whose top is too clustered for
    /// plain power iteration.
    Lanczos,
    Dense,
}

impl NormMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormMethod::Power => "POWER",
            NormMethod::Lanczos => "LANCZOS",
            NormMethod::Dense => "DENSE",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormResult {
    pub sigma: f64,
    pub iterations: usize,
    /// `‖B*Bv − λv‖ / λ` at the returned vector.
    pub residual: f64,
    pub method: NormMethod,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormConfig {
    pub tol: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for NormConfig {
    fn default() -> Self {
        NormConfig {
            tol: 1e-10,
            max_iterations: 100_000,
            seed: 0,
        }
    }
}

impl NormConfig {
    pub fn with_tol(tol: f64) -> Self {
        NormConfig {
            tol,
            ..Default::default()
        }
    }
}

/// Largest dimension for which the dense oracle is offered.
pub const DENSE_LIMIT: usize = 1024;

/// Matrix-free application of `B*B` on vectors supported on `Y`.
struct Restricted {
    n: usize,
    x: Vec<bool>,
    y: Vec<bool>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl Restricted {
    fn new(x: &GridSet, y: &GridSet) -> Self {
        let n = x.grid.size;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Restricted {
            n,
            x: x.mask(),
            y: y.mask(),
            fwd,
            inv,
            scratch: vec![Complex64::zero(); len],
        }
    }

    /// `v ← B*B v`; the two unnormalised transforms contribute the factor `1/N`.
    fn apply(&mut self, v: &mut [Complex64]) {
        self.fwd.process_with_scratch(v, &mut self.scratch);
        for (vi, &keep) in v.iter_mut().zip(&self.x) {
            if !keep {
                *vi = Complex64::zero();
            }
        }
        self.inv.process_with_scratch(v, &mut self.scratch);
        let s = 1.0 / self.n as f64;
        for (vi, &keep) in v.iter_mut().zip(&self.y) {
            *vi = if keep { *vi * s } else { Complex64::zero() };
        }
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn check_grids(x: &GridSet, y: &GridSet) -> Result<()> {
    if x.grid != y.grid {
        return Err(Error::GridMismatch(x.grid.size, y.grid.size));
    }
    Ok(())
}

/// `σ_max(1_X F_N 1_Y)` by power iteration on `B*B`.
pub fn fup_norm(x: &GridSet, y: &GridSet, tol: f64) -> Result<NormResult> {
    fup_norm_with(x, y, &NormConfig::with_tol(tol))
}

pub fn fup_norm_with(x: &GridSet, y: &GridSet, cfg: &NormConfig) -> Result<NormResult> {
    check_grids(x, y)?;
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    if x.is_empty() || y.is_empty() {
        return Ok(NormResult {
            sigma: 0.0,
            iterations: 0,
            residual: 0.0,
            method: NormMethod::Power,
        });
    }
    let mut op = Restricted::new(x, y);
    let n = x.grid.size;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // uniform on Y, plus a small seeded tilt so that a symmetric set cannot hide
    // the top singular vector behind an exact orthogonality
    let mut start = vec![Complex64::zero(); n];
    for &j in y.indices() {
        start[j] = Complex64::new(1.0 + 1e-3 * rng.gen::<f64>(), 1e-3 * rng.gen::<f64>());
    }
    let (best, used) = match power_iterate(&mut op, start, cfg.tol, cfg.max_iterations) {
        Ok(r) => return Ok(r),
        Err(stalled) => stalled,
    };
    // stagnation: restart from a fully random vector, with Krylov acceleration
    let mut start = vec![Complex64::zero(); n];
    for &j in y.indices() {
        start[j] = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
    }
    match lanczos(&mut op, y.len(), start, cfg.tol, cfg.max_iterations) {
        Ok(mut r) => {
            r.iterations += used;
            Ok(r)
        }
        Err((second, more)) => {
            let pick = if second.0 >= best.0 { second } else { best };
            Err(Error::NotConverged {
                iterations: used + more,
                best_estimate: pick.0,
                residual: pick.1,
            })
        }
    }
}

/// Rayleigh quotient of `B*B` at unit `v` with its relative residual; `w` receives `B*B v`.
fn rayleigh(op: &mut Restricted, v: &[Complex64], w: &mut [Complex64]) -> (f64, f64) {
    w.copy_from_slice(v);
    op.apply(w);
    let lambda: f64 = v.iter().zip(w.iter()).map(|(a, b)| (a.conj() * b).re).sum();
    let res = v
        .iter()
        .zip(w.iter())
        .map(|(a, b)| (b - a * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt()
        / lambda.max(f64::MIN_POSITIVE);
    (lambda, res)
}

/// Iterations between stagnation checks in [`power_iterate`].
const STALL_WINDOW: usize = 256;

/// Returns the converged result, or the best `(σ, residual)` seen with the
/// iterations spent. Gives up early once the observed convergence rate cannot
/// reach `tol` within `max_iterations`.
fn power_iterate(
    op: &mut Restricted,
    mut v: Vec<Complex64>,
    tol: f64,
    max_iterations: usize,
) -> std::result::Result<NormResult, ((f64, f64), usize)> {
    let nv = norm(&v);
    v.iter_mut().for_each(|z| *z /= nv);
    let mut w = v.clone();
    let mut best = (0.0f64, f64::INFINITY);
    let mut checkpoint = f64::INFINITY;
    for it in 1..=max_iterations {
        let (lambda, res) = rayleigh(op, &v, &mut w);
        let nw = norm(&w);
        if nw == 0.0 {
            return Ok(NormResult {
                sigma: 0.0,
                iterations: it,
                residual: 0.0,
                method: NormMethod::Power,
            });
        }
        let sigma = lambda.max(0.0).sqrt();
        if sigma > best.0 {
            best = (sigma, res);
        }
        if res <= tol {
            return Ok(NormResult {
                sigma,
                iterations: it,
                residual: res,
                method: NormMethod::Power,
            });
        }
        if it % STALL_WINDOW == 0 {
            if it >= 4 * STALL_WINDOW {
                let rate = res / checkpoint;
                let needed = if rate < 1.0 {
                    (tol / res).ln() / rate.ln() * STALL_WINDOW as f64
                } else {
                    f64::INFINITY
                };
                if it as f64 + needed > max_iterations as f64 {
                    return Err((best, it));
                }
            }
            checkpoint = res;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / nw;
        }
    }
    Err((best, max_iterations))
}

/// Krylov dimension per restart cycle of [`lanczos`].
const LANCZOS_BLOCK: usize = 96;

/// Restarted Lanczos on `B*B` with full reorthogonalisation, restarting from the
/// top Ritz vector. `dim` is `|Y|`; once the Krylov space exhausts it the Ritz
/// value is exact up to rounding. Counts operator applications against `budget`.
fn lanczos(
    op: &mut Restricted,
    dim: usize,
    mut v: Vec<Complex64>,
    tol: f64,
    budget: usize,
) -> std::result::Result<NormResult, ((f64, f64), usize)> {
    let block = dim.clamp(1, LANCZOS_BLOCK);
    let mut used = 0;
    let mut best = (0.0f64, f64::INFINITY);
    let mut w = vec![Complex64::zero(); v.len()];
    loop {
        let nv = norm(&v);
        if nv == 0.0 {
            return Err((best, used));
        }
        v.iter_mut().for_each(|z| *z /= nv);
        let mut basis: Vec<Vec<Complex64>> = vec![v.clone()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        while alpha.len() < block && used < budget {
            let q = basis.last().unwrap();
            w.copy_from_slice(q);
            op.apply(&mut w);
            used += 1;
            let a: f64 = q.iter().zip(&w).map(|(x, y)| (x.conj() * y).re).sum();
            alpha.push(a);
            // two passes of classical Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for b in &basis {
                    let c: Complex64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                    w.iter_mut().zip(b).for_each(|(y, x)| *y -= c * x);
                }
            }
            let nb = norm(&w);
            if alpha.len() == block || nb <= 1e-13 * alpha.iter().fold(0.0f64, |m, x| m.max(x.abs())) {
                break;
            }
            beta.push(nb);
            basis.push(w.iter().map(|z| z / nb).collect());
        }
        let k = alpha.len();
        if k == 0 {
            return Err((best, used));
        }
        let t = DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = t.symmetric_eigen();
        let top = (0..k)
            .max_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]))
            .unwrap();
        let mut ritz = vec![Complex64::zero(); v.len()];
        for (i, b) in basis.iter().take(k).enumerate() {
            let c = eig.eigenvectors[(i, top)];
            ritz.iter_mut().zip(b).for_each(|(r, x)| *r += x * c);
        }
        let nr = norm(&ritz);
        ritz.iter_mut().for_each(|z| *z /= nr);
        let (lambda, res) = rayleigh(op, &ritz, &mut w);
        used += 1;
        let sigma = lambda.max(0.0).sqrt();
        if sigma > best.0 {
            best = (sigma, res);
        }
        if res <= tol || lambda <= 0.0 {
            return Ok(NormResult {
                sigma,
                iterations: used,
                residual: if lambda <= 0.0 { 0.0 } else { res },
                method: NormMethod::Lanczos,
            });
        }
        if used >= budget {
            return Err((best, used));
        }
        v = ritz;
    }
}

/// Dense `|X|×|Y|` matrix of `1_X F_N 1_Y`.
pub fn dense_matrix(x: &GridSet, y: &GridSet) -> Result<DMatrix<Complex64>> {
    check_grids(x, y)?;
    let n = x.grid.size;
    let s = 1.0 / (n as f64).sqrt();
    Ok(DMatrix::from_fn(x.len(), y.len(), |r, c| {
        let jk = (x.indices[r] as u128 * y.indices[c] as u128 % n as u128) as f64;
        Complex64::from_polar(s, -2.0 * PI * jk / n as f64)
    }))
}

/// Dense singular value oracle for `N ≤ DENSE_LIMIT`.
pub fn fup_norm_dense(x: &GridSet, y: &GridSet) -> Result<NormResult> {
    check_grids(x, y)?;
    if x.grid.size > DENSE_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "dense oracle is limited to N <= {DENSE_LIMIT}"
        )));
    }
    let sigma = if x.is_empty() || y.is_empty() {
        0.0
    } else {
        let m = dense_matrix(x, y)?;
        m.singular_values().max()
    };
    Ok(NormResult {
        sigma,
        iterations: 0,
        residual: 0.0,
        method: NormMethod::Dense,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepEntry {
    pub n: usize,
    pub result: Result<NormResult>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub entries: Vec<SweepEntry>,
}

impl SweepResult {
    /// `(N, σ)` for the entries that succeeded.
    pub fn points(&self) -> Vec<(usize, f64)> {
        self.entries
            .iter()
            .filter_map(|e| e.result.as_ref().ok().map(|r| (e.n, r.sigma)))
            .collect()
    }

    pub fn to_csv(&self, fit: Option<&ExponentFit>) -> String {
        let mut out = String::from("N,sigma,iterations,residual,method\n");
        for e in &self.entries {
            match &e.result {
                Ok(r) => {
                    let _ = writeln!(
                        out,
                        "{},{:.15e},{},{:.3e},{}",
                        e.n,
                        r.sigma,
                        r.iterations,
                        r.residual,
                        r.method.as_str()
                    );
                }
                Err(Error::NotConverged {
                    iterations,
                    best_estimate,
                    residual,
                }) => {
                    let _ = writeln!(
                        out,
                        "{},{:.15e},{},{:.3e},FAILED",
                        e.n, best_estimate, iterations, residual
                    );
                }
                Err(_) => {
                    let _ = writeln!(out, "{},nan,0,nan,FAILED", e.n);
                }
            }
        }
        if let Some(f) = fit {
            let _ = writeln!(out, "# beta={:.6},logC={:.6},r2={:.6}", f.beta, f.log_c, f.r_squared);
        }
        out
    }
}

/// `σ(N)` for `X = discretize(set_x, N)`, `Y = discretize(set_y, N)`, evaluated in
/// parallel; failures stay attached to their entry.
pub fn norm_sweep(set_x: &IntervalSet, set_y: &IntervalSet, ns: &[usize], cfg: &NormConfig) -> Result<SweepResult> {
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "sweep sizes must be strictly increasing".into(),
        ));
    }
    let entries = ns
        .par_iter()
        .map(|&n| {
            let result = discretize(set_x, n).and_then(|x| {
                let y = discretize(set_y, n)?;
                fup_norm_with(&x, &y, cfg)
            });
            SweepEntry { n, result }
        })
        .collect();
    Ok(SweepResult { entries })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentFit {
    pub beta: f64,
    pub log_c: f64,
    pub r_squared: f64,
}

/// Least squares `log σ = log C + β log h` with `h = 1/N`.
pub fn fit_exponent(points: &[(usize, f64)]) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    if let Some((i, &(_, s))) = points.iter().enumerate().find(|(_, p)| !(p.1 > 0.0)) {
        return Err(Error::NonPositive { index: i, value: s });
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| -(n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, s)| s.ln()).collect();
    let (slope, intercept, r2) = least_squares(&xs, &ys);
    Ok(ExponentFit {
        beta: slope,
        log_c: intercept,
        r_squared: r2,
    })
}

/// Slope, intercept and coefficient of determination; a perfect fit of
/// constant data counts as `r² = 1`.
pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let scale = ys.iter().map(|y| y * y).sum::<f64>().max(1.0);
    let r2 = if ss_tot <= 1e-24 * scale {
        if ss_res <= 1e-24 * scale {
            1.0
        } else {
            0.0
        }
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    (slope, intercept, r2)
}

/// Dimension above which [`estimate_c`] switches to the matrix-free path.
pub const DENSE_EIG_LIMIT: usize = 768;

/// Fourier support `discretize(Y)` fattened by `⌈2^k⌉` frequencies on each side.
pub fn fattened_support(y: &IntervalSet, n: usize, k: u32) -> Result<GridSet> {
    let radius = 1usize.checked_shl(k).unwrap_or(usize::MAX);
    Ok(discretize(y, n)?.fatten(radius))
}

/// Largest `c` with `‖1_{U′} f‖ ≥ c‖f‖` for every `f` whose discrete Fourier
/// support lies in the fattened `Y`.
pub fn estimate_c(u: &IntervalSet, y: &IntervalSet, n: usize, k: u32, tol: f64) -> Result<f64> {
    if n < 4 {
        return Err(Error::InvalidParameter("estimate_c needs N >= 4".into()));
    }
    if (k as usize) > n.ilog2() as usize {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds log2 N")));
    }
    let support = fattened_support(y, n, k)?;
    let cells = discretize(u, n)?;
    estimate_c_grid(&cells, &support, tol)
}

pub fn estimate_c_grid(u: &GridSet, support: &GridSet, tol: f64) -> Result<f64> {
    check_grids(u, support)?;
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    if support.len() <= DENSE_EIG_LIMIT {
        return Ok(min_eig_dense(u, support).max(0.0).sqrt());
    }
    // λ_min(P R_U P) = 1 − σ_max(1_{U^c} F^{-1} 1_S)², and F^{-1} is the entrywise
    // conjugate of F so the two restrictions share singular values
    let outside = u.complement();
    let s = fup_norm_with(&outside, support, &NormConfig::with_tol(tol))?.sigma;
    Ok((1.0 - s * s).max(0.0).sqrt())
}

/// Smallest eigenvalue of `G_{ξη} = N^{-1} Σ_{x∈U} e^{2πi x(η−ξ)/N}` over `ξ, η ∈ S`.
pub fn min_eig_dense(u: &GridSet, support: &GridSet) -> f64 {
    let n = u.grid.size;
    // g[d] = N^{-1} Σ_{x∈U} e^{2πi x d/N} for every difference d mod N
    let mut g = vec![Complex64::zero(); n];
    for &x in u.indices() {
        g[x] += Complex64::new(1.0, 0.0);
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut g);
    g.iter_mut().for_each(|z| *z /= n as f64);
    let s = support.indices();
    let m = DMatrix::from_fn(s.len(), s.len(), |r, c| {
        let d = (s[c] + n - s[r]) % n;
        g[d]
    });
    m.symmetric_eigenvalues().min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{make_cantor, CantorSpec};
    use crate::interval::rat;

    fn gs(n: usize, idx: &[usize]) -> GridSet {
        GridSet::new(Grid::new(n).unwrap(), idx.to_vec()).unwrap()
    }

    #[test]
    fn discretize_examples() {
        let full = discretize(&IntervalSet::unit(), 8).unwrap();
        assert_eq!(full.indices(), &[0, 1, 2, 3, 4, 5, 6, 7]);
        let c2 = make_cantor(&CantorSpec::middle_third(2)).unwrap();
        assert_eq!(discretize(&c2, 9).unwrap().indices(), &[0, 2, 6, 8]);
        let pt = IntervalSet::single(rat(1, 3), rat(1, 3)).unwrap();
        assert_eq!(discretize(&pt, 8).unwrap().indices(), &[2]);
        let outside = IntervalSet::single(rat(-2, 1), rat(-1, 1)).unwrap();
        assert!(discretize(&outside, 8).unwrap().is_empty());
    }

    #[test]
    fn unitarity_and_single_entry() {
        for n in [1, 2, 8, 30, 64] {
            let f = GridSet::full(Grid::new(n).unwrap());
            let r = fup_norm(&f, &f, 1e-12).unwrap();
            assert!((r.sigma - 1.0).abs() < 1e-10, "n={n} sigma={}", r.sigma);
        }
        for n in [4, 17, 100] {
            let r = fup_norm(&gs(n, &[1]), &gs(n, &[3]), 1e-12).unwrap();
            assert!((r.sigma - 1.0 / (n as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_sets_give_zero() {
        let r = fup_norm(&gs(8, &[]), &gs(8, &[1, 2]), 1e-9).unwrap();
        assert_eq!((r.sigma, r.iterations), (0.0, 0));
    }

    #[test]
    fn grid_mismatch_rejected() {
        assert_eq!(
            fup_norm(&gs(8, &[1]), &gs(9, &[1]), 1e-9).unwrap_err(),
            Error::GridMismatch(8, 9)
        );
    }

    #[test]
    fn power_matches_dense_on_cantor() {
        let c = make_cantor(&CantorSpec::middle_third(3)).unwrap();
        let x = discretize(&c, 27).unwrap();
        let p = fup_norm(&x, &x, 1e-12).unwrap();
        let d = fup_norm_dense(&x, &x).unwrap();
        assert!((p.sigma - d.sigma).abs() < 1e-8, "{} vs {}", p.sigma, d.sigma);
        assert!(p.residual <= 1e-12);
    }

    #[test]
    fn fit_exact_power_law_and_constant() {
        let pts: Vec<_> = [8usize, 16, 32, 64]
            .iter()
            .map(|&n| (n, (n as f64).powf(-0.5)))
            .collect();
        let f = fit_exponent(&pts).unwrap();
        assert!((f.beta - 0.5).abs() < 1e-12 && (f.r_squared - 1.0).abs() < 1e-12);
        let f = fit_exponent(&[(8, 1.0), (16, 1.0), (32, 1.0)]).unwrap();
        assert_eq!((f.beta, f.r_squared), (0.0, 1.0));
        assert!(matches!(
            fit_exponent(&[(8, 1.0), (16, 1.0)]),
            Err(Error::TooFewPoints { .. })
        ));
        assert!(matches!(
            fit_exponent(&[(8, 1.0), (16, 0.0), (32, 1.0)]),
            Err(Error::NonPositive { index: 1, .. })
        ));
    }

    #[test]
    fn estimate_c_trivial_cases() {
        let unit = IntervalSet::unit();
        let c = estimate_c(&unit, &unit, 16, 0, 1e-10).unwrap();
        assert!((c - 1.0).abs() < 1e-10);
        let c = estimate_c(&IntervalSet::empty(), &unit, 16, 0, 1e-10).unwrap();
        assert!(c.abs() < 1e-7);
        assert_eq!(
            estimate_c(&unit, &IntervalSet::empty(), 16, 0, 1e-10).unwrap_err(),
            Error::EmptySupport
        );
    }

    #[test]
    fn fatten_wraps() {
        assert_eq!(gs(10, &[0]).fatten(2).indices(), &[0, 1, 2, 8, 9]);
        assert_eq!(gs(10, &[0]).fatten(5).len(), 10);
    }

    #[test]
    fn sweep_rejects_unsorted() {
        let u = IntervalSet::unit();
        assert!(norm_sweep(&u, &u, &[16, 8], &NormConfig::default()).is_err());
    }

    #[test]
    fn clustered_spectrum_falls_back_to_krylov() {
        // a few cells removed from X leave B*B within 1e-6 of the identity on a
        // short frequency band, far too clustered for plain power iteration
        let n = 256;
        let x: Vec<usize> = (3..n).collect();
        let y: Vec<usize> = (0..12).chain(n - 11..n).collect();
        let (x, y) = (gs(n, &x), gs(n, &y));
        let r = fup_norm(&x, &y, 1e-13).unwrap();
        assert_eq!(r.method, NormMethod::Lanczos);
        assert!(r.residual <= 1e-13);
        let d = fup_norm_dense(&x, &y).unwrap().sigma;
        assert!((r.sigma - d).abs() <= 1e-12, "{} vs {d}", r.sigma);
    }
}
