//! Exact porosity certification for finite unions of closed intervals.
//!
//! For a fixed window length `L`, the function `x ↦ largest gap of the complement
//! inside [x, x+L]` is piecewise linear with slopes in {-1, 0, +1}. Its minimum is
//! attained either at a point where some gap enters or leaves the window
//! (`x = e` or `x = e - L` for an endpoint `e`) or where a shrinking gap on the left
//! meets a growing gap on the right. All of these candidates are enumerated and
//! evaluated in exact integer arithmetic after scaling to a common denominator.
//!
//! Window lengths are tested on a grid `L_j` (by default eight linear steps per
//! octave, ratio at most 9/8). Certifying a gap of at least `ν·L_{j+1}` at every
//! `L_j` certifies `ν`-porosity for every length in between, since a window of
//! length `L ∈ [L_j, L_{j+1})` contains a window of length `L_j`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::interval::{format_rational, rat, rat_int, Interval, IntervalSet, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PorosityParams {
    pub nu: Rational,
    pub alpha0: Rational,
    pub alpha1: Rational,
}

impl PorosityParams {
    pub fn new(nu: Rational, alpha0: Rational, alpha1: Rational) -> Result<Self> {
        let p = PorosityParams { nu, alpha0, alpha1 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu.is_positive() && self.nu < Rational::one()) {
            return Err(Error::InvalidParameter("nu must lie in (0,1)".into()));
        }
        validate_scales(&self.alpha0, &self.alpha1)
    }
}

fn validate_scales(alpha0: &Rational, alpha1: &Rational) -> Result<()> {
    if !alpha0.is_positive() {
        return Err(Error::InvalidParameter("alpha0 must be positive".into()));
    }
    if alpha1 < alpha0 {
        return Err(Error::InvalidParameter("alpha1 must be >= alpha0".into()));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CertifierConfig {
    /// Number of linear sub-steps per doubling of the window length.
    pub steps_per_octave: u32,
}

impl Default for CertifierConfig {
    fn default() -> Self {
        CertifierConfig { steps_per_octave: 8 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PorosityStatus {
    CertifiedPorous,
    CertifiedNotPorous,
    Unknown,
}

impl PorosityStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            PorosityStatus::CertifiedPorous => "CERTIFIED_POROUS",
            PorosityStatus::CertifiedNotPorous => "CERTIFIED_NOT_POROUS",
            PorosityStatus::Unknown => "UNKNOWN",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PorosityVerdict {
    pub status: PorosityStatus,
    /// A window with no hole of length `ν|I|`; present iff not porous.
    pub witness: Option<Interval>,
    /// Smallest excess of the relative gap over what certification needed
    /// (zero unless certified porous).
    pub margin: Rational,
}

/// Per-length minimum of the largest gap.
#[derive(Clone, Debug)]
pub struct ScaleSample {
    pub length: Rational,
    pub min_gap: Rational,
    /// Window achieving `min_gap`.
    pub window: Interval,
}

#[derive(Clone, Debug)]
pub struct PorosityProfile {
    pub samples: Vec<ScaleSample>,
    /// The empty set is porous for every `ν < 1`.
    pub empty: bool,
}

impl PorosityProfile {
    /// Length that the certificate at sample `j` must cover up to.
    fn next_length(&self, j: usize) -> Option<&Rational> {
        self.samples.get(j + 1).map(|s| &s.length)
    }

    pub fn verdict(&self, nu: &Rational) -> PorosityVerdict {
        if self.empty {
            return PorosityVerdict {
                status: PorosityStatus::CertifiedPorous,
                witness: None,
                margin: Rational::one() - nu,
            };
        }
        let mut unknown = false;
        let mut margin: Option<Rational> = None;
        for (j, s) in self.samples.iter().enumerate() {
            let need_refute = nu * &s.length;
            if s.min_gap < need_refute {
                return PorosityVerdict {
                    status: PorosityStatus::CertifiedNotPorous,
                    witness: Some(s.window.clone()),
                    margin: Rational::zero(),
                };
            }
            let ok = match self.next_length(j) {
                Some(next) => s.min_gap >= nu * next,
                // last sample is alpha1 itself: a closed hole of length ν·α₁ needs a strictly longer gap
                None => s.min_gap > need_refute,
            };
            if !ok {
                unknown = true;
                continue;
            }
            let target = self.next_length(j).unwrap_or(&s.length);
            let slack = (&s.min_gap - nu * target) / &s.length;
            margin = Some(match margin {
                Some(m) if m <= slack => m,
                _ => slack,
            });
        }
        if unknown {
            PorosityVerdict {
                status: PorosityStatus::Unknown,
                witness: None,
                margin: Rational::zero(),
            }
        } else {
            PorosityVerdict {
                status: PorosityStatus::CertifiedPorous,
                witness: None,
                margin: margin.unwrap_or_else(Rational::zero),
            }
        }
    }

    /// Largest `ν` for which every sample certifies, as an exact supremum.
    pub fn certified_supremum(&self) -> Rational {
        if self.empty {
            return Rational::one();
        }
        let mut best: Option<Rational> = None;
        for (j, s) in self.samples.iter().enumerate() {
            let denom = self.next_length(j).unwrap_or(&s.length);
            let v = &s.min_gap / denom;
            best = Some(match best {
                Some(b) if b <= v => b,
                _ => v,
            });
        }
        best.unwrap_or_else(Rational::one)
    }
}

/// Window lengths tested for scales `alpha0..=alpha1`.
pub fn scale_grid(alpha0: &Rational, alpha1: &Rational, cfg: &CertifierConfig) -> Vec<Rational> {
    let steps = cfg.steps_per_octave.max(1) as i64;
    let mut out = Vec::new();
    let mut base = alpha0.clone();
    'outer: loop {
        for s in 0..steps {
            let l = &base * rat(steps + s, steps);
            if &l >= alpha1 {
                break 'outer;
            }
            out.push(l);
        }
        base *= rat_int(2);
    }
    out.push(alpha1.clone());
    out
}

pub fn porosity_profile(
    set: &IntervalSet,
    alpha0: &Rational,
    alpha1: &Rational,
    cfg: &CertifierConfig,
) -> Result<PorosityProfile> {
    validate_scales(alpha0, alpha1)?;
    let lengths = scale_grid(alpha0, alpha1, cfg);
    if set.is_empty() {
        let samples = lengths
            .into_iter()
            .map(|l| ScaleSample {
                window: Interval {
                    lo: Rational::zero(),
                    hi: l.clone(),
                },
                min_gap: l.clone(),
                length: l,
            })
            .collect();
        return Ok(PorosityProfile { samples, empty: true });
    }

    let scaled = ScaledSet::new(set, &lengths);
    let samples = lengths
        .into_iter()
        .map(|length| {
            let (min_gap, lo) = scaled.min_largest_gap(&length);
            ScaleSample {
                window: Interval { hi: &lo + &length, lo },
                min_gap,
                length,
            }
        })
        .collect();
    Ok(PorosityProfile { samples, empty: false })
}

/// Windows `[x, x+length]` whose largest complementary gap is below `threshold`,
/// taken from the candidate positions of the exact minimisation. Nonempty iff
/// the minimum over all windows is below `threshold`.
pub fn deficient_windows(set: &IntervalSet, length: &Rational, threshold: &Rational) -> Vec<Interval> {
    if set.is_empty() {
        return Vec::new();
    }
    let scaled = ScaledSet::new(set, std::slice::from_ref(length));
    scaled
        .deficient(length, threshold)
        .into_iter()
        .map(|lo| Interval { hi: &lo + length, lo })
        .collect()
}

enum GapTables {
    Small(GapTable<i128>),
    Big(GapTable<BigInt>),
}

/// A set scaled to integer endpoints over a common denominator.
struct ScaledSet {
    scale: BigInt,
    tables: GapTables,
}

impl ScaledSet {
    fn new(set: &IntervalSet, lengths: &[Rational]) -> Self {
        // common denominator, doubled so that crossing points stay integral
        let mut den = BigInt::one();
        for iv in set.intervals() {
            den = den.lcm(iv.lo.denom()).lcm(iv.hi.denom());
        }
        for l in lengths {
            den = den.lcm(l.denom());
        }
        let scale = den * BigInt::from(2);
        let ends: Vec<(BigInt, BigInt)> = set
            .intervals()
            .iter()
            .map(|iv| (scale_to_int(&iv.lo, &scale), scale_to_int(&iv.hi, &scale)))
            .collect();
        let limit = BigInt::one() << 120u32;
        let fits = ends
            .iter()
            .flat_map(|(a, b)| [a, b])
            .chain(lengths.iter().map(|l| l.numer()))
            .all(|v| v.abs() < limit)
            && lengths.iter().all(|l| scale_to_int(l, &scale).abs() < limit);
        let tables = if fits {
            let ends: Vec<(i128, i128)> = ends
                .iter()
                .map(|(a, b)| (a.to_i128().unwrap(), b.to_i128().unwrap()))
                .collect();
            GapTables::Small(GapTable::new(&ends))
        } else {
            GapTables::Big(GapTable::new(&ends))
        };
        ScaledSet { scale, tables }
    }

    fn back(&self, v: BigInt) -> Rational {
        Rational::new(v, self.scale.clone())
    }

    fn min_largest_gap(&self, length: &Rational) -> (Rational, Rational) {
        let l = scale_to_int(length, &self.scale);
        let (m, x) = match &self.tables {
            GapTables::Small(t) => {
                let (m, x) = t.min_largest_gap(l.to_i128().expect("length fits"));
                (BigInt::from(m), BigInt::from(x))
            }
            GapTables::Big(t) => t.min_largest_gap(l),
        };
        (self.back(m), self.back(x))
    }

    fn deficient(&self, length: &Rational, threshold: &Rational) -> Vec<Rational> {
        let l = scale_to_int(length, &self.scale);
        // gaps are integers in scaled units: gap < threshold  <=>  gap < ceil(threshold·scale)
        let thr = (threshold * Rational::from_integer(self.scale.clone()))
            .ceil()
            .to_integer();
        let xs: Vec<BigInt> = match &self.tables {
            GapTables::Small(t) => {
                let thr = thr.to_i128().unwrap_or(i128::MAX);
                t.deficient(l.to_i128().expect("length fits"), thr)
                    .into_iter()
                    .map(BigInt::from)
                    .collect()
            }
            GapTables::Big(t) => t.deficient(l, thr),
        };
        xs.into_iter().map(|x| self.back(x)).collect()
    }
}

fn scale_to_int(r: &Rational, scale: &BigInt) -> BigInt {
    (r * Rational::from_integer(scale.clone())).to_integer()
}

pub fn check_porosity(set: &IntervalSet, params: &PorosityParams) -> Result<PorosityVerdict> {
    check_porosity_with(set, params, &CertifierConfig::default())
}

pub fn check_porosity_with(
    set: &IntervalSet,
    params: &PorosityParams,
    cfg: &CertifierConfig,
) -> Result<PorosityVerdict> {
    params.validate()?;
    Ok(porosity_profile(set, &params.alpha0, &params.alpha1, cfg)?.verdict(&params.nu))
}

/// Resolution of the grid searched by [`max_porosity`].
pub const POROSITY_SEARCH_BITS: u32 = 10;

/// Largest `ν = t·2^{-10}` (`t ≤ 2^{10} - 1`) that [`check_porosity`] certifies;
/// zero if none does.
pub fn max_porosity(set: &IntervalSet, alpha0: &Rational, alpha1: &Rational) -> Result<Rational> {
    max_porosity_with(set, alpha0, alpha1, &CertifierConfig::default(), POROSITY_SEARCH_BITS)
}

pub fn max_porosity_with(
    set: &IntervalSet,
    alpha0: &Rational,
    alpha1: &Rational,
    cfg: &CertifierConfig,
    bits: u32,
) -> Result<Rational> {
    let profile = porosity_profile(set, alpha0, alpha1, cfg)?;
    let steps = BigInt::one() << bits;
    let cap = &steps - BigInt::one();
    // certification holds for ν <= sup, except the strict inequality at the last length
    let sup = profile.certified_supremum();
    let mut t = (sup * Rational::from_integer(steps.clone())).floor().to_integer();
    if t > cap {
        t = cap;
    }
    while t.is_positive() {
        let nu = BigRational::new(t.clone(), steps.clone());
        if profile.verdict(&nu).status == PorosityStatus::CertifiedPorous {
            return Ok(nu);
        }
        t -= 1;
    }
    Ok(Rational::zero())
}

/// One piece of [`decompose_scales`], with the best porosity certified for it on
/// scales `h` to 1.
#[derive(Clone, Debug)]
pub struct ScalePiece {
    pub index: usize,
    pub set: IntervalSet,
    pub certified_nu: Rational,
}

/// Splits `set` into the pieces `set ∩ ⋃_j [h^ρ j + (h/2)ℓ, h^ρ j + (h/2)(ℓ+1)]`,
/// `ℓ = 0..=⌈2h^{ρ-1}⌉`. Blocks are clipped to their period `[h^ρ j, h^ρ (j+1)]`
/// so the pieces overlap only at endpoints.
pub fn decompose_scales(set: &IntervalSet, h: &Rational, rho: &Rational) -> Result<Vec<ScalePiece>> {
    if !(h.is_positive() && h < &Rational::one()) {
        return Err(Error::InvalidParameter("h must lie in (0,1)".into()));
    }
    if !(rho.is_positive() && rho <= &Rational::one()) {
        return Err(Error::InvalidParameter("rho must lie in (0,1]".into()));
    }
    let one = Rational::one();
    let certify = |s: &IntervalSet| -> Result<Rational> {
        if s.is_empty() {
            Ok(Rational::zero())
        } else {
            max_porosity(s, h, &one)
        }
    };
    if rho == &one {
        return Ok(vec![ScalePiece {
            index: 0,
            certified_nu: certify(set)?,
            set: set.clone(),
        }]);
    }
    let period = rational_power(h, rho)?;
    let half = h / rat_int(2);
    let ratio = &period / h;
    let last = (rat_int(2) * &ratio)
        .ceil()
        .to_integer()
        .to_usize()
        .ok_or_else(|| Error::InvalidParameter("too many scale pieces".into()))?;
    let Some(bbox) = set.bounding_box() else {
        return Ok((0..=last)
            .map(|index| ScalePiece {
                index,
                set: IntervalSet::empty(),
                certified_nu: Rational::zero(),
            })
            .collect());
    };
    let j_lo = (&bbox.lo / &period).floor().to_integer();
    let j_hi = (&bbox.hi / &period).floor().to_integer();
    let mut pieces = Vec::with_capacity(last + 1);
    for ell in 0..=last {
        let ell_r = rat_int(ell as i64);
        let mut blocks = Vec::new();
        let mut j = j_lo.clone();
        while j <= j_hi {
            let origin = Rational::from_integer(j.clone()) * &period;
            let end_of_period = &origin + &period;
            let lo = &origin + &half * &ell_r;
            if lo < end_of_period {
                let hi = std::cmp::min(&origin + &half * (&ell_r + &one), end_of_period);
                blocks.push(Interval { lo, hi });
            }
            j += 1;
        }
        pieces.push(set.intersect(&IntervalSet::from_intervals(blocks)));
    }
    // a block edge meeting the set in a single point duplicates an endpoint
    // already carried by the neighbouring piece
    let solid: Vec<Interval> = pieces
        .iter()
        .flat_map(|p| p.intervals().iter().filter(|iv| iv.lo < iv.hi).cloned())
        .collect();
    let solid = IntervalSet::from_intervals(solid);
    pieces
        .into_iter()
        .enumerate()
        .map(|(index, piece)| {
            let kept = piece
                .intervals()
                .iter()
                .filter(|iv| iv.lo < iv.hi || !solid.contains(&iv.lo))
                .cloned()
                .collect();
            let piece = IntervalSet::from_intervals(kept);
            Ok(ScalePiece {
                index,
                certified_nu: certify(&piece)?,
                set: piece,
            })
        })
        .collect()
}

/// `base^exp` when it is rational (numerator and denominator are perfect powers).
pub fn rational_power(base: &Rational, exp: &Rational) -> Result<Rational> {
    let q = exp
        .denom()
        .to_u32()
        .ok_or_else(|| Error::InvalidParameter("exponent denominator too large".into()))?;
    let p = exp
        .numer()
        .to_i32()
        .ok_or_else(|| Error::InvalidParameter("exponent numerator too large".into()))?;
    let root = |v: &BigInt| -> Option<BigInt> {
        let r = v.nth_root(q);
        (num_traits::pow(r.clone(), q as usize) == *v).then_some(r)
    };
    let (Some(n), Some(d)) = (root(base.numer()), root(base.denom())) else {
        return Err(Error::InvalidParameter(format!(
            "{}^{} is irrational",
            format_rational(base),
            format_rational(exp)
        )));
    };
    let r = Rational::new(n, d);
    Ok(if p >= 0 {
        num_traits::pow(r, p as usize)
    } else {
        num_traits::pow(r.recip(), (-p) as usize)
    })
}

/// Exact integer arithmetic needed by the gap scan.
trait Exact: Clone + Ord + std::fmt::Debug {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn half(&self) -> Self;
    fn nil() -> Self;
}

impl Exact for i128 {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn half(&self) -> Self {
        self.div_euclid(2)
    }
    fn nil() -> Self {
        0
    }
}

impl Exact for BigInt {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn half(&self) -> Self {
        self.div_floor(&BigInt::from(2))
    }
    fn nil() -> Self {
        <BigInt as Zero>::zero()
    }
}

/// Sorted disjoint closed intervals `[a_i, b_i]` and a sparse table over the
/// lengths of the bounded gaps `(b_{i-1}, a_i)`.
struct GapTable<T> {
    a: Vec<T>,
    b: Vec<T>,
    /// `sparse[p][i]` = max gap length over gaps `i+1 ..= i + 2^p` (bounded gaps only).
    sparse: Vec<Vec<T>>,
}

impl<T: Exact> GapTable<T> {
    fn new(ends: &[(T, T)]) -> Self
    where
        T: Clone,
    {
        let a: Vec<T> = ends.iter().map(|(x, _)| x.clone()).collect();
        let b: Vec<T> = ends.iter().map(|(_, y)| y.clone()).collect();
        let n = a.len();
        // bounded gap k (1 <= k < n) is (b[k-1], a[k]); stored at index k-1
        let base: Vec<T> = (1..n).map(|k| a[k].sub(&b[k - 1])).collect();
        let mut sparse = vec![base];
        let mut width = 1;
        while width * 2 <= sparse[0].len() {
            let prev = sparse.last().unwrap();
            let next: Vec<T> = (0..prev.len() - width)
                .map(|i| std::cmp::max(&prev[i], &prev[i + width]).clone())
                .collect();
            sparse.push(next);
            width *= 2;
        }
        GapTable { a, b, sparse }
    }

    /// Max length over bounded gaps with indices in `lo..=hi` (1-based gap index).
    fn range_max(&self, lo: usize, hi: usize) -> Option<T> {
        if lo > hi {
            return None;
        }
        let (l, r) = (lo - 1, hi - 1);
        let span = r - l + 1;
        let p = (usize::BITS - 1 - span.leading_zeros()) as usize;
        let w = 1usize << p;
        Some(std::cmp::max(&self.sparse[p][l], &self.sparse[p][r + 1 - w]).clone())
    }

    /// Largest gap of the complement inside `[x, x+len]`.
    fn largest_gap(&self, x: &T, len: &T) -> T {
        let n = self.a.len();
        let right = x.add(len);
        // gap k is (b[k-1], a[k]) with b[-1] = -inf, a[n] = +inf
        let k_lo = self.a.partition_point(|v| v <= x); // first gap whose right end > x
        let k_hi = self.b.partition_point(|v| v < &right); // last gap whose left end < x+len
        if k_lo > k_hi {
            return T::nil();
        }
        let clip = |k: usize| -> T {
            let lo = if k == 0 {
                x.clone()
            } else {
                std::cmp::max(&self.b[k - 1], x).clone()
            };
            let hi = if k == n {
                right.clone()
            } else {
                std::cmp::min(&self.a[k], &right).clone()
            };
            if hi > lo {
                hi.sub(&lo)
            } else {
                T::nil()
            }
        };
        let mut best = clip(k_lo);
        if k_hi != k_lo {
            let r = clip(k_hi);
            if r > best {
                best = r;
            }
            if k_hi > k_lo + 1 {
                if let Some(m) = self.range_max(k_lo + 1, k_hi - 1) {
                    if m > best {
                        best = m;
                    }
                }
            }
        }
        best
    }

    /// Minimum over all `x` of [`Self::largest_gap`] together with a minimizing `x`.
    fn min_largest_gap(&self, len: T) -> (T, T) {
        let mut best: Option<(T, T)> = None;
        for x in self.candidates(&len) {
            let g = self.largest_gap(&x, &len);
            match &best {
                Some((bg, bx)) if (bg, bx) <= (&g, &x) => {}
                _ => best = Some((g, x)),
            }
        }
        best.expect("nonempty set yields candidates")
    }

    /// Sorted, deduplicated candidate positions whose largest gap is below `threshold`.
    fn deficient(&self, len: T, threshold: T) -> Vec<T> {
        let mut xs: Vec<T> = self
            .candidates(&len)
            .into_iter()
            .filter(|x| self.largest_gap(x, &len) < threshold)
            .collect();
        xs.sort();
        xs.dedup();
        xs
    }

    /// Every position at which the largest-gap function can attain a local minimum.
    fn candidates(&self, len: &T) -> Vec<T> {
        let n = self.a.len();
        let mut out = Vec::with_capacity(4 * n);
        for i in 0..n {
            for e in [&self.a[i], &self.b[i]] {
                out.push(e.clone());
                out.push(e.sub(len));
            }
        }
        // shrinking gap ending at a[i] meets growing gap starting at b[j]:
        // x = (a[i] + b[j] - len)/2 with x in (b[i-1], a[i]) and x + len in (b[j], a[j+1])
        for i in 0..n {
            let upper = self.a[i].add(len); // need b[j] <= a[i] + len
            let start = if i == 0 {
                0
            } else {
                let lower = self.b[i - 1].add(&self.b[i - 1]).sub(&self.a[i]).add(len);
                self.b.partition_point(|v| v <= &lower).max(i)
            };
            let mut j = start;
            while j < n && self.b[j] <= upper {
                let x = self.a[i].add(&self.b[j]).sub(len).half();
                let xr = x.add(len);
                if j + 1 == n || xr < self.a[j + 1] {
                    out.push(x);
                }
                j += 1;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{make_cantor, CantorSpec};

    fn p(nu: Rational, a0: Rational, a1: Rational) -> PorosityParams {
        PorosityParams::new(nu, a0, a1).unwrap()
    }

    #[test]
    fn empty_set_is_porous() {
        let v = check_porosity(&IntervalSet::empty(), &p(rat(1, 2), rat(1, 8), rat_int(1))).unwrap();
        assert_eq!(v.status, PorosityStatus::CertifiedPorous);
        assert!(v.witness.is_none());
    }

    #[test]
    fn unit_interval_is_not_porous() {
        let v = check_porosity(&IntervalSet::unit(), &p(rat(1, 10), rat(1, 16), rat(1, 4))).unwrap();
        assert_eq!(v.status, PorosityStatus::CertifiedNotPorous);
        let w = v.witness.unwrap();
        assert!(w.length() >= rat(1, 16) && w.length() <= rat(1, 4));
        // the witness window sits inside [0,1], so it contains no gap at all
        assert!(IntervalSet::unit().complement_within(&w).measure().is_zero());
    }

    #[test]
    fn scale_grid_shape() {
        let g = scale_grid(&rat(1, 8), &rat_int(1), &CertifierConfig::default());
        assert_eq!(g.first().unwrap(), &rat(1, 8));
        assert_eq!(g.last().unwrap(), &rat_int(1));
        assert_eq!(g.len(), 25);
        for w in g.windows(2) {
            assert!(w[1] > w[0]);
            assert!(&w[1] / &w[0] <= rat(9, 8));
        }
        let g = scale_grid(&rat(1, 2), &rat(1, 2), &CertifierConfig::default());
        assert_eq!(g, vec![rat(1, 2)]);
    }

    #[test]
    fn crossing_minimum_is_found() {
        // two gaps around a set interval [4,6]: the worst window of length 6 sits
        // symmetrically, seeing gaps of length 2 on each side.
        let s = IntervalSet::from_intervals(vec![
            Interval::new(rat_int(0), rat_int(4)).unwrap(),
            Interval::new(rat_int(6), rat_int(12)).unwrap(),
            Interval::new(rat_int(14), rat_int(20)).unwrap(),
        ]);
        let prof = porosity_profile(&s, &rat_int(8), &rat_int(8), &CertifierConfig::default()).unwrap();
        // window [5, 13]: gaps (4,6) ∩ = (5,6) len 1, (12,14) ∩ = (12,13) len 1
        assert_eq!(prof.samples[0].min_gap, rat_int(1));
    }

    #[test]
    fn cantor_is_porous_at_one_ninth() {
        let s = make_cantor(&CantorSpec::middle_third(6)).unwrap();
        let v = check_porosity(&s, &p(rat(1, 9), rat(1, 243), rat_int(1))).unwrap();
        assert_eq!(v.status, PorosityStatus::CertifiedPorous);
        // at the finest scale a window equal to a solid level-6 interval has no hole
        let v = check_porosity(&s, &p(rat(1, 9), rat(1, 729), rat_int(1))).unwrap();
        assert_eq!(v.status, PorosityStatus::CertifiedNotPorous);
    }

    #[test]
    fn max_porosity_edge_cases() {
        let cap = rat(1023, 1024);
        assert_eq!(
            max_porosity(&IntervalSet::empty(), &rat(1, 8), &rat_int(1)).unwrap(),
            cap
        );
        assert_eq!(
            max_porosity(&IntervalSet::unit(), &rat(1, 2), &rat(1, 2)).unwrap(),
            Rational::zero()
        );
        let s = make_cantor(&CantorSpec::middle_third(6)).unwrap();
        let nu = max_porosity(&s, &rat(1, 243), &rat_int(1)).unwrap();
        assert!(nu > Rational::zero() && nu <= rat(1, 3), "{nu}");
        let check = |nu: &Rational| {
            check_porosity(&s, &p(nu.clone(), rat(1, 243), rat_int(1)))
                .unwrap()
                .status
        };
        assert_eq!(check(&nu), PorosityStatus::CertifiedPorous);
        assert_ne!(check(&(&nu + rat(1, 1024))), PorosityStatus::CertifiedPorous);
    }

    #[test]
    fn rational_power_cases() {
        assert_eq!(rational_power(&rat(1, 256), &rat(1, 2)).unwrap(), rat(1, 16));
        assert_eq!(rational_power(&rat(1, 256), &rat(3, 4)).unwrap(), rat(1, 64));
        assert_eq!(rational_power(&rat(1, 256), &rat(-1, 2)).unwrap(), rat_int(16));
        assert!(rational_power(&rat(1, 2), &rat(1, 2)).is_err());
    }

    #[test]
    fn decompose_rho_one_returns_set() {
        let s = make_cantor(&CantorSpec::middle_third(3)).unwrap();
        let pieces = decompose_scales(&s, &rat(1, 27), &rat_int(1)).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].set, s);
    }

    #[test]
    fn decompose_unit_interval_counts() {
        let pieces = decompose_scales(&IntervalSet::unit(), &rat(1, 256), &rat(1, 2)).unwrap();
        assert_eq!(pieces.len(), 33);
        for piece in &pieces[..32] {
            for iv in piece.set.intervals() {
                assert_eq!(iv.length(), rat(1, 512));
            }
        }
        assert!(pieces[32].set.is_empty());
        let union = pieces.iter().fold(IntervalSet::empty(), |acc, p| acc.union(&p.set));
        assert_eq!(union, IntervalSet::unit());
        assert!(decompose_scales(&IntervalSet::unit(), &rat_int(1), &rat(1, 2)).is_err());
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(PorosityParams::new(rat_int(1), rat(1, 2), rat_int(1)).is_err());
        assert!(PorosityParams::new(rat(1, 2), rat(0, 1), rat_int(1)).is_err());
        assert!(PorosityParams::new(rat(1, 2), rat(1, 2), rat(1, 4)).is_err());
    }
}
