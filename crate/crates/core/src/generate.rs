//! Canonical porous test sets: base-M Cantor sets and seeded random hole sets.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::interval::{rat, rat_int, Interval, IntervalSet, Rational};
use crate::porosity::{check_porosity, deficient_windows, scale_grid, CertifierConfig, PorosityParams, PorosityStatus};

pub const DEFAULT_INTERVAL_CAP: u64 = 1 << 24;

/// Resolution of hole positions in [`make_random_porous`].
const POSITION_STEPS: i64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CantorSpec {
    pub base: u32,
    pub digits: Vec<u32>,
    pub depth: u32,
}

impl CantorSpec {
    pub fn new(base: u32, digits: Vec<u32>, depth: u32) -> Result<Self> {
        let spec = CantorSpec { base, digits, depth };
        spec.validate()?;
        Ok(spec)
    }

    /// Middle-third Cantor set of the given depth.
    pub fn middle_third(depth: u32) -> Self {
        CantorSpec {
            base: 3,
            digits: vec![0, 2],
            depth,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.base < 2 {
            return Err(Error::InvalidParameter("Cantor base must be >= 2".into()));
        }
        let mut d = self.digits.clone();
        d.sort_unstable();
        d.dedup();
        if d.len() != self.digits.len() {
            return Err(Error::InvalidParameter("Cantor digits must be distinct".into()));
        }
        if d.is_empty() || d.len() >= self.base as usize {
            return Err(Error::InvalidParameter(
                "Cantor digits must be a nonempty proper subset of 0..base".into(),
            ));
        }
        if d.iter().any(|&x| x >= self.base) {
            return Err(Error::InvalidParameter(format!(
                "Cantor digit out of range for base {}",
                self.base
            )));
        }
        Ok(())
    }

    pub fn interval_count(&self) -> u128 {
        (self.digits.len() as u128).saturating_pow(self.depth)
    }
}

pub fn make_cantor(spec: &CantorSpec) -> Result<IntervalSet> {
    make_cantor_with_cap(spec, DEFAULT_INTERVAL_CAP)
}

/// Union over digit strings of `[Σ dᵢ M^{-i}, Σ dᵢ M^{-i} + M^{-K}]`.
pub fn make_cantor_with_cap(spec: &CantorSpec, cap: u64) -> Result<IntervalSet> {
    spec.validate()?;
    let count = spec.interval_count();
    if count > cap as u128 {
        return Err(Error::TooManyIntervals { count, cap });
    }
    let base = BigInt::from(spec.base);
    let mut digits = spec.digits.clone();
    digits.sort_unstable();
    // left endpoints as integers over base^depth, built level by level
    let mut lefts: Vec<BigInt> = vec![BigInt::zero()];
    for _ in 0..spec.depth {
        let mut next = Vec::with_capacity(lefts.len() * digits.len());
        for l in &lefts {
            let scaled = l * &base;
            for &d in &digits {
                next.push(&scaled + BigInt::from(d));
            }
        }
        lefts = next;
    }
    let den = num_traits::pow(base, spec.depth as usize);
    let intervals = lefts
        .into_iter()
        .map(|l| {
            let hi = &l + BigInt::one();
            Interval {
                lo: Rational::new(l, den.clone()),
                hi: Rational::new(hi, den.clone()),
            }
        })
        .collect();
    Ok(IntervalSet::from_intervals(intervals))
}

/// Random hole set in `[0,1]`: at every level `k = 1..=depth` each dyadic cell of
/// length `2^{-k}` loses a hole of length `2ν·2^{-k}` at a seeded position, then
/// extra seeded holes are carved until the set certifies as `ν`-porous on scales
/// `2^{-depth}` to 1.
pub fn make_random_porous(nu: &Rational, depth: u32, seed: u64) -> Result<IntervalSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let set = level_holes(nu, depth, &mut rng)?;
    repair_porosity(set, nu, depth, &mut rng)
}

fn level_holes(nu: &Rational, depth: u32, rng: &mut ChaCha8Rng) -> Result<IntervalSet> {
    if !nu.is_positive() || nu > &rat(1, 3) {
        return Err(Error::InvalidParameter("random porous sets need 0 < nu <= 1/3".into()));
    }
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be >= 1".into()));
    }
    if depth > 20 {
        return Err(Error::InvalidParameter("depth above 20 is not supported".into()));
    }
    let mut holes = Vec::new();
    for k in 1..=depth {
        let cell = rat(1, 1i64 << k);
        let hole = rat_int(2) * nu * &cell;
        let slack = &cell - &hole;
        for j in 0..(1i64 << k) {
            let u: i64 = rng.gen_range(0..=POSITION_STEPS);
            let start = &cell * rat_int(j) + &slack * rat(u, POSITION_STEPS);
            holes.push(Interval {
                hi: &start + &hole,
                lo: start,
            });
        }
    }
    let unit = Interval {
        lo: Rational::zero(),
        hi: Rational::one(),
    };
    Ok(IntervalSet::from_intervals(holes).complement_within(&unit))
}

/// Bound on repair rounds; each round strictly enlarges every flagged gap.
const REPAIR_ROUNDS: usize = 64;

/// The level-by-level holes alone do not guarantee porosity at every scale in
/// `[2^{-depth}, 1]`: two holes from neighbouring cells can land far apart. This
/// pass asks the certifier for every window that is too solid and carves a
/// seeded hole into it, repeating until the set certifies.
fn repair_porosity(mut set: IntervalSet, nu: &Rational, depth: u32, rng: &mut ChaCha8Rng) -> Result<IntervalSet> {
    let alpha0 = rat(1, 1i64 << depth);
    let alpha1 = rat_int(1);
    let params = PorosityParams::new(nu.clone(), alpha0.clone(), alpha1.clone())?;
    let cfg = CertifierConfig::default();
    let grid = scale_grid(&alpha0, &alpha1, &cfg);
    let unit = IntervalSet::unit();
    for _ in 0..REPAIR_ROUNDS {
        if check_porosity(&set, &params)?.status == PorosityStatus::CertifiedPorous {
            return Ok(set);
        }
        let mut carved = Vec::new();
        for (j, length) in grid.iter().enumerate() {
            let next = grid.get(j + 1).unwrap_or(&alpha1);
            let target = nu * next;
            // the last size needs a strict inequality; aim a little above it
            let threshold = if j + 1 == grid.len() {
                &target * rat(9, 8)
            } else {
                target.clone()
            };
            let hole = (&target * rat(9, 8)).min(length.clone());
            let slack = length - &hole;
            let mut last_hi: Option<Rational> = None;
            for w in deficient_windows(&set, length, &threshold) {
                if last_hi.as_ref().is_some_and(|h| w.lo < *h) {
                    continue;
                }
                let u: i64 = rng.gen_range(0..=POSITION_STEPS);
                let start = &w.lo + &slack * rat(u, POSITION_STEPS);
                carved.push(Interval {
                    hi: &start + &hole,
                    lo: start,
                });
                last_hi = Some(w.hi);
            }
        }
        if carved.is_empty() {
            break;
        }
        let keep = IntervalSet::from_intervals(carved).complement_within(&Interval {
            lo: Rational::zero(),
            hi: Rational::one(),
        });
        let cut = set.intersect(&keep).intersect(&unit);
        set = IntervalSet::from_intervals(cut.intervals().iter().filter(|iv| iv.lo < iv.hi).cloned().collect());
    }
    if check_porosity(&set, &params)?.status == PorosityStatus::CertifiedPorous {
        Ok(set)
    } else {
        Err(Error::InvalidParameter(format!(
            "could not repair random set to certified porosity at nu = {nu}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_depth_one_and_zero() {
        let s = make_cantor(&CantorSpec::middle_third(1)).unwrap();
        assert_eq!(
            s.intervals(),
            &[
                Interval::new(rat(0, 1), rat(1, 3)).unwrap(),
                Interval::new(rat(2, 3), rat(1, 1)).unwrap()
            ]
        );
        assert_eq!(make_cantor(&CantorSpec::middle_third(0)).unwrap(), IntervalSet::unit());
    }

    #[test]
    fn cantor_depth_five_counts_and_measure() {
        let s = make_cantor(&CantorSpec::middle_third(5)).unwrap();
        assert_eq!(s.len(), 32);
        assert_eq!(s.measure(), rat(32, 243));
    }

    #[test]
    fn cantor_adjacent_digits_merge() {
        let spec = CantorSpec::new(4, vec![0, 1], 1).unwrap();
        let s = make_cantor(&spec).unwrap();
        assert_eq!(s.intervals(), &[Interval::new(rat(0, 1), rat(1, 2)).unwrap()]);
    }

    #[test]
    fn cantor_validation_and_cap() {
        assert!(CantorSpec::new(3, vec![0, 1, 2], 2).is_err());
        assert!(CantorSpec::new(3, vec![], 2).is_err());
        assert!(CantorSpec::new(3, vec![0, 3], 2).is_err());
        assert!(CantorSpec::new(1, vec![0], 2).is_err());
        let err = make_cantor_with_cap(&CantorSpec::middle_third(10), 1000).unwrap_err();
        assert!(matches!(err, Error::TooManyIntervals { count: 1024, .. }));
    }

    #[test]
    fn random_depth_one_has_two_holes() {
        let unit = Interval::new(rat(0, 1), rat(1, 1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let raw = level_holes(&rat(1, 10), 1, &mut rng).unwrap();
        let gaps = raw.complement_within(&unit);
        assert_eq!(raw.measure(), rat(4, 5));
        assert_eq!(gaps.len(), 2);
        for g in gaps.intervals() {
            assert_eq!(g.length(), rat(1, 10));
        }
        assert!(gaps.intervals()[0].hi <= rat(1, 2));
        assert!(gaps.intervals()[1].lo >= rat(1, 2));
        // a top-level hole of length exactly ν cannot host a closed J of length ν,
        // so the finished set keeps both holes and gains more
        let s = make_random_porous(&rat(1, 10), 1, 42).unwrap();
        assert_eq!(s.intersect(&gaps).measure(), rat(0, 1));
        assert!(s.measure() < rat(4, 5));
    }

    #[test]
    fn random_sets_certify() {
        for (nu, depth, seed) in [(rat(1, 10), 8, 7), (rat(1, 5), 8, 3), (rat(1, 3), 6, 1)] {
            let s = make_random_porous(&nu, depth, seed).unwrap();
            let params = PorosityParams::new(nu, rat(1, 1i64 << depth), rat(1, 1)).unwrap();
            assert_eq!(
                check_porosity(&s, &params).unwrap().status,
                PorosityStatus::CertifiedPorous
            );
        }
    }

    #[test]
    fn random_is_deterministic() {
        let a = make_random_porous(&rat(1, 10), 6, 7).unwrap();
        let b = make_random_porous(&rat(1, 10), 6, 7).unwrap();
        let c = make_random_porous(&rat(1, 10), 6, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn random_rejects_bad_params() {
        assert!(make_random_porous(&rat(1, 2), 3, 1).is_err());
        assert!(make_random_porous(&rat(0, 1), 3, 1).is_err());
        assert!(make_random_porous(&rat(1, 10), 0, 1).is_err());
    }
}
