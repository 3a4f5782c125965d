//! Mixed-class Boltzmann primitives: Bernoulli and conditioned Poisson laws,
//! rejection, the two re-rooting loops, and label distribution.
//!
//! Objects are built unlabelled ("shapes"); labels are thrown once at the
//! very end of a top-level generation.

use crate::rng::RandomSource;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("numeric underflow in conditioned Poisson (lambda={lambda}, d={d})")]
    PoissonUnderflow { d: u64, lambda: f64 },
    #[error("generation gave up after {ops} primitive operations (cap {cap}); oracle likely mistuned")]
    GiveUp { ops: u64, cap: u64 },
    #[error("rejection invariant violated: acceptance probability {p} > 1 ({context})")]
    InvariantViolation { p: f64, context: &'static str },
    #[error("internal bijection invariant failed: {0}")]
    Bijection(String),
}

/// Per-object atom counts plus the running cost counter.
///
/// `primitive_ops` counts node/edge creations and coin flips; label
/// distribution is counted too (the cost model leaves this open, so it is
/// included and reported).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SizeCounters {
    pub l_size: u64,
    pub u_size: u64,
    pub primitive_ops: u64,
}

/// Shared generation state: one random source, one op budget.
pub struct GenCx {
    pub rng: RandomSource,
    pub ops: u64,
    pub budget: u64,
}

pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

impl GenCx {
    pub fn new(seed: u64) -> Self {
        GenCx {
            rng: RandomSource::new(seed),
            ops: 0,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(seed: u64, budget: u64) -> Self {
        GenCx {
            rng: RandomSource::new(seed),
            ops: 0,
            budget,
        }
    }

    /// Charge `n` primitive operations against the budget.
    pub fn charge(&mut self, n: u64) -> Result<(), GenError> {
        self.ops += n;
        if self.ops > self.budget {
            Err(GenError::GiveUp {
                ops: self.ops,
                cap: self.budget,
            })
        } else {
            Ok(())
        }
    }

    /// Bernoulli draw: true with probability `p`.
    ///
    /// A slack of 1e-12 outside [0,1] is clamped; anything worse is a
    /// parameter error.
    pub fn bern(&mut self, p: f64) -> Result<bool, GenError> {
        const SLACK: f64 = 1e-12;
        if !(-SLACK..=1.0 + SLACK).contains(&p) || p.is_nan() {
            return Err(GenError::Parameter(format!("bernoulli p = {p}")));
        }
        self.charge(1)?;
        let p = p.clamp(0.0, 1.0);
        Ok(self.rng.uniform() < p)
    }

    /// Conditioned Poisson draw: k >= d with P(k) proportional to lambda^k/k!.
    ///
    /// Inverse-transform loop with a running product; the number of loop
    /// iterations (k - d + 1) is charged as primitive operations.
    pub fn pois_geq(&mut self, d: u64, lambda: f64) -> Result<u64, GenError> {
        if lambda < 0.0 || lambda.is_nan() {
            return Err(GenError::Parameter(format!("poisson lambda = {lambda}")));
        }
        if d >= 1 && lambda == 0.0 {
            return Err(GenError::Parameter(
                "poisson with d >= 1 requires lambda > 0".into(),
            ));
        }
        if lambda == 0.0 {
            self.charge(1)?;
            return Ok(0);
        }
        // exp_{>=d}(lambda) = sum_{k>=d} lambda^k/k!, summed forward to avoid
        // the catastrophic cancellation of e^lambda - partial sums at small lambda
        let mut term = 1.0f64;
        for j in 0..d {
            term *= lambda / (j + 1) as f64;
        }
        // term is now lambda^d/d!
        let mut tail = 0.0f64;
        let mut t = term;
        let mut k = d;
        while t > tail * 1e-18 || k == d {
            tail += t;
            t *= lambda / (k + 1) as f64;
            k += 1;
            if k > d + 2000 {
                break;
            }
        }
        let u = self.rng.uniform() * tail;
        self.charge(1)?;
        let cap = d + 10 * (lambda as u64 + 50);
        let mut acc = 0.0f64;
        let mut k = d;
        loop {
            self.charge(1)?;
            acc += term;
            if u < acc {
                return Ok(k);
            }
            if k > cap {
                return Err(GenError::PoissonUnderflow { d, lambda });
            }
            term *= lambda / (k + 1) as f64;
            k += 1;
        }
    }

    /// Uniform choice among weighted alternatives; returns the index.
    pub fn choose_weighted(&mut self, weights: &[f64]) -> Result<usize, GenError> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| *w < -1e-15 * total) {
            return Err(GenError::Parameter(format!(
                "weighted choice over {weights:?}"
            )));
        }
        self.charge(1)?;
        let u = self.rng.uniform() * total;
        let mut acc = 0.0;
        for (i, w) in weights.iter().enumerate() {
            acc += w.max(0.0);
            if u < acc {
                return Ok(i);
            }
        }
        Ok(weights.len() - 1)
    }
}

/// Repeat `gen` until `accept` passes a Bernoulli test; the returned object
/// is distributed proportionally to weight times acceptance.
pub fn reject_filter<T>(
    cx: &mut GenCx,
    mut gen: impl FnMut(&mut GenCx) -> Result<T, GenError>,
    mut accept: impl FnMut(&T) -> f64,
) -> Result<T, GenError> {
    loop {
        let obj = gen(cx)?;
        let p = accept(&obj);
        if cx.bern(p)? {
            return Ok(obj);
        }
    }
}

/// The L-derived -> U-derived re-rooting loop.
///
/// `gen` draws an object of the derived class; `restored_sizes` must report
/// (l, u) of the object after the discarded L-atom is restored. On
/// acceptance the caller receives the object and discards a uniformly
/// chosen U-atom. An acceptance probability above 1 means `alpha_ul` was
/// wrong for the class and aborts the generation.
pub fn l_to_u<T>(
    cx: &mut GenCx,
    alpha_ul: f64,
    mut gen: impl FnMut(&mut GenCx) -> Result<T, GenError>,
    restored_sizes: impl Fn(&T) -> (u64, u64),
) -> Result<T, GenError> {
    loop {
        let obj = gen(cx)?;
        let (l, u) = restored_sizes(&obj);
        let p = u as f64 / (alpha_ul * l as f64);
        if p > 1.0 + 1e-9 {
            return Err(GenError::InvariantViolation {
                p,
                context: "LtoU: alpha_{U/L} too small for this class",
            });
        }
        if cx.bern(p.min(1.0))? {
            return Ok(obj);
        }
    }
}

/// The U-derived -> L-derived re-rooting loop (mirror of [`l_to_u`]).
pub fn u_to_l<T>(
    cx: &mut GenCx,
    alpha_lu: f64,
    mut gen: impl FnMut(&mut GenCx) -> Result<T, GenError>,
    restored_sizes: impl Fn(&T) -> (u64, u64),
) -> Result<T, GenError> {
    loop {
        let obj = gen(cx)?;
        let (l, u) = restored_sizes(&obj);
        let p = l as f64 / (alpha_lu * u as f64);
        if p > 1.0 + 1e-9 {
            return Err(GenError::InvariantViolation {
                p,
                context: "UtoL: alpha_{L/U} too small for this class",
            });
        }
        if cx.bern(p.min(1.0))? {
            return Ok(obj);
        }
    }
}

/// Draw a uniformly random bijection slots -> {1..r}: returns `labels` where
/// `labels[i]` is the 1-based label of slot `i`. Called once per top-level
/// generation.
pub fn distribute_labels(cx: &mut GenCx, r: usize) -> Result<Vec<u32>, GenError> {
    let mut labels: Vec<u32> = (1..=r as u32).collect();
    // Fisher-Yates
    for i in (1..r).rev() {
        cx.charge(1)?;
        let j = cx.rng.below(i + 1);
        labels.swap(i, j);
    }
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bern_degenerate() {
        let mut cx = GenCx::new(1);
        for _ in 0..100 {
            assert!(cx.bern(1.0).unwrap());
            assert!(!cx.bern(0.0).unwrap());
        }
        assert!(cx.bern(1.5).is_err());
        assert!(cx.bern(-0.2).is_err());
        // tolerance slack is clamped, not rejected
        assert!(cx.bern(1.0 + 1e-13).unwrap());
    }

    #[test]
    fn bern_law_of_large_numbers() {
        let mut cx = GenCx::new(2);
        let n = 1_000_000;
        let mut hits = 0u64;
        for _ in 0..n {
            if cx.bern(0.25).unwrap() {
                hits += 1;
            }
        }
        let mean = hits as f64 / n as f64;
        assert!((mean - 0.25).abs() < 0.002, "mean {mean}");
    }

    #[test]
    fn pois_degenerate() {
        let mut cx = GenCx::new(3);
        for _ in 0..50 {
            assert_eq!(cx.pois_geq(0, 0.0).unwrap(), 0);
            // d=2, lambda -> 0+: leading term dominates
            assert_eq!(cx.pois_geq(2, 1e-12).unwrap(), 2);
        }
        assert!(cx.pois_geq(0, -1.0).is_err());
        assert!(cx.pois_geq(1, 0.0).is_err());
    }

    #[test]
    fn pois_conditioned_law() {
        // P(1) for Pois_{>=1}(1) is 1/(e-1) ~ 0.5820
        let mut cx = GenCx::new(4);
        let n = 1_000_000;
        let mut ones = 0u64;
        for _ in 0..n {
            if cx.pois_geq(1, 1.0).unwrap() == 1 {
                ones += 1;
            }
        }
        let p1 = ones as f64 / n as f64;
        let want = 1.0 / (std::f64::consts::E - 1.0);
        assert!((p1 - want).abs() < 0.003, "p1 {p1} want {want}");
    }

    #[test]
    fn pois_mean_matches() {
        // plain Poisson mean = lambda
        let mut cx = GenCx::new(5);
        let n = 200_000;
        let mut sum = 0u64;
        for _ in 0..n {
            sum += cx.pois_geq(0, 2.5).unwrap();
        }
        let mean = sum as f64 / n as f64;
        assert!((mean - 2.5).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn reject_identity_and_kill() {
        let mut cx = GenCx::new(6);
        // p == 1 leaves the distribution unchanged; p(b)=0 never returns b
        for _ in 0..200 {
            let v = reject_filter(
                &mut cx,
                |cx| Ok(if cx.bern(0.5)? { 'a' } else { 'b' }),
                |c| if *c == 'a' { 1.0 } else { 0.0 },
            )
            .unwrap();
            assert_eq!(v, 'a');
        }
    }

    #[test]
    fn reject_reweights() {
        // gen uniform on {a,b,c}, p = (1, 1/2, 1/2) -> frequencies (1/2, 1/4, 1/4)
        let mut cx = GenCx::new(7);
        let mut counts = [0u64; 3];
        let n = 100_000;
        for _ in 0..n {
            let v = reject_filter(
                &mut cx,
                |cx| Ok(cx.rng.below(3)),
                |i| if *i == 0 { 1.0 } else { 0.5 },
            )
            .unwrap();
            counts[v] += 1;
        }
        let f: Vec<f64> = counts.iter().map(|c| *c as f64 / n as f64).collect();
        assert!((f[0] - 0.5).abs() < 0.01, "{f:?}");
        assert!((f[1] - 0.25).abs() < 0.01, "{f:?}");
        assert!((f[2] - 0.25).abs() < 0.01, "{f:?}");
    }

    #[test]
    fn ltou_single_object_class() {
        // class with the single object (|g|=1, ||g||=1), alpha = 1:
        // acceptance probability is exactly 1
        let mut cx = GenCx::new(8);
        let before = cx.ops;
        let got = l_to_u(&mut cx, 1.0, |_| Ok(0u8), |_| (1, 1)).unwrap();
        assert_eq!(got, 0);
        assert_eq!(cx.ops - before, 1); // exactly one accepting coin flip
    }

    #[test]
    fn ltou_aborts_on_bad_alpha() {
        let mut cx = GenCx::new(9);
        let r = l_to_u(&mut cx, 1.0, |_| Ok(0u8), |_| (1, 3));
        assert!(matches!(r, Err(GenError::InvariantViolation { .. })));
    }

    #[test]
    fn ltou_two_object_class_odds() {
        // class {(1L,1U), (1L,2U)} with equal Boltzmann weights, alpha_ul = 2:
        // acceptance 1/2 vs 1 -> output odds 1:2 over the two objects
        // (each accepted object then has a U-atom discarded uniformly, giving
        // odds over rooted objects of 1 : 2 split evenly over 2 atoms = 1:1:1:... )
        let mut cx = GenCx::new(10);
        let n = 90_000;
        let mut small = 0u64;
        for _ in 0..n {
            let obj = l_to_u(
                &mut cx,
                2.0,
                |cx| Ok(if cx.bern(0.5)? { 1u64 } else { 2u64 }),
                |o| (1, *o),
            )
            .unwrap();
            if obj == 1 {
                small += 1;
            }
        }
        let frac = small as f64 / n as f64;
        assert!((frac - 1.0 / 3.0).abs() < 0.01, "frac {frac}");
    }

    #[test]
    fn utol_roundtrip_preserves_distribution() {
        // Start from a two-object derived class with weights w1:w2 = 2:1.
        // LtoU then UtoL must reproduce the original derived distribution.
        let draw_derived = |cx: &mut GenCx| Ok(if cx.bern(2.0 / 3.0)? { 0u64 } else { 1u64 });
        let sizes = [(2u64, 2u64), (2u64, 4u64)]; // restored (l,u) per object
        let mut cx = GenCx::new(11);
        let n = 120_000;
        let mut c0 = 0u64;
        for _ in 0..n {
            let v = u_to_l(
                &mut cx,
                2.0,
                |cx| l_to_u(cx, 2.0, draw_derived, |o| sizes[*o as usize]),
                |o| sizes[*o as usize],
            )
            .unwrap();
            if v == 0 {
                c0 += 1;
            }
        }
        let frac = c0 as f64 / n as f64;
        assert!((frac - 2.0 / 3.0).abs() < 0.01, "frac {frac}");
    }

    #[test]
    fn labels_uniform_permutation() {
        let mut cx = GenCx::new(12);
        assert!(distribute_labels(&mut cx, 0).unwrap().is_empty());
        assert_eq!(distribute_labels(&mut cx, 1).unwrap(), vec![1]);
        let mut counts = std::collections::HashMap::new();
        let n = 60_000;
        for _ in 0..n {
            let p = distribute_labels(&mut cx, 3).unwrap();
            *counts.entry(p).or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 6);
        for (p, c) in &counts {
            let f = *c as f64 / n as f64;
            assert!((f - 1.0 / 6.0).abs() < 0.01, "{p:?}: {f}");
        }
    }

    #[test]
    fn budget_gives_up() {
        let mut cx = GenCx::with_budget(13, 100);
        let r = reject_filter(&mut cx, |cx| cx.bern(0.5).map(|_| ()), |_| 0.0);
        assert!(matches!(r, Err(GenError::GiveUp { .. })));
    }
}
