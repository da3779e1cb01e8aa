//! Closed-form constants and regret bounds, and the multi-scale partition of
//! rounds by the size of a pairwise payoff difference.
//!
//! `log2` appears exactly where the bounds are stated in base 2; the
//! high-probability deviation term uses the natural log.

use alloc::vec::Vec;

use libm::{log, log2, sqrt};

use crate::learners::check_alpha;
use crate::{Error, Result};

/// `C_LO = 2 sqrt(2) e / pi`, the Littlewood-Offord constant.
pub fn c_lo() -> f64 {
    2.0 * core::f64::consts::SQRT_2 * core::f64::consts::E / core::f64::consts::PI
}

/// `Q_alpha = (e / 2 pi) sqrt(2 / (alpha (1 - alpha)))`.
pub fn q_alpha(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(core::f64::consts::E / (2.0 * core::f64::consts::PI) * sqrt(2.0 / (alpha * (1.0 - alpha))))
}

fn check_partition_horizon(horizon: u64) -> Result<()> {
    if horizon < 4 {
        Err(Error::HorizonTooSmall {
            horizon,
            requirement: "the scale partition needs T >= 4",
        })
    } else {
        Ok(())
    }
}

/// `K`: the smallest `k >= 0` with `T^(-1/2^k) >= 1/2`.
///
/// Evaluated exactly as the integer test `T <= 2^(2^k)`.
pub fn scale_count(horizon: u64) -> Result<u32> {
    check_partition_horizon(horizon)?;
    let t = horizon as u128;
    let mut k = 0u32;
    // 2^(2^k) exceeds every u64 once k = 7.
    while k < 7 && t > 1u128 << (1u32 << k) {
        k += 1;
    }
    Ok(k)
}

/// Rounds grouped by the magnitude of one pairwise difference.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalePartition {
    pub horizon: u64,
    /// `K`; there are `K + 1` classes.
    pub scale_count: u32,
    /// `classes[k]` holds the 1-based rounds in `A_k`.
    pub classes: Vec<Vec<usize>>,
    /// `thresholds[j] = T^(-1/2^(j+1))` for `j = 0..K`.
    pub thresholds: Vec<f64>,
}

impl ScalePartition {
    pub fn num_scales(&self) -> usize {
        self.classes.len()
    }
}

/// Splits rounds `1..=T` into `A_0, ..., A_K`:
///
/// * `A_0`: `|d_t| <= T^(-1/2)`;
/// * `A_k`, `1 <= k < K`: `T^(-1/2^k) < |d_t| <= T^(-1/2^(k+1))`;
/// * `A_K`: `T^(-1/2^K) < |d_t| <= 2`.
pub fn scale_partition(diffs: &[f64], horizon: u64) -> Result<ScalePartition> {
    let k_max = scale_count(horizon)?;
    if diffs.len() as u64 != horizon {
        return Err(Error::LengthMismatch {
            expected: horizon as usize,
            found: diffs.len(),
        });
    }
    if let Some(&bad) = diffs.iter().find(|d| d.is_nan() || d.abs() > 2.0) {
        return Err(Error::PayoffOutOfRange { value: bad });
    }
    // Repeated square roots of 1/sqrt(T) hit the dyadic thresholds exactly.
    let mut thresholds = Vec::with_capacity(k_max as usize);
    let mut b = 1.0 / sqrt(horizon as f64);
    for _ in 0..k_max {
        thresholds.push(b);
        b = sqrt(b);
    }
    let mut classes = alloc::vec![Vec::new(); k_max as usize + 1];
    for (i, d) in diffs.iter().enumerate() {
        let d = d.abs();
        // Number of thresholds strictly below |d|.
        let k = thresholds.iter().take_while(|&&b| d > b).count();
        classes[k].push(i + 1);
    }
    Ok(ScalePartition {
        horizon,
        scale_count: k_max,
        classes,
        thresholds,
    })
}

fn check_bound_domain(n: usize, horizon: u64) -> Result<()> {
    check_partition_horizon(horizon)?;
    if n < 2 {
        return Err(Error::InvalidArgument("regret bounds need n >= 2"));
    }
    Ok(())
}

/// `sqrt(T log2(4 log2 T))`, shared by the oblivious and high-probability bounds.
pub fn log_log_rate(horizon: u64) -> f64 {
    let t = horizon as f64;
    sqrt(t * log2(4.0 * log2(t)))
}

/// `40 C_LO N^2 sqrt(T log2(4 log2 T))`: expected-regret ceiling against an
/// oblivious opponent.
pub fn oblivious_regret_bound(n: usize, horizon: u64) -> Result<f64> {
    check_bound_domain(n, horizon)?;
    Ok(40.0 * c_lo() * (n * n) as f64 * log_log_rate(horizon))
}

/// Oblivious bound plus `sqrt((T/2) ln(1/delta))`; holds with probability
/// at least `1 - delta` against adaptive opponents (fresh variant).
pub fn high_prob_regret_bound(n: usize, horizon: u64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidDelta(delta));
    }
    let deviation = sqrt(horizon as f64 / 2.0 * log(1.0 / delta));
    Ok(oblivious_regret_bound(n, horizon)? + deviation)
}

/// `T > max(2/(1-alpha), 2/alpha)`.
pub fn asymmetric_horizon_ok(horizon: u64, alpha: f64) -> bool {
    let t = horizon as f64;
    t > 2.0 / (1.0 - alpha) && t > 2.0 / alpha
}

/// `40 N^2 Q_alpha / alpha * sqrt(T)` for {-1, 0, 1}-valued payoffs.
pub fn asymmetric_regret_bound(n: usize, horizon: u64, alpha: f64) -> Result<f64> {
    let q = q_alpha(alpha)?;
    if n < 1 {
        return Err(Error::InvalidArgument("regret bounds need n >= 1"));
    }
    if !asymmetric_horizon_ok(horizon, alpha) {
        return Err(Error::HorizonTooSmall {
            horizon,
            requirement: "need T > max(2/(1-alpha), 2/alpha)",
        });
    }
    Ok(40.0 * (n * n) as f64 * q / alpha * sqrt(horizon as f64))
}

/// Lower-bound reference for the tie exploiter: `0.225 T - 2`.
pub fn tie_exploiter_reference(horizon: u64) -> f64 {
    0.225 * horizon as f64 - 2.0
}

/// `H_n = 1 + 1/2 + ... + 1/n`.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).rev().map(|k| 1.0 / k as f64).sum()
}

/// Lower-bound reference for the leader-set matrix: `N/2 - H_N`.
pub fn leader_set_reference(n: usize) -> f64 {
    n as f64 / 2.0 - harmonic(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::vec;

    #[test]
    fn c_lo_value() {
        let c = c_lo();
        assert!((c - 2.4474).abs() < 1e-4, "{c}");
        assert!((c - 2.447_313_482_075_05).abs() < 1e-14, "{c}");
        assert!(c < 3.0 && c > 1.0);
    }

    #[test]
    fn q_alpha_values() {
        let half = q_alpha(0.5).unwrap();
        assert!((half - 2f64.sqrt() * core::f64::consts::E / core::f64::consts::PI).abs() < 1e-15);
        assert!((half - 1.2237).abs() < 1e-4);
        // e / (2 pi) * sqrt(2 / 0.09), evaluated independently.
        let expected = 0.432_627_989_716_132_5 * (2.0f64 / 0.09).sqrt();
        assert!((q_alpha(0.1).unwrap() - expected).abs() < 1e-9);
        for a in [0.05, 0.1, 0.3, 0.45] {
            assert!((q_alpha(a).unwrap() - q_alpha(1.0 - a).unwrap()).abs() < 1e-12);
        }
        assert!(q_alpha(0.0).is_err() && q_alpha(1.0).is_err());
    }

    #[test]
    fn scale_count_examples() {
        assert_eq!(scale_count(16).unwrap(), 2);
        assert_eq!(scale_count(4).unwrap(), 1);
        assert_eq!(scale_count(5).unwrap(), 2);
        assert_eq!(scale_count(1 << 32).unwrap(), 5);
        assert_eq!(scale_count((1 << 32) + 1).unwrap(), 6);
        assert_eq!(scale_count(u64::MAX).unwrap(), 6);
        assert!(scale_count(3).is_err());
    }

    #[test]
    fn scale_count_definition_sweep() {
        for t in 4u64..=1_000_000 {
            let k = scale_count(t).unwrap();
            let tf = t as f64;
            // Compare in the log domain: T^(-1/2^k) >= 1/2 <=> log2 T <= 2^k.
            let lt = (tf).log2();
            assert!(lt <= 2f64.powi(k as i32) + 1e-12, "T = {t}");
            assert!(k == 0 || lt > 2f64.powi(k as i32 - 1), "T = {t}");
            assert!((k as f64) <= lt.log2() + 1.0 + 1e-12);
        }
    }

    #[test]
    fn partition_examples() {
        let p = scale_partition(&[0.0; 16], 16).unwrap();
        assert_eq!(p.classes[0], (1..=16).collect::<Vec<_>>());
        assert!(p.classes[1..].iter().all(Vec::is_empty));
        assert_eq!(p.thresholds, vec![0.25, 0.5]);

        let p = scale_partition(&[2.0; 16], 16).unwrap();
        assert_eq!(p.num_scales(), 3);
        assert_eq!(p.classes[2].len(), 16);

        let mut diffs = [0.0; 16];
        diffs[4] = -0.3;
        diffs[5] = 0.5;
        diffs[6] = 0.25;
        let p = scale_partition(&diffs, 16).unwrap();
        assert_eq!(p.classes[1], vec![5, 6]);
        assert!(p.classes[0].contains(&7));

        assert!(scale_partition(&[2.5; 16], 16).is_err());
        assert!(scale_partition(&[0.0; 3], 3).is_err());
    }

    #[test]
    fn oblivious_bound_values() {
        let b = oblivious_regret_bound(2, 1024).unwrap();
        let expected = 160.0 * c_lo() * (1024.0f64 * 40f64.log2()).sqrt();
        assert!((b - expected).abs() < 1e-9 * expected);
        assert!((b / 28_900.0 - 1.0).abs() < 0.01, "{b}");
        for t in [4u64, 10, 100, 5000] {
            assert!(
                oblivious_regret_bound(3, 2 * t).unwrap() > oblivious_regret_bound(3, t).unwrap()
            );
            let ratio =
                oblivious_regret_bound(6, t).unwrap() / oblivious_regret_bound(3, t).unwrap();
            assert!((ratio - 4.0).abs() < 1e-12);
        }
        assert!(oblivious_regret_bound(1, 16).is_err());
        assert!(oblivious_regret_bound(2, 3).is_err());
    }

    #[test]
    fn high_prob_bound_values() {
        assert_eq!(
            high_prob_regret_bound(2, 64, 1.0).unwrap(),
            oblivious_regret_bound(2, 64).unwrap()
        );
        let b = high_prob_regret_bound(2, 100, 1e-4).unwrap();
        let expected = oblivious_regret_bound(2, 100).unwrap() + (50.0f64 * 1e4f64.ln()).sqrt();
        assert!((b - expected).abs() < 1e-9);
        assert!(
            high_prob_regret_bound(2, 100, 0.01).unwrap()
                > high_prob_regret_bound(2, 100, 0.1).unwrap()
        );
        assert!(high_prob_regret_bound(2, 100, 0.0).is_err());
        assert!(high_prob_regret_bound(2, 100, 1.5).is_err());
    }

    #[test]
    fn asymmetric_bound_values() {
        let b = asymmetric_regret_bound(2, 400, 0.5).unwrap();
        assert!((b / 7832.0 - 1.0).abs() < 0.01, "{b}");
        assert!(asymmetric_regret_bound(2, 400, 0.01).unwrap() > 10.0 * b);
        assert!(
            asymmetric_regret_bound(2, 400, 0.3).unwrap()
                > asymmetric_regret_bound(2, 400, 0.7).unwrap()
        );
        // T must exceed max(2/(1-a), 2/a) = 8 at a = 0.25.
        assert!(asymmetric_regret_bound(2, 8, 0.25).is_err());
        assert!(asymmetric_regret_bound(2, 9, 0.25).is_ok());
    }

    #[test]
    fn lower_bound_references() {
        assert!((tie_exploiter_reference(200) - 43.0).abs() < 1e-12);
        assert!((leader_set_reference(32) - 11.94).abs() < 0.01);
        assert_eq!(harmonic(1), 1.0);
        assert!((harmonic(4) - 25.0 / 12.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn partition_is_disjoint_and_exhaustive(
            diffs in (4usize..=512).prop_flat_map(|t| prop::collection::vec(-2.0f64..=2.0, t))
        ) {
            let t = diffs.len() as u64;
            let p = scale_partition(&diffs, t).unwrap();
            let mut seen: Vec<usize> = p.classes.iter().flatten().copied().collect();
            seen.sort_unstable();
            prop_assert_eq!(seen, (1..=diffs.len()).collect::<Vec<_>>());
            let k_max = p.scale_count as usize;
            let th = |j: u32| (t as f64).powf(-1.0 / 2f64.powi(j as i32));
            for (k, class) in p.classes.iter().enumerate() {
                for &r in class {
                    let d = diffs[r - 1].abs();
                    let lower = if k == 0 { 0.0 } else { th(k as u32) };
                    let upper = if k == k_max { 2.0 } else { th(k as u32 + 1) };
                    prop_assert!(k == 0 || d > lower * (1.0 - 1e-12));
                    prop_assert!(d <= upper * (1.0 + 1e-12));
                }
            }
        }

        #[test]
        fn bounds_monotone_in_horizon(t in 9u64..100_000, n in 2usize..8, alpha in 0.25f64..0.75) {
            let a = oblivious_regret_bound(n, t).unwrap();
            prop_assert!(a.is_finite() && a > 0.0);
            prop_assert!(oblivious_regret_bound(n, t + 1).unwrap() >= a);
            prop_assert!(high_prob_regret_bound(n, t + 1, 0.05).unwrap() >= high_prob_regret_bound(n, t, 0.05).unwrap());
            let b = asymmetric_regret_bound(n, t, alpha).unwrap();
            prop_assert!(b.is_finite() && b > 0.0);
            prop_assert!(asymmetric_regret_bound(n, t + 1, alpha).unwrap() >= b);
            let scale = |f: &dyn Fn(usize) -> f64| f(2 * n) / f(n);
            prop_assert!((scale(&|m| oblivious_regret_bound(m, t).unwrap()) - 4.0).abs() < 1e-9);
            prop_assert!((scale(&|m| asymmetric_regret_bound(m, t, alpha).unwrap()) - 4.0).abs() < 1e-9);
        }
    }
}
