//! Monte Carlo simulation of a finite gap diffusion.
//!
//! The chain is simulated directly: exponential holding at each state, then a
//! biased coin for the direction. Local time at 0 is the occupation time of
//! state 0 (chain units). Paths stop the instant the local-time budget is
//! reached, which always happens in state 0, so every excursion on a path is
//! complete.
//!
//! Replica `i` of a run seeded with `master` draws from ChaCha8 stream `i`
//! of the generator keyed by `master`, so results do not depend on how
//! replicas are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::chain::ChainSpec;
use crate::error::{invalid_arg, Error, Result};

/// Default cap on the number of jumps recorded on one path.
pub const DEFAULT_EVENT_CAP: usize = 50_000_000;

/// One simulated trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    /// `(state index, entry time)`, starting with `(0, 0.0)`.
    pub events: Vec<(usize, f64)>,
    pub total_time: f64,
    pub occupation_at_zero: f64,
}

/// Generator for replica `index` of a run keyed by `master`.
pub fn replica_rng(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// Simulates until the occupation time of state 0 reaches `local_time_budget`.
pub fn sample_path(chain: &ChainSpec, local_time_budget: f64, seed: u64) -> Result<PathRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_path_with(chain, local_time_budget, &mut rng, DEFAULT_EVENT_CAP)
}

/// [`sample_path`] with a caller-supplied generator and event cap.
pub fn sample_path_with<R: Rng + ?Sized>(
    chain: &ChainSpec,
    local_time_budget: f64,
    rng: &mut R,
    event_cap: usize,
) -> Result<PathRecord> {
    if !(local_time_budget > 0.0) || !local_time_budget.is_finite() {
        return invalid_arg(
            "sample_path",
            format!("local-time budget must be positive, got {local_time_budget}"),
        );
    }
    let top = chain.top();
    let mut events = vec![(0usize, 0.0)];
    let mut now = 0.0_f64;
    let mut occupation = 0.0_f64;
    let mut state = 0usize;
    loop {
        let e: f64 = Exp1.sample(rng);
        let hold = e / chain.rate(state);
        if state == 0 {
            if occupation + hold >= local_time_budget {
                now += local_time_budget - occupation;
                occupation = local_time_budget;
                break;
            }
            occupation += hold;
        }
        now += hold;
        state = match state {
            0 => 1,
            s if s == top => s - 1,
            s => {
                if rng.random::<f64>() < chain.right_prob(s) {
                    s + 1
                } else {
                    s - 1
                }
            }
        };
        if events.len() >= event_cap {
            return Err(Error::EventCapExceeded { cap: event_cap });
        }
        events.push((state, now));
    }
    Ok(PathRecord {
        events,
        total_time: now,
        occupation_at_zero: occupation,
    })
}

impl PathRecord {
    /// `(state, start, end)` for each holding segment.
    pub fn segments(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.events.iter().enumerate().map(move |(i, &(s, start))| {
            let end = self.events.get(i + 1).map_or(self.total_time, |&(_, t)| t);
            (s, start, end)
        })
    }
}

/// First time `u` at which the occupation of state 0 reaches `t`.
pub fn inverse_local_time(path: &PathRecord, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return invalid_arg("inverse_local_time", format!("t must be >= 0, got {t}"));
    }
    if t > path.occupation_at_zero {
        return Err(Error::LocalTimeOutOfRange {
            t,
            budget: path.occupation_at_zero,
        });
    }
    let mut occupation = 0.0;
    for (state, start, end) in path.segments() {
        if state != 0 {
            continue;
        }
        let len = end - start;
        if occupation + len >= t {
            return Ok(start + (t - occupation));
        }
        occupation += len;
    }
    Ok(path.total_time)
}

/// Number of excursions started before local time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountSample {
    pub local_time: f64,
    pub count: usize,
}

/// Excursion statistics gathered from one or more paths.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSummary {
    pub excursion_durations: Vec<f64>,
    pub excursion_count_by_local_time: Vec<CountSample>,
    pub seed: u64,
}

/// Completed excursion lengths and the count at the path's full budget.
pub fn excursions(path: &PathRecord) -> EmpiricalSummary {
    excursions_at(path, &[path.occupation_at_zero], 0)
}

/// Like [`excursions`], with counts taken at the given local-time checkpoints.
pub fn excursions_at(path: &PathRecord, checkpoints: &[f64], seed: u64) -> EmpiricalSummary {
    let mut durations = Vec::new();
    let mut starts = Vec::new();
    let mut occupation = 0.0;
    let mut open: Option<f64> = None;
    for (state, start, end) in path.segments() {
        if state == 0 {
            if let Some(began) = open.take() {
                durations.push(start - began);
            }
            occupation += end - start;
        } else if open.is_none() {
            open = Some(start);
            starts.push(occupation);
        }
    }
    // an excursion still open at the horizon is dropped, and so is its start
    if open.is_some() {
        starts.pop();
    }
    let counts = checkpoints
        .iter()
        .map(|&t| CountSample {
            local_time: t,
            count: starts.iter().filter(|&&s| s < t).count(),
        })
        .collect();
    EmpiricalSummary {
        excursion_durations: durations,
        excursion_count_by_local_time: counts,
        seed,
    }
}

/// Runs `replicas` independent paths with budget `local_time_budget` and
/// pools their excursions; counts hold one sample per replica, in order.
pub fn simulate_excursions(
    chain: &ChainSpec,
    local_time_budget: f64,
    replicas: usize,
    seed: u64,
) -> Result<EmpiricalSummary> {
    if replicas == 0 {
        return invalid_arg("simulate_excursions", "need at least one replica");
    }
    let per_replica: Vec<EmpiricalSummary> = (0..replicas as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = replica_rng(seed, i);
            let path = sample_path_with(chain, local_time_budget, &mut rng, DEFAULT_EVENT_CAP)?;
            Ok(excursions(&path))
        })
        .collect::<Result<_>>()?;
    let mut out = EmpiricalSummary {
        excursion_durations: Vec::new(),
        excursion_count_by_local_time: Vec::with_capacity(replicas),
        seed,
    };
    for s in per_replica {
        out.excursion_durations.extend(s.excursion_durations);
        out.excursion_count_by_local_time
            .extend(s.excursion_count_by_local_time);
    }
    Ok(out)
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Mean of `e^{-z τ^{-1}(t)}` over independent replicas.
pub fn empirical_laplace(
    chain: &ChainSpec,
    z: f64,
    t: f64,
    replicas: usize,
    seed: u64,
) -> Result<Estimate> {
    if !(z > 0.0) || !(t > 0.0) {
        return invalid_arg(
            "empirical_laplace",
            format!("need z > 0 and t > 0, got z={z}, t={t}"),
        );
    }
    if replicas < 100 {
        return invalid_arg(
            "empirical_laplace",
            format!("need >= 100 replicas, got {replicas}"),
        );
    }
    let values: Vec<f64> = (0..replicas as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = replica_rng(seed, i);
            let path = sample_path_with(chain, t, &mut rng, DEFAULT_EVENT_CAP)?;
            // the path ends exactly when local time t is reached
            Ok((-z * path.total_time).exp())
        })
        .collect::<Result<_>>()?;
    Ok(mean_and_std_error(&values))
}

/// Sample mean and its standard error, summed in index order.
pub fn mean_and_std_error(values: &[f64]) -> Estimate {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Estimate {
        estimate: mean,
        std_error: (var / n).sqrt(),
    }
}

/// Outcome of a chi-square goodness-of-fit test.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// `(label, observed, expected)`; the last bin pools the upper tail.
    pub bins: Vec<(usize, usize, f64)>,
}

/// Chi-square test of integer counts against Poisson(`mean`). Bins
/// `0, 1, ..., K-1` and a pooled tail `>= K`, with `K` chosen so every
/// bin expects at least 5 observations.
pub fn poisson_chi_square(counts: &[usize], mean: f64) -> Result<ChiSquareTest> {
    let n = counts.len() as f64;
    if counts.is_empty() || !(mean > 0.0) {
        return invalid_arg("poisson_chi_square", "need counts and a positive mean");
    }
    let mut probs = Vec::new();
    let mut p = (-mean).exp();
    let mut cumulative = 0.0;
    let mut k = 0usize;
    // extend while both this bin and the remaining tail expect >= 5
    while n * p >= 5.0 && n * (1.0 - cumulative - p) >= 5.0 {
        probs.push(p);
        cumulative += p;
        k += 1;
        p *= mean / k as f64;
    }
    probs.push(1.0 - cumulative);
    let tail = probs.len() - 1;
    let mut observed = vec![0usize; probs.len()];
    for &c in counts {
        observed[c.min(tail)] += 1;
    }
    let bins: Vec<(usize, usize, f64)> = probs
        .iter()
        .enumerate()
        .map(|(i, &p)| (i, observed[i], n * p))
        .collect();
    let statistic = bins
        .iter()
        .map(|&(_, o, e)| (o as f64 - e).powi(2) / e)
        .sum();
    let dof = bins.len().saturating_sub(1).max(1);
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    Ok(ChiSquareTest {
        statistic,
        dof,
        p_value: dist.sf(statistic),
        bins,
    })
}

/// Kolmogorov-Smirnov distance between the empirical law of `samples`
/// and `cdf`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state() -> ChainSpec {
        ChainSpec::new(vec![0.0, 1.0], vec![1.0, 2.0], vec![1.0, 0.0]).unwrap()
    }

    fn three_state() -> ChainSpec {
        ChainSpec::with_interior_probs(vec![1.0, 1.0, 1.0], &[0.5]).unwrap()
    }

    fn handmade(events: Vec<(usize, f64)>, total: f64, occ: f64) -> PathRecord {
        PathRecord {
            events,
            total_time: total,
            occupation_at_zero: occ,
        }
    }

    #[test]
    fn path_invariants() {
        let path = sample_path(&three_state(), 50.0, 7).unwrap();
        assert_eq!(path.events[0], (0, 0.0));
        for w in path.events.windows(2) {
            assert!(w[1].1 > w[0].1);
            assert_eq!(w[0].0.abs_diff(w[1].0), 1);
        }
        assert_eq!(path.events.last().unwrap().0, 0);
        assert_eq!(path.occupation_at_zero, 50.0);
        assert!(path.occupation_at_zero <= path.total_time);
    }

    #[test]
    fn same_seed_same_path() {
        let a = sample_path(&three_state(), 20.0, 42).unwrap();
        let b = sample_path(&three_state(), 20.0, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_path(&three_state(), 20.0, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn event_cap_is_reported() {
        let mut rng = replica_rng(1, 0);
        let err = sample_path_with(&three_state(), 1e6, &mut rng, 100).unwrap_err();
        assert!(matches!(err, Error::EventCapExceeded { cap: 100 }));
    }

    #[test]
    fn inverse_local_time_without_excursions() {
        let path = handmade(vec![(0, 0.0)], 2.5, 2.5);
        assert_eq!(inverse_local_time(&path, 1.0).unwrap(), 1.0);
        assert_eq!(inverse_local_time(&path, 2.5).unwrap(), 2.5);
        assert!(inverse_local_time(&path, 3.0).is_err());
    }

    #[test]
    fn inverse_local_time_adds_excursion() {
        // 0 for 0.4, excursion of length 1.5, then 0 again up to local time 1
        let path = handmade(vec![(0, 0.0), (1, 0.4), (0, 1.9)], 2.5, 1.0);
        let d = 1.5;
        assert!((inverse_local_time(&path, 0.8).unwrap() - (0.8 + d)).abs() < 1e-15);
        assert!((inverse_local_time(&path, 0.3).unwrap() - 0.3).abs() < 1e-15);
        let summary = excursions(&path);
        assert_eq!(summary.excursion_durations, vec![1.5]);
        assert_eq!(summary.excursion_count_by_local_time[0].count, 1);
    }

    #[test]
    fn excursion_counts_at_checkpoints() {
        let path = handmade(
            vec![
                (0, 0.0),
                (1, 0.5),
                (2, 0.7),
                (1, 1.0),
                (0, 1.2),
                (1, 2.0),
                (0, 2.1),
            ],
            3.0,
            2.2,
        );
        let s = excursions_at(&path, &[0.5, 0.6, 1.4, 2.2], 9);
        let durations: Vec<f64> = s
            .excursion_durations
            .iter()
            .map(|d| (d * 1e12).round() / 1e12)
            .collect();
        assert_eq!(durations, vec![0.7, 0.1]);
        let counts: Vec<usize> = s
            .excursion_count_by_local_time
            .iter()
            .map(|c| c.count)
            .collect();
        // excursions start at local times 0.5 and 1.3
        assert_eq!(counts, vec![0, 1, 2, 2]);
        assert_eq!(s.seed, 9);
    }

    #[test]
    fn two_state_durations_are_exponential() {
        let s = simulate_excursions(&two_state(), 1.0, 10_000, 11).unwrap();
        let n = s.excursion_durations.len() as f64;
        let mean = s.excursion_durations.iter().sum::<f64>() / n;
        assert!((mean - 0.5).abs() < 3.0 * 0.5 / n.sqrt(), "{mean}");
        let ks = ks_distance(&s.excursion_durations, |d| 1.0 - (-2.0 * d).exp());
        assert!(ks < 1.63 / n.sqrt(), "{ks}");
    }

    #[test]
    fn poisson_counts_pass_chi_square() {
        let s = simulate_excursions(&two_state(), 1.0, 10_000, 12).unwrap();
        let counts: Vec<usize> = s
            .excursion_count_by_local_time
            .iter()
            .map(|c| c.count)
            .collect();
        let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
        assert!((mean - 1.0).abs() < 3.0 * (1.0f64 / 1e4).sqrt());
        let test = poisson_chi_square(&counts, 1.0).unwrap();
        assert!(test.p_value > 0.01, "{test:?}");
    }

    #[test]
    fn chi_square_detects_wrong_mean() {
        let s = simulate_excursions(&two_state(), 1.0, 10_000, 12).unwrap();
        let counts: Vec<usize> = s
            .excursion_count_by_local_time
            .iter()
            .map(|c| c.count)
            .collect();
        assert!(poisson_chi_square(&counts, 1.3).unwrap().p_value < 1e-6);
    }

    #[test]
    fn laplace_estimate_three_state() {
        let est = empirical_laplace(&three_state(), 1.0, 1.0, 20_000, 5).unwrap();
        let want = (-12.0f64 / 7.0).exp();
        assert!(
            (est.estimate - want).abs() < 3.0 * est.std_error,
            "{est:?} vs {want}"
        );
    }

    #[test]
    fn laplace_estimate_near_zero_z() {
        let est = empirical_laplace(&two_state(), 1e-9, 1.0, 1000, 5).unwrap();
        assert!((est.estimate - 1.0).abs() < 1e-7);
    }

    #[test]
    fn laplace_argument_checks() {
        assert!(empirical_laplace(&two_state(), 0.0, 1.0, 1000, 1).is_err());
        assert!(empirical_laplace(&two_state(), 1.0, 1.0, 99, 1).is_err());
    }

    #[test]
    fn replicas_independent_of_thread_count() {
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| empirical_laplace(&three_state(), 0.7, 2.0, 2000, 99).unwrap())
        };
        let one = run(1);
        let four = run(4);
        assert_eq!(one.estimate.to_bits(), four.estimate.to_bits());
        assert_eq!(one.std_error.to_bits(), four.std_error.to_bits());
    }
}
