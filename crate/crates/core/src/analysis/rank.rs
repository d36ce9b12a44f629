//! Spearman and Kendall rank correlation with two-sided p-values.
//!
//! For n up to [`EXACT_MAX_N`] the p-value comes from enumerating every
//! permutation of one side; above it Spearman uses the t approximation and
//! Kendall the tie-corrected normal approximation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use super::stats::{average_ranks, pearson};
use super::AnalysisError;

pub const EXACT_MAX_N: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankCorrelation {
    pub rho: f64,
    pub p_rho: f64,
    pub tau: f64,
    pub p_tau: f64,
    pub n: usize,
}

pub fn rank_correlation(a: &[f64], b: &[f64]) -> Result<RankCorrelation, AnalysisError> {
    let (rho, p_rho) = spearman(a, b)?;
    let (tau, p_tau) = kendall(a, b)?;
    Ok(RankCorrelation { rho, p_rho, tau, p_tau, n: a.len() })
}

/// Ranks doubled so tie-averaged ranks stay integral.
struct Ranked {
    a2: Vec<i64>,
    b2: Vec<i64>,
}

fn prepare(a: &[f64], b: &[f64]) -> Result<Ranked, AnalysisError> {
    if a.len() != b.len() {
        return Err(AnalysisError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 3 {
        return Err(AnalysisError::TooFew(a.len()));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(AnalysisError::NonFinite);
    }
    let double = |v: &[f64]| -> Vec<i64> {
        average_ranks(v).iter().map(|r| (2.0 * r).round() as i64).collect()
    };
    let r = Ranked { a2: double(a), b2: double(b) };
    let constant = |v: &[i64]| v.iter().all(|&x| x == v[0]);
    if constant(&r.a2) || constant(&r.b2) {
        return Err(AnalysisError::ConstantRanking);
    }
    Ok(r)
}

fn has_ties(r2: &[i64]) -> bool {
    let mut s = r2.to_vec();
    s.sort_unstable();
    s.windows(2).any(|w| w[0] == w[1])
}

/// Spearman's rho and its two-sided p-value.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<(f64, f64), AnalysisError> {
    let r = prepare(a, b)?;
    let n = r.a2.len();
    let rho = spearman_rho(&r.a2, &r.b2);
    let p = if n <= EXACT_MAX_N {
        let stat = spearman_stat(&r.a2, &r.b2);
        exact_p(Statistic::Spearman, &r.a2, &r.b2, stat)
    } else if rho.abs() >= 1.0 {
        0.0
    } else {
        let df = (n - 2) as f64;
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
        (2.0 * dist.sf(t.abs())).min(1.0)
    };
    Ok((rho, p))
}

fn spearman_rho(a2: &[i64], b2: &[i64]) -> f64 {
    let n = a2.len() as i64;
    if has_ties(a2) || has_ties(b2) {
        let fa: Vec<f64> = a2.iter().map(|&x| x as f64).collect();
        let fb: Vec<f64> = b2.iter().map(|&x| x as f64).collect();
        return pearson(&fa, &fb).expect("non-constant ranks");
    }
    // Doubled ranks: sum of squared differences is 4 * sum d^2.
    let d2: i64 = a2.iter().zip(b2).map(|(x, y)| (x - y) * (x - y)).sum::<i64>() / 4;
    let denom = n * (n * n - 1);
    (denom - 6 * d2) as f64 / denom as f64
}

/// Centered cross product of doubled ranks; |stat| orders permutations the
/// same way |rho| does when the marginals are fixed.
fn spearman_stat(a2: &[i64], b2: &[i64]) -> i64 {
    let n = a2.len() as i64;
    a2.iter().zip(b2).map(|(x, y)| x * y).sum::<i64>() - n * (n + 1) * (n + 1)
}

struct PairCounts {
    concordant: i64,
    discordant: i64,
    /// Pairs tied in a only, b only; pairs tied in both count in neither.
    n0: i64,
    ties_a: i64,
    ties_b: i64,
}

fn pair_counts(a2: &[i64], b2: &[i64]) -> PairCounts {
    let n = a2.len();
    let mut c = PairCounts { concordant: 0, discordant: 0, n0: (n * (n - 1) / 2) as i64, ties_a: 0, ties_b: 0 };
    for i in 0..n {
        for j in i + 1..n {
            let s = (a2[i] - a2[j]).signum() * (b2[i] - b2[j]).signum();
            match s {
                1 => c.concordant += 1,
                -1 => c.discordant += 1,
                _ => {}
            }
            if a2[i] == a2[j] {
                c.ties_a += 1;
            }
            if b2[i] == b2[j] {
                c.ties_b += 1;
            }
        }
    }
    c
}

fn kendall_s(a2: &[i64], b2: &[i64]) -> i64 {
    let c = pair_counts(a2, b2);
    c.concordant - c.discordant
}

/// Kendall's tau-b and its two-sided p-value.
pub fn kendall(a: &[f64], b: &[f64]) -> Result<(f64, f64), AnalysisError> {
    let r = prepare(a, b)?;
    let n = r.a2.len();
    let c = pair_counts(&r.a2, &r.b2);
    let s = c.concordant - c.discordant;
    let tau = if c.ties_a == 0 && c.ties_b == 0 {
        s as f64 / c.n0 as f64
    } else {
        let denom = (((c.n0 - c.ties_a) * (c.n0 - c.ties_b)) as f64).sqrt();
        (s as f64 / denom).clamp(-1.0, 1.0)
    };
    let p = if n <= EXACT_MAX_N {
        exact_p(Statistic::Kendall, &r.a2, &r.b2, s)
    } else {
        let var = kendall_variance(&r.a2, &r.b2);
        if var <= 0.0 {
            1.0
        } else {
            let z = s as f64 / var.sqrt();
            let normal = Normal::new(0.0, 1.0).expect("standard normal");
            (2.0 * normal.sf(z.abs())).min(1.0)
        }
    };
    Ok((tau, p))
}

/// Null variance of S with tie corrections on both sides.
fn kendall_variance(a2: &[i64], b2: &[i64]) -> f64 {
    let n = a2.len() as f64;
    let groups = |v: &[i64]| -> Vec<f64> {
        let mut counts: HashMap<i64, usize> = HashMap::new();
        for &x in v {
            *counts.entry(x).or_default() += 1;
        }
        counts.into_values().filter(|&t| t > 1).map(|t| t as f64).collect()
    };
    let (ta, tb) = (groups(a2), groups(b2));
    let sum = |g: &[f64], f: &dyn Fn(f64) -> f64| g.iter().map(|&t| f(t)).sum::<f64>();
    let v0 = n * (n - 1.0) * (2.0 * n + 5.0);
    let vt = sum(&ta, &|t| t * (t - 1.0) * (2.0 * t + 5.0));
    let vu = sum(&tb, &|t| t * (t - 1.0) * (2.0 * t + 5.0));
    let v1 = sum(&ta, &|t| t * (t - 1.0)) * sum(&tb, &|t| t * (t - 1.0)) / (2.0 * n * (n - 1.0));
    let v2 = sum(&ta, &|t| t * (t - 1.0) * (t - 2.0)) * sum(&tb, &|t| t * (t - 1.0) * (t - 2.0))
        / (9.0 * n * (n - 1.0) * (n - 2.0));
    (v0 - vt - vu) / 18.0 + v1 + v2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Statistic {
    Spearman,
    Kendall,
}

type NullKey = (Statistic, Vec<i64>, Vec<i64>);

fn null_cache() -> &'static Mutex<HashMap<NullKey, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<NullKey, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Fraction of permutations of `b2` whose statistic is at least as extreme
/// as `observed`. The null distribution depends only on the two rank
/// multisets, so it is cached under their sorted forms.
fn exact_p(stat: Statistic, a2: &[i64], b2: &[i64], observed: i64) -> f64 {
    let mut sa = a2.to_vec();
    sa.sort_unstable();
    let mut sb = b2.to_vec();
    sb.sort_unstable();
    let key = (stat, sa, sb);
    let dist = {
        let cached = null_cache().lock().expect("cache lock").get(&key).cloned();
        match cached {
            Some(d) => d,
            None => {
                let d = Arc::new(null_distribution(stat, &key.1, &key.2));
                null_cache().lock().expect("cache lock").insert(key, d.clone());
                d
            }
        }
    };
    let at_least = dist.len() - dist.partition_point(|&v| v < observed.abs());
    at_least as f64 / dist.len() as f64
}

/// Sorted absolute statistics over all permutations (Heap's algorithm).
fn null_distribution(stat: Statistic, a2: &[i64], b2: &[i64]) -> Vec<i64> {
    let eval = |b: &[i64]| match stat {
        Statistic::Spearman => spearman_stat(a2, b).abs(),
        Statistic::Kendall => kendall_s(a2, b).abs(),
    };
    let mut b = b2.to_vec();
    let n = b.len();
    let mut out = vec![eval(&b)];
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                b.swap(0, i);
            } else {
                b.swap(c[i], i);
            }
            out.push(eval(&b));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out.sort_unstable();
    out
}
