//! Simulated fixed-b critical values with an on-disk cache.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::sync::{Mutex, OnceLock};

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io::fmt_real;
use crate::kernels::LagKernel;
use crate::lrv::hac_sum;
use crate::rng::{replication_seed, rng_from_seed};

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "HARCONTAM_CACHE";
const CACHE_FILE: &str = "fixed_b_cv_v1.csv";
const CACHE_HEADER: &str = "kernel,b,level,grid,n_sim,seed,value";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Key {
    kernel: LagKernel,
    b: u64,
    level: u64,
    grid: usize,
    n_sim: usize,
    seed: u64,
}

fn memo() -> &'static Mutex<HashMap<Key, f64>> {
    static MEMO: OnceLock<Mutex<HashMap<Key, f64>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cache_path() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(|d| PathBuf::from(d).join(CACHE_FILE))
}

fn read_cache(key: &Key) -> Option<f64> {
    let text = std::fs::read_to_string(cache_path()?).ok()?;
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            continue;
        }
        let parsed = (
            LagKernel::parse(f[0]).ok(),
            f[1].parse::<f64>().ok(),
            f[2].parse::<f64>().ok(),
            f[3].parse::<usize>().ok(),
            f[4].parse::<usize>().ok(),
            f[5].parse::<u64>().ok(),
            f[6].parse::<f64>().ok(),
        );
        if let (Some(k), Some(b), Some(l), Some(g), Some(n), Some(s), Some(v)) = parsed {
            if k == key.kernel && b.to_bits() == key.b && l.to_bits() == key.level && g == key.grid && n == key.n_sim && s == key.seed {
                return Some(v);
            }
        }
    }
    None
}

fn write_cache(key: &Key, value: f64) -> Result<()> {
    let Some(path) = cache_path() else { return Ok(()) };
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let fresh = !path.exists();
    let mut f = OpenOptions::new().create(true).append(true).open(&path)?;
    if fresh {
        writeln!(f, "{CACHE_HEADER}")?;
    }
    writeln!(
        f,
        "{},{},{},{},{},{},{}",
        key.kernel.name(),
        fmt_real(f64::from_bits(key.b)),
        fmt_real(f64::from_bits(key.level)),
        key.grid,
        key.n_sim,
        key.seed,
        fmt_real(value)
    )?;
    Ok(())
}

/// Gaussian increments on `n` steps. The path is built from its odd base
/// resolution by repeated Brownian-bridge halving, so runs whose grids differ by
/// a power of two share the coarse path exactly.
fn coupled_increments(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    let mut m = n;
    while m % 2 == 0 {
        m /= 2;
    }
    let mut h = 1.0 / m as f64;
    let mut inc: Vec<f64> = (0..m).map(|_| h.sqrt() * { let n: f64 = StandardNormal.sample(&mut rng); n }).collect();
    while inc.len() < n {
        let sd = (h / 4.0).sqrt();
        let mut next = Vec::with_capacity(inc.len() * 2);
        for &x in &inc {
            let z: f64 = StandardNormal.sample(&mut rng);
            let left = 0.5 * x + sd * z;
            next.push(left);
            next.push(x - left);
        }
        inc = next;
        h /= 2.0;
    }
    inc
}

/// Studentized mean `√n ē / √Ĵ` with the kernel at bandwidth fraction `b`.
fn fixed_b_ratio(e: &[f64], kernel: LagKernel, b: f64) -> f64 {
    let n = e.len();
    let mean = e.iter().sum::<f64>() / n as f64;
    let v: Vec<f64> = e.iter().map(|x| x - mean).collect();
    let j = if kernel == LagKernel::Bartlett && b == 1.0 {
        crate::lrv::kvb_partial_sums(&v)
    } else {
        hac_sum(&v, kernel, 1.0 / (b * n as f64))
    };
    (n as f64).sqrt() * mean / j.sqrt()
}

/// Two-sided critical value of the fixed-b limit: the `1 − level` quantile of
/// `|ratio|`, i.e. the `1 − level/2` quantile of the symmetric signed ratio.
pub fn fixed_b_critical_value(kernel: LagKernel, b: f64, level: f64, n_sim: usize, grid: usize, seed: u64) -> Result<f64> {
    if !(b > 0.0 && b <= 1.0) {
        return Err(Error::Domain(format!("bandwidth fraction b = {b} must lie in (0, 1]")));
    }
    if !(level > 0.0 && level <= 1.0) {
        return Err(Error::Domain(format!("level = {level} must lie in (0, 1]")));
    }
    if n_sim < 10_000 {
        return Err(Error::Domain(format!("n_sim = {n_sim} is below the minimum of 10000")));
    }
    if grid < 10 {
        return Err(Error::Domain(format!("grid = {grid} is below the minimum of 10")));
    }
    let key = Key { kernel, b: b.to_bits(), level: level.to_bits(), grid, n_sim, seed };
    if let Some(&v) = memo().lock().expect("cache lock").get(&key) {
        return Ok(v);
    }
    if let Some(v) = read_cache(&key) {
        memo().lock().expect("cache lock").insert(key, v);
        return Ok(v);
    }
    let mut draws: Vec<f64> = (0..n_sim as u64)
        .into_par_iter()
        .map(|r| fixed_b_ratio(&coupled_increments(grid, replication_seed(seed, r)), kernel, b).abs())
        .collect();
    draws.sort_by(|a, b| a.total_cmp(b));
    let q = 1.0 - level;
    let idx = ((q * n_sim as f64).ceil() as usize).clamp(1, n_sim) - 1;
    let value = if q <= 0.0 { 0.0 } else { draws[idx] };
    write_cache(&key, value)?;
    memo().lock().expect("cache lock").insert(key, value);
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn increments_are_coupled_across_dyadic_grids() {
        let fine = coupled_increments(80, 3);
        let coarse = coupled_increments(40, 3);
        for i in 0..40 {
            assert!((fine[2 * i] + fine[2 * i + 1] - coarse[i]).abs() < 1e-14);
        }
        let total: f64 = coupled_increments(5, 3).iter().sum();
        let total_fine: f64 = coupled_increments(160, 3).iter().sum();
        assert!((total - total_fine).abs() < 1e-12);
    }

    #[test]
    fn argument_checks() {
        assert!(fixed_b_critical_value(LagKernel::Bartlett, 0.0, 0.05, 10_000, 100, 1).is_err());
        assert!(fixed_b_critical_value(LagKernel::Bartlett, 1.0, 0.05, 100, 100, 1).is_err());
    }
}
