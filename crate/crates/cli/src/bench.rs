//! Batch runs over generated instances.
//!
//! CSV columns, one row per ground set size:
//! `family,n,count,mean_total_length,mean_runtime_ms,oracle_solved,mean_r_sg,max_r_sg,mean_r_ts`.
//! Means are exact rationals rounded to six decimals. `mean_runtime_ms` is
//! empty unless timing was requested; the oracle columns are empty when no
//! instance of that size was solved by the oracle.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use tsrealize::instances::{self, Seed};
use tsrealize::{oracle, Error, FiniteMetric, Rational};

use crate::{Family, Usage};

pub struct Config {
    pub family: Family,
    pub sizes: Vec<usize>,
    pub count: usize,
    pub seed: u64,
    pub with_oracle: bool,
    pub timing: bool,
    pub max_oracle_n: usize,
    pub max_oracle_edges: usize,
}

struct Outcome {
    total_length: Rational,
    runtime: Duration,
    r_sg: Option<Rational>,
    r_ts: Option<Rational>,
}

/// Worker count from `TSREALIZE_THREADS`; `None` lets rayon decide.
pub fn threads() -> anyhow::Result<Option<usize>> {
    match std::env::var("TSREALIZE_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Usage(format!("TSREALIZE_THREADS must be a positive integer, got `{v}`")).into()),
        },
        Err(_) => Ok(None),
    }
}

pub fn family_name(family: Family) -> &'static str {
    match family {
        Family::L1 => "l1",
        Family::Doubletree => "doubletree",
        Family::Splits2 => "splits2",
        Family::Random => "random",
    }
}

pub fn instance_metric(family: Family, n: usize, seed: Seed) -> tsrealize::Result<FiniteMetric> {
    match family {
        Family::L1 => instances::gen_l1_points(n, seed)?.l1_metric(),
        Family::Doubletree => instances::gen_double_tree_metric(n, seed),
        Family::Splits2 => tsrealize::splits::induced_metric(&instances::gen_two_compatible_system(n, seed)?),
        Family::Random => instances::gen_random_metric(n, seed),
    }
}

fn solve(config: &Config, n: usize, index: usize) -> tsrealize::Result<Outcome> {
    let metric = instance_metric(config.family, n, Seed(config.seed + index as u64))?;
    let start = Instant::now();
    let graph = tsrealize::realize(&metric)?;
    let runtime = start.elapsed();
    let total_length = graph.total_length();
    let (mut r_sg, mut r_ts) = (None, None);
    if config.with_oracle && n <= config.max_oracle_n {
        let skeleton = oracle::skeleton(&metric, config.max_oracle_n)?;
        r_ts = Some(&total_length / skeleton.total_length());
        match oracle::min_subrealization(&skeleton, &metric, config.max_oracle_edges) {
            Ok(best) => r_sg = Some(&total_length / &best.total_length),
            Err(Error::InstanceTooLarge { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(Outcome { total_length, runtime, r_sg, r_ts })
}

/// Rounds half away from zero to `places` decimals.
pub fn fixed(q: &Rational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled = q.abs() * Rational::from_integer(scale.clone());
    let rounded = (scaled + Rational::new(1.into(), 2.into())).floor().to_integer();
    let (int, frac) = rounded.div_rem(&scale);
    let sign = if q.is_negative() && !rounded.is_zero() { "-" } else { "" };
    format!("{sign}{int}.{frac:0>width$}", frac = frac.to_string(), width = places as usize)
}

fn mean<'a>(values: impl Iterator<Item = &'a Rational>) -> Option<Rational> {
    let (sum, count) = values.fold((Rational::zero(), 0i64), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / Rational::from_integer(count.into()))
}

pub fn run(config: &Config, threads: Option<usize>) -> anyhow::Result<String> {
    let jobs: Vec<(usize, usize)> =
        config.sizes.iter().flat_map(|&n| (0..config.count).map(move |i| (n, i))).collect();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        pool = pool.num_threads(t);
    }
    // collect() on an indexed parallel iterator keeps job order
    let results: Vec<tsrealize::Result<Outcome>> =
        pool.build()?.install(|| jobs.par_iter().map(|&(n, i)| solve(config, n, i)).collect());

    let mut csv =
        String::from("family,n,count,mean_total_length,mean_runtime_ms,oracle_solved,mean_r_sg,max_r_sg,mean_r_ts\n");
    for (k, &n) in config.sizes.iter().enumerate() {
        let rows = &results[k * config.count..(k + 1) * config.count];
        let mut outcomes = Vec::with_capacity(rows.len());
        for (i, r) in rows.iter().enumerate() {
            match r {
                Ok(o) => outcomes.push(o),
                Err(e) => anyhow::bail!("instance n={n} seed={}: {e}", config.seed + i as u64),
            }
        }
        let opt = |q: Option<Rational>| q.map(|q| fixed(&q, 6)).unwrap_or_default();
        let runtime = if config.timing {
            let total: Duration = outcomes.iter().map(|o| o.runtime).sum();
            format!("{:.3}", total.as_secs_f64() * 1000.0 / outcomes.len() as f64)
        } else {
            String::new()
        };
        let solved: Vec<&Rational> = outcomes.iter().filter_map(|o| o.r_sg.as_ref()).collect();
        let _ = writeln!(
            csv,
            "{},{n},{},{},{runtime},{},{},{},{}",
            family_name(config.family),
            config.count,
            opt(mean(outcomes.iter().map(|o| &o.total_length))),
            solved.len(),
            opt(mean(solved.iter().copied())),
            opt(solved.iter().copied().max().cloned()),
            opt(mean(outcomes.iter().filter_map(|o| o.r_ts.as_ref()))),
        );
    }
    Ok(csv)
}
