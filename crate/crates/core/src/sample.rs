//! Exact seeded sampling from the mixed measure: the size from the negative
//! binomial by inverse CDF, then the diagram from `M^(n)` by enumeration.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{neg_binomial_weight, z_measure_n, GrandParams, ZParams};
use crate::partition::{enumerate_partitions, Configuration, YoungDiagram};

/// Largest `n` whose distribution is tabulated by default.
pub const DEFAULT_N_CAP: u32 = 30;
/// Number of independent generator streams a batch is split into.
pub const WORKER_STREAMS: u64 = 16;
pub const RNG_ALGORITHM: &str = "ChaCha8";

/// `n` with probability `(1-xi)^t (t)_n / n! xi^n`, by walking the CDF with the
/// ratio `pi(n+1)/pi(n) = xi (t+n)/(n+1)`.
pub fn sample_size<R: Rng + ?Sized>(gp: &GrandParams, rng: &mut R) -> u64 {
    let (t, xi) = (gp.t(), gp.xi);
    let u: f64 = rng.random();
    let mut p = neg_binomial_weight(0, t, xi);
    let mut cdf = p;
    let mut n = 0u64;
    // the remaining mass is eventually below the spacing of doubles near 1
    while cdf <= u && p > 0.0 {
        p *= xi * (t + n as f64) / (n as f64 + 1.0);
        n += 1;
        cdf += p;
    }
    n
}

/// Cumulative distribution of `M^(n)` over `Y_n` in enumeration order.
#[derive(Debug)]
struct Cdf {
    diagrams: Vec<YoungDiagram>,
    cumulative: Vec<f64>,
}

impl Cdf {
    fn build(n: u32, zp: &ZParams) -> Result<Self> {
        let diagrams = enumerate_partitions(n)?;
        let mut acc = 0.0;
        let cumulative = diagrams
            .iter()
            .map(|l| {
                acc += z_measure_n(l, zp)?;
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { diagrams, cumulative })
    }

    fn draw(&self, u: f64) -> YoungDiagram {
        let total = *self.cumulative.last().unwrap_or(&1.0);
        let i = self.cumulative.partition_point(|&c| c <= u * total);
        self.diagrams[i.min(self.diagrams.len() - 1)].clone()
    }
}

/// Draws from `M^(n)_{z,z'}` with the per-`n` CDFs cached.
#[derive(Debug)]
pub struct DiagramSampler {
    zp: ZParams,
    n_cap: u32,
    cache: Mutex<HashMap<u32, Arc<Cdf>>>,
}

impl DiagramSampler {
    pub fn new(zp: ZParams) -> Self {
        Self::with_cap(zp, DEFAULT_N_CAP)
    }

    pub fn with_cap(zp: ZParams, n_cap: u32) -> Self {
        Self { zp, n_cap, cache: Mutex::new(HashMap::new()) }
    }

    fn cdf(&self, n: u32) -> Result<Arc<Cdf>> {
        if n > self.n_cap {
            return Err(Error::ResourceCap { what: "diagram size for exact sampling", count: n.into(), cap: self.n_cap.into() });
        }
        if let Some(c) = self.cache.lock().expect("cache poisoned").get(&n) {
            return Ok(Arc::clone(c));
        }
        let built = Arc::new(Cdf::build(n, &self.zp)?);
        Ok(Arc::clone(self.cache.lock().expect("cache poisoned").entry(n).or_insert(built)))
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: u32, rng: &mut R) -> Result<YoungDiagram> {
        let cdf = self.cdf(n)?;
        Ok(cdf.draw(rng.random()))
    }
}

/// One draw from `M^(n)_{z,z'}`; see [`DiagramSampler`] for repeated use.
pub fn sample_diagram<R: Rng + ?Sized>(n: u32, zp: &ZParams, rng: &mut R) -> Result<YoungDiagram> {
    DiagramSampler::new(*zp).sample(n, rng)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub seed: u64,
    pub params: GrandParams,
    pub rng: String,
    pub streams: u64,
    pub count: usize,
    pub draws: Vec<YoungDiagram>,
}

/// `count` draws from the mixed measure. Draw `i` belongs to stream
/// `i % WORKER_STREAMS`; stream `s` is a ChaCha8 generator seeded with `seed`
/// on stream number `s`, so the result does not depend on the thread count.
pub fn sample_batch(gp: &GrandParams, seed: u64, count: usize) -> Result<SampleBatch> {
    let sampler = DiagramSampler::new(gp.zp);
    let per_stream: Vec<Vec<YoungDiagram>> = (0..WORKER_STREAMS)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s);
            let k = (count as u64 + WORKER_STREAMS - 1 - s) / WORKER_STREAMS;
            (0..k)
                .map(|_| {
                    let n = sample_size(gp, &mut rng);
                    let n = u32::try_from(n).unwrap_or(u32::MAX);
                    sampler.sample(n, &mut rng)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut draws = Vec::with_capacity(count);
    let mut iters: Vec<_> = per_stream.into_iter().map(Vec::into_iter).collect();
    for i in 0..count {
        draws.push(iters[i % WORKER_STREAMS as usize].next().expect("stream length"));
    }
    Ok(SampleBatch { seed, params: *gp, rng: RNG_ALGORITHM.into(), streams: WORKER_STREAMS, count, draws })
}

/// Fraction of draws whose configuration contains `x`, with its binomial standard error.
pub fn empirical_correlation(batch: &SampleBatch, x: &Configuration) -> Result<(f64, f64)> {
    if batch.draws.is_empty() {
        return Err(Error::Domain("empty sample batch".into()));
    }
    let hits = batch.draws.iter().filter(|l| x.is_subset(&l.to_configuration())).count();
    let n = batch.draws.len() as f64;
    let p = hits as f64 / n;
    Ok((p, (p * (1.0 - p) / n).sqrt()))
}
