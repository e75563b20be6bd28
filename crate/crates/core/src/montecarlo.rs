//! Seeded, reproducible simulation of `G(n, p)`.
//!
//! Work is split into a fixed number of streams. Stream `i` draws from
//! ChaCha8 seeded with `seed` on stream `i` and handles a fixed share of the
//! samples, so results do not depend on how rayon schedules the streams.
//! All tallies are integers, so estimates are bit-identical across runs.

use rand::distr::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Geometric;
use rayon::prelude::*;

use crate::dsu::DisjointSet;
use crate::{Error, Result};

/// Below this `p` edges are found by geometric skipping instead of one
/// Bernoulli draw per vertex pair.
pub const SKIP_THRESHOLD: f64 = 0.1;
pub const DEFAULT_STREAMS: u32 = 64;
pub const SIM_N_LIMIT: u32 = 1 << 20;

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub n: u32,
    pub p: f64,
    pub samples: u64,
    pub seed: u64,
    pub streams: u32,
}

impl SimConfig {
    pub fn new(n: u32, p: f64, samples: u64, seed: u64) -> Self {
        Self { n, p, samples, seed, streams: DEFAULT_STREAMS }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("n must be positive"));
        }
        if self.n > SIM_N_LIMIT {
            return Err(Error::ResourceLimit { what: "simulation n", n: self.n as u64, limit: SIM_N_LIMIT as u64 });
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::ProbabilityOutOfRange(self.p.to_string()));
        }
        if self.samples == 0 {
            return Err(Error::invalid("samples must be positive"));
        }
        if self.streams == 0 {
            return Err(Error::invalid("streams must be positive"));
        }
        Ok(())
    }
}

/// Tallies from a simulation run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimEstimates {
    pub n: u32,
    pub samples: u64,
    pub seed: u64,
    /// `component_counts[j]` = number of samples with `j` components.
    pub component_counts: Vec<u64>,
    /// Samples containing at least one isolated vertex.
    pub isolated_count: u64,
}

impl SimEstimates {
    fn frac(&self, count: u64) -> f64 {
        count as f64 / self.samples as f64
    }

    pub fn connected_fraction(&self) -> f64 {
        self.pmf_estimate(1)
    }

    pub fn isolated_fraction(&self) -> f64 {
        self.frac(self.isolated_count)
    }

    pub fn pmf_estimate(&self, j: u32) -> f64 {
        self.component_counts.get(j as usize).map_or(0.0, |&c| self.frac(c))
    }

    /// Sample mean and standard error of `(ν - 1)^(s)`.
    pub fn shifted_moment(&self, s: u32) -> (f64, f64) {
        let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
        for (j, &c) in self.component_counts.iter().enumerate().skip(1) {
            if c == 0 {
                continue;
            }
            let v = falling_f64(j as f64 - 1.0, s);
            sum += c as f64 * v;
            sum_sq += c as f64 * v * v;
        }
        let n = self.samples as f64;
        let mean = sum / n;
        let var = if self.samples > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
        (mean, (var / n).sqrt())
    }

    fn merge(&mut self, other: &SimEstimates) {
        for (a, b) in self.component_counts.iter_mut().zip(&other.component_counts) {
            *a += b;
        }
        self.isolated_count += other.isolated_count;
        self.samples += other.samples;
    }
}

fn falling_f64(x: f64, s: u32) -> f64 {
    (0..s).map(|i| x - i as f64).product()
}

/// Reusable per-thread state for drawing graphs and counting components.
pub struct GraphSampler {
    n: u32,
    p: f64,
    dsu: DisjointSet,
    touched: Vec<bool>,
    bernoulli: Option<Bernoulli>,
    geometric: Option<Geometric>,
}

/// Summary of one sampled graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphSummary {
    pub components: u32,
    pub has_isolated: bool,
}

impl GraphSampler {
    pub fn new(n: u32, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ProbabilityOutOfRange(p.to_string()));
        }
        let (bernoulli, geometric) = if p == 0.0 {
            (None, None)
        } else if p > SKIP_THRESHOLD {
            (Some(Bernoulli::new(p).map_err(|e| Error::invalid(e.to_string()))?), None)
        } else {
            (None, Some(Geometric::new(p).map_err(|e| Error::invalid(e.to_string()))?))
        };
        Ok(Self { n, p, dsu: DisjointSet::new(n as usize), touched: vec![false; n as usize], bernoulli, geometric })
    }

    /// Calls `edge(i, j)` for every edge of one graph, `i < j`, in
    /// lexicographic order.
    pub fn for_each_edge<R: Rng + ?Sized>(&self, rng: &mut R, mut edge: impl FnMut(u32, u32)) {
        let n = self.n;
        if let Some(b) = &self.bernoulli {
            for i in 0..n {
                for j in (i + 1)..n {
                    if b.sample(rng) {
                        edge(i, j);
                    }
                }
            }
        } else if let Some(g) = &self.geometric {
            if n < 2 {
                return;
            }
            // cursor on pair (i, j); each draw skips that many non-edges
            let (mut i, mut j) = (0u32, 1u32);
            loop {
                let mut skip = g.sample(rng);
                while skip >= (n - j) as u64 {
                    skip -= (n - j) as u64;
                    i += 1;
                    j = i + 1;
                    if j >= n {
                        return;
                    }
                }
                j += skip as u32;
                edge(i, j);
                j += 1;
                if j >= n {
                    i += 1;
                    j = i + 1;
                    if j >= n {
                        return;
                    }
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> GraphSummary {
        let mut dsu = std::mem::replace(&mut self.dsu, DisjointSet::new(0));
        let mut touched = std::mem::take(&mut self.touched);
        dsu.reset();
        touched.fill(false);
        self.for_each_edge(rng, |i, j| {
            touched[i as usize] = true;
            touched[j as usize] = true;
            dsu.union(i, j);
        });
        let summary = GraphSummary { components: dsu.sets(), has_isolated: touched.contains(&false) };
        self.dsu = dsu;
        self.touched = touched;
        summary
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Edge list of one `G(n, p)` draw.
pub fn sample_graph<R: Rng + ?Sized>(n: u32, p: f64, rng: &mut R) -> Result<Vec<(u32, u32)>> {
    let sampler = GraphSampler::new(n, p)?;
    let mut edges = Vec::new();
    sampler.for_each_edge(rng, |i, j| edges.push((i, j)));
    Ok(edges)
}

fn run_stream(cfg: &SimConfig, stream: u32, samples: u64) -> SimEstimates {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream as u64);
    let mut sampler = GraphSampler::new(cfg.n, cfg.p).expect("validated config");
    let mut est = SimEstimates {
        n: cfg.n,
        samples,
        seed: cfg.seed,
        component_counts: vec![0; cfg.n as usize + 1],
        isolated_count: 0,
    };
    for _ in 0..samples {
        let g = sampler.sample(&mut rng);
        est.component_counts[g.components as usize] += 1;
        est.isolated_count += g.has_isolated as u64;
    }
    est
}

pub fn run_simulation(cfg: &SimConfig) -> Result<SimEstimates> {
    cfg.validate()?;
    let streams = cfg.streams as u64;
    let (base, extra) = (cfg.samples / streams, cfg.samples % streams);
    let parts: Vec<SimEstimates> = (0..cfg.streams)
        .into_par_iter()
        .map(|i| run_stream(cfg, i, base + ((i as u64) < extra) as u64))
        .collect();
    let mut total = SimEstimates {
        n: cfg.n,
        samples: 0,
        seed: cfg.seed,
        component_counts: vec![0; cfg.n as usize + 1],
        isolated_count: 0,
    };
    for part in &parts {
        total.merge(part);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_probabilities() {
        let e = run_simulation(&SimConfig::new(7, 0.0, 100, 1)).unwrap();
        assert_eq!(e.component_counts[7], 100);
        assert_eq!(e.isolated_count, 100);
        let e = run_simulation(&SimConfig::new(7, 1.0, 100, 1)).unwrap();
        assert_eq!(e.component_counts[1], 100);
        assert_eq!(e.isolated_count, 0);
        let e = run_simulation(&SimConfig::new(1, 0.3, 10, 1)).unwrap();
        assert_eq!(e.component_counts[1], 10);
    }

    #[test]
    fn skipping_visits_pairs_in_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for p in [0.01, 0.05, 0.1] {
            let edges = sample_graph(60, p, &mut rng).unwrap();
            assert!(edges.windows(2).all(|w| w[0] < w[1]));
            assert!(edges.iter().all(|&(i, j)| i < j && j < 60));
        }
    }

    #[test]
    fn skipping_edge_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sampler = GraphSampler::new(200, 0.05).unwrap();
        let mut total = 0u64;
        for _ in 0..50 {
            sampler.for_each_edge(&mut rng, |_, _| total += 1);
        }
        let expect = 50.0 * 19900.0 * 0.05;
        let sd = (50.0 * 19900.0 * 0.05 * 0.95f64).sqrt();
        assert!((total as f64 - expect).abs() < 5.0 * sd);
    }

    #[test]
    fn independent_of_thread_pool() {
        let cfg = SimConfig::new(12, 0.2, 2000, 42);
        let a = run_simulation(&cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_simulation(&cfg).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.samples, 2000);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(run_simulation(&SimConfig::new(0, 0.5, 10, 1)).is_err());
        assert!(run_simulation(&SimConfig::new(5, 1.5, 10, 1)).is_err());
        assert!(run_simulation(&SimConfig::new(5, 0.5, 0, 1)).is_err());
    }
}
