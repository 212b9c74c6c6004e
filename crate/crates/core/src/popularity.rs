//! Zipf file popularity and i.i.d. request batches.
//!
//! Files are indexed from 0 internally, in decreasing order of popularity, so
//! file `i` here is the 1-based file `i + 1`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, SimRng};

/// Zipf popularity over `n` files: `p_i ∝ i^{-beta}`.
///
/// Immutable once built and cheap to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct PopularityModel {
    beta: f64,
    pmf: Vec<f64>,
    cdf: Vec<f64>,
}

/// Compensated (Kahan) accumulator.
#[derive(Debug, Default, Clone, Copy)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

impl PopularityModel {
    /// Builds the Zipf distribution over `n` files with parameter `beta`.
    pub fn zipf(n: usize, beta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("file count n must be at least 1"));
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::invalid(format!(
                "Zipf parameter must be finite and non-negative, got {beta}"
            )));
        }
        let weights: Vec<f64> = (1..=n).map(|i| (i as f64).powf(-beta)).collect();
        let mut norm = Kahan::default();
        for &w in &weights {
            norm.add(w);
        }
        let p1 = 1.0 / norm.sum;
        let pmf: Vec<f64> = weights.iter().map(|w| w * p1).collect();

        let mut acc = Kahan::default();
        let mut cdf: Vec<f64> = pmf
            .iter()
            .map(|&p| {
                acc.add(p);
                acc.sum
            })
            .collect();
        // Rounding can leave the last entry a hair below 1.
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        Ok(Self { beta, pmf, cdf })
    }

    pub fn file_count(&self) -> usize {
        self.pmf.len()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Probability of the 0-based file `file`.
    pub fn prob(&self, file: usize) -> f64 {
        self.pmf[file]
    }

    /// Probability that `file` is requested at least once in a batch of
    /// `batch_size` requests: `1 - (1 - p)^batch_size`.
    pub fn hit_probability(&self, file: usize, batch_size: usize) -> f64 {
        hit_probability(self.pmf[file], batch_size)
    }

    /// One inverse-CDF draw.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cdf
            .partition_point(|&c| c <= u)
            .min(self.pmf.len() - 1)
    }

    /// Draws `batch_size` i.i.d. requests from a ChaCha8 stream seeded with `seed`.
    pub fn sample_batch(&self, batch_size: usize, seed: u64) -> RequestBatch {
        let mut rng: SimRng = rng_from_seed(seed);
        let requests = (0..batch_size).map(|_| self.draw(&mut rng)).collect();
        RequestBatch::build(requests, self.file_count(), seed)
    }
}

pub(crate) fn hit_probability(p: f64, batch_size: usize) -> f64 {
    if p >= 1.0 {
        return if batch_size > 0 { 1.0 } else { 0.0 };
    }
    -f64::exp_m1(batch_size as f64 * f64::ln_1p(-p))
}

pub fn build_popularity(n: usize, beta: f64) -> Result<PopularityModel> {
    PopularityModel::zipf(n, beta)
}

/// Requests per time slot: `⌊rho · m⌋`.
pub fn batch_size(caches: usize, rho: f64) -> usize {
    (rho * caches as f64).floor() as usize
}

/// The requests of one time slot together with the per-file histogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequestBatch {
    requests: Vec<usize>,
    counts: Vec<usize>,
    seed: u64,
}

impl RequestBatch {
    fn build(requests: Vec<usize>, files: usize, seed: u64) -> Self {
        let mut counts = vec![0; files];
        for &r in &requests {
            counts[r] += 1;
        }
        Self {
            requests,
            counts,
            seed,
        }
    }

    /// A batch with explicit (0-based) file indices, for hand-built scenarios.
    pub fn from_requests(requests: Vec<usize>, files: usize) -> Result<Self> {
        if let Some(&bad) = requests.iter().find(|&&r| r >= files) {
            return Err(Error::invalid(format!(
                "request for file {bad} outside catalog of {files} files"
            )));
        }
        Ok(Self::build(requests, files, 0))
    }

    pub fn requests(&self) -> &[usize] {
        &self.requests
    }

    /// `counts()[i]` is the number of requests for file `i`.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    pub fn file_count(&self) -> usize {
        self.counts.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}
