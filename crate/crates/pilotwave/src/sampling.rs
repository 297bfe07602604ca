//! Quantum-equilibrium sampling with reproducible per-stream randomness.
//!
//! Every random draw in the crate flows through a [`SeededSampler`]: a
//! ChaCha8 generator keyed by `(seed, stream_id)`. Identical keys replay
//! identical sequences and distinct stream ids are statistically
//! independent, so ensembles are reproducible bit-for-bit no matter how the
//! work is chunked across threads. Sample `i` of an ensemble always uses
//! stream `i`; unrelated uses (tie-break coins, validation states) must pick
//! ids in a disjoint range, conventionally `domain << 32 | i`.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::ParticleConfig;
use crate::grid::Grid1;
use crate::state::WaveFunction2;
use crate::{Error, Result};

/// Stream id namespace for equilibrium position draws.
pub const STREAM_EQUILIBRIUM: u64 = 0;
/// Stream id namespace for tie-break coins.
pub const STREAM_COIN: u64 = 1 << 32;
/// Stream id namespace for random validation states.
pub const STREAM_VALIDATION: u64 = 2 << 32;

/// Factory for deterministic, independent random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeededSampler {
    seed: u64,
}

impl SeededSampler {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generator for one substream.
    pub fn stream(&self, stream_id: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream_id);
        rng
    }
}

/// Cumulative table over the flattened cells of a discrete density.
struct CellTable {
    cum: Vec<f64>,
}

impl CellTable {
    fn new(density: &[f64]) -> Result<Self> {
        let total: f64 = density.iter().sum();
        if !(total > 0.0) || density.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut cum = Vec::with_capacity(density.len());
        let mut acc = 0.0;
        for d in density {
            acc += d / total;
            cum.push(acc);
        }
        *cum.last_mut().unwrap() = 1.0;
        Ok(Self { cum })
    }

    fn pick(&self, u: f64) -> usize {
        self.cum.partition_point(|&c| c <= u).min(self.cum.len() - 1)
    }
}

/// Draw `n` configurations from `|Psi|^2` by inverse-CDF lookup over the
/// grid-cell probability table with uniform jitter inside each cell. Sample
/// `i` consumes stream `STREAM_EQUILIBRIUM + i`.
pub fn sample_equilibrium(
    psi: &WaveFunction2,
    n: usize,
    sampler: &SeededSampler,
) -> Result<Vec<ParticleConfig>> {
    let table = CellTable::new(&psi.density())?;
    let gx = psi.grid_x();
    let gy = psi.grid_y();
    let ny = gy.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = sampler.stream(STREAM_EQUILIBRIUM + i as u64);
        let cell = table.pick(rng.gen::<f64>());
        let (ix, iy) = (cell / ny, cell % ny);
        out.push(ParticleConfig {
            x: gx.point(ix) + rng.gen::<f64>() * gx.spacing(),
            y: gy.point(iy) + rng.gen::<f64>() * gy.spacing(),
        });
    }
    Ok(out)
}

/// Draw `n` scalars from a one-dimensional density on a grid; sample `i`
/// consumes stream `base_stream + i`.
pub fn sample_density1(
    density: &[f64],
    grid: &Grid1,
    n: usize,
    sampler: &SeededSampler,
    base_stream: u64,
) -> Result<Vec<f64>> {
    if density.len() != grid.len() {
        return Err(Error::LengthMismatch { left: density.len(), right: grid.len() });
    }
    let table = CellTable::new(density)?;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = sampler.stream(base_stream + i as u64);
        let cell = table.pick(rng.gen::<f64>());
        out.push(grid.point(cell) + rng.gen::<f64>() * grid.spacing());
    }
    Ok(out)
}
