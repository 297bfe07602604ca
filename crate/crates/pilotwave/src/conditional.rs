//! Conditional and effective wave functions, and Monte Carlo verification of
//! the conditional probability law `P(X in dx | Y) = |psi_Y(x)|^2 dx`.
//!
//! Conditioning on an exact `Y` has measure zero on a grid; the conditional
//! slice uses the nearest column and the statistical check buckets `Y` into
//! finite bins.

use alloc::vec::Vec;

use crate::dynamics::ParticleConfig;
use crate::linalg::dominant_singular_pair;
use crate::state::{WaveFunction1, WaveFunction2};
use crate::stats::{ks_distance, TestReport};
use crate::{C64, Error, Result, DEFAULT_EPS_NODE};

/// Sample floor per y-bin for the conditional statistics.
pub const FCPF_MIN_BIN_SAMPLES: usize = 200;
/// KS gate for a populated bin.
pub const FCPF_KS_THRESHOLD: f64 = 0.1;

/// One-dimensional slice `Psi(., y_anchor)` of a two-particle state.
#[derive(Debug, Clone)]
pub struct ConditionalWaveFunction {
    base: WaveFunction1,
    y_anchor: f64,
    normalized_flag: bool,
}

impl ConditionalWaveFunction {
    pub fn base(&self) -> &WaveFunction1 {
        &self.base
    }

    pub fn y_anchor(&self) -> f64 {
        self.y_anchor
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized_flag
    }
}

/// Slice the state at the grid column nearest to `y`.
///
/// Fails when `y` leaves the domain or the column carries less relative mass
/// than the node floor, where the conditional state is undefined.
pub fn conditional_wavefunction(
    psi: &WaveFunction2,
    y: f64,
    normalize: bool,
) -> Result<ConditionalWaveFunction> {
    if !psi.grid_y().contains(y) {
        return Err(Error::OutOfDomain { x: psi.grid_x().x_min(), y });
    }
    let iy = psi.grid_y().nearest_index(y);
    let ny = psi.grid_y().len();
    let mut max_col_mass = 0.0f64;
    let mut col_mass = 0.0f64;
    for jy in 0..ny {
        let mass: f64 = (0..psi.grid_x().len()).map(|ix| psi.amp(ix, jy).norm_sqr()).sum();
        max_col_mass = max_col_mass.max(mass);
        if jy == iy {
            col_mass = mass;
        }
    }
    if col_mass < DEFAULT_EPS_NODE * max_col_mass {
        return Err(Error::ConditionalUndefined { y });
    }
    let base = WaveFunction1::from_amplitudes(psi.grid_x().clone(), psi.column(iy))?;
    let base = if normalize { base.normalized()? } else { base };
    Ok(ConditionalWaveFunction { base, y_anchor: psi.grid_y().point(iy), normalized_flag: normalize })
}

/// Conditional statistics of one y-bin.
#[derive(Debug, Clone, Copy)]
pub struct FcpfBin {
    pub y_center: f64,
    pub n_samples: usize,
    pub report: TestReport,
    /// KS statistic compared against [`FCPF_KS_THRESHOLD`].
    pub pass: bool,
}

/// Result of the conditional-probability check over all populated bins.
#[derive(Debug, Clone)]
pub struct FcpfReport {
    pub bins: Vec<FcpfBin>,
    pub max_ks: f64,
    pub mean_ks: f64,
    pub bin_width: f64,
    pub all_pass: bool,
}

/// Compare, for every y-bin holding at least [`FCPF_MIN_BIN_SAMPLES`]
/// configurations, the empirical distribution of `X` against the normalized
/// conditional density `|Psi(x, y_center)|^2`.
pub fn verify_fcpf(
    psi: &WaveFunction2,
    configs: &[ParticleConfig],
    y_bin_width: f64,
) -> Result<FcpfReport> {
    if !(y_bin_width > 0.0) {
        return Err(Error::NonPositiveParam { name: "y_bin_width", value: y_bin_width });
    }
    let gy = psi.grid_y();
    let n_bins = libm::ceil((gy.x_max() - gy.x_min()) / y_bin_width) as usize;
    let mut buckets: Vec<Vec<f64>> = alloc::vec![Vec::new(); n_bins];
    for q in configs {
        if q.y >= gy.x_min() && q.y < gy.x_max() {
            let b = (libm::floor((q.y - gy.x_min()) / y_bin_width) as usize).min(n_bins - 1);
            buckets[b].push(q.x);
        }
    }
    let mut bins = Vec::new();
    for (b, xs) in buckets.iter().enumerate() {
        if xs.len() < FCPF_MIN_BIN_SAMPLES {
            continue;
        }
        let y_center = gy.x_min() + (b as f64 + 0.5) * y_bin_width;
        let iy = gy.nearest_index(y_center);
        let column_density: Vec<f64> =
            (0..psi.grid_x().len()).map(|ix| psi.amp(ix, iy).norm_sqr()).collect();
        let report = ks_distance(xs, &column_density, psi.grid_x(), 0.01)?;
        bins.push(FcpfBin {
            y_center,
            n_samples: xs.len(),
            report,
            pass: report.statistic < FCPF_KS_THRESHOLD,
        });
    }
    if bins.is_empty() {
        return Err(Error::InsufficientData { needed: FCPF_MIN_BIN_SAMPLES, got: 0 });
    }
    let max_ks = bins.iter().map(|b| b.report.statistic).fold(0.0f64, f64::max);
    let mean_ks = bins.iter().map(|b| b.report.statistic).sum::<f64>() / bins.len() as f64;
    let all_pass = bins.iter().all(|b| b.pass);
    Ok(FcpfReport { bins, max_ks, mean_ks, bin_width: y_bin_width, all_pass })
}

/// Thresholds quantifying "factorizes" and "macroscopically disjoint".
#[derive(Debug, Clone, Copy)]
pub struct EffectiveThresholds {
    /// Maximum overlap between the factor support and the residual support.
    pub eps_disjoint: f64,
    /// Maximum relative rank-one residual inside the occupied cell.
    pub eps_rank: f64,
}

impl Default for EffectiveThresholds {
    fn default() -> Self {
        Self { eps_disjoint: 1e-6, eps_rank: 1e-6 }
    }
}

/// Outcome of testing `Psi = phi(x) Phi(y) + Psi_perp` against a y-partition.
#[derive(Debug, Clone)]
pub struct EffectiveDecomposition {
    /// System factor, L2-normalized on the x grid.
    pub phi: WaveFunction1,
    /// Environment factor extended over the whole y grid.
    pub big_phi: WaveFunction1,
    /// Probability mass of `Psi_perp = Psi - phi Phi`.
    pub residual_mass: f64,
    /// Overlap between the y-supports of `Phi` and of the residual.
    pub support_overlap: f64,
    /// Relative rank-one residual inside the occupied cell.
    pub cell_rank_residual: f64,
    pub y_in_support: bool,
    /// Whether the state possesses an effective wave function at this `Y`.
    pub exists: bool,
}

/// Restrict the state to the partition cell containing `y_actual`, extract
/// the best rank-one factorization there, and test the disjointness that an
/// effective wave function requires.
pub fn effective_decomposition(
    psi: &WaveFunction2,
    y_partition: &[(f64, f64)],
    y_actual: f64,
    thresholds: EffectiveThresholds,
) -> Result<EffectiveDecomposition> {
    let gx = psi.grid_x();
    let gy = psi.grid_y();
    // columns must land in exactly one cell
    let mut owner = alloc::vec![usize::MAX; gy.len()];
    for (ci, &(lo, hi)) in y_partition.iter().enumerate() {
        if !(hi > lo) {
            return Err(Error::InvalidDomain { min: lo, max: hi });
        }
        for iy in 0..gy.len() {
            let y = gy.point(iy);
            if y >= lo && y < hi {
                if owner[iy] != usize::MAX {
                    return Err(Error::InvalidDomain { min: lo, max: hi });
                }
                owner[iy] = ci;
            }
        }
    }
    if let Some(iy) = owner.iter().position(|&c| c == usize::MAX) {
        return Err(Error::PartitionGap { y: gy.point(iy) });
    }
    let cell = y_partition
        .iter()
        .position(|&(lo, hi)| y_actual >= lo && y_actual < hi)
        .ok_or(Error::PartitionGap { y: y_actual })?;

    let cols: Vec<usize> = (0..gy.len()).filter(|&iy| owner[iy] == cell).collect();
    if cols.is_empty() {
        return Err(Error::PartitionGap { y: y_actual });
    }
    let nx = gx.len();
    let mut block = Vec::with_capacity(nx * cols.len());
    for ix in 0..nx {
        for &iy in &cols {
            block.push(psi.amp(ix, iy));
        }
    }
    let (sigma, u, _v) = dominant_singular_pair(&block, nx, cols.len());
    let block_sq: f64 = block.iter().map(|a| a.norm_sqr()).sum();
    let cell_rank_residual = if block_sq > 0.0 {
        ((block_sq - sigma * sigma) / block_sq).max(0.0)
    } else {
        1.0
    };

    // system factor: L2-normalized amplitude profile
    let dx = gx.spacing();
    let dy = gy.spacing();
    let phi_amps: Vec<C64> = u.iter().map(|a| a / libm::sqrt(dx)).collect();
    let phi = WaveFunction1::from_amplitudes(gx.clone(), phi_amps)?;

    // environment factor extended over the full y grid
    let big_phi_amps: Vec<C64> = (0..gy.len())
        .map(|iy| {
            let mut acc = C64::new(0.0, 0.0);
            for ix in 0..nx {
                acc += phi.amplitudes()[ix].conj() * psi.amp(ix, iy);
            }
            acc * dx
        })
        .collect();
    let big_phi = WaveFunction1::from_amplitudes(gy.clone(), big_phi_amps)?;

    // residual and support densities
    let mut residual_mass = 0.0;
    let mut rho_perp = alloc::vec![0.0; gy.len()];
    for ix in 0..nx {
        let px = phi.amplitudes()[ix];
        for iy in 0..gy.len() {
            let perp = psi.amp(ix, iy) - px * big_phi.amplitudes()[iy];
            let m = perp.norm_sqr();
            rho_perp[iy] += m;
            residual_mass += m;
        }
    }
    residual_mass *= dx * dy;
    let rho_phi: Vec<f64> = big_phi.amplitudes().iter().map(|a| a.norm_sqr()).collect();
    let phi_total: f64 = rho_phi.iter().sum();
    let perp_total: f64 = rho_perp.iter().sum();
    let support_overlap = if phi_total > 0.0 && perp_total > 1e-30 {
        rho_phi
            .iter()
            .zip(&rho_perp)
            .map(|(a, b)| (a / phi_total).min(b / perp_total))
            .sum()
    } else {
        0.0
    };

    let iy_actual = gy.nearest_index(y_actual);
    let max_phi = rho_phi.iter().cloned().fold(0.0f64, f64::max);
    let y_in_support = rho_phi[iy_actual] >= DEFAULT_EPS_NODE * max_phi;

    let exists = cell_rank_residual < thresholds.eps_rank
        && support_overlap < thresholds.eps_disjoint
        && y_in_support;
    Ok(EffectiveDecomposition {
        phi,
        big_phi,
        residual_mass,
        support_overlap,
        cell_rank_residual,
        y_in_support,
        exists,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid1, PhysicalParams};
    use crate::sampling::{sample_equilibrium, SeededSampler};
    use crate::state::{example_state, gaussian_packet, WaveFunction2};
    use approx::assert_abs_diff_eq;

    fn grid(n: usize, half: f64) -> Grid1 {
        Grid1::new(n, -half, half).unwrap()
    }

    #[test]
    fn product_state_slice_is_y_independent() {
        let gx = grid(128, 12.0);
        let gy = grid(128, 12.0);
        let params = PhysicalParams::default();
        let fx = gaussian_packet(&gx, 1.0, 1.0, 2.0, &params).unwrap();
        let fy = gaussian_packet(&gy, -1.0, 1.5, 0.0, &params).unwrap();
        let psi = WaveFunction2::product(&fx, &fy);
        let a = conditional_wavefunction(&psi, 0.5, true).unwrap();
        let b = conditional_wavefunction(&psi, -2.0, true).unwrap();
        // pointwise ratio against the factor is constant
        for (sa, sb) in a.base().amplitudes().iter().zip(b.base().amplitudes()) {
            assert_abs_diff_eq!(sa.re, sb.re, epsilon = 1e-10);
            assert_abs_diff_eq!(sa.im, sb.im, epsilon = 1e-10);
        }
    }

    #[test]
    fn which_path_slice_keeps_both_branches_evenly() {
        let gx = grid(256, 16.0);
        let gy = grid(256, 16.0);
        let params = PhysicalParams::default();
        let psi = example_state(&gx, &gy, 5.0, 10.0, 0.5, 0.5, &params).unwrap();
        let cond = conditional_wavefunction(&psi, 0.3, true).unwrap();
        let dens = cond.base().density();
        let dx = gx.spacing();
        let right: f64 = dens
            .iter()
            .enumerate()
            .filter(|(j, _)| gx.point(*j) > 0.0)
            .map(|(_, d)| d * dx)
            .sum();
        assert_abs_diff_eq!(right, 0.5, epsilon = 1e-8);
    }

    #[test]
    fn node_column_is_rejected() {
        let gx = grid(64, 8.0);
        let gy = grid(64, 8.0);
        let params = PhysicalParams::default();
        let fx = gaussian_packet(&gx, 0.0, 0.8, 0.0, &params).unwrap();
        let fy = gaussian_packet(&gy, 0.0, 0.5, 0.0, &params).unwrap();
        let psi = WaveFunction2::product(&fx, &fy);
        assert!(matches!(
            conditional_wavefunction(&psi, 7.5, true),
            Err(Error::ConditionalUndefined { .. })
        ));
        assert!(matches!(
            conditional_wavefunction(&psi, 9.0, true),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn slice_is_linear_before_normalization() {
        let gx = grid(64, 8.0);
        let gy = grid(64, 8.0);
        let params = PhysicalParams::default();
        let fx1 = gaussian_packet(&gx, 1.0, 1.0, 1.0, &params).unwrap();
        let fy1 = gaussian_packet(&gy, 0.5, 1.0, 0.0, &params).unwrap();
        let fx2 = gaussian_packet(&gx, -1.0, 0.8, -2.0, &params).unwrap();
        let fy2 = gaussian_packet(&gy, -0.5, 1.2, 1.0, &params).unwrap();
        let p1 = WaveFunction2::product(&fx1, &fy1);
        let p2 = WaveFunction2::product(&fx2, &fy2);
        let alpha = C64::new(0.6, 0.3);
        let beta = C64::new(-0.2, 0.9);
        let combo = WaveFunction2::from_amplitudes(
            gx.clone(),
            gy.clone(),
            p1.amplitudes()
                .iter()
                .zip(p2.amplitudes())
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        )
        .unwrap();
        let y = 0.7;
        let sc = conditional_wavefunction(&combo, y, false).unwrap();
        let s1 = conditional_wavefunction(&p1, y, false).unwrap();
        let s2 = conditional_wavefunction(&p2, y, false).unwrap();
        for ((c, a), b) in sc
            .base()
            .amplitudes()
            .iter()
            .zip(s1.base().amplitudes())
            .zip(s2.base().amplitudes())
        {
            let expect = alpha * a + beta * b;
            assert_eq!(*c, expect);
        }
    }

    #[test]
    fn fcpf_product_state_passes_and_uniform_control_fails() {
        let gx = grid(128, 12.0);
        let gy = grid(128, 12.0);
        let params = PhysicalParams::default();
        let fx = gaussian_packet(&gx, 0.5, 1.0, 0.0, &params).unwrap();
        let fy = gaussian_packet(&gy, -0.5, 1.0, 0.0, &params).unwrap();
        let psi = WaveFunction2::product(&fx, &fy);
        let sampler = SeededSampler::new(5);
        let configs = sample_equilibrium(&psi, 8000, &sampler).unwrap();
        let report = verify_fcpf(&psi, &configs, 4.0 * gy.spacing()).unwrap();
        assert!(report.all_pass, "max KS {}", report.max_ks);
        assert!(report.max_ks < FCPF_KS_THRESHOLD);

        // negative control: uniform configurations are not in equilibrium
        let mut rng_configs = Vec::new();
        let mut rng = SeededSampler::new(6).stream(0);
        use rand::Rng;
        for _ in 0..8000 {
            rng_configs.push(crate::dynamics::ParticleConfig {
                x: -3.0 + 6.0 * rng.gen::<f64>(),
                y: -3.0 + 6.0 * rng.gen::<f64>(),
            });
        }
        let control = verify_fcpf(&psi, &rng_configs, 4.0 * gy.spacing()).unwrap();
        assert!(control.max_ks > 0.2, "control max KS {}", control.max_ks);
        assert!(!control.all_pass);
    }

    #[test]
    fn fcpf_needs_a_populated_bin() {
        let gx = grid(64, 8.0);
        let gy = grid(64, 8.0);
        let params = PhysicalParams::default();
        let fx = gaussian_packet(&gx, 0.0, 1.0, 0.0, &params).unwrap();
        let psi = WaveFunction2::product(&fx, &fx);
        let sampler = SeededSampler::new(5);
        let configs = sample_equilibrium(&psi, 50, &sampler).unwrap();
        assert!(matches!(
            verify_fcpf(&psi, &configs, 4.0 * gy.spacing()),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn product_state_has_effective_wave_function_everywhere() {
        let gx = grid(128, 12.0);
        let gy = grid(128, 12.0);
        let params = PhysicalParams::default();
        let fx = gaussian_packet(&gx, 1.0, 1.0, 2.0, &params).unwrap();
        let fy = gaussian_packet(&gy, -1.0, 1.5, 0.0, &params).unwrap();
        let psi = WaveFunction2::product(&fx, &fy);
        let partition = [(-12.0, -4.0), (-4.0, 4.0), (4.0, 12.0)];
        for &y in &[-1.0, -5.0, 0.5] {
            let dec =
                effective_decomposition(&psi, &partition, y, EffectiveThresholds::default())
                    .unwrap();
            assert!(dec.exists, "y = {y}: rank residual {}", dec.cell_rank_residual);
            assert!(dec.residual_mass < 1e-10);
        }
    }

    #[test]
    fn which_path_state_has_no_effective_wave_function() {
        let gx = grid(256, 16.0);
        let gy = grid(256, 16.0);
        let params = PhysicalParams::default();
        let psi = example_state(&gx, &gy, 5.0, 10.0, 0.5, 0.5, &params).unwrap();
        let partition = [(-16.0, 0.0), (0.0, 16.0)];
        let dec = effective_decomposition(&psi, &partition, 0.2, EffectiveThresholds::default())
            .unwrap();
        assert!(!dec.exists);
        // both branches live in every cell: the restriction is rank two with
        // equal weights
        assert!(dec.cell_rank_residual > 0.4, "rank residual {}", dec.cell_rank_residual);
    }

    #[test]
    fn partition_errors() {
        let gx = grid(64, 8.0);
        let gy = grid(64, 8.0);
        let params = PhysicalParams::default();
        let fx = gaussian_packet(&gx, 0.0, 1.0, 0.0, &params).unwrap();
        let psi = WaveFunction2::product(&fx, &fx);
        let gapped = [(-8.0, 0.0)];
        assert!(matches!(
            effective_decomposition(&psi, &gapped, -1.0, EffectiveThresholds::default()),
            Err(Error::PartitionGap { .. })
        ));
        let full = [(-8.0, 0.0), (0.0, 8.0)];
        assert!(matches!(
            effective_decomposition(&psi, &full, 9.5, EffectiveThresholds::default()),
            Err(Error::PartitionGap { .. })
        ));
    }
}
