//! Discrete wave functions and elementary state constructors.
//!
//! One-particle states live on a [`Grid1`]; two-particle states on a tensor
//! grid with row index `x` and column index `y` (amplitude `ix * ny + iy`).
//! Amplitudes carry dimension length^(-1/2) per axis so that
//! `sum |psi|^2 * spacing = 1` for a normalized state.

use alloc::vec::Vec;

use crate::grid::{Grid1, PhysicalParams};
use crate::{C64, Error, Result};

/// Marginalization axis for two-particle densities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// One-dimensional complex field on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction1 {
    grid: Grid1,
    amplitudes: Vec<C64>,
}

impl WaveFunction1 {
    pub fn from_amplitudes(grid: Grid1, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::LengthMismatch { left: grid.len(), right: amplitudes.len() });
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn from_fn(grid: Grid1, mut f: impl FnMut(f64) -> C64) -> Self {
        let amplitudes = (0..grid.len()).map(|j| f(grid.point(j))).collect();
        Self { grid, amplitudes }
    }

    pub fn grid(&self) -> &Grid1 {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// L2 norm, `sqrt(sum |psi|^2 dx)`.
    pub fn norm(&self) -> f64 {
        let s: f64 = self.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        libm::sqrt(s * self.grid.spacing())
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        let inv = 1.0 / norm;
        let amplitudes = self.amplitudes.iter().map(|a| a * inv).collect();
        Ok(Self { grid: self.grid.clone(), amplitudes })
    }

    /// Probability density `|psi|^2` on the grid.
    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Inner product, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let s: C64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.grid.spacing())
    }
}

/// Two-particle complex field on a tensor grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction2 {
    grid_x: Grid1,
    grid_y: Grid1,
    amplitudes: Vec<C64>,
}

impl WaveFunction2 {
    pub fn from_amplitudes(grid_x: Grid1, grid_y: Grid1, amplitudes: Vec<C64>) -> Result<Self> {
        let expect = grid_x.len() * grid_y.len();
        if amplitudes.len() != expect {
            return Err(Error::LengthMismatch { left: expect, right: amplitudes.len() });
        }
        Ok(Self { grid_x, grid_y, amplitudes })
    }

    pub fn from_fn(grid_x: Grid1, grid_y: Grid1, mut f: impl FnMut(f64, f64) -> C64) -> Self {
        let ny = grid_y.len();
        let mut amplitudes = Vec::with_capacity(grid_x.len() * ny);
        for ix in 0..grid_x.len() {
            let x = grid_x.point(ix);
            for iy in 0..ny {
                amplitudes.push(f(x, grid_y.point(iy)));
            }
        }
        Self { grid_x, grid_y, amplitudes }
    }

    /// Tensor product `fx(x) * fy(y)`.
    pub fn product(fx: &WaveFunction1, fy: &WaveFunction1) -> Self {
        let ny = fy.grid().len();
        let mut amplitudes = Vec::with_capacity(fx.grid().len() * ny);
        for ax in fx.amplitudes() {
            for ay in fy.amplitudes() {
                amplitudes.push(ax * ay);
            }
        }
        Self { grid_x: fx.grid().clone(), grid_y: fy.grid().clone(), amplitudes }
    }

    pub fn grid_x(&self) -> &Grid1 {
        &self.grid_x
    }

    pub fn grid_y(&self) -> &Grid1 {
        &self.grid_y
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    #[inline]
    pub fn amp(&self, ix: usize, iy: usize) -> C64 {
        self.amplitudes[ix * self.grid_y.len() + iy]
    }

    /// Amplitudes of the row at fixed `x` index (contiguous in `y`).
    pub fn row(&self, ix: usize) -> &[C64] {
        let ny = self.grid_y.len();
        &self.amplitudes[ix * ny..(ix + 1) * ny]
    }

    /// Amplitudes of the column at fixed `y` index.
    pub fn column(&self, iy: usize) -> Vec<C64> {
        let ny = self.grid_y.len();
        (0..self.grid_x.len()).map(|ix| self.amplitudes[ix * ny + iy]).collect()
    }

    fn cell_area(&self) -> f64 {
        self.grid_x.spacing() * self.grid_y.spacing()
    }

    pub fn norm(&self) -> f64 {
        let s: f64 = self.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        libm::sqrt(s * self.cell_area())
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        let inv = 1.0 / norm;
        let amplitudes = self.amplitudes.iter().map(|a| a * inv).collect();
        Ok(Self { grid_x: self.grid_x.clone(), grid_y: self.grid_y.clone(), amplitudes })
    }

    /// Joint density `|Psi|^2` on the flattened grid.
    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.grid_x != other.grid_x || self.grid_y != other.grid_y {
            return Err(Error::GridMismatch);
        }
        let s: C64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.cell_area())
    }
}

/// Normalized Gaussian packet
/// `psi(x) ~ exp(-(x-center)^2 / (4 width^2)) * exp(i momentum x / hbar)`,
/// so the position density has standard deviation `width`.
pub fn gaussian_packet(
    grid: &Grid1,
    center: f64,
    width: f64,
    momentum: f64,
    params: &PhysicalParams,
) -> Result<WaveFunction1> {
    if !(width > 0.0) {
        return Err(Error::NonPositiveParam { name: "width", value: width });
    }
    let min_width = 4.0 * grid.spacing();
    if width < min_width {
        return Err(Error::ResolutionTooCoarse { width, min_width });
    }
    // analytic mass of the density tails outside the domain
    let z_hi = (grid.x_max() - center) / (core::f64::consts::SQRT_2 * width);
    let z_lo = (center - grid.x_min()) / (core::f64::consts::SQRT_2 * width);
    let tail_mass = 0.5 * (libm::erfc(z_hi) + libm::erfc(z_lo));
    if tail_mass > 1e-9 {
        return Err(Error::PacketTruncated { tail_mass, limit: 1e-9 });
    }
    let k = momentum / params.hbar;
    let wf = WaveFunction1::from_fn(grid.clone(), |x| {
        let d = x - center;
        let envelope = libm::exp(-d * d / (4.0 * width * width));
        envelope * C64::new(libm::cos(k * x), libm::sin(k * x))
    });
    wf.normalized()
}

/// One branch of a two-branch entangled state: a Gaussian packet in each
/// coordinate.
#[derive(Debug, Clone, Copy)]
pub struct BranchSpec {
    pub x_center: f64,
    pub x_momentum: f64,
    pub x_width: f64,
    pub y_center: f64,
    pub y_momentum: f64,
    pub y_width: f64,
}

/// Normalized superposition `c1 * b1x(x) b1y(y) + c2 * b2x(x) b2y(y)`.
pub fn branch_pair_state(
    grid_x: &Grid1,
    grid_y: &Grid1,
    first: BranchSpec,
    second: BranchSpec,
    amps: (C64, C64),
    params: &PhysicalParams,
) -> Result<WaveFunction2> {
    let bx = [
        gaussian_packet(grid_x, first.x_center, first.x_width, first.x_momentum, params)?,
        gaussian_packet(grid_x, second.x_center, second.x_width, second.x_momentum, params)?,
    ];
    let by = [
        gaussian_packet(grid_y, first.y_center, first.y_width, first.y_momentum, params)?,
        gaussian_packet(grid_y, second.y_center, second.y_width, second.y_momentum, params)?,
    ];
    let ny = grid_y.len();
    let mut amplitudes = Vec::with_capacity(grid_x.len() * ny);
    for ix in 0..grid_x.len() {
        let a1 = amps.0 * bx[0].amplitudes()[ix];
        let a2 = amps.1 * bx[1].amplitudes()[ix];
        for iy in 0..ny {
            amplitudes.push(a1 * by[0].amplitudes()[iy] + a2 * by[1].amplitudes()[iy]);
        }
    }
    WaveFunction2::from_amplitudes(grid_x.clone(), grid_y.clone(), amplitudes)?.normalized()
}

/// The two-branch which-path state: position branches at `+-a` paired with
/// momentum branches at `+-p` sharing one envelope, equal weights.
///
/// The shared envelope makes the `y` configuration carry no branch
/// information; only the `y` velocity does.
pub fn example_state(
    grid_x: &Grid1,
    grid_y: &Grid1,
    a: f64,
    p: f64,
    sigma_x: f64,
    sigma_y: f64,
    params: &PhysicalParams,
) -> Result<WaveFunction2> {
    if !(a > 0.0) {
        return Err(Error::DegenerateGeometry { name: "branch separation a must be positive" });
    }
    if a < 6.0 * sigma_x {
        return Err(Error::BranchOverlap {
            overlap: libm::exp(-a * a / (2.0 * sigma_x * sigma_x)),
            limit: 1e-8,
        });
    }
    let plus = BranchSpec {
        x_center: a,
        x_momentum: 0.0,
        x_width: sigma_x,
        y_center: 0.0,
        y_momentum: p,
        y_width: sigma_y,
    };
    let minus = BranchSpec { x_center: -a, y_momentum: -p, ..plus };
    let amp = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    let state = branch_pair_state(grid_x, grid_y, plus, minus, (amp, amp), params)?;
    // measured overlap gate, sharper than the geometric floor above
    let phi_plus = gaussian_packet(grid_x, a, sigma_x, 0.0, params)?;
    let phi_minus = gaussian_packet(grid_x, -a, sigma_x, 0.0, params)?;
    let overlap = phi_plus.inner(&phi_minus)?.norm();
    if overlap > 1e-8 {
        return Err(Error::BranchOverlap { overlap, limit: 1e-8 });
    }
    Ok(state)
}

/// Integrate `|Psi|^2` over the other coordinate; the result sums to one
/// times the remaining spacing.
pub fn marginal_density(psi: &WaveFunction2, axis: Axis) -> Vec<f64> {
    let nx = psi.grid_x().len();
    let ny = psi.grid_y().len();
    match axis {
        Axis::X => {
            let dy = psi.grid_y().spacing();
            (0..nx)
                .map(|ix| psi.row(ix).iter().map(|a| a.norm_sqr()).sum::<f64>() * dy)
                .collect()
        }
        Axis::Y => {
            let dx = psi.grid_x().spacing();
            let mut out = alloc::vec![0.0; ny];
            for ix in 0..nx {
                for (acc, a) in out.iter_mut().zip(psi.row(ix)) {
                    *acc += a.norm_sqr();
                }
            }
            for v in out.iter_mut() {
                *v *= dx;
            }
            out
        }
    }
}

/// Apply the local x-side phase imprint `exp(i theta sign(x))`.
pub fn apply_phase_sign_x(psi: &WaveFunction2, theta: f64) -> WaveFunction2 {
    let ny = psi.grid_y().len();
    let mut amplitudes = Vec::with_capacity(psi.amplitudes().len());
    for ix in 0..psi.grid_x().len() {
        let x = psi.grid_x().point(ix);
        let sign = if x > 0.0 {
            1.0
        } else if x < 0.0 {
            -1.0
        } else {
            0.0
        };
        let phase = C64::new(libm::cos(theta * sign), libm::sin(theta * sign));
        for iy in 0..ny {
            amplitudes.push(phase * psi.amp(ix, iy));
        }
    }
    WaveFunction2 {
        grid_x: psi.grid_x().clone(),
        grid_y: psi.grid_y().clone(),
        amplitudes,
    }
}
