//! Time evolution and guiding trajectories.
//!
//! The wave function advances under Strang-split spectral stepping
//! (half potential, full kinetic, half potential; each substep unitary).
//! Particles follow the guiding velocity `v_k = (hbar/m_k) Im(grad_k Psi / Psi)`
//! integrated with classical RK4 against field snapshots refreshed every
//! half step, so the midpoint stages see the field at the matching time.
//!
//! The guiding field is singular at nodes of `Psi`. Points with relative
//! density below `eps_node` are masked: the velocity is zeroed there and any
//! trajectory touching a masked cell carries a sticky flag so statistics can
//! exclude it while reporting the count.

use alloc::vec::Vec;

use crate::fft::{derivative_wavenumber, wavenumber, FftPlan};
use crate::grid::{Grid1, PhysicalParams};
use crate::state::WaveFunction2;
use crate::{C64, Error, Result};

/// Real potential on the two-particle grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Free,
    /// `V = (k_x x^2 + k_y y^2) / 2`.
    Harmonic { k_x: f64, k_y: f64 },
    /// Rectangular x-slab of the given height on `x0 <= x <= x1`.
    Barrier { height: f64, x0: f64, x1: f64 },
    /// Constant x-local potential on a window; evolving under it imprints a
    /// local phase at rate `strength / hbar`.
    LocalXPhase { strength: f64, x0: f64, x1: f64 },
}

impl Potential {
    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        match *self {
            Potential::Free => 0.0,
            Potential::Harmonic { k_x, k_y } => 0.5 * (k_x * x * x + k_y * y * y),
            Potential::Barrier { height, x0, x1 } => {
                if x >= x0 && x <= x1 {
                    height
                } else {
                    0.0
                }
            }
            Potential::LocalXPhase { strength, x0, x1 } => {
                if x >= x0 && x <= x1 {
                    strength
                } else {
                    0.0
                }
            }
        }
    }
}

fn transpose(src: &[C64], rows: usize, cols: usize, dst: &mut [C64]) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

/// Strang split-step evolver with precomputed phase tables.
pub struct SplitStepEvolver {
    psi: WaveFunction2,
    plan_x: FftPlan,
    plan_y: FftPlan,
    /// Potential values, row-major like the amplitudes.
    potential: Vec<f64>,
    /// `exp(-i V dt / (2 hbar))`, row-major.
    pot_half_phase: Vec<C64>,
    /// `exp(-i hbar (kx^2/mx + ky^2/my) dt / 2)` in the transposed k-space
    /// layout `[iy * nx + ix]`.
    kin_phase_t: Vec<C64>,
    scratch: Vec<C64>,
    params: PhysicalParams,
    dt: f64,
    t: f64,
    steps: u64,
}

impl SplitStepEvolver {
    pub fn new(
        psi0: WaveFunction2,
        potential: &Potential,
        params: &PhysicalParams,
        dt: f64,
    ) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::NonPositiveParam { name: "dt", value: dt });
        }
        let (gx, gy) = (psi0.grid_x().clone(), psi0.grid_y().clone());
        let (nx, ny) = (gx.len(), gy.len());
        let kx_max = core::f64::consts::PI / gx.spacing();
        let ky_max = core::f64::consts::PI / gy.spacing();
        let max_kin_rate = params.hbar
            * (kx_max * kx_max / (2.0 * params.mass_x) + ky_max * ky_max / (2.0 * params.mass_y));
        if dt * max_kin_rate >= core::f64::consts::PI {
            return Err(Error::AliasingStep { dt, dt_max: core::f64::consts::PI / max_kin_rate });
        }
        let plan_x = FftPlan::new(nx)?;
        let plan_y = FftPlan::new(ny)?;

        let mut pot = Vec::with_capacity(nx * ny);
        for ix in 0..nx {
            let x = gx.point(ix);
            for iy in 0..ny {
                pot.push(potential.evaluate(x, gy.point(iy)));
            }
        }
        let pot_half_phase = pot
            .iter()
            .map(|&v| {
                let phase = -v * dt / (2.0 * params.hbar);
                C64::new(libm::cos(phase), libm::sin(phase))
            })
            .collect();
        let mut kin_phase_t = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            let ky = wavenumber(iy, ny, gy.spacing());
            let wy = params.hbar * ky * ky / (2.0 * params.mass_y);
            for ix in 0..nx {
                let kx = wavenumber(ix, nx, gx.spacing());
                let wx = params.hbar * kx * kx / (2.0 * params.mass_x);
                let phase = -(wx + wy) * dt;
                kin_phase_t.push(C64::new(libm::cos(phase), libm::sin(phase)));
            }
        }
        Ok(Self {
            psi: psi0,
            plan_x,
            plan_y,
            potential: pot,
            pot_half_phase,
            kin_phase_t,
            scratch: alloc::vec![C64::new(0.0, 0.0); nx * ny],
            params: *params,
            dt,
            t: 0.0,
            steps: 0,
        })
    }

    pub fn psi(&self) -> &WaveFunction2 {
        &self.psi
    }

    pub fn into_psi(self) -> WaveFunction2 {
        self.psi
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advance one Strang step: V/2, T, V/2.
    pub fn step(&mut self) {
        let nx = self.psi.grid_x().len();
        let ny = self.psi.grid_y().len();
        let amps = self.psi.amplitudes_mut();
        for (a, ph) in amps.iter_mut().zip(&self.pot_half_phase) {
            *a *= ph;
        }
        for row in amps.chunks_exact_mut(ny) {
            self.plan_y.forward(row);
        }
        transpose(amps, nx, ny, &mut self.scratch);
        for col in self.scratch.chunks_exact_mut(nx) {
            self.plan_x.forward(col);
        }
        for (a, ph) in self.scratch.iter_mut().zip(&self.kin_phase_t) {
            *a *= ph;
        }
        for col in self.scratch.chunks_exact_mut(nx) {
            self.plan_x.inverse(col);
        }
        transpose(&self.scratch, ny, nx, amps);
        for row in amps.chunks_exact_mut(ny) {
            self.plan_y.inverse(row);
        }
        for (a, ph) in amps.iter_mut().zip(&self.pot_half_phase) {
            *a *= ph;
        }
        self.steps += 1;
        self.t = self.steps as f64 * self.dt;
    }

    /// Expectation of the potential energy.
    pub fn potential_energy(&self) -> f64 {
        let cell = self.psi.grid_x().spacing() * self.psi.grid_y().spacing();
        self.psi
            .amplitudes()
            .iter()
            .zip(&self.potential)
            .map(|(a, v)| a.norm_sqr() * v)
            .sum::<f64>()
            * cell
    }

    /// Expectation of the kinetic energy, evaluated spectrally.
    pub fn kinetic_energy(&self) -> f64 {
        let nx = self.psi.grid_x().len();
        let ny = self.psi.grid_y().len();
        let mut buf = self.psi.amplitudes().to_vec();
        for row in buf.chunks_exact_mut(ny) {
            self.plan_y.forward(row);
        }
        let mut tbuf = alloc::vec![C64::new(0.0, 0.0); nx * ny];
        transpose(&buf, nx, ny, &mut tbuf);
        for col in tbuf.chunks_exact_mut(nx) {
            self.plan_x.forward(col);
        }
        let hbar = self.params.hbar;
        let cell = self.psi.grid_x().spacing() * self.psi.grid_y().spacing();
        let mut acc = 0.0;
        for iy in 0..ny {
            let ky = wavenumber(iy, ny, self.psi.grid_y().spacing());
            let ey = hbar * hbar * ky * ky / (2.0 * self.params.mass_y);
            for ix in 0..nx {
                let kx = wavenumber(ix, nx, self.psi.grid_x().spacing());
                let ex = hbar * hbar * kx * kx / (2.0 * self.params.mass_x);
                acc += tbuf[iy * nx + ix].norm_sqr() * (ex + ey);
            }
        }
        acc * cell
    }

    pub fn total_energy(&self) -> f64 {
        self.kinetic_energy() + self.potential_energy()
    }
}

/// Advance `psi` by one Strang step of size `dt`.
pub fn step_splitstep(
    psi: &WaveFunction2,
    potential: &Potential,
    params: &PhysicalParams,
    dt: f64,
) -> Result<WaveFunction2> {
    let mut evolver = SplitStepEvolver::new(psi.clone(), potential, params, dt)?;
    evolver.step();
    Ok(evolver.into_psi())
}

/// Guiding velocity components on the grid, with masked nodes.
#[derive(Debug, Clone)]
pub struct VelocityField2 {
    grid_x: Grid1,
    grid_y: Grid1,
    v_x: Vec<f64>,
    v_y: Vec<f64>,
    node_mask: Vec<bool>,
    masked_count: usize,
}

/// Interpolated field value at one point.
#[derive(Debug, Clone, Copy)]
pub struct FieldSample {
    pub v_x: f64,
    pub v_y: f64,
    /// True when any interpolation corner sits on a masked node.
    pub flagged: bool,
}

impl VelocityField2 {
    pub fn grid_x(&self) -> &Grid1 {
        &self.grid_x
    }

    pub fn grid_y(&self) -> &Grid1 {
        &self.grid_y
    }

    pub fn v_x(&self) -> &[f64] {
        &self.v_x
    }

    pub fn v_y(&self) -> &[f64] {
        &self.v_y
    }

    pub fn node_mask(&self) -> &[bool] {
        &self.node_mask
    }

    pub fn masked_fraction(&self) -> f64 {
        self.masked_count as f64 / self.node_mask.len() as f64
    }

    /// Sup norm of each component over unmasked points.
    pub fn max_abs(&self) -> (f64, f64) {
        let mut mx = 0.0f64;
        let mut my = 0.0f64;
        for ((vx, vy), masked) in self.v_x.iter().zip(&self.v_y).zip(&self.node_mask) {
            if !masked {
                mx = mx.max(libm::fabs(*vx));
                my = my.max(libm::fabs(*vy));
            }
        }
        (mx, my)
    }

    /// Bilinear interpolation with periodic wrap.
    pub fn sample(&self, x: f64, y: f64) -> FieldSample {
        let nx = self.grid_x.len();
        let ny = self.grid_y.len();
        let (ix0, fx) = self.grid_x.cell_fraction(x);
        let (iy0, fy) = self.grid_y.cell_fraction(y);
        let ix1 = (ix0 + 1) % nx;
        let iy1 = (iy0 + 1) % ny;
        let idx = [ix0 * ny + iy0, ix0 * ny + iy1, ix1 * ny + iy0, ix1 * ny + iy1];
        let w = [(1.0 - fx) * (1.0 - fy), (1.0 - fx) * fy, fx * (1.0 - fy), fx * fy];
        let mut v_x = 0.0;
        let mut v_y = 0.0;
        let mut flagged = false;
        for (&i, &wi) in idx.iter().zip(&w) {
            v_x += wi * self.v_x[i];
            v_y += wi * self.v_y[i];
            flagged |= self.node_mask[i];
        }
        FieldSample { v_x, v_y, flagged }
    }
}

/// Guiding velocity field `v_k = (hbar/m_k) Im(d_k Psi / Psi)` with spectral
/// derivatives; points with `|Psi|^2 < eps_node * max |Psi|^2` are masked and
/// carry zero velocity.
pub fn velocity_field(
    psi: &WaveFunction2,
    params: &PhysicalParams,
    eps_node: f64,
) -> Result<VelocityField2> {
    if !(eps_node > 0.0) {
        return Err(Error::NonPositiveParam { name: "eps_node", value: eps_node });
    }
    let gx = psi.grid_x().clone();
    let gy = psi.grid_y().clone();
    let (nx, ny) = (gx.len(), gy.len());
    let plan_x = FftPlan::new(nx)?;
    let plan_y = FftPlan::new(ny)?;
    let amps = psi.amplitudes();

    // d/dy: rows are contiguous in y
    let mut dy = amps.to_vec();
    for row in dy.chunks_exact_mut(ny) {
        plan_y.forward(row);
        for (iy, a) in row.iter_mut().enumerate() {
            let k = derivative_wavenumber(iy, ny, gy.spacing());
            *a *= C64::new(0.0, k);
        }
        plan_y.inverse(row);
    }

    // d/dx: work in the transposed layout
    let mut dx_t = alloc::vec![C64::new(0.0, 0.0); nx * ny];
    transpose(amps, nx, ny, &mut dx_t);
    for col in dx_t.chunks_exact_mut(nx) {
        plan_x.forward(col);
        for (ix, a) in col.iter_mut().enumerate() {
            let k = derivative_wavenumber(ix, nx, gx.spacing());
            *a *= C64::new(0.0, k);
        }
        plan_x.inverse(col);
    }
    let mut dx = alloc::vec![C64::new(0.0, 0.0); nx * ny];
    transpose(&dx_t, ny, nx, &mut dx);

    let dens: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
    let max_dens = dens.iter().cloned().fold(0.0f64, f64::max);
    let floor = eps_node * max_dens;

    let mut v_x = alloc::vec![0.0; nx * ny];
    let mut v_y = alloc::vec![0.0; nx * ny];
    let mut node_mask = alloc::vec![false; nx * ny];
    let mut masked_count = 0;
    let cx = params.hbar / params.mass_x;
    let cy = params.hbar / params.mass_y;
    for i in 0..nx * ny {
        if dens[i] < floor {
            node_mask[i] = true;
            masked_count += 1;
            continue;
        }
        let a = amps[i];
        v_x[i] = cx * (dx[i].im * a.re - dx[i].re * a.im) / dens[i];
        v_y[i] = cy * (dy[i].im * a.re - dy[i].re * a.im) / dens[i];
    }
    Ok(VelocityField2 { grid_x: gx, grid_y: gy, v_x, v_y, node_mask, masked_count })
}

/// Actual configuration of the two particles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleConfig {
    pub x: f64,
    pub y: f64,
}

/// A solved guiding-equation curve.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    configs: Vec<ParticleConfig>,
    velocities: Vec<(f64, f64)>,
    /// Sticky per-sample flag: true once the trajectory has touched a masked
    /// node region.
    flags: Vec<bool>,
}

impl Trajectory {
    fn push(&mut self, t: f64, q: ParticleConfig, v: (f64, f64), flagged: bool) {
        if let Some(&last) = self.times.last() {
            debug_assert!(t > last, "times must be strictly increasing");
        }
        self.times.push(t);
        self.configs.push(q);
        self.velocities.push(v);
        self.flags.push(flagged);
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn configs(&self) -> &[ParticleConfig] {
        &self.configs
    }

    pub fn velocities(&self) -> &[(f64, f64)] {
        &self.velocities
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn flagged(&self) -> bool {
        *self.flags.last().unwrap_or(&false)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Field snapshots bracketing one trajectory step `[t, t + dt]`.
pub struct FieldWindow<'a> {
    pub start: &'a VelocityField2,
    pub mid: &'a VelocityField2,
    pub end: &'a VelocityField2,
    pub dt: f64,
}

/// Outcome of one RK4 particle step.
#[derive(Debug, Clone, Copy)]
pub struct ParticleStep {
    pub next: ParticleConfig,
    /// Guiding velocity at the step start.
    pub velocity: (f64, f64),
    pub flagged: bool,
}

/// Classical RK4 step of one particle against the field window. Pure: the
/// result depends only on the window and the input configuration, so ensemble
/// members can be advanced in any order or in parallel bit-identically.
pub fn rk4_particle_step(window: &FieldWindow<'_>, q: ParticleConfig) -> ParticleStep {
    let dt = window.dt;
    let half = 0.5 * dt;
    let s1 = window.start.sample(q.x, q.y);
    let s2 = window.mid.sample(q.x + half * s1.v_x, q.y + half * s1.v_y);
    let s3 = window.mid.sample(q.x + half * s2.v_x, q.y + half * s2.v_y);
    let s4 = window.end.sample(q.x + dt * s3.v_x, q.y + dt * s3.v_y);
    let next = ParticleConfig {
        x: q.x + dt / 6.0 * (s1.v_x + 2.0 * (s2.v_x + s3.v_x) + s4.v_x),
        y: q.y + dt / 6.0 * (s1.v_y + 2.0 * (s2.v_y + s3.v_y) + s4.v_y),
    };
    ParticleStep {
        next,
        velocity: (s1.v_x, s1.v_y),
        flagged: s1.flagged || s2.flagged || s3.flagged || s4.flagged,
    }
}

/// Wave evolution synchronized with guiding-field snapshots at half steps.
///
/// One `advance` moves the wave forward by `dt` (two Strang half steps) and
/// exposes the fields at the window start, midpoint and end.
pub struct FieldEvolver {
    wave: SplitStepEvolver,
    fields: [VelocityField2; 3],
    params: PhysicalParams,
    eps_node: f64,
    dt: f64,
}

impl FieldEvolver {
    pub fn new(
        psi0: WaveFunction2,
        potential: &Potential,
        params: &PhysicalParams,
        dt: f64,
        eps_node: f64,
    ) -> Result<Self> {
        let f0 = velocity_field(&psi0, params, eps_node)?;
        let wave = SplitStepEvolver::new(psi0, potential, params, dt / 2.0)?;
        Ok(Self {
            wave,
            fields: [f0.clone(), f0.clone(), f0],
            params: *params,
            eps_node,
            dt,
        })
    }

    /// Move the window forward by `dt`.
    pub fn advance(&mut self) -> Result<()> {
        self.fields.swap(0, 2);
        self.wave.step();
        self.fields[1] = velocity_field(self.wave.psi(), &self.params, self.eps_node)?;
        self.wave.step();
        self.fields[2] = velocity_field(self.wave.psi(), &self.params, self.eps_node)?;
        Ok(())
    }

    /// Fields bracketing the last `advance`d window.
    pub fn window(&self) -> FieldWindow<'_> {
        FieldWindow {
            start: &self.fields[0],
            mid: &self.fields[1],
            end: &self.fields[2],
            dt: self.dt,
        }
    }

    /// Field at the current wave time.
    pub fn current_field(&self) -> &VelocityField2 {
        &self.fields[2]
    }

    pub fn psi(&self) -> &WaveFunction2 {
        self.wave.psi()
    }

    pub fn time(&self) -> f64 {
        self.wave.time()
    }
}

fn step_count(t_final: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !(t_final > 0.0) {
        return Err(Error::BadTimeGrid { t_final, dt });
    }
    let ratio = t_final / dt;
    let n = libm::round(ratio);
    if libm::fabs(ratio - n) > 1e-9 * n.max(1.0) {
        return Err(Error::BadTimeGrid { t_final, dt });
    }
    Ok(n as usize)
}

fn check_in_domain(q: ParticleConfig, gx: &Grid1, gy: &Grid1) -> Result<()> {
    if gx.contains(q.x) && gy.contains(q.y) {
        Ok(())
    } else {
        Err(Error::OutOfDomain { x: q.x, y: q.y })
    }
}

/// Integrate a single guiding trajectory from `q0` to `t_final`.
pub fn integrate_trajectory(
    psi0: &WaveFunction2,
    q0: ParticleConfig,
    potential: &Potential,
    params: &PhysicalParams,
    t_final: f64,
    dt: f64,
    eps_node: f64,
) -> Result<Trajectory> {
    check_in_domain(q0, psi0.grid_x(), psi0.grid_y())?;
    let n_steps = step_count(t_final, dt)?;
    let mut evolver = FieldEvolver::new(psi0.clone(), potential, params, dt, eps_node)?;
    let mut traj = Trajectory {
        times: Vec::with_capacity(n_steps + 1),
        configs: Vec::with_capacity(n_steps + 1),
        velocities: Vec::with_capacity(n_steps + 1),
        flags: Vec::with_capacity(n_steps + 1),
    };
    let s0 = evolver.current_field().sample(q0.x, q0.y);
    let mut flagged = s0.flagged;
    traj.push(0.0, q0, (s0.v_x, s0.v_y), flagged);
    let mut q = q0;
    for step in 0..n_steps {
        evolver.advance()?;
        let out = rk4_particle_step(&evolver.window(), q);
        q = out.next;
        check_in_domain(q, psi0.grid_x(), psi0.grid_y())?;
        let s = evolver.current_field().sample(q.x, q.y);
        flagged |= out.flagged || s.flagged;
        traj.push((step + 1) as f64 * dt, q, (s.v_x, s.v_y), flagged);
    }
    Ok(traj)
}

/// State of one ensemble member at a snapshot time.
#[derive(Debug, Clone, Copy)]
pub struct ParticleState {
    pub config: ParticleConfig,
    pub velocity: (f64, f64),
    pub flagged: bool,
}

/// Ensemble state at one recorded time, together with the wave function that
/// guided it there.
#[derive(Debug, Clone)]
pub struct EnsembleSnapshot {
    pub time: f64,
    pub psi: WaveFunction2,
    pub states: Vec<ParticleState>,
}

impl EnsembleSnapshot {
    pub fn flagged_count(&self) -> usize {
        self.states.iter().filter(|s| s.flagged).count()
    }
}

/// Evolve an ensemble of configurations under one shared wave evolution and
/// record snapshots at the requested times (each must be a multiple of `dt`;
/// time zero is allowed).
///
/// The reference implementation advances members sequentially; because
/// [`rk4_particle_step`] is pure, callers may advance them in parallel
/// against the same window and obtain bit-identical results.
pub fn evolve_ensemble(
    psi0: &WaveFunction2,
    starts: &[ParticleConfig],
    potential: &Potential,
    params: &PhysicalParams,
    dt: f64,
    record_times: &[f64],
    eps_node: f64,
) -> Result<Vec<EnsembleSnapshot>> {
    for &q in starts {
        check_in_domain(q, psi0.grid_x(), psi0.grid_y())?;
    }
    let mut record_steps = Vec::with_capacity(record_times.len());
    for &t in record_times {
        if t == 0.0 {
            record_steps.push(0usize);
        } else {
            record_steps.push(step_count(t, dt)?);
        }
    }
    let last_step = record_steps.iter().copied().max().unwrap_or(0);
    let mut evolver = FieldEvolver::new(psi0.clone(), potential, params, dt, eps_node)?;
    let mut qs: Vec<ParticleConfig> = starts.to_vec();
    let mut flags = alloc::vec![false; starts.len()];
    let mut snapshots = Vec::new();

    let snapshot = |evolver: &FieldEvolver,
                    qs: &[ParticleConfig],
                    flags: &[bool],
                    time: f64| {
        let field = evolver.current_field();
        let states = qs
            .iter()
            .zip(flags)
            .map(|(&q, &flagged)| {
                let s = field.sample(q.x, q.y);
                ParticleState { config: q, velocity: (s.v_x, s.v_y), flagged: flagged || s.flagged }
            })
            .collect();
        EnsembleSnapshot { time, psi: evolver.psi().clone(), states }
    };

    if record_steps.contains(&0) {
        snapshots.push(snapshot(&evolver, &qs, &flags, 0.0));
    }
    for step in 1..=last_step {
        evolver.advance()?;
        {
            let window = evolver.window();
            for (q, flag) in qs.iter_mut().zip(flags.iter_mut()) {
                let out = rk4_particle_step(&window, *q);
                *q = out.next;
                *flag |= out.flagged;
            }
        }
        for q in &qs {
            check_in_domain(*q, psi0.grid_x(), psi0.grid_y())?;
        }
        if record_steps.contains(&step) {
            snapshots.push(snapshot(&evolver, &qs, &flags, step as f64 * dt));
        }
    }
    Ok(snapshots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1;
    use crate::state::{gaussian_packet, WaveFunction2};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn grid(n: usize, half: f64) -> Grid1 {
        Grid1::new(n, -half, half).unwrap()
    }

    fn plane_wave(gx: &Grid1, gy: &Grid1, mode_x: i64, mode_y: i64) -> WaveFunction2 {
        let lx = gx.x_max() - gx.x_min();
        let ly = gy.x_max() - gy.x_min();
        let kx = 2.0 * core::f64::consts::PI * mode_x as f64 / lx;
        let ky = 2.0 * core::f64::consts::PI * mode_y as f64 / ly;
        WaveFunction2::from_fn(gx.clone(), gy.clone(), |x, y| {
            C64::new(0.0, kx * x + ky * y).exp()
        })
        .normalized()
        .unwrap()
    }

    #[test]
    fn potential_shapes() {
        let h = Potential::Harmonic { k_x: 2.0, k_y: 0.5 };
        assert_abs_diff_eq!(h.evaluate(1.0, 2.0), 2.0);
        let b = Potential::Barrier { height: 3.0, x0: -1.0, x1: 1.0 };
        assert_abs_diff_eq!(b.evaluate(0.0, 5.0), 3.0);
        assert_abs_diff_eq!(b.evaluate(1.5, 0.0), 0.0);
        let w = Potential::LocalXPhase { strength: 0.7, x0: 0.0, x1: 2.0 };
        assert_abs_diff_eq!(w.evaluate(1.0, -3.0), 0.7);
    }

    #[test]
    fn single_step_preserves_norm() {
        let g = grid(64, 8.0);
        let params = PhysicalParams::default();
        let fx = gaussian_packet(&g, 0.5, 1.0, 2.0, &params).unwrap();
        let fy = gaussian_packet(&g, -0.5, 1.0, -1.0, &params).unwrap();
        let psi = WaveFunction2::product(&fx, &fy);
        let potential = Potential::Harmonic { k_x: 1.0, k_y: 1.0 };
        let stepped = step_splitstep(&psi, &potential, &params, 1e-3).unwrap();
        assert_abs_diff_eq!(stepped.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn step_rejects_aliasing_dt() {
        let g = grid(64, 8.0);
        let params = PhysicalParams::default();
        let fx = gaussian_packet(&g, 0.0, 1.0, 0.0, &params).unwrap();
        let psi = WaveFunction2::product(&fx, &fx);
        let err = step_splitstep(&psi, &Potential::Free, &params, 10.0);
        assert!(matches!(err, Err(Error::AliasingStep { .. })));
    }

    #[test]
    fn plane_wave_velocity_is_uniform() {
        let gx = grid(64, 8.0);
        let gy = grid(64, 8.0);
        let params = PhysicalParams::default();
        let psi = plane_wave(&gx, &gy, 3, -2);
        let field = velocity_field(&psi, &params, 1e-12).unwrap();
        let kx = 2.0 * core::f64::consts::PI * 3.0 / 16.0;
        let ky = -2.0 * core::f64::consts::PI * 2.0 / 16.0;
        assert_eq!(field.masked_fraction(), 0.0);
        for i in 0..field.v_x().len() {
            assert_abs_diff_eq!(field.v_x()[i], kx, epsilon = 1e-9);
            assert_abs_diff_eq!(field.v_y()[i], ky, epsilon = 1e-9);
        }
    }

    #[test]
    fn real_wave_velocity_vanishes() {
        let gx = grid(64, 8.0);
        let gy = grid(64, 8.0);
        let params = PhysicalParams::default();
        let k = 2.0 * core::f64::consts::PI * 2.0 / 16.0;
        let psi = WaveFunction2::from_fn(gx, gy, |x, y| {
            C64::new(
                libm::cos(k * x) * libm::exp(-0.05 * (x * x + y * y)),
                0.0,
            )
        })
        .normalized()
        .unwrap();
        // sup over the density core; the ratio amplifies rounding noise in
        // the far tails
        let field = velocity_field(&psi, &params, 1e-2).unwrap();
        let (mx, my) = field.max_abs();
        assert!(mx < 1e-12, "v_x sup {mx}");
        assert!(my < 1e-12, "v_y sup {my}");
    }

    #[test]
    fn real_plus_imaginary_parts_realize_nonzero_velocity() {
        // cos- and sin-shaped envelopes each guide nothing, their
        // combination moves
        let gx = grid(128, 8.0);
        let gy = grid(128, 8.0);
        let params = PhysicalParams::default();
        let k = 2.0 * core::f64::consts::PI * 4.0 / 16.0;
        let env = |x: f64, y: f64| libm::exp(-0.08 * (x * x + y * y));
        let re_part = WaveFunction2::from_fn(gx.clone(), gy.clone(), |x, y| {
            C64::new(libm::cos(k * x) * env(x, y), 0.0)
        })
        .normalized()
        .unwrap();
        let im_part = WaveFunction2::from_fn(gx.clone(), gy.clone(), |x, y| {
            C64::new(libm::sin(k * x) * env(x, y), 0.0)
        })
        .normalized()
        .unwrap();
        let full = WaveFunction2::from_fn(gx, gy, |x, y| {
            C64::new(libm::cos(k * x), libm::sin(k * x)) * env(x, y)
        })
        .normalized()
        .unwrap();
        let f_re = velocity_field(&re_part, &params, 1e-2).unwrap();
        let f_im = velocity_field(&im_part, &params, 1e-2).unwrap();
        let f_full = velocity_field(&full, &params, 1e-2).unwrap();
        assert!(f_re.max_abs().0 < 1e-12);
        assert!(f_im.max_abs().0 < 1e-12);
        assert!(f_full.max_abs().0 > 0.1);
    }

    #[test]
    fn masked_nodes_are_zero_and_counted() {
        let gx = grid(64, 8.0);
        let gy = grid(64, 8.0);
        let params = PhysicalParams::default();
        let fx = gaussian_packet(&gx, 0.0, 0.8, 1.0, &params).unwrap();
        let fy = gaussian_packet(&gy, 0.0, 0.8, 0.0, &params).unwrap();
        let psi = WaveFunction2::product(&fx, &fy);
        let field = velocity_field(&psi, &params, 1e-6).unwrap();
        assert!(field.masked_fraction() > 0.0);
        for (i, &masked) in field.node_mask().iter().enumerate() {
            if masked {
                assert_eq!(field.v_x()[i], 0.0);
                assert_eq!(field.v_y()[i], 0.0);
            }
        }
    }

    #[test]
    fn bilinear_sampling_interpolates_between_grid_points() {
        let gx = grid(64, 8.0);
        let gy = grid(64, 8.0);
        let params = PhysicalParams::default();
        let psi = plane_wave(&gx, &gy, 2, 1);
        let field = velocity_field(&psi, &params, 1e-12).unwrap();
        // uniform field: interpolation must reproduce it anywhere
        let s = field.sample(0.123, -3.456);
        let kx = 2.0 * core::f64::consts::PI * 2.0 / 16.0;
        assert_abs_diff_eq!(s.v_x, kx, epsilon = 1e-9);
        assert!(!s.flagged);
    }

    #[test]
    fn trajectory_on_plane_wave_is_straight() {
        let gx = grid(64, 8.0);
        let gy = grid(64, 8.0);
        let params = PhysicalParams::default();
        let psi = plane_wave(&gx, &gy, 2, -1);
        let kx = 2.0 * core::f64::consts::PI * 2.0 / 16.0;
        let ky = -2.0 * core::f64::consts::PI / 16.0;
        let q0 = ParticleConfig { x: -1.0, y: 2.0 };
        let traj =
            integrate_trajectory(&psi, q0, &Potential::Free, &params, 0.5, 1e-2, 1e-12).unwrap();
        let end = *traj.configs().last().unwrap();
        assert_abs_diff_eq!(end.x, q0.x + kx * 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(end.y, q0.y + ky * 0.5, epsilon = 1e-6);
        assert!(!traj.flagged());
    }

    #[test]
    fn trajectory_times_are_strictly_increasing() {
        let gx = grid(64, 8.0);
        let gy = grid(64, 8.0);
        let params = PhysicalParams::default();
        let psi = plane_wave(&gx, &gy, 1, 1);
        let traj = integrate_trajectory(
            &psi,
            ParticleConfig { x: 0.0, y: 0.0 },
            &Potential::Free,
            &params,
            0.1,
            1e-2,
            1e-12,
        )
        .unwrap();
        assert_eq!(traj.len(), 11);
        for pair in traj.times().windows(2) {
            assert!(pair[1] > pair[0]);
        }
    }

    #[test]
    fn out_of_domain_start_is_rejected() {
        let gx = grid(64, 8.0);
        let gy = grid(64, 8.0);
        let params = PhysicalParams::default();
        let psi = plane_wave(&gx, &gy, 1, 0);
        let err = integrate_trajectory(
            &psi,
            ParticleConfig { x: 9.0, y: 0.0 },
            &Potential::Free,
            &params,
            0.1,
            1e-2,
            1e-12,
        );
        assert!(matches!(err, Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn bad_time_grid_is_rejected() {
        let gx = grid(64, 8.0);
        let gy = grid(64, 8.0);
        let params = PhysicalParams::default();
        let psi = plane_wave(&gx, &gy, 1, 0);
        let err = integrate_trajectory(
            &psi,
            ParticleConfig { x: 0.0, y: 0.0 },
            &Potential::Free,
            &params,
            0.05,
            0.02,
            1e-12,
        );
        assert!(matches!(err, Err(Error::BadTimeGrid { .. })));
    }
}
