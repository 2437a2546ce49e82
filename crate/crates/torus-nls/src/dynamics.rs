//! Time evolution by Strang splitting.
//!
//! Both substeps are exact flows: the linear part is a diagonal phase
//! rotation in Fourier space (`c(k) -> e^{-4 pi^2 i Q(k) t} c(k)`, the symbol
//! of the anisotropic Laplacian under the `e^{2 pi i k.x}` convention), and
//! the defocusing nonlinear part `i du/dt = |u|^{p-1} u` preserves `|u|`
//! pointwise, so it is the exact phase rotation
//! `u -> u exp(-i dt |u|^{p-1})`, evaluated on a dealiasing-padded physical
//! grid. The only inexactness in a Strang step is the splitting itself
//! (second order in `dt`) and the spectral truncation of the nonlinear
//! product.

use ndarray::Array3;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};
use crate::torus::{q_form, TorusSpec};

/// Hard cap on steps per evolution.
pub const MAX_STEPS: usize = 20_000_000;

/// Time-stepping parameters. `3 < p < 5` is enforced at construction.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IntegratorConfig {
    dt: f64,
    p: f64,
    dealias: usize,
    sample_every: usize,
    linear_only: bool,
}

impl IntegratorConfig {
    pub fn new(dt: f64, p: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidInput(format!(
                "dt must be finite and positive, got {dt}"
            )));
        }
        if !(p > 3.0 && p < 5.0) {
            return Err(Error::InvalidInput(format!(
                "nonlinearity power p must lie in (3, 5), got {p}"
            )));
        }
        Ok(Self {
            dt,
            p,
            dealias: 2,
            sample_every: 1,
            linear_only: false,
        })
    }

    pub fn with_dealias(mut self, factor: usize) -> Result<Self> {
        if factor < 1 {
            return Err(Error::InvalidInput("dealias factor must be >= 1".into()));
        }
        self.dealias = factor;
        Ok(self)
    }

    pub fn with_sample_every(mut self, every: usize) -> Result<Self> {
        if every < 1 {
            return Err(Error::InvalidInput("sample_every must be >= 1".into()));
        }
        self.sample_every = every;
        Ok(self)
    }

    /// Disable the nonlinear substep (free Schrödinger flow only).
    pub fn with_linear_only(mut self, linear_only: bool) -> Self {
        self.linear_only = linear_only;
        self
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dealias(&self) -> usize {
        self.dealias
    }

    pub fn sample_every(&self) -> usize {
        self.sample_every
    }

    pub fn linear_only(&self) -> bool {
        self.linear_only
    }
}

/// Time-stamped sequence of recorded fields, uniformly spaced.
#[derive(Debug, Clone)]
pub struct Trajectory {
    samples: Vec<(f64, SpectralField)>,
    sample_dt: f64,
}

impl Trajectory {
    pub(crate) fn new(sample_dt: f64) -> Self {
        Self {
            samples: Vec::new(),
            sample_dt,
        }
    }

    pub(crate) fn push(&mut self, t: f64, field: SpectralField) {
        if let Some((last, _)) = self.samples.last() {
            debug_assert!(t > *last, "sample times must be strictly increasing");
        }
        self.samples.push((t, field));
    }

    /// Spacing between consecutive samples (`dt * sample_every`).
    pub fn sample_dt(&self) -> f64 {
        self.sample_dt
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &SpectralField)> {
        self.samples.iter().map(|(t, f)| (*t, f))
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|(t, _)| *t)
    }

    pub fn first(&self) -> Option<(f64, &SpectralField)> {
        self.samples.first().map(|(t, f)| (*t, f))
    }

    pub fn last(&self) -> Option<(f64, &SpectralField)> {
        self.samples.last().map(|(t, f)| (*t, f))
    }

    /// The recorded field at time `t` (within a relative tolerance of 1e-9).
    pub fn sample_at(&self, t: f64) -> Result<&SpectralField> {
        let tol = 1e-9 * t.abs().max(1.0);
        self.samples
            .iter()
            .find(|(s, _)| (s - t).abs() <= tol)
            .map(|(_, f)| f)
            .ok_or_else(|| Error::InvalidInput(format!("time {t} was not sampled")))
    }
}

/// Per-mode phase factors `e^{-4 pi^2 i Q(k) t}` for one application of the
/// free flow.
fn phase_array(grid: Grid, betas: [f64; 3], t: f64) -> Array3<Complex64> {
    let m = grid.modes_per_axis();
    Array3::from_shape_fn((m, m, m), |(i1, i2, i3)| {
        let k = [
            grid.wavenumber(i1),
            grid.wavenumber(i2),
            grid.wavenumber(i3),
        ];
        let omega = -4.0 * std::f64::consts::PI.powi(2) * q_form(betas, k) * t;
        Complex64::from_polar(1.0, omega)
    })
}

fn apply_phases(field: &SpectralField, phases: &Array3<Complex64>) -> SpectralField {
    let coeffs = field.coeffs() * phases;
    SpectralField::from_coeffs(field.grid(), coeffs).expect("shape preserved")
}

/// Exact free flow over time `t`: `c(k) -> e^{-4 pi^2 i Q(k) t} c(k)`.
/// Preserves every `|c(k)|`; `linear_flow(-t)` inverts it.
pub fn linear_flow(field: &SpectralField, t: f64, betas: [f64; 3]) -> SpectralField {
    apply_phases(field, &phase_array(field.grid(), betas, t))
}

/// Exact pointwise solution of `i du/dt = |u|^{p-1} u` over `dt`, evaluated
/// on the `dealias`-times oversampled physical grid and truncated back.
/// `|u|` is preserved pointwise before truncation.
pub fn nonlinear_substep(
    field: &SpectralField,
    dt: f64,
    p: f64,
    dealias: usize,
) -> Result<SpectralField> {
    let mut samples = field.synthesize_padded(dealias);
    let pm1 = p - 1.0;
    // |u|^{p-1} as (|u|^2)^{(p-1)/2}; the cubic case avoids powf entirely.
    let cubic = pm1 == 3.0;
    let half_pm1 = 0.5 * pm1;
    let flat = samples
        .as_slice_mut()
        .expect("sample arrays are standard layout");
    flat.par_chunks_mut(4096).for_each(|chunk| {
        for u in chunk {
            let nsq = u.norm_sqr();
            let amp = if cubic {
                nsq * nsq.sqrt()
            } else {
                nsq.powf(half_pm1)
            };
            *u *= Complex64::from_polar(1.0, -dt * amp);
        }
    });
    SpectralField::analyze_truncated(field.grid(), &samples, dealias)
}

/// One Strang step: linear half step, full nonlinear step, linear half step.
pub fn strang_step(
    field: &SpectralField,
    config: &IntegratorConfig,
    betas: [f64; 3],
) -> Result<SpectralField> {
    let half = phase_array(field.grid(), betas, config.dt() / 2.0);
    strang_step_with_phases(field, config, &half)
}

fn strang_step_with_phases(
    field: &SpectralField,
    config: &IntegratorConfig,
    half_phases: &Array3<Complex64>,
) -> Result<SpectralField> {
    let mut f = apply_phases(field, half_phases);
    if !config.linear_only() {
        f = nonlinear_substep(&f, config.dt(), config.p(), config.dealias())?;
    }
    Ok(apply_phases(&f, half_phases))
}

/// March `initial` from `t0` over `duration` and record every
/// `sample_every` steps, including both endpoints. `on_sample` sees each
/// recorded sample as it is produced (useful for streaming rows even when a
/// later step blows up).
///
/// `duration` must be an integer number of steps and the step count must be
/// divisible by `sample_every` so the recorded times stay uniform. A
/// non-finite value anywhere in the field aborts with [`Error::BlowUp`].
pub fn evolve(
    initial: &SpectralField,
    t0: f64,
    duration: f64,
    config: &IntegratorConfig,
    torus: &TorusSpec,
    mut on_sample: impl FnMut(f64, &SpectralField),
) -> Result<Trajectory> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidInput(format!(
            "duration must be finite and positive, got {duration}"
        )));
    }
    let dt = config.dt();
    let n_steps = (duration / dt).round();
    if n_steps < 1.0 || (n_steps * dt - duration).abs() > 1e-9 * duration.max(1.0) {
        return Err(Error::InvalidInput(format!(
            "duration {duration} is not an integer number of steps of dt {dt}"
        )));
    }
    let n_steps = n_steps as usize;
    if n_steps > MAX_STEPS {
        return Err(Error::InvalidInput(format!(
            "{n_steps} steps exceed the step budget {MAX_STEPS}"
        )));
    }
    if n_steps % config.sample_every() != 0 {
        return Err(Error::InvalidInput(format!(
            "step count {n_steps} is not divisible by sample_every {}",
            config.sample_every()
        )));
    }

    let betas = torus.betas();
    let half_phases = phase_array(initial.grid(), betas, dt / 2.0);
    let mut traj = Trajectory::new(dt * config.sample_every() as f64);

    if !initial.is_finite() {
        return Err(Error::BlowUp { step: 0, t: t0 });
    }
    on_sample(t0, initial);
    traj.push(t0, initial.clone());

    let mut field = initial.clone();
    for step in 1..=n_steps {
        field = strang_step_with_phases(&field, config, &half_phases)?;
        let t = t0 + step as f64 * dt;
        if !field.is_finite() {
            return Err(Error::BlowUp { step, t });
        }
        if step % config.sample_every() == 0 {
            on_sample(t, &field);
            traj.push(t, field.clone());
        }
    }
    Ok(traj)
}

/// Trajectory of the free flow only: `n_samples` samples spaced `sample_dt`
/// starting at `t0`, each produced by one exact [`linear_flow`] from the
/// initial field.
pub fn linear_trajectory(
    initial: &SpectralField,
    torus: &TorusSpec,
    t0: f64,
    sample_dt: f64,
    n_samples: usize,
) -> Result<Trajectory> {
    if !(sample_dt.is_finite() && sample_dt > 0.0) || n_samples < 1 {
        return Err(Error::InvalidInput(
            "linear trajectory needs a positive sample spacing and at least one sample".into(),
        ));
    }
    let betas = torus.betas();
    let mut traj = Trajectory::new(sample_dt);
    for j in 0..n_samples {
        let t = t0 + j as f64 * sample_dt;
        traj.push(t, linear_flow(initial, t, betas));
    }
    Ok(traj)
}
