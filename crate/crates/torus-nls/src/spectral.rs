//! Truncated Fourier fields on the unit torus, frequency projections, and
//! the `D` multiplier.
//!
//! # Conventions
//!
//! A field is represented by coefficients `c(k)` of `u(x) = sum_k c(k)
//! e^{2 pi i k.x}` on the lattice `k in {-M/2, ..., M/2 - 1}^3`. [`analyze`]
//! maps collocation samples `u(j/M)` to coefficients (a forward DFT divided
//! by `M^3`); [`synthesize`] is its exact inverse. Parseval holds in the form
//! `sum_k |c(k)|^2 = M^{-3} sum_x |u(x)|^2`. The Nyquist planes `k_i = -M/2`
//! are zeroed on input so conjugate symmetry is never ambiguous; the usable
//! lattice is `|k_i| <= k_max = M/2 - 1`.
//!
//! [`analyze`]: SpectralField::analyze
//! [`synthesize`]: SpectralField::synthesize

use ndarray::Array3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transform::Fft3;

/// Cubic collocation grid: `modes_per_axis` (a power of two, >= 4) modes per
/// axis plus the oversampling factor used when a nonlinearity is evaluated in
/// physical space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    modes_per_axis: usize,
    padded_factor: usize,
}

impl Grid {
    /// Grid with the default 2x dealiasing padding.
    pub fn new(modes_per_axis: usize) -> Result<Self> {
        Self::with_padding(modes_per_axis, 2)
    }

    pub fn with_padding(modes_per_axis: usize, padded_factor: usize) -> Result<Self> {
        if !modes_per_axis.is_power_of_two() || modes_per_axis < 4 {
            return Err(Error::InvalidInput(format!(
                "modes_per_axis must be a power of two >= 4, got {modes_per_axis}"
            )));
        }
        if padded_factor < 1 {
            return Err(Error::InvalidInput(
                "padded_factor must be at least 1".into(),
            ));
        }
        Ok(Self {
            modes_per_axis,
            padded_factor,
        })
    }

    pub fn modes_per_axis(&self) -> usize {
        self.modes_per_axis
    }

    /// Largest usable wavenumber per axis, `M/2 - 1`.
    pub fn k_max(&self) -> i64 {
        (self.modes_per_axis / 2 - 1) as i64
    }

    pub fn padded_factor(&self) -> usize {
        self.padded_factor
    }

    pub fn padded_modes(&self) -> usize {
        self.modes_per_axis * self.padded_factor
    }

    /// Signed wavenumber stored at DFT index `i`.
    pub fn wavenumber(&self, index: usize) -> i64 {
        let m = self.modes_per_axis as i64;
        let i = index as i64;
        if i < m / 2 {
            i
        } else {
            i - m
        }
    }

    /// DFT index holding wavenumber `k` (which must satisfy `|k| <= M/2`).
    pub fn index_of(&self, k: i64) -> usize {
        let m = self.modes_per_axis as i64;
        debug_assert!(-m / 2 <= k && k < m / 2 + 1);
        k.rem_euclid(m) as usize
    }

    /// Largest dyadic projection scale: the first power of two at or above
    /// `2 k_max`, so that the top annulus covers every represented `|k|`
    /// (including cube corners at `sqrt(3) k_max`).
    pub fn max_dyadic(&self) -> u32 {
        (2 * self.k_max() as u64).next_power_of_two() as u32
    }

    /// All dyadic scales `1, 2, 4, ..., max_dyadic()`. Together with the zero
    /// mode, the corresponding annuli partition the represented lattice.
    pub fn dyadic_scales(&self) -> Vec<u32> {
        let mut scales = Vec::new();
        let mut n = 1u32;
        while n <= self.max_dyadic() {
            scales.push(n);
            n *= 2;
        }
        scales
    }
}

/// Fourier coefficients of a field on a [`Grid`], in DFT index order with
/// axis order `(k1, k2, k3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Array3<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        let m = grid.modes_per_axis();
        Self {
            grid,
            coeffs: Array3::zeros((m, m, m)),
        }
    }

    /// Wrap raw coefficients. The Nyquist planes are zeroed; the shape must
    /// match the grid.
    pub fn from_coeffs(grid: Grid, coeffs: Array3<Complex64>) -> Result<Self> {
        let m = grid.modes_per_axis();
        let got = coeffs.shape();
        if got != [m, m, m] {
            return Err(Error::ShapeMismatch {
                expected: [m, m, m],
                got: [got[0], got[1], got[2]],
            });
        }
        let mut field = Self { grid, coeffs };
        field.zero_nyquist();
        Ok(field)
    }

    fn zero_nyquist(&mut self) {
        let ny = self.grid.modes_per_axis() / 2;
        let zero = Complex64::new(0.0, 0.0);
        self.coeffs.index_axis_mut(ndarray::Axis(0), ny).fill(zero);
        self.coeffs.index_axis_mut(ndarray::Axis(1), ny).fill(zero);
        self.coeffs.index_axis_mut(ndarray::Axis(2), ny).fill(zero);
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &Array3<Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, k: [i64; 3]) -> Complex64 {
        self.coeffs[[
            self.grid.index_of(k[0]),
            self.grid.index_of(k[1]),
            self.grid.index_of(k[2]),
        ]]
    }

    /// Set one coefficient. Silently ignored on the (always-zero) Nyquist
    /// planes.
    pub fn set_coeff(&mut self, k: [i64; 3], value: Complex64) {
        let ny = -((self.grid.modes_per_axis() / 2) as i64);
        if k.contains(&ny) {
            return;
        }
        let idx = [
            self.grid.index_of(k[0]),
            self.grid.index_of(k[1]),
            self.grid.index_of(k[2]),
        ];
        self.coeffs[idx] = value;
    }

    /// New field with per-mode coefficients `f(k, c(k))`.
    pub fn map_modes(&self, mut f: impl FnMut([i64; 3], Complex64) -> Complex64) -> Self {
        let grid = self.grid;
        let mut coeffs = self.coeffs.clone();
        for ((i1, i2, i3), c) in coeffs.indexed_iter_mut() {
            let k = [
                grid.wavenumber(i1),
                grid.wavenumber(i2),
                grid.wavenumber(i3),
            ];
            *c = f(k, *c);
        }
        Self { grid, coeffs }
    }

    /// Visit every mode.
    pub fn for_each_mode(&self, mut f: impl FnMut([i64; 3], Complex64)) {
        for ((i1, i2, i3), &c) in self.coeffs.indexed_iter() {
            let k = [
                self.grid.wavenumber(i1),
                self.grid.wavenumber(i2),
                self.grid.wavenumber(i3),
            ];
            f(k, c);
        }
    }

    /// `sum_k |c(k)|^2`; equals the mean square of the physical samples.
    pub fn mass(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Spectral inner product `sum_k c(k) conj(d(k))`, which equals
    /// `M^{-3} sum_x u(x) conj(v(x))`.
    pub fn inner_product(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.grid, other.grid);
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest coefficient-wise distance to `other`.
    pub fn max_coeff_distance(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Coefficients from collocation samples `u(j/M)`: forward DFT divided
    /// by `M^3`, Nyquist planes zeroed.
    pub fn analyze(grid: Grid, samples: &Array3<Complex64>) -> Result<Self> {
        let m = grid.modes_per_axis();
        let got = samples.shape();
        if got != [m, m, m] {
            return Err(Error::ShapeMismatch {
                expected: [m, m, m],
                got: [got[0], got[1], got[2]],
            });
        }
        let mut coeffs = samples.clone();
        Fft3::new(m).forward(&mut coeffs);
        let vol = (m * m * m) as f64;
        coeffs.mapv_inplace(|c| c / vol);
        let mut field = Self { grid, coeffs };
        field.zero_nyquist();
        Ok(field)
    }

    /// Collocation samples `u(j/M)`: unnormalized inverse DFT of the
    /// coefficients. Exact inverse of [`analyze`](Self::analyze).
    pub fn synthesize(&self) -> Array3<Complex64> {
        let mut samples = self.coeffs.clone();
        Fft3::new(self.grid.modes_per_axis()).inverse(&mut samples);
        samples
    }

    /// Samples on the `factor`-times oversampled grid. The coefficients are
    /// embedded in the larger spectral cube by wavenumber, so this evaluates
    /// the same trigonometric polynomial on a finer mesh.
    pub fn synthesize_padded(&self, factor: usize) -> Array3<Complex64> {
        assert!(factor >= 1);
        if factor == 1 {
            return self.synthesize();
        }
        let m = self.grid.modes_per_axis();
        let big = m * factor;
        let mut padded = Array3::zeros((big, big, big));
        for ((i1, i2, i3), &c) in self.coeffs.indexed_iter() {
            let j1 = self.grid.wavenumber(i1).rem_euclid(big as i64) as usize;
            let j2 = self.grid.wavenumber(i2).rem_euclid(big as i64) as usize;
            let j3 = self.grid.wavenumber(i3).rem_euclid(big as i64) as usize;
            padded[[j1, j2, j3]] = c;
        }
        Fft3::new(big).inverse(&mut padded);
        padded
    }

    /// Coefficients from samples on the oversampled grid, keeping only the
    /// wavenumbers representable on `grid` (the dealiasing truncation).
    pub fn analyze_truncated(grid: Grid, padded: &Array3<Complex64>, factor: usize) -> Result<Self> {
        assert!(factor >= 1);
        let m = grid.modes_per_axis();
        let big = m * factor;
        let got = padded.shape();
        if got != [big, big, big] {
            return Err(Error::ShapeMismatch {
                expected: [big, big, big],
                got: [got[0], got[1], got[2]],
            });
        }
        if factor == 1 {
            return Self::analyze(grid, padded);
        }
        let mut spectrum = padded.clone();
        Fft3::new(big).forward(&mut spectrum);
        let vol = (big * big * big) as f64;
        let mut field = Self::zeros(grid);
        let k_max = grid.k_max();
        for k1 in -k_max..=k_max {
            for k2 in -k_max..=k_max {
                for k3 in -k_max..=k_max {
                    let src = [
                        k1.rem_euclid(big as i64) as usize,
                        k2.rem_euclid(big as i64) as usize,
                        k3.rem_euclid(big as i64) as usize,
                    ];
                    let dst = [
                        grid.index_of(k1),
                        grid.index_of(k2),
                        grid.index_of(k3),
                    ];
                    field.coeffs[dst] = spectrum[src] / vol;
                }
            }
        }
        Ok(field)
    }
}

fn k_norm(k: [i64; 3]) -> f64 {
    ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt()
}

/// Dyadic annulus projection: keeps exactly the modes with
/// `N/2 < |k| <= N` (sharp cutoff, Euclidean norm). Sharp annuli give an
/// exact resolution of identity on the finite lattice.
pub fn lp_project(field: &SpectralField, n: u32) -> Result<SpectralField> {
    check_dyadic_scale(field.grid(), n)?;
    let lo = n as f64 / 2.0;
    let hi = n as f64;
    Ok(field.map_modes(|k, c| {
        let r = k_norm(k);
        if r > lo && r <= hi {
            c
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// Low-frequency companion of [`lp_project`]: keeps `|k| <= N/2`
/// (including the zero mode).
pub fn lp_project_below(field: &SpectralField, n: u32) -> Result<SpectralField> {
    check_dyadic_scale(field.grid(), n)?;
    let lo = n as f64 / 2.0;
    Ok(field.map_modes(|k, c| {
        if k_norm(k) <= lo {
            c
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

fn check_dyadic_scale(grid: Grid, n: u32) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "projection scale must be a positive power of two, got {n}"
        )));
    }
    if n > grid.max_dyadic() {
        return Err(Error::InvalidInput(format!(
            "projection scale {n} exceeds the top dyadic scale {} of the grid",
            grid.max_dyadic()
        )));
    }
    Ok(())
}

/// Closed axis-aligned box in frequency space, `lo[i] <= k_i <= hi[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyBox {
    pub lo: [i64; 3],
    pub hi: [i64; 3],
}

impl FrequencyBox {
    /// Box centered at the origin with side extents `(n1, n2, n3)`, i.e.
    /// `|k_i| <= n_i / 2`.
    pub fn centered(extents: [u32; 3]) -> Self {
        let half = |n: u32| (n / 2) as i64;
        Self {
            lo: [-half(extents[0]), -half(extents[1]), -half(extents[2])],
            hi: [half(extents[0]), half(extents[1]), half(extents[2])],
        }
    }

    pub fn contains(&self, k: [i64; 3]) -> bool {
        (0..3).all(|i| self.lo[i] <= k[i] && k[i] <= self.hi[i])
    }
}

/// Box projection: keeps the coefficients inside the closed box.
pub fn box_project(field: &SpectralField, b: &FrequencyBox) -> SpectralField {
    field.map_modes(|k, c| if b.contains(k) { c } else { Complex64::new(0.0, 0.0) })
}

/// Blend profile used by the multiplier symbol between its plateaus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Blend {
    /// Cubic Hermite in `r = |y|` matching value 1 / slope 0 at `r = 1` and
    /// value 2 / slope 1 at `r = 2`; factored form `1 + (r-1)^2 (3-r)`.
    /// Monotone and C^1, and stays in `[1, r]` on the transition band.
    #[default]
    CubicHermite,
}

impl Blend {
    /// The radial profile: 1 on `r <= 1`, `r` on `r >= 2`, blended between.
    pub fn theta(&self, r: f64) -> f64 {
        if r <= 1.0 {
            1.0
        } else if r >= 2.0 {
            r
        } else {
            match self {
                Blend::CubicHermite => {
                    let d = r - 1.0;
                    1.0 + d * d * (3.0 - r)
                }
            }
        }
    }
}

/// Scale and profile of the frequency multiplier `D`: symbol
/// `m(k) = theta(|k|/N)`, equal to 1 for `|k| <= N` and to `|k|/N` for
/// `|k| >= 2N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSpec {
    scale: f64,
    blend: Blend,
}

impl MultiplierSpec {
    pub fn new(scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidInput(format!(
                "multiplier scale must be finite and positive, got {scale}"
            )));
        }
        Ok(Self {
            scale,
            blend: Blend::default(),
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn blend(&self) -> Blend {
        self.blend
    }
}

/// The multiplier symbol `m(k) = theta(|k|/N)`. Radial, continuous,
/// nondecreasing along rays, with `1 <= m(k) <= max(1, |k|/N)`.
pub fn d_symbol(k: [i64; 3], spec: &MultiplierSpec) -> f64 {
    spec.blend().theta(k_norm(k) / spec.scale())
}

/// Coefficient-wise multiplication by `m(k)`.
pub fn apply_multiplier(field: &SpectralField, spec: &MultiplierSpec) -> SpectralField {
    field.map_modes(|k, c| c * d_symbol(k, spec))
}

/// Coefficient-wise division by `m(k)`; inverse of [`apply_multiplier`] up
/// to roundoff.
pub fn apply_inverse_multiplier(field: &SpectralField, spec: &MultiplierSpec) -> SpectralField {
    field.map_modes(|k, c| c / d_symbol(k, spec))
}
