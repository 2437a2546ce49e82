//! Internal 3D FFT plumbing on `Array3<Complex<f64>>`, backed by rustfft.
//!
//! Both directions are unnormalized (forward kernel `e^{-2 pi i}`, inverse
//! `e^{+2 pi i}`); callers apply their own normalization. Lanes are processed
//! in parallel, one rayon task per plane.

use ndarray::{Array3, Axis};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub(crate) struct Fft3 {
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    pub fn new(size: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    pub fn forward(&self, data: &mut Array3<Complex64>) {
        self.run(data, &self.forward);
    }

    pub fn inverse(&self, data: &mut Array3<Complex64>) {
        self.run(data, &self.inverse);
    }

    fn run(&self, data: &mut Array3<Complex64>, fft: &Arc<dyn Fft<f64>>) {
        let n = self.size;
        debug_assert_eq!(data.shape(), [n, n, n]);

        // Axis 2: lanes are contiguous rows of the flat buffer.
        {
            let flat = data
                .as_slice_mut()
                .expect("field arrays are standard layout");
            flat.par_chunks_mut(n).for_each_init(
                || vec![Complex64::default(); fft.get_inplace_scratch_len()],
                |scratch, lane| fft.process_with_scratch(lane, scratch),
            );
        }

        // Axis 1: within each i1-plane the lanes stride by n.
        data.axis_iter_mut(Axis(0))
            .into_par_iter()
            .for_each_init(
                || {
                    (
                        vec![Complex64::default(); n],
                        vec![Complex64::default(); fft.get_outofplace_scratch_len()],
                    )
                },
                |(lane, scratch), mut plane| {
                    for j3 in 0..n {
                        for j in 0..n {
                            lane[j] = plane[[j, j3]];
                        }
                        let mut out = vec![Complex64::default(); n];
                        fft.process_outofplace_with_scratch(lane, &mut out, scratch);
                        for j in 0..n {
                            plane[[j, j3]] = out[j];
                        }
                    }
                },
            );

        // Axis 0: within each i2-plane the lanes stride by n^2.
        data.axis_iter_mut(Axis(1))
            .into_par_iter()
            .for_each_init(
                || {
                    (
                        vec![Complex64::default(); n],
                        vec![Complex64::default(); fft.get_outofplace_scratch_len()],
                    )
                },
                |(lane, scratch), mut plane| {
                    for j3 in 0..n {
                        for j in 0..n {
                            lane[j] = plane[[j, j3]];
                        }
                        let mut out = vec![Complex64::default(); n];
                        fft.process_outofplace_with_scratch(lane, &mut out, scratch);
                        for j in 0..n {
                            plane[[j, j3]] = out[j];
                        }
                    }
                },
            );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array3;

    #[test]
    fn forward_then_inverse_scales_by_volume() {
        let n = 8;
        let orig = Array3::from_shape_fn((n, n, n), |(i, j, k)| {
            Complex64::new((i * 3 + j) as f64, (k as f64).sin())
        });
        let fft = Fft3::new(n);
        let mut data = orig.clone();
        fft.forward(&mut data);
        fft.inverse(&mut data);
        let vol = (n * n * n) as f64;
        for (a, b) in data.iter().zip(orig.iter()) {
            assert!((a / vol - b).norm() < 1e-12);
        }
    }

    #[test]
    fn forward_of_pure_mode_hits_one_bin() {
        let n = 8;
        // samples of e^{2 pi i (1*x + 2*y + 5*z)} on the n^3 grid
        let data0 = Array3::from_shape_fn((n, n, n), |(i, j, k)| {
            let phase = 2.0 * std::f64::consts::PI * (i as f64 * 1.0 + j as f64 * 2.0 + k as f64 * 5.0)
                / n as f64;
            Complex64::new(phase.cos(), phase.sin())
        });
        let fft = Fft3::new(n);
        let mut data = data0;
        fft.forward(&mut data);
        let vol = (n * n * n) as f64;
        for ((i, j, k), v) in data.indexed_iter() {
            let expect = if (i, j, k) == (1, 2, 5) { 1.0 } else { 0.0 };
            assert!(
                (v / vol - Complex64::new(expect, 0.0)).norm() < 1e-12,
                "bin ({i},{j},{k}) = {v}"
            );
        }
    }
}
