//! Cached 3-D complex FFT plans for cubic grids.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward/inverse 1-D plans of length `n`, applied along each axis.
pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();

/// Shared plan for an `n^3` grid. Plans are immutable and safe to use from
/// several threads at once.
pub fn plan(n: usize) -> Arc<Fft3> {
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Fft3 {
                n,
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

impl Fft3 {
    /// Unnormalised forward transform, `X(κ) = Σ_x x e^{-iκx}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &*self.forward);
    }

    /// Unnormalised inverse transform, `x = Σ_κ X(κ) e^{iκx}`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &*self.inverse);
    }

    fn run(&self, data: &mut [Complex64], fft: &dyn Fft<f64>) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n, "buffer does not match plan size");
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        // innermost axis is contiguous
        fft.process_with_scratch(data, &mut scratch);

        let mut buf = vec![Complex64::default(); n * n];
        for plane in data.chunks_exact_mut(n * n) {
            for j in 0..n {
                for k in 0..n {
                    buf[k * n + j] = plane[j * n + k];
                }
            }
            fft.process_with_scratch(&mut buf, &mut scratch);
            for j in 0..n {
                for k in 0..n {
                    plane[j * n + k] = buf[k * n + j];
                }
            }
        }

        for j in 0..n {
            for i in 0..n {
                let row = &data[(i * n + j) * n..(i * n + j + 1) * n];
                for (k, v) in row.iter().enumerate() {
                    buf[k * n + i] = *v;
                }
            }
            fft.process_with_scratch(&mut buf, &mut scratch);
            for i in 0..n {
                let row = &mut data[(i * n + j) * n..(i * n + j + 1) * n];
                for (k, v) in row.iter_mut().enumerate() {
                    *v = buf[k * n + i];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn matches_direct_dft_on_small_grid() {
        let n = 4;
        let data: Vec<Complex64> = (0..n * n * n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut fast = data.clone();
        plan(n).forward(&mut fast);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut acc = Complex64::default();
                    for i in 0..n {
                        for j in 0..n {
                            for k in 0..n {
                                let ph = -2.0 * PI * ((a * i + b * j + c * k) as f64) / n as f64;
                                acc += data[(i * n + j) * n + k] * Complex64::from_polar(1.0, ph);
                            }
                        }
                    }
                    assert!((acc - fast[(a * n + b) * n + c]).norm() < 1e-12);
                }
            }
        }
        plan(n).inverse(&mut fast);
        for (x, y) in fast.iter().zip(&data) {
            assert!((x / (n * n * n) as f64 - y).norm() < 1e-14);
        }
    }
}
