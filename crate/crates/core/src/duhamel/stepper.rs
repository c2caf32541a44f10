use num_complex::Complex64;

use crate::spectral::{ModeTables, Spectrum};

/// `a(z) = (1 - e^{-z})/z` and `b(z) = (1 - (1+z)e^{-z})/z²`, with their
/// Taylor series below `z = 1e-4`.
pub fn phi_weights(z: f64) -> (f64, f64) {
    if z < 1e-4 {
        let a = 1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0;
        let b = 0.5 - z / 3.0 + z * z / 8.0 - z * z * z / 30.0;
        (a, b)
    } else {
        let e = (-z).exp();
        ((1.0 - e) / z, (1.0 - (1.0 + z) * e) / (z * z))
    }
}

/// Per-mode coefficients of the exponential-trapezoid recurrence
/// `B_{j+1} = e^{-|κ|²h} B_j + w_old F_j + w_new F_{j+1}`, which integrates
/// the linear interpolant of `F` exactly against `e^{-|κ|²(t-s)}`.
#[derive(Debug, Clone)]
pub struct DuhamelStepper {
    dt: f64,
    decay: Vec<f64>,
    w_old: Vec<f64>,
    w_new: Vec<f64>,
}

impl DuhamelStepper {
    pub fn new(tables: &ModeTables, dt: f64) -> Self {
        let ksq = tables.ksq();
        let mut decay = Vec::with_capacity(ksq.len());
        let mut w_old = Vec::with_capacity(ksq.len());
        let mut w_new = Vec::with_capacity(ksq.len());
        for &k2 in ksq {
            let z = k2 * dt;
            let (a, b) = phi_weights(z);
            decay.push((-z).exp());
            w_old.push(dt * b);
            w_new.push(dt * (a - b));
        }
        Self { dt, decay, w_old, w_new }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// The part of the next value that does not involve `F_{j+1}`.
    pub(crate) fn explicit_part(&self, b: &Spectrum, f_old: &Spectrum) -> Spectrum {
        std::array::from_fn(|c| {
            b[c].iter()
                .zip(&f_old[c])
                .enumerate()
                .map(|(idx, (&bv, &fv))| bv * self.decay[idx] + fv * self.w_old[idx])
                .collect()
        })
    }

    /// `explicit + w_new F_{j+1}`.
    pub(crate) fn complete(&self, explicit: &Spectrum, f_new: &Spectrum) -> Spectrum {
        std::array::from_fn(|c| {
            explicit[c]
                .iter()
                .zip(&f_new[c])
                .enumerate()
                .map(|(idx, (&ev, &fv))| ev + fv * self.w_new[idx])
                .collect()
        })
    }

    /// One full step of the recurrence.
    pub(crate) fn step(&self, b: &Spectrum, f_old: &Spectrum, f_new: &Spectrum) -> Spectrum {
        self.complete(&self.explicit_part(b, f_old), f_new)
    }
}

pub(crate) fn zero_spectrum(len: usize) -> Spectrum {
    std::array::from_fn(|_| vec![Complex64::default(); len])
}
