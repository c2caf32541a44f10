use num_complex::Complex64;

use super::fft;
use super::grid::Grid3;
use crate::error::{shape, LabError, Result};

/// Which space a [`VectorField`] currently lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Spectral,
    Physical,
}

#[derive(Debug, Clone, PartialEq)]
enum FieldData {
    Spectral([Vec<Complex64>; 3]),
    Physical([Vec<f64>; 3]),
}

/// Three-component real vector field on a periodic [`Grid3`].
///
/// Spectral amplitudes are Fourier-series coefficients,
/// `u(x) = Σ_κ û(κ) e^{iκ·x}`, so the forward transform carries the `1/n³`
/// factor and Parseval reads `∫|u|² = L³ Σ|û|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid3,
    data: FieldData,
}

impl VectorField {
    pub fn zeros_spectral(grid: Grid3) -> Self {
        let z = vec![Complex64::default(); grid.len()];
        Self { grid, data: FieldData::Spectral([z.clone(), z.clone(), z]) }
    }

    pub fn zeros_physical(grid: Grid3) -> Self {
        let z = vec![0.0; grid.len()];
        Self { grid, data: FieldData::Physical([z.clone(), z.clone(), z]) }
    }

    pub fn from_physical(grid: Grid3, comps: [Vec<f64>; 3]) -> Result<Self> {
        for c in &comps {
            if c.len() != grid.len() {
                return Err(shape(format!("component length {} != {}", c.len(), grid.len())));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(LabError::Domain("non-finite physical sample".into()));
            }
        }
        Ok(Self { grid, data: FieldData::Physical(comps) })
    }

    pub fn from_spectral(grid: Grid3, comps: [Vec<Complex64>; 3]) -> Result<Self> {
        for c in &comps {
            if c.len() != grid.len() {
                return Err(shape(format!("component length {} != {}", c.len(), grid.len())));
            }
            if c.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
                return Err(LabError::Domain("non-finite spectral amplitude".into()));
            }
        }
        Ok(Self { grid, data: FieldData::Spectral(comps) })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> [f64; 3]) -> Result<Self> {
        let mut comps = [vec![0.0; grid.len()], vec![0.0; grid.len()], vec![0.0; grid.len()]];
        for idx in 0..grid.len() {
            let v = f(grid.point(idx));
            for c in 0..3 {
                comps[c][idx] = v[c];
            }
        }
        Self::from_physical(grid, comps)
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        match self.data {
            FieldData::Spectral(_) => Representation::Spectral,
            FieldData::Physical(_) => Representation::Physical,
        }
    }

    pub fn spectral(&self) -> Result<&[Vec<Complex64>; 3]> {
        match &self.data {
            FieldData::Spectral(c) => Ok(c),
            FieldData::Physical(_) => Err(LabError::Representation { expected: "spectral" }),
        }
    }

    pub fn physical(&self) -> Result<&[Vec<f64>; 3]> {
        match &self.data {
            FieldData::Physical(c) => Ok(c),
            FieldData::Spectral(_) => Err(LabError::Representation { expected: "physical" }),
        }
    }

    pub fn into_spectral_parts(self) -> Result<[Vec<Complex64>; 3]> {
        match self.data {
            FieldData::Spectral(c) => Ok(c),
            FieldData::Physical(_) => Err(LabError::Representation { expected: "spectral" }),
        }
    }

    pub fn to_spectral(&self) -> VectorField {
        match &self.data {
            FieldData::Spectral(_) => self.clone(),
            FieldData::Physical(p) => {
                let (x, y) = forward_pair(&self.grid, &p[0], Some(&p[1]));
                let (z, _) = forward_pair(&self.grid, &p[2], None);
                Self { grid: self.grid, data: FieldData::Spectral([x, y.unwrap(), z]) }
            }
        }
    }

    pub fn to_physical(&self) -> VectorField {
        match &self.data {
            FieldData::Physical(_) => self.clone(),
            FieldData::Spectral(s) => {
                let (x, y) = inverse_pair(&self.grid, &s[0], Some(&s[1]));
                let (z, _) = inverse_pair(&self.grid, &s[2], None);
                Self { grid: self.grid, data: FieldData::Physical([x, y.unwrap(), z]) }
            }
        }
    }

    /// Pointwise Euclidean magnitude of the physical field.
    pub fn magnitudes(&self) -> Vec<f64> {
        let phys = self.to_physical();
        let p = phys.physical().expect("physical");
        (0..self.grid.len())
            .map(|i| (p[0][i] * p[0][i] + p[1][i] * p[1][i] + p[2][i] * p[2][i]).sqrt())
            .collect()
    }

    pub fn scaled(&self, alpha: f64) -> VectorField {
        let data = match &self.data {
            FieldData::Spectral(s) => FieldData::Spectral(s.clone().map(|c| c.into_iter().map(|v| v * alpha).collect())),
            FieldData::Physical(p) => FieldData::Physical(p.clone().map(|c| c.into_iter().map(|v| v * alpha).collect())),
        };
        Self { grid: self.grid, data }
    }

    /// `self + alpha * other`, both in the same representation.
    pub fn axpy(&self, alpha: f64, other: &VectorField) -> Result<VectorField> {
        self.check_same_grid(other)?;
        let data = match (&self.data, &other.data) {
            (FieldData::Spectral(a), FieldData::Spectral(b)) => FieldData::Spectral(std::array::from_fn(|c| {
                a[c].iter().zip(&b[c]).map(|(x, y)| x + y * alpha).collect()
            })),
            (FieldData::Physical(a), FieldData::Physical(b)) => FieldData::Physical(std::array::from_fn(|c| {
                a[c].iter().zip(&b[c]).map(|(x, y)| x + y * alpha).collect()
            })),
            _ => return Err(shape("representations differ")),
        };
        Ok(Self { grid: self.grid, data })
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        self.axpy(-1.0, other)
    }

    pub fn check_same_grid(&self, other: &VectorField) -> Result<()> {
        if self.grid != other.grid {
            return Err(shape(format!("grid mismatch: {:?} vs {:?}", self.grid, other.grid)));
        }
        Ok(())
    }

    /// Largest spectral amplitude magnitude over all modes and components.
    pub fn max_mode(&self) -> f64 {
        let s = self.to_spectral();
        let s = s.spectral().expect("spectral");
        (0..self.grid.len())
            .map(|i| (s[0][i].norm_sqr() + s[1][i].norm_sqr() + s[2][i].norm_sqr()).sqrt())
            .fold(0.0, f64::max)
    }

    /// `max_κ |κ·û(κ)| / |κ|`, divided by the largest mode amplitude.
    pub fn divergence_error(&self) -> f64 {
        let s = self.to_spectral();
        let sp = s.spectral().expect("spectral");
        let scale = self.max_mode();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for idx in 0..self.grid.len() {
            let k = self.grid.wavevector(idx);
            let kk = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
            if kk == 0.0 {
                continue;
            }
            let d = sp[0][idx] * k[0] + sp[1][idx] * k[1] + sp[2][idx] * k[2];
            worst = worst.max(d.norm() / kk);
        }
        worst / scale
    }

    /// `max_κ |û(κ) - conj(û(-κ))|`, divided by the largest mode amplitude.
    pub fn hermitian_error(&self) -> f64 {
        let s = self.to_spectral();
        let sp = s.spectral().expect("spectral");
        let scale = self.max_mode();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for idx in 0..self.grid.len() {
            let j = self.grid.conjugate_index(idx);
            for c in sp {
                worst = worst.max((c[idx] - c[j].conj()).norm());
            }
        }
        worst / scale
    }

    /// Mean (κ = 0) amplitude per component.
    pub fn mean(&self) -> [f64; 3] {
        let s = self.to_spectral();
        let sp = s.spectral().expect("spectral");
        [sp[0][0].re, sp[1][0].re, sp[2][0].re]
    }

    /// `‖u‖_{L²}` over the whole box via Parseval.
    pub fn l2_norm(&self) -> f64 {
        match &self.data {
            FieldData::Spectral(s) => {
                let sum: f64 = s.iter().map(|c| c.iter().map(|v| v.norm_sqr()).sum::<f64>()).sum();
                (self.grid.box_length().powi(3) * sum).sqrt()
            }
            FieldData::Physical(p) => {
                let sum: f64 = p.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>()).sum();
                (self.grid.cell_volume() * sum).sqrt()
            }
        }
    }

    /// `‖∇u‖_{L²}` from the spectral representation.
    pub fn gradient_l2_norm(&self) -> f64 {
        let s = self.to_spectral();
        let sp = s.spectral().expect("spectral");
        let ksq = self.grid.wavenumber_sq();
        let sum: f64 = (0..self.grid.len())
            .map(|i| ksq[i] * (sp[0][i].norm_sqr() + sp[1][i].norm_sqr() + sp[2][i].norm_sqr()))
            .sum();
        (self.grid.box_length().powi(3) * sum).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        match &self.data {
            FieldData::Spectral(s) => s.iter().all(|c| c.iter().all(|v| v.re.is_finite() && v.im.is_finite())),
            FieldData::Physical(p) => p.iter().all(|c| c.iter().all(|v| v.is_finite())),
        }
    }
}

/// Forward transform of one or two real arrays packed into a single complex
/// FFT. The returned spectra are Hermitian to the last bit.
pub(crate) fn forward_pair(grid: &Grid3, a: &[f64], b: Option<&[f64]>) -> (Vec<Complex64>, Option<Vec<Complex64>>) {
    let n3 = grid.len();
    let mut z: Vec<Complex64> = match b {
        Some(b) => a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect(),
        None => a.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
    };
    fft::plan(grid.n()).forward(&mut z);
    let scale = 0.5 / n3 as f64;
    let n = grid.n();
    let neg: Vec<usize> = (0..n).map(|m| (n - m) % n).collect();
    let mut xa = Vec::with_capacity(n3);
    let mut xb = b.map(|_| Vec::with_capacity(n3));
    for a in 0..n {
        for b in 0..n {
            let conj_row = (neg[a] * n + neg[b]) * n;
            let row = (a * n + b) * n;
            for c in 0..n {
                let zv = z[row + c];
                let zc = z[conj_row + neg[c]].conj();
                xa.push((zv + zc) * scale);
                if let Some(xb) = xb.as_mut() {
                    // (Z(κ) - conj Z(-κ)) / (2i)
                    let d = zv - zc;
                    xb.push(Complex64::new(d.im, -d.re) * scale);
                }
            }
        }
    }
    (xa, xb)
}

/// Inverse transform of one or two Hermitian spectra packed into a single
/// complex FFT.
pub(crate) fn inverse_pair(grid: &Grid3, a: &[Complex64], b: Option<&[Complex64]>) -> (Vec<f64>, Option<Vec<f64>>) {
    let mut z: Vec<Complex64> = match b {
        Some(b) => a.iter().zip(b).map(|(&x, &y)| x + Complex64::new(-y.im, y.re)).collect(),
        None => a.to_vec(),
    };
    fft::plan(grid.n()).inverse(&mut z);
    let ra = z.iter().map(|v| v.re).collect();
    let rb = b.map(|_| z.iter().map(|v| v.im).collect());
    (ra, rb)
}
