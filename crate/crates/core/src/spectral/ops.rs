//! Mode-wise operators: Leray projection, heat semigroup, dealiased
//! nonlinear divergence.

use num_complex::Complex64;

use super::field::{forward_pair, inverse_pair, VectorField};
use super::grid::Grid3;
use crate::error::{domain, Result};

pub(crate) type Spectrum = [Vec<Complex64>; 3];

/// Per-grid lookup tables shared by the mode loops.
#[derive(Debug, Clone)]
pub struct ModeTables {
    grid: Grid3,
    /// physical wavenumber per storage index (Nyquist kept)
    k: Vec<f64>,
    /// derivative symbol per storage index (Nyquist zeroed)
    kd: Vec<f64>,
    nyquist: Vec<bool>,
    retained: Vec<bool>,
    ksq: Vec<f64>,
}

impl ModeTables {
    pub fn new(grid: Grid3) -> Self {
        let n = grid.n();
        let cut = grid.dealias_cutoff();
        let k: Vec<f64> = (0..n).map(|m| grid.wavenumber(m)).collect();
        let nyquist: Vec<bool> = (0..n).map(|m| grid.is_nyquist(m)).collect();
        let kd = k.iter().zip(&nyquist).map(|(&v, &ny)| if ny { 0.0 } else { v }).collect();
        let retained = (0..n).map(|m| grid.signed_index(m).abs() <= cut).collect();
        Self { grid, k, kd, nyquist, retained, ksq: grid.wavenumber_sq() }
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    /// `|κ|²` per flat mode index.
    pub fn ksq(&self) -> &[f64] {
        &self.ksq
    }

    /// Leray projection in place. The mean mode is left alone and modes on a
    /// Nyquist plane are zeroed.
    pub(crate) fn leray_in_place(&self, s: &mut Spectrum) {
        let n = self.grid.n();
        let mut idx = 0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.nyquist[a] || self.nyquist[b] || self.nyquist[c] {
                        s[0][idx] = Complex64::default();
                        s[1][idx] = Complex64::default();
                        s[2][idx] = Complex64::default();
                    } else if idx != 0 {
                        let (k0, k1, k2) = (self.k[a], self.k[b], self.k[c]);
                        let kk = k0 * k0 + k1 * k1 + k2 * k2;
                        let dot = (s[0][idx] * k0 + s[1][idx] * k1 + s[2][idx] * k2) / kk;
                        s[0][idx] -= dot * k0;
                        s[1][idx] -= dot * k1;
                        s[2][idx] -= dot * k2;
                    }
                    idx += 1;
                }
            }
        }
    }

    /// Multiplies every mode by `e^{-|κ|² t}`.
    pub(crate) fn heat_in_place(&self, s: &mut Spectrum, t: f64) {
        for (idx, &ksq) in self.ksq.iter().enumerate() {
            let f = (-ksq * t).exp();
            s[0][idx] *= f;
            s[1][idx] *= f;
            s[2][idx] *= f;
        }
    }

    fn dealiased(&self, s: &Spectrum) -> Spectrum {
        let n = self.grid.n();
        let mut out = s.clone();
        for comp in out.iter_mut() {
            for a in 0..n {
                for b in 0..n {
                    let row = (a * n + b) * n;
                    let keep_ab = self.retained[a] && self.retained[b];
                    for c in 0..n {
                        if !(keep_ab && self.retained[c]) {
                            comp[row + c] = Complex64::default();
                        }
                    }
                }
            }
        }
        out
    }

    /// `∇·(f⊗g)` with components `Σ_j ∂_j (f_j g_i)`, products formed in
    /// physical space from 2/3-truncated inputs and truncated again after.
    /// `g = None` means `g = f`.
    pub(crate) fn divergence_of_product(&self, f: &Spectrum, g: Option<&Spectrum>) -> Spectrum {
        let grid = &self.grid;
        let n3 = grid.len();
        let fd = self.dealiased(f);
        let gd = g.map(|g| self.dealiased(g));

        let (f0, f1) = inverse_pair(grid, &fd[0], Some(&fd[1]));
        let f1 = f1.unwrap();
        let (fp, gp): ([Vec<f64>; 3], Option<[Vec<f64>; 3]>) = match &gd {
            None => {
                let (f2, _) = inverse_pair(grid, &fd[2], None);
                ([f0, f1, f2], None)
            }
            // f and g are never packed together, so B(0, g) is exactly zero
            Some(gd) => {
                let (f2, _) = inverse_pair(grid, &fd[2], None);
                let (g0, g1) = inverse_pair(grid, &gd[0], Some(&gd[1]));
                let (g2, _) = inverse_pair(grid, &gd[2], None);
                ([f0, f1, f2], Some([g0, g1.unwrap(), g2]))
            }
        };
        let gp_ref = gp.as_ref().unwrap_or(&fp);

        // product[j][i] = f_j g_i, transformed
        let mut prod: Vec<Vec<f64>> = Vec::with_capacity(9);
        let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(9);
        for j in 0..3 {
            for i in 0..3 {
                if gp.is_none() && i < j {
                    continue;
                }
                prod.push((0..n3).map(|x| fp[j][x] * gp_ref[i][x]).collect());
                pairs.push((j, i));
            }
        }
        let mut hat: Vec<Vec<Complex64>> = Vec::with_capacity(prod.len());
        let mut it = prod.chunks(2);
        for chunk in &mut it {
            let (a, b) = forward_pair(grid, &chunk[0], chunk.get(1).map(|v| v.as_slice()));
            hat.push(a);
            if let Some(b) = b {
                hat.push(b);
            }
        }
        let lookup = |j: usize, i: usize| -> &Vec<Complex64> {
            let key = if gp.is_none() && i < j { (i, j) } else { (j, i) };
            let pos = pairs.iter().position(|&p| p == key).expect("product present");
            &hat[pos]
        };
        let mut out: Spectrum = std::array::from_fn(|_| vec![Complex64::default(); n3]);
        let n = grid.n();
        let terms: [[&Vec<Complex64>; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| lookup(j, i)));
        let mut idx = 0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.retained[a] && self.retained[b] && self.retained[c] {
                        let kv = [self.kd[a], self.kd[b], self.kd[c]];
                        for i in 0..3 {
                            let mut acc = Complex64::default();
                            for j in 0..3 {
                                acc += terms[i][j][idx] * kv[j];
                            }
                            out[i][idx] = Complex64::new(-acc.im, acc.re);
                        }
                    }
                    idx += 1;
                }
            }
        }
        out
    }

    /// Duhamel forcing `P ∇·(f⊗g)`.
    pub(crate) fn projected_forcing(&self, f: &Spectrum, g: Option<&Spectrum>) -> Spectrum {
        let mut out = self.divergence_of_product(f, g);
        self.leray_in_place(&mut out);
        out
    }

    /// Spectral divergence `iκ·û` (derivative symbol, Nyquist zeroed).
    pub(crate) fn divergence(&self, s: &Spectrum) -> Vec<Complex64> {
        let n = self.grid.n();
        let mut out = vec![Complex64::default(); self.grid.len()];
        let mut idx = 0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let d = s[0][idx] * self.kd[a] + s[1][idx] * self.kd[b] + s[2][idx] * self.kd[c];
                    out[idx] = Complex64::new(-d.im, d.re);
                    idx += 1;
                }
            }
        }
        out
    }

    /// Spectral gradient `iκ φ̂` of a scalar spectrum.
    pub(crate) fn gradient(&self, phi: &[Complex64]) -> Spectrum {
        let n = self.grid.n();
        let mut out: Spectrum = std::array::from_fn(|_| vec![Complex64::default(); self.grid.len()]);
        let mut idx = 0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let ik = Complex64::new(-phi[idx].im, phi[idx].re);
                    out[0][idx] = ik * self.kd[a];
                    out[1][idx] = ik * self.kd[b];
                    out[2][idx] = ik * self.kd[c];
                    idx += 1;
                }
            }
        }
        out
    }

    /// Spectral curl `iκ × ψ̂`; Nyquist-plane modes are zeroed so that the
    /// result is solenoidal for the full wavevector.
    pub(crate) fn curl(&self, psi: &Spectrum) -> Spectrum {
        let n = self.grid.n();
        let mut out: Spectrum = std::array::from_fn(|_| vec![Complex64::default(); self.grid.len()]);
        let mut idx = 0;
        let i = |z: Complex64| Complex64::new(-z.im, z.re);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.nyquist[a] || self.nyquist[b] || self.nyquist[c] {
                        idx += 1;
                        continue;
                    }
                    let k = [self.kd[a], self.kd[b], self.kd[c]];
                    let p = [psi[0][idx], psi[1][idx], psi[2][idx]];
                    out[0][idx] = i(p[2] * k[1] - p[1] * k[2]);
                    out[1][idx] = i(p[0] * k[2] - p[2] * k[0]);
                    out[2][idx] = i(p[1] * k[0] - p[0] * k[1]);
                    idx += 1;
                }
            }
        }
        out
    }
}

/// Leray projection `û ↦ û − κ(κ·û)/|κ|²`; the mean mode is unchanged and
/// Nyquist-plane modes are zeroed.
pub fn leray_project(f: &VectorField) -> Result<VectorField> {
    let mut s = f.spectral()?.clone();
    ModeTables::new(*f.grid()).leray_in_place(&mut s);
    VectorField::from_spectral(*f.grid(), s)
}

/// Heat semigroup `e^{tΔ}`, exact per mode.
pub fn heat_semigroup(f: &VectorField, t: f64) -> Result<VectorField> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(domain(format!("heat semigroup needs t >= 0, got {t}")));
    }
    let mut s = f.spectral()?.clone();
    ModeTables::new(*f.grid()).heat_in_place(&mut s, t);
    VectorField::from_spectral(*f.grid(), s)
}

/// Dealiased `∇·(f⊗g)` in spectral form, not projected.
pub fn nonlinear_divergence(f: &VectorField, g: &VectorField) -> Result<VectorField> {
    f.check_same_grid(g)?;
    let fs = f.to_spectral();
    let gs = g.to_spectral();
    let tables = ModeTables::new(*f.grid());
    let out = tables.divergence_of_product(fs.spectral()?, Some(gs.spectral()?));
    VectorField::from_spectral(*f.grid(), out)
}

/// Spectral divergence of `f` as a scalar spectrum.
pub fn divergence(f: &VectorField) -> Result<Vec<Complex64>> {
    let s = f.to_spectral();
    Ok(ModeTables::new(*f.grid()).divergence(s.spectral()?))
}

/// Gradient of a scalar given by its spectrum.
pub fn gradient(grid: Grid3, phi: &[Complex64]) -> Result<VectorField> {
    VectorField::from_spectral(grid, ModeTables::new(grid).gradient(phi))
}

/// Curl of a vector potential.
pub fn curl(psi: &VectorField) -> Result<VectorField> {
    let s = psi.to_spectral();
    VectorField::from_spectral(*psi.grid(), ModeTables::new(*psi.grid()).curl(s.spectral()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::field::Representation;
    use std::f64::consts::PI;

    fn single_mode(grid: Grid3, idx: [i64; 3], amp: [Complex64; 3]) -> VectorField {
        let mut s: Spectrum = std::array::from_fn(|_| vec![Complex64::default(); grid.len()]);
        let p = grid.flat(grid.storage_index(idx[0]), grid.storage_index(idx[1]), grid.storage_index(idx[2]));
        let m = grid.flat(grid.storage_index(-idx[0]), grid.storage_index(-idx[1]), grid.storage_index(-idx[2]));
        for c in 0..3 {
            s[c][p] += amp[c];
            s[c][m] += amp[c].conj();
        }
        VectorField::from_spectral(grid, s).unwrap()
    }

    fn max_abs(f: &VectorField) -> f64 {
        f.spectral().unwrap().iter().flatten().fold(0.0f64, |m, v| m.max(v.norm()))
    }

    fn random_field(grid: Grid3, seed: u64) -> VectorField {
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let comps = std::array::from_fn(|_| (0..grid.len()).map(|_| next()).collect());
        VectorField::from_physical(grid, comps).unwrap().to_spectral()
    }

    #[test]
    fn leray_annihilates_gradients() {
        let g = Grid3::periodic_2pi(16).unwrap();
        let mut phi = vec![Complex64::default(); g.len()];
        let p = g.flat(2, 1, g.storage_index(-3));
        phi[p] = Complex64::new(0.7, -0.2);
        phi[g.conjugate_index(p)] = Complex64::new(0.7, 0.2);
        let grad = gradient(g, &phi).unwrap();
        assert!(max_abs(&grad) > 1.0);
        let proj = leray_project(&grad).unwrap();
        assert!(max_abs(&proj) <= 1e-12 * max_abs(&grad));
    }

    #[test]
    fn leray_identity_on_solenoidal_and_idempotent() {
        let g = Grid3::periodic_2pi(8).unwrap();
        let f = single_mode(g, [0, 1, 0], [Complex64::new(1.0, 0.5), Complex64::default(), Complex64::default()]);
        let p = leray_project(&f).unwrap();
        assert_eq!(p, f);

        let r = random_field(g, 7);
        let p1 = leray_project(&r).unwrap();
        let p2 = leray_project(&p1).unwrap();
        let d = p2.sub(&p1).unwrap();
        assert!(max_abs(&d) <= 1e-12 * max_abs(&p1));
        assert!(p1.divergence_error() <= 1e-12);
        assert!(p1.hermitian_error() <= 1e-12);
        // mean mode untouched
        assert_eq!(p1.mean(), r.mean());
    }

    #[test]
    fn leray_rejects_physical() {
        let g = Grid3::periodic_2pi(4).unwrap();
        assert!(leray_project(&VectorField::zeros_physical(g)).is_err());
        assert!(heat_semigroup(&VectorField::zeros_physical(g), 1.0).is_err());
    }

    #[test]
    fn heat_single_mode_factor_and_semigroup() {
        let g = Grid3::periodic_2pi(8).unwrap();
        let f = single_mode(g, [1, 0, 0], [Complex64::default(), Complex64::new(0.5, 0.0), Complex64::default()]);
        let h = heat_semigroup(&f, 0.5).unwrap();
        let idx = g.flat(1, 0, 0);
        let ratio = h.spectral().unwrap()[1][idx].re / f.spectral().unwrap()[1][idx].re;
        assert!((ratio - 0.6065306597126334).abs() < 1e-15);
        assert_eq!(heat_semigroup(&f, 0.0).unwrap(), f);
        assert!(heat_semigroup(&f, -1.0).is_err());

        let r = random_field(g, 3);
        let a = heat_semigroup(&heat_semigroup(&r, 0.1).unwrap(), 0.25).unwrap();
        let b = heat_semigroup(&r, 0.35).unwrap();
        assert!(max_abs(&a.sub(&b).unwrap()) <= 1e-12 * max_abs(&r));
    }

    #[test]
    fn heat_preserves_solenoidality() {
        let g = Grid3::periodic_2pi(8).unwrap();
        let p = leray_project(&random_field(g, 11)).unwrap();
        let h = heat_semigroup(&p, 0.05).unwrap();
        assert!(h.divergence_error() <= 1e-12);
        assert!(h.hermitian_error() <= 1e-12);
    }

    #[test]
    fn nonlinear_of_zero_is_zero() {
        let g = Grid3::periodic_2pi(8).unwrap();
        let r = random_field(g, 5);
        let z = VectorField::zeros_spectral(g);
        let out = nonlinear_divergence(&z, &r).unwrap();
        assert_eq!(max_abs(&out), 0.0);
        assert_eq!(max_abs(&nonlinear_divergence(&r, &z).unwrap()), 0.0);
        assert_eq!(out.representation(), Representation::Spectral);
        let other = VectorField::zeros_spectral(Grid3::periodic_2pi(16).unwrap());
        assert!(nonlinear_divergence(&r, &other).is_err());
    }

    /// Two single modes: f = a e^{ip·x} + c.c., g = b e^{iq·x} + c.c.
    /// Then Σ_j ∂_j(f_j g_i) only lives at ±p±q with amplitude i((k·a) b)
    /// where k is the output wavevector and a, b the paired amplitudes.
    #[test]
    fn two_mode_symbolic_convolution() {
        let g = Grid3::periodic_2pi(16).unwrap();
        let p = [1i64, 2, 0];
        let q = [0i64, -1, 3];
        let a = [Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4), Complex64::new(0.5, 0.0)];
        let b = [Complex64::new(0.0, 0.7), Complex64::new(0.1, -0.3), Complex64::new(-0.4, 0.2)];
        let f = single_mode(g, p, a);
        let gg = single_mode(g, q, b);
        let out = nonlinear_divergence(&f, &gg).unwrap();
        let sp = out.spectral().unwrap();

        let mut expected: Spectrum = std::array::from_fn(|_| vec![Complex64::default(); g.len()]);
        let fm = [(p, a), ([-p[0], -p[1], -p[2]], a.map(|v| v.conj()))];
        let gm = [(q, b), ([-q[0], -q[1], -q[2]], b.map(|v| v.conj()))];
        for (pv, av) in fm {
            for (qv, bv) in gm {
                let s = [pv[0] + qv[0], pv[1] + qv[1], pv[2] + qv[2]];
                let k: Vec<f64> = s.iter().map(|&v| v as f64 * 2.0 * PI / g.box_length()).collect();
                let idx = g.flat(g.storage_index(s[0]), g.storage_index(s[1]), g.storage_index(s[2]));
                let kdota = av[0] * k[0] + av[1] * k[1] + av[2] * k[2];
                for i in 0..3 {
                    expected[i][idx] += Complex64::new(0.0, 1.0) * kdota * bv[i];
                }
            }
        }
        for c in 0..3 {
            for idx in 0..g.len() {
                assert!((sp[c][idx] - expected[c][idx]).norm() < 1e-13, "mode {idx} comp {c}");
            }
        }
    }

    /// Brute-force spectral convolution over the retained modes on 8³.
    #[test]
    fn matches_brute_force_convolution_8cubed() {
        let g = Grid3::periodic_2pi(8).unwrap();
        let f = leray_project(&random_field(g, 21)).unwrap();
        let h = leray_project(&random_field(g, 22)).unwrap();
        let out = nonlinear_divergence(&f, &h).unwrap();
        let sp = out.spectral().unwrap();
        let (fs, hs) = (f.spectral().unwrap(), h.spectral().unwrap());
        let cut = g.dealias_cutoff();
        let keep = |idx: usize| g.unflat(idx).iter().all(|&m| g.signed_index(m).abs() <= cut);
        let sidx = |idx: usize| g.unflat(idx).map(|m| g.signed_index(m));
        let mut expected: Spectrum = std::array::from_fn(|_| vec![Complex64::default(); g.len()]);
        for pi in (0..g.len()).filter(|&i| keep(i)) {
            for qi in (0..g.len()).filter(|&i| keep(i)) {
                let (ps, qs) = (sidx(pi), sidx(qi));
                let s = [ps[0] + qs[0], ps[1] + qs[1], ps[2] + qs[2]];
                if s.iter().any(|v| v.abs() > cut) {
                    continue;
                }
                let idx = g.flat(g.storage_index(s[0]), g.storage_index(s[1]), g.storage_index(s[2]));
                let k = s.map(|v| v as f64);
                let kdotf = fs[0][pi] * k[0] + fs[1][pi] * k[1] + fs[2][pi] * k[2];
                for i in 0..3 {
                    expected[i][idx] += Complex64::new(0.0, 1.0) * kdotf * hs[i][qi];
                }
            }
        }
        let scale = expected.iter().flatten().fold(0.0f64, |m, v| m.max(v.norm()));
        for c in 0..3 {
            for idx in 0..g.len() {
                assert!((sp[c][idx] - expected[c][idx]).norm() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn curl_is_solenoidal() {
        let g = Grid3::periodic_2pi(8).unwrap();
        let c = curl(&random_field(g, 4)).unwrap();
        assert!(c.divergence_error() <= 1e-14);
        let d = divergence(&c).unwrap();
        assert!(d.iter().all(|v| v.norm() < 1e-14));
    }
}
