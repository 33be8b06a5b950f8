//! UPA steering vectors, LoS matrices, Rician sampling, LoS-EGC combining,
//! bounded CSI errors, and a small CSV dump format for channel fixtures.

use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CVec = DVector<Complex64>;
pub type CMat = DMatrix<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    pub m_x: usize,
    pub m_z: usize,
    pub spacing_over_lambda: f64,
}

impl ArrayConfig {
    pub fn new(m_x: usize, m_z: usize, spacing_over_lambda: f64) -> Result<Self> {
        if m_x == 0 || m_z == 0 {
            return Err(Error::domain("array dimensions must be at least 1"));
        }
        if !(spacing_over_lambda > 0.0) {
            return Err(Error::domain("element spacing must be positive"));
        }
        Ok(Self {
            m_x,
            m_z,
            spacing_over_lambda,
        })
    }

    pub fn len(&self) -> usize {
        self.m_x * self.m_z
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat Kronecker index of element `(i_x, i_z)`.
    pub fn index(&self, i_x: usize, i_z: usize) -> usize {
        i_x * self.m_z + i_z
    }

    pub fn element(&self, index: usize) -> (usize, usize) {
        (index / self.m_z, index % self.m_z)
    }
}

/// Rician model of one link: K-factor and LoS matrix `H̄ = g d†`.
#[derive(Debug, Clone, PartialEq)]
pub struct RicianModel {
    pub k_factor: f64,
    pub los_matrix: CMat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h: CMat,
    pub draw_id: u64,
}

/// Frobenius radii of the estimation-error balls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct CsiErrorBound {
    pub delta_b: f64,
    pub delta_w: Vec<f64>,
}

impl CsiErrorBound {
    pub fn uniform(delta: f64, n_wardens: usize) -> Result<Self> {
        let b = Self {
            delta_b: delta,
            delta_w: vec![delta; n_wardens],
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_b >= 0.0) || self.delta_w.iter().any(|d| !(*d >= 0.0)) {
            return Err(Error::domain("CSI error radii must be nonnegative"));
        }
        Ok(())
    }
}

/// Linear-array signature `exp(−j2π(Δd/λ)k·x)`, `k = 0..n`.
pub fn spatial_signature(n: usize, x: f64, spacing_over_lambda: f64) -> Result<CVec> {
    if !(x.abs() <= 1.0) {
        return Err(Error::domain(format!("direction cosine {x} outside [-1, 1]")));
    }
    let step = -std::f64::consts::TAU * spacing_over_lambda * x;
    Ok(CVec::from_fn(n, |k, _| Complex64::from_polar(1.0, step * k as f64)))
}

fn kron(a: &CVec, b: &CVec) -> CVec {
    CVec::from_fn(a.len() * b.len(), |i, _| a[i / b.len()] * b[i % b.len()])
}

/// Satellite UPA response: `a_{m_x}(sin θ) ⊗ a_{m_z}(cos θ sin φ)`.
pub fn satellite_steering(cfg: &ArrayConfig, theta: f64, phi: f64) -> CVec {
    let s = cfg.spacing_over_lambda;
    let ax = spatial_signature(cfg.m_x, theta.sin().clamp(-1.0, 1.0), s).expect("clamped");
    let az = spatial_signature(cfg.m_z, (theta.cos() * phi.sin()).clamp(-1.0, 1.0), s)
        .expect("clamped");
    kron(&ax, &az)
}

/// Earth-station UPA response: `a_{m_x}(sin θ) ⊗ a_{m_z}(sin θ sin φ)`.
pub fn earth_station_steering(cfg: &ArrayConfig, theta: f64, phi: f64) -> CVec {
    let s = cfg.spacing_over_lambda;
    let ax = spatial_signature(cfg.m_x, theta.sin().clamp(-1.0, 1.0), s).expect("clamped");
    let az = spatial_signature(cfg.m_z, (theta.sin() * phi.sin()).clamp(-1.0, 1.0), s)
        .expect("clamped");
    kron(&ax, &az)
}

pub fn los_matrix(g_rx: &CVec, d_tx: &CVec) -> CMat {
    g_rx * d_tx.adjoint()
}

pub fn los_egc_vector(g_rx: &CVec) -> CVec {
    g_rx.unscale(g_rx.norm())
}

/// One standard circular complex Gaussian sample.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_normal_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    // Column-major fill so that draws match `from_fn` ordering exactly.
    let mut m = CMat::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

/// LoS and scatter weights `(√(K/(K+1)), √(1/(K+1)))`, with `K = ∞` mapped
/// to a pure LoS channel.
pub fn rician_weights(k: f64) -> (f64, f64) {
    if k.is_infinite() {
        (1.0, 0.0)
    } else {
        ((k / (k + 1.0)).sqrt(), (1.0 / (k + 1.0)).sqrt())
    }
}

pub fn sample_channel<R: Rng + ?Sized>(model: &RicianModel, rng: &mut R, draw_id: u64) -> ChannelRealization {
    let (a, b) = rician_weights(model.k_factor);
    let (r, c) = model.los_matrix.shape();
    let scatter = complex_normal_matrix(r, c, rng);
    ChannelRealization {
        h: model.los_matrix.scale(a) + scatter.scale(b),
        draw_id,
    }
}

/// Seeded stream for draw `draw_id`: the same `(seed, draw_id)` pair
/// always yields the same realization.
pub fn sample_channel_seeded(model: &RicianModel, seed: u64, draw_id: u64) -> ChannelRealization {
    let mut rng = crate::rng::stream(seed, draw_id);
    sample_channel(model, &mut rng, draw_id)
}

/// `H + ΔH` with `‖ΔH‖_F ≤ bound`. With `on_boundary` the error lies on the
/// sphere; otherwise it is uniform in the ball.
pub fn perturb_channel<R: Rng + ?Sized>(
    h: &CMat,
    bound: f64,
    on_boundary: bool,
    rng: &mut R,
) -> Result<CMat> {
    if !(bound >= 0.0) {
        return Err(Error::domain("perturbation radius must be nonnegative"));
    }
    if bound == 0.0 {
        return Ok(h.clone());
    }
    let (r, c) = h.shape();
    let dir = complex_normal_matrix(r, c, rng);
    let n = dir.norm();
    let radius = if on_boundary {
        bound
    } else {
        let u: f64 = rng.random();
        bound * u.powf(1.0 / (2 * r * c) as f64)
    };
    Ok(h + dir.scale(radius / n))
}

// ---------------------------------------------------------------------------
// CSV dump

/// Writes `h` with a two-line header `m_sat,m_a,k_factor,seed` followed by
/// one `row,col,re,im` line per entry.
pub fn write_channel_csv<W: Write>(mut out: W, h: &CMat, k_factor: f64, seed: u64) -> Result<()> {
    writeln!(out, "m_sat,m_a,k_factor,seed")?;
    writeln!(out, "{},{},{:e},{}", h.nrows(), h.ncols(), k_factor, seed)?;
    writeln!(out, "row,col,re,im")?;
    for i in 0..h.nrows() {
        for j in 0..h.ncols() {
            let z = h[(i, j)];
            writeln!(out, "{i},{j},{:e},{:e}", z.re, z.im)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDump {
    pub h: CMat,
    pub k_factor: f64,
    pub seed: u64,
}

pub fn read_channel_csv<R: BufRead>(input: R) -> Result<ChannelDump> {
    let bad = |msg: &str| Error::domain(format!("malformed channel dump: {msg}"));
    let mut lines = input.lines();
    let mut next = || -> Result<String> { lines.next().ok_or_else(|| bad("truncated"))?.map_err(Error::from) };
    if next()?.trim() != "m_sat,m_a,k_factor,seed" {
        return Err(bad("header"));
    }
    let meta = next()?;
    let f: Vec<&str> = meta.trim().split(',').collect();
    if f.len() != 4 {
        return Err(bad("metadata line"));
    }
    let rows: usize = f[0].parse().map_err(|_| bad("m_sat"))?;
    let cols: usize = f[1].parse().map_err(|_| bad("m_a"))?;
    let k_factor: f64 = f[2].parse().map_err(|_| bad("k_factor"))?;
    let seed: u64 = f[3].parse().map_err(|_| bad("seed"))?;
    if next()?.trim() != "row,col,re,im" {
        return Err(bad("entry header"));
    }
    let mut h = CMat::zeros(rows, cols);
    for _ in 0..rows * cols {
        let line = next()?;
        let f: Vec<&str> = line.trim().split(',').collect();
        if f.len() != 4 {
            return Err(bad("entry line"));
        }
        let i: usize = f[0].parse().map_err(|_| bad("row"))?;
        let j: usize = f[1].parse().map_err(|_| bad("col"))?;
        if i >= rows || j >= cols {
            return Err(bad("index out of range"));
        }
        let re: f64 = f[2].parse().map_err(|_| bad("re"))?;
        let im: f64 = f[3].parse().map_err(|_| bad("im"))?;
        h[(i, j)] = Complex64::new(re, im);
    }
    Ok(ChannelDump { h, k_factor, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn signature_cases() {
        let a = spatial_signature(5, 0.0, 0.5).unwrap();
        assert!(a.iter().all(|z| (*z - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        let a = spatial_signature(2, 1.0, 0.5).unwrap();
        assert_abs_diff_eq!((a[1] - Complex64::new(-1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert!(spatial_signature(3, 1.1, 0.5).is_err());
    }

    #[test]
    fn steering_lengths_and_boresight() {
        let sat = ArrayConfig::new(4, 4, 0.5).unwrap();
        let es = ArrayConfig::new(8, 8, 0.5).unwrap();
        let g = satellite_steering(&sat, 0.0, 0.0);
        assert_eq!(g.len(), 16);
        assert!(g.iter().all(|z| (*z - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        let d = earth_station_steering(&es, 0.0, 0.7);
        assert_eq!(d.len(), 64);
        assert!(d.iter().all(|z| (*z - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        let d = earth_station_steering(&es, 0.3, 0.7);
        assert!(d.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        assert_abs_diff_eq!(d.norm_squared(), 64.0, epsilon = 1e-9);
    }

    #[test]
    fn kronecker_ordering() {
        let cfg = ArrayConfig::new(3, 2, 0.5).unwrap();
        let (t, p) = (0.4, -0.3);
        let g = satellite_steering(&cfg, t, p);
        let ax = spatial_signature(3, t.sin(), 0.5).unwrap();
        let az = spatial_signature(2, t.cos() * p.sin(), 0.5).unwrap();
        for ix in 0..3 {
            for iz in 0..2 {
                let k = cfg.index(ix, iz);
                assert_eq!(cfg.element(k), (ix, iz));
                assert_abs_diff_eq!((g[k] - ax[ix] * az[iz]).norm(), 0.0, epsilon = 1e-15);
            }
        }
        let d = earth_station_steering(&cfg, t, p);
        let az = spatial_signature(2, t.sin() * p.sin(), 0.5).unwrap();
        assert_abs_diff_eq!((d[cfg.index(2, 1)] - ax[2] * az[1]).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn los_matrix_properties() {
        let g = satellite_steering(&ArrayConfig::new(2, 2, 0.5).unwrap(), 0.2, 0.1);
        let d = earth_station_steering(&ArrayConfig::new(3, 3, 0.5).unwrap(), -0.4, 0.9);
        let h = los_matrix(&g, &d);
        assert_abs_diff_eq!(h.norm_squared(), 36.0, epsilon = 1e-10);
        assert!(h.iter().all(|z| (z.norm() - 1.0).abs() < 1e-10));
        let sv = h.clone().singular_values();
        assert!(sv[1] < 1e-10 * sv[0]);
        let ones = los_matrix(&CVec::from_element(2, 1.0.into()), &CVec::from_element(3, 1.0.into()));
        assert!(ones.iter().all(|z| *z == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn egc_matched_gain() {
        let g = satellite_steering(&ArrayConfig::new(4, 4, 0.5).unwrap(), 0.0, 0.0);
        let v = los_egc_vector(&g);
        assert!(v.iter().all(|z| (z.re - 0.25).abs() < 1e-15 && z.im == 0.0));
        let es = ArrayConfig::new(8, 8, 0.5).unwrap();
        let d = earth_station_steering(&es, 0.1, 0.2);
        let w = d.unscale(8.0);
        let amp = (v.adjoint() * los_matrix(&g, &d) * w)[(0, 0)].norm();
        assert_abs_diff_eq!(amp, (16.0f64 * 64.0).sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn rician_limits() {
        let los = CMat::from_element(2, 2, Complex64::new(0.6, 0.8));
        let inf = RicianModel {
            k_factor: f64::INFINITY,
            los_matrix: los.clone(),
        };
        assert_eq!(sample_channel_seeded(&inf, 1, 0).h, los);
        let a = sample_channel_seeded(&inf, 5, 3);
        let b = sample_channel_seeded(&inf, 5, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn rician_moments_k7() {
        let g = satellite_steering(&ArrayConfig::new(2, 1, 0.5).unwrap(), 0.3, 0.0);
        let d = earth_station_steering(&ArrayConfig::new(1, 2, 0.5).unwrap(), 0.2, 0.5);
        let model = RicianModel {
            k_factor: 7.0,
            los_matrix: los_matrix(&g, &d),
        };
        let n = 100_000;
        let mut rng = crate::rng::stream(99, 0);
        let mut mean = CMat::zeros(2, 2);
        let mut second = DMatrix::<f64>::zeros(2, 2);
        for i in 0..n {
            let h = sample_channel(&model, &mut rng, i).h;
            mean += &h;
            second += h.map(|z| z.norm_sqr());
        }
        mean.unscale_mut(n as f64);
        second.unscale_mut(n as f64);
        // Per-component standard deviation of the mean is sqrt(1/16 / n).
        let se = (1.0 / 16.0 / n as f64).sqrt();
        let target = model.los_matrix.scale((7.0f64 / 8.0).sqrt());
        for (m, t) in mean.iter().zip(target.iter()) {
            assert!((m.re - t.re).abs() < 3.5 * se && (m.im - t.im).abs() < 3.5 * se);
        }
        for s in second.iter() {
            assert!((s - 1.0).abs() < 0.02);
        }
    }

    #[test]
    fn rician_k0_moments() {
        let model = RicianModel {
            k_factor: 0.0,
            los_matrix: CMat::from_element(1, 1, Complex64::new(1.0, 0.0)),
        };
        let mut rng = crate::rng::stream(3, 0);
        let n = 50_000;
        let (mut m, mut s) = (Complex64::new(0.0, 0.0), 0.0);
        for i in 0..n {
            let z = sample_channel(&model, &mut rng, i).h[(0, 0)];
            m += z;
            s += z.norm_sqr();
        }
        assert!((m / n as f64).norm() < 0.02);
        assert!((s / n as f64 - 1.0).abs() < 0.03);
    }

    #[test]
    fn perturbation_radius() {
        let h = CMat::from_element(3, 4, Complex64::new(1.0, -2.0));
        let mut rng = crate::rng::stream(7, 0);
        assert_eq!(perturb_channel(&h, 0.0, true, &mut rng).unwrap(), h);
        for _ in 0..20 {
            let p = perturb_channel(&h, 0.05, true, &mut rng).unwrap();
            assert_abs_diff_eq!((p - &h).norm(), 0.05, epsilon = 1e-10);
            let q = perturb_channel(&h, 0.05, false, &mut rng).unwrap();
            assert!((q - &h).norm() <= 0.05 + 1e-12);
        }
        assert!(perturb_channel(&h, -1.0, true, &mut rng).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let model = RicianModel {
            k_factor: 7.0,
            los_matrix: CMat::from_element(4, 3, Complex64::new(0.0, 1.0)),
        };
        let h = sample_channel_seeded(&model, 11, 0).h;
        let mut buf = Vec::new();
        write_channel_csv(&mut buf, &h, 7.0, 11).unwrap();
        let back = read_channel_csv(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back.h, h);
        assert_eq!(back.seed, 11);
        assert_eq!(back.k_factor, 7.0);
        assert!(read_channel_csv(std::io::Cursor::new(b"nope\n".to_vec())).is_err());
    }

    proptest! {
        #[test]
        fn signature_norm(n in 1usize..20, x in -1.0..1.0f64, s in 0.1..2.0f64) {
            let a = spatial_signature(n, x, s).unwrap();
            prop_assert!((a.norm_squared() - n as f64).abs() < 1e-9);
        }

        #[test]
        fn egc_unit_norm(t in -1.5..1.5f64, p in -3.0..3.0f64) {
            let g = satellite_steering(&ArrayConfig::new(3, 4, 0.5).unwrap(), t, p);
            prop_assert!((los_egc_vector(&g).norm() - 1.0).abs() < 1e-12);
        }
    }
}
