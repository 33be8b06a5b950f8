//! Detection and reliability analysis under log-uniform noise uncertainty.
//!
//! A warden compares its average received power `T = S + σ²` with a
//! threshold `τ`. Here `σ²` is log-uniform on `[σ̄²/ρ, ρσ̄²]` and `S` is the
//! signal power, approximated as Gamma (the Nakagami power law) with shape
//! `m = (κ+1)²/(2κ+1)` and mean `ω`. The detection error probability is
//! `ξ(τ) = P_F(τ) + P_M(τ)`.
//!
//! Besides the exact `ξ` (one quadrature), this module provides the
//! closed-form lower bound on `P_M`, the threshold minimising the bounded
//! DEP, the resulting DEP floor, and the two constants that turn the
//! covertness and outage requirements into linear power constraints.

mod gamma;
pub mod quadrature;

pub use gamma::{gamma_p, gamma_q, ln_gamma, lower_gamma, upper_gamma};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{CMat, CVec};
use crate::error::{Error, Result};
use crate::linkbudget::LinkBudget;

const QUAD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseUncertainty {
    /// Nominal noise power `σ̄²` in watts.
    pub nominal_power: f64,
    pub rho: f64,
}

impl NoiseUncertainty {
    pub fn new(nominal_power: f64, rho: f64) -> Result<Self> {
        if !(nominal_power > 0.0) || !nominal_power.is_finite() {
            return Err(Error::domain("nominal noise power must be positive"));
        }
        if !(rho > 1.0) || !rho.is_finite() {
            return Err(Error::domain(format!("noise uncertainty rho = {rho} must exceed 1")));
        }
        Ok(Self { nominal_power, rho })
    }

    pub fn lb(&self) -> f64 {
        self.nominal_power / self.rho
    }

    pub fn ub(&self) -> f64 {
        self.nominal_power * self.rho
    }

    /// `2 ln ρ`, the width of the support in log space.
    pub fn log_width(&self) -> f64 {
        2.0 * self.rho.ln()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < self.lb() || x > self.ub() {
            0.0
        } else {
            1.0 / (self.log_width() * x)
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.lb() {
            0.0
        } else if x >= self.ub() {
            1.0
        } else {
            (x / self.lb()).ln() / self.log_width()
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.nominal_power * self.rho.powf(2.0 * u - 1.0)
    }
}

/// Gamma-approximated statistics of the signal power at one warden.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WardenSignalStats {
    pub kappa: f64,
    /// Mean received signal power, watts.
    pub omega: f64,
    pub m_shape: f64,
}

impl WardenSignalStats {
    pub fn new(kappa: f64, omega: f64) -> Result<Self> {
        if !(kappa >= 0.0) || !(omega >= 0.0) || !kappa.is_finite() || !omega.is_finite() {
            return Err(Error::domain(format!(
                "warden statistics need finite kappa >= 0 and omega >= 0, got {kappa}, {omega}"
            )));
        }
        Ok(Self {
            kappa,
            omega,
            m_shape: nakagami_shape(kappa),
        })
    }
}

pub fn nakagami_shape(kappa: f64) -> f64 {
    (kappa + 1.0).powi(2) / (2.0 * kappa + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovertSpec {
    pub epsilon_w: f64,
    pub epsilon_b: f64,
}

impl CovertSpec {
    pub fn new(epsilon_w: f64, epsilon_b: f64) -> Result<Self> {
        for (n, e) in [("epsilon_w", epsilon_w), ("epsilon_b", epsilon_b)] {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::domain(format!("{n} = {e} outside (0, 1)")));
            }
        }
        Ok(Self {
            epsilon_w,
            epsilon_b,
        })
    }
}

/// `|v† H w|²`.
pub fn effective_gain(h: &CMat, combiner: &CVec, w: &CVec) -> f64 {
    let z: Complex64 = combiner.dotc(&(h * w));
    z.norm_sqr()
}

pub fn false_alarm(noise: &NoiseUncertainty, tau: f64) -> f64 {
    1.0 - noise.cdf(tau)
}

/// Warden statistics for beamformer `w` (unit norm) and power `p_a`, with
/// `κ = K|v†H̄w|²` and `ω = F·G_tx·G_rx·P(1+κ)/(1+K)`.
pub fn warden_stats(
    link: &LinkBudget,
    los: &CMat,
    combiner: &CVec,
    w: &CVec,
    p_a: f64,
    k_factor: f64,
) -> Result<WardenSignalStats> {
    let kappa = k_factor * effective_gain(los, combiner, w);
    WardenSignalStats::new(kappa, warden_mean_power(link, p_a, kappa, k_factor))
}

pub fn warden_mean_power(link: &LinkBudget, p_a: f64, kappa: f64, k_factor: f64) -> f64 {
    link.power_gain() * p_a * (1.0 + kappa) / (1.0 + k_factor)
}

/// `P_M(τ) = P(S + σ² ≤ τ)`, by quadrature over the noise power in log
/// coordinates `σ² = lb·e^u`.
pub fn missed_detection(stats: &WardenSignalStats, noise: &NoiseUncertainty, tau: f64) -> Result<f64> {
    let lb = noise.lb();
    if tau <= lb {
        return Ok(0.0);
    }
    let width = noise.log_width();
    let u_max = width.min((tau / lb).ln());
    if stats.omega == 0.0 {
        return Ok((u_max / width).min(1.0));
    }
    let m = stats.m_shape;
    let scale = m / stats.omega;
    let integrand = |u: f64| {
        let s = tau - lb * u.exp();
        if s <= 0.0 {
            0.0
        } else {
            gamma_p(m, scale * s).unwrap_or(f64::NAN)
        }
    };
    let r = quadrature::integrate(integrand, 0.0, u_max, QUAD_TOL * width).map_err(|e| match e {
        Error::Numeric { detail, .. } => Error::numeric(
            "missed-detection quadrature",
            format!("{detail} (m = {m}, omega = {}, tau = {tau})", stats.omega),
        ),
        other => other,
    })?;
    if r.value.is_nan() {
        return Err(Error::numeric("missed-detection quadrature", "integrand evaluation failed"));
    }
    Ok((r.value / width).clamp(0.0, 1.0))
}

/// Exact detection error probability `P_F + P_M` (not clamped).
pub fn dep(stats: &WardenSignalStats, noise: &NoiseUncertainty, tau: f64) -> Result<f64> {
    Ok(false_alarm(noise, tau) + missed_detection(stats, noise, tau)?)
}

/// `c(τ) = min(1, ln(τ/lb) / (2 ln ρ))` for `τ > lb`.
fn log_fraction(noise: &NoiseUncertainty, tau: f64) -> f64 {
    ((tau / noise.lb()).ln() / noise.log_width()).min(1.0)
}

/// `(m/μ)·P(m+1, μ)`, continuous at `μ = 0`.
fn scaled_next_p(m: f64, mu: f64) -> Result<f64> {
    if mu == 0.0 {
        return Ok(0.0);
    }
    if mu.is_infinite() {
        return Ok(0.0);
    }
    Ok(m / mu * gamma_p(m + 1.0, mu)?)
}

fn mu_of(stats: &WardenSignalStats, noise: &NoiseUncertainty, tau: f64) -> f64 {
    if stats.omega == 0.0 {
        f64::INFINITY
    } else {
        stats.m_shape * (tau - noise.lb()) / stats.omega
    }
}

/// Closed-form lower bound on `P_M(τ)`:
/// `c(τ)·[P(m, μ) − (m/μ)·P(m+1, μ)]` with `μ = m(τ − lb)/ω`.
pub fn dep_lb_cdf(stats: &WardenSignalStats, noise: &NoiseUncertainty, tau: f64) -> Result<f64> {
    if tau <= noise.lb() {
        return Ok(0.0);
    }
    let m = stats.m_shape;
    let mu = mu_of(stats, noise, tau);
    let p = if mu.is_infinite() { 1.0 } else { gamma_p(m, mu)? };
    let g = (p - scaled_next_p(m, mu)?).max(0.0);
    Ok(log_fraction(noise, tau) * g)
}

/// Lower bound on the DEP, `ξ̌(τ) = P_F(τ) + F̌(τ)`.
pub fn dep_lb(stats: &WardenSignalStats, noise: &NoiseUncertainty, tau: f64) -> Result<f64> {
    Ok(false_alarm(noise, tau) + dep_lb_cdf(stats, noise, tau)?)
}

/// `ν(r) = (1+r)ln(1+r)/r − 1` for `r = (τ − lb)/lb`.
fn nu_of_offset(r: f64) -> f64 {
    if r < 1e-4 {
        r * (0.5 - r * (1.0 / 6.0 - r / 12.0))
    } else {
        (1.0 + r) * r.ln_1p() / r - 1.0
    }
}

/// The stationarity condition of `ξ̌` written as
/// `μ·Q(m, μ) − m·ν·P(m+1, μ)`, together with the sum of magnitudes of
/// its two terms (for relative residuals). Evaluated at offset `x = τ − lb`.
fn stationarity(m: f64, omega: f64, lb: f64, x: f64) -> Result<(f64, f64)> {
    let mu = m * x / omega;
    let a = mu * gamma_q(m, mu)?;
    let b = m * nu_of_offset(x / lb) * gamma_p(m + 1.0, mu)?;
    Ok((a - b, a.abs() + b.abs()))
}

/// Relative residual of the stationarity condition at `tau`.
pub fn threshold_residual(stats: &WardenSignalStats, noise: &NoiseUncertainty, tau: f64) -> Result<f64> {
    let (f, s) = stationarity(stats.m_shape, stats.omega, noise.lb(), tau - noise.lb())?;
    Ok(if s == 0.0 { 0.0 } else { f.abs() / s })
}

/// Unconstrained stationary point `τ'` of `ξ̌` (may exceed `ub`).
pub fn stationary_threshold(stats: &WardenSignalStats, noise: &NoiseUncertainty) -> Result<f64> {
    let lb = noise.lb();
    if stats.omega == 0.0 {
        return Ok(f64::INFINITY);
    }
    let (m, omega) = (stats.m_shape, stats.omega);
    let f = |x: f64| stationarity(m, omega, lb, x).map(|v| v.0);
    let mut lo = lb * 1e-9;
    if f(lo)? <= 0.0 {
        return Err(Error::numeric(
            "optimal threshold",
            format!("no sign change at the lower bracket (m = {m}, omega = {omega}, lb = {lb})"),
        ));
    }
    let mut hi = 2.0 * lo;
    let mut expansions = 0;
    while f(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 2000 || !hi.is_finite() {
            return Err(Error::numeric(
                "optimal threshold",
                format!("bracket expansion exhausted (m = {m}, omega = {omega}, lb = {lb})"),
            ));
        }
    }
    // Bisection down to adjacent floating-point values.
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Pick whichever end has the smaller residual.
    let (flo, fhi) = (f(lo)?.abs(), f(hi)?.abs());
    Ok(lb + if flo <= fhi { lo } else { hi })
}

/// Threshold minimising `ξ̌`, `τ* = min(τ', ub)`.
pub fn optimal_threshold(stats: &WardenSignalStats, noise: &NoiseUncertainty) -> Result<f64> {
    Ok(stationary_threshold(stats, noise)?.min(noise.ub()))
}

/// Minimum of `ξ̌`: `1 − c(τ*)·[Q(m, μ*) + (m/μ*)·P(m+1, μ*)]`.
pub fn min_dep_lb(stats: &WardenSignalStats, noise: &NoiseUncertainty) -> Result<f64> {
    if stats.omega == 0.0 {
        return Ok(1.0);
    }
    let tau = optimal_threshold(stats, noise)?;
    let m = stats.m_shape;
    let mu = mu_of(stats, noise, tau);
    let h = gamma_q(m, mu)? + scaled_next_p(m, mu)?;
    Ok(1.0 - log_fraction(noise, tau) * h)
}

/// `1 − ω / (2 ln ρ · lb)`, a strict lower bound on [`min_dep_lb`].
pub fn dep_floor(stats: &WardenSignalStats, noise: &NoiseUncertainty) -> f64 {
    1.0 - stats.omega / (noise.log_width() * noise.lb())
}

/// `η_w = 2ε_w ln ρ (1+K) lb / (F·G_rx)`, so that the covertness floor holds
/// iff `P·G_tx·(1 + K|v†H̄w|²) ≤ η_w`.
pub fn eta_w(link_w: &LinkBudget, noise_w: &NoiseUncertainty, spec: &CovertSpec, k_factor: f64) -> f64 {
    spec.epsilon_w * noise_w.log_width() * (1.0 + k_factor) * noise_w.lb() / (link_w.f_path * link_w.g_rx)
}

/// Largest power meeting one warden's covertness floor.
pub fn covert_power_cap(
    link_w: &LinkBudget,
    noise_w: &NoiseUncertainty,
    spec: &CovertSpec,
    k_factor: f64,
    los_gain: f64,
) -> f64 {
    eta_w(link_w, noise_w, spec, k_factor) / (link_w.g_tx * (1.0 + k_factor * los_gain))
}

/// `η_b = ρ^{2ε_b − 1}·F·G_tx·G_rx / σ̄²`.
pub fn eta_b(link_b: &LinkBudget, noise_b: &NoiseUncertainty, spec: &CovertSpec) -> f64 {
    noise_b.rho.powf(2.0 * spec.epsilon_b - 1.0) * link_b.power_gain() / noise_b.nominal_power
}

/// Transmission outage probability for rate `rate` and received signal
/// power `s_b`.
pub fn top(rate: f64, s_b: f64, noise_b: &NoiseUncertainty) -> f64 {
    if rate <= 0.0 {
        return 0.0;
    }
    if s_b <= 0.0 {
        return 1.0;
    }
    let r = rate.exp2() - 1.0;
    let threshold = s_b / r;
    if noise_b.ub() <= threshold {
        return 0.0;
    }
    ((noise_b.ub().ln() + r.ln() - s_b.ln()) / noise_b.log_width()).clamp(0.0, 1.0)
}

/// Largest rate whose outage probability equals `ε_b`:
/// `log2(1 + P·η_b·|v†Hw|²)`.
pub fn max_rate(
    p_a: f64,
    link_b: &LinkBudget,
    h_ab: &CMat,
    w: &CVec,
    combiner: &CVec,
    spec: &CovertSpec,
    noise_b: &NoiseUncertainty,
) -> f64 {
    rate_from_gain(p_a * effective_gain(h_ab, combiner, w), eta_b(link_b, noise_b, spec))
}

pub fn rate_from_gain(powered_gain: f64, eta_b: f64) -> f64 {
    (powered_gain * eta_b).ln_1p() / std::f64::consts::LN_2
}

/// Received signal power at Bob, `P·F·G·G·|v†Hw|²`.
pub fn bob_signal_power(p_a: f64, link_b: &LinkBudget, h_ab: &CMat, w: &CVec, combiner: &CVec) -> f64 {
    p_a * link_b.power_gain() * effective_gain(h_ab, combiner, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use approx::assert_relative_eq;
    use rand_distr::{Distribution, Gamma};

    fn noise(rho: f64) -> NoiseUncertainty {
        NoiseUncertainty::new(1e-12, rho).unwrap()
    }

    fn stats(kappa: f64, omega_over_sigma: f64) -> WardenSignalStats {
        WardenSignalStats::new(kappa, omega_over_sigma * 1e-12).unwrap()
    }

    #[test]
    fn noise_distribution() {
        let n = noise(1.5);
        let r = quadrature::integrate(|x| n.pdf(x), n.lb(), n.ub(), 1e-20).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
        assert!(NoiseUncertainty::new(1e-12, 1.0).is_err());
        let mut g = rng::stream(1, 0);
        for _ in 0..1000 {
            let s = n.sample(&mut g);
            assert!(s >= n.lb() && s <= n.ub());
        }
    }

    #[test]
    fn false_alarm_branches() {
        let n = noise(1.5);
        assert_eq!(false_alarm(&n, 0.5 * n.lb()), 1.0);
        assert_relative_eq!(false_alarm(&n, 1e-12), 0.5, epsilon = 1e-14);
        assert_eq!(false_alarm(&n, 2.0 * n.ub()), 0.0);
    }

    #[test]
    fn nakagami_shape_limits() {
        let s = WardenSignalStats::new(0.0, 1.0).unwrap();
        assert_eq!(s.m_shape, 1.0);
        assert!(nakagami_shape(1e8) > 1e7);
        assert!(WardenSignalStats::new(-1.0, 1.0).is_err());
    }

    #[test]
    fn missed_detection_limits() {
        let n = noise(1.5);
        let s = stats(3.0, 0.7);
        assert_eq!(missed_detection(&s, &n, 0.9 * n.lb()).unwrap(), 0.0);
        let far = missed_detection(&s, &n, 1e3 * n.ub()).unwrap();
        assert!((far - 1.0).abs() < 1e-8);
        let d = dep(&s, &n, 0.5 * n.lb()).unwrap();
        assert_eq!(d, 1.0);
        assert!((dep(&s, &n, 1e3 * n.ub()).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn missed_detection_matches_sampling() {
        let n = noise(1.5);
        let s = stats(2.0, 1.3);
        let tau = 1.1 * n.ub();
        let gamma = Gamma::new(s.m_shape, s.omega / s.m_shape).unwrap();
        let mut g = rng::stream(42, 0);
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|_| gamma.sample(&mut g) + n.sample(&mut g) <= tau)
            .count();
        let p = hits as f64 / trials as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        let a = missed_detection(&s, &n, tau).unwrap();
        assert!((a - p).abs() <= 3.0 * se, "analytic {a}, sampled {p} ± {se}");
    }

    #[test]
    fn zero_signal_missed_detection_is_noise_cdf() {
        let n = noise(1.3);
        let s = WardenSignalStats::new(0.0, 0.0).unwrap();
        for t in [0.9, 1.0, 1.2] {
            let tau = t * 1e-12;
            assert_relative_eq!(missed_detection(&s, &n, tau).unwrap(), n.cdf(tau), epsilon = 1e-15);
            assert_relative_eq!(dep(&s, &n, tau).unwrap(), 1.0, epsilon = 1e-15);
        }
        assert_eq!(min_dep_lb(&s, &n).unwrap(), 1.0);
    }

    #[test]
    fn lower_bound_below_exact_cdf() {
        for &(rho, kappa, om) in &[(1.5, 0.0, 0.5), (1.2, 7.0, 2.0), (2.0, 100.0, 0.01), (1.05, 1.0, 10.0)] {
            let n = noise(rho);
            let s = stats(kappa, om);
            for k in 0..100 {
                let tau = n.lb() * (1.0 + 20.0 * k as f64 / 99.0) + 1e-3 * n.lb();
                let lbv = dep_lb_cdf(&s, &n, tau).unwrap();
                let ex = missed_detection(&s, &n, tau).unwrap();
                assert!(lbv <= ex + 1e-7, "rho {rho} kappa {kappa}: {lbv} > {ex} at {tau}");
            }
            assert!(dep_lb_cdf(&s, &n, n.lb() * (1.0 + 1e-12)).unwrap() < 1e-9);
        }
    }

    #[test]
    fn bound_gap_shrinks_with_rho() {
        let s = stats(2.0, 0.4);
        let mut prev = f64::INFINITY;
        for rho in [1.8, 1.5, 1.3, 1.1, 1.02] {
            let n = noise(rho);
            let gap = (0..100)
                .map(|k| {
                    let tau = n.lb() + (n.ub() - n.lb()) * (k as f64 + 0.5) / 100.0;
                    missed_detection(&s, &n, tau).unwrap() - dep_lb_cdf(&s, &n, tau).unwrap()
                })
                .fold(0.0, f64::max);
            assert!(gap <= prev + 1e-9, "gap {gap} at rho {rho} exceeds {prev}");
            prev = gap;
        }
    }

    #[test]
    fn optimal_threshold_on_grid() {
        for &(rho, kappa, om) in &[(1.5, 7.0, 0.5), (1.2, 0.0, 0.05), (2.0, 40.0, 3.0), (1.5, 0.5, 20.0)] {
            let n = noise(rho);
            let s = stats(kappa, om);
            let t = optimal_threshold(&s, &n).unwrap();
            assert!(t >= n.lb() && t <= n.ub());
            let best = dep_lb(&s, &n, t).unwrap();
            for k in 0..1000 {
                let tau = n.lb() + (10.0 * n.ub() - n.lb()) * k as f64 / 999.0;
                assert!(best <= dep_lb(&s, &n, tau).unwrap() + 1e-9);
            }
            let tp = stationary_threshold(&s, &n).unwrap();
            assert!(threshold_residual(&s, &n, tp).unwrap() <= 1e-10);
            assert_relative_eq!(min_dep_lb(&s, &n).unwrap(), best, epsilon = 1e-12);
        }
    }

    #[test]
    fn rayleigh_threshold_scalar_equation() {
        // m = 1: μe^{−μ} = (1 − e^{−μ}(1+μ))·ν.
        let n = noise(1.5);
        let s = stats(0.0, 0.3);
        let tp = stationary_threshold(&s, &n).unwrap();
        let mu = (tp - n.lb()) / s.omega;
        let nu = nu_of_offset((tp - n.lb()) / n.lb());
        let lhs = mu * (-mu).exp();
        let rhs = (1.0 - (-mu).exp() * (1.0 + mu)) * nu;
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs());
    }

    #[test]
    fn floor_relations() {
        let n = noise(1.5);
        let eps = 0.01;
        let om = 2.0 * eps * 1.5f64.ln() * n.lb();
        let s = WardenSignalStats::new(5.0, om).unwrap();
        assert_relative_eq!(dep_floor(&s, &n), 1.0 - eps, epsilon = 1e-15);
        assert_eq!(dep_floor(&WardenSignalStats::new(5.0, 0.0).unwrap(), &n), 1.0);
        for &(k, o) in &[(0.0, 0.1), (5.0, 0.5), (50.0, 2.0), (1.0, 1e-3)] {
            let s = stats(k, o);
            let v = min_dep_lb(&s, &n).unwrap();
            assert!(dep_floor(&s, &n) < v);
            let t = optimal_threshold(&s, &n).unwrap();
            assert!(v <= dep(&s, &n, t).unwrap() + 1e-7);
        }
        assert!(min_dep_lb(&stats(1.0, 1e-9), &n).unwrap() > 1.0 - 1e-6);
    }

    fn budget() -> LinkBudget {
        LinkBudget {
            f_path: 1.3e-21,
            g_tx: 200.0,
            g_rx: 1584.9,
            distance: 3.6e7,
        }
    }

    #[test]
    fn covert_cap_inverts_floor() {
        let n = noise(1.5);
        let spec = CovertSpec::new(0.01, 0.01).unwrap();
        let link = budget();
        let k = 7.0;
        let gain = 3.7;
        let p = covert_power_cap(&link, &n, &spec, k, gain);
        let kappa = k * gain;
        let s = WardenSignalStats::new(kappa, warden_mean_power(&link, p, kappa, k)).unwrap();
        assert!((dep_floor(&s, &n) - 0.99).abs() < 1e-9);
        assert_relative_eq!(
            covert_power_cap(&link, &n, &spec, k, 0.0),
            eta_w(&link, &n, &spec, k) / link.g_tx,
            max_relative = 1e-15
        );
        let spec2 = CovertSpec::new(0.02, 0.01).unwrap();
        assert_relative_eq!(eta_w(&link, &n, &spec2, k), 2.0 * eta_w(&link, &n, &spec, k), max_relative = 1e-14);
    }

    #[test]
    fn outage_branches() {
        let n = noise(1.5);
        assert_eq!(top(0.0, 1e-12, &n), 0.0);
        assert_eq!(top(1.0, 10.0 * n.ub(), &n), 0.0);
        // 2^R − 1 = s_b / σ̄² puts the threshold at the nominal power.
        let s_b = 3e-12;
        let r = (1.0 + s_b / 1e-12f64).log2();
        assert_relative_eq!(top(r, s_b, &n), 0.5, epsilon = 1e-12);
        assert_eq!(top(60.0, s_b, &n), 1.0);
        let mut prev = 0.0;
        for k in 0..100 {
            let v = top(k as f64 * 0.05, s_b, &n);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn max_rate_inverts_outage() {
        let n = noise(1.5);
        let spec = CovertSpec::new(0.01, 0.01).unwrap();
        let link = budget();
        let h = CMat::from_fn(2, 3, |i, j| Complex64::new(i as f64 + 0.5, j as f64 - 1.0));
        let v = CVec::from_element(2, Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
        let w = CVec::from_element(3, Complex64::new(1.0 / 3f64.sqrt(), 0.0));
        for p in [1e-3, 1.0, 100.0] {
            let r = max_rate(p, &link, &h, &w, &v, &spec, &n);
            let s_b = bob_signal_power(p, &link, &h, &w, &v);
            assert!((top(r, s_b, &n) - 0.01).abs() < 1e-9);
        }
        let w0 = CVec::zeros(3);
        assert_eq!(max_rate(1.0, &link, &h, &w0, &v, &spec, &n), 0.0);
        let half = CovertSpec::new(0.5, 0.5).unwrap();
        assert_relative_eq!(eta_b(&link, &n, &half), link.power_gain() / 1e-12, max_relative = 1e-14);
    }
}
