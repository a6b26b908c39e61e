//! Sampled Fourier pairs `(g, g^)` certifying translation-form kernels.
//!
//! A kernel `phi(lambda, mu) = g(ln(lambda/mu))` on positive spectra is a
//! superposition of rank-one multipliers `lambda^{is} mu^{-is}` with weight
//! `g^(s)/sqrt(2 pi)`, so `(1/sqrt(2 pi)) ||g^||_1` bounds its Schur multiplier
//! norm. Transforms use the symmetric convention
//! `g^(s) = (1/sqrt(2 pi)) int g(t) e^{-ist} dt`.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Relative tail budget accepted outside the quadrature window.
pub const TAIL_LIMIT: f64 = 1e-6;

/// Smooth step `e^{-1/x}` for `x > 0`.
fn sigma(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// `C^infinity` cutoff: 1 on `[-1, 1]`, 0 outside `[-2, 2]`.
pub fn chi0(t: f64) -> f64 {
    let a = sigma(2.0 - t.abs());
    let b = sigma(t.abs() - 1.0);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

pub fn chi1(t: f64) -> f64 {
    1.0 - chi0(t)
}

/// The functions `g` whose transforms certify the kernel bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GFamily {
    /// `1/(e^{t/2} + e^{-t/2})`.
    SechHalf,
    /// `1/(e^{theta t} + e^{(theta-1) t})`.
    ThetaExp { theta: f64 },
    /// `chi0(t) (1 - e^{(1-r)t})/(1 - e^t)`.
    WeakLpChi0 { r: f64 },
    /// `chi1(t)/(e^{t/2} - e^{-t/2})`.
    WeakLpChi1,
}

impl fmt::Display for GFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SechHalf => write!(f, "sech_half"),
            Self::ThetaExp { theta } => write!(f, "theta_exp({theta})"),
            Self::WeakLpChi0 { r } => write!(f, "weak_chi0({r})"),
            Self::WeakLpChi1 => write!(f, "weak_chi1"),
        }
    }
}

impl GFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::ThetaExp { theta } if !(theta > 0.0 && theta < 1.0) => Err(
                Error::InvalidParameter(format!("theta = {theta} outside (0, 1)")),
            ),
            Self::WeakLpChi0 { r } if !(r > 1.0 && r.is_finite()) => {
                Err(Error::InvalidParameter(format!("r = {r} must exceed 1")))
            }
            _ => Ok(()),
        }
    }

    pub fn g(&self, t: f64) -> f64 {
        match *self {
            Self::SechHalf => 0.5 / (0.5 * t).cosh(),
            Self::ThetaExp { theta } => {
                // e^{(1-theta)t}/(1+e^t), arranged to avoid overflow.
                if t > 0.0 {
                    (-theta * t).exp() / (1.0 + (-t).exp())
                } else {
                    ((1.0 - theta) * t).exp() / (1.0 + t.exp())
                }
            }
            Self::WeakLpChi0 { r } => {
                let c = chi0(t);
                if c == 0.0 {
                    0.0
                } else if t.abs() < 1e-8 {
                    c * (1.0 - r) * (1.0 + 0.5 * (1.0 - r) * t - 0.5 * t)
                } else {
                    c * ((1.0 - r) * t).exp_m1() / t.exp_m1()
                }
            }
            Self::WeakLpChi1 => {
                if t.abs() <= 1.0 {
                    0.0
                } else {
                    chi1(t) / (2.0 * (0.5 * t).sinh())
                }
            }
        }
    }

    /// Five-point stencil derivative, step `1e-3`.
    pub fn g_prime(&self, t: f64) -> f64 {
        let h = 1e-3;
        (self.g(t - 2.0 * h) - 8.0 * self.g(t - h) + 8.0 * self.g(t + h) - self.g(t + 2.0 * h))
            / (12.0 * h)
    }

    /// Exponential decay rates `(left, right)` of `|g|`; infinite for compact support.
    fn decay_rates(&self) -> (f64, f64) {
        match *self {
            Self::SechHalf | Self::WeakLpChi1 => (0.5, 0.5),
            Self::ThetaExp { theta } => (1.0 - theta, theta),
            Self::WeakLpChi0 { .. } => (f64::INFINITY, f64::INFINITY),
        }
    }

    /// Closed-form transform where one is known.
    pub fn ghat_exact(&self, s: f64) -> Option<Complex64> {
        let theta = match *self {
            Self::SechHalf => 0.5,
            Self::ThetaExp { theta } => theta,
            _ => return None,
        };
        // int e^{(1-theta)t - ist}/(1+e^t) dt = pi / sin(pi (theta + is)).
        let z = Complex64::new(PI * theta, PI * s);
        Some(Complex64::new(PI * INV_SQRT_2PI, 0.0) / z.sin())
    }

    /// Quadrature window adapted to the decay of `g` and `g^`.
    pub fn adapted_grid(&self) -> GridConfig {
        match *self {
            Self::ThetaExp { theta } if theta.min(1.0 - theta) < 0.25 => {
                let rate = theta.min(1.0 - theta);
                // |g| <= e^{-rate |t|} beyond the peak; want tail/rate < 1e-9.
                let l = ((1e9_f64 / rate).ln() / rate).ceil().max(60.0);
                let ds = (rate / 4.0).min(0.01);
                GridConfig {
                    half_width: l,
                    step: 0.05,
                    freq_half_width: 15.0,
                    freq_step: ds,
                }
            }
            // The cutoff only makes g^ decay like exp(-c sqrt|s|), so the s window is wider.
            Self::WeakLpChi0 { .. } => GridConfig {
                half_width: 3.0,
                step: 0.01,
                freq_half_width: 200.0,
                freq_step: 0.02,
            },
            Self::WeakLpChi1 => GridConfig {
                freq_half_width: 200.0,
                freq_step: 0.02,
                ..GridConfig::default()
            },
            _ => GridConfig::default(),
        }
    }
}

/// Uniform trapezoid grids in `t` and `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    /// `t` in `[-L, L]`.
    pub half_width: f64,
    /// `t` step `h`.
    pub step: f64,
    /// `s` in `[-S, S]`.
    pub freq_half_width: f64,
    pub freq_step: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            half_width: 60.0,
            step: 0.01,
            freq_half_width: 40.0,
            freq_step: 0.01,
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x > 0.0 && x.is_finite();
        if ok(self.half_width) && ok(self.step) && ok(self.freq_half_width) && ok(self.freq_step) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "bad quadrature grid {self:?}"
            )))
        }
    }

    fn t_points(&self) -> usize {
        (self.half_width / self.step).round() as usize
    }

    fn s_points(&self) -> usize {
        (self.freq_half_width / self.freq_step).round() as usize
    }
}

/// A sampled pair `(g, g^)` with the three norms entering the kernel bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierProfile {
    pub family: GFamily,
    pub grid: GridConfig,
    pub s: Vec<f64>,
    pub ghat: Vec<Complex64>,
    pub l2_g: f64,
    pub l2_gprime: f64,
    pub l1_ghat: f64,
    /// `sqrt(2) (||g||_2 + ||g'||_2)`.
    pub sobolev_bound: f64,
    /// Estimated `int |g|` outside `[-L, L]`, relative to the total.
    pub t_tail: f64,
    /// Estimated `int |g^|` outside `[-S, S]`, relative to the total.
    pub s_tail: f64,
    pub method: String,
}

impl FourierProfile {
    /// `(1/sqrt(2 pi)) ||g^||_1`: the multiplier-norm bound of the kernel.
    pub fn multiplier_bound(&self) -> f64 {
        INV_SQRT_2PI * self.l1_ghat
    }

    /// CSV with header `s,ghat_re,ghat_im`, one row per frequency sample.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "s,ghat_re,ghat_im")?;
        for (s, z) in self.s.iter().zip(&self.ghat) {
            writeln!(w, "{s:.6},{:.12e},{:.12e}", z.re, z.im)?;
        }
        Ok(())
    }

    /// `(1/sqrt(2 pi)) int g^(s) e^{isx} ds` over `|s| <= cutoff`.
    pub fn partial_inverse(&self, x: f64, cutoff: f64) -> Complex64 {
        let ds = self.grid.freq_step;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, (&s, &z)) in self.s.iter().zip(&self.ghat).enumerate() {
            if s.abs() > cutoff + 1e-12 {
                continue;
            }
            let edge = k == 0 || k + 1 == self.s.len() || (s.abs() - cutoff).abs() < 0.5 * ds;
            let w = if edge { 0.5 } else { 1.0 };
            acc += z * Complex64::from_polar(w, s * x);
        }
        acc * ds * INV_SQRT_2PI
    }
}

/// Computes `g^` on `[-S, S]` by the trapezoid rule on `[-L, L]`.
pub fn fourier_profile(family: GFamily, grid: GridConfig) -> Result<FourierProfile> {
    family.validate()?;
    grid.validate()?;
    let nt = grid.t_points();
    let h = grid.step;
    let l = nt as f64 * h;
    let ts: Vec<f64> = (0..=2 * nt).map(|k| -l + k as f64 * h).collect();
    let gs: Vec<f64> = ts.iter().map(|&t| family.g(t)).collect();
    let gps: Vec<f64> = ts.iter().map(|&t| family.g_prime(t)).collect();
    let trap = |v: &[f64]| -> f64 {
        let inner: f64 = v.iter().sum();
        h * (inner - 0.5 * (v[0] + v[v.len() - 1]))
    };

    let abs_g: Vec<f64> = gs.iter().map(|x| x.abs()).collect();
    let l1_g = trap(&abs_g);
    let (left_rate, right_rate) = family.decay_rates();
    let t_tail_abs = abs_g[0] / left_rate + abs_g[abs_g.len() - 1] / right_rate;
    let t_tail = if l1_g > 0.0 { t_tail_abs / l1_g } else { 0.0 };
    if t_tail > TAIL_LIMIT {
        return Err(Error::TailMassTooLarge {
            tail: t_tail,
            limit: TAIL_LIMIT,
        });
    }

    let l2_g = trap(&gs.iter().map(|x| x * x).collect::<Vec<_>>()).sqrt();
    let l2_gprime = trap(&gps.iter().map(|x| x * x).collect::<Vec<_>>()).sqrt();

    // g is real, so g^(-s) = conj g^(s); compute s >= 0 only.
    let ns = grid.s_points();
    let ds = grid.freq_step;
    let half: Vec<Complex64> = (0..=ns)
        .map(|k| transform_at(&gs, ts[0], h, k as f64 * ds))
        .collect();
    let mut s = Vec::with_capacity(2 * ns + 1);
    let mut ghat = Vec::with_capacity(2 * ns + 1);
    for k in (1..=ns).rev() {
        s.push(-(k as f64) * ds);
        ghat.push(half[k].conj());
    }
    for (k, z) in half.iter().enumerate() {
        s.push(k as f64 * ds);
        ghat.push(*z);
    }
    let abs_hat: Vec<f64> = ghat.iter().map(|z| z.norm()).collect();
    let inner: f64 = abs_hat.iter().sum();
    let l1_ghat = ds * (inner - 0.5 * (abs_hat[0] + abs_hat[abs_hat.len() - 1]));
    let s_tail =
        spectral_tail(&half.iter().map(|z| z.norm()).collect::<Vec<_>>(), ds) * 2.0 / l1_ghat;
    if !(s_tail <= TAIL_LIMIT) {
        return Err(Error::TailMassTooLarge {
            tail: s_tail,
            limit: TAIL_LIMIT,
        });
    }
    log::debug!(
        "profile {family}: |g|_2 = {l2_g:.6}, |g'|_2 = {l2_gprime:.6}, |g^|_1 = {l1_ghat:.6}, tails {t_tail:.1e}/{s_tail:.1e}"
    );
    Ok(FourierProfile {
        family,
        grid,
        s,
        ghat,
        l2_g,
        l2_gprime,
        l1_ghat,
        sobolev_bound: std::f64::consts::SQRT_2 * (l2_g + l2_gprime),
        t_tail,
        s_tail,
        method: "trapezoid".to_string(),
    })
}

/// Trapezoid `(1/sqrt(2 pi)) h sum g_k e^{-i s t_k}` with a rotation recurrence.
fn transform_at(gs: &[f64], t0: f64, h: f64, s: f64) -> Complex64 {
    let step = Complex64::from_polar(1.0, -s * h);
    let mut acc = Complex64::new(0.0, 0.0);
    let last = gs.len() - 1;
    let mut w = Complex64::from_polar(1.0, -s * t0);
    for (k, &g) in gs.iter().enumerate() {
        if k % 256 == 0 {
            // Re-anchor to stop phase drift accumulating.
            w = Complex64::from_polar(1.0, -s * (t0 + k as f64 * h));
        }
        let wt = if k == 0 || k == last { 0.5 } else { 1.0 };
        acc += w * (g * wt);
        w *= step;
    }
    acc * (h * INV_SQRT_2PI)
}

/// Geometric extrapolation of `int_S^inf |g^|` from the last two bands of samples.
fn spectral_tail(abs_half: &[f64], ds: f64) -> f64 {
    let n = abs_half.len();
    let band = (n / 10).max(2);
    if n < 2 * band {
        return f64::INFINITY;
    }
    let last: f64 = abs_half[n - band..].iter().sum::<f64>() * ds;
    let prev: f64 = abs_half[n - 2 * band..n - band].iter().sum::<f64>() * ds;
    // Below the quadrature noise level round-off would fake a flat tail.
    let floor = 1e-14 * band as f64 * ds;
    if last <= floor {
        return last;
    }
    let q = last / prev;
    if !(q < 1.0) {
        return f64::INFINITY;
    }
    last * q / (1.0 - q)
}

/// `(1/sqrt(2 pi)) int g^(s) (lambda/mu)^{is} ds`, which should reproduce `g(ln(lambda/mu))`.
pub fn synthesize_from_profile(
    profile: &FourierProfile,
    lambda: f64,
    mu: f64,
) -> Result<Complex64> {
    if !(lambda > 0.0 && mu > 0.0) {
        return Err(Error::DomainError {
            function: "synthesis".into(),
            at: lambda.min(mu),
        });
    }
    if profile.s_tail > TAIL_LIMIT {
        return Err(Error::TailMassTooLarge {
            tail: profile.s_tail,
            limit: TAIL_LIMIT,
        });
    }
    Ok(profile.partial_inverse((lambda / mu).ln(), f64::INFINITY))
}
