//! Bosonic reservoir: zero-temperature spectral densities, thermal
//! occupation, and the complex coefficients `Gamma(omega) = pi J(omega) + i S(omega)`
//! attached to each Bohr frequency.
//!
//! The thermal spectral density is `(n(w) + 1) J0(w)` for `w >= 0` and
//! `n(|w|) J0(|w|)` for `w < 0`. The real part of `Gamma` is half the decay
//! rate, so a flat `J0` corresponds to a cavity loss rate `gamma = 2 pi J0`.

use serde::{Deserialize, Serialize};

use crate::error::{JcError, Result};
use crate::hilbert::SystemParams;
use crate::jumps::{bohr_frequency, enumerate_jumps};
use crate::linalg::C64;
use crate::quadrature;

/// Zero-temperature spectral density `J0(w)`, defined for `w >= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectralModel {
    /// `J0(w) = j0` for `0 <= w < cutoff`, zero above.
    Flat { j0: f64, cutoff: f64 },
    /// `J0(w) = eta w exp(-w / omega_c)`.
    Ohmic { eta: f64, omega_c: f64 },
    /// `J0(w) = strength width^2 / ((w - center)^2 + width^2)`.
    Lorentzian {
        strength: f64,
        center: f64,
        width: f64,
    },
}

impl SpectralModel {
    /// Flat spectrum whose Lindblad rate is `gamma = 2 pi j0`.
    pub fn flat_for_rate(gamma: f64, cutoff: f64) -> Self {
        SpectralModel::Flat {
            j0: gamma / (2.0 * std::f64::consts::PI),
            cutoff,
        }
    }

    pub fn j0(&self, w: f64) -> f64 {
        if w < 0.0 {
            return 0.0;
        }
        match *self {
            SpectralModel::Flat { j0, cutoff } => {
                if w < cutoff {
                    j0
                } else {
                    0.0
                }
            }
            SpectralModel::Ohmic { eta, omega_c } => eta * w * (-w / omega_c).exp(),
            SpectralModel::Lorentzian {
                strength,
                center,
                width,
            } => {
                let x = w - center;
                strength * width * width / (x * x + width * width)
            }
        }
    }

    /// Slope of `J0` at zero frequency for models that vanish there.
    fn slope_at_zero(&self) -> f64 {
        match *self {
            SpectralModel::Ohmic { eta, .. } => eta,
            _ => 0.0,
        }
    }

    /// Frequencies where `J0` is discontinuous (besides the origin).
    fn jumps(&self) -> Vec<f64> {
        match *self {
            SpectralModel::Flat { cutoff, .. } => vec![cutoff],
            _ => Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(JcError::InvalidParameter {
                    name,
                    reason: format!("must be positive and finite, got {v}"),
                })
            }
        };
        match *self {
            SpectralModel::Flat { j0, cutoff } => {
                check("j0", j0)?;
                check("cutoff", cutoff)
            }
            SpectralModel::Ohmic { eta, omega_c } => {
                check("eta", eta)?;
                check("omega_c", omega_c)
            }
            SpectralModel::Lorentzian {
                strength,
                center,
                width,
            } => {
                check("strength", strength)?;
                check("center", center)?;
                check("width", width)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "policy", rename_all = "snake_case", deny_unknown_fields)]
pub enum LambShiftPolicy {
    /// Imaginary parts of all coefficients are dropped.
    #[default]
    Zero,
    /// Principal-value quadrature with exclusion half-width `epsilon` and
    /// absolute tolerance `tolerance`.
    PrincipalValue { epsilon: f64, tolerance: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathModel {
    pub spectral: SpectralModel,
    /// `k_B T` in frequency units.
    pub temperature: f64,
    #[serde(default)]
    pub lamb_shift: LambShiftPolicy,
}

impl BathModel {
    pub fn new(spectral: SpectralModel, temperature: f64) -> Result<Self> {
        let b = Self {
            spectral,
            temperature,
            lamb_shift: LambShiftPolicy::Zero,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn with_lamb_shift(mut self, policy: LambShiftPolicy) -> Self {
        self.lamb_shift = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.spectral.validate()?;
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(JcError::InvalidParameter {
                name: "temperature",
                reason: format!("must be non-negative and finite, got {}", self.temperature),
            });
        }
        if let LambShiftPolicy::PrincipalValue { epsilon, tolerance } = self.lamb_shift {
            if !(epsilon > 0.0 && tolerance > 0.0) {
                return Err(JcError::InvalidParameter {
                    name: "lamb_shift",
                    reason: "epsilon and tolerance must be positive".into(),
                });
            }
        }
        Ok(())
    }

    /// Checks the bath against the Bohr frequencies of a system: a flat
    /// cutoff must lie above every one of them.
    pub fn validate_for(&self, params: &SystemParams) -> Result<()> {
        self.validate()?;
        if let SpectralModel::Flat { cutoff, .. } = self.spectral {
            let max = enumerate_jumps(params)
                .into_iter()
                .map(|l| bohr_frequency(l, params).value)
                .fold(0.0, f64::max);
            if cutoff <= max {
                return Err(JcError::InvalidParameter {
                    name: "cutoff",
                    reason: format!(
                        "flat cutoff {cutoff} must exceed the largest Bohr frequency {max}"
                    ),
                });
            }
        }
        Ok(())
    }
}

/// Mean photon number `1/(exp(w/T) - 1)`; zero at `T = 0`.
pub fn bose_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(JcError::InvalidParameter {
            name: "omega",
            reason: format!("occupation requires a positive frequency, got {omega}"),
        });
    }
    if temperature <= 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (omega / temperature).exp_m1())
}

fn occupation(w: f64, t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        1.0 / (w / t).exp_m1()
    }
}

/// Thermal spectral density at a signed frequency.
pub fn thermal_spectral_density(omega: f64, bath: &BathModel) -> f64 {
    let t = bath.temperature;
    if omega == 0.0 {
        let j00 = bath.spectral.j0(0.0);
        return if t == 0.0 {
            j00
        } else if j00 == 0.0 {
            bath.spectral.slope_at_zero() * t
        } else {
            f64::INFINITY
        };
    }
    let w = omega.abs();
    let j0 = bath.spectral.j0(w);
    if j0 == 0.0 {
        return 0.0;
    }
    let n = occupation(w, t);
    if omega > 0.0 {
        (n + 1.0) * j0
    } else {
        n * j0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaCoefficient {
    pub value: C64,
    pub frequency: f64,
}

impl GammaCoefficient {
    /// Transition rate `2 Re Gamma`.
    pub fn rate(&self) -> f64 {
        2.0 * self.value.re
    }
}

pub fn gamma_coefficient(omega: f64, bath: &BathModel) -> Result<GammaCoefficient> {
    let re = std::f64::consts::PI * thermal_spectral_density(omega, bath);
    let im = lamb_shift(omega, bath)?;
    Ok(GammaCoefficient {
        value: C64::new(re, im),
        frequency: omega,
    })
}

/// Imaginary part of `Gamma(omega)` under the bath's Lamb-shift policy.
pub fn lamb_shift(omega: f64, bath: &BathModel) -> Result<f64> {
    match bath.lamb_shift {
        LambShiftPolicy::Zero => Ok(0.0),
        LambShiftPolicy::PrincipalValue { epsilon, tolerance } => {
            principal_value_shift(omega, bath, epsilon, tolerance)
        }
    }
}

const MAX_INTERVALS: usize = 2000;

/// `P int J(x)/(omega - x) dx` over the real line.
///
/// The window `(omega - eps, omega + eps)` is folded onto `[0, eps]` where the
/// integrand `(J(omega - u) - J(omega + u))/u` is regular; the remainder is
/// integrated piecewise between discontinuities of `J`.
pub fn principal_value_shift(
    omega: f64,
    bath: &BathModel,
    epsilon: f64,
    tolerance: f64,
) -> Result<f64> {
    let t = bath.temperature;
    let spec = bath.spectral;
    if t > 0.0 && spec.j0(0.0) > 0.0 {
        return Err(JcError::DivergentLambShift {
            omega,
            reason: "thermal density ~ T J0(0)/|w| is not integrable at w = 0 when J0(0) > 0"
                .into(),
        });
    }

    // discontinuities of the thermal density
    let mut breaks = vec![0.0];
    for c in spec.jumps() {
        if omega.abs() >= c {
            return Err(JcError::DivergentLambShift {
                omega,
                reason: format!("spectral cutoff {c} lies below |omega|"),
            });
        }
        breaks.push(c);
        if t > 0.0 {
            breaks.push(-c);
        }
    }
    let jump_at_zero = t == 0.0 && spec.j0(0.0) > 0.0;
    if omega == 0.0 && jump_at_zero {
        return Err(JcError::DivergentLambShift {
            omega,
            reason: "density is discontinuous at omega".into(),
        });
    }
    let nearest = breaks
        .iter()
        .map(|b| (b - omega).abs())
        .filter(|d| *d > 0.0)
        .fold(f64::INFINITY, f64::min);
    let eps = epsilon.min(0.5 * nearest);

    let density = |x: f64| thermal_spectral_density(x, bath);
    let lo_support = if t > 0.0 { f64::NEG_INFINITY } else { 0.0 };
    let mut points: Vec<f64> = breaks.clone();
    points.push(omega - eps);
    points.push(omega + eps);
    points.retain(|p| *p >= lo_support);
    points.sort_by(|a, b| a.total_cmp(b));
    points.dedup();

    let upper_bounded = matches!(spec, SpectralModel::Flat { .. });
    let segments = points.len() + 2;
    let seg_tol = tolerance / segments as f64;
    let outside = |x: f64| density(x) / (omega - x);

    let mut value = 0.0;
    let mut error = 0.0;
    let mut add = |e: quadrature::Estimate| {
        value += e.value;
        error += e.error;
    };

    if t > 0.0 {
        let first = points[0];
        add(quadrature::integrate_to_infinity(
            |y| outside(-y),
            -first,
            seg_tol,
            MAX_INTERVALS,
        ));
    }
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a >= omega - eps && b <= omega + eps {
            continue;
        }
        add(quadrature::integrate(outside, a, b, seg_tol, MAX_INTERVALS));
    }
    if !upper_bounded {
        let last = *points.last().unwrap();
        add(quadrature::integrate_to_infinity(
            outside,
            last,
            seg_tol,
            MAX_INTERVALS,
        ));
    }
    add(quadrature::integrate(
        |u| {
            if u == 0.0 {
                0.0
            } else {
                (density(omega - u) - density(omega + u)) / u
            }
        },
        0.0,
        eps,
        seg_tol,
        MAX_INTERVALS,
    ));

    if !(error <= tolerance) || !value.is_finite() {
        return Err(JcError::QuadratureNonConvergence {
            omega,
            residual: error,
            tolerance,
        });
    }
    Ok(value)
}
