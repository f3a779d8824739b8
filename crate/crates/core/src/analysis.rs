//! Generator comparisons, damped-oscillation fits, rate tables, validity
//! ratios and the thermal occupation-difference surface.

use std::io::{self, Write};

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::bath::{bose_occupation, BathModel};
use crate::error::{JcError, Result};
use crate::evolve::Trajectory;
use crate::generators::{channel_coefficients, GeneratorKind, Liouvillian};
use crate::hilbert::{build_dressed_basis, SystemParams};
use crate::jumps::{timescale_separation, JumpLabel, TimescaleSeparation};
use crate::linalg::frobenius_norm;

/// Relative distance at or below which two generators are reported equal.
pub const COINCIDENCE_TOLERANCE: f64 = 1e-12;
/// Ratio standing in for "much greater than".
pub const DOMINANCE_THRESHOLD: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorDeviation {
    /// Excitation difference `N(a) - N(b)` of the coherences `|a><b|`.
    pub sector: i64,
    pub max_abs_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub kinds: [GeneratorKind; 2],
    pub dim: usize,
    pub relative_distance: f64,
    pub absolute_distance: f64,
    /// Diagonal blocks, one per sector present.
    pub sectors: Vec<SectorDeviation>,
    /// Largest deviation in entries coupling different sectors.
    pub off_sector_max: f64,
    pub tolerance: f64,
    pub coincide: bool,
}

/// `||L1 - L2||_F / max(||L1||_F, ||L2||_F)` with a sector breakdown.
pub fn compare_generators(l1: &Liouvillian, l2: &Liouvillian) -> Result<ComparisonReport> {
    if l1.dim() != l2.dim() || l1.matrix.shape() != l2.matrix.shape() {
        return Err(JcError::DimensionMismatch {
            left: l1.dim(),
            right: l2.dim(),
        });
    }
    let d = l1.dim();
    let diff = &l1.matrix - &l2.matrix;
    let absolute = frobenius_norm(&diff);
    let scale = frobenius_norm(&l1.matrix).max(frobenius_norm(&l2.matrix));
    let relative = if scale == 0.0 { 0.0 } else { absolute / scale };

    // Both operands share the parameter set's dressed labelling.
    let manifolds = build_dressed_basis(l1.params)
        .map(|b| b.manifolds())
        .unwrap_or_else(|_| (0..d).map(|i| i.div_ceil(2)).collect());
    let sector = |k: usize| manifolds[k % d] as i64 - manifolds[k / d] as i64;
    let n_max = (d - 1) / 2;
    let mut per_sector = vec![0.0f64; 2 * n_max + 1];
    let mut off = 0.0f64;
    for c in 0..d * d {
        let sc = sector(c);
        for r in 0..d * d {
            let v = diff[(r, c)].norm();
            let sr = sector(r);
            if sr == sc {
                let slot = &mut per_sector[(sr + n_max as i64) as usize];
                *slot = slot.max(v);
            } else {
                off = off.max(v);
            }
        }
    }
    Ok(ComparisonReport {
        kinds: [l1.kind, l2.kind],
        dim: d,
        relative_distance: relative,
        absolute_distance: absolute,
        sectors: per_sector
            .into_iter()
            .enumerate()
            .map(|(i, m)| SectorDeviation {
                sector: i as i64 - n_max as i64,
                max_abs_deviation: m,
            })
            .collect(),
        off_sector_max: off,
        tolerance: COINCIDENCE_TOLERANCE,
        coincide: relative <= COINCIDENCE_TOLERANCE,
    })
}

/// Least-squares fit of `exp(-kappa t) (A cos(nu t + phi) + B) + C`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DampedCosineFit {
    pub frequency: f64,
    pub decay: f64,
    pub amplitude: f64,
    pub phase: f64,
    /// Decaying non-oscillating part `B`.
    pub baseline: f64,
    pub offset: f64,
    /// Euclidean norm of the residual vector.
    pub residual_norm: f64,
    pub samples: usize,
    pub iterations: usize,
    pub initial_frequency: f64,
    pub initial_decay: f64,
}

impl DampedCosineFit {
    pub fn eval(&self, t: f64) -> f64 {
        (-self.decay * t).exp() * (self.amplitude * (self.frequency * t + self.phase).cos() + self.baseline)
            + self.offset
    }
}

struct Projection {
    coeffs: DVector<f64>,
    residual: DVector<f64>,
}

fn project(times: &[f64], values: &DVector<f64>, nu: f64, kappa: f64) -> Projection {
    let n = times.len();
    let mut basis = DMatrix::<f64>::zeros(n, 4);
    for (i, &t) in times.iter().enumerate() {
        let e = (-kappa * t).exp();
        basis[(i, 0)] = e * (nu * t).cos();
        basis[(i, 1)] = e * (nu * t).sin();
        basis[(i, 2)] = e;
        basis[(i, 3)] = 1.0;
    }
    let svd = basis.clone().svd(true, true);
    let tol = 1e-12 * svd.singular_values.max();
    let coeffs = svd
        .solve(values, tol)
        .unwrap_or_else(|_| DVector::from_element(4, f64::NAN));
    let residual = &basis * &coeffs - values;
    Projection { coeffs, residual }
}

fn cost(p: &Projection) -> f64 {
    0.5 * p.residual.norm_squared()
}

/// Dominant nonzero frequencies of the detrended series, strongest first.
fn spectral_peaks(times: &[f64], values: &[f64], count: usize) -> Vec<f64> {
    let n = values.len();
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    // remove the least-squares line
    let tm = times.iter().sum::<f64>() / n as f64;
    let vm = values.iter().sum::<f64>() / n as f64;
    let sxx: f64 = times.iter().map(|t| (t - tm).powi(2)).sum();
    let sxy: f64 = times.iter().zip(values).map(|(t, v)| (t - tm) * (v - vm)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };

    let pad = 8;
    let len = (n * pad).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = (0..len)
        .map(|i| {
            if i < n {
                Complex::new(values[i] - vm - slope * (times[i] - tm), 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        })
        .collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let mag: Vec<f64> = buf[..len / 2].iter().map(|z| z.norm()).collect();

    // bins below one cycle per record carry the trend, not the oscillation
    let first = (len / n).max(1) + 1;
    let mut peaks: Vec<(f64, f64)> = (first..mag.len().saturating_sub(1))
        .filter(|&k| mag[k] > mag[k - 1] && mag[k] >= mag[k + 1])
        .map(|k| {
            let (a, b, c) = (mag[k - 1], mag[k], mag[k + 1]);
            let denom = a - 2.0 * b + c;
            let shift = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            let f = (k as f64 + shift) / (len as f64 * dt);
            (b, 2.0 * std::f64::consts::PI * f)
        })
        .collect();
    peaks.sort_by(|x, y| y.0.total_cmp(&x.0));
    peaks.into_iter().take(count).map(|p| p.1).collect()
}

/// Decay rate from a line through the logarithms of the local maxima of
/// `|x - x_final|`.
fn envelope_decay(times: &[f64], values: &[f64]) -> f64 {
    let n = values.len();
    let span = times[n - 1] - times[0];
    let tail = values[n - 1];
    let dev: Vec<f64> = values.iter().map(|v| (v - tail).abs()).collect();
    let pts: Vec<(f64, f64)> = (1..n - 1)
        .filter(|&k| dev[k] > dev[k - 1] && dev[k] >= dev[k + 1] && dev[k] > 1e-300)
        .map(|k| (times[k], dev[k].ln()))
        .collect();
    if pts.len() < 2 {
        return 1.0 / span;
    }
    let m = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let lm = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - tm).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - lm)).sum();
    if sxx > 0.0 {
        (-sxy / sxx).max(0.0)
    } else {
        1.0 / span
    }
}

struct LmOutcome {
    params: Vector2<f64>,
    projection: Projection,
    iterations: usize,
}

/// Levenberg-Marquardt over `(nu, kappa)` with the linear amplitudes
/// eliminated by least squares at every evaluation.
fn levenberg_marquardt(times: &[f64], values: &DVector<f64>, start: Vector2<f64>, span: f64) -> LmOutcome {
    let eval = |p: &Vector2<f64>| project(times, values, p[0], p[1]);
    let mut p = start;
    let mut cur = eval(&p);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    for it in 0..500 {
        iterations = it + 1;
        let n = times.len();
        let mut jac = DMatrix::<f64>::zeros(n, 2);
        for k in 0..2 {
            let h = 1e-6 * p[k].abs().max(1.0 / span);
            let mut up = p;
            let mut dn = p;
            up[k] += h;
            dn[k] -= h;
            let col = (eval(&up).residual - eval(&dn).residual) / (2.0 * h);
            jac.set_column(k, &col);
        }
        let g = jac.transpose() * &cur.residual;
        let h: Matrix2<f64> = {
            let m = jac.transpose() * &jac;
            Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
        };
        let g = Vector2::new(g[0], g[1]);
        let mut accepted = false;
        while lambda < 1e16 {
            let mut a = h;
            for k in 0..2 {
                a[(k, k)] += lambda * h[(k, k)].max(1e-300);
            }
            let Some(step) = a.lu().solve(&(-g)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = p + step;
            let next = eval(&trial);
            let (c0, c1) = (cost(&cur), cost(&next));
            if c1.is_finite() && c1 <= c0 {
                let small_step = step.norm() <= 1e-13 * (p.norm() + 1e-300);
                let small_gain = c0 - c1 <= 1e-16 * c0 || c1 == 0.0;
                p = trial;
                cur = next;
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                if small_step || small_gain {
                    return LmOutcome {
                        params: p,
                        projection: cur,
                        iterations,
                    };
                }
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    LmOutcome {
        params: p,
        projection: cur,
        iterations,
    }
}

/// Fits `exp(-kappa t) (A cos(nu t + phi) + B) + C` to uniformly sampled data.
///
/// Starting frequencies come from the strongest peaks of the zero-padded
/// spectrum of the detrended series, the starting decay from the log
/// envelope. The best of the refined candidates is returned.
pub fn fit_damped_cosine(times: &[f64], values: &[f64]) -> Result<DampedCosineFit> {
    let fail = |reason: String, f0: f64, k0: f64| JcError::FitFailed {
        reason,
        initial_frequency: f0,
        initial_decay: k0,
    };
    let n = times.len();
    if n != values.len() {
        return Err(fail(
            format!("{} times but {} values", n, values.len()),
            f64::NAN,
            f64::NAN,
        ));
    }
    if n < 16 {
        return Err(fail(format!("need at least 16 samples, got {n}"), f64::NAN, f64::NAN));
    }
    if times.iter().chain(values).any(|x| !x.is_finite()) {
        return Err(fail("non-finite sample".into(), f64::NAN, f64::NAN));
    }
    let span = times[n - 1] - times[0];
    let dt = span / (n - 1) as f64;
    if !(dt > 0.0) || times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-6 * dt) {
        return Err(fail("samples are not uniformly spaced".into(), f64::NAN, f64::NAN));
    }

    let kappa0 = envelope_decay(times, values);
    let candidates = spectral_peaks(times, values, 3);
    if candidates.is_empty() {
        return Err(fail("no oscillation found in the spectrum".into(), f64::NAN, kappa0));
    }
    let y = DVector::from_column_slice(values);
    let mut best: Option<(LmOutcome, f64)> = None;
    for &nu0 in &candidates {
        let out = levenberg_marquardt(times, &y, Vector2::new(nu0, kappa0), span);
        let c = cost(&out.projection);
        if c.is_finite() && best.as_ref().is_none_or(|b| c < cost(&b.0.projection)) {
            best = Some((out, nu0));
        }
    }
    let (out, nu0) = best.ok_or_else(|| fail("least squares diverged".into(), candidates[0], kappa0))?;
    let c = &out.projection.coeffs;
    if c.iter().any(|x| !x.is_finite()) || out.params[0] == 0.0 {
        return Err(fail(
            format!("fit ended at nu = {}, kappa = {}", out.params[0], out.params[1]),
            nu0,
            kappa0,
        ));
    }
    let (nu, kappa) = (out.params[0], out.params[1]);
    // cos is even in nu; only sin flips
    let (a, b) = if nu < 0.0 { (c[0], -c[1]) } else { (c[0], c[1]) };
    Ok(DampedCosineFit {
        frequency: nu.abs(),
        decay: kappa,
        amplitude: a.hypot(b),
        phase: (-b).atan2(a),
        baseline: c[2],
        offset: c[3],
        residual_norm: out.projection.residual.norm(),
        samples: n,
        iterations: out.iterations,
        initial_frequency: nu0,
        initial_decay: kappa0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RabiFit {
    pub observable: String,
    pub frequency: f64,
    pub decay_rate: f64,
    pub residual_norm: f64,
    /// `2 Omega sqrt(1 - (gamma / 4 Omega)^2)` when a loss rate is defined
    /// and the doublet is underdamped.
    pub predicted_frequency: Option<f64>,
    pub relative_error: Option<f64>,
    /// Fitted frequency over `2 Omega`.
    pub frequency_ratio: f64,
    pub periods_spanned: f64,
    pub fit: DampedCosineFit,
}

/// Damped vacuum Rabi frequency for loss rate `gamma`, if underdamped.
pub fn predicted_rabi_frequency(coupling: f64, gamma: f64) -> Option<f64> {
    let x = gamma / (4.0 * coupling);
    (x < 1.0).then(|| 2.0 * coupling * (1.0 - x * x).sqrt())
}

pub fn fit_rabi(traj: &Trajectory, observable: &str) -> Result<RabiFit> {
    let mut series = traj.series(observable)?;
    let mut times = traj.times.clone();
    // the closing record may fall between regular recording points
    if times.len() > 2 {
        let n = times.len();
        let first = times[1] - times[0];
        if ((times[n - 1] - times[n - 2]) - first).abs() > 1e-6 * first {
            times.pop();
            series.pop();
        }
    }
    let fit = fit_damped_cosine(&times, &series)?;
    let omega = traj.params.coupling;
    let predicted = traj
        .loss_rate
        .and_then(|g| predicted_rabi_frequency(omega, g));
    let span = times.last().copied().unwrap_or(0.0) - times[0];
    Ok(RabiFit {
        observable: observable.to_string(),
        frequency: fit.frequency,
        decay_rate: fit.decay,
        residual_norm: fit.residual_norm,
        predicted_frequency: predicted,
        relative_error: predicted.map(|p| (fit.frequency - p).abs() / p),
        frequency_ratio: fit.frequency / (2.0 * omega),
        periods_spanned: span * fit.frequency / (2.0 * std::f64::consts::PI),
        fit,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub label: JumpLabel,
    pub frequency: f64,
    /// `2 Re Gamma(omega)`
    pub down_rate: f64,
    /// `2 Re Gamma(-omega)`
    pub up_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateSpreadReport {
    pub rows: Vec<RateRow>,
    /// `max / min - 1` over the downward rates.
    pub down_spread: f64,
    pub up_spread: f64,
    pub min_frequency: f64,
    pub max_frequency: f64,
    /// `omega0 -/+ (sqrt(N+1) + sqrt(N)) Omega` with `N = n_max - 1`.
    pub predicted_band: [f64; 2],
    pub band_confirmed: bool,
}

fn spread(rates: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = rates.clone().fold(f64::NEG_INFINITY, f64::max);
    let min = rates.fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        0.0
    } else if min == 0.0 {
        f64::INFINITY
    } else {
        max / min - 1.0
    }
}

pub fn rate_spread(params: &SystemParams, bath: &BathModel) -> Result<RateSpreadReport> {
    params.validate()?;
    bath.validate()?;
    let rows: Vec<RateRow> = channel_coefficients(params, bath)?
        .into_iter()
        .map(|(label, down, up)| RateRow {
            label,
            frequency: down.frequency,
            down_rate: down.rate(),
            up_rate: up.rate(),
        })
        .collect();
    let min_f = rows.iter().map(|r| r.frequency).fold(f64::INFINITY, f64::min);
    let max_f = rows.iter().map(|r| r.frequency).fold(f64::NEG_INFINITY, f64::max);
    let top = (params.n_max - 1) as f64;
    let width = ((top + 1.0).sqrt() + top.sqrt()) * params.coupling;
    let band = [params.omega0 - width, params.omega0 + width];
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * params.omega0.max(1.0);
    Ok(RateSpreadReport {
        down_spread: spread(rows.iter().map(|r| r.down_rate)),
        up_spread: spread(rows.iter().map(|r| r.up_rate)),
        min_frequency: min_f,
        max_frequency: max_f,
        predicted_band: band,
        band_confirmed: close(min_f, band[0]) && close(max_f, band[1]),
        rows,
    })
}

/// Where the decay rates for a validity check come from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum RateSource {
    /// Cavity loss `gamma` with thermal occupation at `omega0`.
    Phenomenological { gamma: f64, temperature: f64 },
    /// Every dressed-channel rate of the bath.
    Bath { bath: BathModel },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimescaleRecord {
    /// Largest single-channel rate.
    pub gamma_max: f64,
    /// `2 Omega / gamma_max`; `None` when there is no loss.
    pub rabi_ratio: Option<f64>,
    /// `omega0 / gamma_max`; `None` when there is no loss.
    pub optical_ratio: Option<f64>,
    pub threshold: f64,
    pub rabi_condition: bool,
    pub optical_condition: bool,
    /// Secular generator needs the decay slower than the Rabi period.
    pub secular_valid: bool,
    /// Phenomenological and Quasi-RWA generators only need `omega0 >> gamma`.
    pub quasi_rwa_valid: bool,
    pub phenomenological_valid: bool,
    pub separation: TimescaleSeparation,
}

pub fn timescale_check(params: &SystemParams, source: &RateSource) -> Result<TimescaleRecord> {
    params.validate()?;
    let gamma_max = match *source {
        RateSource::Phenomenological { gamma, temperature } => {
            if !(gamma.is_finite() && gamma >= 0.0 && temperature.is_finite() && temperature >= 0.0) {
                return Err(JcError::InvalidParameter {
                    name: "gamma",
                    reason: format!("need gamma >= 0 and T >= 0, got {gamma}, {temperature}"),
                });
            }
            gamma * (bose_occupation(params.omega0, temperature)? + 1.0)
        }
        RateSource::Bath { bath } => rate_spread(params, &bath)?
            .rows
            .iter()
            .flat_map(|r| [r.down_rate, r.up_rate])
            .fold(0.0, f64::max),
    };
    let ratio = |x: f64| (gamma_max > 0.0).then(|| x / gamma_max);
    let rabi_ratio = ratio(2.0 * params.coupling);
    let optical_ratio = ratio(params.omega0);
    let holds = |r: Option<f64>| r.is_none_or(|r| r >= DOMINANCE_THRESHOLD);
    let rabi = holds(rabi_ratio);
    let optical = holds(optical_ratio);
    Ok(TimescaleRecord {
        gamma_max,
        rabi_ratio,
        optical_ratio,
        threshold: DOMINANCE_THRESHOLD,
        rabi_condition: rabi,
        optical_condition: optical,
        secular_valid: rabi && optical,
        quasi_rwa_valid: optical,
        phenomenological_valid: optical,
        separation: timescale_separation(params),
    })
}

/// `n(omega) - n(omega + delta)` on a grid; temperatures and offsets are in
/// units of `omega`. `values[i][j]` belongs to `temperatures[i]`,
/// `delta_omegas[j]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaNSurface {
    pub omega: f64,
    pub temperatures: Vec<f64>,
    pub delta_omegas: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|i| {
                if i == count - 1 {
                    stop
                } else {
                    start + (stop - start) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

impl DeltaNSurface {
    pub const DEFAULT_T_RANGE: (f64, f64) = (0.01, 0.5);
    pub const DEFAULT_DELTA_RANGE: (f64, f64) = (0.0, 0.5);

    pub fn default_grid() -> Result<Self> {
        let (t0, t1) = Self::DEFAULT_T_RANGE;
        let (d0, d1) = Self::DEFAULT_DELTA_RANGE;
        delta_n_surface(1.0, &linspace(t0, t1, 50), &linspace(d0, d1, 51))
    }

    /// First row holds the offsets after an empty cell; each later row starts
    /// with its temperature.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut head = vec![String::new()];
        head.extend(self.delta_omegas.iter().map(|x| crate::csv_float(*x)));
        writeln!(out, "{}", head.join(","))?;
        for (t, row) in self.temperatures.iter().zip(&self.values) {
            let mut line = vec![crate::csv_float(*t)];
            line.extend(row.iter().map(|x| crate::csv_float(*x)));
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// `(i, j, value)` of the largest entry; ties go to the first found.
    pub fn argmax(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for (i, row) in self.values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if best.is_none_or(|b| v > b.2) {
                    best = Some((i, j, v));
                }
            }
        }
        best
    }
}

pub fn delta_n_surface(omega: f64, temperatures: &[f64], delta_omegas: &[f64]) -> Result<DeltaNSurface> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(JcError::InvalidParameter {
            name: "omega",
            reason: format!("must be positive, got {omega}"),
        });
    }
    if let Some(t) = temperatures.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(JcError::InvalidParameter {
            name: "temperature",
            reason: format!("grid value {t} is not a non-negative number"),
        });
    }
    if let Some(d) = delta_omegas.iter().find(|d| !(d.is_finite() && **d >= 0.0 && **d < 1.0)) {
        return Err(JcError::InvalidParameter {
            name: "delta_omega",
            reason: format!("grid value {d} lies outside [0, 1) in units of omega"),
        });
    }
    let mut values = Vec::with_capacity(temperatures.len());
    for &t in temperatures {
        let temp = t * omega;
        let base = bose_occupation(omega, temp)?;
        let row = delta_omegas
            .iter()
            .map(|&d| {
                if d == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(base - bose_occupation(omega * (1.0 + d), temp)?)
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        values.push(row);
    }
    Ok(DeltaNSurface {
        omega,
        temperatures: temperatures.to_vec(),
        delta_omegas: delta_omegas.to_vec(),
        values,
    })
}
