//! Fixed-step RK4 evolution of `d rho/dt = L rho` and trajectory diagnostics.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{JcError, Result};
use crate::generators::{GeneratorKind, Liouvillian};
use crate::hilbert::{
    bare_number, bare_sigma_z, BareState, DressedBasis, DressedLabel, SystemParams,
};
use crate::linalg::{
    self, hermitian_eigenvalues, max_abs, min_hermitian_eigenvalue, CMatrix, CVector, C64, ZERO,
};

pub const STATE_HERMITICITY_TOL: f64 = 1e-12;
pub const STATE_TRACE_TOL: f64 = 1e-12;
pub const STATE_POSITIVITY_TOL: f64 = 1e-10;
/// Evolution aborts when `|tr rho - 1|` exceeds this.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;
/// Population of the top retained manifold above which truncation is flagged.
pub const LEAKAGE_THRESHOLD: f64 = 1e-3;

/// A validated density matrix in the dressed basis.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(JcError::InvalidState("matrix is not square".into()));
        }
        let h = health(&matrix);
        if h.hermiticity_defect > STATE_HERMITICITY_TOL {
            return Err(JcError::InvalidState(format!(
                "hermiticity defect {:e}",
                h.hermiticity_defect
            )));
        }
        if h.trace_deviation > STATE_TRACE_TOL {
            return Err(JcError::InvalidState(format!(
                "trace deviates from 1 by {:e}",
                h.trace_deviation
            )));
        }
        if h.min_eigenvalue < -STATE_POSITIVITY_TOL {
            return Err(JcError::InvalidState(format!(
                "negative eigenvalue {:e}",
                h.min_eigenvalue
            )));
        }
        Ok(Self { matrix })
    }

    /// `|psi><psi|` for a normalized vector.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) {
            return Err(JcError::InvalidState("zero state vector".into()));
        }
        let psi = psi / C64::new(norm, 0.0);
        Self::new(&psi * psi.adjoint())
    }

    pub fn dressed(basis: &DressedBasis, label: DressedLabel) -> Result<Self> {
        if !basis.contains(label) {
            return Err(JcError::InvalidState(format!(
                "{label} lies outside n_max = {}",
                basis.params.n_max
            )));
        }
        let mut psi = CVector::zeros(basis.dim());
        psi[label.index()] = C64::new(1.0, 0.0);
        Self::pure(&psi)
    }

    pub fn bare(basis: &DressedBasis, state: BareState) -> Result<Self> {
        if state.excitation() > basis.params.n_max {
            return Err(JcError::InvalidState(format!(
                "bare state |{},{:?}> lies outside n_max = {}",
                state.photons, state.atom, basis.params.n_max
            )));
        }
        let mut psi = CVector::zeros(basis.dim());
        psi[state.index()] = C64::new(1.0, 0.0);
        Self::pure(&(basis.unitary.adjoint() * psi))
    }

    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| JcError::InvalidState("empty mixture".into()))?;
        let d = first.1.dim();
        let mut total = 0.0;
        let mut m = CMatrix::zeros(d, d);
        for (w, rho) in parts {
            if !(*w >= 0.0) {
                return Err(JcError::InvalidState(format!("negative weight {w}")));
            }
            if rho.dim() != d {
                return Err(JcError::DimensionMismatch {
                    left: d,
                    right: rho.dim(),
                });
            }
            total += w;
            m += rho.matrix() * C64::new(*w, 0.0);
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(JcError::InvalidState(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Health {
    pub trace_deviation: f64,
    /// `max |rho - rho^dagger|`
    pub hermiticity_defect: f64,
    /// Smallest eigenvalue of `(rho + rho^dagger)/2`.
    pub min_eigenvalue: f64,
}

pub fn health(rho: &CMatrix) -> Health {
    Health {
        trace_deviation: (rho.trace() - C64::new(1.0, 0.0)).norm(),
        hermiticity_defect: max_abs(&(rho - rho.adjoint())),
        min_eigenvalue: min_hermitian_eigenvalue(rho),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub sz: f64,
    pub n_phot: f64,
    /// Dressed-level populations in basis order.
    pub populations: Vec<f64>,
    pub purity: f64,
}

/// Dressed-basis observables used along trajectories.
#[derive(Clone, Debug)]
pub struct ObservableSet {
    sz: CMatrix,
    number: CMatrix,
    manifolds: Vec<usize>,
    n_max: usize,
}

impl ObservableSet {
    pub fn new(basis: &DressedBasis) -> Self {
        let p = &basis.params;
        Self {
            sz: bare_sigma_z(p).to_dressed(basis).matrix,
            number: bare_number(p).to_dressed(basis).matrix,
            manifolds: basis.manifolds(),
            n_max: p.n_max,
        }
    }

    pub fn evaluate(&self, rho: &CMatrix) -> Observables {
        let expect = |op: &CMatrix| (op * rho).trace().re;
        Observables {
            sz: expect(&self.sz),
            n_phot: expect(&self.number),
            populations: (0..rho.nrows()).map(|i| rho[(i, i)].re).collect(),
            purity: (rho * rho).trace().re,
        }
    }

    pub fn top_manifold_population(&self, rho: &CMatrix) -> f64 {
        self.manifolds
            .iter()
            .enumerate()
            .filter(|(_, m)| **m == self.n_max)
            .map(|(i, _)| rho[(i, i)].re)
            .sum()
    }
}

pub fn observables(rho: &DensityMatrix, basis: &DressedBasis) -> Observables {
    ObservableSet::new(basis).evaluate(rho.matrix())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Rk4,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    #[serde(default)]
    pub method: Method,
    /// Defaults to `0.01 / max(omega0, ||L||_inf)`.
    pub dt: Option<f64>,
    /// Largest allowed `dt * max(omega0, ||L||_inf)`.
    pub safety_factor: f64,
    pub record_every: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Rk4,
            dt: None,
            safety_factor: 2.5,
            record_every: 1,
        }
    }
}

impl IntegratorConfig {
    pub fn with_dt(dt: f64) -> Self {
        Self {
            dt: Some(dt),
            ..Self::default()
        }
    }

    pub fn recording_every(mut self, n: usize) -> Self {
        self.record_every = n;
        self
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub kind: GeneratorKind,
    pub params: SystemParams,
    pub loss_rate: Option<f64>,
    pub labels: Vec<DressedLabel>,
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<CMatrix>,
    pub trace: Vec<f64>,
    pub min_eig: Vec<f64>,
    pub herm_defect: Vec<f64>,
    pub sz: Vec<f64>,
    pub n_phot: Vec<f64>,
    pub purity: Vec<f64>,
    /// `populations[k][i]`: level `i` at record `k`.
    pub populations: Vec<Vec<f64>>,
    pub top_manifold_population: Vec<f64>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Named series: `sz`, `n_phot`, `trace`, `min_eig`, `herm_defect`,
    /// `purity`, `p_<tag>` for dressed populations, or `p_e` for the excited
    /// atomic population.
    pub fn series(&self, name: &str) -> Result<Vec<f64>> {
        let v = match name {
            "sz" => self.sz.clone(),
            "n_phot" => self.n_phot.clone(),
            "trace" => self.trace.clone(),
            "min_eig" => self.min_eig.clone(),
            "herm_defect" => self.herm_defect.clone(),
            "purity" => self.purity.clone(),
            "p_e" => self.sz.iter().map(|s| 0.5 * (1.0 + s)).collect(),
            other => {
                let tag = other
                    .strip_prefix("p_")
                    .ok_or_else(|| JcError::UnknownObservable(other.into()))?;
                let i = self
                    .labels
                    .iter()
                    .position(|l| l.tag() == tag)
                    .ok_or_else(|| JcError::UnknownObservable(other.into()))?;
                self.populations.iter().map(|p| p[i]).collect()
            }
        };
        Ok(v)
    }

    pub fn final_state(&self) -> &CMatrix {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn csv_header(&self) -> String {
        let mut cols = vec![
            "t".to_string(),
            "trace".into(),
            "min_eig".into(),
            "herm_defect".into(),
            "sz".into(),
            "n_phot".into(),
        ];
        cols.extend(self.labels.iter().map(|l| format!("p_{}", l.tag())));
        cols.join(",")
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.csv_header())?;
        for k in 0..self.len() {
            let mut fields = vec![
                self.times[k],
                self.trace[k],
                self.min_eig[k],
                self.herm_defect[k],
                self.sz[k],
                self.n_phot[k],
            ];
            fields.extend(&self.populations[k]);
            let line: Vec<String> = fields.into_iter().map(crate::csv_float).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Compressed-row copy of a superoperator for repeated products.
struct SparseRows {
    starts: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseRows {
    fn from_dense(m: &CMatrix) -> Self {
        let mut starts = Vec::with_capacity(m.nrows() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        starts.push(0);
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let z = m[(r, c)];
                if z != ZERO {
                    cols.push(c);
                    vals.push(z);
                }
            }
            starts.push(cols.len());
        }
        Self { starts, cols, vals }
    }

    fn mul_into(&self, x: &[C64], y: &mut [C64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.starts[r]..self.starts[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }
}

/// Step size and step count the integrator will use.
pub fn resolve_step(l: &Liouvillian, t_end: f64, config: &IntegratorConfig) -> Result<(f64, usize)> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(JcError::InvalidParameter {
            name: "t_end",
            reason: format!("must be positive and finite, got {t_end}"),
        });
    }
    if config.record_every == 0 {
        return Err(JcError::InvalidParameter {
            name: "record_every",
            reason: "must be at least 1".into(),
        });
    }
    let bound = l.params.omega0.max(linalg::inf_norm(&l.matrix));
    let limit = config.safety_factor / bound;
    let dt = match config.dt {
        Some(dt) if !(dt.is_finite() && dt > 0.0) => {
            return Err(JcError::InvalidParameter {
                name: "dt",
                reason: format!("must be positive and finite, got {dt}"),
            })
        }
        Some(dt) => dt,
        None => 0.01 / bound,
    };
    if dt > limit {
        return Err(JcError::StepTooLarge { dt, limit });
    }
    let steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    Ok((t_end / steps as f64, steps))
}

/// Integrates `d rho/dt = L rho` from `t = 0` to `t_end` with classical RK4.
///
/// The step is shrunk so that an integer number of steps lands on `t_end`.
/// States are recorded every `record_every` steps and at the end.
pub fn evolve(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    t_end: f64,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    let d = l.dim();
    if rho0.dim() != d {
        return Err(JcError::DimensionMismatch {
            left: d,
            right: rho0.dim(),
        });
    }
    let (dt, steps) = resolve_step(l, t_end, config)?;
    let basis = crate::hilbert::build_dressed_basis(l.params)?;
    let obs = ObservableSet::new(&basis);
    let sparse = SparseRows::from_dense(&l.matrix);

    let mut traj = Trajectory {
        kind: l.kind,
        params: l.params,
        loss_rate: l.loss_rate(),
        labels: basis.labels.clone(),
        dt,
        times: Vec::new(),
        states: Vec::new(),
        trace: Vec::new(),
        min_eig: Vec::new(),
        herm_defect: Vec::new(),
        sz: Vec::new(),
        n_phot: Vec::new(),
        purity: Vec::new(),
        populations: Vec::new(),
        top_manifold_population: Vec::new(),
        warnings: Vec::new(),
    };
    let record = |t: f64, v: &[C64], traj: &mut Trajectory| {
        let rho = CMatrix::from_column_slice(d, d, v);
        let h = health(&rho);
        let o = obs.evaluate(&rho);
        traj.times.push(t);
        traj.trace.push(rho.trace().re);
        traj.min_eig.push(h.min_eigenvalue);
        traj.herm_defect.push(h.hermiticity_defect);
        traj.sz.push(o.sz);
        traj.n_phot.push(o.n_phot);
        traj.purity.push(o.purity);
        traj.populations.push(o.populations);
        traj.top_manifold_population
            .push(obs.top_manifold_population(&rho));
        traj.states.push(rho);
    };

    let n = d * d;
    let mut v: Vec<C64> = rho0.matrix().as_slice().to_vec();
    let mut k1 = vec![ZERO; n];
    let mut k2 = vec![ZERO; n];
    let mut k3 = vec![ZERO; n];
    let mut k4 = vec![ZERO; n];
    let mut tmp = vec![ZERO; n];
    let half = C64::new(0.5 * dt, 0.0);
    let full = C64::new(dt, 0.0);
    let sixth = C64::new(dt / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);
    let diag: Vec<usize> = (0..d).map(|i| i + i * d).collect();

    record(0.0, &v, &mut traj);
    let mut last_valid = 0.0;
    for step in 1..=steps {
        sparse.mul_into(&v, &mut k1);
        for i in 0..n {
            tmp[i] = v[i] + half * k1[i];
        }
        sparse.mul_into(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = v[i] + half * k2[i];
        }
        sparse.mul_into(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = v[i] + full * k3[i];
        }
        sparse.mul_into(&tmp, &mut k4);
        for i in 0..n {
            v[i] += sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }

        let t = step as f64 * dt;
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(JcError::NonFinite {
                last_valid_time: last_valid,
            });
        }
        let tr: C64 = diag.iter().map(|&i| v[i]).sum();
        let drift = (tr - C64::new(1.0, 0.0)).norm();
        if drift > TRACE_DRIFT_LIMIT {
            return Err(JcError::TraceDrift {
                time: t,
                deviation: drift,
                last_valid_time: last_valid,
            });
        }
        last_valid = t;
        if step % config.record_every == 0 || step == steps {
            record(t, &v, &mut traj);
        }
    }

    let peak = traj
        .top_manifold_population
        .iter()
        .copied()
        .fold(0.0, f64::max);
    if peak > LEAKAGE_THRESHOLD {
        traj.warnings.push(format!(
            "top manifold n_max = {} reached population {peak:.3e}; truncation may be unsafe",
            l.params.n_max
        ));
    }
    Ok(traj)
}

/// Eigenvalues of the Hermitian part of each recorded state.
pub fn spectra(traj: &Trajectory) -> Vec<Vec<f64>> {
    traj.states.iter().map(hermitian_eigenvalues).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{BathModel, SpectralModel};
    use crate::generators::{build_phenom_bare, build_quasi_rwa, build_secular};
    use crate::hilbert::{build_dressed_basis, Atom, Branch};
    use approx::assert_abs_diff_eq;

    fn basis(n: usize) -> DressedBasis {
        build_dressed_basis(SystemParams::new(1.0, 0.1, n).unwrap()).unwrap()
    }

    #[test]
    fn ground_state_observables() {
        let b = basis(2);
        let rho = DensityMatrix::dressed(&b, DressedLabel::Ground).unwrap();
        let o = observables(&rho, &b);
        assert_abs_diff_eq!(o.sz, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(o.n_phot, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(o.purity, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn plus_state_observables() {
        let b = basis(1);
        let rho = DensityMatrix::dressed(
            &b,
            DressedLabel::Doublet {
                n: 1,
                s: Branch::Plus,
            },
        )
        .unwrap();
        let o = observables(&rho, &b);
        assert_abs_diff_eq!(o.sz, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(o.n_phot, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn maximally_mixed_purity() {
        let b = basis(1);
        let rho = DensityMatrix::new(CMatrix::identity(3, 3) * C64::new(1.0 / 3.0, 0.0)).unwrap();
        assert_abs_diff_eq!(observables(&rho, &b).purity, 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn health_flags_perturbations() {
        let b = basis(1);
        let rho = DensityMatrix::dressed(&b, DressedLabel::Ground).unwrap();
        let h = health(rho.matrix());
        assert!(h.trace_deviation <= 1e-12 && h.hermiticity_defect <= 1e-12);
        assert!(h.min_eigenvalue.abs() <= 1e-12);
        let mut m = rho.into_matrix();
        m[(0, 1)] += C64::new(1e-3, 0.0);
        let h = health(&m);
        assert_abs_diff_eq!(h.hermiticity_defect, 1e-3, epsilon = 1e-15);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn invalid_states_rejected() {
        let b = basis(1);
        let mut m = CMatrix::identity(3, 3) * C64::new(0.5, 0.0);
        assert!(DensityMatrix::new(m.clone()).is_err());
        m[(0, 0)] = C64::new(-0.5, 0.0);
        m[(1, 1)] = C64::new(1.0, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        let bad = BareState {
            photons: 2,
            atom: Atom::Ground,
        };
        assert!(DensityMatrix::bare(&b, bad).is_err());
        let g = DensityMatrix::dressed(&b, DressedLabel::Ground).unwrap();
        assert!(DensityMatrix::mixture(&[(0.4, g.clone()), (0.4, g)]).is_err());
    }

    #[test]
    fn rabi_oscillation_without_loss() {
        let p = SystemParams::new(1.0, 0.1, 1).unwrap();
        let b = build_dressed_basis(p).unwrap();
        let l = build_phenom_bare(p, 0.0, 0.0).unwrap();
        let rho0 = DensityMatrix::bare(
            &b,
            BareState {
                photons: 0,
                atom: Atom::Excited,
            },
        )
        .unwrap();
        let t_end = 10.0 * std::f64::consts::PI / p.coupling;
        let traj = evolve(&l, &rho0, t_end, &IntegratorConfig::default().recording_every(50)).unwrap();
        let pe = traj.series("p_e").unwrap();
        for (t, p_e) in traj.times.iter().zip(&pe) {
            let want = (p.coupling * t).cos().powi(2);
            assert!((p_e - want).abs() < 1e-6);
        }
        assert!(traj.purity.iter().all(|x| (x - 1.0).abs() < 1e-8));
    }

    #[test]
    fn secular_single_level_decay() {
        let p = SystemParams::new(1.0, 0.1, 2).unwrap();
        let b = build_dressed_basis(p).unwrap();
        let gamma = 0.02;
        let bath = BathModel::new(SpectralModel::flat_for_rate(gamma, 10.0), 0.0).unwrap();
        let l = build_secular(p, &bath).unwrap();
        let label = DressedLabel::Doublet {
            n: 1,
            s: Branch::Plus,
        };
        let rho0 = DensityMatrix::dressed(&b, label).unwrap();
        let traj = evolve(&l, &rho0, 3.0 / gamma, &IntegratorConfig::default().recording_every(100)).unwrap();
        let pop = traj.series("p_1p").unwrap();
        for (t, x) in traj.times.iter().zip(&pop) {
            assert!((x - (-gamma * t / 2.0).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn trajectories_are_linear() {
        let p = SystemParams::new(1.0, 0.1, 2).unwrap();
        let b = build_dressed_basis(p).unwrap();
        let bath = BathModel::new(SpectralModel::Ohmic { eta: 0.01, omega_c: 1.0 }, 0.3).unwrap();
        let l = build_quasi_rwa(p, &bath).unwrap();
        let r1 = DensityMatrix::dressed(&b, DressedLabel::Doublet { n: 2, s: Branch::Minus }).unwrap();
        let r2 = DensityMatrix::bare(&b, BareState { photons: 0, atom: Atom::Excited }).unwrap();
        let a = 0.3;
        let mix = DensityMatrix::mixture(&[(a, r1.clone()), (1.0 - a, r2.clone())]).unwrap();
        let cfg = IntegratorConfig::with_dt(0.01);
        let t1 = evolve(&l, &r1, 5.0, &cfg).unwrap();
        let t2 = evolve(&l, &r2, 5.0, &cfg).unwrap();
        let tm = evolve(&l, &mix, 5.0, &cfg).unwrap();
        let want = t1.final_state() * C64::new(a, 0.0) + t2.final_state() * C64::new(1.0 - a, 0.0);
        assert!(max_abs(&(tm.final_state() - want)) < 1e-12);
    }

    #[test]
    fn step_limits_enforced() {
        let p = SystemParams::new(1.0, 0.1, 1).unwrap();
        let b = build_dressed_basis(p).unwrap();
        let l = build_phenom_bare(p, 0.01, 0.0).unwrap();
        let rho = DensityMatrix::dressed(&b, DressedLabel::Ground).unwrap();
        assert!(matches!(
            evolve(&l, &rho, 1.0, &IntegratorConfig::with_dt(10.0)),
            Err(JcError::StepTooLarge { .. })
        ));
        assert!(evolve(&l, &rho, -1.0, &IntegratorConfig::default()).is_err());
        let (dt, steps) = resolve_step(&l, 1.0, &IntegratorConfig::with_dt(0.3)).unwrap();
        assert_eq!(steps, 4);
        assert_abs_diff_eq!(dt, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn csv_layout() {
        let p = SystemParams::new(1.0, 0.1, 1).unwrap();
        let b = build_dressed_basis(p).unwrap();
        let l = build_phenom_bare(p, 0.01, 0.0).unwrap();
        let rho = DensityMatrix::dressed(&b, DressedLabel::Ground).unwrap();
        let traj = evolve(&l, &rho, 0.1, &IntegratorConfig::with_dt(0.05)).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,trace,min_eig,herm_defect,sz,n_phot,p_E0,p_1m,p_1p"
        );
        assert_eq!(lines.count(), 3);
        assert!(text.contains("1.0000000000000000e0"));
    }
}
