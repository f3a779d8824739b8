//! Master-equation generators as dense superoperators on the dressed basis.
//!
//! All four builders return a [`Liouvillian`] acting on column-stacked
//! dressed-basis density matrices.

use serde::{Deserialize, Serialize};

use crate::bath::{gamma_coefficient, BathModel, GammaCoefficient};
use crate::error::{JcError, Result};
use crate::hilbert::{
    bare_annihilation, bare_hamiltonian, build_dressed_basis, jc_hamiltonian, DressedBasis,
    SystemParams,
};
use crate::jumps::{bohr_frequency, enumerate_jumps, jump_operator, JumpLabel};
use crate::linalg::{
    self, frobenius_norm, hermitian_eigenvalues, transform_superop, CMatrix, SuperOp, C64, ZERO,
};

/// Lindblad verdict threshold on the smallest Kossakowski eigenvalue.
pub const LINDBLAD_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    PhenomBare,
    PhenomDressed,
    SecularRwa,
    QuasiRwa,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 4] = [
        GeneratorKind::PhenomBare,
        GeneratorKind::PhenomDressed,
        GeneratorKind::SecularRwa,
        GeneratorKind::QuasiRwa,
    ];

    pub fn is_phenomenological(self) -> bool {
        matches!(self, GeneratorKind::PhenomBare | GeneratorKind::PhenomDressed)
    }
}

/// Physical inputs a Liouvillian was built from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Provenance {
    Phenomenological { gamma: f64, temperature: f64 },
    Microscopic { bath: BathModel },
}

#[derive(Clone, Debug)]
pub struct Liouvillian {
    pub kind: GeneratorKind,
    /// `d^2 x d^2`, column-stacking convention, dressed basis.
    pub matrix: CMatrix,
    pub params: SystemParams,
    pub provenance: Provenance,
}

impl Liouvillian {
    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        linalg::apply_superop(&self.matrix, rho)
    }

    /// `|| vec(I)^dagger L || / ||L||_F`; zero for trace-preserving maps.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim();
        let mut row = vec![ZERO; d * d];
        for i in 0..d {
            let r = i + i * d;
            for (c, slot) in row.iter_mut().enumerate() {
                *slot += self.matrix[(r, c)];
            }
        }
        let n: f64 = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let scale = frobenius_norm(&self.matrix);
        if scale == 0.0 {
            0.0
        } else {
            n / scale
        }
    }

    /// `max |L(rho^dagger) - L(rho)^dagger|` over the supplied operators.
    pub fn hermiticity_defect(&self, probes: &[CMatrix]) -> f64 {
        probes
            .iter()
            .map(|rho| {
                let a = self.apply(&rho.adjoint());
                let b = self.apply(rho).adjoint();
                linalg::max_abs(&(a - b))
            })
            .fold(0.0, f64::max)
    }

    /// Effective Lindblad loss rate `gamma` where one is defined: the
    /// phenomenological rate, or `2 pi J0` for a flat bath.
    pub fn loss_rate(&self) -> Option<f64> {
        match self.provenance {
            Provenance::Phenomenological { gamma, .. } => Some(gamma),
            Provenance::Microscopic { bath } => match bath.spectral {
                crate::bath::SpectralModel::Flat { j0, .. } => {
                    Some(2.0 * std::f64::consts::PI * j0)
                }
                _ => None,
            },
        }
    }
}

fn check_rate(gamma: f64, temperature: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(JcError::InvalidParameter {
            name: "gamma",
            reason: format!("must be non-negative and finite, got {gamma}"),
        });
    }
    if !(temperature.is_finite() && temperature >= 0.0) {
        return Err(JcError::InvalidParameter {
            name: "temperature",
            reason: format!("must be non-negative and finite, got {temperature}"),
        });
    }
    Ok(())
}

fn thermal_occupation(params: &SystemParams, temperature: f64) -> f64 {
    crate::bath::bose_occupation(params.omega0, temperature).unwrap_or(0.0)
}

/// Cavity damping `gamma (n+1) D[a] + gamma n D[a^dagger]` assembled from
/// bare operators, then rotated into the dressed basis.
pub fn build_phenom_bare(params: SystemParams, gamma: f64, temperature: f64) -> Result<Liouvillian> {
    check_rate(gamma, temperature)?;
    let basis = build_dressed_basis(params)?;
    let n = thermal_occupation(&params, temperature);
    let h = bare_hamiltonian(&params).matrix;
    let a = bare_annihilation(&params).matrix;
    let mut s = SuperOp::zeros(params.dim());
    s.add_hamiltonian(&h);
    s.add_lindblad(gamma * (n + 1.0), &a);
    s.add_lindblad(gamma * n, &a.adjoint());
    let matrix = transform_superop(&s.into_matrix(), &basis.unitary);
    Ok(Liouvillian {
        kind: GeneratorKind::PhenomBare,
        matrix,
        params,
        provenance: Provenance::Phenomenological { gamma, temperature },
    })
}

fn jump_matrices(basis: &DressedBasis) -> Vec<(JumpLabel, CMatrix)> {
    enumerate_jumps(&basis.params)
        .into_iter()
        .map(|l| {
            let m = jump_operator(l, basis).expect("enumerated labels fit").matrix;
            (l, m)
        })
        .collect()
}

/// Ordered `(acting, conjugated)` label pairs of the dressed-state expansion
/// of the phenomenological dissipator: one downward cross product
/// `A_i rho A_j^dagger` per pair.
pub fn dressed_cross_products(params: &SystemParams) -> Vec<(JumpLabel, JumpLabel)> {
    let labels = enumerate_jumps(params);
    let mut out = Vec::with_capacity(labels.len() * labels.len());
    for &i in &labels {
        for &j in &labels {
            out.push((i, j));
        }
    }
    out
}

/// The phenomenological equation expanded over dressed jump operators, term
/// by term.
pub fn build_phenom_dressed(
    params: SystemParams,
    gamma: f64,
    temperature: f64,
) -> Result<Liouvillian> {
    check_rate(gamma, temperature)?;
    let basis = build_dressed_basis(params)?;
    let n = thermal_occupation(&params, temperature);
    let jumps = jump_matrices(&basis);
    let index = |l: JumpLabel| jumps.iter().position(|(k, _)| *k == l).unwrap();
    let down = C64::new(gamma * (n + 1.0), 0.0);
    let up = C64::new(gamma * n, 0.0);
    let half = C64::new(0.5, 0.0);

    let mut s = SuperOp::zeros(params.dim());
    s.add_hamiltonian(&jc_hamiltonian(&basis).matrix);
    for (li, lj) in dressed_cross_products(&params) {
        let ai = &jumps[index(li)].1;
        let aj = &jumps[index(lj)].1;
        // A_i rho A_j^dagger - {A_j^dagger A_i, rho}/2
        let k = aj.adjoint() * ai;
        s.add_sandwich(down, ai, aj);
        s.add_left(-down * half, &k);
        s.add_right(-down * half, &k);
        // A_i^dagger rho A_j - {A_j A_i^dagger, rho}/2
        let ai_d = ai.adjoint();
        let aj_d = aj.adjoint();
        let k = aj * &ai_d;
        s.add_sandwich(up, &ai_d, &aj_d);
        s.add_left(-up * half, &k);
        s.add_right(-up * half, &k);
    }
    Ok(Liouvillian {
        kind: GeneratorKind::PhenomDressed,
        matrix: s.into_matrix(),
        params,
        provenance: Provenance::Phenomenological { gamma, temperature },
    })
}

/// Per-label downward and upward coefficients `Gamma(w)` and `Gamma(-w)`.
pub fn channel_coefficients(
    params: &SystemParams,
    bath: &BathModel,
) -> Result<Vec<(JumpLabel, GammaCoefficient, GammaCoefficient)>> {
    enumerate_jumps(params)
        .into_iter()
        .map(|l| {
            let w = bohr_frequency(l, params).value;
            Ok((l, gamma_coefficient(w, bath)?, gamma_coefficient(-w, bath)?))
        })
        .collect()
}

#[derive(Clone, Copy, PartialEq)]
enum PairSelection {
    All,
    Diagonal,
}

fn build_microscopic(
    params: SystemParams,
    bath: &BathModel,
    pairs: PairSelection,
    kind: GeneratorKind,
) -> Result<Liouvillian> {
    bath.validate_for(&params)?;
    let basis = build_dressed_basis(params)?;
    let jumps = jump_matrices(&basis);
    let coeffs = channel_coefficients(&params, bath)?;

    let mut s = SuperOp::zeros(params.dim());
    s.add_hamiltonian(&jc_hamiltonian(&basis).matrix);
    let d = params.dim();
    let adj: Vec<CMatrix> = jumps.iter().map(|(_, a)| a.adjoint()).collect();
    let nz: Vec<_> = jumps.iter().map(|(_, a)| linalg::nonzeros(a)).collect();
    let nz_adj: Vec<_> = adj.iter().map(linalg::nonzeros).collect();
    for (i, (_, ai)) in jumps.iter().enumerate() {
        let g = coeffs[i].1.value;
        let gt = coeffs[i].2.value;
        let ai_d = &adj[i];
        for (j, (_, aj)) in jumps.iter().enumerate() {
            if pairs == PairSelection::Diagonal && i != j {
                continue;
            }
            let aj_d = &adj[j];
            // Gamma_i (A_i rho A_j^dagger - A_j^dagger A_i rho) + h.c.
            s.add_sandwich(g, ai, aj);
            s.add_left(-g, &linalg::sparse_product(&nz_adj[j], &nz[i], d));
            s.add_sandwich(g.conj(), aj, ai);
            s.add_right(-g.conj(), &linalg::sparse_product(&nz_adj[i], &nz[j], d));
            // Gamma~_i (A_i^dagger rho A_j - A_j A_i^dagger rho) + h.c.
            s.add_sandwich(gt, ai_d, aj_d);
            s.add_left(-gt, &linalg::sparse_product(&nz[j], &nz_adj[i], d));
            s.add_sandwich(gt.conj(), aj_d, ai_d);
            s.add_right(-gt.conj(), &linalg::sparse_product(&nz[i], &nz_adj[j], d));
        }
    }
    Ok(Liouvillian {
        kind,
        matrix: s.into_matrix(),
        params,
        provenance: Provenance::Microscopic { bath: *bath },
    })
}

/// Microscopic generator keeping every slowly rotating cross-label product.
pub fn build_quasi_rwa(params: SystemParams, bath: &BathModel) -> Result<Liouvillian> {
    build_microscopic(params, bath, PairSelection::All, GeneratorKind::QuasiRwa)
}

/// Microscopic generator restricted to diagonal label pairs.
pub fn build_secular(params: SystemParams, bath: &BathModel) -> Result<Liouvillian> {
    build_microscopic(params, bath, PairSelection::Diagonal, GeneratorKind::SecularRwa)
}

/// Builds any generator kind. Phenomenological kinds take `gamma` and the
/// bath temperature; microscopic kinds take the full bath.
pub fn build(
    kind: GeneratorKind,
    params: SystemParams,
    gamma: Option<f64>,
    bath: Option<&BathModel>,
) -> Result<Liouvillian> {
    let missing = |name: &'static str| JcError::InvalidParameter {
        name,
        reason: format!("required by generator kind {kind:?}"),
    };
    match kind {
        GeneratorKind::PhenomBare | GeneratorKind::PhenomDressed => {
            let gamma = gamma.ok_or_else(|| missing("gamma"))?;
            let t = bath.map_or(0.0, |b| b.temperature);
            if kind == GeneratorKind::PhenomBare {
                build_phenom_bare(params, gamma, t)
            } else {
                build_phenom_dressed(params, gamma, t)
            }
        }
        GeneratorKind::SecularRwa => build_secular(params, bath.ok_or_else(|| missing("bath"))?),
        GeneratorKind::QuasiRwa => build_quasi_rwa(params, bath.ok_or_else(|| missing("bath"))?),
    }
}

/// Direction of a dissipative channel in the Kossakowski basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "direction", content = "label", rename_all = "snake_case")]
pub enum Channel {
    /// `A_label`
    Down(JumpLabel),
    /// `A_label^dagger`
    Up(JumpLabel),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KossakowskiReport {
    pub kind: GeneratorKind,
    pub channels: Vec<Channel>,
    /// Real parts of the Hermitian coefficient matrix, row-major.
    pub coefficients_re: Vec<Vec<f64>>,
    /// Imaginary parts of the Hermitian coefficient matrix, row-major.
    pub coefficients_im: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    /// Norm of the dissipative part lying outside the span of the jump
    /// operators.
    pub residual: f64,
    /// `None` when the residual prevents a verdict.
    pub is_lindblad: Option<bool>,
    pub tolerance: f64,
}

impl KossakowskiReport {
    pub fn coefficient_matrix(&self) -> CMatrix {
        let n = self.channels.len();
        CMatrix::from_fn(n, n, |r, c| {
            C64::new(self.coefficients_re[r][c], self.coefficients_im[r][c])
        })
    }
}

/// Extracts the Kossakowski matrix of `L` over the jump operators and their
/// adjoints.
///
/// Writing `L(rho) = sum chi_{(ab),(ce)} E_ab rho E_ce^dagger` over matrix
/// units, `chi` is a reshuffling of `L`. Projecting both indices onto the
/// complement of the identity removes the Hamiltonian and anticommutator
/// parts; what remains is the dissipative coefficient matrix, which is then
/// rescaled from matrix units to jump operators.
pub fn kossakowski_report(l: &Liouvillian) -> Result<KossakowskiReport> {
    let params = l.params;
    params.validate()?;
    let d = params.dim();
    let dd = d * d;
    let unit = |a: usize, b: usize| a + b * d;

    let mut chi = CMatrix::zeros(dd, dd);
    for a in 0..d {
        for c in 0..d {
            let row = a + c * d;
            for b in 0..d {
                for e in 0..d {
                    chi[(unit(a, b), unit(c, e))] = l.matrix[(row, b + e * d)];
                }
            }
        }
    }
    let mut v = linalg::CVector::zeros(dd);
    for a in 0..d {
        v[unit(a, a)] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    }
    let proj = CMatrix::identity(dd, dd) - &v * v.adjoint();
    let k = &proj * chi * &proj;
    let k = (&k + k.adjoint()) * C64::new(0.5, 0.0);

    let mut channels = Vec::new();
    let mut slots = Vec::new();
    for label in enumerate_jumps(&params) {
        let (lo, hi, c) = (
            label.lower().index(),
            label.upper().index(),
            label.coefficient(),
        );
        channels.push(Channel::Down(label));
        slots.push((unit(lo, hi), c));
    }
    for label in enumerate_jumps(&params) {
        let (lo, hi, c) = (
            label.lower().index(),
            label.upper().index(),
            label.coefficient(),
        );
        channels.push(Channel::Up(label));
        slots.push((unit(hi, lo), c));
    }

    let n = channels.len();
    let mut coef = CMatrix::zeros(n, n);
    let mut in_span = vec![false; dd];
    for (i, &(ui, ci)) in slots.iter().enumerate() {
        in_span[ui] = true;
        for (j, &(uj, cj)) in slots.iter().enumerate() {
            coef[(i, j)] = k[(ui, uj)] / (ci * cj);
        }
    }
    // summed directly; total minus inside would cancel catastrophically
    let mut outside = 0.0;
    for c in 0..dd {
        for r in 0..dd {
            if !(in_span[r] && in_span[c]) {
                outside += k[(r, c)].norm_sqr();
            }
        }
    }
    let residual = outside.sqrt();
    let scale = frobenius_norm(&k).max(1.0);

    let eigenvalues = hermitian_eigenvalues(&coef);
    let min_eigenvalue = eigenvalues.first().copied().unwrap_or(0.0);
    let is_lindblad = if residual > 1e-9 * scale {
        None
    } else {
        Some(min_eigenvalue >= -LINDBLAD_TOLERANCE)
    };
    Ok(KossakowskiReport {
        kind: l.kind,
        channels,
        coefficients_re: (0..n).map(|r| (0..n).map(|c| coef[(r, c)].re).collect()).collect(),
        coefficients_im: (0..n).map(|r| (0..n).map(|c| coef[(r, c)].im).collect()).collect(),
        eigenvalues,
        min_eigenvalue,
        residual,
        is_lindblad,
        tolerance: LINDBLAD_TOLERANCE,
    })
}

/// One point of a complete-positivity scan.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CpScanPoint {
    pub bath: BathModel,
    pub min_eigenvalue: f64,
    pub is_lindblad: Option<bool>,
}

/// Builds the quasi-RWA generator for every bath and reports the
/// Kossakowski minimum eigenvalue of each, in input order.
pub fn scan_complete_positivity(
    params: SystemParams,
    baths: &[BathModel],
) -> Result<Vec<CpScanPoint>> {
    baths
        .iter()
        .map(|bath| {
            let l = build_quasi_rwa(params, bath)?;
            let r = kossakowski_report(&l)?;
            Ok(CpScanPoint {
                bath: *bath,
                min_eigenvalue: r.min_eigenvalue,
                is_lindblad: r.is_lindblad,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::SpectralModel;
    use crate::linalg::{apply_superop, max_abs, ONE};

    fn params(n_max: usize) -> SystemParams {
        SystemParams::new(1.0, 0.1, n_max).unwrap()
    }

    fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
        frobenius_norm(&(a - b)) / frobenius_norm(b)
    }

    fn flat_bath(gamma: f64, t: f64) -> BathModel {
        BathModel::new(SpectralModel::flat_for_rate(gamma, 10.0), t).unwrap()
    }

    #[test]
    fn zero_rate_is_unitary() {
        let l = build_phenom_bare(params(3), 0.0, 0.0).unwrap();
        // anti-Hermitian superoperator => purely imaginary spectrum
        assert!(max_abs(&(&l.matrix + l.matrix.adjoint())) < 1e-13);
        let ld = build_phenom_dressed(params(3), 0.0, 0.3).unwrap();
        assert!(rel(&ld.matrix, &l.matrix) < 1e-13);
    }

    #[test]
    fn zero_temperature_has_no_upward_term() {
        let p = params(2);
        let basis = build_dressed_basis(p).unwrap();
        let l = build_phenom_bare(p, 0.05, 0.0).unwrap();
        let mut s = SuperOp::zeros(p.dim());
        s.add_hamiltonian(&jc_hamiltonian(&basis).matrix);
        let a = crate::hilbert::annihilation_dressed(&basis).matrix;
        s.add_lindblad(0.05, &a);
        assert!(rel(&l.matrix, &s.into_matrix()) < 1e-13);
    }

    #[test]
    fn single_excitation_stationary_state_is_ground() {
        // null space by LU solve with the trace row substituted
        let l = build_phenom_bare(params(1), 0.05, 0.0).unwrap();
        let d = 3;
        let mut m = l.matrix.clone();
        let mut rhs = linalg::CVector::zeros(d * d);
        for c in 0..d * d {
            m[(0, c)] = ZERO;
        }
        for i in 0..d {
            m[(0, i + i * d)] = ONE;
        }
        rhs[0] = ONE;
        let x = m.lu().solve(&rhs).unwrap();
        let rho = linalg::unvectorize(&x, d);
        let mut want = CMatrix::zeros(d, d);
        want[(0, 0)] = ONE;
        assert!(max_abs(&(rho - want)) < 1e-12);
    }

    #[test]
    fn dressed_expansion_is_exact() {
        for n in 1..=4 {
            for (g, t) in [(0.05, 0.0), (0.02, 0.3), (0.2, 1.0)] {
                let lb = build_phenom_bare(params(n), g, t).unwrap();
                let ld = build_phenom_dressed(params(n), g, t).unwrap();
                assert!(rel(&ld.matrix, &lb.matrix) <= 1e-12, "n={n} g={g} t={t}");
            }
        }
    }

    #[test]
    fn cross_product_count_follows_the_four_sums() {
        // Count the four sums of the expansion directly: (0,0), (0,N'),
        // (N,0), (N,N') blocks with 4, 8, 8, 16 sign combinations.
        for n_max in 1..=8usize {
            let k = n_max - 1;
            let oracle = 4 + 8 * k + 8 * k + 16 * k * k;
            assert_eq!(dressed_cross_products(&params(n_max)).len(), oracle);
        }
    }

    #[test]
    fn coincidence_at_zero_temperature_flat() {
        for n in 1..=8 {
            let g = 0.03;
            let lq = build_quasi_rwa(params(n), &flat_bath(g, 0.0)).unwrap();
            let lb = build_phenom_bare(params(n), g, 0.0).unwrap();
            assert!(rel(&lq.matrix, &lb.matrix) <= 1e-12, "n={n}");
        }
    }

    #[test]
    fn three_level_quasi_rwa_by_hand() {
        // Two channels A0-, A0+ with Gamma_- and Gamma_+; T = 0.
        let p = SystemParams::new(1.0, 0.2, 1).unwrap();
        let bath = BathModel::new(SpectralModel::Ohmic { eta: 0.05, omega_c: 1.5 }, 0.0).unwrap();
        let l = build_quasi_rwa(p, &bath).unwrap();
        let basis = build_dressed_basis(p).unwrap();
        let h = jc_hamiltonian(&basis).matrix;
        let j = |w: f64| std::f64::consts::PI * 0.05 * w * (-w / 1.5f64).exp();
        let gm = j(0.8);
        let gp = j(1.2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut am = CMatrix::zeros(3, 3);
        am[(0, 1)] = C64::new(s, 0.0);
        let mut ap = CMatrix::zeros(3, 3);
        ap[(0, 2)] = C64::new(s, 0.0);
        let ops = [(gm, am), (gp, ap)];
        let raw = CMatrix::from_fn(3, 3, |r, c| C64::new((r + 2 * c) as f64 * 0.1, r as f64 - c as f64));
        let rho = (&raw + raw.adjoint()) * C64::new(0.5, 0.0);
        let mut want = (&h * &rho - &rho * &h) * (-crate::linalg::I);
        for (gi, ai) in &ops {
            for (_, aj) in &ops {
                let g = C64::new(*gi, 0.0);
                let term = ai * &rho * aj.adjoint() - aj.adjoint() * ai * &rho;
                want += &term * g + term.adjoint() * g;
            }
        }
        let got = apply_superop(&l.matrix, &rho);
        assert!(max_abs(&(got - want)) < 1e-14);
    }

    #[test]
    fn secular_is_quasi_without_cross_terms() {
        let p = params(3);
        let bath = BathModel::new(SpectralModel::Ohmic { eta: 0.02, omega_c: 2.0 }, 0.4).unwrap();
        let lq = build_quasi_rwa(p, &bath).unwrap();
        let ls = build_secular(p, &bath).unwrap();
        let basis = build_dressed_basis(p).unwrap();
        let jumps = jump_matrices(&basis);
        let coeffs = channel_coefficients(&p, &bath).unwrap();
        let mut cross = SuperOp::zeros(p.dim());
        for (i, (_, ai)) in jumps.iter().enumerate() {
            for (j, (_, aj)) in jumps.iter().enumerate() {
                if i == j {
                    continue;
                }
                let g = coeffs[i].1.value;
                let gt = coeffs[i].2.value;
                cross.add_sandwich(g, ai, aj);
                cross.add_left(-g, &(aj.adjoint() * ai));
                cross.add_sandwich(g.conj(), aj, ai);
                cross.add_right(-g.conj(), &(ai.adjoint() * aj));
                cross.add_sandwich(gt, &ai.adjoint(), &aj.adjoint());
                cross.add_left(-gt, &(aj * ai.adjoint()));
                cross.add_sandwich(gt.conj(), &aj.adjoint(), &ai.adjoint());
                cross.add_right(-gt.conj(), &(ai * aj.adjoint()));
            }
        }
        let diff = &lq.matrix - cross.into_matrix();
        assert!(max_abs(&(diff - &ls.matrix)) < 1e-15);
        // nonzero pattern containment
        for (x, y) in ls.matrix.iter().zip(lq.matrix.iter()) {
            if *x != ZERO {
                assert!(*y != ZERO);
            }
        }
    }

    #[test]
    fn kossakowski_verdicts() {
        let p = params(3);
        for t in [0.0, 0.2, 0.8] {
            for spec in [
                SpectralModel::flat_for_rate(0.05, 10.0),
                SpectralModel::Ohmic { eta: 0.05, omega_c: 0.5 },
                SpectralModel::Lorentzian {
                    strength: 0.01,
                    center: 1.0,
                    width: 0.2,
                },
            ] {
                let bath = BathModel::new(spec, t).unwrap();
                let r = kossakowski_report(&build_secular(p, &bath).unwrap()).unwrap();
                assert_eq!(r.is_lindblad, Some(true), "{spec:?} T={t}");
            }
        }
        let r = kossakowski_report(&build_quasi_rwa(p, &flat_bath(0.05, 0.0)).unwrap()).unwrap();
        assert_eq!(r.is_lindblad, Some(true));
        assert!(r.min_eigenvalue >= -LINDBLAD_TOLERANCE);
        let r = kossakowski_report(&build_phenom_bare(p, 0.05, 0.5).unwrap()).unwrap();
        assert_eq!(r.is_lindblad, Some(true));
    }

    #[test]
    fn kossakowski_coefficients_match_rate_sums() {
        // For real Gamma the coefficient of A_i rho A_j^dagger is
        // Gamma_i + Gamma_j.
        let p = params(2);
        let bath = BathModel::new(SpectralModel::Ohmic { eta: 0.05, omega_c: 0.7 }, 0.3).unwrap();
        let r = kossakowski_report(&build_quasi_rwa(p, &bath).unwrap()).unwrap();
        let coeffs = channel_coefficients(&p, &bath).unwrap();
        let n = coeffs.len();
        let c = r.coefficient_matrix();
        for i in 0..n {
            for j in 0..n {
                let down = coeffs[i].1.value.re + coeffs[j].1.value.re;
                let up = coeffs[i].2.value.re + coeffs[j].2.value.re;
                assert!((c[(i, j)].re - down).abs() < 1e-12);
                assert!((c[(n + i, n + j)].re - up).abs() < 1e-12);
                assert!(c[(i, n + j)].norm() < 1e-12);
            }
        }
        assert!(r.residual < 1e-12);
        // unequal rates give an indefinite rank-two block
        assert_eq!(r.is_lindblad, Some(false));
    }

    #[test]
    fn cp_scan_flags_negativity_for_sloped_thermal_bath() {
        let p = params(2);
        let baths: Vec<BathModel> = [0.1, 0.5, 1.0]
            .iter()
            .map(|&t| BathModel::new(SpectralModel::Ohmic { eta: 0.05, omega_c: 0.3 }, t).unwrap())
            .collect();
        let scan = scan_complete_positivity(p, &baths).unwrap();
        assert_eq!(scan.len(), 3);
        assert!(scan.iter().any(|s| s.min_eigenvalue < -LINDBLAD_TOLERANCE));
    }

    #[test]
    fn invalid_rates_rejected() {
        assert!(build_phenom_bare(params(1), -0.1, 0.0).is_err());
        assert!(build_phenom_dressed(params(1), 0.1, -1.0).is_err());
        assert!(build(GeneratorKind::QuasiRwa, params(1), None, None).is_err());
        assert!(build(GeneratorKind::PhenomBare, params(1), None, None).is_err());
    }
}
