//! Truncated excitation-number space and the dressed eigenbasis of the
//! resonant Jaynes-Cummings Hamiltonian
//! `H = omega0/2 sigma_z + omega0 a^dagger a + Omega (a sigma_+ + a^dagger sigma_-)`.
//!
//! The space keeps every state with total excitation `N <= n_max`. Bare basis
//! ordering: `|0,g>` first, then for each manifold `N` the pair
//! `|N,g>, |N-1,e>`. Dressed ordering: `E0`, then `(1,-), (1,+), (2,-), ...`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{JcError, Result};
use crate::linalg::{CMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Atomic Bohr frequency, equal to the cavity frequency at resonance.
    pub omega0: f64,
    /// Vacuum Rabi coupling `Omega`.
    pub coupling: f64,
    /// Largest total excitation number retained.
    pub n_max: usize,
}

impl SystemParams {
    pub fn new(omega0: f64, coupling: f64, n_max: usize) -> Result<Self> {
        let p = Self {
            omega0,
            coupling,
            n_max,
        };
        p.validate()?;
        Ok(p)
    }

    /// Checks positivity and that every Bohr frequency
    /// `omega0 - (sqrt(N+1) + sqrt(N)) Omega` up to `N = n_max` is positive.
    pub fn validate(&self) -> Result<()> {
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(JcError::InvalidParameter {
                name: "omega0",
                reason: format!("must be positive and finite, got {}", self.omega0),
            });
        }
        if !(self.coupling.is_finite() && self.coupling > 0.0) {
            return Err(JcError::InvalidParameter {
                name: "coupling",
                reason: format!("must be positive and finite, got {}", self.coupling),
            });
        }
        if self.n_max < 1 {
            return Err(JcError::InvalidParameter {
                name: "n_max",
                reason: "must be at least 1".into(),
            });
        }
        for lower in 0..=self.n_max {
            let upper = lower + 1;
            let bound = ((upper as f64).sqrt() + (lower as f64).sqrt()) * self.coupling;
            if self.omega0 <= bound {
                return Err(JcError::NonPositiveBohrFrequency {
                    upper,
                    lower,
                    omega0: self.omega0,
                    bound,
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        2 * self.n_max + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "+")]
    Plus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Minus, Branch::Plus];

    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    fn symbol(self) -> char {
        match self {
            Branch::Plus => '+',
            Branch::Minus => '-',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Atom {
    #[serde(rename = "g")]
    Ground,
    #[serde(rename = "e")]
    Excited,
}

/// Bare product state `|photons, atom>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BareState {
    pub photons: usize,
    pub atom: Atom,
}

impl BareState {
    pub fn excitation(&self) -> usize {
        self.photons + usize::from(self.atom == Atom::Excited)
    }

    pub fn index(&self) -> usize {
        match (self.atom, self.photons) {
            (Atom::Ground, 0) => 0,
            (Atom::Ground, n) => 2 * n - 1,
            (Atom::Excited, n) => 2 * (n + 1),
        }
    }

    pub fn from_index(i: usize) -> Self {
        match i {
            0 => Self {
                photons: 0,
                atom: Atom::Ground,
            },
            i if i % 2 == 1 => Self {
                photons: i.div_ceil(2),
                atom: Atom::Ground,
            },
            i => Self {
                photons: i / 2 - 1,
                atom: Atom::Excited,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DressedLabel {
    Ground,
    Doublet { n: usize, s: Branch },
}

impl DressedLabel {
    pub fn excitation(&self) -> usize {
        match *self {
            DressedLabel::Ground => 0,
            DressedLabel::Doublet { n, .. } => n,
        }
    }

    pub fn index(&self) -> usize {
        match *self {
            DressedLabel::Ground => 0,
            DressedLabel::Doublet { n, s: Branch::Minus } => 2 * n - 1,
            DressedLabel::Doublet { n, s: Branch::Plus } => 2 * n,
        }
    }

    /// Short tag used in CSV headers: `E0`, `1m`, `1p`, ...
    pub fn tag(&self) -> String {
        match *self {
            DressedLabel::Ground => "E0".into(),
            DressedLabel::Doublet { n, s: Branch::Minus } => format!("{n}m"),
            DressedLabel::Doublet { n, s: Branch::Plus } => format!("{n}p"),
        }
    }
}

impl fmt::Display for DressedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DressedLabel::Ground => write!(f, "E0"),
            DressedLabel::Doublet { n, s } => write!(f, "E({n},{})", s.symbol()),
        }
    }
}

impl std::str::FromStr for DressedLabel {
    type Err = String;

    /// Accepts `E0`/`ground`, or `<N>+`/`<N>-` (also `<N>p`/`<N>m`).
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("e0") || t.eq_ignore_ascii_case("ground") {
            return Ok(DressedLabel::Ground);
        }
        let (num, last) = t.split_at(t.len().saturating_sub(1));
        let branch = match last {
            "+" | "p" => Branch::Plus,
            "-" | "m" => Branch::Minus,
            _ => return Err(format!("unrecognised dressed label `{s}`")),
        };
        let n: usize = num
            .parse()
            .map_err(|_| format!("unrecognised dressed label `{s}`"))?;
        if n == 0 {
            return Err(format!("dressed doublets start at N = 1, got `{s}`"));
        }
        Ok(DressedLabel::Doublet { n, s: branch })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisKind {
    Bare,
    Dressed,
}

/// Dense operator on the truncated space, tagged with its basis.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub basis: BasisKind,
    pub matrix: CMatrix,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn to_dressed(&self, basis: &DressedBasis) -> OperatorMatrix {
        match self.basis {
            BasisKind::Dressed => self.clone(),
            BasisKind::Bare => OperatorMatrix {
                basis: BasisKind::Dressed,
                matrix: basis.unitary.adjoint() * &self.matrix * &basis.unitary,
            },
        }
    }

    pub fn to_bare(&self, basis: &DressedBasis) -> OperatorMatrix {
        match self.basis {
            BasisKind::Bare => self.clone(),
            BasisKind::Dressed => OperatorMatrix {
                basis: BasisKind::Bare,
                matrix: &basis.unitary * &self.matrix * basis.unitary.adjoint(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DressedBasis {
    pub params: SystemParams,
    pub labels: Vec<DressedLabel>,
    pub energies: Vec<f64>,
    /// Columns are dressed states written in the bare basis.
    pub unitary: CMatrix,
}

impl DressedBasis {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn energy(&self, label: DressedLabel) -> f64 {
        self.energies[label.index()]
    }

    /// Total excitation number of each dressed index.
    pub fn manifolds(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l.excitation()).collect()
    }

    pub fn contains(&self, label: DressedLabel) -> bool {
        label.excitation() <= self.params.n_max
    }
}

/// Closed-form dressed energy.
pub fn dressed_energy(params: &SystemParams, label: DressedLabel) -> f64 {
    match label {
        DressedLabel::Ground => -0.5 * params.omega0,
        DressedLabel::Doublet { n, s } => {
            (n as f64 - 0.5) * params.omega0 + s.sign() * params.coupling * (n as f64).sqrt()
        }
    }
}

pub fn build_dressed_basis(params: SystemParams) -> Result<DressedBasis> {
    params.validate()?;
    let d = params.dim();
    let mut labels = Vec::with_capacity(d);
    labels.push(DressedLabel::Ground);
    for n in 1..=params.n_max {
        for s in Branch::BOTH {
            labels.push(DressedLabel::Doublet { n, s });
        }
    }
    let energies = labels.iter().map(|&l| dressed_energy(&params, l)).collect();

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut unitary = CMatrix::zeros(d, d);
    unitary[(0, 0)] = C64::new(1.0, 0.0);
    for label in labels.iter().skip(1) {
        let DressedLabel::Doublet { n, s } = *label else {
            unreachable!()
        };
        let col = label.index();
        let g = BareState {
            photons: n,
            atom: Atom::Ground,
        };
        let e = BareState {
            photons: n - 1,
            atom: Atom::Excited,
        };
        unitary[(g.index(), col)] = C64::new(h, 0.0);
        unitary[(e.index(), col)] = C64::new(s.sign() * h, 0.0);
    }

    Ok(DressedBasis {
        params,
        labels,
        energies,
        unitary,
    })
}

/// JC Hamiltonian in the dressed basis (diagonal).
pub fn jc_hamiltonian(basis: &DressedBasis) -> OperatorMatrix {
    let d = basis.dim();
    let mut m = CMatrix::zeros(d, d);
    for (i, e) in basis.energies.iter().enumerate() {
        m[(i, i)] = C64::new(*e, 0.0);
    }
    OperatorMatrix {
        basis: BasisKind::Dressed,
        matrix: m,
    }
}

fn bare_states(params: &SystemParams) -> impl Iterator<Item = (usize, BareState)> {
    (0..params.dim()).map(|i| (i, BareState::from_index(i)))
}

/// Truncated bare annihilation operator `a (x) 1_atom`.
pub fn bare_annihilation(params: &SystemParams) -> OperatorMatrix {
    let d = params.dim();
    let mut m = CMatrix::zeros(d, d);
    for (col, st) in bare_states(params) {
        if st.photons == 0 {
            continue;
        }
        let lower = BareState {
            photons: st.photons - 1,
            atom: st.atom,
        };
        m[(lower.index(), col)] = C64::new((st.photons as f64).sqrt(), 0.0);
    }
    OperatorMatrix {
        basis: BasisKind::Bare,
        matrix: m,
    }
}

pub fn bare_sigma_z(params: &SystemParams) -> OperatorMatrix {
    let d = params.dim();
    let mut m = CMatrix::zeros(d, d);
    for (i, st) in bare_states(params) {
        m[(i, i)] = C64::new(if st.atom == Atom::Excited { 1.0 } else { -1.0 }, 0.0);
    }
    OperatorMatrix {
        basis: BasisKind::Bare,
        matrix: m,
    }
}

/// Atomic lowering operator `sigma_- = |g><e|` on the truncated space.
pub fn bare_sigma_minus(params: &SystemParams) -> OperatorMatrix {
    let d = params.dim();
    let mut m = CMatrix::zeros(d, d);
    for (col, st) in bare_states(params) {
        if st.atom == Atom::Excited {
            let lower = BareState {
                photons: st.photons,
                atom: Atom::Ground,
            };
            if lower.excitation() <= params.n_max {
                m[(lower.index(), col)] = C64::new(1.0, 0.0);
            }
        }
    }
    OperatorMatrix {
        basis: BasisKind::Bare,
        matrix: m,
    }
}

pub fn bare_number(params: &SystemParams) -> OperatorMatrix {
    let d = params.dim();
    let mut m = CMatrix::zeros(d, d);
    for (i, st) in bare_states(params) {
        m[(i, i)] = C64::new(st.photons as f64, 0.0);
    }
    OperatorMatrix {
        basis: BasisKind::Bare,
        matrix: m,
    }
}

/// Total excitation operator `a^dagger a + (sigma_z + 1)/2`.
pub fn excitation_operator(params: &SystemParams) -> OperatorMatrix {
    let d = params.dim();
    let mut m = CMatrix::zeros(d, d);
    for (i, st) in bare_states(params) {
        m[(i, i)] = C64::new(st.excitation() as f64, 0.0);
    }
    OperatorMatrix {
        basis: BasisKind::Bare,
        matrix: m,
    }
}

/// JC Hamiltonian assembled from bare operators on the truncated space.
pub fn bare_hamiltonian(params: &SystemParams) -> OperatorMatrix {
    // Assembled from matrix elements: the product `a sigma_+` would lose the
    // intermediate state `|n_max, e>` that lies outside the truncation.
    let d = params.dim();
    let mut m = CMatrix::zeros(d, d);
    for (i, st) in bare_states(params) {
        let sz = if st.atom == Atom::Excited { 1.0 } else { -1.0 };
        m[(i, i)] = C64::new(params.omega0 * (0.5 * sz + st.photons as f64), 0.0);
    }
    for n in 1..=params.n_max {
        let g = BareState {
            photons: n,
            atom: Atom::Ground,
        };
        let e = BareState {
            photons: n - 1,
            atom: Atom::Excited,
        };
        let x = C64::new(params.coupling * (n as f64).sqrt(), 0.0);
        m[(g.index(), e.index())] = x;
        m[(e.index(), g.index())] = x;
    }
    OperatorMatrix {
        basis: BasisKind::Bare,
        matrix: m,
    }
}

/// Cavity annihilation operator expressed in the dressed basis.
pub fn annihilation_dressed(basis: &DressedBasis) -> OperatorMatrix {
    bare_annihilation(&basis.params).to_dressed(basis)
}
