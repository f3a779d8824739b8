//! Dressed-state jump operators and Bohr-frequency arithmetic.
//!
//! `A_{0m} = (1/sqrt 2) |E0><E_{1,m}|` with frequency `omega0 + m Omega`, and
//! for `N >= 1`
//! `A_{Nlm} = (sqrt(N+1) + l m sqrt(N))/2 |E_{N,m}><E_{N+1,l}|` with frequency
//! `omega0 + (l sqrt(N+1) - m sqrt(N)) Omega`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{JcError, Result};
use crate::hilbert::{BasisKind, Branch, DressedBasis, DressedLabel, OperatorMatrix, SystemParams};
use crate::linalg::{CMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum JumpLabel {
    /// `E_{1,m} -> E0`
    Ground { m: Branch },
    /// `E_{N+1,l} -> E_{N,m}`
    Excited { n: usize, l: Branch, m: Branch },
}

impl JumpLabel {
    /// Dressed state the jump starts from.
    pub fn upper(&self) -> DressedLabel {
        match *self {
            JumpLabel::Ground { m } => DressedLabel::Doublet { n: 1, s: m },
            JumpLabel::Excited { n, l, .. } => DressedLabel::Doublet { n: n + 1, s: l },
        }
    }

    /// Dressed state the jump ends in.
    pub fn lower(&self) -> DressedLabel {
        match *self {
            JumpLabel::Ground { .. } => DressedLabel::Ground,
            JumpLabel::Excited { n, m, .. } => DressedLabel::Doublet { n, s: m },
        }
    }

    pub fn coefficient(&self) -> f64 {
        match *self {
            JumpLabel::Ground { .. } => std::f64::consts::FRAC_1_SQRT_2,
            JumpLabel::Excited { n, l, m } => {
                let n = n as f64;
                0.5 * ((n + 1.0).sqrt() + l.sign() * m.sign() * n.sqrt())
            }
        }
    }

    pub fn fits(&self, n_max: usize) -> bool {
        self.upper().excitation() <= n_max
    }
}

impl fmt::Display for JumpLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = |b: Branch| if b == Branch::Plus { '+' } else { '-' };
        match *self {
            JumpLabel::Ground { m } => write!(f, "A0{}", sym(m)),
            JumpLabel::Excited { n, l, m } => write!(f, "A{n}{}{}", sym(l), sym(m)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BohrFrequency {
    pub value: f64,
    pub label: JumpLabel,
}

/// All jump labels whose two manifolds are retained, in a fixed order:
/// `A0-, A0+`, then for each `N` the `(l, m)` pairs `--, -+, +-, ++`.
pub fn enumerate_jumps(params: &SystemParams) -> Vec<JumpLabel> {
    let mut out = Vec::with_capacity(2 + 4 * params.n_max.saturating_sub(1));
    for m in Branch::BOTH {
        out.push(JumpLabel::Ground { m });
    }
    for n in 1..params.n_max {
        for l in Branch::BOTH {
            for m in Branch::BOTH {
                out.push(JumpLabel::Excited { n, l, m });
            }
        }
    }
    out
}

/// Jump operator as a dressed-basis matrix with a single nonzero entry.
pub fn jump_operator(label: JumpLabel, basis: &DressedBasis) -> Result<OperatorMatrix> {
    if !label.fits(basis.params.n_max) {
        return Err(JcError::LabelOutsideTruncation {
            label,
            n_max: basis.params.n_max,
        });
    }
    let d = basis.dim();
    let mut m = CMatrix::zeros(d, d);
    m[(label.lower().index(), label.upper().index())] = C64::new(label.coefficient(), 0.0);
    Ok(OperatorMatrix {
        basis: BasisKind::Dressed,
        matrix: m,
    })
}

/// Closed-form Bohr frequency of a jump.
pub fn bohr_frequency(label: JumpLabel, params: &SystemParams) -> BohrFrequency {
    let value = match label {
        JumpLabel::Ground { m } => params.omega0 + m.sign() * params.coupling,
        JumpLabel::Excited { n, l, m } => {
            let n = n as f64;
            params.omega0 + (l.sign() * (n + 1.0).sqrt() - m.sign() * n.sqrt()) * params.coupling
        }
    };
    BohrFrequency { value, label }
}

/// `omega0`-free part of a Bohr frequency, in units of `Omega`.
fn rabi_offset(label: JumpLabel) -> f64 {
    match label {
        JumpLabel::Ground { m } => m.sign(),
        JumpLabel::Excited { n, l, m } => {
            let n = n as f64;
            l.sign() * (n + 1.0).sqrt() - m.sign() * n.sqrt()
        }
    }
}

/// `omega_a - omega_b`; the `omega0` parts cancel exactly.
pub fn frequency_difference(a: JumpLabel, b: JumpLabel, params: &SystemParams) -> f64 {
    (rabi_offset(a) - rabi_offset(b)) * params.coupling
}

pub fn frequency_sum(a: JumpLabel, b: JumpLabel, params: &SystemParams) -> f64 {
    2.0 * params.omega0 + (rabi_offset(a) + rabi_offset(b)) * params.coupling
}

/// Extremes of the slow (difference) and fast (sum) frequencies over all
/// retained label pairs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimescaleSeparation {
    pub max_abs_difference: f64,
    pub min_sum: f64,
    /// `min_sum / max_abs_difference`.
    pub ratio: f64,
}

pub fn timescale_separation(params: &SystemParams) -> TimescaleSeparation {
    let labels = enumerate_jumps(params);
    let mut max_diff = 0.0f64;
    let mut min_sum = f64::INFINITY;
    for &a in &labels {
        for &b in &labels {
            max_diff = max_diff.max(frequency_difference(a, b, params).abs());
            min_sum = min_sum.min(frequency_sum(a, b, params));
        }
    }
    TimescaleSeparation {
        max_abs_difference: max_diff,
        min_sum,
        ratio: min_sum / max_diff,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{annihilation_dressed, build_dressed_basis};
    use crate::linalg::max_abs;
    use approx::assert_abs_diff_eq;
    use std::collections::HashSet;

    fn params(n_max: usize) -> SystemParams {
        SystemParams::new(1.0, 0.1, n_max).unwrap()
    }

    /// Independent enumeration: every pair of dressed states one manifold
    /// apart defines one jump.
    fn count_by_state_pairs(n_max: usize) -> usize {
        let mut count = 0;
        for upper in 1..=n_max {
            let lower_states = if upper == 1 { 1 } else { 2 };
            count += 2 * lower_states;
        }
        count
    }

    #[test]
    fn label_counts() {
        assert_eq!(enumerate_jumps(&params(1)).len(), 2);
        for n in 1..=8 {
            let labels = enumerate_jumps(&params(n));
            assert_eq!(labels.len(), count_by_state_pairs(n));
            let uniq: HashSet<_> = labels.iter().collect();
            assert_eq!(uniq.len(), labels.len());
        }
        assert_eq!(enumerate_jumps(&params(2)).len(), 6);
        assert_eq!(enumerate_jumps(&params(4)).len(), 14);
    }

    #[test]
    fn jump_coefficients() {
        let b = build_dressed_basis(params(2)).unwrap();
        let s2 = 2f64.sqrt();
        let a0p = jump_operator(JumpLabel::Ground { m: Branch::Plus }, &b).unwrap();
        assert_abs_diff_eq!(a0p.matrix[(0, 2)].re, 1.0 / s2, epsilon = 1e-15);
        let pm = JumpLabel::Excited {
            n: 1,
            l: Branch::Plus,
            m: Branch::Minus,
        };
        assert_abs_diff_eq!(pm.coefficient(), (s2 - 1.0) / 2.0, epsilon = 1e-15);
        let pp = JumpLabel::Excited {
            n: 1,
            l: Branch::Plus,
            m: Branch::Plus,
        };
        assert_abs_diff_eq!(pp.coefficient(), (s2 + 1.0) / 2.0, epsilon = 1e-15);
        let m = jump_operator(pp, &b).unwrap().matrix;
        // |E_{1,+}><E_{2,+}|
        assert_abs_diff_eq!(m[(2, 4)].re, (s2 + 1.0) / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn jump_outside_truncation_is_rejected() {
        let b = build_dressed_basis(params(2)).unwrap();
        let label = JumpLabel::Excited {
            n: 2,
            l: Branch::Plus,
            m: Branch::Plus,
        };
        let err = jump_operator(label, &b).unwrap_err();
        assert!(err.to_string().contains("A2++"), "{err}");
    }

    #[test]
    fn each_jump_is_single_entry_between_adjacent_manifolds() {
        let b = build_dressed_basis(params(5)).unwrap();
        let man = b.manifolds();
        for label in enumerate_jumps(&b.params) {
            let m = jump_operator(label, &b).unwrap().matrix;
            let nz: Vec<_> = (0..b.dim())
                .flat_map(|r| (0..b.dim()).map(move |c| (r, c)))
                .filter(|&(r, c)| m[(r, c)].norm() > 0.0)
                .collect();
            assert_eq!(nz.len(), 1);
            let (r, c) = nz[0];
            assert_eq!(man[c], man[r] + 1);
        }
    }

    #[test]
    fn jumps_sum_to_annihilation() {
        for n in 1..=8 {
            let b = build_dressed_basis(params(n)).unwrap();
            let mut sum = CMatrix::zeros(b.dim(), b.dim());
            for label in enumerate_jumps(&b.params) {
                sum += jump_operator(label, &b).unwrap().matrix;
            }
            let a = annihilation_dressed(&b).matrix;
            assert!(max_abs(&(sum - a)) < 1e-14);
        }
    }

    #[test]
    fn bohr_frequencies_closed_form() {
        let p = params(3);
        let s2 = 2f64.sqrt();
        let f = |l| bohr_frequency(l, &p).value;
        assert_abs_diff_eq!(f(JumpLabel::Ground { m: Branch::Plus }), 1.1, epsilon = 1e-15);
        assert_abs_diff_eq!(f(JumpLabel::Ground { m: Branch::Minus }), 0.9, epsilon = 1e-15);
        let pp = JumpLabel::Excited {
            n: 1,
            l: Branch::Plus,
            m: Branch::Plus,
        };
        assert_abs_diff_eq!(f(pp), 1.0 + (s2 - 1.0) * 0.1, epsilon = 1e-15);
        let mp = JumpLabel::Excited {
            n: 1,
            l: Branch::Minus,
            m: Branch::Plus,
        };
        assert_abs_diff_eq!(f(mp), 1.0 - (s2 + 1.0) * 0.1, epsilon = 1e-15);
    }

    #[test]
    fn bohr_frequency_matches_energy_difference() {
        let b = build_dressed_basis(params(6)).unwrap();
        for label in enumerate_jumps(&b.params) {
            let direct = b.energy(label.upper()) - b.energy(label.lower());
            assert_abs_diff_eq!(bohr_frequency(label, &b.params).value, direct, epsilon = 1e-12);
            assert!(direct > 0.0);
        }
    }

    #[test]
    fn differences_and_sums() {
        let p = params(3);
        let gp = JumpLabel::Ground { m: Branch::Plus };
        let gm = JumpLabel::Ground { m: Branch::Minus };
        let pp = JumpLabel::Excited {
            n: 1,
            l: Branch::Plus,
            m: Branch::Plus,
        };
        assert_eq!(frequency_difference(pp, pp, &p), 0.0);
        assert_abs_diff_eq!(frequency_difference(gp, gm, &p), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(
            frequency_difference(pp, gp, &p),
            bohr_frequency(pp, &p).value - bohr_frequency(gp, &p).value,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            frequency_difference(pp, gp, &p),
            (2f64.sqrt() - 2.0) * 0.1,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(frequency_sum(gp, gm, &p), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(frequency_sum(gp, gp, &p), 2.2, epsilon = 1e-15);
    }

    #[test]
    fn timescale_bounds_hold() {
        for n in 1..=8 {
            let p = SystemParams::new(5.0, 0.3, n).unwrap();
            let bound = 2.0 * (((n + 1) as f64).sqrt() + (n as f64).sqrt()) * p.coupling;
            let sep = timescale_separation(&p);
            assert!(sep.max_abs_difference <= bound + 1e-12);
            assert!(sep.min_sum >= 2.0 * p.omega0 - bound - 1e-12);
            assert!(sep.min_sum > 0.0);
            assert!(sep.ratio > 1.0);
        }
    }
}
