//! Dense complex matrix helpers and column-stacking superoperator assembly.
//!
//! A density matrix `rho` (d x d) is vectorized by stacking columns, so
//! `vec(rho)[i + j*d] = rho[(i, j)]`. Under this convention the map
//! `rho -> A rho B^dagger` is the matrix `conj(B) (x) A`.

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C64;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
#[cfg(test)]
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub(crate) const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest absolute row sum; bounds the spectral radius.
pub fn inf_norm(m: &CMatrix) -> f64 {
    (0..m.nrows())
        .map(|r| m.row(r).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Eigenvalues of the Hermitian part `(m + m^dagger)/2`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

pub fn min_hermitian_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

pub fn vectorize(rho: &CMatrix) -> CVector {
    CVector::from_column_slice(rho.as_slice())
}

pub fn unvectorize(v: &CVector, d: usize) -> CMatrix {
    CMatrix::from_column_slice(d, d, v.as_slice())
}

/// Nonzero entries of a matrix as `(row, col, value)`.
pub(crate) fn nonzeros(m: &CMatrix) -> Vec<(usize, usize, C64)> {
    let mut out = Vec::new();
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let z = m[(r, c)];
            if z != ZERO {
                out.push((r, c, z));
            }
        }
    }
    out
}

/// `x y` for `d x d` factors given by their nonzero entries.
pub(crate) fn sparse_product(
    x: &[(usize, usize, C64)],
    y: &[(usize, usize, C64)],
    d: usize,
) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for &(r1, c1, z1) in x {
        for &(r2, c2, z2) in y {
            if c1 == r2 {
                m[(r1, c2)] += z1 * z2;
            }
        }
    }
    m
}

/// Accumulates superoperator terms into a `d^2 x d^2` matrix.
pub struct SuperOp {
    d: usize,
    matrix: CMatrix,
}

impl SuperOp {
    pub fn zeros(d: usize) -> Self {
        Self {
            d,
            matrix: CMatrix::zeros(d * d, d * d),
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i + j * self.d
    }

    /// `rho -> coef * A rho B^dagger`
    pub fn add_sandwich(&mut self, coef: C64, a: &CMatrix, b: &CMatrix) {
        if coef == ZERO {
            return;
        }
        let na = nonzeros(a);
        let nb = nonzeros(b);
        for &(ra, ca, za) in &na {
            for &(rb, cb, zb) in &nb {
                let row = self.idx(ra, rb);
                let col = self.idx(ca, cb);
                self.matrix[(row, col)] += coef * za * zb.conj();
            }
        }
    }

    /// `rho -> coef * K rho`
    pub fn add_left(&mut self, coef: C64, k: &CMatrix) {
        if coef == ZERO {
            return;
        }
        for (r, c, z) in nonzeros(k) {
            for col in 0..self.d {
                let row = self.idx(r, col);
                let src = self.idx(c, col);
                self.matrix[(row, src)] += coef * z;
            }
        }
    }

    /// `rho -> coef * rho K`
    pub fn add_right(&mut self, coef: C64, k: &CMatrix) {
        if coef == ZERO {
            return;
        }
        for (r, c, z) in nonzeros(k) {
            for row_i in 0..self.d {
                let row = self.idx(row_i, c);
                let src = self.idx(row_i, r);
                self.matrix[(row, src)] += coef * z;
            }
        }
    }

    /// `rho -> -i [H, rho]`
    pub fn add_hamiltonian(&mut self, h: &CMatrix) {
        self.add_left(-I, h);
        self.add_right(I, h);
    }

    /// `rho -> rate * (A rho A^dagger - {A^dagger A, rho}/2)`
    pub fn add_lindblad(&mut self, rate: f64, a: &CMatrix) {
        if rate == 0.0 {
            return;
        }
        let ada = a.adjoint() * a;
        self.add_sandwich(C64::new(rate, 0.0), a, a);
        self.add_left(C64::new(-0.5 * rate, 0.0), &ada);
        self.add_right(C64::new(-0.5 * rate, 0.0), &ada);
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

/// Applies a superoperator matrix to a `d x d` operator.
pub fn apply_superop(l: &CMatrix, rho: &CMatrix) -> CMatrix {
    let d = rho.nrows();
    unvectorize(&(l * vectorize(rho)), d)
}

/// Expresses a superoperator given on `vec(rho_old)` in a new basis where
/// `rho_old = U rho_new U^dagger`.
pub fn transform_superop(l: &CMatrix, u: &CMatrix) -> CMatrix {
    // S = conj(U) (x) U has few nonzeros per column for the basis changes
    // used here, so both products run over the sparse factor.
    let s = u.conjugate().kronecker(u);
    let cols: Vec<Vec<(usize, C64)>> = (0..s.ncols())
        .map(|c| {
            (0..s.nrows())
                .filter(|&r| s[(r, c)] != ZERO)
                .map(|r| (r, s[(r, c)]))
                .collect()
        })
        .collect();
    let n = l.nrows();
    // t = L S
    let mut t = CMatrix::zeros(n, n);
    for (c, entries) in cols.iter().enumerate() {
        for &(k, z) in entries {
            for r in 0..n {
                t[(r, c)] += l[(r, k)] * z;
            }
        }
    }
    // S^dagger t
    let mut out = CMatrix::zeros(n, n);
    for (r, entries) in cols.iter().enumerate() {
        for c in 0..n {
            let mut acc = ZERO;
            for &(k, z) in entries {
                acc += z.conj() * t[(k, c)];
            }
            out[(r, c)] = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(d: usize, seed: u64) -> CMatrix {
        let mut state = seed;
        CMatrix::from_fn(d, d, |_, _| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5;
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5;
            C64::new(a, b)
        })
    }

    #[test]
    fn sandwich_matches_kronecker_convention() {
        let d = 3;
        let a = sample(d, 1);
        let b = sample(d, 2);
        let rho = sample(d, 3);
        let mut s = SuperOp::zeros(d);
        s.add_sandwich(ONE, &a, &b);
        let got = apply_superop(&s.into_matrix(), &rho);
        let want = &a * &rho * b.adjoint();
        assert!(frobenius_norm(&(got - want)) < 1e-13);

        let kron = b.conjugate().kronecker(&a);
        let got = apply_superop(&kron, &rho);
        let want = &a * &rho * b.adjoint();
        assert!(frobenius_norm(&(got - want)) < 1e-13);
    }

    #[test]
    fn left_and_right_products() {
        let d = 4;
        let k = sample(d, 7);
        let rho = sample(d, 8);
        let mut s = SuperOp::zeros(d);
        s.add_left(C64::new(0.3, -0.2), &k);
        s.add_right(C64::new(-1.1, 0.5), &k);
        let got = apply_superop(&s.into_matrix(), &rho);
        let want = &k * &rho * C64::new(0.3, -0.2) + &rho * &k * C64::new(-1.1, 0.5);
        assert!(frobenius_norm(&(got - want)) < 1e-13);
    }

    #[test]
    fn basis_change_of_superoperator() {
        let d = 3;
        let a = sample(d, 11);
        // unitary from the QR factor of a random matrix
        let u = sample(d, 12).qr().q();
        let rho_new = sample(d, 13);
        let mut s = SuperOp::zeros(d);
        s.add_left(ONE, &a);
        let l_old = s.into_matrix();
        let l_new = transform_superop(&l_old, &u);
        let rho_old = &u * &rho_new * u.adjoint();
        let via_old = u.adjoint() * apply_superop(&l_old, &rho_old) * &u;
        let via_new = apply_superop(&l_new, &rho_new);
        assert!(frobenius_norm(&(via_old - via_new)) < 1e-12);
    }

    #[test]
    fn hermitian_eigenvalues_sorted() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![
            C64::new(2.0, 0.0),
            C64::new(-1.0, 0.0),
            C64::new(0.5, 0.0),
        ]));
        assert_eq!(hermitian_eigenvalues(&m), vec![-1.0, 0.5, 2.0]);
    }
}
