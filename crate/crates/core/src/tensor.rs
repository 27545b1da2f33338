//! Dense complex matrices on tensor-product spaces of spin-½ sites.
//!
//! Basis conventions used throughout the crate:
//!
//! * single site: `|0⟩ = (1, 0)ᵀ` is spin up, `|1⟩ = (0, 1)ᵀ` is spin down, so
//!   `σ⁻ = ½(σˣ − iσʸ)` maps up to down and annihilates down;
//! * tensor factor 1 is the leftmost Kronecker factor, i.e. the most
//!   significant bit of a basis index.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

#[allow(non_camel_case_types)]
pub type c64 = Complex64;

pub const ZERO: c64 = c64::new(0.0, 0.0);
pub const ONE: c64 = c64::new(1.0, 0.0);
pub const I: c64 = c64::new(0.0, 1.0);

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<c64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<c64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty shape {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for shape {rows}x{cols}",
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[c64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    /// Square or rectangular matrix from nested rows. Panics on ragged input,
    /// so only meant for literals.
    pub fn from_rows<R: AsRef<[c64]>>(rows: &[R]) -> Self {
        let cols = rows[0].as_ref().len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged matrix literal");
            data.extend_from_slice(r.as_ref());
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let converted: Vec<Vec<c64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| c64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&converted)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> c64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: c64) {
        self.data[i * self.cols + j] = z;
    }

    pub fn as_slice(&self) -> &[c64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[c64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn scale(&self, z: c64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * z).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn trace(&self) -> c64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul shape mismatch {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        let n = rhs.cols;
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[c64]) -> Vec<c64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self·rhs − rhs·self`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    pub fn pow(&self, k: u32) -> Self {
        assert!(self.is_square());
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = out.matmul(self);
        }
        out
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "inverse of non-square {}x{}",
                self.rows, self.cols
            )));
        }
        let lu = self.to_nalgebra().lu();
        let inv = lu
            .try_inverse()
            .ok_or_else(|| Error::Singular("LU inverse failed".into()))?;
        let out = Self::from_nalgebra(&inv);
        if out.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Singular("inverse has non-finite entries".into()));
        }
        Ok(out)
    }

    pub fn determinant(&self) -> c64 {
        assert!(self.is_square());
        self.to_nalgebra().determinant()
    }

    pub fn to_nalgebra(&self) -> DMatrix<c64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<c64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    /// Principal submatrix on the given row/column index set.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), idx.len(), |i, j| self.get(idx[i], idx[j]))
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let cells: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                .collect();
            writeln!(f, "  {}", cells.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Mul<c64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, z: c64) -> ComplexMatrix {
        self.scale(z)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(-ONE)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a.get(i, j);
            if aij == ZERO {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out.data[(i * b.rows + k) * cols + j * b.cols + l] = aij * b.get(k, l);
                }
            }
        }
    }
    out
}

pub fn kron_all(factors: &[ComplexMatrix]) -> ComplexMatrix {
    let mut it = factors.iter();
    let first = it.next().expect("kron_all needs at least one factor").clone();
    it.fold(first, |acc, f| kron(&acc, f))
}

pub fn kron_vec(a: &[c64], b: &[c64]) -> Vec<c64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

fn check_site(site: usize, n_sites: usize) -> Result<()> {
    if site == 0 || site > n_sites {
        return Err(Error::SiteOutOfRange { site, n_sites });
    }
    Ok(())
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` (2×2) at 1-based tensor factor `site`.
pub fn embed_at_site(op: &ComplexMatrix, site: usize, n_sites: usize) -> Result<ComplexMatrix> {
    check_site(site, n_sites)?;
    if op.rows != 2 || op.cols != 2 {
        return Err(Error::Dimension(format!(
            "site operator must be 2x2, got {}x{}",
            op.rows, op.cols
        )));
    }
    let left = ComplexMatrix::identity(1 << (site - 1));
    let right = ComplexMatrix::identity(1 << (n_sites - site));
    Ok(kron(&kron(&left, op), &right))
}

/// Computes `embed_at_site(op, site, n_sites) · m` without forming the
/// embedded operator.
pub fn left_mul_site(
    op: &ComplexMatrix,
    site: usize,
    n_sites: usize,
    m: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    check_site(site, n_sites)?;
    let dim = 1usize << n_sites;
    if m.rows != dim {
        return Err(Error::Dimension(format!(
            "operand has {} rows, expected {dim}",
            m.rows
        )));
    }
    let bit = 1usize << (n_sites - site);
    let [o00, o01, o10, o11] = [op.get(0, 0), op.get(0, 1), op.get(1, 0), op.get(1, 1)];
    let cols = m.cols;
    let mut out = ComplexMatrix::zeros(dim, cols);
    for r0 in (0..dim).filter(|r| r & bit == 0) {
        let r1 = r0 | bit;
        let (src0, src1) = (&m.data[r0 * cols..(r0 + 1) * cols], &m.data[r1 * cols..(r1 + 1) * cols]);
        for c in 0..cols {
            let (x0, x1) = (src0[c], src1[c]);
            out.data[r0 * cols + c] = o00 * x0 + o01 * x1;
            out.data[r1 * cols + c] = o10 * x0 + o11 * x1;
        }
    }
    Ok(out)
}

/// Operator of a two-site gate (4×4, ordered `site_a ⊗ site_b`) embedded into
/// an `n_sites` chain. The sites need not be adjacent or ordered.
pub fn embed_two_site(
    op: &ComplexMatrix,
    site_a: usize,
    site_b: usize,
    n_sites: usize,
) -> Result<ComplexMatrix> {
    check_site(site_a, n_sites)?;
    check_site(site_b, n_sites)?;
    if site_a == site_b {
        return Err(Error::InvalidParameter("two-site operator on a single site".into()));
    }
    if op.rows != 4 || op.cols != 4 {
        return Err(Error::Dimension("two-site operator must be 4x4".into()));
    }
    let dim = 1usize << n_sites;
    let ba = 1usize << (n_sites - site_a);
    let bb = 1usize << (n_sites - site_b);
    let local = |s: usize| ((s & ba != 0) as usize) * 2 + (s & bb != 0) as usize;
    Ok(ComplexMatrix::from_fn(dim, dim, |i, j| {
        let rest_mask = !(ba | bb);
        if i & rest_mask != j & rest_mask {
            ZERO
        } else {
            op.get(local(i), local(j))
        }
    }))
}

/// Permutation `𝒫(x ⊗ y) = y ⊗ x` on ℂ² ⊗ ℂ².
pub fn permutation_op() -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            // 𝒫 = Σ e_ij ⊗ e_ji
            p.set(2 * i + j, 2 * j + i, ONE);
        }
    }
    p
}

/// Matrix unit `e_ij` of size `n`.
pub fn unit(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    m.set(i, j, ONE);
    m
}

pub mod pauli {
    use super::{c64, ComplexMatrix, I, ONE, ZERO};

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[[ZERO, -I], [I, ZERO]])
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[[ONE, ZERO], [ZERO, -ONE]])
    }

    /// `σ⁻ = ½(σˣ − iσʸ) = |↓⟩⟨↑|`.
    pub fn minus() -> ComplexMatrix {
        (&x() - &y().scale(I)).scale(c64::new(0.5, 0.0))
    }

    /// `σ⁺ = |↑⟩⟨↓|`.
    pub fn plus() -> ComplexMatrix {
        (&x() + &y().scale(I)).scale(c64::new(0.5, 0.0))
    }
}

pub fn spin_up() -> Vec<c64> {
    vec![ONE, ZERO]
}

pub fn spin_down() -> Vec<c64> {
    vec![ZERO, ONE]
}

/// `⊗_k |↓⟩`, the reference state of the chain.
pub fn all_down(n_sites: usize) -> Vec<c64> {
    let mut v = vec![ZERO; 1 << n_sites];
    *v.last_mut().unwrap() = ONE;
    v
}

pub fn vec_norm(v: &[c64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_sub(a: &[c64], b: &[c64]) -> Vec<c64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_axpy(alpha: c64, x: &[c64], y: &[c64]) -> Vec<c64> {
    x.iter().zip(y).map(|(a, b)| alpha * a + b).collect()
}

pub fn vec_scale(alpha: c64, x: &[c64]) -> Vec<c64> {
    x.iter().map(|a| alpha * a).collect()
}

/// `‖lhs − rhs‖ / max(‖lhs‖, ‖rhs‖)`, zero when both sides vanish.
pub fn relative_difference(lhs: &ComplexMatrix, rhs: &ComplexMatrix) -> f64 {
    let scale = lhs.frobenius_norm().max(rhs.frobenius_norm());
    if scale == 0.0 {
        return 0.0;
    }
    (lhs - rhs).frobenius_norm() / scale
}

pub fn relative_vec_difference(lhs: &[c64], rhs: &[c64]) -> f64 {
    let scale = vec_norm(lhs).max(vec_norm(rhs));
    if scale == 0.0 {
        return 0.0;
    }
    vec_norm(&vec_sub(lhs, rhs)) / scale
}

/// Total number of down spins for each basis index of an `n_sites` chain.
pub fn down_count(index: usize) -> u32 {
    index.count_ones()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cr(x: f64) -> c64 {
        c64::new(x, 0.0)
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_block_layout_matches_hand_expansion() {
        let a = ComplexMatrix::from_rows(&[[cr(1.0), c64::new(0.0, 2.0)], [cr(-3.0), cr(0.5)]]);
        let b = ComplexMatrix::from_rows(&[[cr(2.0), cr(-1.0)], [c64::new(1.0, 1.0), cr(4.0)]]);
        let k = kron(&a, &b);
        // hand-expanded 4x4: rows (i,k), cols (j,l) -> a_ij b_kl
        let expected = ComplexMatrix::from_rows(&[
            [cr(2.0), cr(-1.0), c64::new(0.0, 4.0), c64::new(0.0, -2.0)],
            [c64::new(1.0, 1.0), cr(4.0), c64::new(-2.0, 2.0), c64::new(0.0, 8.0)],
            [cr(-6.0), cr(3.0), cr(1.0), cr(-0.5)],
            [c64::new(-3.0, -3.0), cr(-12.0), c64::new(0.5, 0.5), cr(2.0)],
        ]);
        assert_eq!(k, expected);
    }

    #[test]
    fn double_lowering_reaches_all_down() {
        let sm = pauli::minus();
        let up_up = kron_vec(&spin_up(), &spin_up());
        assert_eq!(kron(&sm, &sm).apply(&up_up), all_down(2));
        let prod = embed_at_site(&sm, 1, 2).unwrap().matmul(&embed_at_site(&sm, 2, 2).unwrap());
        assert_eq!(prod.apply(&up_up), all_down(2));
    }

    #[test]
    fn embed_single_site_and_sign() {
        assert_eq!(embed_at_site(&pauli::z(), 1, 1).unwrap(), pauli::z());
        let up_down = kron_vec(&spin_up(), &spin_down());
        let out = embed_at_site(&pauli::z(), 2, 2).unwrap().apply(&up_down);
        assert_eq!(out, vec_scale(-ONE, &up_down));
    }

    #[test]
    fn embed_rejects_bad_site() {
        assert!(matches!(
            embed_at_site(&pauli::z(), 0, 3),
            Err(Error::SiteOutOfRange { .. })
        ));
        assert!(matches!(
            embed_at_site(&pauli::z(), 4, 3),
            Err(Error::SiteOutOfRange { .. })
        ));
    }

    #[test]
    fn left_mul_site_matches_embedding() {
        let op = ComplexMatrix::from_rows(&[[cr(0.3), c64::new(1.0, -2.0)], [cr(-1.5), c64::new(0.0, 0.7)]]);
        let m = ComplexMatrix::from_fn(8, 8, |i, j| c64::new((i * 3 + j) as f64 * 0.1, (i as f64) - (j as f64)));
        for site in 1..=3 {
            let direct = embed_at_site(&op, site, 3).unwrap().matmul(&m);
            let fast = left_mul_site(&op, site, 3, &m).unwrap();
            assert!(relative_difference(&direct, &fast) < 1e-15);
        }
    }

    #[test]
    fn permutation_properties() {
        let p = permutation_op();
        let up_down = kron_vec(&spin_up(), &spin_down());
        let down_up = kron_vec(&spin_down(), &spin_up());
        assert_eq!(p.apply(&up_down), down_up);
        assert_eq!(p.matmul(&p), ComplexMatrix::identity(4));
        assert_eq!(p.trace(), cr(2.0));
        let mut sum = ComplexMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                sum += &kron(&unit(2, i, j), &unit(2, j, i));
            }
        }
        assert_eq!(sum, p);
    }

    #[test]
    fn embed_two_site_matches_kron_for_adjacent_pair() {
        let p = permutation_op();
        let direct = kron(&p, &ComplexMatrix::identity(2));
        assert_eq!(embed_two_site(&p, 1, 2, 3).unwrap(), direct);
        // reversed order of a non-symmetric gate equals conjugation by swap
        let g = kron(&pauli::minus(), &pauli::z());
        let rev = embed_two_site(&g, 2, 1, 2).unwrap();
        assert_eq!(rev, kron(&pauli::z(), &pauli::minus()));
    }

    #[test]
    fn new_rejects_bad_input() {
        assert!(ComplexMatrix::new(2, 2, vec![ONE; 3]).is_err());
        assert!(matches!(
            ComplexMatrix::new(1, 2, vec![ONE, c64::new(f64::NAN, 0.0)]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
    }

    #[test]
    fn sigma_minus_annihilates_down() {
        assert_eq!(pauli::minus().apply(&spin_down()), vec![ZERO, ZERO]);
        assert_eq!(pauli::minus().apply(&spin_up()), spin_down());
    }
}
