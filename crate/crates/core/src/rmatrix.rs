//! The twisted rational R-matrix `R(u) = R_ξ − (η/u)𝒫` and its structural
//! checks. Everything is built along two routes (displayed entries and the
//! twist product `F₂₁(·)F₁₂⁻¹`) so the routes can be compared.

use crate::error::{Error, Result};
use crate::tensor::{c64, embed_two_site, permutation_op, relative_difference, ComplexMatrix, ONE, ZERO};
use crate::twist::TwistParams;

#[derive(Debug, Clone)]
pub struct RMatrixFamily {
    pub params: TwistParams,
    pub fundamental_twist: ComplexMatrix,
    pub r_xi: ComplexMatrix,
}

impl RMatrixFamily {
    pub fn new(params: TwistParams) -> Self {
        Self {
            params,
            fundamental_twist: build_f12(params.xi),
            r_xi: build_r_xi(params.xi),
        }
    }

    /// `R(u)`; rejects the pole at `u = 0`.
    pub fn at(&self, u: c64) -> Result<ComplexMatrix> {
        build_r(u, &self.params)
    }
}

pub fn build_f12(xi: c64) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        [ONE, ZERO, ZERO, ZERO],
        [xi, ONE, ZERO, ZERO],
        [ZERO, ZERO, ONE, ZERO],
        [ZERO, ZERO, -xi, ONE],
    ])
}

/// `F₂₁ = 𝒫 F₁₂ 𝒫`.
pub fn build_f21(xi: c64) -> ComplexMatrix {
    let p = permutation_op();
    p.matmul(&build_f12(xi)).matmul(&p)
}

/// `R_ξ` from its displayed entries.
pub fn build_r_xi(xi: c64) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        [ONE, ZERO, ZERO, ZERO],
        [-xi, ONE, ZERO, ZERO],
        [xi, ZERO, ONE, ZERO],
        [xi * xi, -xi, xi, ONE],
    ])
}

/// `R_ξ = F₂₁ F₁₂⁻¹` computed as a product.
pub fn r_xi_from_twist(xi: c64) -> ComplexMatrix {
    let f12_inv = build_f12(xi)
        .inverse()
        .expect("F12 is unit lower-triangular");
    build_f21(xi).matmul(&f12_inv)
}

fn check_pole(u: c64, what: &str) -> Result<()> {
    if u == ZERO || !(u.re.is_finite() && u.im.is_finite()) {
        return Err(Error::Pole(format!("{what} at u = {u}")));
    }
    Ok(())
}

/// `R(u) = R_ξ − (η/u)𝒫`.
pub fn build_r(u: c64, params: &TwistParams) -> Result<ComplexMatrix> {
    check_pole(u, "R(u)")?;
    Ok(&build_r_xi(params.xi) - &permutation_op().scale(params.eta / u))
}

/// `R(u) = F₂₁ (I − (η/u)𝒫) F₁₂⁻¹`.
pub fn build_r_via_twist(u: c64, params: &TwistParams) -> Result<ComplexMatrix> {
    check_pole(u, "R(u)")?;
    let yang = &ComplexMatrix::identity(4) - &permutation_op().scale(params.eta / u);
    let f12_inv = build_f12(params.xi).inverse()?;
    Ok(build_f21(params.xi).matmul(&yang).matmul(&f12_inv))
}

/// Polynomial form `Ľ(u) = u R_ξ − η𝒫 = u R(u)`, regular at `u = 0`.
pub fn build_l_poly(u: c64, params: &TwistParams) -> ComplexMatrix {
    &build_r_xi(params.xi).scale(u) - &permutation_op().scale(params.eta)
}

/// Relative residual of `R₁₂(u−v)R₁₃(u)R₂₃(v) = R₂₃(v)R₁₃(u)R₁₂(u−v)` on
/// `(ℂ²)^{⊗3}`.
pub fn verify_ybe(u: c64, v: c64, params: &TwistParams) -> Result<f64> {
    check_pole(u - v, "R(u - v)")?;
    let r12 = embed_two_site(&build_r(u - v, params)?, 1, 2, 3)?;
    let r13 = embed_two_site(&build_r(u, params)?, 1, 3, 3)?;
    let r23 = embed_two_site(&build_r(v, params)?, 2, 3, 3)?;
    let lhs = r12.matmul(&r13).matmul(&r23);
    let rhs = r23.matmul(&r13).matmul(&r12);
    let scale = lhs.frobenius_norm();
    Ok(if scale == 0.0 { 0.0 } else { (&lhs - &rhs).frobenius_norm() / scale })
}

/// Regularity `R(0) = 𝒫` after normalization: `‖Ľ(0)/(−η) − 𝒫‖`.
pub fn verify_regularity(params: &TwistParams) -> f64 {
    let l0 = build_l_poly(ZERO, params);
    (&l0.scale(-ONE / params.eta) - &permutation_op()).frobenius_norm()
}

/// Twisted symmetrizer/antisymmetrizer `P±(ξ) = F₁₂ P±(0) F₁₂⁻¹`.
pub fn spectral_projectors(params: &TwistParams) -> (ComplexMatrix, ComplexMatrix) {
    let p = permutation_op();
    let id = ComplexMatrix::identity(4);
    let half = c64::new(0.5, 0.0);
    let plus0 = (&id + &p).scale(half);
    let minus0 = (&id - &p).scale(half);
    let f = build_f12(params.xi);
    let finv = f.inverse().expect("F12 is unit lower-triangular");
    (f.matmul(&plus0).matmul(&finv), f.matmul(&minus0).matmul(&finv))
}

/// Measures how far `R₁₂(u)R₂₁(−u)` is from a multiple of the identity.
/// Returns the best scalar and the relative deviation.
pub fn unitarity_probe(u: c64, params: &TwistParams) -> Result<(c64, f64)> {
    let p = permutation_op();
    let r12 = build_r(u, params)?;
    let r21 = p.matmul(&build_r(-u, params)?).matmul(&p);
    let prod = r12.matmul(&r21);
    let scalar = prod.trace() / 4.0;
    let dev = relative_difference(&prod, &ComplexMatrix::identity(4).scale(scalar));
    Ok((scalar, dev))
}
