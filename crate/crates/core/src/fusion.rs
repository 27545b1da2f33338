//! Fused transfer matrices with spin-`l/2` auxiliary space and the fusion
//! functional relation.
//!
//! The level-`l` auxiliary space is `(ℂ²)^{⊗l}` carrying
//! `X = T_{a₁}(u) T_{a₂}(u−η) ⋯ T_{a_l}(u−(l−1)η)` (rational monodromies).
//! `X` leaves the image of the twisted symmetrizer `Π_l = F Sym_l F⁻¹`
//! invariant, and `t_l(u) = tr(Π_l X)`.

use serde::Serialize;

use crate::chain::{build_monodromy, transfer_matrix, ChainSpec, MonodromyBlocks};
use crate::error::{Error, Result};
use crate::tensor::{c64, relative_difference, ComplexMatrix, ONE, ZERO};
use crate::twist::{fundamental_multi_twist, symmetrizer, TwistParams};

pub const MAX_LEVEL: usize = 3;

fn check_level(level: usize) -> Result<()> {
    if level > MAX_LEVEL {
        return Err(Error::InvalidParameter(format!("fusion level {level} outside 0..={MAX_LEVEL}")));
    }
    Ok(())
}

/// `Π_l = F^{(l)} Sym_l (F^{(l)})⁻¹` on `(ℂ²)^{⊗l}`.
pub fn fusion_projector(level: usize, xi: c64) -> Result<ComplexMatrix> {
    check_level(level)?;
    if level == 0 {
        return Ok(ComplexMatrix::identity(1));
    }
    let f = fundamental_multi_twist(level, xi);
    Ok(f.matmul(&symmetrizer(level)).matmul(&f.inverse()?))
}

/// Auxiliary matrix elements `X_{a,b}`, flattened as `a·2^l + b`.
fn fused_entries(spec: &ChainSpec, level: usize, u: c64) -> Result<Vec<ComplexMatrix>> {
    let eta = spec.params.eta;
    let monos: Vec<MonodromyBlocks> = (0..level)
        .map(|j| build_monodromy(spec, u - eta * j as f64))
        .collect::<Result<_>>()?;
    let aux = 1usize << level;
    let bit = |x: usize, k: usize| (x >> (level - 1 - k)) & 1;
    let mut out = Vec::with_capacity(aux * aux);
    for a in 0..aux {
        for b in 0..aux {
            let mut acc = monos[0].entry(bit(a, 0), bit(b, 0)).clone();
            for (k, m) in monos.iter().enumerate().skip(1) {
                acc = acc.matmul(m.entry(bit(a, k), bit(b, k)));
            }
            out.push(acc);
        }
    }
    Ok(out)
}

/// `tr(M X)` for an auxiliary matrix `M`.
fn aux_trace(m: &ComplexMatrix, entries: &[ComplexMatrix], aux: usize, dim: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dim, dim);
    for a in 0..aux {
        for b in 0..aux {
            let w = m.get(b, a);
            if w != ZERO {
                out += &entries[a * aux + b].scale(w);
            }
        }
    }
    out
}

/// Unnormalized fused transfer matrix `tr(Π_l X)`; level 0 is the identity.
pub fn fused_transfer_natural(spec: &ChainSpec, level: usize, u: c64) -> Result<ComplexMatrix> {
    check_level(level)?;
    match level {
        0 => Ok(ComplexMatrix::identity(spec.dim())),
        1 => transfer_matrix(spec, u),
        _ => {
            let entries = fused_entries(spec, level, u)?;
            let proj = fusion_projector(level, spec.params.xi)?;
            Ok(aux_trace(&proj, &entries, 1 << level, spec.dim()))
        }
    }
}

/// `tr((1 − Π_l) X)`; at level 2 this is the quantum determinant.
pub fn complementary_trace(spec: &ChainSpec, level: usize, u: c64) -> Result<ComplexMatrix> {
    check_level(level)?;
    let aux = 1usize << level;
    let entries = fused_entries(spec, level, u)?;
    let comp = &ComplexMatrix::identity(aux) - &fusion_projector(level, spec.params.xi)?;
    Ok(aux_trace(&comp, &entries, aux, spec.dim()))
}

/// `‖(1 − Π) X Π‖ / ‖X‖` on the full auxiliary ⊗ quantum space; zero when the
/// projected subspace is invariant.
pub fn projector_leakage(spec: &ChainSpec, level: usize, u: c64) -> Result<f64> {
    check_level(level)?;
    if level < 2 {
        return Ok(0.0);
    }
    let aux = 1usize << level;
    let entries = fused_entries(spec, level, u)?;
    let dim = spec.dim();
    let full = ComplexMatrix::from_fn(aux * dim, aux * dim, |r, c| {
        entries[(r / dim) * aux + c / dim].get(r % dim, c % dim)
    });
    let p = crate::tensor::kron(&fusion_projector(level, spec.params.xi)?, &ComplexMatrix::identity(dim));
    let q = &ComplexMatrix::identity(aux * dim) - &p;
    let leak = q.matmul(&full).matmul(&p);
    let scale = full.frobenius_norm();
    Ok(if scale == 0.0 { 0.0 } else { leak.frobenius_norm() / scale })
}

/// Rational quantum determinant `((u−2η)/(u−η))^N`.
pub fn quantum_determinant(spec: &ChainSpec, u: c64) -> c64 {
    let eta = spec.params.eta;
    ((u - eta * 2.0) / (u - eta)).powu(spec.n_sites as u32)
}

/// Level-0 scalar `−q(u)/(u−η)^N`, with `q` the quantum determinant.
pub fn level0_scalar(spec: &ChainSpec, u: c64) -> c64 {
    let eta = spec.params.eta;
    -quantum_determinant(spec, u) / (u - eta).powu(spec.n_sites as u32)
}

/// Per-site level-3 factor `κ(u)`, fitted on the undeformed one-site chain
/// so that `κ t₃ = t₂(u)t₁(u−η) + (u−η)t₁(u)`.
pub fn level3_site_factor(eta: c64, u: c64) -> Result<c64> {
    Ok(calibrate(eta, u)?.level3_site_factor)
}

/// Normalized fused transfer matrix. Level 1 is the chain transfer matrix,
/// level 2 is `tr(Π₂X)`, level 3 is `κ(u)^N tr(Π₃X)` and level 0 is
/// [`level0_scalar`] times the identity.
pub fn fused_transfer(spec: &ChainSpec, level: usize, u: c64) -> Result<ComplexMatrix> {
    check_level(level)?;
    if u == ZERO {
        return Err(Error::Pole("fused transfer at u = 0".into()));
    }
    match level {
        0 => Ok(ComplexMatrix::identity(spec.dim()).scale(level0_scalar(spec, u))),
        3 => {
            let k = level3_site_factor(spec.params.eta, u)?;
            Ok(fused_transfer_natural(spec, 3, u)?.scale(k.powu(spec.n_sites as u32)))
        }
        l => fused_transfer_natural(spec, l, u),
    }
}

fn relation_sides(spec: &ChainSpec, level: usize, u: c64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if level == 0 || level + 1 > MAX_LEVEL {
        return Err(Error::InvalidParameter(format!("relation needs 1 ≤ l ≤ {}", MAX_LEVEL - 1)));
    }
    let eta = spec.params.eta;
    let lhs = fused_transfer(spec, level + 1, u)?;
    let rhs = &fused_transfer(spec, level, u)?.matmul(&fused_transfer(spec, 1, u - eta)?)
        + &fused_transfer(spec, level - 1, u)?.scale((u - eta).powu(spec.n_sites as u32));
    Ok((lhs, rhs))
}

/// `t_{l+1}(u) − t_l(u)t_1(u−η) − (u−η)^N t_{l−1}(u)`, relative to
/// `‖t_{l+1}(u)‖`.
pub fn verify_fusion_relation(spec: &ChainSpec, level: usize, u: c64) -> Result<f64> {
    let (lhs, rhs) = relation_sides(spec, level, u)?;
    Ok(relative_difference(&lhs, &rhs))
}

/// Smallest relative residual of `c·t_{l+1}(u) = t_l(u)t_1(u−η) + (u−η)^N t_{l−1}(u)`
/// over all complex scalars `c`. Large values rule out every scalar
/// normalization of level `l+1` at this `u` and `N`.
pub fn best_scalar_fit_residual(spec: &ChainSpec, level: usize, u: c64) -> Result<f64> {
    let (lhs, rhs) = relation_sides(spec, level, u)?;
    Ok(scalar_fit(&lhs, &rhs).1)
}

fn scalar_fit(a: &ComplexMatrix, b: &ComplexMatrix) -> (c64, f64) {
    let num: c64 = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x.conj() * y).sum();
    let den = a.frobenius_norm().powi(2);
    let c = if den == 0.0 { ONE } else { num / den };
    (c, relative_difference(&a.scale(c), b))
}

/// The three-term recursion `t_l(u) t_1(u−lη) = t_{l+1}(u) + q(u−(l−1)η) t_{l−1}(u)`
/// for the unnormalized family with `t_0 = 1`.
pub fn t_system_residual(spec: &ChainSpec, level: usize, u: c64) -> Result<f64> {
    if level == 0 || level + 1 > MAX_LEVEL {
        return Err(Error::InvalidParameter(format!("recursion needs 1 ≤ l ≤ {}", MAX_LEVEL - 1)));
    }
    let eta = spec.params.eta;
    let lhs = fused_transfer_natural(spec, level, u)?.matmul(&transfer_matrix(spec, u - eta * level as f64)?);
    let q = quantum_determinant(spec, u - eta * (level as f64 - 1.0));
    let rhs = &fused_transfer_natural(spec, level + 1, u)? + &fused_transfer_natural(spec, level - 1, u)?.scale(q);
    Ok(relative_difference(&lhs, &rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    pub level3_site_factor: c64,
    /// Relative distance between the fitted level-0 scalar and
    /// [`level0_scalar`] at `N = 1`.
    pub level0_mismatch: f64,
    /// How far the `l = 1` remainder is from a multiple of the identity.
    pub level0_scalar_residual: f64,
    /// Relative residual of the least-squares fit of `κ` at `N = 1`.
    pub level3_fit_residual: f64,
}

/// Fits the level scalars on the undeformed one-site chain at `u`.
pub fn calibrate(eta: c64, u: c64) -> Result<Calibration> {
    let spec = ChainSpec::periodic(1, TwistParams::new(ZERO, eta)?)?;
    // l = 1: (u−η) t_0 = t_2 − t_1(u) t_1(u−η)
    let t1 = transfer_matrix(&spec, u)?;
    let t1s = transfer_matrix(&spec, u - eta)?;
    let rem = &fused_transfer_natural(&spec, 2, u)? - &t1.matmul(&t1s);
    let fitted0 = rem.trace() / 2.0 / (u - eta);
    let level0_scalar_residual = relative_difference(&rem, &ComplexMatrix::identity(2).scale(rem.trace() / 2.0));
    let level0_mismatch = (fitted0 - level0_scalar(&spec, u)).norm() / fitted0.norm().max(1e-300);
    // l = 2: κ t₃ = t₂(u) t₁(u−η) + (u−η) t₁(u)
    let target = &fused_transfer_natural(&spec, 2, u)?.matmul(&t1s) + &t1.scale(u - eta);
    let (level3_site_factor, level3_fit_residual) = scalar_fit(&fused_transfer_natural(&spec, 3, u)?, &target);
    Ok(Calibration {
        level3_site_factor,
        level0_mismatch,
        level0_scalar_residual,
        level3_fit_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cr(x: f64) -> c64 {
        c64::new(x, 0.0)
    }

    fn spec(n: usize, xi: f64) -> ChainSpec {
        ChainSpec::periodic(n, TwistParams::with_xi(cr(xi))).unwrap()
    }

    #[test]
    fn level_bounds() {
        assert!(fused_transfer(&spec(2, 0.0), 4, cr(1.5)).is_err());
        assert!(verify_fusion_relation(&spec(2, 0.0), 0, cr(1.5)).is_err());
    }

    #[test]
    fn low_levels() {
        let s = spec(3, 0.4);
        let u = c64::new(1.3, 0.6);
        let t0 = fused_transfer(&s, 0, u).unwrap();
        assert!((&t0 - &ComplexMatrix::identity(8).scale(t0.get(0, 0))).max_abs() == 0.0);
        assert_eq!(fused_transfer(&s, 1, u).unwrap(), transfer_matrix(&s, u).unwrap());
    }

    #[test]
    fn projectors_are_idempotent_and_invariant() {
        for xi in [0.0, 0.4, -1.1] {
            for level in 2..=3 {
                let p = fusion_projector(level, cr(xi)).unwrap();
                assert!((&p.matmul(&p) - &p).max_abs() < 1e-12);
                assert!((p.trace() - cr(level as f64 + 1.0)).norm() < 1e-12);
                let leak = projector_leakage(&spec(2, xi), level, c64::new(0.9, -0.7)).unwrap();
                assert!(leak < 1e-12, "level {level} xi {xi}: {leak}");
            }
        }
        let (plus, _) = crate::rmatrix::spectral_projectors(&TwistParams::with_xi(cr(0.7)));
        assert!((&fusion_projector(2, cr(0.7)).unwrap() - &plus).max_abs() < 1e-13);
    }

    #[test]
    fn complementary_trace_is_quantum_determinant() {
        let s = spec(3, 0.4);
        let u = c64::new(2.2, 0.3);
        let qd = complementary_trace(&s, 2, u).unwrap();
        let expected = ComplexMatrix::identity(8).scale(quantum_determinant(&s, u));
        assert!(relative_difference(&qd, &expected) < 1e-12);
    }

    #[test]
    fn fused_family_commutes() {
        let s = spec(2, 0.0);
        let t2 = fused_transfer_natural(&s, 2, c64::new(0.8, 0.4)).unwrap();
        let t1 = transfer_matrix(&s, c64::new(-1.2, 2.0)).unwrap();
        assert!(relative_difference(&t2.matmul(&t1), &t1.matmul(&t2)) < 1e-11);
        let s = spec(3, 0.4);
        let t3 = fused_transfer_natural(&s, 3, c64::new(1.7, -0.2)).unwrap();
        let t1 = transfer_matrix(&s, c64::new(0.6, 0.9)).unwrap();
        assert!(relative_difference(&t3.matmul(&t1), &t1.matmul(&t3)) < 1e-10);
    }

    #[test]
    fn first_relation_holds() {
        let u = c64::new(1.6, -0.9);
        assert!(verify_fusion_relation(&spec(2, 0.0), 1, u).unwrap() < 1e-10);
        assert!(verify_fusion_relation(&spec(3, 0.4), 1, u).unwrap() < 1e-9);
    }

    #[test]
    fn recursion_holds_at_both_levels() {
        for xi in [0.0, 0.4] {
            for level in 1..=2 {
                let r = t_system_residual(&spec(3, xi), level, c64::new(1.4, 0.5)).unwrap();
                assert!(r < 1e-10, "xi {xi} level {level}: {r}");
            }
        }
    }

    #[test]
    fn second_relation_admits_no_scalar_normalization() {
        let u = c64::new(1.3, 0.7);
        assert!(verify_fusion_relation(&spec(1, 0.4), 2, u).unwrap() < 1e-12);
        for n in 2..=3 {
            assert!(best_scalar_fit_residual(&spec(n, 0.0), 2, u).unwrap() > 0.1);
        }
    }

    #[test]
    fn calibration_recovers_level0_scalar() {
        let c = calibrate(ONE, c64::new(1.9, 0.8)).unwrap();
        assert!(c.level0_scalar_residual < 1e-13);
        assert!(c.level0_mismatch < 1e-13);
    }
}
