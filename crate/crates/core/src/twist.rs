//! sl(2) representations and the Jordanian twist `ℱ = exp(h ⊗ σ/2)` with
//! `exp(−σ) = 1 − 2ξe`, evaluated in pairs and triples of finite
//! representations.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{c64, kron, kron_all, relative_difference, ComplexMatrix, ONE};

/// Deformation parameter `xi` and Yangian parameter `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwistParams {
    pub xi: c64,
    pub eta: c64,
}

impl TwistParams {
    pub fn new(xi: c64, eta: c64) -> Result<Self> {
        if !(xi.re.is_finite() && xi.im.is_finite() && eta.re.is_finite() && eta.im.is_finite()) {
            return Err(Error::InvalidParameter("twist parameters must be finite".into()));
        }
        if eta == c64::new(0.0, 0.0) {
            return Err(Error::InvalidParameter("eta must be nonzero".into()));
        }
        Ok(Self { xi, eta })
    }

    /// `xi` with the default `eta = 1`.
    pub fn with_xi(xi: c64) -> Self {
        Self {
            xi,
            eta: ONE,
        }
    }

    pub fn undeformed(&self) -> Self {
        Self {
            xi: c64::new(0.0, 0.0),
            eta: self.eta,
        }
    }
}

/// Which sl(2) generator a coproduct acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    H,
    E,
    F,
}

/// Irreducible spin-`s` representation. Basis runs from weight `m = s` down
/// to `m = −s`; `e` lowers, `f` raises, `[h, e] = −2e`, `[h, f] = 2f`,
/// `[e, f] = −h`. For `s = ½`, `h = σᶻ` and `e = σ⁻`, which makes the
/// fundamental twist equal the displayed `F₁₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinRep {
    two_s: u32,
    pub h: ComplexMatrix,
    pub e: ComplexMatrix,
    pub f: ComplexMatrix,
}

impl SpinRep {
    /// Spin from its doubled value, `two_s = 2s`.
    pub fn from_twice_spin(two_s: u32) -> Self {
        let dim = two_s as usize + 1;
        let s = two_s as f64 / 2.0;
        let m = |k: usize| s - k as f64;
        let h = ComplexMatrix::from_diagonal(&(0..dim).map(|k| c64::new(2.0 * m(k), 0.0)).collect::<Vec<_>>());
        let mut e = ComplexMatrix::zeros(dim, dim);
        let mut f = ComplexMatrix::zeros(dim, dim);
        for k in 0..dim.saturating_sub(1) {
            // ⟨m−1| e |m⟩ = ⟨m| f |m−1⟩ = √((s+m)(s−m+1))
            let mk = m(k);
            let coeff = ((s + mk) * (s - mk + 1.0)).sqrt();
            e.set(k + 1, k, c64::new(coeff, 0.0));
            f.set(k, k + 1, c64::new(coeff, 0.0));
        }
        Self { two_s, h, e, f }
    }

    /// Spin `s` given as a float; `2s` must be a nonnegative integer.
    pub fn new(spin: f64) -> Result<Self> {
        let doubled = 2.0 * spin;
        if !(doubled.is_finite() && doubled >= 0.0 && (doubled - doubled.round()).abs() < 1e-12) {
            return Err(Error::InvalidParameter(format!("spin {spin} is not a nonnegative half-integer")));
        }
        Ok(Self::from_twice_spin(doubled.round() as u32))
    }

    pub fn spin(&self) -> f64 {
        self.two_s as f64 / 2.0
    }

    pub fn twice_spin(&self) -> u32 {
        self.two_s
    }

    pub fn dim(&self) -> usize {
        self.two_s as usize + 1
    }

    pub fn generator(&self, g: Generator) -> &ComplexMatrix {
        match g {
            Generator::H => &self.h,
            Generator::E => &self.e,
            Generator::F => &self.f,
        }
    }

    /// Max relative residual of the defining relations and nilpotency.
    pub fn relation_residual(&self) -> f64 {
        let he = relative_difference(&self.h.commutator(&self.e), &self.e.scale(c64::new(-2.0, 0.0)));
        let hf = relative_difference(&self.h.commutator(&self.f), &self.f.scale(c64::new(2.0, 0.0)));
        let ef = relative_difference(&self.e.commutator(&self.f), &self.h.scale(-ONE));
        let nil = self.e.pow(self.dim() as u32).max_abs();
        he.max(hf).max(ef).max(nil)
    }
}

/// `Σ_{k≥0} x^k / k!` for nilpotent `x`, stopping once a power vanishes.
pub fn nilpotent_exp(x: &ComplexMatrix) -> ComplexMatrix {
    let n = x.rows();
    let mut out = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=n {
        term = term.matmul(x).scale(c64::new(1.0 / k as f64, 0.0));
        if term.max_abs() == 0.0 {
            break;
        }
        out += &term;
    }
    out
}

/// `log(1 + x) = Σ_{k≥1} (−1)^{k+1} x^k / k` for nilpotent `x`.
pub fn nilpotent_log1p(x: &ComplexMatrix) -> ComplexMatrix {
    let n = x.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    let mut power = ComplexMatrix::identity(n);
    for k in 1..=n {
        power = power.matmul(x);
        if power.max_abs() == 0.0 {
            break;
        }
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        out += &power.scale(c64::new(sign / k as f64, 0.0));
    }
    out
}

/// `σ = −log(1 − 2ξ e)` for a nilpotent lowering operator `e`.
pub fn sigma_of(e: &ComplexMatrix, xi: c64) -> ComplexMatrix {
    nilpotent_log1p(&e.scale(-2.0 * xi)).scale(-ONE)
}

pub fn sigma_element(rep: &SpinRep, xi: c64) -> ComplexMatrix {
    sigma_of(&rep.e, xi)
}

/// `exp(h ⊗ σ / 2)` for given first-factor `h` and second-factor `e`.
fn twist_from(h: &ComplexMatrix, e: &ComplexMatrix, xi: c64) -> ComplexMatrix {
    let sigma = sigma_of(e, xi);
    nilpotent_exp(&kron(h, &sigma).scale(c64::new(0.5, 0.0)))
}

/// `(π ⊗ ρ) ℱ` in closed exponential form.
pub fn universal_twist(rep1: &SpinRep, rep2: &SpinRep, xi: c64) -> ComplexMatrix {
    twist_from(&rep1.h, &rep2.e, xi)
}

/// `(π ⊗ ρ) ℱ` from the series `Σ_k ξᵏ/k! · h(h+2)⋯(h+2k−2) ⊗ eᵏ`.
pub fn universal_twist_series(rep1: &SpinRep, rep2: &SpinRep, xi: c64) -> ComplexMatrix {
    let (d1, d2) = (rep1.dim(), rep2.dim());
    let mut out = ComplexMatrix::identity(d1 * d2);
    let mut pochhammer = ComplexMatrix::identity(d1);
    let mut e_power = ComplexMatrix::identity(d2);
    let mut coeff = ONE;
    for k in 1..d2 {
        let shift = ComplexMatrix::identity(d1).scale(c64::new(2.0 * (k - 1) as f64, 0.0));
        pochhammer = pochhammer.matmul(&(&rep1.h + &shift));
        e_power = e_power.matmul(&rep2.e);
        coeff = coeff * xi / k as f64;
        out += &kron(&pochhammer, &e_power).scale(coeff);
    }
    out
}

fn coproduct(a: &ComplexMatrix, b_dim: usize, b: &ComplexMatrix, a_dim: usize) -> ComplexMatrix {
    &kron(a, &ComplexMatrix::identity(b_dim)) + &kron(&ComplexMatrix::identity(a_dim), b)
}

/// Undeformed `Δ(x) = x ⊗ 1 + 1 ⊗ x` in `rep1 ⊗ rep2`.
pub fn undeformed_coproduct(rep1: &SpinRep, rep2: &SpinRep, g: Generator) -> ComplexMatrix {
    coproduct(rep1.generator(g), rep2.dim(), rep2.generator(g), rep1.dim())
}

/// `Δ_ξ(x) = ℱ Δ(x) ℱ⁻¹` in `rep1 ⊗ rep2`.
pub fn twisted_coproduct(rep1: &SpinRep, rep2: &SpinRep, g: Generator, xi: c64) -> Result<ComplexMatrix> {
    let f = universal_twist(rep1, rep2, xi);
    let finv = f.inverse()?;
    Ok(f.matmul(&undeformed_coproduct(rep1, rep2, g)).matmul(&finv))
}

/// The three-fold twist `ℱ₁₂ (Δ ⊗ id)(ℱ)` on `rep1 ⊗ rep2 ⊗ rep3`, which
/// conjugates `(Δ ⊗ id)Δ` into `(Δ_ξ ⊗ id)Δ_ξ`.
pub fn triple_twist(rep1: &SpinRep, rep2: &SpinRep, rep3: &SpinRep, xi: c64) -> ComplexMatrix {
    let (left, _) = cocycle_sides(rep1, rep2, rep3, xi);
    left
}

fn cocycle_sides(rep1: &SpinRep, rep2: &SpinRep, rep3: &SpinRep, xi: c64) -> (ComplexMatrix, ComplexMatrix) {
    let (d1, d2, d3) = (rep1.dim(), rep2.dim(), rep3.dim());
    let f12 = kron(&universal_twist(rep1, rep2, xi), &ComplexMatrix::identity(d3));
    let f23 = kron(&ComplexMatrix::identity(d1), &universal_twist(rep2, rep3, xi));
    // (Δ ⊗ id)ℱ = exp(Δh ⊗ σ/2); (id ⊗ Δ)ℱ = exp(h ⊗ σ(Δe)/2)
    let delta_h = coproduct(&rep1.h, d2, &rep2.h, d1);
    let delta_e = coproduct(&rep2.e, d3, &rep3.e, d2);
    let left = f12.matmul(&twist_from(&delta_h, &rep3.e, xi));
    let right = f23.matmul(&twist_from(&rep1.h, &delta_e, xi));
    (left, right)
}

/// Relative residual of `ℱ₁₂(Δ⊗id)(ℱ) = ℱ₂₃(id⊗Δ)(ℱ)`.
pub fn verify_cocycle(rep1: &SpinRep, rep2: &SpinRep, rep3: &SpinRep, xi: c64) -> f64 {
    let (left, right) = cocycle_sides(rep1, rep2, rep3, xi);
    relative_difference(&left, &right)
}

/// The symmetrizer on `(ℂ²)^{⊗l}`, i.e. the projector onto the spin-`l/2`
/// component.
pub fn symmetrizer(l: usize) -> ComplexMatrix {
    let dim = 1usize << l;
    let mut out = ComplexMatrix::zeros(dim, dim);
    let mut perm: Vec<usize> = (0..l).collect();
    let mut count = 0usize;
    permute_all(&mut perm, 0, &mut |p| {
        count += 1;
        for col in 0..dim {
            let bits: Vec<usize> = (0..l).map(|k| (col >> (l - 1 - k)) & 1).collect();
            let row = (0..l).fold(0usize, |acc, k| (acc << 1) | bits[p[k]]);
            let cur = out.get(row, col);
            out.set(row, col, cur + ONE);
        }
    });
    out.scale(c64::new(1.0 / count as f64, 0.0))
}

fn permute_all(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute_all(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Twist for `l` spin-½ factors, `ℱ^{(l)} = ℱ^{(l−1)}_{1…l−1} (Δ^{(l−1)} ⊗ id)(ℱ)`.
pub fn fundamental_multi_twist(l: usize, xi: c64) -> ComplexMatrix {
    let half = SpinRep::from_twice_spin(1);
    if l <= 1 {
        return ComplexMatrix::identity(1 << l);
    }
    let mut acc = ComplexMatrix::identity(2);
    for k in 2..=l {
        let left_dim = 1usize << (k - 1);
        // total h on the first k−1 factors
        let mut total_h = ComplexMatrix::zeros(left_dim, left_dim);
        for site in 0..k - 1 {
            let mut factors = vec![ComplexMatrix::identity(2); k - 1];
            factors[site] = half.h.clone();
            total_h += &kron_all(&factors);
        }
        let step = twist_from(&total_h, &half.e, xi);
        acc = kron(&acc, &ComplexMatrix::identity(2)).matmul(&step);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{eigenvalues, match_spectra};

    fn cr(x: f64) -> c64 {
        c64::new(x, 0.0)
    }

    fn displayed_f12(xi: c64) -> ComplexMatrix {
        let (o, z) = (ONE, cr(0.0));
        ComplexMatrix::from_rows(&[[o, z, z, z], [xi, o, z, z], [z, z, o, z], [z, z, -xi, o]])
    }

    #[test]
    fn spin_half_rep() {
        let r = SpinRep::new(0.5).unwrap();
        assert_eq!(r.dim(), 2);
        assert_eq!(r.e.matmul(&r.e).max_abs(), 0.0);
        assert_eq!(r.relation_residual(), 0.0);
    }

    #[test]
    fn spin_one_relations() {
        let r = SpinRep::new(1.0).unwrap();
        assert_eq!(r.dim(), 3);
        assert_eq!(
            r.h.commutator(&r.e),
            r.e.scale(cr(-2.0)),
        );
        assert!(r.relation_residual() < 1e-13);
    }

    #[test]
    fn higher_spin_relations() {
        for two_s in 0..=6 {
            let r = SpinRep::from_twice_spin(two_s);
            assert!(r.relation_residual() < 1e-13, "2s = {two_s}");
        }
    }

    #[test]
    fn invalid_spin_rejected() {
        assert!(SpinRep::new(0.3).is_err());
        assert!(SpinRep::new(-0.5).is_err());
    }

    #[test]
    fn sigma_examples() {
        let half = SpinRep::new(0.5).unwrap();
        assert_eq!(sigma_element(&half, cr(0.0)).max_abs(), 0.0);
        let xi = c64::new(0.37, -0.2);
        assert_eq!(sigma_element(&half, xi), half.e.scale(2.0 * xi));
        for two_s in 1..=3 {
            let rep = SpinRep::from_twice_spin(two_s);
            let sigma = sigma_element(&rep, xi);
            let lhs = nilpotent_exp(&sigma.scale(-ONE));
            let rhs = &ComplexMatrix::identity(rep.dim()) - &rep.e.scale(2.0 * xi);
            assert!((&lhs - &rhs).max_abs() < 1e-13);
        }
    }

    #[test]
    fn fundamental_twist_is_displayed_f12() {
        let half = SpinRep::new(0.5).unwrap();
        for xi in [0.0, 1.0, -2.0, 0.5] {
            assert_eq!(universal_twist(&half, &half, cr(xi)), displayed_f12(cr(xi)));
        }
    }

    #[test]
    fn series_agrees_with_exponential() {
        let xi = c64::new(0.7, 0.3);
        for (a, b) in [(1, 1), (2, 1), (1, 2), (2, 3), (3, 3)] {
            let (r1, r2) = (SpinRep::from_twice_spin(a), SpinRep::from_twice_spin(b));
            let closed = universal_twist(&r1, &r2, xi);
            let series = universal_twist_series(&r1, &r2, xi);
            assert!(relative_difference(&closed, &series) < 1e-12, "({a},{b})");
            let inv = closed.inverse().unwrap();
            assert!((&closed.matmul(&inv) - &ComplexMatrix::identity(closed.rows())).max_abs() < 1e-13);
        }
    }

    #[test]
    fn cocycle_holds() {
        let half = SpinRep::from_twice_spin(1);
        let one = SpinRep::from_twice_spin(2);
        assert_eq!(verify_cocycle(&half, &half, &half, cr(0.0)), 0.0);
        for xi in [-0.93, -0.2, 0.41, 1.0] {
            assert!(verify_cocycle(&half, &half, &half, cr(xi)) < 1e-12);
            assert!(verify_cocycle(&half, &half, &one, cr(xi)) < 1e-12);
        }
    }

    #[test]
    fn twisted_coproduct_examples() {
        let half = SpinRep::from_twice_spin(1);
        for g in [Generator::H, Generator::E, Generator::F] {
            let d0 = twisted_coproduct(&half, &half, g, cr(0.0)).unwrap();
            assert_eq!(d0, undeformed_coproduct(&half, &half, g));
        }
        let xi = cr(0.6);
        let dh = twisted_coproduct(&half, &half, Generator::H, xi).unwrap();
        let r = match_spectra(
            &eigenvalues(&dh).unwrap(),
            &eigenvalues(&undeformed_coproduct(&half, &half, Generator::H)).unwrap(),
            1e-12,
        )
        .unwrap();
        assert!(r.matched);
    }

    #[test]
    fn e_is_not_twist_invariant_but_exp_minus_sigma_is_grouplike() {
        // Δ_ξ(e) = Δ(e) − 2ξ e⊗e on spin-½ ⊗ spin-½
        let half = SpinRep::from_twice_spin(1);
        let xi = cr(0.45);
        let de = twisted_coproduct(&half, &half, Generator::E, xi).unwrap();
        let expected = &undeformed_coproduct(&half, &half, Generator::E) - &kron(&half.e, &half.e).scale(2.0 * xi);
        assert!((&de - &expected).max_abs() < 1e-15);
        let one = ComplexMatrix::identity(4);
        let g = &one - &de.scale(2.0 * xi);
        let single = &ComplexMatrix::identity(2) - &half.e.scale(2.0 * xi);
        assert!((&g - &kron(&single, &single)).max_abs() < 1e-15);
    }

    #[test]
    fn symmetrizer_is_projector_of_right_rank() {
        for l in 1..=3 {
            let s = symmetrizer(l);
            assert!((&s.matmul(&s) - &s).max_abs() < 1e-15);
            assert!((s.trace() - cr((l + 1) as f64)).norm() < 1e-14);
        }
    }

    #[test]
    fn multi_twist_reduces_to_f12() {
        let xi = cr(-0.8);
        assert_eq!(fundamental_multi_twist(2, xi), displayed_f12(xi));
        let half = SpinRep::from_twice_spin(1);
        assert!(relative_difference(&fundamental_multi_twist(3, xi), &triple_twist(&half, &half, &half, xi)) < 1e-15);
    }
}
