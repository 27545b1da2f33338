//! Large-`u` expansion of the monodromy, the generators `E`, `G` of its
//! constant term `T₀ = [[E, 0], [G, E⁻¹]]`, and the relations they satisfy
//! with the monodromy entries.

use crate::chain::{
    build_monodromy, chain_params, monodromy_first_order, monodromy_product, transfer_matrix, BlockGrid, ChainSpec,
};
use crate::error::{Error, Result};
use crate::expr::{eval_relation, parse_relation, Arg, Env};
use crate::report::VerificationReport;
use crate::rmatrix::build_r_xi;
use crate::tensor::{c64, kron, permutation_op, relative_difference, unit, ComplexMatrix};
use crate::twist::TwistParams;

#[derive(Debug, Clone)]
pub struct AsymptoticData {
    pub e: ComplexMatrix,
    pub g: ComplexMatrix,
    /// Numerical inverse of `E`.
    pub e_inv: ComplexMatrix,
    /// Lower-right block of `T₀`.
    pub d_block: ComplexMatrix,
    /// Largest entry of the upper-right block of `T₀`.
    pub zero_block_residual: f64,
    /// `‖E · d_block − I‖_max`.
    pub inverse_residual: f64,
    /// Coefficient of `1/u` in `T(u)`.
    pub order1: BlockGrid,
}

/// Embeds a block grid as one operator on `aux ⊗ chain`.
pub fn grid_to_full(grid: &BlockGrid) -> ComplexMatrix {
    let dim = grid[0][0].rows();
    let mut out = ComplexMatrix::zeros(2 * dim, 2 * dim);
    for (i, row) in grid.iter().enumerate() {
        for (j, blk) in row.iter().enumerate() {
            out += &kron(&unit(2, i, j), blk);
        }
    }
    out
}

/// `T₀ = Π_k R_{ak}(ξ)` and the `1/u` coefficient, both exact.
pub fn extract_t0(spec: &ChainSpec) -> Result<AsymptoticData> {
    let r_xi = build_r_xi(spec.params.xi);
    let pole = permutation_op().scale(-spec.params.eta);
    let (t0, t1) = monodromy_first_order(spec.n_sites, &r_xi, &pole)?;
    let [[e, upper], [g, d_block]] = t0;
    let e_inv = e.inverse()?;
    let inverse_residual = (&e.matmul(&d_block) - &ComplexMatrix::identity(spec.dim())).max_abs();
    Ok(AsymptoticData {
        zero_block_residual: upper.max_abs(),
        inverse_residual,
        e,
        g,
        e_inv,
        d_block,
        order1: t1,
    })
}

/// `(E − I)^{N+1}` measured in max norm.
pub fn unipotency_residual(data: &AsymptoticData, n_sites: usize) -> f64 {
    let dim = data.e.rows();
    (&data.e - &ComplexMatrix::identity(dim))
        .pow(n_sites as u32 + 1)
        .max_abs()
}

/// Readings of the printed `1/u` sum `Σ_k M_k 𝒫_{ak} M_{N−k−1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderComparison {
    /// `−η Σ_k [R_{aN}⋯R_{a,k+1}] 𝒫_{ak} [R_{a,k−1}⋯R_{a1}]` against the exact
    /// coefficient.
    pub positional: f64,
    /// `−η Σ_k M_k 𝒫_{ak} M_{N−k−1}` with `M_j = R_{a,j−1}⋯R_{a1}` taken
    /// literally.
    pub literal: f64,
}

pub fn compare_first_order(spec: &ChainSpec, data: &AsymptoticData) -> Result<FirstOrderComparison> {
    let n = spec.n_sites;
    let r_xi = build_r_xi(spec.params.xi);
    let p = permutation_op();
    let id4 = ComplexMatrix::identity(4);
    let minus_eta = -spec.params.eta;
    let exact = grid_to_full(&data.order1);
    let full_dim = 2 * spec.dim();
    let mut positional = ComplexMatrix::zeros(full_dim, full_dim);
    for k in 1..=n {
        let g = monodromy_product(n, |m| if m == k { p.clone() } else { r_xi.clone() })?;
        positional += &grid_to_full(&g).scale(minus_eta);
    }
    // M_j on sites 1..j−1
    let m_op = |j: isize| -> Result<ComplexMatrix> {
        let g = monodromy_product(n, |m| if (m as isize) < j { r_xi.clone() } else { id4.clone() })?;
        Ok(grid_to_full(&g))
    };
    let mut literal = ComplexMatrix::zeros(full_dim, full_dim);
    for k in 1..=n {
        let pk = grid_to_full(&monodromy_product(n, |m| if m == k { p.clone() } else { id4.clone() })?);
        let term = m_op(k as isize)?.matmul(&pk).matmul(&m_op(n as isize - k as isize - 1)?);
        literal += &term.scale(minus_eta);
    }
    Ok(FirstOrderComparison {
        positional: relative_difference(&positional, &exact),
        literal: relative_difference(&literal, &exact),
    })
}

/// The printed relations between `E`, `G` and the entries of `T(u)`.
/// `sym05a`/`sym05b` are the two printed forms of `E C(u)`.
pub const SYMMETRY_RELATIONS: [(&str, &str); 10] = [
    ("sym01", "E G = G E - xi (1 - E^2)"),
    ("sym02", "E A(u) = A(u) E - xi B(u) E"),
    ("sym03", "E D(u) = D(u) E + xi E B(u)"),
    ("sym04", "E B(u) = B(u) E"),
    ("sym05a", "E C(u) = C(u) E + xi E A(u) - xi D(u) E"),
    ("sym05b", "E C(u) = C(u) E + xi (A(u) - D(u)) E - xi^2 B(u) E"),
    ("sym06", "G B(u) = B(u) G - xi (E B(u) + B(u) Einv)"),
    ("sym07", "G A(u) = A(u) G - xi (E A(u) - A(u) Einv + B(u) G) + xi^2 B(u) Einv"),
    ("sym08", "G D(u) = D(u) G + xi (E D(u) - D(u) Einv - G B(u)) - xi^2 B(u) E"),
    ("sym09", "G C(u) = C(u) G + xi (E C(u) + C(u) Einv - G A(u) - D(u) G) + xi^2 (D(u) Einv - E A(u))"),
];

pub const RELATION_TOL: f64 = 1e-11;

/// One report per printed relation plus `[E, t(u)] = 0`.
pub fn verify_symmetry_relations(spec: &ChainSpec, u: c64) -> Result<Vec<VerificationReport>> {
    let data = extract_t0(spec)?;
    let t = build_monodromy(spec, u)?;
    let mut env = Env {
        xi: spec.params.xi,
        eta: spec.params.eta,
        u,
        v: u,
        n_sites: spec.n_sites,
        dim: spec.dim(),
        ops: Default::default(),
    };
    env.ops.insert(("E".into(), None), &data.e);
    env.ops.insert(("G".into(), None), &data.g);
    env.ops.insert(("Einv".into(), None), &data.e_inv);
    for (name, i, j) in [("A", 0, 0), ("B", 0, 1), ("C", 1, 0), ("D", 1, 1)] {
        env.ops.insert((name.into(), Some(Arg::U)), t.entry(i, j));
    }
    let mut params = chain_params(spec);
    params.push(("u".into(), u.into()));
    let mut out = Vec::with_capacity(SYMMETRY_RELATIONS.len() + 1);
    for (id, text) in SYMMETRY_RELATIONS {
        let (lhs, rhs) = eval_relation(&parse_relation(text)?, &env)?;
        out.push(VerificationReport::holds(id, params.clone(), relative_difference(&lhs, &rhs), RELATION_TOL).with_notes(text));
    }
    let tu = transfer_matrix(spec, u)?;
    out.push(VerificationReport::holds(
        "sym.e_commutes_with_t",
        params,
        relative_difference(&data.e.matmul(&tu), &tu.matmul(&data.e)),
        RELATION_TOL,
    ));
    Ok(out)
}

/// Coproduct residuals for a chain of `n1 + n2` sites whose first `n2` sites
/// (those multiplied first in `T`) form the second tensor factor of `Δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoproductResiduals {
    pub e: f64,
    /// `G = G_{n1} ⊗ E_{n2} + E_{n1}⁻¹ ⊗ G_{n2}`, first factor on the later
    /// (high) sites.
    pub g: f64,
    /// The same formula with the first factor on the low sites.
    pub g_swapped: f64,
}

pub const COPRODUCT_TOL: f64 = 1e-12;

pub fn coproduct_residuals(n1: usize, n2: usize, xi: c64) -> Result<CoproductResiduals> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidParameter("coproduct segments must be nonempty".into()));
    }
    let params = TwistParams::with_xi(xi);
    let whole = extract_t0(&ChainSpec::periodic(n1 + n2, params)?)?;
    let high = extract_t0(&ChainSpec::periodic(n1, params)?)?;
    let low = extract_t0(&ChainSpec::periodic(n2, params)?)?;
    // Kronecker order is site order: the low segment is the left factor.
    let e = kron(&low.e, &high.e);
    let g = &kron(&low.e, &high.g) + &kron(&low.g, &high.e_inv);
    // swapped: the n1 segment sits on sites 1..n1
    let g_swapped = &kron(&high.g, &low.e) + &kron(&high.e_inv, &low.g);
    Ok(CoproductResiduals {
        e: relative_difference(&whole.e, &e),
        g: relative_difference(&whole.g, &g),
        g_swapped: relative_difference(&whole.g, &g_swapped),
    })
}

pub fn verify_coproducts(n1: usize, n2: usize, xi: c64) -> Result<Vec<VerificationReport>> {
    if n1 + n2 > crate::config::MAX_SITES {
        return Err(Error::InvalidParameter(format!("n1 + n2 = {} too long", n1 + n2)));
    }
    let r = coproduct_residuals(n1, n2, xi)?;
    let params = vec![
        ("n1".to_string(), n1.into()),
        ("n2".to_string(), n2.into()),
        ("xi".to_string(), xi.into()),
    ];
    Ok(vec![
        VerificationReport::holds("coproduct.e", params.clone(), r.e, COPRODUCT_TOL),
        VerificationReport::holds("coproduct.g", params.clone(), r.g, COPRODUCT_TOL)
            .with_notes("first tensor factor on the sites multiplied last"),
        VerificationReport::observation("coproduct.g_swapped_order", params, r.g_swapped),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::ONE;

    fn cr(x: f64) -> c64 {
        c64::new(x, 0.0)
    }

    fn spec(n: usize, xi: f64) -> ChainSpec {
        ChainSpec::periodic(n, TwistParams::with_xi(cr(xi))).unwrap()
    }

    #[test]
    fn undeformed_t0_is_identity() {
        let d = extract_t0(&spec(3, 0.0)).unwrap();
        assert_eq!(d.e, ComplexMatrix::identity(8));
        assert_eq!(d.g.max_abs(), 0.0);
    }

    #[test]
    fn one_site_blocks() {
        let xi = cr(0.7);
        let d = extract_t0(&spec(1, 0.7)).unwrap();
        assert_eq!(d.e, ComplexMatrix::from_rows(&[[ONE, cr(0.0)], [-xi, ONE]]));
        assert_eq!(d.g, ComplexMatrix::from_rows(&[[xi, cr(0.0)], [xi * xi, -xi]]));
        assert_eq!(d.d_block, ComplexMatrix::from_rows(&[[ONE, cr(0.0)], [xi, ONE]]));
        assert_eq!(d.zero_block_residual, 0.0);
    }

    #[test]
    fn e_is_a_tensor_power() {
        let xi = c64::new(-0.4, 0.3);
        let e1 = extract_t0(&ChainSpec::periodic(1, TwistParams::with_xi(xi)).unwrap()).unwrap().e;
        let e2 = extract_t0(&ChainSpec::periodic(2, TwistParams::with_xi(xi)).unwrap()).unwrap().e;
        assert!((&e2 - &kron(&e1, &e1)).max_abs() < 1e-15);
    }

    #[test]
    fn t0_structure() {
        for n in 1..=5 {
            let d = extract_t0(&spec(n, 0.83)).unwrap();
            assert!(d.zero_block_residual < 1e-13);
            assert!(d.inverse_residual < 1e-12);
            assert!(unipotency_residual(&d, n) < 1e-10);
        }
    }

    #[test]
    fn first_order_coefficient_matches_large_u() {
        let s = spec(3, 0.5);
        let d = extract_t0(&s).unwrap();
        let u = cr(1e4);
        let t = build_monodromy(&s, u).unwrap();
        let approx = (&t.a - &d.e).scale(u);
        assert!((&approx - &d.order1[0][0]).max_abs() < 1e-2);
        let cmp = compare_first_order(&s, &d).unwrap();
        assert!(cmp.positional < 1e-13);
        let cmp0 = compare_first_order(&spec(3, 0.0), &extract_t0(&spec(3, 0.0)).unwrap()).unwrap();
        assert!(cmp0.literal < 1e-13);
    }

    #[test]
    fn undeformed_relations_hold() {
        let r = verify_symmetry_relations(&spec(3, 0.0), c64::new(1.2, 0.8)).unwrap();
        assert!(r.iter().all(|r| r.pass), "{r:?}");
    }

    #[test]
    fn e_commutes_with_b_and_t() {
        let r = verify_symmetry_relations(&spec(3, 0.45), c64::new(-0.9, 1.4)).unwrap();
        let get = |id: &str| r.iter().find(|x| x.check_id == id).unwrap().clone();
        assert!(get("sym04").pass);
        assert!(get("sym.e_commutes_with_t").pass);
    }

    #[test]
    fn coproducts() {
        for (n1, n2) in [(1, 1), (2, 1), (2, 2), (1, 3)] {
            let r = coproduct_residuals(n1, n2, cr(0.6)).unwrap();
            assert!(r.e < 1e-12 && r.g < 1e-12, "{n1},{n2}: {r:?}");
            assert!(r.g_swapped > 1e-3);
        }
        let r0 = coproduct_residuals(2, 1, cr(0.0)).unwrap();
        assert_eq!((r0.e, r0.g), (0.0, 0.0));
    }
}
