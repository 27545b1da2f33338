use serde::Serialize;

use twisted_xxx::bethe::{
    bethe_vector, eigenvector_defect, eval_lambda, one_magnon_roots, solve_bethe, solve_from_seeds,
    two_magnon_seeds, BetheState,
};
use twisted_xxx::chain::{
    build_hamiltonian, transfer_commutator, transfer_matrix, verify_commutation_relations, verify_rtt, ChainSpec,
    DISPLAYED_RELATIONS,
};
use twisted_xxx::config::parse_complex;
use twisted_xxx::fusion::verify_fusion_relation;
use twisted_xxx::rmatrix::verify_ybe;
use twisted_xxx::spectrum::{distance_to_spectrum, eigenvalues, match_spectra};
use twisted_xxx::symmetry::{verify_symmetry_relations, SYMMETRY_RELATIONS};
use twisted_xxx::tensor::c64;
use twisted_xxx::twist::TwistParams;

/// Largest chain the page accepts; `2^8` keeps every call interactive.
pub const MAX_DEMO_SITES: usize = 8;

type Pair = [f64; 2];

fn pair(z: c64) -> Pair {
    [z.re, z.im]
}

fn complex(name: &str, s: &str) -> Result<c64, String> {
    parse_complex(s).map_err(|e| format!("{name}: {e}"))
}

fn chain(n_sites: usize, xi: c64, min_sites: usize) -> Result<ChainSpec, String> {
    if !(min_sites..=MAX_DEMO_SITES).contains(&n_sites) {
        return Err(format!("chain length must be in {min_sites}..={MAX_DEMO_SITES}"));
    }
    let params = TwistParams::new(xi, c64::new(1.0, 0.0)).map_err(|e| e.to_string())?;
    ChainSpec::periodic(n_sites, params).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumComparison {
    pub n_sites: usize,
    pub hamiltonian_deformed: Vec<Pair>,
    pub hamiltonian_undeformed: Vec<Pair>,
    pub hamiltonian_distance: f64,
    pub transfer_deformed: Vec<Pair>,
    pub transfer_undeformed: Vec<Pair>,
    pub transfer_distance: f64,
}

pub fn compare_spectra(n_sites: usize, xi: &str, u: &str) -> Result<SpectrumComparison, String> {
    let spec = chain(n_sites, complex("xi", xi)?, 2)?;
    let u = complex("u", u)?;
    let plain = spec.undeformed();
    let run = || -> twisted_xxx::Result<SpectrumComparison> {
        let hd = eigenvalues(&build_hamiltonian(&spec)?)?;
        let h0 = eigenvalues(&build_hamiltonian(&plain)?)?;
        let td = eigenvalues(&transfer_matrix(&spec, u)?)?;
        let t0 = eigenvalues(&transfer_matrix(&plain, u)?)?;
        Ok(SpectrumComparison {
            n_sites,
            hamiltonian_distance: match_spectra(&hd, &h0, 0.0)?.max_pair_distance,
            transfer_distance: match_spectra(&td, &t0, 0.0)?.max_pair_distance,
            hamiltonian_deformed: hd.into_iter().map(pair).collect(),
            hamiltonian_undeformed: h0.into_iter().map(pair).collect(),
            transfer_deformed: td.into_iter().map(pair).collect(),
            transfer_undeformed: t0.into_iter().map(pair).collect(),
        })
    };
    run().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Serialize)]
pub struct BetheSolution {
    pub magnons: usize,
    pub roots: Vec<Pair>,
    pub bethe_defect: f64,
    pub lambda: Pair,
    /// Distance from `Λ(u)` to the nearest exact eigenvalue of `t_ξ(u)`.
    pub spectrum_distance: f64,
    /// How far `C(v₁)⋯C(v_M)Ω` is from an eigenvector of `t_ξ(u)`.
    pub eigenvector_defect: f64,
}

pub fn bethe_states(n_sites: usize, xi: &str, u: &str) -> Result<Vec<BetheSolution>, String> {
    let spec = chain(n_sites, complex("xi", xi)?, 1)?;
    let u = complex("u", u)?;
    let eta = spec.params.eta;
    let mut states: Vec<BetheState> = one_magnon_roots(n_sites, eta)
        .into_iter()
        .filter_map(|r| solve_bethe(n_sites, 1, eta, &[r]).ok())
        .collect();
    if n_sites >= 4 {
        let seeds: Vec<Vec<c64>> = two_magnon_seeds(n_sites, eta).into_iter().map(|s| s.to_vec()).collect();
        states.extend(solve_from_seeds(n_sites, eta, &seeds));
    }
    let run = || -> twisted_xxx::Result<Vec<BetheSolution>> {
        let t = transfer_matrix(&spec, u)?;
        let spectrum = eigenvalues(&t)?;
        states
            .iter()
            .map(|st| {
                let lambda = eval_lambda(u, st)?;
                let psi = bethe_vector(&spec, &st.roots)?;
                Ok(BetheSolution {
                    magnons: st.magnons,
                    roots: st.roots.iter().copied().map(pair).collect(),
                    bethe_defect: st.residual,
                    lambda: pair(lambda),
                    spectrum_distance: distance_to_spectrum(lambda, &spectrum),
                    eigenvector_defect: eigenvector_defect(&t, &psi, lambda)?,
                })
            })
            .collect()
    };
    run().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityInfo {
    pub name: String,
    pub formula: String,
}

const BUILTIN: [(&str, &str); 5] = [
    ("ybe", "R12(u-v) R13(u) R23(v) = R23(v) R13(u) R12(u-v)"),
    ("rtt", "R(u-v) T1(u) T2(v) = T2(v) T1(u) R(u-v)"),
    ("commuting", "t(u) t(v) = t(v) t(u)"),
    ("fusion_l1", "t2(u) = t1(u) t1(u-eta) + (u-eta)^N t0(u)"),
    ("fusion_l2", "t3(u) = t2(u) t1(u-eta) + (u-eta)^N t1(u)"),
];

pub fn identity_catalog() -> Vec<IdentityInfo> {
    BUILTIN
        .iter()
        .chain(DISPLAYED_RELATIONS.iter())
        .chain(SYMMETRY_RELATIONS.iter())
        .map(|(name, formula)| IdentityInfo {
            name: name.to_string(),
            formula: formula.to_string(),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityResult {
    pub name: String,
    pub residual: f64,
}

/// Relative residual of one named identity at `(ξ, u, v)` on an `N`-site
/// chain (`v` is ignored by single-point identities).
pub fn identity_residual(name: &str, n_sites: usize, xi: &str, u: &str, v: &str) -> Result<IdentityResult, String> {
    let xi = complex("xi", xi)?;
    let (u, v) = (complex("u", u)?, complex("v", v)?);
    let spec = chain(n_sites, xi, 1)?;
    let pick = |reports: Vec<twisted_xxx::report::VerificationReport>| {
        reports
            .into_iter()
            .find(|r| r.check_id == name)
            .map(|r| r.residual)
            .ok_or_else(|| twisted_xxx::Error::InvalidParameter(format!("unknown identity '{name}'")))
    };
    let residual = match name {
        "ybe" => verify_ybe(u, v, &spec.params),
        "rtt" => verify_rtt(&spec, u, v),
        "commuting" => transfer_commutator(&spec, u, v),
        "fusion_l1" => verify_fusion_relation(&spec, 1, u),
        "fusion_l2" => verify_fusion_relation(&spec, 2, u),
        n if n.starts_with("cr") => verify_commutation_relations(&spec, u, v, 0.0).and_then(pick),
        n if n.starts_with("sym") => verify_symmetry_relations(&spec, u).and_then(pick),
        other => return Err(format!("unknown identity '{other}'")),
    }
    .map_err(|e| e.to_string())?;
    Ok(IdentityResult {
        name: name.to_string(),
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deformed_spectra_coincide() {
        let c = compare_spectra(4, "0.7", "1.3+0.4i").unwrap();
        assert_eq!(c.hamiltonian_deformed.len(), 16);
        assert!(c.hamiltonian_distance < 1e-8);
        assert!(c.transfer_distance < 1e-7);
    }

    #[test]
    fn input_is_validated() {
        assert!(compare_spectra(1, "0", "1").is_err());
        assert!(compare_spectra(MAX_DEMO_SITES + 1, "0", "1").is_err());
        assert!(compare_spectra(3, "zero", "1").is_err());
        assert!(identity_residual("nonsense", 2, "0", "1", "2").is_err());
        assert!(identity_residual("cr99", 2, "0", "1", "2").is_err());
    }

    #[test]
    fn bethe_states_sit_in_the_spectrum() {
        let states = bethe_states(4, "0.5", "2.2-0.3i").unwrap();
        assert_eq!(states.iter().filter(|s| s.magnons == 1).count(), 3);
        assert!(states.iter().any(|s| s.magnons == 2));
        assert!(states.iter().all(|s| s.spectrum_distance < 1e-8));
        // the twist spoils the two-magnon product state but not its eigenvalue
        assert!(states.iter().filter(|s| s.magnons == 2).all(|s| s.eigenvector_defect > 1e-4));
        let plain = bethe_states(4, "0", "2.2-0.3i").unwrap();
        assert!(plain.iter().all(|s| s.eigenvector_defect < 1e-10));
    }

    #[test]
    fn every_catalogued_identity_evaluates() {
        let catalog = identity_catalog();
        assert_eq!(catalog.len(), 5 + DISPLAYED_RELATIONS.len() + SYMMETRY_RELATIONS.len());
        for info in catalog {
            let r = identity_residual(&info.name, 3, "0.4", "1.7+0.2i", "-0.6+1.1i").unwrap();
            assert!(r.residual.is_finite(), "{}", info.name);
        }
        assert!(identity_residual("ybe", 2, "0.4", "1.7", "0.3i").unwrap().residual < 1e-12);
    }
}
