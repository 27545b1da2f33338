//! Bethe equations, transfer-matrix eigenvalues and the vector-level checks
//! of the algebraic Bethe ansatz on the twisted chain.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::chain::{build_monodromy, chain_params, transfer_matrix, vacuum, ChainSpec};
use crate::error::{Error, Result};
use crate::report::VerificationReport;
use crate::spectrum::{distance_to_spectrum, eigenvalues};
use crate::tensor::{c64, down_count, relative_vec_difference, vec_norm, vec_scale, vec_sub, ComplexMatrix, ONE, ZERO};

pub const SOLVER_TOL: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 200;
const MAX_HALVINGS: usize = 8;
const MIN_SEPARATION: f64 = 1e-8;
/// Roots beyond `|v| = MAX_ROOT_MODULUS·|η|` are treated as escaped to
/// infinity, where the equations are satisfied trivially.
pub const MAX_ROOT_MODULUS: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetheState {
    pub n_sites: usize,
    pub magnons: usize,
    pub roots: Vec<c64>,
    /// Largest per-root defect of the logarithmic Bethe equations.
    pub residual: f64,
    pub eta: c64,
}

impl BetheState {
    /// Wraps a root set without solving; `residual` is computed.
    pub fn from_roots(n_sites: usize, eta: c64, roots: Vec<c64>) -> Result<Self> {
        let mut s = Self {
            n_sites,
            magnons: roots.len(),
            roots,
            residual: 0.0,
            eta,
        };
        s.residual = bethe_defect(&s)?.into_iter().fold(0.0, f64::max);
        Ok(s)
    }

    pub fn vacuum(n_sites: usize, eta: c64) -> Self {
        Self {
            n_sites,
            magnons: 0,
            roots: Vec::new(),
            residual: 0.0,
            eta,
        }
    }
}

/// `α(u, v) = 1 − η/(u − v)`.
pub fn alpha(u: c64, v: c64, eta: c64) -> c64 {
    ONE - eta / (u - v)
}

/// `β(u, v) = α(u, v) − 1`.
pub fn beta(u: c64, v: c64, eta: c64) -> c64 {
    -eta / (u - v)
}

/// `d(u) = (1 − η/u)^N`.
pub fn vacuum_d(u: c64, eta: c64, n_sites: usize) -> c64 {
    (ONE - eta / u).powu(n_sites as u32)
}

fn wrap_phase(z: c64) -> c64 {
    let mut im = z.im % (2.0 * PI);
    if im > PI {
        im -= 2.0 * PI;
    } else if im <= -PI {
        im += 2.0 * PI;
    }
    c64::new(z.re, im)
}

fn check_roots(roots: &[c64], eta: c64) -> Result<()> {
    for (j, &v) in roots.iter().enumerate() {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Pole(format!("non-finite root {v}")));
        }
        if v.norm() < 1e-300 || (v - eta).norm() < 1e-300 {
            return Err(Error::Pole(format!("root {v} at 0 or η")));
        }
        for &w in &roots[..j] {
            if (v - w).norm() < MIN_SEPARATION {
                return Err(Error::RootCollision(format!("roots {w} and {v} coincide")));
            }
            if (v - w - eta).norm() < 1e-300 || (v - w + eta).norm() < 1e-300 {
                return Err(Error::Pole(format!("roots {w} and {v} differ by ±η")));
            }
        }
    }
    Ok(())
}

/// Logarithmic Bethe equations with the branch integer chosen to minimize
/// `|f_j|`, i.e. the imaginary part wrapped to `(−π, π]`.
fn log_equations(roots: &[c64], eta: c64, n_sites: usize) -> Vec<c64> {
    let n = n_sites as f64;
    roots
        .iter()
        .enumerate()
        .map(|(j, &vj)| {
            let mut f = ((vj - eta) / vj).ln() * n;
            for (k, &vk) in roots.iter().enumerate() {
                if k != j {
                    f -= (vk - vj + eta).ln() - (vk - vj - eta).ln();
                }
            }
            wrap_phase(f)
        })
        .collect()
}

fn jacobian(roots: &[c64], eta: c64, n_sites: usize) -> DMatrix<c64> {
    let m = roots.len();
    let n = n_sites as f64;
    DMatrix::from_fn(m, m, |j, k| {
        let vj = roots[j];
        if j == k {
            let mut d = (ONE / (vj - eta) - ONE / vj) * n;
            for (l, &vl) in roots.iter().enumerate() {
                if l != j {
                    d += ONE / (vl - vj + eta) - ONE / (vl - vj - eta);
                }
            }
            d
        } else {
            let vk = roots[k];
            -(ONE / (vk - vj + eta) - ONE / (vk - vj - eta))
        }
    })
}

/// Per-root absolute defect of the logarithmic Bethe equations.
pub fn bethe_defect(state: &BetheState) -> Result<Vec<f64>> {
    check_roots(&state.roots, state.eta)?;
    Ok(log_equations(&state.roots, state.eta, state.n_sites)
        .into_iter()
        .map(|f| f.norm())
        .collect())
}

fn max_norm(f: &[c64]) -> f64 {
    f.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn escaped(roots: &[c64], eta: c64) -> bool {
    roots.iter().any(|v| v.norm() > MAX_ROOT_MODULUS * eta.norm())
}

fn newton(n_sites: usize, eta: c64, seeds: &[c64]) -> Result<Vec<c64>> {
    let mut roots = seeds.to_vec();
    check_roots(&roots, eta)?;
    let mut f = log_equations(&roots, eta, n_sites);
    let mut res = max_norm(&f);
    for _ in 0..MAX_ITERATIONS {
        if escaped(&roots, eta) {
            break;
        }
        if res < SOLVER_TOL {
            return Ok(roots);
        }
        let jac = jacobian(&roots, eta, n_sites);
        let rhs = DVector::from_iterator(f.len(), f.iter().map(|z| -z));
        let step = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Singular("Bethe Jacobian".into()))?;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<c64> = roots.iter().zip(step.iter()).map(|(v, s)| v + s * lambda).collect();
            if check_roots(&trial, eta).is_ok() {
                let ft = log_equations(&trial, eta, n_sites);
                let rt = max_norm(&ft);
                if rt.is_finite() && rt < res {
                    accepted = Some((trial, ft, rt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((r, ft, rt)) => {
                roots = r;
                f = ft;
                res = rt;
            }
            None => {
                // no decrease along the damped direction; take the smallest step
                let trial: Vec<c64> = roots.iter().zip(step.iter()).map(|(v, s)| v + s * lambda).collect();
                check_roots(&trial, eta)?;
                roots = trial;
                f = log_equations(&roots, eta, n_sites);
                res = max_norm(&f);
            }
        }
    }
    if res < SOLVER_TOL && !escaped(&roots, eta) {
        return Ok(roots);
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        residual: res,
        last_iterate: roots,
    })
}

/// Damped Newton on the logarithmic Bethe equations. A root collision
/// triggers one restart from perturbed seeds.
pub fn solve_bethe(n_sites: usize, magnons: usize, eta: c64, seeds: &[c64]) -> Result<BetheState> {
    if seeds.len() != magnons {
        return Err(Error::InvalidParameter(format!(
            "{} seeds for {magnons} magnons",
            seeds.len()
        )));
    }
    if magnons > n_sites {
        return Err(Error::InvalidParameter(format!("{magnons} magnons on {n_sites} sites")));
    }
    if eta == ZERO {
        return Err(Error::InvalidParameter("η must be nonzero".into()));
    }
    let roots = match newton(n_sites, eta, seeds) {
        Err(Error::RootCollision(_)) => {
            let perturbed: Vec<c64> = seeds
                .iter()
                .enumerate()
                .map(|(j, v)| v + eta * c64::new(1e-3 * (j as f64 + 1.0), 7e-4 * (j as f64 + 1.0)))
                .collect();
            newton(n_sites, eta, &perturbed)?
        }
        other => other?,
    };
    BetheState::from_roots(n_sites, eta, roots)
}

/// `v = η/(1 − ω)` for every `N`-th root of unity `ω ≠ 1`.
pub fn one_magnon_roots(n_sites: usize, eta: c64) -> Vec<c64> {
    (1..n_sites)
        .map(|k| {
            let omega = c64::from_polar(1.0, 2.0 * PI * k as f64 / n_sites as f64);
            eta / (ONE - omega)
        })
        .collect()
}

/// Two-magnon seeds: pairs of distinct one-magnon roots, then each
/// one-magnon root split into a `±iη/2` string.
pub fn two_magnon_seeds(n_sites: usize, eta: c64) -> Vec<[c64; 2]> {
    let ones = one_magnon_roots(n_sites, eta);
    let mut out = Vec::new();
    for i in 0..ones.len() {
        for j in i + 1..ones.len() {
            out.push([ones[i], ones[j]]);
        }
    }
    let half = eta * c64::new(0.0, 0.5);
    out.extend(ones.iter().map(|&r| [r + half, r - half]));
    out
}

/// Solves from every seed and keeps distinct converged root sets.
pub fn solve_from_seeds(n_sites: usize, eta: c64, seeds: &[Vec<c64>]) -> Vec<BetheState> {
    let mut found: Vec<BetheState> = Vec::new();
    for s in seeds {
        let Ok(state) = solve_bethe(n_sites, s.len(), eta, s) else {
            continue;
        };
        if !found.iter().any(|f| same_root_set(&f.roots, &state.roots, 1e-8)) {
            found.push(state);
        }
    }
    found
}

/// Multiset equality of root sets up to `tol`.
pub fn same_root_set(a: &[c64], b: &[c64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        match (0..b.len()).find(|&k| !used[k] && (b[k] - x).norm() <= tol) {
            Some(k) => {
                used[k] = true;
                true
            }
            None => false,
        }
    })
}

/// `Λ(u) = Π α(u, v_j) + d(u) Π α(v_j, u)`.
pub fn eval_lambda(u: c64, state: &BetheState) -> Result<c64> {
    if u == ZERO {
        return Err(Error::Pole("Λ(u) at u = 0".into()));
    }
    if state.roots.iter().any(|&v| (u - v).norm() < 1e-300) {
        return Err(Error::Pole(format!("Λ(u) at a root u = {u}")));
    }
    let eta = state.eta;
    let first: c64 = state.roots.iter().map(|&v| alpha(u, v, eta)).product();
    let second: c64 = state.roots.iter().map(|&v| alpha(v, u, eta)).product();
    Ok(first + vacuum_d(u, eta, state.n_sites) * second)
}

/// `Q(u) = Π (u − v_j)`.
pub fn q_function(u: c64, roots: &[c64]) -> c64 {
    roots.iter().map(|&v| u - v).product()
}

/// `|ΛQ(u) − Q(u−η) − d(u)Q(u+η)| / max(|ΛQ(u)|, 1)`.
pub fn verify_tq(state: &BetheState, u: c64) -> Result<f64> {
    let eta = state.eta;
    let lq = eval_lambda(u, state)? * q_function(u, &state.roots);
    let rhs = q_function(u - eta, &state.roots) + vacuum_d(u, eta, state.n_sites) * q_function(u + eta, &state.roots);
    Ok((lq - rhs).norm() / lq.norm().max(1.0))
}

/// Residue of `Λ` at `u = v_j`, by the trapezoid rule on a circle of radius
/// `radius` with `points` nodes.
pub fn lambda_residue(state: &BetheState, j: usize, radius: f64, points: usize) -> Result<c64> {
    let v = *state
        .roots
        .get(j)
        .ok_or_else(|| Error::InvalidParameter(format!("root index {j}")))?;
    let mut acc = ZERO;
    for k in 0..points {
        let e = c64::from_polar(1.0, 2.0 * PI * k as f64 / points as f64);
        acc += eval_lambda(v + e * radius, state)? * e;
    }
    Ok(acc * (radius / points as f64))
}

/// `C(v_1)⋯C(v_M)Ω`.
pub fn bethe_vector(spec: &ChainSpec, roots: &[c64]) -> Result<Vec<c64>> {
    let mut psi = vacuum(spec.n_sites);
    for &v in roots.iter().rev() {
        psi = build_monodromy(spec, v)?.c.apply(&psi);
    }
    Ok(psi)
}

/// `‖Mψ − λψ‖ / ‖ψ‖`.
pub fn eigenvector_defect(m: &ComplexMatrix, psi: &[c64], lambda: c64) -> Result<f64> {
    let norm = vec_norm(psi);
    if norm == 0.0 {
        return Err(Error::Singular("zero vector".into()));
    }
    Ok(vec_norm(&vec_sub(&m.apply(psi), &vec_scale(lambda, psi))) / norm)
}

/// Relative defect of the off-shell one-magnon action
/// `t(u)C(v)Ω = (α(u,v) + d(u)α(v,u))C(v)Ω − (β(u,v) + β(v,u)d(v))C(u)Ω
///  + ξ(1 − d(u))(1 − d(v))Ω`.
pub fn verify_one_magnon_action(spec: &ChainSpec, u: c64, v: c64) -> Result<f64> {
    if u == v {
        return Err(Error::Pole("u = v".into()));
    }
    let eta = spec.params.eta;
    let xi = spec.params.xi;
    let tu = build_monodromy(spec, u)?;
    let tv = build_monodromy(spec, v)?;
    let omega = vacuum(spec.n_sites);
    let cv = tv.c.apply(&omega);
    let cu = tu.c.apply(&omega);
    let lhs = tu.transfer().apply(&cv);
    let (du, dv) = (spec.vacuum_d(u), spec.vacuum_d(v));
    let k1 = alpha(u, v, eta) + du * alpha(v, u, eta);
    let k2 = beta(u, v, eta) + beta(v, u, eta) * dv;
    let k3 = xi * (ONE - du) * (ONE - dv);
    let rhs: Vec<c64> = (0..lhs.len()).map(|i| k1 * cv[i] - k2 * cu[i] + k3 * omega[i]).collect();
    Ok(relative_vec_difference(&lhs, &rhs))
}

/// `‖t(u)C(v)Ω − Λ(u)C(v)Ω‖ / ‖C(v)Ω‖` for a one-magnon root `v`.
pub fn one_magnon_eigen_defect(spec: &ChainSpec, u: c64, v: c64) -> Result<f64> {
    let state = BetheState::from_roots(spec.n_sites, spec.params.eta, vec![v])?;
    let psi = bethe_vector(spec, &[v])?;
    eigenvector_defect(&transfer_matrix(spec, u)?, &psi, eval_lambda(u, &state)?)
}

pub const SPECTRUM_MATCH_TOL: f64 = 1e-8;
pub const EIGENVECTOR_TOL: f64 = 1e-10;
pub const DEFORMED_DEFECT_FLOOR: f64 = 1e-4;

/// For each state: (i) `Λ(u)` lies in the exact spectrum of `t_ξ(u)`;
/// (ii) `C(v₁)⋯C(v_M)Ω` is an eigenvector of `t_ξ(u)`. Sub-check (ii) is an
/// expected failure for `M ≥ 2`, `ξ ≠ 0`, which passes only when the deformed
/// defect exceeds the floor while the undeformed defect stays below
/// [`EIGENVECTOR_TOL`].
pub fn verify_multi_magnon_spectrum(
    spec: &ChainSpec,
    states: &[BetheState],
    u: c64,
) -> Result<Vec<VerificationReport>> {
    let t = transfer_matrix(spec, u)?;
    let t0 = transfer_matrix(&spec.undeformed(), u)?;
    let spectrum = eigenvalues(&t)?;
    let mut out = Vec::with_capacity(2 * states.len());
    for state in states {
        let mut params = chain_params(spec);
        params.push(("u".into(), u.into()));
        params.push(("magnons".into(), state.magnons.into()));
        for (j, v) in state.roots.iter().enumerate() {
            params.push((format!("v{}", j + 1), (*v).into()));
        }
        let lambda = eval_lambda(u, state)?;
        let dist = distance_to_spectrum(lambda, &spectrum);
        out.push(VerificationReport::holds(
            "bethe.lambda_in_spectrum",
            params.clone(),
            dist,
            SPECTRUM_MATCH_TOL,
        ));
        let psi = bethe_vector(spec, &state.roots)?;
        let defect = eigenvector_defect(&t, &psi, lambda)?;
        if state.magnons >= 2 && spec.params.xi != ZERO {
            let psi0 = bethe_vector(&spec.undeformed(), &state.roots)?;
            let defect0 = eigenvector_defect(&t0, &psi0, lambda)?;
            let mut r = VerificationReport::expected_failure(
                "bethe.eigenvector",
                params,
                defect,
                DEFORMED_DEFECT_FLOOR,
            );
            r.pass = r.pass && defect0 < EIGENVECTOR_TOL;
            out.push(r.with_notes(format!("undeformed defect {defect0:.3e}")));
        } else {
            out.push(VerificationReport::holds("bethe.eigenvector", params, defect, EIGENVECTOR_TOL));
        }
    }
    Ok(out)
}

/// Sector bookkeeping for the completeness probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorCount {
    pub magnons: usize,
    pub dimension: usize,
    pub matched: usize,
    /// Exact eigenvalues with no Bethe state among the found ones.
    pub unmatched: Vec<c64>,
}

/// Matches `Λ(u)` of the found states against the exact eigenvalues of the
/// diagonal block of `t(u)` with `N − M` down spins.
pub fn sector_completeness(spec: &ChainSpec, states: &[BetheState], u: c64, tol: f64) -> Result<Vec<SectorCount>> {
    let t = transfer_matrix(spec, u)?;
    let n = spec.n_sites;
    let mut sectors: Vec<usize> = states.iter().map(|s| s.magnons).collect();
    sectors.sort_unstable();
    sectors.dedup();
    let mut out = Vec::new();
    for m in sectors {
        let idx: Vec<usize> = (0..spec.dim()).filter(|&i| down_count(i) as usize == n - m).collect();
        let exact = eigenvalues(&t.submatrix(&idx))?;
        let mut used = vec![false; exact.len()];
        for s in states.iter().filter(|s| s.magnons == m) {
            let lambda = eval_lambda(u, s)?;
            if let Some(k) = (0..exact.len())
                .filter(|&k| !used[k] && (exact[k] - lambda).norm() <= tol)
                .min_by(|&a, &b| (exact[a] - lambda).norm().total_cmp(&(exact[b] - lambda).norm()))
            {
                used[k] = true;
            }
        }
        let unmatched: Vec<c64> = (0..exact.len()).filter(|&k| !used[k]).map(|k| exact[k]).collect();
        out.push(SectorCount {
            magnons: m,
            dimension: idx.len(),
            matched: exact.len() - unmatched.len(),
            unmatched,
        });
    }
    Ok(out)
}
