//! Seeded verification suites. Every check in the library is reachable from
//! exactly one [`Suite`]; [`suite_check_ids`] lists them.
//!
//! Each sampling task draws from its own ChaCha stream keyed by
//! `(seed, task, sample index)`, so samples can run on the rayon pool while
//! the report list stays in a fixed order.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bethe::{
    lambda_residue, one_magnon_eigen_defect, one_magnon_roots, sector_completeness, solve_bethe,
    solve_from_seeds, two_magnon_seeds, verify_multi_magnon_spectrum, verify_one_magnon_action, verify_tq,
    BetheState, SOLVER_TOL,
};
use crate::chain::{
    chain_params, extract_hamiltonian, grading_residual, rtt_components, transfer_commutator, transfer_matrix,
    transfer_matrix_poly, vacuum_residuals, verify_commutation_relations, verify_rtt, verify_spectrum_coincidence,
    Boundary, ChainSpec, HAMILTONIAN_SPECTRUM_TOL, TRANSFER_SPECTRUM_TOL,
};
use crate::config::{RunConfig, XiSampling};
use crate::error::{Error, Result};
use crate::fusion::{
    best_scalar_fit_residual, calibrate, fused_transfer, projector_leakage, t_system_residual,
    verify_fusion_relation,
};
use crate::report::{flag_misprints, Expectation, ParamValue, VerificationReport};
use crate::rmatrix::{
    build_f12, build_r, build_r_via_twist, build_r_xi, r_xi_from_twist, spectral_projectors, unitarity_probe,
    verify_regularity, verify_ybe,
};
use crate::symmetry::{compare_first_order, extract_t0, unipotency_residual, verify_coproducts, verify_symmetry_relations};
use crate::tensor::{c64, relative_difference, ComplexMatrix, ONE, ZERO};
use crate::twist::{
    nilpotent_exp, sigma_element, twisted_coproduct, undeformed_coproduct, universal_twist, universal_twist_series,
    verify_cocycle, Generator, SpinRep, TwistParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Ybe,
    Rtt,
    Cr,
    Spectrum,
    Bethe,
    Symmetry,
    Fusion,
    Twist,
    All,
}

impl Suite {
    /// Every suite except `All`, in the order `All` runs them.
    pub const CONCRETE: [Suite; 8] = [
        Suite::Ybe,
        Suite::Twist,
        Suite::Rtt,
        Suite::Cr,
        Suite::Spectrum,
        Suite::Bethe,
        Suite::Symmetry,
        Suite::Fusion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Ybe => "ybe",
            Suite::Rtt => "rtt",
            Suite::Cr => "cr",
            Suite::Spectrum => "spectrum",
            Suite::Bethe => "bethe",
            Suite::Symmetry => "symmetry",
            Suite::Fusion => "fusion",
            Suite::Twist => "twist",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::CONCRETE
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite '{s}'")))
    }
}

/// Check ids each concrete suite may emit.
pub fn suite_check_ids(suite: Suite) -> &'static [&'static str] {
    match suite {
        Suite::Ybe => &["ybe"],
        Suite::Twist => &[
            "twist.f12_anchor",
            "twist.series",
            "twist.cocycle",
            "twist.exp_sigma",
            "twist.rep_relations",
            "twist.e_coproduct_shift",
            "rmatrix.r_xi_construction",
            "rmatrix.r_construction",
            "rmatrix.regularity",
            "rmatrix.projectors",
            "rmatrix.unitarity",
        ],
        Suite::Rtt => &["rtt", "rtt.commuting", "rtt.polynomial_form"],
        Suite::Cr => &[
            "cr01", "cr02", "cr03", "cr04", "cr05", "cr06", "cr07", "cr08", "cr09", "cr10", "cr11", "cr12", "cr13",
            "cr14", "rtt.component",
        ],
        Suite::Spectrum => &[
            "spectrum.hamiltonian",
            "spectrum.transfer",
            "spectrum.grading",
            "hamiltonian.fit",
            "hamiltonian.doubled_pair_fit",
            "hamiltonian.commutes",
            "hamiltonian.displayed_commutator",
            "hamiltonian.derivative_crosscheck",
        ],
        Suite::Bethe => &[
            "bethe.vacuum",
            "bethe.one_magnon_action",
            "bethe.one_magnon_root",
            "bethe.one_magnon_eigen",
            "bethe.two_magnon_root",
            "bethe.lambda_in_spectrum",
            "bethe.eigenvector",
            "bethe.tq",
            "bethe.residue",
            "bethe.completeness",
        ],
        Suite::Symmetry => &[
            "sym.t0_upper_block",
            "sym.t0_inverse",
            "sym.unipotent",
            "sym.first_order",
            "sym.first_order_literal",
            "sym01",
            "sym02",
            "sym03",
            "sym04",
            "sym05a",
            "sym05b",
            "sym06",
            "sym07",
            "sym08",
            "sym09",
            "sym.e_commutes_with_t",
            "coproduct.e",
            "coproduct.g",
            "coproduct.g_swapped_order",
        ],
        Suite::Fusion => &[
            "fusion.relation_l1",
            "fusion.relation_l2",
            "fusion.best_scalar_fit_l2",
            "fusion.t_system_l1",
            "fusion.t_system_l2",
            "fusion.projector_leakage",
            "fusion.commuting",
            "fusion.calibration",
        ],
        Suite::All => &[],
    }
}

/// Runs `suite` and returns its reports in a deterministic order.
pub fn run_suite(cfg: &RunConfig, suite: Suite) -> Result<Vec<VerificationReport>> {
    cfg.validate()?;
    let mut out = match suite {
        Suite::All => {
            let mut all = Vec::new();
            for s in Suite::CONCRETE {
                all.extend(run_suite(cfg, s)?);
            }
            return Ok(all);
        }
        Suite::Ybe => ybe_suite(cfg),
        Suite::Twist => twist_suite(cfg),
        Suite::Rtt => rtt_suite(cfg),
        Suite::Cr => cr_suite(cfg),
        Suite::Spectrum => spectrum_suite(cfg),
        Suite::Bethe => bethe_suite(cfg),
        Suite::Symmetry => symmetry_suite(cfg),
        Suite::Fusion => fusion_suite(cfg),
    };
    for r in &mut out {
        retune(r, cfg);
    }
    // printed relations that fail everywhere are flagged, never rewritten
    if matches!(suite, Suite::Cr | Suite::Symmetry) {
        flag_misprints(&mut out);
    }
    Ok(out)
}

/// Applies a configured tolerance override and recomputes `pass`.
fn retune(r: &mut VerificationReport, cfg: &RunConfig) {
    let Some(&tol) = cfg.tolerance_overrides.get(&r.check_id) else {
        return;
    };
    if r.residual.is_infinite() && r.notes.starts_with("error") {
        return;
    }
    match r.expectation {
        Expectation::Holds => {
            r.tolerance = tol;
            r.pass = r.residual <= tol;
        }
        Expectation::ExpectedFailure => {
            // keep any side condition that failed independently of the floor
            let side_ok = r.pass || r.residual <= r.tolerance;
            r.tolerance = tol;
            r.pass = side_ok && r.residual > tol;
        }
        Expectation::SuspectedMisprint | Expectation::Observation => {}
    }
}

/// Per-sample random source.
pub struct Sampler {
    rng: ChaCha8Rng,
    fixed_xi: Option<c64>,
    xi_sampling: XiSampling,
    pub index: usize,
}

/// Smallest allowed distance between a sampled point and a pole.
pub const POLE_MARGIN: f64 = 0.1;
pub const ANNULUS: (f64, f64) = (0.5, 5.0);

impl Sampler {
    pub fn new(cfg: &RunConfig, task: &str, index: usize) -> Self {
        // FNV-1a over the task name, mixed with seed and index
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in task.bytes() {
            h = (h ^ b as u64).wrapping_mul(0x100_0000_01b3);
        }
        let key = cfg.seed ^ h.rotate_left(17) ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        Self {
            rng: ChaCha8Rng::seed_from_u64(key),
            fixed_xi: cfg.xi,
            xi_sampling: cfg.xi_sampling,
            index,
        }
    }

    /// The configured `ξ`, or a fresh draw.
    pub fn xi(&mut self) -> c64 {
        if let Some(xi) = self.fixed_xi {
            return xi;
        }
        match self.xi_sampling {
            XiSampling::Real => c64::new(self.rng.random_range(-1.0..=1.0), 0.0),
            XiSampling::Disk => {
                let r = self.rng.random::<f64>().sqrt();
                c64::from_polar(r, self.rng.random_range(0.0..std::f64::consts::TAU))
            }
        }
    }

    /// Uniform point on the annulus `0.5 ≤ |u| ≤ 5`, at least
    /// [`POLE_MARGIN`] away from every point in `avoid`.
    pub fn point(&mut self, avoid: &[c64]) -> c64 {
        let (lo, hi) = (ANNULUS.0 * ANNULUS.0, ANNULUS.1 * ANNULUS.1);
        loop {
            let r = self.rng.random_range(lo..=hi).sqrt();
            let z = c64::from_polar(r, self.rng.random_range(0.0..std::f64::consts::TAU));
            if avoid.iter().all(|a| (z - a).norm() >= POLE_MARGIN) {
                return z;
            }
        }
    }

    /// Second point for a two-point relation: avoids `u` and `u ± η`.
    pub fn partner(&mut self, u: c64, eta: c64) -> c64 {
        self.point(&[u, u + eta, u - eta])
    }
}

fn samples(cfg: &RunConfig, default: usize) -> usize {
    cfg.samples.unwrap_or(default)
}

/// Runs `count` independent samples of `task` in parallel, keeping sample
/// order. A failing sample becomes one errored report.
fn sampled<F>(cfg: &RunConfig, task: &str, error_id: &str, count: usize, f: F) -> Vec<VerificationReport>
where
    F: Fn(&mut Sampler) -> Result<Vec<VerificationReport>> + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut s = Sampler::new(cfg, task, i);
            f(&mut s).unwrap_or_else(|e| {
                vec![VerificationReport::errored(
                    error_id,
                    vec![("task".into(), task.into()), ("sample".into(), i.into())],
                    0.0,
                    &e,
                )]
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn once<F>(cfg: &RunConfig, task: &str, error_id: &str, f: F) -> Vec<VerificationReport>
where
    F: Fn(&mut Sampler) -> Result<Vec<VerificationReport>> + Sync,
{
    sampled(cfg, task, error_id, 1, f)
}

fn chain(cfg: &RunConfig, n: usize, xi: c64) -> Result<ChainSpec> {
    ChainSpec::periodic(n, TwistParams::new(xi, cfg.eta)?)
}

fn param(k: &str, v: impl Into<ParamValue>) -> (String, ParamValue) {
    (k.to_string(), v.into())
}

fn ybe_suite(cfg: &RunConfig) -> Vec<VerificationReport> {
    let tol = cfg.tolerance("ybe", 1e-12);
    sampled(cfg, "ybe", "ybe", samples(cfg, 100), |s| {
        let params = TwistParams::new(s.xi(), cfg.eta)?;
        let u = s.point(&[]);
        // R(u − v) has its pole at u = v
        let v = s.point(&[u]);
        let res = verify_ybe(u, v, &params)?;
        Ok(vec![VerificationReport::holds(
            "ybe",
            vec![param("xi", params.xi), param("eta", params.eta), param("u", u), param("v", v)],
            res,
            tol,
        )])
    })
}

fn twist_suite(cfg: &RunConfig) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    let half = SpinRep::from_twice_spin(1);
    out.extend(once(cfg, "twist.f12_anchor", "twist.f12_anchor", |_| {
        Ok([0.0, 1.0, -2.0, 0.5]
            .into_iter()
            .map(|x| {
                let xi = c64::new(x, 0.0);
                let diff = (&universal_twist(&half, &half, xi) - &build_f12(xi)).max_abs();
                VerificationReport::holds("twist.f12_anchor", vec![param("xi", xi)], diff, 0.0)
                    .with_notes("entry-exact")
            })
            .collect())
    }));
    out.extend(sampled(cfg, "twist.series", "twist.series", samples(cfg, 5), |s| {
        let xi = s.xi();
        Ok([(1, 1), (2, 1), (1, 2), (2, 3), (3, 3)]
            .into_iter()
            .map(|(a, b)| {
                let (r1, r2) = (SpinRep::from_twice_spin(a), SpinRep::from_twice_spin(b));
                let res = relative_difference(&universal_twist(&r1, &r2, xi), &universal_twist_series(&r1, &r2, xi));
                VerificationReport::holds(
                    "twist.series",
                    vec![param("xi", xi), param("spin1", r1.spin()), param("spin2", r2.spin())],
                    res,
                    1e-12,
                )
            })
            .collect())
    }));
    out.extend(sampled(cfg, "twist.cocycle", "twist.cocycle", samples(cfg, 10), |s| {
        let xi = s.xi();
        Ok([(1, 1, 1), (1, 1, 2)]
            .into_iter()
            .map(|(a, b, c)| {
                let reps = [a, b, c].map(SpinRep::from_twice_spin);
                let res = verify_cocycle(&reps[0], &reps[1], &reps[2], xi);
                let spins = format!("{}/{}/{}", reps[0].spin(), reps[1].spin(), reps[2].spin());
                VerificationReport::holds("twist.cocycle", vec![param("xi", xi), param("spins", spins)], res, 1e-12)
            })
            .collect())
    }));
    out.extend(sampled(cfg, "twist.exp_sigma", "twist.exp_sigma", samples(cfg, 10), |s| {
        let xi = s.xi();
        Ok((1..=3)
            .map(|two_s| {
                let rep = SpinRep::from_twice_spin(two_s);
                let lhs = nilpotent_exp(&sigma_element(&rep, xi).scale(-ONE));
                let rhs = &ComplexMatrix::identity(rep.dim()) - &rep.e.scale(2.0 * xi);
                VerificationReport::holds(
                    "twist.exp_sigma",
                    vec![param("xi", xi), param("spin", rep.spin())],
                    (&lhs - &rhs).max_abs(),
                    1e-13,
                )
            })
            .collect())
    }));
    out.extend(once(cfg, "twist.rep_relations", "twist.rep_relations", |_| {
        Ok((1..=4)
            .map(|two_s| {
                let rep = SpinRep::from_twice_spin(two_s);
                VerificationReport::holds(
                    "twist.rep_relations",
                    vec![param("spin", rep.spin())],
                    rep.relation_residual(),
                    1e-12,
                )
            })
            .collect())
    }));
    out.extend(sampled(cfg, "twist.e_coproduct_shift", "twist.e_coproduct_shift", samples(cfg, 3), |s| {
        let xi = s.xi();
        let de = twisted_coproduct(&half, &half, Generator::E, xi)?;
        let d0 = undeformed_coproduct(&half, &half, Generator::E);
        Ok(vec![VerificationReport::observation(
            "twist.e_coproduct_shift",
            vec![param("xi", xi)],
            relative_difference(&de, &d0),
        )
        .with_notes("twisted minus untwisted coproduct of e")])
    }));
    out.extend(sampled(cfg, "rmatrix.construction", "rmatrix.r_construction", samples(cfg, 50), |s| {
        let params = TwistParams::new(s.xi(), cfg.eta)?;
        let u = s.point(&[]);
        let p = vec![param("xi", params.xi), param("eta", params.eta), param("u", u)];
        Ok(vec![
            VerificationReport::holds(
                "rmatrix.r_xi_construction",
                p[..2].to_vec(),
                (&build_r_xi(params.xi) - &r_xi_from_twist(params.xi)).max_abs(),
                cfg.tolerance("rmatrix.r_xi_construction", 1e-13),
            ),
            VerificationReport::holds(
                "rmatrix.r_construction",
                p,
                (&build_r(u, &params)? - &build_r_via_twist(u, &params)?).max_abs(),
                cfg.tolerance("rmatrix.r_construction", 1e-13),
            ),
        ])
    }));
    out.extend(sampled(cfg, "rmatrix.structure", "rmatrix.regularity", samples(cfg, 5), |s| {
        let params = TwistParams::new(s.xi(), cfg.eta)?;
        let u = s.point(&[]);
        let (plus, minus) = spectral_projectors(&params);
        let id = ComplexMatrix::identity(4);
        let proj = [
            (&plus.matmul(&plus) - &plus).max_abs(),
            (&minus.matmul(&minus) - &minus).max_abs(),
            plus.matmul(&minus).max_abs(),
            (&(&plus + &minus) - &id).max_abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        let (scalar, dev) = unitarity_probe(u, &params)?;
        let p = vec![param("xi", params.xi), param("eta", params.eta)];
        Ok(vec![
            VerificationReport::holds("rmatrix.regularity", p.clone(), verify_regularity(&params), 1e-13),
            VerificationReport::holds("rmatrix.projectors", p.clone(), proj, 1e-12)
                .with_notes("idempotent, orthogonal, complete"),
            VerificationReport::observation("rmatrix.unitarity", [p, vec![param("u", u)]].concat(), dev)
                .with_notes(format!("best scalar {}", crate::config::format_complex(scalar))),
        ])
    }));
    out
}

fn rtt_suite(cfg: &RunConfig) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    let rtt_tol = cfg.tolerance("rtt", 1e-11);
    for n in 1..=cfg.n_sites {
        out.extend(sampled(cfg, &format!("rtt/{n}"), "rtt", samples(cfg, 20), |s| {
            let spec = chain(cfg, n, s.xi())?;
            let u = s.point(&[]);
            let v = s.point(&[u]);
            let mut p = chain_params(&spec);
            p.extend([param("u", u), param("v", v)]);
            let poly = relative_difference(
                &transfer_matrix_poly(&spec, u)?,
                &transfer_matrix(&spec, u)?.scale(u.powu(n as u32)),
            );
            Ok(vec![
                VerificationReport::holds("rtt", p.clone(), verify_rtt(&spec, u, v)?, rtt_tol),
                VerificationReport::holds("rtt.polynomial_form", p, poly, 1e-12)
                    .with_notes("polynomial transfer matrix equals u^N t(u)"),
            ])
        }));
    }
    for n in 2..=cfg.n_sites {
        out.extend(sampled(cfg, &format!("rtt.commuting/{n}"), "rtt.commuting", samples(cfg, 20), |s| {
            let spec = chain(cfg, n, s.xi())?;
            let u = s.point(&[]);
            let v = s.point(&[u]);
            let mut p = chain_params(&spec);
            p.extend([param("u", u), param("v", v)]);
            Ok(vec![VerificationReport::holds(
                "rtt.commuting",
                p,
                transfer_commutator(&spec, u, v)?,
                cfg.tolerance("rtt.commuting", 1e-11),
            )])
        }));
    }
    out
}

fn cr_suite(cfg: &RunConfig) -> Vec<VerificationReport> {
    // one site makes B(u)B(v) vanish and several relations degenerate
    let sizes: Vec<usize> = if cfg.n_sites == 1 { vec![1] } else { (2..=cfg.n_sites).collect() };
    let mut out = Vec::new();
    for n in sizes {
        out.extend(sampled(cfg, &format!("cr/{n}"), "cr", samples(cfg, 5), |s| {
            let spec = chain(cfg, n, s.xi())?;
            let u = s.point(&[]);
            let v = s.partner(u, cfg.eta);
            let mut reports = verify_commutation_relations(&spec, u, v, 1e-11)?;
            let mut p = chain_params(&spec);
            p.extend([param("u", u), param("v", v)]);
            for (label, res) in rtt_components(&spec, u, v)? {
                let mut q = p.clone();
                q.push(param("component", label));
                reports.push(VerificationReport::holds("rtt.component", q, res, 1e-11));
            }
            Ok(reports)
        }));
    }
    out
}

fn spectrum_suite(cfg: &RunConfig) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    let xis: Vec<c64> = match cfg.xi {
        Some(xi) => vec![xi],
        None => [0.3, 0.9, 10.0].map(|x| c64::new(x, 0.0)).to_vec(),
    };
    for n in 2..=cfg.n_sites {
        for (k, &xi) in xis.iter().enumerate() {
            out.extend(once(cfg, &format!("spectrum/{n}/{k}"), "spectrum.hamiltonian", |s| {
                let spec = ChainSpec::new(n, TwistParams::new(xi, cfg.eta)?, cfg.boundary)?;
                let us: Vec<c64> = (0..samples(cfg, 5)).map(|_| s.point(&[])).collect();
                let sc = verify_spectrum_coincidence(&spec, &us)?;
                let mut p = chain_params(&spec);
                p.push(param("boundary", if cfg.boundary == Boundary::Open { "open" } else { "periodic" }));
                let mut reports = vec![
                    VerificationReport::holds(
                        "spectrum.hamiltonian",
                        p.clone(),
                        sc.hamiltonian.max_pair_distance,
                        cfg.tolerance("spectrum.hamiltonian", HAMILTONIAN_SPECTRUM_TOL),
                    ),
                    VerificationReport::holds("spectrum.grading", p.clone(), grading_residual(&spec)?, 0.0)
                        .with_notes("deformation only lowers the total spin"),
                ];
                for (u, r) in sc.transfer {
                    let mut q = p.clone();
                    q.push(param("u", u));
                    reports.push(VerificationReport::holds(
                        "spectrum.transfer",
                        q,
                        r.max_pair_distance,
                        cfg.tolerance("spectrum.transfer", TRANSFER_SPECTRUM_TOL),
                    ));
                }
                Ok(reports)
            }));
        }
    }
    let fit_xis: Vec<c64> = match cfg.xi {
        Some(xi) => vec![xi],
        None => vec![ZERO, c64::new(0.5, 0.0)],
    };
    let fit_sizes: Vec<usize> = if cfg.n_sites < 3 { (2..=cfg.n_sites).collect() } else { (3..=cfg.n_sites).collect() };
    for n in fit_sizes {
        for (k, &xi) in fit_xis.iter().enumerate() {
            out.extend(once(cfg, &format!("hamiltonian/{n}/{k}"), "hamiltonian.fit", |s| {
                let spec = chain(cfg, n, xi)?;
                let pair = extract_hamiltonian(&spec)?;
                let u = s.point(&[]);
                let t = transfer_matrix(&spec, u)?;
                let comm = |h: &ComplexMatrix| relative_difference(&h.matmul(&t), &t.matmul(h));
                let p = chain_params(&spec);
                let mut pu = p.clone();
                pu.push(param("u", u));
                Ok(vec![
                    VerificationReport::holds("hamiltonian.fit", p.clone(), pair.fit_residual, 1e-9).with_notes(format!(
                        "scale {} shift {}",
                        crate::config::format_complex(pair.scale_a),
                        crate::config::format_complex(pair.shift_b)
                    )),
                    VerificationReport::observation("hamiltonian.doubled_pair_fit", p.clone(), pair.doubled_pair_fit_residual)
                        .with_notes("fit against the displayed form with the pair term doubled"),
                    VerificationReport::holds("hamiltonian.commutes", pu.clone(), comm(&pair.h_log), 1e-10),
                    VerificationReport::observation("hamiltonian.displayed_commutator", pu, comm(&pair.h_displayed)),
                    VerificationReport::holds("hamiltonian.derivative_crosscheck", p, pair.derivative_crosscheck, 1e-8)
                        .with_notes("exact against central-difference derivative"),
                ])
            }));
        }
    }
    out
}

fn state_params(spec: &ChainSpec, state: &BetheState) -> Vec<(String, ParamValue)> {
    let mut p = chain_params(spec);
    p.push(param("magnons", state.magnons));
    for (j, v) in state.roots.iter().enumerate() {
        p.push(param(&format!("v{}", j + 1), *v));
    }
    p
}

fn bethe_suite(cfg: &RunConfig) -> Vec<VerificationReport> {
    let n = cfg.n_sites;
    let eta = cfg.eta;
    let mut out = Vec::new();
    for m in 1..=n {
        out.extend(sampled(cfg, &format!("bethe.vacuum/{m}"), "bethe.vacuum", samples(cfg, 5), |s| {
            let spec = chain(cfg, m, s.xi())?;
            let u = s.point(&[eta]);
            let mut p = chain_params(&spec);
            p.push(param("u", u));
            let res = vacuum_residuals(&spec, u)?.max();
            Ok(vec![VerificationReport::holds("bethe.vacuum", p, res, 1e-11)])
        }));
    }
    out.extend(sampled(cfg, "bethe.one_magnon_action", "bethe.one_magnon_action", samples(cfg, 20), |s| {
        let spec = chain(cfg, n, s.xi())?;
        let u = s.point(&[]);
        let v = s.point(&[u]);
        let mut p = chain_params(&spec);
        p.extend([param("u", u), param("v", v)]);
        Ok(vec![VerificationReport::holds(
            "bethe.one_magnon_action",
            p,
            verify_one_magnon_action(&spec, u, v)?,
            1e-11,
        )])
    }));
    let one: Vec<BetheState> = one_magnon_roots(n, eta)
        .into_iter()
        .filter_map(|r| solve_bethe(n, 1, eta, &[r]).ok())
        .collect();
    let seeds: Vec<Vec<c64>> = if n >= 4 {
        two_magnon_seeds(n, eta).into_iter().map(|s| s.to_vec()).collect()
    } else {
        Vec::new()
    };
    let two = solve_from_seeds(n, eta, &seeds);
    let deformed_xi = cfg.xi.unwrap_or(c64::new(0.5, 0.0));
    let Ok(spec) = chain(cfg, n, deformed_xi) else {
        return out;
    };
    out.extend(once(cfg, "bethe.roots", "bethe.one_magnon_root", |s| {
        let mut reports = Vec::new();
        let u = s.point(&[]);
        for state in &one {
            let mut p = state_params(&spec, state);
            reports.push(VerificationReport::holds("bethe.one_magnon_root", p.clone(), state.residual, SOLVER_TOL));
            p.push(param("u", u));
            let defect = one_magnon_eigen_defect(&spec, u, state.roots[0])?;
            reports.push(VerificationReport::holds("bethe.one_magnon_eigen", p, defect, 1e-10));
        }
        for state in &two {
            reports.push(VerificationReport::holds(
                "bethe.two_magnon_root",
                state_params(&spec, state),
                state.residual,
                SOLVER_TOL,
            ));
        }
        if n >= 4 && two.is_empty() {
            return Err(Error::NonConvergence {
                iterations: crate::bethe::MAX_ITERATIONS,
                residual: f64::INFINITY,
                last_iterate: Vec::new(),
            });
        }
        Ok(reports)
    }));
    let states: Vec<BetheState> = one.iter().chain(&two).cloned().collect();
    out.extend(sampled(cfg, "bethe.spectrum", "bethe.lambda_in_spectrum", samples(cfg, 3), |s| {
        let roots: Vec<c64> = states.iter().flat_map(|st| st.roots.clone()).collect();
        let u = s.point(&roots);
        verify_multi_magnon_spectrum(&spec, &states, u)
    }));
    out.extend(once(cfg, "bethe.tq", "bethe.tq", |s| {
        let mut reports = Vec::new();
        for state in &states {
            for _ in 0..10 {
                let u = s.point(&state.roots);
                let mut p = state_params(&spec, state);
                p.push(param("u", u));
                reports.push(VerificationReport::holds("bethe.tq", p, verify_tq(state, u)?, 1e-10));
            }
            for j in 0..state.magnons {
                let mut p = state_params(&spec, state);
                p.push(param("root", j));
                let res = lambda_residue(state, j, 1e-3, 64)?.norm();
                reports.push(
                    VerificationReport::holds("bethe.residue", p, res, 1e-9).with_notes("Λ is regular at each root"),
                );
            }
        }
        Ok(reports)
    }));
    out.extend(once(cfg, "bethe.completeness", "bethe.completeness", |s| {
        let u = s.point(&[]);
        let sectors = sector_completeness(&spec, &states, u, 1e-8)?;
        Ok(sectors
            .into_iter()
            .map(|c| {
                let mut p = chain_params(&spec);
                p.extend([param("u", u), param("magnons", c.magnons), param("sector_dim", c.dimension)]);
                VerificationReport::observation("bethe.completeness", p, c.unmatched.len() as f64)
                    .with_notes(format!("{} of {} eigenvalues reached by found roots", c.matched, c.dimension))
            })
            .collect())
    }));
    out
}

fn symmetry_suite(cfg: &RunConfig) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    for n in 1..=cfg.n_sites {
        out.extend(sampled(cfg, &format!("sym.t0/{n}"), "sym.t0_upper_block", samples(cfg, 3), |s| {
            let spec = chain(cfg, n, s.xi())?;
            let data = extract_t0(&spec)?;
            let fo = compare_first_order(&spec, &data)?;
            let p = chain_params(&spec);
            Ok(vec![
                VerificationReport::holds("sym.t0_upper_block", p.clone(), data.zero_block_residual, 1e-13),
                VerificationReport::holds("sym.t0_inverse", p.clone(), data.inverse_residual, 1e-12),
                VerificationReport::holds("sym.unipotent", p.clone(), unipotency_residual(&data, n), 1e-10),
                VerificationReport::holds("sym.first_order", p.clone(), fo.positional, 1e-12),
                VerificationReport::observation("sym.first_order_literal", p, fo.literal)
                    .with_notes("product ranges read literally"),
            ])
        }));
        out.extend(sampled(cfg, &format!("sym.relations/{n}"), "sym01", samples(cfg, 5), |s| {
            let spec = chain(cfg, n, s.xi())?;
            verify_symmetry_relations(&spec, s.point(&[]))
        }));
    }
    for (n1, n2) in [(1, 1), (2, 1), (2, 2)] {
        out.extend(sampled(cfg, &format!("coproduct/{n1}/{n2}"), "coproduct.g", samples(cfg, 3), |s| {
            verify_coproducts(n1, n2, s.xi())
        }));
    }
    out
}

fn fusion_suite(cfg: &RunConfig) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    let xis: Vec<c64> = match cfg.xi {
        Some(xi) => vec![xi],
        None => vec![ZERO, c64::new(0.4, 0.0)],
    };
    let eta = cfg.eta;
    for n in 1..=cfg.n_sites {
        for (k, &xi) in xis.iter().enumerate() {
            out.extend(sampled(cfg, &format!("fusion/{n}/{k}"), "fusion.relation_l1", samples(cfg, 3), |s| {
                let spec = chain(cfg, n, xi)?;
                // fused spaces sit at u, u − η, u − 2η; keep all of them off the poles
                let u = s.point(&[eta, eta * 2.0, eta * 3.0]);
                let v = s.point(&[u, eta, eta * 2.0]);
                let mut p = chain_params(&spec);
                p.push(param("u", u));
                let mut reports = Vec::new();
                for (level, id, sys) in [(1, "fusion.relation_l1", "fusion.t_system_l1"), (2, "fusion.relation_l2", "fusion.t_system_l2")] {
                    reports.push(VerificationReport::holds(
                        id,
                        p.clone(),
                        verify_fusion_relation(&spec, level, u)?,
                        cfg.tolerance(id, 1e-9),
                    ));
                    reports.push(VerificationReport::holds(sys, p.clone(), t_system_residual(&spec, level, u)?, 1e-11));
                }
                reports.push(
                    VerificationReport::observation("fusion.best_scalar_fit_l2", p.clone(), best_scalar_fit_residual(&spec, 2, u)?)
                        .with_notes("best scalar normalization of level 3"),
                );
                for level in [2, 3] {
                    let mut q = p.clone();
                    q.push(param("level", level));
                    reports.push(VerificationReport::holds(
                        "fusion.projector_leakage",
                        q,
                        projector_leakage(&spec, level, u)?,
                        1e-12,
                    ));
                }
                let t1 = fused_transfer(&spec, 1, v)?;
                for level in [2, 3] {
                    let tl = fused_transfer(&spec, level, u)?;
                    let mut q = p.clone();
                    q.extend([param("v", v), param("level", level)]);
                    reports.push(VerificationReport::holds(
                        "fusion.commuting",
                        q,
                        relative_difference(&tl.matmul(&t1), &t1.matmul(&tl)),
                        1e-10,
                    ));
                }
                Ok(reports)
            }));
        }
    }
    out.extend(sampled(cfg, "fusion.calibration", "fusion.calibration", samples(cfg, 3), |s| {
        let u = s.point(&[eta, eta * 2.0, eta * 3.0]);
        let c = calibrate(eta, u)?;
        let res = c.level0_mismatch.max(c.level0_scalar_residual).max(c.level3_fit_residual);
        Ok(vec![VerificationReport::holds(
            "fusion.calibration",
            vec![param("eta", eta), param("u", u)],
            res,
            1e-12,
        )
        .with_notes("one-site undeformed fit of the level scalars")])
    }));
    out
}
