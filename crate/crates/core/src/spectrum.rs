//! Eigenvalues of general complex matrices and multiset matching of spectra.
//!
//! The eigenvalue routine first permutes the matrix to block upper-triangular
//! form using the strongly connected components of its sparsity graph, then
//! runs a dense complex Schur decomposition on each irreducible diagonal block.
//! The reduction is exact (it only reads which entries are zero) and keeps
//! eigenvalues of block-triangular non-normal operators, such as the twisted
//! Hamiltonian, free of the `ε^{1/k}` error a dense solver would pick up on
//! defective clusters.

use nalgebra::linalg::{Schur, SymmetricEigen};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{c64, ComplexMatrix, ZERO};

const SCHUR_MAX_ITER: usize = 10_000;

/// Outcome of comparing two eigenvalue multisets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<c64>,
    pub matched: bool,
    pub max_pair_distance: f64,
    pub tolerance: f64,
}

/// Index sets of the irreducible diagonal blocks, in an order that makes the
/// permuted matrix block upper-triangular.
pub fn irreducible_blocks(m: &ComplexMatrix) -> Vec<Vec<usize>> {
    let n = m.rows();
    let mut g = DiGraph::<(), ()>::with_capacity(n, n);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if i != j && m.get(i, j) != ZERO {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    tarjan_scc(&g)
        .into_iter()
        .map(|comp| {
            let mut idx: Vec<usize> = comp.into_iter().map(|v| v.index()).collect();
            idx.sort_unstable();
            idx
        })
        .collect()
}

fn dense_eigenvalues(block: &ComplexMatrix) -> Result<Vec<c64>> {
    let n = block.rows();
    match n {
        1 => return Ok(vec![block.get(0, 0)]),
        2 => {
            let (a, b, c, d) = (block.get(0, 0), block.get(0, 1), block.get(1, 0), block.get(1, 1));
            let half_tr = (a + d) * 0.5;
            let disc = ((a - d) * 0.5).powi(2) + b * c;
            let s = disc.sqrt();
            let l1 = half_tr + s;
            let l2 = half_tr - s;
            // recover the smaller-magnitude root from the determinant
            let det = a * d - b * c;
            let (big, small) = if l1.norm() >= l2.norm() { (l1, l2) } else { (l2, l1) };
            let small = if big.norm() > 0.0 { det / big } else { small };
            return Ok(vec![big, small]);
        }
        _ => {}
    }
    let eig: Vec<c64> = if *block == block.adjoint() {
        SymmetricEigen::new(block.to_nalgebra())
            .eigenvalues
            .iter()
            .map(|&x| c64::new(x, 0.0))
            .collect()
    } else {
        schur_diagonal(block)?
    };
    if eig.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Decomposition("non-finite eigenvalue".into()));
    }
    Ok(eig)
}

/// Diagonal of the complex Schur form. nalgebra's shifted QR has no
/// exceptional shifts and can stall on structured blocks; one retry under a
/// diagonal similarity breaks the pattern without changing the spectrum.
fn schur_diagonal(block: &ComplexMatrix) -> Result<Vec<c64>> {
    let n = block.rows();
    let attempt = |m: &ComplexMatrix| {
        Schur::try_new(m.to_nalgebra(), f64::EPSILON, SCHUR_MAX_ITER).map(|s| {
            let (_, t) = s.unpack();
            (0..n).map(|i| t[(i, i)]).collect::<Vec<c64>>()
        })
    };
    if let Some(eig) = attempt(block) {
        return Ok(eig);
    }
    let scale: Vec<f64> = (0..n).map(|i| 1.0 + 0.37 * (i as f64 * 0.618_033_988_749_895).fract()).collect();
    let similar = ComplexMatrix::from_fn(n, n, |i, j| block.get(i, j) * (scale[i] / scale[j]));
    attempt(&similar).ok_or_else(|| Error::Decomposition(format!("complex Schur did not converge on {n}x{n} block")))
}

/// Full eigenvalue multiset of a square complex matrix, sorted by `(re, im)`.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<c64>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigenvalues of non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let mut out = Vec::with_capacity(m.rows());
    for block in irreducible_blocks(m) {
        out.extend(dense_eigenvalues(&m.submatrix(&block))?);
    }
    sort_lexicographic(&mut out);
    Ok(out)
}

pub fn sort_lexicographic(v: &mut [c64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Does a perfect matching exist using only pairs at distance `<= threshold`?
fn perfect_matching_within(s1: &[c64], s2: &[c64], threshold: f64) -> bool {
    let n = s1.len();
    let adj: Vec<Vec<usize>> = s1
        .iter()
        .map(|a| (0..n).filter(|&j| (a - s2[j]).norm() <= threshold).collect())
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; n];

    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if owner[v].is_none_or(|w| augment(w, adj, seen, owner)) {
                owner[v] = Some(u);
                return true;
            }
        }
        false
    }

    for u in 0..n {
        if adj[u].is_empty() {
            return false;
        }
        let mut seen = vec![false; n];
        if !augment(u, &adj, &mut seen, &mut owner) {
            return false;
        }
    }
    true
}

/// Smallest achievable maximum pair distance over all bijections.
fn bottleneck_distance(s1: &[c64], s2: &[c64]) -> f64 {
    let mut cands: Vec<f64> = s1
        .iter()
        .flat_map(|a| s2.iter().map(move |b| (a - b).norm()))
        .collect();
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    let (mut lo, mut hi) = (0usize, cands.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching_within(s1, s2, cands[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cands[lo]
}

/// Pairs two eigenvalue multisets. Both are sorted by `(re, im)` and paired
/// greedily; when that fails the tolerance, an optimal bottleneck assignment
/// decides.
pub fn match_spectra(s1: &[c64], s2: &[c64], tol: f64) -> Result<SpectrumReport> {
    if s1.len() != s2.len() {
        return Err(Error::Dimension(format!(
            "spectra have {} and {} eigenvalues",
            s1.len(),
            s2.len()
        )));
    }
    let (mut a, mut b) = (s1.to_vec(), s2.to_vec());
    sort_lexicographic(&mut a);
    sort_lexicographic(&mut b);
    if a.is_empty() {
        return Ok(SpectrumReport {
            eigenvalues: a,
            matched: true,
            max_pair_distance: 0.0,
            tolerance: tol,
        });
    }
    let greedy = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    let max_pair_distance = if greedy <= tol {
        greedy
    } else {
        bottleneck_distance(&a, &b).min(greedy)
    };
    Ok(SpectrumReport {
        eigenvalues: a,
        matched: max_pair_distance <= tol,
        max_pair_distance,
        tolerance: tol,
    })
}

/// Distance from `z` to the closest element of `spectrum`.
pub fn distance_to_spectrum(z: c64, spectrum: &[c64]) -> f64 {
    spectrum.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{kron, pauli, ONE};

    fn cr(x: f64) -> c64 {
        c64::new(x, 0.0)
    }

    #[test]
    fn diagonal_eigenvalues() {
        let m = ComplexMatrix::from_diagonal(&[cr(3.0), cr(1.0), cr(2.0)]);
        assert_eq!(eigenvalues(&m).unwrap(), vec![cr(1.0), cr(2.0), cr(3.0)]);
    }

    #[test]
    fn bond_operator_eigenvalues() {
        let sds = &(&kron(&pauli::x(), &pauli::x()) + &kron(&pauli::y(), &pauli::y()))
            + &kron(&pauli::z(), &pauli::z());
        let ev = eigenvalues(&sds).unwrap();
        let r = match_spectra(&ev, &[cr(1.0), cr(1.0), cr(1.0), cr(-3.0)], 1e-12).unwrap();
        assert!(r.matched, "{ev:?}");
    }

    #[test]
    fn nilpotent_eigenvalues() {
        let m = ComplexMatrix::from_real_rows(&[[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [-1.0, 5.0, 0.0]]);
        assert_eq!(eigenvalues(&m).unwrap(), vec![cr(0.0); 3]);
    }

    #[test]
    fn dense_complex_block() {
        // companion matrix of (x-1)(x-2i)(x+3)(x-0.5-0.5i)
        let roots = [cr(1.0), c64::new(0.0, 2.0), cr(-3.0), c64::new(0.5, 0.5)];
        let mut coeffs = vec![ONE];
        for r in roots {
            let mut next = vec![ZERO; coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k] -= c * r;
                next[k + 1] += c;
            }
            coeffs = next;
        }
        let n = roots.len();
        let m = ComplexMatrix::from_fn(n, n, |i, j| {
            if j == n - 1 {
                -coeffs[i]
            } else if i == j + 1 {
                ONE
            } else {
                ZERO
            }
        });
        let ev = eigenvalues(&m).unwrap();
        assert!(match_spectra(&ev, &roots, 1e-10).unwrap().matched, "{ev:?}");
    }

    #[test]
    fn non_square_rejected() {
        assert!(matches!(eigenvalues(&ComplexMatrix::zeros(2, 3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn matching_examples() {
        let r = match_spectra(&[cr(1.0), cr(2.0)], &[cr(2.0), cr(1.0)], 1e-8).unwrap();
        assert!(r.matched);
        assert_eq!(r.max_pair_distance, 0.0);
        assert!(match_spectra(&[cr(1.0)], &[cr(1.0 + 1e-12)], 1e-8).unwrap().matched);
        let r = match_spectra(&[cr(0.0)], &[cr(1.0)], 1e-8).unwrap();
        assert!(!r.matched);
        assert_eq!(r.max_pair_distance, 1.0);
        assert!(match_spectra(&[cr(0.0)], &[cr(1.0), cr(2.0)], 1e-8).is_err());
    }

    #[test]
    fn optimal_assignment_rescues_bad_greedy_order() {
        // lexicographic sort interleaves these differently
        let s1 = [c64::new(0.0, 1.0), c64::new(1e-9, -1.0)];
        let s2 = [c64::new(1e-9, 1.0), c64::new(0.0, -1.0)];
        let r = match_spectra(&s1, &s2, 1e-8).unwrap();
        assert!(r.matched);
        assert!(r.max_pair_distance <= 1e-9 + 1e-18);
    }

    #[test]
    fn open_chain_blocks_are_solved() {
        use crate::chain::{build_hamiltonian, Boundary, ChainSpec};
        use crate::twist::TwistParams;
        // the one-down-spin block of the open three-site chain stalls plain QR
        let spec = ChainSpec::new(3, TwistParams::with_xi(cr(0.0)), Boundary::Open).unwrap();
        let ev = eigenvalues(&build_hamiltonian(&spec).unwrap()).unwrap();
        // open XXX on three sites: 2 on the quartet, 0 and -4 on the doublets
        let expected = [2.0, 2.0, 2.0, 2.0, 0.0, 0.0, -4.0, -4.0].map(cr);
        assert!(match_spectra(&ev, &expected, 1e-12).unwrap().matched, "{ev:?}");
    }
}
