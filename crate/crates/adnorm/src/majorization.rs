//! Strong majorization on eigenvalue vectors, doubly stochastic witnesses via
//! T-transforms, Birkhoff decompositions into permutation matrices, and
//! constructive membership in the convex hull of a unitary orbit.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::matrix::{spectral, CMatrix, MatrixError, SkewHermitian};

pub use crate::matrix::pinch;

#[derive(Debug, Error)]
pub enum MajorizationError {
    #[error("vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("precondition violated: w does not majorize z (worst gap {0:.3e})")]
    NotMajorized(f64),
    #[error("Birkhoff decomposition stagnated with residual mass {0:.3e}")]
    BirkhoffStagnation(f64),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Scale-aware default tolerance for majorization comparisons.
pub fn default_tol(w: &[f64]) -> f64 {
    1e-9 * (1.0 + w.iter().map(|t| t.abs()).sum::<f64>())
}

/// Partial-sum evidence for `z < w` (strong majorization).
#[derive(Debug, Clone, Serialize)]
pub struct MajorizationReport {
    pub w_sorted: Vec<f64>,
    pub z_sorted: Vec<f64>,
    /// `sum_1^k w^v - sum_1^k z^v` for k = 1..n.
    pub partial_gaps: Vec<f64>,
    pub trace_gap: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Does `w` strongly majorize `z`? Partial sums of decreasing rearrangements
/// must dominate, with equal totals.
pub fn majorizes(w: &[f64], z: &[f64], tol: f64) -> Result<MajorizationReport, MajorizationError> {
    if w.len() != z.len() {
        return Err(MajorizationError::LengthMismatch(w.len(), z.len()));
    }
    let w_sorted = sorted_desc(w);
    let z_sorted = sorted_desc(z);
    let mut partial_gaps = Vec::with_capacity(w.len());
    let mut acc = 0.0;
    for (a, b) in w_sorted.iter().zip(&z_sorted) {
        acc += a - b;
        partial_gaps.push(acc);
    }
    let trace_gap = acc;
    let holds =
        partial_gaps.iter().all(|g| *g >= -tol) && trace_gap.abs() <= tol;
    Ok(MajorizationReport {
        w_sorted,
        z_sorted,
        partial_gaps,
        trace_gap,
        tolerance: tol,
        holds,
    })
}

/// Doubly stochastic `A` with `z = A w`, built from a finite chain of
/// T-transforms on the decreasing rearrangements and then conjugated back to
/// the original coordinate orders.
pub fn ds_witness(w: &[f64], z: &[f64]) -> Result<DMatrix<f64>, MajorizationError> {
    let _n = w.len();
    let tol = default_tol(w);
    let report = majorizes(w, z, tol)?;
    if !report.holds {
        let worst = report
            .partial_gaps
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
            .min(-report.trace_gap.abs());
        return Err(MajorizationError::NotMajorized(worst));
    }

    let a_sorted = t_transform_chain(&report.w_sorted, &report.z_sorted, tol);

    // z = Pz^T * A_sorted * Pw * w, where Pw w = w_sorted and Pz z = z_sorted.
    let pw = sort_permutation_matrix(w);
    let pz = sort_permutation_matrix(z);
    Ok(pz.transpose() * a_sorted * pw)
}

/// T-transform chain mapping sorted `w` onto sorted `z`; classic
/// Hardy-Littlewood-Polya pairing: the smallest deficient index `k` receives
/// mass from the largest surplus index `j < k`. At most `n - 1` transforms.
fn t_transform_chain(w_sorted: &[f64], z_sorted: &[f64], tol: f64) -> DMatrix<f64> {
    let n = w_sorted.len();
    let mut a = w_sorted.to_vec();
    let mut acc = DMatrix::<f64>::identity(n, n);
    for _ in 0..n {
        let Some(k) = (0..n).find(|&i| a[i] < z_sorted[i] - tol) else {
            break;
        };
        let j = (0..k)
            .rev()
            .find(|&i| a[i] > z_sorted[i] + tol)
            .expect("majorization guarantees a surplus index before the deficit");
        let delta = (a[j] - z_sorted[j]).min(z_sorted[k] - a[k]);
        let lambda = delta / (a[j] - a[k]);
        let mut t = DMatrix::<f64>::identity(n, n);
        t[(j, j)] = 1.0 - lambda;
        t[(j, k)] = lambda;
        t[(k, k)] = 1.0 - lambda;
        t[(k, j)] = lambda;
        a[j] -= delta;
        a[k] += delta;
        acc = t * acc;
    }
    acc
}

/// Permutation matrix `P` with `(P v)_i = v_sorted_desc[i]`.
fn sort_permutation_matrix(v: &[f64]) -> DMatrix<f64> {
    let order = crate::gauge::sort_indices_desc(v);
    let n = v.len();
    let mut p = DMatrix::<f64>::zeros(n, n);
    for (row, &src) in order.iter().enumerate() {
        p[(row, src)] = 1.0;
    }
    p
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// `Z` lies in the convex hull of the unitary orbit of `W` iff the eigenvalue
/// vector of `W` strongly majorizes that of `Z` (trace equality included).
pub fn in_orbit_hull(
    z: &SkewHermitian,
    w: &SkewHermitian,
    tol: f64,
) -> Result<bool, MajorizationError> {
    let ez = spectral(z, None)?;
    let ew = spectral(w, None)?;
    Ok(majorizes(ew.eigenvalues(), ez.eigenvalues(), tol)?.holds)
}

/// Convex decomposition `Z = sum_i lambda_i U_i W U_i*`.
#[derive(Debug, Clone)]
pub struct HullDecomposition {
    pub weights: Vec<f64>,
    pub conjugators: Vec<CMatrix>,
    pub residual: f64,
}

impl HullDecomposition {
    pub fn term_count(&self) -> usize {
        self.weights.len()
    }

    pub fn reconstruct(&self, w: &SkewHermitian) -> SkewHermitian {
        let n = w.dim();
        let mut acc = CMatrix::zeros(n, n);
        for (lam, u) in self.weights.iter().zip(&self.conjugators) {
            acc += w.conjugated_by(u).matrix() * crate::matrix::C64::new(*lam, 0.0);
        }
        SkewHermitian::symmetrized(acc)
    }
}

/// Constructive hull membership: diagonalize both sides, express the
/// eigenvalue majorization through a doubly stochastic matrix, split it into
/// permutations (Birkhoff), map each permutation to a unitary conjugator, and
/// prune the convex combination toward the Caratheodory bound.
pub fn hull_decomposition(
    z: &SkewHermitian,
    w: &SkewHermitian,
) -> Result<HullDecomposition, MajorizationError> {
    let specz = spectral(z, None)?;
    let specw = spectral(w, None)?;
    let tol = default_tol(specw.eigenvalues());
    let report = majorizes(specw.eigenvalues(), specz.eigenvalues(), tol)?;
    if !report.holds {
        let worst = report
            .partial_gaps
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        return Err(MajorizationError::NotMajorized(worst));
    }

    let a = t_transform_chain(&report.w_sorted, &report.z_sorted, tol);
    let parts = birkhoff_decomposition(&a)?;

    let uz = specz.unitary();
    let uw = specw.unitary();
    let n = z.dim();
    let mut weights = Vec::with_capacity(parts.len());
    let mut conjugators = Vec::with_capacity(parts.len());
    for (lambda, perm) in parts {
        // (P w)_i = w_{perm[i]}
        let mut p = CMatrix::zeros(n, n);
        for (i, &j) in perm.iter().enumerate() {
            p[(i, j)] = crate::matrix::C64::new(1.0, 0.0);
        }
        weights.push(lambda);
        conjugators.push(uz * p * uw.adjoint());
    }

    caratheodory_prune(&mut weights, &mut conjugators, w, n + 1);

    let mut decomp = HullDecomposition {
        weights,
        conjugators,
        residual: 0.0,
    };
    decomp.residual = decomp.reconstruct(w).sub(z).frobenius_norm();
    Ok(decomp)
}

/// Birkhoff-von-Neumann: split a doubly stochastic matrix into a convex
/// combination of permutations. Entries below `1e-12` are treated as zero.
pub fn birkhoff_decomposition(
    a: &DMatrix<f64>,
) -> Result<Vec<(f64, Vec<usize>)>, MajorizationError> {
    let n = a.nrows();
    let eps = 1e-12;
    let mut rest = a.clone();
    let mut out = Vec::new();
    let max_terms = (n - 1) * (n - 1) + 2;
    for _ in 0..max_terms {
        let mass: f64 = rest.row_sum().max();
        if mass <= eps * n as f64 {
            break;
        }
        let support: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| rest[(i, j)] > eps).collect())
            .collect();
        let Some(perm) = perfect_matching(&support) else {
            return Err(MajorizationError::BirkhoffStagnation(mass));
        };
        let mu = perm
            .iter()
            .enumerate()
            .map(|(i, &j)| rest[(i, j)])
            .fold(f64::INFINITY, f64::min);
        for (i, &j) in perm.iter().enumerate() {
            rest[(i, j)] -= mu;
        }
        out.push((mu, perm));
    }
    let total: f64 = out.iter().map(|(m, _)| m).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(MajorizationError::BirkhoffStagnation(1.0 - total));
    }
    // Absorb the roundoff so the weights sum to exactly one.
    for (m, _) in &mut out {
        *m /= total;
    }
    Ok(out)
}

/// Kuhn's augmenting-path perfect matching on a boolean bipartite support.
fn perfect_matching(support: &[Vec<bool>]) -> Option<Vec<usize>> {
    let n = support.len();
    let mut col_of_row = vec![usize::MAX; n];
    let mut row_of_col = vec![usize::MAX; n];

    fn augment(
        r: usize,
        support: &[Vec<bool>],
        row_of_col: &mut [usize],
        col_of_row: &mut [usize],
        visited: &mut [bool],
    ) -> bool {
        for c in 0..support.len() {
            if support[r][c] && !visited[c] {
                visited[c] = true;
                if row_of_col[c] == usize::MAX
                    || augment(row_of_col[c], support, row_of_col, col_of_row, visited)
                {
                    row_of_col[c] = r;
                    col_of_row[r] = c;
                    return true;
                }
            }
        }
        false
    }

    for r in 0..n {
        let mut visited = vec![false; n];
        if !augment(r, support, &mut row_of_col, &mut col_of_row, &mut visited) {
            return None;
        }
    }
    Some(col_of_row)
}

/// Greedy Caratheodory pruning: while more terms than `target` remain and the
/// conjugated matrices admit an affine dependence, shift the weights along it
/// until one vanishes. Best effort; exact term minimality is not promised.
fn caratheodory_prune(
    weights: &mut Vec<f64>,
    conjugators: &mut Vec<CMatrix>,
    w: &SkewHermitian,
    target: usize,
) {
    while weights.len() > target {
        let m = weights.len();
        let mats: Vec<CMatrix> = conjugators
            .iter()
            .map(|u| w.conjugated_by(u).matrix().clone())
            .collect();
        let n = w.dim();
        // Rows: real and imaginary parts of all entries of (M_i - M_last),
        // plus the affine row of ones.
        let mut sys = DMatrix::<f64>::zeros(2 * n * n + 1, m);
        for (col, mat) in mats.iter().enumerate() {
            let diff = mat - &mats[m - 1];
            for i in 0..n {
                for j in 0..n {
                    sys[(2 * (i * n + j), col)] = diff[(i, j)].re;
                    sys[(2 * (i * n + j) + 1, col)] = diff[(i, j)].im;
                }
            }
            sys[(2 * n * n, col)] = 1.0;
        }
        // Null vector of the system = affine dependence among the terms.
        let svd = sys.clone().svd(false, true);
        let sv = &svd.singular_values;
        let min_idx = (0..sv.len())
            .min_by(|&a, &b| sv[a].partial_cmp(&sv[b]).unwrap_or(std::cmp::Ordering::Equal));
        let Some(min_idx) = min_idx else { break };
        let scale = sv.iter().cloned().fold(0.0f64, f64::max).max(1.0);
        if sv[min_idx] > 1e-10 * scale || min_idx >= svd.v_t.as_ref().map_or(0, |v| v.nrows()) {
            break;
        }
        let gamma: Vec<f64> = svd
            .v_t
            .as_ref()
            .map(|vt| vt.row(min_idx).iter().copied().collect())
            .unwrap_or_default();
        // gamma sums to ~0 and sum gamma_i M_i ~ 0; move until a weight dies.
        let mut t_best = f64::INFINITY;
        for (lam, g) in weights.iter().zip(&gamma) {
            if *g > 1e-14 {
                t_best = t_best.min(lam / g);
            }
        }
        if !t_best.is_finite() {
            // Flip the direction if no positive component existed.
            let mut t_neg = f64::INFINITY;
            for (lam, g) in weights.iter().zip(&gamma) {
                if *g < -1e-14 {
                    t_neg = t_neg.min(lam / -g);
                }
            }
            if !t_neg.is_finite() {
                break;
            }
            for (lam, g) in weights.iter_mut().zip(&gamma) {
                *lam += t_neg * g;
            }
        } else {
            for (lam, g) in weights.iter_mut().zip(&gamma) {
                *lam -= t_best * g;
            }
        }
        // Drop the vanished terms (and any numerically negative dust).
        let mut kept_w = Vec::with_capacity(m);
        let mut kept_u = Vec::with_capacity(m);
        for (lam, u) in weights.iter().zip(conjugators.iter()) {
            if *lam > 1e-12 {
                kept_w.push(*lam);
                kept_u.push(u.clone());
            }
        }
        if kept_w.len() == weights.len() {
            break;
        }
        let total: f64 = kept_w.iter().sum();
        for lam in &mut kept_w {
            *lam /= total;
        }
        *weights = kept_w;
        *conjugators = kept_u;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::{Gauge, OrbitGaugeSpec};
    use crate::matrix::haar_unitary;
    use crate::norms::MatrixNorm;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn random_traceless<R: Rng>(n: usize, r: &mut R) -> Vec<f64> {
        let v: Vec<f64> = (0..n)
            .map(|_| r.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let mean = v.iter().sum::<f64>() / n as f64;
        v.iter().map(|t| t - mean).collect()
    }

    #[test]
    fn traceless_majorizes_zero() {
        let mut r = rng(3);
        for _ in 0..100 {
            let w = random_traceless(4, &mut r);
            let z = vec![0.0; 4];
            assert!(majorizes(&w, &z, default_tol(&w)).unwrap().holds);
        }
    }

    #[test]
    fn majorizes_is_reflexive() {
        let w = [0.3, -1.2, 5.0, 0.0];
        assert!(majorizes(&w, &w, default_tol(&w)).unwrap().holds);
    }

    #[test]
    fn majorizes_partial_sum_example() {
        let w = [2.0, -1.0, -1.0];
        let z = [1.0, 0.0, -1.0];
        let rep = majorizes(&w, &z, default_tol(&w)).unwrap();
        assert!(rep.holds);
        // prefix sums: w gives (2,1,0), z gives (1,1,0)
        assert!((rep.partial_gaps[0] - 1.0).abs() < 1e-14);
        assert!(rep.partial_gaps[1].abs() < 1e-14);
        assert!(rep.partial_gaps[2].abs() < 1e-14);
    }

    #[test]
    fn majorizes_rejects_scaled_up() {
        let w = [1.0, 0.0, -1.0];
        let z = [2.0, 0.0, -2.0];
        assert!(!majorizes(&w, &z, default_tol(&w)).unwrap().holds);
    }

    #[test]
    fn ds_witness_identity_case() {
        let w = [3.0, 1.0, -4.0];
        let a = ds_witness(&w, &w).unwrap();
        let id = DMatrix::<f64>::identity(3, 3);
        assert!((a - id).amax() < 1e-12);
    }

    #[test]
    fn ds_witness_full_averaging() {
        let w = [2.0, 0.0, 1.0];
        let mean = [1.0, 1.0, 1.0];
        let a = ds_witness(&w, &mean).unwrap();
        for i in 0..3 {
            let z: f64 = (0..3).map(|j| a[(i, j)] * w[j]).sum();
            assert!((z - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ds_witness_reproduces_target() {
        let w = [2.0, -1.0, -1.0];
        let z = [1.0, 0.0, -1.0];
        let a = ds_witness(&w, &z).unwrap();
        for i in 0..3 {
            let zi: f64 = (0..3).map(|j| a[(i, j)] * w[j]).sum();
            assert!((zi - z[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn ds_witness_is_doubly_stochastic() {
        let mut r = rng(5);
        for _ in 0..100 {
            let w = random_traceless(5, &mut r);
            // Build a majorized z by averaging a few entries.
            let a = ds_witness(&w, &pinch_vector(&w, &mut r)).unwrap();
            for i in 0..5 {
                let row: f64 = (0..5).map(|j| a[(i, j)]).sum();
                let col: f64 = (0..5).map(|j| a[(j, i)]).sum();
                assert!((row - 1.0).abs() <= 1e-12, "row sum {row}");
                assert!((col - 1.0).abs() <= 1e-12, "col sum {col}");
            }
            assert!(a.iter().all(|&t| t >= -1e-14));
        }
    }

    fn pinch_vector<R: Rng>(w: &[f64], r: &mut R) -> Vec<f64> {
        let mut z = w.to_vec();
        for _ in 0..3 {
            let i = r.gen_range(0..z.len());
            let j = r.gen_range(0..z.len());
            if i != j {
                let lam: f64 = r.gen_range(0.0..0.5);
                let (a, b) = (z[i], z[j]);
                z[i] = (1.0 - lam) * a + lam * b;
                z[j] = lam * a + (1.0 - lam) * b;
            }
        }
        z
    }

    #[test]
    fn ds_witness_requires_majorization() {
        let w = [1.0, 0.0, -1.0];
        let z = [2.0, 0.0, -2.0];
        assert!(matches!(
            ds_witness(&w, &z),
            Err(MajorizationError::NotMajorized(_))
        ));
    }

    #[test]
    fn orbit_hull_membership_basics() {
        let mut r = rng(7);
        let w = SkewHermitian::random(3, &mut r);
        let u = haar_unitary(3, &mut r);
        assert!(in_orbit_hull(&w.conjugated_by(&u), &w, 1e-9).unwrap());

        // 0 is in the hull of any traceless orbit.
        let tr = w.trace().im / 3.0;
        let w0 = w.sub(&SkewHermitian::from_imag_diag(&[tr, tr, tr]));
        assert!(in_orbit_hull(&SkewHermitian::zeros(3), &w0, 1e-8).unwrap());

        let z = SkewHermitian::from_imag_diag(&[2.0, 0.0, -2.0]);
        let w = SkewHermitian::from_imag_diag(&[1.0, 0.0, -1.0]);
        assert!(!in_orbit_hull(&z, &w, 1e-9).unwrap());
    }

    #[test]
    fn hull_decomposition_identity() {
        let mut r = rng(11);
        let w = SkewHermitian::random(3, &mut r);
        let d = hull_decomposition(&w, &w).unwrap();
        assert_eq!(d.term_count(), 1);
        assert!((d.weights[0] - 1.0).abs() < 1e-12);
        assert!(d.residual <= 1e-9);
    }

    #[test]
    fn hull_decomposition_zero_from_swap() {
        let w = SkewHermitian::from_imag_diag(&[1.0, -1.0]);
        let z = SkewHermitian::zeros(2);
        let d = hull_decomposition(&z, &w).unwrap();
        assert_eq!(d.term_count(), 2);
        for lam in &d.weights {
            assert!((lam - 0.5).abs() < 1e-12);
        }
        assert!(d.residual <= 1e-12);
    }

    #[test]
    fn hull_decomposition_random_pairs() {
        let mut r = rng(13);
        for n in [3usize, 4] {
            for _ in 0..25 {
                let w = SkewHermitian::random(n, &mut r);
                // Z = average of a few conjugates of W: guaranteed in the hull.
                let mut acc = CMatrix::zeros(n, n);
                let k = 3;
                for _ in 0..k {
                    let u = haar_unitary(n, &mut r);
                    acc += w.conjugated_by(&u).matrix();
                }
                let z =
                    SkewHermitian::symmetrized(acc * crate::matrix::C64::new(1.0 / k as f64, 0.0));
                assert!(in_orbit_hull(&z, &w, 1e-8).unwrap());
                let d = hull_decomposition(&z, &w).unwrap();
                assert!(d.residual <= 1e-9, "residual {}", d.residual);
                let total: f64 = d.weights.iter().sum();
                assert!((total - 1.0).abs() <= 1e-12);
                assert!(d.weights.iter().all(|&l| l >= 0.0));
            }
        }
    }

    #[test]
    fn hull_decomposition_prunes_toward_caratheodory() {
        let mut r = rng(17);
        let mut counts = Vec::new();
        for _ in 0..10 {
            let w = SkewHermitian::random(4, &mut r);
            let mut acc = CMatrix::zeros(4, 4);
            for _ in 0..6 {
                let u = haar_unitary(4, &mut r);
                acc += w.conjugated_by(&u).matrix();
            }
            let z = SkewHermitian::symmetrized(acc * crate::matrix::C64::new(1.0 / 6.0, 0.0));
            let d = hull_decomposition(&z, &w).unwrap();
            counts.push(d.term_count());
            // Birkhoff bound for n = 4.
            assert!(d.term_count() <= 10);
            assert!(d.residual <= 1e-8, "residual {}", d.residual);
        }
    }

    #[test]
    fn birkhoff_splits_permutation_mixture() {
        // 0.6 * id + 0.4 * cycle
        let mut a = DMatrix::<f64>::zeros(3, 3);
        for i in 0..3 {
            a[(i, i)] = 0.6;
            a[(i, (i + 1) % 3)] = 0.4;
        }
        let parts = birkhoff_decomposition(&a).unwrap();
        assert_eq!(parts.len(), 2);
        let total: f64 = parts.iter().map(|(m, _)| m).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pinch_is_majorized_by_input() {
        let mut r = rng(19);
        for _ in 0..50 {
            let x = SkewHermitian::random(4, &mut r);
            let u = haar_unitary(4, &mut r);
            let projections: Vec<CMatrix> = (0..4)
                .map(|j| {
                    let col = u.column(j);
                    let p = &col * col.adjoint();
                    (&p + p.adjoint()) * crate::matrix::C64::new(0.5, 0.0)
                })
                .collect();
            let pinched = pinch(&x, &projections).unwrap();
            let ex = spectral(&x, None).unwrap();
            let ep = spectral(&pinched, None).unwrap();
            let rep = majorizes(
                ex.eigenvalues(),
                ep.eigenvalues(),
                default_tol(ex.eigenvalues()),
            )
            .unwrap();
            assert!(rep.holds, "pinch not majorized: {:?}", rep.partial_gaps);
        }
    }

    #[test]
    fn majorization_implies_norm_dominance() {
        let mut r = rng(23);
        let gauges = vec![
            Gauge::p_gauge(3, 1.5).unwrap(),
            Gauge::p_gauge(3, 2.0).unwrap(),
            Gauge::spectral(3),
            Gauge::trace(3),
            Gauge::ky_fan(3, 2).unwrap(),
            Gauge::orbit(OrbitGaugeSpec::normalized(&[1.0, 0.0, -1.0]).unwrap()).unwrap(),
            Gauge::orbit(OrbitGaugeSpec::normalized(&[1.0, 1.0, -2.0]).unwrap()).unwrap(),
        ];
        let norms: Vec<MatrixNorm> = gauges.into_iter().map(MatrixNorm::new).collect();
        for _ in 0..50 {
            let w = random_traceless(3, &mut r);
            let z = pinch_vector(&w, &mut r);
            assert!(majorizes(&w, &z, default_tol(&w)).unwrap().holds);
            let uw = haar_unitary(3, &mut r);
            let uz = haar_unitary(3, &mut r);
            let wm = SkewHermitian::from_imag_diag(&w).conjugated_by(&uw);
            let zm = SkewHermitian::from_imag_diag(&z).conjugated_by(&uz);
            for m in &norms {
                let nw = m.value(&wm).unwrap();
                let nz = m.value(&zm).unwrap();
                assert!(nz <= nw + 1e-9, "dominance failed: {nz} > {nw}");
            }
        }
    }

    #[test]
    fn non_majorizing_pairs_admit_separating_orbit_gauge() {
        let mut r = rng(29);
        let mut found_all = true;
        for _ in 0..50 {
            let w = random_traceless(3, &mut r);
            let z = random_traceless(3, &mut r);
            let rep = majorizes(&w, &z, default_tol(&w)).unwrap();
            if rep.holds {
                continue;
            }
            // Prefix witness: a Ky-Fan-like traceless direction separates,
            // perturbed to a regular spectrum.
            let mut separated = false;
            let k = rep
                .partial_gaps
                .iter()
                .position(|g| *g < -rep.tolerance)
                .unwrap()
                + 1;
            let n = 3usize;
            let mut witness: Vec<f64> = (0..n)
                .map(|i| {
                    if i < k {
                        (n - k) as f64
                    } else {
                        -(k as f64)
                    }
                })
                .collect();
            for (i, t) in witness.iter_mut().enumerate() {
                *t += 1e-6 * (n - i) as f64;
            }
            let mut candidates = vec![witness];
            for _ in 0..50 {
                candidates.push(random_traceless(3, &mut r));
            }
            for c in candidates {
                let Ok(spec) = OrbitGaugeSpec::new(&c) else {
                    continue;
                };
                let zs = sorted_desc(&z);
                let ws = sorted_desc(&w);
                let pz: f64 = spec.entries().iter().zip(&zs).map(|(a, b)| a * b).sum();
                let pw: f64 = spec.entries().iter().zip(&ws).map(|(a, b)| a * b).sum();
                if pz > pw + 1e-12 {
                    separated = true;
                    break;
                }
            }
            found_all &= separated;
        }
        assert!(found_all, "some non-majorizing pair had no separating gauge");
    }
}
