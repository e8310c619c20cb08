//! Ad-invariant Finsler norms on `u(n)` obtained from permutation-symmetric
//! gauges through the eigenvalues of `-iX`, with dual norms, certified
//! norming functionals and the Taylor complexification norm.


use serde::Serialize;
use thiserror::Error;

use crate::gauge::{sort_indices_by_abs_desc, Gauge, GaugeError, GaugeKind, OrbitGaugeSpec};
use crate::matrix::{
    commutator, spectral, trace_inner, C64, CMatrix, MatrixError, SkewHermitian,
};

#[derive(Debug, Error)]
pub enum NormError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Gauge(#[from] GaugeError),
    #[error("norming functional undefined for the zero matrix")]
    ZeroMatrix,
    #[error("norming certificate failed: pairing residual {pairing:.3e}, dual-norm residual {dual_norm:.3e}, commutation residual {commutation:.3e}")]
    Certification {
        pairing: f64,
        dual_norm: f64,
        commutation: f64,
    },
    #[error("block averages are not non-increasing: {0:?}")]
    BlockOrdering(Vec<f64>),
}

/// Residuals of the three norming-matrix invariants.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormingResiduals {
    /// `|(N|V) - ||V|||`
    pub pairing: f64,
    /// `| ||N||' - 1 |`
    pub dual_norm: f64,
    /// `||[N, V]||_F`
    pub commutation: f64,
}

/// A matrix `N` of unit dual norm representing a functional `(N|.)` that
/// norms a target `V`, together with its certification data.
#[derive(Debug, Clone)]
pub struct NormingMatrix {
    matrix: SkewHermitian,
    certified_dual_norm: f64,
    value_at_target: f64,
    residuals: NormingResiduals,
}

impl NormingMatrix {
    pub fn matrix(&self) -> &SkewHermitian {
        &self.matrix
    }

    pub fn certified_dual_norm(&self) -> f64 {
        self.certified_dual_norm
    }

    pub fn value_at_target(&self) -> f64 {
        self.value_at_target
    }

    pub fn residuals(&self) -> NormingResiduals {
        self.residuals
    }
}

/// Result of the Taylor-norm grid optimization.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TaylorNorm {
    pub value: f64,
    pub argmax_t: f64,
    pub grid_points: usize,
}

/// An Ad-invariant Finsler norm: `||X|| = gauge(eigenvalues of -iX)`.
#[derive(Debug, Clone)]
pub struct MatrixNorm {
    gauge: Gauge,
}

impl MatrixNorm {
    pub fn new(gauge: Gauge) -> Self {
        Self { gauge }
    }

    pub fn gauge(&self) -> &Gauge {
        &self.gauge
    }

    pub fn dim(&self) -> usize {
        self.gauge.dim()
    }

    /// `||ip|| = 1` for rank-one projections iff `gauge(e_1) = 1`.
    pub fn is_normalized(&self) -> bool {
        self.gauge.is_normalized()
    }

    pub fn value(&self, x: &SkewHermitian) -> Result<f64, NormError> {
        let spec = spectral(x, None)?;
        Ok(self.gauge.eval(spec.eigenvalues())?)
    }

    /// `||V||' = max { (V|X) : ||X|| <= 1 }`, reduced to the support function
    /// of the gauge at the decreasing eigenvalue vector of `-iV`.
    pub fn dual_value(&self, v: &SkewHermitian) -> Result<f64, NormError> {
        let spec = spectral(v, None)?;
        Ok(self.gauge.support(spec.eigenvalues())?.value)
    }

    /// Builds and certifies a norming functional for `v != 0`:
    /// `N = U i diag(u) U*` with `u` a subgradient of the gauge at the
    /// eigenvalue vector and `U` the eigenbasis of `v`, intra-block entries
    /// sorted decreasingly for reproducibility.
    pub fn norming(&self, v: &SkewHermitian) -> Result<NormingMatrix, NormError> {
        let tol = 1e-8 * (1.0 + v.frobenius_norm());
        self.norming_with_tol(v, tol)
    }

    pub fn norming_with_tol(
        &self,
        v: &SkewHermitian,
        tol: f64,
    ) -> Result<NormingMatrix, NormError> {
        self.norming_full(v, tol, None)
    }

    /// Full-control variant: certification tolerance plus an explicit
    /// eigenvalue clustering tolerance for the block structure.
    pub fn norming_full(
        &self,
        v: &SkewHermitian,
        tol: f64,
        cluster_tol: Option<f64>,
    ) -> Result<NormingMatrix, NormError> {
        if v.frobenius_norm() <= 1e-14 {
            return Err(NormError::ZeroMatrix);
        }
        let spec = spectral(v, cluster_tol)?;
        let x = spec.eigenvalues().to_vec();
        let mut u = self.gauge.subgradient(&x)?;
        for k in 0..spec.n_levels() {
            let range = spec.level_range(k);
            u[range].sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        }
        let n_mat = assemble_in_basis(spec.unitary(), &u);
        self.certify(v, n_mat, tol)
    }

    /// Runs the three invariant checks and packages the functional.
    pub fn certify(
        &self,
        v: &SkewHermitian,
        n_mat: SkewHermitian,
        tol: f64,
    ) -> Result<NormingMatrix, NormError> {
        let norm_v = self.value(v)?;
        let value_at_target = trace_inner(&n_mat, v)?;
        let dual = self.dual_value(&n_mat)?;
        let commutation = commutator(&n_mat, v)?.frobenius_norm();
        let residuals = NormingResiduals {
            pairing: (value_at_target - norm_v).abs(),
            dual_norm: (dual - 1.0).abs(),
            commutation,
        };
        if residuals.pairing > tol || residuals.dual_norm > tol || residuals.commutation > tol {
            return Err(NormError::Certification {
                pairing: residuals.pairing,
                dual_norm: residuals.dual_norm,
                commutation: residuals.commutation,
            });
        }
        Ok(NormingMatrix {
            matrix: n_mat,
            certified_dual_norm: dual,
            value_at_target,
            residuals,
        })
    }

    /// `||A + iB||_T = sup_t ||A cos t - B sin t||`, computed on a uniform
    /// grid refined by golden section around the best grid point.
    pub fn taylor(&self, a: &SkewHermitian, b: &SkewHermitian) -> Result<TaylorNorm, NormError> {
        self.taylor_with_grid(a, b, 720)
    }

    pub fn taylor_with_grid(
        &self,
        a: &SkewHermitian,
        b: &SkewHermitian,
        grid_points: usize,
    ) -> Result<TaylorNorm, NormError> {
        if a.dim() != b.dim() {
            return Err(NormError::Matrix(MatrixError::DimensionMismatch(
                a.dim(),
                b.dim(),
            )));
        }
        let eval = |t: f64| -> Result<f64, NormError> {
            let m = a.scaled(t.cos()).sub(&b.scaled(t.sin()));
            self.value(&m)
        };
        let tau = 2.0 * std::f64::consts::PI;
        let mut best_t = 0.0;
        let mut best = f64::NEG_INFINITY;
        for i in 0..grid_points {
            let t = tau * i as f64 / grid_points as f64;
            let v = eval(t)?;
            if v > best {
                best = v;
                best_t = t;
            }
        }
        let width = tau / grid_points as f64;
        let f = |t: f64| eval(t).unwrap_or(f64::NEG_INFINITY);
        let (argmax_t, refined) =
            crate::gauge::golden_max(f, best_t - width, best_t + width, 1e-10);
        Ok(TaylorNorm {
            value: refined.max(best),
            argmax_t,
            grid_points,
        })
    }
}

/// `U i diag(u) U*`, re-symmetrized.
pub(crate) fn assemble_in_basis(u_basis: &CMatrix, entries: &[f64]) -> SkewHermitian {
    let n = entries.len();
    let mut d = CMatrix::zeros(n, n);
    for (j, &t) in entries.iter().enumerate() {
        d[(j, j)] = C64::new(0.0, t);
    }
    SkewHermitian::symmetrized(u_basis * d * u_basis.adjoint())
}

/// Closed-form orbit norm: aligned decreasing pairing plus `|tr X|`.
pub fn orbit_norm(c: &OrbitGaugeSpec, x: &SkewHermitian) -> Result<f64, NormError> {
    if c.dim() != x.dim() {
        return Err(NormError::Matrix(MatrixError::DimensionMismatch(
            c.dim(),
            x.dim(),
        )));
    }
    let spec = spectral(x, None)?;
    let eigs = spec.eigenvalues();
    let aligned: f64 = c.entries().iter().zip(eigs).map(|(a, b)| a * b).sum();
    let tr: f64 = eigs.iter().sum();
    Ok(aligned + tr.abs())
}

/// C-radius norm for skew-Hermitian traceless `C`: the larger of the two
/// orbit-norm evaluations at `+C` and `-C` (which absorbs the absolute value
/// in `max |tr(C U* X U)|`).
pub fn c_radius_norm(c: &OrbitGaugeSpec, x: &SkewHermitian) -> Result<f64, NormError> {
    let neg: Vec<f64> = c.entries().iter().map(|t| -t).collect();
    let neg_spec = OrbitGaugeSpec::new(&neg)?;
    let plus = orbit_norm(c, x)?;
    let minus = orbit_norm(&neg_spec, x)?;
    Ok(plus.max(minus))
}

/// The aligning maximizer of `(U C U* | X)` over the unitary group: conjugate
/// `i diag(c)` into the eigenbasis of `X` with both spectra decreasing.
/// Returns the unitary and the attained pairing.
pub fn orbit_norm_maximizer(
    c: &OrbitGaugeSpec,
    x: &SkewHermitian,
) -> Result<(CMatrix, f64), NormError> {
    if c.dim() != x.dim() {
        return Err(NormError::Matrix(MatrixError::DimensionMismatch(
            c.dim(),
            x.dim(),
        )));
    }
    let spec = spectral(x, None)?;
    let u0 = spec.unitary().clone();
    let c_mat = SkewHermitian::from_imag_diag(c.entries());
    let conj = c_mat.conjugated_by(&u0);
    let value = trace_inner(&conj, x)?;
    Ok((u0, value))
}

/// The distinguished Ky-Fan norming functional built from the polar
/// decomposition pieces: with `X = Omega |X|`, a sorting conjugation `U` and
/// the top-`k` spectral projection `P`, the functional is the skew-Hermitian
/// realization of `Omega U* P U` (sign convention `sg(0) = +1`).
pub fn ky_fan_distinguished(k: usize, x: &SkewHermitian) -> Result<NormingMatrix, NormError> {
    let n = x.dim();
    let norm = MatrixNorm::new(Gauge::ky_fan(n, k)?);
    if x.frobenius_norm() <= 1e-14 {
        return Err(NormError::ZeroMatrix);
    }
    let spec = spectral(x, None)?;
    let eigs = spec.eigenvalues();
    // Everything is diagonal in the eigenbasis of X: Omega = i diag(sg),
    // |X| = diag(|x|), U the permutation sorting |x| decreasingly.
    let sg: Vec<f64> = eigs
        .iter()
        .map(|&t| if t >= 0.0 { 1.0 } else { -1.0 })
        .collect();
    let order = sort_indices_by_abs_desc(eigs);
    let mut indicator = vec![0.0; n];
    for &j in order.iter().take(k) {
        indicator[j] = 1.0;
    }
    let entries: Vec<f64> = sg
        .iter()
        .zip(&indicator)
        .map(|(s, ind)| s * ind)
        .collect();
    let n_mat = assemble_in_basis(spec.unitary(), &entries);

    // Classical certificates of unit dual norm: ||N||_1 <= k, ||N||_inf <= 1.
    let l1: f64 = entries.iter().map(|t| t.abs()).sum();
    let linf = entries.iter().map(|t| t.abs()).fold(0.0, f64::max);
    debug_assert!(l1 <= k as f64 + 1e-12 && linf <= 1.0 + 1e-12);

    let tol = 1e-8 * (1.0 + x.frobenius_norm());
    norm.certify(x, n_mat, tol)
}

/// Averages each block of a norming matrix down to a multiple of the spectral
/// projection: `N_0 = i sum_k lambda_k P_k` with `lambda_k` the arithmetic
/// mean of the eigenvalues of the k-th block. `N_0` still norms `v`.
pub fn diagonal_averaged_functional(
    norm: &MatrixNorm,
    v: &SkewHermitian,
    n: &NormingMatrix,
) -> Result<NormingMatrix, NormError> {
    let spec = spectral(v, None)?;
    let h = n.matrix().matrix() * C64::new(0.0, -1.0);
    let dim = v.dim();
    let mut acc = CMatrix::zeros(dim, dim);
    let mut lambdas = Vec::with_capacity(spec.n_levels());
    for level in spec.levels() {
        let lambda = (&level.projection * &h).trace().re / level.multiplicity as f64;
        lambdas.push(lambda);
        acc += &level.projection * C64::new(0.0, lambda);
    }
    for w in lambdas.windows(2) {
        if w[1] > w[0] + 1e-9 {
            return Err(NormError::BlockOrdering(lambdas.clone()));
        }
    }
    let n0 = SkewHermitian::symmetrized(acc);
    let tol = 1e-8 * (1.0 + v.frobenius_norm());
    norm.certify(v, n0, tol)
}

/// Exact or lower-bound maximum of `(N|Y)` over the norming set of `v`.
///
/// For gauges with an enumerable dual vertex set the maximum is exact at any
/// `v`: active vertices are paired block-by-block with the eigenvalues of the
/// compressed blocks of `Y`, which also absorbs the intra-block unitary
/// freedom. Smooth gauges have a singleton norming set. Everything else
/// falls back to the constructed functional (a lower bound).
pub fn max_norming_pairing(
    norm: &MatrixNorm,
    v: &SkewHermitian,
    y: &SkewHermitian,
) -> Result<(f64, bool), NormError> {
    let spec = spectral(v, None)?;
    let x = spec.eigenvalues().to_vec();
    let norm_v = norm.gauge().eval(&x)?;

    if let Some(duals) = norm.gauge().dual_vertices() {
        let scale = 1.0 + norm_v.abs();
        // Eigenvalues of the Hermitian compressions -i P_k Y P_k, per block.
        let ytilde = spec.unitary().adjoint() * y.matrix() * spec.unitary();
        let mut block_eigs: Vec<Vec<f64>> = Vec::with_capacity(spec.n_levels());
        for k in 0..spec.n_levels() {
            let range = spec.level_range(k);
            let sub = ytilde.view_range(range.clone(), range.clone()).into_owned();
            let herm = (&sub * C64::new(0.0, -1.0) + (&sub * C64::new(0.0, -1.0)).adjoint())
                * C64::new(0.5, 0.0);
            let mut eigs: Vec<f64> = herm.symmetric_eigen().eigenvalues.iter().copied().collect();
            eigs.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
            block_eigs.push(eigs);
        }
        let mut best = f64::NEG_INFINITY;
        for u in duals {
            let pairing: f64 = u.iter().zip(&x).map(|(a, b)| a * b).sum();
            if (pairing - norm_v).abs() > 1e-9 * scale {
                continue;
            }
            // Within each block the entries of u may be rearranged freely;
            // the decreasing alignment maximizes the pairing.
            let mut total = 0.0;
            for k in 0..spec.n_levels() {
                let range = spec.level_range(k);
                let mut uk: Vec<f64> = u[range].to_vec();
                uk.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
                total += uk
                    .iter()
                    .zip(&block_eigs[k])
                    .map(|(a, b)| a * b)
                    .sum::<f64>();
            }
            best = best.max(total);
        }
        if best.is_finite() {
            return Ok((best, true));
        }
    }

    let constructed = norm.norming(v)?;
    let value = trace_inner(constructed.matrix(), y)?;
    let exhaustive = matches!(
        norm.gauge().kind(),
        GaugeKind::PGauge { p } if *p > 1.0
    ) || matches!(norm.gauge().kind(), GaugeKind::Ellipse { .. });
    Ok((value, exhaustive))
}
