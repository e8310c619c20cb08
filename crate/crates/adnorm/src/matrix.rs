//! Skew-Hermitian linear algebra: trace pairing, commutators, spectral
//! clustering into distinct-eigenvalue levels, block diagonal/codiagonal
//! splits, adjoint actions and Haar-random generation.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not skew-Hermitian: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotSkewHermitian { residual: f64, tol: f64 },
    #[error("dimension must be positive")]
    Empty,
    #[error("invalid projection system: {0}")]
    InvalidProjections(String),
}

/// Default tolerance for validating skew-Hermitian input before exact
/// symmetrization.
pub const SKEW_VALIDATE_TOL: f64 = 1e-9;

/// An element of `u(n)`: a complex `n x n` matrix with `A* = -A`.
///
/// The stored matrix is exactly skew-Hermitian: every constructor ends with
/// `A <- (A - A*)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewHermitian {
    mat: CMatrix,
}

impl SkewHermitian {
    /// Validates `mat` against `A* = -A` within `SKEW_VALIDATE_TOL`
    /// (relative to the largest entry), then symmetrizes exactly.
    pub fn new(mat: CMatrix) -> Result<Self, MatrixError> {
        Self::with_tolerance(mat, SKEW_VALIDATE_TOL)
    }

    pub fn with_tolerance(mat: CMatrix, tol: f64) -> Result<Self, MatrixError> {
        if mat.nrows() != mat.ncols() {
            return Err(MatrixError::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        if mat.nrows() == 0 {
            return Err(MatrixError::Empty);
        }
        let scale = mat.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        let residual = (&mat + mat.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if residual > tol * scale {
            return Err(MatrixError::NotSkewHermitian {
                residual,
                tol: tol * scale,
            });
        }
        Ok(Self::symmetrized(mat))
    }

    /// `(A - A*)/2`; used internally after arithmetic to kill roundoff drift.
    pub(crate) fn symmetrized(mat: CMatrix) -> Self {
        let half = C64::new(0.5, 0.0);
        let sym = (&mat - mat.adjoint()) * half;
        Self { mat: sym }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            mat: CMatrix::zeros(n, n),
        }
    }

    /// `i * diag(v)`.
    pub fn from_imag_diag(v: &[f64]) -> Self {
        let n = v.len();
        let mut mat = CMatrix::zeros(n, n);
        for (j, &x) in v.iter().enumerate() {
            mat[(j, j)] = C64::new(0.0, x);
        }
        Self { mat }
    }

    /// Skew part of a complex Ginibre matrix; entries O(1).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let g = ginibre(n, rng);
        Self::symmetrized(g)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `tr X = i * sum(eigenvalues of -iX)`; purely imaginary.
    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.frobenius_norm() <= tol
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            mat: &self.mat * C64::new(s, 0.0),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat + &other.mat,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat - &other.mat,
        }
    }

    /// `U X U*` for unitary `U`; re-symmetrized.
    pub fn conjugated_by(&self, u: &CMatrix) -> Self {
        Self::symmetrized(u * &self.mat * u.adjoint())
    }
}

/// The real inner product `(A|B) = tr(AB*) = -Re tr(AB)` on `u(n)`.
pub fn trace_inner(a: &SkewHermitian, b: &SkewHermitian) -> Result<f64, MatrixError> {
    if a.dim() != b.dim() {
        return Err(MatrixError::DimensionMismatch(a.dim(), b.dim()));
    }
    let (am, bm) = (a.matrix(), b.matrix());
    let mut acc = 0.0;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            // tr(AB) = sum_ij A[i,j] B[j,i]
            acc += (am[(i, j)] * bm[(j, i)]).re;
        }
    }
    Ok(-acc)
}

/// `[X, Y] = XY - YX`; skew-Hermitian again.
pub fn commutator(x: &SkewHermitian, y: &SkewHermitian) -> Result<SkewHermitian, MatrixError> {
    if x.dim() != y.dim() {
        return Err(MatrixError::DimensionMismatch(x.dim(), y.dim()));
    }
    let c = x.matrix() * y.matrix() - y.matrix() * x.matrix();
    Ok(SkewHermitian::symmetrized(c))
}

/// One distinct eigenvalue level of `-iX` with its spectral projection.
#[derive(Debug, Clone)]
pub struct SpectralLevel {
    pub value: f64,
    pub projection: CMatrix,
    pub multiplicity: usize,
}

/// Eigenvalue levels of `-iX`, strictly decreasing, with orthogonal spectral
/// projections summing to the identity, plus the diagonalizing unitary.
#[derive(Debug, Clone)]
pub struct SpectralData {
    levels: Vec<SpectralLevel>,
    unitary: CMatrix,
    eigenvalues: Vec<f64>,
    cluster_tol: f64,
}

impl SpectralData {
    pub fn levels(&self) -> &[SpectralLevel] {
        &self.levels
    }

    /// Columns are eigenvectors ordered by decreasing eigenvalue.
    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    /// Full eigenvalue vector of `-iX`, decreasing, with multiplicity.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.unitary.nrows()
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn cluster_tol(&self) -> f64 {
        self.cluster_tol
    }

    /// Index range of level `k` in the sorted eigenbasis.
    pub fn level_range(&self, k: usize) -> std::ops::Range<usize> {
        let start: usize = self.levels[..k].iter().map(|l| l.multiplicity).sum();
        start..start + self.levels[k].multiplicity
    }

    /// `i * sum_k v_k P_k`.
    pub fn reconstruct(&self) -> SkewHermitian {
        let n = self.dim();
        let mut acc = CMatrix::zeros(n, n);
        for level in &self.levels {
            acc += &level.projection * C64::new(0.0, level.value);
        }
        SkewHermitian::symmetrized(acc)
    }

    /// Residuals of the projection-system invariants: idempotence,
    /// self-adjointness, mutual orthogonality and completeness.
    pub fn projection_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        let mut sum = CMatrix::zeros(n, n);
        for (k, lk) in self.levels.iter().enumerate() {
            let p = &lk.projection;
            worst = worst.max(max_abs(&(p * p - p)));
            worst = worst.max(max_abs(&(p.adjoint() - p)));
            for lj in &self.levels[k + 1..] {
                worst = worst.max(max_abs(&(p * &lj.projection)));
            }
            sum += p;
        }
        worst.max(max_abs(&(sum - CMatrix::identity(n, n))))
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Default clustering tolerance: `1e-8 * max(1, ||X||_F)`.
pub fn default_cluster_tol(x: &SkewHermitian) -> f64 {
    1e-8 * x.frobenius_norm().max(1.0)
}

/// Hermitian eigendecomposition of `-iX` with eigenvalues within
/// `cluster_tol` of each other merged into one level (summed projections).
pub fn spectral(x: &SkewHermitian, cluster_tol: Option<f64>) -> Result<SpectralData, MatrixError> {
    let n = x.dim();
    let tol = cluster_tol.unwrap_or_else(|| default_cluster_tol(x));
    // H = -iX is Hermitian with the same eigenvectors.
    let h = x.matrix() * C64::new(0.0, -1.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut unitary = CMatrix::zeros(n, n);
    let mut eigenvalues = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        unitary.set_column(dst, &eig.eigenvectors.column(src));
        eigenvalues.push(eig.eigenvalues[src]);
    }

    // Greedy merge of consecutive eigenvalues with gap <= tol.
    let mut levels = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eigenvalues[end - 1] - eigenvalues[end] <= tol {
            end += 1;
        }
        let mult = end - start;
        let value = eigenvalues[start..end].iter().sum::<f64>() / mult as f64;
        let mut proj = CMatrix::zeros(n, n);
        for j in start..end {
            let col = unitary.column(j);
            proj += &col * col.adjoint();
        }
        // Enforce P = P* exactly.
        proj = (&proj + proj.adjoint()) * C64::new(0.5, 0.0);
        levels.push(SpectralLevel {
            value,
            projection: proj,
            multiplicity: mult,
        });
        start = end;
    }

    Ok(SpectralData {
        levels,
        unitary,
        eigenvalues,
        cluster_tol: tol,
    })
}

/// Block-diagonal and block-codiagonal parts of `X` relative to the spectral
/// projections of a reference matrix: `X_D = sum_k P_k X P_k`, `X_C = X - X_D`.
#[derive(Debug, Clone)]
pub struct BlockSplit {
    pub diagonal: SkewHermitian,
    pub codiagonal: SkewHermitian,
}

pub fn block_split(x: &SkewHermitian, spec: &SpectralData) -> Result<BlockSplit, MatrixError> {
    if x.dim() != spec.dim() {
        return Err(MatrixError::DimensionMismatch(x.dim(), spec.dim()));
    }
    let n = x.dim();
    let mut xd = CMatrix::zeros(n, n);
    for level in spec.levels() {
        xd += &level.projection * x.matrix() * &level.projection;
    }
    let diagonal = SkewHermitian::symmetrized(xd);
    // X_D + X_C = X exactly, by subtraction.
    let codiagonal = x.sub(&diagonal);
    Ok(BlockSplit {
        diagonal,
        codiagonal,
    })
}

/// `sum_k P_k X P_k` for an arbitrary orthogonal projection system summing to
/// the identity. Eigenvalues of the result are strongly majorized by those of `X`.
pub fn pinch(x: &SkewHermitian, projections: &[CMatrix]) -> Result<SkewHermitian, MatrixError> {
    let n = x.dim();
    let mut sum = CMatrix::zeros(n, n);
    for p in projections {
        if p.nrows() != n || p.ncols() != n {
            return Err(MatrixError::DimensionMismatch(p.nrows(), n));
        }
        let idem = max_abs(&(p * p - p));
        let herm = max_abs(&(p.adjoint() - p));
        if idem > 1e-8 || herm > 1e-8 {
            return Err(MatrixError::InvalidProjections(format!(
                "projection residual {:.3e}",
                idem.max(herm)
            )));
        }
        sum += p;
    }
    if max_abs(&(&sum - CMatrix::identity(n, n))) > 1e-8 {
        return Err(MatrixError::InvalidProjections(
            "projections do not sum to identity".into(),
        ));
    }
    let mut acc = CMatrix::zeros(n, n);
    for p in projections {
        acc += p * x.matrix() * p;
    }
    Ok(SkewHermitian::symmetrized(acc))
}

fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(rand_distr::StandardNormal);
        let im: f64 = rng.sample(rand_distr::StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix, with the
/// phases of `diag(R)` absorbed so the distribution is exactly Haar.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    assert!(n >= 1, "haar_unitary requires n >= 1");
    let g = ginibre(n, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let col = q.column(j) * phase;
        q.set_column(j, &col);
    }
    q
}

/// Deterministic per seed.
pub fn haar_unitary_seeded(n: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_unitary(n, &mut rng)
}

/// `e^X` through the spectral decomposition of skew-Hermitian `X`; unitary.
pub fn unitary_exp(x: &SkewHermitian) -> Result<CMatrix, MatrixError> {
    let spec = spectral(x, Some(0.0))?;
    let n = x.dim();
    let u = spec.unitary();
    let mut d = CMatrix::zeros(n, n);
    for (j, &w) in spec.eigenvalues().iter().enumerate() {
        // eigenvalue of X is i*w
        d[(j, j)] = C64::new(0.0, w).exp();
    }
    Ok(u * d * u.adjoint())
}

/// `Ad_{e^{sX}} V = e^{sX} V e^{-sX}`.
pub fn ad_exp(s: f64, x: &SkewHermitian, v: &SkewHermitian) -> Result<SkewHermitian, MatrixError> {
    if x.dim() != v.dim() {
        return Err(MatrixError::DimensionMismatch(x.dim(), v.dim()));
    }
    let e = unitary_exp(&x.scaled(s))?;
    Ok(v.conjugated_by(&e))
}
