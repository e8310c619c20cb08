//! Permutation-symmetric convex bodies in `R^n` presented as Finsler gauges:
//! positively homogeneous, subadditive, possibly not sign-symmetric. Each
//! gauge exposes its Minkowski functional, its support function (the dual
//! gauge) and a subgradient selector.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Polytope;

#[derive(Debug, Error)]
pub enum GaugeError {
    #[error("vector length {got} does not match gauge dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("subgradient undefined at the origin")]
    ZeroVector,
    #[error("invalid gauge parameter: {0}")]
    InvalidParameter(String),
    #[error("oracle bisection bracket failure: {0}")]
    BracketFailure(String),
    #[error("numeric support maximization failed (best lower bound {0:.6e})")]
    SupportNonConvergence(f64),
    #[error("vector is outside the gauge's affine hull (sum {0:.3e})")]
    OutsideAffineHull(f64),
}

/// Eigenvalue vector of a traceless direction matrix, stored sorted
/// decreasingly with the zero-sum constraint projected in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitGaugeSpec {
    c: Vec<f64>,
    frobenius_normalized: bool,
}

impl OrbitGaugeSpec {
    /// Projects onto `sum c_i = 0`, sorts decreasingly, and rejects the
    /// degenerate all-equal direction (it would give the zero functional).
    pub fn new(c: &[f64]) -> Result<Self, GaugeError> {
        if c.len() < 2 {
            return Err(GaugeError::InvalidParameter(
                "orbit direction needs dimension >= 2".into(),
            ));
        }
        let mean = c.iter().sum::<f64>() / c.len() as f64;
        let mut v: Vec<f64> = c.iter().map(|t| t - mean).collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        let scale = v.iter().map(|t| t.abs()).fold(0.0, f64::max);
        if scale <= 1e-13 * (1.0 + mean.abs()) {
            return Err(GaugeError::InvalidParameter(
                "orbit direction is a multiple of the identity".into(),
            ));
        }
        let norm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        Ok(Self {
            frobenius_normalized: (norm - 1.0).abs() <= 1e-12,
            c: v,
        })
    }

    /// Same as [`OrbitGaugeSpec::new`] but rescaled to `||c||_2 = 1`.
    pub fn normalized(c: &[f64]) -> Result<Self, GaugeError> {
        let mut spec = Self::new(c)?;
        let norm = spec.l2_norm();
        for t in &mut spec.c {
            *t /= norm;
        }
        spec.frobenius_normalized = true;
        Ok(spec)
    }

    pub fn entries(&self) -> &[f64] {
        &self.c
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn l2_norm(&self) -> f64 {
        self.c.iter().map(|t| t * t).sum::<f64>().sqrt()
    }

    pub fn is_frobenius_normalized(&self) -> bool {
        self.frobenius_normalized
    }

    /// Balanced spectrum: `sorted(c) = -reverse(sorted(c))` within `1e-12`.
    pub fn is_balanced(&self) -> bool {
        let n = self.c.len();
        (0..n).all(|i| (self.c[i] + self.c[n - 1 - i]).abs() <= 1e-12)
    }

    /// Partial sums of the decreasing entries; strictly positive for k < n.
    pub fn prefix_sums(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.c
            .iter()
            .map(|t| {
                acc += t;
                acc
            })
            .collect()
    }
}

/// A membership-oracle body: convex, contains the ball of `inner_radius`,
/// contained in the ball of `outer_radius`. Library-only (not serializable).
#[derive(Clone)]
pub struct OracleBody {
    pub membership: Arc<dyn Fn(&[f64]) -> bool + Send + Sync>,
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub dim: usize,
}

impl fmt::Debug for OracleBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OracleBody")
            .field("inner_radius", &self.inner_radius)
            .field("outer_radius", &self.outer_radius)
            .field("dim", &self.dim)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum GaugeKind {
    /// `l_p` on the eigenvalue vector, `p >= 1`.
    PGauge { p: f64 },
    /// Sum of the `k` largest absolute entries.
    KyFan { k: usize },
    /// `max |x_i|`.
    Spectral,
    /// `sum |x_i|`.
    Trace,
    /// Aligned decreasing pairing with a traceless direction `c` plus `|sum x_i|`.
    Orbit(OrbitGaugeSpec),
    /// Minkowski functional of an explicit polytope body.
    Polytope(Polytope),
    /// Twisted planar ellipse `sqrt((x+y)^2/a^2 + (x-y)^2/b^2)`.
    Ellipse { a: f64, b: f64 },
    /// `|x|+|y|` outside the open first quadrant, `(x^2+y^2)/(x+y)` inside.
    Toast,
    /// Ray bisection against a membership predicate.
    Oracle(OracleBody),
}

/// A permutation-symmetric Finsler gauge on `R^n`.
#[derive(Debug, Clone)]
pub struct Gauge {
    kind: GaugeKind,
    dim: usize,
    fully_homogeneous: bool,
}

/// Value of a support-function query; `lower_bound_only` marks numeric
/// maximizations whose starts disagreed beyond `1e-8`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportValue {
    pub value: f64,
    pub lower_bound_only: bool,
}

impl SupportValue {
    fn exact(value: f64) -> Self {
        SupportValue {
            value,
            lower_bound_only: false,
        }
    }
}

impl Gauge {
    pub fn p_gauge(n: usize, p: f64) -> Result<Self, GaugeError> {
        if p.is_nan() || p < 1.0 || !p.is_finite() {
            return Err(GaugeError::InvalidParameter(format!(
                "p-gauge needs finite p >= 1, got {p}"
            )));
        }
        Ok(Self {
            kind: GaugeKind::PGauge { p },
            dim: n,
            fully_homogeneous: true,
        })
    }

    pub fn ky_fan(n: usize, k: usize) -> Result<Self, GaugeError> {
        if k == 0 || k > n {
            return Err(GaugeError::InvalidParameter(format!(
                "Ky-Fan index must satisfy 1 <= k <= {n}, got {k}"
            )));
        }
        Ok(Self {
            kind: GaugeKind::KyFan { k },
            dim: n,
            fully_homogeneous: true,
        })
    }

    pub fn spectral(n: usize) -> Self {
        Self {
            kind: GaugeKind::Spectral,
            dim: n,
            fully_homogeneous: true,
        }
    }

    pub fn trace(n: usize) -> Self {
        Self {
            kind: GaugeKind::Trace,
            dim: n,
            fully_homogeneous: true,
        }
    }

    pub fn orbit(spec: OrbitGaugeSpec) -> Result<Self, GaugeError> {
        let dim = spec.dim();
        let fully_homogeneous = spec.is_balanced();
        Ok(Self {
            kind: GaugeKind::Orbit(spec),
            dim,
            fully_homogeneous,
        })
    }

    /// Gauge of an explicit polytope body with 0 in its (relative) interior.
    /// The vertex set must be closed under coordinate permutations.
    pub fn polytope(p: Polytope) -> Result<Self, GaugeError> {
        if p.facets.is_empty() {
            return Err(GaugeError::InvalidParameter(
                "polytope gauge needs facet data".into(),
            ));
        }
        for f in &p.facets {
            if f.offset <= 1e-12 {
                return Err(GaugeError::InvalidParameter(format!(
                    "origin not interior: facet offset {:.3e}",
                    f.offset
                )));
            }
        }
        // Permutation symmetry: adjacent transpositions generate S_n, so it
        // is enough that every transposed vertex is again a vertex.
        for v in &p.vertices {
            for i in 0..v.len().saturating_sub(1) {
                let mut w = v.clone();
                w.swap(i, i + 1);
                let hit = p.vertices.iter().any(|q| {
                    q.iter()
                        .zip(&w)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                        <= 1e-9
                });
                if !hit {
                    return Err(GaugeError::InvalidParameter(
                        "polytope vertex set is not permutation symmetric".into(),
                    ));
                }
            }
        }
        let fully_homogeneous = p.vertices.iter().all(|v| {
            let neg: Vec<f64> = v.iter().map(|t| -t).collect();
            matches!(polytope_gauge_value(&p, &neg), Ok(val) if (val - 1.0).abs() <= 1e-9)
        });
        let dim = p.ambient_dim;
        Ok(Self {
            kind: GaugeKind::Polytope(p),
            dim,
            fully_homogeneous,
        })
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self, GaugeError> {
        if a <= 0.0 || b <= 0.0 {
            return Err(GaugeError::InvalidParameter(
                "ellipse radii must be positive".into(),
            ));
        }
        Ok(Self {
            kind: GaugeKind::Ellipse { a, b },
            dim: 2,
            fully_homogeneous: true,
        })
    }

    pub fn toast() -> Self {
        Self {
            kind: GaugeKind::Toast,
            dim: 2,
            fully_homogeneous: false,
        }
    }

    pub fn oracle(body: OracleBody) -> Result<Self, GaugeError> {
        if body.inner_radius <= 0.0 || body.outer_radius < body.inner_radius {
            return Err(GaugeError::InvalidParameter(
                "oracle radii must satisfy 0 < inner <= outer".into(),
            ));
        }
        let dim = body.dim;
        let mut gauge = Self {
            kind: GaugeKind::Oracle(body),
            dim,
            fully_homogeneous: false,
        };
        gauge.fully_homogeneous = gauge.probe_sign_symmetry();
        Ok(gauge)
    }

    /// Sign-symmetry probe for bodies without closed forms: +-e_i, e_i +- e_j
    /// patterns plus deterministic pseudo-random sign flips.
    fn probe_sign_symmetry(&self) -> bool {
        let n = self.dim;
        let mut probes: Vec<Vec<f64>> = Vec::new();
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            probes.push(e);
            for j in 0..n {
                if i != j {
                    let mut v = vec![0.0; n];
                    v[i] = 1.0;
                    v[j] = 1.0;
                    probes.push(v.clone());
                    v[j] = -1.0;
                    probes.push(v);
                }
            }
        }
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..20 {
            let v: Vec<f64> = (0..n)
                .map(|_| {
                    state = state
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(1442695040888963407);
                    ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
                })
                .collect();
            probes.push(v);
        }
        probes.iter().all(|v| {
            let neg: Vec<f64> = v.iter().map(|t| -t).collect();
            match (self.eval(v), self.eval(&neg)) {
                (Ok(a), Ok(b)) => (a - b).abs() <= 1e-9 * (1.0 + a.abs()),
                _ => false,
            }
        })
    }

    pub fn kind(&self) -> &GaugeKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_fully_homogeneous(&self) -> bool {
        self.fully_homogeneous
    }

    /// `gauge_eval(e_1) = 1`, the normalization making `||i p|| = 1` for
    /// rank-one projections `p` after the matrix lift.
    pub fn is_normalized(&self) -> bool {
        let mut e1 = vec![0.0; self.dim];
        e1[0] = 1.0;
        matches!(self.eval(&e1), Ok(v) if (v - 1.0).abs() <= 1e-12)
    }

    fn check_len(&self, x: &[f64]) -> Result<(), GaugeError> {
        if x.len() != self.dim {
            return Err(GaugeError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Minkowski functional of the body at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<f64, GaugeError> {
        self.check_len(x)?;
        match &self.kind {
            GaugeKind::PGauge { p } => Ok(lp_norm(x, *p)),
            GaugeKind::KyFan { k } => {
                let mut a: Vec<f64> = x.iter().map(|t| t.abs()).collect();
                a.sort_by(|u, v| v.partial_cmp(u).unwrap_or(std::cmp::Ordering::Equal));
                Ok(a[..*k].iter().sum())
            }
            GaugeKind::Spectral => Ok(x.iter().map(|t| t.abs()).fold(0.0, f64::max)),
            GaugeKind::Trace => Ok(x.iter().map(|t| t.abs()).sum()),
            GaugeKind::Orbit(spec) => {
                let xs = sorted_desc(x);
                let aligned: f64 = spec.c.iter().zip(&xs).map(|(c, x)| c * x).sum();
                let tr: f64 = x.iter().sum();
                Ok(aligned + tr.abs())
            }
            GaugeKind::Polytope(p) => polytope_gauge_value(p, x),
            GaugeKind::Ellipse { a, b } => {
                let (u, v) = (x[0] + x[1], x[0] - x[1]);
                Ok(((u / a).powi(2) + (v / b).powi(2)).sqrt())
            }
            GaugeKind::Toast => {
                let (s, t) = (x[0], x[1]);
                if s >= 0.0 && t >= 0.0 {
                    if s + t == 0.0 {
                        Ok(0.0)
                    } else {
                        Ok((s * s + t * t) / (s + t))
                    }
                } else {
                    Ok(s.abs() + t.abs())
                }
            }
            GaugeKind::Oracle(body) => oracle_eval(body, x),
        }
    }

    /// Support function `sup { <y, x> : eval(x) <= 1 }` of the unit body.
    pub fn support(&self, y: &[f64]) -> Result<SupportValue, GaugeError> {
        self.check_len(y)?;
        match &self.kind {
            GaugeKind::PGauge { p } => {
                let q = if *p == 1.0 {
                    f64::INFINITY
                } else {
                    p / (p - 1.0)
                };
                Ok(SupportValue::exact(lp_norm(y, q)))
            }
            GaugeKind::KyFan { k } => {
                let l1: f64 = y.iter().map(|t| t.abs()).sum();
                let linf = y.iter().map(|t| t.abs()).fold(0.0, f64::max);
                Ok(SupportValue::exact((l1 / *k as f64).max(linf)))
            }
            GaugeKind::Spectral => Ok(SupportValue::exact(y.iter().map(|t| t.abs()).sum())),
            GaugeKind::Trace => Ok(SupportValue::exact(
                y.iter().map(|t| t.abs()).fold(0.0, f64::max),
            )),
            GaugeKind::Orbit(spec) => {
                let n = y.len() as f64;
                let mean = y.iter().sum::<f64>() / n;
                let centered: Vec<f64> = y.iter().map(|t| t - mean).collect();
                let ys = sorted_desc(&centered);
                let cps = spec.prefix_sums();
                let mut ratio: f64 = 0.0;
                let mut acc = 0.0;
                for k in 0..ys.len() - 1 {
                    acc += ys[k];
                    ratio = ratio.max(acc / cps[k]);
                }
                Ok(SupportValue::exact(ratio.max(mean.abs())))
            }
            GaugeKind::Polytope(p) => Ok(SupportValue::exact(p.support(y))),
            GaugeKind::Ellipse { a, b } => {
                let (u, v) = (y[0] + y[1], y[0] - y[1]);
                Ok(SupportValue::exact(
                    0.5 * ((a * u).powi(2) + (b * v).powi(2)).sqrt(),
                ))
            }
            GaugeKind::Toast => {
                let (u, v) = (y[0], y[1]);
                let mut best = u.abs().max(v.abs());
                if u != 0.0 || v != 0.0 {
                    let theta = v.atan2(u);
                    let quarter = std::f64::consts::FRAC_PI_4;
                    if (-quarter..=3.0 * quarter).contains(&theta) {
                        let arc = 0.5 * (u + v) + (u * u + v * v).sqrt() / 2.0f64.sqrt();
                        best = best.max(arc);
                    }
                }
                Ok(SupportValue::exact(best))
            }
            GaugeKind::Oracle(_) => self.support_numeric(y, 32, 0x5eed),
        }
    }

    /// Numeric support function: maximize `<y, d> / eval(d)` over directions.
    ///
    /// Planar gauges use a dense angle grid with golden-section refinement;
    /// higher dimensions use multi-start projected ascent with a numeric
    /// gradient. Deterministic for a fixed `seed`.
    pub fn support_numeric(
        &self,
        y: &[f64],
        starts: usize,
        seed: u64,
    ) -> Result<SupportValue, GaugeError> {
        self.check_len(y)?;
        if y.iter().all(|&t| t == 0.0) {
            return Ok(SupportValue::exact(0.0));
        }
        let objective = |d: &[f64]| -> Option<f64> {
            let g = self.eval(d).ok()?;
            if g <= 1e-14 {
                return None;
            }
            let ip: f64 = y.iter().zip(d).map(|(a, b)| a * b).sum();
            Some(ip / g)
        };

        if self.dim == 2 {
            let grid = 720;
            let mut best_val = f64::NEG_INFINITY;
            let mut best_theta = 0.0;
            for i in 0..grid {
                let theta = 2.0 * std::f64::consts::PI * i as f64 / grid as f64;
                if let Some(v) = objective(&[theta.cos(), theta.sin()]) {
                    if v > best_val {
                        best_val = v;
                        best_theta = theta;
                    }
                }
            }
            if !best_val.is_finite() {
                return Err(GaugeError::SupportNonConvergence(best_val));
            }
            let width = 2.0 * std::f64::consts::PI / grid as f64;
            let f = |t: f64| objective(&[t.cos(), t.sin()]).unwrap_or(f64::NEG_INFINITY);
            let (_, value) = golden_max(f, best_theta - width, best_theta + width, 1e-12);
            return Ok(SupportValue::exact(value.max(best_val)));
        }

        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = self.dim;
        let mut results: Vec<f64> = Vec::new();
        let mut best = f64::NEG_INFINITY;
        for s in 0..starts.max(1) {
            let mut d: Vec<f64> = if s == 0 {
                y.to_vec()
            } else {
                (0..n)
                    .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                    .collect()
            };
            normalize(&mut d);
            let Some(mut fval) = objective(&d) else {
                continue;
            };
            let mut step = 0.25;
            for _ in 0..400 {
                // Central-difference gradient, then an ascent step on the sphere.
                let h = 1e-6;
                let mut grad = vec![0.0; n];
                for i in 0..n {
                    let mut dp = d.clone();
                    let mut dm = d.clone();
                    dp[i] += h;
                    dm[i] -= h;
                    let (fp, fm) = (
                        objective(&dp).unwrap_or(fval),
                        objective(&dm).unwrap_or(fval),
                    );
                    grad[i] = (fp - fm) / (2.0 * h);
                }
                let gn = grad.iter().map(|t| t * t).sum::<f64>().sqrt();
                if gn < 1e-13 {
                    break;
                }
                let mut improved = false;
                while step > 1e-13 {
                    let mut cand: Vec<f64> = d
                        .iter()
                        .zip(&grad)
                        .map(|(a, g)| a + step * g / gn)
                        .collect();
                    normalize(&mut cand);
                    if let Some(fc) = objective(&cand) {
                        if fc > fval + 1e-16 {
                            d = cand;
                            fval = fc;
                            step *= 1.5;
                            improved = true;
                            break;
                        }
                    }
                    step *= 0.5;
                }
                if !improved {
                    break;
                }
            }
            results.push(fval);
            best = best.max(fval);
        }
        if results.is_empty() || !best.is_finite() {
            return Err(GaugeError::SupportNonConvergence(best));
        }
        let worst = results.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(SupportValue {
            value: best,
            lower_bound_only: (best - worst) > 1e-8 * (1.0 + best.abs()),
        })
    }

    /// One vector `u` with `<u, x> = eval(x)` and `<u, z> <= eval(z)` for all
    /// `z` (a subgradient of the gauge at `x`, i.e. a norming functional).
    pub fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>, GaugeError> {
        self.check_len(x)?;
        if x.iter().all(|&t| t == 0.0) {
            return Err(GaugeError::ZeroVector);
        }
        match &self.kind {
            GaugeKind::PGauge { p } => {
                if *p == 1.0 {
                    return Ok(x.iter().map(|t| sign(*t)).collect());
                }
                let norm = lp_norm(x, *p);
                let denom = norm.powf(p - 1.0);
                Ok(x
                    .iter()
                    .map(|t| sign(*t) * t.abs().powf(p - 1.0) / denom)
                    .collect())
            }
            GaugeKind::KyFan { k } => {
                let order = sort_indices_by_abs_desc(x);
                let mut u = vec![0.0; x.len()];
                for &i in order.iter().take(*k) {
                    u[i] = sign(x[i]);
                }
                Ok(u)
            }
            GaugeKind::Spectral => {
                let order = sort_indices_by_abs_desc(x);
                let mut u = vec![0.0; x.len()];
                let j = order[0];
                u[j] = sign(x[j]);
                Ok(u)
            }
            GaugeKind::Trace => Ok(x.iter().map(|t| sign(*t)).collect()),
            GaugeKind::Orbit(spec) => {
                let order = sort_indices_desc(x);
                let tr: f64 = x.iter().sum();
                let s = sign(tr);
                let mut u = vec![0.0; x.len()];
                for (rank, &i) in order.iter().enumerate() {
                    u[i] = spec.c[rank] + s;
                }
                Ok(u)
            }
            GaugeKind::Polytope(p) => {
                let val = polytope_gauge_value(p, x)?;
                let scale = 1.0 + val.abs();
                let mut candidates: Vec<Vec<f64>> = p
                    .facets
                    .iter()
                    .filter(|f| {
                        let r = dot(&f.normal, x) / f.offset;
                        (r - val).abs() <= 1e-12 * scale
                    })
                    .map(|f| f.normal.iter().map(|t| t / f.offset).collect())
                    .collect();
                candidates.sort_by(|a, b| lex_cmp(a, b));
                candidates
                    .into_iter()
                    .next()
                    .ok_or_else(|| GaugeError::InvalidParameter("no active facet".into()))
            }
            GaugeKind::Ellipse { a, b } => {
                let f = self.eval(x)?;
                let (u, v) = (x[0] + x[1], x[0] - x[1]);
                let (du, dv) = (u / (a * a), v / (b * b));
                Ok(vec![(du + dv) / f, (du - dv) / f])
            }
            GaugeKind::Toast => {
                let (s, t) = (x[0], x[1]);
                if s >= 0.0 && t >= 0.0 {
                    let d = s + t;
                    let q = s * s + t * t;
                    Ok(vec![
                        (2.0 * s * d - q) / (d * d),
                        (2.0 * t * d - q) / (d * d),
                    ])
                } else {
                    Ok(vec![sign(s), sign(t)])
                }
            }
            GaugeKind::Oracle(_) => {
                let val = self.eval(x)?;
                let h = 1e-6 * x.iter().map(|t| t.abs()).fold(0.0, f64::max).max(1e-3);
                let mut u = vec![0.0; x.len()];
                for i in 0..x.len() {
                    let mut xp = x.to_vec();
                    let mut xm = x.to_vec();
                    xp[i] += h;
                    xm[i] -= h;
                    u[i] = (self.eval(&xp)? - self.eval(&xm)?) / (2.0 * h);
                }
                let ip: f64 = u.iter().zip(x).map(|(a, b)| a * b).sum();
                if ip.abs() < 1e-12 * val {
                    return Err(GaugeError::SupportNonConvergence(ip));
                }
                // Pin the pairing <u, x> = eval(x) exactly.
                let fix = val / ip;
                for t in &mut u {
                    *t *= fix;
                }
                Ok(u)
            }
        }
    }

    /// Vertex set of the dual unit ball when it is a finitely enumerable
    /// polytope: the Ky-Fan family, orbit gauges and explicit polytope bodies.
    pub fn dual_vertices(&self) -> Option<Vec<Vec<f64>>> {
        let n = self.dim;
        match &self.kind {
            GaugeKind::Spectral => {
                let mut out = Vec::with_capacity(2 * n);
                for i in 0..n {
                    for s in [1.0, -1.0] {
                        let mut v = vec![0.0; n];
                        v[i] = s;
                        out.push(v);
                    }
                }
                Some(out)
            }
            GaugeKind::Trace => {
                if n > 12 {
                    return None;
                }
                Some(sign_patterns(n))
            }
            GaugeKind::PGauge { p } if *p == 1.0 => {
                if n > 12 {
                    return None;
                }
                Some(sign_patterns(n))
            }
            GaugeKind::KyFan { k } => {
                if binomial(n, *k).saturating_mul(1usize << *k) > 1 << 14 {
                    return None;
                }
                let mut out = Vec::new();
                let mut subset: Vec<usize> = (0..*k).collect();
                loop {
                    for signs in sign_patterns(*k) {
                        let mut v = vec![0.0; n];
                        for (slot, &i) in subset.iter().enumerate() {
                            v[i] = signs[slot];
                        }
                        out.push(v);
                    }
                    if !advance_subset(&mut subset, n) {
                        break;
                    }
                }
                Some(out)
            }
            GaugeKind::Orbit(spec) => {
                if n > 6 {
                    return None;
                }
                let perms = crate::geometry::distinct_permutations(spec.entries());
                let mut out = Vec::with_capacity(2 * perms.len());
                for p in perms {
                    for s in [1.0f64, -1.0] {
                        out.push(p.iter().map(|t| t + s).collect());
                    }
                }
                Some(out)
            }
            GaugeKind::Polytope(p) => Some(
                p.facets
                    .iter()
                    .map(|f| f.normal.iter().map(|t| t / f.offset).collect())
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Serializable description; `None` for oracle bodies.
    pub fn describe(&self) -> Option<GaugeSpec> {
        match &self.kind {
            GaugeKind::PGauge { p } => Some(GaugeSpec::PGauge { p: *p }),
            GaugeKind::KyFan { k } => Some(GaugeSpec::KyFan { k: *k }),
            GaugeKind::Spectral => Some(GaugeSpec::Spectral),
            GaugeKind::Trace => Some(GaugeSpec::Trace),
            GaugeKind::Orbit(spec) => Some(GaugeSpec::Orbit {
                c: spec.entries().to_vec(),
            }),
            GaugeKind::Polytope(p) => Some(GaugeSpec::Polytope {
                vertices: p.vertices.clone(),
                sum_zero: p.sum_zero,
            }),
            GaugeKind::Ellipse { a, b } => Some(GaugeSpec::Ellipse { a: *a, b: *b }),
            GaugeKind::Toast => Some(GaugeSpec::Toast),
            GaugeKind::Oracle(_) => None,
        }
    }
}

fn polytope_gauge_value(p: &Polytope, x: &[f64]) -> Result<f64, GaugeError> {
    if x.len() != p.ambient_dim {
        return Err(GaugeError::DimensionMismatch {
            expected: p.ambient_dim,
            got: x.len(),
        });
    }
    if p.sum_zero {
        let s: f64 = x.iter().sum();
        let scale = 1.0 + x.iter().map(|t| t.abs()).fold(0.0, f64::max);
        if s.abs() > 1e-9 * scale {
            return Err(GaugeError::OutsideAffineHull(s));
        }
    }
    let mut best = 0.0f64;
    for f in &p.facets {
        best = best.max(dot(&f.normal, x) / f.offset);
    }
    Ok(best)
}

fn oracle_eval(body: &OracleBody, x: &[f64]) -> Result<f64, GaugeError> {
    let nx = x.iter().map(|t| t * t).sum::<f64>().sqrt();
    if nx == 0.0 {
        return Ok(0.0);
    }
    let mut lo = nx / body.outer_radius;
    let mut hi = nx / body.inner_radius;
    let scaled = |t: f64| -> Vec<f64> { x.iter().map(|v| v / t).collect() };
    if !(body.membership)(&scaled(hi)) {
        return Err(GaugeError::BracketFailure(format!(
            "point of norm {:.3e} outside the claimed inner ball",
            nx / hi
        )));
    }
    if (body.membership)(&scaled(lo * (1.0 - 1e-6))) {
        return Err(GaugeError::BracketFailure(
            "body exceeds the claimed outer radius".into(),
        ));
    }
    for _ in 0..200 {
        if hi - lo <= 1e-10 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if (body.membership)(&scaled(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Serializable gauge description: `{"kind": "...", ...params}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GaugeSpec {
    PGauge {
        p: f64,
    },
    KyFan {
        k: usize,
    },
    Spectral,
    Trace,
    Orbit {
        c: Vec<f64>,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    Toast,
    Polytope {
        vertices: Vec<Vec<f64>>,
        #[serde(default)]
        sum_zero: bool,
    },
}

impl GaugeSpec {
    /// Instantiates the gauge at ambient dimension `n`.
    pub fn build(&self, n: usize) -> Result<Gauge, GaugeError> {
        match self {
            GaugeSpec::PGauge { p } => Gauge::p_gauge(n, *p),
            GaugeSpec::KyFan { k } => Gauge::ky_fan(n, *k),
            GaugeSpec::Spectral => Ok(Gauge::spectral(n)),
            GaugeSpec::Trace => Ok(Gauge::trace(n)),
            GaugeSpec::Orbit { c } => {
                if c.len() != n {
                    return Err(GaugeError::DimensionMismatch {
                        expected: n,
                        got: c.len(),
                    });
                }
                Gauge::orbit(OrbitGaugeSpec::new(c)?)
            }
            GaugeSpec::Ellipse { a, b } => {
                if n != 2 {
                    return Err(GaugeError::DimensionMismatch { expected: 2, got: n });
                }
                Gauge::ellipse(*a, *b)
            }
            GaugeSpec::Toast => {
                if n != 2 {
                    return Err(GaugeError::DimensionMismatch { expected: 2, got: n });
                }
                Ok(Gauge::toast())
            }
            GaugeSpec::Polytope { vertices, sum_zero } => {
                if vertices.first().map(|v| v.len()) != Some(n) {
                    return Err(GaugeError::DimensionMismatch {
                        expected: n,
                        got: vertices.first().map(|v| v.len()).unwrap_or(0),
                    });
                }
                let p = Polytope::from_vertices(vertices.clone(), *sum_zero)
                    .map_err(|e| GaugeError::InvalidParameter(e.to_string()))?;
                Gauge::polytope(p)
            }
        }
    }

    /// A short stable identifier for reports.
    pub fn label(&self) -> String {
        match self {
            GaugeSpec::PGauge { p } => format!("p_gauge({p})"),
            GaugeSpec::KyFan { k } => format!("ky_fan({k})"),
            GaugeSpec::Spectral => "spectral".into(),
            GaugeSpec::Trace => "trace".into(),
            GaugeSpec::Orbit { c } => format!("orbit({c:?})"),
            GaugeSpec::Ellipse { a, b } => format!("ellipse({a},{b})"),
            GaugeSpec::Toast => "toast".into(),
            GaugeSpec::Polytope { vertices, .. } => format!("polytope({} verts)", vertices.len()),
        }
    }
}

/// Certificate check for a claimed subgradient: pairing equality at `x` and
/// support feasibility `<u, z> <= eval(z)` on sampled `z`.
/// Returns the largest violation found.
pub fn certify_subgradient<R: rand::Rng + ?Sized>(
    g: &Gauge,
    x: &[f64],
    u: &[f64],
    samples: usize,
    rng: &mut R,
) -> Result<f64, GaugeError> {
    let val = g.eval(x)?;
    let ip: f64 = u.iter().zip(x).map(|(a, b)| a * b).sum();
    let mut worst = (ip - val).abs();
    for _ in 0..samples {
        let z: Vec<f64> = (0..g.dim())
            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let ez = g.eval(&z)?;
        let iz: f64 = u.iter().zip(&z).map(|(a, b)| a * b).sum();
        worst = worst.max(iz - ez);
    }
    Ok(worst)
}

pub(crate) fn sorted_desc(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    v
}

/// Indices of `x` sorted by value descending, ties by index ascending.
pub fn sort_indices_desc(x: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| {
        x[b].partial_cmp(&x[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    idx
}

/// Indices sorted by absolute value descending, ties by index ascending.
pub fn sort_indices_by_abs_desc(x: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| {
        x[b].abs()
            .partial_cmp(&x[a].abs())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    idx
}

fn sign(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return x.iter().map(|t| t.abs()).fold(0.0, f64::max);
    }
    if p == 1.0 {
        return x.iter().map(|t| t.abs()).sum();
    }
    let scale = x.iter().map(|t| t.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = x.iter().map(|t| (t.abs() / scale).powf(p)).sum();
    scale * s.powf(1.0 / p)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    std::cmp::Ordering::Equal
}

fn normalize(d: &mut [f64]) {
    let n = d.iter().map(|t| t * t).sum::<f64>().sqrt();
    if n > 0.0 {
        for t in d.iter_mut() {
            *t /= n;
        }
    }
}

fn sign_patterns(n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(1 << n);
    for mask in 0..(1usize << n) {
        out.push(
            (0..n)
                .map(|i| if mask & (1 << i) != 0 { -1.0 } else { 1.0 })
                .collect(),
        );
    }
    out
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

fn advance_subset(subset: &mut [usize], m: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < m - (k - i) {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Golden-section maximization of `f` on `[a, b]` to width `tol`.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a, b);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    (mid, f(mid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn random_vec<R: Rng>(n: usize, r: &mut R) -> Vec<f64> {
        (0..n)
            .map(|_| r.sample::<f64, _>(rand_distr::StandardNormal))
            .collect()
    }

    fn all_test_gauges(n: usize) -> Vec<Gauge> {
        let mut gauges = vec![
            Gauge::p_gauge(n, 1.5).unwrap(),
            Gauge::p_gauge(n, 2.0).unwrap(),
            Gauge::p_gauge(n, 3.0).unwrap(),
            Gauge::spectral(n),
            Gauge::trace(n),
            Gauge::ky_fan(n, (n / 2).max(1)).unwrap(),
        ];
        if n == 2 {
            gauges.push(Gauge::ellipse(1.0, 2.0).unwrap());
            gauges.push(Gauge::toast());
        }
        if n == 3 {
            let s = 1.0 / 2.0f64.sqrt();
            gauges.push(Gauge::orbit(OrbitGaugeSpec::new(&[s, 0.0, -s]).unwrap()).unwrap());
            gauges.push(
                Gauge::orbit(OrbitGaugeSpec::normalized(&[1.0, 1.0, -2.0]).unwrap()).unwrap(),
            );
        }
        gauges
    }

    #[test]
    fn toast_value_at_one_one() {
        let g = Gauge::toast();
        assert!((g.eval(&[1.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn every_gauge_vanishes_at_zero() {
        for n in [2, 3, 4] {
            for g in all_test_gauges(n) {
                assert_eq!(g.eval(&vec![0.0; n]).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn orbit_gauge_on_its_own_direction() {
        let s = 1.0 / 2.0f64.sqrt();
        let g = Gauge::orbit(OrbitGaugeSpec::new(&[s, 0.0, -s]).unwrap()).unwrap();
        assert!((g.eval(&[s, 0.0, -s]).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gauge_symmetry_under_permutations() {
        let mut r = rng(101);
        for n in [2, 3, 4] {
            for g in all_test_gauges(n) {
                for _ in 0..200 {
                    let x = random_vec(n, &mut r);
                    let v0 = g.eval(&x).unwrap();
                    for _ in 0..20 {
                        let mut y = x.clone();
                        let i = r.gen_range(0..n);
                        let j = r.gen_range(0..n);
                        y.swap(i, j);
                        let v1 = g.eval(&y).unwrap();
                        assert!(
                            (v0 - v1).abs() <= 1e-10 * (1.0 + v0.abs()),
                            "symmetry violated for {:?}",
                            g.kind()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn gauge_triangle_inequality() {
        let mut r = rng(103);
        for n in [2, 3, 4] {
            for g in all_test_gauges(n) {
                for _ in 0..300 {
                    let x = random_vec(n, &mut r);
                    let y = random_vec(n, &mut r);
                    let s: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
                    let lhs = g.eval(&s).unwrap();
                    let rhs = g.eval(&x).unwrap() + g.eval(&y).unwrap();
                    assert!(lhs <= rhs + 1e-10, "triangle failed for {:?}", g.kind());
                }
            }
        }
    }

    #[test]
    fn positive_homogeneity_and_nondegeneracy() {
        let mut r = rng(107);
        for n in [2, 3] {
            for g in all_test_gauges(n) {
                for _ in 0..100 {
                    let x = random_vec(n, &mut r);
                    let lam: f64 = r.gen_range(0.0..4.0);
                    let lx: Vec<f64> = x.iter().map(|t| lam * t).collect();
                    let a = g.eval(&lx).unwrap();
                    let b = lam * g.eval(&x).unwrap();
                    assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
                    assert!(g.eval(&x).unwrap() > 0.0);
                }
            }
        }
    }

    #[test]
    fn support_euclidean_self_dual() {
        let g = Gauge::p_gauge(2, 2.0).unwrap();
        let s = g.support(&[3.0, 4.0]).unwrap();
        assert!((s.value - 5.0).abs() < 1e-12);
    }

    #[test]
    fn support_ky_fan_closed_form() {
        let g = Gauge::ky_fan(4, 2).unwrap();
        let y = [3.0, -1.0, 2.0, 0.5];
        let s = g.support(&y).unwrap().value;
        let l1: f64 = y.iter().map(|t| t.abs()).sum();
        let linf = y.iter().map(|t| t.abs()).fold(0.0, f64::max);
        assert!((s - (l1 / 2.0).max(linf)).abs() < 1e-12);
    }

    #[test]
    fn support_orbit_at_own_direction() {
        let s = 1.0 / 2.0f64.sqrt();
        let g = Gauge::orbit(OrbitGaugeSpec::new(&[s, 0.0, -s]).unwrap()).unwrap();
        let v = g.support(&[s, 0.0, -s]).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12, "got {}", v.value);
    }

    #[test]
    fn eval_matches_dual_vertex_maximum() {
        // The gauge is the support function of its dual ball, so eval must
        // agree with the maximum pairing against the enumerated dual vertices.
        let mut r = rng(109);
        for g in [
            Gauge::orbit(OrbitGaugeSpec::new(&[1.0 / 2.0f64.sqrt(), 0.0, -1.0 / 2.0f64.sqrt()]).unwrap())
                .unwrap(),
            Gauge::orbit(OrbitGaugeSpec::normalized(&[1.0, 1.0, -2.0]).unwrap()).unwrap(),
            Gauge::spectral(3),
            Gauge::trace(3),
            Gauge::ky_fan(3, 2).unwrap(),
        ] {
            let duals = g.dual_vertices().unwrap();
            for _ in 0..200 {
                let y = random_vec(3, &mut r);
                let closed = g.eval(&y).unwrap();
                let via_vertices = duals
                    .iter()
                    .map(|u| u.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>())
                    .fold(f64::NEG_INFINITY, f64::max);
                assert!(
                    (closed - via_vertices).abs() <= 1e-10 * (1.0 + closed.abs()),
                    "{closed} vs {via_vertices} for {:?}",
                    g.kind()
                );
            }
        }
    }

    #[test]
    fn support_lower_bounded_by_feasible_pairings() {
        // sup over the unit body dominates <y, x/eval(x)> for any x.
        let mut r = rng(110);
        let s = 1.0 / 2.0f64.sqrt();
        let g = Gauge::orbit(OrbitGaugeSpec::new(&[s, 0.0, -s]).unwrap()).unwrap();
        for _ in 0..200 {
            let y = random_vec(3, &mut r);
            let sup = g.support(&y).unwrap().value;
            let x = random_vec(3, &mut r);
            let e = g.eval(&x).unwrap();
            let ip: f64 = y.iter().zip(&x).map(|(a, b)| a * b).sum();
            assert!(ip / e <= sup + 1e-10);
        }
    }

    #[test]
    fn support_numeric_agrees_with_closed_forms() {
        let mut r = rng(113);
        for g in [
            Gauge::ellipse(1.0, 2.0).unwrap(),
            Gauge::toast(),
            Gauge::p_gauge(2, 3.0).unwrap(),
        ] {
            for _ in 0..50 {
                let y = random_vec(2, &mut r);
                let exact = g.support(&y).unwrap().value;
                let numeric = g.support_numeric(&y, 32, 7).unwrap().value;
                assert!(
                    (exact - numeric).abs() <= 1e-8 * (1.0 + exact.abs()),
                    "support mismatch for {:?}: {exact} vs {numeric}",
                    g.kind()
                );
            }
        }
    }

    #[test]
    fn subgradient_p_gauge_closed_form() {
        let g = Gauge::p_gauge(2, 2.0).unwrap();
        let u = g.subgradient(&[3.0, 4.0]).unwrap();
        assert!((u[0] - 0.6).abs() < 1e-12 && (u[1] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn subgradient_certificates_all_gauges() {
        let mut r = rng(127);
        for n in [2, 3, 4] {
            for g in all_test_gauges(n) {
                for _ in 0..40 {
                    let x = random_vec(n, &mut r);
                    let u = g.subgradient(&x).unwrap();
                    let worst = certify_subgradient(&g, &x, &u, 500, &mut r).unwrap();
                    assert!(
                        worst <= 1e-8,
                        "subgradient certificate failed for {:?}: {worst}",
                        g.kind()
                    );
                }
            }
        }
    }

    #[test]
    fn orbit_subgradient_is_aligned_direction() {
        // On the traceless slice at a regular sorted point the subgradient is
        // the direction vector itself (rearrangement maximizer).
        let s = 1.0 / 2.0f64.sqrt();
        let g = Gauge::orbit(OrbitGaugeSpec::new(&[s, 0.0, -s]).unwrap()).unwrap();
        let u = g.subgradient(&[0.9, 0.1, -1.0]).unwrap();
        assert_eq!(u, vec![s, 0.0, -s]);
        // Unsorted input: entries follow the ranking of x.
        let u = g.subgradient(&[0.1, -1.0, 0.9]).unwrap();
        assert_eq!(u, vec![0.0, -s, s]);
    }

    #[test]
    fn subgradient_rejects_zero() {
        let g = Gauge::spectral(3);
        assert!(matches!(
            g.subgradient(&[0.0, 0.0, 0.0]),
            Err(GaugeError::ZeroVector)
        ));
    }

    #[test]
    fn full_homogeneity_flags() {
        let s = 1.0 / 2.0f64.sqrt();
        let balanced = Gauge::orbit(OrbitGaugeSpec::new(&[s, 0.0, -s]).unwrap()).unwrap();
        assert!(balanced.is_fully_homogeneous());
        let unbalanced =
            Gauge::orbit(OrbitGaugeSpec::normalized(&[1.0, 1.0, -2.0]).unwrap()).unwrap();
        assert!(!unbalanced.is_fully_homogeneous());
        assert!(!Gauge::toast().is_fully_homogeneous());
        assert!(Gauge::p_gauge(3, 1.5).unwrap().is_fully_homogeneous());
    }

    #[test]
    fn oracle_gauge_reproduces_ellipse() {
        let exact = Gauge::ellipse(1.0, 2.0).unwrap();
        let membership = {
            let inner = exact.clone();
            move |x: &[f64]| inner.eval(x).map(|v| v <= 1.0).unwrap_or(false)
        };
        let oracle = Gauge::oracle(OracleBody {
            membership: Arc::new(membership),
            inner_radius: 0.4,
            outer_radius: 1.5,
            dim: 2,
        })
        .unwrap();
        let mut r = rng(131);
        for _ in 0..100 {
            let x = random_vec(2, &mut r);
            let a = exact.eval(&x).unwrap();
            let b = oracle.eval(&x).unwrap();
            assert!((a - b).abs() <= 1e-8 * (1.0 + a), "{a} vs {b}");
        }
        assert!(oracle.is_fully_homogeneous());
    }

    #[test]
    fn oracle_toast_is_not_sign_symmetric() {
        let toast = Gauge::toast();
        let membership = {
            let inner = toast.clone();
            move |x: &[f64]| inner.eval(x).map(|v| v <= 1.0).unwrap_or(false)
        };
        let oracle = Gauge::oracle(OracleBody {
            membership: Arc::new(membership),
            inner_radius: 0.5,
            outer_radius: 1.5,
            dim: 2,
        })
        .unwrap();
        assert!(!oracle.is_fully_homogeneous());
    }

    #[test]
    fn toast_corner_is_not_exposed() {
        // The sphere point (1,0) is smooth (the arc joins the segment with a
        // common tangent), so its unique supporting functional also supports
        // the whole segment down to (0,-1): no functional exposes (1,0) alone.
        let g = Gauge::toast();
        let u = g.subgradient(&[1.0, 0.0]).unwrap();
        assert!((u[0] - 1.0).abs() < 1e-12 && (u[1] + 1.0).abs() < 1e-12);
        for other in [[0.0, -1.0], [0.5, -0.5], [0.25, -0.75]] {
            let pairing = u[0] * other[0] + u[1] * other[1];
            let ev = g.eval(&other).unwrap();
            assert!(
                (pairing - ev).abs() <= 1e-12,
                "support functional of (1,0) must also support {other:?}"
            );
        }
    }

    #[test]
    fn orbit_spec_validation() {
        assert!(OrbitGaugeSpec::new(&[1.0, 1.0]).is_err());
        assert!(OrbitGaugeSpec::new(&[2.0, 2.0, 2.0]).is_err());
        let c = OrbitGaugeSpec::new(&[3.0, 1.0, -1.0]).unwrap();
        // mean projected out and sorted decreasingly
        assert!(c.entries().iter().sum::<f64>().abs() < 1e-12);
        assert!(c.entries().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn orbit_balance_detection() {
        assert!(OrbitGaugeSpec::new(&[1.0, 0.0, -1.0]).unwrap().is_balanced());
        assert!(!OrbitGaugeSpec::new(&[1.0, 1.0, -2.0]).unwrap().is_balanced());
    }

    #[test]
    fn orbit_zero_vector_bound_on_traceless_slice() {
        let mut r = rng(137);
        let g = Gauge::orbit(OrbitGaugeSpec::normalized(&[1.0, 1.0, -2.0]).unwrap()).unwrap();
        for _ in 0..300 {
            let mut x = random_vec(3, &mut r);
            let mean = x.iter().sum::<f64>() / 3.0;
            for t in &mut x {
                *t -= mean;
            }
            let v = g.eval(&x).unwrap();
            assert!(v >= 0.0);
            let norm: f64 = x.iter().map(|t| t * t).sum::<f64>().sqrt();
            if norm > 1e-9 {
                assert!(v > 0.0, "degenerate value at x = {x:?}");
            }
        }
    }

    #[test]
    fn gauge_spec_json_round_trip() {
        let specs = vec![
            GaugeSpec::PGauge { p: 1.5 },
            GaugeSpec::KyFan { k: 2 },
            GaugeSpec::Spectral,
            GaugeSpec::Trace,
            GaugeSpec::Orbit {
                c: vec![0.7071, 0.0, -0.7071],
            },
            GaugeSpec::Ellipse { a: 1.0, b: 2.0 },
            GaugeSpec::Toast,
        ];
        for spec in specs {
            let json = serde_json::to_string(&spec).unwrap();
            let back: GaugeSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(spec, back);
        }
        // The documented CLI shape parses.
        let spec: GaugeSpec =
            serde_json::from_str(r#"{"kind":"orbit","c":[0.7071,0,-0.7071]}"#).unwrap();
        assert!(matches!(spec, GaugeSpec::Orbit { .. }));
        assert!(spec.build(3).is_ok());
        assert!(spec.build(4).is_err());
    }

    #[test]
    fn double_dual_recovers_fully_homogeneous_gauges() {
        // sup over u of <x, u>/support(u) equals eval(x); the subgradient
        // direction attains it, random directions must not exceed it.
        let mut r = rng(139);
        for g in [
            Gauge::p_gauge(3, 1.5).unwrap(),
            Gauge::spectral(3),
            Gauge::ky_fan(3, 2).unwrap(),
        ] {
            for _ in 0..20 {
                let x = random_vec(3, &mut r);
                let eval = g.eval(&x).unwrap();
                let mut best = f64::NEG_INFINITY;
                for _ in 0..64 {
                    let u = random_vec(3, &mut r);
                    let s = g.support(&u).unwrap().value;
                    if s > 1e-12 {
                        let ip: f64 = u.iter().zip(&x).map(|(a, b)| a * b).sum();
                        best = best.max(ip / s);
                    }
                }
                let u = g.subgradient(&x).unwrap();
                let s = g.support(&u).unwrap().value;
                let ip: f64 = u.iter().zip(&x).map(|(a, b)| a * b).sum();
                best = best.max(ip / s);
                assert!(best <= eval + 1e-9, "double dual exceeded eval");
                assert!(
                    (best - eval).abs() <= 1e-6 * (1.0 + eval),
                    "{best} vs {eval}"
                );
            }
        }
    }
}
