//! Polytope geometry of orbit-norm balls: vertex enumeration, polar duals
//! inside the traceless hyperplane, self-duality detection and norming-set
//! enumeration for polytope gauges.

pub mod simplex;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gauge::{Gauge, GaugeError, OrbitGaugeSpec};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("dimension {0} too large for facet enumeration (limit 5)")]
    DimensionTooLarge(usize),
    #[error("polytope needs at least one vertex")]
    EmptyVertices,
    #[error("vertex length mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vertex is not in the sum-zero hyperplane (sum {0:.3e})")]
    OutsideHyperplane(f64),
    #[error("origin is not in the relative interior (facet offset {0:.3e})")]
    OriginNotInterior(f64),
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("gauge has no enumerable dual vertex set")]
    NotPolytopeGauge,
    #[error(transparent)]
    Gauge(#[from] GaugeError),
    #[error(transparent)]
    Simplex(#[from] simplex::SimplexError),
}

/// One facet inequality `<normal, x> <= offset` (normal in ambient coordinates;
/// for sum-zero polytopes it is itself traceless).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// A convex polytope given by its extreme points and facet inequalities,
/// optionally constrained to the hyperplane `sum x_i = 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Polytope {
    pub ambient_dim: usize,
    pub sum_zero: bool,
    pub vertices: Vec<Vec<f64>>,
    pub facets: Vec<Facet>,
}

/// Orthonormal basis of `{x : sum x_i = 0}` as columns (Helmert-style).
pub fn slice_basis(n: usize) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(n, n - 1);
    for k in 1..n {
        let scale = 1.0 / ((k * (k + 1)) as f64).sqrt();
        for i in 0..k {
            b[(i, k - 1)] = scale;
        }
        b[(k, k - 1)] = -(k as f64) * scale;
    }
    b
}

impl Polytope {
    /// Builds a polytope from vertex data: deduplicates, drops non-extreme
    /// points, and enumerates facets by brute-force hyperplane search in the
    /// effective dimension (guarded to slice dimension <= 4).
    pub fn from_vertices(vertices: Vec<Vec<f64>>, sum_zero: bool) -> Result<Self, GeometryError> {
        if vertices.is_empty() {
            return Err(GeometryError::EmptyVertices);
        }
        let n = vertices[0].len();
        for v in &vertices {
            if v.len() != n {
                return Err(GeometryError::DimensionMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
            if sum_zero {
                let s: f64 = v.iter().sum();
                let scale = 1.0 + v.iter().map(|t| t.abs()).fold(0.0, f64::max);
                if s.abs() > 1e-9 * scale {
                    return Err(GeometryError::OutsideHyperplane(s));
                }
            }
        }
        let d = if sum_zero { n - 1 } else { n };
        if d > 4 {
            return Err(GeometryError::DimensionTooLarge(n));
        }

        let mut verts = dedup_points(vertices, 1e-10);
        verts = drop_non_extreme(verts, 1e-9);
        verts.sort_by(|a, b| lex_cmp(a, b));

        let (slice_pts, embed): (Vec<DVector<f64>>, Option<DMatrix<f64>>) = if sum_zero {
            let basis = slice_basis(n);
            let pts = verts
                .iter()
                .map(|v| basis.transpose() * DVector::from_column_slice(v))
                .collect();
            (pts, Some(basis))
        } else {
            (
                verts
                    .iter()
                    .map(|v| DVector::from_column_slice(v))
                    .collect(),
                None,
            )
        };

        let slice_facets = enumerate_facets(&slice_pts, d)?;
        let facets = slice_facets
            .into_iter()
            .map(|(normal, offset)| {
                let ambient = match &embed {
                    Some(basis) => basis * &normal,
                    None => normal.clone(),
                };
                Facet {
                    normal: ambient.iter().copied().collect(),
                    offset,
                }
            })
            .collect();

        Ok(Polytope {
            ambient_dim: n,
            sum_zero,
            vertices: verts,
            facets,
        })
    }

    /// Effective dimension of the affine hull container.
    pub fn slice_dim(&self) -> usize {
        if self.sum_zero {
            self.ambient_dim - 1
        } else {
            self.ambient_dim
        }
    }

    /// Support function `max_v <y, v>`.
    pub fn support(&self, y: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot(v, y))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Minkowski functional `max_f <a_f, x> / b_f`; requires 0 interior.
    pub fn gauge_value(&self, x: &[f64]) -> Result<f64, GeometryError> {
        let mut best = 0.0f64;
        for f in &self.facets {
            if f.offset <= 1e-12 {
                return Err(GeometryError::OriginNotInterior(f.offset));
            }
            best = best.max(dot(&f.normal, x) / f.offset);
        }
        Ok(best)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.facets
            .iter()
            .all(|f| dot(&f.normal, x) <= f.offset + tol)
    }

    /// Vertices mapped to slice coordinates (identity when not sum-zero).
    pub fn slice_vertices(&self) -> Vec<DVector<f64>> {
        if self.sum_zero {
            let basis = slice_basis(self.ambient_dim);
            self.vertices
                .iter()
                .map(|v| basis.transpose() * DVector::from_column_slice(v))
                .collect()
        } else {
            self.vertices
                .iter()
                .map(|v| DVector::from_column_slice(v))
                .collect()
        }
    }

    /// Every vertex must be outside the hull of the others.
    pub fn extreme_point_audit(&self, tol: f64) -> bool {
        let pts = self.slice_vertices();
        for (i, p) in pts.iter().enumerate() {
            let others: Vec<Vec<f64>> = pts
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| q.iter().copied().collect())
                .collect();
            let point: Vec<f64> = p.iter().copied().collect();
            if simplex::in_convex_hull(&point, &others, tol) {
                return false;
            }
        }
        true
    }

    /// CSV rows of slice coordinates, one vertex per line.
    pub fn slice_csv(&self) -> String {
        let mut out = String::new();
        let d = self.slice_dim();
        let header: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for v in self.slice_vertices() {
            let row: Vec<String> = v.iter().map(|t| format!("{t}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
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

fn dedup_points(points: Vec<Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in points {
        let dup = out.iter().any(|q| {
            p.iter()
                .zip(q)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                <= tol
        });
        if !dup {
            out.push(p);
        }
    }
    out
}

fn drop_non_extreme(points: Vec<Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    if points.len() <= 2 {
        return points;
    }
    let mut keep = vec![true; points.len()];
    for i in 0..points.len() {
        let others: Vec<Vec<f64>> = points
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i && keep[*j])
            .map(|(_, q)| q.clone())
            .collect();
        if simplex::in_convex_hull(&points[i], &others, tol) {
            keep[i] = false;
        }
    }
    points
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(p, _)| p)
        .collect()
}

/// Brute-force facet search: every hyperplane spanned by `d` vertices that
/// leaves all vertices on one side is a facet candidate.
fn enumerate_facets(
    pts: &[DVector<f64>],
    d: usize,
) -> Result<Vec<(DVector<f64>, f64)>, GeometryError> {
    let scale = pts.iter().map(|p| p.amax()).fold(0.0f64, f64::max).max(1.0);
    let side_tol = 1e-9 * scale;

    if d == 0 {
        return Err(GeometryError::Degenerate("zero-dimensional slice".into()));
    }
    if d == 1 {
        let vals: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        if (hi - lo).abs() <= side_tol {
            return Err(GeometryError::Degenerate("single point".into()));
        }
        return Ok(vec![
            (DVector::from_column_slice(&[1.0]), hi),
            (DVector::from_column_slice(&[-1.0]), -lo),
        ]);
    }

    let m = pts.len();
    if m < d {
        return Err(GeometryError::Degenerate(
            "fewer vertices than the slice dimension".into(),
        ));
    }
    let mut facets: Vec<(DVector<f64>, f64)> = Vec::new();
    let mut subset: Vec<usize> = (0..d).collect();

    loop {
        if let Some((normal, offset)) = hyperplane_through(pts, &subset, side_tol) {
            let mut above = false;
            let mut below = false;
            for p in pts {
                let s = normal.dot(p) - offset;
                if s > side_tol {
                    above = true;
                } else if s < -side_tol {
                    below = true;
                }
                if above && below {
                    break;
                }
            }
            if above != below {
                let (nrm, off) = if above {
                    (-normal, -offset)
                } else {
                    (normal, offset)
                };
                let dup = facets.iter().any(|(fnrm, foff)| {
                    (fnrm - &nrm).amax() <= 1e-8 && (foff - off).abs() <= 1e-8 * scale
                });
                if !dup {
                    facets.push((nrm, off));
                }
            } else if !above && !below {
                return Err(GeometryError::Degenerate(
                    "vertex set is contained in a hyperplane of the slice".into(),
                ));
            }
        }
        if !advance_subset(&mut subset, m) {
            break;
        }
    }

    if facets.is_empty() {
        return Err(GeometryError::Degenerate("no facets found".into()));
    }
    Ok(facets)
}

/// Unit normal and offset of the hyperplane through the selected points,
/// or `None` when they are affinely degenerate (rank filter).
fn hyperplane_through(
    pts: &[DVector<f64>],
    subset: &[usize],
    tol: f64,
) -> Option<(DVector<f64>, f64)> {
    let d = pts[0].len();
    let base = &pts[subset[0]];
    // Pad to square so the thin SVD still carries the full right basis.
    let mut rows = DMatrix::zeros(d, d);
    for (r, &i) in subset[1..].iter().enumerate() {
        let diff = &pts[i] - base;
        rows.set_row(r, &diff.transpose());
    }
    let svd = rows.svd(false, true);
    let sv = &svd.singular_values;
    // Need rank exactly d-1 so the normal is unique.
    let rank = sv.iter().filter(|&&s| s > tol.max(1e-12)).count();
    if rank != d - 1 {
        return None;
    }
    let vt = svd.v_t.as_ref()?;
    // Row of v_t paired with the smallest singular value spans the kernel.
    let min_idx = (0..d)
        .min_by(|&a, &b| sv[a].partial_cmp(&sv[b]).unwrap_or(std::cmp::Ordering::Equal))?;
    let normal = vt.row(min_idx).transpose();
    let nn = normal.norm();
    if nn < 1e-12 {
        return None;
    }
    let normal = normal / nn;
    let offset = normal.dot(base);
    Some((normal, offset))
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

/// The convex hull of all coordinate permutations of `c`, living in the
/// sum-zero hyperplane. Guarded to `n <= 5`.
pub fn orbit_polytope(c: &OrbitGaugeSpec) -> Result<Polytope, GeometryError> {
    let n = c.dim();
    if n > 5 {
        return Err(GeometryError::DimensionTooLarge(n));
    }
    let vertices = distinct_permutations(c.entries());
    Polytope::from_vertices(vertices, true)
}

/// All distinct coordinate permutations of `v` (multiset-aware).
pub fn distinct_permutations(v: &[f64]) -> Vec<Vec<f64>> {
    let mut items = v.to_vec();
    let mut out = Vec::new();
    heap_permutations(&mut items, &mut out);
    out.sort_by(|a, b| lex_cmp(a, b));
    out.dedup_by(|a, b| a == b);
    out
}

fn heap_permutations(items: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
    fn rec(k: usize, items: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if k == 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            rec(k - 1, items, out);
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    let k = items.len();
    rec(k, items, out);
}

/// Polar dual within the affine hull: dual vertices are facet normals scaled
/// by `1/offset`; dual facets come from the primal vertices.
pub fn polar_dual(p: &Polytope) -> Result<Polytope, GeometryError> {
    for f in &p.facets {
        if f.offset <= 1e-12 {
            return Err(GeometryError::OriginNotInterior(f.offset));
        }
    }
    let dual_vertices: Vec<Vec<f64>> = p
        .facets
        .iter()
        .map(|f| f.normal.iter().map(|t| t / f.offset).collect())
        .collect();
    // Re-derive facets from scratch; primal vertices are then audited against
    // the result (vertex-facet duality).
    let dual = Polytope::from_vertices(dual_vertices, p.sum_zero)?;
    for v in &p.vertices {
        let mut supported = 0usize;
        for u in &dual.vertices {
            if (dot(u, v) - 1.0).abs() <= 1e-7 {
                supported += 1;
            }
        }
        if supported < dual.slice_dim() {
            return Err(GeometryError::Degenerate(format!(
                "primal vertex supports only {supported} dual vertices"
            )));
        }
    }
    Ok(dual)
}

/// A homothety-plus-rotation certificate `R * (scale * dual) = primal` in
/// slice coordinates.
#[derive(Debug, Clone)]
pub struct SelfDualTransform {
    pub scale: f64,
    pub rotation: DMatrix<f64>,
}

/// Detects whether the polar dual is homothetic to a rotation of `p`.
///
/// Vertex-count match, then a sorted pairwise-distance-spectrum prefilter,
/// then an explicit orthogonal fit over matching vertex tuples.
pub fn is_self_dual(p: &Polytope, tol: f64) -> (bool, Option<SelfDualTransform>) {
    let dual = match polar_dual(p) {
        Ok(d) => d,
        Err(_) => return (false, None),
    };
    if dual.vertices.len() != p.vertices.len() {
        return (false, None);
    }
    let pv = p.slice_vertices();
    let qv = dual.slice_vertices();

    if pv.len() == 1 {
        return (false, None);
    }
    let dp = distance_spectrum(&pv);
    let dq = distance_spectrum(&qv);
    let scale = match (dp.last(), dq.last()) {
        (Some(&a), Some(&b)) if b > 1e-12 => a / b,
        _ => return (false, None),
    };
    let span = dp.last().copied().unwrap_or(1.0).max(1.0);
    for (a, b) in dp.iter().zip(dq.iter()) {
        if (a - scale * b).abs() > tol.max(1e-8) * span {
            return (false, None);
        }
    }
    let qs: Vec<DVector<f64>> = qv.iter().map(|q| q * scale).collect();
    match orthogonal_match(&pv, &qs, tol.max(1e-8)) {
        Some(rotation) => (true, Some(SelfDualTransform { scale, rotation })),
        None => (false, None),
    }
}

fn distance_spectrum(pts: &[DVector<f64>]) -> Vec<f64> {
    let mut d = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d.push((&pts[i] - &pts[j]).norm());
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    d
}

/// Finds orthogonal `R` with `{R q} = {p}` as sets, fitting `R` on tuples of
/// linearly independent vertices and verifying the full match.
fn orthogonal_match(pv: &[DVector<f64>], qv: &[DVector<f64>], tol: f64) -> Option<DMatrix<f64>> {
    let d = pv[0].len();
    let scale = pv.iter().map(|p| p.norm()).fold(0.0f64, f64::max).max(1.0);

    if d == 1 {
        // One-dimensional slice: try R = +-1.
        for r in [1.0f64, -1.0] {
            let rot = DMatrix::from_element(1, 1, r);
            if sets_match(pv, qv, &rot, tol * scale) {
                return Some(rot);
            }
        }
        return None;
    }

    // Greedy linearly independent reference tuple from q.
    let mut ref_idx: Vec<usize> = Vec::new();
    let mut qmat = DMatrix::<f64>::zeros(d, d);
    for (i, q) in qv.iter().enumerate() {
        let k = ref_idx.len();
        qmat.set_column(k, q);
        let lead = qmat.columns(0, k + 1).into_owned();
        if lead.rank(1e-10 * scale) == k + 1 {
            ref_idx.push(i);
            if ref_idx.len() == d {
                break;
            }
        }
    }
    if ref_idx.len() < d {
        return None;
    }
    let q_gram = qmat.transpose() * &qmat;
    let qinv = qmat.clone().try_inverse()?;

    // All ordered d-tuples of p-vertices with a matching Gram matrix.
    let m = pv.len();
    let mut tuple = vec![0usize; d];
    loop {
        let distinct = (1..d).all(|i| !tuple[..i].contains(&tuple[i]));
        if distinct {
            let mut pmat = DMatrix::<f64>::zeros(d, d);
            for (col, &i) in tuple.iter().enumerate() {
                pmat.set_column(col, &pv[i]);
            }
            let p_gram = pmat.transpose() * &pmat;
            if (&p_gram - &q_gram).amax() <= tol * scale * scale * 10.0 {
                let r = &pmat * &qinv;
                let orth = (r.transpose() * &r - DMatrix::identity(d, d)).amax();
                if orth <= tol * 10.0 && sets_match(pv, qv, &r, tol * scale) {
                    return Some(r);
                }
            }
        }
        // Advance the mixed-radix tuple counter.
        let mut pos = d;
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < m {
                break;
            }
            tuple[pos] = 0;
        }
    }
}

fn sets_match(pv: &[DVector<f64>], qv: &[DVector<f64>], r: &DMatrix<f64>, tol: f64) -> bool {
    let mut used = vec![false; pv.len()];
    for q in qv {
        let rq = r * q;
        let mut found = false;
        for (i, p) in pv.iter().enumerate() {
            if !used[i] && (p - &rq).amax() <= tol * 10.0 {
                used[i] = true;
                found = true;
                break;
            }
        }
        if !found {
            return false;
        }
    }
    true
}

/// All dual-unit-ball vertices `u` attaining `<u, x> = eval(x)`: the norming
/// set of a polytope gauge is their convex hull. Singleton iff smooth point.
pub fn norming_set(gauge: &Gauge, x: &[f64]) -> Result<Vec<Vec<f64>>, GeometryError> {
    if x.iter().all(|&t| t == 0.0) {
        return Err(GeometryError::Gauge(GaugeError::ZeroVector));
    }
    let value = gauge.eval(x)?;
    let duals = gauge
        .dual_vertices()
        .ok_or(GeometryError::NotPolytopeGauge)?;
    let scale = 1.0 + value.abs();
    let mut active: Vec<Vec<f64>> = duals
        .into_iter()
        .filter(|u| (dot(u, x) - value).abs() <= 1e-9 * scale)
        .collect();
    active.sort_by(|a, b| lex_cmp(a, b));
    Ok(active)
}

/// Orbit-ball consistency: the traceless part of the orbit gauge must agree
/// with the support function of the permutation polytope of `c`.
pub fn orbit_gauge_polytope_residual(
    c: &OrbitGaugeSpec,
    xs: &[Vec<f64>],
) -> Result<f64, GeometryError> {
    let poly = orbit_polytope(c)?;
    let gauge = Gauge::orbit(c.clone())?;
    let mut worst = 0.0f64;
    for x in xs {
        let s: f64 = x.iter().sum();
        let direct = gauge.eval(x)? - s.abs();
        let via_polytope = poly.support(x);
        worst = worst.max((direct - via_polytope).abs());
    }
    Ok(worst)
}

pub use simplex::in_convex_hull;
