//! Convex bodies: V-polytopes, H-polytopes and ellipsoids, with support
//! functions, membership, polars, difference bodies and affine images.

mod distance;
mod json;
mod standard;

pub use distance::{distance_bounds, DistanceBounds, ParallelBody};
pub use standard::{standard_body, BodyParams, KINDS};

use crate::error::{Error, Result};
use crate::hull::{affine_basis, extent, hull_vertices, quickhull, MAX_DIM, REL_EPS};
use crate::numerics::linalg::{dot, norm, Matrix, Vector};
use crate::numerics::lp::{maximize_over_halfspaces, LpOutcome, LpProblem};
use crate::numerics::special::unit_ball_volume;

/// Absolute slack on H-representation rows.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
const COPLANAR_TOL: f64 = 1e-9;

fn check_finite(xs: &[f64], what: &'static str) -> Result<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

fn check_dim(expected: usize, x: &[f64]) -> Result<()> {
    if x.len() == expected {
        Ok(())
    } else {
        Err(Error::dims(expected, x.len()))
    }
}

/// The convex hull of finitely many points with nonempty interior.
#[derive(Debug, Clone, PartialEq)]
pub struct VPolytope {
    dim: usize,
    coords: Vec<f64>,
}

impl VPolytope {
    pub fn new(vertices: &[Vector]) -> Result<Self> {
        let dim = vertices.first().map(Vector::dim).ok_or(Error::InvalidBody("no vertices".into()))?;
        let mut coords = Vec::with_capacity(vertices.len() * dim);
        for v in vertices {
            check_dim(dim, v)?;
            coords.extend_from_slice(v);
        }
        Self::from_flat(dim, coords)
    }

    /// Vertices given as a flat row-major array.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM || coords.len() % dim != 0 {
            return Err(Error::BadDims(format!("{} coordinates in dimension {dim}", coords.len())));
        }
        check_finite(&coords, "vertex list")?;
        let found = affine_basis(&coords, dim, REL_EPS * extent(&coords, dim)).len();
        if found < dim + 1 {
            return Err(Error::DegenerateInput { expected: dim, found: found.saturating_sub(1) });
        }
        Ok(VPolytope { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_vertices(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vertices(&self) -> Vec<Vector> {
        self.coords.chunks_exact(self.dim).map(Vector::from).collect()
    }

    /// Average of the listed vertices (an interior point).
    pub fn centroid(&self) -> Vector {
        let m = self.n_vertices() as f64;
        let mut c = vec![0.0; self.dim];
        for v in self.coords.chunks_exact(self.dim) {
            for (ci, x) in c.iter_mut().zip(v) {
                *ci += x;
            }
        }
        Vector::from(c.into_iter().map(|x| x / m).collect::<Vec<_>>())
    }

    pub fn support(&self, x: &[f64]) -> f64 {
        self.coords.chunks_exact(self.dim).map(|v| dot(v, x)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of a vertex attaining the support value (lowest index on ties).
    pub fn support_vertex(&self, x: &[f64]) -> usize {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, v) in self.coords.chunks_exact(self.dim).enumerate() {
            let s = dot(v, x);
            if s > best.1 {
                best = (i, s);
            }
        }
        best.0
    }

    /// Convex-combination feasibility LP.
    pub fn contains(&self, x: &[f64]) -> bool {
        let m = self.n_vertices();
        let mut lp = LpProblem::new(m);
        let _ = lp.add_eq(vec![1.0; m], 1.0);
        for c in 0..self.dim {
            let row = (0..m).map(|i| self.coords[i * self.dim + c]).collect();
            let _ = lp.add_eq(row, x[c]);
        }
        matches!(lp.solve(), Ok(LpOutcome::Optimal(_)))
    }

    /// The same body with non-extreme vertices removed, in ascending
    /// original order.
    pub fn hull_reduced(&self) -> Result<VPolytope> {
        let keep = hull_vertices(&self.coords, self.dim)?;
        let coords = keep.iter().flat_map(|&i| self.vertex(i).iter().copied()).collect();
        Ok(VPolytope { dim: self.dim, coords })
    }

    /// Facet inequalities `⟨a, x⟩ ≤ b` with unit normals (flat normals,
    /// offsets), one row per facet: coplanar hull simplices are merged.
    pub fn facets(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.dim;
        if n == 1 {
            let (lo, hi) = (self.support(&[-1.0]), self.support(&[1.0]));
            return Ok((vec![-1.0, 1.0], vec![lo, hi]));
        }
        let pts: Vec<Vector> = self.vertices();
        let h = crate::hull::convex_hull(&pts, n)?;
        let mut normals = Vec::with_capacity(h.facets.len() * n);
        let mut offsets = Vec::with_capacity(h.facets.len());
        let scale = self.coords.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for f in &h.facets {
            let seen = normals.chunks_exact(n).zip(&offsets).any(|(a, &b): (&[f64], &f64)| {
                (b - f.offset).abs() <= COPLANAR_TOL * scale
                    && a.iter().zip(f.normal.as_slice()).all(|(x, y)| (x - y).abs() <= COPLANAR_TOL)
            });
            if !seen {
                normals.extend_from_slice(&f.normal);
                offsets.push(f.offset);
            }
        }
        Ok((normals, offsets))
    }

    pub fn map_vertices(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<VPolytope> {
        let coords: Vec<f64> = self.coords.chunks_exact(self.dim).flat_map(f).collect();
        VPolytope::from_flat(self.dim, coords)
    }

    /// Vertices sorted lexicographically; used to compare vertex sets.
    pub fn sorted_vertices(&self) -> Vec<Vec<f64>> {
        let mut v: Vec<Vec<f64>> = self.coords.chunks_exact(self.dim).map(<[f64]>::to_vec).collect();
        v.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
        v
    }
}

/// `{x : ⟨a_i, x⟩ ≤ b_i}`, bounded with nonempty interior.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope {
    dim: usize,
    normals: Vec<f64>,
    offsets: Vec<f64>,
    center: Vec<f64>,
    inradius: f64,
}

impl HPolytope {
    /// Rows `(a_i, b_i)`. Validates boundedness with `2n` LPs and finds a
    /// Chebyshev center.
    pub fn new(dim: usize, normals: Vec<f64>, offsets: Vec<f64>) -> Result<Self> {
        if dim == 0 || normals.len() != dim * offsets.len() {
            return Err(Error::BadDims(format!("{} normal entries for {} rows in dimension {dim}", normals.len(), offsets.len())));
        }
        check_finite(&normals, "row normals")?;
        check_finite(&offsets, "row offsets")?;
        for j in 0..dim {
            for s in [-1.0, 1.0] {
                let mut c = vec![0.0; dim];
                c[j] = s;
                match maximize_over_halfspaces(&c, &normals, &offsets)? {
                    LpOutcome::Optimal(_) => {}
                    LpOutcome::Unbounded => return Err(Error::InvalidBody("H-polytope is unbounded".into())),
                    LpOutcome::Infeasible => return Err(Error::InvalidBody("H-polytope is empty".into())),
                }
            }
        }
        // Chebyshev center: maximize r subject to ⟨a_i, x⟩ + |a_i| r ≤ b_i.
        let mut lp = LpProblem::new(dim + 1);
        let mut obj = vec![0.0; dim + 1];
        obj[dim] = 1.0;
        lp.set_objective(obj)?;
        for j in 0..dim {
            lp.set_free(j);
        }
        for (a, &b) in normals.chunks_exact(dim).zip(&offsets) {
            let mut row = a.to_vec();
            row.push(norm(a));
            lp.add_le(row, b)?;
        }
        let sol = lp
            .solve()?
            .optimal()
            .ok_or_else(|| Error::Numerical("Chebyshev center LP failed".into()))?;
        let inradius = sol.x[dim];
        if !(inradius > 1e-12) {
            return Err(Error::InvalidBody("H-polytope has empty interior".into()));
        }
        Ok(HPolytope { dim, normals, offsets, center: sol.x[..dim].to_vec(), inradius })
    }

    pub fn from_rows(dim: usize, rows: &[(Vec<f64>, f64)]) -> Result<Self> {
        let mut normals = Vec::with_capacity(rows.len() * dim);
        let mut offsets = Vec::with_capacity(rows.len());
        for (a, b) in rows {
            check_dim(dim, a)?;
            normals.extend_from_slice(a);
            offsets.push(*b);
        }
        Self::new(dim, normals, offsets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_rows(&self) -> usize {
        self.offsets.len()
    }

    pub fn row(&self, i: usize) -> (&[f64], f64) {
        (&self.normals[i * self.dim..(i + 1) * self.dim], self.offsets[i])
    }

    pub fn normals(&self) -> &[f64] {
        &self.normals
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn chebyshev_center(&self) -> &[f64] {
        &self.center
    }

    pub fn inradius(&self) -> f64 {
        self.inradius
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.normals.chunks_exact(self.dim).zip(&self.offsets).all(|(a, &b)| dot(a, x) <= b + MEMBERSHIP_TOL)
    }

    pub fn support(&self, x: &[f64]) -> Result<f64> {
        match maximize_over_halfspaces(x, &self.normals, &self.offsets)? {
            LpOutcome::Optimal(s) => Ok(s.value),
            _ => Err(Error::Numerical("support LP of a validated H-polytope failed".into())),
        }
    }

    /// Vertices by polar duality around the Chebyshev center: the facets of
    /// `conv{a_i / (b_i − ⟨a_i, c⟩)}` are the vertices of `K − c`.
    pub fn vertex_enumeration(&self) -> Result<VPolytope> {
        let n = self.dim;
        let c = &self.center;
        let mut dual = Vec::with_capacity(self.normals.len());
        for (a, &b) in self.normals.chunks_exact(n).zip(&self.offsets) {
            let slack = b - dot(a, c);
            dual.extend(a.iter().map(|x| x / slack));
        }
        let mut verts = Vec::new();
        match n {
            1 => {
                verts.push(self.support(&[1.0])?);
                verts.push(-self.support(&[-1.0])?);
            }
            2 => {
                let (normals, offsets) = VPolytope::from_flat(2, dual)?.facets()?;
                for (nu, &o) in normals.chunks_exact(2).zip(&offsets) {
                    verts.extend((0..2).map(|j| nu[j] / o + c[j]));
                }
            }
            _ => {
                let raw = quickhull(&dual, n)?;
                for f in &raw.facets {
                    verts.extend((0..n).map(|j| f.normal[j] / f.offset + c[j]));
                }
            }
        }
        let v = VPolytope::from_flat(n, verts)?;
        v.hull_reduced()
    }
}

/// `{center + M v : |v| ≤ 1}` with `M` invertible.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    center: Vector,
    shape: Matrix,
    inverse: Matrix,
    det: f64,
    radius: Option<f64>,
}

impl Ellipsoid {
    pub fn new(center: Vector, shape: Matrix) -> Result<Self> {
        if !shape.is_square() {
            return Err(Error::BadDims("ellipsoid shape must be square".into()));
        }
        check_dim(shape.rows(), &center)?;
        check_finite(shape.data(), "ellipsoid shape")?;
        let det = shape.det()?;
        if !(det.abs() > 1e-12) {
            return Err(Error::SingularTransform);
        }
        let inverse = shape.inverse()?;
        // M Mᵀ = r² I exactly (up to rounding) marks a Euclidean ball.
        let mmt = shape.matmul(&shape.transpose())?;
        let n = shape.rows();
        let r2 = (0..n).map(|i| mmt[(i, i)]).sum::<f64>() / n as f64;
        let is_ball = mmt.max_abs_diff(&Matrix::identity(n).scale(r2)) <= 1e-13 * r2;
        let radius = is_ball.then(|| r2.sqrt());
        Ok(Ellipsoid { center, shape, inverse, det, radius })
    }

    pub fn ball(center: Vector, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!("ball radius {r}")));
        }
        let n = center.dim();
        Self::new(center, Matrix::identity(n).scale(r))
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn shape(&self) -> &Matrix {
        &self.shape
    }

    /// `Some(r)` when the body is a Euclidean ball of radius `r`.
    pub fn ball_radius(&self) -> Option<f64> {
        self.radius
    }

    pub fn volume(&self) -> f64 {
        match self.radius {
            Some(r) => unit_ball_volume(self.dim()) * r.powi(self.dim() as i32),
            None => self.det.abs() * unit_ball_volume(self.dim()),
        }
    }

    pub fn support(&self, x: &[f64]) -> f64 {
        let mt = self.shape.tr_mul_vec(x).expect("dimension checked");
        dot(&self.center, x) + mt.norm()
    }

    /// The boundary point with outer normal `x`.
    pub fn support_point(&self, x: &[f64]) -> Vec<f64> {
        let mt = self.shape.tr_mul_vec(x).expect("dimension checked");
        let nm = mt.norm();
        let dir = self.shape.mul_vec(&mt).expect("dimension checked");
        self.center.iter().zip(dir.iter()).map(|(c, d)| c + d / nm).collect()
    }

    /// `|M⁻¹(x − c)|`.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        let y: Vec<f64> = x.iter().zip(self.center.iter()).map(|(a, c)| a - c).collect();
        self.inverse.mul_vec(&y).expect("dimension checked").norm()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.gauge(x) <= 1.0 + 1e-12
    }

    /// Smallest semi-axis.
    pub fn inradius(&self) -> f64 {
        match self.radius {
            Some(r) => r,
            None => self.shape.singular_values().last().copied().unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    VPoly(VPolytope),
    HPoly(HPolytope),
    Ellipsoid(Ellipsoid),
}

impl From<VPolytope> for Body {
    fn from(p: VPolytope) -> Self {
        Body::VPoly(p)
    }
}

impl From<HPolytope> for Body {
    fn from(p: HPolytope) -> Self {
        Body::HPoly(p)
    }
}

impl From<Ellipsoid> for Body {
    fn from(e: Ellipsoid) -> Self {
        Body::Ellipsoid(e)
    }
}

impl Body {
    pub fn dim(&self) -> usize {
        match self {
            Body::VPoly(p) => p.dim(),
            Body::HPoly(h) => h.dim(),
            Body::Ellipsoid(e) => e.dim(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Body::VPoly(_) => "vpoly",
            Body::HPoly(_) => "hpoly",
            Body::Ellipsoid(_) => "ellipsoid",
        }
    }

    pub fn as_vpoly(&self) -> Option<&VPolytope> {
        match self {
            Body::VPoly(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_ellipsoid(&self) -> Option<&Ellipsoid> {
        match self {
            Body::Ellipsoid(e) => Some(e),
            _ => None,
        }
    }

    pub fn is_ellipsoid(&self) -> bool {
        matches!(self, Body::Ellipsoid(_))
    }

    /// `h_K(x) = max_{y ∈ K} ⟨x, y⟩`.
    pub fn support(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x)?;
        match self {
            Body::VPoly(p) => Ok(p.support(x)),
            Body::HPoly(h) => h.support(x),
            Body::Ellipsoid(e) => Ok(e.support(x)),
        }
    }

    pub fn membership(&self, x: &[f64]) -> Result<bool> {
        check_dim(self.dim(), x)?;
        Ok(self.contains(x))
    }

    /// Membership without the dimension check.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Body::VPoly(p) => p.contains(x),
            Body::HPoly(h) => h.contains(x),
            Body::Ellipsoid(e) => e.contains(x),
        }
    }

    /// Coordinate box `[−h(−e_i), h(e_i)]`.
    pub fn bounding_box(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.dim();
        let mut lo = vec![0.0; n];
        let mut hi = vec![0.0; n];
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            hi[i] = self.support(&e)?;
            e[i] = -1.0;
            lo[i] = -self.support(&e)?;
        }
        Ok((lo, hi))
    }

    /// Radius of a largest inscribed ball.
    pub fn inradius(&self) -> Result<f64> {
        match self {
            Body::VPoly(p) => {
                let (normals, offsets) = p.facets()?;
                Ok(HPolytope::new(p.dim(), normals, offsets)?.inradius())
            }
            Body::HPoly(h) => Ok(h.inradius()),
            Body::Ellipsoid(e) => Ok(e.inradius()),
        }
    }

    /// `{T x + v : x ∈ K}`.
    pub fn affine_image(&self, t: &Matrix, v: &[f64]) -> Result<Body> {
        let n = self.dim();
        if t.rows() != n || t.cols() != n {
            return Err(Error::dims(n, t.rows()));
        }
        check_dim(n, v)?;
        let det = t.det()?;
        if !(det.abs() > 1e-14) {
            return Err(Error::SingularTransform);
        }
        match self {
            Body::VPoly(p) => {
                let out = p.map_vertices(|x| {
                    let y = t.mul_vec(x).expect("dimension checked");
                    y.iter().zip(v).map(|(a, b)| a + b).collect()
                })?;
                Ok(Body::VPoly(out))
            }
            Body::HPoly(h) => {
                let tinv_t = t.inverse()?.transpose();
                let mut normals = Vec::with_capacity(h.normals.len());
                let mut offsets = Vec::with_capacity(h.offsets.len());
                for (a, &b) in h.normals.chunks_exact(n).zip(&h.offsets) {
                    let a2 = tinv_t.mul_vec(a)?;
                    offsets.push(b + dot(&a2, v));
                    normals.extend_from_slice(&a2);
                }
                Ok(Body::HPoly(HPolytope::new(n, normals, offsets)?))
            }
            Body::Ellipsoid(e) => {
                let c = t.mul_vec(&e.center)?;
                let c = Vector::from(c.iter().zip(v).map(|(a, b)| a + b).collect::<Vec<_>>());
                Ok(Body::Ellipsoid(Ellipsoid::new(c, t.matmul(&e.shape)?)?))
            }
        }
    }

    pub fn translate(&self, v: &[f64]) -> Result<Body> {
        check_dim(self.dim(), v)?;
        match self {
            Body::VPoly(p) => Ok(Body::VPoly(p.map_vertices(|x| x.iter().zip(v).map(|(a, b)| a + b).collect())?)),
            _ => self.affine_image(&Matrix::identity(self.dim()), v),
        }
    }

    /// `λK` about the origin.
    pub fn scale(&self, lambda: f64) -> Result<Body> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("scale factor {lambda}")));
        }
        match self {
            Body::VPoly(p) => Ok(Body::VPoly(p.map_vertices(|x| x.iter().map(|a| a * lambda).collect())?)),
            _ => self.affine_image(&Matrix::identity(self.dim()).scale(lambda), &vec![0.0; self.dim()]),
        }
    }

    /// Reflection `R_u` about the hyperplane `u^⊥`.
    pub fn reflect(&self, u: &[f64]) -> Result<Body> {
        check_dim(self.dim(), u)?;
        let nu = norm(u);
        if (nu - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnitVector(nu));
        }
        match self {
            Body::VPoly(p) => Ok(Body::VPoly(p.map_vertices(|x| reflect_point(x, u))?)),
            _ => {
                let n = self.dim();
                let mut r = Matrix::identity(n);
                for i in 0..n {
                    for j in 0..n {
                        r[(i, j)] -= 2.0 * u[i] * u[j];
                    }
                }
                self.affine_image(&r, &vec![0.0; n])
            }
        }
    }

    /// Oracle for `K + tB`.
    pub fn minkowski_sum_ball(&self, t: f64) -> Result<ParallelBody> {
        ParallelBody::new(self.clone(), t)
    }

    /// Hull-reduced vertex form when the body is a polytope.
    pub fn reduced(&self) -> Result<Body> {
        match self {
            Body::VPoly(p) => Ok(Body::VPoly(p.hull_reduced()?)),
            other => Ok(other.clone()),
        }
    }
}

/// `x − 2⟨x, u⟩u`.
pub fn reflect_point(x: &[f64], u: &[f64]) -> Vec<f64> {
    let s = 2.0 * dot(x, u);
    x.iter().zip(u).map(|(a, b)| a - s * b).collect()
}

/// `K° = {x : ⟨v_i, x⟩ ≤ 1}` for a V-polytope with the origin in its interior.
pub fn polar(p: &VPolytope) -> Result<HPolytope> {
    let (_, offsets) = p.facets()?;
    if offsets.iter().any(|&o| o <= 1e-9) {
        return Err(Error::OriginNotInterior);
    }
    let m = p.n_vertices();
    HPolytope::new(p.dim(), p.coords().to_vec(), vec![1.0; m])
}

/// `K − K` as the hull of all pairwise vertex differences.
pub fn difference_body(b: &Body) -> Result<Body> {
    let p = match b {
        Body::VPoly(p) => p.hull_reduced()?,
        Body::HPoly(_) => return Err(Error::UnsupportedRepresentation("H-polytope")),
        Body::Ellipsoid(_) => return Err(Error::UnsupportedRepresentation("ellipsoid")),
    };
    let n = p.dim();
    let m = p.n_vertices();
    let mut coords = Vec::with_capacity(m * m * n);
    for i in 0..m {
        for j in 0..m {
            if i != j {
                coords.extend(p.vertex(i).iter().zip(p.vertex(j)).map(|(a, b)| a - b));
            }
        }
    }
    Ok(Body::VPoly(VPolytope::from_flat(n, coords)?.hull_reduced()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::RngStream;

    fn cube(n: usize) -> Body {
        standard_body("cube", n, &BodyParams::default()).unwrap()
    }

    #[test]
    fn one_row_per_facet() {
        for (n, rows) in [(3, 6), (4, 8)] {
            let (_, offsets) = cube(n).as_vpoly().unwrap().facets().unwrap();
            assert_eq!(offsets.len(), rows);
        }
        let sheared = cube(3).affine_image(&Matrix::from_row_major(3, 3, vec![1.0, 0.7, 0.0, 0.0, 1.0, 0.3, 0.0, 0.0, 1.0]).unwrap(), &[0.0; 3]).unwrap();
        assert_eq!(sheared.as_vpoly().unwrap().facets().unwrap().1.len(), 6);
        // widths of the sheared cube bound the inradius
        let r = sheared.inradius().unwrap();
        assert!(r <= 0.5 + 1e-12 && r > 0.3, "{r}");
    }

    #[test]
    fn support_examples() {
        assert_eq!(cube(3).support(&[1.0, 1.0, 1.0]).unwrap(), 3.0);
        let ball = Body::Ellipsoid(Ellipsoid::ball(Vector::zeros(3), 1.0).unwrap());
        assert!((ball.support(&[0.6, 0.8, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        let tri = Body::VPoly(VPolytope::from_flat(2, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0]).unwrap());
        assert_eq!(tri.support(&[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(tri.support(&[1.0]), Err(Error::dims(2, 1)));
    }

    #[test]
    fn membership_examples() {
        let sq = cube(2);
        assert!(sq.membership(&[0.5, 0.5]).unwrap());
        assert!(!sq.membership(&[1.5, 0.5]).unwrap());
        let e = Body::Ellipsoid(Ellipsoid::new(Vector::zeros(2), Matrix::diagonal(&[2.0, 1.0])).unwrap());
        assert!(e.membership(&[1.9, 0.0]).unwrap());
        assert!(!e.membership(&[0.0, 1.1]).unwrap());
    }

    #[test]
    fn polar_of_square_is_cross_polytope() {
        let sq = VPolytope::from_flat(2, vec![-1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0, 1.0]).unwrap();
        let p = polar(&sq).unwrap();
        assert!(p.contains(&[0.5, 0.49]));
        assert!(!p.contains(&[0.6, 0.5]));
        let shifted = VPolytope::from_flat(2, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(polar(&shifted), Err(Error::OriginNotInterior));
    }

    #[test]
    fn polar_of_cross_polytope_is_cube() {
        let cross = standard_body("cross-polytope", 3, &BodyParams::default()).unwrap();
        let p = polar(cross.as_vpoly().unwrap()).unwrap();
        let s = RngStream::new(5, 5);
        for i in 0..1000 {
            let mut r = s.substream(i).rng();
            let x: Vec<f64> = (0..3).map(|_| 2.4 * r.uniform() - 1.2).collect();
            let in_cube = x.iter().all(|c| c.abs() <= 1.0);
            assert_eq!(p.contains(&x), in_cube, "{x:?}");
        }
        let v = p.vertex_enumeration().unwrap();
        assert_eq!(v.n_vertices(), 8);
    }

    #[test]
    fn difference_body_of_triangle_is_hexagon() {
        let tri = Body::VPoly(VPolytope::from_flat(2, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0]).unwrap());
        let d = difference_body(&tri).unwrap();
        assert_eq!(d.as_vpoly().unwrap().n_vertices(), 6);
        assert!(matches!(
            difference_body(&Body::Ellipsoid(Ellipsoid::ball(Vector::zeros(2), 1.0).unwrap())),
            Err(Error::UnsupportedRepresentation(_))
        ));
    }

    #[test]
    fn affine_images() {
        let ball = Body::Ellipsoid(Ellipsoid::ball(Vector::zeros(2), 1.0).unwrap());
        let e = ball.affine_image(&Matrix::diagonal(&[2.0, 1.0]), &[0.0, 0.0]).unwrap();
        assert!((e.support(&[1.0, 0.0]).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(
            ball.affine_image(&Matrix::diagonal(&[1.0, 0.0]), &[0.0, 0.0]),
            Err(Error::SingularTransform)
        ));
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let rot = Matrix::from_rows(&[vec![c, -c], vec![c, c]]).unwrap();
        let sq = cube(2).translate(&[-0.5, -0.5]).unwrap();
        let r = sq.affine_image(&rot, &[0.0, 0.0]).unwrap();
        assert!((r.support(&[1.0, 0.0]).unwrap() - c).abs() < 1e-15);
    }

    #[test]
    fn reflection_of_cube() {
        let c = cube(3);
        let r = c.reflect(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(r.bounding_box().unwrap(), (vec![-1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0]));
        assert_eq!(c.reflect(&[1.0, 1.0, 0.0]), Err(Error::NotUnitVector(2f64.sqrt())));
    }

    #[test]
    fn h_polytope_validation() {
        let halfplane = HPolytope::from_rows(2, &[(vec![1.0, 0.0], 1.0)]);
        assert!(matches!(halfplane, Err(Error::InvalidBody(_))));
        let flat = HPolytope::from_rows(
            1,
            &[(vec![1.0], 0.0), (vec![-1.0], 0.0)],
        );
        assert!(matches!(flat, Err(Error::InvalidBody(_))));
    }

    #[test]
    fn ball_detection() {
        let e = Ellipsoid::ball(Vector::zeros(3), 2.0).unwrap();
        assert_eq!(e.ball_radius(), Some(2.0));
        let f = Ellipsoid::new(Vector::zeros(3), Matrix::diagonal(&[2.0, 1.0, 1.0])).unwrap();
        assert_eq!(f.ball_radius(), None);
        assert!((f.volume() - 2.0 * 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-14);
    }
}
