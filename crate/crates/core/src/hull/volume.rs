use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::planar::monotone_chain;
use super::quickhull::{extent, factorial, quickhull, MAX_DIM, REL_EPS};
use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::numerics::linalg::{det_in_place, Vector};
use crate::numerics::rng::RngStream;

/// Vertex count above which polytopes in dimension 5 and 6 fall back to
/// Monte Carlo volume.
pub const EXACT_VERTEX_LIMIT: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VolumeMethod {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeResult {
    pub value: f64,
    pub method: VolumeMethod,
    pub stderr: f64,
}

impl VolumeResult {
    pub fn exact(value: f64) -> Self {
        VolumeResult { value, method: VolumeMethod::Exact, stderr: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullFacet {
    /// Indices into the input point list.
    pub vertices: Vec<usize>,
    pub normal: Vector,
    pub offset: f64,
}

#[derive(Debug, Clone)]
pub struct HullResult {
    pub dim: usize,
    /// Indices of the extreme input points, ascending.
    pub extreme: Vec<usize>,
    pub vertices: Vec<Vector>,
    /// Simplicial facets (flat faces come out triangulated).
    pub facets: Vec<HullFacet>,
    points: Vec<f64>,
}

impl HullResult {
    /// `max_i (⟨a_i, x⟩ − b_i)` over the facets; ≤ 0 inside.
    pub fn facet_violation(&self, x: &[f64]) -> f64 {
        self.facets
            .iter()
            .map(|f| f.normal.dot(&Vector::from(x)) - f.offset)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }
}

fn flatten(points: &[Vector], k: usize) -> Result<Vec<f64>> {
    let mut flat = Vec::with_capacity(points.len() * k);
    for p in points {
        if p.dim() != k {
            return Err(Error::dims(k, p.dim()));
        }
        flat.extend_from_slice(p.as_slice());
    }
    Ok(flat)
}

/// Convex hull of `points` in `R^k`, `1 ≤ k ≤ 6`. The points are sorted
/// lexicographically first, so the result depends only on the point set.
pub fn convex_hull(points: &[Vector], k: usize) -> Result<HullResult> {
    if k == 0 || k > MAX_DIM {
        return Err(Error::BadDims(format!("hull dimension must be in 1..=6, got {k}")));
    }
    if points.len() < k + 1 {
        return Err(Error::DegenerateInput { expected: k, found: points.len().saturating_sub(1) });
    }
    let flat = flatten(points, k)?;
    let rank = intrinsic_dim(&flat, k);
    if rank < k {
        return Err(Error::DegenerateInput { expected: k, found: rank });
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (&flat[a * k..(a + 1) * k], &flat[b * k..(b + 1) * k]);
        pa.iter().zip(pb).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(a.cmp(&b))
    });
    let sorted: Vec<f64> = order.iter().flat_map(|&i| flat[i * k..(i + 1) * k].iter().copied()).collect();
    let scale = extent(&sorted, k);

    let (extreme_sorted, facets_sorted): (Vec<usize>, Vec<(Vec<usize>, Vec<f64>, f64)>) = match k {
        1 => {
            let lo = 0;
            let hi = sorted.len() - 1;
            (
                vec![lo, hi],
                vec![(vec![lo], vec![-1.0], -sorted[lo]), (vec![hi], vec![1.0], sorted[hi])],
            )
        }
        2 => {
            let ring = monotone_chain(&sorted, 1e-14 * scale * scale);
            let mut facets = Vec::with_capacity(ring.len());
            for (a, &i) in ring.iter().enumerate() {
                let j = ring[(a + 1) % ring.len()];
                let (dx, dy) = (sorted[2 * j] - sorted[2 * i], sorted[2 * j + 1] - sorted[2 * i + 1]);
                let len = (dx * dx + dy * dy).sqrt();
                // counter-clockwise ring: outward normal is the edge rotated clockwise
                let nrm = vec![dy / len, -dx / len];
                let off = nrm[0] * sorted[2 * i] + nrm[1] * sorted[2 * i + 1];
                facets.push((vec![i, j], nrm, off));
            }
            let mut ext = ring;
            ext.sort_unstable();
            (ext, facets)
        }
        _ => {
            let raw = quickhull(&sorted, k)?;
            let facets = raw
                .facets
                .iter()
                .map(|f| {
                    (
                        f.verts[..k].iter().map(|&v| v as usize).collect(),
                        f.normal[..k].to_vec(),
                        f.offset,
                    )
                })
                .collect();
            (raw.extreme_points(), facets)
        }
    };
    let mut extreme: Vec<usize> = extreme_sorted.iter().map(|&i| order[i]).collect();
    extreme.sort_unstable();
    let vertices = extreme.iter().map(|&i| points[i].clone()).collect();
    let facets = facets_sorted
        .into_iter()
        .map(|(vs, nrm, off)| HullFacet {
            vertices: vs.into_iter().map(|i| order[i]).collect(),
            normal: Vector::from(nrm),
            offset: off,
        })
        .collect();
    Ok(HullResult { dim: k, extreme, vertices, facets, points: flat })
}

/// Number of singular values of the centered point matrix above
/// `1e-10 ×` the largest.
pub fn intrinsic_dim(flat: &[f64], k: usize) -> usize {
    let m = flat.len() / k;
    if m == 0 {
        return 0;
    }
    let mut mean = vec![0.0; k];
    for p in flat.chunks_exact(k) {
        for c in 0..k {
            mean[c] += p[c] / m as f64;
        }
    }
    let centered: Vec<f64> = flat.chunks_exact(k).flat_map(|p| p.iter().zip(&mean).map(|(x, m)| x - m)).collect();
    let mat = crate::numerics::Matrix::from_row_major(m, k, centered).expect("finite points");
    let sv = mat.singular_values();
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > REL_EPS * top).count()
}

/// Fan triangulation from the centroid of the extreme vertices.
pub fn volume_exact(h: &HullResult) -> Result<VolumeResult> {
    let k = h.dim;
    let mut c = vec![0.0; k];
    for &i in &h.extreme {
        for (cj, x) in c.iter_mut().zip(h.point(i)) {
            *cj += x / h.extreme.len() as f64;
        }
    }
    let mut m = vec![0.0; k * k];
    let mut total = crate::numerics::KahanSum::new();
    for f in &h.facets {
        for (r, &v) in f.vertices.iter().enumerate() {
            for (col, x) in h.point(v).iter().enumerate() {
                m[r * k + col] = x - c[col];
            }
        }
        total.add(det_in_place(&mut m, k).abs());
    }
    let value = total.value() / factorial(k);
    if !(value > 0.0) {
        return Err(Error::DegenerateInput { expected: k, found: k - 1 });
    }
    Ok(VolumeResult::exact(value))
}

/// Volume of the hull of a flat point array in `R^d`; the allocation-light
/// path used for every projection volume.
pub fn hull_volume(flat: &[f64], d: usize) -> Result<f64> {
    let v = match d {
        1 => {
            let (lo, hi) = flat.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
            hi - lo
        }
        2 => super::planar::hull_area(flat),
        _ => quickhull(flat, d)?.volume(flat),
    };
    if !(v > 0.0) {
        return Err(Error::DegenerateInput { expected: d, found: d - 1 });
    }
    Ok(v)
}

/// Indices of the extreme points of a flat point array in `R^d`.
pub fn hull_vertices(flat: &[f64], d: usize) -> Result<Vec<usize>> {
    let pts: Vec<Vector> = flat.chunks_exact(d).map(Vector::from).collect();
    Ok(convex_hull(&pts, d)?.extreme)
}

/// Hit-or-miss volume inside the box `[lo, hi]`. Sample `i` draws from
/// substream `i`, so the estimate does not depend on the thread count.
pub fn volume_mc<F>(member: F, lo: &[f64], hi: &[f64], n_samples: usize, rng: RngStream) -> Result<VolumeResult>
where
    F: Fn(&[f64]) -> bool + Sync,
{
    if lo.len() != hi.len() {
        return Err(Error::dims(lo.len(), hi.len()));
    }
    let box_vol: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    if !(box_vol > 0.0) || n_samples == 0 {
        return Err(Error::EmptyBox);
    }
    let hits = (0..n_samples as u64)
        .into_par_iter()
        .filter(|&i| {
            let mut r = rng.substream(i).rng();
            let x: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| a + (b - a) * r.uniform()).collect();
            member(&x)
        })
        .count();
    let p = hits as f64 / n_samples as f64;
    Ok(VolumeResult {
        value: box_vol * p,
        method: VolumeMethod::MonteCarlo,
        stderr: box_vol * (p * (1.0 - p) / n_samples as f64).sqrt(),
    })
}

/// `|K|`: exact for ellipsoids and for polytopes in dimension ≤ 4 (any
/// vertex count) or with at most [`EXACT_VERTEX_LIMIT`] vertices; exact for
/// H-polytopes through vertex enumeration when that succeeds; otherwise
/// Monte Carlo with `budget` samples over a support-derived box.
pub fn body_volume(b: &Body, budget: usize, rng: RngStream) -> Result<VolumeResult> {
    match b {
        Body::Ellipsoid(e) => Ok(VolumeResult::exact(e.volume())),
        Body::VPoly(p) => {
            let n = p.dim();
            if n <= 4 || p.n_vertices() <= EXACT_VERTEX_LIMIT {
                Ok(VolumeResult::exact(hull_volume(p.coords(), n)?))
            } else {
                let (lo, hi) = b.bounding_box()?;
                volume_mc(|x| b.contains(x), &lo, &hi, budget, rng)
            }
        }
        Body::HPoly(h) => match h.vertex_enumeration() {
            Ok(v) if v.dim() <= 4 || v.n_vertices() <= EXACT_VERTEX_LIMIT => {
                Ok(VolumeResult::exact(hull_volume(v.coords(), v.dim())?))
            }
            _ => {
                let (lo, hi) = b.bounding_box()?;
                volume_mc(|x| h.contains(x), &lo, &hi, budget, rng)
            }
        },
    }
}
