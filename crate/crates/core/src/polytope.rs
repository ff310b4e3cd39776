//! Lattice polytopes in the character lattice M = Z^n.
//!
//! A [`LatticePolytope`] keeps both descriptions: its vertices and its facet
//! inequalities `<m, v_F> >= -c_F` with `v_F` the primitive inward normal.
//! Facets are always recomputed from points, never taken on trust.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zlinalg::{gcd_slice, rank_rational, IntMatrix, RatMatrix};

/// Integer vector in M (or N, for normals).
pub type Point = Vec<i64>;

/// Exponent vector of the torus character `chi_m(z) = prod z_i^{m_i}`.
pub type CharacterPoint = Point;

/// Largest ambient dimension the hull routine accepts.
pub const MAX_DIM: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Facet {
    /// Primitive inward normal `v_F` in N.
    pub normal: Point,
    /// Offset `c_F`: the facet lies on `<m, v_F> = -c_F`.
    pub offset: i64,
}

impl Facet {
    /// `<m, v_F> + c_F`, nonnegative exactly on the closed half-space.
    pub fn slack(&self, m: &[i64]) -> i128 {
        dot(m, &self.normal) + self.offset as i128
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePolytope {
    dim: usize,
    vertices: Vec<Point>,
    facets: Vec<Facet>,
}

pub(crate) fn dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

impl LatticePolytope {
    /// Convex hull of a finite point set. Non-extreme input points are
    /// dropped; vertices come back in ascending lexicographic order and
    /// facets in descending lexicographic order of their normals.
    pub fn from_vertices(points: &[Point]) -> Result<Self> {
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::invalid("empty point set"))?;
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::invalid("points of mixed dimension"));
        }
        let pts: Vec<Point> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();

        let rank = affine_rank(&pts);
        if rank < dim {
            return Err(Error::DegeneratePolytope { dim, rank });
        }

        let mut facets = BTreeSet::new();
        for combo in combinations(pts.len(), dim) {
            let Some(normal) = hyperplane_normal(&pts, &combo)? else {
                continue;
            };
            let level = dot(&pts[combo[0]], &normal);
            let (mut above, mut below) = (false, false);
            for p in &pts {
                match dot(p, &normal).cmp(&level) {
                    std::cmp::Ordering::Greater => above = true,
                    std::cmp::Ordering::Less => below = true,
                    std::cmp::Ordering::Equal => {}
                }
                if above && below {
                    break;
                }
            }
            let facet = match (above, below) {
                (true, false) => Facet {
                    normal,
                    offset: to_i64(-level)?,
                },
                (false, true) => Facet {
                    normal: normal.iter().map(|x| -x).collect(),
                    offset: to_i64(level)?,
                },
                _ => continue,
            };
            facets.insert(facet);
        }
        let mut facets: Vec<Facet> = facets.into_iter().collect();
        facets.sort_by(|a, b| b.normal.cmp(&a.normal));

        // A point is a vertex iff the normals of the facets through it span N.
        let vertices: Vec<Point> = pts
            .into_iter()
            .filter(|p| {
                let tight: Vec<Vec<i64>> = facets
                    .iter()
                    .filter(|f| f.slack(p) == 0)
                    .map(|f| f.normal.clone())
                    .collect();
                !tight.is_empty() && IntMatrix::from_i64_rows(&tight).rank() == dim
            })
            .collect();

        Ok(LatticePolytope {
            dim,
            vertices,
            facets,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Membership via the facet inequalities.
    pub fn contains(&self, m: &[i64]) -> bool {
        self.facets.iter().all(|f| f.slack(m) >= 0)
    }

    /// Strict interior membership.
    pub fn contains_interior(&self, m: &[i64]) -> bool {
        self.facets.iter().all(|f| f.slack(m) > 0)
    }

    /// Origin strictly inside and every facet at lattice distance one.
    pub fn is_reflexive(&self) -> bool {
        self.facets.iter().all(|f| f.offset == 1)
    }

    /// `conv{v_F}` for a reflexive polytope.
    pub fn polar_dual(&self) -> Result<LatticePolytope> {
        if !self.is_reflexive() {
            return Err(Error::NonReflexive);
        }
        let normals: Vec<Point> = self.facets.iter().map(|f| f.normal.clone()).collect();
        LatticePolytope::from_vertices(&normals)
    }

    /// `k * P`: vertices and facet offsets scale by `k`.
    pub fn dilate(&self, k: i64) -> Result<LatticePolytope> {
        if k < 1 {
            return Err(Error::invalid(format!("dilation factor must be >= 1, got {k}")));
        }
        let scale = |v: &Point| -> Result<Point> {
            v.iter()
                .map(|&x| x.checked_mul(k).ok_or(Error::Overflow("dilated vertex")))
                .collect()
        };
        let vertices = self.vertices.iter().map(scale).collect::<Result<Vec<_>>>()?;
        let facets = self
            .facets
            .iter()
            .map(|f| {
                Ok(Facet {
                    normal: f.normal.clone(),
                    offset: f.offset.checked_mul(k).ok_or(Error::Overflow("dilated offset"))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LatticePolytope {
            dim: self.dim,
            vertices,
            facets,
        })
    }

    /// Componentwise bounds of the vertex set.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices {
            for i in 0..self.dim {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        (lo, hi)
    }

    /// All lattice points, lexicographically ordered.
    pub fn lattice_points(&self) -> Vec<CharacterPoint> {
        let (lo, hi) = self.bounding_box();
        let mut out = Vec::new();
        for_each_in_box(&lo, &hi, |m| {
            if self.contains(m) {
                out.push(m.to_vec());
            }
        });
        out
    }

    pub fn interior_lattice_points(&self) -> Vec<CharacterPoint> {
        let (lo, hi) = self.bounding_box();
        let mut out = Vec::new();
        for_each_in_box(&lo, &hi, |m| {
            if self.contains_interior(m) {
                out.push(m.to_vec());
            }
        });
        out
    }

    pub fn to_document(&self, name: &str) -> PolytopeDocument {
        PolytopeDocument {
            name: name.to_string(),
            dim: self.dim,
            vertices: self.vertices.clone(),
        }
    }
}

/// On-disk polytope description: `{"name", "dim", "vertices"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeDocument {
    pub name: String,
    pub dim: usize,
    pub vertices: Vec<Point>,
}

impl PolytopeDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_polytope(&self) -> Result<LatticePolytope> {
        if self.vertices.iter().any(|v| v.len() != self.dim) {
            return Err(Error::invalid(format!(
                "polytope '{}': every vertex must have {} coordinates",
                self.name, self.dim
            )));
        }
        LatticePolytope::from_vertices(&self.vertices)
    }
}

/// Visit every integer point of the box `[lo, hi]` in lexicographic order.
pub fn for_each_in_box(lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64])) {
    let n = lo.len();
    if (0..n).any(|i| lo[i] > hi[i]) {
        return;
    }
    let mut m = lo.to_vec();
    loop {
        f(&m);
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if m[i] < hi[i] {
                m[i] += 1;
                break;
            }
            m[i] = lo[i];
        }
    }
}

fn to_i64(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow("facet offset"))
}

fn affine_rank(pts: &[Point]) -> usize {
    if pts.len() < 2 {
        return 0;
    }
    let base = &pts[0];
    let diffs: Vec<Vec<i64>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    rank_rational(&RatMatrix::from_i64_rows(&diffs))
}

/// Primitive normal of the affine hyperplane through the chosen points, or
/// `None` if they are affinely dependent. Components are signed cofactors of
/// the difference matrix, so the arithmetic is exact.
fn hyperplane_normal(pts: &[Point], combo: &[usize]) -> Result<Option<Point>> {
    let n = pts[0].len();
    let base = &pts[combo[0]];
    let diffs: Vec<Vec<i64>> = combo[1..]
        .iter()
        .map(|&i| pts[i].iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let mut normal = Vec::with_capacity(n);
    for skip in 0..n {
        let minor_rows: Vec<Vec<i64>> = diffs
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &x)| x).collect())
            .collect();
        let det = if minor_rows.is_empty() {
            BigInt::from(1)
        } else {
            IntMatrix::from_i64_rows(&minor_rows).determinant()
        };
        let signed = if skip % 2 == 0 { det } else { -det };
        normal.push(signed);
    }
    if normal.iter().all(Zero::is_zero) {
        return Ok(None);
    }
    let normal: Vec<i64> = normal
        .iter()
        .map(|x| x.to_i64().ok_or(Error::Overflow("facet normal")))
        .collect::<Result<_>>()?;
    let g = gcd_slice(&normal);
    Ok(Some(normal.into_iter().map(|x| x / g).collect()))
}

/// All k-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        if k == 0 {
            return out;
        }
    }
}

/// Reference polytopes used throughout tests, examples and the CLI docs.
pub mod standard {
    use super::{LatticePolytope, Point};

    fn build(v: &[&[i64]]) -> LatticePolytope {
        let pts: Vec<Point> = v.iter().map(|p| p.to_vec()).collect();
        LatticePolytope::from_vertices(&pts).expect("standard polytope is full-dimensional")
    }

    /// Anticanonical polytope of P^2.
    pub fn p2_triangle() -> LatticePolytope {
        build(&[&[-1, -1], &[2, -1], &[-1, 2]])
    }

    /// Anticanonical polytope of P^1 x P^1.
    pub fn square() -> LatticePolytope {
        build(&[&[-1, -1], &[1, -1], &[-1, 1], &[1, 1]])
    }

    pub fn diamond() -> LatticePolytope {
        build(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]])
    }

    /// Anticanonical polytope of P^3.
    pub fn p3_simplex() -> LatticePolytope {
        build(&[&[-1, -1, -1], &[3, -1, -1], &[-1, 3, -1], &[-1, -1, 3]])
    }

    /// Cross-polytope conv{±e_i} in dimension 3.
    pub fn octahedron() -> LatticePolytope {
        build(&[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0], &[0, 0, 1], &[0, 0, -1]])
    }

    pub fn cube() -> LatticePolytope {
        let mut v = Vec::new();
        for x in [-1, 1] {
            for y in [-1, 1] {
                for z in [-1, 1] {
                    v.push(vec![x, y, z]);
                }
            }
        }
        LatticePolytope::from_vertices(&v).expect("cube")
    }
}

#[cfg(test)]
mod tests {
    use super::standard::*;
    use super::*;
    use proptest::prelude::*;

    fn sorted(mut v: Vec<Point>) -> Vec<Point> {
        v.sort();
        v
    }

    /// Independent count: scan the box and test membership in the convex
    /// hull by barycentric decomposition over the vertex triangles.
    fn brute_force_count_2d(vertices: &[Point]) -> usize {
        let (mut lo, mut hi) = (vertices[0].clone(), vertices[0].clone());
        for v in vertices {
            for i in 0..2 {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        let mut count = 0;
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                let inside = combinations(vertices.len(), 3).iter().any(|t| {
                    let (a, b, c) = (&vertices[t[0]], &vertices[t[1]], &vertices[t[2]]);
                    if (b[0] - a[0]) * (c[1] - a[1]) == (b[1] - a[1]) * (c[0] - a[0]) {
                        return false;
                    }
                    let cross = |p: &Point, q: &Point, r: (i64, i64)| {
                        (q[0] - p[0]) * (r.1 - p[1]) - (q[1] - p[1]) * (r.0 - p[0])
                    };
                    let d1 = cross(a, b, (x, y));
                    let d2 = cross(b, c, (x, y));
                    let d3 = cross(c, a, (x, y));
                    let neg = d1 < 0 || d2 < 0 || d3 < 0;
                    let pos = d1 > 0 || d2 > 0 || d3 > 0;
                    !(neg && pos)
                });
                if inside {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn square_hull() {
        let sq = square();
        assert_eq!(sq.facets().len(), 4);
        assert!(sq.facets().iter().all(|f| f.offset == 1));
    }

    #[test]
    fn triangle_hull() {
        let t = p2_triangle();
        let normals: Vec<Point> = t.facets().iter().map(|f| f.normal.clone()).collect();
        assert_eq!(normals, vec![vec![1, 0], vec![0, 1], vec![-1, -1]]);
        assert!(t.facets().iter().all(|f| f.offset == 1));
    }

    #[test]
    fn collinear_is_degenerate() {
        let pts = vec![vec![0, 0], vec![1, 1], vec![2, 2]];
        assert!(matches!(
            LatticePolytope::from_vertices(&pts),
            Err(Error::DegeneratePolytope { dim: 2, rank: 1 })
        ));
    }

    #[test]
    fn redundant_points_dropped() {
        let pts = vec![vec![-1, -1], vec![1, -1], vec![-1, 1], vec![1, 1], vec![0, 0], vec![1, 0]];
        assert_eq!(LatticePolytope::from_vertices(&pts).unwrap().vertices().len(), 4);
    }

    #[test]
    fn reflexivity() {
        assert!(square().is_reflexive());
        assert!(p2_triangle().is_reflexive());
        assert!(p3_simplex().is_reflexive());
        let wide = LatticePolytope::from_vertices(&[vec![2, 0], vec![-2, 0], vec![0, 1], vec![0, -1]]).unwrap();
        assert!(!wide.is_reflexive());
        assert!(wide.facets().iter().any(|f| f.offset == 2));
    }

    #[test]
    fn origin_outside_is_not_reflexive() {
        let p = LatticePolytope::from_vertices(&[vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        assert!(!p.is_reflexive());
    }

    #[test]
    fn duals() {
        assert_eq!(square().polar_dual().unwrap().vertices(), diamond().vertices());
        assert_eq!(
            sorted(p2_triangle().polar_dual().unwrap().vertices().to_vec()),
            sorted(vec![vec![1, 0], vec![0, 1], vec![-1, -1]])
        );
        assert_eq!(diamond().polar_dual().unwrap().vertices(), square().vertices());
        assert_eq!(octahedron().polar_dual().unwrap().vertices(), cube().vertices());
    }

    #[test]
    fn dual_of_non_reflexive_fails() {
        let p = LatticePolytope::from_vertices(&[vec![2, 0], vec![-2, 0], vec![0, 1], vec![0, -1]]).unwrap();
        assert!(matches!(p.polar_dual(), Err(Error::NonReflexive)));
    }

    #[test]
    fn dilation() {
        assert_eq!(square().dilate(1).unwrap(), square());
        let t2 = p2_triangle().dilate(2).unwrap();
        assert_eq!(
            sorted(t2.vertices().to_vec()),
            sorted(vec![vec![-2, -2], vec![4, -2], vec![-2, 4]])
        );
        for (f, g) in p2_triangle().facets().iter().zip(t2.facets()) {
            assert_eq!(g.offset, 2 * f.offset);
        }
        assert!(p2_triangle().dilate(0).is_err());
        // The dilated facet data agrees with a fresh hull of the scaled vertices.
        assert_eq!(LatticePolytope::from_vertices(t2.vertices()).unwrap(), t2);
    }

    #[test]
    fn lattice_point_counts() {
        let t = p2_triangle();
        assert_eq!(t.lattice_points().len(), brute_force_count_2d(t.vertices()));
        assert_eq!(t.lattice_points().len(), 10);
        assert_eq!(square().lattice_points().len(), brute_force_count_2d(square().vertices()));
        assert_eq!(square().lattice_points().len(), 9);
        // Degree-4 monomials in 4 variables: C(7, 3) = 35.
        assert_eq!(p3_simplex().lattice_points().len(), 35);
    }

    #[test]
    fn lattice_points_sorted() {
        let pts = p3_simplex().lattice_points();
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn reflexive_has_unique_interior_point() {
        for p in [square(), p2_triangle(), p3_simplex(), octahedron(), cube()] {
            assert_eq!(p.interior_lattice_points(), vec![vec![0; p.dim()]]);
        }
    }

    #[test]
    fn ehrhart_finite_differences_vanish() {
        for p in [square(), p2_triangle(), p3_simplex(), octahedron()] {
            let n = p.dim();
            let mut seq: Vec<i64> = vec![1];
            for k in 1..=(n as i64 + 2) {
                seq.push(p.dilate(k).unwrap().lattice_points().len() as i64);
            }
            for _ in 0..=n {
                seq = seq.windows(2).map(|w| w[1] - w[0]).collect();
            }
            assert!(seq.iter().all(|&x| x == 0), "Ehrhart check failed: {seq:?}");
        }
    }

    #[test]
    fn document_round_trip() {
        let doc = PolytopeDocument::from_json(r#"{"name":"p2","dim":2,"vertices":[[-1,-1],[2,-1],[-1,2]]}"#)
            .unwrap();
        assert_eq!(doc.to_polytope().unwrap(), p2_triangle());
        let bad = PolytopeDocument::from_json(r#"{"name":"x","dim":3,"vertices":[[0,0]]}"#).unwrap();
        assert!(bad.to_polytope().is_err());
    }

    #[test]
    fn five_dimensional_rejected() {
        let pts = vec![vec![0; 5], vec![1, 0, 0, 0, 0]];
        assert!(matches!(LatticePolytope::from_vertices(&pts), Err(Error::UnsupportedDimension(5))));
    }

    #[test]
    fn segment_in_one_dimension() {
        let p = LatticePolytope::from_vertices(&[vec![-1], vec![1], vec![0]]).unwrap();
        assert_eq!(p.vertices(), &[vec![-1], vec![1]]);
        assert!(p.is_reflexive());
    }

    fn polygon_points() -> impl Strategy<Value = Vec<Point>> {
        prop::collection::vec(prop::collection::vec(-3i64..=3, 2), 4..9)
    }

    proptest! {
        #[test]
        fn h_and_v_descriptions_agree(pts in polygon_points(), probe in prop::collection::vec(-4i64..=4, 2)) {
            let Ok(p) = LatticePolytope::from_vertices(&pts) else { return Ok(()); };
            for f in p.facets() {
                prop_assert_eq!(gcd_slice(&f.normal), 1);
                prop_assert!(p.vertices().iter().all(|v| f.slack(v) >= 0));
                prop_assert!(p.vertices().iter().filter(|v| f.slack(v) == 0).count() >= 2);
            }
            // Independent membership: barycentric hull test over vertex triangles.
            let inside_h = p.contains(&probe);
            let verts = p.vertices();
            let inside_v = combinations(verts.len(), 3).iter().any(|t| {
                let (a, b, c) = (&verts[t[0]], &verts[t[1]], &verts[t[2]]);
                if (b[0] - a[0]) * (c[1] - a[1]) == (b[1] - a[1]) * (c[0] - a[0]) {
                    return false;
                }
                let cross = |p: &Point, q: &Point| (q[0] - p[0]) * (probe[1] - p[1]) - (q[1] - p[1]) * (probe[0] - p[0]);
                let (d1, d2, d3) = (cross(a, b), cross(b, c), cross(c, a));
                !((d1 < 0 || d2 < 0 || d3 < 0) && (d1 > 0 || d2 > 0 || d3 > 0))
            });
            prop_assert_eq!(inside_h, inside_v);
        }
    }
}
