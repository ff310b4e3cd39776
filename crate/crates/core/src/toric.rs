//! The toric variety of a lattice polytope: its normal fan, torus-invariant
//! divisors, Cartier data, positivity and the monomial embedding.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::{dot, for_each_in_box, CharacterPoint, LatticePolytope, Point};
use crate::zlinalg::{self, primitive_integer, IntMatrix, RatMatrix};

/// Complete fan with one ray per facet and one maximal cone per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalFan {
    dim: usize,
    rays: Vec<Point>,
    offsets: Vec<i64>,
    cones: Vec<Vec<usize>>,
    cone_vertices: Vec<Point>,
}

/// `sum a_rho D_rho`, coefficients in ray order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusDivisor(pub Vec<i64>);

/// Per maximal cone, the character `m_sigma` with `<m_sigma, u_rho> = -a_rho`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CartierData {
    pub characters: Vec<Point>,
}

/// Monomials of `(n-1) * Delta` defining the map to projective space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmbeddingData {
    pub monomials: Vec<CharacterPoint>,
}

impl TorusDivisor {
    pub fn zero(rays: usize) -> Self {
        TorusDivisor(vec![0; rays])
    }

    pub fn uniform(rays: usize, a: i64) -> Self {
        TorusDivisor(vec![a; rays])
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, k: i64) -> Self {
        TorusDivisor(self.0.iter().map(|a| a * k).collect())
    }

    pub fn plus(&self, other: &TorusDivisor) -> Self {
        assert_eq!(self.len(), other.len(), "divisors on different fans");
        TorusDivisor(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn minus(&self, other: &TorusDivisor) -> Self {
        self.plus(&other.scaled(-1))
    }

    /// Parse `"a1,a2,..."`.
    pub fn parse(text: &str) -> Result<Self> {
        text.split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::invalid(format!("bad divisor coefficient '{t}'")))
            })
            .collect::<Result<Vec<_>>>()
            .map(TorusDivisor)
    }
}

impl fmt::Display for TorusDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl NormalFan {
    /// Normal fan of a full-dimensional polytope. Ray order is the facet
    /// order of the polytope; cone order is its vertex order.
    pub fn of_polytope(p: &LatticePolytope) -> Result<Self> {
        let rays: Vec<Point> = p.facets().iter().map(|f| f.normal.clone()).collect();
        let offsets = p.facets().iter().map(|f| f.offset).collect();
        let mut cones = Vec::new();
        for v in p.vertices() {
            let cone: Vec<usize> = p
                .facets()
                .iter()
                .enumerate()
                .filter(|(_, f)| f.slack(v) == 0)
                .map(|(i, _)| i)
                .collect();
            if cone.len() < p.dim() {
                return Err(Error::DegeneratePolytope {
                    dim: p.dim(),
                    rank: cone.len(),
                });
            }
            cones.push(cone);
        }
        Ok(NormalFan {
            dim: p.dim(),
            rays,
            offsets,
            cones,
            cone_vertices: p.vertices().to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Point] {
        &self.rays
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    /// The polytope vertex dual to each maximal cone.
    pub fn cone_vertices(&self) -> &[Point] {
        &self.cone_vertices
    }

    /// `D_Delta = sum c_F D_F`.
    pub fn polytope_divisor(&self) -> TorusDivisor {
        TorusDivisor(self.offsets.clone())
    }

    /// `K_X = -sum D_F`.
    pub fn canonical_divisor(&self) -> TorusDivisor {
        TorusDivisor::uniform(self.rays.len(), -1)
    }

    /// Every maximal cone has exactly n linearly independent rays.
    pub fn is_simplicial(&self) -> bool {
        self.first_non_simplicial().is_none()
    }

    pub(crate) fn first_non_simplicial(&self) -> Option<usize> {
        self.cones.iter().position(|c| {
            c.len() != self.dim || {
                let rows: Vec<Vec<i64>> = c.iter().map(|&r| self.rays[r].clone()).collect();
                IntMatrix::from_i64_rows(&rows).rank() != self.dim
            }
        })
    }

    pub(crate) fn require_simplicial(&self) -> Result<()> {
        match self.first_non_simplicial() {
            None => Ok(()),
            Some(cone) => Err(Error::NonSimplicialFan {
                cone,
                rays: self.cones[cone].len(),
                dim: self.dim,
            }),
        }
    }

    fn check_divisor(&self, d: &TorusDivisor) -> Result<()> {
        if d.len() != self.rays.len() {
            return Err(Error::invalid(format!(
                "divisor has {} coefficients but the fan has {} rays",
                d.len(),
                self.rays.len()
            )));
        }
        Ok(())
    }

    /// Whether `u` lies in the maximal cone `cone`: `u` is minimized over the
    /// polytope at the cone's vertex.
    pub fn cone_contains(&self, cone: usize, u: &[BigRational]) -> bool {
        let eval = |m: &Point| -> BigRational {
            m.iter()
                .zip(u)
                .map(|(&a, b)| b * BigRational::from_integer(BigInt::from(a)))
                .fold(BigRational::zero(), |acc, x| acc + x)
        };
        let here = eval(&self.cone_vertices[cone]);
        self.cone_vertices.iter().all(|w| eval(w) >= here)
    }

    /// Same membership, decided from the rays: for a simplicial cone the
    /// coordinates of `u` in the ray basis must be nonnegative.
    pub fn cone_contains_by_rays(&self, cone: usize, u: &[BigRational]) -> Option<bool> {
        let c = &self.cones[cone];
        if c.len() != self.dim {
            return None;
        }
        // Columns are the rays: solve U^T x = u.
        let rows: Vec<Vec<i64>> = (0..self.dim)
            .map(|i| c.iter().map(|&r| self.rays[r][i]).collect())
            .collect();
        let x = zlinalg::solve(&RatMatrix::from_i64_rows(&rows), u)?;
        Some(x.iter().all(|v| !v.is_negative()))
    }

    /// Rational solution of `<m_sigma, u_rho> = -a_rho` on each cone.
    pub(crate) fn rational_cartier(&self, d: &TorusDivisor) -> Result<Vec<Vec<BigRational>>> {
        self.check_divisor(d)?;
        self.require_simplicial()?;
        self.cones
            .iter()
            .enumerate()
            .map(|(ci, c)| {
                let rows: Vec<Vec<i64>> = c.iter().map(|&r| self.rays[r].clone()).collect();
                let rhs: Vec<BigRational> = c
                    .iter()
                    .map(|&r| BigRational::from_integer(BigInt::from(-d.0[r])))
                    .collect();
                zlinalg::solve(&RatMatrix::from_i64_rows(&rows), &rhs)
                    .ok_or(Error::NotCartier { cone: ci })
            })
            .collect()
    }

    pub fn cartier_data(&self, d: &TorusDivisor) -> Result<CartierData> {
        let rational = self.rational_cartier(d)?;
        let characters = rational
            .into_iter()
            .enumerate()
            .map(|(ci, m)| {
                m.iter()
                    .map(|x| {
                        if !x.is_integer() {
                            return Err(Error::NotCartier { cone: ci });
                        }
                        x.to_integer().to_i64().ok_or(Error::Overflow("Cartier character"))
                    })
                    .collect::<Result<Point>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CartierData { characters })
    }

    /// Strict convexity of the support function: on every cone the Cartier
    /// character satisfies the inequality of every ray outside the cone
    /// strictly.
    pub fn is_ample(&self, d: &TorusDivisor) -> Result<bool> {
        let data = self.cartier_data(d)?;
        Ok(self.ample_with(d, &data))
    }

    fn ample_with(&self, d: &TorusDivisor, data: &CartierData) -> bool {
        self.cones.iter().zip(&data.characters).all(|(c, m)| {
            (0..self.rays.len())
                .filter(|r| !c.contains(r))
                .all(|r| dot(m, &self.rays[r]) > -(d.0[r] as i128))
        })
    }

    /// `P_D = { m : <m, u_rho> >= -a_rho }` lattice points, scanning the box
    /// of the given corner characters.
    fn divisor_polytope_points(&self, d: &TorusDivisor, corners: &[Point]) -> Vec<Point> {
        let n = self.dim;
        let mut lo = corners[0].clone();
        let mut hi = corners[0].clone();
        for c in corners {
            for i in 0..n {
                lo[i] = lo[i].min(c[i]);
                hi[i] = hi[i].max(c[i]);
            }
        }
        let mut out = Vec::new();
        for_each_in_box(&lo, &hi, |m| {
            if self
                .rays
                .iter()
                .zip(&d.0)
                .all(|(u, &a)| dot(m, u) >= -(a as i128))
            {
                out.push(m.to_vec());
            }
        });
        out
    }

    /// Ample, and at every vertex `m_sigma` of `P_D` the translates
    /// `(P_D ∩ M) - m_sigma` generate the semigroup `sigma^dual ∩ M`.
    ///
    /// The semigroup check is finite: it suffices that every lattice point of
    /// the fundamental parallelepiped of the dual cone generators, and the
    /// generators themselves, are sums of translates.
    pub fn is_very_ample(&self, d: &TorusDivisor) -> Result<bool> {
        let data = self.cartier_data(d)?;
        if !self.ample_with(d, &data) {
            return Ok(false);
        }
        let points = self.divisor_polytope_points(d, &data.characters);
        for (c, vertex) in self.cones.iter().zip(&data.characters) {
            let rays: Vec<&Point> = c.iter().map(|&r| &self.rays[r]).collect();
            let shifted: Vec<Point> = points
                .iter()
                .map(|p| p.iter().zip(vertex).map(|(a, b)| a - b).collect())
                .filter(|p: &Point| p.iter().any(|&x| x != 0))
                .collect();
            let targets = dual_cone_targets(&rays)?;
            if !semigroup_covers(&rays, &shifted, &targets) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Primitive generators of the dual of a simplicial cone together with all
/// lattice points of their half-open fundamental parallelepiped.
fn dual_cone_targets(rays: &[&Point]) -> Result<Vec<Point>> {
    let n = rays.len();
    let rows: Vec<Vec<i64>> = rays.iter().map(|r| r.to_vec()).collect();
    let u = RatMatrix::from_i64_rows(&rows);
    let mut gens: Vec<Point> = Vec::with_capacity(n);
    for j in 0..n {
        // w_j with <w_j, u_i> = delta_ij, then made primitive.
        let rhs: Vec<BigRational> = (0..n)
            .map(|i| if i == j { BigRational::one() } else { BigRational::zero() })
            .collect();
        let w = zlinalg::solve(&u, &rhs).ok_or(Error::invalid("singular cone"))?;
        let w = primitive_integer(&w)
            .iter()
            .map(|x| x.to_i64().ok_or(Error::Overflow("dual generator")))
            .collect::<Result<Point>>()?;
        gens.push(w);
    }
    let heights: Vec<i128> = (0..n).map(|j| dot(&gens[j], rays[j])).collect();
    let mut lo = vec![0i64; n];
    let mut hi = vec![0i64; n];
    for mask in 0u32..(1 << n) {
        let mut corner = vec![0i64; n];
        for (j, g) in gens.iter().enumerate() {
            if mask & (1 << j) != 0 {
                for i in 0..n {
                    corner[i] += g[i];
                }
            }
        }
        for i in 0..n {
            lo[i] = lo[i].min(corner[i]);
            hi[i] = hi[i].max(corner[i]);
        }
    }
    let mut targets: BTreeSet<Point> = gens.iter().cloned().collect();
    for_each_in_box(&lo, &hi, |m| {
        let inside = rays.iter().zip(&heights).all(|(r, &h)| {
            let v = dot(m, r);
            v >= 0 && v <= h
        });
        if inside && m.iter().any(|&x| x != 0) {
            targets.insert(m.to_vec());
        }
    });
    Ok(targets.into_iter().collect())
}

/// Whether every target is a nonnegative integer combination of `gens`.
/// Breadth-first over the grading `sum_i <x, u_i>`, pruned by the largest
/// target coordinate along each ray.
fn semigroup_covers(rays: &[&Point], gens: &[Point], targets: &[Point]) -> bool {
    let coords = |x: &Point| -> Vec<i128> { rays.iter().map(|r| dot(x, r)).collect() };
    let bound: Vec<i128> = (0..rays.len())
        .map(|i| targets.iter().map(|t| coords(t)[i]).max().unwrap_or(0))
        .collect();
    let gens: Vec<&Point> = gens
        .iter()
        .filter(|g| coords(g).iter().zip(&bound).all(|(c, b)| c <= b))
        .collect();
    let n = rays.first().map_or(0, |r| r.len());
    let mut seen: HashSet<Point> = HashSet::new();
    let mut frontier = vec![vec![0i64; n]];
    seen.insert(vec![0i64; n]);
    while let Some(x) = frontier.pop() {
        for g in &gens {
            let y: Point = x.iter().zip(g.iter()).map(|(a, b)| a + b).collect();
            if coords(&y).iter().zip(&bound).any(|(c, b)| c > b) {
                continue;
            }
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    targets.iter().all(|t| seen.contains(t))
}

impl EmbeddingData {
    /// Number of homogeneous coordinates.
    pub fn coordinate_count(&self) -> usize {
        self.monomials.len()
    }

    /// Dimension of the target projective space: N coordinates live in P^(N-1).
    pub fn target_dimension(&self) -> usize {
        self.monomials.len() - 1
    }

    /// `(chi_{m_1}(z) : ... : chi_{m_N}(z))` at a torus point.
    pub fn evaluate(&self, z: &[BigRational]) -> Result<Vec<BigRational>> {
        if let Some(i) = z.iter().position(Zero::is_zero) {
            return Err(Error::NotInTorus(i));
        }
        self.monomials
            .iter()
            .map(|m| {
                if m.len() != z.len() {
                    return Err(Error::invalid("torus point has the wrong dimension"));
                }
                let mut acc = BigRational::one();
                for (&e, zi) in m.iter().zip(z) {
                    let base = if e < 0 { zi.recip() } else { zi.clone() };
                    let e = u32::try_from(e.unsigned_abs()).map_err(|_| Error::Overflow("exponent"))?;
                    acc *= num_traits::pow::Pow::pow(&base, e);
                }
                Ok(acc)
            })
            .collect()
    }
}

/// `(n-1) Delta` monomials for a reflexive polytope, n >= 2.
pub fn embedding(p: &LatticePolytope) -> Result<EmbeddingData> {
    if !p.is_reflexive() {
        return Err(Error::NonReflexive);
    }
    if p.dim() < 2 {
        return Err(Error::UnsupportedDimension(p.dim()));
    }
    let monomials = p.dilate(p.dim() as i64 - 1)?.lattice_points();
    Ok(EmbeddingData { monomials })
}

/// Whether two homogeneous coordinate vectors name the same projective point.
pub fn projectively_equal(a: &[BigRational], b: &[BigRational]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let Some(k) = a.iter().position(|x| !x.is_zero()) else {
        return b.iter().all(Zero::is_zero);
    };
    if b[k].is_zero() {
        return false;
    }
    a.iter().zip(b).all(|(x, y)| x * &b[k] == y * &a[k])
}
