//! Finite simplicial complexes on ray indices, their reduced cohomology over
//! the rationals, and restriction maps along subcomplex inclusions.

use std::collections::{BTreeSet, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::toric::{NormalFan, TorusDivisor};
use crate::zlinalg::{self, kernel_basis, rref, IntMatrix, RatMatrix};

/// A simplicial complex stored level by level: level `l` holds the faces
/// with `l` vertices, sorted lexicographically. Level 0 is the empty face,
/// present in every complex, so the cochain complex is the augmented one and
/// level `l` computes reduced cohomology in degree `l - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportComplex {
    levels: Vec<Vec<Vec<usize>>>,
}

/// Reduced cohomology of one complex with chosen representatives.
#[derive(Clone, Debug)]
pub struct ReducedCohomology {
    /// `dims[l]` is the rank of reduced cohomology in degree `l - 1`.
    pub dims: Vec<usize>,
    reps: Vec<Vec<Vec<BigRational>>>,
    coords: Vec<RatMatrix>,
}

/// Restriction along `src ⊆ dst`, level by level.
#[derive(Clone, Debug)]
pub struct InclusionMap {
    /// Cochain restriction `C(dst) -> C(src)`, rows indexed by faces of `src`.
    pub cochain: Vec<RatMatrix>,
    /// Induced map `H(dst) -> H(src)` in the chosen cohomology bases.
    pub cohomology: Vec<RatMatrix>,
}

impl SupportComplex {
    /// Downward closure of the given faces. `levels` is the number of levels
    /// to keep (at least one more than the largest face).
    pub fn from_facets(facets: &[Vec<usize>], levels: usize) -> Self {
        let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
        all.insert(Vec::new());
        for f in facets {
            let mut f = f.clone();
            f.sort_unstable();
            f.dedup();
            for sub in 0u64..(1 << f.len()) {
                let face: Vec<usize> = f
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| sub & (1 << i) != 0)
                    .map(|(_, &v)| v)
                    .collect();
                all.insert(face);
            }
        }
        let top = all.iter().map(Vec::len).max().unwrap_or(0) + 1;
        let mut out = vec![Vec::new(); levels.max(top)];
        for face in all {
            out[face.len()].push(face);
        }
        for level in &mut out {
            level.sort();
        }
        SupportComplex { levels: out }
    }

    /// Boundary complex of a simplicial fan: faces are ray sets of cones.
    pub fn of_fan(fan: &NormalFan) -> Self {
        Self::from_facets(fan.cones(), fan.dim() + 1)
    }

    /// Faces all of whose vertices lie in `vertices`.
    pub fn full_subcomplex(&self, vertices: &BTreeSet<usize>) -> Self {
        let levels = self
            .levels
            .iter()
            .map(|level| {
                level
                    .iter()
                    .filter(|f| f.iter().all(|v| vertices.contains(v)))
                    .cloned()
                    .collect()
            })
            .collect();
        SupportComplex { levels }
    }

    /// The full subcomplex of the fan on `V(D, m)`, the rays with
    /// `<m, u_rho> < -a_rho`.
    pub fn for_character(fan: &NormalFan, d: &TorusDivisor, m: &[i64]) -> Self {
        Self::of_fan(fan).full_subcomplex(&violated_rays(fan, d, m))
    }

    pub fn levels(&self) -> &[Vec<Vec<usize>>] {
        &self.levels
    }

    pub fn is_empty(&self) -> bool {
        self.levels.iter().skip(1).all(Vec::is_empty)
    }

    pub fn contains_face(&self, face: &[usize]) -> bool {
        self.levels
            .get(face.len())
            .is_some_and(|l| l.binary_search_by(|f| f.as_slice().cmp(face)).is_ok())
    }

    /// Coboundary from level `l` to level `l + 1`, rows indexed by level
    /// `l + 1` faces. The sign of dropping the `j`-th vertex is `(-1)^j`.
    pub fn coboundary(&self, l: usize) -> IntMatrix {
        let empty = Vec::new();
        let src = &self.levels[l];
        let dst = self.levels.get(l + 1).unwrap_or(&empty);
        let index: HashMap<&[usize], usize> =
            src.iter().enumerate().map(|(i, f)| (f.as_slice(), i)).collect();
        let mut m = IntMatrix::zeros(dst.len(), src.len());
        for (row, face) in dst.iter().enumerate() {
            for j in 0..face.len() {
                let mut sub = face.clone();
                sub.remove(j);
                let col = index[sub.as_slice()];
                m[(row, col)] = if j % 2 == 0 { 1.into() } else { (-1).into() };
            }
        }
        m
    }

    /// Reduced cohomology ranks; entry `l` is degree `l - 1`.
    pub fn reduced_cohomology_dims(&self) -> Vec<usize> {
        let ranks: Vec<usize> = (0..self.levels.len()).map(|l| self.coboundary(l).rank()).collect();
        (0..self.levels.len())
            .map(|l| self.levels[l].len() - ranks[l] - if l == 0 { 0 } else { ranks[l - 1] })
            .collect()
    }

    /// Cohomology with explicit cocycle representatives and coordinate
    /// functionals, so that maps between complexes can be written as matrices.
    pub fn cohomology(&self) -> ReducedCohomology {
        let n = self.levels.len();
        let mut dims = Vec::with_capacity(n);
        let mut reps = Vec::with_capacity(n);
        let mut coords = Vec::with_capacity(n);
        for l in 0..n {
            let size = self.levels[l].len();
            let cocycles = kernel_basis(&self.coboundary(l).to_rational());
            let boundaries: Vec<Vec<BigRational>> = if l == 0 {
                Vec::new()
            } else {
                let d = self.coboundary(l - 1).to_rational();
                let pivots = rref(&mut d.clone());
                pivots.iter().map(|&c| (0..d.rows()).map(|r| d[(r, c)].clone()).collect()).collect()
            };
            // Extend a basis of the boundaries to a basis of the cocycles.
            let mut basis = boundaries.clone();
            let mut chosen = Vec::new();
            for z in cocycles {
                basis.push(z.clone());
                if column_rank(&basis, size) == basis.len() {
                    chosen.push(z);
                } else {
                    basis.pop();
                }
            }
            let h = chosen.len();
            let w = columns_to_matrix(&basis, size);
            let rows = rref(&mut w.transpose());
            let mut square = RatMatrix::zeros(basis.len(), basis.len());
            for (i, &r) in rows.iter().enumerate() {
                for j in 0..basis.len() {
                    square[(i, j)] = w[(r, j)].clone();
                }
            }
            let inverse = invert(&square);
            let b = boundaries.len();
            let mut coord = RatMatrix::zeros(h, size);
            for k in 0..h {
                for (i, &r) in rows.iter().enumerate() {
                    coord[(k, r)] = inverse[(b + k, i)].clone();
                }
            }
            dims.push(h);
            reps.push(chosen);
            coords.push(coord);
        }
        ReducedCohomology { dims, reps, coords }
    }
}

impl ReducedCohomology {
    /// Representatives in level `l`.
    pub fn representatives(&self, l: usize) -> &[Vec<BigRational>] {
        &self.reps[l]
    }

    /// Coordinates of the class of a level-`l` cocycle.
    pub fn coordinates(&self, l: usize, cocycle: &[BigRational]) -> Vec<BigRational> {
        let c = &self.coords[l];
        (0..c.rows())
            .map(|k| {
                (0..c.cols())
                    .filter(|&j| !c[(k, j)].is_zero() && !cocycle[j].is_zero())
                    .fold(BigRational::zero(), |acc, j| acc + &c[(k, j)] * &cocycle[j])
            })
            .collect()
    }
}

/// Rays whose inequality fails at `m`.
pub fn violated_rays(fan: &NormalFan, d: &TorusDivisor, m: &[i64]) -> BTreeSet<usize> {
    (0..fan.rays().len()).filter(|&r| ray_violated(fan, d, m, r)).collect()
}

fn ray_violated(fan: &NormalFan, d: &TorusDivisor, m: &[i64], r: usize) -> bool {
    crate::polytope::dot(m, &fan.rays()[r]) < -(d.coeffs()[r] as i128)
}

/// Restriction maps for `src ⊆ dst`.
pub fn inclusion_map(src: &SupportComplex, dst: &SupportComplex) -> Result<InclusionMap> {
    inclusion_map_with(src, &src.cohomology(), dst, &dst.cohomology())
}

pub(crate) fn inclusion_map_with(
    src: &SupportComplex,
    src_h: &ReducedCohomology,
    dst: &SupportComplex,
    dst_h: &ReducedCohomology,
) -> Result<InclusionMap> {
    if src.levels.len() > dst.levels.len() && src.levels[dst.levels.len()..].iter().any(|l| !l.is_empty()) {
        return Err(Error::NotASubcomplex);
    }
    let mut cochain = Vec::new();
    let mut cohomology = Vec::new();
    for l in 0..src.levels.len() {
        let sfaces = &src.levels[l];
        let dfaces: &[Vec<usize>] = dst.levels.get(l).map_or(&[], Vec::as_slice);
        let index: HashMap<&[usize], usize> =
            dfaces.iter().enumerate().map(|(i, f)| (f.as_slice(), i)).collect();
        let mut r = RatMatrix::zeros(sfaces.len(), dfaces.len());
        for (i, f) in sfaces.iter().enumerate() {
            let j = *index.get(f.as_slice()).ok_or(Error::NotASubcomplex)?;
            r[(i, j)] = BigRational::one();
        }
        let dst_reps: &[Vec<BigRational>] = if l < dst_h.reps.len() { &dst_h.reps[l] } else { &[] };
        let mut h = RatMatrix::zeros(src_h.dims[l], dst_reps.len());
        for (j, rep) in dst_reps.iter().enumerate() {
            let restricted: Vec<BigRational> = (0..sfaces.len())
                .map(|i| {
                    (0..dfaces.len())
                        .filter(|&k| !r[(i, k)].is_zero())
                        .fold(BigRational::zero(), |acc, k| acc + &rep[k])
                })
                .collect();
            for (k, x) in src_h.coordinates(l, &restricted).into_iter().enumerate() {
                h[(k, j)] = x;
            }
        }
        cochain.push(r);
        cohomology.push(h);
    }
    Ok(InclusionMap { cochain, cohomology })
}

fn columns_to_matrix(cols: &[Vec<BigRational>], rows: usize) -> RatMatrix {
    let mut m = RatMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for i in 0..rows {
            m[(i, j)] = c[i].clone();
        }
    }
    m
}

fn column_rank(cols: &[Vec<BigRational>], rows: usize) -> usize {
    zlinalg::rank_rational(&columns_to_matrix(cols, rows))
}

fn invert(m: &RatMatrix) -> RatMatrix {
    let n = m.rows();
    let mut aug = RatMatrix::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, n + i)] = BigRational::one();
    }
    let pivots = rref(&mut aug);
    debug_assert_eq!(pivots.len(), n);
    let mut inv = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inv[(i, j)] = aug[(i, n + j)].clone();
        }
    }
    inv
}
