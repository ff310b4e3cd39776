//! Line-bundle cohomology on a simplicial toric variety, one character at a
//! time: `H^i(X, O(D))_m` is the reduced cohomology in degree `i - 1` of the
//! full subcomplex of the fan on the rays with `<m, u_rho> < -a_rho`.

pub mod complex;

use std::cell::{OnceCell, RefCell};
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polytope::{dot, for_each_in_box, Point};
use crate::toric::{NormalFan, TorusDivisor};
use crate::zlinalg::{modp, RatMatrix};

pub use complex::{inclusion_map, InclusionMap, ReducedCohomology, SupportComplex};

/// How many times the character box may grow before giving up.
const MAX_GROWTH: usize = 6;

/// Total and graded dimensions of `H^*(X, O(D))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedCohomology {
    pub divisor: TorusDivisor,
    /// `totals[i] = h^i(X, O(D))`.
    pub totals: Vec<usize>,
    /// Nonzero graded pieces only.
    #[serde(serialize_with = "serialize_pieces")]
    pub pieces: BTreeMap<Point, Vec<usize>>,
}

fn serialize_pieces<S: serde::Serializer>(
    pieces: &BTreeMap<Point, Vec<usize>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Piece<'a> {
        m: &'a Point,
        dims: &'a Vec<usize>,
    }
    s.collect_seq(pieces.iter().map(|(m, dims)| Piece { m, dims }))
}

impl GradedCohomology {
    pub fn euler_characteristic(&self) -> i64 {
        self.totals
            .iter()
            .enumerate()
            .map(|(i, &h)| if i % 2 == 0 { h as i64 } else { -(h as i64) })
            .sum()
    }
}

struct MaskData {
    complex: SupportComplex,
    dims: Vec<usize>,
    cohomology: OnceCell<ReducedCohomology>,
}

impl MaskData {
    fn cohomology(&self) -> &ReducedCohomology {
        self.cohomology.get_or_init(|| self.complex.cohomology())
    }
}

/// Graded pieces found in a region scan. Degree-0 and top-degree pieces are
/// one-dimensional and counted in `totals`; `pieces` keeps the ones the
/// caller asked for together with their ray masks.
pub(crate) struct RegionScan {
    pub totals: Vec<usize>,
    pub pieces: Vec<(Point, u64)>,
}

/// A fan together with a cache of support complexes keyed by ray mask.
pub struct CohomologyContext {
    fan: NormalFan,
    complex: SupportComplex,
    masks: RefCell<HashMap<u64, Rc<MaskData>>>,
    restrictions: RefCell<HashMap<(u64, u64, usize), Rc<RatMatrix>>>,
}

impl CohomologyContext {
    pub fn new(fan: NormalFan) -> Result<Self> {
        fan.require_simplicial()?;
        if fan.rays().len() > 64 {
            return Err(Error::invalid("at most 64 rays are supported"));
        }
        let complex = SupportComplex::of_fan(&fan);
        Ok(CohomologyContext {
            fan,
            complex,
            masks: RefCell::new(HashMap::new()),
            restrictions: RefCell::new(HashMap::new()),
        })
    }

    pub fn fan(&self) -> &NormalFan {
        &self.fan
    }

    fn mask_data(&self, mask: u64) -> Rc<MaskData> {
        if let Some(d) = self.masks.borrow().get(&mask) {
            return Rc::clone(d);
        }
        let vertices = (0..self.fan.rays().len()).filter(|r| mask & (1 << r) != 0).collect();
        let complex = self.complex.full_subcomplex(&vertices);
        let dims = complex.reduced_cohomology_dims();
        let data = Rc::new(MaskData {
            complex,
            dims,
            cohomology: OnceCell::new(),
        });
        self.masks.borrow_mut().insert(mask, Rc::clone(&data));
        data
    }

    pub(crate) fn mask_of(&self, d: &TorusDivisor, m: &[i64]) -> u64 {
        let mut mask = 0u64;
        for (r, (u, &a)) in self.fan.rays().iter().zip(d.coeffs()).enumerate() {
            if dot(m, u) < -(a as i128) {
                mask |= 1 << r;
            }
        }
        mask
    }

    /// Graded piece dimensions of `H^*(X, O(D))` at `m`.
    pub fn piece(&self, d: &TorusDivisor, m: &[i64]) -> Vec<usize> {
        self.mask_data(self.mask_of(d, m)).dims.clone()
    }

    pub(crate) fn piece_dims(&self, mask: u64) -> Vec<usize> {
        self.mask_data(mask).dims.clone()
    }

    /// Integer box containing the Cartier characters of `d`.
    fn cartier_box(&self, d: &TorusDivisor) -> Result<(Point, Point)> {
        let chars = self.fan.rational_cartier(d)?;
        let n = self.fan.dim();
        let mut lo = vec![i64::MAX; n];
        let mut hi = vec![i64::MIN; n];
        for c in &chars {
            for i in 0..n {
                let f = c[i].floor().to_integer().to_i64().ok_or(Error::Overflow("character box"))?;
                let g = c[i].ceil().to_integer().to_i64().ok_or(Error::Overflow("character box"))?;
                lo[i] = lo[i].min(f);
                hi[i] = hi[i].max(g);
            }
        }
        Ok((lo, hi))
    }

    /// Scan the Cartier box expanded until its outer shell carries no
    /// cohomology. `keep` selects which nonzero pieces to return.
    pub(crate) fn scan(&self, d: &TorusDivisor, keep: impl Fn(&[usize]) -> bool) -> Result<RegionScan> {
        if d.len() != self.fan.rays().len() {
            return Err(Error::invalid(format!(
                "divisor has {} coefficients but the fan has {} rays",
                d.len(),
                self.fan.rays().len()
            )));
        }
        let (lo, hi) = self.cartier_box(d)?;
        let n = self.fan.dim();
        let mut dims_by_mask: HashMap<u64, (Vec<usize>, bool)> = HashMap::new();
        for grow in 1..=MAX_GROWTH as i64 {
            let lo: Point = lo.iter().map(|x| x - grow).collect();
            let hi: Point = hi.iter().map(|x| x + grow).collect();
            let mut totals = vec![0usize; n + 1];
            let mut pieces = Vec::new();
            let mut shell_hit = false;
            for_each_in_box(&lo, &hi, |m| {
                let mask = self.mask_of(d, m);
                let (dims, nonzero) = dims_by_mask.entry(mask).or_insert_with(|| {
                    let dims = self.piece_dims(mask);
                    let nz = dims.iter().any(|&h| h > 0);
                    (dims, nz)
                });
                if !*nonzero {
                    return;
                }
                if m.iter().zip(&lo).zip(&hi).any(|((x, l), h)| x == l || x == h) {
                    shell_hit = true;
                }
                for (t, h) in totals.iter_mut().zip(dims.iter()) {
                    *t += h;
                }
                if keep(dims) {
                    pieces.push((m.to_vec(), mask));
                }
            });
            if !shell_hit {
                return Ok(RegionScan { totals, pieces });
            }
        }
        Err(Error::RegionNotCertified(MAX_GROWTH))
    }

    pub fn divisor_cohomology(&self, d: &TorusDivisor) -> Result<GradedCohomology> {
        let scan = self.scan(d, |_| true)?;
        let pieces = scan
            .pieces
            .into_iter()
            .map(|(m, mask)| (m, self.piece_dims(mask)))
            .collect();
        Ok(GradedCohomology {
            divisor: d.clone(),
            totals: scan.totals,
            pieces,
        })
    }

    /// `h^i(X, O(D))` without keeping the graded pieces.
    pub fn cohomology_dims(&self, d: &TorusDivisor) -> Result<Vec<usize>> {
        Ok(self.scan(d, |_| false)?.totals)
    }

    /// The map `H^{level}(big) -> H^{level}(small)` for two ray masks with
    /// `small ⊆ big`, in the cached cohomology bases.
    pub(crate) fn restriction(&self, big: u64, small: u64, level: usize) -> Result<Rc<RatMatrix>> {
        if let Some(m) = self.restrictions.borrow().get(&(big, small, level)) {
            return Ok(Rc::clone(m));
        }
        let b = self.mask_data(big);
        let s = self.mask_data(small);
        let map = complex::inclusion_map_with(&s.complex, s.cohomology(), &b.complex, b.cohomology())?;
        let matrix = Rc::new(map.cohomology[level].clone());
        self.restrictions
            .borrow_mut()
            .insert((big, small, level), Rc::clone(&matrix));
        Ok(matrix)
    }

    /// Multiplication by the monomials `monomials` from `H^level(O(source))`
    /// to `H^level(O(target))`, one block per monomial and source piece.
    pub fn multiplication_map(
        &self,
        source: &TorusDivisor,
        target: &TorusDivisor,
        monomials: &[Point],
        level: usize,
    ) -> Result<GradedMap> {
        let keep = |dims: &[usize]| dims.get(level).is_some_and(|&h| h > 0);
        let src = self.scan(source, keep)?;
        let tgt = self.scan(target, keep)?;
        self.multiplication_from_scans(&src.pieces, &tgt.pieces, target, monomials, level)
    }

    pub(crate) fn multiplication_from_scans(
        &self,
        src: &[(Point, u64)],
        tgt: &[(Point, u64)],
        target: &TorusDivisor,
        monomials: &[Point],
        level: usize,
    ) -> Result<GradedMap> {
        let source_pieces: Vec<(Point, usize)> =
            src.iter().map(|(m, mask)| (m.clone(), self.piece_dims(*mask)[level])).collect();
        let target_pieces: Vec<(Point, usize)> =
            tgt.iter().map(|(m, mask)| (m.clone(), self.piece_dims(*mask)[level])).collect();
        let target_index: HashMap<&Point, usize> = tgt.iter().enumerate().map(|(i, (m, _))| (m, i)).collect();
        let mut blocks = Vec::new();
        for (si, (m, big)) in src.iter().enumerate() {
            for (k, mp) in monomials.iter().enumerate() {
                let shifted: Point = m.iter().zip(mp).map(|(a, b)| a + b).collect();
                let Some(&ti) = target_index.get(&shifted) else {
                    continue;
                };
                let small = self.mask_of(target, &shifted);
                debug_assert_eq!(small, tgt[ti].1);
                if small & !big != 0 {
                    return Err(Error::NotASubcomplex);
                }
                blocks.push(MapBlock {
                    source: si,
                    target: ti,
                    monomial: k,
                    matrix: self.restriction(*big, small, level)?,
                });
            }
        }
        Ok(GradedMap {
            level,
            source: source_pieces,
            target: target_pieces,
            blocks,
        })
    }
}

/// Convenience wrapper building a one-off context.
pub fn divisor_cohomology(fan: &NormalFan, d: &TorusDivisor) -> Result<GradedCohomology> {
    CohomologyContext::new(fan.clone())?.divisor_cohomology(d)
}

/// One block of a graded map: monomial `monomial` sends source piece
/// `source` into target piece `target` via `matrix`.
#[derive(Clone, Debug)]
pub struct MapBlock {
    pub source: usize,
    pub target: usize,
    pub monomial: usize,
    pub matrix: Rc<RatMatrix>,
}

/// A map between graded cohomology groups that respects the grading up to
/// the monomial shift.
#[derive(Clone, Debug)]
pub struct GradedMap {
    pub level: usize,
    pub source: Vec<(Point, usize)>,
    pub target: Vec<(Point, usize)>,
    pub blocks: Vec<MapBlock>,
}

impl GradedMap {
    pub fn source_dim(&self) -> usize {
        self.source.iter().map(|p| p.1).sum()
    }

    pub fn target_dim(&self) -> usize {
        self.target.iter().map(|p| p.1).sum()
    }

    /// Dense matrix over `F_p` with block `k` weighted by `coeffs[k]`.
    pub fn to_modp(&self, coeffs: &[u64]) -> Result<Vec<Vec<u64>>> {
        let offsets = |pieces: &[(Point, usize)]| -> Vec<usize> {
            pieces
                .iter()
                .scan(0, |acc, p| {
                    let o = *acc;
                    *acc += p.1;
                    Some(o)
                })
                .collect()
        };
        let so = offsets(&self.source);
        let to = offsets(&self.target);
        let mut m = vec![vec![0u64; self.source_dim()]; self.target_dim()];
        for b in &self.blocks {
            let c = coeffs[b.monomial];
            for i in 0..b.matrix.rows() {
                for j in 0..b.matrix.cols() {
                    let x = modp::from_rational(&b.matrix[(i, j)])
                        .ok_or_else(|| Error::NumericalInstability("denominator divisible by p".into()))?;
                    let cell = &mut m[to[b.target] + i][so[b.source] + j];
                    *cell = modp::add(*cell, modp::mul(c, x));
                }
            }
        }
        Ok(m)
    }

    pub fn rank_modp(&self, coeffs: &[u64]) -> Result<usize> {
        if self.source_dim() == 0 || self.target_dim() == 0 {
            return Ok(0);
        }
        Ok(modp::rank(self.to_modp(coeffs)?))
    }
}
