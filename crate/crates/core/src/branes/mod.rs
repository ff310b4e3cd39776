//! The anticanonical hypersurface `Y`, line-bundle branes on it, and the
//! dimension-level checks built from their Ext groups.

mod checks;

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polytope::{LatticePolytope, Point};
use crate::sheafcoh::CohomologyContext;
use crate::toric::{NormalFan, TorusDivisor};
use crate::zlinalg::modp;

pub use checks::{
    rectangle_table, spanning_scan, triangle_clauses, ClauseCheck, ClauseStatus, RectangleEntry, RectangleTable,
    ScanMode, SpanningReport, TriangleReport,
};

/// Attempts (each a pair of seeds) before reporting a genericity failure.
pub const GENERICITY_ATTEMPTS: usize = 3;

const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// A generic member of `|-K_X|` for a reflexive polytope, with coefficients
/// over `F_p` drawn from a seeded generator.
pub struct HypersurfaceModel {
    polytope: LatticePolytope,
    ctx: CohomologyContext,
    seed: u64,
    monomials: Vec<Point>,
    cache: RefCell<HashMap<TorusDivisor, Vec<usize>>>,
}

impl HypersurfaceModel {
    pub fn new(polytope: &LatticePolytope, seed: u64) -> Result<Self> {
        if !polytope.is_reflexive() {
            return Err(Error::NonReflexive);
        }
        let fan = NormalFan::of_polytope(polytope)?;
        let ctx = CohomologyContext::new(fan)?;
        Ok(HypersurfaceModel {
            polytope: polytope.clone(),
            ctx,
            seed,
            monomials: polytope.lattice_points(),
            cache: RefCell::new(HashMap::new()),
        })
    }

    /// Ambient dimension n; `Y` has dimension n - 1.
    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn polytope(&self) -> &LatticePolytope {
        &self.polytope
    }

    pub fn fan(&self) -> &NormalFan {
        self.ctx.fan()
    }

    pub fn context(&self) -> &CohomologyContext {
        &self.ctx
    }

    /// Exponents of the monomials of the defining section, `Delta ∩ M`.
    pub fn monomials(&self) -> &[Point] {
        &self.monomials
    }

    pub fn ray_count(&self) -> usize {
        self.fan().rays().len()
    }

    /// The class of `Y`, i.e. `-K_X`.
    pub fn y_divisor(&self) -> TorusDivisor {
        TorusDivisor::uniform(self.ray_count(), 1)
    }

    /// `E_L = (n - 1)(-K_X)`, the divisor of the brane `L`.
    pub fn l_divisor(&self) -> TorusDivisor {
        self.y_divisor().scaled(self.dim() as i64 - 1)
    }

    /// Coefficients of the defining section for a given seed, one per
    /// monomial, uniform over the nonzero residues.
    pub fn coefficients(seed: u64, count: usize) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| rng.gen_range(1..modp::PRIME)).collect()
    }

    fn attempt_seeds(&self, attempt: usize) -> (u64, u64) {
        let k = 2 * attempt as u64;
        (
            self.seed.wrapping_add(k.wrapping_mul(SEED_STRIDE)),
            self.seed.wrapping_add((k + 1).wrapping_mul(SEED_STRIDE)),
        )
    }

    /// `(h^0, ..., h^{n-1})` of `O_Y(E)`.
    pub fn hypersurface_cohomology(&self, e: &TorusDivisor) -> Result<Vec<usize>> {
        if let Some(h) = self.cache.borrow().get(e) {
            return Ok(h.clone());
        }
        self.fan().cartier_data(e)?;
        let sequence = self.restriction_sequence(e)?;
        let mut last = None;
        for attempt in 0..GENERICITY_ATTEMPTS {
            let (s1, s2) = self.attempt_seeds(attempt);
            let h1 = sequence.dims(&sequence.ranks(s1, self.monomials.len())?);
            let h2 = sequence.dims(&sequence.ranks(s2, self.monomials.len())?);
            if h1 == h2 {
                self.cache.borrow_mut().insert(e.clone(), h1.clone());
                return Ok(h1);
            }
            last = Some((h1, h2));
        }
        let (h1, h2) = last.expect("at least one attempt");
        Err(Error::GenericityFailure {
            attempts: GENERICITY_ATTEMPTS,
            detail: format!("E = ({e}): {h1:?} vs {h2:?}"),
        })
    }

    /// The maps of `0 -> O_X(E - Y) -> O_X(E) -> O_Y(E) -> 0` on cohomology.
    pub fn restriction_sequence(&self, e: &TorusDivisor) -> Result<RestrictionSequence> {
        let n = self.dim();
        let source = e.minus(&self.y_divisor());
        let middle = |dims: &[usize]| dims[1..n].iter().any(|&h| h > 0);
        let src = self.ctx.scan(&source, middle)?;
        let tgt = self.ctx.scan(e, middle)?;
        let mut maps = Vec::new();
        for q in 1..n {
            let pick = |pieces: &[(Point, u64)]| -> Vec<(Point, u64)> {
                pieces
                    .iter()
                    .filter(|(_, mask)| self.ctx.piece_dims(*mask)[q] > 0)
                    .cloned()
                    .collect()
            };
            maps.push(self.ctx.multiplication_from_scans(
                &pick(&src.pieces),
                &pick(&tgt.pieces),
                e,
                &self.monomials,
                q,
            )?);
        }
        Ok(RestrictionSequence {
            source: src.totals,
            target: tgt.totals,
            middle: maps,
        })
    }

    /// Dense ranks of the multiplication map in every degree, including the
    /// ends, for cross-checking on small divisors.
    pub fn dense_ranks(&self, e: &TorusDivisor, seed: u64) -> Result<Vec<usize>> {
        let n = self.dim();
        let source = e.minus(&self.y_divisor());
        let coeffs = Self::coefficients(seed, self.monomials.len());
        (0..=n)
            .map(|q| {
                self.ctx
                    .multiplication_map(&source, e, &self.monomials, q)?
                    .rank_modp(&coeffs)
            })
            .collect()
    }

    /// `Ext^k` between two branes, over all `k` where some summand pair can
    /// contribute.
    pub fn ext(&self, a: &Brane, b: &Brane) -> Result<BTreeMap<i64, usize>> {
        let n = self.dim() as i64;
        let mut dims = BTreeMap::new();
        for (ea, s) in &a.summands {
            for (eb, t) in &b.summands {
                let h = self.hypersurface_cohomology(&eb.minus(ea))?;
                for kp in 0..n {
                    *dims.entry(kp - t + s).or_insert(0) += h[kp as usize];
                }
            }
        }
        Ok(dims)
    }

    pub fn ext_table(&self, a: &Brane, b: &Brane) -> Result<ExtTable> {
        Ok(ExtTable {
            a: a.clone(),
            b: b.clone(),
            dims: self.ext(a, b)?,
        })
    }

    /// `L^{⊗i}` as a brane.
    pub fn l_power(&self, i: i64) -> Brane {
        Brane::line(self.l_divisor().scaled(i))
    }

    pub fn check_brane(&self, b: &Brane) -> Result<()> {
        if b.summands.is_empty() {
            return Err(Error::invalid("brane has no summands"));
        }
        for (e, _) in &b.summands {
            if e.len() != self.ray_count() {
                return Err(Error::invalid(format!(
                    "divisor ({e}) has {} coefficients but the fan has {} rays",
                    e.len(),
                    self.ray_count()
                )));
            }
        }
        Ok(())
    }
}

/// Totals of the two outer terms of the restriction sequence and the
/// multiplication maps in the degrees where they need an actual rank.
pub struct RestrictionSequence {
    /// `h^q(O_X(E - Y))`.
    pub source: Vec<usize>,
    /// `h^q(O_X(E))`.
    pub target: Vec<usize>,
    /// Multiplication by `f` in degrees `1..n`.
    pub middle: Vec<crate::sheafcoh::GradedMap>,
}

impl RestrictionSequence {
    /// Ranks of multiplication by `f` in degrees `0..=n`.
    ///
    /// In degree 0 every piece is a monomial and `f` is a nonzero Laurent
    /// polynomial, so the map is injective: the lexicographically largest
    /// monomial of `f` gives distinct leading terms. Dually, in degree n the
    /// lexicographically smallest monomial hits every target piece from a
    /// distinct source piece, so the map is onto. Only the middle degrees
    /// depend on the coefficients.
    pub fn ranks(&self, seed: u64, monomial_count: usize) -> Result<Vec<usize>> {
        let n = self.source.len() - 1;
        let coeffs = HypersurfaceModel::coefficients(seed, monomial_count);
        let mut ranks = vec![0; n + 1];
        ranks[0] = self.source[0];
        if n > 0 {
            ranks[n] = self.target[n];
        }
        for (q, map) in (1..n).zip(&self.middle) {
            ranks[q] = map.rank_modp(&coeffs)?;
        }
        Ok(ranks)
    }

    /// `h^q(O_Y(E)) = dim coker mu_q + dim ker mu_{q+1}`.
    pub fn dims(&self, ranks: &[usize]) -> Vec<usize> {
        let n = self.source.len() - 1;
        (0..n)
            .map(|q| (self.target[q] - ranks[q]) + (self.source[q + 1] - ranks[q + 1]))
            .collect()
    }
}

/// A finite direct sum of shifted line bundles `⊕ O_Y(E_j)[t_j]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Brane {
    pub summands: Vec<(TorusDivisor, i64)>,
}

impl Brane {
    pub fn line(e: TorusDivisor) -> Self {
        Brane {
            summands: vec![(e, 0)],
        }
    }

    pub fn shifted(&self, by: i64) -> Self {
        Brane {
            summands: self.summands.iter().map(|(e, t)| (e.clone(), t + by)).collect(),
        }
    }

    pub fn direct_sum(&self, other: &Brane) -> Self {
        let mut summands = self.summands.clone();
        summands.extend(other.summands.iter().cloned());
        Brane { summands }
    }

    /// Twist every summand by `O_Y(d)`.
    pub fn twisted(&self, d: &TorusDivisor) -> Self {
        Brane {
            summands: self.summands.iter().map(|(e, t)| (e.plus(d), *t)).collect(),
        }
    }

    /// `"a1,...,ar"` for a line bundle; summands separated by `;`, each with
    /// an optional `@shift`.
    pub fn parse(text: &str) -> Result<Self> {
        let summands = text
            .split(';')
            .map(|part| {
                let (div, shift) = match part.split_once('@') {
                    Some((d, s)) => (
                        d,
                        s.trim()
                            .parse::<i64>()
                            .map_err(|_| Error::invalid(format!("bad shift '{s}'")))?,
                    ),
                    None => (part, 0),
                };
                Ok((TorusDivisor::parse(div)?, shift))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Brane { summands })
    }
}

impl fmt::Display for Brane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .summands
            .iter()
            .map(|(e, t)| if *t == 0 { e.to_string() } else { format!("{e}@{t}") })
            .collect();
        write!(f, "{}", parts.join(";"))
    }
}

impl Serialize for Brane {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `dim Ext^k(a, b)` by ghost number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtTable {
    pub a: Brane,
    pub b: Brane,
    pub dims: BTreeMap<i64, usize>,
}

impl ExtTable {
    pub fn dim(&self, k: i64) -> usize {
        self.dims.get(&k).copied().unwrap_or(0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,dim\n");
        for (k, d) in &self.dims {
            out.push_str(&format!("{k},{d}\n"));
        }
        out
    }
}

/// `dim Ext^k(A, B) = dim Ext^{n-1-k}(B, A)` for every `k`, where `forward`
/// is the table of `(A, B)` and `backward` the table of `(B, A)`.
pub fn serre_dual_check(forward: &ExtTable, backward: &ExtTable, n: usize) -> bool {
    let top = n as i64 - 1;
    let ks: Vec<i64> = forward
        .dims
        .keys()
        .copied()
        .chain(backward.dims.keys().map(|k| top - k))
        .collect();
    ks.into_iter().all(|k| forward.dim(k) == backward.dim(top - k))
}
