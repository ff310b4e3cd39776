//! Spanning scans, vertex-operator rectangles and triangle clauses.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{Brane, HypersurfaceModel};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    /// `Ext^r(L^i, F)`.
    Forward,
    /// `Ext^l(F, L^i)`.
    Reverse,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanningReport {
    pub brane: Brane,
    pub mode: ScanMode,
    /// Ghost number: `r` in forward mode, `l` in reverse mode.
    pub r: i64,
    /// Threshold: `i0` in forward mode, `n0` in reverse mode.
    pub i0: i64,
    pub depth: usize,
    pub window: usize,
    /// `(i, dim)` for the chosen ghost number over `i in [-depth, 0]`.
    pub samples: Vec<(i64, usize)>,
}

/// Find a ghost number `r` and the largest `i0 <= 0` such that the Ext group
/// is nonzero for every sampled `i` in `[-depth, i0]`, with at least `window`
/// consecutive samples. Among ghost numbers the largest `i0` wins, then the
/// smallest `r`.
pub fn spanning_scan(
    h: &HypersurfaceModel,
    f: &Brane,
    depth: usize,
    window: usize,
    mode: ScanMode,
) -> Result<SpanningReport> {
    if window < 3 || depth < window {
        return Err(Error::invalid(format!(
            "need depth >= window >= 3, got depth {depth} and window {window}"
        )));
    }
    h.check_brane(f)?;
    let mut by_ghost: BTreeMap<i64, Vec<(i64, usize)>> = BTreeMap::new();
    for i in -(depth as i64)..=0 {
        let l = h.l_power(i);
        let dims = match mode {
            ScanMode::Forward => h.ext(&l, f)?,
            ScanMode::Reverse => h.ext(f, &l)?,
        };
        for (k, d) in dims {
            by_ghost.entry(k).or_default().push((i, d));
        }
    }
    let mut best: Option<(i64, i64)> = None;
    for (&r, samples) in &by_ghost {
        let run = samples.iter().take_while(|(_, d)| *d > 0).count();
        if run < window {
            continue;
        }
        let i0 = samples[run - 1].0;
        if best.is_none_or(|(_, b)| i0 > b) {
            best = Some((r, i0));
        }
    }
    let (r, i0) = best.ok_or(Error::ScanExhausted { depth })?;
    Ok(SpanningReport {
        brane: f.clone(),
        mode,
        r,
        i0,
        depth,
        window,
        samples: by_ghost.remove(&r).unwrap_or_default(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RectangleEntry {
    pub p: i64,
    pub q: i64,
    pub value: usize,
}

/// `dim H^q(Y, Ext-sheaf^p(L^b, F))` over the window `[r, s] x [0, n-1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RectangleTable {
    pub brane: Brane,
    pub b: i64,
    pub r: i64,
    pub s: i64,
    pub n: usize,
    /// Nonzero entries, ordered by `(p, q)`.
    pub entries: Vec<RectangleEntry>,
    /// `dim Ext^k(L^b, F)` computed directly.
    pub ext: BTreeMap<i64, usize>,
}

impl RectangleTable {
    /// Nonzero entries outside the rectangle.
    pub fn violations(&self) -> Vec<&RectangleEntry> {
        let top = self.n as i64 - 1;
        self.entries
            .iter()
            .filter(|e| e.p < self.r || e.p > self.s || e.q < 0 || e.q > top)
            .collect()
    }

    pub fn has_nonzero(&self) -> bool {
        !self.entries.is_empty()
    }

    /// The entries on each antidiagonal `p + q = k` add up to `Ext^k`.
    pub fn abuts_to_ext(&self) -> bool {
        let mut sums: BTreeMap<i64, usize> = BTreeMap::new();
        for e in &self.entries {
            *sums.entry(e.p + e.q).or_insert(0) += e.value;
        }
        let ext: BTreeMap<i64, usize> = self.ext.iter().filter(|(_, &d)| d > 0).map(|(&k, &d)| (k, d)).collect();
        sums == ext
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,q,value\n");
        for e in &self.entries {
            out.push_str(&format!("{},{},{}\n", e.p, e.q, e.value));
        }
        out
    }
}

/// For `F = ⊕ O_Y(E_j)[t_j]` the Ext sheaf `Ext^p(L^b, F)` is the sum of
/// `O_Y(E_j - b E_L)` over the summands with `p = -t_j`.
pub fn rectangle_table(h: &HypersurfaceModel, f: &Brane, b: i64) -> Result<RectangleTable> {
    h.check_brane(f)?;
    let n = h.dim();
    let twist = h.l_divisor().scaled(-b);
    let mut cells: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    for (e, t) in &f.summands {
        let dims = h.hypersurface_cohomology(&e.plus(&twist))?;
        for (q, &d) in dims.iter().enumerate() {
            *cells.entry((-t, q as i64)).or_insert(0) += d;
        }
    }
    let r = f.summands.iter().map(|(_, t)| -t).min().expect("nonempty brane");
    let s = f.summands.iter().map(|(_, t)| -t).max().expect("nonempty brane");
    let entries = cells
        .into_iter()
        .filter(|(_, v)| *v > 0)
        .map(|((p, q), value)| RectangleEntry { p, q, value })
        .collect();
    Ok(RectangleTable {
        brane: f.clone(),
        b,
        r,
        s,
        n,
        entries,
        ext: h.ext(&h.l_power(b), f)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClauseStatus {
    /// The dimension data confirms the clause.
    Verified,
    /// The spaces involved are zero, so the clause says nothing.
    Vacuous,
    /// The split instance has dimensions incompatible with the clause.
    Contradicted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClauseCheck {
    pub theorem: u8,
    pub clause: u8,
    pub j: i64,
    /// Dimension of the space on the triangle's middle object side.
    pub middle: usize,
    /// Dimension of the space on the third object side.
    pub third: usize,
    pub status: ClauseStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriangleReport {
    pub brane: Brane,
    pub a: i64,
    pub other: Brane,
    /// Ghost numbers with `Ext^r(F, L^a) != 0`.
    pub s: Vec<i64>,
    pub k1: i64,
    pub k2: i64,
    pub checks: Vec<ClauseCheck>,
}

impl TriangleReport {
    pub fn contradicted(&self) -> Vec<&ClauseCheck> {
        self.checks
            .iter()
            .filter(|c| c.status == ClauseStatus::Contradicted)
            .collect()
    }
}

fn ext_dim(map: &BTreeMap<i64, usize>, j: i64) -> usize {
    map.get(&j).copied().unwrap_or(0)
}

/// Check both triangle theorems on split instances.
///
/// First theorem: `L^a -> G -> H` with `G = L^a ⊕ H`, comparing
/// `Ext^j(F, G)` with `Ext^j(F, H)`. Second theorem: `F -> G' -> J` with
/// `J = H` and `G' = F ⊕ J`, comparing `Ext^j(J, L^a)` with
/// `Ext^j(G', L^a)`.
pub fn triangle_clauses(h: &HypersurfaceModel, f: &Brane, a: i64, other: &Brane) -> Result<TriangleReport> {
    h.check_brane(f)?;
    h.check_brane(other)?;
    let la = h.l_power(a);
    let f_la = h.ext(f, &la)?;
    let s: Vec<i64> = f_la.iter().filter(|(_, &d)| d > 0).map(|(&k, _)| k).collect();
    let (Some(&k1), Some(&k2)) = (s.first(), s.last()) else {
        return Err(Error::invalid(format!("Ext^*(F, L^{a}) vanishes; pick a from a spanning scan")));
    };

    let g = la.direct_sum(other);
    let f_g = h.ext(f, &g)?;
    let f_h = h.ext(f, other)?;
    let g2 = f.direct_sum(other);
    let j_la = h.ext(other, &la)?;
    let g2_la = h.ext(&g2, &la)?;

    let keys = |maps: &[&BTreeMap<i64, usize>]| -> (i64, i64) {
        let ks: Vec<i64> = maps.iter().flat_map(|m| m.keys().copied()).collect();
        (
            ks.iter().min().copied().unwrap_or(0).min(k1) - 2,
            ks.iter().max().copied().unwrap_or(0).max(k2) + 2,
        )
    };
    let mut checks = Vec::new();

    let (lo, hi) = keys(&[&f_g, &f_h, &f_la]);
    for j in lo..=hi {
        let (mid, third) = (ext_dim(&f_g, j), ext_dim(&f_h, j));
        if j < k1 - 1 || j > k2 {
            checks.push(equality(1, 1, j, mid, third));
        }
        if j == k1 || j == k2 - 1 {
            checks.push(inequality(1, 2, j, mid, third));
        }
        if j == k1 - 1 {
            // Ext^j(F, G) -> Ext^j(F, H) is injective.
            checks.push(bound(1, 3, j, mid, third, mid <= third, mid == 0));
        }
        if j == k2 {
            // Ext^j(F, G) -> Ext^j(F, H) is onto.
            checks.push(bound(1, 4, j, mid, third, mid >= third, third == 0));
        }
    }

    let (lo, hi) = keys(&[&j_la, &g2_la, &f_la]);
    for j in lo..=hi {
        let (mid, third) = (ext_dim(&g2_la, j), ext_dim(&j_la, j));
        if j < k1 || j > k2 + 1 {
            checks.push(equality(2, 1, j, mid, third));
        }
        if j == k1 + 1 || j == k2 {
            checks.push(inequality(2, 2, j, mid, third));
        }
        if j == k1 {
            // Ext^j(J, L^a) -> Ext^j(G', L^a) is injective.
            checks.push(bound(2, 3, j, mid, third, third <= mid, third == 0));
        }
        if j == k2 + 1 {
            // Ext^j(J, L^a) -> Ext^j(G', L^a) is onto.
            checks.push(bound(2, 4, j, mid, third, third >= mid, mid == 0));
        }
    }

    Ok(TriangleReport {
        brane: f.clone(),
        a,
        other: other.clone(),
        s,
        k1,
        k2,
        checks,
    })
}

fn equality(theorem: u8, clause: u8, j: i64, middle: usize, third: usize) -> ClauseCheck {
    let status = match (middle == third, middle == 0) {
        (false, _) => ClauseStatus::Contradicted,
        (true, true) => ClauseStatus::Vacuous,
        (true, false) => ClauseStatus::Verified,
    };
    ClauseCheck {
        theorem,
        clause,
        j,
        middle,
        third,
        status,
    }
}

fn inequality(theorem: u8, clause: u8, j: i64, middle: usize, third: usize) -> ClauseCheck {
    ClauseCheck {
        theorem,
        clause,
        j,
        middle,
        third,
        status: if middle != third {
            ClauseStatus::Verified
        } else {
            ClauseStatus::Contradicted
        },
    }
}

fn bound(theorem: u8, clause: u8, j: i64, middle: usize, third: usize, holds: bool, vacuous: bool) -> ClauseCheck {
    let status = if !holds {
        ClauseStatus::Contradicted
    } else if vacuous {
        ClauseStatus::Vacuous
    } else {
        ClauseStatus::Verified
    };
    ClauseCheck {
        theorem,
        clause,
        j,
        middle,
        third,
        status,
    }
}
