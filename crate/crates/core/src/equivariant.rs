//! Torus-fixed points and localization of equivariant first Chern classes.

use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::polytope::{CharacterPoint, Point};
use crate::toric::{NormalFan, TorusDivisor};

/// `sum c_i t_i` in `H^*(BT; Q) = Q[t_1, ..., t_n]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct LinearForm(pub Vec<i64>);

impl LinearForm {
    pub fn zero(n: usize) -> Self {
        LinearForm(vec![0; n])
    }

    pub fn plus(&self, other: &LinearForm) -> Self {
        LinearForm(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn minus(&self, other: &LinearForm) -> Self {
        LinearForm(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scaled(&self, k: i64) -> Self {
        LinearForm(self.0.iter().map(|a| a * k).collect())
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if wrote { "+" } else { "" };
            let mag = c.unsigned_abs();
            if mag == 1 {
                write!(f, "{sign}t{}", i + 1)?;
            } else {
                write!(f, "{sign}{mag}t{}", i + 1)?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A torus-fixed point, labeled by its maximal cone and the dual vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedPoint {
    pub cone: usize,
    pub vertex: Point,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalizationMode {
    Standard,
    Paper,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalizedEntry {
    pub fixed_point: Point,
    pub form: LinearForm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalizationResult {
    pub mode: LocalizationMode,
    pub entries: Vec<LocalizedEntry>,
}

impl LocalizationResult {
    pub fn forms(&self) -> Vec<&LinearForm> {
        self.entries.iter().map(|e| &e.form).collect()
    }
}

pub fn fixed_points(fan: &NormalFan) -> Vec<FixedPoint> {
    fan.cone_vertices()
        .iter()
        .enumerate()
        .map(|(cone, v)| FixedPoint {
            cone,
            vertex: v.clone(),
        })
        .collect()
}

/// Fixed points on the torus-invariant anticanonical divisor `sum D_rho`.
/// The fixed point of a cone lies on `D_rho` exactly when `rho` is one of
/// its rays.
pub fn fixed_points_on_boundary(fan: &NormalFan) -> Vec<FixedPoint> {
    fixed_points(fan)
        .into_iter()
        .filter(|p| !fan.cones()[p.cone].is_empty())
        .collect()
}

/// At the fixed point of `sigma` the class is the character `m_sigma` of
/// the Cartier data.
pub fn localize_standard(fan: &NormalFan, d: &TorusDivisor) -> Result<LocalizationResult> {
    let data = fan.cartier_data(d)?;
    let entries = fixed_points(fan)
        .into_iter()
        .zip(data.characters)
        .map(|(p, m)| LocalizedEntry {
            fixed_point: p.vertex,
            form: xi_star(&m),
        })
        .collect();
    Ok(LocalizationResult {
        mode: LocalizationMode::Standard,
        entries,
    })
}

/// The constant tuple with every entry `-(n - 1) sum t_i`.
pub fn localize_paper_mode(fan: &NormalFan, n: usize, restrict_to_y: bool) -> LocalizationResult {
    let c = LinearForm(vec![-(n as i64 - 1); fan.dim()]);
    let points = if restrict_to_y {
        fixed_points_on_boundary(fan)
    } else {
        fixed_points(fan)
    };
    LocalizationResult {
        mode: LocalizationMode::Paper,
        entries: points
            .into_iter()
            .map(|p| LocalizedEntry {
                fixed_point: p.vertex,
                form: c.clone(),
            })
            .collect(),
    }
}

/// Pullback of the generator along the character `m`: `sum m_i t_i`.
pub fn xi_star(m: &CharacterPoint) -> LinearForm {
    LinearForm(m.clone())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModeComparison {
    pub n: usize,
    pub standard: LocalizationResult,
    pub paper: LocalizationResult,
    /// Standard minus paper, per fixed point.
    pub differences: Vec<LocalizedEntry>,
    /// Whether one global character accounts for every difference.
    pub all_equal: bool,
}

/// Compare the standard localization of `(n - 1) D_Delta` with the paper's
/// constant tuple.
pub fn compare_modes(fan: &NormalFan, n: usize) -> Result<ModeComparison> {
    let standard = localize_standard(fan, &fan.polytope_divisor().scaled(n as i64 - 1))?;
    let paper = localize_paper_mode(fan, n, false);
    let differences: Vec<LocalizedEntry> = standard
        .entries
        .iter()
        .zip(&paper.entries)
        .map(|(s, p)| LocalizedEntry {
            fixed_point: s.fixed_point.clone(),
            form: s.form.minus(&p.form),
        })
        .collect();
    let all_equal = differences.windows(2).all(|w| w[0].form == w[1].form);
    Ok(ModeComparison {
        n,
        standard,
        paper,
        differences,
        all_equal,
    })
}
