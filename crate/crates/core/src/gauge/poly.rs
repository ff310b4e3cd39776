//! Homogeneous polynomials with rational coefficients.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Defining equation of a hypersurface in projective space, as a map from
/// exponent vectors to nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypersurfaceEquation {
    vars: usize,
    degree: u32,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    exps: Vec<u32>,
    coeff: [i64; 2],
}

#[derive(Serialize, Deserialize)]
struct PolyDoc {
    vars: usize,
    degree: u32,
    terms: Vec<TermDoc>,
}

impl HypersurfaceEquation {
    pub fn new(vars: usize, terms: impl IntoIterator<Item = (Vec<u32>, BigRational)>) -> Result<Self> {
        let mut map: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        let mut degree = None;
        for (exps, c) in terms {
            if exps.len() != vars {
                return Err(Error::invalid(format!("term has {} exponents, expected {vars}", exps.len())));
            }
            let d: u32 = exps.iter().sum();
            match degree {
                None => degree = Some(d),
                Some(prev) if prev != d => {
                    return Err(Error::invalid("polynomial is not homogeneous"));
                }
                _ => {}
            }
            *map.entry(exps).or_insert_with(BigRational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        if map.is_empty() {
            return Err(Error::invalid("polynomial is zero"));
        }
        Ok(HypersurfaceEquation {
            vars,
            degree: degree.expect("nonempty"),
            terms: map,
        })
    }

    /// `x_0^d + ... + x_k^d`.
    pub fn fermat(vars: usize, degree: u32) -> Self {
        let terms = (0..vars).map(|i| {
            let mut e = vec![0; vars];
            e[i] = degree;
            (e, BigRational::from_integer(1.into()))
        });
        Self::new(vars, terms).expect("nonzero homogeneous")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PolyDoc = serde_json::from_str(text)?;
        let terms = doc
            .terms
            .into_iter()
            .map(|t| {
                if t.coeff[1] == 0 {
                    return Err(Error::invalid("zero denominator"));
                }
                Ok((t.exps, BigRational::new(t.coeff[0].into(), t.coeff[1].into())))
            })
            .collect::<Result<Vec<_>>>()?;
        let eq = Self::new(doc.vars, terms)?;
        if eq.degree != doc.degree {
            return Err(Error::invalid(format!(
                "declared degree {} but terms have degree {}",
                doc.degree, eq.degree
            )));
        }
        Ok(eq)
    }

    pub fn to_json(&self) -> Result<String> {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let num = c.numer().to_i64().ok_or(Error::Overflow("coefficient"))?;
                let den = c.denom().to_i64().ok_or(Error::Overflow("coefficient"))?;
                Ok(TermDoc {
                    exps: e.clone(),
                    coeff: [num, den],
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(serde_json::to_string(&PolyDoc {
            vars: self.vars,
            degree: self.degree,
            terms,
        })?)
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, BigRational> {
        &self.terms
    }

    pub fn evaluate(&self, x: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let c = c.to_f64().unwrap_or(f64::NAN);
                e.iter().zip(x).fold(Complex64::new(c, 0.0), |acc, (&k, xi)| acc * xi.powu(k))
            })
            .sum()
    }

    /// Coefficients (lowest degree first) of `s -> P(s p + q)`.
    pub fn restrict_to_line(&self, p: &[Complex64], q: &[Complex64]) -> Vec<Complex64> {
        let d = self.degree as usize;
        let mut out = vec![Complex64::zero(); d + 1];
        for (e, c) in &self.terms {
            let mut acc = vec![Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)];
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    acc = mul_univariate(&acc, &[q[i], p[i]]);
                }
            }
            for (o, a) in out.iter_mut().zip(acc) {
                *o += a;
            }
        }
        out
    }

    /// Substitute `x_i = sum_j a[i][j] y_j`.
    pub fn linear_substitution(&self, a: &[Vec<BigRational>]) -> Result<Self> {
        if a.len() != self.vars || a.iter().any(|r| r.len() != self.vars) {
            return Err(Error::invalid("substitution matrix has the wrong shape"));
        }
        let linear: Vec<BTreeMap<Vec<u32>, BigRational>> = a
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(j, c)| {
                        let mut e = vec![0; self.vars];
                        e[j] = 1;
                        (e, c.clone())
                    })
                    .collect()
            })
            .collect();
        let mut total: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut acc: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
            acc.insert(vec![0; self.vars], c.clone());
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    acc = mul_multivariate(&acc, &linear[i]);
                }
            }
            for (e, c) in acc {
                *total.entry(e).or_insert_with(BigRational::zero) += c;
            }
        }
        Self::new(self.vars, total)
    }
}

fn mul_univariate(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn mul_multivariate(
    a: &BTreeMap<Vec<u32>, BigRational>,
    b: &BTreeMap<Vec<u32>, BigRational>,
) -> BTreeMap<Vec<u32>, BigRational> {
    let mut out: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert_with(BigRational::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

#[cfg(test)]
pub(crate) fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}
