//! The Chern connection of the Fubini-Study metric on `O(1)`, its curvature,
//! and the Yang-Mills value `4 pi^2 deg(Y)` for hypersurfaces.
//!
//! Sign convention: on the chart `z_k != 0` with `v_j = z_j / z_k`, the
//! metric is `h = 1 / (1 + |v|^2)`, the connection form is
//! `alpha = d log h` restricted to type (1,0), and the curvature
//! `F = d alpha = sum F_{i j̄} dv_i ∧ dv̄_j` has
//! `F_{i j̄} = (delta_ij (1 + |v|^2) - v̄_i v_j) / (1 + |v|^2)^2`.
//! With this convention `F` is a positive Hermitian matrix.

mod poly;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

pub use poly::HypersurfaceEquation;

/// Relative size below which a leading coefficient counts as zero.
const LEADING_TOLERANCE: f64 = 1e-12;
/// Roots closer than this (relative) are one root with multiplicity.
pub const CLUSTER_TOLERANCE: f64 = 1e-7;
/// Relative backward error accepted for an eigenvalue to count as a root.
const RESIDUAL_TOLERANCE: f64 = 1e-6;
/// Largest fraction of trials allowed to disagree with the modal count.
pub const DISAGREEMENT_LIMIT: f64 = 0.05;

/// Inhomogeneous coordinates `v` on the chart `z_chart != 0` of `P^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinePoint {
    pub chart: usize,
    pub v: Vec<Complex64>,
}

impl AffinePoint {
    pub fn new(chart: usize, v: Vec<Complex64>) -> Self {
        AffinePoint { chart, v }
    }

    pub fn from_homogeneous(z: &[Complex64], chart: usize) -> Result<Self> {
        let zk = *z.get(chart).ok_or_else(|| Error::invalid("chart index out of range"))?;
        if zk.is_zero() {
            return Err(Error::invalid(format!("point is not on chart {chart}")));
        }
        let v = z
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != chart)
            .map(|(_, zj)| zj / zk)
            .collect();
        Ok(AffinePoint { chart, v })
    }

    pub fn to_homogeneous(&self) -> Vec<Complex64> {
        let mut z = self.v.clone();
        z.insert(self.chart, Complex64::new(1.0, 0.0));
        z
    }

    fn norm_sqr(&self) -> f64 {
        self.v.iter().map(Complex64::norm_sqr).sum()
    }
}

/// Coefficients of `dv_1, ..., dv_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionSample {
    pub coeffs: Vec<Complex64>,
}

impl ConnectionSample {
    pub fn evaluate(&self, dv: &[Complex64]) -> Complex64 {
        self.coeffs.iter().zip(dv).map(|(a, b)| a * b).sum()
    }
}

/// `F_{i j̄}`, the coefficient of `dv_i ∧ dv̄_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureSample {
    pub matrix: Vec<Vec<Complex64>>,
}

impl CurvatureSample {
    /// `sum F_{i j̄} a_i conj(b_j)`.
    pub fn evaluate(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::zero();
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, f) in row.iter().enumerate() {
                acc += f * a[i] * b[j].conj();
            }
        }
        acc
    }

    pub fn max_hermitian_defect(&self) -> f64 {
        let n = self.matrix.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.matrix[i][j] - self.matrix[j][i].conj()).norm());
            }
        }
        worst
    }
}

/// `-v̄_i / (1 + |v|^2)`.
pub fn connection_form_at(p: &AffinePoint) -> ConnectionSample {
    let s = 1.0 + p.norm_sqr();
    ConnectionSample {
        coeffs: p.v.iter().map(|vi| -vi.conj() / s).collect(),
    }
}

pub fn curvature_form_at(p: &AffinePoint) -> CurvatureSample {
    let s = 1.0 + p.norm_sqr();
    let n = p.v.len();
    let matrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let delta = if i == j { s } else { 0.0 };
                    (Complex64::new(delta, 0.0) - p.v[i].conj() * p.v[j]) / (s * s)
                })
                .collect()
        })
        .collect();
    CurvatureSample { matrix }
}

/// `dv^{(k)}[w]` for a homogeneous tangent vector `w` at `z`:
/// `(w_j z_k - z_j w_k) / z_k^2` for `j != k`, in chart order.
pub fn chart_differential(z: &[Complex64], w: &[Complex64], chart: usize) -> Vec<Complex64> {
    let zk = z[chart];
    (0..z.len())
        .filter(|&j| j != chart)
        .map(|j| (w[j] * zk - z[j] * w[chart]) / (zk * zk))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeEstimate {
    /// Modal number of roots on a line, counted with multiplicity.
    pub degree: usize,
    pub trials: usize,
    /// Trials whose count equals the mode.
    pub agreeing: usize,
    /// Some trial found clustered roots.
    pub non_reduced: bool,
}

/// Count roots of `eq` on random lines `s p + q`.
pub fn degree_probe(eq: &HypersurfaceEquation, trials: usize, seed: u64) -> Result<DegreeEstimate> {
    if trials == 0 {
        return Err(Error::invalid("degree_probe needs at least one trial"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = Vec::with_capacity(trials);
    let mut non_reduced = false;
    for _ in 0..trials {
        let mut point = || -> Vec<Complex64> {
            (0..eq.vars())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        };
        let (p, q) = (point(), point());
        let (count, distinct) = count_roots(&eq.restrict_to_line(&p, &q));
        non_reduced |= distinct < count;
        counts.push(count);
    }
    let mut tally = std::collections::BTreeMap::new();
    for &c in &counts {
        *tally.entry(c).or_insert(0usize) += 1;
    }
    let (&degree, &agreeing) = tally
        .iter()
        .max_by_key(|&(c, n)| (*n, std::cmp::Reverse(*c)))
        .expect("at least one trial");
    let disagreeing = (trials - agreeing) as f64 / trials as f64;
    if disagreeing > DISAGREEMENT_LIMIT {
        return Err(Error::NumericalInstability(format!(
            "root counts disagree on {:.1}% of {trials} lines: {tally:?}",
            100.0 * disagreeing
        )));
    }
    Ok(DegreeEstimate {
        degree,
        trials,
        agreeing,
        non_reduced,
    })
}

/// Roots of a univariate polynomial (lowest degree first): the count with
/// multiplicity and the number of distinct clusters.
fn count_roots(coeffs: &[Complex64]) -> (usize, usize) {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return (0, 0);
    }
    let c: Vec<Complex64> = coeffs.iter().map(|x| x / scale).collect();
    let Some(top) = c.iter().rposition(|x| x.norm() > LEADING_TOLERANCE) else {
        return (0, 0);
    };
    if top == 0 {
        return (0, 0);
    }
    let lead = c[top];
    let companion = DMatrix::from_fn(top, top, |i, j| {
        if j == top - 1 {
            -c[i] / lead
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::zero()
        }
    });
    let Some(eigs) = companion.schur().eigenvalues() else {
        return (0, 0);
    };
    let roots: Vec<Complex64> = eigs
        .iter()
        .copied()
        .filter(|&z| {
            let value = c[..=top].iter().rev().fold(Complex64::zero(), |acc, a| acc * z + a);
            let size: f64 = c[..=top].iter().enumerate().map(|(k, a)| a.norm() * z.norm().powi(k as i32)).sum();
            value.norm() <= RESIDUAL_TOLERANCE * size
        })
        .collect();
    let mut clusters: Vec<Complex64> = Vec::new();
    for z in &roots {
        if !clusters
            .iter()
            .any(|w| (z - w).norm() <= CLUSTER_TOLERANCE * z.norm().max(1.0))
        {
            clusters.push(*z);
        }
    }
    (roots.len(), clusters.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum YmVerification {
    /// Degree confirmed by root counting on lines.
    Probe,
    /// Value from the degree identity alone.
    FormulaOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct YmReport {
    pub degree: u32,
    pub ambient_dim: usize,
    pub value: f64,
    pub verification: YmVerification,
    pub probe: Option<DegreeEstimate>,
}

/// `YM = 4 pi^2 vol(Y)` with `vol(Y) = deg(Y)` under `∫_line ω_FS = 1`.
/// Curves in `P^2` get a root-counting cross-check of the degree.
pub fn ym_value(eq: &HypersurfaceEquation, trials: usize, seed: u64) -> Result<YmReport> {
    let ambient_dim = eq.vars().saturating_sub(1);
    let degree = eq.degree();
    let (verification, probe) = if ambient_dim == 2 {
        let est = degree_probe(eq, trials, seed)?;
        if est.degree != degree as usize {
            return Err(Error::NumericalInstability(format!(
                "probe found {} roots per line for a degree-{degree} equation",
                est.degree
            )));
        }
        (YmVerification::Probe, Some(est))
    } else {
        (YmVerification::FormulaOnly, None)
    };
    Ok(YmReport {
        degree,
        ambient_dim,
        value: 4.0 * PI * PI * degree as f64,
        verification,
        probe,
    })
}

#[cfg(test)]
mod tests {
    use super::poly::rational;
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_point(rng: &mut ChaCha8Rng, n: usize) -> AffinePoint {
        AffinePoint::new(0, (0..n).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect())
    }

    #[test]
    fn connection_examples() {
        let zero = AffinePoint::new(0, vec![Complex64::zero(); 3]);
        assert!(connection_form_at(&zero).coeffs.iter().all(|x| x.is_zero()));
        let e1 = AffinePoint::new(0, vec![c(1.0, 0.0), Complex64::zero(), Complex64::zero()]);
        assert_eq!(connection_form_at(&e1).coeffs, vec![c(-0.5, 0.0), Complex64::zero(), Complex64::zero()]);
        let far = AffinePoint::new(0, vec![c(10.0, 0.0), Complex64::zero()]);
        assert!((connection_form_at(&far).coeffs[0] - c(-10.0 / 101.0, 0.0)).norm() < 1e-15);
        assert!((connection_form_at(&far).coeffs[0].re + 0.0990).abs() < 1e-4);
    }

    #[test]
    fn curvature_examples() {
        let zero = AffinePoint::new(0, vec![Complex64::zero(); 3]);
        let f = curvature_form_at(&zero);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(f.matrix[i][j], c(if i == j { 1.0 } else { 0.0 }, 0.0));
            }
        }
        let e1 = AffinePoint::new(0, vec![c(1.0, 0.0), Complex64::zero(), Complex64::zero()]);
        let f = curvature_form_at(&e1);
        assert_eq!(f.matrix[0][0], c(0.25, 0.0));
        assert_eq!(f.matrix[1][1], c(0.5, 0.0));
        assert_eq!(f.matrix[2][2], c(0.5, 0.0));
    }

    /// Wirtinger derivatives by central differences.
    fn d_holo(f: impl Fn(&AffinePoint) -> Complex64, p: &AffinePoint, k: usize, conj: bool) -> Complex64 {
        let h = 1e-5;
        let shift = |delta: Complex64| {
            let mut q = p.clone();
            q.v[k] += delta;
            f(&q)
        };
        let dx = (shift(c(h, 0.0)) - shift(c(-h, 0.0))) / (2.0 * h);
        let dy = (shift(c(0.0, h)) - shift(c(0.0, -h))) / (2.0 * h);
        let i = c(0.0, 1.0);
        if conj {
            (dx + i * dy) / 2.0
        } else {
            (dx - i * dy) / 2.0
        }
    }

    #[test]
    fn curvature_is_d_of_connection() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = random_point(&mut rng, 3);
            let f = curvature_form_at(&p);
            for i in 0..3 {
                for j in 0..3 {
                    let fd = -d_holo(|q| connection_form_at(q).coeffs[i], &p, j, true);
                    assert!((fd - f.matrix[i][j]).norm() < 1e-6);
                }
            }
            assert!(f.max_hermitian_defect() < 1e-15);
        }
    }

    #[test]
    fn bianchi_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let p = random_point(&mut rng, 3);
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        let a = d_holo(|q| curvature_form_at(q).matrix[i][j], &p, k, false);
                        let b = d_holo(|q| curvature_form_at(q).matrix[k][j], &p, i, false);
                        assert!((a - b).norm() < 1e-5);
                        let a = d_holo(|q| curvature_form_at(q).matrix[i][j], &p, k, true);
                        let b = d_holo(|q| curvature_form_at(q).matrix[i][k], &p, j, true);
                        assert!((a - b).norm() < 1e-5);
                    }
                }
            }
        }
    }

    #[test]
    fn chart_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let z: Vec<Complex64> = (0..4).map(|_| c(rng.gen_range(0.2..2.0), rng.gen_range(-2.0..2.0))).collect();
            let w: Vec<Complex64> = (0..4).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let w2: Vec<Complex64> = (0..4).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            for k in 0..4 {
                for l in 0..4 {
                    let (pk, pl) = (AffinePoint::from_homogeneous(&z, k).unwrap(), AffinePoint::from_homogeneous(&z, l).unwrap());
                    let (dk, dl) = (chart_differential(&z, &w, k), chart_differential(&z, &w, l));
                    let ak = connection_form_at(&pk).evaluate(&dk);
                    let al = connection_form_at(&pl).evaluate(&dl);
                    let expected = w[k] / z[k] - w[l] / z[l];
                    assert!((ak - al - expected).norm() < 1e-9);
                    let (ek, el) = (chart_differential(&z, &w2, k), chart_differential(&z, &w2, l));
                    let fk = curvature_form_at(&pk).evaluate(&dk, &ek);
                    let fl = curvature_form_at(&pl).evaluate(&dl, &el);
                    assert!((fk - fl).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn homogeneous_round_trip() {
        let z = vec![c(1.0, 1.0), c(2.0, 0.0), c(0.0, -1.0)];
        let p = AffinePoint::from_homogeneous(&z, 1).unwrap();
        let back = p.to_homogeneous();
        for (a, b) in back.iter().zip(&z) {
            assert!((a * z[1] - b).norm() < 1e-15);
        }
        assert!(AffinePoint::from_homogeneous(&[Complex64::zero(), c(1.0, 0.0)], 0).is_err());
    }

    #[test]
    fn probe_fermat_and_line() {
        let est = degree_probe(&HypersurfaceEquation::fermat(3, 3), 100, 1).unwrap();
        assert_eq!(est.degree, 3);
        assert!(!est.non_reduced);
        let line = HypersurfaceEquation::new(3, [(vec![1, 0, 0], rational(1, 1)), (vec![0, 0, 1], rational(-2, 3))]).unwrap();
        assert_eq!(degree_probe(&line, 50, 2).unwrap().degree, 1);
        assert!(degree_probe(&line, 0, 2).is_err());
    }

    #[test]
    fn probe_non_reduced() {
        let eq = HypersurfaceEquation::new(3, [(vec![2, 0, 1], rational(1, 1))]).unwrap();
        let est = degree_probe(&eq, 100, 4).unwrap();
        assert_eq!(est.degree, 3);
        assert!(est.non_reduced);
    }

    #[test]
    fn ym_values() {
        let r = ym_value(&HypersurfaceEquation::fermat(3, 3), 200, 7).unwrap();
        assert_eq!(r.value, 12.0 * PI * PI);
        assert!((r.value - 118.435).abs() < 1e-3);
        assert_eq!(r.verification, YmVerification::Probe);
        let line = HypersurfaceEquation::new(3, [(vec![0, 1, 0], rational(1, 1))]).unwrap();
        assert_eq!(ym_value(&line, 20, 7).unwrap().value, 4.0 * PI * PI);
        let quartic = ym_value(&HypersurfaceEquation::fermat(4, 4), 20, 7).unwrap();
        assert_eq!(quartic.verification, YmVerification::FormulaOnly);
        assert_eq!(quartic.value, 16.0 * PI * PI);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn probe_invariant_under_coordinate_change(
            entries in prop::collection::vec(-3i64..=3, 9),
            seed in 0u64..1000,
        ) {
            let a: Vec<Vec<num_rational::BigRational>> = (0..3)
                .map(|i| (0..3).map(|j| rational(entries[3 * i + j] + if i == j { 10 } else { 0 }, 1)).collect())
                .collect();
            let eq = HypersurfaceEquation::fermat(3, 3).linear_substitution(&a).unwrap();
            prop_assert_eq!(degree_probe(&eq, 40, seed).unwrap().degree, 3);
        }
    }
}
