//! Distribution functions and decreasing rearrangements.

use num_complex::Complex64;

use crate::model::{ComplexSeq, StepFunction};

/// Non-negative, non-increasing step function `f*`.
///
/// `values[j]` is held on `[x_{j-1}, x_j)`, which makes `f*` right-continuous
/// and equal to `inf{α : λ(|f| > α) <= x}` at every point, breakpoints
/// included. Adjacent equal values are merged and zero pieces dropped, so
/// the representation is canonical.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DecreasingStep {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl DecreasingStep {
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support_end(&self) -> f64 {
        self.breakpoints.last().copied().unwrap_or(0.0)
    }

    /// `f*(x)`, right-continuous.
    pub fn eval(&self, x: f64) -> f64 {
        let j = self.breakpoints.partition_point(|&b| b <= x);
        self.values.get(j).copied().unwrap_or(0.0)
    }

    /// `f*(x−)`; 0 past the support.
    pub fn left_limit(&self, x: f64) -> f64 {
        let j = self.breakpoints.partition_point(|&b| b < x);
        self.values.get(j).copied().unwrap_or(0.0)
    }

    /// The same function as a [`StepFunction`] (values on right-closed pieces,
    /// which differs from `f*` only at finitely many points).
    pub fn to_step(&self) -> StepFunction {
        StepFunction::new(self.breakpoints.clone(), self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
            .expect("canonical rearrangement has valid breakpoints")
    }

    /// Builds `f*` from `(modulus, measure)` pairs in any order.
    pub fn from_levels(mut levels: Vec<(f64, f64)>) -> Self {
        levels.retain(|&(v, len)| v > 0.0 && len > 0.0);
        levels.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut breakpoints = Vec::with_capacity(levels.len());
        let mut values: Vec<f64> = Vec::with_capacity(levels.len());
        let mut acc = 0.0;
        for (v, len) in levels {
            acc += len;
            if values.last() == Some(&v) {
                *breakpoints.last_mut().unwrap() = acc;
            } else {
                values.push(v);
                breakpoints.push(acc);
            }
        }
        DecreasingStep { breakpoints, values }
    }

    /// Rearrangement of samples `|f(x_i)|` taken on cells of equal width `h`.
    pub fn from_samples(moduli: &[f64], h: f64) -> Self {
        Self::from_levels(moduli.iter().map(|&v| (v, h)).collect())
    }

    /// `λ{f* > α}`.
    pub fn distribution(&self, alpha: f64) -> f64 {
        let j = self.values.partition_point(|&v| v > alpha);
        if j == 0 {
            0.0
        } else {
            self.breakpoints[j - 1]
        }
    }
}

/// `λ{x > 0 : |f(x)| > α}`.
pub fn distribution_step(f: &StepFunction, alpha: f64) -> f64 {
    f.pieces().filter(|(_, _, v)| v.norm() > alpha).map(|(l, r, _)| r - l).sum()
}

/// `#{n : |a_n| > α}`.
pub fn distribution_seq(a: &ComplexSeq, alpha: f64) -> usize {
    a.as_slice().iter().filter(|z| z.norm() > alpha).count()
}

/// Decreasing rearrangement of a step function.
pub fn rearrange_step(f: &StepFunction) -> DecreasingStep {
    DecreasingStep::from_levels(f.pieces().map(|(l, r, v)| (v.norm(), r - l)).collect())
}

/// Moduli sorted in non-increasing order (length preserved).
pub fn rearrange_seq(a: &ComplexSeq) -> Vec<f64> {
    let mut m = a.moduli();
    m.sort_by(|x, y| y.total_cmp(x));
    m
}

/// `lim_{y→x−} f*(y)`.
pub fn left_limit(fstar: &DecreasingStep, x: f64) -> f64 {
    fstar.left_limit(x)
}

/// `∫_0^∞ f g dx` for real-valued step functions (real parts used).
pub fn integral_product(f: &StepFunction, g: &StepFunction) -> f64 {
    f.combine(g, |a, b| Complex64::new(a.re * b.re, 0.0)).pieces().map(|(l, r, v)| v.re * (r - l)).sum()
}
