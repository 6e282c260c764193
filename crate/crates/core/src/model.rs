//! Value types shared by every module: finite complex sequences, piecewise
//! functions on (0, ∞), complex sectors and Lorentz exponent pairs.
//!
//! All intervals are left-open and right-closed: a piece ending at `x_j`
//! owns the point `x_j` itself.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Angular slack applied by [`Sector::contains`] unless a tolerance is given.
pub const DEFAULT_SECTOR_TOL: f64 = 1e-12;

/// An exponent in (0, ∞].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn finite(v: f64) -> Result<Self> {
        if v.is_finite() && v > 0.0 {
            Ok(Exponent::Finite(v))
        } else {
            Err(Error::InvalidParameter(format!("exponent must lie in (0, inf), got {v}")))
        }
    }

    /// `f64::INFINITY` maps to [`Exponent::Infinite`].
    pub fn from_f64(v: f64) -> Result<Self> {
        if v == f64::INFINITY {
            Ok(Exponent::Infinite)
        } else {
            Exponent::finite(v)
        }
    }

    /// Parses `inf`/`infinity` or a positive float.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinite),
            other => {
                let v: f64 =
                    other.parse().map_err(|_| Error::InvalidParameter(format!("cannot parse exponent '{s}'")))?;
                if v.is_infinite() && v > 0.0 {
                    Ok(Exponent::Infinite)
                } else {
                    Exponent::finite(v)
                }
            }
        }
    }

    /// 1/e with 1/∞ = 0.
    pub fn recip(self) -> f64 {
        match self {
            Exponent::Finite(v) => 1.0 / v,
            Exponent::Infinite => 0.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(v) => v,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    /// Conjugate exponent p' with 1/p + 1/p' = 1 (requires p > 1).
    pub fn conjugate(self) -> Result<Self> {
        match self {
            Exponent::Infinite => Ok(Exponent::Finite(1.0)),
            Exponent::Finite(p) if p > 1.0 => Ok(Exponent::Finite(p / (p - 1.0))),
            Exponent::Finite(1.0) => Ok(Exponent::Infinite),
            Exponent::Finite(p) => Err(Error::InvalidParameter(format!("conjugate exponent needs p >= 1, got {p}"))),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(v) => write!(f, "{v}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

/// The pair (p, q) indexing the weight `x^{1/p - 1/q}` and the Lorentz norms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PQ {
    pub p: Exponent,
    pub q: Exponent,
}

impl PQ {
    pub fn new(p: Exponent, q: Exponent) -> Self {
        PQ { p, q }
    }

    /// Shorthand for finite/infinite floats; `f64::INFINITY` maps to [`Exponent::Infinite`].
    pub fn from_f64(p: f64, q: f64) -> Result<Self> {
        Ok(PQ { p: Exponent::from_f64(p)?, q: Exponent::from_f64(q)? })
    }

    /// 0 < p < ∞ with any q, or p = q = ∞.
    pub fn is_lorentz_admissible(&self) -> bool {
        match (self.p, self.q) {
            (Exponent::Finite(_), _) => true,
            (Exponent::Infinite, Exponent::Infinite) => true,
            (Exponent::Infinite, Exponent::Finite(_)) => false,
        }
    }

    pub fn require_lorentz(&self) -> Result<()> {
        if self.is_lorentz_admissible() {
            Ok(())
        } else {
            Err(Error::NotLorentzAdmissible { p: self.p.value(), q: self.q.value() })
        }
    }

    /// Exponent of the weight: 1/p - 1/q.
    pub fn weight_exponent(&self) -> f64 {
        self.p.recip() - self.q.recip()
    }
}

impl fmt::Display for PQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

/// `w(p,q)(x) = x^{1/p - 1/q}`.
pub fn weight_pq(pq: PQ, x: f64) -> f64 {
    x.powf(pq.weight_exponent())
}

fn check_finite(values: &[Complex64]) -> Result<()> {
    match values.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

/// Complex sequence `a_1, ..., a_N` followed by zeros. Indexing is 1-based.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ComplexSeq {
    values: Vec<Complex64>,
}

impl ComplexSeq {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        check_finite(&values)?;
        Ok(ComplexSeq { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn from_parts(re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::LengthMismatch { what: "im", expected: re.len(), got: im.len() });
        }
        Self::new(re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        ComplexSeq { values: vec![Complex64::new(0.0, 0.0); n] }
    }

    /// Stored length N; entries past N are zero.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.values
    }

    /// `a_n` for n >= 1; zero for n > N.
    ///
    /// # Panics
    /// On `n == 0`.
    pub fn get(&self, n: usize) -> Complex64 {
        assert!(n >= 1, "sequences are indexed from 1");
        self.values.get(n - 1).copied().unwrap_or_default()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    pub fn scale(&self, lambda: Complex64) -> Self {
        ComplexSeq { values: self.values.iter().map(|z| z * lambda).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }
}

/// Sequence `c_{-N}, ..., c_N` (zero outside).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TwoSidedSeq {
    values: Vec<Complex64>,
}

impl TwoSidedSeq {
    /// `values` has odd length 2N+1; the middle entry is `c_0`.
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter("two-sided sequence needs odd length".into()));
        }
        check_finite(&values)?;
        Ok(TwoSidedSeq { values })
    }

    pub fn half_width(&self) -> usize {
        self.values.len() / 2
    }

    pub fn get(&self, n: i64) -> Complex64 {
        let h = self.half_width() as i64;
        if n.abs() > h {
            Complex64::default()
        } else {
            self.values[(n + h) as usize]
        }
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.values
    }
}

/// Piecewise-constant complex function: `values[j]` on `(x_{j-1}, x_j]`, `x_0 = 0`,
/// zero past the last breakpoint.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<Complex64>,
}

fn check_breakpoints(b: &[f64]) -> Result<()> {
    let mut prev = 0.0;
    for (i, &x) in b.iter().enumerate() {
        if !x.is_finite() || x <= prev {
            return Err(Error::BadBreakpoints(i));
        }
        prev = x;
    }
    Ok(())
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::LengthMismatch { what: "step values", expected: breakpoints.len(), got: values.len() });
        }
        check_breakpoints(&breakpoints)?;
        check_finite(&values)?;
        Ok(StepFunction { breakpoints, values })
    }

    pub fn from_real(breakpoints: Vec<f64>, values: &[f64]) -> Result<Self> {
        Self::new(breakpoints, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zero() -> Self {
        StepFunction::default()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Right end of the last piece (0 for the empty partition).
    pub fn support_end(&self) -> f64 {
        self.breakpoints.last().copied().unwrap_or(0.0)
    }

    /// Index of the piece owning `x`, or `None` past the support.
    pub fn piece_index(&self, x: f64) -> Option<usize> {
        let j = self.breakpoints.partition_point(|&b| b < x);
        (j < self.values.len()).then_some(j)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.piece_index(x).map(|j| self.values[j]).unwrap_or_default()
    }

    /// `(left, right, value)` triples.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, Complex64)> + '_ {
        self.breakpoints.iter().enumerate().map(move |(j, &r)| {
            let l = if j == 0 { 0.0 } else { self.breakpoints[j - 1] };
            (l, r, self.values[j])
        })
    }

    pub fn scale(&self, lambda: Complex64) -> Self {
        StepFunction { breakpoints: self.breakpoints.clone(), values: self.values.iter().map(|v| v * lambda).collect() }
    }

    /// Pointwise combination on the common refinement of both partitions.
    pub fn combine(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let mut knots: Vec<f64> = self.breakpoints.iter().chain(other.breakpoints.iter()).copied().collect();
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let values = knots.iter().map(|&x| op(self.eval(x), other.eval(x))).collect();
        StepFunction { breakpoints: knots, values }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0 && v.re >= 0.0)
    }
}

/// `f(x) = a_{⌈x⌉}` on (0, N], zero beyond.
pub fn sequence_to_step(a: &ComplexSeq) -> StepFunction {
    StepFunction { breakpoints: (1..=a.len()).map(|n| n as f64).collect(), values: a.as_slice().to_vec() }
}

/// `c · x^γ` on the first interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerHead {
    pub c: f64,
    pub gamma: f64,
}

impl PowerHead {
    pub fn new(c: f64, gamma: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!("head coefficient must be > 0, got {c}")));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter(format!("head exponent must be > 0, got {gamma}")));
        }
        Ok(PowerHead { c, gamma })
    }
}

/// One piece `coef · x^exponent` on `(previous end, end]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerPiece {
    pub end: f64,
    pub coef: Complex64,
    pub exponent: f64,
}

impl PowerPiece {
    pub fn value(&self, x: f64) -> Complex64 {
        if self.exponent == 0.0 {
            self.coef
        } else {
            self.coef * x.powf(self.exponent)
        }
    }

    pub fn is_constant(&self) -> bool {
        self.exponent == 0.0 || self.coef == Complex64::default()
    }
}

/// Piecewise power function: a step function whose first piece may be a power
/// head `c·x^γ`. Products and power shifts of such functions can carry power
/// pieces further out, so every piece is stored as `coef · x^exponent`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HeadedStepFunction {
    pieces: Vec<PowerPiece>,
}

impl HeadedStepFunction {
    /// With a head, `values` describes the pieces after the head and has one entry
    /// fewer than `breakpoints`; `breakpoints[0]` is where the head ends.
    pub fn new(head: Option<PowerHead>, breakpoints: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        check_breakpoints(&breakpoints)?;
        check_finite(&values)?;
        let expected = if head.is_some() { breakpoints.len().saturating_sub(1) } else { breakpoints.len() };
        if values.len() != expected || (head.is_some() && breakpoints.is_empty()) {
            return Err(Error::LengthMismatch { what: "headed step values", expected, got: values.len() });
        }
        let mut pieces = Vec::with_capacity(breakpoints.len());
        let mut vals = values.into_iter();
        for (j, &end) in breakpoints.iter().enumerate() {
            match (j, head) {
                (0, Some(h)) => pieces.push(PowerPiece { end, coef: Complex64::new(h.c, 0.0), exponent: h.gamma }),
                _ => pieces.push(PowerPiece { end, coef: vals.next().unwrap(), exponent: 0.0 }),
            }
        }
        Ok(HeadedStepFunction { pieces })
    }

    pub fn from_pieces(pieces: Vec<PowerPiece>) -> Result<Self> {
        let ends: Vec<f64> = pieces.iter().map(|p| p.end).collect();
        check_breakpoints(&ends)?;
        for (i, p) in pieces.iter().enumerate() {
            if !p.coef.re.is_finite() || !p.coef.im.is_finite() || !p.exponent.is_finite() {
                return Err(Error::NonFinite(i));
            }
        }
        Ok(HeadedStepFunction { pieces })
    }

    pub fn pieces(&self) -> &[PowerPiece] {
        &self.pieces
    }

    /// The head, when the first piece is a genuine power `c·x^γ` with c > 0, γ > 0.
    pub fn head(&self) -> Option<PowerHead> {
        self.pieces.first().and_then(|p| {
            (p.exponent > 0.0 && p.coef.im == 0.0 && p.coef.re > 0.0)
                .then_some(PowerHead { c: p.coef.re, gamma: p.exponent })
        })
    }

    pub fn support_end(&self) -> f64 {
        self.pieces.last().map(|p| p.end).unwrap_or(0.0)
    }

    /// `[0, x_1, ..., x_M]`.
    pub fn ends(&self) -> Vec<f64> {
        std::iter::once(0.0).chain(self.pieces.iter().map(|p| p.end)).collect()
    }

    pub fn piece_index(&self, x: f64) -> Option<usize> {
        let j = self.pieces.partition_point(|p| p.end < x);
        (j < self.pieces.len()).then_some(j)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.piece_index(x).map(|j| self.pieces[j].value(x)).unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.coef == Complex64::default())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.pieces.iter().all(|p| p.coef.im == 0.0 && p.coef.re >= 0.0)
    }

    pub fn scale(&self, lambda: Complex64) -> Self {
        HeadedStepFunction { pieces: self.pieces.iter().map(|p| PowerPiece { coef: p.coef * lambda, ..*p }).collect() }
    }

    /// `x^delta · f(x)`.
    pub fn times_power(&self, delta: f64) -> Self {
        HeadedStepFunction {
            pieces: self.pieces.iter().map(|p| PowerPiece { exponent: p.exponent + delta, ..*p }).collect(),
        }
    }

    /// Pointwise product on the common refinement; exponents add.
    pub fn product(&self, other: &Self) -> Self {
        let mut knots: Vec<f64> = self.pieces.iter().chain(other.pieces.iter()).map(|p| p.end).collect();
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let end = self.support_end().min(other.support_end());
        let pieces = knots
            .into_iter()
            .filter(|&k| k <= end)
            .map(|k| {
                let a = self.pieces[self.piece_index(k).unwrap()];
                let b = other.pieces[other.piece_index(k).unwrap()];
                PowerPiece { end: k, coef: a.coef * b.coef, exponent: a.exponent + b.exponent }
            })
            .collect();
        HeadedStepFunction { pieces }
    }
}

impl From<&StepFunction> for HeadedStepFunction {
    fn from(f: &StepFunction) -> Self {
        HeadedStepFunction {
            pieces: f
                .breakpoints
                .iter()
                .zip(&f.values)
                .map(|(&end, &coef)| PowerPiece { end, coef, exponent: 0.0 })
                .collect(),
        }
    }
}

/// The closed cone `{z : |arg(e^{-iα} z)| <= φ} ∪ {0}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sector {
    alpha: f64,
    phi: f64,
    tol: f64,
}

impl Sector {
    pub fn new(alpha: f64, phi: f64, tol: f64) -> Result<Self> {
        if !(phi.is_finite() && (0.0..FRAC_PI_2).contains(&phi)) {
            return Err(Error::InvalidParameter(format!("half-aperture must lie in [0, pi/2), got {phi}")));
        }
        if !(alpha.is_finite() && tol.is_finite() && tol >= 0.0) {
            return Err(Error::InvalidParameter("sector angle and tolerance must be finite".into()));
        }
        Ok(Sector { alpha: alpha.rem_euclid(TAU), phi, tol })
    }

    pub fn with_default_tol(alpha: f64, phi: f64) -> Result<Self> {
        Self::new(alpha, phi, DEFAULT_SECTOR_TOL)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `e^{iα}`.
    pub fn direction(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.alpha)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        if z == Complex64::default() {
            return true;
        }
        (z * Complex64::from_polar(1.0, -self.alpha)).arg().abs() <= self.phi + self.tol
    }
}

/// `Σ|z_i|` and `|Σ z_i| / cos φ`; the first never exceeds the second for
/// values inside the sector.
pub fn reverse_triangle_sides(zs: &[Complex64], sector: &Sector) -> (f64, f64) {
    let total: f64 = zs.iter().map(|z| z.norm()).sum();
    let sum: Complex64 = zs.iter().sum();
    (total, sum.norm() / sector.phi().cos())
}
