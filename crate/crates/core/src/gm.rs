//! Minimal general-monotonicity constants of sequences and piecewise
//! functions, with splices, averages and bell-shaped majorants.
//!
//! Every constant is the exact supremum of the defining ratio, reported with
//! the index or point where it is attained (or approached). Ratios `0/0`
//! are skipped; `x/0` with `x > 0` makes the constant infinite.
//!
//! Variation of a piecewise function over `[a, b]` counts the jump at a
//! breakpoint `p` iff `a <= p < b`, which is what pointwise variation gives
//! for functions that are continuous from the left.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ComplexSeq, HeadedStepFunction, PowerPiece, StepFunction, TwoSidedSeq};
use crate::par;
use crate::quad::Adaptive;

/// Which definition a constant was measured against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum GmClass {
    Gms,
    Gms1,
    Gms2,
    Gm,
    Gm1,
    Gm2,
    Qds(f64),
}

/// Where the supremum is attained or approached.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Witness {
    /// Sequence index n.
    Index(usize),
    /// Index pair (n, k) or (n, N').
    Pair(usize, usize),
    /// Point x; `right_limit` marks a supremum approached as `y → x+`.
    Point { x: f64, right_limit: bool },
    /// Interval `[x, m]` endpoints, each possibly a right limit.
    Interval { x: f64, x_right: bool, m: f64, m_right: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GmReport {
    pub class: GmClass,
    pub constant: f64,
    pub witness: Option<Witness>,
}

impl GmReport {
    pub fn is_finite(&self) -> bool {
        self.constant.is_finite()
    }
}

/// Running supremum of `num / den` with the 0/0 and x/0 conventions.
struct Sup {
    value: f64,
    witness: Option<Witness>,
}

impl Sup {
    fn new() -> Self {
        Sup { value: 0.0, witness: None }
    }

    fn offer(&mut self, num: f64, den: f64, w: Witness) {
        let r = ratio(num, den);
        if r > self.value || (self.witness.is_none() && r.is_nan()) {
            self.value = r;
            self.witness = Some(w);
        }
    }

    fn merge(&mut self, other: Sup) {
        if other.value > self.value {
            self.value = other.value;
            self.witness = other.witness;
        }
    }

    fn report(self, class: GmClass) -> GmReport {
        GmReport { class, constant: self.value, witness: self.witness }
    }
}

/// Numerators below this multiple of the scale are treated as rounding noise
/// when the denominator vanishes.
const ZERO_NOISE: f64 = 1e-13;

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

fn diffs(a: &ComplexSeq, upto: usize) -> Vec<f64> {
    // d[k] = |a_k - a_{k+1}| for k = 1..=upto, stored at index k
    let mut d = vec![0.0; upto + 1];
    for (k, dk) in d.iter_mut().enumerate().skip(1) {
        *dk = (a.get(k) - a.get(k + 1)).norm();
    }
    d
}

fn prefix(v: &[f64]) -> Vec<f64> {
    let mut p = Vec::with_capacity(v.len() + 1);
    p.push(0.0);
    let mut acc = 0.0;
    for &x in v {
        acc += x;
        p.push(acc);
    }
    p
}

/// `sup_n Σ_{k=n}^{2n-1} |a_k - a_{k+1}| / |a_n|`.
pub fn gms_constant(a: &ComplexSeq) -> GmReport {
    let n_max = a.len();
    let d = diffs(a, 2 * n_max);
    let p = prefix(&d);
    let mut sup = Sup::new();
    for n in 1..=n_max {
        let num = p[2 * n] - p[n];
        sup.offer(num, a.get(n).norm(), Witness::Index(n));
    }
    sup.report(GmClass::Gms)
}

/// `sup_{n <= k <= 2n} |a_k| / |a_n|`.
pub fn gms1_constant(a: &ComplexSeq) -> GmReport {
    let m = a.moduli();
    let n_max = m.len();
    let mut sup = Sup::new();
    // monotone deque of indices with decreasing moduli over the window [n, min(2n, N)]
    let mut deque = std::collections::VecDeque::new();
    let mut next = 1;
    for n in 1..=n_max {
        let hi = (2 * n).min(n_max);
        while next <= hi {
            while deque.back().is_some_and(|&j: &usize| m[j - 1] <= m[next - 1]) {
                deque.pop_back();
            }
            deque.push_back(next);
            next += 1;
        }
        while deque.front().is_some_and(|&j| j < n) {
            deque.pop_front();
        }
        let k = *deque.front().expect("window contains n");
        sup.offer(m[k - 1], m[n - 1], Witness::Pair(n, k));
    }
    sup.report(GmClass::Gms1)
}

/// `sup_{1 <= n < N' <= N+1} Σ_{k=n}^{N'-1} |a_k - a_{k+1}| / (|a_n| + Σ_{k=n+1}^{N'} |a_k|/k)`.
///
/// O(N²); rows n are scanned in parallel.
pub fn gms2_constant(a: &ComplexSeq) -> GmReport {
    let n_max = a.len();
    let d = diffs(a, n_max + 1);
    let pd = prefix(&d);
    let w: Vec<f64> = (0..=n_max + 1).map(|k| if k == 0 { 0.0 } else { a.get(k).norm() / k as f64 }).collect();
    let pw = prefix(&w);
    let m = a.moduli();
    let rows = par::map_range(1, n_max + 1, |n| {
        let mut sup = Sup::new();
        for top in n + 1..=n_max + 1 {
            let num = pd[top] - pd[n];
            let den = m[n - 1] + (pw[top + 1] - pw[n + 1]);
            sup.offer(num, den, Witness::Pair(n, top));
        }
        sup
    });
    let mut sup = Sup::new();
    for r in rows {
        sup.merge(r);
    }
    sup.report(GmClass::Gms2)
}

/// Whether `a_n n^{-β}` is non-increasing; entries must be real and nonnegative.
pub fn quasi_monotone_check(a: &ComplexSeq, beta: f64) -> Result<bool> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    if let Some(i) = a.as_slice().iter().position(|z| z.im != 0.0 || z.re < 0.0) {
        return Err(Error::Negative(i));
    }
    let scaled: Vec<f64> = a.as_slice().iter().enumerate().map(|(i, z)| z.re * ((i + 1) as f64).powf(-beta)).collect();
    Ok(scaled.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-15)))
}

/// A spliced sequence together with the constant it is guaranteed to satisfy.
#[derive(Clone, Debug)]
pub struct Splice {
    pub b: ComplexSeq,
    /// `|c_N| / |a_N|` (0 when both vanish).
    pub gamma: f64,
    /// `max(gms(a), gms(c))`.
    pub b_in: f64,
    /// `3B + 6B²γ`.
    pub predicted: f64,
    /// Measured `gms(b)`.
    pub measured: GmReport,
}

/// `b_n = a_n` for `n <= N`, `c_n` for `n > N`.
pub fn splice(a: &ComplexSeq, c: &ComplexSeq, n_split: usize) -> Result<Splice> {
    if n_split == 0 {
        return Err(Error::InvalidParameter("splice index must be >= 1".into()));
    }
    let (an, cn) = (a.get(n_split).norm(), c.get(n_split).norm());
    let gamma = if an == 0.0 {
        if cn != 0.0 {
            return Err(Error::DegenerateSplice);
        }
        0.0
    } else {
        cn / an
    };
    let len = n_split.max(c.len());
    let b = ComplexSeq::new((1..=len).map(|n| if n <= n_split { a.get(n) } else { c.get(n) }).collect())?;
    let b_in = gms_constant(a).constant.max(gms_constant(c).constant);
    let predicted = 3.0 * b_in + 6.0 * b_in * b_in * gamma;
    let measured = gms_constant(&b);
    Ok(Splice { b, gamma, b_in, predicted, measured })
}

/// `(1/n) Σ_{k=1}^n a_k`.
pub fn average_seq(a: &ComplexSeq, n: usize) -> Complex64 {
    assert!(n >= 1, "average needs n >= 1");
    let s: Complex64 = a.as_slice().iter().take(n).sum();
    s / n as f64
}

/// `m_n = max_{|k| >= |n|} |c_k|` for `n = -N..N`, in the same layout as the input.
pub fn bell_majorant(c: &TwoSidedSeq) -> Vec<f64> {
    let h = c.half_width();
    let mut radial = vec![0.0f64; h + 2];
    for r in (0..=h).rev() {
        let here = c.get(r as i64).norm().max(c.get(-(r as i64)).norm());
        radial[r] = here.max(radial[r + 1]);
    }
    (-(h as i64)..=h as i64).map(|n| radial[n.unsigned_abs() as usize]).collect()
}

/// Cumulative data of a piecewise power function used by the function-side constants.
struct Profile<'a> {
    pieces: &'a [PowerPiece],
    ends: Vec<f64>,
    jump_prefix: Vec<f64>,
    s_end: Vec<f64>,
    f_end: Vec<f64>,
    scale: f64,
}

fn piece_abs(p: &PowerPiece, x: f64) -> f64 {
    p.value(x).norm()
}

impl<'a> Profile<'a> {
    fn new(f: &'a HeadedStepFunction) -> Self {
        let pieces = f.pieces();
        let ends: Vec<f64> = pieces.iter().map(|p| p.end).collect();
        let jumps: Vec<f64> = (0..pieces.len())
            .map(|j| {
                let next = pieces.get(j + 1).map(|q| q.value(ends[j])).unwrap_or_default();
                (next - pieces[j].value(ends[j])).norm()
            })
            .collect();
        let mut prof =
            Profile { pieces, ends, jump_prefix: prefix(&jumps), s_end: Vec::new(), f_end: Vec::new(), scale: 0.0 };
        for j in 0..pieces.len() {
            let e = prof.ends[j];
            let s = prof.s_within(j, e);
            let fi = prof.f_within(j, e);
            prof.s_end.push(s);
            prof.f_end.push(fi);
        }
        prof.scale = pieces
            .iter()
            .enumerate()
            .map(|(j, p)| piece_abs(p, prof.ends[j]).max(piece_abs(p, prof.start(j).max(f64::MIN_POSITIVE))))
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max);
        prof
    }

    fn len(&self) -> usize {
        self.pieces.len()
    }

    fn start(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else {
            self.ends[j - 1]
        }
    }

    /// Index of the piece holding `y` (exact) or `y+` (right limit); `len()` past the support.
    fn index(&self, y: f64, right: bool) -> usize {
        if right {
            self.ends.partition_point(|&e| e <= y)
        } else {
            self.ends.partition_point(|&e| e < y)
        }
    }

    fn abs_at(&self, y: f64, right: bool) -> f64 {
        let j = self.index(y, right);
        self.pieces.get(j).map(|p| piece_abs(p, y)).unwrap_or(0.0)
    }

    /// Smooth variation antiderivative on piece j.
    fn s_within(&self, j: usize, y: f64) -> f64 {
        let p = &self.pieces[j];
        let c = p.coef.norm();
        let g = p.exponent;
        if c == 0.0 || g == 0.0 {
            return if j == 0 { 0.0 } else { self.s_end[j - 1] };
        }
        let anti = |t: f64| c * g.signum() * t.powf(g);
        if j == 0 {
            anti(y)
        } else {
            self.s_end[j - 1] + anti(y) - anti(self.ends[j - 1])
        }
    }

    /// Antiderivative of `|f(t)|/t` on piece j.
    fn f_within(&self, j: usize, y: f64) -> f64 {
        let p = &self.pieces[j];
        let c = p.coef.norm();
        let g = p.exponent;
        let anti = |t: f64| if g == 0.0 { c * t.ln() } else { c * t.powf(g) / g };
        if c == 0.0 {
            return if j == 0 { 0.0 } else { self.f_end[j - 1] };
        }
        if j == 0 {
            anti(y)
        } else {
            self.f_end[j - 1] + anti(y) - anti(self.ends[j - 1])
        }
    }

    fn smooth(&self, y: f64) -> f64 {
        let j = self.index(y, false);
        if j >= self.len() {
            *self.s_end.last().unwrap_or(&0.0)
        } else {
            self.s_within(j, y)
        }
    }

    fn log_integral(&self, y: f64) -> f64 {
        let j = self.index(y, false);
        if j >= self.len() {
            *self.f_end.last().unwrap_or(&0.0)
        } else {
            self.f_within(j, y)
        }
    }

    fn jumps_before(&self, y: f64, right: bool) -> f64 {
        self.jump_prefix[self.index(y, right)]
    }

    /// `V_f([x, m])`, each endpoint exact or a right limit.
    fn variation(&self, x: f64, x_right: bool, m: f64, m_right: bool) -> f64 {
        let v = self.smooth(m) - self.smooth(x) + self.jumps_before(m, m_right) - self.jumps_before(x, x_right);
        v.max(0.0)
    }

    /// `sup |f|` over `[x, 2x]` (exact) or over `x+ .. 2x+` (right limit).
    fn window_sup(&self, x: f64, right: bool) -> f64 {
        let b = 2.0 * x;
        let i0 = self.index(x, right);
        let i1 = self.index(b, false).min(self.len().saturating_sub(1));
        let mut sup: f64 = 0.0;
        for j in i0..=i1 {
            if j >= self.len() {
                break;
            }
            let lo = x.max(self.start(j));
            let hi = b.min(self.ends[j]);
            if lo > hi {
                continue;
            }
            let p = &self.pieces[j];
            sup = sup.max(piece_abs(p, lo.max(f64::MIN_POSITIVE))).max(piece_abs(p, hi));
        }
        if right {
            sup = sup.max(self.abs_at(b, true));
        }
        sup
    }

    fn is_power(&self, j: usize) -> bool {
        !self.pieces[j].is_constant()
    }

    fn noise_pair(&self, (n, d): (f64, f64)) -> (f64, f64) {
        self.noise(n, d)
    }

    fn noise(&self, num: f64, den: f64) -> (f64, f64) {
        if den == 0.0 && num <= ZERO_NOISE * self.scale {
            (0.0, 0.0)
        } else {
            (num, den)
        }
    }
}

/// Sample points strictly inside `(u, w)`; log-spaced when `u = 0`.
fn interior_samples(u: f64, w: f64, count: usize) -> Vec<f64> {
    (1..=count)
        .map(|k| {
            let s = k as f64 / (count + 1) as f64;
            if u == 0.0 {
                w * (1e-6f64).powf(1.0 - s)
            } else {
                u + (w - u) * s
            }
        })
        .collect()
}

const SAMPLES: usize = 32;

/// Maximizes `h` over `(u, w)` by sampling and golden-section refinement near the best sample.
fn maximize_interior(u: f64, w: f64, h: &dyn Fn(f64) -> f64) -> (f64, f64) {
    let xs = interior_samples(u, w, SAMPLES);
    let (mut k, mut bv) = (0, h(xs[0]));
    for (i, &x) in xs.iter().enumerate().skip(1) {
        let v = h(x);
        if v > bv {
            bv = v;
            k = i;
        }
    }
    let bx = xs[k];
    let (mut lo, mut hi) = (if k == 0 { u } else { xs[k - 1] }, if k + 1 == xs.len() { w } else { xs[k + 1] });
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if a <= lo || b >= hi {
            break;
        }
        if h(a) >= h(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let mid = 0.5 * (lo + hi);
    let vm = h(mid);
    if vm > bv {
        (mid, vm)
    } else {
        (bx, bv)
    }
}

fn critical_points(prof: &Profile) -> Vec<f64> {
    let mut pts: Vec<f64> = prof.ends.iter().flat_map(|&e| [e, 0.5 * e]).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Supremum over x > 0 of `num(x)/den(x)` where both change structure only at
/// the critical points: exact values there, right limits just after them, left
/// limits (equal to exact values by left continuity) and interior maxima on
/// pieces carrying a power.
fn doubling_sup(prof: &Profile, ratio_at: &dyn Fn(f64, bool) -> (f64, f64)) -> Sup {
    let mut sup = Sup::new();
    let pts = critical_points(prof);
    let mut prev = 0.0;
    for &c in &pts {
        let (n, d) = prof.noise_pair(ratio_at(c, false));
        sup.offer(n, d, Witness::Point { x: c, right_limit: false });
        if prev > 0.0 {
            let (n, d) = prof.noise_pair(ratio_at(prev, true));
            sup.offer(n, d, Witness::Point { x: prev, right_limit: true });
        }
        let mid = if prev == 0.0 { 0.5 * c } else { 0.5 * (prev + c) };
        let i = prof.index(mid, false);
        let m = prof.index(2.0 * mid, false);
        let powered = (i..=m.min(prof.len() - 1)).any(|j| prof.is_power(j));
        if powered {
            let h = |x: f64| {
                let (n, d) = prof.noise_pair(ratio_at(x, false));
                ratio(n, d)
            };
            let (x, _) = maximize_interior(prev, c, &h);
            let (n, d) = prof.noise_pair(ratio_at(x, false));
            sup.offer(n, d, Witness::Point { x, right_limit: false });
        } else {
            let (n, d) = prof.noise_pair(ratio_at(mid, false));
            sup.offer(n, d, Witness::Point { x: mid, right_limit: false });
        }
        prev = c;
    }
    sup
}

/// Which function-side constant to measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GmVariant {
    Gm,
    Gm1,
    Gm2,
}

/// Minimal constant of `f` for the chosen variant.
///
/// Pieces of constant value are handled exactly. On pieces carrying a power
/// `c x^γ` with `γ != 0` the supremum over the interior is located by
/// sampling plus golden-section refinement.
pub fn gm_constant_step(f: &HeadedStepFunction, variant: GmVariant) -> GmReport {
    if f.pieces().is_empty() {
        let class = match variant {
            GmVariant::Gm => GmClass::Gm,
            GmVariant::Gm1 => GmClass::Gm1,
            GmVariant::Gm2 => GmClass::Gm2,
        };
        return GmReport { class, constant: 0.0, witness: None };
    }
    let prof = Profile::new(f);
    match variant {
        GmVariant::Gm => {
            doubling_sup(&prof, &|x, r| (prof.variation(x, r, 2.0 * x, r), prof.abs_at(x, r))).report(GmClass::Gm)
        }
        GmVariant::Gm1 => doubling_sup(&prof, &|x, r| (prof.window_sup(x, r), prof.abs_at(x, r))).report(GmClass::Gm1),
        GmVariant::Gm2 => gm2_sup(&prof).report(GmClass::Gm2),
    }
}

/// [`gm_constant_step`] for a plain step function.
pub fn gm_constant_plain(f: &StepFunction, variant: GmVariant) -> GmReport {
    gm_constant_step(&HeadedStepFunction::from(f), variant)
}

fn gm2_sup(prof: &Profile) -> Sup {
    // Left endpoints x: right ends of pieces; on power pieces also interior
    // samples and the right limit at the left end.
    let mut xs: Vec<(f64, bool)> = Vec::new();
    // Right endpoints M: right limits at every breakpoint; on power pieces
    // also interior samples and the exact right end.
    let mut ms: Vec<(f64, bool)> = Vec::new();
    for j in 0..prof.len() {
        let (u, w) = (prof.start(j), prof.ends[j]);
        xs.push((w, false));
        ms.push((w, true));
        if prof.is_power(j) {
            for s in interior_samples(u, w, 2 * SAMPLES) {
                xs.push((s, false));
                ms.push((s, false));
            }
            if u > 0.0 {
                xs.push((u, true));
            }
            ms.push((w, false));
        }
    }
    let key = |&(v, r): &(f64, bool)| (v, r as u8);
    ms.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    let rows = par::map(&xs, |&(x, xr)| {
        let mut sup = Sup::new();
        let fx = prof.abs_at(x, xr);
        let ix = prof.log_integral(x);
        for &(m, mr) in &ms {
            if m < x || (m == x && (!mr || xr)) {
                continue;
            }
            let num = prof.variation(x, xr, m, mr);
            let den = fx + (prof.log_integral(m) - ix).max(0.0);
            let (n, d) = prof.noise(num, den);
            sup.offer(n, d, Witness::Interval { x, x_right: xr, m, m_right: mr });
        }
        sup
    });
    let mut sup = Sup::new();
    for r in rows {
        sup.merge(r);
    }
    sup
}

/// Running integral `∫_0^{e_j} f` at every piece end.
fn piece_integrals(f: &HeadedStepFunction) -> Result<Vec<Complex64>> {
    let mut acc = Complex64::default();
    let mut out = Vec::with_capacity(f.pieces().len());
    let mut start = 0.0;
    for p in f.pieces() {
        acc += power_integral(p, start, p.end)?;
        out.push(acc);
        start = p.end;
    }
    Ok(out)
}

/// `∫_a^b c t^γ dt`.
fn power_integral(p: &PowerPiece, a: f64, b: f64) -> Result<Complex64> {
    if p.coef == Complex64::default() {
        return Ok(Complex64::default());
    }
    let e = p.exponent + 1.0;
    if a == 0.0 && e <= 0.0 {
        return Err(Error::DivergentHead(format!("t^{} is not integrable at 0", p.exponent)));
    }
    Ok(if e == 0.0 { p.coef * (b / a).ln() } else { p.coef * (b.powf(e) - a.powf(e)) / e })
}

/// `σ_x = (1/x) ∫_0^x f`.
pub fn average_function(f: &HeadedStepFunction, x: f64) -> Result<Complex64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::InvalidParameter(format!("average needs x > 0, got {x}")));
    }
    let ints = piece_integrals(f)?;
    Ok(average_with(f, &ints, x))
}

fn average_with(f: &HeadedStepFunction, ints: &[Complex64], x: f64) -> Complex64 {
    let pieces = f.pieces();
    let j = pieces.partition_point(|p| p.end < x);
    if j >= pieces.len() {
        return ints.last().copied().unwrap_or_default() / x;
    }
    let (base, a) = if j == 0 { (Complex64::default(), 0.0) } else { (ints[j - 1], pieces[j - 1].end) };
    let part = power_integral(&pieces[j], a, x).unwrap_or_default();
    (base + part) / x
}

/// Variation of `x ↦ σ_x` over `[a, b]`.
///
/// On a constant piece (and past the support) `σ = v + D/x` traces a straight
/// line, so the variation is `|D| |1/x_1 - 1/x_2|`. On a power piece
/// `σ = A x^γ + D/x`; when `A` and `D` are collinear the turning point is
/// found in closed form, otherwise `∫|σ'|` is integrated numerically.
pub fn variation_of_average(f: &HeadedStepFunction, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b >= a) {
        return Err(Error::InvalidParameter(format!("need 0 < a <= b, got [{a}, {b}]")));
    }
    let ints = piece_integrals(f)?;
    let pieces = f.pieces();
    let mut cuts = vec![a];
    cuts.extend(pieces.iter().map(|p| p.end).filter(|&e| e > a && e < b));
    cuts.push(b);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (x1, x2) = (w[0], w[1]);
        if x1 == x2 {
            continue;
        }
        let mid = 0.5 * (x1 + x2);
        let j = pieces.partition_point(|p| p.end < mid);
        let start = if j == 0 { 0.0 } else { pieces[j - 1].end };
        let before = if j == 0 { Complex64::default() } else { ints[j - 1] };
        if j >= pieces.len() {
            total += ints.last().copied().unwrap_or_default().norm() * (1.0 / x1 - 1.0 / x2);
            continue;
        }
        let p = &pieces[j];
        let g = p.exponent;
        if p.is_constant() {
            let d = before - p.coef * start;
            total += d.norm() * (1.0 / x1 - 1.0 / x2);
            continue;
        }
        if g == -1.0 {
            let sig = |x: f64| (before + p.coef * (x / start).ln()) / x;
            let dsig = |x: f64| ((p.coef / x - sig(x)) / x).norm();
            total += Adaptive::new(1e-10).integrate(dsig, x1, x2)?;
            continue;
        }
        let amp = p.coef / (g + 1.0);
        let d = before - p.coef * start.powf(g + 1.0) / (g + 1.0);
        let cross = (amp * d.conj()).im;
        if d == Complex64::default() {
            total += amp.norm() * (x2.powf(g) - x1.powf(g)).abs();
        } else if cross.abs() <= 1e-14 * amp.norm() * d.norm() {
            // σ = A (x^γ + λ/x) with λ real
            let lambda = (d / amp).re;
            let h = |x: f64| x.powf(g) + lambda / x;
            let mut knots = vec![x1];
            let r = lambda / g;
            if r > 0.0 {
                let root = r.powf(1.0 / (g + 1.0));
                if root > x1 && root < x2 {
                    knots.push(root);
                }
            }
            knots.push(x2);
            total += amp.norm() * knots.windows(2).map(|k| (h(k[1]) - h(k[0])).abs()).sum::<f64>();
        } else {
            let dsig = |x: f64| (amp * g * x.powf(g - 1.0) - d / (x * x)).norm();
            total += Adaptive::new(1e-10).integrate(dsig, x1, x2)?;
        }
    }
    Ok(total)
}

/// The constant `(2K+1)(1 + 2(K+1)B²)/cos φ` with K = 1 bounding the
/// doubling variation of Lebesgue averages of a sector-valued function.
pub fn average_gm_bound(b: f64, phi: f64) -> f64 {
    3.0 * (1.0 + 4.0 * b * b) / phi.cos()
}
