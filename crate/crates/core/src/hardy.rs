//! The Hardy averaging operator `x^{-α} ∫_0^x f(t) dt/t` on nonnegative
//! piecewise power functions, its weighted `L^q(dx/x)` norm against that of
//! `x^{-α} f`, and products of functions of bounded doubling variation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gm::{gm_constant_step, GmVariant};
use crate::model::{Exponent, HeadedStepFunction, PowerPiece};
use crate::quad::Adaptive;
use crate::report::{safe_ratio, VerificationReport};

/// Relative tolerance of the quadrature pieces of the left side.
pub const QUAD_TOL: f64 = 1e-10;

/// Coarser tolerance used to measure refinement drift.
pub const COARSE_TOL: f64 = 1e-6;

fn check_input(f: &HeadedStepFunction) -> Result<()> {
    if let Some(i) = f.pieces().iter().position(|p| p.coef.im != 0.0 || p.coef.re < 0.0) {
        return Err(Error::Negative(i));
    }
    if let Some(p) = f.pieces().first() {
        if p.coef.re > 0.0 && p.exponent <= 0.0 {
            return Err(Error::MissingHead);
        }
    }
    Ok(())
}

/// `∫_a^x c t^{γ-1} dt`.
fn piece_inner(p: &PowerPiece, a: f64, x: f64) -> f64 {
    let c = p.coef.re;
    if c == 0.0 {
        0.0
    } else if p.exponent == 0.0 {
        c * (x / a).ln()
    } else {
        c * (x.powf(p.exponent) - a.powf(p.exponent)) / p.exponent
    }
}

/// `I(x_j)` at every piece end.
fn inner_at_ends(f: &HeadedStepFunction) -> Vec<f64> {
    let mut acc = 0.0;
    let mut start = 0.0;
    f.pieces()
        .iter()
        .map(|p| {
            acc += piece_inner(p, start, p.end);
            start = p.end;
            acc
        })
        .collect()
}

fn start_of(f: &HeadedStepFunction, j: usize) -> f64 {
    if j == 0 {
        0.0
    } else {
        f.pieces()[j - 1].end
    }
}

/// `I(x) = ∫_0^x f(t) dt/t` in closed form.
pub fn hardy_inner(f: &HeadedStepFunction, x: f64) -> Result<f64> {
    check_input(f)?;
    let ends = inner_at_ends(f);
    Ok(inner_with(f, &ends, x))
}

fn inner_with(f: &HeadedStepFunction, ends: &[f64], x: f64) -> f64 {
    match f.piece_index(x) {
        None => ends.last().copied().unwrap_or(0.0),
        Some(j) => {
            let before = if j == 0 { 0.0 } else { ends[j - 1] };
            before + piece_inner(&f.pieces()[j], start_of(f, j), x)
        }
    }
}

/// `(∫_0^∞ (x^{-α} I(x))^q dx/x)^{1/q}`, or `sup_x x^{-α} I(x)` for `q = ∞`.
pub fn hardy_lhs(f: &HeadedStepFunction, alpha: f64, q: Exponent) -> Result<f64> {
    hardy_lhs_tol(f, alpha, q, QUAD_TOL)
}

/// [`hardy_lhs`] with an explicit quadrature tolerance.
///
/// On the first piece `I = (c/γ) x^γ` and beyond the support `I` is constant,
/// so both are integrated in closed form; the pieces in between are
/// integrated numerically in `u = ln x`.
pub fn hardy_lhs_tol(f: &HeadedStepFunction, alpha: f64, q: Exponent, tol: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_input(f)?;
    if f.is_zero() {
        return Ok(0.0);
    }
    let pieces = f.pieces();
    let ends = inner_at_ends(f);
    let head = pieces[0];
    let (c0, g0) = (head.coef.re, head.exponent);
    let last_end = f.support_end();
    let i_last = *ends.last().unwrap();
    match q {
        Exponent::Infinite => {
            let mut best: f64 = 0.0;
            if c0 > 0.0 {
                if g0 < alpha {
                    return Ok(f64::INFINITY);
                }
                best = best.max(c0 / g0 * head.end.powf(g0 - alpha));
            }
            for j in 1..pieces.len() {
                let p = &pieces[j];
                let (a, b) = (pieces[j - 1].end, p.end);
                let i0 = ends[j - 1];
                let h = |x: f64| x.powf(-alpha) * (i0 + piece_inner(p, a, x));
                best = best.max(h(a)).max(h(b));
                let c = p.coef.re;
                if c > 0.0 {
                    let stationary = if p.exponent == 0.0 {
                        Some(a * (1.0 / alpha - i0 / c).exp())
                    } else if p.exponent != alpha {
                        let g = p.exponent;
                        let rhs = alpha * (i0 - c * a.powf(g) / g) / (c * (1.0 - alpha / g));
                        (rhs > 0.0).then(|| rhs.powf(1.0 / g))
                    } else {
                        None
                    };
                    if let Some(x) = stationary.filter(|&x| x > a && x < b) {
                        best = best.max(h(x));
                    }
                }
            }
            Ok(best.max(i_last * last_end.powf(-alpha)))
        }
        Exponent::Finite(q) => {
            let mut total = 0.0;
            if c0 > 0.0 {
                if g0 <= alpha {
                    return Ok(f64::INFINITY);
                }
                let e = (g0 - alpha) * q;
                total += (c0 / g0).powf(q) * head.end.powf(e) / e;
            }
            for j in 1..pieces.len() {
                let p = &pieces[j];
                let a = pieces[j - 1].end;
                let i0 = ends[j - 1];
                let g = |u: f64| {
                    let x = u.exp();
                    (x.powf(-alpha) * (i0 + piece_inner(p, a, x))).powf(q)
                };
                total += Adaptive::new(tol).integrate(g, a.ln(), p.end.ln())?;
            }
            total += i_last.powf(q) * last_end.powf(-alpha * q) / (alpha * q);
            Ok(total.powf(1.0 / q))
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")))
    }
}

/// `(∫_0^∞ (x^{-α} f(x))^q dx/x)^{1/q}` in closed form; `∞` when the first
/// piece does not decay fast enough at 0.
pub fn hardy_rhs(f: &HeadedStepFunction, alpha: f64, q: Exponent) -> Result<f64> {
    check_alpha(alpha)?;
    check_input(f)?;
    let mut start = 0.0;
    match q {
        Exponent::Infinite => {
            let mut best: f64 = 0.0;
            for p in f.pieces() {
                let (a, b) = (start, p.end);
                start = b;
                let c = p.coef.re;
                if c == 0.0 {
                    continue;
                }
                let e = p.exponent - alpha;
                let at = |x: f64| c * x.powf(e);
                if a == 0.0 {
                    if e < 0.0 {
                        return Ok(f64::INFINITY);
                    }
                    best = best.max(if e == 0.0 { c } else { at(b) });
                } else {
                    best = best.max(at(a)).max(at(b));
                }
            }
            Ok(best)
        }
        Exponent::Finite(q) => {
            let mut total = 0.0;
            for p in f.pieces() {
                let (a, b) = (start, p.end);
                start = b;
                let c = p.coef.re;
                if c == 0.0 {
                    continue;
                }
                let e = (p.exponent - alpha) * q;
                if a == 0.0 && e <= 0.0 {
                    return Ok(f64::INFINITY);
                }
                total += c.powf(q) * if e == 0.0 { (b / a).ln() } else { (b.powf(e) - a.powf(e)) / e };
            }
            Ok(total.powf(1.0 / q))
        }
    }
}

/// Left and right sides of the Hardy inequality with the drift of the left
/// side between a coarse and the default quadrature tolerance.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HardyCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub drift: f64,
}

pub fn hardy_check(f: &HeadedStepFunction, alpha: f64, q: Exponent) -> Result<HardyCheck> {
    let lhs = hardy_lhs(f, alpha, q)?;
    let rhs = hardy_rhs(f, alpha, q)?;
    let coarse = hardy_lhs_tol(f, alpha, q, COARSE_TOL)?;
    let drift = if lhs == coarse { 0.0 } else { (lhs - coarse).abs() / lhs.abs().max(coarse.abs()) };
    Ok(HardyCheck { lhs, rhs, ratio: safe_ratio(lhs, rhs), drift })
}

/// Passes when the right side is infinite, or when the ratio is finite,
/// stable under quadrature refinement and within `envelope`.
pub fn hardy_report(f: &HeadedStepFunction, alpha: f64, q: Exponent, envelope: f64) -> Result<VerificationReport> {
    let h = hardy_check(f, alpha, q)?;
    let pass = h.rhs.is_infinite() || (h.ratio.is_finite() && h.drift < 1e-2 && h.ratio <= envelope * (1.0 + 1e-12));
    Ok(VerificationReport::with_verdict(format!("hardy alpha={alpha} q={q}"), h.lhs, h.rhs, envelope, pass))
}

/// Largest ratio over `family` (ignoring infinite right sides) times `margin`;
/// for `q >= 1` never below the classical constant `1/α`.
pub fn hardy_envelope(family: &[HeadedStepFunction], alpha: f64, q: Exponent, margin: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for f in family {
        let h = hardy_check(f, alpha, q)?;
        if h.rhs.is_finite() {
            worst = worst.max(h.ratio);
        }
    }
    let classical = if q.is_infinite() || q.value() >= 1.0 { 1.0 / alpha } else { 0.0 };
    Ok((margin * worst).max(classical))
}

/// `ε = min(1/2, γ/2)` for the first-piece exponent `γ`.
pub fn default_epsilon(f: &HeadedStepFunction) -> f64 {
    let g = f.pieces().first().map(|p| p.exponent).unwrap_or(1.0);
    0.5f64.min(g / 2.0)
}

/// `g(t) = t^{ε-α} f(t)`: the Hardy sides of `g` at exponent `ε` satisfy
/// `lhs_α(f) <= lhs_ε(g)` and `rhs_α(f) = rhs_ε(g)`.
pub fn shift_exponent(f: &HeadedStepFunction, alpha: f64, epsilon: f64) -> HeadedStepFunction {
    f.times_power(epsilon - alpha)
}

/// Pointwise product; exponents of overlapping pieces add.
pub fn product_step(f: &HeadedStepFunction, g: &HeadedStepFunction) -> HeadedStepFunction {
    f.product(g)
}

/// Measured GM constant of `fg` against `4 B_1 B_2`.
pub fn gm_product_report(f: &HeadedStepFunction, g: &HeadedStepFunction) -> VerificationReport {
    let b1 = gm_constant_step(f, GmVariant::Gm).constant;
    let b2 = gm_constant_step(g, GmVariant::Gm).constant;
    let bfg = gm_constant_step(&product_step(f, g), GmVariant::Gm).constant;
    VerificationReport::bound("GM product", bfg, b1 * b2, 4.0)
}
