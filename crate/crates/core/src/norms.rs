//! Weighted `l^q`/`L^q` norms, Lorentz norms, dyadic norms and the
//! equivalences between them for functions of bounded doubling oscillation.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::model::{sequence_to_step, ComplexSeq, Exponent, HeadedStepFunction, StepFunction, PQ};
use crate::rearrange::{rearrange_seq, rearrange_step, DecreasingStep};
use crate::report::VerificationReport;

/// `(Σ |a_n|^q n^{q/p-1})^{1/q}`, or `sup_n n^{1/p} |a_n|` when q = ∞.
pub fn weighted_norm_seq(a: &ComplexSeq, pq: PQ) -> f64 {
    weighted_norm_moduli(&a.moduli(), pq)
}

/// [`weighted_norm_seq`] on moduli already extracted.
pub fn weighted_norm_moduli(m: &[f64], pq: PQ) -> f64 {
    let w = pq.weight_exponent();
    match pq.q {
        Exponent::Infinite => m
            .iter()
            .enumerate()
            .map(|(i, &v)| if v == 0.0 { 0.0 } else { ((i + 1) as f64).powf(w) * v })
            .fold(0.0, f64::max),
        Exponent::Finite(q) => {
            let s: f64 = m
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(i, &v)| v.powf(q) * ((i + 1) as f64).powf(w * q))
                .sum();
            s.powf(1.0 / q)
        }
    }
}

/// `Σ |c_n| / n`, the norm of `l¹` with weight `1/k`.
pub fn l1_over_k(c: &ComplexSeq) -> f64 {
    c.as_slice().iter().enumerate().map(|(i, z)| z.norm() / (i + 1) as f64).sum()
}

/// `Σ |c_n|`.
pub fn l1(c: &ComplexSeq) -> f64 {
    c.as_slice().iter().map(|z| z.norm()).sum()
}

/// `(∫ x^{q/p-1} |f|^q dx)^{1/q}`, or `sup x^{1/p}|f(x)|` for q = ∞, in closed form.
///
/// A power piece `c x^γ` starting at 0 whose integrand is not integrable at 0
/// is reported as [`Error::DivergentHead`]; a constant piece in the same
/// situation (possible only for p = ∞) gives `∞`.
pub fn weighted_norm_step(f: &HeadedStepFunction, pq: PQ) -> Result<f64> {
    let s = pq.p.recip();
    let mut start = 0.0;
    match pq.q {
        Exponent::Finite(q) => {
            let mut total = 0.0;
            for piece in f.pieces() {
                let (a, b) = (start, piece.end);
                start = b;
                let m = piece.coef.norm();
                if m == 0.0 {
                    continue;
                }
                let e = piece.exponent * q + s * q;
                let integral = if a == 0.0 && e <= 0.0 {
                    if piece.exponent != 0.0 {
                        return Err(Error::DivergentHead(format!("integrand exponent {e} <= 0 at the origin")));
                    }
                    return Ok(f64::INFINITY);
                } else if e == 0.0 {
                    (b / a).ln()
                } else {
                    (b.powf(e) - a.powf(e)) / e
                };
                total += m.powf(q) * integral;
            }
            Ok(total.powf(1.0 / q))
        }
        Exponent::Infinite => {
            let mut sup: f64 = 0.0;
            for piece in f.pieces() {
                let (a, b) = (start, piece.end);
                start = b;
                let m = piece.coef.norm();
                if m == 0.0 {
                    continue;
                }
                let e = piece.exponent + s;
                let v = if e > 0.0 {
                    m * b.powf(e)
                } else if e == 0.0 {
                    m
                } else if a == 0.0 {
                    if piece.exponent != 0.0 {
                        return Err(Error::DivergentHead(format!("x^{e} is unbounded at the origin")));
                    }
                    return Ok(f64::INFINITY);
                } else {
                    m * a.powf(e)
                };
                sup = sup.max(v);
            }
            Ok(sup)
        }
    }
}

/// [`weighted_norm_step`] for a plain step function.
pub fn weighted_norm_plain(f: &StepFunction, pq: PQ) -> f64 {
    weighted_norm_step(&HeadedStepFunction::from(f), pq).expect("constant pieces never raise")
}

/// Weighted norm of a decreasing rearrangement.
pub fn weighted_norm_decreasing(fs: &DecreasingStep, pq: PQ) -> f64 {
    weighted_norm_plain(&fs.to_step(), pq)
}

/// `‖a‖_{l(p,q)} = ‖a*‖_{l^q_{w(p,q)}}`.
pub fn lorentz_norm_seq(a: &ComplexSeq, pq: PQ) -> Result<f64> {
    pq.require_lorentz()?;
    Ok(weighted_norm_moduli(&rearrange_seq(a), pq))
}

/// `‖f‖_{L(p,q)} = ‖f*‖_{L^q_{w(p,q)}}`.
pub fn lorentz_norm_step(f: &StepFunction, pq: PQ) -> Result<f64> {
    pq.require_lorentz()?;
    Ok(weighted_norm_decreasing(&rearrange_step(f), pq))
}

/// `(Σ_{k=k_lo}^{k_hi} 2^{kq/p} |f(2^k)|^q)^{1/q}`; q = ∞ gives the supremum.
pub fn dyadic_norm(f: &StepFunction, pq: PQ, k_lo: i32, k_hi: i32) -> f64 {
    dyadic_sum(|x| f.eval(x).norm(), pq, k_lo, k_hi).finish(pq)
}

/// Smallest range `[k_lo, k_hi]` containing every k with `f(2^k)` possibly
/// differing from its neighbours: below `k_lo` the value is that of the first piece.
pub fn dyadic_range(f: &StepFunction) -> Option<(i32, i32)> {
    let first = *f.breakpoints().first()?;
    Some((largest_pow2_le(first), largest_pow2_le(f.support_end())))
}

/// Largest k with `2^k <= x`.
pub fn largest_pow2_le(x: f64) -> i32 {
    let mut k = x.log2().floor() as i32;
    while pow2(k + 1) <= x {
        k += 1;
    }
    while pow2(k) > x {
        k -= 1;
    }
    k
}

/// Largest k with `2^k < x`.
pub fn largest_pow2_lt(x: f64) -> i32 {
    let k = largest_pow2_le(x);
    if pow2(k) == x {
        k - 1
    } else {
        k
    }
}

pub fn pow2(k: i32) -> f64 {
    2f64.powi(k)
}

/// Partial dyadic sum (q-th powers) or running supremum.
#[derive(Clone, Copy, Debug)]
pub struct DyadicAcc(f64);

impl DyadicAcc {
    pub fn finish(self, pq: PQ) -> f64 {
        match pq.q {
            Exponent::Infinite => self.0,
            Exponent::Finite(q) => self.0.powf(1.0 / q),
        }
    }
}

fn dyadic_term(v: f64, k: i32, pq: PQ) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    let s = pq.p.recip();
    match pq.q {
        Exponent::Infinite => pow2(k).powf(s) * v,
        Exponent::Finite(q) => pow2(k).powf(s * q) * v.powf(q),
    }
}

fn dyadic_sum(eval: impl Fn(f64) -> f64, pq: PQ, k_lo: i32, k_hi: i32) -> DyadicAcc {
    let mut acc = 0.0f64;
    for k in k_lo..=k_hi {
        let t = dyadic_term(eval(pow2(k)), k, pq);
        acc = match pq.q {
            Exponent::Infinite => acc.max(t),
            Exponent::Finite(_) => acc + t,
        };
    }
    DyadicAcc(acc)
}

/// Adds `Σ_{k <= k_tail}` of a constant value `v` in closed form.
fn with_tail(acc: DyadicAcc, v: f64, k_tail: i32, pq: PQ) -> DyadicAcc {
    if v == 0.0 {
        return acc;
    }
    let s = pq.p.recip();
    match pq.q {
        Exponent::Infinite => {
            let top = if s == 0.0 { v } else { dyadic_term(v, k_tail, pq) };
            DyadicAcc(acc.0.max(top))
        }
        Exponent::Finite(q) => {
            if s == 0.0 {
                return DyadicAcc(f64::INFINITY);
            }
            let r = 2f64.powf(-s * q);
            DyadicAcc(acc.0 + dyadic_term(v, k_tail, pq) / (1.0 - r))
        }
    }
}

/// Dyadic norm over all `k ∈ ℤ` of `|f(2^k)|`, geometric tail in closed form.
pub fn dyadic_norm_full(f: &StepFunction, pq: PQ) -> f64 {
    let Some((k_tail, k_hi)) = dyadic_range(f) else {
        return 0.0;
    };
    let acc = dyadic_sum(|x| f.eval(x).norm(), pq, k_tail + 1, k_hi);
    with_tail(acc, f.values()[0].norm(), k_tail, pq).finish(pq)
}

/// Dyadic norm over all `k ∈ ℤ` of `f*(2^k)` (right-continuous `f*`).
pub fn dyadic_norm_rearranged(fs: &DecreasingStep, pq: PQ) -> f64 {
    let Some(&first) = fs.breakpoints().first() else {
        return 0.0;
    };
    let k_tail = largest_pow2_lt(first);
    let k_hi = largest_pow2_lt(fs.support_end());
    let acc = dyadic_sum(|x| fs.eval(x), pq, k_tail + 1, k_hi);
    with_tail(acc, fs.values()[0], k_tail, pq).finish(pq)
}

/// The four equivalent quantities and the constant-explicit checks between them.
#[derive(Clone, Debug)]
pub struct Equivalence {
    /// `‖f‖_{L(p,q)}`.
    pub lorentz: f64,
    /// Dyadic norm of `f*(2^k)`.
    pub dyadic_rearranged: f64,
    /// Dyadic norm of `|f(2^k)|`.
    pub dyadic: f64,
    /// `‖f‖_{L^q_{w(p,q)}}`.
    pub weighted: f64,
    pub checks: Vec<VerificationReport>,
}

impl Equivalence {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// `max{2^{q/p-1}, 4^{q/p-1}}`.
pub fn doubling_factor(p: f64, q: f64) -> f64 {
    let e = q / p - 1.0;
    2f64.powf(e).max(4f64.powf(e))
}

/// Computes the four quantities and checks every link of the chain
/// `L(p,q) ~ dyadic(f*) ~ dyadic(|f|) ~ L^q_w` with explicit constants.
///
/// `b` is the measured almost-monotone constant of `f` (at least 1).
/// Constants for finite q:
/// * `‖f‖_w <= (2^{q/p} ln 2)^{1/q} B · dyadic(|f|)`
/// * `dyadic(|f|) <= (4A)^{1/q} B · ‖f‖_{L(p,q)}`, `A = max{2^{q/p-1}, 4^{q/p-1}}`
/// * the same two with `f*` in place of `f` and B = 1
/// * `‖f‖_{L(p,q)} <= ‖f‖_w` for p <= q, `<= (2p/q)^{1/q} B² ‖f‖_w` for q < p.
///
/// For q = ∞: `‖f‖_{L(p,∞)} <= ‖f‖_w <= 2^{1/p}B·dyadic <= 2^{2/p}B²‖f‖_w`
/// and `‖f‖_w <= 2^{1/p}B‖f‖_{L(p,∞)}`.
pub fn equivalence_report(f: &StepFunction, pq: PQ, b: f64) -> Result<Equivalence> {
    pq.require_lorentz()?;
    if !b.is_finite() {
        return Err(Error::NotGm1);
    }
    let b = b.max(1.0);
    let fs = rearrange_step(f);
    let lorentz = weighted_norm_decreasing(&fs, pq);
    let weighted = weighted_norm_plain(f, pq);
    let dyadic = dyadic_norm_full(f, pq);
    let dyadic_rearranged = dyadic_norm_rearranged(&fs, pq);
    let s = pq.p.recip();
    let mut checks = Vec::new();
    match (pq.p, pq.q) {
        (Exponent::Finite(p), Exponent::Finite(q)) => {
            let upper = (2f64.powf(q / p) * LN_2).powf(1.0 / q);
            let lower = (4.0 * doubling_factor(p, q)).powf(1.0 / q);
            checks.push(VerificationReport::bound("weighted<=dyadic", weighted, dyadic, upper * b));
            checks.push(VerificationReport::bound("dyadic<=lorentz", dyadic, lorentz, lower * b));
            checks.push(VerificationReport::bound("lorentz<=dyadic*", lorentz, dyadic_rearranged, upper));
            checks.push(VerificationReport::bound("dyadic*<=lorentz", dyadic_rearranged, lorentz, lower));
            let c = if p <= q { 1.0 } else { (2.0 * p / q).powf(1.0 / q) * b * b };
            checks.push(VerificationReport::bound("lorentz<=weighted", lorentz, weighted, c));
        }
        (_, Exponent::Infinite) => {
            let two_s = 2f64.powf(s);
            checks.push(VerificationReport::bound("lorentz<=weighted", lorentz, weighted, 1.0));
            checks.push(VerificationReport::bound("weighted<=dyadic", weighted, dyadic, two_s * b));
            checks.push(VerificationReport::bound("dyadic<=weighted", dyadic, weighted, two_s * b));
            checks.push(VerificationReport::bound("weighted<=lorentz", weighted, lorentz, two_s * b));
            checks.push(VerificationReport::bound("dyadic<=lorentz", dyadic, lorentz, two_s * two_s * b * b));
            checks.push(VerificationReport::bound("lorentz<=dyadic*", lorentz, dyadic_rearranged, two_s));
            checks.push(VerificationReport::bound("dyadic*<=lorentz", dyadic_rearranged, lorentz, two_s * two_s));
        }
        (Exponent::Infinite, Exponent::Finite(_)) => unreachable!("rejected by require_lorentz"),
    }
    Ok(Equivalence { lorentz, dyadic_rearranged, dyadic, weighted, checks })
}

/// Bracket `[c1, c2]` for `‖a‖_{l(p,q)} / ‖a*(⌈·⌉)‖_{L^q_{w(p,q)}}`, found by
/// scanning the indicator sequences of length 1..=64 and the large-length limit 1.
pub fn sequence_function_bracket(pq: PQ) -> Result<(f64, f64)> {
    pq.require_lorentz()?;
    let mut lo: f64 = 1.0;
    let mut hi: f64 = 1.0;
    for m in 1..=64 {
        let a = ComplexSeq::from_real(&vec![1.0; m])?;
        let r = lorentz_norm_seq(&a, pq)? / lorentz_norm_step(&sequence_to_step(&a), pq)?;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PowerHead;
    use num_complex::Complex64;
    use proptest::prelude::*;

    const INF: f64 = f64::INFINITY;

    fn pq(p: f64, q: f64) -> PQ {
        PQ::from_f64(p, q).unwrap()
    }

    fn seq(v: &[f64]) -> ComplexSeq {
        ComplexSeq::from_real(v).unwrap()
    }

    fn step(b: &[f64], v: &[f64]) -> StepFunction {
        StepFunction::from_real(b.to_vec(), v).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn weighted_seq_examples() {
        assert!(close(weighted_norm_seq(&seq(&[1.0; 4]), pq(1.0, 1.0)), 4.0, 1e-15));
        assert!(close(weighted_norm_seq(&seq(&[2.0]), pq(2.0, INF)), 2.0, 1e-15));
        let oracle = 1.0 + 0.5 / 2.0 + (1.0 / 3.0) / 3.0;
        assert!(close(weighted_norm_seq(&seq(&[1.0, 0.5, 1.0 / 3.0]), pq(INF, 1.0)), oracle, 1e-14));
        assert!(close(oracle, 1.361111, 1e-6));
    }

    #[test]
    fn weighted_step_examples() {
        let f = step(&[1.0], &[1.0]);
        assert_eq!(weighted_norm_plain(&f, pq(1.0, 1.0)), 1.0);
        assert_eq!(weighted_norm_plain(&f, pq(2.0, 2.0)), 1.0);
        let h = HeadedStepFunction::new(Some(PowerHead::new(1.0, 1.0).unwrap()), vec![1.0], vec![]).unwrap();
        assert!(close(weighted_norm_step(&h, pq(2.0, 2.0)).unwrap(), (1.0f64 / 3.0).sqrt(), 1e-15));
        let h2 = HeadedStepFunction::new(Some(PowerHead::new(1.0, 0.25).unwrap()), vec![1.0], vec![]).unwrap();
        assert!(weighted_norm_step(&h2, pq(INF, 1.0)).is_ok());
        let steep = h.times_power(-2.0);
        assert!(matches!(weighted_norm_step(&steep, pq(1.0, 1.0)), Err(Error::DivergentHead(_))));
    }

    #[test]
    fn lorentz_examples() {
        let a = seq(&[3.0, 1.0, 2.0]);
        assert_eq!(lorentz_norm_seq(&a, pq(1.0, 1.0)).unwrap(), 6.0);
        assert_eq!(lorentz_norm_seq(&a, pq(2.0, INF)).unwrap(), 3.0);
        assert!(close(lorentz_norm_seq(&seq(&[1.0, 1.0]), pq(2.0, 2.0)).unwrap(), 2f64.sqrt(), 1e-15));
        assert_eq!(lorentz_norm_step(&step(&[1.0], &[2.0]), pq(1.0, INF)).unwrap(), 2.0);
        assert_eq!(lorentz_norm_step(&step(&[1.0, 2.0], &[1.0, 3.0]), pq(1.0, 1.0)).unwrap(), 4.0);
        assert!(lorentz_norm_seq(&a, pq(INF, 1.0)).is_err());
    }

    #[test]
    fn dyadic_examples() {
        let f = step(&[2.0], &[1.0]);
        let direct: f64 = (-3..=1).map(|k| 2f64.powi(k)).sum();
        assert!(close(dyadic_norm(&f, pq(1.0, 1.0), -3, 1), direct, 1e-15));
        assert!(close(direct, 3.875, 1e-15));
        assert_eq!(dyadic_norm(&StepFunction::zero(), pq(1.0, 1.0), -5, 5), 0.0);
        assert_eq!(dyadic_norm(&step(&[1.0], &[1.0]), pq(INF, INF), -4, 4), 1.0);
        // full sum: Σ_{k<=1} 2^k = 4
        assert!(close(dyadic_norm_full(&f, pq(1.0, 1.0)), 4.0, 1e-14));
        // f* = 1 on [0,2): f*(2) = 0, so the rearranged sum stops at k = 0
        assert!(close(dyadic_norm_rearranged(&rearrange_step(&f), pq(1.0, 1.0)), 2.0, 1e-14));
    }

    #[test]
    fn equivalence_examples() {
        let f = step(&[1.0], &[1.0]);
        let e = equivalence_report(&f, pq(2.0, 1.0), 1.0).unwrap();
        assert!(close(e.lorentz, 2.0, 1e-14));
        assert!(close(e.weighted, 2.0, 1e-14));
        assert!(e.all_pass(), "{:?}", e.checks);
        let g = step(&[1.0, 2.0, 4.0], &[3.0, 2.0, 1.0]);
        for (p, q) in [(1.0, 2.0), (2.0, 1.0), (2.0, 2.0), (3.0, 0.5), (2.0, INF)] {
            let e = equivalence_report(&g, pq(p, q), 1.0).unwrap();
            assert!(e.all_pass(), "{p} {q}: {:?}", e.checks);
        }
    }

    #[test]
    fn equivalence_uses_corrected_factor() {
        // f = 1 on (0,1], p = q = 1: dyadic sum 2, Lorentz norm 1
        let e = equivalence_report(&step(&[1.0], &[1.0]), pq(1.0, 1.0), 1.0).unwrap();
        assert!(close(e.dyadic, 2.0, 1e-14));
        assert!(close(e.lorentz, 1.0, 1e-14));
        assert!(e.dyadic > doubling_factor(1.0, 1.0) * e.lorentz);
        assert!(e.all_pass());
    }

    #[test]
    fn bracket_matches_term_analysis() {
        for (p, q) in [(1.0, 2.0), (2.0, 1.0), (3.0, 0.5), (0.5, 3.0)] {
            let (lo, hi) = sequence_function_bracket(pq(p, q)).unwrap();
            let s: f64 = q / p;
            assert!(close(lo, s.min(1.0).powf(1.0 / q), 1e-12));
            assert!(close(hi, s.max(1.0).powf(1.0 / q), 1e-12));
        }
        assert_eq!(sequence_function_bracket(pq(2.0, INF)).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn pow2_helpers() {
        assert_eq!(largest_pow2_le(1.0), 0);
        assert_eq!(largest_pow2_le(3.9), 1);
        assert_eq!(largest_pow2_lt(4.0), 1);
        assert_eq!(largest_pow2_le(0.3), -2);
    }

    fn arb_step() -> impl Strategy<Value = StepFunction> {
        prop::collection::vec((0.05..2.0f64, -3.0..3.0f64, -3.0..3.0f64), 1..16).prop_map(|parts| {
            let mut x = 0.0;
            let mut b = Vec::new();
            let mut v = Vec::new();
            for (w, re, im) in parts {
                x += w;
                b.push(x);
                v.push(Complex64::new(re, im));
            }
            StepFunction::new(b, v).unwrap()
        })
    }

    fn arb_pq_le() -> impl Strategy<Value = PQ> {
        (0.3..5.0f64, 0.0..4.0f64, any::<bool>()).prop_map(|(p, d, inf)| if inf { pq(p, INF) } else { pq(p, p + d) })
    }

    proptest! {
        #[test]
        fn lorentz_below_weighted_for_p_le_q(f in arb_step(), pq in arb_pq_le()) {
            let l = lorentz_norm_step(&f, pq).unwrap();
            let w = weighted_norm_plain(&f, pq);
            prop_assert!(l <= w * (1.0 + 1e-12) + 1e-14);
        }

        #[test]
        fn homogeneous(f in arb_step(), lambda in -4.0..4.0f64, mu in -4.0..4.0f64, pq in arb_pq_le()) {
            let z = Complex64::new(lambda, mu);
            let g = f.scale(z);
            let l = lorentz_norm_step(&f, pq).unwrap();
            prop_assert!(close(lorentz_norm_step(&g, pq).unwrap(), z.norm() * l, 1e-12));
            prop_assert!(close(weighted_norm_plain(&g, pq), z.norm() * weighted_norm_plain(&f, pq), 1e-12));
            let a = ComplexSeq::new(f.values().to_vec()).unwrap();
            prop_assert!(close(
                lorentz_norm_seq(&a.scale(z), pq).unwrap(),
                z.norm() * lorentz_norm_seq(&a, pq).unwrap(),
                1e-12
            ));
        }

        #[test]
        fn sequence_function_ratio_in_bracket(
            v in prop::collection::vec(0.0..5.0f64, 1..300),
            pq in arb_pq_le(),
        ) {
            let a = seq(&v);
            let (lo, hi) = sequence_function_bracket(pq).unwrap();
            let den = lorentz_norm_step(&sequence_to_step(&a), pq).unwrap();
            prop_assume!(den > 0.0);
            let r = lorentz_norm_seq(&a, pq).unwrap() / den;
            prop_assert!(r >= lo * (1.0 - 1e-12) && r <= hi * (1.0 + 1e-12), "{} not in [{}, {}]", r, lo, hi);
        }
    }
}
