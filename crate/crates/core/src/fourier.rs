//! Trigonometric polynomials `Σ c_k e^{ikx}`: partial sums, the pointwise
//! and integral bounds available for coefficients of bounded variation,
//! Fourier coefficients of step functions, Cesàro means and Lorentz-norm
//! ratios between coefficients and sampled functions.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gm::{bell_majorant, gms2_constant};
use crate::model::{ComplexSeq, Exponent, StepFunction, TwoSidedSeq, PQ};
use crate::norms::{l1_over_k, lorentz_norm_seq, lorentz_norm_step, weighted_norm_decreasing};
use crate::quad::Adaptive;
use crate::rearrange::DecreasingStep;
use crate::report::VerificationReport;

/// Default relative tolerance for `‖f‖_{L¹(0,π)}`.
pub const L1_TOL: f64 = 1e-8;

/// Default sample count for sampled rearrangements.
pub const DEFAULT_GRID: usize = 1 << 16;

/// Largest grid the doubling loops will try.
const MAX_GRID: usize = 1 << 22;

/// `Σ_{k=m}^{n} c_k e^{ikx}` by Horner's rule in `e^{ix}`.
pub fn partial_sum(c: &ComplexSeq, m: usize, n: usize, x: f64) -> Complex64 {
    assert!(1 <= m && m <= n, "partial sum needs 1 <= m <= n");
    let z = Complex64::from_polar(1.0, x);
    let mut acc = Complex64::default();
    for k in (m..=n).rev() {
        acc = acc * z + c.get(k);
    }
    acc * Complex64::from_polar(1.0, m as f64 * x)
}

/// `(4π/x)(|a_m|/2 + Σ_{k=m}^{n-1} |a_{k+1} - a_k|)`.
pub fn variation_bound(c: &ComplexSeq, m: usize, n: usize, x: f64) -> f64 {
    let var: f64 = (m..n).map(|k| (c.get(k + 1) - c.get(k)).norm()).sum();
    4.0 * PI / x * (c.get(m).norm() / 2.0 + var)
}

/// `(6πB/x)(|a_m| + Σ_{k=m+1}^{n} |a_k|/k)`.
pub fn gm2_partial_bound(c: &ComplexSeq, m: usize, n: usize, x: f64, b: f64) -> f64 {
    let tail: f64 = (m + 1..=n).map(|k| c.get(k).norm() / k as f64).sum();
    6.0 * PI * b / x * (c.get(m).norm() + tail)
}

fn worst_over_grid(name: &str, xs: &[f64], lhs: impl Fn(f64) -> f64, rhs: impl Fn(f64) -> f64) -> VerificationReport {
    let mut worst = VerificationReport::bound(name, 0.0, 0.0, 1.0);
    let mut worst_ratio = f64::NEG_INFINITY;
    for &x in xs {
        let (l, r) = (lhs(x), rhs(x));
        let ratio = if r > 0.0 {
            l / r
        } else if l > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst = VerificationReport::bound(name, l, r, 1.0);
        }
    }
    worst
}

/// Worst grid point for `|Σ_{k=m}^n a_k e^{ikx}| <= (4π/x)(|a_m|/2 + Σ|Δa_k|)`.
pub fn dirichlet_bound_report(c: &ComplexSeq, m: usize, n: usize, xs: &[f64]) -> VerificationReport {
    worst_over_grid("partial sum by variation", xs, |x| partial_sum(c, m, n, x).norm(), |x| variation_bound(c, m, n, x))
}

/// Worst grid point for the partial-sum bound with the measured `GMS₂` constant.
pub fn gm2_partial_report(c: &ComplexSeq, m: usize, n: usize, xs: &[f64]) -> VerificationReport {
    let b = gms2_constant(c).constant;
    worst_over_grid(
        "partial sum by GMS2 tail",
        xs,
        |x| partial_sum(c, m, n, x).norm(),
        |x| gm2_partial_bound(c, m, n, x, b),
    )
}

/// Uniform grid of `count` points in `(0, π]`.
pub fn x_grid(count: usize) -> Vec<f64> {
    (1..=count).map(|i| PI * i as f64 / count as f64).collect()
}

/// `∫_0^π |Σ c_k e^{ikx}| dx` by adaptive Gauss quadrature starting from
/// `4N` equal panels.
pub fn l1_norm_trig(c: &ComplexSeq, tol: f64) -> Result<f64> {
    let n = c.len();
    if n == 0 {
        return Ok(0.0);
    }
    let panels = 4 * n;
    let knots: Vec<f64> = (0..=panels).map(|i| PI * i as f64 / panels as f64).collect();
    Adaptive::new(tol).integrate_panels(|x| partial_sum(c, 1, n, x).norm(), &knots)
}

/// `Σ_{k>=2} |c_k| ln k / k`.
pub fn l1_log_norm(c: &ComplexSeq) -> f64 {
    c.as_slice().iter().enumerate().skip(1).map(|(i, z)| z.norm() * ((i + 1) as f64).ln() / (i + 1) as f64).sum()
}

/// `‖f‖_{L¹(0,π)} <= 2π|c_1| + 27πB Σ_{k>=2} |c_k| ln k / k` with `B = gms2(c)`.
pub fn l1_bound_report(c: &ComplexSeq, tol: f64) -> Result<VerificationReport> {
    let lhs = l1_norm_trig(c, tol)?;
    let b = gms2_constant(c).constant;
    let rhs = 2.0 * PI * c.get(1).norm() + 27.0 * PI * b * l1_log_norm(c);
    Ok(VerificationReport::bound("L1 of GMS2 series", lhs, rhs, 1.0))
}

/// `|f(x_i)|` at the midpoints `x_i = (i + 1/2)π/M`, computed with one FFT of length `2M`.
pub fn sample_moduli(c: &ComplexSeq, m: usize) -> Vec<f64> {
    let n = c.len();
    let len = 2 * m.max(1);
    // f(x_i) = Σ_k c_k e^{ikπ/(2M)} e^{2πi k i / (2M)}; the second factor has period 2M in k
    let mut buf = vec![Complex64::default(); len];
    for k in 1..=n {
        let twist = Complex64::from_polar(1.0, PI * k as f64 / len as f64);
        buf[k % len] += c.get(k) * twist;
    }
    FftPlanner::new().plan_fft_inverse(len).process(&mut buf);
    buf.iter().take(m).map(|z| z.norm()).collect()
}

/// Sampled decreasing rearrangement of `|f_N|` on `(0, π)`.
pub fn sampled_rearrangement(c: &ComplexSeq, m: usize) -> DecreasingStep {
    DecreasingStep::from_samples(&sample_moduli(c, m), PI / m as f64)
}

/// `sup_α α λ{x ∈ (0,π) : |f(x)| > α}` on a grid of `m` samples:
/// the largest `|f|_{(j)} (j+1) h` over the decreasingly sorted samples.
pub fn weak_l1_sampled(c: &ComplexSeq, m: usize) -> f64 {
    let mut s = sample_moduli(c, m);
    s.sort_by(|a, b| b.total_cmp(a));
    let h = PI / m as f64;
    s.iter().enumerate().map(|(j, &v)| v * (j + 1) as f64 * h).fold(0.0, f64::max)
}

/// Result of a grid-doubling estimate.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Refined {
    pub value: f64,
    pub grid: usize,
    /// Relative change from the previous grid.
    pub drift: f64,
}

/// Doubles the grid from `start` until the estimate moves by less than `rel`.
pub fn refine_grid(start: usize, rel: f64, est: impl Fn(usize) -> f64) -> Result<Refined> {
    let mut m = start.max(2);
    let mut prev = est(m);
    loop {
        let next_m = 2 * m;
        if next_m > MAX_GRID {
            return Err(Error::NonConvergence { tol: rel, depth: m.trailing_zeros() });
        }
        let next = est(next_m);
        let drift = if next == prev { 0.0 } else { (next - prev).abs() / next.abs().max(prev.abs()) };
        if drift < rel {
            return Ok(Refined { value: next, grid: next_m, drift });
        }
        m = next_m;
        prev = next;
    }
}

/// `‖f‖_{L(1,∞)(0,π)} <= 6πB ‖c‖_{l¹_{1/k}}` with `B = gms2(c)`, the left side
/// sampled on a grid doubled until it moves by less than 0.1%.
pub fn weak_l1_report(c: &ComplexSeq, grid: usize) -> Result<VerificationReport> {
    let lhs = refine_grid(grid, 1e-3, |m| weak_l1_sampled(c, m))?.value;
    let b = gms2_constant(c).constant;
    let rhs = 6.0 * PI * b * l1_over_k(c);
    Ok(VerificationReport::bound("weak L1 of GMS2 series", lhs, rhs, 1.0))
}

/// `c_n = (1/2π) ∫_0^{2π} f(t) e^{-int} dt` for `n = -half..=half`, exactly per piece.
pub fn fourier_coeffs_step(f: &StepFunction, half: usize) -> Result<TwoSidedSeq> {
    if f.support_end() > 2.0 * PI * (1.0 + 1e-15) {
        return Err(Error::InvalidParameter(format!(
            "step function must be supported in (0, 2π], ends at {}",
            f.support_end()
        )));
    }
    let coeff = |n: i64| -> Complex64 {
        f.pieces()
            .map(|(a, b, v)| {
                if n == 0 {
                    v * (b - a)
                } else {
                    let nf = n as f64;
                    let e = |x: f64| Complex64::from_polar(1.0, -nf * x);
                    v * (e(a) - e(b)) / Complex64::new(0.0, nf)
                }
            })
            .sum::<Complex64>()
            / (2.0 * PI)
    };
    TwoSidedSeq::new((-(half as i64)..=half as i64).map(coeff).collect())
}

/// `(1/(2n+1)) Σ_{k=-n}^{n} c_k`.
pub fn cesaro_mean(c: &TwoSidedSeq, n: usize) -> Complex64 {
    let n = n as i64;
    (-n..=n).map(|k| c.get(k)).sum::<Complex64>() / (2 * n + 1) as f64
}

/// Both sides of Parseval's identity for a step function on `(0, 2π]`:
/// `(Σ_n |c_n|², (1/2π)∫|f|²)`, each in closed form.
///
/// With jumps `d_j` of `f` at `x_j`, `c_n = (1/2πin) Σ d_j e^{-inx_j}` for
/// `n != 0`, and `Σ_{n != 0} e^{-inθ}/n² = π²/3 - πθ + θ²/2` for `θ ∈ [0, 2π]`.
pub fn parseval_sides(f: &StepFunction) -> Result<(f64, f64)> {
    let c0 = fourier_coeffs_step(f, 0)?.get(0);
    let mut xs = vec![0.0];
    xs.extend_from_slice(f.breakpoints());
    let vals = f.values();
    let jumps: Vec<Complex64> = (0..xs.len())
        .map(|j| {
            let right = vals.get(j).copied().unwrap_or_default();
            let left = if j == 0 { Complex64::default() } else { vals[j - 1] };
            right - left
        })
        .collect();
    let kernel = |theta: f64| PI * PI / 3.0 - PI * theta + theta * theta / 2.0;
    let mut cross = Complex64::default();
    for (j, dj) in jumps.iter().enumerate() {
        for (l, dl) in jumps.iter().enumerate() {
            cross += dj * dl.conj() * kernel((xs[j] - xs[l]).abs());
        }
    }
    let coeff_side = c0.norm_sqr() + cross.re / (4.0 * PI * PI);
    let fn_side: f64 = f.pieces().map(|(a, b, v)| v.norm_sqr() * (b - a)).sum::<f64>() / (2.0 * PI);
    Ok((coeff_side, fn_side))
}

/// `‖{m(σ_n)}_{n=0..=half}‖_{l(p,q)} / ‖f‖_{L(p',q)(0,2π)}` where `σ_n` are
/// the Cesàro means of the coefficients of `f` and `m` is the bell majorant.
pub fn cesaro_majorant_ratio(f: &StepFunction, pq: PQ, half: usize) -> Result<f64> {
    pq.require_lorentz()?;
    let coeffs = fourier_coeffs_step(f, half)?;
    let means: Vec<Complex64> = (0..=half).map(|n| cesaro_mean(&coeffs, n)).collect();
    // majorant of the even extension, read off for n >= 0
    let mut sym = means.iter().rev().copied().collect::<Vec<_>>();
    sym.extend(means.iter().skip(1).copied());
    let m = bell_majorant(&TwoSidedSeq::new(sym)?);
    let seq = ComplexSeq::from_real(&m[half..])?;
    let conj = PQ::new(pq.p.conjugate()?, pq.q);
    let num = lorentz_norm_seq(&seq, pq)?;
    let den = lorentz_norm_step(f, conj)?;
    Ok(num / den)
}

/// Lorentz norms on both sides of the coefficient/function duality.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DualityRatio {
    /// `‖c‖_{l(p',q)}`.
    pub seq_norm: f64,
    /// `‖f_N‖_{L(p,q)(0,π)}` from the sampled rearrangement.
    pub fn_norm: f64,
    pub ratio: f64,
    pub grid: usize,
    pub drift: f64,
}

impl DualityRatio {
    pub fn report(&self) -> VerificationReport {
        VerificationReport::with_verdict(
            "coefficient/function Lorentz ratio",
            self.seq_norm,
            self.fn_norm,
            self.ratio,
            self.drift < 1e-2,
        )
    }
}

/// `‖c‖_{l(p',q)} / ‖Σ c_k e^{ikx}‖_{L(p,q)(0,π)}` for `1 < p < ∞`; the
/// function side is the Lorentz norm of the sampled rearrangement, with the
/// grid doubled from `grid` until the ratio moves by less than 1%.
pub fn duality_ratio(c: &ComplexSeq, pq: PQ, grid: usize) -> Result<DualityRatio> {
    let p = match pq.p {
        Exponent::Finite(p) if p > 1.0 => p,
        _ => return Err(Error::InvalidParameter(format!("duality needs 1 < p < ∞, got {}", pq.p))),
    };
    let conj = PQ::new(Exponent::Finite(p / (p - 1.0)), pq.q);
    let seq_norm = lorentz_norm_seq(c, conj)?;
    let fn_at = |m: usize| weighted_norm_decreasing(&sampled_rearrangement(c, m), pq);
    let r = refine_grid(grid, 1e-2, |m| seq_norm / fn_at(m))?;
    let fn_norm = seq_norm / r.value;
    Ok(DualityRatio { seq_norm, fn_norm, ratio: r.value, grid: r.grid, drift: r.drift })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use proptest::prelude::*;

    fn seq(v: &[f64]) -> ComplexSeq {
        ComplexSeq::from_real(v).unwrap()
    }

    #[test]
    fn partial_sum_examples() {
        assert!((partial_sum(&seq(&[1.0]), 1, 1, PI) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!(partial_sum(&seq(&[1.0, 1.0]), 1, 2, PI).norm() < 1e-15);
        let ones = seq(&[1.0; 40]);
        for &x in &[0.1, 1.0, 2.5, PI] {
            let (m, n) = (3, 37);
            let e = |k: f64| Complex64::from_polar(1.0, k * x);
            let closed = (e((n + 1) as f64) - e(m as f64)) / (e(1.0) - 1.0);
            assert!((partial_sum(&ones, m, n, x) - closed).norm() < 1e-12);
        }
    }

    #[test]
    fn dirichlet_examples() {
        let c = seq(&[0.7, -0.2, 0.4]);
        let r = dirichlet_bound_report(&c, 2, 2, &x_grid(100));
        assert!(r.pass);
        let ones = seq(&[1.0; 64]);
        assert!(dirichlet_bound_report(&ones, 1, 64, &x_grid(10_000)).pass);
        assert!(gm2_partial_report(&ones, 1, 64, &x_grid(10_000)).pass);
    }

    #[test]
    fn l1_examples() {
        assert!((l1_norm_trig(&seq(&[1.0]), L1_TOL).unwrap() - PI).abs() < 1e-10);
        assert!((l1_norm_trig(&seq(&[1.0, 1.0]), L1_TOL).unwrap() - 4.0).abs() < 1e-8);
        let c = ComplexSeq::from_real(&(1..=64).map(|k| 1.0 / k as f64).collect::<Vec<_>>()).unwrap();
        assert!(l1_bound_report(&c, L1_TOL).unwrap().pass);
    }

    #[test]
    fn sampling_matches_direct_sum() {
        let c = random::complex_seq(&mut random::rng(3), 50);
        let m = 128;
        let s = sample_moduli(&c, m);
        for (i, v) in s.iter().enumerate() {
            let x = (i as f64 + 0.5) * PI / m as f64;
            assert!((v - partial_sum(&c, 1, 50, x).norm()).abs() < 1e-12);
        }
        let small = sample_moduli(&c, 16);
        assert!((small[3] - partial_sum(&c, 1, 50, 3.5 * PI / 16.0).norm()).abs() < 1e-12);
    }

    #[test]
    fn weak_l1_examples() {
        assert!((weak_l1_sampled(&seq(&[1.0]), 1024) - PI).abs() < 1e-12);
        assert_eq!(weak_l1_sampled(&ComplexSeq::zeros(3), 64), 0.0);
        let c = ComplexSeq::from_real(&(1..=256).map(|k| 1.0 / k as f64).collect::<Vec<_>>()).unwrap();
        let r = weak_l1_report(&c, DEFAULT_GRID).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn coefficient_examples() {
        let one = StepFunction::from_real(vec![2.0 * PI], &[1.0]).unwrap();
        let c = fourier_coeffs_step(&one, 4).unwrap();
        assert!((c.get(0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((1..=4).all(|n| c.get(n).norm() < 1e-15 && c.get(-n).norm() < 1e-15));
        let half = StepFunction::from_real(vec![PI], &[1.0]).unwrap();
        let c = fourier_coeffs_step(&half, 5).unwrap();
        assert!((c.get(0).re - 0.5).abs() < 1e-15);
        for n in 1..=5i64 {
            let want = (1.0 - (-1f64).powi(n as i32)) / (2.0 * PI * n as f64);
            // (1 - (-1)^n)/(2πin) = -i (1 - (-1)^n)/(2πn)
            assert!((c.get(n) - Complex64::new(0.0, -want)).norm() < 1e-15);
        }
        let sum = one.add(&half);
        let cs = fourier_coeffs_step(&sum, 5).unwrap();
        let a = fourier_coeffs_step(&one, 5).unwrap();
        assert!((-5..=5).all(|n| (cs.get(n) - a.get(n) - c.get(n)).norm() < 1e-15));
        let wide = StepFunction::from_real(vec![7.0], &[1.0]).unwrap();
        assert!(fourier_coeffs_step(&wide, 1).is_err());
    }

    #[test]
    fn cesaro_examples() {
        let c =
            TwoSidedSeq::new(vec![Complex64::new(1.0, 0.0), Complex64::default(), Complex64::new(1.0, 0.0)]).unwrap();
        assert_eq!(cesaro_mean(&c, 0), Complex64::default());
        assert!((cesaro_mean(&c, 1).re - 2.0 / 3.0).abs() < 1e-15);
        let ones = TwoSidedSeq::new(vec![Complex64::new(1.0, 0.0); 7]).unwrap();
        assert!((cesaro_mean(&ones, 3).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn duality_examples() {
        let pq = PQ::from_f64(2.0, 2.0).unwrap();
        let e1 = seq(&[1.0]);
        let d = duality_ratio(&e1, pq, 1024).unwrap();
        // |f| = 1 on (0, π): L(2,2) norm is sqrt(π)
        assert!((d.fn_norm - PI.sqrt()).abs() < 1e-12);
        let c = ComplexSeq::from_real(&(1..=256).map(|k| (k as f64).powf(-0.5)).collect::<Vec<_>>()).unwrap();
        let d = duality_ratio(&c, pq, DEFAULT_GRID).unwrap();
        assert!(d.drift < 1e-2);
        let scaled = duality_ratio(&c.scale(Complex64::new(0.0, 3.0)), pq, DEFAULT_GRID).unwrap();
        assert!((scaled.ratio - d.ratio).abs() < 1e-12 * d.ratio);
    }

    #[test]
    fn cesaro_ratio_is_stable() {
        let f = StepFunction::from_real(vec![1.0, 2.5, 2.0 * PI], &[2.0, -1.0, 0.5]).unwrap();
        let pq = PQ::from_f64(2.0, 2.0).unwrap();
        let rs: Vec<f64> = [64, 128, 256, 512].iter().map(|&n| cesaro_majorant_ratio(&f, pq, n).unwrap()).collect();
        let (lo, hi) = rs.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
        assert!(lo > 0.0 && hi.is_finite() && hi / lo < 1.1, "{rs:?}");
    }

    proptest! {
        #[test]
        fn variation_bound_holds(seed in 0u64..10_000, n in 1usize..80, m_frac in 0.0..1.0f64) {
            let c = random::complex_seq(&mut random::rng(seed), n);
            let m = 1 + ((n - 1) as f64 * m_frac) as usize;
            prop_assert!(dirichlet_bound_report(&c, m, n, &x_grid(500)).pass);
        }

        #[test]
        fn parseval(seed in 0u64..10_000) {
            let mut rng = random::rng(seed);
            let f = random::step_function(&mut rng, 8);
            let scale = 2.0 * PI / f.support_end() * 0.999;
            let g = StepFunction::new(f.breakpoints().iter().map(|x| x * scale).collect(), f.values().to_vec()).unwrap();
            let (a, b) = parseval_sides(&g).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * b.max(1.0), "{} vs {}", a, b);
        }
    }
}
