//! The couple `(l¹_{1/k}, l¹)`: its K-functional, the `(θ, q; K)` norm, the
//! Gilbert functional with window `[t, 2t)`, and the decomposition of a
//! sector-valued sequence that nearly attains the K-functional.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ComplexSeq, Exponent, Sector};
use crate::norms::{l1, l1_over_k};
use crate::par;
use crate::quad::Adaptive;

/// Relative tolerance for the quadrature pieces of the interpolation norm.
pub const QUAD_TOL: f64 = 1e-10;

/// Constant bounding `cost / K` for the decomposition.
pub const DECOMPOSITION_BOUND: f64 = 4.5;

fn trimmed_moduli(c: &ComplexSeq) -> Vec<f64> {
    let mut m = c.moduli();
    while m.last() == Some(&0.0) {
        m.pop();
    }
    m
}

/// `K(t, c) = t Σ_{n <= 1/t} |c_n| + Σ_{n > 1/t} |c_n| / n`.
pub fn k_functional(c: &ComplexSeq, t: f64) -> f64 {
    assert!(t > 0.0, "K-functional needs t > 0");
    let cut = 1.0 / t;
    let mut head = 0.0;
    let mut tail = 0.0;
    for (i, z) in c.as_slice().iter().enumerate() {
        let n = (i + 1) as f64;
        if n <= cut {
            head += z.norm();
        } else {
            tail += z.norm() / n;
        }
    }
    t * head + tail
}

/// Infimum of `Σ |b_n|/n + t Σ |d_n|` over `b + d = c`, found coordinate by
/// coordinate over `b_n = s c_n + r e^{iψ} c_n/|c_n|` for `s` on a grid of
/// `grid_resolution + 1` points in `[0, 1]` and small off-line offsets `r`.
pub fn k_functional_oracle(c: &ComplexSeq, t: f64, grid_resolution: usize) -> f64 {
    assert!(t > 0.0, "K-functional needs t > 0");
    let res = grid_resolution.max(1);
    let offsets: Vec<Complex64> = (0..8)
        .flat_map(|k| {
            let dir = Complex64::from_polar(1.0, k as f64 * std::f64::consts::FRAC_PI_4);
            [1e-3, 1e-1].map(|r| dir * r)
        })
        .collect();
    c.as_slice()
        .iter()
        .enumerate()
        .map(|(i, &cn)| {
            let w = 1.0 / (i + 1) as f64;
            let cost = |b: Complex64| b.norm() * w + t * (cn - b).norm();
            let mut best = f64::INFINITY;
            for k in 0..=res {
                let b = cn * (k as f64 / res as f64);
                best = best.min(cost(b));
                for &o in &offsets {
                    best = best.min(cost(b + o * cn));
                }
            }
            best
        })
        .sum()
}

/// `‖t^{-θ} K(t, c)‖_{L^q(dt/t)}`.
///
/// `K` is `t A` on `(0, 1/N]`, `R` on `[1, ∞)` and `t S_m + R_m` on
/// `[1/(m+1), 1/m]`. End pieces are integrated in closed form; the middle
/// pieces in the variable `u = ln t`. For `q = ∞` the supremum is taken over
/// the knots and the stationary point `t = θ R_m / ((1-θ) S_m)` of each piece.
/// `θ ∈ {0, 1}` is accepted only with `q = ∞`.
pub fn interpolation_norm(c: &ComplexSeq, theta: f64, q: Exponent) -> Result<f64> {
    let edge = theta == 0.0 || theta == 1.0;
    if !(theta > 0.0 && theta < 1.0 || edge && q.is_infinite()) {
        return Err(Error::InvalidParameter(format!("theta must lie in (0,1), got {theta}")));
    }
    let m = trimmed_moduli(c);
    let n = m.len();
    if n == 0 {
        return Ok(0.0);
    }
    // s[k] = Σ_{j<=k} |c_j|, r[k] = Σ_{j>k} |c_j|/j
    let mut s = vec![0.0; n + 1];
    for k in 1..=n {
        s[k] = s[k - 1] + m[k - 1];
    }
    let mut r = vec![0.0; n + 1];
    for k in (0..n).rev() {
        r[k] = r[k + 1] + m[k] / (k + 1) as f64;
    }
    let total = s[n];
    let tail_const = r[0];
    let k_at = |t: f64, k: usize| t * s[k] + r[k];
    match q {
        Exponent::Infinite => {
            if theta == 0.0 {
                return Ok(tail_const);
            }
            if theta == 1.0 {
                return Ok(total);
            }
            let h = |t: f64, k: usize| t.powf(-theta) * k_at(t, k);
            let mut best = h(1.0 / n as f64, n).max(h(1.0, 1));
            for k in 1..n {
                let (lo, hi) = (1.0 / (k + 1) as f64, 1.0 / k as f64);
                best = best.max(h(lo, k)).max(h(hi, k));
                if s[k] > 0.0 && r[k] > 0.0 {
                    let ts = theta * r[k] / ((1.0 - theta) * s[k]);
                    if ts > lo && ts < hi {
                        best = best.max(h(ts, k));
                    }
                }
            }
            Ok(best)
        }
        Exponent::Finite(q) => {
            let left = total.powf(q) * (n as f64).powf(-(1.0 - theta) * q) / ((1.0 - theta) * q);
            let right = tail_const.powf(q) / (theta * q);
            let pieces = par::map_range(1, n, |k| {
                let (lo, hi) = ((1.0 / (k + 1) as f64).ln(), (1.0 / k as f64).ln());
                let g = |u: f64| {
                    let t = u.exp();
                    (t.powf(-theta) * k_at(t, k)).powf(q)
                };
                Adaptive::new(QUAD_TOL).integrate(g, lo, hi)
            });
            let mut mid = 0.0;
            for p in pieces {
                mid += p?;
            }
            Ok((left + mid + right).powf(1.0 / q))
        }
    }
}

/// `(∫_0^∞ (t^{θ-1} Σ_{t <= k < 2t} |c_k|)^q dt/t)^{1/q}` in closed form.
///
/// The window sum is constant between consecutive points of `{k} ∪ {k/2}`;
/// on such an interval `(u, w]` it equals `Σ_{w <= k <= 2u} |c_k|`.
pub fn gilbert_functional(c: &ComplexSeq, theta: f64, q: Exponent) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParameter(format!("theta must lie in (0,1), got {theta}")));
    }
    let m = trimmed_moduli(c);
    let n = m.len();
    if n == 0 {
        return Ok(0.0);
    }
    let mut pre = vec![0.0; n + 1];
    for k in 1..=n {
        pre[k] = pre[k - 1] + m[k - 1];
    }
    // breakpoints in half-integer units: t = h/2 for h = 1..=2n
    let window = |h: usize| {
        // interval (h/2, (h+1)/2]: k from ceil((h+1)/2) to h
        let lo = (h + 1).div_ceil(2);
        let hi = h.min(n);
        if lo > hi {
            0.0
        } else {
            pre[hi] - pre[lo - 1]
        }
    };
    let e = theta - 1.0;
    match q {
        Exponent::Infinite => Ok((1..2 * n).map(|h| window(h) * (h as f64 / 2.0).powf(e)).fold(0.0, f64::max)),
        Exponent::Finite(q) => {
            let eq = e * q;
            let sum: f64 = (1..2 * n)
                .map(|h| {
                    let g = window(h);
                    if g == 0.0 {
                        return 0.0;
                    }
                    let (u, w) = (h as f64 / 2.0, (h + 1) as f64 / 2.0);
                    g.powf(q) * (w.powf(eq) - u.powf(eq)) / eq
                })
                .sum();
            Ok(sum.powf(1.0 / q))
        }
    }
}

/// Bracket for `gilbert_functional(c, θ, q) / weighted_norm_seq(c, (1/θ, q))`
/// on sequences with almost-monotone constant `b`:
/// `[κ_lo^{1/q} / (2b), 2b κ_up^{1/q}]` with `κ_up = max{1, 1/(θq), 2^{1-θq}}`
/// and `κ_lo = min{1/2, 2^{-θq}}`.
pub fn gilbert_bracket(theta: f64, q: f64, b: f64) -> (f64, f64) {
    let tq = theta * q;
    let up = 1f64.max(1.0 / tq).max(2f64.powf(1.0 - tq));
    let lo = 0.5f64.min(2f64.powf(-tq));
    let b = b.max(1.0);
    (lo.powf(1.0 / q) / (2.0 * b), 2.0 * b * up.powf(1.0 / q))
}

/// The tighter bracket `[min{1/2, 2^{1-θq}} / b, b max{1, 1/(θq), 2^{1-θq}}]`.
/// Its lower end is not universal: for `c = e_1`, `θ = 0.9`, `q = 1/2` the
/// ratio is about 0.4975.
pub fn gilbert_bracket_tight(theta: f64, q: f64, b: f64) -> (f64, f64) {
    let tq = theta * q;
    let up = 1f64.max(1.0 / tq).max(2f64.powf(1.0 - tq));
    let lo = 0.5f64.min(2f64.powf(1.0 - tq));
    let b = b.max(1.0);
    (lo / b, b * up)
}

/// A splitting `c = b + d` together with its cost against `K(t, c)`.
#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    #[serde(serialize_with = "ser_seq")]
    pub b: ComplexSeq,
    #[serde(serialize_with = "ser_seq")]
    pub d: ComplexSeq,
    pub t: f64,
    /// `‖b‖_{l¹_{1/k}} + t ‖d‖_{l¹}`.
    pub cost: f64,
    pub k_value: f64,
    pub ratio: f64,
}

fn ser_seq<S: serde::Serializer>(c: &ComplexSeq, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("ComplexSeq", 2)?;
    st.serialize_field("re", &c.as_slice().iter().map(|z| z.re).collect::<Vec<_>>())?;
    st.serialize_field("im", &c.as_slice().iter().map(|z| z.im).collect::<Vec<_>>())?;
    st.end()
}

impl Decomposition {
    pub fn within_bound(&self) -> bool {
        self.ratio <= DECOMPOSITION_BOUND * (1.0 + 1e-12)
    }

    /// Whether `b_n + d_n = c_n` up to rounding.
    pub fn reconstructs(&self, c: &ComplexSeq) -> bool {
        let len = c.len().max(self.b.len()).max(self.d.len());
        (1..=len).all(|n| {
            let z = c.get(n);
            (self.b.get(n) + self.d.get(n) - z).norm() <= 1e-12 * z.norm().max(1.0)
        })
    }
}

/// For `t <= 1`: with `N = 1 + ⌊1/t⌋` and `σ_N = (1/N) Σ_{k<=N} |c_k|`, take
/// `a_n = (n/N) σ_N e^{iα}`, `b = a` on `[1, N]` and `c` beyond, `d = c - a`
/// on `[1, N]`. For `t > 1`, `b = c` and `d = 0`.
pub fn gms_decomposition(c: &ComplexSeq, t: f64, sector: &Sector) -> Result<Decomposition> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    let k_value = k_functional(c, t);
    let (b, d) = if t > 1.0 {
        (c.clone(), ComplexSeq::zeros(0))
    } else {
        let n_cut = 1 + (1.0 / t).floor() as usize;
        let sigma: f64 = (1..=n_cut).map(|k| c.get(k).norm()).sum::<f64>() / n_cut as f64;
        let dir = sector.direction();
        let len = n_cut.max(c.len());
        let mut b = Vec::with_capacity(len);
        let mut d = Vec::with_capacity(n_cut);
        for n in 1..=len {
            if n <= n_cut {
                let a = dir * (n as f64 / n_cut as f64 * sigma);
                b.push(a);
                d.push(c.get(n) - a);
            } else {
                b.push(c.get(n));
            }
        }
        (ComplexSeq::new(b)?, ComplexSeq::new(d)?)
    };
    let cost = l1_over_k(&b) + t * l1(&d);
    let ratio = if k_value == 0.0 {
        if cost == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        cost / k_value
    };
    Ok(Decomposition { b, d, t, cost, k_value, ratio })
}

/// `count` points spaced logarithmically over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gm::{gms1_constant, gms_constant};
    use crate::model::PQ;
    use crate::norms::weighted_norm_seq;
    use crate::random;
    use proptest::prelude::*;

    fn seq(v: &[f64]) -> ComplexSeq {
        ComplexSeq::from_real(v).unwrap()
    }

    #[test]
    fn k_examples() {
        assert_eq!(k_functional(&seq(&[1.0]), 0.5), 0.5);
        let ones = seq(&[1.0; 8]);
        let want = 4.0 * 0.25 + 1.0 / 5.0 + 1.0 / 6.0 + 1.0 / 7.0 + 1.0 / 8.0;
        assert!((k_functional(&ones, 0.25) - want).abs() < 1e-15);
        assert!((k_functional(&ones, 0.25) - 1.634524).abs() < 1e-6);
        assert!((k_functional(&ones, 3.0) - l1_over_k(&ones)).abs() < 1e-15);
        assert_eq!(k_functional_oracle(&ComplexSeq::zeros(4), 0.3, 10), 0.0);
        assert_eq!(k_functional_oracle(&seq(&[1.0]), 2.0, 10), 1.0);
    }

    #[test]
    fn interpolation_examples() {
        let e1 = seq(&[1.0]);
        let v = interpolation_norm(&e1, 0.5, Exponent::Finite(2.0)).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-12);
        assert!((interpolation_norm(&e1, 0.5, Exponent::Infinite).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(interpolation_norm(&ComplexSeq::zeros(3), 0.5, Exponent::Finite(2.0)).unwrap(), 0.0);
        assert!(interpolation_norm(&e1, 1.0, Exponent::Finite(2.0)).is_err());
    }

    #[test]
    fn gilbert_examples() {
        let e1 = seq(&[1.0]);
        let v = gilbert_functional(&e1, 0.5, Exponent::Finite(1.0)).unwrap();
        assert!((v - 2.0 * (2f64.sqrt() - 1.0)).abs() < 1e-14);
        assert_eq!(gilbert_functional(&ComplexSeq::zeros(2), 0.5, Exponent::Finite(1.0)).unwrap(), 0.0);
        let c = ComplexSeq::from_real(&(1..=256).map(|k| 1.0 / k as f64).collect::<Vec<_>>()).unwrap();
        let g = gilbert_functional(&c, 0.5, Exponent::Finite(2.0)).unwrap();
        let w = weighted_norm_seq(&c, PQ::from_f64(2.0, 2.0).unwrap());
        let b = gms1_constant(&c).constant;
        let (lo, hi) = gilbert_bracket(0.5, 2.0, b);
        assert!(lo <= g / w && g / w <= hi, "{}", g / w);
    }

    /// Oracle for the Gilbert functional: window sums at many points of each
    /// unit of length, integrated by the midpoint rule in `ln t`.
    fn gilbert_oracle(c: &ComplexSeq, theta: f64, q: f64) -> f64 {
        let n = c.len() as f64;
        let steps = 200_000;
        let (a, b) = ((0.25f64).ln(), (n + 1.0).ln());
        let h = (b - a) / steps as f64;
        let mut total = 0.0;
        for i in 0..steps {
            let t = (a + (i as f64 + 0.5) * h).exp();
            let g: f64 =
                (1..=c.len()).filter(|&k| t <= k as f64 && (k as f64) < 2.0 * t).map(|k| c.get(k).norm()).sum();
            total += (t.powf(theta - 1.0) * g).powf(q) * h;
        }
        total.powf(1.0 / q)
    }

    #[test]
    fn tight_bracket_lower_end_can_fail() {
        let e1 = seq(&[1.0]);
        let r = gilbert_functional(&e1, 0.9, Exponent::Finite(0.5)).unwrap();
        let w = weighted_norm_seq(&e1, PQ::from_f64(1.0 / 0.9, 0.5).unwrap());
        assert!(r / w < gilbert_bracket_tight(0.9, 0.5, 1.0).0);
        let (lo, hi) = gilbert_bracket(0.9, 0.5, 1.0);
        assert!(lo <= r / w && r / w <= hi);
    }

    #[test]
    fn gilbert_matches_oracle() {
        let c = seq(&[1.0, 0.5, 2.0, 0.25, 0.125]);
        for &(theta, q) in &[(0.25, 0.5), (0.5, 1.0), (0.75, 2.0)] {
            let exact = gilbert_functional(&c, theta, Exponent::Finite(q)).unwrap();
            let oracle = gilbert_oracle(&c, theta, q);
            assert!((exact - oracle).abs() < 1e-3 * exact, "{exact} vs {oracle}");
        }
    }

    #[test]
    fn decomposition_worked_instance() {
        let ones = seq(&[1.0; 8]);
        let s = Sector::with_default_tol(0.0, 0.5).unwrap();
        let d = gms_decomposition(&ones, 0.25, &s).unwrap();
        let b: Vec<f64> = d.b.as_slice().iter().map(|z| z.re).collect();
        let want = [0.2, 0.4, 0.6, 0.8, 1.0, 1.0, 1.0, 1.0];
        assert!(b.iter().zip(want).all(|(x, y)| (x - y).abs() < 1e-15));
        assert_eq!(d.d.len(), 5);
        assert!((d.cost - 1.934524).abs() < 1e-6);
        assert!((d.k_value - 1.634524).abs() < 1e-6);
        assert!((d.ratio - 1.1835).abs() < 1e-4);
        assert!(d.within_bound() && d.reconstructs(&ones));
        let d2 = gms_decomposition(&ones, 2.0, &s).unwrap();
        assert_eq!(d2.b, ones);
        assert!((d2.cost - d2.k_value).abs() < 1e-15);
        let z = gms_decomposition(&ComplexSeq::zeros(4), 0.1, &s).unwrap();
        assert_eq!((z.cost, z.k_value), (0.0, 0.0));
    }

    proptest! {
        #[test]
        fn k_equals_oracle(v in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 0..40), lt in -3.0..1.0f64) {
            let c = ComplexSeq::new(v.iter().map(|&(r, i)| Complex64::new(r, i)).collect()).unwrap();
            let t = 10f64.powf(lt);
            let k = k_functional(&c, t);
            let min_form: f64 = c.as_slice().iter().enumerate().map(|(i, z)| z.norm() * (1.0 / (i + 1) as f64).min(t)).sum();
            prop_assert!((k - k_functional_oracle(&c, t, 16)).abs() <= 1e-12 * k.max(1.0));
            prop_assert!((k - min_form).abs() <= 1e-12 * k.max(1.0));
        }

        #[test]
        fn k_concave_nondecreasing(v in prop::collection::vec(0.0..2.0f64, 1..30)) {
            let c = seq(&v);
            let ts = log_grid(1e-3, 1e1, 60);
            let ks: Vec<f64> = ts.iter().map(|&t| k_functional(&c, t)).collect();
            for i in 1..ts.len() {
                prop_assert!(ks[i] >= ks[i - 1] * (1.0 - 1e-12));
                prop_assert!(ks[i] / ts[i] <= ks[i - 1] / ts[i - 1] * (1.0 + 1e-12));
            }
            for i in 1..ts.len() - 1 {
                let w = (ts[i] - ts[i - 1]) / (ts[i + 1] - ts[i - 1]);
                prop_assert!(ks[i] >= (1.0 - w) * ks[i - 1] + w * ks[i + 1] - 1e-12 * ks[i]);
            }
        }

        #[test]
        fn interpolation_matches_quadrature(v in prop::collection::vec(0.0..2.0f64, 1..12), theta in 0.2..0.8f64, q in 1.0..3.0f64) {
            let c = seq(&v);
            let exact = interpolation_norm(&c, theta, Exponent::Finite(q)).unwrap();
            let g = |u: f64| { let t = u.exp(); (t.powf(-theta) * k_functional(&c, t)).powf(q) };
            // tails beyond ±span are below e^{-30} of the integrand scale
            let span = 30.0 / (theta * q).min((1.0 - theta) * q);
            let knots: Vec<f64> = std::iter::once(-span)
                .chain((1..=v.len()).rev().map(|n| (1.0 / n as f64).ln()))
                .chain(std::iter::once(span))
                .collect();
            let oracle = Adaptive::new(1e-11).integrate_panels(g, &knots).unwrap().powf(1.0 / q);
            prop_assert!((exact - oracle).abs() <= 1e-8 * exact.max(1e-300));
            let sup = interpolation_norm(&c, theta, Exponent::Infinite).unwrap();
            let grid = log_grid(1e-4, 1e2, 4000).into_iter().map(|t| t.powf(-theta) * k_functional(&c, t)).fold(0.0, f64::max);
            prop_assert!(grid <= sup * (1.0 + 1e-12) && sup <= grid * 1.01 + 1e-300);
        }

        #[test]
        fn decomposition_bounds(seed in 0u64..1000, alpha in 0.0..std::f64::consts::TAU, phi in 0.0..1.04f64) {
            let s = Sector::with_default_tol(alpha, phi).unwrap();
            let mut rng = random::rng(seed);
            let c = random::gms_sector_seq(&mut rng, 1 + (seed as usize % 64), &s);
            let b = gms_constant(&c).constant;
            for t in log_grid(1e-3, 1e1, 50) {
                let d = gms_decomposition(&c, t, &s).unwrap();
                prop_assert!(d.within_bound(), "ratio {} at t={}", d.ratio, t);
                prop_assert!(d.reconstructs(&c));
                prop_assert!(d.b.as_slice().iter().all(|&z| s.contains(z)));
                prop_assert!(gms_constant(&d.b).constant <= 63.0 * b.max(1.0).powi(4));
            }
        }
    }
}
