//! Adaptive Gauss–Legendre quadrature (16 nodes per panel, bisection).

use std::collections::BinaryHeap;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

/// Bisection depth used when `LORENTZ_GM_MAX_DEPTH` is unset.
pub const DEFAULT_MAX_DEPTH: u32 = 40;

/// Environment variable capping the bisection depth.
pub const MAX_DEPTH_ENV: &str = "LORENTZ_GM_MAX_DEPTH";

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(16).unwrap()))
}

pub fn max_depth_from_env() -> u32 {
    std::env::var(MAX_DEPTH_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_MAX_DEPTH)
}

/// One 16-point panel.
pub fn gauss16<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    rule().integrate(a, b, f)
}

/// Adaptive quadrature settings.
#[derive(Clone, Copy, Debug)]
pub struct Adaptive {
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Adaptive {
    pub fn new(rel_tol: f64) -> Self {
        Adaptive { rel_tol, max_depth: max_depth_from_env() }
    }

    /// `∫_a^b f` to relative tolerance.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        self.integrate_panels(f, &[a, b])
    }

    /// `∫` over consecutive panels `[knots[i], knots[i+1]]` with one global
    /// relative tolerance. The panel with the largest error estimate is
    /// bisected until the summed estimate is below the tolerance.
    pub fn integrate_panels<F: Fn(f64) -> f64>(&self, f: F, knots: &[f64]) -> Result<f64> {
        let mut heap = BinaryHeap::new();
        for w in knots.windows(2) {
            heap.push(Panel::new(&f, w[0], w[1], 0));
        }
        let mut steps = 0usize;
        loop {
            // Full re-summation keeps the running totals free of drift.
            let (total, err, scale) =
                heap.iter().fold((0.0, 0.0, 0.0), |(t, e, s), p: &Panel| (t + p.value, e + p.err, s + p.value.abs()));
            if !total.is_finite() || !err.is_finite() {
                return Err(Error::NonConvergence { tol: self.rel_tol, depth: 0 });
            }
            if err <= self.rel_tol * scale || err <= 8.0 * f64::EPSILON * scale {
                return Ok(total);
            }
            let (mut err_left, target) = (err, self.rel_tol * scale);
            while err_left > target {
                let Some(worst) = heap.pop() else { return Ok(0.0) };
                if worst.depth >= self.max_depth {
                    return Err(Error::NonConvergence { tol: self.rel_tol, depth: worst.depth });
                }
                let m = 0.5 * (worst.a + worst.b);
                let l = Panel::new(&f, worst.a, m, worst.depth + 1);
                let r = Panel::new(&f, m, worst.b, worst.depth + 1);
                err_left += l.err + r.err - worst.err;
                heap.push(l);
                heap.push(r);
                steps += 1;
                if steps.is_multiple_of(1024) {
                    break;
                }
            }
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    depth: u32,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, depth: u32) -> Self {
        let m = 0.5 * (a + b);
        let whole = gauss16(f, a, b);
        let value = gauss16(f, a, m) + gauss16(f, m, b);
        Panel { a, b, value, err: (value - whole).abs(), depth }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err).is_eq()
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}
