//! The acceptance suite: eleven seeded batches of inequality checks, each
//! with a violation count, the worst observed ratio against its bound and a
//! runtime budget.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::fourier::{self, DEFAULT_GRID, L1_TOL};
use crate::gm::{gm_constant_plain, gms1_constant, gms2_constant, gms_constant, splice, GmVariant};
use crate::hardy;
use crate::interpolate::{
    self, gilbert_bracket, gilbert_bracket_tight, gilbert_functional, k_functional, k_functional_oracle, log_grid,
};
use crate::model::{ComplexSeq, Exponent, HeadedStepFunction, PowerHead, Sector, PQ};
use crate::norms::{equivalence_report, weighted_norm_seq};
use crate::par;
use crate::random::{self, TestRng};
use crate::rearrange::{distribution_step, rearrange_seq, rearrange_step};

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub checks: usize,
    pub violations: usize,
    /// Largest `lhs / (constant · rhs)` seen, or the largest deviation for equalities.
    pub worst: f64,
    pub note: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionResult {
    pub fn pass(&self) -> bool {
        self.violations == 0 && self.checks > 0
    }

    pub fn within_budget(&self) -> bool {
        self.elapsed <= self.budget
    }

    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<34} checks={:<7} violations={:<3} worst={:<12.6e} time={:.2}s/{}s {}",
            if self.pass() && self.within_budget() { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.checks,
            self.violations,
            self.worst,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.note
        )
    }
}

/// Accumulates pass/fail counts and the worst normalized ratio.
#[derive(Default)]
struct Tally {
    checks: usize,
    violations: usize,
    worst: f64,
    notes: Vec<String>,
}

impl Tally {
    /// `value <= bound` with relative slack.
    fn le(&mut self, value: f64, bound: f64) {
        self.checks += 1;
        let r = if bound > 0.0 {
            value / bound
        } else if value > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if r.is_nan() || r > 1.0 + 1e-12 {
            self.violations += 1;
        }
        if r > self.worst || r.is_nan() {
            self.worst = r;
        }
    }

    /// `|a - b| <= tol * max(1, |b|)`.
    fn close(&mut self, a: f64, b: f64, tol: f64) {
        self.checks += 1;
        let d = if a == b { 0.0 } else { (a - b).abs() / b.abs().max(1.0) };
        if d.is_nan() || d > tol {
            self.violations += 1;
        }
        self.worst = self.worst.max(d);
    }

    fn flag(&mut self, ok: bool) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
        }
    }

    fn merge(&mut self, other: Tally) {
        self.checks += other.checks;
        self.violations += other.violations;
        self.worst = self.worst.max(other.worst);
        self.notes.extend(other.notes);
    }

    fn finish(self, id: u32, title: &'static str, budget_s: u64, start: Instant) -> CriterionResult {
        CriterionResult {
            id,
            title,
            checks: self.checks,
            violations: self.violations,
            worst: self.worst,
            note: self.notes.join("; "),
            elapsed: start.elapsed(),
            budget: Duration::from_secs(budget_s),
        }
    }
}

/// Runs `body` over `count` independent seeds derived from `seed` and merges the tallies.
fn batch(seed: u64, count: usize, body: impl Fn(&mut TestRng) -> Tally + Sync + Send) -> Tally {
    let parts = par::map_range(0, count, |i| {
        let mut rng = random::rng(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64));
        body(&mut rng)
    });
    let mut t = Tally::default();
    for p in parts {
        t.merge(p);
    }
    t
}

/// Sector-valued sequence with measured doubling constant at most `max_b`.
fn bounded_gms(rng: &mut TestRng, max_len: usize, phi_max: f64, max_b: f64) -> (ComplexSeq, Sector, f64) {
    loop {
        let s = random::sector(rng, phi_max);
        let n = rng.gen_range(1..=max_len);
        let c = random::gms_sector_seq(rng, n, &s);
        let b = gms_constant(&c).constant;
        if b <= max_b {
            return (c, s, b);
        }
    }
}

pub fn equimeasurability(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let t = batch(seed, 1000, |rng| {
        let mut t = Tally::default();
        let f = random::step_function(rng, 12);
        let fs = rearrange_step(&f);
        let top = f.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut alphas: Vec<f64> = f.values().iter().map(|z| z.norm()).collect();
        while alphas.len() < 100 {
            alphas.push(rng.gen_range(0.0..=top * 1.1 + 0.1));
        }
        alphas.truncate(100);
        for a in alphas {
            let d = distribution_step(&f, a);
            let ds = fs.distribution(a);
            t.close(ds, d, 1e-14);
        }
        t
    });
    t.finish(1, "equimeasurability", 5, start)
}

pub fn k_functional_exactness(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let t = batch(seed, 1000, |rng| {
        let mut t = Tally::default();
        let n = rng.gen_range(0..=512);
        let c = random::complex_seq(rng, n);
        let tv = 10f64.powf(rng.gen_range(-3.5..1.0));
        let k = k_functional(&c, tv);
        let oracle = k_functional_oracle(&c, tv, 8);
        t.close(k, oracle, 1e-12);
        // the two-sum display, evaluated term by term
        let cut = 1.0 / tv;
        let mut head = 0.0;
        let mut tail = 0.0;
        for (i, z) in c.as_slice().iter().enumerate() {
            let idx = (i + 1) as f64;
            if idx <= cut {
                head += z.norm();
            } else {
                tail += z.norm() / idx;
            }
        }
        t.flag(k == tv * head + tail);
        t
    });
    t.finish(2, "K-functional exactness", 5, start)
}

pub fn decomposition_bound(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let grid = log_grid(1e-3, 1e1, 50);
    let mut t = batch(seed, 200, |rng| {
        let mut t = Tally::default();
        let (c, s, b) = bounded_gms(rng, 256, PI / 3.0, 8.0);
        for &tv in &grid {
            let d = match interpolate::gms_decomposition(&c, tv, &s) {
                Ok(d) => d,
                Err(_) => {
                    t.flag(false);
                    continue;
                }
            };
            t.le(d.ratio, interpolate::DECOMPOSITION_BOUND);
            t.flag(d.reconstructs(&c));
            t.flag(d.b.as_slice().iter().all(|&z| s.contains(z)));
            t.le(gms_constant(&d.b).constant, 63.0 * b.max(1.0).powi(4));
        }
        t
    });
    let ones = ComplexSeq::from_real(&[1.0; 8]).expect("finite");
    let s0 = Sector::with_default_tol(0.0, 0.0).expect("valid sector");
    let d = interpolate::gms_decomposition(&ones, 0.25, &s0).expect("valid input");
    let k = 1.0 + 1.0 / 5.0 + 1.0 / 6.0 + 1.0 / 7.0 + 1.0 / 8.0;
    let cost = 1.0 + (1.0 / 6.0 + 1.0 / 7.0 + 1.0 / 8.0) + 0.25 * 2.0;
    let mut w = Tally::default();
    w.close(d.cost, cost, 1e-9);
    w.close(d.k_value, k, 1e-9);
    w.notes.push(format!("worked cost={:.6} K={:.6}", d.cost, d.k_value));
    t.merge(w);
    t.finish(3, "decomposition cost/K <= 9/2", 30, start)
}

pub fn splice_constant(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let t = batch(seed, 500, |rng| {
        let mut t = Tally::default();
        let s = random::sector(rng, 1.2);
        let (na, nc) = (rng.gen_range(1..=128), rng.gen_range(1..=128));
        let a = random::gms_sector_seq(rng, na, &s);
        let c = random::gms_sector_seq(rng, nc, &s);
        let n = rng.gen_range(1..=na);
        match splice(&a, &c, n) {
            Ok(sp) => t.le(sp.measured.constant, sp.predicted),
            Err(_) => t.flag(false),
        }
        t
    });
    t.finish(4, "splice constant 3B+6B^2 gamma", 10, start)
}

pub fn inclusion_constants(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let both = |t: &mut Tally, b: f64, b1: f64, b2: f64| {
        if !(b.is_finite() && b1.is_finite() && b2.is_finite()) {
            return;
        }
        // the constants are at least 1 for any nonzero input
        let (bb, m) = (b.max(1.0), b1.max(b2).max(1.0));
        t.le(b1, 2.0 * bb);
        t.le(b2, 2.0 * bb * bb);
        t.le(b, 2.0 * m * m);
    };
    let mut t = batch(seed, 500, |rng| {
        let mut t = Tally::default();
        let n = rng.gen_range(1..=256);
        let a = if rng.gen_bool(0.8) {
            let s = random::sector(rng, 1.2);
            random::gms_sector_seq(rng, n, &s)
        } else {
            random::complex_seq(rng, n)
        };
        both(&mut t, gms_constant(&a).constant, gms1_constant(&a).constant, gms2_constant(&a).constant);
        t
    });
    t.merge(batch(seed ^ 0x5151, 200, |rng| {
        let mut t = Tally::default();
        let f = random::gm1_step(rng, 12);
        let c = |v| gm_constant_plain(&f, v).constant;
        both(&mut t, c(GmVariant::Gm), c(GmVariant::Gm1), c(GmVariant::Gm2));
        t
    }));
    t.finish(5, "inclusion constants", 30, start)
}

pub fn pointwise_rearrangement(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let t = batch(seed, 500, |rng| {
        let mut t = Tally::default();
        if rng.gen_bool(0.5) {
            let s = random::sector(rng, 1.2);
            let n = rng.gen_range(1..=512);
            let a = random::gms_sector_seq(rng, n, &s);
            let b1 = gms1_constant(&a).constant;
            let star = rearrange_seq(&a);
            for n in 1..=a.len() {
                t.le(a.get(n).norm(), b1 * star[n / 2]);
            }
        } else {
            let f = random::gm1_step(rng, 12);
            let b = gm_constant_plain(&f, GmVariant::Gm1).constant;
            let fs = rearrange_step(&f);
            let end = f.support_end() * 1.1;
            for i in 1..=1000 {
                let x = end * i as f64 / 1000.0;
                t.le(f.eval(x).norm(), b * fs.left_limit(x / 2.0));
            }
        }
        t
    });
    t.finish(6, "pointwise rearrangement bounds", 10, start)
}

pub const EQUIVALENCE_PQ: [(f64, f64); 5] = [(1.0, 2.0), (2.0, 1.0), (2.0, 2.0), (3.0, 0.5), (2.0, f64::INFINITY)];

pub fn norm_equivalence(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let t = batch(seed, 200, |rng| {
        let mut t = Tally::default();
        let f = random::gm1_step(rng, 12);
        let b = gm_constant_plain(&f, GmVariant::Gm1).constant;
        for &(p, q) in &EQUIVALENCE_PQ {
            let pq = PQ::from_f64(p, q).expect("valid exponents");
            match equivalence_report(&f, pq, b) {
                Ok(e) => {
                    for c in &e.checks {
                        t.le(c.lhs, c.constant * c.rhs);
                    }
                }
                Err(_) => t.flag(false),
            }
        }
        t
    });
    t.finish(7, "norm equivalence constants", 30, start)
}

pub fn fourier_bounds(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut t = batch(seed, 100, |rng| {
        let mut t = Tally::default();
        let n = rng.gen_range(1..=256);
        let c = random::complex_seq(rng, n);
        let m = rng.gen_range(1..=n);
        let r = fourier::dirichlet_bound_report(&c, m, n, &fourier::x_grid(2000));
        t.le(r.lhs, r.rhs);
        t
    });
    t.merge(batch(seed ^ 0xF00, 100, |rng| {
        let mut t = Tally::default();
        let s = random::sector(rng, 1.2);
        let n = rng.gen_range(2..=512);
        let c = random::gms_sector_seq(rng, n, &s);
        let m = rng.gen_range(1..=n);
        let r = fourier::gm2_partial_report(&c, m, n, &fourier::x_grid(1000));
        t.le(r.lhs, r.rhs);
        match fourier::l1_bound_report(&c, L1_TOL) {
            Ok(r) => t.le(r.lhs, r.rhs),
            Err(_) => t.flag(false),
        }
        match fourier::weak_l1_report(&c, DEFAULT_GRID) {
            Ok(r) => t.le(r.lhs, r.rhs),
            Err(_) => t.flag(false),
        }
        t
    }));
    t.finish(8, "Fourier partial-sum, L1, weak-L1", 120, start)
}

pub const HARDY_ALPHAS: [f64; 4] = [0.25, 0.5, 1.0, 2.0];
pub const HARDY_QS: [f64; 4] = [0.5, 1.0, 2.0, f64::INFINITY];

/// Seed of the fixed family from which the Hardy envelope is computed.
pub const HARDY_ENVELOPE_SEED: u64 = 0x5EED_F00D;

/// The 200 headed functions an envelope is measured on.
pub fn hardy_family(seed: u64) -> Vec<HeadedStepFunction> {
    let mut rng = random::rng(seed);
    (0..200).map(|_| random::gm_plus_headed(&mut rng, 6)).collect()
}

/// Envelope for every lattice point: twice the worst ratio over 200 fixed
/// functions, and at least `1/α` for `q >= 1`.
pub fn hardy_envelopes() -> Result<Vec<((f64, f64), f64)>> {
    let family = hardy_family(HARDY_ENVELOPE_SEED);
    let lattice: Vec<(f64, f64)> = HARDY_ALPHAS.iter().flat_map(|&a| HARDY_QS.iter().map(move |&q| (a, q))).collect();
    par::map(&lattice, |&(a, q)| {
        let q_exp = Exponent::from_f64(q)?;
        Ok(((a, q), hardy::hardy_envelope(&family, a, q_exp, 2.0)?))
    })
    .into_iter()
    .collect()
}

pub fn hardy_inequality(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut t = Tally::default();
    let head = HeadedStepFunction::new(Some(PowerHead::new(1.0, 1.0).expect("valid head")), vec![1.0], vec![])
        .expect("valid function");
    match hardy::hardy_check(&head, 0.5, Exponent::Finite(2.0)) {
        Ok(h) => t.close(h.ratio, 2f64.sqrt(), 1e-10),
        Err(_) => t.flag(false),
    }
    let envelopes = match hardy_envelopes() {
        Ok(e) => e,
        Err(e) => {
            t.notes.push(format!("envelope failed: {e}"));
            t.flag(false);
            return t.finish(9, "Hardy inequality", 60, start);
        }
    };
    let max_env = envelopes.iter().map(|e| e.1).fold(0.0, f64::max);
    t.notes.push(format!("largest envelope {max_env:.4}"));
    let envelopes = &envelopes;
    t.merge(batch(seed, 100, |rng| {
        let mut t = Tally::default();
        let f = random::gm_plus_headed(rng, 6);
        for &((a, q), env) in envelopes {
            let q_exp = Exponent::from_f64(q).expect("valid q");
            let h = match hardy::hardy_check(&f, a, q_exp) {
                Ok(h) => h,
                Err(_) => {
                    t.flag(false);
                    continue;
                }
            };
            if h.rhs.is_infinite() {
                continue;
            }
            t.flag(h.ratio.is_finite() && h.drift < 1e-2);
            t.le(h.ratio, env);
            if a > 1.0 && q.is_finite() {
                let eps = hardy::default_epsilon(&f);
                let g = hardy::shift_exponent(&f, a, eps);
                match (hardy::hardy_lhs(&g, eps, q_exp), hardy::hardy_rhs(&g, eps, q_exp)) {
                    (Ok(lg), Ok(rg)) => {
                        t.le(h.lhs, lg);
                        t.close(rg, h.rhs, 1e-10);
                    }
                    _ => t.flag(false),
                }
            }
        }
        let g = random::gm_plus_headed(rng, 6);
        let r = hardy::gm_product_report(&f, &g);
        t.le(r.lhs, r.constant * r.rhs);
        t
    }));
    t.finish(9, "Hardy inequality", 60, start)
}

pub const DUALITY_BETAS: [f64; 3] = [0.3, 0.5, 0.8];
pub const DUALITY_PQ: [(f64, f64); 3] = [(2.0, 2.0), (3.0, 1.0), (1.5, f64::INFINITY)];
pub const DUALITY_NS: [usize; 3] = [64, 128, 256];

pub fn duality(_seed: u64) -> CriterionResult {
    let start = Instant::now();
    let cases: Vec<(f64, (f64, f64))> =
        DUALITY_BETAS.iter().flat_map(|&b| DUALITY_PQ.iter().map(move |&pq| (b, pq))).collect();
    let parts = par::map(&cases, |&(beta, (p, q))| {
        let mut t = Tally::default();
        let pq = PQ::from_f64(p, q).expect("valid exponents");
        let mut ratios = Vec::new();
        for &n in &DUALITY_NS {
            let c =
                ComplexSeq::from_real(&(1..=n).map(|k| (k as f64).powf(-beta)).collect::<Vec<_>>()).expect("finite");
            match fourier::duality_ratio(&c, pq, DEFAULT_GRID) {
                Ok(d) => {
                    t.flag(d.drift < 1e-2);
                    ratios.push(d.ratio);
                }
                Err(_) => t.flag(false),
            }
        }
        if !ratios.is_empty() {
            let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
            t.le(hi / lo, 2.0);
        }
        t
    });
    let mut t = Tally::default();
    for p in parts {
        t.merge(p);
    }
    t.finish(10, "duality ratio stability", 120, start)
}

pub const GILBERT_THETAS: [f64; 3] = [0.25, 0.5, 0.75];
pub const GILBERT_QS: [f64; 3] = [0.5, 1.0, 2.0];

pub fn gilbert_identity(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let t = batch(seed, 200, |rng| {
        let mut t = Tally::default();
        let s = random::sector(rng, 1.2);
        let n = rng.gen_range(1..=256);
        let c = random::gms_sector_seq(rng, n, &s);
        let b1 = gms1_constant(&c).constant;
        for &theta in &GILBERT_THETAS {
            for &q in &GILBERT_QS {
                let g = gilbert_functional(&c, theta, Exponent::Finite(q)).expect("theta in (0,1)");
                let w = weighted_norm_seq(&c, PQ::from_f64(1.0 / theta, q).expect("valid exponents"));
                let (lo, hi) = gilbert_bracket(theta, q, b1);
                t.le(g / w, hi);
                t.le(lo, g / w);
                let (lo, hi) = gilbert_bracket_tight(theta, q, b1);
                t.le(g / w, hi);
                t.le(lo, g / w);
            }
        }
        t
    });
    t.finish(11, "Gilbert functional bracket", 30, start)
}

/// Every criterion in order.
pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    (1..=CRITERIA).filter_map(|id| run_one(id, seed)).collect()
}

pub const CRITERIA: u32 = 11;

/// Criterion `id` (1-based), if it exists.
pub fn run_one(id: u32, seed: u64) -> Option<CriterionResult> {
    let r = match id {
        1 => equimeasurability(seed),
        2 => k_functional_exactness(seed),
        3 => decomposition_bound(seed),
        4 => splice_constant(seed),
        5 => inclusion_constants(seed),
        6 => pointwise_rearrangement(seed),
        7 => norm_equivalence(seed),
        8 => fourier_bounds(seed),
        9 => hardy_inequality(seed),
        10 => duality(seed),
        11 => gilbert_identity(seed),
        _ => return None,
    };
    Some(r)
}
