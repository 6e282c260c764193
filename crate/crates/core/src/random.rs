//! Seeded generators for test inputs. Every generator draws only from the
//! supplied RNG, so a seed reproduces its inputs exactly.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{ComplexSeq, HeadedStepFunction, PowerHead, Sector, StepFunction};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Breakpoints on the grid `k/8`, so that lengths and their sums are exact in binary.
fn dyadic_breakpoints(rng: &mut TestRng, pieces: usize) -> Vec<f64> {
    let mut x = 0u32;
    (0..pieces)
        .map(|_| {
            x += rng.gen_range(1..=16);
            x as f64 / 8.0
        })
        .collect()
}

/// Arbitrary complex step function with up to `max_pieces` pieces; values may vanish.
pub fn step_function(rng: &mut TestRng, max_pieces: usize) -> StepFunction {
    let m = rng.gen_range(1..=max_pieces.max(1));
    let b = dyadic_breakpoints(rng, m);
    let v = (0..m)
        .map(|_| {
            if rng.gen_bool(0.1) {
                Complex64::default()
            } else {
                // values on a coarse grid so ties between pieces occur
                let re = rng.gen_range(-12..=12) as f64 / 4.0;
                let im = if rng.gen_bool(0.5) { rng.gen_range(-12..=12) as f64 / 4.0 } else { 0.0 };
                Complex64::new(re, im)
            }
        })
        .collect();
    StepFunction::new(b, v).expect("generated breakpoints increase")
}

/// Arbitrary complex sequence of length `n` with entries in the square `[-1, 1]²`.
pub fn complex_seq(rng: &mut TestRng, n: usize) -> ComplexSeq {
    ComplexSeq::new((0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
        .expect("finite")
}

/// Control values at dyadic block boundaries, interpolated linearly inside blocks.
fn dyadic_profile(rng: &mut TestRng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let blocks = usize::BITS - n.leading_zeros() + 1;
    let ctrl: Vec<f64> = (0..=blocks).map(|_| rng.gen_range(lo..=hi)).collect();
    (1..=n)
        .map(|k| {
            let j = (usize::BITS - 1 - k.leading_zeros()) as usize;
            let start = 1usize << j;
            let s = (k - start) as f64 / start as f64;
            ctrl[j] * (1.0 - s) + ctrl[j + 1] * s
        })
        .collect()
}

/// Sequence of length `n` with values in `sector`: moduli `k^{-β} w_k` and
/// phases `α + φ u_k`, where `w` and `u` move linearly across dyadic blocks.
/// Slow variation on dyadic blocks keeps the doubling variation comparable to
/// `|a_n|`; the constant is measured afterwards rather than assumed.
pub fn gms_sector_seq(rng: &mut TestRng, n: usize, sector: &Sector) -> ComplexSeq {
    let beta = rng.gen_range(0.0..1.5);
    let w = dyadic_profile(rng, n, 0.5, 2.0);
    let u = dyadic_profile(rng, n, -1.0, 1.0);
    let scale = rng.gen_range(0.5..4.0);
    ComplexSeq::new(
        (1..=n)
            .map(|k| {
                let r = scale * (k as f64).powf(-beta) * w[k - 1];
                Complex64::from_polar(r, sector.alpha() + sector.phi() * u[k - 1])
            })
            .collect(),
    )
    .expect("finite")
}

/// Random sector with `φ <= phi_max`.
pub fn sector(rng: &mut TestRng, phi_max: f64) -> Sector {
    Sector::with_default_tol(rng.gen_range(0.0..std::f64::consts::TAU), rng.gen_range(0.0..=phi_max))
        .expect("phi below pi/2")
}

/// Positive step function `w_j x_j^{-β}` on dyadic breakpoints; every
/// positive step function has a finite almost-monotone constant.
pub fn gm1_step(rng: &mut TestRng, max_pieces: usize) -> StepFunction {
    let m = rng.gen_range(1..=max_pieces.max(1));
    let b = dyadic_breakpoints(rng, m);
    let beta = rng.gen_range(0.0..1.5);
    let v: Vec<f64> = b.iter().map(|&x| x.powf(-beta) * rng.gen_range(0.5..2.0)).collect();
    StepFunction::from_real(b, &v).expect("generated breakpoints increase")
}

/// Nonnegative headed function: `c x^γ` up to `x_1`, then positive steps
/// starting near the head's end value.
pub fn gm_plus_headed(rng: &mut TestRng, max_steps: usize) -> HeadedStepFunction {
    let c = rng.gen_range(0.5..2.0);
    let gamma = rng.gen_range(0.3..3.0);
    let x1 = rng.gen_range(1..=16) as f64 / 8.0;
    let steps = rng.gen_range(0..=max_steps);
    let mut b = vec![x1];
    let mut v = Vec::with_capacity(steps);
    let mut level = c * x1.powf(gamma);
    let mut x = x1;
    for _ in 0..steps {
        x += rng.gen_range(1..=16) as f64 / 8.0;
        level *= rng.gen_range(0.5..1.5);
        b.push(x);
        v.push(Complex64::new(level, 0.0));
    }
    HeadedStepFunction::new(Some(PowerHead::new(c, gamma).expect("valid head")), b, v)
        .expect("generated breakpoints increase")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gm::gms_constant;

    #[test]
    fn seeds_reproduce() {
        let a = step_function(&mut rng(7), 10);
        let b = step_function(&mut rng(7), 10);
        assert_eq!(a, b);
    }

    #[test]
    fn sector_sequences_stay_in_sector_with_moderate_constant() {
        let mut r = rng(1);
        let mut finite = 0;
        for _ in 0..200 {
            let s = sector(&mut r, 1.0);
            let n = r.gen_range(1..=256);
            let a = gms_sector_seq(&mut r, n, &s);
            assert!(a.as_slice().iter().all(|&z| s.contains(z)));
            if gms_constant(&a).constant <= 8.0 {
                finite += 1;
            }
        }
        assert!(finite > 150, "{finite}");
    }
}
