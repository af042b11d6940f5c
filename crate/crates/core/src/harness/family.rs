//! Seeded generators of polynomials that are nonnegative on all of real
//! space by construction: squares, sums of squares, and squares scaled by
//! even powers of the norm. A constructive subfamily of the nonnegative
//! cone — sufficient for scan-based verification, not a membership test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::poly::{monomials_up_to, Monomial, Polynomial};
use crate::scalar::Scalar;

/// Size, degree cap, and seed for a generated family.
#[derive(Clone, Copy, Debug)]
pub struct FamilySpec {
    pub count: usize,
    pub max_degree: usize,
    pub seed: u64,
}

/// Random low-degree polynomial with small rational coefficients
/// (denominators 1 or 2), at least one term.
fn random_poly<S: Scalar>(nvars: usize, max_degree: usize, rng: &mut ChaCha8Rng) -> Polynomial<S> {
    let basis = monomials_up_to(nvars, max_degree);
    let mut p = Polynomial::zero(nvars);
    for m in &basis {
        if rng.gen_bool(0.4) {
            let num = rng.gen_range(-3i64..=3);
            if num == 0 {
                continue;
            }
            let den = if rng.gen_bool(0.3) { 2 } else { 1 };
            p.add_term(m.clone(), &S::from_ratio(num, den));
        }
    }
    if p.is_zero() {
        p.add_term(Monomial(vec![0; nvars]), &S::one());
    }
    p
}

fn norm_sq_poly<S: Scalar>(nvars: usize) -> Polynomial<S> {
    let mut p = Polynomial::zero(nvars);
    for i in 0..nvars {
        let mut exps = vec![0u32; nvars];
        exps[i] = 2;
        p.add_term(Monomial(exps), &S::one());
    }
    p
}

/// Deterministic family of polynomials nonnegative on all of real space,
/// rotating through three constructions: a single square, a sum of two or
/// three squares, and a square times an even norm power. Degrees stay
/// within `spec.max_degree`.
pub fn nonnegative_family<S: Scalar>(
    nvars: usize,
    spec: &FamilySpec,
) -> Vec<(String, Polynomial<S>)> {
    assert!(spec.max_degree >= 2, "family needs degree at least 2");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let half = spec.max_degree / 2;
    let mut out = Vec::with_capacity(spec.count);
    for i in 0..spec.count {
        match i % 3 {
            0 => {
                let q = random_poly::<S>(nvars, half, &mut rng);
                out.push((format!("square_{i}"), q.mul(&q)));
            }
            1 => {
                let terms = rng.gen_range(2usize..=3);
                let mut acc = Polynomial::zero(nvars);
                for _ in 0..terms {
                    let q = random_poly::<S>(nvars, half, &mut rng);
                    acc = acc.add(&q.mul(&q));
                }
                out.push((format!("sum_of_squares_{i}"), acc));
            }
            _ => {
                // (sum of coordinate squares)^m times a square
                let m = rng.gen_range(1usize..=half.max(1));
                let q_deg = half.saturating_sub(m);
                let q = random_poly::<S>(nvars, q_deg, &mut rng);
                let mut acc = q.mul(&q);
                let norm = norm_sq_poly::<S>(nvars);
                for _ in 0..m {
                    acc = acc.mul(&norm);
                }
                out.push((format!("norm_power_square_{i}"), acc));
            }
        }
    }
    out
}

/// Deterministic one-variable nonnegative polynomials that each touch
/// zero at a known rational point: `(x - r)^2 q(x)^2` with the zero `r`
/// reported alongside. Degrees stay within `max_degree`.
pub fn zero_touching_family_1d<S: Scalar>(spec: &FamilySpec) -> Vec<(String, Polynomial<S>, S)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x5eed);
    let zeros: [(i64, i64); 5] = [(0, 1), (1, 1), (-1, 1), (1, 2), (2, 1)];
    let q_deg = spec.max_degree.saturating_sub(2) / 2;
    let mut out = Vec::with_capacity(spec.count);
    for i in 0..spec.count {
        let (num, den) = zeros[i % zeros.len()];
        let r = S::from_ratio(num, den);
        // x - r
        let mut root_factor = Polynomial::zero(1);
        root_factor.add_term(Monomial(vec![1]), &S::one());
        root_factor.add_term(Monomial(vec![0]), &r.neg_ref());
        let base = root_factor.mul(&root_factor);
        let q = random_poly::<S>(1, q_deg, &mut rng);
        let p = base.mul(&q.mul(&q));
        out.push((format!("touch_{i}_at_{num}/{den}"), p, r));
    }
    out
}
