//! Float quadrature used by the independent numerical cross-checks:
//! a 15-point Gauss-Kronrod panel with adaptive bisection, Gauss-Legendre
//! rules of arbitrary order, and the specific weighted integrals (Gaussian
//! axis moments, asymmetric beta moments) that validate the exact code.
//!
//! These routines only ever *check* exact results, so they are plain f64;
//! the endpoints' algebraic singularities are removed by substitution
//! before any rule is applied.

use crate::error::{DunklError, Result};

/// 15-point Kronrod nodes on [0, 1] side (symmetric about 0).
/// Full published table digits; the compiler rounds to the nearest f64.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

/// 7-point Gauss weights (for the odd-indexed Kronrod nodes).
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// 15-point Kronrod weights.
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// One Gauss-Kronrod 7/15 panel over [a, b]: returns the Kronrod value and
/// the |Kronrod - Gauss| error estimate.
pub fn gauss_kronrod_15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

/// Adaptive bisection around the Gauss-Kronrod panel, absolute tolerance.
/// Errors out instead of returning a value it cannot certify.
pub fn adaptive_quadrature(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn recurse(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64> {
        let (value, err) = gauss_kronrod_15(f, a, b);
        if err <= tol || (b - a).abs() < 1e-15 {
            return Ok(value);
        }
        if depth == 0 {
            return Err(DunklError::QuadratureNonConvergence(format!(
                "panel [{a}, {b}] still has error {err:.3e} at maximum depth"
            )));
        }
        let mid = 0.5 * (a + b);
        Ok(recurse(f, a, mid, 0.5 * tol, depth - 1)? + recurse(f, mid, b, 0.5 * tol, depth - 1)?)
    }
    recurse(f, a, b, tol, 48)
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]
/// (exact for polynomials of degree <= 2n-1), by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-flavored initial guess, then Newton
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P_n' at x via the three-term recurrence
            let mut p0 = 1.0f64;
            let mut p1 = x;
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn_prev = if n == 1 { 1.0 } else { p0 };
            dp = (n as f64) * (x * pn - pn_prev) / (x * x - 1.0);
            let step = pn / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Gauss-Legendre rule rescaled to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    gauss_legendre(n)
        .into_iter()
        .map(|(x, w)| (mid + half * x, half * w))
        .collect()
}

/// `integral of x^m |x|^{2k} e^{-x^2/2} over the line`, truncated at `|x| <= cutoff`.
/// Odd `m` vanishes by symmetry. The integrand is continuous at 0 for
/// every k >= 0, so no substitution is needed; adaptive bisection resolves
/// the corner a noninteger `2k` leaves there.
pub fn gaussian_axis_moment(m: u32, k: f64, cutoff: f64, tol: f64) -> Result<f64> {
    assert!(k >= 0.0, "negative multiplicity");
    if m % 2 == 1 {
        return Ok(0.0);
    }
    let f = move |x: f64| -> f64 {
        if x == 0.0 {
            if m == 0 && k == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            x.powi(m as i32) * x.abs().powf(2.0 * k) * (-0.5 * x * x).exp()
        }
    };
    // High moments reach magnitudes of 10^4 and beyond; an absolute
    // tolerance there would sit below machine precision. Scale by a
    // one-panel estimate so the tolerance is relative for large values
    // and absolute for small ones.
    let (rough, _) = gauss_kronrod_15(&f, 0.0, cutoff);
    let scaled = tol * rough.abs().max(1.0);
    let half = adaptive_quadrature(&f, 0.0, cutoff, 0.5 * scaled)?;
    Ok(2.0 * half)
}

/// `n`-th raw moment of the density `(1-t)^(k-1) (1+t)^k` on [-1, 1],
/// **not** normalized. Valid for k >= 1/2, where the endpoint exponents
/// exceed -1. The substitutions `t = 1 - v^2` (right half) and
/// `t = -1 + u^2` (left half) remove both endpoint singularities, leaving
/// smooth integrands on [0, 1].
pub fn beta_density_raw_moment(n: u32, k: f64, tol: f64) -> Result<f64> {
    assert!(k >= 0.5, "density moment needs k >= 1/2");
    // right half, t in [0, 1]:  2 * integral of f(1-v^2) v^(2k-1) (2-v^2)^k dv
    let right = {
        let f = move |v: f64| -> f64 {
            let t = 1.0 - v * v;
            let vpow = if v == 0.0 && 2.0 * k - 1.0 == 0.0 {
                1.0
            } else {
                v.powf(2.0 * k - 1.0)
            };
            t.powi(n as i32) * vpow * (2.0 - v * v).powf(k)
        };
        2.0 * adaptive_quadrature(&f, 0.0, 1.0, 0.25 * tol)?
    };
    // left half, t in [-1, 0]:  2 * integral of f(-1+u^2) (2-u^2)^(k-1) u^(2k+1) du
    let left = {
        let f = move |u: f64| -> f64 {
            let t = -1.0 + u * u;
            t.powi(n as i32) * (2.0 - u * u).powf(k - 1.0) * u.powf(2.0 * k + 1.0)
        };
        2.0 * adaptive_quadrature(&f, 0.0, 1.0, 0.25 * tol)?
    };
    Ok(left + right)
}

/// Normalized `n`-th moment of the `(1-t)^(k-1) (1+t)^k` density
/// (the raw moment divided by the raw mass).
pub fn beta_density_moment(n: u32, k: f64, tol: f64) -> Result<f64> {
    let mass = beta_density_raw_moment(0, k, tol)?;
    let raw = beta_density_raw_moment(n, k, tol)?;
    Ok(raw / mass)
}

/// All points and weights of the tensor product of per-axis rules.
pub fn tensor_product(axes: &[Vec<(f64, f64)>]) -> Vec<(Vec<f64>, f64)> {
    let mut grid: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
    for axis in axes {
        let mut next = Vec::with_capacity(grid.len() * axis.len());
        for (point, weight) in &grid {
            for (x, w) in axis {
                let mut p = point.clone();
                p.push(*x);
                next.push((p, weight * w));
            }
        }
        grid = next;
    }
    grid
}
