//! Truncated generalized-exponential kernels built from an intertwiner
//! table, their group-averaged (Bessel-type) variant, derivative bounds
//! with explicit truncation tails, Gram positive-semidefiniteness checks,
//! and the explicit representing measures available in the rank-one and
//! direct-product cases.

use crate::dunkl::{dunkl_apply, DunklContext};
use crate::error::{DunklError, Result};
use crate::intertwine::{build_vk, z2n_axis_multiplicities, IntertwinerTable};
use crate::linalg::{symmetric_eigen_min, Matrix};
use crate::poly::{monomials_of_degree, Monomial, Polynomial, Vector};
use crate::quad::{adaptive_quadrature, beta_density_moment};
use crate::scalar::{factorial, Cplx, Scalar};

/// Truncation of the generalized exponential kernel
/// `K(x,y) = sum over nu of m_nu(x) y^nu / nu!`, where `m_nu` is the
/// intertwiner image of the monomial `x^nu`, cut at total degree `order`.
#[derive(Clone)]
pub struct KernelTruncation<S> {
    ctx: DunklContext<S>,
    table: IntertwinerTable<S>,
    order: usize,
}

/// A truncated kernel value together with the explicit bound on the
/// discarded tail, `sum over n > order of (|x||y|)^n / n!`.
#[derive(Clone, Debug)]
pub struct KernelValue<S> {
    pub value: Cplx<S>,
    pub tail_bound: f64,
    pub order: usize,
}

impl<S: Scalar> KernelTruncation<S> {
    pub fn new(ctx: DunklContext<S>, table: IntertwinerTable<S>, order: usize) -> Result<Self> {
        if table.nvars() != ctx.nvars() {
            return Err(DunklError::DimensionMismatch(
                "table and context dimensions differ".into(),
            ));
        }
        if order > table.order() {
            return Err(DunklError::DegreeExceedsTable(order, table.order()));
        }
        Ok(KernelTruncation { ctx, table, order })
    }

    /// Build the intertwiner table for `ctx` up to `order` and wrap it.
    pub fn from_context(ctx: &DunklContext<S>, order: usize) -> Result<Self> {
        let table = build_vk(ctx, order)?;
        KernelTruncation::new(ctx.clone(), table, order)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nvars(&self) -> usize {
        self.table.nvars()
    }

    pub fn context(&self) -> &DunklContext<S> {
        &self.ctx
    }

    pub fn table(&self) -> &IntertwinerTable<S> {
        &self.table
    }

    /// The degree-`n` homogeneous component `K_n(·, y)` as an exact
    /// polynomial in the first argument, for fixed rational `y`.
    pub fn degree_component(&self, n: usize, y: &[S]) -> Result<Polynomial<S>> {
        let nv = self.nvars();
        if y.len() != nv {
            return Err(DunklError::DimensionMismatch(
                "second kernel argument has wrong dimension".into(),
            ));
        }
        if n > self.order {
            return Err(DunklError::DegreeExceedsTable(n, self.order));
        }
        let mut acc = Polynomial::zero(nv);
        for nu in monomials_of_degree(nv, n) {
            let c = monomial_value(&nu, y).div_ref(&multi_factorial::<S>(&nu));
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&self.table.image_of_monomial(&nu)?.scale(&c));
        }
        Ok(acc)
    }

    /// The whole truncation `K^(order)(x, ·)` as an exact polynomial in
    /// the second argument, for fixed rational `x`.
    pub fn y_polynomial(&self, x: &[S]) -> Result<Polynomial<S>> {
        let nv = self.nvars();
        if x.len() != nv {
            return Err(DunklError::DimensionMismatch(
                "first kernel argument has wrong dimension".into(),
            ));
        }
        let mut terms = Polynomial::zero(nv);
        for n in 0..=self.order {
            for nu in monomials_of_degree(nv, n) {
                let m_at_x = self.table.image_of_monomial(&nu)?.evaluate(x);
                if m_at_x.is_zero() {
                    continue;
                }
                let c = m_at_x.div_ref(&multi_factorial::<S>(&nu));
                terms = terms.add(&Polynomial::from_monomial(nu.clone(), c));
            }
        }
        Ok(terms)
    }

    /// Truncated kernel value at a rational point and a complex second
    /// argument, with the explicit tail bound.
    pub fn eval(&self, x: &[S], y: &[Cplx<S>]) -> Result<KernelValue<S>> {
        let nv = self.nvars();
        if x.len() != nv || y.len() != nv {
            return Err(DunklError::DimensionMismatch(
                "kernel arguments have wrong dimension".into(),
            ));
        }
        let poly = self.y_polynomial(x)?;
        let value = eval_complex(&poly, y);
        let r = euclid_norm_f64(x) * complex_norm_f64(y);
        Ok(KernelValue {
            value,
            tail_bound: exp_tail(r, self.order as i64),
            order: self.order,
        })
    }

    /// Truncated kernel at two real rational points: exact value plus the
    /// tail bound.
    pub fn eval_real(&self, x: &[S], y: &[S]) -> Result<(S, f64)> {
        let yc: Vec<Cplx<S>> = y.iter().map(|v| Cplx::from_re(v.clone())).collect();
        let kv = self.eval(x, &yc)?;
        debug_assert!(kv.value.im.is_zero());
        Ok((kv.value.re, kv.tail_bound))
    }

    /// Group average of the kernel over the second argument — the
    /// Bessel-type symmetrization. Invariant under the group in each
    /// argument.
    pub fn bessel(&self, x: &[S], y: &[Cplx<S>]) -> Result<KernelValue<S>> {
        let elements = self.ctx.group().elements();
        let mut acc = Cplx::zero();
        let mut tail: f64 = 0.0;
        for g in elements {
            let gy = complex_matvec(g, y);
            let kv = self.eval(x, &gy)?;
            acc = acc.add(&kv.value);
            tail = tail.max(kv.tail_bound);
        }
        let inv = S::from_ratio(1, elements.len() as i64);
        Ok(KernelValue {
            value: acc.scale(&inv),
            tail_bound: tail,
            order: self.order,
        })
    }
}

/// `nu!` as a scalar: product of coordinate factorials.
fn multi_factorial<S: Scalar>(nu: &Monomial) -> S {
    let mut acc = S::one();
    for &e in &nu.0 {
        acc = acc.mul_ref(&factorial::<S>(e as usize));
    }
    acc
}

fn monomial_value<S: Scalar>(nu: &Monomial, y: &[S]) -> S {
    let mut acc = S::one();
    for (i, &e) in nu.0.iter().enumerate() {
        acc = acc.mul_ref(&y[i].pow_u(e));
    }
    acc
}

/// Evaluate a real-coefficient polynomial at a complex point.
pub fn eval_complex<S: Scalar>(p: &Polynomial<S>, z: &[Cplx<S>]) -> Cplx<S> {
    let mut acc = Cplx::zero();
    for (m, c) in p.terms() {
        let mut t = Cplx::from_re(c.clone());
        for (i, &e) in m.0.iter().enumerate() {
            if e > 0 {
                t = t.mul(&z[i].pow_u(e));
            }
        }
        acc = acc.add(&t);
    }
    acc
}

fn complex_matvec<S: Scalar>(g: &Matrix<S>, y: &[Cplx<S>]) -> Vec<Cplx<S>> {
    (0..g.rows())
        .map(|i| {
            let mut acc = Cplx::zero();
            for (j, v) in y.iter().enumerate() {
                acc = acc.add(&v.scale(g.get(i, j)));
            }
            acc
        })
        .collect()
}

fn euclid_norm_f64<S: Scalar>(x: &[S]) -> f64 {
    x.iter()
        .map(|v| {
            let f = v.to_f64();
            f * f
        })
        .sum::<f64>()
        .sqrt()
}

fn complex_norm_f64<S: Scalar>(y: &[Cplx<S>]) -> f64 {
    y.iter().map(|v| v.norm_sq().to_f64()).sum::<f64>().sqrt()
}

fn real_part_norm_f64<S: Scalar>(y: &[Cplx<S>]) -> f64 {
    y.iter()
        .map(|v| {
            let f = v.re.to_f64();
            f * f
        })
        .sum::<f64>()
        .sqrt()
}

/// `sum over n > m of r^n / n!` (for negative `m`, the whole of `e^r`).
pub fn exp_tail(r: f64, m: i64) -> f64 {
    let r = r.abs();
    let start = (m + 1).max(0) as u64;
    // first term r^start / start!
    let mut term = 1.0f64;
    for n in 1..=start {
        term *= r / n as f64;
    }
    let mut sum = term;
    let mut n = start;
    loop {
        n += 1;
        term *= r / n as f64;
        sum += term;
        if term < sum.abs() * 1e-18 + 1e-300 || n > start + 1000 {
            break;
        }
    }
    sum
}

/// Kernel evaluation free function (series value + tail bound).
pub fn kernel_eval<S: Scalar>(
    tr: &KernelTruncation<S>,
    x: &[S],
    y: &[Cplx<S>],
) -> Result<KernelValue<S>> {
    tr.eval(x, y)
}

/// Group-averaged kernel evaluation.
pub fn bessel_eval<S: Scalar>(
    tr: &KernelTruncation<S>,
    x: &[S],
    y: &[Cplx<S>],
) -> Result<KernelValue<S>> {
    tr.bessel(x, y)
}

/// Outcome of the derivative bound check
/// `|d^nu/dz^nu K(x,z)| <= |x|^|nu| e^(|x| |Re z|)` on the truncation,
/// with the truncation tail added to the right-hand side.
#[derive(Clone, Debug)]
pub struct KernelBoundVerdict {
    pub lhs: f64,
    pub bound: f64,
    pub tail: f64,
    pub pass: bool,
}

pub fn kernel_bound_check<S: Scalar>(
    tr: &KernelTruncation<S>,
    x: &[S],
    z: &[Cplx<S>],
    nu: &Monomial,
    tol: f64,
) -> Result<KernelBoundVerdict> {
    let nv = tr.nvars();
    if nu.0.len() != nv || z.len() != nv {
        return Err(DunklError::DimensionMismatch(
            "derivative order or point has wrong dimension".into(),
        ));
    }
    let mut poly = tr.y_polynomial(x)?;
    for (i, &e) in nu.0.iter().enumerate() {
        for _ in 0..e {
            poly = poly.derivative(i);
        }
    }
    let lhs = eval_complex(&poly, z).magnitude();
    let x_norm = euclid_norm_f64(x);
    let nu_deg = nu.degree();
    let tail = x_norm.powi(nu_deg as i32)
        * exp_tail(
            x_norm * complex_norm_f64(z),
            tr.order() as i64 - nu_deg as i64,
        );
    // negated so a NaN tail fails the gate
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(tail <= tol) {
        return Err(DunklError::InvalidArgument(format!(
            "truncation tail {tail:.3e} exceeds tolerance {tol:.3e} at the requested point"
        )));
    }
    let bound = x_norm.powi(nu_deg as i32) * (x_norm * real_part_norm_f64(z)).exp() + tail + tol;
    Ok(KernelBoundVerdict {
        lhs,
        bound,
        tail,
        pass: lhs <= bound,
    })
}

/// Result of the Gram positive-semidefiniteness test for the matrix
/// `[K(x_i - x_j, iy)]`.
#[derive(Clone, Debug)]
pub struct GramVerdict {
    pub min_eigenvalue: f64,
    pub tail: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Check positive-semidefiniteness of the kernel Gram matrix at purely
/// imaginary second argument. The matrix is Hermitian exactly (verified);
/// its eigenvalues are computed through the real symmetric embedding
/// `[[A, -B], [B, A]]` of `A + iB`. Passes when the smallest eigenvalue
/// clears `-(m * tail + tol)`.
pub fn gram_psd_check<S: Scalar>(
    tr: &KernelTruncation<S>,
    points: &[Vec<S>],
    y: &[S],
    tol: f64,
) -> Result<GramVerdict> {
    let m = points.len();
    if m == 0 || m > 16 {
        return Err(DunklError::InvalidArgument(
            "gram check needs between 1 and 16 points".into(),
        ));
    }
    let nv = tr.nvars();
    if y.len() != nv || points.iter().any(|p| p.len() != nv) {
        return Err(DunklError::DimensionMismatch(
            "gram points or argument have wrong dimension".into(),
        ));
    }
    let iy: Vec<Cplx<S>> = y.iter().map(|v| Cplx::new(S::zero(), v.clone())).collect();
    let mut entries = vec![vec![Cplx::zero(); m]; m];
    let mut tail: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let diff: Vec<S> = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| a.sub_ref(b))
                .collect();
            let kv = tr.eval(&diff, &iy)?;
            tail = tail.max(kv.tail_bound);
            entries[i][j] = kv.value;
        }
    }
    // negated so a NaN tail fails the gate
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(tail <= tol) {
        return Err(DunklError::InvalidArgument(format!(
            "truncation tail {tail:.3e} exceeds tolerance {tol:.3e} at the widest point pair"
        )));
    }
    // Hermitian by the parity of the homogeneous components; verify.
    for (i, row) in entries.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let d = e.sub(&entries[j][i].conj());
            if !d.re.is_negligible() || !d.im.is_negligible() {
                return Err(DunklError::InvalidArgument(
                    "gram matrix failed the Hermitian self-check".into(),
                ));
            }
        }
    }
    // real symmetric embedding of A + iB, eigenvalues doubled in
    // multiplicity but with the same extremes
    let mut embed = Matrix::<f64>::zero(2 * m, 2 * m);
    for (i, row) in entries.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let a = e.re.to_f64();
            let b = e.im.to_f64();
            embed.set(i, j, a);
            embed.set(m + i, m + j, a);
            embed.set(i, m + j, -b);
            embed.set(m + i, j, b);
        }
    }
    let min_eigenvalue = symmetric_eigen_min(&embed);
    let threshold = m as f64 * tail + tol;
    Ok(GramVerdict {
        min_eigenvalue,
        tail,
        threshold,
        pass: min_eigenvalue >= -threshold,
    })
}

/// Residual of the degree-wise characterization
/// `T_xi K_(n+1)(·, y) - <xi, y> K_n(·, y)`; identically zero as a
/// polynomial in the first argument.
pub fn kernel_recursion_residual<S: Scalar>(
    tr: &KernelTruncation<S>,
    xi: &Vector<S>,
    y: &[S],
    n: usize,
) -> Result<Polynomial<S>> {
    if n + 1 > tr.order() {
        return Err(DunklError::DegreeExceedsTable(n + 1, tr.order()));
    }
    let k_next = tr.degree_component(n + 1, y)?;
    let k_n = tr.degree_component(n, y)?;
    let applied = dunkl_apply(tr.context(), xi, &k_next)?;
    let mut pairing = S::zero();
    for (i, v) in xi.0.iter().enumerate() {
        pairing.add_assign_ref(&v.mul_ref(&y[i]));
    }
    Ok(applied.sub(&k_n.scale(&pairing)))
}

// ---------------------------------------------------------------------------
// Explicit representing measures (rank-one and direct-product cases)
// ---------------------------------------------------------------------------

/// The rank-one representing measure at base point `x`: the beta-type
/// density `c (1-t)^(k-1) (1+t)^k` on [-1, 1] pushed forward by
/// `t -> x t`. At `x = 0` it degenerates to the point mass at 0.
#[derive(Clone, Copy, Debug)]
pub struct Measure1D {
    pub x: f64,
    pub k: f64,
}

impl Measure1D {
    pub fn new(x: f64, k: f64) -> Self {
        Measure1D { x, k }
    }

    /// `integral of xi^n d mu_x`, by adaptive quadrature against the
    /// normalized density. Requires `k > 0` unless the measure is the
    /// point mass at 0.
    pub fn moment(&self, n: u32, tol: f64) -> Result<f64> {
        if self.x == 0.0 {
            return Ok(if n == 0 { 1.0 } else { 0.0 });
        }
        if self.k <= 0.0 {
            return Err(DunklError::InvalidArgument(
                "explicit density requires a positive parameter".into(),
            ));
        }
        let t_moment = beta_density_moment(n, self.k, tol)?;
        Ok(self.x.powi(n as i32) * t_moment)
    }

    /// Support interval of the pushed-forward density.
    pub fn support(&self) -> (f64, f64) {
        (-self.x.abs(), self.x.abs())
    }
}

/// Moment of the rank-one measure (defaults the quadrature tolerance).
pub fn measure_moments(mu: &Measure1D, n: u32) -> Result<f64> {
    mu.moment(n, 1e-12)
}

/// Product-case moment: coordinates are independent rank-one measures.
pub fn measure_product_moment(xs: &[f64], ks: &[f64], nu: &[u32]) -> Result<f64> {
    if xs.len() != ks.len() || xs.len() != nu.len() {
        return Err(DunklError::DimensionMismatch(
            "base point, parameters, and exponents must have equal length".into(),
        ));
    }
    let mut acc = 1.0;
    for i in 0..xs.len() {
        acc *= Measure1D::new(xs[i], ks[i]).moment(nu[i], 1e-12)?;
    }
    Ok(acc)
}

/// Outcome of a measure transformation law check at the moment level.
#[derive(Clone, Debug)]
pub struct MeasureTransformVerdict {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Verify, at one moment `nu`, the scaling law (base point `r x`) and the
/// sign-flip equivariance (base point `g x` for a sign pattern `g`):
/// moments of the transformed measure must equal the correspondingly
/// transformed moments of the original.
pub fn measure_transform_check(
    xs: &[f64],
    ks: &[f64],
    r: f64,
    flips: &[bool],
    nu: &[u32],
    tol: f64,
) -> Result<MeasureTransformVerdict> {
    if r <= 0.0 {
        return Err(DunklError::InvalidArgument(
            "scaling factor must be positive".into(),
        ));
    }
    if flips.len() != xs.len() {
        return Err(DunklError::DimensionMismatch(
            "sign pattern has wrong length".into(),
        ));
    }
    let transformed: Vec<f64> = xs
        .iter()
        .zip(flips)
        .map(|(&x, &f)| if f { -r * x } else { r * x })
        .collect();
    let lhs = measure_product_moment(&transformed, ks, nu)?;
    let mut factor = 1.0f64;
    for (i, &e) in nu.iter().enumerate() {
        factor *= r.powi(e as i32);
        if flips[i] && e % 2 == 1 {
            factor = -factor;
        }
    }
    let rhs = factor * measure_product_moment(xs, ks, nu)?;
    let scale = lhs.abs().max(rhs.abs()).max(1.0);
    Ok(MeasureTransformVerdict {
        lhs,
        rhs,
        pass: (lhs - rhs).abs() <= tol * scale,
    })
}

/// Outcome of the support geometry check for direct-product measures.
#[derive(Clone, Debug)]
pub struct SupportVerdict {
    pub box_halfwidths: Vec<f64>,
    pub pass: bool,
}

/// For a direct-product (sign-flip) group, the measure at `x` is
/// supported in the box with half-widths `|x_i|`, which must coincide
/// with the convex hull of the group orbit of `x`. Checked by comparing
/// per-axis extremes of the actual orbit with the box.
pub fn support_hull_check<S: Scalar>(ctx: &DunklContext<S>, x: &[f64]) -> Result<SupportVerdict> {
    z2n_axis_multiplicities(ctx)?; // direct-product structure required
    let nv = ctx.nvars();
    if x.len() != nv {
        return Err(DunklError::DimensionMismatch(
            "base point has wrong dimension".into(),
        ));
    }
    let mut hi = vec![f64::NEG_INFINITY; nv];
    let mut lo = vec![f64::INFINITY; nv];
    for g in ctx.group().elements() {
        let gf = g.map_scalars(|v| v.to_f64());
        let gx = gf.matvec(x);
        for i in 0..nv {
            hi[i] = hi[i].max(gx[i]);
            lo[i] = lo[i].min(gx[i]);
        }
    }
    let box_halfwidths: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let pass = (0..nv).all(|i| {
        (hi[i] - box_halfwidths[i]).abs() < 1e-12 && (lo[i] + box_halfwidths[i]).abs() < 1e-12
    });
    Ok(SupportVerdict {
        box_halfwidths,
        pass,
    })
}

// ---------------------------------------------------------------------------
// Closed-form integral representation of the conjugated difference operator
// ---------------------------------------------------------------------------

/// Evaluate the conjugated rank-one difference operator through its
/// integral representation,
/// `-p(x)/(2s) - e^(x^2/4s)/(4s^2) * integral_{-inf}^{x} e^(-t^2/4s)
///   [ (t+x) p(t) + (t-x) p(-t) ] / 2 dt`.
///
/// The half-weight on the two integrand pieces is deliberate: the
/// unhalved single-piece variant overstates the integral term by a factor
/// of two against the operator definition (the even/odd split derivation
/// fixes the convention used here).
pub fn lambda_s_closed_form(s: f64, p: &Polynomial<f64>, x: f64, tol: f64) -> Result<f64> {
    if p.nvars() != 1 {
        return Err(DunklError::DimensionMismatch(
            "closed form is one-dimensional".into(),
        ));
    }
    if s <= 0.0 {
        return Err(DunklError::InvalidArgument(
            "integral representation requires positive time".into(),
        ));
    }
    let lower = -(x.abs() + 40.0 * s.sqrt() + 5.0);
    let integrand = |t: f64| -> f64 {
        let w = (-t * t / (4.0 * s)).exp();
        w * 0.5 * ((t + x) * p.evaluate(&[t]) + (t - x) * p.evaluate(&[-t]))
    };
    let integral = adaptive_quadrature(&integrand, lower, x, tol)?;
    Ok(-p.evaluate(&[x]) / (2.0 * s) - (x * x / (4.0 * s)).exp() / (4.0 * s * s) * integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dunkl::lambda_s_apply;
    use crate::poly::parse_polynomial;
    use crate::reflection::{GroupPreset, MultiplicityFunction, ReflectionGroup};
    use crate::scalar::Rat;
    use crate::special::hyp1f1;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    fn ctx(preset: GroupPreset, ks: Vec<Rat>, n_max: usize) -> DunklContext<Rat> {
        let rs = preset.root_system::<Rat>().unwrap();
        let mult = MultiplicityFunction::new(&rs, ks).unwrap();
        let g = ReflectionGroup::build(rs).unwrap();
        DunklContext::new(g, mult, n_max).unwrap()
    }

    fn z2_kernel(k: Rat, order: usize) -> KernelTruncation<Rat> {
        let c = ctx(GroupPreset::Z2 { n: 1 }, vec![k], order);
        KernelTruncation::from_context(&c, order).unwrap()
    }

    #[test]
    fn kernel_at_zero_and_order_zero() {
        let tr = z2_kernel(rat(1, 1), 6);
        let (v, tail) = tr.eval_real(&[rat(3, 2)], &[rat(0, 1)]).unwrap();
        assert_eq!(v, rat(1, 1));
        assert!(tail == 0.0);
        // zero-order truncation is constantly 1
        let c = ctx(GroupPreset::Z2 { n: 1 }, vec![rat(1, 1)], 6);
        let table = build_vk(&c, 6).unwrap();
        let tr0 = KernelTruncation::new(c, table, 0).unwrap();
        let (v, _) = tr0.eval_real(&[rat(2, 1)], &[rat(5, 1)]).unwrap();
        assert_eq!(v, rat(1, 1));
    }

    #[test]
    fn zero_multiplicity_kernel_is_exponential_partial_sum() {
        let c = ctx(GroupPreset::Z2 { n: 2 }, vec![rat(0, 1), rat(0, 1)], 6);
        let tr = KernelTruncation::from_context(&c, 6).unwrap();
        let x = [rat(1, 2), rat(1, 3)];
        let y = [rat(2, 1), rat(-1, 1)];
        let (v, _) = tr.eval_real(&x, &y).unwrap();
        // partial sum of e^<x,y> with <x,y> = 1 - 1/3 = 2/3
        let dot = rat(2, 3);
        let mut expect = Rat::zero();
        for n in 0..=6usize {
            expect = expect.add_ref(&dot.pow_u(n as u32).div_ref(&factorial::<Rat>(n)));
        }
        assert_eq!(v, expect);
    }

    #[test]
    fn rank_one_kernel_matches_confluent_series_oracle() {
        // truncated kernel vs e^(xy) * 1F1(1, 3, -2xy) across |xy| <= 2
        let tr = z2_kernel(rat(1, 1), 30);
        for (xn, xd, yn, yd) in [
            (1i64, 1i64, 1i64, 1i64),
            (1, 1, 2, 1),
            (1, 2, 3, 1),
            (2, 1, 1, 1),
            (1, 1, -2, 1),
            (-1, 1, 1, 1),
            (-1, 2, -3, 1),
            (1, 4, 2, 1),
        ] {
            let x = rat(xn, xd);
            let y = rat(yn, yd);
            let (v, tail) = tr
                .eval_real(std::slice::from_ref(&x), std::slice::from_ref(&y))
                .unwrap();
            let xy = x.to_f64() * y.to_f64();
            assert!(xy.abs() <= 2.0 + 1e-12);
            let oracle = xy.exp() * hyp1f1(1.0, 3.0, -2.0 * xy);
            assert!(
                (v.to_f64() - oracle).abs() <= 1e-10 + tail,
                "xy = {xy}: {} vs {oracle}",
                v.to_f64()
            );
        }
    }

    #[test]
    fn kernel_is_symmetric_in_its_arguments() {
        let tr = z2_kernel(rat(5, 2), 10);
        let a = [rat(2, 3)];
        let b = [rat(-3, 2)];
        let (ab, _) = tr.eval_real(&a, &b).unwrap();
        let (ba, _) = tr.eval_real(&b, &a).unwrap();
        assert_eq!(ab, ba);

        let c = ctx(GroupPreset::Z2 { n: 2 }, vec![rat(1, 2), rat(2, 1)], 8);
        let tr = KernelTruncation::from_context(&c, 8).unwrap();
        let a = [rat(1, 2), rat(-1, 3)];
        let b = [rat(3, 4), rat(2, 1)];
        let (ab, _) = tr.eval_real(&a, &b).unwrap();
        let (ba, _) = tr.eval_real(&b, &a).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn bessel_average_properties() {
        let tr = z2_kernel(rat(1, 1), 12);
        let x = [rat(1, 1)];
        let y = [Cplx::from_re(rat(3, 4))];
        let neg_y = [Cplx::from_re(rat(-3, 4))];
        let j = tr.bessel(&x, &y).unwrap().value;
        // two-element group: average of the two kernel values, even in y
        let k_plus = tr.eval(&x, &y).unwrap().value;
        let k_minus = tr.eval(&x, &neg_y).unwrap().value;
        let avg = k_plus.add(&k_minus).scale(&rat(1, 2));
        assert_eq!(j.re, avg.re);
        let j_neg = tr.bessel(&x, &neg_y).unwrap().value;
        assert_eq!(j.re, j_neg.re);

        // zero multiplicity: partial sums of cosh(xy)
        let tr0 = z2_kernel(rat(0, 1), 12);
        let j0 = tr0
            .bessel(&[rat(1, 1)], &[Cplx::from_re(rat(1, 1))])
            .unwrap();
        let mut expect = Rat::zero();
        for n in (0..=12usize).step_by(2) {
            expect = expect.add_ref(&Rat::one().div_ref(&factorial::<Rat>(n)));
        }
        assert_eq!(j0.value.re, expect);

        // invariance in the first argument too
        let j_flip = tr.bessel(&[rat(-1, 1)], &y).unwrap().value;
        assert_eq!(j.re, j_flip.re);
    }

    #[test]
    fn modulus_bound_at_imaginary_argument() {
        let tr = z2_kernel(rat(1, 1), 30);
        // |K(x, iy)| <= 1 for real x, y
        for (x, y) in [
            (rat(1, 1), rat(2, 1)),
            (rat(3, 2), rat(1, 1)),
            (rat(1, 3), rat(-1, 1)),
        ] {
            let iy = [Cplx::new(Rat::zero(), y)];
            let kv = tr.eval(&[x], &iy).unwrap();
            assert!(
                kv.value.magnitude() <= 1.0 + kv.tail_bound + 1e-10,
                "modulus {} tail {}",
                kv.value.magnitude(),
                kv.tail_bound
            );
        }
    }

    #[test]
    fn derivative_bound_verdicts() {
        let tr = z2_kernel(rat(1, 1), 30);
        let x = [rat(1, 1)];
        let z = [Cplx::new(Rat::zero(), rat(2, 1))]; // 2i
        let v = kernel_bound_check(&tr, &x, &z, &Monomial(vec![0]), 1e-8).unwrap();
        assert!(v.pass && v.lhs <= 1.0 + 1e-10);
        // first derivative bound at the same point
        let v = kernel_bound_check(&tr, &x, &z, &Monomial(vec![1]), 1e-8).unwrap();
        assert!(v.pass);
        // z = 0: kernel value is exactly 1
        let z0 = [Cplx::from_re(rat(0, 1))];
        let v = kernel_bound_check(&tr, &x, &z0, &Monomial(vec![0]), 1e-8).unwrap();
        assert!(v.pass && (v.lhs - 1.0).abs() < 1e-15);
        // zero multiplicity, real argument: plain exponential bound
        let tr0 = z2_kernel(rat(0, 1), 30);
        let zr = [Cplx::from_re(rat(3, 2))];
        let v = kernel_bound_check(&tr0, &x, &zr, &Monomial(vec![0]), 1e-6).unwrap();
        assert!(v.pass);
        // far point: tail too large must be refused honestly
        let far = [Cplx::from_re(rat(20, 1))];
        let tr_short = z2_kernel(rat(1, 1), 6);
        assert!(matches!(
            kernel_bound_check(&tr_short, &x, &far, &Monomial(vec![0]), 1e-8),
            Err(DunklError::InvalidArgument(_))
        ));
    }

    #[test]
    fn gram_matrices_are_near_positive_semidefinite() {
        let tr = z2_kernel(rat(1, 1), 40);
        // single point: the matrix is [1]
        let v = gram_psd_check(&tr, &[vec![rat(0, 1)]], &[rat(1, 1)], 1e-8).unwrap();
        assert!((v.min_eigenvalue - 1.0).abs() < 1e-12 && v.pass);
        // five points in [-1, 1]
        let pts: Vec<Vec<Rat>> = [(-1i64, 1i64), (-1, 2), (0, 1), (1, 2), (1, 1)]
            .iter()
            .map(|&(n, d)| vec![rat(n, d)])
            .collect();
        let v = gram_psd_check(&tr, &pts, &[rat(1, 1)], 1e-8).unwrap();
        assert!(v.pass, "min eigenvalue {}", v.min_eigenvalue);
        assert!(v.min_eigenvalue >= -1e-8);
        // zero multiplicity: truncated rank-one structure stays near PSD
        let tr0 = z2_kernel(rat(0, 1), 40);
        let v = gram_psd_check(&tr0, &pts, &[rat(1, 1)], 1e-8).unwrap();
        assert!(v.pass);
    }

    #[test]
    fn recursion_residual_vanishes() {
        let tr = z2_kernel(rat(1, 1), 8);
        let xi = Vector::from_i64s(&[1]);
        let y = [rat(1, 1)];
        for n in 0..8usize {
            let r = kernel_recursion_residual(&tr, &xi, &y, n).unwrap();
            assert!(r.is_zero(), "degree {n}: {r}");
        }
        // two-dimensional direct product, rational y
        let c = ctx(GroupPreset::Z2 { n: 2 }, vec![rat(1, 2), rat(5, 2)], 6);
        let tr = KernelTruncation::from_context(&c, 6).unwrap();
        let y = [rat(2, 3), rat(-1, 2)];
        for xi in [Vector::from_i64s(&[1, 0]), Vector::from_i64s(&[1, -2])] {
            for n in 0..6usize {
                let r = kernel_recursion_residual(&tr, &xi, &y, n).unwrap();
                assert!(r.is_zero(), "xi = {xi:?}, degree {n}");
            }
        }
    }

    #[test]
    fn measure_moments_match_intertwiner_coefficients() {
        // k = 1, x = 1: first moment 1/3
        let mu = Measure1D::new(1.0, 1.0);
        assert!((measure_moments(&mu, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!((measure_moments(&mu, 1).unwrap() - 1.0 / 3.0).abs() < 1e-10);
        // k = 1, x = 2: second moment b_2 * 4 = 4/3
        let mu = Measure1D::new(2.0, 1.0);
        assert!((measure_moments(&mu, 2).unwrap() - 4.0 / 3.0).abs() < 1e-10);
        // sweep against the exact coefficient recurrence
        for (k_num, k_den) in [(1i64, 2i64), (1, 1), (5, 2)] {
            let k = rat(k_num, k_den);
            let kf = k.to_f64();
            let mu = Measure1D::new(1.5, kf);
            for n in 0..=6u32 {
                let exact = crate::intertwine::vk_1d_coeff(n, &k).to_f64() * 1.5f64.powi(n as i32);
                let numeric = measure_moments(&mu, n).unwrap();
                assert!(
                    (numeric - exact).abs() <= 1e-10 * exact.abs().max(1.0),
                    "k = {kf}, n = {n}: {numeric} vs {exact}"
                );
            }
        }
        // point mass at zero
        let mu0 = Measure1D::new(0.0, 1.0);
        assert_eq!(measure_moments(&mu0, 0).unwrap(), 1.0);
        assert_eq!(measure_moments(&mu0, 3).unwrap(), 0.0);
    }

    #[test]
    fn measure_transformation_laws() {
        // identity transform
        let v = measure_transform_check(&[1.0], &[1.0], 1.0, &[false], &[2], 1e-10).unwrap();
        assert!(v.pass);
        // sign flip negates odd moments
        let v = measure_transform_check(&[1.0], &[1.0], 1.0, &[true], &[1], 1e-10).unwrap();
        assert!(v.pass && (v.lhs + 1.0 / 3.0).abs() < 1e-10);
        // scaling by 2 quadruples the second moment: 4 * (1/3)
        let v = measure_transform_check(&[1.0], &[1.0], 2.0, &[false], &[2], 1e-10).unwrap();
        assert!(v.pass && (v.lhs - 4.0 / 3.0).abs() < 1e-10);
        // two-dimensional product case with mixed flips
        let v = measure_transform_check(
            &[1.0, 2.0],
            &[0.5, 2.5],
            1.5,
            &[true, false],
            &[1, 2],
            1e-10,
        )
        .unwrap();
        assert!(v.pass);
    }

    #[test]
    fn support_box_equals_orbit_hull() {
        let c = ctx(GroupPreset::Z2 { n: 2 }, vec![rat(1, 1), rat(1, 1)], 2);
        let v = support_hull_check(&c, &[1.0, 2.0]).unwrap();
        assert!(v.pass);
        assert_eq!(v.box_halfwidths, vec![1.0, 2.0]);
        // degenerate base point
        let v = support_hull_check(&c, &[0.0, 0.0]).unwrap();
        assert!(v.pass);
        // non-product group is refused
        let cb = ctx(GroupPreset::B { n: 2 }, vec![rat(1, 1), rat(1, 1)], 2);
        assert!(matches!(
            support_hull_check(&cb, &[1.0, 2.0]),
            Err(DunklError::WrongGroup(_))
        ));
    }

    #[test]
    fn closed_form_integral_matches_conjugated_operator() {
        // Lambda_s on x^2 is the constant 2; on x^4 it is 4x^2 + 16s;
        // on x^3 it is 2x
        for (src, s_num, s_den) in [
            ("x1^2", 1i64, 1i64),
            ("x1^4", 1, 1),
            ("x1^4", 1, 2),
            ("x1^3", 1, 1),
        ] {
            let s = s_num as f64 / s_den as f64;
            let p_exact = parse_polynomial::<Rat>(src, 1).unwrap();
            let exact_image = lambda_s_apply(&rat(s_num, s_den), &p_exact).unwrap();
            let p_float = p_exact.to_f64_poly();
            for x in [-2.0f64, -0.7, 0.3, 1.0, 2.5] {
                let numeric = lambda_s_closed_form(s, &p_float, x, 1e-12).unwrap();
                let exact = exact_image.to_f64_poly().evaluate(&[x]);
                assert!(
                    (numeric - exact).abs() <= 1e-8 * exact.abs().max(1.0),
                    "{src}, s = {s}, x = {x}: {numeric} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn tail_sum_is_the_exponential_remainder() {
        // full sum equals e^r
        assert!((exp_tail(1.0, -1) - 1.0f64.exp()).abs() < 1e-14);
        // subtracting partial sums: e^2 - (1 + 2 + 2) = tail after order 2
        let expect = 2.0f64.exp() - 5.0;
        assert!((exp_tail(2.0, 2) - expect).abs() < 1e-12);
        // rapid decay for large order
        assert!(exp_tail(2.0, 30) < 1e-24);
    }
}
