//! Difference-differential operators attached to a reflection group, the
//! generalized Laplacian, and a small calculus of degree-lowering operators:
//! per-degree matrices, terminating exponentials and resolvents, Euler and
//! Trotter product approximations, the conjugated one-dimensional operator
//! family `lambda_s`, and the positive-minimum-principle check.
//!
//! Everything here is exact in exact mode: the singular-looking difference
//! quotients are computed by polynomial division that provably leaves no
//! remainder, so the hyperplane zero sets never materialize numerically.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use crate::error::{DunklError, Result};
use crate::linalg::Matrix;
use crate::poly::{monomials_of_degree, monomials_up_to, Monomial, Polynomial, Vector};
use crate::reflection::{MultiplicityFunction, ReflectionGroup};
use crate::scalar::Scalar;

/// Group, multiplicity function, and the per-root caches every operator
/// application needs. `n_max` is the advertised working degree for
/// verification sweeps; operator caches themselves grow on demand.
#[derive(Clone, Debug)]
pub struct DunklContext<S> {
    group: ReflectionGroup<S>,
    multiplicity: MultiplicityFunction<S>,
    n_max: usize,
    k_by_root: Vec<S>,
    linear_forms: Vec<Polynomial<S>>,
}

impl<S: Scalar> DunklContext<S> {
    pub fn new(
        group: ReflectionGroup<S>,
        multiplicity: MultiplicityFunction<S>,
        n_max: usize,
    ) -> Result<Self> {
        let rs = group.root_system();
        if multiplicity.orbit_values().len() != rs.num_orbits() {
            return Err(DunklError::InvalidMultiplicity(format!(
                "multiplicity has {} orbit values but the system has {} orbits",
                multiplicity.orbit_values().len(),
                rs.num_orbits()
            )));
        }
        let k_by_root: Vec<S> = (0..rs.num_positive_roots())
            .map(|i| multiplicity.value_on_root(rs, i).clone())
            .collect();
        let linear_forms: Vec<Polynomial<S>> =
            rs.positive_roots().iter().map(|a| linear_form(a)).collect();
        Ok(DunklContext {
            group,
            multiplicity,
            n_max,
            k_by_root,
            linear_forms,
        })
    }

    pub fn nvars(&self) -> usize {
        self.group.nvars()
    }

    pub fn group(&self) -> &ReflectionGroup<S> {
        &self.group
    }

    pub fn root_system(&self) -> &crate::reflection::RootSystem<S> {
        self.group.root_system()
    }

    pub fn multiplicity(&self) -> &MultiplicityFunction<S> {
        &self.multiplicity
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Multiplicity value attached to positive root `i`.
    pub fn k_root(&self, i: usize) -> &S {
        &self.k_by_root[i]
    }

    /// `<alpha_i, x>` as a polynomial.
    pub fn linear_form_of_root(&self, i: usize) -> &Polynomial<S> {
        &self.linear_forms[i]
    }

    /// `p` composed with the reflection in root `i`.
    pub fn reflect_poly(&self, i: usize, p: &Polynomial<S>) -> Polynomial<S> {
        // reflections are symmetric orthogonal matrices, so acting by the
        // matrix and substituting it coincide
        self.root_system().reflection(i).act_on_polynomial(p)
    }

    /// Sum of the multiplicity over all positive roots.
    pub fn total_multiplicity(&self) -> S {
        self.multiplicity.total(self.root_system())
    }
}

/// `<alpha, x>` as a degree-1 polynomial.
pub fn linear_form<S: Scalar>(alpha: &Vector<S>) -> Polynomial<S> {
    let n = alpha.dim();
    let mut p = Polynomial::zero(n);
    for (i, a) in alpha.0.iter().enumerate() {
        if !a.is_zero() {
            p.add_term(Monomial::var(n, i), a);
        }
    }
    p
}

/// First-order difference-differential operator in direction `xi`:
/// directional derivative plus the multiplicity-weighted reflection
/// difference quotients. Exact polynomial division realizes each quotient;
/// a nonzero remainder is impossible and reported as an internal error.
pub fn dunkl_apply<S: Scalar>(
    ctx: &DunklContext<S>,
    xi: &Vector<S>,
    p: &Polynomial<S>,
) -> Result<Polynomial<S>> {
    if xi.dim() != ctx.nvars() || p.nvars() != ctx.nvars() {
        return Err(DunklError::DimensionMismatch(format!(
            "operator lives in {} variables, direction has {} and input {}",
            ctx.nvars(),
            xi.dim(),
            p.nvars()
        )));
    }
    let mut out = p.directional_derivative(xi);
    for (i, alpha) in ctx.root_system().positive_roots().iter().enumerate() {
        let k = ctx.k_root(i);
        if k.is_zero() {
            continue;
        }
        let pairing = alpha.dot(xi);
        if pairing.is_zero() {
            continue;
        }
        let reflected = ctx.reflect_poly(i, p);
        let diff = p.sub(&reflected);
        if diff.is_zero() {
            continue;
        }
        let quotient = diff.divide_exact(ctx.linear_form_of_root(i))?;
        out = out.add(&quotient.scale(&k.mul_ref(&pairing)));
    }
    Ok(out)
}

/// Second-order difference operator attached to a single reflection:
/// `<grad p, alpha>/<alpha,x> - (|alpha|^2/2) (p - p o sigma)/<alpha,x>^2`.
/// The `|alpha|^2/2` factor makes the expression invariant under rescaling
/// the stored root representative. No multiplicity value is involved.
pub fn delta_alpha_apply<S: Scalar>(alpha: &Vector<S>, p: &Polynomial<S>) -> Result<Polynomial<S>> {
    let n = alpha.dim();
    if p.nvars() != n {
        return Err(DunklError::DimensionMismatch(format!(
            "root has dimension {n} but the polynomial has {} variables",
            p.nvars()
        )));
    }
    let ell = linear_form(alpha);
    let sigma = crate::reflection::reflection_matrix(alpha);
    let reflected = sigma.act_on_polynomial(p);
    let diff = p.sub(&reflected);
    // inner = (p - p o sigma) / <alpha, x>, exactly
    let inner = if diff.is_zero() {
        Polynomial::zero(n)
    } else {
        diff.divide_exact(&ell)?
    };
    let grad_pairing = p.directional_derivative(alpha);
    let half_norm = alpha.norm_sq().div_ref(&S::from_i64(2));
    let numerator = grad_pairing.sub(&inner.scale(&half_norm));
    if numerator.is_zero() {
        return Ok(Polynomial::zero(n));
    }
    numerator.divide_exact(&ell)
}

/// One-dimensional specialization: `p'(x)/x - (p(x) - p(-x))/(2x^2)`.
pub fn delta_1d<S: Scalar>(p: &Polynomial<S>) -> Result<Polynomial<S>> {
    delta_alpha_apply(&Vector::unit(1, 0), p)
}

/// Classical Laplacian (sum of second partials).
pub fn classical_laplacian<S: Scalar>(p: &Polynomial<S>) -> Polynomial<S> {
    let mut out = Polynomial::zero(p.nvars());
    for i in 0..p.nvars() {
        out = out.add(&p.derivative(i).derivative(i));
    }
    out
}

/// Generalized Laplacian via its difference form: the classical Laplacian
/// plus twice the multiplicity-weighted sum of the per-root second-order
/// difference operators.
pub fn laplacian_apply<S: Scalar>(
    ctx: &DunklContext<S>,
    p: &Polynomial<S>,
) -> Result<Polynomial<S>> {
    let mut out = classical_laplacian(p);
    out = out.add(&l_k_apply(ctx, p)?);
    Ok(out)
}

/// The difference part of the generalized Laplacian:
/// `2 * sum_alpha k(alpha) delta_alpha`.
pub fn l_k_apply<S: Scalar>(ctx: &DunklContext<S>, p: &Polynomial<S>) -> Result<Polynomial<S>> {
    let mut out = Polynomial::zero(ctx.nvars());
    let two = S::from_i64(2);
    for (i, alpha) in ctx.root_system().positive_roots().iter().enumerate() {
        let k = ctx.k_root(i);
        if k.is_zero() {
            continue;
        }
        let d = delta_alpha_apply(alpha, p)?;
        out = out.add(&d.scale(&two.mul_ref(k)));
    }
    Ok(out)
}

/// Generalized Laplacian as the sum of squared first-order operators in the
/// coordinate directions; cross-validates [`laplacian_apply`].
pub fn laplacian_apply_as_squares<S: Scalar>(
    ctx: &DunklContext<S>,
    p: &Polynomial<S>,
) -> Result<Polynomial<S>> {
    let n = ctx.nvars();
    let mut out = Polynomial::zero(n);
    for i in 0..n {
        let e = Vector::unit(n, i);
        let once = dunkl_apply(ctx, &e, p)?;
        out = out.add(&dunkl_apply(ctx, &e, &once)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// operator calculus
// ---------------------------------------------------------------------------

type ApplyFn<S> = dyn Fn(&Polynomial<S>) -> Result<Polynomial<S>> + Send + Sync;

/// A linear operator on polynomials with lazily built per-degree matrices.
///
/// For a degree-lowering operator, `apply` goes through the cached matrix of
/// the operator on the span of monomials of degree <= n (global graded-lex
/// basis); repeated applications (exponentials, resolvents, product
/// formulas) then cost one matrix-vector product each. Operators that do
/// not claim to lower degree apply their closure directly.
#[derive(Clone)]
pub struct PolyOperator<S> {
    nvars: usize,
    degree_lowering: bool,
    apply_fn: Arc<ApplyFn<S>>,
    cache: Arc<Mutex<BTreeMap<usize, Arc<Matrix<S>>>>>,
}

impl<S: Scalar> PolyOperator<S> {
    pub fn new(
        nvars: usize,
        degree_lowering: bool,
        f: impl Fn(&Polynomial<S>) -> Result<Polynomial<S>> + Send + Sync + 'static,
    ) -> Self {
        PolyOperator {
            nvars,
            degree_lowering,
            apply_fn: Arc::new(f),
            cache: Arc::new(Mutex::new(BTreeMap::new())),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn claims_degree_lowering(&self) -> bool {
        self.degree_lowering
    }

    /// Matrix of the operator on polynomials of degree <= n, in the global
    /// graded-lex monomial basis (ascending). Entry `(i, j)` is the
    /// coefficient of basis monomial `i` in the image of basis monomial `j`;
    /// for a degree-lowering operator the matrix is strictly upper
    /// triangular, hence nilpotent.
    pub fn matrix_up_to(&self, n: usize) -> Result<Arc<Matrix<S>>> {
        {
            let cache = self.cache.lock().unwrap();
            if let Some(m) = cache.get(&n) {
                return Ok(Arc::clone(m));
            }
        }
        let basis = monomials_up_to(self.nvars, n);
        let dim = basis.len();
        let mut m = Matrix::zero(dim, dim);
        for (j, mono) in basis.iter().enumerate() {
            let image = (self.apply_fn)(&Polynomial::from_monomial(mono.clone(), S::one()))?;
            let col = image
                .coeff_vector(&basis)
                .map_err(|_| DunklError::NotDegreeLowering(n))?;
            for (i, c) in col.into_iter().enumerate() {
                if !c.is_zero() {
                    m.set(i, j, c);
                }
            }
        }
        let arc = Arc::new(m);
        let mut cache = self.cache.lock().unwrap();
        Ok(Arc::clone(
            cache.entry(n).or_insert_with(|| Arc::clone(&arc)),
        ))
    }

    /// Apply the operator once. Degree-lowering operators dispatch through
    /// the per-degree matrix cache.
    pub fn apply(&self, p: &Polynomial<S>) -> Result<Polynomial<S>> {
        if p.nvars() != self.nvars {
            return Err(DunklError::DimensionMismatch(format!(
                "operator in {} variables applied to a polynomial in {}",
                self.nvars,
                p.nvars()
            )));
        }
        let Some(deg) = p.total_degree() else {
            return Ok(Polynomial::zero(self.nvars));
        };
        if !self.degree_lowering {
            return (self.apply_fn)(p);
        }
        let m = self.matrix_up_to(deg)?;
        let basis = monomials_up_to(self.nvars, deg);
        let coeffs = p.coeff_vector(&basis)?;
        let image = m.matvec(&coeffs);
        Ok(Polynomial::from_coeff_vector(self.nvars, &basis, &image))
    }

    /// Verify the degree-lowering claim on every basis monomial of degree
    /// <= n_max: image of a degree-d monomial lies in degree <= d-1.
    pub fn verify_degree_lowering(&self, n_max: usize) -> Result<()> {
        for d in 0..=n_max {
            for mono in monomials_of_degree(self.nvars, d) {
                let image = (self.apply_fn)(&Polynomial::from_monomial(mono, S::one()))?;
                if let Some(deg) = image.total_degree() {
                    if !image.is_zero() && deg + 1 > d {
                        return Err(DunklError::NotDegreeLowering(d));
                    }
                }
            }
        }
        Ok(())
    }

    /// Pointwise sum of two operators on the same space. The result claims
    /// degree-lowering only if both summands do.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "operator dimension mismatch");
        let a = Arc::clone(&self.apply_fn);
        let b = Arc::clone(&other.apply_fn);
        PolyOperator::new(
            self.nvars,
            self.degree_lowering && other.degree_lowering,
            move |p| Ok(a(p)?.add(&b(p)?)),
        )
    }

    /// Scalar multiple of the operator.
    pub fn scale(&self, c: S) -> Self {
        let a = Arc::clone(&self.apply_fn);
        PolyOperator::new(self.nvars, self.degree_lowering, move |p| {
            Ok(a(p)?.scale(&c))
        })
    }

    // ---- standard instances ------------------------------------------------

    /// Partial derivative in coordinate `i`.
    pub fn partial(nvars: usize, i: usize) -> Self {
        PolyOperator::new(nvars, true, move |p| Ok(p.derivative(i)))
    }

    /// Second derivative in the single variable (one-dimensional).
    pub fn d_squared_1d() -> Self {
        PolyOperator::new(1, true, |p| Ok(p.derivative(0).derivative(0)))
    }

    /// One-dimensional second-order difference operator
    /// `p'(x)/x - (p(x)-p(-x))/(2x^2)`.
    pub fn delta_1d() -> Self {
        PolyOperator::new(1, true, |p| delta_1d(p))
    }

    /// Classical Laplacian.
    pub fn classical_laplacian(nvars: usize) -> Self {
        PolyOperator::new(nvars, true, move |p| Ok(classical_laplacian(p)))
    }

    /// First-order difference-differential operator in direction `xi`.
    pub fn dunkl(ctx: &DunklContext<S>, xi: Vector<S>) -> Self {
        let ctx = ctx.clone();
        PolyOperator::new(ctx.nvars(), true, move |p| dunkl_apply(&ctx, &xi, p))
    }

    /// Generalized Laplacian (difference form).
    pub fn laplacian(ctx: &DunklContext<S>) -> Self {
        let ctx = ctx.clone();
        PolyOperator::new(ctx.nvars(), true, move |p| laplacian_apply(&ctx, p))
    }

    /// Difference part of the generalized Laplacian,
    /// `2 sum_alpha k(alpha) delta_alpha` (the generalized minus the
    /// classical Laplacian).
    pub fn l_k(ctx: &DunklContext<S>) -> Self {
        let ctx = ctx.clone();
        PolyOperator::new(ctx.nvars(), true, move |p| l_k_apply(&ctx, p))
    }
}

/// Terminating exponential series `e^{tA} p` for degree-lowering `A`.
/// The series must vanish within deg(p) + 1 applications; if it does not,
/// the operator was not degree-lowering and an error is raised.
pub fn exp_apply<S: Scalar>(
    a: &PolyOperator<S>,
    t: &S,
    p: &Polynomial<S>,
) -> Result<Polynomial<S>> {
    let deg = match p.total_degree() {
        None => return Ok(Polynomial::zero(p.nvars())),
        Some(d) => d,
    };
    if t.is_zero() {
        return Ok(p.clone());
    }
    let mut sum = p.clone();
    let mut term = p.clone(); // A^j p / j! * t^j, built incrementally
    for j in 1..=(deg + 1) {
        term = a.apply(&term)?;
        if term.is_zero() {
            return Ok(sum);
        }
        term = term.scale(&t.div_ref(&S::from_i64(j as i64)));
        sum = sum.add(&term);
    }
    Err(DunklError::NotDegreeLowering(deg))
}

/// Exact finite Neumann series for the resolvent `(lambda I - A)^{-1} p`
/// of a degree-lowering operator; `lambda` must be nonzero.
pub fn resolvent_apply<S: Scalar>(
    a: &PolyOperator<S>,
    lambda: &S,
    p: &Polynomial<S>,
) -> Result<Polynomial<S>> {
    if lambda.is_zero() {
        return Err(DunklError::ZeroResolventShift);
    }
    let deg = match p.total_degree() {
        None => return Ok(Polynomial::zero(p.nvars())),
        Some(d) => d,
    };
    let inv = S::one().div_ref(lambda);
    let mut sum = p.clone();
    let mut term = p.clone(); // (A/lambda)^j p
    for _ in 1..=(deg + 1) {
        term = a.apply(&term)?.scale(&inv);
        if term.is_zero() {
            return Ok(sum.scale(&inv));
        }
        sum = sum.add(&term);
    }
    Err(DunklError::NotDegreeLowering(deg))
}

/// Euler product approximation `(I - A/n)^{-n} p` to `e^A p`, computed as
/// `n` repeated resolvent applications. Coefficient-wise error is O(1/n).
pub fn euler_approx<S: Scalar>(
    a: &PolyOperator<S>,
    n: u32,
    p: &Polynomial<S>,
) -> Result<Polynomial<S>> {
    assert!(n >= 1, "euler approximation needs n >= 1");
    // (I - A/n)^{-1} = n (nI - A)^{-1}
    let lam = S::from_i64(n as i64);
    let mut q = p.clone();
    for _ in 0..n {
        q = resolvent_apply(a, &lam, &q)?.scale(&lam);
    }
    Ok(q)
}

/// Trotter product approximation `(e^{A/n} e^{B/n})^n p` to `e^{A+B} p`.
/// Coefficient-wise error is O(1/n); exact when `A` and `B` commute.
pub fn trotter_approx<S: Scalar>(
    a: &PolyOperator<S>,
    b: &PolyOperator<S>,
    n: u32,
    p: &Polynomial<S>,
) -> Result<Polynomial<S>> {
    assert!(n >= 1, "trotter approximation needs n >= 1");
    let step = S::one().div_ref(&S::from_i64(n as i64));
    let mut q = p.clone();
    for _ in 0..n {
        q = exp_apply(b, &step, &q)?;
        q = exp_apply(a, &step, &q)?;
    }
    Ok(q)
}

/// Conjugated one-dimensional operator family
/// `e^{-s D^2} (delta) e^{s D^2}`, applied exactly in three stages.
/// Lowers degree by two; at `s = 0` it is `delta` itself.
pub fn lambda_s_apply<S: Scalar>(s: &S, p: &Polynomial<S>) -> Result<Polynomial<S>> {
    if p.nvars() != 1 {
        return Err(DunklError::DimensionMismatch(format!(
            "lambda_s acts on one-variable polynomials, got {}",
            p.nvars()
        )));
    }
    let d2 = PolyOperator::d_squared_1d();
    let forward = exp_apply(&d2, s, p)?;
    let middle = delta_1d(&forward)?;
    exp_apply(&d2, &s.neg_ref(), &middle)
}

/// Exact characterization residual for the even case of the conjugated
/// operator: returns `p' - (x q - 2 s q')`, which vanishes identically iff
/// `q` is the image of the even polynomial `p`.
pub fn lambda_ode_residual<S: Scalar>(
    s: &S,
    p: &Polynomial<S>,
    q: &Polynomial<S>,
) -> Result<Polynomial<S>> {
    if p.nvars() != 1 || q.nvars() != 1 {
        return Err(DunklError::DimensionMismatch(
            "one-variable polynomials required".into(),
        ));
    }
    if !is_even_1d(p) {
        return Err(DunklError::InvalidArgument(
            "characterization residual requires an even polynomial".into(),
        ));
    }
    let x = Polynomial::var(1, 0);
    let two_s = S::from_i64(2).mul_ref(s);
    let rhs = x.mul(q).sub(&q.derivative(0).scale(&two_s));
    Ok(p.derivative(0).sub(&rhs))
}

fn is_even_1d<S: Scalar>(p: &Polynomial<S>) -> bool {
    p.terms().all(|(m, _)| m.0[0] % 2 == 0)
}

fn is_odd_1d<S: Scalar>(p: &Polynomial<S>) -> bool {
    p.terms().all(|(m, _)| m.0[0] % 2 == 1)
}

/// Unique polynomial solution `y` (even, degree <= deg(p) - 1) of
/// `c y' - x y = p` for odd `p` and `c > 0`, by strictly triangular
/// back-substitution on coefficients.
pub fn ode_poly_solve<S: Scalar>(c: &S, p: &Polynomial<S>) -> Result<Polynomial<S>> {
    if p.nvars() != 1 {
        return Err(DunklError::DimensionMismatch(
            "one-variable polynomial required".into(),
        ));
    }
    if !c.is_positive_val() {
        return Err(DunklError::InvalidArgument(
            "ode solve requires a positive coefficient".into(),
        ));
    }
    if !is_odd_1d(p) {
        return Err(DunklError::InvalidArgument(
            "ode solve requires an odd polynomial".into(),
        ));
    }
    if p.is_zero() {
        return Ok(Polynomial::zero(1));
    }
    // p = sum b_j x^{2j+1}; y = sum a_j x^{2j} with
    //   a_n = -b_n,  a_j = 2 c (j+1) a_{j+1} - b_j  (descending)
    let deg = p.total_degree().unwrap();
    let n = (deg - 1) / 2;
    let b = |j: usize| p.coeff(&Monomial(vec![(2 * j + 1) as u32]));
    let mut a = vec![S::zero(); n + 1];
    a[n] = b(n).neg_ref();
    for j in (0..n).rev() {
        let factor = S::from_i64(2)
            .mul_ref(c)
            .mul_ref(&S::from_i64((j + 1) as i64));
        a[j] = factor.mul_ref(&a[j + 1]).sub_ref(&b(j));
    }
    let mut y = Polynomial::zero(1);
    for (j, coeff) in a.iter().enumerate() {
        y.add_term(Monomial(vec![(2 * j) as u32]), coeff);
    }
    Ok(y)
}

/// Residual of the commutation identity
/// `e^{cD^2}(x p) = x e^{cD^2} p + 2c e^{cD^2} p'`; identically zero.
pub fn exp_conjugate_identity_check<S: Scalar>(c: &S, p: &Polynomial<S>) -> Result<Polynomial<S>> {
    if p.nvars() != 1 {
        return Err(DunklError::DimensionMismatch(
            "one-variable polynomial required".into(),
        ));
    }
    let d2 = PolyOperator::d_squared_1d();
    let x = Polynomial::var(1, 0);
    let lhs = exp_apply(&d2, c, &x.mul(p))?;
    let rhs_a = x.mul(&exp_apply(&d2, c, p)?);
    let rhs_b = exp_apply(&d2, c, &p.derivative(0))?.scale(&S::from_i64(2).mul_ref(c));
    Ok(lhs.sub(&rhs_a).sub(&rhs_b))
}

/// Result of a positive-minimum-principle evaluation.
#[derive(Clone, Debug)]
pub struct MinimumPrincipleVerdict<S> {
    /// Value of `A p` at the claimed zero.
    pub value: S,
    /// Whether the value clears the nonnegativity threshold.
    pub pass: bool,
}

/// At a zero `x0` of a (caller-guaranteed nonnegative) polynomial, a
/// positivity-generating operator must satisfy `A p(x0) >= 0`. Exact mode
/// demands `>= 0`; float mode allows `-tol` slack. Errors if `p(x0) != 0`.
pub fn minimum_principle_check<S: Scalar>(
    a: &PolyOperator<S>,
    p: &Polynomial<S>,
    x0: &[S],
    tol: f64,
) -> Result<MinimumPrincipleVerdict<S>> {
    let at_zero = p.evaluate(x0);
    let zero_ok = if S::IS_EXACT {
        at_zero.is_zero()
    } else {
        at_zero.to_f64().abs() <= tol
    };
    if !zero_ok {
        return Err(DunklError::NotZeroAtPoint(at_zero.render()));
    }
    let value = a.apply(p)?.evaluate(x0);
    let pass = if S::IS_EXACT {
        !value.is_negative_val()
    } else {
        value.to_f64() >= -tol
    };
    Ok(MinimumPrincipleVerdict { value, pass })
}

/// Matrix of the direction-`xi` first-order operator from homogeneous
/// degree `n` to degree `n-1`, in the ascending graded-lex monomial bases.
/// Entry `(i, j)` is the coefficient of target monomial `i` in the image of
/// source monomial `j`. For `n = 0` the target space is trivial and the
/// matrix has zero rows.
pub fn dunkl_matrix_homogeneous<S: Scalar>(
    ctx: &DunklContext<S>,
    xi: &Vector<S>,
    n: usize,
) -> Result<Matrix<S>> {
    let nv = ctx.nvars();
    let source = monomials_of_degree(nv, n);
    if n == 0 {
        return Ok(Matrix::zero(0, 1));
    }
    let target = monomials_of_degree(nv, n - 1);
    let mut m = Matrix::zero(target.len(), source.len());
    for (j, mono) in source.iter().enumerate() {
        let image = dunkl_apply(ctx, xi, &Polynomial::from_monomial(mono.clone(), S::one()))?;
        let col = image.coeff_vector(&target)?;
        for (i, c) in col.into_iter().enumerate() {
            if !c.is_zero() {
                m.set(i, j, c);
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use crate::reflection::GroupPreset;
    use crate::scalar::Rat;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    fn p1(src: &str) -> Polynomial<Rat> {
        parse_polynomial(src, 1).unwrap()
    }

    fn ctx_1d(k: Rat) -> DunklContext<Rat> {
        let rs = GroupPreset::Z2 { n: 1 }.root_system::<Rat>().unwrap();
        let mult = MultiplicityFunction::new(&rs, vec![k]).unwrap();
        let g = ReflectionGroup::build(rs).unwrap();
        DunklContext::new(g, mult, 8).unwrap()
    }

    fn ctx_b2(k_short: Rat, k_long: Rat) -> DunklContext<Rat> {
        let rs = GroupPreset::B { n: 2 }.root_system::<Rat>().unwrap();
        let mult = MultiplicityFunction::new(&rs, vec![k_short, k_long]).unwrap();
        let g = ReflectionGroup::build(rs).unwrap();
        DunklContext::new(g, mult, 6).unwrap()
    }

    #[test]
    fn first_order_operator_one_dimension() {
        let k = rat(3, 4);
        let ctx = ctx_1d(k.clone());
        let e1 = Vector::unit(1, 0);
        // T x = 1 + 2k
        let tx = dunkl_apply(&ctx, &e1, &p1("x1")).unwrap();
        assert_eq!(tx, p1("5/2"));
        // T x^2 = 2x: the even difference vanishes
        let tx2 = dunkl_apply(&ctx, &e1, &p1("x1^2")).unwrap();
        assert_eq!(tx2, p1("2*x1"));
        // T x^n = (n + 2k [n odd]) x^{n-1}
        let tx5 = dunkl_apply(&ctx, &e1, &p1("x1^5")).unwrap();
        assert_eq!(tx5, p1("13/2*x1^4"));
    }

    #[test]
    fn zero_multiplicity_reduces_to_derivative() {
        let ctx = ctx_b2(rat(0, 1), rat(0, 1));
        let p = parse_polynomial::<Rat>("x1^3*x2 - 2*x1*x2^2 + x2", 2).unwrap();
        let xi = Vector::from_i64s(&[2, -1]);
        let t = dunkl_apply(&ctx, &xi, &p).unwrap();
        assert_eq!(t, p.directional_derivative(&xi));
    }

    #[test]
    fn first_order_operator_lowers_homogeneous_degree() {
        let ctx = ctx_b2(rat(1, 1), rat(1, 2));
        let xi = Vector::from_i64s(&[1, 1]);
        for d in 1..=5usize {
            for mono in monomials_of_degree(2, d) {
                let p = Polynomial::from_monomial(mono, Rat::one());
                let image = dunkl_apply(&ctx, &xi, &p).unwrap();
                if !image.is_zero() {
                    assert_eq!(image.homogeneous_degree(), Some(d - 1));
                }
            }
        }
    }

    #[test]
    fn commutativity_of_directional_operators() {
        let ctx = ctx_b2(rat(1, 1), rat(1, 2));
        let xi = Vector::from_i64s(&[1, 0]);
        let eta = Vector::from_i64s(&[1, 3]);
        for d in 0..=5usize {
            for mono in monomials_of_degree(2, d) {
                let p = Polynomial::from_monomial(mono, Rat::one());
                let a = dunkl_apply(&ctx, &eta, &dunkl_apply(&ctx, &xi, &p).unwrap()).unwrap();
                let b = dunkl_apply(&ctx, &xi, &dunkl_apply(&ctx, &eta, &p).unwrap()).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn equivariance_under_the_group() {
        let ctx = ctx_b2(rat(1, 1), rat(1, 2));
        let xi = Vector::from_i64s(&[1, 2]);
        let p = parse_polynomial::<Rat>("x1^3 - x1*x2^2 + 2*x2^3", 2).unwrap();
        for g in ctx.group().elements() {
            // g T_xi g^{-1} p = T_{g xi} p
            let ginv_p = g.transpose().act_on_polynomial(&p);
            let lhs = g.act_on_polynomial(&dunkl_apply(&ctx, &xi, &ginv_p).unwrap());
            let g_xi = Vector(g.matvec(&xi.0));
            let rhs = dunkl_apply(&ctx, &g_xi, &p).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn second_order_difference_operator_basics() {
        // delta x^2 = 2, delta x^4 = 4x^2, delta const = 0
        assert_eq!(delta_1d(&p1("x1^2")).unwrap(), p1("2"));
        assert_eq!(delta_1d(&p1("x1^4")).unwrap(), p1("4*x1^2"));
        assert_eq!(delta_1d(&p1("7")).unwrap(), p1("0"));
        // odd case: delta x^3 = 3x^2/x - x^3/x^2... = 2x
        assert_eq!(delta_1d(&p1("x1^3")).unwrap(), p1("2*x1"));
        assert_eq!(delta_1d(&p1("x1")).unwrap(), p1("0"));
    }

    #[test]
    fn second_order_operator_is_scale_invariant_and_degree_minus_two() {
        let alpha = Vector::<Rat>::from_i64s(&[1, -1]);
        let alpha_scaled = alpha.scale(&rat(-7, 3));
        let p = parse_polynomial::<Rat>("x1^4 - x1*x2^3 + x1^2*x2^2", 2).unwrap();
        let a = delta_alpha_apply(&alpha, &p).unwrap();
        let b = delta_alpha_apply(&alpha_scaled, &p).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.homogeneous_degree(), Some(2));
    }

    #[test]
    fn laplacian_frozen_values_and_cross_validation() {
        // 1D: L x^2 = 2 + 4k
        let k = rat(5, 2);
        let ctx = ctx_1d(k);
        assert_eq!(laplacian_apply(&ctx, &p1("x1^2")).unwrap(), p1("12"));
        // 1D, k = 1: L x^4 = 20 x^2
        let ctx1 = ctx_1d(rat(1, 1));
        assert_eq!(laplacian_apply(&ctx1, &p1("x1^4")).unwrap(), p1("20*x1^2"));
        // k = 0 is the classical Laplacian
        let ctx0 = ctx_b2(rat(0, 1), rat(0, 1));
        let p = parse_polynomial::<Rat>("x1^4 + x1^2*x2^2", 2).unwrap();
        assert_eq!(laplacian_apply(&ctx0, &p).unwrap(), classical_laplacian(&p));
        // both routes agree on a basis sweep
        let ctx = ctx_b2(rat(1, 1), rat(1, 2));
        for d in 0..=5usize {
            for mono in monomials_of_degree(2, d) {
                let p = Polynomial::from_monomial(mono, Rat::one());
                assert_eq!(
                    laplacian_apply(&ctx, &p).unwrap(),
                    laplacian_apply_as_squares(&ctx, &p).unwrap()
                );
            }
        }
    }

    #[test]
    fn one_dimensional_square_identity() {
        // T(k)^2 = D^2 + 2k delta on a degree sweep
        for k in [rat(1, 2), rat(1, 1), rat(5, 2)] {
            let ctx = ctx_1d(k.clone());
            let e1 = Vector::unit(1, 0);
            for n in 0..=8u32 {
                let p = Polynomial::from_monomial(Monomial(vec![n]), Rat::one());
                let tt = dunkl_apply(&ctx, &e1, &dunkl_apply(&ctx, &e1, &p).unwrap()).unwrap();
                let rhs = classical_laplacian(&p)
                    .add(&delta_1d(&p).unwrap().scale(&rat(2, 1).mul_ref(&k)));
                assert_eq!(tt, rhs);
            }
        }
    }

    #[test]
    fn operator_matrices_and_nilpotency() {
        // d/dx on span(1, x): the only entry is d(x) = 1 into row of 1
        let ddx = PolyOperator::<Rat>::partial(1, 0);
        let m = ddx.matrix_up_to(1).unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.get(0, 1), &Rat::one());
        assert!(m.get(0, 0).is_zero() && m.get(1, 0).is_zero() && m.get(1, 1).is_zero());

        // delta on span(1, x, x^2): column of x^2 sends it to 2 * constant
        let delta = PolyOperator::<Rat>::delta_1d();
        let m = delta.matrix_up_to(2).unwrap();
        assert_eq!(m.get(0, 2), &rat(2, 1));

        // nilpotency of a degree-lowering operator matrix on degree <= n
        let ctx = ctx_b2(rat(1, 1), rat(1, 2));
        let t = PolyOperator::dunkl(&ctx, Vector::from_i64s(&[1, -2]));
        let m = t.matrix_up_to(3).unwrap();
        let mut power = (*m).clone();
        for _ in 0..3 {
            power = power.mul(&m);
        }
        assert!(power.approx_eq(&Matrix::zero(m.rows(), m.cols())));
        t.verify_degree_lowering(4).unwrap();
    }

    #[test]
    fn exponential_series_frozen_values() {
        let d2 = PolyOperator::<Rat>::d_squared_1d();
        // e^{tD^2} x^2 = x^2 + 2t at t = 5/3
        assert_eq!(
            exp_apply(&d2, &rat(5, 3), &p1("x1^2")).unwrap(),
            p1("x1^2 + 10/3")
        );
        // e^{tD^2} x^4 = x^4 + 12 t x^2 + 12 t^2 at t = 3
        assert_eq!(
            exp_apply(&d2, &rat(3, 1), &p1("x1^4")).unwrap(),
            p1("x1^4 + 36*x1^2 + 108")
        );
        // t = 0 is the identity
        assert_eq!(
            exp_apply(&d2, &rat(0, 1), &p1("x1^4 - x1")).unwrap(),
            p1("x1^4 - x1")
        );
        // semigroup law e^{sA} e^{tA} = e^{(s+t)A}
        let p = p1("x1^6 - 2*x1^3 + x1");
        let once = exp_apply(&d2, &rat(1, 2), &exp_apply(&d2, &rat(1, 3), &p).unwrap()).unwrap();
        let joint = exp_apply(&d2, &rat(5, 6), &p).unwrap();
        assert_eq!(once, joint);
    }

    #[test]
    fn exponential_rejects_degree_raising_operators() {
        // multiplication by x claims degree-lowering falsely
        let bad = PolyOperator::<Rat>::new(1, true, |p| Ok(p.mul(&Polynomial::var(1, 0))));
        assert!(matches!(
            exp_apply(&bad, &Rat::one(), &p1("x1")),
            Err(DunklError::NotDegreeLowering(_))
        ));
    }

    #[test]
    fn resolvent_frozen_values_and_inverse_property() {
        let d2 = PolyOperator::<Rat>::d_squared_1d();
        // R(lambda; D^2) x^2 = x^2/lambda + 2/lambda^2 at lambda = 2
        assert_eq!(
            resolvent_apply(&d2, &rat(2, 1), &p1("x1^2")).unwrap(),
            p1("1/2*x1^2 + 1/2")
        );
        // R(1; D^2) x^4 = x^4 + 12 x^2 + 24
        assert_eq!(
            resolvent_apply(&d2, &rat(1, 1), &p1("x1^4")).unwrap(),
            p1("x1^4 + 12*x1^2 + 24")
        );
        // constants: c / lambda
        assert_eq!(
            resolvent_apply(&d2, &rat(4, 1), &p1("6")).unwrap(),
            p1("3/2")
        );
        // zero shift is rejected
        assert!(matches!(
            resolvent_apply(&d2, &rat(0, 1), &p1("x1")),
            Err(DunklError::ZeroResolventShift)
        ));
        // (lambda I - A) R(lambda; A) = I on a sample
        let p = p1("x1^5 - 3*x1^2 + 2");
        let lam = rat(7, 3);
        let r = resolvent_apply(&d2, &lam, &p).unwrap();
        let back = r.scale(&lam).sub(&d2.apply(&r).unwrap());
        assert_eq!(back, p);
    }

    #[test]
    fn euler_approximation_frozen_values() {
        let d2 = PolyOperator::<Rat>::d_squared_1d();
        // quadratic case is exact for every n
        for n in [1u32, 2, 5] {
            assert_eq!(euler_approx(&d2, n, &p1("x1^2")).unwrap(), p1("x1^2 + 2"));
        }
        assert_eq!(
            euler_approx(&d2, 1, &p1("x1^4")).unwrap(),
            p1("x1^4 + 12*x1^2 + 24")
        );
        assert_eq!(
            euler_approx(&d2, 2, &p1("x1^4")).unwrap(),
            p1("x1^4 + 12*x1^2 + 18")
        );
    }

    #[test]
    fn trotter_approximation_cases() {
        let d2 = PolyOperator::<Rat>::d_squared_1d();
        let zero_op = PolyOperator::<Rat>::new(1, true, |p| Ok(Polynomial::zero(p.nvars())));
        // B = 0 collapses to e^A for every n
        for n in [1u32, 3] {
            assert_eq!(
                trotter_approx(&d2, &zero_op, n, &p1("x1^4")).unwrap(),
                exp_apply(&d2, &Rat::one(), &p1("x1^4")).unwrap()
            );
        }
        // commuting case: A = d^2/dx1^2, B = d^2/dx2^2 in two variables
        let a = {
            let dx = PolyOperator::<Rat>::partial(2, 0);
            PolyOperator::new(2, true, move |p| dx.apply(&dx.apply(p)?))
        };
        let b = {
            let dy = PolyOperator::<Rat>::partial(2, 1);
            PolyOperator::new(2, true, move |p| dy.apply(&dy.apply(p)?))
        };
        let p2 = parse_polynomial::<Rat>("x1^2*x2^2", 2).unwrap();
        let sum = a.add(&b);
        for n in [1u32, 2] {
            assert_eq!(
                trotter_approx(&a, &b, n, &p2).unwrap(),
                exp_apply(&sum, &Rat::one(), &p2).unwrap()
            );
        }
        // 1D target: A = D^2, B = 2 delta; e^{A+B} x^4 = x^4 + 20 x^2 + 60
        let delta2 = PolyOperator::<Rat>::delta_1d().scale(rat(2, 1));
        let target = exp_apply(&d2.add(&delta2), &Rat::one(), &p1("x1^4")).unwrap();
        assert_eq!(target, p1("x1^4 + 20*x1^2 + 60"));
    }

    #[test]
    fn conjugated_family_frozen_values() {
        // lambda_s x^2 = 2 for all s
        for s in [rat(0, 1), rat(1, 2), rat(3, 1)] {
            assert_eq!(lambda_s_apply(&s, &p1("x1^2")).unwrap(), p1("2"));
        }
        // lambda_s x^4 = 4x^2 + 16s
        assert_eq!(
            lambda_s_apply(&rat(1, 2), &p1("x1^4")).unwrap(),
            p1("4*x1^2 + 8")
        );
        // odd linear input dies
        assert_eq!(lambda_s_apply(&rat(2, 1), &p1("x1")).unwrap(), p1("0"));
        // s = 0 is delta itself
        assert_eq!(
            lambda_s_apply(&rat(0, 1), &p1("x1^4 - x1^3")).unwrap(),
            delta_1d(&p1("x1^4 - x1^3")).unwrap()
        );
    }

    #[test]
    fn conjugated_family_even_characterization() {
        let s = rat(1, 2);
        // true pairs give a zero residual
        for p in [p1("x1^2"), p1("x1^4"), p1("x1^6 + 3*x1^2")] {
            let q = lambda_s_apply(&s, &p).unwrap();
            assert!(lambda_ode_residual(&s, &p, &q).unwrap().is_zero());
        }
        // frozen values
        assert!(lambda_ode_residual(&rat(7, 1), &p1("x1^2"), &p1("2"))
            .unwrap()
            .is_zero());
        assert!(
            lambda_ode_residual(&rat(1, 2), &p1("x1^4"), &p1("4*x1^2 + 8"))
                .unwrap()
                .is_zero()
        );
        // wrong candidate rejected: p = x^2, q = 3 gives residual -x
        let r = lambda_ode_residual(&rat(1, 1), &p1("x1^2"), &p1("3")).unwrap();
        assert_eq!(r, p1("-x1"));
        // odd p is refused
        assert!(lambda_ode_residual(&rat(1, 1), &p1("x1^3"), &p1("0")).is_err());
    }

    #[test]
    fn odd_case_characterization_of_the_conjugated_family() {
        // d/dx (e^{sD^2} p / x) = e^{sD^2} lambda_s p for odd p
        let d2 = PolyOperator::<Rat>::d_squared_1d();
        let s = rat(2, 3);
        for p in [p1("x1^3"), p1("x1^5 - 4*x1^3"), p1("x1")] {
            let fwd = exp_apply(&d2, &s, &p).unwrap();
            let lhs = fwd.divide_exact(&p1("x1")).unwrap().derivative(0);
            let rhs = exp_apply(&d2, &s, &lambda_s_apply(&s, &p).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn ode_solver_frozen_values_and_residuals() {
        // c = 1, p = x  =>  y = -1
        assert_eq!(ode_poly_solve(&rat(1, 1), &p1("x1")).unwrap(), p1("-1"));
        // c = 1, p = x^3  =>  y = -x^2 - 2
        assert_eq!(
            ode_poly_solve(&rat(1, 1), &p1("x1^3")).unwrap(),
            p1("-x1^2 - 2")
        );
        // p = 0 => y = 0
        assert!(ode_poly_solve(&rat(1, 1), &p1("0")).unwrap().is_zero());
        // non-odd inputs are rejected
        assert!(ode_poly_solve(&rat(1, 1), &p1("x1^2")).is_err());
        // residual check c y' - x y - p = 0 on a harder case
        let c = rat(3, 7);
        let p = p1("5*x1^5 - x1^3 + 2*x1");
        let y = ode_poly_solve(&c, &p).unwrap();
        let residual = y
            .derivative(0)
            .scale(&c)
            .sub(&Polynomial::var(1, 0).mul(&y))
            .sub(&p);
        assert!(residual.is_zero());
    }

    #[test]
    fn exponential_commutation_identity() {
        for (c, p) in [
            (rat(1, 1), p1("1")),
            (rat(2, 1), p1("x1")),
            (rat(1, 1), p1("x1^3")),
            (rat(5, 3), p1("x1^4 - 2*x1^2 + 7")),
        ] {
            assert!(exp_conjugate_identity_check(&c, &p).unwrap().is_zero());
        }
    }

    #[test]
    fn minimum_principle_checks() {
        let delta = PolyOperator::<Rat>::delta_1d();
        // delta x^2 at 0 is 2 >= 0
        let v = minimum_principle_check(&delta, &p1("x1^2"), &[rat(0, 1)], 0.0).unwrap();
        assert!(v.pass);
        assert_eq!(v.value, rat(2, 1));
        // negative control: -delta fails at the same zero
        let neg = delta.scale(rat(-1, 1));
        let v = minimum_principle_check(&neg, &p1("x1^2"), &[rat(0, 1)], 0.0).unwrap();
        assert!(!v.pass);
        // conjugated family at a boundary zero of (x-1)^2 (x+1)^2
        let s = rat(1, 2);
        let lam = PolyOperator::new(1, true, move |p| lambda_s_apply(&s, p));
        let p = p1("x1^4 - 2*x1^2 + 1");
        let v = minimum_principle_check(&lam, &p, &[rat(1, 1)], 0.0).unwrap();
        assert!(v.pass, "value was {}", v.value);
        // a point that is not a zero is refused
        assert!(matches!(
            minimum_principle_check(&delta, &p1("x1^2"), &[rat(1, 1)], 0.0),
            Err(DunklError::NotZeroAtPoint(_))
        ));
    }

    #[test]
    fn homogeneous_matrix_blocks() {
        let ctx = ctx_b2(rat(1, 1), rat(1, 2));
        let xi = Vector::unit(2, 0);
        // block from degree 2 to degree 1 has shape 2 x 3 and matches apply
        let m = dunkl_matrix_homogeneous(&ctx, &xi, 2).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 3));
        let source = monomials_of_degree(2, 2);
        let target = monomials_of_degree(2, 1);
        for (j, mono) in source.iter().enumerate() {
            let image = dunkl_apply(
                &ctx,
                &xi,
                &Polynomial::from_monomial(mono.clone(), Rat::one()),
            )
            .unwrap();
            let col = image.coeff_vector(&target).unwrap();
            for (i, c) in col.iter().enumerate() {
                assert_eq!(m.get(i, j), c);
            }
        }
    }

    #[test]
    fn cached_apply_agrees_with_direct_closure() {
        let ctx = ctx_b2(rat(1, 1), rat(1, 2));
        let t = PolyOperator::dunkl(&ctx, Vector::from_i64s(&[3, 1]));
        let p = parse_polynomial::<Rat>("x1^4 - x1^2*x2 + 5*x2^3 - 1", 2).unwrap();
        let via_cache = t.apply(&p).unwrap();
        let direct = dunkl_apply(&ctx, &Vector::from_i64s(&[3, 1]), &p).unwrap();
        assert_eq!(via_cache, direct);
    }
}
