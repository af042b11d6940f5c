//! The multiplicity-deformed bilinear pairing on polynomials,
//! `[p, q] = (p(T) q)(0)`: substituting the coordinate difference-
//! differential operators into `p` and evaluating at the origin. Includes
//! the classical `k = 0` specialization, the intertwining identity
//! residual, nonnegativity of the quadratic form, and an independent
//! Gaussian-integral evaluation by quadrature.

use crate::dunkl::{exp_apply, DunklContext, PolyOperator};
use crate::error::{DunklError, Result};
use crate::intertwine::z2n_axis_multiplicities;
use crate::poly::{Polynomial, Vector};
use crate::quad::{gauss_legendre_on, gaussian_axis_moment, tensor_product};
use crate::scalar::{factorial, Scalar};

/// Coordinate operators with shared per-degree matrix caches, for repeated
/// pairing evaluations against one context.
pub struct PairingContext<S> {
    nvars: usize,
    ops: Vec<PolyOperator<S>>,
}

impl<S: Scalar> PairingContext<S> {
    pub fn new(ctx: &DunklContext<S>) -> Self {
        let nvars = ctx.nvars();
        let ops = (0..nvars)
            .map(|i| PolyOperator::dunkl(ctx, Vector::unit(nvars, i)))
            .collect();
        PairingContext { nvars, ops }
    }

    /// `p(T) q`: for each term of `p`, apply the coordinate operators with
    /// the term's exponents (well-defined because they commute) and weight
    /// by the coefficient.
    pub fn substitute(&self, p: &Polynomial<S>, q: &Polynomial<S>) -> Result<Polynomial<S>> {
        if p.nvars() != self.nvars || q.nvars() != self.nvars {
            return Err(DunklError::DimensionMismatch(
                "pairing arguments must live in the operator's dimension".into(),
            ));
        }
        let mut out = Polynomial::zero(self.nvars);
        for (mono, c) in p.terms() {
            let mut image = q.clone();
            'mono: for (i, &e) in mono.0.iter().enumerate() {
                for _ in 0..e {
                    if image.is_zero() {
                        break 'mono;
                    }
                    image = self.ops[i].apply(&image)?;
                }
            }
            out = out.add(&image.scale(c));
        }
        Ok(out)
    }

    /// `[p, q] = (p(T) q)(0)`.
    pub fn pairing(&self, p: &Polynomial<S>, q: &Polynomial<S>) -> Result<S> {
        Ok(self.substitute(p, q)?.constant_term())
    }
}

/// One-shot pairing (builds the operator cache afresh; prefer
/// [`PairingContext`] in loops).
pub fn pairing<S: Scalar>(
    ctx: &DunklContext<S>,
    p: &Polynomial<S>,
    q: &Polynomial<S>,
) -> Result<S> {
    PairingContext::new(ctx).pairing(p, q)
}

/// The zero-multiplicity pairing `(p(d/dx) q)(0)` in closed form:
/// matching monomials weighted by the factorial of the exponent vector.
pub fn pairing_zero<S: Scalar>(p: &Polynomial<S>, q: &Polynomial<S>) -> S {
    let mut acc = S::zero();
    for (m, a) in p.terms() {
        let b = q.coeff(m);
        if b.is_zero() {
            continue;
        }
        let mut weight = S::one();
        for &e in &m.0 {
            weight = weight.mul_ref(&factorial::<S>(e as usize));
        }
        acc.add_assign_ref(&a.mul_ref(&b).mul_ref(&weight));
    }
    acc
}

/// Residual of the adjoint identity linking the intertwiner to the
/// deformed and classical pairings: `[V p, q] - [p, q]_0`. Identically
/// zero for every p, q within the table order.
pub fn pairing_identity_residual<S: Scalar>(
    ctx: &DunklContext<S>,
    table: &crate::intertwine::IntertwinerTable<S>,
    p: &Polynomial<S>,
    q: &Polynomial<S>,
) -> Result<S> {
    let vp = table.apply(p)?;
    let deformed = pairing(ctx, &vp, q)?;
    Ok(deformed.sub_ref(&pairing_zero(p, q)))
}

/// Nonnegativity of the quadratic form: value of `[p, p]` and whether it
/// clears zero (exact in exact mode, tolerance `-1e-9` in float mode).
#[derive(Clone, Debug)]
pub struct PairingPositivity<S> {
    pub value: S,
    pub pass: bool,
}

pub fn pairing_positivity_check<S: Scalar>(
    ctx: &DunklContext<S>,
    p: &Polynomial<S>,
) -> Result<PairingPositivity<S>> {
    let value = pairing(ctx, p, p)?;
    let pass = if S::IS_EXACT {
        !value.is_negative_val()
    } else {
        value.to_f64() >= -crate::scalar::FLOAT_NEGLIGIBLE
    };
    Ok(PairingPositivity { value, pass })
}

// ---------------------------------------------------------------------------
// Gaussian-integral representation, evaluated by quadrature
// ---------------------------------------------------------------------------

/// Float evaluator for the group-invariant weight
/// `prod over positive roots of |<alpha, x>|^(2 k(alpha))`.
pub struct WeightData {
    roots: Vec<Vec<f64>>,
    exponents: Vec<f64>,
}

impl WeightData {
    pub fn new<S: Scalar>(ctx: &DunklContext<S>) -> Self {
        let roots: Vec<Vec<f64>> = ctx
            .root_system()
            .positive_roots()
            .iter()
            .map(|r| r.to_f64())
            .collect();
        let exponents = (0..roots.len())
            .map(|i| 2.0 * ctx.k_root(i).to_f64())
            .collect();
        WeightData { roots, exponents }
    }

    pub fn weight(&self, x: &[f64]) -> f64 {
        let mut w = 1.0;
        for (root, &e) in self.roots.iter().zip(&self.exponents) {
            if e == 0.0 {
                continue;
            }
            let dot: f64 = root.iter().zip(x).map(|(a, b)| a * b).sum();
            w *= dot.abs().powf(e);
        }
        w
    }
}

/// Parameters for the quadrature evaluation of the Gaussian pairing form.
#[derive(Clone, Debug)]
pub struct QuadSpec {
    /// Base Gauss-Legendre order per axis in the general-group path
    /// (distinct even orders derived from it keep nodes off the
    /// reflection hyperplanes).
    pub nodes_per_axis: usize,
    /// Half-width of the integration box / axis cutoff.
    pub radius_cutoff: f64,
    /// Absolute tolerance passed to the adaptive axis integrals.
    pub tolerance: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            nodes_per_axis: 64,
            radius_cutoff: 10.0,
            tolerance: 1e-12,
        }
    }
}

/// Independent numerical evaluation of the pairing through its Gaussian
/// integral form: the normalized integral of
/// `(e^(-L/2) p)(x) (e^(-L/2) q)(x) e^(-|x|^2/2) w(x)`,
/// with `L` the generalized Laplacian and normalization chosen so the
/// pairing of constants is 1 (the same quadrature computes it, so its
/// error largely cancels).
///
/// Direct-product groups factorize monomial-by-monomial into single-axis
/// integrals; any other group goes through a tensor Gauss-Legendre grid,
/// feasible for dimension <= 3.
pub fn gaussian_pairing_quadrature<S: Scalar>(
    ctx: &DunklContext<S>,
    p: &Polynomial<S>,
    q: &Polynomial<S>,
    spec: &QuadSpec,
) -> Result<f64> {
    let lap = PolyOperator::laplacian(ctx);
    let minus_half = S::from_ratio(-1, 2);
    let ep = exp_apply(&lap, &minus_half, p)?;
    let eq = exp_apply(&lap, &minus_half, q)?;
    let product = ep.mul(&eq).to_f64_poly();

    if let Ok(ks) = z2n_axis_multiplicities(ctx) {
        let ks: Vec<f64> = ks.iter().map(|k| k.to_f64()).collect();
        return factorized_gaussian_integral(&product, &ks, spec);
    }

    let nv = ctx.nvars();
    if nv > 3 {
        return Err(DunklError::QuadratureNonConvergence(
            "tensor quadrature is limited to dimension <= 3".into(),
        ));
    }
    // distinct even orders per axis keep node hyperplanes from aligning
    // with the reflection hyperplanes' coordinate coincidences
    let axes: Vec<Vec<(f64, f64)>> = (0..nv)
        .map(|i| {
            let order = (spec.nodes_per_axis + 2 * i + 1) & !1; // even, distinct
            gauss_legendre_on(order.max(2), -spec.radius_cutoff, spec.radius_cutoff)
        })
        .collect();
    let grid = tensor_product(&axes);
    let weight = WeightData::new(ctx);
    let mut numerator = 0.0f64;
    let mut denominator = 0.0f64;
    for (x, w_node) in &grid {
        let norm_sq: f64 = x.iter().map(|v| v * v).sum();
        let base = w_node * weight.weight(x) * (-0.5 * norm_sq).exp();
        if base == 0.0 {
            continue;
        }
        numerator += base * product.evaluate(x);
        denominator += base;
    }
    if denominator <= 0.0 || !denominator.is_finite() {
        return Err(DunklError::QuadratureNonConvergence(
            "weight normalization did not converge".into(),
        ));
    }
    Ok(numerator / denominator)
}

/// Direct-product path: each monomial's integral splits into per-axis
/// weighted moments, normalized by the zero-exponent moments.
fn factorized_gaussian_integral(
    product: &Polynomial<f64>,
    ks: &[f64],
    spec: &QuadSpec,
) -> Result<f64> {
    let nv = ks.len();
    // cache moments per (axis, exponent)
    let max_exp = product
        .terms()
        .flat_map(|(m, _)| m.0.iter().copied())
        .max()
        .unwrap_or(0);
    let mut moments = vec![vec![None::<f64>; (max_exp + 1) as usize]; nv];
    let moment = |axis: usize, e: u32, moments: &mut Vec<Vec<Option<f64>>>| -> Result<f64> {
        if let Some(v) = moments[axis][e as usize] {
            return Ok(v);
        }
        let v = gaussian_axis_moment(e, ks[axis], spec.radius_cutoff, spec.tolerance)?;
        moments[axis][e as usize] = Some(v);
        Ok(v)
    };
    let mut mass = 1.0;
    for &k in ks.iter().take(nv) {
        mass *= gaussian_axis_moment(0, k, spec.radius_cutoff, spec.tolerance)?;
    }
    let mut total = 0.0;
    for (mono, c) in product.terms() {
        let mut term = *c;
        for (axis, &e) in mono.0.iter().enumerate() {
            term *= moment(axis, e, &mut moments)?;
        }
        total += term;
    }
    Ok(total / mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{monomials_of_degree, parse_polynomial};
    use crate::reflection::{GroupPreset, MultiplicityFunction, ReflectionGroup, RootSystem};
    use crate::scalar::Rat;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    fn ctx(preset: GroupPreset, ks: Vec<Rat>, n_max: usize) -> DunklContext<Rat> {
        let rs = preset.root_system::<Rat>().unwrap();
        let mult = MultiplicityFunction::new(&rs, ks).unwrap();
        let g = ReflectionGroup::build(rs).unwrap();
        DunklContext::new(g, mult, n_max).unwrap()
    }

    #[test]
    fn rank_one_frozen_pairings() {
        let k = rat(1, 1);
        let c = ctx(GroupPreset::Z2 { n: 1 }, vec![k], 6);
        let x = parse_polynomial::<Rat>("x1", 1).unwrap();
        let x2 = parse_polynomial::<Rat>("x1^2", 1).unwrap();
        let one = parse_polynomial::<Rat>("1", 1).unwrap();
        assert_eq!(pairing(&c, &x, &x).unwrap(), rat(3, 1)); // 1 + 2k
        assert_eq!(pairing(&c, &x2, &x2).unwrap(), rat(6, 1)); // 2(1 + 2k)
        assert_eq!(pairing(&c, &one, &one).unwrap(), rat(1, 1));
        // distinct homogeneous degrees pair to zero
        assert_eq!(pairing(&c, &x, &x2).unwrap(), rat(0, 1));
        assert_eq!(pairing(&c, &x2, &x).unwrap(), rat(0, 1));
    }

    #[test]
    fn classical_pairing_closed_form() {
        let p = parse_polynomial::<Rat>("x1^2 + 2*x1*x2", 2).unwrap();
        let q = parse_polynomial::<Rat>("3*x1^2 - x1*x2 + x2^2", 2).unwrap();
        // matching monomials: x1^2 (1*3*2!) + x1 x2 (2*(-1)*1!*1!) = 6 - 2
        assert_eq!(pairing_zero(&p, &q), rat(4, 1));
        // classical Hermite-type value
        let x2 = parse_polynomial::<Rat>("x1^2", 1).unwrap();
        assert_eq!(pairing_zero(&x2, &x2), rat(2, 1));
        // agrees with the operator route at k = 0
        let c0 = ctx(GroupPreset::B { n: 2 }, vec![rat(0, 1), rat(0, 1)], 5);
        assert_eq!(pairing(&c0, &p, &q).unwrap(), pairing_zero(&p, &q));
    }

    #[test]
    fn symmetry_on_a_basis_sweep() {
        let c = ctx(GroupPreset::B { n: 2 }, vec![rat(1, 1), rat(1, 2)], 4);
        let engine = PairingContext::new(&c);
        let basis: Vec<Polynomial<Rat>> = (0..=3usize)
            .flat_map(|d| monomials_of_degree(2, d))
            .map(|m| Polynomial::from_monomial(m, Rat::one()))
            .collect();
        for a in &basis {
            for b in &basis {
                assert_eq!(engine.pairing(a, b).unwrap(), engine.pairing(b, a).unwrap());
            }
        }
    }

    #[test]
    fn intertwiner_adjoint_identity() {
        // [V p, q] - [p, q]_0 vanishes on basis sweeps
        let c = ctx(GroupPreset::Z2 { n: 1 }, vec![rat(1, 1)], 4);
        let table = crate::intertwine::build_vk(&c, 4).unwrap();
        let x = parse_polynomial::<Rat>("x1", 1).unwrap();
        let x2 = parse_polynomial::<Rat>("x1^2", 1).unwrap();
        assert!(pairing_identity_residual(&c, &table, &x, &x)
            .unwrap()
            .is_zero());
        assert!(pairing_identity_residual(&c, &table, &x2, &x2)
            .unwrap()
            .is_zero());

        let c = ctx(GroupPreset::B { n: 2 }, vec![rat(1, 1), rat(1, 2)], 3);
        let table = crate::intertwine::build_vk(&c, 3).unwrap();
        for d in 0..=3usize {
            for nu in monomials_of_degree(2, d) {
                for mu in monomials_of_degree(2, d) {
                    let p = Polynomial::from_monomial(nu.clone(), Rat::one());
                    let q = Polynomial::from_monomial(mu.clone(), Rat::one());
                    let r = pairing_identity_residual(&c, &table, &p, &q).unwrap();
                    assert!(r.is_zero(), "nu = {nu:?}, mu = {mu:?}: {r}");
                }
            }
        }
    }

    #[test]
    fn quadratic_form_is_nonnegative() {
        let c = ctx(GroupPreset::B { n: 2 }, vec![rat(1, 1), rat(1, 2)], 4);
        for d in 0..=4usize {
            for m in monomials_of_degree(2, d) {
                let p = Polynomial::from_monomial(m, Rat::one());
                assert!(pairing_positivity_check(&c, &p).unwrap().pass);
            }
        }
        let mixed = parse_polynomial::<Rat>("x1^2 - 3*x1*x2 + 1/2*x2^2 - x1 + 2", 2).unwrap();
        let v = pairing_positivity_check(&c, &mixed).unwrap();
        assert!(v.pass && !v.value.is_negative_val());
    }

    #[test]
    fn gaussian_quadrature_matches_exact_rank_one() {
        let c = ctx(GroupPreset::Z2 { n: 1 }, vec![rat(1, 1)], 4);
        let x = parse_polynomial::<Rat>("x1", 1).unwrap();
        let spec = QuadSpec::default();
        let numeric = gaussian_pairing_quadrature(&c, &x, &x, &spec).unwrap();
        assert!((numeric - 3.0).abs() < 1e-8, "got {numeric}");
        // normalization: constants pair to 1
        let one = parse_polynomial::<Rat>("1", 1).unwrap();
        let numeric = gaussian_pairing_quadrature(&c, &one, &one, &spec).unwrap();
        assert!((numeric - 1.0).abs() < 1e-10);
        // k = 0 classical value 2 for x^2
        let c0 = ctx(GroupPreset::Z2 { n: 1 }, vec![rat(0, 1)], 4);
        let x2 = parse_polynomial::<Rat>("x1^2", 1).unwrap();
        let numeric = gaussian_pairing_quadrature(&c0, &x2, &x2, &spec).unwrap();
        assert!((numeric - 2.0).abs() < 1e-8, "got {numeric}");
    }

    #[test]
    fn gaussian_quadrature_matches_exact_direct_product() {
        let c = ctx(GroupPreset::Z2 { n: 2 }, vec![rat(1, 2), rat(5, 2)], 4);
        let spec = QuadSpec::default();
        for src in ["x1*x2", "x1^2 + x2^2", "x1^2*x2^2"] {
            let p = parse_polynomial::<Rat>(src, 2).unwrap();
            let exact = pairing(&c, &p, &p).unwrap().to_f64();
            let numeric = gaussian_pairing_quadrature(&c, &p, &p, &spec).unwrap();
            assert!(
                (numeric - exact).abs() <= 1e-8 * exact.abs().max(1.0),
                "{src}: {numeric} vs {exact}"
            );
        }
    }

    #[test]
    fn gaussian_quadrature_general_group_and_representative_independence() {
        // 2k even makes the weight a polynomial, so the tensor rule is
        // sharp; [x1, x1] for this group and k = (1,1) is 5
        let c = ctx(GroupPreset::B { n: 2 }, vec![rat(1, 1), rat(1, 1)], 4);
        let x1 = parse_polynomial::<Rat>("x1", 2).unwrap();
        assert_eq!(pairing(&c, &x1, &x1).unwrap(), rat(5, 1));
        let spec = QuadSpec::default();
        let numeric = gaussian_pairing_quadrature(&c, &x1, &x1, &spec).unwrap();
        assert!((numeric - 5.0).abs() < 1e-8, "got {numeric}");

        // rescaling a stored root representative must not change the
        // normalized integral
        let scaled_roots = vec![
            Vector::from_i64s(&[1, 0]),
            Vector::from_i64s(&[0, 1]),
            Vector::from_i64s(&[3, -3]),
            Vector::from_i64s(&[1, 1]),
        ];
        let rs = RootSystem::new(2, scaled_roots).unwrap();
        let mult = MultiplicityFunction::new(&rs, vec![rat(1, 1), rat(1, 1)]).unwrap();
        let g = ReflectionGroup::build(rs).unwrap();
        let c_scaled = DunklContext::new(g, mult, 4).unwrap();
        let rescaled = gaussian_pairing_quadrature(&c_scaled, &x1, &x1, &spec).unwrap();
        assert!((rescaled - numeric).abs() < 1e-9, "{rescaled} vs {numeric}");
    }

    #[test]
    fn weight_is_group_invariant() {
        let c = ctx(GroupPreset::B { n: 2 }, vec![rat(1, 1), rat(1, 2)], 2);
        let w = WeightData::new(&c);
        let x = [0.7, -1.3];
        let base = w.weight(&x);
        assert!(base >= 0.0);
        for g in c.group().elements() {
            let gf = g.map_scalars(|v| v.to_f64());
            let gx = gf.matvec(&x);
            assert!((w.weight(&gx) - base).abs() < 1e-12 * base.max(1.0));
        }
    }
}
