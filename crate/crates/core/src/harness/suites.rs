//! The verification suites behind `verify`: exact operator identities,
//! exact nonnegativity scans of the intertwiner and of the smoothing
//! semigroups, and numeric oracle/bound/measure comparisons. Every suite
//! carries a deliberately injected fault (negative control) proving the
//! checks can detect violations, not merely confirm truths.

use crate::dunkl::{
    exp_apply, exp_conjugate_identity_check, lambda_ode_residual, lambda_s_apply,
    laplacian_apply_as_squares, minimum_principle_check, ode_poly_solve, DunklContext,
    PolyOperator,
};
use crate::error::{DunklError, Result};
use crate::harness::config::{Config, Mode};
use crate::harness::family::{nonnegative_family, zero_touching_family_1d, FamilySpec};
use crate::harness::report::{
    CheckRecord, Report, PROVENANCE_BOUND, PROVENANCE_CONTROL, PROVENANCE_IDENTITY,
    PROVENANCE_ORACLE, PROVENANCE_POSITIVITY,
};
use crate::intertwine::{build_vk, vk_1d_coeff, vk_z2n_coeff, IntertwinerTable};
use crate::kernel::{
    gram_psd_check, kernel_bound_check, kernel_recursion_residual, lambda_s_closed_form,
    measure_moments, measure_product_moment, measure_transform_check, support_hull_check,
    KernelTruncation, Measure1D,
};
use crate::linalg::Matrix;
use crate::pairing::{gaussian_pairing_quadrature, pairing, PairingContext};
use crate::poly::{
    dim_up_to, monomials_of_degree, monomials_up_to, parse_polynomial, Monomial, Polynomial, Vector,
};
use crate::quad::beta_density_moment;
use crate::reflection::{GroupPreset, MultiplicityFunction, ReflectionGroup};
use crate::scalar::{factorial, Cplx, Rat, Scalar};
use crate::special::hyp1f1;

// ---------------------------------------------------------------------------
// shared helpers
// ---------------------------------------------------------------------------

fn require_exact(config: &Config, suite: &str) -> Result<()> {
    if config.mode != Mode::Exact {
        return Err(DunklError::ModeUnsupported(format!(
            "suite {suite:?} runs in exact mode only"
        )));
    }
    Ok(())
}

fn rat(n: i64, d: i64) -> Rat {
    Rat::from_ratio(n, d)
}

fn fmt_point<S: Scalar>(pt: &[S]) -> String {
    let coords: Vec<String> = pt.iter().map(|c| c.render()).collect();
    format!("({})", coords.join(", "))
}

/// Rational grid filling the closed ball of radius 2, with at least one
/// thousand points for every supported dimension.
pub fn rational_ball_grid<S: Scalar>(nvars: usize) -> Result<Vec<Vec<S>>> {
    // (half-steps per unit, index range) chosen per dimension
    let (den, range): (i64, i64) = match nvars {
        1 => (250, 500),
        2 => (10, 20),
        3 => (7, 7), // coordinates 2j/7, |j| <= 7
        _ => {
            return Err(DunklError::InvalidArgument(
                "positivity grids are defined for dimensions 1 to 3".into(),
            ))
        }
    };
    let coords: Vec<S> = (-range..=range)
        .map(|j| {
            if nvars == 3 {
                S::from_ratio(2 * j, den)
            } else {
                S::from_ratio(j, den)
            }
        })
        .collect();
    let radius_sq = S::from_i64(4);
    let mut grid = Vec::new();
    let mut idx = vec![0usize; nvars];
    loop {
        let pt: Vec<S> = idx.iter().map(|&i| coords[i].clone()).collect();
        let norm_sq = pt
            .iter()
            .fold(S::zero(), |acc, c| acc.add_ref(&c.mul_ref(c)));
        if !radius_sq.sub_ref(&norm_sq).is_negative_val() {
            grid.push(pt);
        }
        // odometer
        let mut axis = 0;
        loop {
            if axis == nvars {
                return Ok(grid);
            }
            idx[axis] += 1;
            if idx[axis] < coords.len() {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

/// First grid point where `p` is negative, if any.
fn scan_nonnegative<S: Scalar>(p: &Polynomial<S>, grid: &[Vec<S>]) -> Option<(Vec<S>, S)> {
    let nv = p.nvars();
    let mut max_e = vec![0u32; nv];
    for (m, _) in p.terms() {
        for (i, &e) in m.0.iter().enumerate() {
            max_e[i] = max_e[i].max(e);
        }
    }
    for pt in grid {
        let pows = crate::poly::power_table(pt, &max_e);
        let v = p.evaluate_with_powers(&pows);
        if v.is_negative_val() {
            return Some((pt.clone(), v));
        }
    }
    None
}

/// First nonzero entry of an operator-identity residual matrix, described
/// through the monomial basis it acts on.
fn matrix_zero_witness(m: &Matrix<Rat>, basis: &[Monomial]) -> Option<String> {
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            if !m.get(i, j).is_zero() {
                return Some(format!(
                    "image of {} picks up {} * {}",
                    basis[j],
                    m.get(i, j).render(),
                    basis[i]
                ));
            }
        }
    }
    None
}

/// Embed the per-degree table blocks into one matrix on the degree-graded
/// monomial basis of all polynomials of degree <= order.
fn table_block_matrix(table: &IntertwinerTable<Rat>, order: usize) -> Result<Matrix<Rat>> {
    let nv = table.nvars();
    let dim = dim_up_to(nv, order);
    let mut full = Matrix::zero(dim, dim);
    let mut offset = 0usize;
    for d in 0..=order {
        let block = table.matrix(d)?;
        for i in 0..block.rows() {
            for j in 0..block.cols() {
                if !block.get(i, j).is_zero() {
                    full.set(offset + i, offset + j, block.get(i, j).clone());
                }
            }
        }
        offset += block.rows();
    }
    debug_assert_eq!(offset, dim);
    Ok(full)
}

fn mixed_direction(nv: usize) -> Vector<Rat> {
    let mut coords = vec![Rat::zero(); nv];
    for (i, c) in coords.iter_mut().enumerate() {
        *c = Rat::from_i64(match i % 3 {
            0 => 1,
            1 => -2,
            _ => 1,
        });
    }
    Vector(coords)
}

fn canonical_y(nv: usize) -> Vec<Rat> {
    let pool = [(2i64, 3i64), (-1, 2), (1, 5), (3, 7)];
    (0..nv).map(|i| rat(pool[i % 4].0, pool[i % 4].1)).collect()
}

fn z2_context(k: Rat, order: usize) -> Result<DunklContext<Rat>> {
    let rs = GroupPreset::Z2 { n: 1 }.root_system::<Rat>()?;
    let mult = MultiplicityFunction::new(&rs, vec![k])?;
    let group = ReflectionGroup::build(rs)?;
    DunklContext::new(group, mult, order)
}

fn monomial_poly(m: &Monomial) -> Polynomial<Rat> {
    Polynomial::from_monomial(m.clone(), Rat::one())
}

// ---------------------------------------------------------------------------
// suite: exact operator identities
// ---------------------------------------------------------------------------

/// Exact identity suite: commuting operators, the two routes to the
/// generalized Laplacian, the one-dimensional square decomposition, the
/// exponential conjugation identity, the ODE solve-and-substitute checks,
/// the defining property of the built intertwiner, the adjoint pairing
/// identity, and the degree-wise kernel recursion. All residuals must be
/// exactly zero.
pub fn suite_identities(config: &Config, order: usize) -> Result<Report> {
    require_exact(config, "identities")?;
    if order < 2 {
        return Err(DunklError::InvalidArgument(
            "identity suite needs order >= 2".into(),
        ));
    }
    let ctx = config.build_context::<Rat>(order)?;
    let nv = ctx.nvars();
    let basis = monomials_up_to(nv, order);
    let mut report = Report::new("identities");

    // commuting family: all coordinate pairs plus one mixed direction
    let mut dirs: Vec<Vector<Rat>> = (0..nv).map(|i| Vector::unit(nv, i)).collect();
    if nv >= 2 {
        dirs.push(mixed_direction(nv));
    }
    let ops: Vec<PolyOperator<Rat>> = dirs
        .iter()
        .map(|d| PolyOperator::dunkl(&ctx, d.clone()))
        .collect();
    for a in 0..ops.len() {
        for b in (a + 1)..ops.len() {
            let ma = ops[a].matrix_up_to(order)?;
            let mb = ops[b].matrix_up_to(order)?;
            let comm = ma.mul(&mb).sub(&mb.mul(&ma));
            report.push(CheckRecord::exact(
                format!("commutator/dir{a}_dir{b}"),
                format!(
                    "directions {} and {}, all monomials of degree <= {order}",
                    fmt_point(&dirs[a].0),
                    fmt_point(&dirs[b].0)
                ),
                PROVENANCE_IDENTITY,
                matrix_zero_witness(&comm, &basis),
            ));
        }
    }

    // the two formulas for the generalized Laplacian agree
    {
        let lap = PolyOperator::laplacian(&ctx);
        let ctx_sq = ctx.clone();
        let lap_sq = PolyOperator::new(nv, true, move |p| laplacian_apply_as_squares(&ctx_sq, p));
        let ma = lap.matrix_up_to(order)?;
        let mb = lap_sq.matrix_up_to(order)?;
        let diff = ma.sub(&mb);
        report.push(CheckRecord::exact(
            "laplacian_difference_form_equals_sum_of_squares",
            format!("all monomials of degree <= {order}"),
            PROVENANCE_IDENTITY,
            matrix_zero_witness(&diff, &basis),
        ));
    }

    // per orbit value: the one-dimensional square decomposition
    // T^2 = D^2 + 2k delta
    let basis_1d = monomials_up_to(1, order);
    for (oi, k) in ctx.multiplicity().orbit_values().iter().enumerate() {
        let c1 = z2_context(k.clone(), order)?;
        let t = PolyOperator::dunkl(&c1, Vector::unit(1, 0));
        let mt = t.matrix_up_to(order)?;
        let sq = mt.mul(&mt);
        let two_k = Rat::from_i64(2).mul_ref(k);
        let rhs = PolyOperator::d_squared_1d().add(&PolyOperator::delta_1d().scale(two_k));
        let m_rhs = rhs.matrix_up_to(order)?;
        let diff = sq.sub(&m_rhs);
        report.push(CheckRecord::exact(
            format!("square_decomposition_1d/orbit{oi}"),
            format!("k = {}, monomials of degree <= {order}", k.render()),
            PROVENANCE_IDENTITY,
            matrix_zero_witness(&diff, &basis_1d),
        ));
    }

    // exponential conjugation identity in one variable
    for c in [rat(1, 2), rat(1, 1), rat(2, 1)] {
        let mut witness = None;
        'outer: for m in &basis_1d {
            let r = exp_conjugate_identity_check(&c, &monomial_poly(m))?;
            if !r.is_zero() {
                witness = Some(format!("monomial {m}: residual {r}"));
                break 'outer;
            }
        }
        report.push(CheckRecord::exact(
            format!("exp_conjugation_identity/c={}", c.render()),
            format!("monomials of degree <= {order}"),
            PROVENANCE_IDENTITY,
            witness,
        ));
    }

    // ODE route: solve then substitute back (odd case), and the even-case
    // characterization of the conjugated difference operator
    for c in [rat(1, 2), rat(1, 1), rat(2, 1)] {
        let mut witness = None;
        let mut odd_inputs: Vec<Polynomial<Rat>> = basis_1d
            .iter()
            .filter(|m| m.0[0] % 2 == 1)
            .map(monomial_poly)
            .collect();
        if order >= 5 {
            let combo = odd_inputs[0]
                .add(&odd_inputs[1])
                .sub(&odd_inputs[2].scale(&rat(2, 1)));
            odd_inputs.push(combo);
        }
        for p in &odd_inputs {
            let y = ode_poly_solve(&c, p)?;
            let residual = y
                .derivative(0)
                .scale(&c)
                .sub(&Polynomial::var(1, 0).mul(&y))
                .sub(p);
            if !residual.is_zero() {
                witness = Some(format!("input {p}: residual {residual}"));
                break;
            }
        }
        report.push(CheckRecord::exact(
            format!("ode_solve_substitute/c={}", c.render()),
            "odd polynomials within the working degree",
            PROVENANCE_IDENTITY,
            witness,
        ));
    }
    for s in [rat(1, 2), rat(1, 1)] {
        let mut witness = None;
        for m in basis_1d.iter().filter(|m| m.0[0] % 2 == 0) {
            let p = monomial_poly(m);
            let q = lambda_s_apply(&s, &p)?;
            let r = lambda_ode_residual(&s, &p, &q)?;
            if !r.is_zero() {
                witness = Some(format!("monomial {m}: residual {r}"));
                break;
            }
        }
        report.push(CheckRecord::exact(
            format!("conjugated_operator_characterization/s={}", s.render()),
            "even monomials within the working degree",
            PROVENANCE_IDENTITY,
            witness,
        ));
    }

    // the built intertwiner satisfies its defining exchange relation
    let table = build_vk(&ctx, order)?;
    let v_full = table_block_matrix(&table, order)?;
    for i in 0..nv {
        let t_i = PolyOperator::dunkl(&ctx, Vector::unit(nv, i)).matrix_up_to(order)?;
        let d_i = PolyOperator::partial(nv, i).matrix_up_to(order)?;
        let residual = t_i.mul(&v_full).sub(&v_full.mul(&d_i));
        report.push(CheckRecord::exact(
            format!("intertwining_relation/coordinate{i}"),
            format!("all monomials of degree <= {order}"),
            PROVENANCE_IDENTITY,
            matrix_zero_witness(&residual, &basis),
        ));
    }

    // adjoint pairing identity: the deformed pairing of a table image
    // against a monomial equals the classical pairing of the preimages
    {
        let engine = PairingContext::new(&ctx);
        let mut witness = None;
        'pairing: for d in 0..=order {
            let degree_basis = monomials_of_degree(nv, d);
            for nu in &degree_basis {
                let v_nu = table.image_of_monomial(nu)?;
                for mu in &degree_basis {
                    let actual = engine.pairing(&monomial_poly(mu), &v_nu)?;
                    let expected = if nu == mu {
                        nu.0.iter().fold(Rat::one(), |acc, &e| {
                            acc.mul_ref(&factorial::<Rat>(e as usize))
                        })
                    } else {
                        Rat::zero()
                    };
                    if actual != expected {
                        witness = Some(format!(
                            "pair ({nu}, {mu}): got {}, expected {}",
                            actual.render(),
                            expected.render()
                        ));
                        break 'pairing;
                    }
                }
            }
            // a cross-degree sample must vanish
            if d < order {
                let nu = &degree_basis[0];
                let mu = &monomials_of_degree(nv, d + 1)[0];
                let v_nu = table.image_of_monomial(nu)?;
                let across = engine.pairing(&monomial_poly(mu), &v_nu)?;
                if !across.is_zero() {
                    witness = Some(format!(
                        "cross-degree pair ({nu}, {mu}): got {}",
                        across.render()
                    ));
                    break 'pairing;
                }
            }
        }
        report.push(CheckRecord::exact(
            "pairing_adjoint_identity",
            format!("homogeneous monomial pairs, degrees <= {order}"),
            PROVENANCE_IDENTITY,
            witness,
        ));
    }

    // degree-wise kernel recursion at a fixed rational second argument
    {
        let tr = KernelTruncation::new(ctx.clone(), table.clone(), order)?;
        let y = canonical_y(nv);
        let mut xis: Vec<Vector<Rat>> = (0..nv).map(|i| Vector::unit(nv, i)).collect();
        if nv >= 2 {
            xis.push(mixed_direction(nv));
        }
        let mut witness = None;
        'recursion: for xi in &xis {
            for n in 0..order {
                let r = kernel_recursion_residual(&tr, xi, &y, n)?;
                if !r.is_zero() {
                    witness = Some(format!(
                        "direction {}, degree {n}: residual {r}",
                        fmt_point(&xi.0)
                    ));
                    break 'recursion;
                }
            }
        }
        report.push(CheckRecord::exact(
            "kernel_degree_recursion",
            format!("y = {}, degrees < {order}", fmt_point(&y)),
            PROVENANCE_IDENTITY,
            witness,
        ));
    }

    // negative control: corrupt one table entry; the exchange-relation
    // check must detect it
    {
        let mut bad = table.clone();
        let degree = 2.min(order);
        let entry = bad.matrix_mut(degree)?.get(0, 0).clone();
        bad.matrix_mut(degree)?
            .set(0, 0, entry.add_ref(&Rat::one()));
        let v_bad = table_block_matrix(&bad, order)?;
        let t_0 = PolyOperator::dunkl(&ctx, Vector::unit(nv, 0)).matrix_up_to(order)?;
        let d_0 = PolyOperator::partial(nv, 0).matrix_up_to(order)?;
        let residual = t_0.mul(&v_bad).sub(&v_bad.mul(&d_0));
        let detected = matrix_zero_witness(&residual, &basis).is_some();
        report.push(CheckRecord::exact(
            "fault_injection_detected",
            format!("table entry (0,0) at degree {degree} shifted by 1"),
            PROVENANCE_CONTROL,
            if detected {
                None
            } else {
                Some("corrupted table passed the exchange-relation check".into())
            },
        ));
    }

    Ok(report)
}

// ---------------------------------------------------------------------------
// suite: intertwiner positivity scan
// ---------------------------------------------------------------------------

/// Exact nonnegativity scan: the intertwiner image of every generated
/// nonnegative polynomial stays nonnegative on a rational grid filling
/// the radius-2 ball. Runs fifty family members; use [`positivity_scan`]
/// for a configurable family size.
pub fn suite_positivity_vk(config: &Config, order: usize, seed: u64) -> Result<Report> {
    positivity_scan_impl(config, order, seed, 50, "positivity_vk")
}

/// The same exact scan with a caller-chosen family size, reported under
/// the `scan_positivity` suite name.
pub fn positivity_scan(config: &Config, order: usize, seed: u64, count: usize) -> Result<Report> {
    positivity_scan_impl(config, order, seed, count, "scan_positivity")
}

fn positivity_scan_impl(
    config: &Config,
    order: usize,
    seed: u64,
    count: usize,
    suite_name: &str,
) -> Result<Report> {
    require_exact(config, "positivity")?;
    let ctx = config.build_context::<Rat>(order)?;
    let nv = ctx.nvars();
    let table = build_vk(&ctx, order)?;
    let grid = rational_ball_grid::<Rat>(nv)?;
    let family = nonnegative_family::<Rat>(
        nv,
        &FamilySpec {
            count,
            max_degree: order,
            seed,
        },
    );
    let mut report = Report::new(suite_name);
    let grid_desc = format!("{} rational grid points in the radius-2 ball", grid.len());

    // zero multiplicity leaves polynomials unchanged
    {
        let rs0 = ctx.root_system().clone();
        let mult0 = MultiplicityFunction::uniform(&rs0, Rat::zero())?;
        let group0 = ReflectionGroup::build(rs0)?;
        let ctx0 = DunklContext::new(group0, mult0, order)?;
        let table0 = build_vk(&ctx0, order)?;
        let mut witness = None;
        for (name, p) in family.iter().take(5) {
            if table0.apply(p)? != *p {
                witness = Some(format!("{name} is altered at zero multiplicity"));
                break;
            }
        }
        report.push(CheckRecord::exact(
            "zero_multiplicity_is_identity",
            "first five family members",
            PROVENANCE_IDENTITY,
            witness,
        ));
    }

    // rank-one frozen example: the image of (x-1)^2 via the coefficient
    // recurrence
    if nv == 1 {
        let k = ctx.multiplicity().orbit_values()[0].clone();
        let p = parse_polynomial::<Rat>("x1^2 - 2*x1 + 1", 1)?;
        let image = table.apply(&p)?;
        let mut expected = Polynomial::zero(1);
        expected.add_term(Monomial(vec![2]), &vk_1d_coeff(2, &k));
        expected.add_term(
            Monomial(vec![1]),
            &vk_1d_coeff(1, &k).mul_ref(&Rat::from_i64(-2)),
        );
        expected.add_term(Monomial(vec![0]), &Rat::one());
        report.push(CheckRecord::exact(
            "shifted_square_image_formula",
            format!("k = {}", k.render()),
            PROVENANCE_ORACLE,
            if image == expected {
                None
            } else {
                Some(format!("got {image}, expected {expected}"))
            },
        ));
    }

    // the main exact scan
    for (name, p) in &family {
        let image = table.apply(p)?;
        let witness = scan_nonnegative(&image, &grid)
            .map(|(pt, v)| format!("image of {name} is {} at {}", v.render(), fmt_point(&pt)));
        report.push(CheckRecord::exact(
            format!("image_nonnegative/{name}"),
            grid_desc.clone(),
            PROVENANCE_POSITIVITY,
            witness,
        ));
    }

    // negative control: a corrupted table must produce a detectable
    // violation somewhere in the family
    {
        let mut bad = table.clone();
        let degree = 2.min(order);
        let entry = bad.matrix_mut(degree)?.get(0, 0).clone();
        bad.matrix_mut(degree)?
            .set(0, 0, entry.sub_ref(&Rat::from_i64(10)));
        let mut detected = false;
        'control: for (_, p) in &family {
            let image = bad.apply(p)?;
            if scan_nonnegative(&image, &grid).is_some() {
                detected = true;
                break 'control;
            }
        }
        report.push(CheckRecord::exact(
            "fault_injection_detected",
            format!("table entry (0,0) at degree {degree} shifted by -10"),
            PROVENANCE_CONTROL,
            if detected {
                None
            } else {
                Some("corrupted table produced no grid violation".into())
            },
        ));
    }

    Ok(report)
}

// ---------------------------------------------------------------------------
// suite: semigroup positivity
// ---------------------------------------------------------------------------

/// Exact nonnegativity scans for the conjugated semigroup
/// `e^{-s Lap} e^{t (difference part)} e^{s Lap}`, the smoothing sandwich
/// `e^{-Lap/2} e^{(generalized Lap)/2}`, and the positive minimum
/// principle of the conjugated one-dimensional operator family.
pub fn suite_semigroup_positivity(config: &Config, order: usize, seed: u64) -> Result<Report> {
    require_exact(config, "semigroup")?;
    let ctx = config.build_context::<Rat>(order)?;
    let nv = ctx.nvars();
    let grid = rational_ball_grid::<Rat>(nv)?;
    let family = nonnegative_family::<Rat>(
        nv,
        &FamilySpec {
            count: 50,
            max_degree: order,
            seed,
        },
    );
    let lap = PolyOperator::classical_laplacian(nv);
    let lk = PolyOperator::l_k(&ctx);
    let lap_k = PolyOperator::laplacian(&ctx);
    let mut report = Report::new("semigroup_positivity");
    let grid_desc = format!("{} rational grid points in the radius-2 ball", grid.len());

    // s = t = 0 is the identity
    {
        let p = &family[0].1;
        let q = exp_apply(&lap, &Rat::zero(), &exp_apply(&lk, &Rat::zero(), p)?)?;
        report.push(CheckRecord::exact(
            "zero_times_are_identity",
            "first family member, s = t = 0",
            PROVENANCE_IDENTITY,
            if q == *p {
                None
            } else {
                Some("operator with zero times altered the polynomial".into())
            },
        ));
    }

    // conjugated semigroup scan, rotating through all (s, t) pairs
    let times = [rat(0, 1), rat(1, 2), rat(1, 1), rat(2, 1)];
    let mut combos = Vec::new();
    for s in &times {
        for t in &times {
            combos.push((s.clone(), t.clone()));
        }
    }
    for (i, (name, p)) in family.iter().enumerate() {
        let (s, t) = &combos[i % combos.len()];
        let staged = exp_apply(&lap, s, p)?;
        let staged = exp_apply(&lk, t, &staged)?;
        let result = exp_apply(&lap, &s.neg_ref(), &staged)?;
        let witness = scan_nonnegative(&result, &grid).map(|(pt, v)| {
            format!(
                "conjugated semigroup image of {name} is {} at {}",
                v.render(),
                fmt_point(&pt)
            )
        });
        report.push(CheckRecord::exact(
            format!("conjugated_semigroup/{name}"),
            format!("s = {}, t = {}; {grid_desc}", s.render(), t.render()),
            PROVENANCE_POSITIVITY,
            witness,
        ));
    }

    // smoothing sandwich on every family member
    let half = rat(1, 2);
    for (name, p) in &family {
        let inner = exp_apply(&lap_k, &half, p)?;
        let result = exp_apply(&lap, &half.neg_ref(), &inner)?;
        let witness = scan_nonnegative(&result, &grid).map(|(pt, v)| {
            format!(
                "sandwich image of {name} is {} at {}",
                v.render(),
                fmt_point(&pt)
            )
        });
        report.push(CheckRecord::exact(
            format!("smoothing_sandwich/{name}"),
            grid_desc.clone(),
            PROVENANCE_POSITIVITY,
            witness,
        ));
    }

    // named biquadratic example for the sandwich: (x1-1)^2 (x1+1)^2
    {
        let p = parse_polynomial::<Rat>("x1^4 - 2*x1^2 + 1", nv)?;
        let inner = exp_apply(&lap_k, &half, &p)?;
        let result = exp_apply(&lap, &half.neg_ref(), &inner)?;
        let witness = scan_nonnegative(&result, &grid)
            .map(|(pt, v)| format!("value {} at {}", v.render(), fmt_point(&pt)));
        report.push(CheckRecord::exact(
            "smoothing_sandwich_biquadratic",
            grid_desc.clone(),
            PROVENANCE_POSITIVITY,
            witness,
        ));
    }

    // positive minimum principle for the conjugated one-dimensional family
    {
        let touching = zero_touching_family_1d::<Rat>(&FamilySpec {
            count: 10,
            max_degree: order.min(6),
            seed,
        });
        for s in [rat(1, 2), rat(1, 1)] {
            let s_op = s.clone();
            let op = PolyOperator::new(1, true, move |p| lambda_s_apply(&s_op, p));
            let mut witness = None;
            for (name, p, x0) in &touching {
                let verdict = minimum_principle_check(&op, p, std::slice::from_ref(x0), 0.0)?;
                if !verdict.pass {
                    witness = Some(format!(
                        "{name}: value {} at its zero {}",
                        verdict.value.render(),
                        x0.render()
                    ));
                    break;
                }
            }
            report.push(CheckRecord::exact(
                format!("minimum_principle/s={}", s.render()),
                "ten zero-touching nonnegative polynomials",
                PROVENANCE_POSITIVITY,
                witness,
            ));
        }
    }

    // negative control: the backward heat flow is not positivity
    // preserving; the scan must catch it
    {
        let p = parse_polynomial::<Rat>("x1^2", nv)?;
        let result = exp_apply(&lap, &half.neg_ref(), &p)?;
        let detected = scan_nonnegative(&result, &grid).is_some();
        report.push(CheckRecord::exact(
            "fault_injection_detected",
            "backward heat flow applied to a square",
            PROVENANCE_CONTROL,
            if detected {
                None
            } else {
                Some("backward heat flow produced no negative grid value".into())
            },
        ));
    }

    Ok(report)
}

// ---------------------------------------------------------------------------
// suite: numeric oracles, bounds, and measures
// ---------------------------------------------------------------------------

/// Numeric suite: quadrature and series oracles for the rank-one
/// coefficients, the direct-product closed form, the conjugated-operator
/// integral representation, the confluent-series kernel oracle, modulus
/// and derivative bounds, Gram positive-semidefiniteness, explicit
/// measure moments and transformation laws, and the Gaussian-integral
/// form of the pairing.
pub fn suite_numeric(config: &Config) -> Result<Report> {
    let spec = config.quad_spec();
    let mut report = Report::new("numeric");

    // rank-one coefficients: quadrature against the exact recurrence
    for (kn, kd) in [(1i64, 2i64), (1, 1), (5, 2)] {
        let k = rat(kn, kd);
        let kf = k.to_f64();
        let mut worst = 0.0f64;
        for n in 0..=6u32 {
            let exact = vk_1d_coeff(n, &k).to_f64();
            let numeric = beta_density_moment(n, kf, 1e-12)?;
            worst = worst.max((numeric - exact).abs());
        }
        report.push(CheckRecord::numeric(
            format!("rank_one_coefficients_vs_quadrature/k={}", k.render()),
            "coefficients for degrees 0..=6",
            PROVENANCE_ORACLE,
            worst,
            worst <= 1e-10,
        ));
    }

    // direct-product closed form vs the generic builder (exact equality)
    {
        let rs = GroupPreset::Z2 { n: 2 }.root_system::<Rat>()?;
        let mult = MultiplicityFunction::new(&rs, vec![rat(1, 2), rat(5, 2)])?;
        let group = ReflectionGroup::build(rs)?;
        let ctx = DunklContext::new(group, mult, 4)?;
        let table = build_vk(&ctx, 4)?;
        let ks = [rat(1, 2), rat(5, 2)];
        let mut witness = None;
        'product: for d in 0..=4usize {
            for nu in monomials_of_degree(2, d) {
                let image = table.image_of_monomial(&nu)?;
                let coeff = vk_z2n_coeff(&ks, &nu);
                let expected = Polynomial::from_monomial(nu.clone(), coeff);
                if image != expected {
                    witness = Some(format!("monomial {nu}: got {image}, expected {expected}"));
                    break 'product;
                }
            }
        }
        report.push(CheckRecord::exact(
            "direct_product_closed_form_matches_builder",
            "two axes, k = (1/2, 5/2), degrees <= 4",
            PROVENANCE_ORACLE,
            witness,
        ));
    }

    // conjugated operator: integral representation vs exact conjugation
    {
        let mut worst = 0.0f64;
        for src in ["x1^2", "x1^3", "x1^4"] {
            let p = parse_polynomial::<Rat>(src, 1)?;
            for (sn, sd) in [(1i64, 2i64), (1, 1)] {
                let exact_image = lambda_s_apply(&rat(sn, sd), &p)?.to_f64_poly();
                let pf = p.to_f64_poly();
                let s = sn as f64 / sd as f64;
                for x in [-1.0f64, 0.0, 1.0] {
                    let numeric = lambda_s_closed_form(s, &pf, x, 1e-12)?;
                    worst = worst.max((numeric - exact_image.evaluate(&[x])).abs());
                }
            }
        }
        report.push(CheckRecord::numeric(
            "conjugated_operator_integral_representation",
            "p in {x^2, x^3, x^4}, s in {1/2, 1}, x in {-1, 0, 1}",
            PROVENANCE_ORACLE,
            worst,
            worst <= 1e-8,
        ));
    }

    // kernel vs the confluent-series oracle
    let z2_order30 = {
        let ctx = z2_context(rat(1, 1), 30)?;
        KernelTruncation::from_context(&ctx, 30)?
    };
    {
        let mut worst = 0.0f64;
        for xy2 in -4i64..=4 {
            // xy in steps of 1/2 across [-2, 2]
            let x = rat(1, 1);
            let y = rat(xy2, 2);
            let (v, tail) = z2_order30.eval_real(&[x], &[y])?;
            let xyf = xy2 as f64 / 2.0;
            let oracle = xyf.exp() * hyp1f1(1.0, 3.0, -2.0 * xyf);
            worst = worst.max((v.to_f64() - oracle).abs() - tail);
        }
        report.push(CheckRecord::numeric(
            "kernel_vs_confluent_series",
            "k = 1, order 30, xy in [-2, 2] step 1/2",
            PROVENANCE_ORACLE,
            worst,
            worst <= 1e-10,
        ));
    }

    // modulus bound at imaginary argument and derivative bound, 9x9 grid
    {
        let mut worst_modulus = f64::NEG_INFINITY;
        let mut bounds_pass = true;
        for xi in -4i64..=4 {
            for yi in -4i64..=4 {
                let x = [rat(xi, 2)];
                let z = [Cplx::new(Rat::zero(), rat(yi, 2))];
                let kv = z2_order30.eval(&x, &z)?;
                worst_modulus = worst_modulus.max(kv.value.magnitude() - 1.0 - kv.tail_bound);
                for nu in [Monomial(vec![0]), Monomial(vec![1])] {
                    let verdict = kernel_bound_check(&z2_order30, &x, &z, &nu, 1e-8)?;
                    bounds_pass &= verdict.pass;
                }
            }
        }
        report.push(CheckRecord::numeric(
            "modulus_bound_imaginary_argument",
            "9x9 grid, |x|, |y| <= 2",
            PROVENANCE_BOUND,
            worst_modulus,
            worst_modulus <= 1e-10,
        ));
        report.push(CheckRecord::numeric(
            "derivative_bounds_grid",
            "9x9 grid, derivative orders 0 and 1",
            PROVENANCE_BOUND,
            if bounds_pass { 0.0 } else { 1.0 },
            bounds_pass,
        ));
    }

    // Gram positive-semidefiniteness at order 40
    {
        let ctx = z2_context(rat(1, 1), 40)?;
        let tr = KernelTruncation::from_context(&ctx, 40)?;
        let five: Vec<Vec<Rat>> = [(-1i64, 1i64), (-1, 2), (0, 1), (1, 2), (1, 1)]
            .iter()
            .map(|&(n, d)| vec![rat(n, d)])
            .collect();
        let eight: Vec<Vec<Rat>> = (-4..=3).map(|j: i64| vec![rat(j, 4)]).collect();
        let mut worst = f64::INFINITY;
        let mut pass = true;
        for pts in [five, eight] {
            let v = gram_psd_check(&tr, &pts, &[rat(1, 1)], 1e-8)?;
            worst = worst.min(v.min_eigenvalue);
            pass &= v.pass;
        }
        report.push(CheckRecord::numeric(
            "gram_minimum_eigenvalue",
            "5-point and 8-point configurations in [-1, 1], order 40",
            PROVENANCE_BOUND,
            worst,
            pass,
        ));
    }

    // explicit measure moments against the exact coefficients
    {
        let mut worst = 0.0f64;
        for (kn, kd) in [(1i64, 2i64), (1, 1), (5, 2)] {
            let k = rat(kn, kd);
            let kf = k.to_f64();
            for xf in [1.0f64, 1.5] {
                let mu = Measure1D::new(xf, kf);
                for n in 0..=6u32 {
                    let exact = vk_1d_coeff(n, &k).to_f64() * xf.powi(n as i32);
                    let numeric = measure_moments(&mu, n)?;
                    worst = worst.max((numeric - exact).abs());
                }
            }
        }
        // product case
        let ks = [rat(1, 2), rat(5, 2)];
        let ksf = [0.5f64, 2.5];
        let xs = [1.0f64, 1.5];
        for nu in monomials_up_to(2, 4) {
            let exact = vk_z2n_coeff(&ks, &nu).to_f64()
                * xs[0].powi(nu.0[0] as i32)
                * xs[1].powi(nu.0[1] as i32);
            let numeric = measure_product_moment(&xs, &ksf, &nu.0.to_vec())?;
            worst = worst.max((numeric - exact).abs());
        }
        report.push(CheckRecord::numeric(
            "measure_moments_vs_exact_coefficients",
            "rank-one k in {1/2, 1, 5/2} and the (1/2, 5/2) product case",
            PROVENANCE_ORACLE,
            worst,
            worst <= 1e-10,
        ));
    }

    // measure transformation laws and support geometry
    {
        let mut pass = true;
        let mut worst = 0.0f64;
        // (base points, multiplicities, scale, sign flips, monomial exponents)
        type TransformCase = (Vec<f64>, Vec<f64>, f64, Vec<bool>, Vec<u32>);
        let cases: [TransformCase; 4] = [
            (vec![1.0], vec![1.0], 1.0, vec![true], vec![1]),
            (vec![1.0], vec![1.0], 2.0, vec![false], vec![2]),
            (
                vec![1.0, 2.0],
                vec![0.5, 2.5],
                1.5,
                vec![true, false],
                vec![1, 2],
            ),
            (
                vec![1.5, 0.5],
                vec![1.0, 1.0],
                2.0,
                vec![true, true],
                vec![3, 1],
            ),
        ];
        for (xs, ks, r, flips, nu) in &cases {
            let v = measure_transform_check(xs, ks, *r, flips, nu, 1e-10)?;
            pass &= v.pass;
            worst = worst.max((v.lhs - v.rhs).abs());
        }
        report.push(CheckRecord::numeric(
            "measure_transformation_laws",
            "scaling and sign-flip equivariance at the moment level",
            PROVENANCE_ORACLE,
            worst,
            pass,
        ));

        let rs = GroupPreset::Z2 { n: 2 }.root_system::<Rat>()?;
        let mult = MultiplicityFunction::new(&rs, vec![rat(1, 1), rat(1, 1)])?;
        let group = ReflectionGroup::build(rs)?;
        let ctx = DunklContext::new(group, mult, 2)?;
        let hull = support_hull_check(&ctx, &[1.0, 2.0])?;
        report.push(CheckRecord::exact(
            "support_box_equals_orbit_hull",
            "product group, base point (1, 2)",
            PROVENANCE_POSITIVITY,
            if hull.pass {
                None
            } else {
                Some("orbit hull does not match the support box".into())
            },
        ));
    }

    // Gaussian-integral form of the pairing vs the exact operator pairing
    {
        let mut worst_rel = 0.0f64;
        for (kn, kd) in [(1i64, 2i64), (1, 1), (5, 2)] {
            let ctx = z2_context(rat(kn, kd), 4)?;
            for src in ["1", "x1", "x1^2", "x1^2 + x1", "x1^4"] {
                let p = parse_polynomial::<Rat>(src, 1)?;
                let exact = pairing(&ctx, &p, &p)?.to_f64();
                let numeric = gaussian_pairing_quadrature(&ctx, &p, &p, &spec)?;
                worst_rel = worst_rel.max((numeric - exact).abs() / exact.abs().max(1.0));
            }
        }
        let rs = GroupPreset::Z2 { n: 2 }.root_system::<Rat>()?;
        let mult = MultiplicityFunction::new(&rs, vec![rat(1, 2), rat(5, 2)])?;
        let group = ReflectionGroup::build(rs)?;
        let ctx = DunklContext::new(group, mult, 4)?;
        for src in ["x1*x2", "x1^2 + x2^2", "x1^2*x2^2", "1 + x1*x2"] {
            let p = parse_polynomial::<Rat>(src, 2)?;
            let exact = pairing(&ctx, &p, &p)?.to_f64();
            let numeric = gaussian_pairing_quadrature(&ctx, &p, &p, &spec)?;
            worst_rel = worst_rel.max((numeric - exact).abs() / exact.abs().max(1.0));
        }
        report.push(CheckRecord::numeric(
            "pairing_vs_gaussian_integral",
            "rank-one k in {1/2, 1, 5/2} and the (1/2, 5/2) product case, degrees <= 4",
            PROVENANCE_ORACLE,
            worst_rel,
            worst_rel <= 1e-8,
        ));
    }

    // negative control: a wrong coefficient oracle must be flagged
    {
        let k = rat(1, 1);
        let wrong_k = rat(2, 1);
        let mut separation = 0.0f64;
        for n in 1..=4u32 {
            let numeric = beta_density_moment(n, k.to_f64(), 1e-12)?;
            let wrong = vk_1d_coeff(n, &wrong_k).to_f64();
            separation = separation.max((numeric - wrong).abs());
        }
        report.push(CheckRecord::numeric(
            "fault_injection_detected",
            "quadrature compared against coefficients for a different k",
            PROVENANCE_CONTROL,
            separation,
            separation > 1e-10,
        ));
    }

    Ok(report)
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

/// Run one suite by name (`identities`, `positivity`, `semigroup`,
/// `numeric`).
pub fn run_suite(name: &str, config: &Config, order: usize, seed: u64) -> Result<Report> {
    match name {
        "identities" => suite_identities(config, order),
        "positivity" => suite_positivity_vk(config, order, seed),
        "semigroup" => suite_semigroup_positivity(config, order, seed),
        "numeric" => suite_numeric(config),
        other => Err(DunklError::InvalidArgument(format!(
            "unknown suite {other:?} (expected identities, positivity, semigroup, numeric, or all)"
        ))),
    }
}

/// Run every suite in order.
pub fn run_all(config: &Config, order: usize, seed: u64) -> Result<Vec<Report>> {
    Ok(vec![
        suite_identities(config, order)?,
        suite_positivity_vk(config, order, seed)?,
        suite_semigroup_positivity(config, order, seed)?,
        suite_numeric(config)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(json: &str) -> Config {
        Config::from_json(json).unwrap()
    }

    fn b2_config() -> Config {
        config(
            r#"{
                "group": {"preset": "B", "N": 2},
                "multiplicity": {"orbit_values": [1, "1/2"]}
            }"#,
        )
    }

    fn z2_config() -> Config {
        config(
            r#"{
                "group": {"preset": "Z2", "N": 1},
                "multiplicity": {"orbit_values": [1]}
            }"#,
        )
    }

    #[test]
    fn ball_grids_have_enough_points() {
        assert!(rational_ball_grid::<Rat>(1).unwrap().len() >= 1000);
        assert!(rational_ball_grid::<Rat>(2).unwrap().len() >= 1000);
        assert!(rational_ball_grid::<Rat>(3).unwrap().len() >= 1000);
        // all points are inside the closed ball
        for pt in rational_ball_grid::<Rat>(2).unwrap() {
            let norm: Rat = pt
                .iter()
                .fold(Rat::zero(), |acc, c| acc.add_ref(&c.mul_ref(c)));
            assert!(!Rat::from_i64(4).sub_ref(&norm).is_negative_val());
        }
    }

    #[test]
    fn identities_suite_passes_on_small_case() {
        let report = suite_identities(&b2_config(), 4).unwrap();
        assert!(report.pass, "{}", report.to_json());
        assert!(report.checks.len() >= 10);
        // the control is recorded and passes (fault detected)
        assert!(report
            .checks
            .iter()
            .any(|c| c.expected_provenance == "control" && c.pass));
    }

    #[test]
    fn identities_suite_requires_exact_mode() {
        let cfg = config(
            r#"{
                "group": {"preset": "Z2", "N": 1},
                "multiplicity": {"orbit_values": [1]},
                "mode": "float"
            }"#,
        );
        assert!(matches!(
            suite_identities(&cfg, 4),
            Err(DunklError::ModeUnsupported(_))
        ));
    }

    #[test]
    fn positivity_suite_passes_rank_one() {
        let report = suite_positivity_vk(&z2_config(), 4, 11).unwrap();
        assert!(report.pass, "{}", report.to_json());
        assert_eq!(
            report
                .checks
                .iter()
                .filter(|c| c.name.starts_with("image_nonnegative/"))
                .count(),
            50
        );
    }

    #[test]
    fn semigroup_suite_passes_rank_one() {
        let report = suite_semigroup_positivity(&z2_config(), 4, 5).unwrap();
        assert!(report.pass, "{}", report.to_json());
    }

    #[test]
    fn numeric_suite_passes() {
        let report = suite_numeric(&z2_config()).unwrap();
        assert!(report.pass, "{}", report.to_json());
    }

    #[test]
    fn dispatch_rejects_unknown_suite() {
        assert!(matches!(
            run_suite("everything", &z2_config(), 4, 0),
            Err(DunklError::InvalidArgument(_))
        ));
    }
}
