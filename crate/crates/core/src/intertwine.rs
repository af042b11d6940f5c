//! Degree-by-degree construction of the intertwining operator from its
//! defining property, plus the closed forms available in the rank-one and
//! direct-product cases, and a persistent exact table cache.
//!
//! The operator is the unique degree-preserving linear map fixing constants
//! with `T_{e_i} V = V d/dx_i` for every coordinate. On homogeneous degree
//! `n` this pins each image `V(x^nu)` as the unique solution of the stacked
//! linear system `{T_{e_i} u = nu_i V(x^(nu - e_i))}`, solved here exactly
//! with full rank/consistency reporting — a multiplicity for which no
//! unique solution exists is reported with the offending degree instead of
//! being papered over.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dunkl::{dunkl_apply, dunkl_matrix_homogeneous, DunklContext};
use crate::error::{DunklError, Result};
use crate::linalg::{solve_columns, Matrix, SolveOutcome};
use crate::poly::{dim_homogeneous, monomials_of_degree, Monomial, Polynomial, Vector};
use crate::scalar::Scalar;

/// Per-degree matrices of the intertwining operator on homogeneous
/// polynomials, in the ascending graded-lex monomial bases.
#[derive(Clone, Debug)]
pub struct IntertwinerTable<S> {
    nvars: usize,
    order: usize,
    /// `matrices[n]` maps coefficient vectors of degree-`n` homogeneous
    /// polynomials to coefficient vectors of their images (square).
    matrices: Vec<Matrix<S>>,
}

impl<S: Scalar> IntertwinerTable<S> {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn matrix(&self, degree: usize) -> Result<&Matrix<S>> {
        self.matrices
            .get(degree)
            .ok_or(DunklError::DegreeExceedsTable(degree, self.order))
    }

    /// Mutable matrix access for fault injection in verification suites
    /// (negative controls deliberately corrupt a table entry to prove the
    /// checks can detect violations).
    pub(crate) fn matrix_mut(&mut self, degree: usize) -> Result<&mut Matrix<S>> {
        let order = self.order;
        self.matrices
            .get_mut(degree)
            .ok_or(DunklError::DegreeExceedsTable(degree, order))
    }

    /// Image of a single monomial.
    pub fn image_of_monomial(&self, m: &Monomial) -> Result<Polynomial<S>> {
        let n = m.degree();
        let matrix = self.matrix(n)?;
        let basis = monomials_of_degree(self.nvars, n);
        let j = basis
            .binary_search(m)
            .map_err(|_| DunklError::DimensionMismatch("monomial outside basis".into()))?;
        let col = matrix.col_vector(j);
        Ok(Polynomial::from_coeff_vector(self.nvars, &basis, &col.0))
    }

    /// Apply the operator to an arbitrary polynomial of degree <= order,
    /// extending linearly over homogeneous parts.
    pub fn apply(&self, p: &Polynomial<S>) -> Result<Polynomial<S>> {
        if p.nvars() != self.nvars {
            return Err(DunklError::DimensionMismatch(format!(
                "table is for {} variables, polynomial has {}",
                self.nvars,
                p.nvars()
            )));
        }
        let mut out = Polynomial::zero(self.nvars);
        for (n, part) in p.homogeneous_parts() {
            let matrix = self.matrix(n)?;
            let basis = monomials_of_degree(self.nvars, n);
            let coeffs = part.coeff_vector(&basis)?;
            let image = matrix.matvec(&coeffs);
            out = out.add(&Polynomial::from_coeff_vector(self.nvars, &basis, &image));
        }
        Ok(out)
    }
}

/// Build the table up to `order` by stacked exact linear solves, one degree
/// at a time. Each degree's system shares its matrix across all target
/// monomials, is eliminated once, and is verified afterwards by applying
/// the defining property to every computed image.
pub fn build_vk<S: Scalar>(ctx: &DunklContext<S>, order: usize) -> Result<IntertwinerTable<S>> {
    let nv = ctx.nvars();
    let mut matrices: Vec<Matrix<S>> = vec![Matrix::identity(1)];
    for n in 1..=order {
        let dim_n = dim_homogeneous(nv, n);
        let dim_prev = dim_homogeneous(nv, n - 1);
        // stack the N direction blocks
        let blocks: Vec<Matrix<S>> = (0..nv)
            .map(|i| dunkl_matrix_homogeneous(ctx, &Vector::unit(nv, i), n))
            .collect::<Result<_>>()?;
        let mut stacked_rows: Vec<Vec<S>> = Vec::with_capacity(nv * dim_prev);
        for block in &blocks {
            for r in 0..block.rows() {
                stacked_rows.push(block.row(r).to_vec());
            }
        }
        let a = Matrix::from_rows(stacked_rows);
        // right-hand side for target monomial nu: block i holds
        // nu_i * (previous-degree image of x^(nu - e_i))
        let prev = &matrices[n - 1];
        let source = monomials_of_degree(nv, n);
        let prev_basis = monomials_of_degree(nv, n - 1);
        let rhs: Vec<Vec<S>> = source
            .iter()
            .map(|nu| {
                let mut b = vec![S::zero(); nv * dim_prev];
                for i in 0..nv {
                    let e_i = nu.0[i];
                    if e_i == 0 {
                        continue;
                    }
                    let mut lowered = nu.clone();
                    lowered.0[i] -= 1;
                    let j = prev_basis.binary_search(&lowered).expect("basis closed");
                    let col = prev.col_vector(j);
                    let factor = S::from_i64(e_i as i64);
                    for (r, v) in col.0.iter().enumerate() {
                        b[i * dim_prev + r] = factor.mul_ref(v);
                    }
                }
                b
            })
            .collect();
        let solutions = match solve_columns(&a, &rhs)? {
            SolveOutcome::Unique { solutions } => solutions,
            SolveOutcome::Singular { rank, inconsistent } => {
                return Err(DunklError::SingularSystem {
                    degree: n,
                    detail: if inconsistent {
                        format!("inconsistent system of rank {rank} (dimension {dim_n})")
                    } else {
                        format!("rank {rank} < dimension {dim_n}")
                    },
                });
            }
        };
        let mut v_n = Matrix::zero(dim_n, dim_n);
        for (j, sol) in solutions.iter().enumerate() {
            for (i, c) in sol.iter().enumerate() {
                if !c.is_zero() {
                    v_n.set(i, j, c.clone());
                }
            }
        }
        matrices.push(v_n);
        verify_degree(ctx, &matrices, n)?;
    }
    Ok(IntertwinerTable {
        nvars: nv,
        order,
        matrices,
    })
}

/// Re-check the defining property at degree `n` by direct operator
/// application to every image polynomial (independent of the solver).
fn verify_degree<S: Scalar>(ctx: &DunklContext<S>, matrices: &[Matrix<S>], n: usize) -> Result<()> {
    let nv = ctx.nvars();
    let source = monomials_of_degree(nv, n);
    let prev_basis = monomials_of_degree(nv, n - 1);
    let prev = &matrices[n - 1];
    let table_n = &matrices[n];
    for (j, nu) in source.iter().enumerate() {
        let image = Polynomial::from_coeff_vector(nv, &source, &table_n.col_vector(j).0);
        for i in 0..nv {
            let applied = dunkl_apply(ctx, &Vector::unit(nv, i), &image)?;
            let expected = if nu.0[i] == 0 {
                Polynomial::zero(nv)
            } else {
                let mut lowered = nu.clone();
                lowered.0[i] -= 1;
                let col = prev.col_vector(prev_basis.binary_search(&lowered).unwrap());
                Polynomial::from_coeff_vector(nv, &prev_basis, &col.0)
                    .scale(&S::from_i64(nu.0[i] as i64))
            };
            let residual = applied.sub(&expected);
            let ok = residual.terms().all(|(_, c)| c.is_negligible());
            if !ok {
                return Err(DunklError::SingularSystem {
                    degree: n,
                    detail: "post-solve residual check failed".into(),
                });
            }
        }
    }
    Ok(())
}

/// The moment polynomial attached to a multi-index: the image of the
/// corresponding monomial under the intertwiner. Homogeneous of the same
/// degree; the zero index gives the constant 1.
pub fn moment_function<S: Scalar>(
    table: &IntertwinerTable<S>,
    nu: &Monomial,
) -> Result<Polynomial<S>> {
    table.image_of_monomial(nu)
}

// ---------------------------------------------------------------------------
// rank-one and direct-product closed forms
// ---------------------------------------------------------------------------

/// `(x)(x+1)...(x+j-1)`.
pub fn pochhammer<S: Scalar>(x: &S, j: u32) -> S {
    let mut acc = S::one();
    for t in 0..j {
        acc = acc.mul_ref(&x.add_ref(&S::from_i64(t as i64)));
    }
    acc
}

/// Rank-one image coefficient by the defining recurrence:
/// `b_0 = 1`, `b_n = n b_(n-1) / (n + 2k [n odd])`.
pub fn vk_1d_coeff<S: Scalar>(n: u32, k: &S) -> S {
    let mut b = S::one();
    for m in 1..=n {
        let mut denom = S::from_i64(m as i64);
        if m % 2 == 1 {
            denom = denom.add_ref(&S::from_i64(2).mul_ref(k));
        }
        b = b.mul_ref(&S::from_i64(m as i64)).div_ref(&denom);
    }
    b
}

/// Rank-one image coefficient by the independent beta-moment expansion of
/// the integral representation:
/// `b_n = sum_j C(n,j) (-1)^(n-j) 2^j (k+1)_j / (2k+1)_j`.
pub fn vk_1d_coeff_beta_sum<S: Scalar>(n: u32, k: &S) -> S {
    let k_plus_1 = k.add_ref(&S::one());
    let two_k_plus_1 = S::from_i64(2).mul_ref(k).add_ref(&S::one());
    let mut sum = S::zero();
    let mut binom = S::one(); // C(n, j) built incrementally
    for j in 0..=n {
        let ratio = pochhammer(&k_plus_1, j).div_ref(&pochhammer(&two_k_plus_1, j));
        let sign_exp = n - j;
        let mut term = binom.mul_ref(&S::from_i64(2).pow_u(j)).mul_ref(&ratio);
        if sign_exp % 2 == 1 {
            term = term.neg_ref();
        }
        sum.add_assign_ref(&term);
        if j < n {
            // C(n, j+1) = C(n, j) (n-j)/(j+1)
            binom = binom
                .mul_ref(&S::from_i64((n - j) as i64))
                .div_ref(&S::from_i64((j + 1) as i64));
        }
    }
    sum
}

/// Rank-one intertwiner on a one-variable polynomial via the integral
/// representation's moment coefficients; requires `k > 0` (the density
/// normalization degenerates at `k = 0`, where the operator is the
/// identity anyway).
pub fn vk_1d_closed<S: Scalar>(k: &S, p: &Polynomial<S>) -> Result<Polynomial<S>> {
    if p.nvars() != 1 {
        return Err(DunklError::DimensionMismatch(
            "one-variable polynomial required".into(),
        ));
    }
    if !k.is_positive_val() {
        return Err(DunklError::InvalidArgument(
            "closed-form intertwiner requires k > 0".into(),
        ));
    }
    let mut out = Polynomial::zero(1);
    for (m, c) in p.terms() {
        let b = vk_1d_coeff_beta_sum(m.0[0], k);
        out.add_term(m.clone(), &c.mul_ref(&b));
    }
    Ok(out)
}

/// Per-axis multiplicities of a direct-product (sign-change) group: every
/// positive root must be parallel to a coordinate axis; an axis without a
/// root carries multiplicity zero.
pub fn z2n_axis_multiplicities<S: Scalar>(ctx: &DunklContext<S>) -> Result<Vec<S>> {
    let nv = ctx.nvars();
    let mut ks = vec![S::zero(); nv];
    let rs = ctx.root_system();
    for (i, root) in rs.positive_roots().iter().enumerate() {
        let axis = (0..nv).find(|&j| root.is_parallel_to(&Vector::unit(nv, j)));
        match axis {
            Some(j) => ks[j] = ctx.k_root(i).clone(),
            None => {
                return Err(DunklError::WrongGroup(
                    "direct-product closed form needs all roots on coordinate axes".into(),
                ))
            }
        }
    }
    Ok(ks)
}

/// Direct-product image coefficient: the product of rank-one coefficients
/// across coordinates, `prod_i b_(nu_i)(k_i)`.
pub fn vk_z2n_coeff<S: Scalar>(ks: &[S], nu: &Monomial) -> S {
    assert_eq!(ks.len(), nu.nvars(), "axis count mismatch");
    let mut acc = S::one();
    for (k_i, &e) in ks.iter().zip(&nu.0) {
        acc = acc.mul_ref(&vk_1d_coeff_beta_sum(e, k_i));
    }
    acc
}

// ---------------------------------------------------------------------------
// persistent table cache
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TableFile {
    format: String,
    nvars: usize,
    positive_roots: Vec<Vec<String>>,
    orbit_values: Vec<String>,
    order: usize,
    /// degree -> row-major matrix of rendered scalars
    matrices: Vec<Vec<Vec<String>>>,
}

const TABLE_FORMAT: &str = "vk-table.v1";

fn context_key<S: Scalar>(ctx: &DunklContext<S>) -> (Vec<Vec<String>>, Vec<String>) {
    let roots = ctx
        .root_system()
        .positive_roots()
        .iter()
        .map(|r| r.0.iter().map(|c| c.render()).collect())
        .collect();
    let ks = ctx
        .multiplicity()
        .orbit_values()
        .iter()
        .map(|v| v.render())
        .collect();
    (roots, ks)
}

/// Serialize a table to JSON with exactly rendered scalars (bit-exact
/// round trip in exact mode).
pub fn save_table<S: Scalar>(
    table: &IntertwinerTable<S>,
    ctx: &DunklContext<S>,
    path: &Path,
) -> Result<()> {
    let (positive_roots, orbit_values) = context_key(ctx);
    let matrices = table
        .matrices
        .iter()
        .map(|m| {
            (0..m.rows())
                .map(|i| m.row(i).iter().map(|c| c.render()).collect())
                .collect()
        })
        .collect();
    let file = TableFile {
        format: TABLE_FORMAT.to_string(),
        nvars: table.nvars,
        positive_roots,
        orbit_values,
        order: table.order,
        matrices,
    };
    let json = serde_json::to_string_pretty(&file)?;
    std::fs::write(path, json)?;
    Ok(())
}

/// Load a cached table, verifying it was built for the same root
/// representatives and multiplicities and covers the requested order.
pub fn load_table<S: Scalar>(
    ctx: &DunklContext<S>,
    order: usize,
    path: &Path,
) -> Result<IntertwinerTable<S>> {
    let text = std::fs::read_to_string(path)?;
    let file: TableFile = serde_json::from_str(&text)?;
    if file.format != TABLE_FORMAT {
        return Err(DunklError::CacheMismatch(format!(
            "format {:?}, expected {TABLE_FORMAT:?}",
            file.format
        )));
    }
    let (positive_roots, orbit_values) = context_key(ctx);
    if file.nvars != ctx.nvars() {
        return Err(DunklError::CacheMismatch("different dimension".into()));
    }
    if file.positive_roots != positive_roots {
        return Err(DunklError::CacheMismatch("different root system".into()));
    }
    if file.orbit_values != orbit_values {
        return Err(DunklError::CacheMismatch(
            "different multiplicity values".into(),
        ));
    }
    if file.order < order {
        return Err(DunklError::CacheMismatch(format!(
            "cached order {} < requested {order}",
            file.order
        )));
    }
    let mut matrices = Vec::with_capacity(order + 1);
    for (n, rows) in file.matrices.iter().enumerate().take(order + 1) {
        let dim = dim_homogeneous(ctx.nvars(), n);
        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return Err(DunklError::CacheMismatch(format!(
                "degree-{n} matrix is not {dim} x {dim}"
            )));
        }
        let mut m = Matrix::zero(dim, dim);
        for (i, row) in rows.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                m.set(i, j, S::parse(entry)?);
            }
        }
        matrices.push(m);
    }
    if matrices.len() != order + 1 {
        return Err(DunklError::CacheMismatch(
            "table shorter than its declared order".into(),
        ));
    }
    Ok(IntertwinerTable {
        nvars: ctx.nvars(),
        order,
        matrices,
    })
}
