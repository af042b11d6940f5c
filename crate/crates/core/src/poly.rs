//! Sparse multivariate polynomials over an exact (or float) scalar field.
//!
//! Terms are stored in a `BTreeMap` keyed by [`Monomial`] under the global
//! graded-lexicographic order (total degree first, then exponent vectors
//! compared left to right with `x1` heaviest). Iteration order is therefore
//! deterministic, leading terms are `last_key_value`, and every basis
//! enumeration in the workspace uses the same order.
//!
//! Key operations:
//! - ring arithmetic, scalar action, partial and directional derivatives
//! - exact division by a divisor that is known to divide (`divide_exact`);
//!   a nonzero remainder is reported as an internal invariant violation
//! - substitution of linear forms for the variables (group action on
//!   polynomials)
//! - text grammar `3/2*x1^2*x2 - x2^3 + 1` with exact round-tripping

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;

use crate::error::{DunklError, Result};
use crate::scalar::Scalar;

/// Exponent vector. `Monomial(vec![2, 0, 1])` is `x1^2*x3`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise quotient, `None` when not divisible.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        debug_assert_eq!(self.nvars(), other.nvars());
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        // graded lex: degree first, then exponent vectors left to right
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials in `nvars` variables of total degree exactly `d`,
/// in ascending graded-lex order.
pub fn monomials_of_degree(nvars: usize, d: usize) -> Vec<Monomial> {
    fn go(out: &mut Vec<Vec<u32>>, prefix: &mut Vec<u32>, vars_left: usize, deg_left: usize) {
        if vars_left == 1 {
            prefix.push(deg_left as u32);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in 0..=deg_left {
            prefix.push(e as u32);
            go(out, prefix, vars_left - 1, deg_left - e);
            prefix.pop();
        }
    }
    assert!(nvars >= 1);
    let mut raw = Vec::new();
    go(&mut raw, &mut Vec::new(), nvars, d);
    raw.into_iter().map(Monomial).collect()
}

/// All monomials of degree `<= n`, ascending graded-lex (degree-major).
pub fn monomials_up_to(nvars: usize, n: usize) -> Vec<Monomial> {
    (0..=n)
        .flat_map(|d| monomials_of_degree(nvars, d))
        .collect()
}

/// dim of the space of homogeneous degree-`d` polynomials in `nvars` variables.
pub fn dim_homogeneous(nvars: usize, d: usize) -> usize {
    // C(d + nvars - 1, nvars - 1)
    let mut num = 1usize;
    let mut den = 1usize;
    for i in 1..nvars {
        num *= d + i;
        den *= i;
    }
    num / den
}

/// dim of the space of polynomials of degree `<= n`.
pub fn dim_up_to(nvars: usize, n: usize) -> usize {
    (0..=n).map(|d| dim_homogeneous(nvars, d)).sum()
}

/// Dense coordinate vector in R^N (points, roots, directions).
#[derive(Clone, Debug, PartialEq)]
pub struct Vector<S>(pub Vec<S>);

impl<S: Scalar> Vector<S> {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn zero(n: usize) -> Self {
        Vector(vec![S::zero(); n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![S::zero(); n];
        v[i] = S::one();
        Vector(v)
    }

    pub fn from_i64s(xs: &[i64]) -> Self {
        Vector(xs.iter().map(|&x| S::from_i64(x)).collect())
    }

    pub fn dot(&self, other: &Self) -> S {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        let mut acc = S::zero();
        for (a, b) in self.0.iter().zip(&other.0) {
            acc.add_assign_ref(&a.mul_ref(b));
        }
        acc
    }

    pub fn norm_sq(&self) -> S {
        self.dot(self)
    }

    pub fn scale(&self, c: &S) -> Self {
        Vector(self.0.iter().map(|a| a.mul_ref(c)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.add_ref(b))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.sub_ref(b))
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        Vector(self.0.iter().map(|a| a.neg_ref()).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|a| a.is_zero())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|a| a.to_f64()).collect()
    }

    /// Euclidean norm, as f64 (exact scalars have irrational norms in general).
    pub fn norm_f64(&self) -> f64 {
        self.norm_sq().to_f64().sqrt()
    }

    /// True iff `other == c * self` for some scalar `c != 0`.
    pub fn is_parallel_to(&self, other: &Self) -> bool {
        assert_eq!(self.dim(), other.dim());
        // cross-ratio test: a_i * b_j == a_j * b_i for all i, j, plus shared support
        let n = self.dim();
        for i in 0..n {
            for j in (i + 1)..n {
                let lhs = self.0[i].mul_ref(&other.0[j]);
                let rhs = self.0[j].mul_ref(&other.0[i]);
                if !lhs.sub_ref(&rhs).is_negligible() {
                    return false;
                }
            }
        }
        // rule out e.g. (1,0) vs (0,1): supports must coincide on non-negligible entries
        self.0
            .iter()
            .zip(&other.0)
            .all(|(a, b)| a.is_negligible() == b.is_negligible())
    }
}

/// Sparse polynomial; invariant: no stored zero coefficients, every key has
/// length `nvars`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<S> {
    nvars: usize,
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: S) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        Self::from_monomial(Monomial::var(nvars, i), S::one())
    }

    pub fn from_monomial(m: Monomial, c: S) -> Self {
        let mut p = Self::zero(m.nvars());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn constant_term(&self) -> S {
        self.coeff(&Monomial::one(self.nvars))
    }

    /// Coefficient vector with respect to an explicit sorted monomial basis
    /// (as produced by [`monomials_of_degree`] / [`monomials_up_to`]).
    /// Errors if the polynomial is supported outside the basis.
    pub fn coeff_vector(&self, basis: &[Monomial]) -> Result<Vec<S>> {
        let mut out = vec![S::zero(); basis.len()];
        for (m, c) in &self.terms {
            match basis.binary_search(m) {
                Ok(idx) => out[idx] = c.clone(),
                Err(_) => {
                    return Err(DunklError::DimensionMismatch(format!(
                        "monomial of degree {} lies outside the given basis",
                        m.degree()
                    )))
                }
            }
        }
        Ok(out)
    }

    /// Inverse of [`Self::coeff_vector`] for the same basis.
    pub fn from_coeff_vector(nvars: usize, basis: &[Monomial], coeffs: &[S]) -> Self {
        assert_eq!(basis.len(), coeffs.len(), "basis/coefficient mismatch");
        let mut p = Self::zero(nvars);
        for (m, c) in basis.iter().zip(coeffs) {
            p.add_term(m.clone(), c);
        }
        p
    }

    /// Largest monomial in graded-lex order, with its coefficient.
    pub fn leading(&self) -> Option<(&Monomial, &S)> {
        self.terms.last_key_value()
    }

    pub fn total_degree(&self) -> Option<usize> {
        self.leading().map(|(m, _)| m.degree())
    }

    pub fn add_term(&mut self, m: Monomial, c: &S) {
        debug_assert_eq!(m.nvars(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                existing.add_assign_ref(c);
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "polynomial arity mismatch");
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "polynomial arity mismatch");
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), &c.neg_ref());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg_ref()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k.mul_ref(c)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "polynomial arity mismatch");
        let mut out = Self::zero(self.nvars);
        for (m1, c1) in self.terms() {
            for (m2, c2) in other.terms() {
                out.add_term(m1.mul(m2), &c1.mul_ref(c2));
            }
        }
        out
    }

    pub fn mul_term(&self, m: &Monomial, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m1, c1)| (m1.mul(m), c1.mul_ref(c)))
                .collect(),
        }
    }

    pub fn pow_u(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.nvars, S::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// d/dx_i
    pub fn derivative(&self, i: usize) -> Self {
        assert!(i < self.nvars);
        let mut out = Self::zero(self.nvars);
        for (m, c) in self.terms() {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut em = m.clone();
            em.0[i] -= 1;
            out.add_term(em, &c.mul_ref(&S::from_i64(e as i64)));
        }
        out
    }

    /// Directional derivative along `xi`.
    pub fn directional_derivative(&self, xi: &Vector<S>) -> Self {
        assert_eq!(xi.dim(), self.nvars, "direction dimension mismatch");
        let mut out = Self::zero(self.nvars);
        for (i, c) in xi.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out = out.add(&self.derivative(i).scale(c));
        }
        out
    }

    /// Split into homogeneous components, ascending degree (zero parts omitted).
    pub fn homogeneous_parts(&self) -> Vec<(usize, Polynomial<S>)> {
        let mut parts: BTreeMap<usize, Polynomial<S>> = BTreeMap::new();
        for (m, c) in self.terms() {
            parts
                .entry(m.degree())
                .or_insert_with(|| Self::zero(self.nvars))
                .add_term(m.clone(), c);
        }
        parts.into_iter().collect()
    }

    pub fn homogeneous_component(&self, d: usize) -> Polynomial<S> {
        let mut out = Self::zero(self.nvars);
        for (m, c) in self.terms() {
            if m.degree() == d {
                out.add_term(m.clone(), c);
            }
        }
        out
    }

    /// `Some(d)` when all terms share total degree `d`. Zero counts as
    /// homogeneous of every degree; reported as `Some(0)`.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut it = self.terms.keys();
        let d = match it.next() {
            None => return Some(0),
            Some(m) => m.degree(),
        };
        it.all(|m| m.degree() == d).then_some(d)
    }

    pub fn evaluate(&self, x: &[S]) -> S {
        assert_eq!(x.len(), self.nvars, "evaluation point dimension mismatch");
        let max_e: Vec<u32> = (0..self.nvars)
            .map(|i| self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0))
            .collect();
        let pows = power_table(x, &max_e);
        self.evaluate_with_powers(&pows)
    }

    /// Evaluate against a precomputed table `pows[i][e] = x_i^e`
    /// (see [`power_table`]); the fast path for grid scans.
    pub fn evaluate_with_powers(&self, pows: &[Vec<S>]) -> S {
        let mut acc = S::zero();
        for (m, c) in self.terms() {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.mul_ref(&pows[i][e as usize]);
                }
            }
            acc.add_assign_ref(&t);
        }
        acc
    }

    /// Substitute `x_i := <rows[i], x>`; `rows` must be `nvars` linear forms.
    /// This is how an invertible matrix acts: for the action
    /// `(g...p)(x) = p(g^-1 x)`, pass the rows of `g^-1`.
    pub fn substitute_linear(&self, rows: &[Vector<S>]) -> Polynomial<S> {
        assert_eq!(rows.len(), self.nvars, "need one linear form per variable");
        let forms: Vec<Polynomial<S>> = rows
            .iter()
            .map(|r| {
                assert_eq!(r.dim(), self.nvars);
                let mut f = Self::zero(self.nvars);
                for (j, c) in r.0.iter().enumerate() {
                    f.add_term(Monomial::var(self.nvars, j), c);
                }
                f
            })
            .collect();
        // cache powers of each form up to the max exponent used
        let max_e: Vec<u32> = (0..self.nvars)
            .map(|i| self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0))
            .collect();
        let form_pows: Vec<Vec<Polynomial<S>>> = forms
            .iter()
            .zip(&max_e)
            .map(|(f, &e)| {
                let mut pows = vec![Self::constant(self.nvars, S::one())];
                for k in 1..=e as usize {
                    pows.push(pows[k - 1].mul(f));
                }
                pows
            })
            .collect();
        let mut out = Self::zero(self.nvars);
        for (m, c) in self.terms() {
            let mut t = Self::constant(self.nvars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&form_pows[i][e as usize]);
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Exact division: returns `q` with `self == q * divisor`. Calling this
    /// with a non-divisor is a bug in the caller, reported as
    /// [`DunklError::RemainderNonzero`]. In float mode the remainder check is
    /// toleranced.
    pub fn divide_exact(&self, divisor: &Self) -> Result<Polynomial<S>> {
        assert_eq!(self.nvars, divisor.nvars, "polynomial arity mismatch");
        let (lead_m, lead_c) = divisor
            .leading()
            .ok_or_else(|| DunklError::InvalidArgument("division by zero polynomial".into()))?;
        let lead_m = lead_m.clone();
        let lead_c = lead_c.clone();
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((m, c)) = rem.leading() {
            let m = m.clone();
            let c = c.clone();
            let Some(qm) = m.div(&lead_m) else {
                // no further cancellation possible on the leading term
                break;
            };
            let qc = c.div_ref(&lead_c);
            if qc.is_zero() {
                // float-mode underflow guard; the dust lands in the remainder
                break;
            }
            quot.add_term(qm.clone(), &qc);
            rem = rem.sub(&divisor.mul_term(&qm, &qc));
            // the leading term cancels by construction; in float mode drop the
            // rounding dust so the leading monomial strictly decreases
            rem.terms.remove(&m);
        }
        let residual_ok = rem.terms.values().all(|c| c.is_negligible());
        if !residual_ok {
            return Err(DunklError::RemainderNonzero(rem.to_string()));
        }
        Ok(quot)
    }

    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Polynomial<T> {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in self.terms() {
            out.add_term(m.clone(), &f(c));
        }
        out
    }

    pub fn to_f64_poly(&self) -> Polynomial<f64> {
        self.map_scalars(|c| c.to_f64())
    }

    /// Maximum absolute coefficient, as f64 (coefficient-norm for reports).
    pub fn max_abs_coeff_f64(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute coefficient as a scalar (exact in exact mode).
    pub fn max_abs_coeff(&self) -> S {
        let mut best = S::zero();
        for c in self.terms.values() {
            let a = c.abs();
            if best.partial_cmp(&a) == Some(Ordering::Less) {
                best = a;
            }
        }
        best
    }
}

/// `pows[i][e] = x_i^e` for `e <= max_e[i]`.
pub fn power_table<S: Scalar>(x: &[S], max_e: &[u32]) -> Vec<Vec<S>> {
    x.iter()
        .zip(max_e)
        .map(|(xi, &e)| {
            let mut pows = vec![S::one()];
            for k in 1..=e as usize {
                pows.push(pows[k - 1].mul_ref(xi));
            }
            pows
        })
        .collect()
}

// ---------------------------------------------------------------------------
// text grammar
// ---------------------------------------------------------------------------

/// Parse `3/2*x1^2*x2 - x2^3 + 1`. Variables are `x1..xN`; coefficients are
/// integers, fractions, or decimals. Whitespace is insignificant.
pub fn parse_polynomial<S: Scalar>(src: &str, nvars: usize) -> Result<Polynomial<S>> {
    let toks = tokenize(src)?;
    let mut pos = 0usize;
    let mut poly = Polynomial::zero(nvars);
    if toks.is_empty() {
        return Err(DunklError::Parse("empty polynomial".into()));
    }
    let mut first = true;
    while pos < toks.len() {
        // sign
        let mut negate = false;
        match &toks[pos] {
            Tok::Plus => {
                pos += 1;
            }
            Tok::Minus => {
                negate = true;
                pos += 1;
            }
            _ if first => {}
            t => {
                return Err(DunklError::Parse(format!(
                    "expected '+' or '-' between terms, found {t:?}"
                )))
            }
        }
        first = false;
        // term: factor (* factor)*
        let mut coeff = S::one();
        let mut mono = Monomial::one(nvars);
        let mut saw_factor = false;
        loop {
            match toks.get(pos) {
                Some(Tok::Number(s)) => {
                    coeff = coeff.mul_ref(&S::parse(s)?);
                    pos += 1;
                }
                Some(Tok::Var(idx)) => {
                    let i = *idx;
                    if i == 0 || i > nvars {
                        return Err(DunklError::Parse(format!(
                            "variable x{i} out of range (expected x1..x{nvars})"
                        )));
                    }
                    let mut e: u32 = 1;
                    if let Some(Tok::Caret) = toks.get(pos + 1) {
                        match toks.get(pos + 2) {
                            Some(Tok::Number(s)) => {
                                e = s.parse::<u32>().map_err(|_| {
                                    DunklError::Parse(format!("bad exponent {s:?}"))
                                })?;
                                pos += 2;
                            }
                            other => {
                                return Err(DunklError::Parse(format!(
                                    "expected integer exponent after '^', found {other:?}"
                                )))
                            }
                        }
                    }
                    mono.0[i - 1] += e;
                    pos += 1;
                }
                other => {
                    if saw_factor {
                        break;
                    }
                    return Err(DunklError::Parse(format!(
                        "expected a coefficient or variable, found {other:?}"
                    )));
                }
            }
            saw_factor = true;
            if let Some(Tok::Star) = toks.get(pos) {
                pos += 1;
                continue;
            }
            break;
        }
        if negate {
            coeff = coeff.neg_ref();
        }
        poly.add_term(mono, &coeff);
    }
    Ok(poly)
}

#[derive(Debug, PartialEq)]
enum Tok {
    Number(String),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                toks.push(Tok::Plus);
                i += 1;
            }
            b'-' => {
                toks.push(Tok::Minus);
                i += 1;
            }
            b'*' => {
                toks.push(Tok::Star);
                i += 1;
            }
            b'^' => {
                toks.push(Tok::Caret);
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_digit()
                        || bytes[i] == b'.'
                        || bytes[i] == b'/'
                        || (bytes[i] == b'e' || bytes[i] == b'E')
                            && i + 1 < bytes.len()
                            && (bytes[i + 1].is_ascii_digit()
                                || bytes[i + 1] == b'-'
                                || bytes[i + 1] == b'+')
                        || (bytes[i] == b'-' || bytes[i] == b'+')
                            && i > start
                            && (bytes[i - 1] == b'e' || bytes[i - 1] == b'E'))
                {
                    i += 1;
                }
                toks.push(Tok::Number(src[start..i].to_string()));
            }
            b'x' => {
                let start = i + 1;
                let mut j = start;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j == start {
                    return Err(DunklError::Parse(format!(
                        "bad variable at byte {i} in {src:?}"
                    )));
                }
                let idx: usize = src[start..j]
                    .parse()
                    .map_err(|_| DunklError::Parse(format!("bad variable index in {src:?}")))?;
                toks.push(Tok::Var(idx));
                i = j;
            }
            _ => {
                return Err(DunklError::Parse(format!(
                    "unexpected character {:?} at byte {i} in {src:?}",
                    b as char
                )))
            }
        }
    }
    Ok(toks)
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return write!(f, "1");
        }
        let mut wrote = false;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if wrote {
                write!(f, "*")?;
            }
            wrote = true;
            write!(f, "x{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Display for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // descending graded-lex, conventional reading order
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative_val();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let is_one = mag == S::one();
            let mut wrote = false;
            if !is_one || m.is_constant() {
                write!(f, "{}", mag.render())?;
                wrote = true;
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if wrote {
                    write!(f, "*")?;
                }
                wrote = true;
                write!(f, "x{}", i + 1)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// sampling estimate of the graded sup-norm
// ---------------------------------------------------------------------------

/// Lower estimate of `sum_n sup_{|x| <= r} |p_n(x)|` over the homogeneous
/// parts `p_n`, by sampling directions on the unit sphere (the sup of a
/// homogeneous part over the ball sits on the boundary sphere, so every
/// sample is evaluated at radius `r`). Deterministic, and monotone
/// nondecreasing in `samples` because the direction sequence is nested.
pub fn ar_norm_estimate<S: Scalar>(p: &Polynomial<S>, r: f64, samples: usize) -> f64 {
    assert!(r > 0.0, "radius must be positive");
    assert!(samples >= 1, "need at least one sample");
    let parts: Vec<(usize, Polynomial<f64>)> = p
        .homogeneous_parts()
        .into_iter()
        .map(|(d, q)| (d, q.to_f64_poly()))
        .collect();
    if parts.is_empty() {
        return 0.0;
    }
    let n = p.nvars();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x9e3779b97f4a7c15);
    let mut maxima = vec![0.0f64; parts.len()];
    for _ in 0..samples {
        // one Gaussian per coordinate via Box-Muller, fixed draw count per sample
        let mut u = vec![0.0f64; n];
        loop {
            for ui in u.iter_mut() {
                let a: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                let b: f64 = rng.gen_range(0.0..1.0);
                *ui = (-2.0 * a.ln()).sqrt() * (2.0 * std::f64::consts::PI * b).cos();
            }
            let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1e-8 {
                for ui in u.iter_mut() {
                    *ui *= r / norm;
                }
                break;
            }
        }
        for (slot, (_, q)) in maxima.iter_mut().zip(&parts) {
            let v = q.evaluate(&u).abs();
            if v > *slot {
                *slot = v;
            }
        }
    }
    maxima.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    type P = Polynomial<Rat>;

    fn parse(s: &str, n: usize) -> P {
        parse_polynomial(s, n).unwrap()
    }

    #[test]
    fn grlex_order_and_leading_term() {
        // within a degree, x1-major: x2^2 < x1*x2 < x1^2
        let m = |v: &[u32]| Monomial(v.to_vec());
        assert!(m(&[0, 2]) < m(&[1, 1]));
        assert!(m(&[1, 1]) < m(&[2, 0]));
        // degree dominates
        assert!(m(&[2, 0]) < m(&[0, 3]));
        let p = parse("x1*x2 + x2^2 + x1^3", 2);
        assert_eq!(p.leading().unwrap().0, &m(&[3, 0]));
        assert_eq!(p.total_degree(), Some(3));
    }

    #[test]
    fn basis_enumeration_matches_order_and_dims() {
        let b = monomials_of_degree(3, 2);
        assert_eq!(b.len(), dim_homogeneous(3, 2));
        assert_eq!(b.len(), 6);
        let mut sorted = b.clone();
        sorted.sort();
        assert_eq!(b, sorted, "enumeration must be ascending graded-lex");
        assert_eq!(monomials_up_to(2, 3).len(), dim_up_to(2, 3));
        assert_eq!(dim_up_to(2, 3), 10);
        assert_eq!(dim_homogeneous(3, 6), 28);
        assert_eq!(dim_up_to(3, 6), 84);
        assert_eq!(dim_homogeneous(1, 5), 1);
    }

    #[test]
    fn parse_print_round_trip_examples() {
        for (src, n) in [
            ("3/2*x1^2*x2 - x2^3 + 1", 2),
            ("x1", 1),
            ("0", 1),
            ("-x1 + 1/3", 1),
            ("7", 3),
            ("x1^2*x2^3*x3 - 2/5*x3^4", 3),
        ] {
            let p = parse(src, n);
            let printed = p.to_string();
            let q = parse(&printed, n);
            assert_eq!(p, q, "round trip failed for {src:?} -> {printed:?}");
        }
        // canonical ordering: grlex terms, constant last
        let p = parse("1 + 3/2*x2*x1^2 - x2^3", 2);
        assert_eq!(p.to_string(), "3/2*x1^2*x2 - x2^3 + 1");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_polynomial::<Rat>("x3", 2).is_err());
        assert!(parse_polynomial::<Rat>("x0", 2).is_err());
        assert!(parse_polynomial::<Rat>("1 +", 2).is_err());
        assert!(parse_polynomial::<Rat>("y1", 2).is_err());
        assert!(parse_polynomial::<Rat>("", 2).is_err());
        assert!(parse_polynomial::<Rat>("x1^x1", 2).is_err());
    }

    #[test]
    fn ring_arithmetic_small_cases() {
        let p = parse("x1 + x2", 2);
        let q = parse("x1 - x2", 2);
        assert_eq!(p.mul(&q), parse("x1^2 - x2^2", 2));
        assert_eq!(p.pow_u(2), parse("x1^2 + 2*x1*x2 + x2^2", 2));
        assert_eq!(p.sub(&p), P::zero(2));
        let r = parse("1/2*x1^2", 2);
        assert_eq!(r.scale(&Rat::from_i64(4)), parse("2*x1^2", 2));
    }

    #[test]
    fn derivative_and_direction() {
        let p = parse("x1^3*x2 + x2^2", 2);
        assert_eq!(p.derivative(0), parse("3*x1^2*x2", 2));
        assert_eq!(p.derivative(1), parse("x1^3 + 2*x2", 2));
        let xi = Vector::from_i64s(&[1, -2]);
        assert_eq!(
            p.directional_derivative(&xi),
            parse("3*x1^2*x2 - 2*x1^3 - 4*x2", 2)
        );
        // constants die
        assert_eq!(parse("5", 2).derivative(0), P::zero(2));
    }

    #[test]
    fn homogeneous_parts_and_evaluation() {
        let p = parse("x1^2 + x1 + 3", 1);
        let parts = p.homogeneous_parts();
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[0].1, parse("3", 1));
        assert_eq!(parts[2].1, parse("x1^2", 1));
        assert_eq!(p.homogeneous_degree(), None);
        assert_eq!(parse("x1*x2", 2).homogeneous_degree(), Some(2));
        // evaluate at rational points, exactly
        let v = p.evaluate(&[Rat::from_ratio(1, 2)]);
        assert_eq!(v, Rat::from_ratio(15, 4));
        // homogeneity: f(r x) = r^n f(x) for the degree-2 part
        let f2 = parts[2].1.clone();
        let x = [Rat::from_ratio(3, 7)];
        let r = Rat::from_ratio(5, 2);
        let lhs = f2.evaluate(&[r.mul_ref(&x[0])]);
        let rhs = r.pow_u(2).mul_ref(&f2.evaluate(&x));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitution_by_linear_forms() {
        // p(x1, x2) = x1^2; substitute x1 := x2, x2 := x1 (swap)
        let p = parse("x1^2 + x2", 2);
        let rows = vec![Vector::from_i64s(&[0, 1]), Vector::from_i64s(&[1, 0])];
        assert_eq!(p.substitute_linear(&rows), parse("x2^2 + x1", 2));
        // rotation-like integer substitution x1 := x1 + x2
        let rows = vec![Vector::from_i64s(&[1, 1]), Vector::from_i64s(&[0, 1])];
        assert_eq!(
            parse("x1^2", 2).substitute_linear(&rows),
            parse("x1^2 + 2*x1*x2 + x2^2", 2)
        );
    }

    #[test]
    fn exact_division_by_linear_forms() {
        // (x1^2 - x2^2) / (x1 - x2) = x1 + x2
        let p = parse("x1^2 - x2^2", 2);
        let d = parse("x1 - x2", 2);
        assert_eq!(p.divide_exact(&d).unwrap(), parse("x1 + x2", 2));
        // divisible by the square as well: (x1 - x2)^2 * (x1 + 2) edge
        let q = d.pow_u(2).mul(&parse("x1 + 2", 2));
        assert_eq!(q.divide_exact(&d.pow_u(2)).unwrap(), parse("x1 + 2", 2));
        // non-divisible input is an internal error
        let bad = parse("x1^2 + x2", 2).divide_exact(&d);
        assert!(matches!(bad, Err(DunklError::RemainderNonzero(_))));
    }

    #[test]
    fn ar_norm_estimate_examples() {
        // 1D: the unit sphere is {-1, +1}, so the estimate is exact quickly
        let p = parse("x1 + x1^2", 1);
        let est = ar_norm_estimate(&p, 1.0, 8);
        assert!((est - 2.0).abs() < 1e-12, "got {est}");
        // constants: |c| exactly
        let c = parse("-7/2", 2);
        assert!((ar_norm_estimate(&c, 3.0, 1) - 3.5).abs() < 1e-12);
        // 2D linear part approaches sup = r as samples grow, from below
        let q = parse("x1", 2);
        let lo = ar_norm_estimate(&q, 1.0, 50);
        let hi = ar_norm_estimate(&q, 1.0, 20000);
        assert!(lo <= hi + 1e-15, "monotone in samples");
        assert!(hi <= 1.0 + 1e-12, "lower bound on the true sup");
        assert!(hi > 0.999, "dense sampling approaches the sup, got {hi}");
        // scaling in r for the homogeneous part x1^2 (sup = r^2)
        let s = parse("x1^2", 2);
        let e2 = ar_norm_estimate(&s, 2.0, 20000);
        assert!((e2 - 4.0).abs() < 0.01, "got {e2}");
    }

    #[test]
    fn vector_parallel_test() {
        let a: Vector<Rat> = Vector::from_i64s(&[2, -4, 0]);
        let b: Vector<Rat> = Vector::from_i64s(&[-1, 2, 0]);
        let c: Vector<Rat> = Vector::from_i64s(&[2, -4, 1]);
        let e1: Vector<Rat> = Vector::from_i64s(&[1, 0, 0]);
        let e2: Vector<Rat> = Vector::from_i64s(&[0, 1, 0]);
        assert!(a.is_parallel_to(&b));
        assert!(!a.is_parallel_to(&c));
        assert!(!e1.is_parallel_to(&e2));
    }
}
