//! Finite reflection groups: root-system validation, orbit structure,
//! group generation by closure, standard presets, and multiplicity
//! functions constant on orbits.
//!
//! Roots are stored with arbitrary (rational or float) scale; every
//! consumer in this crate is written to be invariant under rescaling a
//! root, so no normalization step is needed or wanted — normalizing
//! `e1 - e2` to length sqrt(2)/|..| would leave the rationals.

use std::collections::BTreeMap;

use crate::error::{DunklError, Result};
use crate::linalg::Matrix;
use crate::poly::Vector;
use crate::scalar::Scalar;

/// Reflection matrix through the hyperplane orthogonal to `alpha`:
/// `I - 2 alpha alpha^T / <alpha, alpha>`. Scale-invariant in `alpha`.
pub fn reflection_matrix<S: Scalar>(alpha: &Vector<S>) -> Matrix<S> {
    let n = alpha.dim();
    let norm_sq = alpha.norm_sq();
    assert!(!norm_sq.is_zero(), "zero root");
    let two = S::from_i64(2);
    let mut m: Matrix<S> = Matrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            let delta = two
                .mul_ref(&alpha.0[i])
                .mul_ref(&alpha.0[j])
                .div_ref(&norm_sq);
            let v = m.get(i, j).sub_ref(&delta);
            m.set(i, j, v);
        }
    }
    m
}

/// A reduced root system given by one representative per positive root,
/// together with its orbit partition under the generated group.
#[derive(Clone, Debug)]
pub struct RootSystem<S> {
    nvars: usize,
    positive_roots: Vec<Vector<S>>,
    reflections: Vec<Matrix<S>>,
    orbits: Vec<Vec<usize>>,
    root_to_orbit: Vec<usize>,
}

impl<S: Scalar> RootSystem<S> {
    /// Validate and build: all roots nonzero of dimension `nvars`, no two
    /// parallel, and each reflection permutes the root lines. Orbits are
    /// computed during the closure check and indexed in first-appearance
    /// order of their smallest root index.
    pub fn new(nvars: usize, positive_roots: Vec<Vector<S>>) -> Result<Self> {
        for (i, r) in positive_roots.iter().enumerate() {
            if r.dim() != nvars {
                return Err(DunklError::DimensionMismatch(format!(
                    "root {i} has dimension {} but the system is in {nvars} variables",
                    r.dim()
                )));
            }
            if r.is_zero() {
                return Err(DunklError::InvalidRootSystem(format!("root {i} is zero")));
            }
        }
        for i in 0..positive_roots.len() {
            for j in (i + 1)..positive_roots.len() {
                if positive_roots[i].is_parallel_to(&positive_roots[j]) {
                    return Err(DunklError::InvalidRootSystem(format!(
                        "roots {i} and {j} are parallel; keep one representative per line"
                    )));
                }
            }
        }
        let reflections: Vec<Matrix<S>> = positive_roots.iter().map(reflection_matrix).collect();

        // closure check + orbit BFS in one pass
        let m = positive_roots.len();
        let find_line = |v: &Vector<S>| -> Option<usize> {
            positive_roots.iter().position(|r| r.is_parallel_to(v))
        };
        let mut root_to_orbit = vec![usize::MAX; m];
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        for start in 0..m {
            if root_to_orbit[start] != usize::MAX {
                continue;
            }
            let orbit_idx = orbits.len();
            let mut orbit = vec![start];
            root_to_orbit[start] = orbit_idx;
            let mut queue = vec![start];
            while let Some(i) = queue.pop() {
                for refl in &reflections {
                    let image = refl.matvec_vector(&positive_roots[i]);
                    let Some(j) = find_line(&image) else {
                        return Err(DunklError::InvalidRootSystem(format!(
                            "system is not closed: a reflection maps root {i} outside the root lines"
                        )));
                    };
                    if root_to_orbit[j] == usize::MAX {
                        root_to_orbit[j] = orbit_idx;
                        orbit.push(j);
                        queue.push(j);
                    } else if root_to_orbit[j] != orbit_idx {
                        // BFS from unvisited starts only; cross-links are impossible
                        unreachable!("orbit bookkeeping corrupted");
                    }
                }
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }

        Ok(RootSystem {
            nvars,
            positive_roots,
            reflections,
            orbits,
            root_to_orbit,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn positive_roots(&self) -> &[Vector<S>] {
        &self.positive_roots
    }

    pub fn num_positive_roots(&self) -> usize {
        self.positive_roots.len()
    }

    /// Reflection matrix of positive root `i`.
    pub fn reflection(&self, i: usize) -> &Matrix<S> {
        &self.reflections[i]
    }

    pub fn reflections(&self) -> &[Matrix<S>] {
        &self.reflections
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn num_orbits(&self) -> usize {
        self.orbits.len()
    }

    pub fn orbit_of_root(&self, root_idx: usize) -> usize {
        self.root_to_orbit[root_idx]
    }
}

/// The finite group generated by the root reflections, with the identity
/// first. Element order past the identity is the deterministic BFS
/// discovery order.
#[derive(Clone, Debug)]
pub struct ReflectionGroup<S> {
    root_system: RootSystem<S>,
    elements: Vec<Matrix<S>>,
}

/// Wrapper giving matrices the total order needed for exact-mode dedup.
struct MatrixKey<S>(Matrix<S>);

impl<S: Scalar> PartialEq for MatrixKey<S> {
    fn eq(&self, other: &Self) -> bool {
        self.0.key_cmp(&other.0) == std::cmp::Ordering::Equal
    }
}
impl<S: Scalar> Eq for MatrixKey<S> {}
impl<S: Scalar> PartialOrd for MatrixKey<S> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<S: Scalar> Ord for MatrixKey<S> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.key_cmp(&other.0)
    }
}

impl<S: Scalar> ReflectionGroup<S> {
    /// Generate the full group by breadth-first closure of the reflections.
    ///
    /// Exact mode dedups through an ordered map; float mode falls back to a
    /// linear scan with the mode tolerance (float groups here are small, and
    /// rounding dust would scatter map keys).
    pub fn build(root_system: RootSystem<S>) -> Result<Self> {
        let n = root_system.nvars();
        let bound = if S::IS_EXACT { 1_000_000 } else { 4096 };
        let gens = root_system.reflections().to_vec();
        let mut elements: Vec<Matrix<S>> = vec![Matrix::identity(n)];
        let mut seen: BTreeMap<MatrixKey<S>, ()> = BTreeMap::new();
        if S::IS_EXACT {
            seen.insert(MatrixKey(elements[0].clone()), ());
        }
        let mut frontier = 0usize;
        while frontier < elements.len() {
            let current = elements[frontier].clone();
            frontier += 1;
            for g in &gens {
                let next = g.mul(&current);
                let is_new = if S::IS_EXACT {
                    !seen.contains_key(&MatrixKey(next.clone()))
                } else {
                    !elements.iter().any(|e| e.approx_eq(&next))
                };
                if is_new {
                    if S::IS_EXACT {
                        seen.insert(MatrixKey(next.clone()), ());
                    }
                    elements.push(next);
                    if elements.len() > bound {
                        return Err(DunklError::ClosureBound(bound));
                    }
                }
            }
        }
        Ok(ReflectionGroup {
            root_system,
            elements,
        })
    }

    pub fn root_system(&self) -> &RootSystem<S> {
        &self.root_system
    }

    pub fn elements(&self) -> &[Matrix<S>] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn nvars(&self) -> usize {
        self.root_system.nvars()
    }

    pub fn contains(&self, g: &Matrix<S>) -> bool {
        self.elements.iter().any(|e| e.approx_eq(g))
    }

    /// Set equality of two groups on the same space (mode tolerance).
    pub fn same_elements(&self, other: &Self) -> bool {
        self.order() == other.order() && other.elements.iter().all(|g| self.contains(g))
    }
}

/// Multiplicity function: one value per root orbit, required nonnegative.
#[derive(Clone, Debug)]
pub struct MultiplicityFunction<S> {
    orbit_values: Vec<S>,
}

impl<S: Scalar> MultiplicityFunction<S> {
    pub fn new(root_system: &RootSystem<S>, orbit_values: Vec<S>) -> Result<Self> {
        if orbit_values.len() != root_system.num_orbits() {
            return Err(DunklError::InvalidMultiplicity(format!(
                "got {} orbit values for {} orbits",
                orbit_values.len(),
                root_system.num_orbits()
            )));
        }
        for (i, v) in orbit_values.iter().enumerate() {
            if v.is_negative_val() {
                return Err(DunklError::InvalidMultiplicity(format!(
                    "orbit {i} has negative multiplicity {v}"
                )));
            }
        }
        Ok(MultiplicityFunction { orbit_values })
    }

    /// The same value on every orbit.
    pub fn uniform(root_system: &RootSystem<S>, k: S) -> Result<Self> {
        Self::new(root_system, vec![k; root_system.num_orbits()])
    }

    /// Bypass the nonnegativity validation (the orbit count must still
    /// match). The positivity theory needs k >= 0, but the intertwiner
    /// builder accepts arbitrary rational multiplicities and detects the
    /// singular ones honestly; this constructor exists to exercise that
    /// failure path.
    pub fn new_unchecked(root_system: &RootSystem<S>, orbit_values: Vec<S>) -> Result<Self> {
        if orbit_values.len() != root_system.num_orbits() {
            return Err(DunklError::InvalidMultiplicity(format!(
                "got {} orbit values for {} orbits",
                orbit_values.len(),
                root_system.num_orbits()
            )));
        }
        Ok(MultiplicityFunction { orbit_values })
    }

    pub fn orbit_values(&self) -> &[S] {
        &self.orbit_values
    }

    pub fn value_on_orbit(&self, orbit: usize) -> &S {
        &self.orbit_values[orbit]
    }

    pub fn value_on_root(&self, root_system: &RootSystem<S>, root_idx: usize) -> &S {
        &self.orbit_values[root_system.orbit_of_root(root_idx)]
    }

    /// Sum of the multiplicity over all positive roots.
    pub fn total(&self, root_system: &RootSystem<S>) -> S {
        let mut acc = S::zero();
        for i in 0..root_system.num_positive_roots() {
            acc.add_assign_ref(self.value_on_root(root_system, i));
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.orbit_values.iter().all(|v| v.is_zero())
    }

    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> MultiplicityFunction<T> {
        MultiplicityFunction {
            orbit_values: self.orbit_values.iter().map(&f).collect(),
        }
    }
}

/// Named families of root systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupPreset {
    /// Sign changes of each coordinate: positive roots `e_1, ..., e_n`.
    Z2 { n: usize },
    /// Symmetric group on `n` coordinates: roots `e_i - e_j`, `i < j`.
    A { n: usize },
    /// Hyperoctahedral: roots `e_i` and `e_i +- e_j`.
    B { n: usize },
    /// Even hyperoctahedral: roots `e_i +- e_j` only.
    D { n: usize },
    /// Dihedral group of order `2m` on the plane. `m` in {2, 4} is realized
    /// over the rationals in dimension 2, `m` in {3, 6} over the rationals
    /// in dimension 3; every other `m` needs float scalars.
    I2 { m: usize },
}

impl GroupPreset {
    /// Ambient dimension of the realization this crate uses.
    pub fn nvars(&self) -> usize {
        match *self {
            GroupPreset::Z2 { n }
            | GroupPreset::A { n }
            | GroupPreset::B { n }
            | GroupPreset::D { n } => n,
            GroupPreset::I2 { m } => {
                if m == 3 || m == 6 {
                    3
                } else {
                    2
                }
            }
        }
    }

    /// Positive-root representatives of the preset.
    pub fn positive_roots<S: Scalar>(&self) -> Result<Vec<Vector<S>>> {
        let e = |n: usize, i: usize| Vector::<S>::unit(n, i);
        match *self {
            GroupPreset::Z2 { n } => {
                require(n >= 1, "Z2 preset needs n >= 1")?;
                Ok((0..n).map(|i| e(n, i)).collect())
            }
            GroupPreset::A { n } => {
                require(n >= 2, "A preset needs n >= 2 coordinates")?;
                let mut roots = Vec::new();
                for i in 0..n {
                    for j in (i + 1)..n {
                        roots.push(e(n, i).sub(&e(n, j)));
                    }
                }
                Ok(roots)
            }
            GroupPreset::B { n } => {
                require(n >= 2, "B preset needs n >= 2")?;
                let mut roots: Vec<Vector<S>> = (0..n).map(|i| e(n, i)).collect();
                for i in 0..n {
                    for j in (i + 1)..n {
                        roots.push(e(n, i).sub(&e(n, j)));
                        roots.push(e(n, i).add(&e(n, j)));
                    }
                }
                Ok(roots)
            }
            GroupPreset::D { n } => {
                require(n >= 2, "D preset needs n >= 2")?;
                let mut roots = Vec::new();
                for i in 0..n {
                    for j in (i + 1)..n {
                        roots.push(e(n, i).sub(&e(n, j)));
                        roots.push(e(n, i).add(&e(n, j)));
                    }
                }
                Ok(roots)
            }
            GroupPreset::I2 { m } => dihedral_roots(m),
        }
    }

    /// Build the validated root system.
    pub fn root_system<S: Scalar>(&self) -> Result<RootSystem<S>> {
        RootSystem::new(self.nvars(), self.positive_roots()?)
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(DunklError::InvalidArgument(msg.to_string()))
    }
}

fn dihedral_roots<S: Scalar>(m: usize) -> Result<Vec<Vector<S>>> {
    require(m >= 2, "I2 preset needs m >= 2")?;
    match m {
        2 => GroupPreset::Z2 { n: 2 }.positive_roots(),
        4 => GroupPreset::B { n: 2 }.positive_roots(),
        3 => GroupPreset::A { n: 3 }.positive_roots(),
        6 => {
            // hexagonal system inside the plane x1+x2+x3 = const of R^3:
            // the three short roots of the triangular system plus the three
            // long ones obtained as differences of short-root reflections.
            Ok(vec![
                Vector::from_i64s(&[1, -1, 0]),
                Vector::from_i64s(&[0, 1, -1]),
                Vector::from_i64s(&[1, 0, -1]),
                Vector::from_i64s(&[2, -1, -1]),
                Vector::from_i64s(&[1, -2, 1]),
                Vector::from_i64s(&[1, 1, -2]),
            ])
        }
        _ => {
            // reflection lines at angles j*pi/m; normals need trigonometry
            let mut roots = Vec::with_capacity(m);
            for j in 0..m {
                let theta = (j as f64) * std::f64::consts::PI / (m as f64);
                let (s, c) = theta.sin_cos();
                let sx = S::from_f64(s);
                let cy = S::from_f64(-c);
                match (sx, cy) {
                    (Some(a), Some(b)) => roots.push(Vector(vec![a, b])),
                    _ => {
                        return Err(DunklError::FloatModeRequired(format!(
                            "dihedral preset with m = {m} has no rational realization; \
                             use m in {{2, 3, 4, 6}} or float mode"
                        )))
                    }
                }
            }
            Ok(roots)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    fn group(preset: GroupPreset) -> ReflectionGroup<Rat> {
        ReflectionGroup::build(preset.root_system::<Rat>().unwrap()).unwrap()
    }

    #[test]
    fn sign_change_group() {
        let g = group(GroupPreset::Z2 { n: 3 });
        assert_eq!(g.order(), 8);
        assert_eq!(g.root_system().num_positive_roots(), 3);
        assert_eq!(g.root_system().num_orbits(), 3);
        // every element is a diagonal +-1 matrix
        for m in g.elements() {
            for i in 0..3 {
                for j in 0..3 {
                    let v = m.get(i, j);
                    if i == j {
                        assert!(v.abs() == Rat::one());
                    } else {
                        assert!(v.is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn symmetric_group_on_three_coordinates() {
        let g = group(GroupPreset::A { n: 3 });
        assert_eq!(g.order(), 6);
        assert_eq!(g.root_system().num_orbits(), 1);
        // every element is a permutation matrix
        for m in g.elements() {
            for i in 0..3 {
                let ones = (0..3).filter(|&j| *m.get(i, j) == Rat::one()).count();
                let zeros = (0..3).filter(|&j| m.get(i, j).is_zero()).count();
                assert_eq!((ones, zeros), (1, 2));
            }
        }
    }

    #[test]
    fn hyperoctahedral_groups() {
        let b2 = group(GroupPreset::B { n: 2 });
        assert_eq!(b2.order(), 8);
        assert_eq!(b2.root_system().num_positive_roots(), 4);
        assert_eq!(b2.root_system().num_orbits(), 2);
        // orbit 0 holds the coordinate roots e_1, e_2 (listed first)
        assert_eq!(b2.root_system().orbits()[0], vec![0, 1]);
        assert_eq!(b2.root_system().orbits()[1], vec![2, 3]);

        let b3 = group(GroupPreset::B { n: 3 });
        assert_eq!(b3.root_system().num_positive_roots(), 9);
        assert_eq!(b3.root_system().num_orbits(), 2);
        assert_eq!(b3.order(), 48);

        let d2 = group(GroupPreset::D { n: 2 });
        assert_eq!(d2.order(), 4);
        assert_eq!(d2.root_system().num_orbits(), 2); // A1 x A1

        let d3 = group(GroupPreset::D { n: 3 });
        assert_eq!(d3.order(), 24);
        assert_eq!(d3.root_system().num_orbits(), 1);
    }

    #[test]
    fn dihedral_rational_realizations() {
        let i2_4 = group(GroupPreset::I2 { m: 4 });
        let b2 = group(GroupPreset::B { n: 2 });
        assert!(i2_4.same_elements(&b2));

        let i2_3 = group(GroupPreset::I2 { m: 3 });
        let a3 = group(GroupPreset::A { n: 3 });
        assert_eq!(i2_3.order(), 6);
        assert!(i2_3.same_elements(&a3));

        let i2_6 = group(GroupPreset::I2 { m: 6 });
        assert_eq!(i2_6.order(), 12);
        assert_eq!(i2_6.root_system().num_positive_roots(), 6);
        assert_eq!(i2_6.root_system().num_orbits(), 2);
    }

    #[test]
    fn dihedral_float_realizations() {
        for m in [2usize, 3, 4, 5, 6, 7, 12] {
            let rs = GroupPreset::I2 { m }.root_system::<f64>().unwrap();
            let g = ReflectionGroup::build(rs).unwrap();
            assert_eq!(g.order(), 2 * m, "dihedral order for m = {m}");
            let expected_orbits = if m % 2 == 0 { 2 } else { 1 };
            assert_eq!(g.root_system().num_orbits(), expected_orbits, "m = {m}");
        }
        // no rational realization outside {2, 3, 4, 6}
        assert!(matches!(
            GroupPreset::I2 { m: 5 }.root_system::<Rat>(),
            Err(DunklError::FloatModeRequired(_))
        ));
    }

    #[test]
    fn invalid_systems_are_rejected() {
        // parallel representatives
        let r = RootSystem::<Rat>::new(
            2,
            vec![Vector::from_i64s(&[1, 0]), Vector::from_i64s(&[2, 0])],
        );
        assert!(matches!(r, Err(DunklError::InvalidRootSystem(_))));
        // not closed under its own reflections
        let r = RootSystem::<Rat>::new(
            2,
            vec![Vector::from_i64s(&[1, 0]), Vector::from_i64s(&[1, -1])],
        );
        assert!(matches!(r, Err(DunklError::InvalidRootSystem(_))));
        // zero root
        let r = RootSystem::<Rat>::new(2, vec![Vector::from_i64s(&[0, 0])]);
        assert!(matches!(r, Err(DunklError::InvalidRootSystem(_))));
    }

    #[test]
    fn multiplicity_validation_and_total() {
        let rs = GroupPreset::B { n: 2 }.root_system::<Rat>().unwrap();
        let k =
            MultiplicityFunction::new(&rs, vec![Rat::from_i64(1), Rat::from_ratio(1, 2)]).unwrap();
        // short orbit {e1, e2} carries k = 1, long orbit carries 1/2
        assert_eq!(k.value_on_root(&rs, 0), &Rat::from_i64(1));
        assert_eq!(k.value_on_root(&rs, 3), &Rat::from_ratio(1, 2));
        assert_eq!(k.total(&rs), Rat::from_i64(3));

        assert!(matches!(
            MultiplicityFunction::new(&rs, vec![Rat::from_i64(1)]),
            Err(DunklError::InvalidMultiplicity(_))
        ));
        assert!(matches!(
            MultiplicityFunction::new(&rs, vec![Rat::from_i64(-1), Rat::one()]),
            Err(DunklError::InvalidMultiplicity(_))
        ));

        let uniform = MultiplicityFunction::uniform(&rs, Rat::from_ratio(5, 2)).unwrap();
        assert_eq!(uniform.total(&rs), Rat::from_i64(10));
    }

    #[test]
    fn group_elements_are_orthogonal_and_closed() {
        let g = group(GroupPreset::B { n: 2 });
        for a in g.elements() {
            assert!(a.is_orthogonal());
            for b in g.elements() {
                assert!(g.contains(&a.mul(b)));
            }
        }
    }
}
