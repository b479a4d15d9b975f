//! Smooth complete simplicial fans and their combinatorics.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::divisor::PicProjection;
use crate::error::{Error, Result};
use crate::lattice::{solve_rational, unimodular_inverse, IntMatrix, IntVector};

/// Upper bound on the number of rays, fixed by the width of [`RaySet`].
pub const MAX_RAYS: usize = 128;

/// A set of ray indices, stored as a bitmask.
#[derive(Copy, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RaySet(u128);

impl RaySet {
    pub const fn empty() -> Self {
        RaySet(0)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut s = RaySet(0);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// All of `0..n`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_RAYS);
        if n == MAX_RAYS {
            RaySet(u128::MAX)
        } else {
            RaySet((1u128 << n) - 1)
        }
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_RAYS && self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < MAX_RAYS, "ray index {i} out of range");
        self.0 |= 1 << i;
    }

    pub fn without(self, i: usize) -> Self {
        RaySet(self.0 & !(1u128 << i))
    }

    pub fn with(self, i: usize) -> Self {
        let mut s = self;
        s.insert(i);
        s
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: RaySet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersection(self, other: RaySet) -> Self {
        RaySet(self.0 & other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for RaySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Debug, Default)]
struct FanCache {
    inverses: OnceLock<Result<Vec<IntMatrix>>>,
    pic: OnceLock<Result<PicProjection>>,
}

impl Clone for FanCache {
    fn clone(&self) -> Self {
        FanCache::default()
    }
}

/// A simplicial fan in `N = Z^n`: primitive ray generators plus maximal cones
/// given as sets of ray indices.
#[derive(Clone, Debug)]
pub struct Fan {
    dim: usize,
    rays: Vec<IntVector>,
    max_cones: Vec<Vec<usize>>,
    cone_sets: Vec<RaySet>,
    cache: FanCache,
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.rays == other.rays && self.max_cones == other.max_cones
    }
}

impl Eq for Fan {}

impl Fan {
    /// Checks the structural invariants; smoothness and completeness are left
    /// to [`validate`].
    pub fn new(dim: usize, rays: Vec<IntVector>, max_cones: Vec<Vec<usize>>) -> Result<Fan> {
        if dim == 0 {
            return Err(Error::InvalidFan("dimension must be positive".into()));
        }
        if rays.is_empty() {
            return Err(Error::InvalidFan("no rays".into()));
        }
        if rays.len() > MAX_RAYS {
            return Err(Error::InvalidFan(format!(
                "{} rays exceed the supported maximum of {MAX_RAYS}",
                rays.len()
            )));
        }
        let mut seen = HashSet::new();
        for (j, r) in rays.iter().enumerate() {
            if r.dim() != dim {
                return Err(Error::InvalidFan(format!(
                    "ray {j} has dimension {}, expected {dim}",
                    r.dim()
                )));
            }
            if !r.content().is_one() {
                return Err(Error::InvalidFan(format!("ray {j} = {r} is not primitive")));
            }
            if !seen.insert(r) {
                return Err(Error::InvalidFan(format!("ray {j} = {r} is repeated")));
            }
        }
        if max_cones.is_empty() {
            return Err(Error::InvalidFan("no maximal cones".into()));
        }
        let mut cones = Vec::with_capacity(max_cones.len());
        let mut cone_sets = Vec::with_capacity(max_cones.len());
        let mut seen_cones = HashSet::new();
        for (i, cone) in max_cones.into_iter().enumerate() {
            if cone.len() != dim {
                return Err(Error::InvalidFan(format!(
                    "maximal cone {i} has {} rays, expected {dim}",
                    cone.len()
                )));
            }
            if let Some(&bad) = cone.iter().find(|&&j| j >= rays.len()) {
                return Err(Error::InvalidFan(format!(
                    "maximal cone {i} references missing ray {bad}"
                )));
            }
            let set = RaySet::from_indices(cone.iter().copied());
            if set.len() != dim {
                return Err(Error::InvalidFan(format!(
                    "maximal cone {i} repeats a ray"
                )));
            }
            if !seen_cones.insert(set) {
                return Err(Error::InvalidFan(format!("maximal cone {i} is repeated")));
            }
            cones.push(set.to_vec());
            cone_sets.push(set);
        }
        Ok(Fan {
            dim,
            rays,
            max_cones: cones,
            cone_sets,
            cache: FanCache::default(),
        })
    }

    pub fn from_i64(dim: usize, rays: &[&[i64]], max_cones: Vec<Vec<usize>>) -> Result<Fan> {
        Fan::new(
            dim,
            rays.iter().map(|r| IntVector::from_i64(r)).collect(),
            max_cones,
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    pub fn ray(&self, j: usize) -> &IntVector {
        &self.rays[j]
    }

    pub fn ray_count(&self) -> usize {
        self.rays.len()
    }

    /// Maximal cones; each is sorted by ray index.
    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn cone_set(&self, i: usize) -> RaySet {
        self.cone_sets[i]
    }

    pub fn cone_sets(&self) -> &[RaySet] {
        &self.cone_sets
    }

    /// Picard number `#rays - dim`.
    pub fn picard_rank(&self) -> usize {
        self.rays.len().saturating_sub(self.dim)
    }

    /// Matrix whose rows are the ray generators of maximal cone `i`.
    pub fn cone_matrix(&self, i: usize) -> IntMatrix {
        let rows: Vec<IntVector> = self.max_cones[i].iter().map(|&j| self.rays[j].clone()).collect();
        IntMatrix::from_rows(&rows, self.dim).expect("rays have the fan dimension")
    }

    /// `#rays x dim` matrix with the ray generators as rows.
    pub fn ray_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(&self.rays, self.dim).expect("rays have the fan dimension")
    }

    /// Inverses of all maximal-cone matrices; fails unless the fan is smooth.
    pub fn cone_inverses(&self) -> Result<&[IntMatrix]> {
        self.cache
            .inverses
            .get_or_init(|| {
                (0..self.max_cones.len())
                    .map(|i| {
                        let a = self.cone_matrix(i);
                        unimodular_inverse(&a).map_err(|_| Error::NotSmooth {
                            cone: i,
                            det: a.determinant().map(|d| d.to_string()).unwrap_or_default(),
                        })
                    })
                    .collect()
            })
            .as_ref()
            .map(Vec::as_slice)
            .map_err(Clone::clone)
    }

    pub(crate) fn pic_projection(&self) -> Result<&PicProjection> {
        self.cache
            .pic
            .get_or_init(|| PicProjection::new(self))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn is_face(&self, s: RaySet) -> bool {
        self.cone_sets.iter().any(|&c| s.is_subset(c))
    }

    /// Index of a maximal cone containing `point` (as a rational vector),
    /// together with its cone coordinates.
    pub(crate) fn locate(&self, point: &IntVector) -> Result<Option<(usize, Vec<BigInt>)>> {
        let inverses = self.cone_inverses()?;
        for (i, b) in inverses.iter().enumerate() {
            // point = A^T * lambda, so lambda = B^T * point
            let lambda: Vec<BigInt> = (0..self.dim).map(|j| b.col(j).dot(point)).collect();
            if lambda.iter().all(|x| !x.is_negative()) {
                return Ok(Some((i, lambda)));
            }
        }
        Ok(None)
    }
}

/// Outcome of [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanReport {
    pub smooth: bool,
    pub complete: bool,
    pub simplicial: bool,
    pub messages: Vec<String>,
}

impl FanReport {
    pub fn is_ok(&self) -> bool {
        self.smooth && self.complete && self.simplicial
    }
}

/// Maps every codimension-one face of a maximal cone to the cones containing it.
fn facet_incidence(fan: &Fan) -> HashMap<RaySet, Vec<(usize, usize)>> {
    let mut map: HashMap<RaySet, Vec<(usize, usize)>> = HashMap::new();
    for (i, &cone) in fan.cone_sets.iter().enumerate() {
        for r in cone.iter() {
            map.entry(cone.without(r)).or_default().push((i, r));
        }
    }
    map
}

fn point_in_cone(a: &IntMatrix, det: &BigInt, inverse: Option<&IntMatrix>, q: &IntVector) -> Result<bool> {
    if det.is_zero() {
        return Ok(false);
    }
    if let Some(b) = inverse {
        return Ok((0..a.cols()).all(|j| !b.col(j).dot(q).is_negative()));
    }
    let lambda = solve_rational(&a.transpose(), q)?;
    Ok(lambda.is_some_and(|l| l.iter().all(|x| !x.is_negative())))
}

/// Smoothness and completeness report.
///
/// Completeness requires every facet of a maximal cone to lie in exactly two
/// maximal cones, and every sample point (each `±v_j` and the sum of any two
/// of them, i.e. a scaled midpoint) to lie in some maximal cone.
pub fn validate(fan: &Fan) -> FanReport {
    let mut messages = Vec::new();
    let mut smooth = true;
    let mut cones = Vec::with_capacity(fan.max_cones.len());
    for i in 0..fan.max_cones.len() {
        let a = fan.cone_matrix(i);
        let det = a.determinant().expect("cone matrices are square");
        let inverse = if det.abs().is_one() {
            Some(unimodular_inverse(&a).expect("determinant is a unit"))
        } else {
            smooth = false;
            messages.push(format!("maximal cone {i} has determinant {det}"));
            None
        };
        cones.push((a, det, inverse));
    }

    let mut complete = true;
    let mut incidence: Vec<_> = facet_incidence(fan).into_iter().collect();
    incidence.sort_by_key(|(f, _)| f.to_vec());
    for (facet, adj) in &incidence {
        if adj.len() != 2 {
            complete = false;
            messages.push(format!(
                "face {:?} lies in {} maximal cones",
                facet.to_vec(),
                adj.len()
            ));
        }
    }

    let mut samples: Vec<IntVector> = Vec::new();
    for r in &fan.rays {
        samples.push(r.clone());
        samples.push(-r);
    }
    let base = samples.len();
    for a in 0..base {
        for b in a + 1..base {
            let s = &samples[a] + &samples[b];
            if !s.is_zero() {
                samples.push(s);
            }
        }
    }
    let mut uncovered = 0usize;
    for q in &samples {
        let mut covered = false;
        for (a, det, inv) in &cones {
            match point_in_cone(a, det, inv.as_ref(), q) {
                Ok(true) => {
                    covered = true;
                    break;
                }
                Ok(false) => {}
                Err(e) => messages.push(format!("cone membership test failed: {e}")),
            }
        }
        if !covered {
            uncovered += 1;
            if uncovered <= 5 {
                messages.push(format!("sample point {q} is not covered"));
            }
        }
    }
    if uncovered > 0 {
        complete = false;
        if uncovered > 5 {
            messages.push(format!("{uncovered} sample points uncovered in total"));
        }
    }

    FanReport {
        smooth,
        complete,
        simplicial: true,
        messages,
    }
}

/// A codimension-one cone with its two adjacent maximal cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    /// The `n - 1` rays spanning the wall, sorted.
    pub rays: Vec<usize>,
    pub plus_cone: usize,
    pub minus_cone: usize,
    pub u_plus: usize,
    pub u_minus: usize,
}

/// All walls, sorted by their ray index sets.
pub fn walls(fan: &Fan) -> Result<Vec<Wall>> {
    let mut out = Vec::new();
    for (facet, adj) in facet_incidence(fan) {
        if adj.len() != 2 {
            return Err(Error::NotComplete(format!(
                "face {:?} lies in {} maximal cones",
                facet.to_vec(),
                adj.len()
            )));
        }
        let (mut a, mut b) = (adj[0], adj[1]);
        if a.0 > b.0 {
            std::mem::swap(&mut a, &mut b);
        }
        out.push(Wall {
            rays: facet.to_vec(),
            plus_cone: a.0,
            minus_cone: b.0,
            u_plus: a.1,
            u_minus: b.1,
        });
    }
    out.sort_by(|x, y| x.rays.cmp(&y.rays));
    Ok(out)
}

/// A minimal non-face with its primitive relation
/// `sum(rays) = sum(relation_coeffs[i] * relation_cone[i])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveCollection {
    pub rays: Vec<usize>,
    pub relation_cone: Vec<usize>,
    pub relation_coeffs: Vec<BigInt>,
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
pub(crate) fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Minimal non-faces of the fan, by increasing size then lexicographically.
pub fn primitive_collections(fan: &Fan) -> Result<Vec<PrimitiveCollection>> {
    let m = fan.ray_count();
    let mut found = Vec::new();
    for k in 1..=(fan.dim + 1).min(m) {
        for_each_combination(m, k, |idx| {
            let s = RaySet::from_indices(idx.iter().copied());
            if !fan.is_face(s) && idx.iter().all(|&i| fan.is_face(s.without(i))) {
                found.push(idx.to_vec());
            }
        });
    }
    found
        .into_iter()
        .map(|rays| {
            let sum = rays
                .iter()
                .fold(IntVector::zeros(fan.dim), |acc, &j| &acc + fan.ray(j));
            let (cone, lambda) = fan.locate(&sum)?.ok_or_else(|| {
                Error::NotComplete(format!("sum of {rays:?} lies in no maximal cone"))
            })?;
            let mut relation_cone = Vec::new();
            let mut relation_coeffs = Vec::new();
            for (pos, c) in lambda.into_iter().enumerate() {
                if c.is_positive() {
                    relation_cone.push(fan.max_cones[cone][pos]);
                    relation_coeffs.push(c);
                }
            }
            Ok(PrimitiveCollection {
                rays,
                relation_cone,
                relation_coeffs,
            })
        })
        .collect()
}

/// Maximal cones of the fan whose minimal non-faces are exactly the given
/// pairs: every independent `dim`-subset of the graph `(rays, pairs)`.
pub fn maximal_cones_from_primitive_pairs(
    dim: usize,
    rays: &[IntVector],
    forbidden_pairs: &[(usize, usize)],
) -> Result<Vec<Vec<usize>>> {
    let m = rays.len();
    if m > MAX_RAYS {
        return Err(Error::ConstructionFailed(format!("{m} rays are too many")));
    }
    let mut conflicts = vec![RaySet::empty(); m];
    for &(a, b) in forbidden_pairs {
        if a >= m || b >= m || a == b {
            return Err(Error::ConstructionFailed(format!(
                "bad primitive pair ({a}, {b})"
            )));
        }
        conflicts[a].insert(b);
        conflicts[b].insert(a);
    }
    let mut cones = Vec::new();
    let mut stack = Vec::with_capacity(dim);
    fn extend(
        start: usize,
        dim: usize,
        conflicts: &[RaySet],
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if stack.len() == dim {
            out.push(stack.clone());
            return;
        }
        for j in start..conflicts.len() {
            if stack.iter().any(|&i| conflicts[i].contains(j)) {
                continue;
            }
            stack.push(j);
            extend(j + 1, dim, conflicts, stack, out);
            stack.pop();
        }
    }
    extend(0, dim, &conflicts, &mut stack, &mut cones);
    for cone in &cones {
        let rows: Vec<IntVector> = cone.iter().map(|&j| rays[j].clone()).collect();
        let det = IntMatrix::from_rows(&rows, dim)?.determinant()?;
        if !det.abs().is_one() {
            return Err(Error::ConstructionFailed(format!(
                "independent set {cone:?} has determinant {det}"
            )));
        }
    }
    Ok(cones)
}

/// Abstract simplicial complex on ray indices, closed under subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceComplex {
    vertex_count: usize,
    /// Sorted by size, then by bitmask; always contains the empty face.
    faces: Vec<RaySet>,
}

impl FaceComplex {
    pub fn from_facets(vertex_count: usize, facets: &[RaySet]) -> Self {
        let mut all = BTreeSet::new();
        all.insert(RaySet::empty());
        for &f in facets {
            let verts = f.to_vec();
            for mask in 1u64..(1u64 << verts.len()) {
                all.insert(RaySet::from_indices(
                    verts.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &v)| v),
                ));
            }
        }
        let mut faces: Vec<RaySet> = all.into_iter().collect();
        faces.sort_by_key(|f| (f.len(), f.bits()));
        FaceComplex {
            vertex_count,
            faces,
        }
    }

    pub fn of_fan(fan: &Fan) -> Self {
        Self::from_facets(fan.ray_count(), fan.cone_sets())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn faces(&self) -> &[RaySet] {
        &self.faces
    }

    pub fn contains(&self, s: RaySet) -> bool {
        self.faces.binary_search_by_key(&(s.len(), s.bits()), |f| (f.len(), f.bits())).is_ok()
    }

    /// Faces that are maximal under inclusion.
    pub fn facets(&self) -> Vec<RaySet> {
        self.faces
            .iter()
            .copied()
            .filter(|&f| !self.faces.iter().any(|&g| g != f && f.is_subset(g)))
            .collect()
    }

    /// Number of faces of each size `0, 1, 2, ...` (size 0 is the empty face).
    pub fn face_counts(&self) -> Vec<usize> {
        let top = self.faces.last().map_or(0, |f| f.len());
        let mut counts = vec![0; top + 1];
        for f in &self.faces {
            counts[f.len()] += 1;
        }
        counts
    }

    /// Full subcomplex on the vertices in `vertices`.
    pub fn restrict(&self, vertices: RaySet) -> FaceComplex {
        FaceComplex {
            vertex_count: self.vertex_count,
            faces: self.faces.iter().copied().filter(|f| f.is_subset(vertices)).collect(),
        }
    }
}

/// Polynomial with integer coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return IntPolynomial::new(Vec::new());
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }

    fn add(&self, other: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = BigInt::zero();
        IntPolynomial::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (deg, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match deg {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}")?;
                    }
                    if deg == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{deg}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `P(t) = sum_k d_k (t^2 - 1)^(n - k)` with `d_k` the number of `k`-dimensional cones.
pub fn poincare_polynomial(fan: &Fan) -> IntPolynomial {
    let counts = FaceComplex::of_fan(fan).face_counts();
    let base = IntPolynomial::from_i64(&[-1, 0, 1]);
    let mut total = IntPolynomial::new(Vec::new());
    for (k, &d) in counts.iter().enumerate() {
        let mut term = IntPolynomial::new(vec![BigInt::from(d)]);
        for _ in k..fan.dim() {
            term = term.mul(&base);
        }
        total = total.add(&term);
    }
    total
}

/// Topological Euler characteristic `P(-1)`.
pub fn euler_characteristic(fan: &Fan) -> BigInt {
    poincare_polynomial(fan).eval(&BigInt::from(-1))
}

/// Product fan: rays of `f1` then rays of `f2`, cones ordered with the `f1`
/// cone as the outer index.
pub fn fan_product(f1: &Fan, f2: &Fan) -> Result<Fan> {
    let (n1, n2) = (f1.dim(), f2.dim());
    let m1 = f1.ray_count();
    let rays = f1
        .rays()
        .iter()
        .map(|r| r.concat(&IntVector::zeros(n2)))
        .chain(f2.rays().iter().map(|r| IntVector::zeros(n1).concat(r)))
        .collect();
    let mut cones = Vec::with_capacity(f1.max_cones().len() * f2.max_cones().len());
    for c1 in f1.max_cones() {
        for c2 in f2.max_cones() {
            cones.push(c1.iter().copied().chain(c2.iter().map(|j| j + m1)).collect());
        }
    }
    Fan::new(n1 + n2, rays, cones)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1() -> Fan {
        Fan::from_i64(1, &[&[1], &[-1]], vec![vec![0], vec![1]]).unwrap()
    }

    fn p2() -> Fan {
        Fan::from_i64(
            2,
            &[&[1, 0], &[0, 1], &[-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap()
    }

    #[test]
    fn structural_errors() {
        assert!(Fan::from_i64(1, &[&[2], &[-1]], vec![vec![0], vec![1]]).is_err());
        assert!(Fan::from_i64(1, &[&[1], &[1]], vec![vec![0], vec![1]]).is_err());
        assert!(Fan::from_i64(1, &[&[1], &[-1]], vec![vec![0], vec![0]]).is_err());
        assert!(Fan::from_i64(1, &[&[1], &[-1]], vec![vec![0], vec![2]]).is_err());
        assert!(Fan::from_i64(2, &[&[1, 0], &[0, 1]], vec![vec![0, 0]]).is_err());
        assert!(Fan::from_i64(1, &[&[1], &[-1]], vec![]).is_err());
        assert!(Fan::from_i64(0, &[&[]], vec![vec![]]).is_err());
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&p2()).is_ok());
        let broken = Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, -1]], vec![vec![0, 1], vec![1, 2]]).unwrap();
        let r = validate(&broken);
        assert!(r.smooth);
        assert!(!r.complete);

        let singular = Fan::from_i64(
            2,
            &[&[1, 0], &[1, 2], &[-1, 0], &[0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        )
        .unwrap();
        let r = validate(&singular);
        assert!(!r.smooth);
        assert!(r.complete, "{:?}", r.messages);
    }

    #[test]
    fn half_plane_is_not_complete() {
        let rays: &[&[i64]] = &[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]];
        let ok = Fan::from_i64(2, rays, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]]).unwrap();
        assert!(validate(&ok).complete);
        let half = Fan::from_i64(2, rays, vec![vec![0, 1], vec![1, 2]]).unwrap();
        assert!(!validate(&half).complete);
    }

    #[test]
    fn walls_of_small_fans() {
        let w = walls(&p1()).unwrap();
        assert_eq!(w.len(), 1);
        assert!(w[0].rays.is_empty());
        assert_eq!((w[0].u_plus, w[0].u_minus), (0, 1));
        assert_eq!(walls(&p2()).unwrap().len(), 3);
        let broken = Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, -1]], vec![vec![0, 1], vec![1, 2]]).unwrap();
        assert!(matches!(walls(&broken), Err(Error::NotComplete(_))));
    }

    #[test]
    fn primitive_collections_of_small_fans() {
        let pc = primitive_collections(&p2()).unwrap();
        assert_eq!(pc.len(), 1);
        assert_eq!(pc[0].rays, vec![0, 1, 2]);
        assert!(pc[0].relation_cone.is_empty());

        let square = fan_product(&p1(), &p1()).unwrap();
        let pc = primitive_collections(&square).unwrap();
        assert_eq!(
            pc.iter().map(|c| c.rays.clone()).collect::<Vec<_>>(),
            vec![vec![0, 1], vec![2, 3]]
        );
        assert!(pc.iter().all(|c| c.relation_cone.is_empty()));
    }

    #[test]
    fn primitive_relation_on_a_blowup() {
        // F_1: e0 + (-e0 + e1) = e1
        let f1 = Fan::from_i64(
            2,
            &[&[1, 0], &[0, 1], &[-1, 1], &[0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        )
        .unwrap();
        let pc = primitive_collections(&f1).unwrap();
        let pair = pc.iter().find(|c| c.rays == vec![0, 2]).unwrap();
        assert_eq!(pair.relation_cone, vec![1]);
        assert_eq!(pair.relation_coeffs, vec![BigInt::from(1)]);
    }

    #[test]
    fn brute_force_minimal_nonfaces_agree() {
        // independent enumeration over all subsets of P^2's rays
        let fan = p2();
        let mut brute = Vec::new();
        for mask in 1u32..8 {
            let s = RaySet::from_indices((0..3).filter(|i| mask >> i & 1 == 1));
            let is_face = |t: RaySet| fan.cone_sets().iter().any(|&c| t.is_subset(c));
            if !is_face(s) && s.iter().all(|i| is_face(s.without(i))) {
                brute.push(s.to_vec());
            }
        }
        let ours: Vec<_> = primitive_collections(&fan).unwrap().into_iter().map(|c| c.rays).collect();
        assert_eq!(ours, brute);
    }

    #[test]
    fn cones_from_pairs() {
        let p1_rays = vec![IntVector::from_i64(&[1]), IntVector::from_i64(&[-1])];
        assert_eq!(
            maximal_cones_from_primitive_pairs(1, &p1_rays, &[(0, 1)]).unwrap(),
            vec![vec![0], vec![1]]
        );
        let sq: Vec<IntVector> = [[1, 0], [-1, 0], [0, 1], [0, -1]]
            .iter()
            .map(|r| IntVector::from_i64(r))
            .collect();
        assert_eq!(
            maximal_cones_from_primitive_pairs(2, &sq, &[(0, 1), (2, 3)]).unwrap().len(),
            4
        );
        // dropping a pair leaves the degenerate cone {e0, -e0}
        assert!(matches!(
            maximal_cones_from_primitive_pairs(2, &sq, &[(2, 3)]),
            Err(Error::ConstructionFailed(_))
        ));
    }

    #[test]
    fn poincare_examples() {
        let p = poincare_polynomial(&p1());
        assert_eq!(p, IntPolynomial::from_i64(&[1, 0, 1]));
        assert_eq!(euler_characteristic(&p1()), BigInt::from(2));
        assert_eq!(poincare_polynomial(&p2()).to_string(), "t^4 + t^2 + 1");
        assert_eq!(euler_characteristic(&p2()), BigInt::from(3));
    }

    #[test]
    fn product_counts() {
        let sq = fan_product(&p1(), &p1()).unwrap();
        assert_eq!((sq.ray_count(), sq.max_cones().len()), (4, 4));
        let p2p1 = fan_product(&p2(), &p1()).unwrap();
        assert_eq!((p2p1.ray_count(), p2p1.max_cones().len()), (5, 6));
        assert!(validate(&p2p1).is_ok());
        assert_eq!(euler_characteristic(&p2p1), BigInt::from(6));
    }

    #[test]
    fn face_complex_basics() {
        let fc = FaceComplex::of_fan(&p2());
        assert_eq!(fc.face_counts(), vec![1, 3, 3]);
        assert!(fc.contains(RaySet::from_indices([0, 1])));
        assert!(!fc.contains(RaySet::from_indices([0, 1, 2])));
        assert_eq!(fc.facets().len(), 3);
        let r = fc.restrict(RaySet::from_indices([0, 2]));
        assert_eq!(r.face_counts(), vec![1, 2, 1]);
    }

    #[test]
    fn combinations_enumerate_in_order() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |c| seen.push(c.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 1]);
        assert_eq!(seen[5], vec![2, 3]);
        let mut count = 0;
        for_each_combination(3, 0, |_| count += 1);
        assert_eq!(count, 1);
    }

    #[test]
    fn rayset_ops() {
        let s = RaySet::from_indices([3, 1, 100]);
        assert_eq!(s.to_vec(), vec![1, 3, 100]);
        assert!(s.contains(100));
        assert_eq!(s.without(3).len(), 2);
        assert!(RaySet::from_indices([1]).is_subset(s));
        assert_eq!(RaySet::full(3).to_vec(), vec![0, 1, 2]);
        assert_eq!(RaySet::full(128).len(), 128);
    }
}
