//! Torus-invariant divisors, Picard classes and positivity.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::lattice::{smith_normal_form, solve_integral, IntMatrix, IntVector};

/// `sum_j a_j Z_j`, one coefficient per ray of the owning fan.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusDivisor {
    coeffs: IntVector,
}

impl TorusDivisor {
    pub fn new(coeffs: IntVector) -> Self {
        TorusDivisor { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        TorusDivisor::new(IntVector::from_i64(coeffs))
    }

    pub fn zero(rays: usize) -> Self {
        TorusDivisor::new(IntVector::zeros(rays))
    }

    /// The prime divisor `Z_j`.
    pub fn prime(rays: usize, j: usize) -> Self {
        TorusDivisor::new(IntVector::unit(rays, j))
    }

    /// `sum_{j in set} Z_j`.
    pub fn sum_of(rays: usize, set: &[usize]) -> Self {
        set.iter()
            .fold(TorusDivisor::zero(rays), |acc, &j| &acc + &TorusDivisor::prime(rays, j))
    }

    pub fn coeffs(&self) -> &[BigInt] {
        self.coeffs.entries()
    }

    pub fn as_vector(&self) -> &IntVector {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    pub fn scale(&self, k: &BigInt) -> TorusDivisor {
        TorusDivisor::new(self.coeffs.scale(k))
    }

    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.coeffs.to_i64()
    }

    /// External product coefficients: `self` on the first factor, `other` on the second.
    pub fn concat(&self, other: &TorusDivisor) -> TorusDivisor {
        TorusDivisor::new(self.coeffs.concat(&other.coeffs))
    }

    pub(crate) fn check_on(&self, fan: &Fan) -> Result<()> {
        if self.len() != fan.ray_count() {
            return Err(Error::DimensionMismatch {
                expected: fan.ray_count(),
                got: self.len(),
            });
        }
        Ok(())
    }
}

impl Add for &TorusDivisor {
    type Output = TorusDivisor;

    fn add(self, rhs: &TorusDivisor) -> TorusDivisor {
        TorusDivisor::new(&self.coeffs + &rhs.coeffs)
    }
}

impl Sub for &TorusDivisor {
    type Output = TorusDivisor;

    fn sub(self, rhs: &TorusDivisor) -> TorusDivisor {
        TorusDivisor::new(&self.coeffs - &rhs.coeffs)
    }
}

impl Neg for &TorusDivisor {
    type Output = TorusDivisor;

    fn neg(self) -> TorusDivisor {
        TorusDivisor::new(-&self.coeffs)
    }
}

impl fmt::Display for TorusDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.coeffs.fmt(f)
    }
}

/// Per-maximal-cone functionals `m_σ` with `<m_σ, v_j> = -a_j` for `v_j ∈ σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartierData {
    pub functionals: Vec<IntVector>,
}

/// Picard class coordinates under the fan's fixed basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorClass(pub Vec<BigInt>);

impl DivisorClass {
    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        IntVector::new(self.0.clone()).fmt(f)
    }
}

/// Cokernel projection `Z^rays -> Pic` read off from the Smith form of the
/// ray matrix. Computed once per fan.
#[derive(Clone, Debug)]
pub(crate) struct PicProjection {
    /// `rho x #rays`; the bottom rows of the left Smith multiplier.
    projection: IntMatrix,
}

impl PicProjection {
    pub(crate) fn new(fan: &Fan) -> Result<Self> {
        let rays = fan.ray_matrix();
        let snf = smith_normal_form(&rays);
        let factors = snf.invariant_factors();
        if factors.len() < fan.dim() {
            return Err(Error::NotComplete("ray generators do not span the lattice".into()));
        }
        if let Some(d) = factors.iter().find(|d| !d.is_one()) {
            return Err(Error::TorsionDetected {
                factor: d.to_string(),
            });
        }
        let m = fan.ray_count();
        let rows: Vec<usize> = (fan.dim()..m).collect();
        let cols: Vec<usize> = (0..m).collect();
        Ok(PicProjection {
            projection: snf.u.select(&rows, &cols),
        })
    }

    fn apply(&self, d: &TorusDivisor) -> DivisorClass {
        DivisorClass(self.projection.mul_vec(d.as_vector()).into_entries())
    }
}

/// Local data of `d` on every maximal cone.
pub fn cartier_data(fan: &Fan, d: &TorusDivisor) -> Result<CartierData> {
    d.check_on(fan)?;
    let inverses = fan.cone_inverses()?;
    let functionals = fan
        .max_cones()
        .iter()
        .zip(inverses)
        .map(|(cone, b)| {
            let rhs = IntVector::new(cone.iter().map(|&j| -&d.coeffs()[j]).collect());
            b.mul_vec(&rhs)
        })
        .collect();
    Ok(CartierData { functionals })
}

/// `div(χ^m) = sum_j <m, v_j> Z_j`.
pub fn principal_divisor(fan: &Fan, m: &IntVector) -> TorusDivisor {
    TorusDivisor::new(IntVector::new(fan.rays().iter().map(|v| m.dot(v)).collect()))
}

pub fn divisor_class(fan: &Fan, d: &TorusDivisor) -> Result<DivisorClass> {
    d.check_on(fan)?;
    Ok(fan.pic_projection()?.apply(d))
}

/// True iff `d1 - d2` is principal.
pub fn linearly_equivalent(fan: &Fan, d1: &TorusDivisor, d2: &TorusDivisor) -> Result<bool> {
    d1.check_on(fan)?;
    d2.check_on(fan)?;
    let diff = d1 - d2;
    Ok(solve_integral(&fan.ray_matrix(), diff.as_vector())?.is_some())
}

/// `K = -sum_j Z_j`.
pub fn canonical_divisor(fan: &Fan) -> TorusDivisor {
    TorusDivisor::new(IntVector::new(vec![-BigInt::one(); fan.ray_count()]))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PositivityMode {
    Nef,
    Ample,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Positivity {
    pub holds: bool,
    /// `(cone, ray)` where convexity fails.
    pub witness: Option<(usize, usize)>,
}

/// Convexity of the support function: for every maximal cone `σ` and every ray
/// `v_j` outside it, `<m_σ, v_j> >= -a_j` (nef) or `> -a_j` (ample).
pub fn positivity(fan: &Fan, d: &TorusDivisor, mode: PositivityMode) -> Result<Positivity> {
    let data = cartier_data(fan, d)?;
    for (i, m) in data.functionals.iter().enumerate() {
        let cone = fan.cone_set(i);
        for (j, v) in fan.rays().iter().enumerate() {
            if cone.contains(j) {
                continue;
            }
            let lhs = m.dot(v);
            let rhs = -&d.coeffs()[j];
            let ok = match mode {
                PositivityMode::Nef => lhs >= rhs,
                PositivityMode::Ample => lhs > rhs,
            };
            if !ok {
                return Ok(Positivity {
                    holds: false,
                    witness: Some((i, j)),
                });
            }
        }
    }
    Ok(Positivity {
        holds: true,
        witness: None,
    })
}

/// `-K` ample.
pub fn is_fano(fan: &Fan) -> Result<bool> {
    let anti = -&canonical_divisor(fan);
    Ok(positivity(fan, &anti, PositivityMode::Ample)?.holds)
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

    fn f2() -> Fan {
        Fan::from_i64(
            2,
            &[&[1, 0], &[0, 1], &[-1, 2], &[0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        )
        .unwrap()
    }

    #[test]
    fn cartier_on_p1() {
        let d = TorusDivisor::from_i64(&[1, 0]);
        let c = cartier_data(&p1(), &d).unwrap();
        assert_eq!(c.functionals, vec![IntVector::from_i64(&[-1]), IntVector::from_i64(&[0])]);
        let z = cartier_data(&p2(), &TorusDivisor::zero(3)).unwrap();
        assert!(z.functionals.iter().all(IntVector::is_zero));
    }

    #[test]
    fn cartier_reconstructs_coefficients() {
        let fan = f2();
        let d = TorusDivisor::from_i64(&[3, -1, 2, 5]);
        let c = cartier_data(&fan, &d).unwrap();
        for (i, cone) in fan.max_cones().iter().enumerate() {
            for &j in cone {
                assert_eq!(-c.functionals[i].dot(fan.ray(j)), d.coeffs()[j]);
            }
        }
    }

    #[test]
    fn classes_on_projective_spaces() {
        let fan = p1();
        let a = divisor_class(&fan, &TorusDivisor::from_i64(&[1, 0])).unwrap();
        let b = divisor_class(&fan, &TorusDivisor::from_i64(&[0, 1])).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.coords().len(), 1);

        let fan = p2();
        let anti = -&canonical_divisor(&fan);
        let h = divisor_class(&fan, &TorusDivisor::prime(3, 0)).unwrap();
        let k = divisor_class(&fan, &anti).unwrap();
        assert_eq!(k.0[0], &h.0[0] * BigInt::from(3));
        assert!(h.0[0] == BigInt::one() || h.0[0] == -BigInt::one());
        assert!(linearly_equivalent(&fan, &TorusDivisor::prime(3, 1), &TorusDivisor::prime(3, 2)).unwrap());
        assert!(!linearly_equivalent(&fan, &TorusDivisor::prime(3, 1), &TorusDivisor::zero(3)).unwrap());
    }

    #[test]
    fn canonical_divisor_coefficients() {
        assert_eq!(canonical_divisor(&p1()), TorusDivisor::from_i64(&[-1, -1]));
    }

    #[test]
    fn positivity_examples() {
        let anti = -&canonical_divisor(&p2());
        assert!(positivity(&p2(), &anti, PositivityMode::Ample).unwrap().holds);
        let fan = f2();
        let anti = -&canonical_divisor(&fan);
        let amp = positivity(&fan, &anti, PositivityMode::Ample).unwrap();
        assert!(!amp.holds);
        assert!(amp.witness.is_some());
        assert!(positivity(&fan, &anti, PositivityMode::Nef).unwrap().holds);
        assert!(!is_fano(&fan).unwrap());
        assert!(is_fano(&p2()).unwrap());
    }

    #[test]
    fn wrong_length_is_rejected() {
        assert!(divisor_class(&p1(), &TorusDivisor::zero(3)).is_err());
        assert!(cartier_data(&p1(), &TorusDivisor::zero(1)).is_err());
    }

    #[test]
    fn principal_divisors_have_zero_class() {
        let fan = f2();
        for m in [[1, 0], [0, 1], [-3, 7]] {
            let d = principal_divisor(&fan, &IntVector::from_i64(&m));
            assert!(divisor_class(&fan, &d).unwrap().is_zero());
        }
    }
}
