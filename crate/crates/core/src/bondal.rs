//! Wall relations `u₊ + u₋ + Σ a_i u_i = 0` and Bondal's criterion.

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fan::{walls, Fan, Wall};
use crate::lattice::{unimodular_inverse, IntMatrix, IntVector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallRelation {
    pub wall: Wall,
    /// Aligned with `wall.rays`.
    pub coeffs: Vec<BigInt>,
}

impl WallRelation {
    /// `v(u₊) + v(u₋) + Σ a_i v(u_i)`; zero for a correct relation.
    pub fn residual(&self, fan: &Fan) -> IntVector {
        let mut acc = fan.ray(self.wall.u_plus) + fan.ray(self.wall.u_minus);
        for (a, &j) in self.coeffs.iter().zip(&self.wall.rays) {
            acc = &acc + &fan.ray(j).scale(a);
        }
        acc
    }

    pub fn satisfies_bondal(&self) -> bool {
        let minus_one = -BigInt::one();
        self.coeffs.iter().all(|a| *a >= minus_one)
            && self.coeffs.iter().filter(|&a| *a == minus_one).count() <= 1
    }
}

/// Expresses `v(u₋)` in the basis `{wall rays, u₊}`; the `u₊` coordinate must
/// be `-1` and the others are `-a_i`.
pub fn wall_relation(fan: &Fan, wall: &Wall) -> Result<WallRelation> {
    let n = fan.dim();
    if wall.rays.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            got: wall.rays.len(),
        });
    }
    let basis: Vec<IntVector> = wall
        .rays
        .iter()
        .chain(std::iter::once(&wall.u_plus))
        .map(|&j| fan.ray(j).clone())
        .collect();
    let a = IntMatrix::from_rows(&basis, n)?;
    let b = unimodular_inverse(&a).map_err(|e| {
        Error::BasisDegenerate(format!("wall {:?} with u+ = {}: {e}", wall.rays, wall.u_plus))
    })?;
    let target = fan.ray(wall.u_minus);
    let coords: Vec<BigInt> = (0..n).map(|k| b.col(k).dot(target)).collect();
    if coords[n - 1] != -BigInt::one() {
        return Err(Error::BasisDegenerate(format!(
            "wall {:?}: u+ coordinate of u- is {}, expected -1",
            wall.rays,
            coords[n - 1]
        )));
    }
    Ok(WallRelation {
        wall: wall.clone(),
        coeffs: coords[..n - 1].iter().map(|c| -c).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BondalVerdict {
    pub pass: bool,
    /// All relations, in wall order.
    pub relations: Vec<WallRelation>,
    pub violations: Vec<WallRelation>,
}

pub fn bondal_criterion(fan: &Fan) -> Result<BondalVerdict> {
    let relations = walls(fan)?
        .par_iter()
        .map(|w| wall_relation(fan, w))
        .collect::<Result<Vec<_>>>()?;
    let violations: Vec<WallRelation> = relations
        .iter()
        .filter(|r| !r.satisfies_bondal())
        .cloned()
        .collect();
    Ok(BondalVerdict {
        pass: violations.is_empty(),
        relations,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variety::{build_named, VarietySpec};

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn find(rel: &[WallRelation], rays: &[usize]) -> WallRelation {
        rel.iter().find(|r| r.wall.rays == rays).cloned().unwrap()
    }

    #[test]
    fn projective_plane() {
        let fan = build_named(&VarietySpec::Projective(2)).unwrap();
        let v = bondal_criterion(&fan).unwrap();
        assert!(v.pass);
        assert_eq!(v.relations.len(), 3);
        assert!(v.relations.iter().all(|r| r.coeffs == ints(&[1])));
    }

    #[test]
    fn hirzebruch_two_fails() {
        let fan = build_named(&VarietySpec::Hirzebruch(2)).unwrap();
        assert_eq!(fan.ray(1), &IntVector::from_i64(&[0, 1]));
        let v = bondal_criterion(&fan).unwrap();
        assert!(!v.pass);
        assert_eq!(find(&v.relations, &[1]).coeffs, ints(&[-2]));
        assert_eq!(v.violations.len(), 1);
        assert_eq!(v.violations[0].coeffs, ints(&[-2]));
    }

    #[test]
    fn xd3_wall_v1_v3() {
        let fan = build_named(&VarietySpec::Xd(3)).unwrap();
        let w = walls(&fan).unwrap().into_iter().find(|w| w.rays == [1, 3]).unwrap();
        assert_eq!([w.u_plus, w.u_minus], [0, 5]);
        assert_eq!(wall_relation(&fan, &w).unwrap().coeffs, ints(&[-1, 0]));
    }

    #[test]
    fn relations_hold_and_are_symmetric() {
        for spec in ["P:3", "F:1", "F:3", "dP:1", "dP:3", "Xd:3", "Xd:5", "P:1*dP:2"] {
            let fan = build_named(&spec.parse().unwrap()).unwrap();
            for r in bondal_criterion(&fan).unwrap().relations {
                assert!(r.residual(&fan).is_zero(), "{spec} {:?}", r.wall);
                let mut swapped = r.wall.clone();
                std::mem::swap(&mut swapped.u_plus, &mut swapped.u_minus);
                std::mem::swap(&mut swapped.plus_cone, &mut swapped.minus_cone);
                assert_eq!(wall_relation(&fan, &swapped).unwrap().coeffs, r.coeffs);
            }
        }
    }

    #[test]
    fn degenerate_basis_is_reported() {
        let fan = build_named(&VarietySpec::Projective(2)).unwrap();
        let mut w = walls(&fan).unwrap()[0].clone();
        w.u_plus = w.rays[0];
        assert!(matches!(wall_relation(&fan, &w), Err(Error::BasisDegenerate(_))));
    }
}
