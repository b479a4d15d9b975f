//! Builders for the named varieties and the descriptor grammar
//! `P:n | dP:r | Xd:d | F:a | A*B`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::fan::{fan_product, maximal_cones_from_primitive_pairs, validate, Fan, MAX_RAYS};
use crate::lattice::IntVector;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarietySpec {
    /// Projective space `P^n`.
    Projective(usize),
    /// Blow-up of `P^2` at `r` torus-fixed points, `r` in `1..=3`.
    DelPezzo(usize),
    /// The odd-dimensional toric `(S_3)^((d-1)/2)`-bundle over `P^1`.
    Xd(usize),
    /// Hirzebruch surface `F_a`.
    Hirzebruch(usize),
    Product(Vec<VarietySpec>),
}

impl VarietySpec {
    /// Number of rays of the fan this descriptor builds.
    pub fn ray_count(&self) -> usize {
        match self {
            VarietySpec::Projective(n) => n + 1,
            VarietySpec::DelPezzo(r) => 3 + r,
            VarietySpec::Xd(d) => (3 * d).saturating_sub(1),
            VarietySpec::Hirzebruch(_) => 4,
            VarietySpec::Product(fs) => fs.iter().map(VarietySpec::ray_count).sum(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            VarietySpec::Projective(n) => *n,
            VarietySpec::DelPezzo(_) | VarietySpec::Hirzebruch(_) => 2,
            VarietySpec::Xd(d) => *d,
            VarietySpec::Product(fs) => fs.iter().map(VarietySpec::dim).sum(),
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            VarietySpec::Projective(0) => Err(Error::InvalidSpec("P:n needs n >= 1".into())),
            VarietySpec::DelPezzo(r) if !(1..=3).contains(r) => {
                Err(Error::InvalidSpec(format!("dP:{r} is not in dP:1..dP:3")))
            }
            VarietySpec::Xd(d) if *d < 3 || d % 2 == 0 => {
                Err(Error::InvalidSpec(format!("Xd:{d} needs an odd d >= 3")))
            }
            VarietySpec::Product(fs) if fs.len() < 2 => {
                Err(Error::InvalidSpec("a product needs at least two factors".into()))
            }
            VarietySpec::Product(fs) => fs.iter().try_for_each(VarietySpec::check),
            _ => Ok(()),
        }?;
        if self.ray_count() > MAX_RAYS {
            return Err(Error::InvalidSpec(format!(
                "{self} has {} rays; at most {MAX_RAYS} are supported",
                self.ray_count()
            )));
        }
        Ok(())
    }
}

impl FromStr for VarietySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let factors: Vec<&str> = s.split('*').map(str::trim).collect();
        if factors.len() > 1 {
            let parsed = factors
                .into_iter()
                .map(parse_factor)
                .collect::<Result<Vec<_>>>()?;
            let spec = VarietySpec::Product(parsed);
            spec.check()?;
            return Ok(spec);
        }
        let spec = parse_factor(factors[0])?;
        spec.check()?;
        Ok(spec)
    }
}

fn parse_factor(s: &str) -> Result<VarietySpec> {
    let bad = || Error::InvalidSpec(format!("cannot parse variety factor {s:?}"));
    let number = |t: &str| -> Result<usize> {
        if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        t.parse::<usize>().map_err(|_| bad())
    };
    if let Some((kind, arg)) = s.split_once(':') {
        let n = number(arg.trim())?;
        return match kind.trim() {
            "P" => Ok(VarietySpec::Projective(n)),
            "dP" => Ok(VarietySpec::DelPezzo(n)),
            "Xd" => Ok(VarietySpec::Xd(n)),
            "F" => Ok(VarietySpec::Hirzebruch(n)),
            _ => Err(bad()),
        };
    }
    match s.strip_prefix('F') {
        Some(rest) => Ok(VarietySpec::Hirzebruch(number(rest)?)),
        None => Err(bad()),
    }
}

impl fmt::Display for VarietySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarietySpec::Projective(n) => write!(f, "P:{n}"),
            VarietySpec::DelPezzo(r) => write!(f, "dP:{r}"),
            VarietySpec::Xd(d) => write!(f, "Xd:{d}"),
            VarietySpec::Hirzebruch(a) => write!(f, "F:{a}"),
            VarietySpec::Product(fs) => {
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
        }
    }
}

/// Builds and validates the fan of a named variety.
pub fn build_named(spec: &VarietySpec) -> Result<Fan> {
    spec.check()?;
    let fan = match spec {
        VarietySpec::Product(fs) => {
            let mut it = fs.iter();
            let first = build_named(it.next().expect("checked non-empty"))?;
            return it.try_fold(first, |acc, f| fan_product(&acc, &build_named(f)?));
        }
        VarietySpec::Projective(n) => projective_space(*n)?,
        VarietySpec::DelPezzo(r) => del_pezzo(*r)?,
        VarietySpec::Xd(d) => xd(*d)?,
        VarietySpec::Hirzebruch(a) => {
            let a = i64::try_from(*a).map_err(|_| Error::InvalidSpec("F:a too large".into()))?;
            complete_fan_2d(vec![
                IntVector::from_i64(&[1, 0]),
                IntVector::from_i64(&[0, 1]),
                IntVector::from_i64(&[-1, a]),
                IntVector::from_i64(&[0, -1]),
            ])?
        }
    };
    let report = validate(&fan);
    if !report.is_ok() {
        return Err(Error::ConstructionFailed(format!(
            "{spec}: {}",
            report.messages.join("; ")
        )));
    }
    Ok(fan)
}

fn projective_space(n: usize) -> Result<Fan> {
    let mut rays: Vec<IntVector> = (0..n).map(|i| IntVector::unit(n, i)).collect();
    rays.push(IntVector::from_i64(&vec![-1; n]));
    let cones = (0..=n)
        .rev()
        .map(|skip| (0..=n).filter(|&j| j != skip).collect())
        .collect();
    Fan::new(n, rays, cones)
}

fn del_pezzo(r: usize) -> Result<Fan> {
    // P^2 = <e1, -e0, e0-e1>; blow-ups add e1-e0, -e1, e0 in turn.
    let all: [(&[i64], usize); 6] = [
        (&[1, 0], 3),
        (&[-1, 0], 0),
        (&[0, 1], 0),
        (&[0, -1], 2),
        (&[1, -1], 0),
        (&[-1, 1], 1),
    ];
    let rays = all
        .iter()
        .filter(|(_, needed)| *needed <= r)
        .map(|(v, _)| IntVector::from_i64(v))
        .collect();
    complete_fan_2d(rays)
}

/// Complete two-dimensional fan on the given rays: consecutive rays in
/// counter-clockwise order span the maximal cones.
pub fn complete_fan_2d(rays: Vec<IntVector>) -> Result<Fan> {
    if rays.len() < 3 || rays.iter().any(|r| r.dim() != 2) {
        return Err(Error::ConstructionFailed(
            "a complete plane fan needs at least three planar rays".into(),
        ));
    }
    let half = |v: &IntVector| {
        let (x, y) = (&v[0], &v[1]);
        if y.is_positive() || (y.is_zero() && x.is_positive()) {
            0
        } else {
            1
        }
    };
    let mut order: Vec<usize> = (0..rays.len()).collect();
    order.sort_by(|&a, &b| {
        let (u, v) = (&rays[a], &rays[b]);
        half(u).cmp(&half(v)).then_with(|| {
            let cross = &u[0] * &v[1] - &u[1] * &v[0];
            BigInt::zero().cmp(&cross)
        })
    });
    let k = order.len();
    let mut cones: Vec<Vec<usize>> = (0..k).map(|i| vec![order[i], order[(i + 1) % k]]).collect();
    for c in &mut cones {
        c.sort_unstable();
    }
    cones.sort();
    Fan::new(2, rays, cones)
}

/// Ray indices of `X_d` in the builder's canonical order
/// `v_0, ..., v_{2d-2}, w_0, ..., w_{d-1}`.
#[derive(Copy, Clone, Debug)]
pub struct XdRays {
    pub d: usize,
}

impl XdRays {
    pub fn new(d: usize) -> Self {
        XdRays { d }
    }

    pub fn count(&self) -> usize {
        3 * self.d - 1
    }

    pub fn v(&self, k: usize) -> usize {
        assert!(k < 2 * self.d - 1);
        k
    }

    pub fn w(&self, j: usize) -> usize {
        assert!(j < self.d);
        2 * self.d - 1 + j
    }

    /// Ray `e_i`.
    pub fn z_plus(&self, i: usize) -> usize {
        if i == 0 {
            self.v(0)
        } else {
            self.v(2 * i - 1)
        }
    }

    /// Ray `-e_i`, `i >= 1`.
    pub fn z_minus(&self, i: usize) -> usize {
        self.v(2 * i)
    }

    /// Ray `e_1 - e_0`.
    pub fn d0(&self) -> usize {
        self.w(0)
    }

    /// Ray `e_{2j-1} - e_{2j}`.
    pub fn d_plus(&self, j: usize) -> usize {
        self.w(2 * j - 1)
    }

    /// Ray `e_{2j} - e_{2j-1}`.
    pub fn d_minus(&self, j: usize) -> usize {
        self.w(2 * j)
    }
}

pub fn xd_rays(d: usize) -> Vec<IntVector> {
    let l = (d - 1) / 2;
    let e = |i: usize| IntVector::unit(d, i);
    let mut rays = vec![e(0)];
    for k in 1..d {
        rays.push(e(k));
        rays.push(-&e(k));
    }
    rays.push(&e(1) - &e(0));
    for j in 1..=l {
        rays.push(&e(2 * j - 1) - &e(2 * j));
        rays.push(&e(2 * j) - &e(2 * j - 1));
    }
    rays
}

/// Primitive collections of `X_d`; all have two elements.
///
/// Besides the pairs mixing the `v` and `w` rays, each hexagonal block
/// `{±e_{2j-1}, ±e_{2j}, ±(e_{2j-1} - e_{2j})}` contributes the non-adjacent
/// pairs `{e_{2j-1}, -e_{2j}}` and `{-e_{2j-1}, e_{2j}}`: the ray
/// `e_{2j-1} - e_{2j}` lies in the relative interior of the first pair's span.
pub fn xd_primitive_pairs(d: usize) -> Vec<(usize, usize)> {
    let x = XdRays::new(d);
    let l = (d - 1) / 2;
    let mut pairs: Vec<(usize, usize)> = (1..=2 * l).map(|k| (x.v(2 * k - 1), x.v(2 * k))).collect();
    for j in 1..=l {
        pairs.push((x.w(2 * j - 1), x.w(2 * j)));
        pairs.push((x.w(2 * j - 1), x.v(4 * j - 2)));
        pairs.push((x.w(2 * j - 1), x.v(4 * j - 1)));
        pairs.push((x.w(2 * j), x.v(4 * j - 3)));
        pairs.push((x.w(2 * j), x.v(4 * j)));
        pairs.push((x.v(4 * j - 3), x.v(4 * j)));
        pairs.push((x.v(4 * j - 2), x.v(4 * j - 1)));
    }
    pairs.push((x.w(0), x.v(0)));
    pairs
}

fn xd(d: usize) -> Result<Fan> {
    let rays = xd_rays(d);
    let cones = maximal_cones_from_primitive_pairs(d, &rays, &xd_primitive_pairs(d))?;
    Fan::new(d, rays, cones)
}
