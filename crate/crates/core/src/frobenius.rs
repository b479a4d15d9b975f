//! Thomsen's splitting of `((π_p)_* O(D))^∨` into line bundles `O(D_v)`,
//! `v ∈ [0, p)^n`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::divisor::{canonical_divisor, divisor_class, linearly_equivalent, DivisorClass, TorusDivisor};
use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::lattice::{IntMatrix, IntVector};

/// Largest `p^n` accepted by [`thomsen_split`].
pub const MAX_SPLIT_VECTORS: u64 = 1 << 24;

/// Local data of a divisor relative to a fixed base cone `l`.
#[derive(Clone, Debug)]
pub struct ThomsenContext<'a> {
    fan: &'a Fan,
    base_cone: usize,
    divisor: TorusDivisor,
    /// `C_{li} = B_i^{-1} B_l = A_i B_l`.
    transitions: Vec<IntMatrix>,
    /// `u_{li} = u_i - C_{li} u_l`.
    shifts: Vec<IntVector>,
}

impl<'a> ThomsenContext<'a> {
    /// `u_i` is the local equation exponent of `D` on cone `i`, i.e. the
    /// coefficients of `D` on the rays of the cone, in cone order.
    pub fn new(fan: &'a Fan, d: &TorusDivisor, base_cone: usize) -> Result<Self> {
        d.check_on(fan)?;
        let cones = fan.max_cones();
        if base_cone >= cones.len() {
            return Err(Error::InvalidArgument(format!(
                "base cone {base_cone} out of range (fan has {} maximal cones)",
                cones.len()
            )));
        }
        let inverses = fan.cone_inverses()?;
        let local = |i: usize| IntVector::new(cones[i].iter().map(|&j| d.coeffs()[j].clone()).collect());
        let b_l = &inverses[base_cone];
        let u_l = local(base_cone);
        let transitions: Vec<IntMatrix> = (0..cones.len()).map(|i| &fan.cone_matrix(i) * b_l).collect();
        let shifts = transitions
            .iter()
            .enumerate()
            .map(|(i, c)| &local(i) - &c.mul_vec(&u_l))
            .collect();
        Ok(ThomsenContext {
            fan,
            base_cone,
            divisor: d.clone(),
            transitions,
            shifts,
        })
    }

    pub fn fan(&self) -> &Fan {
        self.fan
    }

    pub fn base_cone(&self) -> usize {
        self.base_cone
    }

    pub fn divisor(&self) -> &TorusDivisor {
        &self.divisor
    }

    pub fn transition(&self, i: usize) -> &IntMatrix {
        &self.transitions[i]
    }

    pub fn shift(&self, i: usize) -> &IntVector {
        &self.shifts[i]
    }

    /// Functionals `l_{σ_i} = B_i h_i` for every maximal cone.
    pub fn local_functionals(&self, p: u64, v: &IntVector) -> Result<Vec<IntVector>> {
        let n = self.fan.dim();
        if p == 0 {
            return Err(Error::InvalidArgument("p must be at least 1".into()));
        }
        if v.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.dim() });
        }
        let pb = BigInt::from(p);
        if v.entries().iter().any(|x| x < &BigInt::zero() || x >= &pb) {
            return Err(Error::InvalidArgument(format!("{v} is not in [0, {p})^{n}")));
        }
        let inverses = self.fan.cone_inverses()?;
        Ok(self
            .transitions
            .iter()
            .zip(&self.shifts)
            .zip(inverses)
            .map(|((c, u), b)| {
                let w = &c.mul_vec(v) + u;
                let h = IntVector::new(w.entries().iter().map(|x| x.div_floor(&pb)).collect());
                b.mul_vec(&h)
            })
            .collect())
    }
}

/// The summand `D_v` with `β_v^j = -<l_{σ_k}, v_j>` for any cone `σ_k ∋ v_j`.
pub fn summand_divisor(ctx: &ThomsenContext<'_>, p: u64, v: &IntVector) -> Result<TorusDivisor> {
    let fan = ctx.fan;
    let functionals = ctx.local_functionals(p, v)?;
    let mut beta: Vec<Option<(usize, BigInt)>> = vec![None; fan.ray_count()];
    for (k, cone) in fan.max_cones().iter().enumerate() {
        for &j in cone {
            let b = -functionals[k].dot(fan.ray(j));
            match &beta[j] {
                None => beta[j] = Some((k, b)),
                Some((k0, b0)) if *b0 != b => {
                    return Err(Error::InconsistentGluing {
                        ray: j,
                        first: format!("{b0} (cone {k0})"),
                        second: format!("{b} (cone {k})"),
                    })
                }
                Some(_) => {}
            }
        }
    }
    let coeffs = beta
        .into_iter()
        .enumerate()
        .map(|(j, b)| {
            b.map(|(_, x)| x)
                .ok_or_else(|| Error::NotComplete(format!("ray {j} lies in no maximal cone")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TorusDivisor::new(IntVector::new(coeffs)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitClass {
    pub class: DivisorClass,
    pub multiplicity: u64,
    /// Summand of the lexicographically smallest `v` in this class.
    pub representative: TorusDivisor,
    pub first_vector: IntVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingResult {
    pub p: u64,
    pub n: usize,
    pub base_cone: usize,
    pub divisor: TorusDivisor,
    /// Sorted by representative coefficients.
    pub classes: Vec<SplitClass>,
    /// `Σ_v D_v`.
    pub total: TorusDivisor,
}

impl SplittingResult {
    pub fn multiplicities(&self) -> BTreeMap<DivisorClass, u64> {
        self.classes.iter().map(|c| (c.class.clone(), c.multiplicity)).collect()
    }

    pub fn class_set(&self) -> BTreeSet<DivisorClass> {
        self.classes.iter().map(|c| c.class.clone()).collect()
    }

    pub fn representatives(&self) -> Vec<TorusDivisor> {
        self.classes.iter().map(|c| c.representative.clone()).collect()
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.classes.iter().map(|c| c.multiplicity).sum()
    }
}

fn vector_count(p: u64, n: usize) -> Result<u64> {
    if p == 0 {
        return Err(Error::InvalidArgument("p must be at least 1".into()));
    }
    u32::try_from(n)
        .ok()
        .and_then(|n| p.checked_pow(n))
        .filter(|&c| c <= MAX_SPLIT_VECTORS)
        .ok_or_else(|| {
            Error::InvalidArgument(format!("p^n = {p}^{n} exceeds {MAX_SPLIT_VECTORS} summands"))
        })
}

/// Digits of `index` in base `p`, most significant first, so that index order
/// is lexicographic order on `[0, p)^n`.
fn nth_vector(index: u64, p: u64, n: usize) -> IntVector {
    let mut digits = vec![BigInt::zero(); n];
    let mut t = index;
    for slot in digits.iter_mut().rev() {
        *slot = BigInt::from(t % p);
        t /= p;
    }
    IntVector::new(digits)
}

struct Partial {
    classes: BTreeMap<DivisorClass, (u64, u64, TorusDivisor)>,
    total: TorusDivisor,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        for (class, (count, index, rep)) in other.classes {
            self.classes
                .entry(class)
                .and_modify(|e| {
                    e.0 += count;
                    if index < e.1 {
                        e.1 = index;
                        e.2 = rep.clone();
                    }
                })
                .or_insert((count, index, rep));
        }
        self.total = &self.total + &other.total;
        self
    }
}

pub fn thomsen_split(fan: &Fan, d: &TorusDivisor, p: u64, base_cone: usize) -> Result<SplittingResult> {
    let n = fan.dim();
    let count = vector_count(p, n)?;
    let ctx = ThomsenContext::new(fan, d, base_cone)?;
    fan.pic_projection()?;
    let zero = || Partial {
        classes: BTreeMap::new(),
        total: TorusDivisor::zero(fan.ray_count()),
    };
    let merged = (0..count)
        .into_par_iter()
        .map(|index| -> Result<Partial> {
            let v = nth_vector(index, p, n);
            let dv = summand_divisor(&ctx, p, &v)?;
            let class = divisor_class(fan, &dv)?;
            let mut part = zero();
            part.total = dv.clone();
            part.classes.insert(class, (1, index, dv));
            Ok(part)
        })
        .try_reduce(zero, |a, b| Ok(a.merge(b)))?;
    let mut classes: Vec<SplitClass> = merged
        .classes
        .into_iter()
        .map(|(class, (multiplicity, index, representative))| SplitClass {
            class,
            multiplicity,
            representative,
            first_vector: nth_vector(index, p, n),
        })
        .collect();
    classes.sort_by(|a, b| a.representative.cmp(&b.representative));
    Ok(SplittingResult {
        p,
        n,
        base_cone,
        divisor: d.clone(),
        classes,
        total: merged.total,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingReport {
    pub multiplicity_sum: u64,
    pub expected_sum: u64,
    /// `2 Σ D_v ~ p^{n-1}(p-1)(-K)`; only meaningful for `D = 0`.
    pub c1_identity: Option<bool>,
    pub second_base_cone: Option<usize>,
    /// Same class-to-multiplicity association from the second base cone.
    pub base_cone_agrees: Option<bool>,
}

impl SplittingReport {
    pub fn passed(&self) -> bool {
        self.multiplicity_sum == self.expected_sum
            && self.c1_identity != Some(false)
            && self.base_cone_agrees != Some(false)
    }
}

pub fn verify_splitting_invariants(fan: &Fan, r: &SplittingResult) -> Result<SplittingReport> {
    let expected_sum = vector_count(r.p, r.n)?;
    let c1_identity = if r.divisor.is_zero() {
        let k = canonical_divisor(fan);
        let factor = BigInt::from(r.p).pow(r.n as u32 - 1) * (BigInt::from(r.p) - BigInt::one());
        let lhs = r.total.scale(&BigInt::from(2));
        let rhs = (-&k).scale(&factor);
        Some(linearly_equivalent(fan, &lhs, &rhs)?)
    } else {
        None
    };
    let cones = fan.max_cones().len();
    let (second_base_cone, base_cone_agrees) = if cones > 1 {
        let other = (r.base_cone + 1) % cones;
        let again = thomsen_split(fan, &r.divisor, r.p, other)?;
        (Some(other), Some(again.multiplicities() == r.multiplicities()))
    } else {
        (None, None)
    };
    Ok(SplittingReport {
        multiplicity_sum: r.total_multiplicity(),
        expected_sum,
        c1_identity,
        second_base_cone,
        base_cone_agrees,
    })
}

/// True iff the class sets agree for every listed `p`.
pub fn stabilization_check(fan: &Fan, d: &TorusDivisor, ps: &[u64]) -> Result<bool> {
    let mut first: Option<BTreeSet<DivisorClass>> = None;
    for &p in ps {
        let set = thomsen_split(fan, d, p, 0)?.class_set();
        match &first {
            None => first = Some(set),
            Some(s) if *s != set => return Ok(false),
            Some(_) => {}
        }
    }
    Ok(true)
}
