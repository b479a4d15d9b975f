//! Line-bundle cohomology from the M-graded decomposition
//! `H^i(O(D))_m = H̃^{i-1}(V_{D,m})`, where `V_{D,m}` is the full subcomplex
//! on the rays with `<m, v_j> < -a_j`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::divisor::TorusDivisor;
use crate::error::{Error, Result};
use crate::fan::{Fan, FaceComplex, RaySet};
use crate::lattice::IntMatrix;

/// Reduced rational cohomology `[H̃^{-1}, H̃^0, ..., H̃^{top}]`.
pub fn reduced_cohomology(c: &FaceComplex) -> Vec<usize> {
    let counts = c.face_counts();
    let by_size: Vec<Vec<RaySet>> = (0..counts.len())
        .map(|s| c.faces().iter().copied().filter(|f| f.len() == s).collect())
        .collect();
    // ranks[s] = rank of the coboundary from size-s faces to size-(s+1) faces
    let ranks: Vec<usize> = (0..by_size.len())
        .map(|s| match by_size.get(s + 1) {
            Some(upper) if !upper.is_empty() => coboundary(&by_size[s], upper).rank(),
            _ => 0,
        })
        .collect();
    (0..by_size.len())
        .map(|s| by_size[s].len() - ranks[s] - if s > 0 { ranks[s - 1] } else { 0 })
        .collect()
}

fn coboundary(lower: &[RaySet], upper: &[RaySet]) -> IntMatrix {
    let index: HashMap<RaySet, usize> = lower.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let mut m = IntMatrix::zeros(upper.len(), lower.len());
    for (r, &f) in upper.iter().enumerate() {
        for (pos, v) in f.iter().enumerate() {
            let col = index[&f.without(v)];
            m.set(r, col, BigInt::from(if pos % 2 == 0 { 1 } else { -1 }));
        }
    }
    m
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyOptions {
    /// Scan exactly `[-B, B]^n` instead of the adaptive search.
    pub box_radius: Option<i64>,
    /// The adaptive search gives up beyond `ceiling_factor` times the initial radius.
    pub ceiling_factor: i64,
    /// Keep every contributing degree in the table.
    pub record_degrees: bool,
}

impl Default for CohomologyOptions {
    fn default() -> Self {
        CohomologyOptions {
            box_radius: None,
            ceiling_factor: 1 << 10,
            record_degrees: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyTable {
    /// `h^0, ..., h^n`.
    pub dims: Vec<u64>,
    pub box_radius: i64,
    /// Degrees `m` with a nonzero graded piece and that piece; only filled
    /// when requested.
    pub contributions: Vec<(Vec<i64>, Vec<u64>)>,
}

impl CohomologyTable {
    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&h| h == 0)
    }

    pub fn higher_vanish(&self) -> bool {
        self.dims.iter().skip(1).all(|&h| h == 0)
    }

    /// `(1, 0, ..., 0)`.
    pub fn is_trivial(&self) -> bool {
        self.dims.first() == Some(&1) && self.higher_vanish()
    }

    pub fn euler_characteristic(&self) -> i128 {
        self.dims
            .iter()
            .enumerate()
            .map(|(i, &h)| if i % 2 == 0 { h as i128 } else { -(h as i128) })
            .sum()
    }
}

/// Shared state for repeated cohomology computations on one fan; graded
/// pieces are cached by their vertex set.
#[derive(Debug)]
pub struct CohomologyEngine<'a> {
    fan: &'a Fan,
    rays: Vec<Vec<i64>>,
    complex: FaceComplex,
    cache: Mutex<HashMap<RaySet, Arc<Vec<u64>>>>,
}

impl<'a> CohomologyEngine<'a> {
    pub fn new(fan: &'a Fan) -> Result<Self> {
        fan.cone_inverses()?;
        let rays = fan
            .rays()
            .iter()
            .map(|r| r.to_i64().ok_or_else(|| Error::Overflow(format!("ray {r} exceeds i64"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(CohomologyEngine {
            fan,
            rays,
            complex: FaceComplex::of_fan(fan),
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn fan(&self) -> &Fan {
        self.fan
    }

    /// `1 + max_j |a_j| * max_j ||v_j||_∞`.
    pub fn initial_radius(&self, d: &TorusDivisor) -> Result<i64> {
        d.check_on(self.fan)?;
        let a = d.coeffs().iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero);
        let v = self.rays.iter().flatten().map(|x| x.unsigned_abs()).max().unwrap_or(0);
        (a * BigInt::from(v) + BigInt::from(1))
            .to_i64()
            .ok_or_else(|| Error::Overflow("initial search radius exceeds i64".into()))
    }

    /// `[H̃^{-1}, ..., H̃^{n-1}]` of the full subcomplex on `vertices`.
    pub fn graded_piece(&self, vertices: RaySet) -> Arc<Vec<u64>> {
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&vertices) {
            return hit.clone();
        }
        let n = self.fan.dim();
        let mut dims: Vec<u64> = reduced_cohomology(&self.complex.restrict(vertices))
            .into_iter()
            .map(|x| x as u64)
            .collect();
        dims.resize(n + 1, 0);
        let dims = Arc::new(dims);
        self.cache
            .lock()
            .expect("cache lock")
            .entry(vertices)
            .or_insert(dims)
            .clone()
    }

    fn coeffs_i64(&self, d: &TorusDivisor) -> Result<Vec<i64>> {
        d.check_on(self.fan)?;
        d.to_i64().ok_or_else(|| Error::Overflow(format!("divisor {d} exceeds i64")))
    }

    fn support(&self, a: &[i64], m: &[i64]) -> RaySet {
        let mut s = RaySet::empty();
        for (j, v) in self.rays.iter().enumerate() {
            let dot: i128 = v.iter().zip(m).map(|(&x, &y)| x as i128 * y as i128).sum();
            if dot < -(a[j] as i128) {
                s.insert(j);
            }
        }
        s
    }

    /// Points of `[-r, r]^n` with `||m||_∞ = r`, grouped by support.
    fn shell_supports(&self, a: &[i64], r: i64) -> HashMap<RaySet, u64> {
        let n = self.fan.dim();
        if r == 0 {
            return HashMap::from([(self.support(a, &vec![0; n]), 1)]);
        }
        let mut blocks = Vec::new();
        for k in 0..n {
            for side in [-r, r] {
                blocks.push((k, side));
            }
        }
        blocks
            .into_par_iter()
            .flat_map_iter(|(k, side)| {
                // coordinates before k lie in (-r, r), after k in [-r, r]
                let inner = (2 * r - 1) as u64;
                let outer = (2 * r + 1) as u64;
                let count = inner.pow(k as u32) * outer.pow((n - k - 1) as u32);
                (0..count).map(move |idx| (k, side, idx, inner, outer))
            })
            .fold(
                || (HashMap::new(), vec![0i64; n]),
                |(mut map, mut m), (k, side, idx, inner, outer)| {
                    let mut t = idx;
                    for i in (0..n).rev() {
                        if i == k {
                            m[i] = side;
                        } else if i > k {
                            m[i] = (t % outer) as i64 - r;
                            t /= outer;
                        } else {
                            m[i] = (t % inner) as i64 - (r - 1);
                            t /= inner;
                        }
                    }
                    *map.entry(self.support(a, &m)).or_insert(0u64) += 1;
                    (map, m)
                },
            )
            .map(|(map, _)| map)
            .reduce(HashMap::new, |mut x, y| {
                for (k, v) in y {
                    *x.entry(k).or_insert(0) += v;
                }
                x
            })
    }

    fn shell_dims(&self, a: &[i64], r: i64) -> Vec<u64> {
        let n = self.fan.dim();
        let supports = self.shell_supports(a, r);
        let mut keys: Vec<(RaySet, u64)> = supports.into_iter().collect();
        keys.sort_by_key(|(s, _)| s.bits());
        let pieces: Vec<Arc<Vec<u64>>> = keys.par_iter().map(|&(s, _)| self.graded_piece(s)).collect();
        let mut dims = vec![0u64; n + 1];
        for ((_, count), piece) in keys.iter().zip(pieces) {
            for (acc, &x) in dims.iter_mut().zip(piece.iter()) {
                *acc += count * x;
            }
        }
        dims
    }

    fn record(&self, a: &[i64], radius: i64) -> Vec<(Vec<i64>, Vec<u64>)> {
        let n = self.fan.dim();
        let side = (2 * radius + 1) as u64;
        let total = side.pow(n as u32);
        let mut out: Vec<(Vec<i64>, Vec<u64>)> = (0..total)
            .into_par_iter()
            .filter_map(|idx| {
                let mut t = idx;
                let mut m = vec![0i64; n];
                for x in m.iter_mut().rev() {
                    *x = (t % side) as i64 - radius;
                    t /= side;
                }
                let piece = self.graded_piece(self.support(a, &m));
                piece.iter().any(|&x| x > 0).then(|| (m, piece.to_vec()))
            })
            .collect();
        out.sort();
        out
    }

    /// Cohomology from the graded pieces in `[-radius, radius]^n` only.
    pub fn fixed_box(&self, d: &TorusDivisor, radius: i64) -> Result<CohomologyTable> {
        if radius < 0 {
            return Err(Error::InvalidArgument(format!("box radius {radius} is negative")));
        }
        let a = self.coeffs_i64(d)?;
        let mut dims = vec![0u64; self.fan.dim() + 1];
        for r in 0..=radius {
            for (acc, x) in dims.iter_mut().zip(self.shell_dims(&a, r)) {
                *acc += x;
            }
        }
        Ok(CohomologyTable {
            dims,
            box_radius: radius,
            contributions: Vec::new(),
        })
    }

    /// Scans shells outward from the initial radius `B`, doubling `B` until
    /// shells `B - 1` and `B` both contribute nothing.
    pub fn compute(&self, d: &TorusDivisor, opts: &CohomologyOptions) -> Result<CohomologyTable> {
        let mut table = match opts.box_radius {
            Some(b) => self.fixed_box(d, b)?,
            None => self.adaptive(d, opts.ceiling_factor)?,
        };
        if opts.record_degrees {
            table.contributions = self.record(&self.coeffs_i64(d)?, table.box_radius);
        }
        Ok(table)
    }

    fn adaptive(&self, d: &TorusDivisor, ceiling_factor: i64) -> Result<CohomologyTable> {
        let a = self.coeffs_i64(d)?;
        let b0 = self.initial_radius(d)?;
        let ceiling = b0
            .checked_mul(ceiling_factor.max(1))
            .ok_or_else(|| Error::Overflow("search ceiling exceeds i64".into()))?;
        let mut dims = vec![0u64; self.fan.dim() + 1];
        let mut nonzero = Vec::new();
        let mut b = b0;
        loop {
            for r in nonzero.len() as i64..=b {
                let shell = self.shell_dims(&a, r);
                nonzero.push(shell.iter().any(|&x| x > 0));
                for (acc, x) in dims.iter_mut().zip(shell) {
                    *acc += x;
                }
            }
            if !nonzero[b as usize] && !nonzero[b as usize - 1] {
                return Ok(CohomologyTable {
                    dims,
                    box_radius: b,
                    contributions: Vec::new(),
                });
            }
            b *= 2;
            if b > ceiling {
                return Err(Error::BoxNotConverged { radius: b, ceiling });
            }
        }
    }

    pub fn cohomology(&self, d: &TorusDivisor) -> Result<CohomologyTable> {
        self.compute(d, &CohomologyOptions::default())
    }
}

pub fn line_bundle_cohomology(fan: &Fan, d: &TorusDivisor) -> Result<CohomologyTable> {
    CohomologyEngine::new(fan)?.cohomology(d)
}

pub fn line_bundle_cohomology_with(
    fan: &Fan,
    d: &TorusDivisor,
    opts: &CohomologyOptions,
) -> Result<CohomologyTable> {
    CohomologyEngine::new(fan)?.compute(d, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variety::{build_named, VarietySpec};

    fn complex(n: usize, facets: &[&[usize]]) -> FaceComplex {
        let f: Vec<RaySet> = facets.iter().map(|x| RaySet::from_indices(x.iter().copied())).collect();
        FaceComplex::from_facets(n, &f)
    }

    #[test]
    fn reduced_cohomology_examples() {
        assert_eq!(reduced_cohomology(&complex(3, &[])), vec![1]);
        assert_eq!(reduced_cohomology(&complex(2, &[&[0], &[1]])), vec![0, 1]);
        assert_eq!(reduced_cohomology(&complex(1, &[&[0]])), vec![0, 0]);
        let hexagon: Vec<Vec<usize>> = (0..6).map(|i| vec![i, (i + 1) % 6]).collect();
        let refs: Vec<&[usize]> = hexagon.iter().map(Vec::as_slice).collect();
        assert_eq!(reduced_cohomology(&complex(6, &refs)), vec![0, 0, 1]);
        let dp3 = build_named(&VarietySpec::DelPezzo(3)).unwrap();
        assert_eq!(reduced_cohomology(&FaceComplex::of_fan(&dp3)), vec![0, 0, 1]);
        // filled triangle and its boundary
        assert_eq!(reduced_cohomology(&complex(3, &[&[0, 1, 2]])), vec![0, 0, 0, 0]);
        assert_eq!(
            reduced_cohomology(&complex(3, &[&[0, 1], &[1, 2], &[0, 2]])),
            vec![0, 0, 1]
        );
        // boundary of the octahedron
        let p1cubed = build_named(&"P:1*P:1*P:1".parse().unwrap()).unwrap();
        assert_eq!(reduced_cohomology(&FaceComplex::of_fan(&p1cubed)), vec![0, 0, 0, 1]);
    }

    fn h(spec: &str, d: &[i64]) -> Vec<u64> {
        let fan = build_named(&spec.parse().unwrap()).unwrap();
        line_bundle_cohomology(&fan, &TorusDivisor::from_i64(d)).unwrap().dims
    }

    #[test]
    fn classical_values() {
        assert_eq!(h("P:1", &[-1, -1]), vec![0, 1]);
        assert_eq!(h("P:1", &[2, 0]), vec![3, 0]);
        assert_eq!(h("P:1", &[-1, 0]), vec![0, 0]);
        assert_eq!(h("P:2", &[-1, -1, -1]), vec![0, 0, 1]);
        assert_eq!(h("P:2", &[0, 0, 2]), vec![6, 0, 0]);
        assert_eq!(h("P:2", &[0, 0, -5]), vec![0, 0, 6]);
        assert_eq!(h("P:3", &[0, 0, 0, 0]), vec![1, 0, 0, 0]);
        assert_eq!(h("dP:3", &[0; 6]), vec![1, 0, 0]);
        // O(-2, 0) on P1 x P1 has h^1 = h^0(O_{P1}) * h^1(O_{P1}(-2)) = 1
        assert_eq!(h("P:1*P:1", &[-2, 0, 0, 0]), vec![0, 1, 0]);
        // O(2, -2) on P1 x P1: h^1 = 3 * 1
        assert_eq!(h("P:1*P:1", &[2, 0, -2, 0]), vec![0, 3, 0]);
    }

    #[test]
    fn trivial_bundle_everywhere() {
        for spec in ["P:4", "F:2", "F:3", "dP:1", "dP:2", "Xd:3", "P:1*dP:3"] {
            let fan = build_named(&spec.parse().unwrap()).unwrap();
            let t = line_bundle_cohomology(&fan, &TorusDivisor::zero(fan.ray_count())).unwrap();
            assert!(t.is_trivial(), "{spec}: {:?}", t.dims);
        }
    }

    #[test]
    fn box_override_and_recording() {
        let fan = build_named(&VarietySpec::Projective(1)).unwrap();
        let d = TorusDivisor::from_i64(&[2, 0]);
        let opts = CohomologyOptions {
            box_radius: Some(1),
            ceiling_factor: 1 << 10,
            record_degrees: true,
        };
        let t = line_bundle_cohomology_with(&fan, &d, &opts).unwrap();
        assert_eq!((t.dims.clone(), t.box_radius), (vec![2, 0], 1));
        assert_eq!(t.contributions.len(), 2);
        assert!(line_bundle_cohomology_with(
            &fan,
            &d,
            &CohomologyOptions {
                box_radius: Some(-1),
                ..CohomologyOptions::default()
            }
        )
        .is_err());
    }

    #[test]
    fn ceiling_is_enforced() {
        // h^0(O(6)) on P^1 reaches radius 6 = B0 - 1, so one doubling is needed
        let fan = build_named(&VarietySpec::Projective(1)).unwrap();
        let d = TorusDivisor::from_i64(&[6, 0]);
        let with_factor = |f: i64| CohomologyOptions {
            ceiling_factor: f,
            ..CohomologyOptions::default()
        };
        let t = line_bundle_cohomology_with(&fan, &d, &with_factor(2)).unwrap();
        assert_eq!((t.dims, t.box_radius), (vec![7, 0], 14));
        let err = line_bundle_cohomology_with(&fan, &d, &with_factor(1));
        assert_eq!(err, Err(Error::BoxNotConverged { radius: 14, ceiling: 7 }));
    }
}
