//! Ordered collections of line bundles and their (strong) exceptionality.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use rayon::prelude::*;

use crate::cohomology::{CohomologyEngine, CohomologyTable};
use crate::divisor::{divisor_class, TorusDivisor};
use crate::error::{Error, Result};
use crate::fan::{fan_product, Fan};

/// Line bundles `O(d_0), ..., O(d_m)` on one fan, in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collection {
    bundles: Vec<TorusDivisor>,
}

impl Collection {
    pub fn new(fan: &Fan, bundles: Vec<TorusDivisor>) -> Result<Self> {
        if bundles.is_empty() {
            return Err(Error::InvalidArgument("empty collection".into()));
        }
        for d in &bundles {
            d.check_on(fan)?;
        }
        Ok(Collection { bundles })
    }

    pub fn bundles(&self) -> &[TorusDivisor] {
        &self.bundles
    }

    pub fn len(&self) -> usize {
        self.bundles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bundles.is_empty()
    }

    pub fn reordered(&self, order: &[usize]) -> Collection {
        Collection {
            bundles: order.iter().map(|&i| self.bundles[i].clone()).collect(),
        }
    }

    /// Every member tensored by `O(t)`.
    pub fn twisted(&self, t: &TorusDivisor) -> Collection {
        Collection {
            bundles: self.bundles.iter().map(|d| d + t).collect(),
        }
    }
}

/// `table[j][k] = H^•(O(d_k - d_j))`, i.e. `Ext^•(O(d_j), O(d_k))`.
pub type ExtTable = Vec<Vec<CohomologyTable>>;

pub fn ext_table(engine: &CohomologyEngine<'_>, c: &Collection) -> Result<ExtTable> {
    let m = c.len();
    let b = c.bundles();
    let flat = (0..m * m)
        .into_par_iter()
        .map(|t| {
            let (j, k) = (t / m, t % m);
            engine.cohomology(&(&b[k] - &b[j]))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut it = flat.into_iter();
    Ok((0..m).map(|_| it.by_ref().take(m).collect()).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `Ext^•(O(d_i), O(d_i))` is not `(1, 0, ..., 0)`.
    NotExceptional { index: usize, dims: Vec<u64> },
    /// `j < k` but `Ext^•(O(d_k), O(d_j)) ≠ 0`.
    Backward { j: usize, k: usize, dims: Vec<u64> },
    /// `j < k` but some higher `Ext^i(O(d_j), O(d_k)) ≠ 0`.
    HigherForward { j: usize, k: usize, dims: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionalVerdict {
    pub pass: bool,
    pub violations: Vec<Violation>,
    pub table: ExtTable,
}

pub fn check_strongly_exceptional(engine: &CohomologyEngine<'_>, c: &Collection) -> Result<ExceptionalVerdict> {
    let table = ext_table(engine, c)?;
    let m = c.len();
    let mut violations = Vec::new();
    for i in 0..m {
        if !table[i][i].is_trivial() {
            violations.push(Violation::NotExceptional {
                index: i,
                dims: table[i][i].dims.clone(),
            });
        }
    }
    for j in 0..m {
        for k in j + 1..m {
            if !table[k][j].is_zero() {
                violations.push(Violation::Backward {
                    j,
                    k,
                    dims: table[k][j].dims.clone(),
                });
            }
            if !table[j][k].higher_vanish() {
                violations.push(Violation::HigherForward {
                    j,
                    k,
                    dims: table[j][k].dims.clone(),
                });
            }
        }
    }
    Ok(ExceptionalVerdict {
        pass: violations.is_empty(),
        violations,
        table,
    })
}

pub fn is_strongly_exceptional(fan: &Fan, c: &Collection) -> Result<ExceptionalVerdict> {
    check_strongly_exceptional(&CohomologyEngine::new(fan)?, c)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderSearch {
    /// Indices into the input, in a strongly exceptional order.
    Found(Vec<usize>),
    /// Neither `j` before `k` nor `k` before `j` is admissible.
    BothBlocked { j: usize, k: usize },
    /// Forced orientations `c_0 -> c_1 -> ... -> c_0`.
    Cycle(Vec<usize>),
}

/// `j` may precede `k` iff `H^•(d_j - d_k) = 0` and `H^{≥1}(d_k - d_j) = 0`.
/// Pairs with a single admissible orientation become edges of a topological
/// sort; ties are broken by input index.
pub fn find_strong_order(fan: &Fan, bundles: &[TorusDivisor]) -> Result<OrderSearch> {
    let c = Collection::new(fan, bundles.to_vec())?;
    let mut seen = BTreeMap::new();
    for (i, d) in bundles.iter().enumerate() {
        if let Some(&first) = seen.get(&divisor_class(fan, d)?) {
            return Err(Error::DuplicateBundle { first, second: i });
        }
        seen.insert(divisor_class(fan, d)?, i);
    }
    let engine = CohomologyEngine::new(fan)?;
    let table = ext_table(&engine, &c)?;
    let m = bundles.len();
    if let Some(index) = (0..m).find(|&i| !table[i][i].is_trivial()) {
        return Err(Error::NotExceptionalMember { index });
    }
    let admissible = |j: usize, k: usize| table[k][j].is_zero() && table[j][k].higher_vanish();
    let mut succ = vec![Vec::new(); m];
    let mut indegree = vec![0usize; m];
    for j in 0..m {
        for k in j + 1..m {
            let (jk, kj) = (admissible(j, k), admissible(k, j));
            let edge = match (jk, kj) {
                (false, false) => return Ok(OrderSearch::BothBlocked { j, k }),
                (true, false) => Some((j, k)),
                (false, true) => Some((k, j)),
                (true, true) => None,
            };
            if let Some((a, b)) = edge {
                succ[a].push(b);
                indegree[b] += 1;
            }
        }
    }
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..m).filter(|&i| indegree[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(m);
    while let Some(Reverse(i)) = ready.pop() {
        order.push(i);
        for &k in &succ[i] {
            indegree[k] -= 1;
            if indegree[k] == 0 {
                ready.push(Reverse(k));
            }
        }
    }
    if order.len() == m {
        return Ok(OrderSearch::Found(order));
    }
    Ok(OrderSearch::Cycle(find_cycle(&succ, &indegree)))
}

/// Some cycle among the vertices left with positive in-degree.
fn find_cycle(succ: &[Vec<usize>], indegree: &[usize]) -> Vec<usize> {
    let stuck = |i: usize| indegree[i] > 0;
    // walk backwards along stuck predecessors until a vertex repeats
    let mut pred = vec![None; succ.len()];
    for (a, out) in succ.iter().enumerate() {
        for &b in out {
            if stuck(a) && stuck(b) {
                pred[b] = Some(a);
            }
        }
    }
    let start = (0..succ.len()).find(|&i| stuck(i)).expect("a stuck vertex exists");
    let mut pos = vec![None; succ.len()];
    let mut path = Vec::new();
    let mut cur = start;
    loop {
        if let Some(p) = pos[cur] {
            let mut cycle: Vec<usize> = path[p..].to_vec();
            cycle.reverse();
            return cycle;
        }
        pos[cur] = Some(path.len());
        path.push(cur);
        cur = pred[cur].expect("stuck vertices have stuck predecessors");
    }
}

/// External tensor products `L ⊠ L'` on the product fan, with the index in
/// `c1` varying fastest.
pub fn box_product(f1: &Fan, c1: &Collection, f2: &Fan, c2: &Collection) -> Result<(Fan, Collection)> {
    for (factor, (f, c)) in [(f1, c1), (f2, c2)].into_iter().enumerate() {
        if !is_strongly_exceptional(f, c)?.pass {
            return Err(Error::FactorNotStronglyExceptional { factor: factor + 1 });
        }
    }
    let fan = fan_product(f1, f2)?;
    let bundles = c2
        .bundles()
        .iter()
        .flat_map(|b| c1.bundles().iter().map(move |a| a.concat(b)))
        .collect();
    let c = Collection::new(&fan, bundles)?;
    Ok((fan, c))
}
