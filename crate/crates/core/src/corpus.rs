//! Deterministic instance enumeration: every preconvexity on tiny grounds,
//! every topology, every labelled poset and lattice at desk scale, plus
//! seeded random families for the larger sizes. The test and acceptance
//! suites sweep these corpora.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use crate::sets::{intersection_closure, Ground, GroundSet, SetFamily};
use crate::spaces::{PreconvexSpace, TopConvexSpace};
use crate::stone::{lattice_points, FiniteLattice, PointedLattice};

pub fn ground(n: usize) -> Ground {
    GroundSet::indexed(n).expect("desk-scale ground")
}

/// All intersection-closed families containing the empty and full sets on an
/// `n`-element ground. Exponential in `2^n`; capped at `n ≤ 4`.
pub fn preconvex_families(n: usize) -> Vec<SetFamily> {
    assert!(
        n <= 4,
        "exhaustive preconvexity enumeration is doubly exponential"
    );
    let g = ground(n);
    let full = g.full_mask();
    // Proper nonempty subsets are free bits; the empty and full sets are
    // forced members.
    let middle: Vec<u128> = (1..full).collect();
    let mut out = Vec::new();
    for pick in 0u64..(1 << middle.len()) {
        let mut masks = vec![0, full];
        for (i, &m) in middle.iter().enumerate() {
            if pick >> i & 1 == 1 {
                masks.push(m);
            }
        }
        let fam = SetFamily::from_masks(&g, masks).unwrap();
        if fam.is_pairwise_intersection_closed() {
            out.push(fam);
        }
    }
    out
}

/// All closed-set families of topologies (union- and intersection-closed,
/// containing the empty and full sets) on an `n`-element ground.
pub fn topologies(n: usize) -> Vec<SetFamily> {
    assert!(
        n <= 4,
        "exhaustive topology enumeration is doubly exponential"
    );
    let g = ground(n);
    let full = g.full_mask();
    let middle: Vec<u128> = (1..full).collect();
    let mut out = Vec::new();
    for pick in 0u64..(1 << middle.len()) {
        let mut masks = vec![0, full];
        for (i, &m) in middle.iter().enumerate() {
            if pick >> i & 1 == 1 {
                masks.push(m);
            }
        }
        let fam = SetFamily::from_masks(&g, masks).unwrap();
        if fam.is_pairwise_intersection_closed() && fam.is_pairwise_union_closed() {
            out.push(fam);
        }
    }
    out
}

/// Seeded random intersection-closed families containing the empty and full
/// sets: random generators closed off under intersection. Deterministic for
/// a fixed seed.
pub fn seeded_preconvex_families(n: usize, count: usize, seed: u64) -> Vec<SetFamily> {
    let g = ground(n);
    let full = g.full_mask();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let generators = rng.random_range(0..=n + 2);
        let mut masks = vec![0u128, full];
        for _ in 0..generators {
            masks.push(rng.random_range(0..=u128::from(u64::MAX)) & full);
        }
        let fam = SetFamily::from_masks(&g, masks).unwrap();
        out.push(intersection_closure(&fam));
    }
    out
}

/// Seeded random set families (no closure applied), for closure-operator
/// property sweeps.
pub fn seeded_families(n: usize, max_members: usize, count: usize, seed: u64) -> Vec<SetFamily> {
    let g = ground(n);
    let full = g.full_mask();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let members = rng.random_range(0..=max_members);
        let masks: Vec<u128> = (0..members)
            .map(|_| rng.random_range(0..=u128::from(u64::MAX)) & full)
            .collect();
        out.push(SetFamily::from_masks(&g, masks).unwrap());
    }
    out
}

/// Every preconvexity space on grounds of one, two, and three elements.
pub fn preconvex_corpus() -> Vec<PreconvexSpace> {
    (1..=3)
        .flat_map(|n| preconvex_families(n).into_iter().map(PreconvexSpace::new))
        .collect()
}

/// Every topological convexity space on grounds of one, two, and three
/// elements: each topology paired with each preconvexity as the convex
/// family (directed-union closure is automatic on finite grounds).
pub fn tc_corpus() -> Vec<TopConvexSpace> {
    let mut out = Vec::new();
    for n in 1..=3 {
        let convexities = preconvex_families(n);
        for closed in topologies(n) {
            for convex in &convexities {
                out.push(TopConvexSpace::new(closed.clone(), convex.clone()).unwrap());
            }
        }
    }
    out
}

/// All labelled partial orders on `{0..n}`, as `n*n` row-major `leq`
/// matrices. Built by extending each poset with one new element at a time,
/// choosing a downset of predecessors below it and a compatible upset above.
pub fn all_posets(n: usize) -> Vec<Vec<bool>> {
    assert!(
        n <= 7,
        "labelled poset enumeration grows super-exponentially"
    );
    // Represent intermediate orders over the first k elements.
    let mut current: Vec<Vec<bool>> = vec![vec![true]];
    if n == 0 {
        return vec![vec![]];
    }
    let mut k = 1;
    while k < n {
        let mut next = Vec::new();
        for leq in &current {
            let at = |a: usize, b: usize| leq[a * k + b];
            // Downsets/upsets of the existing poset, as masks over 0..k.
            let down_masks: Vec<u32> = (0u32..1 << k)
                .filter(|&m| {
                    (0..k).all(|a| m >> a & 1 == 0 || (0..k).all(|b| !at(b, a) || m >> b & 1 == 1))
                })
                .collect();
            let up_masks: Vec<u32> = (0u32..1 << k)
                .filter(|&m| {
                    (0..k).all(|a| m >> a & 1 == 0 || (0..k).all(|b| !at(a, b) || m >> b & 1 == 1))
                })
                .collect();
            for &d in &down_masks {
                for &u in &up_masks {
                    if d & u != 0 {
                        continue;
                    }
                    // Transitivity through the new element: everything below
                    // it must be below everything above it.
                    let coherent = (0..k)
                        .all(|a| d >> a & 1 == 0 || (0..k).all(|b| u >> b & 1 == 0 || at(a, b)));
                    if !coherent {
                        continue;
                    }
                    let m = k + 1;
                    let mut bigger = vec![false; m * m];
                    for a in 0..k {
                        for b in 0..k {
                            bigger[a * m + b] = at(a, b);
                        }
                    }
                    bigger[k * m + k] = true;
                    for a in 0..k {
                        if d >> a & 1 == 1 {
                            bigger[a * m + k] = true;
                        }
                        if u >> a & 1 == 1 {
                            bigger[k * m + a] = true;
                        }
                    }
                    next.push(bigger);
                }
            }
        }
        current = next;
        k += 1;
    }
    current
}

/// All labelled lattices on `{0..n}` elements.
pub fn all_lattices(n: usize) -> Vec<Arc<FiniteLattice>> {
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    all_posets(n)
        .into_iter()
        .filter_map(|leq| {
            FiniteLattice::from_leq(labels.clone(), leq)
                .ok()
                .map(Arc::new)
        })
        .collect()
}

/// Every chosen subset satisfying generation, valid or not as points.
pub fn generating_subsets(l: &Arc<FiniteLattice>) -> Vec<PointedLattice> {
    let n = l.size();
    assert!(n <= 16);
    (0u32..1 << n)
        .filter_map(|pick| {
            let chosen: Vec<usize> = (0..n).filter(|i| pick >> i & 1 == 1).collect();
            PointedLattice::new(l, chosen).ok()
        })
        .collect()
}

/// Every generating subset consisting of points, for the Stone side.
pub fn point_generating_subsets(l: &Arc<FiniteLattice>) -> Vec<PointedLattice> {
    let points = lattice_points(l);
    generating_subsets(l)
        .into_iter()
        .filter(|pl| pl.chosen().iter().all(|s| points.contains(s)))
        .collect()
}
