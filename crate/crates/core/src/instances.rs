//! Generators for the worked example families: metric betweenness spaces,
//! lattice ideal spaces, the partial-order convexity on permutation groups
//! with its homomorphism classification, subgroup convexity, and measure
//! algebras with their symmetric-difference metric.

use std::sync::Arc;

use num_rational::Rational64;
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::all_posets;
use crate::sets::{Ground, GroundSet, SetError, SetFamily, Subset};
use crate::spaces::{preimage_mask, SpaceError, SpaceMap, TopConvexSpace};
use crate::stone::{FiniteLattice, LatticeError};
use crate::suplat::{sup_to_topconvex, PslError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("multiplication table is not a group: {0}")]
    NotAGroup(String),
    #[error("index map is not injective")]
    NotInjective,
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("no feasible search strategy for homomorphisms S{0} -> S{1}")]
    SearchSpaceTooLarge(usize, usize),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Psl(#[from] PslError),
}

// ---------------------------------------------------------------------------
// Permutations

/// A permutation of `{1..n}` stored as a 0-based image array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Permutation, InstanceError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || seen[v] {
                return Err(InstanceError::OutOfRange("not a permutation".to_string()));
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// 0-based application.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `self` after `other`: `(self ∘ other)(i) = self(other(i))`.
    pub fn compose_after(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.n()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v] = i;
        }
        Permutation { images }
    }

    pub fn inversions(&self) -> usize {
        let n = self.n();
        let mut count = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.images[i] > self.images[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// One-line notation with 1-based values, e.g. `"213"`.
    pub fn one_line(&self) -> String {
        self.images.iter().map(|&v| (v + 1).to_string()).collect()
    }

    /// All permutations of `{1..n}` in lexicographic one-line order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        let mut used = vec![false; n];
        fn rec(
            n: usize,
            used: &mut Vec<bool>,
            current: &mut Vec<usize>,
            out: &mut Vec<Permutation>,
        ) {
            if current.len() == n {
                out.push(Permutation {
                    images: current.clone(),
                });
                return;
            }
            for v in 0..n {
                if !used[v] {
                    used[v] = true;
                    current.push(v);
                    rec(n, used, current, out);
                    current.pop();
                    used[v] = false;
                }
            }
        }
        rec(n, &mut used, &mut current, &mut out);
        out
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn perm_index(perms: &[Permutation], p: &Permutation) -> usize {
    perms
        .binary_search(p)
        .expect("permutation enumeration is lexicographic")
}

/// Ground set of all permutations of `{1..n}`, labelled in one-line
/// notation, lexicographic order.
pub fn perm_ground(n: usize) -> Result<Ground, InstanceError> {
    if !(1..=5).contains(&n) {
        return Err(InstanceError::OutOfRange(format!(
            "permutation degree {n} not in 1..=5"
        )));
    }
    Ok(GroundSet::new(
        Permutation::all(n).iter().map(|p| p.one_line()),
    )?)
}

/// The half-space `{σ : σ(i) < σ(j)}` for 1-based positions `i ≠ j`.
pub fn half_space(n: usize, i: usize, j: usize) -> Result<Subset, InstanceError> {
    if i == j || !(1..=n).contains(&i) || !(1..=n).contains(&j) {
        return Err(InstanceError::OutOfRange(format!(
            "half-space positions ({i},{j})"
        )));
    }
    let ground = perm_ground(n)?;
    let mask = half_space_mask(&Permutation::all(n), i - 1, j - 1);
    Ok(Subset::from_mask(&ground, mask)?)
}

fn half_space_mask(perms: &[Permutation], i: usize, j: usize) -> u128 {
    let mut mask = 0u128;
    for (s, p) in perms.iter().enumerate() {
        if p.apply(i) < p.apply(j) {
            mask |= 1 << s;
        }
    }
    mask
}

/// Membership masks of the partial-order convexity on the permutations of
/// `{1..n}`: one set per partial order, plus the empty set.
pub fn perm_convex_masks(n: usize) -> Result<Vec<u128>, InstanceError> {
    if !(1..=5).contains(&n) {
        return Err(InstanceError::OutOfRange(format!(
            "permutation degree {n} not in 1..=5"
        )));
    }
    let perms = Permutation::all(n);
    let mut masks = vec![0u128];
    for leq in all_posets(n) {
        let mut mask = 0u128;
        'outer: for (s, p) in perms.iter().enumerate() {
            for a in 0..n {
                for b in 0..n {
                    if a != b && leq[a * n + b] && p.apply(a) > p.apply(b) {
                        continue 'outer;
                    }
                }
            }
            mask |= 1 << s;
        }
        masks.push(mask);
    }
    masks.sort_unstable();
    masks.dedup();
    Ok(masks)
}

/// The partial-order convexity space on the permutations of `{1..n}`: all
/// subsets closed, convex sets from partial orders. The closed family is the
/// full power set, so the space is only materialized for `n ≤ 3`; the
/// classification routines handle `n = 4, 5` without building it.
pub fn perm_space(n: usize) -> Result<TopConvexSpace, InstanceError> {
    if !(2..=3).contains(&n) {
        return Err(InstanceError::OutOfRange(format!(
            "perm space with explicit families needs 2 ≤ n ≤ 3, got {n}"
        )));
    }
    let ground = perm_ground(n)?;
    let closed = SetFamily::power_set(&ground)?;
    let convex = SetFamily::from_masks(&ground, perm_convex_masks(n)?)?;
    Ok(TopConvexSpace::new(closed, convex)?)
}

/// Cayley distance under adjacent transpositions: the inversion count of
/// `τσ⁻¹`.
pub fn coxeter_metric(n: usize) -> Result<FiniteMetric, InstanceError> {
    if !(1..=5).contains(&n) {
        return Err(InstanceError::OutOfRange(format!(
            "coxeter metric degree {n} not in 1..=5"
        )));
    }
    let perms = Permutation::all(n);
    let ground = perm_ground(n)?;
    let size = perms.len();
    let mut d = vec![Rational64::zero(); size * size];
    for (a, sigma) in perms.iter().enumerate() {
        for (b, tau) in perms.iter().enumerate() {
            let word = tau.compose_after(&sigma.inverse());
            d[a * size + b] = Rational64::from_integer(word.inversions() as i64);
        }
    }
    FiniteMetric::new(&ground, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaDeltaVariant {
    /// Rank by `≤`: order-preserving collapse.
    Alpha,
    /// Rank by `≥`: order-reversing collapse.
    Delta,
}

/// The induced surjection of permutation spaces along an injective position
/// map `g : {1..m} -> {1..n}` (1-based contents).
pub fn alpha_delta(
    n: usize,
    m: usize,
    g: &[usize],
    variant: AlphaDeltaVariant,
) -> Result<SpaceMap, InstanceError> {
    if g.len() != m || m > n {
        return Err(InstanceError::OutOfRange("position map arity".to_string()));
    }
    let mut seen = vec![false; n];
    for &v in g {
        if !(1..=n).contains(&v) || seen[v - 1] {
            return Err(InstanceError::NotInjective);
        }
        seen[v - 1] = true;
    }
    let dom_perms = Permutation::all(n);
    let cod_perms = Permutation::all(m);
    let dom = perm_ground(n)?;
    let cod = perm_ground(m)?;
    let assignment: Vec<usize> = dom_perms
        .iter()
        .map(|sigma| {
            let images: Vec<usize> = (0..m)
                .map(|i| {
                    let vi = sigma.apply(g[i] - 1);
                    let count = (0..m)
                        .filter(|&j| {
                            let vj = sigma.apply(g[j] - 1);
                            match variant {
                                AlphaDeltaVariant::Alpha => vj <= vi,
                                AlphaDeltaVariant::Delta => vj >= vi,
                            }
                        })
                        .count();
                    count - 1
                })
                .collect();
            let target = Permutation { images };
            perm_index(&cod_perms, &target)
        })
        .collect();
    Ok(SpaceMap::new(&dom, &cod, assignment)?)
}

/// Every `alpha_delta` assignment for injective maps `{1..m} -> {1..n}`,
/// deduplicated and sorted.
pub fn alpha_delta_assignments(n: usize, m: usize) -> Result<Vec<Vec<usize>>, InstanceError> {
    let mut out = Vec::new();
    let mut tuple: Vec<usize> = Vec::new();
    fn rec(n: usize, m: usize, tuple: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if tuple.len() == m {
            out.push(tuple.clone());
            return;
        }
        for v in 1..=n {
            if !tuple.contains(&v) {
                tuple.push(v);
                rec(n, m, tuple, out);
                tuple.pop();
            }
        }
    }
    rec(n, m, &mut tuple, &mut out);
    let mut assignments: Vec<Vec<usize>> = Vec::new();
    for g in out {
        for variant in [AlphaDeltaVariant::Alpha, AlphaDeltaVariant::Delta] {
            assignments.push(alpha_delta(n, m, &g, variant)?.assignment().to_vec());
        }
    }
    let _ = tuple;
    assignments.sort_unstable();
    assignments.dedup();
    Ok(assignments)
}

/// Brute-force check of the half-space covering property: for distinct
/// `i, j, k, l`, the only half-spaces containing `C_ij ∩ C_kl` are `C_ij`
/// and `C_kl`.
pub fn half_space_covers_holds(n: usize) -> Result<bool, InstanceError> {
    if !(4..=5).contains(&n) {
        return Err(InstanceError::OutOfRange(format!(
            "covering lemma needs four distinct positions and degree ≤ 5, got {n}"
        )));
    }
    let perms = Permutation::all(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    if [i, j, k, l]
                        .iter()
                        .collect::<std::collections::HashSet<_>>()
                        .len()
                        != 4
                    {
                        continue;
                    }
                    let inter = half_space_mask(&perms, i, j) & half_space_mask(&perms, k, l);
                    for s in 0..n {
                        for t in 0..n {
                            if s == t || (s, t) == (i, j) || (s, t) == (k, l) {
                                continue;
                            }
                            if inter & !half_space_mask(&perms, s, t) == 0 {
                                return Ok(false);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Checks that the proper nonempty convex sets with convex complement are
/// exactly the half-spaces. This grounds the completeness of the structured
/// homomorphism searches.
pub fn convex_complements_are_half_spaces(n: usize) -> Result<bool, InstanceError> {
    if !(2..=4).contains(&n) {
        return Err(InstanceError::OutOfRange(format!(
            "complement classification degree {n}"
        )));
    }
    let perms = Permutation::all(n);
    let masks = perm_convex_masks(n)?;
    let full = (1u128 << perms.len()) - 1;
    let mut both: Vec<u128> = masks
        .iter()
        .copied()
        .filter(|&m| m != 0 && m != full && masks.binary_search(&(full & !m)).is_ok())
        .collect();
    both.sort_unstable();
    let mut halves: Vec<u128> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| half_space_mask(&perms, i, j))
        .collect();
    halves.sort_unstable();
    halves.dedup();
    Ok(both == halves)
}

/// Result of the homomorphism classification between permutation spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PermClassification {
    /// Automorphism count versus the left-translation/reversal family
    /// `σ ↦ τσθ`.
    Automorphisms { count: usize, expected: usize },
    /// Surjective homomorphisms versus the induced-collapse family.
    Surjections {
        found: Vec<Vec<usize>>,
        expected: Vec<Vec<usize>>,
        matches: bool,
    },
}

/// Classifies automorphisms (`n = m ≤ 4`) or surjective homomorphisms
/// (`(3,2)`, `(4,2)` by raw sweep over all functions, `(4,3)` by half-space
/// preimage search).
pub fn classify_perm_homs(n: usize, m: usize) -> Result<PermClassification, InstanceError> {
    match (n, m) {
        (2, 2) | (3, 3) | (4, 4) => {
            let count = automorphisms_structured(n)?.len();
            let expected = translation_reversal_family(n).len();
            Ok(PermClassification::Automorphisms { count, expected })
        }
        (3, 2) | (4, 2) => {
            let found = surjections_raw(n)?;
            let expected = alpha_delta_assignments(n, 2)?;
            let matches = found == expected;
            Ok(PermClassification::Surjections {
                found,
                expected,
                matches,
            })
        }
        (4, 3) => {
            let found = surjections_half_space_search()?;
            let expected = alpha_delta_assignments(4, 3)?;
            let matches = found == expected;
            Ok(PermClassification::Surjections {
                found,
                expected,
                matches,
            })
        }
        _ => Err(InstanceError::SearchSpaceTooLarge(n, m)),
    }
}

/// The translation/reversal automorphism family, as assignment arrays
/// (deduplicated): position relabelings `σ ↦ σ∘τ`, optionally composed with
/// the value reversal `σ ↦ ρ∘σ`. Value relabelings `σ ↦ τ∘σ` other than the
/// reversal do not preserve the position-comparison half-spaces, so they do
/// not appear.
pub fn translation_reversal_family(n: usize) -> Vec<Vec<usize>> {
    let perms = Permutation::all(n);
    let rho = Permutation {
        images: (0..n).rev().collect(),
    };
    let mut out = Vec::new();
    for tau in &perms {
        for reverse in [false, true] {
            let assignment: Vec<usize> = perms
                .iter()
                .map(|sigma| {
                    let relabelled = sigma.compose_after(tau);
                    let image = if reverse {
                        rho.compose_after(&relabelled)
                    } else {
                        relabelled
                    };
                    perm_index(&perms, &image)
                })
                .collect();
            out.push(assignment);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Raw automorphism filter over all bijections of the ground set; only
/// feasible for `n ≤ 3` (720 candidates). The convention-free oracle for the
/// structured search.
pub fn automorphisms_raw(n: usize) -> Result<Vec<Vec<usize>>, InstanceError> {
    if !(2..=3).contains(&n) {
        return Err(InstanceError::OutOfRange(format!(
            "raw bijection filter degree {n}"
        )));
    }
    let size = factorial(n);
    let convex = perm_convex_masks(n)?;
    let mut out = Vec::new();
    for b in Permutation::all(size) {
        let assignment: Vec<usize> = (0..size).map(|i| b.apply(i)).collect();
        let mut inverse = vec![0; size];
        for (i, &v) in assignment.iter().enumerate() {
            inverse[v] = i;
        }
        let ok = convex.iter().all(|&c| {
            convex.binary_search(&preimage_mask(&assignment, c)).is_ok()
                && convex.binary_search(&preimage_mask(&inverse, c)).is_ok()
        });
        if ok {
            out.push(assignment);
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Raw automorphism count; see [`automorphisms_raw`].
pub fn aut_count_raw(n: usize) -> Result<usize, InstanceError> {
    Ok(automorphisms_raw(n)?.len())
}

// Upper index pairs (i, j), i < j, 0-based.
fn upper_pairs(m: usize) -> Vec<(usize, usize)> {
    (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .collect()
}

// Rebuilds the function behind per-pair half-space preimages: position
// ranking per point, rejecting inconsistent assignments.
fn rebuild_assignment(
    dom_size: usize,
    m: usize,
    pairs: &[(usize, usize)],
    pre: &[u128],
    cod_perms: &[Permutation],
) -> Option<Vec<usize>> {
    let mut assignment = Vec::with_capacity(dom_size);
    for s in 0..dom_size {
        // images[i] = m - 1 - #{j : τ(i) < τ(j)}
        let mut greater = vec![0usize; m];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if pre[k] >> s & 1 == 1 {
                greater[i] += 1;
            } else {
                greater[j] += 1;
            }
        }
        let images: Vec<usize> = greater.iter().map(|&c| m - 1 - c).collect();
        let mut seen = vec![false; m];
        for &v in &images {
            if seen[v] {
                return None;
            }
            seen[v] = true;
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if (images[i] < images[j]) != (pre[k] >> s & 1 == 1) {
                return None;
            }
        }
        assignment.push(perm_index(cod_perms, &Permutation { images }));
    }
    Some(assignment)
}

fn is_perm_hom(assignment: &[usize], dom_convex: &[u128], cod_convex: &[u128]) -> bool {
    cod_convex.iter().all(|&c| {
        dom_convex
            .binary_search(&preimage_mask(assignment, c))
            .is_ok()
    })
}

/// Exhaustive automorphism search through half-space preimages. Every
/// automorphism sends half-spaces to half-spaces by preimage (they are the
/// proper nonempty convex sets with convex complement, see
/// [`convex_complements_are_half_spaces`]), respecting complementation, so
/// the candidates are the signed pairings of upper index pairs.
pub fn automorphisms_structured(n: usize) -> Result<Vec<Vec<usize>>, InstanceError> {
    if !(2..=4).contains(&n) {
        return Err(InstanceError::SearchSpaceTooLarge(n, n));
    }
    let perms = Permutation::all(n);
    let size = perms.len();
    let convex = perm_convex_masks(n)?;
    let pairs = upper_pairs(n);
    let hs: Vec<Vec<u128>> = pairs
        .iter()
        .map(|&(i, j)| vec![half_space_mask(&perms, i, j), half_space_mask(&perms, j, i)])
        .collect();
    let k = pairs.len();
    let slot_perms = Permutation::all(k);

    let mut found = Vec::new();
    for slot in &slot_perms {
        for signs in 0u32..(1 << k) {
            let pre: Vec<u128> = (0..k)
                .map(|p| hs[slot.apply(p)][(signs >> p & 1) as usize])
                .collect();
            let Some(assignment) = rebuild_assignment(size, n, &pairs, &pre, &perms) else {
                continue;
            };
            // Bijective plus homomorphism in both directions.
            let mut seen = vec![false; size];
            if assignment
                .iter()
                .any(|&v| std::mem::replace(&mut seen[v], true))
            {
                continue;
            }
            let mut inverse = vec![0; size];
            for (i, &v) in assignment.iter().enumerate() {
                inverse[v] = i;
            }
            if is_perm_hom(&assignment, &convex, &convex) && is_perm_hom(&inverse, &convex, &convex)
            {
                found.push(assignment);
            }
        }
    }
    found.sort_unstable();
    found.dedup();
    Ok(found)
}

/// Raw sweep over all `2^(n!)` functions into the two-element permutation
/// space, keeping the surjective homomorphisms. The only nontrivial convex
/// preimages are the two fibres, which must both be convex and nonempty.
pub fn surjections_raw(n: usize) -> Result<Vec<Vec<usize>>, InstanceError> {
    if !(2..=4).contains(&n) {
        return Err(InstanceError::SearchSpaceTooLarge(n, 2));
    }
    let size = factorial(n);
    let convex = Arc::new(perm_convex_masks(n)?);
    let full = (1u128 << size) - 1;
    let total: u64 = 1 << size;

    let chunk: u64 = 1 << 16;
    let chunks: Vec<u64> = (0..total.div_ceil(chunk)).collect();
    let codes: Vec<u64> = chunks
        .par_iter()
        .flat_map_iter(|&c| {
            let convex = Arc::clone(&convex);
            let lo = c * chunk;
            let hi = (lo + chunk).min(total);
            (lo..hi).filter(move |&code| {
                let fibre_swap = code as u128;
                let fibre_id = full & !fibre_swap;
                code != 0
                    && code != (total - 1)
                    && convex.binary_search(&fibre_id).is_ok()
                    && convex.binary_search(&fibre_swap).is_ok()
            })
        })
        .collect();
    let mut found: Vec<Vec<usize>> = codes
        .into_iter()
        .map(|code| (0..size).map(|s| ((code >> s) & 1) as usize).collect())
        .collect();
    found.sort_unstable();
    Ok(found)
}

/// Half-space preimage search for surjective homomorphisms from the
/// four-element to the three-element permutation space: assign a half-space
/// preimage to each upper pair of the codomain, rebuild the function, and
/// keep surjective homomorphisms.
fn surjections_half_space_search() -> Result<Vec<Vec<usize>>, InstanceError> {
    let n = 4;
    let m = 3;
    let dom_perms = Permutation::all(n);
    let cod_perms = Permutation::all(m);
    let dom_size = dom_perms.len();
    let dom_convex = perm_convex_masks(n)?;
    let cod_convex = perm_convex_masks(m)?;
    let pairs = upper_pairs(m);

    let halves: Vec<u128> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| half_space_mask(&dom_perms, i, j))
        .collect();

    let mut found = Vec::new();
    let k = pairs.len();
    let total = halves.len().pow(k as u32);
    for code in 0..total {
        let mut c = code;
        let pre: Vec<u128> = (0..k)
            .map(|_| {
                let h = halves[c % halves.len()];
                c /= halves.len();
                h
            })
            .collect();
        let Some(assignment) = rebuild_assignment(dom_size, m, &pairs, &pre, &cod_perms) else {
            continue;
        };
        let mut seen = vec![false; cod_perms.len()];
        for &v in &assignment {
            seen[v] = true;
        }
        if !seen.iter().all(|&s| s) {
            continue;
        }
        if is_perm_hom(&assignment, &dom_convex, &cod_convex) {
            found.push(assignment);
        }
    }
    found.sort_unstable();
    found.dedup();
    Ok(found)
}

// ---------------------------------------------------------------------------
// Metric spaces

/// A finite metric with exact rational distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetric {
    points: Ground,
    d: Vec<Rational64>,
}

impl FiniteMetric {
    pub fn new(points: &Ground, d: Vec<Rational64>) -> Result<FiniteMetric, InstanceError> {
        let n = points.size();
        if d.len() != n * n {
            return Err(InstanceError::InvalidMetric(
                "matrix must be n*n".to_string(),
            ));
        }
        for i in 0..n {
            if !d[i * n + i].is_zero() {
                return Err(InstanceError::InvalidMetric(format!(
                    "d({0},{0}) must be 0",
                    points.label(i)
                )));
            }
            for j in 0..n {
                if d[i * n + j] != d[j * n + i] {
                    return Err(InstanceError::InvalidMetric(
                        "matrix must be symmetric".to_string(),
                    ));
                }
                if i != j && d[i * n + j] <= Rational64::zero() {
                    return Err(InstanceError::InvalidMetric(format!(
                        "d({},{}) must be positive",
                        points.label(i),
                        points.label(j)
                    )));
                }
                for k in 0..n {
                    if d[i * n + k] > d[i * n + j] + d[j * n + k] {
                        return Err(InstanceError::InvalidMetric(format!(
                            "triangle inequality fails at ({},{},{})",
                            points.label(i),
                            points.label(j),
                            points.label(k)
                        )));
                    }
                }
            }
        }
        Ok(FiniteMetric {
            points: points.clone(),
            d,
        })
    }

    pub fn points(&self) -> &Ground {
        &self.points
    }

    pub fn distance(&self, i: usize, j: usize) -> Rational64 {
        self.d[i * self.points.size() + j]
    }
}

/// True iff the subset is closed under metric betweenness: any point lying
/// exactly between two members is a member.
pub fn is_betweenness_closed(m: &FiniteMetric, mask: u128) -> bool {
    let n = m.points().size();
    for x in 0..n {
        if mask >> x & 1 == 0 {
            continue;
        }
        for z in 0..n {
            if mask >> z & 1 == 0 {
                continue;
            }
            for y in 0..n {
                if mask >> y & 1 == 0 && m.distance(x, z) == m.distance(x, y) + m.distance(y, z) {
                    return false;
                }
            }
        }
    }
    true
}

/// The topological convexity space of a finite metric: discrete topology,
/// convex sets the betweenness-closed subsets.
pub fn metric_betweenness_space(m: &FiniteMetric) -> Result<TopConvexSpace, InstanceError> {
    let n = m.points().size();
    if n > 12 {
        return Err(InstanceError::OutOfRange(format!(
            "betweenness enumeration over {n} points is too large"
        )));
    }
    let ground = m.points().clone();
    let closed = SetFamily::power_set(&ground)?;
    let convex_masks: Vec<u128> = (0..(1u128 << n))
        .filter(|&mask| is_betweenness_closed(m, mask))
        .collect();
    let convex = SetFamily::from_masks(&ground, convex_masks)?;
    Ok(TopConvexSpace::new(closed, convex)?)
}

/// The ideal space of a finite lattice: weak-topology closed sets are all
/// downsets, convex sets are the ideals. Identical to the right adjoint of
/// the composite adjunction into complete lattices.
pub fn lattice_ideal_space(l: &Arc<FiniteLattice>) -> Result<TopConvexSpace, InstanceError> {
    Ok(sup_to_topconvex(l)?)
}

// ---------------------------------------------------------------------------
// Groups

/// Multiplication table of the cyclic group of order `n`.
pub fn cyclic_group_table(n: usize) -> Vec<Vec<usize>> {
    (0..n)
        .map(|i| (0..n).map(|j| (i + j) % n).collect())
        .collect()
}

/// The subgroup convexity space of a finite group given by its
/// multiplication table: discrete topology, convex sets the subgroups and
/// the empty set.
pub fn subalgebra_space(table: &[Vec<usize>]) -> Result<TopConvexSpace, InstanceError> {
    let n = table.len();
    if n == 0 || n > 16 {
        return Err(InstanceError::NotAGroup(
            "order must be between 1 and 16".to_string(),
        ));
    }
    for row in table {
        if row.len() != n || row.iter().any(|&v| v >= n) {
            return Err(InstanceError::NotAGroup(
                "table must be square over 0..n".to_string(),
            ));
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(InstanceError::NotAGroup(format!(
                        "associativity fails at ({a},{b},{c})"
                    )));
                }
            }
        }
    }
    let identity = (0..n)
        .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
        .ok_or_else(|| InstanceError::NotAGroup("no identity element".to_string()))?;
    for x in 0..n {
        if !(0..n).any(|y| table[x][y] == identity && table[y][x] == identity) {
            return Err(InstanceError::NotAGroup(format!(
                "element {x} has no inverse"
            )));
        }
    }

    let ground = GroundSet::new((0..n).map(|i| format!("g{i}")))?;
    let closed = SetFamily::power_set(&ground)?;
    // A nonempty subset of a finite group closed under the operation is a
    // subgroup.
    let mut convex_masks = vec![0u128];
    for mask in 0..(1u128 << n) {
        if mask >> identity & 1 == 0 {
            continue;
        }
        let closed_under_op = (0..n).all(|a| {
            mask >> a & 1 == 0 || (0..n).all(|b| mask >> b & 1 == 0 || mask >> table[a][b] & 1 == 1)
        });
        if closed_under_op {
            convex_masks.push(mask);
        }
    }
    let convex = SetFamily::from_masks(&ground, convex_masks)?;
    Ok(TopConvexSpace::new(closed, convex)?)
}

// ---------------------------------------------------------------------------
// Measure algebras

/// A finite measure: strictly positive rational mass per atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureSpace {
    atoms: Ground,
    mass: Vec<Rational64>,
}

impl MeasureSpace {
    pub fn new(atoms: &Ground, mass: Vec<Rational64>) -> Result<MeasureSpace, InstanceError> {
        if atoms.size() > 4 {
            return Err(InstanceError::InvalidMeasure(
                "at most 4 atoms (the ground of the induced space is the power set)".to_string(),
            ));
        }
        if mass.len() != atoms.size() {
            return Err(InstanceError::InvalidMeasure(
                "one mass per atom".to_string(),
            ));
        }
        if let Some(i) = mass.iter().position(|m| *m <= Rational64::zero()) {
            return Err(InstanceError::InvalidMeasure(format!(
                "mass of {} must be strictly positive",
                atoms.label(i)
            )));
        }
        Ok(MeasureSpace {
            atoms: atoms.clone(),
            mass,
        })
    }

    pub fn atoms(&self) -> &Ground {
        &self.atoms
    }

    pub fn mass(&self) -> &[Rational64] {
        &self.mass
    }

    /// Measure of a subset of atoms given as a bit mask.
    pub fn measure(&self, mask: u128) -> Rational64 {
        (0..self.atoms.size())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| self.mass[i])
            .sum()
    }
}

/// The interval convexity space on the measurable sets, together with the
/// symmetric-difference metric inducing it.
#[derive(Debug, Clone)]
pub struct MeasureAlgebra {
    /// Ground: all subsets of the atoms. Closed: everything (finite case).
    /// Convex: the intervals `{B : lo ⊆ B ⊆ hi}` plus the empty family.
    pub space: TopConvexSpace,
    /// `d(A,B)` = measure of the symmetric difference.
    pub metric: FiniteMetric,
}

pub fn measure_algebra_space(ms: &MeasureSpace) -> Result<MeasureAlgebra, InstanceError> {
    let k = ms.atoms().size();
    let size = 1usize << k;
    let labels: Vec<String> = (0..size)
        .map(|m| {
            let parts: Vec<&str> = (0..k)
                .filter(|i| m >> i & 1 == 1)
                .map(|i| ms.atoms().label(i))
                .collect();
            format!("{{{}}}", parts.join(","))
        })
        .collect();
    let ground = GroundSet::new(labels)?;

    let closed = SetFamily::power_set(&ground)?;
    let mut convex_masks = vec![0u128];
    for lo in 0..size {
        for hi in 0..size {
            if lo & !hi != 0 {
                continue;
            }
            let mut mask = 0u128;
            for b in 0..size {
                if lo & !b == 0 && b & !hi == 0 {
                    mask |= 1 << b;
                }
            }
            convex_masks.push(mask);
        }
    }
    let convex = SetFamily::from_masks(&ground, convex_masks)?;
    let space = TopConvexSpace::new(closed, convex)?;

    let mut d = vec![Rational64::zero(); size * size];
    for a in 0..size {
        for b in 0..size {
            d[a * size + b] = ms.measure((a ^ b) as u128);
        }
    }
    let metric = FiniteMetric::new(&ground, d)?;
    Ok(MeasureAlgebra { space, metric })
}

/// The betweenness/interval equivalence: `d(A,C) = d(A,B) + d(B,C)` exactly
/// when `A∩C ⊆ B ⊆ A∪C`, over all triples.
pub fn measure_betweenness_matches_intervals(ma: &MeasureAlgebra) -> bool {
    let size = ma.space.ground().size();
    for a in 0..size {
        for b in 0..size {
            for c in 0..size {
                let between =
                    ma.metric.distance(a, c) == ma.metric.distance(a, b) + ma.metric.distance(b, c);
                let interval = (a & c) & !b == 0 && b & !(a | c) == 0;
                if between != interval {
                    return false;
                }
            }
        }
    }
    true
}

/// Measure recovery: the measure of a set equals its distance from the
/// empty set.
pub fn measure_recovered_from_metric(ms: &MeasureSpace, ma: &MeasureAlgebra) -> bool {
    let size = ma.space.ground().size();
    let empty = 0usize;
    (0..size).all(|b| ma.metric.distance(empty, b) == ms.measure(b as u128))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adjunction::{closed_convex, is_teetotal};
    use crate::spaces::{disconnection_witness, is_tc_hom};

    fn rat(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    #[test]
    fn permutation_basics() {
        let perms = Permutation::all(3);
        assert_eq!(perms.len(), 6);
        assert_eq!(perms[0].one_line(), "123");
        assert_eq!(perms[5].one_line(), "321");
        assert_eq!(perms[5].inversions(), 3);
        let p = Permutation::from_images(vec![1, 0, 2]).unwrap();
        assert_eq!(p.compose_after(&p), Permutation::identity(3));
    }

    #[test]
    fn half_space_example() {
        let h = half_space(3, 1, 2).unwrap();
        let labels: Vec<&str> = h.member_labels();
        assert_eq!(labels, vec!["123", "132", "231"]);
    }

    #[test]
    fn perm_space_examples() {
        let s3 = perm_space(3).unwrap();
        assert_eq!(s3.convex().len(), 20);
        assert!(s3.validate().is_valid());
        // The sorting permutation of a total order is the only member.
        let masks = s3.convex().masks();
        assert!(masks.iter().any(|&m| m.count_ones() == 1));

        let s2 = perm_space(2).unwrap();
        assert_eq!(s2.convex().len(), 4);
        assert!(perm_space(4).is_err());
    }

    #[test]
    fn perm_space_is_not_connected_under_discrete_topology() {
        // The discrete topology disconnects every convex set with two or
        // more permutations, so the compatibility predicate fails; the
        // nontrivial content of the example is intersection-closure of the
        // convex family, which validate() covers.
        let s3 = perm_space(3).unwrap();
        assert!(disconnection_witness(&s3).unwrap().is_some());
    }

    #[test]
    fn coxeter_metric_examples() {
        let m = coxeter_metric(3).unwrap();
        let perms = Permutation::all(3);
        let e = perm_index(&perms, &Permutation::identity(3));
        let t1 = perm_index(&perms, &Permutation::from_images(vec![1, 0, 2]).unwrap());
        let rev = perm_index(&perms, &Permutation::from_images(vec![2, 1, 0]).unwrap());
        assert_eq!(m.distance(e, t1), rat(1));
        assert_eq!(m.distance(e, rev), rat(3));
        // Constructor enforces symmetry and the triangle inequality; for
        // degree 4 construction doubles as the exhaustive check.
        assert!(coxeter_metric(4).is_ok());
    }

    #[test]
    fn alpha_delta_examples() {
        // n=3, m=2, g=(1,3), σ=213: the collapse is the identity of S2.
        let map = alpha_delta(3, 2, &[1, 3], AlphaDeltaVariant::Alpha).unwrap();
        let perms3 = Permutation::all(3);
        let sigma = perm_index(&perms3, &Permutation::from_images(vec![1, 0, 2]).unwrap());
        assert_eq!(map.apply(sigma), 0);

        // Identity position map gives the identity homomorphism.
        let id = alpha_delta(3, 3, &[1, 2, 3], AlphaDeltaVariant::Alpha).unwrap();
        assert_eq!(id.assignment(), (0..6).collect::<Vec<_>>().as_slice());

        // Delta of the identity permutation under g=(1,2) is the reversal.
        let map = alpha_delta(3, 2, &[1, 2], AlphaDeltaVariant::Delta).unwrap();
        assert_eq!(map.apply(0), 1);

        assert_eq!(
            alpha_delta(3, 2, &[1, 1], AlphaDeltaVariant::Alpha),
            Err(InstanceError::NotInjective)
        );
    }

    #[test]
    fn alpha_delta_preimage_identities() {
        // α_g⁻¹(C_ij) = C_{g(i)g(j)} and δ_g⁻¹(C_ij) = C_{g(j)g(i)}.
        let perms3 = Permutation::all(3);
        for g in [[1, 2], [1, 3], [2, 3], [3, 1]] {
            let alpha = alpha_delta(3, 2, &g, AlphaDeltaVariant::Alpha).unwrap();
            let delta = alpha_delta(3, 2, &g, AlphaDeltaVariant::Delta).unwrap();
            let c12 = half_space(2, 1, 2).unwrap();
            let want_alpha = half_space_mask(&perms3, g[0] - 1, g[1] - 1);
            let want_delta = half_space_mask(&perms3, g[1] - 1, g[0] - 1);
            assert_eq!(alpha.preimage(&c12).unwrap().bits(), want_alpha);
            assert_eq!(delta.preimage(&c12).unwrap().bits(), want_delta);
        }
    }

    #[test]
    fn alpha_delta_are_tc_homs() {
        let s3 = perm_space(3).unwrap();
        let s2 = perm_space(2).unwrap();
        for g in [[1, 2], [2, 3], [3, 1]] {
            for v in [AlphaDeltaVariant::Alpha, AlphaDeltaVariant::Delta] {
                let f = alpha_delta(3, 2, &g, v).unwrap();
                assert!(is_tc_hom(&f, &s3, &s2).unwrap());
            }
        }
    }

    #[test]
    fn classification_s3() {
        assert_eq!(aut_count_raw(3).unwrap(), 12);
        let PermClassification::Automorphisms { count, expected } =
            classify_perm_homs(3, 3).unwrap()
        else {
            panic!("wrong variant");
        };
        assert_eq!(count, 12);
        assert_eq!(expected, 12);

        let PermClassification::Surjections {
            found,
            expected,
            matches,
        } = classify_perm_homs(3, 2).unwrap()
        else {
            panic!("wrong variant");
        };
        assert!(matches);
        // Twelve formal collapse maps, six distinct: with a two-element
        // codomain the order-reversing collapse along g equals the
        // order-preserving collapse along the swapped g.
        assert_eq!(found.len(), 6);
        assert_eq!(expected.len(), 6);
    }

    #[test]
    fn automorphism_presentations_coincide() {
        // Two presentations of the same family: reversal applied after the
        // relabelling, or the reversal conjugation followed by a relabelling
        // (the relabelling factor absorbs one reversal). Both equal the
        // structured search exactly, and at degree 3 the raw 720-bijection
        // filter as well.
        for n in [3usize, 4] {
            let perms = Permutation::all(n);
            let rho = Permutation {
                images: (0..n).rev().collect(),
            };
            let mut conjugation_form = Vec::new();
            for tau in &perms {
                for conjugate in [false, true] {
                    let assignment: Vec<usize> = perms
                        .iter()
                        .map(|sigma| {
                            let stabilized = if conjugate {
                                rho.compose_after(&sigma.compose_after(&rho))
                            } else {
                                sigma.clone()
                            };
                            perm_index(&perms, &stabilized.compose_after(tau))
                        })
                        .collect();
                    conjugation_form.push(assignment);
                }
            }
            conjugation_form.sort_unstable();
            conjugation_form.dedup();
            let family = translation_reversal_family(n);
            assert_eq!(conjugation_form, family);
            assert_eq!(automorphisms_structured(n).unwrap(), family);
            if n == 3 {
                assert_eq!(automorphisms_raw(n).unwrap(), family);
            }
        }
    }

    #[test]
    fn value_relabelling_is_not_an_automorphism() {
        // σ ↦ τ∘σ permutes values rather than positions; except through the
        // order reversal it breaks the half-space structure.
        let s3 = perm_space(3).unwrap();
        let perms = Permutation::all(3);
        let tau = &perms[1]; // swaps the values 2 and 3
        let assignment: Vec<usize> = perms
            .iter()
            .map(|s| perm_index(&perms, &tau.compose_after(s)))
            .collect();
        let f = SpaceMap::new(s3.ground(), s3.ground(), assignment).unwrap();
        assert!(!is_tc_hom(&f, &s3, &s3).unwrap());
    }

    #[test]
    fn classification_infeasible_pairs_are_rejected() {
        assert!(matches!(
            classify_perm_homs(5, 5),
            Err(InstanceError::SearchSpaceTooLarge(5, 5))
        ));
        assert!(matches!(
            classify_perm_homs(5, 2),
            Err(InstanceError::SearchSpaceTooLarge(5, 2))
        ));
    }

    #[test]
    fn complements_classification() {
        assert!(convex_complements_are_half_spaces(3).unwrap());
    }

    #[test]
    fn perm_convexity_sizes() {
        // One set per partial order, plus the empty set: 3, 19, 219, 4231
        // partial orders at degrees 2 through 5.
        assert_eq!(perm_convex_masks(2).unwrap().len(), 4);
        assert_eq!(perm_convex_masks(3).unwrap().len(), 20);
        assert_eq!(perm_convex_masks(4).unwrap().len(), 220);
        assert_eq!(perm_convex_masks(5).unwrap().len(), 4232);
        // Degree 5 exercises the 120-element ground.
        let h = half_space(5, 1, 2).unwrap();
        assert_eq!(h.len(), 60);
    }

    #[test]
    fn metric_betweenness_examples() {
        // Three collinear points: {0,2} is not betweenness-closed.
        let g = GroundSet::new(["0", "1", "2"]).unwrap();
        let d = vec![
            rat(0),
            rat(1),
            rat(2),
            rat(1),
            rat(0),
            rat(1),
            rat(2),
            rat(1),
            rat(0),
        ];
        let m = FiniteMetric::new(&g, d).unwrap();
        let x = metric_betweenness_space(&m).unwrap();
        assert!(!x.convex().contains_mask(0b101));
        assert!(x.convex().contains_mask(0b011));
        assert!(x.validate().is_valid());

        // Two points: everything convex.
        let g2 = GroundSet::new(["a", "b"]).unwrap();
        let m2 = FiniteMetric::new(&g2, vec![rat(0), rat(1), rat(1), rat(0)]).unwrap();
        let x2 = metric_betweenness_space(&m2).unwrap();
        assert_eq!(x2.convex().len(), 4);

        // Equilateral triple: no strict betweenness, everything convex.
        let d3 = vec![
            rat(0),
            rat(1),
            rat(1),
            rat(1),
            rat(0),
            rat(1),
            rat(1),
            rat(1),
            rat(0),
        ];
        let m3 = FiniteMetric::new(&g, d3).unwrap();
        let x3 = metric_betweenness_space(&m3).unwrap();
        assert_eq!(x3.convex().len(), 8);
    }

    #[test]
    fn metric_validation() {
        let g = GroundSet::new(["a", "b"]).unwrap();
        assert!(FiniteMetric::new(&g, vec![rat(0), rat(-1), rat(-1), rat(0)]).is_err());
        let g3 = GroundSet::new(["a", "b", "c"]).unwrap();
        // Triangle violation: d(a,c) = 5 > 1 + 1.
        let bad = vec![
            rat(0),
            rat(1),
            rat(5),
            rat(1),
            rat(0),
            rat(1),
            rat(5),
            rat(1),
            rat(0),
        ];
        assert!(matches!(
            FiniteMetric::new(&g3, bad),
            Err(InstanceError::InvalidMetric(_))
        ));
    }

    #[test]
    fn coxeter_consistency_with_betweenness() {
        // Every partial-order convex set is betweenness-closed for the
        // Coxeter metric (degrees 3 and 4; degree 4 avoids materializing the
        // space).
        for n in [3usize, 4] {
            let metric = coxeter_metric(n).unwrap();
            for mask in perm_convex_masks(n).unwrap() {
                assert!(is_betweenness_closed(&metric, mask), "n={n} mask={mask:#b}");
            }
        }
    }

    #[test]
    fn lattice_ideal_space_is_teetotal_and_compatible() {
        let b4 = Arc::new(FiniteLattice::boolean(2).unwrap());
        let x = lattice_ideal_space(&b4).unwrap();
        assert_eq!(x.closed().len(), 6);
        assert_eq!(x.convex().len(), 5);
        assert!(is_teetotal(&x).unwrap());
        assert!(disconnection_witness(&x).unwrap().is_none());
        // Closed convex sets: the ideals again.
        let cc = closed_convex(&x).unwrap();
        assert_eq!(cc.preconvex().masks(), x.convex().masks());
    }

    #[test]
    fn subalgebra_space_examples() {
        // Z/2: subgroups are {e} and the whole group.
        let z2 = subalgebra_space(&cyclic_group_table(2)).unwrap();
        assert_eq!(z2.convex().len(), 3);

        // Trivial group.
        let z1 = subalgebra_space(&cyclic_group_table(1)).unwrap();
        assert_eq!(z1.convex().len(), 2);

        // Z/4: three subgroups plus the empty set.
        let z4 = subalgebra_space(&cyclic_group_table(4)).unwrap();
        assert_eq!(z4.convex().len(), 4);
        assert!(z4.validate().is_valid());

        // Broken table: not associative / no identity.
        let bad = vec![vec![1, 1], vec![1, 1]];
        assert!(matches!(
            subalgebra_space(&bad),
            Err(InstanceError::NotAGroup(_))
        ));
    }

    #[test]
    fn measure_algebra_examples() {
        let atoms = GroundSet::new(["a", "b"]).unwrap();
        let ms = MeasureSpace::new(&atoms, vec![rat(1), rat(2)]).unwrap();
        let ma = measure_algebra_space(&ms).unwrap();
        // d({a},{b}) = μ({a,b}) = 3.
        let ia = ma.space.ground().index_of("{a}").unwrap();
        let ib = ma.space.ground().index_of("{b}").unwrap();
        assert_eq!(ma.metric.distance(ia, ib), rat(3));
        assert!(ma.space.validate().is_valid());
        assert!(measure_betweenness_matches_intervals(&ma));
        assert!(measure_recovered_from_metric(&ms, &ma));
    }

    #[test]
    fn measure_validation() {
        let atoms = GroundSet::new(["a"]).unwrap();
        assert!(matches!(
            MeasureSpace::new(&atoms, vec![rat(0)]),
            Err(InstanceError::InvalidMeasure(_))
        ));
        let five = GroundSet::new(["a", "b", "c", "d", "e"]).unwrap();
        assert!(MeasureSpace::new(&five, vec![rat(1); 5]).is_err());
    }

    #[test]
    fn measure_betweenness_three_atoms_exhaustive() {
        let atoms = GroundSet::new(["a", "b", "c"]).unwrap();
        let ms = MeasureSpace::new(
            &atoms,
            vec![Rational64::new(1, 2), rat(1), Rational64::new(7, 3)],
        )
        .unwrap();
        let ma = measure_algebra_space(&ms).unwrap();
        assert!(measure_betweenness_matches_intervals(&ma));
        assert!(measure_recovered_from_metric(&ms, &ma));
    }
}
