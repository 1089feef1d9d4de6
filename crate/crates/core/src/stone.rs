//! Finite complete lattices, pointed coframes, and Stone duality at finite
//! scale: the closed-set coframe of a space, the space of a pointed lattice,
//! both roundtrips, cocartesian lifts, and separation flags.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::sets::{Ground, GroundSet, SetError, SetFamily};
use crate::spaces::{SpaceError, TopConvexSpace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("a lattice needs at least one element")]
    Empty,
    #[error("lattice has {0} elements; the downset representation is capped at 128")]
    TooLarge(usize),
    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),
    #[error("order is not reflexive at `{0}`")]
    NotReflexive(String),
    #[error("order is not antisymmetric between `{0}` and `{1}`")]
    NotAntisymmetric(String, String),
    #[error("order is not transitive through `{0}` ≤ `{1}` ≤ `{2}`")]
    NotTransitive(String, String, String),
    #[error("elements `{0}` and `{1}` have no meet")]
    MeetMissing(String, String),
    #[error("elements `{0}` and `{1}` have no join")]
    JoinMissing(String, String),
    #[error("chosen set does not generate `{0}` as a join")]
    GenerationFailure(String),
    #[error("chosen element `{0}` is not a point (join-irreducible)")]
    ChosenNotPoint(String),
    #[error("lattice is not distributive, so it is not a coframe of closed sets")]
    NotDistributive,
    #[error("map does not preserve meets and finite joins (not a coframe homomorphism)")]
    NotCoframeHom,
    #[error("map is not monotone")]
    NotMonotone,
    #[error("map does not preserve meets, so it has no left adjoint")]
    NoLeftAdjoint,
    #[error("map does not preserve joins, so it has no right adjoint")]
    NoRightAdjoint,
    #[error("computed adjoint violates the adjunction law")]
    AdjointLawFailure,
    #[error("space is not T0: distinct points share a closure")]
    NotT0,
    #[error("map endpoints do not match the given lattices")]
    LatticeMismatch,
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// A finite lattice: ordered labels, the full order matrix, and precomputed
/// meet/join tables. Finite and bounded, hence complete.
#[derive(Debug, Clone)]
pub struct FiniteLattice {
    labels: Vec<String>,
    leq: Vec<bool>,
    meet: Vec<usize>,
    join: Vec<usize>,
    bottom: usize,
    top: usize,
    element_ground: Ground,
}

impl PartialEq for FiniteLattice {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.leq == other.leq
    }
}

impl Eq for FiniteLattice {}

impl FiniteLattice {
    /// Builds a lattice from its full order relation, checking the poset
    /// axioms and the existence of all pairwise meets and joins.
    pub fn from_leq<S: Into<String>>(
        labels: Vec<S>,
        leq: Vec<bool>,
    ) -> Result<FiniteLattice, LatticeError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        if n > 128 {
            return Err(LatticeError::TooLarge(n));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(LatticeError::DuplicateLabel(l.clone()));
            }
        }
        assert_eq!(leq.len(), n * n, "order matrix must be n*n");
        let at = |a: usize, b: usize| leq[a * n + b];
        for a in 0..n {
            if !at(a, a) {
                return Err(LatticeError::NotReflexive(labels[a].clone()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && at(a, b) && at(b, a) {
                    return Err(LatticeError::NotAntisymmetric(
                        labels[a].clone(),
                        labels[b].clone(),
                    ));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if !at(a, b) {
                    continue;
                }
                for c in 0..n {
                    if at(b, c) && !at(a, c) {
                        return Err(LatticeError::NotTransitive(
                            labels[a].clone(),
                            labels[b].clone(),
                            labels[c].clone(),
                        ));
                    }
                }
            }
        }

        let mut meet = vec![0usize; n * n];
        let mut join = vec![0usize; n * n];
        for a in 0..n {
            for b in 0..n {
                meet[a * n + b] = bound(n, &leq, a, b, true).ok_or_else(|| {
                    LatticeError::MeetMissing(labels[a].clone(), labels[b].clone())
                })?;
                join[a * n + b] = bound(n, &leq, a, b, false).ok_or_else(|| {
                    LatticeError::JoinMissing(labels[a].clone(), labels[b].clone())
                })?;
            }
        }
        let mut bottom = 0;
        let mut top = 0;
        for a in 1..n {
            bottom = meet[bottom * n + a];
            top = join[top * n + a];
        }
        let element_ground = GroundSet::new(labels.clone())?;
        Ok(FiniteLattice {
            labels,
            leq,
            meet,
            join,
            bottom,
            top,
            element_ground,
        })
    }

    /// A chain of `height` elements labelled `"0"` (bottom) up to
    /// `"height-1"` (top).
    pub fn chain(height: usize) -> Result<FiniteLattice, LatticeError> {
        let labels: Vec<String> = (0..height).map(|i| i.to_string()).collect();
        let leq = (0..height)
            .flat_map(|a| (0..height).map(move |b| a <= b))
            .collect();
        FiniteLattice::from_leq(labels, leq)
    }

    /// The Boolean lattice on `atoms` generators, elements labelled by the
    /// subsets of `{a, b, c, ...}` they contain.
    pub fn boolean(atoms: usize) -> Result<FiniteLattice, LatticeError> {
        if atoms > 7 {
            return Err(LatticeError::TooLarge(1 << atoms));
        }
        let names: Vec<char> = ('a'..='z').take(atoms).collect();
        let size = 1usize << atoms;
        let labels: Vec<String> = (0..size)
            .map(|m| {
                let parts: Vec<String> = (0..atoms)
                    .filter(|i| m >> i & 1 == 1)
                    .map(|i| names[i].to_string())
                    .collect();
                format!("{{{}}}", parts.join(","))
            })
            .collect();
        let leq = (0..size)
            .flat_map(|a| (0..size).map(move |b| a & !b == 0))
            .collect();
        FiniteLattice::from_leq(labels, leq)
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Ground set whose elements are this lattice's elements.
    pub fn element_ground(&self) -> &Ground {
        &self.element_ground
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.size() + b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.size() + b]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.size() + b]
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    /// Meet of an arbitrary element collection (empty meet = top).
    pub fn meet_of(&self, items: impl IntoIterator<Item = usize>) -> usize {
        items.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    /// Join of an arbitrary element collection (empty join = bottom).
    pub fn join_of(&self, items: impl IntoIterator<Item = usize>) -> usize {
        items
            .into_iter()
            .fold(self.bottom, |acc, x| self.join(acc, x))
    }

    /// Membership mask of the principal downset of `a`.
    pub fn principal_downset(&self, a: usize) -> u128 {
        let mut mask = 0u128;
        for b in 0..self.size() {
            if self.leq(b, a) {
                mask |= 1 << b;
            }
        }
        mask
    }

    pub fn is_downset(&self, mask: u128) -> bool {
        for a in 0..self.size() {
            if mask >> a & 1 == 0 {
                continue;
            }
            for b in 0..self.size() {
                if self.leq(b, a) && mask >> b & 1 == 0 {
                    return false;
                }
            }
        }
        true
    }

    /// All downsets, as membership masks in ascending order. Exponential in
    /// lattice size, so only available at desk scale.
    pub fn all_downsets(&self) -> Vec<u128> {
        assert!(self.size() <= 20, "downset enumeration is exponential");
        (0..(1u128 << self.size()))
            .filter(|&m| self.is_downset(m))
            .collect()
    }

    /// Join of the elements named by `mask` (empty mask = bottom).
    pub fn join_of_mask(&self, mask: u128) -> usize {
        let mut acc = self.bottom;
        for a in 0..self.size() {
            if mask >> a & 1 == 1 {
                acc = self.join(acc, a);
            }
        }
        acc
    }

    pub fn is_distributive(&self) -> bool {
        let n = self.size();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.meet(a, self.join(b, c)) != self.join(self.meet(a, b), self.meet(a, c))
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Covering pairs `(lower, upper)`, in element order.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.size();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if !self.lt(a, b) {
                    continue;
                }
                if (0..n).any(|c| self.lt(a, c) && self.lt(c, b)) {
                    continue;
                }
                out.push((a, b));
            }
        }
        out
    }
}

impl fmt::Display for FiniteLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lattice[{}]", self.labels.join(", "))
    }
}

// Greatest lower bound (lower = true) or least upper bound of {a, b}, if it
// exists.
fn bound(n: usize, leq: &[bool], a: usize, b: usize, lower: bool) -> Option<usize> {
    let le = |x: usize, y: usize| leq[x * n + y];
    let is_bound = |c: usize| {
        if lower {
            le(c, a) && le(c, b)
        } else {
            le(a, c) && le(b, c)
        }
    };
    let candidates: Vec<usize> = (0..n).filter(|&c| is_bound(c)).collect();
    candidates.iter().copied().find(|&c| {
        candidates
            .iter()
            .all(|&d| if lower { le(d, c) } else { le(c, d) })
    })
}

/// Lattice of a set family ordered by inclusion; element `i` corresponds to
/// `member_masks[i]`. The family must be a lattice under inclusion, which
/// holds for intersection-closed families containing the full set.
pub fn lattice_of_family(fam: &SetFamily) -> Result<(Arc<FiniteLattice>, Vec<u128>), LatticeError> {
    let masks: Vec<u128> = fam.masks().to_vec();
    if masks.is_empty() {
        return Err(LatticeError::Empty);
    }
    let labels: Vec<String> = fam.members().map(|m| m.to_string()).collect();
    let n = masks.len();
    let mut leq = vec![false; n * n];
    for a in 0..n {
        for b in 0..n {
            leq[a * n + b] = masks[a] & !masks[b] == 0;
        }
    }
    let lattice = FiniteLattice::from_leq(labels, leq)?;
    Ok((Arc::new(lattice), masks))
}

/// The coframe of closed sets of a valid space.
pub fn closed_coframe(x: &TopConvexSpace) -> Result<(Arc<FiniteLattice>, Vec<u128>), LatticeError> {
    x.require_valid()?;
    lattice_of_family(x.closed())
}

/// The points of a lattice: non-bottom elements that are not the join of two
/// strictly smaller elements — in a finite lattice, the join-irreducibles.
pub fn lattice_points(l: &FiniteLattice) -> Vec<usize> {
    let n = l.size();
    (0..n)
        .filter(|&p| {
            p != l.bottom()
                && !(0..n).any(|b| l.lt(b, p) && (0..n).any(|c| l.lt(c, p) && l.join(b, c) == p))
        })
        .collect()
}

/// A lattice with a chosen generating subset: every element is the join of
/// the chosen elements below it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedLattice {
    lattice: Arc<FiniteLattice>,
    chosen: Vec<usize>,
}

impl PointedLattice {
    pub fn new(
        lattice: &Arc<FiniteLattice>,
        chosen: Vec<usize>,
    ) -> Result<PointedLattice, LatticeError> {
        let mut chosen = chosen;
        chosen.sort_unstable();
        chosen.dedup();
        if let Some(&bad) = chosen.iter().find(|&&i| i >= lattice.size()) {
            return Err(LatticeError::GenerationFailure(bad.to_string()));
        }
        for a in 0..lattice.size() {
            let below = chosen.iter().copied().filter(|&s| lattice.leq(s, a));
            if lattice.join_of(below) != a {
                return Err(LatticeError::GenerationFailure(
                    lattice.label(a).to_string(),
                ));
            }
        }
        Ok(PointedLattice {
            lattice: lattice.clone(),
            chosen,
        })
    }

    pub fn lattice(&self) -> &Arc<FiniteLattice> {
        &self.lattice
    }

    pub fn chosen(&self) -> &[usize] {
        &self.chosen
    }

    pub fn chosen_mask(&self) -> u128 {
        self.chosen.iter().fold(0u128, |acc, &i| acc | 1 << i)
    }
}

/// A total function between the element sets of two lattices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeMap {
    dom: Arc<FiniteLattice>,
    cod: Arc<FiniteLattice>,
    assignment: Vec<usize>,
}

impl LatticeMap {
    pub fn new(
        dom: &Arc<FiniteLattice>,
        cod: &Arc<FiniteLattice>,
        assignment: Vec<usize>,
    ) -> Result<LatticeMap, LatticeError> {
        if assignment.len() != dom.size() || assignment.iter().any(|&i| i >= cod.size()) {
            return Err(LatticeError::LatticeMismatch);
        }
        Ok(LatticeMap {
            dom: dom.clone(),
            cod: cod.clone(),
            assignment,
        })
    }

    pub fn identity(l: &Arc<FiniteLattice>) -> LatticeMap {
        LatticeMap {
            dom: l.clone(),
            cod: l.clone(),
            assignment: (0..l.size()).collect(),
        }
    }

    pub fn dom(&self) -> &Arc<FiniteLattice> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<FiniteLattice> {
        &self.cod
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn apply(&self, a: usize) -> usize {
        self.assignment[a]
    }

    pub fn is_monotone(&self) -> bool {
        let n = self.dom.size();
        (0..n).all(|a| {
            (0..n).all(|b| {
                !self.dom.leq(a, b) || self.cod.leq(self.assignment[a], self.assignment[b])
            })
        })
    }

    /// Preserves all meets: pairwise meets and the empty meet (top).
    pub fn preserves_meets(&self) -> bool {
        let n = self.dom.size();
        self.assignment[self.dom.top()] == self.cod.top()
            && (0..n).all(|a| {
                (a..n).all(|b| {
                    self.assignment[self.dom.meet(a, b)]
                        == self.cod.meet(self.assignment[a], self.assignment[b])
                })
            })
    }

    /// Preserves all joins: pairwise joins and the empty join (bottom).
    pub fn preserves_joins(&self) -> bool {
        let n = self.dom.size();
        self.assignment[self.dom.bottom()] == self.cod.bottom()
            && (0..n).all(|a| {
                (a..n).all(|b| {
                    self.assignment[self.dom.join(a, b)]
                        == self.cod.join(self.assignment[a], self.assignment[b])
                })
            })
    }

    /// Coframe homomorphism: preserves arbitrary meets and finite joins,
    /// which on a finite lattice means both of the above.
    pub fn is_coframe_hom(&self) -> bool {
        self.preserves_meets() && self.preserves_joins()
    }

    /// Left adjoint `g` with `g(y) ≤ x ⟺ y ≤ f(x)`. Exists exactly when the
    /// map preserves meets; the law is verified exhaustively afterwards.
    pub fn left_adjoint(&self) -> Result<LatticeMap, LatticeError> {
        if !self.preserves_meets() {
            return Err(LatticeError::NoLeftAdjoint);
        }
        let assignment: Vec<usize> = (0..self.cod.size())
            .map(|y| {
                self.dom
                    .meet_of((0..self.dom.size()).filter(|&x| self.cod.leq(y, self.assignment[x])))
            })
            .collect();
        let adj = LatticeMap {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            assignment,
        };
        for y in 0..self.cod.size() {
            for x in 0..self.dom.size() {
                if self.dom.leq(adj.assignment[y], x) != self.cod.leq(y, self.assignment[x]) {
                    return Err(LatticeError::AdjointLawFailure);
                }
            }
        }
        Ok(adj)
    }

    /// Right adjoint `g` with `x ≤ g(y) ⟺ f(x) ≤ y`. Exists exactly when the
    /// map preserves joins; the law is verified exhaustively afterwards.
    pub fn right_adjoint(&self) -> Result<LatticeMap, LatticeError> {
        if !self.preserves_joins() {
            return Err(LatticeError::NoRightAdjoint);
        }
        let assignment: Vec<usize> = (0..self.cod.size())
            .map(|y| {
                self.dom
                    .join_of((0..self.dom.size()).filter(|&x| self.cod.leq(self.assignment[x], y)))
            })
            .collect();
        let adj = LatticeMap {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            assignment,
        };
        for x in 0..self.dom.size() {
            for y in 0..self.cod.size() {
                if self.dom.leq(x, adj.assignment[y]) != self.cod.leq(self.assignment[x], y) {
                    return Err(LatticeError::AdjointLawFailure);
                }
            }
        }
        Ok(adj)
    }
}

impl fmt::Display for LatticeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .assignment
            .iter()
            .enumerate()
            .map(|(i, &j)| format!("{}→{}", self.dom.label(i), self.cod.label(j)))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// The topological space of a pointed lattice: points are the chosen
/// elements, closed sets are the traces of principal downsets. The convex
/// family is the power set (topology-only carrier).
///
/// The lattice must be distributive (a coframe) and the chosen elements must
/// be points; otherwise the trace family need not be union-closed.
pub fn space_from_pointed(pl: &PointedLattice) -> Result<TopConvexSpace, LatticeError> {
    let l = pl.lattice();
    if !l.is_distributive() {
        return Err(LatticeError::NotDistributive);
    }
    let points = lattice_points(l);
    for &s in pl.chosen() {
        if !points.contains(&s) {
            return Err(LatticeError::ChosenNotPoint(l.label(s).to_string()));
        }
    }
    let labels: Vec<String> = pl
        .chosen()
        .iter()
        .map(|&s| l.label(s).to_string())
        .collect();
    let ground = GroundSet::new(labels)?;
    let mut closed_masks = Vec::with_capacity(l.size());
    for a in 0..l.size() {
        let mut mask = 0u128;
        for (i, &s) in pl.chosen().iter().enumerate() {
            if l.leq(s, a) {
                mask |= 1 << i;
            }
        }
        closed_masks.push(mask);
    }
    let closed = SetFamily::from_masks(&ground, closed_masks)?;
    let convex = SetFamily::power_set(&ground)?;
    Ok(TopConvexSpace::new(closed, convex)?)
}

/// Closure of each point: the smallest closed set containing it.
pub fn point_closures(x: &TopConvexSpace) -> Vec<u128> {
    let n = x.ground().size();
    (0..n)
        .map(|pt| {
            let mut acc = x.ground().full_mask();
            for &m in x.closed().masks() {
                if m >> pt & 1 == 1 {
                    acc &= m;
                }
            }
            acc
        })
        .collect()
}

/// Separation properties of a space's topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeparationFlags {
    /// Point closures are pairwise distinct.
    pub t0: bool,
    /// Every `cl{x} \ {x}` is closed.
    pub td: bool,
    /// The point closures are exactly the points of the closed-set coframe.
    pub sober: bool,
}

pub fn separation_flags(x: &TopConvexSpace) -> Result<SeparationFlags, LatticeError> {
    x.require_valid()?;
    let closures = point_closures(x);
    let n = x.ground().size();
    let t0 = (0..n).all(|a| (a + 1..n).all(|b| closures[a] != closures[b]));
    let td = (0..n).all(|a| x.closed().contains_mask(closures[a] & !(1 << a)));

    // Points of the coframe of closed sets: nonempty closed sets that are
    // not a union of two strictly smaller closed sets.
    let masks = x.closed().masks();
    let coframe_points: Vec<u128> = masks
        .iter()
        .copied()
        .filter(|&f| {
            f != 0
                && !masks.iter().any(|&a| {
                    a != f
                        && a & !f == 0
                        && masks.iter().any(|&b| b != f && b & !f == 0 && a | b == f)
                })
        })
        .collect();
    let mut closure_set = closures.clone();
    closure_set.sort_unstable();
    closure_set.dedup();
    let sober = closure_set == coframe_points;
    Ok(SeparationFlags { t0, td, sober })
}

/// Space-side Stone roundtrip: rebuilding a T0 space from its pointed
/// closed-set coframe gives a homeomorphic space, the homeomorphism sending
/// a point to its closure. Only the topology takes part.
pub fn stone_roundtrip_space(x: &TopConvexSpace) -> Result<bool, LatticeError> {
    x.require_valid()?;
    if !separation_flags(x)?.t0 {
        return Err(LatticeError::NotT0);
    }
    let (lattice, member_masks) = closed_coframe(x)?;
    let closures = point_closures(x);
    let chosen: Vec<usize> = closures
        .iter()
        .map(|c| {
            member_masks
                .binary_search(c)
                .expect("point closure is closed")
        })
        .collect();
    let pl = PointedLattice::new(&lattice, chosen.clone())?;
    let rebuilt = space_from_pointed(&pl)?;

    // φ sends point pt to the rebuilt point named by cl{pt}; the rebuilt
    // ground is indexed by the sorted chosen set.
    let mut sorted = chosen.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != x.ground().size() {
        return Ok(false);
    }
    let phi: Vec<usize> = chosen
        .iter()
        .map(|c| sorted.binary_search(c).expect("chosen index"))
        .collect();

    // Closed sets correspond exactly under the φ-image.
    let mut image_family: Vec<u128> = x
        .closed()
        .masks()
        .iter()
        .map(|&f| {
            let mut mask = 0u128;
            for pt in 0..x.ground().size() {
                if f >> pt & 1 == 1 {
                    mask |= 1 << phi[pt];
                }
            }
            mask
        })
        .collect();
    image_family.sort_unstable();
    image_family.dedup();
    Ok(image_family == rebuilt.closed().masks())
}

/// Lattice-side Stone roundtrip: the pointed closed-set coframe of the space
/// of a pointed lattice is isomorphic to the original, via `a ↦ ↓a ∩ S`.
pub fn stone_roundtrip_lattice(pl: &PointedLattice) -> Result<bool, LatticeError> {
    let l = pl.lattice();
    let space = space_from_pointed(pl)?;
    let (rebuilt, member_masks) = closed_coframe(&space)?;
    if rebuilt.size() != l.size() {
        return Ok(false);
    }
    // ψ(a) = trace of ↓a on the chosen set, as a rebuilt element index.
    let mut psi = Vec::with_capacity(l.size());
    for a in 0..l.size() {
        let mut mask = 0u128;
        for (i, &s) in pl.chosen().iter().enumerate() {
            if l.leq(s, a) {
                mask |= 1 << i;
            }
        }
        match member_masks.binary_search(&mask) {
            Ok(idx) => psi.push(idx),
            Err(_) => return Ok(false),
        }
    }
    // Bijective (generation makes ψ injective), order-isomorphic both ways.
    let mut seen = vec![false; l.size()];
    for &i in &psi {
        if seen[i] {
            return Ok(false);
        }
        seen[i] = true;
    }
    for a in 0..l.size() {
        for b in 0..l.size() {
            if l.leq(a, b) != rebuilt.leq(psi[a], psi[b]) {
                return Ok(false);
            }
        }
    }
    // Chosen sets correspond: the rebuilt chosen set consists of the point
    // closures of the space, which are the traces of the original chosen
    // elements.
    let closures = point_closures(&space);
    let mut rebuilt_chosen: Vec<usize> = closures
        .iter()
        .map(|c| member_masks.binary_search(c).expect("closure is closed"))
        .collect();
    rebuilt_chosen.sort_unstable();
    rebuilt_chosen.dedup();
    let mut image_chosen: Vec<usize> = pl.chosen().iter().map(|&s| psi[s]).collect();
    image_chosen.sort_unstable();
    Ok(rebuilt_chosen == image_chosen)
}

/// Morphism check in the category of pointed coframes: `g` is a coframe
/// homomorphism from `src`'s lattice to `dst`'s, and for every chosen `s` of
/// `dst` the meet of `{m : s ≤ g(m)}` is chosen in `src`.
pub fn check_pointed_morphism(
    g: &LatticeMap,
    src: &PointedLattice,
    dst: &PointedLattice,
) -> Result<bool, LatticeError> {
    if g.dom() != src.lattice() || g.cod() != dst.lattice() {
        return Err(LatticeError::LatticeMismatch);
    }
    if !g.is_coframe_hom() {
        return Err(LatticeError::NotCoframeHom);
    }
    let m = src.lattice();
    for &s in dst.chosen() {
        let meet = m.meet_of((0..m.size()).filter(|&x| dst.lattice().leq(s, g.apply(x))));
        if !src.chosen().contains(&meet) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Cocartesian lift of a coframe homomorphism out of a pointed lattice: the
/// codomain carries the preimage of the source's chosen set under the left
/// adjoint. Fails if that set does not generate.
pub fn cocartesian_lift(
    f: &LatticeMap,
    src: &PointedLattice,
) -> Result<PointedLattice, LatticeError> {
    if f.dom() != src.lattice() {
        return Err(LatticeError::LatticeMismatch);
    }
    if !f.is_coframe_hom() {
        return Err(LatticeError::NotCoframeHom);
    }
    let adj = f.left_adjoint()?;
    let chosen: Vec<usize> = (0..f.cod().size())
        .filter(|&y| src.chosen().contains(&adj.apply(y)))
        .collect();
    PointedLattice::new(f.cod(), chosen)
}

/// Bounds of the fibre of pointed structures over a lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibreBounds {
    /// Largest valid chosen set: all points.
    pub top_points: Vec<usize>,
    /// Smallest valid chosen set: points that are not the join of all
    /// strictly smaller elements.
    pub bottom_points: Vec<usize>,
    /// Whether the bottom set satisfies generation (always, finitely).
    pub bottom_valid: bool,
}

pub fn coframe_fibre_bounds(l: &Arc<FiniteLattice>) -> FibreBounds {
    let top_points = lattice_points(l);
    let bottom_points: Vec<usize> = top_points
        .iter()
        .copied()
        .filter(|&p| l.join_of((0..l.size()).filter(|&q| l.lt(q, p))) != p)
        .collect();
    let bottom_valid = PointedLattice::new(l, bottom_points.clone()).is_ok();
    FibreBounds {
        top_points,
        bottom_points,
        bottom_valid,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::SetFamily;

    fn arc(l: FiniteLattice) -> Arc<FiniteLattice> {
        Arc::new(l)
    }

    #[test]
    fn chain_and_boolean_construct() {
        let c3 = FiniteLattice::chain(3).unwrap();
        assert_eq!(c3.bottom(), 0);
        assert_eq!(c3.top(), 2);
        assert_eq!(c3.meet(1, 2), 1);
        assert_eq!(c3.join(0, 1), 1);

        let b4 = FiniteLattice::boolean(2).unwrap();
        assert_eq!(b4.size(), 4);
        assert_eq!(b4.label(0), "{}");
        assert_eq!(b4.label(3), "{a,b}");
        assert_eq!(b4.join(1, 2), 3);
        assert_eq!(b4.meet(1, 2), 0);
        assert!(b4.is_distributive());
    }

    #[test]
    fn from_leq_rejects_non_lattices() {
        // Two-element antichain: no meet or join.
        let leq = vec![true, false, false, true];
        assert!(matches!(
            FiniteLattice::from_leq(vec!["a", "b"], leq),
            Err(LatticeError::MeetMissing(_, _)) | Err(LatticeError::JoinMissing(_, _))
        ));
    }

    #[test]
    fn diamond_is_not_distributive() {
        // M3: bottom, three incomparable middles, top.
        let n = 5;
        let mut leq = vec![false; n * n];
        for a in 0..n {
            leq[a * n + a] = true;
            leq[a] = true;
            leq[a * n + 4] = true;
        }
        let m3 = FiniteLattice::from_leq(vec!["0", "x", "y", "z", "1"], leq).unwrap();
        assert!(!m3.is_distributive());
        // The top is x∨y, so only the three middles are points.
        let pts = lattice_points(&m3);
        assert_eq!(pts, vec![1, 2, 3]);
        let pl = PointedLattice::new(&arc(m3), vec![1, 2, 3]).unwrap();
        assert_eq!(space_from_pointed(&pl), Err(LatticeError::NotDistributive));
    }

    #[test]
    fn lattice_points_examples() {
        let c3 = FiniteLattice::chain(3).unwrap();
        assert_eq!(lattice_points(&c3), vec![1, 2]);

        let b4 = FiniteLattice::boolean(2).unwrap();
        assert_eq!(lattice_points(&b4), vec![1, 2]);

        let one = FiniteLattice::chain(1).unwrap();
        assert_eq!(lattice_points(&one), Vec::<usize>::new());
    }

    #[test]
    fn space_from_pointed_examples() {
        // (3-chain, {1, 2}) is the Sierpiński space.
        let c3 = arc(FiniteLattice::chain(3).unwrap());
        let pl = PointedLattice::new(&c3, vec![1, 2]).unwrap();
        let space = space_from_pointed(&pl).unwrap();
        assert_eq!(space.closed().masks(), &[0b00, 0b01, 0b11]);

        // (Boolean 4, atoms) is the discrete two-point space.
        let b4 = arc(FiniteLattice::boolean(2).unwrap());
        let pl = PointedLattice::new(&b4, vec![1, 2]).unwrap();
        let space = space_from_pointed(&pl).unwrap();
        assert_eq!(space.closed().masks(), &[0b00, 0b01, 0b10, 0b11]);

        // (2-chain, {top}) is the one-point space.
        let c2 = arc(FiniteLattice::chain(2).unwrap());
        let pl = PointedLattice::new(&c2, vec![1]).unwrap();
        let space = space_from_pointed(&pl).unwrap();
        assert_eq!(space.ground().size(), 1);
    }

    #[test]
    fn generation_is_enforced() {
        let c3 = arc(FiniteLattice::chain(3).unwrap());
        // {2} does not generate 1.
        assert!(matches!(
            PointedLattice::new(&c3, vec![2]),
            Err(LatticeError::GenerationFailure(_))
        ));
    }

    #[test]
    fn closed_coframe_examples() {
        // Sierpiński space -> 3-chain.
        let g = crate::sets::GroundSet::indexed(2).unwrap();
        let sierp = TopConvexSpace::new(
            SetFamily::from_masks(&g, vec![0b00, 0b01, 0b11]).unwrap(),
            SetFamily::power_set(&g).unwrap(),
        )
        .unwrap();
        let (l, masks) = closed_coframe(&sierp).unwrap();
        assert_eq!(l.size(), 3);
        assert_eq!(masks, vec![0b00, 0b01, 0b11]);
        assert_eq!(lattice_points(&l).len(), 2);

        // Discrete two-point space -> Boolean 4.
        let discrete = TopConvexSpace::new(
            SetFamily::power_set(&g).unwrap(),
            SetFamily::power_set(&g).unwrap(),
        )
        .unwrap();
        let (l, _) = closed_coframe(&discrete).unwrap();
        assert_eq!(l.size(), 4);
        assert!(l.is_distributive());

        // Indiscrete space -> 2-chain.
        let indiscrete = TopConvexSpace::new(
            SetFamily::from_masks(&g, vec![0b00, 0b11]).unwrap(),
            SetFamily::from_masks(&g, vec![0b00, 0b11]).unwrap(),
        )
        .unwrap();
        let (l, _) = closed_coframe(&indiscrete).unwrap();
        assert_eq!(l.size(), 2);
    }

    #[test]
    fn adjoint_examples() {
        let c3 = arc(FiniteLattice::chain(3).unwrap());
        let id = LatticeMap::identity(&c3);
        assert_eq!(id.left_adjoint().unwrap().assignment(), id.assignment());
        assert_eq!(id.right_adjoint().unwrap().assignment(), id.assignment());

        // 3-chain into Boolean 4 preserving meets: 0↦{}, 1↦{a}, 2↦{a,b}.
        let b4 = arc(FiniteLattice::boolean(2).unwrap());
        let f = LatticeMap::new(&c3, &b4, vec![0, 1, 3]).unwrap();
        assert!(f.preserves_meets());
        let adj = f.left_adjoint().unwrap();
        // Left adjoint: {}↦0, {a}↦1, {b}↦2, {a,b}↦2.
        assert_eq!(adj.assignment(), &[0, 1, 2, 2]);

        // Constant-top map preserves meets but not joins.
        let constant = LatticeMap::new(&c3, &c3, vec![2, 2, 2]).unwrap();
        assert_eq!(constant.right_adjoint(), Err(LatticeError::NoRightAdjoint));
        assert!(constant.left_adjoint().is_ok());
    }

    #[test]
    fn pointed_morphism_examples() {
        let c3 = arc(FiniteLattice::chain(3).unwrap());
        let pl = PointedLattice::new(&c3, vec![1, 2]).unwrap();
        let id = LatticeMap::identity(&c3);
        assert!(check_pointed_morphism(&id, &pl, &pl).unwrap());

        // Identity into a chosen set containing a non-point fails: on the
        // Boolean 4, the top is not a point but may still be chosen.
        let b4 = arc(FiniteLattice::boolean(2).unwrap());
        let atoms = PointedLattice::new(&b4, vec![1, 2]).unwrap();
        let with_top = PointedLattice::new(&b4, vec![1, 2, 3]).unwrap();
        let idb = LatticeMap::identity(&b4);
        assert!(!check_pointed_morphism(&idb, &atoms, &with_top).unwrap());
        assert!(check_pointed_morphism(&idb, &with_top, &atoms).unwrap());

        // A map that is not a coframe homomorphism is rejected.
        let collapse = LatticeMap::new(&b4, &b4, vec![3, 3, 3, 3]).unwrap();
        assert_eq!(
            check_pointed_morphism(&collapse, &atoms, &atoms),
            Err(LatticeError::NotCoframeHom)
        );
    }

    #[test]
    fn roundtrips_on_small_examples() {
        let g = crate::sets::GroundSet::indexed(2).unwrap();
        let sierp = TopConvexSpace::new(
            SetFamily::from_masks(&g, vec![0b00, 0b01, 0b11]).unwrap(),
            SetFamily::power_set(&g).unwrap(),
        )
        .unwrap();
        assert!(stone_roundtrip_space(&sierp).unwrap());

        let c3 = arc(FiniteLattice::chain(3).unwrap());
        let pl = PointedLattice::new(&c3, vec![1, 2]).unwrap();
        assert!(stone_roundtrip_lattice(&pl).unwrap());

        let g1 = crate::sets::GroundSet::indexed(1).unwrap();
        let point = TopConvexSpace::new(
            SetFamily::power_set(&g1).unwrap(),
            SetFamily::power_set(&g1).unwrap(),
        )
        .unwrap();
        assert!(stone_roundtrip_space(&point).unwrap());
    }

    #[test]
    fn roundtrip_rejects_non_t0() {
        let g = crate::sets::GroundSet::indexed(2).unwrap();
        let indiscrete = TopConvexSpace::new(
            SetFamily::from_masks(&g, vec![0b00, 0b11]).unwrap(),
            SetFamily::from_masks(&g, vec![0b00, 0b11]).unwrap(),
        )
        .unwrap();
        assert_eq!(stone_roundtrip_space(&indiscrete), Err(LatticeError::NotT0));
        let flags = separation_flags(&indiscrete).unwrap();
        assert!(!flags.t0);
    }

    #[test]
    fn separation_flags_discrete() {
        let g = crate::sets::GroundSet::indexed(3).unwrap();
        let discrete = TopConvexSpace::new(
            SetFamily::power_set(&g).unwrap(),
            SetFamily::power_set(&g).unwrap(),
        )
        .unwrap();
        let flags = separation_flags(&discrete).unwrap();
        assert!(flags.t0 && flags.td && flags.sober);
    }

    #[test]
    fn cocartesian_lift_examples() {
        let c3 = arc(FiniteLattice::chain(3).unwrap());
        let pl = PointedLattice::new(&c3, vec![1, 2]).unwrap();
        let id = LatticeMap::identity(&c3);
        assert_eq!(cocartesian_lift(&id, &pl).unwrap(), pl);

        // 3-chain into Boolean 4: chosen = left-adjoint preimage of {1, 2}.
        let b4 = arc(FiniteLattice::boolean(2).unwrap());
        let f = LatticeMap::new(&c3, &b4, vec![0, 1, 3]).unwrap();
        let lifted = cocartesian_lift(&f, &pl).unwrap();
        // adj: {}↦0, {a}↦1, {b}↦2, {a,b}↦2; both 2s land in the chosen set.
        assert_eq!(lifted.chosen(), &[1, 2, 3]);

        // Collapse to the one-element lattice.
        let one = arc(FiniteLattice::chain(1).unwrap());
        let to_one = LatticeMap::new(&c3, &one, vec![0, 0, 0]).unwrap();
        let lifted = cocartesian_lift(&to_one, &pl).unwrap();
        assert_eq!(lifted.chosen(), &[] as &[usize]);
    }

    #[test]
    fn cocartesian_lift_is_universal() {
        // Brute-force the universal property on the 3-chain -> Boolean 4 map:
        // for every coframe hom g out of Boolean 4 and every pointed
        // structure R on g's codomain, g∘f is a pointed morphism out of the
        // source exactly when g is one out of the lift.
        let c3 = arc(FiniteLattice::chain(3).unwrap());
        let src = PointedLattice::new(&c3, vec![1, 2]).unwrap();
        let b4 = arc(FiniteLattice::boolean(2).unwrap());
        let f = LatticeMap::new(&c3, &b4, vec![0, 1, 3]).unwrap();
        let lift = cocartesian_lift(&f, &src).unwrap();

        for cod in [arc(FiniteLattice::chain(2).unwrap()), b4.clone()] {
            let total = cod.size().pow(b4.size() as u32);
            for code in 0..total {
                let mut c = code;
                let assignment: Vec<usize> = (0..b4.size())
                    .map(|_| {
                        let v = c % cod.size();
                        c /= cod.size();
                        v
                    })
                    .collect();
                let g = LatticeMap::new(&b4, &cod, assignment).unwrap();
                if !g.is_coframe_hom() {
                    continue;
                }
                let composite = LatticeMap::new(
                    &c3,
                    &cod,
                    (0..c3.size()).map(|a| g.apply(f.apply(a))).collect(),
                )
                .unwrap();
                for pick in 0u32..(1 << cod.size()) {
                    let chosen: Vec<usize> =
                        (0..cod.size()).filter(|i| pick >> i & 1 == 1).collect();
                    let Ok(r) = PointedLattice::new(&cod, chosen) else {
                        continue;
                    };
                    let through = check_pointed_morphism(&composite, &src, &r).unwrap();
                    let direct = check_pointed_morphism(&g, &lift, &r).unwrap();
                    assert_eq!(through, direct);
                }
            }
        }
    }

    #[test]
    fn fibre_bounds_examples() {
        let b4 = arc(FiniteLattice::boolean(2).unwrap());
        let fb = coframe_fibre_bounds(&b4);
        assert_eq!(fb.top_points, vec![1, 2]);
        assert_eq!(fb.bottom_points, vec![1, 2]);
        assert!(fb.bottom_valid);

        let c3 = arc(FiniteLattice::chain(3).unwrap());
        let fb = coframe_fibre_bounds(&c3);
        assert_eq!(fb.top_points, fb.bottom_points);
        assert!(fb.bottom_valid);
    }
}
