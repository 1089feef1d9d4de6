//! The closed-convex functor from topological convexity spaces to
//! preconvexity spaces, its right adjoint, and the fixed-point predicates on
//! both sides (teetotal spaces, geometric preconvexities), plus the
//! geometric embedding and restriction constructions.

use std::fmt;

use crate::sets::{directed_union_closure, overline_closure, GroundSet, SetFamily, Subset};
use crate::spaces::{
    for_each_function, is_pre_hom, is_tc_hom, preimage_mask, PreconvexSpace, SpaceError, SpaceMap,
    TopConvexSpace,
};

/// Sends a space to the preconvexity of its closed convex sets.
pub fn closed_convex(x: &TopConvexSpace) -> Result<PreconvexSpace, SpaceError> {
    x.require_valid()?;
    let family = x.closed().intersect_family(x.convex())?;
    Ok(PreconvexSpace::new(family))
}

/// Sends a preconvexity space to the space whose closed sets are the closure
/// of the family under finite unions and arbitrary intersections, and whose
/// convex sets are its closure under directed unions.
pub fn induced_space(p: &PreconvexSpace) -> Result<TopConvexSpace, SpaceError> {
    p.require_valid()?;
    let closed = overline_closure(p.preconvex());
    let convex = directed_union_closure(p.preconvex());
    TopConvexSpace::new(closed, convex)
}

/// Checks the adjunction hom-set equality for one space pair: every function
/// `ground(x) -> ground(p)` is a topological convexity homomorphism into
/// `induced_space(p)` exactly when it is a preconvexity homomorphism out of
/// `closed_convex(x)`.
pub fn check_adjunction(
    x: &TopConvexSpace,
    p: &PreconvexSpace,
    limit: u128,
) -> Result<bool, SpaceError> {
    Ok(adjunction_mismatch(x, p, limit)?.is_none())
}

/// Like [`check_adjunction`] but returns the first violating function.
pub fn adjunction_mismatch(
    x: &TopConvexSpace,
    p: &PreconvexSpace,
    limit: u128,
) -> Result<Option<SpaceMap>, SpaceError> {
    let induced = induced_space(p)?;
    let cc = closed_convex(x)?;
    let mut witness = None;
    for_each_function(x.ground().size(), p.ground().size(), limit, |assignment| {
        if witness.is_some() {
            return;
        }
        let tc = crate::spaces::preimages_land_in(assignment, induced.closed(), x.closed())
            && crate::spaces::preimages_land_in(assignment, induced.convex(), x.convex());
        let pre = crate::spaces::preimages_land_in(assignment, p.preconvex(), cc.preconvex());
        if tc != pre {
            witness = Some(SpaceMap::new(x.ground(), p.ground(), assignment.to_vec()).unwrap());
        }
    })?;
    Ok(witness)
}

/// Idempotence of the adjunction at one object: the closed-convex functor
/// applied to the induced space of `closed_convex(x)` returns
/// `closed_convex(x)` itself.
pub fn check_idempotent(x: &TopConvexSpace) -> Result<bool, SpaceError> {
    let cc = closed_convex(x)?;
    let roundtrip = closed_convex(&induced_space(&cc)?)?;
    Ok(roundtrip == cc)
}

/// Per-condition detail for the teetotal predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TeetotalReport {
    /// Convex sets that are not directed unions of closed convex sets.
    pub nonunion_convex: Vec<Subset>,
    /// Pairs `(V, x)` of a closed set and an outside point that no finite
    /// union of closed convex sets separates.
    pub unseparated: Vec<(Subset, usize)>,
}

impl TeetotalReport {
    pub fn holds(&self) -> bool {
        self.nonunion_convex.is_empty() && self.unseparated.is_empty()
    }
}

impl fmt::Display for TeetotalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.holds() {
            return write!(f, "teetotal");
        }
        for c in &self.nonunion_convex {
            writeln!(
                f,
                "convex {c} is not a directed union of closed convex sets"
            )?;
        }
        for (v, x) in &self.unseparated {
            writeln!(
                f,
                "closed {v} and outside point {} admit no separating finite union of closed convex sets",
                v.ground().label(*x)
            )?;
        }
        Ok(())
    }
}

/// Evaluates both teetotal conditions.
///
/// On a finite ground a nonempty directed union collapses to its largest
/// member, so condition 1 reduces to: every nonempty convex set is closed.
/// Condition 2 is searched by covering: the union of all closed convex sets
/// avoiding `x` is the largest candidate separator, so it suffices to test
/// that one.
pub fn teetotal_report(x: &TopConvexSpace) -> Result<TeetotalReport, SpaceError> {
    x.require_valid()?;
    let closed_convex_masks: Vec<u128> = x
        .closed()
        .masks()
        .iter()
        .copied()
        .filter(|&m| x.convex().contains_mask(m))
        .collect();

    let nonunion_convex = x
        .convex()
        .masks()
        .iter()
        .copied()
        .filter(|&c| c != 0 && closed_convex_masks.binary_search(&c).is_err())
        .map(|c| x.convex().member_by_mask_pub(c))
        .collect();

    let mut unseparated = Vec::new();
    for &v in x.closed().masks() {
        for pt in 0..x.ground().size() {
            if v >> pt & 1 == 1 {
                continue;
            }
            let mut cover = 0u128;
            for &m in &closed_convex_masks {
                if m >> pt & 1 == 0 {
                    cover |= m;
                }
            }
            if v & !cover != 0 {
                unseparated.push((x.closed().member_by_mask_pub(v), pt));
            }
        }
    }
    Ok(TeetotalReport {
        nonunion_convex,
        unseparated,
    })
}

/// True iff the space is fixed by the adjunction (both teetotal conditions).
pub fn is_teetotal(x: &TopConvexSpace) -> Result<bool, SpaceError> {
    Ok(teetotal_report(x)?.holds())
}

/// True iff the preconvexity equals the intersection of its two closures.
pub fn is_geometric(p: &PreconvexSpace) -> Result<bool, SpaceError> {
    p.require_valid()?;
    let both =
        overline_closure(p.preconvex()).intersect_family(&directed_union_closure(p.preconvex()))?;
    Ok(&both == p.preconvex())
}

/// Result of embedding a preconvexity space into a geometric one.
#[derive(Debug, Clone)]
pub struct GeometricEmbedding {
    /// The ambient space: ground = the preconvex sets of the input, family =
    /// the principal-downset family.
    pub space: PreconvexSpace,
    /// The inclusion sending a point to the smallest preconvex set
    /// containing it.
    pub inclusion: SpaceMap,
    /// Whether `A` is preconvex exactly when `A` is the preimage of some
    /// member of the ambient family. Verified exhaustively.
    pub law_holds: bool,
}

/// Embeds `p` into a geometric preconvexity space whose points are the
/// preconvex sets of `p`.
pub fn geometric_embedding(p: &PreconvexSpace) -> Result<GeometricEmbedding, SpaceError> {
    p.require_valid()?;
    let members: Vec<Subset> = p.preconvex().members().collect();
    let labels: Vec<String> = members.iter().map(|m| m.to_string()).collect();
    let ambient_ground = GroundSet::new(labels)?;

    // Q = { {S in P : S ⊆ R} : R in P }, as subsets of the new ground. Every
    // such set contains the point named by the empty subset, so the empty set
    // is adjoined to make the ambient family a preconvexity; the embedding
    // law is unaffected because the empty preimage is preconvex anyway.
    let mut q_masks = Vec::with_capacity(members.len());
    for r in &members {
        let mut mask = 0u128;
        for (i, s) in members.iter().enumerate() {
            if s.is_subset_of(r) {
                mask |= 1 << i;
            }
        }
        q_masks.push(mask);
    }
    let mut ambient_masks = q_masks.clone();
    ambient_masks.push(0);
    let space = PreconvexSpace::new(SetFamily::from_masks(&ambient_ground, ambient_masks)?);

    // i(x) = smallest preconvex set containing x.
    let mut assignment = Vec::with_capacity(p.ground().size());
    for x in 0..p.ground().size() {
        let mut closure = p.ground().full_mask();
        for m in &members {
            if m.contains_index(x) {
                closure &= m.bits();
            }
        }
        let idx = members
            .iter()
            .position(|m| m.bits() == closure)
            .expect("closure of a point is preconvex by intersection closure");
        assignment.push(idx);
    }
    let inclusion = SpaceMap::new(p.ground(), &ambient_ground, assignment)?;

    // Embedding law, both directions. Forward: each preconvex A is the
    // preimage of {S : S ⊆ A}. Backward: every preimage of a member of Q is
    // preconvex.
    let mut law_holds = true;
    for (k, a) in members.iter().enumerate() {
        if preimage_mask(inclusion.assignment(), q_masks[k]) != a.bits() {
            law_holds = false;
        }
    }
    for &q in space.preconvex().masks() {
        if !p
            .preconvex()
            .contains_mask(preimage_mask(inclusion.assignment(), q))
        {
            law_holds = false;
        }
    }
    Ok(GeometricEmbedding {
        space,
        inclusion,
        law_holds,
    })
}

/// Restriction of a preconvexity space to one of its own members: the trace
/// family `{P ∩ a}` on ground `a`.
pub fn restrict(p: &PreconvexSpace, a: &Subset) -> Result<PreconvexSpace, SpaceError> {
    p.require_valid()?;
    if !p.preconvex().contains(a) {
        return Err(SpaceError::NotPreconvex(a.to_string()));
    }
    let kept: Vec<usize> = a.iter_indices().collect();
    let labels: Vec<&str> = kept.iter().map(|&i| p.ground().label(i)).collect();
    let new_ground = GroundSet::new(labels.iter().map(|s| s.to_string()))?;
    let mut masks = Vec::new();
    for &m in p.preconvex().masks() {
        let mut bits = 0u128;
        for (new_i, &old_i) in kept.iter().enumerate() {
            if m >> old_i & 1 == 1 {
                bits |= 1 << new_i;
            }
        }
        masks.push(bits);
    }
    Ok(PreconvexSpace::new(SetFamily::from_masks(
        &new_ground,
        masks,
    )?))
}

/// Checks that the identity function is a homomorphism in both triangle
/// directions: out of `closed_convex(induced_space(p))` into `p`, and from
/// `x` into `induced_space(closed_convex(x))`.
pub fn unit_counit_are_identities(
    x: &TopConvexSpace,
    p: &PreconvexSpace,
) -> Result<bool, SpaceError> {
    let counit_src = closed_convex(&induced_space(p)?)?;
    let counit = is_pre_hom(&SpaceMap::identity(p.ground()), &counit_src, p)?;
    let unit_dst = induced_space(&closed_convex(x)?)?;
    let unit = is_tc_hom(&SpaceMap::identity(x.ground()), x, &unit_dst)?;
    Ok(counit && unit)
}
