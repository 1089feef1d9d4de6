//! The equivalence between preconvexity spaces and pointed complete
//! lattices, the adjunction with plain complete lattices, and partial
//! sup-lattices: a complete lattice with a chosen family of downsets whose
//! joins are the "defined" partial joins.

use std::sync::Arc;

use thiserror::Error;

use crate::sets::{GroundSet, SetError, SetFamily};
use crate::spaces::{PreconvexSpace, SpaceError, TopConvexSpace};
use crate::stone::{lattice_of_family, FiniteLattice, LatticeError, LatticeMap, PointedLattice};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PslError {
    #[error("member {0:#b} of the chosen join family is not a downset")]
    NotDownset(u128),
    #[error("map does not preserve meets (not an inf-homomorphism)")]
    NotInfHom,
    #[error("partial sup-lattice violates its axioms: {0}")]
    InvariantFailure(String),
    #[error("input is not totally compactly generated")]
    NotTcg,
    #[error("search space of {size} functions exceeds the limit {limit}")]
    SearchSpaceTooLarge { size: u128, limit: u128 },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// A complete lattice with a family of downsets closed under the partial-sup
/// axioms; the partial join is defined exactly on the family members, where
/// it equals the lattice join.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialSupLattice {
    lattice: Arc<FiniteLattice>,
    /// Downset membership masks over the lattice elements, ascending.
    j: Vec<u128>,
}

impl PartialSupLattice {
    /// Structural construction: members must be downsets. The partial-sup
    /// axioms are checked separately by [`validate_partial_sup`], so that
    /// near-miss structures can be examined.
    pub fn new(lattice: &Arc<FiniteLattice>, j: Vec<u128>) -> Result<PartialSupLattice, PslError> {
        let mut j = j;
        j.sort_unstable();
        j.dedup();
        for &d in &j {
            if d & !lattice.element_ground().full_mask() != 0 || !lattice.is_downset(d) {
                return Err(PslError::NotDownset(d));
            }
        }
        Ok(PartialSupLattice {
            lattice: lattice.clone(),
            j,
        })
    }

    pub fn lattice(&self) -> &Arc<FiniteLattice> {
        &self.lattice
    }

    pub fn j(&self) -> &[u128] {
        &self.j
    }

    pub fn j_contains(&self, mask: u128) -> bool {
        self.j.binary_search(&mask).is_ok()
    }

    /// The partial join: defined on members of the family, where it is the
    /// lattice join.
    pub fn partial_join(&self, downset: u128) -> Option<usize> {
        if self.j_contains(downset) {
            Some(self.lattice.join_of_mask(downset))
        } else {
            None
        }
    }

    /// The chosen downsets as a family over the element ground set.
    pub fn j_family(&self) -> SetFamily {
        SetFamily::from_masks(self.lattice.element_ground(), self.j.clone())
            .expect("masks validated at construction")
    }
}

/// The pointed lattice of a preconvexity space: the family ordered by
/// inclusion, with the point closures chosen. Generation always holds and is
/// asserted.
pub fn preconvex_lattice(p: &PreconvexSpace) -> Result<PointedLattice, PslError> {
    p.require_valid()?;
    let (lattice, member_masks) = lattice_of_family(p.preconvex())?;
    let mut chosen = Vec::new();
    for x in 0..p.ground().size() {
        let mut closure = p.ground().full_mask();
        for &m in p.preconvex().masks() {
            if m >> x & 1 == 1 {
                closure &= m;
            }
        }
        chosen.push(
            member_masks
                .binary_search(&closure)
                .expect("closure is preconvex"),
        );
    }
    Ok(PointedLattice::new(&lattice, chosen)?)
}

/// The preconvexity space of a pointed lattice: ground = chosen elements,
/// family = traces of principal downsets.
///
/// The result contains the empty set (hence is a valid preconvexity space)
/// exactly when the lattice bottom is not chosen.
pub fn g_functor(pl: &PointedLattice) -> Result<PreconvexSpace, PslError> {
    let l = pl.lattice();
    let labels: Vec<String> = pl
        .chosen()
        .iter()
        .map(|&s| l.label(s).to_string())
        .collect();
    let ground = GroundSet::new(labels)?;
    let mut masks = Vec::with_capacity(l.size());
    for a in 0..l.size() {
        let mut mask = 0u128;
        for (i, &s) in pl.chosen().iter().enumerate() {
            if l.leq(s, a) {
                mask |= 1 << i;
            }
        }
        masks.push(mask);
    }
    Ok(PreconvexSpace::new(SetFamily::from_masks(&ground, masks)?))
}

/// Preconvexity-side equivalence roundtrip: the map sending a point to its
/// closure is an isomorphism onto the rebuilt space. Holds exactly when
/// point closures are pairwise distinct.
pub fn equivalence_roundtrip_preconvex(p: &PreconvexSpace) -> Result<bool, PslError> {
    let pl = preconvex_lattice(p)?;
    let rebuilt = g_functor(&pl)?;
    // The rebuilt ground is the set of distinct point closures; the map
    // x ↦ cl{x} is a bijection iff the sizes agree.
    if rebuilt.ground().size() != p.ground().size() {
        return Ok(false);
    }
    // phi[x] = index of cl{x} in the rebuilt ground (chosen order).
    let (_, member_masks) = lattice_of_family(p.preconvex())?;
    let mut phi = Vec::with_capacity(p.ground().size());
    for x in 0..p.ground().size() {
        let mut closure = p.ground().full_mask();
        for &m in p.preconvex().masks() {
            if m >> x & 1 == 1 {
                closure &= m;
            }
        }
        let elem = member_masks
            .binary_search(&closure)
            .expect("closure is preconvex");
        match pl.chosen().binary_search(&elem) {
            Ok(i) => phi.push(i),
            Err(_) => return Ok(false),
        }
    }
    let mut seen = vec![false; phi.len()];
    for &i in &phi {
        if seen[i] {
            return Ok(false);
        }
        seen[i] = true;
    }
    // Families correspond exactly under the phi-image.
    let mut image: Vec<u128> = p
        .preconvex()
        .masks()
        .iter()
        .map(|&m| {
            let mut out = 0u128;
            for x in 0..p.ground().size() {
                if m >> x & 1 == 1 {
                    out |= 1 << phi[x];
                }
            }
            out
        })
        .collect();
    image.sort_unstable();
    image.dedup();
    Ok(image == rebuilt.preconvex().masks())
}

/// Lattice-side equivalence roundtrip: `x ↦ ↓x ∩ S` is an isomorphism of
/// pointed lattices onto the rebuilt structure. Holds for every valid
/// pointed lattice.
pub fn equivalence_roundtrip_pointed(pl: &PointedLattice) -> Result<bool, PslError> {
    let p = g_functor(pl)?;
    let (rebuilt, member_masks) = lattice_of_family(p.preconvex())?;
    let l = pl.lattice();
    if rebuilt.size() != l.size() {
        return Ok(false);
    }
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
    // Chosen elements of the rebuilt structure are the point closures of the
    // intermediate space; they must be the psi-images of the original chosen
    // set.
    let rebuilt_pl = preconvex_lattice(&p);
    let rebuilt_chosen: Vec<usize> = match rebuilt_pl {
        Ok(rpl) => rpl.chosen().to_vec(),
        // The intermediate space can lack the empty set when the lattice
        // bottom is chosen; recompute closures directly in that case.
        Err(_) => {
            let mut chosen = Vec::new();
            for x in 0..p.ground().size() {
                let mut closure = p.ground().full_mask();
                for &m in p.preconvex().masks() {
                    if m >> x & 1 == 1 {
                        closure &= m;
                    }
                }
                chosen.push(
                    member_masks
                        .binary_search(&closure)
                        .expect("closure present"),
                );
            }
            chosen.sort_unstable();
            chosen.dedup();
            chosen
        }
    };
    let mut image_chosen: Vec<usize> = pl.chosen().iter().map(|&s| psi[s]).collect();
    image_chosen.sort_unstable();
    Ok(rebuilt_chosen == image_chosen)
}

/// The space of a complete lattice under the chain of adjunctions: closed
/// sets are all downsets, convex sets are the ideals (principal downsets and
/// the empty set).
pub fn sup_to_topconvex(l: &Arc<FiniteLattice>) -> Result<TopConvexSpace, PslError> {
    let ground = l.element_ground().clone();
    let closed = SetFamily::from_masks(&ground, l.all_downsets())?;
    let mut convex_masks: Vec<u128> = (0..l.size()).map(|a| l.principal_downset(a)).collect();
    convex_masks.push(0);
    let convex = SetFamily::from_masks(&ground, convex_masks)?;
    Ok(TopConvexSpace::new(closed, convex)?)
}

/// Both adjoints of a monotone lattice map, where they exist.
#[derive(Debug, Clone)]
pub struct LatticeAdjoints {
    pub left: Option<LatticeMap>,
    pub right: Option<LatticeMap>,
}

/// Computes the adjoints of a monotone map: the left adjoint exists when the
/// map preserves meets, the right adjoint when it preserves joins. Each
/// computed adjoint has its adjunction law verified exhaustively.
pub fn lattice_adjoints(f: &LatticeMap) -> Result<LatticeAdjoints, LatticeError> {
    if !f.is_monotone() {
        return Err(LatticeError::NotMonotone);
    }
    let left = match f.left_adjoint() {
        Ok(adj) => Some(adj),
        Err(LatticeError::NoLeftAdjoint) => None,
        Err(e) => return Err(e),
    };
    let right = match f.right_adjoint() {
        Ok(adj) => Some(adj),
        Err(LatticeError::NoRightAdjoint) => None,
        Err(e) => return Err(e),
    };
    Ok(LatticeAdjoints { left, right })
}

/// The partial-sup structure of a pointed lattice: the downsets that contain
/// every chosen element below their supremum.
pub fn j_from_s(pl: &PointedLattice) -> PartialSupLattice {
    let l = pl.lattice();
    let chosen_mask = pl.chosen_mask();
    let j: Vec<u128> = l
        .all_downsets()
        .into_iter()
        .filter(|&d| {
            let sup = l.join_of_mask(d);
            l.principal_downset(sup) & chosen_mask & !d == 0
        })
        .collect();
    PartialSupLattice {
        lattice: l.clone(),
        j,
    }
}

/// The totally compact elements: those contained in every chosen downset
/// whose supremum dominates them.
pub fn s_from_j(psl: &PartialSupLattice) -> Vec<usize> {
    let l = psl.lattice();
    (0..l.size())
        .filter(|&a| {
            psl.j()
                .iter()
                .all(|&d| !l.leq(a, l.join_of_mask(d)) || d >> a & 1 == 1)
        })
        .collect()
}

/// Totally compactly generated: every element is the join of a chosen
/// downset of totally compact elements.
///
/// For a structure satisfying the sandwich axiom it suffices to test, for
/// each `x`, the largest candidate: the downset of all totally compact
/// elements below `x`. Any witness downset sits inside it with the same
/// join, so the sandwich axiom transfers membership upward.
pub fn is_tcg(psl: &PartialSupLattice) -> bool {
    let l = psl.lattice();
    let tc = s_from_j(psl);
    (0..l.size()).all(|x| {
        let mut candidate = 0u128;
        for &a in &tc {
            if l.leq(a, x) {
                candidate |= l.principal_downset(a);
            }
        }
        psl.j_contains(candidate) && l.join_of_mask(candidate) == x
    })
}

/// Witnessed validation report for the partial-sup axioms, plus
/// distributivity.
#[derive(Debug, Clone, Default)]
pub struct PslReport {
    /// Elements whose principal downset is missing from the family.
    pub missing_principal: Vec<usize>,
    /// Pairs of members whose intersection is missing.
    pub intersection_failures: Vec<(u128, u128)>,
    /// Pairs `(member, downset)` violating the sandwich axiom: the downset
    /// lies between the member and its supremum's principal downset but is
    /// not itself a member.
    pub sandwich_failures: Vec<(u128, u128)>,
    /// Witnesses `(y, union)` violating the glueing axiom: `y` is a member
    /// covered element-wise by a down-closed subfamily with union `union`,
    /// but no member inside the union reaches `y`'s supremum.
    pub glueing_failures: Vec<(u128, u128)>,
    /// Elements `m` at which the subfamily `{D : ⋁D ≥ m}` violates the
    /// distributive law.
    pub distributivity_failures: Vec<usize>,
}

impl PslReport {
    pub fn is_valid(&self) -> bool {
        self.missing_principal.is_empty()
            && self.intersection_failures.is_empty()
            && self.sandwich_failures.is_empty()
            && self.glueing_failures.is_empty()
            && self.distributivity_failures.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.is_valid() {
            return "valid distributive partial sup-lattice".to_string();
        }
        let mut parts = Vec::new();
        if !self.missing_principal.is_empty() {
            parts.push(format!(
                "{} principal downsets missing",
                self.missing_principal.len()
            ));
        }
        if !self.intersection_failures.is_empty() {
            parts.push(format!(
                "{} intersection failures",
                self.intersection_failures.len()
            ));
        }
        if !self.sandwich_failures.is_empty() {
            parts.push(format!(
                "{} sandwich failures",
                self.sandwich_failures.len()
            ));
        }
        if !self.glueing_failures.is_empty() {
            parts.push(format!("{} glueing failures", self.glueing_failures.len()));
        }
        if !self.distributivity_failures.is_empty() {
            parts.push(format!(
                "{} distributivity failures",
                self.distributivity_failures.len()
            ));
        }
        parts.join("; ")
    }
}

/// Checks the four partial-sup axioms and distributivity, with witnesses.
///
/// The glueing axiom quantifies over down-closed subfamilies; a violating
/// subfamily can always be shrunk to the down-closure of one chosen member
/// per element of the covered downset, which leaves the hypothesis and the
/// union unchanged. The check therefore walks the covered downset and
/// accumulates every reachable union (unions of downsets are downsets, so
/// there are few).
///
/// Distributivity `⋀{⋁D : D ∈ 𝒟} = ⋁⋂𝒟` reduces to checking, for each
/// element `m`, the single subfamily `{D : ⋁D ≥ m}`: a violating `𝒟` with
/// meet `m` forces a violation there, because `⋂𝒟` contains the
/// intersection over all members with supremum at least `m`.
pub fn validate_partial_sup(psl: &PartialSupLattice) -> PslReport {
    let l = psl.lattice();
    let n = l.size();
    let mut report = PslReport::default();

    for a in 0..n {
        if !psl.j_contains(l.principal_downset(a)) {
            report.missing_principal.push(a);
        }
    }

    for (i, &a) in psl.j().iter().enumerate() {
        for &b in &psl.j()[i + 1..] {
            if !psl.j_contains(a & b) {
                report.intersection_failures.push((a, b));
            }
        }
    }

    let downsets = l.all_downsets();
    for &a in psl.j() {
        let sup_mask = l.principal_downset(l.join_of_mask(a));
        for &b in &downsets {
            if a & !b == 0 && b & !sup_mask == 0 && !psl.j_contains(b) {
                report.sandwich_failures.push((a, b));
            }
        }
    }

    // Glueing: for every member y, walk its elements, at each step unioning
    // one member whose supremum dominates the element; collect all reachable
    // unions and demand a member inside each that reaches y's supremum.
    for &y in psl.j() {
        let x = l.join_of_mask(y);
        let elements: Vec<usize> = (0..n).filter(|&a| y >> a & 1 == 1).collect();
        let mut reachable: Vec<u128> = vec![0];
        let mut stuck = false;
        for &a in &elements {
            let mut next = Vec::new();
            for &u in &reachable {
                for &d in psl.j() {
                    if l.leq(a, l.join_of_mask(d)) {
                        next.push(u | d);
                    }
                }
            }
            next.sort_unstable();
            next.dedup();
            if next.is_empty() {
                // No member dominates a at all: hypothesis is unsatisfiable.
                stuck = true;
                break;
            }
            reachable = next;
        }
        if stuck {
            continue;
        }
        for &u in &reachable {
            let ok = psl
                .j()
                .iter()
                .any(|&b| b & !u == 0 && l.leq(x, l.join_of_mask(b)));
            if !ok {
                report.glueing_failures.push((y, u));
            }
        }
    }

    for m in 0..n {
        let mut inter = l.element_ground().full_mask();
        let mut meet_of_joins = l.top();
        for &d in psl.j() {
            if l.leq(m, l.join_of_mask(d)) {
                inter &= d;
                meet_of_joins = l.meet(meet_of_joins, l.join_of_mask(d));
            }
        }
        if l.join_of_mask(inter) != meet_of_joins {
            report.distributivity_failures.push(m);
        }
    }

    report
}

/// Partial sup-lattice homomorphism: an inf-homomorphism whose image downset
/// of every chosen downset is chosen with the matching supremum.
pub fn is_partial_sup_hom(
    f: &LatticeMap,
    src: &PartialSupLattice,
    dst: &PartialSupLattice,
) -> Result<bool, PslError> {
    if f.dom() != src.lattice() || f.cod() != dst.lattice() {
        return Err(PslError::Lattice(LatticeError::LatticeMismatch));
    }
    if !f.preserves_meets() {
        return Err(PslError::NotInfHom);
    }
    let l = src.lattice();
    let m = dst.lattice();
    for &a in src.j() {
        // ↓{f(x) : x in a}
        let mut image_downset = 0u128;
        for x in 0..l.size() {
            if a >> x & 1 == 1 {
                image_downset |= m.principal_downset(f.apply(x));
            }
        }
        if !dst.j_contains(image_downset) {
            return Ok(false);
        }
        if m.join_of_mask(image_downset) != f.apply(l.join_of_mask(a)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exhaustive equivalence of the two homomorphism notions between totally
/// compactly generated structures: a meet-preserving map is a partial
/// sup-homomorphism exactly when its left adjoint carries totally compact
/// elements to totally compact elements.
pub fn hom_equivalence_check(
    src: &PartialSupLattice,
    dst: &PartialSupLattice,
) -> Result<bool, PslError> {
    if !validate_partial_sup(src).is_valid() || !validate_partial_sup(dst).is_valid() {
        return Err(PslError::InvariantFailure(
            "inputs must be valid".to_string(),
        ));
    }
    if !is_tcg(src) || !is_tcg(dst) {
        return Err(PslError::NotTcg);
    }
    let l = src.lattice();
    let m = dst.lattice();
    let src_tc = s_from_j(src);
    let dst_tc = s_from_j(dst);

    let size = crate::spaces::function_count(l.size(), m.size());
    if size > crate::spaces::DEFAULT_HOM_LIMIT {
        return Err(PslError::SearchSpaceTooLarge { size, limit: crate::spaces::DEFAULT_HOM_LIMIT });
    }
    let total = m.size().pow(l.size() as u32);
    for code in 0..total {
        let mut c = code;
        let assignment: Vec<usize> = (0..l.size())
            .map(|_| {
                let v = c % m.size();
                c /= m.size();
                v
            })
            .collect();
        let f = LatticeMap::new(l, m, assignment)?;
        if !f.preserves_meets() {
            continue;
        }
        let is_psl_hom = is_partial_sup_hom(&f, src, dst)?;
        let adj = f.left_adjoint()?;
        let preserves_tc = dst_tc.iter().all(|&a| src_tc.contains(&adj.apply(a)));
        if is_psl_hom != preserves_tc {
            return Ok(false);
        }
    }
    Ok(true)
}
