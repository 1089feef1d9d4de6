//! Topological convexity spaces, preconvexity spaces, maps between their
//! ground sets, and exhaustive homomorphism enumeration.

use std::fmt;

use thiserror::Error;

use crate::sets::{Ground, SetError, SetFamily, Subset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("map and space ground sets disagree")]
    GroundMismatch,
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("search space of {size} functions exceeds the limit {limit}")]
    SearchSpaceTooLarge { size: u128, limit: u128 },
    #[error("{0} is not a member of the preconvexity")]
    NotPreconvex(String),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// Which family of a space a validation violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyRole {
    Closed,
    Convex,
    Preconvex,
}

impl fmt::Display for FamilyRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyRole::Closed => write!(f, "closed family"),
            FamilyRole::Convex => write!(f, "convex family"),
            FamilyRole::Preconvex => write!(f, "preconvex family"),
        }
    }
}

/// A single violated closure condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The empty union (the empty set) is missing.
    MissingEmpty(FamilyRole),
    /// The empty intersection (the full ground set) is missing.
    MissingFull(FamilyRole),
    UnionNotClosed(FamilyRole, Subset, Subset),
    IntersectionNotClosed(FamilyRole, Subset, Subset),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingEmpty(r) => write!(f, "{r} lacks the empty set (empty union)"),
            Violation::MissingFull(r) => {
                write!(f, "{r} lacks the full ground set (empty intersection)")
            }
            Violation::UnionNotClosed(r, a, b) => {
                write!(f, "{r} lacks the union of {a} and {b}")
            }
            Violation::IntersectionNotClosed(r, a, b) => {
                write!(f, "{r} lacks the intersection of {a} and {b}")
            }
        }
    }
}

/// Report-style validation result: empty iff the space is valid.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            write!(f, "valid")
        } else {
            let lines: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", lines.join("; "))
        }
    }
}

/// A ground set with a closed-set family and a convex-set family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopConvexSpace {
    ground: Ground,
    closed: SetFamily,
    convex: SetFamily,
}

impl TopConvexSpace {
    pub fn new(closed: SetFamily, convex: SetFamily) -> Result<TopConvexSpace, SpaceError> {
        if closed.ground() != convex.ground() {
            return Err(SpaceError::GroundMismatch);
        }
        let ground = closed.ground().clone();
        Ok(TopConvexSpace {
            ground,
            closed,
            convex,
        })
    }

    pub fn ground(&self) -> &Ground {
        &self.ground
    }

    pub fn closed(&self) -> &SetFamily {
        &self.closed
    }

    pub fn convex(&self) -> &SetFamily {
        &self.convex
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        check_family(&mut violations, &self.closed, FamilyRole::Closed, true);
        check_family(&mut violations, &self.convex, FamilyRole::Convex, false);
        ValidationReport { violations }
    }

    pub(crate) fn require_valid(&self) -> Result<(), SpaceError> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(SpaceError::InvalidSpace(report.to_string()))
        }
    }
}

/// A ground set with a single intersection-closed family containing the
/// empty set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreconvexSpace {
    ground: Ground,
    preconvex: SetFamily,
}

impl PreconvexSpace {
    pub fn new(preconvex: SetFamily) -> PreconvexSpace {
        let ground = preconvex.ground().clone();
        PreconvexSpace { ground, preconvex }
    }

    pub fn ground(&self) -> &Ground {
        &self.ground
    }

    pub fn preconvex(&self) -> &SetFamily {
        &self.preconvex
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        check_family(
            &mut violations,
            &self.preconvex,
            FamilyRole::Preconvex,
            false,
        );
        ValidationReport { violations }
    }

    pub(crate) fn require_valid(&self) -> Result<(), SpaceError> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(SpaceError::InvalidSpace(report.to_string()))
        }
    }
}

// Every family must contain the empty set (empty union / empty directed
// union) and the full set (empty intersection) and be closed under pairwise
// intersections; only the closed-set family needs pairwise unions.
fn check_family(violations: &mut Vec<Violation>, fam: &SetFamily, role: FamilyRole, joins: bool) {
    if !fam.contains_mask(fam.ground().full_mask()) {
        violations.push(Violation::MissingFull(role));
    }
    if !fam.contains_mask(0) {
        violations.push(Violation::MissingEmpty(role));
    }
    let masks = fam.masks();
    for (i, &a) in masks.iter().enumerate() {
        for &b in &masks[i + 1..] {
            if !fam.contains_mask(a & b) {
                violations.push(Violation::IntersectionNotClosed(
                    role,
                    fam.member_by_mask(a),
                    fam.member_by_mask(b),
                ));
            }
            if joins && !fam.contains_mask(a | b) {
                violations.push(Violation::UnionNotClosed(
                    role,
                    fam.member_by_mask(a),
                    fam.member_by_mask(b),
                ));
            }
        }
    }
}

/// A total function between two ground sets, acting on subsets by preimage.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpaceMap {
    dom: Ground,
    cod: Ground,
    assignment: Vec<usize>,
}

impl SpaceMap {
    pub fn new(dom: &Ground, cod: &Ground, assignment: Vec<usize>) -> Result<SpaceMap, SpaceError> {
        if assignment.len() != dom.size() || assignment.iter().any(|&i| i >= cod.size()) {
            return Err(SpaceError::GroundMismatch);
        }
        Ok(SpaceMap {
            dom: dom.clone(),
            cod: cod.clone(),
            assignment,
        })
    }

    pub fn identity(ground: &Ground) -> SpaceMap {
        SpaceMap {
            dom: ground.clone(),
            cod: ground.clone(),
            assignment: (0..ground.size()).collect(),
        }
    }

    /// Builds a map from label pairs, e.g. `[("0", "1")]`.
    pub fn from_labels(
        dom: &Ground,
        cod: &Ground,
        pairs: &[(&str, &str)],
    ) -> Result<SpaceMap, SpaceError> {
        let mut assignment = vec![usize::MAX; dom.size()];
        for (from, to) in pairs {
            let i = dom
                .index_of(from)
                .ok_or(SetError::UnknownLabel(from.to_string()))?;
            let j = cod
                .index_of(to)
                .ok_or(SetError::UnknownLabel(to.to_string()))?;
            assignment[i] = j;
        }
        if assignment.contains(&usize::MAX) {
            return Err(SpaceError::GroundMismatch);
        }
        Ok(SpaceMap {
            dom: dom.clone(),
            cod: cod.clone(),
            assignment,
        })
    }

    pub fn dom(&self) -> &Ground {
        &self.dom
    }

    pub fn cod(&self) -> &Ground {
        &self.cod
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn apply(&self, index: usize) -> usize {
        self.assignment[index]
    }

    pub fn preimage(&self, target: &Subset) -> Result<Subset, SpaceError> {
        if target.ground() != &self.cod {
            return Err(SpaceError::GroundMismatch);
        }
        let bits = preimage_mask(&self.assignment, target.bits());
        Ok(Subset::from_mask(&self.dom, bits)?)
    }

    pub fn image(&self, source: &Subset) -> Result<Subset, SpaceError> {
        if source.ground() != &self.dom {
            return Err(SpaceError::GroundMismatch);
        }
        let mut bits = 0u128;
        for i in source.iter_indices() {
            bits |= 1 << self.assignment[i];
        }
        Ok(Subset::from_mask(&self.cod, bits)?)
    }

    pub fn compose(&self, then: &SpaceMap) -> Result<SpaceMap, SpaceError> {
        if self.cod != then.dom {
            return Err(SpaceError::GroundMismatch);
        }
        let assignment = self
            .assignment
            .iter()
            .map(|&i| then.assignment[i])
            .collect();
        Ok(SpaceMap {
            dom: self.dom.clone(),
            cod: then.cod.clone(),
            assignment,
        })
    }

    pub fn is_bijection(&self) -> bool {
        if self.dom.size() != self.cod.size() {
            return false;
        }
        let mut seen = vec![false; self.cod.size()];
        for &i in &self.assignment {
            if seen[i] {
                return false;
            }
            seen[i] = true;
        }
        true
    }

    pub fn inverse(&self) -> Option<SpaceMap> {
        if !self.is_bijection() {
            return None;
        }
        let mut assignment = vec![0; self.cod.size()];
        for (i, &j) in self.assignment.iter().enumerate() {
            assignment[j] = i;
        }
        Some(SpaceMap {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            assignment,
        })
    }
}

pub(crate) fn preimage_mask(assignment: &[usize], target: u128) -> u128 {
    let mut bits = 0u128;
    for (i, &j) in assignment.iter().enumerate() {
        if target >> j & 1 == 1 {
            bits |= 1 << i;
        }
    }
    bits
}

impl fmt::Display for SpaceMap {
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

/// True iff every closed preimage is closed and every convex preimage is
/// convex.
pub fn is_tc_hom(
    f: &SpaceMap,
    src: &TopConvexSpace,
    dst: &TopConvexSpace,
) -> Result<bool, SpaceError> {
    if &f.dom != src.ground() || &f.cod != dst.ground() {
        return Err(SpaceError::GroundMismatch);
    }
    Ok(preimages_land_in(&f.assignment, dst.closed(), src.closed())
        && preimages_land_in(&f.assignment, dst.convex(), src.convex()))
}

/// True iff every preconvex preimage is preconvex.
pub fn is_pre_hom(
    f: &SpaceMap,
    src: &PreconvexSpace,
    dst: &PreconvexSpace,
) -> Result<bool, SpaceError> {
    if &f.dom != src.ground() || &f.cod != dst.ground() {
        return Err(SpaceError::GroundMismatch);
    }
    Ok(preimages_land_in(
        &f.assignment,
        dst.preconvex(),
        src.preconvex(),
    ))
}

pub(crate) fn preimages_land_in(assignment: &[usize], dst: &SetFamily, src: &SetFamily) -> bool {
    dst.masks()
        .iter()
        .all(|&m| src.contains_mask(preimage_mask(assignment, m)))
}

/// Default cap on exhaustive function enumeration.
pub const DEFAULT_HOM_LIMIT: u128 = 10_000_000;

/// Visits every assignment array `dom_size -> {0..cod_size}` in lexicographic
/// order.
pub(crate) fn for_each_function(
    dom_size: usize,
    cod_size: usize,
    limit: u128,
    mut visit: impl FnMut(&[usize]),
) -> Result<(), SpaceError> {
    let count = function_count(dom_size, cod_size);
    if count > limit {
        return Err(SpaceError::SearchSpaceTooLarge { size: count, limit });
    }
    if count == 0 {
        return Ok(());
    }
    let mut assignment = vec![0usize; dom_size];
    loop {
        visit(&assignment);
        // Odometer increment, most significant digit first so the order is
        // lexicographic on the assignment array.
        let mut pos = dom_size;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            assignment[pos] += 1;
            if assignment[pos] < cod_size {
                break;
            }
            assignment[pos] = 0;
        }
    }
}

pub(crate) fn function_count(dom_size: usize, cod_size: usize) -> u128 {
    if dom_size == 0 {
        return 1;
    }
    if cod_size == 0 {
        return 0;
    }
    let mut count: u128 = 1;
    for _ in 0..dom_size {
        count = count.saturating_mul(cod_size as u128);
    }
    count
}

/// All topological convexity homomorphisms from `src` to `dst`, in
/// lexicographic order of the assignment array.
pub fn enumerate_tc_homs(
    src: &TopConvexSpace,
    dst: &TopConvexSpace,
    limit: u128,
) -> Result<Vec<SpaceMap>, SpaceError> {
    let mut out = Vec::new();
    for_each_function(
        src.ground().size(),
        dst.ground().size(),
        limit,
        |assignment| {
            if preimages_land_in(assignment, dst.closed(), src.closed())
                && preimages_land_in(assignment, dst.convex(), src.convex())
            {
                out.push(SpaceMap {
                    dom: src.ground().clone(),
                    cod: dst.ground().clone(),
                    assignment: assignment.to_vec(),
                });
            }
        },
    )?;
    Ok(out)
}

/// All preconvexity homomorphisms from `src` to `dst`, in lexicographic
/// order of the assignment array.
pub fn enumerate_pre_homs(
    src: &PreconvexSpace,
    dst: &PreconvexSpace,
    limit: u128,
) -> Result<Vec<SpaceMap>, SpaceError> {
    let mut out = Vec::new();
    for_each_function(
        src.ground().size(),
        dst.ground().size(),
        limit,
        |assignment| {
            if preimages_land_in(assignment, dst.preconvex(), src.preconvex()) {
                out.push(SpaceMap {
                    dom: src.ground().clone(),
                    cod: dst.ground().clone(),
                    assignment: assignment.to_vec(),
                });
            }
        },
    )?;
    Ok(out)
}

/// A convex set together with a disjoint closed cover witnessing that it is
/// disconnected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisconnectionWitness {
    pub convex: Subset,
    pub cover: (Subset, Subset),
}

/// Finds a convex set that two closed sets disconnect, if any.
///
/// `A` is disconnected when closed `F1`, `F2` cover it, both meet it, and
/// `A ∩ F1 ∩ F2` is empty — disjointness is required only on `A`.
pub fn disconnection_witness(
    s: &TopConvexSpace,
) -> Result<Option<DisconnectionWitness>, SpaceError> {
    s.require_valid()?;
    let closed = s.closed().masks();
    for &c in s.convex().masks() {
        for (i, &f1) in closed.iter().enumerate() {
            if c & f1 == 0 {
                continue;
            }
            for &f2 in &closed[i + 1..] {
                if c & f2 == 0 || c & !(f1 | f2) != 0 || c & f1 & f2 != 0 {
                    continue;
                }
                return Ok(Some(DisconnectionWitness {
                    convex: s.convex().member_by_mask_pub(c),
                    cover: (
                        s.closed().member_by_mask_pub(f1),
                        s.closed().member_by_mask_pub(f2),
                    ),
                }));
            }
        }
    }
    Ok(None)
}

/// True iff every convex set is connected. The compact-hull compatibility
/// condition holds vacuously on finite spaces, so connectedness decides
/// compatibility here.
pub fn is_compatible(s: &TopConvexSpace) -> Result<bool, SpaceError> {
    Ok(disconnection_witness(s)?.is_none())
}

impl SetFamily {
    fn member_by_mask(&self, mask: u128) -> Subset {
        Subset::from_mask(self.ground(), mask).expect("mask comes from this family")
    }

    pub(crate) fn member_by_mask_pub(&self, mask: u128) -> Subset {
        self.member_by_mask(mask)
    }
}
