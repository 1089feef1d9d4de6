//! Bit-packed subsets of a finite ground set, canonically ordered set
//! families, and the closure operators the rest of the crate builds on.
//!
//! A [`GroundSet`] fixes an ordered list of element labels; a [`Subset`] is a
//! membership mask over those indices; a [`SetFamily`] is a deduplicated
//! family of subsets stored in ascending mask order, so family equality is
//! structural equality.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Shared handle to a ground set. Cheap to clone, compared by content.
pub type Ground = Arc<GroundSet>;

/// Errors from ground-set, subset, and family construction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("ground set has {0} elements; the bit-packed representation is capped at 128")]
    GroundTooLarge(usize),
    #[error("duplicate label `{0}` in ground set")]
    DuplicateLabel(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("element index {index} out of range for ground set of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("mask has bits outside the ground set")]
    MaskOutOfRange,
    #[error("value belongs to a different ground set")]
    GroundMismatch,
    #[error("family is not a closure system: it must contain the full set and all pairwise intersections")]
    NotClosureSystem,
    #[error("family of {size} members exceeds the materialization limit of {limit}")]
    FamilyTooLarge { size: usize, limit: usize },
}

/// An ordered list of distinct element names. Element index = position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundSet {
    labels: Vec<String>,
}

impl GroundSet {
    /// Largest supported ground set.
    pub const MAX_SIZE: usize = 128;

    pub fn new<I, S>(labels: I) -> Result<Ground, SetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() > Self::MAX_SIZE {
            return Err(SetError::GroundTooLarge(labels.len()));
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return Err(SetError::DuplicateLabel(a.clone()));
            }
        }
        Ok(Arc::new(GroundSet { labels }))
    }

    /// Ground set labelled `"0"`, `"1"`, ..., `"n-1"`.
    pub fn indexed(n: usize) -> Result<Ground, SetError> {
        Self::new((0..n).map(|i| i.to_string()))
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Mask with one bit per element.
    pub fn full_mask(&self) -> u128 {
        if self.labels.len() == Self::MAX_SIZE {
            u128::MAX
        } else {
            (1u128 << self.labels.len()) - 1
        }
    }
}

fn same_ground(a: &Ground, b: &Ground) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A subset of a ground set, stored as a membership mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subset {
    ground: Ground,
    bits: u128,
}

impl Subset {
    pub fn empty(ground: &Ground) -> Subset {
        Subset {
            ground: ground.clone(),
            bits: 0,
        }
    }

    pub fn full(ground: &Ground) -> Subset {
        Subset {
            ground: ground.clone(),
            bits: ground.full_mask(),
        }
    }

    pub fn from_mask(ground: &Ground, bits: u128) -> Result<Subset, SetError> {
        if bits & !ground.full_mask() != 0 {
            return Err(SetError::MaskOutOfRange);
        }
        Ok(Subset {
            ground: ground.clone(),
            bits,
        })
    }

    pub fn from_indices<I>(ground: &Ground, indices: I) -> Result<Subset, SetError>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut bits = 0u128;
        for i in indices {
            if i >= ground.size() {
                return Err(SetError::IndexOutOfRange {
                    index: i,
                    size: ground.size(),
                });
            }
            bits |= 1 << i;
        }
        Ok(Subset {
            ground: ground.clone(),
            bits,
        })
    }

    pub fn from_labels<'a, I>(ground: &Ground, labels: I) -> Result<Subset, SetError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut bits = 0u128;
        for l in labels {
            let i = ground
                .index_of(l)
                .ok_or_else(|| SetError::UnknownLabel(l.to_string()))?;
            bits |= 1 << i;
        }
        Ok(Subset {
            ground: ground.clone(),
            bits,
        })
    }

    pub fn ground(&self) -> &Ground {
        &self.ground
    }

    pub fn bits(&self) -> u128 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_full(&self) -> bool {
        self.bits == self.ground.full_mask()
    }

    pub fn contains_index(&self, index: usize) -> bool {
        index < self.ground.size() && self.bits >> index & 1 == 1
    }

    fn check_same(&self, other: &Subset) {
        assert!(
            same_ground(&self.ground, &other.ground),
            "subset ground mismatch"
        );
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.check_same(other);
        self.bits & !other.bits == 0
    }

    pub fn union(&self, other: &Subset) -> Subset {
        self.check_same(other);
        Subset {
            ground: self.ground.clone(),
            bits: self.bits | other.bits,
        }
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        self.check_same(other);
        Subset {
            ground: self.ground.clone(),
            bits: self.bits & other.bits,
        }
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        self.check_same(other);
        Subset {
            ground: self.ground.clone(),
            bits: self.bits & !other.bits,
        }
    }

    pub fn complement(&self) -> Subset {
        Subset {
            ground: self.ground.clone(),
            bits: self.ground.full_mask() & !self.bits,
        }
    }

    pub fn iter_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.ground.size()).filter(move |i| self.bits >> i & 1 == 1)
    }

    pub fn member_labels(&self) -> Vec<&str> {
        self.iter_indices().map(|i| self.ground.label(i)).collect()
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.member_labels().join(","))
    }
}

/// A deduplicated family of subsets, stored in ascending mask order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetFamily {
    ground: Ground,
    masks: Vec<u128>,
}

impl SetFamily {
    /// Soft cap on materialized family size; `power_set` refuses beyond it.
    pub const MAX_MEMBERS: usize = 1 << 16;

    pub fn new<I>(ground: &Ground, members: I) -> Result<SetFamily, SetError>
    where
        I: IntoIterator<Item = Subset>,
    {
        let mut masks = Vec::new();
        for m in members {
            if !same_ground(&m.ground, ground) {
                return Err(SetError::GroundMismatch);
            }
            masks.push(m.bits);
        }
        Ok(Self::from_masks_unchecked(ground, masks))
    }

    pub fn from_masks(ground: &Ground, masks: Vec<u128>) -> Result<SetFamily, SetError> {
        let full = ground.full_mask();
        if masks.iter().any(|&m| m & !full != 0) {
            return Err(SetError::MaskOutOfRange);
        }
        Ok(Self::from_masks_unchecked(ground, masks))
    }

    pub(crate) fn from_masks_unchecked(ground: &Ground, mut masks: Vec<u128>) -> SetFamily {
        masks.sort_unstable();
        masks.dedup();
        SetFamily {
            ground: ground.clone(),
            masks,
        }
    }

    pub fn empty(ground: &Ground) -> SetFamily {
        SetFamily {
            ground: ground.clone(),
            masks: Vec::new(),
        }
    }

    /// All subsets of the ground set. Rejected for grounds of more than 16
    /// elements to keep materialized families small.
    pub fn power_set(ground: &Ground) -> Result<SetFamily, SetError> {
        let n = ground.size();
        if n > 16 {
            return Err(SetError::FamilyTooLarge {
                size: usize::MAX,
                limit: Self::MAX_MEMBERS,
            });
        }
        let masks = (0..(1u128 << n)).collect();
        Ok(SetFamily {
            ground: ground.clone(),
            masks,
        })
    }

    pub fn ground(&self) -> &Ground {
        &self.ground
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn masks(&self) -> &[u128] {
        &self.masks
    }

    pub fn contains_mask(&self, mask: u128) -> bool {
        self.masks.binary_search(&mask).is_ok()
    }

    pub fn contains(&self, subset: &Subset) -> bool {
        same_ground(&self.ground, &subset.ground) && self.contains_mask(subset.bits)
    }

    pub fn member(&self, index: usize) -> Subset {
        Subset {
            ground: self.ground.clone(),
            bits: self.masks[index],
        }
    }

    pub fn members(&self) -> impl Iterator<Item = Subset> + '_ {
        self.masks.iter().map(move |&bits| Subset {
            ground: self.ground.clone(),
            bits,
        })
    }

    pub fn with_member(&self, subset: &Subset) -> Result<SetFamily, SetError> {
        if !same_ground(&self.ground, &subset.ground) {
            return Err(SetError::GroundMismatch);
        }
        let mut masks = self.masks.clone();
        masks.push(subset.bits);
        Ok(Self::from_masks_unchecked(&self.ground, masks))
    }

    /// Members common to both families (families over the same ground).
    pub fn intersect_family(&self, other: &SetFamily) -> Result<SetFamily, SetError> {
        if !same_ground(&self.ground, &other.ground) {
            return Err(SetError::GroundMismatch);
        }
        let masks = self
            .masks
            .iter()
            .copied()
            .filter(|&m| other.contains_mask(m))
            .collect();
        Ok(SetFamily {
            ground: self.ground.clone(),
            masks,
        })
    }

    /// Members of either family (families over the same ground).
    pub fn union_family(&self, other: &SetFamily) -> Result<SetFamily, SetError> {
        if !same_ground(&self.ground, &other.ground) {
            return Err(SetError::GroundMismatch);
        }
        let mut masks = self.masks.clone();
        masks.extend_from_slice(&other.masks);
        Ok(Self::from_masks_unchecked(&self.ground, masks))
    }

    pub fn is_pairwise_intersection_closed(&self) -> bool {
        closed_under(&self.masks, |a, b| a & b)
    }

    pub fn is_pairwise_union_closed(&self) -> bool {
        closed_under(&self.masks, |a, b| a | b)
    }
}

impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members().map(|s| s.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn closed_under(masks: &[u128], op: impl Fn(u128, u128) -> u128) -> bool {
    for (i, &a) in masks.iter().enumerate() {
        for &b in &masks[i + 1..] {
            if masks.binary_search(&op(a, b)).is_err() {
                return false;
            }
        }
    }
    true
}

/// Closes a sorted mask vector under a binary operation plus a seed value,
/// iterating pairwise steps to a fixpoint. Sound for closure under arbitrary
/// subfamilies because the ground is finite.
fn close(masks: &[u128], seed: u128, op: impl Fn(u128, u128) -> u128) -> Vec<u128> {
    let mut out: Vec<u128> = masks.to_vec();
    out.push(seed);
    out.sort_unstable();
    out.dedup();
    loop {
        let mut fresh = Vec::new();
        for (i, &a) in out.iter().enumerate() {
            for &b in &out[i..] {
                let c = op(a, b);
                if out.binary_search(&c).is_err() {
                    fresh.push(c);
                }
            }
        }
        if fresh.is_empty() {
            return out;
        }
        out.extend(fresh);
        out.sort_unstable();
        out.dedup();
    }
}

/// Smallest family containing `fam` that is closed under intersections of
/// arbitrary subfamilies. The empty intersection contributes the full set.
pub fn intersection_closure(fam: &SetFamily) -> SetFamily {
    let masks = close(&fam.masks, fam.ground.full_mask(), |a, b| a & b);
    SetFamily {
        ground: fam.ground.clone(),
        masks,
    }
}

/// Smallest family containing `fam` that is closed under unions of finite
/// subfamilies. The empty union contributes the empty set.
pub fn finite_union_closure(fam: &SetFamily) -> SetFamily {
    let masks = close(&fam.masks, 0, |a, b| a | b);
    SetFamily {
        ground: fam.ground.clone(),
        masks,
    }
}

/// Smallest family containing `fam` that is closed under unions of directed
/// subfamilies. On a finite ground a nonempty directed family contains its
/// own union, so only the empty (directed) union adds anything: the result is
/// `fam` plus the empty set.
pub fn directed_union_closure(fam: &SetFamily) -> SetFamily {
    let mut masks = fam.masks.clone();
    if masks.binary_search(&0).is_err() {
        masks.insert(0, 0);
    }
    SetFamily {
        ground: fam.ground.clone(),
        masks,
    }
}

/// Closure under finite unions and arbitrary intersections, in that order.
/// Every member is an intersection of finite unions of `fam`-members.
pub fn overline_closure(fam: &SetFamily) -> SetFamily {
    intersection_closure(&finite_union_closure(fam))
}

/// Intersection of all members of `fam` containing `a`.
///
/// `fam` must be a closure system (contain the full set and all pairwise
/// intersections), so the hull always exists.
pub fn hull(fam: &SetFamily, a: &Subset) -> Result<Subset, SetError> {
    if !same_ground(&fam.ground, &a.ground) {
        return Err(SetError::GroundMismatch);
    }
    if !fam.contains_mask(fam.ground.full_mask()) || !fam.is_pairwise_intersection_closed() {
        return Err(SetError::NotClosureSystem);
    }
    let mut out = fam.ground.full_mask();
    for &m in &fam.masks {
        if a.bits & !m == 0 {
            out &= m;
        }
    }
    Ok(Subset {
        ground: fam.ground.clone(),
        bits: out,
    })
}

/// Closure-condition flags for a family, each decided directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosureSystemReport {
    /// The full ground set is a member (the empty intersection).
    pub has_top: bool,
    /// The empty set is a member (the empty union).
    pub has_bottom: bool,
    /// All pairwise intersections are members.
    pub intersection_closed: bool,
    /// All pairwise unions are members.
    pub union_closed: bool,
    /// All unions of directed subfamilies are members.
    pub directed_closed: bool,
}

impl ClosureSystemReport {
    pub fn all(&self) -> bool {
        self.has_top
            && self.has_bottom
            && self.intersection_closed
            && self.union_closed
            && self.directed_closed
    }
}

/// Reports which closure conditions a family satisfies.
pub fn is_closure_system(fam: &SetFamily) -> ClosureSystemReport {
    // A nonempty finite directed family contains an upper bound of any two
    // members, hence (by induction) a maximum, which equals its union. Only
    // the empty directed subfamily is left to check.
    ClosureSystemReport {
        has_top: fam.contains_mask(fam.ground.full_mask()),
        has_bottom: fam.contains_mask(0),
        intersection_closed: fam.is_pairwise_intersection_closed(),
        union_closed: fam.is_pairwise_union_closed(),
        directed_closed: fam.contains_mask(0),
    }
}
