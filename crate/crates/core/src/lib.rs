//! Finite-model toolkit for topological convexity spaces, preconvexity
//! spaces, and complete lattices.
//!
//! Everything here is exact and exhaustive at desk scale: ground sets are
//! bit-packed (at most 128 elements), set families are canonically ordered,
//! and the categorical laws — the closed-convex/induced-space adjunction,
//! Stone duality for finite `T0` topologies, the preconvexity/partial-sup
//! equivalence — are checked by direct enumeration rather than proved.
//!
//! Module map:
//!
//! * [`sets`] — subsets, set families, and the three closure operators.
//! * [`spaces`] — topological convexity spaces, preconvexity spaces,
//!   homomorphisms, and exhaustive hom enumeration.
//! * [`adjunction`] — the closed-convex functor, its right adjoint, and the
//!   fixed-point predicates (teetotal, geometric).
//! * [`stone`] — finite lattices, pointed coframes, and the space/lattice
//!   equivalence with separation flags.
//! * [`suplat`] — the preconvexity/pointed-lattice equivalence and partial
//!   sup-lattices.
//! * [`instances`] — generators for the worked examples: metric betweenness,
//!   lattice ideals, permutation convexity, subgroup convexity, measure
//!   algebras.
//! * [`corpus`] — deterministic instance enumeration used by the test and
//!   acceptance suites.
//!
//! ```
//! use convtop::adjunction::{closed_convex, induced_space, is_geometric};
//! use convtop::sets::{GroundSet, SetFamily};
//! use convtop::spaces::PreconvexSpace;
//!
//! // The preconvexity of singletons on three points.
//! let ground = GroundSet::indexed(3)?;
//! let family = SetFamily::from_masks(&ground, vec![0b000, 0b001, 0b010, 0b100, 0b111])?;
//! let p = PreconvexSpace::new(family);
//!
//! // Finite preconvexity spaces are fixed points of the closed-convex
//! // comonad on spaces.
//! assert!(is_geometric(&p)?);
//! assert_eq!(closed_convex(&induced_space(&p)?)?, p);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod adjunction;
pub mod corpus;
pub mod instances;
pub mod sets;
pub mod spaces;
pub mod stone;
pub mod suplat;

pub use sets::{GroundSet, SetError, SetFamily, Subset};
pub use spaces::{PreconvexSpace, SpaceError, SpaceMap, TopConvexSpace};
pub use stone::{FiniteLattice, LatticeError, LatticeMap, PointedLattice};
pub use suplat::PartialSupLattice;
