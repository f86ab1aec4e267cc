//! Finite-groupoid backend: carriers are finite groupoids, predicates are
//! strictly split families of finite groupoids over tuples of carrier
//! objects, and truth is fiber non-emptiness.
//!
//! Equality denotes the path predicate (hom-sets), existential quantification
//! is the Grothendieck construction, universal quantification is the groupoid
//! of coherent sections, and vertical proof maps are pseudonatural
//! transformations compared up to invertible modification. Carriers stand in
//! for spaces at the 1-truncated level: contractibility, path-connectedness,
//! and homotopies between maps are all visible and exactly computable here.

mod carrier;
mod family;
mod fiber;

pub use carrier::{
    all_functors, groupoid_equivalent, natural_isos, EquivWitness, FinGroupoid,
    PlainFunctor,
};
pub use family::{
    fiber_exponential, grothendieck_exists, modification_exists, path_predicate,
    sections_forall, validate_family, validate_pseudonatural, GPred, GroupoidModel,
    GroupoidStructure, GrpdMor, SymbolFunctor, Transport, DEFAULT_MAX_FIBER,
};
pub use fiber::{
    CoproductFiber, FunctorFiber, GrothFiber, ProductFiber, Section, SectionsFiber, Tag,
};

pub(crate) use family::tuples;
