//! Finite filtered probability spaces.
//!
//! A [`ScenarioTree`] is a rooted tree whose level-`k` nodes are the atoms of
//! the σ-algebra `𝒢_k`. Conditional expectations of vector-valued random
//! variables are weighted averages over descendant leaves; those of
//! polytope-valued random variables are weighted Minkowski averages. Nothing
//! here samples, so every identity is checked to arithmetic precision.

mod audit;
pub mod corpus;
mod decomposable;
mod expect;
mod randomization;
mod space;

pub use audit::{
    hull_vs_conditional, martingale_audit, AuditVerdict, HullGapReport, MartingaleAudit, NodeDefect, NodeGap,
    GAP_TOL,
};
pub use decomposable::{decomposable_hull, DECOMPOSABLE_GUARD};
pub use expect::{cond_expect_polytope, cond_expect_vector, conditional_process};
pub use randomization::{randomization_identity, RandomizationReport};
pub use space::{NodeId, ScenarioTree, TreeFile, TreePolytopeProcess, TreeVectorRV};
