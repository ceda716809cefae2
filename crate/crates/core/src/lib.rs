//! Almost-cap-set toolkit over prime fields.
//!
//! The crate is organized around the pipeline that turns a finite point set
//! `A ⊂ F_q^n` into verifiable combinatorial data:
//!
//! * [`field`] — prime-field arithmetic tables, point encoding, set files.
//! * [`profile`] — solution-pair degree profiles, heavy/light partitions,
//!   cap-set and (ε,δ)-cap classification.
//! * [`tensor`] — the sparse solution tensor, exact slice rank on tiny
//!   instances, diagonal lower-bound certificates, and the explicit
//!   Croot-Lev-Pach slice decomposition over the full space.
//! * [`hypergraph`] — support hypergraphs and the Caro-Wei random-permutation
//!   greedy for independent sets.
//! * [`bounds`] — exact monomial counts, finite-n rates, the asymptotic
//!   constant `b_q`, and the admissible ε-budget.
//! * [`chain`] — the multi-variable distinct-solution chain solver with a
//!   brute-force oracle.
//! * [`search`] — exact maximum-cap search and seeded instance generators.

pub mod bounds;
pub mod chain;
pub mod field;
pub mod hypergraph;
pub mod profile;
pub mod search;
pub mod tensor;

mod error;

pub use error::Error;

pub use bounds::{asymptotic_bq, epsilon_budget, finite_rate, monomial_count, BoundsReport, EpsilonBudget};
pub use chain::{brute_force_solutions, find_distinct_solution, prefix_rearrange, verify_solution, ChainOutcome, CoeffVector, NotFoundReason};
pub use field::{decode, encode, parse_set, serialize_set, vec_combine, FieldCtx, Point, PointSet};
pub use hypergraph::{caro_wei_bound, caro_wei_greedy, support_hypergraph, MixedHypergraph};
pub use profile::{classify_eps_delta, degree_profile, heavy_set, heavy_threshold, is_cap_set, light_set, Classification, CoeffTriple, DegreeProfile};
pub use search::{max_cap_exact, planted_light_set, random_subset, CapSearchResult, PlantedSet, SearchConfig, SearchMode};
pub use tensor::{ap_tensor, clp_decomposition, random_sparse_tensor, diagonal_rank_certificate, independent_set_check, slice_rank_exact_small, Slice, SliceDecomposition, SparseTensor};

pub type Result<T> = std::result::Result<T, Error>;
