//! Constructive embedding of bounded-degree graphs into blown-up hosts made of
//! super-regular pairs.
//!
//! Given a cluster graph `R`, a host `G` on clusters `V_1..V_r` of size `N`
//! whose pairs along the edges of `R` are super-regular, and a pattern `H`
//! with `Δ(H) ≤ Δ` and a homomorphism `ψ: H → R`, [`embedder::embed`] builds
//! an injective edge-preserving map `φ: V(H) → V(G)` with `φ(x) ∈ V_{ψ(x)}`
//! and checks it with [`embedder::verify_embedding`].
//!
//! The embedding runs in two phases: a greedy phase that places vertices one at
//! a time while tracking shrinking candidate sets and reserving a set of
//! well-separated buffer vertices, followed by a perfect-matching phase that
//! places the buffers.

pub mod embedder;
pub mod error;
pub mod generators;
pub mod graph;
pub mod matching;
pub mod rational;
pub mod regularity;

pub use error::{Error, Result};
pub use graph::{BipartitePair, BitSet, ClusterGraph, Density, PartitionedHost, Pattern, SimpleGraph};
pub use rational::Rational;
