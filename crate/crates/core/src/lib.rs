//! The MAKE semidirect-product key exchange over matrices with entries in
//! `Z_p` or a group ring `Z_p[G]`, and the linear-algebra attack that
//! recovers the shared key from public data.
//!
//! Everything is generic over a context-carrying [`Ring`]; the aliases below
//! name the concrete instances used by the protocol and the attack.

pub mod attack;
pub mod embedding;
pub mod error;
pub mod field;
pub mod group;
pub mod group_ring;
pub mod linalg;
pub mod matrix;
pub mod poly;
pub mod protocol;
pub mod ring;
pub mod selftest;

pub use attack::{run_attack, telescope, AttackInput, AttackResult, StageTimings};
pub use embedding::{unvec, vec, EmbeddingContext, GroupRingEmbedding, LOperator, RingEmbedding};
pub use error::{Error, Result};
pub use field::{is_prime, FieldElement, PrimeField, PrimeModulus};
pub use group::{group_from_generators, FiniteGroupTable, GroupSpec, Permutation, PermutationGroup};
pub use group_ring::{GroupRing, GroupRingElement, RegularRep};
pub use linalg::{kernel_basis, rank, solve_linear};
pub use matrix::{Matrix, Vector};
pub use poly::{char_poly, poly_pow_mod, Polynomial};
pub use protocol::{
    derive_key, gen_params, run_exchange, semidirect_pow, PrivateExponent, PublicParams, SemidirectPair, Transcript,
};
pub use ring::{CommutativeRing, Field, Ring};

pub type FieldMatrix = Matrix<PrimeField>;
pub type FieldVector = Vector<PrimeField>;
pub type FieldPolynomial = Polynomial<PrimeField>;
pub type GroupRingMatrix = Matrix<GroupRing>;
pub type GroupRingParams = PublicParams<GroupRing>;
pub type GroupRingTranscript = Transcript<GroupRing>;
