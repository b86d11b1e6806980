//! Matrix semantics: morphisms as incidence matrices over ℕ, and the
//! encoder's generators `M1`, `M2` with the products built from them.

mod encoder;
mod matrix;

pub use encoder::{
    functoriality_suite, k_ns, m_ns, matrices_of_encoder, mprod, word_matrix, word_matrix_from,
};
pub use matrix::SparseMatrix;
