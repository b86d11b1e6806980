//! Linear equations over morphism and matrix monoids as a Diophantine
//! encoding.
//!
//! Given a pair of polynomials `(p, q)` with nonnegative integer
//! coefficients, the crate builds two upper-triangular free-monoid
//! endomorphisms `g1`, `g2` (and their incidence matrices `M1`, `M2`) such
//! that, for positive `n` and `s`,
//!
//! ```text
//!   ∃ n3..nt : p(n, s, n3..nt) = q(n, s, n3..nt)
//!     ⇔ ∃ h ∈ ⟨g1, g2⟩ : g2² Prod(n,s) h = g2³ Prod(n,s) h ≠ o
//!     ⇔ ∃ N ∈ ⟨M1, M2⟩ : K(n,s) N = M(n,s) N ≠ O
//! ```
//!
//! The pipeline is staged like a compiler:
//!
//! 1. [`poly`]: exact polynomial arithmetic and the injective tupling
//!    polynomial used to synchronise witnesses.
//! 2. [`mtriple`]: polynomials are compiled into M-triples, leveled
//!    alphabets with two morphisms whose alternating iteration produces
//!    `e^{p(n1..nt)}`.
//! 3. [`encode`]: two M-triples (for `p1 = C(x, p)` and `q1 = C(x, q)`) are
//!    glued with four control letters into the encoder `(D, g1, g2)`.
//! 4. [`matsem`]: the encoder's image under the matrix functor.
//! 5. [`solve`]: bounded shortlex search for nonannihilating solutions of
//!    `ax = bx` and `ax = by`, next to a brute-force Diophantine oracle.
//!
//! Membership in these equation classes is undecidable in general; every
//! search here is bounded and reports "none within the bound", never "no
//! solution".

pub mod cli;
pub mod encode;
pub mod error;
pub mod format;
pub mod lang;
pub mod matsem;
pub mod morph;
pub mod mtriple;
pub mod poly;
pub mod solve;

pub use error::{Error, Result};

/// Resource limits shared by every stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of runs in any materialized word.
    pub expansion_cap: usize,
    /// Maximum number of letters in any constructed alphabet.
    pub alphabet_budget: usize,
}

impl Limits {
    pub const DEFAULT_EXPANSION_CAP: usize = 1_000_000;
    pub const DEFAULT_ALPHABET_BUDGET: usize = 32_768;

    pub fn with_expansion_cap(mut self, cap: usize) -> Self {
        self.expansion_cap = cap;
        self
    }

    pub fn with_alphabet_budget(mut self, budget: usize) -> Self {
        self.alphabet_budget = budget;
        self
    }
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            expansion_cap: Self::DEFAULT_EXPANSION_CAP,
            alphabet_budget: Self::DEFAULT_ALPHABET_BUDGET,
        }
    }
}
