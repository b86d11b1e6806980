//! Encoding a Diophantine pair `(p, q)` into two morphisms `g1`, `g2` over
//! one alphabet `D`.
//!
//! `p1 = C(x1..xt, p)` and `q1 = C(x1..xt, q)` are compiled into M-triples
//! over disjoint alphabets (prefixes `A:` and `B:`), summed, and extended by
//! four control letters `c0 < c1 < c2 < c3` that steer a word into the `A`
//! side or the `B` side:
//!
//! ```text
//! c0·g1 = c1·g1 = ε   c2·g1 = u·f1   c3·g1 = v·f1   d·g1 = d·f1
//! c0·g2 = c1   c1·g2 = c2   c2·g2 = c3·g2 = c3      d·g2 = d·f2
//! ```
//!
//! Writing `Prod(n1..na) = g1^n1 g2 ⋯ g1^na g2`, the letter `c0` is sent by
//! `g2² Prod(n1..nt)` to `e^p1(n)` and by `g2³ Prod(n1..nt)` to `e^q1(n)`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lang::{Letter, LeveledAlphabet, ParikhVector, Word};
use crate::matsem::{self, SparseMatrix};
use crate::morph::Morphism;
use crate::mtriple::{
    compile_polynomial, compiled_alphabet_size, direct_sum, validate_mtriple, ComputableMap,
    Condition, MTriple, Route, ValidationReport,
};
use crate::poly::{injective_tupling, Polynomial};
use crate::Limits;

/// A product of the generators, written as a sequence over `{1, 2}`
/// (`1` for `g1`, `2` for `g2`). The empty word is the identity.
///
/// Ordering is shortlex: shorter words first, then lexicographic with
/// `1 < 2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct GeneratorWord(Vec<u8>);

impl TryFrom<Vec<u8>> for GeneratorWord {
    type Error = Error;

    fn try_from(symbols: Vec<u8>) -> Result<Self> {
        GeneratorWord::new(symbols)
    }
}

impl From<GeneratorWord> for Vec<u8> {
    fn from(w: GeneratorWord) -> Self {
        w.0
    }
}

impl PartialOrd for GeneratorWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GeneratorWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl GeneratorWord {
    pub fn new(symbols: Vec<u8>) -> Result<Self> {
        if let Some(bad) = symbols.iter().find(|&&g| g != 1 && g != 2) {
            return Err(Error::invalid(format!(
                "generator symbol {bad} is not 1 or 2"
            )));
        }
        Ok(GeneratorWord(symbols))
    }

    pub fn identity() -> Self {
        GeneratorWord(Vec::new())
    }

    /// `Prod(n1..na) = g1^n1 g2 ⋯ g1^na g2`.
    pub fn prod(ns: &[u64]) -> Result<Self> {
        if ns.contains(&0) {
            return Err(Error::invalid("Prod arguments must be positive"));
        }
        let mut out = Vec::new();
        for &n in ns {
            let n = usize::try_from(n).map_err(|_| Error::invalid("Prod argument too large"))?;
            out.extend(std::iter::repeat_n(1, n));
            out.push(2);
        }
        Ok(GeneratorWord(out))
    }

    /// `g2^k` followed by `Prod(ns)`.
    pub fn lead_prod(k: usize, ns: &[u64]) -> Result<Self> {
        let mut out = vec![2; k];
        out.extend(GeneratorWord::prod(ns)?.0);
        Ok(GeneratorWord(out))
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn then(&self, g: u8) -> Self {
        let mut out = self.0.clone();
        out.push(g);
        GeneratorWord(out)
    }

    pub fn concat(&self, other: &GeneratorWord) -> Self {
        let mut out = self.0.clone();
        out.extend_from_slice(&other.0);
        GeneratorWord(out)
    }

    /// Reads the word as `Prod(n1..na)`; `None` if it does not have that
    /// shape. The identity reads as the empty tuple.
    pub fn prod_structure(&self) -> Option<Vec<u64>> {
        let mut ns = Vec::new();
        let mut run = 0u64;
        for &g in &self.0 {
            if g == 1 {
                run += 1;
            } else if run == 0 {
                return None;
            } else {
                ns.push(run);
                run = 0;
            }
        }
        (run == 0).then_some(ns)
    }

    /// All words of length at most `max_len` in shortlex order.
    pub fn all_up_to(max_len: usize) -> impl Iterator<Item = GeneratorWord> {
        (0..=max_len).flat_map(|len| {
            (0u64..1u64 << len).map(move |bits| {
                GeneratorWord(
                    (0..len)
                        .map(|i| if bits >> (len - 1 - i) & 1 == 1 { 2 } else { 1 })
                        .collect(),
                )
            })
        })
    }

    /// Accepts `[1,1,2]`, `1 1 2` or `112`; `[]` and the empty string are
    /// the identity.
    pub fn parse(text: &str) -> Result<Self> {
        let symbols = text
            .chars()
            .filter(|c| !matches!(c, '[' | ']' | ',' | ' '))
            .map(|c| match c {
                '1' => Ok(1),
                '2' => Ok(2),
                other => Err(Error::Parse(format!(
                    "unexpected `{other}` in generator word"
                ))),
            })
            .collect::<Result<Vec<u8>>>()?;
        GeneratorWord::new(symbols)
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u8::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// A composed morphism, or only its matrix when the composition would
/// exceed the expansion cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismHandle {
    Explicit(Morphism),
    MatrixBacked(SparseMatrix),
}

impl MorphismHandle {
    pub fn is_matrix_backed(&self) -> bool {
        matches!(self, MorphismHandle::MatrixBacked(_))
    }

    pub fn as_morphism(&self) -> Option<&Morphism> {
        match self {
            MorphismHandle::Explicit(m) => Some(m),
            MorphismHandle::MatrixBacked(_) => None,
        }
    }

    pub fn matrix(&self) -> Result<SparseMatrix> {
        match self {
            MorphismHandle::Explicit(m) => m.matrix_of(),
            MorphismHandle::MatrixBacked(m) => Ok(m.clone()),
        }
    }

    /// Exact in both representations: a morphism is `o` iff its matrix is
    /// zero.
    pub fn is_zero(&self) -> bool {
        match self {
            MorphismHandle::Explicit(m) => m.is_zero(),
            MorphismHandle::MatrixBacked(m) => m.is_zero(),
        }
    }
}

/// Where a letter of `D` comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LetterRole {
    /// `c0..c3`.
    Control(u8),
    /// A letter of the `p1` side, with its level.
    A(usize),
    /// A letter of the `q1` side, with its level.
    B(usize),
    /// The shared last letter `e`.
    Last,
}

/// The image of one letter under a generator word, as a word while it
/// stays under the cap and as a Parikh vector afterwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LetterImage {
    Word(Word),
    Parikh(ParikhVector),
}

impl LetterImage {
    pub fn is_word_level(&self) -> bool {
        matches!(self, LetterImage::Word(_))
    }

    pub fn is_empty(&self) -> bool {
        match self {
            LetterImage::Word(w) => w.is_empty(),
            LetterImage::Parikh(v) => v.is_empty(),
        }
    }

    pub fn support(&self) -> BTreeSet<Letter> {
        match self {
            LetterImage::Word(w) => w.support(),
            LetterImage::Parikh(v) => v.support(),
        }
    }

    pub fn parikh(&self) -> ParikhVector {
        match self {
            LetterImage::Word(w) => w.parikh(),
            LetterImage::Parikh(v) => v.clone(),
        }
    }

    /// `Some(k)` iff the image is `letter^k` (including `k = 0`).
    pub fn power_of(&self, letter: Letter) -> Option<BigUint> {
        let v = self.parikh();
        let only = v.iter().all(|(l, _)| l == letter);
        only.then(|| v.get(letter))
    }

    /// Applies one more morphism, dropping to Parikh vectors at the cap.
    pub fn step(self, g: &Morphism, cap: usize) -> Result<LetterImage> {
        match self {
            LetterImage::Word(w) => match g.apply(&w, cap) {
                Ok(next) => Ok(LetterImage::Word(next)),
                Err(Error::ExpansionCap { .. }) => {
                    Ok(LetterImage::Parikh(g.parikh_image(&w.parikh())))
                }
                Err(e) => Err(e),
            },
            LetterImage::Parikh(v) => Ok(LetterImage::Parikh(g.parikh_image(&v))),
        }
    }
}

/// The encoder `(D, g1, g2)` with its witnesses and source polynomials.
#[derive(Clone, Debug)]
pub struct Encoder {
    alphabet: Arc<LeveledAlphabet>,
    g1: Morphism,
    g2: Morphism,
    u: Word,
    v: Word,
    t: usize,
    p: Polynomial,
    q: Polynomial,
    p1: Polynomial,
    q1: Polynomial,
    matrices: OnceLock<(SparseMatrix, SparseMatrix)>,
}

impl PartialEq for Encoder {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.g1 == other.g1
            && self.g2 == other.g2
            && self.u == other.u
            && self.v == other.v
            && self.t == other.t
            && self.p == other.p
            && self.q == other.q
            && self.p1 == other.p1
            && self.q1 == other.q1
    }
}

impl Eq for Encoder {}

pub const CONTROL_NAMES: [&str; 4] = ["c0", "c1", "c2", "c3"];

/// Configures [`Encoder`] construction.
#[derive(Clone, Debug)]
pub struct EncoderBuilder {
    p: Polynomial,
    q: Polynomial,
    tupling: Option<Polynomial>,
    limits: Limits,
}

impl EncoderBuilder {
    pub fn new(p: Polynomial, q: Polynomial) -> Self {
        EncoderBuilder {
            p,
            q,
            tupling: None,
            limits: Limits::default(),
        }
    }

    /// Replaces the default nested pairing polynomial. It must have arity
    /// `t + 1` and be injective on positive tuples; injectivity is the
    /// caller's responsibility.
    pub fn tupling(mut self, c: Polynomial) -> Self {
        self.tupling = Some(c);
        self
    }

    pub fn limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn build(self) -> Result<Encoder> {
        let EncoderBuilder {
            p,
            q,
            tupling,
            limits,
        } = self;
        let t = p.arity();
        if q.arity() != t {
            return Err(Error::ArityMismatch {
                expected: t,
                found: q.arity(),
            });
        }
        if t < 2 {
            return Err(Error::invalid(format!(
                "encoding needs arity t >= 2 (got {t}) so that n and s fit"
            )));
        }
        if p.is_zero() || q.is_zero() {
            return Err(Error::invalid("p and q must be nonzero"));
        }
        let c = match tupling {
            Some(c) => c,
            None => injective_tupling(t + 1)?,
        };
        if c.arity() != t + 1 {
            return Err(Error::ArityMismatch {
                expected: t + 1,
                found: c.arity(),
            });
        }
        let with = |last: &Polynomial| -> Result<Polynomial> {
            let mut args = (0..t)
                .map(|i| Polynomial::variable(t, i))
                .collect::<Result<Vec<_>>>()?;
            args.push(last.clone());
            c.compose(&args)
        };
        let p1 = with(&p)?;
        let q1 = with(&q)?;

        // c0..c3, both compiled alphabets without their last letters, e
        let needed = 4 + compiled_alphabet_size(&p1) - 1 + compiled_alphabet_size(&q1) - 1 + 1;
        if needed > limits.alphabet_budget as u128 {
            return Err(Error::AlphabetBudget {
                needed,
                budget: limits.alphabet_budget,
            });
        }
        let f_a = compile_polynomial(&p1, &limits)?;
        let f_b = compile_polynomial(&q1, &limits)?;
        let merged = direct_sum(&[("A", &f_a), ("B", &f_b)], &limits)?;
        let bar = merged.mtriple.alphabet();

        let mut names: Vec<String> = CONTROL_NAMES.iter().map(|s| s.to_string()).collect();
        names.extend(bar.names().iter().cloned());
        let mut sizes = bar.level_sizes();
        sizes[0] += 4;
        let alphabet = Arc::new(LeveledAlphabet::new(names, &sizes)?);
        let shift = |w: &Word| w.relabel(&alphabet, |l| Letter::new(l.index() + 4));

        let u = shift(&merged.witnesses[0]);
        let v = shift(&merged.witnesses[1]);
        let eps = Word::empty(alphabet.clone());
        let letter = |i: usize| Word::letter(alphabet.clone(), Letter::new(i));

        let mut f1_images = vec![eps.clone(); 4];
        f1_images.extend(merged.mtriple.g1().images().iter().map(shift));
        let f1 = Morphism::new(alphabet.clone(), alphabet.clone(), f1_images)?;
        let u_f1 = f1.apply(&u, limits.expansion_cap)?;
        let v_f1 = f1.apply(&v, limits.expansion_cap)?;

        let mut g1_images = vec![eps.clone(), eps, u_f1, v_f1];
        g1_images.extend(f1.images()[4..].iter().cloned());
        let mut g2_images = vec![letter(1), letter(2), letter(3), letter(3)];
        g2_images.extend(merged.mtriple.g2().images().iter().map(shift));

        let g1 = Morphism::new(alphabet.clone(), alphabet.clone(), g1_images)?;
        let g2 = Morphism::new(alphabet.clone(), alphabet.clone(), g2_images)?;
        Encoder::from_parts(alphabet, g1, g2, u, v, t, [p, q, p1, q1])
    }
}

/// Builds the encoder for `(p, q)` with the default tupling polynomial.
pub fn build_encoder(p: &Polynomial, q: &Polynomial, limits: &Limits) -> Result<Encoder> {
    EncoderBuilder::new(p.clone(), q.clone())
        .limits(*limits)
        .build()
}

impl Encoder {
    /// Assembles an encoder from its parts, checking the structural
    /// invariants of the control letters, the sides and the witnesses.
    pub fn from_parts(
        alphabet: Arc<LeveledAlphabet>,
        g1: Morphism,
        g2: Morphism,
        u: Word,
        v: Word,
        t: usize,
        [p, q, p1, q1]: [Polynomial; 4],
    ) -> Result<Encoder> {
        let bad = |msg: String| Err(Error::invalid(format!("malformed encoder: {msg}")));
        if t < 2 {
            return bad(format!("dimension {t} < 2"));
        }
        for poly in [&p, &q, &p1, &q1] {
            if poly.arity() != t {
                return Err(Error::ArityMismatch {
                    expected: t,
                    found: poly.arity(),
                });
            }
        }
        if alphabet.level_count() != t + 1 || alphabet.len() < 6 {
            return bad(format!("alphabet must have {} levels", t + 1));
        }
        for (i, name) in CONTROL_NAMES.iter().enumerate() {
            if alphabet.name(Letter::new(i)) != *name {
                return bad(format!("letter {i} must be `{name}`"));
            }
        }
        if alphabet.name(alphabet.last()) != "e" || alphabet.level_range(t + 1).len() != 1 {
            return bad("the last level must be exactly `e`".into());
        }
        for (g, name) in [(&g1, "g1"), (&g2, "g2")] {
            if !crate::lang::same_alphabet(g.domain(), &alphabet)
                || !crate::lang::same_alphabet(g.codomain(), &alphabet)
            {
                return bad(format!("{name} is not over the encoder alphabet"));
            }
            if !g.is_upper_triangular() {
                return bad(format!("{name} is not upper triangular"));
            }
        }
        let c = |i: usize| Letter::new(i);
        let single = |i: usize| Word::letter(alphabet.clone(), c(i));
        if !g1.image(c(0)).is_empty() || !g1.image(c(1)).is_empty() {
            return bad("c0·g1 and c1·g1 must be ε".into());
        }
        let expected_g2 = [single(1), single(2), single(3), single(3)];
        for (i, w) in expected_g2.iter().enumerate() {
            if g2.image(c(i)) != w {
                return bad(format!("c{i}·g2 must be {w}"));
            }
        }
        let e = alphabet.last();
        if !g1.image(e).is_empty() || !g2.image(e).is_empty() {
            return bad("e·g1 and e·g2 must be ε".into());
        }
        let enc = Encoder {
            alphabet,
            g1,
            g2,
            u,
            v,
            t,
            p,
            q,
            p1,
            q1,
            matrices: OnceLock::new(),
        };
        for l in enc.alphabet.letters().skip(4) {
            if l != e && !matches!(enc.role(l), LetterRole::A(_) | LetterRole::B(_)) {
                return bad(format!(
                    "letter `{}` lacks an A: or B: prefix",
                    enc.alphabet.name(l)
                ));
            }
        }
        for (w, side, name) in [(&enc.u, 'A', "u"), (&enc.v, 'B', "v")] {
            let ok = w.runs().iter().all(|(l, _)| match enc.role(*l) {
                LetterRole::A(1) => side == 'A',
                LetterRole::B(1) => side == 'B',
                _ => false,
            });
            if !ok || w.is_empty() {
                return bad(format!(
                    "{name} must be a nonempty word over level 1 of side {side}"
                ));
            }
        }
        Ok(enc)
    }

    pub fn alphabet(&self) -> &Arc<LeveledAlphabet> {
        &self.alphabet
    }

    pub fn g1(&self) -> &Morphism {
        &self.g1
    }

    pub fn g2(&self) -> &Morphism {
        &self.g2
    }

    /// `g1` for symbol 1, `g2` for symbol 2.
    pub fn generator(&self, g: u8) -> &Morphism {
        if g == 1 {
            &self.g1
        } else {
            &self.g2
        }
    }

    pub fn u(&self) -> &Word {
        &self.u
    }

    pub fn v(&self) -> &Word {
        &self.v
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn p(&self) -> &Polynomial {
        &self.p
    }

    pub fn q(&self) -> &Polynomial {
        &self.q
    }

    pub fn p1(&self) -> &Polynomial {
        &self.p1
    }

    pub fn q1(&self) -> &Polynomial {
        &self.q1
    }

    pub fn control(&self, i: usize) -> Letter {
        assert!(i < 4, "control letters are c0..c3");
        Letter::new(i)
    }

    pub fn e(&self) -> Letter {
        self.alphabet.last()
    }

    pub fn role(&self, l: Letter) -> LetterRole {
        if l.index() < 4 {
            return LetterRole::Control(l.index() as u8);
        }
        if l == self.e() {
            return LetterRole::Last;
        }
        let level = self.alphabet.level_of(l);
        let name = self.alphabet.name(l);
        if name.starts_with("A:") {
            LetterRole::A(level)
        } else if name.starts_with("B:") {
            LetterRole::B(level)
        } else {
            LetterRole::Last
        }
    }

    /// `(M1, M2)`, computed once.
    pub fn matrices(&self) -> &(SparseMatrix, SparseMatrix) {
        self.matrices.get_or_init(|| {
            (
                self.g1.matrix_of().expect("endomorphism"),
                self.g2.matrix_of().expect("endomorphism"),
            )
        })
    }

    /// The explicit composition of `w`, multiplied from the right so that
    /// the erasing steps of `g2` keep intermediate images small.
    pub fn compose_word(&self, w: &GeneratorWord, cap: usize) -> Result<Morphism> {
        let mut acc = Morphism::identity(self.alphabet.clone());
        for &g in w.symbols().iter().rev() {
            acc = self.generator(g).compose(&acc, cap)?;
        }
        Ok(acc)
    }

    /// [`Encoder::compose_word`], or the matrix product when the
    /// composition exceeds the cap.
    pub fn evaluate(&self, w: &GeneratorWord, cap: usize) -> Result<MorphismHandle> {
        match self.compose_word(w, cap) {
            Ok(m) => Ok(MorphismHandle::Explicit(m)),
            Err(Error::ExpansionCap { .. }) => {
                Ok(MorphismHandle::MatrixBacked(matsem::word_matrix(self, w)))
            }
            Err(e) => Err(e),
        }
    }

    pub fn prod(&self, ns: &[u64], cap: usize) -> Result<MorphismHandle> {
        if ns.is_empty() {
            return Err(Error::invalid("Prod needs at least one argument"));
        }
        self.evaluate(&GeneratorWord::prod(ns)?, cap)
    }

    /// Generator word of `f_ns = g2² Prod(n, s)`.
    pub fn f_ns_word(n: u64, s: u64) -> Result<GeneratorWord> {
        GeneratorWord::lead_prod(2, &[n, s])
    }

    /// Generator word of `g_ns = g2³ Prod(n, s)`.
    pub fn g_ns_word(n: u64, s: u64) -> Result<GeneratorWord> {
        GeneratorWord::lead_prod(3, &[n, s])
    }

    pub fn f_ns(&self, n: u64, s: u64, cap: usize) -> Result<MorphismHandle> {
        self.evaluate(&Encoder::f_ns_word(n, s)?, cap)
    }

    pub fn g_ns(&self, n: u64, s: u64, cap: usize) -> Result<MorphismHandle> {
        self.evaluate(&Encoder::g_ns_word(n, s)?, cap)
    }

    /// `letter · w`, applied left to right.
    pub fn trace_letter(
        &self,
        letter: Letter,
        w: &GeneratorWord,
        cap: usize,
    ) -> Result<LetterImage> {
        let mut image = LetterImage::Word(Word::letter(self.alphabet.clone(), letter));
        for &g in w.symbols() {
            image = image.step(self.generator(g), cap)?;
        }
        Ok(image)
    }

    /// Letters reachable from `start` under `w`, by support propagation.
    pub fn support_after(&self, start: &BTreeSet<Letter>, w: &GeneratorWord) -> BTreeSet<Letter> {
        let n = self.alphabet.len();
        let mut current = vec![false; n];
        for l in start {
            current[l.index()] = true;
        }
        for &g in w.symbols() {
            let g = self.generator(g);
            let mut next = vec![false; n];
            for (i, _) in current.iter().enumerate().filter(|(_, on)| **on) {
                for (m, _) in g.image(Letter::new(i)).runs() {
                    next[m.index()] = true;
                }
            }
            current = next;
        }
        current
            .iter()
            .enumerate()
            .filter(|(_, on)| **on)
            .map(|(i, _)| Letter::new(i))
            .collect()
    }

    /// Per-level sizes of the `A` and `B` sides.
    pub fn side_sizes(&self) -> (Vec<usize>, Vec<usize>) {
        let mut a = vec![0; self.t];
        let mut b = vec![0; self.t];
        for l in self.alphabet.letters() {
            match self.role(l) {
                LetterRole::A(level) => a[level - 1] += 1,
                LetterRole::B(level) => b[level - 1] += 1,
                _ => {}
            }
        }
        (a, b)
    }
}

/// Tally of one claim inside a suite.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimTally {
    pub claim: String,
    pub checked: usize,
    pub failed: usize,
}

/// Outcome of an exhaustive check suite. `word_level` and `fallback`
/// count the evaluations done on explicit words and on Parikh vectors or
/// supports respectively.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub claims: Vec<ClaimTally>,
    pub failures: Vec<String>,
    pub word_level: usize,
    pub fallback: usize,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub(crate) fn new(suite: &str, claims: &[&str]) -> Self {
        SuiteReport {
            suite: suite.into(),
            claims: claims
                .iter()
                .map(|c| ClaimTally {
                    claim: c.to_string(),
                    ..ClaimTally::default()
                })
                .collect(),
            ..SuiteReport::default()
        }
    }

    pub(crate) fn record(&mut self, claim: usize, ok: bool, describe: impl FnOnce() -> String) {
        self.claims[claim].checked += 1;
        if !ok {
            self.claims[claim].failed += 1;
            if self.failures.len() < 64 {
                self.failures.push(describe());
            }
        }
    }

    pub(crate) fn route(&mut self, word_level: bool) {
        if word_level {
            self.word_level += 1;
        } else {
            self.fallback += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.failed == 0)
    }

    pub fn checked(&self) -> usize {
        self.claims.iter().map(|c| c.checked).sum()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "suite {}: {}",
            self.suite,
            if self.passed() { "pass" } else { "FAIL" }
        )?;
        for c in &self.claims {
            writeln!(
                f,
                "  {:<40} {:>6} checked {:>4} failed",
                c.claim, c.checked, c.failed
            )?;
        }
        writeln!(
            f,
            "  evaluations: {} word level, {} by Parikh vectors or supports",
            self.word_level, self.fallback
        )?;
        for line in &self.notes {
            writeln!(f, "  note: {line}")?;
        }
        for line in &self.failures {
            writeln!(f, "  failure: {line}")?;
        }
        Ok(())
    }
}

fn tuples(len: usize, max: u64) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=max).map(move |n| {
                    let mut next = prefix.clone();
                    next.push(n);
                    next
                })
            })
            .collect();
    }
    out
}

/// Exhaustive check of the four claims about `c0 g2^k Prod(n1..na) g1^j`
/// for `k ∈ {2, 3}`, all `a ≤ t`, `ni ≤ n_max` and `j ≤ j_max`:
///
/// * (i) for `a < t` the image lies in level `a + 1` of side A (`k = 2`)
///   or side B (`k = 3`);
/// * (ii) for `a = t` (and `j = 0`) the image is `e^p1(n)` or `e^q1(n)`,
///   compared with direct polynomial evaluation;
/// * (iii) for `a = t` and `j ≥ 1` the whole morphism is `o`;
/// * (iv) for `a ≤ t` (and `j = 0`) the image is nonempty.
pub fn lemma5_suite(enc: &Encoder, n_max: u64, j_max: u64, cap: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(
        "lemma5",
        &[
            "(i) level containment, a < t",
            "(ii) e-power equals p1 / q1, a = t",
            "(iii) composition is o, a = t, j >= 1",
            "(iv) c0 image nonempty, a <= t",
        ],
    );
    let t = enc.t();
    let e = enc.e();
    let c0 = enc.control(0);
    for alpha in 1..=t {
        for ns in tuples(alpha, n_max) {
            for lead in [2usize, 3] {
                let side_a = lead == 2;
                let base = GeneratorWord::lead_prod(lead, &ns)?;
                let image = enc.trace_letter(c0, &base, cap)?;
                report.route(image.is_word_level());
                report.record(3, !image.is_empty(), || {
                    format!("c0 g2^{lead} Prod{ns:?} is empty")
                });
                if alpha < t {
                    let mut img = image;
                    for j in 0..=j_max {
                        if j > 0 {
                            img = img.step(enc.g1(), cap)?;
                            report.route(img.is_word_level());
                        }
                        let stray = img.support().into_iter().find(|&l| {
                            let want = if side_a {
                                LetterRole::A(alpha + 1)
                            } else {
                                LetterRole::B(alpha + 1)
                            };
                            enc.role(l) != want
                        });
                        report.record(0, stray.is_none(), || {
                            format!(
                                "c0 g2^{lead} Prod{ns:?} g1^{j} contains `{}`",
                                enc.alphabet().name(stray.unwrap())
                            )
                        });
                    }
                } else {
                    let poly = if side_a { enc.p1() } else { enc.q1() };
                    let expected = poly.eval_u64(&ns)?;
                    let got = image.power_of(e);
                    report.record(1, got.as_ref() == Some(&expected), || {
                        format!(
                            "c0 g2^{lead} Prod{ns:?}: expected e^{expected}, got {}",
                            got.map_or("a non-e word".to_string(), |k| format!("e^{k}"))
                        )
                    });
                    for j in 1..=j_max {
                        let w = base.concat(&GeneratorWord(vec![1; j as usize]));
                        let mut nonzero = None;
                        for l in enc.alphabet().letters() {
                            let img = enc.trace_letter(l, &w, cap)?;
                            report.route(img.is_word_level());
                            if !img.is_empty() {
                                nonzero = Some(l);
                                break;
                            }
                        }
                        report.record(2, nonzero.is_none(), || {
                            format!(
                                "g2^{lead} Prod{ns:?} g1^{j} maps `{}` to a nonempty word",
                                enc.alphabet().name(nonzero.unwrap())
                            )
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Checks `g1 h1 g2² h2 = o` for all generator words `|h1|, |h2| ≤ max_len`.
/// Each product is composed explicitly when it fits under the cap and
/// decided by support propagation from every letter otherwise.
pub fn lemma6_suite(enc: &Encoder, max_len: usize, cap: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("lemma6", &["g1 h1 g2^2 h2 = o"]);
    let all: BTreeSet<Letter> = enc.alphabet().letters().collect();
    let words: Vec<GeneratorWord> = GeneratorWord::all_up_to(max_len).collect();
    for h1 in &words {
        for h2 in &words {
            let w = GeneratorWord(vec![1])
                .concat(h1)
                .concat(&GeneratorWord(vec![2, 2]))
                .concat(h2);
            let zero = match enc.compose_word(&w, cap) {
                Ok(m) => {
                    report.route(true);
                    m.is_zero()
                }
                Err(Error::ExpansionCap { .. }) => {
                    report.route(false);
                    enc.support_after(&all, &w).is_empty()
                }
                Err(e) => return Err(e),
            };
            report.record(0, zero, || format!("g1 {h1} g2^2 {h2} is not o"));
        }
    }
    Ok(report)
}

impl Encoder {
    /// The `A` side (`side_a`) or `B` side as a stand-alone M-triple with
    /// witness `u` or `v`: its letters, the shared `e`, and `g1`, `g2`
    /// restricted to them.
    pub fn side_map(&self, side_a: bool) -> Result<ComputableMap> {
        let in_side = |l: Letter| match self.role(l) {
            LetterRole::A(_) => side_a,
            LetterRole::B(_) => !side_a,
            LetterRole::Last => true,
            LetterRole::Control(_) => false,
        };
        let letters: Vec<Letter> = self.alphabet.letters().filter(|&l| in_side(l)).collect();
        let mut index = vec![None; self.alphabet.len()];
        for (i, l) in letters.iter().enumerate() {
            index[l.index()] = Some(i);
        }
        let mut sizes = vec![0usize; self.t + 1];
        for &l in &letters {
            sizes[self.alphabet.level_of(l) - 1] += 1;
        }
        let names = letters
            .iter()
            .map(|&l| self.alphabet.name(l).to_string())
            .collect();
        let side = Arc::new(LeveledAlphabet::new(names, &sizes)?);
        let restrict = |w: &Word| -> Result<Word> {
            if let Some((l, _)) = w.runs().iter().find(|(l, _)| index[l.index()].is_none()) {
                return Err(Error::invalid(format!(
                    "letter `{}` leaves its side",
                    self.alphabet.name(*l)
                )));
            }
            Ok(w.relabel(&side, |l| Letter::new(index[l.index()].expect("checked"))))
        };
        let images = |g: &Morphism| -> Result<Vec<Word>> {
            letters.iter().map(|&l| restrict(g.image(l))).collect()
        };
        let g1 = Morphism::new(side.clone(), side.clone(), images(&self.g1)?)?;
        let g2 = Morphism::new(side.clone(), side.clone(), images(&self.g2)?)?;
        let witness = restrict(if side_a { &self.u } else { &self.v })?;
        ComputableMap::new(MTriple::new(side, g1, g2, self.t)?, witness)
    }

    /// Validates `(D, g1, g2)` itself against the M-triple conditions.
    pub fn validate(&self) -> ValidationReport {
        validate_mtriple(&self.alphabet, &self.g1, &self.g2, self.t)
    }
}

/// Checks that both sides of the encoder are M-triples computing `p1` and
/// `q1` (at every point of `{1..n_max}^t`), and that `(D, g1, g2)` is not
/// one: `c2·g2² = c3` breaks the square-erasing condition.
pub fn definition_suite(enc: &Encoder, n_max: u64, cap: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(
        "definition",
        &[
            "A side is an M-triple",
            "B side is an M-triple",
            "A side computes p1",
            "B side computes q1",
            "(D, g1, g2) violates (iii)",
        ],
    );
    for (k, side_a) in [(0usize, true), (1, false)] {
        match enc.side_map(side_a) {
            Ok(map) => {
                report.record(k, true, String::new);
                let poly = if side_a { enc.p1() } else { enc.q1() };
                for point in tuples(enc.t(), n_max) {
                    let got = map.compute(&point, cap)?;
                    report.route(got.route == Route::Word);
                    let expected = poly.eval_u64(&point)?;
                    report.record(k + 2, got.value == expected, || {
                        format!(
                            "side {} at {point:?}: {} ≠ {expected}",
                            if side_a { "A" } else { "B" },
                            got.value
                        )
                    });
                }
            }
            Err(e) => report.record(k, false, || e.to_string()),
        }
    }
    let validation = enc.validate();
    let failed = validation.failed();
    report.record(4, failed.contains(&Condition::SquareErases), || {
        "(D, g1, g2) satisfies (iii)".into()
    });
    report.notes.push(format!(
        "(D, g1, g2) fails: {}",
        failed
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    ));
    for check in validation.checks.iter().filter(|c| !c.passed()) {
        for v in check.violations.iter().take(3) {
            report.notes.push(format!("{}: {v}", check.condition));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(arity: usize, text: &str) -> Polynomial {
        Polynomial::parse(arity, text).unwrap()
    }

    fn small() -> Encoder {
        // a small instance: p1, q1 have degree 4
        build_encoder(&poly(2, "x1 + x2"), &poly(2, "2*x2"), &Limits::default()).unwrap()
    }

    #[test]
    fn generator_words() {
        assert_eq!(GeneratorWord::prod(&[2]).unwrap().symbols(), &[1, 1, 2]);
        assert_eq!(
            GeneratorWord::prod(&[1, 2]).unwrap().symbols(),
            &[1, 2, 1, 1, 2]
        );
        assert_eq!(
            Encoder::f_ns_word(1, 1).unwrap().symbols(),
            &[2, 2, 1, 2, 1, 2]
        );
        assert_eq!(
            Encoder::g_ns_word(1, 1).unwrap().symbols(),
            &[2, 2, 2, 1, 2, 1, 2]
        );
        assert_eq!(
            GeneratorWord::parse("[1,1,2]").unwrap().to_string(),
            "[1,1,2]"
        );
        assert_eq!(
            GeneratorWord::parse("112").unwrap(),
            GeneratorWord::prod(&[2]).unwrap()
        );
        assert!(GeneratorWord::parse("13").is_err());
        assert_eq!(
            GeneratorWord::prod(&[3, 1]).unwrap().prod_structure(),
            Some(vec![3, 1])
        );
        assert_eq!(GeneratorWord::parse("121").unwrap().prod_structure(), None);
        assert_eq!(GeneratorWord::parse("2").unwrap().prod_structure(), None);
        assert_eq!(GeneratorWord::identity().prod_structure(), Some(vec![]));
    }

    #[test]
    fn shortlex_enumeration() {
        let all: Vec<String> = GeneratorWord::all_up_to(2).map(|w| w.to_string()).collect();
        assert_eq!(
            all,
            ["[]", "[1]", "[2]", "[1,1]", "[1,2]", "[2,1]", "[2,2]"]
        );
        let mut sorted: Vec<GeneratorWord> = GeneratorWord::all_up_to(4).collect();
        let original = sorted.clone();
        sorted.sort();
        assert_eq!(sorted, original);
        assert_eq!(GeneratorWord::all_up_to(5).count(), 63);
    }

    #[test]
    fn serde_shape() {
        let w = GeneratorWord::prod(&[2]).unwrap();
        assert_eq!(serde_json::to_string(&w).unwrap(), "[1,1,2]");
        let back: GeneratorWord = serde_json::from_str("[2,1]").unwrap();
        assert_eq!(back.symbols(), &[2, 1]);
        assert!(serde_json::from_str::<GeneratorWord>("[3]").is_err());
    }

    #[test]
    fn control_letter_table() {
        let enc = small();
        let a = enc.alphabet();
        let c = |i| enc.control(i);
        assert_eq!(enc.g2().image(c(0)).to_text(), "c1");
        assert_eq!(enc.g2().image(c(1)).to_text(), "c2");
        assert_eq!(enc.g2().image(c(2)).to_text(), "c3");
        assert_eq!(enc.g2().image(c(3)).to_text(), "c3");
        assert!(enc.g1().image(c(0)).is_empty());
        assert_eq!(
            enc.trace_letter(c(0), &GeneratorWord::parse("222").unwrap(), 100)
                .unwrap(),
            LetterImage::Word(Word::letter(a.clone(), c(3)))
        );
        assert!(enc.g1().is_upper_triangular());
        assert!(enc.g2().is_upper_triangular());
        assert_eq!(a.name(a.last()), "e");
    }

    #[test]
    fn g1_g2_squared_is_zero() {
        let enc = small();
        let m = enc
            .compose_word(&GeneratorWord::parse("122").unwrap(), 1 << 20)
            .unwrap();
        assert!(m.is_zero());
    }

    #[test]
    fn prod_factorizes() {
        let enc = small();
        let cap = 1 << 20;
        let p1 = enc.prod(&[1], cap).unwrap();
        let p2 = enc.prod(&[2], cap).unwrap();
        let p12 = enc.prod(&[1, 2], cap).unwrap();
        let composed = p1
            .as_morphism()
            .unwrap()
            .compose(p2.as_morphism().unwrap(), cap)
            .unwrap();
        assert_eq!(&composed, p12.as_morphism().unwrap());
    }

    #[test]
    fn c0_computes_p1_and_q1() {
        let enc = small();
        for ns in [[1u64, 1], [2, 1], [1, 3], [3, 2]] {
            let f = enc
                .trace_letter(
                    enc.control(0),
                    &GeneratorWord::lead_prod(2, &ns).unwrap(),
                    1 << 20,
                )
                .unwrap();
            assert_eq!(f.power_of(enc.e()), Some(enc.p1().eval_u64(&ns).unwrap()));
            let g = enc
                .trace_letter(
                    enc.control(0),
                    &GeneratorWord::lead_prod(3, &ns).unwrap(),
                    1 << 20,
                )
                .unwrap();
            assert_eq!(g.power_of(enc.e()), Some(enc.q1().eval_u64(&ns).unwrap()));
        }
    }

    #[test]
    fn small_suites_pass() {
        let enc = small();
        let r5 = lemma5_suite(&enc, 2, 2, 1 << 20).unwrap();
        assert!(r5.passed(), "{r5}");
        assert!(r5.claims.iter().all(|c| c.checked > 0));
        let r6 = lemma6_suite(&enc, 2, 1 << 20).unwrap();
        assert!(r6.passed(), "{r6}");
        assert_eq!(r6.checked(), 49);
    }

    #[test]
    fn sides_are_mtriples_and_encoder_is_not() {
        let enc = small();
        let r = definition_suite(&enc, 2, 1 << 20).unwrap();
        assert!(r.passed(), "{r}");
        let failed = enc.validate().failed();
        assert!(failed.contains(&Condition::SquareErases));
        let a = enc.side_map(true).unwrap();
        assert_eq!(
            a.compute_word(&[2, 3], 1 << 20).unwrap(),
            enc.p1().eval_u64(&[2, 3]).unwrap()
        );
    }

    #[test]
    fn cap_falls_back_to_matrix() {
        let enc = small();
        let w = GeneratorWord::parse("1111").unwrap();
        let h = enc.evaluate(&w, 5).unwrap();
        assert!(h.is_matrix_backed());
        let exact = enc.evaluate(&w, 1 << 20).unwrap();
        assert_eq!(h.matrix().unwrap(), exact.matrix().unwrap());
    }

    #[test]
    fn builder_rejects_bad_input() {
        let l = Limits::default();
        assert!(build_encoder(&poly(1, "x1"), &poly(1, "x1"), &l).is_err());
        assert!(build_encoder(&poly(2, "x1"), &poly(3, "x1"), &l).is_err());
        assert!(build_encoder(&Polynomial::zero(2), &poly(2, "x1"), &l).is_err());
        let tight = Limits::default().with_alphabet_budget(50);
        assert!(matches!(
            build_encoder(&poly(2, "x2"), &poly(2, "x1"), &tight),
            Err(Error::AlphabetBudget { .. })
        ));
    }

    #[test]
    fn custom_tupling() {
        // x1 + 2*x2 + 4*x3 is not injective, only used to exercise the option
        let c = poly(3, "x1 + 2*x2 + 4*x3");
        let enc = EncoderBuilder::new(poly(2, "x2"), poly(2, "x1"))
            .tupling(c)
            .build()
            .unwrap();
        assert_eq!(enc.p1(), &poly(2, "x1 + 6*x2"));
        assert!(EncoderBuilder::new(poly(2, "x2"), poly(2, "x1"))
            .tupling(poly(2, "x1"))
            .build()
            .is_err());
    }
}
