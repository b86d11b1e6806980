//! M-triples: leveled alphabets with two upper-triangular morphisms whose
//! alternating iteration computes polynomial values as powers of the last
//! letter.
//!
//! An M-triple `(A, g1, g2)` of dimension `t` has levels `A1..A(t+1)` and
//! satisfies:
//!
//! * (i)   `Ai·g1 ⊆ Ai*` for every level,
//! * (ii)  `Ai·g2 ⊆ A(i+1)*` for `i ≤ t`,
//! * (iii) `a·g2² = ε` for every letter,
//! * (iv)  `A(t+1) = {e}` with `e` the last letter,
//! * (v)   `e·g1 = e·g2 = ε`,
//!
//! and both morphisms are upper triangular. A witness `w ∈ A1*` computes `f`
//! when `w g1^n1 g2 g1^n2 g2 ⋯ g1^nt g2 = e^f(n1..nt)`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lang::{Letter, LeveledAlphabet, ParikhVector, Word};
use crate::matsem::SparseMatrix;
use crate::morph::Morphism;
use crate::poly::Polynomial;
use crate::Limits;

/// One condition checked by [`validate_mtriple`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    /// `t ≥ 1`.
    Dimension,
    /// Both morphisms are endomorphisms of an alphabet with `t + 1` levels.
    Partition,
    LevelPreserving,
    LevelRaising,
    SquareErases,
    SingletonLastLevel,
    LastLetterErased,
    G1Triangular,
    G2Triangular,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::Dimension => "dimension t >= 1",
            Condition::Partition => "t+1 level partition",
            Condition::LevelPreserving => "(i)",
            Condition::LevelRaising => "(ii)",
            Condition::SquareErases => "(iii)",
            Condition::SingletonLastLevel => "(iv)",
            Condition::LastLetterErased => "(v)",
            Condition::G1Triangular => "g1 upper triangular",
            Condition::G2Triangular => "g2 upper triangular",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionCheck {
    pub condition: Condition,
    pub violations: Vec<String>,
}

impl ConditionCheck {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub dimension: usize,
    pub checks: Vec<ConditionCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(ConditionCheck::passed)
    }

    pub fn failed(&self) -> Vec<Condition> {
        self.checks
            .iter()
            .filter(|c| !c.passed())
            .map(|c| c.condition)
            .collect()
    }

    pub fn check(&self, condition: Condition) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.condition == condition)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            if c.passed() {
                writeln!(f, "pass  {}", c.condition)?;
            } else {
                writeln!(
                    f,
                    "FAIL  {} ({} violations)",
                    c.condition,
                    c.violations.len()
                )?;
                for v in c.violations.iter().take(8) {
                    writeln!(f, "        {v}")?;
                }
                if c.violations.len() > 8 {
                    writeln!(f, "        ...")?;
                }
            }
        }
        Ok(())
    }
}

/// Letters that occur in an image but lie outside `allowed` levels.
fn stray_letters(alphabet: &LeveledAlphabet, w: &Word, allowed: usize) -> Vec<String> {
    w.runs()
        .iter()
        .filter(|(l, _)| alphabet.level_of(*l) != allowed)
        .map(|(l, _)| alphabet.name(*l).to_string())
        .collect()
}

fn short_text(w: &Word) -> String {
    if w.run_count() <= 6 {
        w.to_string()
    } else {
        format!(
            "{} … ({} runs)",
            Word::from_runs(w.alphabet().clone(), w.runs()[..3].to_vec()).unwrap(),
            w.run_count()
        )
    }
}

/// Checks every M-triple condition, naming each violating letter.
pub fn validate_mtriple(
    alphabet: &Arc<LeveledAlphabet>,
    g1: &Morphism,
    g2: &Morphism,
    t: usize,
) -> ValidationReport {
    let mut checks = Vec::new();
    if t == 0 {
        checks.push(ConditionCheck {
            condition: Condition::Dimension,
            violations: vec!["dimension must be at least 1".into()],
        });
        return ValidationReport {
            dimension: t,
            checks,
        };
    }
    checks.push(ConditionCheck {
        condition: Condition::Dimension,
        violations: vec![],
    });
    let mut partition = Vec::new();
    for (name, g) in [("g1", g1), ("g2", g2)] {
        if !crate::lang::same_alphabet(g.domain(), alphabet)
            || !crate::lang::same_alphabet(g.codomain(), alphabet)
        {
            partition.push(format!("{name} is not an endomorphism of the alphabet"));
        }
    }
    if alphabet.level_count() != t + 1 {
        partition.push(format!(
            "alphabet has {} levels, dimension {t} needs {}",
            alphabet.level_count(),
            t + 1
        ));
    }
    let partition_ok = partition.is_empty();
    checks.push(ConditionCheck {
        condition: Condition::Partition,
        violations: partition,
    });
    if !partition_ok {
        return ValidationReport {
            dimension: t,
            checks,
        };
    }

    let name = |l: Letter| alphabet.name(l).to_string();
    let mut preserving = Vec::new();
    let mut raising = Vec::new();
    let mut square = Vec::new();
    for l in alphabet.letters() {
        let level = alphabet.level_of(l);
        let img1 = g1.image(l);
        let stray = stray_letters(alphabet, img1, level);
        if !stray.is_empty() {
            preserving.push(format!(
                "{}·g1 = {} leaves level {level} ({})",
                name(l),
                short_text(img1),
                stray.join(", ")
            ));
        }
        let img2 = g2.image(l);
        if level <= t {
            let stray = stray_letters(alphabet, img2, level + 1);
            if !stray.is_empty() {
                raising.push(format!(
                    "{}·g2 = {} is not in level {} ({})",
                    name(l),
                    short_text(img2),
                    level + 1,
                    stray.join(", ")
                ));
            }
        }
        // emptiness of a·g2² only depends on supports
        if !g2.support_image(&img2.support()).is_empty() {
            let shown = g2
                .apply(img2, 64)
                .map(|w| short_text(&w))
                .unwrap_or_else(|_| "(long word)".into());
            square.push(format!("{}·g2² = {} ≠ ε", name(l), shown));
        }
    }
    checks.push(ConditionCheck {
        condition: Condition::LevelPreserving,
        violations: preserving,
    });
    checks.push(ConditionCheck {
        condition: Condition::LevelRaising,
        violations: raising,
    });
    checks.push(ConditionCheck {
        condition: Condition::SquareErases,
        violations: square,
    });

    let last_level = alphabet.level_range(t + 1);
    let mut singleton = Vec::new();
    if last_level.len() != 1 {
        singleton.push(format!(
            "level {} has {} letters, expected only the last letter",
            t + 1,
            last_level.len()
        ));
    }
    checks.push(ConditionCheck {
        condition: Condition::SingletonLastLevel,
        violations: singleton,
    });
    let e = alphabet.last();
    let mut erased = Vec::new();
    for (gname, g) in [("g1", g1), ("g2", g2)] {
        if !g.image(e).is_empty() {
            erased.push(format!(
                "{}·{gname} = {} ≠ ε",
                name(e),
                short_text(g.image(e))
            ));
        }
    }
    checks.push(ConditionCheck {
        condition: Condition::LastLetterErased,
        violations: erased,
    });

    for (cond, g) in [(Condition::G1Triangular, g1), (Condition::G2Triangular, g2)] {
        let violations = alphabet
            .letters()
            .filter(|&l| g.image(l).runs().iter().any(|(m, _)| *m < l))
            .map(|l| {
                format!(
                    "{}·g = {} uses a smaller letter",
                    name(l),
                    short_text(g.image(l))
                )
            })
            .collect();
        checks.push(ConditionCheck {
            condition: cond,
            violations,
        });
    }
    ValidationReport {
        dimension: t,
        checks,
    }
}

/// A validated M-triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MTriple {
    alphabet: Arc<LeveledAlphabet>,
    g1: Morphism,
    g2: Morphism,
    dimension: usize,
}

impl MTriple {
    /// Validates and wraps; the error carries the failed conditions.
    pub fn new(
        alphabet: Arc<LeveledAlphabet>,
        g1: Morphism,
        g2: Morphism,
        dimension: usize,
    ) -> Result<Self> {
        let report = validate_mtriple(&alphabet, &g1, &g2, dimension);
        if !report.passed() {
            let failed: Vec<String> = report.failed().iter().map(ToString::to_string).collect();
            return Err(Error::invalid(format!(
                "not an M-triple: conditions {} fail",
                failed.join(", ")
            )));
        }
        Ok(MTriple {
            alphabet,
            g1,
            g2,
            dimension,
        })
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

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// The last letter `e`.
    pub fn e(&self) -> Letter {
        self.alphabet.last()
    }

    pub fn validate(&self) -> ValidationReport {
        validate_mtriple(&self.alphabet, &self.g1, &self.g2, self.dimension)
    }
}

/// Which computation produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Explicit word-level iteration.
    Word,
    /// Parikh vectors pushed through the incidence matrices, used when a
    /// word would exceed the expansion cap.
    Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Computed {
    pub value: BigUint,
    pub route: Route,
}

/// An M-triple together with a witness word over level 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComputableMap {
    mtriple: MTriple,
    witness: Word,
}

fn check_point(t: usize, point: &[u64]) -> Result<()> {
    if point.len() != t {
        return Err(Error::DimensionMismatch(format!(
            "point has {} coordinates, M-triple has dimension {t}",
            point.len()
        )));
    }
    if point.contains(&0) {
        return Err(Error::invalid("iteration counts must be positive"));
    }
    Ok(())
}

impl ComputableMap {
    pub fn new(mtriple: MTriple, witness: Word) -> Result<Self> {
        let a = mtriple.alphabet();
        if !crate::lang::same_alphabet(witness.alphabet(), a) {
            return Err(Error::AlphabetMismatch(
                "witness is not over the M-triple alphabet".into(),
            ));
        }
        if witness.runs().iter().any(|(l, _)| a.level_of(*l) != 1) {
            return Err(Error::invalid("witness must be a word over level 1"));
        }
        Ok(ComputableMap { mtriple, witness })
    }

    pub fn mtriple(&self) -> &MTriple {
        &self.mtriple
    }

    pub fn witness(&self) -> &Word {
        &self.witness
    }

    pub fn dimension(&self) -> usize {
        self.mtriple.dimension
    }

    /// The words `w g1^n1 g2 ⋯ g1^nj g2` for `j = 1..t`.
    pub fn trace(&self, point: &[u64], cap: usize) -> Result<Vec<Word>> {
        check_point(self.dimension(), point)?;
        let mut w = self.witness.clone();
        let mut out = Vec::with_capacity(point.len());
        for &n in point {
            for _ in 0..n {
                w = self.mtriple.g1.apply(&w, cap)?;
            }
            w = self.mtriple.g2.apply(&w, cap)?;
            out.push(w.clone());
        }
        Ok(out)
    }

    /// Word-level evaluation; fails if any intermediate word exceeds `cap`.
    pub fn compute_word(&self, point: &[u64], cap: usize) -> Result<BigUint> {
        let last = self.trace(point, cap)?.pop().expect("t >= 1");
        let e = self.mtriple.e();
        if last.runs().iter().any(|(l, _)| *l != e) {
            return Err(Error::invalid(format!(
                "iteration ended in `{}`, not a power of e",
                short_text(&last)
            )));
        }
        Ok(last.count(e))
    }

    /// Evaluation through `parikh(w)·M1^n1·M2⋯`.
    pub fn compute_matrix(&self, point: &[u64]) -> Result<BigUint> {
        check_point(self.dimension(), point)?;
        let m1 = self.mtriple.g1.matrix_of()?;
        let m2 = self.mtriple.g2.matrix_of()?;
        let v = parikh_iterate(&self.witness.parikh(), &m1, &m2, point);
        let e = self.mtriple.e();
        if v.iter().any(|(l, _)| l != e) {
            return Err(Error::invalid("matrix iteration left letters other than e"));
        }
        Ok(v.get(e))
    }

    /// Word level under `cap`, falling back to the matrix route.
    pub fn compute(&self, point: &[u64], cap: usize) -> Result<Computed> {
        match self.compute_word(point, cap) {
            Ok(value) => Ok(Computed {
                value,
                route: Route::Word,
            }),
            Err(Error::ExpansionCap { .. }) => Ok(Computed {
                value: self.compute_matrix(point)?,
                route: Route::Matrix,
            }),
            Err(e) => Err(e),
        }
    }
}

/// `v·M1^n1·M2·M1^n2·M2⋯`.
pub(crate) fn parikh_iterate(
    v: &ParikhVector,
    m1: &SparseMatrix,
    m2: &SparseMatrix,
    point: &[u64],
) -> ParikhVector {
    let mut v = v.clone();
    for &n in point {
        if n <= 64 {
            for _ in 0..n {
                v = m1.vec_mul(&v);
            }
        } else {
            v = m1.pow_u64(n).vec_mul(&v);
        }
        v = m2.vec_mul(&v);
    }
    v
}

fn check_budget(needed: u128, limits: &Limits) -> Result<()> {
    if needed > limits.alphabet_budget as u128 {
        Err(Error::AlphabetBudget {
            needed,
            budget: limits.alphabet_budget,
        })
    } else {
        Ok(())
    }
}

/// The ordered `2^k`-letter alphabet and morphism `h` with `Ψ(h) = N⊗⋯⊗N`
/// (`k` factors, `N = [[1,1],[0,1]]`). Letter `i` maps to all letters whose
/// index is a bitwise superset of `i`, in increasing order.
pub fn kronecker_power_morphism(
    k: u32,
    limits: &Limits,
) -> Result<(Arc<LeveledAlphabet>, Morphism)> {
    if k == 0 {
        return Err(Error::invalid("Kronecker power needs k >= 1"));
    }
    let size = 1u128.checked_shl(k).unwrap_or(u128::MAX);
    check_budget(size, limits)?;
    let size = size as usize;
    let alphabet = Arc::new(LeveledAlphabet::flat((1..=size).map(|i| format!("z{i}")))?);
    let h = Morphism::from_fn(alphabet.clone(), alphabet.clone(), |l| {
        let i = l.index();
        let letters: Vec<Letter> = (i..size).filter(|j| j & i == i).map(Letter::new).collect();
        Word::from_letters(alphabet.clone(), &letters).expect("letters in range")
    })?;
    Ok((alphabet, h))
}

/// The two-letter morphism `a → b, b → b`, for which `|a hⁿ|_b = 1 = n⁰`.
pub fn constant_exponent_morphism() -> (Arc<LeveledAlphabet>, Morphism) {
    let alphabet = Arc::new(LeveledAlphabet::flat(["a", "b"]).expect("static alphabet"));
    let h =
        Morphism::from_table(alphabet.clone(), &[("a", "b"), ("b", "b")]).expect("static table");
    (alphabet, h)
}

fn level_block_size(exponent: u32) -> u128 {
    1u128.checked_shl(exponent.max(1)).unwrap_or(u128::MAX)
}

/// Alphabet size of [`monomial_mtriple`] without the shared last letter.
fn monomial_size(exponents: &[u32]) -> u128 {
    exponents
        .iter()
        .map(|&a| level_block_size(a))
        .fold(0u128, u128::saturating_add)
}

/// M-triple computing `x1^a1 ⋯ xt^at` with witness `a1`, the first letter
/// of level 1.
pub fn monomial_mtriple(exponents: &[u32], limits: &Limits) -> Result<ComputableMap> {
    let t = exponents.len();
    if t == 0 {
        return Err(Error::invalid("monomial needs at least one variable"));
    }
    check_budget(monomial_size(exponents).saturating_add(1), limits)?;
    let blocks = exponents
        .iter()
        .map(|&a| {
            if a == 0 {
                Ok(constant_exponent_morphism())
            } else {
                kronecker_power_morphism(a, limits)
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut names = Vec::new();
    let mut sizes = Vec::new();
    let mut offsets = Vec::new();
    for (i, (alph, _)) in blocks.iter().enumerate() {
        offsets.push(names.len());
        sizes.push(alph.len());
        names.extend(alph.names().iter().map(|n| format!("{}.{n}", i + 1)));
    }
    names.push("e".into());
    sizes.push(1);
    let alphabet = Arc::new(LeveledAlphabet::new(names, &sizes)?);
    let e = alphabet.last();

    let mut g1_images = Vec::with_capacity(alphabet.len());
    let mut g2_images = Vec::with_capacity(alphabet.len());
    for (i, (alph, h)) in blocks.iter().enumerate() {
        let off = offsets[i];
        let next_first = if i + 1 < t {
            Letter::new(offsets[i + 1])
        } else {
            e
        };
        for l in alph.letters() {
            g1_images.push(
                h.image(l)
                    .relabel(&alphabet, |m| Letter::new(m.index() + off)),
            );
            g2_images.push(if l == alph.last() {
                Word::letter(alphabet.clone(), next_first)
            } else {
                Word::empty(alphabet.clone())
            });
        }
    }
    g1_images.push(Word::empty(alphabet.clone()));
    g2_images.push(Word::empty(alphabet.clone()));

    let g1 = Morphism::new(alphabet.clone(), alphabet.clone(), g1_images)?;
    let g2 = Morphism::new(alphabet.clone(), alphabet.clone(), g2_images)?;
    let mtriple = MTriple::new(alphabet.clone(), g1, g2, t)?;
    let witness = Word::letter(alphabet.clone(), alphabet.first());
    ComputableMap::new(mtriple, witness)
}

/// Direct sum of several M-triples of one dimension, with last letters
/// merged into a fresh `e`.
#[derive(Clone, Debug)]
pub struct MergedMaps {
    pub mtriple: MTriple,
    /// Each part's witness, re-addressed into the merged alphabet.
    pub witnesses: Vec<Word>,
    /// Index ranges of each part's letters per level: `blocks[part][level-1]`.
    pub blocks: Vec<Vec<std::ops::Range<usize>>>,
}

/// Merges `parts` level by level; letters of part `k` are renamed
/// `"{tag_k}:{name}"` and the parts' last letters become the shared `e`.
pub fn direct_sum(parts: &[(&str, &ComputableMap)], limits: &Limits) -> Result<MergedMaps> {
    let (_, first) = parts
        .first()
        .ok_or_else(|| Error::invalid("direct sum of no M-triples"))?;
    let t = first.dimension();
    for (tag, p) in parts {
        if p.dimension() != t {
            return Err(Error::DimensionMismatch(format!(
                "part `{tag}` has dimension {}, expected {t}",
                p.dimension()
            )));
        }
    }
    let needed = parts
        .iter()
        .map(|(_, p)| p.mtriple.alphabet.len() as u128 - 1)
        .sum::<u128>()
        + 1;
    check_budget(needed, limits)?;

    let mut names = Vec::new();
    let mut sizes = Vec::new();
    let mut maps: Vec<Vec<u32>> = parts
        .iter()
        .map(|(_, p)| vec![0; p.mtriple.alphabet.len()])
        .collect();
    let mut blocks = vec![Vec::with_capacity(t); parts.len()];
    for level in 1..=t {
        let start = names.len();
        for (k, (tag, p)) in parts.iter().enumerate() {
            let a = &p.mtriple.alphabet;
            let block_start = names.len();
            for l in a.level_letters(level) {
                maps[k][l.index()] = names.len() as u32;
                names.push(format!("{tag}:{}", a.name(l)));
            }
            blocks[k].push(block_start..names.len());
        }
        sizes.push(names.len() - start);
    }
    let e_index = names.len() as u32;
    for (k, (_, p)) in parts.iter().enumerate() {
        maps[k][p.mtriple.e().index()] = e_index;
    }
    names.push("e".into());
    sizes.push(1);
    let alphabet = Arc::new(LeveledAlphabet::new(names, &sizes)?);

    let mut g1_images = vec![Word::empty(alphabet.clone()); alphabet.len()];
    let mut g2_images = vec![Word::empty(alphabet.clone()); alphabet.len()];
    for (k, (_, p)) in parts.iter().enumerate() {
        let map = &maps[k];
        let relabel = |w: &Word| w.relabel(&alphabet, |l| Letter::new(map[l.index()] as usize));
        for l in p.mtriple.alphabet.letters() {
            if l == p.mtriple.e() {
                continue;
            }
            let target = map[l.index()] as usize;
            g1_images[target] = relabel(p.mtriple.g1.image(l));
            g2_images[target] = relabel(p.mtriple.g2.image(l));
        }
    }
    let g1 = Morphism::new(alphabet.clone(), alphabet.clone(), g1_images)?;
    let g2 = Morphism::new(alphabet.clone(), alphabet.clone(), g2_images)?;
    let mtriple = MTriple::new(alphabet.clone(), g1, g2, t)?;
    let witnesses = parts
        .iter()
        .enumerate()
        .map(|(k, (_, p))| {
            let map = &maps[k];
            p.witness
                .relabel(&alphabet, |l| Letter::new(map[l.index()] as usize))
        })
        .collect();
    Ok(MergedMaps {
        mtriple,
        witnesses,
        blocks,
    })
}

/// Binary direct sum `F ⊕ G` (parts tagged `F` and `G`).
pub fn mtriple_direct_sum(
    f: &ComputableMap,
    g: &ComputableMap,
    limits: &Limits,
) -> Result<MergedMaps> {
    direct_sum(&[("F", f), ("G", g)], limits)
}

/// `Σ coeff_k · f_k` computed by the merged M-triple with witness
/// `w_1^{c_1} ⋯ w_K^{c_K}`.
pub fn linear_combination_all(
    parts: &[(&str, &ComputableMap, BigUint)],
    limits: &Limits,
) -> Result<ComputableMap> {
    if parts.iter().any(|(_, _, c)| c.is_zero()) {
        return Err(Error::invalid(
            "linear combination coefficients must be positive",
        ));
    }
    let tagged: Vec<(&str, &ComputableMap)> = parts.iter().map(|(t, m, _)| (*t, *m)).collect();
    let merged = direct_sum(&tagged, limits)?;
    let mut witness = Word::empty(merged.mtriple.alphabet.clone());
    for ((_, _, c), w) in parts.iter().zip(&merged.witnesses) {
        witness = witness.concat(&w.power(c, limits.expansion_cap)?)?;
    }
    ComputableMap::new(merged.mtriple, witness)
}

/// `α·p + β·q` where `F` computes `p` and `G` computes `q`.
pub fn linear_combination(
    f: &ComputableMap,
    g: &ComputableMap,
    alpha: &BigUint,
    beta: &BigUint,
    limits: &Limits,
) -> Result<ComputableMap> {
    linear_combination_all(&[("F", f, alpha.clone()), ("G", g, beta.clone())], limits)
}

/// Number of letters [`compile_polynomial`] needs for `p`.
pub fn compiled_alphabet_size(p: &Polynomial) -> u128 {
    p.monomials()
        .iter()
        .map(|m| monomial_size(&m.exponents))
        .fold(1u128, u128::saturating_add)
}

/// Compiles a nonzero polynomial with nonnegative coefficients into an
/// M-triple computing it. Monomial `k` (in canonical order) contributes a
/// summand tagged `m{k}` whose witness is repeated `coeff` times.
pub fn compile_polynomial(p: &Polynomial, limits: &Limits) -> Result<ComputableMap> {
    if p.is_zero() {
        return Err(Error::invalid("cannot compile the zero polynomial"));
    }
    check_budget(compiled_alphabet_size(p), limits)?;
    let maps = p
        .monomials()
        .iter()
        .map(|m| monomial_mtriple(&m.exponents, limits))
        .collect::<Result<Vec<_>>>()?;
    let tags: Vec<String> = (1..=maps.len()).map(|k| format!("m{k}")).collect();
    let parts: Vec<(&str, &ComputableMap, BigUint)> = maps
        .iter()
        .zip(p.monomials())
        .zip(&tags)
        .map(|((map, m), tag)| (tag.as_str(), map, m.coeff.clone()))
        .collect();
    linear_combination_all(&parts, limits)
}

/// Value of `map` at `point`; word level under the cap, matrix otherwise.
pub fn mtriple_compute(map: &ComputableMap, point: &[u64], cap: usize) -> Result<Computed> {
    map.compute(point, cap)
}

/// `|a hⁿ|_b` for the first and last letters, by word application.
pub fn first_to_last_count(h: &Morphism, n: u64, cap: usize) -> Result<BigUint> {
    let a = h.domain();
    let mut w = Word::letter(a.clone(), a.first());
    for _ in 0..n {
        w = h.apply(&w, cap)?;
    }
    Ok(w.count(a.last()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn limits() -> Limits {
        Limits::default()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn kronecker_k1_is_n() {
        let (a, h) = kronecker_power_morphism(1, &limits()).unwrap();
        assert_eq!(a.names(), &["z1", "z2"]);
        assert_eq!(h.image(Letter::new(0)).to_text(), "z1 z2");
        assert_eq!(h.image(Letter::new(1)).to_text(), "z2");
        assert_eq!(
            h.matrix_of().unwrap(),
            SparseMatrix::from_dense(&[&[1, 1], &[0, 1]]).unwrap()
        );
    }

    #[test]
    fn kronecker_k2_matrix() {
        let (_, h) = kronecker_power_morphism(2, &limits()).unwrap();
        let expected =
            SparseMatrix::from_dense(&[&[1, 1, 1, 1], &[0, 1, 0, 1], &[0, 0, 1, 1], &[0, 0, 0, 1]])
                .unwrap();
        assert_eq!(h.matrix_of().unwrap(), expected);
        assert_eq!(first_to_last_count(&h, 3, 1000).unwrap(), big(9));
    }

    #[test]
    fn kronecker_budget() {
        let small = Limits::default().with_alphabet_budget(8);
        assert!(kronecker_power_morphism(3, &small).is_ok());
        assert!(matches!(
            kronecker_power_morphism(4, &small),
            Err(Error::AlphabetBudget { .. })
        ));
        assert!(kronecker_power_morphism(0, &small).is_err());
    }

    #[test]
    fn constant_exponent() {
        let (_, h) = constant_exponent_morphism();
        assert_eq!(h.image(Letter::new(0)).to_text(), "b");
        for n in 1..=5 {
            assert_eq!(first_to_last_count(&h, n, 10).unwrap(), big(1));
        }
        assert_eq!(
            h.matrix_of().unwrap(),
            SparseMatrix::from_dense(&[&[0, 1], &[0, 1]]).unwrap()
        );
        assert!(h.is_upper_triangular());
    }

    #[test]
    fn monomial_examples() {
        let cap = 100_000;
        let sq = monomial_mtriple(&[2], &limits()).unwrap();
        assert!(sq.mtriple().validate().passed());
        assert_eq!(sq.compute_word(&[3], cap).unwrap(), big(9));
        let xy = monomial_mtriple(&[1, 1], &limits()).unwrap();
        assert_eq!(xy.compute_word(&[2, 3], cap).unwrap(), big(6));
        let y2 = monomial_mtriple(&[0, 2], &limits()).unwrap();
        assert_eq!(y2.compute_word(&[5, 2], cap).unwrap(), big(4));
    }

    #[test]
    fn degenerate_dimension_rejected() {
        let a = Arc::new(LeveledAlphabet::flat(["e"]).unwrap());
        let z = Morphism::zero(a.clone());
        let report = validate_mtriple(&a, &z, &z, 0);
        assert!(!report.passed());
        assert_eq!(report.failed(), vec![Condition::Dimension]);
    }

    #[test]
    fn validator_names_violations() {
        // two levels {x, y} | {e}; g2 maps x to y (same level) and y to e
        let a = Arc::new(
            LeveledAlphabet::new(vec!["x".into(), "y".into(), "e".into()], &[2, 1]).unwrap(),
        );
        let g1 = Morphism::from_table(a.clone(), &[("x", "x"), ("y", "y"), ("e", "")]).unwrap();
        let g2 = Morphism::from_table(a.clone(), &[("x", "y"), ("y", "e"), ("e", "")]).unwrap();
        let r = validate_mtriple(&a, &g1, &g2, 1);
        assert_eq!(
            r.failed(),
            vec![Condition::LevelRaising, Condition::SquareErases]
        );
        let raising = r.check(Condition::LevelRaising).unwrap();
        assert!(
            raising.violations[0].starts_with("x·g2"),
            "{:?}",
            raising.violations
        );
        let square = r.check(Condition::SquareErases).unwrap();
        assert!(
            square.violations[0].contains("x·g2² = e"),
            "{:?}",
            square.violations
        );
    }

    #[test]
    fn direct_sum_structure() {
        let x = monomial_mtriple(&[1], &limits()).unwrap();
        let merged = mtriple_direct_sum(&x, &x, &limits()).unwrap();
        let a = merged.mtriple.alphabet();
        assert_eq!(a.level_sizes(), vec![4, 1]);
        assert_eq!(a.name(a.last()), "e");
        assert!(merged.mtriple.validate().passed());
        for w in &merged.witnesses {
            let m = ComputableMap::new(merged.mtriple.clone(), w.clone()).unwrap();
            for n in 1..=4 {
                assert_eq!(m.compute_word(&[n], 1000).unwrap(), big(n));
            }
        }
        let y = monomial_mtriple(&[1, 1], &limits()).unwrap();
        assert!(mtriple_direct_sum(&x, &y, &limits()).is_err());
    }

    #[test]
    fn linear_combination_examples() {
        let l = limits();
        let x = monomial_mtriple(&[1], &l).unwrap();
        let c = linear_combination(&x, &x, &big(1), &big(2), &l).unwrap();
        assert_eq!(c.compute_word(&[2], 1000).unwrap(), big(6));

        let x2 = monomial_mtriple(&[2, 0], &l).unwrap();
        let y = monomial_mtriple(&[0, 1], &l).unwrap();
        let c = linear_combination(&x2, &y, &big(1), &big(1), &l).unwrap();
        assert_eq!(c.compute_word(&[3, 4], 1000).unwrap(), big(13));

        let one = monomial_mtriple(&[0], &l).unwrap();
        let c = linear_combination(&x, &one, &big(2), &big(1), &l).unwrap();
        assert_eq!(c.compute_word(&[7], 1000).unwrap(), big(15));
    }

    #[test]
    fn compile_examples() {
        let l = limits();
        let cap = 100_000;
        let p = Polynomial::parse(1, "x1^2 + 2").unwrap();
        assert_eq!(
            compile_polynomial(&p, &l)
                .unwrap()
                .compute_word(&[3], cap)
                .unwrap(),
            big(11)
        );
        let p = Polynomial::parse(2, "x1*x2").unwrap();
        assert_eq!(
            compile_polynomial(&p, &l)
                .unwrap()
                .compute_word(&[2, 5], cap)
                .unwrap(),
            big(10)
        );
        let p = Polynomial::one(1);
        let c = compile_polynomial(&p, &l).unwrap();
        for n in 1..6 {
            assert_eq!(c.compute_word(&[n], cap).unwrap(), big(1));
        }
        assert!(compile_polynomial(&Polynomial::zero(2), &l).is_err());
    }

    #[test]
    fn compute_examples_and_fallback() {
        let l = limits();
        let x = compile_polynomial(&Polynomial::parse(1, "x1").unwrap(), &l).unwrap();
        assert_eq!(mtriple_compute(&x, &[4], 100).unwrap().value, big(4));
        let cube = compile_polynomial(&Polynomial::parse(1, "x1^3").unwrap(), &l).unwrap();
        assert_eq!(cube.compute_word(&[2], 100).unwrap(), big(8));
        assert_eq!(cube.compute_matrix(&[2]).unwrap(), big(8));
        let p = Polynomial::parse(2, "x1^2 + 2*x2").unwrap();
        let c = compile_polynomial(&p, &l).unwrap();
        let got = mtriple_compute(&c, &[3, 5], 100_000).unwrap();
        assert_eq!(
            got,
            Computed {
                value: big(19),
                route: Route::Word
            }
        );
        // a tiny cap forces the matrix route with the same value
        let got = mtriple_compute(&cube, &[9], 4).unwrap();
        assert_eq!(
            got,
            Computed {
                value: big(729),
                route: Route::Matrix
            }
        );
    }

    #[test]
    fn compile_budget() {
        let p = Polynomial::parse(1, "x1^10").unwrap();
        let tight = Limits::default().with_alphabet_budget(1000);
        assert!(matches!(
            compile_polynomial(&p, &tight),
            Err(Error::AlphabetBudget { .. })
        ));
    }

    #[test]
    fn bad_points_rejected() {
        let c = monomial_mtriple(&[1, 1], &limits()).unwrap();
        assert!(c.compute(&[1], 10).is_err());
        assert!(c.compute(&[0, 1], 10).is_err());
    }
}
