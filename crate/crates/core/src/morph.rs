//! Free-monoid morphisms given by per-letter image tables.
//!
//! Mappings act on the right: `compose(f, g)` is the morphism `fg` that
//! applies `f` first, so `a(fg) = (af)g`.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::lang::{same_alphabet, Letter, LeveledAlphabet, ParikhVector, RunBuilder, Word};
use crate::matsem::SparseMatrix;

#[derive(Clone, Debug)]
pub struct Morphism {
    domain: Arc<LeveledAlphabet>,
    codomain: Arc<LeveledAlphabet>,
    images: Vec<Word>,
}

/// Equality is extensional on generators: same alphabets, same image for
/// every letter.
impl PartialEq for Morphism {
    fn eq(&self, other: &Self) -> bool {
        same_alphabet(&self.domain, &other.domain)
            && same_alphabet(&self.codomain, &other.codomain)
            && self.images == other.images
    }
}

impl Eq for Morphism {}

fn cap_context(err: Error, context: impl FnOnce() -> String) -> Error {
    match err {
        Error::ExpansionCap { cap, .. } => Error::ExpansionCap {
            cap,
            context: context(),
        },
        other => other,
    }
}

impl Morphism {
    pub fn new(
        domain: Arc<LeveledAlphabet>,
        codomain: Arc<LeveledAlphabet>,
        images: Vec<Word>,
    ) -> Result<Self> {
        if images.len() != domain.len() {
            return Err(Error::invalid(format!(
                "{} images for a {}-letter domain",
                images.len(),
                domain.len()
            )));
        }
        if let Some(bad) = images
            .iter()
            .find(|w| !same_alphabet(w.alphabet(), &codomain))
        {
            return Err(Error::AlphabetMismatch(format!(
                "image `{bad}` is not over the codomain"
            )));
        }
        Ok(Morphism {
            domain,
            codomain,
            images,
        })
    }

    pub fn from_fn(
        domain: Arc<LeveledAlphabet>,
        codomain: Arc<LeveledAlphabet>,
        f: impl Fn(Letter) -> Word,
    ) -> Result<Self> {
        let images = domain.letters().map(f).collect();
        Self::new(domain, codomain, images)
    }

    /// Endomorphism from `(letter name, image text)` pairs; every letter must
    /// appear exactly once.
    pub fn from_table(alphabet: Arc<LeveledAlphabet>, table: &[(&str, &str)]) -> Result<Self> {
        let mut images: Vec<Option<Word>> = vec![None; alphabet.len()];
        for (name, text) in table {
            let l = alphabet
                .letter(name)
                .ok_or_else(|| Error::Parse(format!("unknown letter `{name}`")))?;
            if images[l.index()].is_some() {
                return Err(Error::invalid(format!("letter `{name}` has two images")));
            }
            images[l.index()] = Some(Word::parse(alphabet.clone(), text)?);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, w)| {
                w.ok_or_else(|| {
                    Error::invalid(format!(
                        "letter `{}` has no image",
                        alphabet.name(Letter::new(i))
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet.clone(), alphabet, images)
    }

    pub fn identity(alphabet: Arc<LeveledAlphabet>) -> Self {
        let images = alphabet
            .letters()
            .map(|l| Word::letter(alphabet.clone(), l))
            .collect();
        Morphism {
            domain: alphabet.clone(),
            codomain: alphabet,
            images,
        }
    }

    /// The morphism `o` erasing every letter.
    pub fn zero(alphabet: Arc<LeveledAlphabet>) -> Self {
        let images = vec![Word::empty(alphabet.clone()); alphabet.len()];
        Morphism {
            domain: alphabet.clone(),
            codomain: alphabet,
            images,
        }
    }

    pub fn domain(&self) -> &Arc<LeveledAlphabet> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<LeveledAlphabet> {
        &self.codomain
    }

    pub fn image(&self, letter: Letter) -> &Word {
        &self.images[letter.index()]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn is_endomorphism(&self) -> bool {
        same_alphabet(&self.domain, &self.codomain)
    }

    /// Homomorphic extension to words; fails when the result needs more
    /// than `cap` runs.
    pub fn apply(&self, w: &Word, cap: usize) -> Result<Word> {
        if !same_alphabet(w.alphabet(), &self.domain) {
            return Err(Error::AlphabetMismatch(
                "word is not over the morphism's domain".into(),
            ));
        }
        let mut b = RunBuilder::new(cap);
        for (l, c) in w.runs() {
            b.push_power(self.images[l.index()].runs(), c)
                .map_err(|e| {
                    cap_context(e, || {
                        format!("applying a morphism to a {}-run word", w.run_count())
                    })
                })?;
        }
        Ok(b.finish(self.codomain.clone()))
    }

    /// The product `fg` (apply `self`, then `g`). The cap bounds the runs
    /// of all images together.
    pub fn compose(&self, g: &Morphism, cap: usize) -> Result<Morphism> {
        if !same_alphabet(&self.codomain, &g.domain) {
            return Err(Error::AlphabetMismatch(
                "codomain of the left factor differs from the domain of the right".into(),
            ));
        }
        let mut used = 0usize;
        let images = self
            .domain
            .letters()
            .map(|l| {
                let w = g
                    .apply(&self.images[l.index()], cap - used)
                    .map_err(|e| match e {
                        Error::ExpansionCap { .. } => Error::ExpansionCap {
                            cap,
                            context: format!(
                                "image of letter `{}` in a composition",
                                self.domain.name(l)
                            ),
                        },
                        other => other,
                    })?;
                used += w.run_count();
                Ok(w)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Morphism {
            domain: self.domain.clone(),
            codomain: g.codomain.clone(),
            images,
        })
    }

    /// `f ⊕ g` over the union alphabet: letters of `self` first, then those
    /// of `g`; levels are concatenated in the same way.
    pub fn direct_sum(&self, g: &Morphism) -> Result<Morphism> {
        if !self.is_endomorphism() || !g.is_endomorphism() {
            return Err(Error::invalid("direct sum needs two endomorphisms"));
        }
        let x = &self.domain;
        let y = &g.domain;
        if let Some(shared) = y.names().iter().find(|n| x.letter(n).is_some()) {
            return Err(Error::NotDisjoint(shared.clone()));
        }
        let mut names = x.names().to_vec();
        names.extend_from_slice(y.names());
        let mut levels = x.level_sizes();
        levels.extend(y.level_sizes());
        let z = Arc::new(LeveledAlphabet::new(names, &levels)?);
        let shift = x.len();
        let mut images: Vec<Word> = self.images.iter().map(|w| w.relabel(&z, |l| l)).collect();
        images.extend(
            g.images
                .iter()
                .map(|w| w.relabel(&z, |l| Letter::new(l.index() + shift))),
        );
        Ok(Morphism {
            domain: z.clone(),
            codomain: z,
            images,
        })
    }

    /// The incidence matrix whose row `i` is the Parikh vector of the image
    /// of the `i`-th letter.
    pub fn matrix_of(&self) -> Result<SparseMatrix> {
        if !self.is_endomorphism() {
            return Err(Error::invalid("matrix_of needs an endomorphism"));
        }
        let rows = self
            .images
            .iter()
            .map(|w| {
                w.parikh()
                    .iter()
                    .map(|(l, c)| (l.index() as u32, c.clone()))
                    .collect()
            })
            .collect();
        Ok(SparseMatrix::from_rows(self.domain.len(), rows))
    }

    /// True iff every letter's image uses only letters not smaller than it.
    pub fn is_upper_triangular(&self) -> bool {
        self.is_endomorphism()
            && self
                .images
                .iter()
                .enumerate()
                .all(|(i, w)| w.runs().iter().all(|(l, _)| l.index() >= i))
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(Word::is_empty)
    }

    /// Letters whose image is nonempty.
    pub fn non_erased(&self) -> impl Iterator<Item = Letter> + '_ {
        self.domain
            .letters()
            .filter(move |l| !self.images[l.index()].is_empty())
    }

    /// Parikh vector of `w·self` computed from the Parikh vector of `w`.
    pub fn parikh_image(&self, v: &ParikhVector) -> ParikhVector {
        let mut out = ParikhVector::default();
        for (l, c) in v.iter() {
            for (m, k) in self.images[l.index()].runs() {
                out.add_count(*m, &(c * k));
            }
        }
        out
    }

    /// Letters occurring in `w·self` for any `w` with the given support.
    pub fn support_image(&self, support: &BTreeSet<Letter>) -> BTreeSet<Letter> {
        support
            .iter()
            .flat_map(|l| self.images[l.index()].runs().iter().map(|(m, _)| *m))
            .collect()
    }

    /// `(letter name, image text)` pairs in alphabet order.
    pub fn to_table(&self) -> Vec<(String, String)> {
        self.domain
            .letters()
            .map(|l| {
                (
                    self.domain.name(l).to_string(),
                    self.images[l.index()].to_text(),
                )
            })
            .collect()
    }

    /// Total number of stored runs over all images.
    pub fn total_runs(&self) -> usize {
        self.images.iter().map(Word::run_count).sum()
    }

    /// `self^n` by repeated composition.
    pub fn power(&self, n: u64, cap: usize) -> Result<Morphism> {
        let mut acc = Morphism::identity(self.domain.clone());
        for _ in 0..n {
            acc = acc.compose(self, cap)?;
        }
        Ok(acc)
    }

    /// Image length of `letter`, without materializing anything new.
    pub fn image_len(&self, letter: Letter) -> BigUint {
        self.images[letter.index()].len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> Arc<LeveledAlphabet> {
        Arc::new(LeveledAlphabet::flat(["z1", "z2"]).unwrap())
    }

    fn h() -> Morphism {
        Morphism::from_table(z2(), &[("z1", "z1 z2"), ("z2", "z2")]).unwrap()
    }

    #[test]
    fn apply_substitutes_per_letter() {
        let a = z2();
        let h = Morphism::from_table(a.clone(), &[("z1", "z1 z2"), ("z2", "z2")]).unwrap();
        let w = Word::parse(a.clone(), "z1 z1").unwrap();
        assert_eq!(
            h.apply(&w, 100).unwrap(),
            Word::parse(a.clone(), "z1 z2 z1 z2").unwrap()
        );
        assert!(h.apply(&Word::empty(a.clone()), 100).unwrap().is_empty());
        let o = Morphism::zero(a.clone());
        assert!(o.apply(&w, 100).unwrap().is_empty());
    }

    #[test]
    fn compose_identity_and_order() {
        let a = z2();
        let f = Morphism::from_table(a.clone(), &[("z1", "z1 z2"), ("z2", "z2")]).unwrap();
        let g = Morphism::from_table(a.clone(), &[("z1", "z1"), ("z2", "")]).unwrap();
        assert_eq!(f.compose(&Morphism::identity(a.clone()), 10).unwrap(), f);
        // a(fg) = (af)g: z1 -> z1 z2 -> z1
        let fg = f.compose(&g, 10).unwrap();
        assert_eq!(fg.image(Letter::new(0)).to_text(), "z1");
        // a(gf): z1 -> z1 -> z1 z2
        let gf = g.compose(&f, 10).unwrap();
        assert_eq!(gf.image(Letter::new(0)).to_text(), "z1 z2");
    }

    #[test]
    fn matrix_of_examples() {
        let a = z2();
        assert_eq!(
            Morphism::identity(a.clone()).matrix_of().unwrap(),
            SparseMatrix::identity(2)
        );
        assert!(Morphism::zero(a).matrix_of().unwrap().is_zero());
        assert_eq!(
            h().matrix_of().unwrap(),
            SparseMatrix::from_dense(&[&[1, 1], &[0, 1]]).unwrap()
        );
    }

    #[test]
    fn triangularity() {
        let a = z2();
        assert!(Morphism::identity(a.clone()).is_upper_triangular());
        assert!(h().is_upper_triangular());
        let down = Morphism::from_table(a, &[("z1", "z1"), ("z2", "z1")]).unwrap();
        assert!(!down.is_upper_triangular());
    }

    #[test]
    fn zero_morphism() {
        let a = z2();
        assert!(Morphism::zero(a.clone()).is_zero());
        assert!(!Morphism::identity(a).is_zero());
    }

    #[test]
    fn direct_sum_blocks() {
        let x = z2();
        let y = Arc::new(LeveledAlphabet::flat(["y1", "y2", "y3"]).unwrap());
        let g = Morphism::from_table(y.clone(), &[("y1", "y2 y3"), ("y2", ""), ("y3", "y3^2")])
            .unwrap();
        let s = h().direct_sum(&g).unwrap();
        assert_eq!(s.image(Letter::new(0)).to_text(), "z1 z2");
        assert_eq!(s.image(Letter::new(2)).to_text(), "y2 y3");
        assert_eq!(
            s.matrix_of().unwrap(),
            h().matrix_of().unwrap().direct_sum(&g.matrix_of().unwrap())
        );
        let ids = Morphism::identity(x.clone())
            .direct_sum(&Morphism::identity(y.clone()))
            .unwrap();
        assert_eq!(ids, Morphism::identity(ids.domain().clone()));
        assert!(matches!(h().direct_sum(&h()), Err(Error::NotDisjoint(_))));
    }

    #[test]
    fn table_requires_every_letter() {
        assert!(Morphism::from_table(z2(), &[("z1", "z1")]).is_err());
        assert!(Morphism::from_table(z2(), &[("z1", "z1"), ("z2", ""), ("z1", "")]).is_err());
    }

    #[test]
    fn compose_cap_names_letter() {
        let a = z2();
        let f = Morphism::from_table(a, &[("z1", "z1 z2 z1"), ("z2", "z2")]).unwrap();
        let err = f.power(50, 8).unwrap_err();
        match err {
            Error::ExpansionCap { context, .. } => assert!(context.contains("z1"), "{context}"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
