//! Ordered alphabets with a level partition, run-length encoded words and
//! the Parikh map.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A letter, identified by its position in the alphabet order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u32);

impl Letter {
    pub fn new(index: usize) -> Self {
        Letter(u32::try_from(index).expect("alphabet index fits in u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Ordered alphabet partitioned into consecutive, nonempty levels.
///
/// Levels are numbered from 1. All letters of level `i` precede all letters
/// of level `i + 1`.
#[derive(Clone, Debug)]
pub struct LeveledAlphabet {
    names: Vec<String>,
    /// Exclusive end index of each level.
    level_ends: Vec<u32>,
    lookup: HashMap<String, Letter>,
}

impl PartialEq for LeveledAlphabet {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.level_ends == other.level_ends
    }
}

impl Eq for LeveledAlphabet {}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name != "ε"
        && !name
            .chars()
            .any(|c| c.is_whitespace() || c == '^' || c == '"')
}

impl LeveledAlphabet {
    pub fn new(names: Vec<String>, level_sizes: &[usize]) -> Result<Self> {
        if level_sizes.contains(&0) {
            return Err(Error::invalid("alphabet levels must be nonempty"));
        }
        let total: usize = level_sizes.iter().sum();
        if total != names.len() {
            return Err(Error::invalid(format!(
                "level sizes cover {total} letters but the alphabet has {}",
                names.len()
            )));
        }
        if u32::try_from(names.len()).is_err() {
            return Err(Error::invalid("alphabet too large"));
        }
        let mut lookup = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if !valid_name(name) {
                return Err(Error::invalid(format!("invalid letter name `{name}`")));
            }
            if lookup.insert(name.clone(), Letter::new(i)).is_some() {
                return Err(Error::invalid(format!("duplicate letter `{name}`")));
            }
        }
        let mut level_ends = Vec::with_capacity(level_sizes.len());
        let mut end = 0u32;
        for &s in level_sizes {
            end += s as u32;
            level_ends.push(end);
        }
        Ok(LeveledAlphabet {
            names,
            level_ends,
            lookup,
        })
    }

    /// Alphabet with a single level.
    pub fn flat<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::invalid("alphabet must be nonempty"));
        }
        let n = names.len();
        Self::new(names, &[n])
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, letter: Letter) -> &str {
        &self.names[letter.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.lookup.get(name).copied()
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter.index() < self.names.len()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.names.len()).map(Letter::new)
    }

    pub fn first(&self) -> Letter {
        Letter(0)
    }

    pub fn last(&self) -> Letter {
        Letter::new(self.names.len() - 1)
    }

    pub fn level_count(&self) -> usize {
        self.level_ends.len()
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        let mut prev = 0;
        self.level_ends
            .iter()
            .map(|&e| {
                let s = (e - prev) as usize;
                prev = e;
                s
            })
            .collect()
    }

    /// Index range of level `level` (1-based).
    pub fn level_range(&self, level: usize) -> Range<usize> {
        assert!(
            (1..=self.level_ends.len()).contains(&level),
            "level {level} out of range"
        );
        let start = if level == 1 {
            0
        } else {
            self.level_ends[level - 2] as usize
        };
        start..self.level_ends[level - 1] as usize
    }

    pub fn level_letters(&self, level: usize) -> impl Iterator<Item = Letter> {
        self.level_range(level).map(Letter::new)
    }

    /// Level (1-based) of `letter`.
    pub fn level_of(&self, letter: Letter) -> usize {
        self.level_ends.partition_point(|&e| e <= letter.0) + 1
    }
}

/// Run-length encoded word over a shared alphabet.
///
/// Runs have positive counts and adjacent runs carry distinct letters, so
/// the representation is unique and structural equality is word equality.
#[derive(Clone, Debug)]
pub struct Word {
    alphabet: Arc<LeveledAlphabet>,
    runs: Vec<(Letter, BigUint)>,
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        same_alphabet(&self.alphabet, &other.alphabet) && self.runs == other.runs
    }
}

impl Eq for Word {}

pub(crate) fn same_alphabet(a: &Arc<LeveledAlphabet>, b: &Arc<LeveledAlphabet>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Accumulates runs in normal form while enforcing the expansion cap.
pub(crate) struct RunBuilder {
    runs: Vec<(Letter, BigUint)>,
    cap: usize,
}

impl RunBuilder {
    pub(crate) fn new(cap: usize) -> Self {
        RunBuilder {
            runs: Vec::new(),
            cap,
        }
    }

    pub(crate) fn push(&mut self, letter: Letter, count: &BigUint) -> Result<()> {
        if count.is_zero() {
            return Ok(());
        }
        match self.runs.last_mut() {
            Some((l, c)) if *l == letter => *c += count,
            _ => {
                if self.runs.len() >= self.cap {
                    return Err(Error::ExpansionCap {
                        cap: self.cap,
                        context: String::new(),
                    });
                }
                self.runs.push((letter, count.clone()));
            }
        }
        Ok(())
    }

    pub(crate) fn push_runs(&mut self, runs: &[(Letter, BigUint)]) -> Result<()> {
        for (l, c) in runs {
            self.push(*l, c)?;
        }
        Ok(())
    }

    /// Appends `runs^k`.
    pub(crate) fn push_power(&mut self, runs: &[(Letter, BigUint)], k: &BigUint) -> Result<()> {
        match runs {
            [] => Ok(()),
            _ if k.is_zero() => Ok(()),
            [(l, c)] => self.push(*l, &(c * k)),
            _ => {
                let reps =
                    k.to_usize()
                        .filter(|&r| r <= self.cap)
                        .ok_or_else(|| Error::ExpansionCap {
                            cap: self.cap,
                            context: format!("power of a {}-run word by {k}", runs.len()),
                        })?;
                for _ in 0..reps {
                    self.push_runs(runs)?;
                }
                Ok(())
            }
        }
    }

    pub(crate) fn finish(self, alphabet: Arc<LeveledAlphabet>) -> Word {
        Word {
            alphabet,
            runs: self.runs,
        }
    }
}

impl Word {
    pub fn empty(alphabet: Arc<LeveledAlphabet>) -> Self {
        Word {
            alphabet,
            runs: Vec::new(),
        }
    }

    pub fn letter(alphabet: Arc<LeveledAlphabet>, letter: Letter) -> Self {
        Self::power_of_letter(alphabet, letter, BigUint::one())
    }

    pub fn power_of_letter(alphabet: Arc<LeveledAlphabet>, letter: Letter, count: BigUint) -> Self {
        assert!(alphabet.contains(letter), "letter outside alphabet");
        let runs = if count.is_zero() {
            Vec::new()
        } else {
            vec![(letter, count)]
        };
        Word { alphabet, runs }
    }

    /// Builds a word from arbitrary runs, merging adjacent equal letters and
    /// dropping zero counts.
    pub fn from_runs(
        alphabet: Arc<LeveledAlphabet>,
        runs: impl IntoIterator<Item = (Letter, BigUint)>,
    ) -> Result<Self> {
        let mut b = RunBuilder::new(usize::MAX);
        for (l, c) in runs {
            if !alphabet.contains(l) {
                return Err(Error::AlphabetMismatch(format!(
                    "letter index {} outside an alphabet of {} letters",
                    l.index(),
                    alphabet.len()
                )));
            }
            b.push(l, &c)?;
        }
        Ok(b.finish(alphabet))
    }

    pub fn from_letters(alphabet: Arc<LeveledAlphabet>, letters: &[Letter]) -> Result<Self> {
        Self::from_runs(alphabet, letters.iter().map(|&l| (l, BigUint::one())))
    }

    /// Parses the text form, e.g. `z1^2 z2 e^179`. The empty string and `ε`
    /// both denote the empty word.
    pub fn parse(alphabet: Arc<LeveledAlphabet>, text: &str) -> Result<Self> {
        let mut runs = Vec::new();
        for token in text.split_whitespace() {
            if token == "ε" {
                continue;
            }
            let (name, count) = match token.rsplit_once('^') {
                Some((n, c)) => (
                    n,
                    c.parse::<BigUint>()
                        .map_err(|_| Error::Parse(format!("bad run count in `{token}`")))?,
                ),
                None => (token, BigUint::one()),
            };
            let letter = alphabet
                .letter(name)
                .ok_or_else(|| Error::Parse(format!("unknown letter `{name}`")))?;
            runs.push((letter, count));
        }
        Self::from_runs(alphabet, runs)
    }

    pub fn alphabet(&self) -> &Arc<LeveledAlphabet> {
        &self.alphabet
    }

    pub fn runs(&self) -> &[(Letter, BigUint)] {
        &self.runs
    }

    pub fn run_count(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn len(&self) -> BigUint {
        self.runs.iter().map(|(_, c)| c).sum()
    }

    /// `|w|_letter`.
    pub fn count(&self, letter: Letter) -> BigUint {
        self.runs
            .iter()
            .filter(|(l, _)| *l == letter)
            .map(|(_, c)| c)
            .sum()
    }

    /// If the word is `x^k` with `k ≥ 1`, returns `(x, k)`.
    pub fn as_letter_power(&self) -> Option<(Letter, &BigUint)> {
        match self.runs.as_slice() {
            [(l, c)] => Some((*l, c)),
            _ => None,
        }
    }

    pub fn support(&self) -> BTreeSet<Letter> {
        self.runs.iter().map(|(l, _)| *l).collect()
    }

    pub fn parikh(&self) -> ParikhVector {
        let mut v = ParikhVector::default();
        for (l, c) in &self.runs {
            v.add_count(*l, c);
        }
        v
    }

    fn check_alphabet(&self, other: &Word) -> Result<()> {
        if same_alphabet(&self.alphabet, &other.alphabet) {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch(
                "words are over different alphabets".into(),
            ))
        }
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        self.check_alphabet(other)?;
        let mut b = RunBuilder::new(usize::MAX);
        b.push_runs(&self.runs)?;
        b.push_runs(&other.runs)?;
        Ok(b.finish(self.alphabet.clone()))
    }

    /// `self^k`; fails if the result would need more than `cap` runs.
    pub fn power(&self, k: &BigUint, cap: usize) -> Result<Word> {
        let mut b = RunBuilder::new(cap);
        b.push_power(&self.runs, k)?;
        Ok(b.finish(self.alphabet.clone()))
    }

    /// Expands into individual letters, refusing words longer than `cap`.
    pub fn letters(&self, cap: usize) -> Result<Vec<Letter>> {
        let len = self.len();
        let n = len
            .to_usize()
            .filter(|&n| n <= cap)
            .ok_or_else(|| Error::ExpansionCap {
                cap,
                context: format!("expanding a word of length {len}"),
            })?;
        let mut out = Vec::with_capacity(n);
        for (l, c) in &self.runs {
            let c = c.to_usize().expect("bounded by total length");
            out.extend(std::iter::repeat_n(*l, c));
        }
        Ok(out)
    }

    /// Re-addresses the word into `target` through a letter map.
    pub fn relabel(&self, target: &Arc<LeveledAlphabet>, map: impl Fn(Letter) -> Letter) -> Word {
        let mut b = RunBuilder::new(usize::MAX);
        for (l, c) in &self.runs {
            b.push(map(*l), c).expect("uncapped");
        }
        b.finish(target.clone())
    }

    /// Renders the word in text form (empty string for ε).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, (l, c)) in self.runs.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(self.alphabet.name(*l));
            if !c.is_one() {
                out.push('^');
                out.push_str(&c.to_string());
            }
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.runs.is_empty() {
            write!(f, "ε")
        } else {
            f.write_str(&self.to_text())
        }
    }
}

/// Sparse letter-count vector; zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ParikhVector {
    counts: BTreeMap<Letter, BigUint>,
}

impl ParikhVector {
    pub fn get(&self, letter: Letter) -> BigUint {
        self.counts.get(&letter).cloned().unwrap_or_default()
    }

    pub fn add_count(&mut self, letter: Letter, count: &BigUint) {
        if !count.is_zero() {
            *self.counts.entry(letter).or_default() += count;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Letter, &BigUint)> {
        self.counts.iter().map(|(l, c)| (*l, c))
    }

    pub fn total(&self) -> BigUint {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn add(&self, other: &ParikhVector) -> ParikhVector {
        let mut out = self.clone();
        for (l, c) in other.iter() {
            out.add_count(l, c);
        }
        out
    }

    pub fn support(&self) -> BTreeSet<Letter> {
        self.counts.keys().copied().collect()
    }
}

impl FromIterator<(Letter, BigUint)> for ParikhVector {
    fn from_iter<I: IntoIterator<Item = (Letter, BigUint)>>(iter: I) -> Self {
        let mut v = ParikhVector::default();
        for (l, c) in iter {
            v.add_count(l, &c);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> Arc<LeveledAlphabet> {
        Arc::new(LeveledAlphabet::flat(["z1", "z2", "e"]).unwrap())
    }

    fn w(a: &Arc<LeveledAlphabet>, s: &str) -> Word {
        Word::parse(a.clone(), s).unwrap()
    }

    #[test]
    fn parikh_counts_letters() {
        let a = abc();
        let v = w(&a, "z1 z2 z1").parikh();
        assert_eq!(v.get(Letter::new(0)), BigUint::from(2u32));
        assert_eq!(v.get(Letter::new(1)), BigUint::from(1u32));
        assert_eq!(v.len(), 2);
        assert!(Word::empty(a.clone()).parikh().is_empty());
        let big = w(&a, "e^179").parikh();
        assert_eq!(big.get(Letter::new(2)), BigUint::from(179u32));
    }

    #[test]
    fn concat_merges_boundary_runs() {
        let a = abc();
        let c = w(&a, "z1 z1").concat(&w(&a, "z1 z2")).unwrap();
        assert_eq!(
            c.runs(),
            &[(Letter::new(0), 3u32.into()), (Letter::new(1), 1u32.into())]
        );
    }

    #[test]
    fn power_examples() {
        let a = abc();
        let x = w(&a, "z1 z2");
        assert!(x.power(&BigUint::zero(), 10).unwrap().is_empty());
        let p3 = x.power(&3u32.into(), 10).unwrap();
        assert_eq!(p3.run_count(), 6);
        assert_eq!(p3, w(&a, "z1 z2 z1 z2 z1 z2"));
        // single-run words scale their count
        let e = w(&a, "e^4")
            .power(&BigUint::from(10u32).pow(30), 1)
            .unwrap();
        assert_eq!(e.len(), BigUint::from(4u32) * BigUint::from(10u32).pow(30));
        // merged boundaries: (z1 z2 z1)^2 = z1 z2 z1^2 z2 z1
        assert_eq!(
            w(&a, "z1 z2 z1")
                .power(&2u32.into(), 10)
                .unwrap()
                .run_count(),
            5
        );
    }

    #[test]
    fn power_respects_cap() {
        let a = abc();
        let err = w(&a, "z1 z2").power(&1000u32.into(), 100).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn alphabet_mismatch_detected() {
        let a = abc();
        let b = Arc::new(LeveledAlphabet::flat(["y"]).unwrap());
        assert!(matches!(
            w(&a, "z1").concat(&Word::empty(b)),
            Err(Error::AlphabetMismatch(_))
        ));
    }

    #[test]
    fn text_form_round_trip() {
        let a = abc();
        let x = w(&a, "z1^2 z2 e^179");
        assert_eq!(x.to_text(), "z1^2 z2 e^179");
        assert_eq!(w(&a, &x.to_text()), x);
        assert_eq!(Word::empty(a.clone()).to_string(), "ε");
        assert!(w(&a, "ε").is_empty());
        assert!(Word::parse(a, "q").is_err());
    }

    #[test]
    fn levels_partition_in_order() {
        let a = LeveledAlphabet::new(
            ["c0", "c1", "x", "y", "e"].map(String::from).to_vec(),
            &[3, 1, 1],
        )
        .unwrap();
        assert_eq!(a.level_count(), 3);
        assert_eq!(a.level_of(Letter::new(0)), 1);
        assert_eq!(a.level_of(Letter::new(2)), 1);
        assert_eq!(a.level_of(Letter::new(3)), 2);
        assert_eq!(a.level_of(Letter::new(4)), 3);
        assert_eq!(a.level_range(2), 3..4);
        assert!(LeveledAlphabet::new(vec!["a".into()], &[0, 1]).is_err());
        assert!(LeveledAlphabet::flat(["a", "a"]).is_err());
    }

    #[test]
    fn expansion_respects_cap() {
        let a = abc();
        assert_eq!(w(&a, "z1^2 z2").letters(3).unwrap().len(), 3);
        assert!(w(&a, "z1^2 z2").letters(2).is_err());
    }
}
