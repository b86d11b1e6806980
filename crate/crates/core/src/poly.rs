//! Exact multivariate polynomials with nonnegative big-integer coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exponent vector ordered graded-lexicographically: total degree first,
/// then lexicographic on the exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Grlex(Vec<u32>);

impl Grlex {
    fn degree(&self) -> u64 {
        self.0.iter().map(|&a| u64::from(a)).sum()
    }
}

impl Ord for Grlex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Grlex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A single term `coeff · x1^a1 ⋯ xt^at`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub coeff: BigUint,
    pub exponents: Vec<u32>,
}

impl Monomial {
    pub fn degree(&self) -> u64 {
        self.exponents.iter().map(|&a| u64::from(a)).sum()
    }
}

/// Polynomial in canonical form: monomials sorted by graded-lex exponent
/// order, no duplicate exponent vectors, no zero coefficients.
///
/// Because the form is canonical, derived equality is polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    arity: usize,
    monomials: Vec<Monomial>,
}

fn check_arity(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::ArityMismatch { expected, found })
    }
}

impl Polynomial {
    /// Builds a polynomial from arbitrary terms, merging like terms and
    /// dropping zero coefficients.
    pub fn from_terms<I>(arity: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BigUint, Vec<u32>)>,
    {
        if arity == 0 {
            return Err(Error::invalid("polynomial arity must be at least 1"));
        }
        let mut acc: BTreeMap<Grlex, BigUint> = BTreeMap::new();
        for (coeff, exponents) in terms {
            check_arity(arity, exponents.len())?;
            if coeff.is_zero() {
                continue;
            }
            *acc.entry(Grlex(exponents)).or_default() += coeff;
        }
        Ok(Self::from_map(arity, acc))
    }

    fn from_map(arity: usize, acc: BTreeMap<Grlex, BigUint>) -> Self {
        let monomials = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, coeff)| Monomial {
                coeff,
                exponents: e.0,
            })
            .collect();
        Polynomial { arity, monomials }
    }

    pub fn zero(arity: usize) -> Self {
        assert!(arity > 0, "polynomial arity must be at least 1");
        Polynomial {
            arity,
            monomials: Vec::new(),
        }
    }

    pub fn constant(arity: usize, value: impl Into<BigUint>) -> Self {
        Self::from_terms(arity, [(value.into(), vec![0; arity])])
            .expect("arity checked by construction")
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, 1u32)
    }

    /// The variable `x_{index+1}` (0-based `index`).
    pub fn variable(arity: usize, index: usize) -> Result<Self> {
        if index >= arity {
            return Err(Error::invalid(format!(
                "variable index {index} out of range for arity {arity}"
            )));
        }
        let mut exps = vec![0; arity];
        exps[index] = 1;
        Self::from_terms(arity, [(BigUint::one(), exps)])
    }

    /// Single monomial `coeff · x^exponents`.
    pub fn monomial(coeff: impl Into<BigUint>, exponents: Vec<u32>) -> Result<Self> {
        Self::from_terms(exponents.len(), [(coeff.into(), exponents)])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.monomials
            .iter()
            .map(Monomial::degree)
            .max()
            .unwrap_or(0)
    }

    /// Largest exponent of any single variable.
    pub fn max_exponent(&self) -> u32 {
        self.monomials
            .iter()
            .flat_map(|m| m.exponents.iter().copied())
            .max()
            .unwrap_or(0)
    }

    fn to_map(&self) -> BTreeMap<Grlex, BigUint> {
        self.monomials
            .iter()
            .map(|m| (Grlex(m.exponents.clone()), m.coeff.clone()))
            .collect()
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        check_arity(self.arity, other.arity)?;
        let mut acc = self.to_map();
        for m in &other.monomials {
            *acc.entry(Grlex(m.exponents.clone())).or_default() += &m.coeff;
        }
        Ok(Self::from_map(self.arity, acc))
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        check_arity(self.arity, other.arity)?;
        let mut acc: BTreeMap<Grlex, BigUint> = BTreeMap::new();
        for a in &self.monomials {
            for b in &other.monomials {
                let exps = a
                    .exponents
                    .iter()
                    .zip(&b.exponents)
                    .map(|(x, y)| x + y)
                    .collect();
                *acc.entry(Grlex(exps)).or_default() += &a.coeff * &b.coeff;
            }
        }
        Ok(Self::from_map(self.arity, acc))
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut result = Polynomial::one(self.arity);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base).expect("same arity");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("same arity");
            }
        }
        result
    }

    /// Substitutes `args[i]` for `x_{i+1}` and expands.
    pub fn compose(&self, args: &[Polynomial]) -> Result<Polynomial> {
        check_arity(self.arity, args.len())?;
        let inner = args
            .first()
            .map(|a| a.arity)
            .ok_or_else(|| Error::invalid("compose needs at least one argument"))?;
        for a in args {
            check_arity(inner, a.arity)?;
        }
        // Powers of each argument are shared across monomials.
        let mut powers: Vec<Vec<Polynomial>> = args
            .iter()
            .map(|a| vec![Polynomial::one(inner), a.clone()])
            .collect();
        let mut result = Polynomial::zero(inner);
        for m in &self.monomials {
            let mut term = Polynomial::constant(inner, m.coeff.clone());
            for (i, &e) in m.exponents.iter().enumerate() {
                let cache = &mut powers[i];
                while cache.len() <= e as usize {
                    let next = cache.last().unwrap().mul(&args[i])?;
                    cache.push(next);
                }
                if e > 0 {
                    term = term.mul(&cache[e as usize])?;
                }
            }
            result = result.add(&term)?;
        }
        Ok(result)
    }

    /// Exact value at `point`.
    pub fn eval(&self, point: &[BigUint]) -> Result<BigUint> {
        if point.len() != self.arity {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, polynomial has arity {}",
                point.len(),
                self.arity
            )));
        }
        let mut total = BigUint::zero();
        for m in &self.monomials {
            let mut term = m.coeff.clone();
            for (x, &e) in point.iter().zip(&m.exponents) {
                if e > 0 {
                    term *= num_traits::pow(x.clone(), e as usize);
                }
            }
            total += term;
        }
        Ok(total)
    }

    /// Convenience wrapper over [`Polynomial::eval`] for machine integers.
    pub fn eval_u64(&self, point: &[u64]) -> Result<BigUint> {
        let point: Vec<BigUint> = point.iter().map(|&x| BigUint::from(x)).collect();
        self.eval(&point)
    }

    /// Parses a sum of monomials such as `x1^2 + 2*x1*x2 + 3`.
    pub fn parse(arity: usize, text: &str) -> Result<Polynomial> {
        let mut terms = Vec::new();
        for raw in text.split('+') {
            let raw = raw.trim();
            if raw.is_empty() {
                return Err(Error::Parse(format!("empty term in `{text}`")));
            }
            let mut coeff = BigUint::one();
            let mut exps = vec![0u32; arity];
            for factor in raw.split('*') {
                let factor = factor.trim();
                if let Some(var) = factor.strip_prefix('x') {
                    let (idx, exp) = match var.split_once('^') {
                        Some((i, e)) => (i, e.trim().parse::<u32>()),
                        None => (var, Ok(1)),
                    };
                    let idx: usize = idx
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad variable `{factor}`")))?;
                    let exp =
                        exp.map_err(|_| Error::Parse(format!("bad exponent in `{factor}`")))?;
                    if idx == 0 || idx > arity {
                        return Err(Error::Parse(format!(
                            "variable `{factor}` out of range for arity {arity}"
                        )));
                    }
                    exps[idx - 1] += exp;
                } else {
                    let c: BigUint = factor
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad factor `{factor}`")))?;
                    coeff *= c;
                }
            }
            terms.push((coeff, exps));
        }
        Polynomial::from_terms(arity, terms)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return write!(f, "0");
        }
        for (i, m) in self.monomials.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = m
                .exponents
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(j, &e)| {
                    if e == 1 {
                        format!("x{}", j + 1)
                    } else {
                        format!("x{}^{}", j + 1, e)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", m.coeff)?;
            } else if m.coeff.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", m.coeff, vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// The pairing polynomial `C2(x, y) = (x + y)^2 + x`.
///
/// For `s = x + y` its values on positive pairs lie in `[s^2 + 1, s^2 + s - 1]`,
/// so bands for different `s` are disjoint and `C2` is injective on `Z+^2`.
pub fn pairing() -> Polynomial {
    Polynomial::parse(2, "x1^2 + 2*x1*x2 + x2^2 + x1").expect("static polynomial")
}

/// The `k`-ary nesting `C_k(x1..xk) = C2(C_{k-1}(x1..x_{k-1}), xk)`.
pub fn injective_tupling(k: usize) -> Result<Polynomial> {
    if k < 2 {
        return Err(Error::invalid(format!(
            "injective tupling needs k >= 2, got {k}"
        )));
    }
    let c2 = pairing();
    let mut acc = Polynomial::variable(k, 0)?;
    for i in 1..k {
        acc = c2.compose(&[acc, Polynomial::variable(k, i)?])?;
    }
    Ok(acc)
}

/// Inverts [`pairing`]: returns `(x, y)` with `C2(x, y) = z`, if any.
pub fn unpair(z: &BigUint) -> Option<(BigUint, BigUint)> {
    let s = z.sqrt();
    let s2 = &s * &s;
    if *z <= s2 {
        return None;
    }
    let x = z - &s2;
    if x >= s {
        return None;
    }
    let y = &s - &x;
    Some((x, y))
}

/// Inverts [`injective_tupling`]`(k)` on its image.
pub fn untuple(k: usize, z: &BigUint) -> Option<Vec<BigUint>> {
    if k < 2 {
        return None;
    }
    let mut out = Vec::with_capacity(k);
    let mut cur = z.clone();
    for _ in 1..k {
        let (x, y) = unpair(&cur)?;
        out.push(y);
        cur = x;
    }
    if cur.is_zero() {
        return None;
    }
    out.push(cur);
    out.reverse();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(arity: usize, s: &str) -> Polynomial {
        Polynomial::parse(arity, s).unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn add_merges_like_terms() {
        let x = p(1, "x1");
        assert_eq!(x.add(&x).unwrap(), p(1, "2*x1"));
        assert_eq!(x.add(&Polynomial::zero(1)).unwrap(), x);
    }

    #[test]
    fn add_hand_expansion_matches_evaluation() {
        let sum = p(2, "x1^2 + x2").add(&p(2, "x2 + 3")).unwrap();
        assert_eq!(sum, p(2, "x1^2 + 2*x2 + 3"));
        for (a, b) in [(1u64, 1u64), (2, 7), (9, 4), (13, 1), (100, 55)] {
            let direct = big(a * a + b) + big(b + 3);
            assert_eq!(sum.eval_u64(&[a, b]).unwrap(), direct);
        }
    }

    #[test]
    fn mul_examples() {
        let s = p(2, "x1 + x2");
        assert_eq!(s.mul(&s).unwrap(), p(2, "x1^2 + 2*x1*x2 + x2^2"));
        assert_eq!(s.mul(&Polynomial::one(2)).unwrap(), s);
        assert!(s.mul(&Polynomial::zero(2)).unwrap().is_zero());
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        let err = p(1, "x1").add(&p(2, "x2")).unwrap_err();
        assert!(matches!(
            err,
            Error::ArityMismatch {
                expected: 1,
                found: 2
            }
        ));
        assert!(p(1, "x1").mul(&p(2, "x2")).is_err());
        assert!(p(2, "x1").compose(&[p(1, "x1")]).is_err());
        assert!(p(2, "x1").eval_u64(&[1]).is_err());
    }

    #[test]
    fn compose_examples() {
        assert_eq!(
            p(2, "x1 + x2").compose(&[p(1, "x1"), p(1, "x1")]).unwrap(),
            p(1, "2*x1")
        );
        assert_eq!(
            p(1, "x1^2").compose(&[p(1, "x1 + 1")]).unwrap(),
            p(1, "x1^2 + 2*x1 + 1")
        );
        assert_eq!(
            pairing().compose(&[p(2, "x1"), p(2, "x2")]).unwrap(),
            p(2, "x1^2 + 2*x1*x2 + x2^2 + x1")
        );
    }

    #[test]
    fn eval_examples() {
        assert_eq!(p(2, "x1^2*x2").eval_u64(&[3, 4]).unwrap(), big(36));
        assert_eq!(Polynomial::zero(3).eval_u64(&[5, 6, 7]).unwrap(), big(0));
        assert_eq!(
            p(2, "x1^2 + 2*x1*x2 + x2^2 + x1")
                .eval_u64(&[1, 1])
                .unwrap(),
            big(5)
        );
    }

    #[test]
    fn tupling_values() {
        assert_eq!(
            injective_tupling(2).unwrap().eval_u64(&[1, 2]).unwrap(),
            big(10)
        );
        assert_eq!(
            injective_tupling(3).unwrap().eval_u64(&[1, 2, 3]).unwrap(),
            big(179)
        );
        assert!(injective_tupling(1).is_err());
    }

    #[test]
    fn tupling_injective_on_small_box() {
        let c = injective_tupling(2).unwrap();
        let mut seen = std::collections::HashSet::new();
        for x in 1..=25u64 {
            for y in 1..=25u64 {
                assert!(seen.insert(c.eval_u64(&[x, y]).unwrap()));
            }
        }
        assert_eq!(seen.len(), 625);
    }

    #[test]
    fn untuple_inverts() {
        let c = injective_tupling(4).unwrap();
        let v = c.eval_u64(&[1, 4, 2, 4]).unwrap();
        assert_eq!(
            untuple(4, &v).unwrap(),
            vec![big(1), big(4), big(2), big(4)]
        );
        // 5 = C2(1, 1); 4 is not in the image
        assert_eq!(unpair(&big(5)), Some((big(1), big(1))));
        assert_eq!(unpair(&big(4)), None);
    }

    #[test]
    fn display_round_trips_through_parse() {
        let q = p(3, "3*x1^2*x3 + x2 + 7 + x1*x2");
        assert_eq!(Polynomial::parse(3, &q.to_string()).unwrap(), q);
    }

    #[test]
    fn canonical_order_is_graded_lex() {
        let q = p(2, "x1^2 + x2 + 1 + x1");
        let exps: Vec<_> = q.monomials().iter().map(|m| m.exponents.clone()).collect();
        assert_eq!(exps, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![2, 0]]);
    }
}
