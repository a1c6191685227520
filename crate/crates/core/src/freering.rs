//! The free unitary associative ring over the integers on countably many
//! variables `x1, x2, ...`.
//!
//! Elements are finite integer combinations of words. Coefficients are
//! arbitrary precision, so nothing here can overflow.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::RingError;

/// A word in the variables, stored as the sequence of variable indices.
///
/// The empty word is the unit. Ordering is length first, then
/// lexicographic on indices; this is the order used for every coordinate
/// basis in the crate.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(i: u32) -> Self {
        Self::new(vec![i])
    }

    /// Panics if any index is zero.
    pub fn new(word: Vec<u32>) -> Self {
        assert!(word.iter().all(|&i| i >= 1), "variable indices start at 1");
        Monomial(word)
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_unit()
    }

    pub fn concat(&self, other: &Monomial) -> Monomial {
        let mut w = Vec::with_capacity(self.0.len() + other.0.len());
        w.extend_from_slice(&self.0);
        w.extend_from_slice(&other.0);
        Monomial(w)
    }

    /// Pure lexicographic comparison (a proper prefix is smaller).
    pub fn lex_cmp(&self, other: &Monomial) -> Ordering {
        self.0.cmp(&other.0)
    }

    pub fn multidegree(&self) -> MultiDegree {
        multidegree(self)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            write!(f, "x{i}")?;
        }
        Ok(())
    }
}

/// Exponent vector of a monomial: how many times each variable occurs.
///
/// Only strictly positive exponents are stored.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct MultiDegree(BTreeMap<u32, u32>);

impl MultiDegree {
    pub fn zero() -> Self {
        MultiDegree(BTreeMap::new())
    }

    /// Builds a multidegree from `(variable, exponent)` pairs. Zero
    /// exponents are dropped and repeated variables accumulate.
    pub fn from_pairs<I: IntoIterator<Item = (u32, u32)>>(pairs: I) -> Self {
        let mut m = BTreeMap::new();
        for (v, e) in pairs {
            assert!(v >= 1, "variable indices start at 1");
            if e > 0 {
                *m.entry(v).or_insert(0) += e;
            }
        }
        MultiDegree(m)
    }

    /// Exponent one on each of `x1..xn`.
    pub fn multilinear(n: u32) -> Self {
        Self::from_pairs((1..=n).map(|i| (i, 1)))
    }

    pub fn get(&self, var: u32) -> u32 {
        self.0.get(&var).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.0.iter().map(|(&v, &e)| (v, e))
    }

    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.keys().copied()
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn max_var(&self) -> u32 {
        self.0.keys().next_back().copied().unwrap_or(0)
    }

    /// Every exponent is at most one.
    pub fn is_multilinear(&self) -> bool {
        self.0.values().all(|&e| e == 1)
    }

    /// Entrywise difference, or `None` if some exponent would go negative.
    pub fn checked_sub(&self, other: &MultiDegree) -> Option<MultiDegree> {
        let mut out = self.0.clone();
        for (&v, &e) in &other.0 {
            let cur = out.get_mut(&v)?;
            if *cur < e {
                return None;
            }
            *cur -= e;
            if *cur == 0 {
                out.remove(&v);
            }
        }
        Some(MultiDegree(out))
    }

    /// All multidegrees supported on `x1..x_max_var` with total degree at
    /// most `max_total`, in increasing order.
    pub fn all_bounded(max_var: u32, max_total: u32) -> Vec<MultiDegree> {
        fn rec(var: u32, max_var: u32, left: u32, cur: &mut Vec<(u32, u32)>, out: &mut Vec<MultiDegree>) {
            if var > max_var {
                out.push(MultiDegree::from_pairs(cur.iter().copied()));
                return;
            }
            for e in 0..=left {
                cur.push((var, e));
                rec(var + 1, max_var, left - e, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(1, max_var, max_total, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

impl Add for &MultiDegree {
    type Output = MultiDegree;
    fn add(self, rhs: &MultiDegree) -> MultiDegree {
        MultiDegree::from_pairs(self.iter().chain(rhs.iter()))
    }
}

impl fmt::Debug for MultiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (v, e)) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}:{e}")?;
        }
        f.write_str("}")
    }
}

pub fn multidegree(m: &Monomial) -> MultiDegree {
    MultiDegree::from_pairs(m.letters().iter().map(|&i| (i, 1)))
}

/// An element of the free ring: a finite map from words to nonzero integers.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::term(c, Monomial::unit())
    }

    pub fn var(i: u32) -> Self {
        Self::from_monomial(Monomial::var(i))
    }

    pub fn from_monomial(m: Monomial) -> Self {
        Self::term(1, m)
    }

    pub fn term(c: impl Into<BigInt>, m: Monomial) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    /// Sums `(coefficient, word)` pairs, merging repeats.
    pub fn from_terms<I, C>(it: I) -> Self
    where
        I: IntoIterator<Item = (C, Monomial)>,
        C: Into<BigInt>,
    {
        let mut p = Poly::zero();
        for (c, m) in it {
            p.add_term(m, c.into());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (length, then lex) order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, k: &BigInt) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Multidegree shared by every term, or `None` if the element is zero
    /// or not multihomogeneous.
    pub fn homogeneous_degree(&self) -> Option<MultiDegree> {
        let mut it = self.terms.keys();
        let d = multidegree(it.next()?);
        it.all(|m| multidegree(m) == d).then_some(d)
    }

    pub fn is_multihomogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    /// Splits into multihomogeneous parts, keyed by multidegree.
    pub fn components(&self) -> BTreeMap<MultiDegree, Poly> {
        let mut out: BTreeMap<MultiDegree, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(multidegree(m))
                .or_default()
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// Largest word in pure lexicographic order.
    pub fn lex_leading_monomial(&self) -> Option<&Monomial> {
        self.terms.keys().max_by(|a, b| a.lex_cmp(b))
    }

    /// Flip the sign so that the first term (canonical order) is positive.
    pub fn sign_normalized(&self) -> Poly {
        match self.terms.values().next() {
            Some(c) if c.is_negative() => -self,
            _ => self.clone(),
        }
    }

    pub fn max_var(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|m| m.letters().iter().copied())
            .max()
            .unwrap_or(0)
    }
}

impl From<Monomial> for Poly {
    fn from(m: Monomial) -> Self {
        Poly::from_monomial(m)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Canonical text: terms in canonical order, `<coeff>*x<i>*...`, unit
/// coefficients omitted, the unit word printed as `1`.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if m.is_unit() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self -= &rhs;
        self
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(mut self) -> Poly {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(a.concat(b), ca * cb);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

pub fn add(p: &Poly, q: &Poly) -> Poly {
    p + q
}

pub fn mul(p: &Poly, q: &Poly) -> Poly {
    p * q
}

/// `[a, b] = ab - ba`.
pub fn bracket(a: &Poly, b: &Poly) -> Poly {
    &(a * b) - &(b * a)
}

/// Left-normed commutator `[a1, ..., an] = [[a1, ..., a(n-1)], an]`.
///
/// A single argument is returned unchanged; an empty list is an error.
pub fn commutator(args: &[Poly]) -> Result<Poly, RingError> {
    let (first, rest) = args.split_first().ok_or(RingError::EmptyCommutator)?;
    Ok(rest.iter().fold(first.clone(), |acc, a| bracket(&acc, a)))
}

/// Left-normed commutator of words.
pub fn monomial_commutator(words: &[Monomial]) -> Result<Poly, RingError> {
    let (first, rest) = words.split_first().ok_or(RingError::EmptyCommutator)?;
    // Working on (word, coeff) lists avoids map churn for the common case.
    let mut acc: Vec<(Monomial, i64)> = vec![(first.clone(), 1)];
    for w in rest {
        let mut next = Vec::with_capacity(acc.len() * 2);
        for (m, c) in &acc {
            next.push((m.concat(w), *c));
            next.push((w.concat(m), -*c));
        }
        acc = next;
    }
    Ok(Poly::from_terms(acc.into_iter().map(|(m, c)| (c, m))))
}

pub fn project_component(p: &Poly, mu: &MultiDegree) -> Poly {
    Poly {
        terms: p
            .terms
            .iter()
            .filter(|(m, _)| multidegree(m) == *mu)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect(),
    }
}

/// Image under the ring endomorphism sending `x_i` to `sigma[i]`.
///
/// Variables without an entry in `sigma` are left fixed.
pub fn substitute(p: &Poly, sigma: &BTreeMap<u32, Poly>) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in &p.terms {
        let mut img = Poly::constant(c.clone());
        for i in m.letters() {
            match sigma.get(i) {
                Some(q) => img = &img * q,
                None => img = &img * &Poly::var(*i),
            }
            if img.is_zero() {
                break;
            }
        }
        out += &img;
    }
    out
}

/// Endomorphism sending `x_i` to the unit and fixing every other variable.
pub fn nu(p: &Poly, i: u32) -> Poly {
    Poly::from_terms(p.terms.iter().map(|(m, c)| {
        let w: Vec<u32> = m.letters().iter().copied().filter(|&j| j != i).collect();
        (c.clone(), Monomial(w))
    }))
}

/// Projection killing every variable with index greater than `m`.
pub fn xi(p: &Poly, m: u32) -> Poly {
    Poly {
        terms: p
            .terms
            .iter()
            .filter(|(w, _)| w.letters().iter().all(|&j| j <= m))
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: u32) -> Poly {
        Poly::var(i)
    }

    fn comm(ps: &[Poly]) -> Poly {
        commutator(ps).unwrap()
    }

    #[test]
    fn additive_inverse_cancels() {
        assert!((&x(1) + &(-&x(1))).is_zero());
    }

    #[test]
    fn add_keeps_noncommuting_words_apart() {
        let p = &(&x(1) * &x(2)) + &(&x(2) * &x(1));
        assert_eq!(p.len(), 2);
        assert!(p.terms().all(|(_, c)| c.is_one()));
    }

    #[test]
    fn coefficients_accumulate() {
        let m = Monomial::new(vec![1, 2]);
        let p = &Poly::term(2, m.clone()) + &Poly::term(3, m.clone());
        assert_eq!(p, Poly::term(5, m));
    }

    #[test]
    fn product_is_concatenation() {
        assert_eq!(&x(1) * &x(2), Poly::from_monomial(Monomial::new(vec![1, 2])));
        let p = &(&x(1) + &x(2)) * &(&x(1) - &x(2));
        assert_eq!(p.to_string(), "x1*x1 - x1*x2 + x2*x1 - x2*x2");
        let q = &x(3) - &Poly::constant(4);
        assert_eq!(&Poly::one() * &q, q);
    }

    #[test]
    fn commutator_basics() {
        assert_eq!(comm(&[x(1), x(2)]).to_string(), "x1*x2 - x2*x1");
        let p = &x(1) + &(&x(2) * &x(3));
        assert!(comm(&[p.clone(), p.clone()]).is_zero());
        assert_eq!(comm(std::slice::from_ref(&p)), p);
        assert_eq!(commutator(&[]), Err(RingError::EmptyCommutator));
        let jacobi = &(&comm(&[x(1), x(2), x(3)]) + &comm(&[x(2), x(3), x(1)])) + &comm(&[x(3), x(1), x(2)]);
        assert!(jacobi.is_zero());
    }

    #[test]
    fn monomial_commutator_matches_general() {
        let ws = [Monomial::new(vec![1, 2]), Monomial::new(vec![3]), Monomial::new(vec![2, 4, 1])];
        let ps: Vec<Poly> = ws.iter().cloned().map(Poly::from).collect();
        assert_eq!(monomial_commutator(&ws).unwrap(), comm(&ps));
    }

    #[test]
    fn multidegree_counts() {
        let d = multidegree(&Monomial::new(vec![1, 3, 1]));
        assert_eq!(d, MultiDegree::from_pairs([(1, 2), (3, 1)]));
        assert_eq!(d.total(), 3);
        assert_eq!(multidegree(&Monomial::unit()), MultiDegree::zero());
        let d5 = multidegree(&Monomial::new(vec![1, 2, 3, 4, 5]));
        assert_eq!(d5, MultiDegree::multilinear(5));
        assert!(d5.is_multilinear());
    }

    #[test]
    fn projection_and_decomposition() {
        let p = &(&x(1) * &x(2)) + &(&x(1) * &x(1));
        assert_eq!(
            project_component(&p, &MultiDegree::from_pairs([(1, 1), (2, 1)])),
            &x(1) * &x(2)
        );
        let sum = p.components().values().fold(Poly::zero(), |a, q| &a + q);
        assert_eq!(sum, p);
        let v = &comm(&[x(1), x(2), x(3)]) * &comm(&[x(4), x(5)]);
        assert_eq!(project_component(&v, &MultiDegree::multilinear(5)), v);
    }

    #[test]
    fn substitution_examples() {
        let swap: BTreeMap<u32, Poly> = [(1, x(2)), (2, x(1))].into_iter().collect();
        assert_eq!(substitute(&(&x(1) * &x(2)), &swap), &x(2) * &x(1));
        let lin: BTreeMap<u32, Poly> = [(1, &x(3) + &x(4)), (2, x(2))].into_iter().collect();
        assert_eq!(
            substitute(&comm(&[x(1), x(2)]), &lin),
            &comm(&[x(3), x(2)]) + &comm(&[x(4), x(2)])
        );
        let v = &comm(&[x(1), x(2), x(3)]) * &comm(&[x(4), x(5)]);
        let id: BTreeMap<u32, Poly> = (1..=5).map(|i| (i, x(i))).collect();
        assert_eq!(substitute(&v, &id), v);
    }

    #[test]
    fn nu_examples() {
        let p = Poly::from_monomial(Monomial::new(vec![1, 2, 1]));
        assert_eq!(nu(&p, 1), x(2));
        assert!(nu(&comm(&[x(1), x(2)]), 1).is_zero());
        let f = &x(1) * &comm(&[x(5), x(2), x(3), x(4)]);
        assert_eq!(nu(&f, 1), comm(&[x(5), x(2), x(3), x(4)]));
    }

    #[test]
    fn xi_examples() {
        assert!(xi(&(&x(1) * &x(5)), 4).is_zero());
        assert_eq!(xi(&(&x(1) * &x(2)), 4), &x(1) * &x(2));
        let s = &comm(&[x(1), x(2), x(4)]) * &comm(&[x(6), x(9)]);
        assert!(xi(&s, 4).is_zero());
    }

    #[test]
    fn display_forms() {
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!(Poly::one().to_string(), "1");
        assert_eq!(Poly::constant(-1).to_string(), "-1");
        let p = &Poly::term(-3, Monomial::new(vec![2])) + &Poly::constant(7);
        assert_eq!(p.to_string(), "7 - 3*x2");
    }

    #[test]
    fn bounded_multidegrees() {
        // Compositions of totals 0..=2 into 2 slots: 1 + 2 + 3.
        assert_eq!(MultiDegree::all_bounded(2, 2).len(), 6);
        assert_eq!(MultiDegree::all_bounded(5, 5).len(), 252);
    }
}
