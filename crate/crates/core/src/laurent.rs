//! Exact sparse multivariate Laurent polynomials over the rationals.
//!
//! A [`LaurentPoly`] is a finite map from signed exponent vectors to nonzero
//! rationals. Terms are kept in a `BTreeMap`, so iteration, printing and
//! hashing all see the lexicographic order on exponent vectors.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Signed exponents, one per variable of the ambient ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector(Vec<i32>);

impl ExponentVector {
    pub fn new(entries: Vec<i32>) -> Self {
        ExponentVector(entries)
    }

    pub fn zero(nvars: usize) -> Self {
        ExponentVector(vec![0; nvars])
    }

    /// The `i`-th unit vector (0-based), scaled by `k`.
    pub fn unit(nvars: usize, i: usize, k: i32) -> Self {
        let mut v = vec![0; nvars];
        v[i] = k;
        ExponentVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[i32] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<i32> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn checked_add(&self, other: &ExponentVector) -> Result<ExponentVector> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b).ok_or(Error::ExponentOverflow))
            .collect::<Result<Vec<_>>>()
            .map(ExponentVector)
    }

    pub fn checked_neg(&self) -> Result<ExponentVector> {
        self.0
            .iter()
            .map(|a| a.checked_neg().ok_or(Error::ExponentOverflow))
            .collect::<Result<Vec<_>>>()
            .map(ExponentVector)
    }

    pub fn checked_scale(&self, k: u32) -> Result<ExponentVector> {
        let k = i32::try_from(k).map_err(|_| Error::ExponentOverflow)?;
        self.0
            .iter()
            .map(|a| a.checked_mul(k).ok_or(Error::ExponentOverflow))
            .collect::<Result<Vec<_>>>()
            .map(ExponentVector)
    }
}

impl From<Vec<i32>> for ExponentVector {
    fn from(v: Vec<i32>) -> Self {
        ExponentVector(v)
    }
}

impl std::ops::Index<usize> for ExponentVector {
    type Output = i32;

    fn index(&self, i: usize) -> &i32 {
        &self.0[i]
    }
}

/// A vector of nonnegative integers `(a_1, ..., a_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&a| a as u64).sum()
    }

    /// `self + shift`, or `None` if some entry would become negative.
    pub fn shifted(&self, shift: &[i32]) -> Option<MultiIndex> {
        self.0
            .iter()
            .zip(shift)
            .map(|(&a, &s)| u32::try_from(a as i64 + s as i64).ok())
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// All indices of `{0..=bound}^n` in lexicographic order.
    pub fn grid(n: usize, bound: u32) -> impl Iterator<Item = MultiIndex> {
        Self::box_grid(n, 0, bound)
    }

    /// All indices of `{lo..=hi}^n` in lexicographic order.
    pub fn box_grid(n: usize, lo: u32, hi: u32) -> impl Iterator<Item = MultiIndex> {
        let mut next = (lo <= hi).then(|| vec![lo; n]);
        std::iter::from_fn(move || {
            let current = next.take()?;
            let mut succ = current.clone();
            for i in (0..n).rev() {
                if succ[i] < hi {
                    succ[i] += 1;
                    next = Some(succ);
                    break;
                }
                succ[i] = lo;
            }
            Some(MultiIndex(current))
        })
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// Sparse Laurent polynomial in `nvars` variables with exact rational
/// coefficients. No stored coefficient is ever zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<ExponentVector, Rational>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial_unchecked(ExponentVector::zero(nvars), c)
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, Rational::from_integer(BigInt::from(c)))
    }

    /// The variable `x_i` (0-based index).
    pub fn var(nvars: usize, i: usize) -> Result<Self> {
        if i >= nvars {
            return Err(Error::IndexOutOfRange {
                index: i + 1,
                len: nvars,
            });
        }
        Ok(Self::monomial_unchecked(
            ExponentVector::unit(nvars, i, 1),
            Rational::one(),
        ))
    }

    pub fn monomial(nvars: usize, exps: ExponentVector, c: Rational) -> Result<Self> {
        if exps.len() != nvars {
            return Err(Error::mismatch(nvars, exps.len()));
        }
        Ok(Self::monomial_unchecked(exps, c))
    }

    fn monomial_unchecked(exps: ExponentVector, c: Rational) -> Self {
        let nvars = exps.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        LaurentPoly { nvars, terms }
    }

    /// Builds a polynomial from (exponents, coefficient) pairs, summing
    /// repeated exponents and dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentVector, Rational)>,
    {
        let mut p = LaurentPoly::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::mismatch(nvars, e.len()));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, e: ExponentVector, c: Rational) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(e, c)| e.is_zero() && c.is_one())
    }

    /// Terms in lexicographic order of exponent vectors.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExponentVector, &Rational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (ExponentVector, Rational)> {
        self.terms.into_iter()
    }

    /// The single term of a monomial, or `None` for zero and multi-term values.
    pub fn as_monomial(&self) -> Option<(&ExponentVector, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// True if no exponent is negative.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.entries().iter().all(|&k| k >= 0))
    }

    fn check_dims(&self, other: &LaurentPoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::mismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    pub fn add(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> LaurentPoly {
        if k.is_zero() {
            return LaurentPoly::zero(self.nvars);
        }
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_dims(other)?;
        let mut out = LaurentPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1.checked_add(e2)?, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Multiplication by a single monomial `c * x^e`.
    pub fn mul_monomial(&self, e: &ExponentVector, c: &Rational) -> Result<LaurentPoly> {
        if e.len() != self.nvars {
            return Err(Error::mismatch(self.nvars, e.len()));
        }
        if c.is_zero() {
            return Ok(LaurentPoly::zero(self.nvars));
        }
        let terms = self
            .terms
            .iter()
            .map(|(e1, c1)| Ok((e1.checked_add(e)?, c1 * c)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(LaurentPoly {
            nvars: self.nvars,
            terms,
        })
    }

    /// `self^k` by binary exponentiation; `p^0 = 1` for every `p`.
    pub fn pow(&self, k: u32) -> Result<LaurentPoly> {
        let mut result = LaurentPoly::one(self.nvars);
        if k == 0 {
            return Ok(result);
        }
        if let Some((e, c)) = self.as_monomial() {
            return LaurentPoly::monomial(self.nvars, e.checked_scale(k)?, num_traits::pow(c.clone(), k as usize));
        }
        let mut base = self.clone();
        let mut k = k;
        loop {
            if k & 1 == 1 {
                result = result.mul(&base)?;
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = base.mul(&base)?;
        }
        Ok(result)
    }

    /// Multiplicative inverse of a monomial; `None` for anything else.
    pub fn monomial_inverse(&self) -> Option<Result<LaurentPoly>> {
        let (e, c) = self.as_monomial()?;
        Some(e.checked_neg().map(|ne| LaurentPoly::monomial_unchecked(ne, c.recip())))
    }

    pub fn coeff(&self, e: &ExponentVector) -> Result<Rational> {
        if e.len() != self.nvars {
            return Err(Error::mismatch(self.nvars, e.len()));
        }
        Ok(self.terms.get(e).cloned().unwrap_or_else(Rational::zero))
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&ExponentVector::zero(self.nvars))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_homogeneous_degree0(&self) -> bool {
        self.terms.keys().all(|e| e.degree() == 0)
    }

    /// Sets `x_i = 1` (1-based `i`) and deletes that coordinate.
    pub fn substitute_one(&self, i: usize) -> Result<LaurentPoly> {
        if i == 0 || i > self.nvars {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.nvars,
            });
        }
        let mut out = LaurentPoly::zero(self.nvars - 1);
        for (e, c) in &self.terms {
            let mut v = e.entries().to_vec();
            v.remove(i - 1);
            out.add_term(ExponentVector(v), c.clone());
        }
        Ok(out)
    }

    /// Re-embeds into a ring with `nvars` variables; variable `k` of `self`
    /// becomes variable `positions[k]`.
    pub fn embed(&self, nvars: usize, positions: &[usize]) -> Result<LaurentPoly> {
        if positions.len() != self.nvars {
            return Err(Error::mismatch(self.nvars, positions.len()));
        }
        if let Some(&bad) = positions.iter().find(|&&p| p >= nvars) {
            return Err(Error::IndexOutOfRange {
                index: bad + 1,
                len: nvars,
            });
        }
        let mut out = LaurentPoly::zero(nvars);
        for (e, c) in &self.terms {
            let mut v = vec![0; nvars];
            for (k, &p) in positions.iter().enumerate() {
                v[p] += e[k];
            }
            out.add_term(ExponentVector(v), c.clone());
        }
        Ok(out)
    }

    /// Per-coordinate (min, max) exponents; `None` for the zero polynomial.
    pub fn exponent_bounds(&self) -> Option<(Vec<i32>, Vec<i32>)> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let mut lo = first.entries().to_vec();
        let mut hi = lo.clone();
        for e in it {
            for (k, &x) in e.entries().iter().enumerate() {
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
        }
        Some((lo, hi))
    }

    /// Canonical text form using the given variable names.
    pub fn to_string_with(&self, names: &[impl AsRef<str>]) -> String {
        let mut out = String::new();
        if self.terms.is_empty() {
            out.push('0');
            return out;
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let abs = c.abs();
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || e.is_zero() {
                factors.push(abs.to_string());
            }
            for (k, &x) in e.entries().iter().enumerate() {
                match x {
                    0 => {}
                    1 => factors.push(names[k].as_ref().to_string()),
                    _ => factors.push(format!("{}^{}", names[k].as_ref(), x)),
                }
            }
            out.push_str(&factors.join(" * "));
        }
        out
    }
}

/// Default variable names `x1..xn`.
pub fn default_var_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(&default_var_names(self.nvars)))
    }
}

/// Coefficient of `x^target` in `prod factors[i].0 ^ factors[i].1`, computed by
/// expanding the product one factor at a time and discarding partial terms that
/// the remaining factors can no longer move onto `target`.
///
/// The discarding uses per-coordinate exponent ranges of the remaining factors,
/// which contain the support of their product, so the result is exact.
pub fn product_coeff(
    nvars: usize,
    factors: &[(&LaurentPoly, u32)],
    target: &ExponentVector,
    max_terms: usize,
) -> Result<Rational> {
    if target.len() != nvars {
        return Err(Error::mismatch(nvars, target.len()));
    }
    let mut seq: Vec<&LaurentPoly> = Vec::new();
    for &(p, k) in factors {
        if p.nvars != nvars {
            return Err(Error::mismatch(nvars, p.nvars));
        }
        if k > 0 && p.is_zero() {
            return Ok(Rational::zero());
        }
        seq.extend(std::iter::repeat_n(p, k as usize));
    }

    // suffix[t] bounds the exponents contributed by seq[t..]
    let mut suffix_lo = vec![vec![0i64; nvars]; seq.len() + 1];
    let mut suffix_hi = vec![vec![0i64; nvars]; seq.len() + 1];
    for t in (0..seq.len()).rev() {
        let (lo, hi) = seq[t].exponent_bounds().expect("nonzero factor");
        for k in 0..nvars {
            suffix_lo[t][k] = suffix_lo[t + 1][k] + lo[k] as i64;
            suffix_hi[t][k] = suffix_hi[t + 1][k] + hi[k] as i64;
        }
    }

    let reachable = |e: &ExponentVector, t: usize| {
        (0..nvars).all(|k| {
            let x = e[k] as i64;
            let goal = target[k] as i64;
            x + suffix_lo[t][k] <= goal && goal <= x + suffix_hi[t][k]
        })
    };

    let mut acc: BTreeMap<ExponentVector, Rational> = BTreeMap::new();
    acc.insert(ExponentVector::zero(nvars), Rational::one());
    if !reachable(&ExponentVector::zero(nvars), 0) {
        return Ok(Rational::zero());
    }
    for (t, f) in seq.iter().enumerate() {
        let mut next = LaurentPoly::zero(nvars);
        for (e1, c1) in &acc {
            for (e2, c2) in &f.terms {
                let e = e1.checked_add(e2)?;
                if reachable(&e, t + 1) {
                    next.add_term(e, c1 * c2);
                }
            }
        }
        if next.len() > max_terms {
            return Err(Error::ResourceLimit {
                kind: crate::error::LimitKind::Terms,
                progress: crate::error::Progress {
                    largest_poly: next.len(),
                    ..Default::default()
                },
            });
        }
        acc = next.terms;
    }
    Ok(acc.remove(target).unwrap_or_else(Rational::zero))
}
