//! Linear partial difference operators with constant coefficients.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::groebner::order::grevlex_cmp;
use crate::laurent::{ExponentVector, LaurentPoly, MultiIndex, Rational};

/// `P(A_1, ..., A_n)` where `A_i` shifts the `i`-th discrete variable by one.
///
/// Stored as a Laurent polynomial in the shift symbols; the exponent vector of
/// a term is its shift. Applied to a table `g` this gives
/// `(P g)(a) = sum_s c_s * g(a + s)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiffOperator {
    poly: LaurentPoly,
}

impl DiffOperator {
    pub fn new(poly: LaurentPoly) -> Self {
        DiffOperator { poly }
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i32>, Rational)>,
    {
        LaurentPoly::from_terms(n, terms.into_iter().map(|(s, c)| (ExponentVector::new(s), c))).map(Self::new)
    }

    pub fn identity(n: usize) -> Self {
        DiffOperator::new(LaurentPoly::one(n))
    }

    pub fn n(&self) -> usize {
        self.poly.nvars()
    }

    pub fn as_poly(&self) -> &LaurentPoly {
        &self.poly
    }

    pub fn into_poly(self) -> LaurentPoly {
        self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn len(&self) -> usize {
        self.poly.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poly.is_zero()
    }

    /// Terms in lexicographic order of shift vectors.
    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Rational)> {
        self.poly.terms()
    }

    pub fn has_nonnegative_shifts(&self) -> bool {
        self.poly.is_polynomial()
    }

    /// Largest `|s_i|` over all shifts.
    pub fn max_shift_magnitude(&self) -> u32 {
        self.poly
            .terms()
            .flat_map(|(s, _)| s.entries().iter().map(|x| x.unsigned_abs()))
            .max()
            .unwrap_or(0)
    }

    /// Sum of the shift exponents of the grevlex-largest term.
    pub fn degree(&self) -> i64 {
        self.leading_shift().map_or(0, |(s, _)| s.degree())
    }

    fn leading_shift(&self) -> Option<(&ExponentVector, &Rational)> {
        self.poly
            .terms()
            .max_by(|(a, _), (b, _)| grevlex_cmp(a.entries(), b.entries()))
    }

    /// Backward form: divide by the grevlex-largest shift monomial and scale
    /// so that its coefficient becomes 1. The result may have negative
    /// shifts; its zero shift carries coefficient 1.
    pub fn good_form(&self) -> Result<DiffOperator> {
        let (lead, c) = self
            .leading_shift()
            .ok_or(Error::ZeroPolynomial("good_form"))?;
        let inv_shift = lead.checked_neg()?;
        self.poly
            .mul_monomial(&inv_shift, &c.recip())
            .map(DiffOperator::new)
    }

    /// Shifts every term so that all shifts are nonnegative and at least one
    /// term has a zero entry in each coordinate.
    pub fn forward_form(&self) -> Result<DiffOperator> {
        let Some((lo, _)) = self.poly.exponent_bounds() else {
            return Ok(self.clone());
        };
        let shift = ExponentVector::new(lo).checked_neg()?;
        self.poly
            .mul_monomial(&shift, &Rational::one())
            .map(DiffOperator::new)
    }

    /// Primitive integer scaling with positive grevlex-leading coefficient.
    pub fn normalized(&self) -> DiffOperator {
        let Some((_, lc)) = self.leading_shift() else {
            return self.clone();
        };
        let scale = crate::groebner::primitive_scale(self.poly.terms().map(|(_, c)| c), lc.is_negative());
        DiffOperator::new(self.poly.scale(&scale))
    }

    /// `sum_s c_s * g(a + s)`.
    pub fn apply<F>(&self, a: &MultiIndex, mut g: F) -> Result<Rational>
    where
        F: FnMut(&MultiIndex) -> Result<Rational>,
    {
        if a.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: a.len(),
            });
        }
        let mut acc = Rational::zero();
        for (s, c) in self.poly.terms() {
            let point = a.shifted(s.entries()).ok_or_else(|| {
                Error::OutOfDomain(
                    a.entries()
                        .iter()
                        .zip(s.entries())
                        .map(|(&x, &y)| x as i64 + y as i64)
                        .collect(),
                )
            })?;
            acc += c * g(&point)?;
        }
        Ok(acc)
    }

    /// True if `a + s` stays in the nonnegative orthant for every shift `s`.
    pub fn admissible_at(&self, a: &MultiIndex) -> bool {
        self.poly.terms().all(|(s, _)| a.shifted(s.entries()).is_some())
    }

    /// Canonical text in the shift symbols (lexicographic term order).
    pub fn to_canonical_string(&self, names: &[impl AsRef<str>]) -> String {
        self.poly.to_string_with(names)
    }

    /// Human-oriented text: highest degree first, earlier symbols first.
    pub fn to_pretty_string(&self, names: &[impl AsRef<str>]) -> String {
        let mut terms: Vec<_> = self.poly.terms().collect();
        terms.sort_by(|(a, _), (b, _)| pretty_cmp(a.entries(), b.entries()));
        let mut p = String::new();
        for (idx, (e, c)) in terms.into_iter().enumerate() {
            let single = LaurentPoly::monomial(self.n(), e.clone(), c.abs()).expect("length matches");
            let body = single.to_string_with(names);
            match (idx, c.is_negative()) {
                (0, true) => p.push('-'),
                (0, false) => {}
                (_, true) => p.push_str(" - "),
                (_, false) => p.push_str(" + "),
            }
            p.push_str(&body);
        }
        if p.is_empty() {
            p.push('0');
        }
        p
    }
}

fn pretty_cmp(a: &[i32], b: &[i32]) -> Ordering {
    let deg = |v: &[i32]| v.iter().map(|&x| x as i64).sum::<i64>();
    deg(b)
        .cmp(&deg(a))
        .then_with(|| {
            let abs = |v: &[i32]| v.iter().map(|x| x.unsigned_abs()).collect::<Vec<_>>();
            abs(b).cmp(&abs(a))
        })
        .then_with(|| a.cmp(b))
}

/// Default shift-symbol names `A1..An`.
pub fn default_shift_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("A{i}")).collect()
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_pretty_string(&default_shift_names(self.n())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::tests::q;

    fn op(n: usize, terms: &[(&[i32], i64)]) -> DiffOperator {
        DiffOperator::from_terms(n, terms.iter().map(|(s, c)| (s.to_vec(), q(*c)))).unwrap()
    }

    #[test]
    fn good_form_examples() {
        let p = op(2, &[(&[1, 1], 1), (&[1, 0], -1), (&[0, 1], -1)]);
        assert_eq!(
            p.good_form().unwrap(),
            op(2, &[(&[0, 0], 1), (&[-1, 0], -1), (&[0, -1], -1)])
        );
        assert_eq!(
            op(1, &[(&[1], 1), (&[0], -1)]).good_form().unwrap(),
            op(1, &[(&[0], 1), (&[-1], -1)])
        );
        assert_eq!(
            op(1, &[(&[2], 3), (&[0], -3)]).good_form().unwrap(),
            op(1, &[(&[0], 1), (&[-2], -1)])
        );
        assert!(matches!(
            DiffOperator::new(LaurentPoly::zero(2)).good_form(),
            Err(Error::ZeroPolynomial(_))
        ));
    }

    #[test]
    fn good_form_is_scale_invariant() {
        let p = op(2, &[(&[1, 1], 1), (&[1, 0], -1), (&[0, 1], -1)]);
        let scaled = DiffOperator::new(p.as_poly().scale(&Rational::new((-7).into(), 3.into())));
        assert_eq!(scaled.good_form().unwrap(), p.good_form().unwrap());
    }

    #[test]
    fn forward_form_undoes_good_form() {
        let p = op(2, &[(&[1, 1], 1), (&[1, 0], -1), (&[0, 1], -1)]);
        assert_eq!(p.good_form().unwrap().forward_form().unwrap(), p);
    }

    #[test]
    fn apply_examples() {
        let multinomial = |a: &MultiIndex| Ok(crate::dyson::multinomial(a).into());
        let p = op(2, &[(&[1, 1], 1), (&[1, 0], -1), (&[0, 1], -1)]);
        let a = MultiIndex::new(vec![1, 1]);
        assert_eq!(p.apply(&a, multinomial).unwrap(), q(0));
        let g = |a: &MultiIndex| Ok(q(a.total() as i64 * 10 + 3));
        assert_eq!(DiffOperator::identity(2).apply(&a, g).unwrap(), q(23));
        let good = p.good_form().unwrap();
        assert_eq!(good.apply(&MultiIndex::new(vec![2, 2]), multinomial).unwrap(), q(0));
        assert!(matches!(
            good.apply(&MultiIndex::new(vec![0, 2]), multinomial),
            Err(Error::OutOfDomain(_))
        ));
        assert!(!good.admissible_at(&MultiIndex::new(vec![0, 2])));
        assert!(good.admissible_at(&MultiIndex::new(vec![1, 1])));
    }

    #[test]
    fn pretty_printing() {
        let p = op(2, &[(&[1, 1], 1), (&[1, 0], -1), (&[0, 1], -1)]);
        assert_eq!(p.to_string(), "A1 * A2 - A1 - A2");
        assert_eq!(p.good_form().unwrap().to_string(), "1 - A1^-1 - A2^-1");
        assert_eq!(p.to_canonical_string(&default_shift_names(2)), "-A2 - A1 + A1 * A2");
    }

    #[test]
    fn normalized_is_primitive_with_positive_lead() {
        let p = DiffOperator::from_terms(
            1,
            vec![(vec![1], Rational::new((-3).into(), 2.into())), (vec![0], q(3))],
        )
        .unwrap();
        assert_eq!(p.normalized(), op(1, &[(&[1], 1), (&[0], -2)]));
    }
}
