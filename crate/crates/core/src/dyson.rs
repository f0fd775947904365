//! The Dyson product `F(x; a) = prod_{i != j} (1 - x_i/x_j)^{a_j}`, its
//! constant term `G(a)`, and the pieces of Good's proof that `G(a)` equals the
//! multinomial coefficient.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::{product_coeff, ExponentVector, LaurentPoly, MultiIndex, Rational};
use crate::limits::ResourceLimits;
use crate::operator::DiffOperator;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DysonInstance {
    n: usize,
    a: MultiIndex,
}

impl DysonInstance {
    pub fn new(a: MultiIndex) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidInput("a Dyson instance needs n >= 1".into()));
        }
        Ok(DysonInstance { n: a.len(), a })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &MultiIndex {
        &self.a
    }
}

/// `R_j = prod_{i != j} (1 - x_i/x_j)` in `n` variables, `j` 1-based.
pub fn dyson_factor(n: usize, j: usize) -> Result<LaurentPoly> {
    if j == 0 || j > n {
        return Err(Error::IndexOutOfRange { index: j, len: n });
    }
    let mut r = LaurentPoly::one(n);
    for i in (1..=n).filter(|&i| i != j) {
        r = r.mul(&one_minus_ratio(n, i, j))?;
    }
    Ok(r)
}

/// `1 - x_i/x_j`, 1-based indices.
fn one_minus_ratio(n: usize, i: usize, j: usize) -> LaurentPoly {
    let mut e = vec![0; n];
    e[i - 1] += 1;
    e[j - 1] -= 1;
    let mut p = LaurentPoly::one(n);
    p.add_term(ExponentVector::new(e), -Rational::one());
    p
}

/// Fully expanded `F(x; a)`.
pub fn dyson_product(inst: &DysonInstance, limits: &ResourceLimits) -> Result<LaurentPoly> {
    let n = inst.n;
    let mut f = LaurentPoly::one(n);
    for (j, &aj) in inst.a.entries().iter().enumerate() {
        if aj == 0 {
            continue;
        }
        let rj = dyson_factor(n, j + 1)?.pow(aj)?;
        f = f.mul(&rj)?;
        limits.start().check_terms(f.len(), Default::default)?;
    }
    Ok(f)
}

/// `(a_1 + ... + a_n)! / (a_1! ... a_n!)`.
pub fn multinomial(a: &MultiIndex) -> BigInt {
    // product of binomials C(a_1 + ... + a_k, a_k)
    let mut total: u64 = 0;
    let mut acc = BigInt::one();
    for &ak in a.entries() {
        for i in 1..=ak as u64 {
            acc *= total + i;
            acc /= i;
        }
        total += ak as u64;
    }
    acc
}

/// `G(a)` by expanding the Dyson product; the reference oracle for every
/// other evaluator. Partial products that can no longer reach the zero
/// exponent are discarded during expansion.
pub fn dyson_ct_bruteforce(inst: &DysonInstance, limits: &ResourceLimits) -> Result<Rational> {
    let n = inst.n;
    let factors: Vec<LaurentPoly> = (1..=n).map(|j| dyson_factor(n, j)).collect::<Result<_>>()?;
    let with_powers: Vec<(&LaurentPoly, u32)> = factors.iter().zip(inst.a.entries().iter().copied()).collect();
    product_coeff(n, &with_powers, &ExponentVector::zero(n), limits.max_terms)
}

/// One step taken by the recursive evaluator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    /// `G(0) = 1`.
    Base,
    /// `a_j = 0`: drop coordinate `j` (0-based).
    Delete { a: Vec<u32>, j: usize },
    /// All `a_j > 0`: `G(a) = sum_j G(a - e_j)`.
    Sum { a: Vec<u32> },
}

/// Memoized evaluator of `G` through the three rules of Good's proof:
/// `G(0) = 1`; a zero entry is deleted; otherwise `G(a) = sum_j G(a - e_j)`.
///
/// Values are memoized by the sorted exponent vector, relying on the
/// permutation symmetry of `G`.
#[derive(Debug, Default)]
pub struct RecursiveEvaluator {
    memo: HashMap<Vec<u32>, BigInt>,
    trace: Option<Vec<Step>>,
}

impl RecursiveEvaluator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_trace() -> Self {
        RecursiveEvaluator {
            memo: HashMap::new(),
            trace: Some(Vec::new()),
        }
    }

    pub fn trace(&self) -> &[Step] {
        self.trace.as_deref().unwrap_or(&[])
    }

    pub fn eval(&mut self, a: &[u32]) -> BigInt {
        if let Some(j) = a.iter().position(|&x| x == 0) {
            // smallest zero index first
            if let Some(t) = self.trace.as_mut() {
                t.push(Step::Delete { a: a.to_vec(), j });
            }
            let mut rest = a.to_vec();
            rest.remove(j);
            return self.eval(&rest);
        }
        if a.is_empty() {
            if let Some(t) = self.trace.as_mut() {
                t.push(Step::Base);
            }
            return BigInt::one();
        }
        let mut key = a.to_vec();
        key.sort_unstable();
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        if let Some(t) = self.trace.as_mut() {
            t.push(Step::Sum { a: a.to_vec() });
        }
        let mut sum = BigInt::zero();
        let mut shifted = a.to_vec();
        for j in 0..a.len() {
            shifted[j] -= 1;
            sum += self.eval(&shifted);
            shifted[j] += 1;
        }
        self.memo.insert(key, sum.clone());
        sum
    }
}

/// `G(a)` via the recursion.
pub fn dyson_ct_recursive(inst: &DysonInstance) -> Rational {
    Rational::from_integer(RecursiveEvaluator::new().eval(inst.a.entries()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DysonRow {
    #[serde(serialize_with = "crate::certificate::ser_multi_index")]
    pub a: MultiIndex,
    #[serde(serialize_with = "crate::certificate::ser_rational")]
    pub brute: Rational,
    #[serde(serialize_with = "crate::certificate::ser_rational")]
    pub recursive: Rational,
    #[serde(serialize_with = "crate::certificate::ser_bigint")]
    pub multinomial: BigInt,
    pub ok: bool,
}

impl fmt::Display for DysonRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a={} brute={} recursive={} multinomial={} {}",
            self.a,
            self.brute,
            self.recursive,
            self.multinomial,
            if self.ok { "OK" } else { "FAIL" }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DysonReport {
    pub n: usize,
    pub amax: u32,
    pub rows: Vec<DysonRow>,
    pub pass: bool,
    #[serde(serialize_with = "crate::certificate::ser_opt_multi_index")]
    pub first_failure: Option<MultiIndex>,
}

impl fmt::Display for DysonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(f, "{row}")?;
        }
        match &self.first_failure {
            None => write!(f, "PASS: {} instances (n={}, amax={})", self.rows.len(), self.n, self.amax),
            Some(a) => write!(f, "FAIL: first mismatch at a={a}"),
        }
    }
}

/// Cross-checks all three evaluations of `G(a)` at one point.
pub fn dyson_row(a: &MultiIndex, limits: &ResourceLimits, eval: &mut RecursiveEvaluator) -> Result<DysonRow> {
    let inst = DysonInstance::new(a.clone())?;
    let brute = dyson_ct_bruteforce(&inst, limits)?;
    let recursive = Rational::from_integer(eval.eval(a.entries()));
    let m = multinomial(a);
    let ok = brute == recursive && recursive == Rational::from_integer(m.clone());
    Ok(DysonRow {
        a: a.clone(),
        brute,
        recursive,
        multinomial: m,
        ok,
    })
}

/// Checks brute force = recursion = multinomial on every `a` in `{0..=amax}^n`.
pub fn dyson_verify(n: usize, amax: u32, limits: &ResourceLimits) -> Result<DysonReport> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let mut eval = RecursiveEvaluator::new();
    let rows = MultiIndex::grid(n, amax)
        .map(|a| dyson_row(&a, limits, &mut eval))
        .collect::<Result<Vec<_>>>()?;
    let first_failure = rows.iter().find(|r| !r.ok).map(|r| r.a.clone());
    Ok(DysonReport {
        n,
        amax,
        pass: first_failure.is_none(),
        rows,
        first_failure,
    })
}

/// `num / den` with no reduction to lowest terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyFraction {
    pub num: LaurentPoly,
    pub den: LaurentPoly,
}

impl PolyFraction {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroPolynomial("fraction denominator"));
        }
        Ok(PolyFraction { num, den })
    }

    pub fn add(&self, other: &PolyFraction) -> Result<PolyFraction> {
        let num = self.num.mul(&other.den)?.add(&other.num.mul(&self.den)?)?;
        let den = self.den.mul(&other.den)?;
        Ok(PolyFraction { num, den })
    }

    pub fn mul(&self, other: &PolyFraction) -> Result<PolyFraction> {
        Ok(PolyFraction {
            num: self.num.mul(&other.num)?,
            den: self.den.mul(&other.den)?,
        })
    }

    /// `a/b == c/d` iff `a*d == c*b`.
    pub fn equals(&self, other: &PolyFraction) -> Result<bool> {
        Ok(self.num.mul(&other.den)? == other.num.mul(&self.den)?)
    }
}

/// Exact check of `sum_j prod_{i != j} (1 - x_j/x_i)^{-1} = 1`.
pub fn lagrange_check(n: usize, limits: &ResourceLimits) -> Result<bool> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let budget = limits.start();
    let mut sum: Option<PolyFraction> = None;
    for j in 1..=n {
        let mut den = LaurentPoly::one(n);
        for i in (1..=n).filter(|&i| i != j) {
            den = den.mul(&one_minus_ratio(n, j, i))?;
        }
        let term = PolyFraction::new(LaurentPoly::one(n), den)?;
        sum = Some(match sum {
            None => term,
            Some(s) => s.add(&term)?,
        });
        let s = sum.as_ref().expect("just set");
        budget.check_terms(s.num.len().max(s.den.len()), Default::default)?;
        budget.check_time(Default::default)?;
    }
    let sum = sum.expect("n >= 1");
    Ok(sum.num == sum.den)
}

/// `1 - sum_i A_i^{-1}`.
pub fn dyson_operator(n: usize) -> DiffOperator {
    let mut terms = vec![(vec![0; n], Rational::one())];
    for i in 0..n {
        let mut s = vec![0; n];
        s[i] = -1;
        terms.push((s, -Rational::one()));
    }
    DiffOperator::from_terms(n, terms).expect("lengths match")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::tests::{poly, q};

    fn inst(a: &[u32]) -> DysonInstance {
        DysonInstance::new(MultiIndex::new(a.to_vec())).unwrap()
    }

    fn lim() -> ResourceLimits {
        ResourceLimits::default()
    }

    #[test]
    fn factor_examples() {
        assert_eq!(dyson_factor(2, 2).unwrap(), poly(2, &[(&[0, 0], 1), (&[1, -1], -1)]));
        assert_eq!(dyson_factor(1, 1).unwrap(), LaurentPoly::one(1));
        assert_eq!(
            dyson_factor(3, 1).unwrap(),
            poly(3, &[(&[0, 0, 0], 1), (&[-1, 1, 0], -1), (&[-1, 0, 1], -1), (&[-2, 1, 1], 1)])
        );
        assert!(dyson_factor(3, 0).is_err());
        assert!(dyson_factor(3, 4).is_err());
        for n in 1..=5 {
            for j in 1..=n {
                assert!(dyson_factor(n, j).unwrap().is_homogeneous_degree0());
            }
        }
    }

    #[test]
    fn product_examples() {
        assert_eq!(
            dyson_product(&inst(&[1, 1]), &lim()).unwrap(),
            poly(2, &[(&[0, 0], 2), (&[1, -1], -1), (&[-1, 1], -1)])
        );
        assert_eq!(dyson_product(&inst(&[0, 0]), &lim()).unwrap(), LaurentPoly::one(2));
        assert_eq!(
            dyson_product(&inst(&[2, 1]), &lim()).unwrap(),
            poly(2, &[(&[0, 0], 3), (&[1, -1], -1), (&[-1, 1], -3), (&[-2, 2], 1)])
        );
        let tight = ResourceLimits {
            max_terms: 3,
            ..lim()
        };
        assert!(dyson_product(&inst(&[3, 3]), &tight).unwrap_err().is_resource_limit());
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial(&MultiIndex::new(vec![1, 1])), BigInt::from(2));
        assert_eq!(multinomial(&MultiIndex::new(vec![0, 0, 0])), BigInt::from(1));
        assert_eq!(multinomial(&MultiIndex::new(vec![2, 1, 1])), BigInt::from(12));
        assert_eq!(multinomial(&MultiIndex::new(vec![])), BigInt::from(1));
    }

    #[test]
    fn multinomial_matches_factorial_formula() {
        let fact = |k: u64| (1..=k).fold(BigInt::one(), |acc, i| acc * i);
        for a in MultiIndex::grid(3, 4) {
            let den = a.entries().iter().fold(BigInt::one(), |acc, &x| acc * fact(x as u64));
            assert_eq!(multinomial(&a), fact(a.total()) / den);
        }
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(dyson_ct_bruteforce(&inst(&[1, 1]), &lim()).unwrap(), q(2));
        assert_eq!(dyson_ct_bruteforce(&inst(&[0, 5]), &lim()).unwrap(), q(1));
        assert_eq!(dyson_ct_bruteforce(&inst(&[1, 1, 1]), &lim()).unwrap(), q(6));
    }

    #[test]
    fn pruned_expansion_matches_full_product() {
        for a in MultiIndex::grid(3, 2) {
            let i = DysonInstance::new(a).unwrap();
            assert_eq!(
                dyson_ct_bruteforce(&i, &lim()).unwrap(),
                dyson_product(&i, &lim()).unwrap().constant_term()
            );
        }
    }

    #[test]
    fn recursive_examples() {
        assert_eq!(dyson_ct_recursive(&inst(&[1, 1])), q(2));
        assert_eq!(dyson_ct_recursive(&inst(&[7])), q(1));
        assert_eq!(dyson_ct_recursive(&inst(&[1, 1, 1])), q(6));
    }

    #[test]
    fn recursion_only_sums_when_all_entries_positive() {
        let mut eval = RecursiveEvaluator::with_trace();
        for a in MultiIndex::grid(3, 3) {
            eval.eval(a.entries());
        }
        assert!(!eval.trace().is_empty());
        for step in eval.trace() {
            match step {
                Step::Sum { a } => assert!(a.iter().all(|&x| x > 0), "{a:?}"),
                Step::Delete { a, j } => {
                    assert_eq!(a[*j], 0);
                    assert!(a[..*j].iter().all(|&x| x > 0), "smallest zero index first");
                }
                Step::Base => {}
            }
        }
    }

    /// Plain recursion deleting the largest zero index first, without memo.
    fn recurse_last_zero_first(a: &[u32]) -> BigInt {
        if let Some(j) = a.iter().rposition(|&x| x == 0) {
            let mut rest = a.to_vec();
            rest.remove(j);
            return recurse_last_zero_first(&rest);
        }
        if a.is_empty() {
            return BigInt::one();
        }
        (0..a.len())
            .map(|j| {
                let mut b = a.to_vec();
                b[j] -= 1;
                recurse_last_zero_first(&b)
            })
            .sum()
    }

    #[test]
    fn deletion_order_does_not_matter() {
        let mut eval = RecursiveEvaluator::new();
        for a in MultiIndex::grid(4, 2) {
            assert_eq!(eval.eval(a.entries()), recurse_last_zero_first(a.entries()));
        }
    }

    #[test]
    fn verify_examples() {
        let r = dyson_verify(2, 2, &lim()).unwrap();
        assert!(r.pass);
        assert_eq!(r.rows.len(), 9);
        let r = dyson_verify(1, 5, &lim()).unwrap();
        assert!(r.pass);
        assert!(r.rows.iter().all(|row| row.brute == q(1)));
        let r = dyson_verify(3, 2, &lim()).unwrap();
        assert!(r.pass);
        assert_eq!(r.rows.len(), 27);
        assert_eq!(
            r.rows[13].to_string(),
            "a=(1,1,1) brute=6 recursive=6 multinomial=6 OK"
        );
    }

    #[test]
    fn lagrange_examples() {
        assert!(lagrange_check(1, &lim()).unwrap());
        assert!(lagrange_check(2, &lim()).unwrap());
        assert!(lagrange_check(3, &lim()).unwrap());
    }

    #[test]
    fn lagrange_two_variables_by_hand() {
        // x2/(x2 - x1) + x1/(x1 - x2) = 1
        let a = PolyFraction::new(poly(2, &[(&[0, 1], 1)]), poly(2, &[(&[0, 1], 1), (&[1, 0], -1)])).unwrap();
        let b = PolyFraction::new(poly(2, &[(&[1, 0], 1)]), poly(2, &[(&[1, 0], 1), (&[0, 1], -1)])).unwrap();
        let one = PolyFraction::new(LaurentPoly::one(2), LaurentPoly::one(2)).unwrap();
        assert!(a.add(&b).unwrap().equals(&one).unwrap());
        assert!(!a.equals(&one).unwrap());
        assert!(PolyFraction::new(LaurentPoly::one(2), LaurentPoly::zero(2)).is_err());
    }

    #[test]
    fn dyson_operator_examples() {
        let two = dyson_operator(2);
        assert_eq!(
            two,
            DiffOperator::from_terms(2, vec![(vec![0, 0], q(1)), (vec![-1, 0], q(-1)), (vec![0, -1], q(-1))]).unwrap()
        );
        assert_eq!(
            dyson_operator(1),
            DiffOperator::from_terms(1, vec![(vec![0], q(1)), (vec![-1], q(-1))]).unwrap()
        );
        let three = dyson_operator(3);
        assert_eq!(three.len(), 4);
        let mut coeffs: Vec<_> = three.terms().map(|(_, c)| c.clone()).collect();
        coeffs.sort();
        assert_eq!(coeffs, vec![q(-1), q(-1), q(-1), q(1)]);
    }

    #[test]
    fn dyson_operator_annihilates_multinomial_table() {
        for n in 1..=4 {
            let p = dyson_operator(n);
            for a in MultiIndex::box_grid(n, 1, 3) {
                let r = p.apply(&a, |b| Ok(multinomial(b).into())).unwrap();
                assert!(r.is_zero(), "n={n} a={a}");
            }
        }
    }
}
