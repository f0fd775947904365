//! Pure recurrences for `F(x; a) = prod_i R_i(x)^{a_i}`.
//!
//! `F` is annihilated by the operators `A_i - R_i`, where `A_i` shifts `a_i`.
//! Eliminating the `x` variables from the ideal they generate leaves
//! operators `P(A_1, ..., A_n)` with constant coefficients. Such an operator
//! is free of `x`, so it annihilates every coefficient of `F` as a function of
//! `a`, the constant term included.
//!
//! The Laurent ring is modelled by adjoining `y_k` with `x_k y_k = 1`. The
//! working ring is ordered `x_1..x_m, y_1..y_m, A_1..A_n`, where `m = n`, or
//! `m = n - 1` when the last variable is dehomogenized away.

use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Progress, Result};
use crate::expr_parse::{parse_laurent, validate_var_names, ExprSource};
use crate::groebner::{self, IdealBasis, OrderSpec};
use crate::laurent::{default_var_names, product_coeff, ExponentVector, LaurentPoly, MultiIndex, Rational};
use crate::limits::ResourceLimits;

pub use crate::operator::{default_shift_names, DiffOperator};

/// Default verification grid `{0..=3}^n`.
pub const DEFAULT_GRID: u32 = 3;

/// The input `R_1, ..., R_n` together with display names for `x_1..x_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnihilatorSpec {
    n: usize,
    r: Vec<LaurentPoly>,
    var_names: Vec<String>,
    dehomogenize: bool,
}

impl AnnihilatorSpec {
    pub fn new(r: Vec<LaurentPoly>) -> Result<Self> {
        let n = r.len();
        Self::with_names(r, default_var_names(n))
    }

    pub fn with_names(r: Vec<LaurentPoly>, var_names: Vec<String>) -> Result<Self> {
        let n = r.len();
        if n == 0 {
            return Err(Error::InvalidInput("at least one R_i is required".into()));
        }
        if var_names.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: var_names.len(),
            });
        }
        validate_var_names(&var_names)?;
        for ri in &r {
            if ri.nvars() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: ri.nvars(),
                });
            }
            if ri.is_zero() {
                return Err(Error::ZeroPolynomial("R_i"));
            }
        }
        Ok(AnnihilatorSpec {
            n,
            r,
            var_names,
            dehomogenize: false,
        })
    }

    /// Parses each `R_i` over `var_names`.
    pub fn parse(exprs: &[impl AsRef<str>], var_names: Vec<String>) -> Result<Self> {
        let r = exprs
            .iter()
            .map(|e| parse_laurent(&ExprSource::new(e.as_ref(), var_names.clone())?).map_err(Error::from))
            .collect::<Result<Vec<_>>>()?;
        Self::with_names(r, var_names)
    }

    /// Work with `x_n = 1` (valid for degree-0 inputs only).
    pub fn dehomogenized(mut self, on: bool) -> Result<Self> {
        if on && !self.is_homogeneous_degree0() {
            return Err(Error::InvalidInput(
                "dehomogenization requires every R_i to be homogeneous of degree 0".into(),
            ));
        }
        self.dehomogenize = on;
        Ok(self)
    }

    /// The Dyson spec: `R_j = prod_{i != j} (1 - x_i/x_j)`.
    pub fn dyson(n: usize) -> Result<Self> {
        let r = (1..=n).map(|j| crate::dyson::dyson_factor(n, j)).collect::<Result<Vec<_>>>()?;
        Self::new(r)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> &[LaurentPoly] {
        &self.r
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn is_dehomogenized(&self) -> bool {
        self.dehomogenize
    }

    pub fn is_homogeneous_degree0(&self) -> bool {
        self.r.iter().all(LaurentPoly::is_homogeneous_degree0)
    }

    /// Canonical text of each `R_i`.
    pub fn r_strings(&self) -> Vec<String> {
        self.r.iter().map(|p| p.to_string_with(&self.var_names)).collect()
    }

    pub fn ring(&self) -> OperatorRing {
        OperatorRing::new(self)
    }
}

/// Variable layout of the working ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorRing {
    n: usize,
    m: usize,
    names: Vec<String>,
}

impl OperatorRing {
    fn new(spec: &AnnihilatorSpec) -> Self {
        let n = spec.n;
        let m = if spec.dehomogenize { n - 1 } else { n };
        let xs: Vec<String> = spec.var_names[..m].to_vec();
        let taken = |prefix: &str| {
            (1..=n).any(|k| spec.var_names.iter().any(|v| *v == format!("{prefix}{k}")))
        };
        let mut y = String::from("y");
        while taken(&y) {
            y.push('y');
        }
        let mut a = String::from("A");
        while taken(&a) {
            a.push('A');
        }
        let mut names = xs.clone();
        names.extend((1..=m).map(|k| format!("{y}{k}")));
        names.extend((1..=n).map(|k| format!("{a}{k}")));
        OperatorRing { n, m, names }
    }

    pub fn nvars(&self) -> usize {
        2 * self.m + self.n
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn shift_names(&self) -> &[String] {
        &self.names[2 * self.m..]
    }

    /// Indices of the `x` and `y` variables.
    pub fn eliminated(&self) -> Vec<usize> {
        (0..2 * self.m).collect()
    }

    pub fn shift_index(&self, i: usize) -> usize {
        2 * self.m + i
    }

    pub fn elimination_order(&self) -> OrderSpec {
        OrderSpec::elimination(self.nvars(), &self.eliminated())
    }

    /// Embeds an operator with nonnegative shifts.
    pub fn embed_operator(&self, p: &DiffOperator) -> Result<LaurentPoly> {
        if p.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: p.n(),
            });
        }
        if !p.has_nonnegative_shifts() {
            return Err(Error::InvalidInput("operator must have nonnegative shifts".into()));
        }
        let positions: Vec<usize> = (0..self.n).map(|i| self.shift_index(i)).collect();
        p.as_poly().embed(self.nvars(), &positions)
    }

    /// Reads a polynomial free of `x` and `y` as an operator.
    pub fn extract_operator(&self, p: &LaurentPoly) -> Option<DiffOperator> {
        let mut terms = Vec::with_capacity(p.len());
        for (e, c) in p.terms() {
            if e.entries()[..2 * self.m].iter().any(|&k| k != 0) {
                return None;
            }
            terms.push((e.entries()[2 * self.m..].to_vec(), c.clone()));
        }
        DiffOperator::from_terms(self.n, terms).ok()
    }
}

/// `m_i A_i - m_i R_i` for each `i` (with `m_i` the least `x`-monomial
/// clearing the negative powers of `R_i`), followed by `x_k y_k - 1`.
pub fn build_generators(spec: &AnnihilatorSpec) -> Result<IdealBasis> {
    let ring = spec.ring();
    let m = ring.m;
    let nvars = ring.nvars();
    let x_positions: Vec<usize> = (0..m).collect();
    let mut gens = Vec::with_capacity(spec.n + m);
    for (i, ri) in spec.r.iter().enumerate() {
        let ri = if spec.dehomogenize {
            ri.substitute_one(spec.n)?
        } else {
            ri.clone()
        };
        let (lo, _) = ri.exponent_bounds().ok_or(Error::ZeroPolynomial("R_i"))?;
        let clear = ExponentVector::new(lo.iter().map(|&k| (-k).max(0)).collect());
        let cleared = ri.mul_monomial(&clear, &Rational::from_integer(1.into()))?;
        debug_assert!(cleared.is_polynomial());
        let mut shift_term = vec![0; nvars];
        for (k, &e) in clear.entries().iter().enumerate() {
            shift_term[k] = e;
        }
        shift_term[ring.shift_index(i)] = 1;
        let lhs = LaurentPoly::monomial(nvars, ExponentVector::new(shift_term), Rational::from_integer(1.into()))?;
        let g = lhs.sub(&cleared.embed(nvars, &x_positions)?)?;
        gens.push(g);
    }
    for k in 0..m {
        let mut e = vec![0; nvars];
        e[k] = 1;
        e[m + k] = 1;
        let mut g = LaurentPoly::monomial(nvars, ExponentVector::new(e), Rational::from_integer(1.into()))?;
        g.add_term(ExponentVector::zero(nvars), Rational::from_integer((-1).into()));
        gens.push(g);
    }
    IdealBasis::new(nvars, gens, ring.elimination_order())
}

/// Everything produced by one elimination run.
#[derive(Debug, Clone)]
pub struct Discovery {
    pub generators: IdealBasis,
    /// Gröbner basis of the elimination ideal, as operators.
    pub elimination_basis: Vec<DiffOperator>,
    pub operator: DiffOperator,
    pub progress: Progress,
}

/// Eliminates `x` and `y` and picks one operator from the elimination basis:
/// fewest terms, then lowest total degree, then smallest leading monomial.
pub fn discover(spec: &AnnihilatorSpec, limits: &ResourceLimits) -> Result<Discovery> {
    let ring = spec.ring();
    let generators = build_generators(spec)?;
    let (elim, progress) = groebner::eliminate_with_progress(&generators, &ring.eliminated(), limits)?;
    let elimination_basis: Vec<DiffOperator> = elim
        .gens()
        .iter()
        .map(|g| ring.extract_operator(g).expect("elimination output is free of x and y"))
        .collect();
    // basis is sorted by leading monomial ascending, so min_by_key keeps the
    // first among equals
    let operator = elimination_basis
        .iter()
        .min_by_key(|op| (op.len(), op.degree()))
        .cloned()
        .ok_or(Error::NoRecurrence {
            progress: progress.clone(),
        })?;
    Ok(Discovery {
        generators,
        elimination_basis,
        operator,
        progress,
    })
}

pub fn find_recurrence(spec: &AnnihilatorSpec, limits: &ResourceLimits) -> Result<DiffOperator> {
    discover(spec, limits).map(|d| d.operator)
}

pub fn good_form(p: &DiffOperator) -> Result<DiffOperator> {
    p.good_form()
}

/// `sum_s c_s * g(a + s)`.
pub fn apply_operator<F>(p: &DiffOperator, g: F, a: &MultiIndex) -> Result<Rational>
where
    F: FnMut(&MultiIndex) -> Result<Rational>,
{
    p.apply(a, g)
}

/// Ideal membership of `P(A)` in `<A_i - R_i, x_k y_k - 1>`. Resource
/// exhaustion is an error, distinct from `Ok(false)`.
pub fn membership_check(p: &DiffOperator, spec: &AnnihilatorSpec, limits: &ResourceLimits) -> Result<bool> {
    let ring = spec.ring();
    let embedded = ring.embed_operator(p)?;
    let gb = groebner::buchberger(&build_generators(spec)?, limits)?;
    Ok(groebner::normal_form(&embedded, &gb)?.is_zero())
}

/// Memoized `a -> coeff(prod_i R_i^{a_i}, target)`, computed by expansion.
#[derive(Debug, Clone)]
pub struct ProductOracle {
    r: Vec<LaurentPoly>,
    target: ExponentVector,
    max_terms: usize,
    memo: HashMap<MultiIndex, Rational>,
}

impl ProductOracle {
    pub fn constant_term(spec: &AnnihilatorSpec, limits: &ResourceLimits) -> Self {
        Self::coefficient(spec, ExponentVector::zero(spec.n), limits)
    }

    pub fn coefficient(spec: &AnnihilatorSpec, target: ExponentVector, limits: &ResourceLimits) -> Self {
        ProductOracle {
            r: spec.r.clone(),
            target,
            max_terms: limits.max_terms,
            memo: HashMap::new(),
        }
    }

    pub fn value(&mut self, a: &MultiIndex) -> Result<Rational> {
        if let Some(v) = self.memo.get(a) {
            return Ok(v.clone());
        }
        if a.len() != self.r.len() {
            return Err(Error::DimensionMismatch {
                expected: self.r.len(),
                found: a.len(),
            });
        }
        let factors: Vec<(&LaurentPoly, u32)> = self.r.iter().zip(a.entries().iter().copied()).collect();
        let v = product_coeff(self.target.len(), &factors, &self.target, self.max_terms)?;
        self.memo.insert(a.clone(), v.clone());
        Ok(v)
    }
}

/// A discovered recurrence with its provenance and grid residuals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceCertificate {
    pub spec: AnnihilatorSpec,
    pub generators: IdealBasis,
    pub elimination_basis: Vec<DiffOperator>,
    pub operator: DiffOperator,
    pub good_form: DiffOperator,
    pub grid_bound: u32,
    pub checks: Vec<(MultiIndex, Rational)>,
}

impl RecurrenceCertificate {
    pub fn from_discovery(spec: AnnihilatorSpec, d: Discovery, grid_bound: u32) -> Result<Self> {
        let good_form = d.operator.good_form()?;
        Ok(RecurrenceCertificate {
            spec,
            generators: d.generators,
            elimination_basis: d.elimination_basis,
            operator: d.operator,
            good_form,
            grid_bound,
            checks: Vec::new(),
        })
    }

    pub fn is_valid(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|(_, r)| r.is_zero())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub pass: bool,
    pub checked: usize,
    pub residuals: Vec<(MultiIndex, Rational)>,
    pub first_failure: Option<(MultiIndex, Rational)>,
}

/// Residuals of `op` against `oracle` at every admissible `a` in
/// `{0..=grid_bound}^n`, in lexicographic order.
pub fn verify_operator<F>(op: &DiffOperator, grid_bound: u32, mut oracle: F) -> Result<VerificationReport>
where
    F: FnMut(&MultiIndex) -> Result<Rational>,
{
    if op.is_zero() {
        return Err(Error::ZeroPolynomial("operator"));
    }
    if grid_bound < op.max_shift_magnitude() {
        return Err(Error::InvalidInput(format!(
            "grid bound {grid_bound} is smaller than the largest shift {}",
            op.max_shift_magnitude()
        )));
    }
    let mut residuals = Vec::new();
    for a in MultiIndex::grid(op.n(), grid_bound) {
        if !op.admissible_at(&a) {
            continue;
        }
        let r = op.apply(&a, &mut oracle)?;
        residuals.push((a, r));
    }
    let first_failure = residuals.iter().find(|(_, r)| !r.is_zero()).cloned();
    Ok(VerificationReport {
        pass: first_failure.is_none() && !residuals.is_empty(),
        checked: residuals.len(),
        residuals,
        first_failure,
    })
}

/// Re-checks `cert.operator` on its grid and stores the residuals.
pub fn verify_certificate<F>(cert: &mut RecurrenceCertificate, oracle: F) -> Result<VerificationReport>
where
    F: FnMut(&MultiIndex) -> Result<Rational>,
{
    let report = verify_operator(&cert.operator, cert.grid_bound, oracle)?;
    cert.checks = report.residuals.clone();
    Ok(report)
}

/// Discovers a recurrence and verifies it against the constant-term oracle.
pub fn certify(spec: &AnnihilatorSpec, grid_bound: u32, limits: &ResourceLimits) -> Result<(RecurrenceCertificate, VerificationReport)> {
    let d = discover(spec, limits)?;
    let mut cert = RecurrenceCertificate::from_discovery(spec.clone(), d, grid_bound)?;
    let mut oracle = ProductOracle::constant_term(spec, limits);
    let report = verify_certificate(&mut cert, |a| oracle.value(a))?;
    Ok((cert, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyson::{dyson_ct_bruteforce, dyson_operator, DysonInstance};
    use crate::expr_parse::parse;
    use crate::laurent::tests::q;

    fn op(n: usize, terms: &[(&[i32], i64)]) -> DiffOperator {
        DiffOperator::from_terms(n, terms.iter().map(|(s, c)| (s.to_vec(), q(*c)))).unwrap()
    }

    fn lim() -> ResourceLimits {
        ResourceLimits::default()
    }

    fn ring_poly(spec: &AnnihilatorSpec, text: &str) -> LaurentPoly {
        let ring = spec.ring();
        let names: Vec<&str> = ring.names().iter().map(String::as_str).collect();
        parse(text, &names).unwrap()
    }

    #[test]
    fn generators_for_dyson_two() {
        let spec = AnnihilatorSpec::dyson(2).unwrap();
        let gens = build_generators(&spec).unwrap();
        assert_eq!(spec.ring().names(), &["x1", "x2", "y1", "y2", "A1", "A2"]);
        assert_eq!(
            gens.gens(),
            &[
                ring_poly(&spec, "x1*A1 - x1 + x2"),
                ring_poly(&spec, "x2*A2 - x2 + x1"),
                ring_poly(&spec, "x1*y1 - 1"),
                ring_poly(&spec, "x2*y2 - 1"),
            ]
        );
    }

    #[test]
    fn generators_for_trivial_and_monomial_specs() {
        let ones = AnnihilatorSpec::new(vec![LaurentPoly::one(2), LaurentPoly::one(2)]).unwrap();
        let gens = build_generators(&ones).unwrap();
        assert_eq!(gens.gens()[0], ring_poly(&ones, "A1 - 1"));
        assert_eq!(gens.gens()[1], ring_poly(&ones, "A2 - 1"));
        assert_eq!(gens.len(), 4);

        let mono = AnnihilatorSpec::parse(&["x2/x1", "1"], default_var_names(2)).unwrap();
        let gens = build_generators(&mono).unwrap();
        assert_eq!(gens.gens()[0], ring_poly(&mono, "x1*A1 - x2"));
    }

    #[test]
    fn zero_r_is_rejected() {
        assert!(matches!(
            AnnihilatorSpec::new(vec![LaurentPoly::zero(2), LaurentPoly::one(2)]),
            Err(Error::ZeroPolynomial(_))
        ));
    }

    #[test]
    fn dyson_two_recurrence() {
        let spec = AnnihilatorSpec::dyson(2).unwrap();
        let p = find_recurrence(&spec, &lim()).unwrap();
        assert_eq!(p, op(2, &[(&[1, 1], 1), (&[1, 0], -1), (&[0, 1], -1)]));
        assert_eq!(p.good_form().unwrap(), dyson_operator(2));
    }

    #[test]
    fn dehomogenized_dyson_two_agrees() {
        let spec = AnnihilatorSpec::dyson(2).unwrap().dehomogenized(true).unwrap();
        assert_eq!(spec.ring().nvars(), 4);
        let p = find_recurrence(&spec, &lim()).unwrap();
        assert_eq!(p.good_form().unwrap(), dyson_operator(2));
        let not_degree0 = AnnihilatorSpec::parse(&["x1", "x2"], default_var_names(2)).unwrap();
        assert!(not_degree0.dehomogenized(true).is_err());
    }

    #[test]
    fn constant_spec_recurrence() {
        let spec = AnnihilatorSpec::new(vec![LaurentPoly::one(2), LaurentPoly::one(2)]).unwrap();
        let d = discover(&spec, &lim()).unwrap();
        assert_eq!(
            d.elimination_basis,
            vec![op(2, &[(&[0, 1], 1), (&[0, 0], -1)]), op(2, &[(&[1, 0], 1), (&[0, 0], -1)])]
        );
        // both have two terms and degree one; A2 < A1 in grevlex
        assert_eq!(d.operator, op(2, &[(&[0, 1], 1), (&[0, 0], -1)]));
    }

    #[test]
    fn apply_operator_examples() {
        let p = op(2, &[(&[1, 1], 1), (&[1, 0], -1), (&[0, 1], -1)]);
        let m = |a: &MultiIndex| Ok(crate::dyson::multinomial(a).into());
        assert_eq!(apply_operator(&p, m, &MultiIndex::new(vec![1, 1])).unwrap(), q(0));
        assert_eq!(
            apply_operator(&DiffOperator::identity(2), |_| Ok(q(9)), &MultiIndex::new(vec![0, 4])).unwrap(),
            q(9)
        );
    }

    #[test]
    fn verify_examples() {
        let mut oracle = |a: &MultiIndex| dyson_ct_bruteforce(&DysonInstance::new(a.clone())?, &lim());
        let p2 = op(2, &[(&[1, 1], 1), (&[1, 0], -1), (&[0, 1], -1)]);
        let r = verify_operator(&p2, 3, &mut oracle).unwrap();
        assert!(r.pass);
        assert_eq!(r.checked, 16);

        let a1 = op(2, &[(&[1, 0], 1), (&[0, 0], -1)]);
        let r = verify_operator(&a1, 3, |a: &MultiIndex| Ok(q(a.entries()[0] as i64))).unwrap();
        assert!(!r.pass);
        assert!(r.residuals.iter().all(|(_, v)| *v == q(1)));

        let r = verify_operator(&a1, 3, &mut oracle).unwrap();
        assert_eq!(r.first_failure, Some((MultiIndex::new(vec![0, 1]), q(1))));
        let r = verify_operator(&DiffOperator::identity(2), 3, &mut oracle).unwrap();
        assert_eq!(r.first_failure, Some((MultiIndex::new(vec![0, 0]), q(1))));

        let p3 = op(3, &[(&[1, 1, 1], 1), (&[1, 1, 0], -1), (&[1, 0, 1], -1), (&[0, 1, 1], -1)]);
        let r = verify_operator(&p3, 2, &mut oracle).unwrap();
        assert!(r.pass);
        assert_eq!(r.checked, 27);
    }

    #[test]
    fn verify_rejects_small_grid_and_good_form_skips_boundary() {
        let p = op(1, &[(&[2], 1), (&[0], -1)]);
        assert!(verify_operator(&p, 1, |_| Ok(q(0))).is_err());
        let good = dyson_operator(2);
        let r = verify_operator(&good, 2, |a| Ok(crate::dyson::multinomial(a).into())).unwrap();
        // only a with both entries >= 1 are admissible
        assert_eq!(r.checked, 4);
        assert!(r.pass);
    }

    #[test]
    fn membership_examples() {
        let spec = AnnihilatorSpec::dyson(2).unwrap();
        let good = op(2, &[(&[1, 1], 1), (&[1, 0], -1), (&[0, 1], -1)]);
        assert!(membership_check(&good, &spec, &lim()).unwrap());
        let a1 = op(2, &[(&[1, 0], 1), (&[0, 0], -1)]);
        assert!(!membership_check(&a1, &spec, &lim()).unwrap());
        let ones = AnnihilatorSpec::new(vec![LaurentPoly::one(2), LaurentPoly::one(2)]).unwrap();
        assert!(membership_check(&a1, &ones, &lim()).unwrap());
        assert!(membership_check(&dyson_operator(2), &spec, &lim()).is_err());
    }

    #[test]
    fn product_oracle_matches_dyson_oracle() {
        let spec = AnnihilatorSpec::dyson(3).unwrap();
        let mut oracle = ProductOracle::constant_term(&spec, &lim());
        for a in MultiIndex::grid(3, 2) {
            assert_eq!(
                oracle.value(&a).unwrap(),
                dyson_ct_bruteforce(&DysonInstance::new(a.clone()).unwrap(), &lim()).unwrap()
            );
        }
    }

    #[test]
    fn shift_names_avoid_user_variables() {
        let spec = AnnihilatorSpec::parse(&["1", "1"], vec!["y1".into(), "A2".into()]).unwrap();
        assert_eq!(spec.ring().names(), &["y1", "A2", "yy1", "yy2", "AA1", "AA2"]);
    }
}
