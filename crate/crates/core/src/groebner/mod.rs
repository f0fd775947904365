//! Gröbner bases over the rationals: multivariate division, S-polynomials,
//! Buchberger completion with the Gebauer–Möller criteria, reduced bases and
//! elimination ideals.
//!
//! Polynomials enter and leave as [`LaurentPoly`] values with nonnegative
//! exponents. Internally each monomial is replaced by its order key (see
//! [`order`]) and polynomials are kept sorted, largest term first.

pub mod order;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Progress, Result};
use crate::laurent::{ExponentVector, LaurentPoly, Rational};
use crate::limits::{Budget, ResourceLimits};

pub use order::{InnerOrder, KeyLayout, OrderSpec};
use order::{add_keys, sub_keys};

type Key = Vec<i32>;

/// A generating set of a polynomial ideal together with the monomial order
/// it is meant to be read in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealBasis {
    nvars: usize,
    gens: Vec<LaurentPoly>,
    order: OrderSpec,
}

impl IdealBasis {
    pub fn new(nvars: usize, gens: Vec<LaurentPoly>, order: OrderSpec) -> Result<Self> {
        order.validate(nvars)?;
        for g in &gens {
            if g.nvars() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: g.nvars(),
                });
            }
            if g.is_zero() {
                return Err(Error::ZeroPolynomial("ideal generator"));
            }
            if !g.is_polynomial() {
                return Err(Error::InvalidInput(format!(
                    "generator {g} has a negative exponent"
                )));
            }
        }
        Ok(IdealBasis { nvars, gens, order })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn gens(&self) -> &[LaurentPoly] {
        &self.gens
    }

    pub fn order(&self) -> &OrderSpec {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// True if the basis is `{c}` for a nonzero constant.
    pub fn is_unit(&self) -> bool {
        self.gens.iter().any(|g| g.as_monomial().is_some_and(|(e, _)| e.is_zero()))
    }

    /// Same generators read in another order.
    pub fn with_order(&self, order: OrderSpec) -> Result<Self> {
        IdealBasis::new(self.nvars, self.gens.clone(), order)
    }
}

/// Sparse polynomial as (order key, coefficient) pairs, largest key first.
#[derive(Debug, Clone, PartialEq, Eq)]
struct SPoly {
    terms: Vec<(Key, Rational)>,
}

impl SPoly {
    fn from_laurent(p: &LaurentPoly, layout: &KeyLayout) -> Self {
        let mut terms: Vec<(Key, Rational)> = p.terms().map(|(e, c)| (layout.key(e.entries()), c.clone())).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        SPoly { terms }
    }

    fn to_laurent(&self, layout: &KeyLayout) -> LaurentPoly {
        LaurentPoly::from_terms(
            layout.nvars(),
            self.terms
                .iter()
                .map(|(k, c)| (ExponentVector::new(layout.exponents(k)), c.clone())),
        )
        .expect("layout has nvars entries")
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lm(&self) -> &Key {
        &self.terms[0].0
    }

    fn lc(&self) -> &Rational {
        &self.terms[0].1
    }

    fn len(&self) -> usize {
        self.terms.len()
    }

    fn monic(mut self) -> Self {
        if let Some((_, lc)) = self.terms.first() {
            let inv = lc.recip();
            for (_, c) in &mut self.terms {
                *c *= &inv;
            }
        }
        self
    }

    fn primitive(mut self) -> Self {
        if let Some((_, lc)) = self.terms.first() {
            let s = primitive_scale(self.terms.iter().map(|(_, c)| c), lc.is_negative());
            for (_, c) in &mut self.terms {
                *c *= &s;
            }
        }
        self
    }

    /// `c * m * self` for a monomial key `m`.
    fn scaled_shift(&self, m: &[i32], c: &Rational) -> Vec<(Key, Rational)> {
        self.terms.iter().map(|(k, d)| (add_keys(k, m), c * d)).collect()
    }
}

/// The positive rational `s` (negated when `negate` is set) such that
/// `s * coeffs` are coprime integers.
pub fn primitive_scale<'a>(coeffs: impl Iterator<Item = &'a Rational>, negate: bool) -> Rational {
    let mut den_lcm = BigInt::one();
    let mut num_gcd = BigInt::zero();
    let coeffs: Vec<&Rational> = coeffs.collect();
    for c in &coeffs {
        den_lcm = den_lcm.lcm(c.denom());
    }
    for c in &coeffs {
        let scaled = c.numer() * (&den_lcm / c.denom());
        num_gcd = num_gcd.gcd(&scaled);
    }
    if num_gcd.is_zero() {
        return Rational::one();
    }
    let s = Rational::new(den_lcm, num_gcd);
    if negate {
        -s
    } else {
        s
    }
}

/// Order-maximal term of `p`.
pub fn leading_term(p: &LaurentPoly, order: &OrderSpec) -> Result<(ExponentVector, Rational)> {
    let layout = order.compile(p.nvars())?;
    p.terms()
        .max_by(|(a, _), (b, _)| layout.key(a.entries()).cmp(&layout.key(b.entries())))
        .map(|(e, c)| (e.clone(), c.clone()))
        .ok_or(Error::ZeroPolynomial("leading_term"))
}

/// Remainder of `p` on division by the generators of `basis`.
///
/// Every term of the result is irreducible by every generator's leading
/// monomial. Among applicable reducers the one with the smallest leading
/// monomial is used.
pub fn normal_form(p: &LaurentPoly, basis: &IdealBasis) -> Result<LaurentPoly> {
    if p.nvars() != basis.nvars {
        return Err(Error::DimensionMismatch {
            expected: basis.nvars,
            found: p.nvars(),
        });
    }
    if !p.is_polynomial() {
        return Err(Error::InvalidInput(format!("{p} has a negative exponent")));
    }
    let layout = basis.order.compile(basis.nvars)?;
    let mut reducers: Vec<SPoly> = basis.gens.iter().map(|g| SPoly::from_laurent(g, &layout)).collect();
    reducers.sort_by(|a, b| a.lm().cmp(b.lm()));
    let refs: Vec<&SPoly> = reducers.iter().collect();
    let budget = ResourceLimits::unlimited().start();
    let r = reduce(&layout, SPoly::from_laurent(p, &layout), &refs, &budget, &mut || Progress::default())?;
    Ok(r.to_laurent(&layout))
}

/// `(L/lt(f)) f - (L/lt(g)) g` with `L` the lcm of the leading monomials.
pub fn s_polynomial(f: &LaurentPoly, g: &LaurentPoly, order: &OrderSpec) -> Result<LaurentPoly> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::ZeroPolynomial("s_polynomial"));
    }
    if f.nvars() != g.nvars() {
        return Err(Error::DimensionMismatch {
            expected: f.nvars(),
            found: g.nvars(),
        });
    }
    let layout = order.compile(f.nvars())?;
    let sf = SPoly::from_laurent(f, &layout);
    let sg = SPoly::from_laurent(g, &layout);
    Ok(spoly(&layout, &sf, &sg).to_laurent(&layout))
}

fn spoly(layout: &KeyLayout, f: &SPoly, g: &SPoly) -> SPoly {
    let l = layout.lcm(f.lm(), g.lm());
    let mf = sub_keys(&l, f.lm());
    let mg = sub_keys(&l, g.lm());
    let mut acc: BTreeMap<Key, Rational> = BTreeMap::new();
    for (k, c) in f.scaled_shift(&mf, &f.lc().recip()).into_iter().skip(1) {
        acc_add(&mut acc, k, c);
    }
    for (k, c) in g.scaled_shift(&mg, &(-g.lc().recip())).into_iter().skip(1) {
        acc_add(&mut acc, k, c);
    }
    SPoly {
        terms: acc.into_iter().rev().collect(),
    }
}

fn acc_add(acc: &mut BTreeMap<Key, Rational>, k: Key, c: Rational) {
    use std::collections::btree_map::Entry;
    match acc.entry(k) {
        Entry::Vacant(v) => {
            if !c.is_zero() {
                v.insert(c);
            }
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// Full reduction of `p` by `reducers` (sorted by leading monomial ascending).
fn reduce(
    layout: &KeyLayout,
    p: SPoly,
    reducers: &[&SPoly],
    budget: &Budget,
    progress: &mut dyn FnMut() -> Progress,
) -> Result<SPoly> {
    let mut work: BTreeMap<Key, Rational> = p.terms.into_iter().collect();
    let mut out: Vec<(Key, Rational)> = Vec::new();
    let mut steps: u64 = 0;
    while let Some((k, c)) = work.pop_last() {
        match reducers.iter().find(|g| layout.divides(g.lm(), &k)) {
            Some(g) => {
                let m = sub_keys(&k, g.lm());
                let factor = -(c / g.lc());
                for (t, d) in &g.terms[1..] {
                    acc_add(&mut work, add_keys(t, &m), &factor * d);
                }
                steps += 1;
                if steps.is_multiple_of(16) {
                    budget.check_terms(work.len() + out.len(), &mut *progress)?;
                    budget.check_time(&mut *progress)?;
                }
            }
            None => out.push((k, c)),
        }
    }
    Ok(SPoly { terms: out })
}

#[derive(Debug, Clone)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Key,
    degree: i64,
}

struct Engine<'a> {
    layout: &'a KeyLayout,
    budget: Budget,
    polys: Vec<SPoly>,
    /// indices into `polys`, sorted by leading monomial ascending
    active: Vec<usize>,
    pairs: Vec<Pair>,
    processed: usize,
    largest: usize,
}

impl<'a> Engine<'a> {
    fn new(layout: &'a KeyLayout, limits: &ResourceLimits) -> Self {
        Engine {
            layout,
            budget: limits.start(),
            polys: Vec::new(),
            active: Vec::new(),
            pairs: Vec::new(),
            processed: 0,
            largest: 0,
        }
    }

    fn progress(&self) -> Progress {
        Progress {
            pairs_processed: self.processed,
            pairs_pending: self.pairs.len(),
            basis_size: self.active.len(),
            largest_poly: self.largest,
            elapsed_ms: self.budget.elapsed().as_millis(),
        }
    }

    fn reduce_against_active(&self, p: SPoly) -> Result<SPoly> {
        let refs: Vec<&SPoly> = self.active.iter().map(|&i| &self.polys[i]).collect();
        let snapshot = self.progress();
        reduce(self.layout, p, &refs, &self.budget, &mut || snapshot.clone())
    }

    /// Gebauer–Möller update after adding `polys[h]`.
    fn update(&mut self, h: usize) {
        let layout = self.layout;
        let lm_h = self.polys[h].lm().clone();

        let mut candidates: Vec<(usize, Key)> = self
            .active
            .iter()
            .map(|&g| (g, layout.lcm(self.polys[g].lm(), &lm_h)))
            .collect();
        candidates.sort_by_key(|c| c.0);

        // chain criterion among the new pairs
        let mut kept: Vec<(usize, Key)> = Vec::new();
        let mut idx = 0;
        while idx < candidates.len() {
            let (g1, l1) = candidates[idx].clone();
            let coprime = layout.coprime(self.polys[g1].lm(), &lm_h);
            let dominated = candidates[idx + 1..]
                .iter()
                .chain(kept.iter())
                .any(|(_, l2)| layout.divides(l2, &l1));
            if coprime || !dominated {
                kept.push((g1, l1));
            }
            idx += 1;
        }
        // coprime leading monomials
        let new_pairs: Vec<Pair> = kept
            .into_iter()
            .filter(|(g, _)| !layout.coprime(self.polys[*g].lm(), &lm_h))
            .map(|(g, l)| Pair {
                i: g,
                j: h,
                degree: layout.degree(&l),
                lcm: l,
            })
            .collect();

        // old pairs made redundant by h
        let polys = &self.polys;
        self.pairs.retain(|p| {
            if !layout.divides(&lm_h, &p.lcm) {
                return true;
            }
            let l1 = layout.lcm(polys[p.i].lm(), &lm_h);
            let l2 = layout.lcm(polys[p.j].lm(), &lm_h);
            l1 == p.lcm || l2 == p.lcm
        });
        self.pairs.extend(new_pairs);

        self.active.retain(|&g| !layout.divides(&lm_h, polys[g].lm()));
        let pos = self
            .active
            .partition_point(|&g| polys[g].lm() < &lm_h);
        self.active.insert(pos, h);
    }

    fn add(&mut self, p: SPoly) -> Result<bool> {
        let h = self.reduce_against_active(p)?;
        if h.is_zero() {
            return Ok(false);
        }
        let h = h.monic();
        self.largest = self.largest.max(h.len());
        let unit = self.layout.degree(h.lm()) == 0;
        self.polys.push(h);
        let idx = self.polys.len() - 1;
        if unit {
            self.active = vec![idx];
            self.pairs.clear();
            return Ok(true);
        }
        self.update(idx);
        Ok(false)
    }

    fn select_pair(&mut self) -> Option<Pair> {
        let best = self
            .pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                a.degree
                    .cmp(&b.degree)
                    .then_with(|| a.lcm.cmp(&b.lcm))
                    .then_with(|| (a.i, a.j).cmp(&(b.i, b.j)))
            })
            .map(|(k, _)| k)?;
        Some(self.pairs.swap_remove(best))
    }

    fn run(&mut self, gens: Vec<SPoly>) -> Result<()> {
        for g in gens {
            if self.add(g)? {
                return Ok(());
            }
        }
        while let Some(pair) = self.select_pair() {
            self.processed += 1;
            if self.processed > self.budget.limits.max_spairs {
                return Err(Error::ResourceLimit {
                    kind: crate::error::LimitKind::SPairs,
                    progress: self.progress(),
                });
            }
            self.budget.check_time(|| self.progress())?;
            let s = spoly(self.layout, &self.polys[pair.i], &self.polys[pair.j]);
            self.budget.check_terms(s.len(), || self.progress())?;
            if self.add(s)? {
                return Ok(());
            }
        }
        Ok(())
    }

    /// Reduced basis, sorted by leading monomial ascending.
    fn reduced_basis(&self) -> Result<Vec<SPoly>> {
        let basis: Vec<&SPoly> = self.active.iter().map(|&i| &self.polys[i]).collect();
        let mut out = Vec::with_capacity(basis.len());
        for (k, g) in basis.iter().enumerate() {
            let others: Vec<&SPoly> = basis
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != k)
                .map(|(_, p)| *p)
                .collect();
            let snapshot = self.progress();
            let r = reduce(self.layout, (*g).clone(), &others, &self.budget, &mut || snapshot.clone())?;
            debug_assert_eq!(r.lm(), g.lm());
            out.push(r.primitive());
        }
        Ok(out)
    }
}

/// Reduced Gröbner basis of the ideal generated by `basis.gens` under
/// `basis.order`. Generators are scaled to coprime integer coefficients with a
/// positive leading coefficient and listed by leading monomial ascending.
pub fn buchberger(basis: &IdealBasis, limits: &ResourceLimits) -> Result<IdealBasis> {
    buchberger_with_progress(basis, limits).map(|(b, _)| b)
}

/// [`buchberger`] plus statistics about the run.
pub fn buchberger_with_progress(basis: &IdealBasis, limits: &ResourceLimits) -> Result<(IdealBasis, Progress)> {
    let layout = basis.order.compile(basis.nvars)?;
    let mut engine = Engine::new(&layout, limits);
    let gens: Vec<SPoly> = basis.gens.iter().map(|g| SPoly::from_laurent(g, &layout)).collect();
    engine.run(gens)?;
    let reduced = engine.reduced_basis()?;
    let progress = engine.progress();
    let gens = reduced.iter().map(|p| p.to_laurent(&layout)).collect();
    Ok((
        IdealBasis {
            nvars: basis.nvars,
            gens,
            order: basis.order.clone(),
        },
        progress,
    ))
}

/// Gröbner basis of the elimination ideal `I ∩ Q[kept vars]`, computed under a
/// block order with `drop_vars` (0-based) in the eliminated block. The result
/// lives in the same ring and carries that block order.
pub fn eliminate(basis: &IdealBasis, drop_vars: &[usize], limits: &ResourceLimits) -> Result<IdealBasis> {
    eliminate_with_progress(basis, drop_vars, limits).map(|(b, _)| b)
}

pub fn eliminate_with_progress(
    basis: &IdealBasis,
    drop_vars: &[usize],
    limits: &ResourceLimits,
) -> Result<(IdealBasis, Progress)> {
    if let Some(&v) = drop_vars.iter().find(|&&v| v >= basis.nvars) {
        return Err(Error::IndexOutOfRange {
            index: v + 1,
            len: basis.nvars,
        });
    }
    let mut drop: Vec<usize> = drop_vars.to_vec();
    drop.sort_unstable();
    drop.dedup();
    let order = OrderSpec::elimination(basis.nvars, &drop);
    let (full, progress) = buchberger_with_progress(&basis.with_order(order)?, limits)?;
    let gens = full
        .gens
        .into_iter()
        .filter(|g| g.terms().all(|(e, _)| drop.iter().all(|&v| e[v] == 0)))
        .collect();
    Ok((
        IdealBasis {
            nvars: basis.nvars,
            gens,
            order: full.order,
        },
        progress,
    ))
}

/// Checks the Buchberger criterion: every S-polynomial of `basis` reduces to
/// zero modulo `basis`.
pub fn is_groebner(basis: &IdealBasis) -> Result<bool> {
    for (i, f) in basis.gens.iter().enumerate() {
        for g in &basis.gens[i + 1..] {
            let s = s_polynomial(f, g, &basis.order)?;
            if !normal_form(&s, basis)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr_parse::parse;
    use crate::laurent::tests::q;

    fn p(text: &str) -> LaurentPoly {
        parse(text, &["x", "y"]).unwrap()
    }

    fn basis(gens: &[&str], order: OrderSpec) -> IdealBasis {
        IdealBasis::new(2, gens.iter().map(|g| p(g)).collect(), order).unwrap()
    }

    #[test]
    fn leading_term_examples() {
        assert_eq!(
            leading_term(&p("x^2 + x*y"), &OrderSpec::Grevlex).unwrap(),
            (ExponentVector::new(vec![2, 0]), q(1))
        );
        assert_eq!(
            leading_term(&p("5"), &OrderSpec::Lex).unwrap(),
            (ExponentVector::new(vec![0, 0]), q(5))
        );
        assert_eq!(
            leading_term(&p("x + y^2"), &OrderSpec::Lex).unwrap(),
            (ExponentVector::new(vec![1, 0]), q(1))
        );
        assert!(matches!(
            leading_term(&LaurentPoly::zero(2), &OrderSpec::Lex),
            Err(Error::ZeroPolynomial(_))
        ));
    }

    #[test]
    fn normal_form_examples() {
        assert!(normal_form(&p("x^2 + x"), &basis(&["x"], OrderSpec::Grevlex)).unwrap().is_zero());
        assert_eq!(normal_form(&p("y"), &basis(&["x"], OrderSpec::Grevlex)).unwrap(), p("y"));
        assert_eq!(
            normal_form(&p("x^2*y - x"), &basis(&["x^2 - 1"], OrderSpec::Grevlex)).unwrap(),
            p("y - x")
        );
    }

    #[test]
    fn s_polynomial_examples() {
        assert_eq!(
            s_polynomial(&p("x^2 - y"), &p("x*y - 1"), &OrderSpec::Grevlex).unwrap(),
            p("x - y^2")
        );
        let f = p("x^3 - 2*x*y + 7");
        assert!(s_polynomial(&f, &f, &OrderSpec::Grevlex).unwrap().is_zero());
        assert!(s_polynomial(&p("x"), &p("y"), &OrderSpec::Grevlex).unwrap().is_zero());
        assert!(s_polynomial(&p("x"), &LaurentPoly::zero(2), &OrderSpec::Grevlex).is_err());
    }

    #[test]
    fn buchberger_examples() {
        let lim = ResourceLimits::default();
        let unit = buchberger(&basis(&["x*y - 1", "x^2"], OrderSpec::Grevlex), &lim).unwrap();
        assert_eq!(unit.gens(), &[LaurentPoly::one(2)]);
        let single = buchberger(&basis(&["x"], OrderSpec::Grevlex), &lim).unwrap();
        assert_eq!(single.gens(), &[p("x")]);
        let gb = buchberger(&basis(&["x^2 - y", "x*y - 1"], OrderSpec::Grevlex), &lim).unwrap();
        assert!(gb.gens().contains(&p("y^2 - x")), "{:?}", gb.gens());
        assert!(is_groebner(&gb).unwrap());
    }

    #[test]
    fn output_is_primitive_integer() {
        let lim = ResourceLimits::default();
        let gb = buchberger(&basis(&["1/2*x - 3/4*y", "-6*y^2 + 4"], OrderSpec::Lex), &lim).unwrap();
        assert_eq!(gb.gens(), &[p("3*y^2 - 2"), p("2*x - 3*y")]);
    }

    #[test]
    fn eliminate_examples() {
        let lim = ResourceLimits::default();
        let b = IdealBasis::new(
            2,
            vec![parse("A - x", &["x", "A"]).unwrap(), parse("x - 1", &["x", "A"]).unwrap()],
            OrderSpec::Grevlex,
        )
        .unwrap();
        let e = eliminate(&b, &[0], &lim).unwrap();
        assert_eq!(e.gens(), &[parse("A - 1", &["x", "A"]).unwrap()]);
        let none = eliminate(&b, &[], &lim).unwrap();
        assert_eq!(none.gens(), buchberger(&b.with_order(OrderSpec::elimination(2, &[])).unwrap(), &lim).unwrap().gens());
        assert!(eliminate(&b, &[5], &lim).is_err());
    }

    #[test]
    fn spair_budget_is_enforced() {
        let lim = ResourceLimits {
            max_spairs: 1,
            ..Default::default()
        };
        let vars = ["x", "y", "z"];
        let gens = ["x^3 - 2*x*y", "x^2*y - 2*y^2 + x", "z*x - y^2"]
            .iter()
            .map(|g| parse(g, &vars).unwrap())
            .collect();
        let b = IdealBasis::new(3, gens, OrderSpec::Grevlex).unwrap();
        let err = buchberger(&b, &lim).unwrap_err();
        assert!(matches!(
            err,
            Error::ResourceLimit {
                kind: crate::error::LimitKind::SPairs,
                ..
            }
        ));
    }

    #[test]
    fn invalid_bases_are_rejected() {
        assert!(IdealBasis::new(2, vec![LaurentPoly::zero(2)], OrderSpec::Lex).is_err());
        assert!(IdealBasis::new(2, vec![p("x^-1")], OrderSpec::Lex).is_err());
        assert!(IdealBasis::new(3, vec![p("x")], OrderSpec::Lex).is_err());
    }

    #[test]
    fn primitive_scale_examples() {
        let cs = [Rational::new(1.into(), 2.into()), Rational::new((-3).into(), 4.into())];
        assert_eq!(primitive_scale(cs.iter(), false), q(4));
        assert_eq!(primitive_scale(cs.iter(), true), q(-4));
        let cs = [q(6), q(-4)];
        assert_eq!(primitive_scale(cs.iter(), false), Rational::new(1.into(), 2.into()));
    }
}
