//! JSON file formats: spec files (input) and recurrence certificates (output).
//!
//! Rationals are always written as strings (`"3"`, `"-3/2"`) so that values
//! round-trip exactly.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize, Serializer};

use crate::annihilator::{AnnihilatorSpec, DiffOperator, RecurrenceCertificate};
use crate::error::{Error, Result};
use crate::expr_parse::{parse_laurent, ExprSource};
use crate::groebner::IdealBasis;
use crate::laurent::{default_var_names, MultiIndex, Rational};
use crate::operator::default_shift_names;

/// Input file for `annihilate` and `verify`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vars: Option<Vec<String>>,
    #[serde(rename = "R")]
    pub r: Vec<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub dehomogenize: bool,
}

impl SpecFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("spec file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec file serializes")
    }

    pub fn var_names(&self) -> Vec<String> {
        self.vars.clone().unwrap_or_else(|| default_var_names(self.n))
    }

    pub fn to_spec(&self) -> Result<AnnihilatorSpec> {
        let vars = self.var_names();
        if vars.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "spec declares n = {} but lists {} variables",
                self.n,
                vars.len()
            )));
        }
        if self.r.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "spec declares n = {} but lists {} expressions in R",
                self.n,
                self.r.len()
            )));
        }
        AnnihilatorSpec::parse(&self.r, vars)?.dehomogenized(self.dehomogenize)
    }

    pub fn from_spec(spec: &AnnihilatorSpec) -> Self {
        SpecFile {
            n: spec.n(),
            vars: Some(spec.var_names().to_vec()),
            r: spec.r_strings(),
            dehomogenize: spec.is_dehomogenized(),
        }
    }

    /// Spec file for the Dyson product in `n` variables.
    pub fn dyson(n: usize) -> Result<Self> {
        Ok(Self::from_spec(&AnnihilatorSpec::dyson(n)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorTerm {
    pub shift: Vec<i32>,
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualJson {
    pub a: Vec<u32>,
    pub value: String,
}

/// Serialized [`RecurrenceCertificate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub n: usize,
    pub vars: Vec<String>,
    #[serde(rename = "R")]
    pub r: Vec<String>,
    #[serde(default)]
    pub dehomogenize: bool,
    /// Variable names used by `generators`.
    pub ring_vars: Vec<String>,
    pub generators: Vec<String>,
    pub elimination_basis: Vec<Vec<OperatorTerm>>,
    pub operator: Vec<OperatorTerm>,
    pub good_form: Vec<OperatorTerm>,
    pub grid_bound: u32,
    pub residuals: Vec<ResidualJson>,
}

pub fn operator_to_json(op: &DiffOperator) -> Vec<OperatorTerm> {
    op.terms()
        .map(|(s, c)| OperatorTerm {
            shift: s.entries().to_vec(),
            coeff: c.to_string(),
        })
        .collect()
}

pub fn operator_from_json(n: usize, terms: &[OperatorTerm]) -> Result<DiffOperator> {
    let terms = terms
        .iter()
        .map(|t| {
            if t.shift.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: t.shift.len(),
                });
            }
            Ok((t.shift.clone(), parse_rational(&t.coeff)?))
        })
        .collect::<Result<Vec<_>>>()?;
    DiffOperator::from_terms(n, terms)
}

/// Parses `"p"` or `"p/q"` with integer `p`, `q` and `q != 0`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    let int = |t: &str| -> Result<BigInt> {
        let t = t.trim();
        let digits = t.strip_prefix('-').unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        t.parse().map_err(|_| bad())
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(int(s)?)),
        Some((p, q)) => {
            let q = int(q)?;
            if q == BigInt::from(0) {
                return Err(bad());
            }
            Ok(Rational::new(int(p)?, q))
        }
    }
}

impl CertificateJson {
    pub fn from_certificate(cert: &RecurrenceCertificate) -> Self {
        let ring = cert.spec.ring();
        CertificateJson {
            n: cert.spec.n(),
            vars: cert.spec.var_names().to_vec(),
            r: cert.spec.r_strings(),
            dehomogenize: cert.spec.is_dehomogenized(),
            ring_vars: ring.names().to_vec(),
            generators: cert
                .generators
                .gens()
                .iter()
                .map(|g| g.to_string_with(ring.names()))
                .collect(),
            elimination_basis: cert.elimination_basis.iter().map(operator_to_json).collect(),
            operator: operator_to_json(&cert.operator),
            good_form: operator_to_json(&cert.good_form),
            grid_bound: cert.grid_bound,
            residuals: cert
                .checks
                .iter()
                .map(|(a, v)| ResidualJson {
                    a: a.entries().to_vec(),
                    value: v.to_string(),
                })
                .collect(),
        }
    }

    pub fn to_certificate(&self) -> Result<RecurrenceCertificate> {
        let spec = SpecFile {
            n: self.n,
            vars: Some(self.vars.clone()),
            r: self.r.clone(),
            dehomogenize: self.dehomogenize,
        }
        .to_spec()?;
        let ring = spec.ring();
        if ring.names() != self.ring_vars.as_slice() {
            return Err(Error::InvalidInput("certificate ring_vars do not match its spec".into()));
        }
        let gens = self
            .generators
            .iter()
            .map(|g| parse_laurent(&ExprSource::new(g.as_str(), self.ring_vars.clone())?).map_err(Error::from))
            .collect::<Result<Vec<_>>>()?;
        let generators = IdealBasis::new(ring.nvars(), gens, ring.elimination_order())?;
        let residuals = self
            .residuals
            .iter()
            .map(|r| Ok((MultiIndex::new(r.a.clone()), parse_rational(&r.value)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(RecurrenceCertificate {
            spec,
            generators,
            elimination_basis: self
                .elimination_basis
                .iter()
                .map(|t| operator_from_json(self.n, t))
                .collect::<Result<_>>()?,
            operator: operator_from_json(self.n, &self.operator)?,
            good_form: operator_from_json(self.n, &self.good_form)?,
            grid_bound: self.grid_bound,
            checks: residuals,
        })
    }
}

pub fn certificate_to_json(cert: &RecurrenceCertificate) -> String {
    let mut s = serde_json::to_string_pretty(&CertificateJson::from_certificate(cert)).expect("certificate serializes");
    s.push('\n');
    s
}

pub fn certificate_from_json(text: &str) -> Result<RecurrenceCertificate> {
    let json: CertificateJson =
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("certificate: {e}")))?;
    json.to_certificate()
}

/// Reads an operator in `n` shift symbols from any of: a certificate (its
/// `operator`), a JSON object with an `operator` key, a JSON list of
/// `{shift, coeff}` terms, or an expression in `A1..An` such as
/// `A1*A2 - A1 - A2` or `1 - A1^-1 - A2^-1`.
pub fn read_operator(text: &str, n: usize) -> Result<DiffOperator> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        let value: serde_json::Value =
            serde_json::from_str(trimmed).map_err(|e| Error::InvalidInput(format!("operator file: {e}")))?;
        let terms_value = match value {
            serde_json::Value::Object(mut obj) => obj
                .remove("operator")
                .ok_or_else(|| Error::InvalidInput("operator file: missing \"operator\" key".into()))?,
            other => other,
        };
        let terms: Vec<OperatorTerm> = serde_json::from_value(terms_value)
            .map_err(|e| Error::InvalidInput(format!("operator file: {e}")))?;
        return operator_from_json(n, &terms);
    }
    let src = ExprSource::new(trimmed, default_shift_names(n))?;
    Ok(DiffOperator::new(parse_laurent(&src)?))
}

pub(crate) fn ser_rational<S: Serializer>(v: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub(crate) fn ser_bigint<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub(crate) fn ser_multi_index<S: Serializer>(v: &MultiIndex, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.entries().serialize(s)
}

pub(crate) fn ser_opt_multi_index<S: Serializer>(
    v: &Option<MultiIndex>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    v.as_ref().map(|m| m.entries()).serialize(s)
}
