//! Monomial orders.
//!
//! Every supported order is realised as a linear "sort key": a monomial's key
//! is an integer vector whose plain lexicographic comparison is the order.
//! Keys of products are sums of keys, so the engine can multiply, divide and
//! compare monomials without consulting the order again.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InnerOrder {
    Lex,
    Grevlex,
}

/// A monomial order on `nvars` variables. Variable 0 is the largest.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OrderSpec {
    Lex,
    Grevlex,
    /// Any monomial involving the eliminated block beats every monomial
    /// that does not; ties are broken inside each block.
    Block {
        eliminated: Vec<usize>,
        kept: Vec<usize>,
        eliminated_order: InnerOrder,
        kept_order: InnerOrder,
    },
}

impl OrderSpec {
    /// Block order with `eliminated` first, both blocks graded reverse
    /// lexicographic.
    pub fn elimination(nvars: usize, eliminated: &[usize]) -> Self {
        let kept = (0..nvars).filter(|v| !eliminated.contains(v)).collect();
        OrderSpec::Block {
            eliminated: eliminated.to_vec(),
            kept,
            eliminated_order: InnerOrder::Grevlex,
            kept_order: InnerOrder::Grevlex,
        }
    }

    pub fn validate(&self, nvars: usize) -> Result<()> {
        if let OrderSpec::Block { eliminated, kept, .. } = self {
            let mut seen = vec![false; nvars];
            for &v in eliminated.iter().chain(kept) {
                if v >= nvars || seen[v] {
                    return Err(Error::InvalidInput(format!(
                        "block order must partition variables 0..{nvars}; offending index {v}"
                    )));
                }
                seen[v] = true;
            }
            if seen.iter().any(|s| !s) {
                return Err(Error::InvalidInput("block order leaves a variable unassigned".into()));
            }
        }
        Ok(())
    }

    pub fn compile(&self, nvars: usize) -> Result<KeyLayout> {
        self.validate(nvars)?;
        let all: Vec<usize> = (0..nvars).collect();
        let mut slots = Vec::new();
        match self {
            OrderSpec::Lex => push_block(&mut slots, &all, InnerOrder::Lex),
            OrderSpec::Grevlex => push_block(&mut slots, &all, InnerOrder::Grevlex),
            OrderSpec::Block {
                eliminated,
                kept,
                eliminated_order,
                kept_order,
            } => {
                push_block(&mut slots, eliminated, *eliminated_order);
                push_block(&mut slots, kept, *kept_order);
            }
        }
        let mut var_slot = vec![(0usize, 1i32); nvars];
        for (pos, slot) in slots.iter().enumerate() {
            if let Slot::Var { var, sign } = slot {
                var_slot[*var] = (pos, *sign);
            }
        }
        Ok(KeyLayout {
            nvars,
            slots,
            var_slot,
        })
    }

    /// Compares two exponent vectors under this order.
    pub fn cmp(&self, a: &[i32], b: &[i32]) -> Result<Ordering> {
        let layout = self.compile(a.len())?;
        Ok(layout.key(a).cmp(&layout.key(b)))
    }
}

fn push_block(slots: &mut Vec<Slot>, vars: &[usize], inner: InnerOrder) {
    if vars.is_empty() {
        return;
    }
    match inner {
        InnerOrder::Lex => slots.extend(vars.iter().map(|&var| Slot::Var { var, sign: 1 })),
        InnerOrder::Grevlex => {
            slots.push(Slot::Degree(vars.to_vec()));
            // the last variable is compared first and a smaller exponent wins;
            // the first variable is implied by the degree
            slots.extend(vars.iter().rev().map(|&var| Slot::Var { var, sign: -1 }));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Slot {
    Degree(Vec<usize>),
    Var { var: usize, sign: i32 },
}

/// Compiled form of an [`OrderSpec`] for a fixed variable count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyLayout {
    nvars: usize,
    slots: Vec<Slot>,
    var_slot: Vec<(usize, i32)>,
}

impl KeyLayout {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn key_len(&self) -> usize {
        self.slots.len()
    }

    pub fn key(&self, exps: &[i32]) -> Vec<i32> {
        self.slots
            .iter()
            .map(|slot| match slot {
                Slot::Degree(vars) => vars.iter().map(|&v| exps[v]).sum(),
                Slot::Var { var, sign } => sign * exps[*var],
            })
            .collect()
    }

    pub fn exponents(&self, key: &[i32]) -> Vec<i32> {
        self.var_slot.iter().map(|&(pos, sign)| sign * key[pos]).collect()
    }

    pub fn exponent(&self, key: &[i32], var: usize) -> i32 {
        let (pos, sign) = self.var_slot[var];
        sign * key[pos]
    }

    /// True if monomial `a` divides monomial `b`.
    #[inline]
    pub fn divides(&self, a: &[i32], b: &[i32]) -> bool {
        self.var_slot.iter().all(|&(pos, sign)| sign * a[pos] <= sign * b[pos])
    }

    pub fn lcm(&self, a: &[i32], b: &[i32]) -> Vec<i32> {
        let ea = self.exponents(a);
        let eb = self.exponents(b);
        let m: Vec<i32> = ea.iter().zip(&eb).map(|(x, y)| *x.max(y)).collect();
        self.key(&m)
    }

    pub fn coprime(&self, a: &[i32], b: &[i32]) -> bool {
        self.var_slot
            .iter()
            .all(|&(pos, _)| a[pos] == 0 || b[pos] == 0)
    }

    pub fn degree(&self, key: &[i32]) -> i64 {
        self.var_slot.iter().map(|&(pos, sign)| (sign * key[pos]) as i64).sum()
    }

    /// True if every variable in `vars` has exponent zero.
    pub fn free_of(&self, key: &[i32], vars: &[usize]) -> bool {
        vars.iter().all(|&v| self.exponent(key, v) == 0)
    }
}

#[inline]
pub fn add_keys(a: &[i32], b: &[i32]) -> Vec<i32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[inline]
pub fn sub_keys(a: &[i32], b: &[i32]) -> Vec<i32> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Graded reverse lexicographic comparison of signed exponent vectors
/// (variable 0 largest).
pub fn grevlex_cmp(a: &[i32], b: &[i32]) -> Ordering {
    let deg = |v: &[i32]| v.iter().map(|&x| x as i64).sum::<i64>();
    deg(a).cmp(&deg(b)).then_with(|| {
        for (x, y) in a.iter().zip(b).rev() {
            if x != y {
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}
