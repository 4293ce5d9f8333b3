//! Monomials and truncated multivariate power series over the coefficient ring.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::coeff::{same_spec, CoeffElem, ParamSpec};
use crate::error::{Error, Result};

/// Exponent vector. Ordered graded-lexicographically: by total degree first,
/// then lexicographically with the first variable largest.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.0[i]
    }

    /// Indices of variables with positive exponent.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn support_mask(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0u64, |m, (i, _)| m | (1u64 << i))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Formats `coeff * prod names[i]^e` for a term list.
pub(crate) fn fmt_terms<'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (&'a Monomial, &'a CoeffElem)>,
    names: &dyn Fn(usize) -> String,
) -> fmt::Result {
    let mut first = true;
    for (m, c) in terms {
        let mono: Vec<String> = m
            .exps()
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    names(i)
                } else {
                    format!("{}^{}", names(i), e)
                }
            })
            .collect();
        let cs = c.to_string();
        let simple = c.num_terms() == 1;
        let (neg, body) = match cs.strip_prefix('-') {
            Some(rest) if simple => (true, rest.to_string()),
            _ => (false, cs.clone()),
        };
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { "-" } else { "+" })?;
        }
        first = false;
        let body = if simple { body } else { format!("({body})") };
        if mono.is_empty() {
            write!(f, "{body}")?;
        } else if body == "1" {
            write!(f, "{}", mono.join("*"))?;
        } else {
            write!(f, "{body}*{}", mono.join("*"))?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

pub(crate) fn add_term(terms: &mut BTreeMap<Monomial, CoeffElem>, m: Monomial, c: CoeffElem) {
    if c.is_zero() {
        return;
    }
    match terms.get_mut(&m) {
        Some(slot) => {
            *slot = &*slot + &c;
            if slot.is_zero() {
                terms.remove(&m);
            }
        }
        None => {
            terms.insert(m, c);
        }
    }
}

/// Carrier for the formal group operations: any commutative algebra with
/// exact ring operations and a degree truncation.
pub trait FormalHost: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn try_add(&self, other: &Self) -> Result<Self>;
    fn try_mul(&self, other: &Self) -> Result<Self>;
    fn scale(&self, c: &CoeffElem) -> Result<Self>;
    fn negate(&self) -> Self;
    fn constant_term(&self) -> CoeffElem;
    fn truncation(&self) -> u32;
    fn coeff_spec(&self) -> &Arc<ParamSpec>;
    fn is_zero(&self) -> bool;

    /// `self^0, ..., self^n`.
    fn powers(&self, n: u32) -> Result<Vec<Self>> {
        let mut out = Vec::with_capacity(n as usize + 1);
        out.push(self.one_like());
        for k in 1..=n as usize {
            let next = out[k - 1].try_mul(self)?;
            out.push(next);
        }
        Ok(out)
    }
}

/// A truncated power series in `nvars` variables: all terms of total degree
/// above the truncation are dropped.
#[derive(Clone)]
pub struct Series {
    spec: Arc<ParamSpec>,
    nvars: usize,
    trunc: u32,
    terms: BTreeMap<Monomial, CoeffElem>,
}

impl PartialEq for Series {
    fn eq(&self, other: &Self) -> bool {
        same_spec(&self.spec, &other.spec)
            && self.nvars == other.nvars
            && self.trunc == other.trunc
            && self.terms == other.terms
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series({self} + O({}))", self.trunc + 1)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |i: usize| {
            if self.nvars <= 3 {
                ["x", "y", "z"][i].to_string()
            } else {
                format!("x{}", i + 1)
            }
        };
        fmt_terms(f, self.terms.iter(), &names)
    }
}

impl Series {
    pub fn zero(spec: &Arc<ParamSpec>, nvars: usize, trunc: u32) -> Self {
        Series {
            spec: spec.clone(),
            nvars,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(spec: &Arc<ParamSpec>, nvars: usize, trunc: u32, c: CoeffElem) -> Self {
        let mut s = Self::zero(spec, nvars, trunc);
        add_term(&mut s.terms, Monomial::one(nvars), c);
        s
    }

    pub fn var(spec: &Arc<ParamSpec>, nvars: usize, trunc: u32, i: usize) -> Self {
        let mut s = Self::zero(spec, nvars, trunc);
        if trunc >= 1 {
            s.terms
                .insert(Monomial::var(nvars, i), CoeffElem::one(spec));
        }
        s
    }

    pub fn from_terms(
        spec: &Arc<ParamSpec>,
        nvars: usize,
        trunc: u32,
        terms: impl IntoIterator<Item = (Monomial, CoeffElem)>,
    ) -> Result<Self> {
        let mut s = Self::zero(spec, nvars, trunc);
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(Error::Structural("monomial arity mismatch".into()));
            }
            if !same_spec(c.spec(), spec) {
                return Err(Error::Structural("coefficient ring mismatch".into()));
            }
            if m.degree() <= trunc {
                add_term(&mut s.terms, m, c);
            }
        }
        Ok(s)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &CoeffElem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> CoeffElem {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| CoeffElem::zero(&self.spec))
    }

    /// Coefficient of `x^k` in a univariate series.
    pub fn coeff_at(&self, k: u32) -> CoeffElem {
        self.coeff(&Monomial::new(vec![k]))
    }

    /// First monomial (in graded order) where the two series differ.
    pub fn first_difference(&self, other: &Series) -> Option<Monomial> {
        let keys: std::collections::BTreeSet<&Monomial> =
            self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .find(|m| self.coeff(m) != other.coeff(m))
            .cloned()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if !same_spec(&self.spec, &other.spec) {
            return Err(Error::Structural("coefficient ring mismatch".into()));
        }
        if self.nvars != other.nvars || self.trunc != other.trunc {
            return Err(Error::Structural(format!(
                "series shape mismatch: ({}, O({})) vs ({}, O({}))",
                self.nvars, self.trunc, other.nvars, other.trunc
            )));
        }
        Ok(())
    }

    pub fn with_truncation(&self, trunc: u32) -> Series {
        Series {
            spec: self.spec.clone(),
            nvars: self.nvars,
            trunc,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= trunc)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }
}

impl FormalHost for Series {
    fn zero_like(&self) -> Self {
        Series::zero(&self.spec, self.nvars, self.trunc)
    }

    fn one_like(&self) -> Self {
        Series::constant(&self.spec, self.nvars, self.trunc, CoeffElem::one(&self.spec))
    }

    fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), c.clone());
        }
        Ok(Series { terms, ..self.zero_like() })
    }

    fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if m1.degree() + m2.degree() > self.trunc {
                    continue;
                }
                add_term(&mut terms, m1.mul(m2), c1 * c2);
            }
        }
        Ok(Series { terms, ..self.zero_like() })
    }

    fn scale(&self, c: &CoeffElem) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (m, x) in &self.terms {
            add_term(&mut terms, m.clone(), x.checked_mul(c)?);
        }
        Ok(Series { terms, ..self.zero_like() })
    }

    fn negate(&self) -> Self {
        Series {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
            ..self.zero_like()
        }
    }

    fn constant_term(&self) -> CoeffElem {
        self.coeff(&Monomial::one(self.nvars))
    }

    fn truncation(&self) -> u32 {
        self.trunc
    }

    fn coeff_spec(&self) -> &Arc<ParamSpec> {
        &self.spec
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}
