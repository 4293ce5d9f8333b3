//! The coefficient ring: integers extended by named parameters, some of
//! which may be declared invertible (Laurent parameters).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Ordered parameter names of a coefficient ring together with the subset
/// that is allowed to carry negative exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParamSpec {
    names: Vec<String>,
    invertible: Vec<bool>,
}

impl ParamSpec {
    pub fn new(names: &[&str], invertible: &[&str]) -> Result<Arc<Self>> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() {
                return Err(Error::Structural("empty parameter name".into()));
            }
            if names[..i].contains(n) {
                return Err(Error::Structural(format!("duplicate parameter `{n}`")));
            }
        }
        let mut inv = vec![false; names.len()];
        for u in invertible {
            match names.iter().position(|n| n == u) {
                Some(i) => inv[i] = true,
                None => {
                    return Err(Error::Structural(format!(
                        "invertible parameter `{u}` is not a declared parameter"
                    )))
                }
            }
        }
        Ok(Arc::new(ParamSpec {
            names,
            invertible: inv,
        }))
    }

    /// The ring of integers: no parameters.
    pub fn integers() -> Arc<Self> {
        Arc::new(ParamSpec {
            names: Vec::new(),
            invertible: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_invertible(&self, idx: usize) -> bool {
        self.invertible[idx]
    }

    pub fn invertible_names(&self) -> impl Iterator<Item = &str> {
        self.names
            .iter()
            .zip(&self.invertible)
            .filter(|(_, &inv)| inv)
            .map(|(n, _)| n.as_str())
    }

    /// The ring left after assigning values to `assigned`: the remaining
    /// parameters, in order, with their invertibility.
    pub fn residual(&self, assigned: &[&str]) -> Arc<Self> {
        let (names, invertible) = self
            .names
            .iter()
            .zip(&self.invertible)
            .filter(|(n, _)| !assigned.contains(&n.as_str()))
            .map(|(n, &i)| (n.clone(), i))
            .unzip();
        Arc::new(ParamSpec { names, invertible })
    }
}

pub(crate) fn same_spec(a: &Arc<ParamSpec>, b: &Arc<ParamSpec>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// An element of `Z[params, invertible params^-1]`, stored as a map from
/// exponent vectors to nonzero integers in lexicographic order.
#[derive(Clone)]
pub struct CoeffElem {
    spec: Arc<ParamSpec>,
    terms: BTreeMap<Vec<i32>, BigInt>,
}

impl PartialEq for CoeffElem {
    fn eq(&self, other: &Self) -> bool {
        same_spec(&self.spec, &other.spec) && self.terms == other.terms
    }
}

impl Eq for CoeffElem {}

impl fmt::Debug for CoeffElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoeffElem({self})")
    }
}

impl CoeffElem {
    pub fn zero(spec: &Arc<ParamSpec>) -> Self {
        CoeffElem {
            spec: spec.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(spec: &Arc<ParamSpec>) -> Self {
        Self::from_int(spec, 1)
    }

    pub fn from_int(spec: &Arc<ParamSpec>, n: i64) -> Self {
        Self::from_bigint(spec, BigInt::from(n))
    }

    pub fn from_bigint(spec: &Arc<ParamSpec>, n: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !n.is_zero() {
            terms.insert(vec![0; spec.len()], n);
        }
        CoeffElem {
            spec: spec.clone(),
            terms,
        }
    }

    /// The parameter `name` itself.
    pub fn param(spec: &Arc<ParamSpec>, name: &str) -> Result<Self> {
        let i = spec
            .index_of(name)
            .ok_or_else(|| Error::Structural(format!("unknown parameter `{name}`")))?;
        let mut exps = vec![0; spec.len()];
        exps[i] = 1;
        Self::monomial(spec, exps, BigInt::one())
    }

    /// `c * prod params^exps`; negative exponents must sit on invertible parameters.
    pub fn monomial(spec: &Arc<ParamSpec>, exps: Vec<i32>, c: BigInt) -> Result<Self> {
        if exps.len() != spec.len() {
            return Err(Error::Structural(format!(
                "exponent vector of length {} for {} parameters",
                exps.len(),
                spec.len()
            )));
        }
        for (i, &e) in exps.iter().enumerate() {
            if e < 0 && !spec.is_invertible(i) {
                return Err(Error::Domain(format!(
                    "negative exponent on non-invertible parameter `{}`",
                    spec.names[i]
                )));
            }
        }
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Ok(CoeffElem {
            spec: spec.clone(),
            terms,
        })
    }

    pub fn spec(&self) -> &Arc<ParamSpec> {
        &self.spec
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i32], &BigInt)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_integer().is_some_and(|c| c.is_one())
    }

    /// The integer value, when the element involves no parameter.
    pub fn as_integer(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn check_spec(&self, other: &Self) -> Result<()> {
        if same_spec(&self.spec, &other.spec) {
            Ok(())
        } else {
            Err(Error::Structural(format!(
                "coefficient rings differ: {:?} vs {:?}",
                self.spec.names, other.spec.names
            )))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_spec(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            accumulate(&mut terms, e, c.clone());
        }
        Ok(CoeffElem {
            spec: self.spec.clone(),
            terms,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_spec(other)?;
        let mut terms = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<i32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                accumulate(&mut terms, &e, c1 * c2);
            }
        }
        Ok(CoeffElem {
            spec: self.spec.clone(),
            terms,
        })
    }

    pub fn scale_int(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero(&self.spec);
        }
        CoeffElem {
            spec: self.spec.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.spec);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// True iff the element is `±(monomial in invertible parameters)`.
    pub fn is_unit(&self) -> bool {
        if self.terms.len() != 1 {
            return false;
        }
        let (e, c) = self.terms.iter().next().unwrap();
        c.abs().is_one()
            && e.iter()
                .enumerate()
                .all(|(i, &x)| x == 0 || self.spec.is_invertible(i))
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_unit() {
            return None;
        }
        let (e, c) = self.terms.iter().next().unwrap();
        let mut terms = BTreeMap::new();
        terms.insert(e.iter().map(|x| -x).collect(), c.clone());
        Some(CoeffElem {
            spec: self.spec.clone(),
            terms,
        })
    }

    /// Ring homomorphism into the ring of `target`, sending each parameter to
    /// its assigned value. Parameters without an assignment map to the
    /// parameter of the same name in `target`.
    pub fn specialize(
        &self,
        target: &Arc<ParamSpec>,
        assignment: &BTreeMap<String, CoeffElem>,
    ) -> Result<Self> {
        let images = param_images(&self.spec, target, assignment)?;
        self.specialize_with(target, &images)
    }

    pub(crate) fn specialize_with(
        &self,
        target: &Arc<ParamSpec>,
        images: &[ParamImage],
    ) -> Result<Self> {
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut t = Self::from_bigint(target, c.clone());
            for (i, &x) in e.iter().enumerate() {
                if x > 0 {
                    t = &t * &images[i].value.pow(x as u32);
                } else if x < 0 {
                    let inv = images[i].inverse.as_ref().ok_or_else(|| {
                        Error::Domain(format!(
                            "parameter `{}` has a negative exponent but its image is not a unit",
                            self.spec.names[i]
                        ))
                    })?;
                    t = &t * &inv.pow((-x) as u32);
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// `{"terms":[{"exps":{"v":1},"int":"-1"}]}`
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let exps: serde_json::Map<String, Value> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0)
                    .map(|(i, &x)| (self.spec.names[i].clone(), json!(x)))
                    .collect();
                json!({"exps": exps, "int": c.to_string()})
            })
            .collect();
        json!({ "terms": terms })
    }

    pub fn from_json(spec: &Arc<ParamSpec>, value: &Value) -> Result<Self> {
        let terms = value
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("coefficient needs a `terms` array".into()))?;
        let mut out = Self::zero(spec);
        for t in terms {
            let int = match t.get("int") {
                Some(Value::String(s)) => s
                    .trim()
                    .parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("bad integer `{s}`")))?,
                Some(Value::Number(n)) => n
                    .as_i64()
                    .map(BigInt::from)
                    .ok_or_else(|| Error::Parse(format!("bad integer {n}")))?,
                _ => return Err(Error::Parse("term needs an `int` field".into())),
            };
            let mut exps = vec![0i32; spec.len()];
            if let Some(map) = t.get("exps") {
                let map = map
                    .as_object()
                    .ok_or_else(|| Error::Parse("`exps` must be an object".into()))?;
                for (name, x) in map {
                    let i = spec
                        .index_of(name)
                        .ok_or_else(|| Error::Parse(format!("unknown parameter `{name}`")))?;
                    let x = x
                        .as_i64()
                        .and_then(|x| i32::try_from(x).ok())
                        .ok_or_else(|| Error::Parse(format!("bad exponent for `{name}`")))?;
                    exps[i] += x;
                }
            }
            let term = Self::monomial(spec, exps, int)?;
            out = &out + &term;
        }
        Ok(out)
    }
}

pub(crate) struct ParamImage {
    value: CoeffElem,
    inverse: Option<CoeffElem>,
}

pub(crate) fn param_images(
    source: &Arc<ParamSpec>,
    target: &Arc<ParamSpec>,
    assignment: &BTreeMap<String, CoeffElem>,
) -> Result<Vec<ParamImage>> {
    for name in assignment.keys() {
        if source.index_of(name).is_none() {
            return Err(Error::Domain(format!("no parameter `{name}` to specialize")));
        }
    }
    let mut out = Vec::with_capacity(source.len());
    for (i, name) in source.names.iter().enumerate() {
        let value = match assignment.get(name) {
            Some(v) => {
                if !same_spec(v.spec(), target) {
                    return Err(Error::Structural(format!(
                        "value assigned to `{name}` is not in the target ring"
                    )));
                }
                v.clone()
            }
            None => CoeffElem::param(target, name).map_err(|_| {
                Error::Domain(format!("parameter `{name}` is not assigned"))
            })?,
        };
        let inverse = value.inverse();
        if source.is_invertible(i) && inverse.is_none() {
            return Err(Error::Domain(format!(
                "invertible parameter `{name}` must be sent to a unit, got {value}"
            )));
        }
        out.push(ParamImage { value, inverse });
    }
    Ok(out)
}

fn accumulate(terms: &mut BTreeMap<Vec<i32>, BigInt>, e: &[i32], c: BigInt) {
    if c.is_zero() {
        return;
    }
    if let Some(slot) = terms.get_mut(e) {
        *slot += c;
        if slot.is_zero() {
            terms.remove(e);
        }
    } else {
        terms.insert(e.to_vec(), c);
    }
}

impl fmt::Display for CoeffElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let mut factors = Vec::new();
            for (i, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => factors.push(self.spec.names[i].clone()),
                    _ => factors.push(format!("{}^{}", self.spec.names[i], x)),
                }
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{mag}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Add for &CoeffElem {
    type Output = CoeffElem;
    fn add(self, rhs: &CoeffElem) -> CoeffElem {
        self.checked_add(rhs).expect("coefficient ring mismatch")
    }
}

impl Sub for &CoeffElem {
    type Output = CoeffElem;
    fn sub(self, rhs: &CoeffElem) -> CoeffElem {
        self.checked_sub(rhs).expect("coefficient ring mismatch")
    }
}

impl Mul for &CoeffElem {
    type Output = CoeffElem;
    fn mul(self, rhs: &CoeffElem) -> CoeffElem {
        self.checked_mul(rhs).expect("coefficient ring mismatch")
    }
}

impl Neg for &CoeffElem {
    type Output = CoeffElem;
    fn neg(self) -> CoeffElem {
        CoeffElem {
            spec: self.spec.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zv() -> Arc<ParamSpec> {
        ParamSpec::new(&["v"], &[]).unwrap()
    }

    #[test]
    fn additive_inverse_cancels() {
        let s = zv();
        let v = CoeffElem::param(&s, "v").unwrap();
        assert!((&v + &-&v).is_zero());
    }

    #[test]
    fn declared_unit_times_inverse_is_one() {
        let s = ParamSpec::new(&["beta"], &["beta"]).unwrap();
        let b = CoeffElem::param(&s, "beta").unwrap();
        let binv = CoeffElem::monomial(&s, vec![-1], BigInt::one()).unwrap();
        assert!((&b * &binv).is_one());
    }

    #[test]
    fn product_of_conjugate_binomials() {
        // (1-2v)(1+2v) expanded by hand: 1 + 2v - 2v - 4v^2
        let s = zv();
        let v = CoeffElem::param(&s, "v").unwrap();
        let one = CoeffElem::one(&s);
        let two_v = v.scale_int(&BigInt::from(2));
        let lhs = &(&one - &two_v) * &(&one + &two_v);
        let expected = CoeffElem::monomial(&s, vec![2], BigInt::from(-4)).unwrap();
        assert_eq!(lhs, &one + &expected);
    }

    #[test]
    fn mismatched_specs_are_structural_errors() {
        let a = CoeffElem::param(&zv(), "v").unwrap();
        let b = CoeffElem::one(&ParamSpec::integers());
        assert!(matches!(a.checked_add(&b), Err(Error::Structural(_))));
        assert!(matches!(a.checked_mul(&b), Err(Error::Structural(_))));
    }

    #[test]
    fn unit_detection() {
        let s = ParamSpec::new(&["beta", "v"], &["beta"]).unwrap();
        assert!(CoeffElem::one(&s).is_unit());
        let mb3 = CoeffElem::monomial(&s, vec![3, 0], BigInt::from(-1)).unwrap();
        assert!(mb3.is_unit());
        let inv = CoeffElem::monomial(&s, vec![-3, 0], BigInt::from(-1)).unwrap();
        assert!((&mb3 * &inv).is_one());
        assert_eq!(mb3.inverse().unwrap(), inv);
        assert!(!CoeffElem::param(&s, "v").unwrap().is_unit());
        assert!(!CoeffElem::from_int(&s, 2).is_unit());
        assert!(!CoeffElem::zero(&s).is_unit());
    }

    #[test]
    fn negative_exponent_on_plain_parameter_rejected() {
        assert!(CoeffElem::monomial(&zv(), vec![-1], BigInt::one()).is_err());
    }

    #[test]
    fn specialization_examples() {
        let s = zv();
        let z = ParamSpec::integers();
        let v = CoeffElem::param(&s, "v").unwrap();
        let one = CoeffElem::one(&s);
        let at = |k: i64| {
            let mut m = BTreeMap::new();
            m.insert("v".to_string(), CoeffElem::from_int(&z, k));
            m
        };
        assert!((&one - &v).specialize(&z, &at(0)).unwrap().is_one());
        assert!((&one - &v).specialize(&z, &at(1)).unwrap().is_zero());
        let p = &(&v * &v) + &v;
        assert_eq!(
            p.specialize(&z, &at(2)).unwrap(),
            CoeffElem::from_int(&z, 6)
        );
    }

    #[test]
    fn invertible_parameter_needs_unit_image() {
        let s = ParamSpec::new(&["beta"], &["beta"]).unwrap();
        let z = ParamSpec::integers();
        let mut m = BTreeMap::new();
        m.insert("beta".to_string(), CoeffElem::from_int(&z, 2));
        let b = CoeffElem::param(&s, "beta").unwrap();
        assert!(matches!(b.specialize(&z, &m), Err(Error::Domain(_))));
        m.insert("beta".to_string(), CoeffElem::from_int(&z, -1));
        let binv = b.inverse().unwrap();
        assert_eq!(
            binv.specialize(&z, &m).unwrap(),
            CoeffElem::from_int(&z, -1)
        );
    }

    #[test]
    fn json_shape() {
        let s = zv();
        let v = CoeffElem::param(&s, "v").unwrap();
        let x = &CoeffElem::from_int(&s, 3) - &v;
        let j = x.to_json();
        assert_eq!(
            j,
            json!({"terms":[{"exps":{},"int":"3"},{"exps":{"v":1},"int":"-1"}]})
        );
        assert_eq!(CoeffElem::from_json(&s, &j).unwrap(), x);
        let big: Value =
            serde_json::from_str(r#"{"terms":[{"exps":{},"int":"123456789012345678901234567890"}]}"#)
                .unwrap();
        let b = CoeffElem::from_json(&s, &big).unwrap();
        assert_eq!(b.to_string(), "123456789012345678901234567890");
    }

    #[test]
    fn display_is_readable() {
        let s = zv();
        let v = CoeffElem::param(&s, "v").unwrap();
        let x = &(&v * &v).scale_int(&BigInt::from(-3)) + &CoeffElem::one(&s);
        assert_eq!(x.to_string(), "-3*v^2 + 1");
    }
}
