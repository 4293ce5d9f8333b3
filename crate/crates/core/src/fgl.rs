//! One-dimensional commutative formal group laws as truncated coefficient
//! tables, and the formal operations `+_F`, `-_F` and `n ._F` on any
//! [`FormalHost`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::coeff::{same_spec, CoeffElem, ParamSpec};
use crate::error::{Error, Result};
use crate::series::{FormalHost, Monomial, Series};

pub const DEFAULT_TRUNCATION: u32 = 6;

#[derive(Debug, Clone, PartialEq)]
pub enum FglVariant {
    /// `x + y`
    Additive,
    /// `x + y - v x y`
    Multiplicative(CoeffElem),
    /// `(x + y) / (1 + u2 x y)`
    Lorentz(CoeffElem),
    /// Arbitrary table.
    Generic,
}

/// `F(x, y) = sum a_{i,j} x^i y^j` for `i + j <= N`.
#[derive(Clone)]
pub struct FormalGroupLaw {
    variant: FglVariant,
    spec: Arc<ParamSpec>,
    degree: u32,
    // table[i][j] = a_{i,j}, defined for i + j <= degree
    table: Vec<Vec<CoeffElem>>,
}

impl fmt::Debug for FormalGroupLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormalGroupLaw({:?}, N={})", self.variant, self.degree)
    }
}

impl FormalGroupLaw {
    fn empty_table(spec: &Arc<ParamSpec>, degree: u32) -> Vec<Vec<CoeffElem>> {
        (0..=degree)
            .map(|i| vec![CoeffElem::zero(spec); (degree - i + 1) as usize])
            .collect()
    }

    fn linear_table(spec: &Arc<ParamSpec>, degree: u32) -> Vec<Vec<CoeffElem>> {
        let mut t = Self::empty_table(spec, degree);
        t[1][0] = CoeffElem::one(spec);
        t[0][1] = CoeffElem::one(spec);
        t
    }

    pub fn additive(spec: &Arc<ParamSpec>, degree: u32) -> Result<Self> {
        check_degree(degree)?;
        Ok(FormalGroupLaw {
            variant: FglVariant::Additive,
            spec: spec.clone(),
            degree,
            table: Self::linear_table(spec, degree),
        })
    }

    pub fn multiplicative(v: CoeffElem, degree: u32) -> Result<Self> {
        check_degree(degree)?;
        let spec = v.spec().clone();
        let mut table = Self::linear_table(&spec, degree);
        if degree >= 2 {
            table[1][1] = -&v;
        }
        Ok(FormalGroupLaw {
            variant: FglVariant::Multiplicative(v),
            spec,
            degree,
            table,
        })
    }

    /// Expands `(x + y) * sum_k (-u2 x y)^k`.
    pub fn lorentz(u2: CoeffElem, degree: u32) -> Result<Self> {
        check_degree(degree)?;
        let spec = u2.spec().clone();
        let mut table = Self::empty_table(&spec, degree);
        let minus_u2 = -&u2;
        let mut k = 0u32;
        while 2 * k + 1 <= degree {
            let c = minus_u2.pow(k);
            table[(k + 1) as usize][k as usize] = c.clone();
            table[k as usize][(k + 1) as usize] = c;
            k += 1;
        }
        Ok(FormalGroupLaw {
            variant: FglVariant::Lorentz(u2),
            spec,
            degree,
            table,
        })
    }

    /// A law given by its coefficients `a_{i,j}`; missing entries are zero.
    /// No axiom is enforced here, see [`check_fgl_axioms`].
    pub fn generic(
        spec: &Arc<ParamSpec>,
        degree: u32,
        entries: impl IntoIterator<Item = ((u32, u32), CoeffElem)>,
    ) -> Result<Self> {
        check_degree(degree)?;
        let mut table = Self::empty_table(spec, degree);
        for ((i, j), c) in entries {
            if i + j > degree {
                return Err(Error::Domain(format!(
                    "coefficient a_{{{i},{j}}} exceeds truncation degree {degree}"
                )));
            }
            if !same_spec(c.spec(), spec) {
                return Err(Error::Structural("coefficient ring mismatch".into()));
            }
            table[i as usize][j as usize] = c;
        }
        Ok(FormalGroupLaw {
            variant: FglVariant::Generic,
            spec: spec.clone(),
            degree,
            table,
        })
    }

    /// The law `g(F(g^-1(x), g^-1(y)))` for the strict isomorphism
    /// `g(x) = x + sum_{k>=2} iso[k-2] x^k`. Conjugating an integral law by an
    /// integral strict isomorphism yields an integral law.
    pub fn conjugate(base: &FormalGroupLaw, iso: &[CoeffElem]) -> Result<Self> {
        let n = base.degree;
        let spec = base.spec.clone();
        let mut g = vec![CoeffElem::zero(&spec), CoeffElem::one(&spec)];
        for k in 2..=n as usize {
            g.push(iso.get(k - 2).cloned().unwrap_or_else(|| CoeffElem::zero(&spec)));
        }
        let ginv = revert(&g, n)?;
        let x = Series::var(&spec, 2, n, 0);
        let y = Series::var(&spec, 2, n, 1);
        let gx = compose(&ginv, &x)?;
        let gy = compose(&ginv, &y)?;
        let s = base.formal_sum(&gx, &gy)?;
        let conj = compose(&g, &s)?;
        let entries = conj
            .terms()
            .map(|(m, c)| ((m.exp(0), m.exp(1)), c.clone()))
            .collect::<Vec<_>>();
        Self::generic(&spec, n, entries)
    }

    pub fn variant(&self) -> &FglVariant {
        &self.variant
    }

    pub fn spec(&self) -> &Arc<ParamSpec> {
        &self.spec
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// `a_{i,j}`; zero beyond the table.
    pub fn coeff(&self, i: u32, j: u32) -> CoeffElem {
        if i + j > self.degree {
            return CoeffElem::zero(&self.spec);
        }
        self.table[i as usize][j as usize].clone()
    }

    /// Nonzero entries `((i, j), a_{i,j})`.
    pub fn entries(&self) -> impl Iterator<Item = ((u32, u32), &CoeffElem)> {
        self.table.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(move |(j, c)| ((i as u32, j as u32), c))
        })
    }

    /// True when every coefficient beyond the table is known to vanish.
    pub fn is_polynomial(&self) -> bool {
        matches!(
            self.variant,
            FglVariant::Additive | FglVariant::Multiplicative(_)
        )
    }

    /// `Some(v)` when the law has the form `x + y - v x y` within its table.
    pub fn multiplicative_parameter(&self) -> Option<CoeffElem> {
        match &self.variant {
            FglVariant::Additive => Some(CoeffElem::zero(&self.spec)),
            FglVariant::Multiplicative(v) => Some(v.clone()),
            _ => {
                for ((i, j), c) in self.entries() {
                    let ok = match (i, j) {
                        (1, 0) | (0, 1) => c.is_one(),
                        (1, 1) => true,
                        _ => false,
                    };
                    if !ok {
                        return None;
                    }
                }
                if self.coeff(1, 0).is_one() && self.coeff(0, 1).is_one() {
                    Some(-&self.coeff(1, 1))
                } else {
                    None
                }
            }
        }
    }

    /// Applies a parameter specialization to every table entry.
    pub fn specialize(
        &self,
        target: &Arc<ParamSpec>,
        assignment: &BTreeMap<String, CoeffElem>,
    ) -> Result<Self> {
        let images = crate::coeff::param_images(&self.spec, target, assignment)?;
        let map = |c: &CoeffElem| c.specialize_with(target, &images);
        let variant = match &self.variant {
            FglVariant::Additive => FglVariant::Additive,
            FglVariant::Multiplicative(v) => FglVariant::Multiplicative(map(v)?),
            FglVariant::Lorentz(u) => FglVariant::Lorentz(map(u)?),
            FglVariant::Generic => FglVariant::Generic,
        };
        let table = self
            .table
            .iter()
            .map(|row| row.iter().map(&map).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(FormalGroupLaw {
            variant,
            spec: target.clone(),
            degree: self.degree,
            table,
        })
    }

    fn check_host<H: FormalHost>(&self, a: &H) -> Result<()> {
        if !same_spec(a.coeff_spec(), &self.spec) {
            return Err(Error::Structural(
                "host coefficients differ from the formal group law's ring".into(),
            ));
        }
        if !self.is_polynomial() && a.truncation() > self.degree {
            return Err(Error::Structural(format!(
                "formal group law known to degree {} but host truncates at {}",
                self.degree,
                a.truncation()
            )));
        }
        if !a.constant_term().is_zero() {
            return Err(Error::Domain(
                "formal operations need elements with zero constant term".into(),
            ));
        }
        Ok(())
    }

    /// `a +_F b = F(a, b)`.
    pub fn formal_sum<H: FormalHost>(&self, a: &H, b: &H) -> Result<H> {
        self.check_host(a)?;
        self.check_host(b)?;
        let n = a.truncation();
        let pa = a.powers(n)?;
        let pb = b.powers(n)?;
        let mut acc = a.zero_like();
        for ((i, j), c) in self.entries() {
            if i + j > a.truncation() {
                continue;
            }
            let term = pa[i as usize].try_mul(&pb[j as usize])?.scale(c)?;
            acc = acc.try_add(&term)?;
        }
        Ok(acc)
    }

    /// Coefficients `c_1, ..., c_n` of the formal inverse `chi(z)`, solved
    /// degree by degree from `F(z, chi(z)) = 0`.
    pub fn inverse_coefficients(&self, n: u32) -> Result<Vec<CoeffElem>> {
        if !self.is_polynomial() && n > self.degree {
            return Err(Error::Structural(format!(
                "formal inverse requested to degree {n} beyond table degree {}",
                self.degree
            )));
        }
        let spec = &self.spec;
        let z = Series::var(spec, 1, n, 0);
        let mut chi = z.negate();
        for k in 2..=n {
            let lhs = self.formal_sum(&z, &chi)?;
            let e = lhs.coeff_at(k);
            if !e.is_zero() {
                let fix = Series::from_terms(spec, 1, n, [(Monomial::new(vec![k]), -&e)])?;
                chi = chi.try_add(&fix)?;
            }
        }
        let mut out = vec![CoeffElem::zero(spec)];
        for k in 1..=n {
            out.push(chi.coeff_at(k));
        }
        Ok(out)
    }

    /// `chi(a)`, the element with `a +_F chi(a) = 0`.
    pub fn formal_inverse<H: FormalHost>(&self, a: &H) -> Result<H> {
        self.check_host(a)?;
        let n = a.truncation();
        let chi = self.inverse_coefficients(n)?;
        let pa = a.powers(n)?;
        let mut acc = a.zero_like();
        for k in 1..=n as usize {
            if chi[k].is_zero() {
                continue;
            }
            acc = acc.try_add(&pa[k].scale(&chi[k])?)?;
        }
        Ok(acc)
    }

    /// `a -_F b = a +_F chi(b)`.
    pub fn formal_difference<H: FormalHost>(&self, a: &H, b: &H) -> Result<H> {
        self.formal_sum(a, &self.formal_inverse(b)?)
    }

    /// `n ._F a`; negative `n` gives the formal inverse of `|n| ._F a`.
    pub fn int_multiple<H: FormalHost>(&self, n: i64, a: &H) -> Result<H> {
        self.check_host(a)?;
        let mut k = n.unsigned_abs();
        let mut acc = a.zero_like();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.formal_sum(&acc, &base)?;
            }
            k >>= 1;
            if k > 0 {
                base = self.formal_sum(&base, &base)?;
            }
        }
        if n < 0 {
            self.formal_inverse(&acc)
        } else {
            Ok(acc)
        }
    }

    /// Builds a law from a selector: `additive`, `mult:<p>`, `mult:unit:<p>`
    /// or `lorentz:<p>`, where `<p>` is an integer or a parameter name.
    /// `mult:unit:<p>` makes the parameter invertible. Generic tables are
    /// read with [`FormalGroupLaw::from_json`].
    pub fn from_selector(selector: &str, degree: u32) -> Result<Self> {
        let param = |p: &str, invertible: bool| -> Result<CoeffElem> {
            if let Ok(k) = p.parse::<i64>() {
                if invertible && k != 1 && k != -1 {
                    return Err(Error::Parse(format!("`{k}` is not a unit")));
                }
                return Ok(CoeffElem::from_int(&ParamSpec::integers(), k));
            }
            let valid = p.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(Error::Parse(format!("bad parameter `{p}` in FGL selector")));
            }
            let inv: &[&str] = if invertible { &[p] } else { &[] };
            CoeffElem::param(&ParamSpec::new(&[p], inv)?, p)
        };
        match selector.split_once(':') {
            None if selector == "additive" => Self::additive(&ParamSpec::integers(), degree),
            Some(("mult", rest)) => match rest.strip_prefix("unit:") {
                Some(p) => Self::multiplicative(param(p, true)?, degree),
                None => Self::multiplicative(param(rest, false)?, degree),
            },
            Some(("lorentz", p)) => Self::lorentz(param(p, false)?, degree),
            _ => Err(Error::Parse(format!(
                "unknown FGL selector `{selector}` (additive, mult:v, mult:unit:b, lorentz:u2, generic:<file>)"
            ))),
        }
    }

    /// `{"N":6,"a":{"1,1":{...}}}` plus the parameter declaration.
    pub fn to_json(&self) -> Value {
        let a: serde_json::Map<String, Value> = self
            .entries()
            .map(|((i, j), c)| (format!("{i},{j}"), c.to_json()))
            .collect();
        let inv: Vec<&str> = self.spec.invertible_names().collect();
        json!({"N": self.degree, "params": self.spec.names(), "invertible": inv, "a": a})
    }

    /// Reads a generic table. Parameters come from `params`/`invertible` when
    /// present, otherwise from the names used in the coefficients.
    pub fn from_json(value: &Value) -> Result<Self> {
        let degree = value
            .get("N")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("table needs a positive integer `N`".into()))?
            as u32;
        let a = value
            .get("a")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Parse("table needs an object `a`".into()))?;
        let str_list = |key: &str| -> Result<Option<Vec<String>>> {
            match value.get(key) {
                None => Ok(None),
                Some(Value::Array(xs)) => xs
                    .iter()
                    .map(|x| {
                        x.as_str()
                            .map(str::to_string)
                            .ok_or_else(|| Error::Parse(format!("`{key}` must list strings")))
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(Some),
                Some(_) => Err(Error::Parse(format!("`{key}` must be an array"))),
            }
        };
        let names = match str_list("params")? {
            Some(n) => n,
            None => {
                let mut set = std::collections::BTreeSet::new();
                for c in a.values() {
                    for t in c.get("terms").and_then(Value::as_array).into_iter().flatten() {
                        if let Some(m) = t.get("exps").and_then(Value::as_object) {
                            set.extend(m.keys().cloned());
                        }
                    }
                }
                set.into_iter().collect()
            }
        };
        let inv = str_list("invertible")?.unwrap_or_default();
        let names_ref: Vec<&str> = names.iter().map(String::as_str).collect();
        let inv_ref: Vec<&str> = inv.iter().map(String::as_str).collect();
        let spec = ParamSpec::new(&names_ref, &inv_ref)?;
        let mut entries = Vec::new();
        let mut seen_linear = [false, false];
        for (k, c) in a {
            let (i, j) = k
                .split_once(',')
                .and_then(|(i, j)| Some((i.trim().parse::<u32>().ok()?, j.trim().parse::<u32>().ok()?)))
                .ok_or_else(|| Error::Parse(format!("bad table key `{k}`, expected \"i,j\"")))?;
            if (i, j) == (1, 0) {
                seen_linear[0] = true;
            }
            if (i, j) == (0, 1) {
                seen_linear[1] = true;
            }
            entries.push(((i, j), CoeffElem::from_json(&spec, c)?));
        }
        if !seen_linear[0] {
            entries.push(((1, 0), CoeffElem::one(&spec)));
        }
        if !seen_linear[1] {
            entries.push(((0, 1), CoeffElem::one(&spec)));
        }
        Self::generic(&spec, degree, entries)
    }
}

fn check_degree(degree: u32) -> Result<()> {
    if degree == 0 {
        Err(Error::Domain("truncation degree must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `sum_k g[k] * s^k`, for `s` with zero constant term.
fn compose(g: &[CoeffElem], s: &Series) -> Result<Series> {
    let n = s.truncation();
    let ps = s.powers(n)?;
    let mut acc = s.zero_like();
    for (k, c) in g.iter().enumerate().take(n as usize + 1) {
        if !c.is_zero() {
            acc = acc.try_add(&ps[k].scale(c)?)?;
        }
    }
    Ok(acc)
}

/// Compositional inverse of `g = x + ...`.
fn revert(g: &[CoeffElem], n: u32) -> Result<Vec<CoeffElem>> {
    let spec = g[1].spec().clone();
    let mut h = Series::var(&spec, 1, n, 0);
    for k in 2..=n {
        let e = compose(g, &h)?.coeff_at(k);
        if !e.is_zero() {
            h = h.try_add(&Series::from_terms(&spec, 1, n, [(Monomial::new(vec![k]), -&e)])?)?;
        }
    }
    Ok((0..=n).map(|k| h.coeff_at(k)).collect())
}

/// One failed axiom check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomFailure {
    /// `a_{i,j} != a_{j,i}`
    Symmetry { i: u32, j: u32 },
    /// `F(x, 0) != x` at the coefficient `a_{i,0}` (or `a_{0,i}`).
    Neutral { i: u32, j: u32 },
    /// Coefficient of `x^a y^b z^c` differs between the two bracketings.
    Associativity { exps: [u32; 3] },
}

impl fmt::Display for AxiomFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomFailure::Symmetry { i, j } => write!(f, "symmetry fails at a_{{{i},{j}}}"),
            AxiomFailure::Neutral { i, j } => write!(f, "neutral element fails at a_{{{i},{j}}}"),
            AxiomFailure::Associativity { exps } => write!(
                f,
                "associativity fails at x^{} y^{} z^{}",
                exps[0], exps[1], exps[2]
            ),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct AxiomReport {
    pub failures: Vec<AxiomFailure>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn first_failure(&self) -> Option<&AxiomFailure> {
        self.failures.first()
    }
}

/// Checks symmetry, `F(x,0) = x`, and associativity up to the table degree.
pub fn check_fgl_axioms(fgl: &FormalGroupLaw) -> AxiomReport {
    let n = fgl.degree;
    let mut failures = Vec::new();
    for d in 0..=n {
        for i in 0..=d {
            let j = d - i;
            if i < j && fgl.coeff(i, j) != fgl.coeff(j, i) {
                failures.push(AxiomFailure::Symmetry { i, j });
            }
        }
    }
    for i in 0..=n {
        let want = if i == 1 { 1 } else { 0 };
        let want = CoeffElem::from_int(&fgl.spec, want);
        if fgl.coeff(i, 0) != want {
            failures.push(AxiomFailure::Neutral { i, j: 0 });
        }
        if fgl.coeff(0, i) != want {
            failures.push(AxiomFailure::Neutral { i: 0, j: i });
        }
    }
    let spec = &fgl.spec;
    let x = Series::var(spec, 3, n, 0);
    let y = Series::var(spec, 3, n, 1);
    let z = Series::var(spec, 3, n, 2);
    let assoc = fgl
        .formal_sum(&y, &z)
        .and_then(|yz| fgl.formal_sum(&x, &yz))
        .and_then(|l| {
            let r = fgl.formal_sum(&fgl.formal_sum(&x, &y)?, &z)?;
            Ok(l.first_difference(&r))
        });
    match assoc {
        Ok(Some(m)) => failures.push(AxiomFailure::Associativity {
            exps: [m.exp(0), m.exp(1), m.exp(2)],
        }),
        Ok(None) => {}
        // formal_sum on fresh variables cannot fail for a well-formed table
        Err(e) => unreachable!("associativity expansion failed: {e}"),
    }
    AxiomReport { failures }
}

/// Random integral law obtained by conjugating `base` with a strict
/// isomorphism whose coefficients lie in `[-bound, bound]`.
pub fn random_conjugate<R: rand::Rng>(
    base: &FormalGroupLaw,
    rng: &mut R,
    bound: i64,
) -> Result<FormalGroupLaw> {
    let spec = base.spec.clone();
    let iso: Vec<CoeffElem> = (2..=base.degree)
        .map(|_| CoeffElem::from_bigint(&spec, BigInt::from(rng.gen_range(-bound..=bound))))
        .collect();
    FormalGroupLaw::conjugate(base, &iso)
}
