//! Truncated Stanley-Reisner power series on a fan: arithmetic in the
//! quotient by non-face monomials, restriction to cones, gluing, character
//! classes, presentations and the ordinary (non-equivariant) reduction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::coeff::{same_spec, CoeffElem, ParamSpec};
use crate::error::{Error, Result};
use crate::fan::{Cone, Fan};
use crate::fgl::FormalGroupLaw;
use crate::lattice::EchelonLattice;
use crate::series::{add_term, fmt_terms, FormalHost, Monomial, Series};

/// Above this many maximal cones `glue_tuple` reads coefficients off the
/// owning cone instead of summing over all subsets of cones.
pub const INCLUSION_EXCLUSION_LIMIT: usize = 20;

/// An element of the truncated ring `R[[x_rho]] / I_fan`: every stored
/// monomial is supported on a face and has degree at most the truncation.
#[derive(Clone)]
pub struct SRSeries {
    fan: Arc<Fan>,
    spec: Arc<ParamSpec>,
    trunc: u32,
    terms: BTreeMap<Monomial, CoeffElem>,
}

impl fmt::Debug for SRSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SRSeries(N={}, {})", self.trunc, self)
    }
}

impl PartialEq for SRSeries {
    fn eq(&self, other: &Self) -> bool {
        self.trunc == other.trunc
            && same_spec(&self.spec, &other.spec)
            && same_fan(&self.fan, &other.fan)
            && self.terms == other.terms
    }
}

fn same_fan(a: &Arc<Fan>, b: &Arc<Fan>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl SRSeries {
    pub fn zero(fan: &Arc<Fan>, spec: &Arc<ParamSpec>, trunc: u32) -> Self {
        SRSeries {
            fan: fan.clone(),
            spec: spec.clone(),
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(fan: &Arc<Fan>, trunc: u32, c: CoeffElem) -> Self {
        let mut out = Self::zero(fan, c.spec(), trunc);
        add_term(&mut out.terms, Monomial::one(fan.num_rays()), c);
        out
    }

    pub fn one(fan: &Arc<Fan>, spec: &Arc<ParamSpec>, trunc: u32) -> Self {
        Self::constant(fan, trunc, CoeffElem::one(spec))
    }

    /// The divisor variable `x_rho`.
    pub fn var(fan: &Arc<Fan>, spec: &Arc<ParamSpec>, trunc: u32, ray: usize) -> Self {
        Self::normalize(
            fan,
            spec,
            trunc,
            [(Monomial::var(fan.num_rays(), ray), CoeffElem::one(spec))],
        )
    }

    pub fn var_by_label(
        fan: &Arc<Fan>,
        spec: &Arc<ParamSpec>,
        trunc: u32,
        label: &str,
    ) -> Result<Self> {
        let ray = fan
            .ray_index(label)
            .ok_or_else(|| Error::Domain(format!("no ray labelled `{label}`")))?;
        Ok(Self::var(fan, spec, trunc, ray))
    }

    /// Sums the raw terms, dropping monomials with non-face support or degree
    /// above `trunc`. Monomials must have one exponent per ray.
    pub fn normalize(
        fan: &Arc<Fan>,
        spec: &Arc<ParamSpec>,
        trunc: u32,
        raw: impl IntoIterator<Item = (Monomial, CoeffElem)>,
    ) -> Self {
        let mut terms = BTreeMap::new();
        for (m, c) in raw {
            assert_eq!(m.nvars(), fan.num_rays(), "monomial length must match the ray count");
            if m.degree() <= trunc && fan.is_face_mask(m.support_mask()) {
                add_term(&mut terms, m, c);
            }
        }
        SRSeries {
            fan: fan.clone(),
            spec: spec.clone(),
            trunc,
            terms,
        }
    }

    /// Image of a raw series in the variables `x_rho` (one per ray).
    pub fn from_series(fan: &Arc<Fan>, s: &Series) -> Result<Self> {
        if s.nvars() != fan.num_rays() {
            return Err(Error::Structural(format!(
                "series has {} variables but the fan has {} rays",
                s.nvars(),
                fan.num_rays()
            )));
        }
        Ok(Self::normalize(
            fan,
            s.coeff_spec(),
            s.truncation(),
            s.terms().map(|(m, c)| (m.clone(), c.clone())),
        ))
    }

    /// The canonical representative as a raw series.
    pub fn to_series(&self) -> Series {
        Series::from_terms(
            &self.spec,
            self.fan.num_rays(),
            self.trunc,
            self.terms.iter().map(|(m, c)| (m.clone(), c.clone())),
        )
        .expect("terms share the coefficient ring")
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &CoeffElem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> CoeffElem {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| CoeffElem::zero(&self.spec))
    }

    pub fn with_truncation(&self, trunc: u32) -> Self {
        Self::normalize(
            &self.fan,
            &self.spec,
            trunc,
            self.terms.iter().map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    fn check_context(&self, other: &Self) -> Result<()> {
        if !same_fan(&self.fan, &other.fan) {
            return Err(Error::Structural("elements live on different fans".into()));
        }
        if !same_spec(&self.spec, &other.spec) {
            return Err(Error::Structural(
                "elements have different coefficient rings".into(),
            ));
        }
        if self.trunc != other.trunc {
            return Err(Error::Structural(format!(
                "truncations differ ({} vs {})",
                self.trunc, other.trunc
            )));
        }
        Ok(())
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.negate())
    }

    /// Monomials where `self` and `other` differ, smallest first.
    pub fn first_difference(&self, other: &Self) -> Option<Monomial> {
        let keys: BTreeSet<&Monomial> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .find(|m| self.terms.get(*m) != other.terms.get(*m))
            .cloned()
    }

    /// Sets `x_rho = 0` for every ray outside `cone`.
    pub fn restrict(&self, cone: &Cone) -> Self {
        let mask = cone.mask();
        SRSeries {
            fan: self.fan.clone(),
            spec: self.spec.clone(),
            trunc: self.trunc,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.support_mask() & !mask == 0)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Restrictions to all maximal cones, in fan order.
    pub fn restrictions(&self) -> Vec<SRSeries> {
        self.fan.max_cones().iter().map(|c| self.restrict(c)).collect()
    }

    pub fn is_supported_on(&self, cone: &Cone) -> bool {
        let mask = cone.mask();
        self.terms.keys().all(|m| m.support_mask() & !mask == 0)
    }

    pub fn specialize(
        &self,
        target: &Arc<ParamSpec>,
        assignment: &BTreeMap<String, CoeffElem>,
    ) -> Result<Self> {
        let images = crate::coeff::param_images(&self.spec, target, assignment)?;
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            add_term(&mut terms, m.clone(), c.specialize_with(target, &images)?);
        }
        Ok(SRSeries {
            fan: self.fan.clone(),
            spec: target.clone(),
            trunc: self.trunc,
            terms,
        })
    }

    /// `self` with every coefficient multiplied by `c` and the monomial
    /// multiplied by `m`.
    pub fn mul_monomial(&self, m: &Monomial, c: &CoeffElem) -> Result<Self> {
        let raw = self
            .terms
            .iter()
            .map(|(k, x)| Ok((k.mul(m), x.checked_mul(c)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::normalize(&self.fan, &self.spec, self.trunc, raw))
    }

    /// `[{"monomial":{"L1":2},"coeff":{"terms":[...]}}, ...]`
    pub fn to_json(&self) -> Value {
        let items: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mono: serde_json::Map<String, Value> = m
                    .exps()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (self.fan.label(i).to_string(), json!(e)))
                    .collect();
                json!({"monomial": mono, "coeff": c.to_json()})
            })
            .collect();
        Value::Array(items)
    }

    /// Reads the element format of [`SRSeries::to_json`]. A coefficient may
    /// also be a plain integer or a decimal string.
    pub fn from_json(
        fan: &Arc<Fan>,
        spec: &Arc<ParamSpec>,
        trunc: u32,
        value: &Value,
    ) -> Result<Self> {
        let items = value
            .as_array()
            .ok_or_else(|| Error::Parse("element must be a JSON list of terms".into()))?;
        let mut raw = Vec::new();
        for item in items {
            let mut exps = vec![0u32; fan.num_rays()];
            let mono = item
                .get("monomial")
                .and_then(Value::as_object)
                .ok_or_else(|| Error::Parse("term needs a `monomial` object".into()))?;
            for (label, e) in mono {
                let i = fan
                    .ray_index(label)
                    .ok_or_else(|| Error::Parse(format!("unknown ray label `{label}`")))?;
                let e = e
                    .as_u64()
                    .and_then(|e| u32::try_from(e).ok())
                    .ok_or_else(|| Error::Parse(format!("bad exponent for `{label}`")))?;
                exps[i] += e;
            }
            let coeff = match item.get("coeff") {
                Some(Value::Number(n)) => n
                    .as_i64()
                    .map(|k| CoeffElem::from_int(spec, k))
                    .ok_or_else(|| Error::Parse(format!("bad coefficient {n}")))?,
                Some(Value::String(s)) => s
                    .trim()
                    .parse::<BigInt>()
                    .map(|k| CoeffElem::from_bigint(spec, k))
                    .map_err(|_| Error::Parse(format!("bad coefficient `{s}`")))?,
                Some(c) => CoeffElem::from_json(spec, c)?,
                None => return Err(Error::Parse("term needs a `coeff`".into())),
            };
            raw.push((Monomial::new(exps), coeff));
        }
        Ok(Self::normalize(fan, spec, trunc, raw))
    }
}

impl fmt::Display for SRSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fan = self.fan.clone();
        fmt_terms(f, self.terms.iter(), &|i| format!("x_{}", fan.label(i)))
    }
}

impl FormalHost for SRSeries {
    fn zero_like(&self) -> Self {
        Self::zero(&self.fan, &self.spec, self.trunc)
    }

    fn one_like(&self) -> Self {
        Self::one(&self.fan, &self.spec, self.trunc)
    }

    fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), c.clone());
        }
        Ok(SRSeries {
            terms,
            ..self.zero_like()
        })
    }

    fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        let mut terms = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if a.degree() + b.degree() > self.trunc {
                    continue;
                }
                if !self.fan.is_face_mask(a.support_mask() | b.support_mask()) {
                    continue;
                }
                add_term(&mut terms, a.mul(b), ca * cb);
            }
        }
        Ok(SRSeries {
            terms,
            ..self.zero_like()
        })
    }

    fn scale(&self, c: &CoeffElem) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (m, x) in &self.terms {
            add_term(&mut terms, m.clone(), x.checked_mul(c)?);
        }
        Ok(SRSeries {
            terms,
            ..self.zero_like()
        })
    }

    fn negate(&self) -> Self {
        SRSeries {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
            ..self.zero_like()
        }
    }

    fn constant_term(&self) -> CoeffElem {
        self.coeff(&Monomial::one(self.fan.num_rays()))
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

/// Checks that each tuple entry is supported on its cone and that entries
/// agree on pairwise intersections.
pub fn check_tuple(fan: &Arc<Fan>, tuple: &[SRSeries]) -> Result<()> {
    let cones = fan.max_cones();
    if tuple.len() != cones.len() {
        return Err(Error::Structural(format!(
            "tuple has {} entries but the fan has {} maximal cones",
            tuple.len(),
            cones.len()
        )));
    }
    for (f, cone) in tuple.iter().zip(cones) {
        if !same_fan(&f.fan, fan) {
            return Err(Error::Structural("tuple entry lives on another fan".into()));
        }
        if !f.is_supported_on(cone) {
            return Err(Error::Domain(format!(
                "entry for cone {} has terms outside the cone",
                fan.cone_label(cone)
            )));
        }
    }
    for w in tuple.windows(2) {
        w[0].check_context(&w[1])?;
    }
    for i in 0..cones.len() {
        for j in i + 1..cones.len() {
            let meet = Cone::from_mask(cones[i].mask() & cones[j].mask());
            let a = tuple[i].restrict(&meet);
            let b = tuple[j].restrict(&meet);
            if let Some(m) = a.first_difference(&b) {
                let show = SRSeries::normalize(fan, &a.spec, a.trunc, [(m, CoeffElem::one(&a.spec))]);
                return Err(Error::Incompatible {
                    first: fan.cone_label(&cones[i]),
                    second: fan.cone_label(&cones[j]),
                    monomial: show.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// The unique element whose restriction to each maximal cone is the given
/// tuple entry, by inclusion-exclusion over sets of maximal cones.
pub fn glue_tuple(fan: &Arc<Fan>, tuple: &[SRSeries]) -> Result<SRSeries> {
    check_tuple(fan, tuple)?;
    if tuple.is_empty() {
        return Err(Error::Domain("fan has no maximal cones".into()));
    }
    if tuple.len() > INCLUSION_EXCLUSION_LIMIT {
        return glue_direct(fan, tuple);
    }
    // signed multiplicity of each (lowest cone, intersection) summand
    let cones = fan.max_cones();
    let mut counts: BTreeMap<(usize, u64), i64> = BTreeMap::new();
    fn walk(
        masks: &[u64],
        next: usize,
        first: usize,
        mask: u64,
        size: usize,
        counts: &mut BTreeMap<(usize, u64), i64>,
    ) {
        let sign = if size % 2 == 1 { 1 } else { -1 };
        *counts.entry((first, mask)).or_insert(0) += sign;
        for k in next..masks.len() {
            walk(masks, k + 1, first, mask & masks[k], size + 1, counts);
        }
    }
    let masks: Vec<u64> = cones.iter().map(Cone::mask).collect();
    for i in 0..masks.len() {
        walk(&masks, i + 1, i, masks[i], 1, &mut counts);
    }
    let mut acc = tuple[0].zero_like();
    for ((first, mask), k) in counts {
        if k == 0 {
            continue;
        }
        let piece = tuple[first]
            .restrict(&Cone::from_mask(mask))
            .scale(&CoeffElem::from_int(&tuple[0].spec, k))?;
        acc = acc.try_add(&piece)?;
    }
    Ok(acc)
}

/// Gluing by reading each face monomial's coefficient from any maximal cone
/// containing its support.
pub fn glue_direct(fan: &Arc<Fan>, tuple: &[SRSeries]) -> Result<SRSeries> {
    check_tuple(fan, tuple)?;
    let first = tuple
        .first()
        .ok_or_else(|| Error::Domain("fan has no maximal cones".into()))?;
    let mut terms = BTreeMap::new();
    for f in tuple {
        for (m, c) in &f.terms {
            terms.entry(m.clone()).or_insert_with(|| c.clone());
        }
    }
    Ok(SRSeries {
        terms,
        ..first.zero_like()
    })
}

fn pairing(a: &[i64], b: &[i64]) -> Result<i64> {
    a.iter().zip(b).try_fold(0i64, |acc, (x, y)| {
        x.checked_mul(*y)
            .and_then(|p| acc.checked_add(p))
            .ok_or(Error::Overflow("character pairing"))
    })
}

/// `x_alpha`: the formal sum over rays of `<alpha, v_rho> ._F x_rho`.
pub fn character_class(fan: &Arc<Fan>, fgl: &FormalGroupLaw, alpha: &[i64]) -> Result<SRSeries> {
    if alpha.len() != fan.dim() {
        return Err(Error::Domain(format!(
            "character has length {} but the lattice has rank {}",
            alpha.len(),
            fan.dim()
        )));
    }
    let spec = fgl.spec();
    let n = fgl.degree();
    let mut acc = SRSeries::zero(fan, spec, n);
    for r in 0..fan.num_rays() {
        let k = pairing(alpha, fan.ray(r))?;
        if k == 0 {
            continue;
        }
        let term = fgl.int_multiple(k, &SRSeries::var(fan, spec, n, r))?;
        acc = fgl.formal_sum(&acc, &term)?;
    }
    Ok(acc)
}

/// Variables and relations of a quotient of a truncated power series ring.
/// Relations are raw series in one variable per ray of the fan; rays that
/// are not variables of the presentation never occur in them.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub fan: Arc<Fan>,
    /// Ray indices serving as variables.
    pub variables: Vec<usize>,
    pub relations: Vec<Series>,
    pub spec: Arc<ParamSpec>,
    pub trunc: u32,
}

impl Presentation {
    pub fn variable_labels(&self) -> Vec<String> {
        self.variables
            .iter()
            .map(|&r| self.fan.label(r).to_string())
            .collect()
    }

    pub fn format_relation(&self, rel: &Series) -> String {
        struct Show<'a>(&'a Series, &'a Fan);
        impl fmt::Display for Show<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt_terms(f, self.0.terms(), &|i| format!("x_{}", self.1.label(i)))
            }
        }
        Show(rel, &self.fan).to_string()
    }

    pub fn to_json(&self) -> Value {
        let rels: Vec<Value> = self
            .relations
            .iter()
            .map(|r| {
                let s = SRSeriesView { fan: &self.fan, series: r };
                s.to_json()
            })
            .collect();
        json!({
            "variables": self.variable_labels(),
            "relations": rels,
            "truncation": self.trunc,
        })
    }

    fn check_integral(&self) -> Result<()> {
        if !self.spec.is_empty() {
            return Err(Error::Unsupported(
                "ideal computations need integer coefficients; specialize the parameters first"
                    .into(),
            ));
        }
        Ok(())
    }

    /// Monomials of degree at most `d` in the presentation's variables.
    fn monomials_upto(&self, d: u32) -> Vec<Monomial> {
        let n = self.fan.num_rays();
        let mut out = Vec::new();
        let mut exps = vec![0u32; n];
        fn rec(vars: &[usize], k: usize, left: u32, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if k == vars.len() {
                out.push(Monomial::new(exps.clone()));
                return;
            }
            for e in 0..=left {
                exps[vars[k]] = e;
                rec(vars, k + 1, left - e, exps, out);
            }
            exps[vars[k]] = 0;
        }
        rec(&self.variables, 0, d, &mut exps, &mut out);
        out.sort();
        out
    }

    /// Lattice spanned by `relation * monomial` truncated at degree `d`,
    /// in coordinates indexed by `basis`.
    fn relation_lattice(&self, d: u32, basis: &[Monomial]) -> EchelonLattice {
        let index: BTreeMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut lat = EchelonLattice::new(basis.len());
        for rel in &self.relations {
            let low = rel.terms().map(|(m, _)| m.degree()).min();
            let Some(low) = low else { continue };
            if low > d {
                continue;
            }
            for m in self.monomials_upto(d - low) {
                let mut v = vec![BigInt::zero(); basis.len()];
                let mut any = false;
                for (t, c) in rel.terms() {
                    let prod = t.mul(&m);
                    if prod.degree() > d {
                        continue;
                    }
                    let Some(&i) = index.get(&prod) else { continue };
                    v[i] += c.as_integer().expect("integral coefficients");
                    any = true;
                }
                if any {
                    lat.insert(v);
                }
            }
        }
        lat
    }

    /// Whether `f` lies in the ideal generated by the relations, in the ring
    /// truncated at degree `self.trunc`.
    pub fn ideal_membership(&self, f: &Series) -> Result<bool> {
        self.check_integral()?;
        if !same_spec(f.coeff_spec(), &self.spec) {
            return Err(Error::Structural("element coefficients differ from the presentation's".into()));
        }
        if f.nvars() != self.fan.num_rays() {
            return Err(Error::Structural("element has the wrong number of variables".into()));
        }
        let vars: u64 = self.variables.iter().fold(0, |m, &r| m | 1u64 << r);
        if f.terms().any(|(m, _)| m.support_mask() & !vars != 0) {
            return Err(Error::Domain(
                "element involves variables that were eliminated".into(),
            ));
        }
        let basis = self.monomials_upto(self.trunc);
        let lat = self.relation_lattice(self.trunc, &basis);
        let index: BTreeMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut v = vec![BigInt::zero(); basis.len()];
        for (m, c) in f.terms() {
            if m.degree() > self.trunc {
                continue;
            }
            v[index[m]] = c.as_integer().expect("integral coefficients");
        }
        Ok(lat.contains(&v))
    }

    /// Rank of the degree-`d` graded piece: the rank of the quotient
    /// truncated at `d` minus the rank of the quotient truncated at `d - 1`.
    pub fn graded_rank(&self, d: u32) -> Result<usize> {
        self.check_integral()?;
        let q = |d: u32| {
            let basis = self.monomials_upto(d);
            basis.len() - self.relation_lattice(d, &basis).rank()
        };
        Ok(if d == 0 { q(0) } else { q(d) - q(d - 1) })
    }

    pub fn specialize(
        &self,
        target: &Arc<ParamSpec>,
        assignment: &BTreeMap<String, CoeffElem>,
    ) -> Result<Self> {
        let images = crate::coeff::param_images(&self.spec, target, assignment)?;
        let relations = self
            .relations
            .iter()
            .map(|r| {
                let terms = r
                    .terms()
                    .map(|(m, c)| Ok((m.clone(), c.specialize_with(target, &images)?)))
                    .collect::<Result<Vec<_>>>()?;
                Series::from_terms(target, r.nvars(), r.truncation(), terms)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Presentation {
            relations,
            spec: target.clone(),
            ..self.clone()
        })
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<String> = self.variable_labels().iter().map(|l| format!("x_{l}")).collect();
        writeln!(f, "variables: {}", vars.join(", "))?;
        writeln!(f, "relations ({}):", self.relations.len())?;
        for r in &self.relations {
            writeln!(f, "  {}", self.format_relation(r))?;
        }
        Ok(())
    }
}

struct SRSeriesView<'a> {
    fan: &'a Fan,
    series: &'a Series,
}

impl SRSeriesView<'_> {
    fn to_json(&self) -> Value {
        let items: Vec<Value> = self
            .series
            .terms()
            .map(|(m, c)| {
                let mono: serde_json::Map<String, Value> = m
                    .exps()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (self.fan.label(i).to_string(), json!(e)))
                    .collect();
                json!({"monomial": mono, "coeff": c.to_json()})
            })
            .collect();
        Value::Array(items)
    }
}

fn monomial_series(spec: &Arc<ParamSpec>, nvars: usize, trunc: u32, rays: &[usize]) -> Series {
    let mut e = vec![0u32; nvars];
    for &r in rays {
        e[r] += 1;
    }
    // keep relations of degree above the truncation visible
    let t = trunc.max(rays.len() as u32);
    Series::from_terms(spec, nvars, t, [(Monomial::new(e), CoeffElem::one(spec))])
        .expect("single term")
}

/// Variables are the rays; relations are the minimal non-face monomials.
pub fn equivariant_presentation(fan: &Arc<Fan>, fgl: &FormalGroupLaw) -> Presentation {
    let n = fan.num_rays();
    let relations = fan
        .minimal_nonfaces()
        .iter()
        .map(|s| monomial_series(fgl.spec(), n, fgl.degree(), s.rays()))
        .collect();
    Presentation {
        fan: fan.clone(),
        variables: (0..n).collect(),
        relations,
        spec: fgl.spec().clone(),
        trunc: fgl.degree(),
    }
}

/// First maximal cone of full dimension.
pub fn default_elimination_cone(fan: &Fan) -> Result<Cone> {
    fan.max_cones()
        .iter()
        .find(|c| c.dim() == fan.dim())
        .cloned()
        .ok_or_else(|| {
            Error::Unsupported("the ordinary model needs a full-dimensional cone".into())
        })
}

/// Substitution eliminating the variables of a full-dimensional cone.
#[derive(Debug, Clone)]
pub struct Eliminator {
    fan: Arc<Fan>,
    tau: Cone,
    trunc: u32,
    /// Image of `x_rho` for every `rho` in `tau`, in the raw ring.
    images: BTreeMap<usize, Vec<Series>>,
}

impl Eliminator {
    /// For each `rho` in `tau`, `x_rho` maps to
    /// `chi(sum_F over rho' outside tau of <alpha_{tau,rho}, v_rho'> ._F x_rho')`,
    /// so that the character classes of the dual basis vanish.
    pub fn new(fan: &Arc<Fan>, fgl: &FormalGroupLaw, tau: &Cone) -> Result<Self> {
        if tau.dim() != fan.dim() || !fan.is_face(tau.rays()) {
            return Err(Error::Unsupported(format!(
                "elimination needs a full-dimensional cone of the fan, got {}",
                fan.cone_label(tau)
            )));
        }
        let duals = fan.dual_basis(tau)?;
        let n = fan.num_rays();
        let spec = fgl.spec();
        let trunc = fgl.degree();
        let mut images = BTreeMap::new();
        for (&rho, alpha) in &duals {
            let mut s = Series::zero(spec, n, trunc);
            for r in (0..n).filter(|r| !tau.contains_ray(*r)) {
                let k = pairing(alpha, fan.ray(r))?;
                if k == 0 {
                    continue;
                }
                let t = fgl.int_multiple(k, &Series::var(spec, n, trunc, r))?;
                s = fgl.formal_sum(&s, &t)?;
            }
            let img = fgl.formal_inverse(&s)?;
            images.insert(rho, img.powers(trunc)?);
        }
        Ok(Eliminator {
            fan: fan.clone(),
            tau: tau.clone(),
            trunc,
            images,
        })
    }

    pub fn cone(&self) -> &Cone {
        &self.tau
    }

    /// Image of `x_rho` for `rho` in the cone.
    pub fn image(&self, rho: usize) -> Option<&Series> {
        self.images.get(&rho).map(|p| &p[1])
    }

    /// Rays that remain as variables.
    pub fn remaining(&self) -> Vec<usize> {
        (0..self.fan.num_rays())
            .filter(|r| !self.tau.contains_ray(*r))
            .collect()
    }

    /// Applies the substitution to a raw series.
    pub fn apply_raw(&self, f: &Series) -> Result<Series> {
        let n = self.fan.num_rays();
        if f.nvars() != n {
            return Err(Error::Structural("series has the wrong number of variables".into()));
        }
        let spec = f.coeff_spec();
        let mut acc = Series::zero(spec, n, self.trunc);
        for (m, c) in f.terms() {
            if m.degree() > self.trunc {
                continue;
            }
            let mut rest = m.exps().to_vec();
            let mut term = Series::constant(spec, n, self.trunc, c.clone());
            for (&rho, pows) in &self.images {
                let e = rest[rho];
                rest[rho] = 0;
                if e > 0 {
                    term = term.try_mul(&pows[e as usize])?;
                }
            }
            let mono = Series::from_terms(
                spec,
                n,
                self.trunc,
                [(Monomial::new(rest), CoeffElem::one(spec))],
            )?;
            acc = acc.try_add(&term.try_mul(&mono)?)?;
        }
        Ok(acc)
    }

    /// Applies the substitution to an element; the result involves only the
    /// remaining variables.
    pub fn apply(&self, f: &SRSeries) -> Result<SRSeries> {
        if !same_fan(&self.fan, &f.fan) {
            return Err(Error::Structural("element lives on another fan".into()));
        }
        let raw = self.apply_raw(&f.with_truncation(self.trunc).to_series())?;
        SRSeries::from_series(&self.fan, &raw)
    }
}

/// `ordinary_eliminate` with the default choice of cone when `tau` is `None`.
pub fn ordinary_eliminate(
    f: &SRSeries,
    tau: Option<&Cone>,
    fgl: &FormalGroupLaw,
) -> Result<SRSeries> {
    let tau = match tau {
        Some(t) => t.clone(),
        None => default_elimination_cone(&f.fan)?,
    };
    Eliminator::new(&f.fan, fgl, &tau)?.apply(f)
}

/// Variables are the rays outside `tau`; relations are the images of the
/// minimal non-face monomials under elimination.
pub fn ordinary_presentation(
    fan: &Arc<Fan>,
    fgl: &FormalGroupLaw,
    tau: Option<&Cone>,
) -> Result<Presentation> {
    let tau = match tau {
        Some(t) => t.clone(),
        None => default_elimination_cone(fan)?,
    };
    let elim = Eliminator::new(fan, fgl, &tau)?;
    let n = fan.num_rays();
    let mut relations = Vec::new();
    for s in fan.minimal_nonfaces() {
        let raw = monomial_series(fgl.spec(), n, fgl.degree(), s.rays()).with_truncation(fgl.degree());
        let img = elim.apply_raw(&raw)?;
        if !img.is_zero() {
            relations.push(img);
        }
    }
    Ok(Presentation {
        fan: fan.clone(),
        variables: elim.remaining(),
        relations,
        spec: fgl.spec().clone(),
        trunc: fgl.degree(),
    })
}
