//! Blow-ups along star subdivisions: pullback along the subdivision map and
//! pushforward for laws of the form `x + y - v x y`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::coeff::CoeffElem;
use crate::error::{Error, Result};
use crate::fan::{Cone, Fan};
use crate::fgl::FormalGroupLaw;
use crate::series::{FormalHost, Monomial};
use crate::sr::SRSeries;

/// How `pushforward` evaluates monomials in the center and exceptional
/// variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PushMethod {
    /// Closed forms for two-dimensional centers, recursion otherwise.
    Auto,
    /// Always the rewriting recursion.
    Recursive,
}

type MemoKey = (Vec<u32>, u32);

/// Data of the blow-up of a fan along the star subdivision at a cone.
pub struct BlowupContext {
    base: Arc<Fan>,
    center: Cone,
    fan: Arc<Fan>,
    exceptional: usize,
    fgl: FormalGroupLaw,
    v: CoeffElem,
    trunc: u32,
    // chi(z) = sum chi[i] z^i
    chi: Vec<CoeffElem>,
    memo: Mutex<HashMap<MemoKey, SRSeries>>,
}

impl fmt::Debug for BlowupContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BlowupContext(center={}, v={}, N={})",
            self.base.cone_label(&self.center),
            self.v,
            self.trunc
        )
    }
}

/// Subdivides `fan` at `center` and prepares pullback and pushforward for
/// `fgl`, which must be of the form `x + y - v x y`.
pub fn make_blowup(fan: &Arc<Fan>, center: &Cone, fgl: &FormalGroupLaw) -> Result<BlowupContext> {
    let v = fgl.multiplicative_parameter().ok_or_else(|| {
        Error::Unsupported(
            "pushforward along blow-ups needs a law of the form x + y - v x y".into(),
        )
    })?;
    let (sub, exceptional) = fan.star_subdivision(center, None)?;
    let chi = fgl.inverse_coefficients(fgl.degree())?;
    Ok(BlowupContext {
        base: fan.clone(),
        center: center.clone(),
        fan: Arc::new(sub),
        exceptional,
        fgl: fgl.clone(),
        v,
        trunc: fgl.degree(),
        chi,
        memo: Mutex::new(HashMap::new()),
    })
}

impl BlowupContext {
    pub fn base(&self) -> &Arc<Fan> {
        &self.base
    }

    pub fn subdivided(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn center(&self) -> &Cone {
        &self.center
    }

    pub fn exceptional(&self) -> usize {
        self.exceptional
    }

    pub fn fgl(&self) -> &FormalGroupLaw {
        &self.fgl
    }

    pub fn parameter(&self) -> &CoeffElem {
        &self.v
    }

    pub fn truncation(&self) -> u32 {
        self.trunc
    }

    /// Whether pushforward values rest on seeds `x_S -> x_S` for proper
    /// subsets of a center of dimension four or more, beyond the cases with
    /// known closed forms.
    pub fn uses_generalized_seeds(&self) -> bool {
        self.center.dim() >= 4
    }

    fn spec(&self) -> &Arc<crate::coeff::ParamSpec> {
        self.fgl.spec()
    }

    fn base_var(&self, r: usize) -> SRSeries {
        SRSeries::var(&self.base, self.spec(), self.trunc, r)
    }

    fn base_one(&self) -> SRSeries {
        SRSeries::one(&self.base, self.spec(), self.trunc)
    }

    /// Exceptional variable on the subdivided fan.
    pub fn exceptional_var(&self) -> SRSeries {
        SRSeries::var(&self.fan, self.spec(), self.trunc, self.exceptional)
    }

    /// Algebra homomorphism `x_rho -> x_rho +_F x_E` for `rho` in the
    /// center, `x_rho -> x_rho` otherwise.
    pub fn pullback(&self, f: &SRSeries) -> Result<SRSeries> {
        self.check_on(f, &self.base, "base")?;
        let f = f.with_truncation(self.trunc);
        let n = self.base.num_rays();
        let xe = self.exceptional_var();
        let mut images = Vec::with_capacity(n);
        for r in 0..n {
            let x = SRSeries::var(&self.fan, self.spec(), self.trunc, r);
            let img = if self.center.contains_ray(r) {
                self.fgl.formal_sum(&x, &xe)?
            } else {
                x
            };
            images.push(img.powers(self.trunc)?);
        }
        let mut acc = SRSeries::zero(&self.fan, self.spec(), self.trunc);
        for (m, c) in f.terms() {
            let mut term = SRSeries::constant(&self.fan, self.trunc, c.clone());
            for (r, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    term = term.try_mul(&images[r][e as usize])?;
                }
            }
            acc = acc.try_add(&term)?;
        }
        Ok(acc)
    }

    /// Minimal non-faces of the base whose pulled-back monomial does not
    /// vanish on the subdivided fan. Empty when pullback is well defined.
    pub fn pullback_relation_failures(&self) -> Result<Vec<Cone>> {
        let mut bad = Vec::new();
        for s in self.base.minimal_nonfaces() {
            if s.dim() as u32 > self.trunc {
                continue;
            }
            // the monomial is already zero on the base; build its image factor by factor
            let xe = self.exceptional_var();
            let mut img = SRSeries::one(&self.fan, self.spec(), self.trunc);
            for &r in s.rays() {
                let x = SRSeries::var(&self.fan, self.spec(), self.trunc, r);
                let f = if self.center.contains_ray(r) {
                    self.fgl.formal_sum(&x, &xe)?
                } else {
                    x
                };
                img = img.try_mul(&f)?;
            }
            if !img.is_zero() {
                bad.push(s);
            }
        }
        Ok(bad)
    }

    fn check_on(&self, f: &SRSeries, fan: &Arc<Fan>, what: &str) -> Result<()> {
        if !(Arc::ptr_eq(f.fan(), fan) || **f.fan() == **fan) {
            return Err(Error::Structural(format!("element is not on the {what} fan")));
        }
        if !crate::coeff::same_spec(f.coeff_spec(), self.spec()) {
            return Err(Error::Structural(
                "element coefficients differ from the formal group law's".into(),
            ));
        }
        Ok(())
    }

    /// `pi_*` on an element of the subdivided fan.
    pub fn pushforward(&self, f: &SRSeries) -> Result<SRSeries> {
        self.pushforward_with(f, PushMethod::Auto)
    }

    pub fn pushforward_with(&self, f: &SRSeries, method: PushMethod) -> Result<SRSeries> {
        self.check_on(f, &self.fan, "subdivided")?;
        let f = f.with_truncation(self.trunc);
        let n = self.base.num_rays();
        let mut acc = SRSeries::zero(&self.base, self.spec(), self.trunc);
        for (m, c) in f.terms() {
            let s: Vec<u32> = self.center.rays().iter().map(|&r| m.exp(r)).collect();
            let t = m.exp(self.exceptional);
            let mut out = vec![0u32; n];
            for (r, slot) in out.iter_mut().enumerate() {
                if !self.center.contains_ray(r) {
                    *slot = m.exp(r);
                }
            }
            let inner = self.push_monomial(&s, t, method)?;
            let outer = Monomial::new(out);
            acc = acc.try_add(&inner.mul_monomial(&outer, c)?)?;
        }
        Ok(acc)
    }

    /// `pi_*(prod_i x_{sigma_i}^{s_i} * x_E^t)` on the base.
    pub fn push_monomial(&self, s: &[u32], t: u32, method: PushMethod) -> Result<SRSeries> {
        if s.len() != self.center.dim() {
            return Err(Error::Structural("exponent vector must match the center".into()));
        }
        if method == PushMethod::Auto && self.center.dim() == 2 {
            return self.closed_form(s, t);
        }
        let mut stack = HashSet::new();
        self.recurse(s.to_vec(), t, &mut stack)
    }

    fn center_monomial(&self, s: &[u32]) -> SRSeries {
        let mut e = vec![0u32; self.base.num_rays()];
        for (k, &r) in self.center.rays().iter().enumerate() {
            e[r] = s[k];
        }
        SRSeries::normalize(
            &self.base,
            self.spec(),
            self.trunc,
            [(Monomial::new(e), CoeffElem::one(self.spec()))],
        )
    }

    /// Two-dimensional center with rays `x_1, x_2`:
    /// `x_E^t -> v sum_{i=1}^t x_1^{t+1-i} x_2^i - sum_{i=1}^{t-1} x_1^{t-i} x_2^i`,
    /// `x_a^s x_E^t -> x_a x_b^t (x_a -_F x_b)^{s-1}` for `s >= 1`.
    fn closed_form(&self, s: &[u32], t: u32) -> Result<SRSeries> {
        let zero = SRSeries::zero(&self.base, self.spec(), self.trunc);
        if s[0] + s[1] + t > self.trunc || (s[0] > 0 && s[1] > 0) {
            return Ok(zero);
        }
        let (r1, r2) = (self.center.rays()[0], self.center.rays()[1]);
        if s[0] == 0 && s[1] == 0 {
            if t == 0 {
                return Ok(self.base_one());
            }
            let mut acc = zero;
            for i in 1..=t {
                let m = self.center_monomial(&[t + 1 - i, i]);
                acc = acc.try_add(&m.scale(&self.v)?)?;
            }
            for i in 1..t {
                acc = acc.try_sub(&self.center_monomial(&[t - i, i]))?;
            }
            return Ok(acc);
        }
        let (a, b, sa) = if s[0] > 0 { (r1, r2, s[0]) } else { (r2, r1, s[1]) };
        let (xa, xb) = (self.base_var(a), self.base_var(b));
        let diff = self.fgl.formal_difference(&xa, &xb)?;
        let mut out = xa.try_mul(&xb.powers(t)?[t as usize])?;
        out = out.try_mul(&diff.powers(sa - 1)?[(sa - 1) as usize])?;
        Ok(out)
    }

    fn recurse(&self, s: Vec<u32>, t: u32, stack: &mut HashSet<MemoKey>) -> Result<SRSeries> {
        let zero = SRSeries::zero(&self.base, self.spec(), self.trunc);
        let deg: u32 = s.iter().sum::<u32>() + t;
        if deg > self.trunc || s.iter().all(|&e| e > 0) {
            return Ok(zero);
        }
        let key = (s.clone(), t);
        if let Some(hit) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(hit.clone());
        }
        if !stack.insert(key.clone()) {
            return Err(Error::Underdetermined(format!(
                "pushforward of {} refers back to itself",
                self.describe(&s, t)
            )));
        }
        let out = self.recurse_step(&s, t, stack);
        stack.remove(&key);
        let out = out?;
        self.memo
            .lock()
            .expect("memo lock")
            .insert(key, out.clone());
        Ok(out)
    }

    fn recurse_step(&self, s: &[u32], t: u32, stack: &mut HashSet<MemoKey>) -> Result<SRSeries> {
        let rays = self.center.rays();
        if let Some(k) = s.iter().position(|&e| e >= 2) {
            // x_a = pi^*(x_a) (1 - v chi(x_E)) + chi(x_E)
            let xa = self.base_var(rays[k]);
            let mut rest = s.to_vec();
            rest[k] -= 1;
            let mut acc = xa.try_mul(&self.recurse(rest.clone(), t, stack)?)?;
            for (i, c) in self.chi.iter().enumerate().skip(1) {
                if c.is_zero() || rest.iter().sum::<u32>() + t + i as u32 > self.trunc {
                    continue;
                }
                let p = self.recurse(rest.clone(), t + i as u32, stack)?;
                let vx = xa.scale(&self.v)?;
                let term = p.try_sub(&vx.try_mul(&p)?)?.scale(c)?;
                acc = acc.try_add(&term)?;
            }
            return Ok(acc);
        }
        if t == 0 {
            return Ok(self.center_monomial(s));
        }
        // square-free, proper: x_S x_E^t via x_a = pi^*(x_a) - x_E + v x_a x_E
        let k = s
            .iter()
            .position(|&e| e == 0)
            .ok_or_else(|| Error::Underdetermined(format!("no rewriting for {}", self.describe(s, t))))?;
        let xa = self.base_var(rays[k]);
        let mut with_a = s.to_vec();
        with_a[k] = 1;
        let p1 = xa.try_mul(&self.recurse(s.to_vec(), t - 1, stack)?)?;
        let p2 = self.recurse(with_a.clone(), t - 1, stack)?;
        let p3 = self.recurse(with_a, t, stack)?.scale(&self.v)?;
        p1.try_sub(&p2)?.try_add(&p3)
    }

    fn describe(&self, s: &[u32], t: u32) -> String {
        let power = |label: &str, e: u32| match e {
            1 => format!("x_{label}"),
            _ => format!("x_{label}^{e}"),
        };
        let mut parts = Vec::new();
        for (k, &r) in self.center.rays().iter().enumerate() {
            if s[k] > 0 {
                parts.push(power(self.base.label(r), s[k]));
            }
        }
        if t > 0 {
            parts.push(power(self.fan.label(self.exceptional), t));
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// Checks the projection formula, `pi_* pi^* = id`, `pi_*(1) = 1` and
    /// `pi_*(chi(x_E)) = 0` on the given samples.
    pub fn check_push_pull(&self, samples: &[(SRSeries, SRSeries)]) -> Result<PushPullReport> {
        let mut failures = Vec::new();
        let one_up = SRSeries::one(&self.fan, self.spec(), self.trunc);
        let p1 = self.pushforward(&one_up)?;
        if p1 != self.base_one() {
            failures.push(PushPullFailure {
                check: PushPullCheck::Unit,
                witness: format!("pi_*(1) = {p1}"),
            });
        }
        let chi_e = self.fgl.formal_inverse(&self.exceptional_var())?;
        let pc = self.pushforward(&chi_e)?;
        if !pc.is_zero() {
            failures.push(PushPullFailure {
                check: PushPullCheck::InverseExceptional,
                witness: format!("pi_*(chi(x_E)) = {pc}"),
            });
        }
        for (f, g) in samples {
            let pf = self.pullback(f)?;
            let lhs = self.pushforward(&pf.try_mul(g)?)?;
            let rhs = f.with_truncation(self.trunc).try_mul(&self.pushforward(g)?)?;
            if lhs != rhs {
                failures.push(PushPullFailure {
                    check: PushPullCheck::Projection,
                    witness: format!("f = {f}, g = {g}: {lhs} vs {rhs}"),
                });
            }
            let back = self.pushforward(&pf)?;
            if back != f.with_truncation(self.trunc) {
                failures.push(PushPullFailure {
                    check: PushPullCheck::PushPull,
                    witness: format!("f = {f}: pi_* pi^* f = {back}"),
                });
            }
        }
        Ok(PushPullReport {
            samples: samples.len(),
            failures,
        })
    }

    /// Table of `pi_*` on the monomials `x_S^s x_E^t` of degree at most `d`
    /// in the center and exceptional variables.
    pub fn pushforward_table(&self, d: u32) -> Result<Vec<(String, SRSeries)>> {
        let k = self.center.dim();
        let mut out = Vec::new();
        let mut keys = Vec::new();
        fn rec(k: usize, left: u32, cur: &mut Vec<u32>, keys: &mut Vec<Vec<u32>>) {
            if cur.len() == k {
                keys.push(cur.clone());
                return;
            }
            for e in 0..=left {
                cur.push(e);
                rec(k, left - e, cur, keys);
                cur.pop();
            }
        }
        rec(k + 1, d.min(self.trunc), &mut Vec::new(), &mut keys);
        keys.sort_by_key(|e| (e.iter().sum::<u32>(), std::cmp::Reverse(e.clone())));
        for e in keys {
            let (s, t) = (&e[..k], e[k]);
            if s.iter().all(|&x| x > 0) {
                continue;
            }
            out.push((self.describe(s, t), self.push_monomial(s, t, PushMethod::Auto)?));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PushPullCheck {
    Unit,
    InverseExceptional,
    Projection,
    PushPull,
}

#[derive(Debug, Clone)]
pub struct PushPullFailure {
    pub check: PushPullCheck,
    pub witness: String,
}

#[derive(Debug, Clone)]
pub struct PushPullReport {
    pub samples: usize,
    pub failures: Vec<PushPullFailure>,
}

impl PushPullReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `pi_*` values of all exceptional monomials `x_E^t` and center monomials
/// up to degree `d`, keyed by exponent vectors, for comparing methods.
pub fn compare_methods(ctx: &BlowupContext, d: u32) -> Result<BTreeMap<(Vec<u32>, u32), (SRSeries, SRSeries)>> {
    let k = ctx.center.dim();
    let mut out = BTreeMap::new();
    for total in 0..=d.min(ctx.trunc) {
        for a in 0..k {
            for s_a in 0..=total {
                let t = total - s_a;
                let mut s = vec![0u32; k];
                s[a] = s_a;
                let closed = ctx.push_monomial(&s, t, PushMethod::Auto)?;
                let rec = ctx.push_monomial(&s, t, PushMethod::Recursive)?;
                out.insert((s, t), (closed, rec));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::ParamSpec;

    fn v_spec() -> Arc<ParamSpec> {
        ParamSpec::new(&["v"], &[]).unwrap()
    }

    fn ctx(fan: &str, center: &[usize], n: u32) -> BlowupContext {
        let spec = v_spec();
        let law = FormalGroupLaw::multiplicative(CoeffElem::param(&spec, "v").unwrap(), n).unwrap();
        let f = Arc::new(Fan::catalog(fan).unwrap());
        make_blowup(&f, &Cone::new(center.to_vec()), &law).unwrap()
    }

    fn base_mono(c: &BlowupContext, e: &[u32], k: i64) -> SRSeries {
        let spec = c.spec().clone();
        let coef = if k == 0 {
            CoeffElem::param(&spec, "v").unwrap()
        } else {
            CoeffElem::from_int(&spec, k)
        };
        SRSeries::normalize(c.base(), &spec, c.truncation(), [(Monomial::new(e.to_vec()), coef)])
    }

    #[test]
    fn p2_blowup_shape() {
        let c = ctx("pn:2", &[0, 1], 5);
        assert_eq!(c.subdivided().num_rays(), 4);
        assert_eq!(c.subdivided().ray(c.exceptional()), &[1, 1]);
        assert!(c.pullback_relation_failures().unwrap().is_empty());
    }

    #[test]
    fn pullback_of_center_variable() {
        let c = ctx("pn:2", &[0, 1], 5);
        let spec = c.spec().clone();
        let x1 = SRSeries::var(c.base(), &spec, 5, 0);
        let got = c.pullback(&x1).unwrap();
        let up = |r| SRSeries::var(c.subdivided(), &spec, 5, r);
        let v = CoeffElem::param(&spec, "v").unwrap();
        let want = up(0)
            .try_add(&up(3))
            .unwrap()
            .try_sub(&up(0).try_mul(&up(3)).unwrap().scale(&v).unwrap())
            .unwrap();
        assert_eq!(got, want);
        let x3 = SRSeries::var(c.base(), &spec, 5, 2);
        assert_eq!(c.pullback(&x3).unwrap(), up(2));
        let one = SRSeries::one(c.base(), &spec, 5);
        assert_eq!(c.pullback(&one).unwrap(), SRSeries::one(c.subdivided(), &spec, 5));
    }

    #[test]
    fn dim_two_values() {
        let c = ctx("pn:2", &[0, 1], 5);
        // v x1 x2
        assert_eq!(c.push_monomial(&[0, 0], 1, PushMethod::Auto).unwrap(), base_mono(&c, &[1, 1, 0], 0));
        // v (x1^2 x2 + x1 x2^2) - x1 x2
        let want = base_mono(&c, &[2, 1, 0], 0)
            .try_add(&base_mono(&c, &[1, 2, 0], 0))
            .unwrap()
            .try_add(&base_mono(&c, &[1, 1, 0], -1))
            .unwrap();
        assert_eq!(c.push_monomial(&[0, 0], 2, PushMethod::Auto).unwrap(), want);
        // x_a (x_a -_F x_b)
        let spec = c.spec().clone();
        let xa = SRSeries::var(c.base(), &spec, 5, 0);
        let xb = SRSeries::var(c.base(), &spec, 5, 1);
        let want = xa.try_mul(&c.fgl().formal_difference(&xa, &xb).unwrap()).unwrap();
        assert_eq!(c.push_monomial(&[2, 0], 0, PushMethod::Auto).unwrap(), want);
    }

    #[test]
    fn recursion_matches_closed_forms() {
        let c = ctx("pn:2", &[0, 1], 6);
        for ((s, t), (closed, rec)) in compare_methods(&c, 6).unwrap() {
            assert_eq!(closed, rec, "s = {s:?}, t = {t}");
        }
    }

    #[test]
    fn dim_three_values() {
        let c = ctx("pn:3", &[0, 1, 2], 6);
        let m = |s: &[u32], t| c.push_monomial(s, t, PushMethod::Auto).unwrap();
        let spec = c.spec().clone();
        let v = CoeffElem::param(&spec, "v").unwrap();
        let x123 = base_mono(&c, &[1, 1, 1, 0], 1);
        assert_eq!(m(&[0, 0, 0], 1), x123.scale(&v.pow(2)).unwrap());
        for i in 0..3 {
            let mut s = [0u32; 3];
            s[i] = 1;
            assert_eq!(m(&s, 1), x123.scale(&v).unwrap());
            let mut s2 = [1u32; 3];
            s2[i] = 0;
            assert_eq!(m(&s2, 1), x123);
        }
        assert!(!c.uses_generalized_seeds());
    }

    #[test]
    fn projection_formula_on_basis_pairs() {
        for (fan, center) in [("pn:2", vec![0, 1]), ("pn:3", vec![0, 1, 2]), ("pn:3", vec![0, 1])] {
            let c = ctx(fan, &center, 4);
            let spec = c.spec().clone();
            let n = c.base().num_rays();
            let mut samples = Vec::new();
            for a in 0..n {
                for b in 0..=n {
                    let f = SRSeries::var(c.base(), &spec, 4, a);
                    let g = SRSeries::var(c.subdivided(), &spec, 4, b);
                    let g = g.try_mul(&c.exceptional_var()).unwrap();
                    samples.push((f, g));
                }
            }
            let report = c.check_push_pull(&samples).unwrap();
            assert!(report.passed(), "{fan} {center:?}: {:?}", report.failures.first());
        }
    }

    #[test]
    fn non_multiplicative_law_rejected() {
        let z = ParamSpec::integers();
        let law = FormalGroupLaw::lorentz(CoeffElem::from_int(&z, 1), 4).unwrap();
        let f = Arc::new(Fan::catalog("pn:2").unwrap());
        let err = make_blowup(&f, &Cone::new(vec![0, 1]), &law).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
        let add = FormalGroupLaw::additive(&z, 4).unwrap();
        assert!(make_blowup(&f, &Cone::new(vec![0, 1]), &add).is_ok());
    }
}
