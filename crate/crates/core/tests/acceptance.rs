//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p torfan --test acceptance`.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use torfan::blowup::{compare_methods, make_blowup, PushMethod};
use torfan::fan::{Cone, Fan};
use torfan::fgl::{check_fgl_axioms, random_conjugate, FormalGroupLaw};
use torfan::piecewise::{courant_function, injectivity_rank, to_piecewise, PiecewiseMode};
use torfan::sample::{break_tuple, random_compatible_tuple, random_element, random_pair, SampleShape};
use torfan::series::{FormalHost, Monomial, Series};
use torfan::sr::{
    character_class, equivariant_presentation, glue_tuple, ordinary_presentation, Eliminator,
    Presentation, SRSeries,
};
use torfan::{CoeffElem, Error, ParamSpec};

type Outcome = Result<String, String>;

const N: u32 = 6;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn z() -> Arc<ParamSpec> {
    ParamSpec::integers()
}

fn v_spec() -> Arc<ParamSpec> {
    ParamSpec::new(&["v"], &[]).unwrap()
}

fn catalog(name: &str) -> Arc<Fan> {
    Arc::new(Fan::catalog(name).unwrap())
}

fn mult_int(v: i64, n: u32) -> FormalGroupLaw {
    FormalGroupLaw::multiplicative(CoeffElem::from_int(&z(), v), n).unwrap()
}

fn mult_param(n: u32) -> FormalGroupLaw {
    let s = v_spec();
    FormalGroupLaw::multiplicative(CoeffElem::param(&s, "v").unwrap(), n).unwrap()
}

fn var(fan: &Arc<Fan>, spec: &Arc<ParamSpec>, label: &str) -> SRSeries {
    SRSeries::var_by_label(fan, spec, N, label).unwrap()
}

fn embed(f: &SRSeries, target: &Arc<ParamSpec>) -> SRSeries {
    f.specialize(target, &BTreeMap::new()).unwrap()
}

fn at(spec: &Arc<ParamSpec>, v: i64) -> BTreeMap<String, CoeffElem> {
    let _ = spec;
    BTreeMap::from([("v".to_string(), CoeffElem::from_int(&z(), v))])
}

// 1. P^n presentations
fn pn_models() -> Outcome {
    let mut checks = 0;
    for n in [2usize, 3] {
        let fan = catalog(&format!("pn:{n}"));
        let add = FormalGroupLaw::additive(&z(), N).unwrap();
        let eq = equivariant_presentation(&fan, &add);
        ensure(eq.relations.len() == 1, || format!("P^{n}: {} equivariant relations", eq.relations.len()))?;
        let terms: Vec<_> = eq.relations[0].terms().collect();
        ensure(
            terms.len() == 1 && terms[0].0.exps() == vec![1; n + 1].as_slice() && terms[0].1.is_one(),
            || format!("P^{n}: relation is {}", eq.format_relation(&eq.relations[0])),
        )?;
        for (name, law) in [("additive", add), ("mult v=1", mult_int(1, N)), ("mult v=2", mult_int(2, N))] {
            let pres = ordinary_presentation(&fan, &law, None).map_err(e2s)?;
            ensure(pres.variables.len() == 1, || format!("P^{n} {name}: {} variables", pres.variables.len()))?;
            for d in 0..=n as u32 + 1 {
                let want = usize::from(d <= n as u32);
                let got = pres.graded_rank(d).map_err(e2s)?;
                ensure(got == want, || format!("P^{n} {name}: rank {got} in degree {d}, want {want}"))?;
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} graded ranks exact"))
}

// 2. dP6 equivariant model
fn dp6_equivariant() -> Outcome {
    let fan = catalog("dp6");
    let label = |r: usize| fan.label(r).to_string();
    let mut got: Vec<(String, String)> = fan
        .minimal_nonfaces()
        .iter()
        .map(|c| {
            let mut p = [label(c.rays()[0]), label(c.rays()[1])];
            p.sort();
            ensure(c.dim() == 2, || format!("non-face of size {}", c.dim())).unwrap();
            (p[0].clone(), p[1].clone())
        })
        .collect();
    got.sort();
    let mut want: Vec<(String, String)> = Vec::new();
    for (i, j) in [(1, 2), (1, 3), (2, 3)] {
        want.push((format!("L{i}"), format!("L{j}")));
        want.push((format!("E{i}"), format!("E{j}")));
    }
    for i in 1..=3 {
        want.push((format!("E{i}"), format!("L{i}")));
    }
    want.sort();
    ensure(got == want, || format!("non-faces {got:?}"))?;

    // x -> E3 + L2 - L3 - E2, y -> L1 + E3 - E1 - L3, as formal sums
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let laws = vec![
        FormalGroupLaw::additive(&z(), N).unwrap(),
        mult_param(N),
        FormalGroupLaw::lorentz(CoeffElem::param(&ParamSpec::new(&["u2"], &[]).unwrap(), "u2").unwrap(), N).unwrap(),
        random_conjugate(&mult_int(1, N), &mut rng, 3).unwrap(),
    ];
    for law in &laws {
        let s = law.spec().clone();
        let x = |l: &str| var(&fan, &s, l);
        let chain = |plus: [&str; 2], minus: [&str; 2]| -> SRSeries {
            let mut acc = law.formal_sum(&x(plus[0]), &x(plus[1])).unwrap();
            for m in minus {
                acc = law.formal_difference(&acc, &x(m)).unwrap();
            }
            acc
        };
        let cx = character_class(&fan, law, &[1, 0]).map_err(e2s)?;
        let cy = character_class(&fan, law, &[0, 1]).map_err(e2s)?;
        ensure(cx == chain(["E3", "L2"], ["L3", "E2"]), || format!("x class {cx} under {law:?}"))?;
        ensure(cy == chain(["L1", "E3"], ["E1", "L3"]), || format!("y class {cy} under {law:?}"))?;
    }
    let pic = fan.picard_presentation().map_err(e2s)?;
    ensure(pic.free_rank == 4 && pic.torsion.is_empty(), || {
        format!("Pic rank {} torsion {:?}", pic.free_rank, pic.torsion)
    })?;
    Ok(format!("9 non-faces, characters under {} laws, Pic = Z^4", laws.len()))
}

/// Relation checks of the dP6 ordinary model for one law and cone: whether
/// x_l^3, x_Ei^3, x_l x_Ei, x_Ei x_Ej, x_l^2 + chi(x_Ei)^2 lie in the ideal,
/// and the graded ranks in degrees 0..=3.
fn dp6_ordinary_checks(
    fan: &Arc<Fan>,
    law: &FormalGroupLaw,
    tau: &Cone,
    specialize_to: Option<i64>,
) -> Result<(Vec<(String, bool)>, Vec<usize>, Presentation), String> {
    let s = law.spec().clone();
    let x = |l: &str| var(fan, &s, l);
    let elim = Eliminator::new(fan, law, tau).map_err(e2s)?;
    let mut pres = ordinary_presentation(fan, law, Some(tau)).map_err(e2s)?;
    let lift = |f: &SRSeries| -> Result<Series, String> {
        let g = elim.apply(f).map_err(e2s)?;
        let g = match specialize_to {
            Some(v) => g.specialize(&z(), &at(&s, v)).map_err(e2s)?,
            None => g,
        };
        Ok(g.to_series())
    };
    if let Some(v) = specialize_to {
        pres = pres.specialize(&z(), &at(&s, v)).map_err(e2s)?;
    }
    let xl = law.formal_sum(&law.formal_sum(&x("L1"), &x("E2")).unwrap(), &x("E3")).unwrap();
    let pow = |f: &SRSeries, k: u32| f.powers(k).unwrap()[k as usize].clone();
    let mut items: Vec<(String, SRSeries)> = vec![("x_l^3".into(), pow(&xl, 3))];
    for i in 1..=3 {
        let e = x(&format!("E{i}"));
        items.push((format!("x_E{i}^3"), pow(&e, 3)));
        items.push((format!("x_l*x_E{i}"), xl.try_mul(&e).unwrap()));
        let chi = law.formal_inverse(&e).unwrap();
        items.push((format!("x_l^2 + chi(x_E{i})^2"), pow(&xl, 2).try_add(&pow(&chi, 2)).unwrap()));
        for j in i + 1..=3 {
            items.push((format!("x_E{i}*x_E{j}"), e.try_mul(&x(&format!("E{j}"))).unwrap()));
        }
    }
    let mut out = Vec::new();
    for (name, f) in items {
        let member = pres.ideal_membership(&lift(&f)?).map_err(e2s)?;
        out.push((name, member));
    }
    let ranks = (0..=3).map(|d| pres.graded_rank(d)).collect::<Result<Vec<_>, _>>().map_err(e2s)?;
    Ok((out, ranks, pres))
}

// 3. dP6 ordinary model, additive law
fn dp6_ordinary() -> Outcome {
    let fan = catalog("dp6");
    let add = FormalGroupLaw::additive(&z(), N).unwrap();
    let mut total = 0;
    for tau in fan.max_cones() {
        let (items, ranks, pres) = dp6_ordinary_checks(&fan, &add, tau, None)?;
        ensure(pres.variables.len() == 4, || format!("{} variables", pres.variables.len()))?;
        for (name, ok) in &items {
            ensure(*ok, || format!("{name} not in the ideal for cone {}", fan.cone_label(tau)))?;
        }
        ensure(ranks == vec![1, 4, 1, 0], || format!("ranks {ranks:?} for cone {}", fan.cone_label(tau)))?;
        let s = z();
        let elim = Eliminator::new(&fan, &add, tau).unwrap();
        let x = |l: &str| var(&fan, &s, l);
        let xl = x("L1").try_add(&x("E2")).unwrap().try_add(&x("E3")).unwrap();
        for i in 1..=3 {
            let e = x(&format!("E{i}"));
            let rel = xl.try_mul(&xl).unwrap().try_add(&e.try_mul(&e).unwrap()).unwrap();
            let member = pres.ideal_membership(&elim.apply(&rel).unwrap().to_series()).map_err(e2s)?;
            ensure(member, || format!("x_l^2 + x_E{i}^2 not in the ideal for cone {}", fan.cone_label(tau)))?;
        }
        // a non-member, so membership is not vacuous
        let e1 = elim.apply(&x("E1")).unwrap();
        let sq = e1.try_mul(&e1).unwrap().to_series();
        ensure(!pres.ideal_membership(&sq).map_err(e2s)?, || "x_E1^2 reported as zero".into())?;
        total += items.len() + 3;
    }
    Ok(format!("{total} memberships and ranks (1,4,1,0) over all 6 cones"))
}

// 4. dP6 identities for every law
fn dp6_identities() -> Outcome {
    let fan = catalog("dp6");
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let generic_spec = ParamSpec::new(&["a11", "a12", "a22"], &[]).unwrap();
    let p = |n: &str| CoeffElem::param(&generic_spec, n).unwrap();
    // symmetric table with free coefficients; associativity plays no role
    let free = FormalGroupLaw::generic(
        &generic_spec,
        N,
        [
            ((1, 0), CoeffElem::one(&generic_spec)),
            ((0, 1), CoeffElem::one(&generic_spec)),
            ((1, 1), p("a11")),
            ((1, 2), p("a12")),
            ((2, 1), p("a12")),
            ((2, 2), p("a22")),
        ],
    )
    .unwrap();
    let laws = vec![
        FormalGroupLaw::additive(&z(), N).unwrap(),
        mult_param(N),
        mult_int(1, N),
        FormalGroupLaw::lorentz(CoeffElem::from_int(&z(), 3), N).unwrap(),
        random_conjugate(&FormalGroupLaw::additive(&z(), N).unwrap(), &mut rng, 4).unwrap(),
        random_conjugate(&mult_int(2, N), &mut rng, 4).unwrap(),
        free,
    ];
    for law in &laws {
        let s = law.spec().clone();
        for family in ["E", "L"] {
            let x: Vec<SRSeries> = (1..=3).map(|i| var(&fan, &s, &format!("{family}{i}"))).collect();
            let fs = law.formal_sum(&x[0], &x[1]).map_err(e2s)?;
            ensure(fs == x[0].try_add(&x[1]).unwrap(), || format!("{family}1 +_F {family}2 = {fs} under {law:?}"))?;
            let triple = law.formal_sum(&fs, &x[2]).map_err(e2s)?;
            let tp = triple.powers(4).unwrap();
            let xp: Vec<Vec<SRSeries>> = x.iter().map(|e| e.powers(4).unwrap()).collect();
            for n in 1..=4usize {
                let want = xp[0][n].try_add(&xp[1][n]).unwrap().try_add(&xp[2][n]).unwrap();
                ensure(tp[n] == want, || format!("power {n} of the {family} sum under {law:?}"))?;
            }
        }
    }
    Ok(format!("{} laws, E and L families, powers 1..4", laws.len()))
}

// 5. gluing
fn gluing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p2 = catalog("pn:2");
    let sub = Arc::new(p2.star_subdivision(&Cone::new(vec![0, 1]), None).unwrap().0);
    let fans = [("P2", p2), ("dP6", catalog("dp6")), ("P3", catalog("pn:3")), ("Bl P2", sub)];
    let shape = SampleShape { max_degree: 4, terms: 8, coeff_bound: 9 };
    for (name, fan) in &fans {
        for k in 0..100 {
            let f = random_element(fan, N, shape, &mut rng);
            let g = glue_tuple(fan, &f.restrictions()).map_err(e2s)?;
            ensure(g == f, || format!("{name}: sample {k} glues to {g}, not {f}"))?;
        }
        for k in 0..20 {
            let t = random_compatible_tuple(fan, N, shape, &mut rng);
            let g = glue_tuple(fan, &t).map_err(e2s)?;
            ensure(g.restrictions() == t, || format!("{name}: tuple {k} not recovered"))?;
            let mut bad = t.clone();
            let (i, _) = break_tuple(fan, &mut bad, &mut rng);
            match glue_tuple(fan, &bad) {
                Err(Error::Incompatible { first, second, .. }) => {
                    let li = fan.cone_label(&fan.max_cones()[i]);
                    ensure(first == li || second == li, || {
                        format!("{name}: witness ({first}, {second}) misses the altered cone {li}")
                    })?;
                }
                other => return Err(format!("{name}: broken tuple gave {other:?}")),
            }
        }
    }
    Ok("4 fans: 100 roundtrips, 20 tuples, 20 rejections each".into())
}

// 6. formal group laws
fn fgl_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let u = ParamSpec::new(&["u2"], &[]).unwrap();
    let laws = vec![
        ("additive", FormalGroupLaw::additive(&z(), N).unwrap()),
        ("mult(v)", mult_param(N)),
        ("lorentz(u2)", FormalGroupLaw::lorentz(CoeffElem::param(&u, "u2").unwrap(), N).unwrap()),
        ("random", random_conjugate(&mult_int(1, N), &mut rng, 5).unwrap()),
    ];
    for (name, law) in &laws {
        let r = check_fgl_axioms(law);
        ensure(r.passed(), || format!("{name}: {:?}", r.first_failure()))?;
        let s = law.spec();
        let x = Series::var(s, 1, N, 0);
        let sum = law.formal_sum(&x, &law.formal_inverse(&x).unwrap()).unwrap();
        ensure(sum.is_zero(), || format!("{name}: x +_F chi(x) = {sum}"))?;
    }
    // chi(z) = -sum_{i<6} v^i z^{i+1}
    let s = v_spec();
    let v = CoeffElem::param(&s, "v").unwrap();
    let chi = mult_param(N).inverse_coefficients(N).unwrap();
    for i in 0..N as usize {
        let want = -&v.pow(i as u32);
        ensure(chi[i + 1] == want, || format!("chi coefficient {} is {}", i + 1, chi[i + 1]))?;
    }
    Ok(format!("{} laws at N = {N}", laws.len()))
}

// 7. blow-up of P2 at a 2-cone
fn blowup_p2() -> Outcome {
    let s = v_spec();
    let v = CoeffElem::param(&s, "v").unwrap();
    let law = mult_param(N);
    let p2 = catalog("pn:2");
    let ctx = make_blowup(&p2, &Cone::new(vec![0, 1]), &law).map_err(e2s)?;
    let base = ctx.base().clone();
    let mono = |e: [u32; 3], c: CoeffElem| SRSeries::normalize(&base, &s, N, [(Monomial::new(e.to_vec()), c)]);
    let one = CoeffElem::one(&s);
    let push = |sv: [u32; 2], t: u32| ctx.push_monomial(&sv, t, PushMethod::Auto).unwrap();

    ensure(push([0, 0], 1) == mono([1, 1, 0], v.clone()), || format!("pi_*(x_E) = {}", push([0, 0], 1)))?;
    let want = mono([2, 1, 0], v.clone())
        .try_add(&mono([1, 2, 0], v.clone()))
        .unwrap()
        .try_sub(&mono([1, 1, 0], one.clone()))
        .unwrap();
    ensure(push([0, 0], 2) == want, || format!("pi_*(x_E^2) = {}", push([0, 0], 2)))?;

    // x_a x_b^t (x_a -_F x_b)^{s-1}, computed here from the law directly
    let xv = |r: usize| SRSeries::var(&base, &s, N, r);
    let mut count = 0;
    for a in 0..2usize {
        let b = 1 - a;
        let diff = law.formal_difference(&xv(a), &xv(b)).unwrap();
        for sa in 1..=N {
            for t in 0..=N - sa {
                let mut want = xv(a).try_mul(&xv(b).powers(t).unwrap()[t as usize]).unwrap();
                want = want.try_mul(&diff.powers(sa - 1).unwrap()[(sa - 1) as usize]).unwrap();
                let mut sv = [0u32; 2];
                sv[a] = sa;
                ensure(push(sv, t) == want, || format!("pi_* at s = {sv:?}, t = {t}"))?;
                let rec = ctx.push_monomial(&sv, t, PushMethod::Recursive).map_err(e2s)?;
                ensure(rec == want, || format!("recursion differs at s = {sv:?}, t = {t}"))?;
                count += 1;
            }
        }
    }
    for ((sv, t), (closed, rec)) in compare_methods(&ctx, N).map_err(e2s)? {
        ensure(closed == rec, || format!("methods differ at {sv:?}, {t}"))?;
    }

    let chi_e = law.formal_inverse(&ctx.exceptional_var()).unwrap();
    ensure(ctx.pushforward(&chi_e).map_err(e2s)?.is_zero(), || "pi_*(chi(x_E)) != 0".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let shape = SampleShape { max_degree: N, terms: 6, coeff_bound: 5 };
    let mut samples = Vec::new();
    for _ in 0..50 {
        let f = embed(&random_element(&base, N, shape, &mut rng), &s);
        let g = embed(&random_element(ctx.subdivided(), N, shape, &mut rng), &s);
        // mix in the parameter
        let g = g.try_add(&g.scale(&v).unwrap().mul_monomial(&Monomial::one(g.fan().num_rays()), &one).unwrap()).unwrap();
        samples.push((f, g));
    }
    let report = ctx.check_push_pull(&samples).map_err(e2s)?;
    ensure(report.passed(), || format!("{:?}", report.failures.first()))?;

    // specialization commutes with pushforward
    for (val, direct) in [(0, FormalGroupLaw::additive(&z(), N).unwrap()), (1, mult_int(1, N))] {
        let dctx = make_blowup(&p2, &Cone::new(vec![0, 1]), &direct).map_err(e2s)?;
        for (_, g) in &samples {
            let lhs = ctx.pushforward(g).unwrap().specialize(&z(), &at(&s, val)).unwrap();
            let gs = g.specialize(&z(), &at(&s, val)).unwrap();
            let rhs = dctx.pushforward(&gs).map_err(e2s)?;
            ensure(lhs == rhs, || format!("v = {val}: specialization does not commute"))?;
        }
    }
    Ok(format!("{count} closed-form values, 50 projection samples, v in {{0,1}}"))
}

// 8. blow-up of P3 at a 3-cone
fn blowup_p3() -> Outcome {
    let s = v_spec();
    let v = CoeffElem::param(&s, "v").unwrap();
    let p3 = catalog("pn:3");
    let ctx = make_blowup(&p3, &Cone::new(vec![0, 1, 2]), &mult_param(N)).map_err(e2s)?;
    let x123 = SRSeries::normalize(ctx.base(), &s, N, [(Monomial::new(vec![1, 1, 1, 0]), CoeffElem::one(&s))]);
    let push = |sv: [u32; 3], t| ctx.push_monomial(&sv, t, PushMethod::Recursive).unwrap();
    ensure(push([0, 0, 0], 1) == x123.scale(&v.pow(2)).unwrap(), || format!("pi_*(x_E) = {}", push([0, 0, 0], 1)))?;
    for i in 0..3 {
        let mut e = [0u32; 3];
        e[i] = 1;
        ensure(push(e, 1) == x123.scale(&v).unwrap(), || format!("pi_*(x_{} x_E) = {}", i + 1, push(e, 1)))?;
        let mut f = [1u32; 3];
        f[i] = 0;
        ensure(push(f, 1) == x123, || format!("pi_*(x_S x_E) with S = {f:?}: {}", push(f, 1)))?;
    }
    Ok("pi_*(x_E), pi_*(x_i x_E), pi_*(x_i x_j x_E) exact".into())
}

fn piecewise_hom(fan: &Arc<Fan>, law: &FormalGroupLaw, mode: PiecewiseMode, rng: &mut ChaCha8Rng) -> Result<(), String> {
    for k in 0..50 {
        let (f, g) = random_pair(fan, N, 5, rng);
        let pf = to_piecewise(&f, law, mode).map_err(e2s)?;
        let pg = to_piecewise(&g, law, mode).map_err(e2s)?;
        let pfg = to_piecewise(&f.try_mul(&g).unwrap(), law, mode).map_err(e2s)?;
        let psum = to_piecewise(&f.try_add(&g).unwrap(), law, mode).map_err(e2s)?;
        ensure(pfg == pf.try_mul(&pg).unwrap(), || format!("product, pair {k}"))?;
        ensure(psum == pf.try_add(&pg).unwrap(), || format!("sum, pair {k}"))?;
        for p in [&pf, &pg, &pfg] {
            ensure(p.is_compatible().map_err(e2s)?, || format!("incompatible image, pair {k}"))?;
        }
    }
    Ok(())
}

// 9. piecewise oracle
fn piecewise() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let add = FormalGroupLaw::additive(&z(), N).unwrap();
    for name in ["pn:2", "dp6"] {
        let fan = catalog(name);
        piecewise_hom(&fan, &add, PiecewiseMode::Polynomial, &mut rng).map_err(|e| format!("{name}: {e}"))?;
        for r in 0..fan.num_rays() {
            let phi = courant_function(&fan, r);
            ensure(phi.is_compatible().map_err(e2s)?, || format!("{name}: phi_{r} incompatible"))?;
            for q in 0..fan.num_rays() {
                let val = phi.eval(fan.ray(q)).map_err(e2s)?;
                let want = CoeffElem::from_int(&z(), i64::from(r == q));
                ensure(val == want, || format!("{name}: phi_{r}(v_{q}) = {val}"))?;
            }
        }
    }
    let dp6 = catalog("dp6");
    let (count, rank) = injectivity_rank(&dp6, 3, 3).map_err(e2s)?;
    ensure(count == rank, || format!("rank {rank} of {count} face monomials"))?;
    piecewise_hom(&dp6, &mult_int(1, N), PiecewiseMode::Exponential, &mut rng).map_err(|e| format!("exponential: {e}"))?;
    Ok(format!("homomorphism, Courant conditions, injectivity rank {rank}/{count}"))
}

// 10. specializations of mult(v) against direct laws
fn cross_law() -> Outcome {
    let fan = catalog("dp6");
    let general = mult_param(N);
    for (val, direct) in [(0, FormalGroupLaw::additive(&z(), N).unwrap()), (1, mult_int(1, N))] {
        for tau in fan.max_cones() {
            let (items_v, ranks_v, pres_v) = dp6_ordinary_checks(&fan, &general, tau, Some(val))?;
            let (items_d, ranks_d, pres_d) = dp6_ordinary_checks(&fan, &direct, tau, None)?;
            ensure(items_v == items_d, || format!("v = {val}: membership results differ"))?;
            ensure(ranks_v == ranks_d, || format!("v = {val}: ranks {ranks_v:?} vs {ranks_d:?}"))?;
            ensure(pres_v.relations == pres_d.relations, || format!("v = {val}: relations differ"))?;
            ensure(items_d.iter().all(|(_, ok)| *ok), || {
                let bad: Vec<_> = items_d.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.clone()).collect();
                format!("v = {val}: not in ideal: {bad:?}")
            })?;
        }
    }
    Ok("v = 0 and v = 1 agree with additive and mult(1) on all 6 cones".into())
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("P^n presentations and ordinary ranks", pn_models),
        ("dP6 equivariant model", dp6_equivariant),
        ("dP6 ordinary model (additive)", dp6_ordinary),
        ("dP6 exceptional-curve identities", dp6_identities),
        ("gluing", gluing),
        ("formal group law suite", fgl_suite),
        ("blow-up of P2 at a 2-cone", blowup_p2),
        ("blow-up of P3 at a 3-cone", blowup_p3),
        ("piecewise oracle", piecewise),
        ("cross-law consistency", cross_law),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.2}s)", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({secs:.2}s)", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
