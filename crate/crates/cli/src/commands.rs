use std::fmt::Write as _;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use torfan::blowup::{make_blowup, PushMethod};
use torfan::fan::{validate_fan, Cone, Fan, Validation};
use torfan::fgl::check_fgl_axioms;
use torfan::piecewise::{courant_function, to_piecewise, PiecewiseFunc, PiecewiseMode};
use torfan::sample::{random_element, random_pair, SampleShape};
use torfan::series::FormalHost;
use torfan::sr::{
    character_class, default_elimination_cone, equivariant_presentation, glue_tuple,
    ordinary_presentation, Eliminator,
};
use torfan::{Error, FormalGroupLaw, SRSeries};

use crate::args::{read_json_arg, Apply, Method, Mode};
use crate::session::{parse_cone, parse_point, parse_rays, Failure, Outcome, Session};

/// Rendered result of a command. `failed` carries the message of a check
/// failure; the report is still printed.
pub struct Report {
    pub text: String,
    pub json: Value,
    pub failed: Option<String>,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report { text, json, failed: None }
    }
}

fn labels(fan: &Fan, cone: &Cone) -> Vec<String> {
    cone.rays().iter().map(|&r| fan.label(r).to_string()).collect()
}

fn fan_summary(fan: &Fan, text: &mut String) -> Value {
    writeln!(text, "dimension {}, {} rays, {} maximal cones", fan.dim(), fan.num_rays(), fan.max_cones().len()).unwrap();
    for (i, r) in fan.rays().iter().enumerate() {
        writeln!(text, "  ray {i} {}: {r:?}", fan.label(i)).unwrap();
    }
    let cones: Vec<String> = fan.max_cones().iter().map(|c| fan.cone_label(c)).collect();
    writeln!(text, "maximal cones: {}", cones.join(" ")).unwrap();
    let nonfaces: Vec<String> = fan.minimal_nonfaces().iter().map(|c| fan.cone_label(c)).collect();
    writeln!(text, "minimal non-faces: {}", nonfaces.join(" ")).unwrap();
    json!({
        "fan": fan.to_json(),
        "minimal_nonfaces": fan.minimal_nonfaces().iter().map(|c| labels(fan, c)).collect::<Vec<_>>(),
    })
}

pub fn validate(fan: &Arc<Fan>, trusted: bool) -> Outcome<Report> {
    let mode = if trusted { Validation::Trusted } else { Validation::Strict };
    let report = validate_fan(fan, mode);
    let mut text = String::new();
    let mut json = fan_summary(fan, &mut text);
    let issues: Vec<String> = report.issues.iter().map(|i| i.to_string()).collect();
    json["issues"] = json!(issues);
    if issues.is_empty() {
        writeln!(text, "valid ({} checks)", if trusted { "trusted" } else { "strict" }).unwrap();
        json["valid"] = json!(true);
        Ok(Report::ok(text, json))
    } else {
        Err(Failure::input(format!("invalid fan: {}", issues.join("; "))))
    }
}

pub fn model(fan: &Arc<Fan>, s: &Session, characters: bool) -> Outcome<Report> {
    let pres = equivariant_presentation(fan, &s.law);
    let mut text = pres.to_string();
    let mut json = json!({"presentation": pres.to_json()});
    if characters {
        let mut list = Vec::new();
        text.push_str("character classes:\n");
        for i in 0..fan.dim() {
            let mut e = vec![0i64; fan.dim()];
            e[i] = 1;
            let c = character_class(fan, &s.law, &e)?;
            writeln!(text, "  c({e:?}) = {c}").unwrap();
            list.push(json!({"character": e, "class": c.to_json()}));
        }
        json["characters"] = Value::Array(list);
    }
    Ok(Report::ok(text, json))
}

pub fn ordinary(fan: &Arc<Fan>, s: &Session, tau: Option<&str>, element: Option<&str>) -> Outcome<Report> {
    let tau = match tau {
        Some(t) => parse_cone(fan, t)?,
        None => default_elimination_cone(fan)?,
    };
    let pres = ordinary_presentation(fan, &s.law, Some(&tau))?;
    let mut text = format!("eliminated cone: {}\n", fan.cone_label(&tau));
    text.push_str(&pres.to_string());
    let mut json = json!({"tau": labels(fan, &tau), "presentation": pres.to_json()});
    if s.spec().is_empty() {
        let top = (fan.dim() as u32 + 1).min(s.n);
        let ranks = (0..=top).map(|d| pres.graded_rank(d)).collect::<torfan::Result<Vec<_>>>()?;
        let shown: Vec<String> = ranks.iter().map(usize::to_string).collect();
        writeln!(text, "graded ranks (degrees 0..{top}): {}", shown.join(" ")).unwrap();
        json["graded_ranks"] = json!(ranks);
    } else {
        text.push_str("graded ranks need integer coefficients; use --specialize\n");
    }
    if let Some(arg) = element {
        let f = s.element(fan, arg)?;
        let reduced = Eliminator::new(fan, &s.law, &tau)?.apply(&f)?;
        writeln!(text, "element: {f}\nreduced: {reduced}").unwrap();
        json["element"] = f.to_json();
        json["reduced"] = reduced.to_json();
        if s.spec().is_empty() {
            let member = pres.ideal_membership(&reduced.to_series())?;
            writeln!(text, "in the ideal: {member}").unwrap();
            json["in_ideal"] = json!(member);
        }
    }
    Ok(Report::ok(text, json))
}

pub fn pic(fan: &Arc<Fan>) -> Outcome<Report> {
    let p = fan.picard_presentation()?;
    let mut text = String::new();
    writeln!(text, "rank {}", p.free_rank).unwrap();
    if p.torsion.is_empty() {
        text.push_str("no torsion\n");
    } else {
        let t: Vec<String> = p.torsion.iter().map(|d| format!("Z/{d}")).collect();
        writeln!(text, "torsion {}", t.join(" + ")).unwrap();
    }
    writeln!(text, "invariant factors {:?}", p.invariant_factors).unwrap();
    writeln!(text, "characters inject into divisors: {}", p.injective).unwrap();
    text.push_str("classes of the toric divisors:\n");
    let mut classes = Vec::new();
    for r in 0..fan.num_rays() {
        let mut d = vec![0i64; fan.num_rays()];
        d[r] = 1;
        let c = p.class_of(&d);
        writeln!(text, "  D_{} -> {c:?}", fan.label(r)).unwrap();
        classes.push(json!({"ray": fan.label(r), "class": c}));
    }
    let json = json!({
        "free_rank": p.free_rank,
        "torsion": p.torsion,
        "invariant_factors": p.invariant_factors,
        "injective": p.injective,
        "coordinates": p.coordinates,
        "divisor_classes": classes,
    });
    Ok(Report::ok(text, json))
}

pub fn glue_check(fan: &Arc<Fan>, s: &Session, tuple: Option<&str>, samples: usize, seed: u64) -> Outcome<Report> {
    if let Some(arg) = tuple {
        let value = read_json_arg(arg).map_err(Failure::input)?;
        let items = value.as_array().ok_or_else(|| Failure::input("tuple must be a JSON list"))?;
        let parts = items.iter().map(|v| s.element_from_json(fan, v)).collect::<Outcome<Vec<_>>>()?;
        return match glue_tuple(fan, &parts) {
            Ok(g) => Ok(Report::ok(
                format!("compatible; glued element: {g}\n"),
                json!({"compatible": true, "glued": g.to_json()}),
            )),
            Err(Error::Incompatible { first, second, monomial }) => {
                let msg = format!("cones {first} and {second} disagree on {monomial}");
                Ok(Report {
                    text: format!("incompatible: {msg}\n"),
                    json: json!({"compatible": false, "cones": [first, second], "monomial": monomial}),
                    failed: Some(msg),
                })
            }
            Err(e) => Err(e.into()),
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for k in 0..samples {
        let f = s.embed(&random_element(fan, s.n, SampleShape::default(), &mut rng))?;
        let g = glue_tuple(fan, &f.restrictions())?;
        if g != f {
            failures.push(format!("sample {k}: {f} glued to {g}"));
        }
    }
    let text = format!("{} samples restricted and glued, {} failures\n{}", samples, failures.len(), lines(&failures));
    let json = json!({"samples": samples, "failures": failures});
    let failed = failures.first().cloned();
    Ok(Report { text, json, failed })
}

fn lines(items: &[String]) -> String {
    items.iter().map(|l| format!("  {l}\n")).collect()
}

#[allow(clippy::too_many_arguments)]
pub fn blowup(
    fan: &Arc<Fan>,
    s: &Session,
    center: &str,
    apply: Option<Apply>,
    element: Option<&str>,
    degree: u32,
    method: Method,
    samples: usize,
    seed: u64,
) -> Outcome<Report> {
    let center = parse_cone(fan, center)?;
    let ctx = make_blowup(fan, &center, &s.law)?;
    let method = match method {
        Method::Auto => PushMethod::Auto,
        Method::Recursive => PushMethod::Recursive,
    };
    let sub = ctx.subdivided().clone();
    let e_label = sub.label(ctx.exceptional()).to_string();
    let seeds = ctx.uses_generalized_seeds();
    let seed_note = if seeds {
        "note: center of dimension >= 4, push-forward uses the generalized seed data\n"
    } else {
        ""
    };
    if let Some(apply) = apply {
        let arg = element.ok_or_else(|| Failure::usage("--apply needs --element"))?;
        let (input, output) = match apply {
            Apply::Pullback => {
                let f = s.element(fan, arg)?;
                let g = ctx.pullback(&f)?;
                (f, g)
            }
            Apply::Pushforward => {
                let f = s.element(&sub, arg)?;
                let g = ctx.pushforward_with(&f, method)?;
                (f, g)
            }
        };
        let name = match apply {
            Apply::Pullback => "pullback",
            Apply::Pushforward => "pushforward",
        };
        let text = format!(
            "{seed_note}center: {}\nexceptional ray: {e_label}\ninput: {input}\n{name}: {output}\n",
            fan.cone_label(&center)
        );
        let json = json!({
            "center": labels(fan, &center),
            "exceptional": e_label,
            "generalized_seeds": seeds,
            "input": input.to_json(),
            name: output.to_json(),
        });
        return Ok(Report::ok(text, json));
    }

    let mut text = format!("{seed_note}center: {}\n", fan.cone_label(&center));
    writeln!(text, "subdivided fan ({e_label} = sum of the center rays):").unwrap();
    let sub_json = fan_summary(&sub, &mut text);
    writeln!(text, "push-forward table (degree <= {degree}):").unwrap();
    let mut table = Vec::new();
    for (key, value) in ctx.pushforward_table(degree)? {
        writeln!(text, "  pi_*({key}) = {value}").unwrap();
        table.push(json!({"monomial": key, "value": value.to_json()}));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = SampleShape { max_degree: s.n / 2, terms: 4, coeff_bound: 5 };
    let mut pairs = Vec::new();
    for _ in 0..samples {
        let f = s.embed(&random_element(fan, s.n, half, &mut rng))?;
        let g = s.embed(&random_element(&sub, s.n, half, &mut rng))?;
        pairs.push((f, g));
    }
    let report = ctx.check_push_pull(&pairs)?;
    let failures: Vec<String> = report.failures.iter().map(|f| format!("{:?}: {}", f.check, f.witness)).collect();
    writeln!(text, "push-pull checks on {} samples: {} failures", report.samples, failures.len()).unwrap();
    text.push_str(&lines(&failures));
    let json = json!({
        "center": labels(fan, &center),
        "exceptional": e_label,
        "generalized_seeds": seeds,
        "subdivided": sub_json,
        "pushforward_table": table,
        "checks": {"samples": report.samples, "failures": failures},
    });
    let failed = failures.first().cloned();
    Ok(Report { text, json, failed })
}

pub fn specialize(fan: &Arc<Fan>, s: &Session, element: &str) -> Outcome<Report> {
    let value = read_json_arg(element).map_err(Failure::input)?;
    let raw = SRSeries::from_json(fan, s.raw_law.spec(), s.n, &value)?;
    let out = s.specialize(&raw)?;
    let text = format!("input: {raw}\nspecialized ({}): {out}\n", s.specialization_text());
    Ok(Report::ok(text, json!({"input": raw.to_json(), "specialized": out.to_json()})))
}

fn piecewise_json(p: &PiecewiseFunc) -> Value {
    let fan = p.fan();
    let pieces: Vec<Value> = fan
        .max_cones()
        .iter()
        .zip(p.pieces())
        .map(|(c, piece)| json!({"cone": labels(fan, c), "piece": piece.to_json()}))
        .collect();
    Value::Array(pieces)
}

pub fn piecewise(
    fan: &Arc<Fan>,
    s: &Session,
    element: Option<&str>,
    courant: Option<&str>,
    mode: Mode,
    point: Option<&str>,
) -> Outcome<Report> {
    let mode = match mode {
        Mode::Polynomial => PiecewiseMode::Polynomial,
        Mode::Exponential => PiecewiseMode::Exponential,
    };
    let p = match (element, courant) {
        (_, Some(ray)) => {
            let rays = parse_rays(fan, ray)?;
            let [r] = rays[..] else {
                return Err(Failure::usage("--courant takes a single ray"));
            };
            courant_function(fan, r)
        }
        (Some(arg), None) => to_piecewise(&s.element(fan, arg)?, &s.law, mode)?,
        (None, None) => return Err(Failure::usage("give --element or --courant")),
    };
    let mut text = p.to_string();
    let compatible = p.is_compatible()?;
    writeln!(text, "compatible: {compatible}").unwrap();
    let mut json = json!({"pieces": piecewise_json(&p), "compatible": compatible});
    if let Some(pt) = point {
        let x = parse_point(pt)?;
        let v = p.eval(&x)?;
        writeln!(text, "value at {x:?}: {v}").unwrap();
        json["point"] = json!(x);
        json["value"] = v.to_json();
    }
    let failed = (!compatible).then(|| "pieces disagree on a shared face".to_string());
    Ok(Report { text, json, failed })
}

struct Check {
    fan: String,
    name: &'static str,
    outcome: Result<(), String>,
}

fn run_checks(name: &str, fan: &Arc<Fan>, n: u32, samples: usize, seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut push = |check: &'static str, outcome: Result<(), String>| {
        out.push(Check { fan: name.to_string(), name: check, outcome });
    };
    let err = |e: Error| e.to_string();

    let report = validate_fan(fan, Validation::Strict);
    push(
        "strict validation",
        match report.issues.first() {
            None => Ok(()),
            Some(i) => Err(i.to_string()),
        },
    );
    push(
        "json round trip",
        Fan::from_json(&fan.to_json(), Validation::Strict).map_err(err).and_then(|f| {
            (f.to_json() == fan.to_json()).then_some(()).ok_or_else(|| "fan changed".to_string())
        }),
    );

    let z = torfan::ParamSpec::integers();
    let nonface = (|| {
        for c in fan.minimal_nonfaces() {
            let mut p = SRSeries::one(fan, &z, n);
            for &r in c.rays() {
                p = p.try_mul(&SRSeries::var(fan, &z, n, r)).map_err(err)?;
            }
            if !p.is_zero() {
                return Err(format!("x over {} is {p}", fan.cone_label(&c)));
            }
        }
        Ok(())
    })();
    push("minimal non-faces vanish", nonface);

    let glue = (|| {
        for _ in 0..samples {
            let f = random_element(fan, n, SampleShape::default(), &mut rng);
            if glue_tuple(fan, &f.restrictions()).map_err(err)? != f {
                return Err(format!("{f} does not glue back"));
            }
        }
        Ok(())
    })();
    push("glue of restrictions", glue);

    let additive = FormalGroupLaw::additive(&z, n).expect("integers");
    // Betti numbers of a smooth complete toric variety add up to the number
    // of maximal cones.
    let euler = (|| {
        let pres = ordinary_presentation(fan, &additive, None).map_err(err)?;
        let mut total = 0;
        for d in 0..=fan.dim() as u32 {
            total += pres.graded_rank(d).map_err(err)?;
        }
        if total != fan.max_cones().len() {
            return Err(format!("ranks add up to {total}, expected {}", fan.max_cones().len()));
        }
        if pres.graded_rank(fan.dim() as u32 + 1).map_err(err)? != 0 {
            return Err("nonzero rank above the dimension".into());
        }
        Ok(())
    })();
    push("ordinary ranks", euler);

    let pw = (|| {
        for _ in 0..samples {
            let (f, g) = random_pair(fan, n, 4, &mut rng);
            let lhs = to_piecewise(&f.try_mul(&g).map_err(err)?, &additive, PiecewiseMode::Polynomial).map_err(err)?;
            let pf = to_piecewise(&f, &additive, PiecewiseMode::Polynomial).map_err(err)?;
            let pg = to_piecewise(&g, &additive, PiecewiseMode::Polynomial).map_err(err)?;
            if lhs != pf.try_mul(&pg).map_err(err)? {
                return Err(format!("product of {f} and {g}"));
            }
        }
        Ok(())
    })();
    push("piecewise homomorphism", pw);

    if fan.dim() >= 2 {
        let blow = (|| {
            let center = Cone::new(fan.max_cones()[0].rays()[..2].to_vec());
            let law = FormalGroupLaw::multiplicative(torfan::CoeffElem::one(&z), n).map_err(err)?;
            let ctx = make_blowup(fan, &center, &law).map_err(err)?;
            let half = SampleShape { max_degree: n / 2, terms: 4, coeff_bound: 5 };
            let pairs: Vec<_> = (0..samples)
                .map(|_| (random_element(fan, n, half, &mut rng), random_element(ctx.subdivided(), n, half, &mut rng)))
                .collect();
            let report = ctx.check_push_pull(&pairs).map_err(err)?;
            match report.failures.first() {
                None => Ok(()),
                Some(f) => Err(format!("{:?}: {}", f.check, f.witness)),
            }
        })();
        push("blow-up push-pull", blow);
    }
    out
}

pub fn selftest(s: &Session, catalog: &str, samples: usize, seed: u64) -> Outcome<Report> {
    let names: Vec<&str> = catalog.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
    let mut checks = Vec::new();
    if !names.is_empty() {
        let report = check_fgl_axioms(&s.law);
        checks.push(Check {
            fan: "-".into(),
            name: "formal group law axioms",
            outcome: match report.first_failure() {
                None => Ok(()),
                Some(f) => Err(format!("{f:?}")),
            },
        });
    }
    for name in &names {
        let fan = Arc::new(Fan::catalog(name)?);
        checks.extend(run_checks(name, &fan, s.n, samples, seed));
    }
    let mut text = String::new();
    let mut items = Vec::new();
    let mut failures = 0;
    for c in &checks {
        match &c.outcome {
            Ok(()) => writeln!(text, "PASS {} {}", c.fan, c.name).unwrap(),
            Err(why) => {
                failures += 1;
                writeln!(text, "FAIL {} {}: {why}", c.fan, c.name).unwrap();
            }
        }
        items.push(json!({"fan": c.fan, "check": c.name, "passed": c.outcome.is_ok(), "detail": c.outcome.as_ref().err()}));
    }
    writeln!(text, "{} checks, {} failed", checks.len(), failures).unwrap();
    let json = json!({"checks": items, "total": checks.len(), "failed": failures});
    let failed = (failures > 0).then(|| format!("{failures} self-test checks failed"));
    Ok(Report { text, json, failed })
}
