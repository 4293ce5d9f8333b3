//! Browser bindings. Each export takes plain strings and returns a JSON
//! string; the work happens in [`ops`], which also runs natively.

use wasm_bindgen::prelude::*;

pub mod ops {
    use std::collections::BTreeMap;
    use std::sync::Arc;

    use serde_json::{json, Value};
    use torfan::blowup::make_blowup;
    use torfan::fan::{Cone, Fan, Validation};
    use torfan::sr::{default_elimination_cone, ordinary_presentation};
    use torfan::{CoeffElem, FormalGroupLaw};

    type Out = Result<String, String>;

    const MAX_TRUNCATION: u32 = 10;

    fn err(e: torfan::Error) -> String {
        e.to_string()
    }

    /// Catalog name or fan JSON.
    fn load(source: &str) -> Result<Arc<Fan>, String> {
        let fan = if source.trim_start().starts_with('{') {
            let v: Value = serde_json::from_str(source).map_err(|e| format!("fan JSON: {e}"))?;
            Fan::from_json(&v, Validation::Strict)
        } else {
            Fan::catalog(source.trim())
        };
        fan.map(Arc::new).map_err(err)
    }

    fn cone(fan: &Fan, text: &str) -> Result<Cone, String> {
        let mut rays = Vec::new();
        for t in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let r = match t.parse::<usize>() {
                Ok(i) if i < fan.num_rays() => i,
                _ => fan.ray_index(t).ok_or_else(|| format!("unknown ray `{t}`"))?,
            };
            rays.push(r);
        }
        let c = Cone::new(rays);
        if c.dim() == 0 || !fan.is_face(c.rays()) {
            return Err(format!("{} is not a cone of the fan", fan.cone_label(&c)));
        }
        Ok(c)
    }

    /// The law of `selector`, with `assignments` such as `v=1` applied.
    fn law(selector: &str, assignments: &str, n: u32) -> Result<FormalGroupLaw, String> {
        if !(1..=MAX_TRUNCATION).contains(&n) {
            return Err(format!("truncation must lie in 1..={MAX_TRUNCATION}"));
        }
        let raw = FormalGroupLaw::from_selector(selector.trim(), n).map_err(err)?;
        let mut pairs = Vec::new();
        for item in assignments.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (name, value) = item.split_once('=').ok_or_else(|| format!("expected name=value, got `{item}`"))?;
            let value: i64 = value.trim().parse().map_err(|_| format!("`{value}` is not an integer"))?;
            pairs.push((name.trim().to_string(), value));
        }
        if pairs.is_empty() {
            return Ok(raw);
        }
        let names: Vec<&str> = pairs.iter().map(|(k, _)| k.as_str()).collect();
        let target = raw.spec().residual(&names);
        let assign: BTreeMap<String, CoeffElem> =
            pairs.iter().map(|(k, v)| (k.clone(), CoeffElem::from_int(&target, *v))).collect();
        raw.specialize(&target, &assign).map_err(err)
    }

    fn summary(fan: &Fan) -> Result<Value, String> {
        let label_list = |c: &Cone| -> Vec<String> { c.rays().iter().map(|&r| fan.label(r).to_string()).collect() };
        let pic = fan.picard_presentation().map_err(err)?;
        Ok(json!({
            "fan": fan.to_json(),
            "max_cone_labels": fan.max_cones().iter().map(label_list).collect::<Vec<_>>(),
            "minimal_nonfaces": fan.minimal_nonfaces().iter().map(label_list).collect::<Vec<_>>(),
            "picard": {"free_rank": pic.free_rank, "torsion": pic.torsion},
        }))
    }

    pub fn describe_fan(source: &str) -> Out {
        let fan = load(source)?;
        Ok(summary(&fan)?.to_string())
    }

    /// Star subdivision of `cone_text`; the result carries the new fan's JSON
    /// so it can be fed back as a source.
    pub fn subdivide(source: &str, cone_text: &str) -> Out {
        let fan = load(source)?;
        let c = cone(&fan, cone_text)?;
        let (sub, new_ray) = fan.star_subdivision(&c, None).map_err(err)?;
        let mut out = summary(&sub)?;
        out["new_ray"] = json!(sub.label(new_ray));
        Ok(out.to_string())
    }

    pub fn ordinary_model(source: &str, selector: &str, assignments: &str, n: u32) -> Out {
        let fan = load(source)?;
        let f = law(selector, assignments, n)?;
        let tau = default_elimination_cone(&fan).map_err(err)?;
        let pres = ordinary_presentation(&fan, &f, Some(&tau)).map_err(err)?;
        let ranks = if f.spec().is_empty() {
            let top = (fan.dim() as u32 + 1).min(n);
            let r = (0..=top).map(|d| pres.graded_rank(d)).collect::<Result<Vec<_>, _>>().map_err(err)?;
            Value::from(r)
        } else {
            Value::Null
        };
        Ok(json!({
            "tau": fan.cone_label(&tau),
            "text": pres.to_string(),
            "graded_ranks": ranks,
        })
        .to_string())
    }

    pub fn pushforward_table(source: &str, center: &str, selector: &str, assignments: &str, degree: u32, n: u32) -> Out {
        let fan = load(source)?;
        let f = law(selector, assignments, n)?;
        let c = cone(&fan, center)?;
        let ctx = make_blowup(&fan, &c, &f).map_err(err)?;
        let rows: Vec<Value> = ctx
            .pushforward_table(degree.min(n))
            .map_err(err)?
            .into_iter()
            .map(|(k, v)| json!({"monomial": k, "value": v.to_string()}))
            .collect();
        Ok(json!({"center": fan.cone_label(&c), "rows": rows}).to_string())
    }
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = describeFan)]
pub fn describe_fan(source: &str) -> Result<String, JsError> {
    js(ops::describe_fan(source))
}

#[wasm_bindgen]
pub fn subdivide(source: &str, cone: &str) -> Result<String, JsError> {
    js(ops::subdivide(source, cone))
}

#[wasm_bindgen(js_name = ordinaryModel)]
pub fn ordinary_model(source: &str, fgl: &str, specialize: &str, truncate: u32) -> Result<String, JsError> {
    js(ops::ordinary_model(source, fgl, specialize, truncate))
}

#[wasm_bindgen(js_name = pushforwardTable)]
pub fn pushforward_table(
    source: &str,
    center: &str,
    fgl: &str,
    specialize: &str,
    degree: u32,
    truncate: u32,
) -> Result<String, JsError> {
    js(ops::pushforward_table(source, center, fgl, specialize, degree, truncate))
}

#[cfg(test)]
mod tests {
    use super::ops;
    use serde_json::Value;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn describe_dp6() {
        let v = parse(&ops::describe_fan("dp6").unwrap());
        assert_eq!(v["picard"]["free_rank"], 4);
        assert_eq!(v["minimal_nonfaces"].as_array().unwrap().len(), 9);
    }

    #[test]
    fn subdivide_feeds_back() {
        let v = parse(&ops::subdivide("pn:2", "0,1").unwrap());
        assert_eq!(v["new_ray"], "E");
        let again = parse(&ops::subdivide(&v["fan"].to_string(), "x1,E").unwrap());
        assert_eq!(again["fan"]["rays"].as_array().unwrap().len(), 5);
        assert_eq!(again["picard"]["free_rank"], 3);
        assert!(ops::subdivide("pn:2", "0").is_err());
    }

    #[test]
    fn ordinary_ranks() {
        let v = parse(&ops::ordinary_model("dp6", "additive", "", 6).unwrap());
        assert_eq!(v["graded_ranks"], serde_json::json!([1, 4, 1, 0]));
        let v = parse(&ops::ordinary_model("pn:2", "mult:v", "", 6).unwrap());
        assert!(v["graded_ranks"].is_null());
        let v = parse(&ops::ordinary_model("pn:2", "mult:v", "v=1", 6).unwrap());
        assert_eq!(v["graded_ranks"], serde_json::json!([1, 1, 1, 0]));
        assert!(ops::ordinary_model("pn:2", "additive", "", 40).is_err());
    }

    #[test]
    fn pushforward_rows() {
        let v = parse(&ops::pushforward_table("pn:2", "0,1", "mult:v", "", 1, 6).unwrap());
        let rows = v["rows"].as_array().unwrap();
        let e = rows.iter().find(|r| r["monomial"] == "x_E").unwrap();
        assert_eq!(e["value"], "v*x_x1*x_x2");
        assert!(ops::pushforward_table("pn:2", "0,1", "lorentz:u2", "", 1, 6).is_err());
    }
}
