//! Loading fans, laws and elements from command-line arguments.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};
use torfan::fan::{Cone, Fan, Validation};
use torfan::{CoeffElem, Error, FormalGroupLaw, ParamSpec, SRSeries};

use crate::args::{read_json_arg, Common};

/// Exit statuses.
pub const CHECK_FAILED: u8 = 1;
pub const USAGE: u8 = 2;
pub const INPUT: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: USAGE, kind: "usage", message: message.into() }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: INPUT, kind: "input", message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::InvalidFan(_) | Error::Structural(_) => INPUT,
            Error::Domain(_) | Error::Unsupported(_) => USAGE,
            Error::Incompatible { .. } | Error::Underdetermined(_) | Error::Overflow(_) => CHECK_FAILED,
        };
        let kind = match code {
            INPUT => "input",
            USAGE => "usage",
            _ => "check",
        };
        Failure { code, kind, message: e.to_string() }
    }
}

pub type Outcome<T> = Result<T, Failure>;

/// A fan given as a catalog name or a JSON file.
pub fn load_fan(source: &str, mode: Validation) -> Outcome<Arc<Fan>> {
    if std::path::Path::new(source).is_file() {
        let value = read_json_arg(source).map_err(Failure::input)?;
        return Ok(Arc::new(Fan::from_json(&value, mode)?));
    }
    if source.trim_start().starts_with('{') {
        let value = read_json_arg(source).map_err(Failure::input)?;
        return Ok(Arc::new(Fan::from_json(&value, mode)?));
    }
    Fan::catalog(source).map(Arc::new).map_err(|e| match e {
        Error::Parse(m) => Failure::input(format!("`{source}` is neither a file nor a catalog fan: {m}")),
        other => other.into(),
    })
}

/// Law, truncation and specialization shared by the commands.
pub struct Session {
    pub n: u32,
    /// The law as selected, before specialization.
    pub raw_law: FormalGroupLaw,
    /// The law after specialization.
    pub law: FormalGroupLaw,
    pub assignment: BTreeMap<String, CoeffElem>,
}

impl Session {
    pub fn new(common: &Common) -> Outcome<Self> {
        let n = common.truncate;
        let raw_law = match common.fgl.strip_prefix("generic:") {
            Some(path) => {
                let value = read_json_arg(path).map_err(Failure::input)?;
                let law = FormalGroupLaw::from_json(&value)?;
                if !law.is_polynomial() && law.degree() < n {
                    return Err(Failure::input(format!(
                        "table is known to degree {} but N = {n}; pass --truncate {}",
                        law.degree(),
                        law.degree()
                    )));
                }
                law
            }
            None => FormalGroupLaw::from_selector(&common.fgl, n)?,
        };
        let mut pairs = Vec::new();
        for item in &common.specialize {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Failure::usage(format!("--specialize expects name=value, got `{item}`")))?;
            let value: i64 = value
                .trim()
                .parse()
                .map_err(|_| Failure::usage(format!("--specialize value `{value}` is not an integer")))?;
            pairs.push((name.trim().to_string(), value));
        }
        let names: Vec<&str> = pairs.iter().map(|(n, _)| n.as_str()).collect();
        let target = raw_law.spec().residual(&names);
        let assignment: BTreeMap<String, CoeffElem> = pairs
            .iter()
            .map(|(name, v)| (name.clone(), CoeffElem::from_int(&target, *v)))
            .collect();
        let law = if assignment.is_empty() {
            raw_law.clone()
        } else {
            raw_law.specialize(&target, &assignment)?
        };
        Ok(Session { n, raw_law, law, assignment })
    }

    pub fn spec(&self) -> &Arc<ParamSpec> {
        self.law.spec()
    }

    /// An element written over the ring of the selected law, specialized.
    pub fn element(&self, fan: &Arc<Fan>, arg: &str) -> Outcome<SRSeries> {
        let value = read_json_arg(arg).map_err(Failure::input)?;
        self.element_from_json(fan, &value)
    }

    pub fn element_from_json(&self, fan: &Arc<Fan>, value: &Value) -> Outcome<SRSeries> {
        let raw = SRSeries::from_json(fan, self.raw_law.spec(), self.n, value)?;
        Ok(self.specialize(&raw)?)
    }

    pub fn specialize(&self, f: &SRSeries) -> torfan::Result<SRSeries> {
        f.specialize(self.spec(), &self.assignment)
    }

    /// Integral elements moved into the ring of the law.
    pub fn embed(&self, f: &SRSeries) -> torfan::Result<SRSeries> {
        f.specialize(self.spec(), &BTreeMap::new())
    }

    pub fn specialization_text(&self) -> String {
        self.assignment
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn specialization_json(&self) -> Value {
        let map: serde_json::Map<String, Value> =
            self.assignment.iter().map(|(k, v)| (k.clone(), json!(v.to_string()))).collect();
        Value::Object(map)
    }
}

/// Rays given as indices or labels, comma-separated.
pub fn parse_rays(fan: &Fan, text: &str) -> Outcome<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            if let Ok(i) = t.parse::<usize>() {
                if i < fan.num_rays() {
                    return Ok(i);
                }
                return Err(Failure::usage(format!("ray index {i} out of range (fan has {} rays)", fan.num_rays())));
            }
            fan.ray_index(t).ok_or_else(|| Failure::usage(format!("unknown ray `{t}`")))
        })
        .collect()
}

pub fn parse_cone(fan: &Fan, text: &str) -> Outcome<Cone> {
    let rays = parse_rays(fan, text)?;
    if rays.is_empty() {
        return Err(Failure::usage("empty cone"));
    }
    let cone = Cone::new(rays);
    if !fan.is_face(cone.rays()) {
        return Err(Failure::usage(format!("{} is not a cone of the fan", fan.cone_label(&cone))));
    }
    Ok(cone)
}

pub fn parse_point(text: &str) -> Outcome<Vec<i64>> {
    text.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| Failure::usage(format!("bad coordinate `{t}`"))))
        .collect()
}
