mod args;
mod commands;
mod session;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};
use torfan::fan::Validation;

use args::{Cli, Command, Format};
use commands::Report;
use session::{load_fan, Failure, Outcome, Session, CHECK_FAILED, USAGE};

struct Meta {
    command: &'static str,
    fan: Option<String>,
    fgl: String,
    n: u32,
    specialize: Value,
}

impl Meta {
    fn text(&self) -> String {
        let mut out = format!("# torfan {}\n", self.command);
        if let Some(f) = &self.fan {
            out.push_str(&format!("# fan: {f}\n"));
        }
        out.push_str(&format!("# fgl: {}\n# N: {}\n", self.fgl, self.n));
        if let Value::Object(m) = &self.specialize {
            if !m.is_empty() {
                let parts: Vec<String> = m.iter().map(|(k, v)| format!("{k}={}", v.as_str().unwrap_or(""))).collect();
                out.push_str(&format!("# specialize: {}\n", parts.join(",")));
            }
        }
        out
    }

    fn json(&self) -> Value {
        json!({
            "command": self.command,
            "fan": self.fan,
            "fgl": self.fgl,
            "N": self.n,
            "specialize": self.specialize,
        })
    }
}

fn dispatch(cmd: &Command, session: &Session) -> Outcome<Report> {
    let common = cmd.common();
    let mode = if common.trusted { Validation::Trusted } else { Validation::Strict };
    let fan = match cmd.fan_source() {
        // `validate` reports the issues itself
        Some(src) if matches!(cmd, Command::Validate { .. }) => Some(load_fan(src, Validation::Trusted)?),
        Some(src) => Some(load_fan(src, mode)?),
        None => None,
    };
    let fan = || fan.clone().expect("command has a fan");
    match cmd {
        Command::Validate { .. } => commands::validate(&fan(), common.trusted),
        Command::Model { characters, .. } => commands::model(&fan(), session, *characters),
        Command::Ordinary { tau, element, .. } => {
            commands::ordinary(&fan(), session, tau.as_deref(), element.as_deref())
        }
        Command::Pic { .. } => commands::pic(&fan()),
        Command::GlueCheck { tuple, sampling, .. } => {
            commands::glue_check(&fan(), session, tuple.as_deref(), sampling.samples, sampling.seed)
        }
        Command::Blowup { center, apply, element, degree, method, sampling, .. } => commands::blowup(
            &fan(),
            session,
            center,
            *apply,
            element.as_deref(),
            *degree,
            *method,
            sampling.samples,
            sampling.seed,
        ),
        Command::Specialize { element, .. } => commands::specialize(&fan(), session, element),
        Command::Piecewise { element, courant, mode, point, .. } => commands::piecewise(
            &fan(),
            session,
            element.as_deref(),
            courant.as_deref(),
            *mode,
            point.as_deref(),
        ),
        Command::Selftest { catalog, sampling, .. } => {
            commands::selftest(session, catalog, sampling.samples, sampling.seed)
        }
    }
}

fn emit(format: Format, meta: &Meta, result: Result<Report, Failure>) -> ExitCode {
    let mut stdout = std::io::stdout().lock();
    let code = match (&result, format) {
        (Ok(r), Format::Text) => {
            let _ = write!(stdout, "{}{}", meta.text(), r.text);
            if let Some(msg) = &r.failed {
                eprintln!("torfan: check failed: {msg}");
            }
            r.failed.as_ref().map_or(0, |_| CHECK_FAILED)
        }
        (Ok(r), Format::Json) => {
            let status = if r.failed.is_some() { "check-failed" } else { "ok" };
            let doc = json!({"meta": meta.json(), "status": status, "result": r.json, "failure": r.failed});
            let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&doc).expect("json"));
            r.failed.as_ref().map_or(0, |_| CHECK_FAILED)
        }
        (Err(f), Format::Text) => {
            let _ = stdout.flush();
            eprintln!("torfan: {} error: {}", f.kind, f.message);
            f.code
        }
        (Err(f), Format::Json) => {
            let doc = json!({
                "meta": meta.json(),
                "status": "error",
                "error": {"kind": f.kind, "code": f.code, "message": f.message},
            });
            let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&doc).expect("json"));
            f.code
        }
    };
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return ExitCode::from(if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { USAGE } else { 0 });
            }
            let wants_json = argv.windows(2).any(|w| w[0] == "--format" && w[1] == "json")
                || argv.iter().any(|a| a == "--format=json");
            if wants_json {
                let doc = json!({
                    "status": "error",
                    "error": {"kind": "usage", "code": USAGE, "message": e.to_string().trim_end()},
                });
                println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
            } else {
                let _ = e.print();
            }
            return ExitCode::from(USAGE);
        }
    };
    let cmd = &cli.command;
    let common = cmd.common();
    let mut meta = Meta {
        command: cmd.name(),
        fan: cmd.fan_source().map(str::to_string),
        fgl: common.fgl.clone(),
        n: common.truncate,
        specialize: json!({}),
    };
    let result = Session::new(common).and_then(|session| {
        meta.specialize = session.specialization_json();
        dispatch(cmd, &session)
    });
    emit(common.format, &meta, result)
}
