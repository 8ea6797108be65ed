//! Job runner behind the `twistlab` binary.
//!
//! A job is `{"schema": 1, "command": ..., "params": {...}}`. Running it gives
//! an exit code (0 verified or valid, 1 refuted or invalid, 2 input error,
//! 3 inconclusive) and a JSON report whose key order is stable.

mod commands;

use serde_json::{json, Map, Value};
use twistlab_core::schema::{self, SCHEMA_VERSION};
use twistlab_core::Error;

pub use commands::dispatch;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Build,
    Verify,
    ClassifyPlane,
    ClassifyDual,
    RankTable,
    Identities,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Build,
        Command::Verify,
        Command::ClassifyPlane,
        Command::ClassifyDual,
        Command::RankTable,
        Command::Identities,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Build => "build",
            Command::Verify => "verify",
            Command::ClassifyPlane => "classify-plane",
            Command::ClassifyDual => "classify-dual",
            Command::RankTable => "rank-table",
            Command::Identities => "identities",
        }
    }

    pub fn parse(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Debug)]
pub struct JobSpec {
    pub command: Command,
    pub params: Value,
    pub output: OutputFormat,
}

/// Command-line values that take precedence over the job's params.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub degree: Option<usize>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub seed: Option<u64>,
    pub series: bool,
}

impl Overrides {
    /// Writes the overrides into `params` under the names the commands read.
    pub fn apply(&self, params: &mut Value) {
        let Some(obj) = params.as_object_mut() else {
            return;
        };
        if let Some(n) = self.degree {
            obj.insert("N".into(), json!(n));
        }
        if let Some(n) = self.nx {
            obj.insert("nx".into(), json!(n));
        }
        if let Some(n) = self.ny {
            obj.insert("ny".into(), json!(n));
        }
        if let Some(s) = self.seed {
            obj.insert("seed".into(), json!(s));
        }
        if self.series {
            obj.insert("series".into(), json!(true));
        }
    }
}

/// Reads a job. `expected` is the subcommand given on the command line; a
/// file holding bare params is accepted when it is set.
pub fn parse_job(v: &Value, expected: Option<Command>) -> Result<JobSpec, Error> {
    let obj = v
        .as_object()
        .ok_or_else(|| schema::schema_error("$", "expected a JSON object"))?;
    if let Some(s) = obj.get("schema") {
        if s.as_u64() != Some(SCHEMA_VERSION) {
            return Err(schema::schema_error(
                "$.schema",
                format!("unsupported schema version {s}, expected {SCHEMA_VERSION}"),
            ));
        }
    }
    let command = match (obj.get("command"), expected) {
        (Some(c), _) => {
            let name = schema::as_str(c, "$.command")?;
            let cmd = Command::parse(name).ok_or_else(|| {
                schema::schema_error("$.command", format!("unknown command {name:?}"))
            })?;
            if let Some(e) = expected {
                if e != cmd {
                    return Err(schema::schema_error(
                        "$.command",
                        format!("job is {name:?} but was run as {:?}", e.name()),
                    ));
                }
            }
            cmd
        }
        (None, Some(e)) => {
            return Ok(JobSpec {
                command: e,
                params: v.clone(),
                output: OutputFormat::Json,
            })
        }
        (None, None) => return Err(schema::schema_error("$.command", "missing field")),
    };
    let params = match obj.get("params") {
        None | Some(Value::Null) => Value::Object(Map::new()),
        Some(p @ Value::Object(_)) => p.clone(),
        Some(_) => return Err(schema::schema_error("$.params", "expected an object")),
    };
    let output = match obj.get("output").map(|o| o.as_str()) {
        None => OutputFormat::Json,
        Some(Some("json")) => OutputFormat::Json,
        Some(Some("text")) => OutputFormat::Text,
        Some(_) => {
            return Err(schema::schema_error("$.output", "expected \"json\" or \"text\""))
        }
    };
    Ok(JobSpec {
        command,
        params,
        output,
    })
}

/// Result of one job.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub exit: i32,
    pub report: Value,
    /// Human-readable summary lines.
    pub lines: Vec<String>,
}

impl Outcome {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.report).expect("report serializes");
                s.push('\n');
                s
            }
            OutputFormat::Text => {
                let mut s = self.lines.join("\n");
                s.push('\n');
                s
            }
        }
    }
}

/// Exit code for an error escaping a command.
pub fn exit_for_error(e: &Error) -> i32 {
    match e {
        Error::Schema { .. }
        | Error::Parse { .. }
        | Error::NotRepresentable { .. }
        | Error::RingMismatch { .. }
        | Error::InvalidModulus(_)
        | Error::OrderMismatch { .. }
        | Error::ZeroOrder
        | Error::UnsupportedRing(_)
        | Error::Invalid(_) => EXIT_INPUT,
        Error::ExtendFirst { .. }
        | Error::ResourceLimit(_)
        | Error::NotWellFounded { .. }
        | Error::InternalMismatch(_)
        | Error::InfiniteRootSet => EXIT_UNKNOWN,
        _ => EXIT_REFUTED,
    }
}

fn error_outcome(command: Option<Command>, e: &Error) -> Outcome {
    let exit = exit_for_error(e);
    let mut err = json!({ "message": e.to_string() });
    if let Error::Schema { path, .. } = e {
        err["path"] = json!(path);
    }
    let status = match exit {
        EXIT_INPUT => "InputError",
        EXIT_UNKNOWN => "Inconclusive",
        _ => "Rejected",
    };
    Outcome {
        exit,
        report: json!({
            "schema": SCHEMA_VERSION,
            "command": command.map(Command::name),
            "status": status,
            "error": err,
        }),
        lines: vec![format!("{status}: {e}")],
    }
}

/// Runs a parsed job.
pub fn run(job: &JobSpec) -> Outcome {
    match dispatch(job.command, &job.params) {
        Ok(mut o) => {
            let mut report = Map::new();
            report.insert("schema".into(), json!(SCHEMA_VERSION));
            report.insert("command".into(), json!(job.command.name()));
            if let Value::Object(body) = o.report {
                report.extend(body);
            }
            o.report = Value::Object(report);
            o
        }
        Err(e) => error_outcome(Some(job.command), &e),
    }
}

/// Parses and runs a job given as JSON.
pub fn run_value(v: &Value, expected: Option<Command>, overrides: &Overrides) -> (Outcome, OutputFormat) {
    match parse_job(v, expected) {
        Ok(mut job) => {
            overrides.apply(&mut job.params);
            (run(&job), job.output)
        }
        Err(e) => (error_outcome(expected, &e), OutputFormat::Json),
    }
}

/// Parses and runs a job given as text.
pub fn run_str(input: &str, expected: Option<Command>, overrides: &Overrides) -> (Outcome, OutputFormat) {
    match serde_json::from_str::<Value>(input) {
        Ok(v) => run_value(&v, expected, overrides),
        Err(e) => (
            error_outcome(
                expected,
                &schema::schema_error("$", format!("malformed JSON: {e}")),
            ),
            OutputFormat::Json,
        ),
    }
}
