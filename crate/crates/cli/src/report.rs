//! Report envelope and output routing.

use std::io::Write;

use serde_json::{json, Value};

use crate::commands::Outcome;
use crate::Global;

pub const SCHEMA: &str = "casorati-report/1";

pub fn envelope(g: &Global, out: &Outcome) -> Value {
    json!({
        "schema": SCHEMA,
        "command": out.command,
        "seed": g.seed,
        "exit_code": out.code,
        "result": out.result,
    })
}

pub fn emit(g: &Global, out: &Outcome) -> std::io::Result<()> {
    let body = if g.json {
        let mut s = serde_json::to_string_pretty(&envelope(g, out))?;
        s.push('\n');
        s
    } else {
        out.text.clone()
    };
    match &g.output {
        Some(path) => std::fs::write(path, body),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()
        }
    }
}
