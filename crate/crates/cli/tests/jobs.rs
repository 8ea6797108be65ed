use serde_json::{json, Value};
use twistlab_cli::{parse_job, run_value, Command, Overrides, OutputFormat};

fn run(job: Value) -> (i32, Value) {
    let (o, _) = run_value(&job, None, &Overrides::default());
    (o.exit, o.report)
}

fn mutated_family() -> Value {
    json!({
        "q": [[2, 2, "1"], [3, 2, "-1"]],
        "N": 6,
        "mutate": [{"j": 3, "n": 2, "value": "X^5"}],
    })
}

#[test]
fn witness_replays_as_focused_job() {
    let (exit, report) = run(json!({"command": "verify", "params": mutated_family()}));
    assert_eq!(exit, 1);
    let witness = report["report"]["witness"].clone();
    assert_eq!(witness["kind"], "split");

    let mut params = mutated_family();
    params["witness"] = witness.clone();
    let (exit, replayed) = run(json!({"command": "verify", "params": params}));
    assert_eq!(exit, 1);
    assert_eq!(replayed["status"], "Refuted");

    let mut params = mutated_family();
    params["focus"] = json!({"j": witness["j"], "u": witness["u"], "v": witness["v"]});
    let (exit, focused) = run(json!({"command": "verify", "params": params}));
    assert_eq!(exit, 1);
    assert_eq!(focused["report"]["witness"]["lhs"], witness["lhs"]);
    assert_eq!(focused["report"]["witness"]["rhs"], witness["rhs"]);

    // The same witness against the unmutated family does not reproduce.
    let (exit, clean) = run(json!({"command": "verify", "params": {
        "q": [[2, 2, "1"], [3, 2, "-1"]], "N": 6, "witness": witness,
    }}));
    assert_eq!(exit, 0);
    assert_eq!(clean["status"], "NotReproduced");
}

#[test]
fn series_witness_replays() {
    let params = json!({
        "series": true, "ring": {"mod": 8}, "a": [[0, 1, 2], [1, 1, 1], [1, 2, 1]],
        "nx": 6, "ny": 6, "mutate": [{"j": 2, "n": 3, "value": "X^5 + X^4"}],
    });
    let (exit, report) = run(json!({"command": "verify", "params": params.clone()}));
    assert_eq!(exit, 1, "{report}");
    let mut again = params;
    again["witness"] = report["report"]["witness"].clone();
    let (exit, replayed) = run(json!({"command": "verify", "params": again}));
    assert_eq!(exit, 1);
    assert_eq!(replayed["status"], "Refuted");
}

#[test]
fn overrides_reach_the_command() {
    let job = json!({"command": "verify", "params": {"q": [[2, 2, "1"]]}});
    let o = Overrides {
        degree: Some(4),
        ..Default::default()
    };
    let (out, _) = run_value(&job, None, &o);
    assert_eq!(out.report["report"]["degree_bound"], 4);

    let series = json!({"a": [[0, 1, 2], [1, 1, 1]], "ring": {"mod": 4}, "nx": 3, "ny": 3});
    let o = Overrides {
        nx: Some(5),
        ny: Some(4),
        series: true,
        ..Default::default()
    };
    let (out, _) = run_value(&series, Some(Command::Verify), &o);
    assert_eq!(out.exit, 0, "{}", out.report);
    assert_eq!(out.report["family"]["nx"], 5);
    assert_eq!(out.report["family"]["ny"], 4);
}

#[test]
fn job_parsing() {
    let j = parse_job(&json!({"schema": 1, "command": "rank-table", "params": {"m_max": 4}, "output": "text"}), None).unwrap();
    assert_eq!(j.command, Command::RankTable);
    assert_eq!(j.output, OutputFormat::Text);
    // Bare params are accepted when the command comes from the command line.
    let j = parse_job(&json!({"m_max": 4}), Some(Command::RankTable)).unwrap();
    assert_eq!(j.params["m_max"], 4);
    for (bad, path) in [
        (json!({"command": "nope"}), "$.command"),
        (json!({"schema": 7, "command": "verify"}), "$.schema"),
        (json!({"command": "verify", "params": [1]}), "$.params"),
        (json!({"command": "verify", "output": "xml"}), "$.output"),
        (json!({"params": {}}), "$.command"),
    ] {
        let (o, _) = run_value(&bad, None, &Overrides::default());
        assert_eq!(o.exit, 2);
        assert_eq!(o.report["error"]["path"], path, "{bad}");
    }
    let (o, _) = run_value(&json!({"command": "build"}), Some(Command::Verify), &Overrides::default());
    assert_eq!(o.exit, 2);
}

#[test]
fn text_output_summarises() {
    let (o, _) = run_value(
        &json!({"command": "rank-table", "params": {"m_max": 6}}),
        None,
        &Overrides::default(),
    );
    assert_eq!(o.render(OutputFormat::Text), "m rank nullity\n2 1 2\n4 2 3\n6 3 4\n");
    assert!(o.render(OutputFormat::Json).contains("\"schema\": 1"));
}

#[test]
fn construction_errors_are_invalid_not_input_errors() {
    let (exit, report) = run(json!({"command": "build", "params": {
        "kind": "almost_null", "q": [[1, 2, "1"]],
    }}));
    assert_eq!(exit, 1);
    assert_eq!(report["status"], "Rejected");
    let (exit, _) = run(json!({"command": "build", "params": {"kind": "warp"}}));
    assert_eq!(exit, 2);
}
