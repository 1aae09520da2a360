//! End-to-end CLI tests: exit codes, documented outputs, determinism, and
//! validation of the JSON output against the shipped schema.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_steinberg"))
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .unwrap_or_else(|e| panic!("failed to launch {:?}: {}", bin(), e))
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Drop the volatile elapsed_ms line; the rest must be byte-identical.
fn strip_elapsed(json_text: &str) -> String {
    json_text
        .lines()
        .filter(|line| !line.trim_start().starts_with("\"elapsed_ms\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn table_gl2_q3_ell2_reports_documented_dimensions() {
    let text = stdout_of(&["table", "--group", "gl", "--n", "2", "--q", "3", "--ell", "2", "--out", "json"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["dim_St"], 3);
    assert_eq!(v["index_GB"], 4);
    assert_eq!(v["m"], 2);
    for s in v["sigmas"].as_array().unwrap() {
        assert_eq!(s["dim_S"], 3);
        assert_eq!(s["dim_D"], 2);
    }
}

#[test]
fn table_gl3_q2_ell5_full_rank_case() {
    let text = stdout_of(&["table", "--group", "gl", "--n", "3", "--q", "2", "--ell", "5", "--out", "json"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["dim_St"], 8);
    assert_eq!(v["sigmas"][0]["dim_D"], 8, "5 does not divide [G:B] = 21");
}

#[test]
fn ell_equal_p_is_invalid_input() {
    let out = run(&["table", "--group", "gl", "--n", "2", "--q", "3", "--ell", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ell"));
}

#[test]
fn invalid_inputs_exit_2() {
    for args in [
        vec!["table", "--q", "6", "--ell", "5"],                      // not a prime power
        vec!["table", "--q", "4", "--ell", "6"],                      // ell not prime
        vec!["table", "--group", "sl2", "--n", "3", "--q", "5", "--ell", "2"], // sl2 with n != 2
        vec!["table", "--q", "1021", "--ell", "2"],                   // beyond desk scale
        vec!["table", "--q", "3", "--ell", "2", "--ext", "3"],        // 2^3 != 1 mod 3
        vec!["table", "--q", "3", "--ell", "2", "--sigma", "9"],      // sigma out of range
        vec!["table", "--q", "3"],                                    // missing --ell
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "expected exit 2 for {:?}", args);
    }
}

#[test]
fn verify_prints_one_line_per_check() {
    let text = stdout_of(&["verify", "--group", "gl", "--n", "2", "--q", "2", "--ell", "3"]);
    let lines: Vec<&str> = text.lines().collect();
    let pass_lines = lines.iter().filter(|l| l.starts_with("PASS ")).count();
    assert!(pass_lines >= 20, "expected many named checks, got {}", pass_lines);
    assert!(!lines.iter().any(|l| l.starts_with("FAIL ")));
    assert!(lines.last().unwrap().ends_with("checks passed"));
    assert!(text.contains("bruhat_roundtrip"));
    assert!(text.contains("gram_matrix_formula"));
    assert!(text.contains("m_independence"));
}

#[test]
fn verify_sl2_reports_duality_per_orbit() {
    let text = stdout_of(&["verify", "--group", "sl2", "--q", "5", "--ell", "3", "--out", "json"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["group"], "sl2");
    assert_eq!(v["checks"]["duality_dims"], true);
    let orbits: Vec<u64> = v["sigmas"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["orbit"].as_u64().unwrap())
        .collect();
    assert!(orbits.contains(&0) && orbits.contains(&1), "both torus orbits reported");
}

#[test]
fn gram_csv_matches_documented_example() {
    let text = stdout_of(&["gram", "--group", "gl", "--n", "2", "--q", "3", "--ell", "2", "--out", "csv"]);
    let expected = "u,0,1,2\n0,2,1,1\n1,1,2,1\n2,1,1,2\n# rank mod 2 = 2\n";
    assert_eq!(text, expected);

    let text = stdout_of(&["gram", "--group", "gl", "--n", "2", "--q", "2", "--ell", "3", "--out", "csv"]);
    let expected = "u,0,1\n0,2,1\n1,1,2\n# rank mod 3 = 1\n";
    assert_eq!(text, expected);
}

#[test]
fn gram_diagonal_is_weyl_order() {
    let text = stdout_of(&["gram", "--group", "gl", "--n", "3", "--q", "2", "--ell", "3", "--out", "json"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    let entries = v["entries"].as_array().unwrap();
    for (i, row) in entries.iter().enumerate() {
        assert_eq!(row[i], 6, "diagonal entries equal |W| = 3!");
    }
}

#[test]
fn identical_config_gives_byte_identical_output() {
    let args = ["table", "--group", "gl", "--n", "2", "--q", "4", "--ell", "3", "--out", "json"];
    let a = stdout_of(&args);
    let b = stdout_of(&args);
    assert_eq!(strip_elapsed(&a), strip_elapsed(&b));

    // Text and CSV carry no timing data at all and match byte for byte.
    for fmt in ["text", "csv"] {
        let args = ["table", "--group", "gl", "--n", "2", "--q", "4", "--ell", "3", "--out", fmt];
        assert_eq!(stdout_of(&args), stdout_of(&args));
    }
}

#[test]
fn out_path_writes_the_same_bytes() {
    let dir = std::env::temp_dir().join(format!("steinberg_cli_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let stdout_version = stdout_of(&["table", "--q", "3", "--ell", "2", "--out", "json"]);
    let out = run(&[
        "table", "--q", "3", "--ell", "2", "--out", "json",
        "--out-path", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let file_version = std::fs::read_to_string(&path).unwrap();
    assert_eq!(strip_elapsed(&stdout_version), strip_elapsed(&file_version));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn sigma_filter_restricts_reported_characters() {
    let text = stdout_of(&["table", "--q", "5", "--ell", "2", "--sigma", "0,2", "--out", "json"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    let sigmas = v["sigmas"].as_array().unwrap();
    assert_eq!(sigmas.len(), 2);
    assert_eq!(sigmas[0]["params"][0], 1);
    assert_eq!(sigmas[1]["params"][0], 3);
}

#[test]
fn explicit_extension_degree_is_honored() {
    let text = stdout_of(&["table", "--q", "3", "--ell", "2", "--ext", "4", "--out", "json"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["m"], 4);
    // Dimensions agree with the minimal-degree run (m-independence).
    let auto = stdout_of(&["table", "--q", "3", "--ell", "2", "--out", "json"]);
    let va: Value = serde_json::from_str(&auto).unwrap();
    assert_eq!(v["sigmas"], va["sigmas"]);
}

// ---------------------------------------------------------------------------
// Schema validation with a small checker for the draft-07 subset the shipped
// schema uses: type, properties, required, additionalProperties, items,
// enum, minimum.
// ---------------------------------------------------------------------------

fn schema() -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn validate(value: &Value, schema: &Value, path: &str, errors: &mut Vec<String>) {
    if let Some(expected) = schema.get("type").and_then(|t| t.as_str()) {
        let ok = match expected {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "integer" => value.is_u64() || value.is_i64(),
            "string" => value.is_string(),
            "boolean" => value.is_boolean(),
            "number" => value.is_number(),
            other => {
                errors.push(format!("{}: unsupported schema type {}", path, other));
                return;
            }
        };
        if !ok {
            errors.push(format!("{}: expected {}, got {}", path, expected, value));
            return;
        }
    }
    if let Some(allowed) = schema.get("enum").and_then(|e| e.as_array()) {
        if !allowed.contains(value) {
            errors.push(format!("{}: {} not in enum {:?}", path, value, allowed));
        }
    }
    if let Some(min) = schema.get("minimum").and_then(|m| m.as_i64()) {
        if let Some(v) = value.as_i64() {
            if v < min {
                errors.push(format!("{}: {} below minimum {}", path, v, min));
            }
        }
    }
    if let Some(obj) = value.as_object() {
        let props = schema.get("properties").and_then(|p| p.as_object());
        if let Some(required) = schema.get("required").and_then(|r| r.as_array()) {
            for key in required {
                let key = key.as_str().unwrap();
                if !obj.contains_key(key) {
                    errors.push(format!("{}: missing required field {}", path, key));
                }
            }
        }
        for (key, val) in obj {
            let sub = props.and_then(|p| p.get(key));
            match sub {
                Some(s) => validate(val, s, &format!("{}/{}", path, key), errors),
                None => match schema.get("additionalProperties") {
                    Some(Value::Bool(false)) => {
                        errors.push(format!("{}: unexpected field {}", path, key))
                    }
                    Some(s) if s.is_object() => {
                        validate(val, s, &format!("{}/{}", path, key), errors)
                    }
                    _ => {}
                },
            }
        }
    }
    if let (Some(arr), Some(items)) = (value.as_array(), schema.get("items")) {
        for (i, item) in arr.iter().enumerate() {
            validate(item, items, &format!("{}/{}", path, i), errors);
        }
    }
}

#[test]
fn json_output_validates_against_shipped_schema() {
    let schema = schema();
    for args in [
        vec!["table", "--group", "gl", "--n", "2", "--q", "3", "--ell", "2", "--out", "json"],
        vec!["table", "--group", "gl", "--n", "3", "--q", "2", "--ell", "3", "--out", "json"],
        vec!["verify", "--group", "sl2", "--q", "7", "--ell", "2", "--out", "json"],
    ] {
        let text = stdout_of(&args);
        let value: Value = serde_json::from_str(&text).unwrap();
        let mut errors = Vec::new();
        validate(&value, &schema, "$", &mut errors);
        assert!(errors.is_empty(), "{:?}: schema violations: {:#?}", args, errors);
        // Emitted dimensions are consistent.
        let dim_st = value["dim_St"].as_u64().unwrap();
        let index_gb = value["index_GB"].as_u64().unwrap();
        for s in value["sigmas"].as_array().unwrap() {
            let dim_s = s["dim_S"].as_u64().unwrap();
            let dim_d = s["dim_D"].as_u64().unwrap();
            assert!(dim_d <= dim_s && dim_s <= dim_st && dim_st <= index_gb);
        }
    }
}
