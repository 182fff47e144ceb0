//! Every documented schema matches the header a command writes, and every
//! field parses back as its documented type.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use asz::{ExactValue, Fq, PolyFq};
use asz_cli::config::COMMAND_NAMES;
use asz_cli::output::Table;

fn docs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas")
}

struct Schema {
    columns: Vec<String>,
    types: Vec<String>,
}

fn read_schema(name: &str) -> Schema {
    let text = fs::read_to_string(docs_dir().join(format!("{name}.md"))).unwrap();
    let block = text.split("```csv\n").nth(1).expect("csv block").split("```").next().unwrap();
    let columns: Vec<String> = block.trim().split(',').map(String::from).collect();
    let types: Vec<String> = text
        .lines()
        .filter(|l| l.starts_with("| `"))
        .map(|l| l.split('|').nth(2).unwrap().trim().to_string())
        .collect();
    assert_eq!(columns.len(), types.len(), "{name}: table rows vs header");
    Schema { columns, types }
}

fn run(dir: &Path, args: &[&str]) -> (Vec<String>, Vec<Vec<String>>) {
    let status =
        Command::new(env!("CARGO_BIN_EXE_asz")).args(args).args(["--out", dir.to_str().unwrap()]).output().unwrap();
    assert!(status.status.success(), "{args:?}: {}", String::from_utf8_lossy(&status.stderr));
    Table::from_csv(&fs::read(dir.join(format!("{}.csv", args[0]))).unwrap()).unwrap()
}

fn check_field(kind: &str, value: &str, p: u32, q: u64) {
    if value.is_empty() {
        return;
    }
    match kind {
        "exact" => {
            let v = ExactValue::parse_field(value, p, q).unwrap();
            assert_eq!(v.to_field(), value);
        }
        "float" => {
            let x: f64 = value.parse().unwrap();
            assert_eq!(asz_cli::output::float(x), value);
        }
        "integer" => {
            value.parse::<i64>().unwrap();
        }
        "bool" => assert!(value == "true" || value == "false", "{value}"),
        "polynomial" => {
            let fq = Fq::new(p, (q as f64).log(p as f64).round() as u32).unwrap();
            assert_eq!(PolyFq::parse(value, &fq).unwrap().to_coeff_string(), value);
        }
        "cyclotomic" => assert!(value.starts_with('[') && value.ends_with(']')),
        "cyclotomic list" => assert!(value.split(';').all(|c| c.starts_with('[') && c.ends_with(']'))),
        "string" => {}
        "empty" => panic!("expected an empty field, got {value:?}"),
        other => panic!("undocumented type {other}"),
    }
}

#[test]
fn schemas_round_trip() {
    let runs: [(&[&str], u32, u64); 13] = [
        (&["avg-trace", "--p", "3", "--d", "4", "--r", "1..5"], 3, 3),
        (&["pair-trace", "--p", "3", "--d", "5", "--r", "1..2", "--s", "1..2"], 3, 3),
        (&["zeros", "--p", "3", "--n", "2", "--d", "4"], 3, 9),
        (&["zeros", "--p", "3", "--f", "0,1,0,0,1"], 3, 3),
        (&["window-stat", "--p", "3", "--d", "5", "--window", "fejer:0.5"], 3, 3),
        (&["two-level", "--p", "3", "--d", "5", "--window", "fejer:0.25,0.25"], 3, 3),
        (&["rmt-baseline", "--size", "4", "--r", "1..3", "--s", "1", "--sign", "both", "--samples", "200"], 0, 0),
        (&["rmt-baseline", "--size", "4", "--window", "fejer:0.25,0.25", "--samples", "200"], 0, 0),
        (&["dirichlet-verify", "--p", "3", "--d", "4"], 3, 3),
        (&["odd-family", "--p", "3", "--d", "7", "--r", "1..3"], 3, 3),
        (&["decompose", "--p", "3", "--h", "1,0,1", "--D", "10"], 3, 3),
        (&["conjecture-probe", "--p", "3", "--d", "12", "--r", "2"], 3, 3),
        (&["point-dist", "--p", "2", "--d", "3", "--r", "2"], 2, 2),
    ];
    let mut seen = std::collections::BTreeSet::new();
    for (args, p, q) in runs {
        let dir = tempfile::tempdir().unwrap();
        let schema = read_schema(args[0]);
        let (headers, rows) = run(dir.path(), args);
        assert_eq!(headers, schema.columns, "{}", args[0]);
        for row in &rows {
            for (value, kind) in row.iter().zip(&schema.types) {
                check_field(kind, value, p, q);
            }
        }
        seen.insert(args[0]);
    }
    assert_eq!(seen.len(), COMMAND_NAMES.len());
}

#[test]
fn decompose_failure_row_parses() {
    let dir = tempfile::tempdir().unwrap();
    let schema = read_schema("decompose");
    let (headers, rows) = run(dir.path(), &["decompose", "--p", "3", "--h", "1,1", "--D", "4"]);
    assert_eq!(headers, schema.columns);
    assert_eq!(rows[0][3], "failure");
    for (value, kind) in rows[0].iter().zip(&schema.types) {
        check_field(kind, value, 3, 3);
    }
}
