//! End-to-end verb behavior: exit codes, report shape, flag validation, and
//! the file-based partition input path.

use std::io::Write as _;
use std::process::{Command, Output};

use serde_json::Value;

fn pjlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pjlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    assert!(
        !out.stdout.is_empty(),
        "expected a report on stdout; stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process exits normally")
}

#[test]
fn tower_search_at_scale_reports_none_found() {
    let out = pjlab(&[
        "tower",
        "--partition",
        "E:cantor",
        "--kappa",
        "3",
        "--lambda",
        "3",
        "--window",
        "256x16",
    ]);
    assert_eq!(exit_code(&out), 0);
    let r = report(&out);
    assert_eq!(r["result"]["found"], Value::Bool(false));
    assert_eq!(r["result"]["note"], "none found");
    assert_eq!(r["window"], "256x16");
}

#[test]
fn refute_produces_a_witness_with_the_auto_sized_window() {
    let out = pjlab(&["refute", "--mode", "sel", "--f", "const:0", "--k", "1,1"]);
    assert_eq!(exit_code(&out), 0);
    let r = report(&out);
    assert_eq!(r["result"]["outcome"]["kind"], "witness");
    assert_eq!(r["result"]["outcome"]["row"], 1);
    assert_eq!(r["result"]["outcome"]["colorIndex"], 0);
    assert_eq!(r["window"], "1040x2");
}

#[test]
fn refute_honors_a_fixed_window_override() {
    let auto = pjlab(&["refute", "--mode", "sel", "--f", "const:0", "--k", "1,1"]);
    let fixed = pjlab(&[
        "refute", "--mode", "sel", "--f", "const:0", "--k", "1,1", "--window", "1040x2",
    ]);
    assert_eq!(exit_code(&fixed), 0);
    assert_eq!(
        report(&auto)["result"]["outcome"],
        report(&fixed)["result"]["outcome"]
    );

    let too_small = pjlab(&[
        "refute", "--mode", "sel", "--f", "const:0", "--k", "1,1", "--window", "8x2",
    ]);
    assert_eq!(exit_code(&too_small), 2);
    assert!(too_small.stdout.is_empty());
}

#[test]
fn pq_lists_the_size_sequences_as_decimal_strings() {
    let out = pjlab(&["pq", "--k", "1,1"]);
    assert_eq!(exit_code(&out), 0);
    let r = report(&out);
    assert_eq!(r["result"]["p"], serde_json::json!(["1", "2", "9"]));
    assert_eq!(r["result"]["q"], serde_json::json!(["1", "2", "8"]));
    assert!(r["window"].is_null(), "pq reports carry no window");
}

#[test]
fn unknown_verbs_and_flags_are_rejected_with_usage() {
    let bogus = pjlab(&["bogus"]);
    assert_eq!(exit_code(&bogus), 2);
    assert!(String::from_utf8_lossy(&bogus.stderr).contains("Usage"));

    let flag = pjlab(&["pq", "--k", "1,1", "--frobnicate"]);
    assert_eq!(exit_code(&flag), 2);

    let missing = pjlab(&["tower", "--kappa", "2"]);
    assert_eq!(exit_code(&missing), 2);
}

#[test]
fn help_prints_and_exits_zero() {
    let out = pjlab(&["--help"]);
    assert_eq!(exit_code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("tower"));
}

#[test]
fn degenerate_windows_and_points_are_bad_input() {
    let zero = pjlab(&["color", "--partition", "rows", "--window", "0x4"]);
    assert_eq!(exit_code(&zero), 2);

    let outside = pjlab(&[
        "color",
        "--partition",
        "rows",
        "--window",
        "8x8",
        "--point",
        "99,0",
    ]);
    assert_eq!(exit_code(&outside), 2);
    assert!(String::from_utf8_lossy(&outside.stderr).contains("outside"));
}

#[test]
fn criteria_ops_validate_their_required_flags() {
    let no_kind = pjlab(&[
        "criteria",
        "--op",
        "table2",
        "--partition",
        "vertical",
        "--partition-b",
        "rows",
        "--window",
        "8x8",
    ]);
    assert_eq!(exit_code(&no_kind), 2);
    assert!(String::from_utf8_lossy(&no_kind.stderr).contains("--kind"));

    let no_case = pjlab(&[
        "criteria",
        "--op",
        "sufficient",
        "--partition",
        "E:cantor",
        "--window",
        "8x8",
    ]);
    assert_eq!(exit_code(&no_case), 2);
    assert!(String::from_utf8_lossy(&no_case.stderr).contains("--case"));

    let shallow_proxy = pjlab(&[
        "criteria",
        "--op",
        "veze",
        "--partition",
        "E:cantor",
        "--kappa-min",
        "2",
        "--window",
        "8x8",
    ]);
    assert_eq!(exit_code(&shallow_proxy), 2);
}

#[test]
fn ed_seq_reports_the_exact_stall_level() {
    // Rows partition at 8x8: levels 1..3 consume 1+2+3 = 6 fresh rows, so
    // level 4 finds only two left and the construction stalls there.
    let out = pjlab(&[
        "ed-seq",
        "--partition",
        "rows",
        "--count",
        "8",
        "--kappa",
        "1",
        "--lambda",
        "k",
        "--window",
        "8x8",
    ]);
    assert_eq!(exit_code(&out), 0);
    let r = report(&out);
    assert_eq!(r["result"]["found"], Value::Bool(false));
    assert_eq!(r["result"]["stallLevel"], 4);
}

#[test]
fn table_partitions_load_from_files() {
    use pjlab::partition::{ColorId, PartitionSpec};

    let cells: Vec<(u64, u64, ColorId)> = (0..4)
        .flat_map(|x| {
            (0..4).map(move |y| {
                let c = if x == 0 {
                    ColorId::Block { n: y + 1 }
                } else {
                    ColorId::Block { n: 0 }
                };
                (x, y, c)
            })
        })
        .collect();
    let spec = PartitionSpec::Table { cells };
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    file.write_all(serde_json::to_string(&spec).unwrap().as_bytes())
        .unwrap();
    let path = format!("@{}", file.path().display());

    let out = pjlab(&[
        "color",
        "--partition",
        &path,
        "--window",
        "4x4",
        "--point",
        "0,2",
    ]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(report(&out)["result"]["color"], "blk:3");

    let missing = pjlab(&[
        "color",
        "--partition",
        "@/nonexistent/partition.json",
        "--window",
        "4x4",
    ]);
    assert_eq!(exit_code(&missing), 2);
}

#[test]
fn adgen_accepts_inline_family_and_certificate_json() {
    let out = pjlab(&[
        "criteria",
        "--op",
        "adgen",
        "--kind",
        "sel",
        "--partition",
        "vertical",
        "--window",
        "4x4",
        "--family",
        "[[[0,0],[0,1]],[[2,0]]]",
        "--cert",
        "{\"width\":2}",
    ]);
    assert_eq!(exit_code(&out), 0);
    let r = report(&out);
    assert_eq!(r["result"]["verdict"], "consistentAtScale");

    let narrow = pjlab(&[
        "criteria",
        "--op",
        "adgen",
        "--kind",
        "sel",
        "--partition",
        "vertical",
        "--window",
        "4x4",
        "--family",
        "[[[0,0],[0,1]]]",
        "--cert",
        "{\"width\":0}",
    ]);
    assert_eq!(exit_code(&narrow), 0);
    assert_eq!(report(&narrow)["result"]["verdict"], "refuted");
}

#[test]
fn table1_text_format_draws_the_grid() {
    let out = pjlab(&["table1", "--window", "32x16", "--format", "text"]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("P(finGen)"));
    assert!(text.contains('✓') && text.contains('✗'));
    assert!(!text.contains('!'), "no direction mismatches:\n{text}");
    let grid_lines = text
        .lines()
        .filter(|l| l.starts_with("finGen") || l.starts_with("sel") || l.starts_with("ed"))
        .count();
    assert_eq!(grid_lines, 3);
}

#[test]
fn gen_marks_overflowing_elements() {
    let out = pjlab(&["gen", "--d", "dyadic", "--k-max", "64", "--r-max", "1"]);
    assert_eq!(exit_code(&out), 0);
    let r = report(&out);
    assert_eq!(r["result"]["blocks"][0], serde_json::json!([1, 3]));
    assert_eq!(r["result"]["blocks"][64], serde_json::json!([null, null]));
}

#[test]
fn a_colors_only_restriction_changes_the_verdict() {
    let free = pjlab(&[
        "tower", "--partition", "E:cantor", "--kappa", "2", "--lambda", "2", "--window", "32x8",
    ]);
    assert_eq!(exit_code(&free), 0);
    assert_eq!(report(&free)["result"]["found"], Value::Bool(true));

    let restricted = pjlab(&[
        "tower",
        "--partition",
        "E:cantor",
        "--kappa",
        "2",
        "--lambda",
        "2",
        "--window",
        "32x8",
        "--a-colors-only",
    ]);
    assert_eq!(exit_code(&restricted), 0);
    assert_eq!(report(&restricted)["result"]["found"], Value::Bool(false));
}

#[test]
fn verify_claims_sweeps_hold_and_exit_zero() {
    let out = pjlab(&[
        "verify-claims",
        "--claim",
        "floors",
        "--a-max",
        "200",
        "--bc-max",
        "8",
    ]);
    assert_eq!(exit_code(&out), 0);
    let r = report(&out);
    assert_eq!(r["result"]["allHold"], Value::Bool(true));
    assert_eq!(r["result"]["claims"][0]["claim"], "floors");
    assert_eq!(r["result"]["claims"][0]["mismatchCount"], 0);
}
