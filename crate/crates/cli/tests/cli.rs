//! End-to-end runs of the `mdl` binary.

use std::fs;
use std::process::Command;

use serde_json::Value;

fn experiment(config: &str) -> (Value, String) {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("config.json");
    fs::write(&path, config).unwrap();
    let out = tmp.path().join("out");
    let status = Command::new(env!("CARGO_BIN_EXE_mdl"))
        .arg("experiment")
        .arg(&path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let summary = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    (summary, fs::read_to_string(out.join("counts.csv")).unwrap())
}

#[test]
fn grid_sixteen_ratios_bracket_one() {
    let (summary, csv) = experiment(
        r#"{"system": {"kind": "grid", "m": 16},
            "quantity": {"family": "count", "kind": "open_ball_cover"},
            "eps": [0.25, 0.125, 0.0625], "n": [1, 2, 3]}"#,
    );
    assert_eq!(summary["all_exact"], true);
    let dim = &summary["dimension"];
    let lower = dim["ratio_lower"].as_f64().unwrap();
    let upper = dim["ratio_upper"].as_f64().unwrap();
    assert!((0.75..=1.3).contains(&lower) && (0.75..=1.3).contains(&upper), "{lower} {upper}");
    // with W = 0 the counts factor over coordinates: 16 singletons at the finest scale
    assert!(csv.lines().any(|l| l == "0.0625,3,N,4096.0,true,branch_bound"));
    assert!(csv.starts_with("eps,n,quantity,value,exact,method\n"));
}

#[test]
fn one_point_alphabet_gives_flat_counts() {
    let (summary, csv) = experiment(
        r#"{"system": {"kind": "explicit", "values": [0.3]}, "half_width": 2,
            "quantity": {"family": "count", "kind": "separated"},
            "eps": [0.5, 0.25, 0.125]}"#,
    );
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(3) == Some("1.0")));
    let ratios = summary["dimension"]["ratios"].as_array().unwrap();
    assert!(ratios.iter().all(|r| r.as_f64() == Some(0.0)));
}

#[test]
fn help_lists_the_three_commands() {
    let out = Command::new(env!("CARGO_BIN_EXE_mdl")).arg("--help").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for cmd in ["verify", "experiment", "replay"] {
        assert!(text.contains(cmd));
    }
}
