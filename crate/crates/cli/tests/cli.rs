use std::process::{Command, Output};

fn ehp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ehp")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn steenrod_basis_golden() {
    let o = ehp(&["steenrod-basis", "--degree", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "Sq(3)\nSq(2,1)\n");
}

#[test]
fn ehp_e1_bottom_row_golden() {
    let o = ehp(&["ehp-e1", "--d", "4", "--r", "4", "--row", "0", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "s,t,group,d1\n1,0,Z,0\n2,0,Z,x2\n3,0,Z,0\n4,0,Z,x2\n");
}

#[test]
fn ehp_e2_bottom_row() {
    let o = ehp(&["ehp-e2", "--d", "8", "--r", "6", "--row", "0", "--format", "csv"]);
    assert_eq!(stdout(&o), "s,t,group\n3,0,Z/2\n4,0,0\n5,0,Z/2\n6,0,0\n7,0,Z/2\n8,0,0\n");
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["ext", "--kind", "trivial", "--max-s", "4", "--max-t", "10", "--format", "json"][..],
        &["module-build", "--kind", "wh", "--d", "2", "--gen-lo", "-4", "--coeff-max", "4"][..],
        &["ehp-e2", "--d", "6", "--r", "5", "--format", "json"][..],
    ] {
        assert_eq!(ehp(args).stdout, ehp(args).stdout, "{args:?}");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(ehp(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(ehp(&["steenrod-basis"]).status.code(), Some(2));
    assert_eq!(ehp(&["steenrod-basis", "--degree", "x"]).status.code(), Some(2));
    assert_eq!(ehp(&["pairing", "--check", "1"]).status.code(), Some(2));
    assert_eq!(ehp(&["ehp-e1", "--d", "4", "--r", "2", "--max-stem", "9"]).status.code(), Some(2));
    assert_eq!(ehp(&["module-verify"]).status.code(), Some(2));
}

#[test]
fn module_files_round_trip_and_corruption_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mto.json");
    let p = path.to_str().unwrap();
    let o = ehp(&["module-build", "--kind", "mto", "--max-deg", "6", "--out", p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v = ehp(&["module-verify", "--module", p]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));

    // Drop one Sq^1 entry out of degree 2: Sq^1 Sq^2 = Sq^3 breaks on u.
    let mut j: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let action = j["action"].as_array_mut().unwrap();
    let pos = action.iter().position(|e| e[0] == 1 && e[1] == 2).unwrap();
    action.remove(pos);
    std::fs::write(&path, j.to_string()).unwrap();
    assert_eq!(ehp(&["module-verify", "--module", p]).status.code(), Some(1));
}

#[test]
fn pairing_value() {
    assert_eq!(stdout(&ehp(&["pairing", "--w", "w[1]", "--v", "v[1]"])), "1\n");
    assert_eq!(stdout(&ehp(&["pairing", "--w", "w[2]", "--v", "v[2]"])), "0\n");
}

#[test]
fn checks_report_their_verdict_in_the_exit_code() {
    let o = ehp(&["ehp-e2", "--check", "12"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("[PASS] 12 "));
    let o = ehp(&["steenrod-basis", "--check", "1"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn help_lists_every_check_once() {
    let help = stdout(&ehp(&["--help"]));
    for sub in [
        "steenrod-basis",
        "module-build",
        "module-verify",
        "indec",
        "freeness",
        "ext",
        "pairing",
        "phi-verify",
        "ehp-e1",
        "ehp-e2",
        "verify-all",
    ] {
        assert!(help.contains(sub), "{sub}");
    }
    for id in 1..=12 {
        let hits = help
            .lines()
            .filter(|l| l.split_whitespace().next() == Some(&id.to_string()) && l.contains("--check"))
            .count();
        assert_eq!(hits, 1, "check {id}");
    }
}
