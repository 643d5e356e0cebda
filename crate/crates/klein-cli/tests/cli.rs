use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../klein/data").join(name).to_string_lossy().into_owned()
}

fn klein(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_klein")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn scratch(name: &str, text: &str) -> String {
    let p = std::env::temp_dir().join(format!("klein-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn check_passes_on_every_bundled_sample() {
    for name in ["ground_field", "group_algebra_z2", "matrix_algebra", "dual_numbers_plus", "dual_numbers_minus", "two_object_matrix", "dg_contractible_pair"] {
        let o = klein(&["check", &data(&format!("{name}.json"))]);
        assert_eq!(code(&o), 0, "{name}: {}", stdout(&o));
        assert!(stdout(&o).ends_with("PASS\n"));
    }
}

#[test]
fn check_fails_on_perturbed_samples_with_a_witness() {
    let o = klein(&["check", &data("matrix_algebra_perturbed.json")]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("associativity on ("), "{}", stdout(&o));
    for name in ["ground_field", "group_algebra_z2", "dual_numbers_plus", "dual_numbers_minus", "two_object_matrix", "dg_contractible_pair"] {
        let o = klein(&["check", &data(&format!("{name}_perturbed.json"))]);
        assert_eq!(code(&o), 1, "{name}");
        assert!(stdout(&o).contains(" vs "), "{name}: {}", stdout(&o));
    }
}

#[test]
fn check_rows_are_tab_separated() {
    let o = klein(&["check", &data("matrix_algebra_perturbed.json"), "--format", "rows"]);
    let out = stdout(&o);
    assert!(out.starts_with("report\tstatus\tchecked\tfailures\n"));
    assert!(out.lines().any(|l| l.starts_with("dg axioms\tassociativity\t")));
}

#[test]
fn check_accepts_a_higher_nmax() {
    let o = klein(&["check", &data("dg_contractible_pair.json"), "--nmax", "4"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn hh_of_the_matrix_algebra() {
    let o = klein(&["hh", &data("matrix_algebra.json"), "--trunc", "4", "--variant", "ordinary", "--format", "rows"]);
    assert_eq!(code(&o), 0);
    let homology: Vec<(String, String)> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (f[1].to_string(), f[4].to_string())
        })
        .collect();
    assert_eq!(&homology[..3], &[("0".into(), "1".into()), ("1".into(), "0".into()), ("2".into(), "0".into())]);
}

#[test]
fn hh_all_prints_a_side_by_side_table() {
    let o = klein(&["hh", &data("group_algebra_z2.json"), "--trunc", "3"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("side by side"));
    assert!(out.contains("ordinary") && out.contains("involutive") && out.contains("normalized"));
}

#[test]
fn hh_rejects_zero_truncation() {
    assert_eq!(code(&klein(&["hh", &data("group_algebra_z2.json"), "--trunc", "0"])), 2);
}

#[test]
fn malformed_files_exit_two() {
    let bad = scratch("bad.json", "{\"format_version\": 1, \"kind\": ");
    let o = klein(&["check", &bad]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
    assert_eq!(code(&klein(&["check", "/nonexistent/file.json"])), 2);
    assert_eq!(code(&klein(&["graph", "type", &data("matrix_algebra.json")])), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&klein(&["frobnicate"])), 2);
    assert_eq!(code(&klein(&["hh"])), 2);
    assert_eq!(code(&klein(&["--help"])), 0);
}

#[test]
fn graph_commands() {
    let o = klein(&["graph", "type", &data("mobius_loop.json")]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "(0,1,1)\n"));
    let o = klein(&["graph", "moduli", "0", "0", "2", "0"]);
    assert_eq!(stdout(&o), "empty\n");
    let o = klein(&["graph", "moduli", "0", "1", "1", "1"]);
    assert_eq!(stdout(&o), "nonempty\n");
    let o = klein(&["graph", "iso", &data("mobius_loop.json"), &data("mobius_loop.json")]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "isomorphic\n"));
    let o = klein(&["graph", "iso", &data("mobius_loop.json"), &data("annulus_loop.json")]);
    assert_eq!((code(&o), stdout(&o).as_str()), (1, "not isomorphic\n"));
}

#[test]
fn graph_reduce_output_chains_into_iso() {
    let o = klein(&["graph", "reduce", &data("theta_subdivided.json")]);
    assert_eq!(code(&o), 0);
    let reduced = scratch("reduced.json", &stdout(&o));
    assert_eq!(code(&klein(&["graph", "iso", &reduced, &data("theta.json")])), 0);
    let o = klein(&["graph", "contract", &data("theta_subdivided.json"), "2"]);
    assert_eq!(code(&o), 0);
    let contracted = scratch("contracted.json", &stdout(&o));
    assert_eq!(code(&klein(&["graph", "iso", &contracted, &data("theta.json")])), 0);
}

#[test]
fn surf_normalize_and_diff() {
    let o = klein(&["surf", "normalize", &data("twist_twice.json")]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "Identity{(0,1)}\n"));
    let o = klein(&["surf", "normalize", &data("snake.json")]);
    assert_eq!(stdout(&o), "Identity{(0,0)}\n");
    let o = klein(&["surf", "diff", &data("twist_twice.json")]);
    assert_eq!(stdout(&o), "0\n");
}

#[test]
fn surf_evaluate_compares_words() {
    for seed in ["0", "1", "7"] {
        let o = klein(&["surf", "evaluate", &data("snake.json"), &data("strip.json"), "--seed", seed]);
        assert_eq!(code(&o), 0, "{}", stdout(&o));
        assert!(stdout(&o).contains("equal matrices"));
    }
    let o = klein(&["surf", "evaluate", &data("twist_twice.json"), "--category", &data("two_object_matrix.json")]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&klein(&["surf", "evaluate", &data("twist_twice.json")])), 2);
}

#[test]
fn closed_states_match_hochschild() {
    let o = klein(&["surf", "closed-vs-hh", &data("group_algebra_z2.json"), "--trunc", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("EQUAL (dims and differentials)"));
    assert_eq!(code(&klein(&["surf", "closed-vs-hh", &data("group_algebra_z2.json"), "--trunc", "0"])), 2);
}
