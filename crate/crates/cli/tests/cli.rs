use assert_cmd::Command;
use ppturbo::ModPoly;

fn ppturbo() -> Command {
    let mut cmd = Command::cargo_bin("ppturbo").unwrap();
    cmd.env_remove("PPTURBO_JOBS");
    cmd
}

fn stdout_of(args: &[&str]) -> String {
    let out = ppturbo()
        .args(args)
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    String::from_utf8(out).unwrap()
}

fn field<'a>(line: &'a str, key: &str) -> &'a str {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(key)?.strip_prefix('='))
        .unwrap_or_else(|| panic!("no {key} in {line:?}"))
}

#[test]
fn npp_lists_four_for_eight() {
    let out = stdout_of(&["npp", "--mod", "8"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("L=8 count=4"));
    let polys: Vec<ModPoly> = lines.map(|l| ModPoly::parse(l, 8).unwrap()).collect();
    assert_eq!(polys.len(), 4);
    for p in &polys {
        assert_eq!(
            p.to_string(),
            ModPoly::parse(&p.to_string(), 8).unwrap().to_string()
        );
        assert!((0..8).all(|x| p.eval(x).unwrap() == 0));
    }
    let json: serde_json::Value =
        serde_json::from_str(&stdout_of(&["npp", "--mod", "12", "--format", "json"])).unwrap();
    assert_eq!(json["count"], 12);
}

#[test]
fn check_reports_negative_verdict_with_success() {
    let out = stdout_of(&["check", "--mod", "8", "--poly", "2x"]);
    assert_eq!(field(&out, "permutation"), "false");
    let out = stdout_of(&["check", "--mod", "40", "--poly", "3x + 8x^2 + 16x^3"]);
    assert_eq!(field(&out, "permutation"), "true");
    assert_eq!(field(&out, "effective_degree"), "3");
    assert_eq!(
        ModPoly::parse(field(&out, "poly"), 40).unwrap(),
        ModPoly::cubic(40, 3, 8, 16).unwrap()
    );
}

#[test]
fn spread_of_reference_polynomial() {
    let out = stdout_of(&["spread", "--mod", "80", "--poly", "11x+20x^2"]);
    assert_eq!(field(&out, "D"), "10");
}

#[test]
fn invalid_input_exits_two() {
    ppturbo()
        .args(["spread", "--mod", "8", "--poly", "2x"])
        .assert()
        .code(2);
    ppturbo()
        .args(["check", "--mod", "8", "--poly", "3x^5"])
        .assert()
        .code(2);
    ppturbo()
        .args(["check", "--mod", "1", "--poly", "x"])
        .assert()
        .code(2);
    ppturbo()
        .args(["npp", "--mod", "8", "--bogus"])
        .assert()
        .code(2);
    ppturbo()
        .args([
            "search",
            "--mod",
            "40",
            "--degree",
            "4",
            "--channel",
            "awgn",
        ])
        .assert()
        .code(2);
    ppturbo()
        .args([
            "search",
            "--mod",
            "41",
            "--degree",
            "2",
            "--channel",
            "awgn",
        ])
        .assert()
        .code(2);
    ppturbo()
        .args(["spectrum", "--mod", "40", "--poly", "13x+10x^2", "--oracle"])
        .assert()
        .code(2);
    ppturbo()
        .args(["reproduce", "--table", "2", "--lengths", "41"])
        .assert()
        .code(2);
    ppturbo()
        .args(["--jobs", "0", "npp", "--mod", "8"])
        .assert()
        .code(2);
    ppturbo()
        .args(["tub", "--mod", "40", "--channel", "awgn", "--snr-db", "5"])
        .assert()
        .code(2);
}

#[test]
fn budget_exceeded_exits_three() {
    ppturbo()
        .args([
            "spectrum",
            "--mod",
            "64",
            "--poly",
            "5x+24x^2+48x^3",
            "--node-budget",
            "100",
        ])
        .assert()
        .code(3);
}

#[test]
fn spectrum_oracle_agrees_and_files_round_trip() {
    let args = [
        "spectrum", "--mod", "16", "--poly", "3x+4x^2", "--terms", "4", "--wumax", "16",
    ];
    let trellis = stdout_of(&args);
    let mut with_oracle = args.to_vec();
    with_oracle.push("--oracle");
    assert_eq!(trellis, stdout_of(&with_oracle));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.json");
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json", "--out", path.to_str().unwrap()]);
    ppturbo().args(&json_args).assert().success();
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("spec.json.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["tool"], "ppturbo");
    assert_eq!(manifest["config"]["poly"], "3x+4x^2");

    let direct = stdout_of(&[
        "tub",
        "--mod",
        "16",
        "--poly",
        "3x+4x^2",
        "--terms",
        "4",
        "--wumax",
        "16",
        "--channel",
        "rayleigh",
        "--snr-db",
        "6",
    ]);
    let from_file = stdout_of(&[
        "tub",
        "--mod",
        "16",
        "--spectrum",
        path.to_str().unwrap(),
        "--channel",
        "rayleigh",
        "--snr-db",
        "6",
    ]);
    assert_eq!(direct, from_file);
}

#[test]
fn tub_prints_both_forms() {
    let out = stdout_of(&[
        "tub",
        "--mod",
        "40",
        "--poly",
        "13x+10x^2",
        "--channel",
        "awgn",
        "--snr-db",
        "5",
    ]);
    assert!(out.contains("rate=10/33"), "{out}");
    assert!(out.contains("TUB_BER=9.3364849e-8 (0.9336485e-7)"), "{out}");
}

#[test]
fn search_row_and_config_file() {
    let out = stdout_of(&[
        "search",
        "--mod",
        "40",
        "--degree",
        "2",
        "--channel",
        "awgn",
    ]);
    assert_eq!(
        out,
        "L,SNR_dB,num_dist,poly,D,TUB_BER_e7,TUB_FER_e5,count\n40,5,9,13x+10x^2,4,0.9336,0.1919,4\n"
    );

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# table 2, L = 40\ncommand = search\nmod = 40\ndegree = 2\nchannel = awgn\nterms = 3\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = stdout_of(&["--config", cfg, "--terms", "9"]);
    assert_eq!(from_file, out);
    let three = stdout_of(&["search", "--config", cfg]);
    assert!(three.contains("40,5,3,"), "{three}");

    let json: serde_json::Value = serde_json::from_str(&stdout_of(&[
        "search", "--config", cfg, "--terms", "9", "--format", "json",
    ]))
    .unwrap();
    assert_eq!(json["winner_text"], "13x+10x^2");
    assert_eq!(json["optimum_count"], 4);
    assert_eq!(json["budget_exceeded"], false);
}

#[test]
fn reproduce_is_identical_across_worker_counts() {
    let args = ["reproduce", "--table", "2", "--lengths", "40"];
    let one = ppturbo()
        .args(["--jobs", "1"])
        .args(args)
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let four = ppturbo()
        .env("PPTURBO_JOBS", "4")
        .args(args)
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    assert_eq!(one, four);
    let text = String::from_utf8(one).unwrap();
    assert!(text.starts_with("table,L,family,field,ours,printed,matched_by,pass\n"));
    assert_eq!(text.lines().count(), 11);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")), "{text}");
}
