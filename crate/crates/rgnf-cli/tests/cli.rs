//! Binary-level checks: exit codes, artifact layout, scoring output, and
//! the config precedence chain.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rgnf_core::flow::{FlowOrigin, NavFlow};
use rgnf_core::hierarchy::to_rgnf_json;
use rgnf_core::synth::{ablation_corpus, menu_screen, toolbar_strip, unfocusable_screen, MENU_BASELINE, MENU_REDRAWN};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rgnf"));
    cmd.env_remove("RGNF_CONFIG");
    cmd
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_flow(path: &Path, origin: FlowOrigin, ids: &[&str]) {
    let flow = NavFlow::new(origin, ids.iter().map(|s| s.to_string()).collect());
    fs::write(path, serde_json::to_vec_pretty(&flow).unwrap()).unwrap();
}

fn write_menu(dir: &Path) -> (PathBuf, PathBuf) {
    let (tree, shot) = menu_screen();
    let hierarchy = dir.join("menu.json");
    let png = dir.join("menu.png");
    fs::write(&hierarchy, to_rgnf_json(&tree)).unwrap();
    fs::write(&png, shot.encode_png().unwrap()).unwrap();
    (hierarchy, png)
}

#[test]
fn no_filter_keeps_baseline_as_filtered() {
    let dir = scratch("cli-no-filter");
    let case = ablation_corpus(1, 0x4E4F464C).remove(0);
    let hierarchy = dir.join("screen.json");
    fs::write(&hierarchy, to_rgnf_json(&case.tree)).unwrap();

    let with = dir.join("with-filter");
    let status = bin()
        .args(["redraw".as_ref(), hierarchy.as_os_str()])
        .arg("--out")
        .arg(&with)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", stderr_of(&status));
    assert_ne!(
        fs::read(with.join("filtered.json")).unwrap(),
        fs::read(with.join("baseline.json")).unwrap(),
        "fixture has removable nodes, the filtered flow must differ"
    );

    let without = dir.join("without-filter");
    let status = bin()
        .args(["redraw".as_ref(), hierarchy.as_os_str()])
        .arg("--no-filter")
        .arg("--out")
        .arg(&without)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", stderr_of(&status));
    assert_eq!(
        fs::read(without.join("filtered.json")).unwrap(),
        fs::read(without.join("baseline.json")).unwrap(),
        "--no-filter must pass the baseline through untouched"
    );
}

#[test]
fn garbled_hierarchy_exits_two() {
    let dir = scratch("cli-garbled");
    let bogus = dir.join("screen.json");
    fs::write(&bogus, "neither xml nor json {").unwrap();
    let out = bin()
        .args(["redraw".as_ref(), bogus.as_os_str()])
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr_of(&out));
    assert!(stderr_of(&out).starts_with("rgnf: "));
}

#[test]
fn eval_perfect_candidate_scores_one() {
    let dir = scratch("cli-eval-perfect");
    let (hierarchy, _) = write_menu(&dir);
    let candidate = dir.join("candidate.json");
    let truth = dir.join("truth.json");
    write_flow(&candidate, FlowOrigin::Redrawn, &MENU_REDRAWN);
    write_flow(&truth, FlowOrigin::GroundTruth, &MENU_REDRAWN);

    let out_dir = dir.join("out");
    let out = bin()
        .arg("eval")
        .arg("--candidate")
        .arg(&candidate)
        .arg("--truth")
        .arg(&truth)
        .arg("--hierarchy")
        .arg(&hierarchy)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("S = 1.000000"));

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("eval.json")).unwrap()).unwrap();
    assert_eq!(report["similarity"]["s"].as_f64(), Some(1.0));
    let csv = fs::read_to_string(out_dir.join("eval.csv")).unwrap();
    assert!(csv.starts_with("candidate,s,n,m,p\n"));
    assert!(csv.contains("candidate,1.000000,20,20,1.000000"), "csv was: {csv}");
}

#[test]
fn eval_matches_rank_formula_on_baseline_candidate() {
    let dir = scratch("cli-eval-baseline");
    let (hierarchy, _) = write_menu(&dir);
    let candidate = dir.join("baseline.json");
    let truth = dir.join("truth.json");
    write_flow(&candidate, FlowOrigin::Baseline, &MENU_BASELINE);
    write_flow(&truth, FlowOrigin::GroundTruth, &MENU_REDRAWN);

    let out_dir = dir.join("out");
    let out = bin()
        .arg("eval")
        .arg("--candidate")
        .arg(&candidate)
        .arg("--truth")
        .arg(&truth)
        .arg("--hierarchy")
        .arg(&hierarchy)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));

    // Direct evaluation of the rank-distance score on the same pair.
    let mut sum = 0.0f64;
    for (i, id) in MENU_REDRAWN.iter().enumerate() {
        let rank = MENU_BASELINE.iter().position(|c| c == id).unwrap() as f64 + 1.0;
        let want = (i + 1) as f64;
        sum += (rank - want) * (rank - want);
    }
    let expected = 1.0 / (1.0 + sum.sqrt());

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("eval.json")).unwrap()).unwrap();
    let got = report["similarity"]["s"].as_f64().unwrap();
    assert!(
        (got - expected).abs() <= 5e-7,
        "reported {got}, direct formula gives {expected}"
    );
    assert!(got < 1.0, "baseline should not score a perfect match");
}

#[test]
fn eval_corrupt_truth_exits_two() {
    let dir = scratch("cli-eval-corrupt");
    let (hierarchy, _) = write_menu(&dir);
    let candidate = dir.join("candidate.json");
    write_flow(&candidate, FlowOrigin::Redrawn, &MENU_REDRAWN);
    let truth = dir.join("truth.json");
    fs::write(&truth, "{ not json").unwrap();

    let out = bin()
        .arg("eval")
        .arg("--candidate")
        .arg(&candidate)
        .arg("--truth")
        .arg(&truth)
        .arg("--hierarchy")
        .arg(&hierarchy)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr_of(&out));
}

#[test]
fn eval_unknown_id_exits_two_and_names_it() {
    let dir = scratch("cli-eval-ghost");
    let (hierarchy, _) = write_menu(&dir);
    let candidate = dir.join("candidate.json");
    write_flow(&candidate, FlowOrigin::Redrawn, &MENU_REDRAWN);
    let truth = dir.join("truth.json");
    write_flow(&truth, FlowOrigin::GroundTruth, &["button1", "ghost"]);

    let out = bin()
        .arg("eval")
        .arg("--candidate")
        .arg(&candidate)
        .arg("--truth")
        .arg(&truth)
        .arg("--hierarchy")
        .arg(&hierarchy)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = stderr_of(&out);
    assert!(stderr.contains("ids not present in the hierarchy"), "stderr: {stderr}");
    assert!(stderr.contains("ghost"), "stderr: {stderr}");
}

#[test]
fn batch_continues_past_failures() {
    let dir = scratch("cli-batch-partial");
    let (_, _) = write_menu(&dir);
    write_flow(&dir.join("menu_truth.json"), FlowOrigin::GroundTruth, &MENU_REDRAWN);
    fs::write(dir.join("numb.json"), to_rgnf_json(&unfocusable_screen())).unwrap();
    let manifest = dir.join("manifest.json");
    fs::write(
        &manifest,
        serde_json::to_vec_pretty(&serde_json::json!([
            {"id": "menu", "hierarchy": "menu.json", "screenshot": "menu.png", "truth": "menu_truth.json"},
            {"id": "numb", "hierarchy": "numb.json"},
        ]))
        .unwrap(),
    )
    .unwrap();

    let out_dir = dir.join("out");
    let out = bin()
        .args(["batch".as_ref(), manifest.as_os_str()])
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "stderr: {}", stderr_of(&out));
    assert!(stderr_of(&out).contains("numb"), "failure should name the screen");

    let aggregate = fs::read_to_string(out_dir.join("aggregate.csv")).unwrap();
    assert!(aggregate.contains("\nmenu,ok,1.000000,"), "csv: {aggregate}");
    assert!(aggregate.contains("\nnumb,FAILED,,,,"), "csv: {aggregate}");
    assert!(aggregate.contains("\nmean,"), "csv: {aggregate}");
    assert!(out_dir.join("menu").join("redrawn.json").exists());
}

#[test]
fn empty_manifest_exits_two() {
    let dir = scratch("cli-batch-empty");
    let manifest = dir.join("manifest.json");
    fs::write(&manifest, "[]").unwrap();
    let out = bin()
        .args(["batch".as_ref(), manifest.as_os_str()])
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("no inputs"), "stderr: {}", stderr_of(&out));
}

#[test]
fn render_writes_overlay_svg() {
    let dir = scratch("cli-render");
    let (hierarchy, png) = write_menu(&dir);
    let artifacts = dir.join("artifacts");
    let out = bin()
        .args(["redraw".as_ref(), hierarchy.as_os_str()])
        .arg("--screenshot")
        .arg(&png)
        .arg("--out")
        .arg(&artifacts)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));

    let svg_path = dir.join("overlay.svg");
    let out = bin()
        .arg("render")
        .arg("--hierarchy")
        .arg(&hierarchy)
        .arg("--flow")
        .arg(artifacts.join("redrawn.json"))
        .arg("--baseline")
        .arg(artifacts.join("baseline.json"))
        .arg("--screenshot")
        .arg(&png)
        .arg("--out")
        .arg(&svg_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let svg = fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg "));
    assert!(svg.contains("data:image/png;base64,"), "screenshot not embedded");
    assert!(svg.contains("marker-end"), "flow arrows missing");

    // Without a screenshot the renderer falls back to schematic boxes.
    let plain_path = dir.join("schematic.svg");
    let out = bin()
        .arg("render")
        .arg("--hierarchy")
        .arg(&hierarchy)
        .arg("--flow")
        .arg(artifacts.join("redrawn.json"))
        .arg("--out")
        .arg(&plain_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let plain = fs::read_to_string(&plain_path).unwrap();
    assert!(!plain.contains("<image"), "schematic render must not embed an image");
}

fn proximal_sizes(regions_json: &Path) -> Vec<usize> {
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(regions_json).unwrap()).unwrap();
    v["proximal"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["members"].as_array().unwrap().len())
        .collect()
}

#[test]
fn config_precedence_is_flags_then_file_then_defaults() {
    let dir = scratch("cli-config");
    let (tree, shot) = toolbar_strip();
    let hierarchy = dir.join("toolbar.json");
    let png = dir.join("toolbar.png");
    fs::write(&hierarchy, to_rgnf_json(&tree)).unwrap();
    fs::write(&png, shot.encode_png().unwrap()).unwrap();

    let cfg = dir.join("tight.toml");
    fs::write(&cfg, "proximity_max = 0\nstrict_proximity = true\n").unwrap();
    let bad = dir.join("bad.toml");
    fs::write(&bad, "canny_low = 0.9\ncanny_high = 0.2\n").unwrap();

    let run = |label: &str, extra: &dyn Fn(&mut Command)| -> PathBuf {
        let out_dir = dir.join(label);
        let mut cmd = bin();
        cmd.args(["redraw".as_ref(), hierarchy.as_os_str()])
            .arg("--screenshot")
            .arg(&png)
            .arg("--out")
            .arg(&out_dir);
        extra(&mut cmd);
        let out = cmd.output().unwrap();
        assert!(out.status.success(), "{label}: {}", stderr_of(&out));
        out_dir.join("regions.json")
    };

    // Defaults: strict pairing groups the two label+button pairs.
    let defaults = run("defaults", &|cmd| {
        cmd.arg("--strict-proximity");
    });
    assert_eq!(proximal_sizes(&defaults), vec![2, 1, 2]);

    // Config file tightens the gap to zero: everything separates.
    let filed = run("filed", &|cmd| {
        cmd.arg("--config").arg(&cfg);
    });
    assert_eq!(proximal_sizes(&filed), vec![1, 1, 1, 1, 1]);

    // A flag on top of the file wins, and the file is still honored for the
    // keys the flag leaves alone (strict mode comes from the file here).
    let flagged = run("flagged", &|cmd| {
        cmd.arg("--config").arg(&cfg).args(["--proximity-max", "15"]);
    });
    assert_eq!(proximal_sizes(&flagged), vec![2, 1, 2]);

    // RGNF_CONFIG points at the file when no flag does.
    let via_env = run("via-env", &|cmd| {
        cmd.env("RGNF_CONFIG", &cfg);
    });
    assert_eq!(proximal_sizes(&via_env), vec![1, 1, 1, 1, 1]);

    // An explicit --config beats the environment.
    let flag_over_env = run("flag-over-env", &|cmd| {
        cmd.env("RGNF_CONFIG", &bad).arg("--config").arg(&cfg);
    });
    assert_eq!(proximal_sizes(&flag_over_env), vec![1, 1, 1, 1, 1]);

    // A config that fails validation is an input error.
    let out = bin()
        .args(["redraw".as_ref(), hierarchy.as_os_str()])
        .arg("--config")
        .arg(&bad)
        .arg("--out")
        .arg(dir.join("rejected"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr_of(&out));
}
