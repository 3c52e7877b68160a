use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn dravida(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_dravida"))
        .args(args)
        .env("RUST_BACKTRACE", "0")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    child.wait_with_output().unwrap()
}

fn ok(args: &[&str], stdin: Option<&str>) -> String {
    let out = dravida(args, stdin);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn translit_round_trips_through_devanagari() {
    let deva = ok(&["translit", "--src", "kn", "--tgt", "deva"], Some("ಕನ್ನಡ"));
    assert_eq!(deva, "कन्नड");
    assert_eq!(ok(&["translit", "--src", "deva", "--tgt", "kn"], Some(&deva)), "ಕನ್ನಡ");
}

#[test]
fn coverage_exit_status() {
    assert_eq!(ok(&["coverage", "--dirs", "kn-ml,ml-te,te-ta,ta-kn"], None).trim(), "ok");
    let out = dravida(&["coverage", "--dirs", "kn-ml,kn-te,kn-ta"], None);
    assert!(!out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ml,te,ta never sources; kn never target");
}

#[test]
fn preset_prints_config_and_rejects_unknown() {
    let json: serde_json::Value = serde_json::from_str(&ok(&["preset", "8lang"], None)).unwrap();
    assert_eq!(json["train_directions"].as_array().unwrap().len(), 8);
    assert!(!dravida(&["preset", "9lang"], None).status.success());
}

#[test]
fn bpe_train_encode_decode() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("corpus.txt");
    std::fs::write(&text, "low lower lowest newer wider\nlow low newest widest\n").unwrap();
    let model = dir.path().join("m.bpe");
    ok(&["bpe-train", "--input", p(&text), "--vocab-size", "60", "--out", p(&model)], None);
    let pieces = ok(&["bpe-encode", "--model", p(&model)], Some("lowest newer\n"));
    assert!(pieces.starts_with('▁'));
    let back = ok(&["bpe-encode", "--model", p(&model), "--decode"], Some(&pieces));
    assert_eq!(back, "lowest newer\n");
}

#[test]
fn synth_experiment_and_summarize() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("fam");
    ok(
        &["synth", "--sentences", "60", "--dev", "8", "--test", "6", "--mono", "60", "--out", p(&fam)],
        None,
    );
    let test_kn = fam.join("test.kn");
    let eval = ok(
        &["evaluate", "--hyp", p(&test_kn), "--ref", p(&test_kn), "--lang", "kn", "--lexicon", p(&fam.join("lexicon.json"))],
        None,
    );
    let eval: serde_json::Value = serde_json::from_str(&eval).unwrap();
    assert_eq!(eval["bleu"]["score"], 100.0);
    assert_eq!(eval["off_target"]["rate"], 0.0);

    let mut config: serde_json::Value = serde_json::from_str(&ok(&["preset", "4lang-2"], None)).unwrap();
    config["vocab"] = serde_json::json!({ "Bpe": { "size": 200 } });
    for (k, v) in [("model_dim", 8), ("heads", 2), ("ffn_dim", 16), ("layers_enc", 1), ("layers_dec", 1)] {
        config["model"][k] = v.into();
    }
    config["train"]["max_epochs"] = 1.into();
    config["train"]["warmup_steps"] = 4.into();
    config["max_len"] = 6.into();
    let config_path = dir.path().join("config.json");
    std::fs::write(&config_path, config.to_string()).unwrap();

    let out = dir.path().join("run");
    let table = ok(&["--sequential", "experiment", "--config", p(&config_path), "--data", p(&fam), "--out", p(&out)], None);
    assert!(table.starts_with("# model=4lang-2\ttrained=kn-ml,ml-te,te-ta,ta-kn"));
    assert_eq!(table.lines().count(), 7);
    let again = dravida(&["--sequential", "experiment", "--config", p(&config_path), "--data", p(&fam), "--out", p(&out)], None);
    assert!(String::from_utf8_lossy(&again.stderr).contains("reused: vocab, train"));
    assert_eq!(String::from_utf8(again.stdout).unwrap(), table);

    let results = out.join("results.json");
    let summary = ok(&["summarize", p(&results), "--baselines"], None);
    assert_eq!(summary.lines().next().unwrap(), "language\t4lang-2\tbaseline-vanilla\tsamanantar-pivot");

    let translated = ok(
        &["translate", "--model", p(&out.join("model")), "--direction", "kn-te", "--beam", "2", "--max-len", "6"],
        Some("ಕನ್ನಡ\nಮನೆ\n"),
    );
    assert_eq!(translated.lines().count(), 2);
}

#[test]
fn experiment_reports_missing_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dravida(&["experiment", "--config", "6lang", "--data", p(dir.path()), "--out", p(&dir.path().join("o"))], None);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing inputs"));
}

#[test]
fn overlap_prep_and_volt_on_synthetic_data() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("fam");
    ok(&["synth", "--sentences", "100", "--dev", "4", "--test", "4", "--mono", "300", "--out", p(&fam)], None);
    let mono = fam.join("mono");
    let args = |cond| vec!["overlap", "--langs", "kn,ml,te,ta", "--dir", p(&mono), "--condition", cond, "--vocab-size", "150"];
    let raw = ok(&args("raw"), None);
    let deva = ok(&args("deva"), None);
    let cell = |tsv: &str| -> f64 { tsv.lines().nth(2).unwrap().split('\t').nth(2).unwrap().parse().unwrap() };
    assert!(raw.lines().nth(3).unwrap().starts_with("ml\t-\t"));
    assert!(cell(&deva) > cell(&raw), "{raw}\n{deva}");

    let deva_text = dir.path().join("kn.deva");
    ok(
        &["translit", "--src", "kn", "--tgt", "deva", "--in", p(&fam.join("mono/kn.txt")), "--out", p(&deva_text)],
        None,
    );
    let model = dir.path().join("m.bpe");
    ok(&["bpe-train", "--input", p(&deva_text), "--vocab-size", "200", "--out", p(&model)], None);
    let prep = dir.path().join("prep");
    ok(
        &[
            "prep", "--direction", "kn-ml", "--translit", "deva", "--bpe", p(&model),
            "--src-file", p(&fam.join("train/kn-ml.kn")), "--tgt-file", p(&fam.join("train/kn-ml.ml")), "--out-dir", p(&prep),
        ],
        None,
    );
    let src = std::fs::read_to_string(prep.join("kn-ml.src")).unwrap();
    assert_eq!(src.lines().count(), 100);
    assert!(src.lines().all(|l| l.starts_with("__src__kn__ __tgt__ml__ ▁") && l.ends_with(" [END]")));
    assert!(!src.contains("<unk>"));

    let report = dir.path().join("volt.json");
    ok(
        &["volt", "--input", p(&deva_text), "--merges", p(&model), "--threshold", "180", "--step", "10", "--out", p(&report)],
        None,
    );
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(r["recommended_size"].as_u64().unwrap() <= 180);
}
