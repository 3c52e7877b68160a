use dravida::corpus::{Direction, LanguageId};
use dravida::harness::{preset, run_experiment, ExperimentConfig, ExperimentData, RunOptions};
use dravida::nmt::{Checkpoint, Translator};
use dravida::overlap::VocabMode;
use dravida::par::Exec;
use dravida::synth::{generate_family, Family, FamilySpec};

fn tiny() -> (Family, ExperimentConfig) {
    let fam = generate_family(&FamilySpec {
        sentences_per_direction: 40,
        dev_size: 6,
        test_size: 5,
        mono_size: 40,
        ..FamilySpec::default()
    })
    .unwrap();
    let mut c = preset("4lang-2").unwrap();
    c.vocab = VocabMode::Bpe { size: 200 };
    c.model.model_dim = 8;
    c.model.heads = 2;
    c.model.ffn_dim = 16;
    c.model.layers_enc = 1;
    c.model.layers_dec = 1;
    c.train.max_epochs = 2;
    c.train.warmup_steps = 4;
    c.beam = 2;
    c.max_len = 6;
    (fam, c)
}

#[test]
fn sequential_and_parallel_runs_agree() {
    let (fam, c) = tiny();
    let data = ExperimentData::from_family(&fam, &c);
    let run = |exec| run_experiment(&c, &data, &RunOptions { exec, ..RunOptions::default() }).unwrap();
    let (a, b) = (run(Exec::Sequential), run(Exec::Parallel));
    assert_eq!(a.table, b.table);
    assert_eq!(a.hypotheses, b.hypotheses);
    assert_eq!(a.checkpoint.model.params, b.checkpoint.model.params);
    assert_eq!(a.table.cells.len(), 12);
    assert_eq!(a.table.cells.values().filter(|c| c.trained).count(), 4);
}

#[test]
fn checkpoint_round_trip_translates_identically() {
    let (fam, c) = tiny();
    let data = ExperimentData::from_family(&fam, &c);
    let out = run_experiment(&c, &data, &RunOptions::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    out.checkpoint.save(dir.path()).unwrap();
    let loaded = Checkpoint::<f32>::load(dir.path()).unwrap();
    assert_eq!(loaded.model.params, out.checkpoint.model.params);
    assert_eq!(loaded.vocab.to_text(), out.checkpoint.vocab.to_text());

    let d = Direction::new(LanguageId::Kn, LanguageId::Te).unwrap();
    let src = &fam.test.lines[&LanguageId::Kn];
    let before = Translator::new(&out.checkpoint.model, &out.checkpoint.vocab, out.checkpoint.shared_script).unwrap();
    let after = Translator::new(&loaded.model, &loaded.vocab, loaded.shared_script).unwrap();
    for s in src {
        assert_eq!(before.translate(s, d).unwrap(), after.translate(s, d).unwrap());
    }
}

#[test]
fn rerun_reuses_stages_and_retrains_on_change() {
    let (fam, mut c) = tiny();
    let data = ExperimentData::from_family(&fam, &c);
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions { out_dir: Some(dir.path().to_path_buf()), ..RunOptions::default() };
    let first = run_experiment(&c, &data, &opts).unwrap();
    assert!(first.reused.is_empty());
    let second = run_experiment(&c, &data, &opts).unwrap();
    assert!(second.reused.iter().any(|s| s == "vocab"));
    assert!(second.reused.iter().any(|s| s == "train"));
    assert_eq!(first.table, second.table);

    c.train.max_epochs = 1;
    let third = run_experiment(&c, &data, &opts).unwrap();
    assert!(third.reused.iter().any(|s| s == "vocab"));
    assert!(!third.reused.iter().any(|s| s == "train"));
}
