use netzero::classifier::stub::{ConstantBackend, GoldEchoBackend};
use netzero::classifier::{cross_validate, fine_tune, grid_search, resolve_base, ClassifierConfig, Grid, ModelHandle};
use netzero::ingest::{to_binary, LabeledSample, Provenance};
use netzero::{synth, BinaryLabel, ClassLabel, Error, TargetLabel};

fn toy_binary() -> (Vec<LabeledSample<BinaryLabel>>, Vec<LabeledSample<BinaryLabel>>) {
    let target = [
        "net zero by 2050",
        "we reach net zero by 2040",
        "net zero emissions by 2045",
        "net zero carbon by 2035",
        "commit to net zero by 2050",
        "net zero target for 2030",
        "achieve net zero by 2060",
        "net zero pledge by 2050",
        "net zero operations by 2040",
        "net zero by 2055",
    ];
    let none = [
        "the weather is nice",
        "the weather is nice today",
        "nice weather this weekend",
        "the weather is sunny",
        "what nice weather",
        "the weather is nice again",
        "lovely nice weather",
        "the weather was nice",
        "nice and sunny weather",
        "the weather is really nice",
    ];
    let mut samples = Vec::new();
    for (i, t) in target.iter().enumerate() {
        samples.push(LabeledSample::new(format!("t{i}"), *t, BinaryLabel::Target, Provenance::Tracker));
    }
    for (i, t) in none.iter().enumerate() {
        samples.push(LabeledSample::new(format!("n{i}"), *t, BinaryLabel::None, Provenance::NonTargetSource));
    }
    let val: Vec<_> = samples.iter().filter(|s| s.id.ends_with('0') || s.id.ends_with('5')).cloned().collect();
    let train: Vec<_> = samples.iter().filter(|s| !(s.id.ends_with('0') || s.id.ends_with('5'))).cloned().collect();
    (train, val)
}

fn binary_config() -> ClassifierConfig {
    ClassifierConfig { num_labels: 2, ..Default::default() }
}

#[test]
fn separable_toy_reaches_perfect_validation() {
    let (train, val) = toy_binary();
    let backend = resolve_base("ngram-logreg", None).unwrap();
    let model = fine_tune(&train, &val, &binary_config(), backend.as_ref()).unwrap();
    let preds = model.predict(&val.iter().map(|s| s.text.as_str()).collect::<Vec<_>>()).unwrap();
    let acc = preds.iter().zip(&val).filter(|(p, s)| p.label == s.label).count() as f64 / val.len() as f64;
    assert_eq!(acc, 1.0);
    assert_eq!(model.history().iter().cloned().fold(0.0, f64::max), 1.0);
}

#[test]
fn label_count_mismatch_is_config_error() {
    let (train, val) = toy_binary();
    let backend = resolve_base("ngram-logreg", None).unwrap();
    let err = fine_tune(&train, &val, &ClassifierConfig::default(), backend.as_ref()).unwrap_err();
    assert!(matches!(err, Error::Config(_)), "{err}");
}

#[test]
fn predictions_are_normalised_and_ordered() {
    let data = synth::target_dataset([100, 100, 100], 3);
    let (train, val) = data.split_at(240);
    let backend = resolve_base("ngram-logreg", None).unwrap();
    let model = fine_tune(train, val, &ClassifierConfig::default(), backend.as_ref()).unwrap();
    assert!(model.predict::<&str>(&[]).unwrap().is_empty());

    let texts = [
        "We commit to net zero emissions by 2040.",
        "Revenue grew in the third quarter.",
        "We will cut CO2 emissions by 45% by 2030 compared to 2015 levels.",
    ];
    let preds = model.predict(&texts).unwrap();
    assert_eq!(preds.len(), 3);
    for p in &preds {
        assert!((p.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-6);
        assert!(p.probabilities.iter().all(|&x| x >= 0.0));
    }
    assert_eq!(preds[0].label, TargetLabel::NetZero);
    assert_eq!(preds[1].label, TargetLabel::None);
    assert_eq!(preds[2].label, TargetLabel::Reduction);
}

#[test]
fn save_and_load_reproduce_predictions() {
    let data = synth::target_dataset([20, 20, 20], 5);
    let backend = resolve_base("unigram-logreg", None).unwrap();
    let model = fine_tune(&data[..45], &data[45..], &ClassifierConfig::default(), backend.as_ref()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    model.save(dir.path()).unwrap();
    for f in ["config.json", "label_map.json", "weights.bin", "ngram.json"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    let loaded: ModelHandle<TargetLabel> = ModelHandle::load(dir.path()).unwrap();
    let texts: Vec<&str> = data.iter().map(|s| s.text.as_str()).collect();
    assert_eq!(model.predict(&texts).unwrap(), loaded.predict(&texts).unwrap());
    assert!(ModelHandle::<BinaryLabel>::load(dir.path()).is_err());
}

#[test]
fn gold_echo_cross_validation_is_perfect() {
    let data = synth::target_dataset([23, 31, 40], 8);
    let report = cross_validate(&data, &ClassifierConfig::default(), 5, &GoldEchoBackend).unwrap();
    for m in &report.per_fold {
        assert_eq!((m.accuracy, m.f1, m.precision, m.recall), (1.0, 1.0, 1.0, 1.0));
    }
    assert_eq!(report.summary.accuracy.std, 0.0);
    assert!(report.confusion.is_diagonal());
    assert_eq!(report.confusion.row_sums(), vec![23, 31, 40]);
    let preds = report.predictions.as_ref().unwrap();
    assert_eq!(preds.len(), data.len());
    assert!(preds.iter().zip(&data).all(|(p, s)| p.sample_id == s.id));
}

#[test]
fn constant_backend_scores_prevalence() {
    let data = synth::target_dataset([10, 10, 30], 2);
    let report = cross_validate(&data, &ClassifierConfig::default(), 5, &ConstantBackend(TargetLabel::None.index())).unwrap();
    assert_eq!(report.summary.accuracy.mean, 0.6);
    assert_eq!(report.confusion.total(), 50);
}

#[test]
fn ngram_cross_validation_on_synthetic_data() {
    let data = synth::target_dataset([60, 60, 90], 11);
    let report = cross_validate(&data, &ClassifierConfig::default(), 5, resolve_base("ngram-logreg", None).unwrap().as_ref()).unwrap();
    assert!(report.summary.accuracy.mean > 0.9, "{}", report.to_table());
    assert_eq!(report.confusion.total() as usize, data.len());
    let again = cross_validate(&data, &ClassifierConfig::default(), 5, resolve_base("ngram-logreg", None).unwrap().as_ref()).unwrap();
    assert_eq!(report, again);
}

#[test]
fn binary_task_end_to_end() {
    let data = to_binary(&synth::target_dataset([60, 60, 80], 4));
    let report = cross_validate(&data, &binary_config(), 5, resolve_base("ngram-logreg", None).unwrap().as_ref()).unwrap();
    assert_eq!(report.confusion.labels, ["TARGET", "NONE"]);
    assert!(report.summary.accuracy.mean > 0.9);
}

#[test]
fn grid_has_one_row_per_cell_and_base() {
    let data = synth::target_dataset([10, 10, 10], 6);
    let bases = vec!["gold".to_string(), "const".to_string()];
    let resolve = |id: &str| -> netzero::Result<Box<dyn netzero::classifier::Backend>> {
        Ok(match id {
            "gold" => Box::new(GoldEchoBackend),
            _ => Box::new(ConstantBackend(0)),
        })
    };
    let mut report = grid_search(&data, &Grid::default(), &bases, &ClassifierConfig::default(), 5, &resolve).unwrap();
    assert_eq!(report.rows.len(), 24);
    assert_eq!(report.rows.iter().filter(|r| r.base_model_id == "gold").count(), 12);
    report.sort_by_accuracy();
    assert_eq!(report.rows[0].accuracy.mean, 1.0);
    assert_eq!(report.to_table().lines().count(), 25);
}

#[test]
fn singleton_grid_matches_single_run() {
    let data = synth::target_dataset([15, 15, 15], 9);
    let config = ClassifierConfig { epochs: 3, ..Default::default() };
    let grid = Grid { learning_rates: vec![config.learning_rate], epochs: vec![3], batch_sizes: vec![config.batch_size] };
    let resolve = |id: &str| resolve_base(id, None);
    let report = grid_search(&data, &grid, &["ngram-logreg".to_string()], &config, 5, &resolve).unwrap();
    let single = cross_validate(&data, &config, 5, resolve_base("ngram-logreg", None).unwrap().as_ref()).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.rows[0].accuracy, single.summary.accuracy);
    assert!(grid_search(&data, &Grid { learning_rates: vec![], ..grid }, &["x".into()], &config, 5, &resolve).is_err());
}
