use rapnc::svorex::{predict, synthetic, train, OrdinalDataset, SvorexConfig, SvorexModel, SvorexProblem, TrainError};

fn small() -> OrdinalDataset {
    synthetic(60, 3, 4, 0.3, 17).unwrap()
}

#[test]
fn training_converges_and_trace_is_monotone() {
    let ds = small();
    let cfg = SvorexConfig { n_ws: 4, check_samples: 50, ..SvorexConfig::default() };
    let report = train(&ds, &cfg).unwrap();
    assert!(report.final_violation <= cfg.kkt_tol);
    assert_eq!(report.projections.failed, 0);
    assert!(report.projections.checked > 0);
    for pair in report.trace.windows(2) {
        assert!(pair[1].objective >= pair[0].objective - 1e-12 * pair[0].objective.abs().max(1.0));
    }
    assert!(report.trace.iter().all(|e| e.feasibility <= 1e-9));
    let thresholds = &report.model.thresholds;
    assert_eq!(thresholds.len(), 3);
    assert!(thresholds.windows(2).all(|w| w[0] <= w[1]), "{thresholds:?}");
}

#[test]
fn working_set_size_does_not_change_the_optimum() {
    let ds = small();
    let objective = |n_ws| {
        let cfg = SvorexConfig { n_ws, ..SvorexConfig::default() };
        let report = train(&ds, &cfg).unwrap();
        SvorexProblem::new(&ds, &cfg).objective(&report.model)
    };
    let (a, b) = (objective(2), objective(8));
    assert!((a - b).abs() <= 1e-3 * a.abs(), "{a} vs {b}");
}

#[test]
fn model_round_trips_through_json() {
    let ds = small();
    let model = train(&ds, &SvorexConfig::default()).unwrap().model;
    let back = SvorexModel::from_json(&model.to_json().unwrap()).unwrap();
    assert_eq!(back, model);
    for x in &ds.features {
        assert_eq!(predict(&back, &ds, x), predict(&model, &ds, x));
    }
}

#[test]
fn fits_most_training_labels() {
    let ds = small();
    let model = train(&ds, &SvorexConfig::default()).unwrap().model;
    let correct = ds.features.iter().zip(&ds.labels).filter(|(x, &l)| predict(&model, &ds, x) == l).count();
    assert!(correct * 10 >= ds.len() * 8, "{correct}/{}", ds.len());
}

#[test]
fn selection_budget_is_reported() {
    let ds = small();
    let cfg = SvorexConfig { max_selections: 3, ..SvorexConfig::default() };
    match train(&ds, &cfg) {
        Err(TrainError::IterationLimitExceeded { report }) => {
            assert_eq!(report.model.selections, 3);
            assert!(report.final_violation > cfg.kkt_tol);
        }
        other => panic!("expected the selection limit, got {:?}", other.map(|r| r.model.selections)),
    }
}

#[test]
fn text_format_round_trips() {
    let ds = small();
    let back = OrdinalDataset::parse(&ds.to_text()).unwrap();
    assert_eq!(back.labels, ds.labels);
    assert_eq!(back.features.len(), ds.features.len());
}
