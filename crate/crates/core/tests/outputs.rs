use std::collections::BTreeMap;
use std::path::Path;

use signorini::adapt::{OutputWriter, CONVERGENCE_HEADER, ESTIMATOR_HEADER};
use signorini::{adapt, manufactured_contact, AdaptParams};

fn run_into(dir: &Path, levels: usize) {
    let params = AdaptParams {
        levels,
        ..AdaptParams::default()
    };
    let mut out = OutputWriter::create(dir, &params, true).unwrap();
    adapt(&manufactured_contact(), &params, |level| {
        out.write_level(level)
    })
    .unwrap();
}

/// File contents with the wall-clock column of `convergence.csv` removed.
fn snapshot(dir: &Path) -> BTreeMap<String, String> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let mut text = std::fs::read_to_string(&path).unwrap();
        if name == "convergence.csv" {
            text = text
                .lines()
                .map(|l| l.rsplit_once(',').unwrap().0.to_string())
                .collect::<Vec<_>>()
                .join("\n");
        }
        files.insert(name, text);
    }
    files
}

#[test]
fn repeated_runs_write_identical_files() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_into(a.path(), 5);
    run_into(b.path(), 5);
    let (sa, sb) = (snapshot(a.path()), snapshot(b.path()));
    assert_eq!(sa.keys().collect::<Vec<_>>(), sb.keys().collect::<Vec<_>>());
    for (name, text) in &sa {
        assert_eq!(text, &sb[name], "{name} differs");
    }
}

#[test]
fn expected_files_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    run_into(dir.path(), 3);
    let files = snapshot(dir.path());
    for k in 0..3 {
        for stem in ["level_{}.vtk", "density_{}.csv", "pdas_{}.csv"] {
            let name = stem.replace("{}", &k.to_string());
            assert!(files.contains_key(&name), "missing {name}");
        }
    }
    let conv = std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    let mut lines = conv.lines();
    assert_eq!(lines.next(), Some(CONVERGENCE_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    let columns = CONVERGENCE_HEADER.split(',').count();
    assert!(rows.iter().all(|r| r.split(',').count() == columns));
    // Every field parses, including the error and efficiency columns.
    assert!(rows
        .iter()
        .flat_map(|r| r.split(','))
        .all(|v| v.parse::<f64>().is_ok()));

    let est = std::fs::read_to_string(dir.path().join("estimator.csv")).unwrap();
    assert_eq!(est.lines().next(), Some(ESTIMATOR_HEADER));

    let vtk = &files["level_1.vtk"];
    for key in [
        "DATASET UNSTRUCTURED_GRID",
        "POINT_DATA",
        "CELL_DATA",
        "displacement",
        "multiplier",
        "indicator",
    ] {
        assert!(vtk.contains(key), "vtk lacks {key}");
    }
    let config: serde_json::Value = serde_json::from_str(&files["config.json"]).unwrap();
    assert_eq!(config["levels"], 3);
}
