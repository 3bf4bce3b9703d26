use std::fs;
use std::path::Path;

use rfda::experiments::{emit, run, CampaignResult, ColumnData, ExperimentConfig, Metadata, OutputFormat, Scenario, Table};

fn small(scenario: Scenario) -> ExperimentConfig {
    let mut c = ExperimentConfig::default();
    c.scenario = scenario;
    c.trials = match scenario {
        Scenario::DetectSweep => 4,
        Scenario::Ks => 60,
        _ => 12,
    };
    c.grid.q_points = 5;
    c.grid.p_points = 4;
    c.seed = 31;
    c
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "timing.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn parse_csv(path: &Path, template: &Table) -> Table {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    let mut table = Table::new(template.name.clone());
    for (j, col) in template.columns.iter().enumerate() {
        assert_eq!(header[j], col.name);
        let cells = rows.iter().map(|r| r[j].to_string());
        table = match col.data {
            ColumnData::Float(_) => table.float(&col.name, cells.map(|s| s.parse().unwrap()).collect()),
            ColumnData::Int(_) => table.int(&col.name, cells.map(|s| s.parse().unwrap()).collect()),
            ColumnData::Bool(_) => table.boolean(&col.name, cells.map(|s| s.parse().unwrap()).collect()),
            ColumnData::Text(_) => table.text(&col.name, cells.collect()),
        };
    }
    table
}

fn float_bits(t: &Table) -> Vec<Vec<u64>> {
    t.columns
        .iter()
        .filter_map(|c| match &c.data {
            ColumnData::Float(v) => Some(v.iter().map(|x| x.to_bits()).collect()),
            _ => None,
        })
        .collect()
}

#[test]
fn csv_emission_round_trips_bit_exactly() {
    let result = run(&small(Scenario::Moments)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit(&result, dir.path(), OutputFormat::Csv).unwrap();
    for table in &result.tables {
        let back = parse_csv(&dir.path().join(format!("{}.csv", table.name)), table);
        assert_eq!(float_bits(&back), float_bits(table));
        assert_eq!(&back, table);
    }
}

#[test]
fn json_emission_round_trips() {
    let result = run(&small(Scenario::DetectExample)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit(&result, dir.path(), OutputFormat::Json).unwrap();
    for table in &result.tables {
        let text = fs::read_to_string(dir.path().join(format!("{}.json", table.name))).unwrap();
        let back: Table = serde_json::from_str(&text).unwrap();
        assert_eq!(&back, table);
    }
    let meta: Metadata = serde_json::from_str(&fs::read_to_string(dir.path().join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta, result.metadata);
}

#[test]
fn empty_table_is_header_only() {
    let mut result = run(&small(Scenario::Beampattern)).unwrap();
    result.tables = vec![Table::new("empty").float("a", vec![]).int("b", vec![])];
    let dir = tempfile::tempdir().unwrap();
    emit(&result, dir.path(), OutputFormat::Csv).unwrap();
    assert_eq!(fs::read_to_string(dir.path().join("empty.csv")).unwrap(), "a,b\n");
}

#[test]
fn config_echo_parses_back_equal() {
    for s in Scenario::ALL {
        let mut cfg = small(s);
        cfg.snr_db = vec![-3.0, 0.5];
        let result = run(&cfg).unwrap();
        let echo = &result.metadata.config;
        assert_eq!(echo, &cfg);
        assert_eq!(&ExperimentConfig::from_toml_str(&echo.to_toml_string(), &[]).unwrap(), &cfg);
        let via_json: ExperimentConfig = serde_json::from_value(serde_json::to_value(echo).unwrap()).unwrap();
        assert_eq!(via_json, cfg);
    }
}

#[test]
fn reruns_are_byte_identical_and_thread_count_is_irrelevant() {
    for s in Scenario::ALL {
        let mut outputs = vec![];
        for threads in [1, 1, 3] {
            let mut cfg = small(s);
            cfg.threads = threads;
            let result = run(&cfg).unwrap();
            let dir = tempfile::tempdir().unwrap();
            emit(&result, dir.path(), OutputFormat::Csv).unwrap();
            let mut bytes = read_dir_bytes(dir.path());
            // the config echo legitimately records the thread count
            bytes.retain(|(name, _)| name != "metadata.json");
            outputs.push((result.tables, bytes));
        }
        assert_eq!(outputs[0], outputs[1], "{s}: rerun differs");
        assert_eq!(outputs[0], outputs[2], "{s}: parallel differs from serial");
    }
}

#[test]
fn lfda_beampattern_has_unit_ridge() {
    let mut cfg = small(Scenario::Beampattern);
    cfg.lfda = true;
    cfg.grid.q_points = 21;
    cfg.grid.p_points = 21;
    let result = run(&cfg).unwrap();
    let t = result.table("beampattern").unwrap();
    let (q, p, mag) = (t.floats("q").unwrap(), t.floats("p").unwrap(), t.floats("magnitude").unwrap());
    let mut ridge = 0;
    for i in 0..q.len() {
        if (q[i] + p[i]).abs() < 1e-12 {
            ridge += 1;
            assert!((mag[i] - 1.0).abs() < 1e-9, "ridge magnitude {} at q={}", mag[i], q[i]);
        }
    }
    assert!(ridge >= 2);
    let summary = result.table("beampattern_summary").unwrap();
    assert!((summary.floats("max_off_peak_magnitude").unwrap()[0] - 1.0).abs() < 1e-9);
}

#[test]
fn random_beampattern_peaks_once() {
    let mut cfg = small(Scenario::Beampattern);
    cfg.grid.p_points = 5;
    let result = run(&cfg).unwrap();
    let s = result.table("beampattern_summary").unwrap();
    assert!((s.floats("peak_magnitude").unwrap()[0] - 1.0).abs() < 1e-12);
    assert!(s.floats("max_off_peak_magnitude").unwrap()[0] < 0.6);
}

#[test]
fn tables_are_rectangular() {
    for s in Scenario::ALL {
        let result: CampaignResult = run(&small(s)).unwrap();
        assert!(!result.tables.is_empty());
        for t in &result.tables {
            let n = t.n_rows();
            assert!(t.columns.iter().all(|c| c.data.len() == n), "{s}/{}", t.name);
        }
    }
}

#[test]
fn unwritable_output_is_an_io_error() {
    let result = run(&small(Scenario::Beampattern)).unwrap();
    let file = tempfile::NamedTempFile::new().unwrap();
    let err = emit(&result, &file.path().join("sub"), OutputFormat::Csv).unwrap_err();
    assert!(err.to_string().contains(&file.path().display().to_string()), "{err}");
}
