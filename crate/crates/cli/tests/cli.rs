use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn pouw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pouw"))
        .args(args)
        .env_remove("POUW_JOBS")
        .output()
        .expect("binary runs")
}

fn sample(name: &str) -> String {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    root.join(name).to_string_lossy().into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

const NETWORK: &str = "[network]\nlambda1 = 0.3\np0 = 0.005\nq0 = 0.001\n";
const REWARD: &str =
    "[reward]\nkind = \"constant\"\nb = 1.0\ns_max = 3.0\n[improvement]\ns1 = 2.0\ns2 = 3.0\n";

#[test]
fn invalid_config_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let out_s = out.to_string_lossy().into_owned();
    let cases = [
        ("simulate", format!("rounds = 0\n{NETWORK}{REWARD}")),
        ("analyze", format!("unknown = 1\n{NETWORK}{REWARD}")),
        ("analyze", format!("{NETWORK}{REWARD}unknown = 1\n")),
        ("analyze", "[network]\nlambda1 = 1.5\np0 = 0.005\nq0 = 0.001\n".to_string() + REWARD),
        ("sweep", format!("[axes]\nlambda_s = {{ start = 0.1, stop = 0.5, step = 0.0 }}\np0 = [0.005]\nq0 = [0.001]\n{REWARD}")),
        ("sweep", format!("[axes]\nlambda_s = [0.1]\np0 = [0.005]\n{REWARD}")),
        ("region", "rewards = []\n[improvement]\ns1 = 1.0\ns2 = 1.5\n".to_string()),
    ];
    for (i, (command, text)) in cases.iter().enumerate() {
        let cfg = write(dir.path(), &format!("bad{i}.toml"), text);
        let o = pouw(&[command, "--config", &cfg, "--out", &out_s]);
        assert_eq!(
            o.status.code(),
            Some(2),
            "case {i}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(!out.exists(), "case {i} wrote output");
    }
}

#[test]
fn footnote_point() {
    let o = pouw(&[
        "analyze",
        "--config",
        &sample("analyze.toml"),
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["binding_ratio"].as_f64().unwrap() - 0.4412).abs() < 5e-4);
    assert!((v["mu"].as_f64().unwrap() - 2.2663).abs() < 1e-3);
    assert_eq!(v["principle_holds"], true);
    assert_eq!(v["slope_sufficient"], serde_json::Value::Null);
}

#[test]
fn insecure_below_half() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "a.toml",
        &format!("[network]\nlambda1 = 0.3\np0 = 0.0005\nq0 = 0.001\n{REWARD}"),
    );
    let o = pouw(&["analyze", "--config", &cfg]);
    let (h, rows) = csv_rows(std::str::from_utf8(&o.stdout).unwrap());
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][col(&h, "selfish_secure")], "0");
    assert_eq!(rows[0][col(&h, "principle_holds")], "");
}

#[test]
fn simulate_two_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.toml",
        &format!("profiles = [\"hh\"]\nseeds = [4, 9]\n{NETWORK}{REWARD}"),
    );
    let o = pouw(&["simulate", "--config", &cfg, "--rounds", "200000"]);
    assert!(o.status.success());
    let (h, rows) = csv_rows(std::str::from_utf8(&o.stdout).unwrap());
    assert_eq!(rows.len(), 2);
    let (a, m) = (col(&h, "analytic_1"), col(&h, "sim_1_mean"));
    assert_eq!(rows[0][a], rows[1][a]);
    assert_ne!(rows[0][m], rows[1][m]);
    assert_eq!(rows[0][col(&h, "sim_1_n")], "200000");
}

#[test]
fn honest_beats_fs_at_high_eta() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.toml",
        &format!("profiles = [\"hh\", \"fsh\"]\nseeds = [3]\n[network]\nlambda1 = 0.45\np0 = 0.005\nq0 = 0.001\n{REWARD}"),
    );
    let o = pouw(&["simulate", "--config", &cfg, "--rounds", "1000000"]);
    let (h, rows) = csv_rows(std::str::from_utf8(&o.stdout).unwrap());
    let a = col(&h, "analytic_1");
    let get = |label: &str| -> f64 {
        rows.iter().find(|r| r[0] == label).unwrap()[a]
            .parse()
            .unwrap()
    };
    assert!(get("hh") > get("fsh"));
}

#[test]
fn lambda_sweep_grid() {
    let o = pouw(&["sweep", "--config", &sample("sweep_lambda.toml")]);
    assert!(o.status.success());
    let (h, rows) = csv_rows(std::str::from_utf8(&o.stdout).unwrap());
    assert_eq!(rows.len(), 40);
    assert_eq!(&h[..3], ["lambda_s", "p0", "q0"]);
    let key = |r: &Vec<String>| -> (f64, f64) { (r[0].parse().unwrap(), r[1].parse().unwrap()) };
    assert!(rows.windows(2).all(|w| key(&w[0]) < key(&w[1])));
}

#[test]
fn eta_sweep_reports_threshold() {
    let o = pouw(&[
        "sweep",
        "--config",
        &sample("sweep_eta.toml"),
        "--format",
        "json",
    ]);
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    for lambda_s in [0.15, 0.3, 0.45] {
        let group: Vec<_> = rows.iter().filter(|r| r["lambda_s"] == lambda_s).collect();
        let threshold = group[0]["fs_min_eta"].as_f64().unwrap();
        assert!(
            threshold > 0.5 && threshold < 0.95,
            "{lambda_s}: {threshold}"
        );
        for r in &group {
            let eta = r["eta"].as_f64().unwrap();
            let gap = r["fs_gap"].as_f64().unwrap();
            if eta < threshold {
                assert!(gap <= 0.0, "{lambda_s} {eta}");
            }
        }
    }
}

#[test]
fn slope_sweep_narrows_if_gap() {
    let o = pouw(&["sweep", "--config", &sample("sweep_slope.toml")]);
    let (h, rows) = csv_rows(std::str::from_utf8(&o.stdout).unwrap());
    let g = col(&h, "if_gap");
    let gaps: Vec<f64> = rows.iter().map(|r| r[g].parse().unwrap()).collect();
    assert_eq!(gaps.len(), 21);
    assert!(gaps.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn sweep_with_simulation_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.toml",
        &format!("[axes]\nlambda_s = [0.2, 0.4]\np0 = [0.05]\nq0 = [0.02]\n[simulation]\nrounds = 20000\n{REWARD}"),
    );
    let o = pouw(&["sweep", "--config", &cfg, "--jobs", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = csv_rows(std::str::from_utf8(&o.stdout).unwrap());
    let first_sim = col(&h, "sim_fs_gap_mean");
    assert!(col(&h, "mu") < first_sim && first_sim < col(&h, "fs_secure"));
    assert_eq!(rows[0][col(&h, "sim_if_gap_n")], "20000");
}

#[test]
fn region_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out: PathBuf = dir.path().join("region.csv");
    let o = pouw(&[
        "region",
        "--config",
        &sample("region.toml"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let (h, rows) = csv_rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(
        h,
        [
            "eta",
            "selfish_flat",
            "selfish_half_slope",
            "selfish_unit_slope",
            "malice",
            "longrange_bound",
            "half"
        ]
    );
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r[6] == "0.5"));
}

#[test]
fn longrange_random_walk() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "l.toml",
        "seeds = [5]\n[longrange]\ndepths = [0, 2]\ntrials = 20000\np_h = 0.6\n",
    );
    let o = pouw(&["simulate", "--config", &cfg]);
    assert!(o.status.success());
    let (h, rows) = csv_rows(std::str::from_utf8(&o.stdout).unwrap());
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r[col(&h, "within_3se")] == "1"));
    let o = pouw(&["simulate", "--config", &cfg, "--rounds", "5"]);
    assert_eq!(o.status.code(), Some(2));
}
