use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn evstation(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evstation"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = path(dir, name);
    fs::write(&p, body).unwrap();
    p
}

fn csv_rows(p: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

/// One day of PV as a bell over daylight, sampled every `step_s` seconds.
fn pv_csv(step_s: u32, days: u32) -> String {
    let mut s = String::from("timestamp_iso8601,power_kw\n");
    for i in 0..days * 86_400 / step_s {
        let t = i * step_s;
        let hour = f64::from(t % 86_400) / 3600.0;
        let p = if (6.0..20.0).contains(&hour) {
            40.0 * ((hour - 6.0) / 14.0 * std::f64::consts::PI).sin()
        } else {
            0.0
        };
        let (d, rem) = (t / 86_400, t % 86_400);
        writeln!(
            s,
            "2021-06-{:02}T{:02}:{:02}:{:02},{p:.3}",
            1 + d,
            rem / 3600,
            rem % 3600 / 60,
            rem % 60
        )
        .unwrap();
    }
    s
}

#[test]
fn simulate_writes_runs_summary_meta_and_trace() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "out");
    let o = evstation(&[
        "simulate",
        "--strategy",
        "enhanced",
        "--season",
        "june",
        "--evs-per-day",
        "10",
        "--runs",
        "4",
        "--seed",
        "3",
        "--out",
        &out,
        "--trace",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = Path::new(&out);

    let runs = csv_rows(&out.join("runs.csv"));
    assert_eq!(runs.len(), 5);
    assert_eq!(
        runs[0][..6],
        [
            "strategy",
            "season",
            "evs_per_day",
            "run",
            "seed",
            "success_rate"
        ]
    );
    assert!(runs[1..]
        .iter()
        .all(|r| r[0] == "enhanced" && r[1] == "june"));

    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("strategy,season,evs_per_day,kpi,n,aborted,mean,median"));
    assert!(summary.contains("enhanced,june,10,self_sufficiency,4,0,"));

    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["base_seed"], 3);
    assert_eq!(meta["placeholder_distributions"], true);
    assert_eq!(meta["runs_completed"], 4);

    let trace = csv_rows(&out.join("trace.csv"));
    assert_eq!(trace.len(), 14 * 1440 + 1);
    assert_eq!(trace[0][0], "minute");
    assert_eq!(trace[0].last().unwrap(), "p_grid");
}

#[test]
fn same_seed_same_bytes() {
    let dir = TempDir::new().unwrap();
    let mut bytes = Vec::new();
    for (i, workers) in ["1", "3"].into_iter().enumerate() {
        let out = path(&dir, &format!("o{i}"));
        let o = evstation(&[
            "simulate",
            "--strategy",
            "base",
            "--season",
            "november",
            "--evs-per-day",
            "20",
            "--runs",
            "6",
            "--seed",
            "11",
            "--workers",
            workers,
            "--out",
            &out,
        ]);
        assert_eq!(code(&o), 0);
        bytes.push(fs::read(Path::new(&out).join("runs.csv")).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn sweep_then_report() {
    let dir = TempDir::new().unwrap();
    let batch = write(
        &dir,
        "batch.toml",
        r#"
horizon_days = 2

[batch]
seasons = ["june", "november"]
evs_per_day = [10.0, 5.0]
runs_per_cell = 3
base_seed = 5
workers = 2
"#,
    );
    let out = path(&dir, "sweep");
    let o = evstation(&["sweep", "--batch", &batch, "--out", &out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        csv_rows(&Path::new(&out).join("runs.csv")).len(),
        1 + 2 * 2 * 2 * 3
    );

    let o = evstation(&["report", "--in", &out, "--kpi", "fec"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("season,evs_per_day,base_mean,base_q1,base_median"));
    assert!(lines[0].contains("enhanced_whisker_hi"));
    let keys: Vec<String> = lines[1..]
        .iter()
        .map(|l| l.split(',').take(2).collect::<Vec<_>>().join(","))
        .collect();
    assert_eq!(keys, ["june,5", "june,10", "november,5", "november,10"]);

    let file = path(&dir, "fec.csv");
    let o = evstation(&["report", "--in", &out, "--kpi", "fec", "--out", &file]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_to_string(file).unwrap(), text);

    let o = evstation(&["report", "--in", &out, "--kpi", "nope"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn measured_pv_at_each_cadence() {
    for step in [2, 60, 3600] {
        let dir = TempDir::new().unwrap();
        write(&dir, "pv.csv", &pv_csv(step, 1));
        let cfg = write(
            &dir,
            "run.toml",
            "horizon_days = 1\n[seasons.site]\npv_csv = \"pv.csv\"\n",
        );
        let out = path(&dir, "out");
        let o = evstation(&[
            "simulate",
            "--config",
            &cfg,
            "--strategy",
            "base",
            "--season",
            "site",
            "--evs-per-day",
            "5",
            "--out",
            &out,
        ]);
        assert_eq!(
            code(&o),
            0,
            "{step} s: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let runs = csv_rows(&Path::new(&out).join("runs.csv"));
        let col = runs[0].iter().position(|c| c == "e_pv").unwrap();
        let e_pv: f64 = runs[1][col].parse().unwrap();
        // integral of the bell: 40 kW * 14 h * 2/pi
        let exact = 40.0 * 14.0 * 2.0 / std::f64::consts::PI;
        let tol = if step == 3600 { 0.05 } else { 0.01 };
        assert!(
            (e_pv / exact - 1.0).abs() < tol,
            "{step} s: {e_pv} vs {exact}"
        );
    }
}

#[test]
fn user_distribution_tables() {
    let dir = TempDir::new().unwrap();
    write(&dir, "arr.csv", "value,density\n8,1\n18,1\n");
    write(&dir, "dur.csv", "value,density\n20,1\n40,1\n");
    write(&dir, "en.csv", "value,density\n10,1\n20,1\n");
    let cfg = write(
        &dir,
        "run.toml",
        r#"
horizon_days = 3
count_model = "fixed"
[distributions]
arrival = "arr.csv"
duration = "dur.csv"
energy = "en.csv"
"#,
    );
    let out = path(&dir, "out");
    let o = evstation(&[
        "simulate",
        "--config",
        &cfg,
        "--strategy",
        "base",
        "--season",
        "june",
        "--evs-per-day",
        "4",
        "--out",
        &out,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let meta = fs::read_to_string(Path::new(&out).join("meta.json")).unwrap();
    assert!(meta.contains("\"placeholder_distributions\": false"));
    let runs = csv_rows(&Path::new(&out).join("runs.csv"));
    let col = runs[0].iter().position(|c| c == "n_sessions").unwrap();
    let blocked = runs[0].iter().position(|c| c == "n_blocked").unwrap();
    let n: u32 = runs[1][col].parse().unwrap();
    let b: u32 = runs[1][blocked].parse().unwrap();
    assert_eq!(n + b, 12);
}

fn simulate_with(dir: &TempDir, toml: &str, season: &str) -> Output {
    let cfg = write(dir, "run.toml", toml);
    let out = path(dir, "out");
    evstation(&[
        "simulate",
        "--config",
        &cfg,
        "--strategy",
        "base",
        "--season",
        season,
        "--evs-per-day",
        "5",
        "--out",
        &out,
    ])
}

#[test]
fn configuration_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    for toml in [
        "horizon_dayz = 3\n",
        "[system]\np_r_grid = -1.0\n",
        "[system]\nsoe_min = 0.9\nsoe_max = 0.1\n",
        "horizon_days = 0\n",
        "[seasons.x]\n",
        "[distributions]\narrival = \"missing.csv\"\nduration = \"d.csv\"\nenergy = \"e.csv\"\n",
    ] {
        let o = simulate_with(&dir, toml, "june");
        assert_eq!(
            code(&o),
            2,
            "{toml}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
    }
    let o = simulate_with(&dir, "", "monsoon");
    assert_eq!(code(&o), 2);
    let o = evstation(&["sweep", "--batch", &path(&dir, "none.toml"), "--out", "x"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn bad_input_data_exits_3() {
    let cases = [
        "timestamp_iso8601,power_kw\n2021-06-01T00:00:00,1\n2021-06-01T00:00:07,1\n",
        "timestamp_iso8601,power_kw\n2021-06-01T00:00:00,1\nyesterday,1\n",
        "time,power\n2021-06-01T00:00:00,1\n",
    ];
    for body in cases {
        let dir = TempDir::new().unwrap();
        write(&dir, "pv.csv", body);
        let o = simulate_with(&dir, "[seasons.site]\npv_csv = \"pv.csv\"\n", "site");
        assert_eq!(
            code(&o),
            3,
            "{body}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }

    // one day of data for a two-day horizon
    let dir = TempDir::new().unwrap();
    write(&dir, "pv.csv", &pv_csv(60, 1));
    let o = simulate_with(
        &dir,
        "horizon_days = 2\n[seasons.site]\npv_csv = \"pv.csv\"\n",
        "site",
    );
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("pv.csv"));

    let dir = TempDir::new().unwrap();
    write(&dir, "a.csv", "value,density\n8,1\n18,-1\n");
    write(&dir, "d.csv", "value,density\n20,1\n40,1\n");
    write(&dir, "e.csv", "value,density\n10,1\n20,1\n");
    let o = simulate_with(
        &dir,
        "[distributions]\narrival = \"a.csv\"\nduration = \"d.csv\"\nenergy = \"e.csv\"\n",
        "june",
    );
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}
