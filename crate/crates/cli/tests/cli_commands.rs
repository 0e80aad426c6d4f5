use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command as Process;

use gofi::config::Config;
use gofi::indicators::{GofiReading, IndicatorKind};
use gofi::ingestion::parse_snapshots;
use gofi::reference::reference_intervals;
use gofi::report::{read_results, RowStatus};
use gofi_cli::intervals::{read_intervals, write_intervals, IntervalRow, IntervalTable};
use gofi_cli::{
    cmd_compute, cmd_regress, cmd_report, cmd_simulate, plot_path, CliError, ComputeArgs, RegressArgs, ReportArgs,
    SimulateArgs,
};

const SMALL: &str = r#"
boundary_date = "2021-03-31"

[batch]
instruments = 3
start_date = "2021-03-31"
days = 2
"#;

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new(config: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("config.toml"), config).unwrap();
        Workspace { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn config(&self) -> Option<PathBuf> {
        Some(self.path("config.toml"))
    }

    fn simulate(&self, output: &str) -> Result<String, CliError> {
        let mut log = Vec::new();
        cmd_simulate(
            &SimulateArgs {
                config: self.config(),
                output: self.path(output),
                seed: None,
            },
            &mut log,
        )?;
        Ok(String::from_utf8(log).unwrap())
    }

    fn compute(
        &self,
        input: &str,
        output: &str,
        interval: Option<u32>,
        kinds: Option<Vec<IndicatorKind>>,
    ) -> Result<String, CliError> {
        let mut log = Vec::new();
        cmd_compute(
            &ComputeArgs {
                config: self.config(),
                input: self.path(input),
                output: self.path(output),
                kinds,
                interval,
                gofi_reading: None,
            },
            &mut log,
        )?;
        Ok(String::from_utf8(log).unwrap())
    }

    fn regress(&self, input: &str, output: &str, boundary: Option<&str>) -> Result<String, CliError> {
        let mut log = Vec::new();
        cmd_regress(
            &RegressArgs {
                config: self.config(),
                input: self.path(input),
                output: self.path(output),
                boundary_date: boundary.map(|b| b.parse().unwrap()),
                interval: None,
                oos_mode: None,
                r2: None,
            },
            &mut log,
        )?;
        Ok(String::from_utf8(log).unwrap())
    }

    fn report(&self, input: &str, output: Option<&str>) -> Result<String, CliError> {
        let mut log = Vec::new();
        cmd_report(
            &ReportArgs {
                input: self.path(input),
                output: output.map(|o| self.path(o)),
            },
            &mut log,
        )?;
        Ok(String::from_utf8(log).unwrap())
    }
}

fn header(path: &Path) -> Vec<String> {
    let text = fs::read_to_string(path).unwrap();
    text.lines().next().unwrap().split(',').map(String::from).collect()
}

#[test]
fn simulate_reports_and_repeats_exactly() {
    let ws = Workspace::new(SMALL);
    let log = ws.simulate("a.csv").unwrap();
    assert!(log.contains("seed 20210401"));
    assert!(log.contains("SIM03: seed 20210403"));
    assert!(log.contains("exhaustion gaps 0"));
    ws.simulate("b.csv").unwrap();
    assert_eq!(fs::read(ws.path("a.csv")).unwrap(), fs::read(ws.path("b.csv")).unwrap());
    assert_eq!(header(&ws.path("a.csv")).len(), 3 + 4 * 5);
}

#[test]
fn simulate_rejects_cancellations_outpacing_limits() {
    let ws = Workspace::new("[simulation]\nrate_limit = 2.0\nrate_cancel = 2.0\n");
    let err = ws.simulate("x.csv").unwrap_err();
    assert!(err.to_string().contains("invalid simulator config"), "{err}");
    assert!(!ws.path("x.csv").exists());
}

#[test]
fn compute_schema_and_kinds() {
    let ws = Workspace::new(SMALL);
    ws.simulate("snap.csv").unwrap();
    ws.compute("snap.csv", "all.csv", Some(30), None).unwrap();
    let cols = header(&ws.path("all.csv"));
    assert_eq!(
        cols,
        [
            "instrument",
            "interval_s",
            "interval_start",
            "delta_mid",
            "OFI",
            "GOFI",
            "log-OFI",
            "log-GOFI"
        ]
    );
    ws.compute(
        "snap.csv",
        "two.csv",
        Some(30),
        Some(vec![IndicatorKind::LogGofi, IndicatorKind::Ofi]),
    )
    .unwrap();
    assert_eq!(header(&ws.path("two.csv"))[4..], ["log-GOFI", "OFI"]);

    let table = read_intervals(fs::File::open(ws.path("all.csv")).unwrap()).unwrap();
    // 239 + 233 complete 30 s intervals per day, two days, three instruments.
    assert_eq!(table.rows.len(), 3 * 2 * 472);
}

#[test]
fn compute_matches_reference_file() {
    let ws = Workspace::new(SMALL);
    ws.simulate("snap.csv").unwrap();
    ws.compute("snap.csv", "iv.csv", None, None).unwrap();

    let config = Config::load(ws.path("config.toml")).unwrap();
    let parsed = parse_snapshots(ws.path("snap.csv"), &config.session(30).unwrap()).unwrap();
    let mut rows = Vec::new();
    for day in &parsed.days {
        for &len in &config.interval_lengths {
            let spec = config.session(len).unwrap();
            let midnight = day.date.and_hms_opt(0, 0, 0).unwrap();
            for r in reference_intervals(&day.snapshots, &spec, &IndicatorKind::ALL, GofiReading::Symmetric) {
                rows.push(IntervalRow {
                    instrument: day.instrument.clone(),
                    interval_s: len,
                    start: midnight + chrono::Duration::milliseconds(r.start_ms),
                    delta_mid: gofi::lob::HalfTicks(r.delta_mid_half_ticks),
                    values: r.values,
                });
            }
        }
    }
    rows.sort_by(|a, b| (&a.instrument, a.interval_s, a.start).cmp(&(&b.instrument, b.interval_s, b.start)));
    let mut expected = Vec::new();
    write_intervals(
        &mut expected,
        &IntervalTable {
            kinds: IndicatorKind::ALL.to_vec(),
            rows,
        },
    )
    .unwrap();
    assert_eq!(fs::read(ws.path("iv.csv")).unwrap(), expected);
}

#[test]
fn constant_book_gives_zero_indicators() {
    let ws = Workspace::new("");
    let mut text = String::from("instrument,date,time,bp1,bq1,ap1,aq1\n");
    let spec = Config::default().session(30).unwrap();
    for t in gofi::ingestion::session_slots(&spec) {
        let s = t / 1000;
        text.push_str(&format!(
            "C,2021-03-30,{:02}:{:02}:{:02},9.99,100,10.01,80\n",
            s / 3600,
            s / 60 % 60,
            s % 60
        ));
    }
    fs::write(ws.path("flat.csv"), text).unwrap();
    ws.compute("flat.csv", "iv.csv", Some(60), None).unwrap();
    let table = read_intervals(fs::File::open(ws.path("iv.csv")).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 119 + 116);
    for row in &table.rows {
        assert_eq!(row.delta_mid.0, 0);
        assert!(row.values.iter().all(|v| *v == 0.0));
    }
}

#[test]
fn compute_reports_excluded_days() {
    let ws = Workspace::new("");
    let text = "instrument,date,time,bp1,bq1,ap1,aq1\n\
                L,2021-03-30,09:30:00,9.99,100,,\n\
                L,2021-03-30,09:30:03,9.99,100,10.01,5\n";
    fs::write(ws.path("locked.csv"), text).unwrap();
    let err = ws.compute("locked.csv", "iv.csv", None, None).unwrap_err();
    assert!(matches!(err, CliError::NoData(_)), "{err}");
}

#[test]
fn regress_accounts_for_every_instrument() {
    let ws = Workspace::new(SMALL);
    ws.simulate("snap.csv").unwrap();
    ws.compute("snap.csv", "iv.csv", None, None).unwrap();
    let log = ws.regress("iv.csv", "res.csv", None).unwrap();
    assert!(log.contains("0 degenerate"), "{log}");
    let records = read_results(fs::File::open(ws.path("res.csv")).unwrap()).unwrap();
    // 3 instruments x 4 kinds x 3 interval lengths, plus one average per
    // (kind, interval length).
    assert_eq!(records.len(), 36 + 12);
    assert!(ws.path("res_plot.csv").exists());
    assert_eq!(plot_path(&ws.path("res.csv")), ws.path("res_plot.csv"));

    let text = ws.report("res.csv", Some("table.tsv")).unwrap();
    for interval in ["30 s", "60 s", "300 s"] {
        assert!(text.contains(interval));
    }
    let tsv = fs::read_to_string(ws.path("table.tsv")).unwrap();
    // Header, then 3 instrument rows and one average row per interval.
    assert_eq!(tsv.lines().count(), 1 + 3 * 4);
    assert_eq!(tsv.lines().filter(|l| l.contains("\tAverage\t")).count(), 3);
}

#[test]
fn degenerate_instrument_is_flagged_not_fatal() {
    let ws = Workspace::new("");
    let day = |d: u32, h: u32, m: u32| {
        chrono::NaiveDate::from_ymd_opt(2021, 3, d)
            .unwrap()
            .and_hms_opt(h, m, 0)
            .unwrap()
    };
    let mut rows = Vec::new();
    for (inst, out_zero) in [("A", false), ("Z", true)] {
        for (i, date) in [30u32, 30, 30, 31, 31, 31].into_iter().enumerate() {
            let x = [3.0, -2.0, 5.0, 1.0, -4.0, 2.0][i];
            let zero = out_zero && date == 31;
            rows.push(IntervalRow {
                instrument: inst.into(),
                interval_s: 30,
                start: day(date, 10, i as u32),
                delta_mid: gofi::lob::HalfTicks([1, -1, 3, 0, -2, 2][i]),
                values: vec![if zero { 0.0 } else { x }],
            });
        }
    }
    let mut buf = Vec::new();
    write_intervals(
        &mut buf,
        &IntervalTable {
            kinds: vec![IndicatorKind::Ofi],
            rows,
        },
    )
    .unwrap();
    fs::write(ws.path("iv.csv"), buf).unwrap();

    let log = ws.regress("iv.csv", "res.csv", Some("2021-03-30")).unwrap();
    assert!(log.contains("Z OFI at 30 s: degenerate"), "{log}");
    let records = read_results(fs::File::open(ws.path("res.csv")).unwrap()).unwrap();
    let z = records.iter().find(|r| r.instrument == "Z").unwrap();
    assert_eq!(z.status, RowStatus::Degenerate);
    assert_eq!(z.note, "regressor is identically zero");
    let a = records.iter().find(|r| r.instrument == "A").unwrap();
    assert_eq!(a.status, RowStatus::Ok);

    let log = {
        let mut log = Vec::new();
        cmd_regress(
            &RegressArgs {
                config: None,
                input: ws.path("iv.csv"),
                output: ws.path("refit.csv"),
                boundary_date: Some("2021-03-30".parse().unwrap()),
                interval: None,
                oos_mode: Some("refit".into()),
                r2: None,
            },
            &mut log,
        )
        .unwrap();
        String::from_utf8(log).unwrap()
    };
    assert!(log.contains("1 degenerate"), "{log}");
    let records = read_results(fs::File::open(ws.path("refit.csv")).unwrap()).unwrap();
    let z = records.iter().find(|r| r.instrument == "Z").unwrap();
    assert_eq!(z.status, RowStatus::Degenerate);
    let avg = records.iter().find(|r| r.status == RowStatus::Average).unwrap();
    assert_eq!(avg.note, "1 of 2 instruments");
    ws.report("refit.csv", None).unwrap();
}

#[test]
fn regress_without_holdout_is_fatal() {
    let ws = Workspace::new(SMALL);
    ws.simulate("snap.csv").unwrap();
    ws.compute("snap.csv", "iv.csv", Some(300), Some(vec![IndicatorKind::Ofi]))
        .unwrap();
    let err = ws.regress("iv.csv", "res.csv", Some("2021-12-31")).unwrap_err();
    assert!(matches!(err, CliError::EmptyPartition(_)));
}

#[test]
fn report_rejects_empty_and_tampered_results() {
    let ws = Workspace::new(SMALL);
    fs::write(
        ws.path("empty.csv"),
        "instrument,interval_s,kind,status,beta,intercept,r2_in,r2_out,r2_out_refit,n_in,n_out,r2_mode,oos_mode,note\n",
    )
    .unwrap();
    assert!(matches!(
        ws.report("empty.csv", None),
        Err(CliError::Report(gofi::report::ReportError::Empty))
    ));

    ws.simulate("snap.csv").unwrap();
    ws.compute("snap.csv", "iv.csv", Some(60), None).unwrap();
    ws.regress("iv.csv", "res.csv", None).unwrap();
    let text = fs::read_to_string(ws.path("res.csv")).unwrap();
    let tampered: Vec<String> = text
        .lines()
        .map(|l| {
            if l.starts_with("Average,60,GOFI,") {
                let mut f: Vec<&str> = l.split(',').collect();
                f[6] = "0.5";
                f.join(",")
            } else {
                l.to_string()
            }
        })
        .collect();
    fs::write(ws.path("bad.csv"), tampered.join("\n") + "\n").unwrap();
    let err = ws.report("bad.csv", None).unwrap_err();
    assert!(err.to_string().contains("GOFI_in"), "{err}");
}

#[test]
fn binary_exit_codes() {
    let ws = Workspace::new(SMALL);
    let bin = env!("CARGO_BIN_EXE_gofi");
    let out = Process::new(bin)
        .arg("report")
        .arg("--input")
        .arg(ws.path("missing.csv"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.csv"));

    let out = Process::new(bin).args(["compute", "--kinds", "XOFI"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let bad = ws.path("bad.toml");
    fs::write(&bad, "[simulation]\nrate_cancel = 7.0\n").unwrap();
    let out = Process::new(bin)
        .args(["simulate", "--output"])
        .arg(ws.path("s.csv"))
        .arg("--config")
        .arg(&bad)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid simulator config"));

    let out = Process::new(bin)
        .args(["simulate", "--seed", "7", "--output"])
        .arg(ws.path("s.csv"))
        .arg("--config")
        .arg(ws.path("config.toml"))
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("seed 7"));
}
