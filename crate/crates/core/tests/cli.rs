use std::process::{Command, Output};

fn pnc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pnc")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn chain_reports_group_count() {
    let o = pnc(&["chain", "--nodes", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("# num_groups: 2"));
    assert!(text.contains("# ts_s: 3"));
    assert!(text.lines().any(|l| l == "phase,step,group,left_node,right_node,start_s,end_s"));
}

#[test]
fn chain_rejects_two_nodes() {
    let o = pnc(&["chain", "--nodes", "2"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("N ≥ 3 required"));
}

#[test]
fn infeasible_chain_names_the_inequality() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("chain.toml");
    std::fs::write(&cfg, "num_nodes = 12\nbg_sync_time = 2.0\nperiod = 10.0\n").unwrap();
    let o = pnc(&["chain", "--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("(N−2)·Δt_BG = 20 s ≥ T_p = 10 s"), "{err}");
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ber.toml");
    std::fs::write(
        &cfg,
        "scenario = \"time_unsync\"\noffset_range = 0.2\nsnr_grid_db = [2.0, 6.0]\nsamples_per_point = 4000\n",
    )
    .unwrap();
    let out = dir.path().join("ber.csv");
    let o = pnc(&[
        "ber",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "3",
        "--workers",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# figure: 10"));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "snr_db,scenario,ber,num_bits,num_errors,seed");
    assert_eq!(rows.len(), 3);
    for row in &rows[1..] {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f[1], "time_unsync(0.2)");
        let (bits, errors): (u64, u64) = (f[3].parse().unwrap(), f[4].parse().unwrap());
        assert_eq!(bits, 4000);
        assert_eq!(f[2].parse::<f64>().unwrap(), errors as f64 / bits as f64);
        assert_eq!(f[5], "3");
    }
}

#[test]
fn mi_csv_schema() {
    let o = pnc(&["mi", "--scenario", "phase_unsync", "--samples", "2000", "--snr", "-2,3", "--workers", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("# figure: 11"));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "snr_db,scenario,mi_bits_per_dim,num_samples,num_workers,seed");
    assert!(rows[1].starts_with("-2,phase_unsync,"));
    assert!(rows[1].ends_with(",2000,2,1"));
}

#[test]
fn rejects_bad_statistical_configs() {
    for args in [
        vec!["ber", "--samples", "10"],
        vec!["ber", "--snr", "3,1"],
        vec!["mi", "--scenario", "time_unsync", "--offset-range", "0.8"],
        vec!["ber", "--workers", "0"],
    ] {
        let o = pnc(&args);
        assert!(!o.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
    }
    assert!(!pnc(&["ber", "--scenario", "sideways"]).status.success());
}

#[test]
fn throughput_table() {
    let text = stdout(&pnc(&["throughput"]));
    assert!(text.contains("traditional,4,1\n"));
    assert!(text.contains("straightforward_nc,3,1.3333333333333333\n"));
    assert!(text.contains("pnc,2,2\n"));
}

#[test]
fn penalty_footer_lists_summaries() {
    let text = stdout(&pnc(&["penalty"]));
    for key in [
        "# avg_phase_penalty_db: ",
        "# avg_sinr_penalty_db: ",
        "# worst_sinr_penalty_db: ",
        "# sir_1d_traditional_db: ",
        "# sir_1d_pnc_db: 15.3",
        "# sir_1d_pnc_minus_avg_phase_db: ",
    ] {
        assert!(text.contains(key), "{key}");
    }
    assert!(!text.contains('\r'));
}
