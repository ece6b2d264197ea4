use std::path::Path;
use std::process::{Command, Output};

const HEADER: &str = "kind,K,beta,M,rho_dB,precoder,solver,mean_rate,rel_error,time_s,unstable_flag,seed";

fn cfnet(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfnet"))
        .args(args)
        .current_dir(dir)
        .env_remove("CFNET_SEED")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const TINY: &str = r#"{"k_list": [24, 48], "beta_list": [2.0], "num_subnetworks_M": 2, "network_realizations": 2, "mc_realizations": 3}"#;

#[test]
fn sweep_writes_csv_and_matching_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), TINY);
    let out = dir.path().join("out");
    let o = cfnet(
        &[
            "sweep",
            "--experiment",
            "fig2",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("fig2.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), HEADER);
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r[1].parse().unwrap(), r[7].parse().unwrap()))
        .collect();
    for r in &rows {
        assert!(!r[9].is_empty(), "time_s recorded by default");
        match r[6] {
            "mc" => assert!(r[8].is_empty()),
            "svt" => assert!(r[8].parse::<f64>().unwrap().is_finite()),
            other => panic!("unexpected solver {other}"),
        }
    }

    let svg = std::fs::read_to_string(out.join("fig2.svg")).unwrap();
    assert!(svg.starts_with("<?xml") && svg.contains(r#"version="1.1""#));
    let attr = |s: &str, name: &str| -> f64 {
        let start = s.find(&format!("{name}=\"")).unwrap() + name.len() + 2;
        s[start..start + s[start..].find('"').unwrap()].parse().unwrap()
    };
    let circles: Vec<&str> = svg.split("<circle").skip(1).collect();
    assert_eq!(circles.len(), points.len());
    for c in circles {
        let p = (attr(c, "data-x"), attr(c, "data-y"));
        assert!(points.contains(&p), "{p:?} not in CSV");
    }
}

#[test]
fn every_figure_family_emits_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"k_list": [24], "beta_list": [3.0], "rho_db_list": [0.0, 40.0], "num_subnetworks_M": 2, "network_realizations": 1, "mc_realizations": 2}"#,
    );
    for fig in ["fig2", "fig3", "fig4", "fig5"] {
        let out = dir.path().join(fig);
        let o = cfnet(
            &[
                "sweep",
                "--experiment",
                fig,
                "--config",
                &cfg,
                "--out",
                out.to_str().unwrap(),
            ],
            dir.path(),
        );
        assert!(o.status.success(), "{fig}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(out.join(format!("{fig}.csv")).exists());
        assert!(out.join(format!("{fig}.svg")).exists());
    }
    let fig5 = std::fs::read_to_string(dir.path().join("fig5/fig5.csv")).unwrap();
    assert!(fig5.lines().skip(1).all(|l| l.contains(",zf,")));
    let fig4 = std::fs::read_to_string(dir.path().join("fig4/fig4.csv")).unwrap();
    assert_eq!(fig4.lines().filter(|l| l.contains(",original,")).count(), 2);
    for l in fig4.lines().filter(|l| l.contains(",svt,")) {
        assert!(l.ends_with(",0,1"), "svt rows are never flagged: {l}");
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), TINY);
    let mut outputs = Vec::new();
    for threads in ["1", "2", "5"] {
        let out = dir.path().join(threads);
        let o = cfnet(
            &[
                "sweep",
                "--experiment",
                "fig3",
                "--config",
                &cfg,
                "--out",
                out.to_str().unwrap(),
                "--threads",
                threads,
                "--no-timing",
            ],
            dir.path(),
        );
        assert!(o.status.success());
        outputs.push(std::fs::read(out.join("fig3.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn estimates_compose_into_relative_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"total_users_K": 48, "num_subnetworks_M": 2, "network_realizations": 2, "mc_realizations": 20}"#,
    );
    let mut means = Vec::new();
    for method in ["mc", "sere"] {
        let o = cfnet(&["estimate", "--method", method, "--config", &cfg], dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["method"], method);
        assert_eq!(v["networks"].as_array().unwrap().len(), 2);
        let per_user = &v["networks"][0]["per_user"];
        assert_eq!(per_user.as_array().unwrap().len(), 2);
        means.push(v["mean_rate"].as_f64().unwrap());
    }
    let rel = (means[1] - means[0]).abs() / means[0];
    assert!(rel.is_finite() && rel < 0.5);
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"total_users_K": 16, "num_subnetworks_M": 2, "seed": 3}"#,
    );
    let seed_of = |o: Output| {
        assert!(o.status.success());
        serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap()["seed"]
            .as_u64()
            .unwrap()
    };
    assert_eq!(seed_of(cfnet(&["generate", "--config", &cfg], dir.path())), 3);
    let with_env = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_cfnet"))
            .args(args)
            .env("CFNET_SEED", "8")
            .output()
            .unwrap()
    };
    assert_eq!(seed_of(with_env(&["generate", "--config", &cfg])), 8);
    assert_eq!(seed_of(with_env(&["generate", "--config", &cfg, "--seed", "9"])), 9);
}

#[test]
fn generate_dumps_channel() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"total_users_K": 16, "num_subnetworks_M": 2}"#);
    let dump = dir.path().join("h.bin");
    let o = cfnet(
        &["generate", "--config", &cfg, "--dump-channel", dump.to_str().unwrap()],
        dir.path(),
    );
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["topology"]["user_positions"].as_array().unwrap().len(), 16);
    let (mm, blocks) = cfnet::dump::read_channel(std::fs::File::open(&dump).unwrap()).unwrap();
    assert_eq!(mm, 2);
    assert_eq!(blocks.len(), 4);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write_config(dir.path(), r#"{"total_users_K": 32, "num_subnetworks_M": 2}"#);
    assert_eq!(cfnet(&["validate", "--config", &ok], dir.path()).status.code(), Some(0));

    let missing = dir.path().join("nope.json");
    assert_eq!(
        cfnet(&["validate", "--config", missing.to_str().unwrap()], dir.path())
            .status
            .code(),
        Some(2)
    );

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"near_threshold_d0": 80.0}"#).unwrap();
    let o = cfnet(
        &["estimate", "--method", "sere", "--config", bad.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());

    let zf = dir.path().join("zf.json");
    std::fs::write(&zf, r#"{"beta_list": [1.0, 2.0]}"#).unwrap();
    let o = cfnet(
        &[
            "sweep",
            "--experiment",
            "fig5",
            "--config",
            zf.to_str().unwrap(),
            "--out",
            "x",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("beta > 1"));

    let o = cfnet(
        &["sweep", "--experiment", "fig9", "--config", &ok, "--out", "x"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(cfnet(&["estimate", "--config", &ok], dir.path()).status.code(), Some(2));
}
