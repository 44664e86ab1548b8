use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn zerodetect(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zerodetect"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn kerdock_file(dir: &TempDir, extra: &[&str]) {
    let mut args = vec!["gen-matrix", "--family", "kerdock", "--m", "3", "--out", "k.cmat"];
    args.extend_from_slice(extra);
    assert_eq!(zerodetect(&args, dir.path()).status.code(), Some(0));
}

#[test]
fn gen_matrix_writes_header() {
    let dir = TempDir::new().unwrap();
    kerdock_file(&dir, &[]);
    let text = fs::read_to_string(dir.path().join("k.cmat")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("16 256"));
    let meta = lines.next().unwrap();
    assert!(meta.starts_with("# meta: family=kerdock m=3"));
    assert!(meta.contains("polynomial="));
    assert_eq!(lines.count(), 16);
}

#[test]
fn gen_matrix_bernoulli_is_seeded() {
    let dir = TempDir::new().unwrap();
    let run = |seed: &str, out: &str| {
        let o = zerodetect(
            &["gen-matrix", "--family", "bernoulli", "--rows", "8", "--cols", "32", "--seed", seed, "--out", out],
            dir.path(),
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        fs::read(dir.path().join(out)).unwrap()
    };
    assert_eq!(run("5", "a.cmat"), run("5", "b.cmat"));
    assert_ne!(run("5", "a.cmat"), run("6", "c.cmat"));
}

#[test]
fn no_arguments_prints_usage() {
    let dir = TempDir::new().unwrap();
    let o = zerodetect(&[], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn error_codes() {
    let dir = TempDir::new().unwrap();
    kerdock_file(&dir, &[]);

    let o = zerodetect(&["frobnicate"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("ERROR UnknownSubcommand:"));

    let o = zerodetect(&["detect", "--matrix", "k.cmat", "--yinline", "1,2", "--theta", "0"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("ERROR BadValue:"), "{}", stderr(&o));

    let o = zerodetect(&["detect", "--matrix", "k.cmat", "--theta", "1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("ERROR MissingFlag:"));

    let o = zerodetect(&["gen-matrix", "--family", "kerdock", "--out", "x.cmat"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("ERROR MissingFlag:"));

    let o = zerodetect(&["gen-matrix", "--family", "kerdock", "--m", "2", "--out", "x.cmat"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(!dir.path().join("x.cmat").exists());

    let o = zerodetect(&["coherence", "--matrix", "missing.cmat"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("ERROR IoError:"));

    let o = zerodetect(&["detect", "--matrix", "k.cmat", "--yinline", "1,2,3", "--theta", "1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn detect_outputs_ranked_csv() {
    let dir = TempDir::new().unwrap();
    kerdock_file(&dir, &["--group-size", "8"]);
    let y = (1..=16).map(|v| format!("{v}-0.5j")).collect::<Vec<_>>().join(",");
    let o = zerodetect(&["detect", "--matrix", "k.cmat", "--yinline", &y, "--theta", "3", "--out", "d.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("d.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "rank,index,score");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("1,"));

    fs::write(dir.path().join("y.txt"), y.replace(',', " ")).unwrap();
    let o = zerodetect(&["detect", "--matrix", "k.cmat", "--y", "y.txt", "--theta", "2", "--group"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 3);
}

#[test]
fn coherence_and_bounds_pipeline() {
    let dir = TempDir::new().unwrap();
    kerdock_file(&dir, &["--group-size", "8"]);
    let o = zerodetect(
        &["coherence", "--matrix", "k.cmat", "--stoc", "1,0.5,200,e1", "--seed", "3", "--out", "c.csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert!(text.starts_with("stat,value,arg_i,arg_j\n"));
    assert!(text.contains("\nmu,0.25,"));
    assert!(text.contains("\nmu_g,"));
    assert!(text.contains("\nstoc_delta_hat,0,"));

    fs::write(dir.path().join("b.cfg"), "sigma = 1\nmagnitudes = 900, 800, 700\ntheta = 4\n# group part\ngroup_norms = 2000\n").unwrap();
    let o = zerodetect(&["bounds", "--config", "b.cfg", "--coherence", "c.csv", "--out", "b.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert!(text.starts_with("quantity,value,valid\n"));
    for q in ["epsilon0", "k_bound", "alpha", "pe_bound", "fdp_bound", "tau_g", "chi2_tail_bound", "group_fdp_bound"] {
        assert!(text.contains(&format!("\n{q},")), "missing {q}");
    }
    assert!(text.contains("\nlar_sum,3,true"));

    fs::write(dir.path().join("bad.cfg"), "sigma = 1\nmagnitudes = 1\nsnr = 3\n").unwrap();
    let o = zerodetect(&["bounds", "--config", "bad.cfg", "--coherence", "c.csv"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn stoc_subcommand() {
    let dir = TempDir::new().unwrap();
    kerdock_file(&dir, &[]);
    let args = ["stoc", "--matrix", "k.cmat", "--k", "4", "--epsilon", "0.5", "--trials", "300", "--z", "gaussian-seeded", "--seed", "9"];
    let a = zerodetect(&args, dir.path());
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let b = zerodetect(&args, dir.path());
    assert_eq!(a.stdout, b.stdout);
    let out = String::from_utf8_lossy(&a.stdout);
    assert!(out.starts_with("stat,value\n"));
    assert!(out.contains("stoc_trials,300"));
}

#[test]
fn simulate_is_deterministic_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("sim.cfg"),
        "# small fig 3 run\nk_grid = 4, 32\ntheta_grid = 1, 4\ntrials = 50\ndetectors = zd_ost, ost_topk, ost_topk_full_support\nmaster_seed = 5\n",
    )
    .unwrap();
    let run = |threads: &str, out: &str| {
        let o = zerodetect(&["--threads", threads, "simulate", "--config", "sim.cfg", "--out-dir", out, "--figure", "3"], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    };
    run("1", "a");
    run("4", "b");
    let files = ["summary.csv", "trials.csv", "fig3_manifest.csv", "fig3_zd_ost_theta1.csv", "fig3_ost_topk_full_support_thetak_fdp.csv"];
    for f in files {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        assert_eq!(a, fs::read(dir.path().join("b").join(f)).unwrap(), "{f}");
    }
    let curve = fs::read_to_string(dir.path().join("a/fig3_zd_ost_theta1.csv")).unwrap();
    assert!(curve.starts_with("k,value,ci_lo,ci_hi\n4,"));
}

#[test]
fn simulate_rejects_bad_configs() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("u.cfg"), "trials = 5\ncolour = blue\n").unwrap();
    let o = zerodetect(&["simulate", "--config", "u.cfg", "--out-dir", "o"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("colour"));
    fs::write(dir.path().join("f.cfg"), "k_grid = 2\ntheta_grid = 1\ntrials = 3\n").unwrap();
    let o = zerodetect(&["simulate", "--config", "f.cfg", "--out-dir", "o", "--figure", "4a"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("incomplete report"));
    let o = zerodetect(&["simulate", "--config", "nope.cfg", "--out-dir", "o"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn in_process_entry_point() {
    assert_eq!(zerodetect::cli::run(["zerodetect", "no-such-command"]), 1);
    assert_eq!(zerodetect::cli::run(["zerodetect", "--help"]), 0);
}
