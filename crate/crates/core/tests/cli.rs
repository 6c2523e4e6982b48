use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn asbec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asbec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn best_column(text: &str) -> Vec<f64> {
    text.lines()
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect()
}

#[test]
fn single_prints_one_line_per_evaluation() {
    let args = [
        "single",
        "--function",
        "sphere",
        "--config",
        "abc",
        "--seed",
        "1",
        "--budget",
        "16",
    ];
    let a = asbec(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 16);
    let best = best_column(&text);
    assert!(best.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(text.lines().next().unwrap().split(',').count(), 3);

    let b = asbec(&args);
    assert_eq!(a.stdout, b.stdout);

    let init = asbec(&["single", "--function", "sphere", "--config", "abc", "--budget", "8"]);
    assert_eq!(stdout(&init).lines().count(), 8);
}

#[test]
fn single_accepts_technology_and_mode_flags() {
    let o = asbec(&[
        "single",
        "--function",
        "levy",
        "--config",
        "abc",
        "--budget",
        "400",
        "--opposition",
        "--interpolation",
        "--mode",
        "bbb",
        "--workers",
        "4",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 400);
    let last_time: u64 = text.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(last_time, 100);

    let bad = asbec(&["single", "--function", "levy", "--config", "abc", "--interpolation"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("opposition"));
}

#[test]
fn unknown_function_exits_with_2() {
    let o = asbec(&["single", "--function", "banana", "--config", "abc"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("banana"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    fs::write(&cfg, r#"{"functions": ["banana"], "reps": 1}"#).unwrap();
    let o = asbec(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("banana"));

    let o = asbec(&["run", "--functions", "sphere,banana", "--reps", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("banana"));
}

#[test]
fn unknown_config_is_rejected() {
    let o = asbec(&["single", "--function", "sphere", "--config", "mystery"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mystery"));
}

fn read_tree(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn run_writes_traces_and_summary_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let out = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let args = |o: String| {
        vec![
            "run".to_string(),
            "--functions".into(),
            "rastrigin".into(),
            "--configs".into(),
            "abc".into(),
            "--reps".into(),
            "2".into(),
            "--budget".into(),
            "200".into(),
            "--out".into(),
            o,
        ]
    };
    let a = Command::new(env!("CARGO_BIN_EXE_asbec"))
        .args(args(out("a")))
        .output()
        .unwrap();
    assert!(a.status.success(), "{}", stderr(&a));
    let files = read_tree(&dir.path().join("a"));
    let names: Vec<&str> = files.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        [
            "rastrigin/abc/run_0.csv",
            "rastrigin/abc/run_1.csv",
            "rastrigin/abc/summary.csv"
        ]
    );
    let run0 = String::from_utf8(files[0].1.clone()).unwrap();
    assert_eq!(run0.lines().next(), Some("eval,time,best_f"));
    assert_eq!(run0.lines().count(), 201);
    // 17 significant digits
    let v = run0.lines().nth(1).unwrap().rsplit(',').next().unwrap();
    assert_eq!(v.split('e').next().unwrap().replace(['-', '.'], "").len(), 17);
    assert!(stderr(&a).contains("rastrigin abc"));

    let b = Command::new(env!("CARGO_BIN_EXE_asbec"))
        .args(args(out("b")))
        .env("ASBEC_THREADS", "1")
        .output()
        .unwrap();
    assert!(b.status.success());
    assert_eq!(files, read_tree(&dir.path().join("b")));
}

#[test]
fn run_and_compare_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let results = dir.path().join("res");
    let cfg = dir.path().join("exp.json");
    fs::write(
        &cfg,
        format!(
            r#"{{
                "configs": [{{"label": "abc"}}, {{"label": "plain", "tech": {{}}}}, {{"label": "asbec"}}],
                "reps": 3,
                "budget": 160,
                "out": {:?}
            }}"#,
            results.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = asbec(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));

    let o = asbec(&["compare", "--out", results.to_str().unwrap(), "--at-fe", "160"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    // plain is ABC under another label: every gain is exactly 1
    let plain = text.lines().find(|l| l.starts_with("plain,")).unwrap();
    assert!(plain.ends_with(",0,0"), "{plain}");
    assert!(text.lines().any(|l| l.starts_with("asbec,abc,160,")));

    let cmp = results.join("compare").join("plain_vs_abc");
    for f in ["gain_fe.csv", "gain_time.csv", "mlg.csv"] {
        assert!(cmp.join(f).is_file(), "{f}");
    }
    let mlg = fs::read_to_string(cmp.join("mlg.csv")).unwrap();
    assert_eq!(mlg.lines().next(), Some("config,reference,axis_type,axis_value,mlg"));
    assert!(mlg
        .lines()
        .skip(1)
        .all(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap() == 0.0));
    let gain = fs::read_to_string(cmp.join("gain_time.csv")).unwrap();
    assert_eq!(
        gain.lines().next(),
        Some("function,config,axis_type,axis_value,median,mean,std,G,mlg_contribution")
    );
    assert_eq!(gain.lines().count(), 1 + 10 * 101);

    let missing = asbec(&["compare", "--out", results.to_str().unwrap(), "--reference", "nobody"]);
    assert_ne!(missing.status.code(), Some(0));
    assert!(stderr(&missing).contains("nobody"));
}

#[test]
fn listings() {
    let f = asbec(&["list-functions"]);
    assert!(f.status.success());
    let text = stdout(&f);
    assert_eq!(text.lines().count(), 10);
    assert!(text.lines().next().unwrap().starts_with("sphere\tm=50"));

    let c = asbec(&["list-configs"]);
    let text = stdout(&c);
    for label in ["abc", "asbec", "multi-swarm-asbec", "bbb-asbec"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{label}\t"))), "{label}");
    }
}

#[test]
fn bad_thread_count_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_asbec"))
        .args(["list-functions"])
        .env("ASBEC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
