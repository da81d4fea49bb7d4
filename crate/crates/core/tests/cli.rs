use std::io::Write;
use std::process::{Command, Output, Stdio};

fn fivenum(args: &[&str]) -> Output {
    run(args, None, &[])
}

fn run(args: &[&str], stdin: Option<&str>, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fivenum"));
    cmd.args(args)
        .env_remove("FIVENUM_SEED")
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.stdin(if stdin.is_some() {
        Stdio::piped()
    } else {
        Stdio::null()
    });
    let mut child = cmd.spawn().unwrap();
    if let Some(text) = stdin {
        child
            .stdin
            .take()
            .unwrap()
            .write_all(text.as_bytes())
            .unwrap();
    }
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn table_csv() {
    let o = fivenum(&["table", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 61);
    assert_eq!(text.lines().nth(10), Some("10,41,7.1472,3.3049"));

    let one = stdout(&fivenum(&["table", "--q-max", "1", "--format", "csv"]));
    assert_eq!(one.lines().nth(1), Some("1,5,2.7933,6.4030"));
    assert_eq!(one.lines().count(), 2);
    assert!(!fivenum(&["table", "--q-max", "0"]).status.success());

    let text = stdout(&fivenum(&["table", "--q-max", "3"]));
    assert!(text.contains("2.7933") && text.contains("4.8952"));
}

#[test]
fn convert_examples() {
    let input = "study_id,n,a,q1,m,q3,b,iqr\n\
                 capanni_bmi_ctrl,14,22.8,,,,34.3,4\n\
                 flat,30,7,7,7,7,7,\n";
    let o = run(&["convert", "--method", "shi"], Some(input), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "study_id,n,scenario,mean_est,mean_method,sd_est,sd_method,weight_used"
    );
    let cells: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(cells[2], "S3");
    assert!((cells[5].parse::<f64>().unwrap() - 3.348).abs() < 2e-3);
    assert_eq!(cells[6], "shi_sd");
    assert_eq!(
        lines[2],
        "flat,30,S3,7.00000000,luo_mean,0,shi_sd,0.649886787"
    );

    let o = run(
        &["convert", "--method", "hozo"],
        Some("study_id,n,a,q1,m,q3,b\nx,50,0,,5,,12\n"),
        &[],
    );
    assert!(o.status.success());
    assert_eq!(
        stdout(&o).lines().nth(1),
        Some("x,50,S1,,,3.00000000,hozo_sd,")
    );
}

#[test]
fn convert_errors_go_to_sidecar_and_fail_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    let output = dir.path().join("out.csv");
    let errors = dir.path().join("err.csv");
    std::fs::write(
        &input,
        "study_id,n,a,q1,m,q3,b\nok,20,1,2,3,4,5\nbad,20,1,2,3,,\n",
    )
    .unwrap();
    let o = fivenum(&[
        "convert",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--errors",
        errors.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let out = std::fs::read_to_string(&output).unwrap();
    assert_eq!(out.lines().count(), 3);
    assert!(out.lines().nth(2).unwrap().starts_with("bad,20,,"));
    let err = std::fs::read_to_string(&errors).unwrap();
    assert!(err.starts_with("line,study_id,reason\n3,bad,"));

    let empty = run(&["convert"], Some(""), &[]);
    assert!(empty.status.success());
    assert_eq!(
        stdout(&empty),
        "study_id,n,scenario,mean_est,mean_method,sd_est,sd_method,weight_used\n"
    );

    let header = run(&["convert"], Some("id,n\n1,2\n"), &[]);
    assert!(!header.status.success());
    assert!(String::from_utf8_lossy(&header.stderr).contains("malformed header"));
}

#[test]
fn weights_modes() {
    let o = fivenum(&["weights", "--n", "5,84"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let w5: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    let w84: f64 = text
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((w5 - 0.8447).abs() < 5e-4);
    assert!((w84 - 0.5002).abs() < 5e-4);

    let o = fivenum(&["weights", "--n", "85", "--mode", "exact"]);
    assert!(o.status.success());
    let line = stdout(&o).lines().nth(1).unwrap().to_string();
    let w: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
    assert!((w - 0.5).abs() <= 0.025);
    assert!(line.ends_with(",exact"));

    let o = fivenum(&["weights", "--n", "84,85", "--mode", "exact"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).lines().count(), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("4Q+1"));
}

#[test]
fn simulate_is_byte_identical_across_runs_and_threads() {
    let args = [
        "simulate", "--dist", "beta:9,4", "--grid", "5,21", "--reps", "4000", "--seed", "11",
    ];
    let a = run(&args, None, &[("RAYON_NUM_THREADS", "1")]);
    let b = run(&args, None, &[("RAYON_NUM_THREADS", "4")]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("dist,n,T,rmse_existing,rmse_new,mc_se\n\"beta:9,4\",5,4000,"));

    let env_seed = run(&args[..7], None, &[("FIVENUM_SEED", "11")]);
    assert_eq!(env_seed.stdout, a.stdout);
    let overridden = run(&args, None, &[("FIVENUM_SEED", "12")]);
    assert_eq!(overridden.stdout, a.stdout);
}

#[test]
fn simulate_histogram_writes_two_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.csv");
    let o = fivenum(&[
        "simulate",
        "--histogram",
        "--n",
        "5",
        "--reps",
        "10000",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 10_001);
    assert_eq!(text.lines().next(), Some("range_based,iqr_based"));
    assert!(text.lines().skip(1).all(|l| l.split(',').count() == 2));
}

#[test]
fn invalid_flags_exit_nonzero() {
    for args in [
        vec!["simulate", "--histogram"],
        vec!["simulate", "--dist", "gamma:1,2"],
        vec!["simulate", "--grid", "5,x"],
        vec!["simulate", "--grid", "3"],
        vec!["simulate", "--reps", "10"],
        vec!["simulate", "--pair", "shi_sd"],
        vec!["simulate", "--histogram", "--n", "5", "--dist", "chisq:3"],
        vec!["weights"],
        vec!["convert", "--method", "magic"],
        vec!["nonsense"],
    ] {
        let o = fivenum(&args);
        assert!(!o.status.success(), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn fit_reports_power_law() {
    let o = fivenum(&["fit", "--q-max", "30"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let cells: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    assert_eq!(cells[0], 0.0);
    assert!(cells[1] > 0.03 && cells[1] < 0.12);
    assert!(cells[2] > 0.5 && cells[2] < 0.7);
}
