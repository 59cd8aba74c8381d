use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qcldpc"))
}

fn data(name: &str) -> String {
    format!("{}/../core/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

#[test]
fn help_matches_golden_files() {
    for sub in ["", "expand", "compact", "schedule", "decode", "ber"] {
        let mut args: Vec<&str> = if sub.is_empty() { vec![] } else { vec![sub] };
        args.push("--help");
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0));
        let name = format!("help_{}.txt", if sub.is_empty() { "main" } else { sub });
        let expected = fs::read_to_string(golden_path(&name)).unwrap();
        assert_eq!(stdout(&out), expected, "{name} is stale");
    }
}

#[test]
fn subcommand_help_lists_every_flag() {
    let cases: [(&str, &[&str]); 5] = [
        ("expand", &["--code", "--format", "--out"]),
        ("compact", &["--code", "--csv", "--out"]),
        (
            "schedule",
            &[
                "--code",
                "--superlayer",
                "--mode",
                "--fclk",
                "--iters",
                "--cycles-per-slot",
            ],
        ),
        (
            "decode",
            &[
                "--code",
                "--llr",
                "--raw",
                "--iters",
                "--arith",
                "--qformat",
                "--scale",
            ],
        ),
        (
            "ber",
            &[
                "--code",
                "--ebno",
                "--iters",
                "--arith",
                "--qformat",
                "--seed",
                "--min-errors",
                "--max-frames",
                "--workers",
            ],
        ),
    ];
    for (sub, flags) in cases {
        let help = stdout(&run(&[sub, "--help"]));
        for flag in flags {
            assert!(help.contains(flag), "{sub} --help lacks {flag}");
        }
    }
}

#[test]
fn compact_prints_tables_and_ratio() {
    let out = run(&["compact", "--code", &data("wifi_z81.bm")]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("lambda = 1/3"));
    assert!(text.contains("J = 8"));
    assert!(text.contains("L12    0  2  4  7  8 11 12 23"), "{text}");

    let csv = stdout(&run(&["compact", "--code", &data("wifi_z81.bm"), "--csv"]));
    assert!(csv.starts_with("table,layer,slot,value\n"));
    assert!(csv.contains("beta_S,11,7,0\n"));
}

#[test]
fn schedule_auto_reports_pipeline_figures() {
    let out = run(&[
        "schedule",
        "--code",
        &data("wifi_z81.bm"),
        "--superlayer",
        "auto",
        "--mode",
        "2x",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    for line in [
        "superlayer = 6",
        "eta = 6/7",
        "slots = 112",
        "slots_1x = 192",
        "throughput_mbps = 433.93",
    ] {
        assert!(
            text.lines().any(|l| l == line),
            "missing {line:?} in\n{text}"
        );
    }

    let serial = stdout(&run(&[
        "schedule",
        "--code",
        &data("wifi_z81.bm"),
        "--mode",
        "1x",
    ]));
    assert!(serial.contains("slots = 192") && serial.contains("eta = 1/2"));
}

#[test]
fn schedule_rejects_bad_superlayer() {
    let code = data("wifi_z81.bm");
    for size in ["5", "0", "two"] {
        let out = run(&["schedule", "--code", &code, "--superlayer", size]);
        assert_eq!(out.status.code(), Some(1), "size {size}");
        assert!(stderr(&out).contains("error"));
    }
}

#[test]
fn missing_code_file_is_a_data_error() {
    let out = run(&["decode", "--code", "missing.bm", "--llr", "missing.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("missing.bm"));
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_code_file_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.bm");
    fs::write(&path, "2 3 4\n0 -1 2\n1 x 0\n").unwrap();
    let out = run(&["compact", "--code", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_1() {
    let code = data("wifi_z27.bm");
    let cases: [&[&str]; 5] = [
        &[
            "ber",
            "--code",
            &code,
            "--ebno",
            "1:1:2",
            "--arith",
            "float",
            "--qformat",
            "6.4",
        ],
        &["compact", "--code", &code, "--bogus"],
        &["ber", "--code", &code, "--ebno", "1:2"],
        &[
            "ber",
            "--code",
            &code,
            "--ebno",
            "1:1:2",
            "--arith",
            "fixed",
            "--qformat",
            "6",
        ],
        &["frobnicate"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", stderr(&out));
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn decode_text_and_raw_llr_agree() {
    let dir = tempfile::tempdir().unwrap();
    let code = data("wifi_z27.bm");
    let mut llr = vec![3.5f32; 648];
    llr[10] = -2.0;
    llr[300] = -1.25;
    let text: String = llr.iter().map(|x| format!("{x}\n")).collect();
    let raw: Vec<u8> = llr.iter().flat_map(|x| x.to_le_bytes()).collect();
    let (text_path, raw_path) = (dir.path().join("llr.txt"), dir.path().join("llr.bin"));
    fs::write(&text_path, text).unwrap();
    fs::write(&raw_path, raw).unwrap();

    let a = run(&[
        "decode",
        "--code",
        &code,
        "--llr",
        text_path.to_str().unwrap(),
    ]);
    let b = run(&[
        "decode",
        "--code",
        &code,
        "--llr",
        raw_path.to_str().unwrap(),
        "--raw",
    ]);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    let out = stdout(&a);
    assert!(
        out.contains(&format!("bits = {}\n", "0".repeat(648))),
        "{out}"
    );
    assert!(out.contains("converged = true"));

    let fixed = run(&[
        "decode",
        "--code",
        &code,
        "--llr",
        text_path.to_str().unwrap(),
        "--arith",
        "fixed",
        "--qformat",
        "6.4",
    ]);
    assert_eq!(stdout(&fixed), out);
}

#[test]
fn decode_rejects_wrong_length() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("short.txt");
    fs::write(&path, "1.0\n2.0\n").unwrap();
    let out = run(&[
        "decode",
        "--code",
        &data("wifi_z27.bm"),
        "--llr",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("648"), "{}", stderr(&out));
}

#[test]
fn expand_writes_alist_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.alist");
    let out = run(&[
        "expand",
        "--code",
        &data("wifi_z27.bm"),
        "--format",
        "alist",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let alist = fs::read_to_string(&path).unwrap();
    let mut lines = alist.lines();
    assert_eq!(lines.next(), Some("648 324"));

    let summary = stdout(&run(&["expand", "--code", &data("wifi_z27.bm")]));
    assert!(summary.contains("n = 648\n") && summary.contains("m = 324\n"));
}

#[test]
fn ber_emits_csv() {
    let out = run(&[
        "ber",
        "--code",
        &data("wifi_z27.bm"),
        "--ebno",
        "6:1:7",
        "--max-frames",
        "20",
        "--workers",
        "1",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = stdout(&out);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "ebno_db,frames,bit_errors,frame_errors,ber,fer,avg_iters"
    );
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("6,20,0,0,"), "{csv}");
}
