use std::io::Write;
use std::process::{Command, Output, Stdio};

fn cihash(args: &[&str], stdin: Option<&[u8]>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cihash"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or_default()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn hashes_ascii_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("text");
    std::fs::write(&path, "The original text").unwrap();
    let p = path.to_str().unwrap();
    let out = cihash(&["hash", "--ascii7", p], None);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        format!("63A88CB6AF0B18E3BE828F9BDA4596A6A13DFE38440AB9557DA1C0C6B1EDBDBD  {p}\n")
    );
}

#[test]
fn stdin_is_raw8() {
    let out = cihash(&["hash", "-"], Some(&[0u8]));
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "8222A0F2545536491AA7C82754F8456B9F44AD33E995AE5BA285D2F43D945FAF  -\n"
    );
    let out = cihash(&["hash", "--ascii7", "-"], Some(b"abc"));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn keyed_short_digest() {
    let out = cihash(&["hash", "--n", "128", "--key", "42", "-"], Some(b"abc"));
    assert_eq!(stdout(&out), "7FF379F300C43A4C20EB695182E81F8F  -\n");
}

#[test]
fn no_inputs_is_usage_error() {
    let out = cihash(&["hash"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("usage"));
    assert_eq!(cihash(&[], None).status.code(), Some(1));
    assert_eq!(cihash(&["frobnicate"], None).status.code(), Some(1));
}

#[test]
fn bad_digest_length_rejected() {
    for n in ["7", "0", "260", "x"] {
        let out = cihash(&["hash", "--n", n, "-"], Some(b"abc"));
        assert_eq!(out.status.code(), Some(1), "n={n}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn unreadable_file_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope");
    let out = cihash(&["hash", missing.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("nope"));
}

#[test]
fn non_ascii_under_ascii7_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bin");
    std::fs::write(&path, [0x41u8, 0xC3]).unwrap();
    let out = cihash(&["hash", "--ascii7", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn avalanche_json_is_reproducible_across_threads() {
    let base = ["avalanche", "--trials", "1000", "--msg-bits", "1000", "--n", "128", "--seed", "42", "--format", "json"];
    let a = cihash(&base, None);
    let b = cihash(&base, None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let one = cihash(&[&base[..], &["--threads", "1"]].concat(), None);
    let four = cihash(&[&base[..], &["--threads", "4"]].concat(), None);
    assert_eq!(one.stdout, a.stdout);
    assert_eq!(four.stdout, a.stdout);

    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 42);
    assert_eq!(v["trials"], 1000);
    for key in ["B_min", "B_max", "B_bar", "P", "delta_B", "delta_P"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn uniformity_and_battery_reports() {
    let out = cihash(&["uniformity", "--count", "200", "--msg-bits", "64", "--seed", "7", "--format", "json"], None);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["counts"].as_array().unwrap().len(), 16);

    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    std::fs::write(&a, "The original text").unwrap();
    std::fs::write(&b, "the original text").unwrap();
    let out = cihash(&["battery", "--ascii7", a.to_str().unwrap(), b.to_str().unwrap()], None);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("63A88CB6"));
    assert!(text.contains("pairwise"));
}

#[test]
fn trace_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let out = cihash(
        &["trace", "--flip-config", "3", "--steps", "20", "-o", path.to_str().unwrap()],
        None,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("step,d_e,d_s,d"));
    assert_eq!(lines.count(), 21);

    let out = cihash(&["trace", "--perturb-strategy", "0", "--steps", "5"], None);
    assert!(out.status.success());
    let out = cihash(&["trace", "--flip-config", "999"], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_separates_timing() {
    let out = cihash(&["bench", "--min-exp", "12", "--max-exp", "13", "--reps", "3"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("timing"));
}
