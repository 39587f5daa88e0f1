use std::path::Path;
use std::process::{Command, Output};

fn mdlan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdlan")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

fn write(path: &Path, text: &str) -> String {
    std::fs::write(path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn zero_matrix_converges_at_rank_zero() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(&dir.path().join("z.csv"), "0,0,0\n0,0,0\n");
    let out = dir.path().join("out");
    let o = mdlan(&["decompose", "--input", &input, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&out.join("summary.json"));
    assert_eq!(s["rank_est"], 0);
    assert_eq!(s["status"], "converged");
    assert!(out.join("X.mdm1").exists() && out.join("E.mdm1").exists());

    let run = json(&out.join("run.json"));
    for key in ["subcommand", "flags", "seed", "started_at", "wall_seconds", "version"] {
        assert!(run.get(key).is_some(), "run.json lacks {key}");
    }
    assert_eq!(run["subcommand"], "decompose");
    assert_eq!(run["flags"]["rho"], 1.5);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();

    assert_eq!(code(&mdlan(&["decompose", "--bogus"])), 1);
    assert_eq!(code(&mdlan(&["synth", "--m", "10", "--n", "10", "--rank", "2", "--p", "2", "--out", out])), 1);
    assert_eq!(code(&mdlan(&["--help"])), 0);

    let missing = dir.path().join("missing.csv");
    assert_eq!(code(&mdlan(&["decompose", "--input", missing.to_str().unwrap(), "--out", out])), 2);
    let ragged = write(&dir.path().join("r.csv"), "1,2\n3\n");
    assert_eq!(code(&mdlan(&["decompose", "--input", &ragged, "--out", out])), 2);

    let y = write(&dir.path().join("y.csv"), "4,1,0\n2,9,3\n1,1,7\n5,0,2\n");
    let trace = dir.path().join("trace.csv");
    let o = mdlan(&[
        "decompose", "--input", &y, "--max-iter", "2", "--trace", trace.to_str().unwrap(), "--out", out,
    ]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&Path::new(out).join("summary.json"))["status"], "max-iter");
    let t = std::fs::read_to_string(trace).unwrap();
    assert!(t.starts_with("iter,feasibility,rank_est,nnz_est,theta,mu,codelength_bits"));
    assert_eq!(t.lines().count(), 3);
}

#[test]
fn rpca_method_and_image_shape() {
    let dir = tempfile::tempdir().unwrap();
    let y = write(&dir.path().join("y.csv"), "1,2\n2,4\n3,6\n4,8\n");
    let out = dir.path().join("o");
    let o = mdlan(&["decompose", "--input", &y, "--method", "rpca", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&out.join("summary.json"))["method"], "rpca");

    let o = mdlan(&["decompose", "--input", &y, "--image-shape", "2x2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = mdlan(&["decompose", "--input", &y, "--image-shape", "3x2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn synth_writes_one_row_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t").join("trials.csv");
    let o = mdlan(&[
        "synth", "--m", "30", "--n", "20", "--rank", "2", "--p", "0.1", "--trials", "3", "--seed", "5", "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("method,m,n,r,p,seed,lr_nrmse,sp_nrmse,rank_est,nnz_est,planted_k,success,iters,converged\n"));
    assert_eq!(json(&dir.path().join("t").join("run.json"))["seed"], 5);
}

#[test]
fn sweep_p_covers_each_p() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("curves.csv");
    let o = mdlan(&[
        "sweep-p", "--m", "30", "--n", "20", "--rank", "2", "--p-list", "0,0.1", "--trials", "2", "--methods", "mdlan",
        "--out", csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 3);
}

#[test]
fn background_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let v = dir.path().join("v");
    let o = mdlan(&[
        "video-gen", "--seed", "2", "--out", v.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_dir(v.join("frames")).unwrap().count(), 40);

    let out = dir.path().join("bg");
    let o = mdlan(&[
        "background", "--frames", v.join("frames").to_str().unwrap(), "--truth", v.join("truth").to_str().unwrap(),
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&out.join("summary.json"));
    assert!(s["f_measure"].as_f64().unwrap() > 0.9);
    assert_eq!(s["channels"][0]["rank_est"], 1);
    for name in ["low_0007.pgm", "sparse_0000.pgm", "mask_0003.pgm", "X.mdm1", "run.json"] {
        assert!(out.join(name).exists(), "missing {name}");
    }
}

#[test]
fn faces_pipeline_with_noise() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f");
    assert_eq!(code(&mdlan(&["faces-gen", "--frames", "6", "--out", f.to_str().unwrap()])), 0);
    let out = dir.path().join("o");
    let o = mdlan(&[
        "faces", "--frames", f.join("frames").to_str().unwrap(), "--salt-pepper", "0.2", "--seed", "4", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("observed_0005.pgm").exists());
    assert!(out.join("low_0000.pgm").exists());
}

#[test]
fn mixed_frame_sizes_are_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let frames = dir.path().join("frames");
    std::fs::create_dir(&frames).unwrap();
    let mut a = b"P5\n2 2\n255\n".to_vec();
    a.extend([1, 2, 3, 4]);
    let mut b = b"P5\n3 1\n255\n".to_vec();
    b.extend([1, 2, 3]);
    std::fs::write(frames.join("a.pgm"), a).unwrap();
    std::fs::write(frames.join("b.pgm"), b).unwrap();
    let o = mdlan(&["background", "--frames", frames.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("b.pgm"));
}
