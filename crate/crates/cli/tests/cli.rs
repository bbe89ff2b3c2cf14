use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ldrop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ldrop"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn help_exits_zero() {
    assert_eq!(ldrop(&["--help"]).status.code(), Some(0));
    assert_eq!(ldrop(&["curve", "--help"]).status.code(), Some(0));
}

#[test]
fn bad_arguments_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(ldrop(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        ldrop(&["curve", "--a-grid", "3,2", "--out", out])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        ldrop(&["converge", "--voxel-h", "-1", "--out", out])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(ldrop(&["energy", "--out", out]).status.code(), Some(1));
    assert_eq!(
        ldrop(&["energy", "/nonexistent/shape.txt", "--out", out])
            .status
            .code(),
        Some(1)
    );
    // shape optimisation is Coulomb-only
    assert_eq!(
        ldrop(&["curve", "--lambda", "2", "--out", out])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        ldrop(&["converge", "--dim", "2", "--out", out])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn energy_of_two_balls() {
    let dir = tempfile::tempdir().unwrap();
    let shape = dir.path().join("pair.txt");
    std::fs::write(&shape, "# two unit balls\n0 0 0 1\n10 0 0 1\n").unwrap();
    let out = dir.path().join("out");
    let o = ldrop(&[
        "energy",
        shape.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&out.join("energy.json"));
    let q = 4.0 * PI / 3.0;
    let d = 2.0 * 16.0 * PI * PI / 15.0 + q * q / 10.0;
    assert!((r["breakdown"]["riesz"].as_f64().unwrap() - d).abs() < 1e-10);
    assert!((r["breakdown"]["perimeter"].as_f64().unwrap() - 8.0 * PI).abs() < 1e-10);
    assert!((r["diameter"].as_f64().unwrap() - 12.0).abs() < 1e-10);
    assert_eq!(r["representation"], "balls");
    assert!(r["voxelized_at"].is_null());
    assert!(out.join("timings.json").exists());
}

#[test]
fn energy_of_riesz_ball_is_voxelized_when_needed() {
    let dir = tempfile::tempdir().unwrap();
    let shape = dir.path().join("axisym.txt");
    std::fs::write(&shape, "axisym 1\n").unwrap();
    let out = dir.path().join("out");
    let o = ldrop(&[
        "energy",
        shape.to_str().unwrap(),
        "--lambda",
        "2",
        "--voxel-h",
        "0.2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&out.join("energy.json"));
    assert_eq!(r["voxelized_at"].as_f64(), Some(0.2));
    // I_2 of the unit ball: ½|B|² E|x − y|⁻² = ½(4π/3)²·9/4 = 2π²
    let riesz = r["breakdown"]["riesz"].as_f64().unwrap();
    assert!((riesz / (2.0 * PI * PI) - 1.0).abs() < 0.05, "{riesz}");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# dissociation table\namax = 10\npoints = 4\nthresholds = 2\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = ldrop(&[
        "dissociate",
        "--config",
        cfg.to_str().unwrap(),
        "--points",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("dissociation.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "config_hash,A,k,e_tilde,e_ball,per_ball_mass");
    assert_eq!(lines.len(), 6);
    assert!(lines[5].contains(",10,"));
    let r = read_json(&out.join("dissociation.json"));
    let t = r["thresholds"].as_array().unwrap();
    assert_eq!(t.len(), 2);
    for row in t {
        let (a, b) = (
            row["closed_form"].as_f64().unwrap(),
            row["bisection"].as_f64().unwrap(),
        );
        assert!((a - b).abs() < 1e-10);
    }
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(
        ldrop(&["dissociate", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn hash_ignores_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args = vec![
            "dissociate",
            "--points",
            "3",
            "--out",
            out.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        assert!(ldrop(&args).status.success());
        read_json(&out.join("dissociation.json"))["config_hash"]
            .as_str()
            .unwrap()
            .to_string()
    };
    let a = run("a", &[]);
    assert_eq!(a.len(), 16);
    assert_eq!(a, run("b", &[]));
    assert_ne!(a, run("c", &["--seed", "1"]));
}

#[test]
fn curve_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = ldrop(&[
        "curve",
        "--a-grid",
        "1,2",
        "--restarts",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("curve.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("config_hash,A,E_upper,e_upper,source,diam,virial_residual,status")
    );
    assert_eq!(lines.count(), 2);
    let r = read_json(&out.join("curve.json"));
    let rows = r["rows"].as_array().unwrap();
    for row in rows {
        let e = row["per_particle_upper"].as_f64().unwrap();
        let ball = row["ball_per_particle"].as_f64().unwrap();
        assert!(e <= ball + 1e-9);
        assert!(row["quadrature_slack"].as_f64().unwrap() >= 0.0);
    }
    assert!(r["structural"]["subadditivity_violations"]
        .as_array()
        .unwrap()
        .is_empty());
    assert_eq!(r["seed"].as_u64(), Some(0));
}

#[test]
fn split_default_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = ldrop(&["split", "--voxel-h", "0.2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&out.join("split.json"));
    let s = &r["split"];
    // the sphere passes between the balls, so it cuts nothing
    assert!(s["perimeter_defect"].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(r["selection"]["slice"].as_f64(), Some(0.0));
    let (f, g) = (
        s["inside_volume"].as_f64().unwrap(),
        s["outside_volume"].as_f64().unwrap(),
    );
    assert!((f - g).abs() < 1e-12);
    let d = s["riesz_defect"].as_f64().unwrap();
    assert!((d / (f * g / 10.0) - 1.0).abs() < 0.01, "{d}");
    assert_eq!(r["vanishing"]["rows"].as_array().unwrap().len(), 3);
    assert!(r["concentration"]["concentration"].as_f64().unwrap() <= f + 1e-12);
}

#[test]
fn split_at_fixed_radius() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = ldrop(&[
        "split",
        "--voxel-h",
        "0.2",
        "--radius",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&out.join("split.json"));
    assert!(r["selection"].is_null());
    assert!(r["split"]["perimeter_defect"].as_f64().unwrap() > 0.0);
}

#[test]
fn stability_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = ldrop(&[
        "stability",
        "--a-grid",
        "5,15",
        "--quadrature-order",
        "32",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&out.join("stability.json"));
    let t = r["threshold"].as_f64().unwrap();
    assert!((t - 10.0).abs() < 1e-3, "{t}");
    assert!((r["small_deformation_threshold"].as_f64().unwrap() - 10.0).abs() < 1e-9);
    let csv = std::fs::read_to_string(out.join("stability.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);

    // no sign change between 1 and 5: reported, not an error
    let o = ldrop(&[
        "stability",
        "--a-grid",
        "1,5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(read_json(&out.join("stability.json"))["threshold"].is_null());
}

#[test]
fn converge_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = ldrop(&["converge", "--h", "0.4,0.2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&out.join("converge.json"));
    assert_eq!(r["rows"].as_array().unwrap().len(), 2);
    assert_eq!(r["perimeter_monotone"], true);
    assert_eq!(r["riesz_monotone"], true);
    assert!((r["exact_riesz"].as_f64().unwrap() - 16.0 * PI * PI / 15.0).abs() < 1e-12);
}
