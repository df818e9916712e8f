//! End-to-end CLI checks: the documented subcommands against real files,
//! deterministic reports, and report-as-input round trips.

use std::path::PathBuf;

use serde_json::json;

use coarse_ext::cli::run;
use coarse_ext::io::render_report;

fn dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("coarse_ext_cli_e2e_{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn write(name: &str, text: &str) -> PathBuf {
    let p = dir().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn leb_example_reports_value_and_witness() {
    let cover = write(
        "cover.json",
        r#"{"space": {"metric": {"interval": {"start": 0, "end": 9}}},
            "members": [[0,1,2,3,4,5,6],[4,5,6,7,8,9]]}"#,
    );
    let result = run(["leb", "--cover", cover.to_str().unwrap()]);
    assert_eq!(result.exit_code, 0);
    assert_eq!(result.report["value"], json!(2.0));
    assert_eq!(result.report["witness"], json!(5));

    // the space may also come from the --space flag
    let space = write("flag_space.json", r#"{"metric": {"interval": {"start": 0, "end": 9}}}"#);
    let bare = write(
        "bare_cover.json",
        r#"{"members": [[0,1,2,3,4,5,6],[4,5,6,7,8,9]]}"#,
    );
    let flagged = run([
        "leb",
        "--space",
        space.to_str().unwrap(),
        "--cover",
        bare.to_str().unwrap(),
    ]);
    assert_eq!(flagged.exit_code, 0);
    assert_eq!(flagged.report["value"], json!(2.0));
}

#[test]
fn mult_mesh_nerve_on_chain_cover() {
    let cover = write(
        "chain.json",
        r#"{"space": {"metric": {"interval": {"start": 0, "end": 3}}},
            "members": [[0,1],[1,2],[2,3]]}"#,
    );
    let mult = run(["mult", "--cover", cover.to_str().unwrap()]);
    assert_eq!(mult.report["multiplicity"], json!(2));
    assert_eq!(mult.report["dimension"], json!(1));
    let mesh = run(["mesh", "--cover", cover.to_str().unwrap()]);
    assert_eq!(mesh.report["mesh"], json!(1.0));
    let nerve = run(["nerve", "--cover", cover.to_str().unwrap()]);
    assert_eq!(nerve.report["dimension"], json!(1));
    let simplices = nerve.report["simplices"].as_array().unwrap();
    assert!(simplices.contains(&json!([0, 1])));
    assert!(!simplices.contains(&json!([0, 2])));
}

#[test]
fn barymap_emits_a_loadable_function() {
    write("bspace.json", r#"{"metric": {"interval": {"start": 0, "end": 9}}}"#);
    let cover = write(
        "bcover.json",
        r#"{"space": "bspace.json", "members": [[0,1,2,3,4,5,6],[4,5,6,7,8,9]]}"#,
    );
    let out = dir().join("barymap.json");
    let result = run([
        "barymap",
        "--cover",
        cover.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.exit_code, 0);
    assert_eq!(result.report["values"]["5"], json!([0.5, 0.5]));
    // the emitted report is itself a function file
    let reread = run([
        "check-lip",
        "--function",
        out.to_str().unwrap(),
        "--params",
        r#"{"lambda": 10.0}"#,
    ]);
    assert_eq!(reread.exit_code, 0);
}

#[test]
fn mcshane_interpolates() {
    let f = write(
        "partial.json",
        r#"{"space": {"points": [0, 5, 10],
                      "metric": {"matrix": [[0,5,10],[5,0,5],[10,5,0]]}},
            "values": {"0": 0.0, "10": 1.0}}"#,
    );
    let result = run([
        "mcshane",
        "--function",
        f.to_str().unwrap(),
        "--params",
        r#"{"lambda": 0.1}"#,
    ]);
    assert_eq!(result.exit_code, 0);
    assert_eq!(result.report["values"]["5"], json!(0.5));
    assert_eq!(result.report["verified_lipschitz"], json!(true));
}

#[test]
fn sphere_extend_identity_when_total() {
    let f = write(
        "total_boundary.json",
        r#"{"space": {"metric": {"interval": {"start": 0, "end": 8}}},
            "values": {"0": [1,0], "1": [1,0], "2": [1,0], "3": [1,0], "4": [1,0],
                       "5": [1,0], "6": [1,0], "7": [1,0], "8": [1,0]},
            "target": "l1"}"#,
    );
    let result = run([
        "sphere-extend",
        "--function",
        f.to_str().unwrap(),
        "--params",
        r#"{"delta": 0.01, "refiner": {"name": "search", "s": 1.0, "t": 1.0, "mult": 1}}"#,
    ]);
    assert_eq!(result.exit_code, 0);
    assert_eq!(result.report["identity_extension"], json!(true));
    assert_eq!(result.report["values"]["4"], json!([1.0, 0.0]));
}

#[test]
fn counterexample_matches_module_example() {
    let result = run([
        "counterexample",
        "--nmax",
        "20",
        "--extender",
        "linear",
        "--epsilon",
        "1",
        "--radius",
        "1",
        "--beyond",
        "300",
    ]);
    assert_eq!(result.exit_code, 0);
    let witness = result.report["witness"].as_array().unwrap();
    assert_eq!(witness.len(), 2);
    assert!(result.report["image_gap"].as_f64().unwrap() >= 1.0);
    // reports are byte-identical across reruns
    let again = run([
        "counterexample",
        "--nmax",
        "20",
        "--extender",
        "linear",
        "--epsilon",
        "1",
        "--radius",
        "1",
        "--beyond",
        "300",
    ]);
    assert_eq!(render_report(&result.report), render_report(&again.report));
}

#[test]
fn brick_reduce_dim_pipeline_via_files() {
    let brick = dir().join("line_brick.json");
    let made = run([
        "brick",
        "--params",
        r#"{"kind": "line", "window": [0, 200], "l": 10}"#,
        "--out",
        brick.to_str().unwrap(),
    ]);
    assert_eq!(made.exit_code, 0);
    assert_eq!(made.report["r"], json!(10.0));
    // two families certify dimension <= 1, so the reduction targets n = 0
    let reduced = run([
        "reduce-dim",
        "--cover",
        brick.to_str().unwrap(),
        "--params",
        r#"{"n": 0, "refiner": {"name": "search", "s": 1.0, "t": 10.0, "mult": 1}}"#,
    ]);
    assert_eq!(reduced.exit_code, 0);
    assert_eq!(reduced.report["stats"]["multiplicity"], json!(1));
}

#[test]
fn search_refine_reports_partition() {
    let cover = write(
        "sr.json",
        r#"{"space": {"metric": {"interval": {"start": 0, "end": 9}}},
            "members": [[0,1,2,3,4,5,6],[4,5,6,7,8,9]]}"#,
    );
    let result = run([
        "search-refine",
        "--cover",
        cover.to_str().unwrap(),
        "--params",
        r#"{"target_leb": 1.0, "target_mult": 1}"#,
    ]);
    assert_eq!(result.exit_code, 0);
    assert_eq!(result.report["found"], json!(true));
    assert_eq!(result.report["stats"]["multiplicity"], json!(1));
    // impossible targets exit 1 with found=false
    let impossible = run([
        "search-refine",
        "--cover",
        cover.to_str().unwrap(),
        "--params",
        r#"{"target_leb": 12.0, "target_mult": 1}"#,
    ]);
    assert_eq!(impossible.exit_code, 1);
    assert_eq!(impossible.report["found"], json!(false));
}

#[test]
fn so_profile_emits_entries_and_plot() {
    let f = write(
        "sqrtfn.json",
        r#"{"space": {"metric": {"interval": {"start": 0, "end": 100}}, "basepoint": 0},
            "values": null}"#,
    );
    // build the values map programmatically to keep the file readable
    let values: serde_json::Map<String, serde_json::Value> = (0..=100)
        .map(|x| (x.to_string(), json!((x as f64).sqrt())))
        .collect();
    let file = json!({
        "space": {"metric": {"interval": {"start": 0, "end": 100}}, "basepoint": 0},
        "values": values,
    });
    std::fs::write(&f, serde_json::to_string(&file).unwrap()).unwrap();
    let plot = dir().join("profile.svg");
    let result = run([
        "so-profile",
        "--function",
        f.to_str().unwrap(),
        "--params",
        r#"{"r": 1.0, "ns": [0, 25, 50, 75]}"#,
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert_eq!(result.exit_code, 0);
    let entries = result.report["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 4);
    let svg = std::fs::read_to_string(&plot).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn promote_command_runs_pipeline() {
    let cover = write(
        "promote_cover.json",
        r#"{"space": {"metric": {"interval": {"start": 0, "end": 199}}},
            "members": [[], [], []]}"#,
    );
    // build a real 3-member cover file programmatically
    let members: Vec<Vec<i64>> = vec![
        (0..=90).collect(),
        (60..=150).collect(),
        (120..=199).collect(),
    ];
    let file = json!({
        "space": {"metric": {"interval": {"start": 0, "end": 199}}},
        "members": members,
    });
    std::fs::write(&cover, serde_json::to_string(&file).unwrap()).unwrap();
    let result = run([
        "promote",
        "--cover",
        cover.to_str().unwrap(),
        "--params",
        r#"{"n": 0, "inner": {"name": "search", "s": 1.0, "t": 4.0, "mult": 1}}"#,
    ]);
    assert_eq!(result.exit_code, 0);
    assert_eq!(result.report["r"], json!(16.0));
    assert!(result.report["stats"]["multiplicity"].as_u64().unwrap() <= 2);
}

#[test]
fn annulus_extend_via_files() {
    let file = json!({
        "space": {"metric": {"interval": {"start": 0, "end": 300}}, "basepoint": 0},
        "values": {"0": 0.0, "64": 0.0, "81": 0.0, "100": 0.5, "121": 0.0,
                   "144": 0.25, "169": 0.0, "196": 0.5, "225": 0.0, "256": 0.25, "289": 0.0},
    });
    let f = write("annulus.json", &serde_json::to_string(&file).unwrap());
    let result = run([
        "annulus-extend",
        "--function",
        f.to_str().unwrap(),
        "--params",
        r#"{"r": 4.0, "mu": 0.6, "s": 8.0, "epsilon": 0.7, "m": 8.0}"#,
    ]);
    assert_eq!(result.exit_code, 0);
    assert_eq!(result.report["continuity"]["continuous"], json!(true));
    assert_eq!(result.report["values"]["100"], json!(0.5));
}

#[test]
fn refine_via_extension_via_files() {
    let members: Vec<Vec<i64>> = vec![(0..=80).collect(), (40..=120).collect()];
    let file = json!({
        "space": {"metric": {"interval": {"start": 0, "end": 120}}},
        "members": members,
    });
    let cover = write("rve.json", &serde_json::to_string(&file).unwrap());
    let result = run([
        "refine-via-extension",
        "--cover",
        cover.to_str().unwrap(),
        "--params",
        r#"{"epsilon": 0.5, "refiner": {"name": "search", "s": 1.0, "t": 0.1, "mult": 1}}"#,
    ]);
    assert_eq!(result.exit_code, 0);
    assert_eq!(result.report["stats"]["multiplicity"], json!(1));
}
