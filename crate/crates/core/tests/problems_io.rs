use std::f64::consts::PI;
use std::fs;

use mhd_core::diagnostics::{max_div, totals};
use mhd_core::eos::Eos;
use mhd_core::grid::{Axis, Grid};
use mhd_core::io::{self, parse_config, read_snapshot, RunConfig, RunFailure, EXIT_CONFIG, EXIT_UNPHYSICAL};
use mhd_core::problems::{initialize, ProblemSpec};
use mhd_core::rhs::{Scheme, SchemeConfig};
use mhd_core::{Simulation32, Simulation64};

const NAMES: [&str; 5] = ["alfven", "vortex3d", "brio_wu", "orszag_tang", "turbulence"];

fn small(p: &ProblemSpec) -> [usize; 3] {
    match p {
        ProblemSpec::MhdVortex3d { .. } | ProblemSpec::Turbulence { .. } => [12, 12, 12],
        ProblemSpec::BrioWu { .. } => [64, 1, 1],
        _ => [24, 20, 1],
    }
}

#[test]
fn every_problem_starts_divergence_free() {
    for name in NAMES {
        let p = ProblemSpec::by_name(name).unwrap();
        let g = Grid::<f64>::new(p.grid_spec(small(&p))).unwrap();
        let s = initialize(&p, &g, &p.default_eos()).unwrap();
        let d = max_div(&g, &s.faces);
        assert!(d <= 1e-13, "{name}: {d}");
        let t = totals(&g, &s, &p.default_eos());
        assert!(t.rho_min > 0.0, "{name}");
    }
}

/// Averages of `cos(2 pi (x + y))` over an h x h cell pick up a factor
/// `sin(pi h) / (pi h)` per averaged direction. Faces come from exact line
/// integrals of the potential, cells from tensor Gauss quadrature whose error
/// falls at sixth order.
fn alfven_deviation(n: usize) -> (f64, f64) {
    let p = ProblemSpec::by_name("alfven").unwrap();
    let (a, b0) = (0.1, 2f64.sqrt());
    let g = Grid::new(p.grid_spec([n, n, 1])).unwrap();
    let s = initialize(&p, &g, &Eos::Adiabatic { gamma: 5.0 / 3.0 }).unwrap();
    let h = 1.0 / n as f64;
    let f = (PI * h).sin() / (PI * h);
    let (mut cells, mut faces) = (0.0f64, 0.0f64);
    g.for_each_interior(|i, j, _, c| {
        let (xc, yc) = (g.cell_center(Axis::X, i), g.cell_center(Axis::Y, j));
        let xf = g.face_position(Axis::X, i);
        let phi = 2.0 * PI * (xc + yc);
        let mz = a * phi.cos() * f * f;
        let bz = -a * phi.cos() * f * f;
        let bx = b0 / 2f64.sqrt() + a / 2f64.sqrt() * (2.0 * PI * (xf + yc)).sin() * f;
        cells = cells.max((s.cells[c][0] - 1.0).abs()).max((s.cells[c][3] - mz).abs());
        faces = faces.max((s.faces.comp[2][c] - bz).abs()).max((s.faces.comp[0][c] - bx).abs());
    });
    (cells, faces)
}

#[test]
fn alfven_averages_match_closed_form() {
    let (c20, f20) = alfven_deviation(20);
    let (c40, f40) = alfven_deviation(40);
    assert!(f20 <= 1e-14 && f40 <= 1e-14, "{f20} {f40}");
    assert!(c20 <= 1e-9, "{c20}");
    let order = (c20 / c40).log2();
    assert!((order - 6.0).abs() < 0.3, "{order}");
}

fn cfg(name: &str, n: [usize; 3], t_end: f64, dir: &std::path::Path) -> RunConfig {
    let mut c = RunConfig::for_problem(ProblemSpec::by_name(name).unwrap());
    c.resolution = n;
    c.t_end = t_end;
    c.output = dir.to_path_buf();
    c
}

#[test]
fn brio_wu_run_writes_snapshots_and_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = cfg("brio_wu", [128, 1, 1], 0.1, dir.path());
    c.snapshot_interval = 0.04;
    let summary = io::run(&c).unwrap();
    assert!((summary.t - 0.1).abs() < 1e-12);
    for f in ["snapshot_0000.snap", "snapshot_0001.snap", "snapshot_0002.snap", "final.snap", "ledger.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let (h, g, s) = read_snapshot::<f64>(&summary.final_snapshot).unwrap();
    assert_eq!(h.step, summary.steps);
    assert_eq!(h.problem, "brio_wu");
    let t = totals(&g, &s, &h.eos);
    assert!(t.rho_min > 0.0 && t.rho_min < 0.2 && t.rho_max > 0.9);
    let ledger = fs::read_to_string(&summary.ledger_file).unwrap();
    assert_eq!(ledger.lines().count(), 2 + summary.ledger.rows.len());
}

#[test]
fn runs_are_bit_reproducible() {
    let outputs: Vec<(Vec<u8>, Vec<u8>)> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let c = cfg("orszag_tang", [32, 32, 1], 0.05, dir.path());
            let s = io::run(&c).unwrap();
            (fs::read(s.ledger_file).unwrap(), fs::read(s.final_snapshot).unwrap())
        })
        .collect();
    assert!(outputs[0] == outputs[1]);
}

#[test]
fn unphysical_run_leaves_a_failure_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "problem = brio_wu\nresolution = 64 1 1\nfallback.enabled = false\n\
         brio_wu.left = 1 0 0 0 1000 0.75 1 0\nbrio_wu.right = 0.001 0 0 0 0.0001 0.75 -1 0\n\
         t_end = 0.01\noutput = {}\n",
        dir.path().display()
    );
    let c = parse_config(&text).unwrap();
    match io::run(&c) {
        Err(e @ RunFailure::Unphysical { .. }) => {
            assert_eq!(e.exit_code(), EXIT_UNPHYSICAL);
            assert!(dir.path().join("failure.snap").exists());
            assert!(dir.path().join("ledger.csv").exists());
        }
        other => panic!("expected an unphysical failure, got {other:?}"),
    }
}

#[test]
fn bad_configurations_map_to_the_config_exit_code() {
    for text in [
        "problem = alfven\nscheme = weno9\n",
        "problem = turbulence\neos = adiabatic\n",
        "problem = alfven\nflattener.tau_ho = 3\nflattener.tau_lo = 2\n",
        "resolution = 8 8 1\n",
    ] {
        let e = parse_config(text).unwrap_err();
        assert_eq!(RunFailure::from(e).exit_code(), EXIT_CONFIG, "{text}");
    }
}

#[test]
fn convergence_suite_on_the_alfven_wave() {
    let dir = tempfile::tempdir().unwrap();
    let c = cfg("alfven", [16, 16, 1], 0.5, dir.path());
    let table = io::convergence_suite(&c, &[16, 32]).unwrap();
    assert_eq!(table.rows.len(), 2);
    let e = table.rows[1].eoc.unwrap();
    assert!(e > 3.5, "{e}");
    assert!(table.rows.iter().all(|r| r.max_div_b <= 1e-12));
    assert!(dir.path().join("convergence.csv").exists());
    assert!(table.text().contains("32"));
}

#[test]
fn single_precision_runs_and_stays_close_to_double() {
    let p = ProblemSpec::by_name("alfven").unwrap();
    let mut a = Simulation64::new(&p, [16, 16, 1], SchemeConfig::new(Scheme::Cweno4, Eos::Adiabatic { gamma: 5.0 / 3.0 }), 0.05).unwrap();
    let mut b = Simulation32::new(&p, [16, 16, 1], SchemeConfig::new(Scheme::Cweno4, Eos::Adiabatic { gamma: 5.0 / 3.0 }), 0.05).unwrap();
    a.run().unwrap();
    b.run().unwrap();
    let (ta, tb) = (a.ledger.rows.last().unwrap(), b.ledger.rows.last().unwrap());
    assert_eq!(a.clock.step, b.clock.step);
    assert!((ta.values()[11] - tb.values()[11]).abs() < 1e-5 * ta.values()[11].max(1.0), "{} {}", ta.values()[11], tb.values()[11]);
    assert!(b.ledger.max_div_b() < 1e-5);
}

#[test]
fn shipped_configurations_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "cfg") {
            let c = parse_config(&fs::read_to_string(&path).unwrap());
            assert!(c.is_ok(), "{}: {:?}", path.display(), c.err());
            seen += 1;
        }
    }
    assert_eq!(seen, 5);
}
