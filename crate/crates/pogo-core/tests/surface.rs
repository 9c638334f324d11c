//! Sweep-oracle checks on the real physics: parallel-decomposition safety,
//! grid-refinement stability, and qualitative shape of the apex surface.

use pogo_core::command::{CommandGeometry, JumpCommand};
use pogo_core::env::DesignSpace;
use pogo_core::params::ZETA_NOMINAL_NARROW;
use pogo_core::sweep::{sweep, DesignGrid, PerformanceSurface};
use pogo_core::{DesignParams, SimConfig};

fn setup() -> (DesignParams, JumpCommand, SimConfig) {
    let base = DesignParams::nominal(ZETA_NOMINAL_NARROW);
    let geometry = CommandGeometry::full_stroke(&base, 0.075);
    let command = JumpCommand::new(&base, geometry).unwrap();
    let sim = SimConfig::new(1e-4, 0.5).unwrap();
    (base, command, sim)
}

fn narrow_sweep(n_alpha: usize, n_zeta: usize) -> PerformanceSurface {
    let (base, command, sim) = setup();
    let grid = DesignGrid::covering(&DesignSpace::narrow(), n_alpha, n_zeta).unwrap();
    sweep(&grid, &base, &command, &sim).unwrap()
}

#[test]
fn stitched_rows_equal_the_full_sweep_bitwise() {
    let (base, command, sim) = setup();
    let grid = DesignGrid::covering(&DesignSpace::narrow(), 10, 6).unwrap();
    let full = sweep(&grid, &base, &command, &sim).unwrap();

    let mut stitched = Vec::with_capacity(grid.len());
    for j in 0..grid.n_zeta {
        let row = sweep(&grid.row(j), &base, &command, &sim).unwrap();
        assert_eq!(row.fingerprint, full.fingerprint);
        assert_eq!(row.heights.len(), grid.n_alpha);
        stitched.extend_from_slice(&row.heights);
    }
    assert_eq!(stitched, full.heights);
}

#[test]
fn refining_the_grid_barely_moves_the_peak() {
    let coarse = narrow_sweep(15, 15);
    let fine = narrow_sweep(29, 29);
    let a = coarse.argmax_design().unwrap().height;
    let b = fine.argmax_design().unwrap().height;
    assert!(a > 0.01 && b > 0.01, "peaks {a}, {b} too low");
    let rel = ((a - b) / b).abs();
    assert!(rel < 0.01, "peak apex moved {rel:.4} under refinement");
}

#[test]
fn more_damping_always_hurts_the_free_rebound() {
    // Without actuation the only energy source is the drop itself, so each
    // extra bit of damping must cost rebound height. (The forced jump is not
    // monotone in damping: near soft springs a little damping can re-time the
    // bounce against the thrust and win a fraction of a millimeter.)
    use pogo_core::sim::simulate_from;
    use pogo_core::PogoState;

    let command = JumpCommand::stationary(0.0);
    let sim = SimConfig::new(1e-4, 0.4).unwrap();
    let initial = PogoState {
        t: 0.0,
        height: 0.002,
        vel: 0.0,
        actuator_pos: 0.0,
        actuator_vel: 0.0,
    };
    let rebound = |zeta: f64| {
        let params = DesignParams::nominal(ZETA_NOMINAL_NARROW).with_design(5760.0, zeta);
        let traj = simulate_from(initial, &params, &command, &sim).unwrap();
        // Height regained after the first touchdown.
        let land = traj.samples.iter().position(|s| s.height <= 0.0).unwrap();
        traj.samples[land..]
            .iter()
            .map(|s| s.height)
            .fold(f64::NEG_INFINITY, f64::max)
    };

    let zetas = [0.0, 0.005, 0.01, 0.02, 0.05];
    let heights: Vec<f64> = zetas.iter().map(|&z| rebound(z)).collect();
    for (pair, z) in heights.windows(2).zip(zetas.windows(2)) {
        assert!(
            pair[1] < pair[0],
            "rebound rose with damping {} -> {}: {} -> {}",
            z[0],
            z[1],
            pair[0],
            pair[1]
        );
    }

    // On the forced jump, the cheap safe claim: across the whole narrow
    // damping range at the nominal spring, heavy damping jumps lower.
    let (base, command, sim) = setup();
    let space = DesignSpace::narrow();
    let (z_lo, z_hi) = space.zeta_range();
    let column = |zeta: f64| {
        let grid = DesignGrid::new(5760.0, 5760.0, 1, zeta, zeta, 1).unwrap();
        sweep(&grid, &base, &command, &sim).unwrap().heights[0]
    };
    assert!(column(z_hi) < column(z_lo));
}

#[test]
fn the_centimeter_level_set_is_reachable() {
    let surface = narrow_sweep(20, 10);
    let band = surface.target_band(0.01, 0.05).unwrap();
    assert!(
        !band.is_empty(),
        "no design within 5% of a 1 cm apex; max {}",
        surface.argmax_design().unwrap().height
    );
    for cell in &band {
        assert!((cell.height - 0.01).abs() / 0.01 <= 0.05);
    }
}

#[test]
fn the_best_spring_is_interior_and_softer_than_nominal() {
    let surface = narrow_sweep(24, 10);
    let best = surface.argmax_design().unwrap();
    let grid = &surface.grid;
    assert!(
        best.alpha > grid.alpha_min && best.alpha < grid.alpha_max,
        "peak sits on the spring-constant edge: {}",
        best.alpha
    );
    assert!(
        best.alpha < pogo_core::params::ALPHA_NOMINAL,
        "expected the peak below the nominal spring constant, got {}",
        best.alpha
    );
}
