//! Regenerates the bundled test fixtures under `tests/fixtures`.
//!
//! * `drifters_subset.csv`: 12 seeded drifter-like trajectories.
//! * `mocap_poses.csv`, `mocap_truth.csv`: a 100-frame, 31-joint pose
//!   sequence of three looping activities ("walk", "jump", "wave") in
//!   separate regions of pose space. Consecutive regions are 25 units
//!   apart, so at a coverage radius of 16 no activity reaches another while
//!   each connecting move is covered from both ends.

use std::f64::consts::TAU;
use std::path::Path;

use trajcover::io_formats::{write_trajectories_csv, FormatSpec, Trajectories};
use trajcover::synthetic::{drifters, DrifterConfig};

const JOINTS: usize = 31;

fn main() -> trajcover::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    std::fs::create_dir_all(&dir)?;

    let cfg = DrifterConfig {
        curves: 12,
        points_per_curve: 120,
        domain: 60.0,
        ..DrifterConfig::default()
    };
    let curves = drifters(&cfg, 7)?;
    let traj = Trajectories {
        ids: (0..curves.len()).map(|i| format!("d{i:02}")).collect(),
        timestamps: curves
            .iter()
            .map(|c| Some((0..c.num_vertices()).map(|k| (6 * 3600 * k).to_string()).collect()))
            .collect(),
        curves,
    };
    let spec = FormatSpec {
        time: Some("t".into()),
        ..FormatSpec::default()
    };
    write_trajectories_csv(std::fs::File::create(dir.join("drifters_subset.csv"))?, &traj, &spec)?;

    // planar loop geometry; every joint moves by the same planar offset, so
    // pose-space distances are sqrt(31) times planar ones
    let radius = 10.0;
    let gap = 4.5;
    let mut frames: Vec<([f64; 2], &str)> = Vec::new();
    let mut center = [0.0, 0.0];
    let mut start_angle = 0.0;
    // ten frames per loop; the jump's half loop turns the chain away from
    // the walk region
    for (label, count) in [("walk", 40), ("jump", 25), ("wave", 35)] {
        for k in 0..count {
            let a = start_angle + TAU * k as f64 / 10.0;
            frames.push(([center[0] + radius * a.cos(), center[1] + radius * a.sin()], label));
        }
        // the next region lies beyond the last frame, along its radius
        let a = start_angle + TAU * (count - 1) as f64 / 10.0;
        let out = [a.cos(), a.sin()];
        let reach = 2.0 * radius + gap;
        center = [center[0] + reach * out[0], center[1] + reach * out[1]];
        start_angle = a + TAU / 2.0;
    }
    let offsets: Vec<[f64; 3]> = (0..JOINTS)
        .map(|j| {
            let j = j as f64;
            [0.3 * j, 1.7 * (j * 0.5).sin(), 0.9 * (j * 0.3).cos()]
        })
        .collect();
    let mut poses = csv::Writer::from_path(dir.join("mocap_poses.csv"))?;
    let header: Vec<String> = (0..JOINTS)
        .flat_map(|j| ["x", "y", "z"].map(|c| format!("j{j}_{c}")))
        .collect();
    poses.write_record(&header)?;
    for (p, _) in &frames {
        let row: Vec<String> = offsets
            .iter()
            .flat_map(|o| [o[0] + p[0], o[1] + p[1], o[2]])
            .map(|v| v.to_string())
            .collect();
        poses.write_record(&row)?;
    }
    poses.flush()?;
    let mut truth = csv::Writer::from_path(dir.join("mocap_truth.csv"))?;
    truth.write_record(["frame_index", "label"])?;
    for (f, (_, label)) in frames.iter().enumerate() {
        truth.write_record([f.to_string(), label.to_string()])?;
    }
    truth.flush()?;
    Ok(())
}
