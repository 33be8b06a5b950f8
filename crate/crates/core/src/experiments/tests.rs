use super::*;

#[test]
fn fixed_placement_is_the_listed_set() {
    let sc = Scenario::default();
    let w = warden_longitudes(&sc.warden_longitudes_deg, 4, &WardenPlacement::Fixed, 7).unwrap();
    assert_eq!(w, vec![92.0, 91.0, 89.0, 88.0]);
}

#[test]
fn uniform_placement_is_seeded_and_on_orbit() {
    let sc = Scenario::default();
    let p = WardenPlacement::Uniform { lo: 88.0, hi: 92.0 };
    let a = generate_wardens(&sc, 6, &p, 3).unwrap();
    let b = generate_wardens(&sc, 6, &p, 3).unwrap();
    let c = generate_wardens(&sc, 6, &p, 4).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    for n in &a {
        assert_eq!(n.position.z, 0.0);
        assert!((n.position.norm() - sc.orbit_radius()).abs() < 1e-6);
        let lon = n.position.y.atan2(n.position.x).to_degrees();
        assert!((88.0..=92.0).contains(&lon));
    }
}

fn small_rate_config() -> ExperimentConfig {
    let mut c = preset("fig8", true).unwrap();
    c.sweep = Some(Sweep {
        variable: "delta".into(),
        values: vec![0.0, 0.05],
    });
    c.seeds = 2;
    c.optimizer.n_grid = 90;
    c
}

#[test]
fn rate_run_is_reproducible_and_ordered() {
    let c = small_rate_config();
    let a = run_experiment(&c).unwrap();
    let b = run_experiment(&c).unwrap();
    assert_eq!(a.table, b.table);
    assert!(a.all_audits_passed(), "{:?}", a.meta.errors);
    assert_eq!(a.table.columns, vec!["delta", "R_OB", "R_JOBA", "samples", "failed_samples"]);
    let ob = a.table.column("R_OB").unwrap();
    assert!(ob[1] < ob[0]);
    assert_eq!(a.meta.config_hash, config_hash(&c).unwrap());
}

#[test]
fn dep_curve_run_writes_files() {
    let mut c = preset("fig3", true).unwrap();
    c.mc.n_trials = 20_000;
    c.tau_points = 5;
    let out = run_experiment(&c).unwrap();
    assert_eq!(out.table.rows.len(), 10);
    let dir = tempfile::tempdir().unwrap();
    let (csv, json) = out.write(dir.path()).unwrap();
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("rho,tau,xi_analytic,xi_lb,xi_emp,se\n"));
    let meta: RunMetadata = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(meta.config, c);
}

#[test]
fn point_failures_are_recorded() {
    let mut c = small_rate_config();
    c.designs = vec![Design::Zf];
    c.csi = CsiMode::Perfect;
    c.sweep = Some(Sweep {
        variable: "m_a".into(),
        values: vec![1.0, 4.0],
    });
    c.scenario.warden_longitudes_deg = vec![92.0, 91.0, 89.0, 88.0];
    let out = run_experiment(&c).unwrap();
    // A single antenna cannot null four wardens.
    assert!(out.table.rows[0][1].is_nan());
    assert!(out.table.rows[1][1].is_finite());
    assert!(!out.all_audits_passed());
}
