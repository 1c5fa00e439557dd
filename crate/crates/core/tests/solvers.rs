use oddsym_core::solve1d::{minimize, shoot, Init, MinimizeOptions, Preset, ShootOptions};
use oddsym_core::Problem;

#[test]
fn shooting_matches_finite_elements_on_long_interval() {
    let p = Problem::allen_cahn(20.0, 1.0).unwrap();
    let n = 4096;
    let fe = minimize(
        &p,
        &Init::Preset(Preset::OddTanh),
        n,
        &MinimizeOptions::default(),
    )
    .unwrap();
    let sh = shoot(
        &p,
        &ShootOptions {
            mesh: n,
            integrator_steps: 100_000,
            ..ShootOptions::default()
        },
    )
    .unwrap();
    let gap = fe.u.sup_distance(&sh.u);
    assert!(sh.residual_inf <= 1e-10);
    assert!(gap <= 1e-6, "{gap}");
    assert_eq!(fe.diagnostics.oddness_defect, 0.0);
    assert!(sh.diagnostics.oddness_defect <= 1e-12);
}
