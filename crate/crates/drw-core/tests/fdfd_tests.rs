//! End-to-end tests of the full-vector mode solver on the reference
//! cross-section: 160 µm × 80 µm core, ε_core = 1000, ε_clad = 12.

use drw_core::fdfd::{mode_overlap, solve_modes, solve_modes_opt, ModeClass, SolverOptions};
use drw_core::geometry::CrossSection;
use drw_core::grid::build_grid;
use drw_core::marcatili;
use drw_core::material::Material;

fn reference_cs() -> CrossSection {
    CrossSection::new(
        160e-6,
        80e-6,
        Material::new("core", 1000.0, 0.0).unwrap(),
        Material::new("clad", 12.0, 0.0).unwrap(),
    )
    .unwrap()
}

#[test]
fn fundamental_matches_closed_form_within_two_percent() {
    let cs = reference_cs();
    let f = 110e9;
    let grid = build_grid(&cs, f, 20).unwrap();
    let modes = solve_modes(&grid, f, 6).unwrap();
    assert!(!modes.is_empty());
    let m0 = &modes[0];

    let closed = marcatili::solve_mode(&cs, f, marcatili::Family::Ex, 1, 1).unwrap();
    let dev = (m0.neff() - closed.neff()).abs() / closed.neff();
    assert!(dev < 0.02, "closed-form deviation {dev:.4}");

    assert!(m0.rho_x > 0.99, "rho_x = {}", m0.rho_x);
    assert_eq!(m0.class, ModeClass::Lse);
    assert!((m0.power() - 1.0).abs() < 1e-10);
    assert!(m0.residual < 1e-7);
}

#[test]
fn mode_spectrum_matches_independent_reference() {
    // Effective indices computed independently for the same discretization
    // (same grid, same operators) with a general sparse eigensolver.
    let expected = [
        27.7069, 25.6393, 23.3892, 22.3755, 17.8179, 16.8126, 13.3981, 5.7858,
    ];
    let cs = reference_cs();
    let f = 110e9;
    let grid = build_grid(&cs, f, 20).unwrap();
    assert_eq!((grid.nx, grid.ny), (72, 53));

    let modes = solve_modes(&grid, f, 12).unwrap();
    assert!(
        modes.len() >= expected.len(),
        "found {} guided modes",
        modes.len()
    );
    for (k, want) in expected.iter().enumerate() {
        let got = modes[k].neff();
        assert!(
            (got - want).abs() < 5e-4,
            "mode {k}: neff {got:.6} vs reference {want}"
        );
    }
}

#[test]
fn modes_are_power_orthonormal() {
    let cs = reference_cs();
    let f = 110e9;
    let grid = build_grid(&cs, f, 20).unwrap();
    let modes = solve_modes(&grid, f, 6).unwrap();
    assert!(modes.len() >= 4);
    for i in 0..modes.len() {
        for j in 0..modes.len() {
            let ov = mode_overlap(&modes[i], &modes[j]).unwrap();
            let want = if i == j { 1.0 } else { 0.0 };
            assert!(
                (ov - want).abs() < 1e-4,
                "overlap({i},{j}) = {ov:e}"
            );
        }
    }
}

#[test]
fn solver_is_bit_deterministic() {
    let cs = reference_cs();
    let f = 110e9;
    let grid = build_grid(&cs, f, 20).unwrap();
    let a = solve_modes(&grid, f, 4).unwrap();
    let b = solve_modes(&grid, f, 4).unwrap();
    assert_eq!(a.len(), b.len());
    for (m1, m2) in a.iter().zip(&b) {
        assert_eq!(m1.beta.to_bits(), m2.beta.to_bits());
        for (u, v) in m1.ex.iter().zip(&m2.ex) {
            assert_eq!(u.to_bits(), v.to_bits());
        }
        for (u, v) in m1.hy.iter().zip(&m2.hy) {
            assert_eq!(u.to_bits(), v.to_bits());
        }
    }
}

#[test]
fn axis_swap_is_an_exact_symmetry() {
    // The same physical structure described with swapped axes must give the
    // same spectrum, with polarization fractions mirrored.
    let f = 110e9;
    let cs = reference_cs();
    let cs_swapped = CrossSection::new(
        80e-6,
        160e-6,
        Material::new("core", 1000.0, 0.0).unwrap(),
        Material::new("clad", 12.0, 0.0).unwrap(),
    )
    .unwrap();

    let grid = build_grid(&cs, f, 20).unwrap();
    let grid_swapped = build_grid(&cs_swapped, f, 20).unwrap();
    assert_eq!((grid_swapped.nx, grid_swapped.ny), (grid.ny, grid.nx));

    let modes = solve_modes(&grid, f, 4).unwrap();
    let swapped = solve_modes(&grid_swapped, f, 4).unwrap();
    assert_eq!(modes.len(), swapped.len());
    for (m, s) in modes.iter().zip(&swapped) {
        assert!(
            (m.neff() - s.neff()).abs() < 1e-9 * m.neff(),
            "{} vs {}",
            m.neff(),
            s.neff()
        );
        assert!(
            (m.rho_x - (1.0 - s.rho_x)).abs() < 1e-6,
            "rho_x {} vs mirrored {}",
            m.rho_x,
            1.0 - s.rho_x
        );
        assert!((s.power() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn lossy_core_changes_nothing_in_the_real_eigenproblem() {
    // The loss tangent enters downstream as a perturbation; the phase
    // constant from the real part must be identical.
    let f = 110e9;
    let lossless = build_grid(&reference_cs(), f, 20).unwrap();
    let lossy_cs = CrossSection::new(
        160e-6,
        80e-6,
        Material::new("core", 1000.0, 0.002).unwrap(),
        Material::new("clad", 12.0, 0.0).unwrap(),
    )
    .unwrap();
    let lossy = build_grid(&lossy_cs, f, 20).unwrap();
    let m1 = solve_modes(&lossless, f, 1).unwrap();
    let m2 = solve_modes(&lossy, f, 1).unwrap();
    assert_eq!(m1[0].beta.to_bits(), m2[0].beta.to_bits());
}

#[test]
fn subspace_override_and_seed_are_respected() {
    let cs = reference_cs();
    let f = 110e9;
    let grid = build_grid(&cs, f, 20).unwrap();
    let opts = SolverOptions {
        n_modes: 2,
        seed: 777,
        subspace: Some(80),
        ..SolverOptions::default()
    };
    let modes = solve_modes_opt(&grid, f, &opts).unwrap();
    assert!(modes.len() >= 2);
    // A different seed converges to the same eigenvalues.
    let base = solve_modes(&grid, f, 2).unwrap();
    for (m, b) in modes.iter().zip(&base) {
        assert!((m.beta - b.beta).abs() < 1e-6 * b.beta);
    }
}
