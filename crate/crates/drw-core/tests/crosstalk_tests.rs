//! Coupled-pair crosstalk versus an independent reference implementation
//! (same discretization, scipy shift-invert eigensolver), plus physics
//! invariants: exponential decay of κ with gap at the isolated-mode
//! cladding rate, antisymmetric-leading supermode ordering, and a
//! mid-gap line-integral consistency check.

use drw_core::crosstalk::{
    composite_grid, coupling_via_line_integral, crosstalk_sweep, fext_db,
    isolated_decay_rate, log_kappa_fit, supermode_split, GuideSelection, Parity,
};
use drw_core::geometry::CrossSection;
use drw_core::material::Material;

fn paper_cs() -> CrossSection {
    CrossSection::new(
        160e-6,
        80e-6,
        Material::new("core", 1000.0, 0.0).unwrap(),
        Material::new("clad", 12.0, 0.0).unwrap(),
    )
    .unwrap()
}

const GAPS_UM: [f64; 5] = [20.0, 40.0, 60.0, 80.0, 100.0];

/// Supermode κ at 100 GHz from the reference run, rad/m, at 20…100 µm.
const KAPPA_100G: [f64; 5] = [3.937432, 0.9983856, 0.2223391, 4.633373e-2, 8.546133e-3];

/// Supermode κ at 150 GHz from the reference run, rad/m.
const KAPPA_150G: [f64; 5] =
    [9.005323e-2, 2.578946e-2, 5.755617e-3, 1.123637e-3, 2.459669e-4];

#[test]
fn supermode_splitting_matches_reference_at_100_ghz() {
    let cs = paper_cs();
    let gaps: Vec<f64> = GAPS_UM.iter().map(|g| g * 1e-6).collect();
    let pairs = crosstalk_sweep(&cs, &gaps, 100e9, 20).unwrap();

    let expected_nx = [223usize, 128, 133, 138, 143];
    for (i, p) in pairs.iter().enumerate() {
        // these gaps land on exact cell counts — no snap
        assert!(
            (p.gap - gaps[i]).abs() < 1e-12 * p.gap,
            "gap {} µm snapped to {:.6} µm",
            GAPS_UM[i],
            p.gap * 1e6
        );
        let c = composite_grid(&cs, gaps[i], 100e9, 20, GuideSelection::Both).unwrap();
        assert_eq!((c.grid.nx, c.grid.ny), (expected_nx[i], 51));

        // the antisymmetric supermode leads for this high-contrast pair
        assert_eq!(
            p.leading_parity,
            Parity::Odd,
            "at gap {} µm",
            GAPS_UM[i]
        );
        assert!(p.beta_odd > p.beta_even);

        let tol = if GAPS_UM[i] <= 60.0 { 5e-3 } else { 1e-2 };
        let rel = (p.kappa - KAPPA_100G[i]).abs() / KAPPA_100G[i];
        assert!(
            rel < tol,
            "kappa at gap {} µm: got {:.6e}, want {:.6e} (rel {:.2e})",
            GAPS_UM[i],
            p.kappa,
            KAPPA_100G[i],
            rel
        );
    }
    for w in pairs.windows(2) {
        assert!(w[1].kappa < w[0].kappa, "kappa must decrease with gap");
    }
    // beat length grows from mm to tens of cm over this range
    assert!(pairs[0].beat_length() < 1.0);
    assert!(pairs[4].beat_length() > 10.0 * pairs[0].beat_length());
}

#[test]
fn kappa_decays_at_the_cladding_rate_at_150_ghz() {
    let cs = paper_cs();
    let gaps: Vec<f64> = GAPS_UM.iter().map(|g| g * 1e-6).collect();
    let pairs = crosstalk_sweep(&cs, &gaps, 150e9, 20).unwrap();

    for (i, p) in pairs.iter().enumerate() {
        let tol = if i == GAPS_UM.len() - 1 { 5e-2 } else { 2e-2 };
        let rel = (p.kappa - KAPPA_150G[i]).abs() / KAPPA_150G[i];
        assert!(
            rel < tol,
            "kappa at gap {} µm: got {:.6e}, want {:.6e} (rel {:.2e})",
            GAPS_UM[i],
            p.kappa,
            KAPPA_150G[i],
            rel
        );
        // the splitting changes sign across the band: here the symmetric
        // supermode leads, opposite to the low-band ordering
        assert_eq!(p.leading_parity, Parity::Even);
    }

    let kappas: Vec<f64> = pairs.iter().map(|p| p.kappa).collect();
    let fit = log_kappa_fit(&gaps, &kappas).unwrap();
    assert!(
        fit.r_squared > 0.98,
        "ln κ vs gap should be nearly straight, R² = {:.6}",
        fit.r_squared
    );
    assert!(fit.slope < 0.0);

    let (beta_iso, gamma_clad) = isolated_decay_rate(&cs, 150e9, 20).unwrap();
    assert!(
        (beta_iso - 92286.731729).abs() < 1e-4 * beta_iso,
        "isolated beta {beta_iso}"
    );
    assert!(
        (gamma_clad - 91641.9203).abs() < 1e-4 * gamma_clad,
        "cladding decay rate {gamma_clad}"
    );
    let ratio = fit.slope.abs() / gamma_clad;
    assert!(
        (ratio - 1.0).abs() < 0.25,
        "fitted decay {:.1} vs cladding rate {:.1} (ratio {:.4})",
        fit.slope.abs(),
        gamma_clad,
        ratio
    );
}

#[test]
fn line_integral_coupling_agrees_with_supermode_splitting() {
    let cs = paper_cs();
    for gap_um in [20.0, 60.0, 100.0] {
        let gap = gap_um * 1e-6;
        let pair = supermode_split(&cs, gap, 100e9, 20).unwrap();
        let kappa_line = coupling_via_line_integral(&cs, gap, 100e9, 20).unwrap();
        let ratio = kappa_line / pair.kappa;
        assert!(
            (ratio - 1.0).abs() < 0.2,
            "line-integral κ {:.4e} vs supermode κ {:.4e} at {} µm (ratio {:.4})",
            kappa_line,
            pair.kappa,
            gap_um,
            ratio
        );
    }
}

#[test]
fn tight_gap_still_yields_a_split_pair() {
    let cs = paper_cs();
    // 10 µm does not align with the cell lattice at 100 GHz; it must snap
    // to whole cells and still resolve an even/odd fundamental pair
    let pair = supermode_split(&cs, 10e-6, 100e9, 20).unwrap();
    assert!(pair.gap_requested == 10e-6);
    assert!((pair.gap - 10e-6).abs() < 2e-6, "snapped gap {}", pair.gap);
    let wider = supermode_split(&cs, 20e-6, 100e9, 20).unwrap();
    assert!(
        pair.kappa > wider.kappa,
        "κ(10 µm) = {} should exceed κ(20 µm) = {}",
        pair.kappa,
        wider.kappa
    );
}

#[test]
fn millimeter_scale_crosstalk_is_negligible_at_wide_gaps() {
    let cs = paper_cs();
    // at the widest default gap the far-end leakage over 1 mm stays tiny
    let pair = supermode_split(&cs, 100e-6, 150e9, 20).unwrap();
    let fext = fext_db(pair.kappa, 1e-3);
    assert!(
        fext <= -55.0,
        "FEXT over 1 mm at 100 µm gap: {fext:.1} dB"
    );
    // and tightening the gap by 5× costs tens of dB
    let tight = supermode_split(&cs, 20e-6, 150e9, 20).unwrap();
    let fext_tight = fext_db(tight.kappa, 1e-3);
    assert!(fext_tight > fext + 20.0);
}
