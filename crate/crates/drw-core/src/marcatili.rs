//! Closed-form approximate mode solver for rectangular dielectric waveguides.
//!
//! The cross-section is factored into two independent slab problems, one per
//! transverse axis. Each axis solves the symmetric-slab dispersion relation
//!
//! ```text
//! kt * w = p * pi - 2 * atan(eta * kt / gamma),   gamma^2 = k0^2 (eps1 - eps2) - kt^2
//! ```
//!
//! where `eta = 1` when the dominant electric field is tangential to that
//! wall and `eta = eps2/eps1` when it is normal to it. The axial phase
//! constant follows from `beta^2 = k0^2 eps1 - kx^2 - ky^2`.
//!
//! This model is asymptotically exact for high core/cladding contrast and
//! serves both as the fast path for taper analysis and as an independent
//! cross-check of the full-vector solver.

use crate::constants;
use crate::error::{Error, Result};
use crate::geometry::CrossSection;

/// Mode family: which transverse electric-field component dominates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Dominant E along x (the `a` axis).
    Ex,
    /// Dominant E along y (the `b` axis).
    Ey,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Ex => write!(f, "Ex"),
            Family::Ey => write!(f, "Ey"),
        }
    }
}

/// Solution of one transverse slab problem.
#[derive(Debug, Clone, Copy)]
pub struct TransverseSolution {
    /// Transverse wavenumber inside the core (rad/m).
    pub kt: f64,
    /// Decay rate in the cladding (1/m).
    pub gamma: f64,
}

/// A guided mode of the closed-form solver.
#[derive(Debug, Clone)]
pub struct MarcatiliMode {
    pub family: Family,
    /// Transverse order along x (1-based).
    pub p: u32,
    /// Transverse order along y (1-based).
    pub q: u32,
    /// Frequency in Hz.
    pub frequency: f64,
    /// Transverse wavenumber along x (rad/m).
    pub kx: f64,
    /// Transverse wavenumber along y (rad/m).
    pub ky: f64,
    /// Cladding decay rate along x (1/m).
    pub gamma_x: f64,
    /// Cladding decay rate along y (1/m).
    pub gamma_y: f64,
    /// Axial phase constant (rad/m).
    pub beta: f64,
    k0: f64,
    a: f64,
    b: f64,
}

impl MarcatiliMode {
    /// Effective index `beta / k0`.
    pub fn neff(&self) -> f64 {
        self.beta / self.k0
    }

    /// Dominant-E transverse profile at `(x, y)`, measured from the core
    /// center. Unit amplitude in the core; continuous across the interfaces;
    /// exponential in the cladding. Corner regions use the product of the two
    /// axis decays.
    pub fn field_at(&self, x: f64, y: f64) -> f64 {
        self.profile_x(x) * self.profile_y(y)
    }

    /// The x factor of the separable dominant-E profile.
    pub fn profile_x(&self, x: f64) -> f64 {
        profile_1d(x, self.a, self.p, self.kx, self.gamma_x)
    }

    /// The y factor of the separable dominant-E profile.
    pub fn profile_y(&self, y: f64) -> f64 {
        profile_1d(y, self.b, self.q, self.ky, self.gamma_y)
    }

    /// Core dimensions `(a, b)` this mode was solved for, m.
    pub fn core_dims(&self) -> (f64, f64) {
        (self.a, self.b)
    }
}

/// One-dimensional slab profile: cosine (odd order) or sine (even order) in
/// the core, amplitude-matched exponential tails outside.
fn profile_1d(s: f64, w: f64, order: u32, kt: f64, gamma: f64) -> f64 {
    let h = 0.5 * w;
    let odd = order % 2 == 1;
    if s.abs() <= h {
        if odd {
            (kt * s).cos()
        } else {
            (kt * s).sin()
        }
    } else {
        let amp = if odd {
            (kt * h).cos()
        } else {
            (kt * h).sin() * s.signum()
        };
        amp * (-gamma * (s.abs() - h)).exp()
    }
}

/// Solves the symmetric-slab transverse dispersion relation for order `p`.
///
/// Returns `None` when the order is below cutoff for this width/frequency.
pub fn solve_transverse(
    w: f64,
    k0: f64,
    eps1: f64,
    eps2: f64,
    p: u32,
    eta: f64,
) -> Result<Option<TransverseSolution>> {
    assert!(p >= 1, "transverse order is 1-based");
    let gmax2 = k0 * k0 * (eps1 - eps2);
    let kmax = gmax2.sqrt();
    let pf = f64::from(p);

    let f = |kt: f64| -> f64 {
        let g2 = gmax2 - kt * kt;
        if g2 <= 0.0 {
            return kt * w - pf * std::f64::consts::PI + std::f64::consts::PI;
        }
        kt * w - pf * std::f64::consts::PI + 2.0 * (eta * kt / g2.sqrt()).atan()
    };

    let mut lo = (pf - 1.0) * std::f64::consts::PI / w + 1e-9;
    let mut hi = (pf * std::f64::consts::PI / w).min(kmax * (1.0 - 1e-14));
    if hi <= lo || f(lo) * f(hi) > 0.0 {
        return Ok(None); // below cutoff
    }

    // Bisection: f is strictly increasing on the bracket.
    let flo_neg = f(lo) < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == flo_neg {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * kmax {
            break;
        }
    }
    let mut kt = 0.5 * (lo + hi);

    // Newton polish for the last digits; derivative from the closed form.
    for _ in 0..3 {
        let g2 = gmax2 - kt * kt;
        if g2 <= 0.0 {
            break;
        }
        let g = g2.sqrt();
        let u = eta * kt / g;
        let fp = w + 2.0 * (eta * gmax2 / (g2 * g)) / (1.0 + u * u);
        let step = f(kt) / fp;
        let next = kt - step;
        if next > lo && next < hi {
            kt = next;
        }
    }

    let resid = f(kt).abs();
    if resid > 1e-10 * (1.0 + pf * std::f64::consts::PI) {
        return Err(Error::NoConvergence(format!(
            "transverse dispersion relation residual {resid:.3e} for order {p}"
        )));
    }
    let gamma = (gmax2 - kt * kt).max(0.0).sqrt();
    Ok(Some(TransverseSolution { kt, gamma }))
}

/// Relative margin by which `beta^2` must exceed the cladding light line for
/// a mode to count as guided.
const GUIDED_MARGIN: f64 = 1e-6;

/// Solves the `(family, p, q)` mode at frequency `f`.
pub fn solve_mode(
    cs: &CrossSection,
    f: f64,
    family: Family,
    p: u32,
    q: u32,
) -> Result<MarcatiliMode> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidInput(
            "mode orders are 1-based; got p or q equal to 0".into(),
        ));
    }
    if !(f.is_finite() && f > 0.0) {
        return Err(Error::InvalidInput(format!("invalid frequency {f}")));
    }
    let k0 = constants::k0(f);
    let eps1 = cs.core.eps_r;
    let eps2 = cs.clad.eps_r;
    let eta_normal = eps2 / eps1;
    // Walls normal to the dominant E see eta = eps2/eps1; tangential walls 1.
    let (eta_x, eta_y) = match family {
        Family::Ex => (eta_normal, 1.0),
        Family::Ey => (1.0, eta_normal),
    };

    let below = || Error::BelowCutoff {
        family: family.to_string(),
        p,
        q,
        f_ghz: f / 1e9,
    };

    let sx = solve_transverse(cs.a, k0, eps1, eps2, p, eta_x)?.ok_or_else(below)?;
    let sy = solve_transverse(cs.b, k0, eps1, eps2, q, eta_y)?.ok_or_else(below)?;

    let beta2 = k0 * k0 * eps1 - sx.kt * sx.kt - sy.kt * sy.kt;
    if beta2 <= k0 * k0 * eps2 * (1.0 + GUIDED_MARGIN) {
        return Err(below());
    }

    Ok(MarcatiliMode {
        family,
        p,
        q,
        frequency: f,
        kx: sx.kt,
        ky: sy.kt,
        gamma_x: sx.gamma,
        gamma_y: sy.gamma,
        beta: beta2.sqrt(),
        k0,
        a: cs.a,
        b: cs.b,
    })
}

/// Enumerates all guided modes of both families with orders up to
/// `max_order` along each axis, sorted by descending phase constant.
pub fn guided_modes(cs: &CrossSection, f: f64, max_order: u32) -> Result<Vec<MarcatiliMode>> {
    let mut modes = Vec::new();
    for family in [Family::Ex, Family::Ey] {
        for p in 1..=max_order {
            for q in 1..=max_order {
                match solve_mode(cs, f, family, p, q) {
                    Ok(m) => modes.push(m),
                    Err(Error::BelowCutoff { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }
    modes.sort_by(|m1, m2| m2.beta.partial_cmp(&m1.beta).unwrap());
    Ok(modes)
}

/// The guided mode with the largest phase constant.
pub fn fundamental(cs: &CrossSection, f: f64) -> Result<MarcatiliMode> {
    guided_modes(cs, f, 3)?
        .into_iter()
        .next()
        .ok_or(Error::NoGuidedMode { f_ghz: f / 1e9 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::Material;

    fn test_cs() -> CrossSection {
        CrossSection::new(
            160e-6,
            80e-6,
            Material::new("core", 1000.0, 0.0).unwrap(),
            Material::new("clad", 12.0, 0.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn dispersion_relation_residual_is_tiny() {
        let cs = test_cs();
        let k0 = constants::k0(110e9);
        for (family, p, q) in [
            (Family::Ex, 1, 1),
            (Family::Ex, 2, 1),
            (Family::Ey, 1, 1),
            (Family::Ey, 2, 1),
        ] {
            let m = solve_mode(&cs, 110e9, family, p, q).unwrap();
            let eta_nrm = cs.clad.eps_r / cs.core.eps_r;
            let (eta_x, eta_y) = match family {
                Family::Ex => (eta_nrm, 1.0),
                Family::Ey => (1.0, eta_nrm),
            };
            let rx = m.kx * cs.a - f64::from(p) * std::f64::consts::PI
                + 2.0 * (eta_x * m.kx / m.gamma_x).atan();
            let ry = m.ky * cs.b - f64::from(q) * std::f64::consts::PI
                + 2.0 * (eta_y * m.ky / m.gamma_y).atan();
            assert!(rx.abs() < 1e-10, "{family}{p}{q}: x residual {rx:e}");
            assert!(ry.abs() < 1e-10, "{family}{p}{q}: y residual {ry:e}");
            // Wavenumber closure.
            let sum = m.beta * m.beta + m.kx * m.kx + m.ky * m.ky;
            let want = k0 * k0 * cs.core.eps_r;
            assert!((sum - want).abs() / want < 1e-12);
        }
    }

    #[test]
    fn fundamental_effective_index_known_values() {
        // Frozen from an independent bisection sweep of the same relation.
        let cs = test_cs();
        let cases = [
            (90e9, 26.128051730292),
            (110e9, 27.743960859084),
            (130e9, 28.723135508954),
            (150e9, 29.367048719727),
        ];
        for (f, neff) in cases {
            let m = solve_mode(&cs, f, Family::Ex, 1, 1).unwrap();
            assert!(
                (m.neff() - neff).abs() < 1e-9,
                "{} GHz: {} vs {}",
                f / 1e9,
                m.neff(),
                neff
            );
        }
        let m110 = solve_mode(&cs, 110e9, Family::Ex, 1, 1).unwrap();
        assert!((m110.beta - 6.396174648e4).abs() / 6.396174648e4 < 1e-9);
        let ey = solve_mode(&cs, 110e9, Family::Ey, 1, 1).unwrap();
        assert!((ey.neff() - 25.691702441972).abs() < 1e-9);
    }

    #[test]
    fn deep_confinement_approaches_hard_wall() {
        // At 1 THz the normal-E wall solution approaches the metallic-wall
        // limit kt -> pi/a to well within 2%.
        let cs = test_cs();
        let m = solve_mode(&cs, 1e12, Family::Ex, 1, 1).unwrap();
        let hard = std::f64::consts::PI / cs.a;
        let dev = (m.kx - hard).abs() / hard;
        assert!(dev < 0.02, "relative deviation {dev}");
        assert!(dev < 0.005, "expected sub-0.5% at this contrast, got {dev}");
    }

    #[test]
    fn guided_mode_counts_and_ordering() {
        let cs = test_cs();
        for (f, count) in [(90e9, 5usize), (110e9, 8), (150e9, 17)] {
            let modes = guided_modes(&cs, f, 7).unwrap();
            assert_eq!(modes.len(), count, "count at {} GHz", f / 1e9);
            for w in modes.windows(2) {
                assert!(w[0].beta >= w[1].beta, "not sorted by beta");
            }
        }
        let top = fundamental(&cs, 110e9).unwrap();
        assert_eq!((top.family, top.p, top.q), (Family::Ex, 1, 1));
    }

    #[test]
    fn high_orders_report_below_cutoff() {
        let cs = test_cs();
        match solve_mode(&cs, 90e9, Family::Ex, 7, 7) {
            Err(Error::BelowCutoff { p, q, .. }) => {
                assert_eq!((p, q), (7, 7));
            }
            other => panic!("expected BelowCutoff, got {other:?}"),
        }
    }

    #[test]
    fn field_profile_is_continuous_and_decaying() {
        let cs = test_cs();
        let m = solve_mode(&cs, 110e9, Family::Ex, 1, 1).unwrap();
        let (hx, hy) = (0.5 * cs.a, 0.5 * cs.b);
        // Continuity across each interface: with probes 1e-12 m apart the
        // jump is bounded by slope * distance ~ kt * 1e-12 ~ 1e-7.
        for y in [0.0, 0.3 * hy] {
            let inside = m.field_at(hx - 1e-12, y);
            let outside = m.field_at(hx + 1e-12, y);
            assert!((inside - outside).abs() < 1e-7);
        }
        for x in [0.0, 0.5 * hx] {
            let inside = m.field_at(x, hy - 1e-12);
            let outside = m.field_at(x, hy + 1e-12);
            assert!((inside - outside).abs() < 1e-7);
        }
        // Monotone decay outside the core.
        let near = m.field_at(hx + 5e-6, 0.0).abs();
        let far = m.field_at(hx + 20e-6, 0.0).abs();
        assert!(far < near && near < 1.0);
        // Peak at the center for the fundamental.
        assert!((m.field_at(0.0, 0.0) - 1.0).abs() < 1e-12);
        // Even symmetry for odd orders.
        assert!((m.field_at(30e-6, 10e-6) - m.field_at(-30e-6, -10e-6)).abs() < 1e-12);
        // Odd symmetry along x for p = 2.
        let m21 = solve_mode(&cs, 110e9, Family::Ex, 2, 1).unwrap();
        assert!((m21.field_at(30e-6, 0.0) + m21.field_at(-30e-6, 0.0)).abs() < 1e-12);
        assert!(m21.field_at(0.0, 0.0).abs() < 1e-12);
    }

    #[test]
    fn effective_index_grows_with_frequency() {
        let cs = test_cs();
        let mut prev = 0.0;
        for i in 0..8 {
            let f = 80e9 + f64::from(i) * 10e9;
            let m = solve_mode(&cs, f, Family::Ex, 1, 1).unwrap();
            assert!(m.neff() > prev);
            prev = m.neff();
        }
    }
}
