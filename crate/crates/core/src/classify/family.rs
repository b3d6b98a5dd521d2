//! Super-adapted systems with all entries non-zero, and the geodesic orbit
//! metrics they carry.
//!
//! For `0 < z_1 < ... < z_m`, `φ(t) = Σ z_k / (z_k - t)` has one root `t_i` in
//! each `(z_i, z_{i+1})`, and `b^i_k ∝ z_k / (z_k - t_i)` is super-adapted with
//! `b^i ⋄ b^j = μ_j t_i/(t_i - t_j) b^i + μ_i t_j/(t_j - t_i) b^j`. The metrics
//! `γ_i = t_i / (ρ + λ t_i)` on it are geodesic orbit.

use nalgebra::DVector;

use crate::coeff::AdaptedSystem;
use crate::error::{Error, Result};
use crate::metric::MetricT;

/// Fraction of each interval `(z_i, z_{i+1})` cut from both ends before
/// bisecting, keeping the bracket away from the poles of `φ`.
pub const BRACKET_SHRINK: f64 = 1e-9;

pub fn phi(z: &[f64], t: f64) -> f64 {
    z.iter().map(|&zk| zk / (zk - t)).sum()
}

fn validate_z(z: &[f64]) -> Result<()> {
    if z.len() < 2 {
        return Err(Error::InvalidParameter("need at least two z values".into()));
    }
    if let Some(bad) = z.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(Error::InvalidParameter(format!("z values must be positive, got {bad}")));
    }
    if let Some(w) = z.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter(format!(
            "z values must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// The `m - 1` roots of `φ`, one per interval, by bisection to full precision.
pub fn phi_roots(z: &[f64]) -> Result<Vec<f64>> {
    validate_z(z)?;
    let mut roots = Vec::with_capacity(z.len() - 1);
    for w in z.windows(2) {
        let eps = BRACKET_SHRINK * (w[1] - w[0]);
        let (mut lo, mut hi) = (w[0] + eps, w[1] - eps);
        // φ → -∞ just right of z_i and → +∞ just left of z_{i+1}
        if !(phi(z, lo) < 0.0 && phi(z, hi) > 0.0) {
            return Err(Error::NoBracket { lo, hi });
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if phi(z, mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    Ok(roots)
}

/// The super-adapted system built from `z`; `gammas` holds the roots `t_i`.
pub fn generate_super_adapted(z: &[f64]) -> Result<AdaptedSystem> {
    let roots = phi_roots(z)?;
    let vectors = roots
        .iter()
        .map(|&t| DVector::from_iterator(z.len(), z.iter().map(|&zk| zk / (zk - t))).normalize())
        .collect();
    AdaptedSystem::new(vectors, roots)
}

/// `γ_i = t_i / (ρ + λ t_i)` on the system of [`generate_super_adapted`].
pub fn go_family_system(z: &[f64], rho: f64, lambda: f64) -> Result<AdaptedSystem> {
    if !(rho.is_finite() && rho != 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "rho must be finite and non-zero, lambda finite (rho = {rho}, lambda = {lambda})"
        )));
    }
    let mut sys = generate_super_adapted(z)?;
    for (i, g) in sys.gammas.iter_mut().enumerate() {
        let t = *g;
        *g = t / (rho + lambda * t);
        if !(g.is_finite() && *g > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma_{} = t/(rho + lambda t) = {} is not positive (t = {t})",
                i + 1,
                g
            )));
        }
    }
    Ok(sys)
}

pub fn go_family(z: &[f64], rho: f64, lambda: f64) -> Result<MetricT> {
    MetricT::from_system(&go_family_system(z, rho, lambda)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::go::classify_go;
    use crate::coeff::{is_adapted, is_super_adapted};
    use crate::Tolerances;
    use proptest::prelude::*;

    #[test]
    fn roots_for_123_solve_the_quadratic() {
        // φ(t) = 0 ⟺ 3t² - 11t + 9 = 0
        let r = phi_roots(&[1.0, 2.0, 3.0]).unwrap();
        let d = 13f64.sqrt();
        assert!((r[0] - (11.0 - d) / 6.0).abs() < 1e-12);
        assert!((r[1] - (11.0 + d) / 6.0).abs() < 1e-12);
    }

    #[test]
    fn two_point_system() {
        let sys = generate_super_adapted(&[1.0, 2.0]).unwrap();
        assert!((sys.gammas[0] - 4.0 / 3.0).abs() < 1e-14);
        let b = &sys.vectors[0];
        let h = 1.0 / 2f64.sqrt();
        assert!((b[0] + h).abs() < 1e-14 && (b[1] - h).abs() < 1e-14);
    }

    #[test]
    fn invalid_z_rejected() {
        assert!(generate_super_adapted(&[1.0]).is_err());
        assert!(generate_super_adapted(&[2.0, 1.0]).is_err());
        assert!(generate_super_adapted(&[1.0, 1.0]).is_err());
        assert!(generate_super_adapted(&[-1.0, 1.0]).is_err());
    }

    #[test]
    fn family_parameters() {
        let sys = go_family_system(&[1.0, 2.0, 3.0], 1.0, 0.0).unwrap();
        let d = 13f64.sqrt();
        assert!((sys.gammas[0] - (11.0 - d) / 6.0).abs() < 1e-12);
        let sys = go_family_system(&[1.0, 2.0, 3.0, 4.0], 1.0, 1.0).unwrap();
        let t = phi_roots(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        for (g, t) in sys.gammas.iter().zip(t) {
            assert!((g - t / (1.0 + t)).abs() < 1e-14);
        }
        let err = go_family(&[1.0, 2.0, 3.0], 1.0, -0.6).unwrap_err();
        assert!(err.to_string().contains("gamma_2"), "{err}");
        assert!(go_family(&[1.0, 2.0], 0.0, 1.0).is_err());
    }

    #[test]
    fn homothety_when_lambda_vanishes() {
        let a = go_family_system(&[1.0, 2.5, 4.0], 0.25, 0.0).unwrap();
        let t = phi_roots(&[1.0, 2.5, 4.0]).unwrap();
        for (g, t) in a.gammas.iter().zip(t) {
            assert!((g - 4.0 * t).abs() < 1e-12);
        }
    }

    fn z_strategy() -> impl Strategy<Value = Vec<f64>> {
        (3usize..7).prop_flat_map(|m| {
            (0.1f64..3.0, proptest::collection::vec(0.05f64..2.0, m - 1)).prop_map(|(z0, gaps)| {
                let mut z = vec![z0];
                for g in gaps {
                    z.push(z.last().unwrap() + g);
                }
                z
            })
        })
    }

    proptest! {
        #[test]
        fn generated_systems_are_super_adapted(z in z_strategy(), c in 0.1f64..10.0) {
            let sys = generate_super_adapted(&z).unwrap();
            prop_assert!(is_adapted(&sys, 1e-12));
            prop_assert!(is_super_adapted(&sys, 1e-12).passed);
            for (t, w) in sys.gammas.iter().zip(z.windows(2)) {
                prop_assert!(w[0] < *t && *t < w[1]);
            }
            let scaled: Vec<f64> = z.iter().map(|x| x * c).collect();
            let other = generate_super_adapted(&scaled).unwrap();
            for (a, b) in sys.vectors.iter().zip(&other.vectors) {
                prop_assert!((a - b).amax() < 1e-9);
            }
        }

        #[test]
        fn diamond_coefficients_match_closed_form(z in z_strategy()) {
            let sys = generate_super_adapted(&z).unwrap();
            let check = is_super_adapted(&sys, 1e-10);
            let t = &sys.gammas;
            // μ_i is the normalising factor of z_k/(z_k - t_i)
            let mu: Vec<f64> = t
                .iter()
                .map(|&ti| 1.0 / z.iter().map(|&zk| (zk / (zk - ti)).powi(2)).sum::<f64>().sqrt())
                .collect();
            for i in 0..t.len() {
                for j in 0..t.len() {
                    if i != j {
                        let want = mu[i] * t[j] / (t[j] - t[i]);
                        prop_assert!((check.coef_on_bj(i, j) - want).abs() < 1e-9 * want.abs().max(1.0));
                    }
                }
            }
        }

        #[test]
        fn family_metrics_are_go_with_simple_spectrum(
            z in z_strategy(),
            rho in 0.2f64..3.0,
            lambda in 0.0f64..2.0,
        ) {
            let t = go_family(&z, rho, lambda).unwrap();
            let r = classify_go(&t, &Tolerances::default());
            let cert = r.certificate().expect("family metric is GO");
            prop_assert!(cert.clusters.iter().all(|c| c.len() == 1));
            prop_assert!(cert.c.iter().all(|c| c.abs() > 1e-10));
        }
    }
}
