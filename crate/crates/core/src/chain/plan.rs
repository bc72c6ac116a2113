//! Parameter bookkeeping for the ball-to-ball statement and the nested
//! family built from it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::compute_constants;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Largest admissible `eps` for the planners.
pub const PLAN_EPS0: f64 = 0.1;

/// `c` evaluated once at `eps0 = 0.1`, `A = 1`, `M = 8`, so that the
/// planner constants do not move with `eps`.
pub fn planner_c() -> f64 {
    compute_constants(PLAN_EPS0, 1.0, 8.0).c
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= PLAN_EPS0 {
        Ok(())
    } else {
        Err(Error::domain("plan", format!("eps must lie in (0, {PLAN_EPS0}], got {eps}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanKH {
    pub eps: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub c: f64,
    pub c_kh: f64,
    pub c_prime: f64,
    /// `C_kh S^2 / sqrt(R - sqrt 3)`.
    pub target_radius: f64,
    /// `10 sqrt(eps) T^2`, equal to the above.
    pub inner_radius: f64,
    pub in_domain: bool,
}

/// `(S, R) = (sqrt(eps) T, sqrt 3 + c eps)` with `C_kh = 10 sqrt c`,
/// `C' = 9c`.
pub fn plan_kh(eps: f64, t: f64) -> Result<PlanKH> {
    check_eps(eps)?;
    if !(t > 1.0 / 3.0) || !t.is_finite() {
        return Err(Error::domain("plan_kh", format!("T must exceed 1/3, got {t}")));
    }
    let c = planner_c();
    let s = eps.sqrt() * t;
    let r = SQRT_3 + c * eps;
    let c_kh = 10.0 * c.sqrt();
    let c_prime = 9.0 * c;
    Ok(PlanKH {
        eps,
        t,
        s,
        r,
        c,
        c_kh,
        c_prime,
        target_radius: c_kh * s * s / (r - SQRT_3).sqrt(),
        inner_radius: 10.0 * eps.sqrt() * t * t,
        in_domain: in_domain2(s, r, c_prime),
    })
}

/// `sqrt 3 < R < sqrt 3 + C' S^2`.
pub fn in_domain2(s: f64, r: f64, c_prime: f64) -> bool {
    r > SQRT_3 && r < SQRT_3 + c_prime * s * s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanFamily {
    pub eps: f64,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "R")]
    pub r: f64,
    /// Radii of `B^2(1 - eps) x B(1/eps)`.
    pub domain_radii: (f64, f64),
    /// `(sqrt 3, 3^(-1/4) C_kh / sqrt(eps^5 (1 - eps)))`.
    pub target_radii: (f64, f64),
    /// The second target radius obtained by conjugating the planner output
    /// with the `sqrt(3)/R` scaling.
    pub target_radius_scaled: f64,
    pub in_domain: bool,
}

pub fn plan_family(eps: f64) -> Result<PlanFamily> {
    check_eps(eps)?;
    let c = planner_c();
    let c_kh = 10.0 * c.sqrt();
    let s = 1.0 / (eps * (1.0 - eps));
    let r = SQRT_3 / (1.0 - eps);
    let scale = SQRT_3 / r;
    Ok(PlanFamily {
        eps,
        s,
        r,
        domain_radii: (scale * 1.0, scale * s),
        target_radii: (
            SQRT_3,
            3f64.powf(-0.25) * c_kh / (eps.powi(5) * (1.0 - eps)).sqrt(),
        ),
        target_radius_scaled: scale * c_kh * s * s / (r - SQRT_3).sqrt(),
        in_domain: in_domain2(s, r, 9.0 * c),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NestingPair {
    pub s: f64,
    pub t: f64,
    /// `(1 - t) - (1 - s)`.
    pub inner_gap: f64,
    /// `1/t - 1/s`.
    pub outer_gap: f64,
    pub nested: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeWitness {
    pub p1_norm: f64,
    pub p2_norm: f64,
    pub witness_eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestingReport {
    pub eps_list: Vec<f64>,
    pub pairs: Vec<NestingPair>,
    pub probes: Vec<ProbeWitness>,
    pub passed: bool,
}

/// Default probes of `B^2(1) x R^(2n-2)` used for the exhaustion witness.
pub const DEFAULT_PROBES: [(f64, f64); 4] = [(0.0, 0.0), (0.5, 5.0), (0.999, 50.0), (0.9999, 1e3)];

/// Closure containment of consecutive domains, plus for each probe an `eps`
/// from the list, or from its extension by repeated halving, whose open
/// domain contains the probe.
pub fn check_nesting(eps_list: &[f64], probes: &[(f64, f64)]) -> Result<NestingReport> {
    if eps_list.is_empty() {
        return Err(Error::Usage("empty eps list".into()));
    }
    for &e in eps_list {
        if !(e > 0.0 && e <= PLAN_EPS0) {
            return Err(Error::Usage(format!("eps {e} outside (0, {PLAN_EPS0}]")));
        }
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Usage("eps list must be strictly decreasing".into()));
    }
    let pairs: Vec<NestingPair> = eps_list
        .windows(2)
        .map(|w| {
            let (s, t) = (w[0], w[1]);
            let inner_gap = (1.0 - t) - (1.0 - s);
            let outer_gap = 1.0 / t - 1.0 / s;
            NestingPair {
                s,
                t,
                inner_gap,
                outer_gap,
                nested: inner_gap > 0.0 && outer_gap > 0.0,
            }
        })
        .collect();
    let contains = |e: f64, p1: f64, p2: f64| p1 < 1.0 - e && p2 < 1.0 / e;
    let probes: Vec<ProbeWitness> = probes
        .iter()
        .map(|&(p1, p2)| {
            let mut witness = eps_list.iter().copied().find(|&e| contains(e, p1, p2));
            if witness.is_none() && p1 < 1.0 {
                let mut e = eps_list[eps_list.len() - 1];
                while e > f64::MIN_POSITIVE {
                    e /= 2.0;
                    if contains(e, p1, p2) {
                        witness = Some(e);
                        break;
                    }
                }
            }
            ProbeWitness {
                p1_norm: p1,
                p2_norm: p2,
                witness_eps: witness,
            }
        })
        .collect();
    let passed = pairs.iter().all(|p| p.nested) && probes.iter().all(|p| p.witness_eps.is_some());
    Ok(NestingReport {
        eps_list: eps_list.to_vec(),
        pairs,
        probes,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn kh_identity_reference() {
        let p = plan_kh(0.01, 1.0).unwrap();
        assert_abs_diff_eq!(p.s, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(p.r, SQRT_3 + 0.01 * p.c, epsilon = 1e-15);
        assert_abs_diff_eq!(p.target_radius, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.inner_radius, 1.0, epsilon = 1e-12);
        assert!(p.in_domain);
        assert_abs_diff_eq!(p.c_kh, 10.0 * p.c.sqrt(), epsilon = 0.0);
    }

    #[test]
    fn kh_rejects_small_t() {
        assert!(plan_kh(0.01, 1.0 / 3.0).is_err());
        assert!(plan_kh(0.01, 0.2).is_err());
        assert!(plan_kh(0.0, 1.0).is_err());
        assert!(plan_kh(0.01, 0.334).unwrap().in_domain);
    }

    #[test]
    fn family_reference() {
        let f = plan_family(0.1).unwrap();
        assert_abs_diff_eq!(f.s, 11.111_111, epsilon = 1e-6);
        assert_abs_diff_eq!(f.r, 1.924_500_9, epsilon = 1e-6);
        assert_abs_diff_eq!(f.domain_radii.0, 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(f.domain_radii.1, 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.target_radii.1, f.target_radius_scaled, epsilon = 1e-9 * f.target_radii.1);
        assert!(f.in_domain);
        assert!(f.r > SQRT_3);
        assert!(plan_family(0.0).is_err());
        assert!(plan_family(0.5).is_err());
    }

    #[test]
    fn nesting_reference() {
        let r = check_nesting(&[0.1, 0.05, 0.02], &DEFAULT_PROBES).unwrap();
        assert!(r.passed);
        let w = r.probes[2].witness_eps.unwrap();
        assert!(w <= 0.001 && 0.999 < 1.0 - w && 50.0 < 1.0 / w);
        assert!(matches!(check_nesting(&[0.05, 0.1], &[]), Err(Error::Usage(_))));
        assert!(matches!(check_nesting(&[0.1, 0.1], &[]), Err(Error::Usage(_))));
    }

    #[test]
    fn probe_on_unit_circle_has_no_witness() {
        let r = check_nesting(&[0.1], &[(1.0, 0.0)]).unwrap();
        assert!(!r.passed);
        assert_eq!(r.probes[0].witness_eps, None);
    }
}
