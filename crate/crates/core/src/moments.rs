//! Moments of the conditional success probability (CSP).
//!
//! The pipeline composes four quantities, all driven by the hypergeometric
//! line F_k(b) = 2F1(b, -2/alpha_k; 1 - 2/alpha_k; -theta):
//!
//! * per-tier device moment   M_{b,k}  = 1 / (cross-tier term + F_k(b)),
//! * first-hop moment         M_{b,FH} = 1 / F_1(b) at threshold theta_2,
//! * dual-hop moment          M_{b,dual} = M_{b,FH} M_{b,2},
//! * total network moment     M_{b,total} = M_{b,dual} + M_{b,1}.
//!
//! Coverage probability, CSP variance and mean local delay are the b = 1,
//! b = 2 and b = -1 specialisations of the total moment.
//!
//! For real negative orders the defining exponential integral only converges
//! while the real denominator stays positive; a nonpositive denominator is
//! reported as [`MomentValue::Divergent`] rather than analytically continued.

use num_complex::Complex64;

use crate::error::Result;
use crate::network::{association_probability, cross_tier_term, NetworkConfig, Tier};
use crate::quad::QuadratureSettings;
use crate::special::{hyp2f1_line, hyp2f1_line_with};

/// Denominators closer to zero than this are treated as divergent; the
/// threshold absorbs quadrature noise at the exact phase boundary.
const DIVERGENCE_EPS: f64 = 1e-10;

/// Value of a CSP moment: finite, or divergent (possible only for real
/// negative orders).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentValue {
    Finite(Complex64),
    Divergent,
}

impl MomentValue {
    /// The finite value, if any.
    pub fn value(&self) -> Option<Complex64> {
        match self {
            MomentValue::Finite(v) => Some(*v),
            MomentValue::Divergent => None,
        }
    }

    /// Real part of the finite value, if any.
    pub fn real(&self) -> Option<f64> {
        self.value().map(|v| v.re)
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, MomentValue::Divergent)
    }

    fn map2(self, other: MomentValue, f: impl Fn(Complex64, Complex64) -> Complex64) -> MomentValue {
        match (self, other) {
            (MomentValue::Finite(a), MomentValue::Finite(b)) => MomentValue::Finite(f(a, b)),
            _ => MomentValue::Divergent,
        }
    }
}

fn is_negative_real(b: Complex64) -> bool {
    b.im == 0.0 && b.re < 0.0
}

/// Reciprocal with divergence detection for real negative orders.
fn reciprocal_moment(denominator: Complex64, b: Complex64) -> MomentValue {
    if is_negative_real(b) && denominator.re <= DIVERGENCE_EPS {
        MomentValue::Divergent
    } else {
        MomentValue::Finite(1.0 / denominator)
    }
}

/// b-th moment of the device CSP when served by tier `k`, including the
/// association weight.
pub fn moment_tier(config: &NetworkConfig, b: Complex64, k: Tier) -> Result<MomentValue> {
    config.validate()?;
    let alpha_k = config.tier(k).path_loss_exponent;
    let f_k = hyp2f1_line(b, alpha_k, config.theta_d)?;
    Ok(reciprocal_moment(cross_tier_term(config, k) + f_k, b))
}

/// b-th moment of the first-hop CSP (typical relay served by its strongest
/// MBS) at threshold theta_2.
pub fn moment_first_hop(config: &NetworkConfig, b: Complex64) -> Result<MomentValue> {
    config.validate()?;
    let f_1 = hyp2f1_line(b, config.tier1.path_loss_exponent, config.theta_2)?;
    Ok(reciprocal_moment(f_1, b))
}

/// b-th moment of the dual-hop link: product of the first-hop moment and the
/// relay-tier device moment (the hops are conditionally independent).
pub fn moment_dual_hop(config: &NetworkConfig, b: Complex64) -> Result<MomentValue> {
    let fh = moment_first_hop(config, b)?;
    let second = moment_tier(config, b, Tier::Relay)?;
    Ok(fh.map2(second, |x, y| x * y))
}

/// Total network moment: dual-hop plus direct transmission.
pub fn moment_total(config: &NetworkConfig, b: Complex64) -> Result<MomentValue> {
    let dual = moment_dual_hop(config, b)?;
    let direct = moment_tier(config, b, Tier::Mbs)?;
    Ok(dual.map2(direct, |x, y| x + y))
}

/// Total moment with caller-chosen quadrature settings, sharing the
/// device-side hypergeometric when both tiers have the same exponent. Used
/// by the Gil-Pelaez inversion, which evaluates thousands of imaginary
/// orders per curve point.
pub(crate) fn moment_total_with(
    config: &NetworkConfig,
    b: Complex64,
    settings: &QuadratureSettings,
) -> Result<MomentValue> {
    let alpha_1 = config.tier1.path_loss_exponent;
    let alpha_2 = config.tier2.path_loss_exponent;
    let f_fh = hyp2f1_line_with(b, alpha_1, config.theta_2, settings)?;
    let f_relay = hyp2f1_line_with(b, alpha_2, config.theta_d, settings)?;
    let f_mbs = if alpha_1 == alpha_2 {
        f_relay
    } else {
        hyp2f1_line_with(b, alpha_1, config.theta_d, settings)?
    };
    let dual = reciprocal_moment(f_fh, b).map2(
        reciprocal_moment(cross_tier_term(config, Tier::Relay) + f_relay, b),
        |x, y| x * y,
    );
    let direct = reciprocal_moment(cross_tier_term(config, Tier::Mbs) + f_mbs, b);
    Ok(dual.map2(direct, |x, y| x + y))
}

/// Coverage probability M_{1,total}.
pub fn coverage_probability(config: &NetworkConfig) -> Result<f64> {
    let m1 = moment_total(config, Complex64::new(1.0, 0.0))?;
    Ok(m1.real().expect("first moment of a [0,1] variable is finite"))
}

/// Variance of the CSP, M_{2,total} - M_{1,total}^2.
pub fn csp_variance(config: &NetworkConfig) -> Result<f64> {
    let m1 = coverage_probability(config)?;
    let m2 = moment_total(config, Complex64::new(2.0, 0.0))?
        .real()
        .expect("second moment of a [0,1] variable is finite");
    Ok(m2 - m1 * m1)
}

/// Mean local delay M_{-1,total}: the expected number of transmission
/// attempts until first success. Divergent past the retransmission phase
/// transition.
pub fn mean_local_delay(config: &NetworkConfig) -> Result<MomentValue> {
    moment_total(config, Complex64::new(-1.0, 0.0))
}

/// Association probability recovered as the zero-order moment; used by tests
/// to tie the two modules together.
pub fn zero_moment_matches_association(config: &NetworkConfig, k: Tier) -> Result<f64> {
    let m0 = moment_tier(config, Complex64::new(0.0, 0.0), k)?;
    Ok(m0.real().expect("zero moment is finite") - association_probability(config, k))
}
