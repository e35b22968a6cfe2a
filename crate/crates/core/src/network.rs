//! Network parameterization: per-tier radio parameters, SIR thresholds,
//! derived tier ratios, and the biased association probability.
//!
//! Tier 1 is the macro base station (MBS) tier, tier 2 the decode-and-forward
//! relay tier. Thresholds are stored as linear ratios; dB conversion belongs
//! to the CLI boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The two tiers of the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tier {
    /// Macro base stations (tier 1).
    Mbs,
    /// Decode-and-forward relays (tier 2).
    Relay,
}

impl Tier {
    /// The opposite tier.
    pub fn other(self) -> Tier {
        match self {
            Tier::Mbs => Tier::Relay,
            Tier::Relay => Tier::Mbs,
        }
    }
}

/// Radio parameters of one tier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierParams {
    /// Transmit power in watts.
    pub power: f64,
    /// Association bias (dimensionless).
    pub bias: f64,
    /// Path loss exponent; must exceed 2.
    pub path_loss_exponent: f64,
    /// Node density in nodes per square kilometre.
    pub density: f64,
}

impl TierParams {
    fn validate(&self, name: &str) -> Result<()> {
        if !(self.power > 0.0) {
            return Err(Error::Config(format!("{name}: power must be positive")));
        }
        if !(self.bias > 0.0) {
            return Err(Error::Config(format!("{name}: bias must be positive")));
        }
        if !(self.path_loss_exponent > 2.0) {
            return Err(Error::Config(format!(
                "{name}: path loss exponent must exceed 2, got {}",
                self.path_loss_exponent
            )));
        }
        if !(self.density > 0.0) {
            return Err(Error::Config(format!("{name}: density must be positive")));
        }
        Ok(())
    }
}

/// Full parameterization of the two-tier network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    /// MBS tier parameters.
    pub tier1: TierParams,
    /// Relay tier parameters.
    pub tier2: TierParams,
    /// Device-side SIR threshold (linear) for the second hop and the direct
    /// link.
    pub theta_d: f64,
    /// Relay-side SIR threshold (linear) for the first hop.
    pub theta_2: f64,
    /// Fraction of spectrum allocated to the MBS tier. Accepted for
    /// completeness; no derived quantity consumes it.
    pub spectrum_fraction: Option<f64>,
    /// Device density in devices per square kilometre. Accepted for
    /// completeness; no derived quantity consumes it.
    pub device_density: Option<f64>,
}

impl NetworkConfig {
    /// Check all invariants.
    pub fn validate(&self) -> Result<()> {
        self.tier1.validate("tier1")?;
        self.tier2.validate("tier2")?;
        if !(self.theta_d >= 0.0) {
            return Err(Error::Config("theta_d must be nonnegative".into()));
        }
        if !(self.theta_2 >= 0.0) {
            return Err(Error::Config("theta_2 must be nonnegative".into()));
        }
        if let Some(eta) = self.spectrum_fraction {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::Config("spectrum fraction must lie in [0, 1]".into()));
            }
        }
        Ok(())
    }

    /// Warnings about accepted-but-unused parameters.
    pub fn unused_parameter_warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.spectrum_fraction.is_some() {
            w.push("spectrum fraction (eta) is accepted but unused by all derived quantities".into());
        }
        if self.device_density.is_some() {
            w.push("device density is accepted but unused by all derived quantities".into());
        }
        w
    }

    /// Parameters of the given tier.
    pub fn tier(&self, tier: Tier) -> &TierParams {
        match tier {
            Tier::Mbs => &self.tier1,
            Tier::Relay => &self.tier2,
        }
    }
}

/// Elementwise ratios between two tiers' parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierRatios {
    /// P_j / P_k.
    pub power_ratio: f64,
    /// B_j / B_k.
    pub bias_ratio: f64,
    /// lambda_j / lambda_k.
    pub density_ratio: f64,
}

/// Ratios of tier j's parameters over tier k's.
pub fn ratios(config: &NetworkConfig, j: Tier, k: Tier) -> Result<TierRatios> {
    if j == k {
        return Err(Error::Domain("tier ratios require two distinct tiers".into()));
    }
    let pj = config.tier(j);
    let pk = config.tier(k);
    Ok(TierRatios {
        power_ratio: pj.power / pk.power,
        bias_ratio: pj.bias / pk.bias,
        density_ratio: pj.density / pk.density,
    })
}

/// The cross-tier term lambda_jk_hat (P_jk_hat B_jk_hat)^(2/alpha_j) that
/// appears in every per-tier moment denominator, with j the tier other
/// than `k`.
pub(crate) fn cross_tier_term(config: &NetworkConfig, k: Tier) -> f64 {
    let j = k.other();
    let r = ratios(config, j, k).expect("tiers are distinct");
    let alpha_j = config.tier(j).path_loss_exponent;
    r.density_ratio * (r.power_ratio * r.bias_ratio).powf(2.0 / alpha_j)
}

/// Probability that the typical device associates with tier `k` under the
/// biased maximum received power rule:
///
///   A_k = 1 / (lambda_jk_hat (P_jk_hat B_jk_hat)^(2/alpha_j) + 1).
pub fn association_probability(config: &NetworkConfig, k: Tier) -> f64 {
    1.0 / (cross_tier_term(config, k) + 1.0)
}

// ---------------------------------------------------------------------------
// JSON file schema
// ---------------------------------------------------------------------------

/// On-disk form of [`TierParams`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TierParamsFile {
    /// Transmit power in watts.
    pub power_w: f64,
    /// Association bias (dimensionless).
    pub bias: f64,
    /// Path loss exponent.
    pub alpha: f64,
    /// Node density per square kilometre.
    pub density_per_km2: f64,
}

/// On-disk form of [`NetworkConfig`]. Thresholds are stored in dB and
/// converted to linear ratios when the file is parsed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkConfigFile {
    pub tier1: TierParamsFile,
    pub tier2: TierParamsFile,
    /// Device-side SIR threshold in dB.
    pub theta_d_db: f64,
    /// First-hop SIR threshold in dB.
    pub theta_2_db: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device_density_per_km2: Option<f64>,
}

/// Linear value of a dB quantity.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// dB value of a linear quantity.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

impl TierParamsFile {
    fn into_params(self) -> TierParams {
        TierParams {
            power: self.power_w,
            bias: self.bias,
            path_loss_exponent: self.alpha,
            density: self.density_per_km2,
        }
    }
}

impl NetworkConfigFile {
    /// Convert to the in-memory representation, validating all invariants.
    pub fn into_config(self) -> Result<NetworkConfig> {
        let config = NetworkConfig {
            tier1: self.tier1.into_params(),
            tier2: self.tier2.into_params(),
            theta_d: db_to_linear(self.theta_d_db),
            theta_2: db_to_linear(self.theta_2_db),
            spectrum_fraction: self.eta,
            device_density: self.device_density_per_km2,
        };
        config.validate()?;
        Ok(config)
    }
}

/// Parse a JSON configuration document.
pub fn parse_config(json: &str) -> Result<NetworkConfig> {
    let file: NetworkConfigFile =
        serde_json::from_str(json).map_err(|e| Error::Config(format!("bad config JSON: {e}")))?;
    file.into_config()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::default_config;

    #[test]
    fn ratio_examples() {
        let config = default_config();
        let r = ratios(&config, Tier::Mbs, Tier::Relay).unwrap();
        assert_eq!(r.power_ratio, 10.0);
        assert_eq!(r.bias_ratio, 1.0);
        let r = ratios(&config, Tier::Relay, Tier::Mbs).unwrap();
        assert_eq!(r.density_ratio, 35.0);
        assert!(ratios(&config, Tier::Mbs, Tier::Mbs).is_err());
    }

    #[test]
    fn ratios_are_reciprocal() {
        let config = default_config();
        let fwd = ratios(&config, Tier::Mbs, Tier::Relay).unwrap();
        let rev = ratios(&config, Tier::Relay, Tier::Mbs).unwrap();
        assert!((fwd.power_ratio * rev.power_ratio - 1.0).abs() < 1e-15);
        assert!((fwd.bias_ratio * rev.bias_ratio - 1.0).abs() < 1e-15);
        assert!((fwd.density_ratio * rev.density_ratio - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_tiers_split_evenly() {
        let mut config = default_config();
        config.tier2 = config.tier1;
        assert!((association_probability(&config, Tier::Mbs) - 0.5).abs() < 1e-15);
        assert!((association_probability(&config, Tier::Relay) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn huge_bias_captures_everything() {
        let mut config = default_config();
        config.tier2.bias = 1e12;
        assert!(association_probability(&config, Tier::Relay) > 0.9999);
    }

    #[test]
    fn default_association_matches_closed_form() {
        // A_2 = 1 / (1 + (2/70) sqrt(10))
        let config = default_config();
        let want = 1.0 / (1.0 + (2.0 / 70.0) * 10f64.sqrt());
        let got = association_probability(&config, Tier::Relay);
        assert!((got - want).abs() < 1e-15);
        assert!((got - 0.91713).abs() < 5e-6);
    }

    #[test]
    fn association_sums_to_one() {
        let mut config = default_config();
        for &(b2, a, l2) in &[(1.0, 3.0, 70.0), (10.0, 4.0, 20.0), (30.0, 2.5, 5.0)] {
            config.tier2.bias = b2;
            config.tier1.path_loss_exponent = a;
            config.tier2.path_loss_exponent = a;
            config.tier2.density = l2;
            let sum = association_probability(&config, Tier::Mbs)
                + association_probability(&config, Tier::Relay);
            assert!((sum - 1.0).abs() < 1e-12, "sum = {sum}");
        }
    }

    #[test]
    fn association_monotonicity() {
        let base = default_config();
        let a2 = |cfg: &NetworkConfig| association_probability(cfg, Tier::Relay);
        let mut prev = 0.0;
        for &b2 in &[0.5, 1.0, 5.0, 20.0] {
            let mut cfg = base.clone();
            cfg.tier2.bias = b2;
            let v = a2(&cfg);
            assert!(v > prev);
            prev = v;
        }
        let mut prev = 0.0;
        for &l2 in &[5.0, 20.0, 70.0, 300.0] {
            let mut cfg = base.clone();
            cfg.tier2.density = l2;
            let v = a2(&cfg);
            assert!(v > prev);
            prev = v;
        }
        // Increasing the other tier's bias or density pushes A_2 down.
        let mut prev = 1.0;
        for &b1 in &[1.0, 5.0, 50.0] {
            let mut cfg = base.clone();
            cfg.tier1.bias = b1;
            let v = a2(&cfg);
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn config_validation_catches_bad_fields() {
        let mut config = default_config();
        config.tier1.path_loss_exponent = 2.0;
        assert!(config.validate().is_err());
        let mut config = default_config();
        config.tier2.power = 0.0;
        assert!(config.validate().is_err());
        let mut config = default_config();
        config.theta_d = -1.0;
        assert!(config.validate().is_err());
        let mut config = default_config();
        config.spectrum_fraction = Some(1.5);
        assert!(config.validate().is_err());
    }

    #[test]
    fn json_schema_round_trip() {
        let json = r#"{
            "tier1": {"power_w": 50.0, "bias": 1.0, "alpha": 4.0, "density_per_km2": 2.0},
            "tier2": {"power_w": 5.0, "bias": 1.0, "alpha": 4.0, "density_per_km2": 70.0},
            "theta_d_db": 0.0,
            "theta_2_db": -10.0,
            "eta": 0.5
        }"#;
        let config = parse_config(json).unwrap();
        assert_eq!(config.theta_d, 1.0);
        assert!((config.theta_2 - 0.1).abs() < 1e-15);
        assert_eq!(config.tier1.power, 50.0);
        assert_eq!(config.spectrum_fraction, Some(0.5));
        assert_eq!(config.unused_parameter_warnings().len(), 1);

        assert!(parse_config("{\"tier1\": 3}").is_err());
    }

    #[test]
    fn db_conversions() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
        assert!((db_to_linear(-10.0) - 0.1).abs() < 1e-15);
        assert!((linear_to_db(db_to_linear(-7.3)) + 7.3).abs() < 1e-12);
    }
}
