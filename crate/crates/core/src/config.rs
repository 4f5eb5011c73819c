//! Run configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::physics::{Initial, InitialData, Potential};
use crate::product::ProductMode;
use crate::window::WindowPolicy;

/// Full description of one run. Every key mirrors a CLI flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub dim: usize,
    pub half_width: f64,
    pub modes: usize,
    pub tau: f64,
    pub tmax: f64,
    pub potential: String,
    pub initial: String,
    pub plateau_fraction: f64,
    pub extend: bool,
    pub extend_eps: f64,
    pub check_interval: usize,
    pub max_extensions: usize,
    pub dealias: bool,
    /// Steps between snapshots; 0 keeps only the first and last.
    pub snapshot_every: usize,
    pub out: PathBuf,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        let w = WindowPolicy::default();
        SimConfig {
            dim: 1,
            half_width: 40.0,
            modes: 1600,
            tau: 1e-3,
            tmax: 2.0,
            potential: "zero".into(),
            initial: "free-gaussian".into(),
            plateau_fraction: 0.5,
            extend: w.enabled,
            extend_eps: w.eps,
            check_interval: w.check_interval,
            max_extensions: w.max_extensions,
            dealias: true,
            snapshot_every: 0,
            out: PathBuf::from("out"),
            seed: 0,
        }
    }
}

impl SimConfig {
    /// The tunneling setup with a smooth incoming packet.
    pub fn tunneling(initial: InitialData, half_width: f64, modes: usize, tau: f64, tmax: f64) -> Self {
        SimConfig {
            dim: 1,
            half_width,
            modes,
            tau,
            tmax,
            potential: "tunnel-bump".into(),
            initial: initial.id().into(),
            ..Default::default()
        }
    }

    /// Free Gaussian packet with `V = 0`.
    pub fn free(half_width: f64, modes: usize, tau: f64, tmax: f64) -> Self {
        SimConfig {
            half_width,
            modes,
            tau,
            tmax,
            ..Default::default()
        }
    }

    /// Lattice scattering in two dimensions.
    pub fn scattering(initial: InitialData, half_width: f64, modes: usize, tau: f64, tmax: f64) -> Self {
        SimConfig {
            dim: 2,
            half_width,
            modes,
            tau,
            tmax,
            potential: "lattice".into(),
            initial: initial.id().into(),
            ..Default::default()
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn window_policy(&self) -> WindowPolicy {
        WindowPolicy {
            eps: self.extend_eps,
            check_interval: self.check_interval,
            max_extensions: self.max_extensions,
            enabled: self.extend,
        }
    }

    pub fn product_mode(&self) -> ProductMode {
        if self.dealias {
            ProductMode::Dealiased
        } else {
            ProductMode::Collocation
        }
    }

    /// Number of steps `T / τ`; only meaningful after [`SimConfig::validate`].
    pub fn steps(&self) -> usize {
        (self.tmax / self.tau).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.dim) {
            return Err(Error::Dimension(self.dim));
        }
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(Error::param("half-width", "must be positive"));
        }
        if self.modes < 4 {
            return Err(Error::param("modes", format!("must be at least 4, got {}", self.modes)));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::param("tau", "must be positive"));
        }
        if !(self.tmax.is_finite() && self.tmax >= 0.0) {
            return Err(Error::param("tmax", "must be non-negative"));
        }
        let m = (self.tmax / self.tau).round();
        if (m * self.tau - self.tmax).abs() > 1e-9 * self.tmax.max(self.tau) {
            return Err(Error::param(
                "tau",
                format!("T = {} is not a whole number of steps of {}", self.tmax, self.tau),
            ));
        }
        if !(self.plateau_fraction > 0.0 && self.plateau_fraction < 1.0) {
            return Err(Error::param("plateau-fraction", "must lie in (0, 1)"));
        }
        self.window_policy().validate()?;
        if let Initial::Builtin(d) = Initial::from_id(&self.initial, self.dim)? {
            if d.dim() != self.dim {
                return Err(Error::param(
                    "initial",
                    format!("`{}` is {}-dimensional but dim = {}", d.id(), d.dim(), self.dim),
                ));
            }
        }
        if let Potential::Builtin(p) = Potential::from_id(&self.potential, self.dim)? {
            use crate::physics::BuiltinPotential::*;
            let pd = match p {
                Zero => self.dim,
                TunnelBump => 1,
                Lattice => 2,
            };
            if pd != self.dim {
                return Err(Error::param(
                    "potential",
                    format!("`{}` is {pd}-dimensional but dim = {}", p.id(), self.dim),
                ));
            }
        }
        Ok(())
    }

    /// Short stable digest of everything except the output directory.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        let digest = Sha256::digest(serde_json::to_vec(&c).expect("config serializes"));
        hex::encode(&digest[..6])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_validate() {
        SimConfig::default().validate().unwrap();
        assert_eq!(SimConfig::default().steps(), 2000);
    }

    #[test]
    fn rejects_partial_final_step() {
        let c = SimConfig {
            tau: 0.3,
            tmax: 1.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let zero = SimConfig {
            tmax: 0.0,
            ..Default::default()
        };
        zero.validate().unwrap();
        assert_eq!(zero.steps(), 0);
    }

    #[test]
    fn rejects_unknown_and_mismatched_ids() {
        let c = SimConfig {
            initial: "nope".into(),
            ..Default::default()
        };
        assert!(matches!(c.validate(), Err(Error::UnknownId { .. })));
        let c = SimConfig {
            initial: "scatter-I".into(),
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = SimConfig {
            modes: 3,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<SimConfig>(r#"{"dim": 1, "bogus": 2}"#).is_err());
        let c: SimConfig = serde_json::from_str(r#"{"tau": 0.5}"#).unwrap();
        assert_eq!(c.tau, 0.5);
        assert_eq!(c.modes, 1600);
    }

    #[test]
    fn hash_ignores_output_dir() {
        let a = SimConfig::default();
        let b = SimConfig {
            out: "elsewhere".into(),
            ..Default::default()
        };
        assert_eq!(a.hash(), b.hash());
        let c = SimConfig {
            tau: 2e-3,
            ..Default::default()
        };
        assert_ne!(a.hash(), c.hash());
    }

    proptest! {
        #[test]
        fn json_round_trip(
            dim in 1usize..=2,
            l in 0.1f64..100.0,
            n in 4usize..5000,
            tau in 1e-6f64..1.0,
            eps in 1e-12f64..1.0,
            dealias: bool,
            extend: bool,
            every in 0usize..100,
            seed: u64,
        ) {
            let c = SimConfig {
                dim, half_width: l, modes: n, tau, extend_eps: eps, dealias, extend,
                snapshot_every: every, seed, ..Default::default()
            };
            let back: SimConfig = serde_json::from_str(&c.to_json()).unwrap();
            prop_assert_eq!(&back, &c);
            let again: SimConfig = serde_json::from_str(&back.to_json()).unwrap();
            prop_assert_eq!(again, back);
        }
    }
}
