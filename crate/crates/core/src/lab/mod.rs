//! Experiments: scaling, linear estimates, smallness, Picard iteration and
//! the flow-map Lipschitz probe.

pub mod data;
pub mod estimates;
pub mod picard;
pub mod scaling;

pub use data::{clean, product_band, standard_bump, PacketProfile, PacketSampler, SamplerConfig};
pub use estimates::{
    halving_horizons, smallness_probe, verify_linear_estimate, EstimateConfig, EstimateId, EstimateReport,
    SmallnessReport,
};
pub use picard::{
    lipschitz_family, lipschitz_probe, picard_solve, LipschitzFamilyReport, LipschitzReport, PicardConfig,
    PicardMode, PicardReport,
};
pub use scaling::{rescale, scaling_check, scaling_exponent, ScalingFamily, ScalingReport, ScalingRow};

/// Critical Sobolev index `s_k = 1/2 - 1/k`.
pub fn critical_index(k: u32) -> f64 {
    0.5 - 1.0 / k as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_index_values() {
        assert_eq!(critical_index(4), 0.25);
        assert_eq!(critical_index(2), 0.0);
        assert_eq!(critical_index(3), 0.5 - 1.0 / 3.0);
        for k in 1..40 {
            assert!(critical_index(k + 1) > critical_index(k));
            assert!(critical_index(k) < 0.5);
        }
    }
}
