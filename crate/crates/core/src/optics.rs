//! Optical interpretation of voxel attributes.
//!
//! Transmissivity maps to a relative permittivity; in a lossless,
//! non-magnetic dielectric both the impedance and the wave speed relative to
//! vacuum are `1/sqrt(eps_r)`. Interfaces between voxels are then evaluated
//! with Snell's law and the Fresnel field ratios for the two polarizations.
//! All functions here are pure.

use glam::DVec3;

use crate::error::OpticsError;

/// Parameters of the transmissivity → permittivity curve
/// `eps_r = eps_max^(p_t^gamma_map)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MappingConfig {
    /// Relative permittivity reached at `p_t = 1`.
    pub eps_max: f64,
    /// Gamma exponent applied to `p_t` before the logarithmic mapping.
    pub gamma_map: f64,
}

impl MappingConfig {
    pub const DEFAULT_EPS_MAX: f64 = 1e8;
    pub const DEFAULT_GAMMA: f64 = 1.0;

    pub fn new(eps_max: f64, gamma_map: f64) -> Result<Self, OpticsError> {
        if !(eps_max.is_finite() && eps_max > 1.0) {
            return Err(OpticsError::InvalidConfig("eps_max must be finite and > 1"));
        }
        if !(gamma_map.is_finite() && gamma_map > 0.0) {
            return Err(OpticsError::InvalidConfig(
                "gamma_map must be finite and > 0",
            ));
        }
        Ok(Self { eps_max, gamma_map })
    }
}

impl Default for MappingConfig {
    fn default() -> Self {
        Self {
            eps_max: Self::DEFAULT_EPS_MAX,
            gamma_map: Self::DEFAULT_GAMMA,
        }
    }
}

fn check_unit(quantity: &'static str, value: f64) -> Result<(), OpticsError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(OpticsError::OutOfRange {
            quantity,
            value,
            domain: "[0, 1]",
        })
    }
}

pub fn transmissivity_to_permittivity(p_t: f64, cfg: &MappingConfig) -> Result<f64, OpticsError> {
    check_unit("p_t", p_t)?;
    if p_t == 0.0 {
        return Ok(1.0);
    }
    if p_t == 1.0 {
        return Ok(cfg.eps_max);
    }
    Ok((cfg.eps_max.ln() * p_t.powf(cfg.gamma_map)).exp())
}

pub fn permittivity_to_transmissivity(eps_r: f64, cfg: &MappingConfig) -> Result<f64, OpticsError> {
    if !(1.0..=cfg.eps_max).contains(&eps_r) {
        return Err(OpticsError::OutOfRange {
            quantity: "eps_r",
            value: eps_r,
            domain: "[1, eps_max]",
        });
    }
    if eps_r == cfg.eps_max {
        return Ok(1.0);
    }
    Ok((eps_r.ln() / cfg.eps_max.ln()).powf(cfg.gamma_map.recip()))
}

/// Dielectric quantities of one color channel of a voxel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelOptics {
    pub eps_r: f64,
    /// Impedance relative to vacuum.
    pub eta_rel: f64,
    /// Phase velocity relative to the speed of light in vacuum.
    pub v_rel: f64,
}

impl ChannelOptics {
    pub fn from_permittivity(eps_r: f64) -> Self {
        let scale = eps_r.sqrt().recip();
        Self {
            eps_r,
            eta_rel: scale,
            v_rel: scale,
        }
    }

    pub const VACUUM: ChannelOptics = ChannelOptics {
        eps_r: 1.0,
        eta_rel: 1.0,
        v_rel: 1.0,
    };
}

pub fn channel_optics(p_t: f64, cfg: &MappingConfig) -> Result<ChannelOptics, OpticsError> {
    transmissivity_to_permittivity(p_t, cfg).map(ChannelOptics::from_permittivity)
}

const UNIT_TOLERANCE: f64 = 1e-9;

fn check_normal(n: DVec3) -> Result<(), OpticsError> {
    let len = n.length();
    if (len - 1.0).abs() > UNIT_TOLERANCE || !len.is_finite() {
        return Err(OpticsError::DegenerateNormal(len));
    }
    Ok(())
}

/// Mirror direction `2 (n_i · n) n - n_i`, where `n_i` points back toward the
/// source and `n` is the unit surface normal on the incidence side.
pub fn reflect_dir(n_i: DVec3, n: DVec3) -> Result<DVec3, OpticsError> {
    check_normal(n)?;
    Ok(2.0 * n_i.dot(n) * n - n_i)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Snell {
    Refracted(f64),
    TotalInternalReflection,
}

impl Snell {
    pub fn angle(self) -> Option<f64> {
        match self {
            Snell::Refracted(theta) => Some(theta),
            Snell::TotalInternalReflection => None,
        }
    }

    pub fn is_tir(self) -> bool {
        matches!(self, Snell::TotalInternalReflection)
    }
}

/// Refraction angle from `sin(theta2) = (v2 / v1) sin(theta1)`.
pub fn snell(theta1: f64, v1_rel: f64, v2_rel: f64) -> Snell {
    debug_assert!(v1_rel > 0.0 && v2_rel > 0.0);
    let sin_theta2 = (v2_rel / v1_rel) * theta1.sin();
    if sin_theta2 > 1.0 {
        Snell::TotalInternalReflection
    } else {
        Snell::Refracted(sin_theta2.asin())
    }
}

/// Unit transmitted direction for incidence from `n_i` (pointing toward the
/// source) through a face with normal `n` on the incidence side. `ratio` is
/// `sin(theta2) / sin(theta1) = v2 / v1`. Returns `None` on total internal
/// reflection.
pub fn refract_dir(n_i: DVec3, n: DVec3, ratio: f64) -> Result<Option<DVec3>, OpticsError> {
    check_normal(n)?;
    let cos1 = n_i.dot(n).clamp(0.0, 1.0);
    let sin2_sq = ratio * ratio * (1.0 - cos1 * cos1).max(0.0);
    if sin2_sq > 1.0 {
        return Ok(None);
    }
    let cos2 = (1.0 - sin2_sq).sqrt();
    Ok(Some(-ratio * n_i + (ratio * cos1 - cos2) * n))
}

/// Field reflection and transmission ratios at a planar interface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterfaceCoefficients {
    pub theta1: f64,
    pub theta2: f64,
    pub tir: bool,
    pub gamma_perp: f64,
    pub t_perp: f64,
    pub gamma_par: f64,
    pub t_par: f64,
}

impl InterfaceCoefficients {
    /// Coefficients for an incidence beyond the critical angle. Only `theta1`
    /// and `tir` carry meaning; the field ratios describe full reflection.
    pub fn total_internal_reflection(theta1: f64) -> Self {
        Self {
            theta1,
            theta2: std::f64::consts::FRAC_PI_2,
            tir: true,
            gamma_perp: 1.0,
            t_perp: 0.0,
            gamma_par: 1.0,
            t_par: 0.0,
        }
    }
}

/// Fresnel ratios with `E` perpendicular to the plane of incidence
/// (`gamma_perp`, `t_perp`) and with `H` perpendicular (`gamma_par`, `t_par`).
pub fn fresnel(theta1: f64, theta2: f64, eta1_rel: f64, eta2_rel: f64) -> InterfaceCoefficients {
    let (cos1, cos2) = (theta1.cos(), theta2.cos());
    let perp_den = eta2_rel * cos1 + eta1_rel * cos2;
    let par_den = eta1_rel * cos1 + eta2_rel * cos2;
    InterfaceCoefficients {
        theta1,
        theta2,
        tir: false,
        gamma_perp: (eta2_rel * cos1 - eta1_rel * cos2) / perp_den,
        t_perp: 2.0 * eta2_rel * cos1 / perp_den,
        gamma_par: (eta1_rel * cos1 - eta2_rel * cos2) / par_den,
        t_par: 2.0 * eta2_rel * cos1 / par_den,
    }
}

/// Power reflectance for unpolarized light, the mean of both polarizations.
/// Callers handle total internal reflection themselves (`R = 1`).
pub fn reflectance_unpolarized(coeffs: &InterfaceCoefficients) -> f64 {
    debug_assert!(!coeffs.tir);
    0.5 * (coeffs.gamma_perp * coeffs.gamma_perp + coeffs.gamma_par * coeffs.gamma_par)
}

/// Power reflectance at incidence angle `theta1` between two channel media,
/// with total internal reflection reported as `1`.
pub fn interface_reflectance(theta1: f64, from: &ChannelOptics, to: &ChannelOptics) -> f64 {
    match snell(theta1, from.v_rel, to.v_rel) {
        Snell::TotalInternalReflection => 1.0,
        Snell::Refracted(theta2) => {
            reflectance_unpolarized(&fresnel(theta1, theta2, from.eta_rel, to.eta_rel))
                .clamp(0.0, 1.0)
        }
    }
}

/// Fraction of light that survives `distance` inside a voxel with attenuation
/// `p_a`: `(1 - p_a)^(distance / voxel_size)`.
pub fn attenuation_transmittance(
    p_a: f64,
    distance: f64,
    voxel_size: f64,
) -> Result<f64, OpticsError> {
    check_unit("p_a", p_a)?;
    if distance.is_nan() || distance < 0.0 {
        return Err(OpticsError::OutOfRange {
            quantity: "distance",
            value: distance,
            domain: "[0, inf)",
        });
    }
    if voxel_size.is_nan() || voxel_size <= 0.0 {
        return Err(OpticsError::OutOfRange {
            quantity: "voxel_size",
            value: voxel_size,
            domain: "(0, inf)",
        });
    }
    Ok((1.0 - p_a).powf(distance / voxel_size))
}

/// Largest Phong exponent plus one, reached at `d = 0`.
pub const PHONG_N_MAX: f64 = 4097.0;

/// Scattering lobe derived from diffuseness: a Phong lobe of
/// `phong_exponent` around the specular direction, mixed with a
/// cosine-weighted hemisphere with probability `lambert_weight`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatterLobe {
    pub d: f64,
    pub phong_exponent: f64,
    pub lambert_weight: f64,
}

impl ScatterLobe {
    /// `d = 0`: a perfect specular delta.
    pub fn is_delta(&self) -> bool {
        self.d == 0.0
    }
}

pub fn scatter_lobe(d: f64) -> Result<ScatterLobe, OpticsError> {
    check_unit("d", d)?;
    Ok(ScatterLobe {
        d,
        phong_exponent: PHONG_N_MAX.powf(1.0 - d) - 1.0,
        lambert_weight: d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn permittivity_mapping_examples() {
        let cfg = MappingConfig::default();
        assert_eq!(transmissivity_to_permittivity(0.0, &cfg).unwrap(), 1.0);
        assert_eq!(transmissivity_to_permittivity(1.0, &cfg).unwrap(), 1e8);
        // oracle: exp(p_t / k_t) with k_t = 1 / ln(eps_max)
        let k_t = 1.0 / 1e8f64.ln();
        let oracle = (0.5 / k_t).exp();
        let got = transmissivity_to_permittivity(0.5, &cfg).unwrap();
        assert!(close(got, oracle, 1e-9 * oracle));
        assert!(close(got, 1e4, 1e-8));
        assert!(transmissivity_to_permittivity(1.5, &cfg).is_err());
        assert!(transmissivity_to_permittivity(-0.1, &cfg).is_err());
    }

    #[test]
    fn inverse_mapping_examples() {
        let cfg = MappingConfig::default();
        assert_eq!(permittivity_to_transmissivity(1.0, &cfg).unwrap(), 0.0);
        assert_eq!(permittivity_to_transmissivity(1e8, &cfg).unwrap(), 1.0);
        let eps = transmissivity_to_permittivity(0.37, &cfg).unwrap();
        assert!(close(
            permittivity_to_transmissivity(eps, &cfg).unwrap(),
            0.37,
            1e-12
        ));
        assert!(permittivity_to_transmissivity(0.5, &cfg).is_err());
        assert!(permittivity_to_transmissivity(2e8, &cfg).is_err());
    }

    #[test]
    fn mapping_config_validation() {
        assert!(MappingConfig::new(1.0, 1.0).is_err());
        assert!(MappingConfig::new(10.0, 0.0).is_err());
        assert!(MappingConfig::new(10.0, 2.2).is_ok());
    }

    #[test]
    fn channel_optics_examples() {
        let cfg = MappingConfig::default();
        assert_eq!(channel_optics(0.0, &cfg).unwrap(), ChannelOptics::VACUUM);
        let half = channel_optics(0.5, &cfg).unwrap();
        assert!(close(half.eta_rel, 0.01, 1e-14));
        assert_eq!(half.eta_rel, half.v_rel);
        let full = channel_optics(1.0, &cfg).unwrap();
        assert!(close(full.eta_rel, 1e-4, 1e-18));
    }

    #[test]
    fn reflect_examples() {
        let z = DVec3::Z;
        assert_eq!(reflect_dir(z, z).unwrap(), z);
        let n_i = DVec3::new(1.0, 0.0, 1.0).normalize();
        let r = reflect_dir(n_i, z).unwrap();
        let expected = DVec3::new(-FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2);
        assert!((r - expected).length() < 1e-15);
        assert_eq!(reflect_dir(DVec3::X, z).unwrap(), -DVec3::X);
        assert!(matches!(
            reflect_dir(z, DVec3::new(0.0, 0.0, 1.1)),
            Err(OpticsError::DegenerateNormal(_))
        ));
    }

    #[test]
    fn snell_examples() {
        assert_eq!(snell(0.0, 1.0, 0.3), Snell::Refracted(0.0));
        let theta2 = snell(30f64.to_radians(), 1.0, 0.5).angle().unwrap();
        assert!(close(theta2.to_degrees(), 14.477512185929925, 1e-10));
        assert!(snell(60f64.to_radians(), 1.0, 1.3).is_tir());
    }

    #[test]
    fn refract_examples() {
        let z = DVec3::Z;
        assert_eq!(refract_dir(z, z, 0.37).unwrap().unwrap(), -z);
        let n_i = DVec3::new(1.0, 0.0, 1.0).normalize();
        let t = refract_dir(n_i, z, 0.5).unwrap().unwrap();
        assert!(close(t.length(), 1.0, 1e-15));
        assert!(t.dot(z) <= 0.0);
        // coplanar with (n_i, n): no y component
        assert_eq!(t.y, 0.0);
        let sin_to_minus_n = t.cross(-z).length();
        assert!(close(sin_to_minus_n, 0.5 * FRAC_PI_4.sin(), 1e-15));
        let straight = refract_dir(n_i, z, 1.0).unwrap().unwrap();
        assert!((straight + n_i).length() < 1e-15);
        let grazing = DVec3::new(1.0, 0.0, 0.1).normalize();
        assert!(refract_dir(grazing, z, 1.5).unwrap().is_none());
    }

    #[test]
    fn fresnel_examples() {
        let same = fresnel(0.7, 0.7, 0.3, 0.3);
        assert!(close(same.gamma_perp, 0.0, 1e-15) && close(same.gamma_par, 0.0, 1e-15));
        assert!(close(same.t_perp, 1.0, 1e-15) && close(same.t_par, 1.0, 1e-15));
        assert!(close(reflectance_unpolarized(&same), 0.0, 1e-15));

        let c = fresnel(0.0, 0.0, 1.0, 0.5);
        assert!(close(c.gamma_perp, -1.0 / 3.0, 1e-15));
        assert!(close(c.t_perp, 2.0 / 3.0, 1e-15));
        assert!(close(c.gamma_par, 1.0 / 3.0, 1e-15));
        assert!(close(c.t_par, 2.0 / 3.0, 1e-15));
        assert!(close(1.0 + c.gamma_perp, c.t_perp, 1e-15));
        assert!(close(reflectance_unpolarized(&c), 1.0 / 9.0, 1e-15));

        let dense = fresnel(0.0, 0.0, 1.0, 1e-12);
        assert!(close(dense.gamma_perp, -1.0, 1e-11));
        assert!(close(dense.t_perp, 0.0, 1e-11));
    }

    #[test]
    fn mirror_permittivity_reflects_almost_everything() {
        let cfg = MappingConfig::default();
        let r = interface_reflectance(
            0.0,
            &ChannelOptics::VACUUM,
            &channel_optics(1.0, &cfg).unwrap(),
        );
        assert!(close(r, 0.9996000799880015, 1e-12));
    }

    #[test]
    fn tir_reflectance_is_one() {
        let inside = ChannelOptics::from_permittivity(4.0);
        assert_eq!(
            interface_reflectance(1.2, &inside, &ChannelOptics::VACUUM),
            1.0
        );
    }

    #[test]
    fn attenuation_examples() {
        assert_eq!(attenuation_transmittance(0.0, 123.0, 0.5).unwrap(), 1.0);
        assert_eq!(attenuation_transmittance(1.0, 0.1, 1.0).unwrap(), 0.0);
        let closed_form = attenuation_transmittance(0.2, 3.0, 1.0).unwrap();
        let per_voxel = attenuation_transmittance(0.2, 1.0, 1.0).unwrap();
        assert!(close(closed_form, 0.512, 1e-15));
        assert!(close(closed_form, per_voxel * per_voxel * per_voxel, 1e-15));
        assert!(attenuation_transmittance(1.2, 1.0, 1.0).is_err());
        assert!(attenuation_transmittance(0.5, -1.0, 1.0).is_err());
    }

    #[test]
    fn scatter_lobe_examples() {
        let specular = scatter_lobe(0.0).unwrap();
        assert!(specular.is_delta());
        assert_eq!(specular.lambert_weight, 0.0);
        assert_eq!(specular.phong_exponent, 4096.0);
        let lambert = scatter_lobe(1.0).unwrap();
        assert_eq!(lambert.lambert_weight, 1.0);
        assert_eq!(lambert.phong_exponent, 0.0);
        let mid = scatter_lobe(0.5).unwrap();
        assert!(close(mid.phong_exponent, 63.007812023221035, 1e-9));
        assert_eq!(mid.lambert_weight, 0.5);
        assert!(scatter_lobe(1.01).is_err());
    }

    proptest! {
        #[test]
        fn fresnel_identities(theta1 in 0.0..(FRAC_PI_2 - 1e-3), eta1 in 1e-4f64..=1.0, eta2 in 1e-4f64..=1.0) {
            if let Snell::Refracted(theta2) = snell(theta1, eta1, eta2) {
                prop_assume!(theta2 < FRAC_PI_2 - 1e-6);
                let c = fresnel(theta1, theta2, eta1, eta2);
                prop_assert!((1.0 + c.gamma_perp - c.t_perp).abs() < 1e-12);
                prop_assert!((eta1 * c.t_par - eta2 * (1.0 + c.gamma_par)).abs() < 1e-12);
                let flux = (eta1 * theta2.cos()) / (eta2 * theta1.cos());
                prop_assert!((c.gamma_perp.powi(2) + c.t_perp.powi(2) * flux - 1.0).abs() < 1e-10);
                prop_assert!((c.gamma_par.powi(2) + c.t_par.powi(2) * flux - 1.0).abs() < 1e-10);
            }
        }

        #[test]
        fn normal_incidence_polarizations_agree(eta1 in 1e-4f64..=1.0, eta2 in 1e-4f64..=1.0) {
            let c = fresnel(0.0, 0.0, eta1, eta2);
            prop_assert_eq!(c.gamma_perp.abs(), c.gamma_par.abs());
            prop_assert_eq!(c.t_perp, c.t_par);
        }

        #[test]
        fn reflect_is_involution(theta in 0.0..FRAC_PI_2, phi in 0.0..std::f64::consts::TAU) {
            let n = DVec3::Z;
            let n_i = DVec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
            let r = reflect_dir(n_i, n).unwrap();
            prop_assert!((r.length() - 1.0).abs() < 1e-12);
            prop_assert!((r.dot(n) - n_i.dot(n)).abs() < 1e-12);
            let back = reflect_dir(r, n).unwrap();
            prop_assert!((back - n_i).length() < 1e-12);
        }

        #[test]
        fn refract_round_trip(theta in 0.0..1.5f64, phi in 0.0..std::f64::consts::TAU, ratio in 0.05f64..3.0) {
            let n = DVec3::Z;
            let n_i = DVec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
            if let Some(t) = refract_dir(n_i, n, ratio).unwrap() {
                prop_assert!((t.length() - 1.0).abs() < 1e-12);
                let theta2 = snell(theta, 1.0, ratio).angle().unwrap();
                prop_assert!((t.dot(-n).clamp(-1.0, 1.0).acos() - theta2).abs() < 1e-7);
                // reversed light: arrives from medium 2 along -t, leaves along n_i
                let back = refract_dir(t, -n, 1.0 / ratio).unwrap().unwrap();
                prop_assert!((back - n_i).length() < 1e-9);
            }
        }

        #[test]
        fn scatter_lobe_monotone(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (l, h) = (scatter_lobe(lo).unwrap(), scatter_lobe(hi).unwrap());
            prop_assert!(l.phong_exponent >= h.phong_exponent);
            prop_assert!(l.lambert_weight <= h.lambert_weight);
        }
    }
}
