//! Emitter self-energy: mode-resolved decay rates and Lamb shifts.
//!
//! The Lamb shift of one channel is the principal value
//!
//! ```text
//! Δ_j(ω) = P∫ dk |g_{j,k}|² / (ω − ω_{j,k})
//! ```
//!
//! With `k = ω_j·sinh(u)` this becomes `2g²ω_j² · P∫₀^∞ du / (ω − ω_j cosh u)`,
//! which removes the inverse-square-root endpoint of the frequency form.
//! Above cutoff the pole at `u₀ = acosh(ω/ω_j)` is subtracted on the
//! symmetric window `[0, 2u₀]`, where the principal value of the subtracted
//! simple pole is exactly zero. The remaining tail `[2u₀, ∞)` is mapped onto
//! a finite interval through `v = e^{−u}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_with_breakpoints, Tolerance};
use crate::scattering::SystemParams;
use crate::waveguide::{enumerate_coupled_modes, next_cutoff_above, Mode, WaveguideGeometry};

/// Quadrature settings for the Lamb-shift integral. Tolerances apply to
/// `Δ_j` itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-12,
            max_subdivisions: 200,
        }
    }
}

/// Which coupled modes enter the Lamb-shift sum.
///
/// The decay rate only ever receives contributions from propagating modes;
/// the Lamb shift gets one from every mode in the set, and far off-resonant
/// modes contribute roughly `−πg²ω_j` each, so the sum has no finite limit.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TruncationPolicy {
    /// Only modes whose cutoff lies below the photon frequency.
    #[default]
    Propagating,
    /// Propagating modes plus every coupled mode with cutoff at or below
    /// `multiplier × ω_{j_max+1}`, the upper edge of the band containing ω.
    CutoffMultiplier { multiplier: f64 },
}

impl TruncationPolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Propagating => Ok(()),
            Self::CutoffMultiplier { multiplier } if multiplier.is_finite() && multiplier >= 1.0 => Ok(()),
            Self::CutoffMultiplier { multiplier } => Err(Error::InvalidParameter(format!(
                "truncation multiplier must be finite and at least 1, got {multiplier}"
            ))),
        }
    }

    /// The finite mode set used at `omega`, in channel order.
    pub fn mode_set(&self, geom: &WaveguideGeometry, omega: f64) -> Result<Vec<Mode>> {
        let ceiling = match *self {
            Self::Propagating => omega,
            Self::CutoffMultiplier { multiplier } => {
                omega.max(multiplier * next_cutoff_above(geom, omega))
            }
        };
        let modes = enumerate_coupled_modes(geom, ceiling);
        if let Some(edge) = modes.iter().find(|mode| mode.cutoff == omega) {
            return Err(Error::BandEdge {
                omega,
                m: edge.m,
                n: edge.n,
            });
        }
        Ok(match self {
            Self::Propagating => modes.into_iter().filter(|m| m.cutoff < omega).collect(),
            Self::CutoffMultiplier { .. } => modes,
        })
    }
}

/// `Γ_j(ω) = 2π|g_{j,k_j}|²ρ_j(ω) = 2πg²ω_j²/sqrt(ω² − ω_j²)` above cutoff,
/// zero below.
pub fn decay_rate_mode(mode: &Mode, omega: f64, g: f64) -> Result<f64> {
    if !mode.coupled || omega < mode.cutoff {
        return Ok(0.0);
    }
    if omega == mode.cutoff {
        return Err(Error::BandEdge {
            omega,
            m: mode.m,
            n: mode.n,
        });
    }
    let k = ((omega - mode.cutoff) * (omega + mode.cutoff)).sqrt();
    Ok(2.0 * PI * g * g * mode.cutoff * mode.cutoff / k)
}

/// Lamb-shift contribution of one channel together with the quadrature
/// error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambShift {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// `sinh(x) − x` without cancellation for small `x`.
fn sinh_minus_x(x: f64) -> f64 {
    if x.abs() < 0.5 {
        let x2 = x * x;
        x * x2 / 6.0
            * (1.0
                + x2 / 20.0
                    * (1.0 + x2 / 42.0 * (1.0 + x2 / 72.0 * (1.0 + x2 / 110.0 * (1.0 + x2 / 156.0)))))
    } else {
        x.sinh() - x
    }
}

/// `1/(ω − ω_j cosh u) + 1/(ω_j sinh(u₀)(u − u₀))`, written so that the two
/// poles cancel analytically.
fn pole_subtracted(u: f64, u0: f64, sinh_u0: f64, cosh_u0: f64, cutoff: f64) -> f64 {
    let d = u - u0;
    if d == 0.0 {
        return cosh_u0 / (2.0 * cutoff * sinh_u0 * sinh_u0);
    }
    let s = (0.5 * d).sinh();
    let p = (u0 + 0.5 * d).sinh();
    let numerator = sinh_u0 * sinh_minus_x(d) + 2.0 * cosh_u0 * s * s;
    numerator / (2.0 * cutoff * p * s * sinh_u0 * d)
}

/// Cauchy principal value `Δ_j(ω)` by singularity subtraction.
pub fn lamb_shift_mode(mode: &Mode, omega: f64, g: f64, cfg: &QuadConfig) -> Result<LambShift> {
    if !mode.coupled || g == 0.0 {
        return Ok(LambShift {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let cutoff = mode.cutoff;
    if omega == cutoff {
        return Err(Error::BandEdge {
            omega,
            m: mode.m,
            n: mode.n,
        });
    }
    let scale = 2.0 * g * g * cutoff * cutoff;
    let tol = Tolerance {
        abs_tol: cfg.abs_tol / scale,
        rel_tol: cfg.rel_tol,
        max_subdivisions: cfg.max_subdivisions,
    };

    let outcome = if omega < cutoff {
        // Whole half-line in v = e^{-u}; the integrand peaks near v = ω/ω_j.
        let c = omega / cutoff;
        let integrand = |v: f64| -2.0 / (cutoff * ((v - c) * (v - c) + (1.0 - c) * (1.0 + c)));
        if c > 0.0 && c < 1.0 {
            integrate_with_breakpoints(integrand, &[0.0, c, 1.0], tol)
        } else {
            integrate_with_breakpoints(integrand, &[0.0, 1.0], tol)
        }
    } else {
        let ratio = omega / cutoff;
        let u0 = ratio.acosh();
        let (sinh_u0, cosh_u0) = (u0.sinh(), ratio);
        let near = (-u0).exp();
        let far = u0.exp();
        let window = near * near;
        let split = 2.0 * u0;
        let integrand = |t: f64| {
            if t <= split {
                pole_subtracted(t, u0, sinh_u0, cosh_u0, cutoff)
            } else {
                let v = (t - split) * window;
                -2.0 * window / (cutoff * (near - v) * (far - v))
            }
        };
        integrate_with_breakpoints(integrand, &[0.0, u0, split, split + 1.0], tol)
    };

    match outcome {
        Ok(est) => Ok(LambShift {
            value: scale * est.value,
            error: scale * est.error,
            evaluations: est.evaluations,
        }),
        Err(est) => Err(Error::Quadrature {
            value: scale * est.value,
            error: scale * est.error,
            evaluations: est.evaluations,
        }),
    }
}

/// Contribution of one channel to the self-energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSelfEnergy {
    /// Channel index `j`, starting at 1.
    pub index: usize,
    pub mode: Mode,
    pub lamb_shift: f64,
    pub lamb_error: f64,
    pub decay: f64,
}

/// `Σ(ω) = Δ(ω) − iΓ(ω)` summed over a finite mode set.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfEnergy {
    pub omega: f64,
    pub lamb_shift: f64,
    pub decay: f64,
    pub per_mode: Vec<ModeSelfEnergy>,
    /// Partial Lamb-shift sums after including the first 1, 2, … modes.
    pub convergence: Vec<f64>,
}

impl SelfEnergy {
    pub fn from_modes(omega: f64, per_mode: Vec<ModeSelfEnergy>) -> Self {
        let mut convergence = Vec::with_capacity(per_mode.len());
        let mut lamb_shift = 0.0;
        for entry in &per_mode {
            lamb_shift += entry.lamb_shift;
            convergence.push(lamb_shift);
        }
        let decay = per_mode.iter().map(|e| e.decay).sum();
        Self {
            omega,
            lamb_shift,
            decay,
            per_mode,
            convergence,
        }
    }

    /// Decay rates of the propagating channels, `Γ_1 … Γ_{j_max}`.
    pub fn decay_rates(&self) -> Vec<f64> {
        self.per_mode
            .iter()
            .filter(|e| e.mode.cutoff < self.omega)
            .map(|e| e.decay)
            .collect()
    }
}

pub fn self_energy_total(omega: f64, params: &SystemParams) -> Result<SelfEnergy> {
    let modes = params.truncation.mode_set(&params.geom, omega)?;
    let per_mode = modes
        .iter()
        .enumerate()
        .map(|(i, mode)| {
            let lamb = lamb_shift_mode(mode, omega, params.g, &params.quad)?;
            Ok(ModeSelfEnergy {
                index: i + 1,
                mode: *mode,
                lamb_shift: lamb.value,
                lamb_error: lamb.error,
                decay: decay_rate_mode(mode, omega, params.g)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SelfEnergy::from_modes(omega, per_mode))
}

/// Lamb shift alone, `Δ(ω)`, over the policy's mode set.
pub fn lamb_shift_total(omega: f64, params: &SystemParams) -> Result<f64> {
    let modes = params.truncation.mode_set(&params.geom, omega)?;
    modes.iter().try_fold(0.0, |acc, mode| {
        Ok(acc + lamb_shift_mode(mode, omega, params.g, &params.quad)?.value)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveguide::WaveguideGeometry;

    fn tm11() -> Mode {
        Mode::tm(1, 1, &WaveguideGeometry::default())
    }

    /// Closed forms of `∫₀^∞ du/(ω − ω_j cosh u)`, used only as a check.
    fn analytic(mode: &Mode, omega: f64, g: f64) -> f64 {
        let wj = mode.cutoff;
        let scale = 2.0 * g * g * wj * wj;
        if omega > wj {
            scale * (omega / wj).acosh() / (omega * omega - wj * wj).sqrt()
        } else if omega > -wj {
            let root = (wj * wj - omega * omega).sqrt();
            -scale * 2.0 / root * ((wj + omega) / (wj - omega)).sqrt().atan()
        } else {
            let root = (omega * omega - wj * wj).sqrt();
            let x_plus = (omega + root) / wj;
            let x_minus = (omega - root) / wj;
            -scale / root * ((1.0 - x_minus) / (1.0 - x_plus)).ln()
        }
    }

    #[test]
    fn decay_rate_values() {
        let mode = Mode {
            m: 1,
            n: 1,
            cutoff: 5.0,
            coupled: true,
        };
        assert_eq!(decay_rate_mode(&mode, 4.9, 0.1).unwrap(), 0.0);
        let gamma = decay_rate_mode(&mode, 5.0 * 2f64.sqrt(), 0.1).unwrap();
        assert!((gamma - 0.1 * PI).abs() < 1e-12);
        assert!(decay_rate_mode(&mode, 5.0, 0.1).is_err());
    }

    #[test]
    fn lamb_shift_matches_closed_form() {
        let cfg = QuadConfig {
            abs_tol: 1e-12,
            ..QuadConfig::default()
        };
        let mode = tm11();
        for omega in [-30.0, -5.0, -1.0, 0.0, 1.0, 3.0, 3.7, 3.775, 3.7758, 3.8, 4.5, 5.4, 7.0, 12.0, 100.0] {
            let numeric = lamb_shift_mode(&mode, omega, 0.1, &cfg).unwrap();
            let exact = analytic(&mode, omega, 0.1);
            assert!(
                (numeric.value - exact).abs() < 1e-11 * exact.abs().max(1e-2),
                "ω={omega}: {} vs {exact}",
                numeric.value
            );
        }
    }

    #[test]
    fn lamb_shift_negative_below_cutoff() {
        let mode = tm11();
        let cfg = QuadConfig::default();
        for omega in [-100.0, -2.0, 0.5, 3.0, 3.77] {
            assert!(lamb_shift_mode(&mode, omega, 0.1, &cfg).unwrap().value < 0.0);
        }
        let far = lamb_shift_mode(&mode, -1e4, 0.1, &cfg).unwrap().value;
        let farther = lamb_shift_mode(&mode, -1e6, 0.1, &cfg).unwrap().value;
        assert!(far < 0.0 && farther < 0.0 && farther.abs() < far.abs());
    }

    #[test]
    fn lamb_shift_scales_with_g_squared() {
        let mode = tm11();
        let cfg = QuadConfig {
            abs_tol: 1e-14,
            ..QuadConfig::default()
        };
        let single = lamb_shift_mode(&mode, 5.4, 0.1, &cfg).unwrap().value;
        let double = lamb_shift_mode(&mode, 5.4, 0.2, &cfg).unwrap().value;
        assert!((double - 4.0 * single).abs() < 1e-12);
    }

    #[test]
    fn cutoff_is_rejected() {
        let mode = tm11();
        assert!(matches!(
            lamb_shift_mode(&mode, mode.cutoff, 0.1, &QuadConfig::default()),
            Err(Error::BandEdge { .. })
        ));
    }

    #[test]
    fn error_estimate_tightens() {
        let mode = tm11();
        let mut last = f64::INFINITY;
        for tol in [1e-4, 1e-6, 1e-8, 1e-10, 1e-12] {
            let cfg = QuadConfig {
                abs_tol: tol,
                rel_tol: 0.0,
                max_subdivisions: 500,
            };
            let est = lamb_shift_mode(&mode, 3.9, 0.1, &cfg).unwrap();
            assert!(est.error <= tol);
            assert!(est.error <= last);
            last = est.error;
        }
    }

    #[test]
    fn policy_mode_sets() {
        let geom = WaveguideGeometry::default();
        let propagating = TruncationPolicy::Propagating.mode_set(&geom, 8.0).unwrap();
        assert_eq!(propagating.len(), 2);
        let wide = TruncationPolicy::CutoffMultiplier { multiplier: 1.5 }
            .mode_set(&geom, 5.0)
            .unwrap();
        // ceiling 1.5 × 7.02 = 10.54 keeps TM11, TM31, TM13.
        assert_eq!(wide.len(), 3);
        assert!(TruncationPolicy::Propagating.mode_set(&geom, wide[1].cutoff).is_err());
        assert!(TruncationPolicy::CutoffMultiplier { multiplier: 0.5 }.validate().is_err());
    }
}
