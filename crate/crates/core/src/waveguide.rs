//! Rectangular waveguide geometry and its transverse-magnetic channels.
//!
//! Lengths are measured in units of the short side `b` and frequencies in
//! units of `c/b`. The emitter sits on the transverse centre `(a/2, b/2)`, so
//! only TM modes with odd `m` and odd `n` couple to it; those are the only
//! channels that receive a scattering index `j`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cross-section and emitter position of the waveguide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideGeometry {
    /// Transverse width, in units of `b`.
    pub a: f64,
    /// Transverse height. Fixed to 1 by the normalisation.
    pub b: f64,
    /// Longitudinal emitter position.
    pub z0: f64,
}

impl Default for WaveguideGeometry {
    fn default() -> Self {
        Self {
            a: 1.5,
            b: 1.0,
            z0: 0.0,
        }
    }
}

impl WaveguideGeometry {
    pub fn new(a: f64, z0: f64) -> Result<Self> {
        let geom = Self { a, b: 1.0, z0 };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "width a must be positive and finite, got {}",
                self.a
            )));
        }
        if !(self.b.is_finite() && self.b > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "height b must be positive and finite, got {}",
                self.b
            )));
        }
        if !self.z0.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "emitter position z0 must be finite, got {}",
                self.z0
            )));
        }
        Ok(())
    }

    pub fn cross_section(&self) -> f64 {
        self.a * self.b
    }
}

/// One TM<sub>mn</sub> channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub m: u32,
    pub n: u32,
    pub cutoff: f64,
    /// True iff both `m` and `n` are odd.
    pub coupled: bool,
}

impl Mode {
    pub fn tm(m: u32, n: u32, geom: &WaveguideGeometry) -> Self {
        Self {
            m,
            n,
            cutoff: cutoff_frequency(m, n, geom),
            coupled: m % 2 == 1 && n % 2 == 1,
        }
    }

    /// `sin(mπ/2)·sin(nπ/2)`, evaluated exactly: zero for any even index,
    /// otherwise ±1.
    pub fn parity(&self) -> f64 {
        half_sine(self.m) * half_sine(self.n)
    }

    pub fn label(&self) -> String {
        format!("TM{}{}", self.m, self.n)
    }
}

fn half_sine(index: u32) -> f64 {
    if index.is_multiple_of(2) {
        0.0
    } else if (index / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `π·sqrt(m²/a² + n²/b²)`.
pub fn cutoff_frequency(m: u32, n: u32, geom: &WaveguideGeometry) -> f64 {
    let kx = m as f64 / geom.a;
    let ky = n as f64 / geom.b;
    PI * kx.hypot(ky)
}

/// All coupled (odd, odd) TM modes with cutoff at or below `omega_max`,
/// ordered by cutoff. Equal cutoffs are ordered by `(m, n)`.
pub fn enumerate_coupled_modes(geom: &WaveguideGeometry, omega_max: f64) -> Vec<Mode> {
    let mut modes = Vec::new();
    if !(omega_max.is_finite() && omega_max > 0.0) {
        return modes;
    }
    let mut m = 1u32;
    while PI * m as f64 / geom.a <= omega_max {
        let mut n = 1u32;
        loop {
            let mode = Mode::tm(m, n, geom);
            if mode.cutoff > omega_max {
                break;
            }
            modes.push(mode);
            n += 2;
        }
        m += 2;
    }
    modes.sort_by(|x, y| {
        x.cutoff
            .total_cmp(&y.cutoff)
            .then(x.m.cmp(&y.m))
            .then(x.n.cmp(&y.n))
    });
    modes
}

/// Lowest coupled cutoff strictly above `omega`.
pub fn next_cutoff_above(geom: &WaveguideGeometry, omega: f64) -> f64 {
    // TM_{m,1} with the first odd m whose x-wavenumber alone exceeds omega
    // bounds the answer from above.
    let mut m = 1u32;
    while PI * m as f64 / geom.a <= omega.max(0.0) {
        m += 2;
    }
    let bound = cutoff_frequency(m, 1, geom);
    enumerate_coupled_modes(geom, bound)
        .into_iter()
        .map(|mode| mode.cutoff)
        .find(|&cutoff| cutoff > omega)
        .unwrap_or(bound)
}

/// The `j`-th coupled mode (1-based) in channel order.
pub fn nth_coupled_mode(geom: &WaveguideGeometry, j: usize) -> Option<Mode> {
    if j == 0 {
        return None;
    }
    let mut bound = cutoff_frequency(1, 1, geom);
    for _ in 0..64 {
        let modes = enumerate_coupled_modes(geom, bound);
        if modes.len() >= j {
            return Some(modes[j - 1]);
        }
        bound *= 2.0;
    }
    None
}

/// Coupled modes propagating at `omega` (cutoff strictly below it), in
/// channel order. Rejects a frequency sitting exactly on a coupled cutoff.
pub fn propagating_modes(geom: &WaveguideGeometry, omega: f64) -> Result<Vec<Mode>> {
    let modes = enumerate_coupled_modes(geom, omega);
    if let Some(edge) = modes.iter().find(|mode| mode.cutoff == omega) {
        return Err(Error::BandEdge {
            omega,
            m: edge.m,
            n: edge.n,
        });
    }
    Ok(modes)
}

/// `sqrt(ω_j² + k²)`.
pub fn dispersion(mode: &Mode, k: f64) -> f64 {
    mode.cutoff.hypot(k)
}

/// `sqrt(ω² − ω_j²)`; fails below cutoff.
pub fn longitudinal_wavenumber(mode: &Mode, omega: f64) -> Result<f64> {
    if omega < mode.cutoff {
        return Err(Error::BelowCutoff {
            omega,
            cutoff: mode.cutoff,
            m: mode.m,
            n: mode.n,
        });
    }
    Ok(((omega - mode.cutoff) * (omega + mode.cutoff)).sqrt())
}

/// Inverse group velocity `ω/sqrt(ω² − ω_j²)`, zero below cutoff. The cutoff
/// itself is reported as [`Error::BandEdge`].
pub fn density_of_states(mode: &Mode, omega: f64) -> Result<f64> {
    if omega < mode.cutoff {
        Ok(0.0)
    } else if omega == mode.cutoff {
        Err(Error::BandEdge {
            omega,
            m: mode.m,
            n: mode.n,
        })
    } else {
        Ok(omega / longitudinal_wavenumber(mode, omega)?)
    }
}

/// `g_{j,k} = −g·ω_j·sin(mπ/2)·sin(nπ/2)·e^{−ikz₀}/sqrt(ω_{j,k})`.
pub fn coupling_strength(mode: &Mode, k: f64, g: f64, geom: &WaveguideGeometry) -> Complex64 {
    let parity = mode.parity();
    if parity == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let modulus = -g * mode.cutoff * parity / dispersion(mode, k).sqrt();
    let phase = -k * geom.z0;
    if phase == 0.0 {
        Complex64::new(modulus, 0.0)
    } else {
        Complex64::from_polar(modulus, phase)
    }
}
