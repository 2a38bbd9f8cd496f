//! Resolvent, scattering amplitudes and the named input states.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::selfenergy::{self_energy_total, QuadConfig, SelfEnergy, TruncationPolicy};
use crate::waveguide::{
    coupling_strength, density_of_states, longitudinal_wavenumber, propagating_modes, Mode, WaveguideGeometry,
};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Relative distance, in units of machine epsilon, within which a photon
/// frequency is taken to sit on the two-photon resonance `ω = ω_e − δ`.
const POLE_ULPS: f64 = 8.0;

/// Tolerance on `Σ|c_j|² = 1` for input states.
const NORM_TOL: f64 = 1e-10;

/// Emitter, drive and waveguide parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Excited-state frequency `ω_e`.
    pub omega_e: f64,
    /// Drive Rabi frequency `Ω`.
    pub rabi: f64,
    /// Drive detuning `δ`; the metastable level sits at `ω_e − δ`.
    pub detuning: f64,
    /// Coupling scale `g`.
    pub g: f64,
    pub geom: WaveguideGeometry,
    #[serde(default)]
    pub truncation: TruncationPolicy,
    #[serde(default)]
    pub quad: QuadConfig,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            omega_e: 5.4,
            rabi: 0.0,
            detuning: 0.0,
            g: 0.1,
            geom: WaveguideGeometry::default(),
            truncation: TruncationPolicy::default(),
            quad: QuadConfig::default(),
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        self.geom.validate()?;
        self.truncation.validate()?;
        if !self.omega_e.is_finite() || !self.detuning.is_finite() {
            return Err(Error::InvalidParameter(
                "emitter frequency and detuning must be finite".into(),
            ));
        }
        if !(self.rabi.is_finite() && self.rabi >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Rabi frequency must be non-negative, got {}",
                self.rabi
            )));
        }
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "coupling scale g must be positive, got {}",
                self.g
            )));
        }
        Ok(())
    }

    /// Frequency of the two-photon resonance, `ω_e − δ`.
    pub fn eit_frequency(&self) -> f64 {
        self.omega_e - self.detuning
    }

    /// Whether `omega` sits on the transmission pole. Requires a drive.
    pub fn is_eit_pole(&self, omega: f64) -> bool {
        if self.rabi == 0.0 {
            return false;
        }
        let scale = omega.abs().max(self.omega_e.abs()).max(self.detuning.abs());
        (omega - self.omega_e + self.detuning).abs() <= POLE_ULPS * f64::EPSILON * scale
    }

    /// `ω − ω_e − Ω²/(ω − ω_e + δ)`, the bare part of `Re[G]`. Infinite with
    /// the sign of the approach on the pole itself is not representable, so
    /// callers check [`Self::is_eit_pole`] first.
    pub fn bare_detuning(&self, omega: f64) -> f64 {
        let drive = if self.rabi == 0.0 {
            0.0
        } else {
            self.rabi * self.rabi / (omega - self.omega_e + self.detuning)
        };
        omega - self.omega_e - drive
    }
}

/// The function `G(ω)`; at the two-photon resonance it diverges and is
/// carried symbolically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resolvent {
    Finite(Complex64),
    Pole,
}

impl Resolvent {
    pub fn value(&self) -> Option<Complex64> {
        match self {
            Self::Finite(g) => Some(*g),
            Self::Pole => None,
        }
    }

    pub fn is_pole(&self) -> bool {
        matches!(self, Self::Pole)
    }
}

/// `G(ω) = ω − ω_e − Ω²/(ω − ω_e + δ) − Δ(ω) + iΓ(ω)` from a precomputed
/// self-energy.
pub fn resolvent_with(omega: f64, params: &SystemParams, se: &SelfEnergy) -> Resolvent {
    if params.is_eit_pole(omega) {
        return Resolvent::Pole;
    }
    Resolvent::Finite(Complex64::new(
        params.bare_detuning(omega) - se.lamb_shift,
        se.decay,
    ))
}

pub fn resolvent(omega: f64, params: &SystemParams) -> Result<Resolvent> {
    let se = self_energy_total(omega, params)?;
    Ok(resolvent_with(omega, params, &se))
}

/// Photon frequency and channel amplitudes `c_1 … c_{j_max}`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputState {
    pub omega: f64,
    pub coeffs: Vec<Complex64>,
}

impl InputState {
    /// Wraps already normalised coefficients.
    pub fn new(omega: f64, coeffs: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if coeffs.is_empty() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidInput(format!(
                "coefficients must satisfy Σ|c_j|² = 1, got {norm}"
            )));
        }
        Ok(Self { omega, coeffs })
    }

    /// Normalises `coeffs`; rejects the zero vector.
    pub fn normalized(omega: f64, coeffs: Vec<Complex64>) -> Result<Self> {
        Ok(Self {
            omega,
            coeffs: normalize(coeffs)?,
        })
    }

    pub fn j_max(&self) -> usize {
        self.coeffs.len()
    }
}

/// Scales `coeffs` to unit norm. Already-normalised input is left untouched
/// so that repeated normalisation is the identity.
pub fn normalize(coeffs: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let norm_sqr: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if !(norm_sqr.is_finite() && norm_sqr > 0.0) {
        return Err(Error::InvalidInput("zero or non-finite coefficient vector".into()));
    }
    if (norm_sqr - 1.0).abs() <= 4.0 * f64::EPSILON {
        return Ok(coeffs);
    }
    let norm = norm_sqr.sqrt();
    Ok(coeffs.into_iter().map(|c| c / norm).collect())
}

/// Amplitudes, per-channel and total reflectance/transmittance.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringResult {
    pub omega: f64,
    pub r: Vec<Complex64>,
    pub t: Vec<Complex64>,
    pub reflectance: Vec<f64>,
    pub transmittance: Vec<f64>,
    pub total_reflectance: f64,
    pub total_transmittance: f64,
    pub resolvent: Resolvent,
    /// Emitter excitation amplitude `α`.
    pub alpha: Complex64,
}

impl ScatteringResult {
    pub fn j_max(&self) -> usize {
        self.r.len()
    }
}

/// Per-channel quantities at the photon frequency.
#[derive(Debug, Clone)]
pub struct ChannelData {
    pub modes: Vec<Mode>,
    pub wavenumber: Vec<f64>,
    pub density: Vec<f64>,
    /// `g_{j,k_j}`
    pub forward: Vec<Complex64>,
    /// `g_{j,−k_j}`
    pub backward: Vec<Complex64>,
}

impl ChannelData {
    pub fn at(omega: f64, params: &SystemParams) -> Result<Self> {
        let modes = propagating_modes(&params.geom, omega)?;
        if modes.is_empty() {
            return Err(Error::NoPropagatingMode(omega));
        }
        let mut data = Self {
            wavenumber: Vec::with_capacity(modes.len()),
            density: Vec::with_capacity(modes.len()),
            forward: Vec::with_capacity(modes.len()),
            backward: Vec::with_capacity(modes.len()),
            modes,
        };
        for mode in &data.modes {
            let k = longitudinal_wavenumber(mode, omega)?;
            data.wavenumber.push(k);
            data.density.push(density_of_states(mode, omega)?);
            data.forward.push(coupling_strength(mode, k, params.g, &params.geom));
            data.backward.push(coupling_strength(mode, -k, params.g, &params.geom));
        }
        Ok(data)
    }

    pub fn j_max(&self) -> usize {
        self.modes.len()
    }
}

/// `Σ_j c_j g_{j,k_j}`, the overlap of the input with the emitter.
fn drive_overlap(coeffs: &[Complex64], channels: &ChannelData) -> Complex64 {
    coeffs.iter().zip(&channels.forward).map(|(c, g)| c * g).sum()
}

/// Scatters `input` using an explicitly supplied self-energy.
pub fn scatter_with(input: &InputState, params: &SystemParams, se: &SelfEnergy) -> Result<ScatteringResult> {
    let omega = input.omega;
    let channels = ChannelData::at(omega, params)?;
    if channels.j_max() != input.j_max() {
        return Err(Error::InvalidInput(format!(
            "{} coefficients supplied but {} channels propagate at ω = {omega}",
            input.j_max(),
            channels.j_max()
        )));
    }
    let norm: f64 = input.coeffs.iter().map(|c| c.norm_sqr()).sum();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidInput(format!("input not normalised: Σ|c_j|² = {norm}")));
    }

    let resolvent = resolvent_with(omega, params, se);
    let overlap = drive_overlap(&input.coeffs, &channels);
    let (r, t, alpha): (Vec<Complex64>, Vec<Complex64>, Complex64) = match resolvent {
        Resolvent::Pole => (
            vec![Complex64::new(0.0, 0.0); channels.j_max()],
            input.coeffs.clone(),
            Complex64::new(0.0, 0.0),
        ),
        Resolvent::Finite(g_value) => {
            let factor = Complex64::new(0.0, -TWO_PI) * overlap / g_value;
            let r = channels
                .density
                .iter()
                .zip(&channels.backward)
                .map(|(rho, g)| factor * *rho * g.conj())
                .collect();
            let t = input
                .coeffs
                .iter()
                .zip(channels.density.iter().zip(&channels.forward))
                .map(|(c, (rho, g))| c + factor * *rho * g.conj())
                .collect();
            (r, t, overlap / g_value)
        }
    };

    let flux: f64 = input
        .coeffs
        .iter()
        .zip(&channels.density)
        .map(|(c, rho)| c.norm_sqr() / rho)
        .sum();
    let reflectance: Vec<f64> = r
        .iter()
        .zip(&channels.density)
        .map(|(amp, rho)| amp.norm_sqr() / rho / flux)
        .collect();
    let transmittance: Vec<f64> = t
        .iter()
        .zip(&channels.density)
        .map(|(amp, rho)| amp.norm_sqr() / rho / flux)
        .collect();

    Ok(ScatteringResult {
        omega,
        total_reflectance: reflectance.iter().sum(),
        total_transmittance: transmittance.iter().sum(),
        r,
        t,
        reflectance,
        transmittance,
        resolvent,
        alpha,
    })
}

pub fn scatter(input: &InputState, params: &SystemParams) -> Result<ScatteringResult> {
    let se = self_energy_total(input.omega, params)?;
    scatter_with(input, params, &se)
}

/// Specific coherent superposition, `c_j ∝ ρ_j(ω) g*_{j,k_j}`.
pub fn build_scss(omega: f64, params: &SystemParams) -> Result<InputState> {
    let channels = ChannelData::at(omega, params)?;
    let coeffs = channels
        .density
        .iter()
        .zip(&channels.forward)
        .map(|(rho, g)| *rho * g.conj())
        .collect();
    InputState::normalized(omega, coeffs)
}

/// Photon in channel `n` only (1-based).
pub fn build_single_mode(omega: f64, n: usize, params: &SystemParams) -> Result<InputState> {
    let channels = ChannelData::at(omega, params)?;
    let j_max = channels.j_max();
    if n == 0 || n > j_max {
        return Err(Error::ChannelOutOfRange { n, omega, j_max });
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); j_max];
    coeffs[n - 1] = Complex64::new(1.0, 0.0);
    InputState::new(omega, coeffs)
}

/// Dark state on the first two channels, `∝ (g_{2,k₂}, −g_{1,k₁}, 0, …)`.
pub fn build_dark_state(omega: f64, params: &SystemParams) -> Result<InputState> {
    let channels = ChannelData::at(omega, params)?;
    if channels.j_max() < 2 {
        return Err(Error::NoDarkState);
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); channels.j_max()];
    coeffs[0] = channels.forward[1];
    coeffs[1] = -channels.forward[0];
    InputState::normalized(omega, coeffs)
}

/// `c_j = 1/sqrt(j_max)`.
pub fn build_equal_superposition(omega: f64, params: &SystemParams) -> Result<InputState> {
    let j_max = propagating_modes(&params.geom, omega)?.len();
    if j_max == 0 {
        return Err(Error::NoPropagatingMode(omega));
    }
    let amp = 1.0 / (j_max as f64).sqrt();
    InputState::new(omega, vec![Complex64::new(amp, 0.0); j_max])
}

/// `α = Σ_j c_j g_{j,k_j} / G(ω)`; zero on the transmission pole.
pub fn emitter_amplitude(omega: f64, input: &InputState, params: &SystemParams) -> Result<Complex64> {
    let channels = ChannelData::at(omega, params)?;
    if channels.j_max() != input.j_max() {
        return Err(Error::InvalidInput(format!(
            "{} coefficients supplied but {} channels propagate",
            input.j_max(),
            channels.j_max()
        )));
    }
    match resolvent(omega, params)? {
        Resolvent::Pole => Ok(Complex64::new(0.0, 0.0)),
        Resolvent::Finite(g_value) => Ok(drive_overlap(&input.coeffs, &channels) / g_value),
    }
}

/// Named input-state families.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum InputKind {
    #[default]
    Scss,
    SingleMode(usize),
    Dark,
    Equal,
    Custom(Vec<Complex64>),
}

impl InputKind {
    pub fn build(&self, omega: f64, params: &SystemParams) -> Result<InputState> {
        match self {
            Self::Scss => build_scss(omega, params),
            Self::SingleMode(n) => build_single_mode(omega, *n, params),
            Self::Dark => build_dark_state(omega, params),
            Self::Equal => build_equal_superposition(omega, params),
            Self::Custom(coeffs) => {
                let j_max = propagating_modes(&params.geom, omega)?.len();
                if coeffs.len() != j_max {
                    return Err(Error::InvalidInput(format!(
                        "custom state has {} coefficients but {j_max} channels propagate at ω = {omega}",
                        coeffs.len()
                    )));
                }
                InputState::normalized(omega, coeffs.clone())
            }
        }
    }
}

impl std::fmt::Display for InputKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Scss => write!(f, "scss"),
            Self::SingleMode(n) => write!(f, "sms:{n}"),
            Self::Dark => write!(f, "dark"),
            Self::Equal => write!(f, "equal"),
            Self::Custom(coeffs) => {
                write!(f, "custom:")?;
                for (i, c) in coeffs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}{:+}i", c.re, c.im)?;
                }
                Ok(())
            }
        }
    }
}

impl std::str::FromStr for InputKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "scss" => return Ok(Self::Scss),
            "dark" => return Ok(Self::Dark),
            "equal" => return Ok(Self::Equal),
            _ => {}
        }
        if let Some(index) = s.strip_prefix("sms:") {
            let n: usize = index
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad channel index in '{s}'")))?;
            if n == 0 {
                return Err(Error::InvalidInput("channel indices start at 1".into()));
            }
            return Ok(Self::SingleMode(n));
        }
        if let Some(list) = s.strip_prefix("custom:") {
            let coeffs = list
                .split(',')
                .map(|item| {
                    item.trim()
                        .parse::<Complex64>()
                        .map_err(|_| Error::InvalidInput(format!("bad complex number '{item}'")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(Self::Custom(normalize(coeffs)?));
        }
        Err(Error::InvalidInput(format!(
            "unknown input state '{s}' (expected scss, sms:<n>, dark, equal or custom:<c1,c2,…>)"
        )))
    }
}

impl Serialize for InputKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for InputKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Total reflectance evaluated just below and just above the cutoff of
/// channel `j`, at `ω_j ∓ offset`. Either side is `None` when no coupled
/// mode propagates there or the input family does not exist there.
pub fn band_edge_limits(
    j: usize,
    kind: &InputKind,
    params: &SystemParams,
    offset: f64,
) -> Result<(Option<f64>, Option<f64>)> {
    let mode = crate::waveguide::nth_coupled_mode(&params.geom, j)
        .ok_or_else(|| Error::InvalidBand(format!("no coupled mode with index {j}")))?;
    let side = |omega: f64| -> Option<f64> {
        let input = kind.build(omega, params).ok()?;
        scatter(&input, params).ok().map(|res| res.total_reflectance)
    };
    Ok((side(mode.cutoff - offset), side(mode.cutoff + offset)))
}
