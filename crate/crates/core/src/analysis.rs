//! Dressed states, complete-reflection and complete-transmission peaks, and
//! parameter sweeps.
//!
//! Inside one band `[ω_{j_max}, ω_{j_max+1})` the real part of `G` is
//! increasing on each side of the transmission pole `ω_e − δ`. Left of the
//! pole it runs up to `+∞`, right of it it comes up from `−∞`. A sign scan on
//! a dense grid followed by bisection therefore finds every zero.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scattering::{scatter, InputKind, Resolvent, SystemParams};
use crate::selfenergy::{lamb_shift_mode, lamb_shift_total};
use crate::waveguide::{enumerate_coupled_modes, nth_coupled_mode, WaveguideGeometry};

/// Dressed eigenstates of the driven `{|e⟩, |f⟩}` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedStates {
    pub nu_plus: f64,
    pub nu_minus: f64,
    /// Mixing angle: `|ν₊⟩ = sinθ|e⟩ + cosθ|f⟩`.
    pub theta: f64,
    pub nu_tilde_plus: f64,
    pub nu_tilde_minus: f64,
    /// `Δ(ω_e)` used for the renormalisation.
    pub lamb_shift: f64,
}

/// Diagonalises `[[ω_e, Ω], [Ω, ω_e − δ]]` and shifts each level by its
/// excited-state weight times `Δ(ω_e)`.
pub fn dressed_states(params: &SystemParams) -> Result<DressedStates> {
    let (omega, delta, omega_e) = (params.rabi, params.detuning, params.omega_e);
    let root = (4.0 * omega * omega + delta * delta).sqrt();
    let nu_plus = omega_e + 0.5 * (-delta + root);
    let nu_minus = omega_e + 0.5 * (-delta - root);
    let theta = if omega == 0.0 {
        // Undriven: the excited state is ν₋ unless the metastable level lies
        // below it, in which case it is ν₊.
        if delta > 0.0 {
            std::f64::consts::FRAC_PI_2
        } else {
            0.0
        }
    } else {
        (2.0 * omega).atan2(root - delta)
    };
    let lamb_shift = lamb_shift_total(omega_e, params)?;
    let sin2 = theta.sin().powi(2);
    let cos2 = theta.cos().powi(2);
    Ok(DressedStates {
        nu_plus,
        nu_minus,
        theta,
        nu_tilde_plus: nu_plus + sin2 * lamb_shift,
        nu_tilde_minus: nu_minus + cos2 * lamb_shift,
        lamb_shift,
    })
}

/// Frequency window between consecutive coupled cutoffs, holding `j_max`
/// propagating channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub j_max: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    /// `[ω_{j_max}, ω_{j_max+1})`.
    pub fn of(j_max: usize, geom: &WaveguideGeometry) -> Result<Self> {
        let lo = nth_coupled_mode(geom, j_max)
            .ok_or_else(|| Error::InvalidBand(format!("no band with {j_max} channels")))?;
        let hi = nth_coupled_mode(geom, j_max + 1)
            .ok_or_else(|| Error::InvalidBand(format!("no band with {j_max} channels")))?;
        if hi.cutoff <= lo.cutoff {
            return Err(Error::InvalidBand(format!(
                "band {j_max} is degenerate: cutoffs coincide at {}",
                lo.cutoff
            )));
        }
        Ok(Self {
            j_max,
            lo: lo.cutoff,
            hi: hi.cutoff,
        })
    }

    /// An explicit interval; it must not straddle a coupled cutoff and must
    /// lie above the lowest one.
    pub fn explicit(lo: f64, hi: f64, geom: &WaveguideGeometry) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidBand(format!("empty interval [{lo}, {hi}]")));
        }
        let modes = enumerate_coupled_modes(geom, hi);
        if let Some(inner) = modes.iter().find(|m| m.cutoff > lo && m.cutoff < hi) {
            return Err(Error::InvalidBand(format!(
                "[{lo}, {hi}] contains the {} cutoff {}",
                inner.label(),
                inner.cutoff
            )));
        }
        let j_max = modes.iter().filter(|m| m.cutoff <= lo).count();
        if j_max == 0 {
            return Err(Error::InvalidBand(format!("no coupled mode propagates in [{lo}, {hi}]")));
        }
        Ok(Self { j_max, lo, hi })
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains_strictly(&self, omega: f64) -> bool {
        omega > self.lo && omega < self.hi
    }

    /// Detuning range `(ω_e − hi, ω_e − lo)` putting the pole inside.
    pub fn eit_window(&self, omega_e: f64) -> (f64, f64) {
        (omega_e - self.hi, omega_e - self.lo)
    }
}

/// Root scan settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Number of samples across the band used for the sign scan.
    pub samples: usize,
    /// One-sided offset from each band edge.
    pub edge_offset: f64,
    /// Roots are refined until `|Re G| < root_tol·max(1, |ω_e|)`.
    pub root_tol: f64,
    pub max_bisections: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            samples: 4000,
            edge_offset: 1e-7,
            root_tol: 1e-10,
            max_bisections: 200,
        }
    }
}

/// `Δ(ω)` on the scan grid of a band. Independent of the drive, so one table
/// serves a whole `(Ω, δ)` sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct LambTable {
    pub band: Band,
    pub omegas: Vec<f64>,
    pub lamb: Vec<f64>,
}

impl LambTable {
    pub fn build(band: &Band, params: &SystemParams, cfg: &ScanConfig) -> Result<Self> {
        let lo = band.lo + cfg.edge_offset;
        let hi = band.hi - cfg.edge_offset;
        if lo >= hi {
            return Err(Error::InvalidBand("band narrower than twice the edge offset".into()));
        }
        let omegas = linspace(lo, hi, cfg.samples.max(2));
        let lamb = omegas
            .iter()
            .map(|&w| lamb_shift_total(w, params))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            band: *band,
            omegas,
            lamb,
        })
    }
}

/// Table 1 row the detuning falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    OutsideEitWindow,
    InsideEitWindow,
}

/// Which input makes `Re G = 0` a complete reflection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrpInput {
    Scss,
    SingleModeRegime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrpPeak {
    pub omega: f64,
    pub re_g: f64,
    /// Total reflectance at the root for the requested input.
    pub reflectance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakReport {
    pub band: Band,
    pub ctp: Vec<f64>,
    pub crp: Vec<CrpPeak>,
    pub ctp_count: usize,
    pub crp_count: usize,
    pub regime: Regime,
    /// `Re G` at the one-sided band-edge limits.
    pub edge_re_g: (f64, f64),
    /// CRP count predicted by the Table 1 sign rules from `edge_re_g`.
    pub predicted_crp_count: usize,
}

impl PeakReport {
    pub fn regime_label(&self) -> String {
        let (lo, hi) = self.edge_re_g;
        let edges = if lo < 0.0 && hi > 0.0 {
            "Re G(lo) < 0 < Re G(hi)"
        } else if lo > 0.0 && hi < 0.0 {
            "Re G(lo) > 0 > Re G(hi)"
        } else {
            "Re G(lo)·Re G(hi) > 0"
        };
        match self.regime {
            Regime::OutsideEitWindow => format!("outside EIT window, {edges}"),
            Regime::InsideEitWindow => format!("within EIT window, {edges}"),
        }
    }
}

/// CRP count from the signs of `Re G` at the band edges.
pub fn table1_crp_count(re_lo: f64, re_hi: f64, regime: Regime) -> usize {
    match regime {
        Regime::OutsideEitWindow => usize::from(re_lo < 0.0 && re_hi > 0.0),
        Regime::InsideEitWindow => {
            if re_lo < 0.0 && re_hi > 0.0 {
                2
            } else if re_lo > 0.0 && re_hi < 0.0 {
                0
            } else {
                1
            }
        }
    }
}

/// 1 when a driven transmission pole lies strictly inside the band.
pub fn count_ctp(band: &Band, params: &SystemParams) -> usize {
    usize::from(params.rabi > 0.0 && band.contains_strictly(params.eit_frequency()))
}

fn re_g_exact(omega: f64, params: &SystemParams) -> Result<f64> {
    Ok(params.bare_detuning(omega) - lamb_shift_total(omega, params)?)
}

/// Bisection on a bracket whose endpoint signs are known; endpoints are
/// never evaluated, so either may be the pole.
fn bisect(
    mut neg: f64,
    mut pos: f64,
    params: &SystemParams,
    cfg: &ScanConfig,
) -> Result<(f64, f64)> {
    let tol = cfg.root_tol * params.omega_e.abs().max(1.0);
    let mut best = (0.5 * (neg + pos), f64::INFINITY);
    for _ in 0..cfg.max_bisections {
        let mid = 0.5 * (neg + pos);
        if mid == neg || mid == pos {
            break;
        }
        let value = re_g_exact(mid, params)?;
        if value.abs() < best.1.abs() {
            best = (mid, value);
        }
        if value.abs() < tol {
            break;
        }
        if value < 0.0 {
            neg = mid;
        } else {
            pos = mid;
        }
    }
    Ok(best)
}

/// Locates every zero of `Re G` inside the band, using a precomputed
/// Lamb-shift table for the scan.
pub fn find_crp_with_table(
    table: &LambTable,
    input: CrpInput,
    params: &SystemParams,
    cfg: &ScanConfig,
) -> Result<PeakReport> {
    let band = table.band;
    let ctp_count = count_ctp(&band, params);
    let pole = (ctp_count == 1).then(|| params.eit_frequency());
    let regime = if pole.is_some() {
        Regime::InsideEitWindow
    } else {
        Regime::OutsideEitWindow
    };

    // Samples as (ω, Re G); ±∞ stand for the two sides of the pole.
    let mut left = Vec::with_capacity(table.omegas.len() + 1);
    let mut right = Vec::with_capacity(table.omegas.len() + 1);
    if let Some(p) = pole {
        right.push((p, f64::NEG_INFINITY));
    }
    for (&w, &lamb) in table.omegas.iter().zip(&table.lamb) {
        if params.is_eit_pole(w) {
            continue;
        }
        let value = params.bare_detuning(w) - lamb;
        match pole {
            Some(p) if w > p => right.push((w, value)),
            _ => left.push((w, value)),
        }
    }
    if let Some(p) = pole {
        left.push((p, f64::INFINITY));
    }

    let edge_lo = re_g_exact(band.lo + cfg.edge_offset, params)?;
    let edge_hi = re_g_exact(band.hi - cfg.edge_offset, params)?;

    let mut roots = Vec::new();
    for side in [&left, &right] {
        for pair in side.windows(2) {
            let ((wa, va), (wb, vb)) = (pair[0], pair[1]);
            if vb == 0.0 {
                roots.push((wb, 0.0));
            } else if va < 0.0 && vb > 0.0 {
                roots.push(bisect(wa, wb, params, cfg)?);
            } else if va > 0.0 && vb < 0.0 {
                roots.push(bisect(wb, wa, params, cfg)?);
            }
        }
    }

    let crp = roots
        .into_iter()
        .map(|(omega, re_g)| {
            let kind = match input {
                CrpInput::Scss => InputKind::Scss,
                CrpInput::SingleModeRegime => InputKind::SingleMode(1),
            };
            let state = kind.build(omega, params)?;
            let result = scatter(&state, params)?;
            Ok(CrpPeak {
                omega,
                re_g,
                reflectance: result.total_reflectance,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(PeakReport {
        band,
        ctp: pole.into_iter().collect(),
        ctp_count,
        crp_count: crp.len(),
        crp,
        regime,
        edge_re_g: (edge_lo, edge_hi),
        predicted_crp_count: table1_crp_count(edge_lo, edge_hi, regime),
    })
}

/// Complete-reflection and complete-transmission peaks inside `band`.
pub fn find_crp(band: &Band, input: CrpInput, params: &SystemParams, cfg: &ScanConfig) -> Result<PeakReport> {
    if input == CrpInput::SingleModeRegime && band.j_max != 1 {
        return Err(Error::InvalidBand(format!(
            "single-mode-regime input needs j_max = 1, band has {}",
            band.j_max
        )));
    }
    let table = LambTable::build(band, params, cfg)?;
    find_crp_with_table(&table, input, params, cfg)
}

/// Evenly spaced points with exact endpoints.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// One `(Ω, δ)` cell; `-1` marks a cell whose evaluation failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseCell {
    pub ctp: i32,
    pub crp: i32,
    pub predicted_crp: i32,
}

impl PhaseCell {
    pub const FAILED: Self = Self {
        ctp: -1,
        crp: -1,
        predicted_crp: -1,
    };

    pub fn failed(&self) -> bool {
        self.ctp < 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseMap {
    pub band: Band,
    pub rabi: Vec<f64>,
    pub detuning: Vec<f64>,
    /// `cells[i][k]` belongs to `rabi[i]`, `detuning[k]`.
    pub cells: Vec<Vec<PhaseCell>>,
}

/// CTP/CRP counts over a grid of drive parameters. `params.rabi` and
/// `params.detuning` are ignored; everything else is held fixed.
pub fn phase_map(
    band: &Band,
    rabi: &[f64],
    detuning: &[f64],
    params: &SystemParams,
    cfg: &ScanConfig,
) -> Result<PhaseMap> {
    if rabi.is_empty() || detuning.is_empty() {
        return Err(Error::InvalidParameter("phase map axes must be non-empty".into()));
    }
    let table = LambTable::build(band, params, cfg)?;
    let input = if band.j_max == 1 {
        CrpInput::SingleModeRegime
    } else {
        CrpInput::Scss
    };
    let row = |&omega: &f64| -> Vec<PhaseCell> {
        detuning
            .iter()
            .map(|&delta| {
                let cell_params = SystemParams {
                    rabi: omega,
                    detuning: delta,
                    ..*params
                };
                if cell_params.validate().is_err() {
                    return PhaseCell::FAILED;
                }
                match find_crp_with_table(&table, input, &cell_params, cfg) {
                    Ok(report) => PhaseCell {
                        ctp: report.ctp_count as i32,
                        crp: report.crp_count as i32,
                        predicted_crp: report.predicted_crp_count as i32,
                    },
                    Err(_) => PhaseCell::FAILED,
                }
            })
            .collect()
    };
    #[cfg(feature = "parallel")]
    let cells = {
        use rayon::prelude::*;
        rabi.par_iter().map(row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let cells = rabi.iter().map(row).collect();
    Ok(PhaseMap {
        band: *band,
        rabi: rabi.to_vec(),
        detuning: detuning.to_vec(),
        cells,
    })
}

/// Frequencies for a sweep, moved off exact cutoffs and off the pole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub omegas: Vec<f64>,
    /// Points moved by [`FrequencyGrid::NUDGE`], as `(requested, used)`.
    pub nudged: Vec<(f64, f64)>,
    /// Exact transmission pole inside the sweep range, if any.
    pub ctp: Option<f64>,
}

impl FrequencyGrid {
    pub const NUDGE: f64 = 1e-9;

    pub fn new(lo: f64, hi: f64, points: usize, params: &SystemParams) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) || points == 0 {
            return Err(Error::InvalidParameter(format!(
                "bad frequency grid [{lo}, {hi}] with {points} points"
            )));
        }
        let cutoffs: Vec<f64> = enumerate_coupled_modes(&params.geom, hi + 1.0)
            .iter()
            .map(|m| m.cutoff)
            .collect();
        let mut nudged = Vec::new();
        let omegas = linspace(lo, hi, points)
            .into_iter()
            .enumerate()
            .map(|(i, w)| {
                let at_top = i + 1 == points && points > 1;
                let mut used = w;
                if cutoffs.contains(&w) {
                    used = if at_top { w - Self::NUDGE } else { w + Self::NUDGE };
                }
                if params.is_eit_pole(used) {
                    used += if at_top { -Self::NUDGE } else { Self::NUDGE };
                }
                if used != w {
                    nudged.push((w, used));
                }
                used
            })
            .collect();
        let pole = params.eit_frequency();
        let ctp = (params.rabi > 0.0 && pole > lo && pole < hi && !cutoffs.contains(&pole)).then_some(pole);
        Ok(Self { omegas, nudged, ctp })
    }
}

/// One sweep point. `error` is set and the numbers are NaN when the point
/// could not be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub omega: f64,
    pub total_reflectance: f64,
    pub total_transmittance: f64,
    /// `None` on the transmission pole.
    pub resolvent: Option<Complex64>,
    pub reflectance: Vec<f64>,
    pub transmittance: Vec<f64>,
    pub error: Option<String>,
}

impl SpectrumRow {
    fn failed(omega: f64, err: Error) -> Self {
        Self {
            omega,
            total_reflectance: f64::NAN,
            total_transmittance: f64::NAN,
            resolvent: Some(Complex64::new(f64::NAN, f64::NAN)),
            reflectance: Vec::new(),
            transmittance: Vec::new(),
            error: Some(err.to_string()),
        }
    }
}

fn spectrum_point(omega: f64, kind: &InputKind, params: &SystemParams) -> SpectrumRow {
    let outcome = kind.build(omega, params).and_then(|input| scatter(&input, params));
    match outcome {
        Ok(res) => SpectrumRow {
            omega,
            total_reflectance: res.total_reflectance,
            total_transmittance: res.total_transmittance,
            resolvent: match res.resolvent {
                Resolvent::Finite(g) => Some(g),
                Resolvent::Pole => None,
            },
            reflectance: res.reflectance,
            transmittance: res.transmittance,
            error: None,
        },
        Err(err) => SpectrumRow::failed(omega, err),
    }
}

/// Scatters the chosen input family at every grid frequency.
pub fn spectrum(omegas: &[f64], kind: &InputKind, params: &SystemParams) -> Vec<SpectrumRow> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        omegas.par_iter().map(|&w| spectrum_point(w, kind, params)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        omegas.iter().map(|&w| spectrum_point(w, kind, params)).collect()
    }
}

/// Lamb-shift partial sums at `omega` as more coupled modes are included,
/// for the first `count` modes regardless of the active truncation.
pub fn lamb_convergence(omega: f64, count: usize, params: &SystemParams) -> Result<Vec<(usize, f64)>> {
    let mode = nth_coupled_mode(&params.geom, count)
        .ok_or_else(|| Error::InvalidParameter(format!("no coupled mode with index {count}")))?;
    let modes = enumerate_coupled_modes(&params.geom, mode.cutoff);
    let mut total = 0.0;
    modes
        .iter()
        .take(count)
        .enumerate()
        .map(|(i, m)| {
            total += lamb_shift_mode(m, omega, params.g, &params.quad)?.value;
            Ok((i + 1, total))
        })
        .collect()
}
