//! Self-checks run by `waveqed validate`: unitarity, closed forms, the
//! principal-value oracle, EIT exactness and the Table 1 peak rules.

pub mod oracle;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{find_crp_with_table, Band, CrpInput, LambTable, ScanConfig};
use crate::error::Result;
use crate::scattering::{
    build_scss, build_single_mode, resolvent_with, scatter_with, InputState, Resolvent, SystemParams,
};
use crate::selfenergy::{lamb_shift_mode, self_energy_total, QuadConfig, SelfEnergy};
use crate::waveguide::{propagating_modes, WaveguideGeometry};

/// Deliberate corruption used to prove that the checks can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    FlipDecaySign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationOptions {
    pub seed: u64,
    /// Samples for the unitarity, closed-form and Table 1 checks.
    pub samples: usize,
    pub pv_samples: usize,
    pub quad: QuadConfig,
    pub fault: Option<Fault>,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            seed: 20240607,
            samples: 200,
            pv_samples: 20,
            quad: QuadConfig::default(),
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub samples: usize,
    /// Largest deviation seen (or number of mismatches for counting checks).
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub options: ValidationOptions,
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn self_energy(omega: f64, params: &SystemParams, fault: Option<Fault>) -> Result<SelfEnergy> {
    let mut se = self_energy_total(omega, params)?;
    if fault == Some(Fault::FlipDecaySign) {
        se.decay = -se.decay;
        for entry in &mut se.per_mode {
            entry.decay = -entry.decay;
        }
    }
    Ok(se)
}

/// Random parameters and an in-band frequency for a band with `j_max`
/// channels.
pub fn random_case(rng: &mut impl Rng, j_max: usize, quad: QuadConfig) -> (SystemParams, f64) {
    let geom = WaveguideGeometry {
        z0: rng.gen_range(0.0..2.0),
        ..WaveguideGeometry::default()
    };
    let band = Band::of(j_max, &geom).expect("default geometry has at least three bands");
    let width = band.hi - band.lo;
    let params = SystemParams {
        omega_e: band.lo + width * rng.gen_range(0.0..1.0),
        rabi: rng.gen_range(0.0..2.0),
        detuning: rng.gen_range(-2.0..2.0),
        g: rng.gen_range(0.02..0.2),
        geom,
        quad,
        ..SystemParams::default()
    };
    let omega = band.lo + width * rng.gen_range(1e-4..1.0 - 1e-4);
    (params, omega)
}

pub fn random_input(rng: &mut impl Rng, omega: f64, j_max: usize) -> Result<InputState> {
    loop {
        let coeffs: Vec<Complex64> = (0..j_max)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        if coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3 {
            return InputState::normalized(omega, coeffs);
        }
    }
}

fn outcome(name: &str, samples: usize, worst: f64, tolerance: f64, failures: Vec<String>) -> CheckOutcome {
    let passed = failures.is_empty() && worst <= tolerance;
    let detail = if failures.is_empty() {
        format!("max deviation {worst:.3e} (tolerance {tolerance:.0e})")
    } else {
        format!("{} problem(s), first: {}", failures.len(), failures[0])
    };
    CheckOutcome {
        name: name.to_string(),
        passed,
        samples,
        worst,
        tolerance,
        detail,
    }
}

fn check_unitarity(rng: &mut ChaCha8Rng, opts: &ValidationOptions) -> CheckOutcome {
    let tol = 1e-12;
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for i in 0..opts.samples {
        let j_max = 1 + i % 3;
        let (params, omega) = random_case(rng, j_max, opts.quad);
        let result = random_input(rng, omega, j_max).and_then(|input| {
            let se = self_energy(omega, &params, opts.fault)?;
            scatter_with(&input, &params, &se)
        });
        match result {
            Ok(res) => worst = worst.max((res.total_reflectance + res.total_transmittance - 1.0).abs()),
            Err(e) => failures.push(format!("ω = {omega}: {e}")),
        }
    }
    outcome("unitarity", opts.samples, worst, tol, failures)
}

fn check_closed_forms(rng: &mut ChaCha8Rng, opts: &ValidationOptions) -> CheckOutcome {
    let tol = 1e-12;
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for i in 0..opts.samples {
        let j_max = 1 + i % 3;
        let (params, omega) = random_case(rng, j_max, opts.quad);
        let n = rng.gen_range(1..=j_max);
        let run = || -> Result<f64> {
            let se = self_energy(omega, &params, opts.fault)?;
            let Resolvent::Finite(g) = resolvent_with(omega, &params, &se) else {
                return Ok(0.0);
            };
            let gammas = se.decay_rates();
            let gamma = se.decay;
            let g2 = g.norm_sqr();
            let mut dev: f64 = 0.0;

            let scss = scatter_with(&build_scss(omega, &params)?, &params, &se)?;
            dev = dev.max((scss.total_reflectance - gamma * gamma / g2).abs());
            for (j, gj) in gammas.iter().enumerate() {
                let r = gj * gamma / g2;
                dev = dev.max((scss.reflectance[j] - r).abs());
                dev = dev.max((scss.transmittance[j] - (gj / gamma - r)).abs());
            }

            let sms = scatter_with(&build_single_mode(omega, n, &params)?, &params, &se)?;
            let gn = gammas[n - 1];
            dev = dev.max((sms.total_reflectance - gamma * gn / g2).abs());
            for (j, gj) in gammas.iter().enumerate() {
                if j + 1 == n {
                    dev = dev.max((sms.reflectance[j] - gn * gn / g2).abs());
                } else {
                    dev = dev.max((sms.reflectance[j] - gn * gj / g2).abs());
                    dev = dev.max((sms.transmittance[j] - gn * gj / g2).abs());
                }
            }
            Ok(dev)
        };
        match run() {
            Ok(dev) => worst = worst.max(dev),
            Err(e) => failures.push(format!("ω = {omega}: {e}")),
        }
    }
    outcome("closed-forms", opts.samples, worst, tol, failures)
}

fn check_eit(rng: &mut ChaCha8Rng, opts: &ValidationOptions) -> CheckOutcome {
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for i in 0..opts.samples {
        let j_max = 1 + i % 3;
        let (mut params, _) = random_case(rng, j_max, opts.quad);
        params.rabi = rng.gen_range(0.05..2.0);
        let band = Band::of(j_max, &params.geom).expect("band exists");
        let omega = band.lo + (band.hi - band.lo) * rng.gen_range(1e-4..1.0 - 1e-4);
        params.detuning = params.omega_e - omega;
        let result = random_input(rng, omega, j_max).and_then(|input| {
            let se = self_energy(omega, &params, opts.fault)?;
            scatter_with(&input, &params, &se)
        });
        match result {
            Ok(res) => {
                if !res.resolvent.is_pole() {
                    failures.push(format!("ω = {omega}: pole not detected"));
                }
                worst = worst.max(res.total_reflectance.abs());
            }
            Err(e) => failures.push(format!("ω = {omega}: {e}")),
        }
    }
    outcome("eit-exactness", opts.samples, worst, 0.0, failures)
}

fn check_pv_oracle(rng: &mut ChaCha8Rng, opts: &ValidationOptions) -> CheckOutcome {
    let tol = 1e-6;
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    let geom = WaveguideGeometry::default();
    for _ in 0..opts.pv_samples {
        let j_max = rng.gen_range(1..=3);
        let band = Band::of(j_max, &geom).expect("band exists");
        let omega = band.lo + (band.hi - band.lo) * rng.gen_range(0.01..0.99);
        let modes = match propagating_modes(&geom, omega) {
            Ok(m) => m,
            Err(e) => {
                failures.push(e.to_string());
                continue;
            }
        };
        let mode = modes[rng.gen_range(0..modes.len())];
        let g = rng.gen_range(0.02..0.2);
        match lamb_shift_mode(&mode, omega, g, &opts.quad) {
            Ok(value) => {
                let reference = oracle::lamb_shift_pv(&mode, omega, g);
                worst = worst.max(((value.value - reference) / reference).abs());
            }
            Err(e) => failures.push(format!("{} at ω = {omega}: {e}", mode.label())),
        }
    }
    outcome("pv-oracle", opts.pv_samples, worst, tol, failures)
}

fn check_table1(rng: &mut ChaCha8Rng, opts: &ValidationOptions) -> CheckOutcome {
    let mut failures = Vec::new();
    let mut mismatches = 0usize;
    let geom = WaveguideGeometry::default();
    let scan = ScanConfig::default();
    for (j_max, input) in [(1, CrpInput::SingleModeRegime), (2, CrpInput::Scss)] {
        let band = Band::of(j_max, &geom).expect("band exists");
        let base = SystemParams {
            omega_e: band.midpoint(),
            g: 0.1,
            geom,
            quad: opts.quad,
            ..SystemParams::default()
        };
        let table = match LambTable::build(&band, &base, &scan) {
            Ok(t) => t,
            Err(e) => {
                failures.push(e.to_string());
                continue;
            }
        };
        for _ in 0..opts.samples / 2 {
            let params = SystemParams {
                rabi: rng.gen_range(0.0..2.5),
                detuning: rng.gen_range(-3.0..3.0),
                ..base
            };
            match find_crp_with_table(&table, input, &params, &scan) {
                Ok(report) => {
                    if report.crp_count != report.predicted_crp_count {
                        mismatches += 1;
                    }
                    if let Some(bad) = report.crp.iter().find(|p| p.reflectance < 1.0 - 1e-9) {
                        failures.push(format!("CRP at ω = {} has R = {}", bad.omega, bad.reflectance));
                    }
                }
                Err(e) => failures.push(e.to_string()),
            }
        }
    }
    let mut check = outcome("table1", opts.samples / 2 * 2, mismatches as f64, 0.0, failures);
    if check.passed {
        check.detail = "CRP counts match the edge-sign rules in every sample".into();
    } else if mismatches > 0 {
        check.detail = format!("{mismatches} sample(s) disagree with the edge-sign rules; {}", check.detail);
    }
    check
}

/// Runs every check with a fixed seed.
pub fn run(opts: &ValidationOptions) -> ValidationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let checks = vec![
        check_unitarity(&mut rng, opts),
        check_closed_forms(&mut rng, opts),
        check_eit(&mut rng, opts),
        check_pv_oracle(&mut rng, opts),
        check_table1(&mut rng, opts),
    ];
    ValidationReport {
        options: opts.clone(),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ValidationOptions {
        ValidationOptions {
            samples: 30,
            pv_samples: 4,
            ..ValidationOptions::default()
        }
    }

    #[test]
    fn default_run_passes() {
        let report = run(&small());
        for check in &report.checks {
            assert!(check.passed, "{}: {}", check.name, check.detail);
        }
    }

    #[test]
    fn flipped_decay_breaks_unitarity() {
        let report = run(&ValidationOptions {
            fault: Some(Fault::FlipDecaySign),
            ..small()
        });
        assert!(!report.all_passed());
        let unitarity = report.checks.iter().find(|c| c.name == "unitarity").unwrap();
        assert!(!unitarity.passed);
        assert!(unitarity.worst > 1e-3);
    }
}
