//! Values recomputed along routes that share no code with the library's
//! self-energy and scattering paths.

use std::f64::consts::PI;

use num_complex::Complex64;
use waveqed::analysis::find_crp;
use waveqed::scattering::{build_scss, scatter, InputState};
use waveqed::selfenergy::{decay_rate_mode, lamb_shift_total};
use waveqed::validation::oracle::gauss_legendre;
use waveqed::waveguide::Mode;
use waveqed::{dressed_states, Band, CrpInput, ScanConfig, SystemParams, WaveguideGeometry};

fn band(j: usize) -> Band {
    Band::of(j, &WaveguideGeometry::default()).unwrap()
}

/// `∫ f` over `[a, b]` with `panels` copies of a 20-point Gauss rule.
fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let lo = a + p as f64 * h;
            x.iter().zip(&w).map(|(xi, wi)| wi * f(lo + 0.5 * h * (xi + 1.0))).sum::<f64>() * 0.5 * h
        })
        .sum()
}

/// `−Im Σ_j(ω + iη)`: the decay rate with the delta function replaced by a
/// Lorentzian of half-width `η`.
fn broadened_decay(cutoff: f64, omega: f64, g: f64, eta: f64) -> f64 {
    // ω' = ω_j cosh u removes the square-root edge; t grades the mesh
    // geometrically away from the peak at u0.
    let u0 = (omega / cutoff).acosh();
    let w = eta / (omega * omega - cutoff * cutoff).sqrt();
    let lorentz = |u: f64| {
        let x = omega - cutoff * u.cosh();
        eta / PI / (x * x + eta * eta)
    };
    let side = |sign: f64, span: f64| {
        let t_max = (1.0 + span / w).ln();
        integrate(|t| w * t.exp() * lorentz(u0 + sign * (t.exp() - 1.0) * w), 0.0, t_max, 400)
    };
    2.0 * PI * g * g * cutoff * cutoff * (side(-1.0, u0) + side(1.0, 40.0 - u0))
}

#[test]
fn decay_rate_from_vanishing_broadening() {
    let geom = WaveguideGeometry::default();
    for (mode, omega, g) in [(Mode::tm(1, 1, &geom), 5.4, 0.1), (Mode::tm(3, 1, &geom), 8.3, 0.05)] {
        let eta = 2e-3;
        let [a, b, c] = [1.0, 0.5, 0.25].map(|s| broadened_decay(mode.cutoff, omega, g, s * eta));
        // Corrections run in integer powers of η.
        let (ab, bc) = (2.0 * b - a, 2.0 * c - b);
        let limit = (4.0 * bc - ab) / 3.0;
        let want = decay_rate_mode(&mode, omega, g).unwrap();
        assert!(((limit - want) / want).abs() < 1e-8, "{limit} vs {want}");
        assert!(((a - want) / want).abs() > 1e-6, "broadening should matter at finite η");
    }
}

/// Maximum reflectance over a dense grid of two-channel inputs
/// `(cos χ, sin χ e^{iφ})`.
fn grid_max(omega: f64, p: &SystemParams) -> (f64, Vec<Complex64>) {
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for i in 0..=360 {
        let chi = 0.5 * PI * i as f64 / 360.0;
        for k in 0..720 {
            let phi = 2.0 * PI * k as f64 / 720.0;
            let c = vec![Complex64::new(chi.cos(), 0.0), Complex64::from_polar(chi.sin(), phi)];
            let r = scatter(&InputState::new(omega, c.clone()).unwrap(), p).unwrap().total_reflectance;
            if r > best.0 {
                best = (r, c);
            }
        }
    }
    best
}

#[test]
fn scss_is_the_reflectance_maximiser() {
    let b = band(2);
    let p = SystemParams {
        omega_e: b.midpoint(),
        rabi: 0.5,
        geom: WaveguideGeometry::new(1.5, 0.3).unwrap(),
        ..SystemParams::default()
    };
    let fano = find_crp(&b, CrpInput::Scss, &p, &ScanConfig::default()).unwrap().crp[0].omega;
    for omega in [fano, 7.6] {
        let (r_max, c) = grid_max(omega, &p);
        let scss = build_scss(omega, &p).unwrap();
        let r_scss = scatter(&scss, &p).unwrap().total_reflectance;
        assert!(r_scss >= r_max - 1e-12, "grid found {r_max} above {r_scss}");
        assert!(r_scss - r_max < 1e-4);
        let overlap: Complex64 = c.iter().zip(&scss.coeffs).map(|(a, b)| a.conj() * b).sum();
        assert!(overlap.norm_sqr() > 1.0 - 1e-3);
        if omega == fano {
            assert!(r_scss > 1.0 - 1e-9);
        }
    }
}

#[test]
fn two_channel_point_assembled_by_hand() {
    let b = band(2);
    let p = SystemParams {
        omega_e: b.midpoint(),
        rabi: 0.5,
        detuning: 0.2,
        ..SystemParams::default()
    };
    let omega = 8.0;
    let cutoffs = [PI * (1.0f64 / 2.25 + 1.0).sqrt(), PI * (9.0f64 / 2.25 + 1.0).sqrt()];
    // TM11 and TM31 carry sin(mπ/2)sin(nπ/2) = +1 and −1.
    let parity = [1.0, -1.0];
    let k: Vec<f64> = cutoffs.iter().map(|w| (omega * omega - w * w).sqrt()).collect();
    let rho: Vec<f64> = k.iter().map(|k| omega / k).collect();
    let coupling: Vec<f64> = (0..2).map(|j| -p.g * cutoffs[j] * parity[j] / omega.sqrt()).collect();
    let gamma: Vec<f64> = (0..2).map(|j| 2.0 * PI * coupling[j].powi(2) * rho[j]).collect();
    let lamb = lamb_shift_total(omega, &p).unwrap();
    let g_val = Complex64::new(
        omega - p.omega_e - p.rabi * p.rabi / (omega - p.omega_e + p.detuning) - lamb,
        gamma[0] + gamma[1],
    );

    // Amplitudes per unit k; the flux in channel j carries a factor 1/ρ_j.
    let c = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
    let flux: f64 = (0..2).map(|j| c[j].norm_sqr() / rho[j]).sum();
    let drive: Complex64 = (0..2).map(|i| c[i] * coupling[i]).sum();
    let res = scatter(&InputState::new(omega, c.to_vec()).unwrap(), &p).unwrap();
    for j in 0..2 {
        let scattered = -Complex64::i() * 2.0 * PI * rho[j] * coupling[j] * drive / g_val;
        assert!((res.reflectance[j] - scattered.norm_sqr() / rho[j] / flux).abs() < 1e-13);
        assert!((res.transmittance[j] - (c[j] + scattered).norm_sqr() / rho[j] / flux).abs() < 1e-13);
    }
    let total = gamma[0] + gamma[1];
    let want = 2.0 * PI * total * drive.norm_sqr() / g_val.norm_sqr() / flux;
    assert!((res.total_reflectance - want).abs() < 1e-13);
}

#[test]
fn dressed_levels_zero_the_bare_resolvent() {
    let b = band(1);
    for (rabi, detuning) in [(1.0, 0.5), (0.3, -1.2), (2.0, 0.0), (0.7, 1.9)] {
        let p = SystemParams {
            omega_e: b.midpoint(),
            rabi,
            detuning,
            ..SystemParams::default()
        };
        let d = dressed_states(&p).unwrap();
        for nu in [d.nu_plus, d.nu_minus] {
            let x = nu - p.omega_e;
            assert!((x - rabi * rabi / (x + detuning)).abs() < 1e-12, "ν = {nu}");
        }
        // With Δ frozen at ω_e the roots follow from a quadratic; the
        // dressed shifts agree to first order in Δ.
        let lamb = d.lamb_shift;
        let (s, q) = (lamb - detuning, rabi * rabi + lamb * detuning);
        let disc = (s * s + 4.0 * q).sqrt();
        let exact = [p.omega_e + 0.5 * (s + disc), p.omega_e + 0.5 * (s - disc)];
        assert!((exact[0] - d.nu_tilde_plus).abs() < 10.0 * lamb * lamb);
        assert!((exact[1] - d.nu_tilde_minus).abs() < 10.0 * lamb * lamb);
    }
}

#[test]
fn weak_coupling_peaks_sit_on_dressed_levels() {
    let b = band(1);
    let p = SystemParams {
        omega_e: b.midpoint(),
        rabi: 1.0,
        detuning: 0.5,
        g: 0.01,
        ..SystemParams::default()
    };
    let d = dressed_states(&p).unwrap();
    let report = find_crp(&b, CrpInput::SingleModeRegime, &p, &ScanConfig::default()).unwrap();
    assert_eq!(report.crp_count, 2);
    let mut roots: Vec<f64> = report.crp.iter().map(|c| c.omega).collect();
    roots.sort_by(f64::total_cmp);
    assert!((roots[0] - d.nu_tilde_minus).abs() < 1e-4);
    assert!((roots[1] - d.nu_tilde_plus).abs() < 1e-4);
    // The drive-free shift alone would miss by far more.
    assert!((roots[1] - d.nu_plus).abs() > 10.0 * (roots[1] - d.nu_tilde_plus).abs());
}
