//! Globally adaptive Gauss–Kronrod (10/21 point) integration over a set of
//! breakpoints.

#![allow(clippy::excessive_precision)]

/// Kronrod abscissae on [0, 1]; odd positions are the Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_958_790_650,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights paired with `XGK[1], XGK[3], …, XGK[9]`.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Integration tolerances. The run stops once the summed error estimate is
/// at or below `max(abs_tol, rel_tol·|value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = f_center * WGK[10];
    let mut gauss = 0.0;
    let mut abs_sum = kronrod.abs();
    let mut values = [(0.0, 0.0); 10];
    for (i, slot) in values.iter_mut().enumerate() {
        let dx = half * XGK[i];
        let lo = f(center - dx);
        let hi = f(center + dx);
        kronrod += WGK[i] * (lo + hi);
        abs_sum += WGK[i] * (lo.abs() + hi.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (lo + hi);
        }
        *slot = (lo, hi);
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (f_center - mean).abs();
    for (i, (lo, hi)) in values.iter().enumerate() {
        asc += WGK[i] * ((lo - mean).abs() + (hi - mean).abs());
    }

    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { a, b, value, error }
}

/// Integrates `f` over `[points[0], points[last]]`, starting from one panel
/// per consecutive pair of breakpoints and bisecting the panel with the
/// largest error estimate until the tolerance is met.
///
/// On failure the best estimate is returned in the `Err` variant.
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    tol: Tolerance,
) -> Result<Estimate, Estimate> {
    assert!(points.len() >= 2, "need at least one interval");
    let mut segments: Vec<Segment> = points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod21(&f, w[0], w[1]))
        .collect();
    let mut evaluations = 21 * segments.len();

    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let estimate = Estimate {
            value,
            error,
            evaluations,
        };
        if error <= tol.abs_tol.max(tol.rel_tol * value.abs()) {
            return Ok(estimate);
        }
        if segments.len() >= tol.max_subdivisions {
            return Err(estimate);
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) {
            // Panel can no longer be split in floating point.
            return Err(estimate);
        }
        segments.push(kronrod21(&f, seg.a, mid));
        segments.push(kronrod21(&f, mid, seg.b));
        evaluations += 42;
    }
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate, Estimate> {
    integrate_with_breakpoints(f, &[a, b], tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TIGHT: Tolerance = Tolerance {
        abs_tol: 1e-13,
        rel_tol: 1e-13,
        max_subdivisions: 500,
    };

    #[test]
    fn kronrod_is_exact_for_degree_31() {
        for degree in 0..=31 {
            let seg = kronrod21(&|x: f64| x.powi(degree), 0.0, 1.0);
            let exact = 1.0 / (degree as f64 + 1.0);
            assert!((seg.value - exact).abs() < 1e-14, "degree {degree}: {}", seg.value);
        }
    }

    #[test]
    fn gauss_weights_sum_to_two() {
        let kronrod: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        let gauss: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((kronrod - 2.0).abs() < 1e-15);
        assert!((gauss - 2.0).abs() < 1e-15);
    }

    #[test]
    fn embedded_gauss_rule_is_exact_for_degree_19() {
        for degree in (0..=19).step_by(2) {
            let mut sum = 0.0;
            for (i, w) in WG.iter().enumerate() {
                sum += 2.0 * w * XGK[2 * i + 1].powi(degree);
            }
            let exact = 2.0 / (degree as f64 + 1.0);
            assert!((sum - exact).abs() < 1e-14, "degree {degree}");
        }
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        // ∫_{-1}^{1} dx / (x² + 1e-4) = 2·atan(100)/1e-2
        let est = integrate(|x| 1.0 / (x * x + 1e-4), -1.0, 1.0, TIGHT).unwrap();
        let exact = 200.0 * 100f64.atan();
        assert!((est.value - exact).abs() < 1e-9 * exact);
        assert!(est.evaluations > 21);
    }

    #[test]
    fn breakpoints_split_domain() {
        let est = integrate_with_breakpoints(|x: f64| x.abs().sqrt(), &[-1.0, 0.0, 1.0], TIGHT).unwrap();
        assert!((est.value - 4.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn reports_failure_with_best_estimate() {
        let tol = Tolerance {
            abs_tol: 1e-15,
            rel_tol: 0.0,
            max_subdivisions: 3,
        };
        let err = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, tol).unwrap_err();
        assert!(err.error > 1e-15);
        assert!((err.value - 2.0).abs() < 0.1);
    }
}
