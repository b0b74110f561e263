//! Adaptive Gauss–Kronrod (10/21-point) quadrature with global interval
//! subdivision, plus integration of bounded functions against probability
//! densities on the half line.
//!
//! Semi-infinite domains are cut where the density has fallen below
//! `tail_cutoff` times its peak; the discarded mass, times the bound on the
//! integrand, is added to the error estimate.


#![allow(clippy::excessive_precision)]

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{fabs, CompensatedSum};

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
    0.123_491_976_262_065_851_077_600_525_491_434,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and limits for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Absolute error target.
    pub abs_tol: f64,
    /// Relative error target.
    pub rel_tol: f64,
    /// Maximum number of intervals.
    pub max_subdivisions: usize,
    /// Semi-infinite domains end where the density drops below this
    /// fraction of its peak value.
    pub tail_cutoff: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 500,
            tail_cutoff: 1e-16,
        }
    }
}

/// Value and error estimate of an integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    /// Estimated value.
    pub value: f64,
    /// Estimated absolute error, including any truncated tail.
    pub abs_error: f64,
    /// Number of intervals in the final partition.
    pub intervals: usize,
    /// Number of integrand evaluations.
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resg = 0.0;
    let mut resk = WGK[10] * fc;
    let mut resabs = fabs(resk);
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += WG[j] * (f1 + f2);
        resk += WGK[jtw] * (f1 + f2);
        resabs += WGK[jtw] * (fabs(f1) + fabs(f2));
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += WGK[jtwm1] * (f1 + f2);
        resabs += WGK[jtwm1] * (fabs(f1) + fabs(f2));
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[10] * fabs(fc - reskh);
    for j in 0..10 {
        resasc += WGK[j] * (fabs(fv1[j] - reskh) + fabs(fv2[j] - reskh));
    }
    let value = resk * half;
    let resabs = resabs * fabs(half);
    let resasc = resasc * fabs(half);
    let mut error = fabs((resk - resg) * half);
    if resasc != 0.0 && error != 0.0 {
        let scale = 200.0 * error / resasc;
        error = resasc * if scale < 1.0 { scale * libm::sqrt(scale) } else { 1.0 };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Panel { a, b, value, error }
}

/// Integrates `f` over `[a, b]`, splitting first at the given interior
/// `breakpoints` (which must be increasing and inside `(a, b)`).
pub fn integrate_with_breakpoints<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<Integral> {
    let mut edges = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(a);
    edges.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    edges.push(b);
    let mut panels: Vec<Panel> = edges
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod21(&mut f, w[0], w[1]))
        .collect();
    let mut evaluations = 21 * panels.len();
    if panels.is_empty() {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            intervals: 0,
            evaluations: 0,
        });
    }
    loop {
        let (value, error) = totals(&panels);
        let target = spec.abs_tol.max(spec.rel_tol * fabs(value));
        if error <= target {
            break;
        }
        if panels.len() >= spec.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                achieved: error,
                requested: target,
            });
        }
        // Bisect the panel with the largest error; ties go to the leftmost.
        let worst = panels
            .iter()
            .enumerate()
            .fold(0, |best, (i, p)| if p.error > panels[best].error { i } else { best });
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        if !(mid > a && mid < b) {
            return Err(Error::QuadratureNonConvergence {
                achieved: error,
                requested: target,
            });
        }
        panels[worst] = kronrod21(&mut f, a, mid);
        panels.push(kronrod21(&mut f, mid, b));
        evaluations += 42;
    }
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let (value, abs_error) = totals(&panels);
    Ok(Integral {
        value,
        abs_error,
        intervals: panels.len(),
        evaluations,
    })
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral> {
    integrate_with_breakpoints(f, a, b, &[], spec)
}

fn totals(panels: &[Panel]) -> (f64, f64) {
    let mut value = CompensatedSum::default();
    let mut error = CompensatedSum::default();
    for p in panels {
        value.add(p.value);
        error.add(p.error);
    }
    (value.value(), error.value())
}

/// A probability density on `[0, ∞)` that is unimodal with a known mode.
pub trait HalfLineDensity {
    /// Density at `x ≥ 0`.
    fn density(&self, x: f64) -> f64;
    /// Location of the maximum.
    fn mode(&self) -> f64;
    /// Natural length scale, used to seed the tail search.
    fn scale(&self) -> f64;
    /// `∫_x^∞ density`.
    fn tail_mass(&self, x: f64) -> f64;
}

/// Point beyond the mode where the density has dropped below
/// `fraction × peak`.
pub fn tail_cutoff<D: HalfLineDensity + ?Sized>(density: &D, fraction: f64) -> f64 {
    let mode = density.mode();
    let threshold = fraction * density.density(mode);
    let mut lo = mode;
    let mut hi = mode + density.scale();
    while density.density(hi) > threshold {
        lo = hi;
        hi = mode + 2.0 * (hi - mode);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if density.density(mid) > threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `∫₀^∞ f(x) p(x) dx` for `|f| ≤ f_bound` beyond the cutoff.
pub fn integrate_against<D, F>(
    mut f: F,
    density: &D,
    f_bound: f64,
    spec: &QuadratureSpec,
) -> Result<Integral>
where
    D: HalfLineDensity + ?Sized,
    F: FnMut(f64) -> f64,
{
    let cutoff = tail_cutoff(density, spec.tail_cutoff);
    let mode = density.mode();
    let mut body = integrate_with_breakpoints(
        |x| f(x) * density.density(x),
        0.0,
        cutoff,
        &[mode],
        spec,
    )?;
    body.abs_error += f_bound * density.tail_mass(cutoff);
    Ok(body)
}
