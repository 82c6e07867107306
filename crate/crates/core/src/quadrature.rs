//! Adaptive Gauss–Kronrod quadrature and the largest-gap kernel.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::{OnceLock, RwLock};

use crate::error::{domain, Error, Result};

/// Tolerances for [`integrate_1d`] and [`integrate_2d`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSettings {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0) {
            return Err(domain("abs_tol", abs_tol, "must be positive"));
        }
        if !(rel_tol > 0.0) {
            return Err(domain("rel_tol", rel_tol, "must be positive"));
        }
        if max_subdivisions == 0 {
            return Err(domain("max_subdivisions", 0.0, "must be at least 1"));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }

    fn scaled(self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            ..self
        }
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_600_525_329,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

fn finite(v: f64, x: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numerical(format!("integrand returned {v} at {x}")))
    }
}

/// One 21-point Kronrod rule with the QUADPACK error heuristic.
fn gk21<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let centr = 0.5 * (a + b);
    let hlgth = 0.5 * (b - a);
    let fc = finite(f(centr)?, centr)?;
    let mut resg = 0.0;
    let mut resk = WGK[10] * fc;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = hlgth * XGK[j];
        let f1 = finite(f(centr - dx)?, centr - dx)?;
        let f2 = finite(f(centr + dx)?, centr + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let result = resk * hlgth;
    let resabs = resabs * hlgth.abs();
    let resasc = resasc * hlgth.abs();
    let mut err = ((resk - resg) * hlgth).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Ok((result, err))
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive bisection driven by a fallible integrand.
pub(crate) fn try_integrate<F>(
    mut f: F,
    a: f64,
    b: f64,
    settings: &QuadratureSettings,
) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a <= b) {
        return Err(Error::InvalidParameter(format!(
            "integration bounds out of order: [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok((0.0, 0.0));
    }
    let (v0, e0) = gk21(&mut f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value: v0,
        err: e0,
    });
    let (mut value, mut err) = (v0, e0);
    let mut subdivisions = 1;
    loop {
        let tol = settings.abs_tol.max(settings.rel_tol * value.abs());
        if err <= tol {
            return Ok((value, err));
        }
        if subdivisions >= settings.max_subdivisions {
            return Err(Error::Integration {
                value,
                err_est: err,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap holds every panel");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // Panel cannot be split further in floating point.
            return Err(Error::Integration {
                value,
                err_est: err,
                subdivisions,
            });
        }
        let (v1, e1) = gk21(&mut f, worst.a, mid)?;
        let (v2, e2) = gk21(&mut f, mid, worst.b)?;
        value += v1 + v2 - worst.value;
        err += e1 + e2 - worst.err;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
        subdivisions += 1;
        if subdivisions % 64 == 0 {
            // Re-sum to keep the running totals from drifting.
            value = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.err).sum();
        }
    }
}

/// `∫_a^b f`, returning `(value, error estimate)`.
///
/// Integrable endpoint singularities such as `log(1 - x)` at `x = 1` are
/// fine: the rule never samples the endpoints and bisection concentrates
/// panels there.
pub fn integrate_1d<F>(f: F, a: f64, b: f64, settings: &QuadratureSettings) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    try_integrate(|x| Ok(f(x)), a, b, settings)
}

/// Iterated integral over the unit square, `∫_0^1 ∫_0^1 f(x, y) dy dx`.
///
/// Inner integrals run at a tenth of the outer tolerance; the reported error
/// adds the outer estimate to the largest inner one.
pub fn integrate_2d<F>(f: F, settings: &QuadratureSettings) -> Result<(f64, f64)>
where
    F: Fn(f64, f64) -> f64,
{
    try_integrate_2d(|x, y| Ok(f(x, y)), settings)
}

pub(crate) fn try_integrate_2d<F>(f: F, settings: &QuadratureSettings) -> Result<(f64, f64)>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let inner_settings = settings.scaled(0.1);
    let mut inner_err: f64 = 0.0;
    let (value, outer_err) = try_integrate(
        |x| {
            let (v, e) = try_integrate(|y| f(x, y), 0.0, 1.0, &inner_settings)?;
            inner_err = inner_err.max(e);
            Ok(v)
        },
        0.0,
        1.0,
        settings,
    )?;
    Ok((value, outer_err + inner_err))
}

const KERNEL_T_MAX: f64 = 60.0;

/// `g(x) = ∫_x^1 log²(1 - y) / y² dy` for `x` in `(0, 1]`.
///
/// Evaluated after substituting `y = 1 - e^{-t}`, which turns the
/// logarithmic endpoint into the smooth, exponentially decaying integrand
/// `t² e^{-t} / (1 - e^{-t})²` on `[-ln(1 - x), ∞)`.
pub fn gap_kernel(x: f64, settings: &QuadratureSettings) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(domain("x", x, "gap kernel is defined on (0, 1]"));
    }
    if x == 1.0 {
        return Ok(0.0);
    }
    let t0 = -(-x).ln_1p();
    let integrand = |t: f64| {
        let d = (-t).exp_m1();
        t * t * (-t).exp() / (d * d)
    };
    let (body, _) = integrate_1d(integrand, t0, KERNEL_T_MAX.max(t0), settings)?;
    let tail = (-KERNEL_T_MAX).exp() * (KERNEL_T_MAX * KERNEL_T_MAX + 2.0 * KERNEL_T_MAX + 2.0);
    Ok(body + tail)
}

const KERNEL_CACHE_CAP: usize = 1 << 18;

type KernelKey = (u64, u64, u64);

fn kernel_cache() -> &'static RwLock<HashMap<KernelKey, f64>> {
    static CACHE: OnceLock<RwLock<HashMap<KernelKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// [`gap_kernel`] memoized on the exact abscissa.
///
/// Outer integrals over the kernel revisit the same Kronrod nodes for every
/// aisle distance, so exact-key memoization removes most inner quadratures.
pub(crate) fn gap_kernel_cached(x: f64, settings: &QuadratureSettings) -> Result<f64> {
    let key = (
        x.to_bits(),
        settings.abs_tol.to_bits(),
        settings.rel_tol.to_bits(),
    );
    if let Some(v) = kernel_cache()
        .read()
        .expect("kernel cache poisoned")
        .get(&key)
    {
        return Ok(*v);
    }
    let v = gap_kernel(x, settings)?;
    let mut cache = kernel_cache().write().expect("kernel cache poisoned");
    if cache.len() < KERNEL_CACHE_CAP {
        cache.insert(key, v);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let s = QuadratureSettings::default();
        let (v, e) = integrate_1d(|x| x * x, 0.0, 1.0, &s).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
        assert!(e < 1e-12);
    }

    #[test]
    fn log_endpoint_singularities() {
        let s = QuadratureSettings::default();
        let (v, _) = integrate_1d(|x| (-x).ln_1p().powi(2), 0.0, 1.0, &s).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "{v}");
        let (v, _) = integrate_1d(|x| -(-x).ln_1p() * x, 0.0, 1.0, &s).unwrap();
        assert!((v - 0.75).abs() < 1e-9, "{v}");
    }

    #[test]
    fn two_dimensional() {
        let s = QuadratureSettings::default();
        assert!((integrate_2d(|_, _| 1.0, &s).unwrap().0 - 1.0).abs() < 1e-12);
        assert!((integrate_2d(|x, y| x * y, &s).unwrap().0 - 0.25).abs() < 1e-12);
        let (v, _) = integrate_2d(|x, y| (-x).ln_1p() * (-y).ln_1p(), &s).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn non_convergence_is_reported() {
        let s = QuadratureSettings::new(1e-14, 1e-14, 3).unwrap();
        let r = integrate_1d(|x| (1.0 / x.sqrt()).sin(), 0.0, 1.0, &s);
        assert!(matches!(r, Err(Error::Integration { subdivisions: 3, .. })));
    }

    #[test]
    fn kernel_endpoints_and_domain() {
        let s = QuadratureSettings::default();
        assert_eq!(gap_kernel(1.0, &s).unwrap(), 0.0);
        assert!(gap_kernel(0.0, &s).is_err());
        assert!(gap_kernel(-0.5, &s).is_err());
        assert!(gap_kernel(1.5, &s).is_err());
        let g = gap_kernel(1e-12, &s).unwrap();
        let pi2_3 = std::f64::consts::PI.powi(2) / 3.0;
        assert!((g - pi2_3).abs() < 1e-9, "{g}");
    }

    #[test]
    fn cached_kernel_agrees() {
        let s = QuadratureSettings::default();
        for x in [0.1, 0.37, 0.9] {
            assert_eq!(gap_kernel(x, &s).unwrap(), gap_kernel_cached(x, &s).unwrap());
            assert_eq!(gap_kernel(x, &s).unwrap(), gap_kernel_cached(x, &s).unwrap());
        }
    }
}
