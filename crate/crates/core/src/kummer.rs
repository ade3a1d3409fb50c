//! Kummer's confluent hypergeometric function of the first kind,
//!
//! ```text
//! M(a, b, ξ) = Σ_{m≥0} (a)_m / (b)_m · ξ^m / m!
//! ```
//!
//! together with the pieces of its calculus used throughout this crate: the
//! Pochhammer symbol, the ξ-derivative `∂_ξ M = (a/b) M(a+1, b+1, ξ)`, the
//! exponentially scaled value `e^{-ξ} M(a, b, ξ)`, the leading large-ξ
//! behaviour, and the location of positive roots.
//!
//! Evaluation strategy: the direct power series for `ξ ≥ 0` (its terms are
//! eventually of one sign, so there is no catastrophic cancellation at
//! double precision), the Kummer transformation `M(a, b, ξ) = e^ξ M(b-a, b, -ξ)`
//! for `ξ < 0`, and exact terminating polynomials when `a` is a nonpositive
//! integer.

use serde::Serialize;
use thiserror::Error;

/// Terms below this fraction of the running-sum envelope count as converged.
const SERIES_REL_FLOOR: f64 = 1e-17;
/// Hard cap on the series length; `ξ ≤ 700` needs at most ~950 terms.
const SERIES_MAX_TERMS: usize = 1000;
/// Largest ξ the scaled evaluator accepts before `e^ξ` overflows the series.
const SCALED_XI_MAX: f64 = 700.0;
/// Slack for detecting nonpositive-integer parameters.
const NONPOS_INT_TOL: f64 = 1e-12;
/// Relative width at which root bisection stops.
const ROOT_REL_TOL: f64 = 1e-10;
/// Sign-scan resolution on the ξ axis; Kummer roots at the parameter ranges
/// we care about are separated by O(1).
const SCAN_STEP: f64 = 0.05;
/// Roots of M(a, b, ·) with |a|, b ≲ 10 all lie far below this ξ.
const SCAN_XI_CAP: f64 = 400.0;

/// Arguments of `M(a, b, ξ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KummerArgs {
    pub a: f64,
    pub b: f64,
    pub xi: f64,
}

impl KummerArgs {
    pub fn new(a: f64, b: f64, xi: f64) -> Self {
        KummerArgs { a, b, xi }
    }
}

/// Ordered positive roots of a scalar function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootList {
    /// Strictly increasing root locations.
    pub roots: Vec<f64>,
    /// Number of roots; always equals `roots.len()`.
    pub count: usize,
}

impl RootList {
    pub fn new(roots: Vec<f64>) -> Self {
        debug_assert!(roots.windows(2).all(|w| w[0] < w[1]));
        let count = roots.len();
        RootList { roots, count }
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KummerError {
    #[error("b = {b} is zero or a negative integer; M(a, b, xi) is undefined there")]
    InvalidB { b: f64 },
    #[error("series for M({a}, {b}, {xi}) missed its truncation criterion within {SERIES_MAX_TERMS} terms")]
    NoConvergence { a: f64, b: f64, xi: f64 },
    #[error(
        "found {found} of {expected} sign changes below xi_max = {xi_max} and the endpoint sign \
         disagrees with the dominant-term sign; enlarge the window"
    )]
    WindowTooSmall {
        expected: usize,
        found: usize,
        xi_max: f64,
    },
}

/// Rising factorial `(a)_m = a (a+1) ⋯ (a+m-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: f64, m: u32) -> f64 {
    let mut acc = 1.0;
    for k in 0..m {
        acc *= a + k as f64;
    }
    acc
}

/// `x` rounded to a nonpositive integer, if it is within `NONPOS_INT_TOL` of one.
fn nonpositive_integer(x: f64) -> Option<i64> {
    let r = x.round();
    if (x - r).abs() < NONPOS_INT_TOL && r <= 0.0 {
        Some(r as i64)
    } else {
        None
    }
}

fn check_b(b: f64) -> Result<(), KummerError> {
    if nonpositive_integer(b).is_some() {
        Err(KummerError::InvalidB { b })
    } else {
        Ok(())
    }
}

/// Exact terminating series for `a = -k`, a nonpositive integer.
fn terminating_polynomial(k: u32, b: f64, xi: f64) -> f64 {
    let a = -(k as f64);
    let mut sum = 1.0;
    let mut term = 1.0;
    for m in 0..k {
        let mf = m as f64;
        term *= (a + mf) * xi / ((b + mf) * (mf + 1.0));
        sum += term;
    }
    sum
}

/// Direct power series at `ξ ≥ 0`. Convergence is declared once the term
/// magnitude stays below `SERIES_REL_FLOOR` times the running-sum envelope for
/// three consecutive terms; the envelope (rather than the current sum) keeps
/// the criterion meaningful when the sum passes near a root.
fn series(a: f64, b: f64, xi: f64) -> Result<f64, KummerError> {
    let mut sum = 1.0_f64;
    let mut envelope = 1.0_f64;
    let mut term = 1.0_f64;
    let mut quiet = 0u32;
    for m in 0..SERIES_MAX_TERMS {
        let mf = m as f64;
        term *= (a + mf) * xi / ((b + mf) * (mf + 1.0));
        sum += term;
        envelope = envelope.max(sum.abs());
        if term.abs() <= SERIES_REL_FLOOR * envelope {
            quiet += 1;
            if quiet >= 3 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(KummerError::NoConvergence { a, b, xi })
}

/// `M(a, b, ξ)`.
pub fn kummer_m(args: KummerArgs) -> Result<f64, KummerError> {
    let KummerArgs { a, b, xi } = args;
    check_b(b)?;
    if let Some(neg) = nonpositive_integer(a) {
        return Ok(terminating_polynomial((-neg) as u32, b, xi));
    }
    if xi >= 0.0 {
        series(a, b, xi)
    } else {
        // Kummer transformation: M(a, b, ξ) = e^ξ M(b-a, b, -ξ), evaluated as
        // the scaled series on the positive axis to dodge both cancellation
        // and overflow.
        kummer_m_scaled(KummerArgs::new(b - a, b, -xi))
    }
}

/// `e^{-ξ} M(a, b, ξ)` for `ξ ≥ 0`; stays finite over the whole supported
/// envelope `ξ ≤ 700`.
pub fn kummer_m_scaled(args: KummerArgs) -> Result<f64, KummerError> {
    let KummerArgs { a, b, xi } = args;
    check_b(b)?;
    if let Some(neg) = nonpositive_integer(a) {
        return Ok(terminating_polynomial((-neg) as u32, b, xi) * (-xi).exp());
    }
    if xi < 0.0 {
        return Ok(kummer_m(args)? * (-xi).exp());
    }
    if xi > SCALED_XI_MAX {
        return Err(KummerError::NoConvergence { a, b, xi });
    }
    Ok(series(a, b, xi)? * (-xi).exp())
}

/// `∂_ξ M(a, b, ξ) = (a/b) M(a+1, b+1, ξ)`.
pub fn kummer_m_dxi(args: KummerArgs) -> Result<f64, KummerError> {
    let KummerArgs { a, b, xi } = args;
    check_b(b)?;
    check_b(b + 1.0)?;
    if a == 0.0 {
        return Ok(0.0);
    }
    Ok(a / b * kummer_m(KummerArgs::new(a + 1.0, b + 1.0, xi))?)
}

/// Leading large-ξ term of the scaled function `e^{-ξ} M(a, b, ξ)`:
/// `Γ(b)/Γ(a) · ξ^{a-b}` off the polynomial cases, and
/// `(a)_k/(b)_k · ξ^k · e^{-ξ}` when `-a = k ∈ ℕ`. Exposed as a cross-check
/// only; the series is the primary evaluator.
pub fn scaled_large_xi_leading(args: KummerArgs) -> Result<f64, KummerError> {
    let KummerArgs { a, b, xi } = args;
    check_b(b)?;
    if let Some(neg) = nonpositive_integer(a) {
        let k = (-neg) as u32;
        return Ok(pochhammer(a, k) / pochhammer(b, k) * xi.powi(k as i32) * (-xi).exp());
    }
    Ok(gamma(b) / gamma(a) * xi.powf(a - b))
}

/// Lanczos approximation of the gamma function (g = 7, 9 coefficients), with
/// reflection for `x < 0.5`. Nonpositive integers are poles and return
/// non-finite values.
#[allow(clippy::excessive_precision)]
pub fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut t = COEF[0];
        for (i, c) in COEF.iter().enumerate().skip(1) {
            t += c / (x + i as f64);
        }
        let w = x + G + 0.5;
        (2.0 * std::f64::consts::PI).sqrt() * w.powf(x + 0.5) * (-w).exp() * t
    }
}

/// Sign of `M(a, b, ξ)` for `ξ → ∞` when `a < 0`: the function starts at 1 and
/// crosses `⌈-a⌉` times, so it ends with sign `(-1)^{⌈-a⌉}`. For integer
/// `a = -k` this is also the sign of the dominant polynomial term.
fn dominant_sign(a: f64) -> f64 {
    if (-a).ceil() as i64 % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// All sign changes of `ξ ↦ M(a, b, ξ)` on `(0, xi_max]`, refined by bisection
/// to relative width `1e-10`. Empty for `a ≥ 0`. When `a < 0`, fewer than
/// `⌈-a⌉` roots were found and the endpoint sign still disagrees with the
/// dominant sign, the window is too small and must grow.
pub fn positive_roots(a: f64, b: f64, xi_max: f64) -> Result<RootList, KummerError> {
    assert!(xi_max > 0.0, "xi_max must be positive");
    if b <= 0.0 {
        return Err(KummerError::InvalidB { b });
    }
    if a >= 0.0 {
        return Ok(RootList::new(Vec::new()));
    }
    let expected = (-a).ceil() as usize;

    // Roots live in the oscillatory region near the origin; scanning past
    // SCAN_XI_CAP only burns series terms.
    let scan_hi = xi_max.min(SCAN_XI_CAP);
    let n_cells = ((scan_hi / SCAN_STEP).ceil() as usize).max(64);
    let f = |xi: f64| kummer_m(KummerArgs::new(a, b, xi));

    let mut roots = Vec::new();
    let mut prev_x = 0.0;
    let mut prev_v = 1.0; // M(a, b, 0) = 1
    for i in 1..=n_cells {
        let x = scan_hi * i as f64 / n_cells as f64;
        let v = f(x)?;
        if prev_v == 0.0 {
            // Grid point exactly on a root; the surrounding signs decide
            // whether it crosses.
            prev_x = x;
            prev_v = v;
            continue;
        }
        if v == 0.0 {
            let ahead = f(scan_hi * (i + 1).min(n_cells) as f64 / n_cells as f64)?;
            if prev_v * ahead < 0.0 {
                roots.push(x);
            }
        } else if prev_v * v < 0.0 {
            roots.push(bisect(&f, prev_x, prev_v, x)?);
        }
        prev_x = x;
        prev_v = v;
    }

    if roots.len() < expected {
        let end_v = f(xi_max)?;
        if end_v.signum() != dominant_sign(a) {
            return Err(KummerError::WindowTooSmall {
                expected,
                found: roots.len(),
                xi_max,
            });
        }
    }
    Ok(RootList::new(roots))
}

/// `positive_roots` with the window-doubling escalation: starts at `xi_max = 32`
/// and doubles until the root count settles.
pub fn positive_roots_auto(a: f64, b: f64) -> Result<RootList, KummerError> {
    let mut xi_max = 32.0;
    loop {
        match positive_roots(a, b, xi_max) {
            Err(KummerError::WindowTooSmall { .. }) if xi_max < 8192.0 => xi_max *= 2.0,
            other => return other,
        }
    }
}

fn bisect<F>(f: &F, mut lo: f64, mut flo: f64, mut hi: f64) -> Result<f64, KummerError>
where
    F: Fn(f64) -> Result<f64, KummerError>,
{
    for _ in 0..80 {
        if hi - lo <= ROOT_REL_TOL * hi.abs().max(lo.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid)?;
        if fmid == 0.0 {
            return Ok(mid);
        }
        if flo * fmid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    Ok(0.5 * (lo + hi))
}
