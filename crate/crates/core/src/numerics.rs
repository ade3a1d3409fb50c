//! Shared numerical kernels: adaptive Simpson quadrature, sign-change
//! bracketing with bisection, and an embedded Dormand–Prince 5(4) stepper
//! with cubic-Hermite dense sampling.

use thiserror::Error;

use crate::kummer::RootList;

/// Relative width at which root bisection stops.
const ROOT_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_depth: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSpec {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub error_tol: f64,
    pub blowup_threshold: f64,
}

impl Default for OdeSpec {
    fn default() -> Self {
        OdeSpec {
            initial_step: 1e-3,
            min_step: 1e-12,
            max_step: 0.1,
            error_tol: 1e-10,
            blowup_threshold: 1e8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("adaptive quadrature exhausted its recursion budget (singular or oscillatory integrand?)")]
    DepthExceeded,
    #[error("ODE step size underflowed below min_step near r = {r} (stiffness or singularity?)")]
    StepUnderflow { r: f64 },
}

/// Adaptive-Simpson estimate of `∫_a^b f`, accurate to
/// `max(abs_tol, rel_tol · |integral|)` under the Richardson error estimate.
pub fn integrate<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    integrate_with_estimate(f, a, b, spec).map(|(value, _)| value)
}

/// Like [`integrate`] but also returns the accumulated error estimate.
pub fn integrate_with_estimate<F>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64), NumericsError>
where
    F: Fn(f64) -> f64,
{
    assert!(a <= b, "integration bounds must be ordered");
    assert!(spec.max_depth >= 1 && spec.abs_tol > 0.0 && spec.rel_tol > 0.0);
    if a == b {
        return Ok((0.0, 0.0));
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    let tol = spec.abs_tol.max(spec.rel_tol * whole.abs());
    let mut err = 0.0;
    let value = adapt(&f, a, fa, m, fm, b, fb, whole, tol, spec.max_depth, &mut err)?;
    Ok((value, err))
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F>(
    f: &F,
    a: f64,
    fa: f64,
    m: f64,
    fm: f64,
    b: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    err: &mut f64,
) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (b - a) < 1e-14 * (a.abs() + b.abs()) {
        if !delta.is_finite() {
            return Err(NumericsError::DepthExceeded);
        }
        *err += delta.abs() / 15.0;
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(NumericsError::DepthExceeded);
    }
    let l = adapt(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1, err)?;
    let r = adapt(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1, err)?;
    Ok(l + r)
}

/// Every sign change of `f` on a uniform grid over `[a, b]`, refined to
/// relative width `1e-10`. Points where `f` touches zero without crossing are
/// not reported.
pub fn bracket_and_bisect<F>(f: F, a: f64, b: f64, grid_points: usize) -> RootList
where
    F: Fn(f64) -> f64,
{
    assert!(grid_points >= 2, "need at least two grid points");
    let xs: Vec<f64> = (0..grid_points)
        .map(|i| a + (b - a) * i as f64 / (grid_points - 1) as f64)
        .collect();
    let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();

    let mut roots = Vec::new();
    for i in 1..grid_points {
        let (x0, v0) = (xs[i - 1], vs[i - 1]);
        let (x1, v1) = (xs[i], vs[i]);
        if v0 == 0.0 {
            // handled as a node zero below (or at i == 1, only if it crosses)
            if i == 1 && v1 != 0.0 {
                continue;
            }
        }
        if v1 == 0.0 {
            // sign on either side of the node decides crossing vs touching
            let before = vs[..i].iter().rev().find(|v| **v != 0.0);
            let after = vs[i + 1..].iter().find(|v| **v != 0.0);
            if let (Some(&bv), Some(&av)) = (before, after) {
                if bv * av < 0.0 {
                    roots.push(x1);
                }
            }
            continue;
        }
        if v0 != 0.0 && v0 * v1 < 0.0 {
            roots.push(bisect_plain(&f, x0, v0, x1));
        }
    }
    roots.dedup_by(|a, b| (*a - *b).abs() <= ROOT_REL_TOL * a.abs().max(1e-30));
    RootList::new(roots)
}

fn bisect_plain<F>(f: &F, mut lo: f64, mut flo: f64, mut hi: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    for _ in 0..80 {
        if hi - lo <= ROOT_REL_TOL * hi.abs().max(lo.abs()).max(1e-30) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if fmid == 0.0 {
            return mid;
        }
        if flo * fmid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    0.5 * (lo + hi)
}

/// How an ODE trajectory ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeOutcome {
    /// Reached `r_end`.
    Completed,
    /// A state component exceeded the blow-up threshold at radius `r`.
    BlowUp { r: f64 },
}

/// Accepted steps of an adaptive integration, with the right-hand side stored
/// at each node so segments interpolate to fourth order.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub r: Vec<f64>,
    pub states: Vec<[f64; N]>,
    pub derivs: Vec<[f64; N]>,
    pub outcome: OdeOutcome,
}

impl<const N: usize> Trajectory<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        (*self.r.last().unwrap(), *self.states.last().unwrap())
    }

    /// Cubic-Hermite sample at `r`, which must lie inside the stored range.
    pub fn sample(&self, r: f64) -> [f64; N] {
        let (i, j) = self.segment(r);
        if i == j {
            return self.states[i];
        }
        hermite(
            self.r[i],
            &self.states[i],
            &self.derivs[i],
            self.r[j],
            &self.states[j],
            &self.derivs[j],
            r,
        )
    }

    fn segment(&self, r: f64) -> (usize, usize) {
        let n = self.r.len();
        assert!(
            r >= self.r[0] - 1e-12 && r <= self.r[n - 1] + 1e-12,
            "sample point {r} outside trajectory range [{}, {}]",
            self.r[0],
            self.r[n - 1]
        );
        match self.r.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(i) => (i, i),
            Err(0) => (0, 0),
            Err(i) if i == n => (n - 1, n - 1),
            Err(i) => (i - 1, i),
        }
    }
}

fn hermite<const N: usize>(
    r0: f64,
    y0: &[f64; N],
    d0: &[f64; N],
    r1: f64,
    y1: &[f64; N],
    d1: &[f64; N],
    r: f64,
) -> [f64; N] {
    let h = r1 - r0;
    let t = (r - r0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let mut out = [0.0; N];
    for k in 0..N {
        out[k] = h00 * y0[k] + h10 * h * d0[k] + h01 * y1[k] + h11 * h * d1[k];
    }
    out
}

// Dormand–Prince 5(4) tableau.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Embedded Runge–Kutta 5(4) integration of `y' = rhs(r, y)` from `r0` to
/// `r_end`, with per-step error control at `spec.error_tol`. Terminates early
/// with [`OdeOutcome::BlowUp`] once any state component exceeds
/// `spec.blowup_threshold` in magnitude.
pub fn rk_adaptive<const N: usize, F>(
    rhs: F,
    r0: f64,
    state0: [f64; N],
    r_end: f64,
    spec: &OdeSpec,
) -> Result<Trajectory<N>, NumericsError>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    assert!(r_end > r0);
    assert!(spec.min_step <= spec.initial_step && spec.initial_step <= spec.max_step);

    let mut r = r0;
    let mut y = state0;
    let mut k1 = rhs(r, &y);
    let mut h = spec.initial_step;

    let mut traj = Trajectory {
        r: vec![r],
        states: vec![y],
        derivs: vec![k1],
        outcome: OdeOutcome::Completed,
    };

    let mut ks = [[0.0; N]; 7];
    while r < r_end {
        h = h.min(r_end - r).min(spec.max_step);
        ks[0] = k1;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in ks.iter().enumerate().take(s) {
                let a = DP_A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            ks[s] = rhs(r + DP_C[s] * h, &ys);
        }
        // stage 7 is evaluated at the 5th-order solution (FSAL)
        let mut y_new = y;
        for (j, kj) in ks.iter().enumerate().take(6) {
            let a = DP_A[6][j];
            if a != 0.0 {
                for i in 0..N {
                    y_new[i] += h * a * kj[i];
                }
            }
        }
        ks[6] = rhs(r + h, &y_new);

        let mut err_norm = 0.0_f64;
        for i in 0..N {
            let mut e = 0.0;
            for (j, kj) in ks.iter().enumerate() {
                e += DP_E[j] * kj[i];
            }
            e *= h;
            let scale = spec.error_tol * (1.0 + y[i].abs().max(y_new[i].abs()));
            err_norm = err_norm.max((e / scale).abs());
        }

        if err_norm <= 1.0 || h <= spec.min_step {
            if !y_new.iter().all(|v| v.is_finite()) {
                // Overshot into non-finite territory; report blow-up at the
                // last good node rather than propagating NaNs.
                traj.outcome = OdeOutcome::BlowUp { r };
                return Ok(traj);
            }
            r += h;
            y = y_new;
            k1 = ks[6];
            traj.r.push(r);
            traj.states.push(y);
            traj.derivs.push(k1);
            if y.iter().any(|v| v.abs() > spec.blowup_threshold) {
                traj.outcome = OdeOutcome::BlowUp { r };
                return Ok(traj);
            }
        }

        let factor = if err_norm > 0.0 {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
        if h < spec.min_step {
            if err_norm > 1.0 {
                return Err(NumericsError::StepUnderflow { r });
            }
            h = spec.min_step;
        }
    }
    Ok(traj)
}
