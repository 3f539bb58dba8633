//! Error functions `R` of the admissible class and their error functionals.
//!
//! Every closed-form kind is stored as `ln R` and `R⁺ = R′(z) z log z / R(z)`
//! as functions of `w = log log z`. In that variable `R⁺ = d(ln R)/dw` and
//! `dz/(z log z) = dw`, so the tail integrals become `∫ G(R) dw` and
//! nothing overflows for huge `z`.
//!
//! Membership in the class is an asymptotic property. The checks here are
//! numeric surrogates on a finite geometric grid and are reported as such.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::quad::integrate;
use crate::{Error, Result};

/// Default lower end of the membership grid.
pub const GRID_MIN: f64 = 1e3;
/// Default upper end of the membership grid.
pub const GRID_MAX: f64 = 1e12;
/// Default width of the "approaches 1" band for numeric branch detection.
pub const BRANCH_BAND: f64 = 0.05;

const TAIL_REL_TOL: f64 = 1e-6;
const MAX_PANELS: usize = 400;
const QUAD_REL_TOL: f64 = 1e-11;

/// Which of the two forms of the error functionals applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `R⁺(z)` increases monotonically to 1.
    AscendsToOne,
    Other,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::AscendsToOne => "ascends-to-one",
            Branch::Other => "other",
        })
    }
}

type WFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// An increasing `R: (1, ∞) → (1, ∞)` with its logarithmic derivative.
#[derive(Clone)]
pub struct ErrorFunction {
    label: String,
    ln_r: WFn,
    rplus: WFn,
    z0: f64,
    delta: f64,
    branch: Branch,
    /// Largest `w = log log z` at which `R` can be evaluated.
    w_max: f64,
}

impl fmt::Debug for ErrorFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ErrorFunction")
            .field("label", &self.label)
            .field("z0", &self.z0)
            .field("delta", &self.delta)
            .field("branch", &self.branch)
            .finish_non_exhaustive()
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

/// `e^e`: the point where `log log z = 1`.
const E_E: f64 = 15.154_262_241_479_262;

impl ErrorFunction {
    fn closed(
        label: String,
        z0: f64,
        delta: f64,
        branch: Branch,
        ln_r: impl Fn(f64) -> f64 + Send + Sync + 'static,
        rplus: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ErrorFunction {
            label,
            ln_r: Arc::new(ln_r),
            rplus: Arc::new(rplus),
            z0,
            delta,
            branch,
            w_max: f64::INFINITY,
        }
    }

    /// `R(z) = z^δ`, `R⁺ = δ log z`.
    pub fn power(delta: f64) -> Result<Self> {
        let d = positive("δ", delta)?;
        Ok(Self::closed(
            format!("power:{d}"),
            2.0,
            d,
            Branch::Other,
            move |w| d * w.exp(),
            move |w| d * w.exp(),
        ))
    }

    /// `R(z) = e^{c√log z}`, `R⁺ = (c/2)√log z`.
    pub fn exp_sqrt_log(c: f64) -> Result<Self> {
        let c = positive("c", c)?;
        Ok(Self::closed(
            format!("exp-sqrt-log:{c}"),
            2.0,
            1.0,
            Branch::Other,
            move |w| c * (0.5 * w).exp(),
            move |w| 0.5 * c * (0.5 * w).exp(),
        ))
    }

    /// `R(z) = (log log z)^{1+δ}`, `R⁺ = (1+δ)/log log z`.
    pub fn loglog_power(delta: f64) -> Result<Self> {
        let d = positive("δ", delta)?;
        Ok(Self::closed(
            format!("loglog-power:{d}"),
            E_E,
            d,
            Branch::Other,
            move |w| (1.0 + d) * w.ln(),
            move |w| (1.0 + d) / w,
        ))
    }

    /// `R(z) = (log z)^δ / (log log z)^η`, `R⁺ = δ − η/log log z`.
    ///
    /// With `δ = 1` and `η ≥ 0` the function `R⁺` rises to 1.
    pub fn log_power(delta: f64, eta: f64) -> Result<Self> {
        let d = positive("δ", delta)?;
        if !eta.is_finite() {
            return Err(Error::domain(format!("η must be finite, got {eta}")));
        }
        let branch = if d == 1.0 && eta >= 0.0 {
            Branch::AscendsToOne
        } else {
            Branch::Other
        };
        // R increases once δ·log z·log log z > η
        let mut z0 = E_E;
        while d * z0.ln() * z0.ln().ln() <= eta {
            z0 *= 2.0;
        }
        Ok(Self::closed(
            format!("log-power:{d},{eta}"),
            z0,
            d,
            branch,
            move |w| d * w - eta * w.ln(),
            move |w| d - eta / w,
        ))
    }

    /// `R(z) = e^{(log log z)^δ}`, `R⁺ = δ (log log z)^{δ−1}`. At `δ = 1`
    /// this is `log z`, whose `R⁺ ≡ 1` counts as rising to 1.
    pub fn exp_loglog_power(delta: f64) -> Result<Self> {
        let d = positive("δ", delta)?;
        let branch = if d == 1.0 {
            Branch::AscendsToOne
        } else {
            Branch::Other
        };
        Ok(Self::closed(
            format!("exp-loglog-power:{d}"),
            E_E,
            d,
            branch,
            move |w| w.powf(d),
            move |w| d * w.powf(d - 1.0),
        ))
    }

    /// `R(z) = e^{(log z)^δ}` for `0 < δ ≤ 1`, `R⁺ = δ (log z)^δ`. Larger
    /// `δ` would make `R′(z)z/R(z)` unbounded.
    pub fn exp_log_power(delta: f64) -> Result<Self> {
        let d = positive("δ", delta)?;
        if d > 1.0 {
            return Err(Error::domain(format!(
                "exp-log-power needs δ ≤ 1 for R′(z)z/R(z) to stay bounded, got {d}"
            )));
        }
        Ok(Self::closed(
            format!("exp-log-power:{d}"),
            2.0,
            d,
            Branch::Other,
            move |w| (d * w).exp(),
            move |w| d * (d * w).exp(),
        ))
    }

    /// A user-supplied `R(z)`. `R⁺` comes from a central difference with
    /// relative step `10⁻⁶` in `log z`, and the branch from
    /// [`classify_branch`] on the default grid.
    pub fn custom(
        label: impl Into<String>,
        z0: f64,
        delta: f64,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let d = positive("δ", delta)?;
        if !(z0.is_finite() && z0 > 1.0) {
            return Err(Error::domain(format!("z0 must exceed 1, got {z0}")));
        }
        let value = Arc::new(value);
        let v2 = value.clone();
        // beyond z ≈ 1.8·10^308 the closure cannot be evaluated; NaN makes
        // any integral that reaches that far fail loudly
        let finite = |z: f64| if z.is_finite() { z } else { f64::NAN };
        let ln_r = move |w: f64| value(finite(w.exp().exp())).ln();
        let rplus = move |w: f64| {
            let u = w.exp();
            let h = 1e-6;
            let hi = v2(finite((u * (1.0 + h)).exp())).ln();
            let lo = v2(finite((u * (1.0 - h)).exp())).ln();
            (hi - lo) / (2.0 * h)
        };
        let mut r = Self::closed(label.into(), z0, d, Branch::Other, ln_r, rplus);
        r.w_max = f64::MAX.ln().ln() - 1e-6;
        let grid = geometric_grid(GRID_MIN.max(2.0 * z0), GRID_MAX.max(4.0 * z0), 64)?;
        r.branch = classify_branch(&r, &grid, BRANCH_BAND)?.branch;
        Ok(r)
    }

    /// Parses `kind:params`, e.g. `power:0.5`, `exp-sqrt-log:1`,
    /// `log-power:1,0.5`, `loglog-power:0.5`, `exp-loglog-power:0.5`,
    /// `exp-log-power:0.5`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, params) = spec
            .split_once(':')
            .ok_or_else(|| Error::domain(format!("expected kind:params, got `{spec}`")))?;
        let nums = params
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::domain(format!("bad number `{s}` in `{spec}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let want = |n: usize| -> Result<()> {
            if nums.len() == n {
                Ok(())
            } else {
                Err(Error::domain(format!("`{kind}` takes {n} parameter(s), got {}", nums.len())))
            }
        };
        match kind.trim() {
            "power" => want(1).and_then(|_| Self::power(nums[0])),
            "exp-sqrt-log" => want(1).and_then(|_| Self::exp_sqrt_log(nums[0])),
            "loglog-power" => want(1).and_then(|_| Self::loglog_power(nums[0])),
            "log-power" => want(2).and_then(|_| Self::log_power(nums[0], nums[1])),
            "exp-loglog-power" => want(1).and_then(|_| Self::exp_loglog_power(nums[0])),
            "exp-log-power" => want(1).and_then(|_| Self::exp_log_power(nums[0])),
            other => Err(Error::domain(format!("unknown error-function kind `{other}`"))),
        }
    }

    /// `R(z)·factor`; `R⁺` and the branch are unchanged.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let k = positive("scale factor", factor)?.ln();
        let inner = self.ln_r.clone();
        let mut out = self.clone();
        out.label = format!("{factor}*{}", self.label);
        out.ln_r = Arc::new(move |w| inner(w) + k);
        Ok(out)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    /// `ln R` at `w = log log z`.
    pub fn ln_value_w(&self, w: f64) -> f64 {
        (self.ln_r)(w)
    }

    /// `R⁺` at `w = log log z`.
    pub fn rplus_w(&self, w: f64) -> f64 {
        (self.rplus)(w)
    }

    pub fn value(&self, z: f64) -> f64 {
        self.ln_value(z).exp()
    }

    pub fn ln_value(&self, z: f64) -> f64 {
        self.ln_value_w(z.ln().ln())
    }

    pub fn rplus(&self, z: f64) -> f64 {
        self.rplus_w(z.ln().ln())
    }

    /// `G(R)` in the error functionals: `(ln R)^k / R` on the
    /// ascends-to-one branch and `1/R` otherwise.
    fn weight(&self, w: f64, log_power: i32) -> f64 {
        let l = self.ln_value_w(w);
        match self.branch {
            Branch::AscendsToOne => l.powi(log_power) * (-l).exp(),
            Branch::Other => (-l).exp(),
        }
    }

    fn functional(&self, x: f64, log_power: i32) -> Result<f64> {
        if !(x.is_finite() && x > self.z0) {
            return Err(Error::domain(format!(
                "x = {x} must exceed z0 = {} for `{}`",
                self.z0, self.label
            )));
        }
        let w0 = x.ln().ln();
        let head = self.weight(w0, log_power);
        let tail = tail_integral(|w| self.weight(w, log_power), w0, self.w_max, &self.label)?;
        Ok(head + tail)
    }

    /// `ℰ(x)`: `(log R)²/R + ∫_x^∞ (log R)²/(R z log z) dz` when `R⁺ ↑ 1`,
    /// and `1/R + ∫_x^∞ dz/(R z log z)` otherwise.
    pub fn error_functional(&self, x: f64) -> Result<f64> {
        self.functional(x, 2)
    }

    /// `𝔈(x)`: as [`ErrorFunction::error_functional`] with a single factor
    /// of `log R` on the ascends-to-one branch.
    pub fn log_error_functional(&self, x: f64) -> Result<f64> {
        self.functional(x, 1)
    }

    /// `R₀ = R/log R` when `R⁺ ↑ 1`, else `R` itself. Uses
    /// `R₀′/R₀ = (1 − 1/log R)·R′/R`.
    pub fn derive_r0(&self) -> Result<Self> {
        if self.branch == Branch::Other {
            return Ok(self.clone());
        }
        let grid = geometric_grid(GRID_MIN.max(2.0 * self.z0), GRID_MAX.max(4.0 * self.z0), 32)?;
        if let Some(&z) = grid.iter().find(|&&z| self.ln_value(z) <= 1.0) {
            return Err(Error::domain(format!(
                "R({z}) ≤ e, so log R₀ = log R − log log R is not usable there"
            )));
        }
        let mut z0 = self.z0;
        while self.ln_value(z0) <= 1.0 {
            z0 *= 2.0;
        }
        let (ln_r, rplus) = (self.ln_r.clone(), self.rplus.clone());
        let ln_r2 = ln_r.clone();
        Ok(Self::closed(
            format!("R0({})", self.label),
            z0,
            self.delta,
            self.branch,
            move |w| {
                let l = ln_r(w);
                l - l.ln()
            },
            move |w| (1.0 - 1.0 / ln_r2(w)) * rplus(w),
        ))
    }
}

/// `∫_{w0}^∞ g(w) dw` over panels `[b_k, 2b_k]` (after a first panel up to
/// `max(w0, 1)`), so that a power-law tail gives panel integrals in exact
/// geometric progression. Once the panel ratio settles below 1 the
/// remainder is extrapolated geometrically; a ratio that settles near 1
/// means the integral diverges.
fn tail_integral(g: impl Fn(f64) -> f64, w0: f64, w_max: f64, label: &str) -> Result<f64> {
    let mut acc = 0.0;
    let mut lo = w0;
    let mut hi = if w0 < 1.0 { 1.0 } else { 2.0 * w0 };
    let mut prev: Option<f64> = None;
    let mut prev_ratio: Option<f64> = None;
    for _ in 0..MAX_PANELS {
        let capped = hi >= w_max;
        if capped {
            hi = w_max;
        }
        if lo >= hi {
            return Err(Error::domain(format!("x lies beyond the evaluable range of `{label}`")));
        }
        let panel = integrate(&g, lo, hi, 1e-300, QUAD_REL_TOL)?;
        if panel < 0.0 {
            return Err(Error::domain(format!("negative integrand in the tail of `{label}`")));
        }
        acc += panel;
        if panel == 0.0 || panel <= 1e-3 * TAIL_REL_TOL * acc {
            return Ok(acc);
        }
        if capped {
            // the remainder past w_max is bounded by the geometric estimate
            // only if panels were already shrinking
            return match prev {
                Some(p) if panel < p && panel <= TAIL_REL_TOL * acc => Ok(acc),
                _ => Err(Error::Divergent(format!(
                    "tail integral of `{label}` is not negligible where R stops being evaluable"
                ))),
            };
        }
        if let Some(p) = prev {
            let ratio = panel / p;
            if let Some(r0) = prev_ratio {
                let settled = (ratio - r0).abs() <= 1e-6 * ratio;
                if ratio > 0.999 && (ratio - r0).abs() <= 1e-3 * ratio {
                    return Err(Error::Membership(format!(
                        "tail integral of `{label}` does not shrink (panel ratio {ratio:.4}); \
                         R likely fails R ≫ (log log z)^(1+δ)"
                    )));
                }
                if settled || panel <= TAIL_REL_TOL * acc {
                    return Ok(acc + panel * ratio / (1.0 - ratio));
                }
            }
            prev_ratio = Some(ratio);
        }
        prev = Some(panel);
        lo = hi;
        hi *= 2.0;
    }
    Err(Error::Divergent(format!(
        "tail integral of `{label}` did not converge within {MAX_PANELS} panels"
    )))
}

/// `n` points from `lo` to `hi` in geometric progression.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || n < 2 {
        return Err(Error::domain(format!("bad grid [{lo}, {hi}] with {n} points")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect())
}

fn check_grid(r: &ErrorFunction, grid: &[f64], min_len: usize) -> Result<()> {
    if grid.len() < min_len {
        return Err(Error::domain(format!("grid needs at least {min_len} points, got {}", grid.len())));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("grid must be strictly increasing"));
    }
    if grid[0] <= r.z0 {
        return Err(Error::domain(format!("grid starts at {} ≤ z0 = {}", grid[0], r.z0)));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Trend {
    Constant,
    Increasing,
    Decreasing,
    Mixed,
}

fn trend(v: &[f64]) -> Trend {
    let tol = |a: f64, b: f64| 1e-9 * a.abs().max(b.abs()).max(1e-300);
    let up = v.windows(2).all(|w| w[1] >= w[0] - tol(w[0], w[1]));
    let down = v.windows(2).all(|w| w[1] <= w[0] + tol(w[0], w[1]));
    match (up, down) {
        (true, true) => Trend::Constant,
        (true, false) => Trend::Increasing,
        (false, true) => Trend::Decreasing,
        (false, false) => Trend::Mixed,
    }
}

/// Outcome of [`classify_branch`].
#[derive(Debug, Clone, Serialize)]
pub struct BranchEvidence {
    pub branch: Branch,
    /// `R⁺` at each grid point.
    pub rplus: Vec<f64>,
    /// The classification is a finite-grid surrogate for a limit statement.
    pub heuristic: bool,
}

/// Ascends-to-one iff `R⁺` is non-decreasing on the grid and its final
/// value lies in `[1 − band, 1]`. Non-monotone samples violate condition (a).
pub fn classify_branch(r: &ErrorFunction, grid: &[f64], band: f64) -> Result<BranchEvidence> {
    check_grid(r, grid, 16)?;
    let rplus: Vec<f64> = grid.iter().map(|&z| r.rplus(z)).collect();
    if rplus.iter().any(|v| !v.is_finite()) {
        return Err(Error::Membership(format!("R⁺ of `{}` is not finite on the grid", r.label)));
    }
    let t = trend(&rplus);
    if t == Trend::Mixed {
        return Err(Error::Membership(format!("R⁺ of `{}` is not monotonic on the grid", r.label)));
    }
    let last = *rplus.last().expect("non-empty grid");
    let rising = matches!(t, Trend::Constant | Trend::Increasing);
    let branch = if rising && last >= 1.0 - band && last <= 1.0 + 1e-9 {
        Branch::AscendsToOne
    } else {
        Branch::Other
    };
    Ok(BranchEvidence {
        branch,
        rplus,
        heuristic: true,
    })
}

/// Grid evidence for conditions (a) and (b).
#[derive(Debug, Clone, Serialize)]
pub struct MembershipReport {
    pub label: String,
    /// `R(z_{i+1}) > R(z_i)` for all grid points.
    pub increasing: bool,
    /// `R⁺` monotonic on the grid.
    pub rplus_monotone: bool,
    /// `R′(z)z/R(z) = R⁺/log z` does not grow along the grid.
    pub growth_bounded: bool,
    /// `R ≫ (log log z)^{1+δ_R}` at the top of the grid.
    pub lower_bound: bool,
    /// `δ_R` used for the lower-bound test.
    pub delta_r: f64,
    pub max_rplus_over_log: f64,
}

impl MembershipReport {
    pub fn is_member(&self) -> bool {
        self.increasing && self.rplus_monotone && self.growth_bounded && self.lower_bound
    }
}

/// Evaluates the surrogates for conditions (a) and (b) on `grid`.
///
/// Condition (b) passes when either `w·R⁺(z_max) ≥ 1 + δ_R` (the local
/// growth exponent of `R` against `w = log log z`) or
/// `R(z_max) ≥ w^{1+δ_R}` directly.
pub fn membership_report(r: &ErrorFunction, grid: &[f64]) -> Result<MembershipReport> {
    check_grid(r, grid, 4)?;
    let ln_r: Vec<f64> = grid.iter().map(|&z| r.ln_value(z)).collect();
    let rplus: Vec<f64> = grid.iter().map(|&z| r.rplus(z)).collect();
    let ratio: Vec<f64> = grid.iter().zip(&rplus).map(|(&z, &rp)| rp / z.ln()).collect();
    let increasing = ln_r.windows(2).all(|w| w[1] > w[0]) && ln_r[0] > 0.0;
    let rplus_monotone = trend(&rplus) != Trend::Mixed && rplus.iter().all(|v| v.is_finite() && *v > 0.0);
    let growth_bounded = matches!(trend(&ratio), Trend::Constant | Trend::Decreasing);
    let delta_r = if r.label.starts_with("loglog-power") { r.delta } else { 0.1 };
    let zmax = *grid.last().expect("non-empty");
    let w = zmax.ln().ln();
    let lower_bound = w * rplus.last().expect("non-empty") >= 1.0 + delta_r
        || *ln_r.last().expect("non-empty") >= (1.0 + delta_r) * w.ln();
    Ok(MembershipReport {
        label: r.label.clone(),
        increasing,
        rplus_monotone,
        growth_bounded,
        lower_bound,
        delta_r,
        max_rplus_over_log: ratio.iter().copied().fold(0.0, f64::max),
    })
}

/// Like [`membership_report`], but an unmet condition is an error.
pub fn check_membership(r: &ErrorFunction, grid: &[f64]) -> Result<MembershipReport> {
    let rep = membership_report(r, grid)?;
    if rep.is_member() {
        return Ok(rep);
    }
    let mut failed = Vec::new();
    if !rep.increasing {
        failed.push("R increasing");
    }
    if !rep.rplus_monotone {
        failed.push("R⁺ monotone");
    }
    if !rep.growth_bounded {
        failed.push("R′z/R bounded");
    }
    if !rep.lower_bound {
        failed.push("R ≫ (log log z)^(1+δ)");
    }
    Err(Error::Membership(format!("`{}` fails: {}", r.label, failed.join(", "))))
}

/// One grid point of [`verify_lemma25`]: left and right sides of the four
/// estimates and the running constants `C_k(z) = max_{t≤z} LHS/RHS`.
#[derive(Debug, Clone, Serialize)]
pub struct Lemma25Row {
    pub z: f64,
    pub lhs: [f64; 4],
    pub rhs: [f64; 4],
    pub constant: [f64; 4],
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma25Report {
    pub label: String,
    pub branch: Branch,
    pub rows: Vec<Lemma25Row>,
}

impl Lemma25Report {
    /// `C_k(z_max)/C_k(z_min)` for each estimate; bounded constants give
    /// small drift.
    pub fn drift(&self) -> [f64; 4] {
        let first = &self.rows[0].constant;
        let last = &self.rows[self.rows.len() - 1].constant;
        std::array::from_fn(|k| last[k] / first[k])
    }

    pub fn max_constant(&self) -> [f64; 4] {
        self.rows[self.rows.len() - 1].constant
    }
}

/// Evaluates the four growth estimates
///
/// 1. `z/R(z) ≤ C(1 + ∫_1^z dt/R(t))`
/// 2. `log t/R(t) ≤ C(1 + log z/R(z))` for `t ≤ z`
/// 3. `∫_2^z dt/(tR(t)) ≤ C(log log z + log z · L(z)/R(z))`
/// 4. `∫_2^z R′(t) log t/R(t)² dt ≤ C(log log z + log z · L(z)/R(z))`
///
/// where `L = log R` on the ascends-to-one branch and `1` otherwise. Lower
/// limits are raised to `z0` where `R` is not defined below it; the sup in
/// (2) runs over the grid points `t ≤ z`.
pub fn verify_lemma25(r: &ErrorFunction, zs: &[f64]) -> Result<Lemma25Report> {
    check_grid(r, zs, 2)?;
    let a1 = r.z0.max(1.0).ln();
    let a3 = r.z0.max(2.0).ln();
    // in u = log t: dt = e^u du, R′(t) log t/R(t)² dt = R⁺/R du
    let r_u = |u: f64| r.ln_value_w(u.ln());
    let mut i1 = 0.0;
    let mut i3 = 0.0;
    let mut i4 = 0.0;
    let (mut u1, mut u3) = (a1, a3);
    let mut sup_h: f64 = 0.0;
    let mut best = [0.0f64; 4];
    let mut rows = Vec::with_capacity(zs.len());
    for &z in zs {
        let u = z.ln();
        i1 += integrate(|s| (s - r_u(s)).exp(), u1, u, 0.0, QUAD_REL_TOL)?;
        i3 += integrate(|s| (-r_u(s)).exp(), u3, u, 0.0, QUAD_REL_TOL)?;
        i4 += integrate(|s| r.rplus_w(s.ln()) * (-r_u(s)).exp(), u3, u, 0.0, QUAD_REL_TOL)?;
        u1 = u;
        u3 = u;
        let ln_r = r_u(u);
        let h = (u.ln() - ln_r).exp();
        sup_h = sup_h.max(h);
        let l = match r.branch {
            Branch::AscendsToOne => ln_r,
            Branch::Other => 1.0,
        };
        let tail = u.ln() + h * l;
        let lhs = [(u - ln_r).exp(), sup_h, i3, i4];
        let rhs = [1.0 + i1, 1.0 + h, tail, tail];
        let mut constant = [0.0; 4];
        for k in 0..4 {
            best[k] = best[k].max(lhs[k] / rhs[k]);
            constant[k] = best[k];
        }
        rows.push(Lemma25Row { z, lhs, rhs, constant });
    }
    Ok(Lemma25Report {
        label: r.label.clone(),
        branch: r.branch,
        rows,
    })
}
