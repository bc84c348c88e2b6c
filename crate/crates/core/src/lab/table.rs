//! Convergence tables, rate fitting and verdict checks.

use serde::Serialize;

use crate::numerics::log_log_slope;

/// Errors below this are treated as rounding noise.
pub const NOISE_FLOOR: f64 = 1e-13;

/// One `ε` of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub eps: f64,
    pub measured: f64,
    pub reference: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    /// Set when the numerical evaluation failed for this `ε`.
    pub failure: Option<String>,
}

/// Least-squares convergence rate of a table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RateFit {
    Rate(f64),
    /// Every error, or all but one, is below the noise floor.
    Saturated,
    /// Fewer than three rows.
    Insufficient,
}

impl RateFit {
    pub fn value(&self) -> Option<f64> {
        match self {
            RateFit::Rate(r) => Some(*r),
            _ => None,
        }
    }
}

/// One named pass/fail condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

/// Rows of `(ε, measured, reference, abs_err, rel_err)` for one quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub quantity: String,
    pub rows: Vec<TableRow>,
    /// Relative errors are taken against `max(|reference|, reference_scale)`.
    pub reference_scale: f64,
    pub checks: Vec<Check>,
}

impl ConvergenceTable {
    pub fn new(quantity: impl Into<String>, reference_scale: f64) -> Self {
        ConvergenceTable { quantity: quantity.into(), rows: Vec::new(), reference_scale, checks: Vec::new() }
    }

    pub fn push(&mut self, eps: f64, measured: f64, reference: f64) {
        let abs_err = (measured - reference).abs();
        let denom = reference.abs().max(self.reference_scale);
        let rel_err = if denom > 0.0 { abs_err / denom } else if abs_err == 0.0 { 0.0 } else { f64::INFINITY };
        self.rows.push(TableRow { eps, measured, reference, abs_err, rel_err, failure: None });
        self.sort();
    }

    pub fn push_failure(&mut self, eps: f64, message: String) {
        self.rows.push(TableRow {
            eps,
            measured: f64::NAN,
            reference: f64::NAN,
            abs_err: f64::NAN,
            rel_err: f64::NAN,
            failure: Some(message),
        });
        self.sort();
    }

    fn sort(&mut self) {
        self.rows.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    }

    pub fn rate(&self) -> RateFit {
        fit_rate(self)
    }

    pub fn last(&self) -> Option<&TableRow> {
        self.rows.last()
    }

    pub fn has_failures(&self) -> bool {
        self.rows.iter().any(|r| r.failure.is_some())
    }

    pub fn passed(&self) -> bool {
        !self.has_failures() && self.checks.iter().all(|c| c.passed)
    }

    /// The error at the smallest `ε` is within `tol` relative, or below `abs`.
    pub fn check_final(&mut self, tol: f64, abs: f64) {
        let check = match self.last() {
            Some(r) if r.failure.is_none() => Check::new(
                "final_error",
                r.rel_err < tol || r.abs_err <= abs,
                format!("rel_err {:.3e} at eps {} (tolerance {tol:e}, absolute {abs:e})", r.rel_err, r.eps),
            ),
            _ => Check::new("final_error", false, "no valid rows"),
        };
        self.checks.push(check);
    }

    /// Every absolute error is at most `abs`.
    pub fn check_all_below(&mut self, abs: f64) {
        let worst = self.rows.iter().map(|r| r.abs_err).fold(0.0, f64::max);
        let ok = !self.rows.is_empty() && self.rows.iter().all(|r| r.abs_err <= abs);
        self.checks.push(Check::new("all_below", ok, format!("max abs_err {worst:.3e} (bound {abs:e})")));
    }

    /// The fitted rate is at least `min`, or the errors are saturated.
    pub fn check_rate(&mut self, min: f64) {
        let check = match self.rate() {
            RateFit::Rate(r) => Check::new("rate", r >= min, format!("fitted rate {r:.3} (minimum {min})")),
            RateFit::Saturated => Check::new("rate", true, "errors at rounding level"),
            RateFit::Insufficient => Check::new("rate", true, "fewer than three rows; rate not assessed"),
        };
        self.checks.push(check);
    }

    /// Each error is no larger than the previous one, unless it is already
    /// at the noise floor.
    pub fn check_monotone(&mut self) {
        let floor = self.noise_floor();
        let ok = self.rows.windows(2).all(|w| w[1].abs_err <= w[0].abs_err || w[1].abs_err < floor);
        let errs: Vec<String> = self.rows.iter().map(|r| format!("{:.2e}", r.abs_err)).collect();
        self.checks.push(Check::new("monotone", ok, format!("errors [{}]", errs.join(", "))));
    }

    /// Rounding floor for this table's magnitudes.
    pub fn noise_floor(&self) -> f64 {
        let scale = self.rows.iter().map(|r| r.reference.abs()).fold(self.reference_scale, f64::max);
        NOISE_FLOOR * scale.max(1.0)
    }
}

/// Least-squares slope of `log abs_err` against `log ε`; rows below the
/// noise floor are excluded.
pub fn fit_rate(table: &ConvergenceTable) -> RateFit {
    let valid: Vec<&TableRow> = table.rows.iter().filter(|r| r.failure.is_none()).collect();
    if valid.len() < 3 {
        return RateFit::Insufficient;
    }
    let floor = table.noise_floor();
    let points: Vec<(f64, f64)> = valid.iter().filter(|r| r.abs_err >= floor).map(|r| (r.eps, r.abs_err)).collect();
    if points.len() < 2 {
        return RateFit::Saturated;
    }
    match log_log_slope(&points) {
        Some(r) => RateFit::Rate(r),
        None => RateFit::Saturated,
    }
}
