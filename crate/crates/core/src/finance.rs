//! Annualisation and cost reference-side conversion.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnuityInput {
    /// Lump-sum investment, €/MW.
    pub total_investment: f64,
    /// Interest rate per period as a fraction.
    pub interest_rate: f64,
    /// Lifetime in periods.
    pub lifetime: u32,
}

/// Capital recovery factor `i(1+i)^n / ((1+i)^n − 1)`.
///
/// Returns `1 + i` exactly for `n = 1` and the limit `1/n` for `i = 0`.
pub fn capital_recovery_factor(i: f64, n: u32) -> f64 {
    assert!(n >= 1, "lifetime must be at least one period");
    assert!(i >= 0.0, "interest rate must be non-negative");
    if n == 1 {
        return 1.0 + i;
    }
    if i == 0.0 {
        return 1.0 / n as f64;
    }
    // i / (1 − (1+i)^−n), with the denominator taken through expm1/ln1p so
    // small rates keep their precision.
    let denom = -(-(n as f64) * i.ln_1p()).exp_m1();
    i / denom
}

/// Per-period payment for a lump-sum investment.
pub fn annualize(inp: &AnnuityInput) -> f64 {
    inp.total_investment * capital_recovery_factor(inp.interest_rate, inp.lifetime)
}

/// Converts an input-side cost to the output side and adds an output-side cost.
pub fn output_side_cost(input_side: f64, efficiency: f64, output_extra: f64) -> f64 {
    assert!(efficiency > 0.0, "efficiency must be positive");
    input_side / efficiency + output_extra
}

/// Scales an annual cost to a horizon of `hours`.
pub fn horizon_share(annual: f64, hours: f64) -> f64 {
    annual * hours / crate::model::HOURS_PER_YEAR
}
