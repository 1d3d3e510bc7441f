//! Hölder-constant arithmetic.
//!
//! Each rule takes the constants (and, where needed, sup/inf magnitudes) of
//! the operands and returns a constant valid for the combined function. All
//! operands are assumed to share one exponent `p`; only composition changes
//! it (to `p²`).

use super::HolderSpec;
use crate::error::{Error, Result};

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{name} must be finite and nonnegative, got {v}"
        )))
    }
}

/// `f + g`: `L(f) + L(g)`.
pub fn derive_sum(l_f: f64, l_g: f64) -> Result<f64> {
    check_nonneg("L(f)", l_f)?;
    check_nonneg("L(g)", l_g)?;
    Ok(l_f + l_g)
}

/// `r f`: `|r| L(f)`.
pub fn derive_scale(r: f64, l_f: f64) -> Result<f64> {
    check_nonneg("L(f)", l_f)?;
    if !r.is_finite() {
        return Err(Error::invalid(format!("scale factor must be finite, got {r}")));
    }
    Ok(r.abs() * l_f)
}

/// `|f|` keeps the constant of `f`.
pub fn derive_abs(l_f: f64) -> Result<f64> {
    check_nonneg("L(f)", l_f)?;
    Ok(l_f)
}

/// Pointwise sup or inf of a family: the largest member constant.
pub fn derive_sup_family(constants: &[f64]) -> Result<f64> {
    if constants.is_empty() {
        return Err(Error::invalid("function family must be nonempty"));
    }
    constants.iter().try_fold(0.0f64, |acc, &l| {
        check_nonneg("member constant", l)?;
        Ok(acc.max(l))
    })
}

/// `f g`: `sup|f| L(g) + sup|g| L(f)`. The sup arguments are bounds on the
/// magnitudes of `f` and `g` over the domain.
pub fn derive_product(l_f: f64, l_g: f64, sup_f: f64, sup_g: f64) -> Result<f64> {
    for (name, v) in [("L(f)", l_f), ("L(g)", l_g), ("sup|f|", sup_f), ("sup|g|", sup_g)] {
        check_nonneg(name, v)?;
    }
    Ok(sup_f * l_g + sup_g * l_f)
}

/// `1 / f` with `inf |f| = b > 0`: `L(f) / b²`.
pub fn derive_reciprocal(l_f: f64, inf_abs_f: f64) -> Result<f64> {
    check_nonneg("L(f)", l_f)?;
    if !(inf_abs_f > 0.0 && inf_abs_f.is_finite()) {
        return Err(Error::invalid(format!("reciprocal needs inf |f| > 0, got {inf_abs_f}")));
    }
    Ok(l_f / (inf_abs_f * inf_abs_f))
}

/// `f²`: `2 L(f) sup|f|`.
pub fn derive_square(l_f: f64, sup_f: f64) -> Result<f64> {
    check_nonneg("L(f)", l_f)?;
    check_nonneg("sup|f|", sup_f)?;
    Ok(2.0 * l_f * sup_f)
}

/// `g ∘ f` where both have exponent `p`: constant `L(g) L(f)^p`, exponent `p²`.
pub fn derive_compose(l_f: f64, l_g: f64, p: f64) -> Result<HolderSpec> {
    check_nonneg("L(f)", l_f)?;
    check_nonneg("L(g)", l_g)?;
    HolderSpec::new(l_g * l_f.powf(p), p * p)
}
