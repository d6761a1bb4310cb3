//! The weight-6 quotient test.
//!
//! For a relation `F(h1, h2, h3) = 0` the ratio
//! `(theta(h1) h3 - h1 theta(h3)) / F_Y(h1, h2, h3)` is a modular function;
//! the model is accepted when it is the constant `c_F`. Both numerator and
//! denominator are weight-6 forms, so the difference
//! `numerator - c_F * denominator` is certified zero once it vanishes through
//! the weight-6 Sturm bound.

use serde::{Deserialize, Serialize};

use super::RelationError;
use crate::poly::HomogeneousPolynomial;
use crate::ring::Q;
use crate::series::{evaluate_form, QSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsiStatus {
    Constant,
    NonConstant,
    /// The series are too short to decide.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiCertificate {
    /// Ratio of the leading coefficients.
    #[serde(with = "crate::ring::qstr")]
    pub c_f: Q,
    pub status: PsiStatus,
    pub bound: usize,
    /// First exponent where `numerator - c_F * denominator` is nonzero.
    pub residual_order: Option<usize>,
    /// Leading exponents of numerator and denominator.
    pub numerator_order: usize,
    pub denominator_order: usize,
}

pub fn psi_certificate(
    form: &HomogeneousPolynomial,
    basis: &[QSeries; 3],
    bound: usize,
) -> Result<PsiCertificate, RelationError> {
    let h: Vec<QSeries> = basis.iter().map(|s| s.truncate(bound)).collect();
    let num = h[0].theta().mul(&h[2])?.sub(&h[0].mul(&h[2].theta())?)?;
    let den = evaluate_form(&form.partial(1), &h)?;
    let (dn, dc) = den.leading().ok_or(RelationError::DegenerateDenominator)?;
    let (nn, nc) = num.leading().ok_or(RelationError::DegenerateNumerator)?;
    let c_f = nc / dc;
    let residual = num.sub(&den.scale(&c_f))?;
    let residual_order = residual.vanishing_order().exact();
    let status = match residual_order {
        Some(n) if n <= bound => PsiStatus::NonConstant,
        _ if residual.trunc() >= bound => PsiStatus::Constant,
        _ => PsiStatus::Inconclusive,
    };
    Ok(PsiCertificate {
        c_f,
        status,
        bound,
        residual_order: residual_order.filter(|n| *n <= bound),
        numerator_order: nn,
        denominator_order: dn,
    })
}
