//! Contact order of the tangent line at `P = (1 : 0 : 0)`.
//!
//! With the basis normalized so that `h1 = q + ...` and `h3 = O(q^3)`, the
//! cusp at infinity maps to `P` and its tangent line is `Z = 0`. Restricting
//! a quartic to that line gives
//! `a400 X^4 + a310 X^3 Y + a220 X^2 Y^2 + a130 X Y^3 + a040 Y^4`,
//! whose order of vanishing at `Y = 0` is the intersection multiplicity.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::poly::HomogeneousPolynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlexKind {
    /// `a400 != 0` or `a310 != 0`: the model is not in the normal form where
    /// `P` lies on the curve with tangent `Z = 0`.
    NotOnCurveNormalForm,
    OrdinaryPoint,
    Flex,
    Hyperflex,
}

impl FlexKind {
    /// Kind implied by the vanishing order of `h3` at the cusp.
    pub fn from_ord_h3(ord: usize) -> Option<Self> {
        match ord {
            3 => Some(FlexKind::OrdinaryPoint),
            4 => Some(FlexKind::Flex),
            5 => Some(FlexKind::Hyperflex),
            _ => None,
        }
    }

    /// Kind denoted by a table marker.
    pub fn from_marker(marker: crate::records::FlexMarker) -> Self {
        use crate::records::FlexMarker;
        match marker {
            FlexMarker::None => FlexKind::OrdinaryPoint,
            FlexMarker::Flex => FlexKind::Flex,
            FlexMarker::Hyperflex => FlexKind::Hyperflex,
        }
    }
}

impl std::fmt::Display for FlexKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FlexKind::NotOnCurveNormalForm => "not-on-curve-normal-form",
            FlexKind::OrdinaryPoint => "ordinary-point",
            FlexKind::Flex => "flex",
            FlexKind::Hyperflex => "hyperflex",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlexClassification {
    pub kind: FlexKind,
    /// Which of `a400, a310, a220, a130` vanish.
    pub vanishing: Vec<String>,
    pub ord_h3: Option<usize>,
    /// Agreement with `ord_h3`, when supplied.
    pub consistent: Option<bool>,
}

const TANGENT_COEFFS: [(&str, (u32, u32, u32)); 4] =
    [("a400", (4, 0, 0)), ("a310", (3, 1, 0)), ("a220", (2, 2, 0)), ("a130", (1, 3, 0))];

/// Classify `P = (1:0:0)` from the coefficients of the quartic along `Z = 0`.
pub fn classify_p_infinity(f: &HomogeneousPolynomial, ord_h3: Option<usize>) -> FlexClassification {
    let zero: Vec<bool> = TANGENT_COEFFS.iter().map(|(_, m)| f.coeff(*m).is_zero()).collect();
    let kind = if f.degree() != 4 || !zero[0] || !zero[1] {
        FlexKind::NotOnCurveNormalForm
    } else if !zero[2] {
        FlexKind::OrdinaryPoint
    } else if !zero[3] {
        FlexKind::Flex
    } else {
        FlexKind::Hyperflex
    };
    let vanishing =
        TANGENT_COEFFS.iter().zip(&zero).filter(|(_, z)| **z).map(|((name, _), _)| name.to_string()).collect();
    let consistent = ord_h3.map(|o| FlexKind::from_ord_h3(o) == Some(kind));
    FlexClassification { kind, vanishing, ord_h3, consistent }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kind(s: &str) -> FlexKind {
        classify_p_infinity(&s.parse().unwrap(), None).kind
    }

    #[test]
    fn kinds_from_tangent_coefficients() {
        assert_eq!(kind("X^2*Y^2 + X*Z^3 + Y^4 + Z^4"), FlexKind::OrdinaryPoint);
        assert_eq!(kind("X*Y^3 + X^3*Z + Z^4"), FlexKind::Flex);
        assert_eq!(kind("Y^4 + X^3*Z + Z^4"), FlexKind::Hyperflex);
    }

    #[test]
    fn unnormalized_models() {
        assert_eq!(kind("X^4 + Y^4 + Z^4"), FlexKind::NotOnCurveNormalForm);
        assert_eq!(kind("X^3*Y + Z^4"), FlexKind::NotOnCurveNormalForm);
        assert_eq!(kind("X*Z - Y^2"), FlexKind::NotOnCurveNormalForm);
    }

    #[test]
    fn vanishing_set_and_consistency() {
        let flex: HomogeneousPolynomial = "X*Y^3 + X^3*Z + Z^4".parse().unwrap();
        let c = classify_p_infinity(&flex, Some(4));
        assert_eq!(c.vanishing, ["a400", "a310", "a220"]);
        assert_eq!(c.consistent, Some(true));
        assert_eq!(classify_p_infinity(&flex, Some(3)).consistent, Some(false));
    }
}
