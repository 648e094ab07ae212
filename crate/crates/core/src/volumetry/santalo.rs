use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Centrally symmetric bodies in `R^m` with closed-form volumes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Body {
    /// Unit Euclidean ball.
    Ball,
    /// `[-1, 1]^m`.
    Cube,
    /// Unit ℓ1 ball.
    CrossPolytope,
}

impl Body {
    pub fn polar(self) -> Body {
        match self {
            Body::Ball => Body::Ball,
            Body::Cube => Body::CrossPolytope,
            Body::CrossPolytope => Body::Cube,
        }
    }

    pub fn ln_volume(self, m: usize) -> f64 {
        let mf = m as f64;
        match self {
            Body::Ball => 0.5 * mf * std::f64::consts::PI.ln() - ln_gamma(0.5 * mf + 1.0),
            Body::Cube => mf * std::f64::consts::LN_2,
            Body::CrossPolytope => mf * std::f64::consts::LN_2 - ln_gamma(mf + 1.0),
        }
    }

    /// `(vol K / vol B)^{1/m}`.
    pub fn vrad(self, m: usize) -> f64 {
        ((self.ln_volume(m) - Body::Ball.ln_volume(m)) / m as f64).exp()
    }
}

impl std::str::FromStr for Body {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ball" => Ok(Body::Ball),
            "cube" => Ok(Body::Cube),
            "cross" | "cross_polytope" | "cross-polytope" => Ok(Body::CrossPolytope),
            _ => Err(Error::UnsupportedBody(s.to_string())),
        }
    }
}

pub const MAX_SANTALO_DIM: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SantaloReport {
    pub body: Body,
    pub polar: Body,
    pub m: usize,
    /// `vrad(K) · vrad(K°)`.
    pub product: f64,
    pub satisfies_upper: bool,
    pub c: f64,
    pub satisfies_lower_at_c: bool,
}

/// Volume-radius product of `body` and its polar in `R^m`, checked against
/// `c ≤ product ≤ 1`.
pub fn santalo_check(body: Body, m: usize, c: f64) -> Result<SantaloReport> {
    if m == 0 || m > MAX_SANTALO_DIM {
        return Err(Error::UnsupportedBody(format!(
            "closed-form volumes are wired for 1 <= m <= {MAX_SANTALO_DIM}, got {m}"
        )));
    }
    let polar = body.polar();
    // in R^1 all three bodies are [-1, 1]
    let product = if body == Body::Ball || m == 1 {
        1.0
    } else {
        let ln_ball = Body::Ball.ln_volume(m);
        ((body.ln_volume(m) + polar.ln_volume(m) - 2.0 * ln_ball) / m as f64).exp()
    };
    Ok(SantaloReport {
        body,
        polar,
        m,
        product,
        satisfies_upper: product <= 1.0 + 1e-12,
        c,
        satisfies_lower_at_c: product >= c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn planar_cube() {
        let r = santalo_check(Body::Cube, 2, 0.1).unwrap();
        assert!((r.product - 8f64.sqrt() / PI).abs() < 1e-12);
        assert!(r.satisfies_upper && r.satisfies_lower_at_c);
        assert_eq!(r.polar, Body::CrossPolytope);
    }

    #[test]
    fn cube_in_three_dims() {
        // vol 8 and 4/3 against (4π/3)²
        let exact = (8.0 * 4.0 / 3.0 / (4.0 * PI / 3.0).powi(2)).cbrt();
        let r = santalo_check(Body::CrossPolytope, 3, 0.1).unwrap();
        assert!((r.product - exact).abs() < 1e-12);
    }

    #[test]
    fn ball_is_self_polar() {
        for m in 1..=10 {
            assert_eq!(santalo_check(Body::Ball, m, 0.1).unwrap().product, 1.0);
        }
        assert_eq!(santalo_check(Body::Cube, 1, 0.1).unwrap().product, 1.0);
    }

    #[test]
    fn unsupported_dimensions() {
        assert!(santalo_check(Body::Cube, 0, 0.1).is_err());
        assert!(santalo_check(Body::Cube, 11, 0.1).is_err());
        assert!("simplex".parse::<Body>().is_err());
    }
}
