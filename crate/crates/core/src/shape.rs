//! Shape-parameter sequences γ_1, γ_2, … for the (an)isotropic Gaussian kernel.
//!
//! A [`ShapeSequence`] is a rule rather than a stored array, so the same
//! sequence can be evaluated at any dimension `d` (except explicit lists,
//! which fix the largest admissible `d`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeSequence {
    /// γ_ℓ = γ for every coordinate.
    Isotropic { gamma: f64 },
    /// γ_ℓ = c·ℓ^{-α}.
    PowerLaw { scale: f64, exponent: f64 },
    /// γ_ℓ = q^ℓ with q ∈ (0,1).
    Geometric { base: f64 },
    /// Finite list; its length is the largest usable dimension.
    Explicit { gammas: Vec<f64> },
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(format!("{name} must be a positive finite number, got {v}")))
    }
}

impl ShapeSequence {
    pub fn isotropic(gamma: f64) -> Result<Self> {
        Ok(Self::Isotropic {
            gamma: positive("gamma", gamma)?,
        })
    }

    pub fn power_law(scale: f64, exponent: f64) -> Result<Self> {
        let scale = positive("power-law scale", scale)?;
        if !(exponent.is_finite() && exponent >= 0.0) {
            return Err(invalid(format!(
                "power-law exponent must be finite and >= 0, got {exponent}"
            )));
        }
        Ok(Self::PowerLaw { scale, exponent })
    }

    pub fn geometric(base: f64) -> Result<Self> {
        if !(base > 0.0 && base < 1.0) {
            return Err(invalid(format!("geometric base must lie in (0,1), got {base}")));
        }
        Ok(Self::Geometric { base })
    }

    pub fn explicit(gammas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() {
            return Err(invalid("explicit shape list is empty"));
        }
        for &g in &gammas {
            positive("explicit gamma", g)?;
        }
        Ok(Self::Explicit { gammas })
    }

    /// Largest dimension the rule can serve, `None` when unbounded.
    pub fn max_dim(&self) -> Option<usize> {
        match self {
            Self::Explicit { gammas } => Some(gammas.len()),
            _ => None,
        }
    }

    /// γ_ℓ for 1-based coordinate `l`.
    pub fn gamma(&self, l: usize) -> Result<f64> {
        if l == 0 {
            return Err(invalid("coordinate index is 1-based"));
        }
        let g = match self {
            Self::Isotropic { gamma } => *gamma,
            Self::PowerLaw { scale, exponent } => {
                if *exponent == 0.0 {
                    *scale
                } else {
                    scale * (l as f64).powf(-exponent)
                }
            }
            Self::Geometric { base } => base.powi(l as i32),
            Self::Explicit { gammas } => *gammas.get(l - 1).ok_or_else(|| {
                invalid(format!(
                    "explicit shape has {} entries, coordinate {l} requested",
                    gammas.len()
                ))
            })?,
        };
        if g > 0.0 && g.is_finite() {
            Ok(g)
        } else {
            Err(Error::Overflow(format!("gamma_{l} = {g} is not a positive finite number")))
        }
    }

    /// γ_1..γ_d.
    pub fn gammas(&self, d: usize) -> Result<Vec<f64>> {
        if d == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if let Some(max) = self.max_dim() {
            if d > max {
                return Err(invalid(format!(
                    "explicit shape defines {max} coordinates, dimension {d} requested"
                )));
            }
        }
        (1..=d).map(|l| self.gamma(l)).collect()
    }
}

impl fmt::Display for ShapeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Isotropic { gamma } => write!(f, "iso:{gamma}"),
            Self::PowerLaw { scale, exponent } => write!(f, "powerlaw:{scale}:{exponent}"),
            Self::Geometric { base } => write!(f, "geom:{base}"),
            Self::Explicit { gammas } => {
                write!(f, "explicit:")?;
                for (i, g) in gammas.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{g}")?;
                }
                Ok(())
            }
        }
    }
}

fn parse_num(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| invalid(format!("cannot parse {what} from '{s}'")))
}

/// Parses the `iso:<γ>`, `powerlaw:<c>:<α>`, `geom:<q>`, `explicit:<γ1,γ2,...>` grammar.
impl FromStr for ShapeSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| invalid(format!("shape '{s}' is missing a ':' separator")))?;
        match kind {
            "iso" => Self::isotropic(parse_num(rest, "gamma")?),
            "powerlaw" => {
                let (c, a) = rest
                    .split_once(':')
                    .ok_or_else(|| invalid("powerlaw expects powerlaw:<c>:<alpha>"))?;
                Self::power_law(parse_num(c, "scale")?, parse_num(a, "exponent")?)
            }
            "geom" => Self::geometric(parse_num(rest, "base")?),
            "explicit" => {
                let gammas = rest
                    .split(',')
                    .map(|t| parse_num(t, "gamma"))
                    .collect::<Result<Vec<_>>>()?;
                Self::explicit(gammas)
            }
            other => Err(invalid(format!("unknown shape kind '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_kind() {
        assert_eq!("iso:1".parse::<ShapeSequence>().unwrap(), ShapeSequence::isotropic(1.0).unwrap());
        let p: ShapeSequence = "powerlaw:1:2".parse().unwrap();
        assert_eq!(p.gamma(3).unwrap(), 1.0 / 9.0);
        let g: ShapeSequence = "geom:0.5".parse().unwrap();
        assert_eq!(g.gamma(2).unwrap(), 0.25);
        let e: ShapeSequence = "explicit:1, 0.5,0.25".parse().unwrap();
        assert_eq!(e.gammas(3).unwrap(), vec![1.0, 0.5, 0.25]);
        assert_eq!(e.max_dim(), Some(3));
    }

    #[test]
    fn display_round_trips() {
        for s in ["iso:1", "powerlaw:1:2", "geom:0.5", "explicit:1,0.5,0.25"] {
            let shape: ShapeSequence = s.parse().unwrap();
            assert_eq!(shape.to_string(), s);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!("iso:0".parse::<ShapeSequence>().is_err());
        assert!("iso:-1".parse::<ShapeSequence>().is_err());
        assert!("geom:1".parse::<ShapeSequence>().is_err());
        assert!("powerlaw:1:-1".parse::<ShapeSequence>().is_err());
        assert!("explicit:".parse::<ShapeSequence>().is_err());
        assert!("bogus:1".parse::<ShapeSequence>().is_err());
        assert!("iso".parse::<ShapeSequence>().is_err());
        let e = ShapeSequence::explicit(vec![1.0, 2.0]).unwrap();
        assert!(e.gammas(3).is_err());
        assert!(e.gamma(0).is_err());
    }

    #[test]
    fn power_law_with_zero_exponent_is_isotropic() {
        let p = ShapeSequence::power_law(0.7, 0.0).unwrap();
        let i = ShapeSequence::isotropic(0.7).unwrap();
        assert_eq!(p.gammas(20).unwrap(), i.gammas(20).unwrap());
    }
}
