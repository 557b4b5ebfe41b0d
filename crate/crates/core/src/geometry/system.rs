use std::ops::Range;

use crate::error::{Error, Result};
use crate::scalar::ExtScalar;

/// Concentric circles (one 2-sphere when `dim` is odd) in mutually
/// orthogonal coordinate planes, with `rᵢ² + rⱼ² = λ²` for all `i ≠ j`.
///
/// Part `i` of an even-dimensional system lives on axes `2i, 2i+1`. In odd
/// dimension part 0 is the sphere on axes `0, 1, 2` and part `i ≥ 1` uses
/// axes `2i+1, 2i+2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LenzSystem {
    dim: usize,
    lambda_sq: ExtScalar,
    radii_sq: Vec<ExtScalar>,
}

impl LenzSystem {
    pub fn new(dim: usize, lambda_sq: ExtScalar, radii_sq: Vec<ExtScalar>) -> Result<Self> {
        if dim < 4 {
            return Err(Error::Dimension(dim));
        }
        let p = dim / 2;
        if radii_sq.len() != p {
            return Err(Error::ConstraintViolation(format!(
                "dimension {dim} needs {p} radii, got {}",
                radii_sq.len()
            )));
        }
        if !lambda_sq.is_positive() || radii_sq.iter().any(|r| !r.is_positive()) {
            return Err(Error::ConstraintViolation(
                "radii and distance must be positive".into(),
            ));
        }
        for i in 0..p {
            for j in i + 1..p {
                if &radii_sq[i] + &radii_sq[j] != lambda_sq {
                    return Err(Error::ConstraintViolation(format!(
                        "r{}² + r{}² = {} differs from λ² = {lambda_sq}",
                        i + 1,
                        j + 1,
                        &radii_sq[i] + &radii_sq[j]
                    )));
                }
            }
        }
        Ok(LenzSystem {
            dim,
            lambda_sq,
            radii_sq,
        })
    }

    /// The system with every squared radius equal to `λ²/2`.
    pub fn equal_radii(dim: usize, lambda_sq: ExtScalar) -> Result<Self> {
        let half = lambda_sq.scale(&crate::scalar::rat(1, 2));
        Self::new(dim, lambda_sq, vec![half; dim / 2])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of parts, `⌊d/2⌋`.
    pub fn parts(&self) -> usize {
        self.dim / 2
    }

    pub fn is_odd(&self) -> bool {
        self.dim % 2 == 1
    }

    pub fn is_sphere(&self, part: usize) -> bool {
        self.is_odd() && part == 0
    }

    pub fn lambda_sq(&self) -> &ExtScalar {
        &self.lambda_sq
    }

    pub fn radii_sq(&self) -> &[ExtScalar] {
        &self.radii_sq
    }

    pub fn radius_sq(&self, part: usize) -> &ExtScalar {
        &self.radii_sq[part]
    }

    /// Coordinate axes spanned by the plane (or 3-space) of `part`.
    pub fn axes(&self, part: usize) -> Range<usize> {
        part_axes(self.dim, part)
    }
}

pub(crate) fn part_axes(dim: usize, part: usize) -> Range<usize> {
    if dim.is_multiple_of(2) {
        2 * part..2 * part + 2
    } else if part == 0 {
        0..3
    } else {
        2 * part + 1..2 * part + 3
    }
}
