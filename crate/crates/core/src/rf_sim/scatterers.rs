//! Random point-scatterer phantoms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Imaging region: depth 0..z_max, lateral x_min..x_max (meters).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Extent {
    pub z_max: f64,
    pub x_min: f64,
    pub x_max: f64,
}

impl Extent {
    pub fn validate(&self) -> Result<()> {
        if self.z_max <= 0.0 || self.x_max <= self.x_min {
            return Err(Error::InvalidArgument(format!(
                "degenerate extent: z_max {}, x [{}, {}]",
                self.z_max, self.x_min, self.x_max
            )));
        }
        Ok(())
    }

    pub fn contains(&self, z: f64, x: f64) -> bool {
        (0.0..=self.z_max).contains(&z) && (self.x_min..=self.x_max).contains(&x)
    }

    pub fn area(&self) -> f64 {
        self.z_max * (self.x_max - self.x_min)
    }
}

/// Circular region whose scatterer amplitudes are multiplied by `contrast`
/// (0 gives an anechoic cyst, >1 a hyperechoic lesion).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inclusion {
    pub center_z: f64,
    pub center_x: f64,
    pub radius: f64,
    pub contrast: f64,
}

impl Inclusion {
    fn contains(&self, z: f64, x: f64) -> bool {
        let dz = z - self.center_z;
        let dx = x - self.center_x;
        dz * dz + dx * dx <= self.radius * self.radius
    }
}

/// Point scatterers with unitless reflectivities.
#[derive(Debug, Clone, PartialEq)]
pub struct ScattererField {
    /// `(z, x)` positions in meters, z >= 0.
    pub positions: Vec<(f64, f64)>,
    pub amplitudes: Vec<f64>,
    pub extent: Extent,
}

impl ScattererField {
    pub fn validate(&self) -> Result<()> {
        self.extent.validate()?;
        if self.positions.is_empty() {
            return Err(Error::InvalidArgument("scatterer field is empty".into()));
        }
        if self.positions.len() != self.amplitudes.len() {
            return Err(Error::InvalidArgument(
                "positions/amplitudes length mismatch".into(),
            ));
        }
        for &(z, x) in &self.positions {
            if !self.extent.contains(z, x) {
                return Err(Error::InvalidArgument(format!(
                    "scatterer ({z}, {x}) outside extent"
                )));
            }
        }
        if !self.amplitudes.iter().all(|a| a.is_finite()) {
            return Err(Error::InvalidArgument("non-finite amplitude".into()));
        }
        Ok(())
    }
}

/// Draw a uniformly random speckle-producing scatterer field.
///
/// `density` is scatterers per square meter of extent; base amplitudes are
/// standard normal, rescaled inside each inclusion by its contrast. The
/// result is deterministic for a fixed seed.
pub fn generate_scatterers(
    extent: Extent,
    density: f64,
    inclusions: &[Inclusion],
    seed: u64,
) -> Result<ScattererField> {
    extent.validate()?;
    if density <= 0.0 {
        return Err(Error::InvalidArgument("density must be > 0".into()));
    }
    for inc in inclusions {
        if inc.radius <= 0.0 {
            return Err(Error::InvalidArgument("inclusion radius must be > 0".into()));
        }
        if !extent.contains(inc.center_z, inc.center_x) {
            return Err(Error::InvalidArgument(format!(
                "inclusion center ({}, {}) outside extent",
                inc.center_z, inc.center_x
            )));
        }
    }
    let count = (density * extent.area()).round() as usize;
    if count == 0 {
        return Err(Error::InvalidArgument(
            "density too low: expected scatterer count is zero".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions = Vec::with_capacity(count);
    let mut amplitudes = Vec::with_capacity(count);
    for _ in 0..count {
        let z = rng.gen_range(0.0..extent.z_max);
        let x = rng.gen_range(extent.x_min..extent.x_max);
        let mut amp: f64 = StandardNormal.sample(&mut rng);
        for inc in inclusions {
            if inc.contains(z, x) {
                amp *= inc.contrast;
            }
        }
        positions.push((z, x));
        amplitudes.push(amp);
    }
    Ok(ScattererField {
        positions,
        amplitudes,
        extent,
    })
}
