//! Parameter grids for prior scans and grid posteriors.
//!
//! A polar grid takes the product of a radial-angular grid for every root
//! coordinate (midpoint radii, uniform angles) with a midpoint grid on real
//! `d` when the model has one. Points that violate the domain (coincident or
//! cancelling roots) are skipped and counted.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{FilterModel, ModelKind, ParameterPoint};

/// Hard cap on grid size.
pub const MAX_GRID_POINTS: usize = 100_000;

fn default_d_values() -> usize {
    5
}

fn default_d_range() -> (f64, f64) {
    (-0.45, 0.45)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridSpec {
    Polar {
        radii: usize,
        angles: usize,
        /// Defaults to the model's admissible radius.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_radius: Option<f64>,
        #[serde(default = "default_d_values")]
        d_values: usize,
        #[serde(default = "default_d_range")]
        d_range: (f64, f64),
    },
    Points {
        points: Vec<ParameterPoint>,
    },
}

impl Default for GridSpec {
    /// 8 radii × 16 angles per root, 5 values of `d`.
    fn default() -> Self {
        GridSpec::polar(8, 16)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub points: Vec<ParameterPoint>,
    /// Quadrature weights (area element `r dr dφ` per root, `dd` for `d`).
    pub weights: Vec<f64>,
    pub skipped: usize,
    pub description: String,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// One axis of the product grid: sample values with their weights.
type Axis = Vec<(Complex64, f64)>;

impl GridSpec {
    pub fn polar(radii: usize, angles: usize) -> Self {
        GridSpec::Polar {
            radii,
            angles,
            max_radius: None,
            d_values: default_d_values(),
            d_range: default_d_range(),
        }
    }

    pub fn with_max_radius(self, r: f64) -> Self {
        match self {
            GridSpec::Polar { radii, angles, d_values, d_range, .. } => GridSpec::Polar {
                radii,
                angles,
                max_radius: Some(r),
                d_values,
                d_range,
            },
            other => other,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::domain("grid", e.to_string()))
    }

    /// Number of points before domain filtering.
    pub fn nominal_size(&self, model: &FilterModel) -> usize {
        match self {
            GridSpec::Points { points } => points.len(),
            GridSpec::Polar { radii, angles, d_values, .. } => {
                let per_root = radii.saturating_mul(*angles);
                let roots = model.dim() - usize::from(model.has_d());
                let mut total = if model.has_d() { *d_values } else { 1 };
                for _ in 0..roots {
                    total = total.saturating_mul(per_root);
                }
                total
            }
        }
    }

    pub fn build(&self, model: &FilterModel) -> Result<Grid> {
        let nominal = self.nominal_size(model);
        if nominal == 0 {
            return Err(Error::InvalidConfig("empty grid".into()));
        }
        if nominal > MAX_GRID_POINTS {
            return Err(Error::InvalidConfig(format!(
                "grid has {nominal} points, the limit is {MAX_GRID_POINTS}"
            )));
        }
        match self {
            GridSpec::Points { points } => {
                for p in points {
                    model.validate_point(p)?;
                }
                Ok(Grid {
                    points: points.clone(),
                    weights: vec![1.0; points.len()],
                    skipped: 0,
                    description: format!("{} explicit points", points.len()),
                })
            }
            GridSpec::Polar { radii, angles, max_radius, d_values, d_range } => {
                let rmax = max_radius.unwrap_or_else(|| model.domain().max_radius());
                if !(rmax > 0.0 && rmax < 1.0) {
                    return Err(Error::InvalidConfig(format!("max_radius {rmax} must lie in (0, 1)")));
                }
                let (lo, hi) = *d_range;
                if !(lo < hi) {
                    return Err(Error::InvalidConfig(format!("empty d_range ({lo}, {hi})")));
                }
                let axes = polar_axes(model, *radii, *angles, rmax, *d_values, *d_range);
                let (points, weights, skipped) = product(model, &axes);
                let mut description = format!("polar grid {radii}x{angles} per root, |root| <= {rmax}");
                if model.has_d() {
                    description.push_str(&format!(", {d_values} d-values on ({lo}, {hi})"));
                }
                if points.is_empty() {
                    return Err(Error::InvalidConfig("no grid point lies in the admissible domain".into()));
                }
                Ok(Grid {
                    points,
                    weights,
                    skipped,
                    description,
                })
            }
        }
    }
}

fn polar_axes(model: &FilterModel, radii: usize, angles: usize, rmax: f64, d_values: usize, d_range: (f64, f64)) -> Vec<Axis> {
    let dr = rmax / radii as f64;
    let dphi = TAU / angles as f64;
    let disk = |offset: f64| -> Axis {
        let mut axis = Vec::with_capacity(radii * angles);
        for k in 0..radii {
            let r = dr * (k as f64 + 0.5);
            for j in 0..angles {
                let phi = dphi * (j as f64 + offset);
                axis.push((Complex64::from_polar(r, phi), r * dr * dphi));
            }
        }
        axis
    };
    let mut axes = Vec::with_capacity(model.dim());
    if model.has_d() {
        let (lo, hi) = d_range;
        let step = (hi - lo) / d_values as f64;
        axes.push(
            (0..d_values)
                .map(|j| (Complex64::new(lo + step * (j as f64 + 0.5), 0.0), step))
                .collect(),
        );
    }
    let (p, q) = model.orders();
    match model.kind() {
        ModelKind::GenericSeries => {
            for _ in 0..model.dim() {
                axes.push(disk(0.0));
            }
        }
        _ => {
            // zeros sit half an angular step off the poles so pole/zero
            // cancellations do not land on the grid
            for _ in 0..p {
                axes.push(disk(0.0));
            }
            for _ in 0..q {
                axes.push(disk(0.5));
            }
        }
    }
    axes
}

fn product(model: &FilterModel, axes: &[Axis]) -> (Vec<ParameterPoint>, Vec<f64>, usize) {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut skipped = 0;
    let mut index = vec![0usize; axes.len()];
    loop {
        let coords: Vec<Complex64> = index.iter().zip(axes).map(|(&i, a)| a[i].0).collect();
        let weight: f64 = index.iter().zip(axes).map(|(&i, a)| a[i].1).product();
        let point = ParameterPoint(coords);
        if model.contains(&point) {
            points.push(point);
            weights.push(weight);
        } else {
            skipped += 1;
        }
        // odometer increment, last axis fastest
        let mut k = axes.len();
        loop {
            if k == 0 {
                return (points, weights, skipped);
            }
            k -= 1;
            index[k] += 1;
            if index[k] < axes[k].len() {
                break;
            }
            index[k] = 0;
        }
    }
}

/// Seeded random points in the admissible domain.
///
/// Pole/zero models draw real `d` uniformly on `d_range` and each root
/// uniformly (by area) in the disk of radius `max_radius`. Generic models
/// perturb their current point by up to `0.05` per coordinate.
pub fn random_points(model: &FilterModel, count: usize, max_radius: f64, d_range: (f64, f64), seed: u64) -> Result<Vec<ParameterPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 100 * count.max(1) {
            return Err(Error::InvalidConfig("could not sample admissible points".into()));
        }
        let coords: Vec<Complex64> = match model.kind() {
            ModelKind::GenericSeries => model
                .point()
                .coords()
                .iter()
                .map(|c| c + Complex64::new(rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05)))
                .collect(),
            _ => {
                let mut v = Vec::with_capacity(model.dim());
                if model.has_d() {
                    v.push(Complex64::new(rng.random_range(d_range.0..d_range.1), 0.0));
                }
                while v.len() < model.dim() {
                    let r = max_radius * rng.random::<f64>().sqrt();
                    v.push(Complex64::from_polar(r, rng.random_range(0.0..TAU)));
                }
                v
            }
        };
        let point = ParameterPoint(coords);
        if model.contains(&point) {
            out.push(point);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ar1_grid_size_and_area() {
        let m = FilterModel::arma(vec![Complex64::new(0.1, 0.0)], vec![]).unwrap();
        let g = GridSpec::polar(20, 16).with_max_radius(0.9).build(&m).unwrap();
        assert_eq!(g.len(), 320);
        assert_eq!(g.skipped, 0);
        let area: f64 = g.weights.iter().sum();
        assert!((area - std::f64::consts::PI * 0.81).abs() < 1e-12);
        assert!(g.points.iter().all(|p| p.0[0].norm() < 0.9));
    }

    #[test]
    fn arfima_grid_has_d_axis() {
        let m = FilterModel::arfima(0.0, vec![Complex64::new(0.1, 0.0)], vec![Complex64::new(0.2, 0.0)]).unwrap();
        let spec = GridSpec::default();
        assert_eq!(spec.nominal_size(&m), 5 * 128 * 128);
        let g = spec.build(&m).unwrap();
        assert_eq!(g.len() + g.skipped, 5 * 128 * 128);
        let ds: Vec<f64> = g.points.iter().map(|p| p.0[0].re).collect();
        assert!(ds.iter().all(|d| d.abs() < 0.45));
    }

    #[test]
    fn coincident_poles_are_skipped() {
        let z = Complex64::new(0.1, 0.0);
        let m = FilterModel::arma(vec![z, Complex64::new(0.2, 0.0)], vec![]).unwrap();
        let g = GridSpec::polar(2, 4).build(&m).unwrap();
        assert_eq!(g.skipped, 8);
        assert_eq!(g.len(), 56);
    }

    #[test]
    fn empty_and_oversized_grids_are_rejected() {
        let m = FilterModel::arma(vec![Complex64::new(0.1, 0.0)], vec![]).unwrap();
        assert!(matches!(GridSpec::polar(0, 16).build(&m), Err(Error::InvalidConfig(_))));
        assert!(matches!(GridSpec::Points { points: vec![] }.build(&m), Err(Error::InvalidConfig(_))));
        let big = FilterModel::arma((1..=3).map(|i| Complex64::new(0.1 * i as f64, 0.0)).collect(), vec![]).unwrap();
        assert!(GridSpec::polar(10, 16).build(&big).is_err());
    }

    #[test]
    fn random_points_are_admissible_and_seeded() {
        let m = FilterModel::arfima(0.0, vec![Complex64::new(0.1, 0.0)], vec![Complex64::new(0.2, 0.0)]).unwrap();
        let a = random_points(&m, 50, 0.9, (-0.45, 0.45), 3).unwrap();
        assert_eq!(a, random_points(&m, 50, 0.9, (-0.45, 0.45), 3).unwrap());
        assert!(a.iter().all(|p| m.contains(p) && p.0[1].norm() <= 0.9 && p.0[0].re.abs() < 0.45));
    }

    #[test]
    fn parses_json() {
        let g = GridSpec::from_json(r#"{"type":"polar","radii":20,"angles":16,"max_radius":0.9}"#).unwrap();
        assert_eq!(g, GridSpec::polar(20, 16).with_max_radius(0.9));
        assert!(GridSpec::from_json(r#"{"type":"polar","radii":20}"#).is_err());
    }
}
