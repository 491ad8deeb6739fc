//! JSON model files.
//!
//! ```json
//! {"type":"arfima","d":0.2,"poles":[[0.5,0.1]],"zeros":[[0.3,0.0]]}
//! {"type":"arma","poles":[[0.5,0.0]],"zeros":[]}
//! {"type":"generic","d":0.1,"poles":[],"zeros":[],"log_gain":{"coordinate":0}}
//! ```
//!
//! Complex numbers are `[re, im]` pairs. The `generic` form is an ARFIMA-shaped
//! series whose constant term `η_0` is either a fixed complex number or one of
//! the coordinates, which makes gain-dependent (non-Kähler) filters expressible.

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{arfima_eta, check_roots, Domain, FilterModel, ParameterPoint, Roots, SeriesSource};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Arfima {
        d: f64,
        #[serde(default)]
        poles: Vec<Complex64>,
        #[serde(default)]
        zeros: Vec<Complex64>,
    },
    Arma {
        #[serde(default)]
        poles: Vec<Complex64>,
        #[serde(default)]
        zeros: Vec<Complex64>,
    },
    Generic {
        d: f64,
        #[serde(default)]
        poles: Vec<Complex64>,
        #[serde(default)]
        zeros: Vec<Complex64>,
        log_gain: GainSpec,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GainSpec {
    /// `η_0` fixed at this complex value.
    Constant(Complex64),
    /// `η_0 = ξ^index` (zero-based coordinate index).
    Coordinate(usize),
}

impl ModelSpec {
    /// Parses a model file. Errors name the offending field, e.g. `poles[0]`.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut value: Value = serde_json::from_str(text).map_err(|e| Error::domain("model", e.to_string()))?;
        let obj = value
            .as_object_mut()
            .ok_or_else(|| Error::domain("model", "expected a JSON object"))?;
        let tag = match obj.remove("type") {
            Some(Value::String(t)) => t,
            Some(other) => return Err(Error::domain("type", format!("expected a string, got {other}"))),
            None => return Err(Error::domain("type", "missing model type")),
        };
        match tag.as_str() {
            "arfima" => {
                let f: fields::Arfima = parse_fields(value)?;
                Ok(ModelSpec::Arfima { d: f.d, poles: f.poles, zeros: f.zeros })
            }
            "arma" => {
                let f: fields::Arma = parse_fields(value)?;
                Ok(ModelSpec::Arma { poles: f.poles, zeros: f.zeros })
            }
            "generic" => {
                let f: fields::Generic = parse_fields(value)?;
                Ok(ModelSpec::Generic {
                    d: f.d,
                    poles: f.poles,
                    zeros: f.zeros,
                    log_gain: f.log_gain,
                })
            }
            other => Err(Error::domain(
                "type",
                format!("unknown model type `{other}`, expected arfima, arma or generic"),
            )),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model spec serializes")
    }

    pub fn build(&self) -> Result<FilterModel> {
        match self {
            ModelSpec::Arfima { d, poles, zeros } => FilterModel::arfima(*d, poles.clone(), zeros.clone()),
            ModelSpec::Arma { poles, zeros } => FilterModel::arma(poles.clone(), zeros.clone()),
            ModelSpec::Generic { d, poles, zeros, log_gain } => {
                let (p, q) = (poles.len(), zeros.len());
                let dim = 1 + p + q;
                if let GainSpec::Coordinate(i) = log_gain {
                    if *i >= dim {
                        return Err(Error::domain(
                            "log_gain.coordinate",
                            format!("index {i} out of range for {dim} coordinates"),
                        ));
                    }
                }
                let gain = log_gain.clone();
                let domain = Domain::default();
                fn split(xi: &[Complex64], p: usize) -> Roots<'_> {
                    Roots {
                        d: xi[0],
                        poles: &xi[1..1 + p],
                        zeros: &xi[1 + p..],
                    }
                }
                let source = SeriesSource::new(dim, move |xi, r| {
                    let mut eta = arfima_eta(&split(xi, p), r);
                    eta[0] = match gain {
                        GainSpec::Constant(c) => c,
                        GainSpec::Coordinate(i) => xi[i],
                    };
                    eta
                })
                .with_domain(move |xi| {
                    let (lo, hi) = domain.d_range;
                    if !(xi[0].re > lo && xi[0].re < hi) {
                        return Err(Error::domain("d", format!("real part {} outside ({lo}, {hi})", xi[0].re)));
                    }
                    check_roots(&split(xi, p), &domain)
                });
                let mut coords = vec![Complex64::new(*d, 0.0)];
                coords.extend(poles.iter().copied());
                coords.extend(zeros.iter().copied());
                FilterModel::generic(source, ParameterPoint(coords))
            }
        }
    }
}

fn parse_fields<T: DeserializeOwned>(value: Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." { "model".to_string() } else { path };
        Error::domain(field, e.into_inner().to_string())
    })
}

/// Untagged field sets, parsed separately so errors keep their path.
mod fields {
    use super::GainSpec;
    use num_complex::Complex64;
    use serde::Deserialize;

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Arfima {
        pub d: f64,
        #[serde(default)]
        pub poles: Vec<Complex64>,
        #[serde(default)]
        pub zeros: Vec<Complex64>,
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Arma {
        #[serde(default)]
        pub poles: Vec<Complex64>,
        #[serde(default)]
        pub zeros: Vec<Complex64>,
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Generic {
        pub d: f64,
        #[serde(default)]
        pub poles: Vec<Complex64>,
        #[serde(default)]
        pub zeros: Vec<Complex64>,
        pub log_gain: GainSpec,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{check_kahler_condition, ModelKind, KAHLER_TOL};

    #[test]
    fn parses_documented_example() {
        let spec = ModelSpec::from_json(r#"{"type":"arfima","d":0.2,"poles":[[0.5,0.1]],"zeros":[[0.3,0.0]]}"#).unwrap();
        let m = spec.build().unwrap();
        assert_eq!(m.kind(), ModelKind::Arfima);
        assert_eq!(m.dim(), 3);
        assert_eq!(m.point().0[1], Complex64::new(0.5, 0.1));
        let back = ModelSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn malformed_input_names_field() {
        let err = ModelSpec::from_json(r#"{"type":"arfima","poles":[]}"#).unwrap_err();
        assert!(err.to_string().contains("`d`"), "{err}");
        let err = ModelSpec::from_json(r#"{"type":"arfima","d":0.1,"poles":[[0.5]]}"#).unwrap_err();
        assert!(matches!(err, Error::Domain { ref field, .. } if field == "poles[0]"), "{err}");
        let err = ModelSpec::from_json(r#"{"type":"arfimax","d":0.1}"#).unwrap_err();
        assert!(err.to_string().contains("`type`"), "{err}");
        let err = ModelSpec::from_json(r#"{"type":"arfima","d":0.1,"pols":[]}"#).unwrap_err();
        assert!(err.to_string().contains("pols"), "{err}");
        let err = ModelSpec::from_json(r#"{"type":"arfima","d":0.1,"zeros":[[1.2,0.0]]}"#)
            .unwrap()
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::Domain { ref field, .. } if field == "zeros[0]"));
    }

    #[test]
    fn generic_gain_presets() {
        let varying = ModelSpec::from_json(r#"{"type":"generic","d":0.1,"log_gain":{"coordinate":0}}"#)
            .unwrap()
            .build()
            .unwrap();
        let pts = [ParameterPoint::from_real(&[0.1]), ParameterPoint::from_real(&[-0.2])];
        assert!(!check_kahler_condition(&varying, &pts, KAHLER_TOL).unwrap().is_kahler);

        let constant = ModelSpec::from_json(r#"{"type":"generic","d":0.1,"log_gain":{"constant":[0.6931471805599453,0.0]}}"#)
            .unwrap()
            .build()
            .unwrap();
        assert!(check_kahler_condition(&constant, &pts, KAHLER_TOL).unwrap().is_kahler);
        assert!(!constant.contains(&ParameterPoint::from_real(&[0.7])));
    }
}
