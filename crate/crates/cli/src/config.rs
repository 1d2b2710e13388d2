//! TOML run configuration. See `docs/config.md` for the grammar.

use std::path::Path;

use serde::Deserialize;

use enfix_core::comparison::{ComparisonFunction, Family, Variant};
use enfix_core::contraction::{
    specialize, Classic, ContractionSpec, Domain, Interval, MappingSpec, PiecewiseBranch, Shift,
};
use enfix_core::diagnostics::{SequenceKind, SequenceRecipe, DEFAULT_LENGTH, DEFAULT_TOL};
use enfix_core::solver::StopRule;
use enfix_core::space::{sample_function_space, NormKind, SpaceDescriptor, Vector};

/// Pairs checked by `verify` unless overridden.
pub const DEFAULT_SAMPLES: usize = 10_000;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        source: Box<toml::de::Error>,
    },
    #[error("field `{field}`: {reason}")]
    Field { field: String, reason: String },
    /// The file is well formed but describes an inadmissible spec.
    #[error("invalid spec: {0}")]
    Spec(#[from] enfix_core::Error),
}

fn field(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field: field.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub space: SpaceSection,
    pub mapping: MappingSection,
    pub comparison: ComparisonSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub diagnose: DiagnoseSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSection {
    pub kind: String,
    pub dim: Option<usize>,
    pub norm: Option<String>,
    pub left: Option<f64>,
    pub right: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ScalarOrList {
    Scalar(f64),
    List(Vec<f64>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Weights {
    Named(String),
    List(Vec<f64>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchSection {
    pub interval: String,
    pub scale: f64,
    pub shift: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingSection {
    pub kind: String,
    pub b: f64,
    pub scale: Option<f64>,
    pub shift: Option<ScalarOrList>,
    pub weights: Option<Weights>,
    pub branches: Option<Vec<BranchSection>>,
    pub domain: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonSection {
    pub family: Option<String>,
    pub classic: Option<String>,
    #[serde(default)]
    pub params: Vec<f64>,
    pub variant: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub u0: Option<ScalarOrList>,
    pub residual_tol: Option<f64>,
    pub step_tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseSection {
    pub p: Option<ScalarOrList>,
    pub recipe: Option<String>,
    pub exponent: Option<f64>,
    pub ratio: Option<f64>,
    pub amplitude: Option<f64>,
    pub seed: Option<u64>,
    pub direction: Option<ScalarOrList>,
    pub length: Option<usize>,
    pub tol: Option<f64>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub samples: Option<usize>,
    pub grid: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct DiagnoseSettings {
    pub p: Option<Vector>,
    pub recipe: SequenceRecipe,
    pub tol: f64,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: ContractionSpec,
    pub u0: Vector,
    pub stop: StopRule,
    pub samples: usize,
    pub diagnose: DiagnoseSettings,
}

pub fn load(path: &Path, overrides: Overrides) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text, overrides).map_err(|e| match e {
        ConfigError::Parse { source, .. } => ConfigError::Parse {
            path: path.display().to_string(),
            source,
        },
        other => other,
    })
}

pub fn parse(text: &str, overrides: Overrides) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        path: "<config>".into(),
        source: Box::new(e),
    })?;
    build(raw, overrides)
}

fn vector(v: &ScalarOrList, space: &SpaceDescriptor, name: &str) -> Result<Vector, ConfigError> {
    let v = match v {
        ScalarOrList::Scalar(c) => space.constant(*c),
        ScalarOrList::List(xs) => {
            if xs.len() != space.dim() {
                return Err(field(
                    name,
                    format!("expected {} entries, got {}", space.dim(), xs.len()),
                ));
            }
            Vector::new(xs.clone()).map_err(|e| field(name, e.to_string()))?
        }
    };
    if !v.is_finite() {
        return Err(field(name, "entries must be finite"));
    }
    Ok(v)
}

fn build_space(s: &SpaceSection, grid: Option<usize>) -> Result<SpaceDescriptor, ConfigError> {
    match s.kind.as_str() {
        "euclidean" => {
            if s.left.is_some() || s.right.is_some() || s.points.is_some() {
                return Err(field(
                    "space",
                    "left/right/points only apply to kind = \"sampled-function\"",
                ));
            }
            let dim = s.dim.unwrap_or(1);
            let norm = match &s.norm {
                Some(n) => n.parse::<NormKind>().map_err(|_| {
                    field(
                        "space.norm",
                        format!("unknown norm `{n}`, expected sup, l1 or l2"),
                    )
                })?,
                None => NormKind::Sup,
            };
            SpaceDescriptor::euclidean(dim, norm).map_err(|e| field("space.dim", e.to_string()))
        }
        "sampled-function" => {
            if s.dim.is_some() {
                return Err(field(
                    "space.dim",
                    "use `points` for sampled-function spaces",
                ));
            }
            if s.norm.as_deref().is_some_and(|n| n != "sup") {
                return Err(field(
                    "space.norm",
                    "sampled-function spaces use the sup norm",
                ));
            }
            let left = s.left.ok_or_else(|| field("space.left", "missing"))?;
            let right = s.right.ok_or_else(|| field("space.right", "missing"))?;
            let points = grid.or(s.points).unwrap_or(enfix_core::space::DEFAULT_GRID);
            sample_function_space(left, right, points).map_err(|e| field("space", e.to_string()))
        }
        other => Err(field(
            "space.kind",
            format!("unknown kind `{other}`, expected euclidean or sampled-function"),
        )),
    }
}

fn build_mapping(m: &MappingSection, space: &SpaceDescriptor) -> Result<MappingSpec, ConfigError> {
    let unused = |name: &str, present: bool| {
        if present {
            Err(field(
                &format!("mapping.{name}"),
                format!("not used by kind = \"{}\"", m.kind),
            ))
        } else {
            Ok(())
        }
    };
    match m.kind.as_str() {
        "affine" => {
            unused("weights", m.weights.is_some())?;
            unused("branches", m.branches.is_some())?;
            let scale = m.scale.ok_or_else(|| field("mapping.scale", "missing"))?;
            let shift = match &m.shift {
                None => Shift::Broadcast(0.0),
                Some(ScalarOrList::Scalar(c)) => Shift::Broadcast(*c),
                Some(v) => Shift::Vector(vector(v, space, "mapping.shift")?),
            };
            Ok(MappingSpec::Affine { scale, shift })
        }
        "multiply" => {
            unused("scale", m.scale.is_some())?;
            unused("shift", m.shift.is_some())?;
            unused("branches", m.branches.is_some())?;
            match m
                .weights
                .as_ref()
                .ok_or_else(|| field("mapping.weights", "missing"))?
            {
                Weights::Named(n) if n == "abscissae" => MappingSpec::multiply_by_abscissa(space)
                    .map_err(|e| field("mapping.weights", e.to_string())),
                Weights::Named(n) => Err(field(
                    "mapping.weights",
                    format!("expected \"abscissae\" or a list, got `{n}`"),
                )),
                Weights::List(w) => Ok(MappingSpec::PointwiseMultiply {
                    weights: vector(&ScalarOrList::List(w.clone()), space, "mapping.weights")?,
                }),
            }
        }
        "piecewise" => {
            unused("scale", m.scale.is_some())?;
            unused("shift", m.shift.is_some())?;
            unused("weights", m.weights.is_some())?;
            let branches = m
                .branches
                .as_ref()
                .ok_or_else(|| field("mapping.branches", "missing"))?;
            let branches = branches
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    let interval = b.interval.parse::<Interval>().map_err(|e| {
                        field(&format!("mapping.branches[{i}].interval"), e.to_string())
                    })?;
                    Ok(PiecewiseBranch {
                        interval,
                        scale: b.scale,
                        shift: b.shift,
                    })
                })
                .collect::<Result<Vec<_>, ConfigError>>()?;
            Ok(MappingSpec::Piecewise { branches })
        }
        other => Err(field(
            "mapping.kind",
            format!("unknown kind `{other}`, expected affine, multiply or piecewise"),
        )),
    }
}

fn build_spec(raw: &RawConfig, space: SpaceDescriptor) -> Result<ContractionSpec, ConfigError> {
    let mapping = build_mapping(&raw.mapping, &space)?;
    let c = &raw.comparison;
    let variant = c
        .variant
        .as_deref()
        .map(|v| {
            v.parse::<Variant>().map_err(|_| {
                field(
                    "comparison.variant",
                    format!("unknown variant `{v}`, expected A or A'"),
                )
            })
        })
        .transpose()?;
    let b = raw.mapping.b;

    let spec = match (&c.family, &c.classic) {
        (Some(_), Some(_)) => {
            return Err(field(
                "comparison",
                "give either `family` or `classic`, not both",
            ))
        }
        (None, None) => return Err(field("comparison", "missing `family` or `classic`")),
        (Some(name), None) => {
            let family = name
                .parse::<Family>()
                .map_err(|_| field("comparison.family", format!("unknown family `{name}`")))?;
            let variant = variant.ok_or_else(|| field("comparison.variant", "missing"))?;
            if c.params.len() != family.param_count() {
                return Err(field(
                    "comparison.params",
                    format!(
                        "{} takes {} parameter(s), got {}",
                        family.name(),
                        family.param_count(),
                        c.params.len()
                    ),
                ));
            }
            let f = ComparisonFunction::new(family, c.params.clone(), variant)?;
            ContractionSpec::new(space, mapping, b, f, variant)?
        }
        (None, Some(name)) => {
            let classic = name
                .parse::<Classic>()
                .map_err(|_| field("comparison.classic", format!("unknown condition `{name}`")))?;
            let template = specialize(classic, &c.params, b)?;
            if variant.is_some_and(|v| v != template.variant) {
                return Err(field(
                    "comparison.variant",
                    format!("{name} is a variant {} condition", template.variant),
                ));
            }
            template.into_spec(space, mapping)?
        }
    };

    match &raw.mapping.domain {
        None => Ok(spec),
        Some(parts) => {
            let intervals = parts
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    s.parse::<Interval>()
                        .map_err(|e| field(&format!("mapping.domain[{i}]"), e.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let domain =
                Domain::new(intervals).map_err(|e| field("mapping.domain", e.to_string()))?;
            Ok(spec.with_domain(domain))
        }
    }
}

fn build_diagnose(
    d: &DiagnoseSection,
    space: &SpaceDescriptor,
) -> Result<DiagnoseSettings, ConfigError> {
    let recipe_name = d.recipe.as_deref().unwrap_or("power-decay");
    let kind = match recipe_name {
        "power-decay" => SequenceKind::PowerDecay {
            exponent: d.exponent.unwrap_or(2.0),
        },
        "geometric-decay" => SequenceKind::GeometricDecay {
            ratio: d.ratio.unwrap_or(0.5),
        },
        "random-perturbation" => SequenceKind::RandomPerturbation {
            amplitude: d.amplitude.unwrap_or(1.0),
            exponent: d.exponent.unwrap_or(2.0),
            seed: d.seed.unwrap_or(0),
        },
        other => {
            return Err(field(
                "diagnose.recipe",
                format!("unknown recipe `{other}`, expected power-decay, geometric-decay or random-perturbation"),
            ))
        }
    };
    let direction = match &d.direction {
        Some(v) => vector(v, space, "diagnose.direction")?,
        None => space.constant(1.0),
    };
    let recipe = SequenceRecipe::new(kind, direction, d.length.unwrap_or(DEFAULT_LENGTH))
        .map_err(|e| field("diagnose", e.to_string()))?;
    let p =
        d.p.as_ref()
            .map(|p| vector(p, space, "diagnose.p"))
            .transpose()?;
    Ok(DiagnoseSettings {
        p,
        recipe,
        tol: d.tol.unwrap_or(DEFAULT_TOL),
    })
}

fn build(raw: RawConfig, ov: Overrides) -> Result<RunConfig, ConfigError> {
    let space = build_space(&raw.space, ov.grid)?;
    let spec = build_spec(&raw, space)?;
    let space = spec.space();

    let defaults = StopRule::default();
    let stop = StopRule {
        residual_tol: ov
            .tol
            .or(raw.solver.residual_tol)
            .unwrap_or(defaults.residual_tol),
        step_tol: raw.solver.step_tol.unwrap_or(defaults.step_tol),
        max_iters: ov
            .max_iters
            .or(raw.solver.max_iters)
            .unwrap_or(defaults.max_iters),
    };
    stop.validate()
        .map_err(|e| field("solver", e.to_string()))?;
    let samples = ov.samples.or(raw.solver.samples).unwrap_or(DEFAULT_SAMPLES);
    if samples == 0 {
        return Err(field("solver.samples", "must be at least 1"));
    }
    let u0 = match &raw.solver.u0 {
        Some(v) => vector(v, space, "solver.u0")?,
        None => space.zero(),
    };
    let diagnose = build_diagnose(&raw.diagnose, space)?;
    Ok(RunConfig {
        spec,
        u0,
        stop,
        samples,
        diagnose,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use enfix_core::registry;

    const EX36: &str = r#"
[space]
kind = "sampled-function"
left = 0.0
right = 1.0
points = 101

[mapping]
kind = "affine"
scale = -2.0
b = 1.25

[comparison]
family = "scaled-sum-st"
params = [0.3333333333333333]
variant = "A"

[solver]
u0 = 1.0
"#;

    const T2: &str = r#"
[space]
kind = "euclidean"

[mapping]
kind = "piecewise"
b = 0.3333333333333333

[[mapping.branches]]
interval = "(-inf, 1)"
scale = 0.0
shift = 16.0

[[mapping.branches]]
interval = "[1, 2]"
scale = 1.0
shift = 16.0

[[mapping.branches]]
interval = "(2, inf)"
scale = 0.0
shift = 16.0

[comparison]
family = "weighted-sum"
params = [0.3333333333333333, 0.25, 0.25]
variant = "A'"
"#;

    #[test]
    fn parses_registry_equivalents() {
        let cfg = parse(EX36, Overrides::default()).unwrap();
        assert_eq!(cfg.spec, registry::ex3_6(101).unwrap());
        assert_eq!(cfg.u0, cfg.spec.space().constant(1.0));
        assert_eq!(cfg.samples, DEFAULT_SAMPLES);

        let cfg = parse(T2, Overrides::default()).unwrap();
        assert_eq!(cfg.spec, registry::ex2_3_t2().unwrap());
        assert_eq!(cfg.u0, Vector::scalar(0.0));
    }

    #[test]
    fn overrides_win() {
        let ov = Overrides {
            tol: Some(1e-8),
            max_iters: Some(7),
            samples: Some(3),
            grid: Some(11),
        };
        let cfg = parse(EX36, ov).unwrap();
        assert_eq!(cfg.spec.space().dim(), 11);
        assert_eq!(
            (cfg.stop.residual_tol, cfg.stop.max_iters, cfg.samples),
            (1e-8, 7, 3)
        );
    }

    #[test]
    fn classic_conditions() {
        let text = EX36.replace(
            "family = \"scaled-sum-st\"\nparams = [0.3333333333333333]\nvariant = \"A\"",
            "classic = \"kannan\"\nparams = [0.6]",
        );
        assert!(matches!(
            parse(&text, Overrides::default()),
            Err(ConfigError::Spec(
                enfix_core::Error::InvalidCertificate { .. }
            ))
        ));
        let text = text.replace("[0.6]", "[0.3]");
        assert!(parse(&text, Overrides::default()).is_ok());
        let text = text.replace("params = [0.3]", "params = [0.3]\nvariant = \"A'\"");
        assert!(matches!(
            parse(&text, Overrides::default()),
            Err(ConfigError::Field { .. })
        ));
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad = [
            (EX36.replace("scale = -2.0", "scale = \"x\""), "scale"),
            (
                EX36.replace("kind = \"affine\"", "kind = \"spline\""),
                "mapping.kind",
            ),
            (EX36.replace("u0 = 1.0", "u0 = [1.0, 2.0]"), "solver.u0"),
            (
                EX36.replace("variant = \"A\"", "variant = \"B\""),
                "comparison.variant",
            ),
            (EX36.replace("[solver]", "[solver]\nspeed = 3"), "speed"),
            (
                T2.replace("\"[1, 2]\"", "\"[1, 2\""),
                "mapping.branches[1].interval",
            ),
        ];
        for (text, needle) in bad {
            let err = parse(&text, Overrides::default()).unwrap_err();
            assert!(!matches!(err, ConfigError::Spec(_)), "{err}");
            assert!(err.to_string().contains(needle), "{err} lacks {needle}");
        }
        let err = parse("[space\nkind = 1", Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn inadmissible_specs_are_spec_errors() {
        let text = EX36.replace("b = 1.25", "b = -1.0");
        assert!(matches!(
            parse(&text, Overrides::default()),
            Err(ConfigError::Spec(_))
        ));
        let text = T2.replace("\"(2, inf)\"", "\"(3, inf)\"");
        assert!(matches!(
            parse(&text, Overrides::default()),
            Err(ConfigError::Spec(_))
        ));
    }
}
