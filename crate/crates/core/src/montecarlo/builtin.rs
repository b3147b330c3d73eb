use super::acf::AcfExperiment;
use super::{Dgp, Experiment};
use crate::error::{Error, Result};
use crate::inference::InferenceConfig;
use crate::lrv::LrvMethod;
use crate::sls_models::{builtin_spec, DmSpecification};

pub const BUILTIN_EXPERIMENTS: [&str; 9] = [
    "table1", "table2", "table3", "table4", "table5", "table6_1", "table6_2", "table6_3", "table6_4",
];

const DEFAULT_REPS: usize = 2000;
const DEFAULT_SEED: u64 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum BuiltinExperiment {
    Rejection(Experiment),
    AcfComparison(AcfExperiment),
}

impl BuiltinExperiment {
    pub fn into_rejection(self) -> Option<Experiment> {
        match self {
            BuiltinExperiment::Rejection(e) => Some(e),
            BuiltinExperiment::AcfComparison(_) => None,
        }
    }

    pub fn with_reps_and_seed(self, reps: Option<usize>, seed: Option<u64>) -> Self {
        match self {
            BuiltinExperiment::Rejection(mut e) => {
                e.reps = reps.unwrap_or(e.reps);
                e.base_seed = seed.unwrap_or(e.base_seed);
                BuiltinExperiment::Rejection(e)
            }
            BuiltinExperiment::AcfComparison(mut e) => {
                e.reps = reps.unwrap_or(e.reps);
                e.base_seed = seed.unwrap_or(e.base_seed);
                BuiltinExperiment::AcfComparison(e)
            }
        }
    }
}

fn location(name: &str, model: &str, deltas: &[f64]) -> Result<BuiltinExperiment> {
    let spec = builtin_spec(model)?.into_sls().expect("location models are SLS specs");
    Ok(BuiltinExperiment::Rejection(Experiment {
        name: name.into(),
        dgp: Dgp::Location(spec),
        methods: LrvMethod::standard_set(),
        delta_grid: deltas.to_vec(),
        t_len: 200,
        level: 0.05,
        reps: DEFAULT_REPS,
        base_seed: DEFAULT_SEED,
        inference: InferenceConfig::default(),
    }))
}

fn forecast(name: &str, spec: DmSpecification, t_len: usize, deltas: &[f64]) -> BuiltinExperiment {
    BuiltinExperiment::Rejection(Experiment {
        name: name.into(),
        dgp: Dgp::Forecast(spec),
        methods: LrvMethod::standard_set(),
        delta_grid: deltas.to_vec(),
        t_len,
        level: 0.05,
        reps: DEFAULT_REPS,
        base_seed: DEFAULT_SEED,
        inference: InferenceConfig::default(),
    })
}

/// Configuration of a named table. Names are case-insensitive.
pub fn builtin_experiment(name: &str) -> Result<BuiltinExperiment> {
    let key = name.to_ascii_lowercase();
    match key.as_str() {
        "table1" => {
            let spec = builtin_spec("M1")?.into_sls().expect("M1 is an SLS spec");
            Ok(BuiltinExperiment::AcfComparison(AcfExperiment {
                breaks: spec.break_fractions(),
                spec,
                t_len: 200,
                reps: 5000,
                base_seed: DEFAULT_SEED,
                lags: vec![0, 1, 2, 5, 10],
            }))
        }
        "table2" => location(&key, "M1", &[0.0, 0.05, 0.1, 0.15, 0.25, 1.0, 1.5]),
        "table3" => location(&key, "M2", &[0.0, 0.15, 0.2, 0.25, 0.3, 0.5]),
        "table4" => location(&key, "M3", &[0.0, 0.1, 0.15, 0.2, 0.25]),
        "table5" => location(&key, "M4", &[0.0, 0.1, 0.15, 0.2, 0.25, 0.5]),
        "table6_1" => Ok(forecast(&key, DmSpecification::Break, 200, &[0.0, 0.2, 0.5, 2.0, 5.0, 10.0])),
        "table6_2" => Ok(forecast(&key, DmSpecification::LocalSine, 200, &[0.2, 0.5, 2.0, 5.0, 10.0])),
        "table6_3" => Ok(forecast(&key, DmSpecification::LocalSineStraddle, 200, &[0.2, 1.0, 2.0, 5.0, 10.0])),
        "table6_4" => Ok(forecast(&key, DmSpecification::LocalSineOutliers, 400, &[0.5, 1.0, 2.0, 5.0, 10.0])),
        _ => Err(Error::Lookup { kind: "experiment", name: name.into(), valid: BUILTIN_EXPERIMENTS.join(", ") }),
    }
}
