//! Seeded, parallel size/power experiments.
//!
//! Replication `r` draws from `replication_seed(base_seed, r)`, so a table is
//! a pure function of the experiment and does not depend on the worker count.

mod acf;
mod builtin;
mod compare;
mod table;

pub use acf::{run_acf_comparison, AcfExperiment, AcfRow, AcfTable};
pub use builtin::{builtin_experiment, BuiltinExperiment, BUILTIN_EXPERIMENTS};
pub use compare::{compare_to_reference, CellCheck, ComparisonReport, PatternCheck};
pub use table::{reference_acf_table, reference_table, Cell, ExperimentTable, MethodRow, REFERENCE_REPS};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::inference::{critical_value, dm_forecast_harness, dm_reference, studentize, DmDesign, InferenceConfig};
use crate::lrv::LrvMethod;
use crate::rng::replication_seed;
use crate::sls_models::{simulate_path, DmSpecification, SlsSpec, TimeSeries};

/// Data-generating side of an experiment.
#[derive(Clone, Debug, PartialEq)]
pub enum Dgp {
    /// Location t-test on `y_t = δ + V_t`, `H₀: E y = 0`.
    Location(SlsSpec),
    /// Forecast comparison; `δ = 0` runs the null design.
    Forecast(DmSpecification),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub name: String,
    pub dgp: Dgp,
    pub methods: Vec<LrvMethod>,
    pub delta_grid: Vec<f64>,
    pub t_len: usize,
    pub level: f64,
    pub reps: usize,
    pub base_seed: u64,
    pub inference: InferenceConfig,
}

impl Experiment {
    pub fn validate(&self) -> Result<()> {
        if self.reps < 100 {
            return Err(Error::Domain(format!("reps = {} is below the minimum of 100", self.reps)));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::Domain(format!("level = {} must lie in (0, 1)", self.level)));
        }
        if self.delta_grid.is_empty() || self.methods.is_empty() {
            return Err(Error::Domain("delta grid and method list must be nonempty".into()));
        }
        if self.delta_grid.iter().any(|d| !d.is_finite()) {
            return Err(Error::Domain("delta grid contains a non-finite value".into()));
        }
        match &self.dgp {
            Dgp::Location(spec) => spec.validate(),
            Dgp::Forecast(s) => DmDesign::null(self.t_len, *s).validate(),
        }
    }

    /// Length of the series each LRV estimator sees.
    pub fn statistic_length(&self) -> usize {
        match &self.dgp {
            Dgp::Location(_) => self.t_len,
            Dgp::Forecast(s) => DmDesign::null(self.t_len, *s).n_losses(),
        }
    }

    fn design(&self, spec: DmSpecification, delta: f64) -> DmDesign {
        if delta == 0.0 {
            DmDesign::null(self.t_len, spec)
        } else {
            DmDesign::alternative(self.t_len, spec, delta)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Outcome {
    Accept,
    Reject,
    Degenerate,
    Failed,
}

fn classify(err: &Error) -> Outcome {
    match err {
        Error::DegenerateVariance(_) => Outcome::Degenerate,
        _ => Outcome::Failed,
    }
}

fn decide(stat: Result<f64>, cv: f64) -> Outcome {
    match stat {
        Ok(t) if t.abs() > cv => Outcome::Reject,
        Ok(_) => Outcome::Accept,
        Err(e) => classify(&e),
    }
}

/// One replication; outcomes are laid out method-major, `m·n_delta + d`.
fn replicate(exp: &Experiment, cvs: &[f64], seed: u64) -> Vec<Outcome> {
    let nd = exp.delta_grid.len();
    let mut out = vec![Outcome::Failed; exp.methods.len() * nd];
    match &exp.dgp {
        Dgp::Location(spec) => {
            let v = match simulate_path::<f64>(spec, exp.t_len, seed) {
                Ok(v) => v,
                Err(_) => return out,
            };
            let vbar = v.mean();
            for (m, method) in exp.methods.iter().enumerate() {
                // Every estimator is location invariant, so one LRV serves all δ.
                match method.estimate(&v) {
                    Ok(est) => {
                        for (d, &delta) in exp.delta_grid.iter().enumerate() {
                            out[m * nd + d] = decide(studentize(vbar + delta, exp.t_len, est.value), cvs[m]);
                        }
                    }
                    Err(e) => out[m * nd..(m + 1) * nd].fill(classify(&e)),
                }
            }
        }
        Dgp::Forecast(spec) => {
            // Same seed for every δ: common random numbers across the grid.
            for (d, &delta) in exp.delta_grid.iter().enumerate() {
                let (l1, l2) = match dm_forecast_harness::<f64>(&exp.design(*spec, delta), seed) {
                    Ok(l) => l,
                    Err(_) => continue,
                };
                let diff: Vec<f64> = l2.iter().zip(&l1).map(|(b, a)| b - a).collect();
                let series = TimeSeries::new(diff);
                for (m, method) in exp.methods.iter().enumerate() {
                    let stat = series.as_ref().map_err(|_| Error::DegenerateVariance(0.0)).and_then(|s| {
                        let est = method.estimate(s)?;
                        studentize(s.mean(), s.len(), est.value)
                    });
                    out[m * nd + d] = decide(stat, cvs[m]);
                }
            }
        }
    }
    out
}

/// Share of non-degenerate failures above which a cell is reported as NaN.
pub const MAX_FAILURE_SHARE: f64 = 0.01;

/// Runs every replication on a pool of `workers` threads and tallies rejections.
pub fn run_experiment(exp: &Experiment, workers: usize) -> Result<ExperimentTable> {
    exp.validate()?;
    let n = exp.statistic_length();
    let cvs = exp
        .methods
        .iter()
        .map(|m| {
            let reference = match exp.dgp {
                Dgp::Location(_) => m.reference(n),
                Dgp::Forecast(_) => dm_reference(*m, n, &exp.inference),
            };
            critical_value(reference, exp.level, &exp.inference.fixed_b)
        })
        .collect::<Result<Vec<_>>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Numeric(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<Vec<Outcome>> = pool.install(|| {
        (0..exp.reps)
            .into_par_iter()
            .map(|r| replicate(exp, &cvs, replication_seed(exp.base_seed, r as u64)))
            .collect()
    });

    let nd = exp.delta_grid.len();
    let rows = exp
        .methods
        .iter()
        .enumerate()
        .map(|(m, method)| {
            let cells = exp
                .delta_grid
                .iter()
                .enumerate()
                .map(|(d, &delta)| {
                    let (mut rej, mut degenerate, mut failures) = (0usize, 0usize, 0usize);
                    for rep in &outcomes {
                        match rep[m * nd + d] {
                            Outcome::Reject => rej += 1,
                            Outcome::Degenerate => degenerate += 1,
                            Outcome::Failed => failures += 1,
                            Outcome::Accept => {}
                        }
                    }
                    let mut cell = Cell::from_counts(delta, rej, exp.reps);
                    cell.degenerate = degenerate;
                    cell.failures = failures;
                    if failures as f64 > MAX_FAILURE_SHARE * exp.reps as f64 {
                        cell.reject_rate = f64::NAN;
                        cell.mc_se = f64::NAN;
                    }
                    cell
                })
                .collect();
            MethodRow { method: method.label(), cells }
        })
        .collect();
    Ok(ExperimentTable {
        table: exp.name.clone(),
        rows,
        reps: exp.reps,
        base_seed: exp.base_seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sls_models::ParamFn;

    fn iid_experiment(reps: usize) -> Experiment {
        Experiment {
            name: "iid".into(),
            dgp: Dgp::Location(SlsSpec::single(
                "iid",
                ParamFn::constant(0.0),
                ParamFn::constant(0.0),
                ParamFn::constant(1.0),
            )),
            methods: vec![LrvMethod::Nw87, LrvMethod::A91, LrvMethod::Ewc(None)],
            delta_grid: vec![0.0, 0.3],
            t_len: 200,
            level: 0.05,
            reps,
            base_seed: 11,
            inference: InferenceConfig::default(),
        }
    }

    #[test]
    fn iid_size_is_calibrated() {
        let t = run_experiment(&iid_experiment(2000), 4).unwrap();
        for row in &t.rows {
            let size = &row.cells[0];
            assert!((size.reject_rate - 0.05).abs() < 3.0 * size.mc_se + 0.01, "{}: {:?}", row.method, size);
            assert!(row.cells[1].reject_rate > 0.9);
        }
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let e = iid_experiment(150);
        let a = run_experiment(&e, 1).unwrap().to_csv().unwrap();
        let b = run_experiment(&e, 5).unwrap().to_csv().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_experiments() {
        let mut e = iid_experiment(99);
        assert!(run_experiment(&e, 1).is_err());
        e.reps = 100;
        e.delta_grid.clear();
        assert!(run_experiment(&e, 1).is_err());
    }
}
