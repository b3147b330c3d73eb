use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use harcontam::inference::{dm_forecast_harness, dm_test_with, t_test_location, DmDesign, InferenceConfig};
use harcontam::io::read_columns;
use harcontam::lrv::block_length;
use harcontam::montecarlo::{
    builtin_experiment, compare_to_reference, reference_acf_table, reference_table, run_acf_comparison,
    run_experiment, BuiltinExperiment,
};
use harcontam::sls_models::{builtin_spec, d_star_true, simulate_path_with, BuiltinModel, Init};
use harcontam::spectral::{d_star_hat, dk_autocov, local_periodogram, periodogram, sample_autocov};
use harcontam::{Error, LrvMethod, Reference, Result, SlsSpec, TimeSeries};
use serde_json::json;

use crate::{gnuplot, DiagnoseArgs, DmtestArgs, Format, InitArg, KvbReference, LrvArgs, McArgs, SimulateArgs, TtestArgs};

/// 2 usage/lookup, 3 data, 4 numeric.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Lookup { .. } => 2,
        Error::Numeric(_) | Error::DegenerateVariance(_) | Error::UnsupportedModel(_) => 4,
        _ => 3,
    }
}

fn print(v: serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(&v).expect("json"));
}

fn read_series(path: &Path) -> Result<TimeSeries<f64>> {
    TimeSeries::read_csv(File::open(path)?)
}

fn load_spec(name: &str) -> Result<SlsSpec> {
    match builtin_spec(name) {
        Ok(BuiltinModel::Sls(spec)) => Ok(spec),
        Ok(BuiltinModel::Dm(_)) => Err(Error::Spec(format!("{name} is a forecast design; use `dmtest --design {name}`"))),
        Err(lookup) => {
            let path = Path::new(name);
            if path.exists() {
                SlsSpec::from_json(&fs::read_to_string(path)?)
            } else {
                Err(lookup)
            }
        }
    }
}

pub fn simulate(a: SimulateArgs) -> Result<()> {
    let spec = load_spec(&a.spec)?;
    let init = match a.init {
        InitArg::Stationary => Init::Stationary,
        InitArg::Zero => Init::Zero,
    };
    let y = simulate_path_with::<f64>(&spec, a.t_len, a.seed, init)?;
    y.write_csv(BufWriter::new(File::create(&a.output)?))?;
    let report = d_star_hat(&y, &spec.break_fractions(), 0)?;
    print(json!({
        "T": a.t_len,
        "seed": a.seed,
        "spec": spec.label,
        "regime_means": report.regime_means,
        "d_star_hat": report.d_hat,
        "d_star_true": d_star_true::<f64>(&spec)?,
        "output": a.output,
    }));
    Ok(())
}

pub fn diagnose(a: DiagnoseArgs) -> Result<()> {
    let y = read_series(&a.input)?;
    if a.breaks.iter().any(|&b| !(b > 0.0 && b < 1.0)) {
        return Err(Error::Domain(format!("break fractions {:?} must lie in (0, 1)", a.breaks)));
    }
    let n_t = a.n_t.unwrap_or_else(|| block_length(y.len()) & !1);
    fs::create_dir_all(&a.output)?;
    let global = sample_autocov(&y, a.max_lag, true)?;
    let dk = dk_autocov(&y, a.max_lag, n_t, n_t)?;
    let report = if a.breaks.is_empty() { None } else { Some(d_star_hat(&y, &a.breaks, a.max_lag)?) };

    let mut acf = String::from(if report.is_some() { "lag,global,dk,corrected\n" } else { "lag,global,dk\n" });
    for k in 0..=a.max_lag {
        let mut line = format!("{k},{},{}", fmt(global.values[k]), fmt(dk.values[k]));
        if let Some(r) = &report {
            line.push_str(&format!(",{}", fmt(r.corrected_acf.values[k])));
        }
        acf.push_str(&line);
        acf.push('\n');
    }
    let mut files = vec![write(&a.output, "acf.csv", &acf)?];
    files.push(write(&a.output, "periodogram.csv", &periodogram(&y).to_csv()?)?);
    for &u in &a.u {
        let lp = local_periodogram(&y, u, n_t)?;
        files.push(write(&a.output, &format!("local_periodogram_u{u}.csv"), &lp.to_csv()?)?);
    }
    write(&a.output, "acf.gp", gnuplot::ACF)?;
    write(&a.output, "periodogram.gp", gnuplot::PERIODOGRAM)?;
    if !a.u.is_empty() {
        write(&a.output, "local_periodogram.gp", gnuplot::LOCAL)?;
    }
    print(json!({
        "T": y.len(),
        "n_T": n_t,
        "dk_clamped_windows": dk.clamped_windows,
        "contamination": report.as_ref().map(|r| r.to_json()),
        "files": files,
    }));
    Ok(())
}

fn fmt(x: f64) -> String {
    harcontam::io::fmt_real(x)
}

fn write(dir: &Path, name: &str, body: &str) -> Result<String> {
    let path = dir.join(name);
    fs::write(&path, body)?;
    Ok(path.display().to_string())
}

pub fn lrv(a: LrvArgs) -> Result<()> {
    let method = LrvMethod::parse(&a.method)?;
    let y = read_series(&a.input)?;
    print(method.estimate(&y)?.to_json());
    Ok(())
}

pub fn ttest(a: TtestArgs) -> Result<()> {
    let method = LrvMethod::parse(&a.method)?;
    let y = read_series(&a.input)?;
    print(t_test_location(&y, a.beta0, method, a.level)?.to_json());
    Ok(())
}

pub fn dmtest(a: DmtestArgs) -> Result<()> {
    let method = LrvMethod::parse(&a.method)?;
    let (l1, l2) = match (&a.losses, &a.design) {
        (Some(path), _) => {
            let mut cols = read_columns(File::open(path)?, 2)?;
            let l2 = cols.pop().expect("two columns");
            (cols.pop().expect("two columns"), l2)
        }
        (None, Some(name)) => {
            let spec = builtin_spec(name)?
                .into_dm()
                .ok_or_else(|| Error::Spec(format!("{name} is not a forecast design (DM1..DM4)")))?;
            let design = if a.delta == 0.0 {
                DmDesign::null(a.t_len, spec)
            } else {
                DmDesign::alternative(a.t_len, spec, a.delta)
            };
            dm_forecast_harness::<f64>(&design, a.seed)?
        }
        (None, None) => return Err(Error::Domain("pass either --losses or --design".into())),
    };
    let cfg = InferenceConfig {
        dm_kvb_reference: match a.kvb_reference {
            KvbReference::FixedBSim => Reference::FixedBSim,
            KvbReference::StdNormal => Reference::StdNormal,
        },
        ..InferenceConfig::default()
    };
    let mut out = dm_test_with(&l1, &l2, method, a.level, &cfg)?.to_json();
    out["T_n"] = json!(l1.len());
    print(out);
    Ok(())
}

pub fn mc(a: McArgs) -> Result<()> {
    let exp = builtin_experiment(&a.table)?.with_reps_and_seed(a.reps, a.seed);
    match exp {
        BuiltinExperiment::Rejection(mut e) => {
            if !a.methods.is_empty() {
                e.methods = a.methods.iter().map(|m| LrvMethod::parse(m)).collect::<Result<_>>()?;
            }
            let table = run_experiment(&e, a.workers)?;
            let body = match a.format {
                Format::Csv => table.to_csv()?,
                Format::Json => serde_json::to_string_pretty(&table.to_json()).expect("json"),
            };
            fs::write(&a.output, body)?;
            let mut summary = json!({ "table": table.table, "reps": table.reps, "output": a.output });
            if let Some(path) = &a.compare {
                let reference = reference_table(&table.table)?;
                let report = compare_to_reference(&table, &reference, a.size_tol, a.power_tol)?;
                fs::write(path, serde_json::to_string_pretty(&report.to_json()).expect("json"))?;
                summary["cells_passed"] = json!(report.cells_passed());
                summary["cells"] = json!(report.cells.len());
                summary["patterns_passed"] = json!(report.patterns.iter().filter(|p| p.pass).count());
                summary["patterns"] = json!(report.patterns.len());
            }
            print(summary);
        }
        BuiltinExperiment::AcfComparison(e) => {
            let table = run_acf_comparison(&e, a.workers)?;
            let body = match a.format {
                Format::Csv => table.to_csv(),
                Format::Json => serde_json::to_string_pretty(&table.to_json()).expect("json"),
            };
            fs::write(&a.output, body)?;
            if let Some(path) = &a.compare {
                let reference = reference_acf_table()?;
                let v = json!({ "simulated": table.to_json(), "reference": reference });
                fs::write(path, serde_json::to_string_pretty(&v).expect("json"))?;
            }
            print(json!({ "table": "table1", "reps": table.reps, "d_hat_mean": table.d_hat_mean, "output": a.output }));
        }
    }
    Ok(())
}
