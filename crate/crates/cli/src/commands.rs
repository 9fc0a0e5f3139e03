use std::path::Path;

use grkhs::algorithms::{spline_worst_case_error_with, WorstCaseMethod};
use grkhs::complexity::{estimate_rate_values, ComplexityReport};
use grkhs::quadrature::MAX_TENSOR_DIM;
use grkhs::{
    error_sequence_all, initial_error, minimal_error_all, nystrom_eigs, top_n_tensor_eigenvalues, tractability_probe,
    Design, ShapeSequence, UnivariateSpectrum,
};

use crate::config::{ExperimentConfig, InfoClass};
use crate::output::{num, per_dimension_path, Sink};
use crate::CliError;

/// Default Nyström nodes per coordinate for spline errors.
pub fn default_spline_m(d: usize) -> usize {
    match d {
        1 => 80,
        2 => 30,
        3 => 12,
        _ => 7,
    }
}

fn all_class_only(cfg: &ExperimentConfig) -> Result<(), CliError> {
    if cfg.class == InfoClass::Std {
        return Err(CliError::Validation(format!(
            "{} is only available for class all; use spline-bench or decay --class std for function values",
            cfg.command
        )));
    }
    Ok(())
}

pub fn spectrum(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let m = cfg.m.unwrap_or(200);
    if cfg.k == 0 || cfg.k > m {
        return Err(CliError::Validation(format!("need 1 <= k <= m, got k={}, m={m}", cfg.k)));
    }
    let mut rows = Vec::new();
    for &g in &cfg.gamma {
        let s = UnivariateSpectrum::new(g)?;
        let ev = nystrom_eigs(g, m, cfg.k)?;
        for (i, v) in ev.iter().enumerate() {
            let exact = s.lambda(i + 1);
            rows.push(vec![
                num(g),
                (i + 1).to_string(),
                num(exact),
                num(*v),
                num((v - exact).abs() / exact),
            ]);
        }
    }
    let mut sink = Sink::open(cfg.output.as_deref())?;
    sink.header(cfg, &[("nystrom_nodes", m.to_string())])?;
    sink.table(&["gamma", "j", "lambda", "lambda_nystrom", "rel_error"], &rows)?;
    sink.finish()
}

pub fn eigs(cfg: &ExperimentConfig) -> Result<(), CliError> {
    all_class_only(cfg)?;
    let shape = cfg.single_shape()?;
    let d = cfg.single_d()?;
    let n = cfg.single_n()?;
    let list = top_n_tensor_eigenvalues(&shape, d, n)?;
    let rows: Vec<Vec<String>> = list
        .entries
        .iter()
        .enumerate()
        .map(|(r, e)| {
            let idx: Vec<String> = e.index.to_dense(d).iter().map(|j| j.to_string()).collect();
            vec![(r + 1).to_string(), num(e.value), num(e.log_value), idx.join(";")]
        })
        .collect();
    let mut sink = Sink::open(cfg.output.as_deref())?;
    sink.header(cfg, &[])?;
    sink.table(&["rank", "value", "log_value", "index"], &rows)?;
    sink.finish()
}

fn decay_values(cfg: &ExperimentConfig, shape: &ShapeSequence, d: usize) -> Result<Vec<f64>, CliError> {
    match cfg.class {
        InfoClass::All => Ok(error_sequence_all(shape, d, cfg.big_n)?.values),
        InfoClass::Std => {
            if d > MAX_TENSOR_DIM {
                return Err(CliError::Validation(format!(
                    "function-value errors need d <= {MAX_TENSOR_DIM}, got {d}"
                )));
            }
            // nested designs: the first n points of one seeded sample
            let m = cfg.m.unwrap_or_else(|| default_spline_m(d));
            let full = Design::random(d, cfg.big_n, cfg.seed)?;
            (0..=cfg.big_n)
                .map(|n| {
                    let design = Design::new(d, full.points()[..n].to_vec())?;
                    Ok(spline_worst_case_error_with(shape, d, &design, m, WorstCaseMethod::Spectral)?)
                })
                .collect()
        }
    }
}

pub fn decay(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let shape = cfg.single_shape()?;
    let provenance = match cfg.class {
        InfoClass::All => "all-exact",
        InfoClass::Std => "std-empirical",
    };
    let mut stdout_sink = None;
    for &d in &cfg.d {
        let values = decay_values(cfg, &shape, d)?;
        let init = initial_error(&shape, d)?;
        let rows: Vec<Vec<String>> = values
            .iter()
            .enumerate()
            .map(|(n, e)| vec![n.to_string(), num(*e), num(e / init)])
            .collect();
        let extra = [("d", d.to_string()), ("provenance", provenance.to_string())];
        let columns = ["n", "e_all", "e_all_over_init"];
        match &cfg.output {
            Some(base) => {
                let path = if cfg.d.len() == 1 {
                    base.clone()
                } else {
                    per_dimension_path(base, d)
                };
                let mut sink = Sink::open(Some(&path))?;
                sink.header(cfg, &extra)?;
                sink.table(&columns, &rows)?;
                sink.finish()?;
            }
            None => {
                let sink = match &mut stdout_sink {
                    Some(s) => s,
                    None => stdout_sink.insert(Sink::open(None)?),
                };
                sink.header(cfg, &extra)?;
                sink.table(&columns, &rows)?;
            }
        }
    }
    match stdout_sink {
        Some(s) => s.finish(),
        None => Ok(()),
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "none".into())
}

fn report_summary(r: &ComplexityReport) -> Vec<(&'static str, String)> {
    vec![
        ("p_hat", fmt_opt(r.p_hat)),
        ("p_hat_small_eps", fmt_opt(r.p_hat_small_eps)),
        ("q_hat", fmt_opt(r.q_hat)),
        ("fit_p", fmt_opt(r.fit.map(|f| f.p))),
        ("fit_q", fmt_opt(r.fit.map(|f| f.q))),
        ("fit_rel_rms_residual", fmt_opt(r.fit.map(|f| f.rel_rms_residual))),
        ("t_hat", fmt_opt(r.t_hat)),
        ("weak_ratio", fmt_opt(r.weak_ratio)),
        ("classification", r.classification.to_string()),
    ]
}

pub fn complexity(cfg: &ExperimentConfig) -> Result<(), CliError> {
    all_class_only(cfg)?;
    let shape = cfg.single_shape()?;
    let report = tractability_probe(&shape, &cfg.eps, &cfg.d, cfg.criterion)?;
    let rows: Vec<Vec<String>> = report
        .cells
        .iter()
        .map(|c| {
            let n = if c.lower_bound {
                format!(">={}", c.n)
            } else {
                c.n.to_string()
            };
            vec![c.d.to_string(), num(c.eps), n, cfg.criterion.to_string()]
        })
        .collect();
    let summary = report_summary(&report);
    let mut sink = Sink::open(cfg.output.as_deref())?;
    sink.header(cfg, &summary)?;
    sink.table(&["d", "eps", "n", "criterion"], &rows)?;
    sink.finish()?;
    if let Some(path) = &cfg.report {
        write_json(path, &report)?;
    }
    for (k, v) in summary {
        eprintln!("{k}: {v}");
    }
    let bounded = report.cells.iter().filter(|c| c.lower_bound).count();
    if bounded > 0 {
        return Err(CliError::Resource(format!(
            "{bounded} cell(s) hit the enumeration guard and are lower bounds"
        )));
    }
    Ok(())
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn rates(cfg: &ExperimentConfig) -> Result<(), CliError> {
    all_class_only(cfg)?;
    let [lo, hi] = cfg.window;
    if hi > cfg.big_n {
        return Err(CliError::Validation(format!(
            "window end {hi} exceeds N = {}",
            cfg.big_n
        )));
    }
    let mut rows = Vec::new();
    for (name, shape) in cfg.shape.iter().zip(cfg.shapes()?) {
        for &d in &cfg.d {
            let seq = error_sequence_all(&shape, d, cfg.big_n)?;
            let r = estimate_rate_values(&seq.values, lo, hi)?;
            rows.push(vec![
                name.clone(),
                d.to_string(),
                lo.to_string(),
                hi.to_string(),
                num(r.rate),
                (r.superpolynomial as u8).to_string(),
            ]);
        }
    }
    let mut sink = Sink::open(cfg.output.as_deref())?;
    sink.header(cfg, &[])?;
    sink.table(&["shape", "d", "window_lo", "window_hi", "rate", "superpoly_flag"], &rows)?;
    sink.finish()
}

fn read_design(path: &Path) -> Result<Design, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Validation(format!("cannot read design {}: {e}", path.display())))?;
    let mut points = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| CliError::Validation(format!("bad design row: {e}")))?;
        let p = rec
            .iter()
            .map(|v| v.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Validation(format!("bad design value: {e}")))?;
        points.push(p);
    }
    let dim = points
        .first()
        .map(Vec::len)
        .ok_or_else(|| CliError::Validation(format!("design file {} is empty", path.display())))?;
    Ok(Design::new(dim, points)?)
}

pub fn spline_bench(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let shape = cfg.single_shape()?;
    let mut rows = Vec::new();
    let mut push = |d: usize, design: &Design, label: String, seed: String| -> Result<(), CliError> {
        let m = cfg.m.unwrap_or_else(|| default_spline_m(d));
        let n = design.len();
        let e_std = spline_worst_case_error_with(&shape, d, design, m, WorstCaseMethod::Spectral)?;
        let e_all = minimal_error_all(&shape, d, n)?;
        rows.push(vec![
            d.to_string(),
            n.to_string(),
            label,
            seed,
            m.to_string(),
            num(e_std),
            num(e_all),
            num(e_std / e_all),
        ]);
        Ok(())
    };
    match &cfg.design_file {
        Some(path) => {
            let design = read_design(path)?;
            push(design.dim(), &design, path.display().to_string(), String::new())?;
        }
        None => {
            for &d in &cfg.d {
                for &n in &cfg.n {
                    for k in 0..cfg.designs {
                        let seed = cfg
                            .seed
                            .wrapping_add((d as u64) << 40)
                            .wrapping_add((n as u64) << 20)
                            .wrapping_add(k as u64);
                        let design = Design::random(d, n, seed)?;
                        push(d, &design, k.to_string(), seed.to_string())?;
                    }
                }
            }
        }
    }
    let mut sink = Sink::open(cfg.output.as_deref())?;
    sink.header(cfg, &[])?;
    sink.table(
        &["d", "n", "design", "design_seed", "m", "e_std_spline", "e_all", "ratio"],
        &rows,
    )?;
    sink.finish()
}

pub fn verify(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let outcomes = grkhs::verify::run_all();
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let mut text = String::new();
    for o in &outcomes {
        text.push_str(&o.to_string());
        text.push('\n');
    }
    text.push_str(&format!(
        "{} of {} checks passed\n",
        outcomes.len() - failed,
        outcomes.len()
    ));
    let mut sink = Sink::open(None)?;
    sink.write_raw(&text)?;
    sink.finish()?;
    if let Some(path) = &cfg.output {
        let rows: Vec<Vec<String>> = outcomes
            .iter()
            .map(|o| vec![o.id.to_string(), o.name.clone(), (o.passed as u8).to_string(), o.detail.clone()])
            .collect();
        let mut sink = Sink::open(Some(path))?;
        sink.header(cfg, &[])?;
        sink.table(&["id", "check", "passed", "detail"], &rows)?;
        sink.finish()?;
    }
    if failed > 0 {
        return Err(CliError::Verification(format!("{failed} check(s) failed")));
    }
    Ok(())
}
