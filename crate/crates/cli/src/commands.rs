//! Subcommand implementations.

use std::fmt::Write as _;
use std::path::Path;

use saferisk_core::datamodel::{
    catalog_to_csv, generate_demo_matrix, matrix_to_csv, parse_catalog, parse_report_matrix,
    AttributeCatalog, ReportMatrix, SeverityScale, ZeroRowPolicy,
};
use saferisk_core::demo::demo_catalog;
use saferisk_core::density::{density_grid, KdeModel, Support, DEFAULT_GRID_POINTS};
use saferisk_core::quantiles::{
    build_ranges, classify, empirical_quantile, escalation_estimate, EscalationQuery, RangeLabel,
    RANGE_QUANTILES,
};
use saferisk_core::riskcore::{catalog_relative_risks, report_risks, Basis, RiskSample};
use saferisk_core::simgen::{
    smoothed_bootstrap_biv, smoothed_bootstrap_uni, GeneratorConfig, RiskPairSample,
};
use saferisk_core::{Result, RiskError};

use crate::ioutil::{write_output, ConfigDefaults, NumericCsv, Provenance};
use crate::{BasisArg, Command, ModeArg, NegativesArg, PseudoArg, SupportArg};

pub fn run(config: Option<&Path>, command: Command) -> Result<()> {
    let defaults = ConfigDefaults::load(config)?;
    match command {
        Command::Attributes { catalog, out } => cmd_attributes(&catalog, &out),
        Command::Reports {
            catalog,
            matrix,
            strict,
            out,
        } => cmd_reports(&defaults, &catalog, &matrix, strict, &out),
        Command::Simulate {
            catalog,
            matrix,
            mode,
            basis,
            n_sim,
            seed,
            streams,
            negatives,
            pseudo,
            strict,
            out,
        } => cmd_simulate(
            &defaults, &catalog, &matrix, mode, basis, n_sim, seed, streams, negatives, pseudo,
            strict, &out,
        ),
        Command::Density {
            values,
            column,
            corrected,
            support,
            lo,
            hi,
            points,
            bins,
            out,
        } => cmd_density(
            &defaults,
            &values,
            column.as_deref(),
            corrected,
            support,
            lo,
            hi,
            points,
            bins,
            &out,
        ),
        Command::Ranges {
            values,
            column,
            basis,
            quantiles,
            out,
        } => cmd_ranges(&defaults, &values, column.as_deref(), basis, quantiles, &out),
        Command::Escalate {
            catalog,
            pairs,
            attributes,
            window_lo,
            window_hi,
            threshold,
            min_support,
            out,
        } => cmd_escalate(
            &defaults,
            &catalog,
            &pairs,
            &attributes,
            window_lo,
            window_hi,
            threshold,
            min_support,
            out.as_deref(),
        ),
        Command::DemoData {
            out_catalog,
            out_matrix,
            n_reports,
            seed,
        } => cmd_demo_data(&defaults, &out_catalog, out_matrix.as_deref(), n_reports, seed),
    }
}

fn load_catalog(path: &Path) -> Result<AttributeCatalog> {
    parse_catalog(path, &SeverityScale::default())
}

fn load_matrix(
    path: &Path,
    catalog: &AttributeCatalog,
    strict: bool,
) -> Result<ReportMatrix> {
    let policy = if strict {
        ZeroRowPolicy::Strict
    } else {
        ZeroRowPolicy::Drop
    };
    let (matrix, dropped) = parse_report_matrix(path, catalog, policy)?;
    if dropped > 0 {
        eprintln!("warning: dropped {dropped} reports with no attributes");
    }
    Ok(matrix)
}

fn cmd_attributes(catalog_path: &Path, out: &Path) -> Result<()> {
    let catalog = load_catalog(catalog_path)?;
    let real = catalog_relative_risks(&catalog, Basis::Real);
    let worst = catalog_relative_risks(&catalog, Basis::Worst);

    let mut body = String::from("name,rr_real,rr_worst,delta\n");
    let rounded_real = real.display_values();
    let rounded_worst = worst.display_values();
    for (i, name) in real.names().iter().enumerate() {
        let delta = worst.values()[i] - real.values()[i];
        let _ = writeln!(
            body,
            "{},{},{},{}",
            name, rounded_real[i], rounded_worst[i], delta
        );
    }

    let provenance = Provenance::new("attributes").input("catalog", catalog_path)?;
    write_output(out, &provenance, &body)?;
    eprintln!("wrote {} ({} attributes)", out.display(), catalog.len());
    Ok(())
}

fn risk_pair_columns(real: &RiskSample, worst: &RiskSample) -> Result<RiskPairSample> {
    RiskPairSample::from_margins(real.values(), worst.values())
}

fn cmd_reports(
    defaults: &ConfigDefaults,
    catalog_path: &Path,
    matrix_path: &Path,
    strict: bool,
    out: &Path,
) -> Result<()> {
    let strict = strict || defaults.get::<bool>("strict")?.unwrap_or(false);
    let catalog = load_catalog(catalog_path)?;
    let matrix = load_matrix(matrix_path, &catalog, strict)?;
    let real = report_risks(&matrix, &catalog_relative_risks(&catalog, Basis::Real))?;
    let worst = report_risks(&matrix, &catalog_relative_risks(&catalog, Basis::Worst))?;

    let mut body = String::from("report_index,risk_real,risk_worst\n");
    for (i, (r, w)) in real.values().iter().zip(worst.values()).enumerate() {
        let _ = writeln!(body, "{i},{r},{w}");
    }

    let provenance = Provenance::new("reports")
        .setting("strict", strict)
        .input("catalog", catalog_path)?
        .input("matrix", matrix_path)?;
    write_output(out, &provenance, &body)?;
    eprintln!("wrote {} ({} reports)", out.display(), real.len());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    defaults: &ConfigDefaults,
    catalog_path: &Path,
    matrix_path: &Path,
    mode: ModeArg,
    basis: Option<BasisArg>,
    n_sim: Option<usize>,
    seed: Option<u64>,
    streams: Option<usize>,
    negatives: NegativesArg,
    pseudo: PseudoArg,
    strict: bool,
    out: &Path,
) -> Result<()> {
    let n_sim = defaults.resolve(n_sim, "n-sim", 100_000)?;
    let seed = defaults.resolve(seed, "seed", 0)?;
    let streams = defaults.resolve(streams, "streams", 1)?;
    let basis: Basis = defaults.resolve(basis, "basis", BasisArg::Real)?.into();
    let strict = strict || defaults.get::<bool>("strict")?.unwrap_or(false);

    let catalog = load_catalog(catalog_path)?;
    let matrix = load_matrix(matrix_path, &catalog, strict)?;
    let cfg = GeneratorConfig {
        n_sim,
        seed,
        negatives: negatives.into(),
        streams,
    };

    let (mode_name, body) = match mode {
        ModeArg::Uni => {
            let risks = report_risks(&matrix, &catalog_relative_risks(&catalog, basis))?;
            let sim = smoothed_bootstrap_uni(risks.values(), &cfg)?;
            let mut body = String::from("sim_value\n");
            for v in &sim {
                let _ = writeln!(body, "{v}");
            }
            ("uni", body)
        }
        ModeArg::Biv => {
            let real = report_risks(&matrix, &catalog_relative_risks(&catalog, Basis::Real))?;
            let worst = report_risks(&matrix, &catalog_relative_risks(&catalog, Basis::Worst))?;
            let pairs = risk_pair_columns(&real, &worst)?;
            let sim = smoothed_bootstrap_biv(&pairs, &cfg)?;
            let pseudo_pairs = match pseudo {
                PseudoArg::NormalCdf => sim.pseudo_normal(),
                PseudoArg::Rank => sim.pseudo_rank(),
            };
            let mut body = String::from("x_sim,y_sim,u,v\n");
            for ((x, y), (u, v)) in sim.pairs().iter().zip(&pseudo_pairs) {
                let _ = writeln!(body, "{x},{y},{u},{v}");
            }
            ("biv", body)
        }
    };

    let mut provenance = Provenance::new("simulate")
        .setting("mode", mode_name)
        .setting("n-sim", n_sim)
        .setting("seed", seed)
        .setting("streams", streams)
        .setting(
            "negatives",
            match negatives {
                NegativesArg::Reject => "reject",
                NegativesArg::Keep => "keep",
            },
        );
    if matches!(mode, ModeArg::Uni) {
        provenance = provenance.setting("basis", basis);
    } else {
        provenance = provenance.setting(
            "pseudo",
            match pseudo {
                PseudoArg::NormalCdf => "normal-cdf",
                PseudoArg::Rank => "rank",
            },
        );
    }
    let provenance = provenance
        .input("catalog", catalog_path)?
        .input("matrix", matrix_path)?;
    write_output(out, &provenance, &body)?;
    eprintln!("wrote {} ({} simulated draws)", out.display(), n_sim);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_density(
    defaults: &ConfigDefaults,
    values_path: &Path,
    column: Option<&str>,
    corrected: bool,
    support: Option<SupportArg>,
    lo: Option<f64>,
    hi: Option<f64>,
    points: Option<usize>,
    bins: Option<usize>,
    out: &Path,
) -> Result<()> {
    let points = defaults.resolve(points, "points", DEFAULT_GRID_POINTS)?;
    let sample =
        NumericCsv::read(values_path)?.pick_column(column, &["sim_value", "value", "risk"])?;

    if let Some(bins) = bins {
        let body = histogram_csv(&sample, bins)?;
        let provenance = Provenance::new("density")
            .setting("bins", bins)
            .input("values", values_path)?;
        write_output(out, &provenance, &body)?;
        eprintln!("wrote {} ({} bins)", out.display(), bins);
        return Ok(());
    }

    let support = match (corrected, support) {
        (_, Some(SupportArg::Real)) => Support::RealLine,
        (_, Some(SupportArg::Nonneg)) => Support::NonnegHalfLine,
        (_, Some(SupportArg::Unit)) => Support::UnitInterval,
        // risk data lives on the half line; plain estimation needs the real line
        (true, None) => Support::NonnegHalfLine,
        (false, None) => Support::RealLine,
    };
    let model = KdeModel::fit(&sample, support)?;
    let (default_lo, default_hi) = model.default_grid_range();
    let lo = lo.unwrap_or(default_lo);
    let hi = hi.unwrap_or(default_hi);
    let grid = density_grid(&model, lo, hi, points, corrected)?;

    let mut body = String::from("x,density\n");
    for (x, f) in grid.points() {
        let _ = writeln!(body, "{x},{f}");
    }
    let provenance = Provenance::new("density")
        .setting("corrected", corrected)
        .setting("support", support)
        .setting("lo", lo)
        .setting("hi", hi)
        .setting("points", points)
        .setting("bandwidth", model.bandwidth())
        .input("values", values_path)?;
    write_output(out, &provenance, &body)?;
    eprintln!("wrote {} ({} grid points)", out.display(), points);
    Ok(())
}

fn histogram_csv(sample: &[f64], bins: usize) -> Result<String> {
    if bins == 0 {
        return Err(RiskError::Domain("bins must be at least 1".into()));
    }
    let min = sample.iter().copied().fold(f64::INFINITY, f64::min);
    let max = sample.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return Err(RiskError::Domain(
            "histogram of a constant sample is degenerate".into(),
        ));
    }
    let width = (max - min) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in sample {
        let k = (((x - min) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let mut body = String::from("bin_lo,bin_hi,count\n");
    for (k, c) in counts.iter().enumerate() {
        let lo = min + width * k as f64;
        let hi = if k + 1 == bins { max } else { min + width * (k + 1) as f64 };
        let _ = writeln!(body, "{lo},{hi},{c}");
    }
    Ok(body)
}

fn cmd_ranges(
    defaults: &ConfigDefaults,
    values_path: &Path,
    column: Option<&str>,
    basis: Option<BasisArg>,
    quantiles: Option<String>,
    out: &Path,
) -> Result<()> {
    let basis: Basis = defaults.resolve(basis, "basis", BasisArg::Real)?.into();
    let extra_spec = match quantiles {
        Some(q) => Some(q),
        None => defaults.get::<String>("quantiles")?,
    };
    let basis_column = format!("risk_{basis}");
    let sample = NumericCsv::read(values_path)?
        .pick_column(column, &["sim_value", &basis_column, "value", "risk"])?;
    let ranges = build_ranges(&sample, basis)?;

    let mut body = String::from("quantile,value,label\n");
    for (k, (&p, &v)) in RANGE_QUANTILES
        .iter()
        .zip(ranges.breakpoints())
        .enumerate()
    {
        let label = if k < RangeLabel::ALL.len() {
            RangeLabel::ALL[k].to_string()
        } else {
            String::new()
        };
        let _ = writeln!(body, "{p},{v},{label}");
    }
    if let Some(spec) = &extra_spec {
        for part in spec.split(',') {
            let p: f64 = part.trim().parse().map_err(|_| {
                RiskError::Validation(format!("bad quantile level '{part}'"))
            })?;
            let v = empirical_quantile(&sample, p)?;
            let _ = writeln!(body, "{p},{v},");
        }
    }

    let mut provenance = Provenance::new("ranges").setting("basis", basis);
    if let Some(spec) = extra_spec {
        provenance = provenance.setting("quantiles", spec);
    }
    let provenance = provenance.input("values", values_path)?;
    write_output(out, &provenance, &body)?;
    eprintln!("wrote {}", out.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_escalate(
    defaults: &ConfigDefaults,
    catalog_path: &Path,
    pairs_path: &Path,
    attributes: &str,
    window_lo: Option<f64>,
    window_hi: Option<f64>,
    threshold: Option<f64>,
    min_support: Option<usize>,
    out: Option<&Path>,
) -> Result<()> {
    let names: Vec<&str> = attributes
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        return Err(RiskError::Validation(
            "no attribute names given; pass --attributes 'a,b,...'".into(),
        ));
    }

    let catalog = load_catalog(catalog_path)?;
    let rr = catalog_relative_risks(&catalog, Basis::Real);
    let rounded = rr.display_values();
    let mut unknown = Vec::new();
    let mut x0 = 0.0;
    for name in &names {
        match rr.names().iter().position(|n| n == name) {
            Some(i) => x0 += rounded[i] as f64,
            None => unknown.push(*name),
        }
    }
    if !unknown.is_empty() {
        return Err(RiskError::Validation(format!(
            "unknown attribute names: {}",
            unknown.join(", ")
        )));
    }

    let csv = NumericCsv::read(pairs_path)?;
    let xs = csv.column("x_sim")?;
    let ys = csv.column("y_sim")?;
    let pairs = RiskPairSample::from_margins(&xs, &ys)?;
    let real_ranges = build_ranges(&xs, Basis::Real)?;
    let worst_ranges = build_ranges(&ys, Basis::Worst)?;

    let query = EscalationQuery {
        x0,
        window_lo: defaults.resolve(window_lo, "window-lo", 5.0)?,
        window_hi: defaults.resolve(window_hi, "window-hi", 5.0)?,
        threshold: defaults.resolve(threshold, "threshold", 0.8)?,
        min_support: defaults.resolve(min_support, "min-support", 30)?,
    };
    let estimate = escalation_estimate(&pairs, &query, &worst_ranges)?;
    let x0_label = classify(x0, &real_ranges);

    let mut report = String::new();
    let _ = writeln!(report, "attributes: {}", names.join(", "));
    let _ = writeln!(report, "risk based on real outcomes (x0): {x0} [{x0_label}]");
    let _ = writeln!(
        report,
        "conditional quantile Q({}) of worst-outcome risk: {:.1} [{}]",
        query.threshold, estimate.value, estimate.label
    );
    let _ = writeln!(report, "supporting pairs: {}", estimate.support);

    if let Some(out) = out {
        let mut body = String::from("x0,x0_label,threshold,quantile_value,quantile_label,support\n");
        let _ = writeln!(
            body,
            "{},{},{},{},{},{}",
            x0, x0_label, query.threshold, estimate.value, estimate.label, estimate.support
        );
        let provenance = Provenance::new("escalate")
            .setting("attributes", names.join("|"))
            .setting("window-lo", query.window_lo)
            .setting("window-hi", query.window_hi)
            .setting("threshold", query.threshold)
            .setting("min-support", query.min_support)
            .input("catalog", catalog_path)?
            .input("pairs", pairs_path)?;
        write_output(out, &provenance, &body)?;
        eprintln!("wrote {}", out.display());
    }
    crate::ioutil::print_stdout(&report)?;
    Ok(())
}

fn cmd_demo_data(
    defaults: &ConfigDefaults,
    out_catalog: &Path,
    out_matrix: Option<&Path>,
    n_reports: Option<usize>,
    seed: Option<u64>,
) -> Result<()> {
    let catalog = demo_catalog();
    let mut content = String::new();
    let _ = writeln!(
        content,
        "# synthetic demo catalog: published attribute names, report counts, and"
    );
    let _ = writeln!(
        content,
        "# exposures with back-filled severity splits calibrated to reproduce the"
    );
    let _ = writeln!(
        content,
        "# published relative risk values under the severity scale below"
    );
    content.push_str(&catalog_to_csv(&catalog));
    std::fs::write(out_catalog, &content).map_err(|e| RiskError::io(out_catalog, e))?;
    eprintln!("wrote {} ({} attributes)", out_catalog.display(), catalog.len());

    if let Some(out_matrix) = out_matrix {
        let n_reports = defaults.resolve(n_reports, "n-reports", 814)?;
        let seed = defaults.resolve(seed, "seed", 0)?;
        let matrix = generate_demo_matrix(&catalog, n_reports, seed)?;
        let provenance = Provenance::new("demo-data")
            .setting("synthetic", true)
            .setting("n-reports", n_reports)
            .setting("seed", seed);
        write_output(out_matrix, &provenance, &matrix_to_csv(&matrix))?;
        eprintln!("wrote {} ({} reports)", out_matrix.display(), n_reports);
    }
    Ok(())
}
