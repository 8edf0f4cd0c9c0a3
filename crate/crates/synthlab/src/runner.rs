//! Command dispatch: one function per command, each filling a [`Report`].

use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::sync::Arc;

use synthlab_core::instances::{heat_bump, random_band_limited};
use synthlab_core::measures::{make_measure, minkowski_volume, ThinMeasure};
use synthlab_core::numeric::{fit_log_log, rel_diff};
use synthlab_core::ratio::{
    converse_check, fourier_ratio, growth_table, kuznecov_fit, local_fr, sparse_approx, uncertainty_product,
    SLACK_ROUNDING,
};
use synthlab_core::rng::Stream;
use synthlab_core::spectrum::Point;
use synthlab_core::synthesis::{endpoint_dyadic, stability_certificate, Window, C0};
use synthlab_core::{
    enumerate_spectrum, lp_hat_norm, weyl_check, CoefficientSet, Complex64, Manifold, Path, SpectrumTable,
};

use crate::config::{build_measure, Command, ExperimentConfig};
use crate::pool::Pool;
use crate::report::{Assertion, Cell, Report, ReportError};

pub const DEFAULT_STABILITY_SAMPLES: usize = 200_000;
pub const DEFAULT_UNCERTAINTY_SAMPLES: usize = 100_000;
pub const DEFAULT_SLOPE_TOLERANCE: f64 = 0.15;
pub const DEFAULT_RATIO_BAND: f64 = 2.0;
pub const DEFAULT_WEYL_TOLERANCE: f64 = 0.05;
pub const DEFAULT_A_TAIL_INDEX: usize = 6;
pub const DEFAULT_A_TAIL_BOUND: f64 = 1e-8;
/// `b_j(R)` is exactly 2 on integer subtorus bands and 4 on the half-open
/// band `(1/2, 1]` at `R = 8`.
pub const DEFAULT_B_BOUND: f64 = 4.0;
pub const DEFAULT_FIT_FRACTION: f64 = 0.5;
/// Diffusion time of the stability test functions.
pub const TEST_FUNCTION_TIME: f64 = 0.01;
pub const TEST_FUNCTIONS: usize = 3;
/// Keeps the streams of derived random inputs apart from the Monte Carlo
/// streams that share the seed.
const INSTANCE_STREAM_BASE: u64 = 1 << 40;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{op}: {message}")]
    Module { op: &'static str, message: String },
    #[error("report: {0}")]
    Report(#[from] ReportError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

trait Context<T> {
    fn ctx(self, op: &'static str) -> Result<T, RunError>;
}

impl<T, E: std::fmt::Display> Context<T> for Result<T, E> {
    fn ctx(self, op: &'static str) -> Result<T, RunError> {
        self.map_err(|e| RunError::Module {
            op,
            message: e.to_string(),
        })
    }
}

fn missing(op: &'static str, key: &str) -> RunError {
    RunError::Module {
        op,
        message: format!("missing `{key}`"),
    }
}

pub fn run_experiment(config: &ExperimentConfig, pool: &Pool) -> Result<Report, RunError> {
    let report = match config.command {
        Command::Spectrum => spectrum(config)?,
        Command::Profile => profile(config)?,
        Command::Fr => fr(config)?,
        Command::Approx => approx(config, pool)?,
        Command::Stability => stability(config, pool)?,
        Command::Endpoint => endpoint(config)?,
        Command::Uncertainty => uncertainty(config, pool)?,
        Command::Kuznecov => kuznecov(config)?,
        Command::Volume => volume(config, pool)?,
    };
    report.validate()?;
    Ok(report)
}

/// Writes `<dir>/<command>.csv` and `<dir>/<command>.jsonl`.
pub fn write_artifacts(report: &Report, dir: &FsPath) -> Result<(PathBuf, PathBuf), RunError> {
    let io = |path: &FsPath| {
        let path = path.to_path_buf();
        move |source| RunError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let name = report.config.command.name();
    let csv_path = dir.join(format!("{name}.csv"));
    let jsonl_path = dir.join(format!("{name}.jsonl"));
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    fs::write(&csv_path, csv).map_err(io(&csv_path))?;
    let mut jsonl = Vec::new();
    report.write_jsonl(&mut jsonl)?;
    fs::write(&jsonl_path, jsonl).map_err(io(&jsonl_path))?;
    Ok((csv_path, jsonl_path))
}

fn key_column(m: &Manifold) -> &'static str {
    match m {
        Manifold::Sphere => "l",
        Manifold::Torus(_) => "n",
    }
}

fn window(config: &ExperimentConfig) -> Window {
    Window::new(config.params.window.unwrap_or_default())
}

fn lambda_max(config: &ExperimentConfig, op: &'static str) -> Result<f64, RunError> {
    config.params.lambda_max.ok_or_else(|| missing(op, "params.lambda_max"))
}

fn table(manifold: &Manifold, lambda_max: f64) -> Result<Arc<SpectrumTable>, RunError> {
    enumerate_spectrum(manifold, lambda_max)
        .map(Arc::new)
        .ctx("spectrum::enumerate_spectrum")
}

fn measure(config: &ExperimentConfig) -> Result<Option<ThinMeasure>, RunError> {
    let Some(mc) = &config.measure else {
        return Ok(None);
    };
    let spec = build_measure(config.manifold, mc).ctx("measures::make_measure")?;
    make_measure(spec).ctx("measures::make_measure").map(Some)
}

fn require_measure(config: &ExperimentConfig, op: &'static str) -> Result<ThinMeasure, RunError> {
    measure(config)?.ok_or_else(|| missing(op, "[measure]"))
}

/// The `[function]` section if present, otherwise the measure's
/// coefficients.
fn input(config: &ExperimentConfig, table: &Arc<SpectrumTable>) -> Result<CoefficientSet, RunError> {
    if let Some(f) = &config.function {
        let mut c = CoefficientSet::zeros(table.clone());
        for (key, amp) in f.keys.iter().zip(&f.amplitudes) {
            let i = table.line_index(*key).ok_or_else(|| RunError::Module {
                op: "spectrum::project",
                message: format!("no spectral line with key {key} at or below lambda_max"),
            })?;
            let line = c.line_mut(i);
            let each = amp / (line.len() as f64).sqrt();
            for z in line {
                *z = Complex64::new(each, 0.0);
            }
        }
        return Ok(c);
    }
    let m = require_measure(config, "measures::coefficients")?;
    let path = config.params.path.unwrap_or_default();
    m.coefficients_with_provenance(table, path)
        .map(|(c, _)| c)
        .ctx("measures::coefficients")
}

fn spectrum(config: &ExperimentConfig) -> Result<Report, RunError> {
    let manifold = config.manifold;
    let lambda = lambda_max(config, "spectrum::enumerate_spectrum")?;
    let t = table(&manifold, lambda)?;
    let mut report = Report::new(
        config,
        &[key_column(&manifold), "lambda", "multiplicity", "count", "weyl_leading"],
    );
    let mut count = 0usize;
    for line in t.lines() {
        count += line.multiplicity();
        report.row(vec![
            line.key.into(),
            line.lambda.into(),
            line.multiplicity().into(),
            count.into(),
            manifold.weyl_leading(line.lambda).into(),
        ]);
    }
    let w = weyl_check(&t);
    report.value("count", w.count as f64);
    report.value("predicted", w.predicted);
    report.value("relative_deviation", w.relative_deviation);
    match manifold {
        Manifold::Sphere => {
            let top = t.lines().last().map_or(0, |l| l.key);
            let exact = ((top + 1) * (top + 1)) as f64;
            report.assert(Assertion::le(
                "weyl_count_exact",
                (w.count as f64 - exact).abs(),
                0.0,
                0.0,
            ));
        }
        Manifold::Torus(_) => {
            let scale = lambda.powi(manifold.dim() as i32);
            let deviation = (w.count as f64 - w.predicted).abs() / scale;
            let bound = config.params.weyl_tolerance.unwrap_or(DEFAULT_WEYL_TOLERANCE);
            report.value("count_over_lambda_d", w.count as f64 / scale);
            report.assert(Assertion::le("weyl_leading_constant", deviation, bound, 0.0));
        }
    }
    Ok(report)
}

fn profile(config: &ExperimentConfig) -> Result<Report, RunError> {
    let m = require_measure(config, "spectrum::spectral_profile")?;
    let manifold = config.manifold;
    let t = table(&manifold, lambda_max(config, "spectrum::spectral_profile")?)?;
    let quad = m
        .coefficients_with_provenance(&t, Path::Quadrature)
        .ctx("measures::coefficients")?
        .0;
    let quad_norms = quad.line_norms();
    let closed = if m.has_closed_form() {
        Some(
            m.coefficients_with_provenance(&t, Path::ClosedForm)
                .ctx("measures::coefficients")?
                .0
                .line_norms(),
        )
    } else {
        None
    };
    let key = key_column(&manifold);
    let mut report = match closed {
        Some(_) => Report::new(
            config,
            &[key, "lambda", "norm2_closed_form", "norm2_quadrature", "abs_diff"],
        ),
        None => Report::new(config, &[key, "lambda", "norm2_quadrature"]),
    };
    let mut worst = 0.0f64;
    let mut largest = 0.0f64;
    for (i, line) in t.lines().iter().enumerate() {
        let q = quad_norms[i] * quad_norms[i];
        let mut row: Vec<Cell> = vec![line.key.into(), line.lambda.into()];
        largest = largest.max(q);
        if let Some(c) = &closed {
            let c = c[i] * c[i];
            worst = worst.max((c - q).abs());
            row.extend([c.into(), q.into(), (c - q).abs().into()]);
        } else {
            row.push(q.into());
        }
        report.row(row);
    }
    if closed.is_some() {
        report.assert(Assertion::le(
            "closed_form_vs_quadrature",
            worst / largest.max(1.0),
            1e-8,
            0.0,
        ));
    }
    let sup = quad_norms.iter().cloned().fold(0.0, f64::max);
    report.value("sup_norm", sup);
    if let Some(bound) = config.params.sup_bound {
        report.assert(Assertion::le("sup_norm", sup, bound, 0.0));
    }
    if let Some(p) = config.params.p {
        let prof = quad.profile(synthlab_core::Provenance::Quadrature);
        let lp = lp_hat_norm(&prof, p).ctx("spectrum::lp_hat_norm")?;
        report.value("lp_hat_norm", lp.value);
        let (cs, ss): (Vec<f64>, Vec<f64>) = lp.partial_sums.iter().cloned().unzip();
        report.fit("lp_partial_sums", fit_log_log(&cs, &ss).as_ref(), None);
    }
    Ok(report)
}

fn fr(config: &ExperimentConfig) -> Result<Report, RunError> {
    let manifold = config.manifold;
    let t = table(&manifold, lambda_max(config, "ratio::fourier_ratio")?)?;
    let f = input(config, &t)?;
    let r = fourier_ratio(&f).ctx("ratio::fourier_ratio")?;
    let mut report = Report::new(
        config,
        &[
            key_column(&manifold),
            "lambda",
            "multiplicity",
            "norm",
            "cumulative_l1",
            "cumulative_l2",
        ],
    );
    let (mut l1, mut l2sq) = (0.0, 0.0);
    for (line, n) in t.lines().iter().zip(f.line_norms()) {
        l1 += n;
        l2sq += n * n;
        report.row(vec![
            line.key.into(),
            line.lambda.into(),
            line.multiplicity().into(),
            n.into(),
            l1.into(),
            l2sq.sqrt().into(),
        ]);
    }
    report.value("fr", r.fr);
    report.value("l1_hat", r.l1_hat);
    report.value("l2", r.l2);
    report.value("active_lines", r.active_lines as f64);
    report.assert(Assertion::ge("fr_at_least_one", r.fr, 1.0, SLACK_ROUNDING * r.fr));
    let w = window(config);
    for &radius in config.params.r_grid.as_deref().unwrap_or_default() {
        let local = local_fr(&f, radius, &w).ctx("ratio::local_fr")?;
        if let Some(l) = local.local {
            report.value(&format!("fr_r[R={radius}]"), l.fr_r);
            report.assert(Assertion::ge(
                format!("local_fr_at_least_one[R={radius}]"),
                l.fr_r,
                1.0,
                SLACK_ROUNDING * l.fr_r,
            ));
        }
    }
    Ok(report)
}

fn approx(config: &ExperimentConfig, pool: &Pool) -> Result<Report, RunError> {
    let manifold = config.manifold;
    let t = table(&manifold, lambda_max(config, "ratio::sparse_approx")?)?;
    let f = input(config, &t)?;
    let k = config
        .params
        .terms
        .ok_or_else(|| missing("ratio::sparse_approx", "params.terms"))?;
    let trials = config
        .params
        .trials
        .ok_or_else(|| missing("ratio::sparse_approx", "params.trials"))?;
    let s = sparse_approx(&f, k, trials, config.seed, pool).ctx("ratio::sparse_approx")?;
    let mut report = Report::new(
        config,
        &[
            key_column(&manifold),
            "lambda",
            "norm_f",
            "probability",
            "norm_best",
            "scale_mean",
            "scale_stderr",
        ],
    );
    let norms = f.line_norms();
    let best = s.best.line_norms();
    let active = norms.iter().enumerate().filter(|(_, n)| **n > 0.0).map(|(i, _)| i);
    for (a, i) in active.enumerate() {
        let line = &t.lines()[i];
        report.row(vec![
            line.key.into(),
            line.lambda.into(),
            norms[i].into(),
            (norms[i] / s.l1_hat).into(),
            best[i].into(),
            s.scale_means[a].into(),
            s.scale_stderrs[a].into(),
        ]);
    }
    for (name, v) in [
        ("fr", s.fr),
        ("l2", s.l2),
        ("mean_error_sq", s.mean_error_sq),
        ("stderr", s.stderr),
        ("expected_direct", s.expected_direct),
        ("expected_identity", s.expected_identity),
        ("best_error", s.best_error),
        ("best_trial", s.best_trial as f64),
        ("max_bias_z", s.max_bias_z),
    ] {
        report.value(name, v);
    }
    report.assert(Assertion::le(
        "expected_error_identity",
        rel_diff(s.expected_direct, s.expected_identity, s.l2 * s.l2),
        1e-12,
        0.0,
    ));
    report.assert(Assertion::le(
        "monte_carlo_mean",
        (s.mean_error_sq - s.expected_identity).abs(),
        4.0 * s.stderr,
        0.0,
    ));
    if let Some(eta) = config.params.eta_target {
        let needed = (s.fr * s.fr - 1.0) / (eta * eta);
        report.value("terms_needed", needed);
        if k as f64 >= needed {
            report.assert(Assertion::le("best_error", s.best_error, eta * s.l2, 0.0));
        } else {
            report.note(format!(
                "best_error not asserted: {k} terms is below (FR^2 - 1)/eta^2 = {needed}"
            ));
        }
    }
    if s.best_error < s.l2 {
        let c = converse_check(&f, &s.best).ctx("ratio::converse_check")?;
        report.value("converse_bound", c.bound);
        report.assert(Assertion::le("converse_bound", c.fr, c.bound, SLACK_ROUNDING * c.bound));
    }
    Ok(report)
}

fn stability(config: &ExperimentConfig, pool: &Pool) -> Result<Report, RunError> {
    const OP: &str = "synthesis::stability_certificate";
    let m = require_measure(config, OP)?;
    let manifold = config.manifold;
    let t = table(&manifold, lambda_max(config, OP)?)?;
    let u = m
        .coefficients_with_provenance(&t, Path::Auto)
        .ctx("measures::coefficients")?
        .0;
    let p = config.params.p.ok_or_else(|| missing(OP, "params.p"))?;
    let r_grid = config
        .params
        .r_grid
        .clone()
        .ok_or_else(|| missing(OP, "params.r_grid"))?;
    let mut rng = Stream::new(config.seed, INSTANCE_STREAM_BASE);
    let tests: Vec<CoefficientSet> = (0..TEST_FUNCTIONS)
        .map(|_| heat_bump(&t, &random_point(&manifold, &mut rng), TEST_FUNCTION_TIME))
        .collect();
    let mut deltas: Vec<f64> = r_grid.iter().map(|r| C0 / r).collect();
    deltas.sort_by(f64::total_cmp);
    deltas.dedup();
    let n = config.params.n_samples.unwrap_or(DEFAULT_STABILITY_SAMPLES);
    let vol = minkowski_volume(&m, &deltas, n, config.seed, pool).ctx("measures::minkowski_volume")?;
    let tol = config.params.slope_tolerance.unwrap_or(DEFAULT_SLOPE_TOLERANCE);
    let w = window(config);
    let c = stability_certificate(&u, m.nominal_dim(), p, &r_grid, &tests, &w, &vol, tol).ctx(OP)?;

    let mut columns = vec!["r", "l2_norm", "ratio", "band_norm", "support_volume"];
    let names: Vec<(String, String)> = (0..TEST_FUNCTIONS)
        .map(|i| (format!("pairing_{i}"), format!("normalized_pairing_{i}")))
        .collect();
    columns.extend(names.iter().map(|n| n.0.as_str()));
    columns.extend(names.iter().map(|n| n.1.as_str()));
    let mut report = Report::new(config, &columns);
    for row in &c.rows {
        let mut cells: Vec<Cell> = vec![
            row.r.into(),
            row.l2_norm.into(),
            row.ratio.into(),
            row.band_norm.into(),
            row.support_volume.into(),
        ];
        cells.extend(row.pairings.iter().map(|v| Cell::from(*v)));
        cells.extend(row.normalized_pairings.iter().map(|v| Cell::from(*v)));
        report.row(cells);
    }
    let codim = manifold.dim() as f64 - m.nominal_dim();
    report.value("lp_norm", c.lp_norm);
    report.value("ratio_spread", c.ratio_spread);
    report.value("minkowski_exponent", vol.exponent);
    report.value("minkowski_half_width", vol.exponent_half_width);
    report.fit("l2_norm", c.l2_fit.as_ref(), Some(c.l2_exponent));
    report.fit("ratio", c.ratio_fit.as_ref(), Some(0.0));
    report.fit("support_volume", c.volume_fit.as_ref(), Some(-codim));
    let band = config.params.ratio_band.unwrap_or(DEFAULT_RATIO_BAND);
    report.assert(Assertion::le("l2_ratio_spread", c.ratio_spread, band, 0.0));
    for (i, check) in c.pairing_checks.iter().enumerate() {
        let name = format!("pairing_slope_{i}");
        match &check.fit {
            Some(fit) => {
                report.fit(&name, Some(fit), Some(check.predicted));
                report.assert(Assertion::le(name, fit.slope, check.predicted, check.tolerance));
            }
            None => report.note(format!("{name}: pairing vanishes on the grid")),
        }
    }
    report.assert(Assertion::le(
        "minkowski_exponent",
        (vol.exponent - codim).abs(),
        config.params.exponent_tolerance.unwrap_or(DEFAULT_SLOPE_TOLERANCE),
        0.0,
    ));
    Ok(report)
}

fn random_point(manifold: &Manifold, rng: &mut Stream) -> Point {
    use std::f64::consts::{PI, TAU};
    match manifold {
        Manifold::Torus(t) => {
            let mut c = [0.0; 3];
            for slot in c.iter_mut().take(t.dim()) {
                *slot = TAU * rng.uniform();
            }
            Point::Torus(c)
        }
        Manifold::Sphere => Point::sphere((1.0 - 2.0 * rng.uniform()).acos().clamp(0.0, PI), TAU * rng.uniform()),
    }
}

fn endpoint(config: &ExperimentConfig) -> Result<Report, RunError> {
    const OP: &str = "synthesis::endpoint_dyadic";
    let m = require_measure(config, OP)?;
    let t = table(&config.manifold, lambda_max(config, OP)?)?;
    let u = m
        .coefficients_with_provenance(&t, Path::Auto)
        .ctx("measures::coefficients")?
        .0;
    let r_grid = config
        .params
        .r_grid
        .clone()
        .ok_or_else(|| missing(OP, "params.r_grid"))?;
    let e = endpoint_dyadic(&u, m.nominal_dim(), &r_grid, &window(config)).ctx(OP)?;
    let mut report = Report::new(config, &["r", "j", "lo", "hi", "b", "complete"]);
    for row in &e.rows {
        report.row(vec![
            row.r.into(),
            row.j.into(),
            row.lo.into(),
            row.hi.into(),
            row.b.into(),
            row.complete.into(),
        ]);
    }
    report.value("p0", e.p0);
    report.value("b_max", e.b_max);
    for (j, a) in e.a.iter().enumerate() {
        report.value(&format!("a[{j}]"), *a);
    }
    for (r, (z, trend)) in r_grid.iter().zip(e.zero_terms.iter().zip(&e.energy_trend)) {
        report.value(&format!("zero_term[R={r}]"), *z);
        report.value(&format!("energy_trend[R={r}]"), *trend);
    }
    let (rs, trend): (Vec<f64>, Vec<f64>) = r_grid.iter().zip(&e.energy_trend).map(|(r, v)| (*r, *v)).unzip();
    report.fit("energy_trend", fit_log_log(&rs, &trend).as_ref(), None);
    let idx = config.params.a_tail_index.unwrap_or(DEFAULT_A_TAIL_INDEX);
    let tail = e.a_tails.get(idx).copied().ok_or_else(|| RunError::Module {
        op: OP,
        message: format!("a_tail_index {idx} exceeds the computed range"),
    })?;
    report.assert(Assertion::le(
        format!("a_tail[{idx}]"),
        tail,
        config.params.a_tail_bound.unwrap_or(DEFAULT_A_TAIL_BOUND),
        0.0,
    ));
    report.assert(Assertion::le(
        "b_max",
        e.b_max,
        config.params.b_bound.unwrap_or(DEFAULT_B_BOUND),
        0.0,
    ));
    Ok(report)
}

const UNCERTAINTY_STEPS: [&str; 7] = [
    "sup_bound",
    "num_upper",
    "num_lower",
    "support_l2",
    "fr_lower",
    "fr_upper",
    "product",
];

fn uncertainty(config: &ExperimentConfig, pool: &Pool) -> Result<Report, RunError> {
    const OP: &str = "ratio::uncertainty_product";
    let manifold = config.manifold;
    let r_grid = config
        .params
        .r_grid
        .clone()
        .ok_or_else(|| missing(OP, "params.r_grid"))?;
    let eta_target = config
        .params
        .eta_target
        .ok_or_else(|| missing(OP, "params.eta_target"))?;
    let w = window(config);
    let m = measure(config)?;
    let volume = match &m {
        Some(m) => {
            let mut deltas: Vec<f64> = r_grid
                .iter()
                .flat_map(|r| [0.5, 1.0, 2.0].map(|s| s * C0 / r))
                .filter(|d| *d < manifold.injectivity_radius())
                .collect();
            deltas.sort_by(f64::total_cmp);
            deltas.dedup();
            let n = config.params.n_samples.unwrap_or(DEFAULT_UNCERTAINTY_SAMPLES);
            Some(minkowski_volume(m, &deltas, n, config.seed, pool).ctx("measures::minkowski_volume")?)
        }
        None => None,
    };
    let mut columns = vec![
        "source",
        "r",
        "fr_r",
        "lower_bound",
        "m_r",
        "eta",
        "sup",
        "a_r",
        "support_volume",
    ];
    let slack_names: Vec<String> = UNCERTAINTY_STEPS.iter().map(|s| format!("slack_{s}")).collect();
    columns.extend(slack_names.iter().map(String::as_str));
    columns.push("pass");
    let mut report = Report::new(config, &columns);
    let mut worst = [f64::INFINITY; 7];
    let mut worst_eta = 0.0f64;
    let mut certify = |report: &mut Report, source: String, f: &CoefficientSet, r: f64, vol: f64| {
        let c = uncertainty_product(f, r, &w, vol, eta_target).ctx(OP)?;
        let steps = c.chain.steps.iter().chain([&c.upper, &c.product]);
        let rel: Vec<f64> = steps
            .map(|s| s.slack / s.lhs.abs().max(s.rhs.abs()).max(f64::MIN_POSITIVE))
            .collect();
        for (w, s) in worst.iter_mut().zip(&rel) {
            *w = w.min(*s);
        }
        worst_eta = worst_eta.max(c.eta);
        let mut cells: Vec<Cell> = vec![
            source.as_str().into(),
            r.into(),
            c.chain.fr_r.into(),
            c.chain.lower_bound.into(),
            c.m_r.into(),
            c.eta.into(),
            c.chain.sup.into(),
            c.chain.a_r.into(),
            vol.into(),
        ];
        cells.extend(rel.iter().map(|v| Cell::from(*v)));
        cells.push(c.pass().into());
        report.row(cells);
        Ok::<(), RunError>(())
    };
    if let (Some(m), Some(vol)) = (&m, &volume) {
        for &r in &r_grid {
            let t = table(&manifold, w.width() * r)?;
            let f = m
                .coefficients_with_provenance(&t, Path::Auto)
                .ctx("measures::coefficients")?
                .0;
            let support = vol.volume_at(C0 / r).min(manifold.volume());
            certify(&mut report, "measure".into(), &f, r, support)?;
        }
    }
    let instances = config.params.instances.unwrap_or(0);
    for i in 0..instances {
        let mut rng = Stream::new(config.seed, INSTANCE_STREAM_BASE + 1 + i as u64);
        let r = r_grid[i % r_grid.len()];
        let t = table(&manifold, w.width() * r)?;
        let active = 1 + (rng.uniform() * t.len().min(12) as f64) as usize;
        let f = random_band_limited(&t, active, &mut rng);
        certify(&mut report, format!("instance-{i}"), &f, r, manifold.volume())?;
    }
    for (name, v) in UNCERTAINTY_STEPS.iter().zip(worst) {
        report.assert(Assertion::ge(
            format!("min_relative_slack[{name}]"),
            v,
            0.0,
            SLACK_ROUNDING,
        ));
    }
    report.assert(Assertion::le("eta", worst_eta, eta_target, 0.0));
    report.value("certificates", report.rows.len() as f64);
    Ok(report)
}

fn kuznecov(config: &ExperimentConfig) -> Result<Report, RunError> {
    const OP: &str = "ratio::kuznecov_fit";
    let m = require_measure(config, OP)?;
    let lambda = lambda_max(config, OP)?;
    let fraction = config.params.fit_fraction.unwrap_or(DEFAULT_FIT_FRACTION);
    let k = kuznecov_fit(&m, lambda, fraction).ctx(OP)?;
    let t = table(&config.manifold, lambda)?;
    let mut report = Report::new(config, &["l", "lambda", "norm", "cumulative"]);
    for (line, (n, c)) in t.lines().iter().zip(k.norms.iter().zip(&k.cumulative)) {
        report.row(vec![line.key.into(), line.lambda.into(), (*n).into(), (*c).into()]);
    }
    let predicted = config.manifold.dim() as f64 - m.nominal_dim();
    report.fit("cumulative", Some(&k.fit), Some(predicted));
    report.value("exponent", k.exponent());
    report.value("fit_from", k.fit_from);
    report.value("sup_norm", k.sup_norm);
    report.value("sup_slope", k.sup_slope);
    report.value("bounded", f64::from(u8::from(k.bounded)));
    report.assert(Assertion::le(
        "kuznecov_exponent",
        (k.exponent() - predicted).abs(),
        config.params.exponent_tolerance.unwrap_or(0.1),
        0.0,
    ));
    if let Some(bound) = config.params.sup_bound {
        report.assert(Assertion::le("sup_norm", k.sup_norm, bound, 0.0));
    }
    let a = growth_table(&config.manifold, lambda, lambda).ctx("ratio::growth_table")?;
    report.value("a_r", a.a_r);
    Ok(report)
}

fn volume(config: &ExperimentConfig, pool: &Pool) -> Result<Report, RunError> {
    const OP: &str = "measures::minkowski_volume";
    let m = require_measure(config, OP)?;
    let deltas = config
        .params
        .delta_grid
        .clone()
        .ok_or_else(|| missing(OP, "params.delta_grid"))?;
    let n = config.params.n_samples.ok_or_else(|| missing(OP, "params.n_samples"))?;
    let v = minkowski_volume(&m, &deltas, n, config.seed, pool).ctx(OP)?;
    let mut report = Report::new(config, &["delta", "count", "volume", "half_width", "fitted"]);
    for i in 0..v.deltas.len() {
        report.row(vec![
            v.deltas[i].into(),
            v.counts[i].into(),
            v.volumes[i].into(),
            v.half_widths[i].into(),
            v.fitted(v.deltas[i]).into(),
        ]);
    }
    let d = config.manifold.dim();
    let codim = d as f64 - m.nominal_dim();
    report.value("exponent", v.exponent);
    report.value("exponent_half_width", v.exponent_half_width);
    report.value("constant", v.constant);
    report.value("dimension", v.dimension(d));
    report.value("samples", v.n_samples as f64);
    report.note(
        "distances are exact for subtori, segments, circles and atoms; the moment curve \
         is located by nearest-sample search with local refinement and a Cantor preset \
         by its finest-level atoms, so radii below that level's spacing measure the atoms",
    );
    report.assert(Assertion::le(
        "minkowski_exponent",
        (v.exponent - codim).abs(),
        config.params.exponent_tolerance.unwrap_or(DEFAULT_SLOPE_TOLERANCE),
        0.0,
    ));
    Ok(report)
}
