//! Flat `key = value` experiment configs with `[section]` headers.
//!
//! ```text
//! command = profile
//! seed = 7
//!
//! [manifold]
//! kind = sphere
//!
//! [measure]
//! preset = equator
//!
//! [params]
//! lambda_max = 64
//! ```
//!
//! Lists are comma separated; atom points are `;`-separated groups of
//! space-separated coordinates (`theta phi` on the sphere). `#` starts a
//! comment.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use synthlab_core::measures::{make_measure, Atom, Density, MeasureSpec, Preset};
use synthlab_core::spectrum::Point;
use synthlab_core::synthesis::WindowKind;
use synthlab_core::{Manifold, Path};

/// Seed used when neither the config nor the command line sets one.
pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Command {
    Spectrum,
    Profile,
    Fr,
    Approx,
    Stability,
    Endpoint,
    Uncertainty,
    Kuznecov,
    Volume,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Spectrum,
        Command::Profile,
        Command::Fr,
        Command::Approx,
        Command::Stability,
        Command::Endpoint,
        Command::Uncertainty,
        Command::Kuznecov,
        Command::Volume,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Profile => "profile",
            Command::Fr => "fr",
            Command::Approx => "approx",
            Command::Stability => "stability",
            Command::Endpoint => "endpoint",
            Command::Uncertainty => "uncertainty",
            Command::Kuznecov => "kuznecov",
            Command::Volume => "volume",
        }
    }

    pub fn parse(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Measure section, kept in config form so it echoes back verbatim.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureConfig {
    pub preset: String,
    pub k: Option<usize>,
    pub offset: Option<Vec<f64>>,
    pub start: Option<Vec<f64>>,
    pub end: Option<Vec<f64>>,
    pub points: Option<Vec<Vec<f64>>>,
    pub weights: Option<Vec<f64>>,
    pub level: Option<u32>,
    pub colatitude: Option<f64>,
    pub density_amplitude: Option<f64>,
    pub density_frequency: Option<u32>,
}

/// A synthetic input: `‖E_λ f‖ = amplitude` on the line with key `key`,
/// spread evenly over the line basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionConfig {
    pub keys: Vec<u64>,
    pub amplitudes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Params {
    pub lambda_max: Option<f64>,
    pub p: Option<f64>,
    pub r_grid: Option<Vec<f64>>,
    pub terms: Option<usize>,
    pub trials: Option<usize>,
    pub delta_grid: Option<Vec<f64>>,
    pub n_samples: Option<usize>,
    pub eta_target: Option<f64>,
    pub path: Option<Path>,
    pub window: Option<WindowKind>,
    pub instances: Option<usize>,
    pub fit_fraction: Option<f64>,
    pub ratio_band: Option<f64>,
    pub slope_tolerance: Option<f64>,
    pub exponent_tolerance: Option<f64>,
    pub b_bound: Option<f64>,
    pub a_tail_index: Option<usize>,
    pub a_tail_bound: Option<f64>,
    pub sup_bound: Option<f64>,
    pub weyl_tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: u64,
    /// Worker threads; does not influence any result.
    pub threads: usize,
    pub manifold: Manifold,
    pub measure: Option<MeasureConfig>,
    pub function: Option<FunctionConfig>,
    pub params: Params,
    /// Output directory; does not influence any result.
    pub out_dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// 1-based; 0 when the problem is a missing key.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ConfigError {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

const TOP_KEYS: &[&str] = &["command", "seed", "threads"];
const MANIFOLD_KEYS: &[&str] = &["kind", "dim"];
const MEASURE_KEYS: &[&str] = &[
    "preset",
    "k",
    "offset",
    "start",
    "end",
    "points",
    "weights",
    "level",
    "colatitude",
    "density_amplitude",
    "density_frequency",
];
const FUNCTION_KEYS: &[&str] = &["keys", "amplitudes"];
const PARAM_KEYS: &[&str] = &[
    "lambda_max",
    "p",
    "r_grid",
    "terms",
    "trials",
    "delta_grid",
    "n_samples",
    "eta_target",
    "path",
    "window",
    "instances",
    "fit_fraction",
    "ratio_band",
    "slope_tolerance",
    "exponent_tolerance",
    "b_bound",
    "a_tail_index",
    "a_tail_bound",
    "sup_bound",
    "weyl_tolerance",
];
const OUTPUT_KEYS: &[&str] = &["dir"];

fn section_keys(section: &str) -> Option<&'static [&'static str]> {
    match section {
        "" => Some(TOP_KEYS),
        "manifold" => Some(MANIFOLD_KEYS),
        "measure" => Some(MEASURE_KEYS),
        "function" => Some(FUNCTION_KEYS),
        "params" => Some(PARAM_KEYS),
        "output" => Some(OUTPUT_KEYS),
        _ => None,
    }
}

struct Entry {
    line: usize,
    value: String,
}

/// Raw entries keyed by `section.key` plus the violations found so far.
struct Doc {
    entries: BTreeMap<String, Entry>,
    sections: BTreeMap<String, usize>,
    violations: Vec<Violation>,
}

impl Doc {
    fn violate(&mut self, line: usize, message: impl Into<String>) {
        self.violations.push(Violation {
            line,
            message: message.into(),
        });
    }

    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.entries.get(key).map(|e| (e.line, e.value.as_str()))
    }

    fn parse_with<T>(&mut self, key: &str, what: &str, f: impl Fn(&str) -> Option<T>) -> Option<T> {
        let (line, raw) = self.raw(key)?;
        let raw = raw.to_string();
        match f(&raw) {
            Some(v) => Some(v),
            None => {
                self.violate(line, format!("`{key}`: expected {what}, got `{raw}`"));
                None
            }
        }
    }

    fn real(&mut self, key: &str) -> Option<f64> {
        self.parse_with(key, "a finite real number", parse_real)
    }

    fn uint<T: std::str::FromStr>(&mut self, key: &str) -> Option<T> {
        self.parse_with(key, "a nonnegative integer", |s| s.parse().ok())
    }

    fn reals(&mut self, key: &str) -> Option<Vec<f64>> {
        self.parse_with(key, "a comma-separated list of reals", |s| {
            s.split(',').map(|t| parse_real(t.trim())).collect()
        })
    }

    fn check(&mut self, key: &str, ok: bool, message: &str) {
        if !ok {
            let line = self.raw(key).map_or(0, |(l, _)| l);
            self.violate(line, format!("`{key}`: {message}"));
        }
    }

    fn require(&mut self, key: &str, command: Command) {
        if !self.entries.contains_key(key) {
            self.violate(0, format!("missing required key `{key}` for command `{command}`"));
        }
    }
}

fn parse_real(s: &str) -> Option<f64> {
    let v = match s {
        "pi" => std::f64::consts::PI,
        _ => s.parse::<f64>().ok()?,
    };
    v.is_finite().then_some(v)
}

fn tokenize(text: &str) -> Doc {
    let mut doc = Doc {
        entries: BTreeMap::new(),
        sections: BTreeMap::new(),
        violations: Vec::new(),
    };
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim().to_string();
            if section_keys(&name).is_none() || name.is_empty() {
                doc.violate(line, format!("unknown section `[{name}]`"));
            } else if doc.sections.contains_key(&name) {
                doc.violate(line, format!("duplicate section `[{name}]`"));
            } else {
                doc.sections.insert(name.clone(), line);
            }
            section = name;
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            doc.violate(line, format!("expected `key = value`, got `{content}`"));
            continue;
        };
        let key = key.trim();
        let value = value.trim();
        match section_keys(&section) {
            None => continue,
            Some(keys) if !keys.contains(&key) => {
                let place = if section.is_empty() {
                    "at top level".to_string()
                } else {
                    format!("in [{section}]")
                };
                doc.violate(line, format!("unknown key `{key}` {place}"));
                continue;
            }
            Some(_) => {}
        }
        let full = if section.is_empty() {
            key.to_string()
        } else {
            format!("{section}.{key}")
        };
        if doc.entries.contains_key(&full) {
            doc.violate(line, format!("duplicate key `{full}`"));
            continue;
        }
        doc.entries.insert(
            full,
            Entry {
                line,
                value: value.to_string(),
            },
        );
    }
    doc
}

fn required_keys(command: Command) -> &'static [&'static str] {
    match command {
        Command::Spectrum => &["params.lambda_max"],
        Command::Profile => &["params.lambda_max", "measure.preset"],
        Command::Fr => &["params.lambda_max"],
        Command::Approx => &["params.lambda_max", "params.terms", "params.trials"],
        Command::Stability => &["params.lambda_max", "measure.preset", "params.p", "params.r_grid"],
        Command::Endpoint => &["params.lambda_max", "measure.preset", "params.r_grid"],
        Command::Uncertainty => &["params.r_grid", "params.eta_target"],
        Command::Kuznecov => &["params.lambda_max", "measure.preset"],
        Command::Volume => &["measure.preset", "params.delta_grid", "params.n_samples"],
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut doc = tokenize(text);
    let command = match doc.raw("command") {
        None => {
            doc.violate(0, "missing required key `command`");
            None
        }
        Some((line, raw)) => {
            let raw = raw.to_string();
            let c = Command::parse(&raw);
            if c.is_none() {
                let names: Vec<&str> = Command::ALL.iter().map(|c| c.name()).collect();
                doc.violate(
                    line,
                    format!("unknown command `{raw}`; expected one of {}", names.join(", ")),
                );
            }
            c
        }
    };
    let seed = doc.uint("seed").unwrap_or(DEFAULT_SEED);
    let threads: usize = doc.uint("threads").unwrap_or(1);
    doc.check("threads", threads >= 1, "must be at least 1");

    let manifold = parse_manifold(&mut doc);
    let measure = parse_measure(&mut doc);
    let function = parse_function(&mut doc);
    let params = parse_params(&mut doc);
    let out_dir = doc.raw("output.dir").map(|(_, v)| v.to_string());

    if let Some(command) = command {
        for key in required_keys(command) {
            doc.require(key, command);
        }
        match command {
            Command::Fr | Command::Approx if measure.is_none() && function.is_none() => {
                doc.violate(
                    0,
                    format!("command `{command}` needs a [measure] or a [function] section"),
                );
            }
            Command::Stability => {
                if let Some(p) = params.p {
                    doc.check("params.p", p > 2.0, "p must exceed 2");
                }
            }
            Command::Uncertainty if measure.is_none() && params.instances.unwrap_or(0) == 0 => {
                doc.violate(
                    0,
                    "command `uncertainty` needs a [measure] section or `params.instances` > 0",
                );
            }
            Command::Kuznecov => {
                if let Some(m) = manifold {
                    if m != Manifold::Sphere {
                        let line = doc.raw("manifold.kind").map_or(0, |(l, _)| l);
                        doc.violate(line, "command `kuznecov` runs on the sphere");
                    }
                }
            }
            _ => {}
        }
    }

    if let (Some(m), Some(mc)) = (manifold, &measure) {
        match build_measure(m, mc) {
            Ok(spec) => {
                if let Err(e) = make_measure(spec) {
                    let line = doc.raw("measure.preset").map_or(0, |(l, _)| l);
                    doc.violate(line, format!("[measure]: {e}"));
                }
            }
            Err(msg) => {
                let line = doc.raw("measure.preset").map_or(0, |(l, _)| l);
                doc.violate(line, format!("[measure]: {msg}"));
            }
        }
    }

    if !doc.violations.is_empty() {
        doc.violations.sort_by_key(|v| (v.line == 0, v.line));
        return Err(ConfigError {
            violations: doc.violations,
        });
    }
    Ok(ExperimentConfig {
        command: command.expect("checked above"),
        seed,
        threads,
        manifold: manifold.expect("checked above"),
        measure,
        function,
        params,
        out_dir,
    })
}

fn parse_manifold(doc: &mut Doc) -> Option<Manifold> {
    let Some((line, kind)) = doc.raw("manifold.kind").map(|(l, v)| (l, v.to_string())) else {
        doc.violate(0, "missing required key `manifold.kind`");
        return None;
    };
    let dim: Option<usize> = doc.uint("manifold.dim");
    match kind.as_str() {
        "sphere" => {
            doc.check(
                "manifold.dim",
                dim.is_none_or(|d| d == 2),
                "the sphere model is two-dimensional",
            );
            Some(Manifold::Sphere)
        }
        "torus" => {
            let d = dim.unwrap_or(2);
            match Manifold::torus(d) {
                Ok(m) => Some(m),
                Err(_) => {
                    doc.check("manifold.dim", false, "torus dimension must be 1, 2 or 3");
                    None
                }
            }
        }
        other => {
            // `torus2` shorthand
            if let Some(d) = other.strip_prefix("torus").and_then(|d| d.parse::<usize>().ok()) {
                if let Ok(m) = Manifold::torus(d) {
                    return Some(m);
                }
            }
            doc.violate(
                line,
                format!("`manifold.kind`: expected `torus` or `sphere`, got `{other}`"),
            );
            None
        }
    }
}

fn parse_points(s: &str) -> Option<Vec<Vec<f64>>> {
    s.split(';')
        .map(|group| group.split_whitespace().map(parse_real).collect::<Option<Vec<f64>>>())
        .collect()
}

fn parse_measure(doc: &mut Doc) -> Option<MeasureConfig> {
    let preset = doc.raw("measure.preset")?.1.to_string();
    Some(MeasureConfig {
        preset,
        k: doc.uint("measure.k"),
        offset: doc.reals("measure.offset"),
        start: doc.reals("measure.start"),
        end: doc.reals("measure.end"),
        points: doc.parse_with("measure.points", "`;`-separated coordinate groups", parse_points),
        weights: doc.reals("measure.weights"),
        level: doc.uint("measure.level"),
        colatitude: doc.real("measure.colatitude"),
        density_amplitude: doc.real("measure.density_amplitude"),
        density_frequency: doc.uint("measure.density_frequency"),
    })
}

fn parse_function(doc: &mut Doc) -> Option<FunctionConfig> {
    if !doc.sections.contains_key("function") {
        return None;
    }
    let keys: Vec<u64> = doc
        .parse_with("function.keys", "a comma-separated list of integers", |s| {
            s.split(',').map(|t| t.trim().parse().ok()).collect()
        })
        .unwrap_or_default();
    let amplitudes = doc.reals("function.amplitudes").unwrap_or_default();
    if keys.is_empty() {
        doc.violate(doc.sections["function"], "[function] needs `keys`");
    }
    doc.check(
        "function.amplitudes",
        amplitudes.len() == keys.len(),
        "needs one amplitude per key",
    );
    Some(FunctionConfig { keys, amplitudes })
}

fn parse_params(doc: &mut Doc) -> Params {
    let p = Params {
        lambda_max: doc.real("params.lambda_max"),
        p: doc.real("params.p"),
        r_grid: doc.reals("params.r_grid"),
        terms: doc.uint("params.terms"),
        trials: doc.uint("params.trials"),
        delta_grid: doc.reals("params.delta_grid"),
        n_samples: doc.uint("params.n_samples"),
        eta_target: doc.real("params.eta_target"),
        path: doc.parse_with("params.path", "`auto`, `closed-form` or `quadrature`", |s| match s {
            "auto" => Some(Path::Auto),
            "closed-form" => Some(Path::ClosedForm),
            "quadrature" => Some(Path::Quadrature),
            _ => None,
        }),
        window: doc.parse_with("params.window", "`bump` or `fejer`", |s| match s {
            "bump" => Some(WindowKind::Bump),
            "fejer" => Some(WindowKind::Fejer),
            _ => None,
        }),
        instances: doc.uint("params.instances"),
        fit_fraction: doc.real("params.fit_fraction"),
        ratio_band: doc.real("params.ratio_band"),
        slope_tolerance: doc.real("params.slope_tolerance"),
        exponent_tolerance: doc.real("params.exponent_tolerance"),
        b_bound: doc.real("params.b_bound"),
        a_tail_index: doc.uint("params.a_tail_index"),
        a_tail_bound: doc.real("params.a_tail_bound"),
        sup_bound: doc.real("params.sup_bound"),
        weyl_tolerance: doc.real("params.weyl_tolerance"),
    };
    if let Some(l) = p.lambda_max {
        doc.check("params.lambda_max", l >= 0.0, "must be nonnegative");
    }
    if let Some(r) = &p.r_grid {
        doc.check(
            "params.r_grid",
            r.iter().all(|r| *r >= 1.0),
            "every R must be at least 1",
        );
    }
    if let Some(k) = p.terms {
        doc.check("params.terms", k >= 1, "need at least one term");
    }
    if let Some(t) = p.trials {
        doc.check("params.trials", t >= 1, "need at least one trial");
    }
    if let Some(n) = p.n_samples {
        doc.check("params.n_samples", n >= 10_000, "need at least 10000 samples");
    }
    if let Some(ds) = &p.delta_grid {
        doc.check(
            "params.delta_grid",
            ds.iter().all(|d| *d > 0.0),
            "radii must be positive",
        );
    }
    if let Some(e) = p.eta_target {
        doc.check("params.eta_target", (0.0..1.0).contains(&e), "must lie in [0, 1)");
    }
    if let Some(f) = p.fit_fraction {
        doc.check("params.fit_fraction", f > 0.0 && f < 1.0, "must lie in (0, 1)");
    }
    p
}

fn coords(name: &str, v: &Option<Vec<f64>>, d: usize) -> Result<[f64; 3], String> {
    let v = v.as_ref().ok_or_else(|| format!("preset needs `{name}`"))?;
    if v.len() != d {
        return Err(format!("`{name}` needs {d} coordinates"));
    }
    let mut c = [0.0; 3];
    c[..d].copy_from_slice(v);
    Ok(c)
}

/// Turns the config form into a core descriptor.
pub fn build_measure(manifold: Manifold, m: &MeasureConfig) -> Result<MeasureSpec, String> {
    let d = manifold.dim();
    let preset = match m.preset.as_str() {
        "subtorus" => Preset::Subtorus {
            k: m.k.ok_or("subtorus needs `k`")?,
            offset: match &m.offset {
                None => [0.0; 3],
                some => coords("offset", some, d)?,
            },
        },
        "segment" => Preset::Segment {
            start: coords("start", &m.start, d)?,
            end: coords("end", &m.end, d)?,
        },
        "moment-curve" => Preset::MomentCurve,
        "atoms" => {
            let points = m.points.as_ref().ok_or("atoms need `points`")?;
            let weights = match &m.weights {
                Some(w) if w.len() != points.len() => return Err("need one weight per point".into()),
                Some(w) => w.clone(),
                None => vec![1.0; points.len()],
            };
            let atoms = points
                .iter()
                .zip(weights)
                .map(|(p, w)| {
                    let point = match manifold {
                        Manifold::Sphere if p.len() == 2 => Point::sphere(p[0], p[1]),
                        Manifold::Torus(_) if p.len() == d => Point::torus(p),
                        _ => return Err(format!("atom points need {d} coordinates")),
                    };
                    Ok(Atom { point, weight: w })
                })
                .collect::<Result<Vec<_>, String>>()?;
            Preset::Atoms(atoms)
        }
        "zero" => Preset::Atoms(Vec::new()),
        "product-cantor" => Preset::ProductCantor {
            level: m.level.ok_or("product-cantor needs `level`")?,
        },
        "equator" => Preset::Equator,
        "latitude" => Preset::Latitude {
            colatitude: m.colatitude.ok_or("latitude needs `colatitude`")?,
        },
        other => return Err(format!("unknown preset `{other}`")),
    };
    let mut spec = MeasureSpec::new(manifold, preset);
    match (m.density_amplitude, m.density_frequency) {
        (None, None) => {}
        (a, f) => {
            spec = spec.with_density(Density {
                amplitude: a.unwrap_or(0.0),
                frequency: f.unwrap_or(0),
            })
        }
    }
    Ok(spec)
}

fn join_reals(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl ExperimentConfig {
    /// The config with run-time settings (threads, output directory) reset;
    /// this is what reports echo.
    pub fn canonical(&self) -> ExperimentConfig {
        ExperimentConfig {
            threads: 1,
            out_dir: None,
            ..self.clone()
        }
    }

    /// Canonical text of the result-determining settings. Parses back to
    /// [`ExperimentConfig::canonical`].
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command = {}", self.command);
        let _ = writeln!(s, "seed = {}", self.seed);
        s.push_str("\n[manifold]\n");
        match self.manifold {
            Manifold::Sphere => s.push_str("kind = sphere\n"),
            Manifold::Torus(t) => {
                let _ = writeln!(s, "kind = torus\ndim = {}", t.dim());
            }
        }
        if let Some(m) = &self.measure {
            s.push_str("\n[measure]\n");
            let _ = writeln!(s, "preset = {}", m.preset);
            let mut put = |k: &str, v: Option<String>| {
                if let Some(v) = v {
                    let _ = writeln!(s, "{k} = {v}");
                }
            };
            put("k", m.k.map(|v| v.to_string()));
            put("offset", m.offset.as_deref().map(join_reals));
            put("start", m.start.as_deref().map(join_reals));
            put("end", m.end.as_deref().map(join_reals));
            put(
                "points",
                m.points.as_ref().map(|ps| {
                    ps.iter()
                        .map(|p| p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
                        .collect::<Vec<_>>()
                        .join("; ")
                }),
            );
            put("weights", m.weights.as_deref().map(join_reals));
            put("level", m.level.map(|v| v.to_string()));
            put("colatitude", m.colatitude.map(|v| v.to_string()));
            put("density_amplitude", m.density_amplitude.map(|v| v.to_string()));
            put("density_frequency", m.density_frequency.map(|v| v.to_string()));
        }
        if let Some(f) = &self.function {
            s.push_str("\n[function]\n");
            let keys: Vec<String> = f.keys.iter().map(|k| k.to_string()).collect();
            let _ = writeln!(s, "keys = {}", keys.join(", "));
            let _ = writeln!(s, "amplitudes = {}", join_reals(&f.amplitudes));
        }
        let p = &self.params;
        let mut lines: Vec<(&str, String)> = Vec::new();
        let mut put = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                lines.push((k, v));
            }
        };
        put("lambda_max", p.lambda_max.map(|v| v.to_string()));
        put("p", p.p.map(|v| v.to_string()));
        put("r_grid", p.r_grid.as_deref().map(join_reals));
        put("terms", p.terms.map(|v| v.to_string()));
        put("trials", p.trials.map(|v| v.to_string()));
        put("delta_grid", p.delta_grid.as_deref().map(join_reals));
        put("n_samples", p.n_samples.map(|v| v.to_string()));
        put("eta_target", p.eta_target.map(|v| v.to_string()));
        put(
            "path",
            p.path.map(|v| {
                match v {
                    Path::Auto => "auto",
                    Path::ClosedForm => "closed-form",
                    Path::Quadrature => "quadrature",
                }
                .to_string()
            }),
        );
        put("window", p.window.map(|w| w.name().to_string()));
        put("instances", p.instances.map(|v| v.to_string()));
        put("fit_fraction", p.fit_fraction.map(|v| v.to_string()));
        put("ratio_band", p.ratio_band.map(|v| v.to_string()));
        put("slope_tolerance", p.slope_tolerance.map(|v| v.to_string()));
        put("exponent_tolerance", p.exponent_tolerance.map(|v| v.to_string()));
        put("b_bound", p.b_bound.map(|v| v.to_string()));
        put("a_tail_index", p.a_tail_index.map(|v| v.to_string()));
        put("a_tail_bound", p.a_tail_bound.map(|v| v.to_string()));
        put("sup_bound", p.sup_bound.map(|v| v.to_string()));
        put("weyl_tolerance", p.weyl_tolerance.map(|v| v.to_string()));
        if !lines.is_empty() {
            s.push_str("\n[params]\n");
            for (k, v) in lines {
                let _ = writeln!(s, "{k} = {v}");
            }
        }
        s
    }
}
