//! Experiment configuration: INI-style `key = value` files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ini::Ini;
use polecond_core::hardy::S0;
use polecond_core::system::{Integrator, ProblemKind, ProblemSpec, RadauSolve};
use polecond_core::C64;

use crate::CliError;

/// Keys accepted in a config file, in echo order.
pub const KEYS: &[&str] = &[
    "equation",
    "fe_order",
    "refinements",
    "n_xi",
    "dt",
    "t_start",
    "t_end",
    "n_outputs",
    "s0",
    "c",
    "d1",
    "d2",
    "k",
    "integrator",
    "track_error",
    "output",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub equation: ProblemKind,
    pub fe_order: usize,
    pub refinements: usize,
    pub n_xi: usize,
    pub dt: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub n_outputs: usize,
    /// `None` selects the equation's default.
    pub s0: Option<S0>,
    pub c: f64,
    pub d: [f64; 2],
    pub k: f64,
    pub integrator: Integrator,
    pub track_error: bool,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Desk-scale defaults for each equation.
    pub fn defaults(equation: ProblemKind) -> Self {
        let base = ExperimentConfig {
            equation,
            fe_order: 3,
            refinements: 2,
            n_xi: 20,
            dt: 1.0 / 800.0,
            t_start: 0.0,
            t_end: 2.0,
            n_outputs: 200,
            s0: None,
            c: 1.0,
            d: [0.0, 0.0],
            k: 0.0,
            integrator: Integrator::Trapezoidal,
            track_error: true,
            output: None,
        };
        match equation {
            ProblemKind::Schrodinger => base,
            ProblemKind::DriftDiffusion | ProblemKind::Heat => ExperimentConfig {
                fe_order: 4,
                n_xi: 30,
                dt: 1.0 / 40.0,
                t_start: 0.2,
                t_end: 5.0,
                c: 0.5,
                d: if equation == ProblemKind::Heat { [0.0, 0.0] } else { [1.5, 1.5] },
                integrator: Integrator::Radau5(RadauSolve::Block),
                ..base
            },
            ProblemKind::Wave | ProblemKind::KleinGordon => ExperimentConfig {
                fe_order: 1,
                n_xi: 10,
                dt: 1.0 / 80.0,
                t_end: 30.0,
                k: if equation == ProblemKind::KleinGordon { 1.0 } else { 0.0 },
                track_error: false,
                ..base
            },
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let ini = Ini::load_from_str(text).map_err(|e| CliError::Config(format!("malformed config: {e}")))?;
        let mut pairs = Vec::new();
        for (section, props) in ini.iter() {
            if let Some(name) = section {
                return Err(CliError::Config(format!("sections are not supported: [{name}]")));
            }
            for (key, value) in props.iter() {
                pairs.push((key.to_string(), value.to_string()));
            }
        }
        Self::from_pairs(&pairs)
    }

    /// Build from `key = value` pairs: `equation` is required, everything
    /// else falls back to the equation defaults. Unknown or repeated keys are
    /// errors.
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self, CliError> {
        for (i, (key, _)) in pairs.iter().enumerate() {
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!("unknown key `{key}`")));
            }
            if pairs[..i].iter().any(|(k, _)| k == key) {
                return Err(CliError::Config(format!("duplicate key `{key}`")));
            }
        }
        let get = |key: &str| pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v.trim());
        let name = get("equation").ok_or_else(|| CliError::Config("missing key `equation`".into()))?;
        let equation =
            ProblemKind::from_name(name).ok_or_else(|| CliError::Config(format!("unknown equation `{name}`")))?;
        let mut cfg = Self::defaults(equation);
        for (key, value) in pairs {
            let v = value.trim();
            match key.as_str() {
                "equation" => {}
                "fe_order" => cfg.fe_order = parse_int(key, v)?,
                "refinements" => cfg.refinements = parse_int(key, v)?,
                "n_xi" => cfg.n_xi = parse_int(key, v)?,
                "n_outputs" => cfg.n_outputs = parse_int(key, v)?,
                "dt" => cfg.dt = parse_number(v).map_err(|e| bad(key, &e))?,
                "t_start" => cfg.t_start = parse_number(v).map_err(|e| bad(key, &e))?,
                "t_end" => cfg.t_end = parse_number(v).map_err(|e| bad(key, &e))?,
                "c" => cfg.c = parse_number(v).map_err(|e| bad(key, &e))?,
                "d1" => cfg.d[0] = parse_number(v).map_err(|e| bad(key, &e))?,
                "d2" => cfg.d[1] = parse_number(v).map_err(|e| bad(key, &e))?,
                "k" => cfg.k = parse_number(v).map_err(|e| bad(key, &e))?,
                "s0" => cfg.s0 = Some(parse_s0(v).map_err(|e| bad(key, &e))?),
                "integrator" => cfg.integrator = parse_integrator(v).map_err(|e| bad(key, &e))?,
                "track_error" => {
                    cfg.track_error = v.parse().map_err(|_| bad(key, "expected true or false"))?;
                }
                "output" => cfg.output = Some(PathBuf::from(v)),
                _ => unreachable!("key list checked above"),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |msg: &str| Err(CliError::Config(msg.to_string()));
        if !(1..=4).contains(&self.fe_order) {
            return fail("fe_order must be in 1..=4");
        }
        if self.refinements > 5 {
            return fail("refinements must be in 0..=5");
        }
        if !(1..=51).contains(&self.n_xi) {
            return fail("n_xi must be in 1..=51");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return fail("dt must be positive");
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite() && self.t_start.is_finite() && self.t_end > self.t_start) {
            return fail("t_end must be positive and after t_start");
        }
        if self.n_outputs < 2 {
            return fail("n_outputs must be at least 2");
        }
        self.problem()?;
        Ok(())
    }

    pub fn problem(&self) -> Result<ProblemSpec, CliError> {
        ProblemSpec::new(self.equation, self.c, self.d, self.k, self.s0).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Every key with its effective value; feeding these back through
    /// [`ExperimentConfig::from_pairs`] reproduces the config.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("equation".to_string(), self.equation.name().to_string()),
            ("fe_order".into(), self.fe_order.to_string()),
            ("refinements".into(), self.refinements.to_string()),
            ("n_xi".into(), self.n_xi.to_string()),
            ("dt".into(), self.dt.to_string()),
            ("t_start".into(), self.t_start.to_string()),
            ("t_end".into(), self.t_end.to_string()),
            ("n_outputs".into(), self.n_outputs.to_string()),
        ];
        if let Some(s0) = self.s0 {
            out.push(("s0".into(), format_s0(s0)));
        }
        out.extend([
            ("c".to_string(), self.c.to_string()),
            ("d1".into(), self.d[0].to_string()),
            ("d2".into(), self.d[1].to_string()),
            ("k".into(), self.k.to_string()),
            ("integrator".into(), format_integrator(self.integrator).to_string()),
            ("track_error".into(), self.track_error.to_string()),
        ]);
        if let Some(path) = &self.output {
            out.push(("output".into(), path.display().to_string()));
        }
        out
    }

    pub fn to_ini(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.to_pairs() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

fn bad(key: &str, why: &str) -> CliError {
    CliError::Config(format!("invalid value for `{key}`: {why}"))
}

fn parse_int(key: &str, v: &str) -> Result<usize, CliError> {
    v.parse().map_err(|_| bad(key, "expected a non-negative integer"))
}

/// A decimal number or a fraction such as `1/800`.
pub fn parse_number(v: &str) -> Result<f64, String> {
    let v = v.trim();
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("`{v}` is not a number"));
    let x = match v.split_once('/') {
        Some((a, b)) => num(a)? / num(b)?,
        None => num(v)?,
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{v}` is not finite"))
    }
}

/// `iomega` for the symbolic tag, otherwise a complex literal like `-1-1i`.
pub fn parse_s0(v: &str) -> Result<S0, String> {
    let compact: String = v.chars().filter(|c| !c.is_whitespace()).collect();
    if matches!(compact.as_str(), "iomega" | "i*omega" | "iω") {
        return Ok(S0::IOmega);
    }
    let z: C64 = compact.parse().map_err(|_| format!("`{v}` is not a complex number"))?;
    Ok(S0::Value(z))
}

fn format_s0(s0: S0) -> String {
    match s0 {
        S0::IOmega => "iomega".into(),
        S0::Value(z) if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) => format!("{}-{}i", z.re, -z.im),
        S0::Value(z) => format!("{}+{}i", z.re, z.im),
    }
}

fn parse_integrator(v: &str) -> Result<Integrator, String> {
    match v {
        "trapezoidal" => Ok(Integrator::Trapezoidal),
        "radau5" => Ok(Integrator::Radau5(RadauSolve::Block)),
        "radau5-decoupled" => Ok(Integrator::Radau5(RadauSolve::Decoupled)),
        _ => Err(format!("unknown integrator `{v}` (trapezoidal, radau5, radau5-decoupled)")),
    }
}

fn format_integrator(i: Integrator) -> &'static str {
    match i {
        Integrator::Trapezoidal => "trapezoidal",
        Integrator::Radau5(RadauSolve::Block) => "radau5",
        Integrator::Radau5(RadauSolve::Decoupled) => "radau5-decoupled",
    }
}
