//! Run configuration: `key = value` files (`#` comments) overridden by
//! command-line settings, then turned into a typed case.

use std::path::{Path, PathBuf};

use super::accuracy::AccuracyCase;
use super::bubble::{steps_for, BubbleCase};
use super::solitary::SolitaryCase;
use crate::error::{Error, Result};
use crate::interface::VelocityVariant;
use crate::time::Mode;

/// Environment variable naming the output root.
pub const OUTPUT_ENV: &str = "ALEHDG_OUTPUT";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseKind {
    Accuracy,
    Solitary,
    Bubble,
}

impl CaseKind {
    pub fn name(self) -> &'static str {
        match self {
            CaseKind::Accuracy => "accuracy",
            CaseKind::Solitary => "solitary",
            CaseKind::Bubble => "bubble",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "accuracy" => Some(CaseKind::Accuracy),
            "solitary" | "solitary_wave" => Some(CaseKind::Solitary),
            "bubble" | "rising_bubble" => Some(CaseKind::Bubble),
            _ => None,
        }
    }
}

/// Every field is optional; unset fields take the case defaults.
#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub case: Option<CaseKind>,
    pub k: Option<usize>,
    pub order: Option<usize>,
    pub dt: Option<f64>,
    pub h: Option<f64>,
    pub h_interface: Option<f64>,
    pub t_end: Option<f64>,
    pub rho: Option<f64>,
    pub mu: Option<f64>,
    pub rho_inner: Option<f64>,
    pub mu_inner: Option<f64>,
    pub tau: Option<f64>,
    pub gravity: Option<f64>,
    pub variant: Option<VelocityVariant>,
    pub curvature_degree: Option<usize>,
    /// Rising-bubble test case 1 or 2.
    pub bubble_case: Option<usize>,
    /// Accuracy-test mesh levels `1/h`.
    pub resolutions: Option<Vec<usize>>,
    /// Accuracy-test viscosities.
    pub viscosities: Option<Vec<f64>>,
    pub steps_per_cell: Option<usize>,
    pub implicit: Option<bool>,
    pub x0: Option<f64>,
    pub x1: Option<f64>,
    pub crest: Option<f64>,
    pub depth: Option<f64>,
    pub wave_height: Option<f64>,
    pub initial_velocity: Option<bool>,
    pub output: Option<PathBuf>,
    /// VTK output every `cadence` steps, 0 for none.
    pub cadence: Option<usize>,
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Parse(format!("bad value '{v}' for '{key}'")))
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse(key, s)).collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(Error::Parse(format!("bad value '{v}' for '{key}'"))),
    }
}

impl RunConfig {
    pub const KEYS: &'static [&'static str] = &[
        "case",
        "k",
        "order",
        "dt",
        "h",
        "h_interface",
        "t_end",
        "rho",
        "mu",
        "rho_inner",
        "mu_inner",
        "tau",
        "gravity",
        "variant",
        "curvature_degree",
        "bubble_case",
        "resolutions",
        "viscosities",
        "steps_per_cell",
        "implicit",
        "x0",
        "x1",
        "crest",
        "depth",
        "wave_height",
        "initial_velocity",
        "output",
        "cadence",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "case" => self.case = Some(CaseKind::from_name(v).ok_or_else(|| Error::Parse(format!("unknown case '{v}'")))?),
            "k" => self.k = Some(parse(key, v)?),
            "order" | "s" => self.order = Some(parse(key, v)?),
            "dt" => self.dt = Some(parse(key, v)?),
            "h" => self.h = Some(parse(key, v)?),
            "h_interface" => self.h_interface = Some(parse(key, v)?),
            "t_end" | "T" => self.t_end = Some(parse(key, v)?),
            "rho" => self.rho = Some(parse(key, v)?),
            "mu" => self.mu = Some(parse(key, v)?),
            "rho_inner" => self.rho_inner = Some(parse(key, v)?),
            "mu_inner" => self.mu_inner = Some(parse(key, v)?),
            "tau" => self.tau = Some(parse(key, v)?),
            "gravity" => self.gravity = Some(parse(key, v)?),
            "variant" => {
                self.variant = Some(VelocityVariant::from_name(v).ok_or_else(|| Error::Parse(format!("unknown interface variant '{v}'")))?)
            }
            "curvature_degree" => self.curvature_degree = Some(parse(key, v)?),
            "bubble_case" => self.bubble_case = Some(parse(key, v)?),
            "resolutions" => self.resolutions = Some(parse_list(key, v)?),
            "viscosities" => self.viscosities = Some(parse_list(key, v)?),
            "steps_per_cell" => self.steps_per_cell = Some(parse(key, v)?),
            "implicit" => self.implicit = Some(parse_bool(key, v)?),
            "x0" => self.x0 = Some(parse(key, v)?),
            "x1" => self.x1 = Some(parse(key, v)?),
            "crest" => self.crest = Some(parse(key, v)?),
            "depth" => self.depth = Some(parse(key, v)?),
            "wave_height" => self.wave_height = Some(parse(key, v)?),
            "initial_velocity" => self.initial_velocity = Some(parse_bool(key, v)?),
            "output" => self.output = Some(PathBuf::from(v)),
            "cadence" => self.cadence = Some(parse(key, v)?),
            other => return Err(Error::Parse(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        cfg.merge_str(text)?;
        Ok(cfg)
    }

    /// Applies the settings of `text` on top of `self`.
    pub fn merge_str(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", n + 1)))?;
            self.set(k, v).map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse_str(&std::fs::read_to_string(path)?)
    }

    /// Output directory: explicit setting, else `$ALEHDG_OUTPUT/<case>`,
    /// else `output/<case>`.
    pub fn output_dir(&self, case: CaseKind) -> PathBuf {
        match &self.output {
            Some(p) => p.clone(),
            None => std::env::var_os(OUTPUT_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("output"))
                .join(case.name()),
        }
    }

    fn reject(&self, keys: &[(&str, bool)], case: CaseKind) -> Result<()> {
        for (k, set) in keys {
            if *set {
                return Err(Error::Parameter(format!("'{k}' does not apply to the {} case", case.name())));
            }
        }
        Ok(())
    }

    /// Accuracy cases, one per `(μ, 1/h)`.
    pub fn accuracy_cases(&self) -> Result<Vec<AccuracyCase>> {
        self.reject(
            &[
                ("tau", self.tau.is_some()),
                ("variant", self.variant.is_some()),
                ("bubble_case", self.bubble_case.is_some()),
                ("crest", self.crest.is_some()),
            ],
            CaseKind::Accuracy,
        )?;
        let k = self.k.unwrap_or(2);
        let levels = self.resolutions.clone().unwrap_or_else(|| if k >= 3 { vec![8, 16] } else { vec![8, 16, 32] });
        let mus = match (&self.viscosities, self.mu) {
            (Some(v), _) => v.clone(),
            (None, Some(m)) => vec![m],
            (None, None) => vec![1.0, 1e-6],
        };
        let spc = self.steps_per_cell.unwrap_or(4);
        let mut out = Vec::new();
        for &mu in &mus {
            for &n in &levels {
                let mut c = AccuracyCase::new(k, n, mu, spc);
                if let Some(s) = self.order {
                    c.order = s;
                }
                if let Some(dt) = self.dt {
                    c.steps = steps_for(super::accuracy::FINAL_TIME, dt)?;
                }
                if self.implicit == Some(true) {
                    c.mode = Mode::FullyImplicit;
                }
                if !(mu > 0.0) || n == 0 || c.steps < c.order {
                    return Err(Error::Parameter(format!("bad accuracy case {c:?}")));
                }
                out.push(c);
            }
        }
        Ok(out)
    }

    pub fn bubble_case(&self) -> Result<BubbleCase> {
        let h = self.h.unwrap_or(1.0 / 20.0);
        let mut c = match self.bubble_case.unwrap_or(1) {
            1 => BubbleCase::case1(h),
            2 => BubbleCase::case2(h),
            n => return Err(Error::Parameter(format!("bubble test case must be 1 or 2, got {n}"))),
        };
        if let Some(hi) = self.h_interface {
            c.h_interface = hi;
            c.dt = if self.bubble_case.unwrap_or(1) == 1 { hi / 8.0 } else { hi / 4.0 };
        }
        macro_rules! apply {
            ($($src:ident => $dst:expr),*) => { $(if let Some(v) = self.$src { $dst = v; })* };
        }
        apply!(k => c.k, order => c.order, dt => c.dt, t_end => c.t_end, tau => c.tau, gravity => c.gravity,
               variant => c.variant, curvature_degree => c.curvature_degree,
               rho => c.rho[0], mu => c.mu[0], rho_inner => c.rho[1], mu_inner => c.mu[1]);
        c.steps()?;
        if c.tau < 0.0 || c.rho.iter().chain(&c.mu).any(|v| !(*v > 0.0)) {
            return Err(Error::Parameter("densities and viscosities must be positive, τ nonnegative".into()));
        }
        Ok(c)
    }

    pub fn solitary_case(&self) -> Result<SolitaryCase> {
        self.reject(
            &[
                ("tau", self.tau.is_some()),
                ("rho_inner", self.rho_inner.is_some()),
                ("variant", self.variant.is_some()),
            ],
            CaseKind::Solitary,
        )?;
        let mut c = SolitaryCase::default();
        macro_rules! apply {
            ($($src:ident => $dst:expr),*) => { $(if let Some(v) = self.$src { $dst = v; })* };
        }
        apply!(k => c.k, order => c.order, dt => c.dt, h => c.h, t_end => c.t_end, rho => c.rho, mu => c.mu,
               gravity => c.gravity, x0 => c.x0, x1 => c.x1, crest => c.crest, depth => c.depth,
               wave_height => c.height, initial_velocity => c.initial_velocity);
        steps_for(c.t_end, c.dt)?;
        Ok(c)
    }
}
