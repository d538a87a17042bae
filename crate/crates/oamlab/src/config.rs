//! Run configuration: strict TOML parsing with unit-bearing quantities and
//! a normalized serializer.
//!
//! Every problem in a file is collected before parsing fails, so one run
//! reports all unknown keys, missing values and unit mismatches at once.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use toml::{Table, Value};

use crate::units::{format_quantity, parse_quantity, Dimension};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Mask,
    Diffract,
    Mpi,
    Field,
    Topology,
    Tomo,
    Reproduce,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Mask,
        Command::Diffract,
        Command::Mpi,
        Command::Field,
        Command::Topology,
        Command::Tomo,
        Command::Reproduce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Mask => "mask",
            Command::Diffract => "diffract",
            Command::Mpi => "mpi",
            Command::Field => "field",
            Command::Topology => "topology",
            Command::Tomo => "tomo",
            Command::Reproduce => "reproduce",
        }
    }
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command \"{s}\""))
    }
}

/// Figure recipes understood by `reproduce`.
pub const FIGURES: [&str; 8] = ["fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b", "figA1", "figA2"];

/// Real-space sampling for masks.
#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub size: usize,
    /// µm; `None` picks the mask's default extent.
    pub half_width: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { size: 2048, half_width: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaskConfig {
    pub m: u32,
    pub n: u32,
    /// rad
    pub kappa: f64,
    /// µm⁻¹
    pub k0: f64,
    /// µm
    pub radius: f64,
    /// `(C, C₂)` in µm² for the chirped radial design.
    pub radial: Option<(f64, f64)>,
    /// Binarization threshold as a fraction of the mask maximum.
    pub binarize: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffractionConfig {
    /// −1 or +1.
    pub sideband: i32,
    /// Crop radius, µm⁻¹; `None` uses the default sideband window.
    pub window: Option<f64>,
    /// Analysis ring, µm⁻¹; `None` uses `k_eq` of the mask orders.
    pub ring: Option<f64>,
    pub pad: bool,
    pub q_max: usize,
}

impl Default for DiffractionConfig {
    fn default() -> Self {
        Self { sideband: -1, window: None, ring: None, pad: false, q_max: 13 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpiConfig {
    pub m: u32,
    pub n: u32,
    /// hartree
    pub omega: f64,
    pub phi_r: f64,
    pub phi_b: f64,
    pub phi_ce: f64,
    pub zeta: f64,
    /// fs
    pub tau: f64,
    /// fs
    pub fwhm: f64,
    /// per bohr
    pub k_center: f64,
    pub k_width: f64,
    /// Momentum half-width of the sampling grids, per bohr.
    pub k_extent: f64,
    pub beta0: f64,
    pub grid_size: usize,
    pub energy_linear: bool,
}

impl MpiConfig {
    /// The sodium scheme with all phases zero.
    pub fn sodium(m: u32, n: u32) -> Self {
        use oamlab_core::mpi::{SODIUM_FUNDAMENTAL, SODIUM_K_CENTER, SODIUM_K_WIDTH};
        Self {
            m,
            n,
            omega: SODIUM_FUNDAMENTAL,
            phi_r: 0.0,
            phi_b: 0.0,
            phi_ce: 0.0,
            zeta: 0.0,
            tau: 0.0,
            fwhm: 25.0,
            k_center: SODIUM_K_CENTER,
            k_width: SODIUM_K_WIDTH,
            k_extent: 0.3,
            beta0: 1.0,
            grid_size: 512,
            energy_linear: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldConfig {
    pub samples: usize,
    /// Trace length in beat periods `2π/ω`.
    pub periods: f64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self { samples: 4096, periods: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopologyConfig {
    pub m: u32,
    pub n: u32,
    pub beta_min: f64,
    pub beta_max: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phantom {
    /// MPI density from the `[mpi]` block, polar axis on the rotation axis.
    Pmd,
    /// Uniform ball of radius 0.6 of the half-width.
    Ball,
    /// Random Gaussian blobs drawn from the run seed.
    Blobs,
}

impl Phantom {
    fn name(self) -> &'static str {
        match self {
            Phantom::Pmd => "pmd",
            Phantom::Ball => "ball",
            Phantom::Blobs => "blobs",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyConfig {
    pub phantom: Phantom,
    pub size: usize,
    pub projections: usize,
    /// rad
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub output: Option<String>,
    pub grid: GridConfig,
    pub mask: Option<MaskConfig>,
    pub diffraction: DiffractionConfig,
    pub mpi: Option<MpiConfig>,
    pub field: FieldConfig,
    pub topology: Option<TopologyConfig>,
    pub tomography: Option<TomographyConfig>,
    pub figure: Option<String>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            seed: 0,
            output: None,
            grid: GridConfig::default(),
            mask: None,
            diffraction: DiffractionConfig::default(),
            mpi: None,
            field: FieldConfig::default(),
            topology: None,
            tomography: None,
            figure: None,
        }
    }
}

/// Every problem found in a configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub problems: Vec<String>,
}

impl ConfigError {
    pub fn single(msg: impl Into<String>) -> Self {
        Self { problems: vec![msg.into()] }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} configuration problem(s):", self.problems.len())?;
        for p in &self.problems {
            write!(f, "\n  - {p}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

/// Reads one table, remembering which keys were consumed.
struct Section<'a> {
    name: &'a str,
    table: &'a Table,
    seen: BTreeSet<&'a str>,
    problems: &'a mut Vec<String>,
}

impl<'a> Section<'a> {
    fn new(name: &'a str, table: &'a Table, problems: &'a mut Vec<String>) -> Self {
        Self { name, table, seen: BTreeSet::new(), problems }
    }

    fn path(&self, key: &str) -> String {
        if self.name.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.name)
        }
    }

    fn problem(&mut self, key: &str, msg: impl fmt::Display) {
        let p = self.path(key);
        self.problems.push(format!("{p}: {msg}"));
    }

    fn get(&mut self, key: &'a str) -> Option<&'a Value> {
        self.seen.insert(key);
        self.table.get(key)
    }

    fn quantity(&mut self, key: &'a str, dim: Dimension) -> Option<f64> {
        match self.get(key)? {
            Value::String(s) => match parse_quantity(s, dim) {
                Ok(v) => Some(v),
                Err(e) => {
                    self.problem(key, e);
                    None
                }
            },
            Value::Integer(_) | Value::Float(_) => {
                self.problem(
                    key,
                    format!("a {dim} needs an explicit unit, e.g. \"1.0 {}\"", dim.canonical_unit()),
                );
                None
            }
            other => {
                self.problem(key, format!("expected a quantity string, got {}", other.type_str()));
                None
            }
        }
    }

    fn required_quantity(&mut self, key: &'a str, dim: Dimension) -> Option<f64> {
        if !self.table.contains_key(key) {
            self.problem(key, format!("missing (a {dim})"));
            return None;
        }
        self.quantity(key, dim)
    }

    fn number(&mut self, key: &'a str) -> Option<f64> {
        match self.get(key)? {
            Value::Float(v) if v.is_finite() => Some(*v),
            Value::Integer(v) => Some(*v as f64),
            other => {
                self.problem(key, format!("expected a finite number, got {}", other.type_str()));
                None
            }
        }
    }

    fn integer(&mut self, key: &'a str, min: i64, max: i64) -> Option<i64> {
        match self.get(key)? {
            Value::Integer(v) if (min..=max).contains(v) => Some(*v),
            Value::Integer(v) => {
                self.problem(key, format!("{v} is outside [{min}, {max}]"));
                None
            }
            other => {
                self.problem(key, format!("expected an integer, got {}", other.type_str()));
                None
            }
        }
    }

    fn required_integer(&mut self, key: &'a str, min: i64, max: i64) -> Option<i64> {
        if !self.table.contains_key(key) {
            self.problem(key, "missing (an integer)");
            return None;
        }
        self.integer(key, min, max)
    }

    fn boolean(&mut self, key: &'a str) -> Option<bool> {
        match self.get(key)? {
            Value::Boolean(b) => Some(*b),
            other => {
                self.problem(key, format!("expected true or false, got {}", other.type_str()));
                None
            }
        }
    }

    fn string(&mut self, key: &'a str) -> Option<&'a str> {
        match self.get(key)? {
            Value::String(s) => Some(s.as_str()),
            other => {
                self.problem(key, format!("expected a string, got {}", other.type_str()));
                None
            }
        }
    }

    fn finish(self) {
        for key in self.table.keys() {
            if !self.seen.contains(key.as_str()) {
                let p = if self.name.is_empty() { key.clone() } else { format!("{}.{key}", self.name) };
                self.problems.push(format!("{p}: unknown key"));
            }
        }
    }
}

fn sub_table<'a>(root: &'a Table, name: &str, problems: &mut Vec<String>) -> Option<&'a Table> {
    match root.get(name)? {
        Value::Table(t) => Some(t),
        other => {
            problems.push(format!("{name}: expected a [{name}] table, got {}", other.type_str()));
            None
        }
    }
}

const SECTIONS: [&str; 8] = ["output", "grid", "mask", "diffraction", "mpi", "field", "topology", "tomography"];

fn parse_grid(t: &Table, problems: &mut Vec<String>) -> GridConfig {
    let mut s = Section::new("grid", t, problems);
    let d = GridConfig::default();
    let size = s.integer("size", 16, 1 << 14).map(|v| v as usize);
    if let Some(v) = size {
        if v % 2 != 0 {
            s.problem("size", "must be even");
        }
    }
    let half_width = s.quantity("half_width", Dimension::Length);
    if half_width.is_some_and(|w| w <= 0.0) {
        s.problem("half_width", "must be positive");
    }
    s.finish();
    GridConfig { size: size.unwrap_or(d.size), half_width }
}

fn parse_mask(t: &Table, problems: &mut Vec<String>) -> Option<MaskConfig> {
    let mut s = Section::new("mask", t, problems);
    let m = s.required_integer("m", 0, 16);
    let n = s.required_integer("n", 0, 16);
    let kappa = s.quantity("kappa", Dimension::Angle).unwrap_or(0.0);
    let k0 = s.required_quantity("k0", Dimension::InverseLength);
    let radius = s.required_quantity("radius", Dimension::Length);
    let chirp = s.quantity("chirp", Dimension::Area);
    let envelope = s.quantity("envelope", Dimension::Area);
    let radial = match (chirp, envelope) {
        (Some(c), Some(c2)) => Some((c, c2)),
        (None, None) => None,
        _ => {
            if !(s.table.contains_key("chirp") && s.table.contains_key("envelope")) {
                s.problem("chirp", "chirp and envelope must be given together");
            }
            None
        }
    };
    let binarize = s.number("binarize");
    if binarize.is_some_and(|b| !(b > 0.0 && b < 1.0)) {
        s.problem("binarize", "threshold must lie in (0, 1)");
    }
    if k0.is_some_and(|k| k < 0.0) {
        s.problem("k0", "must be >= 0");
    }
    if radius.is_some_and(|r| r <= 0.0) {
        s.problem("radius", "must be positive");
    }
    s.finish();
    Some(MaskConfig {
        m: m? as u32,
        n: n? as u32,
        kappa,
        k0: k0?,
        radius: radius?,
        radial,
        binarize,
    })
}

fn parse_diffraction(t: &Table, problems: &mut Vec<String>) -> DiffractionConfig {
    let mut s = Section::new("diffraction", t, problems);
    let d = DiffractionConfig::default();
    let sideband = s.integer("sideband", -1, 1).map(|v| v as i32);
    if sideband == Some(0) {
        s.problem("sideband", "must be -1 or +1");
    }
    let window = s.quantity("window", Dimension::InverseLength);
    let ring = s.quantity("ring", Dimension::InverseLength);
    let pad = s.boolean("pad");
    let q_max = s.integer("q_max", 1, 64).map(|v| v as usize);
    s.finish();
    DiffractionConfig {
        sideband: sideband.unwrap_or(d.sideband),
        window,
        ring,
        pad: pad.unwrap_or(d.pad),
        q_max: q_max.unwrap_or(d.q_max),
    }
}

fn parse_mpi(t: &Table, problems: &mut Vec<String>) -> Option<MpiConfig> {
    let mut s = Section::new("mpi", t, problems);
    let m = s.required_integer("m", 1, 16);
    let n = s.required_integer("n", 1, 16);
    let d = MpiConfig::sodium(1, 1);
    let omega = s.quantity("omega", Dimension::Energy).unwrap_or(d.omega);
    let phi_r = s.quantity("phi_r", Dimension::Angle).unwrap_or(0.0);
    let phi_b = s.quantity("phi_b", Dimension::Angle).unwrap_or(0.0);
    let phi_ce = s.quantity("phi_ce", Dimension::Angle).unwrap_or(0.0);
    let zeta = s.quantity("zeta", Dimension::Angle).unwrap_or(0.0);
    let tau = s.quantity("tau", Dimension::Time).unwrap_or(0.0);
    let fwhm = s.quantity("fwhm", Dimension::Time).unwrap_or(d.fwhm);
    let k_center = s.quantity("k_center", Dimension::Momentum).unwrap_or(d.k_center);
    let k_width = s.quantity("k_width", Dimension::Momentum).unwrap_or(d.k_width);
    let k_extent = s.quantity("k_extent", Dimension::Momentum).unwrap_or(d.k_extent);
    let beta0 = s.number("beta0").unwrap_or(d.beta0);
    let grid_size = s.integer("grid_size", 16, 1 << 13).map(|v| v as usize).unwrap_or(d.grid_size);
    let energy_linear = match s.string("radial_scaling") {
        None | Some("k-linear") => false,
        Some("energy-linear") => true,
        Some(other) => {
            s.problem("radial_scaling", format!("\"{other}\" is not k-linear or energy-linear"));
            false
        }
    };
    for (key, v) in [("omega", omega), ("fwhm", fwhm), ("k_width", k_width), ("k_extent", k_extent), ("beta0", beta0)] {
        if !(v > 0.0) {
            s.problem(key, "must be positive");
        }
    }
    if !grid_size.is_multiple_of(2) {
        s.problem("grid_size", "must be even");
    }
    s.finish();
    Some(MpiConfig {
        m: m? as u32,
        n: n? as u32,
        omega,
        phi_r,
        phi_b,
        phi_ce,
        zeta,
        tau,
        fwhm,
        k_center,
        k_width,
        k_extent,
        beta0,
        grid_size,
        energy_linear,
    })
}

fn parse_field(t: &Table, problems: &mut Vec<String>) -> FieldConfig {
    let mut s = Section::new("field", t, problems);
    let d = FieldConfig::default();
    let samples = s.integer("samples", 16, 1 << 22).map(|v| v as usize);
    let periods = s.number("periods");
    if periods.is_some_and(|p| !(p > 0.0)) {
        s.problem("periods", "must be positive");
    }
    s.finish();
    FieldConfig { samples: samples.unwrap_or(d.samples), periods: periods.unwrap_or(d.periods) }
}

fn parse_topology(t: &Table, problems: &mut Vec<String>) -> Option<TopologyConfig> {
    let mut s = Section::new("topology", t, problems);
    let m = s.required_integer("m", 0, 16);
    let n = s.required_integer("n", 0, 16);
    let beta_min = s.number("beta_min").unwrap_or(0.1);
    let beta_max = s.number("beta_max").unwrap_or(3.0);
    let steps = s.integer("steps", 2, 100_000).map(|v| v as usize).unwrap_or(59);
    if !(beta_min > 0.0 && beta_max > beta_min) {
        s.problem("beta_min", "need 0 < beta_min < beta_max");
    }
    s.finish();
    Some(TopologyConfig { m: m? as u32, n: n? as u32, beta_min, beta_max, steps })
}

fn parse_tomography(t: &Table, problems: &mut Vec<String>) -> Option<TomographyConfig> {
    let mut s = Section::new("tomography", t, problems);
    let phantom = match s.string("phantom") {
        None | Some("pmd") => Some(Phantom::Pmd),
        Some("ball") => Some(Phantom::Ball),
        Some("blobs") => Some(Phantom::Blobs),
        Some(other) => {
            s.problem("phantom", format!("\"{other}\" is not pmd, ball or blobs"));
            None
        }
    };
    let size = s.integer("size", 16, 512).map(|v| v as usize).unwrap_or(128);
    if !size.is_multiple_of(2) {
        s.problem("size", "must be even");
    }
    let projections = s.integer("projections", 2, 3600).map(|v| v as usize).unwrap_or(45);
    let step = s.quantity("step", Dimension::Angle).unwrap_or(4f64.to_radians());
    if !(step > 0.0) || step * (projections - 1) as f64 >= std::f64::consts::PI {
        s.problem("step", "projections must fit in [0, pi)");
    }
    s.finish();
    Some(TomographyConfig { phantom: phantom?, size, projections, step })
}

/// Parses configuration text, collecting every problem.
pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::single(e.to_string().trim().to_string()))?;
    let mut problems = Vec::new();

    let mut top = Section::new("", &root, &mut problems);
    let command = match top.string("command") {
        Some(c) => match c.parse::<Command>() {
            Ok(c) => Some(c),
            Err(e) => {
                top.problem("command", e);
                None
            }
        },
        None => {
            if !root.contains_key("command") {
                top.problem("command", "missing");
            }
            None
        }
    };
    let seed = top.integer("seed", 0, i64::MAX).map(|v| v as u64).unwrap_or(0);
    let figure = top.string("figure").map(str::to_string);
    for name in SECTIONS {
        top.seen.insert(name);
    }
    top.finish();

    let output = sub_table(&root, "output", &mut problems).and_then(|t| {
        let mut s = Section::new("output", t, &mut problems);
        let dir = s.string("dir").map(str::to_string);
        s.finish();
        dir
    });
    let grid = sub_table(&root, "grid", &mut problems)
        .map(|t| parse_grid(t, &mut problems))
        .unwrap_or_default();
    let mask = sub_table(&root, "mask", &mut problems).and_then(|t| parse_mask(t, &mut problems));
    let diffraction = sub_table(&root, "diffraction", &mut problems)
        .map(|t| parse_diffraction(t, &mut problems))
        .unwrap_or_default();
    let mpi = sub_table(&root, "mpi", &mut problems).and_then(|t| parse_mpi(t, &mut problems));
    let field = sub_table(&root, "field", &mut problems)
        .map(|t| parse_field(t, &mut problems))
        .unwrap_or_default();
    let topology = sub_table(&root, "topology", &mut problems).and_then(|t| parse_topology(t, &mut problems));
    let tomography = sub_table(&root, "tomography", &mut problems).and_then(|t| parse_tomography(t, &mut problems));

    if let Some(c) = command {
        let need = |present: bool, section: &str, problems: &mut Vec<String>| {
            if !present && !problems.iter().any(|p| p.starts_with(&format!("{section}."))) {
                problems.push(format!("{section}: the {} command needs a [{section}] table", c.name()));
            }
        };
        match c {
            Command::Mask | Command::Diffract => need(mask.is_some(), "mask", &mut problems),
            Command::Mpi | Command::Field => need(mpi.is_some(), "mpi", &mut problems),
            Command::Topology => need(topology.is_some(), "topology", &mut problems),
            Command::Tomo => need(tomography.is_some(), "tomography", &mut problems),
            Command::Reproduce => match &figure {
                Some(f) if FIGURES.contains(&f.as_str()) => {}
                Some(f) => problems.push(format!("figure: unknown figure \"{f}\" (one of {})", FIGURES.join(", "))),
                None => problems.push("figure: the reproduce command needs a figure".into()),
            },
        }
    }

    if !problems.is_empty() {
        return Err(ConfigError { problems });
    }
    Ok(RunConfig {
        command: command.expect("checked above"),
        seed,
        output,
        grid,
        mask,
        diffraction,
        mpi,
        field,
        topology,
        tomography,
        figure,
    })
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::single(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text)
}

fn q(v: f64, dim: Dimension) -> Value {
    Value::String(format_quantity(v, dim))
}

/// Normalized form: every value explicit, quantities in canonical units.
pub fn to_toml_string(cfg: &RunConfig) -> String {
    let mut root = Table::new();
    root.insert("command".into(), Value::String(cfg.command.name().into()));
    root.insert("seed".into(), Value::Integer(cfg.seed as i64));
    if let Some(f) = &cfg.figure {
        root.insert("figure".into(), Value::String(f.clone()));
    }
    if let Some(dir) = &cfg.output {
        let mut t = Table::new();
        t.insert("dir".into(), Value::String(dir.clone()));
        root.insert("output".into(), Value::Table(t));
    }
    let mut g = Table::new();
    g.insert("size".into(), Value::Integer(cfg.grid.size as i64));
    if let Some(w) = cfg.grid.half_width {
        g.insert("half_width".into(), q(w, Dimension::Length));
    }
    root.insert("grid".into(), Value::Table(g));
    if let Some(m) = &cfg.mask {
        let mut t = Table::new();
        t.insert("m".into(), Value::Integer(m.m as i64));
        t.insert("n".into(), Value::Integer(m.n as i64));
        t.insert("kappa".into(), q(m.kappa, Dimension::Angle));
        t.insert("k0".into(), q(m.k0, Dimension::InverseLength));
        t.insert("radius".into(), q(m.radius, Dimension::Length));
        if let Some((c, c2)) = m.radial {
            t.insert("chirp".into(), q(c, Dimension::Area));
            t.insert("envelope".into(), q(c2, Dimension::Area));
        }
        if let Some(b) = m.binarize {
            t.insert("binarize".into(), Value::Float(b));
        }
        root.insert("mask".into(), Value::Table(t));
    }
    let d = &cfg.diffraction;
    let mut t = Table::new();
    t.insert("sideband".into(), Value::Integer(d.sideband as i64));
    if let Some(w) = d.window {
        t.insert("window".into(), q(w, Dimension::InverseLength));
    }
    if let Some(r) = d.ring {
        t.insert("ring".into(), q(r, Dimension::InverseLength));
    }
    t.insert("pad".into(), Value::Boolean(d.pad));
    t.insert("q_max".into(), Value::Integer(d.q_max as i64));
    root.insert("diffraction".into(), Value::Table(t));
    if let Some(p) = &cfg.mpi {
        let mut t = Table::new();
        t.insert("m".into(), Value::Integer(p.m as i64));
        t.insert("n".into(), Value::Integer(p.n as i64));
        t.insert("omega".into(), q(p.omega, Dimension::Energy));
        for (k, v) in [("phi_r", p.phi_r), ("phi_b", p.phi_b), ("phi_ce", p.phi_ce), ("zeta", p.zeta)] {
            t.insert(k.into(), q(v, Dimension::Angle));
        }
        t.insert("tau".into(), q(p.tau, Dimension::Time));
        t.insert("fwhm".into(), q(p.fwhm, Dimension::Time));
        t.insert("k_center".into(), q(p.k_center, Dimension::Momentum));
        t.insert("k_width".into(), q(p.k_width, Dimension::Momentum));
        t.insert("k_extent".into(), q(p.k_extent, Dimension::Momentum));
        t.insert("beta0".into(), Value::Float(p.beta0));
        t.insert("grid_size".into(), Value::Integer(p.grid_size as i64));
        let scaling = if p.energy_linear { "energy-linear" } else { "k-linear" };
        t.insert("radial_scaling".into(), Value::String(scaling.into()));
        root.insert("mpi".into(), Value::Table(t));
    }
    let mut t = Table::new();
    t.insert("samples".into(), Value::Integer(cfg.field.samples as i64));
    t.insert("periods".into(), Value::Float(cfg.field.periods));
    root.insert("field".into(), Value::Table(t));
    if let Some(p) = &cfg.topology {
        let mut t = Table::new();
        t.insert("m".into(), Value::Integer(p.m as i64));
        t.insert("n".into(), Value::Integer(p.n as i64));
        t.insert("beta_min".into(), Value::Float(p.beta_min));
        t.insert("beta_max".into(), Value::Float(p.beta_max));
        t.insert("steps".into(), Value::Integer(p.steps as i64));
        root.insert("topology".into(), Value::Table(t));
    }
    if let Some(p) = &cfg.tomography {
        let mut t = Table::new();
        t.insert("phantom".into(), Value::String(p.phantom.name().into()));
        t.insert("size".into(), Value::Integer(p.size as i64));
        t.insert("projections".into(), Value::Integer(p.projections as i64));
        t.insert("step".into(), q(p.step, Dimension::Angle));
        root.insert("tomography".into(), Value::Table(t));
    }
    toml::to_string(&root).expect("a table always serializes")
}
