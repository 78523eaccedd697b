//! Seeded generators for synthetic systems with known coupling structure.
//!
//! Every generator is deterministic in its [`SystemSpec`]: the same spec
//! yields bit-identical output. Observational noise is not applied here;
//! see [`crate::data::add_observational_noise`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{MultiSeries, TimeSeries};
use crate::error::{Error, Result};
use crate::rng::{Rng, RngExt, Seed};

/// States beyond this magnitude are treated as divergent.
const DIVERGENCE_BOUND: f64 = 1e10;

/// Bidirectionally coupled logistic maps with uniform dynamical noise on
/// the coupling terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticBidir {
    pub r1: f64,
    pub r2: f64,
    pub c_xy: f64,
    pub c_yx: f64,
    pub sigma_xy: f64,
    pub sigma_yx: f64,
}

/// Two non-interacting variables `x1`, `x2` forced by a common driver `x3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommonCause {
    pub alpha: [f64; 3],
    pub beta: [f64; 2],
    pub amp: [f64; 3],
    /// Periods of the cyclic components, in time steps.
    pub omega: [f64; 3],
    pub phi: [f64; 3],
    pub sigma: [f64; 3],
    /// Internal lags.
    pub gamma: [usize; 3],
    /// Forcing lags `x3 → x1`, `x3 → x2`.
    pub nu: [usize; 2],
    pub c31: f64,
    pub c32: f64,
}

/// `x_t = Σ_i A_i x_{t−i} + ε_t` with `ε ~ N(0, diag(σ²))`.
///
/// `coefficients[i][r][c]` is the influence of variable `c` on variable `r`
/// at lag `i + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarK {
    pub coefficients: Vec<Vec<Vec<f64>>>,
    pub sigma: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalNoise {
    pub sigma_x: f64,
    pub sigma_y: f64,
}

/// One node of the periodic autoregressive chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArNode {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub s: f64,
    pub omega: f64,
    pub phi: f64,
    pub gamma: usize,
}

/// Logistic-function coupling `c (χ − ρ x(t−τ)) / (1 + e^{−q x(t−ν)})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArLink {
    pub c: f64,
    pub chi: f64,
    pub rho: f64,
    pub q: f64,
    pub tau: usize,
    pub nu: usize,
}

/// Chain of periodic autoregressive variables with nonlinear coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArPeriodicNl {
    pub nodes: Vec<ArNode>,
    /// `links[i]` couples node `i` into node `i + 1`.
    pub links: Vec<ArLink>,
}

/// One node of the nonlinear chains built on `α x (1 − x²) e^{−x²} + β x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChenNode {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub gamma: usize,
    pub tau: usize,
    /// Period and phase of the cyclic term; ignored without periodicity.
    pub omega: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainLink {
    pub c: f64,
    pub nu: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChenChain {
    pub nodes: Vec<ChenNode>,
    pub links: Vec<ChainLink>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticLink {
    pub c: f64,
    pub sigma: f64,
    pub tau: usize,
}

/// Chain of logistic maps with internal lags `gamma` and forcing lags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticChain {
    pub r: Vec<f64>,
    pub gamma: Vec<usize>,
    pub links: Vec<LogisticLink>,
}

/// `K` unidirectionally coupled Henon maps with coupling `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HenonChain {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub k: usize,
}

/// A Rössler system driving a Lorenz system through `c_xy · x₂²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RosslerLorenz {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub c_xy: f64,
    pub dt: f64,
    pub sample_every: usize,
}

impl Default for RosslerLorenz {
    fn default() -> Self {
        RosslerLorenz {
            a1: -6.0,
            a2: 6.0,
            a3: 5.7,
            b1: 10.0,
            b2: 28.0,
            b3: 8.0 / 3.0,
            c_xy: 1.0,
            dt: 0.01,
            sample_every: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BnpNode {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub omega: f64,
    pub phi: f64,
    pub gamma: usize,
    pub tau_x: usize,
    /// Lag of the periodically modulated self term.
    pub tau: usize,
}

/// Two bidirectionally coupled nonlinear variables with periodic modulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BidirNlPeriodic {
    pub nodes: [BnpNode; 2],
    /// Coupling `x2 → x1`.
    pub c21: f64,
    /// Coupling `x1 → x2`.
    pub c12: f64,
    pub nu: [usize; 2],
}

/// Noise-free nonlinear pair with quadratic coupling `x → y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Nl2d {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub c_xy: f64,
    pub tau_x1: usize,
    pub tau_x2: usize,
    pub tau_y1: usize,
    pub tau_y2: usize,
    pub tau_c: usize,
}

/// A synthetic system and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum System {
    LogisticBidir(LogisticBidir),
    CommonCause(CommonCause),
    VarK(VarK),
    NoiseUniform,
    NoiseNormal(NormalNoise),
    NoiseBrownian,
    ArPeriodicNl(ArPeriodicNl),
    ChenLinear(ChenChain),
    ChenNonlinear(ChenChain),
    ChenPeriodic(ChenChain),
    LogisticChain(LogisticChain),
    HenonChain(HenonChain),
    RosslerLorenz(RosslerLorenz),
    BidirNlPeriodic(BidirNlPeriodic),
    Nl2d(Nl2d),
}

/// System families, without parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    LogisticBidir,
    CommonCause,
    VarK,
    NoiseUniform,
    NoiseNormal,
    NoiseBrownian,
    ArPeriodicNl,
    ChenLinear,
    ChenNonlinear,
    ChenPeriodic,
    LogisticChain,
    HenonChain,
    RosslerLorenz,
    BidirNlPeriodic,
    Nl2d,
}

impl Family {
    pub const ALL: [Family; 15] = [
        Family::LogisticBidir,
        Family::CommonCause,
        Family::VarK,
        Family::NoiseUniform,
        Family::NoiseNormal,
        Family::NoiseBrownian,
        Family::ArPeriodicNl,
        Family::ChenLinear,
        Family::ChenNonlinear,
        Family::ChenPeriodic,
        Family::LogisticChain,
        Family::HenonChain,
        Family::RosslerLorenz,
        Family::BidirNlPeriodic,
        Family::Nl2d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::LogisticBidir => "logistic_bidir",
            Family::CommonCause => "common_cause",
            Family::VarK => "var_k",
            Family::NoiseUniform => "noise_uniform",
            Family::NoiseNormal => "noise_normal",
            Family::NoiseBrownian => "noise_brownian",
            Family::ArPeriodicNl => "ar_periodic_nl",
            Family::ChenLinear => "chen_linear",
            Family::ChenNonlinear => "chen_nonlinear",
            Family::ChenPeriodic => "chen_periodic",
            Family::LogisticChain => "logistic_chain",
            Family::HenonChain => "henon_chain",
            Family::RosslerLorenz => "rossler_lorenz",
            Family::BidirNlPeriodic => "bidir_nl_periodic",
            Family::Nl2d => "nl2d",
        }
    }

    pub fn from_name(name: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == name)
            .ok_or_else(|| Error::InvalidParams(format!("unknown system family '{name}'")))
    }

    /// Observational noise, as a fraction of each series' standard
    /// deviation, applied before analysis in the robustness benchmarks.
    pub fn observational_noise(self) -> f64 {
        match self {
            Family::CommonCause | Family::BidirNlPeriodic => 0.5,
            Family::LogisticChain | Family::VarK => 0.3,
            Family::ArPeriodicNl
            | Family::ChenLinear
            | Family::ChenNonlinear
            | Family::ChenPeriodic
            | Family::HenonChain => 0.2,
            _ => 0.0,
        }
    }

    /// Largest internal or interaction lag a random draw can produce.
    pub fn max_random_lag(self) -> usize {
        match self {
            Family::CommonCause => 4,
            Family::VarK | Family::ArPeriodicNl | Family::ChenLinear | Family::ChenNonlinear => 5,
            Family::ChenPeriodic | Family::LogisticChain => 5,
            Family::HenonChain | Family::BidirNlPeriodic | Family::Nl2d => 2,
            _ => 1,
        }
    }
}

impl System {
    pub fn family(&self) -> Family {
        match self {
            System::LogisticBidir(_) => Family::LogisticBidir,
            System::CommonCause(_) => Family::CommonCause,
            System::VarK(_) => Family::VarK,
            System::NoiseUniform => Family::NoiseUniform,
            System::NoiseNormal(_) => Family::NoiseNormal,
            System::NoiseBrownian => Family::NoiseBrownian,
            System::ArPeriodicNl(_) => Family::ArPeriodicNl,
            System::ChenLinear(_) => Family::ChenLinear,
            System::ChenNonlinear(_) => Family::ChenNonlinear,
            System::ChenPeriodic(_) => Family::ChenPeriodic,
            System::LogisticChain(_) => Family::LogisticChain,
            System::HenonChain(_) => Family::HenonChain,
            System::RosslerLorenz(_) => Family::RosslerLorenz,
            System::BidirNlPeriodic(_) => Family::BidirNlPeriodic,
            System::Nl2d(_) => Family::Nl2d,
        }
    }

    /// Number of generated variables.
    pub fn width(&self) -> usize {
        match self {
            System::CommonCause(_) => 3,
            System::VarK(v) => v.sigma.len(),
            System::ArPeriodicNl(s) => s.nodes.len(),
            System::ChenLinear(s) | System::ChenNonlinear(s) | System::ChenPeriodic(s) => s.nodes.len(),
            System::LogisticChain(s) => s.r.len(),
            System::HenonChain(s) => s.k,
            _ => 2,
        }
    }

    pub fn labels(&self) -> Vec<String> {
        match self {
            System::LogisticBidir(_)
            | System::NoiseUniform
            | System::NoiseNormal(_)
            | System::NoiseBrownian
            | System::Nl2d(_) => vec!["x".into(), "y".into()],
            System::RosslerLorenz(_) => vec!["x2".into(), "y2".into()],
            _ => (1..=self.width()).map(|i| format!("x{i}")).collect(),
        }
    }

    /// Directed coupling edges implied by nonzero coefficients.
    pub fn truth(&self) -> TruthGraph {
        let mut edges = Vec::new();
        let mut chain = |cs: &mut dyn Iterator<Item = f64>| {
            for (i, c) in cs.enumerate() {
                if c != 0.0 {
                    edges.push((i, i + 1));
                }
            }
        };
        match self {
            System::ArPeriodicNl(s) => chain(&mut s.links.iter().map(|l| l.c)),
            System::ChenLinear(s) | System::ChenNonlinear(s) | System::ChenPeriodic(s) => {
                chain(&mut s.links.iter().map(|l| l.c))
            }
            System::LogisticChain(s) => chain(&mut s.links.iter().map(|l| l.c)),
            System::HenonChain(s) => chain(&mut (1..s.k).map(|_| s.c)),
            System::LogisticBidir(s) => {
                if s.c_xy != 0.0 {
                    edges.push((0, 1));
                }
                if s.c_yx != 0.0 {
                    edges.push((1, 0));
                }
            }
            System::BidirNlPeriodic(s) => {
                if s.c12 != 0.0 {
                    edges.push((0, 1));
                }
                if s.c21 != 0.0 {
                    edges.push((1, 0));
                }
            }
            System::CommonCause(s) => {
                if s.c31 != 0.0 {
                    edges.push((2, 0));
                }
                if s.c32 != 0.0 {
                    edges.push((2, 1));
                }
            }
            System::VarK(v) => {
                let p = v.sigma.len();
                for src in 0..p {
                    for dst in 0..p {
                        if src != dst && v.coefficients.iter().any(|a| a[dst][src] != 0.0) {
                            edges.push((src, dst));
                        }
                    }
                }
            }
            System::RosslerLorenz(s) if s.c_xy != 0.0 => edges.push((0, 1)),
            System::Nl2d(s) if s.c_xy != 0.0 => edges.push((0, 1)),
            _ => {}
        }
        TruthGraph { labels: self.labels(), edges }
    }

    /// Default number of discarded initial steps.
    fn default_transient(&self) -> usize {
        match self {
            System::NoiseUniform | System::NoiseNormal(_) | System::NoiseBrownian => 0,
            // 100 time units of integration.
            System::RosslerLorenz(p) => libm::round(100.0 / p.dt) as usize,
            _ => 1000,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        let lag_ok = |l: usize| l >= 1;
        match self {
            System::LogisticBidir(p) => {
                if !(0.0..=4.0).contains(&p.r1) || !(0.0..=4.0).contains(&p.r2) {
                    return bad("logistic parameters r1, r2 must lie in [0, 4]");
                }
                if p.c_xy < 0.0 || p.c_yx < 0.0 || p.sigma_xy < 0.0 || p.sigma_yx < 0.0 {
                    return bad("couplings and noise levels must be >= 0");
                }
            }
            System::CommonCause(p) => {
                if !p.gamma.iter().chain(&p.nu).all(|&l| lag_ok(l)) || p.omega.iter().any(|&w| w == 0.0) {
                    return bad("lags must be >= 1 and periods nonzero");
                }
            }
            System::VarK(v) => {
                let p = v.sigma.len();
                if p == 0 || v.coefficients.is_empty() {
                    return bad("VAR needs at least one variable and one lag");
                }
                if v.coefficients.iter().any(|a| a.len() != p || a.iter().any(|r| r.len() != p)) {
                    return bad("VAR coefficient matrices must be p x p");
                }
                match spectral_radius(&v.coefficients) {
                    Some(r) if r < 1.0 => {}
                    Some(r) => return Err(Error::NotStationary(format!("spectral radius {r:.6} >= 1"))),
                    None => return bad("VAR coefficients must be finite"),
                }
            }
            System::NoiseNormal(p) if p.sigma_x < 0.0 || p.sigma_y < 0.0 => return bad("sigmas must be >= 0"),
            System::ArPeriodicNl(s) => {
                if s.nodes.is_empty() || s.links.len() + 1 != s.nodes.len() {
                    return bad("a chain of K nodes needs K - 1 links");
                }
                if !s.nodes.iter().all(|n| lag_ok(n.gamma) && n.omega != 0.0)
                    || !s.links.iter().all(|l| lag_ok(l.tau) && lag_ok(l.nu))
                {
                    return bad("lags must be >= 1 and periods nonzero");
                }
            }
            System::ChenLinear(s) | System::ChenNonlinear(s) | System::ChenPeriodic(s) => {
                if s.nodes.is_empty() || s.links.len() + 1 != s.nodes.len() {
                    return bad("a chain of K nodes needs K - 1 links");
                }
                if !s.nodes.iter().all(|n| lag_ok(n.gamma) && lag_ok(n.tau)) || !s.links.iter().all(|l| lag_ok(l.nu)) {
                    return bad("lags must be >= 1");
                }
                if matches!(self, System::ChenPeriodic(_)) && s.nodes.iter().any(|n| n.omega == 0.0) {
                    return bad("periods must be nonzero");
                }
            }
            System::LogisticChain(s) => {
                if s.r.is_empty() || s.gamma.len() != s.r.len() || s.links.len() + 1 != s.r.len() {
                    return bad("a chain of K maps needs K values of r and gamma and K - 1 links");
                }
                if s.r.iter().any(|r| !(0.0..=4.0).contains(r)) {
                    return bad("logistic parameters must lie in [0, 4]");
                }
                if !s.gamma.iter().all(|&g| lag_ok(g))
                    || s.links.iter().any(|l| !lag_ok(l.tau) || l.c < 0.0 || !(0.0..=1.0).contains(&l.sigma))
                {
                    return bad("lags must be >= 1, couplings >= 0, sigma in [0, 1]");
                }
            }
            System::HenonChain(s) if s.k == 0 => return bad("Henon chain needs K >= 1"),
            System::RosslerLorenz(p) => {
                if !(p.dt > 0.0) || p.sample_every == 0 {
                    return bad("dt must be positive and sample_every >= 1");
                }
            }
            System::BidirNlPeriodic(s) => {
                if !s.nodes.iter().all(|n| lag_ok(n.gamma) && lag_ok(n.tau_x) && lag_ok(n.tau) && n.omega != 0.0)
                    || !s.nu.iter().all(|&l| lag_ok(l))
                {
                    return bad("lags must be >= 1 and periods nonzero");
                }
            }
            System::Nl2d(p) => {
                if ![p.tau_x1, p.tau_x2, p.tau_y1, p.tau_y2, p.tau_c].iter().all(|&l| l <= 64) {
                    return bad("lags must be at most 64");
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Directed ground-truth couplings between generated variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthGraph {
    pub labels: Vec<String>,
    /// `(source, target)` column indices.
    pub edges: Vec<(usize, usize)>,
}

impl TruthGraph {
    pub fn has_edge(&self, source: usize, target: usize) -> bool {
        self.edges.contains(&(source, target))
    }
}

/// Everything needed to reproduce one realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub system: System,
    /// Number of returned observations.
    pub n: usize,
    /// Discarded initial steps (integration steps for the ODE); family
    /// default when absent.
    #[serde(default)]
    pub transient: Option<usize>,
    /// Initial state per variable (six values for the ODE); drawn from
    /// U(0, 1) when absent.
    #[serde(default)]
    pub initial: Option<Vec<f64>>,
    pub seed: Seed,
}

impl SystemSpec {
    pub fn new(system: System, n: usize, seed: Seed) -> Self {
        SystemSpec { system, n, transient: None, initial: None, seed }
    }

    pub fn transient(&self) -> usize {
        self.transient.unwrap_or_else(|| self.system.default_transient())
    }
}

/// Generated series with their coupling structure.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub series: MultiSeries,
    pub truth: TruthGraph,
}

/// Runs the system described by `spec`.
pub fn generate(spec: &SystemSpec) -> Result<Realization> {
    if spec.n == 0 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    spec.system.validate()?;
    let mut rng = spec.seed.rng();
    let transient = spec.transient();
    let cols = match &spec.system {
        System::RosslerLorenz(p) => {
            let x0 = initial_ode(spec.initial.as_deref(), &mut rng)?;
            let states = integrate_ode(p, x0, spec.n, transient)?;
            vec![states.iter().map(|s| s[1]).collect(), states.iter().map(|s| s[4]).collect()]
        }
        sys => run_map(sys, spec, transient, &mut rng)?,
    };
    let dt = match &spec.system {
        System::RosslerLorenz(p) => p.dt * p.sample_every as f64,
        _ => 1.0,
    };
    let labels = spec.system.labels();
    let series = MultiSeries::new(
        labels
            .iter()
            .zip(cols)
            .map(|(l, v)| TimeSeries::with_dt(l.as_str(), v, dt))
            .collect::<Result<Vec<_>>>()?,
    )?;
    Ok(Realization { series, truth: spec.system.truth() })
}

fn initial_ode(given: Option<&[f64]>, rng: &mut Rng) -> Result<[f64; 6]> {
    match given {
        Some(v) => v.try_into().map_err(|_| Error::InvalidParams("the ODE needs six initial values".into())),
        None => Ok(core::array::from_fn(|_| rng.random::<f64>())),
    }
}

/// Deepest lag a map reads, which sets the initial history length.
fn history_depth(sys: &System) -> usize {
    match sys {
        System::CommonCause(p) => *p.gamma.iter().chain(&p.nu).max().unwrap(),
        System::VarK(v) => v.coefficients.len(),
        System::ArPeriodicNl(s) => s
            .nodes
            .iter()
            .map(|n| n.gamma)
            .chain(s.links.iter().flat_map(|l| [l.tau, l.nu]))
            .max()
            .unwrap(),
        System::ChenLinear(s) | System::ChenNonlinear(s) | System::ChenPeriodic(s) => s
            .nodes
            .iter()
            .flat_map(|n| [n.gamma, n.tau])
            .chain(s.links.iter().map(|l| l.nu))
            .max()
            .unwrap(),
        System::LogisticChain(s) => s.gamma.iter().copied().chain(s.links.iter().map(|l| l.tau)).max().unwrap(),
        System::HenonChain(_) => 2,
        System::BidirNlPeriodic(s) => s
            .nodes
            .iter()
            .flat_map(|n| [n.gamma, n.tau_x, n.tau])
            .chain(s.nu)
            .max()
            .unwrap(),
        // Nl2d advances x(t+1) from x(t − τ), so it reads one step deeper.
        System::Nl2d(p) => 1 + [p.tau_x1, p.tau_x2, p.tau_y1, p.tau_y2, p.tau_c].into_iter().max().unwrap(),
        System::NoiseBrownian => 1,
        _ => 1,
    }
}

/// `α x (1 − x²) e^{−x²}`.
fn chen(alpha: f64, x: f64) -> f64 {
    alpha * x * (1.0 - x * x) * libm::exp(-x * x)
}

fn cycle(t: usize, omega: f64, phi: f64) -> f64 {
    libm::cos(2.0 * PI / omega * t as f64 + phi)
}

fn normal(rng: &mut Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Iterates a map system, returning the `n` observations after the transient.
fn run_map(sys: &System, spec: &SystemSpec, transient: usize, rng: &mut Rng) -> Result<Vec<Vec<f64>>> {
    let width = sys.width();
    let depth = history_depth(sys);
    let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(depth + transient + spec.n); width];
    match (&spec.initial, sys) {
        (Some(v), _) if v.len() != width => {
            return Err(Error::InvalidParams(format!("expected {width} initial values, got {}", v.len())));
        }
        (Some(v), _) => {
            for (c, &x0) in cols.iter_mut().zip(v) {
                c.resize(depth, x0);
            }
        }
        // Sums and pure noise start from zero.
        (None, System::NoiseBrownian | System::NoiseUniform | System::NoiseNormal(_) | System::VarK(_)) => {
            for c in cols.iter_mut() {
                c.resize(depth, 0.0);
            }
        }
        (None, _) => {
            for c in cols.iter_mut() {
                for _ in 0..depth {
                    c.push(rng.random::<f64>());
                }
            }
        }
    }

    let mut next = vec![0.0; width];
    for step in 0..transient + spec.n {
        let t = depth + step;
        // `x(i, l)` is variable `i` at time `t − l`.
        let x = |i: usize, l: usize| cols[i][t - l];
        match sys {
            System::LogisticBidir(p) => {
                let (xt, yt) = (x(0, 1), x(1, 1));
                let (xi_xy, xi_yx) = (rng.random::<f64>(), rng.random::<f64>());
                let f_xy = (yt + p.c_xy * (xt + p.sigma_xy * xi_xy)) / (1.0 + p.c_xy * (1.0 + p.sigma_xy));
                let f_yx = (xt + p.c_yx * (yt + p.sigma_yx * xi_yx)) / (1.0 + p.c_yx * (1.0 + p.sigma_yx));
                next[0] = p.r1 * f_yx * (1.0 - f_yx);
                next[1] = p.r2 * f_xy * (1.0 - f_xy);
            }
            System::CommonCause(p) => {
                let forcing = |j: usize| {
                    let d = x(2, p.nu[j]);
                    d * d + p.beta[j] * d / (1.0 + libm::exp(-d))
                };
                let c = [p.c31, p.c32, 0.0];
                for i in 0..3 {
                    let own = chen(p.alpha[i], x(i, p.gamma[i])) + p.amp[i] * cycle(t, p.omega[i], p.phi[i]);
                    let drive = if i < 2 { c[i] * forcing(i) } else { 0.0 };
                    next[i] = own + drive + p.sigma[i] * rng.random::<f64>();
                }
            }
            System::VarK(v) => {
                for (i, slot) in next.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (lag, a) in v.coefficients.iter().enumerate() {
                        acc += a[i].iter().enumerate().map(|(j, c)| c * x(j, lag + 1)).sum::<f64>();
                    }
                    *slot = acc + v.sigma[i] * normal(rng);
                }
            }
            System::NoiseUniform => {
                next[0] = rng.random::<f64>();
                next[1] = rng.random::<f64>();
            }
            System::NoiseNormal(p) => {
                next[0] = p.sigma_x * normal(rng);
                next[1] = p.sigma_y * normal(rng);
            }
            System::NoiseBrownian => {
                next[0] = x(0, 1) + rng.random::<f64>();
                next[1] = x(1, 1) + rng.random::<f64>();
            }
            System::ArPeriodicNl(s) => {
                for (i, nd) in s.nodes.iter().enumerate() {
                    let mut v = nd.alpha
                        + nd.beta * x(i, nd.gamma)
                        + nd.sigma * normal(rng)
                        + nd.s * cycle(t, nd.omega, nd.phi);
                    if i > 0 {
                        let l = &s.links[i - 1];
                        v += l.c * (l.chi - l.rho * x(i - 1, l.tau)) / (1.0 + libm::exp(-l.q * x(i - 1, l.nu)));
                    }
                    next[i] = v;
                }
            }
            System::ChenLinear(s) | System::ChenNonlinear(s) | System::ChenPeriodic(s) => {
                for (i, nd) in s.nodes.iter().enumerate() {
                    let mut v = chen(nd.alpha, x(i, nd.gamma)) + nd.beta * x(i, nd.tau) + nd.sigma * normal(rng);
                    if i > 0 {
                        let l = &s.links[i - 1];
                        let d = x(i - 1, l.nu);
                        v += match sys {
                            System::ChenNonlinear(_) => l.c * d * d,
                            _ => l.c * d,
                        };
                    }
                    if matches!(sys, System::ChenPeriodic(_)) {
                        v += cycle(t, nd.omega, nd.phi);
                    }
                    next[i] = v;
                }
            }
            System::LogisticChain(s) => {
                for i in 0..s.r.len() {
                    let own = x(i, s.gamma[i]);
                    let f = if i == 0 {
                        own
                    } else {
                        let l = &s.links[i - 1];
                        let xi = rng.random::<f64>();
                        (own + l.c * (x(i - 1, l.tau) + l.sigma * xi)) / (1.0 + l.c * (1.0 + l.sigma))
                    };
                    next[i] = s.r[i] * f * (1.0 - f);
                }
            }
            System::HenonChain(s) => {
                for i in 0..s.k {
                    let own = x(i, 1);
                    let arg = if i == 0 { own } else { 0.5 * s.c * (x(i - 1, 1) + own) + (1.0 - s.c) * own };
                    next[i] = s.a - arg * arg + s.b * x(i, 2);
                }
            }
            System::BidirNlPeriodic(s) => {
                let c = [s.c21, s.c12];
                for i in 0..2 {
                    let nd = &s.nodes[i];
                    next[i] = chen(nd.alpha, x(i, nd.gamma))
                        + nd.beta * x(i, nd.tau_x)
                        + c[i] * libm::sin(x(1 - i, s.nu[i]))
                        + nd.sigma * rng.random::<f64>()
                        + cycle(t, nd.omega, nd.phi) * x(i, nd.tau);
                }
            }
            System::Nl2d(p) => {
                // x(t+1) from x(t − τ): lag τ + 1 relative to the new value.
                let (x1, x2) = (x(0, p.tau_x1 + 1), x(0, p.tau_x2 + 1));
                let (y1, y2) = (x(1, p.tau_y1 + 1), x(1, p.tau_y2 + 1));
                let xc = x(0, p.tau_c + 1);
                next[0] = chen(p.a1, x1) + p.a2 * x2;
                next[1] = p.b1 * y1 * (1.0 - y1 * y1) * libm::exp(-y2 * y2) + p.b2 * y2 + p.c_xy * xc * xc;
            }
            System::RosslerLorenz(_) => unreachable!("integrated separately"),
        }
        if next.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_BOUND) {
            return Err(Error::Diverged { step });
        }
        for (c, &v) in cols.iter_mut().zip(&next) {
            c.push(v);
        }
    }
    let skip = depth + transient;
    Ok(cols.into_iter().map(|c| c[skip..].to_vec()).collect())
}

fn rossler_lorenz_rhs(p: &RosslerLorenz, s: &[f64; 6]) -> [f64; 6] {
    let [x1, x2, x3, y1, y2, y3] = *s;
    [
        p.a1 * (x2 + x3),
        p.a2 * (x1 + 0.2 * x2),
        p.a2 * (0.2 + x3 * (x1 - p.a3)),
        p.b1 * (y2 - y1),
        y1 * (p.b2 - y3) - y2 + p.c_xy * x2 * x2,
        y1 * y2 - p.b3 * y3,
    ]
}

/// Classical fixed-step fourth-order Runge–Kutta integration of the
/// Rössler–Lorenz system. Returns `n` full states, one every
/// `sample_every` steps after `transient` steps.
pub fn integrate_ode(p: &RosslerLorenz, x0: [f64; 6], n: usize, transient: usize) -> Result<Vec<[f64; 6]>> {
    if !(p.dt > 0.0) || p.sample_every == 0 {
        return Err(Error::InvalidParams("dt must be positive and sample_every >= 1".into()));
    }
    let h = p.dt;
    let axpy = |a: &[f64; 6], k: &[f64; 6], s: f64| -> [f64; 6] { core::array::from_fn(|i| a[i] + s * k[i]) };
    let mut s = x0;
    let mut out = Vec::with_capacity(n);
    let total = transient + (n.saturating_sub(1)) * p.sample_every;
    for step in 0..=total {
        if step >= transient && (step - transient) % p.sample_every == 0 {
            out.push(s);
        }
        if step == total {
            break;
        }
        let k1 = rossler_lorenz_rhs(p, &s);
        let k2 = rossler_lorenz_rhs(p, &axpy(&s, &k1, h / 2.0));
        let k3 = rossler_lorenz_rhs(p, &axpy(&s, &k2, h / 2.0));
        let k4 = rossler_lorenz_rhs(p, &axpy(&s, &k3, h));
        s = core::array::from_fn(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        if s.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_BOUND) {
            return Err(Error::Diverged { step });
        }
    }
    Ok(out)
}

/// Largest eigenvalue modulus of the VAR companion matrix; `None` for
/// malformed or non-finite coefficients.
pub fn spectral_radius(coefficients: &[Vec<Vec<f64>>]) -> Option<f64> {
    let k = coefficients.len();
    let p = coefficients.first()?.len();
    if p == 0 || coefficients.iter().any(|a| a.len() != p || a.iter().any(|r| r.len() != p)) {
        return None;
    }
    let d = k * p;
    let mut m = DMatrix::<f64>::zeros(d, d);
    for (lag, a) in coefficients.iter().enumerate() {
        for r in 0..p {
            for c in 0..p {
                m[(r, lag * p + c)] = a[r][c];
            }
        }
    }
    for i in p..d {
        m[(i, i - p)] = 1.0;
    }
    if m.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some(m.complex_eigenvalues().iter().map(|z| libm::hypot(z.re, z.im)).fold(0.0, f64::max))
}

/// True iff every eigenvalue of the VAR companion matrix lies strictly
/// inside the unit circle.
pub fn var_is_stable(coefficients: &[Vec<Vec<f64>>]) -> bool {
    spectral_radius(coefficients).is_some_and(|r| r < 1.0)
}

/// Coupling strength for a random draw: a fixed value or a uniform range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coupling {
    Fixed(f64),
    Range(f64, f64),
}

impl Coupling {
    fn draw(self, rng: &mut Rng) -> f64 {
        match self {
            Coupling::Fixed(c) => c,
            Coupling::Range(lo, hi) if hi > lo => rng.random_range(lo..hi),
            Coupling::Range(lo, _) => lo,
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, Coupling::Fixed(c) if c == 0.0) || matches!(self, Coupling::Range(a, b) if a == 0.0 && b == 0.0)
    }
}

const VAR_REJECTION_LIMIT: usize = 1000;

fn unif(rng: &mut Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

fn lag(rng: &mut Rng, max: usize) -> usize {
    rng.random_range(1..=max)
}

/// A randomized two-variable realization of `family` with coupling
/// `x → y` (or `x1 → x2`) drawn from `coupling`; see [`random_chain`].
pub fn random_system(family: Family, coupling: Coupling, n: usize, seed: Seed) -> Result<SystemSpec> {
    random_chain(family, coupling, n, 2, seed)
}

/// Randomized realization with `chain_len` variables for chain families
/// (ignored by fixed-width families).
///
/// Parameter ranges stated in the original captions are used where
/// available; the remaining ranges are documented on each branch.
pub fn random_chain(family: Family, coupling: Coupling, n: usize, chain_len: usize, seed: Seed) -> Result<SystemSpec> {
    if chain_len < 2 {
        return Err(Error::InvalidParams("chains need at least two variables".into()));
    }
    let mut r = seed.derive(0).rng();
    let k = chain_len;
    let system = match family {
        // r and σ are not stated for this family; chosen in the chaotic regime.
        Family::LogisticBidir => System::LogisticBidir(LogisticBidir {
            r1: unif(&mut r, 3.7, 3.9),
            r2: unif(&mut r, 3.7, 3.9),
            c_xy: coupling.draw(&mut r),
            c_yx: 0.0,
            sigma_xy: 0.05,
            sigma_yx: 0.05,
        }),
        Family::CommonCause => {
            let c = coupling.draw(&mut r);
            System::CommonCause(CommonCause {
                alpha: core::array::from_fn(|_| unif(&mut r, 2.5, 4.0)),
                beta: core::array::from_fn(|_| unif(&mut r, 0.2, 0.8)),
                amp: core::array::from_fn(|_| unif(&mut r, 0.75, 1.25)),
                omega: core::array::from_fn(|_| unif(&mut r, 20.0, 100.0)),
                phi: core::array::from_fn(|_| unif(&mut r, 0.0, 2.0 * PI)),
                sigma: core::array::from_fn(|_| unif(&mut r, 0.03, 0.3)),
                gamma: core::array::from_fn(|_| lag(&mut r, 4)),
                nu: [1, 1],
                c31: c,
                c32: c,
            })
        }
        Family::VarK => random_var(&mut r, coupling)?,
        Family::NoiseUniform => System::NoiseUniform,
        Family::NoiseNormal => System::NoiseNormal(NormalNoise { sigma_x: 1.0, sigma_y: 1.0 }),
        Family::NoiseBrownian => System::NoiseBrownian,
        // Magnitude ranges are not stated; lags follow the text ({1..5}, τ ≠ ν).
        Family::ArPeriodicNl => {
            let nodes = (0..k)
                .map(|_| ArNode {
                    alpha: unif(&mut r, 0.1, 0.5),
                    beta: unif(&mut r, 0.2, 0.6),
                    sigma: unif(&mut r, 0.1, 0.3),
                    s: unif(&mut r, 0.5, 1.5),
                    omega: unif(&mut r, 5.0, 20.0),
                    phi: unif(&mut r, 0.0, 2.0 * PI),
                    gamma: lag(&mut r, 5),
                })
                .collect();
            let links = (1..k)
                .map(|_| {
                    let tau = lag(&mut r, 5);
                    let mut nu = lag(&mut r, 5);
                    while nu == tau {
                        nu = lag(&mut r, 5);
                    }
                    ArLink {
                        c: coupling.draw(&mut r),
                        chi: unif(&mut r, 0.5, 1.5),
                        rho: unif(&mut r, 0.5, 1.5),
                        q: unif(&mut r, 0.5, 1.5),
                        tau,
                        nu,
                    }
                })
                .collect();
            System::ArPeriodicNl(ArPeriodicNl { nodes, links })
        }
        // α, β follow the related bidirectional system; σ, lags are chosen.
        Family::ChenLinear | Family::ChenNonlinear | Family::ChenPeriodic => {
            let nodes = (0..k)
                .map(|_| ChenNode {
                    alpha: unif(&mut r, 3.0, 3.6),
                    beta: unif(&mut r, 0.2, 0.6),
                    sigma: unif(&mut r, 0.1, 0.3),
                    gamma: lag(&mut r, 5),
                    tau: lag(&mut r, 5),
                    omega: unif(&mut r, 5.0, 20.0),
                    phi: unif(&mut r, 0.0, 2.0 * PI),
                })
                .collect();
            let links = (1..k).map(|_| ChainLink { c: coupling.draw(&mut r), nu: lag(&mut r, 5) }).collect();
            let chain = ChenChain { nodes, links };
            match family {
                Family::ChenLinear => System::ChenLinear(chain),
                Family::ChenNonlinear => System::ChenNonlinear(chain),
                _ => System::ChenPeriodic(chain),
            }
        }
        Family::LogisticChain => System::LogisticChain(LogisticChain {
            r: (0..k).map(|_| unif(&mut r, 3.86, 3.9)).collect(),
            gamma: (0..k).map(|_| lag(&mut r, 5)).collect(),
            links: (1..k)
                .map(|_| LogisticLink { c: coupling.draw(&mut r), sigma: 0.05, tau: lag(&mut r, 5) })
                .collect(),
        }),
        Family::HenonChain => System::HenonChain(HenonChain { a: 1.4, b: 0.3, c: coupling.draw(&mut r), k }),
        Family::RosslerLorenz => {
            System::RosslerLorenz(RosslerLorenz { c_xy: coupling.draw(&mut r), ..RosslerLorenz::default() })
        }
        Family::BidirNlPeriodic => {
            let node = |r: &mut Rng| BnpNode {
                alpha: unif(r, 3.0, 3.6),
                beta: unif(r, 0.2, 0.8),
                sigma: 0.5,
                omega: unif(r, 5.0, 20.0),
                phi: unif(r, 0.0, 2.0 * PI),
                gamma: lag(r, 2),
                tau_x: 1,
                tau: 1,
            };
            let nodes = [node(&mut r), node(&mut r)];
            System::BidirNlPeriodic(BidirNlPeriodic { nodes, c21: 0.0, c12: coupling.draw(&mut r), nu: [1, 1] })
        }
        // No ranges are given; chosen to keep the deterministic map bounded.
        Family::Nl2d => System::Nl2d(Nl2d {
            a1: unif(&mut r, 3.0, 3.6),
            a2: unif(&mut r, 0.2, 0.5),
            b1: unif(&mut r, 3.0, 3.6),
            b2: unif(&mut r, 0.2, 0.5),
            c_xy: coupling.draw(&mut r),
            tau_x1: lag(&mut r, 2) - 1,
            tau_x2: lag(&mut r, 2) - 1,
            tau_y1: lag(&mut r, 2) - 1,
            tau_y2: lag(&mut r, 2) - 1,
            tau_c: lag(&mut r, 2) - 1,
        }),
    };
    Ok(SystemSpec::new(system, n, seed.derive(1)))
}

/// Bidirectional variant of [`random_system`] for `logistic_bidir` and
/// `bidir_nl_periodic`, with couplings `x → y` and `y → x`.
pub fn random_bidirectional(family: Family, c_xy: Coupling, c_yx: Coupling, n: usize, seed: Seed) -> Result<SystemSpec> {
    let mut spec = random_system(family, c_xy, n, seed)?;
    let mut r = seed.derive(2).rng();
    match &mut spec.system {
        System::LogisticBidir(p) => p.c_yx = c_yx.draw(&mut r),
        System::BidirNlPeriodic(p) => p.c21 = c_yx.draw(&mut r),
        _ => return Err(Error::InvalidParams(format!("{} is not a bidirectional family", family.name()))),
    }
    Ok(spec)
}

/// Two-variable VAR with order `k ∈ {1..5}`, one self-lag per variable
/// with coefficient `U(0.1, 0.9)`, `σ ~ U(0.95, 1.05)` and a single
/// `x1 → x2` term drawn from `coupling`; redrawn until stable.
fn random_var(r: &mut Rng, coupling: Coupling) -> Result<System> {
    for _ in 0..VAR_REJECTION_LIMIT {
        let order = lag(r, 5);
        let mut a = vec![vec![vec![0.0; 2]; 2]; order];
        for i in 0..2 {
            let l = lag(r, order);
            a[l - 1][i][i] = unif(r, 0.1, 0.9);
        }
        let cl = lag(r, order);
        a[cl - 1][1][0] = coupling.draw(r);
        let sigma = vec![unif(r, 0.95, 1.05), unif(r, 0.95, 1.05)];
        if var_is_stable(&a) {
            return Ok(System::VarK(VarK { coefficients: a, sigma }));
        }
    }
    Err(Error::RejectionLimit { attempts: VAR_REJECTION_LIMIT })
}
