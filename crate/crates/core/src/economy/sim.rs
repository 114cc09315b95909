use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::avalanche::{cascade, AvalancheRecord};
use super::{logistic_price, solvent};
use crate::criticality::critical_threshold;
use crate::graph::{AgentId, DegreeHistogram, Direction, TradeGraph};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Fixed(f64),
    /// Solve from the criticality condition for `gamma_target` and `k_out_init`.
    Auto,
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Fixed(x) => write!(f, "{x}"),
            Threshold::Auto => f.write_str("auto"),
        }
    }
}

impl FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Threshold::Auto);
        }
        s.parse::<f64>()
            .map(Threshold::Fixed)
            .map_err(|_| Error::InvalidConfiguration(format!("d_th must be a number or `auto`, got `{s}`")))
    }
}

/// How per-agent internal energies are folded into the index `U_t`.
///
/// The mean-field total is identically zero, so the index is built from
/// per-edge priced energies instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IndexAggregator {
    /// Sum of positive energies.
    #[default]
    Assets,
    /// Half the sum of absolute energies.
    Absolute,
    /// Plain sum; zero up to rounding, kept as a diagnostic.
    Net,
}

impl fmt::Display for IndexAggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IndexAggregator::Assets => "assets",
            IndexAggregator::Absolute => "absolute",
            IndexAggregator::Net => "net",
        })
    }
}

impl FromStr for IndexAggregator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "assets" => Ok(IndexAggregator::Assets),
            "absolute" => Ok(IndexAggregator::Absolute),
            "net" => Ok(IndexAggregator::Net),
            other => Err(Error::InvalidConfiguration(format!(
                "unknown aggregator `{other}` (expected assets, absolute or net)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_agents: usize,
    /// Out-edges every agent starts with.
    pub k_out_init: u32,
    pub gamma_target: f64,
    pub d_th: Threshold,
    pub n_steps: u64,
    pub sample_stride: u64,
    pub seed: u64,
    pub index_aggregator: IndexAggregator,
    /// Number of evenly spaced in-degree snapshots to keep.
    pub degree_snapshots: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_agents: 2000,
            k_out_init: 1,
            gamma_target: 2.5,
            d_th: Threshold::Auto,
            n_steps: 100_000,
            sample_stride: 5,
            seed: 1,
            index_aggregator: IndexAggregator::Assets,
            degree_snapshots: 4,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfiguration(msg));
        if self.n_agents < 2 {
            return bad(format!("n_agents must be >= 2, got {}", self.n_agents));
        }
        if self.k_out_init < 1 {
            return bad("k_out_init must be >= 1".into());
        }
        if self.sample_stride < 1 {
            return bad("sample_stride must be >= 1".into());
        }
        if !(self.gamma_target.is_finite() && self.gamma_target > 0.0) {
            return bad(format!("gamma_target must be > 0, got {}", self.gamma_target));
        }
        if let Threshold::Fixed(d) = self.d_th {
            if !(0.0..1.0).contains(&d) {
                return bad(format!("d_th must lie in [0, 1), got {d}"));
            }
        }
        Ok(())
    }

    /// The collapse threshold actually used by a run.
    pub fn resolved_d_th(&self) -> Result<f64> {
        match self.d_th {
            Threshold::Fixed(d) => Ok(d),
            Threshold::Auto => Ok(critical_threshold(self.gamma_target, self.k_out_init)?.d_th),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexSample {
    pub step: u64,
    pub value: f64,
    pub alpha_mean: f64,
}

/// Invariant bookkeeping gathered while a simulation runs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimDiagnostics {
    /// Largest `|sum_i (1 - alpha)(k_out - k_in)|` seen at a sample.
    pub max_zero_sum_residual: f64,
    /// Avalanches after which at least one agent anywhere was insolvent.
    pub avalanches_leaving_insolvent_agents: u64,
    /// Largest number of insolvent agents right after an avalanche.
    pub max_insolvent_after_avalanche: usize,
    /// Touched agents that were solvent before an avalanche and insolvent after.
    pub closure_violations: u64,
    /// Degree counters matched a full recount at the end of the run.
    pub conservation_ok: bool,
}

#[derive(Debug, Clone)]
pub struct SimResult {
    pub config: SimConfig,
    pub d_th: f64,
    pub index_series: Vec<IndexSample>,
    pub avalanches: Vec<AvalancheRecord>,
    pub final_graph: TradeGraph,
    pub degree_snapshots: Vec<(u64, DegreeHistogram)>,
    pub diagnostics: SimDiagnostics,
}

impl SimResult {
    pub fn avalanche_sizes(&self) -> Vec<f64> {
        self.avalanches.iter().map(|a| f64::from(a.size_s)).collect()
    }

    pub fn index_levels(&self) -> Vec<f64> {
        self.index_series.iter().map(|s| s.value).collect()
    }
}

/// Every agent gets `k_out_init` out-edges. Agents are visited in a fresh
/// random order per round and each picks a target by in-degree preference,
/// never itself. No solvency checks happen here.
pub fn build_initial<R: Rng + ?Sized>(config: &SimConfig, rng: &mut R) -> Result<TradeGraph> {
    config.validate()?;
    let mut graph = TradeGraph::new(config.n_agents)?;
    let mut order: Vec<AgentId> = graph.agents().collect();
    for _ in 0..config.k_out_init {
        order.shuffle(rng);
        for &agent in &order {
            let target = graph.sample_preferential(Direction::In, rng, Some(agent));
            graph.add_edge(agent, target)?;
        }
    }
    Ok(graph)
}

/// One event-time: a preferentially chosen source starts working for a
/// preferentially chosen target. If that pushes the target from solvent to
/// insolvent, the resulting avalanche is returned (with `trigger_step` 0).
pub fn step<R: Rng + ?Sized>(graph: &mut TradeGraph, d_th: f64, rng: &mut R) -> Option<AvalancheRecord> {
    step_traced(graph, d_th, rng).map(|(r, _)| r)
}

fn step_traced<R: Rng + ?Sized>(
    graph: &mut TradeGraph,
    d_th: f64,
    rng: &mut R,
) -> Option<(AvalancheRecord, Vec<(AgentId, bool)>)> {
    let source = graph.sample_preferential(Direction::Out, rng, None);
    let mut target = graph.sample_preferential(Direction::In, rng, None);
    while target == source {
        target = graph.sample_preferential(Direction::In, rng, None);
    }
    let was_solvent = solvent(graph.out_degree(target), graph.in_degree(target), d_th);
    graph
        .add_edge(source, target)
        .expect("source and target are distinct");
    if was_solvent && !solvent(graph.out_degree(target), graph.in_degree(target), d_th) {
        let (record, touched) = cascade(graph, target, d_th).expect("target just became insolvent");
        Some((record, touched))
    } else {
        None
    }
}

/// Prices for integer degree differences, memoised over a symmetric window.
/// Outside the window the formula is evaluated directly.
#[derive(Debug, Clone)]
struct PriceTable {
    half_width: i64,
    values: Vec<f64>,
}

impl PriceTable {
    fn new(half_width: i64) -> Self {
        let values = (-half_width..=half_width)
            .map(|x| logistic_price(x as f64))
            .collect();
        Self { half_width, values }
    }

    fn get(&self, k_out: u32, k_in: u32) -> f64 {
        let x = i64::from(k_out) - i64::from(k_in);
        if x.abs() <= self.half_width {
            self.values[(x + self.half_width) as usize]
        } else {
            logistic_price(x as f64)
        }
    }
}

/// Stateful driver around [`step`], with sampling and invariant tracking.
pub struct Simulation {
    config: SimConfig,
    d_th: f64,
    graph: TradeGraph,
    rng: ChaCha8Rng,
    step: u64,
    prices: PriceTable,
    energies: Vec<f64>,
    diagnostics: SimDiagnostics,
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let d_th = config.resolved_d_th()?;
        if !(0.0..1.0).contains(&d_th) {
            return Err(Error::InvalidConfiguration(format!(
                "resolved d_th {d_th} outside [0, 1)"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let graph = build_initial(&config, &mut rng)?;
        let n = graph.n_agents();
        Ok(Self {
            config,
            d_th,
            graph,
            rng,
            step: 0,
            prices: PriceTable::new(1024),
            energies: vec![0.0; n],
            diagnostics: SimDiagnostics::default(),
        })
    }

    pub fn graph(&self) -> &TradeGraph {
        &self.graph
    }

    pub fn d_th(&self) -> f64 {
        self.d_th
    }

    pub fn current_step(&self) -> u64 {
        self.step
    }

    pub fn advance(&mut self) -> Option<AvalancheRecord> {
        self.step += 1;
        let (mut record, touched) = step_traced(&mut self.graph, self.d_th, &mut self.rng)?;
        record.trigger_step = self.step;

        let g = &self.graph;
        let d_th = self.d_th;
        for (agent, was_solvent) in touched {
            if was_solvent && !solvent(g.out_degree(agent), g.in_degree(agent), d_th) {
                self.diagnostics.closure_violations += 1;
            }
        }
        let insolvent = g
            .agents()
            .filter(|&i| !solvent(g.out_degree(i), g.in_degree(i), d_th))
            .count();
        if insolvent > 0 {
            self.diagnostics.avalanches_leaving_insolvent_agents += 1;
        }
        let worst = &mut self.diagnostics.max_insolvent_after_avalanche;
        *worst = (*worst).max(insolvent);
        Some(record)
    }

    /// Index value and mean price for the current graph.
    pub fn sample(&mut self) -> IndexSample {
        let g = &self.graph;
        self.energies.iter_mut().for_each(|e| *e = 0.0);
        let mut price_sum = 0.0;
        for (e, m) in g.edges() {
            let p = self.prices.get(g.out_degree(e.source), g.in_degree(e.target));
            let m = f64::from(m);
            price_sum += m * p;
            self.energies[e.source.index()] += m * (1.0 - p);
            self.energies[e.target.index()] += m * (p - 1.0);
        }
        let alpha_mean = if g.edge_count() > 0 {
            price_sum / g.edge_count() as f64
        } else {
            f64::NAN
        };
        if alpha_mean.is_finite() {
            let residual: f64 = g
                .agents()
                .map(|i| (1.0 - alpha_mean) * (f64::from(g.out_degree(i)) - f64::from(g.in_degree(i))))
                .sum();
            let worst = &mut self.diagnostics.max_zero_sum_residual;
            *worst = worst.max(residual.abs());
        }
        let value = match self.config.index_aggregator {
            IndexAggregator::Assets => self.energies.iter().map(|u| u.max(0.0)).sum(),
            IndexAggregator::Absolute => 0.5 * self.energies.iter().map(|u| u.abs()).sum::<f64>(),
            IndexAggregator::Net => self.energies.iter().sum(),
        };
        IndexSample {
            step: self.step,
            value,
            alpha_mean,
        }
    }

    pub fn run(mut self) -> SimResult {
        let n_steps = self.config.n_steps;
        let stride = self.config.sample_stride;
        let snapshots = self.config.degree_snapshots as u64;
        let snapshot_steps: Vec<u64> = if n_steps == 0 {
            Vec::new()
        } else {
            (1..=snapshots).map(|k| k * n_steps / snapshots).filter(|&s| s > 0).collect()
        };
        let mut next_snapshot = 0;

        let mut index_series = Vec::with_capacity((n_steps / stride) as usize);
        let mut avalanches = Vec::new();
        let mut degree_snapshots = Vec::with_capacity(snapshot_steps.len());
        for _ in 0..n_steps {
            if let Some(record) = self.advance() {
                avalanches.push(record);
            }
            if self.step % stride == 0 {
                index_series.push(self.sample());
            }
            while next_snapshot < snapshot_steps.len() && snapshot_steps[next_snapshot] == self.step {
                degree_snapshots.push((self.step, self.graph.degree_histogram(Direction::In)));
                next_snapshot += 1;
            }
        }
        self.diagnostics.conservation_ok = self.graph.verify_conservation();
        SimResult {
            config: self.config,
            d_th: self.d_th,
            index_series,
            avalanches,
            final_graph: self.graph,
            degree_snapshots,
            diagnostics: self.diagnostics,
        }
    }
}

pub fn run(config: &SimConfig) -> Result<SimResult> {
    Ok(Simulation::new(config.clone())?.run())
}
