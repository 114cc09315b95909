//! Economic layer on top of [`TradeGraph`].
//!
//! Every edge carries one unit of labor from source to target and a payment
//! of `price(k_out(source), k_in(target))` back. Solvency is judged on
//! degrees alone: an agent stays solvent while
//! `k_out - k_in > d_th * (k_out + k_in)`.

mod avalanche;
mod sim;

pub use avalanche::{propagate_avalanche, AvalancheRecord};
pub use sim::{
    build_initial, run, step, IndexAggregator, IndexSample, SimConfig, SimDiagnostics, SimResult,
    Simulation, Threshold,
};

use crate::graph::{AgentId, TradeGraph};
use crate::{Error, Result};

/// Labor price paid by the target of an edge, in `[0, 2]`.
pub fn price(k_out_source: u32, k_in_target: u32) -> f64 {
    logistic_price(f64::from(k_out_source) - f64::from(k_in_target))
}

fn logistic_price(excess_demand: f64) -> f64 {
    2.0 / (1.0 + (-excess_demand).exp())
}

/// Mean price over all edges, parallel edges counted with multiplicity.
pub fn mean_alpha(graph: &TradeGraph) -> Result<f64> {
    if graph.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    let sum: f64 = graph
        .edges()
        .map(|(e, m)| f64::from(m) * price(graph.out_degree(e.source), graph.in_degree(e.target)))
        .sum();
    Ok(sum / graph.edge_count() as f64)
}

/// Mean-field internal energy `(1 - alpha) (k_out - k_in)`.
pub fn internal_energy(agent: &AgentState, alpha: f64) -> f64 {
    (1.0 - alpha) * (f64::from(agent.k_out) - f64::from(agent.k_in))
}

/// Degree-form solvency predicate. Isolated agents are solvent.
pub fn solvent(k_out: u32, k_in: u32, d_th: f64) -> bool {
    let turnover = k_out + k_in;
    if turnover == 0 {
        return true;
    }
    f64::from(k_out) - f64::from(k_in) > d_th * f64::from(turnover)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgentState {
    pub k_out: u32,
    pub k_in: u32,
}

impl AgentState {
    pub fn of(graph: &TradeGraph, agent: AgentId) -> Self {
        Self {
            k_out: graph.out_degree(agent),
            k_in: graph.in_degree(agent),
        }
    }

    pub fn turnover(&self) -> u32 {
        self.k_out + self.k_in
    }

    /// Percentual deficit `U / T`; `None` for an isolated agent.
    pub fn deficit(&self, alpha: f64) -> Option<f64> {
        match self.turnover() {
            0 => None,
            t => Some(internal_energy(self, alpha) / f64::from(t)),
        }
    }

    pub fn is_solvent(&self, d_th: f64) -> bool {
        solvent(self.k_out, self.k_in, d_th)
    }
}

/// Per-agent internal energy using each edge's own price instead of the
/// mean-field average. Sums to zero up to rounding.
pub fn edge_priced_energies(graph: &TradeGraph) -> Vec<f64> {
    let mut energy = vec![0.0; graph.n_agents()];
    for (e, m) in graph.edges() {
        let p = price(graph.out_degree(e.source), graph.in_degree(e.target));
        let m = f64::from(m);
        energy[e.source.index()] += m * (1.0 - p);
        energy[e.target.index()] += m * (p - 1.0);
    }
    energy
}
