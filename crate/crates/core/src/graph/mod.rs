//! Directed trade multigraph.
//!
//! Agents are dense integer ids. An edge `source -> target` is one labor
//! connection: the source delivers labor to the target. Parallel edges are
//! kept as multiplicities in the target's in-adjacency map; self-loops are
//! rejected.
//!
//! Preferential sampling draws an agent with probability proportional to
//! `degree + 1` in the requested direction, through a [`SumTree`] per
//! direction so that both sampling and degree updates are `O(log N)`.

mod sum_tree;

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};

use rand::Rng;

pub use sum_tree::SumTree;

use crate::stats::{fit_power_law, FitMethod, FitOptions, PowerLawFit, Xmin};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(pub u32);

impl AgentId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for AgentId {
    fn from(i: usize) -> Self {
        AgentId(u32::try_from(i).expect("agent index fits in u32"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub source: AgentId,
    pub target: AgentId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeGraph {
    out_degree: Vec<u32>,
    in_degree: Vec<u32>,
    /// `in_edges[t]` maps each source of an edge into `t` to its multiplicity.
    in_edges: Vec<BTreeMap<AgentId, u32>>,
    edge_count: u64,
    out_weights: SumTree,
    in_weights: SumTree,
}

impl TradeGraph {
    pub fn new(n_agents: usize) -> Result<Self> {
        if n_agents < 2 {
            return Err(Error::InvalidConfiguration(format!(
                "need at least 2 agents, got {n_agents}"
            )));
        }
        if n_agents > u32::MAX as usize {
            return Err(Error::InvalidConfiguration(format!(
                "too many agents: {n_agents}"
            )));
        }
        let ones = vec![1u64; n_agents];
        Ok(Self {
            out_degree: vec![0; n_agents],
            in_degree: vec![0; n_agents],
            in_edges: vec![BTreeMap::new(); n_agents],
            edge_count: 0,
            out_weights: SumTree::new(&ones),
            in_weights: SumTree::new(&ones),
        })
    }

    pub fn n_agents(&self) -> usize {
        self.out_degree.len()
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> {
        (0..self.n_agents()).map(AgentId::from)
    }

    pub fn out_degree(&self, agent: AgentId) -> u32 {
        self.out_degree[agent.index()]
    }

    pub fn in_degree(&self, agent: AgentId) -> u32 {
        self.in_degree[agent.index()]
    }

    pub fn degree(&self, agent: AgentId, direction: Direction) -> u32 {
        match direction {
            Direction::In => self.in_degree(agent),
            Direction::Out => self.out_degree(agent),
        }
    }

    pub fn degrees(&self, direction: Direction) -> &[u32] {
        match direction {
            Direction::In => &self.in_degree,
            Direction::Out => &self.out_degree,
        }
    }

    /// Sources of edges into `target`, with multiplicities, in id order.
    pub fn in_neighbors(&self, target: AgentId) -> impl Iterator<Item = (AgentId, u32)> + '_ {
        self.in_edges[target.index()].iter().map(|(&s, &m)| (s, m))
    }

    /// Every edge with multiplicity, grouped by target.
    pub fn edges(&self) -> impl Iterator<Item = (Edge, u32)> + '_ {
        self.in_edges.iter().enumerate().flat_map(|(t, sources)| {
            let target = AgentId::from(t);
            sources
                .iter()
                .map(move |(&source, &m)| (Edge { source, target }, m))
        })
    }

    fn check(&self, agent: AgentId) {
        assert!(
            agent.index() < self.n_agents(),
            "agent {agent} out of range for {} agents",
            self.n_agents()
        );
    }

    pub fn add_edge(&mut self, source: AgentId, target: AgentId) -> Result<Edge> {
        self.check(source);
        self.check(target);
        if source == target {
            return Err(Error::SelfLoop(source));
        }
        self.out_degree[source.index()] += 1;
        self.in_degree[target.index()] += 1;
        self.out_weights.add(source.index(), 1);
        self.in_weights.add(target.index(), 1);
        *self.in_edges[target.index()].entry(source).or_insert(0) += 1;
        self.edge_count += 1;
        Ok(Edge { source, target })
    }

    /// Removes every edge pointing at `target`.
    ///
    /// Returns the affected sources with the number of edges each one lost,
    /// in id order. Each listed source's out-degree has already been reduced.
    pub fn remove_in_edges(&mut self, target: AgentId) -> Vec<(AgentId, u32)> {
        self.check(target);
        let removed = std::mem::take(&mut self.in_edges[target.index()]);
        let lost = self.in_degree[target.index()];
        self.in_degree[target.index()] = 0;
        self.in_weights.sub(target.index(), u64::from(lost));
        self.edge_count -= u64::from(lost);
        for (&source, &m) in &removed {
            self.out_degree[source.index()] -= m;
            self.out_weights.sub(source.index(), u64::from(m));
        }
        removed.into_iter().collect()
    }

    /// Draws an agent with probability proportional to `degree + 1`.
    pub fn sample_preferential<R: Rng + ?Sized>(
        &self,
        direction: Direction,
        rng: &mut R,
        exclude: Option<AgentId>,
    ) -> AgentId {
        let weights = match direction {
            Direction::In => &self.in_weights,
            Direction::Out => &self.out_weights,
        };
        let slot = match exclude {
            Some(agent) => {
                self.check(agent);
                weights.sample_excluding(rng, agent.index())
            }
            None => weights.sample(rng),
        };
        AgentId::from(slot)
    }

    pub fn degree_histogram(&self, direction: Direction) -> DegreeHistogram {
        DegreeHistogram::from_degrees(self.degrees(direction), direction)
    }

    pub fn degree_ccdf(&self, direction: Direction) -> Vec<(u32, f64)> {
        self.degree_histogram(direction).ccdf()
    }

    /// Writes the edge list, one `source,target` line per edge (parallel
    /// edges repeated), sorted by source then target.
    pub fn write_edge_list<W: Write>(&self, mut out: W, step: u64) -> io::Result<()> {
        writeln!(
            out,
            "# agents={} edges={} step={}",
            self.n_agents(),
            self.edge_count,
            step
        )?;
        let mut edges: Vec<(Edge, u32)> = self.edges().collect();
        edges.sort_by_key(|(e, _)| (e.source, e.target));
        for (e, m) in edges {
            for _ in 0..m {
                writeln!(out, "{},{}", e.source, e.target)?;
            }
        }
        Ok(())
    }

    /// Recounts degrees from the edge multiset and compares them with the
    /// stored counters and sampling weights.
    pub fn verify_conservation(&self) -> bool {
        let n = self.n_agents();
        let mut outs = vec![0u32; n];
        let mut ins = vec![0u32; n];
        let mut total = 0u64;
        for (e, m) in self.edges() {
            if e.source == e.target || m == 0 {
                return false;
            }
            outs[e.source.index()] += m;
            ins[e.target.index()] += m;
            total += u64::from(m);
        }
        let weights_ok = (0..n).all(|i| {
            self.out_weights.weight(i) == u64::from(outs[i]) + 1
                && self.in_weights.weight(i) == u64::from(ins[i]) + 1
        });
        outs == self.out_degree && ins == self.in_degree && total == self.edge_count && weights_ok
    }
}

/// Degree → number of agents with that degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeHistogram {
    pub direction: Direction,
    pub counts: BTreeMap<u32, usize>,
}

impl DegreeHistogram {
    pub fn from_degrees(degrees: &[u32], direction: Direction) -> Self {
        let mut counts = BTreeMap::new();
        for &d in degrees {
            *counts.entry(d).or_insert(0) += 1;
        }
        Self { direction, counts }
    }

    pub fn n_agents(&self) -> usize {
        self.counts.values().sum()
    }

    /// `(k, P(k* >= k))` over observed degrees, starting at 1.
    pub fn ccdf(&self) -> Vec<(u32, f64)> {
        let n = self.n_agents() as f64;
        let mut remaining = self.n_agents();
        let mut out = Vec::with_capacity(self.counts.len());
        for (&k, &c) in &self.counts {
            out.push((k, remaining as f64 / n));
            remaining -= c;
        }
        out
    }

    /// Expands back into one degree value per agent, ascending.
    pub fn values(&self) -> Vec<u32> {
        self.counts
            .iter()
            .flat_map(|(&k, &c)| std::iter::repeat_n(k, c))
            .collect()
    }

    /// Degree exponent from a least-squares fit to the log-log CCDF of the
    /// nonzero degrees. The returned `exponent` is `gamma`; the CCDF slope
    /// is `1 - gamma`.
    pub fn exponent_fit(&self) -> Result<PowerLawFit> {
        let degrees: Vec<f64> = self
            .values()
            .into_iter()
            .filter(|&k| k > 0)
            .map(f64::from)
            .collect();
        fit_power_law(
            &degrees,
            &FitOptions {
                method: FitMethod::CcdfRegression,
                xmin: Xmin::Fixed(1.0),
                discrete: false,
            },
        )
    }
}
