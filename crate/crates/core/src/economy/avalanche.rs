use std::collections::{HashMap, VecDeque};

use super::solvent;
use crate::graph::{AgentId, TradeGraph};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AvalancheRecord {
    pub trigger_step: u64,
    /// Agents that collapsed.
    pub size_s: u32,
    /// Distinct agents examined: the trigger plus every source that lost an edge.
    pub node_count_r: u32,
    pub edges_removed: u64,
}

/// Runs a collapse cascade starting at `trigger`.
///
/// Work proceeds breadth-first. A popped agent that is still insolvent loses
/// all of its in-edges; each source of a removed edge loses one out-edge per
/// edge. A source whose solvency flips from true to false because of that
/// loss joins the queue. Agents already below threshold when first touched
/// do not collapse: only a loss of solvency does.
///
/// `trigger_step` of the returned record is left at 0 for the caller to set.
pub fn propagate_avalanche(
    graph: &mut TradeGraph,
    trigger: AgentId,
    d_th: f64,
) -> Result<AvalancheRecord> {
    cascade(graph, trigger, d_th).map(|(record, _)| record)
}

/// Cascade plus every agent it touched, paired with that agent's solvency
/// when it was first touched.
pub(crate) fn cascade(
    graph: &mut TradeGraph,
    trigger: AgentId,
    d_th: f64,
) -> Result<(AvalancheRecord, Vec<(AgentId, bool)>)> {
    if solvent(graph.out_degree(trigger), graph.in_degree(trigger), d_th) {
        return Err(Error::NotTriggered(trigger));
    }
    // value: (solvent on first touch, queued)
    let mut touched: HashMap<AgentId, (bool, bool)> = HashMap::new();
    let mut order = vec![trigger];
    touched.insert(trigger, (false, true));
    let mut queue = VecDeque::from([trigger]);
    let mut size_s = 0u32;
    let mut edges_removed = 0u64;

    while let Some(agent) = queue.pop_front() {
        if solvent(graph.out_degree(agent), graph.in_degree(agent), d_th) {
            continue;
        }
        let removed = graph.remove_in_edges(agent);
        size_s += 1;
        for (source, m) in removed {
            edges_removed += u64::from(m);
            let k_in = graph.in_degree(source);
            let k_out = graph.out_degree(source);
            let before = solvent(k_out + m, k_in, d_th);
            let after = solvent(k_out, k_in, d_th);
            let entry = touched.entry(source).or_insert_with(|| {
                order.push(source);
                (before, false)
            });
            if before && !after && !entry.1 {
                entry.1 = true;
                queue.push_back(source);
            }
        }
    }

    let record = AvalancheRecord {
        trigger_step: 0,
        size_s,
        node_count_r: u32::try_from(order.len()).expect("agent count fits in u32"),
        edges_removed,
    };
    let touched = order.into_iter().map(|a| (a, touched[&a].0)).collect();
    Ok((record, touched))
}
