//! Whole-chip crosstalk graph construction and DOT rendering.
//!
//! Edge tiers follow the presentation rules used for the chip graph figure:
//! edges with `beta < 0.05` are hidden (kept in the graph, excluded from
//! exports), intermediate edges are green, and edges with `beta > 0.1` are
//! strong and annotated with their `(beta, theta)` values. Boundary values
//! land in the green tier: hidden is `[0, 0.05)`, green `[0.05, 0.1]`,
//! strong `(0.1, inf)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::learning::ChipFitReport;
use crate::model::ChipTopology;

/// Display tier of a directed crosstalk edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    Hidden,
    Green,
    Strong,
}

/// Directionality color for strong edges: red when the edge points from the
/// lower-indexed qubit to the higher one, blue otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionColor {
    Red,
    Blue,
}

/// Map a fitted crosstalk strength to its display tier.
pub fn tier_for_beta(beta: f64) -> Tier {
    if beta < 0.05 {
        Tier::Hidden
    } else if beta <= 0.1 {
        Tier::Green
    } else {
        Tier::Strong
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    pub beta: f64,
    pub theta: f64,
    pub tier: Tier,
    pub direction_color: DirectionColor,
    /// Whether the pair shares a physical coupler, for coupler/crosstalk
    /// correlation reporting.
    pub has_coupler: bool,
}

/// Directed crosstalk graph over all fitted pairs. Edge `from -> to` means
/// "drive `to` induces crosstalk on measured qubit `from`" with the fitted
/// strength.
#[derive(Debug, Clone, PartialEq)]
pub struct CrosstalkGraph {
    pub nodes: Vec<usize>,
    /// One edge per fitted directed pair, sorted by `(from, to)`; hidden
    /// edges are retained here but skipped by exports.
    pub edges: Vec<GraphEdge>,
    pub coupler_edges: Vec<(usize, usize)>,
}

/// Build the crosstalk graph from a fit report and the chip topology.
pub fn build_graph(report: &ChipFitReport, topology: &ChipTopology) -> CrosstalkGraph {
    let mut edges: Vec<GraphEdge> = report
        .results
        .iter()
        .map(|r| {
            let (from, to) = r.pair;
            GraphEdge {
                from,
                to,
                beta: r.beta_hat,
                theta: r.theta_hat,
                tier: tier_for_beta(r.beta_hat),
                direction_color: if from < to { DirectionColor::Red } else { DirectionColor::Blue },
                has_coupler: topology.has_coupler(from, to),
            }
        })
        .collect();
    edges.sort_by_key(|e| (e.from, e.to));
    CrosstalkGraph {
        nodes: (0..topology.qubit_count).collect(),
        edges,
        coupler_edges: topology.coupler_edges.clone(),
    }
}

/// Three discrete pen widths keyed to the strength of a visible edge.
fn pen_width(beta: f64) -> f64 {
    if beta <= 0.1 {
        1.0
    } else if beta <= 0.15 {
        2.0
    } else {
        3.0
    }
}

/// Render the graph as Graphviz DOT. Byte-deterministic for identical
/// graphs: stable node/edge ordering, fixed-precision numeric formatting.
/// Hidden-tier edges are not emitted; strong edges carry a `(beta, theta)`
/// label. Physical coupler links appear as dashed undirected gray edges.
pub fn render_dot(graph: &CrosstalkGraph) -> String {
    let mut out = String::from("digraph crosstalk {\n");
    out.push_str("  layout=circo;\n");
    out.push_str("  node [shape=circle, fontsize=12];\n");
    for n in &graph.nodes {
        out.push_str(&format!("  q{n} [label=\"{n}\"];\n"));
    }
    for &(a, b) in &graph.coupler_edges {
        out.push_str(&format!(
            "  q{a} -> q{b} [dir=none, style=dashed, color=gray70];\n"
        ));
    }
    for e in &graph.edges {
        match e.tier {
            Tier::Hidden => continue,
            Tier::Green => {
                out.push_str(&format!(
                    "  q{} -> q{} [color=green, penwidth={:.1}];\n",
                    e.from,
                    e.to,
                    pen_width(e.beta)
                ));
            }
            Tier::Strong => {
                let color = match e.direction_color {
                    DirectionColor::Red => "red",
                    DirectionColor::Blue => "blue",
                };
                out.push_str(&format!(
                    "  q{} -> q{} [color={}, penwidth={:.1}, label=\"({:.3}, {:.3})\"];\n",
                    e.from,
                    e.to,
                    color,
                    pen_width(e.beta),
                    e.beta,
                    e.theta
                ));
            }
        }
    }
    out.push_str("}\n");
    out
}
