use serde::Serialize;

use crate::graph::{PartitionedHost, Pattern};

const SHOWN: usize = 10;

/// Result of checking a map `φ: V(H) → V(G)`. Violation lists hold at most
/// ten entries each; the counts are complete.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    /// Pattern vertices without an image.
    pub unmapped: Vec<usize>,
    pub unmapped_count: usize,
    /// `(x, v)` with `v` not a host vertex.
    pub out_of_range: Vec<(usize, usize)>,
    pub out_of_range_count: usize,
    /// `(x, x′, v)` with `φ(x) = φ(x′) = v`, `x < x′`.
    pub injectivity: Vec<(usize, usize, usize)>,
    pub injectivity_count: usize,
    /// `(x, v, expected cluster)` with `v ∉ V_{ψ(x)}`.
    pub cluster: Vec<(usize, usize, usize)>,
    pub cluster_count: usize,
    /// `(x, y, φ(x), φ(y))` for pattern edges whose images are not adjacent.
    pub edges: Vec<(usize, usize, usize, usize)>,
    pub edge_count: usize,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.unmapped_count == 0
            && self.out_of_range_count == 0
            && self.injectivity_count == 0
            && self.cluster_count == 0
            && self.edge_count == 0
    }

    /// One line per recorded violation.
    pub fn describe(&self) -> Vec<String> {
        let mut lines = Vec::new();
        for x in &self.unmapped {
            lines.push(format!("unmapped: pattern vertex {x} has no image"));
        }
        for (x, v) in &self.out_of_range {
            lines.push(format!("out of range: {x} -> {v}"));
        }
        for (x, y, v) in &self.injectivity {
            lines.push(format!("injectivity: {x} and {y} both map to {v}"));
        }
        for (x, v, i) in &self.cluster {
            lines.push(format!("cluster: {x} -> {v} is outside cluster {i}"));
        }
        for (x, y, a, b) in &self.edges {
            lines.push(format!("edge: {{{x},{y}}} maps to non-edge {{{a},{b}}}"));
        }
        lines
    }
}

fn record<T>(list: &mut Vec<T>, count: &mut usize, item: T) {
    if list.len() < SHOWN {
        list.push(item);
    }
    *count += 1;
}

/// Checks injectivity, `φ(x) ∈ V_{ψ(x)}` and edge preservation.
pub fn verify_embedding(pattern: &Pattern, host: &PartitionedHost, phi: &[Option<usize>]) -> VerificationReport {
    let mut rep = VerificationReport::default();
    let n = pattern.vertex_count();
    let hosts = host.vertex_count();
    let mut owner: Vec<Option<usize>> = vec![None; hosts];
    let mut image = vec![None; n];
    for x in 0..n {
        match phi.get(x).copied().flatten() {
            None => record(&mut rep.unmapped, &mut rep.unmapped_count, x),
            Some(v) if v >= hosts => record(&mut rep.out_of_range, &mut rep.out_of_range_count, (x, v)),
            Some(v) => {
                image[x] = Some(v);
                match owner[v] {
                    Some(first) => record(&mut rep.injectivity, &mut rep.injectivity_count, (first, x, v)),
                    None => owner[v] = Some(x),
                }
                let expected = pattern.cluster_of(x);
                if host.locate(v).0 != expected {
                    record(&mut rep.cluster, &mut rep.cluster_count, (x, v, expected));
                }
            }
        }
    }
    for (x, y) in pattern.graph().edges() {
        if let (Some(a), Some(b)) = (image[x], image[y]) {
            if !host.has_edge(a, b) {
                record(&mut rep.edges, &mut rep.edge_count, (x, y, a, b));
            }
        }
    }
    rep
}

/// [`verify_embedding`] for a total map.
pub fn verify_total(pattern: &Pattern, host: &PartitionedHost, phi: &[usize]) -> VerificationReport {
    let partial: Vec<Option<usize>> = phi.iter().map(|&v| Some(v)).collect();
    verify_embedding(pattern, host, &partial)
}
