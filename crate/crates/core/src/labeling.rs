//! Edge labelings with cached vertex weights, their JSON form, and the
//! twin-coloring verifier.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::group::{AbelianGroup, GroupElement, GroupError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelingError {
    #[error("labeling covers {labeled} of {edges} edges")]
    LabelingIncomplete { labeled: usize, edges: usize },
    #[error("edge {0}-{1} is not in the graph")]
    UnknownEdge(usize, usize),
    #[error("edge {0}-{1} labeled twice")]
    DuplicateLabel(usize, usize),
    #[error("invalid labeling json: {0}")]
    Json(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A total edge labeling `f: E -> G` with weights `w(v) = sum f(uv)`.
/// Labels and weights are stored as element indices of `group`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeLabeling {
    group: AbelianGroup,
    edges: Vec<(usize, usize)>,
    labels: Vec<usize>,
    weights: Vec<usize>,
}

impl EdgeLabeling {
    /// Builds a labeling from per-edge element indices.
    pub fn from_indices(graph: &Graph, group: &AbelianGroup, labels: Vec<usize>) -> Self {
        assert_eq!(labels.len(), graph.edge_count(), "one label per edge");
        let mut weights = vec![0; graph.n()];
        for (e, &(u, v)) in graph.edges().iter().enumerate() {
            weights[u] = group.add_idx(weights[u], labels[e]);
            weights[v] = group.add_idx(weights[v], labels[e]);
        }
        EdgeLabeling {
            group: group.clone(),
            edges: graph.edges().to_vec(),
            labels,
            weights,
        }
    }

    pub fn from_elements(
        graph: &Graph,
        group: &AbelianGroup,
        labels: &[GroupElement],
    ) -> Result<Self, LabelingError> {
        if labels.len() != graph.edge_count() {
            return Err(LabelingError::LabelingIncomplete {
                labeled: labels.len(),
                edges: graph.edge_count(),
            });
        }
        let idx = labels
            .iter()
            .map(|l| group.index_of(l))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EdgeLabeling::from_indices(graph, group, idx))
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn edge_count(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, edge: usize) -> GroupElement {
        self.group.element_at(self.labels[edge])
    }

    pub fn label_index(&self, edge: usize) -> usize {
        self.labels[edge]
    }

    pub fn label_indices(&self) -> &[usize] {
        &self.labels
    }

    pub fn weight(&self, v: usize) -> GroupElement {
        self.group.element_at(self.weights[v])
    }

    pub fn weight_index(&self, v: usize) -> usize {
        self.weights[v]
    }

    /// No edge carries the identity.
    pub fn is_nowhere_zero(&self) -> bool {
        self.labels.iter().all(|&l| l != 0)
    }

    /// Recomputes weights from labels and compares with the cache.
    pub fn weights_consistent(&self) -> bool {
        let mut w = vec![0; self.weights.len()];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            w[u] = self.group.add_idx(w[u], self.labels[e]);
            w[v] = self.group.add_idx(w[v], self.labels[e]);
        }
        w == self.weights
    }

    pub fn to_json(&self) -> String {
        let doc = LabelingJson {
            group: self.group.to_string(),
            labels: self
                .edges
                .iter()
                .enumerate()
                .map(|(e, &(u, v))| EdgeValue {
                    edge: [u, v],
                    value: self.label(e).residues().to_vec(),
                })
                .collect(),
            weights: (0..self.weights.len())
                .map(|v| VertexValue {
                    vertex: v,
                    value: self.weight(v).residues().to_vec(),
                })
                .collect(),
            nowhere_zero: self.is_nowhere_zero(),
        };
        serde_json::to_string_pretty(&doc).expect("labeling json")
    }

    /// Parses the JSON form against `graph`. Stored weights are ignored and
    /// recomputed from the labels.
    pub fn from_json(graph: &Graph, text: &str) -> Result<Self, LabelingError> {
        let doc: LabelingJson =
            serde_json::from_str(text).map_err(|e| LabelingError::Json(e.to_string()))?;
        let group: AbelianGroup = doc.group.parse()?;
        let mut labels = vec![None; graph.edge_count()];
        for item in &doc.labels {
            let [u, v] = item.edge;
            let id = (u < graph.n() && v < graph.n())
                .then(|| graph.edge_id(u, v))
                .flatten()
                .ok_or(LabelingError::UnknownEdge(u, v))?;
            if labels[id].is_some() {
                return Err(LabelingError::DuplicateLabel(u, v));
            }
            let residues: Vec<i64> = item.value.iter().map(|&r| r as i64).collect();
            labels[id] = Some(group.index_of(&group.element(&residues)?)?);
        }
        let labeled = labels.iter().filter(|l| l.is_some()).count();
        if labeled != labels.len() {
            return Err(LabelingError::LabelingIncomplete {
                labeled,
                edges: labels.len(),
            });
        }
        let labels = labels.into_iter().map(Option::unwrap).collect();
        Ok(EdgeLabeling::from_indices(graph, &group, labels))
    }
}

#[derive(Serialize, Deserialize)]
struct LabelingJson {
    group: String,
    labels: Vec<EdgeValue>,
    #[serde(default)]
    weights: Vec<VertexValue>,
    #[serde(default)]
    nowhere_zero: bool,
}

#[derive(Serialize, Deserialize)]
struct EdgeValue {
    edge: [usize; 2],
    value: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct VertexValue {
    vertex: usize,
    value: Vec<u32>,
}

/// A concrete failure of the twin conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Two edges at `vertex` share a label.
    AdjacentEqualLabels { vertex: usize, edges: [[usize; 2]; 2] },
    /// The endpoints of `edge` have equal weights.
    WeightCollision { edge: [usize; 2] },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub proper_edge_coloring: bool,
    pub sum_distinguishing: bool,
    pub nowhere_zero: bool,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.proper_edge_coloring && self.sum_distinguishing
    }
}

/// Checks properness and weight distinction on every edge.
pub fn verify_twin(graph: &Graph, labeling: &EdgeLabeling) -> Result<VerificationReport, LabelingError> {
    if labeling.edges.as_slice() != graph.edges() {
        return Err(LabelingError::LabelingIncomplete {
            labeled: labeling.edges.len(),
            edges: graph.edge_count(),
        });
    }
    let mut violations = Vec::new();
    let mut proper = true;
    let mut seen: HashSet<usize> = HashSet::new();
    for v in 0..graph.n() {
        seen.clear();
        for (i, &(_, e)) in graph.neighbors(v).iter().enumerate() {
            if !seen.insert(labeling.labels[e]) {
                proper = false;
                let other = graph.neighbors(v)[..i]
                    .iter()
                    .find(|&&(_, f)| labeling.labels[f] == labeling.labels[e])
                    .map(|&(_, f)| f)
                    .expect("earlier edge with the same label");
                let (a, b) = (graph.edge(other), graph.edge(e));
                violations.push(Violation::AdjacentEqualLabels {
                    vertex: v,
                    edges: [[a.0, a.1], [b.0, b.1]],
                });
            }
        }
    }
    let mut distinct = true;
    for &(u, v) in graph.edges() {
        if labeling.weights[u] == labeling.weights[v] {
            distinct = false;
            violations.push(Violation::WeightCollision { edge: [u, v] });
        }
    }
    Ok(VerificationReport {
        proper_edge_coloring: proper,
        sum_distinguishing: distinct,
        nowhere_zero: labeling.is_nowhere_zero(),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(k: u64) -> AbelianGroup {
        AbelianGroup::cyclic(k).unwrap()
    }

    #[test]
    fn path_examples() {
        let p3 = Graph::path(3);
        let lab = EdgeLabeling::from_indices(&p3, &z(7), vec![1, 6]);
        let weights: Vec<usize> = (0..3).map(|v| lab.weight_index(v)).collect();
        assert_eq!(weights, vec![1, 0, 6]);
        assert!(verify_twin(&p3, &lab).unwrap().passed());

        let bad = EdgeLabeling::from_indices(&p3, &z(7), vec![1, 1]);
        let report = verify_twin(&p3, &bad).unwrap();
        assert!(!report.proper_edge_coloring);
        assert!(matches!(report.violations[0], Violation::AdjacentEqualLabels { vertex: 1, .. }));

        let star = Graph::star(2);
        let lab = EdgeLabeling::from_indices(&star, &z(4), vec![1, 2]);
        let weights: Vec<usize> = (0..3).map(|v| lab.weight_index(v)).collect();
        assert_eq!(weights, vec![3, 1, 2]);
        let report = verify_twin(&star, &lab).unwrap();
        assert!(report.passed() && report.violations.is_empty() && report.nowhere_zero);
    }

    #[test]
    fn weight_collision_reported() {
        let p4 = Graph::path(4);
        // weights 1, 3, 3, 1 over Z_5: the middle edge collides.
        let lab = EdgeLabeling::from_indices(&p4, &z(5), vec![1, 2, 1]);
        let report = verify_twin(&p4, &lab).unwrap();
        assert!(report.proper_edge_coloring && !report.sum_distinguishing);
        assert_eq!(report.violations, vec![Violation::WeightCollision { edge: [1, 2] }]);
    }

    #[test]
    fn json_round_trip() {
        let g = Graph::star(3);
        let group: AbelianGroup = "Z2xZ4".parse().unwrap();
        let lab = EdgeLabeling::from_indices(&g, &group, vec![1, 3, 5]);
        let text = lab.to_json();
        assert!(text.contains("\"group\": \"Z2xZ4\""));
        let again = EdgeLabeling::from_json(&g, &text).unwrap();
        assert_eq!(again, lab);
        assert!(again.weights_consistent());
    }

    #[test]
    fn json_rejects_bad_input() {
        let g = Graph::path(3);
        let missing = r#"{"group":"Z5","labels":[{"edge":[0,1],"value":[1]}]}"#;
        assert!(matches!(
            EdgeLabeling::from_json(&g, missing),
            Err(LabelingError::LabelingIncomplete { labeled: 1, edges: 2 })
        ));
        let unknown = r#"{"group":"Z5","labels":[{"edge":[0,2],"value":[1]}]}"#;
        assert!(matches!(
            EdgeLabeling::from_json(&g, unknown),
            Err(LabelingError::UnknownEdge(0, 2))
        ));
        let wrong_len = r#"{"group":"Z5","labels":[{"edge":[0,1],"value":[1,1]}]}"#;
        assert!(matches!(EdgeLabeling::from_json(&g, wrong_len), Err(LabelingError::Group(_))));
    }
}
