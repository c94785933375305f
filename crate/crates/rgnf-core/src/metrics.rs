//! Flow quality metrics: rank-distance similarity against a ground-truth
//! order, and the share of touchable components a swipe chain reaches.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::flow::{classify_focusability, classify_visibility, Focusability, NavFlow, VisibilityClass};
use crate::hierarchy::ViewTree;
use crate::Result;

/// Similarity of a candidate flow to a ground-truth flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    /// 1 / (1 + sqrt(sum of squared rank deltas)); 1.0 means identical order.
    pub s: f64,
    pub truth_len: usize,
    /// Truth nodes found in the candidate.
    pub matched_len: usize,
    /// (node id, candidate rank - truth rank), in truth order.
    pub per_node_rank_delta: Vec<(String, i64)>,
    pub missing_from_candidate: Vec<String>,
    pub extra_in_candidate: Vec<String>,
}

/// Compares a candidate flow against the ground truth by rank displacement.
/// Truth node i (1-based) is expected at rank i; its actual rank is its
/// 1-based position in the candidate. Truth nodes absent from the candidate
/// are placed after its end, extras keep their positions but contribute no
/// term of their own.
pub fn sequence_similarity(truth: &NavFlow, candidate: &NavFlow) -> Result<SimilarityReport> {
    if truth.is_empty() {
        return Err(Error::EmptyInput("ground-truth flow is empty".into()));
    }
    check_distinct(truth)?;
    check_distinct(candidate)?;

    let candidate_rank: HashMap<&str, i64> = candidate
        .order
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i as i64 + 1))
        .collect();
    let truth_set: HashSet<&str> = truth.order.iter().map(|s| s.as_str()).collect();

    let mut per_node_rank_delta = Vec::with_capacity(truth.len());
    let mut missing_from_candidate = Vec::new();
    let mut sum_sq = 0.0_f64;
    let mut matched_len = 0usize;
    let past_end = candidate.len() as i64 + 1;
    for (i, id) in truth.order.iter().enumerate() {
        let expected = i as i64 + 1;
        let actual = match candidate_rank.get(id.as_str()) {
            Some(&rank) => {
                matched_len += 1;
                rank
            }
            None => {
                let rank = past_end + missing_from_candidate.len() as i64;
                missing_from_candidate.push(id.clone());
                rank
            }
        };
        let delta = actual - expected;
        per_node_rank_delta.push((id.clone(), delta));
        sum_sq += (delta * delta) as f64;
    }
    let extra_in_candidate: Vec<String> = candidate
        .order
        .iter()
        .filter(|id| !truth_set.contains(id.as_str()))
        .cloned()
        .collect();

    Ok(SimilarityReport {
        s: 1.0 / (1.0 + sum_sq.sqrt()),
        truth_len: truth.len(),
        matched_len,
        per_node_rank_delta,
        missing_from_candidate,
        extra_in_candidate,
    })
}

fn check_distinct(flow: &NavFlow) -> Result<()> {
    let mut seen = HashSet::new();
    for id in &flow.order {
        if !seen.insert(id.as_str()) {
            return Err(Error::DuplicateId(id.clone()));
        }
    }
    Ok(())
}

/// How much of the touchable surface a swipe chain covers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachabilityReport {
    /// Focusable touchable components present in the flow.
    pub n: usize,
    /// All touchable components on the screen.
    pub m: usize,
    /// n / m.
    pub p: f64,
}

/// Counts touchable components (visible, enabled, non-container) and how
/// many of them the flow actually reaches via focus. Components that are
/// enabled but not focusable count toward the touchable total only.
pub fn reachability(tree: &ViewTree, flow: &NavFlow) -> Result<ReachabilityReport> {
    flow.validate(tree)?;
    let idx = tree.index();
    let mut touchable: HashSet<&str> = HashSet::new();
    let mut m = 0usize;
    for node in idx.nodes() {
        if node.is_container() || classify_visibility(node) != VisibilityClass::Visible {
            continue;
        }
        match classify_focusability(node) {
            Focusability::Focusable => {
                m += 1;
                touchable.insert(node.id.as_str());
            }
            Focusability::ReachableSilent => m += 1,
            Focusability::Unfocusable => {}
        }
    }
    if m == 0 {
        return Err(Error::EmptyInput("no touchable components on screen".into()));
    }
    let n = flow
        .order
        .iter()
        .filter(|id| touchable.contains(id.as_str()))
        .count();
    debug_assert!(n <= m);
    Ok(ReachabilityReport { n, m, p: n as f64 / m as f64 })
}
