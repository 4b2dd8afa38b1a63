//! Label Cover instances and their reduction to min-max selection.
//!
//! Every edge `(v, w)` becomes a group whose tools are the label pairs
//! `(i, sigma_vw(i))`. For each vertex and each `g` distinct incident edges,
//! every choice of pairwise label-distinct tools on those edges yields a 0/1
//! scenario charging exactly those tools. A final all-zero scenario keeps the
//! scenario set nonempty. Selections of cost at most one correspond to total
//! labelings using one label per vertex.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, Selection};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub v: usize,
    pub w: usize,
    /// Partial label map, `map[i] = Some(j)` when `sigma(i) = j`. Length `labels`.
    pub map: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCoverInstance {
    /// Number of left vertices `|V|`.
    pub left: usize,
    /// Number of right vertices `|W|`.
    pub right: usize,
    pub labels: usize,
    pub edges: Vec<Edge>,
}

impl LabelCoverInstance {
    pub fn check(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for e in &self.edges {
            if e.v >= self.left || e.w >= self.right {
                return Err(Error::InvalidArgument(format!(
                    "edge ({}, {}) leaves the vertex sets",
                    e.v, e.w
                )));
            }
            if !seen.insert((e.v, e.w)) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate edge ({}, {})",
                    e.v, e.w
                )));
            }
            if e.map.len() != self.labels {
                return Err(Error::InvalidArgument(format!(
                    "edge ({}, {}) maps {} labels, expected {}",
                    e.v,
                    e.w,
                    e.map.len(),
                    self.labels
                )));
            }
            if e.map.iter().flatten().any(|&j| j >= self.labels) {
                return Err(Error::InvalidArgument(format!(
                    "edge ({}, {}) maps outside the label set",
                    e.v, e.w
                )));
            }
        }
        Ok(())
    }

    fn sorted_edges(&self) -> Vec<&Edge> {
        let mut edges: Vec<&Edge> = self.edges.iter().collect();
        edges.sort_by_key(|e| (e.v, e.w));
        edges
    }

    /// Whether the labeling satisfies every edge.
    pub fn is_total(&self, left: &[BTreeSet<usize>], right: &[BTreeSet<usize>]) -> bool {
        self.edges.iter().all(|e| {
            left[e.v]
                .iter()
                .any(|&a| e.map[a].is_some_and(|b| right[e.w].contains(&b)))
        })
    }
}

/// A tool of the reduced instance: label `left` on vertex `v` and label
/// `right` on vertex `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LabeledTool {
    pub v: usize,
    pub w: usize,
    pub left: usize,
    pub right: usize,
}

/// True iff the two tools never put the same label twice on a shared vertex.
pub fn label_distinct(a: &LabeledTool, b: &LabeledTool) -> bool {
    !(a.left == b.left && a.v == b.v) && !(a.right == b.right && a.w == b.w)
}

#[derive(Debug, Clone, Copy)]
pub struct ReductionConfig {
    /// Gap target: the number of unit-cost tools per scenario.
    pub g: usize,
    pub scenario_cap: u128,
}

impl ReductionConfig {
    pub fn new(g: usize) -> Self {
        ReductionConfig {
            g,
            scenario_cap: super::DEFAULT_SCENARIO_CAP,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub instance: Instance,
    /// Label pair of every tool, by global tool index.
    pub tools: Vec<LabeledTool>,
    /// Edge `(v, w)` of every group, in group order.
    pub edges: Vec<(usize, usize)>,
    /// Label-distinct tuples found before deduplication.
    pub enumerated: u64,
    /// Tuples dropped because an identical scenario already existed.
    pub duplicates: u64,
}

impl Reduction {
    /// Labeling read off a selection: every chosen tool contributes its
    /// labels to the two endpoints of its edge.
    pub fn labeling(&self, lc: &LabelCoverInstance, sel: &Selection) -> (Vec<BTreeSet<usize>>, Vec<BTreeSet<usize>>) {
        let mut left = vec![BTreeSet::new(); lc.left];
        let mut right = vec![BTreeSet::new(); lc.right];
        for &t in sel.chosen() {
            let tool = self.tools[t];
            left[tool.v].insert(tool.left);
            right[tool.w].insert(tool.right);
        }
        (left, right)
    }
}

/// `|V||W|^g N^g + |W||V|^g N^g + 1`, saturating.
pub fn scenario_bound(lc: &LabelCoverInstance, g: usize) -> u128 {
    let pow = |b: usize| (b as u128).checked_pow(g as u32).unwrap_or(u128::MAX);
    let v = lc.left as u128;
    let w = lc.right as u128;
    let n = pow(lc.labels);
    v.saturating_mul(pow(lc.right))
        .saturating_mul(n)
        .saturating_add(w.saturating_mul(pow(lc.left)).saturating_mul(n))
        .saturating_add(1)
}

pub fn reduce_labelcover(lc: &LabelCoverInstance, cfg: ReductionConfig) -> Result<Reduction> {
    lc.check()?;
    if cfg.g == 0 {
        return Err(Error::InvalidArgument("gap target g must be at least 1".into()));
    }
    let edges = lc.sorted_edges();
    let mut groups = Vec::with_capacity(edges.len());
    let mut tools = Vec::new();
    for e in &edges {
        let group: Vec<usize> = e
            .map
            .iter()
            .enumerate()
            .filter_map(|(i, m)| {
                m.map(|j| {
                    tools.push(LabeledTool {
                        v: e.v,
                        w: e.w,
                        left: i,
                        right: j,
                    });
                    tools.len() - 1
                })
            })
            .collect();
        if group.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "edge ({}, {}) has no defined label, its group would be empty",
                e.v, e.w
            )));
        }
        groups.push(group);
    }

    let mut incident_left = vec![Vec::new(); lc.left];
    let mut incident_right = vec![Vec::new(); lc.right];
    for (gi, e) in edges.iter().enumerate() {
        incident_left[e.v].push(gi);
        incident_right[e.w].push(gi);
    }

    let mut enumerator = Enumerator {
        groups: &groups,
        tools: &tools,
        cap: cfg.scenario_cap,
        seen: HashSet::new(),
        scenarios: Vec::new(),
        enumerated: 0,
        duplicates: 0,
    };
    for incident in incident_left.iter().chain(&incident_right) {
        for combo in combinations(incident, cfg.g) {
            enumerator.tuples(&combo, &mut Vec::new())?;
        }
    }

    let n = tools.len();
    let mut costs: Vec<Vec<u64>> = enumerator
        .scenarios
        .iter()
        .map(|set| {
            let mut row = vec![0; n];
            for &t in set {
                row[t] = 1;
            }
            row
        })
        .collect();
    costs.push(vec![0; n]);
    let (enumerated, duplicates) = (enumerator.enumerated, enumerator.duplicates);
    Ok(Reduction {
        instance: Instance::new(groups, costs)?,
        tools,
        edges: edges.iter().map(|e| (e.v, e.w)).collect(),
        enumerated,
        duplicates,
    })
}

struct Enumerator<'a> {
    groups: &'a [Vec<usize>],
    tools: &'a [LabeledTool],
    cap: u128,
    seen: HashSet<Vec<usize>>,
    scenarios: Vec<Vec<usize>>,
    enumerated: u64,
    duplicates: u64,
}

impl Enumerator<'_> {
    /// Extends `partial` with one tool per remaining group of `combo`,
    /// keeping the tuple pairwise label distinct.
    fn tuples(&mut self, combo: &[usize], partial: &mut Vec<usize>) -> Result<()> {
        let Some((&first, rest)) = combo.split_first() else {
            self.enumerated += 1;
            let mut key = partial.clone();
            key.sort_unstable();
            if self.seen.insert(key.clone()) {
                // the all-zero scenario is appended at the end
                let total = self.scenarios.len() as u128 + 2;
                if total > self.cap {
                    return Err(Error::CapExceeded {
                        what: "label-cover reduction scenario count",
                        size: total,
                        cap: self.cap,
                    });
                }
                self.scenarios.push(key);
            } else {
                self.duplicates += 1;
            }
            return Ok(());
        };
        for &t in &self.groups[first] {
            let tool = &self.tools[t];
            if partial
                .iter()
                .all(|&u| label_distinct(&self.tools[u], tool))
            {
                partial.push(t);
                self.tuples(rest, partial)?;
                partial.pop();
            }
        }
        Ok(())
    }
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::new(), &mut out);
    out
}

const VALUE_MAX_VERTICES: usize = 6;
const VALUE_MAX_LABELS: usize = 3;

/// Smallest `max_x |l(x)|` over total labelings, by exhaustive search.
/// `None` when no total labeling exists. Only for tiny instances.
pub fn label_cover_value(lc: &LabelCoverInstance) -> Result<Option<usize>> {
    lc.check()?;
    let vertices = lc.left + lc.right;
    if vertices > VALUE_MAX_VERTICES || lc.labels > VALUE_MAX_LABELS {
        return Err(Error::CapExceeded {
            what: "label-cover value search (vertices, labels)",
            size: (vertices.max(lc.labels)) as u128,
            cap: VALUE_MAX_VERTICES.min(VALUE_MAX_LABELS) as u128,
        });
    }
    for bound in 0..=lc.labels {
        let masks: Vec<u32> = (0u32..1 << lc.labels)
            .filter(|m| m.count_ones() as usize <= bound)
            .collect();
        let mut assignment = vec![0u32; vertices];
        if search(lc, &masks, &mut assignment, 0) {
            return Ok(Some(bound));
        }
    }
    Ok(None)
}

fn search(lc: &LabelCoverInstance, masks: &[u32], assignment: &mut [u32], next: usize) -> bool {
    if next == assignment.len() {
        return lc.edges.iter().all(|e| {
            let lv = assignment[e.v];
            let lw = assignment[lc.left + e.w];
            (0..lc.labels).any(|a| lv >> a & 1 == 1 && e.map[a].is_some_and(|b| lw >> b & 1 == 1))
        });
    }
    for &m in masks {
        assignment[next] = m;
        if search(lc, masks, assignment, next + 1) {
            return true;
        }
    }
    false
}
