//! Instances of the representatives selection problem under a discrete
//! scenario set, together with the two robust objectives.
//!
//! Tools carry global 0-based indices. A group is a set of tool indices and
//! the groups partition `0..n`. Costs form a `K x n` matrix of nonnegative
//! integers, one row per scenario.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A broken structural invariant found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoGroups,
    EmptyGroup { group: usize },
    ToolOutOfRange { group: usize, tool: usize, tools: usize },
    GroupsNotDisjoint { tool: usize, first: usize, second: usize },
    ToolNotCovered { tool: usize },
    NoScenarios,
    RaggedCosts { row: usize, len: usize, expected: usize },
    NamesLength { len: usize, expected: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoGroups => write!(f, "no groups"),
            Violation::EmptyGroup { group } => write!(f, "group {group} is empty"),
            Violation::ToolOutOfRange { group, tool, tools } => {
                write!(f, "group {group} names tool {tool} but n = {tools}")
            }
            Violation::GroupsNotDisjoint {
                tool,
                first,
                second,
            } => write!(
                f,
                "groups not disjoint: tool {tool} in groups {first} and {second}"
            ),
            Violation::ToolNotCovered { tool } => write!(f, "tool {tool} belongs to no group"),
            Violation::NoScenarios => write!(f, "no scenarios"),
            Violation::RaggedCosts { row, len, expected } => write!(
                f,
                "ragged costs: row {row} has {len} entries, expected {expected}"
            ),
            Violation::NamesLength { len, expected } => {
                write!(f, "{len} tool names given for {expected} tools")
            }
        }
    }
}

/// Checks every structural invariant and returns all violations found.
///
/// The tool count `n` is the total size of all groups, so a duplicated
/// index shows up both as a disjointness violation and as an uncovered tool.
pub fn validate(groups: &[Vec<usize>], costs: &[Vec<u64>]) -> Vec<Violation> {
    let mut out = Vec::new();
    if groups.is_empty() {
        out.push(Violation::NoGroups);
    }
    let n: usize = groups.iter().map(Vec::len).sum();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for (g, tools) in groups.iter().enumerate() {
        if tools.is_empty() {
            out.push(Violation::EmptyGroup { group: g });
        }
        for &t in tools {
            if t >= n {
                out.push(Violation::ToolOutOfRange {
                    group: g,
                    tool: t,
                    tools: n,
                });
                continue;
            }
            match owner[t] {
                Some(first) => out.push(Violation::GroupsNotDisjoint {
                    tool: t,
                    first,
                    second: g,
                }),
                None => owner[t] = Some(g),
            }
        }
    }
    for (t, o) in owner.iter().enumerate() {
        if o.is_none() {
            out.push(Violation::ToolNotCovered { tool: t });
        }
    }
    if costs.is_empty() {
        out.push(Violation::NoScenarios);
    }
    for (k, row) in costs.iter().enumerate() {
        if row.len() != n {
            out.push(Violation::RaggedCosts {
                row: k,
                len: row.len(),
                expected: n,
            });
        }
    }
    out
}

/// A validated instance. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceParts", into = "InstanceParts")]
pub struct Instance {
    groups: Vec<Vec<usize>>,
    costs: Vec<Vec<u64>>,
    names: Option<Vec<String>>,
    group_of: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct InstanceParts {
    groups: Vec<Vec<usize>>,
    costs: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    names: Option<Vec<String>>,
}

impl TryFrom<InstanceParts> for Instance {
    type Error = Error;

    fn try_from(p: InstanceParts) -> Result<Self> {
        let inst = Instance::new(p.groups, p.costs)?;
        match p.names {
            Some(names) => inst.with_names(names),
            None => Ok(inst),
        }
    }
}

impl From<Instance> for InstanceParts {
    fn from(i: Instance) -> Self {
        InstanceParts {
            groups: i.groups,
            costs: i.costs,
            names: i.names,
        }
    }
}

impl Instance {
    pub fn new(groups: Vec<Vec<usize>>, costs: Vec<Vec<u64>>) -> Result<Self> {
        let violations = validate(&groups, &costs);
        if !violations.is_empty() {
            return Err(Error::InvalidInstance(violations));
        }
        let n = groups.iter().map(Vec::len).sum();
        let mut group_of = vec![0; n];
        for (g, tools) in groups.iter().enumerate() {
            for &t in tools {
                group_of[t] = g;
            }
        }
        Ok(Instance {
            groups,
            costs,
            names: None,
            group_of,
        })
    }

    /// Builds an instance whose groups are consecutive index ranges of the
    /// given sizes.
    pub fn with_group_sizes(sizes: &[usize], costs: Vec<Vec<u64>>) -> Result<Self> {
        let mut next = 0;
        let groups = sizes
            .iter()
            .map(|&r| {
                let g: Vec<usize> = (next..next + r).collect();
                next += r;
                g
            })
            .collect();
        Instance::new(groups, costs)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.num_tools() {
            return Err(Error::InvalidInstance(vec![Violation::NamesLength {
                len: names.len(),
                expected: self.num_tools(),
            }]));
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn num_tools(&self) -> usize {
        self.group_of.len()
    }

    pub fn num_scenarios(&self) -> usize {
        self.costs.len()
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn group(&self, i: usize) -> &[usize] {
        &self.groups[i]
    }

    pub fn group_of(&self, tool: usize) -> usize {
        self.group_of[tool]
    }

    pub fn costs(&self) -> &[Vec<u64>] {
        &self.costs
    }

    pub fn scenario(&self, k: usize) -> &[u64] {
        &self.costs[k]
    }

    pub fn cost(&self, k: usize, tool: usize) -> u64 {
        self.costs[k][tool]
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn r_max(&self) -> usize {
        self.groups.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Largest cost of `tool` over all scenarios.
    pub fn max_cost(&self, tool: usize) -> u64 {
        self.costs.iter().map(|row| row[tool]).max().unwrap_or(0)
    }

    /// Number of feasible selections, `prod r_i`, saturating at `u128::MAX`.
    pub fn selection_count(&self) -> u128 {
        self.groups
            .iter()
            .fold(1u128, |acc, g| acc.saturating_mul(g.len() as u128))
    }

    pub fn check_selection(&self, sel: &Selection) -> Result<()> {
        if sel.0.len() != self.num_groups() {
            return Err(Error::InvalidSelection(format!(
                "{} tools chosen for {} groups",
                sel.0.len(),
                self.num_groups()
            )));
        }
        for (i, &t) in sel.0.iter().enumerate() {
            if t >= self.num_tools() || self.group_of[t] != i {
                return Err(Error::InvalidSelection(format!(
                    "tool {t} is not in group {i}"
                )));
            }
        }
        Ok(())
    }

    fn check_scenario(&self, k: usize) -> Result<()> {
        if k >= self.num_scenarios() {
            return Err(Error::ScenarioOutOfRange {
                index: k,
                count: self.num_scenarios(),
            });
        }
        Ok(())
    }

    /// `F(X, S_k)`: total cost of the selection under scenario `k`.
    pub fn eval_scenario(&self, sel: &Selection, k: usize) -> Result<u64> {
        self.check_selection(sel)?;
        self.check_scenario(k)?;
        Ok(self.load(sel, k))
    }

    fn load(&self, sel: &Selection, k: usize) -> u64 {
        let row = &self.costs[k];
        sel.0.iter().map(|&t| row[t]).sum()
    }

    /// `F*(S_k)`: cheapest tool of every group under scenario `k`.
    pub fn scenario_optimum(&self, k: usize) -> Result<u64> {
        self.check_scenario(k)?;
        Ok(self.optimum_of(k))
    }

    fn optimum_of(&self, k: usize) -> u64 {
        let row = &self.costs[k];
        self.groups
            .iter()
            .map(|g| g.iter().map(|&t| row[t]).min().unwrap_or(0))
            .sum()
    }

    /// `F*(S_k)` for every scenario.
    pub fn scenario_optima(&self) -> Vec<u64> {
        (0..self.num_scenarios()).map(|k| self.optimum_of(k)).collect()
    }

    pub fn evaluate(&self, sel: &Selection) -> Result<EvaluationReport> {
        self.check_selection(sel)?;
        let per_scenario_cost: Vec<u64> = (0..self.num_scenarios())
            .map(|k| self.load(sel, k))
            .collect();
        let scenario_optima = self.scenario_optima();
        let regrets: Vec<u64> = per_scenario_cost
            .iter()
            .zip(&scenario_optima)
            .map(|(c, o)| c - o)
            .collect();
        Ok(EvaluationReport {
            cost1: per_scenario_cost.iter().copied().max().unwrap_or(0),
            cost2: regrets.iter().copied().max().unwrap_or(0),
            per_scenario_cost,
            scenario_optima,
            regrets,
        })
    }

    /// Worst-case cost, panicking on an invalid selection.
    pub fn cost1(&self, sel: &Selection) -> u64 {
        self.evaluate(sel).expect("valid selection").cost1
    }

    pub fn cost2(&self, sel: &Selection) -> u64 {
        self.evaluate(sel).expect("valid selection").cost2
    }

    pub fn objective_value(&self, sel: &Selection, objective: Objective) -> Result<u64> {
        let r = self.evaluate(sel)?;
        Ok(match objective {
            Objective::MinMax => r.cost1,
            Objective::Regret => r.cost2,
        })
    }
}

/// One chosen tool per group, in group order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Selection(pub Vec<usize>);

impl Selection {
    pub fn chosen(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, tool: usize) -> bool {
        self.0.contains(&tool)
    }
}

impl From<Vec<usize>> for Selection {
    fn from(v: Vec<usize>) -> Self {
        Selection(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    MinMax,
    Regret,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::MinMax => "minmax",
            Objective::Regret => "regret",
        })
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minmax" => Ok(Objective::MinMax),
            "regret" => Ok(Objective::Regret),
            other => Err(Error::InvalidArgument(format!("unknown objective {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvaluationReport {
    pub per_scenario_cost: Vec<u64>,
    pub cost1: u64,
    pub scenario_optima: Vec<u64>,
    pub regrets: Vec<u64>,
    pub cost2: u64,
}

#[cfg(test)]
pub(crate) fn ref_a() -> Instance {
    Instance::with_group_sizes(&[2, 2], vec![vec![1, 3, 2, 0], vec![2, 0, 1, 4]]).unwrap()
}
