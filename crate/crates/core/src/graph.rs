//! Undirected simple graphs, per-node neighbourhoods, and the AND/OR rules
//! that turn a set of neighbourhoods into a single graph.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::Confusion;

/// Undirected simple graph on vertices `0..p`.
///
/// Edges are stored canonically as `(min, max)`, so iteration order is sorted
/// by first then second endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    p: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn empty(p: usize) -> Self {
        Graph {
            p,
            edges: BTreeSet::new(),
        }
    }

    /// Builds a graph from unordered pairs. Self-loops and out-of-range
    /// vertices are rejected; duplicate pairs collapse.
    pub fn from_edges<I>(p: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(p);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(p: usize) -> Self {
        let edges = (0..p)
            .flat_map(|u| (u + 1..p).map(move |v| (u, v)))
            .collect();
        Graph { p, edges }
    }

    /// Inserts `{u, v}`. Returns whether the edge was new.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        if u == v {
            return Err(Error::invalid(format!("self-loop on vertex {u}")));
        }
        if u >= self.p || v >= self.p {
            return Err(Error::invalid(format!(
                "edge {{{u},{v}}} out of range for p={}",
                self.p
            )));
        }
        Ok(self.edges.insert(canonical(u, v)))
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.edges.contains(&canonical(u, v))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted canonical edges.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        (0..self.p).filter(|&u| self.has_edge(u, v)).collect()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.p];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Number of unordered vertex pairs, `p(p-1)/2`.
    pub fn pair_count(&self) -> usize {
        self.p * self.p.saturating_sub(1) / 2
    }

    pub fn is_connected(&self) -> bool {
        if self.p == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.p];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut seen = vec![false; self.p];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.p == other.p && self.edges.is_subset(&other.edges)
    }
}

fn canonical(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// The neighbourhood claimed for a single target vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighbourhoodSet {
    target: usize,
    members: BTreeSet<usize>,
}

impl NeighbourhoodSet {
    pub fn new<I>(target: usize, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if members.contains(&target) {
            return Err(Error::invalid(format!(
                "vertex {target} listed in its own neighbourhood"
            )));
        }
        Ok(NeighbourhoodSet { target, members })
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn contains(&self, u: usize) -> bool {
        self.members.contains(&u)
    }
}

/// Symmetrisation rule for per-node neighbourhood claims.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    /// Keep `{u,v}` only if each endpoint claims the other.
    And,
    /// Keep `{u,v}` if either endpoint claims the other.
    Or,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::And => "and",
            Rule::Or => "or",
        })
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "and" => Ok(Rule::And),
            "or" => Ok(Rule::Or),
            other => Err(Error::invalid(format!("unknown rule `{other}`"))),
        }
    }
}

/// Combines one neighbourhood per vertex into an undirected graph.
///
/// The list may come in any order but must cover `0..p` exactly once, where
/// `p` is the list length.
pub fn combine(neighbourhoods: &[NeighbourhoodSet], rule: Rule) -> Result<Graph> {
    let p = neighbourhoods.len();
    let mut by_target: Vec<Option<&NeighbourhoodSet>> = vec![None; p];
    for nb in neighbourhoods {
        let v = nb.target;
        if v >= p {
            return Err(Error::invalid(format!(
                "target {v} out of range for {p} neighbourhoods"
            )));
        }
        if by_target[v].replace(nb).is_some() {
            return Err(Error::invalid(format!("duplicate neighbourhood for target {v}")));
        }
        if let Some(&u) = nb.members.iter().find(|&&u| u >= p) {
            return Err(Error::invalid(format!(
                "member {u} of N_{v} out of range for p={p}"
            )));
        }
    }
    // Every slot is filled: p entries, no duplicates, all in range.
    let by_target: Vec<&NeighbourhoodSet> = by_target.into_iter().flatten().collect();

    let mut g = Graph::empty(p);
    for nb in &by_target {
        let v = nb.target;
        for &u in &nb.members {
            let keep = match rule {
                Rule::Or => true,
                Rule::And => by_target[u].contains(v),
            };
            if keep {
                g.add_edge(u, v)?;
            }
        }
    }
    Ok(g)
}

/// Counts agreement between an estimated and a true graph over all unordered
/// pairs.
pub fn graph_diff(estimate: &Graph, truth: &Graph) -> Result<Confusion> {
    if estimate.p != truth.p {
        return Err(Error::invalid(format!(
            "vertex count mismatch: estimate p={}, truth p={}",
            estimate.p, truth.p
        )));
    }
    let est: HashSet<_> = estimate.edges.iter().collect();
    let tp = truth.edges.iter().filter(|e| est.contains(e)).count();
    let fp = estimate.edge_count() - tp;
    let fn_ = truth.edge_count() - tp;
    let tn = truth.pair_count() - tp - fp - fn_;
    Ok(Confusion { tp, fp, fn_, tn })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nbs(sets: &[&[usize]]) -> Vec<NeighbourhoodSet> {
        sets.iter()
            .enumerate()
            .map(|(v, m)| NeighbourhoodSet::new(v, m.iter().copied()).unwrap())
            .collect()
    }

    #[test]
    fn and_keeps_symmetric_claims() {
        let g = combine(&nbs(&[&[1], &[0], &[]]), Rule::And).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn one_sided_claim_and_vs_or() {
        let input = nbs(&[&[1], &[], &[]]);
        assert_eq!(combine(&input, Rule::And).unwrap().edge_count(), 0);
        let or = combine(&input, Rule::Or).unwrap();
        assert_eq!(or.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn empty_neighbourhoods_give_empty_graph() {
        let input = nbs(&[&[], &[], &[], &[]]);
        for rule in [Rule::And, Rule::Or] {
            let g = combine(&input, rule).unwrap();
            assert_eq!(g.p(), 4);
            assert_eq!(g.edge_count(), 0);
        }
    }

    #[test]
    fn combine_rejects_bad_lists() {
        let mut dup = nbs(&[&[1], &[0]]);
        dup[1] = NeighbourhoodSet::new(0, [1]).unwrap();
        assert!(matches!(combine(&dup, Rule::Or), Err(Error::InvalidInput(_))));

        let out_of_range = vec![
            NeighbourhoodSet::new(0, [5]).unwrap(),
            NeighbourhoodSet::new(1, []).unwrap(),
        ];
        assert!(combine(&out_of_range, Rule::And).is_err());

        let missing = vec![
            NeighbourhoodSet::new(0, []).unwrap(),
            NeighbourhoodSet::new(2, []).unwrap(),
        ];
        assert!(combine(&missing, Rule::And).is_err());
    }

    #[test]
    fn neighbourhood_excludes_target() {
        assert!(NeighbourhoodSet::new(2, [0, 2]).is_err());
    }

    #[test]
    fn graph_rejects_loops_and_range() {
        let mut g = Graph::empty(3);
        assert!(g.add_edge(1, 1).is_err());
        assert!(g.add_edge(0, 3).is_err());
        assert!(g.add_edge(2, 0).unwrap());
        assert!(!g.add_edge(0, 2).unwrap());
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 2)]);
    }

    #[test]
    fn diff_identity() {
        let g = Graph::from_edges(10, [(0, 1), (2, 3), (4, 5), (6, 7), (8, 9)]).unwrap();
        let c = graph_diff(&g, &g).unwrap();
        assert_eq!((c.tp, c.fp, c.fn_, c.tn), (5, 0, 0, 40));
    }

    #[test]
    fn diff_empty_estimate() {
        let truth = Graph::from_edges(6, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let c = graph_diff(&Graph::empty(6), &truth).unwrap();
        assert_eq!((c.tp, c.fn_), (0, 3));
    }

    #[test]
    fn diff_hand_enumerated() {
        // Pairs of {0..4}: 01 02 03 12 13 23.
        // truth {01,23}, estimate {01,12}: 01 TP, 12 FP, 23 FN, 02 03 13 TN.
        let truth = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let est = Graph::from_edges(4, [(0, 1), (1, 2)]).unwrap();
        let c = graph_diff(&est, &truth).unwrap();
        assert_eq!((c.tp, c.fp, c.fn_, c.tn), (1, 1, 1, 3));
    }

    #[test]
    fn diff_p_mismatch() {
        assert!(graph_diff(&Graph::empty(3), &Graph::empty(4)).is_err());
    }

    fn arb_neighbourhoods() -> impl Strategy<Value = Vec<Vec<bool>>> {
        (2usize..8).prop_flat_map(|p| proptest::collection::vec(proptest::collection::vec(any::<bool>(), p), p))
    }

    fn to_sets(mask: &[Vec<bool>]) -> Vec<NeighbourhoodSet> {
        mask.iter()
            .enumerate()
            .map(|(v, row)| {
                let members = row.iter().enumerate().filter(|&(u, &b)| b && u != v).map(|(u, _)| u);
                NeighbourhoodSet::new(v, members).unwrap()
            })
            .collect()
    }

    proptest! {
        #[test]
        fn and_subset_of_or(mask in arb_neighbourhoods()) {
            let sets = to_sets(&mask);
            let and = combine(&sets, Rule::And).unwrap();
            let or = combine(&sets, Rule::Or).unwrap();
            prop_assert!(and.is_subgraph_of(&or));
        }

        #[test]
        fn combine_permutation_invariant(mask in arb_neighbourhoods(), seed in any::<u64>()) {
            let sets = to_sets(&mask);
            let mut shuffled = sets.clone();
            // deterministic Fisher-Yates driven by the seed
            let mut s = seed;
            for i in (1..shuffled.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (s >> 33) as usize % (i + 1);
                shuffled.swap(i, j);
            }
            for rule in [Rule::And, Rule::Or] {
                prop_assert_eq!(combine(&sets, rule).unwrap(), combine(&shuffled, rule).unwrap());
            }
        }

        #[test]
        fn diff_counts_cover_all_pairs(a in arb_neighbourhoods(), b in arb_neighbourhoods()) {
            let p = a.len().min(b.len());
            let trim = |m: &Vec<Vec<bool>>| -> Vec<Vec<bool>> {
                m[..p].iter().map(|r| r[..p].to_vec()).collect()
            };
            let ga = combine(&to_sets(&trim(&a)), Rule::Or).unwrap();
            let gb = combine(&to_sets(&trim(&b)), Rule::And).unwrap();
            let c = graph_diff(&ga, &gb).unwrap();
            prop_assert_eq!(c.tp + c.fp + c.fn_ + c.tn, p * (p - 1) / 2);
        }
    }
}
