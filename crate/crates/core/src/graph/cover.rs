use std::collections::BTreeMap;

use super::ConflictGraph;
use crate::error::{Error, Result};

/// Vertex cover from a maximal matching built by scanning edges in
/// lexicographic order; both endpoints of each matched edge are taken.
pub fn approx_min_vertex_cover(g: &ConflictGraph) -> Vec<usize> {
    let mut matched = vec![false; g.num_nodes()];
    for (i, j) in g.edges() {
        if !matched[i] && !matched[j] {
            matched[i] = true;
            matched[j] = true;
        }
    }
    (0..g.num_nodes()).filter(|&i| matched[i]).collect()
}

/// Disjoint node groups whose union covers every edge and whose members
/// share one neighborhood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverPartition {
    groups: Vec<Vec<usize>>,
    neighborhoods: Vec<Vec<usize>>,
}

impl CoverPartition {
    /// Checks the feasibility conditions and caches each group's neighborhood.
    /// Members are sorted; group order is kept.
    pub fn new(g: &ConflictGraph, groups: Vec<Vec<usize>>) -> Result<Self> {
        let n = g.num_nodes();
        let mut owner = vec![usize::MAX; n];
        let mut sorted = Vec::with_capacity(groups.len());
        let mut neighborhoods = Vec::with_capacity(groups.len());
        for (t, mut group) in groups.into_iter().enumerate() {
            if group.is_empty() {
                return Err(Error::InfeasiblePartition(format!("group {} is empty", t + 1)));
            }
            group.sort_unstable();
            for &i in &group {
                if i >= n {
                    return Err(Error::InfeasiblePartition(format!("node {i} out of range")));
                }
                if owner[i] != usize::MAX {
                    return Err(Error::InfeasiblePartition(format!("node {} is in two groups", i + 1)));
                }
                owner[i] = t;
            }
            let first = g.neighbors(group[0]);
            if let Some(&bad) = group.iter().find(|&&i| g.neighbors(i) != first) {
                return Err(Error::InfeasiblePartition(format!(
                    "node {} has a different neighborhood than node {} in group {}",
                    bad + 1,
                    group[0] + 1,
                    t + 1
                )));
            }
            neighborhoods.push(first.to_vec());
            sorted.push(group);
        }
        let members: Vec<usize> = sorted.iter().flatten().copied().collect();
        if let Some((i, j)) = g.uncovered_edge(&members) {
            return Err(Error::InfeasiblePartition(format!(
                "groups do not cover edge {{{}, {}}}",
                i + 1,
                j + 1
            )));
        }
        Ok(CoverPartition { groups: sorted, neighborhoods })
    }

    /// One singleton group per non-isolated node.
    pub fn singletons(g: &ConflictGraph) -> Self {
        let groups = g.non_isolated().into_iter().map(|i| vec![i]).collect();
        Self::new(g, groups).expect("singletons of all non-isolated nodes form a feasible partition")
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn group(&self, t: usize) -> &[usize] {
        &self.groups[t]
    }

    /// The cached neighborhood of group `t`.
    pub fn neighborhood(&self, t: usize) -> &[usize] {
        &self.neighborhoods[t]
    }

    /// Union of all groups, sorted.
    pub fn cover(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.groups.iter().flatten().copied().collect();
        out.sort_unstable();
        out
    }

    pub fn group_of(&self, node: usize) -> Option<usize> {
        self.groups.iter().position(|grp| grp.binary_search(&node).is_ok())
    }

    /// Re-runs the feasibility checks against `g`.
    pub fn check(&self, g: &ConflictGraph) -> Result<()> {
        let rebuilt = Self::new(g, self.groups.clone())?;
        if rebuilt.neighborhoods != self.neighborhoods {
            return Err(Error::InfeasiblePartition("stale neighborhood cache".into()));
        }
        Ok(())
    }
}

/// Splits a vertex cover into classes of nodes with identical neighborhoods.
/// Groups are ordered by their smallest member.
pub fn feasible_cover_partition(g: &ConflictGraph, cover: &[usize]) -> Result<CoverPartition> {
    if let Some(&i) = cover.iter().find(|&&i| i >= g.num_nodes()) {
        return Err(Error::InfeasiblePartition(format!("cover node {i} out of range")));
    }
    if let Some((i, j)) = g.uncovered_edge(cover) {
        return Err(Error::NotACover(i, j));
    }
    let mut nodes = cover.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    let mut classes: BTreeMap<&[usize], Vec<usize>> = BTreeMap::new();
    for &i in &nodes {
        classes.entry(g.neighbors(i)).or_default().push(i);
    }
    let mut groups: Vec<Vec<usize>> = classes.into_values().collect();
    groups.sort_by_key(|grp| grp[0]);
    CoverPartition::new(g, groups)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_cover_examples() {
        assert!(approx_min_vertex_cover(&ConflictGraph::empty(4)).is_empty());
        let g = ConflictGraph::new(2, &[(0, 1)]).unwrap();
        assert_eq!(approx_min_vertex_cover(&g), vec![0, 1]);
        let c5 = ConflictGraph::cycle(5);
        let cover = approx_min_vertex_cover(&c5);
        assert!(cover.len() <= 4);
        assert!(c5.is_vertex_cover(&cover));
    }

    #[test]
    fn identical_neighborhoods_merge() {
        let k22 = ConflictGraph::new(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        let p = feasible_cover_partition(&k22, &[0, 1]).unwrap();
        assert_eq!(p.groups(), &[vec![0, 1]]);
        assert_eq!(p.neighborhood(0), &[2, 3]);
    }

    #[test]
    fn distinct_neighborhoods_split() {
        let g = ConflictGraph::new(4, &[(0, 2), (1, 3)]).unwrap();
        let p = feasible_cover_partition(&g, &[0, 1]).unwrap();
        assert_eq!(p.groups(), &[vec![0], vec![1]]);
        let tri = ConflictGraph::complete(3);
        let p = feasible_cover_partition(&tri, &[0, 1]).unwrap();
        assert_eq!(p.groups(), &[vec![0], vec![1]]);
    }

    #[test]
    fn uncovered_edge_is_an_error() {
        let tri = ConflictGraph::complete(3);
        assert!(matches!(feasible_cover_partition(&tri, &[0]), Err(Error::NotACover(1, 2))));
    }

    #[test]
    fn infeasible_groups_are_rejected() {
        let tri = ConflictGraph::complete(3);
        assert!(CoverPartition::new(&tri, vec![vec![0, 1]]).is_err());
        assert!(CoverPartition::new(&tri, vec![vec![0], vec![0, 1]]).is_err());
        assert!(CoverPartition::new(&tri, vec![vec![]]).is_err());
        assert!(CoverPartition::new(&tri, vec![vec![0], vec![1]]).is_ok());
    }
}
