use std::collections::{BTreeSet, VecDeque};

use super::ConflictGraph;

pub const DEFAULT_MAX_HOLE_LEN: usize = 9;

/// True when `cycle` (in order) is a cycle of `g` with no chords.
pub fn is_chordless_cycle(g: &ConflictGraph, cycle: &[usize]) -> bool {
    let k = cycle.len();
    if k < 3 {
        return false;
    }
    let distinct: BTreeSet<_> = cycle.iter().collect();
    if distinct.len() != k {
        return false;
    }
    for a in 0..k {
        for b in a + 1..k {
            let consecutive = b == a + 1 || (a == 0 && b == k - 1);
            if g.has_edge(cycle[a], cycle[b]) != consecutive {
                return false;
            }
        }
    }
    true
}

/// Rotates and orients a cycle so it starts at its smallest node and
/// continues towards the smaller of that node's two cycle neighbors.
fn canonical(mut cycle: Vec<usize>) -> Vec<usize> {
    let start = (0..cycle.len()).min_by_key(|&i| cycle[i]).unwrap_or(0);
    cycle.rotate_left(start);
    if cycle.len() > 2 && cycle[cycle.len() - 1] < cycle[1] {
        cycle[1..].reverse();
    }
    cycle
}

/// Chordless odd cycles of length 5..=`max_len`, found heuristically.
///
/// For every node `s` and every non-adjacent pair `a < b` of its neighbors, a
/// shortest `a`-`b` path avoiding the rest of `N[s]` closes an induced cycle
/// through `s`. Cycles are deduplicated by node set and returned in canonical
/// rotation, sorted by length and then lexicographically.
pub fn odd_holes(g: &ConflictGraph, max_len: usize) -> Vec<Vec<usize>> {
    let n = g.num_nodes();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut found = Vec::new();
    let mut blocked = vec![false; n];
    let mut prev = vec![usize::MAX; n];
    for s in 0..n {
        let ns = g.neighbors(s);
        if ns.len() < 2 {
            continue;
        }
        for (ia, &a) in ns.iter().enumerate() {
            for &b in &ns[ia + 1..] {
                if g.has_edge(a, b) {
                    continue;
                }
                blocked.iter_mut().for_each(|x| *x = false);
                blocked[s] = true;
                for &w in ns {
                    if w != a && w != b {
                        blocked[w] = true;
                    }
                }
                let Some(path) = shortest_path(g, a, b, &blocked, &mut prev, max_len - 1) else {
                    continue;
                };
                let len = path.len() + 1;
                if len < 5 || len > max_len || len % 2 == 0 {
                    continue;
                }
                let mut cycle = vec![s];
                cycle.extend(path);
                if !is_chordless_cycle(g, &cycle) {
                    continue;
                }
                let mut key = cycle.clone();
                key.sort_unstable();
                if seen.insert(key) {
                    found.push(canonical(cycle));
                }
            }
        }
    }
    found.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    found
}

/// BFS over unblocked nodes; returns the node sequence from `a` to `b` when it
/// has at most `max_nodes` nodes.
fn shortest_path(
    g: &ConflictGraph,
    a: usize,
    b: usize,
    blocked: &[bool],
    prev: &mut [usize],
    max_nodes: usize,
) -> Option<Vec<usize>> {
    prev.iter_mut().for_each(|p| *p = usize::MAX);
    let mut depth = vec![0usize; prev.len()];
    let mut queue = VecDeque::new();
    prev[a] = a;
    depth[a] = 1;
    queue.push_back(a);
    while let Some(u) = queue.pop_front() {
        if u == b {
            break;
        }
        if depth[u] >= max_nodes {
            continue;
        }
        for &w in g.neighbors(u) {
            if !blocked[w] && prev[w] == usize::MAX {
                prev[w] = u;
                depth[w] = depth[u] + 1;
                queue.push_back(w);
            }
        }
    }
    if prev[b] == usize::MAX {
        return None;
    }
    let mut path = vec![b];
    let mut cur = b;
    while cur != a {
        cur = prev[cur];
        path.push(cur);
    }
    path.reverse();
    Some(path)
}

/// Node sets whose complement-induced subgraph is a chordless odd cycle of
/// length 5..=`max_len`, as sorted sets.
pub fn odd_antiholes(g: &ConflictGraph, max_len: usize) -> Vec<Vec<usize>> {
    let comp = g.complement();
    let mut out: Vec<Vec<usize>> = odd_holes(&comp, max_len)
        .into_iter()
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    out
}
