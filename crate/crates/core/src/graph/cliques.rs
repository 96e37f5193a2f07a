use super::ConflictGraph;

pub const DEFAULT_CLIQUE_LIMIT: usize = 10_000;

/// Result of a maximal clique enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueList {
    /// Sorted cliques, each with sorted members.
    pub cliques: Vec<Vec<usize>>,
    /// True when the enumeration stopped at the limit.
    pub truncated: bool,
}

pub fn maximal_cliques(g: &ConflictGraph) -> CliqueList {
    maximal_cliques_limited(g, DEFAULT_CLIQUE_LIMIT)
}

/// Bron–Kerbosch with Tomita pivoting, stopping after `limit` cliques.
/// Isolated nodes come out as singleton cliques.
pub fn maximal_cliques_limited(g: &ConflictGraph, limit: usize) -> CliqueList {
    let mut search = Search { g, out: Vec::new(), limit, truncated: false };
    let all: Vec<usize> = (0..g.num_nodes()).collect();
    if !all.is_empty() {
        search.expand(&mut Vec::new(), all, Vec::new());
    }
    let mut cliques = search.out;
    cliques.sort();
    CliqueList { cliques, truncated: search.truncated }
}

struct Search<'a> {
    g: &'a ConflictGraph,
    out: Vec<Vec<usize>>,
    limit: usize,
    truncated: bool,
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn count_common(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

impl Search<'_> {
    fn expand(&mut self, r: &mut Vec<usize>, mut p: Vec<usize>, mut x: Vec<usize>) {
        if self.truncated {
            return;
        }
        if p.is_empty() {
            if x.is_empty() {
                if self.out.len() == self.limit {
                    self.truncated = true;
                    return;
                }
                let mut c = r.clone();
                c.sort_unstable();
                self.out.push(c);
            }
            return;
        }
        let pivot = p
            .iter()
            .chain(&x)
            .copied()
            .max_by_key(|&u| (count_common(&p, self.g.neighbors(u)), std::cmp::Reverse(u)))
            .expect("p is non-empty");
        let candidates: Vec<usize> = p.iter().copied().filter(|&v| !self.g.has_edge(pivot, v)).collect();
        for v in candidates {
            let nv = self.g.neighbors(v);
            r.push(v);
            self.expand(r, intersect(&p, nv), intersect(&x, nv));
            r.pop();
            if self.truncated {
                return;
            }
            p.retain(|&w| w != v);
            let pos = x.binary_search(&v).unwrap_or_else(|e| e);
            x.insert(pos, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_graphs() {
        assert_eq!(maximal_cliques(&ConflictGraph::complete(3)).cliques, vec![vec![0, 1, 2]]);
        let path = ConflictGraph::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(maximal_cliques(&path).cliques, vec![vec![0, 1], vec![1, 2]]);
        assert_eq!(maximal_cliques(&ConflictGraph::empty(2)).cliques, vec![vec![0], vec![1]]);
    }

    #[test]
    fn limit_sets_truncation_flag() {
        let c6 = ConflictGraph::cycle(6);
        let all = maximal_cliques(&c6);
        assert_eq!(all.cliques.len(), 6);
        assert!(!all.truncated);
        let exact = maximal_cliques_limited(&c6, 6);
        assert!(!exact.truncated);
        let cut = maximal_cliques_limited(&c6, 4);
        assert_eq!(cut.cliques.len(), 4);
        assert!(cut.truncated);
    }
}
