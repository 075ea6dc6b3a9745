//! Deterministic routing: shortest paths with lexicographic tie-breaking and
//! loop-free k-shortest alternates.

use std::collections::{BTreeSet, HashSet, VecDeque};

use super::graph::Graph;
use super::NodeId;

const UNREACHED: usize = usize::MAX;

/// Hop distances to `dst`, skipping nodes in `blocked`.
fn distances_to(graph: &Graph, dst: NodeId, blocked: &[bool]) -> Vec<usize> {
    let mut dist = vec![UNREACHED; graph.node_count()];
    if blocked[dst] {
        return dist;
    }
    dist[dst] = 0;
    let mut queue = VecDeque::from([dst]);
    while let Some(u) = queue.pop_front() {
        for &v in graph.neighbors(u) {
            if !blocked[v] && dist[v] == UNREACHED {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Shortest `src → dst` path avoiding `blocked` nodes and the directed
/// edges `src → x` for `x` in `banned_first_hops`. Among shortest paths the
/// lexicographically smallest node sequence wins.
fn restricted_shortest(
    graph: &Graph,
    src: NodeId,
    dst: NodeId,
    blocked: &[bool],
    banned_first_hops: &HashSet<NodeId>,
) -> Option<Vec<NodeId>> {
    if src == dst {
        return Some(vec![src]);
    }
    let mut blocked = blocked.to_vec();
    blocked[src] = true;
    let dist = distances_to(graph, dst, &blocked);
    let first = graph
        .neighbors(src)
        .iter()
        .copied()
        .filter(|v| !banned_first_hops.contains(v) && dist[*v] != UNREACHED)
        .min_by_key(|&v| (dist[v], v))?;
    let mut path = vec![src, first];
    let mut cur = first;
    while cur != dst {
        cur = graph
            .neighbors(cur)
            .iter()
            .copied()
            .find(|&v| dist[v] != UNREACHED && dist[v] + 1 == dist[cur])
            .expect("distance labels are consistent");
        path.push(cur);
    }
    Some(path)
}

/// Shortest path between two nodes with lowest-node-id tie-breaking, or
/// `None` when they are disconnected.
pub fn shortest_path(graph: &Graph, src: NodeId, dst: NodeId) -> Option<Vec<NodeId>> {
    restricted_shortest(graph, src, dst, &vec![false; graph.node_count()], &HashSet::new())
}

/// Up to `k` loop-free paths from `src` to `dst` (Yen's algorithm), ordered
/// by hop count and then lexicographically by node sequence.
pub fn k_shortest_paths(graph: &Graph, src: NodeId, dst: NodeId, k: usize) -> Vec<Vec<NodeId>> {
    let mut accepted: Vec<Vec<NodeId>> = Vec::new();
    if k == 0 {
        return accepted;
    }
    let Some(first) = shortest_path(graph, src, dst) else {
        return accepted;
    };
    accepted.push(first);
    let mut candidates: BTreeSet<(usize, Vec<NodeId>)> = BTreeSet::new();
    while accepted.len() < k {
        let last = accepted.last().expect("non-empty").clone();
        for i in 0..last.len().saturating_sub(1) {
            let spur = last[i];
            let root = &last[..=i];
            let banned: HashSet<NodeId> =
                accepted.iter().filter(|p| p.len() > i + 1 && &p[..=i] == root).map(|p| p[i + 1]).collect();
            let mut blocked = vec![false; graph.node_count()];
            for &r in &root[..i] {
                blocked[r] = true;
            }
            if let Some(tail) = restricted_shortest(graph, spur, dst, &blocked, &banned) {
                let mut full = root[..i].to_vec();
                full.extend(tail);
                if !accepted.contains(&full) {
                    candidates.insert((full.len(), full));
                }
            }
        }
        match candidates.pop_first() {
            Some((_, p)) => accepted.push(p),
            None => break,
        }
    }
    accepted
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::graph::parse_edgelist;

    #[test]
    fn line_graph() {
        let g = parse_edgelist("a b\nb c").unwrap();
        assert_eq!(shortest_path(&g, 0, 2), Some(vec![0, 1, 2]));
        assert_eq!(shortest_path(&g, 2, 0), Some(vec![2, 1, 0]));
    }

    #[test]
    fn triangle_prefers_direct_edge() {
        let g = parse_edgelist("a b\nb c\na c").unwrap();
        assert_eq!(shortest_path(&g, 0, 2), Some(vec![0, 2]));
    }

    #[test]
    fn lexicographic_tie_break() {
        // ids by first appearance: "0"=0, "2"=1, "3"=2, "1"=3; both routes have two hops
        let g = parse_edgelist("0 2\n2 3\n0 1\n1 3").unwrap();
        assert_eq!(shortest_path(&g, 0, 2), Some(vec![0, 1, 2]));
        assert_eq!(shortest_path(&g, 2, 0), Some(vec![2, 1, 0]));
    }

    #[test]
    fn disconnected() {
        let g = parse_edgelist("a b\nc d").unwrap();
        assert_eq!(shortest_path(&g, 0, 3), None);
        assert!(k_shortest_paths(&g, 0, 3, 3).is_empty());
    }

    #[test]
    fn yen_on_square_with_diagonal() {
        // 0-1, 1-2, 0-3, 3-2, 1-3
        let g = parse_edgelist("0 1\n1 2\n0 3\n3 2\n1 3").unwrap();
        let ps = k_shortest_paths(&g, 0, 2, 10);
        assert_eq!(ps[0], vec![0, 1, 2]);
        assert_eq!(ps[1], vec![0, 3, 2]);
        assert_eq!(ps.len(), 4);
        for p in &ps {
            let uniq: HashSet<_> = p.iter().collect();
            assert_eq!(uniq.len(), p.len(), "loop in {p:?}");
        }
        assert!(ps.windows(2).all(|w| (w[0].len(), &w[0]) <= (w[1].len(), &w[1])));
    }
}
