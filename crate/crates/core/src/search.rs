//! Breadth-first search helpers over implicit adjacency.

use std::collections::VecDeque;

pub const UNREACHED: u32 = u32::MAX;

/// Multi-source BFS. `neighbors(v)` must yield neighbors in the order they
/// should be discovered (ascending id for canonical results). Nodes beyond
/// `max_depth` are left unreached.
pub fn bfs_bounded<F, I>(n: usize, sources: &[usize], max_depth: u32, mut neighbors: F) -> Vec<u32>
where
    F: FnMut(usize) -> I,
    I: IntoIterator<Item = usize>,
{
    let mut dist = vec![UNREACHED; n];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s] == UNREACHED {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[v];
        if d >= max_depth {
            continue;
        }
        for w in neighbors(v) {
            if dist[w] == UNREACHED {
                dist[w] = d + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

pub fn bfs<F, I>(n: usize, sources: &[usize], neighbors: F) -> Vec<u32>
where
    F: FnMut(usize) -> I,
    I: IntoIterator<Item = usize>,
{
    bfs_bounded(n, sources, u32::MAX - 1, neighbors)
}

/// Shortest path from `source` to the first discovered node satisfying
/// `is_target`, inclusive of both ends. Ties resolve by discovery order.
pub fn bfs_path<F, I, T>(n: usize, source: usize, mut is_target: T, mut neighbors: F) -> Option<Vec<usize>>
where
    F: FnMut(usize) -> I,
    I: IntoIterator<Item = usize>,
    T: FnMut(usize) -> bool,
{
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    seen[source] = true;
    queue.push_back(source);
    let mut found = None;
    while let Some(v) = queue.pop_front() {
        if is_target(v) {
            found = Some(v);
            break;
        }
        for w in neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    let mut v = found?;
    let mut path = vec![v];
    while v != source {
        v = parent[v];
        path.push(v);
    }
    path.reverse();
    Some(path)
}

/// Connected components of the subgraph induced by `mask`, each sorted, the
/// list ordered by lowest member.
pub fn components<F, I>(n: usize, mask: &[bool], mut neighbors: F) -> Vec<Vec<usize>>
where
    F: FnMut(usize) -> I,
    I: IntoIterator<Item = usize>,
{
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if !mask[s] || seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            let v = comp[i];
            i += 1;
            for w in neighbors(v) {
                if mask[w] && !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

pub fn mask_of(n: usize, items: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in items {
        m[v] = true;
    }
    m
}
