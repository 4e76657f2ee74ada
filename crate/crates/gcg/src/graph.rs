//! Small undirected simple-graph toolkit on dense vertex indices: BFS, girth,
//! weighted girth, articulation points, cycle enumeration, induced cycles and
//! maximal cliques.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Self { adj: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::new(n);
        for (a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    /// Adds `{a, b}` unless it is a loop or already present.
    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a == b || self.adj[a].contains(&b) {
            return;
        }
        self.adj[a].push(b);
        self.adj[b].push(a);
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(&b)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }

    /// Sorts adjacency lists so traversal order depends only on vertex indices.
    pub fn canonicalize(&mut self) {
        for ns in &mut self.adj {
            ns.sort_unstable();
        }
    }

    pub fn distances_from(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn shortest_path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let mut parent = vec![usize::MAX; self.len()];
        parent[a] = a;
        let mut queue = VecDeque::from([a]);
        while let Some(u) = queue.pop_front() {
            if u == b {
                break;
            }
            for &w in &self.adj[u] {
                if parent[w] == usize::MAX {
                    parent[w] = u;
                    queue.push_back(w);
                }
            }
        }
        if parent[b] == usize::MAX {
            return None;
        }
        let mut path = vec![b];
        let mut x = b;
        while x != a {
            x = parent[x];
            path.push(x);
        }
        path.reverse();
        Some(path)
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for s in 0..self.len() {
            if seen[s] {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// A shortest cycle as a closed vertex sequence (first vertex not repeated),
    /// or `None` for forests. Among shortest cycles the one found from the
    /// lowest root is returned.
    pub fn shortest_cycle(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut best: Option<usize> = None;
        for root in 0..n {
            if let Some((len, _, _, _)) = self.cycle_through_bfs(root, best) {
                best = Some(best.map_or(len, |b| b.min(len)));
            }
        }
        let target = best?;
        for root in 0..n {
            if let Some((len, u, w, parent)) = self.cycle_through_bfs(root, Some(target + 1)) {
                if len != target {
                    continue;
                }
                let mut left = vec![u];
                while *left.last().unwrap() != root {
                    left.push(parent[*left.last().unwrap()]);
                }
                let mut right = vec![w];
                while *right.last().unwrap() != root {
                    right.push(parent[*right.last().unwrap()]);
                }
                let mut cycle: Vec<usize> = left.into_iter().rev().collect();
                right.pop();
                cycle.extend(right);
                let distinct: BTreeSet<_> = cycle.iter().collect();
                if distinct.len() == cycle.len() && cycle.len() == target {
                    return Some(cycle);
                }
            }
        }
        None
    }

    /// BFS from `root`; returns the shortest closing non-tree edge found, as
    /// (cycle length, u, w, parents). Stops early when no cycle shorter than
    /// `bound` can appear.
    fn cycle_through_bfs(&self, root: usize, bound: Option<usize>) -> Option<(usize, usize, usize, Vec<usize>)> {
        let n = self.len();
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[root] = 0;
        parent[root] = root;
        let mut queue = VecDeque::from([root]);
        let mut best: Option<(usize, usize, usize)> = None;
        while let Some(u) = queue.pop_front() {
            if let Some(b) = bound {
                if 2 * dist[u] + 1 >= b {
                    break;
                }
            }
            if let Some((len, _, _)) = best {
                if 2 * dist[u] + 1 >= len {
                    break;
                }
            }
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if parent[u] != w {
                    let len = dist[u] + dist[w] + 1;
                    if best.is_none_or(|(b, _, _)| len < b) {
                        best = Some((len, u, w));
                    }
                }
            }
        }
        best.map(|(len, u, w)| (len, u, w, parent))
    }

    /// Girth in edges, `None` for forests.
    pub fn girth(&self) -> Option<usize> {
        self.shortest_cycle().map(|c| c.len())
    }

    /// Minimum total weight of a cycle, with the cycle. For every edge, the
    /// cheapest path between its endpoints avoiding it is found by Dijkstra.
    pub fn weighted_girth(&self, weight: impl Fn(usize, usize) -> u64) -> Option<(u64, Vec<usize>)> {
        let mut best: Option<(u64, Vec<usize>)> = None;
        let edges: Vec<_> = self.edges().collect();
        for &(a, b) in &edges {
            let w_ab = weight(a, b);
            if let Some((len, path)) = self.dijkstra_avoiding(a, b, &weight) {
                let total = len + w_ab;
                if best.as_ref().is_none_or(|(bw, _)| total < *bw) {
                    best = Some((total, path));
                }
            }
        }
        best
    }

    fn dijkstra_avoiding(
        &self,
        a: usize,
        b: usize,
        weight: &impl Fn(usize, usize) -> u64,
    ) -> Option<(u64, Vec<usize>)> {
        let n = self.len();
        let mut dist = vec![u64::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[a] = 0;
        let mut heap = BinaryHeap::from([Reverse((0u64, a))]);
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            if u == b {
                break;
            }
            for &w in &self.adj[u] {
                if (u == a && w == b) || (u == b && w == a) {
                    continue;
                }
                let nd = d + weight(u, w);
                if nd < dist[w] {
                    dist[w] = nd;
                    parent[w] = u;
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        if dist[b] == u64::MAX {
            return None;
        }
        let mut path = vec![b];
        let mut x = b;
        while x != a {
            x = parent[x];
            path.push(x);
        }
        path.reverse();
        Some((dist[b], path))
    }

    /// Articulation points (cut vertices), ascending.
    pub fn articulation_points(&self) -> Vec<usize> {
        let n = self.len();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut is_cut = vec![false; n];
        let mut timer = 0;
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            // iterative DFS: (vertex, parent, next neighbour index)
            let mut stack = vec![(root, usize::MAX, 0usize)];
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            let mut root_children = 0;
            while let Some(&mut (u, p, ref mut i)) = stack.last_mut() {
                if *i < self.adj[u].len() {
                    let w = self.adj[u][*i];
                    *i += 1;
                    if disc[w] == usize::MAX {
                        disc[w] = timer;
                        low[w] = timer;
                        timer += 1;
                        if u == root {
                            root_children += 1;
                        }
                        stack.push((w, u, 0));
                    } else if w != p {
                        low[u] = low[u].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(parent, _, _)) = stack.last() {
                        low[parent] = low[parent].min(low[u]);
                        if parent != root && low[u] >= disc[parent] {
                            is_cut[parent] = true;
                        }
                    }
                }
            }
            if root_children > 1 {
                is_cut[root] = true;
            }
        }
        (0..n).filter(|&v| is_cut[v]).collect()
    }

    /// All embedded cycles with exactly `len` edges, each listed once, starting
    /// at its smallest vertex and oriented so the second vertex is smaller than
    /// the last.
    pub fn cycles_of_length(&self, len: usize) -> Vec<Vec<usize>> {
        self.cycles_up_to(len).into_iter().filter(|c| c.len() == len).collect()
    }

    /// All embedded cycles with at most `max_len` edges.
    pub fn cycles_up_to(&self, max_len: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        if max_len < 3 {
            return out;
        }
        let n = self.len();
        for s in 0..n {
            let dist = self.distances_from(s);
            let mut path = vec![s];
            let mut on_path = vec![false; n];
            on_path[s] = true;
            self.extend_cycles(s, max_len, &dist, &mut path, &mut on_path, &mut out);
        }
        out
    }

    fn extend_cycles(
        &self,
        s: usize,
        max_len: usize,
        dist: &[Option<usize>],
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        let u = *path.last().unwrap();
        for &w in &self.adj[u] {
            if w == s && path.len() >= 3 && path[1] < u {
                out.push(path.clone());
            }
            if w <= s || on_path[w] {
                continue;
            }
            // edges used so far + 1 + remaining distance back to s
            let back = dist[w].unwrap_or(usize::MAX);
            if path.len() + back > max_len {
                continue;
            }
            path.push(w);
            on_path[w] = true;
            self.extend_cycles(s, max_len, dist, path, on_path, out);
            on_path[w] = false;
            path.pop();
        }
    }

    /// An induced (chordless) cycle with `min_len <= length < below` edges, if any.
    pub fn induced_cycle_in_range(&self, min_len: usize, below: usize) -> Option<Vec<usize>> {
        let n = self.len();
        for s in 0..n {
            let mut path = vec![s];
            let mut on_path = vec![false; n];
            on_path[s] = true;
            if let Some(c) = self.extend_induced(s, min_len, below, &mut path, &mut on_path) {
                return Some(c);
            }
        }
        None
    }

    fn extend_induced(
        &self,
        s: usize,
        min_len: usize,
        below: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
    ) -> Option<Vec<usize>> {
        let u = *path.last().unwrap();
        if path.len() >= min_len && path.len() < below && self.has_edge(u, s) && path.len() >= 3 {
            return Some(path.clone());
        }
        if path.len() + 1 >= below {
            return None;
        }
        for &w in &self.adj[u] {
            if w <= s || on_path[w] {
                continue;
            }
            // no chord from w to interior path vertices; s may only close at the end
            let inner_ok = path[..path.len() - 1].iter().skip(1).all(|&x| !self.has_edge(w, x));
            if !inner_ok {
                continue;
            }
            let closes = path.len() >= 2 && self.has_edge(w, s);
            if closes && path.len() + 1 < min_len {
                continue;
            }
            path.push(w);
            on_path[w] = true;
            let found = self.extend_induced(s, min_len, below, path, on_path);
            on_path[w] = false;
            path.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }

    /// All maximal cliques (Bron–Kerbosch with pivoting), each sorted.
    pub fn maximal_cliques(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let p: BTreeSet<usize> = (0..self.len()).collect();
        self.bron_kerbosch(&mut Vec::new(), p, BTreeSet::new(), &mut out);
        out
    }

    fn bron_kerbosch(
        &self,
        r: &mut Vec<usize>,
        mut p: BTreeSet<usize>,
        mut x: BTreeSet<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if p.is_empty() && x.is_empty() {
            let mut c = r.clone();
            c.sort_unstable();
            out.push(c);
            return;
        }
        let pivot = p
            .iter()
            .chain(x.iter())
            .copied()
            .max_by_key(|&u| self.adj[u].iter().filter(|w| p.contains(w)).count())
            .unwrap();
        let candidates: Vec<usize> = p.iter().copied().filter(|v| !self.adj[pivot].contains(v)).collect();
        for v in candidates {
            let nv: BTreeSet<usize> = self.adj[v].iter().copied().collect();
            r.push(v);
            self.bron_kerbosch(r, p.intersection(&nv).copied().collect(), x.intersection(&nv).copied().collect(), out);
            r.pop();
            p.remove(&v);
            x.insert(v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    #[test]
    fn test_girth_of_cycles_and_trees() {
        assert_eq!(cycle(12).girth(), Some(12));
        assert_eq!(cycle(3).girth(), Some(3));
        let tree = Graph::from_edges(5, [(0, 1), (1, 2), (1, 3), (3, 4)]);
        assert_eq!(tree.girth(), None);
    }

    #[test]
    fn test_shortest_cycle_is_simple() {
        // two squares sharing an edge plus a long tail cycle
        let g = Graph::from_edges(8, [(0, 1), (1, 2), (2, 3), (3, 0), (1, 4), (4, 5), (5, 2), (5, 6), (6, 7), (7, 0)]);
        let c = g.shortest_cycle().unwrap();
        assert_eq!(c.len(), 4);
        for i in 0..c.len() {
            assert!(g.has_edge(c[i], c[(i + 1) % c.len()]));
        }
    }

    #[test]
    fn test_weighted_girth_matches_uniform() {
        let g = cycle(8);
        let (w, c) = g.weighted_girth(|_, _| 7).unwrap();
        assert_eq!(w, 56);
        assert_eq!(c.len(), 8);
    }

    #[test]
    fn test_articulation_points() {
        // two triangles sharing vertex 2
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]);
        assert_eq!(g.articulation_points(), vec![2]);
        assert!(cycle(6).articulation_points().is_empty());
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]);
        assert_eq!(path.articulation_points(), vec![1]);
    }

    #[test]
    fn test_cycle_enumeration() {
        // K4 has 4 triangles and 3 four-cycles
        let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(k4.cycles_of_length(3).len(), 4);
        assert_eq!(k4.cycles_of_length(4).len(), 3);
        assert_eq!(cycle(6).cycles_up_to(6).len(), 1);
    }

    #[test]
    fn test_induced_cycles() {
        assert_eq!(cycle(5).induced_cycle_in_range(4, 6).map(|c| c.len()), Some(5));
        assert!(cycle(6).induced_cycle_in_range(4, 6).is_none());
        // a 4-cycle with a diagonal has no induced 4-cycle
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        assert!(g.induced_cycle_in_range(4, 6).is_none());
    }

    #[test]
    fn test_maximal_cliques() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)]);
        let mut c = g.maximal_cliques();
        c.sort();
        assert_eq!(c, vec![vec![0, 1, 2], vec![2, 3], vec![3, 4]]);
    }
}
