use super::CsrMatrix;
use std::collections::VecDeque;

/// Reverse Cuthill-McKee ordering of the (symmetrized) graph of `a`.
/// Returns `perm` with `perm[new] = old`. Deterministic: ties break by index.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.nrows();
    let adj: Vec<Vec<usize>> = {
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            for &j in a.row(i).0 {
                if j != i {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        for l in &mut adj {
            l.sort_unstable();
            l.dedup();
        }
        adj
    };
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    while order.len() < n {
        let seed = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| (degree[i], i))
            .unwrap();
        let start = pseudo_peripheral(seed, &adj, &degree, &visited);
        let mut queue = VecDeque::new();
        visited[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

fn bfs_levels(start: usize, adj: &[Vec<usize>], blocked: &[bool]) -> Vec<Vec<usize>> {
    let mut seen = blocked.to_vec();
    seen[start] = true;
    let mut levels = vec![vec![start]];
    loop {
        let mut next = Vec::new();
        for &v in levels.last().unwrap() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            return levels;
        }
        levels.push(next);
    }
}

fn pseudo_peripheral(seed: usize, adj: &[Vec<usize>], degree: &[usize], blocked: &[bool]) -> usize {
    let mut start = seed;
    let mut ecc = bfs_levels(start, adj, blocked).len();
    for _ in 0..8 {
        let levels = bfs_levels(start, adj, blocked);
        let cand = *levels
            .last()
            .unwrap()
            .iter()
            .min_by_key(|&&v| (degree[v], v))
            .unwrap();
        let e = bfs_levels(cand, adj, blocked).len();
        if e <= ecc {
            break;
        }
        ecc = e;
        start = cand;
    }
    start
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_of_path_graph() {
        let n = 6;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
        }
        // path 0-3-1-4-2-5 scrambled
        let path = [0, 3, 1, 4, 2, 5];
        for w in path.windows(2) {
            t.push((w[0], w[1], -1.0));
            t.push((w[1], w[0], -1.0));
        }
        let a = CsrMatrix::from_triplets(n, n, &t);
        let p = reverse_cuthill_mckee(&a);
        let mut sorted = p.clone();
        sorted.sort();
        assert_eq!(sorted, (0..n).collect::<Vec<_>>());
        // bandwidth 1 after ordering
        let mut pos = vec![0; n];
        for (k, &v) in p.iter().enumerate() {
            pos[v] = k;
        }
        for w in path.windows(2) {
            assert_eq!((pos[w[0]] as i64 - pos[w[1]] as i64).abs(), 1);
        }
    }
}
