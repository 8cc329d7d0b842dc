//! Minimum-weight in-trees on a dense weighted digraph.
//!
//! `w[u][v]` is the weight of the edge `u -> v`; `+∞` means no edge. An
//! in-tree rooted at `r` gives every other node exactly one outgoing edge and
//! every node a directed path to `r`.

/// Chu-Liu/Edmonds on the transposed graph. `None` if no in-tree exists.
pub fn min_in_tree(weights: &[Vec<f64>], root: usize) -> Option<f64> {
    let n = weights.len();
    // An in-tree to r is an out-arborescence from r once every edge is reversed.
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for (u, row) in weights.iter().enumerate() {
        for (v, &w) in row.iter().enumerate() {
            if u != v && w.is_finite() {
                edges.push((v, u, w));
            }
        }
    }
    min_out_arborescence(n, edges, root)
}

fn min_out_arborescence(
    mut n: usize,
    mut edges: Vec<(usize, usize, f64)>,
    mut root: usize,
) -> Option<f64> {
    const NONE: usize = usize::MAX;
    let mut total = 0.0;
    loop {
        let mut best_in = vec![f64::INFINITY; n];
        let mut parent = vec![NONE; n];
        for &(u, v, w) in &edges {
            if u != v && w < best_in[v] {
                best_in[v] = w;
                parent[v] = u;
            }
        }
        if (0..n).any(|v| v != root && parent[v] == NONE) {
            return None;
        }
        best_in[root] = 0.0;

        let mut id = vec![NONE; n];
        let mut seen = vec![NONE; n];
        let mut cycles = 0;
        for (v, &w) in best_in.iter().enumerate() {
            total += w;
            let mut x = v;
            while seen[x] != v && id[x] == NONE && x != root {
                seen[x] = v;
                x = parent[x];
            }
            if x != root && id[x] == NONE {
                let mut y = parent[x];
                while y != x {
                    id[y] = cycles;
                    y = parent[y];
                }
                id[x] = cycles;
                cycles += 1;
            }
        }
        if cycles == 0 {
            return Some(total);
        }
        for slot in id.iter_mut().filter(|s| **s == NONE) {
            *slot = cycles;
            cycles += 1;
        }
        edges = edges
            .into_iter()
            .filter(|&(u, v, _)| id[u] != id[v])
            .map(|(u, v, w)| (id[u], id[v], w - best_in[v]))
            .collect();
        n = cycles;
        root = id[root];
    }
}

/// Enumerates every successor assignment. Exponential; meant for a handful of nodes.
pub fn min_in_tree_exhaustive(weights: &[Vec<f64>], root: usize) -> Option<f64> {
    let n = weights.len();
    let others: Vec<usize> = (0..n).filter(|&v| v != root).collect();
    let mut succ = vec![root; n];
    let mut best = None;
    search(weights, root, &others, 0, &mut succ, 0.0, &mut best);
    best
}

fn search(
    w: &[Vec<f64>],
    root: usize,
    others: &[usize],
    depth: usize,
    succ: &mut [usize],
    cost: f64,
    best: &mut Option<f64>,
) {
    if depth == others.len() {
        if reaches_root(succ, root, others) && best.is_none_or(|b| cost < b) {
            *best = Some(cost);
        }
        return;
    }
    let v = others[depth];
    for u in 0..w.len() {
        if u != v && w[v][u].is_finite() {
            succ[v] = u;
            search(w, root, others, depth + 1, succ, cost + w[v][u], best);
        }
    }
}

fn reaches_root(succ: &[usize], root: usize, others: &[usize]) -> bool {
    others.iter().all(|&start| {
        let mut x = start;
        for _ in 0..succ.len() {
            if x == root {
                return true;
            }
            x = succ[x];
        }
        x == root
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn chain_and_shortcut() {
        // 0 -> 1 -> 2 (root) costs 2; 0 -> 2 directly costs 5.
        let w = vec![
            vec![INF, 1.0, 5.0],
            vec![INF, INF, 1.0],
            vec![INF, INF, INF],
        ];
        assert_eq!(min_in_tree(&w, 2), Some(2.0));
        assert_eq!(min_in_tree_exhaustive(&w, 2), Some(2.0));
        assert_eq!(min_in_tree(&w, 0), None);
        assert_eq!(min_in_tree_exhaustive(&w, 0), None);
    }

    #[test]
    fn cycle_must_be_broken() {
        // 0 <-> 1 cheap, the only exits to the root are expensive.
        let w = vec![
            vec![INF, 1.0, 10.0],
            vec![1.0, INF, 7.0],
            vec![INF, INF, INF],
        ];
        assert_eq!(min_in_tree(&w, 2), Some(8.0));
        assert_eq!(min_in_tree_exhaustive(&w, 2), Some(8.0));
    }

    #[test]
    fn single_node() {
        assert_eq!(min_in_tree(&[vec![INF]], 0), Some(0.0));
        assert_eq!(min_in_tree_exhaustive(&[vec![INF]], 0), Some(0.0));
    }

    #[test]
    fn agrees_with_enumeration_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.random_range(2..=6);
            let density = rng.random_range(0.3..1.0);
            let w: Vec<Vec<f64>> = (0..n)
                .map(|u| {
                    (0..n)
                        .map(|v| {
                            if u != v && rng.random_bool(density) {
                                rng.random_range(1.0..2.0)
                            } else {
                                INF
                            }
                        })
                        .collect()
                })
                .collect();
            for root in 0..n {
                match (min_in_tree(&w, root), min_in_tree_exhaustive(&w, root)) {
                    (Some(a), Some(b)) => assert!((a - b).abs() < 1e-9, "{a} vs {b}"),
                    (a, b) => assert_eq!(a, b),
                }
            }
        }
    }
}
