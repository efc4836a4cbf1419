//! k-NN graph construction and geodesic (shortest-path) distances, the
//! ISOMAP-style metric.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::matrix::{DistanceMatrix, DistanceVector};
use crate::par::map_indices;

/// Weighted undirected graph stored as adjacency lists. No self-loops, all
/// weights strictly positive.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    adj: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (i, nbrs) in self.adj.iter().enumerate() {
            for &(j, w) in nbrs {
                if i < j {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    /// Sizes of the connected components, largest first.
    pub fn component_sizes(&self) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        let mut sizes = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start];
            seen[start] = true;
            let mut size = 0;
            while let Some(v) = stack.pop() {
                size += 1;
                for &(u, _) in &self.adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            sizes.push(size);
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    fn ensure_connected(&self) -> Result<()> {
        let sizes = self.component_sizes();
        if sizes.len() > 1 {
            return Err(Error::DisconnectedGraph(sizes));
        }
        Ok(())
    }

    /// Single-source shortest path lengths (label-setting with a binary
    /// heap). Unreachable vertices get `f64::INFINITY`.
    pub fn dijkstra(&self, source: usize) -> Vec<f64> {
        #[derive(PartialEq)]
        struct Entry(f64, usize);
        impl Eq for Entry {}
        impl Ord for Entry {
            fn cmp(&self, other: &Self) -> Ordering {
                // min-heap on distance, tie-broken by vertex index
                other
                    .0
                    .partial_cmp(&self.0)
                    .unwrap()
                    .then(other.1.cmp(&self.1))
            }
        }
        impl PartialOrd for Entry {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }

        let mut dist = vec![f64::INFINITY; self.n];
        let mut done = vec![false; self.n];
        dist[source] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Entry(0.0, source));
        while let Some(Entry(d, v)) = heap.pop() {
            if done[v] {
                continue;
            }
            done[v] = true;
            for &(u, w) in &self.adj[v] {
                let nd = d + w;
                if nd < dist[u] {
                    dist[u] = nd;
                    heap.push(Entry(nd, u));
                }
            }
        }
        dist
    }
}

/// Indices of the k smallest off-diagonal entries of `dists`, ties broken by
/// lower index.
fn k_nearest(dists: &[f64], skip: Option<usize>, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..dists.len()).filter(|&j| Some(j) != skip).collect();
    idx.sort_by(|&a, &b| dists[a].partial_cmp(&dists[b]).unwrap().then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

/// Keeps, for each point, only the k smallest distances, then symmetrizes by
/// union: an edge exists when either endpoint selected the other.
pub fn build_knn_graph(d: &DistanceMatrix, k: usize) -> Result<WeightedGraph> {
    let n = d.n();
    if k == 0 || k > n.saturating_sub(1) {
        return Err(Error::InvalidNeighborCount { k, n });
    }
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut have = vec![vec![false; n]; n];
    for i in 0..n {
        for j in k_nearest(d.row(i), Some(i), k) {
            if d.get(i, j) == 0.0 {
                return Err(Error::ZeroDistanceNeighbors { i, j });
            }
            if !have[i][j] {
                have[i][j] = true;
                have[j][i] = true;
                adj[i].push((j, d.get(i, j)));
                adj[j].push((i, d.get(i, j)));
            }
        }
    }
    Ok(WeightedGraph { n, adj })
}

/// All-pairs shortest-path distances. Errors on a disconnected graph, naming
/// the component sizes. Rows are computed per source and the upper triangle
/// mirrored, so the output is exactly symmetric.
pub fn graph_all_pairs(graph: &WeightedGraph) -> Result<DistanceMatrix> {
    graph.ensure_connected()?;
    let n = graph.n();
    let rows = map_indices(n, |i| graph.dijkstra(i));
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            data[i * n + j] = rows[i][j];
            data[j * n + i] = rows[i][j];
        }
    }
    DistanceMatrix::new(data, n)
}

/// Geodesic distances from an external point grafted to the graph by its k
/// nearest sample points: d*(xᵢ, μ) = min over anchors v of
/// dist_to_sample[v] + shortest_path(v, i).
pub fn graft_point(
    graph: &WeightedGraph,
    dist_to_sample: &DistanceVector,
    k: usize,
) -> Result<DistanceVector> {
    graph.ensure_connected()?;
    let n = graph.n();
    if dist_to_sample.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: dist_to_sample.len(),
        });
    }
    if k == 0 || k > n {
        return Err(Error::InvalidNeighborCount { k, n });
    }
    let anchors = k_nearest(dist_to_sample, None, k);
    let mut out = vec![f64::INFINITY; n];
    for &v in &anchors {
        let sp = graph.dijkstra(v);
        for i in 0..n {
            let d = dist_to_sample[v] + sp[i];
            if d < out[i] {
                out[i] = d;
            }
        }
    }
    Ok(out)
}

/// Same as [`graft_point`] but reusing a precomputed all-pairs matrix;
/// used when many points are grafted onto one graph (contour grids).
pub fn graft_point_with_all_pairs(
    all_pairs: &DistanceMatrix,
    dist_to_sample: &DistanceVector,
    k: usize,
) -> Result<DistanceVector> {
    let n = all_pairs.n();
    if dist_to_sample.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: dist_to_sample.len(),
        });
    }
    if k == 0 || k > n {
        return Err(Error::InvalidNeighborCount { k, n });
    }
    let anchors = k_nearest(dist_to_sample, None, k);
    let mut out = vec![f64::INFINITY; n];
    for &v in &anchors {
        for i in 0..n {
            let d = dist_to_sample[v] + all_pairs.get(v, i);
            if d < out[i] {
                out[i] = d;
            }
        }
    }
    Ok(out)
}
