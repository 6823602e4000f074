//! Test-instance generators: random PIPs with a pinned width, knapsack
//! families exercising the small/big item split, and the reduction from
//! maximum independent set that makes width-1 instances hard even at
//! `Delta_1 <= 2`.

use crate::instance::PipInstance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Undirected graph without self-loops; edges stored as `(u, v)` with `u < v`.
#[derive(Debug, Clone)]
pub struct Graph {
    num_vertices: usize,
    edges: BTreeSet<(usize, usize)>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GraphError {
    #[error("edge ({u},{v}) invalid for a graph on {n} vertices")]
    InvalidEdge { u: usize, v: usize, n: usize },
}

impl Graph {
    pub fn new(
        num_vertices: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Graph, GraphError> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v || u >= num_vertices || v >= num_vertices {
                return Err(GraphError::InvalidEdge {
                    u,
                    v,
                    n: num_vertices,
                });
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Graph {
            num_vertices,
            edges: set,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn max_degree(&self) -> usize {
        let mut deg = vec![0usize; self.num_vertices];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }

    /// Independence check for a vertex subset given as a boolean mask.
    pub fn is_independent(&self, selected: &[bool]) -> bool {
        self.edges
            .iter()
            .all(|&(u, v)| !(selected[u] && selected[v]))
    }

    /// Exact maximum independent set size by enumeration; intended for the
    /// small graphs used in tests.
    pub fn max_independent_set_size(&self) -> usize {
        let n = self.num_vertices;
        assert!(n <= 24, "enumeration oracle limited to small graphs");
        let mut best = 0usize;
        for mask in 0u32..(1 << n) {
            let selected: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
            if self.is_independent(&selected) {
                best = best.max(selected.iter().filter(|&&s| s).count());
            }
        }
        best
    }
}

/// Encode maximum independent set as a PIP: `A_vv = 1`, `A_uv = A_vu = 1/n`
/// for every edge `uv`, unit capacities and unit objective. Feasible 0/1
/// solutions are exactly the independent sets, the instance has width 1 and
/// `Delta_1 <= 1 + maxdeg/n <= 2`.
pub fn mis_to_pip(g: &Graph) -> PipInstance {
    let n = g.num_vertices();
    let inv = 1.0 / n as f64;
    let mut triples: Vec<(usize, usize, f64)> = (0..n).map(|v| (v, v, 1.0)).collect();
    for (u, v) in g.edges() {
        triples.push((u, v, inv));
        triples.push((v, u, inv));
    }
    PipInstance::from_coords(n, n, vec![1.0; n], vec![1.0; n], triples)
        .expect("reduction produces a well-formed instance")
}

pub fn complete_graph(n: usize) -> Graph {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::new(n, edges).expect("complete graph edges are valid")
}

pub fn path_graph(n: usize) -> Graph {
    Graph::new(n, (1..n).map(|v| (v - 1, v))).expect("path edges are valid")
}

pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    assert!((0.0..=1.0).contains(&p));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).expect("sampled edges are valid")
}

/// Random dense-ish PIP whose normalized width is exactly `target_w`: every
/// column gets one entry forced to 1 (pinning the normalization), the rest
/// appear with probability `density` and uniform values, and all capacities
/// equal `target_w`.
pub fn random_instance(n: usize, m: usize, target_w: f64, density: f64, seed: u64) -> PipInstance {
    assert!(n >= 1 && m >= 1);
    assert!(target_w >= 1.0);
    assert!(density > 0.0 && density <= 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let forced: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
    let mut triples = Vec::new();
    for i in 0..m {
        for (j, &fi) in forced.iter().enumerate() {
            if fi == i {
                triples.push((i, j, 1.0));
            } else if rng.gen::<f64>() < density {
                let v = rng.gen_range(0.0..1.0);
                if v > 0.0 {
                    triples.push((i, j, v));
                }
            }
        }
    }
    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    PipInstance::from_coords(n, m, c, vec![target_w; m], triples)
        .expect("generated instance is well-formed")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum KnapsackProfile {
    /// Item sizes uniform in (0,1], one pinned to 1.
    Uniform,
    /// All sizes at most `eps/2` where `W = 1 + eps`; the instance's true
    /// width therefore exceeds the nominal `W`.
    SmallItems,
    /// Both size classes present: one size pinned to 1 (big), one forced
    /// below `eps/2` (small) whenever `n >= 2`.
    MixedBigSmall,
}

/// Single-constraint instance with capacity `width` and a size profile.
/// The `SmallItems`/`MixedBigSmall` profiles interpret `width` as `1 + eps`
/// and require `width` in `(1, 2]`.
pub fn knapsack_instance(n: usize, width: f64, profile: KnapsackProfile, seed: u64) -> PipInstance {
    assert!(n >= 1);
    assert!(width >= 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes: Vec<f64> = match profile {
        KnapsackProfile::Uniform => {
            let pinned = rng.gen_range(0..n);
            (0..n)
                .map(|j| {
                    if j == pinned {
                        1.0
                    } else {
                        rng.gen_range(f64::MIN_POSITIVE..1.0)
                    }
                })
                .collect()
        }
        KnapsackProfile::SmallItems => {
            let eps = width - 1.0;
            assert!(eps > 0.0 && eps <= 1.0, "SmallItems needs width in (1, 2]");
            (0..n)
                .map(|_| rng.gen_range(f64::MIN_POSITIVE..=eps / 2.0))
                .collect()
        }
        KnapsackProfile::MixedBigSmall => {
            let eps = width - 1.0;
            assert!(
                eps > 0.0 && eps <= 1.0,
                "MixedBigSmall needs width in (1, 2]"
            );
            let big_at = rng.gen_range(0..n);
            let small_at = if n >= 2 {
                let mut s = rng.gen_range(0..n - 1);
                if s >= big_at {
                    s += 1;
                }
                Some(s)
            } else {
                None
            };
            (0..n)
                .map(|j| {
                    if j == big_at {
                        1.0
                    } else if Some(j) == small_at || rng.gen_bool(0.5) {
                        rng.gen_range(f64::MIN_POSITIVE..=eps / 2.0)
                    } else {
                        rng.gen_range(eps / 2.0..1.0).max(eps / 2.0 + 1e-12)
                    }
                })
                .collect()
        }
    };
    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    PipInstance::from_dense(c, vec![sizes], vec![width]).expect("generated knapsack is well-formed")
}
