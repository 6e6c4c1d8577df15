//! Seeded random graph models: G(n, M), Watts–Strogatz and
//! Barabási–Albert.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GeneratorError;
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    /// Uniform over simple graphs with exactly `edges` edges.
    ErdosRenyi { n: usize, edges: usize },
    /// Ring lattice where each node links to `k` nearest neighbors, each
    /// lattice edge rewired with probability `beta`.
    WattsStrogatz { n: usize, k: usize, beta: f64 },
    /// Preferential attachment of `m` edges per arriving node, starting
    /// from `m` isolated nodes, so `M = (n − m)·m`.
    BarabasiAlbert { n: usize, m: usize },
}

/// Default Watts–Strogatz rewiring probability.
pub const DEFAULT_WS_BETA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub model: Model,
    pub rng_seed: u64,
}

impl GeneratorSpec {
    pub fn new(model: Model, rng_seed: u64) -> Self {
        GeneratorSpec { model, rng_seed }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Model::ErdosRenyi { n, edges } => write!(f, "er:{n}:{edges}"),
            Model::WattsStrogatz { n, k, beta } => write!(f, "ws:{n}:{k}:{beta}"),
            Model::BarabasiAlbert { n, m } => write!(f, "ba:{n}:{m}"),
        }
    }
}

/// Parses `er:N:M`, `ws:N:K[:BETA]` and `ba:N:M`.
impl FromStr for Model {
    type Err = GeneratorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GeneratorError::BadParameters(format!("cannot parse generator spec {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        let int = |i: usize| {
            parts
                .get(i)
                .and_then(|p| p.parse::<usize>().ok())
                .ok_or_else(bad)
        };
        match (parts[0].to_ascii_lowercase().as_str(), parts.len()) {
            ("er", 3) => Ok(Model::ErdosRenyi {
                n: int(1)?,
                edges: int(2)?,
            }),
            ("ws", 3) => Ok(Model::WattsStrogatz {
                n: int(1)?,
                k: int(2)?,
                beta: DEFAULT_WS_BETA,
            }),
            ("ws", 4) => {
                let beta = parts[3].parse::<f64>().map_err(|_| bad())?;
                Ok(Model::WattsStrogatz {
                    n: int(1)?,
                    k: int(2)?,
                    beta,
                })
            }
            ("ba", 3) => Ok(Model::BarabasiAlbert {
                n: int(1)?,
                m: int(2)?,
            }),
            _ => Err(bad()),
        }
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<Graph, GeneratorError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    match spec.model {
        Model::ErdosRenyi { n, edges } => erdos_renyi(n, edges, &mut rng),
        Model::WattsStrogatz { n, k, beta } => watts_strogatz(n, k, beta, &mut rng),
        Model::BarabasiAlbert { n, m } => barabasi_albert(n, m, &mut rng),
    }
}

fn bad(msg: impl Into<String>) -> GeneratorError {
    GeneratorError::BadParameters(msg.into())
}

fn erdos_renyi(n: usize, edges: usize, rng: &mut ChaCha8Rng) -> Result<Graph, GeneratorError> {
    let max = n.saturating_mul(n.saturating_sub(1)) / 2;
    if edges > max {
        return Err(bad(format!("{edges} edges exceed C({n}, 2) = {max}")));
    }
    if n > u32::MAX as usize {
        return Err(bad("too many nodes"));
    }
    let mut g = Graph::with_nodes(n);
    // Rejection sampling is fine below half density; above it, sample the
    // complement instead.
    if edges <= max / 2 {
        while g.edge_count() < edges {
            let u = rng.gen_range(0..n as u32);
            let v = rng.gen_range(0..n as u32);
            if u != v && !g.has_edge(u, v) {
                g.add_edge(u, v)?;
            }
        }
    } else {
        let mut all = Vec::with_capacity(max);
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                all.push((u, v));
            }
        }
        let (chosen, _) = all.partial_shuffle(rng, edges);
        for &(u, v) in chosen.iter() {
            g.add_edge(u, v)?;
        }
    }
    Ok(g)
}

fn watts_strogatz(
    n: usize,
    k: usize,
    beta: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Graph, GeneratorError> {
    if !k.is_multiple_of(2) || k == 0 || k >= n {
        return Err(bad(format!("ring degree {k} must be even and in 2..{n}")));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(bad(format!("rewiring probability {beta} outside [0, 1]")));
    }
    let n32 = n as u32;
    let mut g = Graph::with_nodes(n);
    for u in 0..n32 {
        for j in 1..=(k / 2) as u32 {
            g.add_edge(u, (u + j) % n32)?;
        }
    }
    // Each lattice edge (u, u+j) keeps u and moves its far end with
    // probability beta to a uniform node that is neither u nor a neighbor.
    for j in 1..=(k / 2) as u32 {
        for u in 0..n32 {
            let v = (u + j) % n32;
            if !rng.gen_bool(beta) || !g.has_edge(u, v) {
                continue;
            }
            if g.degree(u) as usize >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.gen_range(0..n32);
                if w != u && !g.has_edge(u, w) {
                    break w;
                }
            };
            g.remove_edge(u, v)?;
            g.add_edge(u, w)?;
        }
    }
    Ok(g)
}

fn barabasi_albert(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Result<Graph, GeneratorError> {
    if m == 0 || m >= n {
        return Err(bad(format!("attachment count {m} must be in 1..{n}")));
    }
    let mut g = Graph::with_nodes(n);
    // The first arrival links to all m seed nodes; afterwards targets are
    // drawn proportionally to degree from the endpoint multiset.
    let mut targets: Vec<u32> = (0..m as u32).collect();
    let mut endpoints: Vec<u32> = Vec::with_capacity(2 * n * m);
    for source in m as u32..n as u32 {
        for &t in &targets {
            g.add_edge(source, t)?;
            endpoints.push(source);
            endpoints.push(t);
        }
        targets.clear();
        while targets.len() < m {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_specs() {
        assert_eq!(
            "er:1000:5000".parse::<Model>().unwrap(),
            Model::ErdosRenyi {
                n: 1000,
                edges: 5000
            }
        );
        assert_eq!(
            "ws:1000:10".parse::<Model>().unwrap(),
            Model::WattsStrogatz {
                n: 1000,
                k: 10,
                beta: DEFAULT_WS_BETA
            }
        );
        assert_eq!(
            "BA:1000:5".parse::<Model>().unwrap(),
            Model::BarabasiAlbert { n: 1000, m: 5 }
        );
        assert!("er:10".parse::<Model>().is_err());
        assert!("xx:1:2".parse::<Model>().is_err());
        let m: Model = "ws:100:4:0.25".parse().unwrap();
        assert_eq!(m.to_string().parse::<Model>().unwrap(), m);
    }

    #[test]
    fn er_exact_edge_count() {
        let g = generate(&GeneratorSpec::new(
            Model::ErdosRenyi {
                n: 1000,
                edges: 5000,
            },
            3,
        ))
        .unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (1000, 5000));
        assert_eq!(g.mean_degree(), 10.0);
        let dense = generate(&GeneratorSpec::new(
            Model::ErdosRenyi { n: 10, edges: 40 },
            3,
        ))
        .unwrap();
        assert_eq!(dense.edge_count(), 40);
        assert!(generate(&GeneratorSpec::new(
            Model::ErdosRenyi { n: 10, edges: 46 },
            3
        ))
        .is_err());
    }

    #[test]
    fn ws_edge_count() {
        let g = generate(&GeneratorSpec::new(
            Model::WattsStrogatz {
                n: 1000,
                k: 10,
                beta: 0.1,
            },
            5,
        ))
        .unwrap();
        assert_eq!(g.edge_count(), 5000);
        assert!(generate(&GeneratorSpec::new(
            Model::WattsStrogatz {
                n: 10,
                k: 3,
                beta: 0.1
            },
            5
        ))
        .is_err());
    }

    #[test]
    fn ba_edge_count() {
        let g = generate(&GeneratorSpec::new(
            Model::BarabasiAlbert { n: 1000, m: 5 },
            11,
        ))
        .unwrap();
        assert_eq!(g.edge_count(), 4975);
        assert!((g.mean_degree() - 9.95).abs() < 1e-12);
        assert!(g.degrees()[5..].iter().all(|&d| d >= 5));
    }

    #[test]
    fn seeded_generation_reproduces() {
        for model in [
            Model::ErdosRenyi { n: 200, edges: 600 },
            Model::WattsStrogatz {
                n: 200,
                k: 6,
                beta: 0.3,
            },
            Model::BarabasiAlbert { n: 200, m: 3 },
        ] {
            let a = generate(&GeneratorSpec::new(model, 42)).unwrap();
            let b = generate(&GeneratorSpec::new(model, 42)).unwrap();
            assert_eq!(a.edges(), b.edges());
            let c = generate(&GeneratorSpec::new(model, 43)).unwrap();
            assert_ne!(a.sorted_edges(), c.sorted_edges());
        }
    }
}
