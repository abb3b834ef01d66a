//! Shared fixtures and reference solvers for the integration tests.
#![allow(dead_code)]

use rand::Rng;
use sdc_core::conf::GroundDistance;
use sdc_core::{AttributeSchema, MicrodataTable, Role, Value};

pub fn rng(seed: u64) -> sdc_core::rng::SdcRng {
    sdc_core::rng::from_seed(seed)
}

/// `n` records with `q` continuous quasi-identifiers in [0, 100] and one
/// confidential income column.
pub fn random_table(r: &mut impl Rng, n: usize, q: usize) -> MicrodataTable {
    let mut schema: Vec<AttributeSchema> = (0..q)
        .map(|i| AttributeSchema::numeric(&format!("q{i}"), Role::QuasiIdentifier, 0.0, 100.0))
        .collect();
    schema.push(AttributeSchema::numeric("income", Role::Confidential, 0.0, 1000.0));
    let rows = (0..n)
        .map(|_| {
            let mut row: Vec<Value> = (0..q).map(|_| Value::Num(r.random_range(0.0..100.0))).collect();
            row.push(Value::Num(r.random_range(0.0..1000.0)));
            row
        })
        .collect();
    MicrodataTable::new(schema, rows).unwrap()
}

/// Like [`random_table`] but with one categorical quasi-identifier and
/// coarse integer values, so ties and repeated records occur.
pub fn mixed_table(r: &mut impl Rng, n: usize) -> MicrodataTable {
    let schema = vec![
        AttributeSchema::numeric("age", Role::QuasiIdentifier, 0.0, 10.0),
        AttributeSchema::categorical("sex", Role::QuasiIdentifier, &["f", "m", "x"]),
        AttributeSchema::numeric("income", Role::Confidential, 0.0, 100.0),
    ];
    let rows = (0..n)
        .map(|_| {
            vec![
                Value::Num(f64::from(r.random_range(0..=10u8))),
                Value::text(["f", "m", "x"][r.random_range(0..3)]),
                Value::Num(f64::from(r.random_range(0..=100u8))),
            ]
        })
        .collect();
    MicrodataTable::new(schema, rows).unwrap()
}

pub fn qi_names(t: &MicrodataTable) -> Vec<String> {
    t.names_with_role(Role::QuasiIdentifier)
}

/// Minimum-cost transport between `p` and `q` (same support of size m)
/// under the given ground distance, by successive shortest augmenting paths
/// (Bellman-Ford on the residual network).
pub fn transport_cost(p: &[f64], q: &[f64], d: GroundDistance) -> f64 {
    let m = p.len();
    assert_eq!(m, q.len());
    // nodes: 0 = source, 1..=m supplies, m+1..=2m demands, 2m+1 = sink
    let (s, t, nodes) = (0, 2 * m + 1, 2 * m + 2);
    struct Edge {
        to: usize,
        cap: f64,
        cost: f64,
    }
    let mut edges: Vec<Edge> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    let mut add = |adj: &mut Vec<Vec<usize>>, a: usize, b: usize, cap: f64, cost: f64| {
        adj[a].push(edges.len());
        edges.push(Edge { to: b, cap, cost });
        adj[b].push(edges.len());
        edges.push(Edge { to: a, cap: 0.0, cost: -cost });
    };
    for i in 0..m {
        add(&mut adj, s, 1 + i, p[i], 0.0);
        add(&mut adj, 1 + m + i, t, q[i], 0.0);
        for j in 0..m {
            add(&mut adj, 1 + i, 1 + m + j, f64::INFINITY, d.between(i, j, m));
        }
    }
    const TINY: f64 = 1e-15;
    let mut total = 0.0;
    loop {
        let mut dist = vec![f64::INFINITY; nodes];
        let mut via: Vec<Option<usize>> = vec![None; nodes];
        dist[s] = 0.0;
        for _ in 0..nodes {
            let mut changed = false;
            for u in 0..nodes {
                if dist[u].is_infinite() {
                    continue;
                }
                for &e in &adj[u] {
                    let edge = &edges[e];
                    if edge.cap > TINY && dist[u] + edge.cost < dist[edge.to] - 1e-15 {
                        dist[edge.to] = dist[u] + edge.cost;
                        via[edge.to] = Some(e);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if dist[t].is_infinite() {
            break;
        }
        let mut push = f64::INFINITY;
        let mut v = t;
        while let Some(e) = via[v] {
            push = push.min(edges[e].cap);
            v = edges[e ^ 1].to;
        }
        let mut v = t;
        while let Some(e) = via[v] {
            edges[e].cap -= push;
            edges[e ^ 1].cap += push;
            v = edges[e ^ 1].to;
        }
        total += push * dist[t];
    }
    total
}

/// A random probability vector of length `m`, sometimes with zeros.
pub fn random_distribution(r: &mut impl Rng, m: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..m)
        .map(|_| if r.random_bool(0.2) { 0.0 } else { r.random_range(0.0..1.0) })
        .collect();
    let sum: f64 = raw.iter().sum();
    if sum == 0.0 {
        let mut v = vec![0.0; m];
        v[0] = 1.0;
        return v;
    }
    raw.iter().map(|x| x / sum).collect()
}
