//! Integral min-cost max-flow by successive shortest paths with potentials.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    rev: usize,
    cap: i64,
    cost: i64,
}

#[derive(Debug, Clone)]
pub(crate) struct MinCostFlow {
    graph: Vec<Vec<Edge>>,
}

/// Handle to a forward edge, for reading its flow afterwards.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EdgeRef {
    from: usize,
    idx: usize,
}

const INF: i64 = i64::MAX / 4;

impl MinCostFlow {
    pub fn new(nodes: usize) -> Self {
        MinCostFlow {
            graph: vec![Vec::new(); nodes],
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64, cost: i64) -> EdgeRef {
        let idx = self.graph[from].len();
        let rev = self.graph[to].len() + usize::from(from == to);
        self.graph[from].push(Edge { to, rev, cap, cost });
        self.graph[to].push(Edge {
            to: from,
            rev: idx,
            cap: 0,
            cost: -cost,
        });
        EdgeRef { from, idx }
    }

    /// Flow currently on a forward edge.
    pub fn flow(&self, e: EdgeRef) -> i64 {
        let edge = &self.graph[e.from][e.idx];
        self.graph[edge.to][edge.rev].cap
    }

    /// Bellman-Ford distances from `source`; seeds the potentials when
    /// costs are negative. Assumes no negative cycle.
    fn initial_potentials(&self, source: usize) -> Vec<i64> {
        let n = self.graph.len();
        let mut dist = vec![INF; n];
        dist[source] = 0;
        for _ in 0..n {
            let mut changed = false;
            for u in 0..n {
                if dist[u] == INF {
                    continue;
                }
                for e in &self.graph[u] {
                    if e.cap > 0 && dist[u] + e.cost < dist[e.to] {
                        dist[e.to] = dist[u] + e.cost;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        dist.iter().map(|&d| if d == INF { 0 } else { d }).collect()
    }

    /// Pushes as much flow as possible at minimum cost. Returns (flow, cost).
    pub fn run(&mut self, source: usize, sink: usize) -> (i64, i64) {
        let n = self.graph.len();
        let mut potential = self.initial_potentials(source);
        let mut flow = 0;
        let mut cost = 0;
        let mut dist = vec![INF; n];
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        loop {
            dist.fill(INF);
            prev.fill(None);
            dist[source] = 0;
            let mut heap = BinaryHeap::new();
            heap.push(Reverse((0i64, source)));
            while let Some(Reverse((d, u))) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for (i, e) in self.graph[u].iter().enumerate() {
                    if e.cap <= 0 {
                        continue;
                    }
                    let reduced = e.cost + potential[u] - potential[e.to];
                    debug_assert!(reduced >= 0, "negative reduced cost");
                    let nd = d + reduced;
                    if nd < dist[e.to] {
                        dist[e.to] = nd;
                        prev[e.to] = Some((u, i));
                        heap.push(Reverse((nd, e.to)));
                    }
                }
            }
            if dist[sink] == INF {
                return (flow, cost);
            }
            for v in 0..n {
                if dist[v] < INF {
                    potential[v] += dist[v];
                }
            }
            let mut push = INF;
            let mut v = sink;
            while let Some((u, i)) = prev[v] {
                push = push.min(self.graph[u][i].cap);
                v = u;
            }
            let mut v = sink;
            while let Some((u, i)) = prev[v] {
                let rev = self.graph[u][i].rev;
                self.graph[u][i].cap -= push;
                self.graph[v][rev].cap += push;
                cost += push * self.graph[u][i].cost;
                v = u;
            }
            flow += push;
        }
    }
}
