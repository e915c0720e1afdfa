//! Minimum-cost flow via successive shortest paths, used for the
//! player-to-slot assignment in the unweighted optimum.

#[derive(Clone)]
struct Edge {
    to: usize,
    cap: i64,
    cost: f64,
    flow: i64,
}

pub struct MinCostFlow {
    graph: Vec<Vec<usize>>,
    edges: Vec<Edge>,
}

impl MinCostFlow {
    pub fn new(nodes: usize) -> Self {
        MinCostFlow { graph: vec![Vec::new(); nodes], edges: Vec::new() }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64, cost: f64) -> usize {
        let id = self.edges.len();
        self.graph[from].push(id);
        self.edges.push(Edge { to, cap, cost, flow: 0 });
        self.graph[to].push(id + 1);
        self.edges.push(Edge { to: from, cap: 0, cost: -cost, flow: 0 });
        id
    }

    pub fn edge_flow(&self, id: usize) -> i64 {
        self.edges[id].flow
    }

    /// Send up to `want` units from `s` to `t`, augmenting along successive
    /// shortest paths (label-correcting search, so negative edge costs are
    /// fine as long as there are no negative cycles). Returns (flow, cost).
    pub fn run(&mut self, s: usize, t: usize, want: i64) -> (i64, f64) {
        let n = self.graph.len();
        let mut flow = 0;
        let mut cost = 0.0;
        while flow < want {
            // Bellman-Ford with a queue.
            let mut dist = vec![f64::INFINITY; n];
            let mut in_queue = vec![false; n];
            let mut prev_edge = vec![usize::MAX; n];
            dist[s] = 0.0;
            let mut queue = std::collections::VecDeque::new();
            queue.push_back(s);
            in_queue[s] = true;
            while let Some(u) = queue.pop_front() {
                in_queue[u] = false;
                for &id in &self.graph[u] {
                    let e = &self.edges[id];
                    if e.cap - e.flow > 0 && dist[u] + e.cost < dist[e.to] - 1e-15 {
                        dist[e.to] = dist[u] + e.cost;
                        prev_edge[e.to] = id;
                        if !in_queue[e.to] {
                            queue.push_back(e.to);
                            in_queue[e.to] = true;
                        }
                    }
                }
            }
            if !dist[t].is_finite() {
                break;
            }
            // Bottleneck along the path (always 1 here, but stay general).
            let mut push = want - flow;
            let mut v = t;
            while v != s {
                let e = &self.edges[prev_edge[v]];
                push = push.min(e.cap - e.flow);
                v = self.edges[prev_edge[v] ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let id = prev_edge[v];
                self.edges[id].flow += push;
                self.edges[id ^ 1].flow -= push;
                v = self.edges[id ^ 1].to;
            }
            flow += push;
            cost += dist[t] * push as f64;
        }
        (flow, cost)
    }
}
