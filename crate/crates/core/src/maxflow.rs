//! Minimum s-t cuts on directed graphs with real capacities.
//!
//! Highest-label push-relabel with periodic global relabeling and the gap
//! heuristic. Only the first phase runs: it produces a maximum preflow,
//! whose value is the max-flow value and whose residual graph determines
//! the sink side of the minimum cut exactly as a maximum flow would.
//! Residual capacities and excesses at or below a small relative
//! tolerance count as zero.

use alloc::vec;
use alloc::vec::Vec;

const NIL: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct FlowGraph {
    n: usize,
    to: Vec<u32>,
    cap: Vec<f64>,
    // Built lazily: CSR adjacency over edge ids.
    start: Vec<usize>,
    adj: Vec<u32>,
    from: Vec<u32>,
    eps: f64,
    max_cap: f64,
}

impl FlowGraph {
    pub fn new(nodes: usize) -> Self {
        FlowGraph {
            n: nodes,
            to: Vec::new(),
            cap: Vec::new(),
            start: Vec::new(),
            adj: Vec::new(),
            from: Vec::new(),
            eps: 0.0,
            max_cap: 0.0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Adds `u → v` with capacity `c` and `v → u` with capacity `c_rev`.
    pub fn add_edge(&mut self, u: usize, v: usize, c: f64, c_rev: f64) {
        debug_assert!(c >= 0.0 && c_rev >= 0.0);
        self.from.push(u as u32);
        self.to.push(v as u32);
        self.cap.push(c);
        self.from.push(v as u32);
        self.to.push(u as u32);
        self.cap.push(c_rev);
        self.max_cap = self.max_cap.max(c).max(c_rev);
        self.start.clear();
    }

    fn build(&mut self) {
        let mut deg = vec![0usize; self.n + 1];
        for &u in &self.from {
            deg[u as usize + 1] += 1;
        }
        for i in 0..self.n {
            deg[i + 1] += deg[i];
        }
        let mut fill = deg.clone();
        let mut adj = vec![0u32; self.from.len()];
        for (e, &u) in self.from.iter().enumerate() {
            adj[fill[u as usize]] = e as u32;
            fill[u as usize] += 1;
        }
        self.start = deg;
        self.adj = adj;
        self.eps = 1e-12 * self.max_cap.max(f64::MIN_POSITIVE);
    }

    /// Computes a maximum preflow from `s` to `t` and returns its value,
    /// the maximum flow value. Capacities are left as residuals.
    pub fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        if self.start.is_empty() {
            self.build();
        }
        let mut pr = PushRelabel::new(self, s, t);
        pr.run();
        pr.excess[t]
    }

    /// Nodes that can still reach `t` through unsaturated residual arcs.
    /// After [`FlowGraph::max_flow`], the complement of this set is the
    /// largest source side among all minimum cuts.
    pub fn reaches_sink(&mut self, t: usize) -> Vec<bool> {
        if self.start.is_empty() {
            self.build();
        }
        let mut seen = vec![false; self.n];
        seen[t] = true;
        let mut stack = vec![t];
        while let Some(v) = stack.pop() {
            for &e in &self.adj[self.start[v]..self.start[v + 1]] {
                // Arc u → v is the twin of the stored arc v → u.
                let twin = (e ^ 1) as usize;
                let u = self.to[e as usize] as usize;
                if !seen[u] && self.cap[twin] > self.eps {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen
    }
}

struct PushRelabel<'g> {
    g: &'g mut FlowGraph,
    s: usize,
    t: usize,
    height: Vec<u32>,
    excess: Vec<f64>,
    current: Vec<usize>,
    /// Active nodes by height.
    buckets: Vec<Vec<u32>>,
    /// All nodes below height `n`, as doubly linked lists by height.
    head: Vec<u32>,
    next: Vec<u32>,
    prev: Vec<u32>,
    /// Largest height holding a node below `n`.
    max_height: usize,
    top: usize,
    relabels_since_global: usize,
}

impl<'g> PushRelabel<'g> {
    fn new(g: &'g mut FlowGraph, s: usize, t: usize) -> Self {
        let n = g.n;
        let current = g.start[..n].to_vec();
        PushRelabel {
            g,
            s,
            t,
            height: vec![0; n],
            excess: vec![0.0; n],
            current,
            buckets: vec![Vec::new(); n + 1],
            head: vec![NIL; n + 1],
            next: vec![NIL; n],
            prev: vec![NIL; n],
            max_height: 0,
            top: 0,
            relabels_since_global: 0,
        }
    }

    fn n(&self) -> u32 {
        self.g.n as u32
    }

    fn is_active(&self, v: usize) -> bool {
        v != self.s && v != self.t && self.excess[v] > self.g.eps && self.height[v] < self.n()
    }

    fn link(&mut self, v: usize) {
        let hv = self.height[v] as usize;
        let first = self.head[hv];
        self.next[v] = first;
        self.prev[v] = NIL;
        if first != NIL {
            self.prev[first as usize] = v as u32;
        }
        self.head[hv] = v as u32;
        self.max_height = self.max_height.max(hv);
    }

    fn unlink(&mut self, v: usize) {
        let (p, q) = (self.prev[v], self.next[v]);
        if p == NIL {
            self.head[self.height[v] as usize] = q;
        } else {
            self.next[p as usize] = q;
        }
        if q != NIL {
            self.prev[q as usize] = p;
        }
    }

    fn enqueue(&mut self, v: usize) {
        let hv = self.height[v] as usize;
        self.buckets[hv].push(v as u32);
        self.top = self.top.max(hv);
    }

    fn run(&mut self) {
        let s = self.s;
        for k in self.g.start[s]..self.g.start[s + 1] {
            let e = self.g.adj[k] as usize;
            let c = self.g.cap[e];
            if c > 0.0 {
                let w = self.g.to[e] as usize;
                self.g.cap[e] = 0.0;
                self.g.cap[e ^ 1] += c;
                self.excess[w] += c;
                self.excess[s] -= c;
            }
        }
        self.global_relabel();
        loop {
            while self.top > 0 && self.buckets[self.top].is_empty() {
                self.top -= 1;
            }
            let Some(v) = self.buckets[self.top].pop() else { break };
            let v = v as usize;
            // Buckets may hold stale entries after relabels.
            if self.height[v] as usize != self.top || !self.is_active(v) {
                continue;
            }
            self.discharge(v);
            if self.relabels_since_global > self.g.n {
                self.global_relabel();
            }
        }
    }

    /// Exact distances to the sink in the residual graph; nodes that
    /// cannot reach it are lifted to `n` and drop out.
    fn global_relabel(&mut self) {
        let n = self.n();
        let eps = self.g.eps;
        self.height.fill(n);
        self.head.fill(NIL);
        self.max_height = 0;
        for b in &mut self.buckets {
            b.clear();
        }
        self.top = 0;
        self.relabels_since_global = 0;
        self.height[self.t] = 0;
        let mut queue = vec![self.t as u32];
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head] as usize;
            head += 1;
            self.link(v);
            for k in self.g.start[v]..self.g.start[v + 1] {
                let e = self.g.adj[k] as usize;
                let u = self.g.to[e] as usize;
                if u != self.s && self.height[u] == n && self.g.cap[e ^ 1] > eps {
                    self.height[u] = self.height[v] + 1;
                    queue.push(u as u32);
                }
            }
        }
        for v in 0..self.g.n {
            self.current[v] = self.g.start[v];
            if self.is_active(v) {
                self.enqueue(v);
            }
        }
    }

    fn discharge(&mut self, v: usize) {
        let eps = self.g.eps;
        let end = self.g.start[v + 1];
        while self.excess[v] > eps {
            if self.current[v] == end {
                self.relabel(v);
                if self.height[v] >= self.n() {
                    return;
                }
                continue;
            }
            let e = self.g.adj[self.current[v]] as usize;
            let w = self.g.to[e] as usize;
            if self.g.cap[e] > eps && self.height[v] == self.height[w] + 1 {
                let d = self.excess[v].min(self.g.cap[e]);
                self.g.cap[e] -= d;
                self.g.cap[e ^ 1] += d;
                self.excess[v] -= d;
                let was_active = self.is_active(w);
                self.excess[w] += d;
                if !was_active && self.is_active(w) {
                    self.enqueue(w);
                }
                if self.g.cap[e] <= eps {
                    self.current[v] += 1;
                }
            } else {
                self.current[v] += 1;
            }
        }
    }

    fn relabel(&mut self, v: usize) {
        let n = self.n();
        let eps = self.g.eps;
        self.relabels_since_global += 1;
        let old = self.height[v] as usize;
        self.unlink(v);
        if self.head[old] == NIL {
            // Gap: nothing at or above this height can reach the sink.
            for h in old + 1..=self.max_height {
                let mut u = self.head[h];
                while u != NIL {
                    self.height[u as usize] = n;
                    u = self.next[u as usize];
                }
                self.head[h] = NIL;
            }
            self.max_height = old.saturating_sub(1);
            self.height[v] = n;
            return;
        }
        let mut best = n;
        for k in self.g.start[v]..self.g.start[v + 1] {
            let e = self.g.adj[k] as usize;
            if self.g.cap[e] > eps {
                best = best.min(self.height[self.g.to[e] as usize] + 1);
            }
        }
        self.height[v] = best;
        self.current[v] = self.g.start[v];
        if best < n {
            self.link(v);
        }
    }
}
