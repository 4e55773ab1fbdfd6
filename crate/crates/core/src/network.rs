//! Radial feeder topology.
//!
//! A [`RadialNetwork`] is a tree rooted at bus 1 (the substation). Bus ids are
//! 1-based and contiguous. On construction every branch is oriented
//! parent→child, and the root-to-bus paths plus the pairwise shared-path
//! impedances are tabulated once, since every solver reads them repeatedly.

use std::collections::{HashSet, VecDeque};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loads::LoadSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: usize,
    pub name: Option<String>,
}

impl Bus {
    pub fn new(id: usize) -> Self {
        Bus { id, name: None }
    }
}

/// A line section. `r` and `x` are per-unit on the network bases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub parent: usize,
    pub child: usize,
    pub r: f64,
    pub x: f64,
}

impl Branch {
    pub fn new(parent: usize, child: usize, r: f64, x: f64) -> Self {
        Branch { parent, child, r, x }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bases {
    pub base_mva: f64,
    pub base_kv: f64,
}

impl Bases {
    pub fn new(base_mva: f64, base_kv: f64) -> Self {
        Bases { base_mva, base_kv }
    }

    /// Impedance base in ohms.
    pub fn z_base(&self) -> f64 {
        self.base_kv * self.base_kv / self.base_mva
    }

    pub fn ohm_to_pu(&self, ohm: f64) -> f64 {
        ohm / self.z_base()
    }

    pub fn kw_to_pu(&self, kw: f64) -> f64 {
        kw / (1000.0 * self.base_mva)
    }

    pub fn pu_to_kw(&self, pu: f64) -> f64 {
        pu * 1000.0 * self.base_mva
    }
}

impl Default for Bases {
    fn default() -> Self {
        Bases::new(1.0, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialNetwork {
    buses: Vec<Bus>,
    bases: Bases,
    /// Upstream branch of each bus, indexed by `id - 1`; `None` for the root.
    upstream: Vec<Option<Branch>>,
    children: Vec<Vec<usize>>,
    /// Breadth-first order from the root.
    order: Vec<usize>,
    paths: Vec<Vec<usize>>,
    shared_r: Vec<f64>,
    shared_x: Vec<f64>,
}

/// Validates buses and branches and builds the rooted tree.
///
/// Branch orientation in the input is ignored; each branch is re-oriented
/// away from bus 1.
pub fn build_network(buses: Vec<Bus>, branches: Vec<Branch>, bases: Bases) -> Result<RadialNetwork> {
    let mut buses = buses;
    if buses.is_empty() {
        return Err(Error::BadRoot);
    }
    buses.sort_by_key(|b| b.id);
    for (i, bus) in buses.iter().enumerate() {
        if bus.id != i + 1 {
            return Err(Error::NonContiguousIds {
                expected: i + 1,
                found: bus.id,
            });
        }
    }
    let n = buses.len();
    if !(bases.base_mva > 0.0 && bases.base_kv > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bases must be positive (base_mva={}, base_kv={})",
            bases.base_mva, bases.base_kv
        )));
    }

    let mut seen = HashSet::new();
    let mut dsu = DisjointSet::new(n);
    let mut adjacency: Vec<Vec<(usize, f64, f64)>> = vec![Vec::new(); n + 1];
    for br in &branches {
        for end in [br.parent, br.child] {
            if end == 0 || end > n {
                return Err(Error::UnknownBus(end));
            }
        }
        if br.parent == br.child {
            return Err(Error::CycleDetected {
                from: br.parent,
                to: br.child,
            });
        }
        let valid = br.r.is_finite() && br.x.is_finite() && br.r >= 0.0 && br.x >= 0.0;
        if !valid || (br.r == 0.0 && br.x == 0.0) {
            return Err(Error::BadImpedance {
                from: br.parent,
                to: br.child,
                r: br.r,
                x: br.x,
            });
        }
        let key = (br.parent.min(br.child), br.parent.max(br.child));
        if !seen.insert(key) {
            return Err(Error::DuplicateBranch {
                from: br.parent,
                to: br.child,
            });
        }
        if !dsu.union(br.parent - 1, br.child - 1) {
            return Err(Error::CycleDetected {
                from: br.parent,
                to: br.child,
            });
        }
        adjacency[br.parent].push((br.child, br.r, br.x));
        adjacency[br.child].push((br.parent, br.r, br.x));
    }

    let mut upstream: Vec<Option<Branch>> = vec![None; n];
    let mut children = vec![Vec::new(); n];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([1usize]);
    visited[0] = true;
    while let Some(bus) = queue.pop_front() {
        order.push(bus);
        for &(next, r, x) in &adjacency[bus] {
            if !visited[next - 1] {
                visited[next - 1] = true;
                upstream[next - 1] = Some(Branch::new(bus, next, r, x));
                children[bus - 1].push(next);
                queue.push_back(next);
            }
        }
    }
    if let Some(i) = visited.iter().position(|v| !v) {
        return Err(Error::Disconnected(i + 1));
    }
    for c in &mut children {
        c.sort_unstable();
    }

    let mut paths: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut cum_r = vec![0.0; n];
    let mut cum_x = vec![0.0; n];
    for &bus in &order[1..] {
        let br = upstream[bus - 1].expect("non-root bus has a parent");
        let mut path = paths[br.parent - 1].clone();
        path.push(bus);
        paths[bus - 1] = path;
        cum_r[bus - 1] = cum_r[br.parent - 1] + br.r;
        cum_x[bus - 1] = cum_x[br.parent - 1] + br.x;
    }

    // The intersection of two root paths is the root path of their deepest
    // common bus, so the shared impedance is the cumulative impedance there.
    let mut shared_r = vec![0.0; n * n];
    let mut shared_x = vec![0.0; n * n];
    for k in 0..n {
        for a in 0..n {
            let common = paths[k]
                .iter()
                .zip(&paths[a])
                .take_while(|(p, q)| p == q)
                .last()
                .map(|(p, _)| *p);
            if let Some(c) = common {
                shared_r[k * n + a] = cum_r[c - 1];
                shared_x[k * n + a] = cum_x[c - 1];
            }
        }
    }

    Ok(RadialNetwork {
        buses,
        bases,
        upstream,
        children,
        order,
        paths,
        shared_r,
        shared_x,
    })
}

impl RadialNetwork {
    pub fn n_buses(&self) -> usize {
        self.buses.len()
    }

    pub fn buses(&self) -> &[Bus] {
        &self.buses
    }

    pub fn bases(&self) -> Bases {
        self.bases
    }

    pub fn contains(&self, bus: usize) -> bool {
        bus >= 1 && bus <= self.n_buses()
    }

    fn check(&self, bus: usize) -> Result<usize> {
        if self.contains(bus) {
            Ok(bus - 1)
        } else {
            Err(Error::UnknownBus(bus))
        }
    }

    /// Branches oriented parent→child, in breadth-first order.
    pub fn branches(&self) -> impl Iterator<Item = &Branch> + '_ {
        self.order[1..]
            .iter()
            .map(move |&b| self.upstream[b - 1].as_ref().expect("non-root"))
    }

    /// The branch feeding `bus`, or `None` for the root.
    pub fn upstream_branch(&self, bus: usize) -> Result<Option<&Branch>> {
        Ok(self.upstream[self.check(bus)?].as_ref())
    }

    pub fn parent(&self, bus: usize) -> Result<Option<usize>> {
        Ok(self.upstream_branch(bus)?.map(|b| b.parent))
    }

    pub fn children(&self, bus: usize) -> Result<&[usize]> {
        Ok(&self.children[self.check(bus)?])
    }

    pub fn is_leaf(&self, bus: usize) -> Result<bool> {
        Ok(bus != 1 && self.children(bus)?.is_empty())
    }

    pub fn leaves(&self) -> Vec<usize> {
        (2..=self.n_buses())
            .filter(|&b| self.children[b - 1].is_empty())
            .collect()
    }

    /// Bus ids in breadth-first order from the root (root first).
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Buses on the path from the root to `bus`, excluding bus 1 and
    /// including `bus`, ordered root side first. Empty for bus 1.
    pub fn path_to(&self, bus: usize) -> Result<&[usize]> {
        Ok(&self.paths[self.check(bus)?])
    }

    /// Sum of upstream-branch `(r, x)` over the buses common to the root
    /// paths of `k` and `a`.
    pub fn shared_path_impedance(&self, k: usize, a: usize) -> Result<(f64, f64)> {
        let n = self.n_buses();
        let idx = self.check(k)? * n + self.check(a)?;
        Ok((self.shared_r[idx], self.shared_x[idx]))
    }

    /// True when `ancestor` lies on the root path of `bus` (or is the root, or
    /// is `bus` itself).
    pub fn is_upstream_of(&self, ancestor: usize, bus: usize) -> Result<bool> {
        self.check(ancestor)?;
        Ok(ancestor == 1 || ancestor == bus || self.path_to(bus)?.contains(&ancestor))
    }

    /// Total nominal demand of `bus` and everything downstream of it.
    pub fn downstream_loads(&self, loads: &[LoadSpec], bus: usize) -> Result<Complex64> {
        self.check(bus)?;
        let mut total = Complex64::new(0.0, 0.0);
        for load in loads {
            if self.is_upstream_of(bus, load.bus)? {
                total += Complex64::new(load.p0, load.q0);
            }
        }
        Ok(total)
    }

    /// Lossless flows into every bus from its parent, given fixed nodal
    /// demands indexed by `id - 1`. The root entry carries total demand.
    pub fn branch_flows(&self, p_bus: &[f64], q_bus: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut p = p_bus.to_vec();
        let mut q = q_bus.to_vec();
        for &bus in self.order[1..].iter().rev() {
            let parent = self.upstream[bus - 1].expect("non-root").parent;
            p[parent - 1] += p[bus - 1];
            q[parent - 1] += q[bus - 1];
        }
        (p, q)
    }
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    /// Returns false if `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}
