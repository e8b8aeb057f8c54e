//! (α,β)-core peeling.
//!
//! [`Peeler`] owns epoch-stamped scratch arrays so that repeated peels over
//! small regions of a large graph never pay for an O(n) reset. A peel first
//! collects the component of `q` inside the scope, then runs a queue cascade
//! to the fixed point, then keeps the component of `q` among the survivors.
//! Peeling is local to a component, so restricting before the cascade gives
//! the same fixed point as peeling the whole scope.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttributedBipartiteGraph, Layer, Scope, SubgraphMask, VertexRef};

/// Degree thresholds: upper vertices need `alpha` neighbours, lower vertices
/// need `beta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoreParams {
    pub alpha: u32,
    pub beta: u32,
}

impl CoreParams {
    pub fn new(alpha: u32, beta: u32) -> Result<Self> {
        if alpha == 0 || beta == 0 {
            return Err(Error::InvalidConfig(format!(
                "alpha and beta must be positive (got alpha={alpha}, beta={beta})"
            )));
        }
        Ok(CoreParams { alpha, beta })
    }

    #[inline]
    pub fn threshold(&self, layer: Layer) -> u32 {
        match layer {
            Layer::Upper => self.alpha,
            Layer::Lower => self.beta,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeelResult {
    pub exists: bool,
    /// Surviving component containing `q`; empty when `!exists`.
    pub mask: SubgraphMask,
    /// Sorted upper survivors.
    pub upper: Vec<u32>,
    /// Sorted lower survivors.
    pub lower: Vec<u32>,
}

impl PeelResult {
    fn none(g: &AttributedBipartiteGraph) -> Self {
        PeelResult { exists: false, mask: SubgraphMask::empty(g), upper: Vec::new(), lower: Vec::new() }
    }

    pub fn upper_size(&self) -> usize {
        self.upper.len()
    }

    pub fn lower_size(&self) -> usize {
        self.lower.len()
    }
}

/// Order in which violating vertices are removed. The fixed point does not
/// depend on it; `Random` exists so that this can be tested.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PeelOrder {
    #[default]
    Fifo,
    Random(u64),
}

#[derive(Default, Clone, Copy)]
struct Slot {
    seen: u32,
    gone: u32,
    kept: u32,
    deg: u32,
}

/// Reusable peeling workspace for one graph.
pub struct Peeler {
    epoch: u32,
    upper: Vec<Slot>,
    lower: Vec<Slot>,
    queue: Vec<VertexRef>,
    work: VecDeque<VertexRef>,
}

impl Peeler {
    pub fn new(g: &AttributedBipartiteGraph) -> Self {
        Peeler {
            epoch: 0,
            upper: vec![Slot::default(); g.upper_count()],
            lower: vec![Slot::default(); g.lower_count()],
            queue: Vec::new(),
            work: VecDeque::new(),
        }
    }

    fn next_epoch(&mut self) {
        if self.epoch == u32::MAX {
            self.upper.iter_mut().for_each(|s| *s = Slot::default());
            self.lower.iter_mut().for_each(|s| *s = Slot::default());
            self.epoch = 0;
        }
        self.epoch += 1;
    }

    #[inline]
    fn slot(&mut self, x: VertexRef) -> &mut Slot {
        match x.layer {
            Layer::Upper => &mut self.upper[x.index as usize],
            Layer::Lower => &mut self.lower[x.index as usize],
        }
    }

    /// Compute the (α,β)-community of `q` inside `scope`.
    pub fn peel<S: Scope>(
        &mut self,
        g: &AttributedBipartiteGraph,
        scope: &S,
        q: VertexRef,
        p: CoreParams,
    ) -> PeelResult {
        self.peel_with_order(g, scope, q, p, PeelOrder::Fifo)
    }

    pub fn peel_with_order<S: Scope>(
        &mut self,
        g: &AttributedBipartiteGraph,
        scope: &S,
        q: VertexRef,
        p: CoreParams,
        order: PeelOrder,
    ) -> PeelResult {
        if !g.contains_vertex(q) || !scope.alive(q) {
            return PeelResult::none(g);
        }
        // Cheap rejection before touching the component.
        let q_deg = live_neighbors(g, scope, q).count() as u32;
        if q_deg < p.threshold(q.layer) {
            return PeelResult::none(g);
        }

        self.next_epoch();
        let epoch = self.epoch;

        // Component of q, with live degrees.
        self.queue.clear();
        self.queue.push(q);
        self.slot(q).seen = epoch;
        let mut head = 0;
        while head < self.queue.len() {
            let x = self.queue[head];
            head += 1;
            let mut deg = 0;
            for y in live_neighbors(g, scope, x) {
                deg += 1;
                let s = self.slot(y);
                if s.seen != epoch {
                    s.seen = epoch;
                    self.queue.push(y);
                }
            }
            self.slot(x).deg = deg;
        }

        // Cascade.
        let mut rng = match order {
            PeelOrder::Fifo => None,
            PeelOrder::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        };
        self.work.clear();
        for i in 0..self.queue.len() {
            let x = self.queue[i];
            if self.slot(x).deg < p.threshold(x.layer) {
                self.work.push_back(x);
            }
        }
        loop {
            let x = match rng.as_mut() {
                None => self.work.pop_front(),
                Some(r) if !self.work.is_empty() => {
                    let i = r.gen_range(0..self.work.len());
                    self.work.swap_remove_back(i)
                }
                Some(_) => None,
            };
            let Some(x) = x else { break };
            if x == q {
                return PeelResult::none(g);
            }
            self.slot(x).gone = epoch;
            for y in live_neighbors(g, scope, x) {
                let thr = p.threshold(y.layer);
                let s = self.slot(y);
                if s.seen == epoch && s.gone != epoch {
                    s.deg -= 1;
                    if s.deg + 1 == thr {
                        self.work.push_back(y);
                    }
                }
            }
        }

        // Component of q among survivors.
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        self.queue.clear();
        self.queue.push(q);
        self.slot(q).kept = epoch;
        let mut head = 0;
        while head < self.queue.len() {
            let x = self.queue[head];
            head += 1;
            match x.layer {
                Layer::Upper => upper.push(x.index),
                Layer::Lower => lower.push(x.index),
            }
            for y in live_neighbors(g, scope, x) {
                let s = self.slot(y);
                if s.seen == epoch && s.gone != epoch && s.kept != epoch {
                    s.kept = epoch;
                    self.queue.push(y);
                }
            }
        }
        // Dropping other components cannot lower a degree inside this one.
        debug_assert!(self
            .queue
            .clone()
            .into_iter()
            .all(|x| self.slot(x).deg >= p.threshold(x.layer)));
        upper.sort_unstable();
        lower.sort_unstable();
        let mask = SubgraphMask::from_vertices(g, &upper, &lower);
        PeelResult { exists: true, mask, upper, lower }
    }
}

/// Peelers shared by the workers of a parallel batch. Allocating scratch
/// arrays per rayon job would cost O(n) each time.
pub struct PeelerPool<'g> {
    graph: &'g AttributedBipartiteGraph,
    free: std::sync::Mutex<Vec<Peeler>>,
}

impl<'g> PeelerPool<'g> {
    pub fn new(graph: &'g AttributedBipartiteGraph) -> Self {
        PeelerPool { graph, free: std::sync::Mutex::new(Vec::new()) }
    }

    pub fn get(&self) -> PooledPeeler<'_, 'g> {
        let p = self.free.lock().unwrap().pop().unwrap_or_else(|| Peeler::new(self.graph));
        PooledPeeler { pool: self, peeler: Some(p) }
    }
}

pub struct PooledPeeler<'p, 'g> {
    pool: &'p PeelerPool<'g>,
    peeler: Option<Peeler>,
}

impl std::ops::Deref for PooledPeeler<'_, '_> {
    type Target = Peeler;
    fn deref(&self) -> &Peeler {
        self.peeler.as_ref().unwrap()
    }
}

impl std::ops::DerefMut for PooledPeeler<'_, '_> {
    fn deref_mut(&mut self) -> &mut Peeler {
        self.peeler.as_mut().unwrap()
    }
}

impl Drop for PooledPeeler<'_, '_> {
    fn drop(&mut self) {
        if let Some(p) = self.peeler.take() {
            self.pool.free.lock().unwrap().push(p);
        }
    }
}

#[inline]
fn live_neighbors<'a, S: Scope>(
    g: &'a AttributedBipartiteGraph,
    scope: &'a S,
    x: VertexRef,
) -> impl Iterator<Item = VertexRef> + 'a {
    g.neighbors(x).iter().filter_map(move |&y| {
        let (yr, u, v) = match x.layer {
            Layer::Upper => (VertexRef::lower(y), x.index, y),
            Layer::Lower => (VertexRef::upper(y), y, x.index),
        };
        (scope.alive(yr) && scope.edge_alive(u, v)).then_some(yr)
    })
}

/// Degree-constrained community of `q` inside `mask`.
pub fn peel_community(
    g: &AttributedBipartiteGraph,
    mask: &SubgraphMask,
    q: VertexRef,
    p: CoreParams,
) -> PeelResult {
    let mut r = Peeler::new(g).peel(g, mask, q, p);
    if r.exists {
        for &(u, v) in mask.removed_edges() {
            r.mask.remove_edge(u, v);
        }
    }
    r
}

/// The whole (α,β)-core of `scope`, unrestricted by connectivity.
pub fn core_mask<S: Scope>(g: &AttributedBipartiteGraph, scope: &S, p: CoreParams) -> SubgraphMask {
    let mut deg_u = vec![0u32; g.upper_count()];
    let mut deg_v = vec![0u32; g.lower_count()];
    let mut alive = SubgraphMask::empty(g);
    for u in 0..g.upper_count() as u32 {
        if scope.upper_alive(u) {
            alive.insert(VertexRef::upper(u));
        }
    }
    for v in 0..g.lower_count() as u32 {
        if scope.lower_alive(v) {
            alive.insert(VertexRef::lower(v));
        }
    }
    let mut work = Vec::new();
    for u in alive.upper_vertices().collect::<Vec<_>>() {
        let x = VertexRef::upper(u);
        deg_u[u as usize] = live_neighbors(g, scope, x).count() as u32;
        if deg_u[u as usize] < p.alpha {
            work.push(x);
        }
    }
    for v in alive.lower_vertices().collect::<Vec<_>>() {
        let x = VertexRef::lower(v);
        deg_v[v as usize] = live_neighbors(g, scope, x).count() as u32;
        if deg_v[v as usize] < p.beta {
            work.push(x);
        }
    }
    while let Some(x) = work.pop() {
        if !alive.contains(x) {
            continue;
        }
        alive.remove(x);
        for y in live_neighbors(g, scope, x).collect::<Vec<_>>() {
            if !alive.contains(y) {
                continue;
            }
            let (d, thr) = match y.layer {
                Layer::Upper => (&mut deg_u[y.index as usize], p.alpha),
                Layer::Lower => (&mut deg_v[y.index as usize], p.beta),
            };
            *d -= 1;
            if *d + 1 == thr {
                work.push(y);
            }
        }
    }
    alive
}

/// All maximal (α,β)-connected components, in order of their smallest upper
/// vertex (then smallest lower vertex).
pub fn core_decompose(g: &AttributedBipartiteGraph, p: CoreParams) -> Vec<SubgraphMask> {
    let core = core_mask(g, &SubgraphMask::full(g), p);
    let mut assigned = SubgraphMask::empty(g);
    let mut comps = Vec::new();
    let starts: Vec<VertexRef> = core
        .upper_vertices()
        .map(VertexRef::upper)
        .chain(core.lower_vertices().map(VertexRef::lower))
        .collect();
    for s in starts {
        if assigned.contains(s) {
            continue;
        }
        let comp = crate::graph::connected_component_of(g, &core, s);
        for u in comp.upper_vertices() {
            assigned.insert(VertexRef::upper(u));
        }
        for v in comp.lower_vertices() {
            assigned.insert(VertexRef::lower(v));
        }
        comps.push(comp);
    }
    comps
}
