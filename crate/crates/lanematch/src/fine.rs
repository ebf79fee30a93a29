//! Fine-grained lane-batched engine: a compact per-worker execution stack
//! whose rows hold one entry per lane, with a two-cursor virtual task pool
//! per level. A worker emulates the W lockstep lanes of one round as a
//! sequential loop, which preserves the exact batch semantics including the
//! leader-only scatter step.
//!
//! Three defects in the published pseudocode are resolved here (each marked
//! at its use site):
//!   1. the per-lane activity test reads "lid < k => inactive"; only
//!      "lid >= k => inactive" is consistent with one-task-per-assigned-lane;
//!   2. the candidate-set selection condition can never accept a first set;
//!      it is implemented as a running minimum (empty-so-far, or strictly
//!      fewer neighbors), with shallower levels winning ties;
//!   3. the scatter counter must reset every round, and the level loop
//!      terminates when a scatter yields zero tasks.

use std::sync::atomic::{AtomicBool, Ordering};

use crate::filter::CandidateFilter;
use crate::graph::Graph;
use crate::metrics::{EngineTag, EventAccum};
use crate::ordering::MatchingOrder;
use crate::sink::Sink;
use crate::workload::QueryGraph;

/// Declared per-entry size of the execution-stack model: vertex id (4),
/// parent lane id + feasibility (4), candidate-range begin/end (8 + 8).
pub const ENTRY_BYTES: u64 = 24;

/// Execution-stack footprint: |V(Q)| x W entries, independent of the data
/// graph entirely (in particular of d_max).
pub fn stack_bytes_fine(query_vertices: usize, w: usize) -> u64 {
    query_vertices as u64 * w as u64 * ENTRY_BYTES
}

/// One lane's slot at one level. `v`/`f`/`pid` describe the task scattered
/// into this lane; `c_begin..c_end` is the candidate range generated FROM
/// this lane when it acted as a parent (offsets into the graph's flat
/// neighbor array). The two groups coexist: scatter writes v/pid, process
/// writes f, and neither touches the range fields.
#[derive(Debug, Clone, Copy, Default)]
pub struct StackEntry {
    pub v: u32,
    pub f: bool,
    pub pid: u32,
    pub c_begin: usize,
    pub c_end: usize,
}

#[derive(Debug, Clone)]
pub struct ExecStack {
    pub w: usize,
    levels: usize,
    entries: Vec<StackEntry>,
    /// Per-level (source lane, offset within its range) of the next
    /// unscattered task — the two lightweight cursors of the virtual pool.
    pub cursors: Vec<(usize, usize)>,
    /// Levels currently on the worker's recursion path.
    pub live: Vec<bool>,
}

/// A stack half handed to a thief: resume the round loop at `level`.
#[derive(Debug)]
pub struct StolenWork {
    pub stack: ExecStack,
    pub level: usize,
}

impl ExecStack {
    pub fn new(levels: usize, w: usize) -> Self {
        ExecStack {
            w,
            levels,
            entries: vec![StackEntry::default(); levels * w],
            cursors: vec![(0, 0); levels],
            live: vec![false; levels],
        }
    }

    #[inline]
    pub fn entry(&self, level: usize, lane: usize) -> &StackEntry {
        &self.entries[level * self.w + lane]
    }

    #[inline]
    pub fn entry_mut(&mut self, level: usize, lane: usize) -> &mut StackEntry {
        &mut self.entries[level * self.w + lane]
    }

    /// Seeds the stack with one partial match of depth >= 1 in lane 0;
    /// the other lanes at the deepest seeded level are marked infeasible so
    /// candidate generation skips them.
    pub fn init(&mut self, m0: &[u32]) {
        debug_assert!(!m0.is_empty() && m0.len() <= self.levels);
        for e in &mut self.entries {
            *e = StackEntry::default();
        }
        for (i, &v) in m0.iter().enumerate() {
            *self.entry_mut(i, 0) = StackEntry {
                v,
                f: true,
                pid: 0,
                c_begin: 0,
                c_end: 0,
            };
        }
        self.cursors.fill((0, 0));
        self.live.fill(false);
    }

    /// Mapped data vertex at each order position, reconstructed by walking
    /// parent-lane ids upward from (level, lane). `out[0..=level]` is filled.
    pub fn reconstruct(&self, level: usize, lane: usize, out: &mut [u32]) {
        let mut cur = lane;
        for lev in (0..=level).rev() {
            let e = self.entry(lev, cur);
            out[lev] = e.v;
            cur = e.pid as usize;
        }
    }

    /// Unscattered tasks left at `level`, from the cursors onward.
    pub fn remaining(&self, level: usize) -> usize {
        let (i0, j0) = self.cursors[level];
        let mut total = 0;
        for i in i0..self.w {
            let e = self.entry(level, i);
            let len = e.c_end - e.c_begin;
            let used = if i == i0 { j0 } else { 0 };
            total += len - used.min(len);
        }
        total
    }

    /// Splits the shallowest live level holding >= 2 unscattered tasks into
    /// contiguous halves by cursor arithmetic: the victim keeps the first
    /// half (its ranges are truncated at the midpoint), the thief receives a
    /// copy of all rows up to the split level with cursors at the midpoint
    /// and everything deeper empty. Returns None when nothing is splittable.
    pub fn split_shallowest(&mut self) -> Option<StolenWork> {
        for s in 0..self.levels {
            if !self.live[s] {
                continue;
            }
            let r = self.remaining(s);
            if r < 2 {
                continue;
            }
            let keep = r - r / 2; // victim keeps the larger half on odd r

            // advance a cursor copy past `keep` tasks to find the midpoint
            let (mut i, mut j) = self.cursors[s];
            let mut left = keep;
            while left > 0 {
                let e = self.entry(s, i);
                let len = e.c_end - e.c_begin;
                let avail = len.saturating_sub(j);
                let take = avail.min(left);
                j += take;
                left -= take;
                if left > 0 || take == avail {
                    i += 1;
                    j = 0;
                }
            }
            // `left == 0` exactly at (i, j); if the midpoint landed on a lane
            // boundary the loop already advanced to the next lane with j = 0

            let mut thief = ExecStack::new(self.levels, self.w);
            let upto = (s + 1) * self.w;
            thief.entries[..upto].copy_from_slice(&self.entries[..upto]);
            thief.cursors[s] = (i, j);
            thief.live[s] = true;

            // victim keeps the first half: cut lane i at the midpoint and
            // empty every later lane's range
            if i < self.w {
                let e = self.entry_mut(s, i);
                e.c_end = e.c_begin + j;
            }
            for lane in (i + 1)..self.w {
                let e = self.entry_mut(s, lane);
                e.c_end = e.c_begin;
            }
            debug_assert_eq!(self.remaining(s), keep);
            debug_assert_eq!(thief.remaining(s), r - keep);
            return Some(StolenWork {
                stack: thief,
                level: s,
            });
        }
        None
    }
}

/// Called by the engine at every descent point (entry to the next level's
/// round loop); the scheduler's implementation offers stack splits to idle
/// workers here. The engine itself never splits.
pub trait DescentHook {
    fn on_descend(&mut self, stack: &mut ExecStack);
}

/// No-op hook for single-worker and steal-off runs.
pub struct NoHook;

impl DescentHook for NoHook {
    fn on_descend(&mut self, _stack: &mut ExecStack) {}
}

pub struct FineEngine<'a> {
    g: &'a Graph,
    q: &'a QueryGraph,
    order: &'a MatchingOrder,
    filter: Option<&'a CandidateFilter>,
    pub stack: ExecStack,
    pub sink: Sink,
    pub events: EventAccum,
    scratch: Vec<u32>,
    stop_flag: Option<&'a AtomicBool>,
    pub stopped: bool,
}

impl<'a> FineEngine<'a> {
    pub fn new(
        g: &'a Graph,
        q: &'a QueryGraph,
        order: &'a MatchingOrder,
        filter: Option<&'a CandidateFilter>,
        w: usize,
        sink: Sink,
        record_events: bool,
    ) -> Self {
        assert!(w >= 1);
        let n = order.len();
        FineEngine {
            g,
            q,
            order,
            filter,
            stack: ExecStack::new(n, w),
            sink,
            events: EventAccum::new(record_events),
            scratch: vec![0; n],
            stop_flag: None,
            stopped: false,
        }
    }

    pub fn with_stop_flag(mut self, flag: &'a AtomicBool) -> Self {
        self.stop_flag = Some(flag);
        self
    }

    #[inline]
    fn should_stop(&mut self) -> bool {
        if self.stopped {
            return true;
        }
        if let Some(f) = self.stop_flag {
            if f.load(Ordering::Relaxed) {
                self.stopped = true;
                return true;
            }
        }
        false
    }

    /// Explores the full subtree under one pool item.
    pub fn run_item(&mut self, m0: &[u32], hook: &mut dyn DescentHook) {
        let nphi = self.order.len();
        if m0.len() == nphi {
            self.sink.emit(m0);
            return;
        }
        self.stack.init(m0);
        let l0 = m0.len();
        self.generate_level(l0);
        self.search(l0, hook);
    }

    /// Resumes a stolen stack half at its split level.
    pub fn resume(&mut self, stolen: StolenWork, hook: &mut dyn DescentHook) {
        assert_eq!(stolen.stack.w, self.stack.w);
        self.stack = stolen.stack;
        self.search(stolen.level, hook);
    }

    /// Candidate-range generation for all lanes entering `level`, plus the
    /// cursor reset that opens the level's virtual pool.
    fn generate_level(&mut self, level: usize) {
        for lane in 0..self.stack.w {
            self.generate_task(level, lane);
        }
        self.stack.cursors[level] = (0, 0);
    }

    /// Writes the candidate range of `lane`'s partial match for `level`:
    /// empty if the parent lane is infeasible, otherwise the adjacency slice
    /// of the backward-neighbor mapping with the fewest neighbors
    /// (running minimum — pseudocode defect 2; shallower level wins ties).
    fn generate_task(&mut self, level: usize, lane: usize) {
        debug_assert!(level >= 1);
        let parent_ok = self.stack.entry(level - 1, lane).f;
        let (mut begin, mut end) = (0usize, 0usize);
        if parent_ok {
            let mask = self.order.backward_mask[level];
            let mut best_len = usize::MAX;
            let mut cur = lane;
            // the walk visits levels deepest-first, so `<=` makes the
            // shallowest minimum the final winner
            for lev in (0..level).rev() {
                let e = *self.stack.entry(lev, cur);
                if mask & (1u64 << lev) != 0 {
                    let (b, en) = self.g.neighbor_range(e.v);
                    if en - b <= best_len {
                        best_len = en - b;
                        begin = b;
                        end = en;
                    }
                }
                cur = e.pid as usize;
            }
            debug_assert!(best_len != usize::MAX, "order guarantees a backward neighbor");
        }
        let slot = self.stack.entry_mut(level, lane);
        slot.c_begin = begin;
        slot.c_end = end;
    }

    /// Leader step: packs up to W tasks from the level's unscattered ranges
    /// into lanes 0..k, advancing the two cursors. k resets every round and
    /// a k = 0 return ends the level (pseudocode defect 3).
    fn scatter(&mut self, level: usize) -> usize {
        let w = self.stack.w;
        let (mut i, mut j) = self.stack.cursors[level];
        let mut k = 0;
        while k < w && i < w {
            let src = *self.stack.entry(level, i);
            if src.c_begin + j < src.c_end {
                let v = self.g.neighbor_at(src.c_begin + j);
                let dst = self.stack.entry_mut(level, k);
                dst.v = v;
                dst.pid = i as u32;
                j += 1;
                k += 1;
            } else {
                i += 1;
                j = 0;
            }
        }
        self.stack.cursors[level] = (i, j);
        k
    }

    /// One lane's fused feasibility check: lanes without a task are inactive
    /// (pseudocode defect 1); active lanes verify label, injectivity and all
    /// backward edges in a single chain walk.
    fn process(&self, level: usize, k: usize, lane: usize) -> bool {
        if lane >= k {
            return false;
        }
        let e = *self.stack.entry(level, lane);
        let qv = self.order.phi[level];
        if self.g.label(e.v) != self.q.label(qv) {
            return false;
        }
        if let Some(f) = self.filter {
            if !f.admissible(qv, e.v) {
                return false;
            }
        }
        let mask = self.order.backward_mask[level];
        let mut cur = e.pid as usize;
        for lev in (0..level).rev() {
            let p = self.stack.entry(lev, cur);
            if p.v == e.v {
                return false;
            }
            if mask & (1u64 << lev) != 0 && !self.g.contains_edge(p.v, e.v) {
                return false;
            }
            cur = p.pid as usize;
        }
        true
    }

    /// The round loop for one level: scatter a batch, process all lanes in
    /// lockstep, emit at the last level or recurse when the lane-OR ballot
    /// finds any feasible lane. Parent rounds resume at their saved cursors
    /// after the recursion returns.
    fn search(&mut self, level: usize, hook: &mut dyn DescentHook) {
        let nphi = self.order.len();
        let w = self.stack.w;
        self.stack.live[level] = true;
        loop {
            if self.should_stop() {
                break;
            }
            let k = self.scatter(level);
            if k == 0 {
                break;
            }
            let mut ballot = false;
            for lane in 0..w {
                let f = self.process(level, k, lane);
                self.stack.entry_mut(level, lane).f = f;
                ballot |= f;
            }
            self.events.log_round(EngineTag::Fine, level, k, w);
            if level + 1 == nphi {
                for lane in 0..k {
                    if self.stack.entry(level, lane).f {
                        self.stack.reconstruct(level, lane, &mut self.scratch);
                        self.sink.emit(&self.scratch);
                    }
                }
            } else if ballot {
                hook.on_descend(&mut self.stack);
                self.generate_level(level + 1);
                self.search(level + 1, hook);
            }
        }
        self.stack.live[level] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coarse::{BfsStop, CoarseConfig, CoarseEngine};
    use crate::gen;
    use crate::graph::Graph;
    use crate::ordering::generate_order;
    use crate::workload::{random_query, QueryGraph};

    fn query(n: usize, edges: &[(u32, u32)]) -> QueryGraph {
        let (g, _) = Graph::from_edges(n, edges, vec![0; n], 1);
        QueryGraph::new(g).unwrap()
    }

    fn k4() -> Graph {
        let mut e = Vec::new();
        for u in 0..4u32 {
            for v in (u + 1)..4 {
                e.push((u, v));
            }
        }
        Graph::from_edges(4, &e, vec![0; 4], 1).0
    }

    fn seed_pairs(g: &Graph) -> Vec<[u32; 2]> {
        let mut out = Vec::new();
        for v in 0..g.n() as u32 {
            for &u in g.neighbor_slice(v) {
                out.push([v, u]);
            }
        }
        out
    }

    #[test]
    fn init_chain_reconstructs_seed() {
        let g = k4();
        let q = query(3, &[(0, 1), (1, 2), (0, 2)]);
        let order = generate_order(&q);
        let mut eng = FineEngine::new(&g, &q, &order, None, 32, Sink::count(), false);
        eng.stack.init(&[2, 3]);
        let mut out = [0u32; 2];
        eng.stack.reconstruct(1, 0, &mut out);
        assert_eq!(out, [2, 3]);
        assert!(!eng.stack.entry(1, 5).f, "other lanes start infeasible");
    }

    #[test]
    fn scatter_cursor_arithmetic() {
        // lane 0: range of length 5; lane 1: empty; lane 2: length 40
        let mut g_edges: Vec<(u32, u32)> = (1..=40).map(|v| (0u32, v)).collect();
        g_edges.extend((42..=46).map(|v| (41u32, v)));
        let (g, _) = Graph::from_edges(47, &g_edges, vec![0; 47], 1);
        let q = query(3, &[(0, 1), (1, 2), (0, 2)]);
        let order = generate_order(&q);
        let mut eng = FineEngine::new(&g, &q, &order, None, 32, Sink::count(), false);
        let (b5, e5) = g.neighbor_range(41);
        let (b40, e40) = g.neighbor_range(0);
        assert_eq!(e5 - b5, 5);
        assert_eq!(e40 - b40, 40);
        let lvl = 1;
        {
            let e = eng.stack.entry_mut(lvl, 0);
            e.c_begin = b5;
            e.c_end = e5;
        }
        {
            let e = eng.stack.entry_mut(lvl, 2);
            e.c_begin = b40;
            e.c_end = e40;
        }
        eng.stack.cursors[lvl] = (0, 0);
        assert_eq!(eng.stack.remaining(lvl), 45);

        let k1 = eng.scatter(lvl);
        assert_eq!(k1, 32);
        assert_eq!(eng.stack.cursors[lvl], (2, 27));
        assert_eq!(eng.stack.entry(lvl, 0).pid, 0);
        assert_eq!(eng.stack.entry(lvl, 4).pid, 0);
        assert_eq!(eng.stack.entry(lvl, 5).pid, 2);
        assert_eq!(eng.stack.entry(lvl, 31).pid, 2);

        let k2 = eng.scatter(lvl);
        assert_eq!(k2, 13);
        assert_eq!(eng.stack.cursors[lvl].0, 32); // exhausted scan
        assert_eq!(eng.scatter(lvl), 0);
    }

    #[test]
    fn generate_task_picks_min_degree_backward() {
        // data: vertex 100 has degree 9, vertex 101 has degree 50, both
        // adjacent to everything relevant; query triangle maps two backward
        // neighbors onto them
        let mut edges: Vec<(u32, u32)> = (0..9).map(|v| (100u32, v)).collect();
        edges.extend((0..50).map(|v| (101u32, v)));
        let (g, _) = Graph::from_edges(102, &edges, vec![0; 102], 1);
        let q = query(3, &[(0, 1), (1, 2), (0, 2)]);
        let order = generate_order(&q); // phi = [0,1,2], backward[2] = [0,1]
        let mut eng = FineEngine::new(&g, &q, &order, None, 32, Sink::count(), false);
        eng.stack.init(&[101, 100]); // positions 0,1 -> degrees 50, 9
        eng.generate_task(2, 0);
        let e = eng.stack.entry(2, 0);
        assert_eq!(e.c_end - e.c_begin, 9);
        let (b, _) = g.neighbor_range(100);
        assert_eq!(e.c_begin, b);
    }

    #[test]
    fn process_checks() {
        // wedge query u0-u1-u2 on data path 0-1-2: extending (0,1) with 2
        // succeeds; extending with 0 violates injectivity
        let (g, _) = Graph::from_edges(3, &[(0, 1), (1, 2)], vec![0; 3], 1);
        let q = query(3, &[(0, 1), (1, 2)]);
        let order = generate_order(&q); // phi = [1, 0, 2] (middle first)
        let mut eng = FineEngine::new(&g, &q, &order, None, 32, Sink::count(), false);
        eng.stack.init(&[1, 0]);
        eng.generate_level(2);
        let k = eng.scatter(2);
        assert_eq!(k, 2); // N(1) = {0, 2}
        let results: Vec<bool> = (0..4).map(|lane| eng.process(2, k, lane)).collect();
        // lane tasks are N(1) in sorted order: v=0 (already mapped), v=2 (ok)
        assert_eq!(results, vec![false, true, false, false]);
    }

    #[test]
    fn triangle_on_k4_counts_24() {
        let g = k4();
        let q = query(3, &[(0, 1), (1, 2), (0, 2)]);
        let order = generate_order(&q);
        let mut eng = FineEngine::new(&g, &q, &order, None, 32, Sink::collect(), true);
        for seed in seed_pairs(&g) {
            eng.run_item(&seed, &mut NoHook);
        }
        assert_eq!(eng.sink.total(), 24);
        // every listed match is a valid triangle embedding
        for m in eng.sink.matches().unwrap() {
            assert_eq!(m.len(), 3);
            for i in 0..3 {
                for j in (i + 1)..3 {
                    assert_ne!(m[i], m[j]);
                    if q.has_edge(order.phi[i], order.phi[j]) {
                        assert!(g.contains_edge(m[i], m[j]));
                    }
                }
            }
        }
    }

    #[test]
    fn matches_coarse_on_random_instances() {
        for seed in 0..20 {
            let g = gen::er(48, 0.25, seed);
            let Ok(q) = random_query(&g, 4, seed + 1000) else {
                continue;
            };
            let order = generate_order(&q);
            let mut coarse = CoarseEngine::new(
                &g,
                &q,
                &order,
                None,
                CoarseConfig::default(),
                Sink::count(),
                false,
            );
            let pool = coarse.bfs_search(BfsStop::Threshold(1), u64::MAX).unwrap();
            let mut fine = FineEngine::new(&g, &q, &order, None, 32, Sink::count(), false);
            for i in 0..pool.len() {
                if pool.is_complete(order.len()) {
                    fine.sink.emit(pool.item(i));
                } else {
                    let item = pool.item(i).to_vec();
                    fine.run_item(&item, &mut NoHook);
                }
            }
            let mut coarse2 = CoarseEngine::new(
                &g,
                &q,
                &order,
                None,
                CoarseConfig::default(),
                Sink::count(),
                false,
            );
            let full = coarse2.bfs_search(BfsStop::Full, u64::MAX).unwrap();
            assert_eq!(fine.sink.total(), full.len() as u64, "seed {seed}");
        }
    }

    #[test]
    fn split_halves_and_preserves_counts() {
        struct SplitOnce {
            stolen: Option<StolenWork>,
        }
        impl DescentHook for SplitOnce {
            fn on_descend(&mut self, stack: &mut ExecStack) {
                if self.stolen.is_none() {
                    self.stolen = stack.split_shallowest();
                }
            }
        }

        // w = 4 keeps candidate ranges larger than one batch, so unscattered
        // remainders (the split currency) actually exist
        let w = 4;
        for seed in 0..8 {
            let g = gen::er(30, 0.4, seed);
            let Ok(q) = random_query(&g, 4, seed + 77) else {
                continue;
            };
            let order = generate_order(&q);

            let mut base = FineEngine::new(&g, &q, &order, None, w, Sink::count(), false);
            let mut split_sum = 0u64;
            let mut any_split = false;
            for seed_pair in seed_pairs(&g) {
                let mut victim = FineEngine::new(&g, &q, &order, None, w, Sink::count(), false);
                let mut hook = SplitOnce { stolen: None };
                victim.run_item(&seed_pair, &mut hook);
                split_sum += victim.sink.total();
                if let Some(stolen) = hook.stolen {
                    any_split = true;
                    let mut thief = FineEngine::new(&g, &q, &order, None, w, Sink::count(), false);
                    thief.resume(stolen, &mut NoHook);
                    split_sum += thief.sink.total();
                }
                base.run_item(&seed_pair, &mut NoHook);
            }
            assert_eq!(split_sum, base.sink.total(), "seed {seed}");
            if base.sink.total() > 0 {
                assert!(any_split, "expected at least one split at seed {seed}");
            }
        }
    }

    #[test]
    fn split_balance_on_raw_stack() {
        // a level with 10 unscattered tasks splits 5/5
        let g = gen::star(12);
        let q = query(3, &[(0, 1), (1, 2), (0, 2)]);
        let order = generate_order(&q);
        let mut eng = FineEngine::new(&g, &q, &order, None, 32, Sink::count(), false);
        let (b, _) = g.neighbor_range(0);
        {
            let e = eng.stack.entry_mut(1, 0);
            e.c_begin = b;
            e.c_end = b + 10;
        }
        eng.stack.cursors[1] = (0, 0);
        eng.stack.live[1] = true;
        let stolen = eng.stack.split_shallowest().unwrap();
        assert_eq!(stolen.level, 1);
        assert_eq!(eng.stack.remaining(1), 5);
        assert_eq!(stolen.stack.remaining(1), 5);

        // a single remaining task is not splittable
        {
            let e = eng.stack.entry_mut(1, 0);
            e.c_end = e.c_begin + 1;
        }
        eng.stack.cursors[1] = (0, 0);
        assert!(eng.stack.split_shallowest().is_none());
    }

    #[test]
    fn stack_bytes_independent_of_graph() {
        assert_eq!(stack_bytes_fine(4, 32), 3072);
        assert_eq!(stack_bytes_fine(5, 32), 3840);
        // no graph parameter exists; cross-check the coarse ratio claim
        let coarse = crate::coarse::stack_bytes_coarse(4, 3200, 1);
        assert_eq!(
            coarse.candidate_bytes / stack_bytes_fine(4, 32),
            3200 * 4 / (32 * 24)
        );
    }

    #[test]
    fn batch_fullness_all_but_last_round() {
        // star hub forces > W candidates at one level; check full rounds
        let g = gen::star(100);
        let q = query(3, &[(0, 1), (0, 2)]); // wedge centered at hub
        let order = generate_order(&q);
        let mut eng = FineEngine::new(&g, &q, &order, None, 32, Sink::count(), true);
        eng.run_item(&[0, 1], &mut NoHook);
        assert_eq!(eng.sink.total(), 98);
        let rec = eng.events.record.as_ref().unwrap();
        // all rounds at the final level except the last are full
        let last_level: Vec<u32> = rec
            .iter()
            .filter(|e| e.level == 2)
            .map(|e| e.active_lanes)
            .collect();
        assert!(last_level[..last_level.len() - 1].iter().all(|&k| k == 32));
    }
}
