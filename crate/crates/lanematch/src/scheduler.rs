//! Two-phase load balancer: an initialization BFS fills a shared task pool
//! of uniform-depth partial matches; workers drain it through an atomic
//! counter and, once it is exhausted, steal stack halves from busy workers
//! through an idle queue plus per-worker status slots.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::coarse::{BfsLevel, BfsStop, CoarseConfig, CoarseEngine};
use crate::error::Result;
use crate::filter::CandidateFilter;
use crate::fine::{DescentHook, ExecStack, FineEngine, NoHook, StolenWork};
use crate::graph::Graph;
use crate::metrics::EventAccum;
use crate::ordering::MatchingOrder;
use crate::sink::Sink;
use crate::workload::QueryGraph;

/// Uniform-depth partial matches dispensed exactly once each through a
/// fetch-and-increment counter.
pub struct TaskPool {
    items: Vec<u32>,
    depth: usize,
    next: AtomicUsize,
}

impl TaskPool {
    pub fn from_level(level: BfsLevel) -> Self {
        TaskPool {
            items: level.items,
            depth: level.depth,
            next: AtomicUsize::new(0),
        }
    }

    pub fn len(&self) -> usize {
        if self.depth == 0 {
            0
        } else {
            self.items.len() / self.depth
        }
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Dispenses the next item, or None once the pool is exhausted. Each
    /// item is returned to exactly one caller across all threads.
    pub fn fetch(&self) -> Option<(usize, &[u32])> {
        let i = self.next.fetch_add(1, Ordering::Relaxed);
        if i < self.len() {
            Some((i, &self.items[i * self.depth..(i + 1) * self.depth]))
        } else {
            None
        }
    }
}

/// Either a pool to distribute, or the final matches when the
/// initialization BFS already completed the query.
pub enum PoolOutcome {
    Pool(TaskPool),
    Complete(BfsLevel),
}

/// Runs the initialization BFS until a level holds at least `tau` partial
/// matches (or the query completes), bounded by `mem_cap` bytes of level
/// storage.
pub fn build_initial_pool(
    g: &Graph,
    q: &QueryGraph,
    order: &MatchingOrder,
    filter: Option<&CandidateFilter>,
    tau: usize,
    mem_cap: u64,
) -> Result<PoolOutcome> {
    assert!(tau >= 1);
    let mut eng = CoarseEngine::new(
        g,
        q,
        order,
        filter,
        CoarseConfig::default(),
        Sink::count(),
        false,
    );
    let level = eng.bfs_search(BfsStop::Threshold(tau), mem_cap)?;
    if level.is_complete(order.len()) {
        Ok(PoolOutcome::Complete(level))
    } else {
        Ok(PoolOutcome::Pool(TaskPool::from_level(level)))
    }
}

enum SlotState {
    Busy,
    Idle,
    Handed(StolenWork),
}

struct Slot {
    state: SlotState,
}

/// Idle queue + per-worker status slots + the active-worker count used for
/// termination detection. `active` counts busy workers plus handed-off work
/// not yet picked up, so it reaches 0 only when no future hand-off is
/// possible.
pub struct StealBoard {
    idle: Mutex<VecDeque<usize>>,
    idle_len: AtomicUsize,
    slots: Vec<Mutex<Slot>>,
    active: AtomicUsize,
    pub steal_count: AtomicU64,
    stop: AtomicBool,
}

impl StealBoard {
    pub fn new(workers: usize) -> Self {
        StealBoard {
            idle: Mutex::new(VecDeque::new()),
            idle_len: AtomicUsize::new(0),
            slots: (0..workers)
                .map(|_| {
                    Mutex::new(Slot {
                        state: SlotState::Busy,
                    })
                })
                .collect(),
            active: AtomicUsize::new(workers),
            steal_count: AtomicU64::new(0),
            stop: AtomicBool::new(false),
        }
    }

    pub fn stop_flag(&self) -> &AtomicBool {
        &self.stop
    }

    /// Busy-worker side: if a thief is waiting and the stack has a
    /// splittable level, hand off the second half. The active count is
    /// raised before the thief's slot flips so it can never observe zero
    /// while its work is in flight.
    pub fn try_offer(&self, stack: &mut ExecStack) -> bool {
        if self.idle_len.load(Ordering::Relaxed) == 0 {
            return false;
        }
        let thief = {
            let mut q = self.idle.lock().unwrap();
            match q.pop_front() {
                Some(t) => {
                    self.idle_len.fetch_sub(1, Ordering::Relaxed);
                    t
                }
                None => return false,
            }
        };
        match stack.split_shallowest() {
            Some(work) => {
                self.active.fetch_add(1, Ordering::SeqCst);
                {
                    let mut slot = self.slots[thief].lock().unwrap();
                    slot.state = SlotState::Handed(work);
                }
                self.steal_count.fetch_add(1, Ordering::Relaxed);
                true
            }
            None => {
                let mut q = self.idle.lock().unwrap();
                q.push_back(thief);
                self.idle_len.fetch_add(1, Ordering::Relaxed);
                false
            }
        }
    }

    /// Idle-worker side: announce idleness, then poll the own slot until
    /// work arrives or the active count hits zero (global termination).
    pub fn report_idle_and_poll(&self, me: usize) -> Option<StolenWork> {
        {
            let mut slot = self.slots[me].lock().unwrap();
            slot.state = SlotState::Idle;
        }
        {
            let mut q = self.idle.lock().unwrap();
            q.push_back(me);
            self.idle_len.fetch_add(1, Ordering::Relaxed);
        }
        self.active.fetch_sub(1, Ordering::SeqCst);
        loop {
            {
                let mut slot = self.slots[me].lock().unwrap();
                if let SlotState::Handed(_) = slot.state {
                    let SlotState::Handed(work) =
                        std::mem::replace(&mut slot.state, SlotState::Busy)
                    else {
                        unreachable!()
                    };
                    return Some(work);
                }
            }
            if self.active.load(Ordering::SeqCst) == 0 || self.stop.load(Ordering::Relaxed) {
                // no busy worker remains, so no hand-off can ever happen;
                // withdraw from the queue and terminate
                let mut q = self.idle.lock().unwrap();
                if let Some(pos) = q.iter().position(|&x| x == me) {
                    q.remove(pos);
                    self.idle_len.fetch_sub(1, Ordering::Relaxed);
                }
                return None;
            }
            std::thread::yield_now();
        }
    }
}

/// Victim-side descent hook: offers a split at every recursion point.
struct StealHook<'b> {
    board: &'b StealBoard,
}

impl DescentHook for StealHook<'_> {
    fn on_descend(&mut self, stack: &mut ExecStack) {
        self.board.try_offer(stack);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Coarse,
    Fine,
}

#[derive(Debug, Clone, Copy)]
pub struct ExecOptions {
    pub engine: EngineKind,
    pub w: usize,
    pub sigma: usize,
    pub workers: usize,
    pub steal: bool,
    pub record_events: bool,
    pub collect: bool,
    pub deadline: Option<Instant>,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions {
            engine: EngineKind::Fine,
            w: 32,
            sigma: 1,
            workers: 1,
            steal: true,
            record_events: false,
            collect: false,
            deadline: None,
        }
    }
}

pub struct ExecResult {
    pub total: u64,
    pub matches: Option<Vec<Vec<u32>>>,
    pub events: EventAccum,
    pub busy_secs: Vec<f64>,
    pub steal_count: u64,
    pub timed_out: bool,
}

/// Parallel search phase: `opts.workers` threads drain the pool; fine-engine
/// workers additionally steal stack halves when `opts.steal` is set. The
/// coarse baseline has no compact stack to split, so it only load-balances
/// through the pool counter.
pub fn execute(
    g: &Graph,
    q: &QueryGraph,
    order: &MatchingOrder,
    filter: Option<&CandidateFilter>,
    pool: &TaskPool,
    opts: ExecOptions,
) -> ExecResult {
    assert!(opts.workers >= 1);
    let board = StealBoard::new(opts.workers);
    let stealing = opts.steal && opts.engine == EngineKind::Fine && opts.workers > 1;

    let done = AtomicBool::new(false);
    let mut per_worker: Vec<(Sink, EventAccum, f64)> = Vec::with_capacity(opts.workers);
    std::thread::scope(|scope| {
        let mut handles = Vec::with_capacity(opts.workers);
        for me in 0..opts.workers {
            let board = &board;
            handles.push(scope.spawn(move || {
                worker_loop(me, g, q, order, filter, pool, board, opts, stealing)
            }));
        }
        // lightweight watchdog: flips the shared stop flag at the deadline
        // unless the workers finish first
        let watchdog = opts.deadline.map(|deadline| {
            let (board, done) = (&board, &done);
            scope.spawn(move || {
                while !done.load(Ordering::Relaxed) {
                    if Instant::now() >= deadline {
                        board.stop.store(true, Ordering::Relaxed);
                        break;
                    }
                    std::thread::sleep(Duration::from_millis(1));
                }
            })
        });
        for h in handles {
            per_worker.push(h.join().expect("worker panicked"));
        }
        done.store(true, Ordering::Relaxed);
        if let Some(w) = watchdog {
            w.join().expect("watchdog panicked");
        }
    });

    let mut total = 0u64;
    let mut matches = opts.collect.then(Vec::new);
    let mut events = EventAccum::new(opts.record_events);
    let mut busy_secs = Vec::with_capacity(opts.workers);
    for (sink, ev, busy) in per_worker {
        total += sink.total();
        if let (Some(all), Sink::Collect(ms)) = (&mut matches, &sink) {
            all.extend_from_slice(ms);
        }
        events.merge(&ev);
        busy_secs.push(busy);
    }
    ExecResult {
        total,
        matches,
        events,
        busy_secs,
        steal_count: board.steal_count.load(Ordering::Relaxed),
        timed_out: board.stop.load(Ordering::Relaxed),
    }
}

#[allow(clippy::too_many_arguments)]
fn worker_loop(
    me: usize,
    g: &Graph,
    q: &QueryGraph,
    order: &MatchingOrder,
    filter: Option<&CandidateFilter>,
    pool: &TaskPool,
    board: &StealBoard,
    opts: ExecOptions,
    stealing: bool,
) -> (Sink, EventAccum, f64) {
    let sink = if opts.collect {
        Sink::collect()
    } else {
        Sink::count()
    };
    let started = Instant::now();
    let complete = pool.depth() == order.len();

    match opts.engine {
        EngineKind::Coarse => {
            let cfg = CoarseConfig {
                sigma: opts.sigma,
                w: opts.w,
                naive_candidate: false,
            };
            let mut eng = CoarseEngine::new(g, q, order, filter, cfg, sink, opts.record_events)
                .with_stop_flag(board.stop_flag());
            while let Some((_, item)) = pool.fetch() {
                if complete {
                    eng.sink.emit(item);
                } else {
                    let item = item.to_vec();
                    eng.dfs_search(&item);
                }
                if eng.stopped {
                    break;
                }
            }
            // the coarse baseline cannot split; just retire through the board
            // so fine-engine termination accounting stays uniform
            board.active.fetch_sub(1, Ordering::SeqCst);
            (eng.sink, eng.events, started.elapsed().as_secs_f64())
        }
        EngineKind::Fine => {
            let mut eng = FineEngine::new(g, q, order, filter, opts.w, sink, opts.record_events)
                .with_stop_flag(board.stop_flag());
            let mut hook = StealHook { board };
            let mut no_hook = NoHook;
            loop {
                while let Some((_, item)) = pool.fetch() {
                    if complete {
                        eng.sink.emit(item);
                    } else {
                        let item = item.to_vec();
                        if stealing {
                            eng.run_item(&item, &mut hook);
                        } else {
                            eng.run_item(&item, &mut no_hook);
                        }
                    }
                    if eng.stopped {
                        break;
                    }
                }
                if !stealing || eng.stopped {
                    board.active.fetch_sub(1, Ordering::SeqCst);
                    break;
                }
                match board.report_idle_and_poll(me) {
                    Some(work) => {
                        eng.resume(work, &mut hook);
                    }
                    None => break,
                }
            }
            (eng.sink, eng.events, started.elapsed().as_secs_f64())
        }
    }
}
