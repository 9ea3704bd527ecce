//! Locality-aware worker pool: threads are bound to NUMA nodes once at pool
//! creation, each gate run hands every worker a contiguous task subrange, and
//! the lower half of the task space always goes to the node-0 threads so it
//! lines up with split allocation.
//!
//! Subranges never split an amplitude pair and their boundaries fall on the
//! kernel block granularity for the gate's target, so results are
//! independent of the thread count.

use std::ops::Range;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{channel, Sender};
use std::sync::{Arc, Condvar, Mutex};
use std::thread::JoinHandle;

use crate::numa::{detect_topology, NodeTopology};

/// Task subranges are cut at multiples of `min(2^target, 16)` tasks: 16 is
/// the kernel's unrolled chunk, and one block of the optimized walk spans
/// `2^target` tasks.
pub const PLAN_MAX_GRANULARITY: usize = 16;

/// How worker threads get pinned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PinMode {
    /// Leave affinity alone (honors externally set masks).
    Off,
    /// Bind each worker to all cores of its NUMA node.
    Node,
    /// Bind worker `t` to `cores[t % len]`.
    CoreList(Vec<usize>),
}

/// One worker's share of a gate application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreadAssignment {
    pub node: usize,
    pub core: Option<usize>,
    pub tasks: Range<usize>,
}

/// A full partition of the task space for one gate run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreadPlan {
    pub num_threads: usize,
    pub assignments: Vec<ThreadAssignment>,
}

/// Node for thread `t` of `num_threads`: contiguous groups with the first
/// `num_threads % num_nodes` nodes taking one extra thread (on two nodes,
/// threads `0..ceil(T/2)` land on node 0).
pub fn node_for_thread(thread: usize, num_threads: usize, num_nodes: usize) -> usize {
    let nodes = num_nodes.max(1);
    let base = num_threads / nodes;
    let extra = num_threads % nodes;
    let cut = (base + 1) * extra;
    if thread < cut {
        thread / (base + 1)
    } else {
        extra + (thread - cut).checked_div(base).unwrap_or(thread - cut)
    }
}

/// Near-equal static split of `num_tasks` tasks over `num_threads` workers,
/// respecting block granularity for `target`. When the task count does not
/// divide evenly the first threads take one extra chunk.
pub fn make_plan(
    num_threads: usize,
    topo: &NodeTopology,
    num_tasks: usize,
    target: usize,
) -> ThreadPlan {
    let threads = num_threads.max(1);
    let granularity = (1usize << target.min(60)).min(PLAN_MAX_GRANULARITY);
    let units = num_tasks / granularity;
    let leftover = num_tasks % granularity;

    let per = units / threads;
    let extra = units % threads;
    let mut assignments = Vec::with_capacity(threads);
    let mut start = 0usize;
    for t in 0..threads {
        let len_units = per + usize::from(t < extra);
        let mut end = start + len_units * granularity;
        if t == threads - 1 {
            end += leftover;
        }
        assignments.push(ThreadAssignment {
            node: node_for_thread(t, threads, topo.num_nodes),
            core: None,
            tasks: start..end,
        });
        start = end;
    }
    ThreadPlan {
        num_threads: threads,
        assignments,
    }
}

type KernelFn<'a> = &'a (dyn Fn(Range<usize>) + Sync);

/// Pointer to the borrowed kernel closure, smuggled to workers for the
/// duration of one `run_parallel` call.
struct RawKernel(*const (dyn Fn(Range<usize>) + Sync));
// SAFETY: run_parallel blocks until every worker has finished with the
// referent, which therefore outlives all uses.
unsafe impl Send for RawKernel {}

struct Job {
    kernel: RawKernel,
    tasks: Range<usize>,
    done: Arc<Completion>,
}

#[derive(Default)]
struct Completion {
    remaining: Mutex<usize>,
    all_done: Condvar,
    panicked: AtomicBool,
}

impl Completion {
    fn signal(&self) {
        let mut left = self.remaining.lock().unwrap();
        *left -= 1;
        if *left == 0 {
            self.all_done.notify_all();
        }
    }

    /// Blocks until every worker signaled; propagates worker panics.
    fn wait(&self) {
        let mut left = self.remaining.lock().unwrap();
        while *left > 0 {
            left = self.all_done.wait(left).unwrap();
        }
        if self.panicked.load(Ordering::Relaxed) {
            panic!("kernel worker panicked");
        }
    }
}

/// Persistent pinned workers, created once and reused across gates.
pub struct WorkerPool {
    senders: Vec<Sender<Job>>,
    handles: Vec<JoinHandle<()>>,
    num_threads: usize,
    pin_degraded: Arc<AtomicBool>,
}

impl WorkerPool {
    pub fn new(num_threads: usize, topo: &NodeTopology, pin: PinMode) -> Self {
        let threads = num_threads.max(1);
        let degraded = Arc::new(AtomicBool::new(false));
        // Node binding on a single-node host cannot restrict anything; run
        // unpinned and say so.
        let pin = if pin == PinMode::Node && topo.num_nodes == 1 {
            degraded.store(true, Ordering::Relaxed);
            PinMode::Off
        } else {
            pin
        };
        let mut senders = Vec::with_capacity(threads);
        let mut handles = Vec::with_capacity(threads);
        for t in 0..threads {
            let (tx, rx) = channel::<Job>();
            senders.push(tx);
            let cpus = pin_cpus_for(t, threads, topo, &pin);
            let degraded = Arc::clone(&degraded);
            let handle = std::thread::Builder::new()
                .name(format!("qsimd-worker-{t}"))
                .spawn(move || {
                    if let Some(cpus) = cpus {
                        if !pin_current_thread(&cpus) {
                            degraded.store(true, Ordering::Relaxed);
                        }
                    }
                    while let Ok(job) = rx.recv() {
                        // SAFETY: see RawKernel.
                        let kernel = unsafe { &*job.kernel.0 };
                        let tasks = job.tasks.clone();
                        // A panicking kernel must still signal, or the
                        // caller would wait forever.
                        let outcome = std::panic::catch_unwind(
                            std::panic::AssertUnwindSafe(|| kernel(tasks)),
                        );
                        if outcome.is_err() {
                            job.done.panicked.store(true, Ordering::Relaxed);
                        }
                        job.done.signal();
                    }
                })
                .expect("spawn worker thread");
            handles.push(handle);
        }
        WorkerPool {
            senders,
            handles,
            num_threads: threads,
            pin_degraded: degraded,
        }
    }

    pub fn num_threads(&self) -> usize {
        self.num_threads
    }

    /// True when any worker could not be pinned and runs unpinned instead.
    pub fn pin_degraded(&self) -> bool {
        self.pin_degraded.load(Ordering::Relaxed)
    }

    /// Execute `kernel` over the plan's subranges; returns after every
    /// worker has finished (barrier semantics).
    pub fn run_parallel(&self, plan: &ThreadPlan, kernel: KernelFn<'_>) {
        assert_eq!(
            plan.num_threads, self.num_threads,
            "plan was built for a different thread count"
        );
        let active = plan
            .assignments
            .iter()
            .filter(|a| !a.tasks.is_empty())
            .count();
        if active == 0 {
            return;
        }
        let done = Arc::new(Completion {
            remaining: Mutex::new(active),
            all_done: Condvar::new(),
            panicked: AtomicBool::new(false),
        });
        // SAFETY: the reference stays valid until wait() returns.
        let raw: *const (dyn Fn(Range<usize>) + Sync) =
            unsafe { std::mem::transmute(kernel as *const (dyn Fn(Range<usize>) + Sync)) };
        for (t, assignment) in plan.assignments.iter().enumerate() {
            if assignment.tasks.is_empty() {
                continue;
            }
            self.senders[t]
                .send(Job {
                    kernel: RawKernel(raw),
                    tasks: assignment.tasks.clone(),
                    done: Arc::clone(&done),
                })
                .expect("worker alive");
        }
        done.wait();
    }
}

impl Drop for WorkerPool {
    fn drop(&mut self) {
        self.senders.clear();
        for handle in self.handles.drain(..) {
            let _ = handle.join();
        }
    }
}

fn pin_cpus_for(
    thread: usize,
    num_threads: usize,
    topo: &NodeTopology,
    pin: &PinMode,
) -> Option<Vec<usize>> {
    match pin {
        PinMode::Off => None,
        PinMode::Node => {
            let node = node_for_thread(thread, num_threads, topo.num_nodes);
            let cpus = topo.cores.get(node)?.clone();
            if cpus.is_empty() {
                None
            } else {
                Some(cpus)
            }
        }
        PinMode::CoreList(cores) => {
            if cores.is_empty() {
                None
            } else {
                Some(vec![cores[thread % cores.len()]])
            }
        }
    }
}

#[cfg(target_os = "linux")]
fn pin_current_thread(cpus: &[usize]) -> bool {
    // SAFETY: cpu_set_t is plain data; sched_setaffinity only reads the set.
    unsafe {
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        libc::CPU_ZERO(&mut set);
        let mut any = false;
        for &c in cpus {
            if c < libc::CPU_SETSIZE as usize {
                libc::CPU_SET(c, &mut set);
                any = true;
            }
        }
        if !any {
            return false;
        }
        libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set) == 0
    }
}

#[cfg(not(target_os = "linux"))]
fn pin_current_thread(_cpus: &[usize]) -> bool {
    false
}

/// Runs kernels either inline or on a pinned worker pool. Created once and
/// reused across gates.
pub struct Executor {
    pool: Option<WorkerPool>,
    topo: NodeTopology,
}

impl Executor {
    /// Single-threaded execution on the calling thread.
    pub fn serial() -> Self {
        Executor {
            pool: None,
            topo: detect_topology(),
        }
    }

    /// Pool of `num_threads` workers pinned per `pin`.
    pub fn new(num_threads: usize, topo: NodeTopology, pin: PinMode) -> Self {
        if num_threads <= 1 && pin == PinMode::Off {
            return Executor { pool: None, topo };
        }
        Executor {
            pool: Some(WorkerPool::new(num_threads, &topo, pin)),
            topo,
        }
    }

    pub fn num_threads(&self) -> usize {
        self.pool.as_ref().map_or(1, WorkerPool::num_threads)
    }

    pub fn pin_degraded(&self) -> bool {
        self.pool.as_ref().is_some_and(WorkerPool::pin_degraded)
    }

    pub fn topology(&self) -> &NodeTopology {
        &self.topo
    }

    /// Partition `num_tasks` for the gate's `target` and run `kernel` over
    /// the pieces; returns when all pieces completed.
    pub(crate) fn run_tasks(&self, num_tasks: usize, target: usize, kernel: KernelFn<'_>) {
        match &self.pool {
            None => kernel(0..num_tasks),
            Some(pool) => {
                let plan = make_plan(pool.num_threads(), &self.topo, num_tasks, target);
                pool.run_parallel(&plan, kernel);
            }
        }
    }
}
