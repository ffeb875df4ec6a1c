//! Event loop for the preemptive line network.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::path::{segment, AgePath, Breakpoint};
use super::rng::SimRng;
use super::{SimConfig, SimSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EventKind {
    Arrival,
    /// Completion at a 0-based node, valid only if `epoch` still matches.
    Completion { node: usize, epoch: u64 },
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    // Reversed so the max-heap pops the earliest event; ties go to the
    // event inserted first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

#[derive(Debug, Clone, Default)]
struct Server {
    /// Generation timestamp of the update in service.
    serving: Option<f64>,
    epoch: u64,
    arrivals: u64,
    delivered: u64,
    preempted: u64,
}

/// What to keep beyond the breakpoints and counters.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Recording {
    pub running_average: bool,
    pub occupancy: bool,
}

pub(crate) struct Outcome {
    pub paths: Vec<AgePath>,
    pub summary: SimSummary,
    /// Time fraction per occupancy state, `q = Σ busy_i 2^i`.
    pub occupancy: Option<Vec<f64>>,
}

struct Engine<'a> {
    config: &'a SimConfig,
    rng: SimRng,
    heap: BinaryHeap<Event>,
    seq: u64,
    servers: Vec<Server>,
    paths: Vec<AgePath>,
    /// Running integral of each node's age up to its last breakpoint.
    integrals: Vec<f64>,
    recording: Recording,
    /// `(time, state)` whenever the occupancy state changes.
    occupancy_log: Vec<(f64, usize)>,
    now: f64,
}

impl<'a> Engine<'a> {
    fn new(config: &'a SimConfig, stream: u64, recording: Recording) -> Self {
        let n = config.network.nodes();
        Self {
            config,
            rng: SimRng::new(config.seed, stream),
            heap: BinaryHeap::new(),
            seq: 0,
            servers: vec![Server::default(); n],
            paths: (1..=n).map(AgePath::new).collect(),
            integrals: vec![0.0; n],
            recording,
            occupancy_log: vec![(0.0, 0)],
            now: 0.0,
        }
    }

    fn schedule(&mut self, time: f64, kind: EventKind) {
        self.heap.push(Event {
            time,
            seq: self.seq,
            kind,
        });
        self.seq += 1;
    }

    fn occupancy_state(&self) -> usize {
        self.servers
            .iter()
            .enumerate()
            .filter(|(_, s)| s.serving.is_some())
            .map(|(i, _)| 1 << i)
            .sum()
    }

    /// Puts an update stamped `timestamp` into service at `node`,
    /// preempting whatever is there.
    fn enter(&mut self, node: usize, timestamp: f64) {
        let rate = self.config.network.mu[node];
        let service = self.rng.exponential(rate);
        let server = &mut self.servers[node];
        server.arrivals += 1;
        if server.serving.is_some() {
            server.preempted += 1;
        }
        server.serving = Some(timestamp);
        server.epoch += 1;
        let epoch = server.epoch;
        self.schedule(self.now + service, EventKind::Completion { node, epoch });
    }

    fn complete(&mut self, node: usize) {
        let server = &mut self.servers[node];
        let timestamp = server
            .serving
            .take()
            .expect("valid completion implies an update in service");
        server.delivered += 1;

        let path = &mut self.paths[node];
        let (last_time, last_age) = path
            .breakpoints
            .last()
            .map_or((0.0, 0.0), |b| (b.time, b.age_after));
        let age_before = last_age + (self.now - last_time);
        let age_after = self.now - timestamp;
        self.integrals[node] += segment(last_age, self.now - last_time);
        path.breakpoints.push(Breakpoint {
            time: self.now,
            age_before,
            age_after,
        });
        if self.recording.running_average && self.now > 0.0 {
            path.running_average
                .push((self.now, self.integrals[node] / self.now));
        }

        if node + 1 < self.servers.len() {
            self.enter(node + 1, timestamp);
        }
    }

    fn run(mut self) -> Outcome {
        let lambda = self.config.network.lambda;
        let mut generated = 0u64;
        let first = self.rng.exponential(lambda);
        self.schedule(first, EventKind::Arrival);

        while let Some(ev) = self.heap.pop() {
            match ev.kind {
                EventKind::Arrival => {
                    self.now = ev.time;
                    generated += 1;
                    self.enter(0, self.now);
                    if generated < self.config.arrivals {
                        let gap = self.rng.exponential(lambda);
                        self.schedule(self.now + gap, EventKind::Arrival);
                    }
                }
                EventKind::Completion { node, epoch } => {
                    // Stale: the update was preempted after this was scheduled.
                    if self.servers[node].epoch != epoch || self.servers[node].serving.is_none() {
                        continue;
                    }
                    self.now = ev.time;
                    self.complete(node);
                }
            }
            if self.recording.occupancy {
                let q = self.occupancy_state();
                if self.occupancy_log.last().map(|e| e.1) != Some(q) {
                    self.occupancy_log.push((self.now, q));
                }
            }
        }
        self.finish()
    }

    fn finish(mut self) -> Outcome {
        let horizon = self.now;
        let burn_in_start = self.config.burn_in * horizon;

        for (node, path) in self.paths.iter_mut().enumerate() {
            path.end = horizon;
            if self.recording.running_average && horizon > 0.0 {
                let (t, age) = path
                    .breakpoints
                    .last()
                    .map_or((0.0, 0.0), |b| (b.time, b.age_after));
                let total = self.integrals[node] + segment(age, horizon - t);
                if path.running_average.last().map(|r| r.0) != Some(horizon) {
                    path.running_average.push((horizon, total / horizon));
                }
            }
            if let Some(step) = self.config.sample_interval {
                let mut k = 0u64;
                loop {
                    let t = k as f64 * step;
                    if t > horizon {
                        break;
                    }
                    path.samples.push((t, path.age_at(t)));
                    k += 1;
                }
            }
        }

        let occupancy = self
            .recording
            .occupancy
            .then(|| occupancy_fractions(&self.occupancy_log, self.servers.len(), burn_in_start, horizon));

        let summary = SimSummary {
            per_node_time_avg_age: self
                .paths
                .iter()
                .map(|p| p.time_average(burn_in_start))
                .collect(),
            arrivals_in: self.servers.iter().map(|s| s.arrivals).collect(),
            delivered: self.servers.iter().map(|s| s.delivered).collect(),
            preempted: self.servers.iter().map(|s| s.preempted).collect(),
            in_service: self
                .servers
                .iter()
                .map(|s| u64::from(s.serving.is_some()))
                .collect(),
            horizon,
            burn_in_start,
        };
        Outcome {
            paths: self.paths,
            summary,
            occupancy,
        }
    }
}

/// Fraction of `[from, to]` spent in each occupancy state.
fn occupancy_fractions(log: &[(f64, usize)], nodes: usize, from: f64, to: f64) -> Vec<f64> {
    let mut time = vec![0.0; 1 << nodes];
    let span = to - from;
    if span <= 0.0 {
        return time;
    }
    for (i, &(start, state)) in log.iter().enumerate() {
        let end = log.get(i + 1).map_or(to, |e| e.0);
        let overlap = end.min(to) - start.max(from);
        if overlap > 0.0 {
            time[state] += overlap;
        }
    }
    time.iter_mut().for_each(|t| *t /= span);
    time
}

pub(crate) fn simulate(config: &SimConfig, stream: u64, recording: Recording) -> Outcome {
    Engine::new(config, stream, recording).run()
}
