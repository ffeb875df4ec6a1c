use serde::Serialize;

/// A downward jump of a node's age process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Breakpoint {
    pub time: f64,
    pub age_before: f64,
    pub age_after: f64,
}

impl Breakpoint {
    /// Generation time of the update that caused the jump.
    pub fn timestamp(&self) -> f64 {
        self.time - self.age_after
    }
}

/// Sample path of the age at the output of one node.
///
/// The path starts at age 0 at time 0 and grows at unit slope except at
/// the recorded breakpoints. It ends at `end`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgePath {
    /// 1-based node index; node `n` feeds the monitor.
    pub node: usize,
    pub breakpoints: Vec<Breakpoint>,
    /// `(t, (1/t) ∫_0^t age)` at every breakpoint and at `end`.
    pub running_average: Vec<(f64, f64)>,
    /// `(t, age(t))` on the optional fixed sampling grid.
    pub samples: Vec<(f64, f64)>,
    pub end: f64,
}

impl AgePath {
    pub(crate) fn new(node: usize) -> Self {
        Self {
            node,
            breakpoints: Vec::new(),
            running_average: Vec::new(),
            samples: Vec::new(),
            end: 0.0,
        }
    }

    /// Index of the last breakpoint at or before `t`.
    fn last_at_or_before(&self, t: f64) -> Option<usize> {
        self.breakpoints
            .partition_point(|b| b.time <= t)
            .checked_sub(1)
    }

    /// Age just after time `t` (right-continuous).
    pub fn age_at(&self, t: f64) -> f64 {
        match self.last_at_or_before(t) {
            Some(i) => {
                let b = &self.breakpoints[i];
                b.age_after + (t - b.time)
            }
            None => t,
        }
    }

    /// Exact `∫_from^to age(τ) dτ` over the piecewise-linear path.
    pub fn integral(&self, from: f64, to: f64) -> f64 {
        if to <= from {
            return 0.0;
        }
        let mut total = 0.0;
        let mut t = from;
        let mut age = self.age_at(from);
        let start = self.last_at_or_before(from).map_or(0, |i| i + 1);
        for b in &self.breakpoints[start..] {
            if b.time >= to {
                break;
            }
            total += segment(age, b.time - t);
            t = b.time;
            age = b.age_after;
        }
        total + segment(age, to - t)
    }

    /// Time average of the age over `[from, end]`.
    pub fn time_average(&self, from: f64) -> f64 {
        let span = self.end - from;
        if span > 0.0 {
            self.integral(from, self.end) / span
        } else {
            f64::NAN
        }
    }
}

/// Area under a unit-slope segment starting at height `age` of length `len`.
#[inline]
pub(crate) fn segment(age: f64, len: f64) -> f64 {
    len * (age + 0.5 * len)
}
