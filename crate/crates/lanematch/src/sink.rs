//! Match sinks shared by the engines.

/// Where complete matches go: a counter, or a counter plus the full
/// per-position vertex assignments for listing mode.
#[derive(Debug)]
pub enum Sink {
    Count(u64),
    Collect(Vec<Vec<u32>>),
}

impl Sink {
    pub fn count() -> Self {
        Sink::Count(0)
    }

    pub fn collect() -> Self {
        Sink::Collect(Vec::new())
    }

    #[inline]
    pub fn emit(&mut self, mapped: &[u32]) {
        match self {
            Sink::Count(c) => *c += 1,
            Sink::Collect(v) => v.push(mapped.to_vec()),
        }
    }

    pub fn total(&self) -> u64 {
        match self {
            Sink::Count(c) => *c,
            Sink::Collect(v) => v.len() as u64,
        }
    }

    pub fn matches(&self) -> Option<&[Vec<u32>]> {
        match self {
            Sink::Count(_) => None,
            Sink::Collect(v) => Some(v),
        }
    }
}
