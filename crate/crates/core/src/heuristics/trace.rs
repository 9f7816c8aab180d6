use serde::Serialize;

/// One sampled iteration of a heuristic run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iteration: u64,
    pub incumbent: Option<usize>,
    pub pheromones: Option<Vec<f64>>,
    pub winner: usize,
    pub sampled: (usize, usize),
}

/// Strided per-iteration history of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunTrace {
    stride: u64,
    records: Vec<TraceRecord>,
}

impl RunTrace {
    /// A stride of 0 disables recording.
    pub fn new(stride: u64) -> Self {
        Self {
            stride,
            records: Vec::new(),
        }
    }

    pub fn disabled() -> Self {
        Self::new(0)
    }

    pub fn stride(&self) -> u64 {
        self.stride
    }

    pub fn wants(&self, iteration: u64) -> bool {
        self.stride > 0 && iteration % self.stride == 0
    }

    pub fn push(&mut self, record: TraceRecord) {
        debug_assert!(self.records.last().is_none_or(|r| r.iteration < record.iteration));
        self.records.push(record);
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }
}
