/// Hill-climbing epoch-length tuner.
///
/// Measures throughput at the center `T`, then at `1.1·T` and `0.9·T`; the
/// best of the three becomes the new center, ties keeping the old one.
#[derive(Clone, Debug)]
pub struct EpochController {
    center: f64,
    phase: usize,
    measured: [f64; 3],
}

const FACTORS: [f64; 3] = [1.0, 1.1, 0.9];

impl EpochController {
    pub fn new(start: f64) -> Self {
        EpochController {
            center: start.max(1.0),
            phase: 0,
            measured: [0.0; 3],
        }
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    /// Epoch length to try next.
    pub fn target(&self) -> u64 {
        (self.center * FACTORS[self.phase]).round().max(1.0) as u64
    }

    /// Records the throughput observed at [`target`](Self::target).
    pub fn record(&mut self, throughput: f64) {
        self.measured[self.phase] = throughput;
        self.phase += 1;
        if self.phase == FACTORS.len() {
            self.phase = 0;
            let mut best = 0;
            for i in 1..FACTORS.len() {
                if self.measured[i] > self.measured[best] {
                    best = i;
                }
            }
            self.center = (self.center * FACTORS[best]).max(1.0);
        }
    }
}
