use crate::{Error, Result, RngStream};

/// How the agent sequence behind a run is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CollLaw {
    /// Every draw is uniform over all `n` agents.
    WithReplacement,
    /// Draws come in ordered pairs of distinct agents: draws at even
    /// positions are uniform over `n`, odd positions over the `n − 1` agents
    /// other than the preceding draw. The run starts at an even position.
    OrderedPairs,
}

/// Parameters of the collision-free run-length law `Coll(n, r)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CollParams {
    n: u64,
    r: u64,
    law: CollLaw,
}

impl CollParams {
    pub fn new(n: u64, r: u64) -> Result<Self> {
        Self::with_law(n, r, CollLaw::WithReplacement)
    }

    pub fn ordered_pairs(n: u64, r: u64) -> Result<Self> {
        Self::with_law(n, r, CollLaw::OrderedPairs)
    }

    pub fn with_law(n: u64, r: u64, law: CollLaw) -> Result<Self> {
        let min_n = match law {
            CollLaw::WithReplacement => 1,
            CollLaw::OrderedPairs => 2,
        };
        if n < min_n || r > n {
            return Err(Error::InvalidParameter(format!(
                "run-length law needs n >= {min_n} and r <= n, got n={n} r={r}"
            )));
        }
        Ok(CollParams { n, r, law })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn law(&self) -> CollLaw {
        self.law
    }

    /// Largest value in the support.
    pub fn max_len(&self) -> u64 {
        self.n - self.r
    }

    /// `P[ℓ = k | ℓ ≥ k]`: the draw at position `k` collides.
    fn hazard(&self, k: u64) -> f64 {
        let seen = self.r + k;
        match self.law {
            CollLaw::OrderedPairs if k % 2 == 1 => (seen - 1) as f64 / (self.n - 1) as f64,
            _ => seen as f64 / self.n as f64,
        }
    }
}

const STIRLING_MIN: f64 = 50.0;

#[inline]
fn stirling_tail(y: f64) -> f64 {
    let y2 = y * y;
    (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / (1260.0 * y2)) / y2) / y
}

/// `ln P[ℓ > t]`; `0` for `t < 0` and `-∞` for `t ≥ n − r`.
pub fn run_length_ln_sf(params: &CollParams, t: i64) -> f64 {
    if t < 0 {
        return 0.0;
    }
    let t = t as u64;
    let m = params.max_len();
    if t >= m {
        return f64::NEG_INFINITY;
    }
    let n = params.n as f64;
    let a = (m + 1) as f64;
    let b = (m - t) as f64;
    let steps = (t + 1) as f64;
    let with_replacement = if b >= STIRLING_MIN {
        // ln Γ(a) − ln Γ(b) − (t+1)·ln n with the ln n parts cancelled.
        (a - 0.5) * ((1.0 - params.r as f64) / n).ln_1p()
            - (b - 0.5) * (-((params.r + t) as f64) / n).ln_1p()
            - steps
            + stirling_tail(a)
            - stirling_tail(b)
    } else {
        libm::lgamma(a) - libm::lgamma(b) - steps * n.ln()
    };
    match params.law {
        CollLaw::WithReplacement => with_replacement,
        CollLaw::OrderedPairs => {
            let odd = t.div_ceil(2);
            with_replacement - odd as f64 * (-1.0 / n).ln_1p()
        }
    }
}

/// `P[ℓ > t]`.
pub fn run_length_sf(params: &CollParams, t: i64) -> f64 {
    run_length_ln_sf(params, t).exp()
}

/// `P[ℓ = k]`, where `ℓ` counts collision-free draws before the first
/// colliding one. Mass at `k = 0` is `r / n`.
pub fn run_length_pmf(params: &CollParams, k: u64) -> f64 {
    if k > params.max_len() {
        return 0.0;
    }
    run_length_sf(params, k as i64 - 1) * params.hazard(k)
}

const CHOP_DOWN_MAX: u64 = 32;

/// Draws `ℓ` by inverting the survival function.
pub fn sample_run_length(params: &CollParams, rng: &mut RngStream) -> u64 {
    let m = params.max_len();
    if m == 0 {
        return 0;
    }
    let v = rng.uniform_open_closed();
    if m <= CHOP_DOWN_MAX {
        return chop_down(params, v);
    }
    let ln_v = v.ln();
    invert(params, ln_v)
}

fn chop_down(params: &CollParams, v: f64) -> u64 {
    let mut sf = 1.0;
    for k in 0..params.max_len() {
        sf *= 1.0 - params.hazard(k);
        if sf <= v {
            return k;
        }
    }
    params.max_len()
}

/// Smallest `t ≥ 0` with `ln P[ℓ > t] ≤ ln_v`.
fn invert(params: &CollParams, ln_v: f64) -> u64 {
    let m = params.max_len();
    let f = |t: u64| run_length_ln_sf(params, t as i64);

    let mut f_lo = f(0);
    if f_lo <= ln_v {
        return 0;
    }
    let mut lo = 0u64;

    // Each factor is at most 1 − (r + j − 1)/n, so with s = t + 1 the bound
    // ln P[ℓ > t] ≤ −s·(r − 1 + (s − 1)/2)/n gives a starting bracket.
    let n = params.n as f64;
    let c = params.r as f64 - 1.5;
    let s = -c + (c * c - 2.0 * ln_v * n).sqrt();
    let mut hi = if s.is_finite() && s >= 2.0 {
        (s.ceil() as u64 - 1).min(m)
    } else {
        1
    };
    let mut f_hi = f(hi);
    while f_hi > ln_v {
        lo = hi;
        f_lo = f_hi;
        hi = (hi * 2).min(m);
        f_hi = f(hi);
    }

    let mut bisect = false;
    while hi - lo > 1 {
        let mid = if bisect || !f_hi.is_finite() {
            lo + (hi - lo) / 2
        } else {
            let frac = (f_lo - ln_v) / (f_lo - f_hi);
            let x = lo as f64 + frac * (hi - lo) as f64;
            (x.round() as u64).clamp(lo + 1, hi - 1)
        };
        bisect = !bisect;
        let fm = f(mid);
        if fm <= ln_v {
            hi = mid;
            f_hi = fm;
        } else {
            lo = mid;
            f_lo = fm;
        }
    }
    hi
}
