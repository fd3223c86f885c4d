use crate::{Error, Result, RngStream, State};

/// Successes among `draws` draws without replacement from `population`
/// items of which `successes` are marked.
pub fn hypergeometric(
    population: u64,
    successes: u64,
    draws: u64,
    rng: &mut RngStream,
) -> Result<u64> {
    if successes > population || draws > population {
        return Err(Error::InvalidParameter(format!(
            "hypergeometric({population}, {successes}, {draws}) out of range"
        )));
    }
    Ok(hypergeometric_unchecked(population, successes, draws, rng))
}

#[inline]
pub(crate) fn hypergeometric_unchecked(
    population: u64,
    successes: u64,
    draws: u64,
    rng: &mut RngStream,
) -> u64 {
    if draws == 0 || successes == 0 {
        return 0;
    }
    if successes == population {
        return draws;
    }
    if draws == population {
        return successes;
    }
    if draws == 1 {
        return u64::from(rng.bernoulli_ratio(successes, population));
    }
    if successes == 1 {
        return u64::from(rng.bernoulli_ratio(draws, population));
    }
    let failures = population - successes;
    let marked = successes.min(failures);
    let k = draws.min(population - draws);
    let mean = k as f64 * marked as f64 / population as f64;
    let mut x = if mean < INVERSION_MAX_MEAN {
        inversion(population, marked, k, rng)
    } else {
        hrua(population, marked, k, rng)
    };
    if successes > failures {
        x = k - x;
    }
    if k < draws {
        x = successes - x;
    }
    x
}

const INVERSION_MAX_MEAN: f64 = 10.0;

#[inline]
fn ln_factorial(x: u64) -> f64 {
    libm::lgamma(x as f64 + 1.0)
}

/// Sequential search from zero; requires `marked, k ≤ population / 2`.
fn inversion(population: u64, marked: u64, k: u64, rng: &mut RngStream) -> u64 {
    let rest = population - marked;
    let mut p = (ln_factorial(rest) - ln_factorial(rest - k) - ln_factorial(population)
        + ln_factorial(population - k))
    .exp();
    let top = marked.min(k);
    let mut u = rng.uniform();
    let mut x = 0;
    while u > p && x < top {
        u -= p;
        p *= ((marked - x) * (k - x)) as f64 / ((x + 1) * (rest - k + x + 1)) as f64;
        x += 1;
    }
    x
}

/// Stadlober's ratio-of-uniforms sampler (HRUA) with a table-mountain hat.
fn hrua(population: u64, marked: u64, k: u64, rng: &mut RngStream) -> u64 {
    const D1: f64 = 1.715_527_769_921_413_5;
    const D2: f64 = 0.898_916_162_058_898_8;
    let n = population as f64;
    let rest = population - marked;
    let p = marked as f64 / n;
    let q = rest as f64 / n;
    let a = k as f64 * p + 0.5;
    let var = (n - k as f64) * k as f64 * p * q / (n - 1.0);
    let c = (var + 0.5).sqrt();
    let h = D1 * c + D2;
    let mode = ((k + 1) as f64 * (marked + 1) as f64 / (n + 2.0)).floor() as u64;
    let lf = |x: u64| {
        ln_factorial(x)
            + ln_factorial(marked - x)
            + ln_factorial(k - x)
            + ln_factorial(rest - k + x)
    };
    let g = lf(mode);
    let b = ((marked.min(k) + 1) as f64).min((a + 16.0 * c).floor());
    loop {
        let u = rng.uniform_open_closed();
        let v = rng.uniform();
        let x = a + h * (v - 0.5) / u;
        if !(0.0..b).contains(&x) {
            continue;
        }
        let cand = x as u64;
        let t = g - lf(cand);
        if u * (4.0 - u) - 3.0 <= t {
            return cand;
        }
        if u * (u - t) >= 1.0 {
            continue;
        }
        if 2.0 * u.ln() <= t {
            return cand;
        }
    }
}

/// Multivariate hypergeometric draw visiting categories in `order` and
/// stopping as soon as all draws are assigned.
pub fn multivariate_hypergeometric(
    counts: &[u64],
    draws: u64,
    order: &[State],
    rng: &mut RngStream,
) -> Result<Vec<u64>> {
    let mut out = vec![0; counts.len()];
    multivariate_hypergeometric_into(counts, draws, order, &mut out, rng)?;
    Ok(out)
}

/// As [`multivariate_hypergeometric`], writing into `out` (zeroed first).
pub fn multivariate_hypergeometric_into(
    counts: &[u64],
    draws: u64,
    order: &[State],
    out: &mut [u64],
    rng: &mut RngStream,
) -> Result<()> {
    let total: u64 = counts.iter().sum();
    if draws > total {
        return Err(Error::InvalidParameter(format!(
            "cannot draw {draws} from a population of {total}"
        )));
    }
    if order.len() != counts.len() || out.len() != counts.len() {
        return Err(Error::StateCountMismatch {
            expected: counts.len(),
            actual: order.len().min(out.len()),
        });
    }
    out.fill(0);
    let mut pool = total;
    let mut left = draws;
    for &s in order {
        if left == 0 {
            break;
        }
        let c = counts[s];
        let x = hypergeometric_unchecked(pool, c, left, rng);
        out[s] = x;
        left -= x;
        pool -= c;
    }
    Ok(())
}
