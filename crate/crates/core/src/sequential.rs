//! Step-by-step simulation: draw two distinct agents, apply the transition,
//! put both back.

use crate::protocol::Protocol;
use crate::urn::Urn;
use crate::{Error, Result, RngStream};

/// Runs exactly `interactions` interactions on `urn`.
///
/// `sink(t, counts)` is called at `t = 0`, at every multiple of
/// `snapshot_every` and at `t = interactions`.
pub fn run_sequential<U, P>(
    urn: &mut U,
    protocol: &P,
    interactions: u64,
    snapshot_every: u64,
    rng: &mut RngStream,
    sink: &mut dyn FnMut(u64, &[u64]),
) -> Result<()>
where
    U: Urn + ?Sized,
    P: Protocol + ?Sized,
{
    if snapshot_every == 0 {
        return Err(Error::InvalidParameter(
            "snapshot interval must be positive".into(),
        ));
    }
    if urn.num_states() != protocol.num_states() {
        return Err(Error::StateCountMismatch {
            expected: protocol.num_states(),
            actual: urn.num_states(),
        });
    }
    if interactions > 0 && urn.total() < 2 {
        return Err(Error::InvalidParameter(
            "interactions need at least two agents".into(),
        ));
    }
    sink(0, urn.configuration().counts());
    let mut t = 0;
    while t < interactions {
        let stop = (t / snapshot_every + 1)
            .saturating_mul(snapshot_every)
            .min(interactions);
        while t < stop {
            let a = urn.sample_without_replacement(rng)?;
            let b = urn.sample_without_replacement(rng)?;
            let (x, y) = protocol.apply(a, b, rng);
            urn.add(x, 1);
            urn.add(y, 1);
            t += 1;
        }
        sink(t, urn.configuration().counts());
    }
    Ok(())
}
