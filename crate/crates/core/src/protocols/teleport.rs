use crate::error::{Error, Result};
use crate::ops::{pauli, PauliIndex};
use crate::runtime::{Basis, LoccRuntime, Outcome};

/// Teleports the state of `src` onto `dst` through a distributed Bell pair
/// that ends at `dst`.
///
/// The sender Bell-measures `src` with its half of the pair and sends the
/// 2-bit result; the receiver undoes the resulting `σ^μ†` with `σ^μ`.
/// `src` and the sender's pair half are left in the measured Bell state.
pub fn teleport_state(rt: &mut LoccRuntime, src: &str, dst: &str) -> Result<Outcome> {
    let sender = rt.owner(src)?;
    let receiver = rt.owner(dst)?;
    if sender == receiver {
        return Err(Error::Precondition(format!(
            "`{src}` and `{dst}` are both held by {sender}"
        )));
    }
    let partner = rt.claim_bell_pair(dst)?;
    if rt.owner(partner.as_str())? != sender {
        return Err(Error::MissingBellPair(dst.to_owned()));
    }

    let outcome = rt.measure_local(sender, &[src, partner.as_str()], Basis::Bell)?;
    rt.send_outcome(sender, receiver, &outcome)?;

    let message = rt
        .receive(receiver)
        .ok_or_else(|| Error::Precondition("classical message lost".into()))?;
    let correction = PauliIndex::new(message.value as usize)?;
    rt.apply_local(receiver, &pauli(correction), &[dst])?;
    Ok(outcome)
}
