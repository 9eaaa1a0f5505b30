use crate::RetrievalError;

/// Picks one winner from each presented batch. Implementations range from
/// scripted test selectors to VLM-backed agents.
pub trait Selector {
    fn pick(&mut self, batch: &[String]) -> Result<String, String>;
}

impl<F> Selector for F
where
    F: FnMut(&[String]) -> Result<String, String>,
{
    fn pick(&mut self, batch: &[String]) -> Result<String, String> {
        self(batch)
    }
}

/// Divide-and-conquer tournament: repeatedly partitions the surviving list
/// into batches of `batch` in stable order and keeps each batch's selector
/// winner until one candidate remains.
///
/// Only full batches consult the selector; a short remainder carries over to
/// the next round unasked (a final round of ≤ `batch` survivors is asked as
/// one batch). Every call therefore eliminates exactly `batch − 1` candidates
/// except possibly the last, so the selector is consulted exactly
/// `⌈(n−1)/(batch−1)⌉` times.
pub fn tournament_select(
    candidates: &[String],
    batch: usize,
    selector: &mut dyn Selector,
) -> Result<String, RetrievalError> {
    if candidates.is_empty() {
        return Err(RetrievalError::NoCandidates);
    }
    if batch < 2 {
        return Err(RetrievalError::BatchTooSmall(batch));
    }

    let mut survivors: Vec<String> = candidates.to_vec();
    while survivors.len() > 1 {
        let mut next = Vec::with_capacity(survivors.len() / batch + batch);
        let mut chunks = survivors.chunks_exact(batch);
        for chunk in &mut chunks {
            next.push(ask(selector, chunk)?);
        }
        let remainder = chunks.remainder();
        if next.is_empty() {
            // Everything fits in one (possibly short) final batch.
            next.push(ask(selector, remainder)?);
        } else {
            next.extend(remainder.iter().cloned());
        }
        survivors = next;
    }
    Ok(survivors.pop().expect("non-empty by construction"))
}

fn ask(selector: &mut dyn Selector, batch: &[String]) -> Result<String, RetrievalError> {
    let winner = selector.pick(batch).map_err(RetrievalError::SelectorFailed)?;
    if !batch.contains(&winner) {
        return Err(RetrievalError::ForeignSelection { returned: winner });
    }
    Ok(winner)
}
