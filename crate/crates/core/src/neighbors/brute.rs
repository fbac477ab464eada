use super::{into_list, squared_distance, Candidate, NeighborList};
use crate::data::LabeledDataset;
use crate::error::{Error, Result};

/// Full scan plus partial sort. Reference implementation for [`super::NeighborIndex`].
pub fn brute_knn(ds: &LabeledDataset, q: &[f64], k: usize) -> Result<NeighborList> {
    check_query(ds.dim(), ds.len(), q, k)?;
    let mut cands: Vec<Candidate> = ds
        .points()
        .enumerate()
        .map(|(index, p)| Candidate { dist2: squared_distance(q, p), index })
        .collect();
    if k + 1 < cands.len() {
        cands.select_nth_unstable(k);
        cands.truncate(k + 1);
    }
    Ok(into_list(cands, k))
}

pub(crate) fn check_query(dim: usize, n: usize, q: &[f64], k: usize) -> Result<()> {
    if q.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: q.len() });
    }
    if let Some(i) = q.iter().position(|c| !c.is_finite()) {
        return Err(Error::NonFiniteValue(format!("query coordinate {i}")));
    }
    if k + 1 > n {
        return Err(Error::KTooLarge { k, n });
    }
    Ok(())
}
