use serde::{Deserialize, Serialize};

use crate::dense;
use crate::operators::{IndexRange, OperatorSpec};
use crate::symbol::FourierSequence;
use crate::{invalid, Result};

/// Singular-value statistics of one `n × n` Hankel section.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HankelProbeRow {
    pub n: usize,
    /// Number of singular values strictly above the threshold.
    pub count: usize,
    /// Largest singular value.
    pub norm: f64,
}

/// For each size, the number of singular values of `H_n(ψ)` above `threshold`. Counts
/// that stay bounded as `n` grows indicate compact behavior; growing counts do not.
pub fn hartman_probe(psi: &FourierSequence, sizes: &[usize], threshold: f64) -> Result<Vec<usize>> {
    Ok(hartman_profile(psi, sizes, threshold)?.into_iter().map(|r| r.count).collect())
}

/// [`hartman_probe`] together with the section norms.
pub fn hartman_profile(psi: &FourierSequence, sizes: &[usize], threshold: f64) -> Result<Vec<HankelProbeRow>> {
    if sizes.is_empty() || sizes.contains(&0) {
        return invalid("sizes must be nonempty and positive");
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("sizes must be strictly increasing");
    }
    let h = OperatorSpec::Hankel(psi.clone());
    sizes
        .iter()
        .map(|&n| {
            let w = IndexRange::first(n);
            let s = h.section(w, w)?;
            let sv = dense::singular_values(s.entries(), n, n)?;
            Ok(HankelProbeRow {
                n,
                count: sv.iter().filter(|&&v| v > threshold).count(),
                norm: sv.first().copied().unwrap_or(0.0),
            })
        })
        .collect()
}
