use serde::{Deserialize, Serialize};

use crate::complexity::CutStructure;
use crate::error::{Error, Result};
use crate::generators::{
    chain_family_graph, chain_family_size, enumerate_chain_labelings, grid_graph, ChainFamilySpec,
    MAX_ENUMERATION,
};
use crate::labeling::{Label, Labeling};

/// Labelings of the `r × r` grid with the bottom-left vertex `+1`, the
/// top-right vertex `-1`, exactly two homogeneous components and at most
/// `max_cut` cut edges. Every labeling is checked with the analyzer.
pub fn count_grid_cuts(r: usize, max_cut: usize) -> Result<u64> {
    if !(2..=4).contains(&r) {
        return Err(Error::InvalidParameter(format!(
            "grid side {r} must lie in [2, 4] for exhaustive enumeration"
        )));
    }
    let g = grid_graph(r, r);
    let n = r * r;
    let bottom_left = (r - 1) * r;
    let top_right = r - 1;
    let free: Vec<usize> = (0..n)
        .filter(|&v| v != bottom_left && v != top_right)
        .collect();
    let mut count = 0;
    for mask in 0u32..1 << free.len() {
        let mut values = vec![Label::Negative; n];
        values[bottom_left] = Label::Positive;
        for (bit, &v) in free.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                values[v] = Label::Positive;
            }
        }
        let s = CutStructure::new(&g, &Labeling::total(values))?;
        if s.k() == 2 && s.cut_size() <= max_cut {
            count += 1;
        }
    }
    Ok(count)
}

/// Exact size of the chain labeling family and the closed-form lower bound on
/// its logarithm, both in bits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainCount {
    pub spec: ChainFamilySpec,
    pub m: usize,
    /// `None` when the count overflows `u128`.
    pub exact: Option<u128>,
    pub log2_exact: f64,
    pub lower_bound_log2: f64,
    /// Filled when the family was small enough to enumerate.
    pub enumerated: Option<u128>,
}

/// Chain parameters the lower-bound construction uses for
/// `(n, c, m, κ)`: `r = ⌊c/m⌋`, `k = 2⌊(κ-1)/2⌋ + 1` and
/// `p = ⌊2n / (r(k-1) + 4)⌋`.
pub fn chain_params(n: usize, c: usize, m: usize, kappa: usize) -> Result<ChainFamilySpec> {
    if m == 0 || m > c || kappa == 0 || c * (kappa + 2) > n {
        return Err(Error::Infeasible(format!(
            "(n, c, m, kappa) = ({n}, {c}, {m}, {kappa}) needs 1 <= m <= c and c(kappa + 2) <= n"
        )));
    }
    let r = c / m;
    let k = 2 * ((kappa - 1) / 2) + 1;
    let p = 2 * n / (r * (k - 1) + 4);
    Ok(ChainFamilySpec { r, k, p, n })
}

/// `log₂` of the lower bound
/// `(p/m)^m · (⌊(κ-1)/2⌋ + 1)^(m⌊c/m⌋)` written out in `(n, c, m, κ)`.
pub fn chain_lower_bound_log2(n: usize, c: usize, m: usize, kappa: usize) -> f64 {
    let h = (kappa - 1) / 2;
    let r = c / m;
    let p = n / (r * h + 2);
    let (m_f, h1) = (m as f64, (h + 1) as f64);
    m_f * ((p as f64 / m_f) * h1).log2() + (m * r - m) as f64 * h1.log2()
}

fn log2_binomial(n: usize, k: usize) -> f64 {
    (0..k)
        .map(|i| ((n - i) as f64 / (i + 1) as f64).log2())
        .sum()
}

/// Counts the chain family for `(spec, m)`; the lower bound is evaluated at
/// `(n, c = m r, m, κ = k)`. Families of at most `enumerate_limit` members
/// are also enumerated, each labeling validated with the analyzer, and the
/// count cross-checked.
pub fn chain_family_count(
    spec: &ChainFamilySpec,
    m: usize,
    enumerate_limit: u128,
) -> Result<ChainCount> {
    spec.validate()?;
    if m == 0 || m > spec.p {
        return Err(Error::InvalidParameter(format!(
            "m = {m} must lie in [1, {}]",
            spec.p
        )));
    }
    let exact = chain_family_size(spec, m);
    let log2_exact =
        log2_binomial(spec.p, m) + (m * spec.r) as f64 * ((spec.k as f64 + 1.0) / 2.0).log2();
    let lower_bound_log2 = chain_lower_bound_log2(spec.n, m * spec.r, m, spec.k);
    let enumerated = match exact {
        Some(e) if e <= enumerate_limit.min(MAX_ENUMERATION) => {
            let labelings = validated_chain_labelings(spec, m)?;
            let count = labelings as u128;
            if count != e {
                return Err(Error::Generation(format!(
                    "enumerated {count} labelings but the closed form gives {e}"
                )));
            }
            Some(count)
        }
        _ => None,
    };
    Ok(ChainCount {
        spec: *spec,
        m,
        exact,
        log2_exact,
        lower_bound_log2,
        enumerated,
    })
}

/// Enumerates the family and checks every member has `m` cut components,
/// `m r` cuts and `κ* <= k`. Returns the number of labelings.
pub fn validated_chain_labelings(spec: &ChainFamilySpec, m: usize) -> Result<usize> {
    let g = chain_family_graph(spec)?;
    let labelings = enumerate_chain_labelings(spec, m)?;
    for f in &labelings {
        let s = CutStructure::new(&g, f)?;
        let kappa = s.kappa_star()?;
        if s.m() != m || s.cut_size() != m * spec.r || kappa > spec.k {
            return Err(Error::Generation(format!(
                "chain labeling has m = {}, |C| = {}, kappa* = {kappa}",
                s.m(),
                s.cut_size()
            )));
        }
    }
    Ok(labelings.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_family() {
        let spec = ChainFamilySpec::pure(1, 3, 2);
        let c = chain_family_count(&spec, 1, 1000).unwrap();
        assert_eq!(c.exact, Some(4));
        assert_eq!(c.enumerated, Some(4));
    }

    #[test]
    fn all_blocks_chosen() {
        let spec = ChainFamilySpec::pure(2, 5, 2);
        let c = chain_family_count(&spec, 2, 1000).unwrap();
        assert_eq!(c.exact, Some(3u128.pow(4)));
        assert_eq!(c.enumerated, c.exact);
    }

    #[test]
    fn params_are_feasible() {
        let spec = chain_params(100, 6, 2, 5).unwrap();
        assert_eq!((spec.r, spec.k), (3, 5));
        assert!(spec.p >= 2);
        assert!(spec.validate().is_ok());
        assert!(chain_params(10, 6, 2, 5).unwrap_err().is_infeasible());
    }

    #[test]
    fn grid_rejects_large_sides() {
        assert!(count_grid_cuts(5, 5).is_err());
        assert!(count_grid_cuts(1, 1).is_err());
    }
}
