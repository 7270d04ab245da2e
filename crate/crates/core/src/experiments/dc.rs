use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Queries needed before every boundary vertex had been queried.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DcComplexity {
    Covered(usize),
    /// The log never covered the boundary; `total` is its length.
    NotCovered {
        total: usize,
    },
}

impl DcComplexity {
    pub fn covered(self) -> Option<usize> {
        match self {
            DcComplexity::Covered(q) => Some(q),
            DcComplexity::NotCovered { .. } => None,
        }
    }
}

/// Length of the shortest prefix of `queried` that contains every vertex of
/// `boundary`.
pub fn dc_query_complexity<I>(queried: I, boundary: &[usize]) -> Result<DcComplexity>
where
    I: IntoIterator<Item = usize>,
{
    if boundary.is_empty() {
        return Err(Error::InvalidParameter("boundary is empty".into()));
    }
    let size = boundary.iter().max().unwrap() + 1;
    let mut pending = vec![false; size];
    let mut remaining = 0;
    for &b in boundary {
        if !pending[b] {
            pending[b] = true;
            remaining += 1;
        }
    }
    let mut total = 0;
    for v in queried {
        total += 1;
        if v < size && pending[v] {
            pending[v] = false;
            remaining -= 1;
            if remaining == 0 {
                return Ok(DcComplexity::Covered(total));
            }
        }
    }
    Ok(DcComplexity::NotCovered { total })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_boundary_order() {
        assert_eq!(
            dc_query_complexity([4, 2, 7], &[2, 4, 7]).unwrap(),
            DcComplexity::Covered(3)
        );
    }

    #[test]
    fn missing_vertex() {
        assert_eq!(
            dc_query_complexity([4, 2, 9], &[2, 4, 7]).unwrap(),
            DcComplexity::NotCovered { total: 3 }
        );
    }

    #[test]
    fn prefix_semantics() {
        assert_eq!(
            dc_query_complexity([0, 5, 1, 3], &[0, 1]).unwrap(),
            DcComplexity::Covered(3)
        );
    }

    #[test]
    fn empty_boundary_rejected() {
        assert!(dc_query_complexity([1, 2], &[]).is_err());
    }
}
