//! Feature files and similarity graphs built from them.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

/// Rows of real-valued features, optionally with an integer class per row.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    rows: Vec<Vec<f64>>,
    classes: Option<Vec<i64>>,
}

impl FeatureMatrix {
    pub fn new(rows: Vec<Vec<f64>>, classes: Option<Vec<i64>>) -> Result<Self> {
        if let Some(first) = rows.first() {
            let dim = first.len();
            for (i, row) in rows.iter().enumerate() {
                if row.len() != dim {
                    return Err(Error::parse(
                        i + 1,
                        format!("expected {dim} features, found {}", row.len()),
                    ));
                }
                if row.iter().any(|x| !x.is_finite()) {
                    return Err(Error::parse(i + 1, "non-finite feature value"));
                }
            }
        }
        if let Some(c) = &classes {
            if c.len() != rows.len() {
                return Err(Error::InvalidParameter(format!(
                    "{} class labels for {} rows",
                    c.len(),
                    rows.len()
                )));
            }
        }
        Ok(FeatureMatrix { rows, classes })
    }

    /// Reads comma-separated reals, one item per line. A first line that does
    /// not parse as numbers is taken as a header. With `class_column`, the
    /// last field of each line is an integer class.
    pub fn from_csv<R: Read>(reader: R, class_column: bool) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut rows = Vec::new();
        let mut classes = Vec::new();
        for (i, record) in csv.records().enumerate() {
            let record = record?;
            let line = record.position().map_or(i + 1, |p| p.line() as usize);
            let numeric = record.iter().all(|f| f.parse::<f64>().is_ok());
            if i == 0 && !numeric {
                continue;
            }
            let mut fields: Vec<&str> = record.iter().collect();
            if class_column {
                let last = fields
                    .pop()
                    .ok_or_else(|| Error::parse(line, "missing class column"))?;
                let class = last
                    .parse::<i64>()
                    .map_err(|_| Error::parse(line, format!("invalid class {last:?}")))?;
                classes.push(class);
            }
            let row = fields
                .into_iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| Error::parse(line, format!("invalid number {f:?}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        FeatureMatrix::new(rows, class_column.then_some(classes))
    }

    pub fn from_path(path: impl AsRef<Path>, class_column: bool) -> Result<Self> {
        FeatureMatrix::from_csv(std::fs::File::open(path)?, class_column)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn classes(&self) -> Option<&[i64]> {
        self.classes.as_deref()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .iter()
            .zip(&self.rows[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Symmetrized `k`-nearest-neighbor graph: `{i, j}` is an edge when either
/// endpoint is among the other's `k` nearest items. Equal distances rank the
/// lower index first.
pub fn knn_graph(features: &FeatureMatrix, k: usize) -> Graph {
    let n = features.len();
    let mut edges = Vec::with_capacity(n * k);
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(n);
    for i in 0..n {
        order.clear();
        order.extend(
            (0..n)
                .filter(|&j| j != i)
                .map(|j| (features.distance(i, j), j)),
        );
        order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        edges.extend(order.iter().take(k).map(|&(_, j)| Edge::new(i, j)));
    }
    edges.sort_unstable();
    edges.dedup();
    Graph::new(n, edges).expect("deduplicated edges")
}

/// Edge between every pair at Euclidean distance at most `t`.
pub fn threshold_graph(features: &FeatureMatrix, t: f64) -> Graph {
    let n = features.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if features.distance(i, j) <= t {
                edges.push(Edge::new(i, j));
            }
        }
    }
    Graph::new(n, edges).expect("pairs are distinct")
}

/// The largest connected component, re-indexed in ascending order of the
/// original ids, with the map from new ids to original ids. Equal sizes go
/// to the component holding the smallest original id.
pub fn largest_component(g: &Graph) -> (Graph, Vec<usize>) {
    let components = g.connected_components();
    let Some(best) = components
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.len().cmp(&b.len()).then(j.cmp(i)))
        .map(|(_, c)| c.clone())
    else {
        return (Graph::empty(0), Vec::new());
    };
    let sub = g
        .induced_subgraph(&best)
        .expect("component vertices are in range");
    (sub, best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points(xs: &[&[f64]]) -> FeatureMatrix {
        FeatureMatrix::new(xs.iter().map(|r| r.to_vec()).collect(), None).unwrap()
    }

    #[test]
    fn knn_collinear_is_path() {
        let f = points(&[&[0.0], &[1.0], &[2.0]]);
        let g = knn_graph(&f, 1);
        // Point 1 is equidistant from 0 and 2 and keeps 0; 2 keeps 1.
        assert_eq!(
            g.edges().map(Edge::endpoints).collect::<Vec<_>>(),
            vec![(0, 1), (1, 2)]
        );
    }

    #[test]
    fn knn_large_k_is_complete() {
        let f = points(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 3.0], &[5.0, 5.0]]);
        assert_eq!(knn_graph(&f, 3).edge_count(), 6);
        assert_eq!(knn_graph(&f, 10).edge_count(), 6);
    }

    #[test]
    fn threshold_extremes() {
        let f = points(&[&[0.0], &[1.0], &[3.0]]);
        assert_eq!(threshold_graph(&f, 0.0).edge_count(), 0);
        assert_eq!(threshold_graph(&f, f64::INFINITY).edge_count(), 3);
        assert_eq!(threshold_graph(&f, 1.0).edge_count(), 1);
    }

    #[test]
    fn largest_component_drops_small_cluster() {
        let f = points(&[&[10.0], &[0.0], &[0.2], &[10.1], &[0.4]]);
        let g = threshold_graph(&f, 0.5);
        let (sub, map) = largest_component(&g);
        assert_eq!(map, vec![1, 2, 4]);
        assert_eq!(sub.n(), 3);
        assert_eq!(sub.edge_count(), 3);
    }

    #[test]
    fn largest_component_tie_keeps_smallest_id() {
        let g = Graph::new(4, [(2, 3), (0, 1)]).unwrap();
        assert_eq!(largest_component(&g).1, vec![0, 1]);
    }

    #[test]
    fn csv_with_header_and_class() {
        let text = "a,b,class\n0.5, 1.0, 3\n1.5,2.0,7\n";
        let f = FeatureMatrix::from_csv(text.as_bytes(), true).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.dim(), 2);
        assert_eq!(f.row(1), &[1.5, 2.0]);
        assert_eq!(f.classes(), Some(&[3, 7][..]));
    }

    #[test]
    fn csv_without_header() {
        let f = FeatureMatrix::from_csv("1,2\n3,4\n".as_bytes(), false).unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.classes().is_none());
    }

    #[test]
    fn csv_rejects_ragged_and_bad_values() {
        assert!(FeatureMatrix::from_csv("1,2\n3\n".as_bytes(), false).is_err());
        assert!(FeatureMatrix::from_csv("1,2\n3,x\n".as_bytes(), false).is_err());
        assert!(FeatureMatrix::from_csv("1,2\n3,NaN\n".as_bytes(), false).is_err());
    }
}
