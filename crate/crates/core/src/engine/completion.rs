use crate::graph::Graph;
use crate::labeling::{majority, Label, Labeling};

/// Completes a partial labeling by component majority.
///
/// Each connected component of `g` that contains observed vertices takes the
/// majority of its observed labels. Components without observations take the
/// global observed majority. Every tie resolves to `+1`, and with no
/// observations at all every vertex is `+1`.
///
/// `g` is expected to have the known cut edges removed already.
pub fn label_completion(g: &Graph, observed: &Labeling) -> Labeling {
    let (comp, count) = g.component_ids();
    let mut balance = vec![0i64; count];
    let mut seen = vec![false; count];
    for (v, label) in observed.observed() {
        balance[comp[v]] += label.sign() as i64;
        seen[comp[v]] = true;
    }
    let global = majority(observed.observed().map(|(_, l)| l));
    let component_label: Vec<Label> = (0..count)
        .map(|c| match (seen[c], balance[c] >= 0) {
            (false, _) => global,
            (true, true) => Label::Positive,
            (true, false) => Label::Negative,
        })
        .collect();
    Labeling::total(comp.iter().map(|&c| component_label[c]).collect())
}
