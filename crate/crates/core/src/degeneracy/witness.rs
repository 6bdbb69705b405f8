use serde::Serialize;

use crate::bitset::VertexSet;
use crate::error::{capacity, Result};
use crate::graph::Graph;
use crate::revelation::Revelation;

use super::EliminationOrder;

/// Vertices the witness construction assigned to each gadget role.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessLabels {
    /// `(a, x_a, y_a)` for every revealed `a`, in ascending `a`.
    pub pendants: Vec<(usize, usize, usize)>,
    pub hub: usize,
    pub triangle: (usize, usize),
    pub fixer: usize,
}

/// Builds an even-degenerate graph on `n` vertices that satisfies `rev`, plus a
/// valid elimination order for it.
///
/// Gadget labels are the lowest unused vertices outside `A`, taken in the order
/// `x_a` (ascending `a`), `y_a`, then the hub `w`, the triangle `t1, t2` and the
/// fixer `b`. Each `a` gets the pendant `x_a`, and also `y_a` when `H` already
/// gives it the target degree parity. Every `x_a` joins `w`, `w t1 t2` is a
/// triangle, and `b w` is added if the edge count still has the wrong parity.
pub fn build_prescribed_witness(rev: &Revelation, n: usize) -> Result<(Graph, EliminationOrder, WitnessLabels)> {
    rev.validate(n)?;
    let k = rev.a.len();
    if n < 3 * k + 4 {
        return capacity(format!("witness needs n >= 3|A| + 4 = {}, got {n}", 3 * k + 4));
    }
    let revealed = VertexSet::from_iter(n, rev.a.iter().copied());
    let outside = revealed.complement();
    let mut free = outside.iter();
    let mut take = || free.next().expect("enough free vertices");
    let mut centers = rev.a.clone();
    centers.sort_unstable();
    let xs: Vec<usize> = centers.iter().map(|_| take()).collect();
    let ys: Vec<usize> = centers.iter().map(|_| take()).collect();
    let (w, t1, t2, b) = (take(), take(), take(), take());

    let mut edges: Vec<(usize, usize)> = rev.h.clone();
    for (i, &a) in centers.iter().enumerate() {
        edges.push((a, xs[i]));
        if rev.h_degree(a) % 2 == rev.deg_parity[&a] as usize {
            edges.push((a, ys[i]));
        }
        edges.push((w, xs[i]));
    }
    edges.extend([(w, t1), (w, t2), (t1, t2)]);
    if edges.len() % 2 != rev.edge_parity as usize {
        edges.push((b, w));
    }
    let g = Graph::from_edges(n, edges)?;

    let mut remaining = VertexSet::full(n);
    let mut order = Vec::with_capacity(n);
    let drop = |v: usize, order: &mut Vec<usize>, remaining: &mut VertexSet| {
        remaining.remove(v);
        order.push(v);
    };
    for (i, &a) in centers.iter().enumerate() {
        if g.degree_into(a, &remaining) % 2 == 1 {
            drop(xs[i], &mut order, &mut remaining);
        }
        drop(a, &mut order, &mut remaining);
    }
    if g.degree_into(w, &remaining) % 2 == 1 {
        drop(t1, &mut order, &mut remaining);
    }
    drop(w, &mut order, &mut remaining);
    let isolated: Vec<usize> = remaining.iter().filter(|&v| v != t1 && v != t2).collect();
    order.extend(isolated);
    order.extend([t1, t2].into_iter().filter(|&v| remaining.contains(v)));

    let labels = WitnessLabels {
        pendants: centers.iter().enumerate().map(|(i, &a)| (a, xs[i], ys[i])).collect(),
        hub: w,
        triangle: (t1, t2),
        fixer: b,
    };
    Ok((g, order, labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degeneracy::verify_ordering;
    use crate::revelation::verify_revelation;
    use std::collections::BTreeMap;

    #[test]
    fn single_revealed_vertex() {
        let rev =
            Revelation { a: vec![0], h: vec![], deg_parity: BTreeMap::from([(0, 1)]), edge_parity: 0, alpha: 0.1 };
        let (g, order, labels) = build_prescribed_witness(&rev, 7).unwrap();
        assert_eq!(labels.pendants, vec![(0, 1, 2)]);
        assert_eq!((labels.hub, labels.triangle, labels.fixer), (3, (4, 5), 6));
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 3), (3, 4), (3, 5), (3, 6), (4, 5)]);
        assert!(verify_revelation(&g, &rev));
        assert!(verify_ordering(&g, &order).unwrap());
    }

    #[test]
    fn nothing_revealed() {
        let rev = Revelation::empty(0, 0.1);
        let (g, order, _) = build_prescribed_witness(&rev, 4).unwrap();
        assert_eq!(g.edge_count(), 4);
        assert!(verify_revelation(&g, &rev));
        assert!(verify_ordering(&g, &order).unwrap());
    }

    #[test]
    fn too_small() {
        let mut rev = Revelation::empty(0, 0.1);
        rev.a = vec![0];
        rev.deg_parity.insert(0, 0);
        assert!(build_prescribed_witness(&rev, 6).is_err());
    }
}
