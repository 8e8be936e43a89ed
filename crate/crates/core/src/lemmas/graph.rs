//! Incompatibility graph of the geometric permutations of four balls.
//!
//! A transversal with order `pqrs` forces `|ps|` to exceed each of `|pq|`,
//! `|qr|`, `|rs|`. Two permutations are incompatible when their forced
//! strict inequalities contradict each other.

use serde::Serialize;

use crate::geometry::{canonicalize, GeometricPermutation, OrderedOrder};

const LABELS: [char; 4] = ['A', 'B', 'C', 'D'];

/// Unordered label pair, stored sorted.
type Pair = (char, char);

fn pair(a: char, b: char) -> Pair {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Implication {
    pub gp: String,
    /// The extreme pair, strictly longer than each pair in `shorter`.
    pub longer: String,
    pub shorter: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncompatibilityGraph {
    pub vertices: Vec<String>,
    pub implications: Vec<Implication>,
    /// Index pairs into `vertices`, `i < j`.
    pub edges: Vec<(usize, usize)>,
    pub excluded_by_abcd: Vec<String>,
    pub compatible_with_abcd: Vec<String>,
    /// Edges among the compatible vertices, as label pairs.
    pub compatible_edges: Vec<(String, String)>,
    pub independence_number: usize,
}

fn all_gps() -> Vec<GeometricPermutation> {
    let mut out = Vec::new();
    let mut perm = LABELS;
    heap_permutations(&mut perm, 4, &mut |p| {
        let order = OrderedOrder::new(p.iter().map(|c| c.to_string()).collect()).expect("distinct labels");
        out.push(canonicalize(&order));
    });
    out.sort();
    out.dedup();
    out
}

fn heap_permutations(a: &mut [char; 4], k: usize, visit: &mut dyn FnMut(&[char; 4])) {
    if k == 1 {
        visit(a);
        return;
    }
    for i in 0..k {
        heap_permutations(a, k - 1, visit);
        let j = if k % 2 == 0 { i } else { 0 };
        a.swap(j, k - 1);
    }
}

fn chars(gp: &GeometricPermutation) -> Vec<char> {
    gp.to_string().chars().collect()
}

fn implied(gp: &GeometricPermutation) -> (Pair, [Pair; 3]) {
    let c = chars(gp);
    (pair(c[0], c[3]), [pair(c[0], c[1]), pair(c[1], c[2]), pair(c[2], c[3])])
}

/// Every relation has the extreme pair on the left, so a contradiction
/// between two permutations is always a direct reversal.
fn incompatible(a: &GeometricPermutation, b: &GeometricPermutation) -> bool {
    let (la, sa) = implied(a);
    let (lb, sb) = implied(b);
    sa.contains(&lb) && sb.contains(&la)
}

fn show(p: Pair) -> String {
    format!("{}{}", p.0, p.1).to_lowercase()
}

fn independence_number(n: usize, adjacent: &dyn Fn(usize, usize) -> bool) -> usize {
    (0u32..1 << n)
        .filter(|mask| {
            (0..n).all(|i| (0..n).all(|j| i >= j || mask & (1 << i) == 0 || mask & (1 << j) == 0 || !adjacent(i, j)))
        })
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

pub fn build_incompatibility_graph() -> IncompatibilityGraph {
    let gps = all_gps();
    let vertices: Vec<String> = gps.iter().map(|g| g.to_string()).collect();
    let implications = gps
        .iter()
        .map(|g| {
            let (l, s) = implied(g);
            Implication { gp: g.to_string(), longer: show(l), shorter: s.iter().map(|p| show(*p)).collect() }
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..gps.len() {
        for j in i + 1..gps.len() {
            if incompatible(&gps[i], &gps[j]) {
                edges.push((i, j));
            }
        }
    }
    let abcd = vertices.iter().position(|v| v == "ABCD").expect("ABCD is a vertex");
    let adjacent = |i: usize, j: usize| edges.contains(&(i.min(j), i.max(j)));
    let excluded: Vec<usize> = (0..gps.len()).filter(|&i| i != abcd && adjacent(abcd, i)).collect();
    let compatible: Vec<usize> = (0..gps.len()).filter(|&i| i != abcd && !excluded.contains(&i)).collect();
    let compatible_edges = edges
        .iter()
        .filter(|(i, j)| compatible.contains(i) && compatible.contains(j))
        .map(|&(i, j)| (vertices[i].clone(), vertices[j].clone()))
        .collect();
    let independence_number = independence_number(compatible.len(), &|a, b| adjacent(compatible[a], compatible[b]));
    IncompatibilityGraph {
        excluded_by_abcd: excluded.iter().map(|&i| vertices[i].clone()).collect(),
        compatible_with_abcd: compatible.iter().map(|&i| vertices[i].clone()).collect(),
        vertices,
        implications,
        edges,
        compatible_edges,
        independence_number,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn has_edge(g: &IncompatibilityGraph, a: &str, b: &str) -> bool {
        let i = g.vertices.iter().position(|v| v == a).unwrap();
        let j = g.vertices.iter().position(|v| v == b).unwrap();
        g.edges.contains(&(i.min(j), i.max(j)))
    }

    #[test]
    fn twelve_vertices() {
        let g = build_incompatibility_graph();
        assert_eq!(g.vertices.len(), 12);
        assert!(g.vertices.iter().all(|v| v.len() == 4));
    }

    #[test]
    fn known_edges() {
        let g = build_incompatibility_graph();
        assert!(has_edge(&g, "ABCD", "ADCB"));
        assert!(has_edge(&g, "ABDC", "BACD"));
        assert!(!has_edge(&g, "ABCD", "ABDC"));
    }

    #[test]
    fn abcd_neighbourhood_and_independence() {
        let g = build_incompatibility_graph();
        assert_eq!(g.excluded_by_abcd, ["ADCB", "BADC", "BDAC", "CBAD"]);
        assert_eq!(g.compatible_with_abcd, ["ABDC", "ACBD", "ACDB", "ADBC", "BACD", "BCAD", "CABD"]);
        assert_eq!(g.independence_number, 2);
    }

    #[test]
    fn permutation_count() {
        let mut n = 0;
        heap_permutations(&mut LABELS.clone(), 4, &mut |_| n += 1);
        assert_eq!(n, 24);
    }
}
