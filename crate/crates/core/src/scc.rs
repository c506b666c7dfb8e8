//! Strongly connected components (iterative Tarjan) and the condensation DAG.

use crate::relation::Relation;

/// SCC decomposition of a relation viewed as a directed graph.
///
/// Components are listed in the order Tarjan's algorithm completes them, so every
/// edge between distinct components goes from a later index to an earlier one.
#[derive(Clone, Debug)]
pub struct Condensation {
    pub components: Vec<Vec<usize>>,
    pub component_of: Vec<usize>,
    /// Whether the component carries a cycle (more than one point, or a self-loop).
    pub cyclic: Vec<bool>,
}

impl Condensation {
    pub fn new(r: &Relation) -> Self {
        let n = r.n();
        const UNSET: usize = usize::MAX;
        let mut index = vec![UNSET; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        let mut component_of = vec![UNSET; n];
        let mut components: Vec<Vec<usize>> = Vec::new();
        let mut next = 0usize;
        // Explicit call stack: (vertex, successor list, position in it).
        let mut calls: Vec<(usize, Vec<usize>, usize)> = Vec::new();

        for root in 0..n {
            if index[root] != UNSET {
                continue;
            }
            index[root] = next;
            low[root] = next;
            next += 1;
            stack.push(root);
            on_stack[root] = true;
            calls.push((root, r.successors(root).collect(), 0));

            while let Some((v, succ, pos)) = calls.last_mut() {
                let v = *v;
                if *pos < succ.len() {
                    let w = succ[*pos];
                    *pos += 1;
                    if index[w] == UNSET {
                        index[w] = next;
                        low[w] = next;
                        next += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        calls.push((w, r.successors(w).collect(), 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                calls.pop();
                if let Some((parent, _, _)) = calls.last() {
                    low[*parent] = low[*parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let id = components.len();
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        component_of[w] = id;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    components.push(comp);
                }
            }
        }

        let cyclic = components.iter().map(|c| c.len() > 1 || r.contains(c[0], c[0])).collect();
        Condensation { components, component_of, cyclic }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Edges of the condensation DAG, deduplicated and sorted.
    pub fn dag_edges(&self, r: &Relation) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for (c, comp) in self.components.iter().enumerate() {
            for &x in comp {
                for y in r.successors(x) {
                    let d = self.component_of[y];
                    if d != c {
                        edges.push((c, d));
                    }
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        edges
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycles_and_a_bridge() {
        let r = Relation::from_edges(5, [(0, 1), (1, 0), (1, 2), (2, 3), (3, 2), (4, 4)]).unwrap();
        let c = Condensation::new(&r);
        assert_eq!(c.len(), 3);
        let a = c.component_of[0];
        let b = c.component_of[2];
        assert_eq!(c.components[a], vec![0, 1]);
        assert_eq!(c.components[b], vec![2, 3]);
        assert!(b < a, "sink component must complete first");
        assert!(c.cyclic.iter().all(|&x| x));
        assert_eq!(c.dag_edges(&r), vec![(a, b)]);
    }

    #[test]
    fn acyclic_singletons() {
        let r = Relation::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let c = Condensation::new(&r);
        assert_eq!(c.len(), 3);
        assert!(c.cyclic.iter().all(|&x| !x));
    }

    #[test]
    fn deep_path_does_not_overflow() {
        let n = 10_000;
        let mut r = Relation::empty(n);
        for x in 0..n - 1 {
            r.insert(x, x + 1);
        }
        r.insert(n - 1, 0);
        assert_eq!(Condensation::new(&r).len(), 1);
    }
}
