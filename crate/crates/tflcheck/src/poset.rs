//! Finite labelled posets and label/order-preserving isomorphism.

use std::collections::BTreeSet;

use crate::tsi::Label;

/// A strict partial order over labelled elements. `below[i]` holds every j
/// strictly below i; the relation is kept transitively closed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelledPoset {
    labels: Vec<Label>,
    below: Vec<BTreeSet<usize>>,
}

impl LabelledPoset {
    pub fn new(labels: Vec<Label>, strict_pairs: &[(usize, usize)]) -> LabelledPoset {
        let n = labels.len();
        let mut below = vec![BTreeSet::new(); n];
        for &(a, b) in strict_pairs {
            below[b].insert(a);
        }
        // transitive closure
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..n {
                let preds: Vec<usize> = below[i].iter().cloned().collect();
                for p in preds {
                    let grand: Vec<usize> = below[p].iter().cloned().collect();
                    for g in grand {
                        if below[i].insert(g) {
                            changed = true;
                        }
                    }
                }
            }
        }
        LabelledPoset { labels, below }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &Label {
        &self.labels[i]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        self.below[b].contains(&a)
    }

    /// Elements with nothing above them.
    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| !self.lt(i, j)))
            .collect()
    }

    /// Canonical text form, usable as a hashing key: elements sorted by
    /// (label, strict-predecessor multiset), rendered deterministically.
    pub fn canonical_key(&self) -> String {
        // iteratively refine element codes by label + codes of predecessors
        let n = self.len();
        let mut code: Vec<String> = (0..n).map(|i| self.labels[i].to_string()).collect();
        for _ in 0..n {
            let mut next = Vec::with_capacity(n);
            for i in 0..n {
                let mut preds: Vec<&str> = self.below[i].iter().map(|&p| code[p].as_str()).collect();
                preds.sort();
                next.push(format!("{}({})", self.labels[i], preds.join(",")));
            }
            code = next;
        }
        let mut code_sorted = code;
        code_sorted.sort();
        code_sorted.join(";")
    }
}

/// Searches for a label- and order-preserving bijection; `None` when the
/// posets are not isomorphic. Deterministic backtracking over label-sorted
/// elements.
pub fn poset_isomorphic(p: &LabelledPoset, q: &LabelledPoset) -> Option<Vec<usize>> {
    if p.len() != q.len() {
        return None;
    }
    let n = p.len();
    let mut p_labels: Vec<&Label> = (0..n).map(|i| p.label(i)).collect();
    let mut q_labels: Vec<&Label> = (0..n).map(|i| q.label(i)).collect();
    p_labels.sort();
    q_labels.sort();
    if p_labels != q_labels {
        return None;
    }
    // assign images for p-elements in label-sorted order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (p.label(i).clone(), i));
    let mut image: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];

    fn consistent(p: &LabelledPoset, q: &LabelledPoset, image: &[Option<usize>], a: usize, fa: usize) -> bool {
        for (b, fb) in image.iter().enumerate() {
            if let Some(fb) = *fb {
                if p.lt(a, b) != q.lt(fa, fb) || p.lt(b, a) != q.lt(fb, fa) {
                    return false;
                }
            }
        }
        true
    }

    fn solve(
        p: &LabelledPoset,
        q: &LabelledPoset,
        order: &[usize],
        pos: usize,
        image: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        let a = order[pos];
        for fa in 0..q.len() {
            if used[fa] || q.label(fa) != p.label(a) {
                continue;
            }
            if consistent(p, q, image, a, fa) {
                image[a] = Some(fa);
                used[fa] = true;
                if solve(p, q, order, pos + 1, image, used) {
                    return true;
                }
                image[a] = None;
                used[fa] = false;
            }
        }
        false
    }

    if solve(p, q, &order, 0, &mut image, &mut used) {
        Some(image.into_iter().map(Option::unwrap).collect())
    } else {
        None
    }
}
