//! Ternary decision trees over pixel-state attributes.

use alloc::boxed::Box;

use crate::segment::PixelState;

/// A node either classifies (`Leaf`) or tests one offset of its offset table
/// and branches on the darker/similar/brighter outcome.
///
/// `children` is indexed by `PixelState as usize`: darker, similar, brighter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TernaryTree {
    Leaf(bool),
    Node {
        offset: u8,
        children: Box<[TernaryTree; 3]>,
    },
}

impl TernaryTree {
    pub fn node(offset: u8, darker: TernaryTree, similar: TernaryTree, brighter: TernaryTree) -> Self {
        TernaryTree::Node {
            offset,
            children: Box::new([darker, similar, brighter]),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TernaryTree::Leaf(_))
    }

    pub fn child(&self, state: PixelState) -> Option<&TernaryTree> {
        match self {
            TernaryTree::Leaf(_) => None,
            TernaryTree::Node { children, .. } => Some(&children[state as usize]),
        }
    }

    /// Offset tested at this node, if any.
    pub fn offset(&self) -> Option<u8> {
        match self {
            TernaryTree::Leaf(_) => None,
            TernaryTree::Node { offset, .. } => Some(*offset),
        }
    }

    /// Number of decision (non-leaf) nodes.
    pub fn decision_count(&self) -> usize {
        match self {
            TernaryTree::Leaf(_) => 0,
            TernaryTree::Node { children, .. } => 1 + children.iter().map(|c| c.decision_count()).sum::<usize>(),
        }
    }

    /// Number of nodes of either kind.
    pub fn node_count(&self) -> usize {
        match self {
            TernaryTree::Leaf(_) => 1,
            TernaryTree::Node { children, .. } => 1 + children.iter().map(|c| c.node_count()).sum::<usize>(),
        }
    }

    /// Longest root-to-leaf path counted in decision nodes.
    pub fn depth(&self) -> usize {
        match self {
            TernaryTree::Leaf(_) => 0,
            TernaryTree::Node { children, .. } => 1 + children.iter().map(|c| c.depth()).max().unwrap_or(0),
        }
    }

    /// Largest offset index referenced anywhere in the tree.
    pub fn max_offset(&self) -> Option<u8> {
        match self {
            TernaryTree::Leaf(_) => None,
            TernaryTree::Node { offset, children } => children
                .iter()
                .filter_map(|c| c.max_offset())
                .chain(core::iter::once(*offset))
                .max(),
        }
    }

    /// Walks the tree, asking `state_of` for the state of each tested offset.
    #[inline]
    pub fn classify(&self, mut state_of: impl FnMut(usize) -> PixelState) -> bool {
        let mut node = self;
        loop {
            match node {
                TernaryTree::Leaf(class) => return *class,
                TernaryTree::Node { offset, children } => {
                    node = &children[state_of(*offset as usize) as usize];
                }
            }
        }
    }

    /// Collapses every node whose three subtrees are structurally identical,
    /// bottom-up. Never changes a classification.
    pub fn merge_identical(self) -> TernaryTree {
        match self {
            TernaryTree::Leaf(_) => self,
            TernaryTree::Node { offset, children } => {
                let [d, s, b] = *children;
                let (d, s, b) = (d.merge_identical(), s.merge_identical(), b.merge_identical());
                if d == s && s == b {
                    d
                } else {
                    TernaryTree::node(offset, d, s, b)
                }
            }
        }
    }

    /// Pre-order visit of every node together with the branch it hangs from
    /// (`None` for the root).
    pub fn visit_preorder<'a>(&'a self, f: &mut impl FnMut(&'a TernaryTree, Option<PixelState>)) {
        fn go<'a>(
            node: &'a TernaryTree,
            branch: Option<PixelState>,
            f: &mut impl FnMut(&'a TernaryTree, Option<PixelState>),
        ) {
            f(node, branch);
            if let TernaryTree::Node { children, .. } = node {
                for state in PixelState::ALL {
                    go(&children[state as usize], Some(state), f);
                }
            }
        }
        go(self, None, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use TernaryTree::Leaf;

    #[test]
    fn counts_and_depth() {
        let t = TernaryTree::node(3, Leaf(true), Leaf(false), TernaryTree::node(7, Leaf(true), Leaf(false), Leaf(true)));
        assert_eq!(t.decision_count(), 2);
        assert_eq!(t.node_count(), 7);
        assert_eq!(t.depth(), 2);
        assert_eq!(t.max_offset(), Some(7));
        assert!(t.classify(|o| if o == 3 { PixelState::Brighter } else { PixelState::Darker }));
        assert!(!t.classify(|_| PixelState::Similar));
    }

    #[test]
    fn merge_collapses_uniform_nodes() {
        let inner = TernaryTree::node(2, Leaf(false), Leaf(false), Leaf(false));
        let t = TernaryTree::node(1, inner.clone(), inner, Leaf(false));
        assert_eq!(t.merge_identical(), Leaf(false));
        let keep = TernaryTree::node(1, Leaf(true), Leaf(false), Leaf(true));
        assert_eq!(keep.clone().merge_identical(), keep);
    }
}
