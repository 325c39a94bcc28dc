use rand::Rng;

use crate::segment::PixelState;
use crate::tree::TernaryTree;

use super::offsets::FASTER_OFFSET_COUNT;
use super::FasterError;

/// What [`FasterTree::mutate`] did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MutationKind {
    /// An unconstrained leaf became a random depth-1 subtree.
    Grow,
    /// An unconstrained leaf changed class.
    Flip,
    /// A leaf on a similar branch became a random depth-1 subtree (its only option).
    GrowConstrained,
    /// A decision node got a fresh random offset.
    RandomOffset,
    /// A decision node became a leaf.
    Collapse,
    /// One branch of a decision node was overwritten by a copy of another.
    CopyBranch,
}

/// A ternary tree over the 48 FAST-ER offsets in which every leaf hanging
/// from a similar branch is a non-corner.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FasterTree(TernaryTree);

impl FasterTree {
    /// Validates offsets and the similar-branch constraint.
    pub fn new(tree: TernaryTree) -> Result<Self, FasterError> {
        if let Some(max) = tree.max_offset() {
            if max as usize >= FASTER_OFFSET_COUNT {
                return Err(FasterError::OffsetIndex(max));
            }
        }
        if !satisfies_constraint(&tree) {
            return Err(FasterError::SimilarLeaf);
        }
        Ok(Self(tree))
    }

    pub fn tree(&self) -> &TernaryTree {
        &self.0
    }

    pub fn into_tree(self) -> TernaryTree {
        self.0
    }

    /// One decision node with a random offset; darker and brighter leaves
    /// have random classes, the similar leaf is a non-corner.
    pub fn random_depth1<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self(random_stump(rng))
    }

    /// Applies one random modification at a uniformly chosen node. The
    /// result always satisfies the similar-branch constraint.
    pub fn mutate<R: Rng + ?Sized>(&mut self, rng: &mut R) -> MutationKind {
        let k = rng.random_range(0..self.0.node_count());
        let (node, branch) = nth_node_mut(&mut self.0, k);
        let constrained = branch == Some(PixelState::Similar);
        match node {
            TernaryTree::Leaf(class) => {
                if constrained {
                    *node = random_stump(rng);
                    MutationKind::GrowConstrained
                } else if rng.random_bool(0.5) {
                    *node = random_stump(rng);
                    MutationKind::Grow
                } else {
                    *class = !*class;
                    MutationKind::Flip
                }
            }
            TernaryTree::Node { offset, children } => match rng.random_range(0..3) {
                0 => {
                    *offset = rng.random_range(0..FASTER_OFFSET_COUNT as u8);
                    MutationKind::RandomOffset
                }
                1 => {
                    let class = rng.random_bool(0.5) && !constrained;
                    *node = TernaryTree::Leaf(class);
                    MutationKind::Collapse
                }
                _ => {
                    let src = rng.random_range(0..3);
                    let dst = (src + rng.random_range(1..3)) % 3;
                    let mut copy = children[src].clone();
                    if dst == PixelState::Similar as usize && copy.is_leaf() {
                        copy = TernaryTree::Leaf(false);
                    }
                    children[dst] = copy;
                    MutationKind::CopyBranch
                }
            },
        }
    }
}

fn random_stump<R: Rng + ?Sized>(rng: &mut R) -> TernaryTree {
    let offset = rng.random_range(0..FASTER_OFFSET_COUNT as u8);
    let d = rng.random_bool(0.5);
    let b = rng.random_bool(0.5);
    TernaryTree::node(offset, TernaryTree::Leaf(d), TernaryTree::Leaf(false), TernaryTree::Leaf(b))
}

/// True if no similar branch ends directly in a corner leaf.
pub fn satisfies_constraint(tree: &TernaryTree) -> bool {
    let mut ok = true;
    tree.visit_preorder(&mut |node, branch| {
        if branch == Some(PixelState::Similar) && *node == TernaryTree::Leaf(true) {
            ok = false;
        }
    });
    ok
}

// The `k`-th node in pre-order and the branch it hangs from.
fn nth_node_mut(tree: &mut TernaryTree, mut k: usize) -> (&mut TernaryTree, Option<PixelState>) {
    let mut cur = tree;
    let mut branch = None;
    loop {
        if k == 0 {
            return (cur, branch);
        }
        k -= 1;
        let TernaryTree::Node { children, .. } = cur else {
            unreachable!("index exceeds node count");
        };
        let mut next = None;
        for (s, child) in children.iter_mut().enumerate() {
            let n = child.node_count();
            if k < n {
                next = Some((s, child));
                break;
            }
            k -= n;
        }
        let (s, child) = next.expect("index exceeds node count");
        cur = child;
        branch = Some(PixelState::from_code(s as u32));
    }
}
