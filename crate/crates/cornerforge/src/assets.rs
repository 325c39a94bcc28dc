//! Pre-learned FAST-9 and FAST-12 trees: four synthetic scenes at `t = 20`
//! plus every ring configuration, so both are exact. Regenerate with
//! `cornerforge learn-tree --exhaustive --n <n>` (see the README).

use std::sync::OnceLock;

use cornerforge_core::TernaryTree;

use crate::treefile::{parse_tree, OffsetSet};

pub const FAST9_TREE: &str = include_str!("../assets/fast9.tree");
pub const FAST12_TREE: &str = include_str!("../assets/fast12.tree");

fn load(text: &str) -> TernaryTree {
    let file = parse_tree(text).expect("embedded tree parses");
    assert_eq!(file.offsets, OffsetSet::Ring, "embedded trees use the 16-pixel ring");
    file.tree
}

/// The embedded tree for `n` in {9, 12}.
pub fn fast_tree(n: usize) -> &'static TernaryTree {
    static NINE: OnceLock<TernaryTree> = OnceLock::new();
    static TWELVE: OnceLock<TernaryTree> = OnceLock::new();
    match n {
        9 => NINE.get_or_init(|| load(FAST9_TREE)),
        12 => TWELVE.get_or_init(|| load(FAST12_TREE)),
        _ => panic!("no embedded tree for n = {n}"),
    }
}

pub fn has_embedded_tree(n: usize) -> bool {
    matches!(n, 9 | 12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cornerforge_core::learn::count_mismatches;

    #[test]
    fn embedded_trees_are_exact() {
        assert_eq!(count_mismatches(fast_tree(9), 9), 0);
        assert_eq!(count_mismatches(fast_tree(12), 12), 0);
    }
}
