//! Line-oriented tree files.
//!
//! ```text
//! FASTTREE v1 offsets=48
//! O 0 -1 4
//! ...
//! N 5
//! L 1
//! L 0
//! L 0
//! ```
//!
//! Nodes are written in pre-order with the brighter, similar and darker
//! subtrees following in that order. `O` lines appear only for 48-offset
//! trees and list the table in index order.

use cornerforge_core::faster::{FasterOffsets, FASTER_OFFSET_COUNT};
use cornerforge_core::ring::Offset;
use cornerforge_core::{ring_offsets, TernaryTree};

use crate::provenance::Provenance;

const MAX_DEPTH: usize = 4096;

/// The offset table a tree indexes into.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OffsetSet {
    Ring,
    Faster(FasterOffsets),
}

impl OffsetSet {
    pub fn len(&self) -> usize {
        match self {
            OffsetSet::Ring => 16,
            OffsetSet::Faster(_) => FASTER_OFFSET_COUNT,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn offsets(&self) -> Vec<Offset> {
        match self {
            OffsetSet::Ring => ring_offsets().as_slice().to_vec(),
            OffsetSet::Faster(f) => f.as_slice().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeFile {
    pub offsets: OffsetSet,
    pub tree: TernaryTree,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct TreeFileError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> TreeFileError {
    TreeFileError { line, msg: msg.into() }
}

/// Header, offset table and nodes, without provenance.
pub fn serialize_tree(tree: &TernaryTree, offsets: &OffsetSet) -> String {
    let mut out = format!("FASTTREE v1 offsets={}\n", offsets.len());
    if let OffsetSet::Faster(f) = offsets {
        for (i, o) in f.as_slice().iter().enumerate() {
            out.push_str(&format!("O {i} {} {}\n", o.dx, o.dy));
        }
    }
    let mut stack = vec![tree];
    while let Some(node) = stack.pop() {
        match node {
            TernaryTree::Leaf(c) => out.push_str(if *c { "L 1\n" } else { "L 0\n" }),
            TernaryTree::Node { offset, children } => {
                out.push_str(&format!("N {offset}\n"));
                // Popped in the order brighter, similar, darker.
                stack.extend([&children[0], &children[1], &children[2]]);
            }
        }
    }
    out
}

/// [`serialize_tree`] preceded by provenance lines.
pub fn write_tree_file(prov: &Provenance, file: &TreeFile) -> String {
    prov.header() + &serialize_tree(&file.tree, &file.offsets)
}

pub fn parse_tree(text: &str) -> Result<TreeFile, TreeFileError> {
    let mut lines = crate::provenance::strip_header(text).peekable();
    let (hline, header) = lines.next().ok_or_else(|| err(1, "missing FASTTREE header"))?;
    let count = match header {
        "FASTTREE v1 offsets=16" => 16,
        "FASTTREE v1 offsets=48" => 48,
        other => return Err(err(hline, format!("unrecognised header {other:?}"))),
    };
    let offsets = if count == 48 {
        let mut table = Vec::with_capacity(48);
        for i in 0..48 {
            let (n, l) = lines.next().ok_or_else(|| err(hline + i + 1, "offset table ends early"))?;
            let f: Vec<&str> = l.split(' ').collect();
            let parsed = match f.as_slice() {
                ["O", idx, dx, dy] => idx
                    .parse::<usize>()
                    .ok()
                    .filter(|&k| k == i)
                    .and_then(|_| Some(Offset::new(dx.parse().ok()?, dy.parse().ok()?))),
                _ => None,
            };
            table.push(parsed.ok_or_else(|| err(n, format!("expected \"O {i} <dx> <dy>\", found {l:?}")))?);
        }
        OffsetSet::Faster(FasterOffsets::new(&table).map_err(|e| err(hline, e.to_string()))?)
    } else {
        OffsetSet::Ring
    };

    let body: Vec<(usize, &str)> = lines.collect();
    let mut pos = 0;
    let tree = parse_node(&body, &mut pos, count, 0)?;
    if let Some(&(n, l)) = body.get(pos) {
        return Err(err(n, format!("trailing content {l:?}")));
    }
    Ok(TreeFile { offsets, tree })
}

fn parse_node(body: &[(usize, &str)], pos: &mut usize, count: usize, depth: usize) -> Result<TernaryTree, TreeFileError> {
    let last = body.last().map_or(1, |l| l.0);
    let &(n, l) = body.get(*pos).ok_or_else(|| err(last, "tree ends early"))?;
    if depth > MAX_DEPTH {
        return Err(err(n, "tree too deep"));
    }
    *pos += 1;
    match l.split(' ').collect::<Vec<_>>().as_slice() {
        ["L", "0"] => Ok(TernaryTree::Leaf(false)),
        ["L", "1"] => Ok(TernaryTree::Leaf(true)),
        ["N", idx] => {
            let offset: usize = idx.parse().map_err(|_| err(n, format!("bad offset index {idx:?}")))?;
            if offset >= count {
                return Err(err(n, format!("offset index {offset} outside 0..{count}")));
            }
            let b = parse_node(body, pos, count, depth + 1)?;
            let s = parse_node(body, pos, count, depth + 1)?;
            let d = parse_node(body, pos, count, depth + 1)?;
            Ok(TernaryTree::node(offset as u8, d, s, b))
        }
        _ => Err(err(n, format!("expected \"N <index>\" or \"L <0|1>\", found {l:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use TernaryTree::Leaf;

    #[test]
    fn leaf_format() {
        assert_eq!(serialize_tree(&Leaf(true), &OffsetSet::Ring), "FASTTREE v1 offsets=16\nL 1\n");
    }

    #[test]
    fn branch_order_is_b_s_d() {
        let t = TernaryTree::node(3, Leaf(false), Leaf(false), Leaf(true));
        assert_eq!(serialize_tree(&t, &OffsetSet::Ring), "FASTTREE v1 offsets=16\nN 3\nL 1\nL 0\nL 0\n");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_tree("# c\nFASTTREE v1 offsets=16\nN 99\nL 0\nL 0\nL 0\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.msg.contains("outside"));
        let e = parse_tree("FASTTREE v1 offsets=16\nN 1\nL 0\n").unwrap_err();
        assert!(e.msg.contains("ends early"));
        let e = parse_tree("FASTTREE v1 offsets=16\nL 0\nL 1\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(parse_tree("FASTTREE v2 offsets=16\nL 0\n").is_err());
    }

    #[test]
    fn faster_table_round_trip() {
        let file = TreeFile {
            offsets: OffsetSet::Faster(FasterOffsets::default()),
            tree: TernaryTree::node(47, Leaf(true), Leaf(false), Leaf(false)),
        };
        let text = write_tree_file(&Provenance::new("test"), &file);
        assert!(text.contains("\nO 0 -1 4\n"));
        assert_eq!(parse_tree(&text).unwrap(), file);
    }

    fn arb_tree(max: u8) -> impl Strategy<Value = TernaryTree> {
        let leaf = any::<bool>().prop_map(Leaf);
        leaf.prop_recursive(6, 200, 3, move |inner| {
            (0..max, inner.clone(), inner.clone(), inner)
                .prop_map(|(o, d, s, b)| TernaryTree::node(o, d, s, b))
        })
    }

    proptest! {
        #[test]
        fn round_trip(tree in arb_tree(16)) {
            let text = serialize_tree(&tree, &OffsetSet::Ring);
            let back = parse_tree(&text).unwrap();
            prop_assert_eq!(&back.tree, &tree);
            prop_assert_eq!(serialize_tree(&back.tree, &OffsetSet::Ring), text);
        }
    }
}
