use alloc::format;
use alloc::string::String;
use core::fmt::Write;

use crate::ring::Offset;
use crate::tree::TernaryTree;

/// Syntax of the emitted classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitTarget {
    /// `int name(const unsigned char* p, int stride, int t)`, `p` pointing at the candidate.
    C,
    /// `pub fn name(img: &[u8], i: usize, stride: usize, t: i32) -> bool`, `i` the candidate index.
    Rust,
}

/// Emits `tree` as one function of nested conditionals. Each emitted
/// decision node produces exactly one line starting with `if`; a node whose
/// brighter and similar (or darker and similar) subtrees are identical is
/// emitted with a single comparison and that subtree is written once.
pub fn emit_source(tree: &TernaryTree, offsets: &[Offset], target: EmitTarget, name: &str) -> String {
    let mut out = String::new();
    match target {
        EmitTarget::C => {
            let _ = writeln!(out, "int {name}(const unsigned char* p, int stride, int t)\n{{");
            out.push_str("    const int cb = *p + t;\n    const int c_b = *p - t;\n");
        }
        EmitTarget::Rust => {
            let _ = writeln!(out, "#[allow(clippy::all, unused_parens)]");
            let _ = writeln!(out, "pub fn {name}(img: &[u8], i: usize, stride: usize, t: i32) -> bool {{");
            out.push_str("    let cb = img[i] as i32 + t;\n    let c_b = img[i] as i32 - t;\n");
            out.push_str(
                "    let at = |dx: isize, dy: isize| img[(i as isize + dy * stride as isize + dx) as usize] as i32;\n",
            );
        }
    }
    emit_node(&mut out, tree, offsets, target, 1);
    out.push_str("}\n");
    out
}

fn read_expr(offset: Offset, target: EmitTarget) -> String {
    match target {
        EmitTarget::C => format!("p[{} * stride + {}]", offset.dy, offset.dx),
        EmitTarget::Rust => format!("at({}, {})", offset.dx, offset.dy),
    }
}

fn leaf(class: bool, target: EmitTarget) -> &'static str {
    match (target, class) {
        (EmitTarget::C, true) => "return 1;",
        (EmitTarget::C, false) => "return 0;",
        (EmitTarget::Rust, true) => "return true;",
        (EmitTarget::Rust, false) => "return false;",
    }
}

fn emit_node(out: &mut String, node: &TernaryTree, offsets: &[Offset], target: EmitTarget, depth: usize) {
    let pad = "    ".repeat(depth);
    let (offset, children) = match node {
        TernaryTree::Leaf(class) => {
            let _ = writeln!(out, "{pad}{}", leaf(*class, target));
            return;
        }
        TernaryTree::Node { offset, children } => (*offset, children),
    };
    let [d, s, b] = &**children;
    let v = read_expr(offsets[offset as usize], target);
    let (cond, hot, cold): (String, &TernaryTree, Option<(String, &TernaryTree)>) = if b == s {
        (format!("{v} <= c_b"), d, None)
    } else if d == s {
        (format!("{v} >= cb"), b, None)
    } else {
        (format!("{v} >= cb"), b, Some((format!("{v} <= c_b"), d)))
    };
    let _ = writeln!(out, "{pad}if ({cond}) {{");
    emit_node(out, hot, offsets, target, depth + 1);
    match cold {
        Some((cond2, dark)) => {
            let _ = writeln!(out, "{pad}}} else if ({cond2}) {{");
            emit_node(out, dark, offsets, target, depth + 1);
            let _ = writeln!(out, "{pad}}} else {{");
            emit_node(out, s, offsets, target, depth + 1);
        }
        None => {
            let _ = writeln!(out, "{pad}}} else {{");
            // b == s: the else branch covers similar and brighter; d == s: darker and similar.
            emit_node(out, s, offsets, target, depth + 1);
        }
    }
    let _ = writeln!(out, "{pad}}}");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ring_offsets;
    use TernaryTree::Leaf;

    fn decision_lines(src: &str) -> usize {
        src.lines().filter(|l| l.trim_start().starts_with("if ")).count()
    }

    #[test]
    fn leaf_tree_returns_constant() {
        let src = emit_source(&Leaf(false), ring_offsets().as_slice(), EmitTarget::C, "f");
        assert!(src.contains("return 0;"));
        assert_eq!(decision_lines(&src), 0);
    }

    #[test]
    fn one_if_line_per_decision_node() {
        let t = TernaryTree::node(
            0,
            TernaryTree::node(4, Leaf(true), Leaf(false), Leaf(false)),
            Leaf(false),
            TernaryTree::node(8, Leaf(false), Leaf(true), Leaf(false)),
        );
        for target in [EmitTarget::C, EmitTarget::Rust] {
            let src = emit_source(&t, ring_offsets().as_slice(), target, "corner");
            assert_eq!(decision_lines(&src), t.decision_count());
            assert_eq!(src.matches('{').count(), src.matches('}').count());
        }
        let c = emit_source(&t, ring_offsets().as_slice(), EmitTarget::C, "corner");
        assert!(c.contains("p[-3 * stride + 0] >= cb"));
        assert!(c.contains("p[0 * stride + 3] <= c_b"));
    }
}
