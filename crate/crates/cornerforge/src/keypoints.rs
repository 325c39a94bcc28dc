//! Keypoint lists: one `x y score` line per feature.

use std::fmt::Display;

use cornerforge_core::Keypoint;

use crate::provenance::{strip_header, Provenance};

pub fn format_keypoints<S: Display>(prov: &Provenance, kps: &[Keypoint<S>]) -> String {
    let mut out = prov.header();
    for k in kps {
        out.push_str(&format!("{} {} {}\n", k.x, k.y, k.score));
    }
    out
}

/// Scores are read as `f64` whatever detector produced them.
pub fn parse_keypoints(text: &str) -> Result<Vec<Keypoint<f64>>, crate::Error> {
    strip_header(text)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            let f: Vec<&str> = l.split_whitespace().collect();
            let parsed = match f.as_slice() {
                [x, y, s] => (|| Some(Keypoint::new(x.parse().ok()?, y.parse().ok()?, s.parse().ok()?)))(),
                _ => None,
            };
            parsed.ok_or_else(|| crate::Error::data(format!("line {n}: expected \"x y score\", found {l:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let kps = [Keypoint::new(3, 4, 17u8), Keypoint::new(10, 2, 255)];
        let text = format_keypoints(&Provenance::new("detect"), &kps);
        assert!(text.ends_with("3 4 17\n10 2 255\n"));
        let back = parse_keypoints(&text).unwrap();
        assert_eq!(back, vec![Keypoint::new(3, 4, 17.0), Keypoint::new(10, 2, 255.0)]);
        assert!(parse_keypoints("1 2\n").is_err());
    }

    #[test]
    fn empty_list_is_header_only() {
        let text = format_keypoints::<u8>(&Provenance::new("detect"), &[]);
        assert!(text.lines().all(|l| l.starts_with('#')));
        assert!(parse_keypoints(&text).unwrap().is_empty());
    }
}
