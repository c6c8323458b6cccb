//! Stable variable and row names shared by the builders, audit and report.
//!
//! Indices are rendered 1-based: hour slot `t0001`, calendar day `d001`,
//! representative day `r01`.

pub fn h(t: usize) -> String {
    format!("t{:04}", t + 1)
}

pub fn d(day: usize) -> String {
    format!("d{:03}", day + 1)
}

pub fn r(rep: usize) -> String {
    format!("r{:02}", rep + 1)
}

pub fn name(family: &str, idx: &[&str]) -> String {
    let mut s = String::with_capacity(family.len() + idx.iter().map(|i| i.len() + 2).sum::<usize>());
    s.push_str(family);
    for i in idx {
        s.push('[');
        s.push_str(i);
        s.push(']');
    }
    s
}

/// Splits `fam[a][b]` into its family and index parts.
pub fn split(full: &str) -> (&str, Vec<&str>) {
    match full.find('[') {
        None => (full, Vec::new()),
        Some(p) => {
            let idx = full[p + 1..full.len() - 1].split("][").collect();
            (&full[..p], idx)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_and_split() {
        let n = name("p", &["CT", &h(0), "CCGT"]);
        assert_eq!(n, "p[CT][t0001][CCGT]");
        assert_eq!(split(&n), ("p", vec!["CT", "t0001", "CCGT"]));
        assert_eq!(split("rps"), ("rps", vec![]));
        assert_eq!(d(364), "d365");
        assert_eq!(r(0), "r01");
    }
}
