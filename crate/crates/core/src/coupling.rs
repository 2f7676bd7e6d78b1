//! Physical platforms as undirected coupling graphs.

use std::collections::VecDeque;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CouplingError {
    #[error("line {line}: malformed line `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: qubit {qubit} out of range (platform has {num_physical})")]
    OutOfRange {
        line: usize,
        qubit: usize,
        num_physical: usize,
    },
    #[error("line {line}: self-loop on qubit {qubit}")]
    SelfLoop { line: usize, qubit: usize },
    #[error("missing `n <num_physical>` header")]
    MissingHeader,
    #[error("unknown platform `{0}`")]
    UnknownPlatform(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingMap {
    num_physical: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    matrix: Vec<bool>,
}

impl CouplingMap {
    /// Builds a map from unordered pairs. Duplicates and orientation are
    /// collapsed.
    pub fn new(num_physical: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut edges: Vec<(usize, usize)> = pairs.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        edges.sort_unstable();
        edges.dedup();
        let mut adjacency = vec![Vec::new(); num_physical];
        let mut matrix = vec![false; num_physical * num_physical];
        for &(a, b) in &edges {
            assert!(a != b && b < num_physical, "invalid edge ({a}, {b})");
            adjacency[a].push(b);
            adjacency[b].push(a);
            matrix[a * num_physical + b] = true;
            matrix[b * num_physical + a] = true;
        }
        for n in &mut adjacency {
            n.sort_unstable();
        }
        CouplingMap {
            num_physical,
            edges,
            adjacency,
            matrix,
        }
    }

    pub fn num_physical(&self) -> usize {
        self.num_physical
    }

    /// Edges as `(low, high)` pairs in ascending order. The position of an
    /// edge in this slice is its edge index.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, p: usize) -> &[usize] {
        &self.adjacency[p]
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        a < self.num_physical && b < self.num_physical && self.matrix[a * self.num_physical + b]
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&(a.min(b), a.max(b))).ok()
    }

    pub fn is_connected(&self) -> bool {
        if self.num_physical == 0 {
            return true;
        }
        self.bfs(0).iter().all(|d| *d != usize::MAX)
    }

    fn bfs(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.num_physical];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// All-pairs hop distances; `usize::MAX` marks unreachable pairs.
    pub fn shortest_distances(&self) -> Vec<Vec<usize>> {
        (0..self.num_physical).map(|p| self.bfs(p)).collect()
    }

    /// Serializes in the edge-list format accepted by [`parse_coupling`].
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("n {}\n", self.num_physical);
        for (a, b) in &self.edges {
            s.push_str(&format!("{a} {b}\n"));
        }
        s
    }
}

/// Parses `n <count>` followed by one `u v` edge per line. `#` starts a
/// comment.
pub fn parse_coupling(text: &str) -> Result<CouplingMap, CouplingError> {
    let mut num_physical = None;
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let malformed = || CouplingError::Malformed {
            line,
            text: raw.to_string(),
        };
        let fields: Vec<&str> = body.split_whitespace().collect();
        let Some(n) = num_physical else {
            match fields.as_slice() {
                ["n", count] => {
                    num_physical = Some(count.parse::<usize>().map_err(|_| malformed())?);
                    continue;
                }
                _ => return Err(CouplingError::MissingHeader),
            }
        };
        let [u, v] = fields.as_slice() else {
            return Err(malformed());
        };
        let u: usize = u.parse().map_err(|_| malformed())?;
        let v: usize = v.parse().map_err(|_| malformed())?;
        for qubit in [u, v] {
            if qubit >= n {
                return Err(CouplingError::OutOfRange {
                    line,
                    qubit,
                    num_physical: n,
                });
            }
        }
        if u == v {
            return Err(CouplingError::SelfLoop { line, qubit: u });
        }
        pairs.push((u, v));
    }
    let n = num_physical.ok_or(CouplingError::MissingHeader)?;
    Ok(CouplingMap::new(n, pairs))
}

const NAMED: &[(&str, &str)] = &[
    ("tenerife", include_str!("../platforms/tenerife.txt")),
    ("melbourne", include_str!("../platforms/melbourne.txt")),
    ("guadalupe", include_str!("../platforms/guadalupe.txt")),
    ("tokyo", include_str!("../platforms/tokyo.txt")),
    ("cambridge", include_str!("../platforms/cambridge.txt")),
    ("sycamore", include_str!("../platforms/sycamore.txt")),
    ("aspen-m", include_str!("../platforms/aspen-m.txt")),
];

pub fn named_platforms() -> impl Iterator<Item = &'static str> {
    NAMED.iter().map(|(n, _)| *n)
}

/// Looks up a bundled device map or a generated family: `line-N`,
/// `cycle-N`, `star-N` (hub 0 plus N-1 leaves) and `grid-RxC`.
pub fn builtin_platform(name: &str) -> Result<CouplingMap, CouplingError> {
    let unknown = || CouplingError::UnknownPlatform(name.to_string());
    if let Some((_, data)) = NAMED.iter().find(|(n, _)| *n == name) {
        return Ok(parse_coupling(data).expect("bundled platform data is valid"));
    }
    let (family, size) = name.rsplit_once('-').ok_or_else(unknown)?;
    match family {
        "line" | "cycle" | "star" => {
            let n: usize = size.parse().map_err(|_| unknown())?;
            match family {
                "line" if n >= 1 => Ok(CouplingMap::new(n, (1..n).map(|i| (i - 1, i)))),
                "cycle" if n >= 3 => Ok(CouplingMap::new(n, (0..n).map(|i| (i, (i + 1) % n)))),
                "star" if n >= 1 => Ok(CouplingMap::new(n, (1..n).map(|i| (0, i)))),
                _ => Err(unknown()),
            }
        }
        "grid" => {
            let (r, c) = size.split_once('x').ok_or_else(unknown)?;
            let rows: usize = r.parse().map_err(|_| unknown())?;
            let cols: usize = c.parse().map_err(|_| unknown())?;
            if rows == 0 || cols == 0 {
                return Err(unknown());
            }
            let mut pairs = Vec::new();
            for i in 0..rows {
                for j in 0..cols {
                    let p = i * cols + j;
                    if j + 1 < cols {
                        pairs.push((p, p + 1));
                    }
                    if i + 1 < rows {
                        pairs.push((p, p + cols));
                    }
                }
            }
            Ok(CouplingMap::new(rows * cols, pairs))
        }
        _ => Err(unknown()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_from_text() {
        let m = parse_coupling("n 4\n0 1\n1 2\n2 3\n").unwrap();
        assert_eq!(m.num_physical(), 4);
        assert_eq!(m.edges(), &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(m, builtin_platform("line-4").unwrap());
    }

    #[test]
    fn duplicate_orientations_collapse() {
        let m = parse_coupling("# comment\nn 2\n0 1\n1 0 # again\n").unwrap();
        assert_eq!(m.edges().len(), 1);
        assert!(m.is_edge(1, 0));
    }

    #[test]
    fn adjacency_matches_incidence_scan() {
        let m = parse_coupling("n 5\n0 1\n0 2\n1 2\n2 3\n2 4\n3 4\n").unwrap();
        for p in 0..5 {
            let scan: Vec<usize> = m
                .edges()
                .iter()
                .filter_map(|&(a, b)| {
                    if a == p {
                        Some(b)
                    } else if b == p {
                        Some(a)
                    } else {
                        None
                    }
                })
                .collect();
            let mut scan = scan;
            scan.sort_unstable();
            assert_eq!(m.neighbors(p), scan.as_slice());
        }
        assert_eq!(m.neighbors(2), &[0, 1, 3, 4]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_coupling("n 3\n0 3\n"),
            Err(CouplingError::OutOfRange { line: 2, qubit: 3, .. })
        ));
        assert!(matches!(
            parse_coupling("n 3\n1 1\n"),
            Err(CouplingError::SelfLoop { line: 2, qubit: 1 })
        ));
        assert!(matches!(
            parse_coupling("n 3\n0 1 2\n"),
            Err(CouplingError::Malformed { line: 2, .. })
        ));
        assert!(matches!(parse_coupling("0 1\n"), Err(CouplingError::MissingHeader)));
    }

    #[test]
    fn builtin_counts() {
        let expected = [
            ("tenerife", 5),
            ("melbourne", 14),
            ("guadalupe", 16),
            ("tokyo", 20),
            ("cambridge", 32),
            ("sycamore", 54),
            ("aspen-m", 80),
        ];
        for (name, n) in expected {
            let m = builtin_platform(name).unwrap();
            assert_eq!(m.num_physical(), n, "{name}");
            assert!(m.is_connected(), "{name}");
            assert!(m.edges().iter().all(|&(a, b)| a < b));
        }
        let l = builtin_platform("line-4").unwrap();
        assert_eq!((l.num_physical(), l.edges().len()), (4, 3));
        let g = builtin_platform("grid-2x3").unwrap();
        assert_eq!((g.num_physical(), g.edges().len()), (6, 7));
        let s = builtin_platform("star-4").unwrap();
        assert_eq!(s.neighbors(0), &[1, 2, 3]);
        assert_eq!(builtin_platform("cycle-4").unwrap().edges().len(), 4);
        assert!(matches!(
            builtin_platform("falcon"),
            Err(CouplingError::UnknownPlatform(_))
        ));
        assert!(builtin_platform("cycle-2").is_err());
    }

    #[test]
    fn distances() {
        let l = builtin_platform("line-4").unwrap();
        assert!(l.is_connected());
        assert_eq!(l.shortest_distances()[0][3], 3);
        let split = CouplingMap::new(4, [(0, 1), (2, 3)]);
        assert!(!split.is_connected());
        assert_eq!(split.shortest_distances()[0][2], usize::MAX);
    }
}
