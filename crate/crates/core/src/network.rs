//! Static undirected sensor networks and the three random configurations
//! used in the fusion studies.
//!
//! Edge lists are plain text, one `i j` pair per line, 0-indexed, each
//! undirected edge listed once. Blank lines and lines starting with `#`
//! are ignored when reading.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::{Error, Result, Vec2};

/// Side of the square in which generators place sensors (m).
pub const DEFAULT_REGION: f64 = 500.0;

const REGULAR_TRIES: usize = 100_000;
const ER_TRIES: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SensorNetwork {
    neighbors: Vec<Vec<usize>>,
    positions: Vec<Vec2>,
}

impl SensorNetwork {
    /// Builds a network from undirected edges. Self loops and out-of-range
    /// endpoints are rejected; repeated edges collapse to one.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], positions: Vec<Vec2>) -> Result<Self> {
        if positions.len() != n {
            return Err(Error::InvalidInput(format!("{} positions for {n} sensors", positions.len())));
        }
        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidInput(format!("edge ({a}, {b}) out of range for {n} sensors")));
            }
            if a == b {
                return Err(Error::InvalidInput(format!("self loop at sensor {a}")));
            }
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { neighbors, positions })
    }

    pub fn with_positions(mut self, positions: Vec<Vec2>) -> Result<Self> {
        if positions.len() != self.n() {
            return Err(Error::InvalidInput(format!("{} positions for {} sensors", positions.len(), self.n())));
        }
        self.positions = positions;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.neighbors.len()
    }

    /// Sorted neighbor ids of sensor `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn positions(&self) -> &[Vec2] {
        &self.positions
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, list) in self.neighbors.iter().enumerate() {
            out.extend(list.iter().filter(|&&j| j > i).map(|&j| (i, j)));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }

    /// Symmetric boolean adjacency matrix with an empty diagonal.
    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let n = self.n();
        let mut adj = vec![vec![false; n]; n];
        for (i, list) in self.neighbors.iter().enumerate() {
            for &j in list {
                adj[i][j] = true;
            }
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        is_connected(&self.neighbors)
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        for (a, b) in self.edges() {
            let _ = writeln!(s, "{a} {b}");
        }
        s
    }

    /// Parses an edge list. `n` fixes the sensor count (needed when the
    /// highest-numbered sensors are isolated); otherwise it is inferred.
    /// Positions are set to the origin.
    pub fn from_edge_list(text: &str, n: Option<usize>) -> Result<Self> {
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<usize> {
                tok.and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::InvalidInput(format!("edge list line {}: expected `i j`", lineno + 1)))
            };
            let a = parse(it.next())?;
            let b = parse(it.next())?;
            if it.next().is_some() {
                return Err(Error::InvalidInput(format!("edge list line {}: trailing tokens", lineno + 1)));
            }
            edges.push((a, b));
        }
        let inferred = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
        let n = n.unwrap_or(inferred);
        Self::from_edges(n, &edges, vec![Vec2::zeros(); n])
    }
}

fn is_connected(neighbors: &[Vec<usize>]) -> bool {
    let n = neighbors.len();
    if n <= 1 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &u in &neighbors[v] {
            if !seen[u] {
                seen[u] = true;
                count += 1;
                queue.push_back(u);
            }
        }
    }
    count == n
}

/// Sensors placed uniformly over the default square region.
pub fn place_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Vec2> {
    (0..n)
        .map(|_| Vec2::new(rng.gen_range(0.0..DEFAULT_REGION), rng.gen_range(0.0..DEFAULT_REGION)))
        .collect()
}

/// Steger-Wormald draw of a simple `d`-regular graph (connectivity not
/// checked): stubs are paired one at a time, only ever joining two distinct,
/// not yet adjacent vertices. `None` when the draw gets stuck.
fn pairing_draw<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Option<Vec<Vec<usize>>> {
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut nb = vec![Vec::with_capacity(d); n];
    let ok = |nb: &[Vec<usize>], a: usize, b: usize| a != b && !nb[a].contains(&b);
    while !stubs.is_empty() {
        let m = stubs.len();
        let mut pick = None;
        for _ in 0..32 {
            let (i, j) = (rng.gen_range(0..m), rng.gen_range(0..m));
            if i != j && ok(&nb, stubs[i], stubs[j]) {
                pick = Some((i, j));
                break;
            }
        }
        if pick.is_none() {
            let suitable: Vec<(usize, usize)> = (0..m)
                .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
                .filter(|&(i, j)| ok(&nb, stubs[i], stubs[j]))
                .collect();
            pick = Some(*suitable.choose(rng)?);
        }
        let (i, j) = pick?;
        let (a, b) = (stubs[i], stubs[j]);
        nb[a].push(b);
        nb[b].push(a);
        let (hi, lo) = (i.max(j), i.min(j));
        stubs.swap_remove(hi);
        stubs.swap_remove(lo);
    }
    Some(nb)
}

/// Configuration I: connected graph where every sensor has degree `d`.
///
/// Sparse degrees pair stubs Steger-Wormald style and reject until the
/// graph is connected. Degrees above `(n - 1) / 2` draw the complementary
/// `(n - 1 - d)`-regular graph the same way and complement it, which keeps
/// the rejection rate low.
pub fn gen_config1<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<SensorNetwork> {
    if d == 0 || d >= n || (n * d) % 2 == 1 || (d == 1 && n != 2) {
        return Err(Error::Infeasible(format!("no connected {d}-regular graph on {n} vertices")));
    }
    let dense = 2 * d > n - 1;
    let draw_degree = if dense { n - 1 - d } else { d };
    for _ in 0..REGULAR_TRIES {
        let Some(nb) = pairing_draw(n, draw_degree, rng) else { continue };
        let nb = if dense {
            (0..n)
                .map(|i| (0..n).filter(|&j| j != i && !nb[i].contains(&j)).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        } else {
            nb
        };
        if !is_connected(&nb) {
            continue;
        }
        let edges: Vec<(usize, usize)> =
            nb.iter().enumerate().flat_map(|(i, l)| l.iter().filter(move |&&j| j > i).map(move |&j| (i, j))).collect();
        return SensorNetwork::from_edges(n, &edges, place_uniform(n, rng));
    }
    Err(Error::Infeasible(format!(
        "no connected {d}-regular graph on {n} vertices after {REGULAR_TRIES} pairings"
    )))
}

/// Configuration II: every pair joined independently with probability
/// `pe`, redrawn until the graph is connected.
pub fn gen_config2<R: Rng + ?Sized>(n: usize, pe: f64, rng: &mut R) -> Result<SensorNetwork> {
    if !(pe > 0.0 && pe <= 1.0) {
        return Err(Error::InvalidInput(format!("edge probability must be in (0, 1], got {pe}")));
    }
    for _ in 0..ER_TRIES {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen::<f64>() < pe {
                    edges.push((i, j));
                }
            }
        }
        let net = SensorNetwork::from_edges(n, &edges, vec![Vec2::zeros(); n])?;
        if net.is_connected() {
            return net.with_positions(place_uniform(n, rng));
        }
    }
    Err(Error::Infeasible(format!("no connected graph with n = {n}, pe = {pe} after {ER_TRIES} draws")))
}

/// Configuration III: uniformly random spanning tree (Prüfer code) plus
/// `ne - (n - 1)` distinct random extra edges.
pub fn gen_config3<R: Rng + ?Sized>(n: usize, ne: usize, rng: &mut R) -> Result<SensorNetwork> {
    if n == 0 {
        return Err(Error::InvalidInput("network needs at least one sensor".into()));
    }
    let max = n * (n - 1) / 2;
    if ne + 1 < n || ne > max {
        return Err(Error::InvalidInput(format!("edge count {ne} outside [{}, {max}] for {n} sensors", n - 1)));
    }
    let mut edges = random_tree(n, rng);
    let mut spare: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|e| !edges.contains(e)).collect();
    let extra = ne - edges.len();
    let (chosen, _) = spare.partial_shuffle(rng, extra);
    edges.extend_from_slice(chosen);
    SensorNetwork::from_edges(n, &edges, place_uniform(n, rng))
}

/// Uniform labelled tree from a random Prüfer sequence; edges as `(lo, hi)`.
fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<(usize, usize)> {
    if n < 2 {
        return Vec::new();
    }
    if n == 2 {
        return vec![(0, 1)];
    }
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &c in &code {
        degree[c] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &c in &code {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf always exists");
        edges.push((leaf.min(c), leaf.max(c)));
        degree[leaf] -= 1;
        degree[c] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0].min(rest[1]), rest[0].max(rest[1])));
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_edge_regular() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let g = gen_config1(2, 1, &mut rng).unwrap();
        assert_eq!(g.edges(), vec![(0, 1)]);
    }

    #[test]
    fn regular_degrees_and_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 2..10 {
            if (10 * d) % 2 == 1 {
                continue;
            }
            let g = gen_config1(10, d, &mut rng).unwrap();
            assert!((0..10).all(|i| g.degree(i) == d), "d = {d}");
            assert_eq!(g.edge_count(), 10 * d / 2);
            assert!(g.is_connected());
        }
    }

    #[test]
    fn infeasible_regular_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(gen_config1(5, 3, &mut rng).is_err());
        assert!(gen_config1(10, 1, &mut rng).is_err());
        assert!(gen_config1(4, 4, &mut rng).is_err());
        assert!(gen_config1(4, 0, &mut rng).is_err());
    }

    #[test]
    fn complete_graph_at_unit_probability() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = gen_config2(10, 1.0, &mut rng).unwrap();
        assert_eq!(g.edge_count(), 45);
    }

    #[test]
    fn sparse_er_is_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            assert!(gen_config2(10, 0.1, &mut rng).unwrap().is_connected());
        }
        assert!(gen_config2(10, 0.0, &mut rng).is_err());
    }

    #[test]
    fn er_edge_frequency_at_high_probability() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let trials = 1000;
        let edges: usize = (0..trials).map(|_| gen_config2(10, 0.9, &mut rng).unwrap().edge_count()).sum();
        let freq = edges as f64 / (trials * 45) as f64;
        assert!((freq - 0.9).abs() < 0.05, "edge frequency {freq}");
    }

    #[test]
    fn fixed_edge_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let tree = gen_config3(10, 9, &mut rng).unwrap();
        assert_eq!(tree.edge_count(), 9);
        assert!(tree.is_connected());
        assert_eq!(gen_config3(10, 45, &mut rng).unwrap().edge_count(), 45);
        let g = gen_config3(10, 15, &mut rng).unwrap();
        assert_eq!(g.edge_count(), 15);
        assert!(g.is_connected());
        assert!(gen_config3(10, 8, &mut rng).is_err());
        assert!(gen_config3(10, 46, &mut rng).is_err());
    }

    #[test]
    fn positions_inside_region() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = gen_config3(10, 12, &mut rng).unwrap();
        assert!(g.positions().iter().all(|p| (0.0..DEFAULT_REGION).contains(&p.x) && (0.0..DEFAULT_REGION).contains(&p.y)));
    }

    #[test]
    fn edge_list_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = gen_config2(10, 0.4, &mut rng).unwrap();
        let text = g.to_edge_list();
        assert_eq!(text.lines().count(), g.edge_count());
        let back = SensorNetwork::from_edge_list(&text, Some(10)).unwrap();
        assert_eq!(back.edges(), g.edges());
        assert_eq!(back.adjacency(), g.adjacency());
    }

    #[test]
    fn edge_list_errors() {
        assert!(SensorNetwork::from_edge_list("0 1\n1 x\n", None).is_err());
        assert!(SensorNetwork::from_edge_list("0 0\n", None).is_err());
        assert!(SensorNetwork::from_edge_list("0 1 2\n", None).is_err());
        assert!(SensorNetwork::from_edge_list("0 5\n", Some(3)).is_err());
        let g = SensorNetwork::from_edge_list("# comment\n\n0 1\n", Some(3)).unwrap();
        assert_eq!(g.n(), 3);
        assert!(!g.is_connected());
    }

    #[test]
    fn adjacency_is_symmetric_with_empty_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let adj = gen_config2(10, 0.5, &mut rng).unwrap().adjacency();
        for i in 0..10 {
            assert!(!adj[i][i]);
            for j in 0..10 {
                assert_eq!(adj[i][j], adj[j][i]);
            }
        }
    }
}
