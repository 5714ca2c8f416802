use crate::Vec2;

/// Which other UAVs a local planner co-optimizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Neighborhood {
    /// Only the nearest UAV.
    Nearest,
    /// Every UAV within the radius (m); `f64::INFINITY` means everyone.
    /// Falls back to the nearest UAV when nobody is in range.
    Radius(f64),
}

/// Closest other UAV by position, lowest id on ties. `None` for a
/// single-UAV swarm.
pub fn nearest_neighbor(i: usize, positions: &[Vec2]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, p) in positions.iter().enumerate() {
        if j == i {
            continue;
        }
        let d = (p - positions[i]).norm_squared();
        match best {
            Some((_, bd)) if d >= bd => {}
            _ => best = Some((j, d)),
        }
    }
    best.map(|(j, _)| j)
}

/// All `j != i` with `dist <= threshold`, in id order; the nearest
/// neighbor when that set is empty.
pub fn neighbors_within(i: usize, positions: &[Vec2], threshold: f64) -> Vec<usize> {
    let within: Vec<usize> = (0..positions.len())
        .filter(|&j| j != i && (positions[j] - positions[i]).norm() <= threshold)
        .collect();
    if within.is_empty() {
        nearest_neighbor(i, positions).into_iter().collect()
    } else {
        within
    }
}

pub fn select_neighbors(i: usize, positions: &[Vec2], hood: &Neighborhood) -> Vec<usize> {
    match *hood {
        Neighborhood::Nearest => nearest_neighbor(i, positions).into_iter().collect(),
        Neighborhood::Radius(r) => neighbors_within(i, positions, r),
    }
}
