use rand::Rng;

use super::FormationShape;
use crate::{Error, Result, Vec2};

const PLACEMENT_TRIES: usize = 2_000;
const RESTARTS: usize = 200;

/// Picks `n` random boundary points, pairwise at least `min_sep` apart,
/// and hands them to UAVs in id order.
pub fn assign_destinations<R: Rng + ?Sized>(
    shape: &FormationShape,
    n: usize,
    min_sep: f64,
    rng: &mut R,
) -> Result<Vec<Vec2>> {
    shape.validate()?;
    if min_sep.is_nan() || min_sep < 0.0 {
        return Err(Error::InvalidInput(format!("min_sep must be non-negative, got {min_sep}")));
    }
    let cap = shape.capacity(min_sep);
    if n > cap {
        return Err(Error::Infeasible(format!(
            "{n} destinations with separation {min_sep} m do not fit on a shape of perimeter {:.1} m (at most {cap})",
            shape.perimeter()
        )));
    }
    let perimeter = shape.perimeter();
    'restart: for _ in 0..RESTARTS {
        let mut pts: Vec<Vec2> = Vec::with_capacity(n);
        while pts.len() < n {
            let mut placed = false;
            for _ in 0..PLACEMENT_TRIES {
                let p = shape.point_at(rng.gen_range(0.0..perimeter));
                if pts.iter().all(|q| (p - q).norm() >= min_sep) {
                    pts.push(p);
                    placed = true;
                    break;
                }
            }
            if !placed {
                continue 'restart;
            }
        }
        return Ok(pts);
    }
    Err(Error::Infeasible(format!(
        "rejection sampling could not place {n} destinations {min_sep} m apart on {shape:?}"
    )))
}

/// Round-robin assignment: UAV `i` follows target `i mod n_targets`.
pub fn assign_targets(n_uavs: usize, n_targets: usize) -> Result<Vec<usize>> {
    if n_targets == 0 {
        return Err(Error::InvalidInput("at least one target is required".into()));
    }
    if n_targets > n_uavs {
        return Err(Error::InvalidInput(format!(
            "{n_targets} targets exceed the {n_uavs} available UAVs"
        )));
    }
    Ok((0..n_uavs).map(|i| i % n_targets).collect())
}
