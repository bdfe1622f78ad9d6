//! Synthetic grid instances: a rows x cols street grid where each segment
//! is independently a demand street, and demand streets with median
//! barriers become paired one-way arcs that both need service.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::network::{LinkSpec, NetworkSpec, NodeSpec};
use crate::scalar::Scalar;

#[derive(Copy, Clone, Debug)]
pub struct GridParams<F> {
    pub rows: usize,
    pub cols: usize,
    pub edge_len: F,
    pub demand_frac: f64,
    pub arc_frac: f64,
    pub n_depots: usize,
    pub seed: u64,
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum GenError {
    #[error("grid needs at least 2 rows and 2 columns")]
    BadDims,
    #[error("fractions must lie in [0, 1]")]
    BadFraction,
    #[error("between 1 and 4 depots supported (grid corners)")]
    BadDepotCount,
    #[error("no demand links drawn; raise demand_frac or change the seed")]
    DegenerateInstance,
}

/// Deterministic per seed. Returns the network geometry and the demand
/// link indices.
pub fn generate_grid_instance<F: Scalar>(
    p: &GridParams<F>,
) -> Result<(NetworkSpec<F>, Vec<usize>), GenError> {
    if p.rows < 2 || p.cols < 2 {
        return Err(GenError::BadDims);
    }
    if !(0.0..=1.0).contains(&p.demand_frac) || !(0.0..=1.0).contains(&p.arc_frac) {
        return Err(GenError::BadFraction);
    }
    if p.n_depots == 0 || p.n_depots > 4 {
        return Err(GenError::BadDepotCount);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let node_id = |r: usize, c: usize| (r * p.cols + c) as u64;
    let nodes: Vec<NodeSpec<F>> = (0..p.rows)
        .flat_map(|r| {
            (0..p.cols).map(move |c| NodeSpec {
                id: node_id(r, c),
                coords: Some((
                    F::from_usize(c) * p.edge_len,
                    F::from_usize(r) * p.edge_len,
                )),
            })
        })
        .collect();

    // street segments: horizontal row-major, then vertical
    let mut segments: Vec<(u64, u64)> = Vec::new();
    for r in 0..p.rows {
        for c in 0..p.cols - 1 {
            segments.push((node_id(r, c), node_id(r, c + 1)));
        }
    }
    for r in 0..p.rows - 1 {
        for c in 0..p.cols {
            segments.push((node_id(r, c), node_id(r + 1, c)));
        }
    }

    let mut links = Vec::new();
    let mut demand_idx = Vec::new();
    for (from, to) in segments {
        let is_demand = rng.random::<f64>() < p.demand_frac;
        if is_demand && rng.random::<f64>() < p.arc_frac {
            // median barrier: both directions must be sprinkled
            demand_idx.push(links.len());
            links.push(LinkSpec { from, to, directional: true, length: p.edge_len });
            demand_idx.push(links.len());
            links.push(LinkSpec { from: to, to: from, directional: true, length: p.edge_len });
        } else {
            if is_demand {
                demand_idx.push(links.len());
            }
            links.push(LinkSpec { from, to, directional: false, length: p.edge_len });
        }
    }
    if demand_idx.is_empty() {
        return Err(GenError::DegenerateInstance);
    }

    let corners = [
        node_id(0, 0),
        node_id(p.rows - 1, p.cols - 1),
        node_id(0, p.cols - 1),
        node_id(p.rows - 1, 0),
    ];
    let depots = corners[..p.n_depots].to_vec();

    Ok((
        NetworkSpec { nodes, depots, links, sprinkling_rate: F::one() },
        demand_idx,
    ))
}
