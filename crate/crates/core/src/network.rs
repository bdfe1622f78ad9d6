//! Mixed road graph: directional arcs, non-directional edges, virtual depot
//! links, and the all-pairs deadhead distance matrix.
//!
//! Every link is traversable for deadheading (arcs only in their stated
//! direction); a subset of links carries a sprinkling demand. Depots enter
//! the link set as zero-length self-loops so routes can treat them
//! uniformly as "links".

use thiserror::Error;

use crate::scalar::Scalar;

/// Dense node index, assigned at construction.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct NodeId(pub u32);

/// Dense link index; real links first, one virtual depot link per depot
/// appended after.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct LinkId(pub u32);

impl NodeId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl LinkId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::fmt::Display for LinkId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum LinkKind {
    /// One-way street (median barrier); served and deadheaded from -> to only.
    DirectionalArc,
    /// Two-way street; served in either direction, deadheaded both ways.
    NonDirectionalEdge,
    /// Zero-length self-loop standing in for a depot.
    VirtualDepot,
}

#[derive(Clone, Debug)]
pub struct Link<F> {
    pub id: LinkId,
    pub from: NodeId,
    pub to: NodeId,
    pub length: F,
    pub kind: LinkKind,
    pub is_demand: bool,
    /// Liters-equivalent needed to sprinkle this link; zero unless it is a
    /// fixed demand link. Event-added links get their demand from
    /// [`MixedNetwork::service_demand`].
    pub water_demand: F,
}

/// Raw description consumed by [`build_network`]. Node ids are free-form
/// labels; construction maps them to dense indices.
#[derive(Clone, Debug)]
pub struct NetworkSpec<F> {
    pub nodes: Vec<NodeSpec<F>>,
    pub depots: Vec<u64>,
    pub links: Vec<LinkSpec<F>>,
    /// Liters-equivalent consumed per meter sprinkled. With the default of
    /// 1, tank capacity and demands are both in meters of serviceable
    /// street.
    pub sprinkling_rate: F,
}

#[derive(Clone, Debug)]
pub struct NodeSpec<F> {
    pub id: u64,
    pub coords: Option<(F, F)>,
}

#[derive(Clone, Debug)]
pub struct LinkSpec<F> {
    pub from: u64,
    pub to: u64,
    pub directional: bool,
    pub length: F,
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum NetworkError {
    #[error("duplicate node id {0}")]
    DuplicateId(u64),
    #[error("link {link} references unknown node {node}")]
    DanglingEndpoint { link: usize, node: u64 },
    #[error("no deadhead path between nodes {from} and {to}")]
    DisconnectedGraph { from: u64, to: u64 },
    #[error("network has no depot")]
    NoDepot,
    #[error("network has no demand link")]
    NoDemand,
    #[error("link {link} has non-positive length")]
    NonPositiveLength { link: usize },
    #[error("depot references unknown node {0}")]
    UnknownDepot(u64),
    #[error("demand index {0} is out of range")]
    UnknownDemandLink(usize),
    #[error("node {from} cannot reach node {to}")]
    Unreachable { from: u64, to: u64 },
}

/// Immutable after construction; shareable across concurrent solver runs.
#[derive(Clone, Debug)]
pub struct MixedNetwork<F> {
    n_nodes: usize,
    node_labels: Vec<u64>,
    coords: Vec<Option<(F, F)>>,
    depots: Vec<NodeId>,
    links: Vec<Link<F>>,
    n_real_links: usize,
    dist: Vec<F>,
    sprinkling_rate: F,
    max_demand_gap: F,
}

/// Floyd-Warshall over a directed arc list. Returns a row-major n x n
/// matrix, `infinity` for unreachable pairs, zero diagonal.
pub fn floyd_warshall<F: Scalar>(n: usize, arcs: &[(usize, usize, F)]) -> Vec<F> {
    let inf = F::infinity();
    let mut d = vec![inf; n * n];
    for i in 0..n {
        d[i * n + i] = F::zero();
    }
    for &(u, v, w) in arcs {
        if w < d[u * n + v] {
            d[u * n + v] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            if dik == inf {
                continue;
            }
            for j in 0..n {
                let via = dik + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    d
}

/// Builds the network: validates the spec, flags the demand set, appends
/// one virtual depot link per depot and computes the distance matrix.
/// `demand_links` holds indices into `spec.links`.
pub fn build_network<F: Scalar>(
    spec: &NetworkSpec<F>,
    demand_links: &[usize],
) -> Result<MixedNetwork<F>, NetworkError> {
    let n = spec.nodes.len();
    let mut label_to_idx = std::collections::HashMap::with_capacity(n);
    for (i, node) in spec.nodes.iter().enumerate() {
        if label_to_idx.insert(node.id, i).is_some() {
            return Err(NetworkError::DuplicateId(node.id));
        }
    }
    if spec.depots.is_empty() {
        return Err(NetworkError::NoDepot);
    }
    let mut depots = Vec::with_capacity(spec.depots.len());
    for &d in &spec.depots {
        let idx = *label_to_idx
            .get(&d)
            .ok_or(NetworkError::UnknownDepot(d))?;
        depots.push(NodeId(idx as u32));
    }

    let mut demand_flags = vec![false; spec.links.len()];
    for &i in demand_links {
        if i >= spec.links.len() {
            return Err(NetworkError::UnknownDemandLink(i));
        }
        demand_flags[i] = true;
    }
    if !demand_flags.iter().any(|&f| f) {
        return Err(NetworkError::NoDemand);
    }

    let mut links = Vec::with_capacity(spec.links.len() + depots.len());
    for (i, ls) in spec.links.iter().enumerate() {
        if !(ls.length > F::zero()) {
            return Err(NetworkError::NonPositiveLength { link: i });
        }
        let from = *label_to_idx
            .get(&ls.from)
            .ok_or(NetworkError::DanglingEndpoint { link: i, node: ls.from })?;
        let to = *label_to_idx
            .get(&ls.to)
            .ok_or(NetworkError::DanglingEndpoint { link: i, node: ls.to })?;
        let water = if demand_flags[i] {
            spec.sprinkling_rate * ls.length
        } else {
            F::zero()
        };
        links.push(Link {
            id: LinkId(i as u32),
            from: NodeId(from as u32),
            to: NodeId(to as u32),
            length: ls.length,
            kind: if ls.directional {
                LinkKind::DirectionalArc
            } else {
                LinkKind::NonDirectionalEdge
            },
            is_demand: demand_flags[i],
            water_demand: water,
        });
    }
    let n_real_links = links.len();
    for &d in &depots {
        let id = LinkId(links.len() as u32);
        links.push(Link {
            id,
            from: d,
            to: d,
            length: F::zero(),
            kind: LinkKind::VirtualDepot,
            is_demand: false,
            water_demand: F::zero(),
        });
    }

    let mut arcs = Vec::with_capacity(links.len() * 2);
    for l in &links {
        match l.kind {
            LinkKind::DirectionalArc => arcs.push((l.from.idx(), l.to.idx(), l.length)),
            LinkKind::NonDirectionalEdge => {
                arcs.push((l.from.idx(), l.to.idx(), l.length));
                arcs.push((l.to.idx(), l.from.idx(), l.length));
            }
            LinkKind::VirtualDepot => arcs.push((l.from.idx(), l.to.idx(), l.length)),
        }
    }
    let dist = floyd_warshall(n, &arcs);
    for i in 0..n {
        for j in 0..n {
            if dist[i * n + j] == F::infinity() {
                return Err(NetworkError::DisconnectedGraph {
                    from: spec.nodes[i].id,
                    to: spec.nodes[j].id,
                });
            }
        }
    }

    let mut net = MixedNetwork {
        n_nodes: n,
        node_labels: spec.nodes.iter().map(|n| n.id).collect(),
        coords: spec.nodes.iter().map(|n| n.coords).collect(),
        depots,
        links,
        n_real_links,
        dist,
        sprinkling_rate: spec.sprinkling_rate,
        max_demand_gap: F::zero(),
    };
    net.max_demand_gap = net.compute_max_demand_gap();
    Ok(net)
}

impl<F: Scalar> MixedNetwork<F> {
    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn node_label(&self, node: NodeId) -> u64 {
        self.node_labels[node.idx()]
    }

    pub fn node_by_label(&self, label: u64) -> Option<NodeId> {
        self.node_labels
            .iter()
            .position(|&l| l == label)
            .map(|i| NodeId(i as u32))
    }

    pub fn coords(&self, node: NodeId) -> Option<(F, F)> {
        self.coords[node.idx()]
    }

    pub fn depots(&self) -> &[NodeId] {
        &self.depots
    }

    pub fn links(&self) -> &[Link<F>] {
        &self.links
    }

    pub fn real_links(&self) -> &[Link<F>] {
        &self.links[..self.n_real_links]
    }

    pub fn link(&self, id: LinkId) -> &Link<F> {
        &self.links[id.idx()]
    }

    pub fn demand_links(&self) -> impl Iterator<Item = &Link<F>> {
        self.links.iter().filter(|l| l.is_demand)
    }

    pub fn sprinkling_rate(&self) -> F {
        self.sprinkling_rate
    }

    /// Water needed to sprinkle `link` once, whether or not it belongs to
    /// the fixed demand set.
    pub fn service_demand(&self, link: LinkId) -> F {
        let l = self.link(link);
        match l.kind {
            LinkKind::VirtualDepot => F::zero(),
            _ => self.sprinkling_rate * l.length,
        }
    }

    pub fn total_fixed_demand(&self) -> F {
        self.demand_links()
            .fold(F::zero(), |acc, l| acc + l.water_demand)
    }

    /// Shortest deadhead distance between two nodes.
    pub fn dist(&self, from: NodeId, to: NodeId) -> F {
        self.dist[from.idx() * self.n_nodes + to.idx()]
    }

    pub fn dist_matrix(&self) -> &[F] {
        &self.dist
    }

    /// Serving orientations of a link: `(start, end)` node pairs.
    pub fn orientations(&self, link: LinkId) -> impl Iterator<Item = (NodeId, NodeId)> {
        let l = self.link(link);
        let both = matches!(l.kind, LinkKind::NonDirectionalEdge);
        let fwd = Some((l.from, l.to));
        let rev = if both { Some((l.to, l.from)) } else { None };
        fwd.into_iter().chain(rev)
    }

    /// Shortest deadhead from `node` to any serving start of `link`.
    pub fn node_to_link(&self, node: NodeId, link: LinkId) -> F {
        self.orientations(link)
            .map(|(s, _)| self.dist(node, s))
            .fold(F::infinity(), F::min)
    }

    /// Shortest deadhead from the serving end of `a` to the serving start
    /// of `b`, minimized over both links' orientations.
    pub fn link_gap(&self, a: LinkId, b: LinkId) -> F {
        let mut best = F::infinity();
        for (_, ea) in self.orientations(a) {
            for (sb, _) in self.orientations(b) {
                best = best.min(self.dist(ea, sb));
            }
        }
        best
    }

    /// Largest link-to-link gap over the fixed demand set; the noise
    /// amplitude reference for the randomized repair operators.
    pub fn max_demand_gap(&self) -> F {
        self.max_demand_gap
    }

    fn compute_max_demand_gap(&self) -> F {
        let demand: Vec<LinkId> = self.demand_links().map(|l| l.id).collect();
        let mut max = F::zero();
        for &a in &demand {
            for &b in &demand {
                if a != b {
                    max = max.max(self.link_gap(a, b));
                }
            }
        }
        max
    }
}

/// Recomputes the all-pairs matrix from the stored links. Construction
/// already ran this; the standalone form exists so callers can cross-check
/// a network against its own link list.
pub fn all_pairs_shortest<F: Scalar>(net: &MixedNetwork<F>) -> Result<Vec<F>, NetworkError> {
    let n = net.n_nodes();
    let mut arcs = Vec::new();
    for l in net.links() {
        match l.kind {
            LinkKind::DirectionalArc | LinkKind::VirtualDepot => {
                arcs.push((l.from.idx(), l.to.idx(), l.length))
            }
            LinkKind::NonDirectionalEdge => {
                arcs.push((l.from.idx(), l.to.idx(), l.length));
                arcs.push((l.to.idx(), l.from.idx(), l.length));
            }
        }
    }
    let d = floyd_warshall(n, &arcs);
    for i in 0..n {
        for j in 0..n {
            if d[i * n + j] == F::infinity() {
                return Err(NetworkError::Unreachable {
                    from: net.node_label(NodeId(i as u32)),
                    to: net.node_label(NodeId(j as u32)),
                });
            }
        }
    }
    Ok(d)
}


#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn minimal_network_gets_virtual_links() {
        let net = two_node_net();
        // 2 real links + 1 virtual depot loop
        assert_eq!(net.links().len(), 3);
        assert_eq!(net.real_links().len(), 2);
        let virt = &net.links()[2];
        assert_eq!(virt.kind, LinkKind::VirtualDepot);
        assert_eq!(virt.from, virt.to);
        assert_eq!(virt.length, 0.0);
        assert!(!virt.is_demand);
        assert_eq!(net.demand_links().count(), 1);
    }

    #[test]
    fn dangling_endpoint_rejected() {
        let mut spec = path_spec(&[100.0]);
        spec.links.push(LinkSpec { from: 0, to: 99, directional: false, length: 5.0 });
        let err = build_network(&spec, &[0]).unwrap_err();
        assert_eq!(err, NetworkError::DanglingEndpoint { link: 1, node: 99 });
    }

    #[test]
    fn validation_errors() {
        let spec = path_spec(&[100.0]);
        assert_eq!(build_network(&spec, &[]).unwrap_err(), NetworkError::NoDemand);

        let mut nodepot = spec.clone();
        nodepot.depots.clear();
        assert_eq!(build_network(&nodepot, &[0]).unwrap_err(), NetworkError::NoDepot);

        let mut dup = spec.clone();
        dup.nodes.push(NodeSpec { id: 0, coords: None });
        assert_eq!(build_network(&dup, &[0]).unwrap_err(), NetworkError::DuplicateId(0));

        let mut zero = spec.clone();
        zero.links[0].length = 0.0;
        assert_eq!(
            build_network(&zero, &[0]).unwrap_err(),
            NetworkError::NonPositiveLength { link: 0 }
        );

        let mut disc = spec;
        disc.nodes.push(NodeSpec { id: 77, coords: None });
        assert!(matches!(
            build_network(&disc, &[0]).unwrap_err(),
            NetworkError::DisconnectedGraph { .. }
        ));
    }

    #[test]
    fn path_distances() {
        let spec = path_spec(&[100.0, 50.0]);
        let net = build_network(&spec, &[0]).unwrap();
        let a = net.node_by_label(0).unwrap();
        let c = net.node_by_label(2).unwrap();
        assert_eq!(net.dist(a, c), 150.0);
        assert_eq!(net.dist(c, a), 150.0);
        assert_eq!(net.dist(a, a), 0.0);
    }

    #[test]
    fn triangle_shortcuts_long_edge() {
        let spec = NetworkSpec {
            nodes: (0..3u64).map(|id| NodeSpec { id, coords: None }).collect(),
            depots: vec![0],
            links: vec![
                LinkSpec { from: 0, to: 1, directional: false, length: 100.0 },
                LinkSpec { from: 1, to: 2, directional: false, length: 100.0 },
                LinkSpec { from: 0, to: 2, directional: false, length: 250.0 },
            ],
            sprinkling_rate: 1.0,
        };
        let net = build_network(&spec, &[0]).unwrap();
        let a = net.node_by_label(0).unwrap();
        let c = net.node_by_label(2).unwrap();
        // the 250 m edge is dominated by the 100+100 path
        assert_eq!(net.dist(a, c), 200.0);
    }

    #[test]
    fn deadhead_same_node_is_zero() {
        let net = two_node_net();
        let d = net.depots()[0];
        assert_eq!(net.dist(d, d), 0.0);
    }

    #[test]
    fn deadhead_from_depot_virtual_to_adjacent_demand() {
        // depot 0 -- 80 m edge -- node 1, demand arc 1 -> 2
        let spec = NetworkSpec {
            nodes: (0..3u64).map(|id| NodeSpec { id, coords: None }).collect(),
            depots: vec![0],
            links: vec![
                LinkSpec { from: 0, to: 1, directional: false, length: 80.0 },
                LinkSpec { from: 1, to: 2, directional: true, length: 120.0 },
                LinkSpec { from: 2, to: 0, directional: false, length: 60.0 },
            ],
            sprinkling_rate: 1.0,
        };
        let net = build_network(&spec, &[1]).unwrap();
        let depot = net.depots()[0];
        assert_eq!(net.node_to_link(depot, LinkId(1)), 80.0);
    }

    #[test]
    fn reverse_orientation_uses_actual_end_node() {
        // path 0 -100- 1 -50- 2; serving edge (1,2) in reverse ends at 1
        let spec = path_spec(&[100.0, 50.0]);
        let net = build_network(&spec, &[1]).unwrap();
        let n0 = net.node_by_label(0).unwrap();
        let n1 = net.node_by_label(1).unwrap();
        let n2 = net.node_by_label(2).unwrap();
        // forward orientation of link 1 runs 1 -> 2, reverse runs 2 -> 1
        let mut orients = net.orientations(LinkId(1));
        assert_eq!(orients.next(), Some((n1, n2)));
        assert_eq!(orients.next(), Some((n2, n1)));
        assert_eq!(net.dist(n1, n0), 100.0);
        assert_eq!(net.dist(n2, n0), 150.0);
    }

    #[test]
    fn directional_arc_deadheads_one_way() {
        // cycle: arc 0 -> 1 (100), edge 1 - 2 (50), arc 2 -> 0 (70)
        let spec = NetworkSpec {
            nodes: (0..3u64).map(|id| NodeSpec { id, coords: None }).collect(),
            depots: vec![0],
            links: vec![
                LinkSpec { from: 0, to: 1, directional: true, length: 100.0 },
                LinkSpec { from: 1, to: 2, directional: false, length: 50.0 },
                LinkSpec { from: 2, to: 0, directional: true, length: 70.0 },
            ],
            sprinkling_rate: 1.0,
        };
        let net = build_network(&spec, &[0]).unwrap();
        let n0 = net.node_by_label(0).unwrap();
        let n1 = net.node_by_label(1).unwrap();
        assert_eq!(net.dist(n0, n1), 100.0);
        // back against the arc: via edge and the return arc
        assert_eq!(net.dist(n1, n0), 120.0);
    }

    #[test]
    fn edge_pair_gap_symmetric_for_non_directional_links() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let net = random_connected(&mut rng, 12, false);
            let demand: Vec<LinkId> = net.demand_links().map(|l| l.id).collect();
            for &a in &demand {
                for &b in &demand {
                    let g1 = net.link_gap(a, b);
                    let g2 = net.link_gap(b, a);
                    assert_eq!(g1, g2, "gap asymmetry for undirected pair");
                }
            }
        }
    }

    #[test]
    fn virtual_links_change_no_distance() {
        let spec = path_spec(&[100.0, 50.0, 25.0]);
        let net = build_network(&spec, &[0]).unwrap();
        // recompute including the virtual self-loops; must equal the
        // stored matrix exactly
        let again = all_pairs_shortest(&net).unwrap();
        assert_eq!(again, net.dist_matrix().to_vec());
    }

    /// Random connected graph with integer lengths; used by the
    /// Dijkstra-vs-Floyd-Warshall oracle checks.
    pub(crate) fn random_connected(
        rng: &mut ChaCha8Rng,
        max_nodes: usize,
        with_arcs: bool,
    ) -> MixedNetwork<f64> {
        let n = rng.random_range(2..=max_nodes.max(2));
        let mut links = Vec::new();
        // spanning tree of undirected edges keeps every node reachable
        for i in 1..n {
            let parent = rng.random_range(0..i);
            links.push(LinkSpec {
                from: parent as u64,
                to: i as u64,
                directional: false,
                length: rng.random_range(1..=500) as f64,
            });
        }
        let extra = rng.random_range(0..=n);
        for _ in 0..extra {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if a == b {
                continue;
            }
            links.push(LinkSpec {
                from: a as u64,
                to: b as u64,
                directional: with_arcs && rng.random_range(0..2) == 0,
                length: rng.random_range(1..=500) as f64,
            });
        }
        let spec = NetworkSpec {
            nodes: (0..n as u64).map(|id| NodeSpec { id, coords: None }).collect(),
            depots: vec![0],
            links,
            sprinkling_rate: 1.0,
        };
        let n_links = spec.links.len();
        build_network(&spec, &(0..n_links).collect::<Vec<_>>()).unwrap()
    }

    /// Binary-heap Dijkstra used only as an oracle.
    pub(crate) fn dijkstra_row(net: &MixedNetwork<f64>, src: NodeId) -> Vec<f64> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;
        let n = net.n_nodes();
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for l in net.links() {
            match l.kind {
                LinkKind::DirectionalArc | LinkKind::VirtualDepot => {
                    adj[l.from.idx()].push((l.to.idx(), l.length));
                }
                LinkKind::NonDirectionalEdge => {
                    adj[l.from.idx()].push((l.to.idx(), l.length));
                    adj[l.to.idx()].push((l.from.idx(), l.length));
                }
            }
        }
        let mut dist = vec![f64::INFINITY; n];
        dist[src.idx()] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((ordered(0.0), src.idx())));
        while let Some(Reverse((d, u))) = heap.pop() {
            let d = f64::from_bits(d);
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &adj[u] {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Reverse((ordered(nd), v)));
                }
            }
        }
        dist
    }

    // non-negative floats order the same as their IEEE bit patterns
    fn ordered(v: f64) -> u64 {
        v.to_bits()
    }

    #[test]
    fn floyd_warshall_matches_dijkstra_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let net = random_connected(&mut rng, 50, true);
            let n = net.n_nodes();
            for i in 0..n {
                let row = dijkstra_row(&net, NodeId(i as u32));
                for j in 0..n {
                    assert_eq!(
                        net.dist(NodeId(i as u32), NodeId(j as u32)),
                        row[j],
                        "mismatch at ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn accepts_city_scale_counts() {
        // 210 vertices, 178 arcs, 235 edges; spanning path keeps it connected
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 210u64;
        let mut links = Vec::new();
        for i in 1..n {
            links.push(LinkSpec {
                from: i - 1,
                to: i,
                directional: false,
                length: rng.random_range(50..300) as f64,
            });
        }
        while links.len() < 235 {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if a != b {
                links.push(LinkSpec { from: a, to: b, directional: false, length: 100.0 });
            }
        }
        for _ in 0..178 {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if a != b {
                links.push(LinkSpec { from: a, to: b, directional: true, length: 100.0 });
            } else {
                links.push(LinkSpec { from: a, to: (a + 1) % n, directional: true, length: 100.0 });
            }
        }
        assert_eq!(links.len(), 413);
        let spec = NetworkSpec {
            nodes: (0..n).map(|id| NodeSpec { id, coords: None }).collect(),
            depots: vec![0, 105],
            links,
            sprinkling_rate: 1.0,
        };
        let demand: Vec<usize> = (0..413).step_by(3).collect();
        let net = build_network(&spec, &demand).unwrap();
        assert_eq!(net.links().len(), 413 + 2);
    }
}
