//! Port graphs: vertices with ordered coin slots and a shift permutation.
//!
//! The walk state lives on (vertex, coin slot) pairs laid out flat as
//! `vertex * coin_dim + slot`. Every vertex owns `coin_dim` slots, but only
//! the slots listed in its port list are edges; the remaining slots are
//! padding and the shift leaves them in place.
//!
//! Coin slot orderings per family:
//! - line and plain cycle: (L, R), moving left and right;
//! - Cartesian lattice: (−x, +x, −y, +y);
//! - triangular lattice: six axial directions counterclockwise from +x,
//!   (1,0), (1,1), (0,1), (−1,0), (−1,−1), (0,−1);
//! - diagonal lattice: Cartesian order, then (−1,−1), (1,1), (−1,1), (1,−1);
//! - cycle with diagonals and K_{d,d}: labels (−1, +1, −3, +3, …).
//!
//! Line and plain cycle shifts keep the coin index; lattices keep it by
//! default and can instead use the flip-flop rule, where the walker arrives
//! on the slot pointing back along the edge it crossed. Labelled graphs
//! (cycle with diagonals, bipartite, glued trees) always send a walker to
//! the port at the far end of the same edge.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, ONE};

const GLUE_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticeKind {
    Cartesian4,
    Triangular6,
    Diagonal8,
}

impl LatticeKind {
    pub fn directions(self) -> &'static [(i64, i64)] {
        match self {
            LatticeKind::Cartesian4 => &[(-1, 0), (1, 0), (0, -1), (0, 1)],
            LatticeKind::Triangular6 => &[(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)],
            LatticeKind::Diagonal8 => &[
                (-1, 0),
                (1, 0),
                (0, -1),
                (0, 1),
                (-1, -1),
                (1, 1),
                (-1, 1),
                (1, -1),
            ],
        }
    }

    pub fn degree(self) -> usize {
        self.directions().len()
    }

    /// Slot of the direction opposite to slot `c`.
    pub fn opposite(self, c: usize) -> usize {
        let (dx, dy) = self.directions()[c];
        self.directions()
            .iter()
            .position(|&d| d == (-dx, -dy))
            .expect("direction sets are symmetric")
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LatticeKind::Cartesian4 => "cart4",
            LatticeKind::Triangular6 => "tri6",
            LatticeKind::Diagonal8 => "diag8",
        })
    }
}

impl FromStr for LatticeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cart4" | "cartesian4" | "cartesian" => Ok(LatticeKind::Cartesian4),
            "tri6" | "triangular6" | "triangular" => Ok(LatticeKind::Triangular6),
            "diag8" | "diagonal8" | "diagonal" => Ok(LatticeKind::Diagonal8),
            other => Err(Error::parse("graph", format!("unknown lattice kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Labeling {
    /// Proper edge colouring: both ends of an edge carry the same label,
    /// colours otherwise assigned at random.
    RandomConsistent,
    /// Label 0 on the parent-direction port, children 1..=B in order.
    RegularRootZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GluedTreesSpec {
    pub branching: usize,
    pub depth: usize,
    pub seed: u64,
    pub labeling: Labeling,
}

impl GluedTreesSpec {
    pub fn new(branching: usize, depth: usize, seed: u64, labeling: Labeling) -> Self {
        Self {
            branching,
            depth,
            seed,
            labeling,
        }
    }

    pub fn vertex_count(&self) -> usize {
        2 * (self.branching.pow(self.depth as u32 + 1) - 1) / (self.branching - 1)
    }

    pub fn column_count(&self) -> usize {
        2 * self.depth + 2
    }
}

/// Where a lattice shift leaves the coin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LatticeShift {
    /// `|c, r⟩ → |c, r + e_c⟩`
    #[default]
    Moving,
    /// `|c, r⟩ → |c̄, r + e_c⟩` with `c̄` the opposite direction.
    FlipFlop,
}

impl fmt::Display for LatticeShift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LatticeShift::Moving => "move",
            LatticeShift::FlipFlop => "flip",
        })
    }
}

impl FromStr for LatticeShift {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "move" | "moving" => Ok(LatticeShift::Moving),
            "flip" | "flipflop" | "flip-flop" => Ok(LatticeShift::FlipFlop),
            other => Err(Error::parse("shift", format!("unknown lattice shift '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphFamily {
    Line { radius: usize },
    Lattice { kind: LatticeKind, half_width: usize, shift: LatticeShift },
    Cycle { n: usize },
    CycleDiag { n: usize },
    Bipartite { d: usize },
    GluedTrees(GluedTreesSpec),
}

#[derive(Debug, Clone)]
pub struct PortGraph {
    family: GraphFamily,
    coin_dim: usize,
    ports: Vec<Vec<usize>>,
    shift: Vec<usize>,
    positions: Option<Vec<(i64, i64)>>,
    columns: Option<Vec<usize>>,
    slot_labels: Option<Vec<i64>>,
}

impl PortGraph {
    pub fn family(&self) -> &GraphFamily {
        &self.family
    }

    pub fn vertex_count(&self) -> usize {
        self.ports.len()
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    pub fn state_dim(&self) -> usize {
        self.vertex_count() * self.coin_dim
    }

    pub fn degree(&self, v: usize) -> usize {
        self.ports[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.ports.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Used coin slots at `v`, in coin order.
    pub fn ports(&self, v: usize) -> &[usize] {
        &self.ports[v]
    }

    /// Flat shift permutation over `vertex * coin_dim + slot`.
    pub fn shift_permutation(&self) -> &[usize] {
        &self.shift
    }

    /// Where amplitude on an occupied slot moves; `None` for padding slots.
    pub fn shift_target(&self, v: usize, c: usize) -> Option<(usize, usize)> {
        if !self.ports[v].contains(&c) {
            return None;
        }
        let t = self.shift[v * self.coin_dim + c];
        Some((t / self.coin_dim, t % self.coin_dim))
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.ports[v]
            .iter()
            .map(move |&c| self.shift[v * self.coin_dim + c] / self.coin_dim)
    }

    /// Undirected edge list with `u < w`, each edge once.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut set = BTreeSet::new();
        for v in 0..self.vertex_count() {
            for w in self.neighbors(v) {
                set.insert((v.min(w), v.max(w)));
            }
        }
        set.into_iter().collect()
    }

    /// Shift is a bijection of the flat slot space that maps occupied slots
    /// onto occupied slots.
    pub fn is_shift_permutation(&self) -> bool {
        let n = self.shift.len();
        let mut seen = vec![false; n];
        for &t in &self.shift {
            if t >= n || seen[t] {
                return false;
            }
            seen[t] = true;
        }
        (0..self.vertex_count()).all(|v| {
            self.ports[v].iter().all(|&c| {
                let t = self.shift[v * self.coin_dim + c];
                self.ports[t / self.coin_dim].contains(&(t % self.coin_dim))
            })
        })
    }

    /// Dense permutation matrix of the shift (small graphs only).
    pub fn shift_matrix(&self) -> ComplexMatrix {
        let n = self.state_dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for (from, &to) in self.shift.iter().enumerate() {
            m[(to, from)] = ONE;
        }
        m
    }

    /// Lattice or line coordinates of `v`.
    pub fn position(&self, v: usize) -> Option<(i64, i64)> {
        self.positions.as_ref().map(|p| p[v])
    }

    pub fn vertex_at(&self, x: i64, y: i64) -> Option<usize> {
        let positions = self.positions.as_ref()?;
        match self.family {
            GraphFamily::Line { radius } => {
                let r = radius as i64;
                (y == 0 && x.abs() <= r).then(|| (x + r) as usize)
            }
            GraphFamily::Lattice { half_width, .. } => {
                let h = half_width as i64;
                let side = 2 * h + 1;
                (x.abs() <= h && y.abs() <= h).then(|| ((y + h) * side + (x + h)) as usize)
            }
            _ => positions.iter().position(|&p| p == (x, y)),
        }
    }

    /// The origin of a line or lattice window.
    pub fn center(&self) -> Option<usize> {
        self.vertex_at(0, 0)
    }

    /// Distance from the origin to the window edge, for line and lattice.
    pub fn half_width(&self) -> Option<usize> {
        match self.family {
            GraphFamily::Line { radius } => Some(radius),
            GraphFamily::Lattice { half_width, .. } => Some(half_width),
            _ => None,
        }
    }

    /// Vertices on the outer ring of a line or lattice window.
    pub fn boundary(&self) -> Vec<usize> {
        let Some(h) = self.half_width() else {
            return Vec::new();
        };
        let h = h as i64;
        (0..self.vertex_count())
            .filter(|&v| {
                let (x, y) = self.position(v).expect("windowed family");
                x.abs() == h || y.abs() == h
            })
            .collect()
    }

    /// Glued-trees column index of `v`.
    pub fn column(&self, v: usize) -> Option<usize> {
        self.columns.as_ref().map(|c| c[v])
    }

    pub fn column_count(&self) -> Option<usize> {
        self.columns
            .as_ref()
            .map(|c| c.iter().copied().max().unwrap_or(0) + 1)
    }

    /// Edge label carried by a coin slot on cycle-type graphs.
    pub fn slot_label(&self, c: usize) -> Option<i64> {
        self.slot_labels.as_ref().map(|l| l[c])
    }

    pub fn entrance(&self) -> Option<usize> {
        matches!(self.family, GraphFamily::GluedTrees(_)).then_some(0)
    }

    pub fn exit(&self) -> Option<usize> {
        matches!(self.family, GraphFamily::GluedTrees(_)).then(|| self.vertex_count() - 1)
    }

    /// `layers[t]` holds the vertices reachable in exactly `t` steps from
    /// `start`, sorted.
    pub fn reachable_layers(&self, start: usize, max_steps: usize) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut layers = vec![vec![start]];
        let mut mark = vec![usize::MAX; n];
        for t in 1..=max_steps {
            let mut next = Vec::new();
            for &v in &layers[t - 1] {
                for w in self.neighbors(v) {
                    if mark[w] != t {
                        mark[w] = t;
                        next.push(w);
                    }
                }
            }
            next.sort_unstable();
            layers.push(next);
        }
        layers
    }
}

fn positive(name: &str, value: usize, min: usize) -> Result<()> {
    if value < min {
        return Err(Error::Parameter(format!("{name}={value} must be at least {min}")));
    }
    Ok(())
}

/// Path of `2·radius + 1` sites, coin (L, R). The ends wrap so the shift
/// stays a permutation; walks of at most `radius` steps never see it.
pub fn build_line(radius: usize) -> Result<PortGraph> {
    positive("radius", radius, 1)?;
    let n = 2 * radius + 1;
    let mut shift = vec![0; 2 * n];
    for i in 0..n {
        shift[2 * i] = 2 * ((i + n - 1) % n);
        shift[2 * i + 1] = 2 * ((i + 1) % n) + 1;
    }
    Ok(PortGraph {
        family: GraphFamily::Line { radius },
        coin_dim: 2,
        ports: vec![vec![0, 1]; n],
        shift,
        positions: Some((0..n).map(|i| (i as i64 - radius as i64, 0)).collect()),
        columns: None,
        slot_labels: None,
    })
}

/// Square window of side `2·half_width + 1` on the given lattice, wrapped
/// as a torus, with the coin-preserving shift. Walks of at most
/// `half_width − 1` steps from the centre never reach the boundary ring.
pub fn build_lattice(kind: LatticeKind, half_width: usize) -> Result<PortGraph> {
    build_lattice_with(kind, half_width, LatticeShift::Moving)
}

pub fn build_lattice_with(kind: LatticeKind, half_width: usize, rule: LatticeShift) -> Result<PortGraph> {
    positive("half_width", half_width, 1)?;
    let h = half_width as i64;
    let side = 2 * h + 1;
    let n = (side * side) as usize;
    let dirs = kind.directions();
    let d = dirs.len();
    let wrap = |z: i64| (z + h).rem_euclid(side) - h;
    let index = |x: i64, y: i64| ((y + h) * side + (x + h)) as usize;

    let positions: Vec<(i64, i64)> = (0..n as i64)
        .map(|i| (i % side - h, i / side - h))
        .collect();
    let mut shift = vec![0; n * d];
    for (v, &(x, y)) in positions.iter().enumerate() {
        for (c, &(dx, dy)) in dirs.iter().enumerate() {
            let arrive = match rule {
                LatticeShift::Moving => c,
                LatticeShift::FlipFlop => kind.opposite(c),
            };
            shift[v * d + c] = index(wrap(x + dx), wrap(y + dy)) * d + arrive;
        }
    }
    Ok(PortGraph {
        family: GraphFamily::Lattice {
            kind,
            half_width,
            shift: rule,
        },
        coin_dim: d,
        ports: vec![(0..d).collect(); n],
        shift,
        positions: Some(positions),
        columns: None,
        slot_labels: None,
    })
}

/// N-cycle with the line's (L, R) coin and coin-preserving shift.
pub fn build_cycle(n: usize) -> Result<PortGraph> {
    positive("N", n, 3)?;
    let mut shift = vec![0; 2 * n];
    for v in 0..n {
        shift[2 * v] = 2 * ((v + n - 1) % n);
        shift[2 * v + 1] = 2 * ((v + 1) % n) + 1;
    }
    Ok(PortGraph {
        family: GraphFamily::Cycle { n },
        coin_dim: 2,
        ports: vec![vec![0, 1]; n],
        shift,
        positions: Some((0..n).map(|v| (v as i64, 0)).collect()),
        columns: None,
        slot_labels: None,
    })
}

/// Even cycle with opposite vertices joined; labels ±1 and ±N/2.
pub fn build_cycle_diag(n: usize) -> Result<PortGraph> {
    positive("N", n, 4)?;
    if n % 2 != 0 {
        return Err(Error::Parameter(format!("cycle with diagonals needs even N, got {n}")));
    }
    labelled_cycle(GraphFamily::CycleDiag { n }, n, &[1], Some(n as i64 / 2))
}

/// Complete bipartite K_{d,d} on 2d vertices (odd differences are edges).
pub fn build_bipartite(d: usize) -> Result<PortGraph> {
    positive("d", d, 2)?;
    let n = 2 * d;
    let paired: Vec<i64> = (1..d as i64).step_by(2).collect();
    let diameter = (d % 2 == 1).then_some(d as i64);
    labelled_cycle(GraphFamily::Bipartite { d }, n, &paired, diameter)
}

// Consistently labelled circulant graph: slot pairs (−ℓ, +ℓ) for each entry of
// `paired`, then an optional diameter label split into (−h, +h) where vertices
// below h use +h and the rest −h. Shift: |ℓ, v⟩ → |−ℓ, v + ℓ mod n⟩.
fn labelled_cycle(
    family: GraphFamily,
    n: usize,
    paired: &[i64],
    diameter: Option<i64>,
) -> Result<PortGraph> {
    let mut labels = Vec::new();
    for &l in paired.iter().chain(diameter.iter()) {
        labels.push(-l);
        labels.push(l);
    }
    let coin_dim = labels.len();
    let slot_of = |label: i64| labels.iter().position(|&l| l == label).expect("label");

    let ports: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            (0..coin_dim)
                .filter(|&c| match diameter {
                    Some(h) if labels[c].abs() == h => {
                        (labels[c] > 0) == ((v as i64) < h)
                    }
                    _ => true,
                })
                .collect()
        })
        .collect();

    let mut shift: Vec<usize> = (0..n * coin_dim).collect();
    for (v, vp) in ports.iter().enumerate() {
        for &c in vp {
            let target = (v as i64 + labels[c]).rem_euclid(n as i64) as usize;
            shift[v * coin_dim + c] = target * coin_dim + slot_of(-labels[c]);
        }
    }
    Ok(PortGraph {
        family,
        coin_dim,
        ports,
        shift,
        positions: Some((0..n).map(|v| (v as i64, 0)).collect()),
        columns: None,
        slot_labels: Some(labels),
    })
}

/// Two complete B-ary trees of depth N whose leaves are joined by a random
/// B-regular simple bipartite glue (a union of B perfect matchings).
///
/// Vertex ids run column by column: the entrance is 0 and the exit is the
/// last vertex.
pub fn build_glued_trees(spec: GluedTreesSpec) -> Result<PortGraph> {
    let b = spec.branching;
    let depth = spec.depth;
    positive("B", b, 2)?;
    positive("N", depth, 1)?;

    let pow = |j: usize| b.pow(j as u32);
    let left_size = (pow(depth + 1) - 1) / (b - 1);
    let n = 2 * left_size;
    let last_col = 2 * depth + 1;
    // first vertex id of each column
    let mut col_start = vec![0; last_col + 2];
    for col in 0..=last_col {
        let width = pow(if col <= depth { col } else { last_col - col });
        col_start[col + 1] = col_start[col] + width;
    }
    let columns: Vec<usize> = (0..=last_col)
        .flat_map(|col| std::iter::repeat(col).take(col_start[col + 1] - col_start[col]))
        .collect();

    // parent[v] and ordered child lists; "children" of a leaf are glue partners.
    let mut parent = vec![usize::MAX; n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for col in 0..depth {
        for k in 0..pow(col) {
            let v = col_start[col] + k;
            for m in 0..b {
                let c = col_start[col + 1] + k * b + m;
                parent[c] = v;
                children[v].push(c);
            }
        }
    }
    for col in depth + 2..=last_col {
        for k in 0..pow(last_col - col) {
            let v = col_start[col] + k;
            for m in 0..b {
                let c = col_start[col - 1] + k * b + m;
                parent[c] = v;
                children[v].push(c);
            }
        }
    }

    let leaves = pow(depth);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut partners: Vec<Vec<usize>> = vec![Vec::with_capacity(b); leaves];
    for _ in 0..b {
        let mut perm: Vec<usize> = (0..leaves).collect();
        let mut accepted = false;
        for _ in 0..GLUE_ATTEMPTS {
            perm.shuffle(&mut rng);
            if perm.iter().enumerate().all(|(i, p)| !partners[i].contains(p)) {
                accepted = true;
                break;
            }
        }
        if !accepted {
            return Err(Error::Generation(format!(
                "no simple glue matching after {GLUE_ATTEMPTS} attempts (B={b}, N={depth})"
            )));
        }
        for (i, &p) in perm.iter().enumerate() {
            partners[i].push(p);
        }
    }
    let left_leaf0 = col_start[depth];
    let right_leaf0 = col_start[depth + 1];
    for (i, ps) in partners.iter().enumerate() {
        for &p in ps {
            children[left_leaf0 + i].push(right_leaf0 + p);
            children[right_leaf0 + p].push(left_leaf0 + i);
        }
    }

    let coin_dim = b + 1;
    let (ports, shift) = match spec.labeling {
        Labeling::RegularRootZero => regular_labels(&parent, &children, coin_dim),
        Labeling::RandomConsistent => {
            let mut label_rng = ChaCha8Rng::seed_from_u64(spec.seed);
            label_rng.set_stream(1);
            consistent_labels(&parent, &children, coin_dim, &mut label_rng)?
        }
    };
    Ok(PortGraph {
        family: GraphFamily::GluedTrees(spec),
        coin_dim,
        ports,
        shift,
        positions: None,
        columns: Some(columns),
        slot_labels: None,
    })
}

fn neighbor_list(parent: &[usize], children: &[Vec<usize>], v: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(children[v].len() + 1);
    if parent[v] != usize::MAX {
        out.push(parent[v]);
    }
    out.extend_from_slice(&children[v]);
    out
}

fn regular_labels(
    parent: &[usize],
    children: &[Vec<usize>],
    coin_dim: usize,
) -> (Vec<Vec<usize>>, Vec<usize>) {
    let n = parent.len();
    // slot of neighbour w at v
    let slot = |v: usize, w: usize| -> usize {
        if parent[v] == w {
            0
        } else {
            1 + children[v].iter().position(|&c| c == w).expect("adjacent")
        }
    };
    let ports: Vec<Vec<usize>> = (0..n)
        .map(|v| neighbor_list(parent, children, v).iter().map(|&w| slot(v, w)).collect())
        .collect();
    let mut shift: Vec<usize> = (0..n * coin_dim).collect();
    for v in 0..n {
        for w in neighbor_list(parent, children, v) {
            shift[v * coin_dim + slot(v, w)] = w * coin_dim + slot(w, v);
        }
    }
    let ports = ports
        .into_iter()
        .map(|mut p| {
            p.sort_unstable();
            p
        })
        .collect();
    (ports, shift)
}

// Proper (B+1)-edge-colouring of the bipartite glued-trees graph via
// alternating-path recolouring; edge order and initial colour choices are
// randomised.
fn consistent_labels(
    parent: &[usize],
    children: &[Vec<usize>],
    coin_dim: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Vec<usize>>, Vec<usize>)> {
    let n = parent.len();
    let mut edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|v| {
            neighbor_list(parent, children, v)
                .into_iter()
                .filter(move |&w| v < w)
                .map(move |w| (v, w))
        })
        .collect();
    edges.shuffle(rng);

    let mut at: Vec<Vec<Option<usize>>> = vec![vec![None; coin_dim]; n];
    for (u, w) in edges {
        let free_u: Vec<usize> = (0..coin_dim).filter(|&c| at[u][c].is_none()).collect();
        let alpha = *free_u
            .get(rng.gen_range(0..free_u.len().max(1)))
            .ok_or_else(|| Error::Generation("vertex degree exceeds colour count".into()))?;
        if at[w][alpha].is_some() {
            let beta = (0..coin_dim)
                .find(|&c| at[w][c].is_none())
                .ok_or_else(|| Error::Generation("vertex degree exceeds colour count".into()))?;
            // Swap alpha/beta along the alternating path from w; bipartiteness
            // keeps u off the path.
            let mut path = Vec::new();
            let mut colour = alpha;
            let mut cur = w;
            while let Some(next) = at[cur][colour] {
                path.push((cur, next, colour));
                cur = next;
                colour = if colour == alpha { beta } else { alpha };
            }
            for &(x, y, c) in &path {
                at[x][c] = None;
                at[y][c] = None;
            }
            for &(x, y, c) in &path {
                let flipped = if c == alpha { beta } else { alpha };
                at[x][flipped] = Some(y);
                at[y][flipped] = Some(x);
            }
        }
        at[u][alpha] = Some(w);
        at[w][alpha] = Some(u);
    }

    let ports: Vec<Vec<usize>> = at
        .iter()
        .map(|slots| (0..coin_dim).filter(|&c| slots[c].is_some()).collect())
        .collect();
    let mut shift: Vec<usize> = (0..n * coin_dim).collect();
    for v in 0..n {
        for c in 0..coin_dim {
            if let Some(w) = at[v][c] {
                shift[v * coin_dim + c] = w * coin_dim + c;
            }
        }
    }
    Ok((ports, shift))
}

/// Parses `line:5001` (site count), `lattice:cart4,100` (optionally `lattice:tri6,60,flip`), `cycle:8`, `cyclediag:10`,
/// `bipartite:3` and `gluedtrees:B=2,N=4,seed=7,label=random`.
pub fn parse_graph(s: &str) -> Result<PortGraph> {
    let s = s.trim();
    let (name, args) = s
        .split_once(':')
        .ok_or_else(|| Error::parse("graph", format!("'{s}' lacks ':<parameters>'")))?;
    let count = |a: &str| -> Result<usize> {
        a.trim()
            .parse()
            .map_err(|_| Error::parse("graph", format!("'{a}' is not a count")))
    };
    match name.to_ascii_lowercase().as_str() {
        "line" => {
            let sites = count(args)?;
            if sites < 3 || sites % 2 == 0 {
                return Err(Error::parse("graph", format!("line needs an odd site count ≥ 3, got {sites}")));
            }
            build_line(sites / 2)
        }
        "lattice" => {
            let parts: Vec<&str> = args.split(',').collect();
            match parts.as_slice() {
                [kind, hw] => build_lattice(kind.parse()?, count(hw)?),
                [kind, hw, rule] => build_lattice_with(kind.parse()?, count(hw)?, rule.parse()?),
                _ => Err(Error::parse("graph", "lattice needs <kind>,<half-width>[,move|flip]")),
            }
        }
        "cycle" => build_cycle(count(args)?),
        "cyclediag" => build_cycle_diag(count(args)?),
        "bipartite" => build_bipartite(count(args)?),
        "gluedtrees" => build_glued_trees(parse_glued_spec(args)?),
        other => Err(Error::parse("graph", format!("unknown graph family '{other}'"))),
    }
}

pub fn parse_glued_spec(args: &str) -> Result<GluedTreesSpec> {
    let mut spec = GluedTreesSpec::new(2, 4, 0, Labeling::RandomConsistent);
    for kv in args.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::parse("graph", format!("'{kv}' is not key=value")))?;
        let bad = |what: &str| Error::parse("graph", format!("bad {what} '{v}'"));
        match k.trim() {
            "B" | "b" => spec.branching = v.trim().parse().map_err(|_| bad("B"))?,
            "N" | "n" => spec.depth = v.trim().parse().map_err(|_| bad("N"))?,
            "seed" => spec.seed = v.trim().parse().map_err(|_| bad("seed"))?,
            "label" => {
                spec.labeling = match v.trim() {
                    "random" => Labeling::RandomConsistent,
                    "regular" | "root0" => Labeling::RegularRootZero,
                    _ => return Err(bad("label")),
                }
            }
            other => return Err(Error::parse("graph", format!("unknown key '{other}'"))),
        }
    }
    Ok(spec)
}
