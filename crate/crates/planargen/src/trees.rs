//! Boltzmann samplers for rooted, unrooted, and derived bicolored binary
//! trees. Trees are built directly as half-edge maps (rotation = ccw order
//! parent, first child, second child) so the closure needs no conversion.

use crate::boltzmann::{GenCx, GenError};
use crate::halfedge::{Dart, PlanarMap, VId, BLACK, WHITE};
use crate::oracle::SamplerWeights;

/// A bicolored binary tree in the shared map arena, planted on a root leaf.
#[derive(Debug, Clone)]
pub struct TreeShape {
    /// dart from the root leaf into the tree
    pub root_dart: Dart,
    /// number of black nodes (the L-atoms)
    pub black_nodes: u64,
    /// total number of leaves including the root leaf
    pub leaves: u64,
    /// black node discarded from the L-atoms (derived trees)
    pub derived_mark: Option<VId>,
    /// black node ids, for uniform mark drawing
    pub blacks: Vec<VId>,
}

impl TreeShape {
    /// (l, u) of the leaf-rooted object: the root leaf is not a U-atom.
    pub fn rooted_sizes(&self) -> (u64, u64) {
        (self.black_nodes, self.leaves - 1)
    }
}

#[derive(Copy, Clone)]
enum Kind {
    BlackAs,
    WhiteAs,
    BlackHat,
    HatSlot,
    Rb,
    Rw,
}

struct Builder<'a> {
    map: &'a mut PlanarMap,
    blacks: Vec<VId>,
    leaves: u64,
    nodes: u64,
    abort: bool,
    early_abort: bool,
    todo: Vec<(VId, Kind, Dart)>,
}

impl Builder<'_> {
    /// Node-creation gate: for the unrooted sampler, continue with
    /// probability (N+1)/(N+2) after the N-th node, else abort the attempt.
    /// The telescoping product makes a full attempt succeed with
    /// probability 2/(N+2).
    fn gate(&mut self, cx: &mut GenCx) -> Result<(), GenError> {
        self.nodes += 1;
        if self.early_abort {
            let n = self.nodes;
            if !cx.bern((n + 1) as f64 / (n + 2) as f64)? {
                self.abort = true;
            }
        }
        Ok(())
    }

    fn node(
        &mut self,
        cx: &mut GenCx,
        v: VId,
        after: Dart,
        color: u8,
        kind: Kind,
    ) -> Result<Dart, GenError> {
        let c = self.map.new_vertex(color);
        let d = self.map.add_edge(v, Some(after), c, None);
        cx.charge(1)?;
        if color == BLACK {
            self.blacks.push(c);
        }
        // a hat slot may still resolve into a leaf; its node coin waits
        if !matches!(kind, Kind::HatSlot) {
            self.gate(cx)?;
        }
        self.todo.push((c, kind, self.map.opp(d)));
        Ok(d)
    }

    fn leaf(&mut self, cx: &mut GenCx, v: VId, after: Dart, color: u8) -> Result<Dart, GenError> {
        let c = self.map.new_vertex(color);
        let d = self.map.add_edge(v, Some(after), c, None);
        cx.charge(1)?;
        self.leaves += 1;
        Ok(d)
    }

    /// A white node both of whose children are leaves.
    fn white_ll(&mut self, cx: &mut GenCx, v: VId, after: Dart) -> Result<Dart, GenError> {
        let c = self.map.new_vertex(WHITE);
        let d = self.map.add_edge(v, Some(after), c, None);
        cx.charge(1)?;
        self.gate(cx)?;
        let d1 = self.leaf(cx, c, self.map.opp(d), BLACK)?;
        self.leaf(cx, c, d1, BLACK)?;
        Ok(d)
    }
}

/// Grammar-direct sampler for leaf-rooted trees with class-asymmetric
/// underlying tree. With `early_abort`, the attempt stops as soon as a
/// continuation coin fails; the caller rolls the arena back and retries.
fn sample_rooted_inner(
    wts: &SamplerWeights,
    cx: &mut GenCx,
    map: &mut PlanarMap,
    early_abort: bool,
) -> Result<Option<TreeShape>, GenError> {
    let (z, w) = (wts.z, wts.w);
    let (rb, rw) = (wts.r_black, wts.r_white);
    let (rbh, rwh) = (wts.r_black_hat, wts.r_white_hat);

    let top_black = cx.bern(wts.r_black_as / wts.k_rooted)?;
    let root_leaf = map.new_vertex(if top_black { WHITE } else { BLACK });
    let top = map.new_vertex(if top_black { BLACK } else { WHITE });
    let d_root = map.add_edge(root_leaf, None, top, None);
    cx.charge(2)?;

    let mut b = Builder {
        map,
        blacks: Vec::new(),
        leaves: 1,
        nodes: 0,
        abort: false,
        early_abort,
        todo: Vec::new(),
    };
    if top_black {
        b.blacks.push(top);
    }
    b.gate(cx)?;
    let opp_root = b.map.opp(d_root);
    b.todo.push((
        top,
        if top_black { Kind::BlackAs } else { Kind::WhiteAs },
        opp_root,
    ));

    while let Some((v, kind, pd)) = b.todo.pop() {
        if b.abort {
            return Ok(None);
        }
        match kind {
            Kind::BlackAs => {
                let t1 = z * w * rw;
                match cx.choose_weighted(&[t1, t1, z * rw * rw])? {
                    0 => {
                        let d1 = b.node(cx, v, pd, WHITE, Kind::Rw)?;
                        b.leaf(cx, v, d1, WHITE)?;
                    }
                    1 => {
                        let d1 = b.leaf(cx, v, pd, WHITE)?;
                        b.node(cx, v, d1, WHITE, Kind::Rw)?;
                    }
                    _ => {
                        let d1 = b.node(cx, v, pd, WHITE, Kind::Rw)?;
                        b.node(cx, v, d1, WHITE, Kind::Rw)?;
                    }
                }
            }
            Kind::WhiteAs => {
                let t1 = w * rbh;
                match cx.choose_weighted(&[t1, t1, rb * rb])? {
                    0 => {
                        let d1 = b.node(cx, v, pd, BLACK, Kind::BlackHat)?;
                        b.leaf(cx, v, d1, BLACK)?;
                    }
                    1 => {
                        let d1 = b.leaf(cx, v, pd, BLACK)?;
                        b.node(cx, v, d1, BLACK, Kind::BlackHat)?;
                    }
                    _ => {
                        let d1 = b.node(cx, v, pd, BLACK, Kind::Rb)?;
                        b.node(cx, v, d1, BLACK, Kind::Rb)?;
                    }
                }
            }
            Kind::BlackHat => {
                let t1 = w * w * rwh;
                match cx.choose_weighted(&[t1, t1, rwh * rwh])? {
                    0 => {
                        let d1 = b.white_ll(cx, v, pd)?;
                        b.node(cx, v, d1, WHITE, Kind::HatSlot)?;
                    }
                    1 => {
                        let d1 = b.node(cx, v, pd, WHITE, Kind::HatSlot)?;
                        b.white_ll(cx, v, d1)?;
                    }
                    _ => {
                        let d1 = b.node(cx, v, pd, WHITE, Kind::HatSlot)?;
                        b.node(cx, v, d1, WHITE, Kind::HatSlot)?;
                    }
                }
            }
            Kind::HatSlot => {
                // the slot vertex is either a bare leaf or a white node whose
                // children are not both leaves
                let slot = cx.choose_weighted(&[w, w * rb, w * rb, rb * rb])?;
                if slot != 0 {
                    b.gate(cx)?; // the slot settled as a node after all
                }
                match slot {
                    0 => {
                        b.leaves += 1; // the slot vertex is a leaf
                    }
                    1 => {
                        let d1 = b.node(cx, v, pd, BLACK, Kind::Rb)?;
                        b.leaf(cx, v, d1, BLACK)?;
                    }
                    2 => {
                        let d1 = b.leaf(cx, v, pd, BLACK)?;
                        b.node(cx, v, d1, BLACK, Kind::Rb)?;
                    }
                    _ => {
                        let d1 = b.node(cx, v, pd, BLACK, Kind::Rb)?;
                        b.node(cx, v, d1, BLACK, Kind::Rb)?;
                    }
                }
            }
            Kind::Rb => {
                let mut after = pd;
                for _ in 0..2 {
                    if cx.bern(w / (w + rw))? {
                        after = b.leaf(cx, v, after, WHITE)?;
                    } else {
                        after = b.node(cx, v, after, WHITE, Kind::Rw)?;
                    }
                }
            }
            Kind::Rw => {
                let mut after = pd;
                for _ in 0..2 {
                    if cx.bern(w / (w + rb))? {
                        after = b.leaf(cx, v, after, BLACK)?;
                    } else {
                        after = b.node(cx, v, after, BLACK, Kind::Rb)?;
                    }
                }
            }
        }
    }
    if b.abort {
        return Ok(None);
    }
    Ok(Some(TreeShape {
        root_dart: d_root,
        black_nodes: b.blacks.len() as u64,
        leaves: b.leaves,
        derived_mark: None,
        blacks: b.blacks,
    }))
}

/// Boltzmann sampler for the leaf-rooted tree class.
pub fn sample_tree_rooted(
    wts: &SamplerWeights,
    cx: &mut GenCx,
    map: &mut PlanarMap,
) -> Result<TreeShape, GenError> {
    Ok(sample_rooted_inner(wts, cx, map, false)?.expect("no abort without early_abort"))
}

/// Boltzmann sampler for unrooted trees: early-abort rejection; the root
/// leaf rejoins the U-atoms on success (bookkeeping only).
pub fn sample_tree(
    wts: &SamplerWeights,
    cx: &mut GenCx,
    map: &mut PlanarMap,
) -> Result<TreeShape, GenError> {
    loop {
        let mark = map.mark();
        match sample_rooted_inner(wts, cx, map, true)? {
            Some(t) => return Ok(t),
            None => map.rollback(mark),
        }
    }
}

/// Derived trees: re-rooting loop with alpha_{L/U} = 2/3, then a uniform
/// black node is discarded from the L-atoms.
pub fn sample_tree_derived(
    wts: &SamplerWeights,
    cx: &mut GenCx,
    map: &mut PlanarMap,
) -> Result<TreeShape, GenError> {
    loop {
        let mark = map.mark();
        let mut t = sample_tree_rooted(wts, cx, map)?;
        // restore the root leaf to the U-atoms: sizes become (b, leaves)
        let (bl, l) = (t.black_nodes, t.leaves);
        let p = bl as f64 / ((2.0 / 3.0) * l as f64);
        if p > 1.0 + 1e-9 {
            return Err(GenError::InvariantViolation {
                p,
                context: "UtoL on trees: alpha 2/3 violated",
            });
        }
        if cx.bern(p.min(1.0))? {
            let pick = cx.rng.below(t.blacks.len());
            cx.charge(1)?;
            t.derived_mark = Some(t.blacks[pick]);
            return Ok(t);
        }
        map.rollback(mark);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census;
    use crate::oracle::tree_sampler_weights;

    fn tree_test_weights(z: f64, w: f64) -> crate::oracle::SamplerWeights {
        tree_sampler_weights(z, w).unwrap()
    }

    fn colors_alternate(map: &mut PlanarMap, t: &TreeShape) -> bool {
        let darts = map.component_darts(t.root_dart);
        darts.iter().all(|&d| {
            let u = map.origin(d);
            let v = map.target(d);
            map.color(u) != map.color(v)
        })
    }

    /// Canonical encoding of the sampled planted tree, for comparisons with
    /// the census enumeration.
    fn encode(map: &mut PlanarMap, t: &TreeShape) -> census::PlantedTree {
        fn enc(map: &mut PlanarMap, d: Dart) -> census::Sub {
            // d points to a vertex; leaf if degree 1
            let v = map.target(d);
            if map.degree(v) == 1 {
                return census::Sub::Leaf;
            }
            let into = map.opp(d); // dart at v toward parent
            let c1 = map.next(into);
            let c2 = map.next(c1);
            census::Sub::Node(Box::new(enc(map, c1)), Box::new(enc(map, c2)))
        }
        let top = map.target(t.root_dart);
        census::PlantedTree {
            top_color: map.color(top),
            shape: enc(map, t.root_dart),
        }
    }

    #[test]
    fn rooted_tree_structure_invariants() {
        let wts = tree_test_weights(0.08, 0.3);
        let mut cx = GenCx::new(21);
        let mut map = PlanarMap::new();
        for _ in 0..3000 {
            map.clear();
            let t = sample_tree_rooted(&wts, &mut cx, &mut map).unwrap();
            assert!(colors_alternate(&mut map, &t));
            // leaves = nodes + 2
            let darts = map.component_darts(t.root_dart);
            let mut nodes = 0u64;
            let mut leaves = 0u64;
            let mut verts = std::collections::HashSet::new();
            for &d in &darts {
                let v = map.origin(d);
                if verts.insert(v) {
                    if map.degree(v) == 1 {
                        leaves += 1;
                    } else {
                        assert_eq!(map.degree(v), 3);
                        nodes += 1;
                    }
                }
            }
            assert_eq!(leaves, nodes + 2);
            assert_eq!(leaves, t.leaves);
            // black ratio bound: b/l < 2/3 strictly (the re-rooting alpha)
            assert!(3 * t.black_nodes < 2 * t.leaves, "b={} l={}", t.black_nodes, t.leaves);
            // the sampled tree is class-asymmetric
            assert!(encode(&mut map, &t).is_asymmetric());
        }
    }

    #[test]
    fn rooted_tree_boltzmann_distribution() {
        // empirical P(b, l) ratios match counts * z^b w^(l-1) from enumeration
        let (z, w) = (0.08, 0.3);
        let wts = tree_test_weights(z, w);
        let mut cx = GenCx::new(22);
        let mut map = PlanarMap::new();
        let mut freq = std::collections::BTreeMap::new();
        let samples = 200_000;
        for _ in 0..samples {
            map.clear();
            let t = sample_tree_rooted(&wts, &mut cx, &mut map).unwrap();
            *freq.entry((t.black_nodes as u32, t.leaves as u32)).or_insert(0u64) += 1;
        }
        let counts = census::planted_asym_tree_counts(6);
        let weight = |b: u32, l: u32| -> f64 {
            counts.get(&(b, l)).copied().unwrap_or(0) as f64 * z.powi(b as i32)
                * w.powi(l as i32 - 1)
        };
        // compare P(1,4)/P(2,5)-style ratios for all sizes with enough mass
        let p14 = freq.get(&(1, 4)).copied().unwrap_or(0) as f64 / samples as f64;
        for (&(bb, ll), &c) in freq.iter() {
            if ll > 6 || c < 500 {
                continue;
            }
            let predicted = weight(bb, ll) / weight(1, 4);
            let observed = c as f64 / samples as f64 / p14;
            assert!(
                (observed / predicted - 1.0).abs() < 0.1,
                "({bb},{ll}): obs {observed} vs pred {predicted}"
            );
        }
    }

    #[test]
    fn rooted_tree_uniform_within_size() {
        // conditioned on (b=2, leaves=5): uniform over the enumerated planted shapes
        let wts = tree_test_weights(0.08, 0.3);
        let mut cx = GenCx::new(23);
        let mut map = PlanarMap::new();
        let mut freq: std::collections::BTreeMap<census::PlantedTree, u64> = Default::default();
        let mut total = 0u64;
        for _ in 0..400_000 {
            map.clear();
            let t = sample_tree_rooted(&wts, &mut cx, &mut map).unwrap();
            if t.black_nodes == 2 && t.leaves == 5 {
                *freq.entry(encode(&mut map, &t)).or_insert(0) += 1;
                total += 1;
            }
        }
        let expected = census::planted_asym_tree_counts(6)[&(2, 5)];
        assert_eq!(freq.len() as u64, expected, "all shapes reached");
        let obs: Vec<u64> = freq.values().copied().collect();
        let p = census::chi_square_uniform(&obs).unwrap();
        assert!(p > 0.001, "p = {p}, total {total}");
    }

    #[test]
    fn unrooted_tree_completion_probability() {
        // per-attempt completion probability for a tree with N nodes is
        // 2/(N+2): check the telescoping empirically via attempt counting
        let wts = tree_test_weights(0.08, 0.3);
        let mut cx = GenCx::new(24);
        let mut map = PlanarMap::new();
        let mut count = 0u64;
        for _ in 0..20_000 {
            map.clear();
            let t = sample_tree(&wts, &mut cx, &mut map).unwrap();
            assert_eq!(t.leaves, t.black_nodes + (t.leaves - t.black_nodes - 2) + 2);
            count += 1;
        }
        assert_eq!(count, 20_000);
    }

    #[test]
    fn derived_tree_carries_mark() {
        let wts = tree_test_weights(0.08, 0.3);
        let mut cx = GenCx::new(25);
        let mut map = PlanarMap::new();
        for _ in 0..2000 {
            map.clear();
            let t = sample_tree_derived(&wts, &mut cx, &mut map).unwrap();
            let m = t.derived_mark.expect("derived tree has a mark");
            assert_eq!(map.color(m), BLACK);
            assert!(t.blacks.contains(&m));
        }
    }

    #[test]
    fn derived_tree_distribution_matches_pointing() {
        // P(b,l) for the derived class is proportional to b * count(b,l)
        // * z^(b-1) w^l (pointing identity)
        let (z, w) = (0.08, 0.3);
        let wts = tree_test_weights(z, w);
        let mut cx = GenCx::new(26);
        let mut map = PlanarMap::new();
        let mut freq = std::collections::BTreeMap::new();
        let samples = 150_000;
        for _ in 0..samples {
            map.clear();
            let t = sample_tree_derived(&wts, &mut cx, &mut map).unwrap();
            *freq
                .entry((t.black_nodes as u32, t.leaves as u32))
                .or_insert(0u64) += 1;
        }
        // labelled unrooted counts: planted * b! / l; derived weight is
        // b * |K_{b,l}| z^(b-1) w^l / (b-1)!; ratios over shapes cancel the
        // factorials: use planted counts directly: |K'| weight per (b,l) is
        // planted(b,l)/l * b * z^(b-1) w^l  (up to a constant factor)
        let planted = census::planted_asym_tree_counts(6);
        let weight = |b: u32, l: u32| -> f64 {
            planted.get(&(b, l)).copied().unwrap_or(0) as f64 / l as f64
                * b as f64
                * z.powi(b as i32 - 1)
                * w.powi(l as i32)
        };
        let base = freq.get(&(1, 4)).copied().unwrap_or(0) as f64;
        for (&(bb, ll), &c) in freq.iter() {
            if ll > 6 || c < 800 {
                continue;
            }
            let predicted = weight(bb, ll) / weight(1, 4);
            let observed = c as f64 / base;
            assert!(
                (observed / predicted - 1.0).abs() < 0.1,
                "({bb},{ll}): obs {observed} vs pred {predicted}"
            );
        }
    }
}
