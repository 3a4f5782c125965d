//! The closure from bicolored binary trees to irreducible dissections of
//! the hexagon, admissibility, the primal-map construction, and the
//! samplers for rooted 3-connected planar maps/graphs and their derived
//! variants.

use crate::boltzmann::{GenCx, GenError};
use crate::halfedge::{Dart, PlanarMap, VId, BLACK, NIL, WHITE};
use crate::oracle::SamplerWeights;
use crate::trees::{sample_tree, sample_tree_derived, TreeShape};

/// A quadrangular dissection of the hexagon in the map arena.
#[derive(Debug, Clone)]
pub struct DissectionShape {
    /// outer vertices in ccw order; even positions black
    pub hexagon: [VId; 6],
    /// hexagon boundary darts: b[p] points from hexagon[p] to hexagon[p+1]
    pub hex_darts: [Dart; 6],
    /// inner black vertices (the L-atoms of the unrooted class)
    pub inner_black: u64,
    /// inner faces (the U-atoms of the unrooted class)
    pub inner_faces: u64,
    /// discarded black inner vertex (derived variants)
    pub derived_mark: Option<VId>,
    /// rooting: position p in {0,2,4} of the root vertex; the root edge is
    /// the outer edge hexagon[p] -> hexagon[p-1] (outer face on its right)
    pub root_pos: Option<usize>,
    /// the counted extra outer black vertex of the rooted class
    pub extra_black: Option<VId>,
}

impl DissectionShape {
    /// (l,u) of the rooted class: one more L-atom and one more U-atom than
    /// the unrooted dissection.
    pub fn rooted_sizes(&self) -> (u64, u64) {
        (self.inner_black + 1, self.inner_faces + 1)
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
enum Item {
    Stem(Dart),
    Side(Dart),
}

/// Close a bicolored binary tree into a dissection of the hexagon: local
/// closures (a stem followed by three edge-sides closes a quadrangular
/// face), then the hexagon completion. Linear in the tree size up to the
/// cyclic-rescan passes.
pub fn closure(
    map: &mut PlanarMap,
    tree: &TreeShape,
    cx: &mut GenCx,
) -> Result<DissectionShape, GenError> {
    // degenerate: the two-leaf single-edge tree closes onto a hexagon with
    // one inner edge (only reachable from non-class trees, kept for tests)
    if tree.black_nodes == 0 && tree.leaves == 2 {
        let root_leaf = map.origin(tree.root_dart);
        let other = map.target(tree.root_dart);
        let (hexagon, hex_darts) = build_hexagon(map, cx)?;
        // merge the black leaf onto h0 and the white leaf onto h3
        let (b_leaf, w_leaf) = if map.color(root_leaf) == BLACK {
            (root_leaf, other)
        } else {
            (other, root_leaf)
        };
        let db = map.first_dart(b_leaf);
        let dw = map.first_dart(w_leaf);
        map.merge_at(hex_darts[0], db);
        map.merge_at(hex_darts[3], dw);
        return Ok(DissectionShape {
            hexagon,
            hex_darts,
            inner_black: 0,
            inner_faces: 2,
            derived_mark: None,
            root_pos: None,
            extra_black: None,
        });
    }

    // contour items: walk the unique face of the tree
    let mut items: Vec<Item> = Vec::new();
    {
        let start = tree.root_dart;
        let mut d = start;
        loop {
            let head_is_leaf = {
                let t = map.target(d);
                map.degree(t) == 1
            };
            let tail_is_leaf = {
                let o = map.origin(d);
                map.degree(o) == 1
            };
            if head_is_leaf {
                items.push(Item::Stem(d));
            } else if !tail_is_leaf {
                items.push(Item::Side(d));
            }
            d = map.face_next(d);
            if d == start {
                break;
            }
        }
    }

    // partial closure: rewrite [Side(e1), Side(e2), Side(e3), Stem(s)] into
    // Side(opp(s)), merging the leaf of s onto the tail of e1 so the quad
    // {e1, e2, e3, stem} closes. Rescan until the cyclic word is
    // pattern-free.
    loop {
        // end each pass at a stem (start right after one): a pattern's side
        // run can then never straddle the seam, so a no-change pass proves
        // the cyclic word pattern-free
        if let Some(pos) = items.iter().position(|i| matches!(i, Item::Stem(_))) {
            items.rotate_left(pos + 1);
        }
        cx.charge(items.len() as u64)?;
        let mut stack: Vec<Item> = Vec::with_capacity(items.len());
        let mut changed = false;
        for it in items.drain(..) {
            stack.push(it);
            loop {
                let n = stack.len();
                if n < 4 {
                    break;
                }
                let (e1, s) = match (stack[n - 4], stack[n - 3], stack[n - 2], stack[n - 1]) {
                    (Item::Side(e1), Item::Side(_), Item::Side(_), Item::Stem(s)) => (e1, s),
                    _ => break,
                };
                // merge the leaf of s onto the tail of e1
                let leaf_dart = map.opp(s);
                let anchor = map.prev(e1);
                map.merge_at(anchor, leaf_dart);
                stack.truncate(n - 4);
                stack.push(Item::Side(leaf_dart));
                changed = true;
            }
        }
        items = stack;
        if !changed {
            break;
        }
    }

    // hexagon completion: remaining stems attach to hexagon vertices so
    // that every face between consecutive stems is quadrangular
    let stems: Vec<usize> = items
        .iter()
        .enumerate()
        .filter_map(|(i, it)| matches!(it, Item::Stem(_)).then_some(i))
        .collect();
    let k = stems.len();
    if k < 3 {
        return Err(GenError::Bijection(format!(
            "partial closure left {k} free stems"
        )));
    }
    // gaps g_i: sides between stem i and stem i+1 (cyclic)
    let mut gaps = Vec::with_capacity(k);
    for i in 0..k {
        let from = stems[i];
        let to = stems[(i + 1) % k];
        let g = if to > from {
            to - from - 1
        } else {
            items.len() - from - 1 + to
        };
        if g > 2 {
            return Err(GenError::Bijection(format!("free stem with gap {g}")));
        }
        gaps.push(g);
    }
    let hex_used: usize = gaps.iter().map(|g| 2 - g).sum();
    if hex_used != 6 {
        return Err(GenError::Bijection(format!(
            "hexagon completion needs {hex_used} edges"
        )));
    }

    // stems attaching to one hexagon vertex form chains of zero-advance
    // steps; the attachment loop must start at a chain head (a stem whose
    // predecessor sits on a different hexagon vertex) so no chain wraps
    // the seam
    let (mut stems, mut gaps) = (stems, gaps);
    let head = (0..k)
        .find(|&j| gaps[(j + k - 1) % k] <= 1)
        .expect("some gap is <= 1 since the advances sum to 6");
    stems.rotate_left(head);
    gaps.rotate_left(head);

    let (hexagon, hex_darts) = build_hexagon(map, cx)?;
    // first attachment position fixed by the leaf color (the rotational
    // freedom maps to isomorphic dissections)
    let first_stem = match items[stems[0]] {
        Item::Stem(s) => s,
        _ => unreachable!(),
    };
    let first_color = {
        let leaf = map.target(first_stem);
        map.color(leaf)
    };
    let mut p = if first_color == BLACK { 0usize } else { 1 };
    for i in 0..k {
        let s = match items[stems[i]] {
            Item::Stem(s) => s,
            _ => unreachable!(),
        };
        let leaf = map.target(s);
        if map.color(leaf) != map.color(hexagon[p]) {
            return Err(GenError::Bijection("hexagon color mismatch".into()));
        }
        let leaf_dart = map.opp(s);
        map.merge_at(hex_darts[p], leaf_dart);
        p = (p + (2 - gaps[i])) % 6;
    }

    Ok(DissectionShape {
        hexagon,
        hex_darts,
        inner_black: tree.black_nodes,
        inner_faces: tree.leaves,
        derived_mark: tree.derived_mark,
        root_pos: None,
        extra_black: None,
    })
}

fn build_hexagon(map: &mut PlanarMap, cx: &mut GenCx) -> Result<([VId; 6], [Dart; 6]), GenError> {
    cx.charge(12)?;
    let mut hexagon = [0 as VId; 6];
    for (i, h) in hexagon.iter_mut().enumerate() {
        *h = map.new_vertex(if i % 2 == 0 { BLACK } else { WHITE });
    }
    let mut hex_darts = [NIL; 6];
    for pp in 0..6 {
        let u = hexagon[pp];
        let v = hexagon[(pp + 1) % 6];
        let after_u = if pp == 0 { None } else { Some(map.opp(hex_darts[pp - 1])) };
        // at v: the incoming dart must come before any existing b-dart;
        // 2-element rings are cyclic so any anchor works
        let after_v = if pp == 5 { Some(hex_darts[0]) } else { None };
        hex_darts[pp] = map.add_edge(u, after_u, v, after_v);
    }
    Ok((hexagon, hex_darts))
}

/// Root a dissection: choose one of the 3 outer black vertices uniformly.
/// The class gains one L-atom (the outer black vertex that is neither the
/// root vertex nor the next black one along the outer face) and one U-atom
/// (the outer face).
pub fn root_dissection(
    map: &mut PlanarMap,
    d: &mut DissectionShape,
    cx: &mut GenCx,
) -> Result<(), GenError> {
    let r = cx.rng.below(3) * 2;
    cx.charge(1)?;
    d.root_pos = Some(r);
    d.extra_black = Some(map.find(d.hexagon[(r + 4) % 6]));
    Ok(())
}

/// No internal path of length 3 may join the root vertex to the opposite
/// outer vertex; the only admissible length-3 connections are the two
/// boundary arcs of the hexagon.
pub fn is_admissible(map: &mut PlanarMap, d: &DissectionShape) -> bool {
    let p = d.root_pos.expect("admissibility needs a root");
    let r = map.find(d.hexagon[p]);
    let o = map.find(d.hexagon[(p + 3) % 6]);
    let arc1 = (map.find(d.hexagon[(p + 1) % 6]), map.find(d.hexagon[(p + 2) % 6]));
    let arc2 = (map.find(d.hexagon[(p + 5) % 6]), map.find(d.hexagon[(p + 4) % 6]));
    // neighbours of o
    let mut n_o = std::collections::HashSet::new();
    let start = map.first_dart(o);
    if start != NIL {
        let ring: Vec<Dart> = map.ring(start).collect();
        for dd in ring {
            n_o.insert(map.target(dd));
        }
    }
    let start_r = map.first_dart(r);
    let ring_r: Vec<Dart> = map.ring(start_r).collect();
    for dr in ring_r {
        let x = map.target(dr);
        let ring_x: Vec<Dart> = {
            let fx = map.first_dart(x);
            map.ring(fx).collect()
        };
        for dx in ring_x {
            let y = map.target(dx);
            if y == r || x == o {
                continue;
            }
            if n_o.contains(&y) {
                // found r - x - y - o; admissible only if it is a boundary arc
                if (x, y) != arc1 && (x, y) != arc2 {
                    return false;
                }
            }
        }
    }
    true
}

/// Rooted 3-connected planar map obtained from an admissible rooted
/// dissection: root-edge addition, then the primal construction (vertices
/// = black vertices, one edge per quadrangular face).
#[derive(Debug, Clone)]
pub struct G3Shape {
    pub root_dart: Dart,
    pub n_vertices: u64,
    pub n_edges: u64,
    /// vertex discarded from the L-atoms (derived variant)
    pub derived_mark: Option<VId>,
    /// edge discarded from the U-atoms (U-derived variant)
    pub discarded_edge: Option<Dart>,
    /// one dart per edge, root edge included
    pub edges: Vec<Dart>,
}

impl G3Shape {
    /// (l,u) of the edge-rooted class: root ends and root edge not counted.
    pub fn rooted_sizes(&self) -> (u64, u64) {
        (self.n_vertices - 2, self.n_edges - 1)
    }
}

pub fn primal(
    map: &mut PlanarMap,
    d: &DissectionShape,
    cx: &mut GenCx,
) -> Result<G3Shape, GenError> {
    let p = d.root_pos.expect("primal needs a rooted dissection");
    let r = map.find(d.hexagon[p]);
    let o = map.find(d.hexagon[(p + 3) % 6]);
    // a_q = dart from hexagon[q] toward hexagon[q-1]
    let a_p = map.opp(d.hex_darts[(p + 5) % 6]);
    let a_p3 = map.opp(d.hex_darts[(p + 2) % 6]);
    let dr = map.add_edge(r, Some(a_p), o, Some(a_p3));
    cx.charge(1)?;

    // enumerate faces of the quadrangulation
    let darts = map.component_darts(dr);
    let mut face_of: std::collections::HashMap<Dart, u32> = Default::default();
    // per face: the two darts whose origins are the black corners
    let mut face_blacks: Vec<(Dart, Dart)> = Vec::new();
    for &start in &darts {
        if face_of.contains_key(&start) {
            continue;
        }
        let id = face_blacks.len() as u32;
        let mut corner_blacks = Vec::with_capacity(2);
        let mut dd = start;
        let mut len = 0;
        loop {
            face_of.insert(dd, id);
            let ov = map.origin(dd);
            if map.color(ov) == BLACK {
                corner_blacks.push(dd);
            }
            len += 1;
            dd = map.face_next(dd);
            if dd == start {
                break;
            }
        }
        if len != 4 || corner_blacks.len() != 2 {
            return Err(GenError::Bijection(format!(
                "non-quadrangular face (len {len}, blacks {})",
                corner_blacks.len()
            )));
        }
        face_blacks.push((corner_blacks[0], corner_blacks[1]));
    }
    cx.charge(darts.len() as u64)?;

    // primal vertices: one per black vertex of the quadrangulation
    let mut pv: std::collections::HashMap<VId, VId> = Default::default();
    let mut black_order: Vec<VId> = Vec::new();
    for &dd in &darts {
        let v = map.origin(dd);
        if map.color(v) == BLACK && !pv.contains_key(&v) {
            black_order.push(v);
            let nv = map.new_vertex(crate::halfedge::UNCOLORED);
            pv.insert(v, nv);
        }
    }
    // primal edges: one per face; dart 2k sits at the first black corner
    let mut edge_dart: Vec<Dart> = Vec::with_capacity(face_blacks.len());
    for _ in 0..face_blacks.len() {
        edge_dart.push(map.alloc_edge());
    }
    cx.charge(face_blacks.len() as u64)?;
    // rotations: darts at a black vertex in ring order give the incident
    // faces (each quad is incident to a black corner exactly once)
    for &u in &black_order {
        let pu = pv[&u];
        let first = map.first_dart(u);
        let ring: Vec<Dart> = map.ring(first).collect();
        let mut prev: Option<Dart> = None;
        for dd in ring {
            let f = face_of[&dd] as usize;
            let (b1, _b2) = face_blacks[f];
            let pd = if b1 == dd {
                edge_dart[f]
            } else {
                map.opp(edge_dart[f])
            };
            map.attach_dart(pd, pu, prev);
            prev = Some(pd);
        }
    }

    // root: the primal edge of the face on the right of dr, directed from
    // the root vertex
    let f_root = face_of[&map.opp(dr)] as usize;
    let (b1, _) = face_blacks[f_root];
    let root_dart = if map.origin(b1) == r {
        edge_dart[f_root]
    } else {
        map.opp(edge_dart[f_root])
    };
    debug_assert_eq!(map.origin(root_dart), pv[&r]);

    let derived_mark = d.derived_mark.map(|m| pv[&map.find(m)]);
    let extra_mark = d.extra_black.map(|m| pv[&map.find(m)]);
    Ok(G3Shape {
        root_dart,
        n_vertices: black_order.len() as u64,
        n_edges: face_blacks.len() as u64,
        derived_mark: derived_mark.or(extra_mark),
        discarded_edge: None,
        edges: edge_dart,
    })
}

/// Which dissection sampler to run.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum DissectionVariant {
    Plain,        // I
    Derived,      // I'
    Rooted,       // J
    RootedDerived, // J'
    Admissible,   // J_a
    AdmissibleDerived, // J_a'
}

pub fn sample_dissection(
    variant: DissectionVariant,
    wts: &SamplerWeights,
    cx: &mut GenCx,
    map: &mut PlanarMap,
) -> Result<DissectionShape, GenError> {
    use DissectionVariant::*;
    match variant {
        Plain => {
            let t = sample_tree(wts, cx, map)?;
            closure(map, &t, cx)
        }
        Derived => {
            let t = sample_tree_derived(wts, cx, map)?;
            closure(map, &t, cx)
        }
        Rooted => {
            let mut d = sample_dissection(Plain, wts, cx, map)?;
            root_dissection(map, &mut d, cx)?;
            Ok(d)
        }
        RootedDerived => {
            // J' = 3 Z_U I + 3 Z_L Z_U I': the mark is the extra outer
            // black vertex in the first term, an inner black in the second
            let w_plain = wts.w * wts.k_unrooted;
            let w_derived = wts.z * wts.w * wts.k_derived;
            let plain = cx.bern(w_plain / (w_plain + w_derived))?;
            let mut d = sample_dissection(if plain { Plain } else { Derived }, wts, cx, map)?;
            root_dissection(map, &mut d, cx)?;
            if plain {
                d.derived_mark = d.extra_black.take();
            }
            Ok(d)
        }
        Admissible | AdmissibleDerived => {
            let inner = if variant == Admissible {
                Rooted
            } else {
                RootedDerived
            };
            loop {
                let mark = map.mark();
                let d = sample_dissection(inner, wts, cx, map)?;
                cx.charge(1)?;
                if is_admissible(map, &d) {
                    return Ok(d);
                }
                map.rollback(mark);
            }
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum G3Variant {
    Rooted,
    RootedDerived,
    RootedUnderived,
}

/// Edge-rooted 3-connected planar graphs (the embedding is kept as the
/// planarity witness; both embeddings of a graph collapse to it).
pub fn sample_g3(
    variant: G3Variant,
    wts: &SamplerWeights,
    cx: &mut GenCx,
    map: &mut PlanarMap,
) -> Result<G3Shape, GenError> {
    match variant {
        G3Variant::Rooted => {
            let d = sample_dissection(DissectionVariant::Admissible, wts, cx, map)?;
            primal(map, &d, cx)
        }
        G3Variant::RootedDerived => {
            let d = sample_dissection(DissectionVariant::AdmissibleDerived, wts, cx, map)?;
            primal(map, &d, cx)
        }
        G3Variant::RootedUnderived => {
            // LtoU with alpha_{U/L} = 3 (Euler bound), then a uniform
            // non-root edge is discarded from the U-atoms
            loop {
                let mark = map.mark();
                let mut g = sample_g3(G3Variant::RootedDerived, wts, cx, map)?;
                let (l, u) = (g.n_vertices - 2, g.n_edges - 1);
                let p = u as f64 / (3.0 * l as f64);
                if p > 1.0 + 1e-9 {
                    return Err(GenError::InvariantViolation {
                        p,
                        context: "LtoU on rooted 3-connected graphs: alpha 3 violated",
                    });
                }
                if cx.bern(p)? {
                    // discard a uniform non-root edge
                    let root_edge = g.root_dart / 2;
                    let mut pick;
                    loop {
                        pick = g.edges[cx.rng.below(g.edges.len())];
                        cx.charge(1)?;
                        if pick / 2 != root_edge {
                            break;
                        }
                    }
                    g.derived_mark = None;
                    g.discarded_edge = Some(pick);
                    return Ok(g);
                }
                map.rollback(mark);
            }
        }
    }
}
