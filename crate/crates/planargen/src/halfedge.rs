//! Half-edge planar map arena.
//!
//! Darts come in opposite pairs (ids 2k, 2k+1). Each dart knows its origin
//! vertex and its neighbours in the counterclockwise rotation around that
//! origin. Faces are the orbits of `d -> next(opp(d))`.
//!
//! Vertex identity goes through a union-find whose class root is always the
//! oldest (smallest) id, so rolling the arena back to a mark never leaves a
//! surviving vertex pointing at truncated state. All merge primitives are
//! O(1) ring splices.

pub type Dart = u32;
pub type VId = u32;

pub const NIL: u32 = u32::MAX;

pub const BLACK: u8 = 0;
pub const WHITE: u8 = 1;
pub const UNCOLORED: u8 = 2;

#[derive(Default)]
pub struct PlanarMap {
    next: Vec<Dart>,
    prev: Vec<Dart>,
    origin_raw: Vec<VId>,
    parent: Vec<VId>,
    color: Vec<u8>,
    vfirst: Vec<Dart>,
    degree: Vec<u32>,
}

/// Rollback point for rejected generation attempts.
///
/// Discipline: between `mark()` and `rollback()`, the candidate structure
/// must not be spliced into pre-mark state. Rejection loops build
/// self-contained candidates, so merging into a parent structure only ever
/// happens after the candidate is accepted (and then no rollback crosses
/// that merge short of discarding the parent attempt as a whole).
#[derive(Copy, Clone, Debug)]
pub struct Mark {
    darts: usize,
    verts: usize,
}

impl PlanarMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mark(&self) -> Mark {
        Mark {
            darts: self.next.len(),
            verts: self.parent.len(),
        }
    }

    pub fn rollback(&mut self, m: Mark) {
        self.next.truncate(m.darts);
        self.prev.truncate(m.darts);
        self.origin_raw.truncate(m.darts);
        self.parent.truncate(m.verts);
        self.color.truncate(m.verts);
        self.vfirst.truncate(m.verts);
        self.degree.truncate(m.verts);
    }

    pub fn clear(&mut self) {
        self.rollback(Mark { darts: 0, verts: 0 });
    }

    pub fn dart_count(&self) -> usize {
        self.next.len()
    }

    pub fn edge_count(&self) -> usize {
        self.next.len() / 2
    }

    pub fn new_vertex(&mut self, color: u8) -> VId {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        self.color.push(color);
        self.vfirst.push(NIL);
        self.degree.push(0);
        id
    }

    pub fn find(&mut self, v: VId) -> VId {
        let mut r = v;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        // path compression (roots are minimal ids, safe under rollback)
        let mut c = v;
        while self.parent[c as usize] != r {
            let p = self.parent[c as usize];
            self.parent[c as usize] = r;
            c = p;
        }
        r
    }

    pub fn color(&mut self, v: VId) -> u8 {
        let r = self.find(v);
        self.color[r as usize]
    }

    pub fn set_color(&mut self, v: VId, c: u8) {
        let r = self.find(v);
        self.color[r as usize] = c;
    }

    pub fn degree(&mut self, v: VId) -> u32 {
        let r = self.find(v);
        self.degree[r as usize]
    }

    pub fn first_dart(&mut self, v: VId) -> Dart {
        let r = self.find(v);
        self.vfirst[r as usize]
    }

    #[inline]
    pub fn opp(&self, d: Dart) -> Dart {
        d ^ 1
    }

    #[inline]
    pub fn next(&self, d: Dart) -> Dart {
        self.next[d as usize]
    }

    #[inline]
    pub fn prev(&self, d: Dart) -> Dart {
        self.prev[d as usize]
    }

    pub fn origin(&mut self, d: Dart) -> VId {
        let raw = self.origin_raw[d as usize];
        self.find(raw)
    }

    pub fn target(&mut self, d: Dart) -> VId {
        self.origin(self.opp(d))
    }

    /// Next dart along the face on the left of `d` when walking d.
    #[inline]
    pub fn face_next(&self, d: Dart) -> Dart {
        self.next[self.opp(d) as usize]
    }

    fn insert_dart(&mut self, d: Dart, v: VId, after: Option<Dart>) {
        let r = self.find(v);
        self.origin_raw[d as usize] = r;
        self.degree[r as usize] += 1;
        match after {
            None => {
                let f = self.vfirst[r as usize];
                if f == NIL {
                    self.vfirst[r as usize] = d;
                    self.next[d as usize] = d;
                    self.prev[d as usize] = d;
                } else {
                    // insert right after f
                    let nf = self.next[f as usize];
                    self.next[f as usize] = d;
                    self.prev[d as usize] = f;
                    self.next[d as usize] = nf;
                    self.prev[nf as usize] = d;
                }
            }
            Some(a) => {
                debug_assert_eq!(self.origin(a), r, "anchor dart not at vertex");
                let na = self.next[a as usize];
                self.next[a as usize] = d;
                self.prev[d as usize] = a;
                self.next[d as usize] = na;
                self.prev[na as usize] = d;
            }
        }
    }

    /// Add an edge between u and v; each end is inserted right after the
    /// given anchor dart in ccw order (or anywhere if None). Returns the
    /// dart at u (its opposite is the dart at v).
    pub fn add_edge(&mut self, u: VId, after_u: Option<Dart>, v: VId, after_v: Option<Dart>) -> Dart {
        let du = self.alloc_edge();
        self.insert_dart(du, u, after_u);
        self.insert_dart(du + 1, v, after_v);
        du
    }

    /// Allocate an edge whose two darts are not yet attached to any vertex;
    /// attach each end later with [`attach_dart`].
    pub fn alloc_edge(&mut self) -> Dart {
        let du = self.next.len() as u32;
        self.next.extend_from_slice(&[NIL, NIL]);
        self.prev.extend_from_slice(&[NIL, NIL]);
        self.origin_raw.extend_from_slice(&[NIL, NIL]);
        du
    }

    /// Attach a dart allocated by [`alloc_edge`] to a vertex ring.
    pub fn attach_dart(&mut self, d: Dart, v: VId, after: Option<Dart>) {
        debug_assert_eq!(self.origin_raw[d as usize], NIL, "dart already attached");
        self.insert_dart(d, v, after);
    }

    /// Unlink both darts of the edge from their rotation rings. The dart
    /// storage itself stays allocated (arena style).
    pub fn delete_edge(&mut self, d: Dart) {
        for e in [d, self.opp(d)] {
            let r = self.origin(e);
            let n = self.next[e as usize];
            let p = self.prev[e as usize];
            if n == e {
                self.vfirst[r as usize] = NIL;
            } else {
                self.next[p as usize] = n;
                self.prev[n as usize] = p;
                if self.vfirst[r as usize] == e {
                    self.vfirst[r as usize] = n;
                }
            }
            self.degree[r as usize] -= 1;
            self.next[e as usize] = NIL;
            self.prev[e as usize] = NIL;
            self.origin_raw[e as usize] = NIL;
        }
    }

    fn union_into(&mut self, keep: VId, absorb: VId) -> VId {
        let rk = self.find(keep);
        let ra = self.find(absorb);
        if rk == ra {
            return rk;
        }
        // oldest id wins so rollback stays sound
        let (root, sub) = if rk < ra { (rk, ra) } else { (ra, rk) };
        self.parent[sub as usize] = root;
        self.degree[root as usize] += self.degree[sub as usize];
        if self.vfirst[root as usize] == NIL {
            self.vfirst[root as usize] = self.vfirst[sub as usize];
        }
        root
    }

    /// Merge vertex of `v_corner` into vertex of `u_corner`: the rotation of
    /// the merged vertex reads ..., u_corner, v_corner, (rest of v's ring),
    /// next(u_corner), ... Returns the surviving vertex id.
    pub fn merge_at(&mut self, u_corner: Dart, v_corner: Dart) -> VId {
        let u = self.origin(u_corner);
        let v = self.origin(v_corner);
        debug_assert_ne!(u, v, "cannot merge a vertex with itself");
        let un = self.next[u_corner as usize];
        let vp = self.prev[v_corner as usize];
        self.next[u_corner as usize] = v_corner;
        self.prev[v_corner as usize] = u_corner;
        self.next[vp as usize] = un;
        self.prev[un as usize] = vp;
        self.union_into(u, v)
    }

    /// Merge two vertices when at least one of them may be isolated.
    pub fn merge_vertices(&mut self, u: VId, v: VId) -> VId {
        let fu = self.first_dart(u);
        let fv = self.first_dart(v);
        match (fu, fv) {
            (NIL, _) | (_, NIL) => self.union_into(u, v),
            (fu, fv) => self.merge_at(fu, fv),
        }
    }

    /// Darts around the origin of `d` in ccw order.
    pub fn ring(&self, d: Dart) -> RingIter<'_> {
        RingIter {
            map: self,
            start: d,
            cur: Some(d),
        }
    }

    /// Darts along the face on the left of `d`.
    pub fn face(&self, d: Dart) -> FaceIter<'_> {
        FaceIter {
            map: self,
            start: d,
            cur: Some(d),
        }
    }

    pub fn is_live_dart(&self, d: Dart) -> bool {
        (d as usize) < self.next.len() && self.next[d as usize] != NIL
    }

    /// Live darts reachable from `d` in the same connected component.
    pub fn component_darts(&mut self, d: Dart) -> Vec<Dart> {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![d];
        let mut out = Vec::new();
        while let Some(x) = stack.pop() {
            if !seen.insert(x) {
                continue;
            }
            out.push(x);
            stack.push(self.opp(x));
            stack.push(self.next(x));
        }
        out
    }

    /// V - E + F for the component containing dart `d`; 2 certifies a
    /// planar (genus-0) embedding of that component.
    pub fn euler_characteristic(&mut self, d: Dart) -> i64 {
        let darts = self.component_darts(d);
        let mut verts = std::collections::HashSet::new();
        for &x in &darts {
            verts.insert(self.origin(x));
        }
        let e = darts.len() as i64 / 2;
        // faces: orbits of face_next over the component darts
        let mut seen = std::collections::HashSet::new();
        let mut f = 0i64;
        for &x in &darts {
            if seen.contains(&x) {
                continue;
            }
            f += 1;
            let mut c = x;
            loop {
                seen.insert(c);
                c = self.face_next(c);
                if c == x {
                    break;
                }
            }
        }
        verts.len() as i64 - e + f
    }
}

pub struct RingIter<'a> {
    map: &'a PlanarMap,
    start: Dart,
    cur: Option<Dart>,
}

impl Iterator for RingIter<'_> {
    type Item = Dart;
    fn next(&mut self) -> Option<Dart> {
        let c = self.cur?;
        let n = self.map.next(c);
        self.cur = if n == self.start { None } else { Some(n) };
        Some(c)
    }
}

pub struct FaceIter<'a> {
    map: &'a PlanarMap,
    start: Dart,
    cur: Option<Dart>,
}

impl Iterator for FaceIter<'_> {
    type Item = Dart;
    fn next(&mut self) -> Option<Dart> {
        let c = self.cur?;
        let n = self.map.face_next(c);
        self.cur = if n == self.start { None } else { Some(n) };
        Some(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_euler() {
        let mut m = PlanarMap::new();
        let a = m.new_vertex(UNCOLORED);
        let b = m.new_vertex(UNCOLORED);
        let d = m.add_edge(a, None, b, None);
        assert_eq!(m.origin(d), a);
        assert_eq!(m.target(d), b);
        assert_eq!(m.euler_characteristic(d), 2);
    }

    #[test]
    fn triangle_euler_and_faces() {
        let mut m = PlanarMap::new();
        let v: Vec<_> = (0..3).map(|_| m.new_vertex(UNCOLORED)).collect();
        let d01 = m.add_edge(v[0], None, v[1], None);
        let d12 = m.add_edge(v[1], Some(m.opp(d01)), v[2], None);
        let d20 = m.add_edge(v[2], Some(m.opp(d12)), v[0], Some(d01));
        assert_eq!(m.euler_characteristic(d01), 2);
        let mut lens: Vec<usize> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for d in [d01, d12, d20, m.opp(d01), m.opp(d12), m.opp(d20)] {
            if seen.contains(&d) {
                continue;
            }
            let f: Vec<_> = m.face(d).collect();
            for &x in &f {
                seen.insert(x);
            }
            lens.push(f.len());
        }
        lens.sort();
        assert_eq!(lens, vec![3, 3]);
    }

    #[test]
    fn merge_and_rollback() {
        let mut m = PlanarMap::new();
        let a = m.new_vertex(UNCOLORED);
        let b = m.new_vertex(UNCOLORED);
        let d_ab = m.add_edge(a, None, b, None);
        let mk = m.mark();
        // build a self-contained candidate (a path glued from two edges),
        // then discard it
        let c = m.new_vertex(UNCOLORED);
        let e = m.new_vertex(UNCOLORED);
        let d_ce = m.add_edge(c, None, e, None);
        let f = m.new_vertex(UNCOLORED);
        let g = m.new_vertex(UNCOLORED);
        let d_fg = m.add_edge(f, None, g, None);
        let ve = m.merge_at(m.opp(d_ce), d_fg);
        assert_eq!(ve, e.min(f));
        assert_eq!(m.degree(ve), 2);
        assert_eq!(m.euler_characteristic(d_ce), 2);
        m.rollback(mk);
        assert_eq!(m.dart_count(), 2);
        assert_eq!(m.degree(b), 1);
        assert_eq!(m.euler_characteristic(d_ab), 2);
        // accepted candidates may be merged; no rollback crosses the merge
        let c2 = m.new_vertex(UNCOLORED);
        let e2 = m.new_vertex(UNCOLORED);
        let d2 = m.add_edge(c2, None, e2, None);
        let vb = m.merge_at(m.opp(d_ab), d2);
        assert_eq!(vb, b.min(c2));
        assert_eq!(m.degree(vb), 2);
        assert_eq!(m.euler_characteristic(d_ab), 2);
    }

    #[test]
    fn k4_is_planar_by_euler() {
        // standard planar embedding of K4
        let mut m = PlanarMap::new();
        let v: Vec<_> = (0..4).map(|_| m.new_vertex(UNCOLORED)).collect();
        // outer triangle 0-1-2, center 3
        let d01 = m.add_edge(v[0], None, v[1], None);
        let d12 = m.add_edge(v[1], Some(m.opp(d01)), v[2], None);
        let d20 = m.add_edge(v[2], Some(m.opp(d12)), v[0], Some(d01));
        // spokes, placed inside each corner
        let d03 = m.add_edge(v[0], Some(d01), v[3], None);
        let d13 = m.add_edge(v[1], Some(d12), v[3], Some(d03 + 1));
        let _d23 = m.add_edge(v[2], Some(d20), v[3], Some(d13 + 1));
        assert_eq!(m.euler_characteristic(d01), 2);
    }
}
