use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::group::{Perm, PermGroup};
use super::pattern::{raw_matching, Matching, PairPattern, Tuple, Vertex};
use crate::error::{Error, Result};
use crate::exactnum::{parse_ratfunc, RationalFunc};

/// One vertex orbit: `arity`-tuples of distinct labels modulo a group.
#[derive(Clone, Debug)]
pub struct VertexOrbitSpec {
    pub name: String,
    pub arity: usize,
    pub generators: Vec<Perm>,
    group: PermGroup,
    // Group elements as byte arrays for the hot loops.
    perms: Vec<[u8; 8]>,
}

impl VertexOrbitSpec {
    pub fn new(name: &str, arity: usize, generators: Vec<Perm>) -> Result<Self> {
        if arity > 8 {
            return Err(Error::InvalidSpec(format!("orbit `{name}`: arity {arity} exceeds 8")));
        }
        let group = PermGroup::generate(arity, &generators)
            .map_err(|e| Error::InvalidSpec(format!("orbit `{name}`: {e}")))?;
        let perms = group
            .elements()
            .iter()
            .map(|p| {
                let mut a = [0u8; 8];
                for (i, &x) in p.iter().enumerate() {
                    a[i] = x as u8;
                }
                a
            })
            .collect();
        Ok(VertexOrbitSpec {
            name: name.to_string(),
            arity,
            generators,
            group,
            perms,
        })
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }
}

/// An edge orbit and the weighted-walk class it belongs to.
#[derive(Clone, Debug)]
pub struct EdgeOrbit {
    pub pattern: PairPattern,
    pub class: usize,
}

/// A coefficient of a user-supplied walk.
#[derive(Clone, Debug)]
pub struct WalkEntry {
    pub pattern: PairPattern,
    pub coefficient: RationalFunc,
}

/// Blueprint of a graph family.
#[derive(Clone, Debug)]
pub struct FiGraphSpec {
    pub name: String,
    pub vertex_orbits: Vec<VertexOrbitSpec>,
    /// Closed under transposition, sorted by pattern.
    pub edges: Vec<EdgeOrbit>,
    pub class_names: Vec<String>,
    pub loops_allowed: bool,
    /// Labels available at index `n` are `[n - shift]`.
    pub shift: usize,
    pub min_n: Option<i64>,
    pub walk: Option<Vec<WalkEntry>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitDoc {
    pub name: String,
    pub arity: usize,
    #[serde(default)]
    pub generators: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub left: String,
    pub right: String,
    #[serde(default)]
    pub matches: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WalkDoc {
    pub left: String,
    pub right: String,
    #[serde(default)]
    pub matches: Vec<[usize; 2]>,
    pub coefficient: String,
}

/// JSON form of a family spec.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpecDoc {
    #[serde(default)]
    pub name: String,
    pub vertex_orbits: Vec<OrbitDoc>,
    pub edge_orbits: Vec<EdgeDoc>,
    #[serde(default)]
    pub loops_allowed: bool,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub shift: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_n: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walk: Option<Vec<WalkDoc>>,
}

fn is_zero(v: &usize) -> bool {
    *v == 0
}

impl FiGraphSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpecDoc = serde_json::from_str(text)?;
        Self::from_doc(&doc)
    }

    pub fn from_doc(doc: &SpecDoc) -> Result<Self> {
        let mut orbits = Vec::new();
        for o in &doc.vertex_orbits {
            if o.name.is_empty() || orbits.iter().any(|x: &VertexOrbitSpec| x.name == o.name) {
                return Err(Error::InvalidSpec(format!("vertex orbit name `{}` is empty or repeated", o.name)));
            }
            orbits.push(VertexOrbitSpec::new(&o.name, o.arity, o.generators.clone())?);
        }
        if orbits.is_empty() {
            return Err(Error::InvalidSpec("no vertex orbits".into()));
        }
        let mut spec = FiGraphSpec {
            name: doc.name.clone(),
            vertex_orbits: orbits,
            edges: Vec::new(),
            class_names: Vec::new(),
            loops_allowed: doc.loops_allowed,
            shift: doc.shift,
            min_n: doc.min_n,
            walk: None,
        };
        let mut classes: BTreeMap<String, usize> = BTreeMap::new();
        let mut by_pattern: BTreeMap<PairPattern, usize> = BTreeMap::new();
        for (idx, e) in doc.edge_orbits.iter().enumerate() {
            let ctx = format!("edge_orbits[{idx}] ({}>{} {:?})", e.left, e.right, e.matches);
            let p = spec.pattern_from_parts(&e.left, &e.right, &e.matches).map_err(|err| Error::InvalidSpec(format!("{ctx}: {err}")))?;
            if spec.is_diagonal(&p) && !spec.loops_allowed {
                return Err(Error::InvalidSpec(format!("{ctx}: loop pattern but loops_allowed is false")));
            }
            let t = spec.transpose(&p);
            let label = match &e.class {
                Some(c) => c.clone(),
                None => spec.fmt_pattern(p.clone().min(t.clone())),
            };
            let next = classes.len();
            let class = *classes.entry(label).or_insert(next);
            for q in [p, t] {
                if let Some(&old) = by_pattern.get(&q) {
                    if old != class {
                        return Err(Error::InvalidSpec(format!("{ctx}: pattern listed in two classes")));
                    }
                }
                by_pattern.insert(q, class);
            }
        }
        let mut names = vec![String::new(); classes.len()];
        for (k, v) in classes {
            names[v] = k;
        }
        spec.class_names = names;
        spec.edges = by_pattern.into_iter().map(|(pattern, class)| EdgeOrbit { pattern, class }).collect();
        if let Some(w) = &doc.walk {
            spec.walk = Some(spec.parse_walk_docs(w)?);
        }
        Ok(spec)
    }

    pub fn parse_walk_docs(&self, docs: &[WalkDoc]) -> Result<Vec<WalkEntry>> {
        let mut out = Vec::new();
        for (idx, w) in docs.iter().enumerate() {
            let ctx = format!("walk[{idx}] ({}>{} {:?})", w.left, w.right, w.matches);
            let pattern = self.pattern_from_parts(&w.left, &w.right, &w.matches).map_err(|err| Error::InvalidSpec(format!("{ctx}: {err}")))?;
            let coefficient = parse_ratfunc(&w.coefficient).map_err(|err| Error::InvalidSpec(format!("{ctx}: {err}")))?;
            out.push(WalkEntry { pattern, coefficient });
        }
        Ok(out)
    }

    /// Canonical JSON form. Both orientations of every edge are listed.
    pub fn to_doc(&self) -> SpecDoc {
        let matches_doc = |p: &PairPattern| p.matches.iter().map(|&(i, j)| [i as usize, j as usize]).collect();
        SpecDoc {
            name: self.name.clone(),
            vertex_orbits: self
                .vertex_orbits
                .iter()
                .map(|o| OrbitDoc {
                    name: o.name.clone(),
                    arity: o.arity,
                    generators: o.generators.clone(),
                })
                .collect(),
            edge_orbits: self
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    left: self.vertex_orbits[e.pattern.left].name.clone(),
                    right: self.vertex_orbits[e.pattern.right].name.clone(),
                    matches: matches_doc(&e.pattern),
                    class: Some(self.class_names[e.class].clone()),
                })
                .collect(),
            loops_allowed: self.loops_allowed,
            shift: self.shift,
            min_n: self.min_n,
            walk: self.walk.as_ref().map(|w| {
                w.iter()
                    .map(|e| WalkDoc {
                        left: self.vertex_orbits[e.pattern.left].name.clone(),
                        right: self.vertex_orbits[e.pattern.right].name.clone(),
                        matches: matches_doc(&e.pattern),
                        coefficient: e.coefficient.to_string(),
                    })
                    .collect()
            }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("spec serializes")
    }

    pub fn orbit_index(&self, name: &str) -> Result<usize> {
        self.vertex_orbits
            .iter()
            .position(|o| o.name == name)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown vertex orbit `{name}`")))
    }

    pub fn arity(&self, orbit: usize) -> usize {
        self.vertex_orbits[orbit].arity
    }

    pub fn max_arity(&self) -> usize {
        self.vertex_orbits.iter().map(|o| o.arity).max().unwrap_or(0)
    }

    /// Number of labels available at index `n`.
    pub fn labels_at(&self, n: i64) -> i64 {
        n - self.shift as i64
    }

    /// Smallest `n` at which every vertex orbit is nonempty.
    pub fn min_instantiable_n(&self) -> i64 {
        (self.shift + self.max_arity()) as i64
    }

    /// First `n` from which every pair orbit is populated and a fresh
    /// label remains: `shift + max(k_u + k_v) + 1`, unless overridden.
    pub fn stabilization_bound(&self) -> i64 {
        self.min_n.unwrap_or((self.shift + 2 * self.max_arity() + 1) as i64)
    }

    pub fn canonical_tuple(&self, orbit: usize, t: &[u16]) -> Tuple {
        let o = &self.vertex_orbits[orbit];
        let k = o.arity;
        if o.perms.len() == 1 {
            return t.iter().copied().collect();
        }
        let mut best: [u16; 8] = [u16::MAX; 8];
        let mut cur = [0u16; 8];
        for p in &o.perms {
            for i in 0..k {
                cur[i] = t[p[i] as usize];
            }
            if cur[..k] < best[..k] {
                best[..k].copy_from_slice(&cur[..k]);
            }
        }
        best[..k].iter().copied().collect()
    }

    pub fn canonical_pattern(&self, left: usize, right: usize, m: &Matching) -> PairPattern {
        let (lo, ro) = (&self.vertex_orbits[left], &self.vertex_orbits[right]);
        let mut best: Option<Matching> = None;
        let mut cur = m.clone();
        for hl in &lo.perms {
            for hr in &ro.perms {
                for (slot, &(i, j)) in cur.iter_mut().zip(m.iter()) {
                    *slot = (hl[i as usize], hr[j as usize]);
                }
                cur.sort_unstable();
                if best.as_ref().is_none_or(|b| cur < *b) {
                    best = Some(cur.clone());
                }
            }
        }
        PairPattern {
            left,
            right,
            matches: best.unwrap_or_default(),
        }
    }

    /// Stable orbit of the ordered pair `(u, v)`.
    pub fn classify(&self, u: &Vertex, v: &Vertex) -> PairPattern {
        self.canonical_pattern(u.orbit, v.orbit, &raw_matching(&u.labels, &v.labels))
    }

    pub fn transpose(&self, p: &PairPattern) -> PairPattern {
        let m: Matching = p.matches.iter().map(|&(i, j)| (j, i)).collect();
        self.canonical_pattern(p.right, p.left, &m)
    }

    pub fn diagonal(&self, orbit: usize) -> PairPattern {
        let m: Matching = (0..self.arity(orbit) as u8).map(|i| (i, i)).collect();
        self.canonical_pattern(orbit, orbit, &m)
    }

    pub fn is_diagonal(&self, p: &PairPattern) -> bool {
        p.left == p.right && *p == self.diagonal(p.left)
    }

    /// Labels used by one representative pair of the pattern.
    pub fn symbols(&self, p: &PairPattern) -> usize {
        p.symbols(self.arity(p.left), self.arity(p.right))
    }

    fn pattern_from_parts(&self, left: &str, right: &str, matches: &[[usize; 2]]) -> Result<PairPattern> {
        let l = self.orbit_index(left)?;
        let r = self.orbit_index(right)?;
        let (kl, kr) = (self.arity(l), self.arity(r));
        let mut used_l = vec![false; kl];
        let mut used_r = vec![false; kr];
        let mut m = Matching::new();
        for &[i, j] in matches {
            if i >= kl || j >= kr {
                return Err(Error::InvalidSpec(format!("slot pair ({i}, {j}) out of range")));
            }
            if std::mem::replace(&mut used_l[i], true) || std::mem::replace(&mut used_r[j], true) {
                return Err(Error::InvalidSpec(format!("slot in ({i}, {j}) matched twice")));
            }
            m.push((i as u8, j as u8));
        }
        Ok(self.canonical_pattern(l, r, &m))
    }

    /// `left>right[i=j,...]`
    pub fn fmt_pattern(&self, p: PairPattern) -> String {
        let mut s = format!("{}>{}[", self.vertex_orbits[p.left].name, self.vertex_orbits[p.right].name);
        for (idx, (i, j)) in p.matches.iter().enumerate() {
            if idx > 0 {
                s.push(',');
            }
            let _ = write!(s, "{i}={j}");
        }
        s.push(']');
        s
    }

    pub fn parse_pattern(&self, text: &str) -> Result<PairPattern> {
        let bad = || Error::InvalidSpec(format!("cannot parse pattern `{text}`; expected left>right[i=j,...]"));
        let (names, rest) = text.split_once('[').ok_or_else(bad)?;
        let (l, r) = names.split_once('>').ok_or_else(bad)?;
        let body = rest.strip_suffix(']').ok_or_else(bad)?;
        let mut matches = Vec::new();
        for part in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (i, j) = part.split_once('=').ok_or_else(bad)?;
            matches.push([i.trim().parse().map_err(|_| bad())?, j.trim().parse().map_err(|_| bad())?]);
        }
        self.pattern_from_parts(l.trim(), r.trim(), &matches)
    }

    /// Canonical tuples `w` with `(z, w)` in the orbit `p`, using labels
    /// `0..labels`. `z` must be a tuple of orbit `p.left`.
    pub fn partners(&self, z: &[u16], p: &PairPattern, labels: usize) -> Vec<Tuple> {
        let lo = &self.vertex_orbits[p.left];
        let kr = self.arity(p.right);
        let mut images: Vec<Matching> = lo
            .perms
            .iter()
            .map(|h| {
                let mut m: Matching = p.matches.iter().map(|&(i, j)| (h[i as usize], j)).collect();
                m.sort_unstable();
                m
            })
            .collect();
        images.sort();
        images.dedup();
        let free: Vec<u16> = (0..labels as u16).filter(|x| !z.contains(x)).collect();
        let mut out = Vec::new();
        let mut w = [0u16; 8];
        for m in &images {
            let mut fixed = [false; 8];
            for &(i, j) in m {
                w[j as usize] = z[i as usize];
                fixed[j as usize] = true;
            }
            let slots: Vec<usize> = (0..kr).filter(|&j| !fixed[j]).collect();
            let mut used = vec![false; free.len()];
            fill(&slots, 0, &free, &mut used, &mut w, &mut |w| {
                out.push(self.canonical_tuple(p.right, &w[..kr]));
            });
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Representative pair `(z, y)` of a pattern with `y = (0, 1, ...)`.
    pub fn representative(&self, p: &PairPattern) -> (Vertex, Vertex) {
        let ky = self.arity(p.right);
        let kz = self.arity(p.left);
        let y: Tuple = (0..ky as u16).collect();
        let mut z = [0u16; 8];
        let mut next = ky as u16;
        for (i, slot) in z.iter_mut().enumerate().take(kz) {
            match p.matches.iter().find(|m| m.0 as usize == i) {
                Some(&(_, j)) => *slot = j as u16,
                None => {
                    *slot = next;
                    next += 1;
                }
            }
        }
        let zt = self.canonical_tuple(p.left, &z[..kz]);
        (
            Vertex { orbit: p.left, labels: zt },
            Vertex { orbit: p.right, labels: self.canonical_tuple(p.right, &y) },
        )
    }

    /// All stable orbits of pairs `(z, y)` with `y` in the roof orbit, sorted.
    pub fn roofed_states(&self, roof: usize) -> Vec<PairPattern> {
        let ky = self.arity(roof);
        let mut out = Vec::new();
        for z in 0..self.vertex_orbits.len() {
            let kz = self.arity(z);
            let mut m = Matching::new();
            let mut used = vec![false; ky];
            partial_injections(0, kz, ky, &mut used, &mut m, &mut |m| {
                out.push(self.canonical_pattern(z, roof, m));
            });
        }
        out.sort();
        out.dedup();
        out
    }

    /// Patterns of every pair orbit `(u, v)` of the family.
    pub fn all_pair_orbits(&self) -> Vec<PairPattern> {
        (0..self.vertex_orbits.len()).flat_map(|r| self.roofed_states(r)).collect()
    }

    pub fn edge_patterns(&self) -> impl Iterator<Item = &PairPattern> {
        self.edges.iter().map(|e| &e.pattern)
    }

    pub fn edge_index(&self) -> HashMap<PairPattern, usize> {
        self.edges.iter().enumerate().map(|(i, e)| (e.pattern.clone(), i)).collect()
    }
}

fn fill(slots: &[usize], pos: usize, free: &[u16], used: &mut [bool], w: &mut [u16; 8], emit: &mut impl FnMut(&[u16; 8])) {
    if pos == slots.len() {
        emit(w);
        return;
    }
    for (idx, &lab) in free.iter().enumerate() {
        if used[idx] {
            continue;
        }
        used[idx] = true;
        w[slots[pos]] = lab;
        fill(slots, pos + 1, free, used, w, emit);
        used[idx] = false;
    }
}

fn partial_injections(i: usize, kz: usize, ky: usize, used: &mut [bool], m: &mut Matching, emit: &mut impl FnMut(&Matching)) {
    if i == kz {
        emit(m);
        return;
    }
    partial_injections(i + 1, kz, ky, used, m, emit);
    for j in 0..ky {
        if used[j] {
            continue;
        }
        used[j] = true;
        m.push((i as u8, j as u8));
        partial_injections(i + 1, kz, ky, used, m, emit);
        m.pop();
        used[j] = false;
    }
}
