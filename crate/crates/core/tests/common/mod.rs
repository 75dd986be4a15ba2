//! Brute-force oracles shared by the integration tests. None of them call
//! into the normal-form, satiation or boundary machinery they check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use kgraph_core::graph::EdgeId;
use kgraph_core::{Degree, KGraph, Path, PathFamily, VertexId};

/// Every composable edge word from `v` whose colour counts are `n`, with
/// colours in any order.
pub fn raw_words(g: &KGraph, v: VertexId, n: &Degree) -> Vec<Vec<EdgeId>> {
    fn go(g: &KGraph, at: VertexId, rem: &mut Vec<u32>, word: &mut Vec<EdgeId>, out: &mut Vec<Vec<EdgeId>>) {
        if rem.iter().all(|&r| r == 0) {
            out.push(word.clone());
            return;
        }
        for c in 0..rem.len() {
            if rem[c] == 0 {
                continue;
            }
            rem[c] -= 1;
            for &e in g.edges_leaving(at, c) {
                word.push(e);
                go(g, g.edge_source(e), rem, word, out);
                word.pop();
            }
            rem[c] += 1;
        }
    }
    let mut out = Vec::new();
    go(g, v, &mut n.coords().to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Raw words of one `(vertex, degree)` grouped into classes under single
/// square rewrites `x y -> y' x'`.
pub struct WordClasses {
    pub class_of: HashMap<Vec<EdgeId>, usize>,
    pub classes: Vec<Vec<Vec<EdgeId>>>,
}

pub fn word_classes(g: &KGraph, v: VertexId, n: &Degree) -> WordClasses {
    let words = raw_words(g, v, n);
    let index: HashMap<Vec<EdgeId>, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let mut parent: Vec<usize> = (0..words.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (i, w) in words.iter().enumerate() {
        for j in 0..w.len().saturating_sub(1) {
            let (x, y) = (w[j], w[j + 1]);
            if g.color(x) == g.color(y) {
                continue;
            }
            let (y2, x2) = g.swap(x, y).expect("every bicoloured pair lies in a square");
            let mut w2 = w.clone();
            w2[j] = y2;
            w2[j + 1] = x2;
            let k = index[&w2];
            let (a, b) = (find(&mut parent, i), find(&mut parent, k));
            parent[a] = b;
        }
    }
    let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
    let mut class_of = HashMap::new();
    let mut classes: Vec<Vec<Vec<EdgeId>>> = Vec::new();
    for (i, w) in words.iter().enumerate() {
        let root = find(&mut parent, i);
        let next = ids.len();
        let id = *ids.entry(root).or_insert(next);
        if id == classes.len() {
            classes.push(Vec::new());
        }
        classes[id].push(w.clone());
        class_of.insert(w.clone(), id);
    }
    WordClasses { class_of, classes }
}

/// Memoised [`word_classes`].
#[derive(Default)]
pub struct ClassCache {
    map: HashMap<(VertexId, Degree), WordClasses>,
}

impl ClassCache {
    pub fn get(&mut self, g: &KGraph, v: VertexId, n: &Degree) -> &WordClasses {
        self.map.entry((v, n.clone())).or_insert_with(|| word_classes(g, v, n))
    }
}

fn word_end(g: &KGraph, v: VertexId, w: &[EdgeId]) -> VertexId {
    w.last().map_or(v, |&e| g.edge_source(e))
}

fn histogram(g: &KGraph, w: &[EdgeId]) -> Degree {
    let mut c = vec![0u32; g.rank()];
    for &e in w {
        c[g.color(e)] += 1;
    }
    Degree::new(c)
}

/// Checks unique factorisation of `p` at `m` by scanning every word of the
/// class of `p`: all words whose first letters have colour counts `m` must
/// cut into the same pair of classes, and `factor`/`segment` must land in
/// that pair.
pub fn check_factorisation(g: &KGraph, cache: &mut ClassCache, p: &Path, m: &Degree) -> Result<(), String> {
    let d = p.degree().clone();
    let rest = d.checked_sub(m).ok_or("split exceeds degree")?;
    let v = p.range();
    let (class, members) = {
        let wc = cache.get(g, v, &d);
        let class = *wc.class_of.get(p.word()).ok_or("normal-form word is not composable")?;
        (class, wc.classes[class].clone())
    };
    let _ = class;
    let cut = m.total() as usize;
    let mut pairs = BTreeSet::new();
    for w in &members {
        let (head, tail) = w.split_at(cut);
        if histogram(g, head) != *m {
            continue;
        }
        let mid = word_end(g, v, head);
        let a = cache.get(g, v, m).class_of[head];
        let b = cache.get(g, mid, &rest).class_of[tail];
        pairs.insert((mid, a, b));
    }
    if pairs.len() != 1 {
        return Err(format!("{} factorisation pairs of {:?} at {m}", pairs.len(), p));
    }
    let (mid, a, b) = pairs.into_iter().next().unwrap();
    let (mu, nu) = g.factor(p, m).map_err(|e| e.to_string())?;
    let seg_mu = g.segment(p, &Degree::zero(g.rank()), m).map_err(|e| e.to_string())?;
    let seg_nu = g.segment(p, m, &d).map_err(|e| e.to_string())?;
    if seg_mu != mu || seg_nu != nu {
        return Err(format!("segment disagrees with factor on {:?} at {m}", p));
    }
    if mu.source() != mid || cache.get(g, v, m).class_of.get(mu.word()) != Some(&a) {
        return Err(format!("head of {:?} at {m} is in the wrong class", p));
    }
    if cache.get(g, mid, &rest).class_of.get(nu.word()) != Some(&b) {
        return Err(format!("tail of {:?} at {m} is in the wrong class", p));
    }
    Ok(())
}

/// Whether `paths(v, n)` lists exactly one representative of each class.
pub fn check_normal_forms(g: &KGraph, cache: &mut ClassCache, v: VertexId, n: &Degree) -> Result<(), String> {
    let listed = g.paths(v, n);
    let wc = cache.get(g, v, n);
    let hit: BTreeSet<usize> = listed
        .iter()
        .map(|p| wc.class_of.get(p.word()).copied().ok_or_else(|| format!("{:?} is not a word", p)))
        .collect::<Result<_, _>>()?;
    if hit.len() != listed.len() || hit.len() != wc.classes.len() {
        return Err(format!("{} paths for {} classes at {n}", listed.len(), wc.classes.len()));
    }
    Ok(())
}

/// `Ext(mu; E)` straight from the definition: all `alpha` of degree
/// `d(mu) v d(nu) - d(mu)` with `nu` a prefix of `mu alpha`.
pub fn ext_oracle(g: &KGraph, mu: &Path, family: &PathFamily) -> BTreeSet<Path> {
    let mut out = BTreeSet::new();
    for nu in family.iter() {
        let top = mu.degree().join(nu.degree());
        let rest = top.checked_sub(mu.degree()).unwrap();
        for alpha in g.paths(mu.source(), &rest) {
            let joined = g.compose(mu, &alpha).unwrap();
            if g.has_prefix(&joined, nu) {
                out.insert(alpha);
            }
        }
    }
    out
}

/// Exhaustiveness at `v` in a finite graph: every path from `v` shares an
/// extension with some member.
pub fn exhaustive_oracle(g: &KGraph, family: &PathFamily) -> bool {
    let all = g.paths_from(family.range()).unwrap();
    all.iter().all(|lam| {
        family.iter().any(|nu| all.iter().any(|z| g.has_prefix(z, lam) && g.has_prefix(z, nu)))
    })
}

/// Every finite exhaustive family at every vertex of an acyclic graph.
pub struct FeOracle {
    pub order: Vec<VertexId>,
    pub fams: BTreeMap<VertexId, Vec<PathFamily>>,
    pub index: BTreeMap<PathFamily, (VertexId, usize)>,
}

impl FeOracle {
    pub fn new(g: &KGraph) -> Self {
        let mut order: Vec<VertexId> = g.vertices().collect();
        // Sources of paths out of v have strictly fewer paths out of them.
        order.sort_by_key(|&v| g.paths_from(v).unwrap().len());
        let mut fams = BTreeMap::new();
        let mut index = BTreeMap::new();
        for &v in &order {
            let paths: Vec<Path> = g.paths_from(v).unwrap().into_iter().filter(|p| !p.is_vertex()).collect();
            assert!(paths.len() < 20, "too many paths for brute force");
            let mut here = Vec::new();
            for mask in 1u32..(1 << paths.len()) {
                let f = PathFamily::new(v, (0..paths.len()).filter(|i| mask >> i & 1 == 1).map(|i| paths[i].clone()))
                    .unwrap();
                if exhaustive_oracle(g, &f) {
                    here.push(f);
                }
            }
            here.sort();
            for (i, f) in here.iter().enumerate() {
                index.insert(f.clone(), (v, i));
            }
            fams.insert(v, here);
        }
        FeOracle { order, fams, index }
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn all(&self) -> Vec<PathFamily> {
        self.index.keys().cloned().collect()
    }
}

/// A collection as one bitmask of family indices per vertex.
pub type Masks = BTreeMap<VertexId, u64>;

fn has(o: &FeOracle, c: &Masks, f: &PathFamily) -> bool {
    match o.index.get(f) {
        Some(&(v, i)) => c.get(&v).is_some_and(|m| m >> i & 1 == 1),
        None => panic!("constructed family is not finite exhaustive: {:?}", f),
    }
}

fn members_at<'a>(o: &'a FeOracle, c: &Masks, v: VertexId) -> Vec<&'a PathFamily> {
    let m = c.get(&v).copied().unwrap_or(0);
    o.fams[&v].iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, f)| f).collect()
}

fn cartesian<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for opts in choices {
        let mut next = Vec::new();
        for prefix in &out {
            for o in opts {
                let mut p = prefix.clone();
                p.push(o.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// The second to fourth axioms for the members of `c` at `v`, reading the
/// other vertices from `c` as well.
fn axioms_at(g: &KGraph, o: &FeOracle, c: &Masks, v: VertexId) -> bool {
    let from_v = g.paths_from(v).unwrap();
    for e in members_at(o, c, v) {
        // Extension transport.
        for mu in &from_v {
            if e.iter().any(|nu| g.has_prefix(mu, nu)) {
                continue;
            }
            let ext = PathFamily::new(mu.source(), ext_oracle(g, mu, e)).unwrap();
            if !has(o, c, &ext) {
                return false;
            }
        }
        // Truncation.
        let prefixes: Vec<Vec<Path>> = e
            .iter()
            .map(|lam| {
                lam.degree()
                    .box_below()
                    .into_iter()
                    .filter(|n| !n.is_zero())
                    .map(|n| g.segment(lam, &Degree::zero(g.rank()), &n).unwrap())
                    .collect()
            })
            .collect();
        for pick in cartesian(&prefixes) {
            if !has(o, c, &PathFamily::new(v, pick).unwrap()) {
                return false;
            }
        }
        // Grafting.
        let list: Vec<&Path> = e.iter().collect();
        for fmask in 1u32..(1 << list.len()) {
            let grafted: Vec<&Path> = (0..list.len()).filter(|i| fmask >> i & 1 == 1).map(|i| list[i]).collect();
            let options: Vec<Vec<&PathFamily>> = grafted.iter().map(|lam| members_at(o, c, lam.source())).collect();
            if options.iter().any(|opts| opts.is_empty()) {
                continue;
            }
            for pick in cartesian(&options) {
                let mut out: BTreeSet<Path> = list.iter().filter(|p| !grafted.contains(p)).map(|p| (*p).clone()).collect();
                for (lam, f) in grafted.iter().zip(pick) {
                    out.extend(f.iter().map(|x| g.compose(lam, x).unwrap()));
                }
                if !has(o, c, &PathFamily::new(v, out).unwrap()) {
                    return false;
                }
            }
        }
    }
    true
}

/// All upward-closed sets of families at `v`, as masks.
fn upsets(o: &FeOracle, v: VertexId) -> Vec<u64> {
    let fams = &o.fams[&v];
    assert!(fams.len() <= 64);
    let mut by_size: Vec<usize> = (0..fams.len()).collect();
    by_size.sort_by_key(|&i| std::cmp::Reverse(fams[i].len()));
    let supers: Vec<u64> = (0..fams.len())
        .map(|i| {
            (0..fams.len())
                .filter(|&j| j != i && fams[i].is_subset(&fams[j]))
                .fold(0u64, |m, j| m | 1 << j)
        })
        .collect();
    let mut out = Vec::new();
    fn go(k: usize, order: &[usize], supers: &[u64], mask: u64, out: &mut Vec<u64>) {
        if k == order.len() {
            out.push(mask);
            return;
        }
        let i = order[k];
        go(k + 1, order, supers, mask, out);
        if mask & supers[i] == supers[i] {
            go(k + 1, order, supers, mask | 1 << i, out);
        }
    }
    go(0, &by_size, &supers, 0, &mut out);
    out
}

/// Every satiated collection, found vertex by vertex from the sinks up.
pub fn all_satiated(g: &KGraph, o: &FeOracle) -> Vec<Masks> {
    let ups: Vec<Vec<u64>> = o.order.iter().map(|&v| upsets(o, v)).collect();
    let mut out = Vec::new();
    fn go(g: &KGraph, o: &FeOracle, ups: &[Vec<u64>], k: usize, c: &mut Masks, out: &mut Vec<Masks>) {
        if k == o.order.len() {
            out.push(c.clone());
            return;
        }
        let v = o.order[k];
        for &m in &ups[k] {
            c.insert(v, m);
            if axioms_at(g, o, c, v) {
                go(g, o, ups, k + 1, c, out);
            }
        }
        c.remove(&v);
    }
    go(g, o, &ups, 0, &mut BTreeMap::new(), &mut out);
    out
}

/// Whether a collection satisfies all four axioms, checked directly.
pub fn is_satiated_oracle(g: &KGraph, o: &FeOracle, c: &Masks) -> bool {
    o.order.iter().all(|&v| {
        let m = c.get(&v).copied().unwrap_or(0);
        let upward = members_at(o, c, v)
            .iter()
            .all(|e| o.fams[&v].iter().enumerate().all(|(j, f)| !e.is_subset(f) || m >> j & 1 == 1));
        upward && axioms_at(g, o, c, v)
    })
}

pub fn to_masks(o: &FeOracle, families: impl IntoIterator<Item = PathFamily>) -> Masks {
    let mut c = Masks::new();
    for f in families {
        let (v, i) = o.index[&f];
        *c.entry(v).or_insert(0) |= 1 << i;
    }
    c
}

pub fn from_masks(o: &FeOracle, c: &Masks) -> BTreeSet<PathFamily> {
    c.keys().flat_map(|&v| members_at(o, c, v).into_iter().cloned()).collect()
}

pub fn mask_subset(a: &Masks, b: &Masks) -> bool {
    a.iter().all(|(v, m)| m & !b.get(v).copied().unwrap_or(0) == 0)
}
