//! Independent reference computations on plain maps, shared by the
//! integration tests. Nothing here calls the library's composition,
//! meet or cocycle arithmetic.

#![allow(dead_code)]

use cartanlab::extension::{Cochain, CocycleTable};
use cartanlab::semigroup::{FiniteInverseMonoid, PartialBijection};

/// A partial map as `Option<usize>` per atom.
pub type Graph = Vec<Option<usize>>;

pub fn graph(s: &PartialBijection) -> Graph {
    (0..s.atoms()).map(|x| s.apply(x)).collect()
}

pub fn to_bijection(g: &Graph) -> PartialBijection {
    let pairs: Vec<(usize, usize)> =
        g.iter().enumerate().filter_map(|(x, y)| y.map(|y| (x, y))).collect();
    PartialBijection::from_pairs(g.len(), &pairs).unwrap()
}

/// `(st)(x) = s(t(x))`.
pub fn compose(s: &Graph, t: &Graph) -> Graph {
    t.iter().map(|y| y.and_then(|y| s[y])).collect()
}

pub fn inverse(s: &Graph) -> Graph {
    let mut out = vec![None; s.len()];
    for (x, y) in s.iter().enumerate() {
        if let Some(y) = y {
            out[*y] = Some(x);
        }
    }
    out
}

/// Graph inclusion.
pub fn leq(s: &Graph, t: &Graph) -> bool {
    s.iter().zip(t).all(|(a, b)| a.is_none() || a == b)
}

/// Graph intersection.
pub fn meet(s: &Graph, t: &Graph) -> Graph {
    s.iter().zip(t).map(|(a, b)| if a == b { *a } else { None }).collect()
}

/// Graph union of pairwise orthogonal maps.
pub fn join(atoms: usize, family: &[Graph]) -> Option<Graph> {
    let mut out = vec![None; atoms];
    let mut hit = vec![false; atoms];
    for g in family {
        for (x, y) in g.iter().enumerate() {
            if let Some(y) = y {
                if out[x].is_some() || hit[*y] {
                    return None;
                }
                out[x] = Some(*y);
                hit[*y] = true;
            }
        }
    }
    Some(out)
}

pub fn is_zero(s: &Graph) -> bool {
    s.iter().all(Option::is_none)
}

pub fn fixed(s: &Graph) -> Graph {
    s.iter().enumerate().map(|(x, y)| if *y == Some(x) { Some(x) } else { None }).collect()
}

/// Every subset of `0..n`, as index lists.
pub fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
}

/// Phase of a cocycle entry at atom `y`, zero off the domain.
pub fn c_at(monoid: &FiniteInverseMonoid, c: &CocycleTable, s: usize, t: usize, y: usize) -> i64 {
    let st = compose(&graph(monoid.get(s)), &graph(monoid.get(t)));
    if st[y].is_none() {
        return 0;
    }
    let position = (0..y).filter(|&x| st[x].is_some()).count();
    i64::from(c.entry(s, t)[position])
}

/// Checks normalization and `c(t,u) + c(s,tu) = c(s,t)∘u + c(st,u)` on
/// `dom(stu)` straight from the table.
pub fn cocycle_ok(monoid: &FiniteInverseMonoid, c: &CocycleTable) -> bool {
    let k = i64::from(c.k());
    let n = monoid.len();
    let g: Vec<Graph> = monoid.iter().map(graph).collect();
    let index = |h: &Graph| monoid.index_of(&to_bijection(h)).unwrap();
    for s in 0..n {
        for t in 0..n {
            let idem = g[s] == fixed(&g[s]) || g[t] == fixed(&g[t]);
            let st = compose(&g[s], &g[t]);
            if idem && (0..monoid.atoms()).any(|y| c_at(monoid, c, s, t, y) != 0 && st[y].is_some()) {
                return false;
            }
            let st_i = index(&st);
            for u in 0..n {
                let tu = index(&compose(&g[t], &g[u]));
                let stu = compose(&st, &g[u]);
                for y in 0..monoid.atoms() {
                    if stu[y].is_none() {
                        continue;
                    }
                    let uy = g[u][y].unwrap();
                    let lhs = c_at(monoid, c, t, u, y) + c_at(monoid, c, s, tu, y);
                    let rhs = c_at(monoid, c, s, t, uy) + c_at(monoid, c, st_i, u, y);
                    if (lhs - rhs).rem_euclid(k) != 0 {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// `c2 − c1 = δb` entrywise, with `δb(s,t)(y) = b(s)(t y) + b(t)(y) − b(st)(y)`.
pub fn differs_by_coboundary(
    monoid: &FiniteInverseMonoid,
    c1: &CocycleTable,
    c2: &CocycleTable,
    b: &Cochain,
) -> bool {
    let k = i64::from(c1.k());
    let g: Vec<Graph> = monoid.iter().map(graph).collect();
    let b_at = |s: usize, y: usize| -> i64 {
        let position = (0..y).filter(|&x| g[s][x].is_some()).count();
        i64::from(b.values(s)[position])
    };
    for s in 0..monoid.len() {
        for t in 0..monoid.len() {
            let st = compose(&g[s], &g[t]);
            let st_i = monoid.index_of(&to_bijection(&st)).unwrap();
            for y in 0..monoid.atoms() {
                if st[y].is_none() {
                    continue;
                }
                let ty = g[t][y].unwrap();
                let delta = b_at(s, ty) + b_at(t, y) - b_at(st_i, y);
                let diff = c_at(monoid, c2, s, t, y) - c_at(monoid, c1, s, t, y);
                if (diff - delta).rem_euclid(k) != 0 {
                    return false;
                }
            }
        }
    }
    true
}

/// The monoid of partial bijections whose graphs stay inside the blocks.
pub fn block_monoid_oracle(atoms: usize, blocks: &[Vec<usize>]) -> Vec<Graph> {
    let block_of = |x: usize| blocks.iter().position(|b| b.contains(&x)).unwrap();
    let mut out = Vec::new();
    let mut current = vec![None; atoms];
    fn go(x: usize, current: &mut Graph, out: &mut Vec<Graph>, ok: &dyn Fn(usize, usize) -> bool) {
        if x == current.len() {
            out.push(current.clone());
            return;
        }
        current[x] = None;
        go(x + 1, current, out, ok);
        for y in 0..current.len() {
            if ok(x, y) && !current[..x].contains(&Some(y)) {
                current[x] = Some(y);
                go(x + 1, current, out, ok);
            }
        }
        current[x] = None;
    }
    go(0, &mut current, &mut out, &|x, y| block_of(x) == block_of(y));
    out
}
