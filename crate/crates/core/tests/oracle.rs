//! Brute-force oracle for the face-gluing generator: every rotation system of every
//! small graph, every choice of outer face.

use std::collections::BTreeSet;

use matchstick::generator::{enumerate, SearchConfig};
use matchstick::{CanonicalCode, PlaneGraph};

/// Edge sets on `n` labelled vertices with maximum degree 4, connected and bridgeless,
/// one per isomorphism class. Labels are sorted by a vertex invariant so that only
/// permutations inside invariant classes need checking.
fn graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    // Bit masks of the pairs at each vertex.
    let incident: Vec<u32> = (0..n)
        .map(|v| (0..pairs.len()).filter(|&i| pairs[i].0 == v || pairs[i].1 == v).fold(0, |m, i| m | 1 << i))
        .collect();
    'masks: for mask in 0u32..1 << pairs.len() {
        let mut deg = [0usize; 8];
        for v in 0..n {
            deg[v] = (mask & incident[v]).count_ones() as usize;
            if !(2..=4).contains(&deg[v]) || (v > 0 && deg[v - 1] < deg[v]) {
                continue 'masks;
            }
        }
        let edges: Vec<(usize, usize)> = (0..pairs.len()).filter(|i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
        let mut inv = [0u32; 8];
        for v in 0..n {
            let mut nd = [0usize; 5];
            for &(a, b) in &edges {
                if a == v {
                    nd[deg[b]] += 1;
                } else if b == v {
                    nd[deg[a]] += 1;
                }
            }
            inv[v] = (deg[v] * 125 + nd[4] * 25 + nd[3] * 5 + nd[2]) as u32;
            if v > 0 && inv[v - 1] < inv[v] {
                continue 'masks;
            }
        }
        if !connected(n, &edges, None) || (0..edges.len()).any(|i| !connected(n, &edges, Some(i))) {
            continue;
        }
        if seen.insert(canonical_adjacency(n, &edges, &inv[..n])) {
            out.push(edges);
        }
    }
    out
}

fn connected(n: usize, edges: &[(usize, usize)], skip: Option<usize>) -> bool {
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        if c[x] != x {
            let r = find(c, c[x]);
            c[x] = r;
        }
        c[x]
    }
    for (i, &(u, v)) in edges.iter().enumerate() {
        if Some(i) != skip {
            let (a, b) = (find(&mut comp, u), find(&mut comp, v));
            comp[a] = b;
        }
    }
    let r = find(&mut comp, 0);
    (0..n).all(|v| find(&mut comp, v) == r)
}

/// Smallest adjacency matrix, read column by column, over the relabellings that keep
/// `inv` sorted. Branches whose prefix already exceeds the best are cut.
fn canonical_adjacency(n: usize, edges: &[(usize, usize)], inv: &[u32]) -> u64 {
    let mut adj = [0u8; 8];
    for &(u, v) in edges {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    let mut best = [u8::MAX; 8];
    let mut order = [0usize; 8];
    descend(n, &adj, inv, 0, 0, &mut order, &mut [0; 8], &mut best);
    best[..n].iter().fold(0u64, |k, &c| k << 8 | c as u64)
}

#[allow(clippy::too_many_arguments)]
fn descend(
    n: usize,
    adj: &[u8; 8],
    inv: &[u32],
    j: usize,
    used: u8,
    order: &mut [usize; 8],
    cur: &mut [u8; 8],
    best: &mut [u8; 8],
) {
    if j == n {
        if cur[..n] < best[..n] {
            *best = *cur;
        }
        return;
    }
    for v in 0..n {
        if used >> v & 1 == 1 || inv[v] != inv[j] {
            continue;
        }
        let col = (0..j).fold(0u8, |c, i| c << 1 | (adj[order[i]] >> v & 1));
        cur[j] = col;
        if cur[..=j] > best[..=j] {
            continue;
        }
        order[j] = v;
        descend(n, adj, inv, j + 1, used | 1 << v, order, cur, best);
    }
}

/// Faces of a rotation system as dart cycles; a dart `(u, v)` is followed by
/// `(v, w)` where `w` precedes `u` in the rotation at `v`.
fn faces(rot: &[Vec<usize>]) -> Vec<Vec<(usize, usize)>> {
    let n = rot.len();
    // pos[v * n + u] is the index of `u` in the rotation at `v`.
    let mut pos = vec![0usize; n * n];
    for v in 0..n {
        for (i, &u) in rot[v].iter().enumerate() {
            pos[v * n + u] = i;
        }
    }
    let mut done = vec![false; n * n];
    let mut out = Vec::new();
    for u in 0..n {
        for &v in &rot[u] {
            if done[u * n + v] {
                continue;
            }
            let mut f = Vec::new();
            let (mut a, mut b) = (u, v);
            while !done[a * n + b] {
                done[a * n + b] = true;
                f.push((a, b));
                let r = &rot[b];
                let w = r[(pos[b * n + a] + r.len() - 1) % r.len()];
                (a, b) = (b, w);
            }
            out.push(f);
        }
    }
    out
}

fn rotations(n: usize, edges: &[(usize, usize)], f: &mut dyn FnMut(&[Vec<usize>])) {
    let mut nbrs = vec![Vec::new(); n];
    for &(u, v) in edges {
        nbrs[u].push(v);
        nbrs[v].push(u);
    }
    // All cyclic orders: fix the first neighbour, permute the rest.
    fn orders(rest: &mut Vec<usize>, i: usize, out: &mut Vec<Vec<usize>>, first: usize) {
        if i == rest.len() {
            let mut r = vec![first];
            r.extend(rest.iter());
            out.push(r);
            return;
        }
        for j in i..rest.len() {
            rest.swap(i, j);
            orders(rest, i + 1, out, first);
            rest.swap(i, j);
        }
    }
    let choices: Vec<Vec<Vec<usize>>> = nbrs
        .iter()
        .map(|nb| {
            let mut out = Vec::new();
            orders(&mut nb[1..].to_vec(), 0, &mut out, nb[0]);
            out
        })
        .collect();
    let mut idx = vec![0; n];
    let mut rot: Vec<Vec<usize>> = (0..n).map(|v| choices[v][0].clone()).collect();
    loop {
        for v in 0..n {
            rot[v].clone_from(&choices[v][idx[v]]);
        }
        f(&rot);
        let mut v = 0;
        while v < n {
            idx[v] += 1;
            if idx[v] < choices[v].len() {
                break;
            }
            idx[v] = 0;
            v += 1;
        }
        if v == n {
            return;
        }
    }
}

/// Plane graphs with at most `max_n` vertices whose inner faces are simple cycles and
/// whose vertices off the outer face have degree 4.
fn oracle(max_n: usize) -> BTreeSet<CanonicalCode> {
    let mut out = BTreeSet::new();
    for n in 3..=max_n {
        for edges in graphs(n) {
            rotations(n, &edges, &mut |rot| {
                let fs = faces(rot);
                if n as i64 - edges.len() as i64 + fs.len() as i64 != 2 {
                    return;
                }
                for (o, outer) in fs.iter().enumerate() {
                    let on_outer: BTreeSet<usize> = outer.iter().map(|d| d.0).collect();
                    if (0..n).any(|v| !on_outer.contains(&v) && rot[v].len() != 4) {
                        continue;
                    }
                    let simple = fs.iter().enumerate().filter(|(i, _)| *i != o).all(|(_, f)| {
                        f.iter().map(|d| d.0).collect::<BTreeSet<_>>().len() == f.len()
                    });
                    if !simple {
                        continue;
                    }
                    let g = PlaneGraph::from_rotation_system(rot.to_vec(), outer[0]).unwrap();
                    out.insert(g.canonical_code());
                }
            });
        }
    }
    out
}

fn generated(max_n: usize) -> BTreeSet<CanonicalCode> {
    let mut cfg = SearchConfig::unfiltered(max_n);
    cfg.parallel_width = 1;
    let mut out: Vec<matchstick::generator::Survivor> = Vec::new();
    enumerate(&cfg, &mut out).unwrap();
    let codes: BTreeSet<CanonicalCode> = out.iter().map(|s| s.node.code.clone()).collect();
    assert_eq!(codes.len(), out.len(), "duplicate survivors");
    codes
}

fn check(max_n: usize) {
    let want = oracle(max_n);
    let got = generated(max_n);
    let missing: Vec<_> = want.difference(&got).collect();
    let extra: Vec<_> = got.difference(&want).collect();
    assert!(missing.is_empty() && extra.is_empty(), "n <= {max_n}: missing {missing:?}, extra {extra:?}");
}

#[test]
fn generator_matches_oracle_to_six() {
    check(6);
}

#[test]
fn generator_matches_oracle_to_eight() {
    check(8);
}
