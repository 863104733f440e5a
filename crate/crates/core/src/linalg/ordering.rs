//! Minimum-degree fill-reducing ordering on the quotient graph, with
//! approximate external degrees, element absorption and supervariable
//! detection in the style of approximate minimum degree.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::CsrMatrix;

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Var,
    Elem,
    Absorbed,
    Merged,
}

/// Symmetric adjacency of the pattern of `A + Aᵀ`, diagonal excluded.
fn symmetric_adjacency(a: &CsrMatrix) -> Vec<Vec<u32>> {
    let n = a.nrows();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for i in 0..n {
        for (j, _) in a.row(i) {
            if i != j {
                adj[i].push(j as u32);
                adj[j].push(i as u32);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

fn list_hash(vs: &[u32], es: &[u32]) -> u64 {
    let mut h = 0u64;
    for &v in vs {
        h = h.wrapping_add((v as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    }
    for &e in es {
        h = h.wrapping_add((e as u64 ^ 0xABCD_EF01).wrapping_mul(0xC2B2_AE3D_27D4_EB4F));
    }
    h
}

/// Fill-reducing elimination order for the square matrix `a`, computed on
/// the symmetrized pattern. Returns `perm` with `perm[k]` = the original
/// index eliminated at step `k`.
pub fn minimum_degree(a: &CsrMatrix) -> Vec<usize> {
    assert_eq!(a.nrows(), a.ncols(), "ordering needs a square matrix");
    let n = a.nrows();
    let mut vadj = symmetric_adjacency(a);
    let mut eadj: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut evars: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut ewt = vec![0usize; n];
    let mut state = vec![State::Var; n];
    let mut nv = vec![1usize; n];
    let mut members: Vec<Vec<u32>> = (0..n as u32).map(|i| vec![i]).collect();

    // initial indistinguishable nodes: identical closed neighbourhoods
    {
        let mut keyed: Vec<(u64, u32)> = (0..n)
            .map(|i| {
                let h = list_hash(&vadj[i], &[]).wrapping_add((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                (h, i as u32)
            })
            .collect();
        keyed.sort_unstable();
        let closed = |adj: &[Vec<u32>], i: usize| {
            let mut c = adj[i].clone();
            let pos = c.binary_search(&(i as u32)).unwrap_err();
            c.insert(pos, i as u32);
            c
        };
        let mut g = 0;
        while g < keyed.len() {
            let mut h = g + 1;
            while h < keyed.len() && keyed[h].0 == keyed[g].0 {
                h += 1;
            }
            if h - g > 1 {
                for x in g..h {
                    let i = keyed[x].1 as usize;
                    if state[i] != State::Var {
                        continue;
                    }
                    let ci = closed(&vadj, i);
                    for &(_, jj) in &keyed[x + 1..h] {
                        let j = jj as usize;
                        if state[j] == State::Var && closed(&vadj, j) == ci {
                            nv[i] += nv[j];
                            nv[j] = 0;
                            state[j] = State::Merged;
                            let m = core::mem::take(&mut members[j]);
                            members[i].extend(m);
                        }
                    }
                }
            }
            g = h;
        }
        for i in 0..n {
            if state[i] == State::Var {
                vadj[i].retain(|&v| state[v as usize] == State::Var);
            } else {
                vadj[i] = Vec::new();
            }
        }
    }

    let mut degree = vec![0usize; n];
    let mut heap: BTreeSet<(usize, u32)> = BTreeSet::new();
    for i in 0..n {
        if state[i] == State::Var {
            degree[i] = vadj[i].iter().map(|&v| nv[v as usize]).sum();
            heap.insert((degree[i], i as u32));
        }
    }

    let mut mark = vec![0usize; n];
    let mut stamp = 0usize;
    let mut w = vec![0isize; n];
    let mut wmark = vec![0usize; n];
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut remaining = n;
    let mut lp: Vec<u32> = Vec::new();

    while let Some((_, p32)) = heap.pop_first() {
        let p = p32 as usize;
        stamp += 1;
        mark[p] = stamp;
        lp.clear();
        for &v in &vadj[p] {
            let v = v as usize;
            if state[v] == State::Var && mark[v] != stamp {
                mark[v] = stamp;
                lp.push(v as u32);
            }
        }
        let pe = core::mem::take(&mut eadj[p]);
        for &e in &pe {
            let e = e as usize;
            if state[e] != State::Elem {
                continue;
            }
            for &v in &evars[e] {
                let v = v as usize;
                if state[v] == State::Var && mark[v] != stamp {
                    mark[v] = stamp;
                    lp.push(v as u32);
                }
            }
            state[e] = State::Absorbed;
            evars[e] = Vec::new();
        }
        vadj[p] = Vec::new();
        state[p] = State::Elem;
        order.extend(members[p].iter().map(|&m| m as usize));
        remaining -= nv[p];

        // |Le \ Lp| for every element touching Lp
        for &i in &lp {
            let i = i as usize;
            for &e in &eadj[i] {
                let e = e as usize;
                if state[e] != State::Elem {
                    continue;
                }
                if wmark[e] != stamp {
                    wmark[e] = stamp;
                    w[e] = ewt[e] as isize;
                }
                w[e] -= nv[i] as isize;
            }
        }
        for &i in &lp {
            let i = i as usize;
            for &e in &eadj[i] {
                let e = e as usize;
                if state[e] == State::Elem && wmark[e] == stamp && w[e] <= 0 {
                    // Le ⊆ Lp: covered by the new element
                    state[e] = State::Absorbed;
                    evars[e] = Vec::new();
                }
            }
        }
        for &i in &lp {
            let i = i as usize;
            let st = &state;
            eadj[i].retain(|&e| st[e as usize] == State::Elem);
            eadj[i].push(p as u32);
            let mk = &mark;
            vadj[i].retain(|&v| st[v as usize] == State::Var && mk[v as usize] != stamp);
        }

        // supervariables among Lp
        if lp.len() > 1 {
            let mut keyed: Vec<(u64, u32)> = lp
                .iter()
                .map(|&i| {
                    let i = i as usize;
                    vadj[i].sort_unstable();
                    eadj[i].sort_unstable();
                    (list_hash(&vadj[i], &eadj[i]), i as u32)
                })
                .collect();
            keyed.sort_unstable();
            let mut g = 0;
            while g < keyed.len() {
                let mut h = g + 1;
                while h < keyed.len() && keyed[h].0 == keyed[g].0 {
                    h += 1;
                }
                for x in g..h {
                    let i = keyed[x].1 as usize;
                    if state[i] != State::Var {
                        continue;
                    }
                    for y in x + 1..h {
                        let j = keyed[y].1 as usize;
                        if state[j] == State::Var && vadj[i] == vadj[j] && eadj[i] == eadj[j] {
                            heap.remove(&(degree[j], j as u32));
                            nv[i] += nv[j];
                            nv[j] = 0;
                            state[j] = State::Merged;
                            let m = core::mem::take(&mut members[j]);
                            members[i].extend(m);
                            vadj[j] = Vec::new();
                            eadj[j] = Vec::new();
                        }
                    }
                }
                g = h;
            }
            lp.retain(|&i| state[i as usize] == State::Var);
        }

        let lp_weight: usize = lp.iter().map(|&i| nv[i as usize]).sum();
        ewt[p] = lp_weight;
        for &i in &lp {
            let i = i as usize;
            let mut d = lp_weight - nv[i];
            d += vadj[i].iter().map(|&v| nv[v as usize]).sum::<usize>();
            for &e in &eadj[i] {
                let e = e as usize;
                if e != p {
                    d += if wmark[e] == stamp { w[e].max(0) as usize } else { ewt[e] };
                }
            }
            d = d.min(remaining - nv[i]);
            heap.remove(&(degree[i], i as u32));
            degree[i] = d;
            heap.insert((d, i as u32));
        }
        evars[p] = lp.clone();
    }
    debug_assert_eq!(order.len(), n);
    order
}
