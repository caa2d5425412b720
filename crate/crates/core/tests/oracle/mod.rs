//! Oracles computed without the library's elimination, track or secondary code.

#![allow(dead_code)]

/// Rank of an integer matrix modulo a prime, by plain row reduction.
pub fn rank_mod(rows: &[Vec<i64>], p: i64) -> usize {
    let mut a: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|x| x.rem_euclid(p)).collect()).collect();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..a.len()).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, piv);
        let inv = (1..p).find(|k| (a[rank][c] * k) % p == 1).unwrap();
        for x in a[rank].iter_mut() {
            *x = (*x * inv) % p;
        }
        for r in 0..a.len() {
            if r != rank && a[r][c] != 0 {
                let f = a[r][c];
                for k in 0..cols {
                    a[r][k] = (a[r][k] - f * a[rank][k]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// `Ext^{s,t}_{F_2[x]/(x^2)}(F_2, F_2)` from the hand periodic resolution
/// `P_n = Λ·g_n`, `|g_n| = n`, `d(g_{n+1}) = x g_n`.
///
/// `Hom^{-t}(P_n, F_2)` is one-dimensional when `n = t` (the map `g_n -> 1`)
/// and zero otherwise; the coboundary `φ -> φ d` sends `g_{n+1}` to `φ(x g_n) = 0`.
pub fn periodic_e1_ext(s_max: usize, t_max: i32) -> Vec<Vec<usize>> {
    let hom_dim = |n: usize, t: i32| usize::from(n as i32 == t);
    let mut out = vec![vec![0; (t_max + 1) as usize]; s_max + 1];
    for s in 0..=s_max {
        for t in 0..=t_max {
            // coboundary matrices in and out, written out entrywise
            let out_rank = {
                let (r, c) = (hom_dim(s + 1, t), hom_dim(s, t));
                rank_mod(&vec![vec![0; c]; r], 2)
            };
            let in_rank = if s == 0 {
                0
            } else {
                let (r, c) = (hom_dim(s, t), hom_dim(s - 1, t));
                rank_mod(&vec![vec![0; c]; r], 2)
            };
            out[s][t as usize] = hom_dim(s, t) - out_rank - in_rank;
        }
    }
    out
}

/// Lift-twice-divide-by-p: the periodic resolution lifted to `Z/4[x]/(x^2 - 2a)`
/// has `d̃ d̃ (g_{n+2}) = x^2 g_n = 2a g_n`, so `δ̂ = a` and, for the class
/// `h^s : g_s -> 1` with coefficients in `F_2` (where a track `0 => c d` can
/// be taken to be zero because `c(x g) = 0`), `d2(h^s)` is `a·h^{s+2}`. The
/// target sits in internal degree `s + 2` since `Γ(g_{s+2}) = a` in degree 0.
///
/// `x_squared` holds the coefficients of `x·x` on the basis `(1, x)`.
pub fn divided_lift_d2(x_squared: [i64; 2], s_max: usize) -> Vec<Option<i32>> {
    assert!(x_squared.iter().all(|c| c % 2 == 0), "x^2 must vanish mod 2");
    let delta_unit = (x_squared[0] / 2).rem_euclid(2);
    (0..=s_max).map(|s| (delta_unit != 0).then_some(s as i32 + 2)).collect()
}
