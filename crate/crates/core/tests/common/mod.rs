//! Enumeration oracles that share no code with the library's transform,
//! engine or construction.
#![allow(dead_code, clippy::needless_range_loop)]

/// `u = x G_N` straight from the definition: `G_N[r][c] = 1` iff the
/// bit-reversed column index is a bitwise subset of the row index.
pub fn transform(x: &[u8]) -> Vec<u8> {
    let n = x.len();
    assert!(n.is_power_of_two());
    let log = n.trailing_zeros();
    (0..n)
        .map(|c| {
            let rc = reverse(c, log);
            (0..n)
                .filter(|&r| rc & !r == 0)
                .fold(0u8, |acc, r| acc ^ x[r])
        })
        .collect()
}

pub fn reverse(v: usize, log: u32) -> usize {
    (0..log).fold(0, |acc, k| acc | (((v >> k) & 1) << (log - 1 - k)))
}

pub fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// `P(X = x | Y = y)`: programmed cells stay at 0, erased cells go to 0
/// with probability `t`.
pub fn cond(t: f64, x: u8, y: u8) -> f64 {
    match (y, x) {
        (0, 0) => 1.0,
        (0, _) => 0.0,
        (_, 0) => t,
        _ => 1.0 - t,
    }
}

pub fn p_y(s: f64, y: &[u8]) -> f64 {
    y.iter()
        .map(|&b| if b == 0 { s } else { 1.0 - s })
        .product()
}

pub fn bits(v: usize, len: usize) -> Vec<u8> {
    (0..len).map(|j| ((v >> j) & 1) as u8).collect()
}

pub fn key(u: &[u8]) -> usize {
    u.iter()
        .enumerate()
        .fold(0, |acc, (j, &b)| acc | ((b as usize) << j))
}

/// `levels[i][k]` = `P(u_0 .. u_{i-1} = k | y)` with bit `j` of `k` holding
/// `u_j`; `levels[len]` is the full distribution of `u`.
pub fn prefix_levels(t: f64, y: &[u8]) -> Vec<Vec<f64>> {
    let n = y.len();
    let mut full = vec![0.0; 1 << n];
    for xv in 0..1usize << n {
        let x = bits(xv, n);
        let p: f64 = x.iter().zip(y).map(|(&a, &b)| cond(t, a, b)).product();
        if p > 0.0 {
            full[key(&transform(&x))] += p;
        }
    }
    let mut levels = vec![full];
    for i in (0..n).rev() {
        let above = levels.last().unwrap();
        let cur: Vec<f64> = (0..1usize << i)
            .map(|k| above[k] + above[k | (1 << i)])
            .collect();
        levels.push(cur);
    }
    levels.reverse();
    levels
}

/// Exact `(entropy, half_deviation)` per index.
pub fn statistics(s: f64, t: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut ent = vec![0.0; n];
    let mut dev = vec![0.0; n];
    for yv in 0..1usize << n {
        let y = bits(yv, n);
        let py = p_y(s, &y);
        let lv = prefix_levels(t, &y);
        for i in 0..n {
            for k in 0..1usize << i {
                let w = lv[i][k];
                if w > 0.0 {
                    let p0 = lv[i + 1][k] / w;
                    ent[i] += py * w * h2(p0);
                    dev[i] += py * w * (p0 - 0.5).abs();
                }
            }
        }
    }
    (ent, dev)
}

/// Encoder distribution of `u` given `y`: uniform on the message indices,
/// the true conditional elsewhere (uniform where the prefix is impossible).
pub fn encoder_q(levels: &[Vec<f64>], mask: &[bool]) -> Vec<f64> {
    let n = mask.len();
    (0..1usize << n)
        .map(|uv| {
            let mut q = 1.0;
            for i in 0..n {
                let k = uv & ((1 << i) - 1);
                let b = (uv >> i) & 1;
                let w = levels[i][k];
                q *= if mask[i] || w == 0.0 {
                    0.5
                } else {
                    levels[i + 1][k | (b << i)] / w
                };
            }
            q
        })
        .collect()
}

/// `(TV(P, Q), 2 * sum of half deviations over the set)`.
pub fn tv_and_bound(s: f64, t: f64, n: usize, indices: &[usize]) -> (f64, f64) {
    let mut mask = vec![false; n];
    for &i in indices {
        mask[i] = true;
    }
    let mut tv = 0.0;
    for yv in 0..1usize << n {
        let y = bits(yv, n);
        let py = p_y(s, &y);
        if py == 0.0 {
            continue;
        }
        let lv = prefix_levels(t, &y);
        let q = encoder_q(&lv, &mask);
        tv += py
            * lv[n]
                .iter()
                .zip(&q)
                .map(|(p, q)| (p - q).abs())
                .sum::<f64>();
    }
    let (_, dev) = statistics(s, t, n);
    (tv, 2.0 * indices.iter().map(|&i| dev[i]).sum::<f64>())
}
