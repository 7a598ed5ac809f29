#![allow(dead_code)]

use parkfn::Preset;

/// Every small preset instance whose domain has at most `limit` lists.
pub fn catalog(limit: u64) -> Vec<Preset> {
    let fits = |m: usize, n: usize| (m as u64).pow(n as u32) <= limit;
    let mut out = Vec::new();
    for n in 1..=8 {
        if !fits(n, n) {
            continue;
        }
        out.push(Preset::Classical { n });
        out.push(Preset::Countdown { n });
        out.push(Preset::OddBackEvenForward { n });
        out.push(Preset::Coin { n });
        for k in 0..=n {
            out.push(Preset::Naples { n, k });
        }
        for k in 1..=n {
            out.push(Preset::Teleport { n, k });
        }
    }
    for m in 1..=5 {
        for d in 1..=3 {
            for n in 1..=7 {
                if fits(m, n) {
                    out.push(Preset::Clown { m, d, n });
                    out.push(Preset::Scooter { m, d, n });
                }
            }
        }
    }
    for m in 2..=7 {
        for n in 1..m {
            if !fits(m, n) {
                continue;
            }
            for blocked in subsets(m, m - n) {
                out.push(Preset::Obstructed { m, n, blocked });
            }
        }
    }
    for m in 1..=5 {
        for n in 1..=3 {
            if !fits(m, n) {
                continue;
            }
            for sizes in size_vectors(n, 3) {
                for k in 1..=3 {
                    out.push(Preset::Futuristic { m, sizes: sizes.clone(), k });
                }
            }
        }
    }
    out
}

fn subsets(m: usize, size: usize) -> Vec<Vec<usize>> {
    (0u32..1 << m)
        .filter(|mask| mask.count_ones() as usize == size)
        .map(|mask| (1..=m).filter(|s| mask >> (s - 1) & 1 == 1).collect())
        .collect()
}

fn size_vectors(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (1..=max).map(move |s| {
                    let mut v = v.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    out
}

pub fn is_permutation(prefs: &[usize]) -> bool {
    let mut seen = vec![false; prefs.len() + 1];
    prefs.iter().all(|&p| p <= prefs.len() && !std::mem::replace(&mut seen[p], true))
}
