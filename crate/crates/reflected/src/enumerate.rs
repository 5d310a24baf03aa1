//! Exhaustive enumeration of the ordered-pair bridge ensemble (brute-force
//! oracle for the exact counting formulas and the finite-state generator
//! checks).

use crate::error::ReflectedError;
use fluctua_core::{corner_at, Corner, PathPair};

/// Largest ensemble the enumerator will materialize (2.8M states).
pub const MAX_ENUM_STEPS: u32 = 14;

/// All states of the ordered-pair ensemble with `two_n` steps, exactly once.
pub fn enumerate_states(two_n: u32) -> Result<Vec<PathPair>, ReflectedError> {
    if two_n == 0 || two_n % 2 != 0 || two_n > MAX_ENUM_STEPS {
        return Err(ReflectedError::EnumerationGuard(two_n));
    }
    let steps = two_n as usize;
    let mut out = Vec::new();
    let mut v = vec![0i32; steps + 1];
    let mut w = vec![0i32; steps + 1];
    dfs(&mut v, &mut w, 1, steps, &mut out);
    Ok(out)
}

fn dfs(v: &mut [i32], w: &mut [i32], t: usize, steps: usize, out: &mut Vec<PathPair>) {
    if t > steps {
        out.push(PathPair::new(v.to_vec(), w.to_vec()).expect("constructed states are valid"));
        return;
    }
    let remaining = (steps - t) as i32;
    for dv in [1i32, -1] {
        let a = v[t - 1] + dv;
        if a.abs() > remaining {
            continue;
        }
        for dw in [1i32, -1] {
            let b = w[t - 1] + dw;
            if b.abs() > remaining || a < b {
                continue;
            }
            v[t] = a;
            w[t] = b;
            dfs(v, w, t + 1, steps, out);
        }
    }
}

/// Number of ordered pairs of length-`len` walks from 0 to every endpoint:
/// returns `counts[j + len]` = #pairs ending at height `j`, by dynamic
/// programming over (height of upper, height of lower). Brute-force oracle
/// for the closed-form counts.
pub fn count_ordered_pairs_by_endpoint(len: u32) -> Vec<u64> {
    let l = len as usize;
    let dim = 2 * l + 1;
    let idx = |h: i32| (h + l as i32) as usize;
    // ways[a][b] with a = upper height, b = lower height
    let mut ways = vec![vec![0u64; dim]; dim];
    ways[idx(0)][idx(0)] = 1;
    for _t in 0..l {
        let mut next = vec![vec![0u64; dim]; dim];
        for a in -(l as i32)..=l as i32 {
            for b in -(l as i32)..=a {
                let c = ways[idx(a)][idx(b)];
                if c == 0 {
                    continue;
                }
                for da in [1i32, -1] {
                    let na = a + da;
                    if na.abs() > l as i32 {
                        continue;
                    }
                    for db in [1i32, -1] {
                        let nb = b + db;
                        if nb > na || nb.abs() > l as i32 {
                            continue;
                        }
                        next[idx(na)][idx(nb)] += c;
                    }
                }
            }
        }
        ways = next;
    }
    (0..dim).map(|d| ways[d][d]).collect()
}

/// A contact corner of a state: coinciding heights on `{k−1, k, k+1}` with a
/// corner at `k`; `shoulder` is the common height at `k±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ContactClass {
    pub site: u32,
    pub shoulder: i64,
    pub corner: Corner,
}

/// All contact corners of a state.
pub fn contact_classes(pair: &PathPair) -> Vec<ContactClass> {
    let two_n = pair.two_n() as usize;
    let v = pair.v();
    (1..two_n)
        .filter(|&k| pair.is_contact(k))
        .filter_map(|k| {
            corner_at(v, k).map(|corner| ContactClass {
                site: k as u32,
                shoulder: i64::from(v[k - 1]),
                corner,
            })
        })
        .collect()
}
