//! Brute-force oracles shared by the integration tests. None of them call
//! into the library algorithms they are compared against.

#![allow(dead_code)]

use std::collections::BTreeMap;

/// Letters as signed generator numbers: `0` stands for `a` only through
/// `A`/`AI`, ground letter `i` is `i + 1`, inverses are negative.
pub const A: i8 = 100;
pub const AI: i8 = -100;

pub fn inv(l: i8) -> i8 {
    -l
}

/// Free reduction by repeated scanning for a cancelling adjacent pair.
pub fn reduce(w: &[i8]) -> Vec<i8> {
    let mut w = w.to_vec();
    loop {
        let Some(i) = (0..w.len().saturating_sub(1)).find(|&i| w[i] == -w[i + 1]) else {
            return w;
        };
        w.drain(i..i + 2);
    }
}

pub fn inverse(w: &[i8]) -> Vec<i8> {
    w.iter().rev().map(|&l| -l).collect()
}

pub fn is_reduced(w: &[i8]) -> bool {
    w.windows(2).all(|p| p[0] != -p[1])
}

pub fn is_cyclically_reduced(w: &[i8]) -> bool {
    is_reduced(w) && (w.len() < 2 || w[0] != -w[w.len() - 1])
}

pub fn rotations(w: &[i8]) -> Vec<Vec<i8>> {
    (0..w.len().max(1)).map(|k| w[k..].iter().chain(&w[..k]).copied().collect()).collect()
}

/// All words over `letters` of length exactly `len`, reduced or not.
pub fn all_words(len: usize, letters: &[i8]) -> Vec<Vec<i8>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| letters.iter().map(move |&l| w.iter().copied().chain([l]).collect()))
            .collect();
    }
    out
}

/// Length of the shortest conjugate of `w`, trying every conjugator of
/// length up to `|w| / 2` (cyclic reduction never peels more than that).
pub fn shortest_conjugate_len(w: &[i8], letters: &[i8]) -> usize {
    let w = reduce(w);
    let mut best = w.len();
    for k in 0..=w.len() / 2 {
        for g in all_words(k, letters) {
            let c = reduce(&[inverse(&g), w.clone(), g].concat());
            best = best.min(c.len());
        }
    }
    best
}

/// A partial injection on small numbers as a dense table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub fwd: BTreeMap<u64, u64>,
}

impl Table {
    pub fn new(pairs: &[(u64, u64)]) -> Self {
        Table { fwd: pairs.iter().copied().collect() }
    }

    pub fn get(&self, x: u64) -> Option<u64> {
        self.fwd.get(&x).copied()
    }

    pub fn in_range(&self, y: u64) -> bool {
        self.fwd.values().any(|&v| v == y)
    }

    pub fn fixed(&self) -> Vec<u64> {
        self.fwd.iter().filter(|(k, v)| k == v).map(|(&k, _)| k).collect()
    }

    pub fn extends(&self, older: &Table) -> bool {
        older.fwd.iter().all(|(k, v)| self.fwd.get(k) == Some(v))
    }

    pub fn with(&self, pairs: &[(u64, u64)]) -> Option<Table> {
        let mut t = self.clone();
        for &(x, y) in pairs {
            if t.fwd.contains_key(&x) || t.in_range(y) {
                return None;
            }
            t.fwd.insert(x, y);
        }
        Some(t)
    }

    /// The `a`-orbit of `m` followed until it leaves the domain; `None` if
    /// it cycles.
    pub fn orbit(&self, m: u64) -> Option<Vec<u64>> {
        let mut path = vec![m];
        while let Some(next) = self.get(*path.last().unwrap()) {
            if path.contains(&next) {
                return None;
            }
            path.push(next);
        }
        Some(path)
    }

    /// How many bits of `z` the word `a` codes exactly from `m`: the orbit
    /// must stop at an even position `2l` with the values at positions
    /// `2, 4, ..., 2l` having the parities of `z[0..l]`.
    pub fn a_coding_length(&self, m: u64, z: &[bool]) -> Option<usize> {
        let path = self.orbit(m)?;
        if (path.len() - 1) % 2 != 0 {
            return None;
        }
        let l = (path.len() - 1) / 2;
        if l > z.len() {
            return None;
        }
        (0..l).all(|k| (path[2 * (k + 1)] % 2 == 1) == z[k]).then_some(l)
    }
}

/// Every partial injection on `[0, values)` with at most `max_len` pairs,
/// domain listed in increasing order.
pub fn partial_injections(values: u64, max_len: usize) -> Vec<Vec<(u64, u64)>> {
    fn go(values: u64, max_len: usize, from: u64, cur: &mut Vec<(u64, u64)>, out: &mut Vec<Vec<(u64, u64)>>) {
        out.push(cur.clone());
        if cur.len() == max_len {
            return;
        }
        for x in from..values {
            for y in 0..values {
                if cur.iter().any(|&(_, v)| v == y) {
                    continue;
                }
                cur.push((x, y));
                go(values, max_len, x + 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(values, max_len, 0, &mut Vec::new(), &mut out);
    out
}

/// Least-value walk of `pairs` through a callback, without materializing
/// the whole list.
pub fn for_each_partial_injection(values: u64, max_len: usize, mut f: impl FnMut(&[(u64, u64)])) {
    fn go(
        values: u64,
        max_len: usize,
        from: u64,
        cur: &mut Vec<(u64, u64)>,
        used: &mut Vec<bool>,
        f: &mut dyn FnMut(&[(u64, u64)]),
    ) {
        f(cur);
        if cur.len() == max_len {
            return;
        }
        for x in from..values {
            for y in 0..values {
                if used[y as usize] {
                    continue;
                }
                used[y as usize] = true;
                cur.push((x, y));
                go(values, max_len, x + 1, cur, used, f);
                cur.pop();
                used[y as usize] = false;
            }
        }
    }
    go(values, max_len, 0, &mut Vec::new(), &mut vec![false; values as usize], &mut f);
}

/// `z ↦ z + 1` on the integers through `0, 1, -1, 2, -2, ... ↔ 0, 1, 2, 3, 4, ...`.
pub fn zshift(n: u64) -> u64 {
    let z: i64 = if n % 2 == 1 { (n as i64 + 1) / 2 } else { -(n as i64 / 2) } + 1;
    if z > 0 {
        (2 * z - 1) as u64
    } else {
        (-2 * z) as u64
    }
}

pub fn zshift_inv(n: u64) -> u64 {
    let z: i64 = if n % 2 == 1 { (n as i64 + 1) / 2 } else { -(n as i64 / 2) } - 1;
    if z > 0 {
        (2 * z - 1) as u64
    } else {
        (-2 * z) as u64
    }
}

/// One letter with `A`/`AI` read through `t` and `±1` as the shift.
pub fn eval_letter(l: i8, t: &Table, x: u64) -> Option<u64> {
    match l {
        A => t.get(x),
        AI => t.fwd.iter().find(|(_, &v)| v == x).map(|(&k, _)| k),
        1 => Some(zshift(x)),
        -1 => Some(zshift_inv(x)),
        _ => panic!("oracle evaluator knows only a and b"),
    }
}

/// Applies letters in order, first letter first.
pub fn eval(w: &[i8], t: &Table, x: u64) -> Option<u64> {
    w.iter().try_fold(x, |v, &l| eval_letter(l, t, v))
}

/// Library letters in application order as oracle letters.
pub fn oracle_letters(w: &cofinitary::Word) -> Vec<i8> {
    use cofinitary::words::Gen;
    w.letters()
        .iter()
        .map(|l| {
            let g = match l.gen {
                Gen::New => A,
                Gen::Ground(i) => i as i8 + 1,
            };
            if l.inverse {
                -g
            } else {
                g
            }
        })
        .collect()
}

pub fn library_word(w: &[i8]) -> cofinitary::Word {
    use cofinitary::words::Letter;
    cofinitary::Word::literal(
        w.iter()
            .map(|&l| match l {
                A => Letter::A,
                AI => Letter::A_INV,
                g if g > 0 => Letter::ground(g as u32 - 1),
                g => Letter::ground_inv((-g) as u32 - 1),
            })
            .collect(),
    )
}

pub fn table_of(s: &cofinitary::PartialInjection) -> Table {
    Table { fwd: s.pairs().collect() }
}

/// Reads bits off the orbit of `m` under repeated `w`: bit `k` is the parity
/// of the value after `period·(k+1)` letters.
pub fn decode_orbit(w: &[i8], period: usize, t: &Table, m: u64, limit: usize) -> Vec<bool> {
    let mut bits = Vec::new();
    let mut v = m;
    let mut steps = 0;
    'outer: while bits.len() < limit {
        for _ in 0..period {
            match eval_letter(w[steps % w.len()], t, v) {
                Some(next) => v = next,
                None => break 'outer,
            }
            steps += 1;
        }
        bits.push(v % 2 == 1);
    }
    bits
}

/// Fixed points of `w` under `t` that no subword fixes along the way under
/// `old`. Candidates are pulled back from `dom ∪ ran` through the ground
/// prefix before the first `a`-letter.
pub fn untraced(w: &[i8], t: &Table, old: &Table) -> Vec<u64> {
    let Some(first) = w.iter().position(|l| l.abs() == A) else {
        return Vec::new();
    };
    let prefix_inv = inverse(&w[..first]);
    let mut anchors: Vec<u64> = t.fwd.keys().chain(t.fwd.values()).copied().collect();
    anchors.sort_unstable();
    anchors.dedup();
    let mut out = Vec::new();
    for d in anchors {
        let m = eval(&prefix_inv, t, d).expect("ground letters are total");
        if eval(w, t, m) != Some(m) || out.contains(&m) {
            continue;
        }
        let mut path = vec![m];
        for &l in w {
            path.push(eval_letter(l, t, *path.last().unwrap()).unwrap());
        }
        let traced = (0..w.len()).any(|i| (i + 1..=w.len()).any(|j| eval(&w[i..j], old, path[i]) == Some(path[i])));
        if !traced {
            out.push(m);
        }
    }
    out
}
