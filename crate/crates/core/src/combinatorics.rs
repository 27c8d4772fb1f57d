use crate::matching::OrdinalProfile;

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    while next_permutation(&mut current) {
        out.push(current.clone());
    }
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let Some(i) = (0..p.len() - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Every ordinal profile in R^n, `(n!)^n` of them, as a mixed-radix counter
/// over per-agent permutations (agent 0 is the most significant digit).
pub fn all_profiles(n: usize) -> impl Iterator<Item = OrdinalProfile> {
    let perms = permutations(n);
    let base = perms.len();
    let mut digits = vec![0usize; n];
    let mut done = n == 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let ranks = digits.iter().map(|&d| perms[d].clone()).collect();
        let profile = OrdinalProfile::new(ranks).expect("permutations");
        let mut i = n;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < base {
                break;
            }
            digits[i] = 0;
        }
        Some(profile)
    })
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// `ln(n!)` as a sum of logs.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}
