//! Selection rules, interactability and generalized Gaunt coefficients.

use std::f64::consts::PI;

use num_bigint::BigUint;

use crate::angular::{cg_zero, triangle, wigner_9j, wigner_9j_spin1_exact, NineJKey, SqrtRational};
use crate::error::{invalid, Error, Result};

/// Full coupling label `(j1, l1, s1; j2, l2, s2; j3, l3, s3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathKey {
    pub j: [u32; 3],
    pub l: [u32; 3],
    pub s: [u32; 3],
}

impl RuleReport {
    /// Verdict of rules 1 to 5 alone.
    pub fn five_rules_passed(&self) -> bool {
        self.flags.iter().all(|&f| f)
    }
}

impl PathKey {
    pub fn new(j: [u32; 3], l: [u32; 3], s: [u32; 3]) -> Self {
        PathKey { j, l, s }
    }

    /// A vector-signal path, `s = (1, 1, 1)`.
    pub fn vstp(j1: u32, l1: u32, j2: u32, l2: u32, j3: u32, l3: u32) -> Self {
        PathKey {
            j: [j1, j2, j3],
            l: [l1, l2, l3],
            s: [1, 1, 1],
        }
    }

    pub fn nine_j(&self) -> NineJKey {
        let (j, l, s) = (self.j, self.l, self.s);
        NineJKey([j[0], l[0], s[0], j[1], l[1], s[1], j[2], l[2], s[2]])
    }
}

/// How the 9j factor of a generalized Gaunt coefficient is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NineJRoute {
    /// Closed-form spin-1 table when `s = (1, 1, 1)`, contraction otherwise.
    Auto,
    /// Always the six-CG contraction.
    Contraction,
}

/// Generalized Gaunt coefficient times `sqrt(4 pi)`, exactly.
pub fn generalized_gaunt_scaled(path: &PathKey, route: NineJRoute) -> SqrtRational {
    let (j, l, s) = (path.j, path.l, path.s);
    let c0 = cg_zero(l[0], l[1], l[2]);
    if c0.is_zero() {
        return SqrtRational::zero();
    }
    let nine = match route {
        NineJRoute::Auto if s == [1, 1, 1] && (0..3).all(|i| j[i].abs_diff(l[i]) <= 1) => {
            let d = |i: usize| j[i] as i32 - l[i] as i32;
            wigner_9j_spin1_exact(l[0], d(0), l[1], d(1), l[2], d(2))
                .expect("offsets checked above")
        }
        _ => wigner_9j(&path.nine_j()),
    };
    if nine.is_zero() {
        return SqrtRational::zero();
    }
    let pre: u64 = [
        2 * j[0] + 1,
        2 * j[1] + 1,
        2 * l[0] + 1,
        2 * l[1] + 1,
        2 * s[2] + 1,
    ]
    .iter()
    .map(|&v| v as u64)
    .product();
    SqrtRational::new(1, BigUint::from(pre), BigUint::from(1u32))
        .mul(&nine)
        .mul(&c0)
}

/// Scalar multiplying `C^{j3,m3}_{j1,m1,j2,m2} Y^{l3,s3}_{j3,m3}` in the product of two TSH.
pub fn generalized_gaunt(path: &PathKey) -> f64 {
    generalized_gaunt_scaled(path, NineJRoute::Auto).to_f64() / (4.0 * PI).sqrt()
}

/// Per-rule verdicts for a vector-signal path.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleReport {
    /// All five rules hold and the columns are not identical.
    pub passed: bool,
    /// Rules 1 to 5 in order.
    pub flags: [bool; 5],
    /// `j != l` as triples. With `j_i = l_i` for every `i` the 9j is unchanged by swapping its
    /// first two columns, an odd permutation with phase `-1`, so it vanishes even when rules
    /// 1 to 5 hold.
    pub distinct_columns: bool,
    pub coefficient: f64,
    /// Exact zero test on the coefficient.
    pub coefficient_nonzero: bool,
}

/// Flags of the five VSTP selection rules, computed from the labels alone.
pub fn vstp_rule_flags(j: [u32; 3], l: [u32; 3]) -> [bool; 5] {
    let r1 = (0..3).all(|i| triangle(j[i], l[i], 1));
    let r2 = triangle(j[0], j[1], j[2]);
    let r3 = triangle(l[0], l[1], l[2]);
    let r4 = (l[0] + l[1] + l[2]) % 2 == 0;
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let r5 = !PERMS
        .iter()
        .any(|&[a, b, c]| j[a] == l[a] && j[b] == j[c] && l[b] == l[c]);
    [r1, r2, r3, r4, r5]
}

pub fn vstp_rules(path: &PathKey) -> Result<RuleReport> {
    if path.s != [1, 1, 1] {
        return Err(invalid(format!(
            "VSTP rules need s = (1, 1, 1), got {:?}",
            path.s
        )));
    }
    let flags = vstp_rule_flags(path.j, path.l);
    let distinct_columns = path.j != path.l;
    let exact = generalized_gaunt_scaled(path, NineJRoute::Auto);
    Ok(RuleReport {
        passed: flags.iter().all(|&f| f) && distinct_columns,
        flags,
        distinct_columns,
        coefficient: exact.to_f64() / (4.0 * PI).sqrt(),
        coefficient_nonzero: !exact.is_zero(),
    })
}

/// Orbital degrees `(l1, l2, l3)` making `(j1, j2, j3)` reachable by one VSTP.
///
/// The labels are sorted, assigned by the casework below, and mapped back to their positions.
/// Distinct labels with an even sum take `(a, b + 1, c - 1)`; the plain choice `l = j` always
/// has a vanishing 9j.
pub fn find_valid_ells(j1: u32, j2: u32, j3: u32) -> Result<(u32, u32, u32)> {
    if !triangle(j1, j2, j3) {
        return Err(Error::TriangleViolation(j1, j2, j3));
    }
    if (j1, j2, j3) == (0, 0, 0) {
        return Err(Error::NotInteractable(0, 0, 0));
    }
    let j = [j1, j2, j3];
    let mut order = [0usize, 1, 2];
    order.sort_by_key(|&i| (j[i], i));
    let (a, b, c) = (j[order[0]], j[order[1]], j[order[2]]);
    let even = (a + b + c) % 2 == 0;
    let sorted = if a < b && b < c {
        if even {
            [a, b + 1, c - 1]
        } else {
            [a, b, c - 1]
        }
    } else if a == b && b < c {
        if even {
            [a, b + 1, c - 1]
        } else {
            [a, b + 1, c]
        }
    } else if a < b && b == c {
        if even {
            [a + 1, b, c - 1]
        } else {
            [a + 1, b, c]
        }
    } else if a % 2 == 0 {
        [a - 1, a, a + 1]
    } else {
        [a - 1, a, a]
    };
    let mut l = [0u32; 3];
    for (k, &i) in order.iter().enumerate() {
        l[i] = sorted[k];
    }
    Ok((l[0], l[1], l[2]))
}

/// True iff some VSTP of high enough degree couples `(j1, j2) -> j3`.
pub fn interactable(j1: u32, j2: u32, j3: u32) -> bool {
    triangle(j1, j2, j3) && (j1, j2, j3) != (0, 0, 0)
}

/// Exhaustive search for orbital degrees `<= max(j) + 1` passing every VSTP rule.
pub fn interactable_by_search(j1: u32, j2: u32, j3: u32) -> bool {
    let bound = j1.max(j2).max(j3) + 1;
    let j = [j1, j2, j3];
    (0..=bound).any(|l1| {
        (0..=bound).any(|l2| {
            (0..=bound)
                .any(|l3| j != [l1, l2, l3] && vstp_rule_flags(j, [l1, l2, l3]).iter().all(|&f| f))
        })
    })
}

/// `#{(j, l) : {j, l, s} = 1, l <= lmax}`.
pub fn expressivity_count(s: u32, lmax: u32) -> u64 {
    (0..=lmax).map(|l| 2 * l.min(s) as u64 + 1).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_examples() {
        let r = vstp_rules(&PathKey::vstp(1, 0, 1, 1, 1, 1)).unwrap();
        assert!(r.passed && r.coefficient_nonzero);
        let r = vstp_rules(&PathKey::vstp(1, 1, 1, 1, 1, 1)).unwrap();
        assert!(!r.flags[3] && !r.flags[4] && !r.passed);
        let r = vstp_rules(&PathKey::vstp(2, 2, 1, 1, 1, 1)).unwrap();
        assert!(!r.flags[4]);
        assert!(vstp_rules(&PathKey::new([1, 1, 1], [1, 1, 1], [0, 0, 0])).is_err());
    }

    #[test]
    fn find_ells_examples() {
        assert_eq!(find_valid_ells(1, 2, 3).unwrap(), (1, 3, 2));
        assert_eq!(find_valid_ells(1, 1, 1).unwrap(), (0, 1, 1));
        assert!(matches!(
            find_valid_ells(0, 0, 0),
            Err(Error::NotInteractable(..))
        ));
        assert!(matches!(
            find_valid_ells(1, 2, 4),
            Err(Error::TriangleViolation(..))
        ));
    }

    #[test]
    fn find_ells_undoes_the_sort() {
        assert_eq!(find_valid_ells(3, 1, 2).unwrap(), (2, 1, 3));
        // odd sum: the largest degree drops by one wherever it sits
        assert_eq!(find_valid_ells(4, 2, 3).unwrap(), (3, 2, 3));
    }

    #[test]
    fn identical_columns_vanish_despite_five_rules() {
        let r = vstp_rules(&PathKey::vstp(1, 1, 2, 2, 3, 3)).unwrap();
        assert!(
            r.five_rules_passed() && !r.distinct_columns && !r.passed && !r.coefficient_nonzero
        );
    }

    #[test]
    fn interactable_examples() {
        assert!(interactable(1, 1, 1));
        assert!(!interactable(1, 2, 4));
        assert!(!interactable(0, 0, 0));
    }

    #[test]
    fn expressivity_examples() {
        assert_eq!(expressivity_count(0, 2), 3);
        assert_eq!(expressivity_count(1, 1), 4);
        assert_eq!(expressivity_count(1, 0), 1);
    }

    #[test]
    fn zero_spin_path_is_classical_gaunt_prefactor() {
        for (l1, l2, l3) in [(1, 1, 2), (2, 3, 1), (2, 2, 4), (3, 3, 2)] {
            let p = PathKey::new([l1, l2, l3], [l1, l2, l3], [0, 0, 0]);
            let want = ((2 * l1 + 1) as f64 * (2 * l2 + 1) as f64
                / (4.0 * PI * (2 * l3 + 1) as f64))
                .sqrt()
                * cg_zero(l1, l2, l3).to_f64();
            assert!((generalized_gaunt(&p) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn odd_orbital_sum_and_symmetric_path_vanish() {
        assert_eq!(generalized_gaunt(&PathKey::vstp(1, 1, 1, 1, 2, 1)), 0.0);
        assert_eq!(generalized_gaunt(&PathKey::vstp(1, 1, 1, 1, 1, 1)), 0.0);
    }
}
