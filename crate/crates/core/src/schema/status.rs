//! Lexicographic-of-multisets comparison driven by a [`Status`].

use std::fmt;

use serde::Serialize;

use crate::signature::Status;

/// Outcome for one `mul` group. Indices are 1-based argument positions.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum GroupEvidence<W> {
    /// The two multisets are equal; `pairs` matches lhs to rhs indices.
    Equal { pairs: Vec<(usize, usize)> },
    /// Strict multiset decrease: after removing `common`, every remaining
    /// rhs index is dominated by some remaining lhs index.
    Greater {
        common: Vec<(usize, usize)>,
        remaining_lhs: Vec<usize>,
        dominated: Vec<(usize, usize, W)>,
    },
}

/// A successful comparison `u⃗ >stat v⃗`. Groups after the decreasing one are not compared.
#[derive(Debug, Clone, Serialize)]
pub struct StatusEvidence<W> {
    pub status: Status,
    pub groups: Vec<GroupEvidence<W>>,
}

impl<W> fmt::Display for StatusEvidence<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.status)?;
        for (i, g) in self.groups.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            match g {
                GroupEvidence::Equal { .. } => write!(f, "eq")?,
                GroupEvidence::Greater { .. } => write!(f, "mul-dec")?,
            }
        }
        Ok(())
    }
}

enum MulOutcome<W> {
    Equal(Vec<(usize, usize)>),
    Greater {
        common: Vec<(usize, usize)>,
        remaining_lhs: Vec<usize>,
        dominated: Vec<(usize, usize, W)>,
    },
    Neither,
}

/// Multiset extension over 1-based indices into `lhs` and `rhs`.
fn compare_multiset<T, W>(
    lhs: &[T],
    rhs: &[T],
    lidx: &[usize],
    ridx: &[usize],
    gt: &mut impl FnMut(&T, &T) -> Option<W>,
    eq: &mut impl FnMut(&T, &T) -> bool,
) -> MulOutcome<W> {
    let mut lhs_used = vec![false; lidx.len()];
    let mut common = Vec::new();
    let mut rest_r = Vec::new();
    for &j in ridx {
        let hit = lidx
            .iter()
            .enumerate()
            .find(|&(k, &i)| !lhs_used[k] && eq(&lhs[i - 1], &rhs[j - 1]));
        match hit {
            Some((k, &i)) => {
                lhs_used[k] = true;
                common.push((i, j));
            }
            None => rest_r.push(j),
        }
    }
    let rest_l: Vec<usize> = lidx
        .iter()
        .zip(&lhs_used)
        .filter(|(_, &u)| !u)
        .map(|(&i, _)| i)
        .collect();
    if rest_l.is_empty() && rest_r.is_empty() {
        return MulOutcome::Equal(common);
    }
    if rest_l.is_empty() {
        return MulOutcome::Neither;
    }
    let mut dominated = Vec::new();
    for &j in &rest_r {
        match rest_l.iter().find_map(|&i| gt(&lhs[i - 1], &rhs[j - 1]).map(|w| (i, j, w))) {
            Some(d) => dominated.push(d),
            None => return MulOutcome::Neither,
        }
    }
    MulOutcome::Greater {
        common,
        remaining_lhs: rest_l,
        dominated,
    }
}

/// `lhs >stat rhs`, with evidence. `gt` is the strict base order, `eq` its equivalence.
///
/// Both slices must be at least as long as the status arity.
pub fn compare_status<T, W>(
    status: &Status,
    lhs: &[T],
    rhs: &[T],
    mut gt: impl FnMut(&T, &T) -> Option<W>,
    mut eq: impl FnMut(&T, &T) -> bool,
) -> Option<StatusEvidence<W>> {
    let arity = status.arity();
    if lhs.len() < arity || rhs.len() < arity {
        return None;
    }
    let mut groups = Vec::new();
    for g in &status.groups {
        match compare_multiset(lhs, rhs, g, g, &mut gt, &mut eq) {
            MulOutcome::Equal(pairs) => groups.push(GroupEvidence::Equal { pairs }),
            MulOutcome::Greater {
                common,
                remaining_lhs,
                dominated,
            } => {
                groups.push(GroupEvidence::Greater {
                    common,
                    remaining_lhs,
                    dominated,
                });
                return Some(StatusEvidence {
                    status: status.clone(),
                    groups,
                });
            }
            MulOutcome::Neither => return None,
        }
    }
    None
}

/// Boolean form of [`compare_status`].
pub fn status_greater<T>(
    status: &Status,
    lhs: &[T],
    rhs: &[T],
    mut gt: impl FnMut(&T, &T) -> bool,
    eq: impl FnMut(&T, &T) -> bool,
) -> bool {
    compare_status(status, lhs, rhs, |a, b| gt(a, b).then_some(()), eq).is_some()
}

/// Multiset extension of `gt` on whole sequences.
pub fn multiset_greater<T>(
    lhs: &[T],
    rhs: &[T],
    mut gt: impl FnMut(&T, &T) -> bool,
    mut eq: impl FnMut(&T, &T) -> bool,
) -> bool {
    let lidx: Vec<usize> = (1..=lhs.len()).collect();
    let ridx: Vec<usize> = (1..=rhs.len()).collect();
    matches!(
        compare_multiset(lhs, rhs, &lidx, &ridx, &mut |a: &T, b: &T| gt(a, b).then_some(()), &mut eq),
        MulOutcome::Greater { .. }
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cmp(status: &Status, l: &[u32], r: &[u32]) -> bool {
        status_greater(status, l, r, |a, b| a > b, |a, b| a == b)
    }

    #[test]
    fn lex_then_multiset() {
        // lex(mul 3, mul 2 4): u3 > v3, or u3 = v3 and {u2,u4} >mul {v2,v4}.
        let st = Status::new(vec![vec![3], vec![2, 4]]);
        assert!(cmp(&st, &[0, 1, 5, 1], &[9, 9, 4, 9]));
        assert!(cmp(&st, &[0, 3, 5, 1], &[9, 2, 5, 2]));
        assert!(!cmp(&st, &[0, 3, 5, 1], &[0, 3, 5, 2]));
        assert!(cmp(&st, &[0, 3, 5, 1], &[0, 1, 5, 2]));
    }

    #[test]
    fn identical_vectors_are_not_greater() {
        let st = Status::lexicographic(2);
        assert!(!cmp(&st, &[2, 2], &[2, 2]));
        assert!(!cmp(&Status::multiset(2), &[1, 2], &[2, 1]));
    }

    #[test]
    fn ackermann_calls() {
        let st = Status::lexicographic(2);
        assert!(cmp(&st, &[3, 3], &[3, 2]));
        assert!(cmp(&st, &[3, 3], &[2, 100]));
    }

    #[test]
    fn multiset_removes_common_then_dominates() {
        assert!(multiset_greater(&[5, 3, 1], &[4, 4, 3, 1], |a, b| a > b, |a, b| a == b));
        assert!(!multiset_greater(&[3], &[3], |a, b| a > b, |a, b| a == b));
        assert!(!multiset_greater(&[3, 1], &[3, 1, 0], |a, b| a > b, |a, b| a == b));
        assert!(multiset_greater(&[3, 1], &[3], |a, b| a > b, |a, b| a == b));
    }

    #[test]
    fn evidence_display() {
        let st = Status::lexicographic(2);
        let ev = compare_status(&st, &[1u32, 3], &[1, 2], |a, b| (a > b).then_some(()), |a, b| a == b).unwrap();
        assert_eq!(ev.to_string(), "lex(mul 1, mul 2): eq, mul-dec");
    }
}
