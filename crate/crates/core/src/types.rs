//! Simple types over inductive base types, and their positive/negative positions.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

/// Interned-ish identifier used for types, symbols and variables.
pub type Name = Arc<str>;

/// A simple type: an inductive type name or an arrow.
///
/// Arrows are binary; `a -> b -> c` is `Arrow(a, Arrow(b, c))`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Ind(Name),
    Arrow(Arc<Type>, Arc<Type>),
}

impl Type {
    pub fn ind(name: impl Into<Name>) -> Type {
        Type::Ind(name.into())
    }

    pub fn arrow(domain: Type, codomain: Type) -> Type {
        Type::Arrow(Arc::new(domain), Arc::new(codomain))
    }

    /// `args[0] -> ... -> args[n-1] -> result`.
    pub fn arrows(args: &[Type], result: Type) -> Type {
        args.iter()
            .rev()
            .fold(result, |acc, a| Type::arrow(a.clone(), acc))
    }

    pub fn is_arrow(&self) -> bool {
        matches!(self, Type::Arrow(..))
    }

    pub fn as_ind(&self) -> Option<&Name> {
        match self {
            Type::Ind(n) => Some(n),
            Type::Arrow(..) => None,
        }
    }

    pub fn domain(&self) -> Option<&Type> {
        match self {
            Type::Arrow(d, _) => Some(d),
            Type::Ind(_) => None,
        }
    }

    pub fn codomain(&self) -> Option<&Type> {
        match self {
            Type::Arrow(_, c) => Some(c),
            Type::Ind(_) => None,
        }
    }

    /// Splits `s1 -> ... -> sn -> i` into `([s1..sn], i)`.
    pub fn uncurry(&self) -> (Vec<&Type>, &Name) {
        let mut args = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Type::Arrow(d, c) => {
                    args.push(&**d);
                    cur = c;
                }
                Type::Ind(n) => return (args, n),
            }
        }
    }

    /// The final inductive codomain.
    pub fn target(&self) -> &Name {
        self.uncurry().1
    }

    /// Number of arrows along the codomain spine.
    pub fn order_arity(&self) -> usize {
        self.uncurry().0.len()
    }

    pub fn occurs(&self, name: &str) -> bool {
        match self {
            Type::Ind(n) => &**n == name,
            Type::Arrow(d, c) => d.occurs(name) || c.occurs(name),
        }
    }

    /// Every inductive name in this type.
    pub fn inductives(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_inductives(&mut out);
        out
    }

    fn collect_inductives(&self, out: &mut BTreeSet<Name>) {
        match self {
            Type::Ind(n) => {
                out.insert(n.clone());
            }
            Type::Arrow(d, c) => {
                d.collect_inductives(out);
                c.collect_inductives(out);
            }
        }
    }

    /// Positions at which `name` occurs.
    pub fn occurrences(&self, name: &str) -> BTreeSet<TypePosition> {
        let mut out = BTreeSet::new();
        let mut path = Vec::new();
        self.collect_occurrences(name, &mut path, &mut out);
        out
    }

    fn collect_occurrences(&self, name: &str, path: &mut Vec<u8>, out: &mut BTreeSet<TypePosition>) {
        match self {
            Type::Ind(n) if &**n == name => {
                out.insert(TypePosition(path.clone()));
            }
            Type::Ind(_) => {}
            Type::Arrow(d, c) => {
                path.push(1);
                d.collect_occurrences(name, path, out);
                path.pop();
                path.push(2);
                c.collect_occurrences(name, path, out);
                path.pop();
            }
        }
    }

    /// The subexpression addressed by `pos`, if any.
    pub fn at(&self, pos: &TypePosition) -> Option<&Type> {
        let mut cur = self;
        for &step in &pos.0 {
            cur = match (cur, step) {
                (Type::Arrow(d, _), 1) => d,
                (Type::Arrow(_, c), 2) => c,
                _ => return None,
            };
        }
        Some(cur)
    }

    /// Number of nodes; used to bound random generation.
    pub fn depth(&self) -> usize {
        match self {
            Type::Ind(_) => 1,
            Type::Arrow(d, c) => 1 + d.depth().max(c.depth()),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Ind(n) => write!(f, "{n}"),
            Type::Arrow(d, c) => {
                if d.is_arrow() {
                    write!(f, "({d}) -> {c}")
                } else {
                    write!(f, "{d} -> {c}")
                }
            }
        }
    }
}

impl fmt::Debug for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Type {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A path into a type: `1` selects the domain of an arrow, `2` its codomain.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypePosition(pub Vec<u8>);

impl TypePosition {
    pub fn root() -> Self {
        TypePosition(Vec::new())
    }

    fn prefixed(step: u8, rest: &TypePosition) -> Self {
        let mut v = Vec::with_capacity(rest.0.len() + 1);
        v.push(step);
        v.extend_from_slice(&rest.0);
        TypePosition(v)
    }
}

impl fmt::Display for TypePosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

impl Serialize for TypePosition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Debug for TypePosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `Pos⁺(s)`: the base case is the root of an inductive type; an arrow flips polarity on its domain.
pub fn positive_positions(s: &Type) -> BTreeSet<TypePosition> {
    polarity_positions(s, true)
}

/// `Pos⁻(s)`.
pub fn negative_positions(s: &Type) -> BTreeSet<TypePosition> {
    polarity_positions(s, false)
}

fn polarity_positions(s: &Type, positive: bool) -> BTreeSet<TypePosition> {
    match s {
        Type::Ind(_) => {
            if positive {
                BTreeSet::from([TypePosition::root()])
            } else {
                BTreeSet::new()
            }
        }
        Type::Arrow(d, c) => {
            let mut out = BTreeSet::new();
            for p in polarity_positions(d, !positive) {
                out.insert(TypePosition::prefixed(1, &p));
            }
            for p in polarity_positions(c, positive) {
                out.insert(TypePosition::prefixed(2, &p));
            }
            out
        }
    }
}

/// `name` occurs in `s`, and only at positive positions.
pub fn occurs_positively(name: &str, s: &Type) -> bool {
    let occ = s.occurrences(name);
    if occ.is_empty() {
        return false;
    }
    let pos = positive_positions(s);
    occ.iter().all(|p| pos.contains(p))
}

/// `s = s1 -> ... -> sn -> name` with `name` absent from every `si`.
pub fn occurs_strictly_positively(name: &str, s: &Type) -> bool {
    let (args, target) = s.uncurry();
    &**target == name && args.iter().all(|a| !a.occurs(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat() -> Type {
        Type::ind("nat")
    }
    fn ord() -> Type {
        Type::ind("ord")
    }
    fn pos(v: &[u8]) -> TypePosition {
        TypePosition(v.to_vec())
    }

    #[test]
    fn base_positions() {
        assert_eq!(positive_positions(&ord()), BTreeSet::from([TypePosition::root()]));
        assert!(negative_positions(&ord()).is_empty());
    }

    #[test]
    fn arrow_positions_follow_the_grammar() {
        let ord_ord = Type::arrow(ord(), ord());
        assert_eq!(negative_positions(&ord_ord), BTreeSet::from([pos(&[1])]));
        // 1·Pos⁻(nat) = ∅ and 2·Pos⁺(ord) = {2}.
        let nat_ord = Type::arrow(nat(), ord());
        assert_eq!(positive_positions(&nat_ord), BTreeSet::from([pos(&[2])]));
        assert_eq!(negative_positions(&nat_ord), BTreeSet::from([pos(&[1])]));
    }

    #[test]
    fn positivity_predicates() {
        let nat_ord = Type::arrow(nat(), ord());
        assert!(occurs_positively("ord", &nat_ord));
        assert!(!occurs_positively("ord", &Type::arrow(ord(), ord())));
        assert!(!occurs_positively("ord", &nat()));

        assert!(occurs_strictly_positively("ord", &nat_ord));
        assert!(occurs_strictly_positively("ord", &ord()));
        assert!(!occurs_strictly_positively("ord", &Type::arrow(nat_ord, ord())));
    }

    #[test]
    fn display_is_right_associative() {
        let t = Type::arrow(Type::arrow(nat(), ord()), Type::arrow(nat(), ord()));
        assert_eq!(t.to_string(), "(nat -> ord) -> nat -> ord");
        assert_eq!(t.uncurry().0.len(), 2);
        assert_eq!(&**t.target(), "ord");
    }

    #[test]
    fn double_negation_is_positive() {
        // ((ord -> nat) -> nat): ord sits at 1.1, negative of negative.
        let t = Type::arrow(Type::arrow(ord(), nat()), nat());
        assert!(occurs_positively("ord", &t));
        assert!(!occurs_strictly_positively("ord", &t));
    }
}
