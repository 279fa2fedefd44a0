//! Finite permutations of names, kept as sequences of transpositions.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::NominalError;
use crate::name::Name;

/// A finite permutation `(a1 b1)(a2 b2)...(an bn)`.
///
/// The swaps are applied right-to-left: the last transposition acts first.
/// The empty sequence is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm {
    swaps: Vec<(Name, Name)>,
}

impl Perm {
    pub fn identity() -> Perm {
        Perm::default()
    }

    /// The single transposition `(a b)`.
    pub fn swap(a: Name, b: Name) -> Result<Perm, NominalError> {
        Perm::identity().then_swap(a, b)
    }

    /// Builds a permutation from transpositions listed outermost first.
    pub fn from_swaps<I>(swaps: I) -> Result<Perm, NominalError>
    where
        I: IntoIterator<Item = (Name, Name)>,
        I::IntoIter: DoubleEndedIterator,
    {
        let mut perm = Perm::identity();
        for (a, b) in swaps.into_iter().rev() {
            perm = perm.then_swap(a, b)?;
        }
        Ok(perm)
    }

    pub fn swaps(&self) -> &[(Name, Name)] {
        &self.swaps
    }

    pub fn is_identity(&self) -> bool {
        self.swaps.is_empty()
    }

    /// `(a b) ∘ self`: first `self`, then the swap.
    pub fn then_swap(&self, a: Name, b: Name) -> Result<Perm, NominalError> {
        if a.ty() != b.ty() {
            return Err(NominalError::SwapTypeMismatch(a, b));
        }
        Ok(self.prepend_unchecked(a, b))
    }

    pub(crate) fn prepend_unchecked(&self, a: Name, b: Name) -> Perm {
        if a == b {
            return self.clone();
        }
        let mut swaps = Vec::with_capacity(self.swaps.len() + 1);
        match self.swaps.first() {
            // (a b)(a b) cancels.
            Some((x, y)) if (*x == a && *y == b) || (*x == b && *y == a) => {
                swaps.extend_from_slice(&self.swaps[1..]);
            }
            _ => {
                swaps.push((a, b));
                swaps.extend_from_slice(&self.swaps);
            }
        }
        Perm { swaps }
    }

    /// The image of a name.
    pub fn apply(&self, a: &Name) -> Name {
        let mut cur = a.clone();
        for (x, y) in self.swaps.iter().rev() {
            if cur == *x {
                cur = y.clone();
            } else if cur == *y {
                cur = x.clone();
            }
        }
        cur
    }

    /// The image of a name under the inverse permutation.
    pub fn apply_inverse(&self, a: &Name) -> Name {
        let mut cur = a.clone();
        for (x, y) in self.swaps.iter() {
            if cur == *x {
                cur = y.clone();
            } else if cur == *y {
                cur = x.clone();
            }
        }
        cur
    }

    /// `self ∘ other`: applies `other` first, then `self`.
    pub fn compose(&self, other: &Perm) -> Perm {
        let mut out = other.clone();
        for (a, b) in self.swaps.iter().rev() {
            out = out.prepend_unchecked(a.clone(), b.clone());
        }
        out
    }

    pub fn inverse(&self) -> Perm {
        let mut swaps = self.swaps.clone();
        swaps.reverse();
        Perm { swaps }
    }

    /// Every name mentioned by some transposition. Names outside this set are fixed.
    pub fn domain(&self) -> BTreeSet<Name> {
        self.swaps
            .iter()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect()
    }

    /// `{a ∈ domain | self(a) ≠ other(a)}`.
    pub fn disagreement(&self, other: &Perm, domain: &BTreeSet<Name>) -> BTreeSet<Name> {
        domain
            .iter()
            .filter(|a| self.apply(a) != other.apply(a))
            .cloned()
            .collect()
    }

    /// Disagreement over the names either permutation can move.
    pub fn disagreement_set(&self, other: &Perm) -> BTreeSet<Name> {
        let mut domain = self.domain();
        domain.extend(other.domain());
        self.disagreement(other, &domain)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, b)) in self.swaps.iter().enumerate() {
            if i > 0 {
                f.write_str(". ")?;
            }
            write!(f, "({a} {b})")?;
        }
        Ok(())
    }
}

/// `perm_apply(π, a)`.
pub fn perm_apply(perm: &Perm, a: &Name) -> Name {
    perm.apply(a)
}

/// `perm_compose(π, π')`: π' first, then π.
pub fn perm_compose(outer: &Perm, inner: &Perm) -> Perm {
    outer.compose(inner)
}

pub fn perm_inverse(perm: &Perm) -> Perm {
    perm.inverse()
}

pub fn perm_disagreement(p: &Perm, q: &Perm, domain: &BTreeSet<Name>) -> BTreeSet<Name> {
    p.disagreement(q, domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::NameType;
    use proptest::prelude::*;

    fn names(n: u32) -> Vec<Name> {
        let ty = NameType::new("var");
        (0..n).map(|i| Name::new(ty.clone(), i)).collect()
    }

    #[test]
    fn swap_acts_on_names() {
        let n = names(3);
        let (a, b, c) = (&n[0], &n[1], &n[2]);
        let ab = Perm::swap(a.clone(), b.clone()).unwrap();
        assert_eq!(ab.apply(a), *b);
        assert_eq!(ab.apply(b), *a);
        assert_eq!(ab.apply(c), *c);
        assert_eq!(Perm::identity().apply(a), *a);
    }

    #[test]
    fn transposition_is_its_own_inverse() {
        let n = names(2);
        let ab = Perm::swap(n[0].clone(), n[1].clone()).unwrap();
        assert_eq!(ab.inverse(), ab);
        let twice = ab.compose(&ab);
        assert!(twice.is_identity());
        for a in &n {
            assert_eq!(twice.apply(a), *a);
        }
    }

    #[test]
    fn disagreement_with_identity() {
        let n = names(3);
        let ab = Perm::swap(n[0].clone(), n[1].clone()).unwrap();
        let domain: BTreeSet<Name> = n.iter().cloned().collect();
        let ds = perm_disagreement(&ab, &Perm::identity(), &domain);
        assert_eq!(ds, [n[0].clone(), n[1].clone()].into_iter().collect());
    }

    #[test]
    fn swapping_different_types_is_rejected() {
        let a = Name::new(NameType::new("var"), 0);
        let b = Name::new(NameType::new("loc"), 1);
        assert!(matches!(
            Perm::swap(a, b),
            Err(NominalError::SwapTypeMismatch(..))
        ));
    }

    #[test]
    fn compose_applies_right_operand_first() {
        let n = names(3);
        let ab = Perm::swap(n[0].clone(), n[1].clone()).unwrap();
        let bc = Perm::swap(n[1].clone(), n[2].clone()).unwrap();
        // (a b)∘(b c) sends b to c, then c is left alone.
        let p = ab.compose(&bc);
        assert_eq!(p.apply(&n[1]), n[2]);
        assert_eq!(p.apply(&n[2]), n[0]);
        assert_eq!(p.apply(&n[0]), n[1]);
    }

    fn arb_perm() -> impl Strategy<Value = Perm> {
        proptest::collection::vec((0u32..5, 0u32..5), 0..6).prop_map(|pairs| {
            let n = names(5);
            let swaps: Vec<_> = pairs
                .into_iter()
                .map(|(i, j)| (n[i as usize].clone(), n[j as usize].clone()))
                .collect();
            Perm::from_swaps(swaps).unwrap()
        })
    }

    proptest! {
        #[test]
        fn inverse_undoes_apply(p in arb_perm(), i in 0u32..6) {
            let a = &names(6)[i as usize];
            prop_assert_eq!(&p.inverse().apply(&p.apply(a)), a);
            prop_assert_eq!(&p.apply_inverse(&p.apply(a)), a);
        }

        #[test]
        fn compose_is_function_composition(p in arb_perm(), q in arb_perm(), i in 0u32..6) {
            let a = &names(6)[i as usize];
            prop_assert_eq!(p.compose(&q).apply(a), p.apply(&q.apply(a)));
        }
    }
}
