//! Atomic names and the supply that hands out fresh ones.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::term::Term;

/// A name-type. Distinct labels denote disjoint, unbounded supplies of names.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NameType(Arc<str>);

impl NameType {
    pub fn new(label: &str) -> NameType {
        NameType(Arc::from(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NameType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An atomic name.
///
/// Identity is the pair `(type, id)`. The optional label is only used for
/// printing; two names with the same id and type but different labels are
/// the same name.
#[derive(Clone, Debug)]
pub struct Name {
    ty: NameType,
    id: u32,
    label: Option<Arc<str>>,
}

impl Name {
    pub fn new(ty: NameType, id: u32) -> Name {
        Name {
            ty,
            id,
            label: None,
        }
    }

    pub fn labeled(ty: NameType, id: u32, label: &str) -> Name {
        Name {
            ty,
            id,
            label: Some(Arc::from(label)),
        }
    }

    pub fn ty(&self) -> &NameType {
        &self.ty
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }
}

impl PartialEq for Name {
    fn eq(&self, other: &Name) -> bool {
        self.id == other.id && self.ty == other.ty
    }
}

impl Eq for Name {}

impl Hash for Name {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ty.hash(state);
        self.id.hash(state);
    }
}

impl PartialOrd for Name {
    fn partial_cmp(&self, other: &Name) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Name {
    fn cmp(&self, other: &Name) -> Ordering {
        (&self.ty, self.id).cmp(&(&other.ty, other.id))
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(label) => f.write_str(label),
            // Unlabeled names print as `<type>_<id>`, which the parser reads back
            // as the very same name.
            None => write!(f, "{}_{}", self.ty, self.id),
        }
    }
}

/// Monotone counters for names and clause variables.
///
/// One supply belongs to one engine; `&mut self` on every allocation means
/// two allocations against the same counter can never interleave.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    next_name: u32,
    next_var: u32,
}

impl NameSupply {
    pub fn new() -> NameSupply {
        NameSupply::default()
    }

    /// Makes sure every future name id is strictly above `id`.
    pub fn reserve_above(&mut self, id: u32) {
        if self.next_name <= id {
            self.next_name = id + 1;
        }
    }

    /// Allocates a labeled name, as done for names declared in source text.
    pub fn declare(&mut self, ty: &NameType, label: &str) -> Name {
        let id = self.bump();
        Name::labeled(ty.clone(), id, label)
    }

    /// Allocates a name that has never been handed out by this supply.
    pub fn fresh(&mut self, ty: &NameType) -> Name {
        let id = self.bump();
        Name::new(ty.clone(), id)
    }

    /// A name of type `ty` that does not occur in any of the `avoid` terms.
    ///
    /// Ground terms never mention the result, so it is fresh for each of them.
    /// Repeated calls always return distinct names.
    pub fn fresh_name<'a, I>(&mut self, ty: &NameType, avoid: I) -> Name
    where
        I: IntoIterator<Item = &'a Term>,
        I::IntoIter: Clone,
    {
        let avoid = avoid.into_iter();
        loop {
            let candidate = self.fresh(ty);
            if !avoid.clone().any(|t| t.mentions_name(&candidate)) {
                return candidate;
            }
        }
    }

    /// Index for a renamed-apart clause variable.
    pub fn fresh_var_index(&mut self) -> u32 {
        self.next_var += 1;
        self.next_var
    }

    pub fn peek_next_id(&self) -> u32 {
        self.next_name
    }

    fn bump(&mut self) -> u32 {
        let id = self.next_name;
        self.next_name = self
            .next_name
            .checked_add(1)
            .expect("name supply exhausted");
        id
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_ignores_labels() {
        let var = NameType::new("var");
        assert_eq!(
            Name::labeled(var.clone(), 3, "a"),
            Name::new(var.clone(), 3)
        );
        assert_ne!(
            Name::new(var.clone(), 3),
            Name::new(NameType::new("loc"), 3)
        );
    }

    #[test]
    fn fresh_names_avoid_terms_and_each_other() {
        let var = NameType::new("var");
        let mut supply = NameSupply::new();
        let a = supply.declare(&var, "a");
        let b = supply.declare(&var, "b");
        let t = Term::app("f", vec![Term::Name(a.clone()), Term::Name(b.clone())]);
        let c = supply.fresh_name(&var, [&t]);
        let d = supply.fresh_name(&var, [&t]);
        assert!(c != a && c != b);
        assert_ne!(c, d);
    }

    #[test]
    fn fresh_name_skips_ids_present_in_avoid_set() {
        let var = NameType::new("var");
        let mut supply = NameSupply::new();
        let planted = Term::Name(Name::new(var.clone(), 0));
        let n = supply.fresh_name(&var, [&planted]);
        assert_eq!(n.id(), 1);
    }

    #[test]
    fn unlabeled_names_print_with_type_and_id() {
        let n = Name::new(NameType::new("var"), 12);
        assert_eq!(n.to_string(), "var_12");
    }
}
