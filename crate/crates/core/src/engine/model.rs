use std::collections::{BTreeMap, HashMap, HashSet};
use std::rc::Rc;

use crate::constraint::{unify, Substitution};
use crate::name::{Name, NameType};
use crate::sort::{Signature, Sort};
use crate::term::{alpha_eq_ground, fresh_ground, AlphaKey, Symbol, Term, Var};

use super::program::{Atom, Goal, HornClause, Program};

/// Limits for the forward-chaining oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bound {
    pub max_term_depth: usize,
    /// Names per name-type.
    pub name_universe_size: usize,
}

/// The ground atoms derivable while every argument stays within the bound.
#[derive(Clone, Debug)]
pub struct LeastModel {
    pub bound: Bound,
    pub signature: Signature,
    universe: BTreeMap<NameType, Vec<Name>>,
    atoms: Vec<Atom>,
    index: HashSet<(Symbol, Vec<AlphaKey>)>,
}

fn atom_key(a: &Atom) -> Option<(Symbol, Vec<AlphaKey>)> {
    let keys = a
        .args
        .iter()
        .map(|t| AlphaKey::of(t).ok())
        .collect::<Option<Vec<_>>>()?;
    Some((a.pred.clone(), keys))
}

impl LeastModel {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Atoms in the order they were derived.
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Membership up to α-equivalence. Names are compared literally.
    pub fn contains(&self, a: &Atom) -> bool {
        atom_key(a).is_some_and(|k| self.index.contains(&k))
    }

    pub fn universe(&self, ty: &NameType) -> &[Name] {
        self.universe.get(ty).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn universe_names(&self) -> impl Iterator<Item = &Name> {
        self.universe.values().flatten()
    }

    /// Atoms whose image under some permutation of the universe is missing.
    pub fn closure_violations(&self) -> Vec<(BTreeMap<Name, Name>, Atom)> {
        let mut out = Vec::new();
        for perm in self.universe_permutations() {
            for a in &self.atoms {
                let image = a.map_args(|t| t.rename_names(&perm));
                if !self.contains(&image) {
                    out.push((perm.clone(), a.clone()));
                }
            }
        }
        out
    }

    pub fn is_permutation_closed(&self) -> bool {
        self.closure_violations().is_empty()
    }

    /// Every bijection of the universe that maps each name-type to itself.
    pub fn universe_permutations(&self) -> Vec<BTreeMap<Name, Name>> {
        let mut acc = vec![BTreeMap::new()];
        for names in self.universe.values() {
            let mut next = Vec::new();
            for image in permutations(names) {
                for base in &acc {
                    let mut m: BTreeMap<Name, Name> = base.clone();
                    m.extend(names.iter().cloned().zip(image.iter().cloned()));
                    next.push(m);
                }
            }
            acc = next;
        }
        acc
    }
}

fn permutations(items: &[Name]) -> Vec<Vec<Name>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

/// Ground terms of every sort up to a depth, one representative per α-class.
pub struct GroundTerms<'a> {
    sig: &'a Signature,
    universe: &'a BTreeMap<NameType, Vec<Name>>,
    cache: HashMap<(Sort, usize), Rc<Vec<Term>>>,
}

impl<'a> GroundTerms<'a> {
    pub fn new(sig: &'a Signature, universe: &'a BTreeMap<NameType, Vec<Name>>) -> GroundTerms<'a> {
        GroundTerms {
            sig,
            universe,
            cache: HashMap::new(),
        }
    }

    pub fn of(&mut self, sort: &Sort, depth: usize) -> Rc<Vec<Term>> {
        if let Some(v) = self.cache.get(&(sort.clone(), depth)) {
            return v.clone();
        }
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        let mut push = |t: Term, out: &mut Vec<Term>| {
            if seen.insert(AlphaKey::of(&t).expect("ground")) {
                out.push(t);
            }
        };
        match sort {
            Sort::Name(ty) => {
                for a in self.universe.get(ty).into_iter().flatten() {
                    push(Term::Name(a.clone()), &mut out);
                }
            }
            Sort::Abs(ty, body) => {
                let bodies = self.of(body, depth);
                for a in self.universe.get(ty).into_iter().flatten() {
                    for t in bodies.iter() {
                        push(Term::abs(a.clone(), t.clone()), &mut out);
                    }
                }
            }
            Sort::Data(d) => {
                let funcs: Vec<(Symbol, Vec<Sort>)> = self
                    .sig
                    .funcs()
                    .filter(|(_, f)| f.result == *d)
                    .map(|(s, f)| (s.clone(), f.args.clone()))
                    .collect();
                for (f, args) in funcs {
                    if args.is_empty() {
                        push(Term::Const(f), &mut out);
                    } else if depth > 0 {
                        let pools: Vec<Rc<Vec<Term>>> =
                            args.iter().map(|s| self.of(s, depth - 1)).collect();
                        for combo in product(&pools) {
                            push(Term::App(f.clone(), combo), &mut out);
                        }
                    }
                }
            }
        }
        let out = Rc::new(out);
        self.cache.insert((sort.clone(), depth), out.clone());
        out
    }
}

fn product(pools: &[Rc<Vec<Term>>]) -> Vec<Vec<Term>> {
    let mut acc: Vec<Vec<Term>> = vec![Vec::new()];
    for pool in pools {
        let mut next = Vec::with_capacity(acc.len() * pool.len());
        for prefix in &acc {
            for t in pool.iter() {
                let mut v = prefix.clone();
                v.push(t.clone());
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

/// All ground terms of `sort` up to `depth` over the given universe.
pub fn ground_terms(
    sig: &Signature,
    universe: &BTreeMap<NameType, Vec<Name>>,
    sort: &Sort,
    depth: usize,
) -> Vec<Term> {
    GroundTerms::new(sig, universe).of(sort, depth).to_vec()
}

/// Forward chaining to a fixpoint. Each clause's И-names range over every
/// injective choice from the universe, so the result is closed under
/// permutations of the universe.
pub fn least_model_enum(p: &Program, bound: Bound) -> LeastModel {
    let universe = build_universe(p, bound.name_universe_size);
    let mut instances = Vec::new();
    for c in &p.clauses {
        let mut map = BTreeMap::new();
        assignments(&c.new_names, &universe, &mut map, &mut |m| {
            instances.push(c.rename(m, &BTreeMap::new()));
        });
    }

    let mut gen = GroundTerms::new(&p.signature, &universe);
    let mut atoms: Vec<Atom> = Vec::new();
    let mut stamps: Vec<usize> = Vec::new();
    let mut index: HashSet<(Symbol, Vec<AlphaKey>)> = HashSet::new();
    let mut by_pred: HashMap<Symbol, Vec<usize>> = HashMap::new();

    let mut round = 1;
    loop {
        let mut fresh_atoms = Vec::new();
        {
            let mut cx = Chain {
                gen: &mut gen,
                atoms: &atoms,
                stamps: &stamps,
                by_pred: &by_pred,
                round,
                depth: bound.max_term_depth,
                out: &mut fresh_atoms,
            };
            for inst in &instances {
                let pending: Vec<&Goal> = inst.body.iter().collect();
                cx.body(inst, pending, Substitution::new(), round == 1);
            }
        }
        let mut added = false;
        for a in fresh_atoms {
            let key = atom_key(&a).expect("ground head");
            if index.insert(key) {
                by_pred.entry(a.pred.clone()).or_default().push(atoms.len());
                atoms.push(a);
                stamps.push(round);
                added = true;
            }
        }
        if !added {
            break;
        }
        round += 1;
    }

    LeastModel {
        bound,
        signature: p.signature.clone(),
        universe,
        atoms,
        index,
    }
}

fn build_universe(p: &Program, size: usize) -> BTreeMap<NameType, Vec<Name>> {
    let mut supply = p.supply.clone();
    if let Some(id) = p.max_name_id() {
        supply.reserve_above(id);
    }
    let mut out = BTreeMap::new();
    for ty in p.signature.name_types() {
        let mut names: Vec<Name> = p.names.values().filter(|a| a.ty() == ty).cloned().collect();
        names.sort();
        names.truncate(size);
        while names.len() < size {
            names.push(supply.fresh(ty));
        }
        out.insert(ty.clone(), names);
    }
    out
}

fn assignments(
    from: &[Name],
    universe: &BTreeMap<NameType, Vec<Name>>,
    map: &mut BTreeMap<Name, Name>,
    emit: &mut dyn FnMut(&BTreeMap<Name, Name>),
) {
    let Some((a, rest)) = from.split_first() else {
        emit(map);
        return;
    };
    for b in universe.get(a.ty()).into_iter().flatten() {
        if !map.values().any(|c| c == b) {
            map.insert(a.clone(), b.clone());
            assignments(rest, universe, map, emit);
            map.remove(a);
        }
    }
}

struct Chain<'g, 'a> {
    gen: &'g mut GroundTerms<'a>,
    atoms: &'g [Atom],
    stamps: &'g [usize],
    by_pred: &'g HashMap<Symbol, Vec<usize>>,
    round: usize,
    depth: usize,
    out: &'g mut Vec<Atom>,
}

impl Chain<'_, '_> {
    /// Semi-naive evaluation: after the first round a derivation must use an
    /// atom produced by the previous round.
    fn body(
        &mut self,
        c: &HornClause,
        mut pending: Vec<&Goal>,
        sigma: Substitution,
        used_new: bool,
    ) {
        // Side conditions that are already decidable go first.
        let mut i = 0;
        while i < pending.len() {
            match pending[i] {
                Goal::Fresh(a, t) => {
                    let t = sigma.apply(t);
                    if t.is_ground() {
                        if !fresh_ground(a, &t).unwrap_or(false) {
                            return;
                        }
                        pending.remove(i);
                        continue;
                    }
                }
                Goal::Eq(t, u) => {
                    let (t, u) = (sigma.apply(t), sigma.apply(u));
                    if t.is_ground() && u.is_ground() {
                        if !alpha_eq_ground(&t, &u).unwrap_or(false) {
                            return;
                        }
                        pending.remove(i);
                        continue;
                    }
                    if t.is_ground() || u.is_ground() {
                        let Ok(sol) = unify(&t, &u) else { return };
                        pending.remove(i);
                        let sigma = sigma.then(&sol.subst);
                        return self.body(c, pending, sigma, used_new);
                    }
                }
                Goal::Atom(_) => {}
            }
            i += 1;
        }

        if let Some(pos) = pending.iter().position(|g| matches!(g, Goal::Atom(_))) {
            let Goal::Atom(goal) = pending.remove(pos) else {
                unreachable!()
            };
            let goal = sigma.apply(&goal.as_term());
            let Some(candidates) = self.by_pred.get(&*pred_of(&goal)) else {
                return;
            };
            for &k in candidates {
                if self.stamps[k] >= self.round {
                    continue;
                }
                if let Ok(sol) = unify(&goal, &self.atoms[k].as_term()) {
                    let now_new = used_new || self.stamps[k] + 1 == self.round;
                    self.body(c, pending.clone(), sigma.then(&sol.subst), now_new);
                }
            }
            return;
        }

        if !used_new {
            return;
        }
        // Remaining goals and head variables range over the bounded terms.
        let mut open: Vec<Var> = Vec::new();
        for g in &pending {
            for t in g.terms() {
                for v in sigma.apply(t).vars() {
                    if !open.contains(&v) {
                        open.push(v);
                    }
                }
            }
        }
        if let Some(x) = open.first() {
            let pool = self.gen.of(x.sort(), self.depth);
            for t in pool.iter() {
                let mut s = sigma.clone();
                s.bind(x.clone(), t.clone());
                self.body(c, pending.clone(), s, used_new);
            }
            return;
        }
        let head = sigma.apply(&c.head.as_term());
        let free = head.vars();
        self.emit_head(&head, &free);
    }

    fn emit_head(&mut self, head: &Term, free: &[Var]) {
        match free.split_first() {
            None => {
                let Term::App(pred, args) = head else {
                    self.out.push(Atom {
                        pred: pred_of(head),
                        args: Vec::new(),
                    });
                    return;
                };
                if args.iter().all(|t| t.depth() <= self.depth) {
                    self.out.push(Atom {
                        pred: pred.clone(),
                        args: args.clone(),
                    });
                }
            }
            Some((x, rest)) => {
                let pool = self.gen.of(x.sort(), self.depth);
                for t in pool.iter() {
                    let s = Substitution::singleton(x.clone(), t.clone());
                    self.emit_head(&s.apply(head), rest);
                }
            }
        }
    }
}

fn pred_of(t: &Term) -> Symbol {
    match t {
        Term::App(p, _) | Term::Const(p) => p.clone(),
        _ => unreachable!("atoms are applications"),
    }
}
