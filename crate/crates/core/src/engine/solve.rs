use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::rc::Rc;

use crate::constraint::{fresh_open, unify, FreshnessContext, Substitution};
use crate::name::{Name, NameSupply};
use crate::sort::Signature;
use crate::term::{Term, Var};

use super::program::{freshen_clause, Goal, HornClause, Program};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Maximum number of resolution steps along one branch.
    pub depth_limit: usize,
    /// Retry failed head unifications under renamings of the clause's И-names.
    pub equivariant: bool,
    pub max_answers: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            depth_limit: 50,
            equivariant: false,
            max_answers: None,
        }
    }
}

/// A substitution for the goal's variables and the freshness constraints it needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Answer {
    pub vars: Vec<Var>,
    pub subst: Substitution,
    pub fresh: FreshnessContext,
}

impl Answer {
    /// The binding of `x`, or `x` itself when the answer leaves it open.
    pub fn value(&self, x: &Var) -> Term {
        self.subst
            .get(x)
            .cloned()
            .unwrap_or_else(|| Term::var(x.clone()))
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut lines: Vec<String> = self
            .vars
            .iter()
            .map(|x| format!("{x} = {}", self.value(x)))
            .collect();
        lines.extend(self.fresh.iter().map(|(a, x)| format!("{a} # {x}")));
        if lines.is_empty() {
            return f.write_str("yes");
        }
        f.write_str(&lines.join("\n"))
    }
}

struct Cell {
    goal: Goal,
    next: GoalList,
}

type GoalList = Option<Rc<Cell>>;

fn push_all(goals: &[Goal], rest: GoalList) -> GoalList {
    goals.iter().rev().fold(rest, |next, g| {
        Some(Rc::new(Cell {
            goal: g.clone(),
            next,
        }))
    })
}

struct Node {
    goals: GoalList,
    theta: Substitution,
    nabla: FreshnessContext,
    depth: usize,
}

/// Depth-first SLD resolution over one program. Owns its name counter.
pub struct Solver<'p> {
    program: &'p Program,
    supply: NameSupply,
    pub options: SolveOptions,
}

impl<'p> Solver<'p> {
    pub fn new(program: &'p Program, options: SolveOptions) -> Solver<'p> {
        let mut supply = program.supply.clone();
        if let Some(id) = program.max_name_id() {
            supply.reserve_above(id);
        }
        Solver {
            program,
            supply,
            options,
        }
    }

    pub fn supply_mut(&mut self) -> &mut NameSupply {
        &mut self.supply
    }

    /// Answers to the conjunction `goals`, lazily and in depth-first order.
    pub fn solve(&mut self, goals: &[Goal]) -> Answers<'_, 'p> {
        let mut vars: Vec<Var> = Vec::new();
        for g in goals {
            for n in g.names() {
                self.supply.reserve_above(n.id());
            }
            for v in g.vars() {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
        let root = Node {
            goals: push_all(goals, None),
            theta: Substitution::new(),
            nabla: FreshnessContext::new(),
            depth: 0,
        };
        Answers {
            solver: self,
            stack: vec![root],
            vars,
            produced: 0,
            exhausted: false,
        }
    }
}

/// The lazy answer stream of one query.
pub struct Answers<'s, 'p> {
    solver: &'s mut Solver<'p>,
    stack: Vec<Node>,
    vars: Vec<Var>,
    produced: usize,
    exhausted: bool,
}

impl Answers<'_, '_> {
    /// Whether some branch was cut by the depth limit. Only meaningful once
    /// the stream has ended.
    pub fn depth_exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn query_vars(&self) -> &[Var] {
        &self.vars
    }

    fn answer(&self, node: &Node) -> Answer {
        let subst = node.theta.restrict(&self.vars);
        let mut live: BTreeSet<Var> = self.vars.iter().cloned().collect();
        for (_, t) in subst.iter() {
            live.extend(t.vars());
        }
        let mut fresh = node.nabla.clone();
        fresh.retain(|_, x| live.contains(x));
        Answer {
            vars: self.vars.clone(),
            subst,
            fresh,
        }
    }

    fn expand(&mut self, node: Node) {
        let Some(cell) = node.goals.clone() else {
            return;
        };
        let rest = cell.next.clone();
        let program: &Program = self.solver.program;
        let sig = &program.signature;
        match &cell.goal {
            Goal::Eq(t, u) => {
                let (t, u) = (node.theta.apply(t), node.theta.apply(u));
                if let Some(child) = extend(sig, &node, &t, &u, &[], rest) {
                    self.stack.push(child);
                }
            }
            Goal::Fresh(a, t) => {
                let t = node.theta.apply(t);
                if let Ok(residual) = fresh_open(&node.nabla, a, &t) {
                    let mut nabla = node.nabla.clone();
                    nabla.extend(residual);
                    prune(sig, &mut nabla);
                    self.stack.push(Node {
                        goals: rest,
                        theta: node.theta,
                        nabla,
                        depth: node.depth,
                    });
                }
            }
            Goal::Atom(atom) => {
                if node.depth >= self.solver.options.depth_limit {
                    self.exhausted = true;
                    return;
                }
                let goal = node.theta.apply(&atom.as_term());
                let mut children = Vec::new();
                for clause in program.clauses_for(&atom.pred) {
                    let fresh = freshen_clause(clause, &mut self.solver.supply, [&goal]);
                    match resolve(sig, &node, &goal, &fresh, rest.clone()) {
                        Some(child) => children.push(child),
                        None if self.solver.options.equivariant => {
                            for renamed in equivariant_instances(&fresh, &goal) {
                                if let Some(child) =
                                    resolve(sig, &node, &goal, &renamed, rest.clone())
                                {
                                    children.push(child);
                                }
                            }
                        }
                        None => {}
                    }
                }
                self.stack.extend(children.into_iter().rev());
            }
        }
    }
}

impl Iterator for Answers<'_, '_> {
    type Item = Answer;

    fn next(&mut self) -> Option<Answer> {
        if let Some(max) = self.solver.options.max_answers {
            if self.produced >= max {
                return None;
            }
        }
        while let Some(node) = self.stack.pop() {
            if node.goals.is_none() {
                self.produced += 1;
                return Some(self.answer(&node));
            }
            self.expand(node);
        }
        None
    }
}

fn resolve(
    sig: &Signature,
    node: &Node,
    goal: &Term,
    clause: &HornClause,
    rest: GoalList,
) -> Option<Node> {
    let mut child = extend(sig, node, goal, &clause.head.as_term(), &clause.body, rest)?;
    child.depth = node.depth + 1;
    Some(child)
}

/// Solves `t ≈ u` on top of `node` and schedules `body` before `rest`.
fn extend(
    sig: &Signature,
    node: &Node,
    t: &Term,
    u: &Term,
    body: &[Goal],
    rest: GoalList,
) -> Option<Node> {
    let sol = unify(t, u).ok()?;
    let mut nabla = node.nabla.apply(&sol.subst).ok()?;
    nabla.extend(sol.fresh);
    prune(sig, &mut nabla);
    Some(Node {
        goals: push_all(body, rest),
        theta: node.theta.then(&sol.subst),
        nabla,
        depth: node.depth,
    })
}

/// Drops `a # X` when no value of `X`'s sort can contain `a`.
fn prune(sig: &Signature, nabla: &mut FreshnessContext) {
    nabla.retain(|a, x| sig.sort_may_contain(x.sort(), a.ty()));
}

/// Copies of a freshened clause whose И-names are partly sent, injectively,
/// to names occurring free in the goal. Names left unmapped stay fresh.
///
/// A name that could only appear through a variable is not a target: mapping
/// onto it yields a renamed copy of an answer the unmapped instance gives.
fn equivariant_instances(clause: &HornClause, goal: &Term) -> Vec<HornClause> {
    let mut targets = BTreeSet::new();
    free_names(goal, &mut targets);
    let targets: Vec<Name> = targets.into_iter().collect();
    let mut out = Vec::new();
    let mut map = BTreeMap::new();
    injections(&clause.new_names, &targets, &mut map, &mut |m| {
        if !m.is_empty() {
            out.push(clause.rename(m, &BTreeMap::new()));
        }
    });
    out
}

fn free_names(t: &Term, out: &mut BTreeSet<Name>) {
    match t {
        Term::Name(a) => {
            out.insert(a.clone());
        }
        Term::Const(_) => {}
        Term::App(_, args) => args.iter().for_each(|u| free_names(u, out)),
        Term::Abs(a, body) => {
            let mut inner = BTreeSet::new();
            free_names(body, &mut inner);
            inner.remove(a);
            out.extend(inner);
        }
        Term::Susp(p, _) => out.extend(p.domain()),
    }
}

fn injections(
    from: &[Name],
    targets: &[Name],
    map: &mut BTreeMap<Name, Name>,
    emit: &mut dyn FnMut(&BTreeMap<Name, Name>),
) {
    let Some((a, rest)) = from.split_first() else {
        emit(map);
        return;
    };
    injections(rest, targets, map, emit);
    for b in targets {
        if b.ty() == a.ty() && !map.values().any(|c| c == b) {
            map.insert(a.clone(), b.clone());
            injections(rest, targets, map, emit);
            map.remove(a);
        }
    }
}
