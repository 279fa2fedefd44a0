use super::lexer::{lex, Pos, Tok};
use super::ParseError;

/// Terms before sort-directed elaboration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Raw {
    Lower(String, Pos),
    Upper(String, Pos),
    Call(String, Vec<Raw>, Pos),
    Abs(String, Pos, Box<Raw>),
    Lambda(Vec<(String, Pos)>, Box<Raw>, Pos),
    Swap((String, Pos), (String, Pos), Box<Raw>),
    Juxt(Vec<Raw>),
    Pair(Box<Raw>, Box<Raw>, Pos),
    List(Vec<Raw>, Option<Box<Raw>>, Pos),
}

impl Raw {
    pub fn pos(&self) -> Pos {
        match self {
            Raw::Lower(_, p)
            | Raw::Upper(_, p)
            | Raw::Call(_, _, p)
            | Raw::Abs(_, p, _)
            | Raw::Lambda(_, _, p)
            | Raw::Pair(_, _, p)
            | Raw::List(_, _, p) => *p,
            Raw::Swap((_, p), _, _) => *p,
            Raw::Juxt(items) => items[0].pos(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawGoal {
    Atom(String, Vec<Raw>, Pos),
    Eq(Raw, Raw),
    Fresh(Raw, Raw),
}

impl RawGoal {
    pub fn pos(&self) -> Pos {
        match self {
            RawGoal::Atom(_, _, p) => *p,
            RawGoal::Eq(t, _) | RawGoal::Fresh(t, _) => t.pos(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawSort {
    Ident(String, Pos),
    Abs(String, Pos, Box<RawSort>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quant {
    Forall,
    Exists,
    New,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawFormula {
    True,
    False,
    Goal(RawGoal),
    Not(Box<RawFormula>),
    And(Box<RawFormula>, Box<RawFormula>),
    Or(Box<RawFormula>, Box<RawFormula>),
    Implies(Box<RawFormula>, Box<RawFormula>),
    Iff(Box<RawFormula>, Box<RawFormula>),
    Quant(Quant, String, Pos, RawSort, Box<RawFormula>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    NameTypes(Vec<(String, Pos)>),
    DataTypes(Vec<(String, Pos)>),
    Names(Vec<(String, Pos)>, String, Pos),
    Consts(Vec<(String, Pos)>, String, Pos),
    Func(String, Pos, Vec<RawSort>, String, Pos),
    Pred(String, Pos, Vec<RawSort>),
    Clause(RawGoal, Vec<RawGoal>),
}

const KEYWORDS: [&str; 6] = ["nametype", "type", "name", "const", "func", "pred"];

pub struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    pub fn new(src: &str) -> PResult<Parser> {
        let toks = lex(src)
            .map_err(|e| ParseError::new(e.pos, format!("unexpected character `{}`", e.ch)))?;
        Ok(Parser { toks, i: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> PResult<Pos> {
        if self.peek() == t {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(&format!("{t}")))
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::new(
            self.pos(),
            format!("expected {wanted}, found {}", self.peek()),
        )
    }

    fn lower(&mut self) -> PResult<(String, Pos)> {
        match self.peek().clone() {
            Tok::Lower(s) => Ok((s, self.bump().1)),
            _ => Err(self.unexpected("a lowercase identifier")),
        }
    }

    pub fn eat_dot(&mut self) -> bool {
        self.eat(&Tok::Dot)
    }

    pub fn sort_public(&mut self) -> PResult<RawSort> {
        self.sort()
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub fn expect_eof(&mut self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn starts_primary(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Lower(_) | Tok::Upper(_) | Tok::LParen | Tok::LBrack | Tok::Lt | Tok::Backslash
        )
    }

    /// A term; adjacent terms are juxtaposed.
    pub fn term(&mut self) -> PResult<Raw> {
        let mut items = vec![self.primary()?];
        while self.starts_primary() {
            items.push(self.primary()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Raw::Juxt(items)
        })
    }

    fn args(&mut self, close: &Tok) -> PResult<Vec<Raw>> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(self.term()?);
            if self.eat(close) {
                return Ok(out);
            }
            self.expect(&Tok::Comma)?;
        }
    }

    fn is_swap_prefix(&self) -> bool {
        matches!(
            (
                self.peek(),
                self.peek_at(1),
                self.peek_at(2),
                self.peek_at(3),
                self.peek_at(4)
            ),
            (
                Tok::LParen,
                Tok::Lower(_),
                Tok::Lower(_),
                Tok::RParen,
                Tok::Dot
            )
        )
    }

    fn primary(&mut self) -> PResult<Raw> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Lower(s) => {
                self.bump();
                // `f(x)` is a call; `f (x)` juxtaposes f with (x).
                let next = self.pos();
                let adjacent = next.line == pos.line && next.col == pos.col + s.chars().count();
                if adjacent && self.eat(&Tok::LParen) {
                    let args = self.args(&Tok::RParen)?;
                    Ok(Raw::Call(s, args, pos))
                } else {
                    Ok(Raw::Lower(s, pos))
                }
            }
            Tok::Upper(s) => {
                self.bump();
                Ok(Raw::Upper(s, pos))
            }
            Tok::Lt => {
                self.bump();
                let (a, apos) = self.lower()?;
                self.expect(&Tok::Gt)?;
                let body = self.term()?;
                Ok(Raw::Abs(a, apos, Box::new(body)))
            }
            Tok::Backslash => {
                self.bump();
                let mut binders = vec![self.lower()?];
                while let Tok::Lower(_) = self.peek() {
                    binders.push(self.lower()?);
                }
                self.expect(&Tok::Dot)?;
                let body = self.term()?;
                Ok(Raw::Lambda(binders, Box::new(body), pos))
            }
            Tok::LParen if self.is_swap_prefix() => {
                self.bump();
                let a = self.lower()?;
                let b = self.lower()?;
                self.expect(&Tok::RParen)?;
                self.expect(&Tok::Dot)?;
                let body = self.term()?;
                Ok(Raw::Swap(a, b, Box::new(body)))
            }
            Tok::LParen => {
                self.bump();
                let first = self.term()?;
                if self.eat(&Tok::Comma) {
                    let second = self.term()?;
                    self.expect(&Tok::RParen)?;
                    return Ok(Raw::Pair(Box::new(first), Box::new(second), pos));
                }
                self.expect(&Tok::RParen)?;
                Ok(first)
            }
            Tok::LBrack => {
                self.bump();
                let mut items = Vec::new();
                if self.eat(&Tok::RBrack) {
                    return Ok(Raw::List(items, None, pos));
                }
                loop {
                    items.push(self.term()?);
                    if self.eat(&Tok::Comma) {
                        continue;
                    }
                    let tail = if self.eat(&Tok::Bar) {
                        Some(Box::new(self.term()?))
                    } else {
                        None
                    };
                    self.expect(&Tok::RBrack)?;
                    return Ok(Raw::List(items, tail, pos));
                }
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    /// `p(t, ...)`, `t = u` or `a # t`.
    pub fn goal(&mut self) -> PResult<RawGoal> {
        let t = self.term()?;
        if self.eat(&Tok::Eq) {
            return Ok(RawGoal::Eq(t, self.term()?));
        }
        if self.eat(&Tok::Hash) {
            return Ok(RawGoal::Fresh(t, self.term()?));
        }
        match t {
            Raw::Call(p, args, pos) => Ok(RawGoal::Atom(p, args, pos)),
            Raw::Lower(p, pos) => Ok(RawGoal::Atom(p, Vec::new(), pos)),
            other => Err(ParseError::new(
                other.pos(),
                "expected an atom, an equation or a freshness goal",
            )),
        }
    }

    pub fn goals(&mut self) -> PResult<Vec<RawGoal>> {
        let mut out = vec![self.goal()?];
        while self.eat(&Tok::Comma) {
            out.push(self.goal()?);
        }
        Ok(out)
    }

    fn sort(&mut self) -> PResult<RawSort> {
        if self.eat(&Tok::Lt) {
            let (a, pos) = self.lower()?;
            self.expect(&Tok::Gt)?;
            let body = self.sort()?;
            return Ok(RawSort::Abs(a, pos, Box::new(body)));
        }
        let (s, pos) = self.lower()?;
        Ok(RawSort::Ident(s, pos))
    }

    fn sorts(&mut self) -> PResult<Vec<RawSort>> {
        let mut out = Vec::new();
        if !self.eat(&Tok::LParen) {
            return Ok(out);
        }
        if self.eat(&Tok::RParen) {
            return Ok(out);
        }
        loop {
            out.push(self.sort()?);
            if self.eat(&Tok::RParen) {
                return Ok(out);
            }
            self.expect(&Tok::Comma)?;
        }
    }

    fn ident_list(&mut self) -> PResult<Vec<(String, Pos)>> {
        let mut out = vec![self.lower()?];
        while self.eat(&Tok::Comma) {
            out.push(self.lower()?);
        }
        Ok(out)
    }

    pub fn statement(&mut self) -> PResult<Stmt> {
        if let (Tok::Lower(k), Tok::Lower(_)) = (self.peek().clone(), self.peek_at(1).clone()) {
            if KEYWORDS.contains(&k.as_str()) {
                self.bump();
                let stmt = match k.as_str() {
                    "nametype" => Stmt::NameTypes(self.ident_list()?),
                    "type" => Stmt::DataTypes(self.ident_list()?),
                    "name" | "const" => {
                        let ids = self.ident_list()?;
                        self.expect(&Tok::Colon)?;
                        let (ty, pos) = self.lower()?;
                        if k == "name" {
                            Stmt::Names(ids, ty, pos)
                        } else {
                            Stmt::Consts(ids, ty, pos)
                        }
                    }
                    "func" => {
                        let (f, pos) = self.lower()?;
                        let args = self.sorts()?;
                        self.expect(&Tok::Arrow)?;
                        let (result, rpos) = self.lower()?;
                        Stmt::Func(f, pos, args, result, rpos)
                    }
                    _ => {
                        let (p, pos) = self.lower()?;
                        Stmt::Pred(p, pos, self.sorts()?)
                    }
                };
                self.expect(&Tok::Dot)?;
                return Ok(stmt);
            }
        }
        let head = self.goal()?;
        let body = if self.eat(&Tok::Turnstile) {
            self.goals()?
        } else {
            Vec::new()
        };
        self.expect(&Tok::Dot)?;
        Ok(Stmt::Clause(head, body))
    }

    pub fn formula(&mut self) -> PResult<RawFormula> {
        let lhs = self.implication()?;
        if self.eat(&Tok::Iff) {
            let rhs = self.formula()?;
            return Ok(RawFormula::Iff(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> PResult<RawFormula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implication()?;
            return Ok(RawFormula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<RawFormula> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Or) {
            let rhs = self.conjunction()?;
            lhs = RawFormula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<RawFormula> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.unary()?;
            lhs = RawFormula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<RawFormula> {
        if self.eat(&Tok::Tilde) {
            return Ok(RawFormula::Not(Box::new(self.unary()?)));
        }
        if let (Tok::Lower(k), Tok::Lower(_) | Tok::Upper(_), Tok::Colon) = (
            self.peek().clone(),
            self.peek_at(1).clone(),
            self.peek_at(2).clone(),
        ) {
            let q = match k.as_str() {
                "forall" => Some(Quant::Forall),
                "exists" => Some(Quant::Exists),
                "new" => Some(Quant::New),
                _ => None,
            };
            if let Some(q) = q {
                self.bump();
                let (x, pos) = match self.bump() {
                    (Tok::Lower(s) | Tok::Upper(s), p) => (s, p),
                    _ => unreachable!(),
                };
                self.expect(&Tok::Colon)?;
                let sort = self.sort()?;
                self.expect(&Tok::Dot)?;
                let body = self.formula()?;
                return Ok(RawFormula::Quant(q, x, pos, sort, Box::new(body)));
            }
        }
        match self.peek() {
            Tok::Lower(k) if k == "true" && !matches!(self.peek_at(1), Tok::LParen) => {
                self.bump();
                return Ok(RawFormula::True);
            }
            Tok::Lower(k) if k == "false" && !matches!(self.peek_at(1), Tok::LParen) => {
                self.bump();
                return Ok(RawFormula::False);
            }
            Tok::LParen if !self.is_swap_prefix() => {
                let save = self.i;
                self.bump();
                if let Ok(f) = self.formula() {
                    if self.eat(&Tok::RParen) {
                        return Ok(f);
                    }
                }
                self.i = save;
            }
            _ => {}
        }
        Ok(RawFormula::Goal(self.goal()?))
    }
}
