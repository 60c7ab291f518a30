//! Parser for scripts (`def`, `eval`, `reg`, `combine`) and for the
//! first-order query language inside their quoted strings.
//!
//! Binding, loosest first: quantifiers (scope extends as far right as
//! possible), `<=>`, `=>` (right associative), `|`, `&`, `~`. A quantifier
//! is an identifier starting with `A` or `E` in formula position, e.g.
//! `An,x` or `E x`.

use super::ast::{CmpOp, Command, Formula, Term};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(u64),
    Dollar(String),
    At(u32),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    And,
    Or,
    Not,
    Implies,
    Iff,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Dollar(s) => format!("`${s}`"),
            Tok::At(v) => format!("`@{v}`"),
            Tok::End => "end of formula".into(),
            other => format!("`{}`", tok_text(other)),
        }
    }
}

fn tok_text(t: &Tok) -> &'static str {
    match t {
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBracket => "[",
        Tok::RBracket => "]",
        Tok::Comma => ",",
        Tok::And => "&",
        Tok::Or => "|",
        Tok::Not => "~",
        Tok::Implies => "=>",
        Tok::Iff => "<=>",
        Tok::Eq => "=",
        Tok::Ne => "!=",
        Tok::Lt => "<",
        Tok::Le => "<=",
        Tok::Gt => ">",
        Tok::Ge => ">=",
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::Star => "*",
        Tok::Slash => "/",
        _ => "?",
    }
}

/// A position inside the script, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

fn syntax<T>(pos: Pos, message: impl Into<String>) -> Result<T> {
    Err(Error::Syntax { line: pos.line, column: pos.column, message: message.into() })
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn lex(src: &str, start: Pos) -> Result<Vec<(Tok, Pos)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut pos = start;
    let mut i = 0;
    let advance = |pos: &mut Pos, c: char| {
        if c == '\n' {
            pos.line += 1;
            pos.column = 1;
        } else {
            pos.column += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut pos, c);
            i += 1;
            continue;
        }
        let here = pos;
        let peek = |k: usize| chars.get(i + k).copied();
        let (tok, len) = match c {
            '?' => {
                let mut j = i + 1;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                let word: String = chars[i + 1..j].iter().collect();
                if word != "msd_fib" {
                    return syntax(here, format!("unsupported numeration system `?{word}`"));
                }
                for &ch in &chars[i..j] {
                    advance(&mut pos, ch);
                }
                i = j;
                continue;
            }
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            ',' => (Tok::Comma, 1),
            '&' => (Tok::And, 1),
            '|' => (Tok::Or, 1),
            '~' => (Tok::Not, 1),
            '+' => (Tok::Plus, 1),
            '-' => (Tok::Minus, 1),
            '*' => (Tok::Star, 1),
            '/' => (Tok::Slash, 1),
            '=' if peek(1) == Some('>') => (Tok::Implies, 2),
            '=' => (Tok::Eq, 1),
            '!' if peek(1) == Some('=') => (Tok::Ne, 2),
            '<' if peek(1) == Some('=') && peek(2) == Some('>') => (Tok::Iff, 3),
            '<' if peek(1) == Some('=') => (Tok::Le, 2),
            '<' => (Tok::Lt, 1),
            '>' if peek(1) == Some('=') => (Tok::Ge, 2),
            '>' => (Tok::Gt, 1),
            '@' | '$' => {
                let mut j = i + 1;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                let word: String = chars[i + 1..j].iter().collect();
                let tok = if c == '$' {
                    if word.is_empty() || !is_ident_start(word.chars().next().unwrap()) {
                        return syntax(here, "expected an automaton name after `$`");
                    }
                    Tok::Dollar(word)
                } else {
                    match word.parse() {
                        Ok(v) => Tok::At(v),
                        Err(_) => return syntax(here, "expected an output value after `@`"),
                    }
                };
                (tok, j - i)
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                match word.parse() {
                    Ok(n) => (Tok::Num(n), j - i),
                    Err(_) => return syntax(here, format!("constant `{word}` is too large")),
                }
            }
            c if is_ident_start(c) => {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                (Tok::Ident(chars[i..j].iter().collect()), j - i)
            }
            other => return syntax(here, format!("unexpected character `{other}`")),
        };
        for &ch in &chars[i..i + len] {
            advance(&mut pos, ch);
        }
        i += len;
        out.push((tok, here));
    }
    out.push((Tok::End, pos));
    Ok(out)
}

struct FormulaParser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
}

impl FormulaParser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            syntax(self.pos(), format!("expected {}, found {}", want.describe(), self.peek().describe()))
        }
    }

    fn quantifier_ahead(&self) -> bool {
        match self.peek() {
            Tok::Ident(w) if w.starts_with('A') || w.starts_with('E') => {
                if w.len() == 1 {
                    matches!(self.peek_at(1), Tok::Ident(_))
                } else {
                    !matches!(self.peek_at(1), Tok::LBracket)
                }
            }
            _ => false,
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        if self.quantifier_ahead() {
            return self.quantified();
        }
        self.iff()
    }

    fn quantified(&mut self) -> Result<Formula> {
        let Tok::Ident(word) = self.bump() else { unreachable!() };
        let universal = word.starts_with('A');
        let mut vars = Vec::new();
        let first = if word.len() == 1 {
            match self.bump() {
                Tok::Ident(v) => v,
                _ => unreachable!(),
            }
        } else {
            word[1..].to_string()
        };
        vars.push(first);
        while *self.peek() == Tok::Comma {
            self.bump();
            let pos = self.pos();
            match self.bump() {
                Tok::Ident(v) => vars.push(v),
                other => return syntax(pos, format!("expected a variable, found {}", other.describe())),
            }
        }
        let body = self.formula()?;
        Ok(if universal {
            Formula::Forall(vars, Box::new(body))
        } else {
            Formula::Exists(vars, Box::new(body))
        })
    }

    fn iff(&mut self) -> Result<Formula> {
        let mut left = self.implies()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let right = self.operand(Self::implies)?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn implies(&mut self) -> Result<Formula> {
        let left = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let right = self.operand(Self::implies)?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut left = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let right = self.operand(Self::and)?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut left = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let right = self.operand(Self::unary)?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    /// Right operand of a binary connective; a quantifier there swallows
    /// the rest of the formula.
    fn operand(&mut self, next: fn(&mut Self) -> Result<Formula>) -> Result<Formula> {
        if self.quantifier_ahead() {
            self.quantified()
        } else {
            next(self)
        }
    }

    fn unary(&mut self) -> Result<Formula> {
        if *self.peek() == Tok::Not {
            self.bump();
            let inner = self.operand(Self::unary)?;
            return Ok(Formula::negation(inner));
        }
        if self.quantifier_ahead() {
            return self.quantified();
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::LParen => {
                // `(x+1)/2 = z` starts like a parenthesized formula
                let save = self.i;
                if let Ok(atom) = self.comparison() {
                    if matches!(self.peek(), Tok::And | Tok::Or | Tok::Implies | Tok::Iff | Tok::RParen | Tok::End) {
                        return Ok(atom);
                    }
                }
                self.i = save;
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Dollar(name) => {
                self.bump();
                self.expect(Tok::LParen)?;
                let mut args = vec![self.term()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.term()?);
                }
                self.expect(Tok::RParen)?;
                Ok(Formula::Call(name, args))
            }
            Tok::Ident(name) if *self.peek_at(1) == Tok::LBracket => {
                self.bump();
                self.bump();
                let arg = self.term()?;
                self.expect(Tok::RBracket)?;
                let pos = self.pos();
                let negated = match self.bump() {
                    Tok::Eq => false,
                    Tok::Ne => true,
                    other => return syntax(pos, format!("expected `=` or `!=`, found {}", other.describe())),
                };
                let pos = self.pos();
                match self.bump() {
                    Tok::At(value) => Ok(Formula::Output { name, arg, value, negated }),
                    other => syntax(pos, format!("expected `@value`, found {}", other.describe())),
                }
            }
            Tok::Ident(w) if w == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(w) if w == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(_) | Tok::Num(_) => self.comparison(),
            other => syntax(self.pos(), format!("expected a formula, found {}", other.describe())),
        }
    }

    fn comparison(&mut self) -> Result<Formula> {
        let left = self.term()?;
        let pos = self.pos();
        let op = match self.bump() {
            Tok::Eq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            other => return syntax(pos, format!("expected a comparison, found {}", other.describe())),
        };
        let right = self.term()?;
        Ok(Formula::Cmp(op, left, right))
    }

    fn term(&mut self) -> Result<Term> {
        let mut left = self.product()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    left = Term::Add(Box::new(left), Box::new(self.product()?));
                }
                Tok::Minus => {
                    self.bump();
                    left = Term::Sub(Box::new(left), Box::new(self.product()?));
                }
                _ => return Ok(left),
            }
        }
    }

    fn product(&mut self) -> Result<Term> {
        let mut left = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    let pos = self.pos();
                    self.bump();
                    let right = self.factor()?;
                    left = match (left, right) {
                        (Term::Const(c), t) | (t, Term::Const(c)) => Term::Mul(c, Box::new(t)),
                        _ => return syntax(pos, "multiplication needs a constant factor"),
                    };
                }
                Tok::Slash => {
                    self.bump();
                    let pos = self.pos();
                    match self.bump() {
                        Tok::Num(0) => return syntax(pos, "division by zero"),
                        Tok::Num(c) => left = Term::Div(Box::new(left), c),
                        _ => return syntax(pos, "division needs a positive constant divisor"),
                    }
                }
                _ => return Ok(left),
            }
        }
    }

    fn factor(&mut self) -> Result<Term> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(n) => Ok(Term::Const(n)),
            Tok::Ident(v) => Ok(Term::Var(v)),
            Tok::LParen => {
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            other => syntax(pos, format!("expected a term, found {}", other.describe())),
        }
    }
}

fn parse_formula_at(src: &str, start: Pos) -> Result<Formula> {
    let toks = lex(src, start)?;
    let mut p = FormulaParser { toks, i: 0 };
    if *p.peek() == Tok::End {
        return syntax(p.pos(), "empty formula");
    }
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return syntax(p.pos(), format!("unexpected {}", p.peek().describe()));
    }
    Ok(f)
}

/// Parse a single formula (without surrounding quotes).
pub fn parse_formula(src: &str) -> Result<Formula> {
    parse_formula_at(src, Pos { line: 1, column: 1 })
}

/// Script-level scanner.
struct Scanner<'a> {
    chars: Vec<char>,
    i: usize,
    pos: Pos,
    _src: &'a str,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str) -> Self {
        Self { chars: src.chars().collect(), i: 0, pos: Pos { line: 1, column: 1 }, _src: src }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.i += 1;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }

    /// Skip blanks and comments; with `stop_at_newline`, stop before `\n`.
    fn skip(&mut self, stop_at_newline: bool) {
        while let Some(c) = self.peek() {
            if c == '#' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            } else if c == '\n' && stop_at_newline {
                return;
            } else if c.is_whitespace() {
                self.bump();
            } else {
                return;
            }
        }
    }

    fn word(&mut self) -> Option<(String, Pos)> {
        let start = self.pos;
        let mut w = String::new();
        while let Some(c) = self.peek() {
            if is_ident_char(c) || c == '?' {
                w.push(c);
                self.bump();
            } else {
                break;
            }
        }
        (!w.is_empty()).then_some((w, start))
    }

    fn expect_word(&mut self, what: &str) -> Result<(String, Pos)> {
        self.skip(false);
        match self.word() {
            Some(w) => Ok(w),
            None => syntax(self.pos, format!("expected {what}")),
        }
    }

    /// A double-quoted string; returns its contents and the position of
    /// its first character.
    fn string(&mut self) -> Result<(String, Pos)> {
        self.skip(false);
        if self.peek() != Some('"') {
            return syntax(self.pos, "expected a quoted string");
        }
        let open = self.pos;
        self.bump();
        let start = self.pos;
        let mut s = String::new();
        loop {
            match self.bump() {
                Some('"') => return Ok((s, start)),
                Some(c) => s.push(c),
                None => return syntax(open, "unterminated string"),
            }
        }
    }

    fn terminator(&mut self) {
        self.skip(true);
        if matches!(self.peek(), Some(':') | Some(';')) {
            self.bump();
        }
    }
}

/// Parse a whole script.
pub fn parse_script(src: &str) -> Result<Vec<Command>> {
    let mut sc = Scanner::new(src);
    let mut out = Vec::new();
    loop {
        sc.skip(false);
        if sc.peek().is_none() {
            return Ok(out);
        }
        let Some((kw, kpos)) = sc.word() else {
            return syntax(sc.pos, format!("unexpected `{}`", sc.peek().unwrap()));
        };
        let line = kpos.line;
        match kw.as_str() {
            "def" | "eval" => {
                let (name, _) = sc.expect_word("a name")?;
                let (body, start) = sc.string()?;
                let formula = parse_formula_at(&body, start)?;
                sc.terminator();
                out.push(if kw == "def" {
                    Command::Def { name, formula, line }
                } else {
                    Command::Eval { name, formula, line }
                });
            }
            "reg" => {
                let (name, _) = sc.expect_word("a name")?;
                let mut arity = 0;
                loop {
                    sc.skip(false);
                    if sc.peek() == Some('"') {
                        break;
                    }
                    let (w, wpos) = sc.expect_word("`msd_fib` or a pattern")?;
                    if w.trim_start_matches('?') != "msd_fib" {
                        return syntax(wpos, format!("unsupported numeration system `{w}`"));
                    }
                    arity += 1;
                }
                if arity == 0 {
                    return syntax(sc.pos, "`reg` needs at least one `msd_fib`");
                }
                let (pattern, _) = sc.string()?;
                sc.terminator();
                out.push(Command::Reg { name, arity, pattern, line });
            }
            "combine" => {
                let (name, _) = sc.expect_word("a name")?;
                let mut parts = Vec::new();
                loop {
                    sc.skip(true);
                    match sc.peek() {
                        None | Some('\n') => break,
                        Some(':') | Some(';') => {
                            sc.bump();
                            break;
                        }
                        _ => {}
                    }
                    let Some((part, ppos)) = sc.word() else {
                        return syntax(sc.pos, "expected `name=value`");
                    };
                    let value = if sc.peek() == Some('=') {
                        sc.bump();
                        let Some((v, vpos)) = sc.word() else {
                            return syntax(sc.pos, "expected an output value");
                        };
                        match v.parse::<u32>() {
                            Ok(v) => v,
                            Err(_) => return syntax(vpos, format!("bad output value `{v}`")),
                        }
                    } else {
                        parts.len() as u32 + 1
                    };
                    if part.starts_with('?') {
                        return syntax(ppos, "unexpected option");
                    }
                    parts.push((part, value));
                }
                if parts.is_empty() {
                    return syntax(kpos, "`combine` needs at least one part");
                }
                out.push(Command::Combine { name, parts, line });
            }
            other => return syntax(kpos, format!("unknown command `{other}`")),
        }
    }
}
