//! Field expressions in `x` and `z`: numbers, `+ - * /` (also `×` and `÷`),
//! parentheses, `exp(.)` and `min(., .)`.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    X,
    Z,
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
    Exp(Box<Node>),
    Min(Box<Node>, Box<Node>),
}

impl Node {
    fn eval(&self, x: f64, z: f64) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::X => x,
            Node::Z => z,
            Node::Neg(a) => -a.eval(x, z),
            Node::Bin(op, a, b) => {
                let (a, b) = (a.eval(x, z), b.eval(x, z));
                match op {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    _ => a / b,
                }
            }
            Node::Exp(a) => a.eval(x, z).exp(),
            Node::Min(a, b) => a.eval(x, z).min(b.eval(x, z)),
        }
    }

    fn uses(&self, var: &Node) -> bool {
        match self {
            Node::Num(_) => false,
            Node::X | Node::Z => self == var,
            Node::Neg(a) | Node::Exp(a) => a.uses(var),
            Node::Bin(_, a, b) | Node::Min(a, b) => a.uses(var) || b.uses(var),
        }
    }
}

/// A parsed expression together with its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    text: String,
    root: Node,
}

impl Expr {
    pub fn parse(text: &str) -> Result<Self, String> {
        let tokens = lex(text)?;
        let mut p = Parser { tokens, pos: 0 };
        let root = p.sum()?;
        if p.pos != p.tokens.len() {
            return Err(format!("unexpected `{}` in `{text}`", p.tokens[p.pos]));
        }
        Ok(Self { text: text.trim().to_string(), root })
    }

    pub fn constant(v: f64) -> Self {
        Self { text: format!("{v}"), root: Node::Num(v) }
    }

    pub fn eval(&self, x: f64, z: f64) -> f64 {
        self.root.eval(x, z)
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn depends_on_x(&self) -> bool {
        self.root.uses(&Node::X)
    }

    pub fn depends_on_z(&self) -> bool {
        self.root.uses(&Node::Z)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    Open,
    Close,
    Comma,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "{v}"),
            Tok::Ident(s) => f.write_str(s),
            Tok::Op(c) => write!(f, "{c}"),
            Tok::Open => f.write_str("("),
            Tok::Close => f.write_str(")"),
            Tok::Comma => f.write_str(","),
        }
    }
}

fn lex(text: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' | '-' | '*' | '/' => {
                out.push(Tok::Op(c));
                i += 1;
            }
            '×' => {
                out.push(Tok::Op('*'));
                i += 1;
            }
            '÷' => {
                out.push(Tok::Op('/'));
                i += 1;
            }
            '−' => {
                out.push(Tok::Op('-'));
                i += 1;
            }
            '(' => {
                out.push(Tok::Open);
                i += 1;
            }
            ')' => {
                out.push(Tok::Close);
                i += 1;
            }
            ',' => {
                out.push(Tok::Comma);
                i += 1;
            }
            _ if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Tok::Num(s.parse().map_err(|_| format!("bad number `{s}`"))?));
            }
            _ if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            _ => return Err(format!("unexpected character `{c}` in `{text}`")),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), String> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(format!("expected `{want}`, found `{t}`")),
            None => Err(format!("expected `{want}` at end of expression")),
        }
    }

    fn sum(&mut self) -> Result<Node, String> {
        let mut lhs = self.product()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.product()?));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Node, String> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, String> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Node, String> {
        match self.next() {
            Some(Tok::Num(v)) => Ok(Node::Num(v)),
            Some(Tok::Open) => {
                let e = self.sum()?;
                self.expect(Tok::Close)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "x" => Ok(Node::X),
                "z" => Ok(Node::Z),
                "exp" => {
                    self.expect(Tok::Open)?;
                    let a = self.sum()?;
                    self.expect(Tok::Close)?;
                    Ok(Node::Exp(Box::new(a)))
                }
                "min" => {
                    self.expect(Tok::Open)?;
                    let a = self.sum()?;
                    self.expect(Tok::Comma)?;
                    let b = self.sum()?;
                    self.expect(Tok::Close)?;
                    Ok(Node::Min(Box::new(a), Box::new(b)))
                }
                other => Err(format!("unknown name `{other}`")),
            },
            Some(t) => Err(format!("unexpected `{t}`")),
            None => Err("empty expression".into()),
        }
    }
}
