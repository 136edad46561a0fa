//! Growth-rate expressions m(x): a small recursive-descent parser,
//! evaluator, printer, and the sampled profile with its case tag.

use crate::error::{Error, Result};
use crate::grid::{Field, Grid1D};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Abs,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Abs => "abs",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
            Func::Abs => v.abs(),
        }
    }

    fn lookup(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Neg(e) => -e.eval(x),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x), b.eval(x));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(f, e) => f.apply(e.eval(x)),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::X => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.is_constant(),
            Expr::Bin(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }
}

// Printing is fully parenthesised so that it always reparses to the same tree shape.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => {
                if *v < 0.0 {
                    write!(f, "(-{:?})", -v)
                } else {
                    write!(f, "{v:?}")
                }
            }
            Expr::X => write!(f, "x"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a}{s}{b})")
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser {
        s: src.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    if p.pos == p.s.len() {
        return Err(Error::Syntax {
            offset: p.pos,
            msg: "empty expression".into(),
        });
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == b'+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.factor()?;
            let op = if c == b'*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.factor()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.base()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                if name == "x" {
                    return Ok(Expr::X);
                }
                let Some(f) = Func::lookup(name) else {
                    return Err(Error::UnknownIdentifier {
                        offset: start,
                        name: name.into(),
                    });
                };
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                Ok(Expr::Call(f, Box::new(arg)))
            }
            Some(_) => Err(self.err("unexpected character")),
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.s.len() && p.s[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.s.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.s.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.s.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            let before = self.pos;
            digits(self);
            if self.pos == before {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map(Expr::Num)
            .map_err(|_| Error::Syntax {
                offset: start,
                msg: format!("bad number `{text}`"),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    A1,
    A2,
    /// Constant m with nonnegative mean.
    A2Constant,
    Neither,
}

#[derive(Debug, Clone)]
pub struct GrowthProfile {
    pub ast: Expr,
    pub samples: Field,
    pub mean: f64,
    pub max: f64,
    pub case: CaseTag,
}

const SIGN_TOL: f64 = 1e-12;

pub fn sample_profile(ast: &Expr, g: &Grid1D) -> Result<GrowthProfile> {
    let samples: Field = g.nodes().into_iter().map(|x| ast.eval(x)).collect();
    if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::Evaluation(format!(
            "m({}) = {} is not finite",
            g.x(i),
            samples[i]
        )));
    }
    let integral = g.integrate(&samples);
    let mean = integral / g.length;
    let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let constant = ast.is_constant() || max - min <= SIGN_TOL * (1.0 + max.abs());
    let case = if integral < -SIGN_TOL && max > 0.0 {
        CaseTag::A1
    } else if integral >= -SIGN_TOL && !constant {
        CaseTag::A2
    } else if constant && mean >= 0.0 {
        CaseTag::A2Constant
    } else {
        CaseTag::Neither
    };
    Ok(GrowthProfile {
        ast: ast.clone(),
        samples,
        mean,
        max,
        case,
    })
}

pub fn profile_from_str(src: &str, g: &Grid1D) -> Result<GrowthProfile> {
    sample_profile(&parse(src)?, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Bc;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn parse_examples() {
        let e = parse("-x^3+5").unwrap();
        assert_eq!(e.eval(0.0), 5.0);
        assert!((e.eval(PI) - (5.0 - PI.powi(3))).abs() < 1e-12);
        assert_eq!(parse("sin(x)+1").unwrap().eval(0.0), 1.0);
        assert!(matches!(parse("2*("), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(
            parse("foo(x)"),
            Err(Error::UnknownIdentifier { offset: 0, .. })
        ));
        assert!(matches!(parse("  "), Err(Error::Syntax { .. })));
        assert!(matches!(parse("1 2"), Err(Error::Syntax { offset: 2, .. })));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse("2^3^2").unwrap().eval(0.0), 512.0);
        assert_eq!(parse("1-2-3").unwrap().eval(0.0), -4.0);
        assert_eq!(parse("8/2/2").unwrap().eval(0.0), 2.0);
        assert_eq!(parse("-2^2").unwrap().eval(0.0), 4.0);
        assert_eq!(parse("2 * x + 1").unwrap().eval(3.0), 7.0);
        assert_eq!(parse("1.5e1").unwrap().eval(0.0), 15.0);
        assert!((parse("5*cos(x)+0.3").unwrap().eval(0.0) - 5.3).abs() < 1e-15);
        assert_eq!(parse("abs(-x)").unwrap().eval(2.0), 2.0);
        assert_eq!(parse("exp(0)").unwrap().eval(1.0), 1.0);
    }

    #[test]
    fn sample_profile_examples() {
        let g = Grid1D::standard(Bc::Neumann);
        let p = profile_from_str("-x^3+5", &g).unwrap();
        assert_eq!(p.case, CaseTag::A1);
        assert!(p.mean < 0.0);
        let p = profile_from_str("sin(x)+1", &g).unwrap();
        assert_eq!(p.case, CaseTag::A2);
        assert!((p.mean - (1.0 + 2.0 / PI)).abs() < 1e-4);
        let p = profile_from_str("4", &g).unwrap();
        assert_eq!(p.case, CaseTag::A2Constant);
        assert!((p.mean - 4.0).abs() < 1e-14);
        assert_eq!(profile_from_str("-1", &g).unwrap().case, CaseTag::Neither);
        assert_eq!(profile_from_str("-1-x", &g).unwrap().case, CaseTag::Neither);
        assert!(matches!(
            profile_from_str("1/(x-x)", &g),
            Err(Error::Evaluation(_))
        ));
    }

    // Independent reference: a direct interpreter over the source text using
    // precedence climbing, sharing no code with the parser above.
    fn reference_eval(src: &str, x: f64) -> f64 {
        fn prec(op: char) -> (u8, bool) {
            match op {
                '+' | '-' => (1, false),
                '*' | '/' => (2, false),
                _ => (3, true),
            }
        }
        fn atom(t: &[char], i: &mut usize, x: f64) -> f64 {
            while t[*i] == ' ' {
                *i += 1;
            }
            let c = t[*i];
            if c == '-' {
                *i += 1;
                return -atom(t, i, x);
            }
            if c == '(' {
                *i += 1;
                let v = climb(t, i, x, 1);
                *i += 1;
                return v;
            }
            if c == 'x' {
                *i += 1;
                return x;
            }
            if c.is_ascii_alphabetic() {
                let name: String = t[*i..*i + 3].iter().collect();
                *i += 4;
                let v = climb(t, i, x, 1);
                *i += 1;
                return match name.as_str() {
                    "sin" => v.sin(),
                    "cos" => v.cos(),
                    "exp" => v.exp(),
                    _ => v.abs(),
                };
            }
            let s = *i;
            while *i < t.len() && (t[*i].is_ascii_digit() || t[*i] == '.') {
                *i += 1;
            }
            t[s..*i].iter().collect::<String>().parse().unwrap()
        }
        fn climb(t: &[char], i: &mut usize, x: f64, min: u8) -> f64 {
            let mut lhs = atom(t, i, x);
            loop {
                while *i < t.len() && t[*i] == ' ' {
                    *i += 1;
                }
                if *i >= t.len() || !"+-*/^".contains(t[*i]) {
                    return lhs;
                }
                let op = t[*i];
                let (p, right) = prec(op);
                if p < min {
                    return lhs;
                }
                *i += 1;
                let rhs = climb(t, i, x, if right { p } else { p + 1 });
                lhs = match op {
                    '+' => lhs + rhs,
                    '-' => lhs - rhs,
                    '*' => lhs * rhs,
                    '/' => lhs / rhs,
                    _ => lhs.powf(rhs),
                };
            }
        }
        let t: Vec<char> = src.chars().collect();
        let mut i = 0;
        climb(&t, &mut i, x, 1)
    }

    fn arb_src() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![
            Just("x".to_string()),
            (0u32..50).prop_map(|v| format!("{}", v as f64 / 10.0)),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (
                    inner.clone(),
                    inner.clone(),
                    prop::sample::select(vec!['+', '-', '*', '/'])
                )
                    .prop_map(|(a, b, o)| format!("{a} {o} {b}")),
                (inner.clone(), 0u32..3).prop_map(|(a, k)| format!("({a})^{k}")),
                (
                    inner.clone(),
                    prop::sample::select(vec!["sin", "cos", "exp", "abs"])
                )
                    .prop_map(|(a, f)| format!("{f}({a})")),
                inner.clone().prop_map(|a| format!("-({a})")),
                inner.prop_map(|a| format!("({a})")),
            ]
        })
    }

    fn same(a: f64, b: f64) -> bool {
        (a.is_nan() && b.is_nan()) || a == b || (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
    }

    proptest! {
        #[test]
        fn matches_reference_interpreter(src in arb_src(), x in -3.0f64..3.0) {
            let e = parse(&src).unwrap();
            prop_assert!(same(e.eval(x), reference_eval(&src, x)), "{src}");
        }

        #[test]
        fn print_roundtrip(src in arb_src()) {
            let e = parse(&src).unwrap();
            let again = parse(&e.to_string()).unwrap();
            prop_assert_eq!(&again, &e);
            let mut rng = 0x2545F4914F6CDD1Du64;
            for _ in 0..1000 {
                rng ^= rng << 13; rng ^= rng >> 7; rng ^= rng << 17;
                let x = (rng >> 11) as f64 / (1u64 << 53) as f64 * 8.0 - 4.0;
                prop_assert!(same(e.eval(x), again.eval(x)));
            }
        }
    }
}
