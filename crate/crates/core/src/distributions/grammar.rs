//! Text form of [`DistributionSpec`].
//!
//! ```text
//! spec   := normal(mu, sigma) | uniform(a, b) | beta(a, b) | cosine | t(nu)
//!         | cauchy(loc, scale) | laplace(loc, scale) | logistic(loc, scale)
//!         | prod(spec, ...) | iid(spec, d) | mix(w:spec, ...)
//!         | mvn([m, ...], [[c, ...], ...]) | mg(d, a)
//!         | piecewise([b0, b1, ...], [h0, ...])
//! number := decimal literal | sqrt(number) | pi, optionally negated
//! ```
//!
//! `normal`, `uniform`, `cauchy`, `laplace` and `logistic` may omit their
//! arguments for the standard member of the family. Whitespace is ignored.

use std::fmt;

use super::DistributionSpec as D;
use crate::error::{Error, Result};

pub(super) fn parse(src: &str) -> Result<D> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let spec = p.spec()?;
    p.ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    spec.validate()?;
    Ok(spec)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::InvalidSpec(format!("{msg} at offset {}", self.pos))
    }

    fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a name"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).to_ascii_lowercase())
    }

    fn number(&mut self) -> Result<f64> {
        let negative = self.eat(b'-');
        if !negative {
            self.eat(b'+');
        }
        let value = match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => match self.ident()?.as_str() {
                "sqrt" => {
                    self.expect(b'(')?;
                    let v = self.number()?;
                    self.expect(b')')?;
                    v.sqrt()
                }
                "pi" => std::f64::consts::PI,
                other => return Err(self.error(&format!("unknown constant '{other}'"))),
            },
            _ => {
                let start = self.pos;
                while let Some(&c) = self.src.get(self.pos) {
                    let exp_sign = (c == b'+' || c == b'-') && matches!(self.src[self.pos - 1], b'e' | b'E');
                    if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                text.parse::<f64>().map_err(|_| {
                    self.pos = start;
                    self.error("expected a number")
                })?
            }
        };
        Ok(if negative { -value } else { value })
    }

    fn numbers(&mut self, open: u8, close: u8) -> Result<Vec<f64>> {
        self.expect(open)?;
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(self.number()?);
            if self.eat(close) {
                return Ok(out);
            }
            self.expect(b',')?;
        }
    }

    /// Optional parenthesised argument list.
    fn args(&mut self, name: &str, arity: usize, default: &[f64]) -> Result<Vec<f64>> {
        let args = if self.peek() == Some(b'(') { self.numbers(b'(', b')')? } else { vec![] };
        if args.is_empty() && !default.is_empty() {
            return Ok(default.to_vec());
        }
        if args.len() != arity {
            return Err(self.error(&format!("{name} takes {arity} arguments, got {}", args.len())));
        }
        Ok(args)
    }

    fn spec(&mut self) -> Result<D> {
        let name = self.ident()?;
        Ok(match name.as_str() {
            "normal" | "n" | "gaussian" => {
                let a = self.args(&name, 2, &[0.0, 1.0])?;
                D::Normal { mu: a[0], sigma: a[1] }
            }
            "uniform" | "u" => {
                let a = self.args(&name, 2, &[0.0, 1.0])?;
                D::Uniform { a: a[0], b: a[1] }
            }
            "beta" => {
                let a = self.args(&name, 2, &[])?;
                D::Beta { a: a[0], b: a[1] }
            }
            "cosine" => {
                self.args(&name, 0, &[])?;
                D::Cosine
            }
            "t" | "student_t" => D::StudentT { nu: self.args(&name, 1, &[])?[0] },
            "cauchy" | "laplace" | "logistic" => {
                let a = self.args(&name, 2, &[0.0, 1.0])?;
                let (loc, scale) = (a[0], a[1]);
                match name.as_str() {
                    "cauchy" => D::Cauchy { loc, scale },
                    "laplace" => D::Laplace { loc, scale },
                    _ => D::Logistic { loc, scale },
                }
            }
            "prod" | "product" => {
                self.expect(b'(')?;
                let mut f = vec![self.spec()?];
                while self.eat(b',') {
                    f.push(self.spec()?);
                }
                self.expect(b')')?;
                D::Product(f)
            }
            "iid" => {
                self.expect(b'(')?;
                let s = self.spec()?;
                self.expect(b',')?;
                let d = self.count()?;
                self.expect(b')')?;
                D::iid(s, d)
            }
            "mix" | "mixture" => {
                self.expect(b'(')?;
                let mut c = Vec::new();
                loop {
                    let w = self.number()?;
                    self.expect(b':')?;
                    c.push((w, self.spec()?));
                    if self.eat(b')') {
                        break;
                    }
                    self.expect(b',')?;
                }
                D::Mixture(c)
            }
            "mvn" => {
                self.expect(b'(')?;
                let mean = self.numbers(b'[', b']')?;
                self.expect(b',')?;
                self.expect(b'[')?;
                let mut cov = vec![self.numbers(b'[', b']')?];
                while self.eat(b',') {
                    cov.push(self.numbers(b'[', b']')?);
                }
                self.expect(b']')?;
                self.expect(b')')?;
                D::MultivariateNormal { mean, cov }
            }
            "mg" => {
                self.expect(b'(')?;
                let d = self.count()?;
                self.expect(b',')?;
                let a = self.number()?;
                self.expect(b')')?;
                D::mg(d, a)
            }
            "piecewise" => {
                self.expect(b'(')?;
                let breakpoints = self.numbers(b'[', b']')?;
                self.expect(b',')?;
                let heights = self.numbers(b'[', b']')?;
                self.expect(b')')?;
                D::PiecewiseDensity { breakpoints, heights }
            }
            other => return Err(self.error(&format!("unknown distribution '{other}'"))),
        })
    }

    fn count(&mut self) -> Result<usize> {
        let v = self.number()?;
        if v.fract() != 0.0 || !(1.0..=1e6).contains(&v) {
            return Err(self.error("expected a positive integer"));
        }
        Ok(v as usize)
    }
}

struct List<'a>(&'a [f64]);

impl fmt::Display for List<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            D::Normal { mu, sigma } => write!(f, "normal({mu},{sigma})"),
            D::Uniform { a, b } => write!(f, "uniform({a},{b})"),
            D::Beta { a, b } => write!(f, "beta({a},{b})"),
            D::Cosine => f.write_str("cosine"),
            D::StudentT { nu } => write!(f, "t({nu})"),
            D::Cauchy { loc, scale } => write!(f, "cauchy({loc},{scale})"),
            D::Laplace { loc, scale } => write!(f, "laplace({loc},{scale})"),
            D::Logistic { loc, scale } => write!(f, "logistic({loc},{scale})"),
            D::Product(factors) => {
                if factors.len() > 1 && factors.iter().all(|s| s == &factors[0]) {
                    return write!(f, "iid({},{})", factors[0], factors.len());
                }
                f.write_str("prod(")?;
                for (i, s) in factors.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{s}")?;
                }
                f.write_str(")")
            }
            D::Mixture(c) => {
                f.write_str("mix(")?;
                for (i, (w, s)) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{w}:{s}")?;
                }
                f.write_str(")")
            }
            D::MultivariateNormal { mean, cov } => {
                write!(f, "mvn({},[", List(mean))?;
                for (i, row) in cov.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}", List(row))?;
                }
                f.write_str("])")
            }
            D::PiecewiseDensity { breakpoints, heights } => {
                write!(f, "piecewise({},{})", List(breakpoints), List(heights))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        assert_eq!(parse("normal(0,1)").unwrap(), D::standard_normal());
        assert_eq!(parse(" normal ").unwrap(), D::standard_normal());
        assert_eq!(
            parse("prod(t(5),t(5))").unwrap(),
            D::Product(vec![D::StudentT { nu: 5.0 }, D::StudentT { nu: 5.0 }])
        );
        assert_eq!(
            parse("mix(0.7:normal(0,1),0.3:normal(0,2))").unwrap(),
            D::Mixture(vec![(0.7, D::standard_normal()), (0.3, D::Normal { mu: 0.0, sigma: 2.0 })])
        );
        assert_eq!(parse("mvn([0,0],[[1,0.5],[0.5,1]])").unwrap(), D::mg(2, 0.5));
        assert_eq!(parse("mg(2, 0.5)").unwrap(), D::mg(2, 0.5));
        assert_eq!(
            parse("uniform(-sqrt(3),sqrt(3))").unwrap(),
            D::Uniform { a: -(3f64.sqrt()), b: 3f64.sqrt() }
        );
        assert_eq!(parse("iid(beta(2,5),3)").unwrap().dim(), 3);
        assert_eq!(parse("normal(1e-3, 2.5E+1)").unwrap(), D::Normal { mu: 1e-3, sigma: 25.0 });
    }

    #[test]
    fn rejects_bad_input() {
        for bad in ["", "normal(0)", "normal(0,1", "frechet(1)", "normal(0,1) x", "mix(0.5:cosine)", "t(-1)", "iid(cosine,0)"] {
            assert!(matches!(parse(bad), Err(Error::InvalidSpec(_))), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        for src in [
            "normal(0,1.5)",
            "uniform(-1.7320508075688772,1.7320508075688772)",
            "beta(3,3)",
            "cosine",
            "t(3)",
            "cauchy(0,1)",
            "laplace(0,1)",
            "logistic(0,1)",
            "iid(t(3),2)",
            "prod(beta(3,3),uniform(0,1))",
            "mix(0.1:normal(0,1),0.9:normal(1,2))",
            "mvn([0,0,0],[[1,0.2,0.2],[0.2,1,0.2],[0.2,0.2,1]])",
            "piecewise([0,2,3],[0.25,0.5])",
        ] {
            let spec = parse(src).unwrap();
            assert_eq!(spec.to_string(), src);
            assert_eq!(parse(&spec.to_string()).unwrap(), spec);
        }
    }
}
