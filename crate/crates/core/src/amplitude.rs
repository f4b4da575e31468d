//! Textual complex amplitudes.
//!
//! Machine descriptions store amplitudes as short expressions such as
//! `1/sqrt(2)` or `exp(i*pi*1/2)` so exported files keep exact-looking values.
//! The grammar is a tiny arithmetic language over complex numbers:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | '+' unary | primary
//! primary := number | 'i' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func    := 'sqrt' | 'exp'
//! ```

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::AmplitudeError;

/// A complex amplitude together with the expression it was written as.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Amplitude {
    value: Complex64,
    text: String,
}

impl Amplitude {
    pub fn parse(text: &str) -> Result<Self, AmplitudeError> {
        let value = parse_amplitude(text)?;
        Ok(Self {
            value,
            text: text.trim().to_string(),
        })
    }

    /// Wraps a computed value, rendering it as round-trippable decimal text.
    pub fn from_value(value: Complex64) -> Self {
        Self {
            value,
            text: render_complex(value),
        }
    }

    pub fn one() -> Self {
        Self {
            value: Complex64::new(1.0, 0.0),
            text: "1".to_string(),
        }
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

impl PartialEq for Amplitude {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl fmt::Display for Amplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl TryFrom<String> for Amplitude {
    type Error = AmplitudeError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Amplitude::parse(&value)
    }
}

impl From<Amplitude> for String {
    fn from(a: Amplitude) -> String {
        a.text
    }
}

/// Renders a complex number in a form `parse_amplitude` reads back exactly.
pub fn render_complex(z: Complex64) -> String {
    // `{:?}` on f64 prints the shortest string that round-trips.
    let re = format!("{:?}", z.re);
    if z.im == 0.0 {
        return re;
    }
    let im = format!("{:?}", z.im.abs());
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    if z.re == 0.0 {
        if sign == '-' {
            format!("-{im}*i")
        } else {
            format!("{im}*i")
        }
    } else {
        format!("{re}{sign}{im}*i")
    }
}

/// Evaluates an amplitude expression.
pub fn parse_amplitude(text: &str) -> Result<Complex64, AmplitudeError> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    parser.skip_ws();
    if parser.at_end() {
        return Err(AmplitudeError::Syntax {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let v = parser.expr()?;
    parser.skip_ws();
    if !parser.at_end() {
        return Err(parser.error("unexpected trailing input"));
    }
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(AmplitudeError::NonFinite);
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn error(&self, msg: &str) -> AmplitudeError {
        AmplitudeError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), AmplitudeError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Complex64, AmplitudeError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc += self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc -= self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Complex64, AmplitudeError> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc *= self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.unary()?;
                    if d.norm_sqr() == 0.0 {
                        return Err(AmplitudeError::DivisionByZero { pos: at });
                    }
                    acc /= d;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Complex64, AmplitudeError> {
        self.skip_ws();
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Complex64, AmplitudeError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.error("unexpected end of expression")),
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphabetic()) {
                    self.pos += 1;
                }
                let ident = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                match ident {
                    "i" => Ok(Complex64::i()),
                    "pi" => Ok(Complex64::new(std::f64::consts::PI, 0.0)),
                    "sqrt" | "exp" => {
                        self.expect(b'(')?;
                        let arg = self.expr()?;
                        self.expect(b')')?;
                        Ok(if ident == "sqrt" {
                            arg.sqrt()
                        } else {
                            arg.exp()
                        })
                    }
                    _ => Err(AmplitudeError::Syntax {
                        pos: start,
                        msg: format!("unknown identifier '{ident}'"),
                    }),
                }
            }
            Some(c) => Err(self.error(&format!("unexpected character '{}'", c as char))),
        }
    }

    fn number(&mut self) -> Result<Complex64, AmplitudeError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'.') {
            self.pos += 1;
        }
        // optional exponent, only when followed by a digit (or sign + digit)
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        text.parse::<f64>()
            .map(|v| Complex64::new(v, 0.0))
            .map_err(|_| AmplitudeError::Syntax {
                pos: start,
                msg: format!("malformed number '{text}'"),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn inverse_sqrt_two() {
        let v = parse_amplitude("1/sqrt(2)").unwrap();
        assert!(close(
            v,
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
        ));
    }

    #[test]
    fn euler_phase() {
        let v = parse_amplitude("exp(i*pi*2/2)").unwrap();
        assert!(close(v, Complex64::new(-1.0, 0.0)));
    }

    #[test]
    fn zero_and_rationals() {
        assert_eq!(parse_amplitude("0").unwrap(), Complex64::new(0.0, 0.0));
        assert!(close(
            parse_amplitude("3/4").unwrap(),
            Complex64::new(0.75, 0.0)
        ));
        assert!(close(
            parse_amplitude("-1/2 + 0.5*i").unwrap(),
            Complex64::new(-0.5, 0.5)
        ));
        assert!(close(
            parse_amplitude("1e-3").unwrap(),
            Complex64::new(1e-3, 0.0)
        ));
    }

    #[test]
    fn errors_carry_position() {
        match parse_amplitude("1/(1-1)") {
            Err(AmplitudeError::DivisionByZero { pos }) => assert_eq!(pos, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse_amplitude("1 + foo") {
            Err(AmplitudeError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_amplitude("").is_err());
        assert!(parse_amplitude("sqrt(2").is_err());
        assert!(parse_amplitude("2 3").is_err());
    }

    #[test]
    fn rendered_values_parse_back() {
        for z in [
            Complex64::new(0.1, -0.2),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1e-7),
            Complex64::new(
                std::f64::consts::FRAC_1_SQRT_2,
                std::f64::consts::FRAC_1_SQRT_2,
            ),
        ] {
            let back = parse_amplitude(&render_complex(z)).unwrap();
            assert_eq!(back, z);
        }
    }

    proptest::proptest! {
        #[test]
        fn render_round_trip(re in -1e3f64..1e3, im in -1e3f64..1e3) {
            let z = Complex64::new(re, im);
            let back = parse_amplitude(&render_complex(z)).unwrap();
            proptest::prop_assert!((back - z).norm() <= 1e-12 * (1.0 + z.norm()));
        }
    }
}
