//! Text form of progression specs.
//!
//! ```text
//! spec := "m=" INT [";P=" poly ("," poly)*]
//! poly := ["-"] term (("+"|"-") term)*
//! term := [INT] ["y" ["^" INT]]        (never empty)
//! ```
//!
//! Examples: `m=3;P=y^3,y^4`, `m=3;P=2y^4+y^3`, `m=4`.

use super::poly::IntPolynomial;
use super::spec::ProgressionSpec;
use crate::error::{Error, Result};

struct Cursor<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_literal(&mut self, lit: &str) -> Result<()> {
        for &b in lit.as_bytes() {
            if !self.eat(b) {
                return Err(self.error(&format!("\"{lit}\"")));
            }
        }
        Ok(())
    }

    fn error(&self, expected: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            expected: expected.to_string(),
        }
    }

    fn integer(&mut self) -> Result<Option<u64>> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Ok(None);
        }
        let digits = std::str::from_utf8(&self.text[start..self.pos]).expect("ascii digits");
        digits.parse().map(Some).map_err(|_| Error::Parse {
            offset: start,
            expected: "integer that fits in 64 bits".into(),
        })
    }
}

pub fn parse_spec(text: &str) -> Result<ProgressionSpec> {
    let mut cur = Cursor {
        text: text.as_bytes(),
        pos: 0,
    };
    cur.expect_literal("m=")?;
    let m_offset = cur.pos;
    let m = match cur.integer()? {
        Some(0) => {
            return Err(Error::Parse {
                offset: m_offset,
                expected: "positive integer".into(),
            })
        }
        Some(m) => m as usize,
        None => return Err(cur.error("integer")),
    };
    let mut polys = Vec::new();
    if cur.peek().is_some() {
        cur.expect_literal(";P=")?;
        polys.push(poly(&mut cur)?);
        while cur.eat(b',') {
            polys.push(poly(&mut cur)?);
        }
        if cur.peek().is_some() {
            return Err(cur.error("',' or end of input"));
        }
    }
    ProgressionSpec::new(m, polys)
}

/// Parses a single polynomial such as `2y^4+y^3`.
pub fn parse_poly(text: &str) -> Result<IntPolynomial> {
    let mut cur = Cursor {
        text: text.as_bytes(),
        pos: 0,
    };
    let p = poly(&mut cur)?;
    if cur.peek().is_some() {
        return Err(cur.error("'+', '-' or end of input"));
    }
    Ok(p)
}

fn poly(cur: &mut Cursor<'_>) -> Result<IntPolynomial> {
    let mut coeffs: Vec<i128> = Vec::new();
    let mut negative = cur.eat(b'-');
    loop {
        let (c, d) = term(cur)?;
        if coeffs.len() <= d {
            coeffs.resize(d + 1, 0);
        }
        let c = c as i128;
        coeffs[d] += if negative { -c } else { c };
        if cur.eat(b'+') {
            negative = false;
        } else if cur.eat(b'-') {
            negative = true;
        } else {
            break;
        }
    }
    let coeffs = coeffs
        .into_iter()
        .map(|c| {
            i64::try_from(c).map_err(|_| Error::Parse {
                offset: cur.pos,
                expected: "coefficients that fit in 64 bits".into(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntPolynomial::new(coeffs))
}

fn term(cur: &mut Cursor<'_>) -> Result<(u64, usize)> {
    let coeff = cur.integer()?;
    if !cur.eat(b'y') {
        return coeff.map(|c| (c, 0)).ok_or_else(|| cur.error("term"));
    }
    let degree = if cur.eat(b'^') {
        let offset = cur.pos;
        let d = cur.integer()?.ok_or_else(|| cur.error("integer"))?;
        usize::try_from(d)
            .ok()
            .filter(|&d| d <= 4096)
            .ok_or(Error::Parse {
                offset,
                expected: "exponent at most 4096".into(),
            })?
    } else {
        1
    };
    Ok((coeff.unwrap_or(1), degree))
}
