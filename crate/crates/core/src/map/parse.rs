use crate::error::{Error, Result};
use crate::rational::{parse_rational, Rational};

use super::{AffinePiece, PiecewiseMap};

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token { text: &line[s..i], column: s + 1 });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: s + 1 });
    }
    out
}

struct LineCursor<'a> {
    line: usize,
    tokens: Vec<Token<'a>>,
    pos: usize,
    end_column: usize,
}

impl<'a> LineCursor<'a> {
    fn error(&self, column: usize, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<&Token<'a>> {
        let column = self.end_column;
        let tok = self.tokens.get(self.pos).ok_or_else(|| Error::Syntax {
            line: self.line,
            column,
            message: format!("expected {what}"),
        })?;
        self.pos += 1;
        Ok(tok)
    }

    fn rational(&mut self, what: &str) -> Result<Rational> {
        let line = self.line;
        let tok = self.next(what)?;
        parse_rational(tok.text).ok_or_else(|| Error::Syntax {
            line,
            column: tok.column,
            message: format!("invalid rational '{}' for {what}", tok.text),
        })
    }

    fn keyword(&mut self, word: &str) -> Result<()> {
        let line = self.line;
        let tok = self.next(&format!("'{word}'"))?;
        if tok.text == word {
            Ok(())
        } else {
            Err(Error::Syntax {
                line,
                column: tok.column,
                message: format!("expected '{word}', found '{}'", tok.text),
            })
        }
    }

    fn peek_is(&self, word: &str) -> bool {
        self.tokens.get(self.pos).is_some_and(|t| t.text == word)
    }

    fn finish(&self) -> Result<()> {
        match self.tokens.get(self.pos) {
            Some(t) => Err(self.error(t.column, format!("unexpected '{}'", t.text))),
            None => Ok(()),
        }
    }
}

/// Parses the line-oriented map format.
///
/// ```text
/// interval 0 1
/// piece 0 1/2 : slope 1 intercept 1/8
/// piece 1/2 1 : slope 1 intercept -1/8
/// ```
///
/// The `slope` and `intercept` keywords may be omitted.
pub fn parse_map(text: &str) -> Result<PiecewiseMap> {
    let mut interval: Option<(Rational, Rational)> = None;
    let mut pieces: Vec<AffinePiece> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let content = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(content);
        if tokens.is_empty() {
            continue;
        }
        let end_column = content.trim_end().chars().count() + 1;
        let mut cur = LineCursor {
            line: line_no,
            tokens,
            pos: 1,
            end_column,
        };
        let head = cur.tokens[0].text;
        match head {
            "interval" => {
                if interval.is_some() {
                    return Err(cur.error(1, "duplicate interval header"));
                }
                if !pieces.is_empty() {
                    return Err(cur.error(1, "interval header must come first"));
                }
                let a = cur.rational("left end")?;
                let b = cur.rational("right end")?;
                cur.finish()?;
                if a >= b {
                    return Err(Error::EmptyInterval);
                }
                interval = Some((a, b));
            }
            "piece" => {
                let Some((a, b)) = &interval else {
                    return Err(cur.error(1, "piece before interval header"));
                };
                let left = cur.rational("piece left end")?;
                let right = cur.rational("piece right end")?;
                cur.keyword(":")?;
                if cur.peek_is("slope") {
                    cur.pos += 1;
                }
                let slope = cur.rational("slope")?;
                if cur.peek_is("intercept") {
                    cur.pos += 1;
                }
                let intercept = cur.rational("intercept")?;
                cur.finish()?;
                if num_traits::Zero::is_zero(&slope) {
                    return Err(Error::ZeroSlope { line: line_no });
                }
                let expected = pieces.last().map_or(a, |p| &p.right);
                if &left != expected {
                    return Err(Error::Coverage(format!(
                        "line {line_no}: piece starts at {left}, expected {expected}"
                    )));
                }
                if left >= right || &right > b {
                    return Err(Error::Coverage(format!(
                        "line {line_no}: invalid piece ({left}, {right})"
                    )));
                }
                pieces.push(AffinePiece::new(left, right, slope, intercept));
            }
            other => return Err(cur.error(1, format!("unknown directive '{other}'"))),
        }
    }
    let Some((a, b)) = interval else {
        return Err(Error::Syntax {
            line: last_line.max(1),
            column: 1,
            message: "missing interval header".into(),
        });
    };
    PiecewiseMap::new(a, b, pieces)
}

pub(super) fn to_text(f: &PiecewiseMap) -> String {
    let mut out = format!("interval {} {}\n", f.a, f.b);
    for p in &f.pieces {
        out.push_str(&format!(
            "piece {} {} : slope {} intercept {}\n",
            p.left, p.right, p.slope, p.intercept
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn shorthand_and_merge() {
        let f = parse_map("interval 0 1\npiece 0 1/2 : 1 1/8\npiece 1/2 1 : 1 -1/8\n").unwrap();
        assert_eq!(f.breakpoints(), vec![rat(1, 2)]);
        let id = parse_map("interval 0 1\npiece 0 1/2 : slope 1 intercept 0 # left\npiece 1/2 1 : slope 1 intercept 0\n")
            .unwrap();
        assert!(id.breakpoints().is_empty());
        assert_eq!(id.pieces().len(), 1);
        assert!(id.special_points().s.is_empty());
    }

    #[test]
    fn errors() {
        let zero = parse_map("interval 0 1\npiece 0 1 : slope 0 intercept 1/2\n");
        assert_eq!(zero, Err(Error::ZeroSlope { line: 2 }));
        assert_eq!(zero.unwrap_err().to_string(), "line 2: zero slope");
        match parse_map("interval 0 1\npiece 0 1 : slope x intercept 0\n") {
            Err(Error::Syntax { line: 2, column: 19, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_map("interval 0 1\npiece 0 1/2 : slope 1 intercept 0\n"),
            Err(Error::Coverage(_))
        ));
        assert!(matches!(
            parse_map("interval 0 1\npiece 0 1 : slope 2 intercept 0\n"),
            Err(Error::ImageEscapes(_))
        ));
        assert_eq!(parse_map("interval 1 1\n"), Err(Error::EmptyInterval));
        assert!(matches!(parse_map("piece 0 1 : 1 0\n"), Err(Error::Syntax { line: 1, .. })));
    }

    #[test]
    fn round_trip() {
        let f = parse_map("interval -1 2/3\npiece -1 0 : slope 1/2 intercept 0\npiece 0 2/3 : slope -1 intercept 2/3\n")
            .unwrap();
        assert_eq!(parse_map(&f.to_text()).unwrap(), f);
    }
}
