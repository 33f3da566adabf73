//! Symmetry-operation strings (`-x,y+1/2,-z`) and the line-oriented group
//! catalog format.
//!
//! ```text
//! [group]
//! # comment
//! id = 3/113
//! name = P-42_1m
//! gram = 1 0 0; 0 1 0; 0 0 1
//! op = -x+1/2,-y+1/2,z
//! ```

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groupcore::AffineElement;
use crate::ratlin::{int, GramForm, Int, IntMat, LinAlgError, Rat, RatMat};

const AXES: [char; 4] = ['x', 'y', 'z', 'w'];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("expected {expected} coordinates, found {found}")]
    WrongCoordinateCount { expected: usize, found: usize },
    #[error("axis '{axis}' repeated in coordinate {coord}")]
    RepeatedAxis { axis: char, coord: usize },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("line {line}: {msg}")]
    Catalog { line: usize, msg: String },
}

/// Raw text of a symmetry operation, e.g. `"-x,y+1/2,-z"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymOpText(pub String);

impl SymOpText {
    pub fn parse(&self, dim: usize) -> Result<AffineElement, ParseError> {
        parse_symop(&self.0, dim)
    }
}

impl fmt::Display for SymOpText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// `<dim>/<IT number>`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupId {
    pub dim: usize,
    pub it: u32,
}

impl GroupId {
    pub fn new(dim: usize, it: u32) -> Self {
        GroupId { dim, it }
    }

    /// Number of IT entries per dimension.
    pub fn max_it(dim: usize) -> Option<u32> {
        match dim {
            1 => Some(2),
            2 => Some(17),
            3 => Some(230),
            4 => Some(4894),
            _ => None,
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.dim, self.it)
    }
}

impl FromStr for GroupId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (d, n) = s
            .trim()
            .split_once('/')
            .ok_or_else(|| format!("'{s}' is not of the form <dim>/<IT>"))?;
        let dim: usize = d
            .trim()
            .parse()
            .map_err(|_| format!("bad dimension in '{s}'"))?;
        let it: u32 = n
            .trim()
            .parse()
            .map_err(|_| format!("bad IT number in '{s}'"))?;
        let max = GroupId::max_it(dim).ok_or_else(|| format!("unsupported dimension {dim}"))?;
        if it == 0 || it > max {
            return Err(format!(
                "IT number {it} out of range 1..={max} for dimension {dim}"
            ));
        }
        Ok(GroupId { dim, it })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: GroupId,
    pub name: String,
    pub gram: GramForm,
    pub ops: Vec<SymOpText>,
    /// Comment lines inside the entry, e.g. its provenance.
    pub notes: Vec<String>,
}

impl CatalogEntry {
    pub fn elements(&self) -> Result<Vec<AffineElement>, ParseError> {
        self.ops.iter().map(|op| op.parse(self.id.dim)).collect()
    }
}

struct Cursor<'a> {
    chars: Vec<(usize, char)>,
    i: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.i < self.chars.len() && self.chars[self.i].1.is_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).map(|c| c.1)
    }

    fn pos(&self) -> usize {
        self.chars
            .get(self.i)
            .map_or_else(|| self.chars.last().map_or(0, |c| c.0 + 1), |c| c.0)
    }

    fn number(&mut self) -> Option<Int> {
        let start = self.i;
        while self.i < self.chars.len() && self.chars[self.i].1.is_ascii_digit() {
            self.i += 1;
        }
        if start == self.i {
            return None;
        }
        let s: String = self.chars[start..self.i].iter().map(|c| c.1).collect();
        s.parse().ok()
    }
}

fn syntax(pos: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        pos,
        msg: msg.into(),
    }
}

/// Parse one coordinate expression starting at `offset` in the full string.
fn parse_coordinate(
    text: &str,
    offset: usize,
    coord: usize,
    dim: usize,
) -> Result<(Vec<Int>, Rat), ParseError> {
    let mut cur = Cursor {
        chars: text.char_indices().map(|(i, c)| (i + offset, c)).collect(),
        i: 0,
        _src: text,
    };
    let mut row = vec![Int::zero(); dim];
    let mut seen = vec![false; dim];
    let mut constant: Option<Rat> = None;
    let mut first = true;
    loop {
        cur.skip_ws();
        let Some(c) = cur.peek() else {
            if first {
                return Err(syntax(cur.pos(), "empty coordinate"));
            }
            break;
        };
        let mut sign = 1i64;
        if c == '+' || c == '-' {
            if c == '-' {
                sign = -1;
            }
            cur.i += 1;
            cur.skip_ws();
        } else if !first {
            return Err(syntax(
                cur.pos(),
                format!("expected '+' or '-', found '{c}'"),
            ));
        }
        first = false;
        let Some(c) = cur.peek() else {
            return Err(syntax(cur.pos(), "dangling sign"));
        };
        if let Some(axis) = AXES[..dim]
            .iter()
            .position(|&a| a == c.to_ascii_lowercase())
        {
            if seen[axis] {
                return Err(ParseError::RepeatedAxis {
                    axis: AXES[axis],
                    coord,
                });
            }
            seen[axis] = true;
            row[axis] = int(sign);
            cur.i += 1;
        } else if c.is_ascii_digit() {
            let pos = cur.pos();
            let num = cur.number().expect("digit present");
            let mut value = Rat::from_integer(num);
            if cur.peek() == Some('/') {
                cur.i += 1;
                let den = cur
                    .number()
                    .ok_or_else(|| syntax(cur.pos(), "expected denominator"))?;
                if den.is_zero() {
                    return Err(syntax(cur.pos(), "zero denominator"));
                }
                value /= Rat::from_integer(den);
            }
            if cur.peek() == Some('.') {
                return Err(syntax(
                    cur.pos(),
                    "decimal constants are not accepted; use p/q",
                ));
            }
            if let Some(next) = cur.peek() {
                if next.is_alphabetic() || next == '*' {
                    return Err(syntax(
                        cur.pos(),
                        "axis coefficients other than +-1 are not supported",
                    ));
                }
            }
            if constant.is_some() {
                return Err(syntax(pos, "more than one constant term"));
            }
            constant = Some(value * Rat::from_integer(int(sign)));
        } else {
            return Err(syntax(cur.pos(), format!("unexpected character '{c}'")));
        }
    }
    Ok((row, constant.unwrap_or_else(Rat::zero)))
}

/// Parse `"-x,y+1/2,-z"` into a point matrix and an exact translation.
pub fn parse_symop(s: &str, dim: usize) -> Result<AffineElement, ParseError> {
    if dim == 0 || dim > AXES.len() {
        return Err(ParseError::UnsupportedDimension(dim));
    }
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != dim {
        return Err(ParseError::WrongCoordinateCount {
            expected: dim,
            found: parts.len(),
        });
    }
    let mut point = IntMat::zeros(dim, dim);
    let mut trans = Vec::with_capacity(dim);
    let mut offset = 0;
    for (i, part) in parts.iter().enumerate() {
        let (row, c) = parse_coordinate(part, offset, i, dim)?;
        for (j, v) in row.into_iter().enumerate() {
            point.set(i, j, v);
        }
        trans.push(c);
        offset += part.len() + 1;
    }
    Ok(AffineElement::new(point, trans))
}

fn fmt_term(out: &mut String, coeff: &Int, axis: char) {
    if coeff.is_zero() {
        return;
    }
    if coeff.is_negative() {
        out.push('-');
    } else if !out.is_empty() {
        out.push('+');
    }
    let a = coeff.abs();
    if !a.is_one() {
        out.push_str(&a.to_string());
    }
    out.push(axis);
}

/// Inverse of [`parse_symop`].
pub fn format_symop(e: &AffineElement) -> String {
    let n = e.dim();
    let mut coords = Vec::with_capacity(n);
    for i in 0..n {
        let mut s = String::new();
        for j in 0..n {
            fmt_term(&mut s, e.point.get(i, j), AXES[j]);
        }
        let t = &e.trans[i];
        if !t.is_zero() {
            if t.is_negative() {
                s.push('-');
            } else if !s.is_empty() {
                s.push('+');
            }
            let a = t.abs();
            if a.is_integer() {
                s.push_str(&a.numer().to_string());
            } else {
                s.push_str(&format!("{}/{}", a.numer(), a.denom()));
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        coords.push(s);
    }
    coords.join(",")
}

fn parse_rational(tok: &str) -> Option<Rat> {
    let (n, d) = match tok.split_once('/') {
        Some((n, d)) => (n, d),
        None => (tok, "1"),
    };
    let n: Int = n.parse().ok()?;
    let d: Int = d.parse().ok()?;
    (!d.is_zero()).then(|| Rat::new(n, d))
}

fn parse_gram(text: &str, dim: usize, line: usize) -> Result<GramForm, ParseError> {
    let err = |msg: String| ParseError::Catalog { line, msg };
    let rows: Vec<Vec<Rat>> = text
        .split(';')
        .map(|r| {
            r.split_whitespace()
                .map(|t| {
                    parse_rational(t).ok_or_else(|| err(format!("bad rational '{t}' in gram")))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(err(format!("gram must be {dim}x{dim}")));
    }
    GramForm::new(RatMat::from_rows(&rows)).map_err(|e: LinAlgError| err(format!("bad gram: {e}")))
}

struct Pending {
    line: usize,
    id: Option<GroupId>,
    name: Option<String>,
    gram: Option<(String, usize)>,
    ops: Vec<(String, usize)>,
    notes: Vec<String>,
}

impl Pending {
    fn new(line: usize) -> Self {
        Pending {
            line,
            id: None,
            name: None,
            gram: None,
            ops: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn finish(self) -> Result<CatalogEntry, ParseError> {
        let id = self.id.ok_or(ParseError::Catalog {
            line: self.line,
            msg: "group without id".into(),
        })?;
        let gram = match self.gram {
            Some((text, line)) => parse_gram(&text, id.dim, line)?,
            None => GramForm::identity(id.dim),
        };
        let mut ops = Vec::new();
        for (text, line) in self.ops {
            parse_symop(&text, id.dim).map_err(|e| ParseError::Catalog {
                line,
                msg: e.to_string(),
            })?;
            ops.push(SymOpText(text));
        }
        Ok(CatalogEntry {
            id,
            name: self.name.unwrap_or_default(),
            gram,
            ops,
            notes: self.notes,
        })
    }
}

/// Parse a catalog; entries come back in file order.
pub fn parse_catalog(text: &str) -> Result<Vec<CatalogEntry>, ParseError> {
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    let mut current: Option<Pending> = None;
    let push = |p: Pending, entries: &mut Vec<CatalogEntry>, seen: &mut HashSet<GroupId>| {
        let line = p.line;
        let e = p.finish()?;
        if !seen.insert(e.id) {
            return Err(ParseError::Catalog {
                line,
                msg: format!("duplicate id {}", e.id),
            });
        }
        entries.push(e);
        Ok(())
    };
    for (idx, raw) in text.split('\n').enumerate() {
        let line = idx + 1;
        let l = raw.trim_end_matches('\r').trim();
        if l.is_empty() {
            continue;
        }
        if let Some(c) = l.strip_prefix('#') {
            if let Some(p) = current.as_mut() {
                p.notes.push(c.trim().to_string());
            }
            continue;
        }
        if l == "[group]" {
            if let Some(p) = current.take() {
                push(p, &mut entries, &mut seen)?;
            }
            current = Some(Pending::new(line));
            continue;
        }
        if l.starts_with('[') {
            return Err(ParseError::Catalog {
                line,
                msg: format!("unknown section '{l}'"),
            });
        }
        let Some((key, value)) = l.split_once('=') else {
            return Err(ParseError::Catalog {
                line,
                msg: "expected 'key = value'".into(),
            });
        };
        let Some(p) = current.as_mut() else {
            return Err(ParseError::Catalog {
                line,
                msg: "key outside of a [group] section".into(),
            });
        };
        let value = value.trim();
        match key.trim() {
            "id" => {
                if p.id.is_some() {
                    return Err(ParseError::Catalog {
                        line,
                        msg: "id given twice".into(),
                    });
                }
                p.id = Some(
                    value
                        .parse()
                        .map_err(|msg| ParseError::Catalog { line, msg })?,
                );
            }
            "name" => p.name = Some(value.to_string()),
            "gram" => p.gram = Some((value.to_string(), line)),
            "op" => p.ops.push((value.to_string(), line)),
            other => {
                return Err(ParseError::Catalog {
                    line,
                    msg: format!("unknown key '{other}'"),
                })
            }
        }
    }
    if let Some(p) = current.take() {
        push(p, &mut entries, &mut seen)?;
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::{rat, rat_vec};

    #[test]
    fn identity_op() {
        let e = parse_symop("x,y,z", 3).unwrap();
        assert!(e.point.is_identity());
        assert_eq!(e.trans, rat_vec(&[0, 0, 0]));
    }

    #[test]
    fn glide_op_from_tetragonal_example() {
        let e = parse_symop("-x,y+1/2,-z", 3).unwrap();
        assert_eq!(
            e.point,
            IntMat::from_rows(&[vec![-1, 0, 0], vec![0, 1, 0], vec![0, 0, -1]])
        );
        assert_eq!(e.trans, vec![rat(0, 1), rat(1, 2), rat(0, 1)]);
    }

    #[test]
    fn swap_op() {
        let e = parse_symop("y,x", 2).unwrap();
        assert_eq!(e.point, IntMat::from_rows(&[vec![0, 1], vec![1, 0]]));
    }

    #[test]
    fn leading_constant_and_spaces() {
        let e = parse_symop(" 1/2 - y , x - y + 1/3 ", 2).unwrap();
        assert_eq!(e.point, IntMat::from_rows(&[vec![0, -1], vec![1, -1]]));
        assert_eq!(e.trans, vec![rat(1, 2), rat(1, 3)]);
    }

    #[test]
    fn errors() {
        assert_eq!(
            parse_symop("x,y", 3),
            Err(ParseError::WrongCoordinateCount {
                expected: 3,
                found: 2
            })
        );
        assert_eq!(
            parse_symop("x+x,y", 2),
            Err(ParseError::RepeatedAxis {
                axis: 'x',
                coord: 0
            })
        );
        match parse_symop("x,y+q", 2) {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_symop("x,0.5+y", 2),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_symop("x,y+1/2+1/2", 2),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_symop("x,z", 2),
            Err(ParseError::Syntax { .. })
        ));
        assert_eq!(
            parse_symop("x", 5),
            Err(ParseError::UnsupportedDimension(5))
        );
    }

    #[test]
    fn format_round_trip() {
        for s in ["-x,y+1/2,-z", "x-y,x,z+1/6", "-y+3/4,-x+1/4,z"] {
            let e = parse_symop(s, 3).unwrap();
            assert_eq!(format_symop(&e), s);
            assert_eq!(parse_symop(&format_symop(&e), 3).unwrap(), e);
        }
    }

    #[test]
    fn empty_catalog() {
        assert_eq!(parse_catalog("").unwrap(), vec![]);
        assert_eq!(parse_catalog("# only a comment\n\n").unwrap(), vec![]);
    }

    #[test]
    fn single_entry_without_ops() {
        let cat = parse_catalog("[group]\r\nid = 2/1\r\nname = p1\r\n").unwrap();
        assert_eq!(cat.len(), 1);
        assert_eq!(cat[0].id, GroupId::new(2, 1));
        assert!(cat[0].ops.is_empty());
        assert_eq!(cat[0].gram, GramForm::identity(2));
    }

    #[test]
    fn catalog_diagnostics() {
        let dup = "[group]\nid = 2/1\n[group]\nid = 2/1\n";
        assert!(matches!(
            parse_catalog(dup),
            Err(ParseError::Catalog { line: 3, .. })
        ));
        let bad_gram = "[group]\nid = 2/1\ngram = 1 2; 2 1\n";
        assert!(matches!(
            parse_catalog(bad_gram),
            Err(ParseError::Catalog { line: 3, .. })
        ));
        let bad_rat = "[group]\nid = 2/1\ngram = 1 x; 0 1\n";
        assert!(matches!(
            parse_catalog(bad_rat),
            Err(ParseError::Catalog { line: 3, .. })
        ));
        let bad_op = "[group]\nid = 2/2\nop = -x,-q\n";
        assert!(matches!(
            parse_catalog(bad_op),
            Err(ParseError::Catalog { line: 3, .. })
        ));
        let bad_it = "[group]\nid = 2/18\n";
        assert!(matches!(
            parse_catalog(bad_it),
            Err(ParseError::Catalog { line: 2, .. })
        ));
        let orphan = "id = 2/1\n";
        assert!(matches!(
            parse_catalog(orphan),
            Err(ParseError::Catalog { line: 1, .. })
        ));
    }

    #[test]
    fn hexagonal_gram_parses() {
        let cat = parse_catalog("[group]\nid = 2/13\ngram = 2 -1; -1 2\nop = -y,x-y\n").unwrap();
        assert_eq!(cat[0].gram.matrix().get(0, 1), &rat(-1, 1));
        assert_eq!(cat[0].elements().unwrap().len(), 1);
    }
}
